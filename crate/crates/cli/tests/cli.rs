use std::process::{Command, Output};

use serde_json::Value;

fn hflink(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hflink")).args(args).output().expect("binary runs")
}

fn ok_json(args: &[&str]) -> Value {
    let out = hflink(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("JSON output")
}

fn code(args: &[&str]) -> i32 {
    hflink(args).status.code().expect("exit code")
}

fn stdout(args: &[&str]) -> String {
    let out = hflink(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn gens(v: &Value) -> Vec<Vec<i64>> {
    serde_json::from_value(v.clone()).unwrap()
}

#[test]
fn region_json_shape() {
    let v = ok_json(&["region", "--catalog", "mirror_L7a3"]);
    assert_eq!(gens(&v["region"]["generators"]), vec![vec![0, 2], vec![1, 1]]);
    assert_eq!(gens(&v["region"]["maximal_points"]), vec![vec![0, 1]]);

    let v = ok_json(&["region", "--catalog", "two_bridge:3"]);
    assert_eq!(gens(&v["region"]["generators"]), vec![vec![0, 3], vec![1, 2], vec![2, 1], vec![3, 0]]);

    let v = ok_json(&["region", "--catalog", "borromean"]);
    assert_eq!(gens(&v["region"]["generators"]), vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]);
}

#[test]
fn h_table_grids() {
    let v = ok_json(&["h-table", "--catalog", "whitehead", "--box", "3"]);
    let h: Vec<i64> = serde_json::from_value(v["h"].clone()).unwrap();
    assert_eq!(h.len(), 49);
    // lexicographic order, last coordinate fastest: (s1, s2) -> (s1 + 3) * 7 + (s2 + 3)
    for s1 in 0..=3i64 {
        for s2 in 0..=3i64 {
            let want = i64::from(s1 == 0 && s2 == 0);
            assert_eq!(h[((s1 + 3) * 7 + s2 + 3) as usize], want, "({s1},{s2})");
        }
    }

    let grid = stdout(&["h-table", "--catalog", "two_bridge:2", "--format", "ascii", "--window", "0:3"]);
    let rows: Vec<&str> = grid.lines().collect();
    // bottom data row is s2 = 0: h(0,0), h(1,0), h(2,0), h(3,0)
    let bottom = rows.iter().find(|r| r.trim_start().starts_with("0 |")).unwrap();
    assert!(bottom.ends_with("| 1 1 0 0"), "{bottom}");

    // the unknot has h = 0 and H(s) = max(0, -s)
    let one = stdout(&["h-table", "--catalog", "unknot", "--format", "ascii", "--window", "-2:1"]);
    assert!(one.contains(" h |  0  0  0  0"), "{one}");
    let one = stdout(&["h-table", "--catalog", "unknot", "--format", "ascii", "--window", "-2:1", "--big-h"]);
    assert!(one.contains(" h |  2  1  0  0"), "{one}");
    let v = ok_json(&["h-table", "--catalog", "unknot", "--big-h", "--box", "2"]);
    assert_eq!(v["H"], serde_json::json!([2, 1, 0, 0, 0]));
}

#[test]
fn bounds_examples() {
    let v = ok_json(&["bounds", "--catalog", "two_bridge:4"]);
    assert_eq!((v["best"].as_i64(), v["provenance"].as_str()), (Some(4), Some("min-region")));
    let v = ok_json(&["bounds", "--catalog", "whitehead_cable:2,7"]);
    assert_eq!(v["best"], 4);
    let v = ok_json(&["bounds", "--catalog", "unlink:3"]);
    assert_eq!(v["best"], 0);
    assert_eq!(v["unlink_test"], true);
    let v = ok_json(&["bounds", "--catalog", "whitehead"]);
    assert_eq!(v["unlink_test"], false);
}

#[test]
fn cable_command() {
    let v = ok_json(&["cable", "--catalog", "unknot", "--cable", "2:3"]);
    assert_eq!(gens(&v["direct"]["generators"]), vec![vec![1]]);
    assert_eq!(v["consistent"], true);
    let delta = &v["cabled"]["alexander"]["1"];
    assert!(delta.is_array(), "{v}");

    let v = ok_json(&["cable", "--catalog", "whitehead", "--cable", "2:7,1:1"]);
    assert_eq!(gens(&v["direct"]["generators"]), vec![vec![3, 1], vec![5, 0]]);
    assert_eq!(v["direct"]["generators"], v["via_t"]["generators"]);

    let v = ok_json(&["cable", "--catalog", "two_bridge:2", "--cable", "2:7,3:10"]);
    assert_eq!(gens(&v["direct"]["generators"]), vec![vec![3, 15], vec![5, 12], vec![7, 9]]);
    assert_eq!(v["consistent"], true);

    // below the L-space range: rejected as invalid input
    assert_eq!(code(&["cable", "--catalog", "two_bridge:2", "--cable", "2:5,3:7"]), 2);
    assert_eq!(code(&["cable", "--catalog", "whitehead"]), 4);
    assert_eq!(code(&["cable", "--catalog", "whitehead", "--cable", "2:4,1:1"]), 4);

    // --cable also works as a preprocessing flag
    let v = ok_json(&["region", "--catalog", "unknot", "--cable", "2:3"]);
    assert_eq!(gens(&v["region"]["generators"]), vec![vec![1]]);
}

#[test]
fn d_invariants() {
    let v = ok_json(&["d-invariants", "--lens", "5"]);
    let d: Vec<&str> = v["values"].as_array().unwrap().iter().map(|r| r["d"].as_str().unwrap()).collect();
    assert_eq!(d, vec!["1/5", "-1/5", "-1/1", "-1/5", "1/5"]);

    let v = ok_json(&["d-invariants", "--circle-bundle", "10:1"]);
    // k = 0 row: E(10,0) + 1 = -9/4 + 1
    let row = v["values"].as_array().unwrap().iter().find(|r| r["spin_c"] == 0).unwrap();
    assert_eq!(row["d"], "-5/4");

    let v = ok_json(&["d-invariants", "--catalog", "whitehead", "--framing", "50,50", "--points", "0,0"]);
    assert_eq!(v["values"][0]["d"], "45/2");

    let v = ok_json(&["d-invariants", "--catalog", "unknot", "--framing", "3"]);
    assert_eq!(v["values"].as_array().unwrap().len(), 3);
    assert_eq!(v["values"][1]["d"], "1/2");

    assert_eq!(code(&["d-invariants", "--catalog", "trefoil_rh", "--framing", "2"]), 3);
    assert_eq!(code(&["d-invariants"]), 4);
    assert_eq!(code(&["d-invariants", "--lens", "4", "--circle-bundle", "4:1"]), 4);
}

#[test]
fn validate_and_hint() {
    for key in ["unknot", "trefoil_rh", "whitehead", "borromean", "mirror_L7a3", "two_bridge:2", "unlink:2"] {
        assert_eq!(code(&["validate", "--catalog", key]), 0, "{key}");
    }

    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("w.json");

    // the identity cable echoes the Whitehead descriptor; then negate its
    // two-variable polynomial
    let v = ok_json(&["cable", "--catalog", "whitehead", "--cable", "1:1,1:1"]);
    let mut desc = v["cabled"].clone();
    std::fs::write(&good, serde_json::to_string(&desc).unwrap()).unwrap();
    assert_eq!(code(&["validate", "--link", good.to_str().unwrap()]), 0);

    let terms = desc["alexander"]["1,2"].as_array_mut().unwrap();
    for t in terms.iter_mut() {
        let c = t["coef"].as_i64().unwrap();
        t["coef"] = Value::from(-c);
    }
    let bad = dir.path().join("flipped.json");
    std::fs::write(&bad, serde_json::to_string(&desc).unwrap()).unwrap();
    let out = hflink(&["validate", "--link", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["valid"], false);
    assert!(report["hint"].as_str().unwrap().contains("{1,2}"), "{report}");
    // the resolving commands accept it and pick the other sign
    assert_eq!(code(&["region", "--link", bad.to_str().unwrap()]), 0);

    let corrupt = dir.path().join("corrupt.json");
    std::fs::write(&corrupt, "{\"name\": \"x\", ").unwrap();
    assert_eq!(code(&["validate", "--link", corrupt.to_str().unwrap()]), 2);
}

#[test]
fn catalog_list() {
    let v = ok_json(&["catalog-list"]);
    let keys: Vec<&str> = v.as_array().unwrap().iter().map(|e| e["key"].as_str().unwrap()).collect();
    assert!(keys.contains(&"whitehead") && keys.contains(&"two_bridge_cable"));
    assert!(stdout(&["catalog-list", "--format", "ascii"]).contains("two_bridge:k"));
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["region"]), 4);
    assert_eq!(code(&["region", "--catalog", "nope"]), 4);
    assert_eq!(code(&["region", "--catalog", "whitehead", "--link", "x.json"]), 4);
    assert_eq!(code(&["region", "--catalog", "whitehead", "--box", "1"]), 3);
    assert_eq!(code(&["frobnicate"]), 4);
    assert_eq!(code(&["region", "--catalog", "borromean", "--format", "svg"]), 4);
    assert_eq!(code(&["--help"]), 0);
}

#[test]
fn svg_and_out() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig.svg");
    let p = path.to_str().unwrap();
    assert_eq!(code(&["region", "--catalog", "two_bridge:2", "--format", "svg", "--out", p]), 0);
    let svg = std::fs::read_to_string(&path).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    assert!(svg.contains("two_bridge(2)") || svg.contains("two_bridge"));
}

#[test]
fn deterministic_output() {
    for args in [
        &["region", "--catalog", "borromean"][..],
        &["cable", "--catalog", "whitehead", "--cable", "3:10,1:1"][..],
        &["bounds", "--catalog", "mirror_L7a3", "--jobs", "4"][..],
        &["h-table", "--catalog", "two_bridge:2", "--jobs", "3"][..],
    ] {
        assert_eq!(hflink(args).stdout, hflink(args).stdout, "{args:?}");
    }
    let serial = hflink(&["h-table", "--catalog", "two_bridge:3"]).stdout;
    let threaded = hflink(&["h-table", "--catalog", "two_bridge:3", "--jobs", "4"]).stdout;
    assert_eq!(serial, threaded);
}
