//! Acceptance run: one PASS/FAIL line per criterion. All comparisons are
//! exact (integers and rationals), so the tolerance is zero throughout.

use std::process::ExitCode;

use hflink::bounds::{
    admissible_region, best_lower_bound, bound_min_region, circle_bundle_d, containment_holds, large_surgery_d,
    lens_d, unlink_test,
};
use hflink::cable::{cable_alexander, cable_consistency_check, region_via_t, CableSpec};
use hflink::hfunction::{HFunction, HOptions, HTable};
use hflink::linkcat::{self, LinkDescriptor, Subset};
use hflink::region::{maximal_lattice_points, region_from_h, UpwardClosedRegion};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn table(d: &LinkDescriptor) -> Result<HTable, String> {
    HTable::build(d, &HOptions::default()).map_err(|e| format!("{}: {e}", d.name))
}

fn region(d: &LinkDescriptor) -> Result<UpwardClosedRegion, String> {
    region_from_h(&table(d)?).map_err(|e| format!("{}: {e}", d.name))
}

fn catalog() -> Vec<LinkDescriptor> {
    let mut v: Vec<LinkDescriptor> = [
        "unknot",
        "trefoil_rh",
        "unlink:1",
        "unlink:2",
        "unlink:3",
        "whitehead",
        "two_bridge:2",
        "two_bridge:3",
        "two_bridge:4",
        "two_bridge:5",
        "borromean",
        "mirror_L7a3",
        "whitehead_cable:2,7",
        "whitehead_cable:3,10",
        "two_bridge_cable:2,2,7,3,10",
    ]
    .iter()
    .map(|k| linkcat::catalog_from_spec(k).expect("catalog key"))
    .collect();
    v.push(linkcat::disjoint_union(&linkcat::whitehead(), &linkcat::trefoil()));
    v
}

fn c1_two_bridge() -> Outcome {
    for k in 1..=5i64 {
        let d = linkcat::two_bridge(k as u32);
        let t = table(&d)?;
        let r = region_from_h(&t).map_err(|e| e.to_string())?;
        let want = UpwardClosedRegion::new(2, (0..=k).map(|i| vec![i, k - i]).collect());
        ensure(r == want, || format!("k={k}: region {r}, want {want}"))?;
        let b = bound_min_region(&t).map_err(|e| e.to_string())?;
        ensure(b == k, || format!("k={k}: bound {b}"))?;
        ensure(t.h(&[k, 0]) == 0 && t.h(&[k - 1, 0]) == 1, || format!("k={k}: h(k,0), h(k-1,0) wrong"))?;
    }
    Ok("k=1..5: bound k, generators {(i,k-i)}, h(k,0)=0, h(k-1,0)=1".into())
}

fn c2_borromean() -> Outcome {
    let t = table(&linkcat::borromean())?;
    ensure(t.h(&[0, 0, 0]) == 1, || "h(0,0,0) != 1".into())?;
    let m = t.radius();
    for s in t.points() {
        if s.iter().all(|&x| x >= 0) && s.iter().any(|&x| x > 0) && s.iter().all(|&x| x <= m) {
            ensure(t.h(&s) == 0, || format!("h{s:?} = {}", t.h(&s)))?;
        }
    }
    let best = best_lower_bound(&t).map_err(|e| e.to_string())?;
    ensure(best.best == 1, || format!("best bound {}", best.best))?;
    let mx = maximal_lattice_points(&t).map_err(|e| e.to_string())?;
    ensure(mx == vec![vec![0, 0, 0]], || format!("maximal points {mx:?}"))?;
    Ok(format!("h(0)=1, h=0 above 0, best bound 1 ({}), maximal {{(0,0,0)}}", best.provenance))
}

fn c3_mirror() -> Outcome {
    let t = table(&linkcat::mirror_l7a3())?;
    let r = region_from_h(&t).map_err(|e| e.to_string())?;
    let want = UpwardClosedRegion::new(2, vec![vec![1, 1], vec![0, 2]]);
    ensure(r == want, || format!("region {r}"))?;
    let b = bound_min_region(&t).map_err(|e| e.to_string())?;
    ensure(b == 2, || format!("bound {b}"))?;
    Ok(format!("region {r}, bound 2"))
}

fn c4_whitehead_cables() -> Outcome {
    let mut notes = Vec::new();
    for (p, q) in [(2u32, 7u32), (3, 10)] {
        let want = i64::from((p - 1) * (q - 1) / 2 + 1);
        let spec = CableSpec::new(vec![(p, q), (1, 1)]).map_err(|e| e.to_string())?;
        let rep = cable_consistency_check(&linkcat::whitehead(), &spec, &HOptions::default())
            .map_err(|e| format!("({p},{q}): {e}"))?;
        ensure(rep.consistent(), || format!("({p},{q}): direct {} vs T {}", rep.direct, rep.via_t))?;
        let direct = bound_min_region(&table(&rep.cabled)?).map_err(|e| e.to_string())?;
        let via_t = rep.via_t.min_coordinate_sum().unwrap_or(-1);
        ensure(direct == want && via_t == want, || format!("({p},{q}): direct {direct}, T {via_t}, want {want}"))?;
        notes.push(format!("({p},{q}) -> {want} {}", rep.direct));
    }
    Ok(notes.join("; "))
}

fn c5_cable_sanity() -> Outcome {
    let spec = CableSpec::new(vec![(2, 3)]).map_err(|e| e.to_string())?;
    let c = cable_alexander(&linkcat::unknot(), &spec).map_err(|e| e.to_string())?.link;
    let got = c.alexander(Subset::full(1)).cloned();
    ensure(got.as_ref() == Some(&linkcat::trefoil_polynomial()), || format!("Δ = {got:?}"))?;
    let r = region(&c)?;
    ensure(r == UpwardClosedRegion::new(1, vec![vec![1]]), || format!("region {r}"))?;
    for d in catalog() {
        let id = CableSpec::identity(d.n());
        let same = cable_alexander(&d, &id).map_err(|e| e.to_string())?.link;
        ensure(same.same_link(&d), || format!("identity cable changed {}", d.name))?;
        let r = region(&d)?;
        ensure(region_via_t(&r, &id) == r, || format!("identity T moved {}", d.name))?;
    }
    Ok("unknot (2,3) gives t - 1 + t^-1 with region {1}; identity cables are no-ops".into())
}

fn c6_roundtrip() -> Outcome {
    let mut points = 0usize;
    for d in catalog() {
        let t = table(&d)?;
        let full = Subset::full(d.n());
        let m = t.radius();
        for s in t.points() {
            if s.iter().any(|x| x.abs() >= m) {
                continue;
            }
            let want = t.chi(full, &s);
            let got = t.chi_from_h(&s);
            ensure(BigInt::from(got) == want, || format!("{} at {s:?}: {got} vs {want}", d.name))?;
            points += 1;
        }
    }
    Ok(format!("{points} interior points, zero mismatches"))
}

fn c7_validator() -> Outcome {
    for d in catalog() {
        let rep = table(&d)?.validate();
        ensure(rep.is_ok(), || format!("{}: {:?}", d.name, rep.issues))?;
    }
    let w = linkcat::whitehead();
    let full = Subset::full(2);
    let flipped_poly = -w.alexander(full).expect("whitehead polynomial").clone();
    let flipped = w.clone().with_alexander(full, flipped_poly);
    let f = HFunction::with_stored_signs(&flipped, true).map_err(|e| e.to_string())?;
    let t = HTable::from_function(&flipped, f, &HOptions::default()).map_err(|e| e.to_string())?;
    let rep = t.validate();
    ensure(rep.has_negative(), || "flipped Whitehead did not produce negative H".into())?;
    Ok(format!("all catalog links valid; flipped Whitehead fails with {} issue(s)", rep.count))
}

/// d of −m surgery on the unknot from the degree shift of the trace
/// cobordism: the max of `(c² − 3σ − 2χ)/4` over characteristic `c`
/// restricting to the class, where `c² = −c₀²/m`, `σ = −1`, `χ = 1`.
fn lens_oracle(m: i64, k: i64) -> BigRational {
    let class = (m + 2 * k).rem_euclid(2 * m);
    (-3 * m..=3 * m)
        .filter(|c| (c - class).rem_euclid(2 * m) == 0)
        .map(|c| (BigRational::new(BigInt::from(-c * c), BigInt::from(m)) + BigRational::from_integer(1.into())) / BigRational::from_integer(4.into()))
        .max()
        .expect("nonempty class")
}

fn c8_d_invariants() -> Outcome {
    let unknot = table(&linkcat::unknot())?;
    let mut count = 0;
    for m in 1..=12i64 {
        for k in -(m / 2)..=(m / 2) {
            let e = lens_d(m, k).map_err(|e| e.to_string())?;
            let o = lens_oracle(m, k);
            ensure(e == o, || format!("E({m},{k}) = {e} vs oracle {o}"))?;
            let (cb, _) = circle_bundle_d(m, 0, k).map_err(|e| e.to_string())?;
            ensure(cb == e, || format!("circle bundle g=0 at ({m},{k}): {cb}"))?;
            let ls = large_surgery_d(&unknot, &[m], &[k], false).map_err(|e| e.to_string())?;
            ensure(ls == -e.clone(), || format!("large surgery ({m},{k}): {ls}"))?;
            count += 1;
        }
    }
    Ok(format!("{count} pairs (m <= 12, |k| <= m/2) agree exactly"))
}

fn c9_unlink() -> Outcome {
    for n in 1..=3 {
        let t = table(&linkcat::unlink(n))?;
        ensure(t.points().all(|s| t.h(&s) == 0), || format!("h != 0 on the {n}-unlink"))?;
        ensure(unlink_test(&t).map_err(|e| e.to_string())?, || format!("{n}-unlink rejected"))?;
    }
    let mut rejected = 0;
    for d in catalog() {
        // split links and the unknot are the unlinks
        let trivial_knot = d.n() == 1 && d.alexander(Subset::full(1)).is_some_and(|p| p.len() == 1);
        if !d.is_atomic() || trivial_knot {
            continue;
        }
        let t = table(&d)?;
        ensure(!unlink_test(&t).map_err(|e| e.to_string())?, || format!("{} passed the unlink test", d.name))?;
        rejected += 1;
    }
    Ok(format!("unlinks n<=3 pass; {rejected} non-split links rejected"))
}

fn c10_containment_and_laws() -> Outcome {
    for d in catalog() {
        let t = table(&d)?;
        let adm = admissible_region(&t).map_err(|e| format!("{}: {e}", d.name))?;
        let r = region_from_h(&t).map_err(|e| e.to_string())?;
        ensure(containment_holds(&adm, &r), || format!("{}: {adm} not inside {r}", d.name))?;
    }
    let gen = |n: usize| prop::collection::vec(prop::collection::vec(0i64..=6, n), 0..6);
    let mut runner = TestRunner::new(Config { cases: 1000, failure_persistence: None, ..Config::default() });
    runner
        .run(&(gen(2), gen(1), prop::collection::vec(-1i64..=8, 3), 0usize..3), |(a, b, x, i)| {
            let (ra, rb) = (UpwardClosedRegion::new(2, a), UpwardClosedRegion::new(1, b));
            let p = ra.product(&rb);
            prop_assert!(ra.is_antichain() && rb.is_antichain() && p.is_antichain());
            prop_assert_eq!(p.contains(&x), ra.contains(&x[..2]) && rb.contains(&x[2..]));
            let mut y = x.clone();
            y[i] += 1;
            prop_assert!(!p.contains(&x) || p.contains(&y));
            Ok(())
        })
        .map_err(|e| format!("region laws: {e}"))?;
    Ok("containment on every catalog link; 1000 random cases of the region laws".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("two-bridge family", c1_two_bridge),
        ("Borromean rings", c2_borromean),
        ("mirror L7a3", c3_mirror),
        ("cabled Whitehead", c4_whitehead_cables),
        ("cable sanity", c5_cable_sanity),
        ("H/chi roundtrip", c6_roundtrip),
        ("validator and sign flip", c7_validator),
        ("d-invariants", c8_d_invariants),
        ("unlink checker", c9_unlink),
        ("containment and region laws", c10_containment_and_laws),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(note) => println!("PASS {:>2} {name}: {note}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
