use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hflink::bounds::{
    best_lower_bound, circle_bundle_d, format_rational, large_surgery_d, lens_d, unlink_test, BoundsError,
    UNLINK_NOTE,
};
use hflink::cable::{cable_alexander, cable_consistency_check, CableCheckError, CableError, CableSpec};
use hflink::hfunction::{HError, HFunction, HOptions, HTable, SignChoice};
use hflink::linkcat::{self, JsonError, LinkDescriptor, LinkError, Subset, CATALOG_KEYS};
use hflink::region::{maximal_lattice_points, region_from_h, RegionError, UpwardClosedRegion};
use hflink::render::{ascii_grid, default_extent, svg_staircase};
use serde_json::{json, Value};

const EXIT_VALIDATION: u8 = 2;
const EXIT_BOX: u8 = 3;
const EXIT_USAGE: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "hflink", version, about = "H-functions, genus regions and 4-genus bounds of L-space links")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Catalog link, e.g. `whitehead`, `two_bridge:3`, `whitehead_cable:2,7`
    #[arg(long, global = true, value_name = "KEY[:PARAMS]")]
    catalog: Option<String>,
    /// Link descriptor JSON file
    #[arg(long, global = true, value_name = "FILE")]
    link: Option<PathBuf>,
    /// Box half-width M; the table covers [-M, M]^n
    #[arg(long = "box", global = true, value_name = "M")]
    radius: Option<i64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write output here instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Compute without the L-space assertion and past largeness checks
    #[arg(long, global = true)]
    force: bool,
    /// Threads used to fill H tables
    #[arg(long, global = true, default_value_t = 1, value_name = "N")]
    jobs: usize,
    /// Cable every component first, e.g. `2:7,1:1`
    #[arg(long, global = true, value_name = "SPEC")]
    cable: Option<String>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Ascii,
    Svg,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulate h over the box
    HTable {
        /// Window shown in ASCII output, e.g. `-2:3` (default: the whole box)
        #[arg(long, value_name = "LO:HI", allow_hyphen_values = true)]
        window: Option<String>,
        /// Show H itself instead of h = H - H_unlink
        #[arg(long = "big-h")]
        big_h: bool,
    },
    /// Generators and maximal lattice points of the h-region
    Region,
    /// 4-genus lower bounds
    Bounds,
    /// Cable the link and compare the direct region with the transformed one
    Cable,
    /// d-invariants of lens spaces, circle bundles and large surgeries
    DInvariants {
        /// Lens space L(M,1)
        #[arg(long, value_name = "M")]
        lens: Option<i64>,
        /// Circle bundle with Euler number m over a genus g surface
        #[arg(long = "circle-bundle", value_name = "m:g")]
        circle_bundle: Option<String>,
        /// Diagonal surgery framing on the input link, e.g. `50,50`
        #[arg(long, value_name = "q1,q2,...")]
        framing: Option<String>,
        /// Spin^c labels for --framing, e.g. `0,0;1,-2`
        #[arg(long, value_name = "v1,..;..", allow_hyphen_values = true)]
        points: Option<String>,
    },
    /// Check the descriptor and its H-function with the stored signs
    Validate,
    /// List catalog keys
    CatalogList,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }

    fn validation(message: impl Into<String>) -> Self {
        Failure { code: EXIT_VALIDATION, message: message.into() }
    }
}

impl From<HError> for Failure {
    fn from(e: HError) -> Self {
        let code = match e {
            HError::BoxTooSmall { .. } | HError::BoxTooLarge { .. } => EXIT_BOX,
            HError::Dimension { .. } => EXIT_USAGE,
            _ => EXIT_VALIDATION,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<RegionError> for Failure {
    fn from(e: RegionError) -> Self {
        match e {
            RegionError::H(h) => h.into(),
            RegionError::Link(l) => l.into(),
            other => Failure::validation(other.to_string()),
        }
    }
}

impl From<LinkError> for Failure {
    fn from(e: LinkError) -> Self {
        match e {
            LinkError::Cable(c) => c.into(),
            LinkError::Laurent(_) => Failure::validation(e.to_string()),
            _ => Failure::usage(e.to_string()),
        }
    }
}

impl From<CableError> for Failure {
    fn from(e: CableError) -> Self {
        match e {
            CableError::Laurent(_) => Failure::validation(e.to_string()),
            _ => Failure::usage(e.to_string()),
        }
    }
}

impl From<CableCheckError> for Failure {
    fn from(e: CableCheckError) -> Self {
        match e {
            CableCheckError::Cable(c) => c.into(),
            CableCheckError::Region(r) => r.into(),
            CableCheckError::H(h) => h.into(),
        }
    }
}

impl From<BoundsError> for Failure {
    fn from(e: BoundsError) -> Self {
        let code = match e {
            BoundsError::BoxTooSmall { .. } | BoundsError::NotLarge { .. } => EXIT_BOX,
            BoundsError::BadGenus { .. }
            | BoundsError::LensRange { .. }
            | BoundsError::BadFraming { .. }
            | BoundsError::OutsideDomain { .. } => EXIT_USAGE,
            BoundsError::Region(r) => return r.into(),
            _ => EXIT_VALIDATION,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<JsonError> for Failure {
    fn from(e: JsonError) -> Self {
        match e {
            JsonError::Io(_) => Failure::usage(e.to_string()),
            _ => Failure::validation(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli).and_then(|text| emit(&cli, &text)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn emit(cli: &Cli, text: &str) -> Result<(), Failure> {
    match &cli.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Result<String, Failure> {
    match &cli.command {
        Command::HTable { window, big_h } => cmd_h_table(cli, window.as_deref(), *big_h),
        Command::Region => cmd_region(cli),
        Command::Bounds => cmd_bounds(cli),
        Command::Cable => cmd_cable(cli),
        Command::DInvariants { lens, circle_bundle, framing, points } => {
            cmd_d_invariants(cli, *lens, circle_bundle.as_deref(), framing.as_deref(), points.as_deref())
        }
        Command::Validate => cmd_validate(cli),
        Command::CatalogList => cmd_catalog_list(cli),
    }
}

fn options(cli: &Cli) -> HOptions {
    HOptions { radius: cli.radius, force: cli.force, jobs: cli.jobs, ..HOptions::default() }
}

fn load_raw(cli: &Cli) -> Result<LinkDescriptor, Failure> {
    match (&cli.catalog, &cli.link) {
        (Some(key), None) => Ok(linkcat::catalog_from_spec(key)?),
        (None, Some(path)) => Ok(linkcat::load_json(path)?),
        (Some(_), Some(_)) => Err(Failure::usage("give either --catalog or --link, not both")),
        (None, None) => Err(Failure::usage("an input link is required (--catalog KEY or --link FILE)")),
    }
}

fn cable_spec(cli: &Cli) -> Result<Option<CableSpec>, Failure> {
    cli.cable.as_deref().map(|s| s.parse::<CableSpec>().map_err(Failure::from)).transpose()
}

/// The input link, cabled first when `--cable` is given.
fn load(cli: &Cli) -> Result<(LinkDescriptor, Vec<String>), Failure> {
    let d = load_raw(cli)?;
    match cable_spec(cli)? {
        Some(spec) => {
            let res = cable_alexander(&d, &spec)?;
            Ok((res.link, res.warnings))
        }
        None => Ok((d, Vec::new())),
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn no_svg(cli: &Cli, what: &str) -> Result<(), Failure> {
    if cli.format == Format::Svg {
        Err(Failure::usage(format!("SVG output is not available for {what}")))
    } else {
        Ok(())
    }
}

fn warn_lines(warnings: &[String]) -> String {
    warnings.iter().map(|w| format!("warning: {w}\n")).collect()
}

fn signs_json(signs: &std::collections::BTreeMap<Subset, SignChoice>) -> Value {
    Value::Object(signs.iter().map(|(b, c)| (b.key(), Value::String(c.to_string()))).collect())
}

fn points_text(points: &[Vec<i64>]) -> String {
    let items: Vec<String> = points
        .iter()
        .map(|p| format!("({})", p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")))
        .collect();
    format!("{{{}}}", items.join(", "))
}

fn region_json(r: &UpwardClosedRegion, maximal: &[Vec<i64>]) -> Value {
    json!({ "generators": r.generators(), "maximal_points": maximal })
}

fn parse_window(s: &str) -> Result<(i64, i64), Failure> {
    let bad = || Failure::usage(format!("cannot parse window {s:?}: expected LO:HI"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    let (lo, hi) = (a.trim().parse::<i64>().map_err(|_| bad())?, b.trim().parse::<i64>().map_err(|_| bad())?);
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn cmd_h_table(cli: &Cli, window: Option<&str>, big_h: bool) -> Result<String, Failure> {
    no_svg(cli, "h-table")?;
    let (d, warnings) = load(cli)?;
    let t = HTable::build(&d, &options(cli))?;
    let m = t.radius();
    let value = |s: &[i64]| if big_h { t.big_h(s) } else { t.h(s) };
    let name = if big_h { "H" } else { "h" };
    match cli.format {
        Format::Ascii => {
            let (lo, hi) = match window {
                Some(w) => parse_window(w)?,
                None => (-m, m),
            };
            let grid = ascii_grid(t.n(), lo, hi, value)
                .ok_or_else(|| Failure::usage("ASCII grids need one or two components; use --format json"))?;
            Ok(format!("{}{name}-function of {} (box radius {m})\n{grid}", warn_lines(&warnings), d.name))
        }
        _ => {
            let values: Vec<i64> = t.points().map(|s| value(&s)).collect();
            let mut obj = json!({
                "link": d.name,
                "n": t.n(),
                "radius": m,
                "order": "lexicographic in (s1, ..., sn), each from -radius to radius, last coordinate fastest",
                "signs": signs_json(&t.signs()),
                "warnings": warnings,
            });
            obj[name] = json!(values);
            Ok(pretty(&obj))
        }
    }
}

fn cmd_region(cli: &Cli) -> Result<String, Failure> {
    let (d, warnings) = load(cli)?;
    let t = HTable::build(&d, &options(cli))?;
    let r = region_from_h(&t)?;
    let maximal = maximal_lattice_points(&t)?;
    match cli.format {
        Format::Json => Ok(pretty(&json!({
            "link": d.name,
            "n": t.n(),
            "region": region_json(&r, &maximal),
            "warnings": warnings,
        }))),
        Format::Ascii => Ok(format!(
            "{}link: {}\ngenerators: {}\nmaximal points: {}\n",
            warn_lines(&warnings),
            d.name,
            r,
            points_text(&maximal)
        )),
        Format::Svg => svg_staircase(&r, default_extent(&r), &d.name)
            .ok_or_else(|| Failure::usage("SVG staircases need a two-component link")),
    }
}

fn cmd_bounds(cli: &Cli) -> Result<String, Failure> {
    no_svg(cli, "bounds")?;
    let (d, warnings) = load(cli)?;
    let t = HTable::build(&d, &options(cli))?;
    let rep = best_lower_bound(&t)?;
    let unlink = unlink_test(&t)?;
    match cli.format {
        Format::Ascii => {
            let weighted = rep.weighted.map_or("n/a".to_string(), |w| w.to_string());
            let mut s = warn_lines(&warnings);
            s += &format!("link: {}\n", d.name);
            s += &format!("min-region: {}\nmax-h: {}\nweighted: {weighted}\n", rep.min_region, rep.max_h);
            s += &format!("best: {} ({})\n", rep.best, rep.provenance);
            if unlink {
                s += &format!("note: {UNLINK_NOTE}\n");
            }
            Ok(s)
        }
        _ => Ok(pretty(&json!({
            "link": d.name,
            "min_region": rep.min_region,
            "max_h": rep.max_h,
            "weighted": rep.weighted,
            "best": rep.best,
            "provenance": rep.provenance.label(),
            "unlink_test": unlink,
            "note": if unlink { Some(UNLINK_NOTE) } else { None },
            "warnings": warnings,
        }))),
    }
}

fn cmd_cable(cli: &Cli) -> Result<String, Failure> {
    let spec = cable_spec(cli)?.ok_or_else(|| Failure::usage("cable needs --cable p1:q1,p2:q2,..."))?;
    let d = load_raw(cli)?;
    let rep = cable_consistency_check(&d, &spec, &options(cli))?;
    let cabled = HTable::build(&rep.cabled, &HOptions { radius: None, ..options(cli) })?;
    let maximal = maximal_lattice_points(&cabled)?;
    match cli.format {
        Format::Json => Ok(pretty(&json!({
            "link": d.name,
            "cable": spec.to_string(),
            "cabled": linkcat::to_json_value(&rep.cabled),
            "direct": region_json(&rep.direct, &maximal),
            "via_t": { "generators": rep.via_t.generators() },
            "consistent": rep.consistent(),
            "warnings": rep.warnings,
        }))),
        Format::Ascii => {
            let mut s = warn_lines(&rep.warnings);
            s += &format!("cabled: {} with {spec}\n", d.name);
            for b in Subset::all_nonempty(rep.cabled.n()) {
                if let Ok(sub) = linkcat::sublink(&rep.cabled, b) {
                    if let Some(p) = sub.alexander(Subset::full(b.len())) {
                        s += &format!("  Δ[{}] = {p}\n", b.key());
                    }
                }
            }
            s += &format!("direct region: {}\n", rep.direct);
            s += &format!("T-image region: {}\n", rep.via_t);
            s += &format!("maximal points: {}\n", points_text(&maximal));
            s += &format!("consistent: {}\n", if rep.consistent() { "yes" } else { "no" });
            Ok(s)
        }
        Format::Svg => svg_staircase(&rep.direct, default_extent(&rep.direct), &rep.cabled.name)
            .ok_or_else(|| Failure::usage("SVG staircases need a two-component link")),
    }
}

fn parse_ints(s: &str, what: &str) -> Result<Vec<i64>, Failure> {
    s.split(',')
        .map(|x| x.trim().parse::<i64>().map_err(|_| Failure::usage(format!("cannot parse {what} {s:?}"))))
        .collect()
}

fn cmd_d_invariants(
    cli: &Cli,
    lens: Option<i64>,
    circle_bundle: Option<&str>,
    framing: Option<&str>,
    points: Option<&str>,
) -> Result<String, Failure> {
    no_svg(cli, "d-invariants")?;
    let chosen = [lens.is_some(), circle_bundle.is_some(), framing.is_some()].iter().filter(|&&b| b).count();
    if chosen != 1 {
        return Err(Failure::usage("give exactly one of --lens, --circle-bundle, --framing"));
    }
    if points.is_some() && framing.is_none() {
        return Err(Failure::usage("--points only applies to --framing"));
    }
    // (label, value) rows plus header fields
    let mut rows: Vec<(Value, String)> = Vec::new();
    let mut warnings: Vec<String> = Vec::new();
    let header: Value;
    let title: String;
    if let Some(m) = lens {
        if m < 1 {
            return Err(Failure::usage("--lens needs m >= 1"));
        }
        for k in -(m / 2)..=(m / 2) {
            rows.push((json!(k), format_rational(&lens_d(m, k)?)));
        }
        header = json!({ "kind": "lens", "m": m });
        title = format!("lens space L({m},1)");
    } else if let Some(spec) = circle_bundle {
        let v = spec
            .split_once(':')
            .and_then(|(a, b)| Some((a.trim().parse::<i64>().ok()?, b.trim().parse::<i64>().ok()?)))
            .ok_or_else(|| Failure::usage(format!("cannot parse --circle-bundle {spec:?}: expected m:g")))?;
        let (m, g) = v;
        if m < 1 || g < 0 {
            return Err(Failure::usage("--circle-bundle needs m >= 1 and g >= 0"));
        }
        for k in -(m / 2)..=(m / 2) {
            let (val, w) = circle_bundle_d(m, g, k)?;
            if warnings.is_empty() {
                warnings = w;
            }
            rows.push((json!(k), format_rational(&val)));
        }
        header = json!({ "kind": "circle_bundle", "m": m, "g": g });
        title = format!("circle bundle, Euler number {m}, base genus {g}");
    } else {
        let q = parse_ints(framing.expect("checked"), "--framing")?;
        let (d, w) = load(cli)?;
        warnings = w;
        if q.len() != d.n() {
            return Err(Failure::usage(format!("--framing has {} entries, the link has {}", q.len(), d.n())));
        }
        let vs: Vec<Vec<i64>> = match points {
            Some(p) => p.split(';').map(|v| parse_ints(v, "--points")).collect::<Result<_, _>>()?,
            None => {
                let count: i64 = q.iter().map(|&x| 2 * (x.max(0) / 2) + 1).product();
                if count > 4096 {
                    return Err(Failure::usage("too many Spin^c structures; choose some with --points"));
                }
                let mut all = vec![vec![]];
                for &qi in &q {
                    all = all
                        .into_iter()
                        .flat_map(|p: Vec<i64>| {
                            (-(qi / 2)..=(qi / 2)).map(move |x| {
                                let mut p = p.clone();
                                p.push(x);
                                p
                            })
                        })
                        .collect();
                }
                all
            }
        };
        let t = HTable::build(&d, &options(cli))?;
        for v in vs {
            if v.len() != d.n() {
                return Err(Failure::usage(format!("point {v:?} needs {} entries", d.n())));
            }
            let val = large_surgery_d(&t, &q, &v, cli.force)?;
            rows.push((json!(v), format_rational(&val)));
        }
        title = format!("surgery on {} with framing {q:?}", d.name);
        header = json!({ "kind": "surgery", "link": d.name, "framing": q });
    }
    match cli.format {
        Format::Ascii => {
            let mut s = warn_lines(&warnings);
            s += &format!("{title}\n");
            for (label, val) in &rows {
                s += &format!("  {:<12} {val}\n", label.to_string());
            }
            Ok(s)
        }
        _ => {
            let mut obj = header;
            obj["values"] = Value::Array(rows.into_iter().map(|(l, v)| json!({ "spin_c": l, "d": v })).collect());
            obj["warnings"] = json!(warnings);
            Ok(pretty(&obj))
        }
    }
}

/// Strict check: descriptor rules, then the H-function with the stored
/// signs. When that fails, suggests the sign flips that would repair it.
fn cmd_validate(cli: &Cli) -> Result<String, Failure> {
    no_svg(cli, "validate")?;
    let (d, warnings) = load(cli)?;
    let violations: Vec<String> = linkcat::validate_descriptor(&d).iter().map(|v| v.to_string()).collect();
    let mut issues: Vec<String> = Vec::new();
    let mut hint: Option<String> = None;
    if violations.is_empty() {
        let strict = HFunction::with_stored_signs(&d, cli.force)
            .and_then(|f| HTable::from_function(&d, f, &options(cli)));
        match strict {
            Ok(t) => {
                let rep = t.validate();
                issues = rep.issues.iter().map(|i| i.to_string()).collect();
                if rep.count > rep.issues.len() {
                    issues.push(format!("... {} issue(s) in total", rep.count));
                }
            }
            Err(e) => {
                let f: Failure = e.into();
                if f.code != EXIT_VALIDATION {
                    return Err(f);
                }
                issues.push(f.message);
            }
        }
        if !issues.is_empty() {
            hint = Some(match HFunction::new(&d, cli.force) {
                Ok(f) => {
                    let flips: Vec<String> = f
                        .signs()
                        .iter()
                        .filter(|(_, c)| **c == SignChoice::Flipped)
                        .map(|(b, _)| format!("{{{}}}", b.key()))
                        .collect();
                    if flips.is_empty() {
                        "no sign change repairs the H-function".to_string()
                    } else {
                        format!("negate the polynomial of sublink(s) {}", flips.join(", "))
                    }
                }
                Err(e) => format!("no choice of signs gives a valid H-function ({e})"),
            });
        }
    }
    let valid = violations.is_empty() && issues.is_empty();
    let text = match cli.format {
        Format::Ascii => {
            let mut s = warn_lines(&warnings);
            s += &format!("link: {}\n", d.name);
            for v in &violations {
                s += &format!("violation: {v}\n");
            }
            for i in &issues {
                s += &format!("issue: {i}\n");
            }
            if let Some(h) = &hint {
                s += &format!("hint: {h}\n");
            }
            s += if valid { "valid\n" } else { "invalid\n" };
            s
        }
        _ => pretty(&json!({
            "link": d.name,
            "valid": valid,
            "violations": violations,
            "issues": issues,
            "hint": hint,
            "warnings": warnings,
        })),
    };
    if valid {
        Ok(text)
    } else {
        emit(cli, &text)?;
        Err(Failure::validation(format!("{} is not valid", d.name)))
    }
}

fn cmd_catalog_list(cli: &Cli) -> Result<String, Failure> {
    no_svg(cli, "catalog-list")?;
    match cli.format {
        Format::Ascii => Ok(CATALOG_KEYS
            .iter()
            .map(|(k, p, desc)| {
                let key = if p.is_empty() { k.to_string() } else { format!("{k}:{p}") };
                format!("{key:<34} {desc}\n")
            })
            .collect()),
        _ => Ok(pretty(&Value::Array(
            CATALOG_KEYS
                .iter()
                .map(|(k, p, desc)| json!({ "key": k, "params": p, "description": desc }))
                .collect(),
        ))),
    }
}
