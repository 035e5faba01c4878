//! Command line for the beyond-planar toolkit: drawing generation, crossing
//! parameter checks, transparent colourings, planarisation, product models,
//! bound verification, and reproducible batch runs.
//!
//! Exit codes: 0 all checks passed, 1 a verified inequality failed (a witness
//! file is written), 2 invalid input, 3 a treewidth cap was exceeded. Errors
//! are emitted as JSON objects on stderr; "-" means stdin / stdout.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Parser, Subcommand};
use serde::Deserialize;
use serde_json::json;

use bpk_core::colouring::{
    greedy_transparent, product_transparent, refine_to_cover, validate_cover, StarForestCover,
    TransparentColouring,
};
use bpk_core::drawing::{drawing_profile, matching_planarity_witness, TopologicalDrawing};
use bpk_core::families::{gen_family, FAMILY_NAMES};
use bpk_core::minors::{bfs_spanning_tree, validate_model};
use bpk_core::planarise::{coloured_planarisation, measure_k_lower, verify_walk_lemmas};
use bpk_core::product_structure::{
    check_branch_sets_on_walks, circular_tw_bound, cpl_model, distance_check,
    pipeline_report_with, radius_tw_bound, BoundCheck, BoundReport,
};
use bpk_core::treewidth::{ValidationReport, DEFAULT_TW_CAP};
use bpk_core::{Error, Result};

#[derive(Parser)]
#[command(name = "bpk", version, about = "beyond-planar drawing toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a built-in drawing family as drawing JSON.
    Gen {
        /// crossing_stars | k3n | k2k2n | circular_complete_bipartite |
        /// grid_apex | random_circular | random_segments
        family: String,
        #[arg(long)]
        n: Option<usize>,
        /// First size parameter of k2k2n.
        #[arg(long)]
        k: Option<usize>,
        /// Part sizes of circular_complete_bipartite.
        #[arg(long)]
        a: Option<usize>,
        #[arg(long)]
        b: Option<usize>,
        /// Chord probability of random_circular.
        #[arg(long)]
        p: Option<f64>,
        /// Edge count of random_segments.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output path, - for stdout.
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Measure the crossing parameters of a drawing.
    Check {
        /// Drawing JSON, - for stdin.
        file: String,
        /// Require matching_k <= this bound (exit 1 with a witness otherwise).
        #[arg(long)]
        k: Option<usize>,
        /// Print the full parameter profile.
        #[arg(long)]
        profile: bool,
        /// Write the profile as JSON here.
        #[arg(long)]
        out: Option<String>,
    },
    /// Compute a transparent edge colouring and write the sidecar.
    Colour {
        file: String,
        #[arg(long, default_value = "product")]
        method: String,
        /// Sidecar path; defaults to <file>.colours.json, - for stdout.
        #[arg(long)]
        out: Option<String>,
    },
    /// Planarise under a colouring: emits the planarisation, its contraction,
    /// the vertex mapping, and a DOT rendering with level labels.
    Planarise {
        file: String,
        /// Colouring sidecar produced by `bpk colour`.
        #[arg(long)]
        colours: String,
        /// Output prefix; defaults to the input stem.
        #[arg(long)]
        out: Option<String>,
    },
    /// Build the product minor model and validate it.
    Model {
        file: String,
        #[arg(long)]
        colours: Option<String>,
        #[arg(long, default_value = "product")]
        method: String,
        #[arg(long)]
        out: Option<String>,
    },
    /// Run a verification suite and print one line per check.
    Verify {
        file: String,
        /// walks | cpl | distance | ltw | all
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value = "product")]
        method: String,
        #[arg(long)]
        colours: Option<String>,
        /// Vertex cap for exact treewidth (BPK_CAP_TW overrides the default).
        #[arg(long)]
        cap_tw: Option<usize>,
        /// Write the report as JSON here.
        #[arg(long)]
        out: Option<String>,
    },
    /// Check treewidth bounds; picks the circular form when the drawing
    /// carries a circular order, the spanning-tree form otherwise.
    Bounds {
        file: String,
        #[arg(long)]
        circular: bool,
        #[arg(long)]
        radius: bool,
        #[arg(long, default_value = "product")]
        method: String,
        #[arg(long)]
        colours: Option<String>,
        #[arg(long)]
        cap_tw: Option<usize>,
        #[arg(long)]
        out: Option<String>,
    },
    /// Run a batch manifest and emit a CSV summary (byte-identical reruns).
    Bench {
        manifest: String,
        /// CSV path, - for stdout.
        #[arg(long, default_value = "-")]
        out: String,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse().cmd) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let code = exit_code(&e);
            if code == 1 {
                write_witness(None, "inequality", &json!({ "error": e.to_string() }));
            }
            eprintln!("{}", json!({ "error": e.to_string(), "code": code }));
            ExitCode::from(code)
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::CapExceeded { .. } => 3,
        // a measured quantity beat a proven bound: a failed inequality
        Error::RadiusExceeded { .. } => 1,
        _ => 2,
    }
}

fn run(cmd: Cmd) -> Result<u8> {
    match cmd {
        Cmd::Gen { family, n, k, a, b, p, m, seed, out } => {
            let params = family_params(&family, n, k, a, b, p, m, seed)?;
            let d = gen_family(&family, &params)?;
            write_output(&out, &d.to_json())?;
            Ok(0)
        }
        Cmd::Check { file, k, profile, out } => cmd_check(&file, k, profile, out.as_deref()),
        Cmd::Colour { file, method, out } => cmd_colour(&file, &method, out),
        Cmd::Planarise { file, colours, out } => cmd_planarise(&file, &colours, out),
        Cmd::Model { file, colours, method, out } => {
            let d = load_drawing(&file)?;
            let (tc, cover) = colouring_for(&d, &method, colours.as_deref())?;
            let rep = run_suites(
                &d,
                &tc,
                &cover,
                &["cpl".into()],
                DEFAULT_TW_CAP,
                &instance_name(&file),
            )?;
            print_report(&rep);
            finish_report(&rep, out.as_deref())
        }
        Cmd::Verify { file, suite, method, colours, cap_tw, out } => {
            let d = load_drawing(&file)?;
            let cap = resolve_cap(cap_tw)?;
            let (tc, cover) = colouring_for(&d, &method, colours.as_deref())?;
            let rep = run_suites(&d, &tc, &cover, &[suite], cap, &instance_name(&file))?;
            print_report(&rep);
            let passed = rep.checks.iter().filter(|c| c.pass).count();
            println!("{}: {passed}/{} checks passed", rep.instance, rep.checks.len());
            finish_report(&rep, out.as_deref())
        }
        Cmd::Bounds { file, circular, radius, method, colours, cap_tw, out } => {
            if circular && radius {
                return Err(Error::BadParams("choose one of --circular / --radius".into()));
            }
            let d = load_drawing(&file)?;
            let cap = resolve_cap(cap_tw)?;
            let (tc, _) = colouring_for(&d, &method, colours.as_deref())?;
            let name = instance_name(&file);
            let rep = if circular || (!radius && d.circular_order.is_some()) {
                circular_tw_bound(&d, &tc, cap, &name)?
            } else {
                let tree = bfs_spanning_tree(d.base())?;
                radius_tw_bound(&d, &tc, &tree, cap, &name)?
            };
            print_report(&rep);
            finish_report(&rep, out.as_deref())
        }
        Cmd::Bench { manifest, out } => cmd_bench(&manifest, &out),
    }
}

// ---------------------------------------------------------------------------
// plumbing

fn read_input(path: &str) -> Result<String> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Error::InvalidInput(format!("stdin: {e}")))?;
        Ok(buf)
    } else {
        std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{path}: {e}")))
    }
}

fn write_output(path: &str, content: &str) -> Result<()> {
    let text = if content.ends_with('\n') { content.to_string() } else { format!("{content}\n") };
    if path == "-" {
        print!("{text}");
        Ok(())
    } else {
        std::fs::write(path, text).map_err(|e| Error::InvalidInput(format!("{path}: {e}")))
    }
}

fn load_drawing(path: &str) -> Result<TopologicalDrawing> {
    TopologicalDrawing::from_json(&read_input(path)?)
}

fn instance_name(file: &str) -> String {
    if file == "-" {
        return "stdin".into();
    }
    Path::new(file)
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "drawing".into())
}

fn sanitise(name: &str) -> String {
    name.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect()
}

/// Witnesses land next to --out when given, in the working directory
/// otherwise, and name the failed check so the single check can be replayed.
fn write_witness(anchor: Option<&str>, name: &str, value: &serde_json::Value) {
    let dir = anchor
        .filter(|p| *p != "-")
        .and_then(|p| Path::new(p).parent())
        .filter(|d| !d.as_os_str().is_empty())
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    let path = dir.join(format!("witness_{}.json", sanitise(name)));
    let text = serde_json::to_string_pretty(value).expect("witness serialises");
    if std::fs::write(&path, text + "\n").is_ok() {
        eprintln!("witness written to {}", path.display());
    }
}

fn resolve_cap(flag: Option<usize>) -> Result<usize> {
    if let Some(cap) = flag {
        return Ok(cap);
    }
    match std::env::var("BPK_CAP_TW") {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| Error::BadParams(format!("BPK_CAP_TW: bad integer '{s}'"))),
        Err(_) => Ok(DEFAULT_TW_CAP),
    }
}

fn family_params(
    family: &str,
    n: Option<usize>,
    k: Option<usize>,
    a: Option<usize>,
    b: Option<usize>,
    p: Option<f64>,
    m: Option<usize>,
    seed: u64,
) -> Result<Vec<String>> {
    fn need<T: ToString>(v: Option<T>, flag: &str, family: &str) -> Result<String> {
        v.map(|x| x.to_string())
            .ok_or_else(|| Error::BadParams(format!("{family} needs --{flag}")))
    }
    Ok(match family {
        "crossing_stars" | "k3n" | "grid_apex" => vec![need(n, "n", family)?],
        "k2k2n" => vec![need(k, "k", family)?, need(n, "n", family)?],
        "circular_complete_bipartite" => vec![need(a, "a", family)?, need(b, "b", family)?],
        "random_circular" => vec![need(n, "n", family)?, need(p, "p", family)?, seed.to_string()],
        "random_segments" => vec![need(n, "n", family)?, need(m, "m", family)?, seed.to_string()],
        other => {
            return Err(Error::BadParams(format!(
                "unknown family '{other}'; known: {}",
                FAMILY_NAMES.join(", ")
            )))
        }
    })
}

fn colouring_for(
    d: &TopologicalDrawing,
    method: &str,
    colours: Option<&str>,
) -> Result<(TransparentColouring, StarForestCover)> {
    if let Some(path) = colours {
        let tc = TransparentColouring::from_json(&read_input(path)?)?;
        let cover = refine_to_cover(d.base(), &tc)?;
        return Ok((tc, cover));
    }
    match method {
        "product" => Ok(product_transparent(d)),
        "greedy" => {
            let tc = greedy_transparent(d);
            let cover = refine_to_cover(d.base(), &tc)?;
            Ok((tc, cover))
        }
        other => Err(Error::BadParams(format!("unknown method '{other}' (greedy or product)"))),
    }
}

// ---------------------------------------------------------------------------
// suites

const SUITE_NAMES: &[&str] = &["walks", "cpl", "distance", "ltw", "all"];

fn le_check(name: &str, lhs: usize, rhs: usize) -> BoundCheck {
    BoundCheck { name: name.into(), lhs: lhs.to_string(), rhs: rhs.to_string(), pass: lhs <= rhs }
}

fn push_validation(rep: &mut BoundReport, name: &str, v: &ValidationReport) {
    rep.checks.push(BoundCheck {
        name: name.into(),
        lhs: format!("{} violations", v.violations.len()),
        rhs: "0 violations".into(),
        pass: v.ok,
    });
}

/// ltw (and all) runs the full product pipeline, whose report subsumes the
/// other suites; the cheap suites avoid exact treewidth entirely.
fn run_suites(
    d: &TopologicalDrawing,
    tc: &TransparentColouring,
    cover: &StarForestCover,
    suites: &[String],
    cap: usize,
    instance: &str,
) -> Result<BoundReport> {
    for s in suites {
        if !SUITE_NAMES.contains(&s.as_str()) {
            return Err(Error::BadParams(format!(
                "unknown suite '{s}'; known: {}",
                SUITE_NAMES.join(", ")
            )));
        }
    }
    if suites.iter().any(|s| s == "ltw" || s == "all") {
        return pipeline_report_with(d, tc, cover, cap, instance).map(|(rep, _)| rep);
    }

    let cp = coloured_planarisation(d, tc)?;
    let mut rep =
        BoundReport { instance: instance.into(), params: BTreeMap::new(), checks: Vec::new() };
    rep.params.insert("n".into(), cp.base.n().to_string());
    rep.params.insert("edges".into(), cp.base.m().to_string());
    rep.params.insert("crossings".into(), d.crossing_count().to_string());
    rep.params.insert("c".into(), cp.c.to_string());

    if suites.iter().any(|s| s == "walks") {
        for chk in verify_walk_lemmas(&cp).checks {
            rep.checks.push(BoundCheck {
                name: chk.name.into(),
                lhs: chk.witness.unwrap_or_else(|| "holds".into()),
                rhs: "no counterexample".into(),
                pass: chk.pass,
            });
        }
    }
    if suites.iter().any(|s| s == "cpl") {
        let model = cpl_model(&cp, cover)?;
        rep.params.insert("m".into(), model.m.to_string());
        rep.params.insert("s".into(), model.s.to_string());
        rep.params.insert("t".into(), model.t.to_string());
        push_validation(&mut rep, "cover_valid", &validate_cover(d, tc, cover));
        push_validation(&mut rep, "model_valid", &validate_model(&cp.base, &model.host, &model.mu));
        push_validation(&mut rep, "branch_sets_on_walks", &check_branch_sets_on_walks(&model, &cp));
        rep.checks.push(le_check(
            "t_le_achieved_form",
            model.t,
            1 + model.s * (model.c - 1) * model.m,
        ));
    }
    if suites.iter().any(|s| s == "distance") {
        let k = measure_k_lower(&cp);
        let dist = distance_check(&cp, k);
        rep.params.insert("k".into(), k.to_string());
        rep.params.insert("distance_max".into(), dist.max_observed.to_string());
        rep.params.insert("distance_bound".into(), dist.bound.to_string());
        rep.checks.push(BoundCheck {
            name: "distance_le_h_c".into(),
            lhs: dist.max_observed.to_string(),
            rhs: dist.bound.to_string(),
            pass: dist.pass,
        });
    }
    Ok(rep)
}

fn print_report(rep: &BoundReport) {
    for (key, value) in &rep.params {
        println!("{key} = {value}");
    }
    for c in &rep.checks {
        let verdict = if c.pass { "PASS" } else { "FAIL" };
        println!("{verdict} {} ({} vs {})", c.name, c.lhs, c.rhs);
    }
}

fn finish_report(rep: &BoundReport, out: Option<&str>) -> Result<u8> {
    if let Some(path) = out {
        write_output(path, &rep.to_json())?;
    }
    if rep.all_pass() {
        Ok(0)
    } else {
        let failed = rep.failed();
        write_witness(
            out,
            &format!("{}_checks", rep.instance),
            &serde_json::to_value(&failed).expect("checks serialise"),
        );
        Ok(1)
    }
}

// ---------------------------------------------------------------------------
// commands

fn cmd_check(file: &str, k: Option<usize>, profile: bool, out: Option<&str>) -> Result<u8> {
    let d = load_drawing(file)?;
    let prof = drawing_profile(&d);
    if profile {
        println!("simple {}", prof.simple);
        println!("max_crossings_per_edge {}", prof.max_crossings_per_edge);
        println!("per_pair_max {}", prof.per_pair_max);
        println!("min_k_planar {}", prof.min_k_planar);
        println!("matching_k {}", prof.matching_k);
        println!("cover_k {}", prof.cover_k);
        println!("fan_t {}", prof.fan_t);
    } else {
        println!("matching_k {}", prof.matching_k);
        println!("cover_k {}", prof.cover_k);
    }
    if let Some(path) = out {
        write_output(path, &serde_json::to_string_pretty(&prof).expect("profile serialises"))?;
    }
    if let Some(bound) = k {
        if prof.matching_k > bound {
            let (size, wit) = matching_planarity_witness(&d);
            let value = match wit {
                Some((edge, crossers)) => json!({
                    "edge": edge,
                    "crossing_edges": crossers,
                    "matching_size": size,
                    "bound": bound,
                }),
                None => json!(null),
            };
            write_witness(out, "matching_k", &value);
            eprintln!("matching_k {} exceeds bound {bound}", prof.matching_k);
            return Ok(1);
        }
    }
    Ok(0)
}

fn cmd_colour(file: &str, method: &str, out: Option<String>) -> Result<u8> {
    let d = load_drawing(file)?;
    let (tc, cover) = colouring_for(&d, method, None)?;
    let path = match out {
        Some(p) => p,
        None if file == "-" => {
            return Err(Error::BadParams("--out is required when reading stdin".into()))
        }
        None => Path::new(file).with_extension("colours.json").to_string_lossy().into_owned(),
    };
    // keep stdout clean when the sidecar itself goes there
    if path == "-" {
        eprintln!("c {}", tc.c);
        eprintln!("s {}", cover.s);
    } else {
        println!("c {}", tc.c);
        println!("s {}", cover.s);
    }
    write_output(&path, &tc.to_json())?;
    if path != "-" {
        eprintln!("colouring written to {path}");
    }
    Ok(0)
}

fn cmd_planarise(file: &str, colours: &str, out: Option<String>) -> Result<u8> {
    let d = load_drawing(file)?;
    let tc = TransparentColouring::from_json(&read_input(colours)?)?;
    let cp = coloured_planarisation(&d, &tc)?;
    let prefix = out.unwrap_or_else(|| instance_name(file));
    let paths = [
        format!("{prefix}.gprime.json"),
        format!("{prefix}.gphi.json"),
        format!("{prefix}.map.json"),
        format!("{prefix}.gphi.dot"),
    ];
    write_output(&paths[0], &cp.plan.gprime.to_json())?;
    write_output(&paths[1], &cp.gphi.to_json())?;
    let map = json!({ "psi": cp.psi, "levels": cp.level, "walks": cp.walks });
    write_output(&paths[2], &serde_json::to_string_pretty(&map).expect("map serialises"))?;
    let labels: Vec<String> =
        (0..cp.gphi.n()).map(|v| format!("{v} L{}", cp.level[v])).collect();
    write_output(&paths[3], &cp.gphi.to_dot_labelled(&labels))?;
    println!("gprime n {} m {}", cp.plan.gprime.n(), cp.plan.gprime.m());
    println!("gphi n {} m {}", cp.gphi.n(), cp.gphi.m());
    println!("sections {}", cp.sections.len());
    eprintln!("wrote {}", paths.join(" "));
    Ok(0)
}

// ---------------------------------------------------------------------------
// bench

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestInstance {
    name: String,
    #[serde(default)]
    path: Option<String>,
    #[serde(default)]
    family: Option<String>,
    #[serde(default)]
    params: Vec<String>,
    #[serde(default = "default_suites")]
    suites: Vec<String>,
    #[serde(default = "default_method")]
    method: String,
    #[serde(default)]
    cap_tw: Option<usize>,
    #[serde(default)]
    seed: Option<u64>,
}

fn default_suites() -> Vec<String> {
    vec!["profile".into()]
}

fn default_method() -> String {
    "product".into()
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RunManifest {
    #[serde(default)]
    out_dir: Option<String>,
    #[serde(default)]
    cap_tw: Option<usize>,
    #[serde(default)]
    seed: Option<u64>,
    instances: Vec<ManifestInstance>,
}

fn validate_manifest(man: &RunManifest) -> Result<()> {
    let mut names = BTreeSet::new();
    for inst in &man.instances {
        if inst.name.is_empty() || !names.insert(&inst.name) {
            return Err(Error::InvalidInput(format!("duplicate or empty name '{}'", inst.name)));
        }
        match (&inst.path, &inst.family) {
            (Some(_), None) | (None, Some(_)) => {}
            _ => {
                return Err(Error::InvalidInput(format!(
                    "instance '{}' needs exactly one of path / family",
                    inst.name
                )))
            }
        }
        if let Some(f) = &inst.family {
            if !FAMILY_NAMES.contains(&f.as_str()) {
                return Err(Error::InvalidInput(format!("unknown family '{f}'")));
            }
        }
        if inst.suites.is_empty() {
            return Err(Error::InvalidInput(format!("instance '{}' lists no suites", inst.name)));
        }
        for s in &inst.suites {
            if s != "profile" && !SUITE_NAMES.contains(&s.as_str()) {
                return Err(Error::InvalidInput(format!("unknown suite '{s}'")));
            }
        }
        if inst.method != "greedy" && inst.method != "product" {
            return Err(Error::InvalidInput(format!("unknown method '{}'", inst.method)));
        }
    }
    Ok(())
}

const CSV_COLUMNS: &[&str] = &[
    "name", "seed", "n", "edges", "crossings", "simple", "matching_k", "cover_k", "fan_t", "c",
    "m", "s", "t", "k", "r", "distance_max", "distance_bound", "tw_gphi", "host_layered_width",
    "ltw_width", "checks_passed", "checks_total", "status",
];

struct BenchRow {
    fields: BTreeMap<&'static str, String>,
    severity: u8,
    report: Option<String>,
}

fn csv_cell(s: &str) -> String {
    s.replace([',', '\n', '\r'], ";")
}

fn bench_instance(inst: &ManifestInstance, default_cap: usize, default_seed: Option<u64>) -> BenchRow {
    let mut fields: BTreeMap<&'static str, String> = BTreeMap::new();
    fields.insert("name", inst.name.clone());
    let row = |status: &str, severity: u8, report: Option<String>, fields: BTreeMap<&'static str, String>| {
        let mut f = fields;
        f.insert("status", status.into());
        BenchRow { fields: f, severity, report }
    };

    let seed = inst.seed.or(default_seed).unwrap_or(0);
    let drawing = match (&inst.path, &inst.family) {
        (Some(p), _) => read_input(p).and_then(|s| TopologicalDrawing::from_json(&s)),
        (_, Some(f)) => {
            let params: Vec<String> = inst
                .params
                .iter()
                .map(|p| if p == "$seed" { seed.to_string() } else { p.clone() })
                .collect();
            if f.starts_with("random_") {
                fields.insert("seed", params.get(2).cloned().unwrap_or_default());
            }
            gen_family(f, &params)
        }
        _ => unreachable!("validated"),
    };
    let d = match drawing {
        Ok(d) => d,
        Err(e) => return row(&format!("error: {e}"), exit_code(&e), None, fields),
    };

    let prof = drawing_profile(&d);
    fields.insert("n", d.n().to_string());
    fields.insert("edges", d.m().to_string());
    fields.insert("crossings", d.crossing_count().to_string());
    fields.insert("simple", prof.simple.to_string());
    fields.insert("matching_k", prof.matching_k.to_string());
    fields.insert("cover_k", prof.cover_k.to_string());
    fields.insert("fan_t", prof.fan_t.to_string());

    let suites: Vec<String> = inst.suites.iter().filter(|s| *s != "profile").cloned().collect();
    if suites.is_empty() {
        return row("ok", 0, None, fields);
    }
    let cap = inst.cap_tw.unwrap_or(default_cap);
    let rep = colouring_for(&d, &inst.method, None)
        .and_then(|(tc, cover)| run_suites(&d, &tc, &cover, &suites, cap, &inst.name));
    match rep {
        Ok(rep) => {
            for (from, to) in [
                ("c", "c"),
                ("m", "m"),
                ("s", "s"),
                ("t", "t"),
                ("k", "k"),
                ("r", "r"),
                ("distance_max", "distance_max"),
                ("distance_bound", "distance_bound"),
                ("tw_gphi_exact", "tw_gphi"),
                ("host_layered_width", "host_layered_width"),
                ("ltw_certificate_width", "ltw_width"),
            ] {
                if let Some(v) = rep.params.get(from) {
                    fields.insert(to, v.clone());
                }
            }
            let passed = rep.checks.iter().filter(|c| c.pass).count();
            fields.insert("checks_passed", passed.to_string());
            fields.insert("checks_total", rep.checks.len().to_string());
            let status = if rep.all_pass() { "ok" } else { "fail" };
            row(status, u8::from(!rep.all_pass()), Some(rep.to_json()), fields)
        }
        Err(e) => {
            let code = exit_code(&e);
            let status = if code == 3 { "cap_exceeded".to_string() } else { format!("error: {e}") };
            row(&status, code, None, fields)
        }
    }
}

/// Instances run in parallel (each one single-threaded); rows are emitted in
/// manifest order so reruns are byte-identical.
fn parallel_map<T: Send, F>(count: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T + Sync,
{
    let slots: Vec<Mutex<Option<T>>> = (0..count).map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let workers =
        std::thread::available_parallelism().map(|p| p.get()).unwrap_or(1).min(count.max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= count {
                    break;
                }
                let value = f(i);
                *slots[i].lock().expect("slot lock") = Some(value);
            });
        }
    });
    slots.into_iter().map(|m| m.into_inner().expect("slot lock").expect("slot filled")).collect()
}

fn cmd_bench(manifest_path: &str, out: &str) -> Result<u8> {
    let man: RunManifest = serde_json::from_str(&read_input(manifest_path)?)
        .map_err(|e| Error::InvalidInput(format!("manifest: {e}")))?;
    validate_manifest(&man)?;
    let cap = match man.cap_tw {
        Some(c) => c,
        None => resolve_cap(None)?,
    };

    let rows = parallel_map(man.instances.len(), |i| bench_instance(&man.instances[i], cap, man.seed));

    if let Some(dir) = &man.out_dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::InvalidInput(format!("{dir}: {e}")))?;
        for (inst, bench_row) in man.instances.iter().zip(&rows) {
            if let Some(report) = &bench_row.report {
                let path = Path::new(dir).join(format!("{}.report.json", sanitise(&inst.name)));
                write_output(&path.to_string_lossy(), report)?;
            }
        }
    }

    let mut csv = String::from(CSV_COLUMNS.join(","));
    csv.push('\n');
    for bench_row in &rows {
        let line: Vec<String> = CSV_COLUMNS
            .iter()
            .map(|col| csv_cell(bench_row.fields.get(col).map(String::as_str).unwrap_or("")))
            .collect();
        csv.push_str(&line.join(","));
        csv.push('\n');
    }
    write_output(out, &csv)?;

    Ok(rows.iter().map(|r| r.severity).max().unwrap_or(0))
}
