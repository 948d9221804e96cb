//! `sphandle`: quandle axioms, knot colorings, and the coloring/representation
//! correspondence from the command line.
//!
//! Exit codes: 0 success, 1 a mathematical check failed, 2 usage or input error.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sphandle::correspondence::{audit, build_representation, AuditReport, RepresentationJson};
use sphandle::knot::{builtin, parse_pd, wirtinger, KnotDiagram};
use sphandle::quandle::{check_axioms, FiniteQuandle};
use sphandle::solver::{
    classify, coloring_residual, enumerate_finite, solve_spherical, ColoringClass, SolverConfig, SphericalColoring,
};
use sphandle::spherical::{calibrated_orientation, clark_saito_consistency, h_map_check, inner_rotation_check};
use sphandle::su2::{random_unit_quaternion, TangentVector};
use sphandle::Error;

#[derive(Parser)]
#[command(name = "sphandle", version, about = "Spherical quandle colorings of knots and SU(2) representations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the quandle axioms on a finite Cayley table.
    Axioms(AxiomsArgs),
    /// Compute colorings of a knot by a finite quandle or by S²(r).
    Color(ColorArgs),
    /// Map S²(r)-colorings to SU(2) representations and audit the correspondence.
    Correspond(CorrespondArgs),
    /// Sample the isomorphisms between the spherical presentations.
    Isocheck(IsocheckArgs),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct TableSource {
    /// Cayley table JSON {"n": .., "table": [[..]]}.
    #[arg(long)]
    table: Option<PathBuf>,
    #[arg(long)]
    dihedral: Option<usize>,
    #[arg(long)]
    trivial: Option<usize>,
}

#[derive(Args)]
struct AxiomsArgs {
    #[command(flatten)]
    source: TableSource,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct KnotSource {
    /// Builtin knot: unknot, trefoil, figure8, 5_1, 5_2, 6_1.
    #[arg(long)]
    knot: Option<String>,
    /// PD code, e.g. "[[1,4,2,5],[3,6,4,1],[5,2,6,3]]".
    #[arg(long)]
    pd: Option<String>,
}

#[derive(Args)]
#[group(multiple = false)]
struct Radius {
    /// Radius r in radians, 0 < r < π.
    #[arg(long, allow_negative_numbers = true)]
    r: Option<f64>,
    /// Radius in degrees.
    #[arg(long, allow_negative_numbers = true)]
    r_deg: Option<f64>,
}

impl Radius {
    fn radians(&self) -> Option<f64> {
        self.r.or(self.r_deg.map(f64::to_radians))
    }
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, default_value_t = 64)]
    starts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Acceptance threshold on the crossing residual.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

impl SolverArgs {
    fn config(&self) -> SolverConfig {
        SolverConfig {
            starts: self.starts,
            seed: self.seed,
            tol_accept: self.tol,
            ..SolverConfig::default()
        }
    }
}

#[derive(Args)]
struct ColorArgs {
    #[command(flatten)]
    knot: KnotSource,
    /// dihedralN, trivialN, or a Cayley table file.
    #[arg(long, conflicts_with_all = ["r", "r_deg"])]
    finite: Option<String>,
    #[command(flatten)]
    radius: Radius,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CorrespondArgs {
    #[command(flatten)]
    knot: KnotSource,
    #[command(flatten)]
    radius: Radius,
    /// Colorings written by `color`; solved afresh when absent.
    #[arg(long)]
    from_colorings: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct IsocheckArgs {
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Use the opposite Clark–Saito orientation (debugging aid; should fail).
    #[arg(long)]
    flip_orientation: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure modes mapped to exit codes.
enum Failure {
    /// Exit 2.
    Usage(String),
    /// Exit 1.
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CliResult = Result<(), Failure>;

#[derive(Serialize)]
struct RunManifest {
    command: &'static str,
    knot: Option<Value>,
    parameters: Value,
    config: Option<SolverConfig>,
    version: &'static str,
    seed: Option<u64>,
    timestamp: u64,
}

impl RunManifest {
    fn new(command: &'static str, parameters: Value) -> Self {
        Self {
            command,
            knot: None,
            parameters,
            config: None,
            version: env!("CARGO_PKG_VERSION"),
            seed: None,
            timestamp: timestamp(),
        }
    }
}

/// Seconds since the epoch, pinned by `SOURCE_DATE_EPOCH` when set so that
/// reruns are byte-identical.
fn timestamp() -> u64 {
    std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or_else(|| {
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0)
        })
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn emit(out: Option<&Path>, value: &impl Serialize) -> CliResult {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::Usage(e.to_string()))?;
    text.push('\n');
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_quandle(name: &str) -> Result<FiniteQuandle, Failure> {
    let sized = |prefix: &str| -> Option<Result<usize, Failure>> {
        name.strip_prefix(prefix).map(|n| {
            n.parse()
                .map_err(|_| Failure::Usage(format!("bad quandle size in {name:?}")))
        })
    };
    if let Some(n) = sized("dihedral") {
        return Ok(FiniteQuandle::dihedral(n?)?);
    }
    if let Some(n) = sized("trivial") {
        return Ok(FiniteQuandle::trivial(n?)?);
    }
    let text = read_file(Path::new(name))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{name}: {e}")))
}

fn load_knot(src: &KnotSource) -> Result<(KnotDiagram, Value), Failure> {
    match (&src.knot, &src.pd) {
        (Some(name), _) => Ok((builtin(name)?, json!({ "builtin": name }))),
        (None, Some(pd)) => Ok((parse_pd(pd)?, json!({ "pd": pd }))),
        (None, None) => Err(Failure::Usage("one of --knot or --pd is required".into())),
    }
}

fn knot_label(src: &KnotSource) -> String {
    src.knot.clone().or_else(|| src.pd.clone()).unwrap_or_default()
}

fn check_radius(r: f64) -> Result<f64, Failure> {
    if r > 0.0 && r < PI {
        Ok(r)
    } else {
        Err(Failure::Usage(format!("r = {r} is outside (0, π)")))
    }
}

fn cmd_axioms(args: &AxiomsArgs) -> CliResult {
    let (q, parameters) = match (&args.source.table, args.source.dihedral, args.source.trivial) {
        (Some(path), _, _) => {
            let text = read_file(path)?;
            let q: FiniteQuandle =
                serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            (q, json!({ "table": path.display().to_string() }))
        }
        (_, Some(n), _) => (FiniteQuandle::dihedral(n)?, json!({ "dihedral": n })),
        (_, _, Some(n)) => (FiniteQuandle::trivial(n)?, json!({ "trivial": n })),
        _ => return Err(Failure::Usage("a quandle is required".into())),
    };
    let report = check_axioms(&q);
    emit(
        args.out.as_deref(),
        &json!({
            "manifest": RunManifest::new("axioms", parameters),
            "n": q.len(),
            "report": report,
        }),
    )?;
    if report.all_ok() {
        Ok(())
    } else {
        let witnesses: Vec<String> = report
            .violations
            .iter()
            .map(|v| format!("{:?} at {:?}", v.axiom, v.witness))
            .collect();
        Err(Failure::Check(format!("axioms fail: {}", witnesses.join("; "))))
    }
}

/// One coloring in the results schema.
#[derive(Serialize, Deserialize)]
struct ColoringJson {
    arcs: Vec<TangentVector>,
    residual: f64,
    class: ColoringClass,
}

impl ColoringJson {
    fn from_coloring(c: &SphericalColoring) -> Self {
        Self {
            arcs: c.assignment.clone(),
            residual: c.residual,
            class: classify(c),
        }
    }
}

#[derive(Deserialize)]
struct ColoringsFile {
    r: f64,
    colorings: Vec<ColoringJson>,
}

const CAVEAT: &str = "multi-start search is not a completeness proof; the coloring variety may be positive-dimensional";

fn cmd_color(args: &ColorArgs) -> CliResult {
    let (d, knot_json) = load_knot(&args.knot)?;
    let label = knot_label(&args.knot);

    if let Some(name) = &args.finite {
        let q = load_quandle(name)?;
        let colorings = enumerate_finite(&d, &q)?;
        let mut manifest = RunManifest::new("color", json!({ "finite": name }));
        manifest.knot = Some(knot_json);
        let assignments: Vec<&Vec<usize>> = colorings.iter().map(|c| &c.assignment).collect();
        emit(
            args.out.as_deref(),
            &json!({
                "manifest": manifest,
                "knot": label,
                "quandle": q,
                "colorings": assignments,
                "count": colorings.len(),
            }),
        )?;
        eprintln!("{} colorings of {label} by {name}", colorings.len());
        return Ok(());
    }

    let r = check_radius(
        args.radius
            .radians()
            .ok_or_else(|| Failure::Usage("one of --finite, --r or --r-deg is required".into()))?,
    )?;
    let cfg = args.solver.config();
    let found = solve_spherical(&d, r, &cfg)?;
    let nontrivial = found.iter().filter(|c| classify(c) == ColoringClass::Nontrivial).count();

    let mut manifest = RunManifest::new("color", json!({ "r": r }));
    manifest.knot = Some(knot_json);
    manifest.config = Some(cfg);
    manifest.seed = Some(cfg.seed);
    let colorings: Vec<ColoringJson> = found.iter().map(ColoringJson::from_coloring).collect();
    emit(
        args.out.as_deref(),
        &json!({
            "manifest": manifest,
            "knot": label,
            "r": r,
            "colorings": colorings,
            "orbits": found.len(),
            "caveat": CAVEAT,
        }),
    )?;
    eprintln!(
        "{} orbits of {label} at r = {r}: {} trivial, {nontrivial} nontrivial",
        found.len(),
        found.len() - nontrivial
    );
    eprintln!("note: {CAVEAT}");
    Ok(())
}

#[derive(Serialize)]
struct AuditEntry {
    index: usize,
    class: ColoringClass,
    representation: RepresentationJson,
    report: AuditReport,
    failed: Vec<String>,
}

fn cmd_correspond(args: &CorrespondArgs) -> CliResult {
    let (d, knot_json) = load_knot(&args.knot)?;
    let label = knot_label(&args.knot);
    let p = wirtinger(&d);
    let cfg = args.solver.config();

    let (r, colorings) = match &args.from_colorings {
        Some(path) => {
            let text = read_file(path)?;
            let file: ColoringsFile =
                serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            let r = check_radius(args.radius.radians().unwrap_or(file.r))?;
            let relations = d.crossing_relations();
            let mut colorings = Vec::new();
            for (i, c) in file.colorings.into_iter().enumerate() {
                if c.arcs.len() != d.n_arcs() {
                    return Err(Failure::Usage(format!(
                        "coloring {i} has {} arcs, {label} has {}",
                        c.arcs.len(),
                        d.n_arcs()
                    )));
                }
                let mut coloring = SphericalColoring {
                    radius: r,
                    assignment: c.arcs,
                    residual: 0.0,
                };
                coloring.residual = coloring_residual(&relations, &coloring);
                colorings.push(coloring);
            }
            (r, colorings)
        }
        None => {
            let r = check_radius(
                args.radius
                    .radians()
                    .ok_or_else(|| Failure::Usage("--r or --r-deg is required without --from-colorings".into()))?,
            )?;
            (r, solve_spherical(&d, r, &cfg)?)
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut entries = Vec::new();
    let mut failures = Vec::new();
    for (index, c) in colorings.iter().enumerate() {
        let representation = build_representation(c, &p)?.to_json();
        let rotation = random_unit_quaternion(&mut rng).rotation_matrix();
        let report = audit(c, &p, &rotation)?;
        let failed = report.failed_clauses();
        if !failed.is_empty() {
            failures.push(format!("coloring {index}: {}", failed.join(", ")));
        }
        entries.push(AuditEntry {
            index,
            class: classify(c),
            representation,
            report,
            failed,
        });
    }

    let mut manifest = RunManifest::new(
        "correspond",
        json!({
            "r": r,
            "from_colorings": args.from_colorings.as_ref().map(|p| p.display().to_string()),
        }),
    );
    manifest.knot = Some(knot_json);
    manifest.config = Some(cfg);
    manifest.seed = Some(cfg.seed);
    emit(
        args.out.as_deref(),
        &json!({
            "manifest": manifest,
            "knot": label,
            "r": r,
            "trace": 2.0 * r.cos(),
            "audits": entries,
            "passed": failures.is_empty(),
        }),
    )?;
    if failures.is_empty() {
        eprintln!("{} colorings of {label} at r = {r}: all audit clauses pass", colorings.len());
        Ok(())
    } else {
        Err(Failure::Check(format!("audit failed: {}", failures.join("; "))))
    }
}

fn cmd_isocheck(args: &IsocheckArgs) -> CliResult {
    let samples = args.samples as usize;
    let orientation = if args.flip_orientation {
        calibrated_orientation().flipped()
    } else {
        calibrated_orientation()
    };
    let radii: Vec<f64> = (1..=20).map(|k| PI * k as f64 / 21.0).collect();

    let h = h_map_check(samples, args.seed)?;
    let mut consistency = Vec::new();
    let mut rotations = Vec::new();
    for &r in &radii {
        consistency.push(json!({
            "r": r,
            "residual": clark_saito_consistency(r, orientation, samples, args.seed)?,
        }));
        rotations.push(inner_rotation_check(r, samples.min(1000), args.seed)?);
    }

    let mut failures = Vec::new();
    if h.homomorphism >= 1e-12 || h.exp_identity >= 1e-12 {
        failures.push("h_map".to_owned());
    }
    let worst_consistency = consistency
        .iter()
        .map(|c| c["residual"].as_f64().unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max);
    if worst_consistency >= 1e-10 {
        failures.push(format!("clark_saito ({worst_consistency:.2e})"));
    }
    if !rotations.iter().all(|r| r.passed()) {
        failures.push("inner_rotation".to_owned());
    }

    let mut manifest = RunManifest::new(
        "isocheck",
        json!({ "samples": samples, "flip_orientation": args.flip_orientation }),
    );
    manifest.seed = Some(args.seed);
    emit(
        args.out.as_deref(),
        &json!({
            "manifest": manifest,
            "orientation": orientation,
            "h_map": h,
            "clark_saito": consistency,
            "inner_rotation": rotations,
            "passed": failures.is_empty(),
        }),
    )?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(format!("isocheck failed: {}", failures.join(", "))))
    }
}

fn configure_threads() -> CliResult {
    let Ok(value) = std::env::var("SPHANDLE_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Usage(format!("SPHANDLE_THREADS must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Usage(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| match &cli.command {
        Command::Axioms(args) => cmd_axioms(args),
        Command::Color(args) => cmd_color(args),
        Command::Correspond(args) => cmd_correspond(args),
        Command::Isocheck(args) => cmd_isocheck(args),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
