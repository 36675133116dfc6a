//! Command-line front end: simulate trajectories, evaluate closed-form
//! curve families, run the residual verifier and the structure self-test,
//! and export the figure gallery.
//!
//! Exit codes: 0 success, 2 configuration/parse error, 3 integration
//! failure, 4 domain violation (pole or inadmissible constants),
//! 5 verification defect.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use h3mag::closedform::{self, ClosedFormSpec, FamilyId, Variant};
use h3mag::dynamics::{first_integral, speed_squared, State, SystemKind};
use h3mag::error::H3Error;
use h3mag::geometry::{KillingTag, ModelParams};
use h3mag::integrate::{integrate, IntegratorConfig, Method, Trajectory};
use h3mag::verify::{
    self, compare_with_integration, errata_ledger, ode_residual, structure_selftest, ResidualReport,
};

const SCHEMA_VERSION: u32 = 1;

const EXIT_PARSE: u8 = 2;
const EXIT_INTEGRATION: u8 = 3;
const EXIT_DOMAIN: u8 = 4;
const EXIT_DEFECT: u8 = 5;

#[derive(Parser)]
#[command(
    name = "h3mag",
    version,
    about = "Geodesics and Killing magnetic curves on the 3D Heisenberg group"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Numerically integrate a trajectory and export it.
    Simulate(SimulateArgs),
    /// Evaluate a closed-form curve family on a grid and export it.
    ClosedForm(ClosedFormArgs),
    /// Classify closed-form families against the residual oracle.
    Verify(VerifyArgs),
    /// Run the geometric-structure self-test.
    Selftest(SelftestArgs),
    /// Export the figure datasets at their published constants.
    Gallery(GalleryArgs),
    /// Print the machine-readable defect ledger.
    Errata(ErrataArgs),
}

/// Flags selecting one closed-form family member.
#[derive(Args, Clone)]
struct SpecFlags {
    /// Family tag: GEO_I, GEO_II, TK1_1, TK1_2, TK1_3, TK2, TK3 or TK4.
    #[arg(long)]
    family: Option<String>,
    /// Formula variant.
    #[arg(long, default_value = "corrected")]
    variant: String,
    /// First-integral constant (families GEO_II and TK1_3 only).
    #[arg(long, allow_negative_numbers = true)]
    c: Option<f64>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    c1: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    c2: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    c3: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    c4: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    c5: f64,
    /// Sign branch of the printed TK4 family.
    #[arg(long, default_value_t = 1)]
    branch: i8,
}

impl SpecFlags {
    fn build(&self, lambda: f64) -> Result<ClosedFormSpec, CliError> {
        let name = self
            .family
            .as_deref()
            .ok_or_else(|| CliError::parse("--family is required"))?;
        let family = FamilyId::parse(name)
            .ok_or_else(|| CliError::parse(&format!("unknown family '{name}'")))?;
        let variant = Variant::parse(&self.variant)
            .ok_or_else(|| CliError::parse(&format!("unknown variant '{}'", self.variant)))?;
        let c = match (family.fixed_c(lambda), self.c) {
            (Some(fixed), _) => fixed,
            (None, Some(c)) => c,
            (None, None) => {
                return Err(CliError::parse(&format!(
                    "family {} requires --c",
                    family.label()
                )))
            }
        };
        ClosedFormSpec::new(
            family,
            variant,
            lambda,
            c,
            [self.c1, self.c2, self.c3, self.c4, self.c5],
            self.branch,
        )
        .map_err(CliError::from)
    }
}

#[derive(Args, Clone)]
struct GridFlags {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    t0: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    t1: f64,
    /// Number of output samples (uniform in t).
    #[arg(long, default_value_t = 101)]
    samples: usize,
}

impl GridFlags {
    fn validate(&self) -> Result<(), CliError> {
        if self.samples < 2 {
            return Err(CliError::parse("--samples must be at least 2"));
        }
        if !(self.t0.is_finite() && self.t1.is_finite()) || self.t1 == self.t0 {
            return Err(CliError::parse("--t0 and --t1 must be finite and distinct"));
        }
        Ok(())
    }

    fn times(&self) -> Vec<f64> {
        (0..self.samples)
            .map(|i| self.t0 + (self.t1 - self.t0) * i as f64 / (self.samples - 1) as f64)
            .collect()
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    lambda: f64,
    /// ODE system: geodesic, k1, k2, k3 or k4. Defaults to the system of
    /// --family when one is given.
    #[arg(long)]
    system: Option<String>,
    /// Initial state as x,y,z,vx,vy,vz (alternative to --family).
    #[arg(long, allow_hyphen_values = true)]
    state: Option<String>,
    #[command(flatten)]
    spec: SpecFlags,
    #[command(flatten)]
    grid: GridFlags,
    /// Integration method: embedded45 or rk4.
    #[arg(long, default_value = "embedded45")]
    method: String,
    #[arg(long, default_value_t = IntegratorConfig::DEFAULT_REL_TOL)]
    rtol: f64,
    #[arg(long, default_value_t = IntegratorConfig::DEFAULT_ABS_TOL)]
    atol: f64,
    /// Fixed step size (rk4 method only).
    #[arg(long, default_value_t = 1e-3)]
    step: f64,
    /// Unused entropy hook, accepted for interface uniformity.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: csv or json.
    #[arg(long, default_value = "csv")]
    format: String,
}

#[derive(Args)]
struct ClosedFormArgs {
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    lambda: f64,
    #[command(flatten)]
    spec: SpecFlags,
    #[command(flatten)]
    grid: GridFlags,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: String,
}

#[derive(Args)]
struct VerifyArgs {
    /// Verify every family (default when --family is absent).
    #[arg(long)]
    all: bool,
    /// Restrict to one family tag.
    #[arg(long)]
    family: Option<String>,
    /// Restrict to one variant; both are verified when absent.
    #[arg(long)]
    variant: Option<String>,
    /// Override the reference residual grid.
    #[arg(long, allow_negative_numbers = true)]
    t0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    t1: Option<f64>,
    #[arg(long, default_value_t = 201)]
    samples: usize,
    #[arg(long, default_value_t = verify::DEFAULT_TOL)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SelftestArgs {
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    lambda: f64,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GalleryArgs {
    /// Output directory for the figure datasets.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 201)]
    samples: usize,
}

#[derive(Args)]
struct ErrataArgs {
    #[arg(long, default_value_t = verify::DEFAULT_TOL)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn parse(msg: &str) -> Self {
        Self { code: EXIT_PARSE, message: msg.to_string() }
    }

    fn defect(msg: String) -> Self {
        Self { code: EXIT_DEFECT, message: msg }
    }
}

impl From<H3Error> for CliError {
    fn from(e: H3Error) -> Self {
        let code = match &e {
            H3Error::InvalidParam(_) => EXIT_PARSE,
            H3Error::DomainViolation(_) => EXIT_DOMAIN,
            H3Error::StepUnderflow { .. }
            | H3Error::NonFinite { .. }
            | H3Error::MaxStepsExceeded { .. } => EXIT_INTEGRATION,
        };
        Self { code, message: e.to_string() }
    }
}

fn log_enabled() -> bool {
    std::env::var("H3MAG_LOG").map(|v| !v.is_empty() && v != "0" && v.to_lowercase() != "off").unwrap_or(false)
}

macro_rules! diag {
    ($($arg:tt)*) => {
        if log_enabled() {
            eprintln!("h3mag: {}", format!($($arg)*));
        }
    };
}

/// Render a float with 17 significant digits, locale-independent.
fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Write `content` atomically: to a sibling temp file, then rename over the
/// destination. Never leaves a partial file behind on error.
fn write_atomic(path: &Path, content: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    if let Some(dir) = dir {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError { code: EXIT_PARSE, message: format!("cannot create {}: {e}", dir.display()) })?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    let write = std::fs::write(&tmp, content);
    match write.and_then(|()| std::fs::rename(&tmp, path)) {
        Ok(()) => Ok(()),
        Err(e) => {
            let _ = std::fs::remove_file(&tmp);
            Err(CliError { code: EXIT_PARSE, message: format!("cannot write {}: {e}", path.display()) })
        }
    }
}

fn emit(out: Option<&Path>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => write_atomic(path, content.as_bytes()),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn parse_system(s: &str) -> Result<SystemKind, CliError> {
    match s.to_ascii_lowercase().as_str() {
        "geodesic" => Ok(SystemKind::Geodesic),
        "k1" => Ok(SystemKind::magnetic(KillingTag::K1)),
        "k2" => Ok(SystemKind::magnetic(KillingTag::K2)),
        "k3" => Ok(SystemKind::magnetic(KillingTag::K3)),
        "k4" => Ok(SystemKind::magnetic(KillingTag::K4)),
        other => Err(CliError::parse(&format!(
            "unknown system '{other}' (expected geodesic, k1, k2, k3 or k4)"
        ))),
    }
}

fn parse_state(s: &str) -> Result<State, CliError> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::parse(&format!("bad --state component: {e}")))?;
    if parts.len() != 6 {
        return Err(CliError::parse("--state needs exactly 6 comma-separated values"));
    }
    Ok(State::new(parts[0], parts[1], parts[2], parts[3], parts[4], parts[5]))
}

#[derive(Serialize)]
struct TrajectoryDoc<'a> {
    schema_version: u32,
    #[serde(flatten)]
    trajectory: &'a Trajectory,
}

fn trajectory_csv(tr: &Trajectory) -> String {
    let p = &tr.params;
    let mut out = String::from("t,x,y,z,vx,vy,vz,speed2,first_integral,speed2_drift,fi_drift\n");
    let first = &tr.samples[0].1;
    let speed0 = speed_squared(p, first);
    let fi0 = first_integral(p, &tr.system, first).expect("CLI systems carry a first integral");
    for (t, s) in &tr.samples {
        let sp = speed_squared(p, s);
        let fi = first_integral(p, &tr.system, s).expect("CLI systems carry a first integral");
        let row = [*t, s.x, s.y, s.z, s.vx, s.vy, s.vz, sp, fi, (sp - speed0).abs(), (fi - fi0).abs()];
        let cells: Vec<String> = row.iter().map(|v| fmt_f64(*v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn curve_csv(rows: &[(f64, [f64; 3])]) -> String {
    let mut out = String::from("t,x,y,z\n");
    for (t, p) in rows {
        out.push_str(&format!("{},{},{},{}\n", fmt_f64(*t), fmt_f64(p[0]), fmt_f64(p[1]), fmt_f64(p[2])));
    }
    out
}

fn json_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serialization cannot fail");
    s.push('\n');
    s
}

fn cmd_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    args.grid.validate()?;
    let p = ModelParams::new(args.lambda)?;

    let (system, s0) = match (&args.state, &args.spec.family) {
        (Some(state), None) => {
            let sys = parse_system(
                args.system
                    .as_deref()
                    .ok_or_else(|| CliError::parse("--system is required with --state"))?,
            )?;
            (sys, parse_state(state)?)
        }
        (None, Some(_)) => {
            let spec = args.spec.build(args.lambda)?;
            let sys = match &args.system {
                Some(s) => parse_system(s)?,
                None => spec.family.system(),
            };
            (sys, closedform::to_initial_state(&spec, args.grid.t0)?)
        }
        (Some(_), Some(_)) => {
            return Err(CliError::parse("--state and --family are mutually exclusive"))
        }
        (None, None) => {
            return Err(CliError::parse("one of --state or --family is required"))
        }
    };

    let method = match args.method.to_ascii_lowercase().as_str() {
        "embedded45" | "dp45" => Method::Embedded45 { rel_tol: args.rtol, abs_tol: args.atol },
        "rk4" | "fixed-rk4" => Method::FixedRk4 { step: args.step },
        other => return Err(CliError::parse(&format!("unknown method '{other}'"))),
    };
    let cfg = IntegratorConfig {
        method,
        t_start: args.grid.t0,
        t_end: args.grid.t1,
        max_steps: 10_000_000,
        sample_every: (args.grid.t1 - args.grid.t0).abs() / (args.grid.samples - 1) as f64,
    };
    cfg.validate()?;

    diag!("integrating {} from t={} to t={}", system.label(), args.grid.t0, args.grid.t1);
    let tr = integrate(&p, &system, &s0, &cfg)?;
    diag!(
        "{} steps ({} rejected), speed^2 drift {:.3e}",
        tr.diagnostics.steps,
        tr.diagnostics.rejected_steps,
        tr.diagnostics.max_speed2_drift
    );

    let content = match args.format.to_ascii_lowercase().as_str() {
        "csv" => trajectory_csv(&tr),
        "json" => json_pretty(&TrajectoryDoc { schema_version: SCHEMA_VERSION, trajectory: &tr }),
        other => return Err(CliError::parse(&format!("unknown format '{other}'"))),
    };
    emit(args.out.as_deref(), &content)
}

fn cmd_closed_form(args: &ClosedFormArgs) -> Result<(), CliError> {
    args.grid.validate()?;
    let spec = args.spec.build(args.lambda)?;
    let mut rows = Vec::with_capacity(args.grid.samples);
    for t in args.grid.times() {
        let p = closedform::eval(&spec, t)?;
        rows.push((t, p.as_array()));
    }
    let content = match args.format.to_ascii_lowercase().as_str() {
        "csv" => curve_csv(&rows),
        "json" => {
            #[derive(Serialize)]
            struct CurveDoc {
                schema_version: u32,
                family: FamilyId,
                variant: Variant,
                rows: Vec<(f64, [f64; 3])>,
            }
            json_pretty(&CurveDoc {
                schema_version: SCHEMA_VERSION,
                family: spec.family,
                variant: spec.variant,
                rows,
            })
        }
        other => return Err(CliError::parse(&format!("unknown format '{other}'"))),
    };
    emit(args.out.as_deref(), &content)
}

fn verify_one(
    spec: &ClosedFormSpec,
    grid: (f64, f64, usize),
    tol: f64,
) -> Result<(ResidualReport, f64), CliError> {
    let report = ode_residual(spec, grid, tol)?;
    let cfg = IntegratorConfig::embedded(grid.0, grid.1, (grid.1 - grid.0) / 10.0);
    let deviation = compare_with_integration(spec, (grid.0, grid.1), &cfg)?;
    Ok((report, deviation))
}

fn cmd_verify(args: &VerifyArgs) -> Result<(), CliError> {
    let families: Vec<FamilyId> = match (&args.family, args.all) {
        (Some(name), _) => vec![FamilyId::parse(name)
            .ok_or_else(|| CliError::parse(&format!("unknown family '{name}'")))?],
        (None, _) => FamilyId::ALL.to_vec(),
    };
    let variants: Vec<Variant> = match &args.variant {
        Some(v) => vec![Variant::parse(v)
            .ok_or_else(|| CliError::parse(&format!("unknown variant '{v}'")))?],
        None => vec![Variant::Printed, Variant::Corrected],
    };

    #[derive(Serialize)]
    struct VerifyDoc {
        schema_version: u32,
        tol: f64,
        reports: Vec<VerifyRow>,
    }
    #[derive(Serialize)]
    struct VerifyRow {
        #[serde(flatten)]
        report: ResidualReport,
        integration_deviation: f64,
    }

    let mut rows = Vec::new();
    let mut corrected_defect = false;
    println!(
        "{:<8} {:<10} {:<6} {:>13} {:>13} {:>13}",
        "family", "variant", "class", "worst_resid", "fi_drift", "int_dev"
    );
    for fam in &families {
        for var in &variants {
            let spec = verify::reference_spec(*fam, *var);
            let mut grid = verify::reference_grid(*fam, *var);
            if let (Some(t0), Some(t1)) = (args.t0, args.t1) {
                grid = (t0, t1, args.samples);
            }
            let (report, deviation) = verify_one(&spec, grid, args.tol)?;
            let worst = report.max_residual.iter().cloned().fold(0.0f64, f64::max);
            println!(
                "{:<8} {:<10} {:<6} {:>13.3e} {:>13.3e} {:>13.3e}",
                fam.label(),
                var.label(),
                if report.passed() { "PASS" } else { "FAIL" },
                worst,
                report.first_integral_drift,
                deviation
            );
            if *var == Variant::Corrected && !report.passed() {
                corrected_defect = true;
            }
            rows.push(VerifyRow { report, integration_deviation: deviation });
        }
    }

    if let Some(out) = &args.out {
        write_atomic(
            out,
            json_pretty(&VerifyDoc { schema_version: SCHEMA_VERSION, tol: args.tol, reports: rows })
                .as_bytes(),
        )?;
    }

    if corrected_defect {
        return Err(CliError::defect(
            "a corrected variant failed verification (implementation defect)".to_string(),
        ));
    }
    Ok(())
}

fn cmd_selftest(args: &SelftestArgs) -> Result<(), CliError> {
    if args.samples < 1 {
        return Err(CliError::parse("--samples must be at least 1"));
    }
    let p = ModelParams::new(args.lambda)?;
    let report = structure_selftest(&p, args.samples, args.seed);
    let content = json_pretty(&report);
    emit(args.out.as_deref(), &content)?;
    diag!("core defect {:.3e} at lambda {}", report.max_core_defect(), args.lambda);
    if !report.passes(args.tol) {
        return Err(CliError::defect(format!(
            "structure self-test defect {:.3e} exceeds tolerance {:.1e}",
            report.max_core_defect(),
            args.tol
        )));
    }
    Ok(())
}

/// The figure datasets: published constants, corrected variants, labelled
/// by assertion number where one caption covers two subfigures.
fn gallery_entries() -> Vec<(&'static str, ClosedFormSpec, (f64, f64), Option<&'static str>)> {
    let sqrt2 = std::f64::consts::SQRT_2;
    let mk = |family, c, consts| {
        ClosedFormSpec::new(family, Variant::Corrected, 1.0, c, consts, 1)
            .expect("gallery constants are admissible")
    };
    vec![
        ("tk1_assertion1", mk(FamilyId::Tk1A, 1.0, [1.0, 1.0, 1.0, 0.0, 0.0]), (-2.0, 2.0), None),
        ("tk1_assertion2", mk(FamilyId::Tk1B, -1.0, [1.0, 1.0, 0.0, 0.0, 0.0]), (-2.0, 2.0), None),
        ("tk1_assertion3", mk(FamilyId::Tk1C, sqrt2, [1.0, 1.0, 1.0, 0.0, 0.0]), (-2.0, 2.0), None),
        ("tk2", mk(FamilyId::Tk2, 0.0, [2.0, 1.0, 0.0, 0.0, 0.0]), (0.0, 6.0), None),
        ("tk3", mk(FamilyId::Tk3, 0.0, [1.0, 1.0, 1.0, 1.0, 0.0]), (-2.0, 2.0), None),
        (
            "tk4",
            mk(FamilyId::Tk4, 0.0, [1.0, 0.0, 0.0, 0.0, 0.0]),
            (0.0, 6.0),
            Some(
                "published constants c1 = c2 = 0 are inadmissible for the corrected family \
                 (zero amplitude; the printed form's pole sits at t = 0); exported with unit amplitude instead",
            ),
        ),
    ]
}

fn cmd_gallery(args: &GalleryArgs) -> Result<(), CliError> {
    if args.samples < 2 {
        return Err(CliError::parse("--samples must be at least 2"));
    }
    for (name, spec, (t0, t1), flag) in gallery_entries() {
        if let Some(note) = flag {
            eprintln!("h3mag: gallery {name}: {note}");
        }
        let mut rows = Vec::with_capacity(args.samples);
        for i in 0..args.samples {
            let t = t0 + (t1 - t0) * i as f64 / (args.samples - 1) as f64;
            let p = closedform::eval(&spec, t)?;
            rows.push((t, p.as_array()));
        }
        let path = args.out.join(format!("{name}.csv"));
        write_atomic(&path, curve_csv(&rows).as_bytes())?;
        diag!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_errata(args: &ErrataArgs) -> Result<(), CliError> {
    #[derive(Serialize)]
    struct LedgerDoc {
        schema_version: u32,
        tol: f64,
        entries: Vec<h3mag::verify::ErrataEntry>,
    }
    let entries = errata_ledger(args.tol)?;
    let content = json_pretty(&LedgerDoc { schema_version: SCHEMA_VERSION, tol: args.tol, entries });
    emit(args.out.as_deref(), &content)
}

fn run() -> Result<(), CliError> {
    let cli = Cli::parse();
    match &cli.cmd {
        Cmd::Simulate(a) => cmd_simulate(a),
        Cmd::ClosedForm(a) => cmd_closed_form(a),
        Cmd::Verify(a) => cmd_verify(a),
        Cmd::Selftest(a) => cmd_selftest(a),
        Cmd::Gallery(a) => cmd_gallery(a),
        Cmd::Errata(a) => cmd_errata(a),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("h3mag: error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
