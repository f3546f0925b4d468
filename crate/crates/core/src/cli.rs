//! Command-line surface. Every command writes one JSON report to standard
//! output and diagnostics to standard error.
//!
//! Exit codes: `0` success, `1` counterexample under `--assert`, `2` input
//! errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use num::{BigInt, BigRational, Zero};
use serde::{Deserialize, Serialize};

use crate::bounds::{holder_exponent, holder_exponent_for, naive_exponent_for, verify_global_bound, verify_local_bound, BoundReport, BoundSettings};
use crate::diagnostics::{
    coercivity_probe, injectivity_set_probe, jacobian_degeneracy_scan, karamardian_coercivity_probe, p_function_probe, r0_test,
    r0_test_componentwise, shifted_r0_check, xref_boundedness_probe, PairDomain, ProbeReport,
};
use crate::enumerate::{certify_solution, enumerate_solutions, Certification, SolveConfig};
use crate::error::{PcpError, Result};
use crate::genericity::{affine_lemke_agreement, genericity_trial_with, random_instance, write_trial_csv, TrialDegrees, TrialSettings};
use crate::homotopy::{track_leading_homotopy, track_natural_homotopy};
use crate::index_set::IndexSet;
use crate::instance::PcpInstance;
use crate::io::{parse_instance, serialize_instance, Metadata, ReportDocument};
use crate::lemke::lemke_lcp;
use crate::residuals::{min_phi, natural_map, norm, r_residual};
use crate::sampling::Region;

pub const EXIT_OK: i32 = 0;
pub const EXIT_COUNTEREXAMPLE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "pcp", version, about = "Polynomial complementarity problem solver and analysis toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
struct SolveArgs {
    /// Master seed for all randomness.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Newton / certification tolerance on ‖m(x)‖.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Newton starts per index-set subsystem.
    #[arg(long, default_value_t = 200)]
    starts: usize,
    /// Half-width of the start box.
    #[arg(long = "box", default_value_t = 10.0)]
    #[serde(rename = "box")]
    box_radius: f64,
}

impl SolveArgs {
    fn config(&self) -> SolveConfig {
        SolveConfig {
            newton_tol: self.tol,
            starts_per_subsystem: self.starts,
            start_box_radius: self.box_radius,
            rng_seed: self.seed,
            ..SolveConfig::default()
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum HomotopyKind {
    Natural,
    Leading,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ProbeKind {
    R0,
    R0Componentwise,
    Coercivity,
    Xref,
    Karamardian,
    Degeneracy,
    PFunction,
    Injectivity,
    ShiftedR0,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Domain {
    Feasible,
    Region,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum BoundMode {
    Local,
    Global,
}

#[derive(Args, Debug, Clone, Serialize)]
struct ResidualArgs {
    file: PathBuf,
    /// Evaluation point, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
    x: Vec<f64>,
}

#[derive(Args, Debug, Clone, Serialize)]
struct CertifyArgs {
    file: PathBuf,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
    x: Vec<f64>,
    #[command(flatten)]
    solve: SolveArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
struct FileSolveArgs {
    file: PathBuf,
    #[command(flatten)]
    solve: SolveArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
struct HomotopyArgs {
    file: PathBuf,
    #[arg(long, value_enum, default_value_t = HomotopyKind::Natural)]
    kind: HomotopyKind,
    /// Start point of the natural homotopy (default: origin).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    xref: Vec<f64>,
    #[command(flatten)]
    solve: SolveArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
struct ProbeArgs {
    file: PathBuf,
    #[arg(long, value_enum)]
    kind: ProbeKind,
    /// Samples (per radius for coercivity, pairs for p-function).
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Refinement iterations of sphere minimizers.
    #[arg(long, default_value_t = 100)]
    refine: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 10.0, 100.0, 1000.0])]
    radii: Vec<f64>,
    /// Sphere or ball radius for the x_ref and injectivity probes.
    #[arg(long, default_value_t = 10.0)]
    radius: f64,
    /// Sampling box as `lo,hi` (cube) or `lo_1..lo_n,hi_1..hi_n`.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    region: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    xref: Vec<f64>,
    /// Constant of the Karamardian-type coercivity inequality.
    #[arg(long, default_value_t = 1.0)]
    constant: f64,
    #[arg(long, value_enum, default_value_t = Domain::Feasible)]
    domain: Domain,
    /// Probe the leading pair in the x_ref test.
    #[arg(long)]
    use_leading: bool,
    /// Probe g instead of f in the injectivity test.
    #[arg(long)]
    use_g: bool,
    /// Exit with status 1 on a counterexample.
    #[arg(long)]
    assert: bool,
    #[command(flatten)]
    solve: SolveArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
struct BoundsArgs {
    file: PathBuf,
    #[arg(long, value_enum, default_value_t = BoundMode::Local)]
    mode: BoundMode,
    /// Exponent as an integer, `p/q`, a decimal, or `holder`.
    #[arg(long, default_value = "1")]
    alpha: String,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    /// Sampling box for the local check (default: the start box).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    region: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 10.0, 100.0])]
    radii: Vec<f64>,
    /// Extra probe points, `x1,x2;y1,y2;...`.
    #[arg(long, allow_hyphen_values = true)]
    extra: Option<String>,
    /// Constant whose violations are listed.
    #[arg(long)]
    claimed_c: Option<f64>,
    /// Omit the shells of points around each solution.
    #[arg(long)]
    no_shells: bool,
    /// Write the (dist, residual) pairs to this CSV file.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Exit with status 1 when the claimed constant is violated or c_best is 0.
    #[arg(long)]
    assert: bool,
    #[command(flatten)]
    solve: SolveArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
struct ExponentArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    n: u32,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    d: u32,
}

#[derive(Args, Debug, Clone, Serialize)]
struct GenerateArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=24))]
    n: u64,
    /// Degree of every component of f.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
    df: u32,
    /// Degree of every component of g.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
    dg: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
struct TrialArgs {
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..=24))]
    n: u64,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
    df: u32,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
    dg: u32,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    /// Samples of the global bound check per trial.
    #[arg(long, default_value_t = 2000)]
    samples: usize,
    /// Write per-trial rows to this CSV file.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[command(flatten)]
    solve: SolveArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
struct LemkeArgs {
    /// LCP file `{"m": [[...]], "q": [...]}`; omit with `--agreement`.
    file: Option<PathBuf>,
    /// Compare Lemke with enumeration on random `PCP(Id, Mx + q)` instances.
    #[arg(long)]
    agreement: bool,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..=24))]
    n: u64,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[command(flatten)]
    solve: SolveArgs,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Enumerate the solution set.
    Solve(FileSolveArgs),
    /// Natural map, Φ_I minimum and r(x) at a point.
    Residual(ResidualArgs),
    /// Certify a candidate solution.
    Certify(CertifyArgs),
    /// Track a natural or leading-pair homotopy.
    Homotopy(HomotopyArgs),
    /// Run a hypothesis probe.
    Probe(ProbeArgs),
    /// Check a local or global error bound.
    Bounds(BoundsArgs),
    /// Exponents R(3n-1, d+1) and R(3n, 2d+1).
    Exponent(ExponentArgs),
    /// Print a random instance document (not wrapped in a report).
    Generate(GenerateArgs),
    /// Monte Carlo over random instances.
    Trial(TrialArgs),
    /// Lemke's method on an LCP.
    Lemke(LemkeArgs),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LcpDocument {
    m: Vec<Vec<f64>>,
    q: Vec<f64>,
}

struct Outcome {
    report: String,
    counterexample: bool,
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| PcpError::InvalidInput(format!("cannot read {}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<PcpInstance> {
    parse_instance(&read_file(path)?)
}

fn render<C: Serialize, P: Serialize>(command: &str, config: C, payload: P) -> Result<String> {
    ReportDocument::new(command, config, payload).render()
}

fn region_from(values: &[f64], n: usize, fallback: f64) -> Result<Region> {
    match values.len() {
        0 => Region::cube(n, -fallback, fallback),
        2 => Region::cube(n, values[0], values[1]),
        k if k == 2 * n => Region::new(values[..n].to_vec(), values[n..].to_vec()),
        k => Err(PcpError::InvalidInput(format!("--region needs 2 or {} values, got {k}", 2 * n))),
    }
}

/// Parses `7`, `3/2` or `0.25` exactly.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let t = text.trim();
    let bad = || PcpError::InvalidInput(format!("not a rational number: {text:?}"));
    if let Some((a, b)) = t.split_once('/') {
        let a: BigInt = a.trim().parse().map_err(|_| bad())?;
        let b: BigInt = b.trim().parse().map_err(|_| bad())?;
        if b.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(a, b));
    }
    if let Some((int, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
        let den = num::pow(BigInt::from(10), frac.len());
        return Ok(BigRational::new(digits, den));
    }
    Ok(BigRational::from_integer(t.parse().map_err(|_| bad())?))
}

fn parse_points(text: &str, n: usize) -> Result<Vec<Vec<f64>>> {
    text.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|p| {
            let v: Vec<f64> = p
                .split(',')
                .map(|c| c.trim().parse::<f64>().map_err(|_| PcpError::InvalidInput(format!("bad coordinate {c:?}"))))
                .collect::<Result<_>>()?;
            if v.len() != n {
                return Err(PcpError::DimensionMismatch { expected: n, got: v.len() });
            }
            Ok(v)
        })
        .collect()
}

fn cmd_solve(a: &FileSolveArgs) -> Result<Outcome> {
    let inst = load_instance(&a.file)?;
    let sols = enumerate_solutions(&inst, &a.solve.config())?;
    Ok(Outcome {
        report: render("solve", a, sols)?,
        counterexample: false,
    })
}

#[derive(Serialize)]
struct ResidualPayload {
    x: Vec<f64>,
    natural_map: Vec<f64>,
    natural_norm: f64,
    min_phi: f64,
    argmin_set: IndexSet,
    r_residual: f64,
}

fn cmd_residual(a: &ResidualArgs) -> Result<Outcome> {
    let inst = load_instance(&a.file)?;
    let m = natural_map(&inst, &a.x)?;
    let (phi, set) = min_phi(&inst, &a.x)?;
    let payload = ResidualPayload {
        x: a.x.clone(),
        natural_norm: norm(&m),
        natural_map: m,
        min_phi: phi,
        argmin_set: set,
        r_residual: r_residual(&inst, &a.x)?,
    };
    Ok(Outcome {
        report: render("residual", a, payload)?,
        counterexample: false,
    })
}

#[derive(Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
enum CertifyPayload {
    Accepted(crate::enumerate::SolutionCertificate),
    Rejected { residual_norm: f64 },
}

fn cmd_certify(a: &CertifyArgs) -> Result<Outcome> {
    let inst = load_instance(&a.file)?;
    let payload = match certify_solution(&inst, &a.x, &a.solve.config())? {
        Certification::Accepted(c) => CertifyPayload::Accepted(c),
        Certification::Rejected { residual_norm } => CertifyPayload::Rejected { residual_norm },
    };
    Ok(Outcome {
        report: render("certify", a, payload)?,
        counterexample: false,
    })
}

fn cmd_homotopy(a: &HomotopyArgs) -> Result<Outcome> {
    let inst = load_instance(&a.file)?;
    let cfg = a.solve.config();
    let trace = match a.kind {
        HomotopyKind::Natural => {
            let x_ref = if a.xref.is_empty() { vec![0.0; inst.n()] } else { a.xref.clone() };
            track_natural_homotopy(&inst, &x_ref, &cfg)?
        }
        HomotopyKind::Leading => track_leading_homotopy(&inst, &cfg)?,
    };
    Ok(Outcome {
        report: render("homotopy", a, trace)?,
        counterexample: false,
    })
}

fn run_probe(a: &ProbeArgs, inst: &PcpInstance) -> Result<ProbeReport> {
    let seed = a.solve.seed;
    let cfg = a.solve.config();
    match a.kind {
        ProbeKind::R0 => r0_test(inst, a.samples, a.refine, seed),
        ProbeKind::R0Componentwise => r0_test_componentwise(inst, a.samples, a.refine, seed),
        ProbeKind::Coercivity => coercivity_probe(inst, &a.radii, a.samples, a.refine, seed),
        ProbeKind::Xref => {
            let x_ref = if a.xref.is_empty() { vec![0.0; inst.n()] } else { a.xref.clone() };
            xref_boundedness_probe(inst, &x_ref, a.radius, a.samples, a.use_leading, seed)
        }
        ProbeKind::Karamardian => karamardian_coercivity_probe(inst, a.constant, a.samples, seed),
        ProbeKind::Degeneracy => jacobian_degeneracy_scan(inst, &enumerate_solutions(inst, &cfg)?),
        ProbeKind::PFunction => {
            let region = region_from(&a.region, inst.n(), cfg.start_box_radius)?;
            let domain = match a.domain {
                Domain::Feasible => PairDomain::Feasible,
                Domain::Region => PairDomain::Region,
            };
            let sols = enumerate_solutions(inst, &cfg)?;
            p_function_probe(inst, &region, a.samples, domain, Some(&sols), seed)
        }
        ProbeKind::Injectivity => injectivity_set_probe(inst, a.radius, a.samples, a.use_g, seed),
        ProbeKind::ShiftedR0 => shifted_r0_check(inst, a.samples, a.refine, &cfg, seed),
    }
}

fn cmd_probe(a: &ProbeArgs) -> Result<Outcome> {
    let inst = load_instance(&a.file)?;
    let rep = run_probe(a, &inst)?;
    Ok(Outcome {
        counterexample: a.assert && !rep.passed(),
        report: render("probe", a, rep)?,
    })
}

fn write_pairs_csv(path: &Path, rep: &BoundReport) -> Result<()> {
    let io_err = |e: csv::Error| PcpError::InvalidInput(format!("cannot write {}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io_err)?;
    w.write_record(["dist", "residual"]).map_err(io_err)?;
    for s in &rep.pairs {
        w.write_record([s.dist.to_string(), s.residual.to_string()]).map_err(io_err)?;
    }
    w.flush().map_err(|e| PcpError::InvalidInput(format!("cannot write {}: {e}", path.display())))
}

fn cmd_bounds(a: &BoundsArgs) -> Result<Outcome> {
    let inst = load_instance(&a.file)?;
    let cfg = a.solve.config();
    let alpha = if a.alpha.trim() == "holder" {
        let h = holder_exponent(&inst);
        let v = match a.mode {
            BoundMode::Local => h.alpha,
            BoundMode::Global => h.global_alpha,
        };
        BigRational::from_integer(BigInt::from(v))
    } else {
        parse_rational(&a.alpha)?
    };
    let mut settings = BoundSettings::new(a.samples, alpha, a.solve.seed);
    settings.claimed_c = a.claimed_c;
    settings.near_solution_shells = !a.no_shells;
    if let Some(extra) = &a.extra {
        settings.extra_points = parse_points(extra, inst.n())?;
    }
    let sols = enumerate_solutions(&inst, &cfg)?;
    let rep = match a.mode {
        BoundMode::Local => verify_local_bound(&inst, &sols, &region_from(&a.region, inst.n(), cfg.start_box_radius)?, &settings)?,
        BoundMode::Global => verify_global_bound(&inst, &sols, &a.radii, &settings)?,
    };
    if let Some(path) = &a.csv {
        write_pairs_csv(path, &rep)?;
    }
    Ok(Outcome {
        counterexample: a.assert && (!rep.violations.is_empty() || !(rep.c_best > 0.0)),
        report: render("bounds", a, rep)?,
    })
}

#[derive(Serialize)]
struct ExponentPayload {
    r_n_d: String,
    holder: String,
    global_alpha: String,
    affine_branch: bool,
    naive: String,
}

fn cmd_exponent(a: &ExponentArgs) -> Result<Outcome> {
    let h = holder_exponent_for(a.n, a.d);
    let payload = ExponentPayload {
        r_n_d: crate::bounds::exponent_r(a.n, a.d).to_string(),
        holder: h.alpha.to_string(),
        global_alpha: h.global_alpha.to_string(),
        affine_branch: h.affine_branch,
        naive: naive_exponent_for(a.n, a.d).to_string(),
    };
    Ok(Outcome {
        report: render("exponent", a, payload)?,
        counterexample: false,
    })
}

fn cmd_generate(a: &GenerateArgs) -> Result<Outcome> {
    let n = a.n as usize;
    let inst = random_instance(n, &vec![a.df; n], &vec![a.dg; n], a.seed)?;
    let meta = Metadata {
        name: Some(format!("random n={} df={} dg={} seed={}", a.n, a.df, a.dg, a.seed)),
        source: Some("pcp generate".into()),
    };
    Ok(Outcome {
        report: serialize_instance(&inst, Some(meta)),
        counterexample: false,
    })
}

fn cmd_trial(a: &TrialArgs) -> Result<Outcome> {
    let settings = TrialSettings {
        bound_samples: a.samples,
        ..TrialSettings::default()
    };
    let deg = TrialDegrees { f: a.df, g: a.dg };
    let summary = genericity_trial_with(a.n as usize, deg, a.trials, a.solve.seed, &a.solve.config(), &settings)?;
    if let Some(path) = &a.csv {
        let file = std::fs::File::create(path).map_err(|e| PcpError::InvalidInput(format!("cannot write {}: {e}", path.display())))?;
        write_trial_csv(&summary, file)?;
    }
    Ok(Outcome {
        report: render("trial", a, summary)?,
        counterexample: false,
    })
}

fn cmd_lemke(a: &LemkeArgs) -> Result<Outcome> {
    if a.agreement {
        let rep = affine_lemke_agreement(a.n as usize, a.trials, a.solve.seed, 1e-6, &a.solve.config())?;
        return Ok(Outcome {
            report: render("lemke", a, rep)?,
            counterexample: false,
        });
    }
    let Some(path) = &a.file else {
        return Err(PcpError::InvalidInput("lemke needs an LCP file or --agreement".into()));
    };
    let text = read_file(path)?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    let doc: LcpDocument = serde_path_to_error::deserialize(de).map_err(|e| PcpError::Parse {
        path: e.path().to_string(),
        message: e.into_inner().to_string(),
    })?;
    let n = doc.q.len();
    if doc.m.len() != n || doc.m.iter().any(|r| r.len() != n) {
        return Err(PcpError::Parse {
            path: "m".into(),
            message: format!("expected a {n}x{n} matrix"),
        });
    }
    let m = DMatrix::from_fn(n, n, |i, j| doc.m[i][j]);
    let outcome = lemke_lcp(&m, &doc.q)?;
    Ok(Outcome {
        report: render("lemke", a, outcome)?,
        counterexample: false,
    })
}

fn dispatch(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Solve(a) => cmd_solve(a),
        Command::Residual(a) => cmd_residual(a),
        Command::Certify(a) => cmd_certify(a),
        Command::Homotopy(a) => cmd_homotopy(a),
        Command::Probe(a) => cmd_probe(a),
        Command::Bounds(a) => cmd_bounds(a),
        Command::Exponent(a) => cmd_exponent(a),
        Command::Generate(a) => cmd_generate(a),
        Command::Trial(a) => cmd_trial(a),
        Command::Lemke(a) => cmd_lemke(a),
    }
}

/// Parses `argv` (including the program name), runs the command and
/// returns the exit code.
pub fn run_command<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                EXIT_INPUT
            } else {
                let _ = write!(stdout, "{text}");
                EXIT_OK
            };
        }
    };
    match dispatch(&cli.command) {
        Ok(out) => {
            if stdout.write_all(out.report.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return EXIT_INPUT;
            }
            if out.counterexample {
                let _ = writeln!(stderr, "counterexample found");
                EXIT_COUNTEREXAMPLE
            } else {
                EXIT_OK
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_INPUT
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_command(std::iter::once("pcp").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn exponent_command() {
        let (code, out, _) = run(&["exponent", "--n", "2", "--d", "2"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["payload"]["holder"], "3888");
        assert_eq!(v["payload"]["naive"], "1244160");
        assert_eq!(v["command"], "exponent");
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(&["exponent", "--n", "2", "--d", "2", "--bogus"]).0, 2);
        assert_eq!(run(&["frobnicate"]).0, 2);
        assert_eq!(run(&["solve", "/nonexistent/file.json"]).0, 2);
        assert_eq!(run(&["exponent", "--n", "0", "--d", "2"]).0, 2);
        assert_eq!(run(&["--help"]).0, 0);
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("3/2").unwrap(), BigRational::new(3.into(), 2.into()));
        assert_eq!(parse_rational("0.25").unwrap(), BigRational::new(1.into(), 4.into()));
        assert_eq!(parse_rational("3888").unwrap(), BigRational::from_integer(3888.into()));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn point_lists() {
        assert_eq!(parse_points("1,2; 3,-4", 2).unwrap(), vec![vec![1.0, 2.0], vec![3.0, -4.0]]);
        assert!(parse_points("1,2,3", 2).is_err());
    }
}
