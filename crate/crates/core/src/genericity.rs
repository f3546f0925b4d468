//! Random instances and Monte Carlo checks of generic properties: solution
//! counts against `(2d)^n`, strict complementarity, R0 of the componentwise
//! leading pair and a global Lipschitz error bound.

use itertools::Itertools;
use nalgebra::DMatrix;
use num::{BigInt, BigRational};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{verify_global_bound, BoundSettings};
use crate::diagnostics::r0_test_componentwise;
use crate::enumerate::{enumerate_solutions, SolveConfig};
use crate::error::{PcpError, Result};
use crate::instance::PcpInstance;
use crate::lemke::{lemke_lcp, LemkeOutcome};
use crate::poly::{Monomial, PolyMap, Polynomial};
use crate::residuals::distance;
use crate::sampling::{seeded_rng, split_seed};

/// All exponent vectors of length `n` with total degree at most `d`,
/// in ascending graded-lex order.
pub fn exponents_up_to(n: usize, d: u32) -> Vec<Vec<u32>> {
    let mut out: Vec<Vec<u32>> = (0..n)
        .map(|_| 0..=d)
        .multi_cartesian_product()
        .filter(|e| e.iter().sum::<u32>() <= d)
        .collect();
    if n == 0 {
        out = vec![vec![]];
    }
    out.sort_by(|a, b| Monomial::new(a.clone()).cmp(&Monomial::new(b.clone())));
    out
}

fn random_map(rng: &mut crate::sampling::SampleRng, n: usize, degrees: &[u32]) -> Result<PolyMap> {
    let mut comps = Vec::with_capacity(n);
    for &d in degrees {
        let terms: Vec<(Monomial, f64)> = exponents_up_to(n, d)
            .into_iter()
            .map(|e| (Monomial::new(e), rng.sample::<f64, _>(StandardNormal)))
            .collect();
        comps.push(Polynomial::from_terms(n, terms)?);
    }
    PolyMap::new(comps)
}

/// Instance whose coefficients `u_{i,κ}`, `|κ| ≤ d_i`, are i.i.d. standard normal.
pub fn random_instance(n: usize, degrees_f: &[u32], degrees_g: &[u32], seed: u64) -> Result<PcpInstance> {
    if n == 0 || degrees_f.len() != n || degrees_g.len() != n {
        return Err(PcpError::InvalidInput(format!("need n ≥ 1 and {n} degrees per map")));
    }
    if degrees_f.iter().chain(degrees_g).any(|&d| d == 0) {
        return Err(PcpError::InvalidInput("degrees must be positive".into()));
    }
    let mut rng = seeded_rng(seed);
    let f = random_map(&mut rng, n, degrees_f)?;
    let g = random_map(&mut rng, n, degrees_g)?;
    PcpInstance::new(f, g)
}

/// Degrees of `f` and `g`; every component of a map gets the same degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TrialDegrees {
    pub f: u32,
    pub g: u32,
}

impl TrialDegrees {
    pub fn max(self) -> u32 {
        self.f.max(self.g)
    }
}

/// Probe sizes used inside each trial.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialSettings {
    pub r0_samples: usize,
    pub r0_refine_iters: usize,
    pub bound_samples: usize,
    /// Spheres sampled for the global bound.
    pub bound_radii: Vec<f64>,
    /// A trial passes the global Lipschitz check when `c_best` reaches this.
    pub lipschitz_threshold: f64,
}

impl Default for TrialSettings {
    fn default() -> Self {
        TrialSettings {
            r0_samples: 400,
            r0_refine_iters: 100,
            bound_samples: 2000,
            bound_radii: (1..=20).map(f64::from).collect(),
            lipschitz_threshold: 1e-6,
        }
    }
}

/// One row per trial. `None` fields were not computed because an earlier
/// stage failed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub solutions: Option<usize>,
    pub within_cardinality_bound: Option<bool>,
    pub strict_complementarity: Option<bool>,
    pub non_isolated_suspected: Option<bool>,
    pub r0_pass: Option<bool>,
    pub c_best: Option<f64>,
    pub lipschitz_pass: Option<bool>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialFailure {
    pub trial: usize,
    pub seed: u64,
    pub check: String,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialSummary {
    pub n: usize,
    pub degrees: TrialDegrees,
    pub master_seed: u64,
    pub trials: usize,
    pub enumerated: usize,
    pub solution_counts: Vec<Option<usize>>,
    pub seeds: Vec<u64>,
    pub max_count: usize,
    /// `(2d)^n` with `d` the larger of the two degrees.
    pub cardinality_bound: u64,
    pub cardinality_bound_holds: bool,
    pub strict_complementarity_rate: f64,
    pub r0_rate: f64,
    pub lipschitz_rate: f64,
    pub settings: TrialSettings,
    pub solve_config: SolveConfig,
    pub failures: Vec<TrialFailure>,
    pub records: Vec<TrialRecord>,
}

fn cardinality_bound(n: usize, d: u32) -> u64 {
    (2 * d as u64).saturating_pow(n as u32)
}

/// Runs the generic-property checks on one instance.
pub fn evaluate_trial_instance(inst: &PcpInstance, trial: usize, seed: u64, cfg: &SolveConfig, settings: &TrialSettings) -> TrialRecord {
    let mut rec = TrialRecord {
        trial,
        seed,
        solutions: None,
        within_cardinality_bound: None,
        strict_complementarity: None,
        non_isolated_suspected: None,
        r0_pass: None,
        c_best: None,
        lipschitz_pass: None,
        error: None,
    };
    let sols = match enumerate_solutions(inst, cfg) {
        Ok(s) => s,
        Err(e) => {
            rec.error = Some(e.to_string());
            return rec;
        }
    };
    rec.solutions = Some(sols.len());
    rec.within_cardinality_bound = Some((sols.len() as u64) <= cardinality_bound(inst.n(), inst.d()));
    rec.strict_complementarity = Some(sols.solutions.iter().all(|c| c.strict_complementarity));
    rec.non_isolated_suspected = Some(sols.non_isolated_suspected);

    match r0_test_componentwise(inst, settings.r0_samples, settings.r0_refine_iters, split_seed(seed, 1)) {
        Ok(r) => rec.r0_pass = Some(r.passed()),
        Err(e) => rec.error = Some(e.to_string()),
    }
    let one = BigRational::from_integer(BigInt::from(1));
    let bound_settings = BoundSettings::new(settings.bound_samples, one, split_seed(seed, 2));
    match verify_global_bound(inst, &sols, &settings.bound_radii, &bound_settings) {
        Ok(rep) => {
            rec.c_best = Some(rep.c_best);
            rec.lipschitz_pass = Some(rep.c_best >= settings.lipschitz_threshold);
        }
        Err(e) => rec.error = Some(e.to_string()),
    }
    rec
}

fn rate(records: &[TrialRecord], pick: impl Fn(&TrialRecord) -> Option<bool>) -> f64 {
    let vals: Vec<bool> = records.iter().filter_map(pick).collect();
    if vals.is_empty() {
        return 0.0;
    }
    vals.iter().filter(|&&v| v).count() as f64 / vals.len() as f64
}

pub fn genericity_trial(n: usize, degrees: TrialDegrees, trials: usize, seed: u64, cfg: &SolveConfig) -> Result<TrialSummary> {
    genericity_trial_with(n, degrees, trials, seed, cfg, &TrialSettings::default())
}

/// Monte Carlo over `trials` random instances with per-trial seeds
/// `split_seed(seed, k)`.
pub fn genericity_trial_with(
    n: usize,
    degrees: TrialDegrees,
    trials: usize,
    seed: u64,
    cfg: &SolveConfig,
    settings: &TrialSettings,
) -> Result<TrialSummary> {
    if n == 0 || degrees.f == 0 || degrees.g == 0 {
        return Err(PcpError::InvalidInput("need n ≥ 1 and positive degrees".into()));
    }
    cfg.validate()?;
    let seeds: Vec<u64> = (0..trials as u64).map(|k| split_seed(seed, k)).collect();
    let records: Vec<TrialRecord> = seeds
        .par_iter()
        .enumerate()
        .map(|(k, &s)| match random_instance(n, &vec![degrees.f; n], &vec![degrees.g; n], s) {
            Ok(inst) => evaluate_trial_instance(&inst, k, s, cfg, settings),
            Err(e) => TrialRecord {
                trial: k,
                seed: s,
                solutions: None,
                within_cardinality_bound: None,
                strict_complementarity: None,
                non_isolated_suspected: None,
                r0_pass: None,
                c_best: None,
                lipschitz_pass: None,
                error: Some(e.to_string()),
            },
        })
        .collect();

    let mut failures = Vec::new();
    let mut fail = |r: &TrialRecord, check: &str, detail: String| {
        failures.push(TrialFailure {
            trial: r.trial,
            seed: r.seed,
            check: check.into(),
            detail,
        })
    };
    let bound = cardinality_bound(n, degrees.max());
    for r in &records {
        if let Some(e) = &r.error {
            fail(r, "error", e.clone());
        }
        if r.within_cardinality_bound == Some(false) {
            fail(r, "cardinality", format!("{} solutions > {bound}", r.solutions.unwrap_or(0)));
        }
        if r.strict_complementarity == Some(false) {
            fail(r, "strict_complementarity", "a solution has min(f_i + g_i) ≤ tol".into());
        }
        if r.r0_pass == Some(false) {
            fail(r, "r0_componentwise", "leading pair has a non-zero solution".into());
        }
        if r.lipschitz_pass == Some(false) {
            fail(r, "global_lipschitz", format!("c_best = {}", r.c_best.unwrap_or(f64::NAN)));
        }
    }
    let counts: Vec<Option<usize>> = records.iter().map(|r| r.solutions).collect();
    let max_count = counts.iter().flatten().copied().max().unwrap_or(0);
    Ok(TrialSummary {
        n,
        degrees,
        master_seed: seed,
        trials,
        enumerated: counts.iter().flatten().count(),
        max_count,
        cardinality_bound: bound,
        cardinality_bound_holds: (max_count as u64) <= bound,
        strict_complementarity_rate: rate(&records, |r| r.strict_complementarity),
        r0_rate: rate(&records, |r| r.r0_pass),
        lipschitz_rate: rate(&records, |r| r.lipschitz_pass),
        solution_counts: counts,
        seeds,
        settings: settings.clone(),
        solve_config: cfg.clone(),
        failures,
        records,
    })
}

/// Writes one CSV row per trial.
pub fn write_trial_csv<W: std::io::Write>(summary: &TrialSummary, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in &summary.records {
        w.serialize(r).map_err(|e| PcpError::InvalidInput(format!("csv: {e}")))?;
    }
    w.flush().map_err(|e| PcpError::InvalidInput(format!("csv: {e}")))?;
    Ok(())
}

/// `PCP(Id, Mx + q)`, which is the LCP `(M, q)`, with standard normal `M, q`.
pub fn random_affine_lcp_instance(n: usize, seed: u64) -> Result<(PcpInstance, DMatrix<f64>, Vec<f64>)> {
    let mut rng = seeded_rng(seed);
    let m = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let q: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let inst = PcpInstance::new(PolyMap::identity(n), PolyMap::affine(&m, &q)?)?;
    Ok((inst, m, q))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemkeAgreementRow {
    pub trial: usize,
    pub seed: u64,
    pub lemke: String,
    pub enumerated: usize,
    /// Distance from the Lemke solution to the nearest enumerated point.
    pub distance: Option<f64>,
    pub agree: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemkeAgreement {
    pub n: usize,
    pub trials: usize,
    pub lemke_solved: usize,
    pub mismatches: usize,
    pub tolerance: f64,
    pub rows: Vec<LemkeAgreementRow>,
}

/// Compares Lemke's method with enumeration on random affine instances: a
/// mismatch is a Lemke solution with no enumerated point within `tol`.
pub fn affine_lemke_agreement(n: usize, trials: usize, seed: u64, tol: f64, cfg: &SolveConfig) -> Result<LemkeAgreement> {
    let rows: Vec<LemkeAgreementRow> = (0..trials)
        .into_par_iter()
        .map(|k| -> Result<LemkeAgreementRow> {
            let s = split_seed(seed, k as u64);
            let (inst, m, q) = random_affine_lcp_instance(n, s)?;
            let sols = enumerate_solutions(&inst, cfg)?;
            let outcome = lemke_lcp(&m, &q);
            let (label, z) = match &outcome {
                Ok(LemkeOutcome::Trivial { z }) => ("trivial", Some(z.clone())),
                Ok(LemkeOutcome::Solution { z, .. }) => ("solution", Some(z.clone())),
                Ok(LemkeOutcome::RayTermination { .. }) => ("ray_termination", None),
                Err(_) => ("pivot_budget", None),
            };
            let distance = z.as_ref().map(|z| sols.points().map(|p| distance(p, z)).fold(f64::INFINITY, f64::min));
            Ok(LemkeAgreementRow {
                trial: k,
                seed: s,
                lemke: label.into(),
                enumerated: sols.len(),
                distance,
                agree: distance.is_none_or(|d| d <= tol),
            })
        })
        .collect::<Result<_>>()?;
    Ok(LemkeAgreement {
        n,
        trials,
        lemke_solved: rows.iter().filter(|r| r.distance.is_some()).count(),
        mismatches: rows.iter().filter(|r| !r.agree).count(),
        tolerance: tol,
        rows,
    })
}
