//! Solution-set enumeration by index-set decomposition.
//!
//! Every solution of the complementarity problem solves one of the `2^n`
//! square systems `{f_i = 0, i ∈ I; g_j = 0, j ∉ I}`. Each system is attacked
//! with damped Newton from a shifted Halton design of starting points; the
//! roots that satisfy both sign conditions are certified against the
//! natural residual and merged.

use std::cmp::Ordering;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{PcpError, Result};
use crate::index_set::{graded_lex_subsets, guard, IndexSet};
use crate::instance::PcpInstance;
use crate::linalg::{determinant, solve_checked};
use crate::residuals::{componentwise_min, distance, norm};
use crate::sampling::{split_seed, Halton};

/// Backtracking halvings allowed per Newton step.
const MAX_BACKTRACKS: usize = 30;
/// Newton iterates beyond this norm are abandoned.
const NEWTON_ESCAPE_NORM: f64 = 1e8;
/// Distinct roots in one subsystem beyond which a continuum is suspected.
const CONTINUUM_SUSPICION: usize = 100;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveConfig {
    pub newton_tol: f64,
    pub max_newton_iters: usize,
    pub starts_per_subsystem: usize,
    pub start_box_radius: f64,
    pub dedupe_radius: f64,
    pub feasibility_tol: f64,
    pub rng_seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_ref: Option<Vec<f64>>,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            newton_tol: 1e-10,
            max_newton_iters: 100,
            starts_per_subsystem: 200,
            start_box_radius: 10.0,
            dedupe_radius: 1e-6,
            feasibility_tol: 1e-8,
            rng_seed: 0,
            x_ref: None,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("newton_tol", self.newton_tol),
            ("start_box_radius", self.start_box_radius),
            ("dedupe_radius", self.dedupe_radius),
            ("feasibility_tol", self.feasibility_tol),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(PcpError::InvalidInput(format!("{name} must be finite and positive")));
            }
        }
        if self.dedupe_radius <= self.newton_tol {
            return Err(PcpError::InvalidInput("dedupe_radius must exceed newton_tol".into()));
        }
        if self.max_newton_iters == 0 {
            return Err(PcpError::InvalidInput("max_newton_iters must be positive".into()));
        }
        Ok(())
    }
}

/// Evidence attached to an accepted solution.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolutionCertificate {
    pub point: Vec<f64>,
    /// Indices whose `f` branch is active (`f_i ≤ g_i`), 1-based when serialized.
    pub active_set: IndexSet,
    pub residual_norm: f64,
    pub min_f_plus_g: f64,
    pub strict_complementarity: bool,
    /// `min_I |det Jac_I(x)|` over all index sets.
    pub min_abs_det_jac: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Certification {
    Accepted(SolutionCertificate),
    Rejected { residual_norm: f64 },
}

impl Certification {
    pub fn accepted(self) -> Option<SolutionCertificate> {
        match self {
            Certification::Accepted(c) => Some(c),
            Certification::Rejected { .. } => None,
        }
    }
}

/// How much trust to place in an enumerated set being complete.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Completeness {
    /// Multi-start search; roots attracting no start in the box may be missing.
    Heuristic { start_box_radius: f64, starts_per_subsystem: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolutionSet {
    pub solutions: Vec<SolutionCertificate>,
    pub config: SolveConfig,
    pub completeness: Completeness,
    pub non_isolated_suspected: bool,
    /// Sign-feasible subsystem roots that failed certification.
    pub rejected_candidates: usize,
}

impl SolutionSet {
    pub fn empty(config: SolveConfig) -> Self {
        SolutionSet {
            completeness: Completeness::Heuristic {
                start_box_radius: config.start_box_radius,
                starts_per_subsystem: config.starts_per_subsystem,
            },
            solutions: Vec::new(),
            config,
            non_isolated_suspected: false,
            rejected_candidates: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.solutions.iter().map(|c| c.point.as_slice())
    }
}

/// Value of the square system selected by `set` at `x`.
fn subsystem_value(inst: &PcpInstance, set: IndexSet, x: &[f64]) -> Vec<f64> {
    (0..inst.n())
        .map(|i| {
            if set.contains(i) {
                inst.f().component(i).eval(x)
            } else {
                inst.g().component(i).eval(x)
            }
        })
        .collect()
}

pub(crate) fn subsystem_jacobian(inst: &PcpInstance, set: IndexSet, x: &[f64]) -> DMatrix<f64> {
    let n = inst.n();
    let mut jac = DMatrix::zeros(n, n);
    for i in 0..n {
        let row = if set.contains(i) {
            inst.jac_f().eval_row(i, x)
        } else {
            inst.jac_g().eval_row(i, x)
        };
        for (j, v) in row.into_iter().enumerate() {
            jac[(i, j)] = v;
        }
    }
    jac
}

/// Damped Newton on the subsystem from `start`. Returns the root and its
/// subsystem residual, or `None` when the start is abandoned.
fn newton(inst: &PcpInstance, set: IndexSet, start: &[f64], cfg: &SolveConfig) -> Option<(Vec<f64>, f64)> {
    let mut x = start.to_vec();
    let mut fx = subsystem_value(inst, set, &x);
    let mut res = norm(&fx);
    let mut polish = 0;
    for _ in 0..cfg.max_newton_iters {
        if res <= cfg.newton_tol {
            // a couple of extra steps tighten converged roots to roundoff
            if polish == 2 || res == 0.0 {
                return Some((x, res));
            }
            polish += 1;
        }
        let jac = subsystem_jacobian(inst, set, &x);
        let rhs: Vec<f64> = fx.iter().map(|v| -v).collect();
        let step = match solve_checked(&jac, &rhs) {
            Some(s) => s,
            None if res <= cfg.newton_tol => return Some((x, res)),
            None => return None,
        };
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_BACKTRACKS {
            let trial: Vec<f64> = x.iter().zip(&step).map(|(a, s)| a + lambda * s).collect();
            let ft = subsystem_value(inst, set, &trial);
            let rt = norm(&ft);
            if rt < res {
                accepted = Some((trial, ft, rt));
                break;
            }
            lambda *= 0.5;
        }
        match accepted {
            Some((t, ft, rt)) => {
                x = t;
                fx = ft;
                res = rt;
            }
            None if res <= cfg.newton_tol => return Some((x, res)),
            None => return None,
        }
        if norm(&x) > NEWTON_ESCAPE_NORM {
            return None;
        }
    }
    (res <= cfg.newton_tol).then_some((x, res))
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Greedy merge: candidates are ranked by residual (ties by coordinates) and
/// kept only if farther than `radius` from every kept point. Output is sorted
/// lexicographically.
fn dedupe<T>(mut candidates: Vec<(Vec<f64>, f64, T)>, radius: f64) -> Vec<(Vec<f64>, f64, T)> {
    candidates.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| lex_cmp(&a.0, &b.0)));
    let mut kept: Vec<(Vec<f64>, f64, T)> = Vec::new();
    for c in candidates {
        if kept.iter().all(|k| distance(&k.0, &c.0) > radius) {
            kept.push(c);
        }
    }
    kept.sort_by(|a, b| lex_cmp(&a.0, &b.0));
    kept
}

fn starts(n: usize, set: IndexSet, cfg: &SolveConfig) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0; n]];
    if let Some(r) = &cfg.x_ref {
        out.push(r.clone());
    }
    let halton = Halton::new(n, split_seed(cfg.rng_seed, set_key(set)));
    out.extend((0..cfg.starts_per_subsystem as u64).map(|k| halton.box_point(k, cfg.start_box_radius)));
    out
}

fn set_key(set: IndexSet) -> u64 {
    set.indices().fold(0u64, |acc, i| acc | (1 << i))
}

fn solve_subsystem_with_residuals(inst: &PcpInstance, set: IndexSet, cfg: &SolveConfig) -> Vec<(Vec<f64>, f64, ())> {
    let roots: Vec<(Vec<f64>, f64, ())> = starts(inst.n(), set, cfg)
        .iter()
        .filter_map(|s| newton(inst, set, s, cfg))
        .map(|(x, r)| (x, r, ()))
        .collect();
    dedupe(roots, cfg.dedupe_radius)
}

/// Roots of `{f_i = 0, i ∈ I; g_j = 0, j ∉ I}` found by multi-start Newton.
pub fn solve_subsystem(inst: &PcpInstance, set: IndexSet, cfg: &SolveConfig) -> Result<Vec<Vec<f64>>> {
    cfg.validate()?;
    set.check(inst.n())?;
    if let Some(r) = &cfg.x_ref {
        inst.check_point(r)?;
    }
    Ok(solve_subsystem_with_residuals(inst, set, cfg).into_iter().map(|(x, _, _)| x).collect())
}

/// `min_I |det Jac_I(x)|` over all `2^n` index sets.
pub fn min_abs_det_jacobian(inst: &PcpInstance, x: &[f64]) -> Result<f64> {
    guard(inst.n())?;
    inst.check_point(x)?;
    Ok(graded_lex_subsets(inst.n())
        .map(|s| determinant(&subsystem_jacobian(inst, s, x)).abs())
        .fold(f64::INFINITY, f64::min))
}

/// Accepts `x` iff `‖m(x)‖ ≤ newton_tol`.
pub fn certify_solution(inst: &PcpInstance, x: &[f64], cfg: &SolveConfig) -> Result<Certification> {
    inst.check_point(x)?;
    let (fx, gx) = inst.eval_pair(x);
    let residual_norm = norm(&componentwise_min(&fx, &gx));
    if !(residual_norm <= cfg.newton_tol) {
        return Ok(Certification::Rejected { residual_norm });
    }
    let mut active_set = IndexSet::empty();
    for i in 0..inst.n() {
        if fx[i] <= gx[i] {
            active_set.insert(i);
        }
    }
    let min_f_plus_g = fx.iter().zip(&gx).map(|(a, b)| a + b).fold(f64::INFINITY, f64::min);
    Ok(Certification::Accepted(SolutionCertificate {
        point: x.to_vec(),
        active_set,
        residual_norm,
        min_f_plus_g,
        strict_complementarity: min_f_plus_g > cfg.feasibility_tol,
        min_abs_det_jac: min_abs_det_jacobian(inst, x)?,
    }))
}

/// Enumerates `SOL(f, g)` over all index-set subsystems.
pub fn enumerate_solutions(inst: &PcpInstance, cfg: &SolveConfig) -> Result<SolutionSet> {
    guard(inst.n())?;
    cfg.validate()?;
    if let Some(r) = &cfg.x_ref {
        inst.check_point(r)?;
    }
    let subsets: Vec<IndexSet> = graded_lex_subsets(inst.n()).collect();
    let per_subsystem: Vec<Vec<(Vec<f64>, f64, ())>> = subsets
        .par_iter()
        .map(|&s| solve_subsystem_with_residuals(inst, s, cfg))
        .collect();

    let non_isolated_suspected = per_subsystem.iter().any(|r| r.len() > CONTINUUM_SUSPICION);
    let mut rejected = 0;
    let mut certified = Vec::new();
    for (x, _, _) in per_subsystem.into_iter().flatten() {
        let (fx, gx) = inst.eval_pair(&x);
        let feasible = fx.iter().chain(&gx).all(|&v| v >= -cfg.feasibility_tol);
        if !feasible {
            continue;
        }
        match certify_solution(inst, &x, cfg)? {
            Certification::Accepted(c) => certified.push((x, c.residual_norm, c)),
            Certification::Rejected { .. } => rejected += 1,
        }
    }
    let solutions = dedupe(certified, cfg.dedupe_radius).into_iter().map(|(_, _, c)| c).collect();
    let mut set = SolutionSet::empty(cfg.clone());
    set.solutions = solutions;
    set.non_isolated_suspected = non_isolated_suspected;
    set.rejected_candidates = rejected;
    Ok(set)
}

/// Euclidean distance from `x` to the nearest listed point; exactly 1 when
/// there are none.
pub fn distance_to_points<'a, I>(points: I, x: &[f64]) -> f64
where
    I: IntoIterator<Item = &'a [f64]>,
{
    points.into_iter().map(|p| distance(p, x)).fold(None, |acc: Option<f64>, d| Some(acc.map_or(d, |a| a.min(d)))).unwrap_or(1.0)
}

pub fn distance_to_solutions(sols: &SolutionSet, x: &[f64]) -> f64 {
    distance_to_points(sols.points(), x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::tests::{example_global_failure, example_no_solution};
    use crate::poly::PolyMap;

    fn shifted_identity(n: usize) -> PcpInstance {
        let f = PolyMap::identity(n);
        let g = f.shift(&vec![-1.0; n]).unwrap();
        PcpInstance::new(f, g).unwrap()
    }

    fn self_pair(m: PolyMap) -> PcpInstance {
        PcpInstance::new(m.clone(), m).unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        distance(a, b) <= tol
    }

    #[test]
    fn subsystem_examples() {
        let cfg = SolveConfig::default();
        let roots = solve_subsystem(&shifted_identity(2), IndexSet::empty(), &cfg).unwrap();
        assert_eq!(roots.len(), 1);
        assert!(close(&roots[0], &[1.0, 1.0], 1e-12));

        let roots = solve_subsystem(&self_pair(example_no_solution()), IndexSet::full(2), &cfg).unwrap();
        assert!(roots.is_empty());

        let roots = solve_subsystem(&self_pair(example_global_failure()), IndexSet::full(2), &cfg).unwrap();
        assert_eq!(roots.len(), 1);
        assert!(close(&roots[0], &[1.0, 1.0], 1e-10));
    }

    #[test]
    fn enumerate_examples() {
        let cfg = SolveConfig::default();
        let sols = enumerate_solutions(&self_pair(example_global_failure()), &cfg).unwrap();
        assert_eq!(sols.len(), 1);
        assert!(close(&sols.solutions[0].point, &[1.0, 1.0], 1e-8));

        assert!(enumerate_solutions(&self_pair(example_no_solution()), &cfg).unwrap().is_empty());

        let sols = enumerate_solutions(&shifted_identity(2), &cfg).unwrap();
        assert_eq!(sols.len(), 1);
        assert!(close(&sols.solutions[0].point, &[1.0, 1.0], 1e-12));
        assert!(!sols.non_isolated_suspected);
    }

    #[test]
    fn certify_examples() {
        let cfg = SolveConfig::default();
        let c = certify_solution(&shifted_identity(2), &[1.0, 1.0], &cfg).unwrap().accepted().unwrap();
        assert!(c.strict_complementarity);
        assert_eq!(c.min_f_plus_g, 1.0);
        assert_eq!(c.min_abs_det_jac, 1.0);

        let inst = self_pair(example_global_failure());
        let c = certify_solution(&inst, &[1.0, 1.0], &cfg).unwrap().accepted().unwrap();
        assert!(!c.strict_complementarity);
        assert_eq!(c.min_abs_det_jac, 1.0);

        match certify_solution(&inst, &[0.0, 0.0], &cfg).unwrap() {
            Certification::Rejected { residual_norm } => assert_eq!(residual_norm, 2f64.sqrt()),
            other => panic!("expected rejection, got {other:?}"),
        }
        assert!(certify_solution(&inst, &[0.0], &cfg).is_err());
    }

    #[test]
    fn distance_examples() {
        let mut sols = SolutionSet::empty(SolveConfig::default());
        assert_eq!(distance_to_solutions(&sols, &[3.0, -4.0]), 1.0);
        sols = enumerate_solutions(&shifted_identity(2), &SolveConfig::default()).unwrap();
        assert_eq!(distance_to_solutions(&sols, &[1.0, 1.0]), 0.0);
        assert!((distance_to_solutions(&sols, &[0.0, 0.0]) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn config_validation() {
        let mut cfg = SolveConfig {
            dedupe_radius: 1e-11,
            ..SolveConfig::default()
        };
        assert!(cfg.validate().is_err());
        cfg = SolveConfig::default();
        cfg.newton_tol = -1.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn dedupe_keeps_smaller_residual() {
        let c = vec![(vec![0.0], 1e-11, 'a'), (vec![1e-8], 1e-12, 'b'), (vec![1.0], 1e-12, 'c')];
        let kept = dedupe(c, 1e-6);
        assert_eq!(kept.iter().map(|k| k.2).collect::<String>(), "bc");
    }

    #[test]
    fn doubling_starts_keeps_solutions() {
        let inst = crate::genericity::random_instance(2, &[2, 2], &[2, 2], 5).unwrap();
        let mut cfg = SolveConfig { starts_per_subsystem: 50, ..SolveConfig::default() };
        let small = enumerate_solutions(&inst, &cfg).unwrap();
        cfg.starts_per_subsystem = 100;
        let large = enumerate_solutions(&inst, &cfg).unwrap();
        for p in small.points() {
            assert!(distance_to_solutions(&large, p) <= cfg.dedupe_radius);
        }
    }
}
