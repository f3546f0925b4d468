//! Continuation along existence homotopies of the natural map.
//!
//! Two deformations are tracked from `t = 0` to `t = 1`:
//!
//! * natural: `H(x, t) = (1 - t)(x - x_ref) + t·m(x)`, starting at `x_ref`;
//! * leading: `H(x, t) = min{(1 - t) f^∞ + t f, (1 - t) g^∞ + t g}`,
//!   starting at the origin, which is a root of `m^∞`.
//!
//! Both end at `H(·, 1) = m`. The corrector is a semismooth Newton method
//! whose generalized Jacobian takes, per component, the branch with the
//! smaller value (ties take the first branch). A trace that fails to reach
//! `t = 1` is evidence, not proof, that its hypotheses fail.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::enumerate::SolveConfig;
use crate::error::Result;
use crate::instance::PcpInstance;
use crate::linalg::solve_checked;
use crate::poly::{Jacobian, PolyMap};
use crate::residuals::{branch_jacobian, componentwise_min, distance, norm};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrackerConfig {
    pub corrector_tol: f64,
    pub max_corrector_iters: usize,
    pub initial_step: f64,
    pub min_step: f64,
    pub max_step: f64,
    pub divergence_norm: f64,
    pub max_steps: usize,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        TrackerConfig {
            corrector_tol: 1e-8,
            max_corrector_iters: 10,
            initial_step: 0.05,
            min_step: 1e-12,
            max_step: 0.5,
            divergence_norm: 1e6,
            max_steps: 100_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Checkpoint {
    pub t: f64,
    pub x: Vec<f64>,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TraceOutcome {
    Converged { point: Vec<f64>, residual: f64 },
    Diverged { t: f64, norm: f64 },
    Stalled { t: f64, step: f64, reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HomotopyTrace {
    pub homotopy: &'static str,
    pub checkpoints: Vec<Checkpoint>,
    pub outcome: TraceOutcome,
    pub rejected_steps: usize,
}

impl HomotopyTrace {
    pub fn converged_point(&self) -> Option<&[f64]> {
        match &self.outcome {
            TraceOutcome::Converged { point, .. } => Some(point),
            _ => None,
        }
    }

    pub fn max_norm(&self) -> f64 {
        self.checkpoints.iter().map(|c| norm(&c.x)).fold(0.0, f64::max)
    }
}

trait Homotopy {
    fn value(&self, x: &[f64], t: f64) -> Vec<f64>;
    fn jacobian(&self, x: &[f64], t: f64) -> DMatrix<f64>;
}

struct NaturalHomotopy<'a> {
    inst: &'a PcpInstance,
    x_ref: &'a [f64],
}

impl Homotopy for NaturalHomotopy<'_> {
    fn value(&self, x: &[f64], t: f64) -> Vec<f64> {
        let (fx, gx) = self.inst.eval_pair(x);
        componentwise_min(&fx, &gx)
            .iter()
            .zip(x.iter().zip(self.x_ref))
            .map(|(m, (xi, ri))| (1.0 - t) * (xi - ri) + t * m)
            .collect()
    }

    fn jacobian(&self, x: &[f64], t: f64) -> DMatrix<f64> {
        let n = x.len();
        branch_jacobian(self.inst, x, None) * t + DMatrix::identity(n, n) * (1.0 - t)
    }
}

/// `min{(1 - t) a + t f, (1 - t) b + t g}` for start pair `(a, b)` and
/// target pair `(f, g)`.
struct PairHomotopy {
    start: (PolyMap, PolyMap),
    target: (PolyMap, PolyMap),
    start_jac: (Jacobian, Jacobian),
    target_jac: (Jacobian, Jacobian),
}

impl PairHomotopy {
    fn new(start: (PolyMap, PolyMap), target: (PolyMap, PolyMap)) -> Self {
        let start_jac = (start.0.derivative(), start.1.derivative());
        let target_jac = (target.0.derivative(), target.1.derivative());
        PairHomotopy {
            start,
            target,
            start_jac,
            target_jac,
        }
    }

    fn branches(&self, x: &[f64], t: f64) -> (Vec<f64>, Vec<f64>) {
        let blend = |a: Vec<f64>, b: Vec<f64>| -> Vec<f64> { a.iter().zip(&b).map(|(u, v)| (1.0 - t) * u + t * v).collect() };
        (
            blend(self.start.0.eval(x), self.target.0.eval(x)),
            blend(self.start.1.eval(x), self.target.1.eval(x)),
        )
    }
}

impl Homotopy for PairHomotopy {
    fn value(&self, x: &[f64], t: f64) -> Vec<f64> {
        let (a, b) = self.branches(x, t);
        componentwise_min(&a, &b)
    }

    fn jacobian(&self, x: &[f64], t: f64) -> DMatrix<f64> {
        let n = x.len();
        let (a, b) = self.branches(x, t);
        let mut jac = DMatrix::zeros(n, n);
        for i in 0..n {
            let (s, e) = if a[i] <= b[i] {
                (self.start_jac.0.eval_row(i, x), self.target_jac.0.eval_row(i, x))
            } else {
                (self.start_jac.1.eval_row(i, x), self.target_jac.1.eval_row(i, x))
            };
            for j in 0..n {
                jac[(i, j)] = (1.0 - t) * s[j] + t * e[j];
            }
        }
        jac
    }
}

/// Semismooth Newton on `H(·, t)`. Returns the root and iteration count.
fn correct<H: Homotopy>(h: &H, start: &[f64], t: f64, tol: f64, max_iters: usize) -> Option<(Vec<f64>, f64, usize)> {
    let mut x = start.to_vec();
    for it in 0..=max_iters {
        let v = h.value(&x, t);
        let r = norm(&v);
        if !r.is_finite() {
            return None;
        }
        if r <= tol {
            return Some((x, r, it));
        }
        if it == max_iters {
            break;
        }
        let rhs: Vec<f64> = v.iter().map(|a| -a).collect();
        let step = solve_checked(&h.jacobian(&x, t), &rhs)?;
        for (xi, s) in x.iter_mut().zip(&step) {
            *xi += s;
        }
    }
    None
}

fn track<H: Homotopy>(h: &H, name: &'static str, x0: Vec<f64>, final_tol: f64, cfg: &TrackerConfig) -> HomotopyTrace {
    let r0 = norm(&h.value(&x0, 0.0));
    let mut checkpoints = vec![Checkpoint {
        t: 0.0,
        x: x0.clone(),
        residual: r0,
    }];
    let trace = |checkpoints: Vec<Checkpoint>, outcome, rejected| HomotopyTrace {
        homotopy: name,
        checkpoints,
        outcome,
        rejected_steps: rejected,
    };
    if r0 > cfg.corrector_tol {
        return trace(
            checkpoints,
            TraceOutcome::Stalled {
                t: 0.0,
                step: 0.0,
                reason: "start point is not a root of H(., 0)".into(),
            },
            0,
        );
    }

    let mut t = 0.0;
    let mut x = x0;
    let mut prev: Option<(f64, Vec<f64>)> = None;
    let mut step = cfg.initial_step;
    let mut rejected = 0;
    for _ in 0..cfg.max_steps {
        let t_new = (t + step).min(1.0);
        let predicted: Vec<f64> = match &prev {
            Some((tp, xp)) => x.iter().zip(xp).map(|(a, b)| a + (a - b) * (t_new - t) / (t - tp)).collect(),
            None => x.clone(),
        };
        let tol = if t_new >= 1.0 { final_tol.min(cfg.corrector_tol) } else { cfg.corrector_tol };
        let jump_limit = 1.0 + norm(&x);
        let corrected = correct(h, &predicted, t_new, tol, cfg.max_corrector_iters)
            .filter(|(xn, _, _)| distance(xn, &predicted) <= jump_limit);
        match corrected {
            Some((xn, r, iters)) => {
                prev = Some((t, std::mem::replace(&mut x, xn)));
                t = t_new;
                checkpoints.push(Checkpoint {
                    t,
                    x: x.clone(),
                    residual: r,
                });
                let nx = norm(&x);
                if nx > cfg.divergence_norm {
                    return trace(checkpoints, TraceOutcome::Diverged { t, norm: nx }, rejected);
                }
                if t >= 1.0 {
                    return trace(checkpoints, TraceOutcome::Converged { point: x, residual: r }, rejected);
                }
                if iters <= 3 {
                    step = (2.0 * step).min(cfg.max_step);
                }
            }
            None => {
                rejected += 1;
                step *= 0.5;
                if step < cfg.min_step {
                    return trace(
                        checkpoints,
                        TraceOutcome::Stalled {
                            t,
                            step,
                            reason: "step size fell below the floor".into(),
                        },
                        rejected,
                    );
                }
            }
        }
    }
    trace(
        checkpoints,
        TraceOutcome::Stalled {
            t,
            step,
            reason: "step budget exhausted".into(),
        },
        rejected,
    )
}

/// Tracks `(1 - t)(x - x_ref) + t·m(x)` from `x_ref` at `t = 0`.
pub fn track_natural_homotopy(inst: &PcpInstance, x_ref: &[f64], cfg: &SolveConfig) -> Result<HomotopyTrace> {
    track_natural_homotopy_with(inst, x_ref, cfg, &TrackerConfig::default())
}

pub fn track_natural_homotopy_with(
    inst: &PcpInstance,
    x_ref: &[f64],
    cfg: &SolveConfig,
    tracker: &TrackerConfig,
) -> Result<HomotopyTrace> {
    inst.check_point(x_ref)?;
    let h = NaturalHomotopy { inst, x_ref };
    Ok(track(&h, "natural", x_ref.to_vec(), cfg.newton_tol, tracker))
}

/// Tracks `min{(1 - t) f^∞ + t f, (1 - t) g^∞ + t g}` from the origin.
pub fn track_leading_homotopy(inst: &PcpInstance, cfg: &SolveConfig) -> Result<HomotopyTrace> {
    let lead = inst.leading_pair()?;
    track_leading_homotopy_to(&lead, inst, cfg, &TrackerConfig::default())
}

/// Tracks from the leading pair `lead` (homogeneous, root at 0) to an
/// arbitrary target `(f + p, g + q)` of the same arity.
pub fn track_leading_homotopy_to(
    lead: &PcpInstance,
    target: &PcpInstance,
    cfg: &SolveConfig,
    tracker: &TrackerConfig,
) -> Result<HomotopyTrace> {
    crate::error::check_dim(lead.n(), target.n())?;
    let h = PairHomotopy::new(
        (lead.f().clone(), lead.g().clone()),
        (target.f().clone(), target.g().clone()),
    );
    Ok(track(&h, "leading", vec![0.0; lead.n()], cfg.newton_tol, tracker))
}
