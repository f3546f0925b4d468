//! Sampling probes for the existence, compactness and uniqueness hypotheses
//! on a complementarity problem.
//!
//! Every probe checks a universally quantified statement at finitely many
//! points, so a pass is only ever evidence. A counterexample carries witness
//! points that violate the probed predicate when re-evaluated.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::bounds::least_squares_fit;
use crate::enumerate::{enumerate_solutions, min_abs_det_jacobian, SolutionSet, SolveConfig};
use crate::error::{PcpError, Result};
use crate::instance::PcpInstance;
use crate::linalg::lstsq;
use crate::residuals::{branch_jacobian, componentwise_min, dot, norm};
use crate::sampling::{seeded_rng, sphere_point, Region, SampleRng};

/// Threshold on `‖m^∞‖` below which a unit vector witnesses failure of R0.
pub const R0_WITNESS_TOL: f64 = 1e-8;
/// Threshold on `φ(R)` signalling solutions at the largest probed radius.
pub const COERCIVITY_ZERO_TOL: f64 = 1e-10;
/// Fitted growth exponents at or below this value are flagged as bounded growth.
pub const BOUNDED_GROWTH_ALPHA: f64 = 0.05;
/// Determinant magnitude treated as a rank drop.
pub const DEGENERACY_TOL: f64 = 1e-8;
/// Relative slack used when re-testing inequality predicates.
pub const INEQUALITY_REL_TOL: f64 = 1e-9;
/// Rejection budget of the P-function sampler.
pub const MAX_REJECTIONS: usize = 1_000_000;

const REFINE_KEEP: usize = 10;
const POLISH_ITERS: usize = 30;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub points: Vec<Vec<f64>>,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    EvidencePass,
    Counterexample { witnesses: Vec<Witness> },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthFit {
    pub c: f64,
    pub alpha: f64,
    pub r_squared: f64,
    pub radii: Vec<f64>,
    pub phi: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeSettings {
    pub seed: u64,
    pub samples: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub radii: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refine_iters: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub region: Option<Region>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_ref: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constant: Option<f64>,
}

impl ProbeSettings {
    fn new(seed: u64, samples: usize) -> Self {
        ProbeSettings {
            seed,
            samples,
            radii: Vec::new(),
            refine_iters: None,
            region: None,
            x_ref: None,
            constant: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeReport {
    pub probe: String,
    #[serde(flatten)]
    pub verdict: Verdict,
    pub samples_used: usize,
    /// Smallest and largest value of the probed statistic.
    pub min_statistic: f64,
    pub max_statistic: f64,
    pub settings: ProbeSettings,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub growth: Option<GrowthFit>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

impl ProbeReport {
    pub fn passed(&self) -> bool {
        matches!(self.verdict, Verdict::EvidencePass)
    }

    pub fn witnesses(&self) -> &[Witness] {
        match &self.verdict {
            Verdict::Counterexample { witnesses } => witnesses,
            Verdict::EvidencePass => &[],
        }
    }
}

struct Stats {
    min: f64,
    max: f64,
    count: usize,
}

impl Stats {
    fn new() -> Self {
        Stats {
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
            count: 0,
        }
    }

    fn push(&mut self, v: f64) {
        self.min = self.min.min(v);
        self.max = self.max.max(v);
        self.count += 1;
    }
}

fn verdict(witnesses: Vec<Witness>) -> Verdict {
    if witnesses.is_empty() {
        Verdict::EvidencePass
    } else {
        Verdict::Counterexample { witnesses }
    }
}

/// Value and branch Jacobian of `m` for `inst`.
fn natural_with_jacobian(inst: &PcpInstance, x: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
    let (fx, gx) = inst.eval_pair(x);
    let jac = branch_jacobian(inst, x, Some((&fx, &gx)));
    (componentwise_min(&fx, &gx), jac)
}

/// Projected gradient descent with Armijo backtracking on `‖m(x)‖²` over the
/// sphere `‖x‖ = radius`, followed by tangent Gauss–Newton polishing.
fn refine_on_sphere(inst: &PcpInstance, start: &[f64], radius: f64, iters: usize) -> (Vec<f64>, f64) {
    let project = |v: Vec<f64>| -> Vec<f64> {
        let r = norm(&v);
        v.into_iter().map(|a| a * radius / r).collect()
    };
    let objective = |x: &[f64]| -> f64 {
        let (fx, gx) = inst.eval_pair(x);
        let m = componentwise_min(&fx, &gx);
        dot(&m, &m)
    };
    let mut x = start.to_vec();
    let mut val = objective(&x);
    let mut step = 1.0 / (radius * radius).max(1.0);
    for _ in 0..iters {
        if val == 0.0 {
            break;
        }
        let (m, jac) = natural_with_jacobian(inst, &x);
        let grad: Vec<f64> = (jac.transpose() * nalgebra::DVector::from_column_slice(&m)).iter().map(|g| 2.0 * g).collect();
        let radial = dot(&grad, &x) / (radius * radius);
        let tangent: Vec<f64> = grad.iter().zip(&x).map(|(g, xi)| g - radial * xi).collect();
        let gnorm2 = dot(&tangent, &tangent);
        if gnorm2 == 0.0 || !gnorm2.is_finite() {
            break;
        }
        step *= 2.0;
        let mut improved = false;
        for _ in 0..60 {
            let trial = project(x.iter().zip(&tangent).map(|(a, g)| a - step * g).collect());
            let tv = objective(&trial);
            if tv <= val - 1e-4 * step * gnorm2 {
                x = trial;
                val = tv;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    for _ in 0..POLISH_ITERS {
        if val == 0.0 {
            break;
        }
        let (m, jac) = natural_with_jacobian(inst, &x);
        let n = x.len();
        let mut aug = DMatrix::zeros(n + 1, n);
        aug.view_mut((0, 0), (n, n)).copy_from(&jac);
        for j in 0..n {
            aug[(n, j)] = x[j];
        }
        let mut rhs: Vec<f64> = m.iter().map(|v| -v).collect();
        rhs.push(0.0);
        let Some(delta) = lstsq(&aug, &rhs) else { break };
        let trial = project(x.iter().zip(&delta).map(|(a, d)| a + d).collect());
        let tv = objective(&trial);
        if tv < val {
            x = trial;
            val = tv;
        } else {
            break;
        }
    }
    (x, val.sqrt())
}

/// Samples the sphere of `radius`, refines the best samples and returns the
/// minimizer of `‖m‖` found, its value and the number of raw samples.
fn minimize_on_sphere(inst: &PcpInstance, radius: f64, samples: usize, refine_iters: usize, rng: &mut SampleRng) -> (Vec<f64>, f64) {
    let n = inst.n();
    let mut scored: Vec<(f64, Vec<f64>)> = (0..samples.max(1))
        .map(|_| {
            let x = sphere_point(rng, n, radius);
            let (fx, gx) = inst.eval_pair(&x);
            (norm(&componentwise_min(&fx, &gx)), x)
        })
        .collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    scored
        .iter()
        .take(REFINE_KEEP)
        .map(|(_, x)| refine_on_sphere(inst, x, radius, refine_iters))
        .chain(scored.first().map(|(v, x)| (x.clone(), *v)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least one sample")
}

/// Whether the leading pair has only the trivial solution, tested as
/// `min_{‖x‖=1} ‖m^∞(x)‖ > 0` on the map-level leading terms.
pub fn r0_test(inst: &PcpInstance, samples: usize, refine_iters: usize, seed: u64) -> Result<ProbeReport> {
    let lead = inst.leading_pair()?;
    Ok(r0_test_on_leading(&lead, "r0", samples, refine_iters, seed))
}

/// As [`r0_test`] but with componentwise leading terms, each component at
/// its own degree.
pub fn r0_test_componentwise(inst: &PcpInstance, samples: usize, refine_iters: usize, seed: u64) -> Result<ProbeReport> {
    let lead = inst.componentwise_leading_pair()?;
    Ok(r0_test_on_leading(&lead, "r0_componentwise", samples, refine_iters, seed))
}

/// Whether `x` on the unit sphere witnesses a non-zero element of
/// `SOL(f^∞, g^∞)`.
pub fn is_r0_witness(lead: &PcpInstance, x: &[f64]) -> bool {
    let (fx, gx) = lead.eval_pair(x);
    let m = norm(&componentwise_min(&fx, &gx));
    (norm(x) - 1.0).abs() < 1e-9 && m <= R0_WITNESS_TOL && fx.iter().chain(&gx).all(|&v| v >= -R0_WITNESS_TOL)
}

fn r0_test_on_leading(lead: &PcpInstance, name: &str, samples: usize, refine_iters: usize, seed: u64) -> ProbeReport {
    let mut rng = seeded_rng(seed);
    let (x, value) = minimize_on_sphere(lead, 1.0, samples, refine_iters, &mut rng);
    let witnesses = if is_r0_witness(lead, &x) {
        vec![Witness { points: vec![x], value }]
    } else {
        Vec::new()
    };
    let mut settings = ProbeSettings::new(seed, samples);
    settings.refine_iters = Some(refine_iters);
    ProbeReport {
        probe: name.into(),
        verdict: verdict(witnesses),
        samples_used: samples,
        min_statistic: value,
        max_statistic: value,
        settings,
        growth: None,
        flags: Vec::new(),
    }
}

/// Growth of `φ(R) = min_{‖x‖=R} ‖m(x)‖`, fitted as `φ(R) ≈ c R^α`.
pub fn coercivity_probe(inst: &PcpInstance, radii: &[f64], samples_per_radius: usize, refine_iters: usize, seed: u64) -> Result<ProbeReport> {
    if radii.len() < 2 {
        return Err(PcpError::InvalidInput("coercivity probe needs at least two radii".into()));
    }
    if radii.windows(2).any(|w| !(w[1] > w[0])) || !(radii[0] > 0.0) {
        return Err(PcpError::InvalidInput("radii must be positive and strictly increasing".into()));
    }
    let mut rng = seeded_rng(seed);
    let mut phi = Vec::with_capacity(radii.len());
    let mut minimizers = Vec::with_capacity(radii.len());
    for &r in radii {
        let (x, v) = minimize_on_sphere(inst, r, samples_per_radius, refine_iters, &mut rng);
        phi.push(v);
        minimizers.push(x);
    }
    let last = phi.len() - 1;
    let mut witnesses = Vec::new();
    if phi[last] <= COERCIVITY_ZERO_TOL {
        witnesses.push(Witness {
            points: vec![minimizers[last].clone()],
            value: phi[last],
        });
    }
    let fit_pairs: Vec<(f64, f64)> = radii.iter().zip(&phi).filter(|(_, &p)| p > 0.0).map(|(&r, &p)| (r, p)).collect();
    let growth = if fit_pairs.len() >= 2 {
        let xs: Vec<f64> = fit_pairs.iter().map(|p| p.0.ln()).collect();
        let ys: Vec<f64> = fit_pairs.iter().map(|p| p.1.ln()).collect();
        least_squares_fit(&xs, &ys).ok().map(|(slope, intercept, r2)| GrowthFit {
            c: intercept.exp(),
            alpha: slope,
            r_squared: r2,
            radii: radii.to_vec(),
            phi: phi.clone(),
        })
    } else {
        None
    };
    let mut flags = Vec::new();
    if growth.as_ref().is_some_and(|g| g.alpha <= BOUNDED_GROWTH_ALPHA) {
        flags.push("bounded_growth".to_string());
    }
    let mut settings = ProbeSettings::new(seed, samples_per_radius);
    settings.radii = radii.to_vec();
    settings.refine_iters = Some(refine_iters);
    Ok(ProbeReport {
        probe: "coercivity".into(),
        verdict: verdict(witnesses),
        samples_used: samples_per_radius * radii.len(),
        min_statistic: phi.iter().copied().fold(f64::INFINITY, f64::min),
        max_statistic: phi.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        settings,
        growth,
        flags,
    })
}

/// `⟨x - x_ref, m(x)⟩`, or with `m^∞` when `lead` is the leading pair.
pub fn xref_statistic(inst: &PcpInstance, x_ref: &[f64], x: &[f64]) -> f64 {
    let (fx, gx) = inst.eval_pair(x);
    let m = componentwise_min(&fx, &gx);
    x.iter().zip(x_ref).zip(&m).map(|((a, b), v)| (a - b) * v).sum()
}

/// Checks `⟨x - x_ref, m(x)⟩ > 0` (or with `m^∞`) on the sphere `‖x‖ = radius`.
pub fn xref_boundedness_probe(inst: &PcpInstance, x_ref: &[f64], radius: f64, samples: usize, use_leading: bool, seed: u64) -> Result<ProbeReport> {
    inst.check_point(x_ref)?;
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(PcpError::InvalidInput("radius must be positive".into()));
    }
    let target = if use_leading { inst.leading_pair()? } else { inst.clone() };
    let mut rng = seeded_rng(seed);
    let mut stats = Stats::new();
    let mut worst: Option<(f64, Vec<f64>)> = None;
    for _ in 0..samples {
        let x = sphere_point(&mut rng, inst.n(), radius);
        let s = xref_statistic(&target, x_ref, &x);
        stats.push(s);
        if worst.as_ref().is_none_or(|w| s < w.0) {
            worst = Some((s, x));
        }
    }
    let witnesses = match worst {
        Some((s, x)) if s <= 0.0 => vec![Witness { points: vec![x], value: s }],
        _ => Vec::new(),
    };
    let mut settings = ProbeSettings::new(seed, samples);
    settings.radii = vec![radius];
    settings.x_ref = Some(x_ref.to_vec());
    Ok(ProbeReport {
        probe: if use_leading { "xref_boundedness_leading" } else { "xref_boundedness" }.into(),
        verdict: verdict(witnesses),
        samples_used: stats.count,
        min_statistic: stats.min,
        max_statistic: stats.max,
        settings,
        growth: None,
        flags: Vec::new(),
    })
}

/// `⟨x, m(x) - m(0)⟩ - c‖x‖²`; non-negative where the coercivity inequality holds.
pub fn karamardian_margin(inst: &PcpInstance, c: f64, x: &[f64]) -> f64 {
    let zero = vec![0.0; inst.n()];
    let (f0, g0) = inst.eval_pair(&zero);
    let m0 = componentwise_min(&f0, &g0);
    let (fx, gx) = inst.eval_pair(x);
    let m = componentwise_min(&fx, &gx);
    let lhs: f64 = x.iter().zip(m.iter().zip(&m0)).map(|(xi, (a, b))| xi * (a - b)).sum();
    lhs - c * dot(x, x)
}

fn karamardian_violated(inst: &PcpInstance, c: f64, x: &[f64]) -> bool {
    karamardian_margin(inst, c, x) < -INEQUALITY_REL_TOL * c * dot(x, x)
}

/// Checks `⟨x, m(x) - m(0)⟩ ≥ c‖x‖²` for sampled `‖x‖ > ‖m(0)‖/c`, with
/// radii log-uniform up to `max(100, 10‖m(0)‖/c)`.
pub fn karamardian_coercivity_probe(inst: &PcpInstance, c: f64, samples: usize, seed: u64) -> Result<ProbeReport> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(PcpError::InvalidInput("constant c must be positive".into()));
    }
    let n = inst.n();
    let zero = vec![0.0; n];
    let (f0, g0) = inst.eval_pair(&zero);
    let threshold = norm(&componentwise_min(&f0, &g0)) / c;
    let r_lo = (threshold * (1.0 + 1e-9)).max(1e-3);
    let r_hi = (10.0 * threshold).max(100.0);
    let mut rng = seeded_rng(seed);
    let mut stats = Stats::new();
    let mut witnesses = Vec::new();
    use rand::Rng;
    for _ in 0..samples {
        let r = (r_lo.ln() + rng.random::<f64>() * (r_hi.ln() - r_lo.ln())).exp();
        let x = sphere_point(&mut rng, n, r);
        let margin = karamardian_margin(inst, c, &x) / (c * r * r);
        stats.push(margin);
        if karamardian_violated(inst, c, &x) && witnesses.is_empty() {
            witnesses.push(Witness { points: vec![x], value: margin });
        }
    }
    let mut settings = ProbeSettings::new(seed, samples);
    settings.radii = vec![r_lo, r_hi];
    settings.constant = Some(c);
    Ok(ProbeReport {
        probe: "karamardian_coercivity".into(),
        verdict: verdict(witnesses),
        samples_used: stats.count,
        min_statistic: stats.min,
        max_statistic: stats.max,
        settings,
        growth: None,
        flags: Vec::new(),
    })
}

/// Flags solutions where some `Jac_I` has `|det| ≤ 1e-8`.
pub fn jacobian_degeneracy_scan(inst: &PcpInstance, sols: &SolutionSet) -> Result<ProbeReport> {
    crate::index_set::guard(inst.n())?;
    let mut stats = Stats::new();
    let mut witnesses = Vec::new();
    for p in sols.points() {
        let v = min_abs_det_jacobian(inst, p)?;
        stats.push(v);
        if v <= DEGENERACY_TOL {
            witnesses.push(Witness {
                points: vec![p.to_vec()],
                value: v,
            });
        }
    }
    Ok(ProbeReport {
        probe: "jacobian_degeneracy".into(),
        verdict: verdict(witnesses),
        samples_used: stats.count,
        min_statistic: if stats.count > 0 { stats.min } else { 0.0 },
        max_statistic: if stats.count > 0 { stats.max } else { 0.0 },
        settings: ProbeSettings::new(0, sols.len()),
        growth: None,
        flags: Vec::new(),
    })
}

/// Where pairs for the P-function probe are drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairDomain {
    /// The region intersected with `K = {f ≥ 0, g ≥ 0}`.
    Feasible,
    /// The whole region.
    Region,
}

/// `max_i (f_i(x) - f_i(y))(g_i(x) - g_i(y))`; positive iff the P-property
/// holds for the pair.
pub fn p_pair_statistic(inst: &PcpInstance, x: &[f64], y: &[f64]) -> f64 {
    let (fx, gx) = inst.eval_pair(x);
    let (fy, gy) = inst.eval_pair(y);
    (0..inst.n())
        .map(|i| (fx[i] - fy[i]) * (gx[i] - gy[i]))
        .fold(f64::NEG_INFINITY, f64::max)
}

fn feasible(inst: &PcpInstance, x: &[f64]) -> bool {
    let (fx, gx) = inst.eval_pair(x);
    fx.iter().chain(&gx).all(|&v| v >= 0.0)
}

/// Samples pairs `x ≠ y` and looks for one with no index of positive
/// product. When `sols` is given, every pair of listed solutions lying in
/// the sampled domain is tested as well.
pub fn p_function_probe(
    inst: &PcpInstance,
    region: &Region,
    pairs: usize,
    domain: PairDomain,
    sols: Option<&SolutionSet>,
    seed: u64,
) -> Result<ProbeReport> {
    crate::error::check_dim(inst.n(), region.dim())?;
    if pairs == 0 {
        return Err(PcpError::InvalidInput("need at least one pair".into()));
    }
    let mut rng = seeded_rng(seed);
    let mut rejections = 0;
    let mut draw = |rng: &mut SampleRng| -> Result<Vec<f64>> {
        loop {
            let x = region.sample(rng);
            if domain == PairDomain::Region || feasible(inst, &x) {
                return Ok(x);
            }
            rejections += 1;
            if rejections >= MAX_REJECTIONS {
                return Err(PcpError::EmptyRegion { rejections });
            }
        }
    };
    let mut stats = Stats::new();
    let mut witnesses = Vec::new();
    for _ in 0..pairs {
        let x = draw(&mut rng)?;
        let y = draw(&mut rng)?;
        if x == y {
            continue;
        }
        let s = p_pair_statistic(inst, &x, &y);
        stats.push(s);
        if s <= 0.0 && witnesses.is_empty() {
            witnesses.push(Witness { points: vec![x, y], value: s });
        }
    }
    let mut flags = Vec::new();
    if let Some(sols) = sols {
        let inside: Vec<&[f64]> = sols
            .points()
            .filter(|p| region.contains(p) && (domain == PairDomain::Region || feasible_with_slack(inst, p, sols.config.feasibility_tol)))
            .collect();
        for (a, p) in inside.iter().enumerate() {
            for q in &inside[a + 1..] {
                let s = p_pair_statistic(inst, p, q);
                stats.push(s);
                if s <= solution_pair_slack(inst, p, q, sols.config.newton_tol) {
                    flags.push("solution_pair_violates".to_string());
                    witnesses.push(Witness {
                        points: vec![p.to_vec(), q.to_vec()],
                        value: s,
                    });
                }
            }
        }
        flags.dedup();
    }
    let mut settings = ProbeSettings::new(seed, pairs);
    settings.region = Some(region.clone());
    Ok(ProbeReport {
        probe: match domain {
            PairDomain::Feasible => "p_function_feasible",
            PairDomain::Region => "p_function_region",
        }
        .into(),
        verdict: verdict(witnesses),
        samples_used: stats.count,
        min_statistic: stats.min,
        max_statistic: stats.max,
        settings,
        growth: None,
        flags,
    })
}

fn feasible_with_slack(inst: &PcpInstance, x: &[f64], tol: f64) -> bool {
    let (fx, gx) = inst.eval_pair(x);
    fx.iter().chain(&gx).all(|&v| v >= -tol)
}

/// At two exact solutions every product is `-f_i(x)g_i(y) - f_i(y)g_i(x) ≤ 0`;
/// certified points satisfy complementarity only to `tol`, which bounds the
/// positive slack the product can pick up.
fn solution_pair_slack(inst: &PcpInstance, x: &[f64], y: &[f64], tol: f64) -> f64 {
    let (fx, gx) = inst.eval_pair(x);
    let (fy, gy) = inst.eval_pair(y);
    let scale = fx.iter().chain(&gx).chain(&fy).chain(&gy).map(|v| v.abs()).fold(1.0, f64::max);
    4.0 * tol * scale
}

/// Checks the sampled part of the bounded-set hypothesis for injective `f`
/// (or `g` when `use_g`): no point with `‖x‖ = radius` lies in
/// `{h(x) ≥ 0, ⟨f(x), g(x)⟩ ≤ 0}` where `h` is the injective map.
pub fn injectivity_set_probe(inst: &PcpInstance, radius: f64, samples: usize, use_g: bool, seed: u64) -> Result<ProbeReport> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(PcpError::InvalidInput("radius must be positive".into()));
    }
    let mut rng = seeded_rng(seed);
    let mut stats = Stats::new();
    let mut witnesses = Vec::new();
    for _ in 0..samples {
        let x = sphere_point(&mut rng, inst.n(), radius);
        let (fx, gx) = inst.eval_pair(&x);
        let h = if use_g { &gx } else { &fx };
        let inner = dot(&fx, &gx);
        stats.push(inner);
        if h.iter().all(|&v| v >= 0.0) && inner <= 0.0 && witnesses.is_empty() {
            witnesses.push(Witness { points: vec![x], value: inner });
        }
    }
    let mut settings = ProbeSettings::new(seed, samples);
    settings.radii = vec![radius];
    Ok(ProbeReport {
        probe: if use_g { "injectivity_set_g" } else { "injectivity_set_f" }.into(),
        verdict: verdict(witnesses),
        samples_used: stats.count,
        min_statistic: stats.min,
        max_statistic: stats.max,
        settings,
        growth: None,
        flags: Vec::new(),
    })
}

/// Combined check that `SOL(f^∞, g^∞) = {0} = SOL(f^∞, g^∞ + 1)`: the R0
/// probe on the leading pair plus enumeration of the shifted leading
/// problem, where any root away from the origin is a counterexample.
pub fn shifted_r0_check(inst: &PcpInstance, samples: usize, refine_iters: usize, cfg: &SolveConfig, seed: u64) -> Result<ProbeReport> {
    let lead = inst.leading_pair()?;
    let mut report = r0_test_on_leading(&lead, "shifted_r0", samples, refine_iters, seed);
    let shifted = PcpInstance::new(lead.f().clone(), lead.g().shift(&vec![1.0; inst.n()])?)?;
    let sols = enumerate_solutions(&shifted, cfg)?;
    let extra: Vec<Witness> = sols
        .points()
        .filter(|p| norm(p) > cfg.dedupe_radius)
        .map(|p| Witness {
            points: vec![p.to_vec()],
            value: norm(p),
        })
        .collect();
    if !extra.is_empty() {
        report.flags.push("shifted_leading_problem_has_nonzero_solution".into());
        let mut all = report.witnesses().to_vec();
        all.extend(extra);
        report.verdict = Verdict::Counterexample { witnesses: all };
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::enumerate_solutions;
    use crate::poly::tests::{example_global_failure, example_no_solution, poly};
    use crate::poly::PolyMap;

    fn shifted_identity(n: usize) -> PcpInstance {
        let f = PolyMap::identity(n);
        let g = f.shift(&vec![-1.0; n]).unwrap();
        PcpInstance::new(f, g).unwrap()
    }

    fn self_pair(m: PolyMap) -> PcpInstance {
        PcpInstance::new(m.clone(), m).unwrap()
    }

    /// `f = Id`, `g = (x2 - 1, x1 - 1)`.
    fn swapped_pair() -> PcpInstance {
        let g = PolyMap::new(vec![poly(2, &[(1.0, &[0, 1]), (-1.0, &[0, 0])]), poly(2, &[(1.0, &[1, 0]), (-1.0, &[0, 0])])]).unwrap();
        PcpInstance::new(PolyMap::identity(2), g).unwrap()
    }

    #[test]
    fn r0_examples() {
        let rep = r0_test(&shifted_identity(2), 500, 200, 0).unwrap();
        assert!(rep.passed());
        assert!((rep.min_statistic - 1.0).abs() < 1e-9);

        let inst = swapped_pair();
        let rep = r0_test(&inst, 500, 200, 0).unwrap();
        let w = &rep.witnesses()[0].points[0];
        assert!(is_r0_witness(&inst.leading_pair().unwrap(), w));

        let inst = self_pair(example_global_failure());
        let rep = r0_test(&inst, 500, 200, 0).unwrap();
        let w = &rep.witnesses()[0].points[0];
        assert!(is_r0_witness(&inst.leading_pair().unwrap(), w));
    }

    #[test]
    fn r0_arithmetic_at_axis_points() {
        let lead = swapped_pair().leading_pair().unwrap();
        assert!(is_r0_witness(&lead, &[0.0, 1.0]));
        let lead = self_pair(example_global_failure()).leading_pair().unwrap();
        assert!(is_r0_witness(&lead, &[1.0, 0.0]));
    }

    #[test]
    fn r0_verdict_is_scale_invariant() {
        for inst in [shifted_identity(2), swapped_pair(), self_pair(example_global_failure())] {
            let base = r0_test(&inst, 300, 200, 4).unwrap().passed();
            for (l, m) in [(0.1, 3.0), (7.0, 0.5)] {
                let scaled = PcpInstance::new(inst.f().scale(l), inst.g().scale(m)).unwrap();
                assert_eq!(r0_test(&scaled, 300, 200, 4).unwrap().passed(), base);
            }
        }
    }

    #[test]
    fn coercivity_examples() {
        let id = self_pair(PolyMap::identity(2));
        let rep = coercivity_probe(&id, &[1.0, 10.0, 100.0], 200, 100, 0).unwrap();
        let g = rep.growth.as_ref().unwrap();
        assert!((g.alpha - 1.0).abs() < 1e-9 && (g.c - 1.0).abs() < 1e-9);
        assert!(rep.passed());

        let rep = coercivity_probe(&shifted_identity(2), &[10.0, 100.0, 1000.0], 200, 100, 0).unwrap();
        assert!((rep.growth.unwrap().alpha - 1.0).abs() < 0.1);

        let rep = coercivity_probe(&self_pair(example_global_failure()), &[10.0, 100.0, 1000.0], 500, 200, 0).unwrap();
        let g = rep.growth.as_ref().unwrap();
        assert!(g.alpha <= BOUNDED_GROWTH_ALPHA, "alpha = {}", g.alpha);
        assert!(g.phi.iter().all(|&p| p <= 1.0));
        assert!(rep.flags.contains(&"bounded_growth".to_string()));

        assert!(coercivity_probe(&id, &[1.0], 10, 10, 0).is_err());
    }

    #[test]
    fn xref_examples() {
        let id = self_pair(PolyMap::identity(2));
        let rep = xref_boundedness_probe(&id, &[0.0, 0.0], 5.0, 1000, false, 0).unwrap();
        assert!(rep.passed());
        assert!((rep.min_statistic - 25.0).abs() < 1e-9);

        let inst = self_pair(example_global_failure());
        for k in [2.0, 10.0, 100.0] {
            let s = xref_statistic(&inst, &[0.0, 0.0], &[k, 1.0 / k]);
            assert!((s - (1.0 - k)).abs() < 1e-9);
        }
        let rep = xref_boundedness_probe(&inst, &[0.0, 0.0], 50.0, 1000, false, 0).unwrap();
        let w = &rep.witnesses()[0];
        assert!(xref_statistic(&inst, &[0.0, 0.0], &w.points[0]) <= 0.0);

        let rep = xref_boundedness_probe(&shifted_identity(2), &[2.0, 2.0], 100.0, 10_000, false, 0).unwrap();
        assert!(rep.passed());
        let rep = xref_boundedness_probe(&shifted_identity(2), &[2.0, 2.0], 100.0, 1000, true, 0).unwrap();
        assert!(rep.passed());
    }

    #[test]
    fn karamardian_examples() {
        let id = self_pair(PolyMap::identity(2));
        assert!(karamardian_coercivity_probe(&id, 1.0, 1000, 0).unwrap().passed());
        let rep = karamardian_coercivity_probe(&id, 2.0, 1000, 0).unwrap();
        let w = &rep.witnesses()[0].points[0];
        assert!(karamardian_violated(&id, 2.0, w));
        assert!(karamardian_coercivity_probe(&shifted_identity(2), 0.5, 10_000, 0).unwrap().passed());
        assert!(karamardian_coercivity_probe(&id, 0.0, 10, 0).is_err());
    }

    #[test]
    fn degeneracy_examples() {
        let cfg = SolveConfig::default();
        let inst = shifted_identity(2);
        let rep = jacobian_degeneracy_scan(&inst, &enumerate_solutions(&inst, &cfg).unwrap()).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.min_statistic, 1.0);

        let inst = self_pair(example_global_failure());
        let rep = jacobian_degeneracy_scan(&inst, &enumerate_solutions(&inst, &cfg).unwrap()).unwrap();
        assert!(rep.passed());
        assert!((rep.min_statistic - 1.0).abs() < 1e-9);

        let g = PolyMap::new(vec![poly(2, &[(1.0, &[2, 0])]), poly(2, &[(1.0, &[0, 1])])]).unwrap();
        let inst = PcpInstance::new(PolyMap::identity(2), g).unwrap();
        let sols = enumerate_solutions(&inst, &cfg).unwrap();
        assert!(sols.points().any(|p| norm(p) < 1e-12));
        let rep = jacobian_degeneracy_scan(&inst, &sols).unwrap();
        assert!(!rep.passed());
        assert!(rep.witnesses().iter().all(|w| min_abs_det_jacobian(&inst, &w.points[0]).unwrap() <= DEGENERACY_TOL));
    }

    #[test]
    fn p_function_examples() {
        let region = Region::cube(2, -3.0, 3.0).unwrap();
        let id = self_pair(PolyMap::identity(2));
        assert!(p_function_probe(&id, &region, 1000, PairDomain::Region, None, 0).unwrap().passed());

        let neg = PcpInstance::new(PolyMap::identity(2), PolyMap::identity(2).scale(-1.0)).unwrap();
        let rep = p_function_probe(&neg, &region, 1000, PairDomain::Region, None, 0).unwrap();
        let w = &rep.witnesses()[0];
        assert!(p_pair_statistic(&neg, &w.points[0], &w.points[1]) <= 0.0);
        assert!(matches!(
            p_function_probe(&neg, &region, 10, PairDomain::Feasible, None, 0),
            Err(PcpError::EmptyRegion { .. })
        ));

        let inst = self_pair(example_no_solution());
        let k = Region::cube(2, 0.0, 10.0).unwrap();
        assert!(p_function_probe(&inst, &k, 2000, PairDomain::Feasible, None, 0).unwrap().passed());
    }

    #[test]
    fn p_function_retests_solution_pairs() {
        // f = x, g = (x - 1)(x - 2): solutions 0, 1, 2.
        let f = PolyMap::identity(1);
        let g = PolyMap::new(vec![poly(1, &[(1.0, &[2]), (-3.0, &[1]), (2.0, &[0])])]).unwrap();
        let inst = PcpInstance::new(f, g).unwrap();
        let sols = enumerate_solutions(&inst, &SolveConfig::default()).unwrap();
        assert_eq!(sols.len(), 3);
        let region = Region::cube(1, 1.5, 2.5).unwrap();
        let rep = p_function_probe(&inst, &Region::cube(1, -0.5, 2.5).unwrap(), 1, PairDomain::Feasible, Some(&sols), 0).unwrap();
        assert!(!rep.passed());
        assert!(rep.flags.contains(&"solution_pair_violates".to_string()));
        // Only one solution inside: nothing to re-test, and g is increasing there.
        let rep = p_function_probe(&inst, &region, 500, PairDomain::Feasible, Some(&sols), 0).unwrap();
        assert!(rep.passed());
    }

    #[test]
    fn injectivity_set_examples() {
        assert!(injectivity_set_probe(&shifted_identity(2), 10.0, 1000, false, 0).unwrap().passed());
        let neg = PcpInstance::new(PolyMap::identity(2), PolyMap::identity(2).scale(-1.0)).unwrap();
        assert!(!injectivity_set_probe(&neg, 10.0, 1000, false, 0).unwrap().passed());
    }

    #[test]
    fn shifted_r0_examples() {
        let cfg = SolveConfig::default();
        assert!(shifted_r0_check(&shifted_identity(2), 300, 100, &cfg, 0).unwrap().passed());
        assert!(!shifted_r0_check(&swapped_pair(), 300, 100, &cfg, 0).unwrap().passed());
    }
}
