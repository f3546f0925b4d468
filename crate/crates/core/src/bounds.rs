//! Hölderian error-bound exponents and their empirical verification.
//!
//! A bound `c·dist(x, SOL)^α ≤ ‖m(x)‖` is checked by sampling: the best
//! constant on the sample is `c_best = min ‖m(x)‖ / dist(x, SOL)^α`, computed
//! in log space so that exponents in the thousands neither underflow nor
//! overflow. The global variant replaces `dist^α` by `min{dist, dist^α}`.

use num::{BigRational, BigUint, One, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use crate::enumerate::{distance_to_solutions, Completeness, SolutionSet};
use crate::error::{check_dim, PcpError, Result};
use crate::instance::PcpInstance;
use crate::residuals::{natural_residual, norm};
use crate::sampling::{seeded_rng, sphere_point, Region, SampleRng};

/// Samples with `dist` at or below this value enter the exponent fit.
pub const NEAR_SOLUTION_DIST: f64 = 0.1;
/// Smallest distance of the shell samples placed around each solution.
pub const SHELL_MIN_DIST: f64 = 1e-6;
/// MAD multiple beyond which a fit residual is discarded as an outlier.
pub const OUTLIER_MADS: f64 = 3.5;

const MAD_SCALE: f64 = 1.4826;
const OUTLIER_ROUNDS: usize = 3;

/// `R(n, d) = d(3d - 3)^(n - 1)`, and `1` when `d = 1`.
pub fn exponent_r(n: u32, d: u32) -> BigUint {
    assert!(n >= 1 && d >= 1, "R(n, d) needs n, d ≥ 1");
    if d == 1 {
        return BigUint::one();
    }
    BigUint::from(d) * num::pow(BigUint::from(3 * d - 3), (n - 1) as usize)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HolderExponent {
    pub n: u32,
    pub d: u32,
    /// `R(3n - 1, d + 1)`, the local exponent.
    #[serde(serialize_with = "serialize_biguint")]
    pub alpha: BigUint,
    /// Exponent of the global two-regime bound: `alpha`, or `1` when `d = 1`.
    #[serde(serialize_with = "serialize_biguint")]
    pub global_alpha: BigUint,
    pub affine_branch: bool,
}

fn serialize_biguint<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

pub fn holder_exponent_for(n: u32, d: u32) -> HolderExponent {
    let alpha = exponent_r(3 * n - 1, d + 1);
    let affine_branch = d == 1;
    HolderExponent {
        n,
        d,
        global_alpha: if affine_branch { BigUint::one() } else { alpha.clone() },
        alpha,
        affine_branch,
    }
}

pub fn holder_exponent(inst: &PcpInstance) -> HolderExponent {
    holder_exponent_for(inst.n() as u32, inst.d())
}

/// `R(3n, 2d + 1)`.
pub fn naive_exponent_for(n: u32, d: u32) -> BigUint {
    exponent_r(3 * n, 2 * d + 1)
}

pub fn naive_exponent(inst: &PcpInstance) -> BigUint {
    naive_exponent_for(inst.n() as u32, inst.d())
}

/// Ordinary least squares `y ≈ slope·x + intercept`, returning
/// `(slope, intercept, r²)`.
pub fn least_squares_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    check_dim(xs.len(), ys.len())?;
    if xs.len() < 2 {
        return Err(PcpError::InvalidInput("a fit needs at least two points".into()));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(PcpError::InvalidInput("fit data must be finite".into()));
    }
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    if sxx <= f64::EPSILON * xs.iter().map(|x| x * x).sum::<f64>().max(f64::MIN_POSITIVE) {
        return Err(PcpError::Degenerate("abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs.iter().zip(ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
    let r2 = if syy > 0.0 { (1.0 - sse / syy).max(0.0) } else { 1.0 };
    Ok((slope, intercept, r2))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub used: usize,
    pub discarded: usize,
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

/// Log-log fit of residual against distance. Points whose fit residual lies
/// more than `OUTLIER_MADS` scaled median absolute deviations from the median
/// are dropped and the line is refitted.
pub fn empirical_exponent_fit(pairs: &[(f64, f64)]) -> Result<ExponentFit> {
    if pairs.iter().any(|&(d, r)| !(d > 0.0 && r > 0.0 && d.is_finite() && r.is_finite())) {
        return Err(PcpError::InvalidInput("fit pairs need finite positive dist and residual".into()));
    }
    let mut xs: Vec<f64> = pairs.iter().map(|p| p.0.ln()).collect();
    let mut ys: Vec<f64> = pairs.iter().map(|p| p.1.ln()).collect();
    let mut fit = least_squares_fit(&xs, &ys)?;
    for _ in 0..OUTLIER_ROUNDS {
        let errs: Vec<f64> = xs.iter().zip(&ys).map(|(x, y)| y - fit.0 * x - fit.1).collect();
        let med = median(&mut errs.clone());
        let mad = median(&mut errs.iter().map(|e| (e - med).abs()).collect::<Vec<_>>());
        let scale = ys.iter().map(|y| y.abs()).fold(1.0, f64::max);
        let cut = OUTLIER_MADS * MAD_SCALE * mad + 1e-9 * scale;
        let keep: Vec<bool> = errs.iter().map(|e| (e - med).abs() <= cut).collect();
        if keep.iter().all(|&k| k) {
            break;
        }
        let kx: Vec<f64> = xs.iter().zip(&keep).filter(|p| *p.1).map(|p| *p.0).collect();
        let ky: Vec<f64> = ys.iter().zip(&keep).filter(|p| *p.1).map(|p| *p.0).collect();
        match least_squares_fit(&kx, &ky) {
            Ok(f) => {
                fit = f;
                xs = kx;
                ys = ky;
            }
            Err(_) => break,
        }
    }
    Ok(ExponentFit {
        slope: fit.0,
        intercept: fit.1,
        r_squared: fit.2,
        used: xs.len(),
        discarded: pairs.len() - xs.len(),
    })
}

/// Sampling parameters shared by the local and global checks.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundSettings {
    pub samples: usize,
    pub alpha: BigRational,
    pub seed: u64,
    /// Constant whose violations are listed.
    pub claimed_c: Option<f64>,
    /// Points evaluated in addition to the random sample.
    pub extra_points: Vec<Vec<f64>>,
    /// Whether to add log-uniform shells of points around each solution.
    pub near_solution_shells: bool,
}

impl BoundSettings {
    pub fn new(samples: usize, alpha: BigRational, seed: u64) -> Self {
        BoundSettings {
            samples,
            alpha,
            seed,
            claimed_c: None,
            extra_points: Vec::new(),
            near_solution_shells: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundSample {
    pub point: Vec<f64>,
    pub dist: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub kind: &'static str,
    pub alpha: String,
    pub alpha_value: f64,
    /// Largest `c` with no violation on the sample; `0` when it underflows.
    pub c_best: f64,
    pub log10_c_best: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub argmin: Option<BoundSample>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub claimed_c: Option<f64>,
    pub violations: Vec<BoundSample>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<ExponentFit>,
    pub seed: u64,
    pub random_samples: usize,
    pub shell_samples: usize,
    pub extra_samples: usize,
    /// Samples with `dist > 0` that constrain `c`.
    pub effective_samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub region: Option<Region>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub radii: Vec<f64>,
    pub solutions: usize,
    pub completeness: Completeness,
    pub flags: Vec<String>,
    pub pairs: Vec<BoundSample>,
}

impl BoundReport {
    /// Violations of `c·lhs(dist) ≤ residual` on the recorded sample.
    pub fn violations_at(&self, c: f64) -> Vec<&BoundSample> {
        let global = self.kind == "global";
        self.pairs
            .iter()
            .filter(|s| violates(log_ratio(s, self.alpha_value, global), c))
            .collect()
    }
}

fn alpha_to_f64(alpha: &BigRational) -> Result<f64> {
    let num = alpha.numer().to_f64();
    let den = alpha.denom().to_f64();
    match (num, den) {
        (Some(a), Some(b)) if b != 0.0 => {
            let v = if a.is_finite() && b.is_finite() { a / b } else { alpha.to_f64().unwrap_or(f64::NAN) };
            if v > 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(PcpError::InvalidInput("alpha must be positive and representable".into()))
            }
        }
        _ => Err(PcpError::InvalidInput("alpha must be positive and representable".into())),
    }
}

/// `ln residual - ln lhs(dist)`, with `lhs = dist^α` or `min{dist, dist^α}`.
fn log_ratio(s: &BoundSample, alpha: f64, global: bool) -> Option<f64> {
    if !(s.dist > 0.0) {
        return None;
    }
    let ld = s.dist.ln();
    let lhs = if global { ld.min(alpha * ld) } else { alpha * ld };
    Some(s.residual.ln() - lhs)
}

fn violates(lr: Option<f64>, c: f64) -> bool {
    match lr {
        None => false,
        Some(_) if c <= 0.0 => false,
        Some(lr) => {
            let lc = c.ln();
            lr < lc - 1e-12 * lc.abs().max(1.0)
        }
    }
}

fn shell_points(sols: &SolutionSet, count: usize, rng: &mut SampleRng) -> Vec<Vec<f64>> {
    let centers: Vec<&[f64]> = sols.points().collect();
    if centers.is_empty() {
        return Vec::new();
    }
    let (lo, hi) = (SHELL_MIN_DIST.ln(), NEAR_SOLUTION_DIST.ln());
    (0..count)
        .map(|k| {
            let c = centers[k % centers.len()];
            let r = rand::Rng::random_range(rng, lo..hi).exp();
            let u = sphere_point(rng, c.len(), r);
            c.iter().zip(&u).map(|(a, b)| a + b).collect()
        })
        .collect()
}

struct Draws {
    points: Vec<Vec<f64>>,
    random: usize,
    shells: usize,
    extra: usize,
}

fn assemble(
    inst: &PcpInstance,
    sols: &SolutionSet,
    draws: Draws,
    settings: &BoundSettings,
    kind: &'static str,
    region: Option<Region>,
    radii: Vec<f64>,
) -> Result<BoundReport> {
    let alpha = alpha_to_f64(&settings.alpha)?;
    let global = kind == "global";
    let pairs: Vec<BoundSample> = draws
        .points
        .into_par_iter()
        .map(|x| BoundSample {
            dist: distance_to_solutions(sols, &x),
            residual: natural_residual(inst, &x),
            point: x,
        })
        .collect();

    let mut best: Option<(f64, usize)> = None;
    let mut effective = 0;
    for (i, s) in pairs.iter().enumerate() {
        if let Some(lr) = log_ratio(s, alpha, global) {
            effective += 1;
            if best.is_none_or(|(b, _)| lr < b) {
                best = Some((lr, i));
            }
        }
    }
    let mut flags = Vec::new();
    let (log10_c_best, c_best, argmin) = match best {
        Some((lr, i)) => (lr / std::f64::consts::LN_10, lr.exp(), Some(pairs[i].clone())),
        None => {
            flags.push("no_constraining_samples".to_string());
            (f64::INFINITY, f64::INFINITY, None)
        }
    };

    let violations: Vec<BoundSample> = match settings.claimed_c {
        Some(c) => pairs.iter().filter(|s| violates(log_ratio(s, alpha, global), c)).cloned().collect(),
        None => Vec::new(),
    };
    if !violations.is_empty() {
        flags.push("claimed_constant_violated".to_string());
    }

    let near: Vec<(f64, f64)> = pairs
        .iter()
        .filter(|s| s.dist > 0.0 && s.dist <= NEAR_SOLUTION_DIST && s.residual > 0.0)
        .map(|s| (s.dist, s.residual))
        .collect();
    let fit = if near.len() >= 2 { empirical_exponent_fit(&near).ok() } else { None };
    if fit.is_none() {
        flags.push("insufficient_near_solution_samples".to_string());
    }
    if sols.is_empty() {
        flags.push("empty_solution_set".to_string());
    }
    if matches!(sols.completeness, Completeness::Heuristic { .. }) {
        flags.push("heuristic_completeness".to_string());
    }

    Ok(BoundReport {
        kind,
        alpha: settings.alpha.to_string(),
        alpha_value: alpha,
        c_best,
        log10_c_best,
        argmin,
        claimed_c: settings.claimed_c,
        violations,
        fit,
        seed: settings.seed,
        random_samples: draws.random,
        shell_samples: draws.shells,
        extra_samples: draws.extra,
        effective_samples: effective,
        region,
        radii,
        solutions: sols.len(),
        completeness: sols.completeness.clone(),
        flags,
        pairs,
    })
}

fn check_extra(inst: &PcpInstance, settings: &BoundSettings) -> Result<()> {
    for p in &settings.extra_points {
        inst.check_point(p)?;
    }
    Ok(())
}

/// Samples `region` uniformly (plus shells around the solutions that fall
/// inside it) and checks `c·dist^α ≤ ‖m‖`.
pub fn verify_local_bound(inst: &PcpInstance, sols: &SolutionSet, region: &Region, settings: &BoundSettings) -> Result<BoundReport> {
    check_dim(inst.n(), region.dim())?;
    check_extra(inst, settings)?;
    if settings.samples == 0 && settings.extra_points.is_empty() {
        return Err(PcpError::InvalidInput("no samples requested".into()));
    }
    let mut rng = seeded_rng(settings.seed);
    let mut points: Vec<Vec<f64>> = (0..settings.samples).map(|_| region.sample(&mut rng)).collect();
    let shells: Vec<Vec<f64>> = if settings.near_solution_shells {
        shell_points(sols, settings.samples / 4, &mut rng).into_iter().filter(|p| region.contains(p)).collect()
    } else {
        Vec::new()
    };
    let draws = Draws {
        random: points.len(),
        shells: shells.len(),
        extra: settings.extra_points.len(),
        points: {
            points.extend(shells);
            points.extend(settings.extra_points.iter().cloned());
            points
        },
    };
    assemble(inst, sols, draws, settings, "local", Some(region.clone()), Vec::new())
}

/// Samples spheres of the given radii (split evenly), shells around the
/// solutions and the extra points, and checks `c·min{dist, dist^α} ≤ ‖m‖`.
pub fn verify_global_bound(inst: &PcpInstance, sols: &SolutionSet, radii: &[f64], settings: &BoundSettings) -> Result<BoundReport> {
    check_extra(inst, settings)?;
    if radii.is_empty() || radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(PcpError::InvalidInput("radii must be a non-empty list of positive numbers".into()));
    }
    if settings.samples < radii.len() && settings.extra_points.is_empty() {
        return Err(PcpError::InvalidInput("need at least one sample per radius".into()));
    }
    let n = inst.n();
    let mut rng = seeded_rng(settings.seed);
    let per = settings.samples / radii.len();
    let mut points: Vec<Vec<f64>> = Vec::with_capacity(settings.samples);
    for &r in radii {
        points.extend((0..per).map(|_| sphere_point(&mut rng, n, r)));
    }
    let random = points.len();
    let shells = if settings.near_solution_shells { shell_points(sols, settings.samples / 4, &mut rng) } else { Vec::new() };
    let draws = Draws {
        random,
        shells: shells.len(),
        extra: settings.extra_points.len(),
        points: {
            points.extend(shells);
            points.extend(settings.extra_points.iter().cloned());
            points
        },
    };
    assemble(inst, sols, draws, settings, "global", None, radii.to_vec())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthProfile {
    pub radii: Vec<f64>,
    /// `min ‖m(x)‖ / ‖x‖` over the samples on each sphere.
    pub min_ratio: Vec<f64>,
    /// Each ratio is at least 90% of its predecessor.
    pub nondecreasing_within_noise: bool,
}

/// Sampled lower growth rate `‖m(x)‖ ≥ c‖x‖` across spheres.
pub fn growth_ratio_profile(inst: &PcpInstance, radii: &[f64], samples_per_radius: usize, seed: u64) -> Result<GrowthProfile> {
    if radii.is_empty() || samples_per_radius == 0 || radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(PcpError::InvalidInput("need positive radii and samples".into()));
    }
    let mut rng = seeded_rng(seed);
    let min_ratio: Vec<f64> = radii
        .iter()
        .map(|&r| {
            (0..samples_per_radius)
                .map(|_| {
                    let x = sphere_point(&mut rng, inst.n(), r);
                    natural_residual(inst, &x) / norm(&x)
                })
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let nondecreasing_within_noise = min_ratio.windows(2).all(|w| w[1] >= 0.9 * w[0]);
    Ok(GrowthProfile {
        radii: radii.to_vec(),
        min_ratio,
        nondecreasing_within_noise,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::{enumerate_solutions, SolveConfig};
    use crate::poly::tests::example_global_failure;
    use crate::poly::PolyMap;
    use approx::assert_abs_diff_eq;
    use num::BigInt;

    fn rational(v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    fn shifted_identity(n: usize) -> PcpInstance {
        let f = PolyMap::identity(n);
        let g = f.shift(&vec![-1.0; n]).unwrap();
        PcpInstance::new(f, g).unwrap()
    }

    #[test]
    fn exponent_values() {
        assert_eq!(exponent_r(2, 2), BigUint::from(6u32));
        assert_eq!(exponent_r(5, 3), BigUint::from(3888u32));
        for n in 1..=10 {
            assert_eq!(exponent_r(n, 1), BigUint::one());
        }
        for n in 1..=40 {
            assert_eq!(exponent_r(n, 2), BigUint::from(2u32) * num::pow(BigUint::from(3u32), (n - 1) as usize));
        }
        assert_eq!(holder_exponent_for(2, 2).alpha, BigUint::from(3888u32));
        assert_eq!(holder_exponent_for(3, 3).alpha, BigUint::from(19_131_876u32));
        let affine = holder_exponent_for(1, 1);
        assert_eq!(affine.alpha, BigUint::from(6u32));
        assert!(affine.affine_branch);
        assert_eq!(affine.global_alpha, BigUint::one());
        assert_eq!(naive_exponent_for(2, 2), BigUint::from(1_244_160u32));
        assert_eq!(naive_exponent_for(1, 1), BigUint::from(108u32));
    }

    #[test]
    fn naive_dominates_holder() {
        for n in 1..=6 {
            for d in 1..=6 {
                assert!(naive_exponent_for(n, d) >= holder_exponent_for(n, d).alpha, "n={n} d={d}");
            }
        }
    }

    #[test]
    fn huge_exponents_are_exact() {
        let r = exponent_r(200, 7);
        assert_eq!(r, BigUint::from(7u32) * num::pow(BigUint::from(18u32), 199));
    }

    #[test]
    fn fits_power_laws() {
        let lin: Vec<(f64, f64)> = (1..50).map(|k| (k as f64 * 0.01, k as f64 * 0.01)).collect();
        let fit = empirical_exponent_fit(&lin).unwrap();
        assert_abs_diff_eq!(fit.slope, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.r_squared, 1.0, epsilon = 1e-12);
        let quad: Vec<(f64, f64)> = (1..50).map(|k| (k as f64 * 0.01, 3.0 * (k as f64 * 0.01).powi(2))).collect();
        let fit = empirical_exponent_fit(&quad).unwrap();
        assert_abs_diff_eq!(fit.slope, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.intercept.exp(), 3.0, epsilon = 1e-10);
    }

    #[test]
    fn outlier_is_removed() {
        let mut rng = seeded_rng(5);
        let clean: Vec<(f64, f64)> = (0..200)
            .map(|_| {
                let d: f64 = rand::Rng::random_range(&mut rng, 1e-4..0.1);
                let noise: f64 = rand::Rng::random_range(&mut rng, -0.05..0.05);
                (d, 2.0 * d * noise.exp())
            })
            .collect();
        let base = empirical_exponent_fit(&clean).unwrap();
        let mut dirty = clean.clone();
        dirty.push((1e-4, 1e3));
        let fit = empirical_exponent_fit(&dirty).unwrap();
        assert!(fit.discarded >= 1);
        assert!((fit.slope - base.slope).abs() <= 0.05, "{} vs {}", fit.slope, base.slope);
    }

    #[test]
    fn degenerate_fit_inputs() {
        assert!(empirical_exponent_fit(&[(0.1, 0.1)]).is_err());
        assert!(empirical_exponent_fit(&[(0.1, 0.1), (0.0, 0.2)]).is_err());
        assert!(empirical_exponent_fit(&[(0.1, 0.1), (0.1, 0.2)]).is_err());
        assert!(least_squares_fit(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn identity_pair_has_unit_constant() {
        let inst = PcpInstance::new(PolyMap::identity(2), PolyMap::identity(2)).unwrap();
        let sols = enumerate_solutions(&inst, &SolveConfig::default()).unwrap();
        assert_eq!(sols.len(), 1);
        let region = Region::cube(2, -1.0, 1.0).unwrap();
        let rep = verify_local_bound(&inst, &sols, &region, &BoundSettings::new(2000, rational(1), 1)).unwrap();
        assert_abs_diff_eq!(rep.c_best, 1.0, epsilon = 1e-8);
        let fit = rep.fit.as_ref().unwrap();
        assert_abs_diff_eq!(fit.slope, 1.0, epsilon = 1e-6);
        assert!(rep.violations_at(rep.c_best).is_empty());
        let rep = verify_global_bound(&inst, &sols, &[0.5, 1.0, 10.0, 100.0], &BoundSettings::new(400, rational(1), 2)).unwrap();
        assert_abs_diff_eq!(rep.c_best, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn c_best_has_no_violations_and_bounds_every_sample() {
        let inst = shifted_identity(2);
        let sols = enumerate_solutions(&inst, &SolveConfig::default()).unwrap();
        let region = Region::cube(2, -2.0, 3.0).unwrap();
        let rep = verify_local_bound(&inst, &sols, &region, &BoundSettings::new(3000, rational(2), 4)).unwrap();
        assert!(rep.violations_at(rep.c_best).is_empty());
        for s in &rep.pairs {
            assert!(s.residual >= rep.c_best * s.dist.powi(2) * (1.0 - 1e-9));
        }
        let fit = rep.fit.unwrap();
        assert!((0.9..=1.1).contains(&fit.slope) && fit.r_squared >= 0.95);
    }

    #[test]
    fn two_regime_lhs_is_dist_power_below_one() {
        let s = BoundSample {
            point: vec![0.0],
            dist: 0.3,
            residual: 0.5,
        };
        let lr = log_ratio(&s, 4.0, true).unwrap();
        assert_abs_diff_eq!(lr, 0.5f64.ln() - 4.0 * 0.3f64.ln(), epsilon = 1e-12);
        let far = BoundSample { dist: 3.0, ..s };
        assert_abs_diff_eq!(log_ratio(&far, 4.0, true).unwrap(), 0.5f64.ln() - 3.0f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn huge_alpha_stays_in_log_space() {
        let inst = shifted_identity(2);
        let sols = enumerate_solutions(&inst, &SolveConfig::default()).unwrap();
        let region = Region::cube(2, 0.0, 2.0).unwrap();
        let rep = verify_local_bound(&inst, &sols, &region, &BoundSettings::new(500, rational(3888), 0)).unwrap();
        assert!(rep.log10_c_best.is_finite());
        assert!(rep.log10_c_best < -100.0);
        assert_eq!(rep.c_best, 0.0);
    }

    #[test]
    fn global_failure_example_drives_constant_to_zero() {
        let map = example_global_failure();
        let inst = PcpInstance::new(map.clone(), map).unwrap();
        let sols = enumerate_solutions(&inst, &SolveConfig::default()).unwrap();
        assert_eq!(sols.len(), 1);
        let mut settings = BoundSettings::new(400, rational(1), 0);
        settings.extra_points = [10.0, 100.0, 1000.0].iter().map(|&k| vec![k, 1.0 / k]).collect();
        settings.claimed_c = Some(0.02);
        let rep = verify_global_bound(&inst, &sols, &[1.0, 5.0], &settings).unwrap();
        assert!(rep.c_best < 0.002);
        assert!(rep.flags.iter().any(|f| f == "claimed_constant_violated"));
        assert!(rep.violations.iter().any(|v| v.point == vec![1000.0, 1e-3]));
    }

    #[test]
    fn growth_profile_of_r0_instance() {
        let prof = growth_ratio_profile(&shifted_identity(2), &[5.0, 10.0, 50.0, 100.0, 500.0], 500, 3).unwrap();
        assert!(prof.nondecreasing_within_noise);
        assert!(prof.min_ratio.iter().all(|&r| r > 0.0));
    }
}
