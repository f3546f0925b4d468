//! Residual functions of a complementarity problem: the natural map
//! `m(x) = min{f(x), g(x)}`, the index-set residuals `Φ_I`, the
//! square-root residual `r`, and the scalar inequality relating them.

use nalgebra::DMatrix;

use crate::error::Result;
use crate::index_set::{guard, IndexSet};
use crate::instance::PcpInstance;

/// `[-a]_+ = max(-a, 0)`.
#[inline]
pub fn neg_part(a: f64) -> f64 {
    (-a).max(0.0)
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub(crate) fn componentwise_min(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x.min(*y)).collect()
}

/// `m(x) = min{f(x), g(x)}` componentwise.
pub fn natural_map(inst: &PcpInstance, x: &[f64]) -> Result<Vec<f64>> {
    inst.check_point(x)?;
    let (fx, gx) = inst.eval_pair(x);
    Ok(componentwise_min(&fx, &gx))
}

/// `‖m(x)‖` without a dimension check.
pub(crate) fn natural_residual(inst: &PcpInstance, x: &[f64]) -> f64 {
    let (fx, gx) = inst.eval_pair(x);
    norm(&componentwise_min(&fx, &gx))
}

/// Generalized Jacobian of `m` at `x`: row `i` is taken from `f_i` when
/// `f_i(x) ≤ g_i(x)` and from `g_i` otherwise.
pub fn natural_map_jacobian(inst: &PcpInstance, x: &[f64]) -> Result<DMatrix<f64>> {
    inst.check_point(x)?;
    Ok(branch_jacobian(inst, x, None))
}

pub(crate) fn branch_jacobian(inst: &PcpInstance, x: &[f64], values: Option<(&[f64], &[f64])>) -> DMatrix<f64> {
    let n = inst.n();
    let owned;
    let (fx, gx) = match values {
        Some(v) => v,
        None => {
            owned = inst.eval_pair(x);
            (owned.0.as_slice(), owned.1.as_slice())
        }
    };
    let mut jac = DMatrix::zeros(n, n);
    for i in 0..n {
        let row = if fx[i] <= gx[i] {
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

/// `Φ_I` from precomputed values `f(x)`, `g(x)`.
pub fn phi_from_values(fx: &[f64], gx: &[f64], set: IndexSet) -> f64 {
    fx.iter()
        .zip(gx)
        .enumerate()
        .map(|(i, (&a, &b))| {
            if set.contains(i) {
                a.abs() + neg_part(b)
            } else {
                neg_part(a) + b.abs()
            }
        })
        .sum()
}

/// `Φ_I(x) = Σ_{i∈I} (|f_i| + [-g_i]_+) + Σ_{i∉I} ([-f_i]_+ + |g_i|)`.
pub fn phi_i(inst: &PcpInstance, set: IndexSet, x: &[f64]) -> Result<f64> {
    inst.check_point(x)?;
    set.check(inst.n())?;
    let (fx, gx) = inst.eval_pair(x);
    Ok(phi_from_values(&fx, &gx, set))
}

/// Minimum of `Φ_I(x)` over all subsets `I`, with the graded-lex smallest
/// minimizing subset.
///
/// `Φ_I` is a sum of per-index terms, so the minimum is attained by putting
/// `i` into `I` exactly when its `I`-term is strictly smaller than its
/// complement term; leaving ties out yields the unique minimizer of least
/// cardinality, which is the graded-lex smallest one.
pub fn min_phi(inst: &PcpInstance, x: &[f64]) -> Result<(f64, IndexSet)> {
    guard(inst.n())?;
    inst.check_point(x)?;
    let (fx, gx) = inst.eval_pair(x);
    let mut set = IndexSet::empty();
    for i in 0..inst.n() {
        let inside = fx[i].abs() + neg_part(gx[i]);
        let outside = neg_part(fx[i]) + gx[i].abs();
        if inside < outside {
            set.insert(i);
        }
    }
    Ok((phi_from_values(&fx, &gx, set), set))
}

/// `r(x) = Σ_i ([-f_i]_+ + [-g_i]_+ + sqrt|f_i g_i|)`.
pub fn r_residual(inst: &PcpInstance, x: &[f64]) -> Result<f64> {
    inst.check_point(x)?;
    let (fx, gx) = inst.eval_pair(x);
    Ok(fx
        .iter()
        .zip(&gx)
        .map(|(&a, &b)| neg_part(a) + neg_part(b) + (a * b).abs().sqrt())
        .sum())
}

/// Both sides of `min{|a| + [-b]_+, [-a]_+ + |b|} ≤ 2|min{a, b}|`.
pub fn scalar_min_bound(a: f64, b: f64) -> (f64, f64) {
    let lhs = (a.abs() + neg_part(b)).min(neg_part(a) + b.abs());
    let rhs = 2.0 * a.min(b).abs();
    (lhs, rhs)
}

/// `m^∞(x) = min{f^∞(x), g^∞(x)}` using map-level leading terms.
pub fn leading_min_map(inst: &PcpInstance, x: &[f64]) -> Result<Vec<f64>> {
    inst.check_point(x)?;
    let lead = inst.leading_pair()?;
    natural_map(&lead, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index_set::graded_lex_subsets;
    use crate::poly::tests::{example_global_failure, poly};
    use crate::poly::PolyMap;
    use crate::sampling::seeded_rng;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn shifted_identity(n: usize, c: f64) -> PcpInstance {
        let f = PolyMap::identity(n);
        let g = f.shift(&vec![c; n]).unwrap();
        PcpInstance::new(f, g).unwrap()
    }

    #[test]
    fn natural_map_examples() {
        let ex = example_global_failure();
        let inst = PcpInstance::new(ex.clone(), ex.clone()).unwrap();
        let x = [0.3, -1.7];
        assert_eq!(natural_map(&inst, &x).unwrap(), ex.eval(&x));

        let inst = shifted_identity(1, -1.0);
        assert_eq!(natural_map(&inst, &[0.5]).unwrap(), vec![-0.5]);

        let inst = PcpInstance::new(ex.clone(), ex).unwrap();
        for k in [1.0, 2.0, 10.0, 1000.0] {
            let m = natural_map(&inst, &[k, 1.0 / k]).unwrap();
            assert!((m[0] - (1.0 / k - 1.0)).abs() < 1e-15);
            assert!(m[1].abs() < 1e-12);
        }
    }

    #[test]
    fn natural_map_zero_iff_complementary() {
        let inst = shifted_identity(2, -1.0);
        let sol = [1.0, 1.0];
        assert_eq!(norm(&natural_map(&inst, &sol).unwrap()), 0.0);
        for x in [[0.0, 1.0], [1.0, 2.0], [-1.0, 1.0]] {
            let (fx, gx) = inst.eval_pair(&x);
            let complementary = fx.iter().all(|&v| v >= 0.0) && gx.iter().all(|&v| v >= 0.0) && dot(&fx, &gx) == 0.0;
            assert!(!complementary);
            assert!(norm(&natural_map(&inst, &x).unwrap()) > 0.0);
        }
    }

    #[test]
    fn phi_examples() {
        let inst = shifted_identity(1, -1.0);
        assert_eq!(phi_i(&inst, IndexSet::empty(), &[0.5]).unwrap(), 0.5);
        assert_eq!(phi_i(&inst, IndexSet::full(1), &[0.5]).unwrap(), 1.0);
        assert_eq!(phi_i(&inst, IndexSet::empty(), &[1.0]).unwrap(), 0.0);
        assert!(phi_i(&inst, IndexSet::from_indices(2, &[1]).unwrap(), &[0.5]).is_err());

        assert_eq!(min_phi(&inst, &[0.5]).unwrap(), (0.5, IndexSet::empty()));
        assert_eq!(min_phi(&inst, &[1.0]).unwrap(), (0.0, IndexSet::empty()));

        let ex = example_global_failure();
        let inst = PcpInstance::new(ex.clone(), ex).unwrap();
        let (v, _) = min_phi(&inst, &[1.0, 1.0]).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn min_phi_ties_pick_smallest_subset() {
        // f = g: every index ties, so the empty set wins.
        let ex = example_global_failure();
        let inst = PcpInstance::new(ex.clone(), ex).unwrap();
        assert_eq!(min_phi(&inst, &[3.0, -2.0]).unwrap().1, IndexSet::empty());
    }

    fn random_instance(n: usize, seed: u64) -> PcpInstance {
        let mut rng = seeded_rng(seed);
        let mut comps = |deg: u32| {
            let mut cs = Vec::new();
            for _ in 0..n {
                let mut terms = Vec::new();
                for e in crate::genericity::exponents_up_to(n, deg) {
                    let c: f64 = rng.sample(StandardNormal);
                    terms.push((crate::poly::Monomial::new(e), c));
                }
                cs.push(crate::poly::Polynomial::from_terms(n, terms).unwrap());
            }
            PolyMap::new(cs).unwrap()
        };
        let f = comps(2);
        let g = comps(2);
        PcpInstance::new(f, g).unwrap()
    }

    #[test]
    fn min_phi_matches_exhaustive_enumeration() {
        for (seed, n) in [(1u64, 1usize), (2, 2), (3, 3), (4, 4)] {
            let inst = random_instance(n, seed);
            let mut rng = seeded_rng(100 + seed);
            for _ in 0..500 {
                let x: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
                let (fx, gx) = inst.eval_pair(&x);
                let mut best = (f64::INFINITY, IndexSet::empty());
                for s in graded_lex_subsets(n) {
                    let v = phi_from_values(&fx, &gx, s);
                    if v < best.0 {
                        best = (v, s);
                    }
                }
                let (v, s) = min_phi(&inst, &x).unwrap();
                assert!((v - best.0).abs() <= 1e-12 * best.0.max(1.0));
                assert_eq!(s, best.1);
                let m = norm(&natural_map(&inst, &x).unwrap());
                assert!(m <= v * (1.0 + 1e-12));
                assert!(v <= 2.0 * (n as f64).sqrt() * m * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn r_residual_examples() {
        let ex = example_global_failure();
        let inst = PcpInstance::new(ex.clone(), ex).unwrap();
        assert_eq!(r_residual(&inst, &[1.0, 1.0]).unwrap(), 0.0);
        let inst = shifted_identity(1, -1.0);
        assert_eq!(r_residual(&inst, &[0.5]).unwrap(), 1.0);
    }

    #[test]
    fn r_residual_dominates_natural_residual() {
        let inst = random_instance(3, 9);
        let mut rng = seeded_rng(10);
        for _ in 0..10_000 {
            let x: Vec<f64> = (0..3).map(|_| rng.random_range(-4.0..4.0)).collect();
            let r = r_residual(&inst, &x).unwrap();
            let m = norm(&natural_map(&inst, &x).unwrap());
            assert!(r >= m * (1.0 - 1e-12), "r = {r}, m = {m}");
        }
    }

    #[test]
    fn scalar_bound_examples() {
        assert_eq!(scalar_min_bound(1.0, -2.0), (2.0, 4.0));
        assert_eq!(scalar_min_bound(0.0, 0.0), (0.0, 0.0));
    }

    #[test]
    fn scalar_bound_grid() {
        for i in 0..=100 {
            for j in 0..=100 {
                let a = -5.0 + 0.1 * i as f64;
                let b = -5.0 + 0.1 * j as f64;
                let (l, r) = scalar_min_bound(a, b);
                assert!(l <= r, "({a}, {b}): {l} > {r}");
            }
        }
    }

    #[test]
    fn leading_min_map_examples() {
        let inst = shifted_identity(2, -1.0);
        assert_eq!(leading_min_map(&inst, &[0.4, -2.0]).unwrap(), vec![0.4, -2.0]);

        let ex = example_global_failure();
        let inst = PcpInstance::new(ex.clone(), ex).unwrap();
        assert_eq!(leading_min_map(&inst, &[2.0, 3.0]).unwrap(), vec![0.0, 6.0]);

        let h = PolyMap::new(vec![poly(2, &[(1.0, &[2, 0])]), poly(2, &[(1.0, &[1, 1])])]).unwrap();
        let inst = PcpInstance::new(h.clone(), h.clone()).unwrap();
        assert_eq!(leading_min_map(&inst, &[1.5, -0.5]).unwrap(), h.eval(&[1.5, -0.5]));
    }

    #[test]
    fn branch_jacobian_prefers_f_on_ties() {
        let f = PolyMap::identity(1);
        let g = f.scale(2.0);
        let inst = PcpInstance::new(f, g).unwrap();
        assert_eq!(natural_map_jacobian(&inst, &[0.0]).unwrap()[(0, 0)], 1.0);
        assert_eq!(natural_map_jacobian(&inst, &[-1.0]).unwrap()[(0, 0)], 2.0);
    }
}
