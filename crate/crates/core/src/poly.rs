//! Sparse multivariate polynomials and polynomial maps `R^n -> R^n`.
//!
//! Terms are kept in a `BTreeMap` keyed by [`Monomial`], whose ordering is
//! graded lexicographic. Iteration through [`Polynomial::terms`] yields the
//! canonical order (highest graded-lex monomial first), which is also the
//! order used by serialization.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;

use crate::error::{check_dim, PcpError, Result};

/// Smallest non-zero coefficient magnitude accepted at construction.
pub const MIN_COEFFICIENT: f64 = 1e-300;

/// Exponent vector of a monomial `x^κ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    /// The constant monomial `1` in `arity` variables.
    pub fn one(arity: usize) -> Self {
        Monomial(vec![0; arity])
    }

    /// The monomial `x_j`.
    pub fn var(arity: usize, j: usize) -> Self {
        let mut e = vec![0; arity];
        e[j] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    /// Total degree `|κ|`.
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(x)
            .filter(|(&e, _)| e > 0)
            .map(|(&e, &xi)| xi.powi(e as i32))
            .product()
    }

    /// Partial derivative with respect to `x_j`, as `(multiplier, monomial)`.
    pub fn derivative(&self, j: usize) -> Option<(u32, Monomial)> {
        let e = self.0[j];
        if e == 0 {
            return None;
        }
        let mut d = self.0.clone();
        d[j] -= 1;
        Some((e, Monomial(d)))
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn check_coefficient(c: f64) -> Result<()> {
    if !c.is_finite() {
        return Err(PcpError::InvalidInput(format!("non-finite coefficient {c}")));
    }
    if c != 0.0 && c.abs() < MIN_COEFFICIENT {
        return Err(PcpError::TinyCoefficient(c));
    }
    Ok(())
}

/// A real polynomial in `arity` variables with no stored zero coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    arity: usize,
    terms: BTreeMap<Monomial, f64>,
}

impl Polynomial {
    pub fn zero(arity: usize) -> Self {
        Polynomial {
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(arity: usize, c: f64) -> Result<Self> {
        Self::from_terms(arity, [(Monomial::one(arity), c)])
    }

    /// The coordinate polynomial `x_j`.
    pub fn variable(arity: usize, j: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::var(arity, j), 1.0);
        Polynomial { arity, terms }
    }

    /// Builds a polynomial from `(monomial, coefficient)` pairs. Repeated
    /// monomials are summed and zero coefficients dropped.
    pub fn from_terms<I>(arity: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, f64)>,
    {
        let mut map: BTreeMap<Monomial, f64> = BTreeMap::new();
        for (m, c) in terms {
            check_dim(arity, m.arity())?;
            check_coefficient(c)?;
            *map.entry(m).or_insert(0.0) += c;
        }
        for c in map.values() {
            check_coefficient(*c)?;
        }
        map.retain(|_, c| *c != 0.0);
        Ok(Polynomial { arity, terms: map })
    }

    fn from_map_lossy(arity: usize, mut terms: BTreeMap<Monomial, f64>) -> Self {
        terms.retain(|_, c| c.abs() >= MIN_COEFFICIENT);
        Polynomial { arity, terms }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; the zero polynomial has degree 0.
    pub fn degree(&self) -> u32 {
        self.terms.keys().next_back().map_or(0, Monomial::degree)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in canonical order (descending graded lex).
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, f64)> + '_ {
        self.terms.iter().rev().map(|(m, &c)| (m, c))
    }

    pub fn coefficient(&self, m: &Monomial) -> f64 {
        self.terms.get(m).copied().unwrap_or(0.0)
    }

    /// Evaluates without checking the length of `x`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|(m, c)| c * m.eval(x)).sum()
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.arity, x.len())?;
        Ok(self.eval(x))
    }

    pub fn derivative(&self, j: usize) -> Polynomial {
        let mut out: BTreeMap<Monomial, f64> = BTreeMap::new();
        for (m, &c) in &self.terms {
            if let Some((k, dm)) = m.derivative(j) {
                *out.entry(dm).or_insert(0.0) += c * k as f64;
            }
        }
        Self::from_map_lossy(self.arity, out)
    }

    /// Homogeneous part of total degree `k` (possibly zero).
    pub fn homogeneous_part(&self, k: u32) -> Polynomial {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.degree() == k)
            .map(|(m, &c)| (m.clone(), c))
            .collect();
        Polynomial {
            arity: self.arity,
            terms,
        }
    }

    pub fn is_homogeneous_of_degree(&self, k: u32) -> bool {
        self.terms.keys().all(|m| m.degree() == k)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.arity, other.arity, "arity mismatch in add");
        let mut out = self.terms.clone();
        for (m, &c) in &other.terms {
            *out.entry(m.clone()).or_insert(0.0) += c;
        }
        Self::from_map_lossy(self.arity, out)
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Polynomial {
        let terms = self.terms.iter().map(|(m, &c)| (m.clone(), c * s)).collect();
        Self::from_map_lossy(self.arity, terms)
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.arity, other.arity, "arity mismatch in mul");
        let mut out: BTreeMap<Monomial, f64> = BTreeMap::new();
        for (a, &ca) in &self.terms {
            for (b, &cb) in &other.terms {
                *out.entry(a.mul(b)).or_insert(0.0) += ca * cb;
            }
        }
        Self::from_map_lossy(self.arity, out)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            for (j, &e) in m.exponents().iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*x{}", j + 1)?,
                    _ => write!(f, "*x{}^{}", j + 1, e)?,
                }
            }
        }
        Ok(())
    }
}

/// A square polynomial map `R^n -> R^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMap {
    arity: usize,
    components: Vec<Polynomial>,
}

impl PolyMap {
    pub fn new(components: Vec<Polynomial>) -> Result<Self> {
        let arity = components.len();
        if arity == 0 {
            return Err(PcpError::InvalidInput("polynomial map needs at least one component".into()));
        }
        for p in &components {
            check_dim(arity, p.arity())?;
        }
        Ok(PolyMap { arity, components })
    }

    pub fn identity(n: usize) -> Self {
        PolyMap {
            arity: n,
            components: (0..n).map(|j| Polynomial::variable(n, j)).collect(),
        }
    }

    pub fn zero(n: usize) -> Self {
        PolyMap {
            arity: n,
            components: vec![Polynomial::zero(n); n],
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &Polynomial {
        &self.components[i]
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Polynomial::is_zero)
    }

    /// Map degree: the maximum component degree.
    pub fn degree(&self) -> u32 {
        self.components.iter().map(Polynomial::degree).max().unwrap_or(0)
    }

    pub fn component_degrees(&self) -> Vec<u32> {
        self.components.iter().map(Polynomial::degree).collect()
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.components.iter().map(|p| p.eval(x)).collect()
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.arity, x.len())?;
        Ok(self.eval(x))
    }

    /// Symbolic Jacobian, ready for repeated evaluation.
    pub fn derivative(&self) -> Jacobian {
        let entries = self
            .components
            .iter()
            .map(|p| (0..self.arity).map(|j| p.derivative(j)).collect())
            .collect();
        Jacobian {
            arity: self.arity,
            entries,
        }
    }

    pub fn jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        check_dim(self.arity, x.len())?;
        Ok(self.derivative().eval(x))
    }

    /// Homogeneous part of degree `d = degree()` of the whole map.
    /// Components of lower degree become zero.
    pub fn leading_term_map(&self) -> Result<PolyMap> {
        if self.is_zero() {
            return Err(PcpError::Degenerate("leading term of the zero map".into()));
        }
        let d = self.degree();
        Ok(PolyMap {
            arity: self.arity,
            components: self.components.iter().map(|p| p.homogeneous_part(d)).collect(),
        })
    }

    /// Per-component homogeneous part of degree `degrees[i]`.
    pub fn leading_terms_componentwise(&self, degrees: &[u32]) -> Result<PolyMap> {
        check_dim(self.arity, degrees.len())?;
        let mut components = Vec::with_capacity(self.arity);
        for (i, (p, &di)) in self.components.iter().zip(degrees).enumerate() {
            if di == 0 {
                return Err(PcpError::InvalidInput(format!("degree for component {i} must be positive")));
            }
            if di < p.degree() {
                return Err(PcpError::InvalidInput(format!(
                    "degree {di} for component {i} is below its actual degree {}",
                    p.degree()
                )));
            }
            components.push(p.homogeneous_part(di));
        }
        Ok(PolyMap {
            arity: self.arity,
            components,
        })
    }

    pub fn add(&self, other: &PolyMap) -> PolyMap {
        PolyMap {
            arity: self.arity,
            components: self.components.iter().zip(&other.components).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, other: &PolyMap) -> PolyMap {
        PolyMap {
            arity: self.arity,
            components: self.components.iter().zip(&other.components).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> PolyMap {
        PolyMap {
            arity: self.arity,
            components: self.components.iter().map(|p| p.scale(s)).collect(),
        }
    }

    /// Adds the constant vector `c` componentwise.
    pub fn shift(&self, c: &[f64]) -> Result<PolyMap> {
        check_dim(self.arity, c.len())?;
        let mut components = Vec::with_capacity(self.arity);
        for (p, &ci) in self.components.iter().zip(c) {
            components.push(p.add(&Polynomial::constant(self.arity, ci)?));
        }
        Ok(PolyMap {
            arity: self.arity,
            components,
        })
    }

    /// Affine map `x -> M x + q` with `M` given row-major.
    pub fn affine(m: &DMatrix<f64>, q: &[f64]) -> Result<PolyMap> {
        let n = q.len();
        if m.nrows() != n || m.ncols() != n {
            return Err(PcpError::DimensionMismatch { expected: n, got: m.nrows() });
        }
        let mut components = Vec::with_capacity(n);
        for i in 0..n {
            let mut terms: Vec<(Monomial, f64)> = (0..n).map(|j| (Monomial::var(n, j), m[(i, j)])).collect();
            terms.push((Monomial::one(n), q[i]));
            components.push(Polynomial::from_terms(n, terms)?);
        }
        PolyMap::new(components)
    }
}

/// Matrix of partial derivatives `∂f_i/∂x_j`.
#[derive(Clone, Debug)]
pub struct Jacobian {
    arity: usize,
    entries: Vec<Vec<Polynomial>>,
}

impl Jacobian {
    pub fn eval(&self, x: &[f64]) -> DMatrix<f64> {
        DMatrix::from_fn(self.arity, self.arity, |i, j| self.entries[i][j].eval(x))
    }

    /// Row `i` of the Jacobian at `x`.
    pub fn eval_row(&self, i: usize, x: &[f64]) -> Vec<f64> {
        self.entries[i].iter().map(|p| p.eval(x)).collect()
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// Builds a polynomial from `(coefficient, exponents)` pairs.
    pub(crate) fn poly(n: usize, terms: &[(f64, &[u32])]) -> Polynomial {
        Polynomial::from_terms(n, terms.iter().map(|(c, e)| (Monomial::new(e.to_vec()), *c))).unwrap()
    }

    /// `(y - 1, xy - 1)`
    pub(crate) fn example_global_failure() -> PolyMap {
        PolyMap::new(vec![
            poly(2, &[(1.0, &[0, 1]), (-1.0, &[0, 0])]),
            poly(2, &[(1.0, &[1, 1]), (-1.0, &[0, 0])]),
        ])
        .unwrap()
    }

    /// `(x, xy - 1)`
    pub(crate) fn example_no_solution() -> PolyMap {
        PolyMap::new(vec![
            poly(2, &[(1.0, &[1, 0])]),
            poly(2, &[(1.0, &[1, 1]), (-1.0, &[0, 0])]),
        ])
        .unwrap()
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(example_global_failure().evaluate(&[1.0, 1.0]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(PolyMap::zero(3).evaluate(&[1.0, -2.0, 5.0]).unwrap(), vec![0.0; 3]);
        assert_eq!(example_no_solution().evaluate(&[2.0, 3.0]).unwrap(), vec![2.0, 5.0]);
    }

    #[test]
    fn evaluate_rejects_wrong_dimension() {
        let err = example_no_solution().evaluate(&[1.0]).unwrap_err();
        assert_eq!(err, PcpError::DimensionMismatch { expected: 2, got: 1 });
        assert!(example_no_solution().jacobian(&[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn jacobian_examples() {
        let j = example_no_solution().jacobian(&[2.0, 3.0]).unwrap();
        assert_eq!(j, DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 3.0, 2.0]));
        let id = PolyMap::identity(3).jacobian(&[0.3, -1.0, 7.0]).unwrap();
        assert_eq!(id, DMatrix::identity(3, 3));
    }

    #[test]
    fn leading_term_examples() {
        let lt = example_global_failure().leading_term_map().unwrap();
        assert!(lt.component(0).is_zero());
        assert_eq!(lt.component(1), &poly(2, &[(1.0, &[1, 1])]));

        assert_eq!(PolyMap::identity(2).leading_term_map().unwrap(), PolyMap::identity(2));

        let f = PolyMap::new(vec![
            poly(2, &[(1.0, &[2, 0]), (1.0, &[1, 0])]),
            poly(2, &[(1.0, &[0, 2]), (-1.0, &[0, 0])]),
        ])
        .unwrap();
        let lt = f.leading_term_map().unwrap();
        assert_eq!(lt.component(0), &poly(2, &[(1.0, &[2, 0])]));
        assert_eq!(lt.component(1), &poly(2, &[(1.0, &[0, 2])]));
    }

    #[test]
    fn leading_term_of_zero_map_is_degenerate() {
        assert!(matches!(PolyMap::zero(2).leading_term_map(), Err(PcpError::Degenerate(_))));
    }

    #[test]
    fn componentwise_leading_terms() {
        let lt = example_global_failure().leading_terms_componentwise(&[1, 2]).unwrap();
        assert_eq!(lt.component(0), &poly(2, &[(1.0, &[0, 1])]));
        assert_eq!(lt.component(1), &poly(2, &[(1.0, &[1, 1])]));

        let h = PolyMap::new(vec![poly(2, &[(2.0, &[1, 1])]), poly(2, &[(1.0, &[0, 1])])]).unwrap();
        assert_eq!(h.leading_terms_componentwise(&[2, 1]).unwrap(), h);

        let f = PolyMap::new(vec![poly(1, &[(1.0, &[1]), (1.0, &[0])])]).unwrap();
        let lt = f.leading_terms_componentwise(&[3]).unwrap();
        assert!(lt.component(0).is_zero());
        assert_eq!(lt.component(0).degree(), 0);

        assert!(matches!(
            example_global_failure().leading_terms_componentwise(&[1, 1]),
            Err(PcpError::InvalidInput(_))
        ));
    }

    #[test]
    fn construction_rejects_tiny_and_merges_duplicates() {
        let err = Polynomial::from_terms(1, [(Monomial::new(vec![1]), 1e-301)]).unwrap_err();
        assert!(matches!(err, PcpError::TinyCoefficient(_)));

        let p = Polynomial::from_terms(1, [(Monomial::new(vec![1]), 2.0), (Monomial::new(vec![1]), -2.0)]).unwrap();
        assert!(p.is_zero());
        assert!(Polynomial::from_terms(2, [(Monomial::new(vec![1]), 1.0)]).is_err());
    }

    #[test]
    fn canonical_order_is_descending_graded_lex() {
        let p = poly(2, &[(1.0, &[0, 0]), (2.0, &[0, 2]), (3.0, &[1, 0]), (4.0, &[2, 0]), (5.0, &[1, 1])]);
        let order: Vec<Vec<u32>> = p.terms().map(|(m, _)| m.exponents().to_vec()).collect();
        assert_eq!(order, vec![vec![2, 0], vec![1, 1], vec![0, 2], vec![1, 0], vec![0, 0]]);
    }
}
