//! Lemke's complementary pivoting for the LCP `w = Mz + q, z ≥ 0, w ≥ 0,
//! <z, w> = 0`, with covering vector of ones and a lexicographic ratio test.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{check_dim, PcpError, Result};

const PIVOT_EPS: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum LemkeOutcome {
    /// `q ≥ 0`, so `z = 0` solves the problem.
    Trivial { z: Vec<f64> },
    Solution { z: Vec<f64>, pivots: usize },
    /// The entering column has no positive entry: no solution is reached
    /// along this path.
    RayTermination { pivots: usize },
}

impl LemkeOutcome {
    pub fn solution(&self) -> Option<&[f64]> {
        match self {
            LemkeOutcome::Trivial { z } | LemkeOutcome::Solution { z, .. } => Some(z),
            LemkeOutcome::RayTermination { .. } => None,
        }
    }
}

/// Variable labels: `0..n` are `w`, `n..2n` are `z`, `2n` is the artificial `z0`.
struct Tableau {
    n: usize,
    rows: DMatrix<f64>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn new(m: &DMatrix<f64>, q: &[f64]) -> Self {
        let n = q.len();
        let mut rows = DMatrix::zeros(n, 2 * n + 1);
        for i in 0..n {
            rows[(i, i)] = 1.0;
            for j in 0..n {
                rows[(i, n + j)] = -m[(i, j)];
            }
            rows[(i, 2 * n)] = -1.0;
        }
        Tableau {
            n,
            rows,
            rhs: q.to_vec(),
            basis: (0..n).collect(),
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[(r, c)];
        let width = self.rows.ncols();
        for j in 0..width {
            self.rows[(r, j)] /= p;
        }
        self.rhs[r] /= p;
        for i in 0..self.n {
            if i == r {
                continue;
            }
            let factor = self.rows[(i, c)];
            if factor == 0.0 {
                continue;
            }
            for j in 0..width {
                self.rows[(i, j)] -= factor * self.rows[(r, j)];
            }
            self.rhs[i] -= factor * self.rhs[r];
        }
        self.basis[r] = c;
    }

    /// Lexicographic minimum ratio test on column `c`. Rows are compared by
    /// `(rhs_i, B^{-1}_i) / a_ic`; the artificial variable leaves on ties.
    fn leaving_row(&self, c: usize) -> Option<usize> {
        let n = self.n;
        let scale = (0..n).map(|i| self.rows[(i, c)].abs()).fold(0.0, f64::max);
        let candidates: Vec<usize> = (0..n).filter(|&i| self.rows[(i, c)] > PIVOT_EPS * scale.max(1.0)).collect();
        if candidates.is_empty() {
            return None;
        }
        let key = |i: usize, k: usize| -> f64 {
            let a = self.rows[(i, c)];
            if k == 0 {
                self.rhs[i] / a
            } else {
                self.rows[(i, k - 1)] / a
            }
        };
        let mut best = candidates.clone();
        for k in 0..=n {
            let min = best.iter().map(|&i| key(i, k)).fold(f64::INFINITY, f64::min);
            let tol = 1e-12 * min.abs().max(1.0);
            best.retain(|&i| key(i, k) <= min + tol);
            if let Some(&r) = best.iter().find(|&&i| self.basis[i] == 2 * n) {
                return Some(r);
            }
            if best.len() == 1 {
                break;
            }
        }
        best.first().copied()
    }
}

/// Default pivot budget for an `n`-dimensional problem.
pub fn default_pivot_budget(n: usize) -> usize {
    1000 + 100 * n * n
}

pub fn lemke_lcp(m: &DMatrix<f64>, q: &[f64]) -> Result<LemkeOutcome> {
    lemke_lcp_with_budget(m, q, default_pivot_budget(q.len()))
}

pub fn lemke_lcp_with_budget(m: &DMatrix<f64>, q: &[f64], budget: usize) -> Result<LemkeOutcome> {
    let n = q.len();
    check_dim(n, m.nrows())?;
    check_dim(n, m.ncols())?;
    if q.iter().any(|v| !v.is_finite()) || m.iter().any(|v| !v.is_finite()) {
        return Err(PcpError::InvalidInput("LCP data must be finite".into()));
    }
    if q.iter().all(|&v| v >= 0.0) {
        return Ok(LemkeOutcome::Trivial { z: vec![0.0; n] });
    }

    let mut t = Tableau::new(m, q);
    // Most negative q_i leaves; on ties the lexicographic rule picks the
    // largest index.
    let mut r = 0;
    for i in 0..n {
        if q[i] <= q[r] {
            r = i;
        }
    }
    let mut leaving = t.basis[r];
    t.pivot(r, 2 * n);
    let mut pivots = 1;

    loop {
        if pivots >= budget {
            return Err(PcpError::PivotBudget { budget });
        }
        let entering = if leaving < n { leaving + n } else { leaving - n };
        let Some(r) = t.leaving_row(entering) else {
            return Ok(LemkeOutcome::RayTermination { pivots });
        };
        leaving = t.basis[r];
        t.pivot(r, entering);
        pivots += 1;
        if leaving == 2 * n {
            let mut z = vec![0.0; n];
            for (i, &b) in t.basis.iter().enumerate() {
                if (n..2 * n).contains(&b) {
                    z[b - n] = t.rhs[i].max(0.0);
                }
            }
            return Ok(LemkeOutcome::Solution { z, pivots });
        }
    }
}
