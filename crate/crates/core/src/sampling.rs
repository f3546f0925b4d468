//! Deterministic sampling helpers: seeded generators, seed splitting,
//! shifted Halton points and uniform sphere/box samples.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use serde::Serialize;

use crate::error::{PcpError, Result};
use crate::residuals::norm;

/// Axis-aligned box `[lo_1, hi_1] × ... × [lo_n, hi_n]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Region {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Region {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(PcpError::InvalidInput("region bounds must be non-empty and of equal length".into()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a.is_finite() && b.is_finite() && a <= b)) {
            return Err(PcpError::InvalidInput("region needs finite bounds with lo <= hi".into()));
        }
        Ok(Region { lo, hi })
    }

    /// The cube `[lo, hi]^n`.
    pub fn cube(n: usize, lo: f64, hi: f64) -> Result<Self> {
        Region::new(vec![lo; n], vec![hi; n])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(v, (a, b))| a <= v && v <= b)
    }

    pub fn sample(&self, rng: &mut SampleRng) -> Vec<f64> {
        box_point(rng, &self.lo, &self.hi)
    }

    pub fn clamp(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(self.lo.iter().zip(&self.hi)).map(|(v, (a, b))| v.clamp(*a, *b)).collect()
    }
}

pub type SampleRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives the seed of stream `index` from `master` (splitmix64 finalizer),
/// so per-task streams do not depend on scheduling.
pub fn split_seed(master: u64, index: u64) -> u64 {
    let mut z = master
        .wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const PRIMES: [u32; 24] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
];

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as u64;
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += (i % b) as f64 * f;
        i /= b;
        f *= inv;
    }
    r
}

/// Halton sequence in `[0,1)^dim` with a seeded Cranley–Patterson shift.
/// Prefixes are stable: the first `k` points do not depend on how many are
/// requested later.
#[derive(Clone, Debug)]
pub struct Halton {
    shift: Vec<f64>,
}

impl Halton {
    pub fn new(dim: usize, seed: u64) -> Self {
        assert!(dim <= PRIMES.len(), "Halton sequence supports up to {} dimensions", PRIMES.len());
        let mut rng = seeded_rng(seed);
        Halton {
            shift: (0..dim).map(|_| rng.random::<f64>()).collect(),
        }
    }

    pub fn point(&self, index: u64) -> Vec<f64> {
        self.shift
            .iter()
            .zip(PRIMES)
            .map(|(s, p)| (radical_inverse(index + 1, p) + s).fract())
            .collect()
    }

    /// Point `index` mapped into the box `[-radius, radius]^dim`.
    pub fn box_point(&self, index: u64, radius: f64) -> Vec<f64> {
        self.point(index).into_iter().map(|u| (2.0 * u - 1.0) * radius).collect()
    }
}

/// Uniform point on the sphere of the given radius centred at the origin.
pub fn sphere_point(rng: &mut SampleRng, n: usize, radius: f64) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let r = norm(&v);
        if r > 1e-12 {
            return v.into_iter().map(|a| a * radius / r).collect();
        }
    }
}

/// Uniform point in the axis-aligned box `[lo, hi]`.
pub fn box_point(rng: &mut SampleRng, lo: &[f64], hi: &[f64]) -> Vec<f64> {
    lo.iter()
        .zip(hi)
        .map(|(&a, &b)| if b > a { rng.random_range(a..b) } else { a })
        .collect()
}
