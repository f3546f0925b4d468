use crate::error::{check_dim, PcpError, Result};
use crate::poly::{Jacobian, PolyMap};

/// The data `(f, g)` of a polynomial complementarity problem
/// `f(x) ≥ 0, g(x) ≥ 0, <f(x), g(x)> = 0`.
#[derive(Clone, Debug)]
pub struct PcpInstance {
    f: PolyMap,
    g: PolyMap,
    df: Jacobian,
    dg: Jacobian,
}

impl PcpInstance {
    pub fn new(f: PolyMap, g: PolyMap) -> Result<Self> {
        check_dim(f.arity(), g.arity())?;
        if f.degree() == 0 || g.degree() == 0 {
            return Err(PcpError::InvalidInput(format!(
                "both maps need positive degree (got d_f = {}, d_g = {})",
                f.degree(),
                g.degree()
            )));
        }
        let df = f.derivative();
        let dg = g.derivative();
        Ok(PcpInstance { f, g, df, dg })
    }

    pub fn n(&self) -> usize {
        self.f.arity()
    }

    pub fn f(&self) -> &PolyMap {
        &self.f
    }

    pub fn g(&self) -> &PolyMap {
        &self.g
    }

    pub fn d_f(&self) -> u32 {
        self.f.degree()
    }

    pub fn d_g(&self) -> u32 {
        self.g.degree()
    }

    /// `d = max(d_f, d_g)`.
    pub fn d(&self) -> u32 {
        self.d_f().max(self.d_g())
    }

    pub fn jac_f(&self) -> &Jacobian {
        &self.df
    }

    pub fn jac_g(&self) -> &Jacobian {
        &self.dg
    }

    /// `(f(x), g(x))` without a dimension check.
    pub(crate) fn eval_pair(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        (self.f.eval(x), self.g.eval(x))
    }

    pub fn check_point(&self, x: &[f64]) -> Result<()> {
        check_dim(self.n(), x.len())
    }

    /// The instance `(f^∞, g^∞)` of map-level leading terms.
    pub fn leading_pair(&self) -> Result<PcpInstance> {
        PcpInstance::new(self.f.leading_term_map()?, self.g.leading_term_map()?)
    }

    /// The instance of componentwise leading terms, each component taken
    /// at its own degree.
    pub fn componentwise_leading_pair(&self) -> Result<PcpInstance> {
        let lf = leading_componentwise(&self.f)?;
        let lg = leading_componentwise(&self.g)?;
        PcpInstance::new(lf, lg)
    }
}

fn leading_componentwise(map: &PolyMap) -> Result<PolyMap> {
    let degrees: Vec<u32> = map.component_degrees().iter().map(|&d| d.max(1)).collect();
    map.leading_terms_componentwise(&degrees)
}
