//! Sturm-Liouville problems after the Eggert change of variable.
//!
//! The original problem `-u'' + q u = lambda rho u` on `(a, b)` is mapped to
//! the real line by a conformal map `phi`. The transformed problem
//! `-v'' + q~ v = lambda (phi')^2 rho(phi) v` is what gets collocated.

use std::fmt;
use std::sync::Arc;

use crate::error::{DescmError, Result};

/// A pure real-valued evaluator shared between threads.
pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Points at which declared parity flags are checked.
const PARITY_SAMPLES: usize = 64;
const PARITY_RANGE: f64 = 3.0;
const PARITY_TOL: f64 = 1e-12;

/// Conformal map `phi` from the real line onto `(a, b)`.
#[derive(Clone)]
pub struct ConformalMap {
    name: String,
    phi: RealFn,
    dphi: RealFn,
    d2phi: Option<RealFn>,
    d3phi: Option<RealFn>,
    is_odd: bool,
}

impl fmt::Debug for ConformalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConformalMap")
            .field("name", &self.name)
            .field("is_odd", &self.is_odd)
            .field("analytic_d2", &self.d2phi.is_some())
            .field("analytic_d3", &self.d3phi.is_some())
            .finish()
    }
}

impl ConformalMap {
    /// A map given by `phi` and `phi'`. Higher derivatives fall back to
    /// central differences of `phi'` unless supplied with
    /// [`ConformalMap::with_higher_derivatives`].
    pub fn new(name: impl Into<String>, phi: RealFn, dphi: RealFn, is_odd: bool) -> Self {
        Self {
            name: name.into(),
            phi,
            dphi,
            d2phi: None,
            d3phi: None,
            is_odd,
        }
    }

    pub fn with_higher_derivatives(mut self, d2phi: RealFn, d3phi: RealFn) -> Self {
        self.d2phi = Some(d2phi);
        self.d3phi = Some(d3phi);
        self
    }

    /// `phi(x) = sinh(x)` with analytic derivatives.
    pub fn sinh() -> Self {
        Self::sinh_numeric().with_higher_derivatives(Arc::new(f64::sinh), Arc::new(f64::cosh))
    }

    /// `phi(x) = sinh(x)` with only `phi'` supplied; exercises the
    /// finite-difference path of [`qtilde_generic`].
    pub fn sinh_numeric() -> Self {
        Self::new("sinh", Arc::new(f64::sinh), Arc::new(f64::cosh), true)
    }

    /// `phi(x) = x`.
    pub fn identity() -> Self {
        Self::new("identity", Arc::new(|x| x), Arc::new(|_| 1.0), true)
            .with_higher_derivatives(Arc::new(|_| 0.0), Arc::new(|_| 0.0))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_odd(&self) -> bool {
        self.is_odd
    }

    pub fn phi(&self, x: f64) -> f64 {
        (self.phi)(x)
    }

    pub fn dphi(&self, x: f64) -> f64 {
        (self.dphi)(x)
    }

    pub fn d2phi(&self, x: f64) -> f64 {
        match &self.d2phi {
            Some(f) => f(x),
            None => {
                let step = 1e-5 * x.abs().max(1.0);
                (self.dphi(x + step) - self.dphi(x - step)) / (2.0 * step)
            }
        }
    }

    pub fn d3phi(&self, x: f64) -> f64 {
        match &self.d3phi {
            Some(f) => f(x),
            None => {
                // Second difference: roundoff scales like eps / step^2, so the
                // step is larger than the first-derivative one.
                let step = 1e-4 * x.abs().max(1.0);
                (self.dphi(x + step) - 2.0 * self.dphi(x) + self.dphi(x - step)) / (step * step)
            }
        }
    }
}

/// `q~(x) = -sqrt(phi') d/dx[(1/phi') d/dx sqrt(phi')] + (phi')^2 q(phi(x))`.
///
/// Expanded, the derivative term is `-phi'''/(2 phi') + (3/4) (phi''/phi')^2`.
pub fn qtilde_generic(map: &ConformalMap, q: &dyn Fn(f64) -> f64, x: f64) -> Result<f64> {
    let value = qtilde_unchecked(map, q, x);
    if value.is_finite() {
        Ok(value)
    } else {
        Err(DescmError::NonFinite {
            what: "transformed potential",
            x,
            value,
        })
    }
}

fn qtilde_unchecked(map: &ConformalMap, q: &dyn Fn(f64) -> f64, x: f64) -> f64 {
    let d1 = map.dphi(x);
    let d2 = map.d2phi(x);
    let d3 = map.d3phi(x);
    let ratio = d2 / d1;
    -d3 / (2.0 * d1) + 0.75 * ratio * ratio + d1 * d1 * q(map.phi(x))
}

/// Even polynomial potential `V(x) = sum_{i=1}^m c_i x^(2i)` with `c_m > 0`, `m >= 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnharmonicPotential {
    coeffs: Vec<f64>,
}

impl AnharmonicPotential {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(DescmError::InvalidPotential(format!(
                "need at least two coefficients (m >= 2), got {}",
                coeffs.len()
            )));
        }
        if let Some(bad) = coeffs.iter().find(|c| !c.is_finite()) {
            return Err(DescmError::InvalidPotential(format!(
                "coefficient {bad} is not finite"
            )));
        }
        let lead = *coeffs.last().unwrap();
        if lead <= 0.0 {
            return Err(DescmError::InvalidPotential(format!(
                "leading coefficient must be positive, got {lead}"
            )));
        }
        Ok(Self { coeffs })
    }

    /// Coefficients `c_1, ..., c_m`.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Highest power index `m`.
    pub fn m(&self) -> usize {
        self.coeffs.len()
    }

    /// Leading coefficient `c_m`.
    pub fn leading(&self) -> f64 {
        *self.coeffs.last().unwrap()
    }

    /// `sum_i c_i s^(2i)` by Horner in `s^2`.
    fn even_poly(&self, s: f64) -> f64 {
        let s2 = s * s;
        self.coeffs.iter().rev().fold(0.0, |acc, c| (acc + c) * s2)
    }

    /// `V(x)`.
    pub fn eval(&self, x: f64) -> f64 {
        self.even_poly(x)
    }
}

impl std::str::FromStr for AnharmonicPotential {
    type Err = DescmError;

    /// Parses `"c1,c2,...,cm"`.
    fn from_str(s: &str) -> Result<Self> {
        let coeffs = s
            .split(',')
            .map(|t| {
                t.trim().parse::<f64>().map_err(|e| {
                    DescmError::InvalidPotential(format!("cannot parse coefficient {t:?}: {e}"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(coeffs)
    }
}

fn vtilde_sinh_unchecked(p: &AnharmonicPotential, x: f64) -> f64 {
    let c = x.cosh();
    let sech2 = 1.0 / (c * c);
    0.25 - 0.75 * sech2 + c * c * p.even_poly(x.sinh())
}

/// Closed-form transformed potential for the `sinh` map:
/// `1/4 - (3/4) sech^2 x + cosh^2 x * sum_i c_i sinh^(2i) x`.
pub fn vtilde_sinh(p: &AnharmonicPotential, x: f64) -> Result<f64> {
    let value = vtilde_sinh_unchecked(p, x);
    if value.is_finite() {
        Ok(value)
    } else {
        Err(DescmError::NonFinite {
            what: "transformed anharmonic potential",
            x,
            value,
        })
    }
}

/// A Sturm-Liouville problem transformed to the real line, ready for collocation.
#[derive(Clone)]
pub struct SLProblem {
    q: RealFn,
    rho: RealFn,
    map: ConformalMap,
    qtilde: RealFn,
    weight: RealFn,
    q_even: bool,
    rho_even: bool,
}

impl fmt::Debug for SLProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SLProblem")
            .field("map", &self.map)
            .field("q_even", &self.q_even)
            .field("rho_even", &self.rho_even)
            .field("parity_commutes", &self.parity_commutes())
            .finish()
    }
}

impl SLProblem {
    /// Builds the transformed problem from `q`, `rho` and `map`.
    ///
    /// `q_even` and `rho_even` are declarations; when the declared parity
    /// would make the operator commute with parity it is checked on sample
    /// points and rejected if it does not hold.
    pub fn new(
        q: RealFn,
        rho: RealFn,
        map: ConformalMap,
        q_even: bool,
        rho_even: bool,
    ) -> Result<Self> {
        let qtilde: RealFn = {
            let map = map.clone();
            let q = q.clone();
            Arc::new(move |x| qtilde_unchecked(&map, q.as_ref(), x))
        };
        let weight = weight_fn(&map, rho.clone());
        let problem = Self {
            q,
            rho,
            map,
            qtilde,
            weight,
            q_even,
            rho_even,
        };
        problem.verify_parity()?;
        Ok(problem)
    }

    /// `phi(x) = sinh(x)`, `rho = 1`, `q = V`, with the closed-form `V~`.
    pub fn anharmonic(p: &AnharmonicPotential) -> Self {
        let map = ConformalMap::sinh();
        let q: RealFn = {
            let p = p.clone();
            Arc::new(move |x| p.eval(x))
        };
        let qtilde: RealFn = {
            let p = p.clone();
            Arc::new(move |x| vtilde_sinh_unchecked(&p, x))
        };
        let weight: RealFn = Arc::new(|x: f64| {
            let c = x.cosh();
            c * c
        });
        Self {
            q,
            rho: Arc::new(|_| 1.0),
            map,
            qtilde,
            weight,
            q_even: true,
            rho_even: true,
        }
    }

    pub fn map(&self) -> &ConformalMap {
        &self.map
    }

    /// Original potential `q(x)`.
    pub fn q(&self, x: f64) -> f64 {
        (self.q)(x)
    }

    /// Original weight `rho(x)`.
    pub fn rho(&self, x: f64) -> f64 {
        (self.rho)(x)
    }

    /// Transformed potential `q~(x)`.
    pub fn qtilde(&self, x: f64) -> f64 {
        (self.qtilde)(x)
    }

    /// Transformed weight `(phi'(x))^2 rho(phi(x))`.
    pub fn weight(&self, x: f64) -> f64 {
        (self.weight)(x)
    }

    /// True iff `q` and `rho` are even and `phi` is odd.
    pub fn parity_commutes(&self) -> bool {
        self.q_even && self.rho_even && self.map.is_odd()
    }

    /// Samples the declared parity of `q~` and the weight on `[-3, 3]`.
    pub fn verify_parity(&self) -> Result<()> {
        if !self.parity_commutes() {
            return Ok(());
        }
        for i in 1..=PARITY_SAMPLES {
            let x = PARITY_RANGE * i as f64 / PARITY_SAMPLES as f64;
            check_even("transformed potential", x, self.qtilde(x), self.qtilde(-x))?;
            check_even("weight", x, self.weight(x), self.weight(-x))?;
            let (p, m) = (self.map.phi(x), self.map.phi(-x));
            let dev = (p + m).abs();
            if dev > PARITY_TOL * p.abs().max(1.0) {
                return Err(DescmError::ParityViolation {
                    what: "conformal map",
                    x,
                    deviation: dev,
                });
            }
        }
        Ok(())
    }
}

fn weight_fn(map: &ConformalMap, rho: RealFn) -> RealFn {
    let map = map.clone();
    Arc::new(move |x| {
        let d = map.dphi(x);
        d * d * rho(map.phi(x))
    })
}

fn check_even(what: &'static str, x: f64, plus: f64, minus: f64) -> Result<()> {
    let dev = (plus - minus).abs();
    if !(dev <= PARITY_TOL * plus.abs().max(1.0)) {
        return Err(DescmError::ParityViolation {
            what,
            x,
            deviation: dev,
        });
    }
    Ok(())
}

/// Convenience wrapper: the anharmonic problem for a validated potential.
pub fn make_anharmonic_problem(p: &AnharmonicPotential) -> SLProblem {
    SLProblem::anharmonic(p)
}
