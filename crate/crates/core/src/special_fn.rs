//! Principal-branch Lambert W and the mesh-size rule for anharmonic potentials.

use std::f64::consts::PI;

use crate::error::{DescmError, Result};

const MAX_ITERATIONS: usize = 50;

/// `W0(x)` for `x >= 0`: the `w >= 0` with `w e^w = x`, by Halley iteration
/// started at `ln(1 + x)`.
pub fn lambert_w0(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(DescmError::LambertDomain(x));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }
    let mut w = x.ln_1p();
    for _ in 0..MAX_ITERATIONS {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        let next = w - step;
        if next == w || step.abs() <= 4.0 * f64::EPSILON * next.abs() {
            return Ok(polish(next, x));
        }
        w = next;
    }
    Ok(polish(w, x))
}

/// One Newton step, kept only if it lowers the residual.
fn polish(w: f64, x: f64) -> f64 {
    let residual = |w: f64| (w * w.exp() - x).abs();
    let ew = w.exp();
    let candidate = w - (w * ew - x) / (ew * (w + 1.0));
    if residual(candidate) < residual(w) {
        candidate
    } else {
        w
    }
}

/// Inputs to [`optimal_h`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshParams {
    /// Index of the highest even power, `m >= 2`.
    pub m: usize,
    /// Leading coefficient `c_m > 0`.
    pub c_m: f64,
    /// Half-width `N >= 1`.
    pub n: usize,
}

impl MeshParams {
    pub fn new(m: usize, c_m: f64, n: usize) -> Result<Self> {
        let p = Self { m, c_m, n };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        if self.m < 2 {
            return Err(DescmError::InvalidMeshParams(format!(
                "m must be at least 2, got {}",
                self.m
            )));
        }
        if !(self.c_m > 0.0 && self.c_m.is_finite()) {
            return Err(DescmError::InvalidMeshParams(format!(
                "c_m must be positive, got {}",
                self.c_m
            )));
        }
        if self.n == 0 {
            return Err(DescmError::InvalidMeshParams("N must be at least 1".into()));
        }
        Ok(())
    }

    /// `2^m pi^2 (m+1) N / sqrt(c_m)`.
    pub fn lambert_argument(&self) -> f64 {
        2f64.powi(self.m as i32) * PI * PI * (self.m + 1) as f64 * self.n as f64 / self.c_m.sqrt()
    }
}

/// `h = W(2^m pi^2 (m+1) N / sqrt(c_m)) / ((m+1) N)`.
pub fn optimal_h(p: &MeshParams) -> Result<f64> {
    p.validate()?;
    let w = lambert_w0(p.lambert_argument())?;
    Ok(w / ((p.m + 1) as f64 * p.n as f64))
}
