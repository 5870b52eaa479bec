//! Sketch dimensions suggested by the recovery guarantee.
//!
//! `k = (C1/ε⁴) ln³(d/δ) max{1, β²γ⁴/λ²}` and
//! `s = (C2/ε²) ln²(d/δ) max{1, βγ²/λ}`. The constants are unknown, default
//! to 1, and the outputs are planning figures only.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryParams {
    pub epsilon: f64,
    pub delta: f64,
    pub dim: u64,
    /// loss smoothness
    pub beta: f64,
    /// max l1 norm of an input
    pub gamma: f64,
    pub lambda: f64,
    pub c1: f64,
    pub c2: f64,
}

impl TheoryParams {
    pub fn new(epsilon: f64, delta: f64, dim: u64, lambda: f64) -> Self {
        Self {
            epsilon,
            delta,
            dim,
            beta: 1.0,
            gamma: 1.0,
            lambda,
            c1: 1.0,
            c2: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::usage(format!("{name} must be positive and finite, got {v}")))
            }
        };
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(Error::usage(format!("epsilon must be in (0, 1], got {}", self.epsilon)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::usage(format!("delta must be in (0, 1), got {}", self.delta)));
        }
        if self.dim == 0 {
            return Err(Error::usage("dimension must be at least 1"));
        }
        positive("lambda", self.lambda)?;
        positive("beta", self.beta)?;
        positive("gamma", self.gamma)?;
        positive("c1", self.c1)?;
        positive("c2", self.c2)
    }

    fn log_term(&self) -> f64 {
        (self.dim as f64 / self.delta).ln()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SketchSize {
    /// total sketch size, a multiple of `s`
    pub k: u64,
    /// depth
    pub s: u64,
    /// formula values before rounding
    pub k_exact: f64,
    pub s_exact: f64,
}

impl SketchSize {
    fn round(k_exact: f64, s_exact: f64) -> Result<Self> {
        if !(k_exact.is_finite() && s_exact.is_finite()) || k_exact > 1e18 {
            return Err(Error::usage("sketch size overflows"));
        }
        let s = (s_exact.ceil() as u64).max(1);
        let k = ((k_exact / s as f64).ceil() as u64).max(1) * s;
        Ok(Self { k, s, k_exact, s_exact })
    }

    pub fn width(&self) -> u64 {
        self.k / self.s
    }

    /// Bytes for the sketch weights under the 4-byte cost model.
    pub fn memory_bytes(&self) -> u64 {
        4 * self.k
    }
}

pub fn theoretical_size(p: &TheoryParams) -> Result<SketchSize> {
    p.validate()?;
    let l = p.log_term();
    let k = p.c1 / p.epsilon.powi(4) * l.powi(3) * f64::max(1.0, p.beta.powi(2) * p.gamma.powi(4) / p.lambda.powi(2));
    let s = p.c2 / p.epsilon.powi(2) * l.powi(2) * f64::max(1.0, p.beta * p.gamma.powi(2) / p.lambda);
    SketchSize::round(k, s)
}

/// `k = ε⁻⁴ λ⁻² ln³(d/δ)`, `s = ε⁻² λ⁻¹ ln²(d/δ)`.
pub fn simplified_size(epsilon: f64, delta: f64, dim: u64, lambda: f64) -> Result<SketchSize> {
    let p = TheoryParams::new(epsilon, delta, dim, lambda);
    p.validate()?;
    let l = p.log_term();
    let k = l.powi(3) / (epsilon.powi(4) * lambda.powi(2));
    let s = l.powi(2) / (epsilon.powi(2) * lambda);
    SketchSize::round(k, s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_point() {
        // ln(102400) = 11.5366..., 16 ln^3 = 24567.35, 4 ln^2 = 532.38
        let size = theoretical_size(&TheoryParams::new(0.5, 0.01, 1024, 1.0)).unwrap();
        assert_eq!(size.s, 533);
        assert_eq!(size.k, 25051);
        assert_eq!(size.k % size.s, 0);
        let l = 102400f64.ln();
        assert!((size.k_exact - 16.0 * l.powi(3)).abs() < 1e-9);
    }

    #[test]
    fn power_laws() {
        let a = theoretical_size(&TheoryParams::new(0.5, 0.01, 1024, 1.0)).unwrap();
        let b = theoretical_size(&TheoryParams::new(0.25, 0.01, 1024, 1.0)).unwrap();
        assert!((b.k_exact / a.k_exact - 16.0).abs() < 1e-9);
        assert!((b.s_exact / a.s_exact - 4.0).abs() < 1e-9);

        let a = simplified_size(0.5, 0.01, 1024, 0.5).unwrap();
        let b = simplified_size(0.5, 0.01, 1024, 0.25).unwrap();
        assert!((b.k_exact / a.k_exact - 4.0).abs() < 1e-9);
        assert!((b.s_exact / a.s_exact - 2.0).abs() < 1e-9);

        let c = simplified_size(0.5, 0.01, 2048, 0.5).unwrap();
        let ratio = (2048f64 / 0.01).ln().powi(3) / (1024f64 / 0.01).ln().powi(3);
        assert!((c.k_exact / a.k_exact - ratio).abs() < 1e-9);
    }

    #[test]
    fn simplified_matches_theory_at_unit_lambda() {
        let p = TheoryParams::new(0.3, 0.05, 5000, 1.0);
        assert_eq!(theoretical_size(&p).unwrap(), simplified_size(0.3, 0.05, 5000, 1.0).unwrap());
    }

    #[test]
    fn invalid_params_rejected() {
        for p in [
            TheoryParams::new(0.0, 0.01, 10, 1.0),
            TheoryParams::new(1.5, 0.01, 10, 1.0),
            TheoryParams::new(0.5, 1.0, 10, 1.0),
            TheoryParams::new(0.5, 0.01, 0, 1.0),
            TheoryParams::new(0.5, 0.01, 10, 0.0),
        ] {
            assert!(matches!(theoretical_size(&p), Err(Error::Usage(_))));
        }
    }
}
