//! Special functions and the quadrature engines everything else is built on.

mod gamma;
mod quad;

pub use gamma::{
    digamma, gamma, ln_gamma, log_gamma, recip_gamma, recip_gamma_over, tricomi_gamma_star,
    BERNOULLI_EVEN, EULER_GAMMA,
};
pub use quad::{
    integrate, integrate_breaks, integrate_finite, integrate_line, integrate_semi_infinite,
    integrate_tail, integrate_weighted_symmetric, pairwise_sum, QuadConfig, QuadValue,
    QuadratureResult,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Order and arguments of K_s(a, b) = ∫₀^∞ e^{−(a²t + b²/t)} t^s dt/t.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KBesselArgs {
    pub s: f64,
    pub a: f64,
    pub b: f64,
}

impl KBesselArgs {
    pub fn new(s: f64, a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) || !s.is_finite() {
            return Err(Error::domain(format!("K-Bessel needs a, b > 0, got a={a}, b={b}")));
        }
        Ok(KBesselArgs { s, a, b })
    }
}

/// K_s(a, b) by quadrature.
///
/// With t = (b/a)eˣ the integral becomes (b/a)^s ∫ exp(−2ab cosh x + s x) dx,
/// which decays doubly exponentially; the integrand is normalised by its
/// peak so tiny values keep full relative accuracy.
pub fn k_bessel(args: KBesselArgs) -> Result<f64> {
    k_bessel_with(args, QuadConfig::tight())
}

pub fn k_bessel_with(args: KBesselArgs, cfg: QuadConfig) -> Result<f64> {
    let KBesselArgs { s, a, b } = KBesselArgs::new(args.s, args.a, args.b)?;
    let c = a * b;
    let x0 = (s / (2.0 * c)).asinh();
    let phase = |x: f64| -2.0 * c * x.cosh() + s * x;
    let peak = phase(x0);
    let curvature = 2.0 * c * x0.cosh();
    let scale = (1.0 / curvature.sqrt()).min(1.0);
    let res = integrate_line(|x| (phase(x) - peak).exp(), x0, scale, cfg)?;
    Ok((s * (b / a).ln() + peak + res.value.ln()).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn closed_form_half() {
        let v = k_bessel(KBesselArgs::new(-0.5, 1.0, 1.0).unwrap()).unwrap();
        let want = PI.sqrt() * (-2.0f64).exp();
        assert!(((v - want) / want).abs() < 1e-12);
        let v = k_bessel(KBesselArgs::new(-0.5, 2.0, 3.0).unwrap()).unwrap();
        let want = PI.sqrt() / 3.0 * (-12.0f64).exp();
        assert!(((v - want) / want).abs() < 1e-12);
    }

    #[test]
    fn order_swap_symmetry() {
        for &(s, a, b) in &[(0.3, 0.7, 2.0), (1.5, 3.0, 0.2), (-2.0, 1.0, 1.0)] {
            let x = k_bessel(KBesselArgs::new(s, a, b).unwrap()).unwrap();
            let y = k_bessel(KBesselArgs::new(-s, b, a).unwrap()).unwrap();
            assert!(((x - y) / x).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(KBesselArgs::new(0.5, 0.0, 1.0).is_err());
        assert!(KBesselArgs::new(0.5, 1.0, -1.0).is_err());
    }
}
