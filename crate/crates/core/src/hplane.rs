//! Heat kernel of the hyperbolic plane in real and complex time.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special_fn::{integrate_tail, QuadConfig};

/// Complex time z = t + i s with t > 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexTime {
    pub t: f64,
    pub s: f64,
}

impl ComplexTime {
    pub fn new(t: f64, s: f64) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() || !s.is_finite() {
            return Err(Error::domain(format!("complex time needs Re(z) > 0, got t={t}, s={s}")));
        }
        Ok(ComplexTime { t, s })
    }

    pub fn z(&self) -> Complex64 {
        Complex64::new(self.t, self.s)
    }

    /// τ = |z|²/t.
    pub fn tau(&self) -> f64 {
        (self.t * self.t + self.s * self.s) / self.t
    }

    pub fn conj(&self) -> Self {
        ComplexTime {
            t: self.t,
            s: -self.s,
        }
    }
}

/// ln sinh(x) for x > 0 without overflow.
pub(crate) fn ln_sinh(x: f64) -> f64 {
    if x > 20.0 {
        x - std::f64::consts::LN_2 + (-(-2.0 * x).exp()).ln_1p()
    } else {
        x.sinh().ln()
    }
}

/// ln(sinh(y)/y) for y ≥ 0.
fn ln_sinhc(y: f64) -> f64 {
    if y < 1e-4 {
        y * y / 6.0
    } else if y > 20.0 {
        y - std::f64::consts::LN_2 - y.ln() + (-(-2.0 * y).exp()).ln_1p()
    } else {
        (y.sinh() / y).ln()
    }
}

fn check_args(t: f64, d: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::domain(format!("heat kernel needs t > 0, got {t}")));
    }
    if !(d >= 0.0) || !d.is_finite() {
        return Err(Error::domain(format!("heat kernel needs d >= 0, got {d}")));
    }
    Ok(())
}

/// Length scale in v (u = d + v²) over which the distance integrand decays.
fn v_scale(t: f64, d: f64) -> f64 {
    let gaussian = 1.0 / (d / (2.0 * t) + 0.5).sqrt();
    let quartic = (4.0 * t).powf(0.25);
    gaussian.min(quartic).max(1e-3)
}

/// Real part of the log of the v-integrand, without the Gaussian factor.
fn log_distance_weight(d: f64, v: f64) -> f64 {
    let u = d + v * v;
    (2.0 * u).ln() - 0.5 * (ln_sinh(d + 0.5 * v * v) + ln_sinhc(0.5 * v * v))
}

/// ∫₀^∞ 2r e^{−zr²}/(e^{2πr} + 1) dr, the part of the d = 0 spectral
/// integral left after separating ∫ r e^{−zr²} dr = 1/(2z).
fn fermi_correction(z: Complex64, cfg: QuadConfig) -> Result<Complex64> {
    let scale = (1.0 / (2.0 * PI)).min(1.0 / z.re.sqrt());
    let res = integrate_tail(
        |r: f64| {
            let w = 2.0 * r / ((2.0 * PI * r).exp() + 1.0);
            (-z * r * r).exp() * w
        },
        0.0,
        scale,
        cfg,
    )?;
    Ok(res.value)
}

fn heat_kernel_origin(z: Complex64, cfg: QuadConfig) -> Result<Complex64> {
    let corr = fermi_correction(z, cfg)?;
    Ok((-z / 4.0).exp() / (2.0 * PI) * (0.5 / z - corr))
}

/// K(t, d), the heat kernel of the hyperbolic plane at distance d.
pub fn heat_kernel_h(t: f64, d: f64) -> Result<f64> {
    heat_kernel_h_with(t, d, QuadConfig::tight())
}

pub fn heat_kernel_h_with(t: f64, d: f64, cfg: QuadConfig) -> Result<f64> {
    check_args(t, d)?;
    if d == 0.0 {
        return Ok(heat_kernel_origin(Complex64::new(t, 0.0), cfg)?.re);
    }
    let res = integrate_tail(
        |v: f64| {
            let u = d + v * v;
            (log_distance_weight(d, v) - u * u / (4.0 * t)).exp()
        },
        0.0,
        v_scale(t, d),
        cfg,
    )?;
    let prefactor = SQRT_2 * (-t / 4.0).exp() / (4.0 * PI * t).powf(1.5);
    Ok(prefactor * res.value)
}

/// K(z, d) for complex time; the Gaussian weight becomes e^{−u²/4z}.
pub fn heat_kernel_h_complex(z: ComplexTime, d: f64) -> Result<Complex64> {
    heat_kernel_h_complex_with(z, d, QuadConfig::tight())
}

pub fn heat_kernel_h_complex_with(z: ComplexTime, d: f64, cfg: QuadConfig) -> Result<Complex64> {
    let z = ComplexTime::new(z.t, z.s)?;
    check_args(z.t, d)?;
    let zc = z.z();
    if d == 0.0 {
        return heat_kernel_origin(zc, cfg);
    }
    let modulus2 = zc.norm_sqr();
    let damp = z.t / (4.0 * modulus2);
    let spin = z.s / (4.0 * modulus2);
    let res = integrate_tail(
        |v: f64| {
            let u = d + v * v;
            let u2 = u * u;
            Complex64::from_polar((log_distance_weight(d, v) - u2 * damp).exp(), u2 * spin)
        },
        0.0,
        v_scale(z.tau(), d),
        cfg,
    )?;
    let prefactor = SQRT_2 * (-zc / 4.0).exp() / (4.0 * PI * zc).powf(1.5);
    Ok(prefactor * res.value)
}

/// Right-hand side of the complex-time comparison
/// |K(z, d)| ≤ e^{s²/4t} t^{−3/2} (t² + s²)^{3/4} K(τ, d).
pub fn complex_time_bound(z: ComplexTime, d: f64) -> Result<f64> {
    let z = ComplexTime::new(z.t, z.s)?;
    let (t, s) = (z.t, z.s);
    let k_tau = heat_kernel_h(z.tau(), d)?;
    Ok((s * s / (4.0 * t)).exp() * t.powf(-1.5) * (t * t + s * s).powf(0.75) * k_tau)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_time_origin() {
        let t = 1e-4;
        let v = 4.0 * PI * t * heat_kernel_h(t, 0.0).unwrap();
        assert!((v - 1.0).abs() < 1e-3);
    }

    #[test]
    fn positive_and_decreasing_in_distance() {
        for &t in &[0.05, 1.0, 8.0] {
            let mut prev = heat_kernel_h(t, 0.0).unwrap();
            for k in 1..40 {
                let d = 0.1 * k as f64;
                let v = heat_kernel_h(t, d).unwrap();
                assert!(v > 0.0 && v < prev, "t={t} d={d}");
                prev = v;
            }
        }
    }

    #[test]
    fn continuity_at_origin() {
        // the u-form at tiny distance approaches the spectral form at d = 0
        let a = heat_kernel_h(1.0, 0.0).unwrap();
        let b = heat_kernel_h(1.0, 1e-4).unwrap();
        assert!(((a - b) / a).abs() < 1e-6);
    }

    #[test]
    fn real_time_reduction() {
        let z = ComplexTime::new(0.7, 0.0).unwrap();
        let c = heat_kernel_h_complex(z, 1.0).unwrap();
        let r = heat_kernel_h(0.7, 1.0).unwrap();
        assert!((c.re - r).abs() < 1e-10 && c.im.abs() < 1e-14);
    }

    #[test]
    fn conjugate_symmetry() {
        let z = ComplexTime::new(1.3, 0.9).unwrap();
        for &d in &[0.0, 0.5] {
            let a = heat_kernel_h_complex(z, d).unwrap();
            let b = heat_kernel_h_complex(z.conj(), d).unwrap();
            assert!((a - b.conj()).norm() < 1e-12 * a.norm());
        }
    }

    #[test]
    fn domain_errors() {
        assert!(heat_kernel_h(0.0, 1.0).is_err());
        assert!(heat_kernel_h(1.0, -1.0).is_err());
        assert!(ComplexTime::new(-1.0, 0.0).is_err());
    }
}
