//! Selberg zeta function of a length spectrum: Euler product, logarithmic
//! derivative in series, integral and K-Bessel form, and Z′(1).

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Geodesic;
use crate::special_fn::{integrate_breaks, integrate_tail, k_bessel, KBesselArgs, QuadConfig};
use crate::traces::{check_alpha, hyperbolic_trace};

/// Cutoff on e^{−(Re s − 1/2)ℓ} beyond which a geodesic is dropped.
const LENGTH_CUTOFF: f64 = 1e-18;
const SERIES_TOL: f64 = 1e-18;

fn check_lengths(lengths: &[Geodesic]) -> Result<()> {
    for g in lengths {
        if !(g.length > 0.0) || !g.length.is_finite() {
            return Err(Error::domain(format!("geodesic length must be positive, got {}", g.length)));
        }
    }
    Ok(())
}

fn negligible(g: &Geodesic, s: Complex64) -> bool {
    (-(s.re - 0.5) * g.length).exp() < LENGTH_CUTOFF
}

/// Π_{n≥0} (1 − e^{−(s+n)ℓ})^mult for one geodesic; valid for Re(s) > 0.
fn geodesic_factor(g: &Geodesic, s: Complex64, tol: f64) -> Complex64 {
    let l = g.length;
    let mut prod = Complex64::new(1.0, 0.0);
    let mut n = 0u32;
    loop {
        let e = (-(s + n as f64) * l).exp();
        prod *= 1.0 - e;
        n += 1;
        // |log| of the remaining factors is at most Σ_{k≥n} 2|e_k|
        let rest = 2.0 * (-(s.re + n as f64) * l).exp() / (1.0 - (-l).exp());
        if rest < tol || n > 100_000 {
            break;
        }
    }
    prod.powu(g.multiplicity)
}

fn product_unchecked(lengths: &[Geodesic], s: Complex64, tol: f64) -> Complex64 {
    lengths
        .iter()
        .filter(|g| !negligible(g, s))
        .map(|g| geodesic_factor(g, s, tol))
        .product()
}

/// Z(s) = Π_γ Π_{n≥0}(1 − e^{−(s+n)ℓ_γ}) with the tail below `tol`.
pub fn selberg_zeta_product(lengths: &[Geodesic], s: Complex64, tol: f64) -> Result<Complex64> {
    check_lengths(lengths)?;
    if !(s.re > 1.0) {
        return Err(Error::domain(format!("Euler product needs Re(s) > 1, got {}", s.re)));
    }
    if !(tol > 0.0) {
        return Err(Error::domain("tolerance must be positive"));
    }
    Ok(product_unchecked(lengths, s, tol))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Representation {
    Series,
    Integral,
    KBessel,
    ProductDerivative,
}

/// Which half-plane condition admits the evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DomainCertificate {
    /// Re(s) > 1.
    RightHalfPlane,
    /// Re(s² − s) > −1/4.
    Parabolic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogDerivEvaluation {
    pub s: Complex64,
    pub value: Complex64,
    pub representation: Representation,
    pub certificate: DomainCertificate,
}

fn right_half_plane(s: Complex64) -> Result<DomainCertificate> {
    if s.re > 1.0 {
        Ok(DomainCertificate::RightHalfPlane)
    } else {
        Err(Error::domain(format!("needs Re(s) > 1, got s = {s}")))
    }
}

fn parabolic(s: Complex64) -> Result<DomainCertificate> {
    if (s * s - s).re > -0.25 {
        Ok(DomainCertificate::Parabolic)
    } else {
        Err(Error::domain(format!("needs Re(s² − s) > −1/4, got s = {s}")))
    }
}

/// Z′/Z(s) = Σ_γ Σ_{n≥1} ℓ/(2 sinh(nℓ/2)) e^{−(s−1/2)nℓ}.
pub fn selberg_logderiv_series(lengths: &[Geodesic], s: Complex64) -> Result<LogDerivEvaluation> {
    check_lengths(lengths)?;
    let certificate = right_half_plane(s)?;
    let mut total = Complex64::new(0.0, 0.0);
    for g in lengths.iter().filter(|g| !negligible(g, s)) {
        let l = g.length;
        let mut sum = Complex64::new(0.0, 0.0);
        let mut n = 1u32;
        loop {
            let nl = n as f64 * l;
            // ℓ e^{−s nℓ}/(1 − e^{−nℓ}) is the same term without overflow
            let term = l * (-s * nl).exp() / (-(-nl).exp_m1());
            sum += term;
            if term.norm() <= SERIES_TOL * sum.norm() || n > 1_000_000 {
                break;
            }
            n += 1;
        }
        total += g.multiplicity as f64 * sum;
    }
    Ok(LogDerivEvaluation {
        s,
        value: total,
        representation: Representation::Series,
        certificate,
    })
}

/// (2s−1)∫₀^∞ HTr(t) e^{−s(s−1)t} dt by quadrature.
pub fn selberg_logderiv_integral(lengths: &[Geodesic], s: Complex64) -> Result<LogDerivEvaluation> {
    check_lengths(lengths)?;
    let certificate = parabolic(s)?;
    if lengths.is_empty() {
        return Ok(LogDerivEvaluation {
            s,
            value: Complex64::new(0.0, 0.0),
            representation: Representation::Integral,
            certificate,
        });
    }
    let w = s * (s - 1.0);
    let rate = w.re + 0.25;
    let lmin = lengths.iter().map(|g| g.length).fold(f64::INFINITY, f64::min);
    let cfg = QuadConfig::tight().with_abs(1e-15);
    let err = std::cell::RefCell::new(None);
    let f = |t: f64| -> Complex64 {
        if t <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        match hyperbolic_trace(lengths, t) {
            Ok(h) if h == 0.0 => Complex64::new(0.0, 0.0),
            Ok(h) => h * (-w * t).exp(),
            Err(e) => {
                err.borrow_mut().get_or_insert(e);
                Complex64::new(f64::NAN, 0.0)
            }
        }
    };
    // HTr rises from e^{−ℓ²/4t} near 0 and peaks around t ~ ℓ/(2√rate)
    let peak = (0.5 * lmin / rate.sqrt()).max(1e-3);
    let head = integrate_breaks(&f, &[0.0, 0.25 * peak, peak, 4.0 * peak], cfg);
    let tail = integrate_tail(&f, 4.0 * peak, 1.0 / rate, cfg);
    if let Some(e) = err.into_inner() {
        return Err(e);
    }
    let value = (2.0 * s - 1.0) * (head?.value + tail?.value);
    Ok(LogDerivEvaluation {
        s,
        value,
        representation: Representation::Integral,
        certificate,
    })
}

/// (2s−1)Σ_γ mult Σ_{n≥1} ℓ/(√(16π) sinh(nℓ/2))·K_{1/2}(s − 1/2, nℓ/2),
/// with the K-Bessel integrals by quadrature; real s > 1/2 only.
pub fn selberg_logderiv_kbessel(lengths: &[Geodesic], s: f64) -> Result<LogDerivEvaluation> {
    check_lengths(lengths)?;
    let sc = Complex64::new(s, 0.0);
    let certificate = parabolic(sc)?;
    if !(s > 0.5) {
        return Err(Error::domain(format!("K-Bessel route needs real s > 1/2, got {s}")));
    }
    let mut total = 0.0;
    for g in lengths.iter().filter(|g| !negligible(g, sc)) {
        let l = g.length;
        let mut sum = 0.0;
        let mut n = 1u32;
        loop {
            let nl = n as f64 * l;
            let k = k_bessel(KBesselArgs::new(0.5, s - 0.5, 0.5 * nl)?)?;
            // ℓ/sinh(nℓ/2) = 2ℓe^{−nℓ/2}/(1 − e^{−nℓ})
            let term = 2.0 * l * (-0.5 * nl).exp() / (-(-nl).exp_m1()) * k;
            sum += term;
            if term <= SERIES_TOL * sum || n > 1_000_000 {
                break;
            }
            n += 1;
        }
        total += g.multiplicity as f64 * sum;
    }
    let value = (2.0 * s - 1.0) / (16.0 * PI).sqrt() * total;
    Ok(LogDerivEvaluation {
        s: sc,
        value: Complex64::new(value, 0.0),
        representation: Representation::KBessel,
        certificate,
    })
}

/// Z′/Z from central differences of the Euler product at s ± h and
/// s ± h/2, Richardson-combined.
pub fn selberg_logderiv_product(lengths: &[Geodesic], s: Complex64) -> Result<LogDerivEvaluation> {
    check_lengths(lengths)?;
    let certificate = right_half_plane(s)?;
    let h = 1e-3_f64.min(0.5 * (s.re - 1.0));
    let tol = 1e-17;
    let z = |x: Complex64| selberg_zeta_product(lengths, x, tol);
    let center = z(s)?;
    let d = |h: f64| -> Result<Complex64> { Ok((z(s + h)? - z(s - h)?) / (2.0 * h)) };
    let deriv = (4.0 * d(0.5 * h)? - d(h)?) / 3.0;
    Ok(LogDerivEvaluation {
        s,
        value: deriv / center,
        representation: Representation::ProductDerivative,
        certificate,
    })
}

/// Integral-form Z′/Z minus Σ_{λ<α} (2s−1)/(s(s−1) + λ).
pub fn truncated_logderiv(lengths: &[Geodesic], small_eigenvalues: &[f64], alpha: f64, s: Complex64) -> Result<Complex64> {
    check_alpha(small_eigenvalues, alpha)?;
    let w = s * (s - 1.0);
    let mut rational = Complex64::new(0.0, 0.0);
    for &l in small_eigenvalues.iter().filter(|&&l| l < alpha) {
        let den = w + l;
        if den.norm() <= 1e-14 * (1.0 + l) {
            return Err(Error::Pole(format!("s(s−1) = −{l} at s = {s}")));
        }
        rational += (2.0 * s - 1.0) / den;
    }
    Ok(selberg_logderiv_integral(lengths, s)?.value - rational)
}

/// Z′(1) of a finite length spectrum with a finite-difference cross-check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZPrimeOne {
    /// Product rule over the factors 1 − e^{−(1+n)ℓ}.
    pub value: f64,
    /// (Z(1+h) − Z(1−h))/2h.
    pub finite_difference: f64,
}

/// Z′(1) = Σ over factors f_k of f_k′(1)·Π_{j≠k} f_j(1), with prefix and
/// suffix products so a vanishing factor needs no division.
pub fn selberg_z_prime_one(lengths: &[Geodesic]) -> Result<ZPrimeOne> {
    check_lengths(lengths)?;
    if lengths.is_empty() {
        return Err(Error::domain("Z'(1) needs a nonempty length spectrum"));
    }
    let tol = 1e-18;
    // factors (value, derivative) at s = 1
    let mut factors: Vec<(f64, f64)> = Vec::new();
    for g in lengths {
        let l = g.length;
        let mut n = 0u32;
        loop {
            let e = (-(1.0 + n as f64) * l).exp();
            for _ in 0..g.multiplicity {
                factors.push((1.0 - e, l * e));
            }
            n += 1;
            if e < tol {
                break;
            }
        }
    }
    let m = factors.len();
    let mut prefix = vec![1.0; m + 1];
    for k in 0..m {
        prefix[k + 1] = prefix[k] * factors[k].0;
    }
    let mut suffix = vec![1.0; m + 1];
    for k in (0..m).rev() {
        suffix[k] = suffix[k + 1] * factors[k].0;
    }
    let value = (0..m).map(|k| factors[k].1 * prefix[k] * suffix[k + 1]).sum();
    let h = 1e-4;
    let z = |x: f64| product_unchecked(lengths, Complex64::new(x, 0.0), 1e-18).re;
    let finite_difference = (z(1.0 + h) - z(1.0 - h)) / (2.0 * h);
    Ok(ZPrimeOne { value, finite_difference })
}
