//! Test-function pairs (h, H, Ĥ) and the two sides of the trace formula.

use std::f64::consts::{LN_2, PI};
use std::sync::Arc;

use num_complex::Complex64;

use crate::counting::ScatteringModel;
use crate::error::{Error, Result};
use crate::geometry::SurfaceData;
use crate::special_fn::{digamma, integrate_line, integrate_tail, k_bessel, KBesselArgs, QuadConfig};

use super::elliptic::{fermi_transform_integral, sin_ratio};

/// Whether H and Ĥ are closed forms or quadratures of h.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Analytic,
    Numeric,
}

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type FallibleFn = Arc<dyn Fn(f64) -> Result<f64> + Send + Sync>;

/// h together with H(r) = ∫ h(t)e^{−r²t} dt and Ĥ(u) = ∫ h(t)(4πt)^{−1/2}e^{−u²/4t} dt.
///
/// H is stored as a function of r² so eigenvalues below 1/4 (imaginary r)
/// are handled without complex arithmetic.
#[derive(Clone)]
pub struct TestFunctionPair {
    h: Option<RealFn>,
    spectral: FallibleFn,
    gaussian: FallibleFn,
    provenance: Provenance,
    margin: f64,
    r_scale: f64,
}

impl std::fmt::Debug for TestFunctionPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TestFunctionPair")
            .field("provenance", &self.provenance)
            .field("margin", &self.margin)
            .finish()
    }
}

impl TestFunctionPair {
    /// h = δ(t − t₀): H(r) = e^{−r²t₀}, Ĥ(u) = (4πt₀)^{−1/2}e^{−u²/4t₀}.
    pub fn point_mass(t0: f64) -> Result<Self> {
        if !(t0 > 0.0) || !t0.is_finite() {
            return Err(Error::domain(format!("point mass needs t0 > 0, got {t0}")));
        }
        Ok(TestFunctionPair {
            h: None,
            spectral: Arc::new(move |r2| Ok((-r2 * t0).exp())),
            gaussian: Arc::new(move |u| Ok((-u * u / (4.0 * t0)).exp() / (4.0 * PI * t0).sqrt())),
            provenance: Provenance::Analytic,
            margin: f64::INFINITY,
            r_scale: 1.0 / t0.sqrt(),
        })
    }

    /// h(t) = e^{−at − b/t} with a > 1/4, b > 0:
    /// H(r) = K₁(√(a + r²), √b), Ĥ(u) = e^{−2√(a(b + u²/4))}/(2√a).
    pub fn exponential(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.25) || !(b > 0.0) || !a.is_finite() || !b.is_finite() {
            return Err(Error::Admissibility(format!("e^(-at-b/t) needs a > 1/4 and b > 0, got a={a}, b={b}")));
        }
        Ok(TestFunctionPair {
            h: Some(Arc::new(move |t: f64| (-a * t - b / t).exp())),
            spectral: Arc::new(move |r2| k_bessel(KBesselArgs::new(1.0, (a + r2).sqrt(), b.sqrt())?)),
            gaussian: Arc::new(move |u| Ok((-2.0 * (a * (b + 0.25 * u * u)).sqrt()).exp() / (2.0 * a.sqrt()))),
            provenance: Provenance::Analytic,
            margin: 0.5 * (a - 0.25),
            r_scale: (0.5 / b.sqrt()).max(1.0),
        })
    }

    /// Transforms computed by quadrature. `margin` is the ε in the decay
    /// requirement h(t)e^{(1/4+ε)t} ∈ L¹, checked on a log grid.
    pub fn numeric(h: impl Fn(f64) -> f64 + Send + Sync + 'static, margin: f64) -> Result<Self> {
        let h: RealFn = Arc::new(h);
        check_admissible(&*h, margin)?;
        let hs = h.clone();
        let hg = h.clone();
        Ok(TestFunctionPair {
            h: Some(h),
            spectral: Arc::new(move |r2| spectral_transform_sq(&*hs, r2)),
            gaussian: Arc::new(move |u| gaussian_transform(&*hg, u)),
            provenance: Provenance::Numeric,
            margin,
            r_scale: 5.0,
        })
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// The recorded ε of the decay certificate.
    pub fn margin(&self) -> f64 {
        self.margin
    }

    /// h(t), or None for the point mass.
    pub fn h(&self, t: f64) -> Option<f64> {
        self.h.as_ref().map(|h| h(t))
    }

    pub fn spectral(&self, r: f64) -> Result<f64> {
        (self.spectral)(r * r)
    }

    /// H as a function of r² (negative for eigenvalues below 1/4).
    pub fn spectral_sq(&self, r2: f64) -> Result<f64> {
        (self.spectral)(r2)
    }

    pub fn gaussian(&self, u: f64) -> Result<f64> {
        (self.gaussian)(u)
    }

    /// Largest deviation between the stored transforms and fresh quadratures
    /// of h on the given samples.
    pub fn transform_mismatch(&self, r_samples: &[f64], u_samples: &[f64]) -> Result<f64> {
        let h = match &self.h {
            Some(h) => h.clone(),
            None => return Ok(0.0),
        };
        let mut worst = 0.0f64;
        for &r in r_samples {
            let a = self.spectral(r)?;
            let b = spectral_transform(&*h, r)?;
            worst = worst.max((a - b).abs() / (1.0 + a.abs()));
        }
        for &u in u_samples {
            let a = self.gaussian(u)?;
            let b = gaussian_transform(&*h, u)?;
            worst = worst.max((a - b).abs() / (1.0 + a.abs()));
        }
        Ok(worst)
    }
}

fn check_admissible(h: &dyn Fn(f64) -> f64, margin: f64) -> Result<()> {
    if !(margin > 0.0) {
        return Err(Error::Admissibility(format!("decay margin must be positive, got {margin}")));
    }
    let rate = 0.25 + margin;
    let samples: Vec<f64> = (-20..=30)
        .map(|k| {
            let t = 10f64.powf(k as f64 / 10.0);
            h(t).abs() * (rate * t).exp()
        })
        .collect();
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::Admissibility("h(t)e^((1/4+eps)t) is not finite on the check grid".into()));
    }
    let head = samples[..30].iter().cloned().fold(0.0, f64::max);
    let tail = samples[30..].iter().cloned().fold(0.0, f64::max);
    if tail > head * (1.0 + 1e-9) && tail > 1e-300 {
        return Err(Error::Admissibility(format!(
            "h(t)e^((1/4+{margin})t) grows for large t"
        )));
    }
    Ok(())
}

/// H(r) = ∫₀^∞ h(t) e^{−r²t} dt.
pub fn spectral_transform(h: &dyn Fn(f64) -> f64, r: f64) -> Result<f64> {
    spectral_transform_sq(h, r * r)
}

pub fn spectral_transform_sq(h: &dyn Fn(f64) -> f64, r2: f64) -> Result<f64> {
    let scale = 1.0 / (0.25 + r2.max(0.0));
    let res = integrate_tail(
        |t: f64| {
            let v = h(t);
            if v == 0.0 {
                0.0
            } else {
                v * (-r2 * t).exp()
            }
        },
        0.0,
        scale,
        QuadConfig::tight(),
    )?;
    Ok(res.value)
}

/// Ĥ(u) = ∫₀^∞ h(t)(4πt)^{−1/2} e^{−u²/4t} dt, integrated in v = √t.
pub fn gaussian_transform(h: &dyn Fn(f64) -> f64, u: f64) -> Result<f64> {
    let res = integrate_tail(
        |v: f64| {
            if v == 0.0 {
                return 0.0;
            }
            let t = v * v;
            let g = u * u / (4.0 * t);
            if g > 745.0 {
                0.0
            } else {
                h(t) * (-g).exp()
            }
        },
        0.0,
        2.0_f64.max(u / 2.0),
        QuadConfig::tight(),
    )?;
    Ok(res.value / PI.sqrt())
}

/// Terms of the geometric side of the trace formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometricSide {
    pub identity: f64,
    pub hyperbolic: f64,
    pub elliptic: f64,
}

impl GeometricSide {
    pub fn total(&self) -> f64 {
        self.identity + self.hyperbolic + self.elliptic
    }
}

pub fn geometric_side(surface: &SurfaceData, pair: &TestFunctionPair) -> Result<GeometricSide> {
    let cfg = QuadConfig::tight();
    let id = integrate_tail(
        |r: f64| {
            let h = pair.spectral_sq(r * r).unwrap_or(f64::NAN);
            h * (PI * r).tanh() * r
        },
        0.0,
        pair.r_scale,
        cfg,
    )?;
    let identity = surface.volume() / (2.0 * PI) * id.value;

    let mut hyperbolic = 0.0;
    for g in surface.lengths() {
        let l = g.length;
        let geometric = l / ((1.0 - (-0.5 * l).exp()) * (1.0 - (-l).exp()));
        let mut sum = 0.0;
        let mut n = 1u64;
        loop {
            let nl = n as f64 * l;
            let weight = l * (-0.5 * nl).exp() / (1.0 - (-nl).exp());
            let hat = pair.gaussian(nl)?;
            sum += weight * hat;
            // Ĥ is non-increasing in u for h ≥ 0
            if hat.abs() * geometric * (-0.5 * nl).exp() <= 1e-18 * sum.abs() || hat == 0.0 {
                break;
            }
            n += 1;
            if n > 1_000_000 {
                return Err(Error::Divergence("hyperbolic side did not settle".into()));
            }
        }
        hyperbolic += g.multiplicity as f64 * sum;
    }

    let mut elliptic = 0.0;
    for &q in surface.elliptic_orders() {
        let qf = q as f64;
        for n in 1..q {
            let integral = fermi_transform_integral(
                |r2| pair.spectral_sq(r2).unwrap_or(f64::NAN),
                n as f64 / qf,
                cfg,
            )?;
            elliptic += integral / (2.0 * qf * sin_ratio(n, q));
        }
    }
    Ok(GeometricSide {
        identity,
        hyperbolic,
        elliptic,
    })
}

/// Σ H(r_n) with λ_n = 1/4 + r_n².
pub fn spectral_side_compact(eigenvalues: &[f64], pair: &TestFunctionPair) -> Result<f64> {
    eigenvalues.iter().map(|&l| pair.spectral_sq(l - 0.25)).sum()
}

/// Continuous-spectrum terms for a surface with cusps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringTerms {
    /// −(1/4π)∫ H(r) φ′/φ(1/2 + ir) dr.
    pub scattering: f64,
    /// (p/2π)∫ H(r) Re ψ(1 + ir) dr.
    pub digamma: f64,
    /// −(1/4)(p − Tr Φ(1/2)) H(0).
    pub trace_term: f64,
    /// p log 2 · Ĥ(0).
    pub log_two: f64,
}

impl ScatteringTerms {
    pub fn total(&self) -> f64 {
        self.scattering + self.digamma + self.trace_term + self.log_two
    }
}

pub fn noncompact_spectral_terms(
    p: u32,
    scattering: &ScatteringModel,
    pair: &TestFunctionPair,
) -> Result<ScatteringTerms> {
    scattering.validate(p)?;
    let cfg = QuadConfig::tight().with_abs(1e-15);
    let pf = p as f64;
    let phi = if scattering.is_trivial() {
        0.0
    } else {
        integrate_line(
            |r: f64| pair.spectral_sq(r * r).unwrap_or(f64::NAN) * scattering.phi_log_deriv(r),
            0.0,
            pair.r_scale,
            cfg,
        )?
        .value
    };
    let dig = if p == 0 {
        0.0
    } else {
        2.0 * integrate_tail(
            |r: f64| {
                let psi = digamma(Complex64::new(1.0, r)).map(|z| z.re).unwrap_or(f64::NAN);
                pair.spectral_sq(r * r).unwrap_or(f64::NAN) * psi
            },
            0.0,
            pair.r_scale,
            cfg,
        )?
        .value
    };
    let h0 = pair.spectral_sq(0.0)?;
    let hat0 = if p == 0 { 0.0 } else { pair.gaussian(0.0)? };
    Ok(ScatteringTerms {
        scattering: -phi / (4.0 * PI),
        digamma: pf * dig / (2.0 * PI),
        trace_term: -0.25 * (pf - scattering.trace_phi_half()) * h0,
        log_two: pf * LN_2 * hat0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn elementary_laplace_transform() {
        let h = |t: f64| (-0.7 * t).exp();
        for &r in &[0.0, 0.5, 2.0] {
            let v = spectral_transform(&h, r).unwrap();
            assert!((v - 1.0 / (0.7 + r * r)).abs() < 1e-12);
        }
    }

    #[test]
    fn exponential_pair_is_consistent() {
        let pair = TestFunctionPair::exponential(0.6, 0.3).unwrap();
        let err = pair.transform_mismatch(&[0.0, 0.4, 1.5], &[0.0, 0.7, 2.5]).unwrap();
        assert!(err < 1e-10, "{err}");
    }

    #[test]
    fn eigenvalue_zero_maps_to_imaginary_r() {
        let pair = TestFunctionPair::exponential(0.6, 0.3).unwrap();
        let direct = spectral_transform_sq(&|t: f64| (-0.6 * t - 0.3 / t).exp(), -0.25).unwrap();
        let v = spectral_side_compact(&[0.0], &pair).unwrap();
        assert!((v - direct).abs() < 1e-11);
    }

    #[test]
    fn admissibility_rejects_slow_decay() {
        assert!(TestFunctionPair::numeric(|t| (-0.2 * t).exp(), 0.01).is_err());
        assert!(TestFunctionPair::numeric(|t| (-0.5 * t).exp(), 0.1).is_ok());
        assert!(TestFunctionPair::exponential(0.2, 1.0).is_err());
    }
}
