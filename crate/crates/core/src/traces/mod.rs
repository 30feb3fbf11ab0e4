//! Heat-trace components of a surface with cone points, their small-time
//! expansions, and the trace-formula transforms.

pub mod elliptic;
mod expansion;
mod formula;
mod series;

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{Geodesic, SurfaceData};
use crate::hplane::heat_kernel_h_with;
use crate::special_fn::{integrate_tail, QuadConfig};

pub use elliptic::{elliptic_cone_r, elliptic_cone_u, elliptic_cone_u_termwise};
pub use expansion::{
    elliptic_expansion, hyperbolic_cutoff, identity_expansion, small_eigenvalue_expansion,
    Expansion, DEFAULT_EXPANSION_TERMS,
};
pub use formula::{
    gaussian_transform, geometric_side, noncompact_spectral_terms, spectral_side_compact,
    spectral_transform, spectral_transform_sq, GeometricSide, Provenance, ScatteringTerms,
    TestFunctionPair,
};
pub use series::{CircleTrace, FiniteSpectrumTrace, FnTrace, HeatTrace, SurfaceTrace, TracePart, TraceSeries};

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::domain(format!("trace needs t > 0, got {t}")));
    }
    Ok(())
}

/// ITr = vol·e^{−t/4}/(4t)·∫₀^∞ e^{−tr²} sech²(πr) dr.
pub fn identity_trace(vol: f64, t: f64) -> Result<f64> {
    identity_trace_with(vol, t, QuadConfig::tight())
}

pub fn identity_trace_with(vol: f64, t: f64, cfg: QuadConfig) -> Result<f64> {
    check_time(t)?;
    if !(vol > 0.0) {
        return Err(Error::domain(format!("volume must be positive, got {vol}")));
    }
    let res = integrate_tail(
        |r: f64| {
            let e = (-2.0 * PI * r).exp();
            (-t * r * r).exp() * 4.0 * e / ((1.0 + e) * (1.0 + e))
        },
        0.0,
        (0.5 / PI).min(1.0 / t.sqrt()),
        cfg,
    )?;
    Ok(vol * (-t / 4.0).exp() / (4.0 * t) * res.value)
}

/// Σ_γ mult·Σ_{n≥1} ℓ/sinh(nℓ/2)·e^{−(nℓ)²/4t}, times e^{−t/4}/√(16πt).
pub fn hyperbolic_trace(lengths: &[Geodesic], t: f64) -> Result<f64> {
    check_time(t)?;
    let mut total = 0.0;
    for g in lengths {
        let l = g.length;
        if !(l > 0.0) {
            return Err(Error::domain(format!("geodesic length must be positive, got {l}")));
        }
        let mut sum = 0.0;
        let mut n = 1u64;
        loop {
            let x = 0.5 * n as f64 * l;
            let nl = n as f64 * l;
            let log_term = (2.0 * l).ln() - x - (-(-2.0 * x).exp()).ln_1p() - nl * nl / (4.0 * t);
            let term = log_term.exp();
            sum += term;
            // successive terms shrink at least by this ratio from here on
            let ratio = (-((2 * n + 1) as f64) * l * l / (4.0 * t) - 0.5 * l).exp();
            if term == 0.0 || term * ratio / (1.0 - ratio) < 1e-18 * sum {
                break;
            }
            n += 1;
            if n > 10_000_000 {
                return Err(Error::Divergence("hyperbolic trace series did not settle".into()));
            }
        }
        total += g.multiplicity as f64 * sum;
    }
    Ok((-t / 4.0).exp() / (16.0 * PI * t).sqrt() * total)
}

/// Elliptic trace, u-form, over the given cone orders.
pub fn elliptic_trace_u(orders: &[u64], t: f64) -> Result<f64> {
    elliptic_trace_u_with(orders, t, QuadConfig::tight())
}

pub fn elliptic_trace_u_with(orders: &[u64], t: f64, cfg: QuadConfig) -> Result<f64> {
    check_time(t)?;
    orders.iter().map(|&q| elliptic_cone_u(q, t, cfg)).sum()
}

/// Elliptic trace, r-form, over the given cone orders.
pub fn elliptic_trace_r(orders: &[u64], t: f64) -> Result<f64> {
    check_time(t)?;
    let cfg = QuadConfig::tight();
    orders.iter().map(|&q| elliptic_cone_r(q, t, cfg)).sum()
}

/// Elliptic trace over the degenerating cone points only.
pub fn degenerating_trace(surface: &SurfaceData, t: f64) -> Result<f64> {
    elliptic_trace_u(&surface.degenerating_orders(), t)
}

/// HTr + ETr + vol·K(t, 0).
pub fn standard_trace(surface: &SurfaceData, t: f64) -> Result<f64> {
    Ok(trace_components(surface, t)?.standard)
}

/// Rejects α outside [0, 1/4) or equal to a listed small eigenvalue.
pub fn check_alpha(small_eigenvalues: &[f64], alpha: f64) -> Result<()> {
    if !(0.0..0.25).contains(&alpha) {
        return Err(Error::domain(format!("alpha must lie in [0, 1/4), got {alpha}")));
    }
    if small_eigenvalues.iter().any(|&l| (l - alpha).abs() <= 1e-12) {
        return Err(Error::AlphaCollision(alpha));
    }
    Ok(())
}

/// Σ_{λ ≤ α} e^{−λt} over the listed small eigenvalues.
pub(crate) fn small_mode_sum(small_eigenvalues: &[f64], alpha: f64, t: f64) -> f64 {
    small_eigenvalues
        .iter()
        .filter(|&&l| l <= alpha)
        .map(|&l| (-l * t).exp())
        .sum()
}

/// Str minus the contributions e^{−λt} of small eigenvalues λ ≤ α.
pub fn truncated_trace(surface: &SurfaceData, alpha: f64, t: f64) -> Result<f64> {
    check_alpha(surface.small_eigenvalues(), alpha)?;
    Ok(standard_trace(surface, t)? - small_mode_sum(surface.small_eigenvalues(), alpha, t))
}

/// Every component of the trace at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceComponents {
    pub t: f64,
    pub identity: f64,
    pub hyperbolic: f64,
    pub elliptic: f64,
    pub degenerating: f64,
    pub standard: f64,
}

pub fn trace_components(surface: &SurfaceData, t: f64) -> Result<TraceComponents> {
    check_time(t)?;
    let cfg = QuadConfig::tight();
    let identity = surface.volume() * heat_kernel_h_with(t, 0.0, cfg)?;
    let hyperbolic = hyperbolic_trace(surface.lengths(), t)?;
    let mut elliptic = 0.0;
    let mut degenerating = 0.0;
    for (i, &q) in surface.elliptic_orders().iter().enumerate() {
        let v = elliptic_cone_u(q, t, cfg)?;
        elliptic += v;
        if surface.degenerating_indices().contains(&i) {
            degenerating += v;
        }
    }
    Ok(TraceComponents {
        t,
        identity,
        hyperbolic,
        elliptic,
        degenerating,
        standard: hyperbolic + elliptic + identity,
    })
}

/// Str − DTr, assembled from the pieces that survive the cancellation:
/// vol·K(t,0) + HTr + ETr over the fixed cones.
pub fn remainder_trace(surface: &SurfaceData, t: f64) -> Result<f64> {
    check_time(t)?;
    let cfg = QuadConfig::tight();
    let identity = surface.volume() * heat_kernel_h_with(t, 0.0, cfg)?;
    let hyperbolic = hyperbolic_trace(surface.lengths(), t)?;
    let fixed = elliptic_trace_u_with(&surface.fixed_orders(), t, cfg)?;
    Ok(identity + hyperbolic + fixed)
}
