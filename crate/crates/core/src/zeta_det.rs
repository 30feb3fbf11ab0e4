//! Spectral and Hurwitz zeta functions by Dirichlet series and by
//! continued Mellin transforms of heat traces, heat coefficients, and
//! zeta-regularized determinants.

use std::cell::RefCell;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{DegeneratingFamily, SurfaceData};
use crate::special_fn::{
    integrate_breaks, integrate_tail, recip_gamma, recip_gamma_over, tricomi_gamma_star, QuadConfig,
    EULER_GAMMA,
};
use crate::traces::{
    check_alpha, standard_trace, degenerating_trace, Expansion, FiniteSpectrumTrace, HeatTrace, SurfaceTrace, TracePart,
};

fn mellin_cfg() -> QuadConfig {
    QuadConfig {
        abs_tol: 1e-13,
        rel_tol: 1e-12,
        max_evals: 400_000,
    }
}

/// Σ_{λ>0} λ^{−s} over a finite list.
pub fn spectral_zeta_series(eigenvalues: &[f64], s: Complex64) -> Complex64 {
    eigenvalues
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| (-s * l.ln()).exp())
        .sum()
}

/// Lower bound λ_n ≥ constant·n^exponent (n ≥ 1) for an infinite spectrum,
/// used to bound the tail of the Dirichlet series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeylCertificate {
    pub constant: f64,
    pub exponent: f64,
}

/// Σ_{λ_n>0} λ_n^{−s} for λ_n = eigenvalue(n), n = 0, 1, …, summed until
/// the certified tail is below `tol`.
pub fn spectral_zeta_generator<F>(eigenvalue: F, cert: WeylCertificate, s: Complex64, tol: f64) -> Result<Complex64>
where
    F: Fn(usize) -> f64,
{
    let gamma_sigma = cert.exponent * s.re;
    if !(gamma_sigma > 1.0) {
        return Err(Error::Divergence(format!(
            "Dirichlet series needs Re(s) > {} for this growth, got {}",
            1.0 / cert.exponent,
            s.re
        )));
    }
    if !(cert.constant > 0.0) {
        return Err(Error::domain("Weyl constant must be positive"));
    }
    let mut sum = Complex64::new(0.0, 0.0);
    let mut n = 0usize;
    loop {
        let l = eigenvalue(n);
        if l > 0.0 {
            sum += (-s * l.ln()).exp();
        }
        n += 1;
        if n >= 1 {
            let nf = n as f64;
            let tail = cert.constant.powf(-s.re) * nf.powf(1.0 - gamma_sigma) / (gamma_sigma - 1.0);
            if tail < tol {
                break;
            }
        }
        if n > 100_000_000 {
            return Err(Error::Divergence("tail bound not reached within 1e8 terms".into()));
        }
    }
    Ok(sum)
}

fn complex_nan() -> Complex64 {
    Complex64::new(f64::NAN, f64::NAN)
}

/// Integrates a fallible complex integrand; an inner error wins over the
/// quadrature failure it causes.
fn integrate_fallible<F>(f: F, breaks: &[f64], cfg: QuadConfig) -> Result<Complex64>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let first: RefCell<Option<Error>> = RefCell::new(None);
    let g = |t: f64| match f(t) {
        Ok(v) => v,
        Err(e) => {
            first.borrow_mut().get_or_insert(e);
            complex_nan()
        }
    };
    let res = integrate_breaks(g, breaks, cfg);
    if let Some(e) = first.into_inner() {
        return Err(e);
    }
    Ok(res?.value)
}

fn integrate_tail_fallible<F>(f: F, a: f64, scale: f64, cfg: QuadConfig) -> Result<Complex64>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let first: RefCell<Option<Error>> = RefCell::new(None);
    let g = |t: f64| match f(t) {
        Ok(v) => v,
        Err(e) => {
            first.borrow_mut().get_or_insert(e);
            complex_nan()
        }
    };
    let res = integrate_tail(g, a, scale, cfg);
    if let Some(e) = first.into_inner() {
        return Err(e);
    }
    Ok(res?.value)
}

fn t_power(t: f64, s: Complex64) -> Complex64 {
    ((s - 1.0) * t.ln()).exp()
}

/// Inputs of a continued Mellin transform (1/Γ(s))∫₀^∞ f(t)t^{s−1}dt:
/// `head` is f on [0, 1] with small-time expansion `terms` (valid below
/// `cutoff`), `tail` is f on [1, ∞) decaying at rate `decay`.
struct MellinParts<'a> {
    head: &'a dyn Fn(f64) -> Result<Complex64>,
    terms: Vec<(f64, Complex64)>,
    cutoff: f64,
    tail: &'a dyn Fn(f64) -> Result<Complex64>,
    decay: f64,
    cfg: QuadConfig,
}

/// Head-integral breakpoints: geometric from `a` to 1.
fn log_breaks(a: f64) -> Vec<f64> {
    let mut b = vec![1.0];
    let mut x = 1.0;
    while x * 0.1 > a {
        x *= 0.1;
        b.push(x);
    }
    b.push(a);
    b.reverse();
    b
}

fn continued_mellin(parts: &MellinParts, s: Complex64, n: usize) -> Result<Complex64> {
    let nf = n as f64;
    if s.re + nf <= 0.0 {
        return Err(Error::InsufficientSubtractions { re_s: s.re, n });
    }
    let max_p = parts.terms.iter().map(|t| t.0).fold(f64::NEG_INFINITY, f64::max);
    if !parts.terms.is_empty() && nf > max_p + 1.0 {
        return Err(Error::domain(format!(
            "{n} subtractions requested but the expansion stops at t^{max_p}"
        )));
    }
    let subtracted: Vec<(f64, Complex64)> = parts.terms.iter().cloned().filter(|t| t.0 < nf).collect();
    let kept: Vec<(f64, Complex64)> = parts.terms.iter().cloned().filter(|t| t.0 >= nf).collect();

    let mut rational = Complex64::new(0.0, 0.0);
    for &(p, c) in &subtracted {
        rational += c * recip_gamma_over(s, p)?;
    }

    let remainder = |t: f64| -> Result<Complex64> {
        let mut v = (parts.head)(t)?;
        for &(p, c) in &subtracted {
            v -= c * t.powf(p);
        }
        Ok(v * t_power(t, s))
    };
    let cfg = parts.cfg;
    // Below the cutoff the kept terms are integrated exactly; with no
    // expansion terms at all the function is flat at 0 and [0, 1] is
    // integrated directly.
    let head = if parts.terms.is_empty() {
        let mut breaks = vec![0.0];
        breaks.extend(log_breaks(1e-12));
        integrate_fallible(remainder, &breaks, cfg)?
    } else {
        let a = parts.cutoff.min(1.0);
        let mut v = integrate_fallible(remainder, &log_breaks(a), cfg)?;
        for &(p, c) in &kept {
            v += c * ((s + p) * a.ln()).exp() / (s + p);
        }
        v
    };

    if !(parts.decay > 0.0) {
        return Err(Error::domain("trace does not decay at infinity"));
    }
    let scale = s.re.max(1.0) / parts.decay;
    let tail = integrate_tail_fallible(
        |t| {
            let v = (parts.tail)(t)?;
            Ok(if v == Complex64::default() { v } else { v * t_power(t, s) })
        },
        1.0,
        scale,
        cfg,
    )?;
    Ok(rational + recip_gamma(s) * (head + tail))
}

/// Result of a zeta evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZetaEvaluation {
    pub s: Complex64,
    pub value: Complex64,
    pub n_subtractions: usize,
    /// Leading pole (location, residue) of the continuation.
    pub pole: Option<(f64, f64)>,
}

/// max(0, ⌈−Re s⌉ + 1).
pub fn default_subtractions(s: Complex64) -> usize {
    let k = (-s.re).ceil() + 1.0;
    if k > 0.0 {
        k as usize
    } else {
        0
    }
}

/// Expansion of the trace, or a least-squares fit when none is known.
fn expansion_of(trace: &dyn HeatTrace) -> Result<Expansion> {
    if let Some(e) = trace.expansion() {
        return Ok(e);
    }
    let hc = heat_coefficients(trace, 4)?;
    let mut e = Expansion::new(hc.window.0);
    for (k, &b) in hc.b.iter().enumerate() {
        e.add_term(k as f64 - 1.0, b);
    }
    Ok(e)
}

fn check_zero_modes(trace: &dyn HeatTrace, c_m: f64) -> Result<()> {
    if let Some(z) = trace.zero_modes() {
        if (z - c_m).abs() > 1e-12 {
            return Err(Error::domain(format!(
                "trace tends to {z} at infinity but c_M = {c_m} was given"
            )));
        }
    }
    Ok(())
}

fn leading_pole(terms: &[(f64, Complex64)]) -> Option<(f64, f64)> {
    terms
        .iter()
        .find(|t| t.0 < 0.0 && t.1.norm() > 0.0)
        .map(|&(p, c)| (-p, (c * recip_gamma(Complex64::new(-p, 0.0))).re))
}

/// (1/Γ(s))∫₀^∞ [Θ(t) − c_M] t^{s−1} dt continued with `n` subtractions.
pub fn spectral_zeta_mellin(
    trace: &dyn HeatTrace,
    c_m: f64,
    s: Complex64,
    n_subtractions: Option<usize>,
) -> Result<ZetaEvaluation> {
    check_zero_modes(trace, c_m)?;
    let n = n_subtractions.unwrap_or_else(|| default_subtractions(s));
    let e = expansion_of(trace)?;
    let mut e = e;
    e.add_term(0.0, -c_m);
    let terms: Vec<(f64, Complex64)> = e
        .terms
        .iter()
        .filter(|t| t.1 != 0.0)
        .map(|&(p, c)| (p, Complex64::new(c, 0.0)))
        .collect();
    let f = |t: f64| Ok(Complex64::new(trace.value(t)? - c_m, 0.0));
    let parts = MellinParts {
        head: &f,
        terms: terms.clone(),
        cutoff: e.cutoff,
        tail: &f,
        decay: trace.decay_rate(),
        cfg: mellin_cfg(),
    };
    let value = continued_mellin(&parts, s, n)?;
    Ok(ZetaEvaluation {
        s,
        value,
        n_subtractions: n,
        pole: leading_pole(&terms),
    })
}

/// Residue of the continued zeta at a simple pole `s0`, from
/// (ε/2)[ζ(s0+ε) − ζ(s0−ε)] at ε and ε/2 combined by Richardson.
pub fn zeta_residue(trace: &dyn HeatTrace, c_m: f64, s0: f64) -> Result<f64> {
    let sym = |eps: f64| -> Result<f64> {
        let up = spectral_zeta_mellin(trace, c_m, Complex64::new(s0 + eps, 0.0), None)?.value.re;
        let down = spectral_zeta_mellin(trace, c_m, Complex64::new(s0 - eps, 0.0), None)?.value.re;
        Ok(0.5 * eps * (up - down))
    };
    let eps = 1e-3;
    let a = sym(eps)?;
    let b = sym(0.5 * eps)?;
    Ok((4.0 * b - a) / 3.0)
}

/// Coefficients of Θ(t) ~ b_{−1}/t + b_0 + b_1 t + … from a fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatCoefficients {
    /// b_{−1}, b_0, …, b_n.
    pub b: Vec<f64>,
    pub window: (f64, f64),
    /// RMS misfit of t·Θ(t) on the sample points.
    pub fit_residual: f64,
}

impl HeatCoefficients {
    /// b_k for k ≥ −1.
    pub fn get(&self, k: i32) -> f64 {
        self.b.get((k + 1) as usize).copied().unwrap_or(0.0)
    }
}

pub const DEFAULT_FIT_WINDOW: (f64, f64) = (1e-4, 4e-3);

pub fn heat_coefficients(trace: &dyn HeatTrace, n: usize) -> Result<HeatCoefficients> {
    heat_coefficients_in(trace, n, DEFAULT_FIT_WINDOW)
}

/// Least-squares fit of t·Θ(t) by a polynomial of degree n+1 in t on
/// Chebyshev points of `window`.
pub fn heat_coefficients_in(trace: &dyn HeatTrace, n: usize, window: (f64, f64)) -> Result<HeatCoefficients> {
    let (lo, hi) = window;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::domain(format!("fit window must satisfy 0 < lo < hi, got {window:?}")));
    }
    let degree = n + 1;
    let m = (4 * (degree + 1)).max(40);
    let ts: Vec<f64> = (0..m)
        .map(|k| {
            let x = (std::f64::consts::PI * (k as f64 + 0.5) / m as f64).cos();
            0.5 * (lo + hi) + 0.5 * (hi - lo) * x
        })
        .collect();
    let ys = crate::par::map(&ts, |&t| trace.value(t).map(|v| v * t))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let a = DMatrix::from_fn(m, degree + 1, |i, j| (ts[i] / hi).powi(j as i32));
    let y = DVector::from_vec(ys.clone());
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > 0.0) || smax / smin > 1e13 {
        return Err(Error::IllConditioned(format!("condition number {:e}", smax / smin)));
    }
    let coef = svd
        .solve(&y, 1e-15 * smax)
        .map_err(|e| Error::IllConditioned(e.to_string()))?;
    let fitted = &a * &coef;
    let rms = ((fitted - y).norm_squared() / m as f64).sqrt();
    let b = coef.iter().enumerate().map(|(j, c)| c / hi.powi(j as i32)).collect();
    Ok(HeatCoefficients {
        b,
        window,
        fit_residual: rms,
    })
}

/// Σ_{λ>0} (z + λ)^{−s} over a finite list.
pub fn hurwitz_zeta_series(eigenvalues: &[f64], s: Complex64, z: Complex64) -> Result<Complex64> {
    let mut sum = Complex64::new(0.0, 0.0);
    for &l in eigenvalues.iter().filter(|&&l| l > 0.0) {
        let w = z + l;
        if w.norm() == 0.0 {
            return Err(Error::Pole(format!("z = {z} equals -{l}")));
        }
        sum += (-s * w.ln()).exp();
    }
    Ok(sum)
}

/// Eigenvalues moved out of the trace before the Laplace–Mellin transform,
/// and the decay rate of what is left; the transform converges for
/// Re(z) > −`next`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StripStage {
    pub peeled: Vec<f64>,
    pub next: f64,
}

impl StripStage {
    /// Nothing peeled; the strip is set by the trace's own decay.
    pub fn direct(trace: &dyn HeatTrace) -> Self {
        StripStage {
            peeled: Vec::new(),
            next: trace.decay_rate(),
        }
    }

    /// Peels the k smallest positive eigenvalues of a finite spectrum.
    pub fn finite(eigenvalues: &[f64], k: usize) -> Result<Self> {
        let mut pos: Vec<f64> = eigenvalues.iter().cloned().filter(|&l| l > 0.0).collect();
        pos.sort_by(f64::total_cmp);
        if k > pos.len() {
            return Err(Error::domain(format!("cannot peel {k} of {} eigenvalues", pos.len())));
        }
        let next = pos.get(k).copied().unwrap_or(f64::INFINITY);
        let peeled = pos[..k].to_vec();
        Ok(StripStage { peeled, next })
    }
}

/// Taylor coefficients of e^{−zt} times a list of terms, truncated at
/// exponent `max_p`.
fn times_exponential(terms: &[(f64, Complex64)], z: Complex64, max_p: f64) -> Vec<(f64, Complex64)> {
    let mut out: Vec<(f64, Complex64)> = Vec::new();
    for &(p, c) in terms {
        let mut coef = c;
        let mut k = 0usize;
        while p + k as f64 <= max_p + 1e-12 {
            let e = p + k as f64;
            match out.iter_mut().find(|t| t.0 == e) {
                Some(slot) => slot.1 += coef,
                None => out.push((e, coef)),
            }
            k += 1;
            coef = coef * (-z) / k as f64;
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// ζ(s, z) = (1/Γ(s))∫₀^∞ [Θ(t) − c_M] e^{−zt} t^{s−1} dt, continued in s at
/// fixed z, split as [1, ∞) + continued [0, 1] − c_M·γ*(s, z) with the
/// stage's peeled eigenvalues added back as (z + λ)^{−s}.
pub fn hurwitz_zeta_trace(
    trace: &dyn HeatTrace,
    c_m: f64,
    s: Complex64,
    z: Complex64,
    stage: &StripStage,
    n_subtractions: Option<usize>,
) -> Result<ZetaEvaluation> {
    check_zero_modes(trace, c_m)?;
    if !(z.re > -stage.next) {
        return Err(Error::StripViolation {
            re_z: z.re,
            bound: -stage.next,
        });
    }
    let n = n_subtractions.unwrap_or_else(|| default_subtractions(s));
    let e = expansion_of(trace)?;
    let max_p = e.terms.iter().map(|t| t.0).fold(0.0, f64::max);
    let mut base: Vec<(f64, Complex64)> = e.terms.iter().map(|&(p, c)| (p, Complex64::new(c, 0.0))).collect();
    let peel_terms = crate::traces::small_eigenvalue_expansion(&stage.peeled, (max_p.floor() as usize) + 1);
    for &(p, c) in &peel_terms.terms {
        match base.iter_mut().find(|t| t.0 == p) {
            Some(slot) => slot.1 += c,
            None => base.push((p, Complex64::new(c, 0.0))),
        }
    }
    base.sort_by(|a, b| a.0.total_cmp(&b.0));
    let terms: Vec<(f64, Complex64)> = times_exponential(&base, z, max_p)
        .into_iter()
        .filter(|t| t.1.norm() != 0.0)
        .collect();
    let cutoff = e.cutoff.min(peel_terms.cutoff).min(1.0 / z.norm().max(1.0));
    debug_assert!(cutoff > 0.0);

    let peeled_sum = |t: f64| stage.peeled.iter().map(|&l| (-l * t).exp()).sum::<f64>();
    let head = |t: f64| Ok(Complex64::new(trace.value(t)? - peeled_sum(t), 0.0) * (-z * t).exp());
    let tail = |t: f64| {
        let theta = trace.value(t)?;
        let peeled = peeled_sum(t);
        let v = theta - c_m - peeled;
        // below roundoff of the subtraction the e^{−zt} weight only amplifies noise
        let floor = 8.0 * f64::EPSILON * (theta.abs() + c_m.abs() + peeled);
        Ok(if v.abs() <= floor { Complex64::default() } else { v * (-z * t).exp() })
    };

    // [0,1] of the head through the continuation; its [1,∞) piece is zero.
    let zero = |_t: f64| Ok(Complex64::new(0.0, 0.0));
    let head_parts = MellinParts {
        head: &head,
        terms: terms.clone(),
        cutoff,
        tail: &zero,
        decay: 1.0,
        cfg: mellin_cfg(),
    };
    let head_value = continued_mellin(&head_parts, s, n)?;
    let tail_parts = MellinParts {
        head: &zero,
        terms: Vec::new(),
        cutoff: 1.0,
        tail: &tail,
        decay: stage.next + z.re,
        // a growing weight e^{−zt} amplifies the cancellation in Θ − c_M − peeled
        cfg: if z.re < 0.0 {
            QuadConfig {
                abs_tol: 1e-12,
                rel_tol: 1e-10,
                max_evals: 400_000,
            }
        } else {
            mellin_cfg()
        },
    };
    let tail_value = continued_mellin(&tail_parts, s, n)?;
    let mut value = head_value + tail_value - c_m * tricomi_gamma_star(s, z);
    for &l in &stage.peeled {
        value += (-s * (z + l).ln()).exp();
    }
    Ok(ZetaEvaluation {
        s,
        value,
        n_subtractions: n,
        pole: leading_pole(&terms),
    })
}

/// Σ_{λ>α} λ^{−s} for a finite spectrum.
pub fn truncated_zeta_finite(eigenvalues: &[f64], alpha: f64, s: Complex64) -> Result<Complex64> {
    check_alpha(eigenvalues, alpha)?;
    let kept: Vec<f64> = eigenvalues.iter().cloned().filter(|&l| l > alpha).collect();
    Ok(spectral_zeta_series(&kept, s))
}

/// Mellin transform of the α-truncated standard trace of a model surface.
pub fn truncated_zeta_surface(surface: &SurfaceData, alpha: f64, s: Complex64) -> Result<ZetaEvaluation> {
    let trace = SurfaceTrace::standard(surface.clone()).truncated(alpha)?;
    spectral_zeta_mellin(&trace, 0.0, s, None)
}

/// Spectral data a determinant can be computed from.
pub enum SpectralInput<'a> {
    Finite(&'a [f64]),
    Trace { trace: &'a dyn HeatTrace, c_m: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Determinant {
    pub zeta_prime_zero: f64,
    pub log_det: f64,
    pub det: f64,
    pub step: f64,
}

pub const DERIVATIVE_STEP: f64 = 1e-4;

/// exp(−ζ′(0)) with ζ′(0) from central differences at ±h and ±h/2,
/// combined by Richardson extrapolation.
pub fn det_laplacian(input: SpectralInput) -> Result<Determinant> {
    let zeta = |s: f64| -> Result<f64> {
        let s = Complex64::new(s, 0.0);
        match &input {
            SpectralInput::Finite(e) => Ok(spectral_zeta_series(e, s).re),
            SpectralInput::Trace { trace, c_m } => Ok(spectral_zeta_mellin(*trace, *c_m, s, Some(1))?.value.re),
        }
    };
    let h = DERIVATIVE_STEP;
    let d1 = (zeta(h)? - zeta(-h)?) / (2.0 * h);
    let d2 = (zeta(0.5 * h)? - zeta(-0.5 * h)?) / h;
    let zp = (4.0 * d2 - d1) / 3.0;
    Ok(Determinant {
        zeta_prime_zero: zp,
        log_det: -zp,
        det: (-zp).exp(),
        step: h,
    })
}

/// −FP∫₀^∞ [Θ(t) − c_M] dt/t − γ·b₀, where b₀ is the t⁰ coefficient of
/// Θ − c_M; this equals −ζ′(0) (for a finite spectrum, Σ log λ).
pub fn log_det_integral(trace: &dyn HeatTrace, c_m: f64) -> Result<f64> {
    check_zero_modes(trace, c_m)?;
    let mut e = expansion_of(trace)?;
    e.add_term(0.0, -c_m);
    let a = e.cutoff.min(1.0);
    let b0 = e.coefficient(0.0);
    let singular: Vec<(f64, f64)> = e.terms.iter().cloned().filter(|t| t.0 <= 0.0).collect();
    let cfg = mellin_cfg();
    let head = integrate_fallible(
        |t| {
            let mut v = trace.value(t)? - c_m;
            for &(p, c) in &singular {
                v -= c * t.powf(p);
            }
            Ok(Complex64::new(v / t, 0.0))
        },
        &log_breaks(a),
        cfg,
    )?
    .re;
    let mut finite_part = head;
    for &(p, c) in &e.terms {
        if p > 0.0 {
            finite_part += c * a.powf(p) / p;
        } else if p < 0.0 {
            finite_part += c / p;
        }
    }
    let decay = trace.decay_rate();
    if !(decay > 0.0) {
        return Err(Error::domain("trace does not decay at infinity"));
    }
    let tail = integrate_tail_fallible(|t| Ok(Complex64::new((trace.value(t)? - c_m) / t, 0.0)), 1.0, 1.0 / decay, cfg)?.re;
    finite_part += tail;
    Ok(-finite_part - EULER_GAMMA * b0)
}

/// What a degenerating-subtraction experiment regularizes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SubtractionMode {
    /// ζ^{(α)}(s) − (1/Γ(s))∫ DTr t^{s−1} dt.
    Zeta { s: Complex64 },
    /// Same with the weight e^{−zt}.
    Hurwitz { s: Complex64, z: Complex64 },
    /// log det^{(α)} + regularized ∫ DTr dt/t.
    LogDet,
    /// Str^{(α)}(t) − DTr(t).
    Trace { t: f64 },
}

/// Regularized values along a family and their successive differences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegenerationSequence {
    pub orders: Vec<Vec<u64>>,
    pub values: Vec<Complex64>,
    /// |v_{k+1} − v_k|.
    pub differences: Vec<f64>,
    /// |v_k − v_last|, the last member standing in for the limit.
    pub distances_to_last: Vec<f64>,
    /// Successive differences strictly decrease.
    pub shrinking: bool,
}

impl DegenerationSequence {
    pub fn from_values(orders: Vec<Vec<u64>>, values: Vec<Complex64>) -> Self {
        let differences: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
        let last = values.last().copied().unwrap_or_default();
        let distances_to_last = values.iter().map(|v| (v - last).norm()).collect();
        let shrinking = differences.windows(2).all(|w| w[1] < w[0]);
        DegenerationSequence {
            orders,
            values,
            differences,
            distances_to_last,
            shrinking,
        }
    }
}

fn member_value(m: &SurfaceData, alpha: f64, mode: SubtractionMode) -> Result<Complex64> {
    let full = SurfaceTrace::standard(m.clone()).truncated(alpha)?;
    let degenerating = SurfaceTrace::new(m.clone(), TracePart::Degenerating);
    match mode {
        SubtractionMode::Zeta { s } => {
            let a = spectral_zeta_mellin(&full, 0.0, s, None)?.value;
            let b = spectral_zeta_mellin(&degenerating, 0.0, s, None)?.value;
            Ok(a - b)
        }
        SubtractionMode::Hurwitz { s, z } => {
            let a = hurwitz_zeta_trace(&full, 0.0, s, z, &StripStage::direct(&full), None)?.value;
            let b = hurwitz_zeta_trace(&degenerating, 0.0, s, z, &StripStage::direct(&degenerating), None)?.value;
            Ok(a - b)
        }
        SubtractionMode::LogDet => {
            let rem = SurfaceTrace::new(m.clone(), TracePart::Remainder).truncated(alpha)?;
            Ok(Complex64::new(log_det_integral(&rem, 0.0)?, 0.0))
        }
        SubtractionMode::Trace { t } => {
            let s = standard_trace(m, t)? - crate::traces::small_mode_sum(m.small_eigenvalues(), alpha, t);
            Ok(Complex64::new(s - degenerating_trace(m, t)?, 0.0))
        }
    }
}

pub fn degeneration_subtraction_zeta(
    family: &DegeneratingFamily,
    alpha: f64,
    mode: SubtractionMode,
) -> Result<DegenerationSequence> {
    let members = family.members()?;
    let values = crate::par::map(&members, |m| member_value(m, alpha, mode))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(DegenerationSequence::from_values(family.schedule().to_vec(), values))
}

/// Finite spectrum as a trace provider.
pub fn finite_trace(eigenvalues: &[f64]) -> Result<FiniteSpectrumTrace> {
    FiniteSpectrumTrace::new(eigenvalues.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::traces::CircleTrace;
    use std::f64::consts::PI;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn series_examples() {
        assert!((spectral_zeta_series(&[1.0, 2.0, 3.0], c(1.0)).re - 11.0 / 6.0).abs() < 1e-15);
        assert_eq!(spectral_zeta_series(&[0.0, 1.0], c(1.0)).re, 1.0);
    }

    #[test]
    fn circle_series_and_divergence() {
        let cert = WeylCertificate {
            constant: 0.25,
            exponent: 2.0,
        };
        let eig = |n: usize| ((n + 1) / 2) as f64 * ((n + 1) / 2) as f64;
        let v = spectral_zeta_generator(eig, cert, c(2.0), 1e-13).unwrap();
        assert!((v.re - PI.powi(4) / 45.0).abs() < 1e-12);
        let flat = WeylCertificate {
            constant: 1.0,
            exponent: 1.0,
        };
        assert!(matches!(spectral_zeta_generator(|n| n as f64, flat, c(1.0), 1e-10), Err(Error::Divergence(_))));
    }

    #[test]
    fn mellin_matches_series() {
        let e = [1.0, 2.0, 3.0];
        let tr = finite_trace(&e).unwrap();
        let s = Complex64::new(2.0, 0.7);
        let m = spectral_zeta_mellin(&tr, 0.0, s, None).unwrap();
        let series = spectral_zeta_series(&e, s);
        assert!((m.value - series).norm() < 1e-10, "{} {}", m.value, series);
    }

    #[test]
    fn continuation_orders_agree() {
        let e = [0.0, 0.5, 1.5, 4.0];
        let tr = finite_trace(&e).unwrap();
        let s = c(-0.4);
        let a = spectral_zeta_mellin(&tr, 1.0, s, Some(1)).unwrap().value;
        let b = spectral_zeta_mellin(&tr, 1.0, s, Some(2)).unwrap().value;
        let want = spectral_zeta_series(&e, s);
        assert!((a - b).norm() < 1e-10 && (a - want).norm() < 1e-10);
        assert!(matches!(
            spectral_zeta_mellin(&tr, 1.0, c(-1.5), Some(1)),
            Err(Error::InsufficientSubtractions { .. })
        ));
    }

    #[test]
    fn circle_zeta_at_zero() {
        let z = spectral_zeta_mellin(&CircleTrace, 1.0, c(0.0), None).unwrap();
        assert!((z.value.re + 1.0).abs() < 1e-12);
        assert_eq!(z.pole.map(|p| p.0), Some(0.5));
    }

    #[test]
    fn zero_mode_mismatch_is_rejected() {
        let tr = finite_trace(&[0.0, 1.0]).unwrap();
        assert!(spectral_zeta_mellin(&tr, 0.0, c(2.0), None).is_err());
    }

    #[test]
    fn hurwitz_examples() {
        assert!((hurwitz_zeta_series(&[1.0], c(2.0), c(1.0)).unwrap().re - 0.25).abs() < 1e-15);
        let e = [0.0, 0.5, 2.0, 3.0];
        let tr = finite_trace(&e).unwrap();
        let s = c(1.7);
        let z = Complex64::new(0.3, 0.2);
        let direct = hurwitz_zeta_trace(&tr, 1.0, s, z, &StripStage::direct(&tr), None).unwrap().value;
        let want = hurwitz_zeta_series(&e, s, z).unwrap();
        assert!((direct - want).norm() < 1e-10, "{direct} {want}");
        let z = c(-0.4);
        let shifted = hurwitz_zeta_trace(&tr, 1.0, s, z, &StripStage::finite(&e, 1).unwrap(), None)
            .unwrap()
            .value;
        let want = hurwitz_zeta_series(&e, s, z).unwrap();
        assert!((shifted - want).norm() < 1e-9, "{shifted} {want}");
        let z = c(-0.1);
        let direct = hurwitz_zeta_trace(&tr, 1.0, s, z, &StripStage::direct(&tr), None).unwrap().value;
        assert!((direct - hurwitz_zeta_series(&e, s, z).unwrap()).norm() < 1e-8);
        assert!(matches!(
            hurwitz_zeta_trace(&tr, 1.0, s, c(-0.7), &StripStage::direct(&tr), None),
            Err(Error::StripViolation { .. })
        ));
    }

    #[test]
    fn determinants() {
        let d = det_laplacian(SpectralInput::Finite(&[1.0, 2.0, 3.0])).unwrap();
        assert!((d.det - 6.0).abs() < 1e-9);
        let tr = finite_trace(&[1.0, 2.0, 3.0]).unwrap();
        let ld = log_det_integral(&tr, 0.0).unwrap();
        assert!((ld - 6f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn synthetic_fit_recovers_coefficients() {
        let tr = crate::traces::FnTrace::new(|t| Ok(0.3 / t + 1.7), 1.0);
        let hc = heat_coefficients(&tr, 2).unwrap();
        assert!((hc.get(-1) - 0.3).abs() < 1e-12 && (hc.get(0) - 1.7).abs() < 1e-9);
    }
}
