//! Weighted spectral counting functions, compact and with cusps.

use std::f64::consts::{LN_2, PI};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special_fn::{digamma, gamma, integrate_weighted_symmetric, QuadConfig};

type PhiFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Scattering data on the critical line: φ′/φ(1/2 + ir), Tr Φ(1/2), the
/// resonances s_k ∈ (1/2, 1] and the lower-bound constant q_M.
#[derive(Clone)]
pub struct ScatteringModel {
    phi_log_deriv: Option<PhiFn>,
    trace_phi_half: f64,
    resonances: Vec<f64>,
    q_m: f64,
}

impl std::fmt::Debug for ScatteringModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ScatteringModel")
            .field("trivial", &self.is_trivial())
            .field("trace_phi_half", &self.trace_phi_half)
            .field("resonances", &self.resonances)
            .field("q_m", &self.q_m)
            .finish()
    }
}

/// Critical-line sample points used by [`ScatteringModel::validate`].
const VALIDATION_SAMPLES: usize = 401;
const VALIDATION_RADIUS: f64 = 50.0;

impl ScatteringModel {
    pub fn new(
        phi_log_deriv: impl Fn(f64) -> f64 + Send + Sync + 'static,
        trace_phi_half: f64,
        resonances: Vec<f64>,
        q_m: f64,
    ) -> Self {
        ScatteringModel {
            phi_log_deriv: Some(Arc::new(phi_log_deriv)),
            trace_phi_half,
            resonances,
            q_m,
        }
    }

    /// φ′/φ ≡ value.
    pub fn constant(value: f64, trace_phi_half: f64, resonances: Vec<f64>, q_m: f64) -> Self {
        Self::new(move |_| value, trace_phi_half, resonances, q_m)
    }

    /// No scattering at all: the only valid model for a surface without cusps.
    pub fn trivial() -> Self {
        ScatteringModel {
            phi_log_deriv: None,
            trace_phi_half: 0.0,
            resonances: Vec::new(),
            q_m: f64::NAN,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.phi_log_deriv.is_none()
    }

    pub fn phi_log_deriv(&self, r: f64) -> f64 {
        self.phi_log_deriv.as_ref().map_or(0.0, |f| f(r))
    }

    pub fn trace_phi_half(&self) -> f64 {
        self.trace_phi_half
    }

    pub fn resonances(&self) -> &[f64] {
        &self.resonances
    }

    pub fn q_m(&self) -> f64 {
        self.q_m
    }

    /// −φ′/φ(r) − Σ_k (1 − s_k)/((s_k − 1/2)² + r²).
    pub fn lower_bound_margin(&self, r: f64) -> f64 {
        let res: f64 = self
            .resonances
            .iter()
            .map(|&s| (1.0 - s) / ((s - 0.5).powi(2) + r * r))
            .sum();
        -self.phi_log_deriv(r) - res
    }

    /// Checks |Tr Φ(1/2)| ≤ p and, for p > 0, the sampled lower bound
    /// −φ′/φ − Σ(1−s_k)/((s_k−1/2)²+r²) ≥ 2 log q_M.
    pub fn validate(&self, p: u32) -> Result<()> {
        let pf = p as f64;
        if !self.trace_phi_half.is_finite() || self.trace_phi_half.abs() > pf + 1e-12 {
            return Err(Error::ModelValidation(format!(
                "|Tr Phi(1/2)| = {} exceeds the cusp count {p}",
                self.trace_phi_half.abs()
            )));
        }
        if p == 0 {
            if !self.is_trivial() {
                return Err(Error::ModelValidation("a surface without cusps has no scattering".into()));
            }
            return Ok(());
        }
        if self.is_trivial() {
            return Err(Error::ModelValidation(format!("{p} cusps need a scattering model")));
        }
        if !(self.q_m > 1.0) {
            return Err(Error::ModelValidation(format!("q_M must exceed 1, got {}", self.q_m)));
        }
        if let Some(&s) = self.resonances.iter().find(|&&s| !(s > 0.5 && s <= 1.0)) {
            return Err(Error::ModelValidation(format!("resonance {s} outside (1/2, 1]")));
        }
        let bound = 2.0 * self.q_m.ln();
        for k in 0..VALIDATION_SAMPLES {
            let r = -VALIDATION_RADIUS + 2.0 * VALIDATION_RADIUS * k as f64 / (VALIDATION_SAMPLES - 1) as f64;
            let m = self.lower_bound_margin(r);
            if !(m >= bound - 1e-12) {
                return Err(Error::ModelValidation(format!(
                    "lower bound fails at r = {r}: {m} < 2 log q_M = {bound}"
                )));
            }
        }
        Ok(())
    }
}

fn check_weight(w: f64) -> Result<()> {
    if !(w >= 0.0) || !w.is_finite() {
        return Err(Error::domain(format!("weight must be non-negative, got {w}")));
    }
    Ok(())
}

/// Σ_{λ ≤ T} (T − λ)^w; at w = 0 this counts eigenvalues ≤ T.
pub fn counting_compact(eigenvalues: &[f64], w: f64, t: f64) -> Result<f64> {
    check_weight(w)?;
    Ok(eigenvalues
        .iter()
        .filter(|&&l| l <= t)
        .map(|&l| if w == 0.0 { 1.0 } else { (t - l).powf(w) })
        .sum())
}

/// The separate terms of the counting function with cusps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoncompactCounting {
    pub discrete: f64,
    pub scattering: f64,
    pub digamma: f64,
    pub trace_term: f64,
    pub log_two: f64,
}

impl NoncompactCounting {
    pub fn total(&self) -> f64 {
        self.discrete + self.scattering + self.digamma + self.trace_term + self.log_two
    }

    /// Discrete sum plus the scattering integral only.
    pub fn hatted(&self) -> f64 {
        self.discrete + self.scattering
    }
}

pub fn counting_noncompact_terms(
    eigenvalues: &[f64],
    p: u32,
    scattering: &ScatteringModel,
    w: f64,
    t: f64,
) -> Result<NoncompactCounting> {
    check_weight(w)?;
    let discrete = counting_compact(eigenvalues, w, t)?;
    let mut out = NoncompactCounting {
        discrete,
        scattering: 0.0,
        digamma: 0.0,
        trace_term: 0.0,
        log_two: 0.0,
    };
    if t <= 0.25 {
        return Ok(out);
    }
    scattering.validate(p)?;
    let radius = (t - 0.25).sqrt();
    let cfg = QuadConfig::tight().with_abs(1e-15);
    let pf = p as f64;
    if !scattering.is_trivial() {
        let i1 = integrate_weighted_symmetric(|r| scattering.phi_log_deriv(r), radius, w, cfg)?.value;
        out.scattering = -i1 / (4.0 * PI);
    }
    if p > 0 {
        let i2 = integrate_weighted_symmetric(
            |r| digamma(Complex64::new(1.0, r)).map(|z| z.re).unwrap_or(f64::NAN),
            radius,
            w,
            cfg,
        )?
        .value;
        out.digamma = pf * i2 / (2.0 * PI);
        out.trace_term = -0.25 * (pf - scattering.trace_phi_half()) * radius.powf(2.0 * w);
        let moment = gamma(w + 1.0)? / ((4.0 * PI).sqrt() * gamma(w + 1.5)?);
        out.log_two = pf * LN_2 * moment * radius.powf(2.0 * w + 1.0);
    }
    Ok(out)
}

/// N_{M,w}(T) for a surface with p cusps.
pub fn counting_noncompact(
    eigenvalues: &[f64],
    p: u32,
    scattering: &ScatteringModel,
    w: f64,
    t: f64,
) -> Result<f64> {
    Ok(counting_noncompact_terms(eigenvalues, p, scattering, w, t)?.total())
}

/// Result of differentiating a weight-(w+1) counting function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightLowering {
    pub value: f64,
    pub step: f64,
    /// |forward − backward| difference quotients, scaled by 1/(w+1).
    pub one_sided_gap: f64,
    /// Set when the one-sided quotients disagree beyond the tolerance.
    pub step_warning: bool,
}

/// Default step max(1e−4, 1e−3·T).
pub fn default_lowering_step(t: f64) -> f64 {
    (1e-3 * t.abs()).max(1e-4)
}

/// N_w(T) ≈ (1/(w+1))·[N_{w+1}(T+h) − N_{w+1}(T−h)]/(2h), optionally
/// Richardson-refined with the h/2 quotient.
pub fn weight_lowering<F>(
    n_higher: F,
    w: f64,
    t: f64,
    h: Option<f64>,
    richardson: bool,
) -> Result<WeightLowering>
where
    F: Fn(f64) -> Result<f64>,
{
    check_weight(w)?;
    let h = h.unwrap_or_else(|| default_lowering_step(t));
    if !(h > 0.0) {
        return Err(Error::domain(format!("step must be positive, got {h}")));
    }
    let scale = 1.0 / (w + 1.0);
    let (plus, mid, minus) = (n_higher(t + h)?, n_higher(t)?, n_higher(t - h)?);
    let central = scale * (plus - minus) / (2.0 * h);
    let forward = scale * (plus - mid) / h;
    let backward = scale * (mid - minus) / h;
    let value = if richardson {
        let half = scale * (n_higher(t + 0.5 * h)? - n_higher(t - 0.5 * h)?) / h;
        (4.0 * half - central) / 3.0
    } else {
        central
    };
    let gap = (forward - backward).abs();
    Ok(WeightLowering {
        value,
        step: h,
        one_sided_gap: gap,
        step_warning: gap > 1e-3 * value.abs().max(1.0),
    })
}

/// N(λ)·4π/(vol·λ) with N(λ) = #{λ_n ≤ λ}.
pub fn weyl_ratio(eigenvalues: &[f64], vol: f64, lam: f64) -> Result<f64> {
    if !(lam > 0.0) || !(vol > 0.0) {
        return Err(Error::domain(format!("Weyl ratio needs lam > 0 and vol > 0, got {lam}, {vol}")));
    }
    let n = eigenvalues.iter().filter(|&&l| l <= lam).count() as f64;
    Ok(n * 4.0 * PI / (vol * lam))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compact_examples() {
        let e = [0.0, 0.1, 0.3];
        assert!((counting_compact(&e, 1.0, 0.5).unwrap() - 1.1).abs() < 1e-15);
        assert_eq!(counting_compact(&e, 0.0, 0.2).unwrap(), 2.0);
        assert_eq!(counting_compact(&e, 0.0, -0.1).unwrap(), 0.0);
        assert_eq!(counting_compact(&e, 0.0, 0.1).unwrap(), 2.0);
    }

    #[test]
    fn trivial_scattering_reduces_exactly() {
        let e = [0.0, 0.1, 0.3, 1.7];
        let m = ScatteringModel::trivial();
        for &t in &[0.2, 1.0, 3.0] {
            for &w in &[0.0, 0.5, 2.0] {
                let a = counting_noncompact(&e, 0, &m, w, t).unwrap();
                assert_eq!(a, counting_compact(&e, w, t).unwrap());
            }
        }
    }

    #[test]
    fn constant_scattering_term() {
        let c = 1.5;
        let m = ScatteringModel::constant(-2.0 * c, 1.0, vec![], 2.0);
        let t = 2.0;
        let terms = counting_noncompact_terms(&[], 1, &m, 0.0, t).unwrap();
        let want = c / (2.0 * PI) * 2.0 * (t - 0.25).sqrt();
        assert!((terms.scattering - want).abs() < 1e-13);
        assert_eq!(terms.trace_term, 0.0);
    }

    #[test]
    fn validation_failures() {
        let weak = ScatteringModel::constant(-0.1, 0.0, vec![], 2.0);
        assert!(matches!(weak.validate(1), Err(Error::ModelValidation(_))));
        let big_trace = ScatteringModel::constant(-4.0, 2.0, vec![], 2.0);
        assert!(big_trace.validate(1).is_err());
        let bad_res = ScatteringModel::constant(-4.0, 0.0, vec![0.3], 2.0);
        assert!(bad_res.validate(1).is_err());
        assert!(ScatteringModel::trivial().validate(1).is_err());
    }

    #[test]
    fn weight_lowering_examples() {
        let e = [0.1];
        let r = weight_lowering(|t| counting_compact(&e, 1.0, t), 0.0, 0.5, None, false).unwrap();
        assert!((r.value - 1.0).abs() < 1e-9 && !r.step_warning);
        let r = weight_lowering(|_| Ok(3.0), 0.0, 0.5, None, true).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn weyl_examples() {
        assert_eq!(weyl_ratio(&[], 1.0, 1.0).unwrap(), 0.0);
        assert_eq!(weyl_ratio(&[2.0], 1.0, 1.0).unwrap(), 0.0);
    }
}
