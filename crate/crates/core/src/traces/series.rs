//! Heat-trace providers and sampled trace series.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::geometry::SurfaceData;
use crate::hplane::heat_kernel_h_with;
use crate::special_fn::QuadConfig;

use super::expansion::{
    elliptic_expansion, hyperbolic_cutoff, identity_expansion, small_eigenvalue_expansion,
    Expansion, DEFAULT_EXPANSION_TERMS,
};
use super::{
    check_alpha, elliptic_trace_u_with, hyperbolic_trace, remainder_trace, small_mode_sum,
    trace_components,
};

/// A function of t > 0 that behaves like a heat trace: known small-time
/// expansion (optional) and exponential decay towards its zero-mode count.
pub trait HeatTrace: Send + Sync {
    fn value(&self, t: f64) -> Result<f64>;

    fn expansion(&self) -> Option<Expansion> {
        None
    }

    /// Rate r with value(t) − limit = O(e^{−rt}) as t → ∞.
    fn decay_rate(&self) -> f64;

    /// lim_{t→∞} value(t), when the provider knows it.
    fn zero_modes(&self) -> Option<f64> {
        None
    }
}

impl<T: HeatTrace + ?Sized> HeatTrace for &T {
    fn value(&self, t: f64) -> Result<f64> {
        (**self).value(t)
    }
    fn expansion(&self) -> Option<Expansion> {
        (**self).expansion()
    }
    fn decay_rate(&self) -> f64 {
        (**self).decay_rate()
    }
    fn zero_modes(&self) -> Option<f64> {
        (**self).zero_modes()
    }
}

/// Which combination of components a [`SurfaceTrace`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TracePart {
    Standard,
    Degenerating,
    /// Standard minus degenerating.
    Remainder,
    Identity,
    Hyperbolic,
    Elliptic,
}

#[derive(Debug, Clone)]
pub struct SurfaceTrace {
    surface: SurfaceData,
    part: TracePart,
    alpha: Option<f64>,
    terms: usize,
}

impl SurfaceTrace {
    pub fn new(surface: SurfaceData, part: TracePart) -> Self {
        SurfaceTrace {
            surface,
            part,
            alpha: None,
            terms: DEFAULT_EXPANSION_TERMS,
        }
    }

    pub fn standard(surface: SurfaceData) -> Self {
        Self::new(surface, TracePart::Standard)
    }

    /// Subtracts e^{−λt} for listed small eigenvalues λ ≤ α (standard and
    /// remainder parts only).
    pub fn truncated(mut self, alpha: f64) -> Result<Self> {
        check_alpha(self.surface.small_eigenvalues(), alpha)?;
        self.alpha = Some(alpha);
        Ok(self)
    }

    pub fn surface(&self) -> &SurfaceData {
        &self.surface
    }

    fn subtracted(&self) -> Vec<f64> {
        match (self.alpha, self.part) {
            (Some(a), TracePart::Standard | TracePart::Remainder) => {
                self.surface.small_eigenvalues().iter().cloned().filter(|&l| l <= a).collect()
            }
            _ => Vec::new(),
        }
    }
}

impl HeatTrace for SurfaceTrace {
    fn value(&self, t: f64) -> Result<f64> {
        let s = &self.surface;
        let cfg = QuadConfig::tight();
        let smalls = |v: f64| match self.alpha {
            Some(a) => v - small_mode_sum(s.small_eigenvalues(), a, t),
            None => v,
        };
        match self.part {
            TracePart::Standard => Ok(smalls(trace_components(s, t)?.standard)),
            TracePart::Degenerating => elliptic_trace_u_with(&s.degenerating_orders(), t, cfg),
            TracePart::Remainder => Ok(smalls(remainder_trace(s, t)?)),
            TracePart::Identity => Ok(s.volume() * heat_kernel_h_with(t, 0.0, cfg)?),
            TracePart::Hyperbolic => hyperbolic_trace(s.lengths(), t),
            TracePart::Elliptic => elliptic_trace_u_with(s.elliptic_orders(), t, cfg),
        }
    }

    fn expansion(&self) -> Option<Expansion> {
        let s = &self.surface;
        let n = self.terms;
        let identity = || identity_expansion(s.volume(), n);
        let hyper = || Expansion::new(hyperbolic_cutoff(s.lengths()));
        let smalls = small_eigenvalue_expansion(&self.subtracted(), n);
        let e = match self.part {
            TracePart::Standard => identity()
                .merged(&hyper())
                .merged(&elliptic_expansion(s.elliptic_orders(), n))
                .merged(&smalls),
            TracePart::Degenerating => elliptic_expansion(&s.degenerating_orders(), n),
            TracePart::Remainder => identity()
                .merged(&hyper())
                .merged(&elliptic_expansion(&s.fixed_orders(), n))
                .merged(&smalls),
            TracePart::Identity => identity(),
            TracePart::Hyperbolic => hyper(),
            TracePart::Elliptic => elliptic_expansion(s.elliptic_orders(), n),
        };
        Some(e)
    }

    fn decay_rate(&self) -> f64 {
        self.subtracted().iter().cloned().filter(|&l| l > 0.0).fold(0.25, f64::min)
    }

    fn zero_modes(&self) -> Option<f64> {
        Some(-(self.subtracted().iter().filter(|&&l| l == 0.0).count() as f64))
    }
}

/// Σ e^{−λt} over a finite list of eigenvalues λ ≥ 0.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteSpectrumTrace {
    eigenvalues: Vec<f64>,
}

impl FiniteSpectrumTrace {
    pub fn new(mut eigenvalues: Vec<f64>) -> Result<Self> {
        if eigenvalues.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
            return Err(Error::domain("eigenvalues must be finite and non-negative"));
        }
        eigenvalues.sort_by(f64::total_cmp);
        Ok(FiniteSpectrumTrace { eigenvalues })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }
}

impl HeatTrace for FiniteSpectrumTrace {
    fn value(&self, t: f64) -> Result<f64> {
        Ok(self.eigenvalues.iter().map(|&l| (-l * t).exp()).sum())
    }

    fn expansion(&self) -> Option<Expansion> {
        Some(small_eigenvalue_expansion(&self.eigenvalues, 16).scaled(-1.0))
    }

    fn decay_rate(&self) -> f64 {
        self.eigenvalues.iter().cloned().find(|&l| l > 0.0).unwrap_or(1.0)
    }

    fn zero_modes(&self) -> Option<f64> {
        Some(self.eigenvalues.iter().filter(|&&l| l == 0.0).count() as f64)
    }
}

/// Θ(t) = Σ_{n∈ℤ} e^{−n²t}, the heat trace of the circle of length 2π.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CircleTrace;

impl HeatTrace for CircleTrace {
    fn value(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::domain(format!("trace needs t > 0, got {t}")));
        }
        let (x, prefactor) = if t >= 1.0 {
            (t, 1.0)
        } else {
            (PI * PI / t, (PI / t).sqrt())
        };
        let mut sum = 1.0;
        let mut n = 1u32;
        loop {
            let term = 2.0 * (-((n * n) as f64) * x).exp();
            sum += term;
            if term < 1e-18 * sum {
                break;
            }
            n += 1;
        }
        Ok(prefactor * sum)
    }

    fn expansion(&self) -> Option<Expansion> {
        let mut e = Expansion::new(0.2);
        e.add_term(-0.5, PI.sqrt());
        Some(e)
    }

    fn decay_rate(&self) -> f64 {
        1.0
    }

    fn zero_modes(&self) -> Option<f64> {
        Some(1.0)
    }
}

type TraceFn = Box<dyn Fn(f64) -> Result<f64> + Send + Sync>;

/// A trace given by a closure, with optional expansion.
pub struct FnTrace {
    f: TraceFn,
    decay: f64,
    expansion: Option<Expansion>,
    zero_modes: Option<f64>,
}

impl FnTrace {
    pub fn new(f: impl Fn(f64) -> Result<f64> + Send + Sync + 'static, decay: f64) -> Self {
        FnTrace {
            f: Box::new(f),
            decay,
            expansion: None,
            zero_modes: None,
        }
    }

    pub fn with_expansion(mut self, e: Expansion) -> Self {
        self.expansion = Some(e);
        self
    }

    pub fn with_zero_modes(mut self, c: f64) -> Self {
        self.zero_modes = Some(c);
        self
    }
}

impl HeatTrace for FnTrace {
    fn value(&self, t: f64) -> Result<f64> {
        (self.f)(t)
    }
    fn expansion(&self) -> Option<Expansion> {
        self.expansion.clone()
    }
    fn decay_rate(&self) -> f64 {
        self.decay
    }
    fn zero_modes(&self) -> Option<f64> {
        self.zero_modes
    }
}

/// Samples of a trace on a grid; `errors` holds the error bound implied by
/// the sampling tolerance at each point.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceSeries {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    pub tolerance: f64,
}

impl TraceSeries {
    pub fn sample(grid: &[f64], trace: &dyn HeatTrace) -> Result<Self> {
        Self::from_fn(grid, QuadConfig::tight().rel_tol, |t| trace.value(t))
    }

    pub fn from_fn<F>(grid: &[f64], tolerance: f64, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<f64> + Sync + Send,
    {
        validate_grid(grid)?;
        let values = crate::par::map(grid, |&t| f(t)).into_iter().collect::<Result<Vec<_>>>()?;
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { at: grid[i] });
        }
        let errors = values.iter().map(|v| tolerance * v.abs()).collect();
        Ok(TraceSeries {
            grid: grid.to_vec(),
            values,
            errors,
            tolerance,
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,value,err\n");
        for ((t, v), e) in self.grid.iter().zip(&self.values).zip(&self.errors) {
            let _ = writeln!(out, "{t:e},{v:e},{e:e}");
        }
        out
    }
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::domain("empty grid"));
    }
    if grid[0] <= 0.0 || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invariant("grid must be positive and strictly increasing"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Geodesic;

    #[test]
    fn circle_forms_meet() {
        let a = CircleTrace.value(1.0).unwrap();
        let poisson = PI.sqrt() * (1.0 + 2.0 * (1..20).map(|n| (-(PI * n as f64).powi(2)).exp()).sum::<f64>());
        assert!((a - poisson).abs() < 1e-14);
    }

    #[test]
    fn surface_expansion_matches_trace_at_cutoff() {
        let s = SurfaceData::new(1, 0, vec![3, 5], vec![1], vec![Geodesic::new(1.5, 2)], vec![]).unwrap();
        for part in [TracePart::Standard, TracePart::Degenerating, TracePart::Remainder] {
            let tr = SurfaceTrace::new(s.clone(), part);
            let e = tr.expansion().unwrap();
            let t = e.cutoff;
            let v = tr.value(t).unwrap();
            assert!(((e.evaluate(t) - v) / v).abs() < 1e-12, "{part:?}");
        }
    }

    #[test]
    fn series_csv_and_validation() {
        let s = TraceSeries::sample(&[0.5, 1.0], &CircleTrace).unwrap();
        assert!(s.to_csv().starts_with("t,value,err\n"));
        assert_eq!(s.to_csv().lines().count(), 3);
        assert!(TraceSeries::sample(&[1.0, 0.5], &CircleTrace).is_err());
        assert!(TraceSeries::sample(&[], &CircleTrace).is_err());
    }
}
