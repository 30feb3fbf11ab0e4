//! Resolvent, Poisson and wave kernels of a finite spectral expansion.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special_fn::{integrate_tail, QuadConfig};

/// One term λ, a of Σ a e^{−λt}; `amplitude` stands for φ(x)φ(y).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub lambda: f64,
    pub amplitude: f64,
}

/// Finite list of modes sorted by eigenvalue.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Mode>", into = "Vec<Mode>")]
pub struct ModeSet {
    modes: Vec<Mode>,
}

impl TryFrom<Vec<Mode>> for ModeSet {
    type Error = Error;

    fn try_from(modes: Vec<Mode>) -> Result<Self> {
        ModeSet::new(modes)
    }
}

impl From<ModeSet> for Vec<Mode> {
    fn from(m: ModeSet) -> Self {
        m.modes
    }
}

impl ModeSet {
    pub fn new(mut modes: Vec<Mode>) -> Result<Self> {
        for m in &modes {
            if !(m.lambda >= 0.0) || !m.lambda.is_finite() || !m.amplitude.is_finite() {
                return Err(Error::domain(format!(
                    "modes need finite λ ≥ 0 and finite amplitude, got ({}, {})",
                    m.lambda, m.amplitude
                )));
            }
        }
        modes.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
        Ok(ModeSet { modes })
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        ModeSet::new(
            pairs
                .iter()
                .map(|&(lambda, amplitude)| Mode { lambda, amplitude })
                .collect(),
        )
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    /// Σ a e^{−λt}.
    pub fn heat(&self, t: f64) -> f64 {
        self.modes.iter().map(|m| m.amplitude * (-m.lambda * t).exp()).sum()
    }

    /// Modes with λ ≥ α.
    pub fn truncated(&self, alpha: f64) -> ModeSet {
        ModeSet {
            modes: self.modes.iter().cloned().filter(|m| m.lambda >= alpha).collect(),
        }
    }

    fn lambda_min(&self) -> f64 {
        self.modes.first().map_or(f64::INFINITY, |m| m.lambda)
    }
}

/// −Σ a/(w + λ).
pub fn resolvent(modes: &ModeSet, w: Complex64) -> Result<Complex64> {
    let mut sum = Complex64::new(0.0, 0.0);
    for m in modes.modes() {
        let den = w + m.lambda;
        if den.norm() == 0.0 {
            return Err(Error::Pole(format!("w = {w} is minus an eigenvalue")));
        }
        sum -= m.amplitude / den;
    }
    Ok(sum)
}

/// Resolvent with the modes λ < α removed.
pub fn resolvent_truncated(modes: &ModeSet, alpha: f64, w: Complex64) -> Result<Complex64> {
    resolvent(&modes.truncated(alpha), w)
}

/// −∫₀^∞ Σ a e^{−λt} e^{−wt} dt by quadrature; needs Re(w) + λ_min > 0.
pub fn resolvent_quadrature(modes: &ModeSet, w: Complex64) -> Result<Complex64> {
    let rate = w.re + modes.lambda_min();
    if modes.modes().is_empty() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    if !(rate > 0.0) {
        return Err(Error::domain(format!("Laplace integral diverges for Re(w) = {}", w.re)));
    }
    let res = integrate_tail(
        |t: f64| modes.heat(t) * (-w * t).exp(),
        0.0,
        1.0 / rate,
        QuadConfig::tight().with_abs(1e-15),
    )?;
    Ok(-res.value)
}

fn check_distance(w: f64) -> Result<()> {
    if !(w > 0.0) || !w.is_finite() {
        return Err(Error::domain(format!("Poisson kernel needs w > 0, got {w}")));
    }
    Ok(())
}

/// Σ a e^{−w√λ}.
pub fn poisson(modes: &ModeSet, w: f64) -> Result<f64> {
    check_distance(w)?;
    Ok(modes.modes().iter().map(|m| m.amplitude * (-w * m.lambda.sqrt()).exp()).sum())
}

/// (w/√(4π))∫₀^∞ Σ a e^{−λt} e^{−w²/4t} t^{−3/2} dt, integrated in
/// v = w/(2√t) as (2/√π)∫₀^∞ Σ a e^{−v² − λw²/4v²} dv.
pub fn poisson_quadrature(modes: &ModeSet, w: f64) -> Result<f64> {
    check_distance(w)?;
    let f = |v: f64| -> f64 {
        if v <= 0.0 {
            return 0.0;
        }
        let base = v * v;
        let k = 0.25 * w * w / base;
        modes
            .modes()
            .iter()
            .map(|m| m.amplitude * (-base - m.lambda * k).exp())
            .sum()
    };
    let res = integrate_tail(f, 0.0, 1.0, QuadConfig::tight().with_abs(1e-16))?;
    Ok(2.0 / PI.sqrt() * res.value)
}

/// Σ a e^{iw√λ}.
pub fn wave(modes: &ModeSet, w: f64) -> Complex64 {
    modes
        .modes()
        .iter()
        .map(|m| m.amplitude * Complex64::new(0.0, w * m.lambda.sqrt()).exp())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(p: &[(f64, f64)]) -> ModeSet {
        ModeSet::from_pairs(p).unwrap()
    }

    #[test]
    fn resolvent_single_mode_and_quadrature() {
        let m = set(&[(1.0, 0.7)]);
        let w = Complex64::new(0.5, 0.3);
        assert!((resolvent(&m, w).unwrap() + 0.7 / (w + 1.0)).norm() < 1e-16);
        let m = set(&[(0.0, 1.0), (0.3, -0.5), (2.0, 0.25)]);
        let q = resolvent_quadrature(&m, w).unwrap();
        assert!((q - resolvent(&m, w).unwrap()).norm() < 1e-10);
    }

    #[test]
    fn truncation_removes_pole() {
        let m = set(&[(0.1, 1.0), (1.0, 1.0)]);
        let w = Complex64::new(-0.1, 0.0);
        assert!(matches!(resolvent(&m, w), Err(Error::Pole(_))));
        assert!(resolvent_truncated(&m, 0.2, w).is_ok());
    }

    #[test]
    fn poisson_routes() {
        let m = set(&[(1.0, 1.0)]);
        assert!((poisson(&m, 0.7).unwrap() - (-0.7f64).exp()).abs() < 1e-16);
        let m = set(&[(0.0, 0.5), (0.4, 1.0), (3.0, 0.2)]);
        for &w in &[0.1, 1.0, 4.0] {
            let a = poisson(&m, w).unwrap();
            let b = poisson_quadrature(&m, w).unwrap();
            assert!((a - b).abs() < 1e-10, "w={w} {a} {b}");
        }
        assert!(poisson(&m, 0.0).is_err());
    }

    #[test]
    fn wave_basics() {
        let m = set(&[(1.0, 1.0)]);
        assert!((wave(&m, 0.4) - Complex64::new(0.0, 0.4).exp()).norm() < 1e-16);
        let m = set(&[(0.5, 2.0), (4.0, -1.0)]);
        assert!((wave(&m, 0.0).re - 1.0).abs() < 1e-16);
    }

    #[test]
    fn serde_sorts_and_validates() {
        let m: ModeSet = serde_json::from_str(r#"[{"lambda":2,"amplitude":1},{"lambda":1,"amplitude":3}]"#).unwrap();
        assert_eq!(m.modes()[0].lambda, 1.0);
        assert!(serde_json::from_str::<ModeSet>(r#"[{"lambda":-1,"amplitude":1}]"#).is_err());
    }
}
