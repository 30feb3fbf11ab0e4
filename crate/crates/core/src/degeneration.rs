//! Growth of counting quantities as cone orders tend to infinity: the sum
//! S(q), the Fermi-weighted kernels c_w(T; β), the degenerating counting
//! function G(T) and slope fits against log Πq.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{DegeneratingFamily, SurfaceData};
use crate::special_fn::{integrate_weighted_symmetric, pairwise_sum, QuadConfig};
use crate::traces::elliptic::{fermi_weight, sin_ratio};

/// S(q) = Σ_{n=1}^{q−1} 1/(2q sin(nπ/q)).
pub fn elliptic_sum_s(q: u64) -> Result<f64> {
    if q < 2 {
        return Err(Error::domain(format!("order must be at least 2, got {q}")));
    }
    let qf = q as f64;
    Ok(pairwise_sum((q - 1) as usize, |i| 1.0 / (2.0 * qf * sin_ratio(i as u64 + 1, q))))
}

/// Parameters of c_w(T; β) = (1/π)∫_{−R}^{R} (R² − r²)^w e^{−2πβr}/(1 + e^{−2πr}) dr
/// with R = √(T − 1/4).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CwKernel {
    #[serde(rename = "T")]
    pub t: f64,
    pub w: f64,
    pub beta: f64,
}

impl CwKernel {
    pub fn new(t: f64, w: f64, beta: f64) -> Result<Self> {
        if !t.is_finite() || !(w >= 0.0) || !w.is_finite() {
            return Err(Error::domain(format!("kernel needs finite T and w >= 0, got T={t}, w={w}")));
        }
        if !(0.0..1.0).contains(&beta) {
            return Err(Error::domain(format!("beta must lie in [0, 1), got {beta}")));
        }
        Ok(CwKernel { t, w, beta })
    }

    /// The β = 0 limit kernel.
    pub fn limit(t: f64, w: f64) -> Result<Self> {
        Self::new(t, w, 0.0)
    }
}

/// ∫_{−R}^{R} (R² − r²)^w F_β(r) dr, i.e. π·c_w.
fn fermi_moment(t: f64, w: f64, beta: f64) -> Result<f64> {
    if t <= 0.25 {
        return Ok(0.0);
    }
    let radius = (t - 0.25).sqrt();
    let cfg = QuadConfig::tight().with_abs(1e-300);
    Ok(integrate_weighted_symmetric(|r| fermi_weight(beta, r), radius, w, cfg)?.value)
}

pub fn c_w_kernel(k: &CwKernel) -> Result<f64> {
    let k = CwKernel::new(k.t, k.w, k.beta)?;
    Ok(fermi_moment(k.t, k.w, k.beta)? / PI)
}

/// Above this order the β-dependence is interpolated instead of integrated
/// for every n.
pub const INTERPOLATION_THRESHOLD: u64 = 100_000;
const CHEBYSHEV_NODES: usize = 256;

/// Chebyshev interpolant of β ↦ π·c_w(T; β) on [0, 1/2]; the kernel is
/// symmetric under β → 1 − β.
struct BetaInterpolant {
    coeffs: Vec<f64>,
}

impl BetaInterpolant {
    fn new(t: f64, w: f64) -> Result<Self> {
        let n = CHEBYSHEV_NODES;
        let nodes: Vec<f64> = (0..n).map(|k| (PI * (k as f64 + 0.5) / n as f64).cos()).collect();
        let values = crate::par::map(&nodes, |&x| fermi_moment(t, w, 0.25 * (x + 1.0)))
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        let mut coeffs: Vec<f64> = (0..n)
            .map(|j| {
                let s: f64 = (0..n)
                    .map(|k| values[k] * (PI * j as f64 * (k as f64 + 0.5) / n as f64).cos())
                    .sum();
                2.0 * s / n as f64
            })
            .collect();
        coeffs[0] *= 0.5;
        let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.abs() < 1e-17 * scale) {
            coeffs.pop();
        }
        Ok(BetaInterpolant { coeffs })
    }

    fn eval(&self, beta: f64) -> f64 {
        let b = if beta > 0.5 { 1.0 - beta } else { beta };
        let x = 4.0 * b - 1.0;
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = 2.0 * x * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        x * b1 - b2 + self.coeffs[0]
    }
}

/// Σ_{n=1}^{q−1} 1/(2q sin(nπ/q)) ∫ (R² − r²)^w F_{n/q}(r) dr for one cone.
fn cone_counting(q: u64, t: f64, w: f64, interp: Option<&BetaInterpolant>) -> Result<f64> {
    let qf = q as f64;
    let weight = |n: u64| 1.0 / (2.0 * qf * sin_ratio(n, q));
    if let Some(ip) = interp {
        return Ok(pairwise_sum((q - 1) as usize, |i| {
            let n = i as u64 + 1;
            weight(n) * ip.eval(n as f64 / qf)
        }));
    }
    let half: Vec<u64> = (1..=q / 2).collect();
    let moments = crate::par::map(&half, |&n| fermi_moment(t, w, n as f64 / qf))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(pairwise_sum((q - 1) as usize, |i| {
        let n = i as u64 + 1;
        let m = n.min(q - n);
        weight(n) * moments[(m - 1) as usize]
    }))
}

/// G_w(T) summed over the degenerating cone points of the surface.
pub fn g_degenerating_counting(surface: &SurfaceData, w: f64, t: f64) -> Result<f64> {
    if !(w >= 0.0) {
        return Err(Error::domain(format!("weight must be non-negative, got {w}")));
    }
    let orders = surface.degenerating_orders();
    if t <= 0.25 || orders.is_empty() {
        return Ok(0.0);
    }
    let interp = if orders.iter().any(|&q| q > INTERPOLATION_THRESHOLD) {
        Some(BetaInterpolant::new(t, w)?)
    } else {
        None
    };
    let mut total = 0.0;
    for q in orders {
        let ip = interp.as_ref().filter(|_| q > INTERPOLATION_THRESHOLD);
        total += cone_counting(q, t, w, ip)?;
    }
    Ok(total)
}

/// Unweighted least-squares line through (abscissae, ordinates).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub abscissae: Vec<f64>,
    pub ordinates: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square deviation from the fitted line.
    pub residual: f64,
}

impl SlopeFit {
    pub fn residuals(&self) -> Vec<f64> {
        self.abscissae
            .iter()
            .zip(&self.ordinates)
            .map(|(x, y)| y - (self.intercept + self.slope * x))
            .collect()
    }
}

pub fn fit_slope(abscissae: &[f64], ordinates: &[f64]) -> Result<SlopeFit> {
    let n = abscissae.len();
    if n != ordinates.len() {
        return Err(Error::DegenerateFit("abscissae and ordinates differ in length".into()));
    }
    if n < 3 {
        return Err(Error::DegenerateFit(format!("need at least 3 points, got {n}")));
    }
    if abscissae.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::DegenerateFit("abscissae must be strictly increasing".into()));
    }
    let nf = n as f64;
    let mx = abscissae.iter().sum::<f64>() / nf;
    let my = ordinates.iter().sum::<f64>() / nf;
    let sxx: f64 = abscissae.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= 1e-18 * (1.0 + mx * mx) * nf {
        return Err(Error::DegenerateFit("abscissae are numerically constant".into()));
    }
    let sxy: f64 = abscissae.iter().zip(ordinates).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut fit = SlopeFit {
        abscissae: abscissae.to_vec(),
        ordinates: ordinates.to_vec(),
        slope,
        intercept,
        residual: 0.0,
    };
    fit.residual = (fit.residuals().iter().map(|r| r * r).sum::<f64>() / nf).sqrt();
    Ok(fit)
}

/// Fits a per-member quantity against log Πq over the schedule.
pub fn fit_slope_vs_log_q<F>(family: &DegeneratingFamily, quantity: F, drop_smallest: bool) -> Result<SlopeFit>
where
    F: Fn(&SurfaceData) -> Result<f64> + Sync + Send,
{
    let members = family.members()?;
    let skip = usize::from(drop_smallest);
    let members = &members[skip.min(members.len())..];
    let values = crate::par::map(members, |m| quantity(m)).into_iter().collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = members.iter().map(|m| m.log_q()).collect();
    fit_slope(&xs, &values)
}

/// ε = √(f/log Q), balancing ε·log Q against f/ε.
pub fn optimize_epsilon(f_decay: f64, log_q: f64) -> Result<f64> {
    if !(f_decay > 0.0) || !(log_q > 0.0) {
        return Err(Error::domain(format!("need positive inputs, got f={f_decay}, logQ={log_q}")));
    }
    Ok((f_decay / log_q).sqrt())
}

/// One stage of the two-step choice of ε.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonStage {
    pub epsilon: f64,
    /// k such that the stage's error is O((log Q)^k).
    pub error_exponent: f64,
}

/// Stage 1 takes f = 1, so ε = (log Q)^{−1/2} and the error is
/// O((log Q)^{1/2}); feeding that error back as f gives ε = (log Q)^{−1/4}
/// and a combined error O((log Q)^{3/4}).
pub fn two_stage_epsilon(log_q: f64) -> Result<[EpsilonStage; 2]> {
    let e1 = optimize_epsilon(1.0, log_q)?;
    let k1 = 0.5;
    let e2 = optimize_epsilon(log_q.powf(k1), log_q)?;
    let k2 = 1.0 - (1.0 - k1) / 2.0;
    Ok([
        EpsilonStage {
            epsilon: e1,
            error_exponent: k1,
        },
        EpsilonStage {
            epsilon: e2,
            error_exponent: k2,
        },
    ])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorTermRow {
    pub orders: Vec<u64>,
    pub log_q: f64,
    pub value: f64,
    pub residual: f64,
    pub normalizer: f64,
    pub normalized: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorTermReport {
    pub t: f64,
    pub c0: f64,
    pub rows: Vec<ErrorTermRow>,
    /// Normalized residuals are finite and their magnitudes do not grow
    /// strictly across the whole schedule.
    pub bounded: bool,
}

/// Tabulates G − c₀(T)·log Q against (log Q)^{3/4} for given values of G.
pub fn error_term_report(t: f64, orders: &[Vec<u64>], log_q: &[f64], values: &[f64]) -> Result<ErrorTermReport> {
    let c0 = c_w_kernel(&CwKernel::limit(t, 0.0)?)?;
    let rows: Vec<ErrorTermRow> = orders
        .iter()
        .zip(log_q)
        .zip(values)
        .map(|((q, &lq), &g)| {
            let residual = g - c0 * lq;
            let normalizer = lq.powf(0.75);
            ErrorTermRow {
                orders: q.clone(),
                log_q: lq,
                value: g,
                residual,
                normalizer,
                normalized: if normalizer > 0.0 { residual / normalizer } else { 0.0 },
            }
        })
        .collect();
    let finite = rows.iter().all(|r| r.normalized.is_finite());
    let growing = rows.len() > 1 && rows.windows(2).all(|w| w[1].normalized.abs() > w[0].normalized.abs());
    Ok(ErrorTermReport {
        t,
        c0,
        rows,
        bounded: finite && !growing,
    })
}

pub fn error_term_experiment(family: &DegeneratingFamily, t: f64) -> Result<ErrorTermReport> {
    if family.template().degenerating_indices().len() != 1 {
        return Err(Error::domain("error-term experiment needs exactly one degenerating cone"));
    }
    let members = family.members()?;
    let values = crate::par::map(&members, |m| g_degenerating_counting(m, 0.0, t))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let log_q: Vec<f64> = members.iter().map(|m| m.log_q()).collect();
    error_term_report(t, family.schedule(), &log_q, &values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn s_small_orders() {
        assert!((elliptic_sum_s(2).unwrap() - 0.25).abs() < 1e-16);
        assert!((elliptic_sum_s(3).unwrap() - 2.0 / (3.0 * 3f64.sqrt())).abs() < 1e-15);
        assert!(elliptic_sum_s(1).is_err());
    }

    #[test]
    fn limit_kernel_value() {
        let v = c_w_kernel(&CwKernel::limit(1.25, 0.0).unwrap()).unwrap();
        assert!((v - 1.0 / PI).abs() < 1e-14);
        assert_eq!(c_w_kernel(&CwKernel::new(0.25, 1.0, 0.3).unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn interpolant_matches_quadrature() {
        let ip = BetaInterpolant::new(1.25, 0.0).unwrap();
        for &b in &[0.0, 1e-6, 0.013, 0.25, 0.4999, 0.7, 0.99999] {
            let direct = fermi_moment(1.25, 0.0, b).unwrap();
            assert!((ip.eval(b) - direct).abs() < 1e-12, "beta={b}");
        }
    }

    #[test]
    fn interpolated_and_direct_sums_agree() {
        let ip = BetaInterpolant::new(2.0, 0.5).unwrap();
        let q = 2001;
        let a = cone_counting(q, 2.0, 0.5, Some(&ip)).unwrap();
        let b = cone_counting(q, 2.0, 0.5, None).unwrap();
        assert!(((a - b) / b).abs() < 1e-11);
    }

    #[test]
    fn exact_line_fit() {
        let x = [1.0, 2.0, 4.0, 7.0];
        let y: Vec<f64> = x.iter().map(|x| 0.3 * x - 2.0).collect();
        let f = fit_slope(&x, &y).unwrap();
        assert!((f.slope - 0.3).abs() < 1e-14 && f.residual < 1e-14);
        let f = fit_slope(&x, &[5.0; 4]).unwrap();
        assert!(f.slope.abs() < 1e-15);
        assert!(fit_slope(&[1.0, 1.0, 2.0], &[0.0; 3]).is_err());
        assert!(fit_slope(&[1.0, 2.0], &[0.0; 2]).is_err());
    }

    #[test]
    fn epsilon_stages() {
        assert_eq!(optimize_epsilon(1.0, 1.0).unwrap(), 1.0);
        let lq = 16.0;
        let e = optimize_epsilon(1.0, lq).unwrap();
        assert!((e * lq - 1.0 / e).abs() < 1e-12);
        let [s1, s2] = two_stage_epsilon(lq).unwrap();
        assert!((s1.epsilon - 0.25).abs() < 1e-15 && (s2.epsilon - 0.5).abs() < 1e-15);
        assert_eq!(s2.error_exponent, 0.75);
        assert!(optimize_epsilon(0.0, 1.0).is_err());
    }

    #[test]
    fn synthetic_exact_growth_has_zero_residual() {
        let c0 = 1.0 / PI;
        let lq = [3.0, 5.0, 9.0];
        let g: Vec<f64> = lq.iter().map(|l| c0 * l).collect();
        let r = error_term_report(1.25, &[vec![20], vec![148], vec![8103]], &lq, &g).unwrap();
        assert!(r.rows.iter().all(|row| row.residual.abs() < 1e-14));
        assert!(r.bounded);
    }
}
