//! Small-time expansions of heat traces as finite sums Σ c_p t^p, each valid
//! below a cutoff where the omitted terms are under double precision.

use std::f64::consts::PI;

use crate::geometry::Geodesic;
use crate::special_fn::BERNOULLI_EVEN;

use super::elliptic::cone_expansion;

pub const DEFAULT_EXPANSION_TERMS: usize = 10;

const CUTOFF_CAP: f64 = 0.05;

/// Terms (exponent, coefficient) sorted by exponent, and the largest t at
/// which the truncated sum reproduces the trace.
#[derive(Debug, Clone, PartialEq)]
pub struct Expansion {
    pub terms: Vec<(f64, f64)>,
    pub cutoff: f64,
}

impl Expansion {
    pub fn new(cutoff: f64) -> Self {
        Expansion {
            terms: Vec::new(),
            cutoff,
        }
    }

    pub fn add_term(&mut self, p: f64, c: f64) {
        match self.terms.iter_mut().find(|(q, _)| *q == p) {
            Some(slot) => slot.1 += c,
            None => {
                self.terms.push((p, c));
                self.terms.sort_by(|a, b| a.0.total_cmp(&b.0));
            }
        }
    }

    /// Sum of two expansions; the cutoff is the smaller one.
    pub fn merged(mut self, other: &Expansion) -> Self {
        for &(p, c) in &other.terms {
            self.add_term(p, c);
        }
        self.cutoff = self.cutoff.min(other.cutoff);
        self
    }

    pub fn scaled(mut self, factor: f64) -> Self {
        for term in &mut self.terms {
            term.1 *= factor;
        }
        self
    }

    pub fn coefficient(&self, p: f64) -> f64 {
        self.terms.iter().find(|(q, _)| *q == p).map_or(0.0, |t| t.1)
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        self.terms.iter().map(|&(p, c)| c * t.powf(p)).sum()
    }
}

/// Largest t with |next|·t^n ≤ 1e−17·|c₀|: the first omitted term is below
/// rounding relative to the leading one.
fn cutoff_from(leading: f64, next: f64, n: usize) -> f64 {
    if next == 0.0 || leading == 0.0 {
        return CUTOFF_CAP;
    }
    (1e-17 * leading.abs() / next.abs()).powf(1.0 / n as f64).min(CUTOFF_CAP)
}

/// Multiplies a power series by e^{−t/4}.
fn times_exp_quarter(coeffs: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; coeffs.len()];
    for (i, &c) in coeffs.iter().enumerate() {
        let mut e = 1.0;
        for j in 0..coeffs.len() - i {
            if j > 0 {
                e *= -0.25 / j as f64;
            }
            out[i + j] += c * e;
        }
    }
    out
}

/// vol·K(t, 0) = vol/(4πt)·e^{−t/4}·Σ_k (−t)^k/k!·(1 − 2^{1−2k})|B_{2k}|
/// (the k = 0 moment is 1).
pub fn identity_expansion(vol: f64, terms: usize) -> Expansion {
    let terms = terms.clamp(2, BERNOULLI_EVEN.len());
    let mut moments = Vec::with_capacity(terms + 1);
    let mut fact = 1.0;
    for k in 0..=terms {
        if k > 0 {
            fact *= k as f64;
        }
        let m = if k == 0 {
            1.0
        } else {
            (1.0 - 2f64.powi(1 - 2 * k as i32)) * BERNOULLI_EVEN[k - 1].abs()
        };
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        moments.push(sign * m / fact);
    }
    let coeffs = times_exp_quarter(&moments);
    let scale = vol / (4.0 * PI);
    let mut e = Expansion::new(cutoff_from(coeffs[0], coeffs[terms], terms));
    for (k, c) in coeffs.iter().take(terms).enumerate() {
        e.add_term(k as f64 - 1.0, scale * c);
    }
    e
}

/// Σ over cones of e^{−t/4}·Σ_k E_k t^k.
pub fn elliptic_expansion(orders: &[u64], terms: usize) -> Expansion {
    let mut total = vec![0.0; terms];
    let mut cutoff = CUTOFF_CAP;
    for &q in orders {
        let e = cone_expansion(q, terms + 1);
        cutoff = cutoff.min(cutoff_from(e[0], e[terms], terms));
        for (acc, v) in total.iter_mut().zip(&e) {
            *acc += v;
        }
    }
    let coeffs = times_exp_quarter(&total);
    let mut out = Expansion::new(cutoff);
    if !orders.is_empty() {
        for (k, c) in coeffs.into_iter().enumerate() {
            out.add_term(k as f64, c);
        }
    }
    out
}

/// Below this t the hyperbolic trace is under 1e−18 of the identity term
/// and contributes no expansion terms.
pub fn hyperbolic_cutoff(lengths: &[Geodesic]) -> f64 {
    match lengths.iter().map(|g| g.length).reduce(f64::min) {
        Some(l) => (l * l / 180.0).min(CUTOFF_CAP),
        None => CUTOFF_CAP,
    }
}

/// −Σ_λ e^{−λt} expanded in Taylor terms.
pub fn small_eigenvalue_expansion(eigenvalues: &[f64], terms: usize) -> Expansion {
    let mut out = Expansion::new(CUTOFF_CAP);
    if eigenvalues.is_empty() {
        return out;
    }
    let mut fact = 1.0;
    for k in 0..terms {
        if k > 0 {
            fact *= k as f64;
        }
        let c: f64 = eigenvalues.iter().map(|&l| (-l).powi(k as i32)).sum();
        out.add_term(k as f64, -c / fact);
    }
    let lmax = eigenvalues.iter().cloned().fold(0.0, f64::max);
    if lmax > 0.0 {
        fact *= terms as f64;
        out.cutoff = out.cutoff.min((1e-17 * fact).powf(1.0 / terms as f64) / lmax);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hplane::heat_kernel_h;
    use crate::traces::{elliptic_trace_u, hyperbolic_trace};

    #[test]
    fn identity_expansion_reproduces_kernel() {
        let e = identity_expansion(1.0, DEFAULT_EXPANSION_TERMS);
        assert!((e.coefficient(-1.0) - 1.0 / (4.0 * PI)).abs() < 1e-17);
        // 1 − t/3 overall: the t^0 coefficient is −(1/4 + 1/12)/(4π)
        assert!((e.coefficient(0.0) + 1.0 / (12.0 * PI)).abs() < 1e-16);
        let t = e.cutoff;
        let k = heat_kernel_h(t, 0.0).unwrap();
        assert!(((e.evaluate(t) - k) / k).abs() < 1e-13, "cutoff {t}");
    }

    #[test]
    fn elliptic_expansion_reproduces_trace() {
        let e = elliptic_expansion(&[3, 7], DEFAULT_EXPANSION_TERMS);
        assert!((e.coefficient(0.0) - (8.0 / 36.0 + 48.0 / 84.0)).abs() < 1e-14);
        let t = e.cutoff;
        let v = elliptic_trace_u(&[3, 7], t).unwrap();
        assert!(((e.evaluate(t) - v) / v).abs() < 1e-12, "cutoff {t}");
    }

    #[test]
    fn hyperbolic_negligible_below_cutoff() {
        let g = [Geodesic::new(1.0, 1)];
        let t = hyperbolic_cutoff(&g);
        let h = hyperbolic_trace(&g, t).unwrap();
        assert!(h < 1e-18 / (4.0 * PI * t));
    }

    #[test]
    fn small_eigenvalues_taylor() {
        let e = small_eigenvalue_expansion(&[0.0, 0.2], 8);
        let t = 0.04;
        let want = -(1.0 + (-0.2f64 * t).exp());
        assert!((e.evaluate(t) - want).abs() < 1e-16);
    }
}
