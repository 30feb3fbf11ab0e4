//! Elliptic (cone point) contributions to the heat trace.
//!
//! Each cone of order q contributes a u-integral whose inner sum over
//! n = 1, …, q−1 has the closed form
//! Σ 1/(sinh²x + sin²(nπ/q)) = 2q·coth(qx)/sinh(2x) − 1/sinh²x,  x = u/2,
//! so the cost per cone does not grow with q.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::special_fn::{integrate_breaks, integrate_line, integrate_tail, QuadConfig};

/// ψ(x) = 2/(x sinh 2x) − 1/sinh²x, Taylor coefficients in x².
const PSI_SERIES: [f64; 11] = [
    -1.0 / 3.0,
    11.0 / 45.0,
    -38.0 / 315.0,
    247.0 / 4725.0,
    -2026.0 / 93555.0,
    1880902.0 / 212837625.0,
    -65476.0 / 18243225.0,
    236982223.0 / 162820783125.0,
    -20442022.0 / 34648262649.0,
    73235694842.0 / 306265893058125.0,
    -14321948612.0 / 147778647699375.0,
];

/// φ(y) = coth y − 1/y = y·Σ c_k y^{2k}.
const PHI_SERIES: [f64; 10] = [
    1.0 / 3.0,
    -1.0 / 45.0,
    2.0 / 945.0,
    -1.0 / 4725.0,
    2.0 / 93555.0,
    -1382.0 / 638512875.0,
    4.0 / 18243225.0,
    -3617.0 / 162820783125.0,
    87734.0 / 38979295480125.0,
    -349222.0 / 1531329465290625.0,
];

fn horner(coeffs: &[f64], x2: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x2 + c)
}

fn psi(x: f64) -> f64 {
    if x < 0.25 {
        horner(&PSI_SERIES, x * x)
    } else {
        let s = x.sinh();
        2.0 / (x * (2.0 * x).sinh()) - 1.0 / (s * s)
    }
}

fn phi(y: f64) -> f64 {
    if y < 0.5 {
        y * horner(&PHI_SERIES, y * y)
    } else {
        1.0 / y.tanh() - 1.0 / y
    }
}

/// cosh(x)·Σ_{n=1}^{q−1} 1/(sinh²x + sin²(nπ/q)) for x ≥ 0.
pub(crate) fn cone_inner_sum(q: u64, x: f64) -> f64 {
    let qf = q as f64;
    if x < 0.5 {
        let g = psi(x)
            + if x == 0.0 {
                qf * qf / 3.0
            } else {
                2.0 * qf * phi(qf * x) / (2.0 * x).sinh()
            };
        x.cosh() * g
    } else {
        let e = (-x).exp();
        let e2 = e * e;
        let coth = 1.0 / (qf * x).tanh();
        2.0 * e * (1.0 + e2) * (qf * coth / (1.0 - e2 * e2) - 1.0 / ((1.0 - e2) * (1.0 - e2)))
    }
}

/// cosh(x)/(sinh²x + a) for a single n, with a = sin²(nπ/q).
fn cone_single_term(a: f64, x: f64) -> f64 {
    let e = (-x).exp();
    let e2 = e * e;
    let d = 1.0 - e2;
    2.0 * e * (1.0 + e2) / (d * d + 4.0 * a * e2)
}

fn check_order(q: u64) -> Result<()> {
    if q < 2 {
        return Err(Error::domain(format!("cone order must be at least 2, got {q}")));
    }
    Ok(())
}

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::domain(format!("trace needs t > 0, got {t}")));
    }
    Ok(())
}

/// Breakpoints resolving the width-1/q peak of the integrand at u = 0.
fn cone_breaks(q: u64, upper: f64) -> Vec<f64> {
    let mut breaks = vec![0.0];
    let mut b = 1.0 / q as f64;
    while b < upper {
        breaks.push(b);
        b *= 4.0;
    }
    breaks.push(upper);
    breaks
}

fn u_prefactor(t: f64) -> f64 {
    (-t / 4.0).exp() / (16.0 * PI * t).sqrt()
}

/// ∫₀^∞ e^{−u²/4t} f(u) du split into a resolved head and a mapped tail.
fn gaussian_weighted<F: Fn(f64) -> f64>(f: F, q: u64, t: f64, cfg: QuadConfig) -> Result<f64> {
    let upper = 1.0;
    let g = |u: f64| {
        let gauss = u * u / (4.0 * t);
        if gauss > 745.0 {
            0.0
        } else {
            (-gauss).exp() * f(u)
        }
    };
    let head = integrate_breaks(g, &cone_breaks(q, upper), cfg)?;
    let tail = integrate_tail(g, upper, (2.0 * t.sqrt()).min(2.0), cfg)?;
    Ok(head.value + tail.value)
}

/// Contribution of one cone of order q, u-form with the closed inner sum.
pub fn elliptic_cone_u(q: u64, t: f64, cfg: QuadConfig) -> Result<f64> {
    check_order(q)?;
    check_time(t)?;
    let integral = gaussian_weighted(|u| cone_inner_sum(q, 0.5 * u), q, t, cfg)?;
    Ok(u_prefactor(t) * integral / q as f64)
}

/// Same contribution with the sum over n done term by term.
pub fn elliptic_cone_u_termwise(q: u64, t: f64, cfg: QuadConfig) -> Result<f64> {
    check_order(q)?;
    check_time(t)?;
    let mut total = 0.0;
    for n in 1..q {
        let a = sin_ratio(n, q).powi(2);
        total += gaussian_weighted(|u| cone_single_term(a, 0.5 * u), q, t, cfg)?;
    }
    Ok(u_prefactor(t) * total / q as f64)
}

/// sin(nπ/q), evaluated on the nearer half so values near n = q keep full
/// relative accuracy.
pub(crate) fn sin_ratio(n: u64, q: u64) -> f64 {
    let m = n.min(q - n);
    (PI * m as f64 / q as f64).sin()
}

/// e^{−2πβr}/(1 + e^{−2πr}) for β ∈ [0, 1], without overflow on either side.
pub(crate) fn fermi_weight(beta: f64, r: f64) -> f64 {
    if r >= 0.0 {
        (-2.0 * PI * beta * r).exp() / (1.0 + (-2.0 * PI * r).exp())
    } else {
        (2.0 * PI * (1.0 - beta) * r).exp() / (1.0 + (2.0 * PI * r).exp())
    }
}

/// ∫_{−∞}^{∞} e^{−tr²} e^{−2πβr}/(1 + e^{−2πr}) dr.
pub(crate) fn fermi_gaussian_integral(beta: f64, t: f64, cfg: QuadConfig) -> Result<f64> {
    let right = integrate_tail(
        |r: f64| (-t * r * r).exp() * fermi_weight(beta, r),
        0.0,
        (1.0 / t.sqrt()).min(1.0 / (2.0 * PI * beta.max(1e-3))),
        cfg,
    )?;
    let left = integrate_tail(
        |r: f64| (-t * r * r).exp() * fermi_weight(beta, -r),
        0.0,
        (1.0 / t.sqrt()).min(1.0 / (2.0 * PI * (1.0 - beta).max(1e-3))),
        cfg,
    )?;
    Ok(right.value + left.value)
}

/// Contribution of one cone of order q, r-form.
pub fn elliptic_cone_r(q: u64, t: f64, cfg: QuadConfig) -> Result<f64> {
    check_order(q)?;
    check_time(t)?;
    let qf = q as f64;
    let mut total = 0.0;
    for n in 1..q {
        let beta = n as f64 / qf;
        let integral = fermi_gaussian_integral(beta, t, cfg)?;
        total += integral / (2.0 * qf * sin_ratio(n, q));
    }
    Ok((-t / 4.0).exp() * total)
}

/// ∫_{−∞}^{∞} H(r) e^{−2πβr}/(1 + e^{−2πr}) dr for a general spectral
/// transform H given as a function of r².
pub(crate) fn fermi_transform_integral<F: Fn(f64) -> f64>(
    big_h: F,
    beta: f64,
    cfg: QuadConfig,
) -> Result<f64> {
    let scale = 1.0 / (2.0 * PI * beta.min(1.0 - beta).max(1e-2));
    let res = integrate_line(|r: f64| big_h(r * r) * fermi_weight(beta, r), 0.0, scale.min(1.0), cfg)?;
    Ok(res.value)
}

/// Taylor coefficients E_k of one cone's small-time expansion
/// e^{−t/4}·Σ_k E_k t^k.
pub(crate) fn cone_expansion(q: u64, terms: usize) -> Vec<f64> {
    let mut numer = Vec::with_capacity(terms);
    let mut denom = Vec::with_capacity(terms);
    let mut fact2k = 1.0f64;
    let mut four_k = 1.0f64;
    for k in 0..terms {
        if k > 0 {
            fact2k *= (2 * k - 1) as f64 * (2 * k) as f64;
            four_k *= 4.0;
        }
        numer.push(1.0 / (four_k * fact2k));
        denom.push(if k == 0 { 0.0 } else { 0.5 / fact2k });
    }
    let mut acc = vec![0.0; terms];
    let mut quot = vec![0.0; terms];
    for n in 1..q {
        let a = sin_ratio(n, q).powi(2);
        for k in 0..terms {
            let mut v = numer[k];
            for j in 1..=k {
                v -= denom[j] * quot[k - j];
            }
            quot[k] = v / a;
            acc[k] += quot[k];
        }
    }
    // ∫₀^∞ e^{−u²/4t} u^{2k} du / √(16πt) = (2k)!/(4·k!) t^k
    let mut out = Vec::with_capacity(terms);
    let mut ratio = 0.25;
    for (k, a) in acc.iter().enumerate() {
        if k > 0 {
            ratio *= (2 * k - 1) as f64 * (2 * k) as f64 / k as f64;
        }
        out.push(ratio * a / q as f64);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct_inner(q: u64, x: f64) -> f64 {
        let s = x.sinh();
        (1..q).map(|n| 1.0 / (s * s + sin_ratio(n, q).powi(2))).sum::<f64>() * x.cosh()
    }

    #[test]
    fn inner_sum_matches_direct() {
        for &q in &[2u64, 3, 7, 40] {
            for &x in &[0.0, 1e-6, 0.01, 0.2, 0.3, 0.49, 0.5, 0.8, 3.0, 12.0] {
                let a = cone_inner_sum(q, x);
                let b = direct_inner(q, x);
                assert!(((a - b) / b).abs() < 1e-13, "q={q} x={x} {a} {b}");
            }
        }
    }

    #[test]
    fn inner_sum_at_zero() {
        assert!((cone_inner_sum(5, 0.0) - 8.0).abs() < 1e-14);
    }

    #[test]
    fn fermi_weight_is_continuous() {
        let a = fermi_weight(0.3, 1e-12);
        let b = fermi_weight(0.3, -1e-12);
        assert!((a - b).abs() < 1e-11);
        assert!(fermi_weight(0.5, 400.0) == 0.0 || fermi_weight(0.5, 400.0).is_finite());
    }

    #[test]
    fn order_two_forms_agree() {
        let cfg = QuadConfig::tight();
        let u = elliptic_cone_u(2, 1.0, cfg).unwrap();
        let r = elliptic_cone_r(2, 1.0, cfg).unwrap();
        let w = elliptic_cone_u_termwise(2, 1.0, cfg).unwrap();
        assert!((u - r).abs() < 1e-12 && (u - w).abs() < 1e-12, "{u} {r} {w}");
    }

    #[test]
    fn expansion_leading_term() {
        let e = cone_expansion(7, 4);
        assert!((e[0] - 48.0 / 84.0).abs() < 1e-14);
    }
}
