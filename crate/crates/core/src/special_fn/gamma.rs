//! Log-gamma, digamma and the entire reciprocal gamma function.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// B_2, B_4, …, B_30.
pub const BERNOULLI_EVEN: [f64; 15] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
];

const SHIFT_RADIUS: f64 = 15.0;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_741_780_329_736_406;

fn check_domain(s: Complex64, name: &str) -> Result<()> {
    if !(s.re > 0.0) || !s.im.is_finite() {
        return Err(Error::domain(format!("{name} needs Re(s) > 0, got {s}")));
    }
    Ok(())
}

/// Steps needed to push |s + k| past the asymptotic radius.
fn shift_count(s: Complex64) -> usize {
    let mut k = 0;
    while (s + k as f64).norm() < SHIFT_RADIUS {
        k += 1;
    }
    k
}

fn stirling_log_gamma(w: Complex64) -> Complex64 {
    let ln_w = w.ln();
    let mut series = Complex64::new(0.0, 0.0);
    let inv = 1.0 / w;
    let inv2 = inv * inv;
    let mut power = inv;
    for (k, b) in BERNOULLI_EVEN.iter().enumerate().take(10) {
        let m = 2.0 * (k + 1) as f64;
        series += power * (b / (m * (m - 1.0)));
        power *= inv2;
    }
    (w - 0.5) * ln_w - w + LN_SQRT_2PI + series
}

/// Principal branch of log Γ(s) for Re(s) > 0.
pub fn log_gamma(s: Complex64) -> Result<Complex64> {
    check_domain(s, "log_gamma")?;
    let n = shift_count(s);
    let mut modulus = 1.0;
    let mut ln_modulus = 0.0;
    let mut arg = 0.0;
    for k in 0..n {
        let z = s + k as f64;
        modulus *= z.norm();
        if modulus > 1e250 || modulus < 1e-250 {
            ln_modulus += modulus.ln();
            modulus = 1.0;
        }
        arg += z.im.atan2(z.re);
    }
    ln_modulus += modulus.ln();
    Ok(stirling_log_gamma(s + n as f64) - Complex64::new(ln_modulus, arg))
}

/// ψ(s) = Γ′(s)/Γ(s) for Re(s) > 0.
pub fn digamma(s: Complex64) -> Result<Complex64> {
    check_domain(s, "digamma")?;
    let n = shift_count(s);
    let mut head = Complex64::new(0.0, 0.0);
    for k in 0..n {
        head += 1.0 / (s + k as f64);
    }
    let w = s + n as f64;
    let inv = 1.0 / w;
    let inv2 = inv * inv;
    let mut power = inv2;
    let mut series = Complex64::new(0.0, 0.0);
    for (k, b) in BERNOULLI_EVEN.iter().enumerate().take(10) {
        let m = 2.0 * (k + 1) as f64;
        series += power * (b / m);
        power *= inv2;
    }
    Ok(w.ln() - 0.5 * inv - series - head)
}

/// ln Γ(x) for real x > 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    Ok(log_gamma(Complex64::new(x, 0.0))?.re)
}

/// Γ(x) for real x > 0.
pub fn gamma(x: f64) -> Result<f64> {
    Ok(ln_gamma(x)?.exp())
}

/// 1/Γ(s), entire; left of the line Re(s) = 1/2 it is reached by the upward
/// recurrence 1/Γ(s) = s(s+1)…(s+m−1)/Γ(s+m).
pub fn recip_gamma(s: Complex64) -> Complex64 {
    let mut m = 0usize;
    while s.re + (m as f64) < 0.5 {
        m += 1;
    }
    let mut prefactor = Complex64::new(1.0, 0.0);
    for j in 0..m {
        prefactor *= s + j as f64;
    }
    let shifted = s + m as f64;
    match log_gamma(shifted) {
        Ok(lg) => prefactor * (-lg).exp(),
        Err(_) => Complex64::new(0.0, 0.0),
    }
}

/// 1/(Γ(s)(s+p)), the coefficient a term c·t^p contributes to a Mellin
/// continuation. For integer p = k ≥ 0 this is entire:
/// s(s+1)…(s+k−1)/Γ(s+k+1).
pub fn recip_gamma_over(s: Complex64, p: f64) -> Result<Complex64> {
    if p >= 0.0 && p.fract() == 0.0 {
        let k = p as usize;
        let mut prefactor = Complex64::new(1.0, 0.0);
        for j in 0..k {
            prefactor *= s + j as f64;
        }
        return Ok(prefactor * recip_gamma(s + (k + 1) as f64));
    }
    let denom = s + p;
    if denom.norm() == 0.0 {
        return Err(Error::Pole(format!("{s}")));
    }
    Ok(recip_gamma(s) / denom)
}

/// Tricomi's entire incomplete gamma γ*(s, z) = z^{−s} γ(s, z)/Γ(s)
/// = e^{−z} Σ_k z^k / Γ(s+k+1).
pub fn tricomi_gamma_star(s: Complex64, z: Complex64) -> Complex64 {
    let mut term = recip_gamma(s + 1.0);
    let mut sum = term;
    let mut k = 0usize;
    loop {
        let next_den = s + (k + 1) as f64;
        term = term * z / next_den;
        sum += term;
        k += 1;
        if k > 8 && term.norm() <= 1e-17 * sum.norm().max(1e-300) {
            break;
        }
        if k > 2000 {
            break;
        }
    }
    (-z).exp() * sum
}

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082;
