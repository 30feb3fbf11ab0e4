//! Adaptive Gauss–Kronrod quadrature over finite, semi-infinite and doubly
//! infinite ranges, generic over real and complex integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Values that can be integrated: reals and complex numbers.
pub trait QuadValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Send + Sync
{
    const ZERO: Self;
    fn magnitude(&self) -> f64;
    fn finite(&self) -> bool;
}

impl QuadValue for f64 {
    const ZERO: Self = 0.0;
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn finite(&self) -> bool {
        self.is_finite()
    }
}

impl QuadValue for Complex64 {
    const ZERO: Self = Complex64 { re: 0.0, im: 0.0 };
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult<T = f64> {
    pub value: T,
    /// Absolute error estimate.
    pub error_estimate: f64,
    pub evaluations: usize,
}

/// Tolerances and evaluation budget. A run succeeds once the summed error
/// estimate is below `max(abs_tol, rel_tol * |value|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_evals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            abs_tol: 1e-10,
            rel_tol: 0.0,
            max_evals: 400_000,
        }
    }
}

impl QuadConfig {
    pub fn absolute(tol: f64) -> Self {
        QuadConfig {
            abs_tol: tol,
            ..Default::default()
        }
    }

    /// Tight relative accuracy for inner integrals whose results are
    /// differenced or fed into further quadratures.
    pub fn tight() -> Self {
        QuadConfig {
            abs_tol: 1e-300,
            rel_tol: 1e-13,
            max_evals: 400_000,
        }
    }

    pub fn with_rel(mut self, rel: f64) -> Self {
        self.rel_tol = rel;
        self
    }

    pub fn with_abs(mut self, abs: f64) -> Self {
        self.abs_tol = abs;
        self
    }
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    err: f64,
    resabs: f64,
}

struct Ranked {
    err: f64,
    a: f64,
    slot: usize,
}

impl PartialEq for Ranked {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Ranked {}
impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Ranked {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn eval<T: QuadValue, F: Fn(f64) -> T>(f: &F, x: f64) -> Result<T> {
    let y = f(x);
    if y.finite() {
        Ok(y)
    } else {
        Err(Error::NonFinite { at: x })
    }
}

fn kronrod21<T: QuadValue, F: Fn(f64) -> T>(f: &F, a: f64, b: f64) -> Result<Panel<T>> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = eval(f, c)?;
    let mut resg = T::ZERO;
    let mut resk = fc * WGK[10];
    let mut resabs = WGK[10] * fc.magnitude();
    let mut f1s = [T::ZERO; 10];
    let mut f2s = [T::ZERO; 10];
    for j in 0..5 {
        let k = 2 * j + 1;
        let x = h * XGK[k];
        let f1 = eval(f, c - x)?;
        let f2 = eval(f, c + x)?;
        resg = resg + (f1 + f2) * WG[j];
        resk = resk + (f1 + f2) * WGK[k];
        resabs += WGK[k] * (f1.magnitude() + f2.magnitude());
        f1s[k] = f1;
        f2s[k] = f2;
    }
    for j in 0..5 {
        let k = 2 * j;
        let x = h * XGK[k];
        let f1 = eval(f, c - x)?;
        let f2 = eval(f, c + x)?;
        resk = resk + (f1 + f2) * WGK[k];
        resabs += WGK[k] * (f1.magnitude() + f2.magnitude());
        f1s[k] = f1;
        f2s[k] = f2;
    }
    let mean = resk * 0.5;
    let mut resasc = WGK[10] * (fc - mean).magnitude();
    for k in 0..10 {
        resasc += WGK[k] * ((f1s[k] - mean).magnitude() + (f2s[k] - mean).magnitude());
    }
    let scale = h.abs();
    let resabs = resabs * scale;
    let resasc = resasc * scale;
    let mut err = ((resk - resg) * h).magnitude();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    Ok(Panel {
        a,
        b,
        value: resk * h,
        err,
        resabs,
    })
}

/// Global adaptive bisection starting from the panels between consecutive
/// breakpoints.
pub fn integrate_breaks<T, F>(f: F, breaks: &[f64], cfg: QuadConfig) -> Result<QuadratureResult<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    if breaks.len() < 2 {
        return Err(Error::InvalidInterval {
            a: breaks.first().copied().unwrap_or(f64::NAN),
            b: f64::NAN,
        });
    }
    for w in breaks.windows(2) {
        if !(w[0] <= w[1]) {
            return Err(Error::InvalidInterval { a: w[0], b: w[1] });
        }
    }
    let mut panels: Vec<Panel<T>> = Vec::new();
    let mut heap = BinaryHeap::new();
    let mut evals = 0usize;
    let mut total = T::ZERO;
    let mut total_err = 0.0;
    let mut total_abs = 0.0;
    for w in breaks.windows(2) {
        if w[0] == w[1] {
            continue;
        }
        let p = kronrod21(&f, w[0], w[1])?;
        evals += 21;
        total = total + p.value;
        total_err += p.err;
        total_abs += p.resabs;
        heap.push(Ranked {
            err: p.err,
            a: p.a,
            slot: panels.len(),
        });
        panels.push(p);
    }
    loop {
        let tol = cfg.abs_tol.max(cfg.rel_tol * total.magnitude());
        let floor = 100.0 * f64::EPSILON * total_abs;
        if total_err <= tol || total_err <= floor {
            break;
        }
        if evals + 42 > cfg.max_evals {
            return Err(Error::NonConvergence {
                value: total.magnitude(),
                error: total_err,
                evaluations: evals,
            });
        }
        let Some(top) = heap.pop() else {
            return Err(Error::NonConvergence {
                value: total.magnitude(),
                error: total_err,
                evaluations: evals,
            });
        };
        let (a, b) = (panels[top.slot].a, panels[top.slot].b);
        let mid = 0.5 * (a + b);
        if !(mid > a && mid < b) || (b - a) <= 1e-14 * a.abs().max(b.abs()).max(1e-300) {
            continue;
        }
        let left = kronrod21(&f, a, mid)?;
        let right = kronrod21(&f, mid, b)?;
        evals += 42;
        let old = &panels[top.slot];
        total = total - old.value + left.value + right.value;
        total_err += left.err + right.err - old.err;
        total_abs += left.resabs + right.resabs - old.resabs;
        heap.push(Ranked {
            err: left.err,
            a: left.a,
            slot: top.slot,
        });
        heap.push(Ranked {
            err: right.err,
            a: right.a,
            slot: panels.len(),
        });
        panels[top.slot] = left;
        panels.push(right);
    }
    if panels.is_empty() {
        return Ok(QuadratureResult {
            value: T::ZERO,
            error_estimate: 0.0,
            evaluations: 1,
        });
    }
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let mut sum = T::ZERO;
    let mut comp = T::ZERO;
    let mut err = 0.0;
    for p in &panels {
        // Kahan compensation, componentwise through the trait ops.
        let y = p.value - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        err += p.err;
    }
    Ok(QuadratureResult {
        value: sum,
        error_estimate: err,
        evaluations: evals,
    })
}

/// ∫_a^b f with the given configuration.
pub fn integrate<T, F>(f: F, a: f64, b: f64, cfg: QuadConfig) -> Result<QuadratureResult<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    if a > b || a.is_nan() || b.is_nan() {
        return Err(Error::InvalidInterval { a, b });
    }
    integrate_breaks(f, &[a, b], cfg)
}

/// ∫_a^b f with an absolute tolerance.
pub fn integrate_finite<F>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadratureResult>
where
    F: Fn(f64) -> f64,
{
    integrate(f, a, b, QuadConfig::absolute(tol))
}

const TAIL_BREAKS: [f64; 6] = [0.0, 0.25, 0.5, 0.75, 0.9, 1.0];

/// ∫_a^∞ f through t = a + scale·x/(1−x); `scale` should be the length over
/// which f decays.
pub fn integrate_tail<T, F>(f: F, a: f64, scale: f64, cfg: QuadConfig) -> Result<QuadratureResult<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    if !(scale > 0.0) || !a.is_finite() {
        return Err(Error::domain(format!("tail integral needs finite start and scale > 0, got a={a}, scale={scale}")));
    }
    let g = |x: f64| {
        let one_minus = 1.0 - x;
        let t = a + scale * x / one_minus;
        if !t.is_finite() {
            return T::ZERO;
        }
        let y = f(t);
        if y.finite() && y.magnitude() == 0.0 {
            return T::ZERO;
        }
        y * (scale / (one_minus * one_minus))
    };
    integrate_breaks(g, &TAIL_BREAKS, cfg)
}

/// ∫_0^∞ f with an exponential decay-rate hint and absolute tolerance.
pub fn integrate_semi_infinite<F>(f: F, decay: f64, tol: f64) -> Result<QuadratureResult>
where
    F: Fn(f64) -> f64,
{
    if !(decay > 0.0) {
        return Err(Error::domain("decay hint must be positive"));
    }
    integrate_tail(f, 0.0, 1.0 / decay, QuadConfig::absolute(tol))
}

/// ∫_{−∞}^{∞} f, split at `center`, each half mapped with length `scale`.
pub fn integrate_line<T, F>(f: F, center: f64, scale: f64, cfg: QuadConfig) -> Result<QuadratureResult<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    let right = integrate_tail(|t| f(t), center, scale, cfg)?;
    let left = integrate_tail(|t| f(2.0 * center - t), center, scale, cfg)?;
    Ok(QuadratureResult {
        value: left.value + right.value,
        error_estimate: left.error_estimate + right.error_estimate,
        evaluations: left.evaluations + right.evaluations,
    })
}

/// ∫_{−R}^{R} (R² − r²)^w g(r) dr through r = R sin θ, which removes the
/// algebraic endpoint behaviour for every w > −1.
pub fn integrate_weighted_symmetric<T, F>(
    g: F,
    radius: f64,
    w: f64,
    cfg: QuadConfig,
) -> Result<QuadratureResult<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    if !(w > -1.0) {
        return Err(Error::domain(format!("weight exponent must exceed -1, got {w}")));
    }
    if radius <= 0.0 {
        return Ok(QuadratureResult {
            value: T::ZERO,
            error_estimate: 0.0,
            evaluations: 1,
        });
    }
    let half = std::f64::consts::FRAC_PI_2;
    let p = 2.0 * w + 1.0;
    let res = integrate_breaks(
        |th: f64| {
            let c = th.cos().max(0.0);
            let weight = if p == 1.0 { c } else { c.powf(p) };
            g(radius * th.sin()) * weight
        },
        &[-half, 0.0, half],
        cfg,
    )?;
    let factor = radius.powf(p);
    Ok(QuadratureResult {
        value: res.value * factor,
        error_estimate: res.error_estimate * factor,
        evaluations: res.evaluations,
    })
}

/// Pairwise (cascade) summation of f(0), …, f(n−1).
pub fn pairwise_sum<F: Fn(usize) -> f64>(n: usize, f: F) -> f64 {
    fn go<F: Fn(usize) -> f64>(lo: usize, hi: usize, f: &F) -> f64 {
        if hi - lo <= 64 {
            let mut s = 0.0;
            for i in lo..hi {
                s += f(i);
            }
            s
        } else {
            let mid = lo + (hi - lo) / 2;
            go(lo, mid, f) + go(mid, hi, f)
        }
    }
    if n == 0 {
        0.0
    } else {
        go(0, n, &f)
    }
}
