//! Order statistics of Rayleigh fading and binomial alignment-event probabilities.
//!
//! `f(n)` is the mean of the largest of `n` i.i.d. unit-power Rayleigh magnitudes,
//! `g(n)` the mean of the largest squared magnitude (the `n`-th harmonic number),
//! and `Ψ(L) = f(L)² / g(L)`.
//!
//! The textbook alternating binomial sums for `f` and `g` cancel catastrophically
//! beyond a few dozen terms, so `f` is computed by adaptive quadrature of
//! `∫₀^∞ 1 − (1 − e^{−x²})ⁿ dx` and `g` as a plain harmonic sum. The series forms
//! are kept for cross-checking at small `n`.

use crate::error::{invalid, Error, Result};

/// Largest `n` accepted by the alternating-series forms.
pub const SERIES_MAX_N: usize = 30;

/// Number of i.i.d. unit-variance complex Gaussian draws whose maximum is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrderStatParams {
    n: usize,
}

impl OrderStatParams {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroCount(n));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// Binomial model for how many of the `num_oob_irs` out-of-band IRSs align to a UE.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventModel {
    pub num_oob_irs: usize,
    pub align_prob: f64,
}

impl EventModel {
    pub fn new(num_oob_irs: usize, align_prob: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&align_prob) {
            return Err(Error::Probability(align_prob));
        }
        Ok(Self {
            num_oob_irs,
            align_prob,
        })
    }

    /// `Pr(E_m)` for `m = 0..=num_oob_irs`.
    pub fn pmf(&self) -> Vec<f64> {
        (0..=self.num_oob_irs)
            .map(|m| binomial_pmf(self.num_oob_irs, self.align_prob, m))
            .collect()
    }
}

/// `E[max_{i≤n} |X_i|]` for i.i.d. `X_i ~ CN(0, 1)`.
pub fn f_mean_max(n: usize) -> Result<f64> {
    let n = OrderStatParams::new(n)?.n() as f64;
    // Integrand is 1 − (1 − e^{−x²})ⁿ, bounded by n·e^{−x²}; the tail past
    // x_max contributes below 1e-17.
    let integrand = |x: f64| {
        // ln(1 − e^{−x²}) via ln_1p keeps full relative accuracy as the CDF nears 1,
        // which matters once it is multiplied by a large n.
        let log_cdf = n * (-(-x * x).exp()).ln_1p();
        -log_cdf.exp_m1()
    };
    let x_max = (n.ln() + 40.0).sqrt();
    Ok(adaptive_gauss_kronrod(integrand, 0.0, x_max, 1e-14))
}

/// `E[max_{i≤n} |X_i|²]` for i.i.d. `X_i ~ CN(0, 1)`, which is the harmonic number `H_n`.
pub fn g_mean_max_sq(n: usize) -> Result<f64> {
    let n = OrderStatParams::new(n)?.n();
    // Summing smallest terms first keeps the rounding error near one ulp.
    Ok((1..=n).rev().map(|i| 1.0 / i as f64).sum())
}

/// `Ψ(L) = f(L)² / g(L)`.
pub fn psi(l: usize) -> Result<f64> {
    let f = f_mean_max(l)?;
    Ok(f * f / g_mean_max_sq(l)?)
}

/// Alternating-sum form `n Σ_k C(n−1,k)(−1)^k (k+1)^{−3/2} √π/2` of `f(n)`.
///
/// Only valid for small `n`; rejects `n > SERIES_MAX_N`.
pub fn f_mean_max_series(n: usize) -> Result<f64> {
    let s = alternating_series(n, |k| (k as f64 + 1.0).powf(-1.5))?;
    Ok(s * std::f64::consts::PI.sqrt() / 2.0)
}

/// Alternating-sum form `n Σ_k C(n−1,k)(−1)^k (k+1)^{−2}` of `g(n)`.
///
/// Only valid for small `n`; rejects `n > SERIES_MAX_N`.
pub fn g_mean_max_sq_series(n: usize) -> Result<f64> {
    alternating_series(n, |k| (k as f64 + 1.0).powi(-2))
}

fn alternating_series(n: usize, term: impl Fn(usize) -> f64) -> Result<f64> {
    let n = OrderStatParams::new(n)?.n();
    if n > SERIES_MAX_N {
        return Err(Error::SeriesUnstable(n));
    }
    let mut binom = 1.0;
    let mut sum = 0.0;
    for k in 0..n {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * binom * term(k);
        binom = binom * (n - 1 - k) as f64 / (k + 1) as f64;
    }
    Ok(n as f64 * sum)
}

/// `Pr(E_m) = C(M−1, m) p^m (1−p)^{M−1−m}` for the model `e`.
pub fn event_pmf(e: &EventModel, m: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&e.align_prob) {
        return Err(Error::Probability(e.align_prob));
    }
    if m > e.num_oob_irs {
        return Err(Error::EventOutOfSupport {
            m,
            max: e.num_oob_irs,
        });
    }
    Ok(binomial_pmf(e.num_oob_irs, e.align_prob, m))
}

/// Binomial coefficient as a float; exact for the small arguments used here.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn binomial_pmf(trials: usize, p: f64, m: usize) -> f64 {
    binomial(trials, m) * p.powi(m as i32) * (1.0 - p).powi((trials - m) as i32)
}

/// Validates `paths ≤ elements` and `paths ≥ 1`.
pub fn check_paths(paths: usize, elements: usize) -> Result<()> {
    if paths == 0 {
        return Err(invalid("paths", "must be at least 1"));
    }
    if elements == 0 {
        return Err(invalid("elements", "must be at least 1"));
    }
    if paths > elements {
        return Err(Error::PathsExceedElements { paths, elements });
    }
    Ok(())
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// 15-point Kronrod estimate and its difference from the embedded 7-point Gauss rule.
fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = GK_WEIGHTS[7] * fc;
    let mut gauss = GAUSS_WEIGHTS[3] * fc;
    for i in 0..7 {
        let dx = h * GK_NODES[i];
        let pair = f(c - dx) + f(c + dx);
        kronrod += GK_WEIGHTS[i] * pair;
        if i % 2 == 1 {
            gauss += GAUSS_WEIGHTS[i / 2] * pair;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

fn adaptive_gauss_kronrod(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    // Error budget is shared in proportion to interval width, with a floor at a few
    // ulps of the local estimate so rounding noise cannot force endless bisection.
    fn recurse(f: &impl Fn(f64) -> f64, a: f64, b: f64, density: f64, depth: u32) -> f64 {
        let (est, err) = gk15(f, a, b);
        let budget = (density * (b - a))
            .max(64.0 * f64::EPSILON * est.abs())
            .max(1e-18);
        if err <= budget || depth == 0 {
            return est;
        }
        let m = 0.5 * (a + b);
        recurse(f, a, m, density, depth - 1) + recurse(f, m, b, density, depth - 1)
    }
    recurse(&f, a, b, tol / (b - a), 30)
}
