//! Maximum-likelihood fits and kernel density estimates.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::distributions::density::Kind;
use crate::distributions::{Density, FinitePMF, Kde, Monotonicity, SampleData, Support};
use crate::error::{invalid, Error, Result};

const MAX_ITER: usize = 100;

/// MAD of a normal sample divided by its standard deviation.
const MAD_TO_SD: f64 = 0.6745;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitFamily {
    Exponential,
    Weibull2,
    Lognormal,
    Binomial,
}

/// Outcome of a maximum-likelihood fit.
///
/// Parameters follow the constructor order of the fitted family:
/// `[rate]`, `[shape, rate]`, `[mu, sigma]`, `[n_trials, p]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub family: FitFamily,
    pub params: Vec<f64>,
    pub log_likelihood: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Estimate sits on the boundary of the parameter space (binomial p = 0 or 1).
    pub on_boundary: bool,
}

impl FitResult {
    pub fn to_density(&self) -> Result<Density> {
        match self.family {
            FitFamily::Exponential => Density::exponential(self.params[0]),
            FitFamily::Weibull2 => Density::weibull2(self.params[0], self.params[1]),
            FitFamily::Lognormal => Density::lognormal(self.params[0], self.params[1]),
            FitFamily::Binomial => Err(invalid("binomial fit is discrete")),
        }
    }

    pub fn to_pmf(&self) -> Result<FinitePMF> {
        match self.family {
            FitFamily::Binomial => FinitePMF::binomial(self.params[0] as u64, self.params[1]),
            _ => Err(invalid(format!("{:?} fit is continuous", self.family))),
        }
    }
}

fn positive_logs(data: &SampleData) -> Result<Vec<f64>> {
    data.values()
        .iter()
        .map(|&x| if x > 0.0 { Ok(x.ln()) } else { Err(Error::NonPositiveData(x)) })
        .collect()
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Rate MLE `1 / mean`.
pub fn fit_exponential_mle(data: &SampleData) -> Result<FitResult> {
    positive_logs(data)?;
    let n = data.len() as f64;
    let rate = 1.0 / data.mean();
    Ok(FitResult {
        family: FitFamily::Exponential,
        params: vec![rate],
        log_likelihood: n * rate.ln() - n,
        iterations: 0,
        converged: true,
        on_boundary: false,
    })
}

// Power sums with the exponent shifted by the largest log to avoid overflow:
// s_k = sum (ln x)^k * exp(a (ln x - ln x_max)).
struct PowerSums {
    s0: f64,
    s1: f64,
    s2: f64,
}

fn power_sums(logs: &[f64], lmax: f64, a: f64) -> PowerSums {
    let mut s = PowerSums { s0: 0.0, s1: 0.0, s2: 0.0 };
    for &l in logs {
        let w = (a * (l - lmax)).exp();
        s.s0 += w;
        s.s1 += w * l;
        s.s2 += w * l * l;
    }
    s
}

/// Partial derivatives `(d/d shape, d/d rate)` of the W2 log-likelihood.
pub fn weibull_score(data: &SampleData, shape: f64, rate: f64) -> Result<(f64, f64)> {
    let logs = positive_logs(data)?;
    let n = logs.len() as f64;
    let (mut sxa, mut sxal) = (0.0, 0.0);
    for &l in &logs {
        let xa = (shape * l).exp();
        sxa += xa;
        sxal += xa * l;
    }
    let slog: f64 = logs.iter().sum();
    Ok((n / shape + slog - rate * sxal, n / rate - sxa))
}

/// W2 maximum likelihood: the shape solves the profile equation
/// `sum x^a ln x / sum x^a - 1/a - mean(ln x) = 0` (safeguarded Newton on a
/// sign-change bracket), then `rate = n / sum x^shape`.
pub fn fit_weibull_mle(data: &SampleData) -> Result<FitResult> {
    let logs = positive_logs(data)?;
    let n = logs.len() as f64;
    let lbar = mean(&logs);
    let lvar = logs.iter().map(|l| (l - lbar).powi(2)).sum::<f64>() / n;
    if !(lvar > 0.0) {
        return Err(Error::DegenerateData("all observations are equal".into()));
    }
    let lmax = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let profile = |a: f64| {
        let s = power_sums(&logs, lmax, a);
        let m = s.s1 / s.s0;
        let value = m - 1.0 / a - lbar;
        let slope = (s.s2 / s.s0 - m * m) + 1.0 / (a * a);
        (value, slope)
    };

    // Log-Weibull has standard deviation pi / (shape sqrt 6).
    let mut a = (std::f64::consts::PI / (6.0 * lvar).sqrt()).clamp(1e-3, 1e3);
    let (mut lo, mut hi) = (a, a);
    while profile(lo).0 > 0.0 {
        lo *= 0.5;
        if lo < 1e-12 {
            return Err(Error::NoConvergence(0));
        }
    }
    while profile(hi).0 < 0.0 {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::NoConvergence(0));
        }
    }

    let mut iterations = 0;
    let mut converged = false;
    while iterations < MAX_ITER {
        iterations += 1;
        let (g, slope) = profile(a);
        if g == 0.0 {
            converged = true;
            break;
        }
        if g < 0.0 {
            lo = a;
        } else {
            hi = a;
        }
        let mut next = a - g / slope;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let step = (next - a).abs();
        a = next;
        if step <= 1e-15 * a || hi - lo <= 4.0 * f64::EPSILON * a {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence(iterations));
    }

    let s = power_sums(&logs, lmax, a);
    let sum_xa = (a * lmax).exp() * s.s0;
    let rate = n / sum_xa;
    let log_likelihood = n * rate.ln() + n * a.ln() + (a - 1.0) * logs.iter().sum::<f64>() - n;
    Ok(FitResult {
        family: FitFamily::Weibull2,
        params: vec![a, rate],
        log_likelihood,
        iterations,
        converged,
        on_boundary: false,
    })
}

/// Lognormal MLE in closed form: `mu = mean(ln x)`, `sigma` with divisor `n`.
pub fn fit_lognormal_mle(data: &SampleData) -> Result<FitResult> {
    let logs = positive_logs(data)?;
    let n = logs.len() as f64;
    let mu = mean(&logs);
    let sigma = (logs.iter().map(|l| (l - mu).powi(2)).sum::<f64>() / n).sqrt();
    if !(sigma > 0.0) {
        return Err(Error::DegenerateData("log-observations have zero variance".into()));
    }
    let d = Density::lognormal(mu, sigma)?;
    let log_likelihood = data.values().iter().map(|&x| d.log_pdf(x)).sum();
    Ok(FitResult {
        family: FitFamily::Lognormal,
        params: vec![mu, sigma],
        log_likelihood,
        iterations: 0,
        converged: true,
        on_boundary: false,
    })
}

/// Exact binomial MLE as the integer ratio `(sum k c_k, n_trials * sum c_k)`.
pub fn binomial_p_ratio(counts: &[u64], n_trials: u64) -> Result<(u64, u64)> {
    if counts.len() as u64 != n_trials + 1 {
        return Err(invalid(format!(
            "expected {} counts for {n_trials} trials, got {}",
            n_trials + 1,
            counts.len()
        )));
    }
    let total: u64 = counts.iter().sum();
    if total == 0 || n_trials == 0 {
        return Err(Error::EmptyCounts);
    }
    let successes = counts.iter().enumerate().map(|(k, &c)| k as u64 * c).sum();
    Ok((successes, n_trials * total))
}

/// Binomial `p` from outcome counts `c_0..=c_n`.
pub fn fit_binomial_p(counts: &[u64], n_trials: u64) -> Result<FitResult> {
    let (num, den) = binomial_p_ratio(counts, n_trials)?;
    let p = num as f64 / den as f64;
    let n = n_trials as f64;
    let log_likelihood = counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(k, &c)| {
            let k = k as f64;
            let ln_choose = statrs::function::factorial::ln_binomial(n_trials, k as u64);
            let term = |m: f64, q: f64| if m == 0.0 { 0.0 } else { m * q.ln() };
            c as f64 * (ln_choose + term(k, p) + term(n - k, 1.0 - p))
        })
        .sum();
    Ok(FitResult {
        family: FitFamily::Binomial,
        params: vec![n, p],
        log_likelihood,
        iterations: 0,
        converged: true,
        on_boundary: num == 0 || num == den,
    })
}

fn reference_factor(n: usize) -> f64 {
    (4.0 / (3.0 * n as f64)).powf(0.2)
}

/// Normal-reference bandwidth `sd * (4 / 3n)^(1/5)` with the sample
/// standard deviation.
pub fn silverman_bandwidth(data: &SampleData) -> Result<f64> {
    let sd = data.std_dev();
    if !(sd > 0.0) {
        return Err(Error::DegenerateData("zero sample variance".into()));
    }
    Ok(sd * reference_factor(data.len()))
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Normal-reference bandwidth with the robust scale `MAD / 0.6745`; falls
/// back to the standard deviation when the MAD is zero.
pub fn mad_bandwidth(values: &[f64]) -> Result<f64> {
    if values.len() < 2 {
        return Err(Error::InsufficientData { needed: 2, got: values.len() });
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let med = median(&v);
    let mut dev: Vec<f64> = v.iter().map(|x| (x - med).abs()).collect();
    dev.sort_by(f64::total_cmp);
    let mut scale = median(&dev) / MAD_TO_SD;
    if !(scale > 0.0) {
        let n = v.len() as f64;
        let m = v.iter().sum::<f64>() / n;
        scale = (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    }
    if !(scale > 0.0) {
        return Err(Error::DegenerateData("zero spread".into()));
    }
    Ok(scale * reference_factor(v.len()))
}

fn check_bandwidth(h: f64) -> Result<f64> {
    if h.is_finite() && h > 0.0 {
        Ok(h)
    } else {
        Err(invalid(format!("bandwidth must be finite and > 0, got {h}")))
    }
}

/// Gaussian KDE on the data scale.
///
/// The support is `(min - 4h, max + 4h)`, intersected with `(0, inf)` when
/// every observation is positive; the estimate is renormalized over it.
/// The default bandwidth is [`silverman_bandwidth`].
pub fn kde(data: &SampleData, bandwidth: Option<f64>) -> Result<Density> {
    let h = match bandwidth {
        Some(h) => check_bandwidth(h)?,
        None => silverman_bandwidth(data)?,
    };
    if !(data.variance() > 0.0) {
        return Err(Error::DegenerateData("zero sample variance".into()));
    }
    let mut lo = data.min() - 4.0 * h;
    let hi = data.max() + 4.0 * h;
    if data.all_positive() {
        lo = lo.max(0.0);
    }
    let support = Support::new(lo, hi)?;
    let k = Kde::linear(data.values().to_vec(), h, support);
    Ok(Density::from_parts(Kind::Kde(Arc::new(k)), support, Monotonicity::Unknown))
}

/// Gaussian KDE for positive data, built on `ln x` and mapped back to
/// `(0, inf)`. `bandwidth` is on the log scale; by default it is
/// [`mad_bandwidth`] of the log data.
pub fn kde_positive(data: &SampleData, bandwidth: Option<f64>) -> Result<Density> {
    let logs = positive_logs(data)?;
    let h = match bandwidth {
        Some(h) => check_bandwidth(h)?,
        None => mad_bandwidth(&logs)?,
    };
    let k = Kde::log(logs, h);
    Ok(Density::from_parts(
        Kind::Kde(Arc::new(k)),
        Support::positive(),
        Monotonicity::Unknown,
    ))
}
