use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_binomial;

use crate::error::{invalid, Error, Result};

/// Family tag of a [`FinitePMF`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PmfFamily {
    Binomial,
    BetaBinomial,
    DiscreteUniform,
    Empirical,
}

/// Probability mass function on a finite ordered support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinitePMF {
    labels: Vec<i64>,
    probs: Vec<f64>,
}

/// Builds a pmf from a family tag:
/// `binomial [n, p]`, `beta_binomial [n, alpha, beta]`,
/// `discrete_uniform [k]`, `empirical [count_0, count_1, ...]`.
pub fn make_pmf(family: PmfFamily, params: &[f64]) -> Result<FinitePMF> {
    let want = |n: usize| {
        if params.len() == n {
            Ok(())
        } else {
            Err(invalid(format!("{family:?} takes {n} parameter(s), got {}", params.len())))
        }
    };
    let count = |v: f64, what: &str| -> Result<u64> {
        if v.is_finite() && v >= 0.0 && v.fract() == 0.0 {
            Ok(v as u64)
        } else {
            Err(invalid(format!("{what} must be a non-negative integer, got {v}")))
        }
    };
    match family {
        PmfFamily::Binomial => {
            want(2)?;
            FinitePMF::binomial(count(params[0], "n")?, params[1])
        }
        PmfFamily::BetaBinomial => {
            want(3)?;
            FinitePMF::beta_binomial(count(params[0], "n")?, params[1], params[2])
        }
        PmfFamily::DiscreteUniform => {
            want(1)?;
            FinitePMF::discrete_uniform(count(params[0], "k")? as usize)
        }
        PmfFamily::Empirical => {
            let counts = params
                .iter()
                .map(|&c| count(c, "count"))
                .collect::<Result<Vec<_>>>()?;
            FinitePMF::empirical(&counts)
        }
    }
}

impl FinitePMF {
    /// Validates and builds a pmf; probabilities must be non-negative and sum
    /// to one within 1e-12.
    pub fn new(labels: Vec<i64>, probs: Vec<f64>) -> Result<Self> {
        if labels.len() != probs.len() {
            return Err(invalid(format!(
                "{} labels but {} probabilities",
                labels.len(),
                probs.len()
            )));
        }
        if probs.is_empty() {
            return Err(invalid("empty support"));
        }
        if labels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("support labels must be strictly increasing"));
        }
        if let Some(p) = probs.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(invalid(format!("probability {p} is not in [0, 1]")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(invalid(format!("probabilities sum to {total}, not 1")));
        }
        Ok(FinitePMF { labels, probs })
    }

    fn normalized(labels: Vec<i64>, mut weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        Self::new(labels, weights)
    }

    pub fn binomial(n: u64, p: f64) -> Result<Self> {
        if n < 1 {
            return Err(invalid("binomial n must be at least 1"));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(invalid(format!("binomial p must lie in (0, 1), got {p}")));
        }
        let weights = (0..=n)
            .map(|k| (ln_binomial(n, k) + k as f64 * p.ln() + (n - k) as f64 * (-p).ln_1p()).exp())
            .collect();
        Self::normalized((0..=n as i64).collect(), weights)
    }

    pub fn beta_binomial(n: u64, alpha: f64, beta: f64) -> Result<Self> {
        if n < 1 {
            return Err(invalid("beta-binomial n must be at least 1"));
        }
        if !(alpha > 0.0 && alpha.is_finite() && beta > 0.0 && beta.is_finite()) {
            return Err(invalid(format!(
                "beta-binomial shapes must be > 0, got ({alpha}, {beta})"
            )));
        }
        // log P(k+1)/P(k) = log[(n-k)(k+alpha)] - log[(k+1)(n-k-1+beta)]
        let mut logw = Vec::with_capacity(n as usize + 1);
        let mut acc = 0.0;
        logw.push(acc);
        for k in 0..n {
            let (k, m) = (k as f64, n as f64);
            acc += ((m - k) * (k + alpha)).ln() - ((k + 1.0) * (m - k - 1.0 + beta)).ln();
            logw.push(acc);
        }
        let top = logw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let weights = logw.iter().map(|l| (l - top).exp()).collect();
        Self::normalized((0..=n as i64).collect(), weights)
    }

    /// Uniform on `0..k`.
    pub fn discrete_uniform(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(invalid(format!("discrete uniform needs k >= 2, got {k}")));
        }
        Self::normalized((0..k as i64).collect(), vec![1.0; k])
    }

    /// Relative frequencies of `counts`, labelled `0..counts.len()`.
    pub fn empirical(counts: &[u64]) -> Result<Self> {
        let total: u64 = counts.iter().sum();
        if counts.is_empty() || total == 0 {
            return Err(Error::EmptyCounts);
        }
        let probs = counts.iter().map(|&c| c as f64 / total as f64).collect();
        Self::normalized((0..counts.len() as i64).collect(), probs)
    }

    pub fn labels(&self) -> &[i64] {
        &self.labels
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn prob(&self, label: i64) -> f64 {
        self.labels
            .binary_search(&label)
            .map(|i| self.probs[i])
            .unwrap_or(0.0)
    }
}
