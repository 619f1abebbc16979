use crate::error::{Error, Result};

/// An ordered list of real observations with cached summary statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleData {
    values: Vec<f64>,
    mean: f64,
    variance: f64,
    log_mean: Option<f64>,
}

impl SampleData {
    /// Needs at least two finite observations. `variance` uses the `n - 1`
    /// divisor; `log_mean` is cached when every value is positive.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InsufficientData {
                needed: 2,
                got: values.len(),
            });
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("observation {v} is not finite")));
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let variance = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let log_mean = values
            .iter()
            .all(|&x| x > 0.0)
            .then(|| values.iter().map(|x| x.ln()).sum::<f64>() / n);
        Ok(SampleData {
            values,
            mean,
            variance,
            log_mean,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn std_dev(&self) -> f64 {
        self.variance.sqrt()
    }

    pub fn log_mean(&self) -> Option<f64> {
        self.log_mean
    }

    pub fn all_positive(&self) -> bool {
        self.log_mean.is_some()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}
