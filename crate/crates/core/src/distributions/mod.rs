//! Distribution families used by the measures: evaluable densities with
//! support and monotonicity metadata, finite pmfs, and sample containers.

pub(crate) mod density;
mod kde;
mod pmf;
mod pushforward;
mod sample;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use density::{make_distribution, Density};
pub use kde::{Kde, KdeScale};
pub use pmf::{make_pmf, FinitePMF, PmfFamily};
pub use pushforward::push_forward;
pub use sample::SampleData;

use crate::error::{invalid, Error};

/// Family tag of a [`Density`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Exponential,
    Power,
    Uniform,
    Weibull2,
    Lognormal,
    Kde,
    PushForward,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Exponential => "exponential",
            Family::Power => "power",
            Family::Uniform => "uniform",
            Family::Weibull2 => "weibull2",
            Family::Lognormal => "lognormal",
            Family::Kde => "kde",
            Family::PushForward => "pushforward",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Ok(match s {
            "exponential" | "exp" => Family::Exponential,
            "power" => Family::Power,
            "uniform" => Family::Uniform,
            "weibull2" | "w2" => Family::Weibull2,
            "lognormal" => Family::Lognormal,
            "kde" => Family::Kde,
            "pushforward" => Family::PushForward,
            other => return Err(invalid(format!("unknown family `{other}`"))),
        })
    }
}

/// Shape of the pdf over its support.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Monotonicity {
    Increasing,
    Decreasing,
    Neither,
    Unknown,
}

impl Monotonicity {
    pub fn is_strict(self) -> bool {
        matches!(self, Monotonicity::Increasing | Monotonicity::Decreasing)
    }
}

/// Open interval `(lo, hi)`; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Support {
    pub lo: f64,
    pub hi: f64,
}

impl Support {
    pub fn new(lo: f64, hi: f64) -> crate::Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(invalid(format!("support ({lo}, {hi}) is empty")));
        }
        Ok(Support { lo, hi })
    }

    pub fn positive() -> Self {
        Support {
            lo: 0.0,
            hi: f64::INFINITY,
        }
    }

    pub fn unit() -> Self {
        Support { lo: 0.0, hi: 1.0 }
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn contains_interval(&self, other: &Support) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersects(&self, other: &Support) -> bool {
        self.lo < other.hi && other.lo < self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

pub(crate) fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z * FRAC_1_SQRT_2)
}

pub(crate) fn normal_sf(z: f64) -> f64 {
    0.5 * libm::erfc(z * FRAC_1_SQRT_2)
}

pub(crate) fn normal_quantile(u: f64) -> f64 {
    -std::f64::consts::SQRT_2 * statrs::function::erf::erfc_inv(2.0 * u)
}

/// `ln(sum(exp(v)))` without overflow.
pub(crate) fn log_sum_exp(v: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = v.clone().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + v.map(|x| (x - m).exp()).sum::<f64>().ln()
}
