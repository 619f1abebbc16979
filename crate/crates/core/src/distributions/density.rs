use std::fmt;
use std::sync::Arc;

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::kde::Kde;
use super::pushforward::PushForward;
use super::{normal_cdf, normal_quantile, normal_sf, Family, Monotonicity, SampleData, Support};
use crate::error::{invalid, Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_741_780_329_736_405_6;
const BISECTION_STEPS: usize = 200;

#[derive(Clone)]
pub(crate) enum Kind {
    Exponential { rate: f64 },
    Power { alpha: f64 },
    Uniform { lo: f64, hi: f64 },
    Weibull2 { shape: f64, rate: f64 },
    Lognormal { mu: f64, sigma: f64 },
    Kde(Arc<Kde>),
    PushForward(Arc<PushForward>),
}

/// A continuous probability density on an open interval.
///
/// Values are immutable once built; cloning is cheap (non-parametric
/// densities share their data through `Arc`).
#[derive(Clone)]
pub struct Density {
    pub(crate) kind: Kind,
    support: Support,
    monotonicity: Monotonicity,
}

impl fmt::Debug for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Density")
            .field("family", &self.family())
            .field("params", &self.params())
            .field("support", &self.support)
            .field("monotonicity", &self.monotonicity)
            .finish()
    }
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(invalid(format!("{name} must be finite and > 0, got {v}")))
    }
}

/// Builds a parametric density from a family tag and its parameter list.
///
/// | family | params |
/// |---|---|
/// | exponential | rate λ |
/// | power | α (support (0,1)) |
/// | uniform | lo, hi |
/// | weibull2 | shape α, rate λ (pdf `λ α x^(α-1) exp(-λ x^α)`) |
/// | lognormal | μ, σ |
pub fn make_distribution(family: Family, params: &[f64]) -> Result<Density> {
    let expect = |n: usize| {
        if params.len() == n {
            Ok(())
        } else {
            Err(invalid(format!(
                "{family} takes {n} parameter(s), got {}",
                params.len()
            )))
        }
    };
    match family {
        Family::Exponential => {
            expect(1)?;
            Density::exponential(params[0])
        }
        Family::Power => {
            expect(1)?;
            Density::power(params[0])
        }
        Family::Uniform => {
            expect(2)?;
            Density::uniform(params[0], params[1])
        }
        Family::Weibull2 => {
            expect(2)?;
            Density::weibull2(params[0], params[1])
        }
        Family::Lognormal => {
            expect(2)?;
            Density::lognormal(params[0], params[1])
        }
        Family::Kde | Family::PushForward => Err(invalid(format!(
            "{family} densities are built from data or maps, not parameters"
        ))),
    }
}

impl Density {
    pub(crate) fn from_parts(kind: Kind, support: Support, monotonicity: Monotonicity) -> Self {
        Density {
            kind,
            support,
            monotonicity,
        }
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        let rate = positive("exponential rate", rate)?;
        Ok(Self::from_parts(
            Kind::Exponential { rate },
            Support::positive(),
            Monotonicity::Decreasing,
        ))
    }

    /// Power(α) on (0,1); α = 1 is returned as uniform(0,1).
    pub fn power(alpha: f64) -> Result<Self> {
        let alpha = positive("power shape", alpha)?;
        if alpha == 1.0 {
            return Self::uniform(0.0, 1.0);
        }
        let monotonicity = if alpha > 1.0 {
            Monotonicity::Increasing
        } else {
            Monotonicity::Decreasing
        };
        Ok(Self::from_parts(Kind::Power { alpha }, Support::unit(), monotonicity))
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(invalid(format!("uniform requires finite lo < hi, got ({lo}, {hi})")));
        }
        Ok(Self::from_parts(
            Kind::Uniform { lo, hi },
            Support { lo, hi },
            Monotonicity::Neither,
        ))
    }

    /// Weibull in shape-rate form `λ α x^(α-1) exp(-λ x^α)`.
    pub fn weibull2(shape: f64, rate: f64) -> Result<Self> {
        let shape = positive("weibull shape", shape)?;
        let rate = positive("weibull rate", rate)?;
        let monotonicity = if shape <= 1.0 {
            Monotonicity::Decreasing
        } else {
            Monotonicity::Neither
        };
        Ok(Self::from_parts(
            Kind::Weibull2 { shape, rate },
            Support::positive(),
            monotonicity,
        ))
    }

    pub fn lognormal(mu: f64, sigma: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(invalid(format!("lognormal mu must be finite, got {mu}")));
        }
        let sigma = positive("lognormal sigma", sigma)?;
        Ok(Self::from_parts(
            Kind::Lognormal { mu, sigma },
            Support::positive(),
            Monotonicity::Neither,
        ))
    }

    pub fn family(&self) -> Family {
        match self.kind {
            Kind::Exponential { .. } => Family::Exponential,
            Kind::Power { .. } => Family::Power,
            Kind::Uniform { .. } => Family::Uniform,
            Kind::Weibull2 { .. } => Family::Weibull2,
            Kind::Lognormal { .. } => Family::Lognormal,
            Kind::Kde(_) => Family::Kde,
            Kind::PushForward(_) => Family::PushForward,
        }
    }

    /// Family parameters in construction order; KDEs report `[bandwidth]`.
    pub fn params(&self) -> Vec<f64> {
        match &self.kind {
            Kind::Exponential { rate } => vec![*rate],
            Kind::Power { alpha } => vec![*alpha],
            Kind::Uniform { lo, hi } => vec![*lo, *hi],
            Kind::Weibull2 { shape, rate } => vec![*shape, *rate],
            Kind::Lognormal { mu, sigma } => vec![*mu, *sigma],
            Kind::Kde(k) => vec![k.bandwidth()],
            Kind::PushForward(_) => Vec::new(),
        }
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn monotonicity(&self) -> Monotonicity {
        self.monotonicity
    }

    /// True when both values describe the same density: equal parameters for
    /// parametric families, shared data for KDEs and push-forwards.
    pub fn same_as(&self, other: &Density) -> bool {
        match (&self.kind, &other.kind) {
            (Kind::Exponential { rate: a }, Kind::Exponential { rate: b }) => a == b,
            (Kind::Power { alpha: a }, Kind::Power { alpha: b }) => a == b,
            (Kind::Uniform { lo: a, hi: b }, Kind::Uniform { lo: c, hi: d }) => a == c && b == d,
            (Kind::Weibull2 { shape: a, rate: b }, Kind::Weibull2 { shape: c, rate: d }) => {
                a == c && b == d
            }
            (Kind::Lognormal { mu: a, sigma: b }, Kind::Lognormal { mu: c, sigma: d }) => {
                a == c && b == d
            }
            (Kind::Kde(a), Kind::Kde(b)) => Arc::ptr_eq(a, b),
            (Kind::PushForward(a), Kind::PushForward(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }

    fn outside(&self, x: f64) -> bool {
        x.is_nan() || x < self.support.lo || x > self.support.hi
    }

    /// Density at `x`; zero outside the support. At a finite support endpoint
    /// the formula's limit is returned.
    pub fn pdf(&self, x: f64) -> f64 {
        if self.outside(x) {
            return 0.0;
        }
        match &self.kind {
            Kind::Exponential { rate } => rate * (-rate * x).exp(),
            Kind::Power { alpha } => alpha * x.powf(alpha - 1.0),
            Kind::Uniform { lo, hi } => 1.0 / (hi - lo),
            Kind::Weibull2 { shape, rate } => {
                if x == 0.0 {
                    return self.log_pdf(x).exp();
                }
                rate * shape * x.powf(shape - 1.0) * (-rate * x.powf(*shape)).exp()
            }
            Kind::Lognormal { .. } => self.log_pdf(x).exp(),
            Kind::Kde(k) => k.pdf(x),
            Kind::PushForward(p) => p.pdf(x),
        }
    }

    /// Natural log of the density, evaluated analytically so it stays finite
    /// where `pdf` underflows.
    pub fn log_pdf(&self, x: f64) -> f64 {
        if self.outside(x) {
            return f64::NEG_INFINITY;
        }
        match &self.kind {
            Kind::Exponential { rate } => rate.ln() - rate * x,
            Kind::Power { alpha } => alpha.ln() + (alpha - 1.0) * x.ln(),
            Kind::Uniform { lo, hi } => -(hi - lo).ln(),
            Kind::Weibull2 { shape, rate } => {
                let lx = x.ln();
                let tail = if x == 0.0 { 0.0 } else { rate * (shape * lx).exp() };
                let power_term = if *shape == 1.0 { 0.0 } else { (shape - 1.0) * lx };
                rate.ln() + shape.ln() + power_term - tail
            }
            Kind::Lognormal { mu, sigma } => {
                if x == 0.0 {
                    return f64::NEG_INFINITY;
                }
                let lx = x.ln();
                let z = (lx - mu) / sigma;
                -lx - sigma.ln() - LN_SQRT_2PI - 0.5 * z * z
            }
            Kind::Kde(k) => k.log_pdf(x),
            Kind::PushForward(p) => p.log_pdf(x),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        if x <= self.support.lo {
            return 0.0;
        }
        if x >= self.support.hi {
            return 1.0;
        }
        match &self.kind {
            Kind::Exponential { rate } => -(-rate * x).exp_m1(),
            Kind::Power { alpha } => x.powf(*alpha),
            Kind::Uniform { lo, hi } => (x - lo) / (hi - lo),
            Kind::Weibull2 { shape, rate } => -(-rate * x.powf(*shape)).exp_m1(),
            Kind::Lognormal { mu, sigma } => normal_cdf((x.ln() - mu) / sigma),
            Kind::Kde(k) => k.cdf(x),
            Kind::PushForward(p) => p.cdf(x),
        }
    }

    /// Survival function `1 - F(x)`, computed without cancellation where the
    /// family allows.
    pub fn sf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        if x <= self.support.lo {
            return 1.0;
        }
        if x >= self.support.hi {
            return 0.0;
        }
        match &self.kind {
            Kind::Exponential { rate } => (-rate * x).exp(),
            Kind::Weibull2 { shape, rate } => (-rate * x.powf(*shape)).exp(),
            Kind::Lognormal { mu, sigma } => normal_sf((x.ln() - mu) / sigma),
            Kind::PushForward(p) => p.sf(x),
            _ => 1.0 - self.cdf(x),
        }
    }

    /// Inverse CDF for `u` in `[0, 1]`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) {
            return Err(invalid(format!("quantile level must lie in [0, 1], got {u}")));
        }
        if u == 0.0 {
            return Ok(self.support.lo);
        }
        if u == 1.0 {
            return Ok(self.support.hi);
        }
        Ok(match &self.kind {
            Kind::Exponential { rate } => -(-u).ln_1p() / rate,
            Kind::Power { alpha } => u.powf(1.0 / alpha),
            Kind::Uniform { lo, hi } => lo + u * (hi - lo),
            Kind::Weibull2 { shape, rate } => (-(-u).ln_1p() / rate).powf(1.0 / shape),
            Kind::Lognormal { mu, sigma } => (mu + sigma * normal_quantile(u)).exp(),
            Kind::Kde(k) => k.quantile(u),
            Kind::PushForward(p) => p.quantile(u)?,
        })
    }

    /// Infimum and supremum of the pdf over the support, for strictly
    /// monotone densities.
    pub fn pdf_range(&self) -> Option<(f64, f64)> {
        if !self.monotonicity.is_strict() {
            return None;
        }
        Some(match &self.kind {
            Kind::Exponential { rate } => (0.0, *rate),
            Kind::Power { alpha } if *alpha > 1.0 => (0.0, *alpha),
            Kind::Power { alpha } => (*alpha, f64::INFINITY),
            Kind::Weibull2 { shape, rate } if *shape == 1.0 => (0.0, *rate),
            Kind::Weibull2 { .. } => (0.0, f64::INFINITY),
            _ => {
                let a = self.pdf(self.support.lo);
                let b = self.pdf(self.support.hi);
                (a.min(b), a.max(b))
            }
        })
    }

    /// Point `x` in the support with `pdf(x) = z`.
    ///
    /// Exponential and power densities use closed forms; other strictly
    /// monotone densities are inverted by bisection on the log-pdf.
    pub fn inverse_pdf(&self, z: f64) -> Result<f64> {
        let (lo, hi) = self.pdf_range().ok_or(Error::NotInvertible)?;
        if !(z.is_finite() && z > lo && z <= hi) {
            return Err(Error::OutOfRange { value: z, lo, hi });
        }
        match &self.kind {
            Kind::Exponential { rate } => Ok((-(z / rate).ln() / rate).max(0.0)),
            Kind::Power { alpha } => Ok((z / alpha).powf(1.0 / (alpha - 1.0)).clamp(0.0, 1.0)),
            _ => self.inverse_pdf_by_bisection(z),
        }
    }

    pub(crate) fn inverse_pdf_by_bisection(&self, z: f64) -> Result<f64> {
        let target = z.ln();
        let decreasing = match self.monotonicity {
            Monotonicity::Decreasing => true,
            Monotonicity::Increasing => false,
            _ => return Err(Error::NotInvertible),
        };
        // g(x) > 0 on the "left" side of the root.
        let excess = |x: f64| {
            let d = self.log_pdf(x) - target;
            if decreasing {
                d
            } else {
                -d
            }
        };
        let Support { mut lo, mut hi } = self.support;
        if !lo.is_finite() {
            let mut step = 1.0f64;
            lo = hi.min(0.0) - step;
            while excess(lo) < 0.0 {
                step *= 2.0;
                lo = hi.min(0.0) - step;
                if !lo.is_finite() {
                    return Err(Error::OutOfRange { value: z, lo: 0.0, hi: f64::INFINITY });
                }
            }
        }
        if !hi.is_finite() {
            let mut step = 1.0f64;
            hi = lo.max(0.0) + step;
            while excess(hi) > 0.0 {
                step *= 2.0;
                hi = lo.max(0.0) + step;
                if !hi.is_finite() {
                    return Err(Error::OutOfRange { value: z, lo: 0.0, hi: f64::INFINITY });
                }
            }
        }
        // roots of densities with a pole or zero at 0 can sit far below 1e-100
        if lo == 0.0 {
            let mut t = hi;
            while t > 1e-300 {
                t *= 1e-3;
                if excess(t) > 0.0 {
                    lo = t;
                    break;
                }
                hi = t;
            }
        }
        for _ in 0..BISECTION_STEPS {
            let mid = if lo > 0.0 && hi > 2.0 * lo {
                lo.sqrt() * hi.sqrt()
            } else {
                0.5 * (lo + hi)
            };
            if mid <= lo || mid >= hi {
                break;
            }
            if excess(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Draws `n` values from the density with a seeded ChaCha generator.
    pub fn sample(&self, n: usize, seed: u64) -> Result<SampleData> {
        SampleData::new(self.sample_vec(n, seed)?)
    }

    /// Same draws as [`Density::sample`], without the summary statistics.
    pub fn sample_vec(&self, n: usize, seed: u64) -> Result<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.draw(n, &mut rng)
    }

    pub(crate) fn draw<R: Rng>(&self, n: usize, rng: &mut R) -> Result<Vec<f64>> {
        match &self.kind {
            Kind::Kde(k) => Ok((0..n).map(|_| k.draw(rng)).collect()),
            Kind::PushForward(p) => p.draw(n, rng),
            _ => (0..n)
                .map(|_| {
                    let u: f64 = rng.sample(Open01);
                    self.quantile(u)
                })
                .collect(),
        }
    }
}
