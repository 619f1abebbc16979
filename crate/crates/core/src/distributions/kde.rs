use rand::Rng;
use rand_distr::StandardNormal;

use super::{log_sum_exp, normal_cdf, Support};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_741_780_329_736_405_6;
const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_677_939_946_059_934_4;

/// Where the Gaussian kernels live.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KdeScale {
    /// Kernels on the data themselves, restricted to a support interval and
    /// renormalized over it.
    Linear,
    /// Kernels on `ln(x)`, mapped back with the `1/x` Jacobian. The estimate
    /// lives on `(0, inf)` and integrates to one without renormalization.
    Log,
}

/// Gaussian kernel density estimate.
#[derive(Debug, Clone)]
pub struct Kde {
    centers: Vec<f64>,
    bandwidth: f64,
    scale: KdeScale,
    support: Support,
    // log of n * h * sqrt(2 pi) * mass-in-support
    log_norm: f64,
    mass: f64,
    cdf_offset: f64,
}

impl Kde {
    /// Kernels at `centers`, restricted to `support`. Callers guarantee
    /// `centers` is non-empty and `bandwidth > 0`.
    pub(crate) fn linear(centers: Vec<f64>, bandwidth: f64, support: Support) -> Self {
        let n = centers.len() as f64;
        let below: f64 = centers.iter().map(|c| normal_cdf((support.lo - c) / bandwidth)).sum();
        let upto: f64 = centers.iter().map(|c| normal_cdf((support.hi - c) / bandwidth)).sum();
        let mass = (upto - below) / n;
        Kde {
            log_norm: (n * bandwidth).ln() + LN_SQRT_2PI + mass.ln(),
            centers,
            bandwidth,
            scale: KdeScale::Linear,
            support,
            mass,
            cdf_offset: below,
        }
    }

    /// Kernels at `ln(data)`, with `bandwidth` on the log scale.
    pub(crate) fn log(log_centers: Vec<f64>, bandwidth: f64) -> Self {
        let n = log_centers.len() as f64;
        Kde {
            log_norm: (n * bandwidth).ln() + LN_SQRT_2PI,
            centers: log_centers,
            bandwidth,
            scale: KdeScale::Log,
            support: Support::positive(),
            mass: 1.0,
            cdf_offset: 0.0,
        }
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn scale(&self) -> KdeScale {
        self.scale
    }

    pub fn support(&self) -> Support {
        self.support
    }

    /// Kernel centres (log-data for [`KdeScale::Log`]).
    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    fn coordinate(&self, x: f64) -> f64 {
        match self.scale {
            KdeScale::Linear => x,
            KdeScale::Log => x.ln(),
        }
    }

    pub(crate) fn pdf(&self, x: f64) -> f64 {
        let h = self.bandwidth;
        let y = self.coordinate(x);
        let s: f64 = self
            .centers
            .iter()
            .map(|c| {
                let z = (y - c) / h;
                (-0.5 * z * z).exp()
            })
            .sum();
        let n = self.centers.len() as f64;
        let base = s * INV_SQRT_2PI / (n * h * self.mass);
        match self.scale {
            KdeScale::Linear => base,
            KdeScale::Log => {
                if x > 0.0 {
                    base / x
                } else {
                    0.0
                }
            }
        }
    }

    pub(crate) fn log_pdf(&self, x: f64) -> f64 {
        let h = self.bandwidth;
        let y = self.coordinate(x);
        if !y.is_finite() {
            return f64::NEG_INFINITY;
        }
        let lse = log_sum_exp(self.centers.iter().map(|c| {
            let z = (y - c) / h;
            -0.5 * z * z
        }));
        match self.scale {
            KdeScale::Linear => lse - self.log_norm,
            KdeScale::Log => lse - self.log_norm - y,
        }
    }

    pub(crate) fn cdf(&self, x: f64) -> f64 {
        let h = self.bandwidth;
        let y = self.coordinate(x);
        let n = self.centers.len() as f64;
        let s: f64 = self.centers.iter().map(|c| normal_cdf((y - c) / h)).sum();
        ((s - self.cdf_offset) / (n * self.mass)).clamp(0.0, 1.0)
    }

    pub(crate) fn quantile(&self, u: f64) -> f64 {
        let h = self.bandwidth;
        let (cmin, cmax) = self
            .centers
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &c| (a.min(c), b.max(c)));
        let (mut lo, mut hi) = match self.scale {
            KdeScale::Linear => (self.support.lo.max(cmin - 40.0 * h), self.support.hi.min(cmax + 40.0 * h)),
            KdeScale::Log => (cmin - 40.0 * h, cmax + 40.0 * h),
        };
        let to_x = |y: f64| match self.scale {
            KdeScale::Linear => y,
            KdeScale::Log => y.exp(),
        };
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.cdf(to_x(mid)) < u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        to_x(0.5 * (lo + hi))
    }

    /// One draw from the kernel mixture; linear estimates reject draws that
    /// fall outside the support.
    pub(crate) fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        loop {
            let c = self.centers[rng.random_range(0..self.centers.len())];
            let z: f64 = rng.sample(StandardNormal);
            let y = c + self.bandwidth * z;
            match self.scale {
                KdeScale::Linear => {
                    if y > self.support.lo && y < self.support.hi {
                        return y;
                    }
                }
                KdeScale::Log => return y.exp(),
            }
        }
    }
}
