//! Adaptive Gauss-Kronrod integration.
//!
//! Every panel is integrated with the 7-point Gauss / 15-point Kronrod pair;
//! `|K15 - G7|` is the panel's error estimate. The panel with the largest
//! estimate is bisected until the summed estimate drops below the requested
//! absolute tolerance. Infinite limits are handled by a rational change of
//! variables, so no truncation of the range is needed.
//!
//! Vector-valued integrands are supported through [`integrate_many`]: all
//! components share one partition, which keeps moment pairs such as
//! `E[Z]`, `E[Z^2]` consistent with each other.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::distributions::Density;
use crate::error::{invalid, Error, Result};

/// Absolute tolerance used for every reproduction run.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Upper limit on the number of panels in one integration.
pub const MAX_SUBDIVISIONS: usize = 1 << 15;

/// Densities below this value contribute nothing to an expectation.
pub const DENSITY_FLOOR: f64 = 1e-300;

const INITIAL_PANELS: usize = 4;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for XGK[1], XGK[3], XGK[5] and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Outcome of an integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub subdivisions: usize,
}

/// Integration range with an optional location/scale hint used when a limit
/// is infinite. The hint only affects efficiency, never the target value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub lo: f64,
    pub hi: f64,
    pub center: f64,
    pub scale: f64,
}

impl Domain {
    pub fn new(lo: f64, hi: f64) -> Self {
        Domain {
            lo,
            hi,
            center: 0.0,
            scale: 1.0,
        }
    }

    pub fn with_hint(mut self, center: f64, scale: f64) -> Self {
        if center.is_finite() {
            self.center = center;
        }
        if scale.is_finite() && scale > 0.0 {
            self.scale = scale;
        }
        self
    }

    fn mapping(&self) -> Result<Mapping> {
        let (lo, hi) = (self.lo, self.hi);
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(invalid(format!("empty integration interval ({lo}, {hi})")));
        }
        Ok(match (lo.is_finite(), hi.is_finite()) {
            (true, true) => Mapping::Finite { lo, hi },
            (true, false) => {
                let scale = if self.center > lo && self.center.is_finite() {
                    self.center - lo
                } else {
                    self.scale
                };
                Mapping::Upper { lo, scale }
            }
            (false, true) => {
                let scale = if self.center < hi && self.center.is_finite() {
                    hi - self.center
                } else {
                    self.scale
                };
                Mapping::Lower { hi, scale }
            }
            (false, false) => Mapping::Both {
                center: self.center,
                scale: self.scale,
            },
        })
    }
}

#[derive(Debug, Clone, Copy)]
enum Mapping {
    Finite { lo: f64, hi: f64 },
    // x = lo + s t / (1 - t), t in (0, 1)
    Upper { lo: f64, scale: f64 },
    // x = hi - s (1 - t) / t, t in (0, 1)
    Lower { hi: f64, scale: f64 },
    // x = c + s t / (1 - t^2), t in (-1, 1)
    Both { center: f64, scale: f64 },
}

impl Mapping {
    fn range(&self) -> (f64, f64) {
        match *self {
            Mapping::Finite { lo, hi } => (lo, hi),
            Mapping::Upper { .. } | Mapping::Lower { .. } => (0.0, 1.0),
            Mapping::Both { .. } => (-1.0, 1.0),
        }
    }

    /// Returns `(x, dx/dt)`.
    #[inline]
    fn apply(&self, t: f64) -> (f64, f64) {
        match *self {
            Mapping::Finite { .. } => (t, 1.0),
            Mapping::Upper { lo, scale } => {
                let u = 1.0 - t;
                (lo + scale * t / u, scale / (u * u))
            }
            Mapping::Lower { hi, scale } => (hi - scale * (1.0 - t) / t, scale / (t * t)),
            Mapping::Both { center, scale } => {
                let u = 1.0 - t * t;
                (center + scale * t / u, scale * (1.0 + t * t) / (u * u))
            }
        }
    }
}

struct Panel<const N: usize> {
    a: f64,
    b: f64,
    value: [f64; N],
    error: [f64; N],
    key: f64,
}

impl<const N: usize> PartialEq for Panel<N> {
    fn eq(&self, other: &Self) -> bool {
        self.key.total_cmp(&other.key) == Ordering::Equal
    }
}

impl<const N: usize> Eq for Panel<N> {}

impl<const N: usize> PartialOrd for Panel<N> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<const N: usize> Ord for Panel<N> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key.total_cmp(&other.key)
    }
}

fn max_component<const N: usize>(e: &[f64; N]) -> f64 {
    e.iter().copied().fold(0.0, f64::max)
}

fn kronrod15<const N: usize, F>(h: &F, map: &Mapping, a: f64, b: f64) -> Result<Panel<N>>
where
    F: Fn(f64) -> [f64; N],
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |t: f64| -> Result<[f64; N]> {
        let (x, jac) = map.apply(t);
        let mut v = h(x);
        for c in v.iter_mut() {
            if *c != 0.0 {
                *c *= jac;
            }
            if !c.is_finite() {
                return Err(Error::NonFiniteIntegrand(x));
            }
        }
        Ok(v)
    };

    let fc = eval(center)?;
    let mut resk = [0.0; N];
    let mut resg = [0.0; N];
    for i in 0..N {
        resk[i] = fc[i] * WGK[7];
        resg[i] = fc[i] * WG[3];
    }
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = eval(center - dx)?;
        let f2 = eval(center + dx)?;
        for i in 0..N {
            let s = f1[i] + f2[i];
            resk[i] += WGK[j] * s;
            if j % 2 == 1 {
                resg[i] += WG[j / 2] * s;
            }
        }
    }
    let mut value = [0.0; N];
    let mut error = [0.0; N];
    for i in 0..N {
        value[i] = resk[i] * half;
        error[i] = ((resk[i] - resg[i]) * half).abs();
    }
    let key = max_component(&error);
    Ok(Panel {
        a,
        b,
        value,
        error,
        key,
    })
}

fn refinable(a: f64, b: f64) -> bool {
    let mid = 0.5 * (a + b);
    mid > a && mid < b && (b - a) > 8.0 * f64::EPSILON * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Integrates every component of `h` over one shared adaptive partition.
pub fn integrate_many<const N: usize, F>(h: F, domain: Domain, tol: f64) -> Result<[IntegralResult; N]>
where
    F: Fn(f64) -> [f64; N],
{
    if !(tol > 0.0) {
        return Err(invalid(format!("tolerance must be positive, got {tol}")));
    }
    let map = domain.mapping()?;
    let (ta, tb) = map.range();

    let mut heap = BinaryHeap::new();
    let mut settled: Vec<Panel<N>> = Vec::new();
    let mut total_err = [0.0; N];
    let width = (tb - ta) / INITIAL_PANELS as f64;
    for k in 0..INITIAL_PANELS {
        let a = ta + k as f64 * width;
        let b = if k + 1 == INITIAL_PANELS { tb } else { a + width };
        let p = kronrod15(&h, &map, a, b)?;
        for i in 0..N {
            total_err[i] += p.error[i];
        }
        heap.push(p);
    }

    let converged = |err: &[f64; N]| err.iter().all(|&e| e <= tol);
    let mut panels = INITIAL_PANELS;
    while !converged(&total_err) && panels < MAX_SUBDIVISIONS {
        let Some(worst) = heap.pop() else { break };
        if !refinable(worst.a, worst.b) {
            settled.push(worst);
            continue;
        }
        let mid = 0.5 * (worst.a + worst.b);
        let left = kronrod15(&h, &map, worst.a, mid)?;
        let right = kronrod15(&h, &map, mid, worst.b)?;
        for i in 0..N {
            total_err[i] += left.error[i] + right.error[i] - worst.error[i];
        }
        heap.push(left);
        heap.push(right);
        panels += 1;
    }

    let mut value = [0.0; N];
    let mut error = [0.0; N];
    for p in heap.iter().chain(settled.iter()) {
        for i in 0..N {
            value[i] += p.value[i];
            error[i] += p.error[i];
        }
    }
    let mut out = [IntegralResult {
        value: 0.0,
        abs_error_estimate: 0.0,
        subdivisions: panels,
    }; N];
    for i in 0..N {
        out[i].value = value[i];
        out[i].abs_error_estimate = error[i];
    }
    if let Some(i) = (0..N).find(|&i| error[i] > tol) {
        return Err(Error::NonConvergence {
            estimate: value[i],
            abs_error: error[i],
            subdivisions: panels,
        });
    }
    Ok(out)
}

/// Integrates `h` over `(lo, hi)`; either limit may be infinite.
pub fn integrate<F>(h: F, lo: f64, hi: f64, tol: f64) -> Result<IntegralResult>
where
    F: Fn(f64) -> f64,
{
    let [r] = integrate_many(|x| [h(x)], Domain::new(lo, hi), tol)?;
    Ok(r)
}

/// Integration domain of `f`'s support, with a location/scale hint taken
/// from its quartiles.
pub fn density_domain(f: &Density) -> Domain {
    let s = f.support();
    let mut d = Domain::new(s.lo, s.hi);
    if !s.is_bounded() {
        let q = |u: f64| f.quantile(u).ok().filter(|v| v.is_finite());
        if let (Some(q1), Some(med), Some(q3)) = (q(0.25), q(0.5), q(0.75)) {
            d = d.with_hint(med, q3 - q1);
        }
    }
    d
}

/// Componentwise `E_f[w(X)]`, all components on one partition. Points where
/// `f` falls below [`DENSITY_FLOOR`] contribute zero (the `0 log 0 = 0`
/// convention), so `w` is never evaluated there.
pub fn expectation_many<const N: usize, W>(f: &Density, w: W, tol: f64) -> Result<[IntegralResult; N]>
where
    W: Fn(f64) -> [f64; N],
{
    integrate_many(
        |x| {
            let p = f.pdf(x);
            if p > DENSITY_FLOOR {
                let mut v = w(x);
                for c in v.iter_mut() {
                    *c *= p;
                }
                v
            } else {
                [0.0; N]
            }
        },
        density_domain(f),
        tol,
    )
}

/// `E_f[w(X)]` by quadrature over the support of `f`.
pub fn expectation<W>(f: &Density, w: W, tol: f64) -> Result<IntegralResult>
where
    W: Fn(f64) -> f64,
{
    let [r] = expectation_many(f, |x| [w(x)], tol)?;
    Ok(r)
}
