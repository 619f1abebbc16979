//! Information measures and their dispersion indices.
//!
//! Every continuous measure is an expectation under `f` of a log-density
//! expression, and every dispersion index is the variance of that expression:
//!
//! - entropy `H = E_f[-log f]`, varentropy `VarH = Var_f[-log f]`
//! - inaccuracy `I = E_f[-log g]`, varinaccuracy `VarI = Var_f[-log g]`
//! - divergence `K = E_f[log f/g]`, `VarK = Var_f[log f/g]`
//!
//! They satisfy `K = I - H` and `VarK = VarH + VarI - 2 cov_f(log f, log g)`.
//!
//! Pairs with a known closed form (exponential/exponential, power/power,
//! uniform reference, identical densities) are answered exactly; everything
//! else goes through adaptive quadrature with both moments taken from one
//! partition. If `f` puts mass where `g` vanishes the result is `+inf`.

use serde::{Deserialize, Serialize};

use crate::distributions::density::Kind;
use crate::distributions::{Density, FinitePMF};
use crate::error::{Error, Result};
use crate::quadrature::{expectation_many, DEFAULT_TOL};

/// Variances in `[-VARIANCE_SLACK, 0)` are round-off and are reported as 0.
pub const VARIANCE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Quadrature,
    Summation,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::Quadrature => "quadrature",
            Method::Summation => "summation",
        }
    }
}

/// A computed measure with the route that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureValue {
    #[serde(with = "crate::serde_f64")]
    pub value: f64,
    pub method: Method,
    pub abs_error: f64,
}

impl MeasureValue {
    pub fn closed_form(value: f64) -> Self {
        MeasureValue {
            value,
            method: Method::ClosedForm,
            abs_error: 0.0,
        }
    }

    pub fn infinite() -> Self {
        Self::closed_form(f64::INFINITY)
    }

    pub fn is_infinite(&self) -> bool {
        self.value == f64::INFINITY
    }
}

fn clamp_variance(v: f64) -> f64 {
    if (-VARIANCE_SLACK..0.0).contains(&v) {
        0.0
    } else {
        v
    }
}

// Parametric shapes with closed forms. Uniform(0,1) is Power(1).
#[derive(Debug, Clone, Copy)]
enum Shape {
    Exp(f64),
    Pow(f64),
    Unif(f64, f64),
    Other,
}

fn shape(d: &Density) -> Shape {
    match d.kind {
        Kind::Exponential { rate } => Shape::Exp(rate),
        Kind::Power { alpha } => Shape::Pow(alpha),
        Kind::Uniform { lo, hi } if lo == 0.0 && hi == 1.0 => Shape::Pow(1.0),
        Kind::Uniform { lo, hi } => Shape::Unif(lo, hi),
        _ => Shape::Other,
    }
}

/// Closed-form `(H, VarH)`.
fn single_closed(f: &Density) -> Option<(f64, f64)> {
    match shape(f) {
        Shape::Exp(l) => Some((1.0 - l.ln(), 1.0)),
        Shape::Unif(a, b) => Some(((b - a).ln(), 0.0)),
        Shape::Pow(a) => {
            let c = (a - 1.0) / a;
            Some((c - a.ln(), c * c))
        }
        Shape::Other => None,
    }
}

#[derive(Debug, Default, Clone, Copy)]
struct PairForms {
    inaccuracy: Option<f64>,
    varinaccuracy: Option<f64>,
    kl: Option<f64>,
    var_kl: Option<f64>,
    cov: Option<f64>,
}

/// Closed forms for a pair whose supports are already known to nest.
fn pair_closed(f: &Density, g: &Density) -> PairForms {
    let single = single_closed(f);
    if f.same_as(g) {
        return PairForms {
            inaccuracy: single.map(|s| s.0),
            varinaccuracy: single.map(|s| s.1),
            kl: Some(0.0),
            var_kl: Some(0.0),
            cov: single.map(|s| s.1),
        };
    }
    match (shape(f), shape(g)) {
        (Shape::Exp(l), Shape::Exp(e)) => PairForms {
            inaccuracy: Some(e / l - e.ln()),
            varinaccuracy: Some((e / l).powi(2)),
            kl: Some((l / e).ln() + e / l - 1.0),
            var_kl: Some(((e - l) / l).powi(2)),
            cov: Some(e / l),
        },
        (Shape::Pow(a), Shape::Pow(b)) => PairForms {
            inaccuracy: Some((b - 1.0) / a - b.ln()),
            varinaccuracy: Some(((b - 1.0) / a).powi(2)),
            kl: Some((a / b).ln() + (b - a) / a),
            var_kl: Some(((a - b) / a).powi(2)),
            cov: Some((a - 1.0) * (b - 1.0) / (a * a)),
        },
        (_, Shape::Unif(c, d)) => {
            let i = (d - c).ln();
            PairForms {
                inaccuracy: Some(i),
                varinaccuracy: Some(0.0),
                kl: single.map(|s| i - s.0),
                var_kl: single.map(|s| s.1),
                cov: Some(0.0),
            }
        }
        _ => PairForms::default(),
    }
}

enum Coverage {
    Covered,
    Uncovered,
}

fn coverage(f: &Density, g: &Density) -> Result<Coverage> {
    let (sf, sg) = (f.support(), g.support());
    if !sf.intersects(&sg) {
        return Err(Error::DisjointSupport);
    }
    Ok(if sg.contains_interval(&sf) {
        Coverage::Covered
    } else {
        Coverage::Uncovered
    })
}

/// Configurable measure evaluator. The free functions in this module use
/// `Evaluator::default()` (tolerance 1e-9, closed forms enabled).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluator {
    pub tol: f64,
    pub closed_forms: bool,
}

impl Default for Evaluator {
    fn default() -> Self {
        Evaluator {
            tol: DEFAULT_TOL,
            closed_forms: true,
        }
    }
}

impl Evaluator {
    /// Forces the quadrature route even where a closed form exists.
    pub fn quadrature_only() -> Self {
        Evaluator {
            closed_forms: false,
            ..Self::default()
        }
    }

    fn mean(&self, f: &Density, z: impl Fn(f64) -> f64) -> Result<MeasureValue> {
        let [m] = expectation_many(f, |x| [z(x)], self.tol)?;
        Ok(MeasureValue {
            value: m.value,
            method: Method::Quadrature,
            abs_error: m.abs_error_estimate,
        })
    }

    fn variance(&self, f: &Density, z: impl Fn(f64) -> f64) -> Result<MeasureValue> {
        let [m1, m2] = expectation_many(
            f,
            |x| {
                let v = z(x);
                [v, v * v]
            },
            self.tol,
        )?;
        Ok(MeasureValue {
            value: clamp_variance(m2.value - m1.value * m1.value),
            method: Method::Quadrature,
            abs_error: m2.abs_error_estimate + 2.0 * m1.value.abs() * m1.abs_error_estimate,
        })
    }

    pub fn entropy(&self, f: &Density) -> Result<MeasureValue> {
        if self.closed_forms {
            if let Some((h, _)) = single_closed(f) {
                return Ok(MeasureValue::closed_form(h));
            }
        }
        self.mean(f, |x| -f.log_pdf(x))
    }

    pub fn varentropy(&self, f: &Density) -> Result<MeasureValue> {
        if self.closed_forms {
            if let Some((_, v)) = single_closed(f) {
                return Ok(MeasureValue::closed_form(v));
            }
        }
        self.variance(f, |x| -f.log_pdf(x))
    }

    fn pair(
        &self,
        f: &Density,
        g: &Density,
        pick: impl Fn(&PairForms) -> Option<f64>,
    ) -> Result<Option<MeasureValue>> {
        match coverage(f, g)? {
            Coverage::Uncovered => Ok(Some(MeasureValue::infinite())),
            Coverage::Covered if self.closed_forms => {
                Ok(pick(&pair_closed(f, g)).map(MeasureValue::closed_form))
            }
            Coverage::Covered => Ok(None),
        }
    }

    pub fn inaccuracy(&self, f: &Density, g: &Density) -> Result<MeasureValue> {
        if let Some(v) = self.pair(f, g, |p| p.inaccuracy)? {
            return Ok(v);
        }
        self.mean(f, |x| -g.log_pdf(x))
    }

    pub fn varinaccuracy(&self, f: &Density, g: &Density) -> Result<MeasureValue> {
        if let Some(v) = self.pair(f, g, |p| p.varinaccuracy)? {
            return Ok(v);
        }
        self.variance(f, |x| -g.log_pdf(x))
    }

    pub fn kl(&self, f: &Density, g: &Density) -> Result<MeasureValue> {
        if let Some(v) = self.pair(f, g, |p| p.kl)? {
            return Ok(v);
        }
        self.mean(f, |x| f.log_pdf(x) - g.log_pdf(x))
    }

    pub fn var_kl(&self, f: &Density, g: &Density) -> Result<MeasureValue> {
        if let Some(v) = self.pair(f, g, |p| p.var_kl)? {
            return Ok(v);
        }
        self.variance(f, |x| f.log_pdf(x) - g.log_pdf(x))
    }

    /// `cov_f(log f(X), log g(X))`; undefined when `f` is not absolutely
    /// continuous with respect to `g`.
    pub fn log_log_cov(&self, f: &Density, g: &Density) -> Result<MeasureValue> {
        match self.pair(f, g, |p| p.cov)? {
            Some(v) if v.is_infinite() => {
                return Err(Error::Undefined(
                    "log g(X) is -inf with positive probability under f".into(),
                ))
            }
            Some(v) => return Ok(v),
            None => {}
        }
        let [a, b, ab] = expectation_many(
            f,
            |x| {
                let lf = f.log_pdf(x);
                let lg = g.log_pdf(x);
                [lf, lg, lf * lg]
            },
            self.tol,
        )?;
        Ok(MeasureValue {
            value: ab.value - a.value * b.value,
            method: Method::Quadrature,
            abs_error: ab.abs_error_estimate
                + a.value.abs() * b.abs_error_estimate
                + b.value.abs() * a.abs_error_estimate,
        })
    }
}

pub fn entropy(f: &Density) -> Result<MeasureValue> {
    Evaluator::default().entropy(f)
}

pub fn varentropy(f: &Density) -> Result<MeasureValue> {
    Evaluator::default().varentropy(f)
}

pub fn inaccuracy(f: &Density, g: &Density) -> Result<MeasureValue> {
    Evaluator::default().inaccuracy(f, g)
}

pub fn varinaccuracy(f: &Density, g: &Density) -> Result<MeasureValue> {
    Evaluator::default().varinaccuracy(f, g)
}

pub fn kl(f: &Density, g: &Density) -> Result<MeasureValue> {
    Evaluator::default().kl(f, g)
}

pub fn var_kl(f: &Density, g: &Density) -> Result<MeasureValue> {
    Evaluator::default().var_kl(f, g)
}

pub fn log_log_cov(f: &Density, g: &Density) -> Result<MeasureValue> {
    Evaluator::default().log_log_cov(f, g)
}

// --- discrete -------------------------------------------------------------

fn same_support(p: &FinitePMF, q: &FinitePMF) -> Result<()> {
    if p.labels() == q.labels() {
        Ok(())
    } else {
        Err(Error::SupportMismatch)
    }
}

/// Mean and variance of `z` under `p`, skipping atoms with `p(x) = 0`.
/// `z` returning `+-inf` on a charged atom makes both results `+inf`.
fn summed_moments(p: &FinitePMF, z: impl Fn(usize) -> f64) -> (MeasureValue, MeasureValue) {
    let mut m1 = 0.0;
    let mut m2 = 0.0;
    let mut scale = 0.0;
    for (i, &w) in p.probs().iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let v = z(i);
        if !v.is_finite() {
            return (MeasureValue::infinite(), MeasureValue::infinite());
        }
        m1 += w * v;
        m2 += w * v * v;
        scale += w * v * v + w * v.abs();
    }
    let err = p.len() as f64 * f64::EPSILON * scale;
    let mean = MeasureValue {
        value: m1,
        method: Method::Summation,
        abs_error: err,
    };
    let var = MeasureValue {
        value: clamp_variance(m2 - m1 * m1),
        method: Method::Summation,
        abs_error: 2.0 * err,
    };
    (mean, var)
}

fn log_ratio<'a>(p: &'a FinitePMF, q: &'a FinitePMF) -> impl Fn(usize) -> f64 + 'a {
    move |i| {
        let (a, b) = (p.probs()[i], q.probs()[i]);
        if b == 0.0 {
            f64::INFINITY
        } else {
            (a / b).ln()
        }
    }
}

/// Discrete entropy `-sum P log P`.
pub fn entropy_pmf(p: &FinitePMF) -> MeasureValue {
    summed_moments(p, |i| -p.probs()[i].ln()).0
}

pub fn varentropy_pmf(p: &FinitePMF) -> MeasureValue {
    summed_moments(p, |i| -p.probs()[i].ln()).1
}

/// `-sum P log Q`; `+inf` if `Q` vanishes where `P` does not.
pub fn inaccuracy_pmf(p: &FinitePMF, q: &FinitePMF) -> Result<MeasureValue> {
    same_support(p, q)?;
    Ok(summed_moments(p, |i| -q.probs()[i].ln()).0)
}

pub fn varinaccuracy_pmf(p: &FinitePMF, q: &FinitePMF) -> Result<MeasureValue> {
    same_support(p, q)?;
    Ok(summed_moments(p, |i| -q.probs()[i].ln()).1)
}

/// `K(P:Q) = sum P log(P/Q)`.
pub fn kl_pmf(p: &FinitePMF, q: &FinitePMF) -> Result<MeasureValue> {
    same_support(p, q)?;
    Ok(summed_moments(p, log_ratio(p, q)).0)
}

/// `VarK(P:Q) = sum P log^2(P/Q) - K(P:Q)^2`.
pub fn var_kl_pmf(p: &FinitePMF, q: &FinitePMF) -> Result<MeasureValue> {
    same_support(p, q)?;
    Ok(summed_moments(p, log_ratio(p, q)).1)
}

/// Both `K(P:Q)` and `VarK(P:Q)` in one pass.
pub fn kl_moments_pmf(p: &FinitePMF, q: &FinitePMF) -> Result<(MeasureValue, MeasureValue)> {
    same_support(p, q)?;
    Ok(summed_moments(p, log_ratio(p, q)))
}

pub fn log_log_cov_pmf(p: &FinitePMF, q: &FinitePMF) -> Result<MeasureValue> {
    same_support(p, q)?;
    let (mut a, mut b, mut ab) = (0.0, 0.0, 0.0);
    for (&w, &v) in p.probs().iter().zip(q.probs()) {
        if w == 0.0 {
            continue;
        }
        if v == 0.0 {
            return Err(Error::Undefined("Q vanishes where P does not".into()));
        }
        let (lp, lq) = (w.ln(), v.ln());
        a += w * lp;
        b += w * lq;
        ab += w * lp * lq;
    }
    Ok(MeasureValue {
        value: ab - a * b,
        method: Method::Summation,
        abs_error: p.len() as f64 * f64::EPSILON * (ab.abs() + (a * b).abs()),
    })
}
