//! Chebyshev-type lower bounds on varinaccuracy.
//!
//! Chebyshev's inequality applied to `-log g(X)` gives, for any `eps > 0`,
//!
//! ```text
//! VarI(f;g) >= eps^2 [ P(g(X) <= e^(-eps-I)) + P(g(X) >= e^(eps-I)) ]
//! ```
//!
//! When `g` is strictly monotone both events are half-lines in `x`, so the
//! probabilities reduce to `F` and `1 - F` evaluated at `g^-1` of the two
//! thresholds. A threshold outside the range of `g` makes its event sure or
//! impossible.

use serde::{Deserialize, Serialize};

use crate::distributions::{Density, Monotonicity};
use crate::error::{invalid, Error, Result};
use crate::measures;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    TwoTerm,
    OneTerm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundMethod {
    ClosedForm,
    Generic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub epsilon: f64,
    pub bound_value: f64,
    pub branch: Branch,
    pub method: BoundMethod,
}

fn check_eps(eps: f64) -> Result<()> {
    if eps.is_finite() && eps > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("epsilon must be finite and > 0, got {eps}")))
    }
}

/// `P(g(X) <= t)` and `P(g(X) >= t)` for monotone `g`, plus whether the
/// threshold fell strictly outside the pdf range.
struct Tail {
    prob: f64,
    short_circuit: bool,
}

fn prob_g_below(f: &Density, g: &Density, t: f64, range: (f64, f64)) -> Result<Tail> {
    let (inf, sup) = range;
    if t >= sup {
        return Ok(Tail { prob: 1.0, short_circuit: t > sup });
    }
    if t <= inf {
        return Ok(Tail { prob: 0.0, short_circuit: t < inf });
    }
    let x = g.inverse_pdf(t)?;
    let prob = match g.monotonicity() {
        Monotonicity::Decreasing => f.sf(x),
        _ => f.cdf(x),
    };
    Ok(Tail { prob, short_circuit: false })
}

fn prob_g_above(f: &Density, g: &Density, t: f64, range: (f64, f64)) -> Result<Tail> {
    let (inf, sup) = range;
    if t >= sup {
        return Ok(Tail { prob: 0.0, short_circuit: t > sup });
    }
    if t <= inf {
        return Ok(Tail { prob: 1.0, short_circuit: t < inf });
    }
    let x = g.inverse_pdf(t)?;
    let prob = match g.monotonicity() {
        Monotonicity::Decreasing => f.cdf(x),
        _ => f.sf(x),
    };
    Ok(Tail { prob, short_circuit: false })
}

/// Lower bound on `VarI(f;g)` for strictly monotone `g`.
pub fn chebyshev_bound(f: &Density, g: &Density, eps: f64) -> Result<BoundResult> {
    check_eps(eps)?;
    if !g.monotonicity().is_strict() {
        return Err(Error::NotInvertible);
    }
    let range = g.pdf_range().ok_or(Error::NotInvertible)?;
    let i = measures::inaccuracy(f, g)?.value;
    if !i.is_finite() {
        return Err(Error::Undefined("inaccuracy is infinite".into()));
    }
    let low = prob_g_below(f, g, (-eps - i).exp(), range)?;
    let high = prob_g_above(f, g, (eps - i).exp(), range)?;
    let branch = if low.short_circuit || high.short_circuit {
        Branch::OneTerm
    } else {
        Branch::TwoTerm
    };
    Ok(BoundResult {
        epsilon: eps,
        bound_value: eps * eps * (low.prob + high.prob),
        branch,
        method: BoundMethod::Generic,
    })
}

/// Closed-form bound for `X ~ Exp(lambda)`, `Y ~ Exp(eta)`.
pub fn exp_pair_bound(lambda: f64, eta: f64, eps: f64) -> Result<BoundResult> {
    check_eps(eps)?;
    if !(lambda.is_finite() && lambda > 0.0 && eta.is_finite() && eta > 0.0) {
        return Err(invalid(format!("rates must be > 0, got ({lambda}, {eta})")));
    }
    let ratio = eps * lambda / eta;
    let first = (-1.0 - ratio).exp();
    let (value, branch) = if eps * lambda <= eta {
        (first + 1.0 - (-1.0 + ratio).exp(), Branch::TwoTerm)
    } else {
        (first, Branch::OneTerm)
    };
    Ok(BoundResult {
        epsilon: eps,
        bound_value: eps * eps * value,
        branch,
        method: BoundMethod::ClosedForm,
    })
}

/// Closed-form bound for `X ~ U(0,1)`, `Y ~ Power(alpha)` with `alpha > 1`.
pub fn uniform_power_bound(alpha: f64, eps: f64) -> Result<BoundResult> {
    check_eps(eps)?;
    if !(alpha.is_finite() && alpha > 1.0) {
        return Err(invalid(format!(
            "power shape must exceed 1 for an increasing pdf, got {alpha}"
        )));
    }
    let d = alpha - 1.0;
    let first = ((1.0 - eps - alpha) / d).exp();
    let (value, branch) = if alpha >= 1.0 + eps {
        (first + 1.0 - ((1.0 + eps - alpha) / d).exp(), Branch::TwoTerm)
    } else {
        (first, Branch::OneTerm)
    };
    Ok(BoundResult {
        epsilon: eps,
        bound_value: eps * eps * value,
        branch,
        method: BoundMethod::ClosedForm,
    })
}
