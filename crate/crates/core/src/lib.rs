//! Dispersion indices for uncertainty measures.
//!
//! Alongside the usual information measures (differential entropy, Kerridge
//! inaccuracy, Kullback-Leibler divergence) this crate computes their
//! dispersion indices: varentropy `VarH`, varinaccuracy `VarI` and the
//! dispersion of the log-likelihood ratio `VarK`. Each index is the variance of
//! the random variable whose mean is the corresponding measure:
//!
//! | measure | mean | dispersion |
//! |---|---|---|
//! | entropy | `E_f[-log f(X)]` | `Var_f[-log f(X)]` |
//! | inaccuracy | `E_f[-log g(X)]` | `Var_f[-log g(X)]` |
//! | KL divergence | `E_f[log f(X)/g(X)]` | `Var_f[log f(X)/g(X)]` |
//!
//! The modules are layered bottom-up:
//!
//! - [`quadrature`]: adaptive Gauss-Kronrod integration on finite and infinite intervals.
//! - [`distributions`]: densities, finite pmfs, push-forwards and samplers.
//! - [`measures`]: the six measures above plus their discrete analogues,
//!   with closed forms where they exist and quadrature otherwise.
//! - [`bounds`]: Chebyshev-type lower bounds on varinaccuracy.
//! - [`estimation`]: maximum-likelihood fits and kernel density estimates.
//! - [`selection`]: the mean-variance rule for picking among candidate models.
//! - [`datasets`]: the small embedded data sets used by the worked examples.

#![forbid(unsafe_code)]

pub mod bounds;
pub mod datasets;
pub mod distributions;
pub mod error;
pub mod estimation;
pub mod measures;
pub mod quadrature;
pub mod selection;
mod serde_f64;

pub use distributions::{Density, Family, FinitePMF, Monotonicity, SampleData, Support};
pub use error::{Error, Result};
pub use measures::{MeasureValue, Method};
