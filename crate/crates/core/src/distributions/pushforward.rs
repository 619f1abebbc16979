use std::sync::Arc;

use rand::Rng;

use super::density::Kind;
use super::{Density, Monotonicity, Support};
use crate::error::{Error, Result};

type Map = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

const CHECK_POINTS: usize = 100;

/// Density of `phi(X)` for `X ~ base` and strictly monotone `phi`.
pub struct PushForward {
    base: Density,
    phi: Map,
    phi_inv: Map,
    phi_deriv: Map,
    increasing: bool,
    support: Support,
}

impl PushForward {
    pub(crate) fn pdf(&self, y: f64) -> f64 {
        if y < self.support.lo || y > self.support.hi {
            return 0.0;
        }
        let x = (self.phi_inv)(y);
        let p = self.base.pdf(x);
        if p == 0.0 {
            return 0.0;
        }
        p / (self.phi_deriv)(x).abs()
    }

    pub(crate) fn log_pdf(&self, y: f64) -> f64 {
        if y < self.support.lo || y > self.support.hi {
            return f64::NEG_INFINITY;
        }
        let x = (self.phi_inv)(y);
        self.base.log_pdf(x) - (self.phi_deriv)(x).abs().ln()
    }

    pub(crate) fn cdf(&self, y: f64) -> f64 {
        let x = (self.phi_inv)(y);
        if self.increasing {
            self.base.cdf(x)
        } else {
            self.base.sf(x)
        }
    }

    pub(crate) fn sf(&self, y: f64) -> f64 {
        let x = (self.phi_inv)(y);
        if self.increasing {
            self.base.sf(x)
        } else {
            self.base.cdf(x)
        }
    }

    pub(crate) fn quantile(&self, u: f64) -> Result<f64> {
        let v = if self.increasing { u } else { 1.0 - u };
        Ok((self.phi)(self.base.quantile(v)?))
    }

    pub(crate) fn draw<R: Rng>(&self, n: usize, rng: &mut R) -> Result<Vec<f64>> {
        Ok(self.base.draw(n, rng)?.into_iter().map(|x| (self.phi)(x)).collect())
    }
}

/// Builds the density of `phi(X)` for `X ~ d`:
/// `pdf(y) = f(phi_inv(y)) / |phi'(phi_inv(y))|`.
///
/// `phi_inv` and `phi_deriv` are spot-checked against `phi` on 100 quantiles
/// of `d`.
pub fn push_forward<P, Q, R>(d: &Density, phi: P, phi_inv: Q, phi_deriv: R) -> Result<Density>
where
    P: Fn(f64) -> f64 + Send + Sync + 'static,
    Q: Fn(f64) -> f64 + Send + Sync + 'static,
    R: Fn(f64) -> f64 + Send + Sync + 'static,
{
    let mut sign = 0.0f64;
    for i in 0..CHECK_POINTS {
        let x = d.quantile((i as f64 + 0.5) / CHECK_POINTS as f64)?;
        let y = phi(x);
        let back = phi_inv(y);
        if !((back - x).abs() <= 1e-8 * x.abs().max(1.0)) {
            return Err(Error::InconsistentMap(format!(
                "phi_inv(phi({x})) = {back}"
            )));
        }
        let deriv = phi_deriv(x);
        if !(deriv.is_finite() && deriv != 0.0) {
            return Err(Error::InconsistentMap(format!("phi'({x}) = {deriv}")));
        }
        if sign == 0.0 {
            sign = deriv.signum();
        } else if deriv.signum() != sign {
            return Err(Error::InconsistentMap("phi is not monotone".into()));
        }
        let step = 1e-6 * x.abs().max(1.0);
        let fd = (phi(x + step) - phi(x - step)) / (2.0 * step);
        if (fd - deriv).abs() > 1e-4 * deriv.abs().max(1.0) {
            return Err(Error::InconsistentMap(format!(
                "phi'({x}) = {deriv} but finite difference gives {fd}"
            )));
        }
    }
    let increasing = sign > 0.0;
    let base_support = d.support();
    let (a, b) = (phi(base_support.lo), phi(base_support.hi));
    let (lo, hi) = if increasing { (a, b) } else { (b, a) };
    let support = Support::new(lo, hi)
        .map_err(|_| Error::InconsistentMap(format!("image of the support is ({lo}, {hi})")))?;

    let pf = PushForward {
        base: d.clone(),
        phi: Arc::new(phi),
        phi_inv: Arc::new(phi_inv),
        phi_deriv: Arc::new(phi_deriv),
        increasing,
        support,
    };
    Ok(Density::from_parts(
        Kind::PushForward(Arc::new(pf)),
        support,
        Monotonicity::Unknown,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{expectation, integrate, DEFAULT_TOL};

    #[test]
    fn affine_image_of_uniform() {
        let u = Density::uniform(0.0, 1.0).unwrap();
        let d = push_forward(&u, |x| 2.0 * x + 3.0, |y| (y - 3.0) / 2.0, |_| 2.0).unwrap();
        assert_eq!(d.support(), Support { lo: 3.0, hi: 5.0 });
        for &y in &[3.1, 4.0, 4.9] {
            assert!((d.pdf(y) - 0.5).abs() < 1e-15);
        }
        assert_eq!(d.pdf(5.5), 0.0);
        assert!((d.cdf(4.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn identity_is_pointwise_equal() {
        let e = Density::exponential(1.0).unwrap();
        let d = push_forward(&e, |x| x, |y| y, |_| 1.0).unwrap();
        for i in 0..50 {
            let x = 0.1 * i as f64;
            assert_eq!(d.pdf(x), e.pdf(x));
        }
    }

    #[test]
    fn square_of_uniform() {
        let u = Density::uniform(0.0, 1.0).unwrap();
        let d = push_forward(&u, |x| x * x, f64::sqrt, |x| 2.0 * x).unwrap();
        for &y in &[0.01, 0.25, 0.81] {
            assert!((d.pdf(y) - 1.0 / (2.0 * f64::sqrt(y))).abs() < 1e-12);
        }
        let r = integrate(|y| d.pdf(y), 0.0, 1.0, 1e-10).unwrap();
        assert!((r.value - 1.0).abs() < 1e-8);
        let r = expectation(&d, |_| 1.0, DEFAULT_TOL).unwrap();
        assert!((r.value - 1.0).abs() < 1e-8);
    }

    #[test]
    fn decreasing_map() {
        let e = Density::exponential(1.0).unwrap();
        let d = push_forward(&e, |x| -x, |y| -y, |_| -1.0).unwrap();
        assert_eq!(d.support().hi, 0.0);
        assert!(d.support().lo.is_infinite());
        assert!((d.cdf(-1.0) - (-1.0f64).exp()).abs() < 1e-15);
        let r = expectation(&d, |y| y, DEFAULT_TOL).unwrap();
        assert!((r.value + 1.0).abs() < 1e-8);
    }

    #[test]
    fn inconsistent_inverse_is_rejected() {
        let e = Density::exponential(1.0).unwrap();
        let err = push_forward(&e, |x| 2.0 * x, |y| y, |_| 2.0).unwrap_err();
        assert!(matches!(err, Error::InconsistentMap(_)));
        let err = push_forward(&e, |x| 2.0 * x, |y| y / 2.0, |_| 3.0).unwrap_err();
        assert!(matches!(err, Error::InconsistentMap(_)));
    }

    #[test]
    fn cdf_matches_base_at_image_points() {
        let w = Density::weibull2(1.7, 0.3).unwrap();
        let d = push_forward(&w, |x| x.powi(3) + 1.0, |y| (y - 1.0).cbrt(), |x| 3.0 * x * x).unwrap();
        for i in 1..=50 {
            let x = w.quantile(i as f64 / 51.0).unwrap();
            assert!((d.cdf(x.powi(3) + 1.0) - w.cdf(x)).abs() < 1e-7);
        }
    }

    #[test]
    fn samples_through_the_map() {
        let u = Density::uniform(0.0, 1.0).unwrap();
        let d = push_forward(&u, |x| x * x, f64::sqrt, |x| 2.0 * x).unwrap();
        let s = d.sample(100_000, 3).unwrap();
        // E[U^2] = 1/3
        assert!((s.mean() - 1.0 / 3.0).abs() < 0.005);
    }
}
