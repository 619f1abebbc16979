//! `family:p1,p2,...` distribution specs.

use std::fmt;
use std::str::FromStr;

use infodisp::distributions::PmfFamily;
use infodisp::selection::Model;
use infodisp::{Density, Family, FinitePMF};

/// Error with a 1-based column into the offending input.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecError {
    pub input: String,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "invalid distribution spec at column {}: {}", self.column, self.message)?;
        writeln!(f, "  {}", self.input)?;
        write!(f, "  {}^", " ".repeat(self.column.saturating_sub(1)))
    }
}

impl std::error::Error for SpecError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecFamily {
    Exponential,
    Power,
    Uniform,
    Weibull2,
    Lognormal,
    Binomial,
    BetaBinomial,
    DiscreteUniform,
}

impl SpecFamily {
    pub fn name(self) -> &'static str {
        match self {
            SpecFamily::Exponential => "exp",
            SpecFamily::Power => "power",
            SpecFamily::Uniform => "uniform",
            SpecFamily::Weibull2 => "w2",
            SpecFamily::Lognormal => "lognormal",
            SpecFamily::Binomial => "binomial",
            SpecFamily::BetaBinomial => "betabin",
            SpecFamily::DiscreteUniform => "dunif",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            SpecFamily::Exponential | SpecFamily::Power | SpecFamily::DiscreteUniform => 1,
            SpecFamily::Uniform | SpecFamily::Weibull2 | SpecFamily::Lognormal | SpecFamily::Binomial => 2,
            SpecFamily::BetaBinomial => 3,
        }
    }

    pub fn is_discrete(self) -> bool {
        matches!(
            self,
            SpecFamily::Binomial | SpecFamily::BetaBinomial | SpecFamily::DiscreteUniform
        )
    }

    fn lookup(name: &str) -> Option<Self> {
        Some(match name {
            "exp" | "exponential" => SpecFamily::Exponential,
            "power" => SpecFamily::Power,
            "uniform" | "unif" => SpecFamily::Uniform,
            "w2" | "weibull" | "weibull2" => SpecFamily::Weibull2,
            "lognormal" | "lnorm" => SpecFamily::Lognormal,
            "binomial" | "binom" => SpecFamily::Binomial,
            "betabin" | "betabinomial" => SpecFamily::BetaBinomial,
            "dunif" => SpecFamily::DiscreteUniform,
            _ => return None,
        })
    }

    fn usage(self) -> &'static str {
        match self {
            SpecFamily::Exponential => "exp:RATE",
            SpecFamily::Power => "power:ALPHA",
            SpecFamily::Uniform => "uniform:LO,HI",
            SpecFamily::Weibull2 => "w2:SHAPE,RATE",
            SpecFamily::Lognormal => "lognormal:MU,SIGMA",
            SpecFamily::Binomial => "binomial:N,P",
            SpecFamily::BetaBinomial => "betabin:N,ALPHA,BETA",
            SpecFamily::DiscreteUniform => "dunif:K",
        }
    }
}

impl fmt::Display for SpecFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parses a family name, with the error column at 1.
pub fn parse_family(s: &str) -> Result<SpecFamily, SpecError> {
    SpecFamily::lookup(s.trim()).ok_or_else(|| SpecError {
        input: s.to_string(),
        column: 1,
        message: format!(
            "unknown family '{}' (expected exp, power, uniform, w2, lognormal, binomial, betabin or dunif)",
            s.trim()
        ),
    })
}

/// A validated distribution spec.
#[derive(Debug, Clone, PartialEq)]
pub struct DistSpec {
    pub family: SpecFamily,
    pub params: Vec<f64>,
}

impl DistSpec {
    pub fn new(family: SpecFamily, params: Vec<f64>) -> Result<Self, String> {
        let spec = DistSpec { family, params };
        spec.model().map_err(|e| e.to_string())?;
        Ok(spec)
    }

    pub fn is_discrete(&self) -> bool {
        self.family.is_discrete()
    }

    fn count(&self, i: usize) -> Result<u64, infodisp::Error> {
        let v = self.params[i];
        if v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
            Ok(v as u64)
        } else {
            Err(infodisp::Error::InvalidParameter(format!(
                "{} needs a non-negative integer, got {v}",
                self.family.usage()
            )))
        }
    }

    pub fn model(&self) -> Result<Model, infodisp::Error> {
        let p = &self.params;
        Ok(match self.family {
            SpecFamily::Exponential => Model::Continuous(Density::exponential(p[0])?),
            SpecFamily::Power => Model::Continuous(Density::power(p[0])?),
            SpecFamily::Uniform => Model::Continuous(Density::uniform(p[0], p[1])?),
            SpecFamily::Weibull2 => Model::Continuous(Density::weibull2(p[0], p[1])?),
            SpecFamily::Lognormal => Model::Continuous(Density::lognormal(p[0], p[1])?),
            SpecFamily::Binomial => Model::Discrete(FinitePMF::binomial(self.count(0)?, p[1])?),
            SpecFamily::BetaBinomial => {
                Model::Discrete(FinitePMF::beta_binomial(self.count(0)?, p[1], p[2])?)
            }
            SpecFamily::DiscreteUniform => {
                Model::Discrete(FinitePMF::discrete_uniform(self.count(0)? as usize)?)
            }
        })
    }

    pub fn density(&self) -> Result<Density, infodisp::Error> {
        match self.model()? {
            Model::Continuous(d) => Ok(d),
            Model::Discrete(_) => Err(infodisp::Error::KindMismatch),
        }
    }

    pub fn pmf(&self) -> Result<FinitePMF, infodisp::Error> {
        match self.model()? {
            Model::Discrete(p) => Ok(p),
            Model::Continuous(_) => Err(infodisp::Error::KindMismatch),
        }
    }

    /// Spec for a fitted or library density, when its family has a spec form.
    pub fn from_density(d: &Density) -> Option<Self> {
        let family = match d.family() {
            Family::Exponential => SpecFamily::Exponential,
            Family::Power => SpecFamily::Power,
            Family::Uniform => SpecFamily::Uniform,
            Family::Weibull2 => SpecFamily::Weibull2,
            Family::Lognormal => SpecFamily::Lognormal,
            _ => return None,
        };
        Some(DistSpec { family, params: d.params() })
    }

    pub fn pmf_family(&self) -> Option<PmfFamily> {
        match self.family {
            SpecFamily::Binomial => Some(PmfFamily::Binomial),
            SpecFamily::BetaBinomial => Some(PmfFamily::BetaBinomial),
            SpecFamily::DiscreteUniform => Some(PmfFamily::DiscreteUniform),
            _ => None,
        }
    }
}

impl fmt::Display for DistSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.family)?;
        for (i, p) in self.params.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl FromStr for DistSpec {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, SpecError> {
        let fail = |column: usize, message: String| SpecError {
            input: s.to_string(),
            column,
            message,
        };
        let Some(colon) = s.find(':') else {
            return Err(match SpecFamily::lookup(s) {
                Some(fam) => fail(s.len() + 1, format!("missing parameters, expected {}", fam.usage())),
                None => fail(1, format!("expected family:params, got '{s}'")),
            });
        };
        let name = &s[..colon];
        let family = SpecFamily::lookup(name).ok_or_else(|| {
            fail(1, parse_family(name).unwrap_err().message)
        })?;

        let mut params = Vec::new();
        let mut start = colon + 1;
        for piece in s[colon + 1..].split(',') {
            let trimmed = piece.trim();
            let column = start + 1 + (piece.len() - piece.trim_start().len());
            if trimmed.is_empty() {
                return Err(fail(column, "empty parameter".into()));
            }
            let v: f64 = trimmed
                .parse()
                .map_err(|_| fail(column, format!("'{trimmed}' is not a number")))?;
            if !v.is_finite() {
                return Err(fail(column, format!("parameter must be finite, got {trimmed}")));
            }
            params.push(v);
            start += piece.len() + 1;
        }
        if params.len() != family.arity() {
            return Err(fail(
                colon + 2,
                format!("{} takes {} parameter(s), got {}", family.usage(), family.arity(), params.len()),
            ));
        }
        DistSpec::new(family, params).map_err(|m| fail(colon + 2, m))
    }
}

/// Candidate for `fit`: a bare family name asks for a maximum-likelihood fit.
#[derive(Debug, Clone, PartialEq)]
pub enum CandidateSpec {
    Fit(SpecFamily),
    Fixed(DistSpec),
}

impl FromStr for CandidateSpec {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, SpecError> {
        if s.contains(':') {
            s.parse().map(CandidateSpec::Fixed)
        } else {
            parse_family(s).map(CandidateSpec::Fit)
        }
    }
}

impl fmt::Display for CandidateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CandidateSpec::Fit(fam) => write!(f, "{fam}"),
            CandidateSpec::Fixed(spec) => write!(f, "{spec}"),
        }
    }
}
