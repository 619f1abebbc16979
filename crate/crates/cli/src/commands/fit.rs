use std::io::Write;

use clap::{Args, ValueEnum};
use infodisp::datasets::Dataset;
use infodisp::estimation::{
    fit_binomial_p, fit_exponential_mle, fit_lognormal_mle, fit_weibull_mle, kde, kde_positive, FitResult,
};
use infodisp::selection::{rank, Disqualified, Model, SelectionReport};
use infodisp::{FinitePMF, SampleData};
use serde::{Deserialize, Serialize};

use crate::data;
use crate::spec::{CandidateSpec, DistSpec, SpecFamily};
use crate::{fmt_sig, table, CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KdeKind {
    /// Gaussian kernels on ln(x) with a MAD bandwidth; needs positive data.
    Positive,
    /// Gaussian kernels on x with the normal-reference bandwidth, clipped at 0 for positive data.
    Linear,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Embedded data set (coin3, murthy41) or a text file of numbers.
    #[arg(long)]
    pub data: String,
    /// Candidates: a bare family (w2, lognormal, exp, binomial, dunif) is fitted;
    /// family:params is used as given.
    #[arg(long, num_args = 1.., required = true)]
    pub candidates: Vec<CandidateSpec>,
    /// Treat the data as outcome counts c_0, c_1, ... and compare pmfs.
    #[arg(long)]
    pub discrete: bool,
    /// KDE bandwidth (log scale for --kde positive).
    #[arg(long)]
    pub bandwidth: Option<f64>,
    /// Reference density estimate for continuous data.
    #[arg(long, value_enum, default_value_t = KdeKind::Positive)]
    pub kde: KdeKind,
    /// Emit JSON instead of text
    #[arg(long)]
    pub json: bool,
    /// Significant digits in the table and in fitted labels.
    #[arg(long, default_value_t = 6)]
    pub precision: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedCandidate {
    pub requested: String,
    pub label: String,
    /// Full-precision spec of the model used.
    pub spec: String,
    pub log_likelihood: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub data: String,
    pub n: usize,
    pub reference: String,
    pub candidates: Vec<FittedCandidate>,
    pub selection: SelectionReport,
}

fn short_label(spec: &DistSpec, digits: usize) -> String {
    let p: Vec<String> = spec.params.iter().map(|&x| fmt_sig(x, digits)).collect();
    format!("{}:{}", spec.family, p.join(","))
}

struct Prepared {
    models: Vec<(String, Model)>,
    fitted: Vec<FittedCandidate>,
    failures: Vec<Disqualified>,
}

fn push_fit(p: &mut Prepared, requested: &str, fit: FitResult, spec: DistSpec, digits: usize) -> CliResult<()> {
    let label = short_label(&spec, digits);
    p.models.push((label.clone(), spec.model()?));
    p.fitted.push(FittedCandidate {
        requested: requested.to_string(),
        label,
        spec: spec.to_string(),
        log_likelihood: Some(fit.log_likelihood),
    });
    Ok(())
}

fn push_fixed(p: &mut Prepared, spec: &DistSpec) -> CliResult<()> {
    let label = spec.to_string();
    p.models.push((label.clone(), spec.model()?));
    p.fitted.push(FittedCandidate {
        requested: label.clone(),
        label,
        spec: spec.to_string(),
        log_likelihood: None,
    });
    Ok(())
}

fn continuous(a: &FitArgs, sample: &SampleData) -> CliResult<(Model, String, Prepared)> {
    let f = match a.kde {
        KdeKind::Positive => kde_positive(sample, a.bandwidth)?,
        KdeKind::Linear => kde(sample, a.bandwidth)?,
    };
    let h = f.params()[0];
    let reference = match a.kde {
        KdeKind::Positive => format!("Gaussian KDE on ln(x), bandwidth {}", fmt_sig(h, a.precision)),
        KdeKind::Linear => format!("Gaussian KDE, bandwidth {}", fmt_sig(h, a.precision)),
    };
    let mut p = Prepared { models: vec![], fitted: vec![], failures: vec![] };
    for c in &a.candidates {
        match c {
            CandidateSpec::Fixed(spec) if spec.is_discrete() => {
                return Err(CliError::usage(format!("{spec} is discrete; pass --discrete for count data")))
            }
            CandidateSpec::Fixed(spec) => push_fixed(&mut p, spec)?,
            CandidateSpec::Fit(fam) => {
                let fit = match fam {
                    SpecFamily::Weibull2 => fit_weibull_mle(sample),
                    SpecFamily::Lognormal => fit_lognormal_mle(sample),
                    SpecFamily::Exponential => fit_exponential_mle(sample),
                    other if other.is_discrete() => {
                        return Err(CliError::usage(format!("{other} is discrete; pass --discrete for count data")))
                    }
                    other => {
                        p.failures.push(Disqualified {
                            label: other.to_string(),
                            reason: format!("no maximum-likelihood fit for {other}; give parameters"),
                        });
                        continue;
                    }
                };
                match fit.and_then(|r| r.to_density().map(|d| (r, d))) {
                    Ok((r, d)) => {
                        let spec = DistSpec::from_density(&d).expect("fitted families have specs");
                        push_fit(&mut p, fam.name(), r, spec, a.precision)?;
                    }
                    Err(e) => p.failures.push(Disqualified { label: fam.to_string(), reason: format!("fit failed: {e}") }),
                }
            }
        }
    }
    Ok((Model::Continuous(f), reference, p))
}

fn discrete(a: &FitArgs, counts: &[u64]) -> CliResult<(Model, String, Prepared)> {
    let f = FinitePMF::empirical(counts)?;
    let k = counts.len();
    let reference = format!("empirical pmf on 0..={}", k - 1);
    let mut p = Prepared { models: vec![], fitted: vec![], failures: vec![] };
    for c in &a.candidates {
        match c {
            CandidateSpec::Fixed(spec) if !spec.is_discrete() => {
                return Err(CliError::usage(format!("{spec} is continuous; drop --discrete for sample data")))
            }
            CandidateSpec::Fixed(spec) => push_fixed(&mut p, spec)?,
            CandidateSpec::Fit(SpecFamily::Binomial) => {
                let n = (k - 1) as u64;
                match fit_binomial_p(counts, n) {
                    Ok(r) => {
                        let spec = DistSpec::new(SpecFamily::Binomial, r.params.clone()).map_err(CliError::compute)?;
                        p.models.push(("binomial".into(), spec.model()?));
                        p.fitted.push(FittedCandidate {
                            requested: "binomial".into(),
                            label: "binomial".into(),
                            spec: spec.to_string(),
                            log_likelihood: Some(r.log_likelihood),
                        });
                    }
                    Err(e) => p.failures.push(Disqualified { label: "binomial".into(), reason: format!("fit failed: {e}") }),
                }
            }
            CandidateSpec::Fit(SpecFamily::DiscreteUniform) => {
                let spec = DistSpec::new(SpecFamily::DiscreteUniform, vec![k as f64]).map_err(CliError::compute)?;
                p.models.push(("dunif".into(), spec.model()?));
                p.fitted.push(FittedCandidate {
                    requested: "dunif".into(),
                    label: "dunif".into(),
                    spec: spec.to_string(),
                    log_likelihood: None,
                });
            }
            CandidateSpec::Fit(other) if !other.is_discrete() => {
                return Err(CliError::usage(format!("{other} is continuous; drop --discrete for sample data")))
            }
            CandidateSpec::Fit(other) => p.failures.push(Disqualified {
                label: other.to_string(),
                reason: format!("no maximum-likelihood fit for {other}; give parameters"),
            }),
        }
    }
    Ok((Model::Discrete(f), reference, p))
}

pub fn compute(a: &FitArgs) -> CliResult<FitReport> {
    if let Some(h) = a.bandwidth {
        if !(h.is_finite() && h > 0.0) {
            return Err(CliError::usage(format!("--bandwidth must be finite and > 0, got {h}")));
        }
    }
    let dataset = data::load(&a.data)?;
    let (f, reference, prepared, n) = if a.discrete {
        let counts = data::as_counts(&dataset)?;
        let n = counts.iter().sum::<u64>() as usize;
        let (f, r, p) = discrete(a, &counts)?;
        (f, r, p, n)
    } else {
        let sample = match &dataset {
            Dataset::Continuous(s) => s,
            Dataset::Counts(_) => {
                return Err(CliError::usage(format!("{} holds counts; pass --discrete", a.data)))
            }
        };
        let (f, r, p) = continuous(a, sample)?;
        (f, r, p, sample.len())
    };
    let mut selection = if prepared.models.is_empty() {
        return Err(CliError::compute(format!(
            "no candidate could be fitted: {}",
            prepared.failures.iter().map(|d| format!("{} ({})", d.label, d.reason)).collect::<Vec<_>>().join("; ")
        )));
    } else {
        rank(&f, prepared.models)?
    };
    selection.disqualified.extend(prepared.failures);
    Ok(FitReport {
        data: a.data.clone(),
        n,
        reference,
        candidates: prepared.fitted,
        selection,
    })
}

pub fn render(r: &FitReport, digits: usize) -> String {
    let mut s = format!("data: {} (n = {})\nreference: {}\n", r.data, r.n, r.reference);
    if r.candidates.iter().any(|c| c.log_likelihood.is_some()) {
        s.push_str("\nfits:\n");
        for c in r.candidates.iter().filter(|c| c.log_likelihood.is_some()) {
            s.push_str(&format!(
                "  {} -> {} (log-likelihood {})\n",
                c.requested,
                c.spec,
                fmt_sig(c.log_likelihood.unwrap(), digits)
            ));
        }
    }
    let rows: Vec<Vec<String>> = r
        .selection
        .ranking
        .iter()
        .enumerate()
        .map(|(i, c)| {
            vec![
                (i + 1).to_string(),
                c.label.clone(),
                fmt_sig(c.k.value, digits),
                fmt_sig(c.var_k.value, digits),
                if c.exact_match { "exact match".into() } else { String::new() },
            ]
        })
        .collect();
    s.push_str("\nranking:\n");
    s.push_str(&table(&["rank", "candidate", "K", "VarK", ""], &rows));
    if !r.selection.decisions.is_empty() {
        s.push_str("\ndecisions (r = 2 min K; criterion < 0 favours the higher-K candidate):\n");
        for d in &r.selection.decisions {
            let p = &d.preference;
            s.push_str(&format!(
                "  {} vs {}: r = {}, scores ({}, {}), criterion {} -> {}\n",
                d.first,
                d.second,
                fmt_sig(p.r, digits),
                fmt_sig(p.score_first, digits),
                fmt_sig(p.score_second, digits),
                fmt_sig(p.criterion, digits),
                d.winner
            ));
        }
    }
    if !r.selection.disqualified.is_empty() {
        s.push_str("\ndisqualified:\n");
        for d in &r.selection.disqualified {
            s.push_str(&format!("  {}: {}\n", d.label, d.reason));
        }
    }
    s
}

pub fn run(a: &FitArgs, out: &mut dyn Write) -> CliResult<()> {
    let report = compute(a)?;
    let text = if a.json {
        serde_json::to_string_pretty(&report).expect("report serializes") + "\n"
    } else {
        render(&report, a.precision)
    };
    out.write_all(text.as_bytes())?;
    Ok(())
}
