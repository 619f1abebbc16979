use std::io::Write;

use clap::Args;
use infodisp::measures::{self, MeasureValue};
use infodisp::selection::Model;
use serde::{Deserialize, Serialize};

use crate::spec::DistSpec;
use crate::{fmt_sig, table, CliError, CliResult};

#[derive(Debug, Args)]
pub struct MeasuresArgs {
    /// Reference density, e.g. exp:1 or binomial:3,0.55.
    #[arg(long)]
    pub f: DistSpec,
    /// Hypothesized density of the same kind.
    #[arg(long)]
    pub g: DistSpec,
    /// Emit JSON instead of a table.
    #[arg(long)]
    pub json: bool,
    /// Significant digits in the table.
    #[arg(long, default_value_t = 6)]
    pub precision: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureRecord {
    pub measure: String,
    #[serde(flatten)]
    pub value: MeasureValue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasuresReport {
    pub f: String,
    pub g: String,
    pub measures: Vec<MeasureRecord>,
}

pub fn compute(f: &DistSpec, g: &DistSpec) -> CliResult<MeasuresReport> {
    let values: Vec<(&str, MeasureValue)> = match (f.model()?, g.model()?) {
        (Model::Continuous(f), Model::Continuous(g)) => vec![
            ("H", measures::entropy(&f)?),
            ("VarH", measures::varentropy(&f)?),
            ("I", measures::inaccuracy(&f, &g)?),
            ("VarI", measures::varinaccuracy(&f, &g)?),
            ("K", measures::kl(&f, &g)?),
            ("VarK", measures::var_kl(&f, &g)?),
        ],
        (Model::Discrete(p), Model::Discrete(q)) => {
            let (k, vk) = measures::kl_moments_pmf(&p, &q)?;
            vec![
                ("H", measures::entropy_pmf(&p)),
                ("VarH", measures::varentropy_pmf(&p)),
                ("I", measures::inaccuracy_pmf(&p, &q)?),
                ("VarI", measures::varinaccuracy_pmf(&p, &q)?),
                ("K", k),
                ("VarK", vk),
            ]
        }
        _ => {
            return Err(CliError::usage(format!(
                "--f {f} and --g {g} must both be continuous or both discrete"
            )))
        }
    };
    Ok(MeasuresReport {
        f: f.to_string(),
        g: g.to_string(),
        measures: values
            .into_iter()
            .map(|(m, value)| MeasureRecord { measure: m.into(), value })
            .collect(),
    })
}

pub fn render(r: &MeasuresReport, precision: usize) -> String {
    let rows: Vec<Vec<String>> = r
        .measures
        .iter()
        .map(|m| {
            vec![
                m.measure.clone(),
                fmt_sig(m.value.value, precision),
                m.value.method.name().to_string(),
                fmt_sig(m.value.abs_error, 2),
            ]
        })
        .collect();
    format!("f = {}, g = {}\n{}", r.f, r.g, table(&["measure", "value", "method", "abs_error"], &rows))
}

pub fn run(a: &MeasuresArgs, out: &mut dyn Write) -> CliResult<()> {
    let report = compute(&a.f, &a.g)?;
    let text = if a.json {
        serde_json::to_string_pretty(&report).expect("report serializes") + "\n"
    } else {
        render(&report, a.precision)
    };
    out.write_all(text.as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(s: &str) -> DistSpec {
        s.parse().unwrap()
    }

    #[test]
    fn json_round_trip_with_infinity() {
        let r = compute(&spec("exp:1"), &spec("uniform:0,1")).unwrap();
        assert!(r.measures[2].value.is_infinite());
        let text = serde_json::to_string(&r).unwrap();
        assert!(text.contains("\"measure\":\"I\""));
        let back: MeasuresReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn kinds_must_match() {
        let e = compute(&spec("exp:1"), &spec("dunif:4")).unwrap_err();
        assert_eq!(e.code, crate::EXIT_USAGE);
    }

    #[test]
    fn disjoint_supports_are_compute_errors() {
        let e = compute(&spec("uniform:0,1"), &spec("uniform:2,3")).unwrap_err();
        assert_eq!(e.code, crate::EXIT_COMPUTE);
    }
}
