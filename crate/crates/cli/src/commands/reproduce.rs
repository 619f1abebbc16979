use std::f64::consts::LN_2;
use std::io::Write;

use clap::{Args, ValueEnum};
use infodisp::bounds::{chebyshev_bound, exp_pair_bound, uniform_power_bound};
use infodisp::datasets::{self, COIN3_COUNTS, COIN3_TRIALS};
use infodisp::estimation::{binomial_p_ratio, fit_weibull_mle, kde_positive};
use infodisp::measures::{self, Evaluator, MeasureValue};
use infodisp::selection::{prefer_auto, rank, Candidate, Model, Winner};
use infodisp::{Density, FinitePMF};

use crate::{fmt_sig, table, CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Table2,
    Example23,
    Example24,
    Remark33,
    Example42,
    Example43,
    Example44,
    #[value(name = "bounds_figs", alias = "bounds-figs")]
    BoundsFigs,
    All,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    #[arg(value_enum)]
    pub target: Target,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub target: &'static str,
    pub name: String,
    pub computed: String,
    pub expected: String,
    pub pass: bool,
}

struct Checks {
    target: &'static str,
    list: Vec<Check>,
}

impl Checks {
    fn new(target: &'static str) -> Self {
        Checks { target, list: vec![] }
    }

    fn num(&mut self, name: impl Into<String>, computed: f64, expected: f64, tol: f64) {
        self.list.push(Check {
            target: self.target,
            name: name.into(),
            computed: fmt_sig(computed, 10),
            expected: format!("{} ± {}", fmt_sig(expected, 10), fmt_sig(tol, 2)),
            pass: (computed - expected).abs() <= tol,
        });
    }

    fn flag(&mut self, name: impl Into<String>, computed: impl Into<String>, expected: impl Into<String>, pass: bool) {
        self.list.push(Check {
            target: self.target,
            name: name.into(),
            computed: computed.into(),
            expected: expected.into(),
            pass,
        });
    }
}

const QUAD: Evaluator = Evaluator { tol: infodisp::quadrature::DEFAULT_TOL, closed_forms: false };

fn exp(rate: f64) -> CliResult<Density> {
    Ok(Density::exponential(rate)?)
}

fn example23() -> CliResult<Vec<Check>> {
    let mut c = Checks::new("example23");
    let (f, g) = (exp(1.0)?, exp(2.0)?);
    c.num("I closed form", measures::inaccuracy(&f, &g)?.value, 2.0 - LN_2, 1e-9);
    c.num("VarI closed form", measures::varinaccuracy(&f, &g)?.value, 4.0, 1e-9);
    c.num("I quadrature", QUAD.inaccuracy(&f, &g)?.value, 2.0 - LN_2, 1e-7);
    c.num("VarI quadrature", QUAD.varinaccuracy(&f, &g)?.value, 4.0, 1e-7);
    Ok(c.list)
}

fn example24() -> CliResult<Vec<Check>> {
    let mut c = Checks::new("example24");
    let (f, g) = (Density::uniform(0.0, 1.0)?, Density::power(2.0)?);
    c.num("I closed form", measures::inaccuracy(&f, &g)?.value, 1.0 - LN_2, 1e-9);
    c.num("VarI closed form", measures::varinaccuracy(&f, &g)?.value, 1.0, 1e-9);
    c.num("I quadrature", QUAD.inaccuracy(&f, &g)?.value, 1.0 - LN_2, 1e-7);
    c.num("VarI quadrature", QUAD.varinaccuracy(&f, &g)?.value, 1.0, 1e-7);
    Ok(c.list)
}

fn remark33() -> CliResult<Vec<Check>> {
    let mut c = Checks::new("remark33");
    let (f, g, h) = (Density::power(0.5)?, Density::power(3.0)?, Density::power(2.0)?);
    let fg = measures::var_kl(&f, &g)?.value;
    let fh = measures::var_kl(&f, &h)?.value;
    let hg = measures::var_kl(&h, &g)?.value;
    c.num("VarK(f:g)", fg, 25.0, 1e-9);
    c.num("VarK(f:h)", fh, 9.0, 1e-9);
    c.num("VarK(h:g)", hg, 0.25, 1e-9);
    c.flag(
        "triangle inequality fails",
        format!("{} > {}", fmt_sig(fg, 6), fmt_sig(fh + hg, 6)),
        "VarK(f:g) > VarK(f:h) + VarK(h:g)",
        fg > fh + hg,
    );
    Ok(c.list)
}

fn table2() -> CliResult<Vec<Check>> {
    let mut c = Checks::new("table2");
    let (num, den) = binomial_p_ratio(&COIN3_COUNTS, COIN3_TRIALS)?;
    c.flag("binomial MLE", format!("{num}/{den}"), "330/600 = 0.55", num * 20 == den * 11);
    let f = FinitePMF::empirical(&COIN3_COUNTS)?;
    let rows = [
        ("binomial", FinitePMF::binomial(3, 0.55)?, 0.0011, 0.0023),
        ("betabin", FinitePMF::beta_binomial(3, 12.0, 10.0)?, 0.0027, 0.0054),
        ("dunif", FinitePMF::discrete_uniform(4)?, 0.1305, 0.2253),
    ];
    let mut models = Vec::new();
    for (name, g, k, v) in rows {
        let (mk, mv) = measures::kl_moments_pmf(&f, &g)?;
        c.num(format!("K {name}"), mk.value, k, 5e-5);
        c.num(format!("VarK {name}"), mv.value, v, 5e-5);
        models.push((name.to_string(), Model::Discrete(g)));
    }
    let report = rank(&Model::Discrete(f), models)?;
    let order: Vec<_> = report.ranking.iter().map(|r| r.label.as_str()).collect();
    c.flag("ranking", order.join(" > "), "binomial > betabin > dunif", order == ["binomial", "betabin", "dunif"]);
    Ok(c.list)
}

fn kde_candidates() -> CliResult<(Candidate, Candidate)> {
    let f = Model::Continuous(kde_positive(&datasets::murthy41(), None)?);
    let g1 = Model::Continuous(Density::weibull2(1.5487, 0.0166)?);
    let g2 = Model::Continuous(Density::weibull2(1.6, 0.0127)?);
    Ok((Candidate::evaluate("Y1", &f, g1)?, Candidate::evaluate("Y2", &f, g2)?))
}

fn example42() -> CliResult<Vec<Check>> {
    let mut c = Checks::new("example42");
    let fit = fit_weibull_mle(&datasets::murthy41())?;
    let (a, l) = (fit.params[0], fit.params[1]);
    c.num("W2 shape MLE", a, 1.5487, 0.01 * 1.5487);
    c.num("W2 rate MLE", l, 0.0166, 0.01 * 0.0166);
    let (y1, _) = kde_candidates()?;
    c.num("K(kde, Y1)", y1.k(), 0.0990, 0.02);
    Ok(c.list)
}

fn example43() -> CliResult<Vec<Check>> {
    let mut c = Checks::new("example43");
    let (y1, y2) = kde_candidates()?;
    c.num("K(kde, Y1)", y1.k(), 0.0990, 0.02);
    c.num("K(kde, Y1) - K(kde, Y2)", y1.k() - y2.k(), 0.0, 0.01);
    c.flag(
        "VarK(kde, Y1) > VarK(kde, Y2)",
        format!("{} vs {}", fmt_sig(y1.var_k(), 6), fmt_sig(y2.var_k(), 6)),
        "first larger",
        y1.var_k() > y2.var_k(),
    );
    let p = prefer_auto(&y1, &y2)?;
    c.flag("selected", if p.winner == Winner::Second { "Y2" } else { "Y1" }, "Y2", p.winner == Winner::Second);
    Ok(c.list)
}

fn example44() -> CliResult<Vec<Check>> {
    let mut c = Checks::new("example44");
    let mk = |label: &str, k, v| -> CliResult<Candidate> {
        Ok(Candidate {
            label: label.into(),
            model: Model::Continuous(Density::exponential(1.0)?),
            k: MeasureValue::closed_form(k),
            var_k: MeasureValue::closed_form(v),
        })
    };
    let p = prefer_auto(&mk("weibull", 0.0381, 0.1148)?, &mk("lognormal", 0.0420, 0.0924)?)?;
    c.flag("criterion sign", fmt_sig(p.criterion, 6), "< 0", p.criterion < 0.0);
    c.flag(
        "selected",
        if p.winner == Winner::Second { "lognormal" } else { "weibull" },
        "lognormal",
        p.winner == Winner::Second,
    );
    Ok(c.list)
}

fn bounds_figs() -> CliResult<Vec<Check>> {
    let mut c = Checks::new("bounds_figs");
    let eps = [0.5, 1.0, 1.5, 2.0];
    let (mut excess, mut gap) = (f64::NEG_INFINITY, 0.0f64);
    let f = exp(4.0)?;
    for i in 1..=80 {
        let eta = 0.1 * i as f64;
        let g = exp(eta)?;
        let vi = measures::varinaccuracy(&f, &g)?.value;
        for &e in &eps {
            let b = chebyshev_bound(&f, &g, e)?.bound_value;
            excess = excess.max(b - vi);
            gap = gap.max((b - exp_pair_bound(4.0, eta, e)?.bound_value).abs());
        }
    }
    c.num("exp: max(bound - VarI) clipped at 0", excess.max(0.0), 0.0, 1e-7);
    c.num("exp: max |generic - closed form|", gap, 0.0, 1e-9);
    let (mut excess, mut gap) = (f64::NEG_INFINITY, 0.0f64);
    let f = Density::uniform(0.0, 1.0)?;
    for i in 1..=80 {
        let alpha = 1.0 + 0.05 * i as f64;
        let g = Density::power(alpha)?;
        let vi = measures::varinaccuracy(&f, &g)?.value;
        for &e in &eps {
            let b = chebyshev_bound(&f, &g, e)?.bound_value;
            excess = excess.max(b - vi);
            gap = gap.max((b - uniform_power_bound(alpha, e)?.bound_value).abs());
        }
    }
    c.num("power: max(bound - VarI) clipped at 0", excess.max(0.0), 0.0, 1e-7);
    c.num("power: max |generic - closed form|", gap, 0.0, 1e-9);
    Ok(c.list)
}

pub fn checks(target: Target) -> CliResult<Vec<Check>> {
    Ok(match target {
        Target::Table2 => table2()?,
        Target::Example23 => example23()?,
        Target::Example24 => example24()?,
        Target::Remark33 => remark33()?,
        Target::Example42 => example42()?,
        Target::Example43 => example43()?,
        Target::Example44 => example44()?,
        Target::BoundsFigs => bounds_figs()?,
        Target::All => {
            let mut v = Vec::new();
            for t in [
                Target::Example23,
                Target::Example24,
                Target::Remark33,
                Target::Table2,
                Target::Example42,
                Target::Example43,
                Target::Example44,
                Target::BoundsFigs,
            ] {
                v.extend(checks(t)?);
            }
            v
        }
    })
}

pub fn run(a: &ReproduceArgs, out: &mut dyn Write) -> CliResult<()> {
    let list = checks(a.target)?;
    let rows: Vec<Vec<String>> = list
        .iter()
        .map(|c| {
            vec![
                c.target.to_string(),
                c.name.clone(),
                c.computed.clone(),
                c.expected.clone(),
                if c.pass { "ok" } else { "MISMATCH" }.to_string(),
            ]
        })
        .collect();
    let failed = list.iter().filter(|c| !c.pass).count();
    let mut text = table(&["target", "check", "computed", "expected", "status"], &rows);
    text.push_str(&format!("{} of {} checks passed\n", list.len() - failed, list.len()));
    out.write_all(text.as_bytes())?;
    if failed > 0 {
        return Err(CliError::mismatch(format!("{failed} check(s) did not match")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_target_passes() {
        let all = checks(Target::All).unwrap();
        assert!(all.len() > 25);
        for c in &all {
            assert!(c.pass, "{c:?}");
        }
    }
}
