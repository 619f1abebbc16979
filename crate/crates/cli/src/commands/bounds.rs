use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use infodisp::bounds::{chebyshev_bound, Branch};
use infodisp::{measures, Density};

use super::{positive_list, Grid, Pair};
use crate::spec::DistSpec;
use crate::{emit, fmt_full, CliError, CliResult};

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Closed-form family pair swept over a grid.
    #[arg(long, value_enum, conflicts_with_all = ["f", "g"])]
    pub pair: Option<Pair>,
    /// Rate of the reference exponential (exp pair).
    #[arg(long, default_value_t = 4.0)]
    pub lambda: f64,
    /// Deviation thresholds, comma-separated; one bound column each.
    #[arg(long, value_delimiter = ',', default_value = "0.5,1,1.5,2")]
    pub eps: Vec<f64>,
    /// Parameter grid lo:hi:step [default: 0.1:8:0.1 for exp, 1.05:5:0.05 for power].
    #[arg(long)]
    pub grid: Option<Grid>,
    /// Reference density for a single explicit pair.
    #[arg(long, requires = "g")]
    pub f: Option<DistSpec>,
    /// Monotone hypothesized density for a single explicit pair.
    #[arg(long, requires = "f")]
    pub g: Option<DistSpec>,
    /// Output file; stdout when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn row(param: f64, f: &Density, g: &Density, eps: &[f64]) -> CliResult<String> {
    let vi = measures::varinaccuracy(f, g)?.value;
    let mut cells = vec![fmt_full(param), fmt_full(vi)];
    for &e in eps {
        let b = chebyshev_bound(f, g, e)?.bound_value;
        if b > vi + 1e-7 {
            return Err(CliError::compute(format!(
                "bound {b} exceeds VarI {vi} at parameter {param}, eps {e}"
            )));
        }
        cells.push(fmt_full(b));
    }
    Ok(cells.join(",") + "\n")
}

fn header(param: &str, eps: &[f64]) -> String {
    let mut h = vec![param.to_string(), "VarI".into()];
    h.extend(eps.iter().map(|e| format!("bound_{}", fmt_full(*e))));
    h.join(",") + "\n"
}

pub fn csv(a: &BoundsArgs) -> CliResult<String> {
    positive_list("eps", &a.eps)?;
    if let (Some(fs), Some(gs)) = (&a.f, &a.g) {
        let (f, g) = (fs.density().map_err(|_| discrete(fs))?, gs.density().map_err(|_| discrete(gs))?);
        let vi = measures::varinaccuracy(&f, &g)?.value;
        let mut s = String::from("eps,VarI,bound,branch\n");
        for &e in &a.eps {
            let b = chebyshev_bound(&f, &g, e)?;
            let branch = match b.branch {
                Branch::TwoTerm => "two_term",
                Branch::OneTerm => "one_term",
            };
            s.push_str(&format!("{},{},{},{branch}\n", fmt_full(e), fmt_full(vi), fmt_full(b.bound_value)));
        }
        return Ok(s);
    }
    let mut s = String::new();
    match a.pair {
        Some(Pair::Exp) => {
            positive_list("lambda", &[a.lambda])?;
            let grid = a.grid.unwrap_or(Grid { lo: 0.1, hi: 8.0, step: 0.1 });
            let f = Density::exponential(a.lambda)?;
            s.push_str(&header("eta", &a.eps));
            for eta in grid.points() {
                s.push_str(&row(eta, &f, &Density::exponential(eta)?, &a.eps)?);
            }
        }
        Some(Pair::Power) => {
            let grid = a.grid.unwrap_or(Grid { lo: 1.05, hi: 5.0, step: 0.05 });
            let f = Density::uniform(0.0, 1.0)?;
            s.push_str(&header("alpha", &a.eps));
            for alpha in grid.points() {
                s.push_str(&row(alpha, &f, &Density::power(alpha)?, &a.eps)?);
            }
        }
        None => return Err(CliError::usage("give --pair exp|power or both --f and --g")),
    }
    Ok(s)
}

fn discrete(s: &DistSpec) -> CliError {
    CliError::usage(format!("{s} is discrete; bounds need continuous densities"))
}

pub fn run(a: &BoundsArgs, out: &mut dyn Write) -> CliResult<()> {
    emit(&csv(a)?, a.out.as_deref(), out)
}
