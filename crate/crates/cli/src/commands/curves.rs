use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use infodisp::measures;
use infodisp::Density;

use super::{positive_list, Grid, Pair};
use crate::{emit, fmt_full, CliResult};

#[derive(Debug, Args)]
pub struct CurvesArgs {
    #[arg(long, value_enum)]
    pub pair: Pair,
    /// Rates of the reference exponential (exp pair only).
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
    pub lambdas: Vec<f64>,
    /// Parameter grid lo:hi:step [default: 0.1:10:0.1 for exp, 0.1:5:0.05 for power].
    #[arg(long)]
    pub grid: Option<Grid>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn csv(a: &CurvesArgs) -> CliResult<String> {
    let mut s = String::new();
    match a.pair {
        Pair::Exp => {
            positive_list("lambdas", &a.lambdas)?;
            let grid = a.grid.unwrap_or(Grid { lo: 0.1, hi: 10.0, step: 0.1 });
            s.push_str("lambda,eta,I,VarI\n");
            for &lambda in &a.lambdas {
                let f = Density::exponential(lambda)?;
                for eta in grid.points() {
                    let g = Density::exponential(eta)?;
                    let i = measures::inaccuracy(&f, &g)?.value;
                    let v = measures::varinaccuracy(&f, &g)?.value;
                    s.push_str(&format!("{},{},{},{}\n", fmt_full(lambda), fmt_full(eta), fmt_full(i), fmt_full(v)));
                }
            }
        }
        Pair::Power => {
            let grid = a.grid.unwrap_or(Grid { lo: 0.1, hi: 5.0, step: 0.05 });
            let f = Density::uniform(0.0, 1.0)?;
            s.push_str("alpha,I,VarI\n");
            for alpha in grid.points() {
                let g = Density::power(alpha)?;
                let i = measures::inaccuracy(&f, &g)?.value;
                let v = measures::varinaccuracy(&f, &g)?.value;
                s.push_str(&format!("{},{},{}\n", fmt_full(alpha), fmt_full(i), fmt_full(v)));
            }
        }
    }
    Ok(s)
}

pub fn run(a: &CurvesArgs, out: &mut dyn Write) -> CliResult<()> {
    emit(&csv(a)?, a.out.as_deref(), out)
}
