//! Reference data sets.

use crate::distributions::SampleData;

/// Coin-toss tallies: how many of 200 trials of three tosses gave 0, 1, 2
/// and 3 heads.
pub const COIN3_COUNTS: [u64; 4] = [20, 63, 84, 33];

/// Tosses per trial in [`COIN3_COUNTS`].
pub const COIN3_TRIALS: u64 = 3;

/// Twenty failure times used to illustrate two-parameter Weibull fitting.
pub const MURTHY41: [f64; 20] = [
    11.24, 1.92, 12.74, 22.48, 9.60, 11.50, 8.86, 7.75, 5.73, 9.37, 30.42, 9.17, 10.20, 5.52,
    5.85, 38.14, 2.99, 16.58, 18.92, 13.36,
];

pub fn coin3() -> [u64; 4] {
    COIN3_COUNTS
}

pub fn murthy41() -> SampleData {
    SampleData::new(MURTHY41.to_vec()).expect("static data set is valid")
}

/// Looks up a data set by name: `coin3` or `murthy41`.
pub fn by_name(name: &str) -> Option<Dataset> {
    match name {
        "coin3" => Some(Dataset::Counts(COIN3_COUNTS.to_vec())),
        "murthy41" => Some(Dataset::Continuous(murthy41())),
        _ => None,
    }
}

#[derive(Debug, Clone)]
pub enum Dataset {
    Counts(Vec<u64>),
    Continuous(SampleData),
}
