//! Mean-variance selection among candidate models using `K` and `VarK`.
//!
//! A candidate `g` is scored against a threshold `r` by the standardized
//! distance `(r - K(f:g)) / sqrt(VarK(f:g))`; larger is better. The automatic
//! rule sets `r = 2 K1` where `K1` is the smaller divergence, which reduces
//! to preferring the higher-`K` candidate exactly when
//! `K2 - (2 - sqrt(V2 / V1)) K1 < 0`.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::distributions::{Density, FinitePMF};
use crate::error::{invalid, Error, Result};
use crate::measures::{kl_moments_pmf, Evaluator, MeasureValue};

/// Values at or below this are treated as zero.
pub const ZERO: f64 = 1e-12;

/// Score differences below this are ties.
pub const TIE: f64 = 1e-12;

#[derive(Debug, Clone)]
pub enum Model {
    Continuous(Density),
    Discrete(FinitePMF),
}

impl From<Density> for Model {
    fn from(d: Density) -> Self {
        Model::Continuous(d)
    }
}

impl From<FinitePMF> for Model {
    fn from(p: FinitePMF) -> Self {
        Model::Discrete(p)
    }
}

/// `(K(f:g), VarK(f:g))` for models of the same kind.
pub fn kl_pair(f: &Model, g: &Model, ev: &Evaluator) -> Result<(MeasureValue, MeasureValue)> {
    match (f, g) {
        (Model::Continuous(f), Model::Continuous(g)) => Ok((ev.kl(f, g)?, ev.var_kl(f, g)?)),
        (Model::Discrete(p), Model::Discrete(q)) => kl_moments_pmf(p, q),
        _ => Err(Error::KindMismatch),
    }
}

#[derive(Debug, Clone)]
pub struct Candidate {
    pub label: String,
    pub model: Model,
    pub k: MeasureValue,
    pub var_k: MeasureValue,
}

impl Candidate {
    /// Computes `K` and `VarK` of `model` relative to the reference `f`.
    pub fn evaluate(label: impl Into<String>, f: &Model, model: Model) -> Result<Self> {
        Self::evaluate_with(label, f, model, &Evaluator::default())
    }

    pub fn evaluate_with(
        label: impl Into<String>,
        f: &Model,
        model: Model,
        ev: &Evaluator,
    ) -> Result<Self> {
        let (k, var_k) = kl_pair(f, &model, ev)?;
        Ok(Candidate { label: label.into(), model, k, var_k })
    }

    pub fn k(&self) -> f64 {
        self.k.value
    }

    pub fn var_k(&self) -> f64 {
        self.var_k.value
    }

    /// `K` and `VarK` both vanish: the candidate coincides with the reference.
    pub fn is_exact_match(&self) -> bool {
        self.k() <= ZERO && self.var_k() <= ZERO
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Winner {
    First,
    Second,
}

/// Outcome of a pairwise comparison. Scores are `(r - K) / sqrt(VarK)`,
/// `+inf` for a vanishing `VarK` with `K < r` and for exact matches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Preference {
    pub winner: Winner,
    #[serde(with = "crate::serde_f64")]
    pub r: f64,
    #[serde(with = "crate::serde_f64")]
    pub score_first: f64,
    #[serde(with = "crate::serde_f64")]
    pub score_second: f64,
    /// `K2 - (2 - sqrt(V2/V1)) K1` with candidates relabelled so `K1 <= K2`;
    /// NaN for the fixed-threshold rule.
    #[serde(with = "crate::serde_f64")]
    pub criterion: f64,
    /// The winner coincides with the reference.
    pub exact_match: bool,
}

fn score(k: f64, v: f64, r: f64) -> f64 {
    if v <= ZERO {
        if k <= ZERO || r > k {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        }
    } else {
        (r - k) / v.sqrt()
    }
}

fn tie_break(c1: &Candidate, c2: &Candidate) -> Winner {
    let by_k = c1.k().total_cmp(&c2.k());
    let by_v = c1.var_k().total_cmp(&c2.var_k());
    match by_k.then(by_v) {
        Ordering::Greater => Winner::Second,
        _ => Winner::First,
    }
}

fn pick<'a>(w: Winner, c1: &'a Candidate, c2: &'a Candidate) -> &'a Candidate {
    match w {
        Winner::First => c1,
        Winner::Second => c2,
    }
}

fn check_finite(c: &Candidate) -> Result<()> {
    if c.k().is_finite() && c.var_k().is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("candidate {} has non-finite K or VarK", c.label)))
    }
}

/// Prefers the candidate with the larger standardized score at threshold `r`.
pub fn prefer_with_threshold(c1: &Candidate, c2: &Candidate, r: f64) -> Result<Preference> {
    if !(r.is_finite() && r > 0.0) {
        return Err(invalid(format!("threshold must be finite and > 0, got {r}")));
    }
    check_finite(c1)?;
    check_finite(c2)?;
    for c in [c1, c2] {
        if c.k() >= r {
            return Err(Error::ThresholdViolation { k: c.k(), r });
        }
    }
    let s1 = score(c1.k(), c1.var_k(), r);
    let s2 = score(c2.k(), c2.var_k(), r);
    let winner = if s1 == s2 || (s1 - s2).abs() < TIE {
        tie_break(c1, c2)
    } else if s1 > s2 {
        Winner::First
    } else {
        Winner::Second
    };
    Ok(Preference {
        winner,
        r,
        score_first: s1,
        score_second: s2,
        criterion: f64::NAN,
        exact_match: pick(winner, c1, c2).is_exact_match(),
    })
}

/// Signed criterion `K2 - (2 - sqrt(V2/V1)) K1`, requiring `K1 <= K2`.
/// Negative means candidate 2 is preferred.
pub fn criterion_value(k1: f64, v1: f64, k2: f64, v2: f64) -> f64 {
    if v1 <= ZERO {
        if k1 <= ZERO {
            return k2;
        }
        return f64::INFINITY;
    }
    k2 - (2.0 - (v2 / v1).sqrt()) * k1
}

/// Pairwise rule with the threshold `r = 2 min(K1, K2)`.
pub fn prefer_auto(c1: &Candidate, c2: &Candidate) -> Result<Preference> {
    check_finite(c1)?;
    check_finite(c2)?;
    let swapped = c1.k() > c2.k();
    let (lo, hi) = if swapped { (c2, c1) } else { (c1, c2) };
    let r = 2.0 * lo.k();
    let c = criterion_value(lo.k(), lo.var_k(), hi.k(), hi.var_k());
    let winner = if c.abs() < TIE {
        tie_break(c1, c2)
    } else if (c < 0.0) != swapped {
        Winner::Second
    } else {
        Winner::First
    };
    Ok(Preference {
        winner,
        r,
        score_first: score(c1.k(), c1.var_k(), r),
        score_second: score(c2.k(), c2.var_k(), r),
        criterion: c,
        exact_match: pick(winner, c1, c2).is_exact_match(),
    })
}

/// One pairwise application of the automatic rule during ranking.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub first: String,
    pub second: String,
    pub winner: String,
    pub preference: Preference,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedCandidate {
    pub label: String,
    pub k: MeasureValue,
    pub var_k: MeasureValue,
    pub exact_match: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Disqualified {
    pub label: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    /// Best first.
    pub ranking: Vec<RankedCandidate>,
    pub decisions: Vec<Decision>,
    pub disqualified: Vec<Disqualified>,
}

impl SelectionReport {
    pub fn best(&self) -> &RankedCandidate {
        &self.ranking[0]
    }
}

/// Evaluates every candidate against `f` and ranks them.
///
/// Candidates whose `K` is infinite or cannot be computed are disqualified;
/// a candidate of the wrong kind is an error.
pub fn rank(f: &Model, candidates: Vec<(String, Model)>) -> Result<SelectionReport> {
    rank_with(f, candidates, &Evaluator::default())
}

pub fn rank_with(
    f: &Model,
    candidates: Vec<(String, Model)>,
    ev: &Evaluator,
) -> Result<SelectionReport> {
    let mut scored = Vec::new();
    let mut disqualified = Vec::new();
    for (label, model) in candidates {
        match Candidate::evaluate_with(label.clone(), f, model, ev) {
            Ok(c) => scored.push(c),
            Err(Error::KindMismatch) => return Err(Error::KindMismatch),
            Err(e) => disqualified.push(Disqualified { label, reason: e.to_string() }),
        }
    }
    rank_candidates(scored, disqualified)
}

/// Ranks candidates whose measures are already known.
///
/// Candidates are sorted by `(K, VarK, label)`; the champion of a sequential
/// tournament under [`prefer_auto`] takes the next place and the tournament is
/// rerun on the rest.
pub fn rank_candidates(
    candidates: Vec<Candidate>,
    mut disqualified: Vec<Disqualified>,
) -> Result<SelectionReport> {
    let mut pool = Vec::new();
    for c in candidates {
        if c.k().is_finite() && c.var_k().is_finite() {
            pool.push(c);
        } else {
            disqualified.push(Disqualified {
                label: c.label,
                reason: "K is infinite: candidate does not cover the reference".into(),
            });
        }
    }
    if pool.is_empty() {
        return Err(Error::NoValidCandidates);
    }
    pool.sort_by(|a, b| {
        a.k()
            .total_cmp(&b.k())
            .then(a.var_k().total_cmp(&b.var_k()))
            .then_with(|| a.label.cmp(&b.label))
    });

    let mut ranking = Vec::new();
    let mut decisions = Vec::new();
    while !pool.is_empty() {
        let mut champ = 0;
        for next in 1..pool.len() {
            let p = prefer_auto(&pool[champ], &pool[next])?;
            let first = pool[champ].label.clone();
            let second = pool[next].label.clone();
            if p.winner == Winner::Second {
                champ = next;
            }
            decisions.push(Decision {
                first,
                second,
                winner: pool[champ].label.clone(),
                preference: p,
            });
        }
        let c = pool.remove(champ);
        ranking.push(RankedCandidate {
            exact_match: c.is_exact_match(),
            label: c.label,
            k: c.k,
            var_k: c.var_k,
        });
    }
    Ok(SelectionReport { ranking, decisions, disqualified })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::COIN3_COUNTS;
    use crate::measures::Method;
    use proptest::prelude::*;

    fn cand(label: &str, k: f64, v: f64) -> Candidate {
        let mv = |x| MeasureValue { value: x, method: Method::Summation, abs_error: 0.0 };
        Candidate {
            label: label.into(),
            model: Model::Discrete(FinitePMF::discrete_uniform(2).unwrap()),
            k: mv(k),
            var_k: mv(v),
        }
    }

    #[test]
    fn equal_k_prefers_lower_variance() {
        let p = prefer_with_threshold(&cand("a", 0.1, 0.4), &cand("b", 0.1, 0.2), 0.5).unwrap();
        assert_eq!(p.winner, Winner::Second);
        let p = prefer_auto(&cand("a", 0.1, 0.4), &cand("b", 0.1, 0.2)).unwrap();
        assert_eq!(p.winner, Winner::Second);
    }

    #[test]
    fn equal_variance_prefers_lower_k() {
        let p = prefer_with_threshold(&cand("a", 0.1, 0.3), &cand("b", 0.2, 0.3), 0.5).unwrap();
        assert_eq!(p.winner, Winner::First);
        let p = prefer_auto(&cand("b", 0.2, 0.3), &cand("a", 0.1, 0.3)).unwrap();
        assert_eq!(p.winner, Winner::Second);
    }

    #[test]
    fn dominant_candidate_wins_for_every_threshold() {
        let (c1, c2) = (cand("a", 0.1, 0.2), cand("b", 0.15, 0.3));
        for i in 1..200 {
            let r = 0.15 + 0.01 * i as f64;
            assert_eq!(prefer_with_threshold(&c1, &c2, r).unwrap().winner, Winner::First);
        }
    }

    #[test]
    fn automatic_rule_examples() {
        let p = prefer_auto(&cand("y1", 0.0381, 0.1148), &cand("y2", 0.0420, 0.0924)).unwrap();
        assert_eq!(p.winner, Winner::Second);
        assert!(p.criterion < 0.0);
        assert!((p.criterion + 1.9e-5).abs() < 2e-6, "{}", p.criterion);
        assert_eq!(p.r, 2.0 * 0.0381);

        let p = prefer_auto(&cand("y1", 0.0990, 0.3350), &cand("y2", 0.0990, 0.2936)).unwrap();
        assert_eq!(p.winner, Winner::Second);
    }

    #[test]
    fn negative_coefficient_keeps_lower_k() {
        // V2 > 4 V1
        let p = prefer_auto(&cand("a", 0.1, 0.1), &cand("b", 0.11, 0.5)).unwrap();
        assert_eq!(p.winner, Winner::First);
        assert!(p.criterion > 0.0);
    }

    #[test]
    fn threshold_violation() {
        let err = prefer_with_threshold(&cand("a", 0.1, 0.2), &cand("b", 0.3, 0.1), 0.25).unwrap_err();
        assert_eq!(err, Error::ThresholdViolation { k: 0.3, r: 0.25 });
        assert!(prefer_with_threshold(&cand("a", 0.1, 0.2), &cand("b", 0.2, 0.1), 0.0).is_err());
    }

    #[test]
    fn exact_match_wins_and_is_flagged() {
        let exact = cand("f", 0.0, 0.0);
        let other = cand("g", 0.01, 0.02);
        for (a, b, w) in [(&exact, &other, Winner::First), (&other, &exact, Winner::Second)] {
            let p = prefer_with_threshold(a, b, 0.5).unwrap();
            assert_eq!(p.winner, w);
            assert!(p.exact_match);
            let p = prefer_auto(a, b).unwrap();
            assert_eq!(p.winner, w);
            assert!(p.exact_match);
        }
    }

    #[test]
    fn non_finite_inputs_are_rejected() {
        assert!(prefer_auto(&cand("a", f64::INFINITY, 0.1), &cand("b", 0.1, 0.1)).is_err());
    }

    fn coin_candidates() -> (Model, Vec<(String, Model)>) {
        let f = Model::Discrete(FinitePMF::empirical(&COIN3_COUNTS).unwrap());
        let cands = vec![
            ("uniform".to_string(), Model::Discrete(FinitePMF::discrete_uniform(4).unwrap())),
            ("betabin".to_string(), Model::Discrete(FinitePMF::beta_binomial(3, 12.0, 10.0).unwrap())),
            ("binomial".to_string(), Model::Discrete(FinitePMF::binomial(3, 0.55).unwrap())),
        ];
        (f, cands)
    }

    #[test]
    fn coin_ranking() {
        let (f, cands) = coin_candidates();
        let report = rank(&f, cands).unwrap();
        let labels: Vec<_> = report.ranking.iter().map(|c| c.label.as_str()).collect();
        assert_eq!(labels, ["binomial", "betabin", "uniform"]);
        assert_eq!(report.decisions.len(), 3);
        assert!(report.disqualified.is_empty());
        let json = serde_json::to_string(&report).unwrap();
        let back: SelectionReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.ranking, report.ranking);
    }

    #[test]
    fn ranking_edge_cases() {
        let (f, _) = coin_candidates();
        let single = rank(&f, vec![("only".into(), Model::Discrete(FinitePMF::binomial(3, 0.5).unwrap()))]).unwrap();
        assert_eq!(single.ranking.len(), 1);
        assert!(single.decisions.is_empty());

        let Model::Discrete(p) = &f else { unreachable!() };
        let report = rank(
            &f,
            vec![
                ("binomial".into(), Model::Discrete(FinitePMF::binomial(3, 0.55).unwrap())),
                ("itself".into(), Model::Discrete(p.clone())),
            ],
        )
        .unwrap();
        assert_eq!(report.best().label, "itself");
        assert!(report.best().exact_match);

        let zero = FinitePMF::new(vec![0, 1, 2, 3], vec![0.5, 0.5, 0.0, 0.0]).unwrap();
        let report = rank(
            &f,
            vec![("zero".into(), Model::Discrete(zero.clone())), ("unif".into(), Model::Discrete(FinitePMF::discrete_uniform(4).unwrap()))],
        )
        .unwrap();
        assert_eq!(report.ranking.len(), 1);
        assert_eq!(report.disqualified[0].label, "zero");

        assert_eq!(rank(&f, vec![("zero".into(), Model::Discrete(zero))]).unwrap_err(), Error::NoValidCandidates);
        assert_eq!(
            rank(&f, vec![("e".into(), Model::Continuous(Density::exponential(1.0).unwrap()))]).unwrap_err(),
            Error::KindMismatch
        );
    }

    #[test]
    fn continuous_ranking_disqualifies_uncovered() {
        let f = Model::Continuous(Density::exponential(1.0).unwrap());
        let report = rank(
            &f,
            vec![
                ("exp2".into(), Model::Continuous(Density::exponential(2.0).unwrap())),
                ("unif".into(), Model::Continuous(Density::uniform(0.0, 1.0).unwrap())),
                ("exp1.5".into(), Model::Continuous(Density::exponential(1.5).unwrap())),
            ],
        )
        .unwrap();
        assert_eq!(report.best().label, "exp1.5");
        assert_eq!(report.disqualified.len(), 1);
        assert_eq!(report.disqualified[0].label, "unif");
    }

    fn kv() -> impl Strategy<Value = (f64, f64)> {
        (1e-4f64..1.0, 1e-4f64..1.0)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn threshold_rule_agrees_with_auto((k1, v1) in kv(), (k2, v2) in kv()) {
            let (a, b) = (cand("a", k1, v1), cand("b", k2, v2));
            let auto = prefer_auto(&a, &b).unwrap();
            prop_assume!(auto.criterion.abs() > 1e-9);
            match prefer_with_threshold(&a, &b, 2.0 * k1.min(k2)) {
                Ok(p) => prop_assert_eq!(p.winner, auto.winner),
                Err(Error::ThresholdViolation { .. }) => {
                    // the larger K reaches r; the automatic rule keeps the smaller one
                    let lower = if k1 <= k2 { Winner::First } else { Winner::Second };
                    prop_assert_eq!(auto.winner, lower);
                }
                Err(e) => prop_assert!(false, "{e}"),
            }
        }

        #[test]
        fn dominance((k1, v1) in kv(), dk in 0.0f64..0.5, dv in 0.0f64..0.5) {
            prop_assume!(dk > 0.0 || dv > 0.0);
            let (a, b) = (cand("a", k1, v1), cand("b", k1 + dk, v1 + dv));
            prop_assert_eq!(prefer_auto(&a, &b).unwrap().winner, Winner::First);
            prop_assert_eq!(prefer_auto(&b, &a).unwrap().winner, Winner::Second);
        }

        #[test]
        fn equal_k_rule(k in 1e-4f64..1.0, v1 in 1e-4f64..1.0, v2 in 1e-4f64..1.0) {
            prop_assume!((v1 - v2).abs() > 1e-9);
            let w = prefer_auto(&cand("a", k, v1), &cand("b", k, v2)).unwrap().winner;
            prop_assert_eq!(w, if v1 < v2 { Winner::First } else { Winner::Second });
        }

        #[test]
        fn equal_variance_rule(k1 in 1e-4f64..1.0, k2 in 1e-4f64..1.0, v in 1e-4f64..1.0) {
            prop_assume!((k1 - k2).abs() > 1e-9);
            let w = prefer_auto(&cand("a", k1, v), &cand("b", k2, v)).unwrap().winner;
            prop_assert_eq!(w, if k1 < k2 { Winner::First } else { Winner::Second });
        }

        #[test]
        fn rank_is_order_invariant(vals in proptest::collection::vec(kv(), 1..6), seed in any::<u64>()) {
            let cands: Vec<_> = vals.iter().enumerate().map(|(i, &(k, v))| cand(&format!("c{i}"), k, v)).collect();
            let mut shuffled = cands.clone();
            let n = shuffled.len();
            for i in (1..n).rev() {
                shuffled.swap(i, (seed as usize).wrapping_mul(i + 7) % (i + 1));
            }
            let a = rank_candidates(cands, vec![]).unwrap();
            let b = rank_candidates(shuffled, vec![]).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
