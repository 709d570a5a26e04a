use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use sturmian_core::cf_engine::{complement_cf, convergents, enclose_theta};
use sturmian_core::complexity::{
    equivalence_report, repetitive_certified, repetitive_formula, repetitive_prefix_len, EquivalenceBudget,
};
use sturmian_core::spectral::{
    d_spectral_bruteforce, d_spectral_closed, materialized_pair, spectral_indices_bruteforce, ClosedSpec, Variant,
    WeightSpec,
};
use sturmian_core::words::{
    branching_profile_bruteforce, branching_profile_closed, certified_prefix_len, factors, mechanical_prefix,
    x_limit_prefix, y_limit_prefix, LimitSource,
};
use sturmian_core::{BinaryWord, ContinuedFraction, ConvergentTable, Error, Verdict};

use crate::config::ExperimentConfig;
use crate::emit::{Report, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Pass,
    Fail,
    Budget,
    Error,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub outcome: Outcome,
    pub detail: String,
}

type Verdicted = std::result::Result<String, String>;

struct Ctx<'a> {
    cf: &'a ContinuedFraction,
    t: ConvergentTable,
    cfg: &'a ExperimentConfig,
}

impl Ctx<'_> {
    fn budget(&self) -> usize {
        self.cfg.budgets.word_budget
    }

    fn len_of(&self, n: BigUint) -> sturmian_core::Result<usize> {
        n.to_usize().ok_or(Error::BudgetExceeded {
            requested: n.to_string(),
            budget: self.budget(),
        })
    }

    /// Largest `n <= want` whose certified prefix fits the stored entries.
    fn reachable(&self, want: usize, need: impl Fn(usize) -> sturmian_core::Result<BigUint>) -> usize {
        let mut n = want;
        while n > 1 && need(n).is_err() {
            n /= 2;
        }
        n
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Verdicted {
    if ok {
        Ok(String::new())
    } else {
        Err(msg())
    }
}

type CheckFn = fn(&Ctx) -> sturmian_core::Result<Verdicted>;

const CHECKS: &[(&str, CheckFn)] = &[
    ("convergent recurrences and unit determinants", convergent_identities),
    ("theta enclosures nest and shrink", enclosures_nest),
    ("complement is an involution shifting denominators", complement_shift),
    ("limit words are 01 and 10 before the rotation word", limit_words_vs_rotation),
    ("factor complexity is n + 1", factor_complexity),
    ("factors are balanced", balance),
    ("language is closed under reversal", reversal_closed),
    ("repetitive function formula matches exhaustive search", repetitive_function),
    ("branching indices match the convergent prediction", branching_indices),
    ("spectral indices match direct comparison", spectral_indices),
    ("closed spectral distances match direct sums", spectral_distances),
    ("banded verdicts are mutually consistent", banded_consistency),
];

pub fn run(cf: &ContinuedFraction, cfg: &ExperimentConfig) -> (Report, bool) {
    let ctx = Ctx {
        cf,
        t: convergents(cf),
        cfg,
    };
    let results: Vec<CheckResult> = CHECKS
        .par_iter()
        .map(|(name, f)| {
            let (outcome, detail) = match f(&ctx) {
                Ok(Ok(d)) => (Outcome::Pass, d),
                Ok(Err(d)) => (Outcome::Fail, d),
                Err(e @ Error::BudgetExceeded { .. }) => (Outcome::Budget, e.to_string()),
                Err(e) => (Outcome::Error, e.to_string()),
            };
            CheckResult { name, outcome, detail }
        })
        .collect();
    let first_failure = results.iter().find(|r| r.outcome != Outcome::Pass).map(|r| r.name);
    let passed = results.iter().filter(|r| r.outcome == Outcome::Pass).count();
    let mut table = Table::new("checks", &["check", "outcome", "detail"]);
    for r in &results {
        table.push(vec![
            Value::from(r.name),
            serde_json::to_value(r.outcome).unwrap(),
            Value::from(r.detail.clone()),
        ]);
    }
    let summary = json!({
        "slope": cfg.slope.to_string(),
        "entries": cf.len(),
        "passed": passed,
        "total": results.len(),
        "first_failure": first_failure,
        "checks": results,
    });
    let report = Report {
        command: "verify",
        config: cfg.clone(),
        summary,
        tables: vec![table],
    };
    (report, passed == results.len())
}

/// Exit status for a finished suite: genuine failures outrank budget stops.
pub fn status(report: &Report) -> i32 {
    let outcomes: Vec<&str> = report.summary["checks"]
        .as_array()
        .map(|a| a.iter().filter_map(|c| c["outcome"].as_str()).collect())
        .unwrap_or_default();
    if outcomes.iter().any(|o| *o == "fail" || *o == "error") {
        1
    } else if outcomes.contains(&"budget") {
        3
    } else {
        0
    }
}

fn convergent_identities(c: &Ctx) -> sturmian_core::Result<Verdicted> {
    c.t.check_invariants(c.cf)?;
    for n in 1..=c.cf.len() {
        let det = BigInt::from(c.t.p[n].clone()) * BigInt::from(c.t.q[n - 1].clone())
            - BigInt::from(c.t.p[n - 1].clone()) * BigInt::from(c.t.q[n].clone());
        let want = if n % 2 == 0 { -1 } else { 1 };
        if det != BigInt::from(want) {
            return Ok(Err(format!("p_{n} q_{} - p_{} q_{n} = {det}", n - 1, n - 1)));
        }
    }
    Ok(Ok(format!("{} levels", c.cf.len())))
}

fn enclosures_nest(c: &Ctx) -> sturmian_core::Result<Verdicted> {
    let mut prev = enclose_theta(c.cf, 0)?;
    for d in 1..c.cf.len().saturating_sub(1) {
        let e = enclose_theta(c.cf, d)?;
        if !(prev.lower <= e.lower && e.upper <= prev.upper && e.width() < prev.width()) {
            return Ok(Err(format!("depth {d} enclosure escapes depth {}", d - 1)));
        }
        prev = e;
    }
    Ok(Ok(format!("width {:e} at the deepest level", prev.width().to_f64())))
}

fn complement_shift(c: &Ctx) -> sturmian_core::Result<Verdicted> {
    let comp = complement_cf(c.cf)?;
    if complement_cf(&comp)?.entries() != c.cf.entries() {
        return Ok(Err("complement applied twice changes the entries".into()));
    }
    let tc = convergents(&comp);
    for n in 1..tc.q.len().min(c.t.q.len() + 1) {
        if tc.q[n] != c.t.q[n - 1] {
            return Ok(Err(format!("complement q_{n} differs from q_{}", n - 1)));
        }
    }
    Ok(Ok(String::new()))
}

fn limit_words_vs_rotation(c: &Ctx) -> sturmian_core::Result<Verdicted> {
    let len = c.cfg.budgets.horizon;
    let rot = mechanical_prefix(c.cf, len, c.budget())?;
    let x = x_limit_prefix(c.cf, len + 2, c.budget())?;
    let y = y_limit_prefix(c.cf, len + 2, c.budget())?;
    let ok = x.prefix(2).to_string() == "01" && y.prefix(2).to_string() == "10" && x.shift(2) == rot && y.shift(2) == rot;
    Ok(ensure(ok, || "limit words do not reduce to the rotation word".into()).map(|_| format!("{len} symbols")))
}

fn factor_complexity(c: &Ctx) -> sturmian_core::Result<Verdicted> {
    let n_max = c.reachable(c.cfg.grids.n_max, |n| certified_prefix_len(c.cf, n));
    let w = mechanical_prefix(c.cf, c.len_of(certified_prefix_len(c.cf, n_max)?)?, c.budget())?;
    for n in 1..=n_max {
        match factors(&w, n, c.cf) {
            Ok(_) => {}
            Err(Error::OracleMismatch(m)) => return Ok(Err(m)),
            Err(e) => return Err(e),
        }
    }
    Ok(Ok(format!("n = 1..={n_max}")))
}

fn balance(c: &Ctx) -> sturmian_core::Result<Verdicted> {
    let n_max = c.reachable(c.cfg.grids.n_max, |n| certified_prefix_len(c.cf, n));
    let w = mechanical_prefix(c.cf, c.len_of(certified_prefix_len(c.cf, n_max)?)?, c.budget())?;
    for n in 1..=n_max {
        let ones: Vec<usize> = w.symbols().windows(n).map(|s| s.iter().filter(|&&b| b == 1).count()).collect();
        let (lo, hi) = (ones.iter().min(), ones.iter().max());
        if let (Some(lo), Some(hi)) = (lo, hi) {
            if hi - lo > 1 {
                return Ok(Err(format!("length {n} factors carry between {lo} and {hi} ones")));
            }
        }
    }
    Ok(Ok(format!("n = 1..={n_max}")))
}

fn reversal_closed(c: &Ctx) -> sturmian_core::Result<Verdicted> {
    let n_max = c.reachable(c.cfg.grids.n_max, |n| certified_prefix_len(c.cf, n));
    let w = mechanical_prefix(c.cf, c.len_of(certified_prefix_len(c.cf, n_max)?)?, c.budget())?;
    for n in 1..=n_max {
        let set: BTreeSet<&[u8]> = w.symbols().windows(n).collect();
        for f in &set {
            let r: Vec<u8> = f.iter().rev().copied().collect();
            if !set.contains(r.as_slice()) {
                let f = BinaryWord::from_symbols(f.to_vec())?;
                return Ok(Err(format!("reversal of {f} is not a factor")));
            }
        }
    }
    Ok(Ok(format!("n = 1..={n_max}")))
}

fn repetitive_function(c: &Ctx) -> sturmian_core::Result<Verdicted> {
    let n_max = c.reachable(c.cfg.budgets.brute_n, |n| repetitive_prefix_len(c.cf, n));
    let w = mechanical_prefix(c.cf, c.len_of(repetitive_prefix_len(c.cf, n_max)?)?, c.budget())?;
    for n in 1..=n_max {
        let formula = repetitive_formula(c.cf, n as u64)?;
        let brute = repetitive_certified(&w, n, c.cf)?;
        if formula != BigUint::from(brute) {
            return Ok(Err(format!("R({n}): formula {formula}, search {brute}")));
        }
    }
    Ok(Ok(format!("n = 1..={n_max}")))
}

fn branching_indices(c: &Ctx) -> sturmian_core::Result<Verdicted> {
    let bound = c.reachable(c.cfg.budgets.horizon, |n| certified_prefix_len(c.cf, n));
    let len = c.len_of(certified_prefix_len(c.cf, bound)?)?;
    let mut hits = 0;
    for source in [LimitSource::XLimit, LimitSource::YLimit] {
        let prefix = match source {
            LimitSource::XLimit => x_limit_prefix(c.cf, len, c.budget())?,
            LimitSource::YLimit => y_limit_prefix(c.cf, len, c.budget())?,
        };
        let brute = branching_profile_bruteforce(&prefix, bound as u64, c.cf, source)?;
        let closed = branching_profile_closed(c.cf, bound as u64, source)?;
        if brute != closed {
            return Ok(Err(format!("{source:?} profiles differ below {bound}")));
        }
        hits += brute.hits.len();
    }
    Ok(Ok(format!("{hits} branching indices up to {bound}")))
}

fn probe_variants(c: &Ctx) -> Vec<Variant> {
    let mut out = vec![Variant::Unshifted { m: 1 }, Variant::Unshifted { m: 2 }];
    for m in 0..2 {
        if let Ok(a) = c.cf.level_entry(m + 2) {
            out.push(Variant::Shifted { m, j: BigUint::from(1u32) });
            if a > BigUint::from(1u32) {
                out.push(Variant::Shifted { m, j: a });
            }
        }
    }
    out
}

fn language(c: &Ctx, horizon: usize) -> sturmian_core::Result<BinaryWord> {
    let len = c.len_of(certified_prefix_len(c.cf, horizon)?)?;
    x_limit_prefix(c.cf, len, c.budget())
}

fn spectral_indices(c: &Ctx) -> sturmian_core::Result<Verdicted> {
    let horizon = c.reachable(c.cfg.budgets.horizon, |n| certified_prefix_len(c.cf, n));
    let lang = language(c, horizon)?;
    let mut compared = 0;
    for v in probe_variants(c) {
        let spec = ClosedSpec::new(c.cf, &c.t, &v)?;
        if spec.lcp >= BigUint::from(horizon) {
            continue;
        }
        let (x, y) = materialized_pair(c.cf, &v, horizon + 1, c.budget())?;
        let brute: Vec<u64> = spectral_indices_bruteforce(&x, &y, horizon, &lang)?
            .into_iter()
            .map(|n| n as u64)
            .collect();
        if brute != spec.indices_up_to(c.cf, &c.t, horizon as u64)? {
            return Ok(Err(format!("{v:?}: index sets differ below {horizon}")));
        }
        compared += 1;
    }
    Ok(Ok(format!("{compared} pairs up to {horizon}")))
}

fn spectral_distances(c: &Ctx) -> sturmian_core::Result<Verdicted> {
    let ts: Vec<f64> = c.cfg.grids.t.iter().copied().filter(|&t| t > 1.0).collect();
    if ts.is_empty() {
        return Ok(Ok("no t above 1 in the grid".into()));
    }
    let horizon = c.reachable(c.cfg.budgets.horizon, |n| certified_prefix_len(c.cf, n));
    let lang = language(c, horizon)?;
    let mut compared = 0;
    for &t in &ts {
        let w = WeightSpec::new(t)?;
        for v in probe_variants(c) {
            let spec = ClosedSpec::new(c.cf, &c.t, &v)?;
            if spec.lcp >= BigUint::from(horizon) {
                continue;
            }
            let (x, y) = materialized_pair(c.cf, &v, horizon + 1, c.budget())?;
            let brute = d_spectral_bruteforce(&x, &y, &w, horizon, &lang)?;
            let closed = d_spectral_closed(c.cf, &v, &w, None)?.spectral;
            let gap = (brute.value - closed.value).abs();
            if !(brute.rigorous && closed.rigorous && gap <= brute.tail_bound + closed.tail_bound) {
                return Ok(Err(format!(
                    "t = {t}, {v:?}: direct {} vs closed {}",
                    brute.value, closed.value
                )));
            }
            compared += 1;
        }
    }
    Ok(Ok(format!("{compared} distances")))
}

fn decisive(v: Verdict) -> bool {
    v != Verdict::Inconclusive
}

fn banded_consistency(c: &Ctx) -> sturmian_core::Result<Verdicted> {
    let budget = EquivalenceBudget {
        brute_n: c.cfg.budgets.brute_n,
        word_budget: c.budget(),
        p_cap: c.cfg.budgets.p_cap,
    };
    let mut seen = Vec::new();
    for &alpha in &c.cfg.grids.alpha {
        let r = equivalence_report(c.cf, alpha, &budget)?;
        let reference = r.alpha_type;
        let pairs = [
            ("repetitive", r.repetitive.verdict, reference),
            ("finite", r.finite.verdict, reference),
            ("repulsive", r.repulsive.verdict, reference.mirrored()),
        ];
        for (what, got, want) in pairs {
            if decisive(got) && decisive(want) && got != want {
                return Ok(Err(format!(
                    "alpha = {alpha}: {what} verdict {got} against alpha-type {reference}"
                )));
            }
        }
        seen.push(format!("alpha {alpha}: {reference}"));
    }
    Ok(Ok(seen.join("; ")))
}
