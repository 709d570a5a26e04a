//! Repetitive function `R(n)`, border functional `A_{alpha,n}` and power
//! index `Q(n)`, each with a brute-force route, plus the four-way
//! classification of a slope against an exponent `alpha`.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use std::collections::HashMap;

use crate::banding::{BandRule, Verdict};
use crate::cf_engine::{alpha_type_with_rule, convergents, ContinuedFraction, ConvergentTable};
use crate::error::{Error, Result};
use crate::numeric::ln_big;
use crate::words::{certified_prefix_len, factors, x_limit_prefix, BinaryWord, LanguageSlice};

/// `R(n)`: `q_{k+1} + 2 q_k - 1 + (n - q_k)` for the largest `q_k <= n`.
pub fn repetitive_formula(cf: &ContinuedFraction, n: u64) -> Result<BigUint> {
    if n == 0 {
        return Ok(BigUint::zero());
    }
    let t = convergents(cf);
    let n_big = BigUint::from(n);
    let k = t
        .q
        .iter()
        .rposition(|q| q <= &n_big)
        .expect("q_0 = 1 <= n");
    let next = t.q(k + 1).map_err(|_| Error::InsufficientDepth {
        needed: k + 1,
        available: cf.len(),
    })?;
    let qk = &t.q[k];
    Ok(next + qk * 2u32 - 1u32 + (&n_big - qk))
}

/// Largest occurrence gap of any length-`n` factor in `prefix`, plus
/// `n - 1`. Both ends of the prefix count as gap boundaries.
///
/// The prefix must show exactly `n + 1` distinct factors of length `n`.
pub fn repetitive_bruteforce(prefix: &BinaryWord, n: usize) -> Result<u64> {
    let s = prefix.symbols();
    if n == 0 {
        return Ok(0);
    }
    if s.len() < n {
        return Err(Error::IncompleteLanguage {
            n,
            have: s.len(),
            need: n.to_string(),
        });
    }
    // factor -> (last start, largest gap so far)
    let mut seen: HashMap<&[u8], (usize, usize)> = HashMap::new();
    for (i, w) in s.windows(n).enumerate() {
        seen.entry(w)
            .and_modify(|(last, gap)| {
                *gap = (*gap).max(i - *last);
                *last = i;
            })
            .or_insert((i, i + 1));
    }
    if seen.len() != n + 1 {
        return Err(Error::IncompleteLanguage {
            n,
            have: s.len(),
            need: format!("{} distinct factors, found {}", n + 1, seen.len()),
        });
    }
    let worst = seen
        .values()
        .map(|&(last, gap)| gap.max(s.len() - last - n + 1))
        .max()
        .unwrap();
    Ok((worst + n - 1) as u64)
}

/// Prefix length that shows every length-`n` factor together with its
/// longest return: a window of length `R(R(n) + 1)`.
pub fn repetitive_prefix_len(cf: &ContinuedFraction, n: usize) -> Result<BigUint> {
    let span = repetitive_formula(cf, n as u64)? + 1u32;
    let span = span.to_u64().ok_or(Error::BudgetExceeded {
        requested: span.to_string(),
        budget: usize::MAX,
    })?;
    repetitive_formula(cf, span)
}

/// Brute-force `R(n)` on a prefix long enough to certify it, checked
/// against the closed form.
pub fn repetitive_certified(prefix: &BinaryWord, n: usize, cf: &ContinuedFraction) -> Result<u64> {
    let need = repetitive_prefix_len(cf, n)?;
    if BigUint::from(prefix.len()) < need {
        return Err(Error::IncompleteLanguage {
            n,
            have: prefix.len(),
            need: need.to_string(),
        });
    }
    let brute = repetitive_bruteforce(prefix, n)?;
    let formula = repetitive_formula(cf, n as u64)?;
    if BigUint::from(brute) != formula {
        return Err(Error::OracleMismatch(format!(
            "R({n}): brute force {brute}, closed form {formula}"
        )));
    }
    Ok(brute)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepetitivityRow {
    #[serde(serialize_with = "decimal")]
    pub n: BigUint,
    #[serde(serialize_with = "decimal")]
    pub r_formula: BigUint,
    pub r_brute: Option<u64>,
    pub ratio: f64,
    #[serde(skip)]
    pub ln_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepetitivityTable {
    pub alpha: f64,
    pub rows: Vec<RepetitivityRow>,
    pub verdict: Verdict,
}

fn decimal<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn repetitivity_row(t: &ConvergentTable, k: usize, alpha: f64) -> Result<RepetitivityRow> {
    let n = t.q(k)?.clone();
    let r = t.q(k + 1)? + &n * 2u32 - 1u32;
    let ln_ratio = ln_big(&r) - alpha * t.ln_q(k);
    Ok(RepetitivityRow {
        n,
        r_formula: r,
        r_brute: None,
        ratio: ln_ratio.exp(),
        ln_ratio,
    })
}

/// `R(q_k) / q_k^alpha` for `k = 1..=K`, with the band verdict.
pub fn alpha_repetitive_estimate(cf: &ContinuedFraction, alpha: f64, k_max: usize) -> Result<RepetitivityTable> {
    alpha_repetitive_with_rule(cf, alpha, k_max, BandRule::default())
}

pub fn alpha_repetitive_with_rule(
    cf: &ContinuedFraction,
    alpha: f64,
    k_max: usize,
    rule: BandRule,
) -> Result<RepetitivityTable> {
    if k_max + 1 > cf.len() {
        return Err(Error::InsufficientDepth {
            needed: k_max + 1,
            available: cf.len(),
        });
    }
    let t = convergents(cf);
    let rows = (1..=k_max)
        .map(|k| repetitivity_row(&t, k, alpha))
        .collect::<Result<Vec<_>>>()?;
    let ln: Vec<f64> = rows.iter().map(|r| r.ln_ratio).collect();
    Ok(RepetitivityTable {
        alpha,
        verdict: rule.classify(&ln),
        rows,
    })
}

/// Rows for every `n` in `1..=n_max`, with brute-force values when a
/// prefix is supplied.
pub fn repetitive_table(
    cf: &ContinuedFraction,
    alpha: f64,
    n_max: usize,
    prefix: Option<&BinaryWord>,
) -> Result<RepetitivityTable> {
    let mut rows = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let r = repetitive_formula(cf, n as u64)?;
        let r_brute = match prefix {
            Some(p) => Some(repetitive_certified(p, n, cf)?),
            None => None,
        };
        let ln_ratio = ln_big(&r) - alpha * (n as f64).ln();
        rows.push(RepetitivityRow {
            n: BigUint::from(n),
            r_formula: r,
            r_brute,
            ratio: ln_ratio.exp(),
            ln_ratio,
        });
    }
    let ln: Vec<f64> = rows.iter().map(|r| r.ln_ratio).collect();
    Ok(RepetitivityTable {
        alpha,
        verdict: BandRule::default().classify(&ln),
        rows,
    })
}

/// A value of `A_{alpha,n}`; the infimum over an empty set is `Infinite`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AValue {
    Finite(f64),
    Infinite,
}

impl AValue {
    pub fn ln(&self) -> f64 {
        match self {
            AValue::Finite(v) => v.ln(),
            AValue::Infinite => f64::INFINITY,
        }
    }

    pub fn min(self, other: AValue) -> AValue {
        match (self, other) {
            (AValue::Finite(a), AValue::Finite(b)) => AValue::Finite(a.min(b)),
            (AValue::Infinite, x) | (x, AValue::Infinite) => x,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, AValue::Infinite)
    }
}

impl Serialize for AValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            AValue::Finite(v) => s.serialize_f64(*v),
            AValue::Infinite => s.serialize_str("inf"),
        }
    }
}

impl std::fmt::Display for AValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AValue::Finite(v) => write!(f, "{v}"),
            AValue::Infinite => f.write_str("inf"),
        }
    }
}

/// Failure function: `f[i]` is the longest proper border of `w[..=i]`.
pub fn failure_function(w: &[u8]) -> Vec<usize> {
    let mut f = vec![0; w.len()];
    let mut k = 0;
    for i in 1..w.len() {
        while k > 0 && w[i] != w[k] {
            k = f[k - 1];
        }
        if w[i] == w[k] {
            k += 1;
        }
        f[i] = k;
    }
    f
}

fn border_term(n: usize, border: usize, inv_alpha: f64) -> f64 {
    (n - border) as f64 / (border as f64).powf(inv_alpha)
}

/// `inf (|W| - |w|) / |w|^{1/alpha}` over the words `W` of a certified slice
/// and their nonempty proper borders `w`.
pub fn repulsive_a(slice: &LanguageSlice, alpha: f64) -> Result<AValue> {
    slice.require_complete()?;
    Ok(repulsive_a_unchecked(slice, alpha))
}

fn repulsive_a_unchecked(slice: &LanguageSlice, alpha: f64) -> AValue {
    let n = slice.n;
    let mut best = AValue::Infinite;
    if n == 0 {
        return best;
    }
    for w in &slice.factors {
        // the longest border minimizes both factors of the quotient
        let b = failure_function(w.symbols())[n - 1];
        if b > 0 {
            best = best.min(AValue::Finite(border_term(n, b, 1.0 / alpha)));
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepulsiveRow {
    pub n: usize,
    pub a: AValue,
    /// Same functional with exponent one on the border length.
    pub classic: AValue,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepulsivenessTable {
    pub alpha: f64,
    pub rows: Vec<RepulsiveRow>,
    /// Minimum of `A_{alpha,m}` over `m >= n`, per row.
    pub running_min: Vec<AValue>,
    /// Minimum of the classic values over the trailing half of the rows.
    pub classic_ell: AValue,
}

/// `A_{alpha,n}` for `n = 1..=n_max` from one certified prefix.
pub fn repulsiveness_table(
    prefix: &BinaryWord,
    cf: &ContinuedFraction,
    alpha: f64,
    n_max: usize,
) -> Result<RepulsivenessTable> {
    let mut rows = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let slice = factors(prefix, n, cf)?;
        rows.push(RepulsiveRow {
            n,
            a: repulsive_a(&slice, alpha)?,
            classic: repulsive_a(&slice, 1.0)?,
        });
    }
    let mut running_min = vec![AValue::Infinite; rows.len()];
    let mut acc = AValue::Infinite;
    for (i, r) in rows.iter().enumerate().rev() {
        acc = acc.min(r.a);
        running_min[i] = acc;
    }
    let classic_ell = crate::banding::trailing_half(&rows)
        .iter()
        .fold(AValue::Infinite, |m, r| m.min(r.classic));
    Ok(RepulsivenessTable {
        alpha,
        rows,
        running_min,
        classic_ell,
    })
}

/// One row of the power table: `Q(n)` capped at `p_cap`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerRow {
    pub n: usize,
    pub q: u64,
    pub ratio: f64,
    /// The cap bound the value.
    pub capped: bool,
    /// A maximal repetition reached the end of the prefix.
    pub truncated: bool,
}

pub const DEFAULT_P_CAP: u64 = 1_000_000;

/// Largest `p <= p_cap` such that `W^p` occurs in `prefix` for some
/// length-`n` factor `W`.
pub fn power_q(prefix: &BinaryWord, n: usize, p_cap: u64, alpha: f64) -> Result<PowerRow> {
    let s = prefix.symbols();
    if n == 0 || s.len() < n {
        return Err(Error::IncompleteLanguage {
            n,
            have: s.len(),
            need: n.max(1).to_string(),
        });
    }
    let mut best = 0usize;
    let mut truncated = false;
    let mut run = 0usize;
    for j in 0..s.len() - n {
        if s[j] == s[j + n] {
            run += 1;
            best = best.max(run);
        } else {
            run = 0;
        }
    }
    if run > 0 && run == best {
        truncated = true;
    }
    let p = ((best + n) / n) as u64;
    let capped = p >= p_cap;
    let q = p.min(p_cap);
    Ok(PowerRow {
        n,
        q,
        ratio: q as f64 / (n as f64).powf(alpha - 1.0),
        capped,
        truncated,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerTable {
    pub alpha: f64,
    pub rows: Vec<PowerRow>,
}

pub fn power_table(prefix: &BinaryWord, alpha: f64, n_max: usize, p_cap: u64) -> Result<PowerTable> {
    let rows = (1..=n_max)
        .map(|n| power_q(prefix, n, p_cap, alpha))
        .collect::<Result<Vec<_>>>()?;
    Ok(PowerTable { alpha, rows })
}

/// Budgets for [`equivalence_report`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquivalenceBudget {
    /// Largest `n` evaluated by brute force.
    pub brute_n: usize,
    /// Largest prefix materialized for the power index.
    pub word_budget: usize,
    pub p_cap: u64,
}

impl Default for EquivalenceBudget {
    fn default() -> Self {
        EquivalenceBudget {
            brute_n: 40,
            word_budget: 200_000,
            p_cap: DEFAULT_P_CAP,
        }
    }
}

/// Per-level series behind one verdict, in logarithms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelSeries {
    pub levels: Vec<usize>,
    pub ln_values: Vec<f64>,
    pub verdict: Verdict,
}

impl LevelSeries {
    fn new(levels: Vec<usize>, ln_values: Vec<f64>, rule: &BandRule) -> Self {
        let verdict = rule.classify(&ln_values);
        LevelSeries {
            levels,
            ln_values,
            verdict,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub alpha: f64,
    pub repetitive: LevelSeries,
    pub repulsive: LevelSeries,
    pub finite: LevelSeries,
    pub alpha_type: Verdict,
    /// Classic repulsiveness (exponent one), from brute-force rows and
    /// border witnesses.
    pub classic: LevelSeries,
    pub classic_ell: AValue,
    pub classic_verdict: Verdict,
    pub agreement: bool,
}

impl EquivalenceReport {
    pub fn verdicts(&self) -> [Verdict; 4] {
        [
            self.repetitive.verdict,
            self.repulsive.verdict,
            self.finite.verdict,
            self.alpha_type,
        ]
    }
}

/// Upper bounds for `A_{alpha,n}` from explicit border pairs at level `m`:
/// the power pair `(B^a, B^{a-1})` with `|B| = q_{m-1}`, `a = a_m >= 2`,
/// and the nested pair of lengths `(q_{m+2}, q_m)`.
pub fn level_witnesses(
    cf: &ContinuedFraction,
    t: &ConvergentTable,
    m: usize,
    alpha: f64,
) -> Result<Vec<(BigUint, f64)>> {
    let mut out = Vec::new();
    let a = cf.level_entry(m)?;
    if a >= BigUint::from(2u32) {
        let q = t.q(m - 1)?;
        let ln = (1.0 - 1.0 / alpha) * ln_big(q) - ln_big(&(&a - 1u32)) / alpha;
        out.push((&a * q, ln));
    }
    let big = t.q(m + 2)?;
    let small = t.q(m)?;
    let ln = ln_big(&(big - small)) - ln_big(small) / alpha;
    out.push((big.clone(), ln));
    Ok(out)
}

/// Finite-data classification of `cf` against `alpha` by the four
/// equivalent criteria.
///
/// Repulsiveness per level `m` is the smaller of the brute-force minimum of
/// `A_{alpha,n}` over `q_m <= n < q_{m+1}` (where computed) and the
/// explicit witnesses. The power index uses `Q(q_m)` by brute force where
/// the prefix certifies it, and the lower bound `a_{m+1}` beyond.
pub fn equivalence_report(
    cf: &ContinuedFraction,
    alpha: f64,
    budget: &EquivalenceBudget,
) -> Result<EquivalenceReport> {
    let rule = BandRule::default();
    let t = convergents(cf);
    if cf.len() < 4 {
        return Err(Error::InsufficientDepth {
            needed: 4,
            available: cf.len(),
        });
    }
    let top = cf.len() - 2; // levels need q_{m+2}
    let levels: Vec<usize> = (1..=top).collect();

    let rep: Vec<f64> = levels
        .iter()
        .map(|&k| repetitivity_row(&t, k, alpha).map(|r| r.ln_ratio))
        .collect::<Result<_>>()?;

    let brute_n = budget.brute_n.min(t.q_u64(top).unwrap_or(u64::MAX) as usize);
    let need = certified_prefix_len(cf, brute_n)?
        .to_usize()
        .unwrap_or(usize::MAX);
    let prefix = x_limit_prefix(cf, need, budget.word_budget.max(need))?;
    let table = repulsiveness_table(&prefix, cf, alpha, brute_n)?;

    let level_of = |n: usize| t.q.iter().rposition(|q| q <= &BigUint::from(n)).unwrap();
    let per_level = |alpha_eff: f64, pick: &dyn Fn(&RepulsiveRow) -> AValue| -> Result<Vec<f64>> {
        let mut vals = vec![f64::INFINITY; top + 1];
        for r in &table.rows {
            let m = level_of(r.n);
            if m <= top {
                vals[m] = vals[m].min(pick(r).ln());
            }
        }
        for &m in &levels {
            for (_, ln) in level_witnesses(cf, &t, m, alpha_eff)? {
                vals[m] = vals[m].min(ln);
            }
        }
        Ok(levels.iter().map(|&m| vals[m]).collect())
    };
    let repulsive = per_level(alpha, &|r| r.a)?;
    let classic = per_level(1.0, &|r| r.classic)?;

    // longest x-limit prefix the stored entries determine
    let x_reach = t.q(2 * (cf.len() / 2))?.clone();
    let mut fin = Vec::with_capacity(levels.len());
    for &m in &levels {
        let qm = t.q(m)?;
        let a_next = cf.level_entry(m + 1)?;
        let mut ln_q = ln_big(&a_next);
        let span = (&a_next + 2u32) * qm + qm;
        if span > x_reach {
            fin.push(ln_q - (alpha - 1.0) * t.ln_q(m));
            continue;
        }
        if let (Some(n), Some(len)) = (qm.to_usize(), span.to_usize()) {
            if len <= budget.word_budget {
                let word = x_limit_prefix(cf, len, budget.word_budget)?;
                let row = power_q(&word, n, budget.p_cap, alpha)?;
                ln_q = ln_q.max((row.q as f64).ln());
            }
        }
        fin.push(ln_q - (alpha - 1.0) * t.ln_q(m));
    }

    let alpha_type = alpha_type_with_rule(cf, alpha, rule)?.verdict;
    let repetitive = LevelSeries::new(levels.clone(), rep, &rule);
    let repulsive = LevelSeries::new(levels.clone(), repulsive, &rule);
    let finite = LevelSeries::new(levels.clone(), fin, &rule);
    let classic = LevelSeries::new(levels, classic, &rule);
    let classic_ell = table.classic_ell;
    let classic_verdict = match classic_ell {
        AValue::Finite(v) if v < rule.lower => Verdict::Vanishing,
        _ => Verdict::BoundedPositive,
    };
    let agreement = repetitive.verdict == alpha_type
        && finite.verdict == alpha_type
        && repulsive.verdict == alpha_type.mirrored();
    Ok(EquivalenceReport {
        alpha,
        repetitive,
        repulsive,
        finite,
        alpha_type,
        classic,
        classic_ell,
        classic_verdict,
        agreement,
    })
}
