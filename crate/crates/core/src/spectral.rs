//! The weighted ultrametric `d_delta`, the spectral metric `d_{s,delta}` with
//! `delta_n = n^{-t}`, and the psi/phi probes built on the closed forms of
//! the spectral distance along the distinguished sequences of the limit
//! words `x` and `y`.
//!
//! Closed forms are indexed by a level `m`:
//!
//! * unshifted, `m >= 1`: the pair `(x, sigma^{q_{m-1}} y)` for even `m`,
//!   `(sigma^{q_{m-1}} x, y)` for odd `m`; the common prefix has length `q_m`.
//! * shifted, `m >= 0`, `1 <= j <= a_{m+2}`: the pair
//!   `(x, sigma^{s} y)` for even `m`, `(sigma^{s} x, y)` for odd `m`, with
//!   `s = (a_{m+2} - j + 1) q_{m+1}`; the common prefix has length
//!   `j q_{m+1} + q_m`.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::banding::{BandRule, Verdict};
use crate::cf_engine::{convergents, ContinuedFraction, ConvergentTable};
use crate::error::{Error, Result};
use crate::numeric::{ln_add, ln_big, ls_slope, power_sum, LogSum};
use crate::words::{right_special_prefixes, x_limit_prefix, y_limit_prefix, BinaryWord, LimitSource};

/// `delta_n = n^{-t}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightSpec {
    pub t: f64,
}

impl WeightSpec {
    pub fn new(t: f64) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::InvalidArgument(format!("weight exponent must be positive, got {t}")));
        }
        Ok(WeightSpec { t })
    }

    pub fn delta(&self, n: u64) -> f64 {
        (n as f64).powf(-self.t)
    }

    pub fn ln_delta(&self, n: &BigUint) -> f64 {
        -self.t * ln_big(n)
    }
}

/// A distance evaluation; when `rigorous`, the true value lies in
/// `[value, value + tail_bound]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricValue {
    pub value: f64,
    pub ln_value: f64,
    pub tail_bound: f64,
    pub rigorous: bool,
    /// Set when the partial sums show no sign of converging.
    pub divergent: bool,
}

impl MetricValue {
    fn from_ln(ln_value: f64, tail_bound: f64, rigorous: bool) -> Self {
        MetricValue {
            value: ln_value.exp(),
            ln_value,
            tail_bound,
            rigorous,
            divergent: false,
        }
    }

    pub fn zero() -> Self {
        MetricValue::from_ln(f64::NEG_INFINITY, 0.0, true)
    }

    /// True when both values are rigorous and their intervals overlap.
    pub fn agrees_with(&self, other: &MetricValue) -> bool {
        self.rigorous
            && other.rigorous
            && (self.value - other.value).abs() <= self.tail_bound + other.tail_bound + 1e-12 * self.value.abs()
    }
}

/// `delta_{max(1, lcp)}`.
pub fn d_ultra(v: &BinaryWord, w: &BinaryWord, weights: &WeightSpec) -> Result<f64> {
    let lcp = v.lcp(w);
    if lcp == v.len().min(w.len()) {
        return Err(Error::Unresolved(lcp));
    }
    Ok(weights.delta(lcp.max(1) as u64))
}

/// Indices `n` contributing to the spectral distance of `v` and `w` up to
/// `horizon`: the common prefix length once, then every `n` beyond it whose
/// length-`n` prefix of `v` (and, separately, of `w`) is right special in
/// the language witnessed by `language`.
pub fn spectral_indices_bruteforce(
    v: &BinaryWord,
    w: &BinaryWord,
    horizon: usize,
    language: &BinaryWord,
) -> Result<Vec<usize>> {
    let lcp = v.lcp(w);
    if lcp == v.len().min(w.len()) {
        return Err(Error::Unresolved(lcp));
    }
    let lcp = lcp.max(1);
    let mut out = vec![lcp];
    if horizon > lcp {
        for z in [v, w] {
            let flags = right_special_prefixes(z, language, horizon)?;
            out.extend((lcp + 1..=horizon).filter(|&n| flags[n]));
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Spectral distance summed directly up to `horizon`.
///
/// For `t > 1` the remainder is at most `2 H^{1-t} / (t - 1)` with
/// `H = max(horizon, lcp)`; for `t <= 1` no tail bound is available and
/// the value is flagged non-rigorous.
pub fn d_spectral_bruteforce(
    v: &BinaryWord,
    w: &BinaryWord,
    weights: &WeightSpec,
    horizon: usize,
    language: &BinaryWord,
) -> Result<MetricValue> {
    if v == w {
        return Ok(MetricValue::zero());
    }
    let idx = spectral_indices_bruteforce(v, w, horizon, language)?;
    let mut sum = LogSum::new();
    for &n in &idx {
        sum.add_ln(-weights.t * (n as f64).ln());
    }
    let h = horizon.max(idx[0]) as f64;
    let t = weights.t;
    if t > 1.0 {
        Ok(MetricValue::from_ln(sum.ln(), 2.0 * h.powf(1.0 - t) / (t - 1.0), true))
    } else {
        Ok(MetricValue::from_ln(sum.ln(), f64::INFINITY, false))
    }
}

/// Which closed form to evaluate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "variant", rename_all = "kebab-case")]
pub enum Variant {
    Unshifted { m: usize },
    Shifted {
        m: usize,
        #[serde(serialize_with = "decimal")]
        j: BigUint,
    },
}

/// Resolved data of one closed form:
/// `sum_{l=j+1}^{a_{m+2}} delta_{l q_{m+1} + q_m}` (shifted only) plus
/// `sum_{k >= k0} sum_{l=1}^{a_{k+1}} delta_{l q_k + q_{k-1} - [k - k0 even] shift}`,
/// plus, when `shift >= 2`, the cross terms
/// `sum_{k - k0 odd} sum_{l=1}^{a_{k+1}} delta_{l q_k + q_{k-1} - shift}`.
///
/// The cross terms come from the unshifted limit word: the two limit words
/// differ only in their first two symbols, so a right special prefix of one
/// of length `p` makes `p - shift` right special for the shifted other one.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedSpec {
    pub variant: Variant,
    pub source: LimitSource,
    pub lcp: BigUint,
    pub k0: usize,
    pub shift: BigUint,
    first_block: Option<(BigUint, BigUint, BigUint, BigUint)>,
}

impl ClosedSpec {
    pub fn new(cf: &ContinuedFraction, t: &ConvergentTable, variant: &Variant) -> Result<Self> {
        if !cf.is_normalized() {
            return Err(Error::NotNormalized);
        }
        let source = |m: usize| if m % 2 == 0 { LimitSource::XLimit } else { LimitSource::YLimit };
        match variant {
            Variant::Unshifted { m } => {
                let m = *m;
                if m == 0 {
                    return Err(Error::InvalidArgument("unshifted level starts at 1".into()));
                }
                Ok(ClosedSpec {
                    variant: variant.clone(),
                    source: source(m),
                    lcp: t.q(m)?.clone(),
                    k0: m,
                    shift: t.q(m - 1)?.clone(),
                    first_block: None,
                })
            }
            Variant::Shifted { m, j } => {
                let m = *m;
                let a = cf.level_entry(m + 2)?;
                if j.is_zero() || j > &a {
                    return Err(Error::InvalidArgument(format!("j must lie in 1..={a}")));
                }
                let step = t.q(m + 1)?.clone();
                let base = t.q(m)?.clone();
                Ok(ClosedSpec {
                    variant: variant.clone(),
                    source: source(m),
                    lcp: j * &step + &base,
                    k0: m + 2,
                    shift: (&a - j + 1u32) * &step,
                    first_block: Some((step, base, j + 1u32, a)),
                })
            }
        }
    }

    /// Additive offsets of level `k`; each contributes `l q_k + offset`
    /// for `l = 1..=a_{k+1}`.
    fn offsets(&self, t: &ConvergentTable, k: usize) -> Result<Vec<BigInt>> {
        let base = BigInt::from(t.q(k - 1)?.clone());
        let shifted = &base - BigInt::from(self.shift.clone());
        Ok(if (k - self.k0) % 2 == 0 {
            vec![shifted]
        } else if self.shift >= BigUint::from(2u32) {
            vec![base, shifted]
        } else {
            vec![base]
        })
    }

    /// Number of additive offsets per level at most.
    fn width(&self) -> f64 {
        if self.shift >= BigUint::from(2u32) {
            2.0
        } else {
            1.0
        }
    }

    /// All contributing indices not exceeding `bound`, sorted.
    pub fn indices_up_to(&self, cf: &ContinuedFraction, t: &ConvergentTable, bound: u64) -> Result<Vec<u64>> {
        let bound_big = BigInt::from(bound);
        let mut out = Vec::new();
        if let Some((step, base, from, to)) = &self.first_block {
            let mut l = from.clone();
            while &l <= to {
                let idx = BigInt::from(&l * step + base);
                if idx > bound_big {
                    break;
                }
                out.push(idx.to_u64().unwrap());
                l += 1u32;
            }
        }
        let mut k = self.k0;
        while k < cf.len() && t.q(k)? <= &BigUint::from(bound) {
            let q = BigInt::from(t.q(k)?.clone());
            let a = BigInt::from(cf.level_entry(k + 1)?);
            for b in self.offsets(t, k)? {
                let mut l = BigInt::one();
                while l <= a {
                    let idx = &l * &q + &b;
                    if idx > bound_big {
                        break;
                    }
                    out.push(idx.to_u64().unwrap());
                    l += 1;
                }
            }
            k += 1;
        }
        if k >= cf.len() && t.q(k)? <= &BigUint::from(bound) {
            return Err(Error::InsufficientDepth {
                needed: k + 1,
                available: cf.len(),
            });
        }
        out.sort_unstable();
        Ok(out)
    }
}

/// A closed-form evaluation with its per-level increments.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedDistance {
    pub variant: Variant,
    pub source: LimitSource,
    pub spectral: MetricValue,
    /// `ln delta_lcp`, the matching ultrametric distance.
    pub ln_ultra: f64,
    #[serde(serialize_with = "decimal")]
    pub lcp: BigUint,
    /// Levels `k0..K` summed.
    pub levels: Vec<usize>,
    /// Logarithm of each level's contribution.
    pub ln_increments: Vec<f64>,
}

fn decimal<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// Closed-form spectral distance truncated before level `k_max` (default:
/// every stored entry).
pub fn d_spectral_closed(
    cf: &ContinuedFraction,
    variant: &Variant,
    weights: &WeightSpec,
    k_max: Option<usize>,
) -> Result<ClosedDistance> {
    let t = convergents(cf);
    closed_with_table(cf, &t, variant, weights, k_max)
}

fn closed_with_table(
    cf: &ContinuedFraction,
    t: &ConvergentTable,
    variant: &Variant,
    weights: &WeightSpec,
    k_max: Option<usize>,
) -> Result<ClosedDistance> {
    let spec = ClosedSpec::new(cf, t, variant)?;
    let big_k = k_max.unwrap_or(cf.len()).min(cf.len());
    if big_k <= spec.k0 {
        return Err(Error::InsufficientDepth {
            needed: spec.k0 + 1,
            available: big_k,
        });
    }
    let tt = weights.t;
    let mut total = LogSum::new();
    let mut rel_err: f64 = 0.0;
    if let Some((step, base, from, to)) = &spec.first_block {
        let s = power_sum(step, &BigInt::from(base.clone()), from, to, tt);
        total.add_ln(s.ln);
        rel_err = rel_err.max(s.rel_err);
    }
    let mut levels = Vec::new();
    let mut incs = Vec::new();
    for k in spec.k0..big_k {
        let a = cf.level_entry(k + 1)?;
        let mut level = LogSum::new();
        for b in spec.offsets(t, k)? {
            let s = power_sum(t.q(k)?, &b, &BigUint::one(), &a, tt);
            level.add_ln(s.ln);
            rel_err = rel_err.max(s.rel_err);
        }
        total.add_ln(level.ln());
        levels.push(k);
        incs.push(level.ln());
    }
    let ln_value = total.ln();
    let value = ln_value.exp();
    let truncation = rel_err * value;
    let mut mv = if tt > 1.0 {
        // levels k >= K carry nonnegative offsets; each sum is at most
        // zeta(t) q_k^{-t} <= t/(t-1) q_k^{-t}, and q_{k+2} >= 2 q_k
        let ln_tail =
            t.ln_q(big_k) * -tt + (2.0 * spec.width() * tt / (tt - 1.0) / (1.0 - 2f64.powf(-tt))).ln();
        MetricValue::from_ln(ln_value, ln_tail.exp() + truncation, true)
    } else {
        let last = incs.last().copied().unwrap_or(f64::NEG_INFINITY).exp();
        MetricValue::from_ln(ln_value, last + truncation, false)
    };
    if tt <= 1.0 {
        mv.divergent = increments_verdict(&levels, &incs, t).verdict == SeriesVerdict::Divergent;
    }
    Ok(ClosedDistance {
        variant: variant.clone(),
        source: spec.source,
        spectral: mv,
        ln_ultra: weights.ln_delta(&spec.lcp),
        lcp: spec.lcp,
        levels,
        ln_increments: incs,
    })
}

/// The two words a closed form describes, materialized to at least `len`
/// symbols each.
pub fn materialized_pair(
    cf: &ContinuedFraction,
    variant: &Variant,
    len: usize,
    budget: usize,
) -> Result<(BinaryWord, BinaryWord)> {
    let t = convergents(cf);
    let spec = ClosedSpec::new(cf, &t, variant)?;
    let shift = spec.shift.to_usize().ok_or(Error::BudgetExceeded {
        requested: spec.shift.to_string(),
        budget,
    })?;
    let x = x_limit_prefix(cf, len + shift, budget)?;
    let y = y_limit_prefix(cf, len + shift, budget)?;
    Ok(match spec.source {
        LimitSource::XLimit => (x.prefix(len + shift), y.shift(shift)),
        LimitSource::YLimit => (x.shift(shift), y.prefix(len + shift)),
    })
}

/// `phi(m, j, r, t) = (j q_{m+1} + q_m)^{tr} sum_{l=j}^{a_{m+2}} (l q_{m+1} + q_m)^{-t}`,
/// as a logarithm with relative error bound.
pub fn phi(cf: &ContinuedFraction, m: usize, j: &BigUint, r: f64, t: f64) -> Result<crate::numeric::LnBounded> {
    let tab = convergents(cf);
    phi_with_table(cf, &tab, m, j, r, t)
}

fn phi_with_table(
    cf: &ContinuedFraction,
    tab: &ConvergentTable,
    m: usize,
    j: &BigUint,
    r: f64,
    t: f64,
) -> Result<crate::numeric::LnBounded> {
    let a = cf.level_entry(m + 2)?;
    if j.is_zero() || j > &a {
        return Err(Error::InvalidArgument(format!("j must lie in 1..={a}")));
    }
    let step = tab.q(m + 1)?;
    let base = tab.q(m)?;
    let s = power_sum(step, &BigInt::from(base.clone()), j, &a, t);
    Ok(crate::numeric::LnBounded {
        ln: t * r * ln_big(&(j * step + base)) + s.ln,
        rel_err: s.rel_err,
    })
}

/// `rho_alpha(t)`: 0 up to `1 - 1/alpha`, then `1 - (alpha-1)/(alpha t)`
/// until `t = 1`, then `1/alpha`.
pub fn varrho(alpha: f64, t: f64) -> f64 {
    if t <= 1.0 - 1.0 / alpha {
        0.0
    } else if t < 1.0 {
        1.0 - (alpha - 1.0) / (alpha * t)
    } else {
        1.0 / alpha
    }
}

const FULL_SCAN: u64 = 4096;
const GRID_POINTS: usize = 256;

/// Values of `j` examined for the supremum over `1..=a`: all of them up to
/// 4096, otherwise a logarithmic grid together with `a` and `ceil(a/2)`.
pub fn j_candidates(a: &BigUint) -> Vec<BigUint> {
    if let Some(small) = a.to_u64().filter(|&v| v <= FULL_SCAN) {
        return (1..=small).map(BigUint::from).collect();
    }
    let ln_a = ln_big(a);
    let mut out: Vec<BigUint> = (0..GRID_POINTS)
        .map(|i| crate::numeric::big_from_ln(ln_a * i as f64 / (GRID_POINTS - 1) as f64).max(BigUint::one()))
        .map(|j| j.min(a.clone()))
        .collect();
    out.push(a.clone());
    out.push((a + 1u32) / 2u32);
    out.sort();
    out.dedup();
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsiRow {
    pub m: usize,
    pub source: LimitSource,
    /// `q_m`, the common prefix length of the unshifted pair.
    #[serde(serialize_with = "decimal")]
    pub q: BigUint,
    /// `ln psi` of the unshifted pair.
    pub ln_psi: f64,
    /// `ln sup_j psi^{(j)}` over the shifted pairs at this level.
    pub ln_sup_j_psi: Option<f64>,
    #[serde(serialize_with = "decimal_opt")]
    pub argmax_j: Option<BigUint>,
    pub rigorous: bool,
}

fn decimal_opt<S: serde::Serializer>(v: &Option<BigUint>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_str(&v.to_string()),
        None => s.serialize_none(),
    }
}

impl PsiRow {
    /// The larger of the unshifted and best shifted value.
    pub fn ln_level_max(&self) -> f64 {
        self.ln_sup_j_psi.map_or(self.ln_psi, |s| s.max(self.ln_psi))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsiSeries {
    pub t: f64,
    pub r: f64,
    pub rows: Vec<PsiRow>,
}

/// `ln psi = ln d_s + r t ln lcp`.
fn ln_psi(d: &ClosedDistance, r: f64, t: f64) -> f64 {
    d.spectral.ln_value + r * t * ln_big(&d.lcp)
}

/// psi rows for the levels in `m_range`. Shifted values use every level
/// below the stored depth.
pub fn psi_series(
    cf: &ContinuedFraction,
    weights: &WeightSpec,
    r: f64,
    m_range: std::ops::RangeInclusive<usize>,
    include_shifted: bool,
) -> Result<PsiSeries> {
    let tab = convergents(cf);
    let mut rows = Vec::new();
    for m in m_range {
        let un = closed_with_table(cf, &tab, &Variant::Unshifted { m }, weights, None)?;
        let mut rigorous = un.spectral.rigorous;
        let (mut best, mut arg) = (None::<f64>, None);
        if include_shifted {
            let a = cf.level_entry(m + 2)?;
            for j in j_candidates(&a) {
                let d = closed_with_table(cf, &tab, &Variant::Shifted { m, j: j.clone() }, weights, None)?;
                let v = ln_psi(&d, r, weights.t);
                rigorous &= d.spectral.rigorous;
                if best.map_or(true, |b| v > b) {
                    best = Some(v);
                    arg = Some(j);
                }
            }
        }
        rows.push(PsiRow {
            m,
            source: un.source,
            q: tab.q(m)?.clone(),
            ln_psi: ln_psi(&un, r, weights.t),
            ln_sup_j_psi: best,
            argmax_j: arg,
            rigorous,
        });
    }
    Ok(PsiSeries {
        t: weights.t,
        r,
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularityVerdict {
    pub alpha: f64,
    pub t: f64,
    pub r: f64,
    pub trend: Verdict,
    /// Least-squares slope of `ln psi` against `ln q_{m+1}`.
    pub slope: Option<f64>,
    pub ln_first: f64,
    pub ln_last: f64,
    pub window_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularityReport {
    pub alpha: f64,
    pub t: f64,
    pub r_star: f64,
    pub verdicts: Vec<RegularityVerdict>,
    /// Largest grid point judged vanishing and smallest judged divergent.
    pub r_lo: Option<f64>,
    pub r_hi: Option<f64>,
    pub transition_matches: bool,
}

/// Classifies, for each `r`, the per-level maximum of the unshifted and
/// shifted psi values over `m_range`, and locates the transition.
pub fn regularity_probe(
    cf: &ContinuedFraction,
    alpha: f64,
    weights: &WeightSpec,
    r_grid: &[f64],
    m_range: std::ops::RangeInclusive<usize>,
) -> Result<RegularityReport> {
    if !(alpha > 1.0) || r_grid.is_empty() {
        return Err(Error::InvalidArgument("regularity probe needs alpha > 1 and a nonempty grid".into()));
    }
    let tab = convergents(cf);
    let rule = BandRule::default();
    let mut verdicts = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        let series = psi_series(cf, weights, r, m_range.clone(), true)?;
        let ys: Vec<f64> = series.rows.iter().map(PsiRow::ln_level_max).collect();
        let xs: Vec<f64> = series.rows.iter().map(|row| tab.ln_q(row.m + 1)).collect();
        verdicts.push(regularity_verdict(alpha, weights.t, r, &ys, &xs, &rule));
    }
    let r_star = varrho(alpha, weights.t);
    let r_lo = verdicts
        .iter()
        .filter(|v| v.trend == Verdict::Vanishing)
        .map(|v| v.r)
        .fold(None, |m: Option<f64>, r| Some(m.map_or(r, |m| m.max(r))));
    let r_hi = verdicts
        .iter()
        .filter(|v| v.trend == Verdict::Divergent)
        .map(|v| v.r)
        .fold(None, |m: Option<f64>, r| Some(m.map_or(r, |m| m.min(r))));
    let transition_matches = matches!((r_lo, r_hi), (Some(lo), Some(hi)) if lo <= r_star && r_star <= hi);
    Ok(RegularityReport {
        alpha,
        t: weights.t,
        r_star,
        verdicts,
        r_lo,
        r_hi,
        transition_matches,
    })
}

pub fn regularity_verdict(alpha: f64, t: f64, r: f64, ys: &[f64], xs: &[f64], rule: &BandRule) -> RegularityVerdict {
    let (trend, slope) = rule.classify_with_trend(ys, xs);
    let w = crate::banding::window_stats(ys);
    RegularityVerdict {
        alpha,
        t,
        r,
        trend,
        slope,
        ln_first: ys.first().copied().unwrap_or(f64::NAN),
        ln_last: ys.last().copied().unwrap_or(f64::NAN),
        window_ratio: w.map_or(f64::NAN, |w| (w.ln_max - w.ln_min).exp()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeriesVerdict {
    Convergent,
    Divergent,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FinitenessReport {
    pub t: f64,
    pub levels: Vec<usize>,
    pub ln_increments: Vec<f64>,
    pub ln_partial_sums: Vec<f64>,
    /// Slope of `ln increment` against `ln q_k`.
    pub slope: Option<f64>,
    pub verdict: SeriesVerdict,
}

const DECAY_SLOPE: f64 = -0.05;
const FLOOR: f64 = 0.01;

fn increments_verdict(levels: &[usize], incs: &[f64], tab: &ConvergentTable) -> FinitenessReport {
    let xs: Vec<f64> = levels.iter().map(|&k| tab.ln_q(k)).collect();
    let slope = ls_slope(&xs, incs);
    let mut partial = Vec::with_capacity(incs.len());
    let mut acc = f64::NEG_INFINITY;
    for &x in incs {
        acc = ln_add(acc, x);
        partial.push(acc);
    }
    let tail = crate::banding::trailing_half(incs);
    let tail_min = tail.iter().cloned().fold(f64::INFINITY, f64::min);
    let verdict = match (slope, incs.last(), partial.last()) {
        (Some(s), _, _) if s >= DECAY_SLOPE && tail_min >= FLOOR.ln() => SeriesVerdict::Divergent,
        (Some(s), Some(&last), Some(&sum)) if s < DECAY_SLOPE && last - sum < FLOOR.ln() => SeriesVerdict::Convergent,
        _ => SeriesVerdict::Inconclusive,
    };
    FinitenessReport {
        t: f64::NAN,
        levels: levels.to_vec(),
        ln_increments: incs.to_vec(),
        ln_partial_sums: partial,
        slope,
        verdict,
    }
}

/// Per-level increments of the unshifted series at level `m` and a
/// convergence verdict: divergent when the increments stay bounded below
/// without decaying, convergent when they decay and the last one is
/// negligible against the partial sum.
pub fn metric_finiteness_probe(cf: &ContinuedFraction, weights: &WeightSpec, m: usize) -> Result<FinitenessReport> {
    let tab = convergents(cf);
    let d = closed_with_table(cf, &tab, &Variant::Unshifted { m }, weights, None)?;
    let mut report = increments_verdict(&d.levels, &d.ln_increments, &tab);
    report.t = weights.t;
    Ok(report)
}
