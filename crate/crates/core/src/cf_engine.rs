//! Continued fractions with exact convergents.
//!
//! A [`ContinuedFraction`] stores the full entry list of a slope
//! `theta = [0; e_1, e_2, ...]`. Slopes in `(0, 1/2)` have `e_1 >= 2`; the
//! word-level machinery reads its level entries through
//! [`ContinuedFraction::level_entry`], which lowers the first entry by one.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{Float, One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;

use crate::banding::{window_stats, BandRule, Verdict, WindowStats};
use crate::error::{Error, Result};
use crate::numeric::{big_from_ln, ln_big};

/// Golden ratio.
pub const GOLDEN: f64 = 1.618_033_988_749_895;

/// Where an entry list came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CfKind {
    Explicit,
    Synthesized { alpha: f64, c: f64 },
    Random { seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuedFraction {
    #[serde(with = "decimal_list")]
    entries: Vec<BigUint>,
    #[serde(flatten)]
    kind: CfKind,
}

impl ContinuedFraction {
    pub fn new(entries: Vec<BigUint>, kind: CfKind) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidEntries("empty entry list".into()));
        }
        if let Some(i) = entries.iter().position(|e| e.is_zero()) {
            return Err(Error::InvalidEntries(format!("entry {} is zero", i + 1)));
        }
        Ok(ContinuedFraction { entries, kind })
    }

    pub fn explicit(entries: &[u64]) -> Result<Self> {
        Self::new(entries.iter().map(|&e| BigUint::from(e)).collect(), CfKind::Explicit)
    }

    /// `[2, 1, 1, ...]` with `len` entries: the slope `(3 - sqrt 5)/2`.
    pub fn fibonacci(len: usize) -> Self {
        let mut e = vec![1u64; len.max(1)];
        e[0] = 2;
        Self::explicit(&e).unwrap()
    }

    /// Random entries, uniform in `1..=max_entry`, reproducible from `seed`.
    /// With `normalized` set the first entry is at least 2.
    pub fn random(seed: u64, len: usize, max_entry: u64, normalized: bool) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let max_entry = max_entry.max(2);
        let entries = (0..len.max(1))
            .map(|i| {
                let lo = if i == 0 && normalized { 2 } else { 1 };
                BigUint::from(rng.gen_range(lo..=max_entry))
            })
            .collect();
        ContinuedFraction {
            entries,
            kind: CfKind::Random { seed },
        }
    }

    pub fn entries(&self) -> &[BigUint] {
        &self.entries
    }

    pub fn kind(&self) -> &CfKind {
        &self.kind
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Stored entry `e_i`, 1-based.
    pub fn entry(&self, i: usize) -> Result<&BigUint> {
        if i == 0 || i > self.entries.len() {
            return Err(Error::InsufficientDepth {
                needed: i,
                available: self.entries.len(),
            });
        }
        Ok(&self.entries[i - 1])
    }

    /// True when the slope lies below one half (first entry at least 2).
    pub fn is_normalized(&self) -> bool {
        self.entries[0] >= BigUint::from(2u32)
    }

    /// Level entry `a_i` of the normalized slope: the stored entry, except
    /// that the first one is lowered by one.
    pub fn level_entry(&self, i: usize) -> Result<BigUint> {
        let e = self.entry(i)?;
        if i == 1 {
            if !self.is_normalized() {
                return Err(Error::NotNormalized);
            }
            Ok(e - 1u32)
        } else {
            Ok(e.clone())
        }
    }

    /// Truncated copy with the first `len` entries.
    pub fn truncated(&self, len: usize) -> Result<Self> {
        if len == 0 || len > self.len() {
            return Err(Error::InsufficientDepth {
                needed: len,
                available: self.len(),
            });
        }
        Ok(ContinuedFraction {
            entries: self.entries[..len].to_vec(),
            kind: self.kind.clone(),
        })
    }

    pub fn convergents(&self) -> ConvergentTable {
        convergents(self)
    }
}

impl fmt::Display for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[0; ")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "]")
    }
}

mod decimal_list {
    use num_bigint::BigUint;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|e| e.to_str_radix(10)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigUint>, D::Error> {
        let raw: Vec<String> = Vec::deserialize(d)?;
        raw.iter()
            .map(|s| {
                BigUint::parse_bytes(s.as_bytes(), 10)
                    .ok_or_else(|| D::Error::custom(format!("not a decimal integer: {s:?}")))
            })
            .collect()
    }
}

/// Numerators and denominators of the convergents, `p_0..p_N`, `q_0..q_N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergentTable {
    #[serde(with = "decimal_list")]
    pub p: Vec<BigUint>,
    #[serde(with = "decimal_list")]
    pub q: Vec<BigUint>,
    #[serde(skip)]
    ln_q: Vec<f64>,
}

pub fn convergents(cf: &ContinuedFraction) -> ConvergentTable {
    let n = cf.len();
    let mut p = Vec::with_capacity(n + 1);
    let mut q = Vec::with_capacity(n + 1);
    // seeds p_{-1} = 1, q_{-1} = 0
    let (mut p_prev, mut q_prev) = (BigUint::one(), BigUint::zero());
    p.push(BigUint::zero());
    q.push(BigUint::one());
    for a in cf.entries() {
        let pn = a * p.last().unwrap() + &p_prev;
        let qn = a * q.last().unwrap() + &q_prev;
        p_prev = p.last().unwrap().clone();
        q_prev = q.last().unwrap().clone();
        p.push(pn);
        q.push(qn);
    }
    let ln_q = q.iter().map(ln_big).collect();
    ConvergentTable { p, q, ln_q }
}

impl ConvergentTable {
    /// Largest index `N` (the table holds `N + 1` rows).
    pub fn depth(&self) -> usize {
        self.q.len() - 1
    }

    pub fn q(&self, k: usize) -> Result<&BigUint> {
        self.q.get(k).ok_or(Error::InsufficientDepth {
            needed: k,
            available: self.depth(),
        })
    }

    pub fn p(&self, k: usize) -> Result<&BigUint> {
        self.p.get(k).ok_or(Error::InsufficientDepth {
            needed: k,
            available: self.depth(),
        })
    }

    /// `q_k` with the convention `q_{-1} = 0`.
    pub fn q_signed(&self, k: isize) -> Result<BigUint> {
        if k < 0 {
            Ok(BigUint::zero())
        } else {
            self.q(k as usize).cloned()
        }
    }

    pub fn ln_q(&self, k: usize) -> f64 {
        self.ln_q[k]
    }

    pub fn q_u64(&self, k: usize) -> Option<u64> {
        self.q.get(k).and_then(|x| x.to_u64())
    }

    /// Checks recursion, coprimality, monotonicity and the golden growth
    /// bound `q_{k+j} > q_k gamma^j / (2 sqrt 5)` against `cf`.
    pub fn check_invariants(&self, cf: &ContinuedFraction) -> Result<()> {
        let fail = |m: String| Err(Error::OracleMismatch(m));
        if self.q.len() != cf.len() + 1 || self.p.len() != cf.len() + 1 {
            return fail("table length".into());
        }
        if self.q[0] != BigUint::one() || !self.p[0].is_zero() {
            return fail("base row".into());
        }
        if self.p[1] != BigUint::one() || &self.q[1] != cf.entry(1)? {
            return fail("first row".into());
        }
        for n in 2..self.q.len() {
            let a = cf.entry(n)?;
            if self.q[n] != a * &self.q[n - 1] + &self.q[n - 2]
                || self.p[n] != a * &self.p[n - 1] + &self.p[n - 2]
            {
                return fail(format!("recursion at {n}"));
            }
        }
        for n in 0..self.q.len() {
            if !self.p[n].gcd(&self.q[n]).is_one() {
                return fail(format!("gcd at {n}"));
            }
        }
        for n in 1..self.depth() {
            if self.q[n + 1] <= self.q[n] {
                return fail(format!("monotonicity at {n}"));
            }
        }
        // gamma^j / (2 sqrt 5) stays below 1 for j <= 3; beyond that the
        // bound is checked in integers via Fibonacci numbers: q_{k+j} >=
        // F_{j+1} q_k, and F_{j+1} > gamma^j / (2 sqrt 5) holds exactly.
        for k in 1..=self.depth() {
            let mut fib = (BigUint::one(), BigUint::one());
            for j in 0..=(self.depth() - k) {
                if self.q[k + j] < &fib.0 * &self.q[k] {
                    return fail(format!("growth bound at k={k}, j={j}"));
                }
                let lhs = ln_big(&self.q[k + j]);
                let rhs = ln_big(&self.q[k]) + j as f64 * GOLDEN.ln() - (2.0 * 5f64.sqrt()).ln();
                if lhs <= rhs {
                    return fail(format!("golden bound at k={k}, j={j}"));
                }
                fib = (fib.1.clone(), fib.0 + fib.1);
            }
        }
        Ok(())
    }
}

/// A nonnegative rational `num/den`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Rational {
    #[serde(serialize_with = "decimal")]
    pub num: BigUint,
    #[serde(serialize_with = "decimal")]
    pub den: BigUint,
}

fn decimal<S: serde::Serializer>(x: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_str_radix(10))
}

impl Rational {
    pub fn new(num: BigUint, den: BigUint) -> Self {
        Rational { num, den }
    }

    pub fn from_u64(num: u64, den: u64) -> Self {
        Rational::new(num.into(), den.into())
    }

    pub fn to_f64(&self) -> f64 {
        if self.num.is_zero() {
            0.0
        } else {
            (ln_big(&self.num) - ln_big(&self.den)).exp()
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        (&self.num * &other.den).cmp(&(&other.num * &self.den))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Open interval between two consecutive convergents; every infinite
/// extension of the entry list lies strictly inside it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ThetaEnclosure {
    pub depth: usize,
    pub lower: Rational,
    pub upper: Rational,
}

impl ThetaEnclosure {
    /// Exact width `1/(q_n q_{n+1})` as a rational.
    pub fn width(&self) -> Rational {
        let num = &self.upper.num * &self.lower.den - &self.lower.num * &self.upper.den;
        Rational::new(num, &self.upper.den * &self.lower.den)
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lower <= x && x <= &self.upper
    }
}

pub fn enclose_theta(cf: &ContinuedFraction, depth: usize) -> Result<ThetaEnclosure> {
    if depth + 1 > cf.len() {
        return Err(Error::InsufficientDepth {
            needed: depth + 1,
            available: cf.len(),
        });
    }
    let t = convergents(cf);
    Ok(enclosure_from_table(&t, depth))
}

pub(crate) fn enclosure_from_table(t: &ConvergentTable, depth: usize) -> ThetaEnclosure {
    let a = Rational::new(t.p[depth].clone(), t.q[depth].clone());
    let b = Rational::new(t.p[depth + 1].clone(), t.q[depth + 1].clone());
    let (lower, upper) = if a < b { (a, b) } else { (b, a) };
    ThetaEnclosure { depth, lower, upper }
}

/// Entry list of `1 - theta`.
pub fn complement_cf(cf: &ContinuedFraction) -> Result<ContinuedFraction> {
    let e = cf.entries();
    if e.len() < 2 {
        return Err(Error::InvalidArgument(
            "complement needs at least two entries".into(),
        ));
    }
    let mut out = Vec::with_capacity(e.len() + 1);
    if e[0].is_one() {
        out.push(&e[1] + 1u32);
        out.extend_from_slice(&e[2..]);
    } else {
        out.push(BigUint::one());
        out.push(&e[0] - 1u32);
        out.extend_from_slice(&e[1..]);
    }
    ContinuedFraction::new(out, CfKind::Explicit)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaTypeReport {
    pub alpha: f64,
    /// `s_n` for `n = 1..=N`.
    pub s: Vec<f64>,
    #[serde(skip)]
    pub ln_s: Vec<f64>,
    pub window_max: f64,
    pub window_min: f64,
    pub verdict: Verdict,
    pub rule: BandRule,
}

/// `s_n = a_n q_{n-1}^{1-alpha}` over all stored entries, with the band
/// verdict on its trailing half.
pub fn alpha_type_sequence(cf: &ContinuedFraction, alpha: f64) -> Result<AlphaTypeReport> {
    alpha_type_with_rule(cf, alpha, BandRule::default())
}

pub fn alpha_type_with_rule(
    cf: &ContinuedFraction,
    alpha: f64,
    rule: BandRule,
) -> Result<AlphaTypeReport> {
    if !(alpha >= 1.0) {
        return Err(Error::InvalidArgument(format!("alpha must be >= 1, got {alpha}")));
    }
    let t = convergents(cf);
    let ln_s: Vec<f64> = cf
        .entries()
        .iter()
        .enumerate()
        .map(|(i, a)| ln_big(a) + (1.0 - alpha) * t.ln_q(i))
        .collect();
    let s = ln_s.iter().map(|x| x.exp()).collect();
    let w: WindowStats = window_stats(&ln_s).expect("nonempty entry list");
    Ok(AlphaTypeReport {
        alpha,
        s,
        window_max: w.max(),
        window_min: w.min(),
        verdict: rule.classify(&ln_s),
        ln_s,
        rule,
    })
}

/// Entries with `a_{n+1} = max(1, round(c q_n^{alpha-1}))`, seeded with a
/// first entry of 2 (the normalized slope with level entry `a_1 = 1`).
///
/// Generation stops after `max_depth` entries or once `q_n > q_cap`.
pub fn synthesize_alpha_cf(
    alpha: f64,
    c: f64,
    max_depth: usize,
    q_cap: &BigUint,
) -> Result<ContinuedFraction> {
    synthesize_with_seed(alpha, c, max_depth, q_cap, 2)
}

pub fn synthesize_with_seed(
    alpha: f64,
    c: f64,
    max_depth: usize,
    q_cap: &BigUint,
    first: u64,
) -> Result<ContinuedFraction> {
    if !(alpha > 1.0) || !(c > 0.0) || max_depth == 0 || first == 0 {
        return Err(Error::InvalidArgument(
            "synthesis needs alpha > 1, c > 0, positive depth and seed".into(),
        ));
    }
    let mut entries = vec![BigUint::from(first)];
    let (mut q_prev, mut q) = (BigUint::one(), BigUint::from(first));
    while entries.len() < max_depth && &q <= q_cap {
        let a = synthesized_entry(&q, alpha, c);
        let next = &a * &q + &q_prev;
        entries.push(a);
        q_prev = std::mem::replace(&mut q, next);
    }
    ContinuedFraction::new(entries, CfKind::Synthesized { alpha, c })
}

/// `max(1, round(c q^{alpha-1}))`.
pub fn synthesized_entry(q: &BigUint, alpha: f64, c: f64) -> BigUint {
    let ln_v = c.ln() + (alpha - 1.0) * ln_big(q);
    if ln_v < 40.0 {
        let v = ln_v.exp().round();
        return BigUint::from((v as u64).max(1));
    }
    let k = alpha - 1.0;
    if k.fract() == 0.0 && k <= 64.0 {
        // c is a binary fraction m 2^e, so c q^k rounds exactly
        let (m, e, _) = c.integer_decode();
        let e = e as i64;
        let v = q.pow(k as u32) * m;
        return if e >= 0 {
            v << e as u64
        } else {
            let half = BigUint::one() << (-e - 1) as u64;
            (v + half) >> (-e) as u64
        };
    }
    big_from_ln(ln_v)
}

/// Euclidean expansion of `num/den` in `(0, 1)`, up to `depth` entries.
pub fn expand_rational(num: &BigUint, den: &BigUint, depth: usize) -> Result<ContinuedFraction> {
    if num.is_zero() || num >= den {
        return Err(Error::InvalidArgument("rational must lie in (0, 1)".into()));
    }
    let (mut a, mut b) = (den.clone(), num.clone());
    let mut entries = Vec::new();
    while !b.is_zero() && entries.len() < depth {
        let (quot, rem) = a.div_rem(&b);
        entries.push(quot);
        a = b;
        b = rem;
    }
    ContinuedFraction::new(entries, CfKind::Explicit)
}
