//! Sturmian words: the rotation sequence, the substitution limit words,
//! language slices and branching (right-special prefix) profiles.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use crate::cf_engine::{convergents, enclosure_from_table, ContinuedFraction, ConvergentTable};
use crate::complexity::repetitive_formula;
use crate::error::{Error, Result};

pub const DEFAULT_WORD_BUDGET: usize = 10_000_000;

/// A finite word over `{0, 1}`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct BinaryWord(Vec<u8>);

impl BinaryWord {
    pub fn new() -> Self {
        BinaryWord(Vec::new())
    }

    pub fn from_symbols(symbols: Vec<u8>) -> Result<Self> {
        if symbols.iter().any(|&s| s > 1) {
            return Err(Error::InvalidArgument("symbols must be 0 or 1".into()));
        }
        Ok(BinaryWord(symbols))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[u8] {
        &self.0
    }

    pub fn into_symbols(self) -> Vec<u8> {
        self.0
    }

    pub fn prefix(&self, n: usize) -> BinaryWord {
        BinaryWord(self.0[..n.min(self.len())].to_vec())
    }

    /// The shift `sigma^k`: drops the first `k` symbols.
    pub fn shift(&self, k: usize) -> BinaryWord {
        BinaryWord(self.0[k.min(self.len())..].to_vec())
    }

    pub fn concat(&self, other: &BinaryWord) -> BinaryWord {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        BinaryWord(v)
    }

    pub fn repeat(&self, times: usize) -> BinaryWord {
        BinaryWord(self.0.repeat(times))
    }

    pub fn is_prefix_of(&self, other: &BinaryWord) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn contains(&self, factor: &BinaryWord) -> bool {
        if factor.is_empty() {
            return true;
        }
        let m = factor.len();
        let mut cat = Vec::with_capacity(m + 1 + self.len());
        cat.extend_from_slice(factor.symbols());
        cat.push(2);
        cat.extend_from_slice(&self.0);
        z_array(&cat)[m + 1..].iter().any(|&z| z == m)
    }

    /// Length of the longest common prefix.
    pub fn lcp(&self, other: &BinaryWord) -> usize {
        self.0.iter().zip(&other.0).take_while(|(a, b)| a == b).count()
    }
}

impl fmt::Display for BinaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.0.iter().map(|&b| if b == 0 { '0' } else { '1' }).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for BinaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len() <= 64 {
            write!(f, "BinaryWord({self})")
        } else {
            write!(f, "BinaryWord({}.. len {})", self.prefix(32), self.len())
        }
    }
}

impl FromStr for BinaryWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::InvalidArgument(format!("not a binary symbol: {other:?}"))),
            })
            .collect::<Result<Vec<u8>>>()
            .map(BinaryWord)
    }
}

impl Serialize for BinaryWord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Pointwise exchange of 0 and 1.
pub fn involution_eta(word: &BinaryWord) -> BinaryWord {
    BinaryWord(word.0.iter().map(|&b| 1 - b).collect())
}

fn check_budget(requested: &BigUint, budget: usize) -> Result<()> {
    if requested > &BigUint::from(budget) {
        return Err(Error::BudgetExceeded {
            requested: requested.to_string(),
            budget,
        });
    }
    Ok(())
}

/// Ceiling oracle for `theta * n` from the open bracket between two
/// consecutive convergents.
enum CeilOracle {
    Small { lo: (u128, u128), hi: (u128, u128) },
    Big { lo: (BigUint, BigUint), hi: (BigUint, BigUint) },
}

impl CeilOracle {
    fn new(t: &ConvergentTable, depth: usize) -> Self {
        let e = enclosure_from_table(t, depth);
        match (
            e.lower.num.to_u64(),
            e.lower.den.to_u64(),
            e.upper.num.to_u64(),
            e.upper.den.to_u64(),
        ) {
            (Some(a), Some(b), Some(c), Some(d)) if b < 1 << 62 && d < 1 << 62 => CeilOracle::Small {
                lo: (a as u128, b as u128),
                hi: (c as u128, d as u128),
            },
            _ => CeilOracle::Big {
                lo: (e.lower.num, e.lower.den),
                hi: (e.upper.num, e.upper.den),
            },
        }
    }

    // theta*n lies in (lo*n, hi*n); with f = floor(lo*n) the ceiling is
    // f + 1 exactly when hi*n <= f + 1.
    fn ceil(&self, n: u64) -> Option<BigUint> {
        match self {
            CeilOracle::Small { lo, hi } => {
                let n = n as u128;
                let f = lo.0 * n / lo.1;
                (hi.0 * n <= (f + 1) * hi.1).then(|| BigUint::from(f + 1))
            }
            CeilOracle::Big { lo, hi } => {
                let f = (&lo.0 * n).div_floor(&lo.1);
                let next = f + 1u32;
                (&hi.0 * n <= &next * &hi.1).then_some(next)
            }
        }
    }
}

/// The rotation sequence `x_n = ceil(theta (n+1)) - ceil(theta n)` for
/// `n = 1..=length`, where `theta` is any irrational extension of `cf`.
pub fn mechanical_prefix(cf: &ContinuedFraction, length: usize, budget: usize) -> Result<BinaryWord> {
    check_budget(&BigUint::from(length), budget)?;
    if length == 0 {
        return Ok(BinaryWord::new());
    }
    if cf.len() < 2 {
        return Err(Error::EnclosureExhausted { index: 1 });
    }
    let t = convergents(cf);
    let deepest = CeilOracle::new(&t, cf.len() - 1);
    let fast_depth = (0..cf.len())
        .rev()
        .find(|&d| t.q(d + 1).map(|q| q.bits() < 62).unwrap_or(false));
    let fast = fast_depth.map(|d| CeilOracle::new(&t, d));
    let ceil = |n: u64| -> Result<BigUint> {
        if let Some(c) = fast.as_ref().and_then(|o| o.ceil(n)) {
            return Ok(c);
        }
        deepest.ceil(n).ok_or(Error::EnclosureExhausted { index: n })
    };
    let mut out = Vec::with_capacity(length);
    let mut prev = ceil(1)?;
    for n in 1..=length as u64 {
        let next = ceil(n + 1)?;
        let d = &next - &prev;
        out.push(if d.is_zero() { 0 } else { 1 });
        prev = next;
    }
    Ok(BinaryWord(out))
}

/// `R_k` and `L_k`, or only their lengths when they exceed the budget.
#[derive(Debug, Clone, PartialEq)]
pub struct SubstitutionPair {
    pub k: usize,
    pub r_len: BigUint,
    pub l_len: BigUint,
    pub words: Option<(BinaryWord, BinaryWord)>,
}

impl SubstitutionPair {
    pub fn r(&self) -> Option<&BinaryWord> {
        self.words.as_ref().map(|w| &w.0)
    }

    pub fn l(&self) -> Option<&BinaryWord> {
        self.words.as_ref().map(|w| &w.1)
    }

    pub fn is_lazy(&self) -> bool {
        self.words.is_none()
    }
}

// tau^a: 0 -> 0, 1 -> 1 0^a.   rho^a: 0 -> 0 1^a, 1 -> 1.
fn apply_power(word: &[u8], tau: bool, a: usize) -> Vec<u8> {
    let grow = word.iter().filter(|&&b| (b == 1) == tau).count();
    let mut out = Vec::with_capacity(word.len() + grow * a);
    for &b in word {
        out.push(b);
        if tau && b == 1 {
            out.extend(std::iter::repeat(0).take(a));
        } else if !tau && b == 0 {
            out.extend(std::iter::repeat(1).take(a));
        }
    }
    out
}

/// `R_k = tau^{a_1} rho^{a_2} ... tau^{a_{2k-1}} rho^{a_{2k}}(0)` and the same
/// composition applied to `1` for `L_k`, over the level entries.
///
/// With `force` unset, a pair longer than `budget` comes back as a lazy
/// descriptor; with `force` set it is an error.
pub fn substitution_words(
    cf: &ContinuedFraction,
    k: usize,
    force: bool,
    budget: usize,
) -> Result<SubstitutionPair> {
    if !cf.is_normalized() {
        return Err(Error::NotNormalized);
    }
    if 2 * k > cf.len() {
        return Err(Error::InsufficientDepth {
            needed: 2 * k,
            available: cf.len(),
        });
    }
    let t = convergents(cf);
    let (r_len, l_len) = if k == 0 {
        (BigUint::from(1u32), BigUint::from(1u32))
    } else {
        (t.q[2 * k].clone(), t.q[2 * k - 1].clone())
    };
    if r_len > BigUint::from(budget) {
        if force {
            check_budget(&r_len, budget)?;
        }
        return Ok(SubstitutionPair {
            k,
            r_len,
            l_len,
            words: None,
        });
    }
    let (mut r, mut l) = (vec![0u8], vec![1u8]);
    for i in (1..=2 * k).rev() {
        let a = cf.level_entry(i)?.to_usize().expect("entry bounded by budget");
        let tau = i % 2 == 1;
        r = apply_power(&r, tau, a);
        l = apply_power(&l, tau, a);
    }
    Ok(SubstitutionPair {
        k,
        r_len,
        l_len,
        words: Some((BinaryWord(r), BinaryWord(l))),
    })
}

/// The first `len` symbols of the x-limit word, read off `R_k` for the
/// smallest `k` with `|R_k| >= len`.
pub fn x_limit_prefix(cf: &ContinuedFraction, len: usize, budget: usize) -> Result<BinaryWord> {
    limit_prefix(cf, len, budget, true)
}

/// The first `len` symbols of the y-limit word, read off `L_k`.
pub fn y_limit_prefix(cf: &ContinuedFraction, len: usize, budget: usize) -> Result<BinaryWord> {
    limit_prefix(cf, len, budget, false)
}

fn limit_prefix(cf: &ContinuedFraction, len: usize, budget: usize, x: bool) -> Result<BinaryWord> {
    check_budget(&BigUint::from(len), budget)?;
    if !cf.is_normalized() {
        return Err(Error::NotNormalized);
    }
    let t = convergents(cf);
    let want = BigUint::from(len);
    let mut k = 0;
    loop {
        let idx = match (x, k) {
            (_, 0) => 0,
            (true, _) => 2 * k,
            (false, _) => 2 * k - 1,
        };
        let q = t.q(idx).map_err(|_| Error::InsufficientDepth {
            needed: idx,
            available: cf.len(),
        })?;
        if q >= &want {
            break;
        }
        k += 1;
    }
    let mut out = Vec::with_capacity(len);
    emit_prefix(cf, x, k, len, &mut out)?;
    Ok(BinaryWord(out))
}

// Appends R_k (or L_k) to `out` until it holds `limit` symbols, using
// R_k = R_{k-1} L_k^{a_{2k}} and L_k = L_{k-1} R_{k-1}^{a_{2k-1}}.
fn emit_prefix(cf: &ContinuedFraction, r: bool, k: usize, limit: usize, out: &mut Vec<u8>) -> Result<()> {
    if out.len() >= limit {
        return Ok(());
    }
    if k == 0 {
        out.push(if r { 0 } else { 1 });
        return Ok(());
    }
    let (head_r, body_r, times) = if r {
        (true, false, cf.level_entry(2 * k)?)
    } else {
        (false, true, cf.level_entry(2 * k - 1)?)
    };
    emit_prefix(cf, head_r, k - 1, limit, out)?;
    let body_k = if body_r { k - 1 } else { k };
    let mut i = BigUint::zero();
    while i < times && out.len() < limit {
        emit_prefix(cf, body_r, body_k, limit, out)?;
        i += 1u32;
    }
    Ok(())
}

/// The length-`n` factors of a language, with its right-special member.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LanguageSlice {
    pub n: usize,
    pub factors: BTreeSet<BinaryWord>,
    pub right_special: BinaryWord,
    #[serde(skip)]
    pub complete: bool,
}

/// Prefix length from which slices of length `n` (and their right-special
/// member) are certified: `R(n+1) + n`.
pub fn certified_prefix_len(cf: &ContinuedFraction, n: usize) -> Result<BigUint> {
    Ok(repetitive_formula(cf, n as u64 + 1)? + n)
}

/// Length-`n` slice of the language of `word`, certified complete against
/// the repetitive function of `cf`.
pub fn factors(word: &BinaryWord, n: usize, cf: &ContinuedFraction) -> Result<LanguageSlice> {
    let need = certified_prefix_len(cf, n)?;
    if BigUint::from(word.len()) < need {
        return Err(Error::IncompleteLanguage {
            n,
            have: word.len(),
            need: need.to_string(),
        });
    }
    let slice = build_slice(word, n, true)?;
    if slice.factors.len() != n + 1 {
        return Err(Error::OracleMismatch(format!(
            "{} factors of length {n}, expected {}",
            slice.factors.len(),
            n + 1
        )));
    }
    Ok(slice)
}

/// Slice without a completeness certificate; marked incomplete.
pub fn factors_unchecked(word: &BinaryWord, n: usize) -> Result<LanguageSlice> {
    build_slice(word, n, false)
}

fn build_slice(word: &BinaryWord, n: usize, complete: bool) -> Result<LanguageSlice> {
    if word.len() < n + 1 {
        return Err(Error::IncompleteLanguage {
            n,
            have: word.len(),
            need: (n + 1).to_string(),
        });
    }
    let s = word.symbols();
    let longer: HashSet<&[u8]> = s.windows(n + 1).collect();
    let set: BTreeSet<BinaryWord> = if n == 0 {
        BTreeSet::from([BinaryWord::new()])
    } else {
        s.windows(n).map(|w| BinaryWord(w.to_vec())).collect()
    };
    let special: Vec<&BinaryWord> = set
        .iter()
        .filter(|w| {
            let mut e = w.0.clone();
            e.push(0);
            let zero = longer.contains(e.as_slice());
            *e.last_mut().unwrap() = 1;
            zero && longer.contains(e.as_slice())
        })
        .collect();
    if special.len() != 1 {
        return Err(Error::RightSpecialCount {
            n,
            count: special.len(),
        });
    }
    Ok(LanguageSlice {
        n,
        right_special: special[0].clone(),
        factors: set,
        complete,
    })
}

impl LanguageSlice {
    pub fn eta(&self) -> LanguageSlice {
        LanguageSlice {
            n: self.n,
            factors: self.factors.iter().map(involution_eta).collect(),
            right_special: involution_eta(&self.right_special),
            complete: self.complete,
        }
    }

    pub fn require_complete(&self) -> Result<()> {
        if self.complete {
            Ok(())
        } else {
            Err(Error::UncertifiedSlice(self.n))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LimitSource {
    XLimit,
    YLimit,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BranchingProfile {
    pub source: LimitSource,
    pub bound: u64,
    pub hits: BTreeSet<u64>,
}

/// Z-array: `z[i]` is the longest common prefix of `s` and `s[i..]`.
pub fn z_array(s: &[u8]) -> Vec<usize> {
    let n = s.len();
    let mut z = vec![0; n];
    if n == 0 {
        return z;
    }
    z[0] = n;
    let (mut l, mut r) = (0, 0);
    for i in 1..n {
        if i < r {
            z[i] = (r - i).min(z[i - l]);
        }
        while i + z[i] < n && s[z[i]] == s[i + z[i]] {
            z[i] += 1;
        }
        if i + z[i] > r {
            l = i;
            r = i + z[i];
        }
    }
    z
}

/// For `n = 0..=n_max`, whether the prefix `z[..n]` is right special in the
/// language witnessed by `language`: it must occur there followed by both
/// symbols.
pub fn right_special_prefixes(z: &BinaryWord, language: &BinaryWord, n_max: usize) -> Result<Vec<bool>> {
    if z.len() <= n_max {
        return Err(Error::InvalidArgument(format!(
            "word of length {} cannot certify prefixes up to {n_max}",
            z.len()
        )));
    }
    let zs = &z.symbols()[..n_max + 1];
    let mut cat = Vec::with_capacity(zs.len() + 1 + language.len());
    cat.extend_from_slice(zs);
    cat.push(2);
    cat.extend_from_slice(language.symbols());
    let za = z_array(&cat);
    let off = zs.len() + 1;
    let u = language.len();
    let mut same = vec![false; n_max + 2];
    let mut other = vec![false; n_max + 2];
    for i in 0..u {
        let m = za[off + i];
        // occurrence of z[..m] at i; if it stops inside the language, the
        // next symbol differs from z[m]
        if m <= n_max && i + m < u {
            other[m] = true;
        }
        for flag in same.iter_mut().take(m.min(n_max + 1) + 1) {
            *flag = true;
        }
    }
    Ok((0..=n_max).map(|n| same[n + 1] && other[n]).collect())
}

/// Indices `n in 1..=n_max` whose length-`n` prefix of `prefix` is right
/// special, certified by the prefix itself.
pub fn branching_profile_bruteforce(
    prefix: &BinaryWord,
    n_max: u64,
    cf: &ContinuedFraction,
    source: LimitSource,
) -> Result<BranchingProfile> {
    let n = n_max as usize;
    let need = certified_prefix_len(cf, n)?;
    if BigUint::from(prefix.len()) < need {
        return Err(Error::IncompleteLanguage {
            n,
            have: prefix.len(),
            need: need.to_string(),
        });
    }
    let flags = right_special_prefixes(prefix, prefix, n)?;
    let hits = (1..=n).filter(|&i| flags[i]).map(|i| i as u64).collect();
    Ok(BranchingProfile {
        source,
        bound: n_max,
        hits,
    })
}

/// Branching indices from the convergent denominators: `j q_{2k-1} + q_{2k-2}`
/// with `0 <= j < a_{2k}` for the x-limit word and `i q_{2l} + q_{2l-1}` with
/// `0 <= i < a_{2l+1}` for the y-limit word.
pub fn branching_profile_closed(
    cf: &ContinuedFraction,
    n_max: u64,
    source: LimitSource,
) -> Result<BranchingProfile> {
    let t = convergents(cf);
    let bound = BigUint::from(n_max);
    let mut hits = BTreeSet::new();
    let mut level = 1usize;
    loop {
        // x: step q_{2k-1}, base q_{2k-2}, count a_{2k}
        // y: step q_{2l},   base q_{2l-1}, count a_{2l+1}
        let (base_idx, entry_idx) = match source {
            LimitSource::XLimit => (2 * level - 2, 2 * level),
            LimitSource::YLimit => (2 * level - 1, 2 * level + 1),
        };
        let base = t.q(base_idx).map_err(|_| Error::InsufficientDepth {
            needed: entry_idx,
            available: cf.len(),
        })?;
        if base > &bound {
            break;
        }
        let step = &t.q[base_idx + 1];
        let count = cf.level_entry(entry_idx)?;
        let mut j = BigUint::zero();
        let mut n = base.clone();
        while j < count && n <= bound {
            hits.insert(n.to_u64().unwrap());
            j += 1u32;
            n += step;
        }
        level += 1;
    }
    Ok(BranchingProfile {
        source,
        bound: n_max,
        hits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> BinaryWord {
        s.parse().unwrap()
    }

    #[test]
    fn mechanical_examples() {
        let fib = ContinuedFraction::fibonacci(20);
        assert_eq!(mechanical_prefix(&fib, 7, DEFAULT_WORD_BUDGET).unwrap(), w("0100101"));
        assert_eq!(mechanical_prefix(&fib, 0, DEFAULT_WORD_BUDGET).unwrap(), w(""));
        let other = ContinuedFraction::explicit(&[3, 4, 1, 2, 5]).unwrap();
        assert_eq!(mechanical_prefix(&other, 1, DEFAULT_WORD_BUDGET).unwrap(), w("0"));
        assert!(matches!(
            mechanical_prefix(&ContinuedFraction::fibonacci(4), 200, DEFAULT_WORD_BUDGET),
            Err(Error::EnclosureExhausted { .. })
        ));
        assert!(matches!(
            mechanical_prefix(&fib, 11, 10),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn substitution_examples() {
        let fib = ContinuedFraction::fibonacci(10);
        let p = substitution_words(&fib, 1, true, DEFAULT_WORD_BUDGET).unwrap();
        assert_eq!((p.r().unwrap().clone(), p.l().unwrap().clone()), (w("010"), w("10")));
        let p = substitution_words(&fib, 2, true, DEFAULT_WORD_BUDGET).unwrap();
        assert_eq!(p.r().unwrap(), &w("01010010"));
        let p = substitution_words(&fib, 0, true, DEFAULT_WORD_BUDGET).unwrap();
        assert_eq!((p.r().unwrap().clone(), p.l().unwrap().clone()), (w("0"), w("1")));
        let lazy = substitution_words(&fib, 5, false, 20).unwrap();
        assert!(lazy.is_lazy());
        assert_eq!(lazy.r_len, BigUint::from(144u32));
        assert!(substitution_words(&fib, 5, true, 20).is_err());
        let upper = ContinuedFraction::explicit(&[1, 2, 3]).unwrap();
        assert_eq!(substitution_words(&upper, 1, true, 100), Err(Error::NotNormalized));
    }

    #[test]
    fn limit_prefixes_follow_the_substitution_words() {
        let cf = ContinuedFraction::explicit(&[3, 2, 4, 1, 3, 2, 5, 1]).unwrap();
        for k in 1..=4 {
            let pair = substitution_words(&cf, k, true, DEFAULT_WORD_BUDGET).unwrap();
            let (r, l) = pair.words.unwrap();
            for len in [1, 2, l.len() / 2 + 1, l.len()] {
                assert_eq!(y_limit_prefix(&cf, len, DEFAULT_WORD_BUDGET).unwrap(), l.prefix(len));
            }
            for len in [1, 3, r.len() / 2, r.len()] {
                assert_eq!(x_limit_prefix(&cf, len, DEFAULT_WORD_BUDGET).unwrap(), r.prefix(len));
            }
        }
        // x = 01c and y = 10c with c the rotation sequence
        let c = mechanical_prefix(&cf, 400, DEFAULT_WORD_BUDGET).unwrap();
        assert_eq!(x_limit_prefix(&cf, 402, DEFAULT_WORD_BUDGET).unwrap(), w("01").concat(&c));
        assert_eq!(y_limit_prefix(&cf, 402, DEFAULT_WORD_BUDGET).unwrap(), w("10").concat(&c));
        let syn = ContinuedFraction::explicit(&[2, 2, 5, 27, 734, 538783]).unwrap();
        assert_eq!(x_limit_prefix(&syn, 5000, 5000).unwrap().len(), 5000);
    }

    #[test]
    fn slice_examples() {
        let fib = ContinuedFraction::fibonacci(20);
        let word = mechanical_prefix(&fib, 40, DEFAULT_WORD_BUDGET).unwrap();
        let s = factors(&word, 3, &fib).unwrap();
        let want: BTreeSet<BinaryWord> = ["010", "100", "001", "101"].iter().map(|x| w(x)).collect();
        assert_eq!(s.factors, want);
        assert_eq!(s.right_special, w("010"));
        let s = factors(&word, 1, &fib).unwrap();
        assert_eq!(s.right_special, w("0"));
        let s = factors(&word, 0, &fib).unwrap();
        assert_eq!(s.factors.len(), 1);
        assert_eq!(s.right_special, w(""));
        assert!(matches!(
            factors(&word.prefix(12), 3, &fib),
            Err(Error::IncompleteLanguage { .. })
        ));
        let loose = factors_unchecked(&word.prefix(12), 3).unwrap();
        assert_eq!(loose.require_complete(), Err(Error::UncertifiedSlice(3)));
        let j = serde_json::to_string(&factors(&word, 2, &fib).unwrap()).unwrap();
        assert_eq!(j, r#"{"n":2,"factors":["00","01","10"],"right_special":"10"}"#);
    }

    #[test]
    fn right_special_ties_are_integrity_errors() {
        // both 0 and 1 are right special in this sample
        assert_eq!(
            factors_unchecked(&w("00110"), 1),
            Err(Error::RightSpecialCount { n: 1, count: 2 })
        );
    }

    #[test]
    fn branching_examples() {
        let fib = ContinuedFraction::fibonacci(30);
        let x = x_limit_prefix(&fib, 200, DEFAULT_WORD_BUDGET).unwrap();
        let y = y_limit_prefix(&fib, 200, DEFAULT_WORD_BUDGET).unwrap();
        let px = branching_profile_bruteforce(&x, 10, &fib, LimitSource::XLimit).unwrap();
        assert_eq!(px.hits.into_iter().collect::<Vec<_>>(), [1, 3, 8]);
        let py = branching_profile_bruteforce(&y, 6, &fib, LimitSource::YLimit).unwrap();
        assert_eq!(py.hits.into_iter().collect::<Vec<_>>(), [2, 5]);
        assert!(branching_profile_bruteforce(&x, 0, &fib, LimitSource::XLimit)
            .unwrap()
            .hits
            .is_empty());
        let cx = branching_profile_closed(&fib, 25, LimitSource::XLimit).unwrap();
        assert_eq!(cx.hits.into_iter().collect::<Vec<_>>(), [1, 3, 8, 21]);
        assert!(branching_profile_closed(&fib, 0, LimitSource::XLimit)
            .unwrap()
            .hits
            .is_empty());
    }

    #[test]
    fn eta_examples() {
        assert_eq!(involution_eta(&w("0100101")), w("1011010"));
        assert_eq!(involution_eta(&w("")), w(""));
    }

    #[test]
    fn z_array_matches_naive() {
        let s = [0u8, 1, 0, 0, 1, 0, 1, 0, 0, 1];
        let z = z_array(&s);
        for i in 0..s.len() {
            let naive = s[i..].iter().zip(&s).take_while(|(a, b)| a == b).count();
            assert_eq!(z[i], naive);
        }
    }
}
