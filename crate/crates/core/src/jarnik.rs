//! Diophantine approximation queries and dimension estimates for slopes
//! whose entries grow like `q_n^{alpha-1}`.

use num_bigint::{BigUint, RandBigInt};
use num_traits::{Float, One};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::banding::Verdict;
use crate::cf_engine::{alpha_type_sequence, convergents, enclosure_from_table, expand_rational, ContinuedFraction};
use crate::error::{Error, Result};
use crate::numeric::{big_ceil_from_ln, ln_big};

/// Indices `n` with `|theta - p_n/q_n| <= c q_n^{-beta}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JarnikQuery {
    pub beta: f64,
    pub c: f64,
    pub depth: usize,
    pub hits: Vec<usize>,
    pub misses: Vec<usize>,
    pub undecided: Vec<usize>,
}

const LN_SLACK: f64 = 1e-9;

/// Classifies `n = 1..=depth` using `1/((a_{n+1}+2) q_n^2) <= |theta - p_n/q_n|
/// <= 1/(a_{n+1} q_n^2)`, falling back to the distance interval given by
/// the deepest stored convergents when the threshold falls in between
/// (compared exactly for integral `beta`).
pub fn jarnik_hits(cf: &ContinuedFraction, beta: f64, c: f64, depth: usize) -> Result<JarnikQuery> {
    if !(c > 0.0) || !beta.is_finite() {
        return Err(Error::InvalidArgument("jarnik query needs c > 0 and finite beta".into()));
    }
    if depth + 1 > cf.len() {
        return Err(Error::InsufficientDepth {
            needed: depth + 1,
            available: cf.len(),
        });
    }
    let t = convergents(cf);
    let deepest = enclosure_from_table(&t, cf.len() - 1);
    let mut q = JarnikQuery {
        beta,
        c,
        depth,
        hits: Vec::new(),
        misses: Vec::new(),
        undecided: Vec::new(),
    };
    for n in 1..=depth {
        let ln_q = t.ln_q(n);
        let a = cf.entry(n + 1)?;
        let thr = c.ln() - beta * ln_q;
        let slack = LN_SLACK * thr.abs().max(1.0);
        let upper = -ln_big(a) - 2.0 * ln_q;
        let lower = -ln_big(&(a + 2u32)) - 2.0 * ln_q;
        if upper <= thr - slack {
            q.hits.push(n);
            continue;
        }
        if lower > thr + slack {
            q.misses.push(n);
            continue;
        }
        if n + 1 >= cf.len() {
            q.undecided.push(n);
            continue;
        }
        // theta lies strictly inside the deepest bracket, which sits on one
        // side of p_n/q_n
        let (pn, qn) = (&t.p[n], &t.q[n]);
        let dist_ln = |num: &BigUint, den: &BigUint| {
            let a = num * qn;
            let b = pn * den;
            let diff = if a > b { a - b } else { b - a };
            ln_big(&diff) - ln_big(den) - ln_big(qn)
        };
        if let Some(exact) = ExactThreshold::new(beta, c) {
            let within = |r: &crate::cf_engine::Rational| exact.within(&r.num, &r.den, pn, qn);
            match (within(&deepest.lower), within(&deepest.upper)) {
                (true, true) => q.hits.push(n),
                (false, false) => q.misses.push(n),
                _ => q.undecided.push(n),
            }
            continue;
        }
        let d1 = dist_ln(&deepest.lower.num, &deepest.lower.den);
        let d2 = dist_ln(&deepest.upper.num, &deepest.upper.den);
        let (d_lo, d_hi) = (d1.min(d2), d1.max(d2));
        if d_hi <= thr - slack {
            q.hits.push(n);
        } else if d_lo > thr + slack {
            q.misses.push(n);
        } else {
            q.undecided.push(n);
        }
    }
    Ok(q)
}

/// `c q^{-beta}` for integral `beta`, with `c = mantissa 2^exponent` exactly.
struct ExactThreshold {
    beta: u32,
    mantissa: BigUint,
    exponent: i32,
}

impl ExactThreshold {
    fn new(beta: f64, c: f64) -> Option<Self> {
        if beta.fract() != 0.0 || !(1.0..=4096.0).contains(&beta) {
            return None;
        }
        let (mantissa, exponent, _) = c.integer_decode();
        Some(ExactThreshold {
            beta: beta as u32,
            mantissa: BigUint::from(mantissa),
            exponent: exponent as i32,
        })
    }

    /// Whether `|num/den - p/q| <= c q^{-beta}`, i.e.
    /// `|num q - p den| q^{beta-1} <= c den`.
    fn within(&self, num: &BigUint, den: &BigUint, p: &BigUint, q: &BigUint) -> bool {
        let (a, b) = (num * q, p * den);
        let diff = if a > b { a - b } else { b - a };
        let mut lhs = diff * q.pow(self.beta - 1);
        let mut rhs = &self.mantissa * den;
        if self.exponent >= 0 {
            rhs <<= self.exponent as usize;
        } else {
            lhs <<= (-self.exponent) as usize;
        }
        lhs <= rhs
    }
}

/// Per-depth averages over the sampled branches.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DepthRecord {
    pub depth: usize,
    /// Mean of `sum_{i<depth} ln N_i`, `N_i` the number of admissible entries.
    pub mean_ln_branches: f64,
    /// Mean of `ln(q_depth (q_depth + q_{depth+1}))`.
    pub mean_ln_inv_diameter: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverEstimate {
    pub alpha: f64,
    pub c1: f64,
    pub c2: f64,
    pub samples: usize,
    pub seed: u64,
    pub records: Vec<DepthRecord>,
    /// Ratio of the two means at full depth.
    pub dimension: f64,
    /// Standard deviation of the per-branch ratios.
    pub spread: f64,
    /// `dimension -/+ 2 spread / sqrt(samples)`.
    pub band: (f64, f64),
}

/// Admissible entries after `q`: `max(1, ceil(c1 q^{alpha-1}))` through
/// `ceil(c2 q^{alpha-1})`.
pub fn entry_range(q: &BigUint, alpha: f64, c1: f64, c2: f64) -> (BigUint, BigUint) {
    let ln_q = ln_big(q);
    let lo = big_ceil_from_ln(c1.ln() + (alpha - 1.0) * ln_q);
    let hi = big_ceil_from_ln(c2.ln() + (alpha - 1.0) * ln_q);
    let hi = hi.max(lo.clone());
    (lo, hi)
}

fn branch_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Local-dimension estimate for the set of slopes whose entries satisfy
/// `a_{n+1}` in [`entry_range`] at every level: accumulated log branch
/// count over log inverse cylinder diameter along random branches.
pub fn box_dimension_estimate(
    alpha: f64,
    c1: f64,
    c2: f64,
    depth: usize,
    samples: usize,
    seed: u64,
) -> Result<CoverEstimate> {
    if !(alpha >= 1.0) || !(c1 > 0.0) || !(c2 >= c1) || depth == 0 || samples == 0 {
        return Err(Error::InvalidArgument(
            "cover estimate needs alpha >= 1, 0 < c1 <= c2, positive depth and samples".into(),
        ));
    }
    // per branch: accumulated ln N and ln(1/diameter) at depths 1..=depth
    let branches: Vec<Vec<(f64, f64)>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = branch_rng(seed, i);
            let mut qs = vec![BigUint::one()];
            let mut q_prev = BigUint::from(0u32);
            let mut ln_counts = Vec::with_capacity(depth + 1);
            for _ in 0..=depth {
                let q = qs.last().unwrap().clone();
                let (lo, hi) = entry_range(&q, alpha, c1, c2);
                ln_counts.push(ln_big(&(&hi - &lo + 1u32)));
                let a = rng.gen_biguint_range(&lo, &(hi + 1u32));
                qs.push(&a * &q + &q_prev);
                q_prev = q;
            }
            let mut ln_branch = 0.0;
            (1..=depth)
                .map(|d| {
                    ln_branch += ln_counts[d - 1];
                    (ln_branch, ln_big(&qs[d]) + ln_big(&(&qs[d] + &qs[d + 1])))
                })
                .collect()
        })
        .collect();
    let mut sum_branch = vec![0.0; depth];
    let mut sum_diam = vec![0.0; depth];
    for b in &branches {
        for (d, (lb, ld)) in b.iter().enumerate() {
            sum_branch[d] += lb;
            sum_diam[d] += ld;
        }
    }
    let ratios: Vec<f64> = branches.iter().map(|b| b[depth - 1].0 / b[depth - 1].1).collect();
    let n = samples as f64;
    let records: Vec<DepthRecord> = (0..depth)
        .map(|d| DepthRecord {
            depth: d + 1,
            mean_ln_branches: sum_branch[d] / n,
            mean_ln_inv_diameter: sum_diam[d] / n,
        })
        .collect();
    let last = records.last().unwrap();
    let dimension = last.mean_ln_branches / last.mean_ln_inv_diameter;
    let mean = ratios.iter().sum::<f64>() / n;
    let spread = (ratios.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / n).sqrt();
    let half = 2.0 * spread / n.sqrt();
    Ok(CoverEstimate {
        alpha,
        c1,
        c2,
        samples,
        seed,
        records,
        dimension,
        spread,
        band: (dimension - half, dimension + half),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LebesgueReport {
    pub alpha: f64,
    pub samples: usize,
    pub depth: usize,
    pub divergent: usize,
    pub fraction: f64,
}

const SAMPLE_BITS: u64 = 256;

/// Fraction of uniform samples `u / 2^256` whose entry sequence is not
/// classified divergent at exponent `alpha`; `None` without samples.
pub fn lebesgue_probe(alpha: f64, samples: usize, depth: usize, seed: u64) -> Result<Option<LebesgueReport>> {
    if samples == 0 {
        return Ok(None);
    }
    let den = BigUint::one() << SAMPLE_BITS;
    let flags: Vec<bool> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = branch_rng(seed, i);
            let u = rng.gen_biguint_range(&BigUint::one(), &den);
            let cf = expand_rational(&u, &den, depth)?;
            Ok(alpha_type_sequence(&cf, alpha)?.verdict == Verdict::Divergent)
        })
        .collect::<Result<_>>()?;
    let divergent = flags.iter().filter(|&&d| d).count();
    Ok(Some(LebesgueReport {
        alpha,
        samples,
        depth,
        divergent,
        fraction: 1.0 - divergent as f64 / samples as f64,
    }))
}
