//! Log-domain helpers for quantities indexed by huge integers.

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, ToPrimitive, Zero};

/// Natural logarithm of a big integer; `-inf` for zero.
///
/// Only the top 64 bits take part, so the result carries the usual
/// double-precision relative error.
pub fn ln_big(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 64 {
        return (x.to_u64().unwrap() as f64).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().unwrap() as f64;
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `num / den` as a float, for numerators of either sign and any size.
pub fn ratio_f64(num: &BigInt, den: &BigUint) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let mag = (ln_big(num.magnitude()) - ln_big(den)).exp();
    if num.sign() == Sign::Minus {
        -mag
    } else {
        mag
    }
}

/// Largest integer not exceeding `exp(ln_value)`, up to float precision.
pub fn big_from_ln(ln_value: f64) -> BigUint {
    if ln_value < 0.0 {
        return BigUint::zero();
    }
    let log2 = ln_value / std::f64::consts::LN_2;
    if log2 < 62.0 {
        return BigUint::from(ln_value.exp().floor() as u64);
    }
    let shift = log2.floor() as u64 - 60;
    let mantissa = (ln_value - shift as f64 * std::f64::consts::LN_2).exp();
    BigUint::from(mantissa as u64) << shift
}

/// Least `n` with `n >= exp(ln_value)`, clamped below by one.
pub fn big_ceil_from_ln(ln_value: f64) -> BigUint {
    let floor = big_from_ln(ln_value);
    let back = ln_big(&floor);
    if floor.is_zero() || back < ln_value - 1e-12 * ln_value.abs().max(1.0) {
        floor + 1u32
    } else {
        floor.max(BigUint::one())
    }
}

/// Accumulates a sum of positive terms given by their logarithms.
///
/// Terms are added in call order, so the result is reproducible.
#[derive(Debug, Clone, Copy)]
pub struct LogSum {
    max: f64,
    acc: f64,
}

impl Default for LogSum {
    fn default() -> Self {
        Self::new()
    }
}

impl LogSum {
    pub fn new() -> Self {
        LogSum {
            max: f64::NEG_INFINITY,
            acc: 0.0,
        }
    }

    pub fn add_ln(&mut self, x: f64) {
        if x == f64::NEG_INFINITY {
            return;
        }
        if x > self.max {
            self.acc = self.acc * (self.max - x).exp() + 1.0;
            self.max = x;
        } else {
            self.acc += (x - self.max).exp();
        }
    }

    pub fn ln(&self) -> f64 {
        if self.acc == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.max + self.acc.ln()
        }
    }

    pub fn value(&self) -> f64 {
        self.ln().exp()
    }
}

/// `ln(exp(a) + exp(b))`.
pub fn ln_add(a: f64, b: f64) -> f64 {
    let mut s = LogSum::new();
    s.add_ln(a);
    s.add_ln(b);
    s.ln()
}

/// A logarithm together with a bound on the relative error of the
/// underlying value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LnBounded {
    pub ln: f64,
    pub rel_err: f64,
}

const DIRECT_TERMS: u64 = 64;

// B_2, B_4, B_6, B_8 divided by the matching factorials.
const BERNOULLI_OVER_FACT: [f64; 4] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
];

/// `sum_{l=from}^{to} (l*q + b)^(-t)` in the log domain.
///
/// The first terms use exact integer indices; the remainder is evaluated
/// with Euler-Maclaurin, whose truncation error is reported in `rel_err`.
/// Every index `l*q + b` must be positive.
pub fn power_sum(q: &BigUint, b: &BigInt, from: &BigUint, to: &BigUint, t: f64) -> LnBounded {
    let mut sum = LogSum::new();
    if from > to {
        return LnBounded {
            ln: f64::NEG_INFINITY,
            rel_err: 0.0,
        };
    }
    let qi = BigInt::from(q.clone());
    let direct_end = (from + DIRECT_TERMS - 1u32).min(to.clone());
    let mut l = from.clone();
    while l <= direct_end {
        let idx = BigInt::from(l.clone()) * &qi + b;
        assert!(idx.sign() == Sign::Plus, "non-positive metric index");
        sum.add_ln(-t * ln_big(idx.magnitude()));
        l += 1u32;
    }
    if &l > to {
        return LnBounded {
            ln: sum.ln(),
            rel_err: 1e-15,
        };
    }
    // remaining range [l, to] in units of q with offset beta = b/q
    let beta = ratio_f64(b, q);
    let (ln_tail, err) = euler_maclaurin_ln(ln_shifted(&l, beta), ln_shifted(to, beta), t);
    let ln_tail = ln_tail - t * ln_big(q);
    sum.add_ln(ln_tail);
    let total = sum.ln();
    let rel_err = err * (ln_tail - total).exp() + 1e-15;
    LnBounded { ln: total, rel_err }
}

/// `ln(x + beta)` for `x >= 1` and `|beta|` well below `x`.
fn ln_shifted(x: &BigUint, beta: f64) -> f64 {
    match x.to_f64() {
        Some(v) if v < 1e300 => (v + beta).ln(),
        _ => ln_big(x),
    }
}

/// `ln |e^s - 1|`.
fn ln_abs_expm1(s: f64) -> f64 {
    if s > 30.0 {
        s + (-(-s).exp()).ln_1p()
    } else {
        s.exp_m1().abs().ln()
    }
}

/// `ln sum_{k=0}^{n} (x0 + k)^(-t)` for `n = x1 - x0` (an integer up to
/// rounding), from `ln x0 <= ln x1`, together with a relative error bound.
fn euler_maclaurin_ln(lx0: f64, lx1: f64, t: f64) -> (f64, f64) {
    let span = lx1 - lx0;
    // (sign, ln |term|)
    let mut parts: Vec<(f64, f64)> = Vec::with_capacity(7);
    let ln_integral = if (1.0 - t).abs() < 1e-12 {
        span.ln()
    } else {
        (1.0 - t) * lx0 + ln_abs_expm1((1.0 - t) * span) - (1.0 - t).abs().ln()
    };
    parts.push((1.0, ln_integral));
    parts.push((1.0, 0.5f64.ln() - t * lx0));
    parts.push((1.0, 0.5f64.ln() - t * lx1));
    // f^(2i-1)(x1) - f^(2i-1)(x0) = rising (x0^-p - x1^-p), p = t + 2i - 1,
    // rising = t(t+1)...(t+2i-2)
    let mut ln_rising = t.ln();
    let mut ln_next = f64::NEG_INFINITY;
    for (i, coef) in BERNOULLI_OVER_FACT.iter().enumerate() {
        let order = 2 * i + 1;
        if i > 0 {
            ln_rising += ((t + order as f64 - 2.0) * (t + order as f64 - 1.0)).ln();
        }
        let p = t + order as f64;
        let ln_term = coef.abs().ln() + ln_rising - p * lx0 + ln_abs_expm1(-p * span);
        if i + 1 == BERNOULLI_OVER_FACT.len() {
            ln_next = ln_term;
        } else {
            parts.push((coef.signum(), ln_term));
        }
    }
    let top = parts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let scaled: f64 = parts.iter().map(|(sign, ln)| sign * (ln - top).exp()).sum();
    let ln_total = top + scaled.ln();
    (ln_total, (ln_next - ln_total).exp())
}

/// Least-squares slope of `ys` against `xs`; `None` below two points.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return None;
    }
    let mx = xs[..n].iter().sum::<f64>() / n as f64;
    let my = ys[..n].iter().sum::<f64>() / n as f64;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for i in 0..n {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(q: u64, b: i64, from: u64, to: u64, t: f64) -> f64 {
        (from..=to)
            .map(|l| ((l as i64 * q as i64 + b) as f64).powf(-t))
            .sum()
    }

    #[test]
    fn ln_big_matches_float_log() {
        let x = BigUint::from(10u32).pow(40);
        assert!((ln_big(&x) - 40.0 * 10f64.ln()).abs() < 1e-12);
        assert_eq!(ln_big(&BigUint::zero()), f64::NEG_INFINITY);
    }

    #[test]
    fn power_sum_short_ranges_are_exact_sums() {
        let got = power_sum(
            &BigUint::from(5u32),
            &BigInt::from(3),
            &BigUint::from(1u32),
            &BigUint::from(10u32),
            1.3,
        );
        let want = naive(5, 3, 1, 10, 1.3);
        assert!((got.ln.exp() / want - 1.0).abs() < 1e-14);
    }

    #[test]
    fn power_sum_long_ranges_match_direct_summation() {
        for &t in &[0.25, 0.5, 0.75, 1.0, 1.2, 2.0] {
            for &(q, b) in &[(7u64, 4i64), (13, -5), (1, 0)] {
                let got = power_sum(
                    &BigUint::from(q),
                    &BigInt::from(b),
                    &BigUint::from(1u32),
                    &BigUint::from(20000u32),
                    t,
                );
                let want = naive(q, b, 1, 20000, t);
                assert!(
                    (got.ln.exp() / want - 1.0).abs() < 1e-11,
                    "t={t} q={q} b={b}: {} vs {want}",
                    got.ln.exp()
                );
                assert!(got.rel_err < 1e-12);
            }
        }
    }

    #[test]
    fn power_sum_survives_ranges_beyond_f64() {
        let q = BigUint::from(7u32);
        let huge = BigUint::from(10u32).pow(400);
        let one = BigUint::one();
        let s = power_sum(&q, &BigInt::zero(), &one, &huge, 2.0);
        let zeta2 = std::f64::consts::PI.powi(2) / 6.0;
        assert!((s.ln - (zeta2.ln() - 2.0 * 7f64.ln())).abs() < 1e-12);
        // sum_{l<=N} (l q)^-t ~ q^-t N^(1-t) / (1-t) for t < 1
        let s = power_sum(&q, &BigInt::zero(), &one, &huge, 0.75);
        let want = 0.25 * 400.0 * 10f64.ln() - 0.75 * 7f64.ln() - 0.25f64.ln();
        assert!((s.ln - want).abs() < 1e-9, "{} vs {want}", s.ln);
        let start = &huge >> 4u32;
        let s = power_sum(&q, &BigInt::from(-3), &start, &huge, 0.75);
        assert!(s.ln.is_finite());
    }

    #[test]
    fn log_sum_handles_extreme_magnitudes() {
        let mut s = LogSum::new();
        s.add_ln(-2000.0);
        s.add_ln(-2000.0);
        assert!((s.ln() - (-2000.0 + 2f64.ln())).abs() < 1e-12);
        assert_eq!(LogSum::new().ln(), f64::NEG_INFINITY);
    }

    #[test]
    fn big_from_ln_round_trips() {
        for &v in &[0.0, 1.0, 30.0, 100.0, 5000.0] {
            let b = big_from_ln(v);
            if v > 1.0 {
                assert!((ln_big(&b) - v).abs() < 1e-9 * v.max(1.0));
            }
        }
        assert_eq!(big_ceil_from_ln(0.0), BigUint::one());
        assert_eq!(big_ceil_from_ln(3f64.ln() + 1e-9), BigUint::from(4u32));
    }
}
