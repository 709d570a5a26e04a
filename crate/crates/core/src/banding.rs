//! Decision rule shared by every limit-type estimate.
//!
//! Finite data cannot decide a limsup or liminf; a sequence is classified
//! from the trailing half of its values against a fixed band, with an
//! optional trend fit for series that leave the band slowly.

use serde::{Deserialize, Serialize};

use crate::numeric::ls_slope;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Vanishing,
    BoundedPositive,
    Divergent,
    Inconclusive,
}

impl Verdict {
    /// The verdict a reciprocal quantity would receive.
    pub fn mirrored(self) -> Verdict {
        match self {
            Verdict::Vanishing => Verdict::Divergent,
            Verdict::Divergent => Verdict::Vanishing,
            v => v,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Vanishing => "vanishing",
            Verdict::BoundedPositive => "bounded-positive",
            Verdict::Divergent => "divergent",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Band thresholds. Defaults: band `[0.01, 100]`, max/min ratio 100,
/// trend slope 0.05.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandRule {
    pub lower: f64,
    pub upper: f64,
    pub max_ratio: f64,
    pub trend_slope: f64,
}

impl Default for BandRule {
    fn default() -> Self {
        BandRule {
            lower: 0.01,
            upper: 100.0,
            max_ratio: 100.0,
            trend_slope: 0.05,
        }
    }
}

/// Summary of the trailing window of a series, kept in logarithms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowStats {
    pub ln_max: f64,
    pub ln_min: f64,
    pub ln_first: f64,
    pub ln_last: f64,
    pub len: usize,
}

impl WindowStats {
    pub fn max(&self) -> f64 {
        self.ln_max.exp()
    }

    pub fn min(&self) -> f64 {
        self.ln_min.exp()
    }
}

/// The trailing half `values[len/2..]`.
pub fn trailing_half<T>(values: &[T]) -> &[T] {
    &values[values.len() / 2..]
}

pub fn window_stats(ln_values: &[f64]) -> Option<WindowStats> {
    let w = trailing_half(ln_values);
    if w.is_empty() {
        return None;
    }
    Some(WindowStats {
        ln_max: w.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        ln_min: w.iter().cloned().fold(f64::INFINITY, f64::min),
        ln_first: w[0],
        ln_last: w[w.len() - 1],
        len: w.len(),
    })
}

impl BandRule {
    /// Band verdict for a series given by logarithms of its (nonnegative)
    /// values. `+inf` and `-inf` entries are allowed.
    pub fn classify(&self, ln_values: &[f64]) -> Verdict {
        let Some(w) = window_stats(ln_values) else {
            return Verdict::Inconclusive;
        };
        let (lo, hi) = (self.lower.ln(), self.upper.ln());
        if w.ln_max < lo {
            return Verdict::Vanishing;
        }
        if w.ln_min > hi && (w.ln_last > w.ln_first || w.ln_last == f64::INFINITY) {
            return Verdict::Divergent;
        }
        if w.ln_min >= lo && w.ln_max <= hi && w.ln_max - w.ln_min <= self.max_ratio.ln() {
            return Verdict::BoundedPositive;
        }
        Verdict::Inconclusive
    }

    /// Band verdict, falling back to a least-squares trend of the log
    /// values against `abscissa` when the band alone is inconclusive.
    ///
    /// Returns the verdict and the fitted slope.
    pub fn classify_with_trend(&self, ln_values: &[f64], abscissa: &[f64]) -> (Verdict, Option<f64>) {
        let finite: Vec<(f64, f64)> = abscissa
            .iter()
            .zip(ln_values)
            .filter(|(_, y)| y.is_finite())
            .map(|(x, y)| (*x, *y))
            .collect();
        let xs: Vec<f64> = finite.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = finite.iter().map(|p| p.1).collect();
        let slope = ls_slope(&xs, &ys);
        let band = self.classify(ln_values);
        if band != Verdict::Inconclusive {
            return (band, slope);
        }
        let (Some(s), Some(first), Some(last)) = (slope, ys.first(), ys.last()) else {
            return (band, slope);
        };
        let ten = 10f64.ln();
        if s < -self.trend_slope && last - first <= -ten {
            (Verdict::Vanishing, slope)
        } else if s > self.trend_slope && last - first >= ten {
            (Verdict::Divergent, slope)
        } else {
            (Verdict::Inconclusive, slope)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lns(v: &[f64]) -> Vec<f64> {
        v.iter().map(|x| x.ln()).collect()
    }

    #[test]
    fn band_rule_cases() {
        let r = BandRule::default();
        assert_eq!(r.classify(&lns(&[5.0, 1.0, 0.001, 0.002])), Verdict::Vanishing);
        assert_eq!(r.classify(&lns(&[1.0, 1.0, 200.0, 400.0])), Verdict::Divergent);
        assert_eq!(r.classify(&lns(&[1.0, 1.0, 400.0, 200.0])), Verdict::Inconclusive);
        assert_eq!(r.classify(&lns(&[0.5, 2.0, 1.0, 3.0])), Verdict::BoundedPositive);
        assert_eq!(r.classify(&lns(&[0.5, 2.0, 0.02, 50.0])), Verdict::Inconclusive);
        assert_eq!(r.classify(&[]), Verdict::Inconclusive);
    }

    #[test]
    fn trend_fallback_only_applies_when_band_is_silent() {
        let r = BandRule::default();
        let xs: Vec<f64> = (1..=6).map(|i| i as f64).collect();
        let falling = lns(&[50.0, 20.0, 5.0, 1.0, 0.05, 0.005]);
        assert_eq!(r.classify_with_trend(&falling, &xs).0, Verdict::Vanishing);
        let rising = lns(&[0.05, 0.5, 3.0, 20.0, 90.0, 150.0]);
        assert_eq!(r.classify_with_trend(&rising, &xs).0, Verdict::Divergent);
        let flat = lns(&[1.0, 1.1, 0.9, 1.0, 1.0, 1.05]);
        assert_eq!(r.classify_with_trend(&flat, &xs).0, Verdict::BoundedPositive);
    }

    #[test]
    fn infinite_entries_classify_as_divergent() {
        let r = BandRule::default();
        let v = [0.0, 1.0, f64::INFINITY, f64::INFINITY];
        assert_eq!(r.classify(&v), Verdict::Divergent);
    }
}
