use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde_json::{json, Value};

use sturmian_core::cf_engine::{alpha_type_sequence, convergents};
use sturmian_core::complexity::{
    equivalence_report, power_table, repetitive_prefix_len, repetitive_table, repulsiveness_table, AValue,
    EquivalenceBudget,
};
use sturmian_core::jarnik::{box_dimension_estimate, jarnik_hits, lebesgue_probe};
use sturmian_core::spectral::{
    d_spectral_closed, metric_finiteness_probe, psi_series, regularity_probe, varrho, Variant, WeightSpec,
};
use sturmian_core::words::{
    branching_profile_closed, certified_prefix_len, mechanical_prefix, substitution_words, x_limit_prefix,
    y_limit_prefix, LimitSource,
};
use sturmian_core::{ContinuedFraction, Error, Result};

use crate::config::ExperimentConfig;
use crate::emit::{num, opt_num, Report, Table};

/// Words longer than this are listed by length only.
const SHOW_SYMBOLS: usize = 256;

fn report(command: &'static str, cfg: &ExperimentConfig, summary: Value, tables: Vec<Table>) -> Report {
    Report {
        command,
        config: cfg.clone(),
        summary,
        tables,
    }
}

fn to_len(n: BigUint, budget: usize) -> Result<usize> {
    n.to_usize().ok_or(Error::BudgetExceeded {
        requested: n.to_string(),
        budget,
    })
}

fn a_value(v: AValue) -> Value {
    match v {
        AValue::Finite(x) => num(x),
        AValue::Infinite => Value::from("inf"),
    }
}

fn entries_summary(cf: &ContinuedFraction) -> Value {
    let shown: Vec<String> = cf.entries().iter().take(12).map(|e| e.to_string()).collect();
    json!({ "depth": cf.len(), "leading_entries": shown })
}

pub fn classify(cf: &ContinuedFraction, cfg: &ExperimentConfig) -> Result<Report> {
    let t = convergents(cf);
    let reports = cfg
        .grids
        .alpha
        .par_iter()
        .map(|&a| alpha_type_sequence(cf, a))
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new("alpha_type", &["alpha", "n", "entry", "ln_q_prev", "ln_s"]);
    let mut verdicts = Vec::new();
    for r in &reports {
        for (i, ln_s) in r.ln_s.iter().enumerate() {
            table.push(vec![
                num(r.alpha),
                Value::from(i + 1),
                Value::from(cf.entries()[i].to_string()),
                num(t.ln_q(i)),
                num(*ln_s),
            ]);
        }
        verdicts.push(json!({
            "alpha": r.alpha,
            "verdict": r.verdict,
            "window_max": r.window_max,
            "window_min": r.window_min,
            "rule": r.rule,
        }));
    }
    let summary = json!({ "slope": entries_summary(cf), "verdicts": verdicts });
    Ok(report("classify", cfg, summary, vec![table]))
}

pub fn words(cf: &ContinuedFraction, cfg: &ExperimentConfig) -> Result<Report> {
    let budget = cfg.budgets.word_budget;
    let len = cfg.budgets.horizon;
    let mut subs = Table::new("substitutions", &["k", "r_len", "l_len", "r", "l"]);
    for k in 0..=cf.len() / 2 {
        let pair = substitution_words(cf, k, false, budget)?;
        let show = |w: Option<&sturmian_core::BinaryWord>| match w {
            Some(w) if w.len() <= SHOW_SYMBOLS => Value::from(w.to_string()),
            _ => Value::Null,
        };
        subs.push(vec![
            Value::from(k),
            Value::from(pair.r_len.to_string()),
            Value::from(pair.l_len.to_string()),
            show(pair.r()),
            show(pair.l()),
        ]);
    }
    let mut prefixes = Table::new("prefixes", &["source", "length", "symbols"]);
    let rotation = mechanical_prefix(cf, len, budget)?;
    let x = x_limit_prefix(cf, len, budget)?;
    let y = y_limit_prefix(cf, len, budget)?;
    for (name, w) in [("rotation", &rotation), ("x-limit", &x), ("y-limit", &y)] {
        prefixes.push(vec![Value::from(name), Value::from(w.len()), Value::from(w.to_string())]);
    }
    let mut branching = Table::new("branching", &["source", "index"]);
    for source in [LimitSource::XLimit, LimitSource::YLimit] {
        let p = branching_profile_closed(cf, len as u64, source)?;
        for h in p.hits {
            branching.push(vec![serde_json::to_value(source).unwrap(), Value::from(h)]);
        }
    }
    let summary = json!({ "slope": entries_summary(cf), "prefix_length": len });
    Ok(report("words", cfg, summary, vec![subs, prefixes, branching]))
}

pub fn complexity(cf: &ContinuedFraction, cfg: &ExperimentConfig) -> Result<Report> {
    let b = &cfg.budgets;
    let n_max = cfg.grids.n_max;
    let rep_len = to_len(repetitive_prefix_len(cf, b.brute_n.min(n_max))?, b.word_budget)?;
    let cert_len = to_len(certified_prefix_len(cf, n_max)?, b.word_budget)?;
    let prefix = x_limit_prefix(cf, rep_len.max(cert_len), b.word_budget)?;
    let budget = EquivalenceBudget {
        brute_n: b.brute_n,
        word_budget: b.word_budget,
        p_cap: b.p_cap,
    };
    let per_alpha = cfg
        .grids
        .alpha
        .par_iter()
        .map(|&alpha| {
            let rep = repetitive_table(cf, alpha, n_max, None)?;
            let rep_brute = repetitive_table(cf, alpha, b.brute_n.min(n_max), Some(&prefix))?;
            let rpl = repulsiveness_table(&prefix, cf, alpha, n_max)?;
            let pow = power_table(&prefix, alpha, n_max, b.p_cap)?;
            let eq = equivalence_report(cf, alpha, &budget)?;
            Ok((alpha, rep, rep_brute, rpl, pow, eq))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Table::new(
        "complexity",
        &[
            "alpha", "n", "r_formula", "r_search", "ln_r_ratio", "a_alpha", "a_running_min", "a_classic", "q_power",
            "q_capped", "q_truncated",
        ],
    );
    let mut levels = Table::new("levels", &["alpha", "series", "level", "ln_value"]);
    let mut verdicts = Vec::new();
    for (alpha, rep, rep_brute, rpl, pow, eq) in &per_alpha {
        for i in 0..n_max {
            let brute = rep_brute.rows.get(i).and_then(|r| r.r_brute);
            rows.push(vec![
                num(*alpha),
                Value::from(i + 1),
                Value::from(rep.rows[i].r_formula.to_string()),
                brute.map_or(Value::Null, Value::from),
                num(rep.rows[i].ln_ratio),
                a_value(rpl.rows[i].a),
                a_value(rpl.running_min[i]),
                a_value(rpl.rows[i].classic),
                Value::from(pow.rows[i].q),
                Value::from(pow.rows[i].capped),
                Value::from(pow.rows[i].truncated),
            ]);
        }
        for (name, s) in [
            ("repetitive", &eq.repetitive),
            ("repulsive", &eq.repulsive),
            ("finite", &eq.finite),
            ("classic", &eq.classic),
        ] {
            for (l, v) in s.levels.iter().zip(&s.ln_values) {
                levels.push(vec![num(*alpha), Value::from(name), Value::from(*l), num(*v)]);
            }
        }
        verdicts.push(json!({
            "alpha": alpha,
            "alpha_type": eq.alpha_type,
            "repetitive": eq.repetitive.verdict,
            "repulsive": eq.repulsive.verdict,
            "finite": eq.finite.verdict,
            "classic": eq.classic_verdict,
            "classic_ell": a_value(eq.classic_ell),
            "agreement": eq.agreement,
        }));
    }
    let summary = json!({
        "slope": entries_summary(cf),
        "prefix_length": prefix.len(),
        "verdicts": verdicts,
    });
    Ok(report("complexity", cfg, summary, vec![rows, levels]))
}

fn default_r_grid(alpha: f64, t: f64) -> Vec<f64> {
    let centre = varrho(alpha, t);
    (-3..=3).map(|i| centre + 0.1 * i as f64).collect()
}

fn level_range(cf: &ContinuedFraction, cfg: &ExperimentConfig) -> Result<std::ops::RangeInclusive<usize>> {
    match cfg.grids.levels {
        Some([lo, hi]) => Ok(lo..=hi),
        None if cf.len() >= 5 => Ok(1..=cf.len() - 4),
        None => Err(Error::InsufficientDepth {
            needed: 5,
            available: cf.len(),
        }),
    }
}

pub fn metric(cf: &ContinuedFraction, cfg: &ExperimentConfig) -> Result<Report> {
    let levels = level_range(cf, cfg)?;
    let points: Vec<(f64, f64)> = cfg
        .grids
        .t
        .iter()
        .flat_map(|&t| cfg.grids.alpha.iter().map(move |&a| (t, a)))
        .collect();
    let per_t = cfg
        .grids
        .t
        .par_iter()
        .map(|&t| {
            let w = WeightSpec::new(t)?;
            let series = psi_series(cf, &w, 0.0, levels.clone(), true)?;
            let finite = metric_finiteness_probe(cf, &w, 1)?;
            let d1 = d_spectral_closed(cf, &Variant::Unshifted { m: 1 }, &w, None)?;
            Ok((t, series, finite, d1))
        })
        .collect::<Result<Vec<_>>>()?;
    let probes = points
        .par_iter()
        .map(|&(t, alpha)| {
            let w = WeightSpec::new(t)?;
            let grid = cfg.grids.r.clone().unwrap_or_else(|| default_r_grid(alpha, t));
            regularity_probe(cf, alpha, &w, &grid, levels.clone())
        })
        .collect::<Result<Vec<_>>>()?;

    let mut tables = Vec::new();
    let mut distances = Vec::new();
    for (t, series, finite, d1) in &per_t {
        let mut tab = Table::new(
            format!("psi_t{t}"),
            &["m", "source", "q", "ln_distance_unshifted", "ln_distance_best_shift", "best_j", "rigorous"],
        );
        for row in &series.rows {
            tab.push(vec![
                Value::from(row.m),
                serde_json::to_value(row.source).unwrap(),
                Value::from(row.q.to_string()),
                num(row.ln_psi),
                opt_num(row.ln_sup_j_psi),
                row.argmax_j.as_ref().map_or(Value::Null, |j| Value::from(j.to_string())),
                Value::from(row.rigorous),
            ]);
        }
        tables.push(tab);
        distances.push(json!({
            "t": t,
            "unshifted_m1": d1.spectral,
            "ln_ultra_m1": d1.ln_ultra,
            "series": finite.verdict,
            "increment_slope": finite.slope,
        }));
    }
    let mut reg = Table::new(
        "regularity",
        &["alpha", "t", "r", "trend", "slope", "ln_first", "ln_last", "window_ratio"],
    );
    let mut transitions = Vec::new();
    for p in &probes {
        for v in &p.verdicts {
            reg.push(vec![
                num(v.alpha),
                num(v.t),
                num(v.r),
                serde_json::to_value(v.trend).unwrap(),
                opt_num(v.slope),
                num(v.ln_first),
                num(v.ln_last),
                num(v.window_ratio),
            ]);
        }
        transitions.push(json!({
            "alpha": p.alpha,
            "t": p.t,
            "critical_r": p.r_star,
            "r_lo": p.r_lo,
            "r_hi": p.r_hi,
            "transition_matches": p.transition_matches,
        }));
    }
    tables.push(reg);
    let summary = json!({
        "slope": entries_summary(cf),
        "levels": [levels.start(), levels.end()],
        "distances": distances,
        "transitions": transitions,
    });
    Ok(report("metric", cfg, summary, tables))
}

pub fn dimension(cf: &ContinuedFraction, cfg: &ExperimentConfig) -> Result<Report> {
    let d = &cfg.dimension;
    let samples = cfg.budgets.samples;
    let estimates = cfg
        .grids
        .alpha
        .par_iter()
        .map(|&alpha| {
            let cover = box_dimension_estimate(alpha, d.c1, d.c2, d.depth, samples, cfg.seed)?;
            let measure = lebesgue_probe(alpha, samples, d.lebesgue_depth, cfg.seed)?;
            Ok((cover, measure))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut records = Table::new("cover", &["alpha", "depth", "mean_ln_branches", "mean_ln_inv_diameter", "ratio"]);
    let mut summary_rows = Vec::new();
    for (cover, measure) in &estimates {
        for r in &cover.records {
            records.push(vec![
                num(cover.alpha),
                Value::from(r.depth),
                num(r.mean_ln_branches),
                num(r.mean_ln_inv_diameter),
                num(r.mean_ln_branches / r.mean_ln_inv_diameter),
            ]);
        }
        summary_rows.push(json!({
            "alpha": cover.alpha,
            "dimension": cover.dimension,
            "spread": cover.spread,
            "band": [cover.band.0, cover.band.1],
            "measure_fraction": measure.as_ref().map(|m| m.fraction),
        }));
    }
    let mut tables = vec![records];
    let mut query = Value::Null;
    if let Some(beta) = d.beta {
        let depth = cf.len().saturating_sub(1);
        let q = jarnik_hits(cf, beta, d.c, depth)?;
        let mut tab = Table::new("approximation", &["n", "class"]);
        for (class, ns) in [("hit", &q.hits), ("miss", &q.misses), ("undecided", &q.undecided)] {
            for n in ns {
                tab.push(vec![Value::from(*n), Value::from(class)]);
            }
        }
        tab.rows.sort_by_key(|r| r[0].as_u64());
        tables.push(tab);
        query = json!({
            "beta": beta,
            "c": d.c,
            "depth": depth,
            "hits": q.hits.len(),
            "misses": q.misses.len(),
            "undecided": q.undecided.len(),
        });
    }
    let summary = json!({
        "estimates": summary_rows,
        "approximation": query,
    });
    Ok(report("dimension", cfg, summary, tables))
}
