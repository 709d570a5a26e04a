//! The acceptance criteria, one test each. Every test writes a single
//! `PASS`/`FAIL` line straight to stdout so the summary survives output
//! capture.

use std::io::Write;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sturmian_core::cf_engine::{complement_cf, convergents, synthesize_alpha_cf};
use sturmian_core::complexity::{equivalence_report, repetitive_bruteforce, repetitive_formula, EquivalenceBudget};
use sturmian_core::jarnik::{box_dimension_estimate, lebesgue_probe};
use sturmian_core::spectral::{
    d_spectral_bruteforce, d_spectral_closed, d_ultra, materialized_pair, metric_finiteness_probe, phi, psi_series,
    varrho, SeriesVerdict, Variant, WeightSpec,
};
use sturmian_core::words::{
    branching_profile_bruteforce, branching_profile_closed, certified_prefix_len, factors, factors_unchecked,
    mechanical_prefix, substitution_words, x_limit_prefix, y_limit_prefix, LimitSource,
    DEFAULT_WORD_BUDGET,
};
use sturmian_core::{BinaryWord, ContinuedFraction, Verdict};

type Check = std::result::Result<String, String>;

fn report(id: u32, name: &str, limit: Option<Duration>, run: impl FnOnce() -> Check) {
    let start = Instant::now();
    let mut outcome = run();
    let elapsed = start.elapsed();
    if let (Ok(detail), Some(limit)) = (&outcome, limit) {
        if elapsed > limit {
            outcome = Err(format!("{detail}; took {elapsed:.2?}, limit {limit:.0?}"));
        }
    }
    let line = match &outcome {
        Ok(detail) => format!("criterion {id:>2} PASS  {name}: {detail} ({elapsed:.2?})\n"),
        Err(detail) => format!("criterion {id:>2} FAIL  {name}: {detail} ({elapsed:.2?})\n"),
    };
    std::io::stdout().lock().write_all(line.as_bytes()).unwrap();
    if let Err(detail) = outcome {
        panic!("criterion {id} failed: {detail}");
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn big(x: u64) -> BigUint {
    BigUint::from(x)
}

fn synthesized(alpha: f64, depth: usize, cap_digits: u32) -> ContinuedFraction {
    synthesize_alpha_cf(alpha, 1.0, depth, &big(10).pow(cap_digits)).unwrap()
}

fn mixed() -> ContinuedFraction {
    ContinuedFraction::explicit(&[3, 2, 4, 1, 3, 2, 5, 1, 2, 3, 1, 4, 2, 2, 1, 3, 1, 1, 2, 2]).unwrap()
}

#[test]
fn criterion_01_exact_continued_fractions() {
    report(1, "convergent recursion, gcd, growth and complement shift", Some(Duration::from_secs(1)), || {
        for seed in 0..20 {
            let cf = ContinuedFraction::random(seed, 30, 50, true);
            let t = convergents(&cf);
            t.check_invariants(&cf).map_err(|e| format!("seed {seed}: {e}"))?;
            let comp = complement_cf(&cf).map_err(|e| e.to_string())?;
            let tc = convergents(&comp);
            tc.check_invariants(&comp).map_err(|e| format!("seed {seed} complement: {e}"))?;
            for n in 1..=30 {
                ensure(tc.q[n] == t.q[n - 1], || format!("seed {seed}: q_{n}(1-theta) != q_{}(theta)", n - 1))?;
            }
            ensure(complement_cf(&comp).unwrap().entries() == cf.entries(), || format!("seed {seed}: complement not involutive"))?;
        }
        Ok("20 slopes at depth 30".into())
    });
}

#[test]
fn criterion_02_sturmian_structure() {
    report(2, "n + 1 factors and one right special factor", Some(Duration::from_secs(60)), || {
        let slopes = [
            ContinuedFraction::fibonacci(40),
            synthesized(1.5, 14, 80),
            synthesized(2.0, 10, 80),
            ContinuedFraction::random(101, 30, 5, true),
            ContinuedFraction::random(202, 30, 5, true),
        ];
        for cf in &slopes {
            let len = certified_prefix_len(cf, 200).unwrap().to_usize().unwrap();
            let prefix = x_limit_prefix(cf, len, DEFAULT_WORD_BUDGET).map_err(|e| e.to_string())?;
            for n in 0..=200 {
                let slice = factors(&prefix, n, cf).map_err(|e| format!("n={n}: {e}"))?;
                let special: Vec<&BinaryWord> = slice
                    .factors
                    .iter()
                    .filter(|w| {
                        let mut a = w.symbols().to_vec();
                        a.push(0);
                        let mut b = w.symbols().to_vec();
                        b.push(1);
                        prefix.contains(&BinaryWord::from_symbols(a).unwrap())
                            && prefix.contains(&BinaryWord::from_symbols(b).unwrap())
                    })
                    .collect();
                ensure(slice.factors.len() == n + 1, || format!("n={n}: {} factors", slice.factors.len()))?;
                ensure(special.len() == 1 && special[0] == &slice.right_special, || {
                    format!("n={n}: {} right special factors", special.len())
                })?;
            }
        }
        Ok("5 slopes, n <= 200".into())
    });
}

#[test]
fn criterion_03_repetitive_function() {
    report(3, "brute-force R(n) equals the closed form", Some(Duration::from_secs(120)), || {
        for (cf, n_max) in [(ContinuedFraction::fibonacci(40), 100usize), (synthesized(2.0, 10, 80), 50)] {
            // long enough to hold, for every n <= n_max, a factor together
            // with its longest return: a window of length R(R(n) + n)
            let span = repetitive_formula(&cf, n_max as u64).unwrap() + n_max;
            let len = repetitive_formula(&cf, span.to_u64().unwrap()).unwrap() + &span;
            let prefix = mechanical_prefix(&cf, len.to_usize().unwrap(), DEFAULT_WORD_BUDGET).map_err(|e| e.to_string())?;
            for n in 1..=n_max {
                let brute = repetitive_bruteforce(&prefix, n).map_err(|e| format!("n={n}: {e}"))?;
                let formula = repetitive_formula(&cf, n as u64).map_err(|e| e.to_string())?;
                ensure(big(brute) == formula, || format!("n={n}: brute {brute}, formula {formula}"))?;
            }
        }
        Ok("Fibonacci n <= 100, synthesized alpha=2 n <= 50".into())
    });
}

#[test]
fn criterion_04_branching_profiles() {
    report(4, "brute-force and closed branching profiles coincide", None, || {
        let slopes = [ContinuedFraction::fibonacci(40), mixed(), ContinuedFraction::random(7, 30, 6, true)];
        for cf in &slopes {
            let len = certified_prefix_len(cf, 2000).unwrap().to_usize().unwrap();
            for source in [LimitSource::XLimit, LimitSource::YLimit] {
                let prefix = match source {
                    LimitSource::XLimit => x_limit_prefix(cf, len, DEFAULT_WORD_BUDGET),
                    LimitSource::YLimit => y_limit_prefix(cf, len, DEFAULT_WORD_BUDGET),
                }
                .map_err(|e| e.to_string())?;
                let brute = branching_profile_bruteforce(&prefix, 2000, cf, source).map_err(|e| e.to_string())?;
                let closed = branching_profile_closed(cf, 2000, source).map_err(|e| e.to_string())?;
                ensure(brute == closed, || format!("{source:?} profiles differ on {:?}", cf.entries()))?;
            }
        }
        Ok("3 slopes, both limit words, N <= 2000".into())
    });
}

#[test]
fn criterion_05_substitution_words() {
    report(5, "R_k and L_k lengths, recursions, nesting and membership", None, || {
        let budget = 1_000_000;
        let mut checked = 0;
        let mut members = 0;
        for cf in [ContinuedFraction::fibonacci(40), mixed(), synthesized(2.0, 10, 80)] {
            let t = convergents(&cf);
            let mut prev = substitution_words(&cf, 0, true, budget).map_err(|e| e.to_string())?;
            let mut k = 1;
            while 2 * k <= cf.len() && t.q[2 * k] <= big(budget as u64) {
                let cur = substitution_words(&cf, k, true, budget).map_err(|e| e.to_string())?;
                let (r, l) = (cur.r().unwrap(), cur.l().unwrap());
                let (r0, l0) = (prev.r().unwrap(), prev.l().unwrap());
                ensure(big(r.len() as u64) == t.q[2 * k] && big(l.len() as u64) == t.q[2 * k - 1], || {
                    format!("k={k}: lengths")
                })?;
                let a_odd = cf.level_entry(2 * k - 1).unwrap().to_usize().unwrap();
                let a_even = cf.level_entry(2 * k).unwrap().to_usize().unwrap();
                ensure(*l == l0.concat(&r0.repeat(a_odd)), || format!("k={k}: L recursion"))?;
                ensure(*r == r0.concat(&l.repeat(a_even)), || format!("k={k}: R recursion"))?;
                ensure(r0.is_prefix_of(r) && l0.is_prefix_of(l), || format!("k={k}: nesting"))?;
                // any window of length R(n) holds every factor of length n
                let window = repetitive_formula(&cf, r.len() as u64).unwrap();
                if window <= big(budget as u64) {
                    let mech = mechanical_prefix(&cf, window.to_usize().unwrap(), budget).unwrap();
                    ensure(mech.contains(r) && mech.contains(l), || format!("k={k}: not a factor"))?;
                    members += 1;
                }
                checked += 1;
                prev = cur;
                k += 1;
            }
            if 2 * k <= cf.len() {
                ensure(substitution_words(&cf, k, false, budget).unwrap().is_lazy(), || {
                    format!("k={k}: over-budget pair materialized")
                })?;
            }
        }
        ensure(members > 0, || "no membership check fit the budget".into())?;
        Ok(format!("{checked} pairs, {members} membership checks"))
    });
}

#[test]
fn criterion_06_phi_identity() {
    report(6, "phi at the last j is a pure power", None, || {
        let mut worst: f64 = 0.0;
        let mut count = 0;
        for cf in [synthesized(2.0, 10, 80), mixed(), ContinuedFraction::fibonacci(30)] {
            let t = convergents(&cf);
            for m in 0..5 {
                let a = cf.level_entry(m + 2).unwrap();
                let q = t.q[m + 2].to_f64().unwrap();
                for r in [0.0, 0.2, 1.0 / 3.0, 0.5, 0.8, 1.0] {
                    for tt in [0.5, 0.75, 1.0, 1.2, 2.0, 3.0] {
                        let got = phi(&cf, m, &a, r, tt).map_err(|e| e.to_string())?;
                        let want = q.powf(tt * (r - 1.0));
                        let rel = (got.ln.exp() - want).abs() / want;
                        worst = worst.max(rel);
                        count += 1;
                    }
                }
            }
        }
        ensure(worst <= 1e-12, || format!("relative error {worst:e}"))?;
        Ok(format!("{count} grid points, worst relative error {worst:.1e}"))
    });
}

#[test]
fn criterion_07_spectral_oracle() {
    report(7, "brute-force and closed spectral distances agree", None, || {
        let cf = ContinuedFraction::fibonacci(60);
        let horizon = 10_000;
        let lang_len = certified_prefix_len(&cf, horizon).unwrap().to_usize().unwrap();
        let language = x_limit_prefix(&cf, lang_len, DEFAULT_WORD_BUDGET).map_err(|e| e.to_string())?;
        let mut variants: Vec<Variant> = (1..=4).map(|m| Variant::Unshifted { m }).collect();
        variants.extend((0..=4).map(|m| Variant::Shifted { m, j: big(1) }));
        let mut worst: f64 = 0.0;
        for t in [1.2, 2.0] {
            let w = WeightSpec::new(t).unwrap();
            for v in &variants {
                let (a, b) = materialized_pair(&cf, v, horizon + 1, DEFAULT_WORD_BUDGET).map_err(|e| e.to_string())?;
                let brute = d_spectral_bruteforce(&a, &b, &w, horizon, &language).map_err(|e| e.to_string())?;
                let closed = d_spectral_closed(&cf, v, &w, None).map_err(|e| e.to_string())?.spectral;
                let gap = (brute.value - closed.value).abs();
                let allowed = brute.tail_bound + closed.tail_bound;
                ensure(brute.rigorous && closed.rigorous && gap <= allowed, || {
                    format!("t={t} {v:?}: |{} - {}| = {gap:e} > {allowed:e}", brute.value, closed.value)
                })?;
                worst = worst.max(gap / allowed);
            }
        }
        Ok(format!("{} pairs, t in {{1.2, 2}}, worst gap/allowance {worst:.2e}", variants.len()))
    });
}

#[test]
fn criterion_08_equivalence_desk_check() {
    report(8, "four-way classification agrees", None, || {
        let budget = EquivalenceBudget::default();
        let syn = synthesized(2.0, 10, 300);
        let r = equivalence_report(&syn, 2.0, &budget).map_err(|e| e.to_string())?;
        ensure(r.verdicts().iter().all(|v| *v == Verdict::BoundedPositive), || {
            format!("synthesized alpha=2: {:?}", r.verdicts())
        })?;
        let fib = ContinuedFraction::fibonacci(50);
        let r = equivalence_report(&fib, 2.0, &budget).map_err(|e| e.to_string())?;
        let v = r.verdicts();
        ensure(
            v.iter().all(|x| matches!(x, Verdict::Vanishing | Verdict::Divergent)) && r.agreement,
            || format!("Fibonacci alpha=2: {v:?}"),
        )?;
        let r1 = equivalence_report(&fib, 1.0, &budget).map_err(|e| e.to_string())?;
        ensure(r1.repulsive.verdict == r1.classic_verdict, || {
            format!("alpha=1: {:?} vs classic {:?}", r1.repulsive.verdict, r1.classic_verdict)
        })?;
        Ok(format!(
            "Fibonacci alpha=2 {:?}, alpha=1 repulsive {:?} / classic {:?}",
            v, r1.repulsive.verdict, r1.classic_verdict
        ))
    });
}

#[test]
fn criterion_09_regularity_transition() {
    report(9, "psi transition at r*", Some(Duration::from_secs(60)), || {
        let cf = synthesized(2.0, 14, 2000);
        let w = WeightSpec::new(0.75).unwrap();
        let r_star = varrho(2.0, 0.75);
        ensure((r_star - 1.0 / 3.0).abs() < 1e-15, || format!("r* = {r_star}"))?;
        let top = cf.len() - 4;
        let sup = |r: f64| -> std::result::Result<Vec<f64>, String> {
            let s = psi_series(&cf, &w, r, 1..=top, true).map_err(|e| e.to_string())?;
            s.rows
                .iter()
                .map(|row| row.ln_sup_j_psi.ok_or_else(|| format!("level {} has no shifted pairs", row.m)))
                .collect()
        };
        let ten = 10f64.ln();
        let at = sup(r_star)?;
        let tail = &at[at.len() / 2..];
        let spread = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - tail.iter().cloned().fold(f64::INFINITY, f64::min);
        ensure(spread <= 2.0 * ten, || format!("ratio {:.3e} at r*", spread.exp()))?;
        let up = sup(r_star + 0.15)?;
        let growth = up.last().unwrap() - up.first().unwrap();
        ensure(growth >= ten, || format!("growth {:.3e} at r*+0.15", growth.exp()))?;
        let down = sup(r_star - 0.15)?;
        let decay = down.first().unwrap() - down.last().unwrap();
        ensure(decay >= ten, || format!("decay {:.3e} at r*-0.15", decay.exp()))?;
        Ok(format!(
            "levels 1..={top}: window ratio {:.2}, growth {:.2e}, decay {:.2e}",
            spread.exp(),
            growth.exp(),
            decay.exp()
        ))
    });
}

#[test]
fn criterion_10_finiteness_regimes() {
    report(10, "spectral series diverges at t = 1 - 1/alpha and converges above", None, || {
        let cf = synthesized(2.0, 12, 250);
        let low = metric_finiteness_probe(&cf, &WeightSpec::new(0.5).unwrap(), 1).map_err(|e| e.to_string())?;
        let floor = low.ln_increments.iter().cloned().fold(f64::INFINITY, f64::min);
        ensure(low.verdict == SeriesVerdict::Divergent && floor > f64::NEG_INFINITY, || {
            format!("t=0.5: {:?}", low.verdict)
        })?;
        let high = metric_finiteness_probe(&cf, &WeightSpec::new(0.7).unwrap(), 1).map_err(|e| e.to_string())?;
        ensure(high.verdict == SeriesVerdict::Convergent, || format!("t=0.7: {:?}", high.verdict))?;
        Ok(format!("t=0.5 smallest increment {:.3}, t=0.7 convergent", floor.exp()))
    });
}

#[test]
fn criterion_11_dimension_estimate() {
    report(11, "cover dimension estimates", Some(Duration::from_secs(120)), || {
        let two = box_dimension_estimate(2.0, 0.5, 2.0, 8, 1000, 11).map_err(|e| e.to_string())?;
        let three = box_dimension_estimate(3.0, 0.5, 2.0, 8, 1000, 11).map_err(|e| e.to_string())?;
        let detail = format!("alpha=2 {:.4} (want [0.55, 0.80]), alpha=3 {:.4} (want [0.40, 0.62])", two.dimension, three.dimension);
        let ok = (0.55..=0.80).contains(&two.dimension) && (0.40..=0.62).contains(&three.dimension);
        ensure(ok, || detail.clone())?;
        Ok(detail)
    });
}

#[test]
fn criterion_12_full_measure_probe() {
    report(12, "uniform slopes are rarely divergent at alpha=2", None, || {
        let r = lebesgue_probe(2.0, 1000, 25, 5).map_err(|e| e.to_string())?.unwrap();
        ensure(r.fraction >= 0.95, || format!("fraction {}", r.fraction))?;
        Ok(format!("fraction not divergent {:.3}", r.fraction))
    });
}

#[test]
fn criterion_13_metric_axioms() {
    report(13, "ultrametric and symmetry axioms", None, || {
        let cf = mixed();
        let horizon = 300;
        let lang_len = certified_prefix_len(&cf, horizon).unwrap().to_usize().unwrap();
        let language = x_limit_prefix(&cf, lang_len, DEFAULT_WORD_BUDGET).unwrap();
        let source = x_limit_prefix(&cf, 50_000, DEFAULT_WORD_BUDGET).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let mut draw = || source.shift(rng.gen_range(0..source.len() - 2 * horizon)).prefix(horizon + 1);
        let ultra = WeightSpec::new(1.0).unwrap();
        let spectral = WeightSpec::new(1.5).unwrap();
        let mut triples = 0;
        while triples < 1000 {
            let (u, v, w) = (draw(), draw(), draw());
            let (Ok(uv), Ok(vw), Ok(uw)) = (d_ultra(&u, &v, &ultra), d_ultra(&v, &w, &ultra), d_ultra(&u, &w, &ultra))
            else {
                continue;
            };
            ensure(d_ultra(&v, &u, &ultra).unwrap() == uv, || "ultra symmetry".into())?;
            ensure(uv > 0.0 && d_ultra(&u, &u, &ultra).is_err(), || "ultra identity".into())?;
            ensure(uw <= uv.max(vw), || format!("strong triangle {uw} > max({uv}, {vw})"))?;
            let s_uv = d_spectral_bruteforce(&u, &v, &spectral, horizon, &language).map_err(|e| e.to_string())?;
            let s_vu = d_spectral_bruteforce(&v, &u, &spectral, horizon, &language).map_err(|e| e.to_string())?;
            ensure(s_uv == s_vu, || "spectral symmetry".into())?;
            let lcp = BigUint::from(u.lcp(&v).max(1));
            ensure(s_uv.ln_value >= spectral.ln_delta(&lcp), || "spectral below ultra".into())?;
            triples += 1;
        }
        Ok(format!("{triples} triples"))
    });
}

#[test]
fn criterion_14_involution_symmetry() {
    report(14, "factor sets of theta and 1 - theta are exchanged by eta", None, || {
        for cf in [ContinuedFraction::fibonacci(30), mixed()] {
            let comp = complement_cf(&cf).map_err(|e| e.to_string())?;
            let len = certified_prefix_len(&cf, 50).unwrap().to_usize().unwrap();
            let a = mechanical_prefix(&cf, len, DEFAULT_WORD_BUDGET).map_err(|e| e.to_string())?;
            let b = mechanical_prefix(&comp, len, DEFAULT_WORD_BUDGET).map_err(|e| e.to_string())?;
            for n in 0..=50 {
                let sa = factors(&a, n, &cf).map_err(|e| format!("n={n}: {e}"))?;
                let sb = factors_unchecked(&b, n).map_err(|e| format!("n={n}: {e}"))?;
                ensure(sa.factors == sb.eta().factors, || format!("n={n}: factor sets differ"))?;
            }
        }
        Ok("2 slope pairs, n <= 50".into())
    });
}
