use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::Pow;
use serde::{Deserialize, Serialize};
use sturmian_core::cf_engine::synthesize_alpha_cf;
use sturmian_core::words::DEFAULT_WORD_BUDGET;
use sturmian_core::ContinuedFraction;

/// Which experiment a report belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Module {
    Verify,
    Classify,
    Words,
    Complexity,
    Metric,
    Dimension,
}

impl Module {
    pub fn as_str(self) -> &'static str {
        match self {
            Module::Verify => "verify",
            Module::Classify => "classify",
            Module::Words => "words",
            Module::Complexity => "complexity",
            Module::Metric => "metric",
            Module::Dimension => "dimension",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
}

/// How the slope under study is produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SlopeSpec {
    /// `[2, 1, 1, ...]`, the golden slope.
    Fibonacci { depth: usize },
    Explicit { entries: Vec<u64> },
    /// Entries `max(1, round(c q_n^{alpha-1}))`, stopping once `q_n` has
    /// more than `cap_digits` decimal digits.
    Synthesized {
        alpha: f64,
        c: f64,
        depth: usize,
        #[serde(default = "default_cap_digits")]
        cap_digits: u32,
    },
    /// Uniform entries in `1..=max_entry` from a seeded generator.
    Random { seed: u64, depth: usize, max_entry: u64 },
}

fn default_cap_digits() -> u32 {
    2000
}

impl SlopeSpec {
    pub fn build(&self) -> sturmian_core::Result<ContinuedFraction> {
        match self {
            SlopeSpec::Fibonacci { depth } => Ok(ContinuedFraction::fibonacci(*depth)),
            SlopeSpec::Explicit { entries } => ContinuedFraction::explicit(entries),
            SlopeSpec::Synthesized {
                alpha,
                c,
                depth,
                cap_digits,
            } => {
                let cap = BigUint::from(10u32).pow(*cap_digits);
                synthesize_alpha_cf(*alpha, *c, *depth, &cap)
            }
            SlopeSpec::Random {
                seed,
                depth,
                max_entry,
            } => Ok(ContinuedFraction::random(*seed, *depth, *max_entry, true)),
        }
    }

    fn set_depth(&mut self, d: usize) {
        match self {
            SlopeSpec::Fibonacci { depth }
            | SlopeSpec::Synthesized { depth, .. }
            | SlopeSpec::Random { depth, .. } => *depth = d,
            SlopeSpec::Explicit { .. } => {}
        }
    }

    fn set_c(&mut self, v: f64) {
        if let SlopeSpec::Synthesized { c, .. } = self {
            *c = v;
        }
    }
}

impl fmt::Display for SlopeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SlopeSpec::Fibonacci { depth } => write!(f, "fibonacci:{depth}"),
            SlopeSpec::Explicit { entries } => {
                let e: Vec<String> = entries.iter().map(u64::to_string).collect();
                write!(f, "explicit:{}", e.join(","))
            }
            SlopeSpec::Synthesized { alpha, c, depth, .. } => write!(f, "synthesized:{alpha}:{c}:{depth}"),
            SlopeSpec::Random { seed, depth, max_entry } => write!(f, "random:{seed}:{max_entry}:{depth}"),
        }
    }
}

/// `fibonacci[:DEPTH]`, `explicit:A,B,C`, `synthesized[:ALPHA[:C[:DEPTH]]]`,
/// `random:SEED[:MAX[:DEPTH]]`.
impl FromStr for SlopeSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut parts = s.split(':');
        let kind = parts.next().unwrap_or_default();
        let rest: Vec<&str> = parts.collect();
        let num = |i: usize, what: &str| -> Result<Option<f64>, String> {
            rest.get(i)
                .map(|v| v.parse::<f64>().map_err(|_| format!("bad {what} `{v}` in slope `{s}`")))
                .transpose()
        };
        let int = |i: usize, what: &str| -> Result<Option<u64>, String> {
            rest.get(i)
                .map(|v| v.parse::<u64>().map_err(|_| format!("bad {what} `{v}` in slope `{s}`")))
                .transpose()
        };
        let arity = |max: usize| {
            if rest.len() > max {
                Err(format!("too many fields in slope `{s}`"))
            } else {
                Ok(())
            }
        };
        match kind {
            "fibonacci" => {
                arity(1)?;
                Ok(SlopeSpec::Fibonacci {
                    depth: int(0, "depth")?.unwrap_or(30) as usize,
                })
            }
            "explicit" => {
                arity(1)?;
                let list = rest.first().ok_or_else(|| format!("slope `{s}` lists no entries"))?;
                let entries = list
                    .split(',')
                    .map(|v| v.trim().parse::<u64>().map_err(|_| format!("bad entry `{v}` in slope `{s}`")))
                    .collect::<Result<_, _>>()?;
                Ok(SlopeSpec::Explicit { entries })
            }
            "synthesized" => {
                arity(3)?;
                Ok(SlopeSpec::Synthesized {
                    alpha: num(0, "alpha")?.unwrap_or(2.0),
                    c: num(1, "c")?.unwrap_or(1.0),
                    depth: int(2, "depth")?.unwrap_or(14) as usize,
                    cap_digits: default_cap_digits(),
                })
            }
            "random" => {
                arity(3)?;
                Ok(SlopeSpec::Random {
                    seed: int(0, "seed")?.ok_or_else(|| format!("slope `{s}` needs a seed"))?,
                    max_entry: int(1, "max entry")?.unwrap_or(5),
                    depth: int(2, "depth")?.unwrap_or(30) as usize,
                })
            }
            _ => Err(format!(
                "unknown slope `{s}` (expected fibonacci, explicit, synthesized or random)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Grids {
    pub alpha: Vec<f64>,
    pub t: Vec<f64>,
    /// Exponent grid for regularity sweeps; centred on the critical
    /// exponent of each `(alpha, t)` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<Vec<f64>>,
    /// Largest word length for complexity tables.
    pub n_max: usize,
    /// Level range `[first, last]` for psi sweeps; all usable levels when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub levels: Option<[usize; 2]>,
}

impl Default for Grids {
    fn default() -> Self {
        Grids {
            alpha: vec![2.0],
            t: vec![0.6, 0.75, 0.9, 1.0, 1.5],
            r: None,
            n_max: 40,
            levels: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Budgets {
    /// Most symbols any materialized word may have.
    pub word_budget: usize,
    /// Cap on power exponents.
    pub p_cap: u64,
    /// Index horizon for direct spectral sums and branching profiles.
    pub horizon: usize,
    /// Largest `n` evaluated by exhaustive search.
    pub brute_n: usize,
    /// Random branches or points per estimate.
    pub samples: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            word_budget: DEFAULT_WORD_BUDGET,
            p_cap: sturmian_core::complexity::DEFAULT_P_CAP,
            horizon: 400,
            brute_n: 40,
            samples: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DimensionParams {
    /// Entry band `[c1 q^{alpha-1}, c2 q^{alpha-1}]` of the cover estimate.
    pub c1: f64,
    pub c2: f64,
    pub depth: usize,
    /// Exponent of the approximation query on the configured slope.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    /// Constant of the approximation query.
    pub c: f64,
    /// Expansion depth of the random points in the measure probe.
    pub lebesgue_depth: usize,
}

impl Default for DimensionParams {
    fn default() -> Self {
        DimensionParams {
            c1: 0.5,
            c2: 2.0,
            depth: 8,
            beta: None,
            c: 1.0,
            lebesgue_depth: 40,
        }
    }
}

/// A complete, resolved experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub module: Module,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_format")]
    pub format: Format,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default = "default_slope")]
    pub slope: SlopeSpec,
    #[serde(default)]
    pub grids: Grids,
    #[serde(default)]
    pub budgets: Budgets,
    #[serde(default)]
    pub dimension: DimensionParams,
}

fn default_format() -> Format {
    Format::Json
}

fn default_slope() -> SlopeSpec {
    SlopeSpec::Fibonacci { depth: 30 }
}

impl ExperimentConfig {
    pub fn new(module: Module) -> Self {
        ExperimentConfig {
            module,
            seed: 0,
            format: default_format(),
            out: None,
            slope: default_slope(),
            grids: Grids::default(),
            budgets: Budgets::default(),
            dimension: DimensionParams::default(),
        }
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Self::from_toml(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn from_toml(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(s) = &o.slope {
            self.slope = s.clone();
        }
        if let Some(d) = o.depth {
            self.slope.set_depth(d);
        }
        if let Some(c) = o.c {
            self.slope.set_c(c);
            self.dimension.c = c;
        }
        if let Some(a) = &o.alpha {
            self.grids.alpha = a.clone();
        }
        if let Some(t) = &o.t {
            self.grids.t = t.clone();
        }
        if let Some(r) = &o.r_grid {
            self.grids.r = Some(r.clone());
        }
        if let Some(b) = o.budget {
            self.budgets.word_budget = b;
        }
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(p) = &o.out {
            self.out = Some(p.clone());
        }
        if let Some(f) = o.format {
            self.format = f;
        }
    }

    /// Rejects configurations that cannot describe a run, before any
    /// computation starts.
    pub fn validate(&self) -> Result<(), String> {
        let positive = |v: f64, what: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(format!("{what} must be positive and finite, got {v}"))
            }
        };
        match &self.slope {
            SlopeSpec::Explicit { entries } => {
                if entries.is_empty() {
                    return Err("explicit slope has no entries".into());
                }
                if let Some(i) = entries.iter().position(|&a| a == 0) {
                    return Err(format!("explicit slope entry {} is zero", i + 1));
                }
            }
            SlopeSpec::Synthesized { alpha, c, depth, .. } => {
                if !(*alpha > 1.0) || !alpha.is_finite() {
                    return Err(format!("synthesized slope needs alpha > 1, got {alpha}"));
                }
                positive(*c, "synthesized c")?;
                if *depth == 0 {
                    return Err("slope depth must be positive".into());
                }
            }
            SlopeSpec::Fibonacci { depth } => {
                if *depth == 0 {
                    return Err("slope depth must be positive".into());
                }
            }
            SlopeSpec::Random { depth, max_entry, .. } => {
                if *depth == 0 || *max_entry == 0 {
                    return Err("random slope needs positive depth and max entry".into());
                }
            }
        }
        let g = &self.grids;
        if g.alpha.is_empty() {
            return Err("alpha grid is empty".into());
        }
        if let Some(a) = g.alpha.iter().find(|a| !(**a >= 1.0) || !a.is_finite()) {
            return Err(format!("alpha grid values must be at least 1, got {a}"));
        }
        if g.t.is_empty() {
            return Err("t grid is empty".into());
        }
        for &t in &g.t {
            positive(t, "t")?;
        }
        if let Some(r) = &g.r {
            if r.is_empty() {
                return Err("r grid is empty".into());
            }
            if let Some(v) = r.iter().find(|v| !v.is_finite()) {
                return Err(format!("r grid values must be finite, got {v}"));
            }
        }
        if g.n_max == 0 {
            return Err("n_max must be positive".into());
        }
        if let Some([lo, hi]) = g.levels {
            if lo == 0 || hi < lo {
                return Err(format!("level range [{lo}, {hi}] is empty"));
            }
        }
        let b = &self.budgets;
        for (v, what) in [
            (b.word_budget as u64, "word_budget"),
            (b.p_cap, "p_cap"),
            (b.horizon as u64, "horizon"),
            (b.brute_n as u64, "brute_n"),
            (b.samples as u64, "samples"),
        ] {
            if v == 0 {
                return Err(format!("budget {what} must be positive"));
            }
        }
        let d = &self.dimension;
        positive(d.c1, "dimension c1")?;
        positive(d.c2, "dimension c2")?;
        positive(d.c, "dimension c")?;
        if d.c2 < d.c1 {
            return Err(format!("dimension c2 ({}) is below c1 ({})", d.c2, d.c1));
        }
        if d.depth == 0 || d.lebesgue_depth == 0 {
            return Err("dimension depths must be positive".into());
        }
        if let Some(beta) = d.beta {
            if !beta.is_finite() {
                return Err("beta must be finite".into());
            }
        }
        Ok(())
    }
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    /// Slope: fibonacci[:DEPTH] | explicit:A,B,.. | synthesized[:ALPHA[:C[:DEPTH]]] | random:SEED[:MAX[:DEPTH]]
    #[arg(long)]
    pub slope: Option<SlopeSpec>,
    /// Comma-separated exponent grid
    #[arg(long, value_delimiter = ',')]
    pub alpha: Option<Vec<f64>>,
    /// Constant for synthesized slopes and approximation queries
    #[arg(long)]
    pub c: Option<f64>,
    /// Comma-separated weight exponents
    #[arg(long, value_delimiter = ',')]
    pub t: Option<Vec<f64>>,
    /// Comma-separated regularity exponents
    #[arg(long = "r-grid", value_delimiter = ',')]
    pub r_grid: Option<Vec<f64>>,
    /// Number of continued fraction entries of the slope
    #[arg(long)]
    pub depth: Option<usize>,
    /// Word budget in symbols
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output file (json) or directory (csv); stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}
