//! End-to-end benchmark: build candidates, run selectors per budget, verify
//! view answers against the base graph, report one CSV row per run.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::{generate_copurchase_graph, generate_social_graph};
use crate::benefit::EvalContext;
use crate::error::{Error, Result};
use crate::graph::PropertyGraph;
use crate::io::{load_graph, GraphFormat};
use crate::pattern::{load_workload, PatternQuery};
use crate::schema::infer_schema;
use crate::selector::{
    branch_and_bound_select, dps, gga_with, greedy_select, pick, prune_contained, sizes_of, GgaParams, SIZE_QUANTUM,
};
use crate::view::{build_view_pattern, materialize_view, ExtendedGraphView};

pub const CSV_HEADER: &str =
    "algorithm,budget,total_benefit,covered_fraction,candidate_views,selected_bytes,runtime_ms";

/// Environment variable that replaces every seed in a config.
pub const SEED_ENV: &str = "GVIEW_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Dps,
    Greedy,
    Bnb,
    Gga,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Dps, Algorithm::Greedy, Algorithm::Bnb, Algorithm::Gga];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Dps => "dps",
            Algorithm::Greedy => "greedy",
            Algorithm::Bnb => "bnb",
            Algorithm::Gga => "gga",
        }
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown algorithm {s:?} (expected dps, greedy, bnb or gga)")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "lowercase")]
pub enum GraphSpec {
    Social {
        persons: usize,
        orgs: usize,
        tags: usize,
        seed: u64,
    },
    Copurchase {
        products: usize,
        seed: u64,
    },
    File {
        path: PathBuf,
    },
}

impl GraphSpec {
    pub fn build(&self) -> Result<PropertyGraph> {
        match self {
            GraphSpec::Social {
                persons,
                orgs,
                tags,
                seed,
            } => Ok(generate_social_graph(*persons, *orgs, *tags, *seed)),
            GraphSpec::Copurchase { products, seed } => Ok(generate_copurchase_graph(*products, *seed)),
            GraphSpec::File { path } => load_graph(path, GraphFormat::from_path(path)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GgaConfig {
    pub p_f: f64,
    pub p_c: f64,
    #[serde(default = "default_generations")]
    pub generations: usize,
    pub seed: u64,
}

fn default_generations() -> usize {
    10
}

impl GgaConfig {
    pub fn params(&self) -> GgaParams {
        GgaParams {
            p_f: self.p_f,
            p_c: self.p_c,
            seed: self.seed,
            max_generations: self.generations,
            ..GgaParams::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub graph: GraphSpec,
    pub workload: PathBuf,
    pub algorithms: Vec<Algorithm>,
    /// Absolute budgets in bytes.
    #[serde(default)]
    pub budgets: Vec<u64>,
    /// Budgets as fractions of the total candidate size.
    #[serde(default)]
    pub budget_fractions: Vec<f64>,
    pub gga: GgaConfig,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Skip candidates whose pattern another candidate answers.
    #[serde(default)]
    pub skip_contained: bool,
    /// Record wall-clock time; otherwise the column is 0 so reports are
    /// reproducible byte for byte.
    #[serde(default)]
    pub report_runtime: bool,
}

impl BenchConfig {
    /// Reads a config, resolving relative paths against its directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let mut cfg: BenchConfig =
            serde_json::from_str(&text).map_err(|e| Error::parse(path.display().to_string(), e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        resolve(&mut cfg.workload);
        if let GraphSpec::File { path } = &mut cfg.graph {
            resolve(path);
        }
        if let Some(out) = &mut cfg.output_dir {
            resolve(out);
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("p_f", self.gga.p_f), ("p_c", self.gga.p_c)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("{name} = {p} is outside [0, 1]")));
            }
        }
        if let Some(f) = self.budget_fractions.iter().find(|f| !(0.0..=1.0).contains(*f)) {
            return Err(Error::Config(format!("budget fraction {f} is outside [0, 1]")));
        }
        if self.budgets.is_empty() && self.budget_fractions.is_empty() {
            return Err(Error::Config("no budgets given".into()));
        }
        if self.algorithms.is_empty() {
            return Err(Error::Config("no algorithms given".into()));
        }
        Ok(())
    }

    /// Applies [`SEED_ENV`] when it is set.
    pub fn apply_env(&mut self) -> Result<()> {
        let Ok(text) = std::env::var(SEED_ENV) else {
            return Ok(());
        };
        let seed: u64 = text
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("{SEED_ENV}={text:?} is not an unsigned integer")))?;
        self.override_seed(seed);
        Ok(())
    }

    pub fn override_seed(&mut self, seed: u64) {
        match &mut self.graph {
            GraphSpec::Social { seed: s, .. } | GraphSpec::Copurchase { seed: s, .. } => *s = seed,
            GraphSpec::File { .. } => {}
        }
        self.gga.seed = seed;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub algorithm: Algorithm,
    pub budget: u64,
    pub total_benefit: f64,
    pub covered_fraction: f64,
    pub candidate_views: usize,
    pub selected_bytes: u64,
    pub runtime_ms: u64,
    /// Total size of the candidate set the algorithm selected from.
    pub candidate_bytes: u64,
    pub selected: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{:.3},{:.4},{},{},{}",
                r.algorithm.name(),
                r.budget,
                r.total_benefit,
                r.covered_fraction,
                r.candidate_views,
                r.selected_bytes,
                r.runtime_ms
            )
            .expect("writing to a string");
        }
        out
    }

    pub fn row(&self, algorithm: Algorithm, budget: u64) -> Option<&BenchRow> {
        self.rows
            .iter()
            .find(|r| r.algorithm == algorithm && r.budget == budget)
    }
}

/// One candidate view per query, named after it, optionally without those
/// another candidate already answers.
pub fn build_candidates(
    graph: &PropertyGraph,
    workload: &[PatternQuery],
    skip_contained: bool,
) -> Vec<ExtendedGraphView> {
    let schema = infer_schema(graph);
    let all: Vec<ExtendedGraphView> = crate::par::par_map(workload, |q| {
        let mut v = materialize_view(graph, &build_view_pattern(q, &schema));
        v.id = q.name.clone();
        v
    });
    if skip_contained {
        prune_contained(&all).into_iter().map(|i| all[i].clone()).collect()
    } else {
        all
    }
}

/// Result of one selector run.
#[derive(Debug, Clone)]
pub struct Selection {
    /// The candidate set the selection refers to; transformed for GGA.
    pub candidates: Vec<ExtendedGraphView>,
    pub selected: Vec<String>,
}

impl Selection {
    pub fn views(&self) -> Vec<ExtendedGraphView> {
        pick(&self.candidates, &self.selected)
    }
}

pub fn select(
    ctx: &EvalContext,
    candidates: &[ExtendedGraphView],
    algorithm: Algorithm,
    budget: u64,
    params: &GgaParams,
) -> Selection {
    let selected = match algorithm {
        Algorithm::Dps => {
            let (bv, _) = ctx.assign(candidates);
            dps(candidates, &bv, &sizes_of(candidates), budget)
        }
        Algorithm::Greedy => greedy_select(ctx, candidates, budget),
        Algorithm::Bnb => branch_and_bound_select(ctx, candidates, budget, SIZE_QUANTUM),
        Algorithm::Gga => {
            let state = gga_with(ctx, candidates.to_vec(), budget, params);
            return Selection {
                candidates: state.candidates,
                selected: state.selected,
            };
        }
    };
    Selection {
        candidates: candidates.to_vec(),
        selected,
    }
}

/// Runs every algorithm at every budget. Each selection is checked against
/// base evaluation before its row is recorded. Writes `report.csv` to the
/// output directory when one is configured.
pub fn run_benchmark(config: &BenchConfig) -> Result<BenchReport> {
    config.validate()?;
    let graph = config.graph.build()?;
    let workload = load_workload(&config.workload)?;
    let report = run_on(config, &graph, &workload)?;
    if let Some(dir) = &config.output_dir {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.csv"), report.to_csv())?;
    }
    Ok(report)
}

/// [`run_benchmark`] on an already loaded graph and workload, writing nothing.
pub fn run_on(config: &BenchConfig, graph: &PropertyGraph, workload: &[PatternQuery]) -> Result<BenchReport> {
    let ctx = EvalContext::new(graph, workload);
    let candidates = build_candidates(graph, workload, config.skip_contained);
    let total: u64 = candidates.iter().map(|v| v.size_bytes).sum();
    let mut budgets = config.budgets.clone();
    budgets.extend(
        config
            .budget_fractions
            .iter()
            .map(|f| (total as f64 * f).floor() as u64),
    );
    let params = config.gga.params();
    let mut report = BenchReport::default();
    for &budget in &budgets {
        for &algorithm in &config.algorithms {
            let start = Instant::now();
            let sel = select(&ctx, &candidates, algorithm, budget, &params);
            let elapsed = start.elapsed();
            let views = sel.views();
            let score = ctx.evaluate_selection(&views, true)?;
            report.rows.push(BenchRow {
                algorithm,
                budget,
                total_benefit: score.total_benefit,
                covered_fraction: score.covered_fraction,
                candidate_views: sel.candidates.len(),
                selected_bytes: views.iter().map(|v| v.size_bytes).sum(),
                runtime_ms: if config.report_runtime { millis(elapsed) } else { 0 },
                candidate_bytes: sel.candidates.iter().map(|v| v.size_bytes).sum(),
                selected: sel.selected,
            });
        }
    }
    Ok(report)
}

fn millis(d: Duration) -> u64 {
    d.as_millis().try_into().unwrap_or(u64::MAX)
}
