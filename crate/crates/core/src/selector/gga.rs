//! Evolutionary search over candidate view sets.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::fusion::{fusion, remove_empty, FusionLog};
use super::knapsack::{knapsack_dp, SIZE_QUANTUM};
use super::pick;
use crate::benefit::{BenefitVector, EvalContext};
use crate::genes::fission;
use crate::graph::PropertyGraph;
use crate::pattern::PatternQuery;
use crate::view::ExtendedGraphView;

#[derive(Debug, Clone, PartialEq)]
pub struct GgaParams {
    pub p_f: f64,
    pub p_c: f64,
    pub seed: u64,
    pub max_generations: usize,
    pub time_limit: Option<Duration>,
    pub quantum: u64,
}

impl Default for GgaParams {
    fn default() -> Self {
        GgaParams {
            p_f: 0.5,
            p_c: 0.5,
            seed: 42,
            max_generations: 10,
            time_limit: None,
            quantum: SIZE_QUANTUM,
        }
    }
}

/// One generation of a run. Generation 0 is the untransformed input.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationRecord {
    pub generation: usize,
    /// Score of this generation's candidates.
    pub score: f64,
    /// Best score adopted so far.
    pub best_score: f64,
    pub candidates: usize,
    /// Workload queries coverable by this generation's candidates.
    pub covered: usize,
    pub adopted: bool,
}

/// The adopted state of a run.
#[derive(Debug, Clone)]
pub struct SelectionState {
    pub candidates: Vec<ExtendedGraphView>,
    pub benefit_vector: BenefitVector,
    pub selected: Vec<String>,
    /// Realized weighted saving of `selected` over the workload.
    pub total_benefit: f64,
    pub total_size: u64,
    pub trace: Vec<GenerationRecord>,
    pub fusions: Vec<FusionLog>,
    pub generations_run: usize,
}

impl SelectionState {
    pub fn candidate_size(&self) -> u64 {
        self.candidates.iter().map(|v| v.size_bytes).sum()
    }

    pub fn selected_views(&self) -> Vec<ExtendedGraphView> {
        pick(&self.candidates, &self.selected)
    }
}

struct Scored {
    vector: BenefitVector,
    selected: Vec<String>,
    score: f64,
    size: u64,
    covered: usize,
}

fn score(ctx: &EvalContext, candidates: &[ExtendedGraphView], budget: u64, quantum: u64) -> Scored {
    let (vector, outcomes) = ctx.assign(candidates);
    let benefits: Vec<f64> = candidates.iter().map(|v| vector.get(&v.id)).collect();
    let sizes: Vec<u64> = candidates.iter().map(|v| v.size_bytes).collect();
    let chosen = knapsack_dp(&benefits, &sizes, budget, quantum);
    let selected: Vec<String> = chosen.iter().map(|&i| candidates[i].id.clone()).collect();
    let size = chosen.iter().map(|&i| sizes[i]).sum();
    let realized = ctx
        .evaluate_selection(&pick(candidates, &selected), false)
        .expect("covers are built from the candidates")
        .total_benefit;
    Scored {
        vector,
        selected,
        score: realized,
        size,
        covered: outcomes.iter().filter(|o| o.is_some()).count(),
    }
}

/// The adopted views, taking gene splits from `rejected` wherever a view
/// came through unchanged.
fn keep_genes(best: &[ExtendedGraphView], rejected: &[ExtendedGraphView]) -> Vec<ExtendedGraphView> {
    best.iter()
        .map(|v| {
            let mut v = v.clone();
            if let Some(r) = rejected
                .iter()
                .find(|r| r.id == v.id && r.vp == v.vp && !r.genes.is_empty())
            {
                v.genes = r.genes.clone();
            }
            v
        })
        .collect()
}

/// Runs the search on `workload` over `graph`.
pub fn gga(
    workload: &[PatternQuery],
    candidates: Vec<ExtendedGraphView>,
    budget: u64,
    params: &GgaParams,
    graph: &PropertyGraph,
) -> SelectionState {
    gga_with(&EvalContext::new(graph, workload), candidates, budget, params)
}

/// Each generation draws two numbers per candidate, in candidate order:
/// the first below `p_f` splits the view into genes, the second below `p_c`
/// fuses it into the others. Emptied views are then dropped and the set is
/// scored by knapsack selection over the proportional benefit split. A
/// generation is adopted only when its realized benefit strictly improves.
/// A rejected generation's views revert to the adopted ones, keeping only
/// their gene splits.
pub fn gga_with(
    ctx: &EvalContext,
    candidates: Vec<ExtendedGraphView>,
    budget: u64,
    params: &GgaParams,
) -> SelectionState {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut current = candidates;
    let first = score(ctx, &current, budget, params.quantum);
    let mut trace = vec![GenerationRecord {
        generation: 0,
        score: first.score,
        best_score: first.score,
        candidates: current.len(),
        covered: first.covered,
        adopted: true,
    }];
    let mut best_candidates = current.clone();
    let mut best = first;
    let mut fusions = Vec::new();
    let mut generations_run = 0;

    for generation in 1..=params.max_generations {
        if params.time_limit.is_some_and(|t| start.elapsed() >= t) {
            break;
        }
        generations_run = generation;
        let ids: Vec<String> = current.iter().map(|v| v.id.clone()).collect();
        for id in ids {
            let r1: f64 = rng.gen();
            let r2: f64 = rng.gen();
            let Some(i) = current.iter().position(|v| v.id == id) else {
                continue;
            };
            if r1 < params.p_f && !current[i].genes.is_empty() {
                current[i].genes = fission(&current[i]);
            }
            if r2 < params.p_c {
                fusions.push(fusion(&mut current, &id, ctx.graph(), ctx.workload()));
            }
        }
        current = remove_empty(current);
        let s = score(ctx, &current, budget, params.quantum);
        let adopted = s.score > best.score;
        let record = GenerationRecord {
            generation,
            score: s.score,
            best_score: if adopted { s.score } else { best.score },
            candidates: current.len(),
            covered: s.covered,
            adopted,
        };
        trace.push(record);
        if adopted {
            best = s;
            best_candidates = current.clone();
        } else {
            current = keep_genes(&best_candidates, &current);
        }
    }

    SelectionState {
        candidates: best_candidates,
        benefit_vector: best.vector,
        selected: best.selected,
        total_benefit: best.score,
        total_size: best.size,
        trace,
        fusions,
        generations_run,
    }
}
