//! Choosing views under a space budget.

mod baselines;
mod fusion;
mod gga;
pub mod knapsack;

pub use baselines::{branch_and_bound_select, greedy_select, prune_contained};
pub use fusion::{fusion, remove_empty, FusionLog, FusionOutcome};
pub use gga::{gga, gga_with, GenerationRecord, GgaParams, SelectionState};
pub use knapsack::{knapsack_bnb, knapsack_dp, SIZE_QUANTUM};

use crate::benefit::BenefitVector;
use crate::view::ExtendedGraphView;

/// Knapsack selection over the candidates' benefits and byte sizes at the
/// default quantum. Returns the chosen view ids in candidate order.
pub fn dps(candidates: &[ExtendedGraphView], benefits: &BenefitVector, sizes: &[u64], budget: u64) -> Vec<String> {
    dps_quantized(candidates, benefits, sizes, budget, SIZE_QUANTUM)
}

pub fn dps_quantized(
    candidates: &[ExtendedGraphView],
    benefits: &BenefitVector,
    sizes: &[u64],
    budget: u64,
    quantum: u64,
) -> Vec<String> {
    let b: Vec<f64> = candidates.iter().map(|v| benefits.get(&v.id)).collect();
    knapsack_dp(&b, sizes, budget, quantum)
        .into_iter()
        .map(|i| candidates[i].id.clone())
        .collect()
}

/// Byte sizes of the candidates, in order.
pub fn sizes_of(candidates: &[ExtendedGraphView]) -> Vec<u64> {
    candidates.iter().map(|v| v.size_bytes).collect()
}

/// The views named in `ids`, in candidate order.
pub fn pick(candidates: &[ExtendedGraphView], ids: &[String]) -> Vec<ExtendedGraphView> {
    candidates.iter().filter(|v| ids.contains(&v.id)).cloned().collect()
}
