//! Reference selectors.

use std::collections::BTreeSet;

use super::knapsack::knapsack_bnb;
use crate::benefit::EvalContext;
use crate::containment::pattern_answerable;
use crate::matcher::evaluate_query;
use crate::par::par_map;
use crate::view::ExtendedGraphView;

/// Repeatedly takes the view with the largest weighted saving over the
/// queries still unanswered, among views that fit the remaining budget.
/// Stops when nothing positive is left, every query is answered, or
/// nothing fits.
pub fn greedy_select(ctx: &EvalContext, candidates: &[ExtendedGraphView], budget: u64) -> Vec<String> {
    // per view: answered queries with their weighted saving
    let savings: Vec<Vec<(usize, f64)>> = par_map(candidates, |v| {
        ctx.answered_by(v)
            .into_iter()
            .map(|i| {
                let q = &ctx.workload()[i];
                let (_, c) = evaluate_query(&v.content, q);
                (i, q.weight * (ctx.base_cost(i).cost as f64 - c.cost as f64))
            })
            .collect()
    });
    let mut remaining: BTreeSet<usize> = (0..ctx.workload().len()).collect();
    let mut taken = vec![false; candidates.len()];
    let mut used = 0u64;
    while !remaining.is_empty() {
        let mut best: Option<(usize, f64)> = None;
        for (k, v) in candidates.iter().enumerate() {
            if taken[k] || used + v.size_bytes > budget {
                continue;
            }
            let b: f64 = savings[k]
                .iter()
                .filter(|(i, _)| remaining.contains(i))
                .map(|(_, s)| s)
                .sum();
            if best.is_none_or(|(_, bb)| b > bb) {
                best = Some((k, b));
            }
        }
        let Some((k, b)) = best else { break };
        if b <= 0.0 {
            break;
        }
        taken[k] = true;
        used += candidates[k].size_bytes;
        for (i, _) in &savings[k] {
            remaining.remove(i);
        }
    }
    (0..candidates.len())
        .filter(|&k| taken[k])
        .map(|k| candidates[k].id.clone())
        .collect()
}

/// Indices of candidates whose pattern no other candidate answers. Of two
/// mutually answerable candidates the earlier one stays.
pub fn prune_contained(candidates: &[ExtendedGraphView]) -> Vec<usize> {
    let n = candidates.len();
    let contained = |i: usize, j: usize| pattern_answerable(candidates[i].vp.pattern(), &candidates[j].vp).is_some();
    par_map(&(0..n).collect::<Vec<_>>(), |&i| {
        let dropped = (0..n).any(|j| j != i && contained(i, j) && !(j > i && contained(j, i)));
        (!dropped).then_some(i)
    })
    .into_iter()
    .flatten()
    .collect()
}

/// Drops contained candidates, then solves the knapsack exactly over
/// single-view savings.
pub fn branch_and_bound_select(
    ctx: &EvalContext,
    candidates: &[ExtendedGraphView],
    budget: u64,
    quantum: u64,
) -> Vec<String> {
    let kept = prune_contained(candidates);
    let benefits = par_map(&kept, |&i| ctx.benefit_single(&candidates[i]));
    let sizes: Vec<u64> = kept.iter().map(|&i| candidates[i].size_bytes).collect();
    knapsack_bnb(&benefits, &sizes, budget, quantum)
        .into_iter()
        .map(|k| candidates[kept[k]].id.clone())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::fixtures;
    use crate::selector::SIZE_QUANTUM;

    #[test]
    fn greedy_zero_budget() {
        let g = fixtures::friends_graph();
        let (views, queries) = fixtures::friends_views_and_queries();
        let ctx = EvalContext::new(&g, &queries);
        assert!(greedy_select(&ctx, &views, 0).is_empty());
    }

    #[test]
    fn greedy_one_round_when_one_view_answers_all() {
        let g = fixtures::gene_graph();
        let views = fixtures::materialized(&g, &fixtures::gene_views().1);
        let ctx = EvalContext::new(&g, &[views[2].vp.pattern().clone()]);
        assert_eq!(greedy_select(&ctx, &views, 1 << 20), vec!["V3".to_string()]);
    }

    #[test]
    fn contained_candidate_is_pruned() {
        let g = fixtures::gene_graph();
        let views = fixtures::materialized(&g, &fixtures::gene_views().1);
        // V1 is a sub-pattern of V2
        let kept = prune_contained(&views);
        assert!(!kept.contains(&0));
        let ctx = EvalContext::new(&g, &[fixtures::gene_query()]);
        let chosen = branch_and_bound_select(&ctx, &views, 1 << 20, SIZE_QUANTUM);
        assert!(!chosen.contains(&"V1".to_string()));
    }

    #[test]
    fn duplicate_patterns_keep_one() {
        let views = fixtures::gene_views().1;
        let mut dup = views[1].clone();
        dup.id = "V2b".into();
        let both = vec![views[1].clone(), dup];
        assert_eq!(prune_contained(&both), vec![0]);
    }
}
