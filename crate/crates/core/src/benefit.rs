//! Cost savings of answering workload queries from views.

use std::collections::BTreeMap;

use crate::containment::{by_size, query_answerable, two_level_search_in, CoverResult};
use crate::error::{Error, Result};
use crate::graph::PropertyGraph;
use crate::matcher::{evaluate_query, CostReport, MatchSet};
use crate::par::par_map;
use crate::pattern::PatternQuery;
use crate::view::{evaluate_cover, ExtendedGraphView};

/// Benefit per view id, with the running total.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BenefitVector {
    pub per_view: BTreeMap<String, f64>,
    pub total: f64,
}

impl BenefitVector {
    pub fn get(&self, id: &str) -> f64 {
        self.per_view.get(id).copied().unwrap_or(0.0)
    }

    fn add(&mut self, id: &str, b: f64) {
        *self.per_view.entry(id.to_string()).or_insert(0.0) += b;
        self.total += b;
    }
}

/// How one query is served by a set of views.
#[derive(Debug, Clone)]
pub struct QueryOutcome {
    pub cover: CoverResult,
    /// Unweighted saving of the cover for this query.
    pub benefit: f64,
    /// Partial evaluation cost per covering view.
    pub view_costs: Vec<(String, u64)>,
}

/// A graph, a workload and the workload's base evaluation costs.
pub struct EvalContext<'g> {
    graph: &'g PropertyGraph,
    workload: Vec<PatternQuery>,
    base: Vec<(MatchSet, CostReport)>,
}

impl<'g> EvalContext<'g> {
    pub fn new(graph: &'g PropertyGraph, workload: &[PatternQuery]) -> Self {
        let base = par_map(workload, |q| evaluate_query(graph, q));
        EvalContext {
            graph,
            workload: workload.to_vec(),
            base,
        }
    }

    pub fn graph(&self) -> &PropertyGraph {
        self.graph
    }

    pub fn workload(&self) -> &[PatternQuery] {
        &self.workload
    }

    pub fn base_cost(&self, i: usize) -> CostReport {
        self.base[i].1
    }

    pub fn base_matches(&self, i: usize) -> &MatchSet {
        &self.base[i].0
    }

    /// Weighted savings over the queries the view answers on its own.
    pub fn benefit_single(&self, view: &ExtendedGraphView) -> f64 {
        par_map(&self.answered_by(view), |&i| {
            let q = &self.workload[i];
            let (_, on_view) = evaluate_query(&view.content, q);
            q.weight * (self.base[i].1.cost as f64 - on_view.cost as f64)
        })
        .into_iter()
        .sum()
    }

    /// Workload indices the view answers on its own.
    pub fn answered_by(&self, view: &ExtendedGraphView) -> Vec<usize> {
        (0..self.workload.len())
            .filter(|&i| query_answerable(&self.workload[i], view).is_some())
            .collect()
    }

    /// Unweighted saving of answering query `i` through `cover`.
    pub fn outcome(&self, i: usize, views: &[ExtendedGraphView], cover: CoverResult) -> Result<QueryOutcome> {
        let q = &self.workload[i];
        let eval = evaluate_cover(views, q, &cover.assignment)?;
        let mut view_costs: Vec<(String, u64)> = cover.views.iter().map(|v| (v.clone(), 0)).collect();
        for (id, c) in &eval.partials {
            if let Some(slot) = view_costs.iter_mut().find(|(v, _)| v == id) {
                slot.1 += c.cost;
            }
        }
        let benefit = self.base[i].1.cost as f64 - eval.total().cost as f64;
        Ok(QueryOutcome {
            cover,
            benefit,
            view_costs,
        })
    }

    /// Covers every query with `views`, scanned smallest first, and splits
    /// each query's weighted saving across its covering views in proportion
    /// to their partial costs, equally when those are all zero.
    pub fn assign(&self, views: &[ExtendedGraphView]) -> (BenefitVector, Vec<Option<QueryOutcome>>) {
        let order = by_size(views);
        let outcomes: Vec<Option<QueryOutcome>> = par_map(&(0..self.workload.len()).collect::<Vec<_>>(), |&i| {
            two_level_search_in(&self.workload[i], &order)
                .map(|cover| self.outcome(i, views, cover).expect("covers name their views"))
        });
        let mut vector = BenefitVector::default();
        for v in views {
            vector.per_view.insert(v.id.clone(), 0.0);
        }
        for (i, o) in outcomes.iter().enumerate() {
            let Some(o) = o else { continue };
            let b = self.workload[i].weight * o.benefit;
            for (id, share) in split(b, &o.view_costs) {
                vector.add(id, share);
            }
        }
        (vector, outcomes)
    }

    /// Weighted saving realized by a selected view set, checking every
    /// answered query against its base result when `verify` is set.
    pub fn evaluate_selection(&self, views: &[ExtendedGraphView], verify: bool) -> Result<SelectionScore> {
        let order = by_size(views);
        let results: Vec<Result<Option<f64>>> = par_map(&(0..self.workload.len()).collect::<Vec<_>>(), |&i| {
            let q = &self.workload[i];
            let Some(cover) = two_level_search_in(q, &order) else {
                return Ok(None);
            };
            let eval = evaluate_cover(views, q, &cover.assignment)?;
            if verify && !eval.matches.same_rows(&self.base[i].0) {
                return Err(Error::CorrectnessMismatch {
                    query: q.name.clone(),
                    views: cover.views.join(","),
                });
            }
            Ok(Some(q.weight * (self.base[i].1.cost as f64 - eval.total().cost as f64)))
        });
        let mut per_query = Vec::with_capacity(results.len());
        for r in results {
            per_query.push(r?);
        }
        let covered = per_query.iter().filter(|b| b.is_some()).count();
        Ok(SelectionScore {
            total_benefit: per_query.iter().flatten().sum(),
            covered,
            covered_fraction: if per_query.is_empty() {
                0.0
            } else {
                covered as f64 / per_query.len() as f64
            },
            per_query,
        })
    }
}

/// Realized outcome of a view selection over the workload.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionScore {
    pub total_benefit: f64,
    pub covered: usize,
    pub covered_fraction: f64,
    /// Weighted saving per query, `None` when the query is not covered.
    pub per_query: Vec<Option<f64>>,
}

fn split(benefit: f64, costs: &[(String, u64)]) -> Vec<(&str, f64)> {
    let total: u64 = costs.iter().map(|(_, c)| c).sum();
    if total == 0 {
        let share = benefit / costs.len() as f64;
        costs.iter().map(|(id, _)| (id.as_str(), share)).collect()
    } else {
        costs
            .iter()
            .map(|(id, c)| (id.as_str(), benefit * (*c as f64) / total as f64))
            .collect()
    }
}

pub fn benefit_single(view: &ExtendedGraphView, workload: &[PatternQuery], graph: &PropertyGraph) -> f64 {
    EvalContext::new(graph, workload).benefit_single(view)
}

/// Unweighted saving of answering `query` through `cover`. May be negative.
pub fn benefit_multi(
    views: &[ExtendedGraphView],
    query: &PatternQuery,
    cover: &CoverResult,
    graph: &PropertyGraph,
) -> Result<f64> {
    let ctx = EvalContext::new(graph, std::slice::from_ref(query));
    Ok(ctx.outcome(0, views, cover.clone())?.benefit)
}

pub fn assign_benefits(
    workload: &[PatternQuery],
    candidates: &[ExtendedGraphView],
    graph: &PropertyGraph,
) -> BenefitVector {
    EvalContext::new(graph, workload).assign(candidates).0
}
