use rayon::prelude::*;
use serde::Serialize;

use std::sync::Arc;

use super::adversary::{
    correct_tree, merge_trees, optimal_tree_forest, FnTreeAdversary, Fragment, TreeAdversary,
};
use super::model::ModelSpec;
use super::state::BroadcastState;
use super::step::{step_full_tree, StepConfig};
use crate::error::Result;
use crate::graphgen::RngStream;
use crate::stats::{paired_difference, Z_ONE_SIDED_1E3};
use crate::treecount::{Node, RootedForest};

/// `P(N_t ≥ x)` under both strategies and the paired z-score of `A − B`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominanceCell {
    pub round: usize,
    pub x: usize,
    pub p_a: f64,
    pub p_b: f64,
    pub z: f64,
}

/// Paired Monte Carlo comparison of two tree strategies.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominanceReport {
    pub strategy_a: String,
    pub strategy_b: String,
    pub trials: usize,
    pub horizon: usize,
    pub cells: Vec<DominanceCell>,
    /// No cell where `A` is significantly below `B` (one-sided, 1e-3).
    pub no_violation: bool,
    /// Some cell where `A` is significantly above `B`.
    pub strict: bool,
}

impl DominanceReport {
    /// `N^A_t` stochastically dominates `N^B_t`, detectably so.
    pub fn a_dominates_b(&self) -> bool {
        self.no_violation && self.strict
    }
}

/// Runs both strategies from the same informed set for `horizon` rounds,
/// trial `i` of each using stream `base.split(i)`.
pub fn compare_strategies(
    spec: &ModelSpec,
    a: &dyn TreeAdversary,
    b: &dyn TreeAdversary,
    start: &[Node],
    trials: usize,
    horizon: usize,
    base: RngStream,
) -> Result<DominanceReport> {
    let initial = BroadcastState::from_informed(*spec, start)?;
    let cfg = StepConfig::default();
    let run = |adv: &dyn TreeAdversary, stream: RngStream| -> Result<Vec<usize>> {
        let mut rng = stream.rng();
        let mut s = initial.clone();
        let mut counts = Vec::with_capacity(horizon);
        for _ in 0..horizon {
            step_full_tree(&mut s, Some(adv), &cfg, &mut rng)?;
            counts.push(s.count());
        }
        Ok(counts)
    };
    let paths: Vec<(Vec<usize>, Vec<usize>)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let stream = base.split(i as u64);
            Ok((run(a, stream)?, run(b, stream)?))
        })
        .collect::<Result<_>>()?;

    let mut cells = Vec::new();
    for t in 0..horizon {
        for x in 1..=spec.n {
            let ia: Vec<bool> = paths.iter().map(|(pa, _)| pa[t] >= x).collect();
            let ib: Vec<bool> = paths.iter().map(|(_, pb)| pb[t] >= x).collect();
            let freq = |v: &[bool]| v.iter().filter(|&&e| e).count() as f64 / trials as f64;
            let (_, z) = paired_difference(&ia, &ib);
            cells.push(DominanceCell {
                round: t + 1,
                x,
                p_a: freq(&ia),
                p_b: freq(&ib),
                z,
            });
        }
    }
    Ok(DominanceReport {
        strategy_a: a.name(),
        strategy_b: b.name(),
        trials,
        horizon,
        no_violation: cells.iter().all(|c| c.z >= -Z_ONE_SIDED_1E3),
        strict: cells.iter().any(|c| c.z > Z_ONE_SIDED_1E3),
        cells,
    })
}

fn path_forest(n: usize, nodes: &[Node]) -> RootedForest {
    let edges: Vec<_> = nodes.windows(2).map(|w| (w[0], w[1])).collect();
    RootedForest::from_edges(n, &edges).expect("a path is a rooted forest")
}

/// An information-increasing path (lowest informed node, then uninformed
/// nodes, then the other informed nodes) and its correction.
///
/// Falls back to the optimal path once nobody or everybody is informed.
pub fn correction_pair(k: usize) -> (Arc<dyn TreeAdversary>, Arc<dyn TreeAdversary>) {
    fn increasing(informed: &[bool], k: usize) -> Option<Fragment> {
        let n = informed.len();
        let first = (0..n).find(|&v| informed[v])?;
        (0..n).find(|&v| !informed[v])?;
        let path: Vec<Node> = std::iter::once(first)
            .chain((0..n).filter(|&v| !informed[v]))
            .chain((0..n).filter(|&v| informed[v] && v != first))
            .take(k + 1)
            .collect();
        let edges: Vec<_> = path.windows(2).map(|w| (w[0], w[1])).collect();
        Some(Fragment::new(path[0], &edges).expect("a path is a fragment"))
    }
    let a = FnTreeAdversary::new("increasing-path", move |_, informed: &[bool]| {
        match increasing(informed, k) {
            Some(u) if k > 0 => Fragment::to_forest(informed.len(), &[&u]).unwrap(),
            _ => optimal_tree_forest(informed, k),
        }
    });
    let b = FnTreeAdversary::new("corrected-path", move |_, informed: &[bool]| {
        match increasing(informed, k) {
            Some(u) if k > 0 => {
                let c = correct_tree(&u, informed).expect("the path is increasing");
                Fragment::to_forest(informed.len(), &[&c]).unwrap()
            }
            _ => optimal_tree_forest(informed, k),
        }
    });
    (Arc::new(a), Arc::new(b))
}

/// Two non-increasing paths with `1` and `k − 1` edges over the uninformed
/// nodes first, and the fragment obtained by merging them. Needs `k ≥ 2`
/// and `k + 2 ≤ n`.
pub fn merge_pair(k: usize) -> (Arc<dyn TreeAdversary>, Arc<dyn TreeAdversary>) {
    fn split(informed: &[bool], k: usize) -> (Vec<Node>, Vec<Node>) {
        let n = informed.len();
        let order: Vec<Node> = (0..n)
            .filter(|&v| !informed[v])
            .chain((0..n).filter(|&v| informed[v]))
            .take(k + 2)
            .collect();
        (order[..2].to_vec(), order[2..].to_vec())
    }
    let a = FnTreeAdversary::new("split-paths", move |_, informed: &[bool]| {
        let n = informed.len();
        let (p, q) = split(informed, k);
        let edges: Vec<_> = path_forest(n, &p).edges().chain(path_forest(n, &q).edges()).collect();
        RootedForest::from_edges(n, &edges).expect("disjoint paths")
    });
    let b = FnTreeAdversary::new("merged-paths", move |_, informed: &[bool]| {
        let n = informed.len();
        let (p, q) = split(informed, k);
        let u = Fragment::from_forest(&path_forest(n, &p), p[0]);
        let w = Fragment::from_forest(&path_forest(n, &q), q[0]);
        let m = merge_trees(&u, &w, informed).expect("disjoint non-trivial paths");
        Fragment::to_forest(n, &[&m.tree]).unwrap()
    });
    (Arc::new(a), Arc::new(b))
}
