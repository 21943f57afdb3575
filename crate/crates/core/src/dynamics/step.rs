use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use super::adversary::{optimal_sigma_eta, ErAdversary, TreeAdversary};
use super::model::ModelKind;
use super::state::{BroadcastState, ByzantineBehavior, CountState};
use crate::error::{Error, Result};
use crate::graphgen::{sample_rooted_tree, sample_rooted_tree_containing, Edge, EdgePool};
use crate::treecount::{Node, RootedTree};

/// How the per-round Erdős–Rényi edges are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ErScheme {
    /// `m` distinct edges (the model itself).
    #[default]
    WithoutReplacement,
    /// `m` i.i.d. edges, duplicates allowed.
    WithReplacement,
}

/// How a DER_ADV adversary's `k` edges enter the round graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ErAdvMode {
    /// The `k` edges are taken out of the pool; `m - k` edges are drawn
    /// from the remaining `n² - k`.
    #[default]
    Removal,
    /// The `k` edges are part of the graph; `m - k` further edges are drawn
    /// from the rest of the pool.
    Forced,
}

/// Per-round switches shared by the full steppers.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepConfig {
    pub byzantine: ByzantineBehavior,
    pub scheme: ErScheme,
    pub adv_mode: ErAdvMode,
    /// Exclude self-loops from the Erdős–Rényi pool.
    pub no_self_loops: bool,
}

fn forwards<R: Rng + ?Sized>(
    state: &BroadcastState,
    v: Node,
    behavior: ByzantineBehavior,
    rng: &mut R,
) -> bool {
    if !state.is_byzantine(v) {
        return state.is_informed(v);
    }
    if !state.is_holding(v) {
        return false;
    }
    match behavior {
        ByzantineBehavior::Silent => false,
        ByzantineBehavior::Forward => true,
        ByzantineBehavior::Random(p) => rng.random_bool(p.clamp(0.0, 1.0)),
    }
}

fn senders<R: Rng + ?Sized>(state: &BroadcastState, cfg: &StepConfig, rng: &mut R) -> Vec<bool> {
    (0..state.spec.n)
        .map(|v| forwards(state, v, cfg.byzantine, rng))
        .collect()
}

/// Draws one round's tree (containing the adversary's forest, if any).
pub fn sample_round_tree<R: Rng + ?Sized>(
    state: &BroadcastState,
    adversary: Option<&dyn TreeAdversary>,
    rng: &mut R,
) -> Result<RootedTree> {
    let spec = state.spec;
    match adversary {
        None => Ok(sample_rooted_tree(spec.n, rng)),
        Some(a) => {
            let forest = a.forest(state.round + 1, state.informed());
            if forest.n() != spec.n || forest.edge_count() != spec.k {
                return Err(Error::Strategy(format!(
                    "{} returned {} edges on {} nodes, expected {} on {}",
                    a.name(),
                    forest.edge_count(),
                    forest.n(),
                    spec.k,
                    spec.n
                )));
            }
            Ok(sample_rooted_tree_containing(&forest, rng))
        }
    }
}

/// Applies one round's tree to the state.
pub fn apply_tree<R: Rng + ?Sized>(
    state: &mut BroadcastState,
    tree: &RootedTree,
    cfg: &StepConfig,
    rng: &mut R,
) {
    let send = senders(state, cfg, rng);
    for v in 0..state.spec.n {
        let p = tree.parent(v);
        if p != v && send[p] {
            state.inform(v);
        }
    }
    state.round += 1;
}

/// Applies one round's edges to the state.
pub fn apply_edges<R: Rng + ?Sized>(
    state: &mut BroadcastState,
    edges: &[Edge],
    cfg: &StepConfig,
    rng: &mut R,
) {
    let send = senders(state, cfg, rng);
    for &(u, v) in edges {
        if send[u] {
            state.inform(v);
        }
    }
    state.round += 1;
}

/// One round of a tree model, sampling the whole graph.
pub fn step_full_tree<R: Rng + ?Sized>(
    state: &mut BroadcastState,
    adversary: Option<&dyn TreeAdversary>,
    cfg: &StepConfig,
    rng: &mut R,
) -> Result<()> {
    if !state.spec.kind.is_tree() {
        return Err(Error::InvalidModel(format!("{} is not a tree model", state.spec.kind)));
    }
    if state.spec.kind == ModelKind::UrtAdv && adversary.is_none() && state.spec.k > 0 {
        return Err(Error::Strategy("URT_ADV needs an adversary".into()));
    }
    let tree = sample_round_tree(state, adversary, rng)?;
    apply_tree(state, &tree, cfg, rng);
    Ok(())
}

/// Draws one round's Erdős–Rényi edges.
pub fn sample_round_edges<R: Rng + ?Sized>(
    state: &BroadcastState,
    adversary: Option<&dyn ErAdversary>,
    cfg: &StepConfig,
    rng: &mut R,
) -> Result<Vec<Edge>> {
    let spec = state.spec;
    let pool = EdgePool::new(spec.n, !cfg.no_self_loops);
    let (pool, forced, draws) = match (spec.kind, adversary) {
        (ModelKind::DerAdv, Some(a)) => {
            let chosen = a.edges(state.round + 1, state.informed(), spec.k);
            if chosen.len() != spec.k
                || chosen
                    .edges()
                    .iter()
                    .any(|&(u, v)| state.is_informed(u) && !state.is_informed(v))
            {
                return Err(Error::Strategy(format!(
                    "{} must return {} edges, none informed to uninformed",
                    a.name(),
                    spec.k
                )));
            }
            let pool = pool.without(chosen.edges());
            let forced = match cfg.adv_mode {
                ErAdvMode::Removal => Vec::new(),
                ErAdvMode::Forced => chosen.edges().to_vec(),
            };
            (pool, forced, spec.m - spec.k)
        }
        (ModelKind::DerAdv, None) if spec.k > 0 => {
            return Err(Error::Strategy("DER_ADV needs an adversary".into()))
        }
        (kind, _) if kind.is_tree() => {
            return Err(Error::InvalidModel(format!("{kind} is not an Erdős–Rényi model")))
        }
        _ => (pool, Vec::new(), spec.m),
    };
    let mut edges = match cfg.scheme {
        ErScheme::WithoutReplacement => pool.sample_distinct(draws, rng)?,
        ErScheme::WithReplacement => pool.sample_with_replacement(draws, rng)?,
    };
    edges.extend(forced);
    Ok(edges)
}

/// One round of an Erdős–Rényi model.
pub fn step_full_er<R: Rng + ?Sized>(
    state: &mut BroadcastState,
    adversary: Option<&dyn ErAdversary>,
    cfg: &StepConfig,
    rng: &mut R,
) -> Result<()> {
    let edges = sample_round_edges(state, adversary, cfg, rng)?;
    apply_edges(state, &edges, cfg, rng);
    Ok(())
}

/// Which count law [`step_fast`] may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FastStrategy {
    /// No adversary; Byzantine nodes (if any) are silent.
    Oblivious,
    /// The η-minimising single-tree adversary.
    OptimalTree,
    /// Anything else; needs the full stepper.
    Custom,
}

/// Law of the one-round increment `Δ` of the informed count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncrementLaw {
    /// `Δ = Binomial(trials, p) + Bernoulli(extra)`.
    pub trials: u64,
    pub p: f64,
    pub extra: f64,
}

/// The exact law of `Δ` from count `count` under the spec's tree model.
pub fn increment_law(state: &CountState, strategy: FastStrategy) -> Result<IncrementLaw> {
    let spec = state.spec;
    let (n, c) = (spec.n, state.count);
    let p = c as f64 / n as f64;
    match (spec.kind, strategy) {
        (ModelKind::Urt, FastStrategy::Oblivious) | (ModelKind::UrtByz, FastStrategy::Oblivious) => {
            Ok(IncrementLaw {
                trials: (spec.honest() - c) as u64,
                p,
                extra: 0.0,
            })
        }
        (ModelKind::UrtAdv, FastStrategy::OptimalTree) => {
            let (sigma, eta) = optimal_sigma_eta(n, c, spec.k);
            if sigma == 0 {
                // k = 0, or nothing left to inform.
                return Ok(IncrementLaw {
                    trials: (n - c) as u64,
                    p,
                    extra: 0.0,
                });
            }
            Ok(IncrementLaw {
                trials: (n - c - sigma) as u64,
                p,
                extra: (c - eta) as f64 / n as f64,
            })
        }
        (kind, s) => Err(Error::Strategy(format!(
            "no fast-forward law for {kind} with {s:?} strategy"
        ))),
    }
}

/// Advances the informed count by a direct draw from its one-round law.
pub fn step_fast<R: Rng + ?Sized>(
    state: &mut CountState,
    strategy: FastStrategy,
    rng: &mut R,
) -> Result<()> {
    let law = increment_law(state, strategy)?;
    let mut delta = if law.trials == 0 {
        0
    } else {
        Binomial::new(law.trials, law.p)
            .expect("probability in [0, 1]")
            .sample(rng) as usize
    };
    if law.extra > 0.0 && rng.random_bool(law.extra) {
        delta += 1;
    }
    state.count += delta;
    state.round += 1;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::adversary::OptimalTree;
    use crate::dynamics::model::ModelSpec;
    use crate::graphgen::RngStream;

    #[test]
    fn complete_state_is_absorbing() {
        let spec = ModelSpec::urt(5).unwrap();
        let mut s = BroadcastState::from_informed(spec, &[0, 1, 2, 3, 4]).unwrap();
        let mut rng = RngStream::new(1, 0).rng();
        step_full_tree(&mut s, None, &StepConfig::default(), &mut rng).unwrap();
        assert_eq!(s.count(), 5);
        assert_eq!(s.round, 1);
        let mut c = CountState::with_count(spec, 5).unwrap();
        step_fast(&mut c, FastStrategy::Oblivious, &mut rng).unwrap();
        assert_eq!(c.count, 5);
    }

    #[test]
    fn phase_two_law() {
        // All uninformed nodes sit in the adversary tree: only its root can
        // be informed, with probability (n - k - 1) / n.
        let spec = ModelSpec::urt_adv(9, 5).unwrap();
        let c = CountState::with_count(spec, 6).unwrap();
        let law = increment_law(&c, FastStrategy::OptimalTree).unwrap();
        assert_eq!(law.trials, 0);
        assert!((law.extra - 3.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn fast_rejects_custom() {
        let spec = ModelSpec::urt(4).unwrap();
        let mut c = CountState::new(spec);
        let mut rng = RngStream::new(1, 0).rng();
        assert!(step_fast(&mut c, FastStrategy::Custom, &mut rng).is_err());
        let der = ModelSpec::der(4, 4).unwrap();
        assert!(step_fast(&mut CountState::new(der), FastStrategy::Oblivious, &mut rng).is_err());
    }

    #[test]
    fn adversary_edge_count_checked() {
        let spec = ModelSpec::urt_adv(6, 2).unwrap();
        let mut s = BroadcastState::new(spec, 0).unwrap();
        let wrong = OptimalTree { k: 1 };
        let mut rng = RngStream::new(1, 0).rng();
        assert!(matches!(
            step_full_tree(&mut s, Some(&wrong), &StepConfig::default(), &mut rng),
            Err(Error::Strategy(_))
        ));
        step_full_tree(&mut s, Some(&OptimalTree { k: 2 }), &StepConfig::default(), &mut rng)
            .unwrap();
    }

    #[test]
    fn complete_digraph_informs_everyone() {
        let spec = ModelSpec::der(5, 25).unwrap();
        let mut s = BroadcastState::new(spec, 2).unwrap();
        let mut rng = RngStream::new(1, 0).rng();
        step_full_er(&mut s, None, &StepConfig::default(), &mut rng).unwrap();
        assert!(s.is_complete());
    }
}
