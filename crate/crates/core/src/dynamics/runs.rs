use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use super::adversary::{ErAdversary, FirstNonIncreasing, OptimalTree, Strategy, TreeAdversary};
use super::model::{ModelKind, ModelSpec};
use super::state::{BroadcastState, ByzantineBehavior, CountState};
use super::step::{
    apply_edges, apply_tree, sample_round_edges, sample_round_tree, step_fast, step_full_er,
    step_full_tree, ErScheme, FastStrategy, StepConfig,
};
use crate::error::{Error, Result};
use crate::graphgen::EdgePool;
use crate::treecount::Node;

/// Which stepper to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum Engine {
    /// Fast-forward whenever the count law is known, full otherwise.
    #[default]
    Auto,
    Full,
    Fast,
}

/// Everything about a run besides the model and the source.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub strategy: Strategy,
    pub step: StepConfig,
    /// Overrides the default Byzantine set (the last `f` ids).
    pub byzantine_nodes: Option<Vec<Node>>,
    pub engine: Engine,
    /// Record `N_t` after every round.
    pub trace: bool,
}

impl RunOptions {
    /// The natural default for a spec: optimal tree adversary for URT_ADV,
    /// first-non-increasing edges for DER_ADV, nothing otherwise.
    pub fn for_spec(spec: &ModelSpec) -> Self {
        let strategy = match spec.kind {
            ModelKind::UrtAdv => Strategy::OptimalTree,
            ModelKind::DerAdv => Strategy::Er(Arc::new(FirstNonIncreasing)),
            _ => Strategy::Oblivious,
        };
        RunOptions {
            strategy,
            ..Default::default()
        }
    }

    fn fast_strategy(&self, spec: &ModelSpec) -> FastStrategy {
        let byz_ok = spec.f == 0 || self.step.byzantine == ByzantineBehavior::Silent;
        if !spec.kind.is_tree() || !byz_ok {
            return FastStrategy::Custom;
        }
        match (&self.strategy, spec.kind) {
            (Strategy::Oblivious, ModelKind::Urt | ModelKind::UrtByz) => FastStrategy::Oblivious,
            (Strategy::OptimalTree, ModelKind::UrtAdv) => FastStrategy::OptimalTree,
            _ => FastStrategy::Custom,
        }
    }
}

/// Outcome of one broadcast trial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub spec: ModelSpec,
    pub strategy: String,
    /// Free-form seed label, e.g. `base:trial`.
    pub seed: String,
    /// First round at which every honest node is informed.
    pub completion_round: Option<usize>,
    pub capped: bool,
    /// `N_t` for `t = 0..=rounds run`, when requested.
    pub trace: Option<Vec<usize>>,
}

impl TrialRecord {
    pub const CSV_HEADER: &'static str = "model,strategy,seed,n,f,k,m,completion_round,capped";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.spec.kind,
            self.strategy,
            self.seed,
            self.spec.n,
            self.spec.f,
            self.spec.k,
            self.spec.m,
            self.completion_round.map_or(String::new(), |r| r.to_string()),
            self.capped
        )
    }

    /// Completed within `rounds` rounds.
    pub fn completed_by(&self, rounds: usize) -> bool {
        self.completion_round.is_some_and(|r| r <= rounds)
    }
}

fn tree_adversary(spec: &ModelSpec, strategy: &Strategy) -> Result<Option<Arc<dyn TreeAdversary>>> {
    Ok(match strategy {
        Strategy::Oblivious if spec.kind == ModelKind::UrtAdv && spec.k > 0 => {
            return Err(Error::Strategy("URT_ADV needs an adversary".into()))
        }
        Strategy::Oblivious => None,
        Strategy::OptimalTree => Some(Arc::new(OptimalTree { k: spec.k })),
        Strategy::Tree(a) => Some(a.clone()),
        Strategy::Er(_) => return Err(Error::Strategy("edge adversary on a tree model".into())),
    })
}

fn er_adversary(spec: &ModelSpec, strategy: &Strategy) -> Result<Option<Arc<dyn ErAdversary>>> {
    Ok(match strategy {
        Strategy::Oblivious if spec.kind == ModelKind::DerAdv => {
            Some(Arc::new(FirstNonIncreasing))
        }
        Strategy::Oblivious => None,
        Strategy::Er(a) => Some(a.clone()),
        _ => return Err(Error::Strategy("tree adversary on an Erdős–Rényi model".into())),
    })
}

/// Runs one broadcast from `source` until every honest node is informed or
/// `round_cap` rounds have passed.
pub fn run_broadcast<R: Rng + ?Sized>(
    spec: &ModelSpec,
    opts: &RunOptions,
    source: Node,
    round_cap: usize,
    rng: &mut R,
) -> Result<TrialRecord> {
    spec.validate()?;
    let fast = opts.fast_strategy(spec);
    let use_fast = match opts.engine {
        Engine::Full => false,
        Engine::Auto => fast != FastStrategy::Custom,
        Engine::Fast if fast == FastStrategy::Custom => {
            return Err(Error::Strategy(format!(
                "no fast-forward law for {spec} with {}",
                opts.strategy.name()
            )))
        }
        Engine::Fast => true,
    };
    let mut trace = opts.trace.then(|| vec![1]);
    let mut completion = None;
    if use_fast {
        if source >= spec.n {
            return Err(Error::NodeOutOfRange { node: source, n: spec.n });
        }
        let mut state = CountState::new(*spec);
        if state.is_complete() {
            completion = Some(0);
        }
        while completion.is_none() && state.round < round_cap {
            step_fast(&mut state, fast, rng)?;
            if let Some(t) = trace.as_mut() {
                t.push(state.count);
            }
            if state.is_complete() {
                completion = Some(state.round);
            }
        }
    } else {
        let byz = opts
            .byzantine_nodes
            .clone()
            .unwrap_or_else(|| spec.default_byzantine());
        let mut state = BroadcastState::with_byzantine(*spec, source, &byz)?;
        if state.is_complete() {
            completion = Some(0);
        }
        let tree_adv = if spec.kind.is_tree() {
            tree_adversary(spec, &opts.strategy)?
        } else {
            None
        };
        let er_adv = if spec.kind.is_tree() {
            None
        } else {
            er_adversary(spec, &opts.strategy)?
        };
        while completion.is_none() && state.round < round_cap {
            if spec.kind.is_tree() {
                step_full_tree(&mut state, tree_adv.as_deref(), &opts.step, rng)?;
            } else {
                step_full_er(&mut state, er_adv.as_deref(), &opts.step, rng)?;
            }
            if let Some(t) = trace.as_mut() {
                t.push(state.count());
            }
            if state.is_complete() {
                completion = Some(state.round);
            }
        }
    }
    Ok(TrialRecord {
        spec: *spec,
        strategy: opts.strategy.name(),
        seed: String::new(),
        completion_round: completion,
        capped: completion.is_none(),
        trace,
    })
}

/// Erdős–Rényi broadcast with an explicit scheme (1 = without replacement,
/// 2 = with replacement).
pub fn run_er_scheme<R: Rng + ?Sized>(
    spec: &ModelSpec,
    scheme: ErScheme,
    source: Node,
    round_cap: usize,
    rng: &mut R,
) -> Result<TrialRecord> {
    if spec.kind.is_tree() {
        return Err(Error::InvalidModel(format!("{} is not an Erdős–Rényi model", spec.kind)));
    }
    let mut opts = RunOptions::for_spec(spec);
    opts.step.scheme = scheme;
    let mut rec = run_broadcast(spec, &opts, source, round_cap, rng)?;
    rec.strategy = match scheme {
        ErScheme::WithoutReplacement => "scheme1".into(),
        ErScheme::WithReplacement => "scheme2".into(),
    };
    Ok(rec)
}

/// Completion rounds of schemes 1 and 2 under the pathwise coupling: each
/// round draws `m` edges with replacement (scheme 2) and keeps drawing until
/// `m` distinct edges are seen (scheme 1), so scheme 1's graph contains
/// scheme 2's and its informed set is never smaller.
pub fn run_er_coupled<R: Rng + ?Sized>(
    spec: &ModelSpec,
    source: Node,
    round_cap: usize,
    rng: &mut R,
) -> Result<(Option<usize>, Option<usize>)> {
    if !matches!(spec.kind, ModelKind::Der | ModelKind::DerByz) {
        return Err(Error::InvalidModel("coupling needs DER or DER_BYZ".into()));
    }
    let cfg = StepConfig::default();
    let pool = EdgePool::new(spec.n, true);
    let mut s1 = BroadcastState::new(*spec, source)?;
    let mut s2 = s1.clone();
    let (mut c1, mut c2) = (None, None);
    if s1.is_complete() {
        return Ok((Some(0), Some(0)));
    }
    let mut seen = std::collections::HashSet::with_capacity(2 * spec.m);
    while (c1.is_none() || c2.is_none()) && s1.round < round_cap {
        let e2 = pool.sample_with_replacement(spec.m, rng)?;
        seen.clear();
        let mut e1 = Vec::with_capacity(spec.m);
        for &e in &e2 {
            if seen.insert(e) {
                e1.push(e);
            }
        }
        while e1.len() < spec.m {
            let e = pool.sample_one(rng);
            if seen.insert(e) {
                e1.push(e);
            }
        }
        apply_edges(&mut s1, &e1, &cfg, rng);
        apply_edges(&mut s2, &e2, &cfg, rng);
        if c1.is_none() && s1.is_complete() {
            c1 = Some(s1.round);
        }
        if c2.is_none() && s2.is_complete() {
            c2 = Some(s2.round);
        }
    }
    Ok((c1, c2))
}

/// Outcome of running every honest node's broadcast on one graph sequence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AllSourcesRecord {
    /// Completion round per node (`None` for Byzantine nodes or cap hits).
    pub per_source: Vec<Option<usize>>,
    /// Earliest completion over sources.
    pub radius: Option<usize>,
    /// Round at which every honest source has reached every honest node.
    pub all_to_all: Option<usize>,
    pub rounds_run: usize,
}

struct Bits {
    words: usize,
    data: Vec<u64>,
}

impl Bits {
    fn new(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64);
        Bits {
            words,
            data: vec![0; rows * words],
        }
    }

    fn set(&mut self, r: usize, c: usize) {
        self.data[r * self.words + c / 64] |= 1 << (c % 64);
    }

    fn get(&self, r: usize, c: usize) -> bool {
        self.data[r * self.words + c / 64] >> (c % 64) & 1 == 1
    }

    fn or_into(&mut self, dst: usize, src: &[u64]) {
        for (d, s) in self.data[dst * self.words..(dst + 1) * self.words]
            .iter_mut()
            .zip(src)
        {
            *d |= s;
        }
    }
}

/// Runs all `n` broadcasts on the same sampled graph sequence until every
/// honest source has reached every honest node or `round_cap` is hit.
/// Byzantine nodes are silent and are not sources.
pub fn run_all_sources<R: Rng + ?Sized>(
    spec: &ModelSpec,
    opts: &RunOptions,
    round_cap: usize,
    rng: &mut R,
) -> Result<AllSourcesRecord> {
    spec.validate()?;
    if spec.kind.is_adversarial() || !matches!(opts.strategy, Strategy::Oblivious) {
        return Err(Error::Strategy("all-source runs support oblivious models only".into()));
    }
    let n = spec.n;
    let byz_nodes = opts
        .byzantine_nodes
        .clone()
        .unwrap_or_else(|| spec.default_byzantine());
    let first_honest = (0..n).find(|v| !byz_nodes.contains(v)).unwrap();
    // The state only carries the Byzantine set and round for the samplers.
    let mut carrier = BroadcastState::with_byzantine(*spec, first_honest, &byz_nodes)?;
    let honest: Vec<bool> = (0..n).map(|v| !carrier.is_byzantine(v)).collect();
    let mut known = Bits::new(n, n);
    for v in 0..n {
        if honest[v] {
            known.set(v, v);
        }
    }
    let mut per_source = vec![None; n];
    let mut done = 0usize;
    let sources = honest.iter().filter(|&&h| h).count();
    let check = |known: &Bits, per_source: &mut Vec<Option<usize>>, done: &mut usize, round| {
        for s in 0..n {
            if honest[s]
                && per_source[s].is_none()
                && (0..n).all(|v| !honest[v] || known.get(v, s))
            {
                per_source[s] = Some(round);
                *done += 1;
            }
        }
    };
    check(&known, &mut per_source, &mut done, 0);
    let cfg = opts.step;
    while done < sources && carrier.round < round_cap {
        let snapshot = known.data.clone();
        let words = known.words;
        let row = |v: usize| &snapshot[v * words..(v + 1) * words];
        if spec.kind.is_tree() {
            let tree = sample_round_tree(&carrier, None, rng)?;
            for v in 0..n {
                let p = tree.parent(v);
                if p != v && honest[p] && honest[v] {
                    known.or_into(v, row(p));
                }
            }
            carrier.round += 1;
        } else {
            let edges = sample_round_edges(&carrier, None, &cfg, rng)?;
            for &(u, v) in &edges {
                if honest[u] && honest[v] {
                    known.or_into(v, row(u));
                }
            }
            carrier.round += 1;
        }
        check(&known, &mut per_source, &mut done, carrier.round);
    }
    let radius = per_source.iter().flatten().min().copied();
    let all_to_all = if done == sources {
        per_source.iter().flatten().max().copied()
    } else {
        None
    };
    Ok(AllSourcesRecord {
        per_source,
        radius,
        all_to_all,
        rounds_run: carrier.round,
    })
}

/// Convenience: full-graph tree step with the run's adversary, for callers
/// that drive rounds themselves.
pub fn step_with_strategy<R: Rng + ?Sized>(
    state: &mut BroadcastState,
    opts: &RunOptions,
    rng: &mut R,
) -> Result<()> {
    let spec = state.spec;
    if spec.kind.is_tree() {
        let adv = tree_adversary(&spec, &opts.strategy)?;
        let tree = sample_round_tree(state, adv.as_deref(), rng)?;
        apply_tree(state, &tree, &opts.step, rng);
    } else {
        let adv = er_adversary(&spec, &opts.strategy)?;
        step_full_er(state, adv.as_deref(), &opts.step, rng)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphgen::RngStream;

    #[test]
    fn single_node_completes_immediately() {
        let spec = ModelSpec::urt(1).unwrap();
        let mut rng = RngStream::new(1, 0).rng();
        for engine in [Engine::Fast, Engine::Full] {
            let opts = RunOptions {
                engine,
                ..Default::default()
            };
            let r = run_broadcast(&spec, &opts, 0, 10, &mut rng).unwrap();
            assert_eq!(r.completion_round, Some(0));
            assert!(!r.capped);
        }
    }

    #[test]
    fn cap_is_recorded() {
        let spec = ModelSpec::urt(50).unwrap();
        let mut rng = RngStream::new(1, 0).rng();
        let opts = RunOptions {
            trace: true,
            ..Default::default()
        };
        let r = run_broadcast(&spec, &opts, 0, 2, &mut rng).unwrap();
        assert!(r.capped);
        assert_eq!(r.completion_round, None);
        let trace = r.trace.clone().unwrap();
        assert_eq!(trace.len(), 3);
        assert!(trace.windows(2).all(|w| w[0] <= w[1]));
        assert!(r.csv_row().ends_with(",,true"));
    }

    #[test]
    fn two_nodes_all_sources() {
        let spec = ModelSpec::urt(2).unwrap();
        let mut rng = RngStream::new(5, 0).rng();
        for _ in 0..50 {
            let r = run_all_sources(&spec, &RunOptions::default(), 10, &mut rng).unwrap();
            assert_eq!(r.radius, Some(1));
            assert!(r.all_to_all.unwrap() >= r.radius.unwrap());
        }
    }

    #[test]
    fn coupling_orders_schemes() {
        let spec = ModelSpec::der(16, 8).unwrap();
        let mut rng = RngStream::new(5, 0).rng();
        for _ in 0..50 {
            let (a, b) = run_er_coupled(&spec, 0, 1000, &mut rng).unwrap();
            assert!(a.unwrap() <= b.unwrap());
        }
    }

    #[test]
    fn complete_digraph_one_round() {
        let spec = ModelSpec::der(6, 36).unwrap();
        let mut rng = RngStream::new(5, 0).rng();
        let r = run_er_scheme(&spec, ErScheme::WithoutReplacement, 0, 5, &mut rng).unwrap();
        assert_eq!(r.completion_round, Some(1));
    }
}
