use serde::{Deserialize, Serialize};

use super::model::ModelSpec;
use crate::error::{Error, Result};
use crate::treecount::Node;

/// What Byzantine nodes do with a message they hold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub enum ByzantineBehavior {
    /// Never forward anything; the worst case for dissemination.
    #[default]
    Silent,
    /// Forward like an honest node.
    Forward,
    /// Forward in each round independently with this probability.
    Random(f64),
}

impl ByzantineBehavior {
    pub fn name(&self) -> String {
        match self {
            ByzantineBehavior::Silent => "silent".into(),
            ByzantineBehavior::Forward => "forward".into(),
            ByzantineBehavior::Random(p) => format!("random({p})"),
        }
    }
}

/// Full single-source broadcast state: which nodes are informed after
/// `round` rounds.
#[derive(Debug, Clone, PartialEq)]
pub struct BroadcastState {
    pub spec: ModelSpec,
    pub round: usize,
    informed: Vec<bool>,
    count: usize,
    byzantine: Vec<bool>,
    // Byzantine nodes that have received the message; they never count as
    // informed.
    holding: Vec<bool>,
}

impl BroadcastState {
    /// Starts from `source`, with the model's default Byzantine set.
    pub fn new(spec: ModelSpec, source: Node) -> Result<Self> {
        Self::with_byzantine(spec, source, &spec.default_byzantine())
    }

    pub fn with_byzantine(spec: ModelSpec, source: Node, byzantine: &[Node]) -> Result<Self> {
        let n = spec.n;
        if byzantine.len() != spec.f {
            return Err(Error::InvalidArgument(format!(
                "expected {} Byzantine nodes, got {}",
                spec.f,
                byzantine.len()
            )));
        }
        let mut byz = vec![false; n];
        for &b in byzantine {
            if b >= n {
                return Err(Error::NodeOutOfRange { node: b, n });
            }
            byz[b] = true;
        }
        if byz.iter().filter(|&&b| b).count() != spec.f {
            return Err(Error::InvalidArgument("duplicate Byzantine node".into()));
        }
        if source >= n {
            return Err(Error::NodeOutOfRange { node: source, n });
        }
        if byz[source] {
            return Err(Error::InvalidArgument(format!("source {source} is Byzantine")));
        }
        let mut informed = vec![false; n];
        informed[source] = true;
        Ok(BroadcastState {
            spec,
            round: 0,
            informed,
            count: 1,
            byzantine: byz,
            holding: vec![false; n],
        })
    }

    /// Arbitrary informed set (used to set up single-round comparisons).
    pub fn from_informed(spec: ModelSpec, informed: &[Node]) -> Result<Self> {
        let (&first, rest) = informed
            .split_first()
            .ok_or_else(|| Error::InvalidArgument("informed set is empty".into()))?;
        let mut s = Self::new(spec, first)?;
        for &v in rest {
            if v >= spec.n {
                return Err(Error::NodeOutOfRange { node: v, n: spec.n });
            }
            if s.byzantine[v] {
                return Err(Error::InvalidArgument(format!("node {v} is Byzantine")));
            }
            s.inform(v);
        }
        Ok(s)
    }

    pub fn informed(&self) -> &[bool] {
        &self.informed
    }

    pub fn is_informed(&self, v: Node) -> bool {
        self.informed[v]
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn byzantine(&self) -> &[bool] {
        &self.byzantine
    }

    pub fn is_byzantine(&self, v: Node) -> bool {
        self.byzantine[v]
    }

    pub fn is_holding(&self, v: Node) -> bool {
        self.holding[v]
    }

    /// All honest nodes are informed.
    pub fn is_complete(&self) -> bool {
        self.count == self.spec.honest()
    }

    pub(crate) fn inform(&mut self, v: Node) {
        if self.byzantine[v] {
            self.holding[v] = true;
        } else if !self.informed[v] {
            self.informed[v] = true;
            self.count += 1;
        }
    }
}

/// Count-only state for the fast-forward samplers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountState {
    pub spec: ModelSpec,
    pub round: usize,
    pub count: usize,
}

impl CountState {
    pub fn new(spec: ModelSpec) -> Self {
        CountState {
            spec,
            round: 0,
            count: 1,
        }
    }

    pub fn with_count(spec: ModelSpec, count: usize) -> Result<Self> {
        if count == 0 || count > spec.honest() {
            return Err(Error::InvalidArgument(format!(
                "informed count {count} outside 1..={}",
                spec.honest()
            )));
        }
        Ok(CountState {
            spec,
            round: 0,
            count,
        })
    }

    pub fn is_complete(&self) -> bool {
        self.count == self.spec.honest()
    }
}
