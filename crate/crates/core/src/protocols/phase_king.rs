use std::collections::BTreeMap;

use rand::Rng;

use super::clique::{
    clique_simulate, halves, CliqueNetwork, CliqueProtocol, Decision, NodeBehavior,
    ProtocolOutcome,
};
use super::dolev_strong::byzantine_mask;
use super::signature::{SignedMessage, Signer, SigningAuthority};
use crate::dynamics::ModelSpec;
use crate::error::{Error, Result};
use crate::treecount::Node;

/// Placeholder value for "no clear majority".
const UNDECIDED: u8 = 2;

/// Binary consensus for `f < n/3`: `f + 1` phases of three rounds (values,
/// proposals, king). The king of phase `p` is node `n − 1 − p`, so faulty
/// kings (on the default Byzantine set) come first.
#[derive(Debug, Clone)]
pub struct PhaseKing {
    n: usize,
    f: usize,
    value: Vec<u8>,
    strong: Vec<bool>,
}

impl PhaseKing {
    pub fn new(n: usize, f: usize, inputs: &[u8]) -> Self {
        PhaseKing {
            n,
            f,
            value: inputs.to_vec(),
            strong: vec![false; n],
        }
    }

    pub fn king(&self, phase: usize) -> Node {
        self.n - 1 - phase
    }

    fn split(r: usize) -> (usize, usize) {
        ((r - 1) / 3, (r - 1) % 3)
    }

    /// One vote per origin among valid messages of this round; origins that
    /// signed two different values are dropped.
    fn votes(
        &self,
        phase: usize,
        step: usize,
        inbox: &[SignedMessage],
        auth: &SigningAuthority,
    ) -> BTreeMap<Node, u8> {
        let mut votes: BTreeMap<Node, Option<u8>> = BTreeMap::new();
        for m in inbox {
            if m.payload.len() != 3
                || m.payload[0] as usize != phase
                || m.payload[1] as usize != step
                || m.payload[2] > UNDECIDED
                || m.chain.len() != 1
                || !auth.verify(m)
            {
                continue;
            }
            let v = m.payload[2];
            votes
                .entry(m.origin)
                .and_modify(|e| {
                    if *e != Some(v) {
                        *e = None;
                    }
                })
                .or_insert(Some(v));
        }
        votes.into_iter().filter_map(|(k, v)| v.map(|v| (k, v))).collect()
    }
}

impl CliqueProtocol for PhaseKing {
    fn name(&self) -> String {
        "phase-king".into()
    }

    fn clique_rounds(&self) -> usize {
        3 * (self.f + 1)
    }

    fn send(&mut self, r: usize, v: Node, signer: &Signer<'_>) -> Vec<SignedMessage> {
        let (phase, step) = Self::split(r);
        let value = match step {
            0 | 1 => self.value[v],
            _ if v == self.king(phase) => self.value[v].min(1),
            _ => return Vec::new(),
        };
        vec![signer.sign_new(vec![phase as u8, step as u8, value])]
    }

    fn equivocate(
        &mut self,
        r: usize,
        v: Node,
        (a, b): (u8, u8),
        signer: &Signer<'_>,
        _view: &[SignedMessage],
    ) -> Vec<(SignedMessage, Vec<Node>)> {
        let (phase, step) = Self::split(r);
        if step == 2 && v != self.king(phase) {
            return Vec::new();
        }
        let (low, high) = halves(self.n);
        vec![
            (signer.sign_new(vec![phase as u8, step as u8, a]), low),
            (signer.sign_new(vec![phase as u8, step as u8, b]), high),
        ]
    }

    fn receive(&mut self, r: usize, v: Node, inbox: &[SignedMessage], auth: &SigningAuthority) {
        let (phase, step) = Self::split(r);
        let votes = self.votes(phase, step, inbox, auth);
        let count = |x: u8| votes.values().filter(|&&y| y == x).count();
        let (c0, c1) = (count(0), count(1));
        match step {
            0 => {
                let quorum = self.n - self.f;
                self.value[v] = if c0 >= quorum {
                    0
                } else if c1 >= quorum {
                    1
                } else {
                    UNDECIDED
                };
            }
            1 => {
                if c0.max(c1) > self.f {
                    self.value[v] = if c1 > c0 { 1 } else { 0 };
                }
                let support = if self.value[v] == 0 { c0 } else { c1 };
                self.strong[v] = self.value[v] != UNDECIDED && support >= self.n - self.f;
            }
            _ => {
                if !self.strong[v] {
                    self.value[v] = match votes.get(&self.king(phase)) {
                        Some(&x) if x <= 1 => x,
                        _ => 0,
                    };
                }
            }
        }
    }

    fn decide(&self, v: Node) -> Decision {
        match self.value[v] {
            UNDECIDED => Decision::Bottom,
            x => Decision::Value(x),
        }
    }
}

/// Byzantine consensus on binary `inputs` with the spec's `f`, each clique
/// round emulated over the dynamic network.
pub fn phase_king<R: Rng + ?Sized>(
    spec: &ModelSpec,
    inputs: &[u8],
    behaviors: &[NodeBehavior],
    c: f64,
    rng: &mut R,
) -> Result<ProtocolOutcome> {
    spec.validate()?;
    if 3 * spec.f >= spec.n {
        return Err(Error::InvalidModel(format!("phase king needs f < n/3, got f={}", spec.f)));
    }
    if inputs.len() != spec.n || inputs.iter().any(|&x| x > 1) {
        return Err(Error::InvalidArgument("need one binary input per node".into()));
    }
    let network = CliqueNetwork::new(spec, byzantine_mask(spec, behaviors)?, c)?;
    let mut p = PhaseKing::new(spec.n, spec.f, inputs);
    clique_simulate(&mut p, &network, behaviors, rng)
}
