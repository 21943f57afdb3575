use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

use super::signature::{SignedMessage, Signer, SigningAuthority};
use crate::analysis::clique_round_length;
use crate::dynamics::{ModelKind, ModelSpec};
use crate::error::{Error, Result};
use crate::graphgen::{sample_rooted_tree, EdgePool};
use crate::treecount::Node;

/// A node's output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Decision {
    Value(u8),
    Bottom,
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Decision::Value(v) => write!(f, "{v}"),
            Decision::Bottom => write!(f, "bot"),
        }
    }
}

/// A message a Byzantine node pushes into the network: offered to `targets`
/// (everyone if `None`) whenever they are its children, from network round
/// `delay` of the clique round on.
#[derive(Debug, Clone, PartialEq)]
pub struct Injection {
    pub msg: SignedMessage,
    pub targets: Option<Vec<Node>>,
    pub delay: usize,
}

/// Hand-written Byzantine logic. It only ever sees its own signer.
pub trait ByzantineScript: Send + Sync {
    fn name(&self) -> String;
    /// Injections for clique round `round` (1-based); `view` is every message
    /// that circulated in the previous clique round.
    fn act(
        &self,
        round: usize,
        signer: &Signer<'_>,
        view: &[SignedMessage],
        n: usize,
        round_length: usize,
    ) -> Vec<Injection>;
}

#[derive(Clone, Default)]
pub enum NodeBehavior {
    #[default]
    Honest,
    /// Sends and forwards nothing.
    Silent,
    /// Sends value `a` to the lower half of ids and `b` to the upper half,
    /// validly signed; with `late`, only in the last network round of each
    /// clique round.
    Equivocate { a: u8, b: u8, late: bool },
    Custom(Arc<dyn ByzantineScript>),
}

impl fmt::Debug for NodeBehavior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeBehavior::Honest => write!(f, "Honest"),
            NodeBehavior::Silent => write!(f, "Silent"),
            NodeBehavior::Equivocate { a, b, late } => {
                write!(f, "Equivocate({a}, {b}, late={late})")
            }
            NodeBehavior::Custom(s) => write!(f, "Custom({})", s.name()),
        }
    }
}

impl NodeBehavior {
    pub fn name(&self) -> String {
        match self {
            NodeBehavior::Honest => "honest".into(),
            NodeBehavior::Silent => "silent".into(),
            NodeBehavior::Equivocate { late: false, .. } => "equivocate".into(),
            NodeBehavior::Equivocate { late: true, .. } => "equivocate-late".into(),
            NodeBehavior::Custom(s) => s.name(),
        }
    }

    pub fn is_honest(&self) -> bool {
        matches!(self, NodeBehavior::Honest)
    }
}

/// `behavior` on the spec's default Byzantine set (the last `f` ids), honest
/// elsewhere.
pub fn behaviors_for(spec: &ModelSpec, behavior: NodeBehavior) -> Vec<NodeBehavior> {
    let mut out = vec![NodeBehavior::Honest; spec.n];
    for v in spec.default_byzantine() {
        out[v] = behavior.clone();
    }
    out
}

/// Target split used by equivocators: `a` to ids below `n/2`, `b` above.
pub(crate) fn halves(n: usize) -> (Vec<Node>, Vec<Node>) {
    ((0..n / 2).collect(), (n / 2..n).collect())
}

/// Per-node results of a protocol run plus delivery and audit bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolOutcome {
    pub protocol: String,
    /// `None` for Byzantine nodes.
    pub decisions: Vec<Option<Decision>>,
    pub clique_rounds: usize,
    /// Network rounds per clique round (`0` when the protocol runs on the
    /// network directly).
    pub round_length: usize,
    pub network_rounds: usize,
    /// 1-based clique rounds in which some honest→honest message was not
    /// delivered in time.
    pub failed_rounds: Vec<usize>,
    pub transcript: Vec<String>,
    pub transcript_digest: String,
    /// Every message in the transcript carries only issued tags.
    pub audit_ok: bool,
}

impl ProtocolOutcome {
    pub fn all_delivered(&self) -> bool {
        self.failed_rounds.is_empty()
    }

    pub fn honest_decisions(&self) -> impl Iterator<Item = Decision> + '_ {
        self.decisions.iter().flatten().copied()
    }

    /// All honest nodes decided the same thing.
    pub fn agreement(&self) -> bool {
        let mut it = self.honest_decisions();
        match it.next() {
            None => true,
            Some(d) => it.all(|x| x == d),
        }
    }
}

pub(crate) fn digest(lines: &[String]) -> String {
    let mut h = Sha256::new();
    for l in lines {
        h.update(l.as_bytes());
        h.update(b"\n");
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// One clique round's worth of flooding.
#[derive(Debug, Clone)]
pub struct Exchange {
    /// Messages known to each node at the end. Byzantine nodes are treated as
    /// a coalition that sees everything in circulation.
    pub inbox: Vec<Vec<SignedMessage>>,
    pub delivered: bool,
}

/// The dynamic network used to emulate a clique: every honest node forwards
/// everything it holds, each clique round lasting `round_length` rounds.
#[derive(Debug, Clone)]
pub struct CliqueNetwork {
    spec: ModelSpec,
    byzantine: Vec<bool>,
    round_length: usize,
}

impl CliqueNetwork {
    pub fn new(spec: &ModelSpec, byzantine: Vec<bool>, c: f64) -> Result<Self> {
        Self::with_round_length(spec, byzantine, clique_round_length(spec.n, c))
    }

    pub fn with_round_length(spec: &ModelSpec, byzantine: Vec<bool>, round_length: usize) -> Result<Self> {
        spec.validate()?;
        if spec.kind.is_adversarial() {
            return Err(Error::InvalidModel(format!("no clique emulation on {}", spec.kind)));
        }
        if byzantine.len() != spec.n {
            return Err(Error::InvalidArgument("Byzantine mask has the wrong length".into()));
        }
        let f = byzantine.iter().filter(|&&b| b).count();
        if f > spec.f {
            return Err(Error::InvalidArgument(format!(
                "{f} Byzantine nodes but the model allows {}",
                spec.f
            )));
        }
        Ok(CliqueNetwork {
            spec: *spec,
            byzantine,
            round_length,
        })
    }

    pub fn round_length(&self) -> usize {
        self.round_length
    }

    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn is_byzantine(&self, v: Node) -> bool {
        self.byzantine[v]
    }

    fn round_edges<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<(Node, Node)>> {
        let n = self.spec.n;
        Ok(match self.spec.kind {
            ModelKind::Urt | ModelKind::UrtByz => sample_rooted_tree(n, rng).edges().collect(),
            _ => EdgePool::new(n, true).sample_distinct(self.spec.m, rng)?,
        })
    }

    /// Floods honest messages (held by their sender) and Byzantine injections
    /// for `round_length` rounds. Stops sampling early once nothing can
    /// change any honest node's view.
    pub fn exchange<R: Rng + ?Sized>(
        &self,
        honest: Vec<(Node, SignedMessage)>,
        injections: Vec<(Node, Injection)>,
        rng: &mut R,
    ) -> Result<Exchange> {
        let n = self.spec.n;
        let honest_count = honest.len();
        let mut msgs: Vec<SignedMessage> = Vec::with_capacity(honest_count + injections.len());
        // (injector, target mask, delay) per injected message
        let mut offers: Vec<(Node, Vec<bool>, usize)> = Vec::new();
        let total = honest_count + injections.len();
        let mut known = vec![false; n * total];
        for (i, (v, m)) in honest.into_iter().enumerate() {
            known[v * total + i] = true;
            msgs.push(m);
        }
        for (b, inj) in injections {
            let mask = match &inj.targets {
                None => vec![true; n],
                Some(ts) => {
                    let mut mask = vec![false; n];
                    for &t in ts.iter().filter(|&&t| t < n) {
                        mask[t] = true;
                    }
                    mask
                }
            };
            offers.push((b, mask, inj.delay));
            msgs.push(inj.msg);
        }
        let honest_nodes: Vec<Node> = (0..n).filter(|&v| !self.byzantine[v]).collect();
        let max_delay = offers.iter().map(|o| o.2).max().unwrap_or(0);
        let settled = |known: &[bool]| {
            (0..total).all(|i| {
                let reachable = i < honest_count
                    || honest_nodes.iter().any(|&v| known[v * total + i])
                    || honest_nodes.iter().any(|&v| offers[i - honest_count].1[v]);
                !reachable || honest_nodes.iter().all(|&v| known[v * total + i])
            })
        };
        for t in 0..self.round_length {
            if t >= max_delay && settled(&known) {
                break;
            }
            let edges = self.round_edges(rng)?;
            let before = known.clone();
            for (p, c) in edges {
                if p == c {
                    continue;
                }
                if !self.byzantine[p] {
                    for i in 0..total {
                        if before[p * total + i] {
                            known[c * total + i] = true;
                        }
                    }
                } else {
                    for (j, (b, mask, delay)) in offers.iter().enumerate() {
                        if *b == p && *delay <= t && mask[c] {
                            known[c * total + honest_count + j] = true;
                        }
                    }
                }
            }
        }
        let delivered = (0..honest_count)
            .all(|i| honest_nodes.iter().all(|&v| known[v * total + i]));
        let inbox = (0..n)
            .map(|v| {
                if self.byzantine[v] {
                    msgs.clone()
                } else {
                    (0..total)
                        .filter(|&i| known[v * total + i])
                        .map(|i| msgs[i].clone())
                        .collect()
                }
            })
            .collect();
        Ok(Exchange { inbox, delivered })
    }
}

/// A synchronous protocol written for a complete network: in each clique
/// round every node broadcasts, then reads everything it received.
pub trait CliqueProtocol {
    fn name(&self) -> String;
    fn clique_rounds(&self) -> usize;
    /// Broadcasts of honest node `v` in clique round `r` (1-based).
    fn send(&mut self, r: usize, v: Node, signer: &Signer<'_>) -> Vec<SignedMessage>;
    /// What an equivocating node does in round `r`.
    fn equivocate(
        &mut self,
        r: usize,
        v: Node,
        values: (u8, u8),
        signer: &Signer<'_>,
        view: &[SignedMessage],
    ) -> Vec<(SignedMessage, Vec<Node>)>;
    fn receive(&mut self, r: usize, v: Node, inbox: &[SignedMessage], authority: &SigningAuthority);
    fn decide(&self, v: Node) -> Decision;
}

/// Runs `protocol` with each clique round emulated by flooding over the
/// network for `network.round_length()` rounds. Delivery failures are
/// recorded and the protocol carries on with what arrived.
pub fn clique_simulate<P: CliqueProtocol, R: Rng + ?Sized>(
    protocol: &mut P,
    network: &CliqueNetwork,
    behaviors: &[NodeBehavior],
    rng: &mut R,
) -> Result<ProtocolOutcome> {
    let n = network.n();
    if behaviors.len() != n {
        return Err(Error::InvalidArgument("one behavior per node required".into()));
    }
    if (0..n).any(|v| behaviors[v].is_honest() == network.is_byzantine(v)) {
        return Err(Error::InvalidArgument(
            "behaviors must be honest exactly on the honest nodes".into(),
        ));
    }
    let authority = SigningAuthority::new(rng);
    let big_r = network.round_length();
    let mut transcript = Vec::new();
    let mut failed_rounds = Vec::new();
    let mut audit_ok = true;
    let mut view: Vec<SignedMessage> = Vec::new();
    let rounds = protocol.clique_rounds();
    for r in 1..=rounds {
        let mut honest = Vec::new();
        let mut injections = Vec::new();
        for (v, behavior) in behaviors.iter().enumerate() {
            let signer = authority.signer(v);
            match behavior {
                NodeBehavior::Honest => {
                    for m in protocol.send(r, v, &signer) {
                        honest.push((v, m));
                    }
                }
                NodeBehavior::Silent => {}
                NodeBehavior::Equivocate { a, b, late } => {
                    let delay = if *late { big_r.saturating_sub(1) } else { 0 };
                    for (msg, targets) in protocol.equivocate(r, v, (*a, *b), &signer, &view) {
                        injections.push((
                            v,
                            Injection {
                                msg,
                                targets: Some(targets),
                                delay,
                            },
                        ));
                    }
                }
                NodeBehavior::Custom(script) => {
                    for inj in script.act(r, &signer, &view, n, big_r) {
                        injections.push((v, inj));
                    }
                }
            }
        }
        for (v, m) in &honest {
            audit_ok &= authority.verify(m);
            transcript.push(format!("r={r} from={v} delay=0 {}", m.to_line()));
        }
        for (v, inj) in &injections {
            audit_ok &= authority.verify(&inj.msg);
            transcript.push(format!("r={r} from={v} delay={} {}", inj.delay, inj.msg.to_line()));
        }
        let ex = network.exchange(honest, injections, rng)?;
        if !ex.delivered {
            failed_rounds.push(r);
        }
        for (v, behavior) in behaviors.iter().enumerate() {
            if behavior.is_honest() {
                protocol.receive(r, v, &ex.inbox[v], &authority);
            }
        }
        view = (0..n)
            .find(|&v| network.is_byzantine(v))
            .map(|b| ex.inbox[b].clone())
            .unwrap_or_default();
    }
    let decisions = (0..n)
        .map(|v| behaviors[v].is_honest().then(|| protocol.decide(v)))
        .collect();
    Ok(ProtocolOutcome {
        protocol: protocol.name(),
        decisions,
        clique_rounds: rounds,
        round_length: big_r,
        network_rounds: rounds * big_r,
        failed_rounds,
        transcript_digest: digest(&transcript),
        transcript,
        audit_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphgen::RngStream;

    #[test]
    fn honest_flooding_delivers() {
        let spec = ModelSpec::urt(16).unwrap();
        let net = CliqueNetwork::new(&spec, vec![false; 16], 2.0).unwrap();
        let mut rng = RngStream::new(5, 0).rng();
        let auth = SigningAuthority::new(&mut rng);
        let msgs = (0..16).map(|v| (v, auth.signer(v).sign_new(vec![v as u8]))).collect();
        let ex = net.exchange(msgs, Vec::new(), &mut rng).unwrap();
        assert!(ex.delivered);
        assert!(ex.inbox.iter().all(|b| b.len() == 16));
    }

    #[test]
    fn zero_length_rounds_fail_delivery() {
        let spec = ModelSpec::urt(4).unwrap();
        let net = CliqueNetwork::with_round_length(&spec, vec![false; 4], 0).unwrap();
        let mut rng = RngStream::new(6, 0).rng();
        let auth = SigningAuthority::new(&mut rng);
        let ex = net
            .exchange(vec![(0, auth.signer(0).sign_new(vec![1]))], Vec::new(), &mut rng)
            .unwrap();
        assert!(!ex.delivered);
        assert_eq!(ex.inbox[0].len(), 1);
        assert!(ex.inbox[1].is_empty());
    }

    #[test]
    fn targeted_injection_reaches_only_through_targets() {
        // Byzantine node 3 offers to nobody: honest nodes never see it.
        let spec = ModelSpec::urt_byz(6, 1).unwrap();
        let mut byz = vec![false; 6];
        byz[5] = true;
        let net = CliqueNetwork::with_round_length(&spec, byz, 50).unwrap();
        let mut rng = RngStream::new(7, 0).rng();
        let auth = SigningAuthority::new(&mut rng);
        let inj = Injection {
            msg: auth.signer(5).sign_new(vec![0]),
            targets: Some(Vec::new()),
            delay: 0,
        };
        let ex = net.exchange(Vec::new(), vec![(5, inj)], &mut rng).unwrap();
        assert!(ex.delivered);
        assert!(ex.inbox[..5].iter().all(Vec::is_empty));
        assert_eq!(ex.inbox[5].len(), 1);
    }

    #[test]
    fn rejects_too_many_byzantine() {
        let spec = ModelSpec::urt(6).unwrap();
        let mut byz = vec![false; 6];
        byz[0] = true;
        assert!(CliqueNetwork::new(&spec, byz, 1.0).is_err());
    }
}
