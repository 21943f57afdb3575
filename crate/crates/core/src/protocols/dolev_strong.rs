use std::collections::BTreeSet;

use rand::Rng;

use super::clique::{
    clique_simulate, halves, CliqueNetwork, CliqueProtocol, Decision, NodeBehavior,
    ProtocolOutcome,
};
use super::signature::{SignedMessage, Signer, SigningAuthority};
use crate::dynamics::ModelSpec;
use crate::error::{Error, Result};
use crate::treecount::Node;

/// Signed-chain reliable broadcast tolerating `f` faults in `f + 1` rounds.
#[derive(Debug, Clone)]
pub struct DolevStrong {
    n: usize,
    f: usize,
    sender: Node,
    value: u8,
    extracted: Vec<BTreeSet<u8>>,
    relay: Vec<Vec<SignedMessage>>,
}

impl DolevStrong {
    pub fn new(n: usize, f: usize, sender: Node, value: u8) -> Self {
        let mut extracted = vec![BTreeSet::new(); n];
        extracted[sender].insert(value);
        DolevStrong {
            n,
            f,
            sender,
            value,
            extracted,
            relay: vec![Vec::new(); n],
        }
    }

    fn accepts(&self, r: usize, v: Node, m: &SignedMessage, auth: &SigningAuthority) -> bool {
        m.origin == self.sender
            && m.payload.len() == 1
            && m.chain.len() >= r
            && m.has_distinct_signers()
            && !m.signers().any(|s| s == v)
            && auth.verify(m)
    }
}

impl CliqueProtocol for DolevStrong {
    fn name(&self) -> String {
        "dolev-strong".into()
    }

    fn clique_rounds(&self) -> usize {
        self.f + 1
    }

    fn send(&mut self, r: usize, v: Node, signer: &Signer<'_>) -> Vec<SignedMessage> {
        if r == 1 {
            return if v == self.sender {
                vec![signer.sign_new(vec![self.value])]
            } else {
                Vec::new()
            };
        }
        std::mem::take(&mut self.relay[v])
            .iter()
            .map(|m| signer.countersign(m))
            .collect()
    }

    fn equivocate(
        &mut self,
        r: usize,
        v: Node,
        (a, b): (u8, u8),
        signer: &Signer<'_>,
        view: &[SignedMessage],
    ) -> Vec<(SignedMessage, Vec<Node>)> {
        let (low, high) = halves(self.n);
        if r == 1 {
            if v != self.sender {
                return Vec::new();
            }
            return vec![
                (signer.sign_new(vec![a]), low),
                (signer.sign_new(vec![b]), high),
            ];
        }
        // Countersign every chain that is just long enough and push it to
        // half the network, split by value.
        let mut seen = BTreeSet::new();
        view.iter()
            .filter(|m| {
                m.origin == self.sender
                    && m.chain.len() == r - 1
                    && !m.signers().any(|s| s == v)
                    && seen.insert((m.payload.clone(), m.chain.clone()))
            })
            .map(|m| {
                let targets = if m.payload.first() == Some(&a) { low.clone() } else { high.clone() };
                (signer.countersign(m), targets)
            })
            .collect()
    }

    fn receive(&mut self, r: usize, v: Node, inbox: &[SignedMessage], auth: &SigningAuthority) {
        for m in inbox {
            if self.extracted[v].len() >= 2 || !self.accepts(r, v, m, auth) {
                continue;
            }
            if self.extracted[v].insert(m.payload[0]) && r < self.f + 1 {
                self.relay[v].push(m.clone());
            }
        }
    }

    fn decide(&self, v: Node) -> Decision {
        match self.extracted[v].len() {
            1 => Decision::Value(*self.extracted[v].iter().next().expect("one value")),
            _ => Decision::Bottom,
        }
    }
}

pub(crate) fn byzantine_mask(spec: &ModelSpec, behaviors: &[NodeBehavior]) -> Result<Vec<bool>> {
    if behaviors.len() != spec.n {
        return Err(Error::InvalidArgument(format!(
            "{} behaviors for {} nodes",
            behaviors.len(),
            spec.n
        )));
    }
    Ok(behaviors.iter().map(|b| !b.is_honest()).collect())
}

/// Reliable broadcast of `value` from `sender` with the spec's `f` as fault
/// bound, each clique round emulated over the dynamic network.
pub fn dolev_strong<R: Rng + ?Sized>(
    spec: &ModelSpec,
    sender: Node,
    value: u8,
    behaviors: &[NodeBehavior],
    c: f64,
    rng: &mut R,
) -> Result<ProtocolOutcome> {
    spec.validate()?;
    if sender >= spec.n {
        return Err(Error::NodeOutOfRange { node: sender, n: spec.n });
    }
    if spec.f > 0 && 3 * spec.f + 3 > 2 * spec.n {
        return Err(Error::InvalidModel(format!("f={} exceeds 2n/3 - 1", spec.f)));
    }
    let network = CliqueNetwork::new(spec, byzantine_mask(spec, behaviors)?, c)?;
    let mut p = DolevStrong::new(spec.n, spec.f, sender, value);
    clique_simulate(&mut p, &network, behaviors, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphgen::RngStream;
    use crate::protocols::clique::behaviors_for;

    #[test]
    fn honest_sender_single_round() {
        let spec = ModelSpec::urt(8).unwrap();
        let b = behaviors_for(&spec, NodeBehavior::Silent);
        let out = dolev_strong(&spec, 0, 1, &b, 1.0, &mut RngStream::new(1, 0).rng()).unwrap();
        assert_eq!(out.clique_rounds, 1);
        assert_eq!(out.network_rounds, out.round_length);
        assert!(out.all_delivered());
        assert!(out.honest_decisions().all(|d| d == Decision::Value(1)));
        assert!(out.audit_ok);
    }

    #[test]
    fn equivocating_sender_agreement() {
        let spec = ModelSpec::urt_byz(8, 2).unwrap();
        for late in [false, true] {
            let b = behaviors_for(&spec, NodeBehavior::Equivocate { a: 0, b: 1, late });
            for seed in 0..20 {
                let out =
                    dolev_strong(&spec, 7, 0, &b, 1.0, &mut RngStream::new(seed, 1).rng()).unwrap();
                assert_eq!(out.clique_rounds, 3);
                assert_eq!(out.network_rounds, 3 * out.round_length);
                if out.all_delivered() {
                    assert!(out.agreement(), "seed {seed} late {late}: {:?}", out.decisions);
                }
                assert!(out.audit_ok);
            }
        }
    }

    #[test]
    fn validity_with_byzantine_relays() {
        let spec = ModelSpec::urt_byz(10, 3).unwrap();
        let b = behaviors_for(&spec, NodeBehavior::Equivocate { a: 0, b: 1, late: true });
        for seed in 0..10 {
            let out = dolev_strong(&spec, 0, 1, &b, 1.0, &mut RngStream::new(seed, 2).rng()).unwrap();
            assert!(out.all_delivered());
            assert!(out.honest_decisions().all(|d| d == Decision::Value(1)));
        }
    }
}
