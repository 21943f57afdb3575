use std::cell::RefCell;
use std::collections::HashSet;
use std::fmt;

use rand::Rng;
use sha2::{Digest, Sha256};

use crate::treecount::Node;

/// 128-bit signature tag.
pub type Tag = [u8; 16];

/// Issues and checks tags under a key only the simulator knows. Every issued
/// tag is logged so transcripts can be audited.
pub struct SigningAuthority {
    key: [u8; 32],
    issued: RefCell<HashSet<(Node, Tag)>>,
}

impl fmt::Debug for SigningAuthority {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SigningAuthority")
            .field("issued", &self.issued.borrow().len())
            .finish_non_exhaustive()
    }
}

impl SigningAuthority {
    pub fn new<R: Rng + ?Sized>(rng: &mut R) -> Self {
        SigningAuthority {
            key: rng.random(),
            issued: RefCell::new(HashSet::new()),
        }
    }

    /// The signing capability of `node` alone.
    pub fn signer(&self, node: Node) -> Signer<'_> {
        Signer {
            node,
            authority: self,
        }
    }

    fn tag(&self, signer: Node, content: &[u8]) -> Tag {
        let mut h = Sha256::new();
        h.update(self.key);
        h.update((signer as u64).to_le_bytes());
        h.update(content);
        let digest = h.finalize();
        let mut tag = [0u8; 16];
        tag.copy_from_slice(&digest[..16]);
        tag
    }

    fn issue(&self, signer: Node, content: &[u8]) -> Tag {
        let tag = self.tag(signer, content);
        self.issued.borrow_mut().insert((signer, tag));
        tag
    }

    /// Every link carries the tag its signer would get for exactly that
    /// content, and the tag was actually issued.
    pub fn verify(&self, msg: &SignedMessage) -> bool {
        let issued = self.issued.borrow();
        !msg.chain.is_empty()
            && msg.chain[0].0 == msg.origin
            && (0..msg.chain.len()).all(|i| {
                let (signer, tag) = msg.chain[i];
                tag == self.tag(signer, &msg.content(i)) && issued.contains(&(signer, tag))
            })
    }

    pub fn issued_count(&self) -> usize {
        self.issued.borrow().len()
    }
}

/// One node's signing key.
#[derive(Clone, Copy)]
pub struct Signer<'a> {
    node: Node,
    authority: &'a SigningAuthority,
}

impl Signer<'_> {
    pub fn node(&self) -> Node {
        self.node
    }

    /// A fresh message with this node as origin and first signer.
    pub fn sign_new(&self, payload: Vec<u8>) -> SignedMessage {
        let mut msg = SignedMessage {
            payload,
            origin: self.node,
            chain: Vec::new(),
        };
        let tag = self.authority.issue(self.node, &msg.content(0));
        msg.chain.push((self.node, tag));
        msg
    }

    /// `msg` with this node's signature appended.
    pub fn countersign(&self, msg: &SignedMessage) -> SignedMessage {
        let mut out = msg.clone();
        let tag = self.authority.issue(self.node, &out.content(out.chain.len()));
        out.chain.push((self.node, tag));
        out
    }
}

/// Payload, origin and an ordered chain of signatures; link `i` signs the
/// payload, the origin and links `0..i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignedMessage {
    pub payload: Vec<u8>,
    pub origin: Node,
    pub chain: Vec<(Node, Tag)>,
}

impl SignedMessage {
    fn content(&self, upto: usize) -> Vec<u8> {
        let mut c = Vec::with_capacity(16 + self.payload.len() + 24 * upto);
        c.extend((self.payload.len() as u64).to_le_bytes());
        c.extend(&self.payload);
        c.extend((self.origin as u64).to_le_bytes());
        for (s, t) in &self.chain[..upto] {
            c.extend((*s as u64).to_le_bytes());
            c.extend(t);
        }
        c
    }

    pub fn signers(&self) -> impl Iterator<Item = Node> + '_ {
        self.chain.iter().map(|&(s, _)| s)
    }

    pub fn has_distinct_signers(&self) -> bool {
        let mut seen = HashSet::new();
        self.signers().all(|s| seen.insert(s))
    }

    /// One-line rendering for transcripts.
    pub fn to_line(&self) -> String {
        let payload: String = self.payload.iter().map(|b| format!("{b:02x}")).collect();
        let chain: Vec<String> = self
            .chain
            .iter()
            .map(|(s, t)| {
                let hex: String = t.iter().map(|b| format!("{b:02x}")).collect();
                format!("{s}:{hex}")
            })
            .collect();
        format!("origin={} payload={} chain={}", self.origin, payload, chain.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphgen::RngStream;

    #[test]
    fn honest_chains_verify() {
        let auth = SigningAuthority::new(&mut RngStream::new(1, 0).rng());
        let m = auth.signer(3).sign_new(vec![1]);
        assert!(auth.verify(&m));
        let m2 = auth.signer(5).countersign(&m);
        assert!(auth.verify(&m2));
        assert!(m2.has_distinct_signers());
        assert_eq!(m2.signers().collect::<Vec<_>>(), vec![3, 5]);
        assert!(!auth.signer(3).countersign(&m).has_distinct_signers());
    }

    #[test]
    fn tampering_is_detected() {
        let auth = SigningAuthority::new(&mut RngStream::new(2, 0).rng());
        let m = auth.signer(1).countersign(&auth.signer(0).sign_new(vec![0]));
        let mut changed = m.clone();
        changed.payload = vec![1];
        assert!(!auth.verify(&changed));
        let mut relabeled = m.clone();
        relabeled.chain[1].0 = 2;
        assert!(!auth.verify(&relabeled));
        let mut forged = m.clone();
        forged.chain.push((4, [7; 16]));
        assert!(!auth.verify(&forged));
        let mut wrong_origin = m;
        wrong_origin.origin = 1;
        assert!(!auth.verify(&wrong_origin));
    }

    #[test]
    fn other_keys_do_not_verify() {
        let a = SigningAuthority::new(&mut RngStream::new(3, 0).rng());
        let b = SigningAuthority::new(&mut RngStream::new(4, 0).rng());
        assert!(!a.verify(&b.signer(0).sign_new(vec![9])));
    }
}
