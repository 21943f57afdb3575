//! Message-level protocols on top of the dynamic network: flooding
//! consensus, clique emulation with simulated signatures, Dolev–Strong and
//! Phase King.

mod alg1;
mod clique;
mod dolev_strong;
mod phase_king;
mod signature;

pub use alg1::{algorithm1_consensus, algorithm1_with_completion};
pub use clique::{
    behaviors_for, clique_simulate, ByzantineScript, CliqueNetwork, CliqueProtocol, Decision,
    Exchange, Injection, NodeBehavior, ProtocolOutcome,
};
pub use dolev_strong::{dolev_strong, DolevStrong};
pub use phase_king::{phase_king, PhaseKing};
pub use signature::{SignedMessage, Signer, SigningAuthority, Tag};
