use rand::Rng;

use super::clique::{digest, Decision, ProtocolOutcome};
use crate::analysis::predicted_round_budget;
use crate::dynamics::{step_with_strategy, BroadcastState, ModelKind, ModelSpec, RunOptions};
use crate::error::{Error, Result};

/// Consensus by flooding node 0's input bit for the broadcast budget. Each
/// message is that single bit; nodes that have it output it, the rest `⊥`.
pub fn algorithm1_consensus<R: Rng + ?Sized>(
    spec: &ModelSpec,
    inputs: &[u8],
    c: f64,
    rng: &mut R,
) -> Result<ProtocolOutcome> {
    Ok(algorithm1_with_completion(spec, inputs, c, rng)?.0)
}

/// [`algorithm1_consensus`] plus the round by which every node held the bit
/// (`None` if that did not happen within the budget).
pub fn algorithm1_with_completion<R: Rng + ?Sized>(
    spec: &ModelSpec,
    inputs: &[u8],
    c: f64,
    rng: &mut R,
) -> Result<(ProtocolOutcome, Option<usize>)> {
    if !matches!(spec.kind, ModelKind::Urt | ModelKind::Der) {
        return Err(Error::InvalidModel(format!("{} is not an all-honest model", spec.kind)));
    }
    if inputs.len() != spec.n || inputs.iter().any(|&x| x > 1) {
        return Err(Error::InvalidArgument("need one binary input per node".into()));
    }
    let budget = predicted_round_budget(spec, c)?.rounds;
    let v1 = inputs[0];
    let opts = RunOptions::for_spec(spec);
    let mut state = BroadcastState::new(*spec, 0)?;
    // Once everyone holds the bit nothing changes; the remaining rounds only
    // count.
    while state.round < budget && !state.is_complete() {
        step_with_strategy(&mut state, &opts, rng)?;
    }
    let decisions = (0..spec.n)
        .map(|v| {
            Some(if state.is_informed(v) {
                Decision::Value(v1)
            } else {
                Decision::Bottom
            })
        })
        .collect();
    let transcript = vec![format!(
        "bit={v1} budget={budget} informed={} rounds_active={}",
        state.count(),
        state.round
    )];
    let completion = state.is_complete().then_some(state.round);
    let outcome = ProtocolOutcome {
        protocol: "alg1".into(),
        decisions,
        clique_rounds: 0,
        round_length: 0,
        network_rounds: budget,
        failed_rounds: Vec::new(),
        transcript_digest: digest(&transcript),
        transcript,
        audit_ok: true,
    };
    Ok((outcome, completion))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphgen::RngStream;

    #[test]
    fn single_node_decides_immediately() {
        let spec = ModelSpec::urt(1).unwrap();
        let out = algorithm1_consensus(&spec, &[1], 1.0, &mut RngStream::new(0, 0).rng()).unwrap();
        assert_eq!(out.decisions, vec![Some(Decision::Value(1))]);
        assert_eq!(out.network_rounds, 0);
    }

    #[test]
    fn outputs_are_v1_or_bottom() {
        let spec = ModelSpec::urt(30).unwrap();
        let inputs: Vec<u8> = (0..30).map(|v| (v % 2) as u8).collect();
        for seed in 0..50 {
            let out = algorithm1_consensus(&spec, &inputs, 1.0, &mut RngStream::new(seed, 0).rng())
                .unwrap();
            assert!(out
                .honest_decisions()
                .all(|d| d == Decision::Value(0) || d == Decision::Bottom));
        }
        let er = ModelSpec::der(20, 20).unwrap();
        let out = algorithm1_consensus(&er, &[1; 20], 1.0, &mut RngStream::new(1, 0).rng()).unwrap();
        assert!(out.agreement());
        assert!(algorithm1_consensus(&ModelSpec::urt_byz(9, 1).unwrap(), &[0; 9], 1.0, &mut RngStream::new(1, 0).rng()).is_err());
    }
}
