use rand::Rng;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PhaseKind {
    /// Grow the informed set to `target` nodes.
    Doubling,
    /// Shrink the uninformed set to `target` nodes.
    Halving,
}

/// One phase of the edge-counting process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Phase {
    pub kind: PhaseKind,
    /// `i` for doubling phases, `j = ⌈log₂ u⌉` for halving phases with `u`
    /// uninformed nodes at the start.
    pub index: u32,
    pub target: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseCount {
    pub phase: Phase,
    pub edges: u64,
    /// High-probability edge budget for this phase at the given `c`.
    pub bound: f64,
}

fn ceil_log2(x: usize) -> u32 {
    if x <= 1 {
        0
    } else {
        usize::BITS - (x - 1).leading_zeros()
    }
}

/// Phase schedule for `n ≥ 2`: doubling phases `i = 1..=⌈log₂(n/2)⌉` with
/// targets `min(2^i, ⌈n/2⌉)`, then halving phases taking the `⌊n/2⌋`
/// uninformed nodes down by halves (`u → ⌊u/2⌋`) to zero.
pub fn scheme3_phases(n: usize) -> Vec<Phase> {
    assert!(n >= 2, "n must be at least 2");
    let half_up = n.div_ceil(2);
    // ⌈log₂(n/2)⌉ = ⌈log₂⌈n/2⌉⌉
    let doubling = ceil_log2(half_up);
    let mut phases: Vec<Phase> = (1..=doubling)
        .map(|i| Phase {
            kind: PhaseKind::Doubling,
            index: i,
            target: (1usize << i).min(half_up),
        })
        .collect();
    let mut u = n - half_up;
    while u > 0 {
        phases.push(Phase {
            kind: PhaseKind::Halving,
            index: ceil_log2(u),
            target: u / 2,
        });
        u /= 2;
    }
    phases
}

/// `8c · max(ln n, 2^{e-2}) · n / 2^{e-2}` for phase exponent `e`.
pub fn phase_bound(n: usize, c: f64, e: u32) -> f64 {
    let scale = 2f64.powi(e as i32 - 2);
    8.0 * c * (n as f64).ln().max(scale) * n as f64 / scale
}

/// Runs the phase process from a single informed node, drawing edges
/// uniformly with replacement from the `n²` pairs, and counts the edges each
/// phase needs. Within a phase only edges leaving the informed set of the
/// phase start count; newly reached nodes join at the phase end.
pub fn scheme3_edge_counter<R: Rng + ?Sized>(n: usize, c: f64, rng: &mut R) -> Vec<PhaseCount> {
    let mut informed = vec![false; n];
    informed[0] = true;
    let mut count = 1;
    let mut out = Vec::new();
    for phase in scheme3_phases(n) {
        let goal_reached = match phase.kind {
            PhaseKind::Doubling => phase.target,
            PhaseKind::Halving => n - phase.target,
        };
        let mut reached = informed.clone();
        let mut size = count;
        let mut edges = 0u64;
        while size < goal_reached {
            let u = rng.random_range(0..n);
            let v = rng.random_range(0..n);
            edges += 1;
            if informed[u] && !reached[v] {
                reached[v] = true;
                size += 1;
            }
        }
        informed = reached;
        count = size;
        out.push(PhaseCount {
            phase,
            edges,
            bound: phase_bound(n, c, phase.index),
        });
    }
    out
}
