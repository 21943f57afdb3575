use crate::error::{Error, Result};
use crate::treecount::{Node, RootedTree};

/// The deterministic height-2 tree for round `t ≥ 1`: rooted at node 0, edge
/// `0 → t`, and `t → i` for every other node. The hub cycles through
/// `1..n` so the sequence continues past round `n − 1`.
pub fn height2_round_tree(n: usize, t: usize) -> RootedTree {
    assert!(n >= 3 && t >= 1);
    let hub = (t - 1) % (n - 1) + 1;
    let parent = (0..n)
        .map(|v| match v {
            0 => 0,
            _ if v == hub => 0,
            _ => hub,
        })
        .collect();
    RootedTree::from_parents(parent).expect("star of depth two is a tree")
}

/// Replays the height-2 sequence where every node forwards every ID it knew
/// before the round, and returns the first round at which some ID is known
/// by all nodes.
pub fn height2_deterministic_lower_bound(n: usize) -> Result<usize> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("need n >= 3, got {n}")));
    }
    // known[v][id]
    let mut known: Vec<Vec<bool>> = (0..n)
        .map(|v| (0..n).map(|id| id == v).collect())
        .collect();
    // The sequence always finishes by round n - 1; the bound below is a guard.
    for t in 1..=2 * n {
        let tree = height2_round_tree(n, t);
        let before = known.clone();
        for v in 0..n {
            let p: Node = tree.parent(v);
            if p != v {
                for id in 0..n {
                    known[v][id] |= before[p][id];
                }
            }
        }
        if (0..n).any(|id| (0..n).all(|v| known[v][id])) {
            return Ok(t);
        }
    }
    unreachable!("height-2 sequence completes within n - 1 rounds")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trees_have_height_two() {
        for n in 3..10 {
            for t in 1..2 * n {
                let tree = height2_round_tree(n, t);
                assert_eq!(tree.root(), 0);
                assert!(tree.height() <= 2);
            }
        }
    }

    #[test]
    fn small_cases() {
        assert_eq!(height2_deterministic_lower_bound(3).unwrap(), 2);
        assert!(height2_deterministic_lower_bound(4).unwrap() >= 2);
        assert!(height2_deterministic_lower_bound(10).unwrap() >= 8);
        assert!(height2_deterministic_lower_bound(2).is_err());
    }
}
