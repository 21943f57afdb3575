use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use rand::Rng;

use crate::treecount::{Node, RootedForest, RootedTree};

/// Decodes a Prüfer sequence over labels `0..m` into the `m - 1` undirected
/// edges of the corresponding labeled tree.
pub fn prufer_decode(m: usize, seq: &[usize]) -> Vec<(usize, usize)> {
    debug_assert!(m >= 2 && seq.len() == m - 2);
    let mut degree = vec![1usize; m];
    for &s in seq {
        degree[s] += 1;
    }
    let mut leaves: BinaryHeap<Reverse<usize>> =
        (0..m).filter(|&v| degree[v] == 1).map(Reverse).collect();
    let mut edges = Vec::with_capacity(m - 1);
    for &s in seq {
        let Reverse(leaf) = leaves.pop().expect("a tree always has a leaf");
        edges.push((leaf, s));
        degree[s] -= 1;
        if degree[s] == 1 {
            leaves.push(Reverse(s));
        }
    }
    let Reverse(a) = leaves.pop().unwrap();
    let Reverse(b) = leaves.pop().unwrap();
    edges.push((a, b));
    edges
}

/// Orients undirected edges away from `root`; returns the parent array.
fn orient(m: usize, edges: &[(usize, usize)], root: usize) -> Vec<usize> {
    let mut adj = vec![Vec::new(); m];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut parent = vec![usize::MAX; m];
    parent[root] = root;
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        for &w in &adj[u] {
            if parent[w] == usize::MAX {
                parent[w] = u;
                queue.push_back(w);
            }
        }
    }
    parent
}

/// Uniform over the `n^{n-1}` rooted trees on `0..n`: a uniform Prüfer code
/// gives a uniform undirected tree, and the root is drawn independently.
pub fn sample_rooted_tree<R: Rng + ?Sized>(n: usize, rng: &mut R) -> RootedTree {
    assert!(n >= 1, "n must be positive");
    if n == 1 {
        return RootedTree::singleton();
    }
    let seq: Vec<usize> = (0..n - 2).map(|_| rng.random_range(0..n)).collect();
    let edges = prufer_decode(n, &seq);
    let root = rng.random_range(0..n);
    RootedTree::from_parents_unchecked(orient(n, &edges, root), root)
}

/// Uniform over the rooted trees containing `forest`.
///
/// Components are contracted to supernodes. A Prüfer code over components,
/// whose slots each pick a uniform vertex of `0..n` and keep its component,
/// weights a component tree by `∏ f_i^{deg_i - 1}`; the root component is
/// picked with probability `f_r / n`, and each component edge `P -> C` is
/// realised as `(uniform vertex of P, root of C)`. The weights cancel, so
/// every extension has probability `n^{-(n-1-|E|)}`.
pub fn sample_rooted_tree_containing<R: Rng + ?Sized>(
    forest: &RootedForest,
    rng: &mut R,
) -> RootedTree {
    let n = forest.n();
    assert!(n >= 1, "n must be positive");
    let comps = forest.components();
    let m = comps.len();
    let mut members: Vec<Vec<Node>> = vec![Vec::new(); m];
    for v in 0..n {
        members[forest.component_index(v)].push(v);
    }
    let root_comp = forest.component_index(rng.random_range(0..n));
    let mut parent: Vec<Node> = (0..n).map(|v| forest.parent(v).unwrap_or(v)).collect();
    if m > 1 {
        let seq: Vec<usize> = (0..m - 2)
            .map(|_| forest.component_index(rng.random_range(0..n)))
            .collect();
        let comp_parent = orient(m, &prufer_decode(m, &seq), root_comp);
        for c in 0..m {
            if c != root_comp {
                let p = &members[comp_parent[c]];
                parent[comps[c].root] = p[rng.random_range(0..p.len())];
            }
        }
    }
    RootedTree::from_parents_unchecked(parent, comps[root_comp].root)
}

/// Cross-check sampler: draws unconditioned trees until one contains
/// `forest`. Acceptance rate is `n^{-|E|}`, so only use at small sizes.
pub fn sample_rooted_tree_containing_rejection<R: Rng + ?Sized>(
    forest: &RootedForest,
    rng: &mut R,
) -> RootedTree {
    loop {
        let t = sample_rooted_tree(forest.n(), rng);
        if t.contains_forest(forest) {
            return t;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphgen::RngStream;

    #[test]
    fn decode_known_sequence() {
        // Classic example: code [3, 3, 3, 4] on six labels.
        let mut e = prufer_decode(6, &[3, 3, 3, 4]);
        e.iter_mut().for_each(|(a, b)| {
            if a > b {
                std::mem::swap(a, b)
            }
        });
        e.sort();
        assert_eq!(e, vec![(0, 3), (1, 3), (2, 3), (3, 4), (4, 5)]);
    }

    #[test]
    fn sampled_trees_are_valid() {
        let mut rng = RngStream::new(1, 0).rng();
        for n in 1..12 {
            let t = sample_rooted_tree(n, &mut rng);
            RootedTree::from_parents(t.parents().to_vec()).unwrap();
        }
    }

    #[test]
    fn spanning_forest_is_returned_unchanged() {
        let f = RootedForest::from_edges(4, &[(2, 0), (2, 1), (1, 3)]).unwrap();
        let t = sample_rooted_tree_containing(&f, &mut RngStream::new(3, 0).rng());
        assert_eq!(t.parents(), &[2, 2, 2, 1]);
    }

    #[test]
    fn conditioned_output_contains_forest() {
        let f = RootedForest::from_edges(5, &[(0, 1), (2, 3)]).unwrap();
        let mut rng = RngStream::new(9, 0).rng();
        for _ in 0..500 {
            let t = sample_rooted_tree_containing(&f, &mut rng);
            assert!(t.contains_forest(&f));
            RootedTree::from_parents(t.parents().to_vec()).unwrap();
        }
    }
}
