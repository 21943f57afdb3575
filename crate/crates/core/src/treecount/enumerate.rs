use std::collections::BTreeSet;

use super::forest::{reaches_root, Node, RootedForest, RootedTree};
use crate::error::{Error, Result};

/// Largest `n` accepted by the brute-force enumerators.
pub const ENUMERATION_CAP: usize = 8;

/// Visits every rooted tree on `0..n` (as a parent slice, `p[root] == root`)
/// that contains `forest` and, if given, is rooted at `root`.
///
/// Parent assignments are walked in lexicographic order; forest edges and the
/// requested root pin their slots instead of being filtered afterwards.
pub fn for_each_rooted_tree<F>(
    n: usize,
    forest: Option<&RootedForest>,
    root: Option<Node>,
    mut visit: F,
) -> Result<()>
where
    F: FnMut(&[Node]),
{
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    if n > ENUMERATION_CAP {
        return Err(Error::EnumerationCap {
            n,
            cap: ENUMERATION_CAP,
        });
    }
    if let Some(f) = forest {
        if f.n() != n {
            return Err(Error::InvalidArgument(format!(
                "forest has {} nodes, expected {n}",
                f.n()
            )));
        }
    }
    if let Some(r) = root {
        if r >= n {
            return Err(Error::NodeOutOfRange { node: r, n });
        }
        // A node with a forest parent can never be the root.
        if forest.is_some_and(|f| f.parent(r).is_some()) {
            return Ok(());
        }
    }

    let mut parent = vec![0; n];
    let mut free = Vec::new();
    for v in 0..n {
        match (forest.and_then(|f| f.parent(v)), root) {
            (Some(p), _) => parent[v] = p,
            (None, Some(r)) if r == v => parent[v] = v,
            _ => free.push(v),
        }
    }

    loop {
        let mut roots = 0;
        let mut found = 0;
        for (v, &p) in parent.iter().enumerate() {
            if p == v {
                roots += 1;
                found = v;
            }
        }
        if roots == 1 && reaches_root(&parent, found) {
            visit(&parent);
        }
        // Odometer over the free slots, last slot fastest.
        let mut i = free.len();
        loop {
            if i == 0 {
                return Ok(());
            }
            i -= 1;
            let v = free[i];
            if parent[v] + 1 < n {
                parent[v] += 1;
                break;
            }
            parent[v] = 0;
        }
    }
}

/// All rooted trees on `0..n` containing `forest` and rooted at `root` when
/// those filters are given.
pub fn enumerate_rooted_trees(
    n: usize,
    forest: Option<&RootedForest>,
    root: Option<Node>,
) -> Result<Vec<RootedTree>> {
    let mut out = Vec::new();
    for_each_rooted_tree(n, forest, root, |p| {
        let r = p.iter().enumerate().find(|&(v, &q)| v == q).unwrap().0;
        out.push(RootedTree::from_parents_unchecked(p.to_vec(), r));
    })?;
    Ok(out)
}

/// Number of trees [`enumerate_rooted_trees`] would return.
pub fn count_by_enumeration(
    n: usize,
    forest: Option<&RootedForest>,
    root: Option<Node>,
) -> Result<u64> {
    let mut count = 0u64;
    for_each_rooted_tree(n, forest, root, |_| count += 1)?;
    Ok(count)
}

/// All undirected labeled trees on `0..n`, each as a sorted list of
/// `(min, max)` edges. Every undirected tree has exactly one orientation
/// rooted at node 0, so enumerating those lists each tree once.
pub fn enumerate_undirected_trees(n: usize) -> Result<Vec<Vec<(Node, Node)>>> {
    let mut out = BTreeSet::new();
    for_each_rooted_tree(n, None, Some(0), |p| {
        let mut edges: Vec<_> = p
            .iter()
            .enumerate()
            .skip(1)
            .map(|(c, &q)| (c.min(q), c.max(q)))
            .collect();
        edges.sort_unstable();
        out.insert(edges);
    })?;
    Ok(out.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cardinalities() {
        assert_eq!(enumerate_rooted_trees(1, None, None).unwrap().len(), 1);
        assert_eq!(enumerate_rooted_trees(2, None, None).unwrap().len(), 2);
        assert_eq!(enumerate_rooted_trees(3, None, None).unwrap().len(), 9);
        assert_eq!(count_by_enumeration(6, None, None).unwrap(), 7776);
        assert_eq!(enumerate_undirected_trees(4).unwrap().len(), 16);
    }

    #[test]
    fn filters_apply() {
        let f = RootedForest::from_edges(4, &[(0, 1), (1, 2)]).unwrap();
        let trees = enumerate_rooted_trees(4, Some(&f), None).unwrap();
        assert_eq!(trees.len(), 4);
        assert!(trees.iter().all(|t| t.contains_forest(&f)));
        let f = RootedForest::from_edges(3, &[(0, 1)]).unwrap();
        let rooted = enumerate_rooted_trees(3, Some(&f), Some(0)).unwrap();
        assert_eq!(rooted.len(), 2);
        assert!(rooted.iter().all(|t| t.root() == 0));
        assert_eq!(count_by_enumeration(3, Some(&f), Some(1)).unwrap(), 0);
    }

    #[test]
    fn output_is_lexicographic_and_distinct() {
        let trees = enumerate_rooted_trees(4, None, None).unwrap();
        assert!(trees.windows(2).all(|w| w[0].parents() < w[1].parents()));
    }

    #[test]
    fn cap_enforced() {
        assert!(matches!(
            enumerate_rooted_trees(9, None, None),
            Err(Error::EnumerationCap { n: 9, cap: 8 })
        ));
    }
}
