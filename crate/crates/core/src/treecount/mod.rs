//! Closed-form counts of labeled rooted trees containing a fixed forest, and
//! an exhaustive enumeration oracle to check them against.

mod enumerate;
mod forest;
mod text;

pub use enumerate::{
    count_by_enumeration, enumerate_rooted_trees, enumerate_undirected_trees, for_each_rooted_tree,
    ENUMERATION_CAP,
};
pub use forest::{Component, Node, RootedForest, RootedTree};
pub use text::{parse_forest, parse_tree, write_forest, write_tree};

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{Error, Result};

pub type BigCount = BigUint;

fn pow(n: usize, e: usize) -> BigCount {
    num_traits::pow(BigUint::from(n), e)
}

/// `n^{n-1}` rooted labeled trees on `n` nodes.
pub fn count_rooted_trees(n: usize) -> Result<BigCount> {
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    Ok(pow(n, n - 1))
}

/// Rooted trees containing every directed edge of `forest`: `n^{n-1-|E|}`.
pub fn count_rooted_trees_containing(forest: &RootedForest) -> BigCount {
    let n = forest.n();
    if n == 0 {
        return BigUint::zero();
    }
    pow(n, n - 1 - forest.edge_count())
}

/// Rooted trees containing `forest` whose root is `v`: `f · n^{n-2-|E|}` with
/// `f` the size of `v`'s component. `v` must be a component root.
pub fn count_rooted_trees_containing_rooted_at(forest: &RootedForest, v: Node) -> Result<BigCount> {
    let n = forest.n();
    if v >= n {
        return Err(Error::NodeOutOfRange { node: v, n });
    }
    if !forest.is_component_root(v) {
        return Err(Error::NotComponentRoot(v));
    }
    let f = forest.component_of(v).size;
    // When F is spanning, n - 2 - |E| = -1 and f = n; keep the integer path.
    Ok(BigUint::from(f) * pow(n, n - 1 - forest.edge_count()) / BigUint::from(n))
}

/// Undirected labeled trees containing the undirected shadow of `forest`:
/// `(∏ f_i) · n^{n-2-|E|}` over all components, trivial ones included.
pub fn count_undirected_trees_containing(forest: &RootedForest) -> BigCount {
    let n = forest.n();
    if n == 0 {
        return BigUint::zero();
    }
    let product: BigUint = forest
        .components()
        .iter()
        .map(|c| BigUint::from(c.size))
        .product();
    product * pow(n, n - 1 - forest.edge_count()) / BigUint::from(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(x: u64) -> BigCount {
        BigUint::from(x)
    }

    #[test]
    fn rooted_tree_counts() {
        assert_eq!(count_rooted_trees(1).unwrap(), big(1));
        assert_eq!(count_rooted_trees(3).unwrap(), big(9));
        assert_eq!(count_rooted_trees(6).unwrap(), big(7776));
        assert_eq!(count_rooted_trees(0), Err(Error::EmptyGraph));
        // Past u64 range.
        assert_eq!(count_rooted_trees(20).unwrap(), pow(20, 19));
    }

    #[test]
    fn containing_counts() {
        let path = RootedForest::from_edges(4, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(count_rooted_trees_containing(&path), big(4));
        assert_eq!(count_rooted_trees_containing(&RootedForest::empty(4)), big(64));
        // Root is 0 or 2; the other root picks one of the two nodes above it.
        let two = RootedForest::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(count_rooted_trees_containing(&two), big(4));
    }

    #[test]
    fn rooted_at_counts() {
        let f = RootedForest::from_edges(3, &[(0, 1)]).unwrap();
        assert_eq!(count_rooted_trees_containing_rooted_at(&f, 0).unwrap(), big(2));
        assert_eq!(count_rooted_trees_containing_rooted_at(&f, 2).unwrap(), big(1));
        assert_eq!(
            count_rooted_trees_containing_rooted_at(&f, 1),
            Err(Error::NotComponentRoot(1))
        );
        let e = RootedForest::empty(2);
        assert_eq!(count_rooted_trees_containing_rooted_at(&e, 0).unwrap(), big(1));
        let spanning = RootedForest::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(
            count_rooted_trees_containing_rooted_at(&spanning, 0).unwrap(),
            big(1)
        );
    }

    #[test]
    fn rooted_at_sums_to_total() {
        let f = RootedForest::from_edges(6, &[(0, 1), (1, 2), (4, 3)]).unwrap();
        let sum: BigCount = f
            .components()
            .iter()
            .map(|c| count_rooted_trees_containing_rooted_at(&f, c.root).unwrap())
            .sum();
        assert_eq!(sum, count_rooted_trees_containing(&f));
    }

    #[test]
    fn undirected_counts() {
        let two = RootedForest::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(count_undirected_trees_containing(&two), big(4));
        assert_eq!(count_undirected_trees_containing(&RootedForest::empty(4)), big(16));
        assert_eq!(count_undirected_trees_containing(&RootedForest::empty(1)), big(1));
    }
}
