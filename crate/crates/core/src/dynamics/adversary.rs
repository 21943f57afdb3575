use std::collections::{BTreeMap, VecDeque};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graphgen::DirectedEdgeSet;
use crate::treecount::{Node, RootedForest};

/// An oblivious tree adversary: before the round's randomness is drawn it
/// picks a rooted forest that the round's tree must contain.
pub trait TreeAdversary: Send + Sync {
    fn name(&self) -> String;

    /// Forest for `round` (1-based), given the informed set after the
    /// previous round.
    fn forest(&self, round: usize, informed: &[bool]) -> RootedForest;
}

/// An oblivious Erdős–Rényi adversary: picks `k` edges, none of them from an
/// informed to an uninformed node.
pub trait ErAdversary: Send + Sync {
    fn name(&self) -> String;

    fn edges(&self, round: usize, informed: &[bool], k: usize) -> DirectedEdgeSet;
}

/// Wraps a closure as a [`TreeAdversary`].
pub struct FnTreeAdversary<F> {
    name: String,
    rule: F,
}

impl<F> FnTreeAdversary<F>
where
    F: Fn(usize, &[bool]) -> RootedForest + Send + Sync,
{
    pub fn new(name: impl Into<String>, rule: F) -> Self {
        FnTreeAdversary {
            name: name.into(),
            rule,
        }
    }
}

impl<F> TreeAdversary for FnTreeAdversary<F>
where
    F: Fn(usize, &[bool]) -> RootedForest + Send + Sync,
{
    fn name(&self) -> String {
        self.name.clone()
    }

    fn forest(&self, round: usize, informed: &[bool]) -> RootedForest {
        (self.rule)(round, informed)
    }
}

/// The η-minimising adversary: one directed path on `k + 1` nodes.
#[derive(Debug, Clone, Copy)]
pub struct OptimalTree {
    pub k: usize,
}

impl TreeAdversary for OptimalTree {
    fn name(&self) -> String {
        "optimal".into()
    }

    fn forest(&self, _round: usize, informed: &[bool]) -> RootedForest {
        optimal_tree_forest(informed, self.k)
    }
}

/// Path whose first `min(k + 1, #uninformed)` nodes are the lowest-id
/// uninformed nodes (the root is the smallest), followed by the lowest-id
/// informed nodes. No edge leaves an informed node towards an uninformed one.
pub fn optimal_tree_forest(informed: &[bool], k: usize) -> RootedForest {
    let n = informed.len();
    let path: Vec<Node> = (0..n)
        .filter(|&v| !informed[v])
        .chain((0..n).filter(|&v| informed[v]))
        .take(if k == 0 { 0 } else { k + 1 })
        .collect();
    let edges: Vec<_> = path.windows(2).map(|w| (w[0], w[1])).collect();
    RootedForest::from_edges(n, &edges).expect("a path is a rooted forest")
}

/// `(σ, η)` of the optimal adversary tree: uninformed and informed nodes in it.
pub fn optimal_sigma_eta(n: usize, count: usize, k: usize) -> (usize, usize) {
    if k == 0 {
        return (0, 0);
    }
    let sigma = (k + 1).min(n - count);
    (sigma, k + 1 - sigma)
}

/// Default Erdős–Rényi adversary: the first `k` edges in `(u, v)` order that
/// do not go from an informed node to an uninformed one.
#[derive(Debug, Clone, Copy, Default)]
pub struct FirstNonIncreasing;

impl ErAdversary for FirstNonIncreasing {
    fn name(&self) -> String {
        "first-non-increasing".into()
    }

    fn edges(&self, _round: usize, informed: &[bool], k: usize) -> DirectedEdgeSet {
        let n = informed.len();
        let edges: Vec<_> = (0..n)
            .flat_map(|u| (0..n).map(move |v| (u, v)))
            .filter(|&(u, v)| !(informed[u] && !informed[v]))
            .take(k)
            .collect();
        DirectedEdgeSet::new(n, edges).expect("edges are distinct and in range")
    }
}

/// Strategy choice for a run.
#[derive(Clone, Default)]
pub enum Strategy {
    /// No adversary edges.
    #[default]
    Oblivious,
    /// [`OptimalTree`] with the spec's `k` (eligible for fast-forward).
    OptimalTree,
    Tree(Arc<dyn TreeAdversary>),
    Er(Arc<dyn ErAdversary>),
}

impl Strategy {
    pub fn name(&self) -> String {
        match self {
            Strategy::Oblivious => "oblivious".into(),
            Strategy::OptimalTree => "optimal".into(),
            Strategy::Tree(a) => a.name(),
            Strategy::Er(a) => a.name(),
        }
    }
}

impl std::fmt::Debug for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Strategy({})", self.name())
    }
}

/// A rooted tree over a subset of `0..n`: the adversary's building block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fragment {
    root: Node,
    // child -> parent
    parent: BTreeMap<Node, Node>,
}

impl Fragment {
    /// Validates that `edges` (parent, child) form a tree rooted at `root`.
    pub fn new(root: Node, edges: &[(Node, Node)]) -> Result<Self> {
        let mut parent = BTreeMap::new();
        for &(p, c) in edges {
            if p == c {
                return Err(Error::SelfLoop(c));
            }
            if c == root {
                return Err(Error::Cycle(c));
            }
            if parent.insert(c, p).is_some() {
                return Err(Error::MultipleParents(c));
            }
        }
        let frag = Fragment { root, parent };
        for &c in frag.parent.keys() {
            let mut u = c;
            let mut steps = 0;
            while u != root {
                u = *frag
                    .parent
                    .get(&u)
                    .ok_or(Error::InvalidArgument(format!("node {u} not connected to root {root}")))?;
                steps += 1;
                if steps > frag.parent.len() {
                    return Err(Error::Cycle(c));
                }
            }
        }
        Ok(frag)
    }

    /// The component of `forest` containing `v`.
    pub fn from_forest(forest: &RootedForest, v: Node) -> Self {
        let nodes = forest.component_nodes(v);
        let parent = nodes[1..]
            .iter()
            .map(|&c| (c, forest.parent(c).unwrap()))
            .collect();
        Fragment {
            root: nodes[0],
            parent,
        }
    }

    pub fn root(&self) -> Node {
        self.root
    }

    pub fn len(&self) -> usize {
        self.parent.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_trivial(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn parent(&self, v: Node) -> Option<Node> {
        self.parent.get(&v).copied()
    }

    pub fn nodes(&self) -> Vec<Node> {
        let mut v: Vec<_> = self.parent.keys().copied().collect();
        v.push(self.root);
        v.sort_unstable();
        v
    }

    /// `(parent, child)` edges ordered by child.
    pub fn edges(&self) -> Vec<(Node, Node)> {
        self.parent.iter().map(|(&c, &p)| (p, c)).collect()
    }

    pub fn children(&self, v: Node) -> Vec<Node> {
        self.parent
            .iter()
            .filter(|&(_, &p)| p == v)
            .map(|(&c, _)| c)
            .collect()
    }

    /// Breadth-first order from the root, children by increasing id.
    pub fn bfs_order(&self) -> Vec<Node> {
        let mut order = Vec::with_capacity(self.len());
        let mut queue = VecDeque::from([self.root]);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            queue.extend(self.children(u));
        }
        order
    }

    /// Some edge goes from an informed node to an uninformed one.
    pub fn is_increasing(&self, informed: &[bool]) -> bool {
        self.parent.iter().any(|(&c, &p)| informed[p] && !informed[c])
    }

    pub fn informed_count(&self, informed: &[bool]) -> usize {
        self.nodes().into_iter().filter(|&v| informed[v]).count()
    }

    /// Forest on `0..n` whose only non-trivial components are `frags`.
    pub fn to_forest(n: usize, frags: &[&Fragment]) -> Result<RootedForest> {
        let edges: Vec<_> = frags.iter().flat_map(|f| f.edges()).collect();
        RootedForest::from_edges(n, &edges)
    }
}

/// Relabels an information-increasing fragment into an isomorphic
/// non-increasing one over the same nodes.
///
/// With `ρ` the BFS order of `u` and `π` listing first an uninformed node
/// `s` whose parent is informed, then the remaining uninformed nodes, then
/// the informed ones (each group in BFS order), node `ρ_i` is renamed `π_i`.
/// Parents precede children in BFS order, so no edge of the result goes from
/// informed to uninformed, and `s` becomes the root.
pub fn correct_tree(u: &Fragment, informed: &[bool]) -> Result<Fragment> {
    if !u.is_increasing(informed) {
        return Err(Error::AlreadyNonIncreasing);
    }
    let rho = u.bfs_order();
    let s = *rho
        .iter()
        .find(|&&v| !informed[v] && u.parent(v).is_some_and(|p| informed[p]))
        .expect("an increasing tree has an informed-to-uninformed edge");
    let pi: Vec<Node> = std::iter::once(s)
        .chain(rho.iter().copied().filter(|&v| !informed[v] && v != s))
        .chain(rho.iter().copied().filter(|&v| informed[v]))
        .collect();
    let b: BTreeMap<Node, Node> = rho.iter().copied().zip(pi.iter().copied()).collect();
    let edges: Vec<_> = u.edges().into_iter().map(|(p, c)| (b[&p], b[&c])).collect();
    Fragment::new(b[&u.root], &edges)
}

/// Result of [`merge_trees`]: the merged fragment and the root that was
/// stripped of its children (now a trivial component).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeResult {
    pub tree: Fragment,
    pub detached: Node,
}

/// Merges two disjoint non-trivial fragments with roots `r`, `r'`.
///
/// If `r` is informed its children move under `r'`; otherwise the children
/// of `r'` move under `r`. Edge count is unchanged.
pub fn merge_trees(u: &Fragment, u2: &Fragment, informed: &[bool]) -> Result<MergeResult> {
    if u.is_trivial() || u2.is_trivial() {
        return Err(Error::InvalidMerge);
    }
    let a = u.nodes();
    if u2.nodes().iter().any(|v| a.binary_search(v).is_ok()) {
        return Err(Error::InvalidMerge);
    }
    let (keep, give, new_root) = if informed[u.root] {
        (u2, u, u2.root)
    } else {
        (u, u2, u.root)
    };
    let mut edges = keep.edges();
    for (p, c) in give.edges() {
        edges.push((if p == give.root { new_root } else { p }, c));
    }
    Ok(MergeResult {
        tree: Fragment::new(new_root, &edges)?,
        detached: give.root,
    })
}
