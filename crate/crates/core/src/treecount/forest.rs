use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Node identifier, `0..n`.
pub type Node = usize;

/// One connected component of a [`RootedForest`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Component {
    pub root: Node,
    pub size: usize,
}

/// Disjoint rooted trees over `0..n`, edges pointing away from each root.
///
/// Isolated nodes are kept as trivial components of size one, so component
/// sizes always sum to `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedForest {
    n: usize,
    parent: Vec<Option<Node>>,
    component: Vec<usize>,
    components: Vec<Component>,
    edge_count: usize,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

impl RootedForest {
    /// The forest with no edges: `n` trivial components.
    pub fn empty(n: usize) -> Self {
        Self::from_parents(vec![None; n]).expect("edgeless forest is valid")
    }

    /// Builds a forest from directed `(parent, child)` edges.
    pub fn from_edges(n: usize, edges: &[(Node, Node)]) -> Result<Self> {
        let mut parent = vec![None; n];
        for &(p, c) in edges {
            for v in [p, c] {
                if v >= n {
                    return Err(Error::NodeOutOfRange { node: v, n });
                }
            }
            if p == c {
                return Err(Error::SelfLoop(c));
            }
            if parent[c].is_some() {
                return Err(Error::MultipleParents(c));
            }
            parent[c] = Some(p);
        }
        Self::from_parents(parent)
    }

    /// Builds a forest from a partial parent map (`None` marks component roots).
    pub fn from_parents(parent: Vec<Option<Node>>) -> Result<Self> {
        let n = parent.len();
        let mut uf = UnionFind::new(n);
        let mut edge_count = 0;
        for (c, p) in parent.iter().enumerate() {
            if let Some(p) = *p {
                if p >= n {
                    return Err(Error::NodeOutOfRange { node: p, n });
                }
                if p == c {
                    return Err(Error::SelfLoop(c));
                }
                if !uf.union(p, c) {
                    return Err(Error::Cycle(c));
                }
                edge_count += 1;
            }
        }
        // With in-degree at most one and no undirected cycle, every component
        // has exactly one node without a parent.
        let mut rep_to_comp = vec![usize::MAX; n];
        let mut components = Vec::new();
        for v in 0..n {
            if parent[v].is_none() {
                let rep = uf.find(v);
                rep_to_comp[rep] = components.len();
                components.push(Component { root: v, size: 0 });
            }
        }
        let mut component = vec![0; n];
        for v in 0..n {
            let c = rep_to_comp[uf.find(v)];
            component[v] = c;
            components[c].size += 1;
        }
        Ok(RootedForest {
            n,
            parent,
            component,
            components,
            edge_count,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn parent(&self, v: Node) -> Option<Node> {
        self.parent[v]
    }

    pub fn parents(&self) -> &[Option<Node>] {
        &self.parent
    }

    /// Components ordered by root id.
    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn component_index(&self, v: Node) -> usize {
        self.component[v]
    }

    pub fn component_of(&self, v: Node) -> Component {
        self.components[self.component[v]]
    }

    pub fn is_component_root(&self, v: Node) -> bool {
        v < self.n && self.parent[v].is_none()
    }

    /// Directed `(parent, child)` edges ordered by child.
    pub fn edges(&self) -> impl Iterator<Item = (Node, Node)> + '_ {
        self.parent
            .iter()
            .enumerate()
            .filter_map(|(c, p)| p.map(|p| (p, c)))
    }

    pub fn contains_edge(&self, parent: Node, child: Node) -> bool {
        child < self.n && self.parent[child] == Some(parent)
    }

    /// Nodes of the component containing `v`, in breadth-first order from
    /// its root (children visited by increasing id).
    pub fn component_nodes(&self, v: Node) -> Vec<Node> {
        let children = self.children();
        let root = self.component_of(v).root;
        let mut order = vec![root];
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &c in &children[u] {
                order.push(c);
                queue.push_back(c);
            }
        }
        order
    }

    pub fn children(&self) -> Vec<Vec<Node>> {
        let mut children = vec![Vec::new(); self.n];
        for (p, c) in self.edges() {
            children[p].push(c);
        }
        children
    }
}

/// A directed rooted tree on `0..n`; `parent(root) == root`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootedTree {
    parent: Vec<Node>,
    root: Node,
}

impl RootedTree {
    /// Validates a total parent map: exactly one fixed point, and every node
    /// reaches it within `n - 1` steps.
    pub fn from_parents(parent: Vec<Node>) -> Result<Self> {
        let n = parent.len();
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut root = None;
        let mut roots = 0;
        for (v, &p) in parent.iter().enumerate() {
            if p >= n {
                return Err(Error::NodeOutOfRange { node: p, n });
            }
            if p == v {
                roots += 1;
                root = Some(v);
            }
        }
        if roots != 1 {
            return Err(Error::RootCount(roots));
        }
        let root = root.unwrap();
        if !reaches_root(&parent, root) {
            let bad = (0..n)
                .find(|&v| {
                    let mut u = v;
                    for _ in 0..n {
                        u = parent[u];
                    }
                    u != root
                })
                .unwrap_or(root);
            return Err(Error::Cycle(bad));
        }
        Ok(RootedTree { parent, root })
    }

    /// The single-node tree.
    pub fn singleton() -> Self {
        RootedTree {
            parent: vec![0],
            root: 0,
        }
    }

    pub(crate) fn from_parents_unchecked(parent: Vec<Node>, root: Node) -> Self {
        debug_assert!(reaches_root(&parent, root));
        RootedTree { parent, root }
    }

    pub fn n(&self) -> usize {
        self.parent.len()
    }

    pub fn root(&self) -> Node {
        self.root
    }

    pub fn parent(&self, v: Node) -> Node {
        self.parent[v]
    }

    pub fn parents(&self) -> &[Node] {
        &self.parent
    }

    /// Directed `(parent, child)` edges ordered by child.
    pub fn edges(&self) -> impl Iterator<Item = (Node, Node)> + '_ {
        self.parent
            .iter()
            .enumerate()
            .filter(move |&(c, _)| c != self.root)
            .map(|(c, &p)| (p, c))
    }

    pub fn children(&self) -> Vec<Vec<Node>> {
        let mut children = vec![Vec::new(); self.n()];
        for (p, c) in self.edges() {
            children[p].push(c);
        }
        children
    }

    pub fn contains_edge(&self, parent: Node, child: Node) -> bool {
        child != self.root && self.parent[child] == parent
    }

    /// Directed containment of every forest edge.
    pub fn contains_forest(&self, forest: &RootedForest) -> bool {
        forest.n() == self.n() && forest.edges().all(|(p, c)| self.contains_edge(p, c))
    }

    /// Longest root-to-node path, in edges.
    pub fn height(&self) -> usize {
        (0..self.n())
            .map(|v| {
                let mut d = 0;
                let mut u = v;
                while u != self.root {
                    u = self.parent[u];
                    d += 1;
                }
                d
            })
            .max()
            .unwrap_or(0)
    }

    /// Breadth-first order from the root, children by increasing id.
    pub fn bfs_order(&self) -> Vec<Node> {
        let children = self.children();
        let mut order = Vec::with_capacity(self.n());
        let mut queue = VecDeque::from([self.root]);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            queue.extend(children[u].iter().copied());
        }
        order
    }

    pub fn into_parents(self) -> Vec<Node> {
        self.parent
    }
}

/// Pointer-chasing check: every node hits `root` within `n` steps.
pub(super) fn reaches_root(parent: &[Node], root: Node) -> bool {
    let n = parent.len();
    // 0 = unknown, 1 = reaches root
    let mut state = vec![0u8; n];
    state[root] = 1;
    let mut path = Vec::with_capacity(n);
    for start in 0..n {
        if state[start] == 1 {
            continue;
        }
        path.clear();
        let mut u = start;
        let mut steps = 0;
        while state[u] != 1 {
            if steps > n {
                return false;
            }
            path.push(u);
            u = parent[u];
            steps += 1;
        }
        for &w in &path {
            state[w] = 1;
        }
    }
    true
}
