use std::collections::HashMap;
use std::fmt::Write;

use rand::Rng;

use crate::error::{Error, Result};
use crate::treecount::Node;

pub type Edge = (Node, Node);

/// A set of directed edges on `0..n`, self-loops allowed. Stored sorted.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DirectedEdgeSet {
    n: usize,
    edges: Vec<Edge>,
}

impl DirectedEdgeSet {
    pub fn new(n: usize, mut edges: Vec<Edge>) -> Result<Self> {
        for &(u, v) in &edges {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::NodeOutOfRange { node: x, n });
                }
            }
        }
        edges.sort_unstable();
        if edges.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("duplicate edge".into()));
        }
        Ok(DirectedEdgeSet { n, edges })
    }

    pub fn empty(n: usize) -> Self {
        DirectedEdgeSet { n, edges: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn contains(&self, e: Edge) -> bool {
        self.edges.binary_search(&e).is_ok()
    }

    /// `n=<n> m=<m>` followed by one `u->v` per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("n={} m={}\n", self.n, self.len());
        for (u, v) in &self.edges {
            writeln!(s, "{u}->{v}").unwrap();
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let perr = |line, msg: String| Error::Parse { line, msg };
        let mut lines = text.lines().enumerate().filter_map(|(i, l)| {
            let l = l.split('#').next().unwrap_or("").trim();
            (!l.is_empty()).then_some((i + 1, l))
        });
        let (hl, header) = lines
            .next()
            .ok_or_else(|| perr(1, "missing header".into()))?;
        let (mut n, mut m) = (None, None);
        for field in header.split_whitespace() {
            match field.split_once('=') {
                Some(("n", v)) => n = v.parse::<usize>().ok(),
                Some(("m", v)) => m = v.parse::<usize>().ok(),
                _ => return Err(perr(hl, format!("unexpected header field `{field}`"))),
            }
        }
        let n = n.ok_or_else(|| perr(hl, "header lacks a valid n".into()))?;
        let mut edges = Vec::new();
        for (i, line) in lines {
            let (u, v) = line
                .split_once("->")
                .ok_or_else(|| perr(i, format!("expected u->v, got `{line}`")))?;
            let u = u.trim().parse().map_err(|e| perr(i, format!("{e}")))?;
            let v = v.trim().parse().map_err(|e| perr(i, format!("{e}")))?;
            edges.push((u, v));
        }
        if let Some(m) = m {
            if m != edges.len() {
                return Err(perr(hl, format!("header says m={m}, found {}", edges.len())));
            }
        }
        DirectedEdgeSet::new(n, edges)
    }
}

/// The `n²` possible directed edges minus an excluded set, indexed implicitly
/// so that nothing of size `n²` is ever materialised.
#[derive(Debug, Clone)]
pub struct EdgePool {
    n: usize,
    // Sorted ids `u * n + v` that are not in the pool.
    excluded: Vec<u64>,
}

impl EdgePool {
    pub fn new(n: usize, self_loops: bool) -> Self {
        let excluded = if self_loops {
            Vec::new()
        } else {
            (0..n as u64).map(|v| v * n as u64 + v).collect()
        };
        EdgePool { n, excluded }
    }

    pub fn without<'a>(mut self, edges: impl IntoIterator<Item = &'a Edge>) -> Self {
        let n = self.n as u64;
        self.excluded
            .extend(edges.into_iter().map(|&(u, v)| u as u64 * n + v as u64));
        self.excluded.sort_unstable();
        self.excluded.dedup();
        self
    }

    pub fn size(&self) -> u64 {
        (self.n as u64).pow(2) - self.excluded.len() as u64
    }

    pub fn contains(&self, (u, v): Edge) -> bool {
        u < self.n && v < self.n && self.excluded.binary_search(&self.id(u, v)).is_err()
    }

    fn id(&self, u: Node, v: Node) -> u64 {
        u as u64 * self.n as u64 + v as u64
    }

    /// The `idx`-th pool edge in `(u, v)` order.
    pub fn edge_at(&self, idx: u64) -> Edge {
        debug_assert!(idx < self.size());
        // excluded[j] - j is non-decreasing; skip every exclusion at or
        // below the target slot.
        let (mut lo, mut hi) = (0, self.excluded.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.excluded[mid] - mid as u64 <= idx {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        let id = idx + lo as u64;
        ((id / self.n as u64) as Node, (id % self.n as u64) as Node)
    }

    /// `count` distinct edges, uniformly without replacement, in draw order.
    pub fn sample_distinct<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Result<Vec<Edge>> {
        let size = self.size();
        if count as u64 > size {
            return Err(Error::InvalidPool(format!(
                "cannot draw {count} distinct edges from a pool of {size}"
            )));
        }
        // Sparse partial Fisher–Yates over 0..size.
        let mut swapped: HashMap<u64, u64> = HashMap::with_capacity(2 * count);
        let mut out = Vec::with_capacity(count);
        for i in 0..count as u64 {
            let j = rng.random_range(i..size);
            let at_j = *swapped.get(&j).unwrap_or(&j);
            let at_i = *swapped.get(&i).unwrap_or(&i);
            swapped.insert(j, at_i);
            out.push(self.edge_at(at_j));
        }
        Ok(out)
    }

    /// `count` i.i.d. uniform pool edges.
    pub fn sample_with_replacement<R: Rng + ?Sized>(
        &self,
        count: usize,
        rng: &mut R,
    ) -> Result<Vec<Edge>> {
        let size = self.size();
        if size == 0 && count > 0 {
            return Err(Error::InvalidPool("pool is empty".into()));
        }
        Ok((0..count)
            .map(|_| self.edge_at(rng.random_range(0..size)))
            .collect())
    }

    /// One uniform pool edge.
    pub fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> Edge {
        self.edge_at(rng.random_range(0..self.size()))
    }
}

fn check_n(set: Option<&DirectedEdgeSet>, n: usize) -> Result<()> {
    match set {
        Some(s) if s.n() != n => Err(Error::InvalidPool(format!(
            "edge set on {} nodes, expected {n}",
            s.n()
        ))),
        _ => Ok(()),
    }
}

/// `forced` plus `m - |forced|` edges drawn uniformly without replacement from
/// the `n²` possible edges (self-loops included) minus `forced` and `removed`.
pub fn sample_directed_er<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    forced: Option<&DirectedEdgeSet>,
    removed: Option<&DirectedEdgeSet>,
    rng: &mut R,
) -> Result<DirectedEdgeSet> {
    sample_directed_er_in(EdgePool::new(n, true), m, forced, removed, rng)
}

/// As [`sample_directed_er`], starting from an arbitrary base pool (for
/// example one without self-loops).
pub fn sample_directed_er_in<R: Rng + ?Sized>(
    base: EdgePool,
    m: usize,
    forced: Option<&DirectedEdgeSet>,
    removed: Option<&DirectedEdgeSet>,
    rng: &mut R,
) -> Result<DirectedEdgeSet> {
    let n = base.n;
    check_n(forced, n)?;
    check_n(removed, n)?;
    let forced_edges = forced.map(|f| f.edges()).unwrap_or(&[]);
    let removed_edges = removed.map(|r| r.edges()).unwrap_or(&[]);
    if let Some(r) = removed {
        if forced_edges.iter().any(|&e| r.contains(e)) {
            return Err(Error::InvalidPool("forced and removed edges overlap".into()));
        }
    }
    if forced_edges.len() > m {
        return Err(Error::InvalidPool(format!(
            "{} forced edges exceed m = {m}",
            forced_edges.len()
        )));
    }
    let pool = base.without(forced_edges).without(removed_edges);
    let mut edges = pool.sample_distinct(m - forced_edges.len(), rng)?;
    edges.extend_from_slice(forced_edges);
    DirectedEdgeSet::new(n, edges)
}

/// `count` i.i.d. uniform draws from the `n²` edges minus `removed`.
pub fn sample_er_with_replacement<R: Rng + ?Sized>(
    n: usize,
    count: usize,
    removed: Option<&DirectedEdgeSet>,
    rng: &mut R,
) -> Result<Vec<Edge>> {
    check_n(removed, n)?;
    let pool = EdgePool::new(n, true).without(removed.map(|r| r.edges()).unwrap_or(&[]));
    pool.sample_with_replacement(count, rng)
}
