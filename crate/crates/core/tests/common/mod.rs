//! Brute-force oracles shared by the integration tests. Nothing here calls
//! the library's counting or law code.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

pub type Edge = (usize, usize);

/// Every rooted tree on `0..n` as a parent array with `p[root] == root`,
/// by walking all `n^n` parent assignments.
pub fn all_rooted_trees(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p = vec![0usize; n];
    loop {
        let roots: Vec<_> = (0..n).filter(|&v| p[v] == v).collect();
        if roots.len() == 1 && (0..n).all(|v| reaches(&p, v, roots[0])) {
            out.push(p.clone());
        }
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            p[i] += 1;
            if p[i] < n {
                break;
            }
            p[i] = 0;
        }
    }
}

fn reaches(p: &[usize], mut v: usize, root: usize) -> bool {
    for _ in 0..=p.len() {
        if v == root {
            return true;
        }
        v = p[v];
    }
    false
}

pub fn contains(tree: &[usize], forest: &[Edge]) -> bool {
    forest.iter().all(|&(p, c)| tree[c] == p && p != c)
}

/// Forests given as `(parent, child)` edges: distinct children, no cycles.
pub fn is_forest(n: usize, edges: &[Edge]) -> bool {
    let mut parent = vec![usize::MAX; n];
    for &(p, c) in edges {
        if p == c || parent[c] != usize::MAX {
            return false;
        }
        parent[c] = p;
    }
    (0..n).all(|v| {
        let mut u = v;
        for _ in 0..=n {
            if parent[u] == usize::MAX {
                return true;
            }
            u = parent[u];
        }
        false
    })
}

/// Every forest with at most `max_edges` edges.
pub fn all_forests(n: usize, max_edges: usize) -> Vec<Vec<Edge>> {
    let all: Vec<Edge> = (0..n)
        .flat_map(|p| (0..n).map(move |c| (p, c)))
        .filter(|&(p, c)| p != c)
        .collect();
    let mut out = vec![vec![]];
    let mut frontier = vec![(vec![], 0usize)];
    for _ in 0..max_edges {
        let mut next = Vec::new();
        for (edges, from) in frontier {
            for (i, &e) in all.iter().enumerate().skip(from) {
                let mut f: Vec<Edge> = edges.clone();
                f.push(e);
                if is_forest(n, &f) {
                    out.push(f.clone());
                    next.push((f, i + 1));
                }
            }
        }
        frontier = next;
    }
    out
}

/// A random forest: nodes in random order, each attaching to an earlier one
/// with probability `q`.
pub fn random_forest<R: Rng>(n: usize, q: f64, rng: &mut R) -> Vec<Edge> {
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    let mut edges = Vec::new();
    for i in 1..n {
        if rng.random_bool(q) {
            edges.push((order[rng.random_range(0..i)], order[i]));
        }
    }
    edges
}

pub fn ratio(a: u64, b: u64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

fn choose(n: u64, k: u64) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

/// `Binomial(trials, num/den)` as exact probabilities indexed by outcome.
pub fn binomial_law(trials: u64, num: u64, den: u64) -> Vec<BigRational> {
    (0..=trials)
        .map(|j| {
            let top = choose(trials, j)
                * num_traits::pow(BigInt::from(num), j as usize)
                * num_traits::pow(BigInt::from(den - num), (trials - j) as usize);
            BigRational::new(top, num_traits::pow(BigInt::from(den), trials as usize))
        })
        .collect()
}

/// Law of `X + B` for independent `X ~ law`, `B ~ Bernoulli(p)`.
pub fn plus_bernoulli(law: &[BigRational], p: &BigRational) -> Vec<BigRational> {
    let q = BigRational::one() - p;
    let mut out = vec![BigRational::zero(); law.len() + 1];
    for (i, x) in law.iter().enumerate() {
        out[i] += x * &q;
        out[i + 1] += x * p;
    }
    out
}

/// Exact law of the number of newly informed honest nodes in one round,
/// over all trees containing `forest`, equally likely. Byzantine nodes never
/// forward and never count.
pub fn enumerated_delta_law(
    trees: &[Vec<usize>],
    informed: &[bool],
    byzantine: &[bool],
    forest: &[Edge],
) -> Vec<BigRational> {
    let n = informed.len();
    let mut hist = vec![0u64; n + 1];
    let mut total = 0u64;
    for t in trees.iter().filter(|t| contains(t, forest)) {
        let delta = (0..n)
            .filter(|&v| !informed[v] && !byzantine[v] && t[v] != v && informed[t[v]] && !byzantine[t[v]])
            .count();
        hist[delta] += 1;
        total += 1;
    }
    hist.into_iter().map(|h| ratio(h, total)).collect()
}

/// Drops trailing zeros so laws of different supports compare.
pub fn trim(mut law: Vec<BigRational>) -> Vec<BigRational> {
    while law.last().is_some_and(|x| x.is_zero()) {
        law.pop();
    }
    law
}

/// Components of a forest: `(root, nodes)`.
pub fn components(n: usize, forest: &[Edge]) -> Vec<(usize, Vec<usize>)> {
    let mut parent = vec![usize::MAX; n];
    for &(p, c) in forest {
        parent[c] = p;
    }
    let root_of = |mut v: usize| {
        while parent[v] != usize::MAX {
            v = parent[v];
        }
        v
    };
    let mut out: Vec<(usize, Vec<usize>)> = Vec::new();
    for v in 0..n {
        let r = root_of(v);
        match out.iter_mut().find(|(x, _)| *x == r) {
            Some((_, nodes)) => nodes.push(v),
            None => out.push((r, vec![v])),
        }
    }
    out
}

/// Trees among `trees` that contain `forest`.
pub fn extensions<'a>(trees: &'a [Vec<usize>], forest: &[Edge]) -> Vec<&'a Vec<usize>> {
    trees.iter().filter(|t| contains(t, forest)).collect()
}

/// One root-informing case: informed set, non-increasing forest with its
/// extensions `ext`, and chosen uninformed component roots `s`. Returns
/// (enumerated, formula).
pub fn root_informing_case(
    ext: &[&Vec<usize>],
    informed: &[bool],
    forest: &[Edge],
    s: &[usize],
) -> (BigRational, BigRational) {
    let n = informed.len();
    let hits = ext
        .iter()
        .filter(|t| s.iter().all(|&v| t[v] != v && informed[t[v]]))
        .count() as u64;
    let enumerated = ratio(hits, ext.len() as u64);

    let comps = components(n, forest);
    let big_n = informed.iter().filter(|&&b| b).count() as u64;
    let inside: u64 = comps
        .iter()
        .filter(|(r, _)| s.contains(r))
        .map(|(_, nodes)| nodes.iter().filter(|&&v| informed[v]).count() as u64)
        .sum();
    let eta = big_n - inside;
    let x = s.len();
    let formula = BigRational::new(
        BigInt::from(eta) * num_traits::pow(BigInt::from(big_n), x - 1),
        num_traits::pow(BigInt::from(n), x),
    );
    (enumerated, formula)
}

/// Every informed-set mask on `n` nodes that is neither empty nor full.
pub fn informed_sets(n: usize) -> Vec<Vec<bool>> {
    (1..(1u32 << n) - 1)
        .map(|m| (0..n).map(|v| m >> v & 1 == 1).collect())
        .collect()
}

pub fn non_increasing(forest: &[Edge], informed: &[bool]) -> bool {
    forest.iter().all(|&(p, c)| !(informed[p] && !informed[c]))
}

/// All root sets of size 1 or 2 drawn from the uninformed component roots.
pub fn root_choices(n: usize, forest: &[Edge], informed: &[bool]) -> Vec<Vec<usize>> {
    let roots: Vec<usize> = components(n, forest)
        .into_iter()
        .map(|(r, _)| r)
        .filter(|&r| !informed[r])
        .collect();
    let mut out: Vec<Vec<usize>> = roots.iter().map(|&r| vec![r]).collect();
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            out.push(vec![roots[i], roots[j]]);
        }
    }
    out
}
