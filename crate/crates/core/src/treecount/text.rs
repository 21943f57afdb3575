//! Line format shared by forests and trees:
//!
//! ```text
//! n=4 root=0
//! 1<-0
//! 2<-1
//! ```
//!
//! `root=-` marks a forest. Blank lines and `#` comments are ignored.

use std::fmt::Write;

use super::forest::{Node, RootedForest, RootedTree};
use crate::error::{Error, Result};

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

struct Parsed {
    n: usize,
    root: Option<Node>,
    edges: Vec<(Node, Node)>,
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

fn parse(text: &str) -> Result<Parsed> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
    let mut n = None;
    let mut root = None;
    for field in header.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| parse_err(hline, format!("expected key=value, got `{field}`")))?;
        match key {
            "n" => {
                n = Some(
                    value
                        .parse::<usize>()
                        .map_err(|e| parse_err(hline, format!("n: {e}")))?,
                )
            }
            "root" if value == "-" => root = Some(None),
            "root" => {
                root = Some(Some(
                    value
                        .parse::<Node>()
                        .map_err(|e| parse_err(hline, format!("root: {e}")))?,
                ))
            }
            _ => return Err(parse_err(hline, format!("unknown header key `{key}`"))),
        }
    }
    let n = n.ok_or_else(|| parse_err(hline, "header lacks n"))?;
    let root = root.ok_or_else(|| parse_err(hline, "header lacks root"))?;
    let mut edges = Vec::new();
    for (i, line) in lines {
        let (c, p) = line
            .split_once("<-")
            .ok_or_else(|| parse_err(i, format!("expected child<-parent, got `{line}`")))?;
        let c = c.trim().parse().map_err(|e| parse_err(i, format!("child: {e}")))?;
        let p = p.trim().parse().map_err(|e| parse_err(i, format!("parent: {e}")))?;
        edges.push((p, c));
    }
    Ok(Parsed { n, root, edges })
}

pub fn parse_forest(text: &str) -> Result<RootedForest> {
    let parsed = parse(text)?;
    let forest = RootedForest::from_edges(parsed.n, &parsed.edges)?;
    if let Some(r) = parsed.root {
        if forest.components().len() != 1 || !forest.is_component_root(r) {
            return Err(Error::NotComponentRoot(r));
        }
    }
    Ok(forest)
}

pub fn parse_tree(text: &str) -> Result<RootedTree> {
    let parsed = parse(text)?;
    let root = parsed
        .root
        .ok_or_else(|| parse_err(1, "a tree needs a numeric root"))?;
    if root >= parsed.n {
        return Err(Error::NodeOutOfRange {
            node: root,
            n: parsed.n,
        });
    }
    let forest = RootedForest::from_edges(parsed.n, &parsed.edges)?;
    if forest.components().len() != 1 {
        return Err(Error::RootCount(forest.components().len()));
    }
    if !forest.is_component_root(root) {
        return Err(Error::NotComponentRoot(root));
    }
    let parents = forest.parents().iter().map(|p| p.unwrap_or(root)).collect();
    RootedTree::from_parents(parents)
}

pub fn write_forest(forest: &RootedForest) -> String {
    let mut s = format!("n={} root=-\n", forest.n());
    for (p, c) in forest.edges() {
        writeln!(s, "{c}<-{p}").unwrap();
    }
    s
}

pub fn write_tree(tree: &RootedTree) -> String {
    let mut s = format!("n={} root={}\n", tree.n(), tree.root());
    for (p, c) in tree.edges() {
        writeln!(s, "{c}<-{p}").unwrap();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_round_trip() {
        let t = RootedTree::from_parents(vec![2, 2, 2, 0]).unwrap();
        let s = write_tree(&t);
        assert_eq!(s, "n=4 root=2\n0<-2\n1<-2\n3<-0\n");
        assert_eq!(parse_tree(&s).unwrap(), t);
    }

    #[test]
    fn forest_round_trip_with_comments() {
        let text = "# two components\nn=5 root=-\n\n1<-0\n3<-4  # tail\n";
        let f = parse_forest(text).unwrap();
        assert_eq!(f.edge_count(), 2);
        assert_eq!(parse_forest(&write_forest(&f)).unwrap(), f);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(parse_tree(""), Err(Error::Parse { .. })));
        assert!(matches!(
            parse_tree("n=3 root=0\n1<-0\n"),
            Err(Error::RootCount(2))
        ));
        assert!(matches!(
            parse_forest("n=3 root=-\n1-0\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_tree("n=2 root=1\n1<-0\n"),
            Err(Error::NotComponentRoot(1))
        ));
    }
}
