//! Undirected graphs over `p` labelled vertices.
//!
//! Vertices are 0-based inside the library; the CLI formats shift to 1-based.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// Unordered edge stored canonically as `(i, j)` with `i < j`.
pub type Edge = (usize, usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    p: usize,
    edges: BTreeSet<Edge>,
    names: Option<Vec<String>>,
}

/// Edges of `b` missing from `a`, and edges of `a` absent from `b`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GraphDiff {
    pub missing: BTreeSet<Edge>,
    pub extra: BTreeSet<Edge>,
}

impl GraphDiff {
    pub fn is_empty(&self) -> bool {
        self.missing.is_empty() && self.extra.is_empty()
    }
}

impl Graph {
    pub fn empty(p: usize) -> Self {
        Self {
            p,
            edges: BTreeSet::new(),
            names: None,
        }
    }

    pub fn complete(p: usize) -> Self {
        let mut g = Self::empty(p);
        for i in 0..p {
            for j in i + 1..p {
                g.edges.insert((i, j));
            }
        }
        g
    }

    pub fn from_edges(p: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let mut g = Self::empty(p);
        for (i, j) in edges {
            g.add_edge(i, j)?;
        }
        Ok(g)
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.p {
            return Err(Error::NameCount {
                expected: self.p,
                found: names.len(),
            });
        }
        self.names = Some(names);
        Ok(self)
    }

    /// Inserts `{i, j}`; returns whether it was new.
    pub fn add_edge(&mut self, i: usize, j: usize) -> Result<bool> {
        if i == j || i >= self.p || j >= self.p {
            return Err(Error::InvalidPair(i, j));
        }
        Ok(self.edges.insert((i.min(j), i.max(j))))
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i.min(j), i.max(j)))
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    /// Vertex label, falling back to `X{i+1}`.
    pub fn label(&self, i: usize) -> String {
        match &self.names {
            Some(names) => names[i].clone(),
            None => format!("X{}", i + 1),
        }
    }

    pub fn is_subgraph_of(&self, other: &Graph) -> bool {
        self.p == other.p && self.edges.is_subset(&other.edges)
    }
}

/// Whether `a` and `b` have identical edge sets. Labels are ignored.
pub fn graph_equal(a: &Graph, b: &Graph) -> Result<bool> {
    if a.p != b.p {
        return Err(Error::DimensionMismatch(a.p, b.p));
    }
    Ok(a.edges == b.edges)
}

/// Difference of `a` relative to `b`: `missing = b \ a`, `extra = a \ b`.
pub fn graph_diff(a: &Graph, b: &Graph) -> Result<GraphDiff> {
    if a.p != b.p {
        return Err(Error::DimensionMismatch(a.p, b.p));
    }
    Ok(GraphDiff {
        missing: b.edges.difference(&a.edges).copied().collect(),
        extra: a.edges.difference(&b.edges).copied().collect(),
    })
}
