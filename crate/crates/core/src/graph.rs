//! Plain undirected simple graphs, monomorphism search and triangle analysis.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// An undirected edge stored with the smaller endpoint first.
pub type Edge = (usize, usize);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("edge ({0}, {1}) has an endpoint outside 0..{2}")]
    OutOfRange(usize, usize, usize),
    #[error("edge ({0}, {1}) listed twice")]
    ParallelEdge(usize, usize),
    #[error("order is not a permutation of 0..{0}")]
    BadOrder(usize),
}

/// Normalises an unordered pair.
#[inline]
pub fn edge(u: usize, v: usize) -> Edge {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

/// Undirected simple graph on vertices `0..n` with an optional total order.
///
/// `order` lists the vertices from smallest to largest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphJson", into = "GraphJson")]
pub struct Graph {
    n: usize,
    edges: BTreeSet<Edge>,
    adj: Vec<BTreeSet<usize>>,
    order: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    order: Option<Vec<usize>>,
}

impl TryFrom<GraphJson> for Graph {
    type Error = GraphError;

    fn try_from(j: GraphJson) -> Result<Self, Self::Error> {
        let mut seen = BTreeSet::new();
        for &[u, v] in &j.edges {
            if !seen.insert(edge(u, v)) {
                return Err(GraphError::ParallelEdge(u.min(v), u.max(v)));
            }
        }
        let mut g = Graph::new(j.n, j.edges.iter().map(|&[u, v]| (u, v)))?;
        if let Some(order) = j.order {
            g.set_order(order)?;
        }
        Ok(g)
    }
}

impl From<Graph> for GraphJson {
    fn from(g: Graph) -> Self {
        GraphJson {
            n: g.n,
            edges: g.edges.iter().map(|&(u, v)| [u, v]).collect(),
            order: g.order,
        }
    }
}

impl Graph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self, GraphError> {
        let mut g = Graph::empty(n);
        for (u, v) in edges {
            g.try_add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            edges: BTreeSet::new(),
            adj: vec![BTreeSet::new(); n],
            order: None,
        }
    }

    /// Complete graph on `k` vertices.
    pub fn complete(k: usize) -> Self {
        let mut g = Graph::empty(k);
        for u in 0..k {
            for v in u + 1..k {
                g.add_edge(u, v);
            }
        }
        g
    }

    /// The bowtie: triangles 0-1-2 and 0-3-4 sharing vertex 0.
    pub fn bowtie() -> Self {
        Graph::new(5, [(0, 1), (0, 2), (1, 2), (0, 3), (0, 4), (3, 4)]).unwrap()
    }

    /// Chimney C_k: centre edge 0-1 and apexes 2..k+2.
    pub fn chimney(k: usize) -> Self {
        let mut g = Graph::empty(k + 2);
        g.add_edge(0, 1);
        for a in 2..k + 2 {
            g.add_edge(0, a);
            g.add_edge(1, a);
        }
        g
    }

    /// Disjoint union, `other` renumbered after `self`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let mut g = self.clone();
        g.order = None;
        let base = g.add_vertices(other.n);
        for &(u, v) in &other.edges {
            g.add_edge(base + u, base + v);
        }
        g
    }

    pub fn try_add_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if u >= self.n || v >= self.n {
            return Err(GraphError::OutOfRange(u, v, self.n));
        }
        self.add_edge(u, v);
        Ok(())
    }

    /// Adds an edge; panics on self-loops or out-of-range endpoints.
    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u != v && u < self.n && v < self.n, "invalid edge ({u}, {v})");
        self.edges.insert(edge(u, v));
        self.adj[u].insert(v);
        self.adj[v].insert(u);
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        self.edges.remove(&edge(u, v));
        self.adj[u].remove(&v);
        self.adj[v].remove(&u);
    }

    /// Appends `k` isolated vertices and returns the index of the first one.
    /// Any stored order is dropped.
    pub fn add_vertices(&mut self, k: usize) -> usize {
        let first = self.n;
        self.n += k;
        self.adj.resize(self.n, BTreeSet::new());
        self.order = None;
        first
    }

    pub fn set_order(&mut self, order: Vec<usize>) -> Result<(), GraphError> {
        if !is_permutation(&order, self.n) {
            return Err(GraphError::BadOrder(self.n));
        }
        self.order = Some(order);
        Ok(())
    }

    pub fn clear_order(&mut self) {
        self.order = None;
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn order(&self) -> Option<&[usize]> {
        self.order.as_deref()
    }

    pub fn neighbours(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[v].iter().copied()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(&v)
    }

    /// Subgraph induced on `vertices`, renumbered in the given sequence.
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let mut g = Graph::empty(vertices.len());
        for (i, &u) in vertices.iter().enumerate() {
            for (j, &v) in vertices.iter().enumerate().skip(i + 1) {
                if self.has_edge(u, v) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    /// Relabels vertex `v` as `perm[v]`. The order, if any, is carried along.
    pub fn permuted(&self, perm: &[usize]) -> Graph {
        let mut g = Graph::empty(self.n);
        for &(u, v) in &self.edges {
            g.add_edge(perm[u], perm[v]);
        }
        if let Some(order) = &self.order {
            g.order = Some(order.iter().map(|&v| perm[v]).collect());
        }
        g
    }
}

pub(crate) fn is_permutation(p: &[usize], n: usize) -> bool {
    if p.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &v in p {
        if v >= n || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    true
}

/// Finds an injective map from `pattern` to `host` carrying every pattern
/// edge onto a host edge.
///
/// Pattern vertices are placed by descending degree (ties by index) and host
/// candidates are tried in ascending order, so the result is the first map in
/// that backtracking order. `map[p]` is the host image of pattern vertex `p`.
pub fn find_monomorphism(pattern: &Graph, host: &Graph) -> Option<Vec<usize>> {
    if pattern.n > host.n {
        return None;
    }
    let mut seq: Vec<usize> = (0..pattern.n).collect();
    seq.sort_by_key(|&v| (std::cmp::Reverse(pattern.degree(v)), v));
    let mut map = vec![usize::MAX; pattern.n];
    let mut used = vec![false; host.n];
    if extend_mono(pattern, host, &seq, 0, &mut map, &mut used) {
        Some(map)
    } else {
        None
    }
}

fn extend_mono(
    pattern: &Graph,
    host: &Graph,
    seq: &[usize],
    depth: usize,
    map: &mut [usize],
    used: &mut [bool],
) -> bool {
    let Some(&p) = seq.get(depth) else {
        return true;
    };
    let need = pattern.degree(p);
    for h in 0..host.n {
        if used[h] || host.degree(h) < need {
            continue;
        }
        let ok = pattern
            .neighbours(p)
            .all(|q| map[q] == usize::MAX || host.has_edge(h, map[q]));
        if !ok {
            continue;
        }
        map[p] = h;
        used[h] = true;
        if extend_mono(pattern, host, seq, depth + 1, map, used) {
            return true;
        }
        map[p] = usize::MAX;
        used[h] = false;
    }
    false
}

/// Returns a monomorphism of the bowtie into `g`, if one exists.
pub fn bowtie_certificate(g: &Graph) -> Option<Vec<usize>> {
    find_monomorphism(&Graph::bowtie(), g)
}

pub fn contains_bowtie(g: &Graph) -> bool {
    bowtie_certificate(g).is_some()
}

/// All triangles as sorted triples, in lexicographic order.
pub fn triangles(g: &Graph) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for &(u, v) in &g.edges {
        for w in g.adj[v].range(v + 1..) {
            if g.has_edge(u, *w) {
                out.push([u, v, *w]);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Splits the edges into those lying in some triangle (type 0) and the rest.
pub fn edge_type_partition(g: &Graph) -> (BTreeSet<Edge>, BTreeSet<Edge>) {
    let mut e0 = BTreeSet::new();
    for [a, b, c] in triangles(g) {
        e0.insert((a, b));
        e0.insert((a, c));
        e0.insert((b, c));
    }
    let e1 = g.edges.difference(&e0).copied().collect();
    (e0, e1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c2() -> Graph {
        Graph::chimney(2)
    }

    #[test]
    fn triangle_into_k4() {
        let tri = Graph::complete(3);
        let m = find_monomorphism(&tri, &Graph::complete(4)).unwrap();
        assert_eq!(m, vec![0, 1, 2]);
    }

    #[test]
    fn bowtie_does_not_fit_k4() {
        assert!(find_monomorphism(&Graph::bowtie(), &Graph::complete(4)).is_none());
    }

    #[test]
    fn bowtie_self_embedding_is_identity() {
        let b = Graph::bowtie();
        assert_eq!(find_monomorphism(&b, &b).unwrap(), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn empty_pattern_maps_trivially() {
        assert_eq!(find_monomorphism(&Graph::empty(0), &c2()), Some(vec![]));
    }

    #[test]
    fn bowtie_detection_examples() {
        assert!(contains_bowtie(&Graph::bowtie()));
        assert!(!contains_bowtie(&c2()));
        // K4 on 0..4 plus vertex 4 forming a triangle with the K4 edge 0-1.
        let mut g = Graph::complete(4);
        g.add_vertices(1);
        g.add_edge(0, 4);
        g.add_edge(1, 4);
        assert!(contains_bowtie(&g));
        let cert = bowtie_certificate(&g).unwrap();
        for (u, v) in Graph::bowtie().edges().iter().copied() {
            assert!(g.has_edge(cert[u], cert[v]));
        }
    }

    #[test]
    fn triangle_listing() {
        assert_eq!(triangles(&Graph::complete(3)), vec![[0, 1, 2]]);
        assert_eq!(triangles(&Graph::complete(4)).len(), 4);
        let path = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
        assert!(triangles(&path).is_empty());
    }

    #[test]
    fn edge_types() {
        let (e0, e1) = edge_type_partition(&c2());
        assert_eq!(e0.len(), 5);
        assert!(e1.is_empty());

        let single = Graph::new(2, [(0, 1)]).unwrap();
        let (e0, e1) = edge_type_partition(&single);
        assert!(e0.is_empty());
        assert_eq!(e1.into_iter().collect::<Vec<_>>(), vec![(0, 1)]);

        let pendant = Graph::new(4, [(0, 1), (0, 2), (1, 2), (2, 3)]).unwrap();
        let (e0, e1) = edge_type_partition(&pendant);
        assert_eq!(e0.len(), 3);
        assert_eq!(e1.len(), 1);
    }

    #[test]
    fn json_rejects_bad_input() {
        let bad: Result<Graph, _> = serde_json::from_str(r#"{"n":2,"edges":[[0,0]]}"#);
        assert!(bad.is_err());
        let bad: Result<Graph, _> = serde_json::from_str(r#"{"n":2,"edges":[[0,1],[1,0]]}"#);
        assert!(bad.is_err());
        let bad: Result<Graph, _> = serde_json::from_str(r#"{"n":2,"edges":[],"order":[0,0]}"#);
        assert!(bad.is_err());
        let ok: Graph = serde_json::from_str(r#"{"n":3,"edges":[[1,0]],"order":[2,0,1]}"#).unwrap();
        assert_eq!(
            serde_json::to_string(&ok).unwrap(),
            r#"{"n":3,"edges":[[0,1]],"order":[2,0,1]}"#
        );
    }
}
