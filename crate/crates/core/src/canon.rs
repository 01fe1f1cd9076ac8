//! Canonical codes for vertex- and edge-labelled graphs.
//!
//! Ordered graphs have exactly one order-preserving relabelling, so their code
//! is read off directly. Unordered graphs go through colour refinement with
//! individualisation; among the leaves of the search tree the lexicographically
//! smallest encoding wins.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::graph::Graph;

/// Byte string identifying a labelled graph up to label- and order-preserving
/// isomorphism.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CanonicalCode(pub Vec<u8>);

impl fmt::Debug for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalCode({})", hex::encode(&self.0))
    }
}

/// Encodes `g` with vertex `seq[i]` placed at position `i`.
fn encode(g: &Graph, vlabels: &[u32], elabel: &dyn Fn(usize, usize) -> u32, seq: &[usize]) -> Vec<u8> {
    let n = seq.len();
    let mut out = Vec::with_capacity(4 + 4 * n + n * n / 2);
    out.extend_from_slice(&(n as u32).to_be_bytes());
    for &v in seq {
        out.extend_from_slice(&vlabels[v].to_be_bytes());
    }
    for i in 0..n {
        for j in i + 1..n {
            let (u, v) = (seq[i], seq[j]);
            if g.has_edge(u, v) {
                out.push(1);
                out.extend_from_slice(&elabel(u, v).to_be_bytes());
            } else {
                out.push(0);
            }
        }
    }
    out
}

/// Canonical code of `g` under the given labels.
///
/// `vertex_labels[v]` labels vertex `v`; `edge_label(u, v)` is queried only for
/// existing edges and must be symmetric. If `g` carries an order, only
/// order-preserving isomorphisms are considered.
pub fn canonical_code(
    g: &Graph,
    vertex_labels: &[u32],
    edge_label: impl Fn(usize, usize) -> u32,
) -> CanonicalCode {
    assert_eq!(vertex_labels.len(), g.n());
    if let Some(order) = g.order() {
        return CanonicalCode(encode(g, vertex_labels, &edge_label, order));
    }
    let mut search = Search {
        g,
        vlabels: vertex_labels,
        elabel: &edge_label,
        best: None,
    };
    let mut cells: Vec<Vec<usize>> = Vec::new();
    let mut by_label: Vec<(u32, usize)> = (0..g.n()).map(|v| (vertex_labels[v], v)).collect();
    by_label.sort_unstable();
    for (label, v) in by_label {
        match cells.last_mut() {
            Some(cell) if vertex_labels[cell[0]] == label => cell.push(v),
            _ => cells.push(vec![v]),
        }
    }
    search.run(cells);
    CanonicalCode(search.best.unwrap_or_else(|| encode(g, vertex_labels, &edge_label, &[])))
}

/// Canonical code of an unlabelled graph.
pub fn graph_code(g: &Graph) -> CanonicalCode {
    canonical_code(g, &vec![0; g.n()], |_, _| 0)
}

struct Search<'a> {
    g: &'a Graph,
    vlabels: &'a [u32],
    elabel: &'a dyn Fn(usize, usize) -> u32,
    best: Option<Vec<u8>>,
}

impl Search<'_> {
    fn run(&mut self, cells: Vec<Vec<usize>>) {
        let cells = self.refine(cells);
        let Some(target) = cells.iter().position(|c| c.len() > 1) else {
            let seq: Vec<usize> = cells.iter().map(|c| c[0]).collect();
            let code = encode(self.g, self.vlabels, self.elabel, &seq);
            if self.best.as_ref().map_or(true, |b| code < *b) {
                self.best = Some(code);
            }
            return;
        };
        let cell = &cells[target];
        let mut tried: Vec<usize> = Vec::new();
        for &v in cell {
            if tried.iter().any(|&w| self.twins(v, w)) {
                continue;
            }
            tried.push(v);
            let mut next = Vec::with_capacity(cells.len() + 1);
            next.extend_from_slice(&cells[..target]);
            next.push(vec![v]);
            next.push(cell.iter().copied().filter(|&w| w != v).collect());
            next.extend_from_slice(&cells[target + 1..]);
            self.run(next);
        }
    }

    /// `u` and `v` can be swapped by an automorphism fixing everything else.
    fn twins(&self, u: usize, v: usize) -> bool {
        if self.vlabels[u] != self.vlabels[v] || self.g.degree(u) != self.g.degree(v) {
            return false;
        }
        let g = self.g;
        g.neighbours(u).all(|w| {
            w == v || (g.has_edge(v, w) && (self.elabel)(u, w) == (self.elabel)(v, w))
        }) && g.neighbours(v).all(|w| w == u || g.has_edge(u, w))
    }

    /// Splits cells by neighbour-cell/edge-label signatures until stable.
    fn refine(&self, mut cells: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
        let n = self.g.n();
        let mut cell_of = vec![0usize; n];
        loop {
            for (i, c) in cells.iter().enumerate() {
                for &v in c {
                    cell_of[v] = i;
                }
            }
            let mut changed = false;
            let mut next = Vec::with_capacity(cells.len());
            for c in &cells {
                if c.len() == 1 {
                    next.push(c.clone());
                    continue;
                }
                let mut keyed: Vec<(Vec<(usize, u32)>, usize)> = c
                    .iter()
                    .map(|&v| {
                        let mut sig: Vec<(usize, u32)> = self
                            .g
                            .neighbours(v)
                            .map(|w| (cell_of[w], (self.elabel)(v, w)))
                            .collect();
                        sig.sort_unstable();
                        (sig, v)
                    })
                    .collect();
                keyed.sort();
                let mut start = 0;
                for i in 1..=keyed.len() {
                    if i == keyed.len() || keyed[i].0 != keyed[start].0 {
                        next.push(keyed[start..i].iter().map(|(_, v)| *v).collect());
                        start = i;
                    }
                }
                if next.last().map(|l| l.len()) != Some(c.len()) {
                    changed = true;
                }
            }
            cells = next;
            if !changed {
                return cells;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::edge;
    use std::collections::BTreeMap;

    /// Smallest encoding over all permutations; the reference for small graphs.
    fn brute_code(g: &Graph, vl: &[u32], el: &dyn Fn(usize, usize) -> u32) -> Vec<u8> {
        let n = g.n();
        let mut seq: Vec<usize> = (0..n).collect();
        let mut best = encode(g, vl, el, &seq);
        // Heap's algorithm.
        let mut c = vec![0usize; n];
        let mut i = 0;
        while i < n {
            if c[i] < i {
                if i % 2 == 0 {
                    seq.swap(0, i);
                } else {
                    seq.swap(c[i], i);
                }
                let code = encode(g, vl, el, &seq);
                if code < best {
                    best = code;
                }
                c[i] += 1;
                i = 0;
            } else {
                c[i] = 0;
                i += 1;
            }
        }
        best
    }

    #[test]
    fn relabelled_chimneys_agree() {
        let g = Graph::chimney(2);
        let h = g.permuted(&[3, 1, 0, 2]);
        assert_eq!(graph_code(&g), graph_code(&h));
        assert_ne!(graph_code(&g), graph_code(&Graph::complete(4)));
    }

    fn random_labelled(rng: &mut impl rand::Rng, n: usize) -> (Graph, Vec<u32>, BTreeMap<(usize, usize), u32>) {
        let mut g = Graph::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(0.4) {
                    g.add_edge(u, v);
                }
            }
        }
        let vl: Vec<u32> = (0..n).map(|_| rng.gen_range(0..2)).collect();
        let el = g.edges().iter().map(|&e| (e, rng.gen_range(0..2))).collect();
        (g, vl, el)
    }

    #[test]
    fn separates_exactly_like_bruteforce() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let n = rng.gen_range(1..=6);
            let (g1, v1, e1) = random_labelled(&mut rng, n);
            let (g2, v2, e2) = random_labelled(&mut rng, n);
            let l1 = |u: usize, v: usize| e1[&edge(u, v)];
            let l2 = |u: usize, v: usize| e2[&edge(u, v)];
            let same = canonical_code(&g1, &v1, l1) == canonical_code(&g2, &v2, l2);
            let brute_same = brute_code(&g1, &v1, &l1) == brute_code(&g2, &v2, &l2);
            assert_eq!(same, brute_same);
        }
    }

    #[test]
    fn invariant_under_random_permutations() {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let (g, vl, el) = random_labelled(&mut rng, 8);
        let base = canonical_code(&g, &vl, |u, v| el[&edge(u, v)]);
        for _ in 0..1000 {
            let mut perm: Vec<usize> = (0..8).collect();
            perm.shuffle(&mut rng);
            let h = g.permuted(&perm);
            let mut hl = vec![0; 8];
            for v in 0..8 {
                hl[perm[v]] = vl[v];
            }
            let mut inv = vec![0; 8];
            for v in 0..8 {
                inv[perm[v]] = v;
            }
            let code = canonical_code(&h, &hl, |u, v| el[&edge(inv[u], inv[v])]);
            assert_eq!(code, base);
        }
    }

    #[test]
    fn empty_graph_is_fast() {
        let g = Graph::empty(30);
        let _ = graph_code(&g);
        let _ = graph_code(&Graph::complete(30));
    }
}
