use std::collections::{BTreeMap, BTreeSet};

use serde::{Serialize, Serializer};

use super::RamseyError;
use crate::canon::{canonical_code, CanonicalCode};
use crate::good::{decompose, is_good, Goodness};
use crate::graph::{bowtie_certificate, triangles, Graph};
use crate::lifting::{all_admissible_orders, l1_flags, lift_l2, Flag, LiftedStructure, OrderedGoodGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum GadgetClass {
    /// L vertices.
    I,
    /// K1 vertices.
    II,
    /// Unflagged vertices over a common centre.
    III,
}

/// `w` was inserted for the pair `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GadgetTriple {
    pub class: GadgetClass,
    pub u: usize,
    pub w: usize,
    pub v: usize,
}

/// One ordered minimal extension and its expansion by gadget vertices. The
/// input graph sits on vertices `0..k` of both.
#[derive(Debug, Clone)]
pub struct Gadget {
    pub extension: OrderedGoodGraph,
    pub expanded: OrderedGoodGraph,
    pub triples: Vec<GadgetTriple>,
}

impl Serialize for Gadget {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct G<'a> {
            extension: Graph,
            expanded: Graph,
            triples: &'a [GadgetTriple],
        }
        G {
            extension: self.extension.ordered_graph(),
            expanded: self.expanded.ordered_graph(),
            triples: &self.triples,
        }
        .serialize(s)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GadgetSet {
    /// Minimal good extensions up to isomorphism fixing the input.
    pub extensions: usize,
    pub gadgets: Vec<Gadget>,
    /// Distinct two-vertex structures induced on `{u, w}` and `{w, v}`, per class.
    pub pair_structures: BTreeMap<GadgetClass, Vec<LiftedStructure>>,
}

/// Minimal good extensions of `a`, all their admissible orders, and the
/// gadget vertices `w(u, v)`.
///
/// Extensions add no type-1 edges at new vertices beyond those needed.
pub fn expansion_gadget(a: &Graph) -> Result<GadgetSet, RamseyError> {
    if let Some(cert) = bowtie_certificate(a) {
        return Err(RamseyError::Precondition(format!("input contains a bowtie at {cert:?}")));
    }
    let extensions = minimal_extensions(a);
    let mut gadgets = Vec::new();
    let mut pairs: BTreeMap<GadgetClass, BTreeMap<CanonicalCode, LiftedStructure>> = BTreeMap::new();
    for g in &extensions {
        let good = decompose(g).map_err(|e| RamseyError::Internal(format!("extension is not good: {e}")))?;
        let mut seen = BTreeSet::new();
        for order in all_admissible_orders(&good) {
            let mut og = g.clone();
            og.set_order(order.clone()).expect("admissible orders are permutations");
            if !seen.insert(marked_code(&og, a.n())) {
                continue;
            }
            let ordered = OrderedGoodGraph::new(good.clone(), order).expect("enumerated orders are admissible");
            let (expanded, triples) = insert_gadgets(&ordered)?;
            let lifted = lift_l2(&expanded);
            for t in &triples {
                let left = lifted.restrict(&[t.u, t.w]).normalized();
                let right = lifted.restrict(&[t.w, t.v]).normalized();
                if left != right {
                    return Err(RamseyError::Internal(format!("pairs around gadget {t:?} differ")));
                }
                pairs.entry(t.class).or_default().insert(left.canonical_code(), left);
            }
            gadgets.push(Gadget {
                extension: ordered,
                expanded,
                triples,
            });
        }
    }
    Ok(GadgetSet {
        extensions: extensions.len(),
        gadgets,
        pair_structures: pairs.into_iter().map(|(c, m)| (c, m.into_values().collect())).collect(),
    })
}

/// Code of `g` with vertex `x < k` labelled `x + 1`; respects the order of `g` if any.
fn marked_code(g: &Graph, k: usize) -> CanonicalCode {
    let labels: Vec<u32> = (0..g.n()).map(|v| if v < k { v as u32 + 1 } else { 0 }).collect();
    canonical_code(g, &labels, |_, _| 0)
}

/// How a group of triangle-free input vertices is covered.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Block {
    /// `u` in a fresh K4.
    K4New(usize),
    /// Adjacent `u`, `v` completed to a K4.
    K4Pair(usize, usize),
    /// Adjacent `u`, `v` as the centre of a C2.
    CentrePair(usize, usize),
    /// `u` as a centre vertex with a new partner; the listed vertices are apexes.
    CentreWith(usize, Vec<usize>),
    /// The listed vertices are apexes over a fresh centre.
    SharedApex(Vec<usize>),
}

/// A lone triangle gets a fourth vertex on one edge, or on all three.
#[derive(Debug, Clone, Copy)]
enum TriangleFix {
    Apex([usize; 2]),
    K4,
}

fn independent_subsets(pool: &[usize], g: &Graph) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &x in pool {
        let more: Vec<Vec<usize>> = out
            .iter()
            .filter(|s| s.iter().all(|&y| !g.has_edge(x, y)))
            .map(|s| {
                let mut s = s.clone();
                s.push(x);
                s
            })
            .collect();
        out.extend(more);
    }
    out
}

fn block_covers(g: &Graph, free: &[usize]) -> Vec<Vec<Block>> {
    fn rec(g: &Graph, uncovered: &BTreeSet<usize>, acc: &mut Vec<Block>, out: &mut Vec<Vec<Block>>) {
        let Some(&u) = uncovered.iter().next() else {
            out.push(acc.clone());
            return;
        };
        let rest: BTreeSet<usize> = uncovered.iter().copied().filter(|&x| x != u).collect();
        let nbrs: Vec<usize> = rest.iter().copied().filter(|&x| g.has_edge(u, x)).collect();
        let non_nbrs: Vec<usize> = rest.iter().copied().filter(|&x| !g.has_edge(u, x)).collect();
        let mut options: Vec<(Block, Vec<usize>)> = vec![(Block::K4New(u), vec![u])];
        for &v in &nbrs {
            options.push((Block::K4Pair(u, v), vec![u, v]));
            options.push((Block::CentrePair(u, v), vec![u, v]));
            // u as an apex over v and a new partner.
            let pool: Vec<usize> = rest.iter().copied().filter(|&x| x != v && g.has_edge(v, x)).collect();
            for s in independent_subsets(&pool, g) {
                if s.iter().any(|&x| g.has_edge(u, x)) {
                    continue;
                }
                let mut apexes = vec![u];
                apexes.extend(&s);
                apexes.sort_unstable();
                let mut used = apexes.clone();
                used.push(v);
                options.push((Block::CentreWith(v, apexes), used));
            }
        }
        for s in independent_subsets(&nbrs, g) {
            let mut used = s.clone();
            used.push(u);
            options.push((Block::CentreWith(u, s), used));
        }
        for s in independent_subsets(&non_nbrs, g) {
            let mut apexes = vec![u];
            apexes.extend(&s);
            let used = apexes.clone();
            options.push((Block::SharedApex(apexes), used));
        }
        for (block, used) in options {
            let left: BTreeSet<usize> = uncovered.iter().copied().filter(|x| !used.contains(x)).collect();
            acc.push(block);
            rec(g, &left, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    rec(g, &free.iter().copied().collect(), &mut Vec::new(), &mut out);
    out
}

fn apply(g: &mut Graph, blocks: &[Block], fixes: &[([usize; 3], TriangleFix)]) {
    let fresh = |g: &mut Graph| g.add_vertices(1);
    let clique = |g: &mut Graph, vs: &[usize]| {
        for (i, &x) in vs.iter().enumerate() {
            for &y in &vs[i + 1..] {
                g.add_edge(x, y);
            }
        }
    };
    let chimney = |g: &mut Graph, c: [usize; 2], apexes: &[usize]| {
        g.add_edge(c[0], c[1]);
        for &x in apexes {
            g.add_edge(x, c[0]);
            g.add_edge(x, c[1]);
        }
    };
    for b in blocks {
        match b {
            Block::K4New(u) => {
                let vs = [*u, fresh(g), fresh(g), fresh(g)];
                clique(g, &vs);
            }
            Block::K4Pair(u, v) => {
                let vs = [*u, *v, fresh(g), fresh(g)];
                clique(g, &vs);
            }
            Block::CentrePair(u, v) => {
                let apexes = [fresh(g), fresh(g)];
                chimney(g, [*u, *v], &apexes);
            }
            Block::CentreWith(u, s) => {
                let p = fresh(g);
                let mut apexes = s.clone();
                while apexes.len() < 2 {
                    apexes.push(fresh(g));
                }
                chimney(g, [*u, p], &apexes);
            }
            Block::SharedApex(s) => {
                let c = [fresh(g), fresh(g)];
                let mut apexes = s.clone();
                while apexes.len() < 2 {
                    apexes.push(fresh(g));
                }
                chimney(g, c, &apexes);
            }
        }
    }
    for (t, fix) in fixes {
        let w = fresh(g);
        match fix {
            TriangleFix::Apex(e) => {
                g.add_edge(w, e[0]);
                g.add_edge(w, e[1]);
            }
            TriangleFix::K4 => {
                for &x in t {
                    g.add_edge(w, x);
                }
            }
        }
    }
}

/// Whether `a` is an induced subgraph of `h`.
fn contains_induced(h: &Graph, a: &Graph) -> bool {
    fn rec(h: &Graph, a: &Graph, map: &mut Vec<usize>, used: &mut [bool]) -> bool {
        let i = map.len();
        if i == a.n() {
            return true;
        }
        for x in 0..h.n() {
            if used[x] || h.degree(x) < a.degree(i) {
                continue;
            }
            if map.iter().enumerate().all(|(j, &y)| h.has_edge(x, y) == a.has_edge(i, j)) {
                used[x] = true;
                map.push(x);
                if rec(h, a, map, used) {
                    return true;
                }
                map.pop();
                used[x] = false;
            }
        }
        false
    }
    a.n() <= h.n() && rec(h, a, &mut Vec::new(), &mut vec![false; h.n()])
}

/// No proper induced subgraph is good and contains `a`.
fn is_minimal(g: &Graph, a: &Graph) -> bool {
    let n = g.n();
    for mask in 1u64..(1 << n) - 1 {
        if (mask.count_ones() as usize) < a.n().max(4) {
            continue;
        }
        let keep: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        let h = g.induced(&keep);
        if matches!(is_good(&h), Ok(Goodness::Good)) && contains_induced(&h, a) {
            return false;
        }
    }
    true
}

/// Minimal good extensions of `a` with no superfluous edges at new vertices,
/// one per isomorphism class fixing `a` pointwise.
pub(crate) fn minimal_extensions(a: &Graph) -> Vec<Graph> {
    let tris = triangles(a);
    let in_triangle: BTreeSet<usize> = tris.iter().flatten().copied().collect();
    let free: Vec<usize> = (0..a.n()).filter(|v| !in_triangle.contains(v)).collect();
    let lone: Vec<[usize; 3]> = tris
        .iter()
        .copied()
        .filter(|t| tris.iter().filter(|s| s.iter().any(|x| t.contains(x))).count() == 1)
        .collect();
    let mut fix_choices: Vec<Vec<([usize; 3], TriangleFix)>> = vec![Vec::new()];
    for &t in &lone {
        let opts = [
            TriangleFix::Apex([t[0], t[1]]),
            TriangleFix::Apex([t[0], t[2]]),
            TriangleFix::Apex([t[1], t[2]]),
            TriangleFix::K4,
        ];
        fix_choices = fix_choices
            .into_iter()
            .flat_map(|prefix| {
                opts.iter().map(move |&o| {
                    let mut p = prefix.clone();
                    p.push((t, o));
                    p
                })
            })
            .collect();
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for blocks in block_covers(a, &free) {
        for fixes in &fix_choices {
            let mut g = a.clone();
            g.clear_order();
            apply(&mut g, &blocks, fixes);
            if !matches!(is_good(&g), Ok(Goodness::Good)) || !is_minimal(&g, a) {
                continue;
            }
            if seen.insert(marked_code(&g, a.n())) {
                out.push(g);
            }
        }
    }
    out
}

/// Adds `w(u, v)` for every same-class pair, in lexicographic order of
/// `(class, u, v)`.
fn insert_gadgets(og: &OrderedGoodGraph) -> Result<(OrderedGoodGraph, Vec<GadgetTriple>), RamseyError> {
    let good = &og.good;
    let flags = l1_flags(og);
    let mut pairs: Vec<(GadgetClass, usize, usize)> = Vec::new();
    for u in 0..og.n() {
        for v in 0..og.n() {
            if og.pos(u) >= og.pos(v) {
                continue;
            }
            let class = match (flags[u], flags[v]) {
                (Some(Flag::L), Some(Flag::L)) => GadgetClass::I,
                (Some(Flag::K1), Some(Flag::K1)) => GadgetClass::II,
                (None, None) if good.centre_of(u) == good.centre_of(v) => GadgetClass::III,
                _ => continue,
            };
            pairs.push((class, u, v));
        }
    }
    pairs.sort_unstable();
    let mut g = good.graph.clone();
    g.clear_order();
    let mut order = og.order().to_vec();
    let after = |order: &[usize], vs: &[usize]| order.iter().rposition(|x| vs.contains(x)).unwrap() + 1;
    let mut triples = Vec::with_capacity(pairs.len());
    for &(class, u, v) in &pairs {
        let w = g.n();
        match class {
            GadgetClass::I => {
                let comp = good.component(u);
                let (l, r, a1, a2) = (w, w + 1, w + 2, w + 3);
                g.add_vertices(4);
                for (x, y) in [(l, r), (l, a1), (r, a1), (l, a2), (r, a2)] {
                    g.add_edge(x, y);
                }
                let at = after(&order, comp.centre());
                order.splice(at..at, [l, r]);
                let at = after(&order, comp.apexes());
                order.splice(at..at, [a1, a2]);
            }
            GadgetClass::II => {
                g.add_vertices(4);
                for x in w..w + 4 {
                    for y in x + 1..w + 4 {
                        g.add_edge(x, y);
                    }
                }
                let at = after(&order, good.centre_of(u));
                order.splice(at..at, w..w + 4);
            }
            GadgetClass::III => {
                g.add_vertices(1);
                for &c in good.centre_of(u) {
                    g.add_edge(w, c);
                }
                let at = after(&order, &[u]);
                order.insert(at, w);
            }
        }
        triples.push(GadgetTriple { class, u, w, v });
    }
    let good = decompose(&g).map_err(|e| RamseyError::Internal(format!("expanded graph is not good: {e}")))?;
    if let Some(cert) = bowtie_certificate(&g) {
        return Err(RamseyError::Internal(format!("expanded graph contains a bowtie at {cert:?}")));
    }
    let expanded =
        OrderedGoodGraph::new(good, order).map_err(|e| RamseyError::Internal(format!("expanded order: {e}")))?;
    let flags = l1_flags(&expanded);
    for t in &triples {
        let (pu, pw, pv) = (expanded.pos(t.u), expanded.pos(t.w), expanded.pos(t.v));
        let ok = flags[t.w] == flags[t.u]
            && pu < pw
            && pw < pv
            && !g.has_edge(t.u, t.w)
            && !g.has_edge(t.w, t.v)
            && (t.class != GadgetClass::III || expanded.good.centre_of(t.w) == expanded.good.centre_of(t.u));
        if !ok {
            return Err(RamseyError::Internal(format!("gadget {t:?} is misplaced")));
        }
    }
    Ok((expanded, triples))
}
