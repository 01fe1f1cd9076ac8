//! Admissible orders, the unary and binary expansions, shadows and reduced
//! structures.

pub mod types;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canon::CanonicalCode;
use crate::good::{Component, GoodGraph};
use crate::graph::{edge, is_permutation, Edge, Graph};
pub use types::{Flag, PairConfig, PairShape, TypeCode};

/// First rule broken by a candidate order.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
pub enum AdmissibilityViolation {
    #[error("order is not a permutation of the vertices")]
    NotAPermutation,
    #[error("centre {0:?} is not an interval")]
    CentreNotInterval(Vec<usize>),
    #[error("K4 vertex {k4} precedes chimney-centre vertex {chimney}")]
    K4BeforeChimney { k4: usize, chimney: usize },
    #[error("non-central vertex {non_central} precedes central vertex {central}")]
    NonCentralBeforeCentral { non_central: usize, central: usize },
    #[error("apexes over centre {0:?} are not an interval")]
    BlockNotInterval(Vec<usize>),
    #[error("apexes over centre {later:?} precede apexes over the earlier centre {earlier:?}")]
    BlocksOutOfOrder { earlier: Vec<usize>, later: Vec<usize> },
}

fn positions(order: &[usize]) -> Vec<usize> {
    let mut pos = vec![0; order.len()];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    pos
}

/// Checks the four admissibility rules, reporting the first violation.
pub fn is_admissible(g: &GoodGraph, order: &[usize]) -> Result<(), AdmissibilityViolation> {
    if !is_permutation(order, g.n()) {
        return Err(AdmissibilityViolation::NotAPermutation);
    }
    let pos = positions(order);
    let interval = |vs: &[usize]| {
        let ps: Vec<usize> = vs.iter().map(|&v| pos[v]).collect();
        let (lo, hi) = (*ps.iter().min().unwrap(), *ps.iter().max().unwrap());
        hi - lo + 1 == ps.len()
    };
    for c in &g.components {
        if !interval(c.centre()) {
            return Err(AdmissibilityViolation::CentreNotInterval(c.centre().to_vec()));
        }
    }
    let mut first_k4 = None;
    let mut first_apex = None;
    for &v in order {
        let comp = g.component(v);
        let central = g.is_central(v);
        if comp.is_k4() {
            first_k4.get_or_insert(v);
        } else if central {
            if let Some(k4) = first_k4 {
                return Err(AdmissibilityViolation::K4BeforeChimney { k4, chimney: v });
            }
        }
        if !central {
            first_apex.get_or_insert(v);
        } else if let Some(a) = first_apex {
            return Err(AdmissibilityViolation::NonCentralBeforeCentral {
                non_central: a,
                central: v,
            });
        }
    }
    let mut blocks: Vec<(usize, usize, &Component)> = Vec::new();
    for c in &g.components {
        if c.apexes().is_empty() {
            continue;
        }
        if !interval(c.apexes()) {
            return Err(AdmissibilityViolation::BlockNotInterval(c.centre().to_vec()));
        }
        let centre_pos = c.centre().iter().map(|&v| pos[v]).min().unwrap();
        let block_pos = c.apexes().iter().map(|&v| pos[v]).min().unwrap();
        blocks.push((centre_pos, block_pos, c));
    }
    blocks.sort_by_key(|b| b.0);
    for w in blocks.windows(2) {
        if w[0].1 > w[1].1 {
            return Err(AdmissibilityViolation::BlocksOutOfOrder {
                earlier: w[0].2.centre().to_vec(),
                later: w[1].2.centre().to_vec(),
            });
        }
    }
    Ok(())
}

/// A good graph with an admissible order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderedGoodGraph {
    pub good: GoodGraph,
    order: Vec<usize>,
    pos: Vec<usize>,
}

impl OrderedGoodGraph {
    pub fn new(good: GoodGraph, order: Vec<usize>) -> Result<Self, AdmissibilityViolation> {
        is_admissible(&good, &order)?;
        let pos = positions(&order);
        Ok(OrderedGoodGraph { good, order, pos })
    }

    pub fn n(&self) -> usize {
        self.good.n()
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn pos(&self, v: usize) -> usize {
        self.pos[v]
    }

    /// Underlying graph carrying the order.
    pub fn ordered_graph(&self) -> Graph {
        let mut g = self.good.graph.clone();
        g.set_order(self.order.clone()).expect("order is a permutation");
        g
    }
}

/// Deterministic admissible order: chimney centres by size then smallest
/// vertex, then K4s, then apex blocks following their centres.
pub fn some_admissible_order(g: &GoodGraph) -> OrderedGoodGraph {
    let mut chimneys: Vec<&Component> = g.components.iter().filter(|c| !c.is_k4()).collect();
    // The canonical code of a chimney component is determined by its size.
    chimneys.sort_by_key(|c| (c.apexes().len(), c.centre()[0]));
    let k4s = g.components.iter().filter(|c| c.is_k4());
    let mut order = Vec::with_capacity(g.n());
    for c in chimneys.iter().copied().chain(k4s) {
        order.extend_from_slice(c.centre());
    }
    for c in &chimneys {
        order.extend_from_slice(c.apexes());
    }
    OrderedGoodGraph::new(g.clone(), order).expect("construction is admissible")
}

/// Uniformly random choice inside each degree of freedom of an admissible order.
pub fn random_admissible_order(g: &GoodGraph, rng: &mut impl Rng) -> OrderedGoodGraph {
    let mut chimneys: Vec<&Component> = g.components.iter().filter(|c| !c.is_k4()).collect();
    let mut k4s: Vec<&Component> = g.components.iter().filter(|c| c.is_k4()).collect();
    chimneys.shuffle(rng);
    k4s.shuffle(rng);
    let mut order = Vec::with_capacity(g.n());
    for c in chimneys.iter().chain(&k4s) {
        let mut centre = c.centre().to_vec();
        centre.shuffle(rng);
        order.extend(centre);
    }
    for c in &chimneys {
        let mut apexes = c.apexes().to_vec();
        apexes.shuffle(rng);
        order.extend(apexes);
    }
    OrderedGoodGraph::new(g.clone(), order).expect("construction is admissible")
}

pub(crate) fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

fn product(choices: &[Vec<Vec<usize>>]) -> Vec<Vec<Vec<usize>>> {
    let mut out = vec![Vec::new()];
    for opts in choices {
        let mut next = Vec::with_capacity(out.len() * opts.len());
        for prefix in &out {
            for o in opts {
                let mut p = prefix.clone();
                p.push(o.clone());
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// Every admissible order of `g`. Exponential; intended for small graphs.
pub fn all_admissible_orders(g: &GoodGraph) -> Vec<Vec<usize>> {
    let chimneys: Vec<usize> = (0..g.components.len()).filter(|&i| !g.components[i].is_k4()).collect();
    let k4s: Vec<usize> = (0..g.components.len()).filter(|&i| g.components[i].is_k4()).collect();
    let inner: Vec<Vec<Vec<usize>>> = g
        .components
        .iter()
        .flat_map(|c| [permutations(c.centre()), permutations(c.apexes())])
        .collect();
    let mut out = Vec::new();
    for cp in permutations(&chimneys) {
        for kp in permutations(&k4s) {
            for choice in product(&inner) {
                let mut order = Vec::with_capacity(g.n());
                for &i in cp.iter().chain(&kp) {
                    order.extend_from_slice(&choice[2 * i]);
                }
                for &i in &cp {
                    order.extend_from_slice(&choice[2 * i + 1]);
                }
                out.push(order);
            }
        }
    }
    out
}

/// An expansion of an ordered graph by unary flags and typed pairs.
///
/// `types` is keyed by `(u, v)` with `u` before `v` in `order`; it may be
/// partial (a structure is complete when every pair is typed).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "LiftedJson", into = "LiftedJson")]
pub struct LiftedStructure {
    pub n: usize,
    pub order: Vec<usize>,
    pub unary: Vec<Option<Flag>>,
    pub e0: BTreeSet<Edge>,
    pub e1: BTreeSet<Edge>,
    pub types: BTreeMap<(usize, usize), TypeCode>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructureError {
    #[error("order is not a permutation of 0..{0}")]
    BadOrder(usize),
    #[error("vertex {0} out of range")]
    OutOfRange(usize),
    #[error("vertex {0} carries more than one flag")]
    DoubleFlag(usize),
    #[error("pair ({0}, {1}) is both a type-0 and a type-1 edge, or a loop")]
    BadEdge(usize, usize),
    #[error("pair ({0}, {1}) is typed twice or against the order")]
    BadType(usize, usize),
}

#[derive(Serialize, Deserialize)]
struct LiftedJson {
    n: usize,
    order: Vec<usize>,
    unary: BTreeMap<String, Vec<usize>>,
    e0: Vec<[usize; 2]>,
    e1: Vec<[usize; 2]>,
    types: Vec<(usize, usize, TypeCode)>,
}

impl TryFrom<LiftedJson> for LiftedStructure {
    type Error = StructureError;

    fn try_from(j: LiftedJson) -> Result<Self, StructureError> {
        let n = j.n;
        if !is_permutation(&j.order, n) {
            return Err(StructureError::BadOrder(n));
        }
        let mut unary = vec![None; n];
        for (name, vs) in &j.unary {
            let flag = Flag::from_name(name).ok_or(StructureError::OutOfRange(usize::MAX))?;
            for &v in vs {
                if v >= n {
                    return Err(StructureError::OutOfRange(v));
                }
                if unary[v].replace(flag).is_some() {
                    return Err(StructureError::DoubleFlag(v));
                }
            }
        }
        let mut e0 = BTreeSet::new();
        let mut e1 = BTreeSet::new();
        for (set, list) in [(&mut e0, &j.e0), (&mut e1, &j.e1)] {
            for &[u, v] in list {
                if u >= n || v >= n {
                    return Err(StructureError::OutOfRange(u.max(v)));
                }
                if u == v || !set.insert(edge(u, v)) {
                    return Err(StructureError::BadEdge(u, v));
                }
            }
        }
        if let Some(&(u, v)) = e0.intersection(&e1).next() {
            return Err(StructureError::BadEdge(u, v));
        }
        let pos = positions(&j.order);
        let mut types = BTreeMap::new();
        for (u, v, code) in j.types {
            if u >= n || v >= n {
                return Err(StructureError::OutOfRange(u.max(v)));
            }
            if pos[u] >= pos[v] || types.insert((u, v), code).is_some() {
                return Err(StructureError::BadType(u, v));
            }
        }
        Ok(LiftedStructure {
            n,
            order: j.order,
            unary,
            e0,
            e1,
            types,
        })
    }
}

impl From<LiftedStructure> for LiftedJson {
    fn from(a: LiftedStructure) -> Self {
        let mut unary: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (v, f) in a.unary.iter().enumerate() {
            if let Some(f) = f {
                unary.entry(f.name().to_string()).or_default().push(v);
            }
        }
        LiftedJson {
            n: a.n,
            order: a.order,
            unary,
            e0: a.e0.into_iter().map(|(u, v)| [u, v]).collect(),
            e1: a.e1.into_iter().map(|(u, v)| [u, v]).collect(),
            types: a.types.into_iter().map(|((u, v), c)| (u, v, c)).collect(),
        }
    }
}

impl LiftedStructure {
    pub fn positions(&self) -> Vec<usize> {
        positions(&self.order)
    }

    /// 0 non-edge, 1 type-0 edge, 2 type-1 edge.
    pub fn relation(&self, u: usize, v: usize) -> u8 {
        let e = edge(u, v);
        if self.e0.contains(&e) {
            1
        } else if self.e1.contains(&e) {
            2
        } else {
            0
        }
    }

    /// Type of the pair, looked up in whichever direction the order dictates.
    pub fn type_of(&self, u: usize, v: usize) -> Option<&TypeCode> {
        self.types.get(&(u, v)).or_else(|| self.types.get(&(v, u)))
    }

    pub fn is_complete(&self) -> bool {
        self.types.len() == self.n * self.n.saturating_sub(1) / 2
    }

    /// Induced substructure on `vertices`, renumbered by increasing id.
    pub fn restrict(&self, vertices: &[usize]) -> LiftedStructure {
        let mut keep: Vec<usize> = vertices.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let mut new_id = vec![usize::MAX; self.n];
        for (i, &v) in keep.iter().enumerate() {
            new_id[v] = i;
        }
        let order = self.order.iter().filter(|&&v| new_id[v] != usize::MAX).map(|&v| new_id[v]).collect();
        if keep.len() * keep.len() < self.types.len() + self.e0.len() + self.e1.len() {
            // Few vertices: look pairs up instead of scanning every relation.
            let mut out = LiftedStructure {
                n: keep.len(),
                order,
                unary: keep.iter().map(|&v| self.unary[v]).collect(),
                e0: BTreeSet::new(),
                e1: BTreeSet::new(),
                types: BTreeMap::new(),
            };
            for (i, &x) in keep.iter().enumerate() {
                for (j, &y) in keep.iter().enumerate().skip(i + 1) {
                    match self.relation(x, y) {
                        1 => out.e0.insert((i, j)),
                        2 => out.e1.insert((i, j)),
                        _ => false,
                    };
                    if let Some(c) = self.types.get(&(x, y)) {
                        out.types.insert((i, j), c.clone());
                    } else if let Some(c) = self.types.get(&(y, x)) {
                        out.types.insert((j, i), c.clone());
                    }
                }
            }
            return out;
        }
        let map_set = |s: &BTreeSet<Edge>| -> BTreeSet<Edge> {
            s.iter()
                .filter(|(u, v)| new_id[*u] != usize::MAX && new_id[*v] != usize::MAX)
                .map(|&(u, v)| edge(new_id[u], new_id[v]))
                .collect()
        };
        LiftedStructure {
            n: keep.len(),
            order,
            unary: keep.iter().map(|&v| self.unary[v]).collect(),
            e0: map_set(&self.e0),
            e1: map_set(&self.e1),
            types: self
                .types
                .iter()
                .filter(|((u, v), _)| new_id[*u] != usize::MAX && new_id[*v] != usize::MAX)
                .map(|(&(u, v), c)| ((new_id[u], new_id[v]), c.clone()))
                .collect(),
        }
    }

    /// Vertex `order[i]` becomes `i`.
    pub fn normalized(&self) -> LiftedStructure {
        let pos = self.positions();
        let mut unary = vec![None; self.n];
        for v in 0..self.n {
            unary[pos[v]] = self.unary[v];
        }
        let map_set = |s: &BTreeSet<Edge>| s.iter().map(|&(u, v)| edge(pos[u], pos[v])).collect();
        LiftedStructure {
            n: self.n,
            order: (0..self.n).collect(),
            unary,
            e0: map_set(&self.e0),
            e1: map_set(&self.e1),
            types: self.types.iter().map(|(&(u, v), c)| ((pos[u], pos[v]), c.clone())).collect(),
        }
    }

    /// Identifies the structure up to order-preserving isomorphism.
    pub fn canonical_code(&self) -> CanonicalCode {
        let a = self.normalized();
        let mut out = (a.n as u32).to_be_bytes().to_vec();
        out.extend(a.unary.iter().map(|&f| Flag::code(f)));
        for i in 0..a.n {
            for j in i + 1..a.n {
                out.push(a.relation(i, j));
                match a.types.get(&(i, j)) {
                    Some(c) => {
                        out.push(c.0.len() as u8);
                        out.extend_from_slice(&c.0);
                    }
                    None => out.push(0xFF),
                }
            }
        }
        CanonicalCode(out)
    }

    pub fn is_isomorphic(&self, other: &LiftedStructure) -> bool {
        self.normalized() == other.normalized()
    }
}

/// Flags of the first expansion, read off the order.
pub fn l1_flags(og: &OrderedGoodGraph) -> Vec<Option<Flag>> {
    let mut flags = vec![None; og.n()];
    for c in &og.good.components {
        let mut centre = c.centre().to_vec();
        centre.sort_by_key(|&v| og.pos(v));
        match c {
            Component::Chimney { .. } => {
                flags[centre[0]] = Some(Flag::L);
                flags[centre[1]] = Some(Flag::R);
            }
            Component::K4 { .. } => {
                for (i, &v) in centre.iter().enumerate() {
                    flags[v] = Some(Flag::k4(i));
                }
            }
        }
    }
    flags
}

fn base_structure(og: &OrderedGoodGraph) -> LiftedStructure {
    LiftedStructure {
        n: og.n(),
        order: og.order().to_vec(),
        unary: l1_flags(og),
        e0: og.good.e0.clone(),
        e1: og.good.e1.clone(),
        types: BTreeMap::new(),
    }
}

/// Unary expansion: L/R on chimney centres, K1..K4 on K4s, in order.
pub fn lift_l1(og: &OrderedGoodGraph) -> LiftedStructure {
    base_structure(og)
}

fn pair_type_with(og: &OrderedGoodGraph, flags: &[Option<Flag>], u: usize, v: usize) -> TypeCode {
    let g = &og.good;
    let mut set: Vec<usize> = vec![u, v];
    set.extend_from_slice(g.centre_of(u));
    set.extend_from_slice(g.centre_of(v));
    set.sort_by_key(|&x| og.pos(x));
    set.dedup();
    let k = set.len();
    let mut rel = vec![vec![0u8; k]; k];
    for i in 0..k {
        for j in i + 1..k {
            let r = match g.edge_kind(set[i], set[j]) {
                None => 0,
                Some(crate::good::EdgeKind::Zero) => 1,
                Some(crate::good::EdgeKind::One) => 2,
            };
            rel[i][j] = r;
            rel[j][i] = r;
        }
    }
    PairConfig {
        flags: set.iter().map(|&x| flags[x]).collect(),
        u: set.iter().position(|&x| x == u).unwrap(),
        v: set.iter().position(|&x| x == v).unwrap(),
        rel,
    }
    .encode()
}

/// Type of the pair rooted in `(u, v)`.
pub fn pair_type(og: &OrderedGoodGraph, u: usize, v: usize) -> TypeCode {
    assert_ne!(u, v);
    pair_type_with(og, &l1_flags(og), u, v)
}

/// The full lift: flags plus the type of every pair `u < v`.
pub fn lift_l2(og: &OrderedGoodGraph) -> LiftedStructure {
    let mut a = base_structure(og);
    let order = og.order();
    for i in 0..order.len() {
        for j in i + 1..order.len() {
            let (u, v) = (order[i], order[j]);
            a.types.insert((u, v), pair_type_with(og, &a.unary, u, v));
        }
    }
    a
}

/// `lift_l2(og).restrict(vertices)`, computing only the pair types needed.
pub fn lift_l2_restricted(og: &OrderedGoodGraph, vertices: &[usize]) -> LiftedStructure {
    let flags = l1_flags(og);
    let mut keep = vertices.to_vec();
    keep.sort_unstable();
    keep.dedup();
    let mut by_pos = keep.clone();
    by_pos.sort_by_key(|&v| og.pos(v));
    let mut a = LiftedStructure {
        n: og.n(),
        order: og.order().to_vec(),
        unary: flags.clone(),
        e0: og.good.e0.clone(),
        e1: og.good.e1.clone(),
        types: BTreeMap::new(),
    };
    for i in 0..by_pos.len() {
        for j in i + 1..by_pos.len() {
            let (u, v) = (by_pos[i], by_pos[j]);
            a.types.insert((u, v), pair_type_with(og, &flags, u, v));
        }
    }
    a.restrict(&keep)
}

/// Forgets flags and types; the result carries the order.
pub fn shadow(a: &LiftedStructure) -> Graph {
    let mut g = Graph::new(a.n, a.e0.iter().chain(&a.e1).copied()).expect("edge sets are disjoint");
    g.set_order(a.order.clone()).expect("order is a permutation");
    g
}

/// A lift with the R, K2, K3 and K4 vertices removed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ReducedStructure(pub LiftedStructure);

impl std::ops::Deref for ReducedStructure {
    type Target = LiftedStructure;
    fn deref(&self) -> &LiftedStructure {
        &self.0
    }
}

impl fmt::Display for Flag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Deletes every vertex flagged R, K2, K3 or K4; survivors keep their relative order.
pub fn reduce(a: &LiftedStructure) -> ReducedStructure {
    let keep: Vec<usize> = (0..a.n).filter(|&v| a.unary[v].map_or(true, Flag::is_kept)).collect();
    ReducedStructure(a.restrict(&keep))
}

#[derive(Debug, Error)]
pub enum UnreduceError {
    #[error("structure is not the reduction of a good lift: {0}")]
    NotReduced(String),
    #[error(transparent)]
    Membership(#[from] crate::membership::MembershipError),
}

/// Restores the deleted centre vertices and all their relations.
///
/// Vertices of `r` keep their ids; restored vertices are appended.
pub fn unreduce(r: &ReducedStructure) -> Result<LiftedStructure, UnreduceError> {
    if let Some(v) = (0..r.n).find(|&v| r.unary[v].is_some_and(|f| !f.is_kept())) {
        return Err(UnreduceError::NotReduced(format!("vertex {v} carries a deleted flag")));
    }
    match crate::membership::reconstruct_witness(&r.0)? {
        Ok(w) => {
            let keep: Vec<usize> = (0..w.graph.n()).filter(|v| !w.fillers.contains(v)).collect();
            Ok(lift_l2_restricted(&w.graph, &keep))
        }
        Err(obstruction) => Err(UnreduceError::NotReduced(obstruction.to_string())),
    }
}
