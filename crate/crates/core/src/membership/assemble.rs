//! Witness assembly from pair types.
//!
//! Every typed pair contributes its configuration: centre identities, edges
//! and order between the vertices of `{u, v} ∪ c(u) ∪ c(v)`. Missing centre
//! vertices are created once per centre class; the collected facts must agree,
//! be acyclic on the order, and close no triangle through a type-1 edge.
//! Chimneys left with fewer than two apexes get filler apexes placed last in
//! their block.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::good::decompose;
use crate::graph::{edge, Edge, Graph};
use crate::lifting::{lift_l2, Flag, LiftedStructure, OrderedGoodGraph, PairConfig, PairShape};

/// Failure cases of the pair-by-pair reconstruction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureCase {
    /// The centre already built for `u` conflicts with the one the type requires.
    Case1,
    /// Same for `v`.
    Case2,
    /// `u` and `v` are joined, flagged or ordered differently than the type requires.
    Case3,
    /// Edges or order between already built centre parts disagree.
    Case4,
    /// A type-1 edge of the assembled graph lies in a triangle.
    Triangle,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub case: FailureCase,
    pub vertices: Vec<usize>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AssemblyError {
    Failure(Failure),
    Precondition(String),
    Internal(String),
}

fn fail(case: FailureCase, mut vertices: Vec<usize>, detail: impl Into<String>) -> AssemblyError {
    vertices.sort_unstable();
    vertices.dedup();
    AssemblyError::Failure(Failure {
        case,
        vertices,
        detail: detail.into(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Every pair typed; the input must be induced by the witness lift.
    Strict,
    /// Untyped pairs allowed; they receive the type the witness induces.
    Complete,
}

#[derive(Debug, Clone)]
pub struct Assembly {
    pub witness: OrderedGoodGraph,
    pub fillers: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Kind {
    Chimney,
    K4,
}

#[derive(Debug, Clone)]
struct ClassData {
    kind: Kind,
    slots: [Option<usize>; 4],
    apexes: Vec<usize>,
}

struct Classes {
    parent: Vec<usize>,
    data: Vec<Option<ClassData>>,
}

impl Classes {
    fn new(unary: &[Option<Flag>]) -> Self {
        let data = unary
            .iter()
            .enumerate()
            .map(|(v, f)| {
                let mut slots = [None; 4];
                let (kind, apexes) = match f {
                    None => (Kind::Chimney, vec![v]),
                    Some(f) => {
                        slots[f.slot()] = Some(v);
                        (if f.is_k4() { Kind::K4 } else { Kind::Chimney }, Vec::new())
                    }
                };
                Some(ClassData { kind, slots, apexes })
            })
            .collect();
        Classes {
            parent: (0..unary.len()).collect(),
            data,
        }
    }

    fn find(&mut self, v: usize) -> usize {
        let mut r = v;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut x = v;
        while self.parent[x] != r {
            let next = self.parent[x];
            self.parent[x] = r;
            x = next;
        }
        r
    }

    fn union(&mut self, x: usize, y: usize) -> Result<(), String> {
        let (rx, ry) = (self.find(x), self.find(y));
        if rx == ry {
            return Ok(());
        }
        let (keep, gone) = (rx.min(ry), rx.max(ry));
        let a = self.data[keep].as_ref().unwrap();
        let b = self.data[gone].as_ref().unwrap();
        if a.kind != b.kind {
            return Err(format!("centre of {x} would be both a chimney centre and a K4"));
        }
        if a.kind == Kind::K4 && !(a.apexes.is_empty() && b.apexes.is_empty()) {
            return Err(format!("centre of {x} is a K4 but has a non-central vertex"));
        }
        let mut merged = a.clone();
        for s in 0..4 {
            match (merged.slots[s], b.slots[s]) {
                (Some(p), Some(q)) => {
                    return Err(format!("vertices {p} and {q} claim the same place in one centre"));
                }
                (None, q) => merged.slots[s] = q,
                _ => {}
            }
        }
        merged.apexes.extend_from_slice(&b.apexes);
        self.data[keep] = Some(merged);
        self.data[gone] = None;
        self.parent[gone] = keep;
        Ok(())
    }
}

/// Fact store with provenance (the input pair that asserted the fact).
#[derive(Default)]
struct Facts {
    rel: BTreeMap<Edge, (u8, (usize, usize))>,
    before: BTreeMap<(usize, usize), (usize, usize)>,
}

impl Facts {
    fn relation(&mut self, w1: usize, w2: usize, r: u8, src: (usize, usize)) -> Result<(), AssemblyError> {
        let e = edge(w1, w2);
        match self.rel.get(&e) {
            Some(&(r0, s0)) if r0 != r => Err(fail(
                FailureCase::Case4,
                vec![src.0, src.1, s0.0, s0.1],
                format!("pair {e:?} is asserted as relation {r0} and as relation {r}"),
            )),
            Some(_) => Ok(()),
            None => {
                self.rel.insert(e, (r, src));
                Ok(())
            }
        }
    }

    fn precedes(&mut self, w1: usize, w2: usize, src: (usize, usize)) -> Result<(), AssemblyError> {
        if let Some(&s0) = self.before.get(&(w2, w1)) {
            return Err(fail(
                FailureCase::Case4,
                vec![src.0, src.1, s0.0, s0.1],
                format!("vertices {w1} and {w2} are ordered both ways"),
            ));
        }
        self.before.entry((w1, w2)).or_insert(src);
        Ok(())
    }
}

struct Class {
    kind: Kind,
    slots: Vec<usize>,
    apexes: Vec<usize>,
    key: usize,
}

/// Builds a witness for `a`; in [`Mode::Complete`] untyped pairs are filled in.
pub fn assemble(a: &LiftedStructure, mode: Mode) -> Result<Assembly, AssemblyError> {
    use FailureCase::*;
    let n = a.n;
    let pos = a.positions();

    // Decode and check every typed pair, lexicographically by position.
    let mut typed: Vec<(usize, usize, PairConfig, PairShape)> = Vec::new();
    let mut described = vec![false; n];
    for i in 0..n {
        for j in i + 1..n {
            let (x, y) = (a.order[i], a.order[j]);
            let Some(code) = a.types.get(&(x, y)) else {
                if mode == Mode::Strict {
                    return Err(AssemblyError::Precondition(format!("pair ({x}, {y}) is untyped")));
                }
                continue;
            };
            let cfg = PairConfig::decode(code).ok_or_else(|| fail(Case3, vec![x, y], "type code is malformed"))?;
            let shape = cfg
                .validate()
                .map_err(|e| fail(Case3, vec![x, y], format!("type is not realizable: {e}")))?;
            if cfg.flags[cfg.u] != a.unary[x] || cfg.flags[cfg.v] != a.unary[y] {
                return Err(fail(Case3, vec![x, y], "unary flags differ from the type"));
            }
            if cfg.rel[cfg.u][cfg.v] != a.relation(x, y) {
                return Err(fail(Case3, vec![x, y], "u and v are joined differently than the type requires"));
            }
            described[x] = true;
            described[y] = true;
            typed.push((x, y, cfg, shape));
        }
    }

    // Centre classes.
    let mut classes = Classes::new(&a.unary);
    for (x, y, _, shape) in &typed {
        if shape.same_centre() {
            classes.union(*x, *y).map_err(|e| fail(Case1, vec![*x, *y], e))?;
        }
    }
    for &(x, y) in &a.e0 {
        if a.unary[x].is_none() && a.unary[y].is_none() {
            return Err(fail(Case3, vec![x, y], "two non-central vertices joined by a type-0 edge"));
        }
        described[x] = true;
        described[y] = true;
        classes.union(x, y).map_err(|e| fail(Case1, vec![x, y], e))?;
    }
    for (x, y, _, shape) in &typed {
        if !shape.same_centre() && classes.find(*x) == classes.find(*y) {
            return Err(fail(Case2, vec![*x, *y], "type separates centres that other pairs identify"));
        }
    }
    if mode == Mode::Complete {
        if let Some(x) = (0..n).find(|&x| a.unary[x].is_none() && !described[x]) {
            return Err(AssemblyError::Precondition(format!(
                "vertex {x} has no centre information"
            )));
        }
    }

    // Materialise classes in order of first appearance; add missing centre vertices.
    let mut class_of = vec![usize::MAX; n];
    let mut roots: Vec<usize> = Vec::new();
    let mut list: Vec<Class> = Vec::new();
    let mut flags_w: Vec<Option<Flag>> = a.unary.clone();
    let mut rep: Vec<usize> = (0..n).collect();
    for &x in &a.order {
        let r = classes.find(x);
        if let Some(ci) = roots.iter().position(|&q| q == r) {
            class_of[x] = ci;
            continue;
        }
        let data = classes.data[r].clone().unwrap();
        let size = if data.kind == Kind::K4 { 4 } else { 2 };
        let mut slots = Vec::with_capacity(size);
        for s in 0..size {
            slots.push(data.slots[s].unwrap_or_else(|| {
                let w = flags_w.len();
                flags_w.push(Some(if data.kind == Kind::K4 {
                    Flag::k4(s)
                } else if s == 0 {
                    Flag::L
                } else {
                    Flag::R
                }));
                rep.push(x);
                w
            }));
        }
        let central: Vec<usize> = slots.iter().copied().filter(|&w| w < n).map(|w| pos[w]).collect();
        let key = match central.iter().min() {
            Some(&p) => p,
            None => n + data.apexes.iter().map(|&v| pos[v]).min().unwrap(),
        };
        let mut apexes = data.apexes.clone();
        apexes.sort_by_key(|&v| pos[v]);
        class_of[x] = list.len();
        roots.push(r);
        list.push(Class {
            kind: data.kind,
            slots,
            apexes,
            key,
        });
    }
    let n_w = flags_w.len();

    // Facts.
    let mut facts = Facts::default();
    for c in &list {
        let src = (rep[c.slots[0]], rep[c.slots[0]]);
        for (i, &p) in c.slots.iter().enumerate() {
            for &q in &c.slots[i + 1..] {
                facts.relation(p, q, 1, src)?;
                facts.precedes(p, q, src)?;
            }
            for &x in &c.apexes {
                facts.relation(p, x, 1, (x, x))?;
                facts.precedes(p, x, (x, x))?;
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let (x, y) = (a.order[i], a.order[j]);
            facts.relation(x, y, a.relation(x, y), (x, y))?;
            if mode == Mode::Strict {
                facts.precedes(x, y, (x, y))?;
            }
        }
    }
    for (x, y, cfg, shape) in &typed {
        let (cx, cy) = (class_of[*x], class_of[*y]);
        let map: Vec<usize> = (0..cfg.k())
            .map(|p| {
                if p == cfg.u {
                    *x
                } else if p == cfg.v {
                    *y
                } else {
                    let slot = cfg.flags[p].expect("non-root vertices are central").slot();
                    let c = if shape.cu.contains(&p) { cx } else { cy };
                    list[c].slots[slot]
                }
            })
            .collect();
        for i in 0..cfg.k() {
            for j in i + 1..cfg.k() {
                if map[i] == map[j] {
                    return Err(fail(Case4, vec![*x, *y], "type places two of its vertices on one vertex"));
                }
                facts.relation(map[i], map[j], cfg.rel[i][j], (*x, *y))?;
                facts.precedes(map[i], map[j], (*x, *y))?;
            }
        }
    }

    // Type-0 edges must be structural.
    let mut structural: BTreeSet<Edge> = BTreeSet::new();
    for c in &list {
        for (i, &p) in c.slots.iter().enumerate() {
            for &q in &c.slots[i + 1..] {
                structural.insert(edge(p, q));
            }
            for &x in &c.apexes {
                structural.insert(edge(p, x));
            }
        }
    }
    for (&e, &(r, src)) in &facts.rel {
        if r == 1 && !structural.contains(&e) {
            return Err(fail(Case4, vec![src.0, src.1], format!("type-0 edge {e:?} outside any centre")));
        }
    }

    // Order: topological sort of the precedence facts, ties broken towards
    // an admissible order.
    let key = |w: usize| -> (u8, Kind, usize, usize) {
        let c = &list[class_of[rep[w]]];
        match flags_w[w] {
            Some(f) => (0, c.kind, c.key, f.slot()),
            None => (1, Kind::Chimney, c.key, pos[w]),
        }
    };
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n_w];
    let mut indeg = vec![0usize; n_w];
    for &(p, q) in facts.before.keys() {
        succ[p].push(q);
        indeg[q] += 1;
    }
    let mut ready: BTreeSet<((u8, Kind, usize, usize), usize)> =
        (0..n_w).filter(|&w| indeg[w] == 0).map(|w| (key(w), w)).collect();
    let mut topo = Vec::with_capacity(n_w);
    while let Some(first) = ready.pop_first() {
        let w = first.1;
        topo.push(w);
        for &q in &succ[w] {
            indeg[q] -= 1;
            if indeg[q] == 0 {
                ready.insert((key(q), q));
            }
        }
    }
    if topo.len() < n_w {
        let stuck: BTreeSet<usize> = (0..n_w).filter(|&w| indeg[w] > 0).collect();
        let mut involved = Vec::new();
        for (&(p, q), &src) in &facts.before {
            if stuck.contains(&p) && stuck.contains(&q) {
                involved.extend([src.0, src.1]);
            }
        }
        return Err(fail(Case4, involved, "order requirements form a cycle"));
    }

    // Central vertices as sorted; apex blocks regrouped by centre, fillers last.
    let mut topo_pos = vec![0; n_w];
    for (i, &w) in topo.iter().enumerate() {
        topo_pos[w] = i;
    }
    let mut order: Vec<usize> = topo.iter().copied().filter(|&w| flags_w[w].is_some()).collect();
    let mut by_centre: Vec<usize> = (0..list.len()).filter(|&c| list[c].kind == Kind::Chimney).collect();
    by_centre.sort_by_key(|&c| topo_pos[list[c].slots[0]]);
    let mut fillers = Vec::new();
    let mut total = n_w;
    let mut filler_edges = Vec::new();
    for &c in &by_centre {
        let mut apexes = list[c].apexes.clone();
        apexes.sort_by_key(|&w| topo_pos[w]);
        order.extend_from_slice(&apexes);
        for _ in apexes.len()..2 {
            fillers.push(total);
            order.push(total);
            filler_edges.push((total, list[c].slots[0]));
            filler_edges.push((total, list[c].slots[1]));
            total += 1;
        }
    }
    let mut final_pos = vec![0; total];
    for (i, &w) in order.iter().enumerate() {
        final_pos[w] = i;
    }
    for (&(p, q), &src) in &facts.before {
        if final_pos[p] > final_pos[q] {
            return Err(fail(
                Case4,
                vec![src.0, src.1],
                format!("vertex {p} must precede {q} but the centres dictate otherwise"),
            ));
        }
    }

    // Graph and the type-1 triangle check.
    let mut g = Graph::empty(total);
    for (&(p, q), &(r, _)) in &facts.rel {
        if r != 0 {
            g.add_edge(p, q);
        }
    }
    for &(p, q) in &filler_edges {
        g.add_edge(p, q);
    }
    for (&(p, q), &(r, _)) in &facts.rel {
        if r != 2 {
            continue;
        }
        if let Some(w) = g.neighbours(p).find(|&w| w != q && g.has_edge(q, w)) {
            return Err(fail(
                Triangle,
                vec![rep[p], rep[q], rep[w]],
                format!("type-1 edge ({p}, {q}) closes a triangle with {w}"),
            ));
        }
    }

    let good = decompose(&g).map_err(|e| AssemblyError::Internal(format!("assembled graph is not good: {e}")))?;
    let expected_e0: BTreeSet<Edge> = structural.into_iter().chain(filler_edges.iter().map(|&(p, q)| edge(p, q))).collect();
    if good.e0 != expected_e0 {
        return Err(AssemblyError::Internal("type-0 edges of the witness differ from its centres".into()));
    }
    let witness = OrderedGoodGraph::new(good, order)
        .map_err(|e| AssemblyError::Internal(format!("assembled order is not admissible: {e}")))?;

    let lifted = lift_l2(&witness).restrict(&(0..n).collect::<Vec<_>>());
    match mode {
        Mode::Strict => {
            if lifted != *a {
                return Err(AssemblyError::Internal("witness lift does not induce the input".into()));
            }
        }
        Mode::Complete => {
            if lifted.unary != a.unary || lifted.e0 != a.e0 || lifted.e1 != a.e1 {
                return Err(AssemblyError::Internal("completion changed the graph data".into()));
            }
            for (&(x, y), code) in &a.types {
                if lifted.type_of(x, y) != Some(code) {
                    return Err(fail(Case4, vec![x, y], "given type disagrees with the completed centres"));
                }
            }
        }
    }
    Ok(Assembly { witness, fillers })
}
