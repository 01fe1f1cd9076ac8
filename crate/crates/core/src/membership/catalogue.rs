//! Catalogue of realizable complete structures on at most three vertices.
//!
//! Built generatively: every way of giving 1-3 roots centres, every
//! triangle-free pattern of type-1 edges between distinct centres, every
//! admissible order; the lift restricted to the roots is recorded. Forbidden
//! small structures are exactly those absent from the catalogue.
//!
//! The number of type-1 edges joining the centre vertices of two distinct
//! centres is bounded by `max_centre_e1`; the catalogue is exact for
//! structures whose pair types all respect the bound.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::MembershipError;
use crate::good::decompose;
use crate::graph::{Edge, Graph};
use crate::lifting::{lift_l2_restricted, LiftedStructure, OrderedGoodGraph, TypeCode};

pub const CATALOGUE_VERSION: u32 = 1;

/// Bound used unless configured otherwise; larger bounds grow the build
/// time by orders of magnitude.
pub const DEFAULT_MAX_CENTRE_E1: usize = 0;

/// Realizable small structures, keyed by their canonical codes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeCatalogue {
    pub max_centre_e1: usize,
    /// `t_{i+1} = types[i]`, sorted.
    pub types: Vec<TypeCode>,
    /// `realizable[k - 1]` holds codes of realizable structures on `k` vertices.
    pub realizable: [BTreeSet<Vec<u8>>; 3],
}

#[derive(Debug, Error)]
pub enum CatalogueError {
    #[error("unsupported catalogue version {0}")]
    Version(u32),
    #[error("bad hex in catalogue: {0}")]
    Hex(#[from] hex::FromHexError),
    #[error("type indices must be 1..=N in order")]
    Index,
}

#[derive(Serialize, Deserialize)]
struct CatalogueJson {
    version: u32,
    max_centre_e1: usize,
    types: Vec<(usize, String)>,
    realizable1: Vec<String>,
    realizable2: Vec<String>,
    realizable3: Vec<String>,
}

impl Serialize for TypeCatalogue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let hexes = |set: &BTreeSet<Vec<u8>>| set.iter().map(hex::encode).collect();
        CatalogueJson {
            version: CATALOGUE_VERSION,
            max_centre_e1: self.max_centre_e1,
            types: self.types.iter().enumerate().map(|(i, t)| (i + 1, t.to_string())).collect(),
            realizable1: hexes(&self.realizable[0]),
            realizable2: hexes(&self.realizable[1]),
            realizable3: hexes(&self.realizable[2]),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TypeCatalogue {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = CatalogueJson::deserialize(d)?;
        TypeCatalogue::from_json(j).map_err(serde::de::Error::custom)
    }
}

impl TypeCatalogue {
    fn from_json(j: CatalogueJson) -> Result<Self, CatalogueError> {
        if j.version != CATALOGUE_VERSION {
            return Err(CatalogueError::Version(j.version));
        }
        let mut types = Vec::with_capacity(j.types.len());
        for (i, (idx, h)) in j.types.into_iter().enumerate() {
            if idx != i + 1 {
                return Err(CatalogueError::Index);
            }
            types.push(TypeCode(hex::decode(h)?));
        }
        let set = |v: Vec<String>| -> Result<BTreeSet<Vec<u8>>, CatalogueError> {
            v.into_iter().map(|h| hex::decode(h).map_err(CatalogueError::from)).collect()
        };
        Ok(TypeCatalogue {
            max_centre_e1: j.max_centre_e1,
            types,
            realizable: [set(j.realizable1)?, set(j.realizable2)?, set(j.realizable3)?],
        })
    }

    /// 1-based index `i` of `t_i`.
    pub fn type_index(&self, code: &TypeCode) -> Option<usize> {
        self.types.binary_search(code).ok().map(|i| i + 1)
    }

    pub fn is_realizable(&self, small: &LiftedStructure) -> bool {
        let k = small.n;
        (1..=3).contains(&k) && self.realizable[k - 1].contains(&small.canonical_code().0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Role {
    Centre(usize),
    Apex,
}

/// A root placement: per class its kind (true = K4) and per root its class and role.
#[derive(Debug, Clone)]
struct Placement {
    k4: Vec<bool>,
    roots: Vec<(usize, Role)>,
}

/// Set partitions of `0..r` as restricted growth strings.
fn set_partitions(r: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, r: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        let next = cur.iter().max().map_or(0, |m| m + 1);
        for c in 0..=next {
            cur.push(c);
            rec(cur, r, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), r, &mut out);
    out
}

fn placements(r: usize) -> Vec<Placement> {
    let mut out = Vec::new();
    for part in set_partitions(r) {
        let classes = part.iter().max().map_or(0, |m| m + 1);
        for kinds in 0..(1usize << classes) {
            let k4: Vec<bool> = (0..classes).map(|c| kinds >> c & 1 == 1).collect();
            // Central roots of a class take centre vertices 0, 1, ... in turn;
            // all orders of the centre are enumerated later.
            let mut choices: Vec<Vec<Role>> = Vec::new();
            for &c in &part {
                choices.push(if k4[c] { vec![Role::Centre(0)] } else { vec![Role::Centre(0), Role::Apex] });
            }
            let combos = choices.iter().fold(vec![Vec::new()], |acc, opts| {
                acc.into_iter()
                    .flat_map(|p: Vec<Role>| {
                        opts.iter().map(move |&o| {
                            let mut q = p.clone();
                            q.push(o);
                            q
                        })
                    })
                    .collect()
            });
            for roles in combos {
                let mut used = vec![0usize; classes];
                let mut roots = Vec::with_capacity(r);
                let mut ok = true;
                for (i, &c) in part.iter().enumerate() {
                    let role = match roles[i] {
                        Role::Centre(_) => {
                            used[c] += 1;
                            if used[c] > if k4[c] { 4 } else { 2 } {
                                ok = false;
                            }
                            Role::Centre(used[c] - 1)
                        }
                        Role::Apex => Role::Apex,
                    };
                    roots.push((c, role));
                }
                if ok {
                    out.push(Placement { k4: k4.clone(), roots });
                }
            }
        }
    }
    out
}

/// Graph skeleton of a placement.
struct Skeleton {
    base: Graph,
    /// Class of each vertex; fillers carry `usize::MAX`.
    class: Vec<usize>,
    central: Vec<bool>,
    roots: Vec<usize>,
    /// Per class: centre vertices and apex vertices (roots first, then fillers).
    centres: Vec<Vec<usize>>,
    apex_roots: Vec<Vec<usize>>,
    fillers: Vec<Vec<usize>>,
}

fn skeleton(p: &Placement) -> Skeleton {
    let classes = p.k4.len();
    let mut g = Graph::empty(0);
    let mut class = Vec::new();
    let mut central = Vec::new();
    let mut centres = Vec::new();
    for c in 0..classes {
        let size = if p.k4[c] { 4 } else { 2 };
        let start = g.add_vertices(size);
        for i in 0..size {
            for j in i + 1..size {
                g.add_edge(start + i, start + j);
            }
            class.push(c);
            central.push(true);
        }
        centres.push((start..start + size).collect::<Vec<_>>());
    }
    let mut apex_roots = vec![Vec::new(); classes];
    let mut roots = Vec::new();
    for &(c, role) in &p.roots {
        match role {
            Role::Centre(i) => roots.push(centres[c][i]),
            Role::Apex => {
                let v = g.add_vertices(1);
                g.add_edge(v, centres[c][0]);
                g.add_edge(v, centres[c][1]);
                class.push(c);
                central.push(false);
                apex_roots[c].push(v);
                roots.push(v);
            }
        }
    }
    let mut fillers = vec![Vec::new(); classes];
    for c in 0..classes {
        if p.k4[c] {
            continue;
        }
        for _ in apex_roots[c].len()..2 {
            let v = g.add_vertices(1);
            g.add_edge(v, centres[c][0]);
            g.add_edge(v, centres[c][1]);
            class.push(usize::MAX);
            central.push(false);
            fillers[c].push(v);
        }
    }
    Skeleton {
        base: g,
        class,
        central,
        roots,
        centres,
        apex_roots,
        fillers,
    }
}

/// All triangle-free type-1 edge sets between distinct classes.
fn e1_patterns(s: &Skeleton, max_centre_e1: usize) -> Vec<Vec<Edge>> {
    let n = s.base.n();
    let mut candidates = Vec::new();
    for p in 0..n {
        for q in p + 1..n {
            let (cp, cq) = (s.class[p], s.class[q]);
            if cp != usize::MAX && cq != usize::MAX && cp != cq {
                candidates.push((p, q));
            }
        }
    }
    let classes = s.centres.len();
    let mut out = Vec::new();
    let mut g = s.base.clone();
    let mut chosen = Vec::new();
    let mut budget = vec![vec![0usize; classes]; classes];
    #[allow(clippy::too_many_arguments)]
    fn rec(
        i: usize,
        cand: &[Edge],
        s: &Skeleton,
        cap: usize,
        g: &mut Graph,
        chosen: &mut Vec<Edge>,
        budget: &mut Vec<Vec<usize>>,
        out: &mut Vec<Vec<Edge>>,
    ) {
        if i == cand.len() {
            out.push(chosen.clone());
            return;
        }
        rec(i + 1, cand, s, cap, g, chosen, budget, out);
        let (p, q) = cand[i];
        let both_central = s.central[p] && s.central[q];
        let (cp, cq) = (s.class[p], s.class[q]);
        if both_central && budget[cp][cq] >= cap {
            return;
        }
        if g.neighbours(p).any(|w| g.has_edge(q, w)) {
            return;
        }
        g.add_edge(p, q);
        chosen.push((p, q));
        if both_central {
            budget[cp][cq] += 1;
        }
        rec(i + 1, cand, s, cap, g, chosen, budget, out);
        if both_central {
            budget[cp][cq] -= 1;
        }
        chosen.pop();
        g.remove_edge(p, q);
    }
    rec(0, &candidates, s, max_centre_e1, &mut g, &mut chosen, &mut budget, &mut out);
    out
}

/// Admissible orders of a skeleton; fillers stay last in their blocks, which
/// cannot change the lift restricted to the roots.
fn skeleton_orders(s: &Skeleton, k4: &[bool]) -> Vec<Vec<usize>> {
    let perms = crate::lifting::permutations;
    let chimneys: Vec<usize> = (0..k4.len()).filter(|&c| !k4[c]).collect();
    let k4s: Vec<usize> = (0..k4.len()).filter(|&c| k4[c]).collect();
    let mut out = Vec::new();
    let centre_perms: Vec<Vec<Vec<usize>>> = s.centres.iter().map(|c| perms(c)).collect();
    let apex_perms: Vec<Vec<Vec<usize>>> = s.apex_roots.iter().map(|a| perms(a)).collect();
    for cp in perms(&chimneys) {
        for kp in perms(&k4s) {
            let seq: Vec<usize> = cp.iter().chain(&kp).copied().collect();
            let mut partial: Vec<(Vec<usize>, Vec<usize>)> = vec![(Vec::new(), Vec::new())];
            for &c in &seq {
                let mut next = Vec::new();
                for (centre, blocks) in &partial {
                    for cperm in &centre_perms[c] {
                        let aperms: &[Vec<usize>] = if k4[c] { &[vec![]] } else { &apex_perms[c] };
                        for aperm in aperms {
                            let mut ce = centre.clone();
                            ce.extend_from_slice(cperm);
                            let mut bl = blocks.clone();
                            if !k4[c] {
                                bl.extend_from_slice(aperm);
                                bl.extend_from_slice(&s.fillers[c]);
                            }
                            next.push((ce, bl));
                        }
                    }
                }
                partial = next;
            }
            out.extend(partial.into_iter().map(|(mut c, b)| {
                c.extend(b);
                c
            }));
        }
    }
    out
}

/// Enumerates realizable structures on 1-3 vertices.
pub fn build_catalogue(max_centre_e1: usize) -> TypeCatalogue {
    let mut realizable: [BTreeSet<Vec<u8>>; 3] = Default::default();
    let mut types: BTreeSet<TypeCode> = BTreeSet::new();
    for r in 1..=3 {
        let jobs: Vec<(Placement, Vec<Edge>)> = placements(r)
            .into_iter()
            .flat_map(|p| {
                let s = skeleton(&p);
                e1_patterns(&s, max_centre_e1).into_iter().map(move |e| (p.clone(), e))
            })
            .collect();
        let found: Vec<(BTreeSet<Vec<u8>>, BTreeSet<TypeCode>)> = jobs
            .par_iter()
            .map(|(p, extra)| {
                let s = skeleton(p);
                let mut g = s.base.clone();
                for &(u, v) in extra {
                    g.add_edge(u, v);
                }
                let good = decompose(&g).expect("skeletons are good");
                let mut codes = BTreeSet::new();
                let mut tys = BTreeSet::new();
                for order in skeleton_orders(&s, &p.k4) {
                    let og = OrderedGoodGraph::new(good.clone(), order).expect("enumerated orders are admissible");
                    let small = lift_l2_restricted(&og, &s.roots);
                    if r == 2 {
                        tys.extend(small.types.values().cloned());
                    }
                    codes.insert(small.canonical_code().0);
                }
                (codes, tys)
            })
            .collect();
        for (codes, tys) in found {
            realizable[r - 1].extend(codes);
            types.extend(tys);
        }
    }
    TypeCatalogue {
        max_centre_e1,
        types: types.into_iter().collect(),
        realizable,
    }
}

/// Looks up every induced substructure on 1-3 vertices. Returns the first
/// unrealizable vertex set (by size, then lexicographically by position).
pub fn check_small(a: &LiftedStructure, cat: &TypeCatalogue) -> Result<Option<Vec<usize>>, MembershipError> {
    if !a.is_complete() {
        return Err(MembershipError::Incomplete(format!(
            "{} of {} pairs typed",
            a.types.len(),
            a.n * a.n.saturating_sub(1) / 2
        )));
    }
    Ok(first_unrealizable(a, cat))
}

/// Membership in the class of structures with no forbidden complete
/// substructure: like [`check_small`], but substructures with an untyped
/// pair are skipped.
pub fn check_small_partial(a: &LiftedStructure, cat: &TypeCatalogue) -> Option<Vec<usize>> {
    first_unrealizable(a, cat)
}

fn first_unrealizable(a: &LiftedStructure, cat: &TypeCatalogue) -> Option<Vec<usize>> {
    let n = a.n;
    let o = &a.order;
    let check = |vs: &[usize]| -> Option<Vec<usize>> {
        let mut vs = vs.to_vec();
        vs.sort_unstable();
        let small = a.restrict(&vs);
        (small.is_complete() && !cat.is_realizable(&small)).then_some(vs)
    };
    for i in 0..n {
        if let Some(v) = check(&[o[i]]) {
            return Some(v);
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if a.type_of(o[i], o[j]).is_none() {
                continue;
            }
            if let Some(v) = check(&[o[i], o[j]]) {
                return Some(v);
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if a.type_of(o[i], o[j]).is_none() {
                continue;
            }
            for k in j + 1..n {
                if let Some(v) = check(&[o[i], o[j], o[k]]) {
                    return Some(v);
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;
    use std::sync::OnceLock;

    use super::*;
    use crate::graph::edge;
    use crate::lifting::{all_admissible_orders, lift_l2, some_admissible_order, PairConfig};
    use crate::membership::assemble::{assemble, Mode};

    fn cat() -> &'static TypeCatalogue {
        static CAT: OnceLock<TypeCatalogue> = OnceLock::new();
        CAT.get_or_init(|| build_catalogue(DEFAULT_MAX_CENTRE_E1))
    }

    /// Pair types read directly off lifts of every good graph with at most two
    /// components from {C2, K4}, every triangle-free set of type-1 edges not
    /// joining two centre vertices, and every admissible order.
    fn oracle_pair_types() -> BTreeSet<TypeCode> {
        let c2 = Graph::chimney(2);
        let k4 = Graph::complete(4);
        let bases = [
            c2.clone(),
            k4.clone(),
            c2.disjoint_union(&c2),
            c2.disjoint_union(&k4),
            k4.disjoint_union(&c2),
            k4.disjoint_union(&k4),
        ];
        let mut out = BTreeSet::new();
        for base in bases {
            let good = decompose(&base).unwrap();
            let n = base.n();
            let cand: Vec<Edge> = (0..n)
                .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
                .filter(|&(p, q)| {
                    good.component_of(p) != good.component_of(q) && !(good.is_central(p) && good.is_central(q))
                })
                .collect();
            for mask in 0u32..(1 << cand.len()) {
                let mut g = base.clone();
                let mut ok = true;
                for (i, &(p, q)) in cand.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        if g.neighbours(p).any(|w| g.has_edge(q, w)) {
                            ok = false;
                            break;
                        }
                        g.add_edge(p, q);
                    }
                }
                if !ok {
                    continue;
                }
                let gg = decompose(&g).unwrap();
                for order in all_admissible_orders(&gg) {
                    let a = lift_l2(&OrderedGoodGraph::new(gg.clone(), order).unwrap());
                    out.extend(a.types.values().cloned());
                }
            }
        }
        out
    }

    #[test]
    fn pair_types_match_direct_lifts() {
        let oracle = oracle_pair_types();
        let types: BTreeSet<TypeCode> = cat().types.iter().cloned().collect();
        assert_eq!(types, oracle);
        assert_eq!(types.len(), 80);
        assert!(types.len() < (1usize << 25) * 25);
    }

    #[test]
    fn frozen_counts() {
        let c = cat();
        assert_eq!(c.max_centre_e1, 0);
        assert_eq!(c.realizable.each_ref().map(|s| s.len()), [7, 80, 3745]);
        for (i, t) in c.types.iter().enumerate() {
            assert_eq!(c.type_index(t), Some(i + 1));
        }
    }

    /// Every flag-consistent triple of catalogue pair types on positions
    /// 0 < 1 < 2, decided by the assembler.
    #[test]
    fn triples_agree_with_assembler() {
        let c = cat();
        let cfgs: Vec<(TypeCode, PairConfig)> =
            c.types.iter().map(|t| (t.clone(), PairConfig::decode(t).unwrap())).collect();
        let roots = |p: &PairConfig| (p.flags[p.u], p.flags[p.v], p.rel[p.u][p.v]);
        let mut accepted = BTreeSet::new();
        for (t01, p01) in &cfgs {
            let (f0, f1, r01) = roots(p01);
            for (t02, p02) in &cfgs {
                let (g0, f2, r02) = roots(p02);
                if g0 != f0 {
                    continue;
                }
                for (t12, p12) in &cfgs {
                    let (g1, g2, r12) = roots(p12);
                    if g1 != f1 || g2 != f2 {
                        continue;
                    }
                    let mut a = LiftedStructure {
                        n: 3,
                        order: vec![0, 1, 2],
                        unary: vec![f0, f1, f2],
                        e0: BTreeSet::new(),
                        e1: BTreeSet::new(),
                        types: BTreeMap::from([((0, 1), t01.clone()), ((0, 2), t02.clone()), ((1, 2), t12.clone())]),
                    };
                    for ((u, v), r) in [((0, 1), r01), ((0, 2), r02), ((1, 2), r12)] {
                        match r {
                            1 => a.e0.insert(edge(u, v)),
                            2 => a.e1.insert(edge(u, v)),
                            _ => false,
                        };
                    }
                    if assemble(&a, Mode::Strict).is_ok() {
                        accepted.insert(a.canonical_code().0);
                    }
                }
            }
        }
        assert_eq!(accepted, c.realizable[2]);
    }

    #[test]
    fn apexes_joined_by_type_one_edge_are_absent() {
        let mut a = lift_l2(&some_admissible_order(&decompose(&Graph::chimney(2)).unwrap())).restrict(&[2, 3]);
        assert!(cat().is_realizable(&a));
        a.e1.insert((0, 1));
        assert!(!cat().is_realizable(&a));
        assert_eq!(check_small(&a, cat()).unwrap(), Some(vec![0, 1]));
    }

    #[test]
    fn lifts_pass_check_small() {
        for seed in 0..6 {
            let a = crate::amalgam::generic_sample(6, seed, 30).unwrap();
            assert_eq!(check_small(&a, cat()).unwrap(), None);
        }
    }

    #[test]
    fn json_roundtrip() {
        let c = cat();
        let s = serde_json::to_string(c).unwrap();
        let back: TypeCatalogue = serde_json::from_str(&s).unwrap();
        assert_eq!(&back, c);
    }
}
