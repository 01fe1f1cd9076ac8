//! Free amalgamation over centres, amalgamation of lifts, and a seeded
//! sampler of finite good lifts.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::good::{decompose, Component, GoodError, GoodGraph};
use crate::graph::{edge, Graph};
use crate::lifting::{l1_flags, lift_l2, lift_l2_restricted, LiftedStructure, OrderedGoodGraph};
use crate::membership::{reconstruct_witness, MembershipError, Obstruction, DEFAULT_MAX_CENTRE_E1};

#[derive(Debug, Error)]
pub enum AmalgamError {
    #[error("not a centre isomorphism: {0}")]
    NotCentreIsomorphism(String),
    #[error("not an embedding: {0}")]
    NotEmbedding(String),
    #[error("input is not a member: {0}")]
    NotMember(Obstruction),
    #[error(transparent)]
    Membership(#[from] MembershipError),
    #[error("amalgam is not good: {0}")]
    NotGood(#[from] GoodError),
}

/// Result of gluing `g2` onto `g1`: vertex `y` of `g2` is `right[y]`;
/// vertices of `g1` keep their ids.
#[derive(Debug, Clone, Serialize)]
pub struct CentreAmalgam {
    pub graph: GoodGraph,
    pub right: Vec<usize>,
}

fn glue(n1: usize, n2: usize, pairs: &BTreeMap<usize, usize>) -> Vec<usize> {
    let mut right = vec![usize::MAX; n2];
    let mut next = n1;
    for (y, slot) in right.iter_mut().enumerate() {
        *slot = match pairs.get(&y) {
            Some(&x) => x,
            None => {
                next += 1;
                next - 1
            }
        };
    }
    right
}

/// Free amalgam of `g1` and `g2` identifying `x` with `y` for each `(x, y)`
/// in `f`. The domain and image of `f` must be unions of whole vertex-centres,
/// matched centre to centre, with adjacency preserved.
pub fn amalgamate_centres(g1: &GoodGraph, g2: &GoodGraph, f: &[(usize, usize)]) -> Result<CentreAmalgam, AmalgamError> {
    let bad = |s: String| AmalgamError::NotCentreIsomorphism(s);
    let mut fwd = BTreeMap::new();
    let mut back = BTreeMap::new();
    for &(x, y) in f {
        if x >= g1.n() || y >= g2.n() {
            return Err(bad(format!("pair ({x}, {y}) out of range")));
        }
        if fwd.insert(x, y).is_some() || back.insert(y, x).is_some() {
            return Err(bad(format!("pair ({x}, {y}) repeats a vertex")));
        }
    }
    for (&x, &y) in &fwd {
        if !g1.is_central(x) || !g2.is_central(y) {
            return Err(bad(format!("{x} or {y} is not central")));
        }
        let (c1, c2) = (g1.component(x), g2.component(y));
        if c1.is_k4() != c2.is_k4() {
            return Err(bad(format!("{x} and {y} lie in centres of different kinds")));
        }
        let image: BTreeSet<usize> = c1.centre().iter().filter_map(|v| fwd.get(v).copied()).collect();
        if image != c2.centre().iter().copied().collect() {
            return Err(bad(format!("centre of {x} is not mapped onto the centre of {y}")));
        }
    }
    for (&x, &y) in &fwd {
        for (&x2, &y2) in &fwd {
            if x < x2 && g1.edge_kind(x, x2) != g2.edge_kind(y, y2) {
                return Err(bad(format!("adjacency of {x},{x2} differs from {y},{y2}")));
            }
        }
    }
    let right = glue(g1.n(), g2.n(), &back);
    let n = g1.n() + g2.n() - fwd.len();
    let mut g = Graph::empty(n);
    for &(u, v) in g1.graph.edges() {
        g.add_edge(u, v);
    }
    for &(u, v) in g2.graph.edges() {
        let (a, b) = (right[u], right[v]);
        if !g.has_edge(a, b) {
            g.add_edge(a, b);
        }
    }
    Ok(CentreAmalgam {
        graph: decompose(&g)?,
        right,
    })
}

/// Amalgam of two lifts over a common substructure.
#[derive(Debug, Clone, Serialize)]
pub struct LiftAmalgam {
    pub structure: LiftedStructure,
    /// Image of each vertex of `b1` and of `b2`.
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

fn check_embedding(a: &LiftedStructure, b: &LiftedStructure, e: &[usize]) -> Result<(), AmalgamError> {
    let bad = |s: String| AmalgamError::NotEmbedding(s);
    if e.len() != a.n || e.iter().any(|&v| v >= b.n) || e.iter().collect::<BTreeSet<_>>().len() != a.n {
        return Err(bad("map is not injective into the target".into()));
    }
    let mut image: Vec<usize> = e.to_vec();
    image.sort_unstable();
    let induced = b.restrict(&image);
    // `induced` numbers vertices by increasing id in `b`.
    let mut rank = BTreeMap::new();
    for (i, &v) in image.iter().enumerate() {
        rank.insert(v, i);
    }
    let perm: Vec<usize> = e.iter().map(|v| rank[v]).collect();
    let mut mapped = a.clone();
    mapped.order = a.order.iter().map(|&x| perm[x]).collect();
    let mut unary = vec![None; a.n];
    for x in 0..a.n {
        unary[perm[x]] = a.unary[x];
    }
    mapped.unary = unary;
    mapped.e0 = a.e0.iter().map(|&(u, v)| edge(perm[u], perm[v])).collect();
    mapped.e1 = a.e1.iter().map(|&(u, v)| edge(perm[u], perm[v])).collect();
    mapped.types = a.types.iter().map(|(&(u, v), c)| ((perm[u], perm[v]), c.clone())).collect();
    if mapped != induced {
        return Err(bad("substructure induced on the image differs".into()));
    }
    Ok(())
}

/// Merges chains (each a sequence of distinct items) into one linear order
/// respecting all of them; ties go to the smaller key.
fn merge_chains<K: Ord + Copy>(items: &[usize], chains: &[Vec<usize>], key: impl Fn(usize) -> K) -> Option<Vec<usize>> {
    let mut succ: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut indeg: BTreeMap<usize, usize> = items.iter().map(|&i| (i, 0)).collect();
    for c in chains {
        for w in c.windows(2) {
            succ.entry(w[0]).or_default().push(w[1]);
            *indeg.get_mut(&w[1])? += 1;
        }
    }
    let mut ready: BTreeSet<(K, usize)> = indeg.iter().filter(|(_, &d)| d == 0).map(|(&i, _)| (key(i), i)).collect();
    let mut out = Vec::with_capacity(items.len());
    while let Some((_, i)) = ready.pop_first() {
        out.push(i);
        for &j in succ.get(&i).map(Vec::as_slice).unwrap_or(&[]) {
            let d = indeg.get_mut(&j)?;
            *d -= 1;
            if *d == 0 {
                ready.insert((key(j), j));
            }
        }
    }
    (out.len() == items.len()).then_some(out)
}

/// Admissible order of `g` extending the orders of two glued ordered graphs.
/// `maps[s][v]` is the vertex of `g` representing vertex `v` of side `s`.
fn merged_order(g: &GoodGraph, sides: [&OrderedGoodGraph; 2], maps: [&[usize]; 2]) -> Option<Vec<usize>> {
    let comp_ids: Vec<usize> = (0..g.components.len()).collect();
    let mut first_seen = vec![(usize::MAX, usize::MAX); g.components.len()];
    let mut centre_chains = Vec::new();
    let mut vertex_rank = vec![(usize::MAX, usize::MAX); g.n()];
    for s in 0..2 {
        let mut chain: Vec<usize> = Vec::new();
        for (p, &v) in sides[s].order().iter().enumerate() {
            let w = maps[s][v];
            vertex_rank[w] = vertex_rank[w].min((s, p));
            if g.is_central(w) {
                let c = g.component_of(w);
                if chain.last() != Some(&c) {
                    chain.push(c);
                }
                first_seen[c] = first_seen[c].min((s, p));
            }
        }
        centre_chains.push(chain);
    }
    let centres = merge_chains(&comp_ids, &centre_chains, |c| (g.components[c].is_k4(), first_seen[c]))?;
    let mut order = Vec::with_capacity(g.n());
    for &c in &centres {
        let mut cv = g.components[c].centre().to_vec();
        cv.sort_by_key(|&w| vertex_rank[w]);
        order.extend(cv);
    }
    for &c in &centres {
        let apexes = g.components[c].apexes();
        if apexes.is_empty() {
            continue;
        }
        let set: BTreeSet<usize> = apexes.iter().copied().collect();
        let chains: Vec<Vec<usize>> = (0..2)
            .map(|s| {
                sides[s]
                    .order()
                    .iter()
                    .map(|&v| maps[s][v])
                    .filter(|w| set.contains(w))
                    .collect()
            })
            .collect();
        order.extend(merge_chains(apexes, &chains, |w| vertex_rank[w])?);
    }
    Some(order)
}

/// Amalgamates `b1` and `b2` over `a`, where `e1`, `e2` embed `a` into them.
///
/// Witnesses of `b1` and `b2` are glued over the images of `a` together with
/// their centres; the lift of the glued graph is restricted to the images of
/// `b1` and `b2`.
pub fn amalgamate_lifts(
    a: &LiftedStructure,
    b1: &LiftedStructure,
    b2: &LiftedStructure,
    e1: &[usize],
    e2: &[usize],
) -> Result<LiftAmalgam, AmalgamError> {
    check_embedding(a, b1, e1)?;
    check_embedding(a, b2, e2)?;
    let w1 = reconstruct_witness(b1)?.map_err(AmalgamError::NotMember)?;
    let w2 = reconstruct_witness(b2)?.map_err(AmalgamError::NotMember)?;
    let (g1, g2) = (&w1.graph, &w2.graph);
    let (f1, f2) = (l1_flags(g1), l1_flags(g2));
    // Identify a's images and their centres, slot by slot.
    let mut back: BTreeMap<usize, usize> = BTreeMap::new();
    let mut identify = |x: usize, y: usize| -> Result<(), AmalgamError> {
        match back.insert(y, x) {
            Some(prev) if prev != x => Err(AmalgamError::NotEmbedding(format!(
                "vertex {y} of the right witness glued to both {prev} and {x}"
            ))),
            _ => Ok(()),
        }
    };
    for x in 0..a.n {
        let (p, q) = (w1.embedding[e1[x]], w2.embedding[e2[x]]);
        identify(p, q)?;
        let c1 = g1.good.centre_of(p);
        for &r in g2.good.centre_of(q) {
            let partner = c1
                .iter()
                .copied()
                .find(|&s| f1[s] == f2[r])
                .ok_or_else(|| AmalgamError::NotEmbedding(format!("centre of {q} has no partner")))?;
            identify(partner, r)?;
        }
    }
    let right = glue(g1.n(), g2.n(), &back);
    let n = g1.n() + g2.n() - back.len();
    let mut g = Graph::empty(n);
    for &(u, v) in g1.good.graph.edges() {
        g.add_edge(u, v);
    }
    for &(u, v) in g2.good.graph.edges() {
        let (p, q) = (right[u], right[v]);
        if !g.has_edge(p, q) {
            g.add_edge(p, q);
        }
    }
    let good = decompose(&g)?;
    let identity: Vec<usize> = (0..g1.n()).collect();
    let order = merged_order(&good, [g1, g2], [&identity, &right])
        .ok_or_else(|| AmalgamError::NotEmbedding("orders of the two sides conflict".into()))?;
    let og = OrderedGoodGraph::new(good, order)
        .map_err(|e| AmalgamError::NotEmbedding(format!("merged order is not admissible: {e}")))?;

    let img1: Vec<usize> = (0..b1.n).map(|v| w1.embedding[v]).collect();
    let img2: Vec<usize> = (0..b2.n).map(|v| right[w2.embedding[v]]).collect();
    let mut keep: Vec<usize> = img1.iter().chain(&img2).copied().collect();
    keep.sort_unstable();
    keep.dedup();
    let rank: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    Ok(LiftAmalgam {
        structure: lift_l2_restricted(&og, &keep),
        left: img1.iter().map(|v| rank[v]).collect(),
        right: img2.iter().map(|v| rank[v]).collect(),
    })
}

/// [`generic_sample_with`] at the default catalogue bound.
pub fn generic_sample(steps: usize, seed: u64, size_cap: usize) -> Result<LiftedStructure, MembershipError> {
    generic_sample_with(steps, seed, size_cap, DEFAULT_MAX_CENTRE_E1)
}

/// Grows a random good ordered graph by `steps` one-vertex extensions (each
/// bringing whatever centre it needs) while the size stays within `size_cap`,
/// and returns its lift. At most `max_centre_e1` type-1 edges join the centre
/// vertices of any two centres, so the result lies where a catalogue built
/// with that bound is exact.
pub fn generic_sample_with(
    steps: usize,
    seed: u64,
    size_cap: usize,
    max_centre_e1: usize,
) -> Result<LiftedStructure, MembershipError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Graph::empty(0);
    let mut order: Vec<usize> = Vec::new();
    for _ in 0..steps {
        let Some((next, next_order)) = extend(&g, &order, &mut rng, size_cap, max_centre_e1) else {
            break;
        };
        g = next;
        order = next_order;
    }
    let good = decompose(&g).map_err(|e| MembershipError::Internal(e.to_string()))?;
    let og = OrderedGoodGraph::new(good, order).map_err(|e| MembershipError::Internal(e.to_string()))?;
    let lift = lift_l2(&og);
    match reconstruct_witness(&lift)? {
        Ok(_) => Ok(lift),
        Err(o) => Err(MembershipError::Internal(format!("sample is not a member: {o}"))),
    }
}

/// One random extension step; `None` if it would exceed the cap.
fn extend(g: &Graph, order: &[usize], rng: &mut ChaCha8Rng, cap: usize, max_centre_e1: usize) -> Option<(Graph, Vec<usize>)> {
    let current = if g.n() == 0 { None } else { decompose(g).ok() };
    let chimneys: Vec<Component> = current
        .as_ref()
        .map(|c| c.components.iter().filter(|c| !c.is_k4()).cloned().collect())
        .unwrap_or_default();
    let kind = if chimneys.is_empty() { rng.gen_range(1..3) } else { rng.gen_range(0..3) };
    let mut h = g.clone();
    h.clear_order();
    let (v, placement) = match kind {
        0 => {
            let c = chimneys.choose(rng).unwrap();
            let v = h.add_vertices(1);
            h.add_edge(v, c.centre()[0]);
            h.add_edge(v, c.centre()[1]);
            (v, Placement::Apex)
        }
        1 => {
            let s = h.add_vertices(4);
            h.add_edge(s, s + 1);
            for a in [s + 2, s + 3] {
                h.add_edge(a, s);
                h.add_edge(a, s + 1);
            }
            let v = s + rng.gen_range(0..4);
            (v, Placement::Chimney([s, s + 1], [s + 2, s + 3]))
        }
        _ => {
            let s = h.add_vertices(4);
            for i in 0..4 {
                for j in i + 1..4 {
                    h.add_edge(s + i, s + j);
                }
            }
            let v = s + rng.gen_range(0..4);
            (v, Placement::K4([s, s + 1, s + 2, s + 3]))
        }
    };
    if h.n() > cap {
        return None;
    }
    // Random type-1 edges from the distinguished new vertex to old vertices.
    let v_central = !matches!(placement, Placement::Apex) && (kind == 2 || v < g.n() + 2);
    let mut old: Vec<usize> = (0..g.n()).collect();
    old.shuffle(rng);
    let mut spent: BTreeMap<usize, usize> = BTreeMap::new();
    for w in old {
        if !rng.gen_bool(0.25) || h.has_edge(v, w) || h.neighbours(v).any(|x| h.has_edge(w, x)) {
            continue;
        }
        let cur = current.as_ref().expect("old vertices exist");
        if v_central && cur.is_central(w) {
            let used = spent.entry(cur.component_of(w)).or_insert(0);
            if *used >= max_centre_e1 {
                continue;
            }
            *used += 1;
        }
        h.add_edge(v, w);
    }
    let good = decompose(&h).ok()?;
    let new_order = insert_order(&good, order, &placement, rng)?;
    Some((h, new_order))
}

enum Placement {
    Apex,
    Chimney([usize; 2], [usize; 2]),
    K4([usize; 4]),
}

/// Inserts the new vertices into `order` at a random admissible place.
fn insert_order(g: &GoodGraph, order: &[usize], p: &Placement, rng: &mut ChaCha8Rng) -> Option<Vec<usize>> {
    let mut candidates: Vec<Vec<usize>> = Vec::new();
    let n_old = order.len();
    match p {
        Placement::Apex => {
            for i in 0..=n_old {
                let mut o = order.to_vec();
                o.insert(i, n_old);
                candidates.push(o);
            }
        }
        Placement::Chimney(c, a) => {
            for i in 0..=n_old {
                for j in i..=n_old {
                    let mut o = order[..i].to_vec();
                    o.extend_from_slice(c);
                    o.extend_from_slice(&order[i..j]);
                    o.extend_from_slice(a);
                    o.extend_from_slice(&order[j..]);
                    candidates.push(o);
                }
            }
        }
        Placement::K4(k) => {
            for i in 0..=n_old {
                let mut o = order[..i].to_vec();
                let mut kk = k.to_vec();
                kk.shuffle(rng);
                o.extend(kk);
                o.extend_from_slice(&order[i..]);
                candidates.push(o);
            }
        }
    }
    if let Placement::Chimney(c, a) = p {
        // Both orientations of the new centre and of its apexes.
        let flipped: Vec<Vec<usize>> = candidates
            .iter()
            .map(|o| {
                o.iter()
                    .map(|&v| match v {
                        v if v == c[0] => c[1],
                        v if v == c[1] => c[0],
                        v if v == a[0] => a[1],
                        v if v == a[1] => a[0],
                        v => v,
                    })
                    .collect()
            })
            .collect();
        candidates.extend(flipped);
    }
    candidates.retain(|o| crate::lifting::is_admissible(g, o).is_ok());
    candidates.choose(rng).cloned()
}
