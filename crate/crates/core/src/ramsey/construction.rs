use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{bundle, embeddings, hales_jewett_number, partite_lemma_construct, star_partition, PartiteSystem, RamseyError};
use crate::graph::edge;
use crate::lifting::{LiftedStructure, ReducedStructure};
use crate::membership::{check_small_partial, TypeCatalogue};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub max_vertices: usize,
    pub max_pictures: usize,
    /// Largest grid dimension searched for in the Hales-Jewett step.
    pub hj_cap: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_vertices: 5_000,
            max_pictures: 64,
            hj_cap: 3,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ConstructionOutcome {
    Complete { result: PartiteSystem, pictures: usize },
    BudgetExceeded { last: PartiteSystem, completed: usize, reason: String },
}

/// Runs the pictures `P_0, ..., P_m` over the copies of `a` in `c0`.
///
/// `c0` should arrow `b` for colourings of `a` in the class without star
/// conditions; that is not checked. Every picture is checked for a star
/// partition and against the catalogue.
pub fn partite_construction(
    a: &ReducedStructure,
    b: &ReducedStructure,
    c0: &ReducedStructure,
    budget: Budget,
    cat: &TypeCatalogue,
) -> Result<ConstructionOutcome, RamseyError> {
    let a = ReducedStructure(a.normalized());
    let b = ReducedStructure(b.normalized());
    let c0 = ReducedStructure(c0.normalized());
    for s in [&a, &b, &c0] {
        star_partition(s)?;
    }
    let a_copies = embeddings(&a, &c0, None);
    let mut picture = first_picture(&b, &c0)?;
    check_picture(&picture, cat, 0)?;
    for (i, xs) in a_copies.iter().enumerate() {
        let exceeded = |last: PartiteSystem, reason: String| Ok(ConstructionOutcome::BudgetExceeded { last, completed: i, reason });
        if i >= budget.max_pictures {
            return exceeded(picture, format!("picture limit {} reached", budget.max_pictures));
        }
        let (bi, bi_vertices) = projecting_to(&a, &picture, xs)?;
        let t = bi.transversal_copies().len();
        if t == 0 {
            continue;
        }
        let Some(n) = hales_jewett_number(t, 2, budget.hj_cap) else {
            return exceeded(picture, format!("Hales-Jewett number for {t} copies exceeds {}", budget.hj_cap));
        };
        let grid_size: usize = bi.parts.iter().map(|p| p.len().saturating_pow(n as u32)).sum();
        if grid_size > budget.max_vertices {
            return exceeded(picture, format!("grid of dimension {n} has {grid_size} vertices"));
        }
        let grid = partite_lemma_construct(&a, &bi, n)?;
        let next = amalgamate_pictures(&picture, &bi, &bi_vertices, &grid, xs, budget.max_vertices)?;
        let Some(next) = next else {
            return exceeded(picture, "amalgamated picture exceeds the vertex limit".into());
        };
        check_picture(&next, cat, i + 1)?;
        picture = next;
    }
    Ok(ConstructionOutcome::Complete {
        result: picture,
        pictures: a_copies.len() + 1,
    })
}

fn check_picture(p: &PartiteSystem, cat: &TypeCatalogue, index: usize) -> Result<(), RamseyError> {
    star_partition(&p.body).map_err(|e| RamseyError::Internal(format!("picture {index}: {e}")))?;
    if let Some(vs) = check_small_partial(&p.body, cat) {
        return Err(RamseyError::Internal(format!("picture {index} contains a forbidden substructure on {vs:?}")));
    }
    Ok(())
}

/// Disjoint copies of `b`, one over each copy of `b` in `c0`.
fn first_picture(b: &ReducedStructure, c0: &ReducedStructure) -> Result<PartiteSystem, RamseyError> {
    let copies = embeddings(b, c0, None);
    // Vertex (k, p): position p of the k-th copy, in part copies[k][p].
    let mut slots: Vec<(usize, usize, usize)> = Vec::new();
    for (k, phi) in copies.iter().enumerate() {
        for (p, &x) in phi.iter().enumerate() {
            slots.push((x, k, p));
        }
    }
    slots.sort_unstable();
    let id: BTreeMap<(usize, usize), usize> = slots.iter().enumerate().map(|(v, &(_, k, p))| ((k, p), v)).collect();
    let mut body = LiftedStructure {
        n: slots.len(),
        order: (0..slots.len()).collect(),
        unary: slots.iter().map(|&(x, _, _)| c0.unary[x]).collect(),
        e0: BTreeSet::new(),
        e1: BTreeSet::new(),
        types: BTreeMap::new(),
    };
    for k in 0..copies.len() {
        for p in 0..b.n {
            for q in p + 1..b.n {
                let (u, v) = (id[&(k, p)], id[&(k, q)]);
                let (x, y) = if u < v { (u, v) } else { (v, u) };
                let (r, t) = bundle(b, p, q);
                put(&mut body, x, y, r, t.cloned());
            }
        }
    }
    let mut parts = vec![Vec::new(); c0.n];
    for (v, &(x, _, _)) in slots.iter().enumerate() {
        parts[x].push(v);
    }
    PartiteSystem::new(c0.clone(), parts, ReducedStructure(body))
        .map_err(|e| RamseyError::Internal(format!("first picture: {e}")))
}

fn put(s: &mut LiftedStructure, x: usize, y: usize, r: u8, t: Option<crate::lifting::TypeCode>) {
    match r {
        1 => s.e0.insert(edge(x, y)),
        2 => s.e1.insert(edge(x, y)),
        _ => false,
    };
    if let Some(t) = t {
        s.types.insert((x, y), t);
    }
}

/// The substructure of `p` on the copies of `a` projecting onto `xs`, as a
/// system partite over `a`, with its vertices in `p` (sorted by id).
fn projecting_to(a: &ReducedStructure, p: &PartiteSystem, xs: &[usize]) -> Result<(PartiteSystem, Vec<usize>), RamseyError> {
    let allowed: Vec<Vec<usize>> = xs.iter().map(|&x| p.parts[x].clone()).collect();
    let copies = embeddings(a, &p.body, Some(&allowed));
    let vertices: Vec<usize> = copies.iter().flatten().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let body = p.body.restrict(&vertices);
    let new_id: BTreeMap<usize, usize> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let parts: Vec<Vec<usize>> = allowed
        .iter()
        .map(|part| part.iter().filter_map(|v| new_id.get(v).copied()).collect())
        .collect();
    let sys = PartiteSystem::new(a.clone(), parts, ReducedStructure(body))
        .map_err(|e| RamseyError::Internal(format!("projected substructure: {e}")))?;
    Ok((sys, vertices))
}

/// Glues a copy of `p` onto every copy of `bi` in `grid`; the copies are
/// disjoint outside the grid. `None` if the result would exceed `limit`.
fn amalgamate_pictures(
    p: &PartiteSystem,
    bi: &PartiteSystem,
    bi_vertices: &[usize],
    grid: &PartiteSystem,
    xs: &[usize],
    limit: usize,
) -> Result<Option<PartiteSystem>, RamseyError> {
    let bi_part = bi.part_of();
    let allowed: Vec<Vec<usize>> = bi.body.order.iter().map(|&x| grid.parts[bi_part[x]].clone()).collect();
    let copies = embeddings(&bi.body, &grid.body, Some(&allowed));
    let outside: Vec<usize> = (0..p.body.n).filter(|v| bi_vertices.binary_search(v).is_err()).collect();
    let total = grid.body.n + copies.len() * outside.len();
    if total > limit {
        return Ok(None);
    }
    let p_part = p.part_of();
    let g_part = grid.part_of();
    let bi_pos = bi.body.positions();

    // Provisional ids: grid vertices, then each copy's outside vertices.
    let mut part_of = Vec::with_capacity(total);
    part_of.extend(g_part.iter().map(|&k| xs[k]));
    let mut unary: Vec<_> = grid.body.unary.clone();
    let mut maps: Vec<Vec<usize>> = Vec::with_capacity(copies.len());
    for phi in &copies {
        let mut m = vec![usize::MAX; p.body.n];
        for (i, &v) in bi_vertices.iter().enumerate() {
            m[v] = phi[bi_pos[i]];
        }
        for &v in &outside {
            m[v] = part_of.len();
            part_of.push(p_part[v]);
            unary.push(p.body.unary[v]);
        }
        maps.push(m);
    }

    // Order inside each part: merge the grid's order with each copy's.
    let mut chains: Vec<Vec<usize>> = vec![grid.body.order.clone()];
    for m in &maps {
        chains.push(p.body.order.iter().map(|&v| m[v]).collect());
    }
    let order = merge_orders(total, &chains, &part_of)
        .ok_or_else(|| RamseyError::Internal("picture orders cannot be merged".into()))?;
    let mut pos = vec![0; total];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }

    let mut body = LiftedStructure {
        n: total,
        order: (0..total).collect(),
        unary: vec![None; total],
        e0: BTreeSet::new(),
        e1: BTreeSet::new(),
        types: BTreeMap::new(),
    };
    for v in 0..total {
        body.unary[pos[v]] = unary[v];
    }
    let mut add = |x: usize, y: usize, r: u8, t: Option<&crate::lifting::TypeCode>| -> Result<(), RamseyError> {
        let (px, py) = (pos[x], pos[y]);
        debug_assert!(px < py);
        let existing = bundle(&body, px, py);
        if (existing.0 != 0 || existing.1.is_some()) && existing != (r, t) {
            return Err(RamseyError::Internal(format!("conflicting relations on ({px}, {py})")));
        }
        put(&mut body, px, py, r, t.cloned());
        Ok(())
    };
    for x in 0..grid.body.n {
        for y in 0..grid.body.n {
            let (r, t) = bundle(&grid.body, x, y);
            if (r != 0 || t.is_some()) && grid.body.positions()[x] < grid.body.positions()[y] {
                add(x, y, r, t)?;
            }
        }
    }
    let p_pos = p.body.positions();
    for m in &maps {
        for &v in &outside {
            for w in 0..p.body.n {
                if w == v || (bi_vertices.binary_search(&w).is_err() && w < v) {
                    continue;
                }
                let (x, y) = if p_pos[v] < p_pos[w] { (v, w) } else { (w, v) };
                let (r, t) = bundle(&p.body, x, y);
                if r != 0 || t.is_some() {
                    add(m[x], m[y], r, t)?;
                }
            }
        }
    }
    let mut parts = vec![Vec::new(); p.parts.len()];
    for v in 0..total {
        parts[part_of[v]].push(pos[v]);
    }
    for part in &mut parts {
        part.sort_unstable();
    }
    PartiteSystem::new(p.base.clone(), parts, ReducedStructure(body))
        .map(Some)
        .map_err(|e| RamseyError::Internal(format!("amalgamated picture: {e}")))
}

/// Linear order, part by part, extending every chain; ties go to the
/// smaller provisional id.
fn merge_orders(total: usize, chains: &[Vec<usize>], part_of: &[usize]) -> Option<Vec<usize>> {
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); total];
    let mut indeg = vec![0usize; total];
    for c in chains {
        // Only consecutive vertices in the same part are constrained.
        let mut last: BTreeMap<usize, usize> = BTreeMap::new();
        for &v in c {
            if let Some(u) = last.insert(part_of[v], v) {
                succ[u].push(v);
                indeg[v] += 1;
            }
        }
    }
    let mut ready: BTreeSet<(usize, usize)> = (0..total).filter(|&v| indeg[v] == 0).map(|v| (part_of[v], v)).collect();
    let mut out = Vec::with_capacity(total);
    while let Some((_, v)) = ready.pop_first() {
        out.push(v);
        for &w in &succ[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                ready.insert((part_of[w], w));
            }
        }
    }
    (out.len() == total).then_some(out)
}

#[cfg(test)]
mod tests {
    use std::sync::OnceLock;

    use super::*;
    use crate::good::decompose;
    use crate::graph::Graph;
    use crate::lifting::{lift_l2, reduce, some_admissible_order, Flag};
    use crate::membership::{build_catalogue, DEFAULT_MAX_CENTRE_E1};
    use crate::ramsey::verify_arrow_plain;

    fn cat() -> &'static TypeCatalogue {
        static CAT: OnceLock<TypeCatalogue> = OnceLock::new();
        CAT.get_or_init(|| build_catalogue(DEFAULT_MAX_CENTRE_E1))
    }

    fn single(flag: Option<Flag>) -> ReducedStructure {
        ReducedStructure(LiftedStructure {
            n: 1,
            order: vec![0],
            unary: vec![flag],
            e0: BTreeSet::new(),
            e1: BTreeSet::new(),
            types: BTreeMap::new(),
        })
    }

    #[test]
    fn single_vertices_give_back_the_base() {
        let a = single(None);
        let out = partite_construction(&a, &a, &a, Budget::default(), cat()).unwrap();
        let ConstructionOutcome::Complete { result, pictures } = out else {
            panic!("budget exceeded")
        };
        assert_eq!(pictures, 2);
        assert_eq!(result.body.canonical_code(), a.canonical_code());
        assert!(verify_arrow_plain(&result.body, &a, &a, 4).unwrap().holds);
    }

    /// L vertices of three disjoint chimneys.
    fn l_vertices(k: usize) -> ReducedStructure {
        let mut g = Graph::empty(0);
        for _ in 0..k {
            g = g.disjoint_union(&Graph::chimney(2));
        }
        let r = reduce(&lift_l2(&some_admissible_order(&decompose(&g).unwrap())));
        let ls: Vec<usize> = (0..r.n).filter(|&v| r.unary[v] == Some(Flag::L)).collect();
        ReducedStructure(r.restrict(&ls).normalized())
    }

    #[test]
    fn centre_pairs_outgrow_the_budget_after_checked_pictures() {
        let a = single(Some(Flag::L));
        let b = l_vertices(2);
        let c0 = l_vertices(3);
        assert!(verify_arrow_plain(&c0, &b, &a, 1 << 4).unwrap().holds);
        let out = partite_construction(&a, &b, &c0, Budget::default(), cat()).unwrap();
        let ConstructionOutcome::BudgetExceeded { last, completed, .. } = out else {
            panic!("expected the budget to run out")
        };
        assert_eq!(completed, 1);
        assert_eq!(last.body.n, 28);
        assert!(star_partition(&last.body).is_ok());
    }
}
