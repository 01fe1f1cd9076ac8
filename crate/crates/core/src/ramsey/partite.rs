use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{bundle, embeddings, star_partition, RamseyError};
use crate::graph::edge;
use crate::lifting::{LiftedStructure, ReducedStructure};

/// A structure over `base` split into parts, `parts[i]` projecting to the
/// `i`-th vertex of `base` in order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PartiteJson")]
pub struct PartiteSystem {
    /// Normalised: vertex `i` is the `i`-th in order.
    pub base: ReducedStructure,
    /// Each part listed in the order of `body`.
    pub parts: Vec<Vec<usize>>,
    pub body: ReducedStructure,
}

#[derive(Deserialize)]
struct PartiteJson {
    base: ReducedStructure,
    parts: Vec<Vec<usize>>,
    body: ReducedStructure,
}

impl TryFrom<PartiteJson> for PartiteSystem {
    type Error = RamseyError;

    fn try_from(j: PartiteJson) -> Result<Self, RamseyError> {
        PartiteSystem::new(j.base, j.parts, j.body)
    }
}

impl PartiteSystem {
    /// Checks that the order is part by part, every relation is transversal,
    /// and the projection is a homomorphism.
    pub fn new(base: ReducedStructure, parts: Vec<Vec<usize>>, body: ReducedStructure) -> Result<Self, RamseyError> {
        let bad = |s: String| Err(RamseyError::Precondition(s));
        let base = ReducedStructure(base.normalized());
        if parts.len() != base.n {
            return bad(format!("{} parts for a base on {} vertices", parts.len(), base.n));
        }
        let flat: Vec<usize> = parts.concat();
        if flat != body.order {
            return bad("order is not part by part, or parts do not cover the body in order".into());
        }
        let mut part_of = vec![0; body.n];
        for (i, p) in parts.iter().enumerate() {
            for &x in p {
                part_of[x] = i;
                if body.unary[x] != base.unary[i] {
                    return bad(format!("vertex {x} does not carry the flag of base vertex {i}"));
                }
            }
        }
        let pairs = body.e0.iter().chain(&body.e1).copied().chain(body.types.keys().copied());
        for (x, y) in pairs {
            let (i, j) = (part_of[x], part_of[y]);
            if i == j {
                return bad(format!("relation on ({x}, {y}) inside part {i}"));
            }
        }
        let pos = body.positions();
        for x in 0..body.n {
            for y in 0..body.n {
                if pos[x] >= pos[y] {
                    continue;
                }
                let (r, t) = bundle(&body, x, y);
                if r == 0 && t.is_none() {
                    continue;
                }
                let (br, bt) = bundle(&base, part_of[x], part_of[y]);
                if (r != 0 && r != br) || (t.is_some() && t != bt) {
                    return bad(format!("pair ({x}, {y}) is not mapped to a relation of the base"));
                }
            }
        }
        Ok(PartiteSystem { base, parts, body })
    }

    /// The base as a system with singleton parts.
    pub fn trivial(a: &ReducedStructure) -> PartiteSystem {
        let base = ReducedStructure(a.normalized());
        let parts = (0..base.n).map(|i| vec![i]).collect();
        PartiteSystem {
            body: base.clone(),
            base,
            parts,
        }
    }

    pub fn part_of(&self) -> Vec<usize> {
        let mut p = vec![0; self.body.n];
        for (i, part) in self.parts.iter().enumerate() {
            for &x in part {
                p[x] = i;
            }
        }
        p
    }

    /// Copies of the base meeting every part once.
    pub fn transversal_copies(&self) -> Vec<Vec<usize>> {
        embeddings(&self.base, &self.body, Some(&self.parts))
    }
}

/// Vertices of the grid of dimension `n` over `b` as functions
/// `{0..n} -> part`, part by part, each part in lexicographic order.
pub fn grid_functions(b: &PartiteSystem, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for part in &b.parts {
        let k = part.len();
        let mut word = vec![0usize; n];
        loop {
            out.push(word.iter().map(|&d| part[d]).collect());
            let mut i = n;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                if word[i] + 1 < k {
                    word[i] += 1;
                    break;
                }
                word[i] = 0;
            }
            if word.iter().all(|&d| d == 0) {
                break;
            }
        }
    }
    out
}

/// Vertex-count limit for the grid.
const GRID_LIMIT: usize = 20_000;

/// The grid system of dimension `n`: a pair of functions is related like the
/// base when every coordinate lies in a common copy of `a`, and like `b` at
/// the remaining coordinates when both functions are constant there.
pub fn partite_lemma_construct(a: &ReducedStructure, b: &PartiteSystem, n: usize) -> Result<PartiteSystem, RamseyError> {
    if n == 0 {
        return Err(RamseyError::Precondition("grid dimension must be at least 1".into()));
    }
    if a.canonical_code() != b.base.canonical_code() {
        return Err(RamseyError::Precondition("the system is not partite over the given structure".into()));
    }
    star_partition(a)?;
    star_partition(&b.body)?;
    let copies = b.transversal_copies();
    let mut covered = vec![false; b.body.n];
    let mut common: BTreeSet<(usize, usize)> = BTreeSet::new();
    for c in &copies {
        for (i, &x) in c.iter().enumerate() {
            covered[x] = true;
            for &y in &c[i + 1..] {
                common.insert((x, y));
            }
        }
    }
    if let Some(x) = covered.iter().position(|&c| !c) {
        return Err(RamseyError::Precondition(format!("vertex {x} lies in no copy")));
    }
    let total: usize = b.parts.iter().map(|p| p.len().saturating_pow(n as u32)).sum();
    if total > GRID_LIMIT {
        return Err(RamseyError::Refused(format!("grid would have {total} vertices (limit {GRID_LIMIT})")));
    }

    let funcs = grid_functions(b, n);
    let b_part = b.part_of();
    let part: Vec<usize> = funcs.iter().map(|f| b_part[f[0]]).collect();
    let mut body = LiftedStructure {
        n: total,
        order: (0..total).collect(),
        unary: part.iter().map(|&i| b.base.unary[i]).collect(),
        e0: BTreeSet::new(),
        e1: BTreeSet::new(),
        types: Default::default(),
    };
    for fi in 0..total {
        for gi in fi + 1..total {
            let (i, j) = (part[fi], part[gi]);
            if i == j {
                continue;
            }
            let (f, g) = (&funcs[fi], &funcs[gi]);
            let off: Vec<usize> = (0..n).filter(|&l| !common.contains(&(f[l], g[l]))).collect();
            let (r, t) = if off.is_empty() {
                bundle(&b.base, i, j)
            } else {
                let (x, y) = (f[off[0]], g[off[0]]);
                if off.iter().all(|&l| f[l] == x && g[l] == y) {
                    bundle(&b.body, x, y)
                } else {
                    (0, None)
                }
            };
            match r {
                1 => body.e0.insert(edge(fi, gi)),
                2 => body.e1.insert(edge(fi, gi)),
                _ => false,
            };
            if let Some(t) = t {
                body.types.insert((fi, gi), t.clone());
            }
        }
    }
    let mut parts = vec![Vec::new(); b.parts.len()];
    for (v, &i) in part.iter().enumerate() {
        parts[i].push(v);
    }
    PartiteSystem::new(b.base.clone(), parts, ReducedStructure(body))
        .map_err(|e| RamseyError::Internal(format!("grid is not a partite system: {e}")))
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::good::decompose;
    use crate::graph::Graph;
    use crate::lifting::{lift_l2, reduce, some_admissible_order};

    fn reduced(g: &Graph) -> ReducedStructure {
        ReducedStructure(reduce(&lift_l2(&some_admissible_order(&decompose(g).unwrap()))).normalized())
    }

    /// Two copies of reduced C2 (L, apex, apex) sharing their L vertex.
    fn two_part_example() -> (ReducedStructure, PartiteSystem) {
        let a = reduced(&Graph::chimney(2));
        let body = lift_l2(&some_admissible_order(&decompose(&Graph::chimney(4)).unwrap()));
        // Reduced C4: L, then apexes 1..4. Parts: {L}, {1, 2}, {3, 4}.
        let mut body = reduce(&body).normalized();
        let parts = vec![vec![0], vec![1, 2], vec![3, 4]];
        body.types.retain(|&(x, y), _| (x, y) != (1, 2) && (x, y) != (3, 4));
        (a.clone(), PartiteSystem::new(a, parts, ReducedStructure(body)).unwrap())
    }

    #[test]
    fn grid_of_dimension_one_is_the_system() {
        let (a, b) = two_part_example();
        let c = partite_lemma_construct(&a, &b, 1).unwrap();
        assert_eq!(c.body.canonical_code(), b.body.canonical_code());
        assert_eq!(c.parts, b.parts);
    }

    #[test]
    fn part_sizes_are_powers() {
        let (a, b) = two_part_example();
        for n in 1..=3 {
            let c = partite_lemma_construct(&a, &b, n).unwrap();
            for (pc, pb) in c.parts.iter().zip(&b.parts) {
                assert_eq!(pc.len(), pb.len().pow(n as u32));
            }
        }
    }

    #[test]
    fn stars_follow_coordinatewise_centres() {
        let (a, b) = two_part_example();
        let s = star_partition(&b.body).unwrap().centre_map(b.body.n);
        for n in 1..=2 {
            let c = partite_lemma_construct(&a, &b, n).unwrap();
            let funcs = grid_functions(&b, n);
            let mut sim: BTreeMap<Vec<usize>, BTreeSet<usize>> = BTreeMap::new();
            for (v, f) in funcs.iter().enumerate() {
                sim.entry(f.iter().map(|&x| s[x]).collect()).or_default().insert(v);
            }
            let expected: BTreeSet<BTreeSet<usize>> = sim.into_values().collect();
            assert_eq!(star_partition(&c.body).unwrap().as_sets(), expected);
        }
    }

    #[test]
    fn rejects_relations_inside_a_part() {
        let (a, b) = two_part_example();
        let parts = vec![vec![0, 1], vec![2], vec![3, 4]];
        assert!(PartiteSystem::new(a, parts, b.body.clone()).is_err());
    }
}
