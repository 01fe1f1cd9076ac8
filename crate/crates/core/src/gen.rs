//! Random instances for property tests and the acceptance suite.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::good::{decompose, Component, GoodGraph};
use crate::graph::{contains_bowtie, edge, Graph};
use crate::lifting::{lift_l2, random_admissible_order, reduce, LiftedStructure, OrderedGoodGraph, ReducedStructure};
use crate::ramsey::{star_partition, PartiteSystem};

/// Erdős–Rényi graph on `n` vertices.
pub fn random_graph(n: usize, p: f64, rng: &mut impl Rng) -> Graph {
    let mut g = Graph::empty(n);
    for j in 0..n {
        for i in 0..j {
            if rng.gen_bool(p) {
                g.add_edge(i, j);
            }
        }
    }
    g
}

/// Adds candidate edges in random order, skipping any that would create a bowtie.
pub fn random_bowtie_free(n: usize, p: f64, rng: &mut impl Rng) -> Graph {
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|j| (0..j).map(move |i| (i, j))).collect();
    pairs.shuffle(rng);
    let mut g = Graph::empty(n);
    for (i, j) in pairs {
        if !rng.gen_bool(p) {
            continue;
        }
        g.add_edge(i, j);
        if contains_bowtie(&g) {
            g.remove_edge(i, j);
        }
    }
    g
}

/// Random good graph on at most `max_n >= 4` vertices: chimneys and K4s on
/// shuffled vertex ids, joined by type-1 edges that close no triangle.
pub fn random_good(max_n: usize, rng: &mut impl Rng) -> GoodGraph {
    assert!(max_n >= 4);
    let mut sizes = Vec::new();
    let mut n = 0;
    loop {
        let size = if rng.gen_bool(0.3) { 4 } else { 2 + rng.gen_range(2..=4) };
        if n + size > max_n || (!sizes.is_empty() && rng.gen_bool(0.25)) {
            if sizes.is_empty() {
                continue;
            }
            break;
        }
        sizes.push((size, rng.gen_bool(0.3) && size == 4));
        n += size;
    }
    let mut ids: Vec<usize> = (0..n).collect();
    ids.shuffle(rng);
    let mut comps = Vec::new();
    let mut next = ids.into_iter();
    for (size, k4) in sizes {
        let vs: Vec<usize> = next.by_ref().take(size).collect();
        comps.push(if k4 {
            Component::k4([vs[0], vs[1], vs[2], vs[3]])
        } else {
            Component::chimney([vs[0], vs[1]], vs[2..].to_vec())
        });
    }
    let base = GoodGraph::from_parts(n, comps, []);
    let mut g = base.graph.clone();
    let mut pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|j| (0..j).map(move |i| (i, j)))
        .filter(|&(i, j)| base.component_of(i) != base.component_of(j))
        .collect();
    pairs.shuffle(rng);
    let budget = rng.gen_range(0..=n / 2);
    for (i, j) in pairs.into_iter().take(budget) {
        if g.neighbours(i).any(|x| g.has_edge(x, j)) {
            continue;
        }
        g.add_edge(i, j);
        if contains_bowtie(&g) {
            g.remove_edge(i, j);
        }
    }
    decompose(&g).expect("type-1 edges close no triangle")
}

pub fn random_ordered_good(max_n: usize, rng: &mut impl Rng) -> OrderedGoodGraph {
    random_admissible_order(&random_good(max_n, rng), rng)
}

/// Reduced structure on a random subset of a reduced lift, normalized.
pub fn random_reduced(max_n: usize, keep: usize, rng: &mut impl Rng) -> ReducedStructure {
    let r = reduce(&lift_l2(&random_ordered_good(max_n, rng)));
    let mut vs: Vec<usize> = (0..r.n).collect();
    vs.shuffle(rng);
    vs.truncate(keep.max(1));
    ReducedStructure(r.restrict(&vs).normalized())
}

/// A system partite over a random `a` on `1..=max_a` vertices: up to
/// `max_copies` copies of `a`, each reusing a random earlier vertex of its part
/// with probability `share`. Retries until the body has a star partition.
pub fn random_partite_system(
    max_a: usize,
    max_copies: usize,
    share: f64,
    rng: &mut impl Rng,
) -> (ReducedStructure, PartiteSystem) {
    loop {
        let k = rng.gen_range(1..=max_a);
        let a = random_reduced(8, k, rng);
        let copies = rng.gen_range(1..=max_copies);
        let mut parts: Vec<Vec<usize>> = vec![Vec::new(); a.n];
        let mut members: Vec<Vec<usize>> = Vec::with_capacity(copies);
        let mut count = 0;
        for _ in 0..copies {
            let mut copy = Vec::with_capacity(a.n);
            for part in parts.iter_mut() {
                if !part.is_empty() && rng.gen_bool(share) {
                    copy.push(part[rng.gen_range(0..part.len())]);
                } else {
                    part.push(count);
                    copy.push(count);
                    count += 1;
                }
            }
            members.push(copy);
        }
        // Renumber part by part.
        let mut id = vec![0; count];
        let mut next = 0;
        for part in &parts {
            for &v in part {
                id[v] = next;
                next += 1;
            }
        }
        let mut part_of = vec![0; count];
        for (i, part) in parts.iter().enumerate() {
            for &v in part {
                part_of[id[v]] = i;
            }
        }
        let mut body = LiftedStructure {
            n: count,
            order: (0..count).collect(),
            unary: part_of.iter().map(|&i| a.unary[i]).collect(),
            e0: BTreeSet::new(),
            e1: BTreeSet::new(),
            types: BTreeMap::new(),
        };
        for copy in &members {
            for i in 0..a.n {
                for j in i + 1..a.n {
                    let (x, y) = (id[copy[i]], id[copy[j]]);
                    match a.relation(i, j) {
                        1 => body.e0.insert(edge(x, y)),
                        2 => body.e1.insert(edge(x, y)),
                        _ => false,
                    };
                    if let Some(t) = a.types.get(&(i, j)) {
                        body.types.insert((x, y), t.clone());
                    }
                }
            }
        }
        if star_partition(&body).is_err() {
            continue;
        }
        let parts: Vec<Vec<usize>> = parts.iter().map(|p| p.iter().map(|&v| id[v]).collect()).collect();
        if let Ok(sys) = PartiteSystem::new(a.clone(), parts, ReducedStructure(body)) {
            return (a, sys);
        }
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::good::{is_good, Goodness};

    #[test]
    fn generators_produce_valid_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            assert!(!contains_bowtie(&random_bowtie_free(9, 0.5, &mut rng)));
            let g = random_good(12, &mut rng);
            assert!(g.n() <= 12);
            assert_eq!(is_good(&g.graph).unwrap(), Goodness::Good);
            let (a, b) = random_partite_system(3, 4, 0.3, &mut rng);
            assert_eq!(b.parts.len(), a.n);
        }
    }
}
