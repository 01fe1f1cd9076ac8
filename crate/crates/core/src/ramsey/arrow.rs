use rayon::prelude::*;
use serde::Serialize;

use super::{embeddings, star_partition, PartiteSystem, RamseyError};
use crate::lifting::{LiftedStructure, ReducedStructure};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ArrowOutcome {
    pub holds: bool,
    pub copies_of_a: usize,
    /// Copies of `b` whose embedding maps star classes into star classes.
    pub copies_of_b: usize,
    /// A colouring of the copies of `a` (in enumeration order) with no
    /// monochromatic copy of `b`.
    pub counterexample: Option<Vec<u8>>,
}

/// Exhaustive check of `c -> (b)^a_2` over part-preserving copies of `b`.
pub fn verify_arrow(
    c: &PartiteSystem,
    b: &PartiteSystem,
    a: &ReducedStructure,
    colourings_cap: u64,
) -> Result<ArrowOutcome, RamseyError> {
    if c.base.canonical_code() != b.base.canonical_code() {
        return Err(RamseyError::Precondition("systems are partite over different structures".into()));
    }
    let b_part = b.part_of();
    let allowed: Vec<Vec<usize>> = b.body.order.iter().map(|&x| c.parts[b_part[x]].clone()).collect();
    arrow(&c.body, &b.body, a, Some(&allowed), colourings_cap)
}

/// Exhaustive check of `c -> (b)^a_2` over all copies of `b`.
pub fn verify_arrow_plain(
    c: &LiftedStructure,
    b: &LiftedStructure,
    a: &LiftedStructure,
    colourings_cap: u64,
) -> Result<ArrowOutcome, RamseyError> {
    arrow(c, b, a, None, colourings_cap)
}

fn arrow(
    c: &LiftedStructure,
    b: &LiftedStructure,
    a: &LiftedStructure,
    allowed: Option<&[Vec<usize>]>,
    cap: u64,
) -> Result<ArrowOutcome, RamseyError> {
    let a_copies = embeddings(a, c, None);
    let k = a_copies.len();
    if k >= 63 || (1u64 << k) > cap {
        return Err(RamseyError::Refused(format!("{k} copies of the small structure give 2^{k} colourings (cap {cap})")));
    }
    let sb = star_partition(b)?.centre_map(b.n);
    let sc = star_partition(c)?.centre_map(c.n);
    let b_pos = b.positions();
    let mut b_sets = Vec::new();
    for phi in embeddings(b, c, allowed) {
        // phi[p] is the image of the p-th vertex of b.
        let img = |x: usize| phi[b_pos[x]];
        let keeps_stars = (0..b.n).all(|x| (0..b.n).all(|y| sb[x] != sb[y] || sc[img(x)] == sc[img(y)]));
        if keeps_stars {
            let mut set = phi.clone();
            set.sort_unstable();
            b_sets.push(set);
        }
    }
    let masks: Vec<u64> = b_sets
        .iter()
        .map(|set| {
            a_copies
                .iter()
                .enumerate()
                .filter(|(_, ac)| ac.iter().all(|v| set.binary_search(v).is_ok()))
                .fold(0u64, |m, (i, _)| m | 1 << i)
        })
        .collect();
    let bad = first_bad_colouring(k, &masks);
    Ok(ArrowOutcome {
        holds: bad.is_none(),
        copies_of_a: k,
        copies_of_b: masks.len(),
        counterexample: bad.map(|chi| (0..k).map(|i| (chi >> i & 1) as u8).collect()),
    })
}

/// Least colouring (as a bit mask over `k` copies) under which no mask is
/// monochromatic. Colourings are taken up to swapping the two colours.
pub(crate) fn first_bad_colouring(k: usize, masks: &[u64]) -> Option<u64> {
    let total = if k == 0 { 1 } else { 1u64 << (k - 1) };
    (0..total)
        .into_par_iter()
        .find_first(|&chi| masks.iter().all(|&m| chi & m != 0 && chi & m != m))
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::lifting::Flag;
    use crate::ramsey::{hales_jewett_number, partite_lemma_construct};

    fn isolated(k: usize, flag: Option<Flag>) -> ReducedStructure {
        ReducedStructure(LiftedStructure {
            n: k,
            order: (0..k).collect(),
            unary: vec![flag; k],
            e0: BTreeSet::new(),
            e1: BTreeSet::new(),
            types: Default::default(),
        })
    }

    #[test]
    fn vertex_into_pair_via_grid() {
        let a = isolated(1, None);
        let b = PartiteSystem::new(a.clone(), vec![vec![0, 1]], isolated(2, None)).unwrap();
        let n = hales_jewett_number(2, 2, 4).unwrap();
        let c = partite_lemma_construct(&a, &b, n).unwrap();
        let out = verify_arrow(&c, &b, &a, 1 << 20).unwrap();
        assert!(out.holds);
        assert_eq!(out.copies_of_a, 4);
        assert_eq!(out.copies_of_b, 6);
    }

    #[test]
    fn system_does_not_arrow_itself() {
        let a = isolated(1, None);
        let b = PartiteSystem::new(a.clone(), vec![vec![0, 1]], isolated(2, None)).unwrap();
        let out = verify_arrow(&b, &b, &a, 1 << 20).unwrap();
        assert!(!out.holds);
        assert_eq!(out.counterexample, Some(vec![1, 0]));
    }

    #[test]
    fn structure_arrows_itself() {
        let a = isolated(1, Some(Flag::L));
        let t = PartiteSystem::trivial(&a);
        assert!(verify_arrow(&t, &t, &a, 4).unwrap().holds);
    }

    #[test]
    fn cap_refuses() {
        let a = isolated(1, None);
        let c = isolated(10, None);
        assert!(matches!(verify_arrow_plain(&c, &c, &a, 512), Err(RamseyError::Refused(_))));
    }

    #[test]
    fn result_is_independent_of_copy_order() {
        // Pairs inside 5 points: every 2-colouring of points has a
        // monochromatic pair, but not a monochromatic triple of 4 points.
        let a = isolated(1, None);
        for (c, b, expect) in [(3, 2, true), (4, 3, false), (5, 3, true)] {
            let c = isolated(c, None);
            let b = isolated(b, None);
            let a_copies = embeddings(&a, &c, None);
            let b_sets: Vec<Vec<usize>> = embeddings(&b, &c, None);
            let masks = |order: &[usize], sets: &[Vec<usize>]| -> Vec<u64> {
                sets.iter()
                    .map(|s| {
                        order.iter().enumerate().filter(|(_, &ai)| s.contains(&a_copies[ai][0])).fold(0, |m, (i, _)| m | 1 << i)
                    })
                    .collect()
            };
            let id: Vec<usize> = (0..a_copies.len()).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            let mut shuffled = id.clone();
            shuffled.shuffle(&mut rng);
            let mut sets = b_sets.clone();
            sets.reverse();
            let r1 = first_bad_colouring(id.len(), &masks(&id, &b_sets)).is_none();
            let r2 = first_bad_colouring(id.len(), &masks(&shuffled, &sets)).is_none();
            assert_eq!(r1, expect);
            assert_eq!(r1, r2);
            assert_eq!(verify_arrow_plain(&c, &b, &a, 1 << 10).unwrap().holds, expect);
        }
    }
}
