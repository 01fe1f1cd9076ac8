use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rlk::amalgam::{amalgamate_centres, amalgamate_lifts, generic_sample};
use rlk::canon::graph_code;
use rlk::gen::{random_bowtie_free, random_good, random_graph, random_ordered_good, random_partite_system};
use rlk::good::{complete_to_good, decompose, is_good, Component, Goodness};
use rlk::graph::{contains_bowtie, edge_type_partition, find_monomorphism, triangles, Graph};
use rlk::lifting::{
    is_admissible, lift_l2, reduce, shadow, unreduce, LiftedStructure, PairConfig, ReducedStructure,
};
use rlk::membership::{build_catalogue, check_small, is_member, reconstruct_witness, TypeCatalogue, DEFAULT_MAX_CENTRE_E1};
use rlk::ramsey::{
    complete_reduced, grid_functions, partite_lemma_construct, star_partition, verify_arrow_plain, PartiteSystem,
};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn cat() -> &'static TypeCatalogue {
    static CAT: OnceLock<TypeCatalogue> = OnceLock::new();
    CAT.get_or_init(|| build_catalogue(DEFAULT_MAX_CENTRE_E1))
}

fn naive_bowtie(g: &Graph) -> bool {
    let n = g.n();
    let e = |a: usize, b: usize| g.has_edge(a, b);
    for c in 0..n {
        for a in 0..n {
            for b in 0..n {
                for d in 0..n {
                    for f in 0..n {
                        let vs = [c, a, b, d, f];
                        let distinct = (0..5).all(|i| (i + 1..5).all(|j| vs[i] != vs[j]));
                        if distinct && e(c, a) && e(c, b) && e(a, b) && e(c, d) && e(c, f) && e(d, f) {
                            return true;
                        }
                    }
                }
            }
        }
    }
    false
}

/// Same structure with vertex `v` renamed `perm[v]`.
fn relabel(a: &LiftedStructure, perm: &[usize]) -> LiftedStructure {
    let mut unary = vec![None; a.n];
    for v in 0..a.n {
        unary[perm[v]] = a.unary[v];
    }
    let e = |s: &BTreeSet<(usize, usize)>| -> BTreeSet<(usize, usize)> {
        s.iter().map(|&(x, y)| (perm[x].min(perm[y]), perm[x].max(perm[y]))).collect()
    };
    LiftedStructure {
        n: a.n,
        order: a.order.iter().map(|&v| perm[v]).collect(),
        unary,
        e0: e(&a.e0),
        e1: e(&a.e1),
        types: a.types.iter().map(|(&(x, y), t)| ((perm[x], perm[y]), t.clone())).collect(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bowtie_detection_matches_nested_loops(seed in any::<u64>(), n in 0usize..9, p in 0.1f64..0.9) {
        let g = random_graph(n, p, &mut rng(seed));
        prop_assert_eq!(contains_bowtie(&g), naive_bowtie(&g));
    }

    #[test]
    fn type_zero_edges_are_triangle_edges(seed in any::<u64>(), n in 0usize..10) {
        let g = random_graph(n, 0.5, &mut rng(seed));
        let (e0, e1) = edge_type_partition(&g);
        let in_tri: BTreeSet<(usize, usize)> =
            triangles(&g).iter().flat_map(|&[a, b, c]| [(a, b), (a, c), (b, c)]).collect();
        prop_assert_eq!(&e0, &in_tri);
        prop_assert_eq!(e0.len() + e1.len(), g.edge_count());
    }

    #[test]
    fn canonical_code_ignores_labels(seed in any::<u64>(), n in 1usize..9) {
        let mut r = rng(seed);
        let g = random_graph(n, 0.4, &mut r);
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut r);
        prop_assert_eq!(graph_code(&g), graph_code(&g.permuted(&perm)));
    }

    #[test]
    fn completion_is_good_and_contains_input(seed in any::<u64>(), n in 1usize..12) {
        let g = random_bowtie_free(n, 0.4, &mut rng(seed));
        let out = complete_to_good(&g).unwrap();
        prop_assert_eq!(is_good(&out.graph).unwrap(), Goodness::Good);
        prop_assert!(!contains_bowtie(&out.graph));
        prop_assert!(find_monomorphism(&g, &out.graph).is_some());
        for c in &out.components {
            if let Component::Chimney { n, .. } = c {
                prop_assert!(*n >= 2);
            }
        }
    }

    #[test]
    fn components_partition_type_zero_edges(seed in any::<u64>()) {
        let g = random_good(12, &mut rng(seed));
        let d = decompose(&g.graph).unwrap();
        let mut seen = BTreeSet::new();
        let mut edges = BTreeSet::new();
        for c in &d.components {
            for v in c.vertices() {
                prop_assert!(seen.insert(v));
            }
            let vs: Vec<usize> = c.vertices().collect();
            for &x in &vs {
                for &y in &vs {
                    if x < y && g.graph.has_edge(x, y) {
                        edges.insert((x, y));
                    }
                }
            }
        }
        prop_assert_eq!(&edges, &d.e0);
        for u in 0..d.n() {
            for v in 0..d.n() {
                let (a, b) = (d.centre_of(u), d.centre_of(v));
                prop_assert!(a == b || a.iter().all(|x| !b.contains(x)));
            }
        }
    }

    #[test]
    fn lift_roundtrips(seed in any::<u64>()) {
        let og = random_ordered_good(12, &mut rng(seed));
        prop_assert!(is_admissible(&og.good, og.order()).is_ok());
        let l = lift_l2(&og);
        prop_assert_eq!(shadow(&l), og.ordered_graph());
        let back = unreduce(&reduce(&l)).unwrap();
        prop_assert_eq!(back.canonical_code(), l.canonical_code());
    }

    #[test]
    fn same_centre_types_record_the_centre_edge(seed in any::<u64>()) {
        let og = random_ordered_good(12, &mut rng(seed));
        let l = lift_l2(&og);
        for (&(u, v), t) in &l.types {
            if og.good.is_central(u) && og.good.centre_of(u) == og.good.centre_of(v) {
                let cfg = PairConfig::decode(t).unwrap();
                prop_assert_eq!(cfg.rel[cfg.u][cfg.v], 1);
            }
        }
    }

    #[test]
    fn substructures_of_lifts_are_members(seed in any::<u64>()) {
        let mut r = rng(seed);
        let l = lift_l2(&random_ordered_good(12, &mut r));
        let mut vs: Vec<usize> = (0..l.n).collect();
        vs.shuffle(&mut r);
        vs.truncate(r.gen_range(1..=l.n));
        let sub = l.restrict(&vs);
        let w = reconstruct_witness(&sub).unwrap().unwrap();
        let back = lift_l2(&w.graph);
        prop_assert_eq!(back.restrict(&w.embedding).canonical_code(), sub.canonical_code());
    }

    #[test]
    fn obstructions_fail_the_catalogue(seed in any::<u64>()) {
        let mut r = rng(seed);
        let l = generic_sample(6, seed, 12).unwrap();
        let mut vs: Vec<usize> = (0..l.n).collect();
        vs.shuffle(&mut r);
        vs.truncate(4.min(l.n));
        let mut s = l.restrict(&vs);
        // Swap in a random catalogue type.
        let keys: Vec<(usize, usize)> = s.types.keys().copied().collect();
        if let Some(&k) = keys.choose(&mut r) {
            let t = cat().types.choose(&mut r).unwrap().clone();
            s.types.insert(k, t);
        }
        let verdict = is_member(&s).unwrap();
        prop_assert_eq!(verdict.is_member(), check_small(&s, cat()).unwrap().is_none());
        if let rlk::membership::Membership::NonMember(o) = verdict {
            prop_assert!(check_small(&s.restrict(&o.vertices), cat()).unwrap().is_some());
        }
    }

    #[test]
    fn centre_amalgams_are_good(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g1 = random_good(10, &mut r);
        let g2 = random_good(10, &mut r);
        let mut f = Vec::new();
        let mut used = BTreeSet::new();
        for c1 in &g1.components {
            let options: Vec<&Component> = g2
                .components
                .iter()
                .filter(|c2| c2.is_k4() == c1.is_k4() && !used.contains(&c2.centre()[0]))
                .collect();
            if let Some(c2) = options.choose(&mut r) {
                let mut target = c2.centre().to_vec();
                target.shuffle(&mut r);
                let add: Vec<(usize, usize)> = c1.centre().iter().copied().zip(target).collect();
                // Keep the map an isomorphism of induced subgraphs.
                let consistent = add.iter().all(|&(x, y)| {
                    f.iter().all(|&(x2, y2): &(usize, usize)| g1.graph.has_edge(x, x2) == g2.graph.has_edge(y, y2))
                });
                if consistent && r.gen_bool(0.5) {
                    used.insert(c2.centre()[0]);
                    f.extend(add);
                }
            }
        }
        let out = amalgamate_centres(&g1, &g2, &f).unwrap();
        prop_assert_eq!(is_good(&out.graph.graph).unwrap(), Goodness::Good);
        prop_assert!(!contains_bowtie(&out.graph.graph));
        prop_assert_eq!(out.graph.n(), g1.n() + g2.n() - f.len());
    }

    #[test]
    fn lift_amalgams_contain_both_sides(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = generic_sample(8, seed, 14).unwrap();
        let mut vs: Vec<usize> = (0..s.n).collect();
        vs.shuffle(&mut r);
        let common: Vec<usize> = vs[..s.n / 3].to_vec();
        let mut v1: Vec<usize> = vs[..2 * s.n / 3].to_vec();
        let mut v2: Vec<usize> = common.iter().chain(&vs[2 * s.n / 3..]).copied().collect();
        v1.sort_unstable();
        v2.sort_unstable();
        let mut common = common;
        common.sort_unstable();
        let a = s.restrict(&common);
        let b1 = s.restrict(&v1);
        let b2 = s.restrict(&v2);
        let idx = |within: &[usize], x: usize| within.binary_search(&x).unwrap();
        let e1: Vec<usize> = common.iter().map(|&x| idx(&v1, x)).collect();
        let e2: Vec<usize> = common.iter().map(|&x| idx(&v2, x)).collect();
        let out = amalgamate_lifts(&a, &b1, &b2, &e1, &e2).unwrap();
        prop_assert_eq!(out.structure.restrict(&out.left).canonical_code(), b1.canonical_code());
        prop_assert_eq!(out.structure.restrict(&out.right).canonical_code(), b2.canonical_code());
        prop_assert!(is_member(&out.structure).unwrap().is_member());
        // Identifications outside the image of `a` only happen on central vertices.
        let img1: BTreeSet<usize> = e1.iter().map(|&x| out.left[x]).collect();
        for (x, &l) in out.left.iter().enumerate() {
            for (y, &rr) in out.right.iter().enumerate() {
                if l == rr && !img1.contains(&l) {
                    prop_assert!(b1.unary[x].is_some() && b2.unary[y].is_some());
                }
            }
        }
    }

    #[test]
    fn grids_have_the_expected_shape(seed in any::<u64>()) {
        let (a, b) = random_partite_system(3, 3, 0.3, &mut rng(seed));
        let c1 = partite_lemma_construct(&a, &b, 1).unwrap();
        prop_assert_eq!(c1.body.canonical_code(), b.body.canonical_code());
        let s = star_partition(&b.body).unwrap().centre_map(b.body.n);
        for n in 1..=2 {
            let c = partite_lemma_construct(&a, &b, n).unwrap();
            for (pc, pb) in c.parts.iter().zip(&b.parts) {
                prop_assert_eq!(pc.len(), pb.len().pow(n as u32));
            }
            let mut sim: BTreeMap<Vec<usize>, BTreeSet<usize>> = BTreeMap::new();
            for (v, f) in grid_functions(&b, n).iter().enumerate() {
                sim.entry(f.iter().map(|&x| s[x]).collect()).or_default().insert(v);
            }
            let expected: BTreeSet<BTreeSet<usize>> = sim.into_values().collect();
            prop_assert_eq!(star_partition(&c.body).unwrap().as_sets(), expected);
            // Parts are transversal and the projection is a homomorphism.
            prop_assert!(PartiteSystem::new(c.base.clone(), c.parts.clone(), c.body.clone()).is_ok());
        }
    }

    #[test]
    fn arrow_verdicts_ignore_vertex_names(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b) = random_partite_system(1, 3, 0.0, &mut r);
        let c = partite_lemma_construct(&a, &b, 2).unwrap();
        let mut perm: Vec<usize> = (0..c.body.n).collect();
        perm.shuffle(&mut r);
        let shuffled = relabel(&c.body, &perm);
        let x = verify_arrow_plain(&c.body, &b.body, &a, 1 << 20).unwrap();
        let y = verify_arrow_plain(&shuffled, &b.body, &a, 1 << 20).unwrap();
        prop_assert_eq!(x.holds, y.holds);
        prop_assert_eq!(x.copies_of_b, y.copies_of_b);
    }

    #[test]
    fn completion_restores_membership(seed in any::<u64>()) {
        let l = lift_l2(&random_ordered_good(12, &mut rng(seed)));
        let full = reduce(&l);
        let star = star_partition(&full).unwrap().centre_map(full.n);
        let mut d: ReducedStructure = full.clone();
        d.0.types.retain(|&(x, y), _| star[x] == star[y]);
        let e = complete_reduced(&d, None).unwrap();
        prop_assert!(e.is_complete());
        prop_assert!(is_member(&e).unwrap().is_member());
        let back = e.restrict(&(0..d.n).collect::<Vec<_>>());
        prop_assert_eq!(&back.unary, &d.unary);
        prop_assert_eq!(&back.e0, &d.e0);
        prop_assert_eq!(&back.e1, &d.e1);
    }

    #[test]
    fn json_roundtrips(seed in any::<u64>()) {
        let mut r = rng(seed);
        let l = lift_l2(&random_ordered_good(10, &mut r));
        let back: LiftedStructure = serde_json::from_str(&serde_json::to_string(&l).unwrap()).unwrap();
        prop_assert_eq!(&back, &l);
        let g = random_graph(8, 0.3, &mut r);
        let back: Graph = serde_json::from_str(&serde_json::to_string(&g).unwrap()).unwrap();
        prop_assert_eq!(back, g);
        let (_, b) = random_partite_system(2, 3, 0.3, &mut r);
        let text = serde_json::to_string(&b).unwrap();
        let back: PartiteSystem = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }
}
