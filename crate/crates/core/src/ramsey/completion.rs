use super::{embeddings, RamseyError};
use crate::lifting::{lift_l2_restricted, LiftedStructure, ReducedStructure};
use crate::membership::assemble::{assemble, AssemblyError, Mode};
use crate::membership::reconstruct_witness;

/// Completes a reduced structure with untyped pairs to a good lift.
///
/// Deleted centre vertices are restored, untyped pairs receive the types
/// their centres and type-1 edges determine (centres with no recorded
/// relation are disjoint), and the order is made admissible by regrouping
/// non-central vertices by centre. Vertices of `d` keep their ids; restored
/// vertices follow. When `a` is given, every vertex and every related pair
/// of `d` must lie in a copy of `a`.
pub fn complete_reduced(d: &ReducedStructure, a: Option<&ReducedStructure>) -> Result<LiftedStructure, RamseyError> {
    if let Some(v) = (0..d.n).find(|&v| d.unary[v].is_some_and(|f| !f.is_kept())) {
        return Err(RamseyError::Precondition(format!("vertex {v} carries a deleted flag")));
    }
    if let Some(a) = a {
        let mut covered = vec![false; d.n];
        let mut pairs = std::collections::BTreeSet::new();
        for c in embeddings(a, d, None) {
            for (i, &x) in c.iter().enumerate() {
                covered[x] = true;
                for &y in &c[i + 1..] {
                    pairs.insert((x, y));
                }
            }
        }
        if let Some(v) = covered.iter().position(|&c| !c) {
            return Err(RamseyError::Precondition(format!("vertex {v} lies in no copy")));
        }
        let related = d.e0.iter().chain(&d.e1).copied().chain(d.types.keys().copied());
        for (x, y) in related {
            if !pairs.contains(&(x, y)) && !pairs.contains(&(y, x)) {
                return Err(RamseyError::Precondition(format!("pair ({x}, {y}) lies in no copy")));
            }
        }
    }
    let asm = assemble(d, Mode::Complete).map_err(|e| match e {
        AssemblyError::Failure(f) => RamseyError::Inconsistent(format!("{:?} on {:?}: {}", f.case, f.vertices, f.detail)),
        AssemblyError::Precondition(s) => RamseyError::Precondition(s),
        AssemblyError::Internal(s) => RamseyError::Internal(s),
    })?;
    let keep: Vec<usize> = (0..asm.witness.n()).filter(|v| !asm.fillers.contains(v)).collect();
    let e = lift_l2_restricted(&asm.witness, &keep);

    if !e.is_complete() {
        return Err(RamseyError::Internal("completion left untyped pairs".into()));
    }
    let back = e.restrict(&(0..d.n).collect::<Vec<_>>());
    if back.unary != d.unary || back.e0 != d.e0 || back.e1 != d.e1 {
        return Err(RamseyError::Internal("completion changed the graph data".into()));
    }
    if let Err(o) = reconstruct_witness(&e)? {
        return Err(RamseyError::Internal(format!("completion is not a member: {o}")));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::good::decompose;
    use crate::graph::Graph;
    use crate::lifting::{lift_l2, reduce, some_admissible_order, unreduce};

    fn lifted(g: &Graph) -> LiftedStructure {
        lift_l2(&some_admissible_order(&decompose(g).unwrap()))
    }

    #[test]
    fn restores_types_between_chimneys() {
        let full = reduce(&lifted(&Graph::chimney(2).disjoint_union(&Graph::chimney(2))));
        let star = crate::ramsey::star_partition(&full).unwrap().centre_map(full.n);
        let mut d = full.clone();
        d.0.types.retain(|&(x, y), _| star[x] == star[y]);
        assert!(!d.is_complete());
        let e = complete_reduced(&d, None).unwrap();
        assert!(e.is_complete());
        assert_eq!(e.n, 8);
        assert!(e.is_isomorphic(&unreduce(&full).unwrap()));
    }

    #[test]
    fn complete_input_is_unreduced() {
        let mut g = Graph::chimney(3).disjoint_union(&Graph::complete(4));
        g.add_edge(2, 5);
        let d = reduce(&lifted(&g));
        let e = complete_reduced(&d, None).unwrap();
        assert_eq!(e, unreduce(&d).unwrap());
        assert!(e.is_isomorphic(&lifted(&g)));
    }

    #[test]
    fn uncovered_vertex_is_rejected() {
        let d = reduce(&lifted(&Graph::chimney(2).disjoint_union(&Graph::complete(4))));
        let a = reduce(&lifted(&Graph::chimney(2)));
        assert!(matches!(complete_reduced(&d, Some(&a)), Err(RamseyError::Precondition(_))));
        // An apex with neither types nor type-0 edges has no known centre.
        let mut bare = d.clone();
        let apex = (0..bare.n).find(|&v| bare.unary[v].is_none()).unwrap();
        bare.0.types.retain(|&(x, y), _| x != apex && y != apex);
        bare.0.e0.retain(|&(x, y)| x != apex && y != apex);
        assert!(matches!(complete_reduced(&bare, None), Err(RamseyError::Precondition(_))));
    }
}
