//! Membership in the class of substructures of lifts.
//!
//! Two independent deciders: [`check_small`] looks every substructure on at
//! most three vertices up in a generated [`TypeCatalogue`]; [`is_member`]
//! assembles a witness graph from the pair types.

pub mod assemble;
pub mod catalogue;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;
use crate::lifting::{LiftedStructure, OrderedGoodGraph};
use assemble::{assemble, AssemblyError, Mode};
pub use assemble::FailureCase;
pub use catalogue::{build_catalogue, check_small, check_small_partial, TypeCatalogue, DEFAULT_MAX_CENTRE_E1};

/// Negative certificate: an induced substructure on 1-3 vertices outside the class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Obstruction {
    pub vertices: Vec<usize>,
    pub reason: FailureCase,
    /// Vertex numbers in the detail refer to the substructure, renumbered by increasing id.
    pub detail: String,
}

impl fmt::Display for Obstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "vertices {:?} are forbidden ({:?}): {}", self.vertices, self.reason, self.detail)
    }
}

/// Positive certificate: the input is induced on `embedding` by the lift of `graph`.
#[derive(Debug, Clone)]
pub struct Witness {
    pub graph: OrderedGoodGraph,
    /// Input vertex `x` sits at witness vertex `embedding[x]`.
    pub embedding: Vec<usize>,
    /// Apexes added only to make every chimney have two apexes.
    pub fillers: Vec<usize>,
}

#[derive(Serialize)]
struct WitnessJson<'a> {
    graph: Graph,
    embedding: &'a [usize],
    fillers: &'a [usize],
}

impl Serialize for Witness {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        WitnessJson {
            graph: self.graph.ordered_graph(),
            embedding: &self.embedding,
            fillers: &self.fillers,
        }
        .serialize(s)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MembershipError {
    #[error("structure is not complete: {0}")]
    Incomplete(String),
    #[error("internal verification failed: {0}")]
    Internal(String),
    #[error("reconstruction failed ({0}) but no substructure on at most 3 vertices is forbidden")]
    Unexplained(String),
}

fn lift_error(e: AssemblyError) -> MembershipError {
    match e {
        AssemblyError::Precondition(s) => MembershipError::Incomplete(s),
        AssemblyError::Internal(s) => MembershipError::Internal(s),
        AssemblyError::Failure(f) => MembershipError::Internal(f.detail),
    }
}

/// Smallest induced substructure (by size, then lexicographically by
/// position) on which reconstruction fails.
fn minimal_obstruction(a: &LiftedStructure, why: &str) -> Result<Obstruction, MembershipError> {
    let n = a.n;
    let o = &a.order;
    let mut candidates: Vec<Vec<usize>> = Vec::new();
    candidates.extend((0..n).map(|i| vec![o[i]]));
    for i in 0..n {
        for j in i + 1..n {
            candidates.push(vec![o[i], o[j]]);
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                candidates.push(vec![o[i], o[j], o[k]]);
            }
        }
    }
    for mut vs in candidates {
        vs.sort_unstable();
        match assemble(&a.restrict(&vs), Mode::Strict) {
            Ok(_) => {}
            Err(AssemblyError::Failure(f)) => {
                return Ok(Obstruction {
                    vertices: vs,
                    reason: f.case,
                    detail: f.detail,
                })
            }
            Err(e) => return Err(lift_error(e)),
        }
    }
    Err(MembershipError::Unexplained(why.to_string()))
}

/// Attempts to build a witness; a failure is explained by an obstruction on at
/// most three vertices.
pub fn reconstruct_witness(a: &LiftedStructure) -> Result<Result<Witness, Obstruction>, MembershipError> {
    if !a.is_complete() {
        return Err(MembershipError::Incomplete(format!(
            "{} of {} pairs typed",
            a.types.len(),
            a.n * a.n.saturating_sub(1) / 2
        )));
    }
    match assemble(a, Mode::Strict) {
        Ok(asm) => Ok(Ok(Witness {
            embedding: (0..a.n).collect(),
            graph: asm.witness,
            fillers: asm.fillers,
        })),
        Err(AssemblyError::Failure(f)) => minimal_obstruction(a, &f.detail).map(Err),
        Err(e) => Err(lift_error(e)),
    }
}

/// Result of the witness-based decider.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "member", content = "certificate")]
pub enum Membership {
    #[serde(rename = "true")]
    Member(Witness),
    #[serde(rename = "false")]
    NonMember(Obstruction),
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member(_))
    }
}

pub fn is_member(a: &LiftedStructure) -> Result<Membership, MembershipError> {
    Ok(match reconstruct_witness(a)? {
        Ok(w) => Membership::Member(w),
        Err(o) => Membership::NonMember(o),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::good::decompose;
    use crate::lifting::{lift_l2, some_admissible_order, Flag, PairConfig};

    fn lifted(g: &Graph) -> LiftedStructure {
        lift_l2(&some_admissible_order(&decompose(g).unwrap()))
    }

    #[test]
    fn two_apexes_rebuild_a_chimney() {
        let a = lifted(&Graph::chimney(2)).restrict(&[2, 3]);
        let w = reconstruct_witness(&a).unwrap().unwrap();
        assert_eq!(w.graph.n(), 4);
        assert!(w.fillers.is_empty());
        assert_eq!(w.graph.good.graph, Graph::chimney(2).permuted(&[2, 3, 0, 1]));
    }

    #[test]
    fn k1_vertex_rebuilds_k4() {
        let a = lifted(&Graph::complete(4)).restrict(&[0]);
        assert_eq!(a.unary, vec![Some(Flag::K1)]);
        let w = reconstruct_witness(&a).unwrap().unwrap();
        assert_eq!(w.graph.good.graph, Graph::complete(4));
        assert_eq!(w.graph.order(), &[0, 1, 2, 3]);
    }

    #[test]
    fn single_l_vertex_gets_fillers() {
        let a = lifted(&Graph::chimney(2)).restrict(&[0]);
        let w = reconstruct_witness(&a).unwrap().unwrap();
        assert_eq!(w.fillers, vec![2, 3]);
    }

    /// Same-centre L/R pair whose type-0 edge has been removed.
    fn mismatched() -> LiftedStructure {
        let mut a = lifted(&Graph::chimney(2)).restrict(&[0, 1]);
        a.e0.clear();
        a
    }

    #[test]
    fn missing_centre_edge_is_case3() {
        let a = mismatched();
        let cfg = PairConfig::decode(&a.types[&(0, 1)]).unwrap();
        assert!(cfg.validate().unwrap().same_centre());
        let o = reconstruct_witness(&a).unwrap().unwrap_err();
        assert_eq!(o.reason, FailureCase::Case3);
        assert_eq!(o.vertices, vec![0, 1]);
    }

    #[test]
    fn sub_structures_of_lifts_are_members() {
        let g = Graph::chimney(3).disjoint_union(&Graph::complete(4));
        let mut g = g;
        g.add_edge(2, 5);
        let a = lifted(&g);
        assert!(is_member(&a).unwrap().is_member());
        for vs in [vec![2, 5], vec![0, 2, 6], vec![3, 4, 8], vec![1, 2, 3, 4, 5]] {
            let sub = a.restrict(&vs);
            let w = reconstruct_witness(&sub).unwrap().unwrap();
            let back = lift_l2(&w.graph).restrict(&(0..sub.n).collect::<Vec<_>>());
            assert_eq!(back, sub);
        }
    }

    #[test]
    fn conflicting_centres_are_explained_by_a_triple() {
        // x, z in one chimney, y an apex: swap the type of (x, y) for the type
        // of an apex over a different centre.
        let two = lifted(&Graph::chimney(2).disjoint_union(&Graph::chimney(2)));
        // order: 0 1 4 5 2 3 6 7
        let foreign = two.types[&(0, 6)].clone();
        let mut a = two.restrict(&[0, 1, 2]);
        a.types.insert((0, 2), foreign);
        let o = reconstruct_witness(&a).unwrap().unwrap_err();
        assert!(o.vertices.len() <= 3);
        assert!(assemble(&a.restrict(&o.vertices), Mode::Strict).is_err());
    }
}
