//! Star partitions, partite systems, the grid construction of the Partite
//! Lemma, Hales-Jewett numbers, exhaustive arrow checks, the Partite
//! Construction, completion of reduced structures and expansion gadgets.

mod arrow;
mod completion;
mod construction;
mod gadgets;
mod hj;
mod partite;
mod star;

pub use arrow::{verify_arrow, verify_arrow_plain, ArrowOutcome};
pub use completion::complete_reduced;
pub use construction::{partite_construction, Budget, ConstructionOutcome};
pub use gadgets::{expansion_gadget, Gadget, GadgetClass, GadgetSet, GadgetTriple};
pub use hj::{combinatorial_lines, hales_jewett_number, line_free_colouring};
pub use partite::{grid_functions, partite_lemma_construct, PartiteSystem};
pub use star::{star_partition, StarPartition};

use thiserror::Error;

use crate::lifting::{LiftedStructure, TypeCode};
use crate::membership::MembershipError;

#[derive(Debug, Error)]
pub enum RamseyError {
    #[error("type-0 edges do not form a star forest: {0}")]
    NotStarForest(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("refused: {0}")]
    Refused(String),
    #[error("inconsistent structure: {0}")]
    Inconsistent(String),
    #[error("internal check failed: {0}")]
    Internal(String),
    #[error(transparent)]
    Membership(#[from] MembershipError),
}

/// Graph relation and type of the pair `(x, y)`, `x` before `y`.
pub(crate) fn bundle(s: &LiftedStructure, x: usize, y: usize) -> (u8, Option<&TypeCode>) {
    (s.relation(x, y), s.types.get(&(x, y)))
}

/// Order-preserving embeddings of `a` into `s` onto induced substructures,
/// as maps from positions of `a` to vertices of `s`, in lexicographic order
/// of the images' positions. `allowed[i]`, when given, lists the vertices of
/// `s` that position `i` may use.
pub(crate) fn embeddings(a: &LiftedStructure, s: &LiftedStructure, allowed: Option<&[Vec<usize>]>) -> Vec<Vec<usize>> {
    let a = a.normalized();
    let pos = s.positions();
    let mut out = Vec::new();
    let mut pick: Vec<usize> = Vec::with_capacity(a.n);
    fn rec(
        a: &LiftedStructure,
        s: &LiftedStructure,
        pos: &[usize],
        allowed: Option<&[Vec<usize>]>,
        pick: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let i = pick.len();
        if i == a.n {
            out.push(pick.clone());
            return;
        }
        let from = pick.last().map_or(0, |&p| pos[p] + 1);
        let mut try_vertex = |x: usize, pick: &mut Vec<usize>| {
            if s.unary[x] != a.unary[i] {
                return;
            }
            if pick.iter().enumerate().all(|(j, &p)| bundle(s, p, x) == bundle(a, j, i)) {
                pick.push(x);
                rec(a, s, pos, allowed, pick, out);
                pick.pop();
            }
        };
        match allowed {
            Some(allowed) => {
                for &x in &allowed[i] {
                    if pos[x] >= from {
                        try_vertex(x, pick);
                    }
                }
            }
            None => {
                for &x in &s.order[from.min(s.n)..] {
                    try_vertex(x, pick);
                }
            }
        }
    }
    rec(&a, s, &pos, allowed, &mut pick, &mut out);
    out
}
