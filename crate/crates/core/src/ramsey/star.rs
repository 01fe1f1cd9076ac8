use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::RamseyError;
use crate::lifting::{Flag, LiftedStructure};

/// Components of the type-0 star forest, each with its centre.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarPartition {
    /// Blocks sorted by smallest vertex; each block sorted.
    pub blocks: Vec<Vec<usize>>,
    /// `centres[i]` is the centre of `blocks[i]`.
    pub centres: Vec<usize>,
}

impl StarPartition {
    /// Centre of the star containing `v` (`v` itself for singletons).
    pub fn centre_of(&self, v: usize) -> usize {
        let i = self.blocks.iter().position(|b| b.binary_search(&v).is_ok()).expect("vertex in a block");
        self.centres[i]
    }

    /// Per-vertex centre, for repeated lookups.
    pub fn centre_map(&self, n: usize) -> Vec<usize> {
        let mut m = vec![usize::MAX; n];
        for (b, &c) in self.blocks.iter().zip(&self.centres) {
            for &v in b {
                m[v] = c;
            }
        }
        m
    }

    pub fn as_sets(&self) -> BTreeSet<BTreeSet<usize>> {
        self.blocks.iter().map(|b| b.iter().copied().collect()).collect()
    }
}

/// Splits the vertices along the components of the type-0 edges, which must
/// be stars; L-flagged vertices must be centres. The centre of a single edge
/// is its L-flagged end, else its earlier end.
pub fn star_partition(a: &LiftedStructure) -> Result<StarPartition, RamseyError> {
    let n = a.n;
    let pos = a.positions();
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in &a.e0 {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut seen = vec![false; n];
    let mut blocks = Vec::new();
    let mut centres = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut block = vec![s];
        seen[s] = true;
        let mut i = 0;
        while i < block.len() {
            for &w in &adj[block[i]] {
                if !seen[w] {
                    seen[w] = true;
                    block.push(w);
                }
            }
            i += 1;
        }
        block.sort_unstable();
        let centre = match block.len() {
            1 => block[0],
            2 => {
                let (x, y) = (block[0], block[1]);
                let is_l = |v: usize| a.unary[v] == Some(Flag::L);
                match (is_l(x), is_l(y)) {
                    (true, true) => {
                        return Err(RamseyError::NotStarForest(format!("L-flagged vertices {x} and {y} are joined")))
                    }
                    (true, false) => x,
                    (false, true) => y,
                    _ if pos[x] < pos[y] => x,
                    _ => y,
                }
            }
            k => {
                let Some(&c) = block.iter().find(|&&v| adj[v].len() == k - 1) else {
                    return Err(RamseyError::NotStarForest(format!("component {block:?} is not a star")));
                };
                if let Some(&v) = block.iter().find(|&&v| v != c && adj[v].len() != 1) {
                    return Err(RamseyError::NotStarForest(format!(
                        "vertex {v} of the star centred at {c} has another type-0 edge"
                    )));
                }
                c
            }
        };
        if let Some(&v) = block.iter().find(|&&v| v != centre && a.unary[v] == Some(Flag::L)) {
            return Err(RamseyError::NotStarForest(format!("L-flagged vertex {v} is a leaf")));
        }
        blocks.push(block);
        centres.push(centre);
    }
    Ok(StarPartition { blocks, centres })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::good::decompose;
    use crate::graph::{edge, Graph};
    use crate::lifting::{lift_l2, reduce, some_admissible_order};

    #[test]
    fn reduced_c3_is_one_star() {
        let a = reduce(&lift_l2(&some_admissible_order(&decompose(&Graph::chimney(3)).unwrap())));
        let p = star_partition(&a).unwrap();
        assert_eq!(p.blocks, vec![vec![0, 1, 2, 3]]);
        assert_eq!(a.unary[p.centres[0]], Some(Flag::L));
    }

    #[test]
    fn isolated_vertices_are_singletons() {
        let a = LiftedStructure {
            n: 3,
            order: vec![0, 1, 2],
            unary: vec![None; 3],
            e0: BTreeSet::new(),
            e1: BTreeSet::new(),
            types: Default::default(),
        };
        let p = star_partition(&a).unwrap();
        assert_eq!(p.blocks, vec![vec![0], vec![1], vec![2]]);
        assert_eq!(p.centres, vec![0, 1, 2]);
    }

    #[test]
    fn stars_sharing_a_leaf_are_rejected() {
        let mut a = LiftedStructure {
            n: 5,
            order: (0..5).collect(),
            unary: vec![Some(Flag::L), Some(Flag::L), None, None, None],
            e0: BTreeSet::new(),
            e1: BTreeSet::new(),
            types: Default::default(),
        };
        for (u, v) in [(0, 2), (0, 3), (1, 3), (1, 4)] {
            a.e0.insert(edge(u, v));
        }
        assert!(matches!(star_partition(&a), Err(RamseyError::NotStarForest(_))));
    }
}
