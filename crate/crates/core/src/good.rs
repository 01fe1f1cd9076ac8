//! Good graphs: every vertex sits in a chimney or a K4.
//!
//! The type-0 edges of a good graph split into vertex-disjoint chimneys
//! (n >= 2 triangles on a shared centre edge) and copies of K4; type-1 edges
//! never close a triangle.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{bowtie_certificate, edge, edge_type_partition, triangles, Edge, Graph};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GoodError {
    #[error("graph contains a bowtie (monomorphism {0:?})")]
    Bowtie(Vec<usize>),
    #[error("vertex {vertex} lies in no chimney and no K4")]
    NotGood { vertex: usize },
    #[error("type-0 component {vertices:?} is neither a chimney nor a K4")]
    UnclassifiedComponent { vertices: Vec<usize> },
}

/// A connected component of the type-0 edges.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Component {
    Chimney {
        n: usize,
        centre: [usize; 2],
        apexes: Vec<usize>,
    },
    K4 {
        vertices: [usize; 4],
    },
}

impl Component {
    pub fn chimney(centre: [usize; 2], mut apexes: Vec<usize>) -> Self {
        apexes.sort_unstable();
        let centre = [centre[0].min(centre[1]), centre[0].max(centre[1])];
        Component::Chimney {
            n: apexes.len(),
            centre,
            apexes,
        }
    }

    pub fn k4(mut vertices: [usize; 4]) -> Self {
        vertices.sort_unstable();
        Component::K4 { vertices }
    }

    /// Vertices of the vertex-centre: the centre edge or the K4.
    pub fn centre(&self) -> &[usize] {
        match self {
            Component::Chimney { centre, .. } => centre,
            Component::K4 { vertices } => vertices,
        }
    }

    pub fn apexes(&self) -> &[usize] {
        match self {
            Component::Chimney { apexes, .. } => apexes,
            Component::K4 { .. } => &[],
        }
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.centre().iter().chain(self.apexes()).copied()
    }

    pub fn is_k4(&self) -> bool {
        matches!(self, Component::K4 { .. })
    }

    fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::new();
        match self {
            Component::Chimney { centre, apexes, .. } => {
                out.push(edge(centre[0], centre[1]));
                for &a in apexes {
                    out.push(edge(a, centre[0]));
                    out.push(edge(a, centre[1]));
                }
            }
            Component::K4 { vertices } => {
                for i in 0..4 {
                    for j in i + 1..4 {
                        out.push(edge(vertices[i], vertices[j]));
                    }
                }
            }
        }
        out
    }
}

/// A good graph together with its edge-type split and component structure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoodGraph {
    #[serde(flatten)]
    pub graph: Graph,
    pub e0: BTreeSet<Edge>,
    pub e1: BTreeSet<Edge>,
    pub components: Vec<Component>,
    #[serde(skip)]
    comp_of: Vec<usize>,
}

impl GoodGraph {
    /// Assembles a declared structure: type-0 edges come from the components,
    /// `e1` is taken as given. No validation beyond index bounds.
    pub fn from_parts(n: usize, mut components: Vec<Component>, e1: impl IntoIterator<Item = Edge>) -> Self {
        components.sort_by_key(|c| c.vertices().min());
        let mut graph = Graph::empty(n);
        let mut e0 = BTreeSet::new();
        for c in &components {
            for (u, v) in c.edges() {
                e0.insert((u, v));
                graph.add_edge(u, v);
            }
        }
        let e1: BTreeSet<Edge> = e1.into_iter().map(|(u, v)| edge(u, v)).collect();
        for &(u, v) in &e1 {
            graph.add_edge(u, v);
        }
        let mut g = GoodGraph {
            graph,
            e0,
            e1,
            components,
            comp_of: Vec::new(),
        };
        g.index();
        g
    }

    fn index(&mut self) {
        self.comp_of = vec![usize::MAX; self.graph.n()];
        for (i, c) in self.components.iter().enumerate() {
            for v in c.vertices() {
                self.comp_of[v] = i;
            }
        }
    }

    /// Restores derived indices after deserialisation.
    pub fn reindexed(mut self) -> Self {
        self.index();
        self
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    /// Index into `components` of the component containing `v`.
    pub fn component_of(&self, v: usize) -> usize {
        self.comp_of[v]
    }

    pub fn component(&self, v: usize) -> &Component {
        &self.components[self.comp_of[v]]
    }

    /// The vertex-centre c(v).
    pub fn centre_of(&self, v: usize) -> &[usize] {
        self.component(v).centre()
    }

    pub fn is_central(&self, v: usize) -> bool {
        self.centre_of(v).contains(&v)
    }

    pub fn edge_kind(&self, u: usize, v: usize) -> Option<EdgeKind> {
        let e = edge(u, v);
        if self.e0.contains(&e) {
            Some(EdgeKind::Zero)
        } else if self.e1.contains(&e) {
            Some(EdgeKind::One)
        } else {
            None
        }
    }
}

/// Edge type in the sense of the type-0/type-1 split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeKind {
    Zero,
    One,
}

/// Result of a goodness check on a bowtie-free graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Goodness {
    Good,
    /// `vertex` is in no chimney and no K4.
    Violation { vertex: usize },
}

fn type0_components(g: &Graph, e0: &BTreeSet<Edge>) -> Vec<Vec<usize>> {
    let n = g.n();
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in e0 {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s] || adj[s].is_empty() {
            continue;
        }
        let mut comp = vec![s];
        seen[s] = true;
        let mut i = 0;
        while i < comp.len() {
            for &w in &adj[comp[i]] {
                if !seen[w] {
                    seen[w] = true;
                    comp.push(w);
                }
            }
            i += 1;
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

enum Shape {
    Component(Component),
    LoneTriangle,
    Other,
}

fn classify(vertices: &[usize], e0: &BTreeSet<Edge>) -> Shape {
    let k = vertices.len();
    let has = |u: usize, v: usize| e0.contains(&edge(u, v));
    let deg = |u: usize| vertices.iter().filter(|&&w| w != u && has(u, w)).count();
    let m = e0
        .iter()
        .filter(|(u, v)| vertices.binary_search(u).is_ok() && vertices.binary_search(v).is_ok())
        .count();
    if k == 4 && m == 6 {
        return Shape::Component(Component::k4([vertices[0], vertices[1], vertices[2], vertices[3]]));
    }
    if k == 3 && m == 3 {
        return Shape::LoneTriangle;
    }
    if k < 4 {
        return Shape::Other;
    }
    let apex_count = k - 2;
    let hubs: Vec<usize> = vertices.iter().copied().filter(|&v| deg(v) == apex_count + 1).collect();
    if hubs.len() != 2 || !has(hubs[0], hubs[1]) || m != 2 * apex_count + 1 {
        return Shape::Other;
    }
    let apexes: Vec<usize> = vertices.iter().copied().filter(|v| !hubs.contains(v)).collect();
    if apexes.iter().all(|&a| deg(a) == 2 && has(a, hubs[0]) && has(a, hubs[1])) {
        Shape::Component(Component::chimney([hubs[0], hubs[1]], apexes))
    } else {
        Shape::Other
    }
}

/// Checks goodness. Graphs containing a bowtie are rejected with the bowtie
/// monomorphism as certificate.
pub fn is_good(g: &Graph) -> Result<Goodness, GoodError> {
    if let Some(cert) = bowtie_certificate(g) {
        return Err(GoodError::Bowtie(cert));
    }
    let (e0, _) = edge_type_partition(g);
    let mut covered = vec![false; g.n()];
    for comp in type0_components(g, &e0) {
        if let Shape::Component(_) = classify(&comp, &e0) {
            for v in comp {
                covered[v] = true;
            }
        }
    }
    Ok(match covered.iter().position(|c| !c) {
        None => Goodness::Good,
        Some(vertex) => Goodness::Violation { vertex },
    })
}

/// Splits a good graph into its chimneys and K4s.
pub fn decompose(g: &Graph) -> Result<GoodGraph, GoodError> {
    let (e0, e1) = edge_type_partition(g);
    let mut components = Vec::new();
    let mut covered = vec![false; g.n()];
    for comp in type0_components(g, &e0) {
        match classify(&comp, &e0) {
            Shape::Component(c) => {
                for v in c.vertices() {
                    covered[v] = true;
                }
                components.push(c);
            }
            Shape::LoneTriangle => return Err(GoodError::NotGood { vertex: comp[0] }),
            Shape::Other => return Err(GoodError::UnclassifiedComponent { vertices: comp }),
        }
    }
    if let Some(vertex) = covered.iter().position(|c| !c) {
        return Err(GoodError::NotGood { vertex });
    }
    components.sort_by_key(|c| c.vertices().min());
    let mut good = GoodGraph {
        graph: g.clone(),
        e0,
        e1,
        components,
        comp_of: Vec::new(),
    };
    good.index();
    Ok(good)
}

/// Extends a bowtie-free graph to a good one on a superset of its vertices.
///
/// Every triangle-free vertex becomes an apex of a fresh C2; every triangle
/// that lies in no chimney and no K4 gets a fourth vertex on its first edge.
/// Original vertex indices are kept; new vertices are appended.
pub fn complete_to_good(g: &Graph) -> Result<GoodGraph, GoodError> {
    if let Some(cert) = bowtie_certificate(g) {
        return Err(GoodError::Bowtie(cert));
    }
    let mut h = g.clone();
    h.clear_order();
    let tris = triangles(g);
    let mut in_triangle = vec![false; g.n()];
    for t in &tris {
        for &v in t {
            in_triangle[v] = true;
        }
    }
    for v in 0..g.n() {
        if !in_triangle[v] {
            let c = h.add_vertices(3);
            h.add_edge(c, c + 1);
            for a in [v, c + 2] {
                h.add_edge(a, c);
                h.add_edge(a, c + 1);
            }
        }
    }
    let (e0, _) = edge_type_partition(g);
    let lone: BTreeSet<Vec<usize>> = type0_components(g, &e0)
        .into_iter()
        .filter(|comp| matches!(classify(comp, &e0), Shape::LoneTriangle))
        .collect();
    for [a, b, c] in tris {
        if lone.contains(&vec![a, b, c]) {
            let v4 = h.add_vertices(1);
            h.add_edge(a, v4);
            h.add_edge(b, v4);
        }
    }
    decompose(&h)
}

/// Lemma-style check: the declared components are chimneys/K4s covering
/// every vertex, and no type-1 edge closes a triangle.
pub fn check_bowtie_free_structurally(g: &GoodGraph) -> bool {
    let declared: BTreeSet<Edge> = g.components.iter().flat_map(|c| c.edges()).collect();
    if declared != g.e0 || g.comp_of.iter().any(|&c| c == usize::MAX) {
        return false;
    }
    let full = &g.graph;
    g.e1.iter()
        .all(|&(u, v)| !full.neighbours(u).any(|w| w != v && full.has_edge(v, w)))
}

/// Vertex-centres and central flags of a good graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Centre {
    /// `vertex_sets[v]` is c(v), sorted.
    pub vertex_sets: Vec<Vec<usize>>,
    pub central_flags: Vec<bool>,
}

pub fn centres(g: &GoodGraph) -> Centre {
    let vertex_sets: Vec<Vec<usize>> = (0..g.n()).map(|v| g.centre_of(v).to_vec()).collect();
    let central_flags = (0..g.n()).map(|v| g.is_central(v)).collect();
    Centre {
        vertex_sets,
        central_flags,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{contains_bowtie, find_monomorphism};

    #[test]
    fn goodness_examples() {
        assert_eq!(is_good(&Graph::chimney(2)).unwrap(), Goodness::Good);
        assert_eq!(is_good(&Graph::complete(4)).unwrap(), Goodness::Good);
        assert_eq!(is_good(&Graph::complete(3)).unwrap(), Goodness::Violation { vertex: 0 });
        assert!(matches!(is_good(&Graph::bowtie()), Err(GoodError::Bowtie(_))));
    }

    #[test]
    fn completion_of_single_vertex() {
        let g = complete_to_good(&Graph::empty(1)).unwrap();
        assert_eq!(g.n(), 4);
        assert_eq!(g.components, vec![Component::chimney([1, 2], vec![0, 3])]);
    }

    #[test]
    fn completion_of_triangle_adds_fourth_vertex() {
        let g = complete_to_good(&Graph::complete(3)).unwrap();
        assert_eq!(g.n(), 4);
        assert_eq!(g.components, vec![Component::chimney([0, 1], vec![2, 3])]);
    }

    #[test]
    fn completion_fixes_k4() {
        let g = complete_to_good(&Graph::complete(4)).unwrap();
        assert_eq!(g.graph, Graph::complete(4));
    }

    #[test]
    fn completion_of_single_edge() {
        let e = Graph::new(2, [(0, 1)]).unwrap();
        let g = complete_to_good(&e).unwrap();
        assert_eq!(g.n(), 8);
        assert_eq!(g.e1.iter().copied().collect::<Vec<_>>(), vec![(0, 1)]);
        assert_eq!(is_good(&g.graph).unwrap(), Goodness::Good);
        assert!(!contains_bowtie(&g.graph));
        assert!(find_monomorphism(&e, &g.graph).is_some());
    }

    #[test]
    fn decomposition_examples() {
        let c3 = decompose(&Graph::chimney(3)).unwrap();
        assert_eq!(c3.components, vec![Component::chimney([0, 1], vec![2, 3, 4])]);

        let mixed = decompose(&Graph::complete(4).disjoint_union(&Graph::chimney(2))).unwrap();
        assert_eq!(
            mixed.components,
            vec![Component::k4([0, 1, 2, 3]), Component::chimney([4, 5], vec![6, 7])]
        );

        let mut joined = Graph::chimney(2).disjoint_union(&Graph::chimney(2));
        joined.add_edge(2, 6);
        let d = decompose(&joined).unwrap();
        assert_eq!(d.components.len(), 2);
        assert_eq!(d.e1.iter().copied().collect::<Vec<_>>(), vec![(2, 6)]);
    }

    #[test]
    fn decomposition_rejects_bowtie_component() {
        let err = decompose(&Graph::bowtie()).unwrap_err();
        assert_eq!(
            err,
            GoodError::UnclassifiedComponent {
                vertices: vec![0, 1, 2, 3, 4]
            }
        );
    }

    #[test]
    fn structural_check_examples() {
        // A chord between the apexes of a declared C2 closes a triangle with
        // the centre: the declared split is wrong (the graph is really K4).
        let chord = GoodGraph::from_parts(4, vec![Component::chimney([0, 1], vec![2, 3])], [(2, 3)]);
        assert!(!check_bowtie_free_structurally(&chord));
        assert!(!contains_bowtie(&chord.graph));

        // Apex of one chimney joined to both centre vertices of another: bowtie.
        let two = GoodGraph::from_parts(
            8,
            vec![
                Component::chimney([0, 1], vec![2, 3]),
                Component::chimney([4, 5], vec![6, 7]),
            ],
            [(2, 4), (2, 5)],
        );
        assert!(!check_bowtie_free_structurally(&two));
        assert!(contains_bowtie(&two.graph));

        // Apexes of disjoint chimneys joined by a bipartite pattern.
        let bip = GoodGraph::from_parts(
            8,
            vec![
                Component::chimney([0, 1], vec![2, 3]),
                Component::chimney([4, 5], vec![6, 7]),
            ],
            [(2, 6), (2, 7), (3, 6), (3, 7)],
        );
        assert!(check_bowtie_free_structurally(&bip));
        assert!(!contains_bowtie(&bip.graph));

        let k4 = decompose(&Graph::complete(4)).unwrap();
        assert!(check_bowtie_free_structurally(&k4));
    }

    #[test]
    fn centre_examples() {
        let c3 = decompose(&Graph::chimney(3)).unwrap();
        let c = centres(&c3);
        assert_eq!(c.vertex_sets[4], vec![0, 1]);
        assert_eq!(c.central_flags, vec![true, true, false, false, false]);

        let k4 = decompose(&Graph::complete(4)).unwrap();
        assert!(centres(&k4).central_flags.iter().all(|&f| f));
        assert_eq!(centres(&k4).vertex_sets[2], vec![0, 1, 2, 3]);

        let mixed = decompose(&Graph::chimney(2).disjoint_union(&Graph::complete(4))).unwrap();
        let c = centres(&mixed);
        assert_eq!(c.vertex_sets[0], vec![0, 1]);
        assert_eq!(c.vertex_sets[5], vec![4, 5, 6, 7]);
    }

    #[test]
    fn json_shape() {
        let g = decompose(&Graph::chimney(2)).unwrap();
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(
            s,
            r#"{"n":4,"edges":[[0,1],[0,2],[0,3],[1,2],[1,3]],"e0":[[0,1],[0,2],[0,3],[1,2],[1,3]],"e1":[],"components":[{"kind":"chimney","n":2,"centre":[0,1],"apexes":[2,3]}]}"#
        );
        let back: GoodGraph = serde_json::from_str(&s).unwrap();
        assert_eq!(back.reindexed(), g);
    }
}
