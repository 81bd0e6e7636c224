//! Spatial multiplex network data model and the projection construction that
//! turns interlayer weight prediction into per-candidate-link graph regression.
//!
//! A multiplex network keeps one shared node set across layers: every node has
//! a single spatial position used by all of its replicas, while features and
//! intralayer edges are per layer. Interlayer edges connect adjacent layers
//! and carry the ground-truth weights the model learns to predict.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

/// 2-D node coordinate, shared by all replicas of a node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub fn new(x: f64, y: f64) -> Self {
        Position { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Offset `other - self` as a 2-vector.
    pub fn delta_to(&self, other: &Position) -> [f64; 2] {
        [other.x - self.x, other.y - self.y]
    }
}

/// Undirected weighted edge inside one layer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntraEdge {
    pub layer: usize,
    pub u: usize,
    pub v: usize,
    #[serde(rename = "w")]
    pub weight: f64,
}

/// Weighted edge between replicas in adjacent layers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterEdge {
    #[serde(rename = "lp")]
    pub layer_u: usize,
    pub u: usize,
    #[serde(rename = "lq")]
    pub layer_v: usize,
    pub v: usize,
    #[serde(rename = "w")]
    pub weight: f64,
}

/// Spatial multiplex network: shared positions, per-layer scalar features,
/// per-layer intralayer edges, and interlayer edges between adjacent layers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpatialMultiplexNetwork {
    pub num_layers: usize,
    /// One position per node index; replicas share the entry.
    pub positions: Vec<Position>,
    /// `features[layer][node]` — scalar node features.
    pub features: Vec<Vec<f64>>,
    pub intra_edges: Vec<IntraEdge>,
    pub inter_edges: Vec<InterEdge>,
}

/// A failed network invariant, reported rather than thrown.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    TooFewLayers { num_layers: usize },
    FeatureLayerCount { expected: usize, found: usize },
    FeatureLength { layer: usize, expected: usize, found: usize },
    NonFinitePosition { node: usize },
    NonFiniteFeature { layer: usize, node: usize },
    IntraSelfLoop { layer: usize, node: usize },
    IntraLayerOutOfRange { layer: usize, u: usize, v: usize },
    IntraNodeOutOfRange { layer: usize, u: usize, v: usize },
    DuplicateIntraEdge { layer: usize, u: usize, v: usize },
    NonAdjacentInterlayerEdge { layer_u: usize, u: usize, layer_v: usize, v: usize },
    InterLayerOutOfRange { layer_u: usize, u: usize, layer_v: usize, v: usize },
    InterNodeOutOfRange { layer_u: usize, u: usize, layer_v: usize, v: usize },
    DuplicateInterEdge { layer_u: usize, u: usize, layer_v: usize, v: usize },
    NonFiniteWeight { description: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::TooFewLayers { num_layers } => {
                write!(f, "too few layers: {num_layers} (need at least 2)")
            }
            Violation::FeatureLayerCount { expected, found } => {
                write!(f, "feature table has {found} layers, expected {expected}")
            }
            Violation::FeatureLength { layer, expected, found } => {
                write!(f, "layer {layer} has {found} features, expected {expected}")
            }
            Violation::NonFinitePosition { node } => {
                write!(f, "non-finite position at node {node}")
            }
            Violation::NonFiniteFeature { layer, node } => {
                write!(f, "non-finite feature at layer {layer}, node {node}")
            }
            Violation::IntraSelfLoop { layer, node } => {
                write!(f, "intralayer self-loop at layer {layer}, node {node}")
            }
            Violation::IntraLayerOutOfRange { layer, u, v } => {
                write!(f, "intralayer edge ({u},{v}) names out-of-range layer {layer}")
            }
            Violation::IntraNodeOutOfRange { layer, u, v } => {
                write!(f, "intralayer edge ({u},{v}) in layer {layer} names an out-of-range node")
            }
            Violation::DuplicateIntraEdge { layer, u, v } => {
                write!(f, "duplicate intralayer edge ({u},{v}) in layer {layer}")
            }
            Violation::NonAdjacentInterlayerEdge { layer_u, u, layer_v, v } => {
                write!(
                    f,
                    "non-adjacent interlayer edge ({u}@{layer_u})-({v}@{layer_v})"
                )
            }
            Violation::InterLayerOutOfRange { layer_u, u, layer_v, v } => {
                write!(
                    f,
                    "interlayer edge ({u}@{layer_u})-({v}@{layer_v}) names an out-of-range layer"
                )
            }
            Violation::InterNodeOutOfRange { layer_u, u, layer_v, v } => {
                write!(
                    f,
                    "interlayer edge ({u}@{layer_u})-({v}@{layer_v}) names an out-of-range node"
                )
            }
            Violation::DuplicateInterEdge { layer_u, u, layer_v, v } => {
                write!(f, "duplicate interlayer edge ({u}@{layer_u})-({v}@{layer_v})")
            }
            Violation::NonFiniteWeight { description } => {
                write!(f, "non-finite weight on {description}")
            }
        }
    }
}

impl SpatialMultiplexNetwork {
    /// Number of nodes per layer (the shared node set).
    pub fn num_nodes(&self) -> usize {
        self.positions.len()
    }

    /// Checks every invariant and returns the list of failures; empty means valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.num_nodes();

        if self.num_layers < 2 {
            out.push(Violation::TooFewLayers { num_layers: self.num_layers });
        }
        if self.features.len() != self.num_layers {
            out.push(Violation::FeatureLayerCount {
                expected: self.num_layers,
                found: self.features.len(),
            });
        }
        for (layer, feats) in self.features.iter().enumerate() {
            if feats.len() != n {
                out.push(Violation::FeatureLength { layer, expected: n, found: feats.len() });
            }
            for (node, x) in feats.iter().enumerate() {
                if !x.is_finite() {
                    out.push(Violation::NonFiniteFeature { layer, node });
                }
            }
        }
        for (node, pos) in self.positions.iter().enumerate() {
            if !pos.is_finite() {
                out.push(Violation::NonFinitePosition { node });
            }
        }

        let mut seen_intra = HashSet::new();
        for e in &self.intra_edges {
            if e.u == e.v {
                out.push(Violation::IntraSelfLoop { layer: e.layer, node: e.u });
            }
            if e.layer >= self.num_layers {
                out.push(Violation::IntraLayerOutOfRange { layer: e.layer, u: e.u, v: e.v });
            }
            if e.u >= n || e.v >= n {
                out.push(Violation::IntraNodeOutOfRange { layer: e.layer, u: e.u, v: e.v });
            }
            let key = (e.layer, e.u.min(e.v), e.u.max(e.v));
            if !seen_intra.insert(key) {
                out.push(Violation::DuplicateIntraEdge { layer: key.0, u: key.1, v: key.2 });
            }
            if !e.weight.is_finite() {
                out.push(Violation::NonFiniteWeight {
                    description: format!("intralayer edge ({},{}) in layer {}", e.u, e.v, e.layer),
                });
            }
        }

        let mut seen_inter = HashSet::new();
        for e in &self.inter_edges {
            let ids = (e.layer_u, e.u, e.layer_v, e.v);
            if e.layer_u >= self.num_layers || e.layer_v >= self.num_layers {
                out.push(Violation::InterLayerOutOfRange {
                    layer_u: ids.0, u: ids.1, layer_v: ids.2, v: ids.3,
                });
            } else if e.layer_u.abs_diff(e.layer_v) != 1 {
                out.push(Violation::NonAdjacentInterlayerEdge {
                    layer_u: ids.0, u: ids.1, layer_v: ids.2, v: ids.3,
                });
            }
            if e.u >= n || e.v >= n {
                out.push(Violation::InterNodeOutOfRange {
                    layer_u: ids.0, u: ids.1, layer_v: ids.2, v: ids.3,
                });
            }
            let key = if e.layer_u <= e.layer_v {
                (e.layer_u, e.u, e.layer_v, e.v)
            } else {
                (e.layer_v, e.v, e.layer_u, e.u)
            };
            if !seen_inter.insert(key) {
                out.push(Violation::DuplicateInterEdge {
                    layer_u: key.0, u: key.1, layer_v: key.2, v: key.3,
                });
            }
            if !e.weight.is_finite() {
                out.push(Violation::NonFiniteWeight {
                    description: format!(
                        "interlayer edge ({}@{})-({}@{})",
                        e.u, e.layer_u, e.v, e.layer_v
                    ),
                });
            }
        }

        out
    }

    /// Adjacency lists for one layer's intralayer edges, neighbor lists sorted.
    pub fn intra_adjacency(&self, layer: usize) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.num_nodes()];
        for e in &self.intra_edges {
            if e.layer == layer {
                adj[e.u].push(e.v);
                adj[e.v].push(e.u);
            }
        }
        for nbrs in &mut adj {
            nbrs.sort_unstable();
            nbrs.dedup();
        }
        adj
    }
}

/// One interlayer node pair whose weight is to be predicted. Layers are
/// adjacent and ordered `source_layer < target_layer`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateLink {
    pub source_layer: usize,
    pub source_node: usize,
    pub target_layer: usize,
    pub target_node: usize,
    pub true_weight: Option<f64>,
}

/// Enumerates every candidate interlayer link once.
///
/// For each adjacent layer pair (p, p+1) and every ordered node pair (i, j),
/// including the diagonal i = j, yields one candidate; `true_weight` is filled
/// from the network's interlayer edges when one exists for the pair. The count
/// is always `(num_layers - 1) * num_nodes^2`.
pub fn candidate_links(net: &SpatialMultiplexNetwork) -> Vec<CandidateLink> {
    let n = net.num_nodes();
    let mut labels: HashMap<(usize, usize, usize, usize), f64> = HashMap::new();
    for e in &net.inter_edges {
        let key = if e.layer_u <= e.layer_v {
            (e.layer_u, e.u, e.layer_v, e.v)
        } else {
            (e.layer_v, e.v, e.layer_u, e.u)
        };
        labels.insert(key, e.weight);
    }

    let mut out = Vec::with_capacity((net.num_layers - 1) * n * n);
    for p in 0..net.num_layers - 1 {
        let q = p + 1;
        for i in 0..n {
            for j in 0..n {
                out.push(CandidateLink {
                    source_layer: p,
                    source_node: i,
                    target_layer: q,
                    target_node: j,
                    true_weight: labels.get(&(p, i, q, j)).copied(),
                });
            }
        }
    }
    out
}

/// Single-layer graph scored by the model for one candidate link.
///
/// Node 0 is the projected replica of the source node (its feature and
/// position injected into the target layer); the remaining nodes are the
/// target node and its intralayer neighborhood, in ascending target-layer
/// node order. The edge set is the target layer's intralayer edges restricted
/// to the included nodes plus the single edge from the projected node to the
/// target.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedGraph {
    pub node_features: Vec<f64>,
    pub node_positions: Vec<Position>,
    /// Undirected edges as index pairs with `a < b`, sorted.
    pub edges: Vec<(usize, usize)>,
    pub projected_index: usize,
    pub target_index: usize,
    neighbors: Vec<Vec<usize>>,
}

impl ProjectedGraph {
    /// Builds a graph from parts, normalizing and deduplicating edges.
    ///
    /// Panics if an edge index is out of range or a self-loop.
    pub fn new(
        node_features: Vec<f64>,
        node_positions: Vec<Position>,
        edges: Vec<(usize, usize)>,
        projected_index: usize,
        target_index: usize,
    ) -> Self {
        let n = node_features.len();
        assert_eq!(n, node_positions.len(), "feature/position length mismatch");
        assert!(projected_index < n && target_index < n);
        let mut canon: Vec<(usize, usize)> = edges
            .into_iter()
            .map(|(a, b)| {
                assert!(a < n && b < n, "edge index out of range");
                assert_ne!(a, b, "self-loop");
                (a.min(b), a.max(b))
            })
            .collect();
        canon.sort_unstable();
        canon.dedup();

        let mut neighbors = vec![Vec::new(); n];
        for &(a, b) in &canon {
            neighbors[a].push(b);
            neighbors[b].push(a);
        }
        for nbrs in &mut neighbors {
            nbrs.sort_unstable();
        }

        ProjectedGraph {
            node_features,
            node_positions,
            edges: canon,
            projected_index,
            target_index,
            neighbors,
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.node_features.len()
    }

    /// Sorted neighbor lists per node.
    pub fn neighbors(&self) -> &[Vec<usize>] {
        &self.neighbors
    }
}

/// Projects the candidate's source node into the target layer and assembles
/// the per-link graph the convolution runs on.
///
/// The node set is the projected node, the target node j, and j's intralayer
/// neighbors in the target layer. An isolated target yields the two-node
/// graph with the single projected-target edge.
pub fn build_projected_graph(
    net: &SpatialMultiplexNetwork,
    link: &CandidateLink,
) -> ProjectedGraph {
    assert!(
        link.source_layer.abs_diff(link.target_layer) == 1,
        "candidate link must span adjacent layers"
    );
    let q = link.target_layer;
    let j = link.target_node;

    let mut included: Vec<usize> = Vec::new();
    for e in &net.intra_edges {
        if e.layer == q {
            if e.u == j {
                included.push(e.v);
            } else if e.v == j {
                included.push(e.u);
            }
        }
    }
    included.push(j);
    included.sort_unstable();
    included.dedup();

    let index_of: HashMap<usize, usize> =
        included.iter().enumerate().map(|(rank, &v)| (v, rank + 1)).collect();

    let mut features = Vec::with_capacity(included.len() + 1);
    let mut positions = Vec::with_capacity(included.len() + 1);
    features.push(net.features[link.source_layer][link.source_node]);
    positions.push(net.positions[link.source_node]);
    for &v in &included {
        features.push(net.features[q][v]);
        positions.push(net.positions[v]);
    }

    let mut edges = Vec::new();
    for e in &net.intra_edges {
        if e.layer == q {
            if let (Some(&a), Some(&b)) = (index_of.get(&e.u), index_of.get(&e.v)) {
                edges.push((a, b));
            }
        }
    }
    let target_index = index_of[&j];
    edges.push((0, target_index));

    ProjectedGraph::new(features, positions, edges, 0, target_index)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Fully connected multiplex with unit weights and simple features.
    pub(crate) fn complete_net(num_layers: usize, n: usize) -> SpatialMultiplexNetwork {
        let positions = (0..n)
            .map(|i| Position::new(i as f64 / n as f64, (i * i) as f64 / (n * n) as f64))
            .collect();
        let features = (0..num_layers)
            .map(|l| (0..n).map(|i| 0.1 * (l * n + i) as f64).collect())
            .collect();
        let mut intra_edges = Vec::new();
        for l in 0..num_layers {
            for u in 0..n {
                for v in u + 1..n {
                    intra_edges.push(IntraEdge { layer: l, u, v, weight: 1.0 });
                }
            }
        }
        let mut inter_edges = Vec::new();
        for p in 0..num_layers - 1 {
            for u in 0..n {
                for v in 0..n {
                    inter_edges.push(InterEdge {
                        layer_u: p,
                        u,
                        layer_v: p + 1,
                        v,
                        weight: 0.5,
                    });
                }
            }
        }
        SpatialMultiplexNetwork { num_layers, positions, features, intra_edges, inter_edges }
    }

    #[test]
    fn validate_accepts_well_formed_network() {
        assert!(complete_net(2, 3).validate().is_empty());
    }

    #[test]
    fn validate_flags_non_adjacent_interlayer_edge() {
        let mut net = complete_net(3, 3);
        net.inter_edges.push(InterEdge { layer_u: 0, u: 0, layer_v: 2, v: 1, weight: 0.5 });
        let violations = net.validate();
        assert_eq!(violations.len(), 1);
        assert!(matches!(violations[0], Violation::NonAdjacentInterlayerEdge { .. }));
        assert!(violations[0].to_string().contains("non-adjacent interlayer edge"));
    }

    #[test]
    fn validate_flags_non_finite_weight() {
        let mut net = complete_net(2, 3);
        net.intra_edges[0].weight = f64::NAN;
        let violations = net.validate();
        assert_eq!(violations.len(), 1);
        assert!(matches!(violations[0], Violation::NonFiniteWeight { .. }));
        assert!(violations[0].to_string().contains("non-finite weight"));
    }

    #[test]
    fn validate_flags_duplicate_intra_edge_after_normalization() {
        let mut net = complete_net(2, 3);
        net.intra_edges.push(IntraEdge { layer: 0, u: 1, v: 0, weight: 0.2 });
        let violations = net.validate();
        assert_eq!(violations.len(), 1);
        assert!(matches!(violations[0], Violation::DuplicateIntraEdge { layer: 0, u: 0, v: 1 }));
    }

    #[test]
    fn candidate_counts_match_closed_form() {
        assert_eq!(candidate_links(&complete_net(2, 3)).len(), 9);
        assert_eq!(candidate_links(&complete_net(3, 4)).len(), 32);
    }

    #[test]
    fn candidates_carry_labels_when_all_pairs_are_present() {
        let net = complete_net(2, 2);
        let candidates = candidate_links(&net);
        assert_eq!(candidates.len(), 4);
        assert!(candidates.iter().all(|c| c.true_weight == Some(0.5)));
    }

    #[test]
    fn candidates_are_exhaustive_and_duplicate_free() {
        for layers in 2..=3 {
            for n in 1..=5 {
                let net = complete_net(layers, n);
                let candidates = candidate_links(&net);
                assert_eq!(candidates.len(), (layers - 1) * n * n);
                let mut keys: Vec<_> = candidates
                    .iter()
                    .map(|c| (c.source_layer, c.source_node, c.target_layer, c.target_node))
                    .collect();
                keys.sort_unstable();
                keys.dedup();
                assert_eq!(keys.len(), candidates.len(), "duplicate candidate found");
                for c in &candidates {
                    assert_eq!(c.target_layer, c.source_layer + 1);
                }
            }
        }
    }

    #[test]
    fn projection_of_complete_layer_includes_whole_neighborhood() {
        let net = complete_net(2, 3);
        let link = CandidateLink {
            source_layer: 0,
            source_node: 0,
            target_layer: 1,
            target_node: 1,
            true_weight: Some(0.5),
        };
        let g = build_projected_graph(&net, &link);
        assert_eq!(g.num_nodes(), 4); // projected node + all of layer 1
        assert_eq!(g.projected_index, 0);
        assert_eq!(g.target_index, 2); // nodes: [proj, 0, 1, 2]
        // layer-1 triangle plus the projected edge
        assert_eq!(g.edges, vec![(0, 2), (1, 2), (1, 3), (2, 3)]);
        assert_eq!(g.node_features[0], net.features[0][0]);
        assert_eq!(g.node_positions[0], net.positions[0]);
    }

    #[test]
    fn diagonal_projection_shares_position_with_target() {
        let net = complete_net(2, 4);
        for i in 0..4 {
            let link = CandidateLink {
                source_layer: 0,
                source_node: i,
                target_layer: 1,
                target_node: i,
                true_weight: None,
            };
            let g = build_projected_graph(&net, &link);
            let delta = g.node_positions[g.projected_index]
                .delta_to(&g.node_positions[g.target_index]);
            assert_eq!(delta, [0.0, 0.0]);
        }
    }

    #[test]
    fn projection_on_path_keeps_only_target_neighborhood() {
        // layer topology 0-1-2 in both layers
        let mut net = complete_net(2, 3);
        net.intra_edges = vec![
            IntraEdge { layer: 0, u: 0, v: 1, weight: 1.0 },
            IntraEdge { layer: 0, u: 1, v: 2, weight: 1.0 },
            IntraEdge { layer: 1, u: 0, v: 1, weight: 1.0 },
            IntraEdge { layer: 1, u: 1, v: 2, weight: 1.0 },
        ];
        let link = CandidateLink {
            source_layer: 0,
            source_node: 0,
            target_layer: 1,
            target_node: 2,
            true_weight: None,
        };
        let g = build_projected_graph(&net, &link);
        // included layer-1 nodes: {1, 2}; nodes: [proj, 1, 2]
        assert_eq!(g.num_nodes(), 3);
        assert_eq!(g.target_index, 2);
        assert_eq!(g.edges, vec![(0, 2), (1, 2)]);
    }

    #[test]
    fn isolated_target_yields_two_node_graph() {
        let mut net = complete_net(2, 3);
        net.intra_edges.retain(|e| e.layer != 1);
        let link = CandidateLink {
            source_layer: 0,
            source_node: 2,
            target_layer: 1,
            target_node: 0,
            true_weight: None,
        };
        let g = build_projected_graph(&net, &link);
        assert_eq!(g.num_nodes(), 2);
        assert_eq!(g.edges, vec![(0, 1)]);
        assert_eq!(g.target_index, 1);
    }

    #[test]
    fn projection_is_independent_of_edge_storage_order() {
        let net = complete_net(2, 5);
        let mut shuffled = net.clone();
        shuffled.intra_edges.reverse();
        shuffled.intra_edges.swap(0, 3);
        for link in candidate_links(&net) {
            assert_eq!(
                build_projected_graph(&net, &link),
                build_projected_graph(&shuffled, &link)
            );
        }
    }

    #[test]
    fn projection_is_connected_from_target() {
        let net = complete_net(3, 5);
        for link in candidate_links(&net) {
            let g = build_projected_graph(&net, &link);
            let mut seen = vec![false; g.num_nodes()];
            let mut stack = vec![g.target_index];
            seen[g.target_index] = true;
            while let Some(v) = stack.pop() {
                for &w in &g.neighbors()[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            assert!(seen.iter().all(|&s| s), "unreachable node in projected graph");
        }
    }
}
