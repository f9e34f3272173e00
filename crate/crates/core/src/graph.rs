//! Undirected graphs, r-stage adjacency and node communities.
//!
//! Nodes are addressed 1-based in construction APIs and error messages,
//! matching the usual statistical indexing; matrix rows and columns are
//! 0-based.

use std::collections::BTreeSet;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Sentinel for an unreachable node pair.
pub const UNREACHABLE: u32 = u32::MAX;

/// An undirected, simple graph on `d` nodes.
///
/// Isolated nodes are allowed; self-loops and duplicate edges are not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    node_count: usize,
    /// Edges stored with the smaller 0-based endpoint first.
    edges: BTreeSet<(usize, usize)>,
    labels: Option<Vec<String>>,
}

impl Network {
    /// Builds a network from 1-based edge endpoints, deduplicating
    /// symmetric and repeated pairs.
    pub fn from_edge_list(edge_list: &[(usize, usize)], node_count: usize) -> Result<Self> {
        let mut edges = BTreeSet::new();
        for &(a, b) in edge_list {
            if a == 0 || a > node_count {
                return Err(Error::NodeOutOfRange {
                    index: a,
                    count: node_count,
                });
            }
            if b == 0 || b > node_count {
                return Err(Error::NodeOutOfRange {
                    index: b,
                    count: node_count,
                });
            }
            if a == b {
                return Err(Error::SelfLoop { node: a });
            }
            let (lo, hi) = if a < b { (a - 1, b - 1) } else { (b - 1, a - 1) };
            edges.insert((lo, hi));
        }
        Ok(Self {
            node_count,
            edges,
            labels: None,
        })
    }

    /// Attaches display labels to the nodes.
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.node_count {
            return Err(Error::DimensionMismatch {
                context: "node labels",
                expected: self.node_count,
                got: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as 0-based pairs `(i, j)` with `i < j`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// 0-based adjacency lists.
    pub fn adjacency_lists(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.node_count];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    /// All-pairs shortest path lengths by per-source BFS.
    ///
    /// Entry `(i, j)` is the hop distance, [`UNREACHABLE`] when no path
    /// exists, and 0 on the diagonal. Supported scale is dense matrices,
    /// `d <= 4096`.
    pub fn shortest_path_lengths(&self) -> DMatrix<u32> {
        let d = self.node_count;
        let adj = self.adjacency_lists();
        let mut dist = DMatrix::from_element(d, d, UNREACHABLE);
        let mut queue = std::collections::VecDeque::new();
        for source in 0..d {
            dist[(source, source)] = 0;
            queue.clear();
            queue.push_back(source);
            while let Some(u) = queue.pop_front() {
                let du = dist[(source, u)];
                for &v in &adj[u] {
                    if dist[(source, v)] == UNREACHABLE {
                        dist[(source, v)] = du + 1;
                        queue.push_back(v);
                    }
                }
            }
        }
        dist
    }

    /// Longest finite shortest-path length in the graph (0 when no edges).
    pub fn max_stage(&self) -> usize {
        let dist = self.shortest_path_lengths();
        let mut r_max = 0u32;
        for v in dist.iter() {
            if *v != UNREACHABLE && *v > r_max {
                r_max = *v;
            }
        }
        r_max as usize
    }
}

/// Indicator matrix of node pairs at shortest-path distance exactly `r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageAdjacency {
    stage: usize,
    mat: DMatrix<bool>,
}

impl StageAdjacency {
    #[cfg(test)]
    pub(crate) fn from_parts(stage: usize, mat: DMatrix<bool>) -> Self {
        Self { stage, mat }
    }

    /// Restriction to a node subset, preserving the stage label.
    pub(crate) fn restrict(&self, nodes: &[usize]) -> Self {
        let mat = DMatrix::from_fn(nodes.len(), nodes.len(), |a, b| {
            self.mat[(nodes[a], nodes[b])]
        });
        Self {
            stage: self.stage,
            mat,
        }
    }

    pub fn stage(&self) -> usize {
        self.stage
    }

    pub fn matrix(&self) -> &DMatrix<bool> {
        &self.mat
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.mat[(i, j)]
    }

    /// 0-based r-stage neighbours of node `i`.
    pub fn neighbours(&self, i: usize) -> Vec<usize> {
        (0..self.mat.ncols()).filter(|&j| self.mat[(i, j)]).collect()
    }
}

/// Computes `S_1..S_R` with `R = min(r_max_request, realized r_max)`.
///
/// Unreachable pairs appear in no stage matrix; an empty edge set yields an
/// empty list.
pub fn stage_adjacency(net: &Network, r_max_request: usize) -> Vec<StageAdjacency> {
    let d = net.node_count();
    let dist = net.shortest_path_lengths();
    let mut realized = 0u32;
    for v in dist.iter() {
        if *v != UNREACHABLE && *v > realized {
            realized = *v;
        }
    }
    let r_top = (realized as usize).min(r_max_request);
    (1..=r_top)
        .map(|r| {
            let mat = DMatrix::from_fn(d, d, |i, j| dist[(i, j)] == r as u32);
            StageAdjacency { stage: r, mat }
        })
        .collect()
}

/// Disjoint covering node communities, labelled `1..=C`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommunityPartition {
    labels: Vec<usize>,
    community_count: usize,
    members: Vec<Vec<usize>>,
}

impl CommunityPartition {
    /// `labels[i]` is the community of 0-based node `i`, valued in
    /// `1..=community_count`. Empty communities are allowed.
    pub fn new(labels: Vec<usize>, community_count: usize) -> Result<Self> {
        let mut members = vec![Vec::new(); community_count];
        for (node, &label) in labels.iter().enumerate() {
            if label == 0 || label > community_count {
                return Err(Error::CommunityOutOfRange {
                    label,
                    count: community_count,
                });
            }
            members[label - 1].push(node);
        }
        Ok(Self {
            labels,
            community_count,
            members,
        })
    }

    /// Single community covering all nodes.
    pub fn single(node_count: usize) -> Self {
        Self::new(vec![1; node_count], 1).expect("single community is always valid")
    }

    /// One community per node, `C = d`.
    pub fn singletons(node_count: usize) -> Self {
        Self::new((1..=node_count).collect(), node_count).expect("singletons are always valid")
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn community_count(&self) -> usize {
        self.community_count
    }

    /// Community label (1-based) of 0-based node `i`.
    pub fn label_of(&self, node: usize) -> usize {
        self.labels[node]
    }

    /// 0-based members of community `c` (1-based).
    pub fn members(&self, community: usize) -> &[usize] {
        &self.members[community - 1]
    }

    pub fn size(&self, community: usize) -> usize {
        self.members[community - 1].len()
    }

    /// Size of the smallest community.
    pub fn min_size(&self) -> usize {
        self.members.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Indicator vector xi_c as 0.0/1.0 entries.
    pub fn indicator<T: crate::Real>(&self, community: usize) -> nalgebra::DVector<T> {
        nalgebra::DVector::from_fn(self.labels.len(), |i, _| {
            if self.labels[i] == community {
                T::one()
            } else {
                T::zero()
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn path_graph_construction() {
        let net = Network::from_edge_list(&[(1, 2), (2, 3)], 3).unwrap();
        assert_eq!(net.node_count(), 3);
        assert_eq!(net.edge_count(), 2);
    }

    #[test]
    fn symmetric_pairs_deduplicate() {
        let net = Network::from_edge_list(&[(1, 2), (2, 1)], 2).unwrap();
        assert_eq!(net.edge_count(), 1);
    }

    #[test]
    fn self_loop_rejected() {
        let err = Network::from_edge_list(&[(1, 1)], 2).unwrap_err();
        assert!(err.to_string().contains("self-loop"));
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(Network::from_edge_list(&[(1, 4)], 3).is_err());
        assert!(Network::from_edge_list(&[(0, 1)], 3).is_err());
    }

    #[test]
    fn path_graph_stages() {
        let net = Network::from_edge_list(&[(1, 2), (2, 3)], 3).unwrap();
        let stages = stage_adjacency(&net, 5);
        assert_eq!(stages.len(), 2);
        assert!(stages[0].contains(0, 1));
        assert!(stages[0].contains(1, 2));
        assert!(!stages[0].contains(0, 2));
        assert!(stages[1].contains(0, 2));
        assert!(!stages[1].contains(0, 1));
    }

    #[test]
    fn star_graph_stages_match_floyd_warshall() {
        // 4-node star with centre 1.
        let net = Network::from_edge_list(&[(1, 2), (1, 3), (1, 4)], 4).unwrap();
        let stages = stage_adjacency(&net, 10);
        let oracle = floyd_warshall(&net);
        assert_eq!(stages.len(), 2);
        for (i, j) in [(1usize, 2usize), (1, 3), (2, 3)] {
            assert_eq!(oracle[(i, j)], 2);
            assert!(stages[1].contains(i, j));
        }
        for leaf in 1..4 {
            assert!(stages[0].contains(0, leaf));
        }
    }

    #[test]
    fn empty_graph_has_no_stages() {
        let net = Network::from_edge_list(&[], 3).unwrap();
        assert!(stage_adjacency(&net, 4).is_empty());
        assert_eq!(net.max_stage(), 0);
    }

    #[test]
    fn partition_roundtrip() {
        let part = CommunityPartition::new(vec![1, 2, 1], 2).unwrap();
        assert_eq!(part.members(1), &[0, 2]);
        assert_eq!(part.members(2), &[1]);
        assert_eq!(part.min_size(), 1);
        let xi = part.indicator::<f64>(1);
        assert_eq!(xi.as_slice(), &[1.0, 0.0, 1.0]);
    }

    #[test]
    fn partition_rejects_bad_label() {
        assert!(CommunityPartition::new(vec![1, 3], 2).is_err());
        assert!(CommunityPartition::new(vec![0, 1], 2).is_err());
    }

    fn floyd_warshall(net: &Network) -> DMatrix<u32> {
        let d = net.node_count();
        let inf = u32::MAX / 4;
        let mut dist = DMatrix::from_element(d, d, inf);
        for i in 0..d {
            dist[(i, i)] = 0;
        }
        for (a, b) in net.edges() {
            dist[(a, b)] = 1;
            dist[(b, a)] = 1;
        }
        for k in 0..d {
            for i in 0..d {
                for j in 0..d {
                    let via = dist[(i, k)].saturating_add(dist[(k, j)]);
                    if via < dist[(i, j)] {
                        dist[(i, j)] = via;
                    }
                }
            }
        }
        dist.map(|v| if v >= inf { UNREACHABLE } else { v })
    }

    proptest! {
        // BFS distances agree with an independent Floyd-Warshall oracle on
        // every small random graph, and the stage matrices partition the
        // reachable pairs.
        #[test]
        fn stages_match_oracle(d in 2usize..=12, edges in proptest::collection::vec((0usize..12, 0usize..12), 0..40)) {
            let list: Vec<(usize, usize)> = edges
                .into_iter()
                .map(|(a, b)| (a % d + 1, b % d + 1))
                .filter(|(a, b)| a != b)
                .collect();
            let net = Network::from_edge_list(&list, d).unwrap();
            let oracle = floyd_warshall(&net);
            let stages = stage_adjacency(&net, d);
            for i in 0..d {
                for j in 0..d {
                    let hit: Vec<usize> = stages
                        .iter()
                        .filter(|s| s.contains(i, j))
                        .map(StageAdjacency::stage)
                        .collect();
                    if i != j && oracle[(i, j)] != UNREACHABLE {
                        prop_assert_eq!(hit.len(), 1);
                        prop_assert_eq!(hit[0] as u32, oracle[(i, j)]);
                    } else {
                        prop_assert!(hit.is_empty());
                    }
                }
            }
        }
    }
}
