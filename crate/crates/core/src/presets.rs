//! Ready-made demonstration configurations shared by the CLI and the
//! test suites.

use crate::error::Result;
use crate::graph::{stage_adjacency, CommunityPartition, Network, StageAdjacency};
use crate::order::{CommunityOrder, ModelOrder, ParameterVector};
use crate::scalar::Real;
use crate::weights::{equal_weights, WeightsSequence};

/// Five-node demonstration network: a triangle community bridged to an
/// edge community.
pub fn five_net() -> Network {
    Network::from_edge_list(&[(1, 2), (1, 5), (2, 3), (2, 4), (3, 4), (4, 5)], 5)
        .expect("static edge list is valid")
}

/// Two communities on [`five_net`]: the triangle {2, 3, 4} and the pair
/// {1, 5}.
pub fn five_net_partition() -> CommunityPartition {
    CommunityPartition::new(vec![2, 1, 1, 1, 2], 2).expect("static labels are valid")
}

/// The two-community demonstration order: one lag and one stage for the
/// triangle, two lags with one stage each for the pair.
pub fn five_net_order() -> ModelOrder {
    ModelOrder::new(vec![
        CommunityOrder::new(1, vec![1], vec![]),
        CommunityOrder::new(2, vec![1, 1], vec![]),
    ])
    .expect("static order is valid")
}

/// The demonstration coefficients used throughout the simulation studies.
pub fn five_net_theta<T: Real>() -> ParameterVector<T> {
    let order = five_net_order();
    ParameterVector::new(
        [0.27, 0.18, 0.25, 0.30, 0.12, 0.20]
            .into_iter()
            .map(T::from_f64_lossy)
            .collect(),
        &order.layout(),
    )
    .expect("static coefficients match the layout")
}

/// Bundle of the five-node model pieces with equal weights.
pub fn five_net_setup<T: Real>() -> (
    Network,
    Vec<StageAdjacency>,
    CommunityPartition,
    ModelOrder,
    WeightsSequence<T>,
) {
    let net = five_net();
    let stages = stage_adjacency(&net, 2);
    let part = five_net_partition();
    let order = five_net_order();
    let weights = WeightsSequence::constant(equal_weights(&net, &stages));
    (net, stages, part, order, weights)
}

/// Three-community order used by the seasonal recovery study: lags
/// (3, 2, 1), stage depths ([2,2,1], [3,2], [3]) and interactions
/// ({3}, {3}, {1,2}); 35 coefficients on three communities.
pub fn seasonal_study_order() -> ModelOrder {
    ModelOrder::new(vec![
        CommunityOrder::new(3, vec![2, 2, 1], vec![3]),
        CommunityOrder::new(2, vec![3, 2], vec![3]),
        CommunityOrder::new(1, vec![3], vec![1, 2]),
    ])
    .expect("static order is valid")
}

/// Loads the bundled state network and its election-derived communities,
/// returning the pieces the seasonal study runs on.
pub fn usa_study_pieces() -> Result<(Network, Vec<StageAdjacency>, CommunityPartition)> {
    let dir = crate::election::default_fixture_dir();
    let panel: crate::panel::Panel<f64> = crate::panel::read_panel_csv(
        &dir.join("usa_election_panel.csv"),
        crate::panel::PanelSchema::WideNodeRows,
    )?;
    let net = crate::panel::read_edges_csv(&dir.join("usa_edges.csv"), Some(panel.node_ids()))?;
    let winners = crate::election::read_winner_records(
        &dir.join("usa_election_winners.csv"),
        panel.node_ids(),
        panel.time_labels(),
    )?;
    let part = crate::panel::classify_parties(&winners, 0.75)?;
    let stages = stage_adjacency(&net, net.max_stage());
    Ok((net, stages, part))
}
