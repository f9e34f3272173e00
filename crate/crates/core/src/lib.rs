//! Generalized network autoregressive (GNAR) modelling.
//!
//! A GNAR process is a multivariate time series attached to the nodes of an
//! undirected graph. Each node regresses on its own past and on weighted
//! aggregates of its r-stage neighbours' past, optionally with separate
//! coefficient sets per node community and directed inter-community
//! interaction terms.
//!
//! The crate covers the full modelling cycle:
//!
//! * graph and r-stage adjacency machinery ([`graph`]),
//! * connection weights with community/interaction masks and missing-data
//!   reweighting ([`weights`]),
//! * model-order bookkeeping and the flat coefficient layout ([`order`]),
//! * VAR-representation matrices and stationarity checks ([`varrep`]),
//! * forward simulation ([`sim`]),
//! * conditional least-squares estimation and finite-sample error bounds
//!   ([`design`], [`fit`], [`bounds`]),
//! * network autocorrelation diagnostics and Corbit tables ([`acf`]),
//! * forecasting, transforms and baselines ([`forecast`]),
//! * panel/edge/community CSV ingestion plus the bundled election pipeline
//!   ([`panel`], [`election`]),
//! * Monte Carlo recovery and bound-coverage studies ([`study`]).
//!
//! All numerical routines are generic over the scalar type through the
//! [`Real`] trait; `f64` aliases for the main types live at the crate root.

pub mod acf;
pub mod bounds;
pub mod design;
pub mod election;
pub mod error;
pub mod fit;
pub mod forecast;
pub mod graph;
pub mod order;
pub mod panel;
pub mod presets;
pub mod scalar;
pub mod sim;
pub mod study;
pub mod svg;
pub mod varrep;
pub mod weights;

pub use error::{Error, Result};
pub use graph::{CommunityPartition, Network, StageAdjacency};
pub use scalar::Real;

/// `f64` weights matrix, the variant the CLI works with.
pub type WeightsMatrix = weights::WeightsMatrix<f64>;
/// `f64` weights sequence.
pub type WeightsSequence = weights::WeightsSequence<f64>;
/// `f64` coefficient vector.
pub type ParameterVector = order::ParameterVector<f64>;
/// `f64` realization.
pub type Realization = sim::Realization<f64>;
/// `f64` design system.
pub type DesignSystem = design::DesignSystem<f64>;
/// `f64` fit result.
pub type FitResult = fit::FitResult<f64>;
/// `f64` bound report.
pub type BoundReport = bounds::BoundReport<f64>;
/// `f64` Corbit table.
pub type CorbitTable = acf::CorbitTable<f64>;
/// `f64` panel.
pub type Panel = panel::Panel<f64>;
