//! Model orders, coefficient layout and specializations.
//!
//! A model order fixes, per community `c`, the maximum lag `p_c`, the
//! r-stage depths `s_1(c)..s_{p_c}(c)` and the interaction set `I_c`. The
//! flat coefficient vector enumerates, community by community and lag by
//! lag: the autoregressive coefficient, the within-community stage
//! coefficients, then the interaction coefficients with stage outermost
//! and the target community ascending innermost.
//!
//! Two specializations need extra structure:
//!
//! * communities without internal node pairs (singletons) carry no
//!   within-community coefficients at all, so the coordinate is absent
//!   rather than stored as zero;
//! * the local-alpha model ties all interaction coefficients of a given
//!   `(lag, stage)` to one shared coefficient. Tying lives in the layout,
//!   so estimation respects it automatically.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Order data for one community.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommunityOrder {
    /// Maximum lag `p_c >= 1`.
    pub max_lag: usize,
    /// Stage depth per lag, `s_k(c) >= 0`, length `p_c`.
    pub stage_depths: Vec<usize>,
    /// Communities whose neighbourhood values enter this community's
    /// equation (1-based, ascending, never the community itself).
    pub interactions: BTreeSet<usize>,
    /// Whether within-community coefficients exist. False for singleton
    /// communities, which have no internal node pairs.
    pub within: bool,
}

impl CommunityOrder {
    pub fn new(max_lag: usize, stage_depths: Vec<usize>, interactions: Vec<usize>) -> Self {
        Self {
            max_lag,
            stage_depths,
            interactions: interactions.into_iter().collect(),
            within: true,
        }
    }

    pub fn without_within(mut self) -> Self {
        self.within = false;
        self
    }

    /// Free-coefficient count for this community (before any tying).
    pub fn coefficient_count(&self) -> usize {
        let stage_sum: usize = self.stage_depths.iter().sum();
        let within = if self.within { stage_sum } else { 0 };
        self.max_lag + within + self.interactions.len() * stage_sum
    }
}

/// Coefficient-tying schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tying {
    /// Every coordinate is its own free coefficient.
    None,
    /// All interaction coefficients with equal `(lag, stage)` share one
    /// coefficient: the local-alpha model.
    LocalAlpha,
}

/// Complete model order for all communities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelOrder {
    communities: Vec<CommunityOrder>,
    tying: Tying,
}

impl ModelOrder {
    pub fn new(communities: Vec<CommunityOrder>) -> Result<Self> {
        Self::with_tying(communities, Tying::None)
    }

    pub fn with_tying(communities: Vec<CommunityOrder>, tying: Tying) -> Result<Self> {
        let count = communities.len();
        if count == 0 {
            return Err(Error::InvalidOrder("at least one community".to_string()));
        }
        for (idx, com) in communities.iter().enumerate() {
            let c = idx + 1;
            if com.max_lag == 0 {
                return Err(Error::InvalidOrder(format!(
                    "community {c}: maximum lag must be >= 1"
                )));
            }
            if com.stage_depths.len() != com.max_lag {
                return Err(Error::InvalidOrder(format!(
                    "community {c}: expected {} stage depths, got {}",
                    com.max_lag,
                    com.stage_depths.len()
                )));
            }
            for &other in &com.interactions {
                if other == 0 || other > count {
                    return Err(Error::InvalidOrder(format!(
                        "community {c}: interaction target {other} out of range 1..={count}"
                    )));
                }
                if other == c {
                    return Err(Error::InvalidOrder(format!(
                        "community {c}: cannot interact with itself"
                    )));
                }
            }
        }
        Ok(Self { communities, tying })
    }

    /// Global-alpha GNAR(p, [s_k]): one community covering every node.
    pub fn global(max_lag: usize, stage_depths: Vec<usize>) -> Result<Self> {
        Self::new(vec![CommunityOrder::new(max_lag, stage_depths, vec![])])
    }

    /// Local-alpha GNAR(p, [s_k]) on `d` nodes: singleton communities with
    /// node-specific autoregressive coefficients and one shared stage
    /// coefficient per `(lag, stage)`.
    pub fn local(node_count: usize, max_lag: usize, stage_depths: Vec<usize>) -> Result<Self> {
        let communities = (1..=node_count)
            .map(|c| {
                let interactions = (1..=node_count).filter(|&o| o != c).collect();
                CommunityOrder::new(max_lag, stage_depths.clone(), interactions).without_within()
            })
            .collect();
        Self::with_tying(communities, Tying::LocalAlpha)
    }

    /// Unconstrained VAR(p) on `d` nodes as a GNAR specialization:
    /// singleton communities on a fully connected graph with all
    /// interactions at stage one. Has `p d^2` free coefficients.
    pub fn unconstrained_var(node_count: usize, max_lag: usize) -> Result<Self> {
        let communities = (1..=node_count)
            .map(|c| {
                let interactions = (1..=node_count).filter(|&o| o != c).collect();
                CommunityOrder::new(max_lag, vec![1; max_lag], interactions).without_within()
            })
            .collect();
        Self::new(communities)
    }

    pub fn community_count(&self) -> usize {
        self.communities.len()
    }

    pub fn communities(&self) -> &[CommunityOrder] {
        &self.communities
    }

    pub fn community(&self, c: usize) -> &CommunityOrder {
        &self.communities[c - 1]
    }

    pub fn tying(&self) -> Tying {
        self.tying
    }

    /// Largest active lag across communities.
    pub fn max_lag(&self) -> usize {
        self.communities.iter().map(|c| c.max_lag).max().unwrap_or(0)
    }

    /// Deepest stage requested anywhere in the model.
    pub fn max_stage(&self) -> usize {
        self.communities
            .iter()
            .flat_map(|c| c.stage_depths.iter().copied())
            .max()
            .unwrap_or(0)
    }

    /// Structural coefficient count of community `c` (the Theorem-style
    /// `q_c`, with absent coordinates excluded).
    pub fn community_coefficients(&self, c: usize) -> usize {
        self.communities[c - 1].coefficient_count()
    }

    /// Total structural coefficient count, `q = sum_c q_c`.
    pub fn total_coefficients(&self) -> usize {
        self.communities.iter().map(|c| c.coefficient_count()).sum()
    }

    /// Builds the coordinate layout.
    pub fn layout(&self) -> ParamLayout {
        ParamLayout::build(self)
    }
}

/// One coefficient coordinate. All indices 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ParamCoord {
    /// Autoregressive coefficient `alpha_{k,c}`.
    Auto { lag: usize, community: usize },
    /// Within-community coefficient `beta_{k,r,c}`.
    Within {
        lag: usize,
        stage: usize,
        community: usize,
    },
    /// Interaction coefficient `gamma_{k,r,c:o}` for the effect of
    /// community `other` on `community`.
    Between {
        lag: usize,
        stage: usize,
        community: usize,
        other: usize,
    },
    /// Shared stage coefficient of a tied local-alpha layout.
    SharedWithin { lag: usize, stage: usize },
}

impl fmt::Display for ParamCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Auto { lag, community } => write!(f, "alpha_{{{lag},{community}}}"),
            Self::Within {
                lag,
                stage,
                community,
            } => write!(f, "beta_{{{lag},{stage},{community}}}"),
            Self::Between {
                lag,
                stage,
                community,
                other,
            } => write!(f, "gamma_{{{lag},{stage},{community}:{other}}}"),
            Self::SharedWithin { lag, stage } => write!(f, "beta_{{{lag},{stage}}}"),
        }
    }
}

/// Bijection between coefficient coordinates and flat indices, plus the
/// tying map from structural coordinates to free ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamLayout {
    structural: Vec<ParamCoord>,
    to_free: Vec<usize>,
    free: Vec<ParamCoord>,
    /// Structural index range per community (contiguous by construction).
    community_ranges: Vec<std::ops::Range<usize>>,
    tying: Tying,
}

impl ParamLayout {
    fn build(order: &ModelOrder) -> Self {
        let mut structural = Vec::new();
        let mut community_ranges = Vec::new();
        for (idx, com) in order.communities.iter().enumerate() {
            let c = idx + 1;
            let start = structural.len();
            for k in 1..=com.max_lag {
                structural.push(ParamCoord::Auto { lag: k, community: c });
                let depth = com.stage_depths[k - 1];
                if com.within {
                    for r in 1..=depth {
                        structural.push(ParamCoord::Within {
                            lag: k,
                            stage: r,
                            community: c,
                        });
                    }
                }
                for r in 1..=depth {
                    for &other in &com.interactions {
                        structural.push(ParamCoord::Between {
                            lag: k,
                            stage: r,
                            community: c,
                            other,
                        });
                    }
                }
            }
            community_ranges.push(start..structural.len());
        }

        let (to_free, free) = match order.tying {
            Tying::None => {
                let to_free: Vec<usize> = (0..structural.len()).collect();
                (to_free, structural.clone())
            }
            Tying::LocalAlpha => {
                // Free order: every alpha by (community, lag), then the
                // shared stage coefficients by (lag, stage).
                let mut free = Vec::new();
                for coord in &structural {
                    if let ParamCoord::Auto { .. } = coord {
                        free.push(*coord);
                    }
                }
                let alpha_count = free.len();
                let mut shared_index = std::collections::BTreeMap::new();
                for coord in &structural {
                    if let ParamCoord::Between { lag, stage, .. } = coord {
                        shared_index.entry((*lag, *stage)).or_insert(0usize);
                    }
                }
                for (slot, ((lag, stage), v)) in shared_index.iter_mut().enumerate() {
                    *v = alpha_count + slot;
                    free.push(ParamCoord::SharedWithin {
                        lag: *lag,
                        stage: *stage,
                    });
                }
                let mut alpha_seen = 0usize;
                let to_free = structural
                    .iter()
                    .map(|coord| match coord {
                        ParamCoord::Auto { .. } => {
                            let slot = alpha_seen;
                            alpha_seen += 1;
                            slot
                        }
                        ParamCoord::Between { lag, stage, .. } => shared_index[&(*lag, *stage)],
                        _ => unreachable!("local-alpha layouts have no within coordinates"),
                    })
                    .collect();
                (to_free, free)
            }
        };

        Self {
            structural,
            to_free,
            free,
            community_ranges,
            tying: order.tying,
        }
    }

    /// Structural coordinates in layout order.
    pub fn structural_coords(&self) -> &[ParamCoord] {
        &self.structural
    }

    /// Free coordinates (estimation targets).
    pub fn free_coords(&self) -> &[ParamCoord] {
        &self.free
    }

    pub fn free_len(&self) -> usize {
        self.free.len()
    }

    pub fn structural_len(&self) -> usize {
        self.structural.len()
    }

    pub fn tying(&self) -> Tying {
        self.tying
    }

    pub fn is_tied(&self) -> bool {
        self.tying != Tying::None
    }

    /// Free index of structural coordinate `idx`.
    pub fn free_index_of(&self, idx: usize) -> usize {
        self.to_free[idx]
    }

    /// Structural index range of community `c` (1-based).
    pub fn community_range(&self, c: usize) -> std::ops::Range<usize> {
        self.community_ranges[c - 1].clone()
    }

    /// Free indices owned by community `c`; contiguous and exclusive for
    /// untied layouts.
    pub fn community_free_indices(&self, c: usize) -> Vec<usize> {
        let mut idx: Vec<usize> = self.community_ranges[c - 1]
            .clone()
            .map(|s| self.to_free[s])
            .collect();
        idx.sort_unstable();
        idx.dedup();
        idx
    }

    /// Looks up the free index of a coordinate.
    pub fn position(&self, coord: ParamCoord) -> Option<usize> {
        self.free.iter().position(|c| *c == coord).or_else(|| {
            self.structural
                .iter()
                .position(|c| *c == coord)
                .map(|s| self.to_free[s])
        })
    }

    /// Expands a free vector into structural coordinates.
    pub fn expand<T: Real>(&self, free_values: &[T]) -> Result<Vec<T>> {
        if free_values.len() != self.free_len() {
            return Err(Error::ParameterLength {
                expected: self.free_len(),
                got: free_values.len(),
            });
        }
        Ok(self.to_free.iter().map(|&f| free_values[f]).collect())
    }
}

/// Flat coefficient vector in free-coordinate space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterVector<T: Real> {
    values: Vec<T>,
}

impl<T: Real> ParameterVector<T> {
    pub fn new(values: Vec<T>, layout: &ParamLayout) -> Result<Self> {
        if values.len() != layout.free_len() {
            return Err(Error::ParameterLength {
                expected: layout.free_len(),
                got: values.len(),
            });
        }
        Ok(Self { values })
    }

    pub fn zeros(layout: &ParamLayout) -> Self {
        Self {
            values: vec![T::zero(); layout.free_len()],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    /// Value of a coordinate; tied coordinates resolve to their shared
    /// coefficient.
    pub fn get(&self, layout: &ParamLayout, coord: ParamCoord) -> Option<T> {
        layout.position(coord).map(|i| self.values[i])
    }

    pub fn set(&mut self, layout: &ParamLayout, coord: ParamCoord, value: T) -> Result<()> {
        match layout.position(coord) {
            Some(i) => {
                self.values[i] = value;
                Ok(())
            }
            None => Err(Error::Invalid(format!("coordinate {coord} not in layout"))),
        }
    }

    /// Structural expansion (tied coefficients repeated).
    pub fn structural(&self, layout: &ParamLayout) -> Result<Vec<T>> {
        layout.expand(&self.values)
    }

    pub fn l2_norm(&self) -> T {
        self.values
            .iter()
            .fold(T::zero(), |acc, v| acc + *v * *v)
            .sqrt()
    }
}

/// Serialized form of a model order with optional coefficients.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelSpecFile {
    pub layout_version: u32,
    pub communities: Vec<CommunityOrder>,
    pub tying: Tying,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<Vec<f64>>,
}

impl ModelSpecFile {
    pub const LAYOUT_VERSION: u32 = 1;

    pub fn from_order(order: &ModelOrder, theta: Option<&ParameterVector<f64>>) -> Self {
        Self {
            layout_version: Self::LAYOUT_VERSION,
            communities: order.communities().to_vec(),
            tying: order.tying(),
            theta: theta.map(|t| t.values().to_vec()),
        }
    }

    pub fn to_order(&self) -> Result<(ModelOrder, Option<ParameterVector<f64>>)> {
        if self.layout_version != Self::LAYOUT_VERSION {
            return Err(Error::Invalid(format!(
                "unsupported layout version {}",
                self.layout_version
            )));
        }
        let order = ModelOrder::with_tying(self.communities.clone(), self.tying)?;
        let theta = match &self.theta {
            Some(values) => Some(ParameterVector::new(values.clone(), &order.layout())?),
            None => None,
        };
        Ok((order, theta))
    }
}
