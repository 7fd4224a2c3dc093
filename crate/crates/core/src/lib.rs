//! Regression trees grown with either the CART impurity gain or the
//! covariance-squared (CovRT) criterion, plus weakest-link pruning,
//! seeded simulation models, numerical checks of the supporting theory and
//! experiment pipelines that write tidy CSV reports.
//!
//! ```
//! use covrt::{grow, CriterionKind, Dataset, GrowConfig};
//!
//! let data = Dataset::univariate(vec![1.0, 2.0, 3.0, 4.0], vec![0.0, 0.0, 1.0, 1.0])?;
//! let tree = grow(&data, &GrowConfig::new(CriterionKind::Covrt, 1).min_node_size(1))?;
//! assert_eq!(tree.predict(&[3.0])?, 1.0);
//! # Ok::<(), covrt::Error>(())
//! ```

pub mod data;
pub mod error;
pub mod eval;
pub mod experiments;
pub mod grow;
pub mod io;
pub mod prune;
pub mod sim;
pub mod split;
pub mod theory;

pub use data::{node_mean_and_risk, CriterionKind, Dataset, Node, NodeId, NodeKind, NodeRegion, Tree};
pub use error::{Error, Result};
pub use eval::{empirical_l2_risk, evaluate, generalization_gap, r_squared, EvalResult};
pub use grow::{grow, grow_full, GrowConfig, DEFAULT_MIN_NODE_SIZE, FULL_DEPTH};
pub use io::{load_csv, load_model, save_model, split_dataset, CategoricalPolicy, ModelFile};
pub use prune::{prune_sequence, prune_to_leaves, select_alpha, AlphaSelection, PruneSequence, PruneStep};
pub use sim::{generate, DgpName, DgpSpec};
pub use split::{best_split, covrt_criterion, cart_impurity_gain, ig_cs_identity_check, SplitCandidate, SplitDecision};
pub use theory::{population_cs_linear, tv_norm, AdditiveFunction, Component, Term};
