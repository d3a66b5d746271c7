//! Undirected dependence graphs from multivariate samples.
//!
//! Two recovery routes share the same value types:
//!
//! * **Conditional dependence graphs.** [`codec`] estimates, for every
//!   ordered pair of columns, a rank/nearest-neighbour coefficient that
//!   vanishes exactly under conditional independence given the remaining
//!   columns. [`selection`] symmetrizes the matrix and keeps pairs whose
//!   coefficient reaches a threshold `lambda` (default `1/n`).
//! * **Partial-correlation graphs.** [`precision`] estimates a sparse
//!   precision matrix (graphical lasso or ridge) from the sample covariance
//!   or the skeptic correlation and thresholds its off-diagonal entries.
//!
//! [`simulate`] generates the benchmark models with known graphs and runs
//! replication studies reporting true and false positive rates.
//!
//! ```
//! use condgraph_core::{ggm_recover, generate, CodecOptions, ModelId, SelectionConfig, SimModel};
//!
//! let (data, truth) = generate(&SimModel::new(ModelId::M2, 60, 1).with_p(8)).unwrap();
//! let config = SelectionConfig::for_sample_size(data.n(), 0);
//! let found = ggm_recover(&data, &config, &CodecOptions::default()).unwrap();
//! assert_eq!(found.graph.p(), truth.p());
//! ```

pub mod codec;
pub mod config;
pub mod data;
pub mod dep;
pub mod error;
pub mod graph;
pub mod precision;
pub mod selection;
pub mod simulate;

pub use codec::{codec_matrix, codec_tn, CodecOptions, NnBackend, RankConvention};
pub use config::{EdgeRule, SelectionConfig};
pub use data::{validate_data, DataMatrix};
pub use dep::DepMatrix;
pub use error::{Error, Result};
pub use graph::{graph_diff, graph_equal, Edge, Graph, GraphDiff};
pub use precision::{
    glasso, npn_skeptic, pg_select, ridge_precision, sample_covariance, CovarianceMatrix, PgConfig,
    PrecisionEstimate,
};
pub use selection::{
    ggm_recover, select_edges, soft_threshold, symmetrize_max, threshold_band, Recovery,
};
pub use simulate::{
    generate, run_study, tpr_fpr, Method, MetricsRecord, ModelId, SimModel, StudyConfig,
};
