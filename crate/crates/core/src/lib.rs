//! Density-based clustering by minimal seed expansion.
//!
//! The crate computes k-nearest-neighbour sparsities, answers ε-connectivity
//! queries through a reachability spanning tree, builds the dendrogram of
//! maximal clusters, extracts density seeds greedily and expands them into a
//! full clustering. The [`separability`] module certifies whether a given
//! clustering is weakly, local-maximum, or strongly separable, which is the
//! condition under which [`pipeline::mse_exact`] is guaranteed to recover it.
//!
//! ```
//! use mse_core::{pipeline, Dataset};
//!
//! let ds = Dataset::from_values(&[0.0, 1.0, 2.0, 10.0, 11.0, 12.0]).unwrap();
//! let c = pipeline::mse_exact(&ds, &pipeline::ExactParams::new(2, 2)).unwrap();
//! assert_eq!(c.clustering.labels(), &[0, 0, 0, 1, 1, 1]);
//! ```

pub mod clustering;
pub mod connectivity;
pub mod dendrogram;
pub mod error;
pub mod eval;
pub mod exec;
pub mod expansion;
pub mod metric;
pub mod pipeline;
pub mod seeding;
pub mod separability;
pub mod sparsity;
mod union_find;

pub use clustering::{Clustering, PartialClustering};
pub use connectivity::ReachabilityMst;
pub use dendrogram::Dendrogram;
pub use error::{Error, Result};
pub use exec::ExecPolicy;
pub use metric::{pairwise_distances, Dataset, DistanceMatrix, Metric};
pub use sparsity::SparsityProfile;
