//! Regularized distributed state estimation from relative measurements.
//!
//! A sensor network is an undirected connected [`Graph`]. Every node `i`
//! holds a scalar state `x_i` and noisy relative measurements
//! `x̃_ij ≈ x_j - x_i` towards its neighbours. The least-squares estimate is
//! unique up to a common offset; it can be computed centrally with the
//! Laplacian pseudo-inverse ([`estimation::centralized_solution`]) or by the
//! node-local iteration
//!
//! ```text
//! x̂(k+1) = F_Q x̂(k) + u_Q,   F_Q = Q + (I - Q) D⁻¹A,   u_Q = ½ (I - Q) D⁻¹ x̃
//! ```
//!
//! where `Q = diag(q)` carries one regularization weight per node. The
//! classic fixed-parameter schemes (η, ρ, ε) are particular choices of `q`.
//!
//! Modules:
//! - [`graph`]: topologies, matrices, connectivity and bipartiteness.
//! - [`spectral`]: real spectra through diagonal symmetrization, the
//!   convergence rate index, Cheeger and common-neighbour bounds.
//! - [`estimation`]: measurements, cost, centralized solution.
//! - [`schemes`]: state matrices and inputs, parameter domains, optimal
//!   scalar parameters.
//! - [`optimizer`]: greedy perturbation search over `q`.
//! - [`simulator`]: synchronous node-local execution of the iteration.

// NaN must fail parameter checks, so `!(x > 0.0)` is deliberate.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod estimation;
pub mod graph;
pub mod optimizer;
pub mod schemes;
pub mod simulator;
pub mod spectral;

pub use error::{Error, Result};
pub use estimation::{AggregatedMeasurement, MeasurementSet, StateVector};
pub use graph::{DegreeProfile, DenseMatrixBundle, Graph, Topology};
pub use optimizer::{OptimizationTrace, OptimizerConfig};
pub use schemes::{IterativeScheme, ParameterDomain, RegularizationVector, SchemeLabel};
pub use simulator::{NodeRule, SimulationResult, SyncConfig};
pub use spectral::{SpectralSummary, Spectrum, SpectrumKind};
