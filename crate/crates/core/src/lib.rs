//! Poincaré and Plancherel-Polya constants of weighted graphs, sampling sets
//! for Paley-Wiener signals, and reconstruction by the frame algorithm.
//!
//! Every numerical type is generic over [`Real`] (`f32` or `f64`); the
//! aliases at the crate root fix `f64`, with `F32*` variants for single
//! precision.
//!
//! ```
//! use pwgraph::{generators, partition_constants, Exponent, Partition, VertexSet};
//!
//! let g = generators::star::<f64>(10);
//! let part = Partition::closure(&g, &VertexSet::new([0])).unwrap();
//! let c = partition_constants(&g, &part, Exponent::Finite(2.0)).unwrap();
//! assert_eq!(c.delta, Some(1.0));
//! assert_eq!(c.a, Some(11f64.sqrt()));
//! ```

pub mod eigen;
pub mod error;
pub mod generators;
pub mod graph;
pub mod io;
pub mod partition;
pub mod sampling;
pub mod scalar;
pub mod shannon;
pub mod spectral;
pub mod worked;

pub use error::{Error, Result};
pub use graph::{Exponent, GraphBuilder, Signal, VertexSet, WeightedGraph};
pub use partition::{
    chain_constants, partition_constants, poincare_forward_check, poincare_zero_on_s0_check, reverse_check,
    shell_estimate_check, supported_on_s0_check, ChainConstants, CheckKind, Partition, PartitionConstants,
    RecordConstants, ShellRecord, SubsetChain, VerificationRecord,
};
pub use sampling::{
    exact_frame_bounds, frame_bounds, frame_reconstruct, plancherel_polya_check, sampling_frame_vectors,
    two_set_constants, ExactFrameBounds, FrameBounds, PlancherelPolyaReport, ReconstructOptions, ReconstructionTrace,
    TwoSetConstants,
};
pub use scalar::Real;
pub use shannon::{band_map, cycle_model, integer_constants, oversampling_report, psi, shannon_demo, LineConstants};
pub use spectral::{
    bernstein_check, dirichlet_eigenvalue, spectral_geometry_report, vanishing_signal, GeometryReport, PwProjector,
    SpectralDecomposition,
};

pub type Graph = WeightedGraph<f64>;
pub type GraphSignal = Signal<f64>;
pub type Decomposition = SpectralDecomposition<f64>;
pub type Constants = PartitionConstants<f64>;
pub type Record = VerificationRecord<f64>;
pub type Bounds = FrameBounds<f64>;
pub type Trace = ReconstructionTrace<f64>;

pub type F32Graph = WeightedGraph<f32>;
pub type F32Signal = Signal<f32>;
pub type F32Decomposition = SpectralDecomposition<f32>;
