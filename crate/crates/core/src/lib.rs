//! Construction and analysis of feed-forward ReLU networks.
//!
//! The crate has three pillars:
//!
//! - **Explicit architectures** ([`constructors`], [`circuit`]): triangle
//!   waves, soft thresholds, bit extractors, an approximate two-input
//!   multiplier, an exact four-neuron adder, a compiler from bounded
//!   add/multiply circuits to ReLU networks, a unit-ball indicator, and
//!   exact three-layer realizations of piecewise-linear L1-radial functions.
//! - **Exact piecewise-linear analysis** ([`pwl`], [`oracle`]): restriction
//!   of a network to a line with exact breakpoint propagation, linear-region
//!   counting against the `(2m)^l` bound, and a dynamic-programming oracle
//!   for optimal n-piece fits used to check the closed-form lower bounds in
//!   [`legendre`].
//! - **A training experiment** ([`experiment`]): learning the unit-ball
//!   indicator with 2-layer vs 3-layer networks to exhibit the depth
//!   advantage empirically.
//!
//! Networks are immutable after construction and safe to evaluate from many
//! threads. All combinators return new values.

pub mod circuit;
pub mod constructors;
pub mod error;
pub mod experiment;
pub mod legendre;
pub mod netio;
pub mod network;
pub mod oracle;
pub mod pwl;
pub mod quadrature;
pub mod sampler;

pub use circuit::{compile_circuit, compile_circuit_with_report, Circuit, CircuitNode,
    CompileReport, NodeId};
pub use constructors::{
    affine_adder, ball_indicator, bit_extractor, l1_radial, multiplier, multiplier_with_bits,
    soft_threshold, square, square_with_bits, triangle_wave, BallIndicatorOptions,
    MultiplierParams, RadialPwl,
};
pub use error::{Error, Result};
pub use experiment::{
    depth_vs_width_sweep, generate_dataset, train, Dataset, DatasetSpec, SweepCell, SweepTable,
    TrainConfig, TrainRun,
};
pub use legendre::{
    c2_lower_bound, fl_coefficient, fl_coefficient_poly, legendre_report, linear_fit_error,
    partition_power_bound, quad_lower_bound, strongly_convex_a2_bound,
    strongly_convex_lower_bound, C2Bound, LegendreReport, ShiftedLegendre,
};
pub use network::{parallel, Activation, Layer, Network};
pub use oracle::{optimal_pwl_oracle, OracleFit};
pub use pwl::{l2_error, region_bound, restrict_to_line, LineRestriction, PiecewiseLinear1D,
    RegionBound, Segment};
pub use sampler::{l1_sphere_sampler, sample_l1_sphere, slab_probability, L1SphereSample,
    SlabEstimate};
