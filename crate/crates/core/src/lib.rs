//! Coined quantum walks on periodic lattices whose coins are quantized
//! single-cell maps, together with the deterministic classical multi-map
//! walks they quantize.
//!
//! The crate is organised bottom-up:
//!
//! * [`coin`] builds the coin unitaries (Fourier, Harper, baker) and the
//!   classical cell maps they come from.
//! * [`walk`] assembles the walk operator on `L` sites, either densely or as
//!   `L` conserved-momentum blocks, and evolves states with it.
//! * [`observables`] turns evolutions into site distributions and the
//!   m.s.d. / entropy / participation-ratio time series.
//! * [`classical`] runs the multi-map walk over ensembles of phase-space
//!   points and produces phase portraits.

pub mod classical;
pub mod coin;
pub mod error;
pub mod observables;
pub mod walk;

mod turns;

pub use num_complex::Complex64 as C64;

pub use classical::{
    classical_msd_series, classical_series_from, classical_site_distribution, multi_map_step, phase_portrait,
    phase_portrait_from, CellPartition, CellPoint, PartitionOrientation, PhaseEnsemble,
};
pub use coin::{
    baker_coin, classical_baker_step, classical_harper_inverse_step, classical_harper_step, classical_rotation_step,
    dft_coin, harper_coin, CellMap, CoinKind, CoinSpec, PhasePoint, UnitaryMatrix,
};
pub use error::{Error, Result};
pub use observables::{
    msd, participation_ratio, run_time_series, site_entropy, site_probabilities, trace_formula_distribution,
    CoinAveragedWalk, SiteDistribution, WalkTimeSeries,
};
pub use walk::{
    build_dense, build_momentum_blocks, evolve, CellCut, DenseWalkOperator, MomentumBlockSet, Propagator,
    ShiftAssignment, WalkConfig, WalkState,
};
