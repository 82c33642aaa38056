//! Antenna-coded MIMO with reconfigurable pixel antennas.
//!
//! The crate is `no_std` (it needs `alloc`). It covers the switch-loaded
//! multiport circuit model of a pixel antenna, the SVD beamspace of its
//! open-circuit patterns, codebook design for pattern modulation
//! (correlation objective, genetic search, exhaustive oracle and RF-switch
//! minimization), and Monte-Carlo spectral/energy-efficiency estimators.
//!
//! File formats, the command line, and the thread-pool executor live in the
//! `pixcode` crate.

#![no_std]
// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod bundle;
pub mod channel;
pub mod codebook;
pub mod error;
pub mod exec;
pub mod ga;
pub mod grid;
pub mod linalg;
pub mod math;
pub mod metrics;
pub mod network;
pub mod pattern;
pub mod rng;
pub mod switches;
pub mod synth;

pub use bundle::AntennaBundle;
pub use channel::{
    beamspace_channel, effective_channel, iid_beamspace_draw, iid_beamspace_ensemble, sample_virtual_channel,
    BeamspaceChannel, ChannelEnsemble, CoderBlockMatrix, VirtualChannel,
};
pub use codebook::{correlation, mean_correlation, Codebook, SwitchPartition};
pub use error::{Error, Result};
pub use exec::{Executor, Sequential};
pub use ga::{exhaustive_optimize, ga_optimize, ga_optimize_constrained, GaParams};
pub use grid::{AngularGrid, SphereWeighting};
pub use metrics::{
    coding_mi_mc, energy_efficiency, high_snr_bound, mimo_mi, total_se, InputModel, McConfig, MiEstimate, PowerModel,
    SeEstimate, SnrSpec,
};
pub use network::{load_matrix, port_currents, AntennaCoder, MultiportNetwork, PortCurrents};
pub use pattern::{
    approx_pattern, cumulative_power, decompose, eadof, pattern_coder, radiation_pattern, BasisDecomposition,
    PatternCoder, RadiationPattern,
};
pub use switches::{minimize_switches, SwitchMinimization};
pub use synth::synthesize_dipole_grid;
