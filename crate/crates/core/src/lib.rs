//! Density evolution workbench for spatially-coupled MacKay-Neal and
//! Hsu-Anastasopoulos protograph ensembles on the binary erasure channel.
//!
//! The crate is organised around a few small engines:
//!
//! * [`base_matrix`] — integer protograph base matrices with puncture masks,
//!   plus the plain-text / JSON exchange formats.
//! * [`ensemble`] — band-matrix constructions for the coupled ensembles,
//!   design rates, densities and multi-edge degree distributions.
//! * [`gf2`] — dense GF(2) linear algebra for finite generator / parity-check
//!   instances of the MN and HA code families.
//! * [`protograph`] — density evolution on arbitrary base matrices over the
//!   BEC and bisection search for the BP threshold.
//! * [`chain`] — section-indexed density evolution for the randomized
//!   coupled MN ensemble.
//! * [`ebp`] — EBP EXIT curve tracing by anchored fixed-point continuation
//!   and wiggle measurement.
//!
//! Batch helpers in [`exec`] run independent jobs on a rayon pool when the
//! `parallel` feature (default) is enabled and sequentially otherwise.

pub mod base_matrix;
pub mod chain;
pub mod de;
pub mod ebp;
pub mod ensemble;
pub mod exec;
pub mod gf2;
pub mod protograph;

pub use base_matrix::BaseMatrix;
pub use chain::ChainProfile;
pub use de::{DeOptions, ThresholdResult};
pub use ebp::{EbpCurve, EbpPoint};
pub use ensemble::EnsembleSpec;
pub use gf2::Gf2Matrix;
