//! Simulation and numerics library for single-user uplink to a cooperating
//! LEO satellite cluster with THz or free-space-optical inter-satellite
//! links.
//!
//! The crate is organized along the signal chain:
//!
//! - [`orbit`]: constellation propagation, visibility, ISL distances
//! - [`linkbudget`]: dB conversions, free-space path loss, thermal noise
//! - [`channel`]: Rician uplink channel sampling and moments
//! - [`islmodel`]: amplify-and-forward second hop, FSO pointing loss
//! - [`mnselect`]: master-node satellite selection
//! - [`detect`]: MMSE joint detection (instantaneous / statistical CSI)
//! - [`capacity`]: ergodic-capacity closed forms and oracles
//! - [`mcsim`]: seeded end-to-end Monte Carlo experiments
//! - [`acceptance`]: the executable acceptance checklist

pub mod channel;
pub mod error;
pub mod islmodel;
pub mod linkbudget;
pub mod mnselect;
pub mod orbit;
pub mod quad;
pub mod seed;

pub use error::{Error, Result};
