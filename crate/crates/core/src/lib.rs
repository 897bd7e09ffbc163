//! Cavity-QED parameters (g, κ, γ) of a two-level atom inside a one-sided
//! leaky planar resonator, driven by a laterally shaped single-photon pulse.
//!
//! Frequencies are handled internally in units of the cutoff ω_c and waists
//! in units of c/ω_c; every public rate is in rad/s.

pub mod analysis;
pub mod error;
pub mod formfactor;
pub mod modes;
pub mod profiles;
pub mod quad;
pub mod setup;
pub mod slab;

pub use error::{Error, Result};
pub use formfactor::{FormFactorCurve, Kind, Method, Target};
pub use profiles::LateralProfile;
pub use setup::{AtomSpec, CavitySpec, DipoleOrientation, PhysicalConstants, PhysicalSetup};
pub use slab::Polarization;
