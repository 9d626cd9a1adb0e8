//! One-dimensional transfer-matrix optomechanics.
//!
//! A chain of thin scatterers and free-space segments surrounds one mobile
//! scatterer. The crate solves for the fields around it, the radiation force
//! to first order in its velocity (and hence the friction coefficient), the
//! momentum diffusion from field fluctuations, and the resulting equilibrium
//! temperature. The [`mim`] module applies this to a membrane inside a
//! Fabry–Pérot cavity and compares it with the coupled-cavities model.
//!
//! Conventions: amplitude pairs are (left-going, right-going); amplitudes
//! carry units of √(photon flux) so that ħk₀|amplitude|² is a force in newtons.

pub mod algebra;
pub mod chain_file;
pub mod consts;
pub mod dynamics;
pub mod elements;
pub mod error;
pub mod mat2;
pub mod mim;
pub mod noise;
pub mod observables;
pub mod statics;
pub mod units;

pub use algebra::{moving_scatterer_matrix, vo_mul, KFunction, VOEntry, VOMatrix};
pub use dynamics::{force_with_velocity, solve_dynamic, FieldSet, ForceReport};
pub use elements::{factorize, Chain, Element, Factorization, Polarisability, PumpSpec};
pub use error::{Error, Result};
pub use noise::{attach_loss_modes, diffusion, equilibrium_temperature, operator_fields};
pub use observables::{evaluate_point, PointReport};
pub use statics::{couplings, resonance_shifts, solve_static, static_force, StaticFields};
