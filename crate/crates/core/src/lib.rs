//! Linear-quadratic regulators for conservative systems: Riccati solutions,
//! closed-loop decay rates and a priori bounds on them.

pub mod bounds;
pub mod linalg;
pub mod report;
pub mod riccati;
pub mod search;
mod serde_ext;
pub mod spectral;
pub mod string_model;
pub mod systems;
