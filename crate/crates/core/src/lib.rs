//! Analysis library for fractal tetrahedral multirotor assemblies.
//!
//! The library covers the full analytical chain for a self-similar family of
//! tetrahedral vehicles: fractal placement geometry, mass-property recursion,
//! rigid-body and linearized flight dynamics, Kronecker-structured control
//! sensitivity maps for composite assemblies, space-truss load analysis,
//! motor-fault-tolerance search, propeller-configuration enumeration, and a
//! rate-stabilized hover simulation.

pub mod assembly_dynamics;
pub mod bvls;
pub mod configs;
pub mod dynamics;
pub mod error;
pub mod faults;
pub mod geometry;
pub mod inertia;
pub mod sim;
pub mod truss;
pub mod verify;

pub use error::{Error, Result};

/// Standard gravitational acceleration [m/s^2].
pub const GRAVITY: f64 = 9.81;

pub type Vec3 = nalgebra::Vector3<f64>;
pub type Mat3 = nalgebra::Matrix3<f64>;
