//! Simulation and verification of higher-order quantum maps.
//!
//! The crate models black boxes (unitaries and Kraus channels), the circuit
//! model they are plugged into, and the higher-order constructions that take
//! boxes as input: the switch of two boxes under a control bit, oracles with
//! classical and with quantum control of the call order, and circuit
//! realizations of the switch (two calls per oracle, or one call each with
//! post-selected teleportation).
//!
//! Conventions used throughout:
//!
//! - qubit 0 is the leftmost tensor factor and the top wire of a diagram;
//! - "f then g" is the map that applies `f` first, so its unitary is `U_g·U_f`;
//! - a control in `|1⟩` selects "f then g", a control in `|0⟩` selects "g then f".

pub mod error;
pub mod linalg;

pub mod channels;
pub mod circuit;
pub mod higher_order;
pub mod random;
pub mod realizations;
pub mod scenario;

pub use error::{Error, Result};
