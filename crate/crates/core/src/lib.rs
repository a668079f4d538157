pub mod action;
pub mod building;
pub mod dvr;
pub mod error;
pub mod fixtures;
pub mod hecke;
pub mod invariants;
pub mod qpoly;
pub mod verify;

pub use error::{Error, Result};
