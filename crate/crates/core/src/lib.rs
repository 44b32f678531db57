//! Stimulated Raman adiabatic passage in a three-level Lambda system, with a
//! Cooper-pair-box device model, Markovian and static low-frequency noise, and
//! parameter sweeps.

pub mod analysis;
pub mod cli;
pub mod cpb;
pub mod dynamics;
pub mod error;
pub mod model3;
pub mod noise;
pub mod output;
mod tridiag;

pub use error::{Error, Result};
pub use tridiag::{eigh_tridiagonal, TridiagonalEigen};
