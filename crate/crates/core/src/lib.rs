pub mod cfrac;
pub mod cli;
pub mod error;
pub mod io;
pub mod measures;
pub mod models;
pub mod quad;
pub mod riccati;
pub mod sim;
pub mod specialfn;
pub mod transforms;

pub use error::{Error, Result};
