pub mod abc;
pub mod error;
pub mod finfield;
pub mod groupcoh;
pub mod heisenberg;
pub mod modring;

pub use error::{Error, Result};
