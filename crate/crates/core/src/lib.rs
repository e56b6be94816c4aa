pub mod asymptotics;
pub mod error;
pub mod exact;
pub mod powerseries;
pub mod sampler;
pub mod species;

pub use error::{Error, Result};
