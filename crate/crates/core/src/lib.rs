pub mod aos;
pub mod bench;
pub mod engine;
pub mod error;
pub mod operators;
pub mod oracle;
pub mod pfsp;
pub mod portfolio;

pub use error::{Error, Result};
