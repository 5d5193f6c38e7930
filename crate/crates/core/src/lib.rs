pub mod cli;
pub mod error;
pub mod evaluation;
pub mod geometry;
pub mod grid;
pub mod lipschitz;
pub mod lp;
pub mod oracle;
pub mod pipeline;
pub mod sizing;
pub mod tolerances;
pub mod uncertainty;
pub mod wake;

pub use error::{Error, Result};
