pub mod error;
pub mod fem;
pub mod linalg;

pub use error::{PgdError, Result};
pub mod metrics;
pub mod pgd;
pub mod reference;
pub mod config;
pub mod run;
pub mod report;
pub mod verify;
