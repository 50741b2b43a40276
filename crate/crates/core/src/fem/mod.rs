pub mod gram_schmidt;
pub mod lift;
pub mod load;
pub mod mesh;
pub mod operators;
pub mod problem;
pub mod scenario;
pub mod time_integrals;

pub use mesh::{Material, Mesh1D, TimeGrid};
pub use operators::OperatorSet;
pub use problem::Problem;
pub use scenario::{BodyLoad, Profile, RightBoundary, Scenario, Signal};
