pub mod dynamics;
pub mod error;
pub mod model;
pub mod observables;
pub mod rwa;
pub mod specfun;

pub use dynamics::NambuSpinor;
pub use error::{Error, Result};
pub use model::ModelParams;
