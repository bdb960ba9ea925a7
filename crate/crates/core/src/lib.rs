//! Factorization homology of oriented surfaces with coefficients in
//! explicitly presented unitary braided fusion categories.

pub mod algebra;
pub mod category;
pub mod diagram;
pub mod error;
pub mod fusion;
pub mod gns;
pub mod gluing;
pub mod linalg;
pub mod parallel;
pub mod reflection;
pub mod report;
pub mod strand;

pub use category::{Mor, Obj, SimpleIndex};
pub use error::{Error, Result};
pub use fusion::FusionData;
pub use report::{Check, ValidationReport};
