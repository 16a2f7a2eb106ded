//! Construction, verification and symmetry certification of equi-isoclinic
//! tight fusion frames of Radon–Hurwitz type over ℝ and ℂ.

pub mod eitff;
pub mod error;
pub mod linalg;
pub mod radon_hurwitz;
pub mod simplex;
pub mod symmetry;

pub use error::{Error, Result};
pub use linalg::{Field, Mat, C64};
