//! Numerical machinery for comparing hyperbolic and Euclidean rearrangements
//! of radial functions on the Poincare ball, and for checking the sharp
//! Moser-Trudinger type inequalities that follow from that comparison.

pub mod dd;
pub mod error;
pub mod functionals;
pub mod geometry;
pub mod profiles;
pub mod quad;
pub mod real;
pub mod sequences;
pub mod verify;

pub use dd::Dd;
pub use error::{Error, Result};
pub use geometry::{make_context, DimensionContext};
pub use profiles::RadialProfile;
pub use real::Real;

use serde::{Deserialize, Serialize};

/// Working precision for the lemma evaluations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    #[default]
    Double,
    Extended,
}
