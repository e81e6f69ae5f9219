//! Independent reference implementations for testing: closed-form
//! solutions, exhaustive LCP solves and high-order quadrature.
//!
//! Nothing here is used by the production solver path.

mod exact;
mod lcp;
mod quadrature;
mod radial;

pub use exact::{exact_half_space, exact_polynomial, exact_radial_2d, ExactKind, ExactSolution};
pub use lcp::{brute_force_lcp, dense_heat_lcp, random_lcp, MAX_BRUTE_FORCE_DIM};
pub use quadrature::{reference_quadrature, QuadRegion};
pub use radial::{radial_stationary_profile, RadialProfile};
