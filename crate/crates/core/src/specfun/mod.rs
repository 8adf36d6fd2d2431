//! Special functions: polygamma, Bessel/Hankel wrappers, ₁F₂ and Lommel functions.

pub mod bessel;
pub mod hyp;
pub mod lommel;
pub mod polygamma;

pub use bessel::{bessel, bessel_j, bessel_k, bessel_y, hankel1, hankel2, BesselKind};
pub use hyp::hyp1f2;
pub use lommel::{lommel_modified_identities, lommel_s, lommel_small_s, LommelOrder};
pub use polygamma::polygamma;
