//! Special functions: integer-order Bessel functions of the first kind,
//! associated Laguerre polynomials, displaced-Fock overlaps and the
//! large-argument Bessel approximations that fall out of the
//! adiabatic-impulse picture.
//!
//! Everything here is a pure function of its arguments.

mod approx;
mod bessel;
mod laguerre;

pub use approx::{bessel_j_adiabatic_impulse, bessel_j_adiabatic_impulse_expanded, bessel_j_asymptotic};
pub use bessel::{bessel_j, MAX_BESSEL_ORDER};
pub use laguerre::{
    assoc_laguerre, assoc_laguerre_scaled, displaced_fock_overlap, displaced_fock_overlap_log,
    ln_factorial, log_factorial_ratio, Scaled, SignedLog, MAX_FOCK_INDEX,
};
