//! Fractional orbital angular momentum (OAM) for light beams.
//!
//! A beam carrying a fractional phase step exp(iMφ) with non-integer M is
//! characterised by the step height M = m + μ and by the orientation α of the
//! phase discontinuity. This crate provides
//!
//! * [`bp_space`] — the finite (2L+1)-dimensional angle/OAM state space in
//!   which fractional states are constructed; it doubles as the brute-force
//!   oracle for every closed-form result,
//! * [`analytic`] — closed-form overlaps, integer-OAM spectra, mean and
//!   truncated variance in the L → ∞ limit, plus the unitary operator that
//!   rotates the discontinuity,
//! * [`specfun`] — Bessel J of integer order, scaled modified Bessel I, and
//!   the Fourier–Bessel coefficients of a Gaussian profile,
//! * [`propagation`] — exact (non-paraxial) and paraxial propagation of a
//!   finite-width beam emerging from a fractional phase step,
//! * [`vortex`] — detection of phase singularities on the sampled field by
//!   plaquette winding numbers,
//! * [`formats`] — deterministic CSV/PGM/PPM writers and the run manifest
//!   used by the `frac-oam` command line tool.

pub mod analytic;
pub mod bp_space;
pub mod formats;
pub mod propagation;
pub mod quadrature;
pub mod specfun;
pub mod vortex;

use thiserror::Error;

/// Errors surfaced by the numerical pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(
        "quadrature did not converge for m'={mp} at rho={rho}: \
             error estimate {estimate:e} exceeds tolerance {tol:e}"
    )]
    NonConvergence {
        mp: i64,
        rho: f64,
        estimate: f64,
        tol: f64,
    },
    #[error("value overflows f64 range: {0}")]
    Overflow(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Reduce an angle into [0, 2π).
///
/// The result is exactly 0 for inputs that are integer multiples of 2π and
/// never returns 2π itself.
pub fn wrap_angle(angle: f64) -> f64 {
    const TAU: f64 = std::f64::consts::TAU;
    let mut a = angle % TAU;
    if a < 0.0 {
        a += TAU;
    }
    // `-1e-30 % TAU + TAU` rounds to TAU; fold that back to 0.
    if a >= TAU {
        a = 0.0;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::wrap_angle;
    use std::f64::consts::TAU;

    #[test]
    fn wrap_angle_range() {
        for &a in &[0.0, 1.0, -1.0, TAU, -TAU, 7.0 * TAU + 0.5, -1e-30, 1e300] {
            let w = wrap_angle(a);
            assert!((0.0..TAU).contains(&w), "wrap_angle({a}) = {w}");
        }
        assert_eq!(wrap_angle(TAU), 0.0);
        assert_eq!(wrap_angle(0.0), 0.0);
        assert!((wrap_angle(-0.5) - (TAU - 0.5)).abs() < 1e-15);
    }
}
