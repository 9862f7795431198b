//! Finite-dimensional angle/OAM state space.
//!
//! Angle and orbital angular momentum are conjugate on a (2L+1)-dimensional
//! space spanned by orthonormal angle states |θ_n⟩ with
//! θ_n = θ₀ + 2πn/(2L+1). Physical results are computed at finite L and the
//! limit L → ∞ is taken afterwards; everything in this module therefore
//! serves as the brute-force oracle for the closed forms in [`crate::analytic`].

use num_complex::Complex64;
use std::f64::consts::TAU;

use crate::wrap_angle;

/// The (2L+1)-dimensional space of angle states on [θ₀, θ₀ + 2π).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteAngleSpace {
    l: usize,
    theta0: f64,
}

impl FiniteAngleSpace {
    /// Create the space with dimension 2L+1 starting at angle θ₀.
    pub fn new(l: usize, theta0: f64) -> Self {
        assert!(theta0.is_finite(), "theta0 must be finite");
        FiniteAngleSpace { l, theta0 }
    }

    pub fn l(&self) -> usize {
        self.l
    }

    /// Number of basis states, 2L+1.
    pub fn dimension(&self) -> usize {
        2 * self.l + 1
    }

    pub fn theta0(&self) -> f64 {
        self.theta0
    }

    /// Grid angle θ_n = θ₀ + 2πn/(2L+1).
    ///
    /// Panics if `n` exceeds 2L.
    pub fn theta(&self, n: usize) -> f64 {
        assert!(n < self.dimension(), "angle index {n} out of range");
        self.theta0 + TAU * n as f64 / self.dimension() as f64
    }

    /// The full angle grid.
    pub fn grid(&self) -> Vec<f64> {
        (0..self.dimension()).map(|n| self.theta(n)).collect()
    }

    /// Branch-cut indicator f_α(θ_n): 1 iff θ₀ < θ_n < θ₀ + α.
    ///
    /// Both endpoints θ_n = θ₀ and θ_n = θ₀ + α map to 0, matching the
    /// convention that the cut point itself belongs to the upper branch.
    pub fn branch_cut_indicator(&self, alpha: f64, n: usize) -> u8 {
        assert!(n < self.dimension(), "angle index {n} out of range");
        // offset from theta0 is exactly 2*pi*n/(2L+1), independent of theta0
        let offset = TAU * n as f64 / self.dimension() as f64;
        u8::from(offset > 0.0 && offset < alpha)
    }
}

/// Descriptor (M, m, μ, α, θ₀) of a fractional OAM state |M(α)⟩.
///
/// M = m + μ with integer part m and fractional part μ ∈ [0, 1); α ∈ [0, 2π)
/// is the orientation of the phase discontinuity measured from θ₀.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionalLabel {
    m: i64,
    mu: f64,
    alpha: f64,
    theta0: f64,
}

impl FractionalLabel {
    /// Split a real step height M into integer and fractional parts and
    /// reduce the orientation into [0, 2π).
    pub fn new(m_total: f64, alpha: f64, theta0: f64) -> Self {
        assert!(m_total.is_finite(), "M must be finite");
        let m = m_total.floor();
        FractionalLabel {
            m: m as i64,
            mu: m_total - m,
            alpha: wrap_angle(alpha),
            theta0,
        }
    }

    /// Total step height M = m + μ.
    pub fn m_total(&self) -> f64 {
        self.m as f64 + self.mu
    }

    /// Integer part m.
    pub fn m(&self) -> i64 {
        self.m
    }

    /// Fractional part μ ∈ [0, 1).
    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Orientation α ∈ [0, 2π) of the discontinuity.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn theta0(&self) -> f64 {
        self.theta0
    }

    /// Replace the orientation, keeping M and θ₀.
    pub(crate) fn with_alpha(&self, alpha: f64) -> Self {
        FractionalLabel {
            alpha: wrap_angle(alpha),
            ..*self
        }
    }
}

/// A normalised state expanded over the angle basis of one space.
#[derive(Debug, Clone)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
    space: FiniteAngleSpace,
}

impl StateVector {
    /// Wrap raw angle-basis amplitudes; the length must match the space.
    pub fn from_amplitudes(space: FiniteAngleSpace, amplitudes: Vec<Complex64>) -> Self {
        assert_eq!(
            amplitudes.len(),
            space.dimension(),
            "amplitude count must equal 2L+1"
        );
        StateVector { amplitudes, space }
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn space(&self) -> &FiniteAngleSpace {
        &self.space
    }

    /// P(θ_n) = |⟨θ_n|ψ⟩|².
    pub fn angle_distribution(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }
}

/// Construct the fractional state |M(α)⟩ in the given space.
///
/// The amplitude on |θ_n⟩ is
/// (2L+1)^{-1/2} exp(−iμα) exp(iMθ_n) exp(i2πμ f_α(θ_n)).
///
/// Panics if the label's θ₀ differs from the space's.
pub fn fractional_state(space: &FiniteAngleSpace, label: &FractionalLabel) -> StateVector {
    assert!(
        label.theta0() == space.theta0(),
        "label theta0 {} does not match space theta0 {}",
        label.theta0(),
        space.theta0()
    );
    let dim = space.dimension();
    let norm = 1.0 / (dim as f64).sqrt();
    let m_total = label.m_total();
    let global = Complex64::from_polar(norm, -label.mu() * label.alpha());
    let amplitudes = (0..dim)
        .map(|n| {
            let theta = space.theta(n);
            let f = f64::from(space.branch_cut_indicator(label.alpha(), n));
            global * Complex64::from_polar(1.0, m_total * theta + TAU * label.mu() * f)
        })
        .collect();
    StateVector::from_amplitudes(*space, amplitudes)
}

/// Sesquilinear inner product ⟨u|v⟩, conjugating the first argument.
///
/// Panics if the states live in different spaces.
pub fn inner_product(u: &StateVector, v: &StateVector) -> Complex64 {
    assert!(
        u.space() == v.space(),
        "inner product requires states from the same space"
    );
    u.amplitudes
        .iter()
        .zip(&v.amplitudes)
        .map(|(a, b)| a.conj() * b)
        .sum()
}
