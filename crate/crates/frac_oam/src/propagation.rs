//! Propagation of a finite-width beam emerging from a fractional phase step.
//!
//! The field behind the step is expanded in Bessel beams,
//! Ψ(ρ,φ,z) = Σ_{m'} c_{m'}[M(β)] e^{im'φ} ∫₀^{κmax} d_{|m'|}(κ) J_{|m'|}(κρ) Φ(κ) dκ,
//! with the exact propagation factor Φ = exp(i√(k²−κ²)z) (decaying branch
//! for κ > k) or the paraxial Φ = exp(ikz)exp(−iκ²z/(2k)). Radial kernels
//! depend only on |m'| and ρ, so they are evaluated once per distinct grid
//! radius with one Bessel ladder per quadrature node serving every order.

use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::HashMap;
use std::f64::consts::TAU;

use crate::analytic::{spectrum, SpectralDecomposition};
use crate::bp_space::FractionalLabel;
use crate::quadrature::integrate_vector;
use crate::specfun::{bessel_j_fill, d_coefficient_fill};
use crate::{wrap_angle, Error, Result};

/// Propagation regime selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// Full propagator exp(i√(k²−κ²)z) with evanescent decay beyond κ = k.
    Exact,
    /// exp(ikz)exp(−iκ²z/(2k)), the wide-beam limit.
    Paraxial,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Regime::Exact => write!(f, "exact"),
            Regime::Paraxial => write!(f, "paraxial"),
        }
    }
}

/// Full parameter set for one propagation run.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct PropagationConfig {
    /// Phase-step height M.
    pub m_total: f64,
    /// Orientation α ∈ [0, 2π) of the phase discontinuity.
    pub alpha: f64,
    /// Wavenumber k > 0 (1/length).
    pub k: f64,
    /// Beam width w₀ > 0 (length).
    pub w0: f64,
    /// Dimensionless propagation distance k·z ≥ 0.
    pub kz: f64,
    pub regime: Regime,
    /// Keep integer modes with probability above this (default 1e-4).
    pub spectrum_threshold: f64,
    /// Grid points per side, odd so the axis is sampled (default 401).
    pub grid_n: usize,
    /// Half-width of the grid in units of w₀ (default 3).
    pub extent: f64,
    /// κmax = kappa_max_factor / w₀ (default 40).
    pub kappa_max_factor: f64,
    /// Absolute tolerance per radial kernel (default 1e-8).
    pub quadrature_tol: f64,
}

impl PropagationConfig {
    /// Defaults with dimensionless kw₀ set through `k` (w₀ = 1).
    pub fn new(m_total: f64, alpha: f64, kw0: f64, kz: f64, regime: Regime) -> Self {
        PropagationConfig {
            m_total,
            alpha: wrap_angle(alpha),
            k: kw0,
            w0: 1.0,
            kz,
            regime,
            spectrum_threshold: 1e-4,
            grid_n: 401,
            extent: 3.0,
            kappa_max_factor: 40.0,
            quadrature_tol: 1e-8,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidArgument(msg));
        // `is_nan() ||` keeps NaN inputs from slipping through the range checks
        if self.k.is_nan() || self.k <= 0.0 {
            return fail(format!("wavenumber k must be positive, got {}", self.k));
        }
        if self.w0.is_nan() || self.w0 <= 0.0 {
            return fail(format!("beam width w0 must be positive, got {}", self.w0));
        }
        if self.kz.is_nan() || self.kz < 0.0 {
            return fail(format!("kz must be nonnegative, got {}", self.kz));
        }
        if self.grid_n < 3 || self.grid_n.is_multiple_of(2) {
            return fail(format!("grid_n must be odd and >= 3, got {}", self.grid_n));
        }
        if self.extent.is_nan() || self.extent <= 0.0 {
            return fail(format!("extent must be positive, got {}", self.extent));
        }
        if self.spectrum_threshold.is_nan()
            || self.spectrum_threshold <= 0.0
            || self.spectrum_threshold >= 1.0
        {
            return fail(format!(
                "spectrum threshold must lie in (0,1), got {}",
                self.spectrum_threshold
            ));
        }
        if self.kappa_max_factor.is_nan() || self.kappa_max_factor <= 0.0 {
            return fail(format!(
                "kappa_max_factor must be positive, got {}",
                self.kappa_max_factor
            ));
        }
        if self.quadrature_tol.is_nan() || self.quadrature_tol <= 0.0 {
            return fail(format!(
                "quadrature tolerance must be positive, got {}",
                self.quadrature_tol
            ));
        }
        Ok(())
    }

    /// z in physical length units.
    pub fn z(&self) -> f64 {
        self.kz / self.k
    }

    /// Upper integration limit in κ.
    pub fn kappa_max(&self) -> f64 {
        self.kappa_max_factor / self.w0
    }

    /// The retained integer-OAM decomposition (β = α, θ₀ = 0).
    pub fn spectrum(&self) -> SpectralDecomposition {
        spectrum(self.m_total, self.alpha, 0.0, self.spectrum_threshold)
    }
}

/// Complex field samples on a square transverse grid at fixed z.
///
/// Row-major with x fastest; the centre sample ((n−1)/2, (n−1)/2) sits at
/// (x, y) = (0, 0).
#[derive(Debug, Clone)]
pub struct FieldGrid {
    n: usize,
    extent: f64,
    samples: Vec<Complex64>,
    z: f64,
    k: f64,
}

impl FieldGrid {
    pub fn new(n: usize, extent: f64, samples: Vec<Complex64>, z: f64, k: f64) -> Self {
        assert_eq!(samples.len(), n * n);
        assert!(n >= 3 && n % 2 == 1, "grids are odd-sided so the axis is sampled");
        assert!(extent > 0.0);
        FieldGrid {
            n,
            extent,
            samples,
            z,
            k,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Physical half-width; x and y run over [-extent, extent].
    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    /// Grid spacing.
    pub fn step(&self) -> f64 {
        2.0 * self.extent / (self.n - 1) as f64
    }

    /// Coordinate of column/row index along one axis. Computed from the
    /// integer offset to the centre so the middle sample of an odd grid
    /// sits at exactly 0.
    pub fn coord(&self, idx: usize) -> f64 {
        let c = (self.n - 1) / 2;
        self.step() * (idx as i64 - c as i64) as f64
    }

    pub fn at(&self, ix: usize, iy: usize) -> Complex64 {
        self.samples[iy * self.n + ix]
    }

    /// |Ψ|² pointwise, same layout as the samples.
    pub fn intensity(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.norm_sqr()).collect()
    }

    /// arg Ψ mapped into [0, 2π) pointwise.
    pub fn phase(&self) -> Vec<f64> {
        self.samples
            .iter()
            .map(|s| {
                let p = s.arg();
                if p < 0.0 {
                    p + TAU
                } else {
                    p
                }
            })
            .collect()
    }
}

/// Initial field of Eq-style form: Gaussian envelope times the fractional
/// phase factor with its 2π wrap along orientation α,
/// exp(−ρ²/2w₀²)·exp(−iμα)·exp(iMφ)·exp(i2πμ f_α(φ)) with φ ∈ [0, 2π).
///
/// The constant exp(−iμα) matches the fractional-state convention, so the
/// mode sum of `propagate` converges to this function at z = 0 for every α.
/// At the origin the phase is undefined; 1 is returned by convention.
pub fn initial_field(x: f64, y: f64, m_total: f64, alpha: f64, w0: f64) -> Complex64 {
    assert!(w0 > 0.0);
    let rho2 = x * x + y * y;
    if rho2 == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let label = FractionalLabel::new(m_total, alpha, 0.0);
    let mut phi = y.atan2(x);
    if phi < 0.0 {
        phi += TAU;
    }
    let cut = f64::from(u8::from(phi > 0.0 && phi < label.alpha()));
    let envelope = (-rho2 / (2.0 * w0 * w0)).exp();
    Complex64::from_polar(
        envelope,
        -label.mu() * label.alpha() + m_total * phi + TAU * label.mu() * cut,
    )
}

/// Propagation factor Φ(κ).
fn propagator(kappa: f64, k: f64, z: f64, regime: Regime) -> Complex64 {
    match regime {
        Regime::Exact => {
            if kappa <= k {
                Complex64::from_polar(1.0, (k * k - kappa * kappa).sqrt() * z)
            } else {
                Complex64::new((-(kappa * kappa - k * k).sqrt() * z).exp(), 0.0)
            }
        }
        Regime::Paraxial => Complex64::from_polar(1.0, k * z - kappa * kappa * z / (2.0 * k)),
    }
}

/// Radial kernels for all orders 0..=n_max at one radius, sharing a single
/// Bessel ladder per quadrature node.
fn kernel_row(n_max: usize, rho: f64, config: &PropagationConfig) -> (Vec<Complex64>, f64, bool) {
    let k = config.k;
    let z = config.z();
    let kappa_max = config.kappa_max();
    let regime = config.regime;
    let dim = n_max + 1;
    let mut jbuf = vec![0.0; dim];
    let mut dbuf = vec![0.0; dim];
    // the integral changes character at kappa = k; also pre-split so the
    // first panels resolve roughly one J oscillation each
    let mut breaks: Vec<f64> = Vec::new();
    if regime == Regime::Exact && k < kappa_max {
        breaks.push(k);
    }
    let cycles = (kappa_max * rho / TAU).ceil() as usize + (config.kz / TAU).ceil() as usize;
    let initial = (cycles / 2).clamp(1, 512);
    for i in 1..initial {
        breaks.push(kappa_max * i as f64 / initial as f64);
    }
    let max_panels = 4096.max(4 * initial);
    integrate_vector(
        dim,
        |kappa, out| {
            bessel_j_fill(kappa * rho, &mut jbuf);
            d_coefficient_fill(kappa, config.w0, &mut dbuf);
            let phi = propagator(kappa, k, z, regime);
            for ((o, &j), &d) in out.iter_mut().zip(&jbuf).zip(&dbuf) {
                *o = phi * (j * d);
            }
        },
        0.0,
        kappa_max,
        &breaks,
        config.quadrature_tol,
        max_panels,
    )
}

/// One radial kernel ∫₀^{κmax} d_{|m'|}(κ) J_{|m'|}(κρ) Φ(κ) dκ.
///
/// Signals non-convergence when the panel error estimate cannot be brought
/// below the configured tolerance.
pub fn radial_kernel(mp: i64, rho: f64, config: &PropagationConfig) -> Result<Complex64> {
    config.validate()?;
    assert!(rho >= 0.0);
    let n = mp.unsigned_abs() as usize;
    let (values, estimate, converged) = kernel_row(n, rho, config);
    if !converged {
        return Err(Error::NonConvergence {
            mp,
            rho,
            estimate,
            tol: config.quadrature_tol,
        });
    }
    Ok(values[n])
}

/// Evaluate the propagated field at arbitrary points (spot checks and
/// radial/azimuthal samples) without building a full grid. Radii are shared
/// between points with identical bit patterns of ρ².
pub fn field_samples(config: &PropagationConfig, points: &[(f64, f64)]) -> Result<Vec<Complex64>> {
    config.validate()?;
    let spec = config.spectrum();
    let n_max = spec
        .entries()
        .iter()
        .map(|e| e.m.unsigned_abs() as usize)
        .max()
        .unwrap_or(0);
    let mut key_index: HashMap<u64, usize> = HashMap::new();
    let mut radii: Vec<f64> = Vec::new();
    let keys: Vec<usize> = points
        .iter()
        .map(|&(x, y)| {
            let rho2 = x * x + y * y;
            *key_index.entry(rho2.to_bits()).or_insert_with(|| {
                radii.push(rho2.sqrt());
                radii.len() - 1
            })
        })
        .collect();
    let kernels: Vec<Result<Vec<Complex64>>> = radii
        .par_iter()
        .map(|&rho| {
            let (values, estimate, converged) = kernel_row(n_max, rho, config);
            if converged {
                Ok(values)
            } else {
                Err(Error::NonConvergence {
                    mp: n_max as i64,
                    rho,
                    estimate,
                    tol: config.quadrature_tol,
                })
            }
        })
        .collect();
    let mut table = Vec::with_capacity(kernels.len());
    for k in kernels {
        table.push(k?);
    }
    Ok(points
        .iter()
        .zip(keys)
        .map(|(&(x, y), key)| {
            let kern = &table[key];
            let mut phi = y.atan2(x);
            if phi < 0.0 {
                phi += TAU;
            }
            spec.entries()
                .iter()
                .map(|e| {
                    e.c * Complex64::from_polar(1.0, e.m as f64 * phi)
                        * kern[e.m.unsigned_abs() as usize]
                })
                .sum()
        })
        .collect())
}

/// Propagate the beam onto the configured grid.
///
/// Deterministic for a fixed config regardless of thread count: kernels are
/// computed per distinct radius and assembled pointwise in a fixed order.
pub fn propagate(config: &PropagationConfig) -> Result<FieldGrid> {
    config.validate()?;
    let spec = config.spectrum();
    let n_max = spec
        .entries()
        .iter()
        .map(|e| e.m.unsigned_abs() as usize)
        .max()
        .unwrap_or(0);
    let n = config.grid_n;
    let extent = config.extent * config.w0;
    let step = 2.0 * extent / (n - 1) as f64;
    let c = (n - 1) / 2;

    // distinct radii via the exact integer key dx^2 + dy^2
    let mut key_index: HashMap<u64, usize> = HashMap::new();
    let mut keys: Vec<u64> = Vec::new();
    for iy in 0..n {
        for ix in 0..n {
            let dx = ix as i64 - c as i64;
            let dy = iy as i64 - c as i64;
            let key = (dx * dx + dy * dy) as u64;
            key_index.entry(key).or_insert_with(|| {
                keys.push(key);
                keys.len() - 1
            });
        }
    }
    let radii: Vec<f64> = keys.iter().map(|&k2| step * (k2 as f64).sqrt()).collect();

    let kernels: Vec<Result<Vec<Complex64>>> = radii
        .par_iter()
        .map(|&rho| {
            let (values, estimate, converged) = kernel_row(n_max, rho, config);
            if converged {
                Ok(values)
            } else {
                Err(Error::NonConvergence {
                    mp: n_max as i64,
                    rho,
                    estimate,
                    tol: config.quadrature_tol,
                })
            }
        })
        .collect();
    let mut kernel_table: Vec<Vec<Complex64>> = Vec::with_capacity(kernels.len());
    for k in kernels {
        kernel_table.push(k?);
    }

    let coeffs: Vec<(i64, Complex64)> = spec.entries().iter().map(|e| (e.m, e.c)).collect();
    let samples: Vec<Complex64> = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let ix = idx % n;
            let iy = idx / n;
            let dx = ix as i64 - c as i64;
            let dy = iy as i64 - c as i64;
            let key = (dx * dx + dy * dy) as u64;
            let kern = &kernel_table[key_index[&key]];
            let x = step * dx as f64;
            let y = step * dy as f64;
            let mut phi = y.atan2(x);
            if phi < 0.0 {
                phi += TAU;
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for &(m, cm) in &coeffs {
                let az = Complex64::from_polar(1.0, m as f64 * phi);
                acc += cm * az * kern[m.unsigned_abs() as usize];
            }
            acc
        })
        .collect();

    Ok(FieldGrid::new(n, extent, samples, config.z(), config.k))
}
