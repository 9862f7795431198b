//! Closed-form results in the L → ∞ limit.
//!
//! Overlaps of fractional OAM states, their decomposition over integer OAM
//! eigenstates, the OAM mean and (divergent) truncated variance, and the
//! unitary operator that rotates the orientation of the phase discontinuity.
//!
//! Conventions: M = m + μ with μ ∈ [0, 1); orientations live in [0, 2π) and
//! combine by modulo-2π addition (written ⊕ below); θ₀ enters only through
//! the global phase exp(i(M−M')θ₀).

use num_complex::Complex64;
use std::f64::consts::{PI, TAU};

use crate::bp_space::FractionalLabel;
use crate::wrap_angle;

/// Two step heights closer than this are treated as equal when a formula has
/// a removable singularity in M − M'.
const DEGENERATE_EPS: f64 = 1e-9;

fn frac_part(m_total: f64) -> f64 {
    m_total - m_total.floor()
}

fn is_integer(m_total: f64) -> bool {
    (m_total - m_total.round()).abs() < DEGENERATE_EPS
}

/// ⟨M'(0)|M(β)⟩ in the dense-grid limit.
///
/// For M ≠ M' this is
/// exp(−iμβ) · i exp(i(M−M')θ₀)/(2π(M−M')) ·
/// [e^{i2πμ}(1 − e^{i(M−M')β}) + e^{i(M−M')β} − e^{i2π(M−M')}],
/// and the removable M = M' singularity is replaced by its limit
/// exp(−iμβ)[(1 − β/2π) + (β/2π)e^{i2πμ}].
fn overlap_base(m_total: f64, mp_total: f64, beta: f64, theta0: f64) -> Complex64 {
    let mu = frac_part(m_total);
    let diff = m_total - mp_total;
    let phase0 = Complex64::from_polar(1.0, diff * theta0);
    let pre = Complex64::from_polar(1.0, -mu * beta);
    if diff.abs() < DEGENERATE_EPS {
        let t = beta / TAU;
        let lim = Complex64::new(1.0 - t, 0.0) + t * Complex64::from_polar(1.0, TAU * mu);
        return pre * lim * phase0;
    }
    let e_mu = Complex64::from_polar(1.0, TAU * mu);
    let e_db = Complex64::from_polar(1.0, diff * beta);
    let e_d2pi = Complex64::from_polar(1.0, diff * TAU);
    let bracket = e_mu * (Complex64::new(1.0, 0.0) - e_db) + e_db - e_d2pi;
    pre * Complex64::new(0.0, 1.0) * phase0 / (TAU * diff) * bracket
}

/// General overlap ⟨M'(α')|M(α)⟩.
///
/// One orientation is rotated away first: with β = α ⊕ (−α') the overlap is
/// exp(i(m−m')α') ⟨M'(0)|M(β)⟩. The modulus never exceeds 1.
pub fn overlap(m_total: f64, alpha: f64, mp_total: f64, alphap: f64, theta0: f64) -> Complex64 {
    let m = m_total.floor();
    let mp = mp_total.floor();
    let beta = wrap_angle(alpha - alphap);
    Complex64::from_polar(1.0, (m - mp) * alphap) * overlap_base(m_total, mp_total, beta, theta0)
}

/// Overlap probability |⟨M'(0)|M(β)⟩|² by its trigonometric closed form.
///
/// For M = M' this reduces to (1 − β/π)² sin²(μπ) + cos²(μπ), which depends
/// only on the fractional part; along β = 0 diagonals with M − M' = K it is
/// sin²(πK)/(π²K²) independently of M.
pub fn overlap_probability(m_total: f64, mp_total: f64, beta: f64) -> f64 {
    let diff = m_total - mp_total;
    if diff.abs() < DEGENERATE_EPS {
        let mu = frac_part(m_total);
        let (s, c) = (mu * PI).sin_cos();
        let a = 1.0 - beta / PI;
        return a * a * s * s + c * c;
    }
    let sm = (m_total * PI).sin();
    let smp = (mp_total * PI).sin();
    let num = sm * sm + smp * smp - 2.0 * (diff * (PI - beta)).cos() * sm * smp;
    (num / (diff * diff * PI * PI)).clamp(0.0, 1.0)
}

/// Amplitude c_{m'}[M(β)] = ⟨m'|M(β)⟩ of the integer-OAM decomposition.
///
/// Integer M yields the Kronecker delta (the μ → 0 limit).
pub fn oam_amplitude(m_total: f64, beta: f64, theta0: f64, mp: i64) -> Complex64 {
    if is_integer(m_total) {
        let hit = m_total.round() as i64 == mp;
        return Complex64::new(f64::from(u8::from(hit)), 0.0);
    }
    overlap_base(m_total, mp as f64, beta, theta0)
}

/// Probability P_{m'}(M) = sin²(μπ)/((M−m')²π²); a Kronecker delta for
/// integer M. Independent of the orientation β.
pub fn oam_probability(m_total: f64, mp: i64) -> f64 {
    if is_integer(m_total) {
        return f64::from(u8::from(m_total.round() as i64 == mp));
    }
    let mu = frac_part(m_total);
    let s = (mu * PI).sin();
    let diff = m_total - mp as f64;
    s * s / (diff * diff * PI * PI)
}

/// OAM mean M̄ = M − sin(2Mπ)/(2π).
pub fn oam_mean(m_total: f64) -> f64 {
    m_total - (2.0 * m_total * PI).sin() / TAU
}

/// Truncated OAM variance Σ_{|m'| ≤ mmax} (m' − M̄)² P_{m'}(M).
///
/// Grows without bound in `mmax` for non-integer M: far tail terms approach
/// the constant sin²(μπ)/π² on each side.
pub fn oam_variance_truncated(m_total: f64, mmax: u64) -> f64 {
    assert!(mmax >= 1, "mmax must be at least 1");
    let mean = oam_mean(m_total);
    let mmax = mmax as i64;
    (-mmax..=mmax)
        .map(|mp| {
            let d = mp as f64 - mean;
            d * d * oam_probability(m_total, mp)
        })
        .sum()
}

/// One entry of a truncated integer-OAM decomposition.
#[derive(Debug, Clone, Copy)]
pub struct SpectralEntry {
    pub m: i64,
    pub c: Complex64,
}

/// Truncated decomposition of |M(β)⟩ over integer OAM states, with the
/// analytic probability of the discarded tail.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    entries: Vec<SpectralEntry>,
    m_total: f64,
    beta: f64,
    theta0: f64,
    threshold: f64,
    tail_probability: f64,
}

impl SpectralDecomposition {
    /// Entries sorted by m'; every retained probability exceeds the threshold.
    pub fn entries(&self) -> &[SpectralEntry] {
        &self.entries
    }

    pub fn m_total(&self) -> f64 {
        self.m_total
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn theta0(&self) -> f64 {
        self.theta0
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// Σ of P_{m'} over all discarded m', from the exact partial-fraction
    /// tail sum.
    pub fn tail_probability(&self) -> f64 {
        self.tail_probability
    }

    /// Σ|c|² over retained entries.
    pub fn retained_probability(&self) -> f64 {
        self.entries.iter().map(|e| e.c.norm_sqr()).sum()
    }
}

/// All integer modes with P_{m'}(M) > threshold, plus the analytic tail.
///
/// Panics unless 0 < threshold < 1.
pub fn spectrum(m_total: f64, beta: f64, theta0: f64, threshold: f64) -> SpectralDecomposition {
    assert!(
        threshold > 0.0 && threshold < 1.0,
        "threshold must lie in (0, 1)"
    );
    if is_integer(m_total) {
        return SpectralDecomposition {
            entries: vec![SpectralEntry {
                m: m_total.round() as i64,
                c: Complex64::new(1.0, 0.0),
            }],
            m_total,
            beta,
            theta0,
            threshold,
            tail_probability: 0.0,
        };
    }
    let mu = frac_part(m_total);
    // P > threshold  <=>  |M - m'| < sin(mu*pi) / (sqrt(threshold) * pi)
    let radius = (mu * PI).sin().abs() / (threshold.sqrt() * PI);
    let lo = (m_total - radius).ceil() as i64;
    let hi = (m_total + radius).floor() as i64;
    let mut entries = Vec::new();
    for mp in lo..=hi {
        if oam_probability(m_total, mp) > threshold {
            entries.push(SpectralEntry {
                m: mp,
                c: oam_amplitude(m_total, beta, theta0, mp),
            });
        }
    }
    let tail_probability = if entries.is_empty() {
        1.0
    } else {
        let first = entries.first().unwrap().m;
        let last = entries.last().unwrap().m;
        tail_probability_outside(m_total, first, last)
    };
    SpectralDecomposition {
        entries,
        m_total,
        beta,
        theta0,
        threshold,
        tail_probability,
    }
}

/// Σ_{m' < lo or m' > hi} P_{m'}(M) via trigamma tail sums.
pub fn tail_probability_outside(m_total: f64, lo: i64, hi: i64) -> f64 {
    if is_integer(m_total) {
        let m = m_total.round() as i64;
        return f64::from(u8::from(m < lo || m > hi));
    }
    let mu = frac_part(m_total);
    let s = (mu * PI).sin();
    let upper = trigamma(hi as f64 + 1.0 - m_total);
    let lower = trigamma(m_total - lo as f64 + 1.0);
    s * s / (PI * PI) * (upper + lower)
}

/// Truncated Σ m'P_{m'}(M) over m' ∈ [lo, hi] plus the analytic tail
/// correction; equals oam_mean(M) up to the accuracy of ψ and ψ'.
///
/// Writing m' = M + (m'−M), the tail of Σ m'/(M−m')² splits into trigamma
/// terms and a digamma difference whose log divergences cancel between the
/// two tails.
pub fn oam_mean_by_sum(m_total: f64, half_width: i64) -> f64 {
    assert!(half_width >= 1);
    if is_integer(m_total) {
        return m_total.round();
    }
    let center = m_total.round() as i64;
    let lo = center - half_width;
    let hi = center + half_width;
    let mut sum = 0.0;
    for mp in lo..=hi {
        sum += mp as f64 * oam_probability(m_total, mp);
    }
    let mu = frac_part(m_total);
    let s = (mu * PI).sin();
    let a = hi as f64 + 1.0 - m_total; // upper tail offset
    let b = m_total - lo as f64 + 1.0; // lower tail offset
    let tail =
        s * s / (PI * PI) * (m_total * (trigamma(a) + trigamma(b)) + digamma(b) - digamma(a));
    sum + tail
}

/// Result of applying the discontinuity-rotation operator Û_m(β).
#[derive(Debug, Clone, Copy)]
pub struct RotationResult {
    /// Unit-modulus phase exp(i(m − m')β) acquired by the state.
    pub phase: Complex64,
    /// The rotated label: α ← α ⊕ β with M and μ unchanged.
    pub label: FractionalLabel,
}

/// Û_m(β)|M'(α)⟩ = exp(i(m − m')β)|M'(α ⊕ β)⟩, where m' is the integer part
/// of the state's M'. β may be any real and is reduced modulo 2π; the phase
/// is unchanged by the reduction since m − m' is an integer.
pub fn rotate(m_index: i64, beta: f64, label: &FractionalLabel) -> RotationResult {
    let beta = wrap_angle(beta);
    let phase = Complex64::from_polar(1.0, (m_index - label.m()) as f64 * beta);
    RotationResult {
        phase,
        label: label.with_alpha(label.alpha() + beta),
    }
}

// Asymptotic coefficients are Bernoulli numbers B_2, B_4, ...
const BERNOULLI: [f64; 7] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
];

/// Digamma ψ(x) for x > 0: recurrence up to x ≥ 10, then the asymptotic
/// series ln x − 1/(2x) − Σ B_{2k}/(2k x^{2k}).
fn digamma(mut x: f64) -> f64 {
    assert!(x > 0.0, "digamma requires x > 0");
    let mut shift = 0.0;
    while x < 10.0 {
        shift -= 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    let mut series = 0.0;
    let mut p = inv2;
    for (k, b) in BERNOULLI.iter().enumerate() {
        series += b / (2.0 * (k as f64 + 1.0)) * p;
        p *= inv2;
    }
    shift + x.ln() - 0.5 / x - series
}

/// Trigamma ψ'(x) for x > 0: recurrence up to x ≥ 10, then
/// 1/x + 1/(2x²) + Σ B_{2k}/x^{2k+1}.
fn trigamma(mut x: f64) -> f64 {
    assert!(x > 0.0, "trigamma requires x > 0");
    let mut shift = 0.0;
    while x < 10.0 {
        shift += 1.0 / (x * x);
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut p = inv2 * inv;
    for b in BERNOULLI {
        series += b * p;
        p *= inv2;
    }
    shift + inv + 0.5 * inv2 + series
}
