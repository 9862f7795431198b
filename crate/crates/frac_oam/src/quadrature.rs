//! Adaptive panel quadrature with nested Gauss–Legendre rules.
//!
//! Each panel is integrated with 16- and 32-point Gauss–Legendre rules; the
//! difference serves as the error estimate and the worst panel is bisected
//! until the total estimate meets the tolerance. Nodes and weights are
//! generated at start-up by Newton iteration on the Legendre recurrence, so
//! there are no transcribed coefficient tables to trust.

use num_complex::Complex64;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

/// Nodes and weights of an n-point Gauss–Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess for the i-th root of P_n
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // evaluate P_n(x) and P_n'(x) by upward recurrence
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn rule16() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(16))
}

fn rule32() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(32))
}

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl Panel {
    fn new<F: FnMut(f64) -> Complex64>(a: f64, b: f64, f: &mut F) -> Self {
        let value32 = apply_rule(rule32(), a, b, f);
        let value16 = apply_rule(rule16(), a, b, f);
        Panel {
            a,
            b,
            value: value32,
            error: (value32 - value16).norm(),
        }
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn apply_rule<F: FnMut(f64) -> Complex64>(
    rule: &(Vec<f64>, Vec<f64>),
    a: f64,
    b: f64,
    f: &mut F,
) -> Complex64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, w) in rule.0.iter().zip(&rule.1) {
        acc += *w * f(c + h * x);
    }
    acc * h
}

/// Outcome of an adaptive integration.
pub struct QuadratureResult {
    pub value: Complex64,
    pub error_estimate: f64,
    pub converged: bool,
}

/// Integrate a complex-valued function over [a, b], starting from the given
/// interior break points, until the summed panel error estimate drops below
/// `max(tol_abs, tol_rel * |integral|)` or the panel budget is exhausted.
pub fn integrate_complex<F: FnMut(f64) -> Complex64>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol_abs: f64,
    tol_rel: f64,
    max_panels: usize,
) -> QuadratureResult {
    assert!(b > a, "empty integration interval");
    let mut edges: Vec<f64> = std::iter::once(a)
        .chain(breaks.iter().copied().filter(|&x| x > a && x < b))
        .chain(std::iter::once(b))
        .collect();
    edges.sort_by(f64::total_cmp);
    edges.dedup();

    let mut heap = BinaryHeap::new();
    for w in edges.windows(2) {
        heap.push(Panel::new(w[0], w[1], &mut f));
    }
    loop {
        let total: Complex64 = heap.iter().map(|p| p.value).sum();
        let err: f64 = heap.iter().map(|p| p.error).sum();
        let tol = tol_abs.max(tol_rel * total.norm());
        if err <= tol {
            return QuadratureResult {
                value: total,
                error_estimate: err,
                converged: true,
            };
        }
        if heap.len() >= max_panels {
            return QuadratureResult {
                value: total,
                error_estimate: err,
                converged: false,
            };
        }
        let worst = heap.pop().expect("heap cannot be empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval at floating-point resolution; keep its value
            let mut spent = worst;
            spent.error = 0.0;
            heap.push(spent);
            continue;
        }
        heap.push(Panel::new(worst.a, mid, &mut f));
        heap.push(Panel::new(mid, worst.b, &mut f));
    }
}

/// Real-valued convenience wrapper around [`integrate_complex`].
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    tol_abs: f64,
    tol_rel: f64,
    max_panels: usize,
) -> QuadratureResult {
    integrate_complex(
        |x| Complex64::new(f(x), 0.0),
        a,
        b,
        &[],
        tol_abs,
        tol_rel,
        max_panels,
    )
}

/// Adaptive integration of a vector-valued integrand sharing one panel
/// subdivision: all components are integrated on the same panels and the
/// panel error is the worst component error. Used to evaluate the radial
/// kernels of every azimuthal order in a single pass.
pub fn integrate_vector<F: FnMut(f64, &mut [Complex64])>(
    dim: usize,
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol_abs: f64,
    max_panels: usize,
) -> (Vec<Complex64>, f64, bool) {
    assert!(b > a, "empty integration interval");
    struct VPanel {
        a: f64,
        b: f64,
        value: Vec<Complex64>,
        error: f64,
    }
    let eval = |a: f64, b: f64, f: &mut F, scratch: &mut Vec<Complex64>| -> VPanel {
        let dim = scratch.len();
        let mut v32 = vec![Complex64::new(0.0, 0.0); dim];
        let mut v16 = vec![Complex64::new(0.0, 0.0); dim];
        for (rule, out) in [(rule32(), &mut v32), (rule16(), &mut v16)] {
            let c = 0.5 * (a + b);
            let h = 0.5 * (b - a);
            for (x, w) in rule.0.iter().zip(&rule.1) {
                f(c + h * x, scratch);
                for (o, s) in out.iter_mut().zip(scratch.iter()) {
                    *o += *w * s;
                }
            }
            for o in out.iter_mut() {
                *o *= h;
            }
        }
        let error = v32
            .iter()
            .zip(&v16)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        VPanel {
            a,
            b,
            value: v32,
            error,
        }
    };

    let mut scratch = vec![Complex64::new(0.0, 0.0); dim];
    let mut edges: Vec<f64> = std::iter::once(a)
        .chain(breaks.iter().copied().filter(|&x| x > a && x < b))
        .chain(std::iter::once(b))
        .collect();
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    let mut panels: Vec<VPanel> = edges
        .windows(2)
        .map(|w| eval(w[0], w[1], &mut f, &mut scratch))
        .collect();
    loop {
        let err: f64 = panels.iter().map(|p| p.error).sum();
        if err <= tol_abs || panels.len() >= max_panels {
            let mut total = vec![Complex64::new(0.0, 0.0); dim];
            for p in &panels {
                for (t, v) in total.iter_mut().zip(&p.value) {
                    *t += v;
                }
            }
            return (total, err, err <= tol_abs);
        }
        let (worst_idx, _) = panels
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.error.total_cmp(&b.1.error))
            .expect("at least one panel");
        let worst = panels.swap_remove(worst_idx);
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            let mut spent = worst;
            spent.error = 0.0;
            panels.push(spent);
            continue;
        }
        panels.push(eval(worst.a, mid, &mut f, &mut scratch));
        panels.push(eval(mid, worst.b, &mut f, &mut scratch));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn legendre_rules_are_sane() {
        for n in [2, 8, 16, 32] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
            for pair in x.windows(2) {
                assert!(pair[0] < pair[1]);
            }
            // integrates x^{2n-2} better than 1e-14: exactness degree 2n-1
            let exact = 2.0 / (2.0 * n as f64 - 1.0);
            let got: f64 = x
                .iter()
                .zip(&w)
                .map(|(xi, wi)| wi * xi.powi(2 * n as i32 - 2))
                .sum();
            assert!((got - exact).abs() < 1e-14, "n={n}");
        }
    }

    #[test]
    fn gaussian_integral() {
        let r = integrate(|x| (-x * x).exp(), -8.0, 8.0, 1e-12, 0.0, 200);
        assert!(r.converged);
        assert!((r.value.re - PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn oscillatory_integral() {
        // int_0^10 cos(50 x) dx = sin(500)/50
        let r = integrate(|x| (50.0 * x).cos(), 0.0, 10.0, 1e-12, 0.0, 2000);
        assert!(r.converged);
        assert!((r.value.re - (500f64).sin() / 50.0).abs() < 1e-11);
    }

    #[test]
    fn relative_termination_on_tiny_values() {
        // integral ~ 8.3e-22; absolute tolerances would stop immediately
        let scale = 1e-21;
        let r = integrate(|x| scale * (-x * x).exp(), -6.0, 6.0, 0.0, 1e-12, 200);
        assert!(r.converged);
        assert!((r.value.re - scale * PI.sqrt()).abs() < 1e-12 * scale * PI.sqrt());
    }

    #[test]
    fn complex_phase_integral() {
        // int_0^1 e^{i a x} dx = (e^{ia} - 1)/(ia)
        let a = 37.0;
        let r = integrate_complex(
            |x| Complex64::from_polar(1.0, a * x),
            0.0,
            1.0,
            &[],
            1e-13,
            0.0,
            500,
        );
        let expected = (Complex64::from_polar(1.0, a) - 1.0) / Complex64::new(0.0, a);
        assert!((r.value - expected).norm() < 1e-12);
    }

    #[test]
    fn nonconvergence_is_reported() {
        // |x|^{-1/2} near 0 with an absurd tolerance and tiny budget
        let r = integrate(
            |x: f64| x.abs().sqrt().recip().min(1e8),
            0.0,
            1.0,
            1e-15,
            0.0,
            8,
        );
        assert!(!r.converged);
        assert!(r.error_estimate > 1e-15);
    }

    #[test]
    fn vector_matches_scalar() {
        let (v, _, ok) = integrate_vector(
            2,
            |x, out| {
                out[0] = Complex64::new((3.0 * x).sin(), 0.0);
                out[1] = Complex64::from_polar((-x * x).exp(), 2.0 * x);
            },
            0.0,
            4.0,
            &[1.0],
            1e-12,
            400,
        );
        assert!(ok);
        let s0 = integrate(|x| (3.0 * x).sin(), 0.0, 4.0, 1e-13, 0.0, 400);
        let s1 = integrate_complex(
            |x| Complex64::from_polar((-x * x).exp(), 2.0 * x),
            0.0,
            4.0,
            &[],
            1e-13,
            0.0,
            400,
        );
        assert!((v[0] - s0.value).norm() < 1e-11);
        assert!((v[1] - s1.value).norm() < 1e-11);
    }
}
