//! Field-level behaviour: dark line along the cut, integer-beam charge
//! conservation, nearest-integer vortex counts, paraxial shape invariance,
//! pair-creation neutrality and detection-resolution stability.

use num_complex::Complex64;
use std::f64::consts::TAU;

use frac_oam::propagation::{field_samples, propagate, PropagationConfig, Regime};
use frac_oam::vortex::{default_intensity_floor, detect_vortices, loop_winding, plaquette_sum};

/// The radial dark line for mu = 1/2: beyond the diffraction-filled core
/// the on-cut intensity sits orders of magnitude below the peak. On the cut
/// the mode pairs cancel exactly up to kernel truncation deficits, which
/// grow with the order; the default 64-mode cut with a large kappa_max is
/// therefore the cleanest configuration.
#[test]
fn dark_line_along_cut() {
    let mut config = PropagationConfig::new(3.5, 0.0, 100.0, 1.0, Regime::Exact);
    config.grid_n = 101;
    config.kappa_max_factor = 320.0;
    let grid = propagate(&config).unwrap();
    let peak = grid.intensity().iter().copied().fold(0.0, f64::max);
    let c = (config.grid_n - 1) / 2;
    let mut worst: f64 = 0.0;
    for ix in 0..config.grid_n {
        let x = grid.coord(ix);
        if (1.0..=2.8).contains(&x) {
            worst = worst.max(grid.at(ix, c).norm_sqr() / peak);
        }
    }
    assert!(worst < 1e-4, "on-cut intensity {worst:.2e} of peak");
}

#[test]
fn integer_beam_keeps_axis_charge() {
    for (m, kz) in [(3.0, 5.0), (2.0, 1.0), (2.0, 50.0)] {
        let mut config = PropagationConfig::new(m, 0.0, 100.0, kz, Regime::Exact);
        config.grid_n = 201;
        let grid = propagate(&config).unwrap();
        assert_eq!(
            loop_winding(&grid, 1.0),
            m as i64,
            "M={m} kz={kz}: loop winding"
        );
        assert_eq!(loop_winding(&grid, 1.0), plaquette_sum(&grid, 1.0));
        // the axis singularity sits on an exactly-zero sample, so nothing
        // off axis may be reported above the floor
        let vset = detect_vortices(&grid, default_intensity_floor(&grid));
        for v in vset.vortices() {
            assert!(
                v.x.hypot(v.y) < 0.1,
                "M={m} kz={kz}: stray vortex at ({}, {})",
                v.x,
                v.y
            );
        }
    }
}

#[test]
fn nearest_integer_charge_for_m_3_2() {
    for kz in [1.0, 5.0] {
        let mut config = PropagationConfig::new(3.2, 0.0, 100.0, kz, Regime::Exact);
        config.grid_n = 201;
        config.spectrum_threshold = 1e-6;
        let grid = propagate(&config).unwrap();
        assert_eq!(loop_winding(&grid, 1.0), 3, "kz={kz}");
        assert_eq!(plaquette_sum(&grid, 1.0), 3, "kz={kz}");
    }
}

/// Detection is stable when the grid is refined: the acceptance config at
/// 201 and 401 points per side reports the same net charge.
#[test]
fn resolution_stability_of_net_charge() {
    let mut nets = Vec::new();
    for n in [201usize, 401] {
        let mut config = PropagationConfig::new(3.5, 0.0, 100.0, 1.0, Regime::Exact);
        config.grid_n = n;
        config.spectrum_threshold = 1e-6;
        let grid = propagate(&config).unwrap();
        nets.push(loop_winding(&grid, 1.0));
    }
    assert_eq!(nets[0], nets[1]);
    assert_eq!(nets[0], 3);
}

/// Between kz snapshots the chain vortices appear in +-1 pairs: the change
/// of the net sleeve charge is even unless an event straddles the sleeve
/// boundary, which is logged rather than asserted.
#[test]
fn pair_creation_neutrality_between_snapshots() {
    let sleeve_net = |kz: f64| {
        let mut config = PropagationConfig::new(3.5, 0.0, 100.0, kz, Regime::Exact);
        config.grid_n = 201;
        config.spectrum_threshold = 1e-6;
        let grid = propagate(&config).unwrap();
        let vset = detect_vortices(&grid, default_intensity_floor(&grid));
        let mut net = 0i64;
        let mut near_boundary = false;
        for v in vset.vortices() {
            let inside = v.x > 0.2 && v.y.abs() < 0.15;
            if inside {
                net += v.charge;
            }
            let margin = grid.step() * 2.0;
            if (v.y.abs() - 0.15).abs() < margin || (v.x - 0.2).abs() < margin {
                near_boundary = true;
            }
        }
        (net, near_boundary)
    };
    let (a, ba) = sleeve_net(20.0);
    let (b, bb) = sleeve_net(50.0);
    if ba || bb {
        println!(
            "pair-neutrality: event near sleeve boundary, change {} (logged)",
            b - a
        );
    } else {
        assert_eq!((b - a) % 2, 0, "sleeve charge {a} -> {b}");
    }
}

/// For a very wide beam the paraxial intensity profile is carried along
/// unchanged: after an optimal rigid rotation the kz = 200 intensity
/// matches kz = 1 to well under 1% RMS on a radial/azimuthal sample.
#[test]
fn paraxial_profile_shape_invariance() {
    let radii = [0.5, 1.0, 1.5, 2.0];
    let azimuths: Vec<f64> = (0..32).map(|j| TAU * j as f64 / 32.0).collect();
    let sample = |kz: f64, rot: f64| -> Vec<f64> {
        let mut config = PropagationConfig::new(3.5, 0.0, 1e4, kz, Regime::Paraxial);
        config.grid_n = 3;
        let points: Vec<(f64, f64)> = radii
            .iter()
            .flat_map(|&r| {
                azimuths
                    .iter()
                    .map(move |&p| ((p + rot).cos() * r, (p + rot).sin() * r))
            })
            .collect();
        field_samples(&config, &points)
            .unwrap()
            .iter()
            .map(Complex64::norm_sqr)
            .collect()
    };
    let reference = sample(1.0, 0.0);
    let scale: f64 = reference.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut best = f64::INFINITY;
    for j in 0..64 {
        let rot = TAU * j as f64 / 64.0;
        let rotated = sample(200.0, rot);
        let dist: f64 = reference
            .iter()
            .zip(&rotated)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        best = best.min(dist / scale);
    }
    assert!(best < 0.01, "best relative intensity RMS {best}");
}

/// Finite-space overlaps converge to the closed forms at O(1/L): the mean
/// error over a fixed tuple set halves with each doubling of L.
#[test]
fn finite_space_error_halves_with_l() {
    use frac_oam::analytic::overlap;
    use frac_oam::bp_space::{fractional_state, inner_product, FiniteAngleSpace, FractionalLabel};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    let mut rng = ChaCha8Rng::seed_from_u64(20240612);
    let tuples: Vec<(f64, f64, f64, f64)> = (0..50)
        .map(|_| {
            (
                rng.gen_range(-4.0..4.0),
                rng.gen_range(-4.0..4.0),
                rng.gen_range(0.0..TAU),
                rng.gen_range(0.0..TAU),
            )
        })
        .collect();
    let mut means = Vec::new();
    for l in [250usize, 500, 1000, 2000] {
        let space = FiniteAngleSpace::new(l, 0.0);
        let mean: f64 = tuples
            .iter()
            .map(|&(m, mp, a, ap)| {
                let u = fractional_state(&space, &FractionalLabel::new(mp, ap, 0.0));
                let v = fractional_state(&space, &FractionalLabel::new(m, a, 0.0));
                (inner_product(&u, &v) - overlap(m, a, mp, ap, 0.0)).norm()
            })
            .sum::<f64>()
            / tuples.len() as f64;
        means.push(mean);
    }
    for pair in means.windows(2) {
        let ratio = pair[0] / pair[1];
        assert!(
            (1.5..=2.7).contains(&ratio),
            "halving ratio {ratio} out of range; means {means:?}"
        );
    }
}
