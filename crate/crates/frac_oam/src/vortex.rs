//! Optical vortex detection by plaquette winding numbers.
//!
//! A vortex is a phase singularity: the wrapped phase accumulated around a
//! closed loop is 2π times an integer charge. On a sampled grid the winding
//! of each 2×2 plaquette locates singularities to one cell; the sum of
//! plaquette windings over a region telescopes to the winding along the
//! region boundary, which provides an independent net-charge oracle.

use num_complex::Complex64;
use std::f64::consts::{PI, TAU};

use crate::propagation::FieldGrid;

/// One detected phase singularity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vortex {
    /// Position (refined inside the plaquette), length units of the grid.
    pub x: f64,
    pub y: f64,
    /// Integer topological charge, never zero.
    pub charge: i64,
}

/// All singularities found on one grid.
#[derive(Debug, Clone)]
pub struct VortexSet {
    vortices: Vec<Vortex>,
    grid_n: usize,
    extent: f64,
    z: f64,
    intensity_floor: f64,
}

impl VortexSet {
    /// Sorted by (y, x); at most one vortex per plaquette by construction.
    pub fn vortices(&self) -> &[Vortex] {
        &self.vortices
    }

    pub fn grid_n(&self) -> usize {
        self.grid_n
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    /// The absolute intensity floor used during detection.
    pub fn intensity_floor(&self) -> f64 {
        self.intensity_floor
    }
}

fn wrap_phase_diff(d: f64) -> f64 {
    // into (-pi, pi]
    let mut w = d % TAU;
    if w > PI {
        w -= TAU;
    } else if w <= -PI {
        w += TAU;
    }
    w
}

/// Winding number of the 2×2 plaquette with lower-left corner (i, j):
/// (1/2π) Σ of phase differences around the counter-clockwise loop, each
/// wrapped into (−π, π]. Panics if the plaquette does not fit the grid.
pub fn plaquette_winding(grid: &FieldGrid, i: usize, j: usize) -> i64 {
    let n = grid.n();
    assert!(i + 1 < n && j + 1 < n, "plaquette index out of range");
    let p00 = grid.at(i, j).arg();
    let p10 = grid.at(i + 1, j).arg();
    let p11 = grid.at(i + 1, j + 1).arg();
    let p01 = grid.at(i, j + 1).arg();
    let total = wrap_phase_diff(p10 - p00)
        + wrap_phase_diff(p11 - p10)
        + wrap_phase_diff(p01 - p11)
        + wrap_phase_diff(p00 - p01);
    (total / TAU).round() as i64
}

/// Refine the singularity position: fit planes to Re Ψ and Im Ψ over the
/// four corners and intersect their zero lines; falls back to the plaquette
/// centre when the intersection leaves the cell.
fn refine_position(grid: &FieldGrid, i: usize, j: usize) -> (f64, f64) {
    let h = grid.step();
    let x0 = grid.coord(i);
    let y0 = grid.coord(j);
    let f = |di: usize, dj: usize| grid.at(i + di, j + dj);
    let (f00, f10, f01, f11) = (f(0, 0), f(1, 0), f(0, 1), f(1, 1));
    // least-squares plane v ~ a + b u + c w over the unit cell (u, w in [0,1])
    let plane = |v00: f64, v10: f64, v01: f64, v11: f64| {
        let b = 0.5 * ((v10 + v11) - (v00 + v01));
        let c = 0.5 * ((v01 + v11) - (v00 + v10));
        let a = 0.25 * (v00 + v10 + v01 + v11) - 0.5 * (b + c);
        (a, b, c)
    };
    let (ar, br, cr) = plane(f00.re, f10.re, f01.re, f11.re);
    let (ai, bi, ci) = plane(f00.im, f10.im, f01.im, f11.im);
    let det = br * ci - bi * cr;
    let centre = (x0 + 0.5 * h, y0 + 0.5 * h);
    if det.abs() < 1e-300 {
        return centre;
    }
    let u = (-ar * ci + ai * cr) / det;
    let w = (-br * ai + bi * ar) / det;
    if (0.0..=1.0).contains(&u) && (0.0..=1.0).contains(&w) {
        (x0 + u * h, y0 + w * h)
    } else {
        centre
    }
}

/// Scan every plaquette; report those with nonzero winding whose four
/// corner intensities all exceed the absolute `intensity_floor`.
pub fn detect_vortices(grid: &FieldGrid, intensity_floor: f64) -> VortexSet {
    assert!(intensity_floor >= 0.0);
    let n = grid.n();
    let mut vortices = Vec::new();
    for j in 0..n - 1 {
        for i in 0..n - 1 {
            let corners = [
                grid.at(i, j),
                grid.at(i + 1, j),
                grid.at(i, j + 1),
                grid.at(i + 1, j + 1),
            ];
            if corners.iter().any(|c| c.norm_sqr() <= intensity_floor) {
                continue;
            }
            let charge = plaquette_winding(grid, i, j);
            if charge != 0 {
                let (x, y) = refine_position(grid, i, j);
                vortices.push(Vortex { x, y, charge });
            }
        }
    }
    vortices.sort_by(|a, b| (a.y, a.x).partial_cmp(&(b.y, b.x)).unwrap());
    VortexSet {
        vortices,
        grid_n: n,
        extent: grid.extent(),
        z: grid.z(),
        intensity_floor,
    }
}

/// Default floor: 1e-6 of the peak intensity.
pub fn default_intensity_floor(grid: &FieldGrid) -> f64 {
    1e-6 * grid
        .samples()
        .iter()
        .map(Complex64::norm_sqr)
        .fold(0.0, f64::max)
}

/// Sum of detected charges within the given radius of the axis.
pub fn net_charge(vset: &VortexSet, radius: f64) -> i64 {
    assert!(radius > 0.0);
    vset.vortices
        .iter()
        .filter(|v| v.x.hypot(v.y) < radius)
        .map(|v| v.charge)
        .sum()
}

/// Winding of the wrapped phase along the boundary of the plaquette region
/// whose centres lie within `radius`; by the telescoping identity this
/// equals the sum of all plaquette windings inside, whether or not they
/// pass an intensity floor.
pub fn loop_winding(grid: &FieldGrid, radius: f64) -> i64 {
    assert!(radius > 0.0);
    let n = grid.n();
    let inside = |i: i64, j: i64| -> bool {
        if i < 0 || j < 0 || i + 1 >= n as i64 || j + 1 >= n as i64 {
            return false;
        }
        let cx = 0.5 * (grid.coord(i as usize) + grid.coord(i as usize + 1));
        let cy = 0.5 * (grid.coord(j as usize) + grid.coord(j as usize + 1));
        cx.hypot(cy) < radius
    };
    let mut total = 0.0;
    for j in 0..n as i64 - 1 {
        for i in 0..n as i64 - 1 {
            if !inside(i, j) {
                continue;
            }
            let (iu, ju) = (i as usize, j as usize);
            // directed edges of the CCW loop; keep those on the region boundary
            let edges = [
                ((iu, ju), (iu + 1, ju), (i, j - 1)),         // bottom
                ((iu + 1, ju), (iu + 1, ju + 1), (i + 1, j)), // right
                ((iu + 1, ju + 1), (iu, ju + 1), (i, j + 1)), // top
                ((iu, ju + 1), (iu, ju), (i - 1, j)),         // left
            ];
            for (from, to, neighbour) in edges {
                if !inside(neighbour.0, neighbour.1) {
                    let a = grid.at(from.0, from.1).arg();
                    let b = grid.at(to.0, to.1).arg();
                    total += wrap_phase_diff(b - a);
                }
            }
        }
    }
    (total / TAU).round() as i64
}

/// Sum of plaquette windings over the same disc region as [`loop_winding`],
/// ignoring any intensity floor.
pub fn plaquette_sum(grid: &FieldGrid, radius: f64) -> i64 {
    assert!(radius > 0.0);
    let n = grid.n();
    let mut total = 0;
    for j in 0..n - 1 {
        for i in 0..n - 1 {
            let cx = 0.5 * (grid.coord(i) + grid.coord(i + 1));
            let cy = 0.5 * (grid.coord(j) + grid.coord(j + 1));
            if cx.hypot(cy) < radius {
                total += plaquette_winding(grid, i, j);
            }
        }
    }
    total
}
