//! Synthetic pixel antennas built from short-dipole ports on a square grid.
//!
//! Pixel nodes sit on a `rows x cols` lattice in the z = 0 plane. A pixel
//! port is a short dipole across each pair of adjacent nodes (horizontal
//! ports first, row by row, then vertical ports), oriented along the edge.
//! The antenna port is a z-directed feed probe under the centre node.
//!
//! Coupling between ports i != j separated by d is
//! `c * exp(-j k d) / (k d)`, symmetric by construction, with
//! `c = FEED_COUPLING_OHMS` between the feed and a pixel port and
//! `c = PIXEL_COUPLING_OHMS` between two pixel ports. Self impedances are `50 + j U(-25, 25)` ohms drawn from the
//! seed. Open-circuit patterns are unit-current short-dipole far fields,
//! phased by each port's position.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;

use crate::bundle::AntennaBundle;
use crate::error::{Error, Result};
use crate::grid::AngularGrid;
use crate::linalg::{CMatrix, CVector};
use crate::math;
use crate::network::{MultiportNetwork, DEFAULT_Z_OC};
use crate::rng::stream_rng;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Feed-to-pixel coupling scale in ohms.
pub const FEED_COUPLING_OHMS: f64 = 30.0;

/// Pixel-to-pixel coupling scale in ohms.
pub const PIXEL_COUPLING_OHMS: f64 = 0.15;

const SELF_RESISTANCE: f64 = 50.0;
const SELF_REACTANCE_SPREAD: f64 = 25.0;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Port {
    position: [f64; 3],
    orientation: [f64; 3],
}

/// Number of pixel ports of a `rows x cols` grid.
pub fn pixel_port_count(rows: usize, cols: usize) -> usize {
    if rows == 0 || cols == 0 {
        return 0;
    }
    rows * (cols - 1) + (rows - 1) * cols
}

fn layout(rows: usize, cols: usize, spacing: f64) -> (Port, Vec<Port>) {
    let x0 = (cols as f64 - 1.0) * spacing / 2.0;
    let y0 = (rows as f64 - 1.0) * spacing / 2.0;
    let node = |r: usize, c: usize| [c as f64 * spacing - x0, r as f64 * spacing - y0, 0.0];
    let mut ports = Vec::with_capacity(pixel_port_count(rows, cols));
    for r in 0..rows {
        for c in 0..cols.saturating_sub(1) {
            let a = node(r, c);
            ports.push(Port {
                position: [a[0] + spacing / 2.0, a[1], 0.0],
                orientation: [1.0, 0.0, 0.0],
            });
        }
    }
    for r in 0..rows.saturating_sub(1) {
        for c in 0..cols {
            let a = node(r, c);
            ports.push(Port {
                position: [a[0], a[1] + spacing / 2.0, 0.0],
                orientation: [0.0, 1.0, 0.0],
            });
        }
    }
    let centre = node(rows / 2, cols / 2);
    let feed = Port {
        position: [centre[0], centre[1], -spacing / 2.0],
        orientation: [0.0, 0.0, 1.0],
    };
    (feed, ports)
}

fn distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    math::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2])
}

fn mutual_impedance(scale: f64, k: f64, d: f64) -> Complex64 {
    let kd = k * d;
    Complex64::from_polar(scale / kd, -kd)
}

fn dipole_pattern(port: &Port, k: f64, grid: &AngularGrid) -> CVector {
    let n = grid.len();
    let mut e = CVector::zeros(2 * n);
    let u = port.orientation;
    for (idx, (t, p)) in grid.directions().enumerate() {
        let (t, p) = (t.to_radians(), p.to_radians());
        let (st, ct, sp, cp) = (math::sin(t), math::cos(t), math::sin(p), math::cos(p));
        let r_hat = [st * cp, st * sp, ct];
        let theta_hat = [ct * cp, ct * sp, -st];
        let phi_hat = [-sp, cp, 0.0];
        let dot = |a: &[f64; 3], b: &[f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        let phase = Complex64::from_polar(1.0, k * dot(&r_hat, &port.position));
        e[idx] = phase * dot(&theta_hat, &u);
        e[n + idx] = phase * dot(&phi_hat, &u);
    }
    e
}

/// Synthesizes a `rows x cols` pixel antenna at `frequency_hz` with node
/// pitch `spacing_m`, sampled on `grid`. `z_oc` is [`DEFAULT_Z_OC`].
pub fn synthesize_dipole_grid(
    rows: usize,
    cols: usize,
    spacing_m: f64,
    frequency_hz: f64,
    grid: &AngularGrid,
    seed: u64,
) -> Result<AntennaBundle> {
    if rows * cols < 2 {
        return Err(Error::InvalidGeometry(format!(
            "grid {rows}x{cols} has fewer than 2 pixels"
        )));
    }
    if !(spacing_m > 0.0) || !spacing_m.is_finite() {
        return Err(Error::InvalidGeometry(format!(
            "spacing must be positive, got {spacing_m}"
        )));
    }
    if !(frequency_hz > 0.0) || !frequency_hz.is_finite() {
        return Err(Error::InvalidGeometry(format!(
            "frequency must be positive, got {frequency_hz}"
        )));
    }
    let k = 2.0 * core::f64::consts::PI * frequency_hz / SPEED_OF_LIGHT;
    let (feed, ports) = layout(rows, cols, spacing_m);
    let q = ports.len();

    let mut rng = stream_rng(seed, 0);
    let mut self_z = || {
        let x: f64 = rng.random_range(-SELF_REACTANCE_SPREAD..SELF_REACTANCE_SPREAD);
        Complex64::new(SELF_RESISTANCE, x)
    };
    let z_aa = self_z();
    let mut z_pp = CMatrix::zeros(q, q);
    for i in 0..q {
        z_pp[(i, i)] = self_z();
    }
    for i in 0..q {
        for j in i + 1..q {
            let z = mutual_impedance(PIXEL_COUPLING_OHMS, k, distance(&ports[i].position, &ports[j].position));
            z_pp[(i, j)] = z;
            z_pp[(j, i)] = z;
        }
    }
    let z_pa = CVector::from_iterator(
        q,
        ports
            .iter()
            .map(|p| mutual_impedance(FEED_COUPLING_OHMS, k, distance(&feed.position, &p.position))),
    );
    let network = MultiportNetwork::new(z_aa, z_pa, z_pp)?;

    let e_a = dipole_pattern(&feed, k, grid);
    let mut e_p = CMatrix::zeros(2 * grid.len(), q);
    for (i, port) in ports.iter().enumerate() {
        e_p.set_column(i, &dipole_pattern(port, k, grid));
    }
    AntennaBundle::new(network, grid.clone(), frequency_hz, e_a, e_p, DEFAULT_Z_OC)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn port_counts() {
        assert_eq!(pixel_port_count(5, 5), 40);
        assert_eq!(pixel_port_count(1, 2), 1);
        assert_eq!(pixel_port_count(1, 7), 6);
        assert_eq!(pixel_port_count(2, 4), 10);
    }

    #[test]
    fn five_by_five_has_forty_ports_and_is_reciprocal() {
        let grid = AngularGrid::uniform(30.0).unwrap();
        let b = synthesize_dipole_grid(5, 5, 0.011, 2.4e9, &grid, 7).unwrap();
        assert_eq!(b.q(), 40);
        let z = b.network().impedance_matrix();
        assert_eq!(z.transpose(), z);
        for i in 0..=40 {
            assert!(z[(i, i)].re > 0.0);
        }
    }

    #[test]
    fn smallest_grid() {
        let grid = AngularGrid::uniform(45.0).unwrap();
        let b = synthesize_dipole_grid(1, 2, 0.011, 2.4e9, &grid, 1).unwrap();
        assert_eq!(b.q(), 1);
        assert_eq!(b.network().impedance_matrix().nrows(), 2);
    }

    #[test]
    fn deterministic_for_seed() {
        let grid = AngularGrid::uniform(30.0).unwrap();
        let a = synthesize_dipole_grid(3, 3, 0.011, 2.4e9, &grid, 11).unwrap();
        let b = synthesize_dipole_grid(3, 3, 0.011, 2.4e9, &grid, 11).unwrap();
        let c = synthesize_dipole_grid(3, 3, 0.011, 2.4e9, &grid, 12).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn invalid_geometry() {
        let grid = AngularGrid::uniform(45.0).unwrap();
        assert!(matches!(
            synthesize_dipole_grid(1, 1, 0.011, 2.4e9, &grid, 0),
            Err(Error::InvalidGeometry(_))
        ));
        assert!(matches!(
            synthesize_dipole_grid(2, 2, 0.0, 2.4e9, &grid, 0),
            Err(Error::InvalidGeometry(_))
        ));
        assert!(matches!(
            synthesize_dipole_grid(2, 2, -1.0, 2.4e9, &grid, 0),
            Err(Error::InvalidGeometry(_))
        ));
    }
}
