use alloc::format;

use crate::error::{Error, Result};
use crate::grid::AngularGrid;
use crate::linalg::{CMatrix, CVector};
use crate::network::MultiportNetwork;

/// `z_oc` must exceed the largest |Z_pp| entry by at least this factor.
pub const Z_OC_DOMINANCE: f64 = 1e4;

/// A pixel antenna's circuit model together with its open-circuit
/// radiation patterns sampled on an angular grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AntennaBundle {
    network: MultiportNetwork,
    grid: AngularGrid,
    frequency_hz: f64,
    e_a: CVector,
    e_p: CMatrix,
    z_oc: f64,
}

impl AntennaBundle {
    pub fn new(
        network: MultiportNetwork,
        grid: AngularGrid,
        frequency_hz: f64,
        e_a: CVector,
        e_p: CMatrix,
        z_oc: f64,
    ) -> Result<Self> {
        let two_k = 2 * grid.len();
        if !(frequency_hz > 0.0) || !frequency_hz.is_finite() {
            return Err(Error::InvalidBundle {
                field: "frequency_hz",
                reason: format!("must be positive and finite, got {frequency_hz}"),
            });
        }
        if e_a.len() != two_k {
            return Err(Error::InvalidBundle {
                field: "e_a",
                reason: format!("length {} does not match 2K = {two_k} of the grid", e_a.len()),
            });
        }
        if e_p.nrows() != two_k || e_p.ncols() != network.q() {
            return Err(Error::InvalidBundle {
                field: "e_p",
                reason: format!(
                    "shape {}x{} does not match 2K x q = {two_k}x{}",
                    e_p.nrows(),
                    e_p.ncols(),
                    network.q()
                ),
            });
        }
        let finite = |v: &num_complex::Complex64| v.re.is_finite() && v.im.is_finite();
        if !e_a.iter().all(finite) {
            return Err(Error::InvalidBundle {
                field: "e_a",
                reason: "entries must be finite".into(),
            });
        }
        if !e_p.iter().all(finite) {
            return Err(Error::InvalidBundle {
                field: "e_p",
                reason: "entries must be finite".into(),
            });
        }
        let floor = Z_OC_DOMINANCE * network.max_pixel_impedance();
        if !(z_oc > floor) || !z_oc.is_finite() {
            return Err(Error::InvalidBundle {
                field: "z_oc",
                reason: format!("{z_oc} must exceed {floor:.3e} (1e4 x max |Z_pp|)"),
            });
        }
        Ok(Self {
            network,
            grid,
            frequency_hz,
            e_a,
            e_p,
            z_oc,
        })
    }

    /// Builds from the full impedance matrix and `E_oc = [e_a, E_p]`.
    pub fn from_full(z: &CMatrix, e_oc: &CMatrix, grid: AngularGrid, frequency_hz: f64, z_oc: f64) -> Result<Self> {
        let network = MultiportNetwork::from_impedance_matrix(z)?;
        if e_oc.ncols() != network.q() + 1 {
            return Err(Error::InvalidBundle {
                field: "E_oc",
                reason: format!("has {} columns, expected q + 1 = {}", e_oc.ncols(), network.q() + 1),
            });
        }
        let e_a = e_oc.column(0).into_owned();
        let e_p = e_oc.columns(1, network.q()).into_owned();
        Self::new(network, grid, frequency_hz, e_a, e_p, z_oc)
    }

    pub fn network(&self) -> &MultiportNetwork {
        &self.network
    }

    pub fn grid(&self) -> &AngularGrid {
        &self.grid
    }

    pub fn frequency_hz(&self) -> f64 {
        self.frequency_hz
    }

    pub fn e_a(&self) -> &CVector {
        &self.e_a
    }

    pub fn e_p(&self) -> &CMatrix {
        &self.e_p
    }

    pub fn z_oc(&self) -> f64 {
        self.z_oc
    }

    pub fn q(&self) -> usize {
        self.network.q()
    }

    /// 2K.
    pub fn pattern_len(&self) -> usize {
        self.e_a.len()
    }

    /// `E_oc = [e_a, E_p]`, 2K x (q+1).
    pub fn e_oc(&self) -> CMatrix {
        let q = self.q();
        let mut e = CMatrix::zeros(self.pattern_len(), q + 1);
        e.set_column(0, &self.e_a);
        e.columns_mut(1, q).copy_from(&self.e_p);
        e
    }

    pub fn with_z_oc(&self, z_oc: f64) -> Result<Self> {
        Self::new(
            self.network.clone(),
            self.grid.clone(),
            self.frequency_hz,
            self.e_a.clone(),
            self.e_p.clone(),
            z_oc,
        )
    }

    pub fn with_network(&self, network: MultiportNetwork) -> Result<Self> {
        Self::new(
            network,
            self.grid.clone(),
            self.frequency_hz,
            self.e_a.clone(),
            self.e_p.clone(),
            self.z_oc,
        )
    }

    /// Same antenna with the mutual coupling among pixel ports scaled by `alpha`.
    pub fn with_scaled_pixel_coupling(&self, alpha: f64) -> Result<Self> {
        self.with_network(self.network.with_scaled_pixel_coupling(alpha))
    }
}
