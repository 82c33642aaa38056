//! The (Q+1)-port circuit model of a pixel antenna and its switch loads.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, ZERO};

/// Default open-circuit surrogate impedance in ohms.
pub const DEFAULT_Z_OC: f64 = 1e9;

/// Port solves with a larger (row-equilibrated) condition estimate are rejected.
pub const MAX_CONDITION: f64 = 1e12;

/// Reciprocity tolerance relative to the largest impedance entry. Synthesized
/// networks are exactly symmetric; measured data is allowed rounding noise.
pub const RECIPROCITY_TOL: f64 = 1e-9;

/// Impedance matrix of one antenna port plus `q` pixel ports:
///
/// ```text
/// Z = [ z_aa  z_ap ]
///     [ z_pa  Z_pp ]
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct MultiportNetwork {
    z_aa: Complex64,
    z_ap: CVector,
    z_pa: CVector,
    z_pp: CMatrix,
}

impl MultiportNetwork {
    /// Builds a reciprocal network; `z_ap` is taken as `z_pa^T`.
    pub fn new(z_aa: Complex64, z_pa: CVector, z_pp: CMatrix) -> Result<Self> {
        let z_ap = z_pa.clone();
        Self::from_parts(z_aa, z_ap, z_pa, z_pp)
    }

    pub fn from_parts(z_aa: Complex64, z_ap: CVector, z_pa: CVector, z_pp: CMatrix) -> Result<Self> {
        let q = z_pa.len();
        if q == 0 {
            return Err(Error::InvalidNetwork("network needs at least one pixel port".into()));
        }
        if z_ap.len() != q || z_pp.nrows() != q || z_pp.ncols() != q {
            return Err(Error::InvalidNetwork(format!(
                "inconsistent partition: z_ap {}, z_pa {}, z_pp {}x{}",
                z_ap.len(),
                q,
                z_pp.nrows(),
                z_pp.ncols()
            )));
        }
        let finite = |v: &Complex64| v.re.is_finite() && v.im.is_finite();
        if !finite(&z_aa) || !z_ap.iter().all(finite) || !z_pa.iter().all(finite) || !z_pp.iter().all(finite) {
            return Err(Error::InvalidNetwork("impedance entries must be finite".into()));
        }
        let scale = z_pp
            .iter()
            .chain(z_pa.iter())
            .chain(z_ap.iter())
            .map(|v| v.norm())
            .fold(z_aa.norm(), f64::max);
        let tol = RECIPROCITY_TOL * scale;
        for i in 0..q {
            if (z_ap[i] - z_pa[i]).norm() > tol {
                return Err(Error::InvalidNetwork(format!(
                    "reciprocity violated: z_ap[{i}] != z_pa[{i}]"
                )));
            }
            for j in i + 1..q {
                if (z_pp[(i, j)] - z_pp[(j, i)]).norm() > tol {
                    return Err(Error::InvalidNetwork(format!(
                        "reciprocity violated: z_pp[{i},{j}] != z_pp[{j},{i}]"
                    )));
                }
            }
        }
        Ok(Self { z_aa, z_ap, z_pa, z_pp })
    }

    /// Splits a full `(q+1) x (q+1)` impedance matrix, antenna port first.
    pub fn from_impedance_matrix(z: &CMatrix) -> Result<Self> {
        let n = z.nrows();
        if n != z.ncols() || n < 2 {
            return Err(Error::InvalidNetwork(format!(
                "impedance matrix must be square with at least 2 ports, got {}x{}",
                z.nrows(),
                z.ncols()
            )));
        }
        let q = n - 1;
        let z_ap = CVector::from_iterator(q, (1..n).map(|c| z[(0, c)]));
        let z_pa = CVector::from_iterator(q, (1..n).map(|r| z[(r, 0)]));
        let z_pp = z.view((1, 1), (q, q)).into_owned();
        Self::from_parts(z[(0, 0)], z_ap, z_pa, z_pp)
    }

    pub fn impedance_matrix(&self) -> CMatrix {
        let q = self.q();
        let mut z = CMatrix::zeros(q + 1, q + 1);
        z[(0, 0)] = self.z_aa;
        for i in 0..q {
            z[(0, i + 1)] = self.z_ap[i];
            z[(i + 1, 0)] = self.z_pa[i];
        }
        z.view_mut((1, 1), (q, q)).copy_from(&self.z_pp);
        z
    }

    pub fn q(&self) -> usize {
        self.z_pa.len()
    }

    pub fn z_aa(&self) -> Complex64 {
        self.z_aa
    }

    pub fn z_ap(&self) -> &CVector {
        &self.z_ap
    }

    pub fn z_pa(&self) -> &CVector {
        &self.z_pa
    }

    pub fn z_pp(&self) -> &CMatrix {
        &self.z_pp
    }

    /// Largest |entry| of `Z_pp`.
    pub fn max_pixel_impedance(&self) -> f64 {
        self.z_pp.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Copy with the off-diagonal (mutual) entries of `Z_pp` scaled by `alpha`.
    pub fn with_scaled_pixel_coupling(&self, alpha: f64) -> Self {
        let mut z_pp = self.z_pp.clone();
        let q = self.q();
        for i in 0..q {
            for j in 0..q {
                if i != j {
                    z_pp[(i, j)] *= alpha;
                }
            }
        }
        Self { z_pp, ..self.clone() }
    }
}

/// Switch states of the `q` pixel ports: `true` (1) = switch off / open,
/// `false` (0) = switch on / short.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AntennaCoder(Vec<bool>);

impl AntennaCoder {
    pub fn new(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    /// From 0/1 integers; anything else is rejected.
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        bits.iter()
            .enumerate()
            .map(|(i, &b)| match b {
                0 => Ok(false),
                1 => Ok(true),
                other => Err(Error::InvalidCoder(format!("entry {i} is {other}, expected 0 or 1"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }

    /// Parses a string of `0`/`1`, first character = port 1.
    pub fn parse(s: &str) -> Result<Self> {
        let bits: Result<Vec<bool>> = s
            .trim()
            .chars()
            .enumerate()
            .map(|(i, c)| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidCoder(format!("character {i} is {other:?}"))),
            })
            .collect();
        let bits = bits?;
        if bits.is_empty() {
            return Err(Error::InvalidCoder("empty coder string".into()));
        }
        Ok(Self(bits))
    }

    /// Coder number `index` with port 1 as the most significant bit.
    pub fn from_index(index: u64, q: usize) -> Self {
        Self((0..q).map(|i| (index >> (q - 1 - i)) & 1 == 1).collect())
    }

    pub fn all_open(q: usize) -> Self {
        Self(alloc::vec![true; q])
    }

    pub fn all_shorted(q: usize) -> Self {
        Self(alloc::vec![false; q])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn get(&self, port: usize) -> bool {
        self.0[port]
    }

    pub fn set(&mut self, port: usize, open: bool) {
        self.0[port] = open;
    }

    pub fn to_bit_string(&self) -> String {
        self.0.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

impl fmt::Debug for AntennaCoder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AntennaCoder({})", self.to_bit_string())
    }
}

impl fmt::Display for AntennaCoder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bit_string())
    }
}

/// Currents at the antenna port and the pixel ports.
#[derive(Debug, Clone, PartialEq)]
pub struct PortCurrents {
    pub i_a: Complex64,
    pub i_p: CVector,
}

impl PortCurrents {
    /// `[i_a; i_p]`, length `q + 1`.
    pub fn stacked(&self) -> CVector {
        let q = self.i_p.len();
        CVector::from_iterator(q + 1, core::iter::once(self.i_a).chain(self.i_p.iter().copied()))
    }
}

/// `Z_L(b) = z_oc * diag(b)`.
pub fn load_matrix(coder: &AntennaCoder, z_oc: f64) -> CMatrix {
    let q = coder.len();
    let mut zl = CMatrix::zeros(q, q);
    for (i, &open) in coder.bits().iter().enumerate() {
        if open {
            zl[(i, i)] = Complex64::new(z_oc, 0.0);
        }
    }
    zl
}

/// Pixel-port currents for feed current `i_a`:
/// `i_p = -(Z_pp + Z_L(b))^{-1} z_pa i_a`.
pub fn port_currents(
    network: &MultiportNetwork,
    coder: &AntennaCoder,
    z_oc: f64,
    i_a: Complex64,
) -> Result<PortCurrents> {
    let q = network.q();
    if coder.len() != q {
        return Err(Error::DimensionMismatch(format!(
            "coder has {} bits, network has {q} pixel ports",
            coder.len()
        )));
    }
    if !(z_oc > 0.0) {
        return Err(Error::InvalidParameter(format!("z_oc must be positive, got {z_oc}")));
    }
    let mut a = network.z_pp.clone();
    for (i, &open) in coder.bits().iter().enumerate() {
        if open {
            a[(i, i)] += Complex64::new(z_oc, 0.0);
        }
    }
    let rhs = network.z_pa.map(|v| -v * i_a);
    let i_p = if i_a == ZERO {
        CVector::zeros(q)
    } else {
        linalg::solve_checked(&a, &rhs, MAX_CONDITION)?
    };
    Ok(PortCurrents { i_a, i_p })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn load_matrix_examples() {
        let zl = load_matrix(&AntennaCoder::from_bits(&[1, 0, 1]).unwrap(), 1e9);
        assert_eq!(zl[(0, 0)], c(1e9));
        assert_eq!(zl[(1, 1)], c(0.0));
        assert_eq!(zl[(2, 2)], c(1e9));
        assert_eq!(zl[(0, 1)], c(0.0));
        assert_eq!(load_matrix(&AntennaCoder::all_shorted(40), 1e9), CMatrix::zeros(40, 40));
        assert_eq!(
            load_matrix(&AntennaCoder::all_open(40), 1e9),
            CMatrix::identity(40, 40) * c(1e9)
        );
    }

    #[test]
    fn scalar_port_current() {
        let net = MultiportNetwork::new(
            c(50.0),
            CVector::from_vec(vec![c(10.0)]),
            CMatrix::from_element(1, 1, c(50.0)),
        )
        .unwrap();
        let cur = port_currents(&net, &AntennaCoder::from_bits(&[0]).unwrap(), 1e9, c(1.0)).unwrap();
        assert!((cur.i_p[0] - c(-0.2)).norm() < 1e-15);
        assert_eq!(cur.i_a, c(1.0));
    }

    #[test]
    fn coder_rejects_non_binary() {
        assert!(AntennaCoder::from_bits(&[0, 2]).is_err());
        assert!(AntennaCoder::parse("01x").is_err());
        assert_eq!(AntennaCoder::parse("0110").unwrap().to_bit_string(), "0110");
        assert_eq!(AntennaCoder::from_index(0b100, 3).to_bit_string(), "100");
    }

    #[test]
    fn nonreciprocal_network_is_rejected() {
        let err = MultiportNetwork::from_parts(
            c(50.0),
            CVector::from_vec(vec![c(1.0)]),
            CVector::from_vec(vec![c(2.0)]),
            CMatrix::from_element(1, 1, c(50.0)),
        )
        .unwrap_err();
        assert!(format!("{err}").contains("reciprocity"));
    }

    #[test]
    fn full_matrix_round_trip() {
        let z = CMatrix::from_fn(3, 3, |r, c| Complex64::new((r + c) as f64 + 1.0, (r * c) as f64));
        let net = MultiportNetwork::from_impedance_matrix(&z).unwrap();
        assert_eq!(net.q(), 2);
        assert_eq!(net.impedance_matrix(), z);
    }

    #[test]
    fn singular_load_system_is_reported() {
        // Z_pp + Z_L singular for the all-short coder
        let z_pp = CMatrix::from_row_slice(2, 2, &[c(1.0), c(1.0), c(1.0), c(1.0)]);
        let net = MultiportNetwork::new(c(50.0), CVector::from_vec(vec![c(1.0), c(1.0)]), z_pp).unwrap();
        let err = port_currents(&net, &AntennaCoder::all_shorted(2), 1e9, c(1.0)).unwrap_err();
        assert!(matches!(err, Error::SingularSystem { .. }));
    }
}
