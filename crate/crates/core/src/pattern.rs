//! Coded radiation patterns and their orthonormal beamspace basis.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::bundle::AntennaBundle;
use crate::error::{Error, Result};
use crate::grid::{AngularGrid, SphereWeighting};
use crate::linalg::{CMatrix, CVector, ONE};
use crate::math;
use crate::network::{port_currents, AntennaCoder, PortCurrents};

/// Singular values below `RANK_CUTOFF * sigma_1` are treated as zero.
pub const RANK_CUTOFF: f64 = 1e-12;

/// A far-field pattern: θ block then φ block, 2K samples.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiationPattern {
    pub values: CVector,
    pub grid: AngularGrid,
}

impl RadiationPattern {
    pub fn new(values: CVector, grid: AngularGrid) -> Result<Self> {
        if values.len() != 2 * grid.len() {
            return Err(Error::DimensionMismatch(format!(
                "pattern has {} samples, grid needs {}",
                values.len(),
                2 * grid.len()
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidParameter("pattern samples must be finite".into()));
        }
        Ok(Self { values, grid })
    }

    pub fn norm(&self) -> f64 {
        self.values.norm()
    }

    /// Unit ℓ2-norm copy, as required at the channel boundary.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if !(n > 0.0) {
            return Err(Error::ZeroPattern {
                coder: "<pattern>".into(),
            });
        }
        Ok(Self {
            values: self.values.unscale(n),
            grid: self.grid.clone(),
        })
    }

    pub fn theta(&self) -> nalgebra::DVectorView<'_, Complex64> {
        self.values.rows(0, self.grid.len())
    }

    pub fn phi(&self) -> nalgebra::DVectorView<'_, Complex64> {
        self.values.rows(self.grid.len(), self.grid.len())
    }
}

/// Thin SVD `E_oc = U diag(sigma) V^H`, truncated at numerical rank.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisDecomposition {
    pub u: CMatrix,
    pub sigma: Vec<f64>,
    pub v: CMatrix,
    pub r_full: usize,
    pub weighting: SphereWeighting,
    // diag(sigma) V^H, cached for pattern coders
    coder_map: CMatrix,
}

/// Coefficients of a realized pattern on the basis patterns (columns of U).
#[derive(Debug, Clone, PartialEq)]
pub struct PatternCoder {
    pub w: CVector,
}

impl PatternCoder {
    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn normalized(&self) -> Option<CVector> {
        let n = self.w.norm();
        (n > 0.0).then(|| self.w.unscale(n))
    }

    /// Standard basis vector `e_index` of length `r`; selects one basis pattern.
    pub fn selector(index: usize, r: usize) -> Self {
        let mut w = CVector::zeros(r);
        w[index] = ONE;
        Self { w }
    }
}

/// Pattern for coder `b` with unit feed current: `e_a + E_p i_p(b)`.
pub fn radiation_pattern(bundle: &AntennaBundle, coder: &AntennaCoder) -> Result<RadiationPattern> {
    let currents = port_currents(bundle.network(), coder, bundle.z_oc(), ONE)?;
    Ok(pattern_from_currents(bundle, &currents))
}

pub fn pattern_from_currents(bundle: &AntennaBundle, currents: &PortCurrents) -> RadiationPattern {
    let values = bundle.e_a() * currents.i_a + bundle.e_p() * &currents.i_p;
    RadiationPattern {
        values,
        grid: bundle.grid().clone(),
    }
}

pub fn decompose(bundle: &AntennaBundle) -> Result<BasisDecomposition> {
    decompose_weighted(bundle, SphereWeighting::Unweighted)
}

/// SVD of `E_oc` under the chosen sphere inner product. With
/// [`SphereWeighting::SinTheta`] the rows are scaled by `sqrt(w_k)` first,
/// so `U` lives in weighted coordinates.
pub fn decompose_weighted(bundle: &AntennaBundle, weighting: SphereWeighting) -> Result<BasisDecomposition> {
    let mut e = bundle.e_oc();
    if weighting != SphereWeighting::Unweighted {
        let w = bundle.grid().weights(weighting);
        let k = w.len();
        for (row, &wk) in w.iter().chain(w.iter()).enumerate() {
            let s = math::sqrt(wk);
            e.row_mut(row).scale_mut(s);
        }
        debug_assert_eq!(e.nrows(), 2 * k);
    }
    decompose_matrix(&e, weighting)
}

pub fn decompose_matrix(e_oc: &CMatrix, weighting: SphereWeighting) -> Result<BasisDecomposition> {
    if e_oc.iter().all(|v| *v == Complex64::new(0.0, 0.0)) {
        return Err(Error::DegenerateMatrix);
    }
    let svd = e_oc.clone().svd(true, true);
    let u_all = svd.u.ok_or(Error::DegenerateMatrix)?;
    let vt_all = svd.v_t.ok_or(Error::DegenerateMatrix)?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .partial_cmp(&svd.singular_values[a])
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    let sigma_1 = svd.singular_values[order[0]];
    let kept: Vec<usize> = order
        .into_iter()
        .filter(|&i| svd.singular_values[i] > RANK_CUTOFF * sigma_1)
        .collect();
    let r = kept.len();
    let mut u = CMatrix::zeros(e_oc.nrows(), r);
    let mut v = CMatrix::zeros(e_oc.ncols(), r);
    let mut sigma = Vec::with_capacity(r);
    for (j, &i) in kept.iter().enumerate() {
        u.set_column(j, &u_all.column(i));
        v.set_column(j, &vt_all.row(i).adjoint());
        sigma.push(svd.singular_values[i]);
    }
    let mut coder_map = v.adjoint();
    for (j, &s) in sigma.iter().enumerate() {
        coder_map.row_mut(j).scale_mut(s);
    }
    Ok(BasisDecomposition {
        u,
        sigma,
        v,
        r_full: r,
        weighting,
        coder_map,
    })
}

impl BasisDecomposition {
    /// `diag(sigma) V^H`, r_full x (q+1).
    pub fn coder_map(&self) -> &CMatrix {
        &self.coder_map
    }

    pub fn reconstruct(&self) -> CMatrix {
        let mut us = self.u.clone();
        for (j, &s) in self.sigma.iter().enumerate() {
            us.column_mut(j).scale_mut(s);
        }
        us * self.v.adjoint()
    }

    /// `U w`.
    pub fn synthesize(&self, coder: &PatternCoder) -> CVector {
        &self.u * &coder.w
    }
}

/// `w = diag(sigma) V^H [i_a; i_p]`.
pub fn pattern_coder(decomp: &BasisDecomposition, currents: &PortCurrents) -> Result<PatternCoder> {
    let i = currents.stacked();
    if i.len() != decomp.v.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "currents have {} ports, decomposition expects {}",
            i.len(),
            decomp.v.nrows()
        )));
    }
    Ok(PatternCoder {
        w: decomp.coder_map() * i,
    })
}

/// Zeroth-order perturbation estimate of the coded pattern:
/// `e_a - E_p diag(z_pa) diag(Z_pp)^{-1} (u - b)`. Only shorted ports
/// contribute; no q x q system is solved.
pub fn approx_pattern(bundle: &AntennaBundle, coder: &AntennaCoder) -> Result<RadiationPattern> {
    let net = bundle.network();
    let q = net.q();
    if coder.len() != q {
        return Err(Error::DimensionMismatch(format!(
            "coder has {} bits, antenna has {q} pixel ports",
            coder.len()
        )));
    }
    let mut weights = CVector::zeros(q);
    for i in 0..q {
        let zii = net.z_pp()[(i, i)];
        if zii.norm() == 0.0 {
            return Err(Error::ZeroSelfImpedance { port: i });
        }
        if !coder.get(i) {
            weights[i] = net.z_pa()[i] / zii;
        }
    }
    let values = bundle.e_a() - bundle.e_p() * weights;
    Ok(RadiationPattern {
        values,
        grid: bundle.grid().clone(),
    })
}

/// `F_i = sum_{j<=i} sigma_j^2 / sum_j sigma_j^2`.
pub fn cumulative_power(decomp: &BasisDecomposition) -> Vec<f64> {
    let mut acc = 0.0;
    let partial: Vec<f64> = decomp
        .sigma
        .iter()
        .map(|s| {
            acc += s * s;
            acc
        })
        .collect();
    let total = acc;
    partial.into_iter().map(|p| p / total).collect()
}

/// Smallest count `R` with `F_R >= threshold`.
///
/// Evaluated as "power outside the first R modes <= (1 - T) * total" so that
/// `T = 1` yields `r_full` even when trailing modes are below rounding.
pub fn eadof(decomp: &BasisDecomposition, threshold: f64) -> Result<usize> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "threshold must lie in (0, 1], got {threshold}"
        )));
    }
    let powers: Vec<f64> = decomp.sigma.iter().map(|s| s * s).collect();
    let total: f64 = powers.iter().sum();
    let allowed = (1.0 - threshold) * total;
    // tail[i] = power in modes i+1.. (0-based), accumulated from the end
    let mut tail = alloc::vec![0.0; powers.len()];
    for i in (0..powers.len().saturating_sub(1)).rev() {
        tail[i] = tail[i + 1] + powers[i + 1];
    }
    Ok(tail.iter().position(|&t| t <= allowed).map_or(powers.len(), |i| i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::synthesize_dipole_grid;
    use alloc::vec;

    fn small_bundle() -> AntennaBundle {
        synthesize_dipole_grid(3, 3, 0.011, 2.4e9, &AngularGrid::uniform(15.0).unwrap(), 3).unwrap()
    }

    fn decomp_from_sigma(sigma: &[f64]) -> BasisDecomposition {
        let n = sigma.len();
        let mut e = CMatrix::zeros(n + 2, n);
        for (i, &s) in sigma.iter().enumerate() {
            e[(i, i)] = Complex64::new(s, 0.0);
        }
        decompose_matrix(&e, SphereWeighting::Unweighted).unwrap()
    }

    #[test]
    fn orthogonal_columns_give_their_norms() {
        let mut e = CMatrix::zeros(6, 3);
        e[(0, 0)] = Complex64::new(0.0, 3.0);
        e[(1, 1)] = Complex64::new(2.0, 0.0);
        e[(2, 2)] = Complex64::new(-0.6, 0.8);
        let d = decompose_matrix(&e, SphereWeighting::Unweighted).unwrap();
        assert_eq!(d.r_full, 3);
        for (s, want) in d.sigma.iter().zip([3.0, 2.0, 1.0]) {
            assert!((s - want).abs() < 1e-14);
        }
    }

    #[test]
    fn rank_one_matrix() {
        let base = CVector::from_fn(8, |i, _| Complex64::new(i as f64, 1.0));
        let mut e = CMatrix::zeros(8, 4);
        for c in 0..4 {
            e.set_column(c, &(&base * Complex64::new(c as f64 + 1.0, -0.5)));
        }
        assert_eq!(decompose_matrix(&e, SphereWeighting::Unweighted).unwrap().r_full, 1);
    }

    #[test]
    fn zero_matrix_is_degenerate() {
        assert_eq!(
            decompose_matrix(&CMatrix::zeros(4, 2), SphereWeighting::Unweighted).unwrap_err(),
            Error::DegenerateMatrix
        );
    }

    #[test]
    fn cumulative_power_examples() {
        let d = decomp_from_sigma(&[0.5f64.sqrt(), 0.3f64.sqrt(), 0.15f64.sqrt(), 0.05f64.sqrt()]);
        let f = cumulative_power(&d);
        for (a, b) in f.iter().zip([0.5, 0.8, 0.95, 1.0]) {
            assert!((a - b).abs() < 1e-12, "{f:?}");
        }
        assert_eq!(*f.last().unwrap(), 1.0);
        assert_eq!(eadof(&d, 0.9).unwrap(), 3);
        assert_eq!(eadof(&d, 1.0).unwrap(), 4);
        assert_eq!(eadof(&d, 0.5).unwrap(), 1);
        assert!(eadof(&d, 0.0).is_err());
        assert!(eadof(&d, 1.5).is_err());
        assert_eq!(cumulative_power(&decomp_from_sigma(&[2.0])), vec![1.0]);
    }

    #[test]
    fn full_threshold_counts_tiny_modes() {
        let d = decomp_from_sigma(&[1.0, 1e-9]);
        assert_eq!(d.r_full, 2);
        assert_eq!(eadof(&d, 1.0).unwrap(), 2);
        assert_eq!(eadof(&d, 0.999_999).unwrap(), 1);
    }

    #[test]
    fn pattern_coder_of_first_right_singular_vector() {
        let b = small_bundle();
        let d = decompose(&b).unwrap();
        let v1 = d.v.column(0).into_owned();
        let currents = PortCurrents {
            i_a: v1[0],
            i_p: v1.rows(1, b.q()).into_owned(),
        };
        let w = pattern_coder(&d, &currents).unwrap();
        assert!((w.w[0].re - d.sigma[0]).abs() < 1e-10 * d.sigma[0]);
        assert!(w.w.rows(1, w.len() - 1).norm() < 1e-10 * d.sigma[0]);
    }

    #[test]
    fn feed_only_currents_select_first_column_of_coder_map() {
        let b = small_bundle();
        let d = decompose(&b).unwrap();
        let currents = PortCurrents {
            i_a: ONE,
            i_p: CVector::zeros(b.q()),
        };
        let w = pattern_coder(&d, &currents).unwrap();
        assert!((&w.w - d.coder_map().column(0)).norm() < 1e-14);
        let wrong = PortCurrents {
            i_a: ONE,
            i_p: CVector::zeros(b.q() + 1),
        };
        assert!(matches!(pattern_coder(&d, &wrong), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn all_open_approx_is_feed_pattern() {
        let b = small_bundle();
        let e = approx_pattern(&b, &AntennaCoder::all_open(b.q())).unwrap();
        assert_eq!(&e.values, b.e_a());
    }

    #[test]
    fn zero_self_impedance_is_rejected() {
        let b = small_bundle();
        let mut z = b.network().impedance_matrix();
        z[(2, 2)] = Complex64::new(0.0, 0.0);
        let net = crate::network::MultiportNetwork::from_impedance_matrix(&z).unwrap();
        let b = b.with_network(net).unwrap();
        assert_eq!(
            approx_pattern(&b, &AntennaCoder::all_shorted(b.q())).unwrap_err(),
            Error::ZeroSelfImpedance { port: 1 }
        );
    }

    #[test]
    fn weighted_basis_is_orthonormal() {
        let b = small_bundle();
        let d = decompose_weighted(&b, SphereWeighting::SinTheta).unwrap();
        let g = d.u.adjoint() * &d.u;
        assert!((g - CMatrix::identity(d.r_full, d.r_full)).norm() < 1e-10);
    }
}
