//! Beamspace channels and the coded MIMO channel `H = H_BS W(B)`.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::AngularGrid;
use crate::linalg::{CMatrix, CVector, ONE, ZERO};
use crate::pattern::PatternCoder;
use crate::rng::{complex_normal, stream_rng, SimRng};

/// Angle-domain channel `H_V` between `2K` departure and `2K` arrival
/// samples, in θ/φ polarization blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct VirtualChannel {
    pub h_v: CMatrix,
}

impl VirtualChannel {
    pub fn dim(&self) -> usize {
        self.h_v.nrows()
    }
}

/// `H_BS = F^T H_V U_BS`, an `m x (n r)` matrix whose column block `j`
/// belongs to transmit antenna `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamspaceChannel {
    h_bs: CMatrix,
    m: usize,
    n: usize,
    r: usize,
}

impl BeamspaceChannel {
    pub fn new(h_bs: CMatrix, n: usize) -> Result<Self> {
        if n == 0 || !h_bs.ncols().is_multiple_of(n) || h_bs.ncols() == 0 || h_bs.nrows() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "a {}x{} beamspace channel cannot be split into {n} antenna blocks",
                h_bs.nrows(),
                h_bs.ncols()
            )));
        }
        let (m, r) = (h_bs.nrows(), h_bs.ncols() / n);
        Ok(Self { h_bs, m, n, r })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.h_bs
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// `m x r` block seen by transmit antenna `antenna`.
    pub fn block(&self, antenna: usize) -> nalgebra::DMatrixView<'_, Complex64> {
        self.h_bs.columns(antenna * self.r, self.r)
    }
}

/// `W(B)`: one pattern coder per transmit antenna on the block diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct CoderBlockMatrix {
    blocks: Vec<CVector>,
}

impl CoderBlockMatrix {
    pub fn new(blocks: Vec<CVector>) -> Result<Self> {
        let r = blocks.first().map(|b| b.len()).unwrap_or(0);
        if r == 0 || blocks.iter().any(|b| b.len() != r) {
            return Err(Error::DimensionMismatch(
                "coder blocks must be nonempty and share one length".into(),
            ));
        }
        Ok(Self { blocks })
    }

    pub fn from_coders(coders: &[&PatternCoder]) -> Result<Self> {
        Self::new(coders.iter().map(|c| c.w.clone()).collect())
    }

    pub fn n(&self) -> usize {
        self.blocks.len()
    }

    pub fn r(&self) -> usize {
        self.blocks[0].len()
    }

    pub fn blocks(&self) -> &[CVector] {
        &self.blocks
    }

    /// Dense `(n r) x n` form.
    pub fn to_matrix(&self) -> CMatrix {
        let (n, r) = (self.n(), self.r());
        let mut w = CMatrix::zeros(n * r, n);
        for (j, b) in self.blocks.iter().enumerate() {
            w.view_mut((j * r, j), (r, 1)).copy_from(b);
        }
        w
    }
}

/// Draws `H_V` with i.i.d. CN(0, 1) entries for a `grid` of K directions.
pub fn sample_virtual_channel(grid: &AngularGrid, seed: u64) -> VirtualChannel {
    let dim = 2 * grid.len();
    let mut rng = stream_rng(seed, 0);
    VirtualChannel {
        h_v: fill_normal(dim, dim, &mut rng),
    }
}

fn fill_normal(rows: usize, cols: usize, rng: &mut SimRng) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// `F^T H_V U_BS` for receive patterns `f` (`2K x m`) and transmit basis
/// patterns `u_bs` (`2K x (n r)`). Columns of `f` and `u_bs` are expected
/// to have unit norm.
pub fn beamspace_channel(f: &CMatrix, h_v: &VirtualChannel, u_bs: &CMatrix, n: usize) -> Result<BeamspaceChannel> {
    let dim = h_v.dim();
    if f.nrows() != dim || u_bs.nrows() != dim {
        return Err(Error::DimensionMismatch(format!(
            "receive patterns have {} rows and transmit bases {} rows, virtual channel is {dim}x{dim}",
            f.nrows(),
            u_bs.nrows()
        )));
    }
    let left = f.transpose() * &h_v.h_v;
    BeamspaceChannel::new(left * u_bs, n)
}

/// One `m x (n r)` i.i.d. Rayleigh beamspace draw from stream `(seed, trial)`.
pub fn iid_beamspace_draw(m: usize, n: usize, r: usize, seed: u64, trial: u64) -> BeamspaceChannel {
    let mut rng = stream_rng(seed, trial);
    iid_beamspace_from(m, n, r, &mut rng)
}

pub(crate) fn iid_beamspace_from(m: usize, n: usize, r: usize, rng: &mut SimRng) -> BeamspaceChannel {
    let h = fill_normal(m, n * r, rng);
    BeamspaceChannel { h_bs: h, m, n, r }
}

/// `trials` independent draws; draw `t` uses stream `(seed, t)`.
pub fn iid_beamspace_ensemble(m: usize, n: usize, r: usize, trials: usize, seed: u64) -> Result<Vec<BeamspaceChannel>> {
    if trials == 0 {
        return Err(Error::InsufficientTrials { trials, minimum: 1 });
    }
    if m == 0 || n == 0 || r == 0 {
        return Err(Error::DimensionMismatch(format!(
            "m={m}, n={n}, r={r} must all be positive"
        )));
    }
    Ok((0..trials as u64)
        .map(|t| iid_beamspace_draw(m, n, r, seed, t))
        .collect())
}

/// `H_BS W(B)`, computed block by block.
pub fn effective_channel(h_bs: &BeamspaceChannel, w: &CoderBlockMatrix) -> Result<CMatrix> {
    if w.n() != h_bs.n || w.r() != h_bs.r {
        return Err(Error::DimensionMismatch(format!(
            "coder blocks are {}x{} but the channel has n={} antennas with r={}",
            w.n(),
            w.r(),
            h_bs.n,
            h_bs.r
        )));
    }
    let mut h = CMatrix::zeros(h_bs.m, h_bs.n);
    for (j, b) in w.blocks.iter().enumerate() {
        h.set_column(j, &(h_bs.block(j) * b));
    }
    Ok(h)
}

/// `count` standard-basis columns of length `dim`: receive patterns that
/// each pick one distinct beamspace sample.
pub fn selector_patterns(dim: usize, count: usize) -> Result<CMatrix> {
    if count > dim {
        return Err(Error::DimensionMismatch(format!(
            "cannot select {count} orthonormal columns out of {dim}"
        )));
    }
    let mut f = CMatrix::from_element(dim, count, ZERO);
    for c in 0..count {
        f[(c, c)] = ONE;
    }
    Ok(f)
}

/// Source of per-trial beamspace channels.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelEnsemble {
    /// `H_BS` drawn directly with i.i.d. CN(0, 1) entries.
    Iid { m: usize, n: usize, r: usize },
    /// `F^T H_V U_BS` with a fresh `H_V` per trial.
    Virtual { f: CMatrix, u_bs: CMatrix, n: usize },
}

impl ChannelEnsemble {
    pub fn iid(m: usize, n: usize, r: usize) -> Result<Self> {
        if m == 0 || n == 0 || r == 0 {
            return Err(Error::DimensionMismatch(format!(
                "m={m}, n={n}, r={r} must all be positive"
            )));
        }
        Ok(ChannelEnsemble::Iid { m, n, r })
    }

    pub fn virtual_path(f: CMatrix, u_bs: CMatrix, n: usize) -> Result<Self> {
        if f.nrows() != u_bs.nrows() || f.ncols() == 0 || n == 0 || u_bs.ncols() == 0 || !u_bs.ncols().is_multiple_of(n)
        {
            return Err(Error::DimensionMismatch(format!(
                "receive patterns {}x{} and transmit bases {}x{} do not fit {n} antennas",
                f.nrows(),
                f.ncols(),
                u_bs.nrows(),
                u_bs.ncols()
            )));
        }
        Ok(ChannelEnsemble::Virtual { f, u_bs, n })
    }

    pub fn m(&self) -> usize {
        match self {
            ChannelEnsemble::Iid { m, .. } => *m,
            ChannelEnsemble::Virtual { f, .. } => f.ncols(),
        }
    }

    pub fn n(&self) -> usize {
        match self {
            ChannelEnsemble::Iid { n, .. } | ChannelEnsemble::Virtual { n, .. } => *n,
        }
    }

    pub fn r(&self) -> usize {
        match self {
            ChannelEnsemble::Iid { r, .. } => *r,
            ChannelEnsemble::Virtual { u_bs, n, .. } => u_bs.ncols() / n,
        }
    }

    /// Draws one channel, consuming `rng`.
    pub fn draw(&self, rng: &mut SimRng) -> BeamspaceChannel {
        match self {
            ChannelEnsemble::Iid { m, n, r } => iid_beamspace_from(*m, *n, *r, rng),
            ChannelEnsemble::Virtual { f, u_bs, n } => {
                let dim = f.nrows();
                let h_v = fill_normal(dim, dim, rng);
                let h = f.transpose() * h_v * u_bs;
                BeamspaceChannel {
                    m: h.nrows(),
                    r: h.ncols() / n,
                    n: *n,
                    h_bs: h,
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::PatternCoder;

    #[test]
    fn virtual_channel_shape_and_determinism() {
        let grid = AngularGrid::new(alloc::vec![90.0], alloc::vec![0.0]).unwrap();
        let a = sample_virtual_channel(&grid, 3);
        assert_eq!(a.h_v.shape(), (2, 2));
        assert_eq!(a, sample_virtual_channel(&grid, 3));
        assert_ne!(a, sample_virtual_channel(&grid, 4));
    }

    #[test]
    fn selector_columns_pick_one_entry() {
        let grid = AngularGrid::uniform(60.0).unwrap();
        let h_v = sample_virtual_channel(&grid, 1);
        let dim = h_v.dim();
        let mut f = CMatrix::zeros(dim, 1);
        f[(2, 0)] = ONE;
        let mut u = CMatrix::zeros(dim, 1);
        u[(5, 0)] = ONE;
        let h = beamspace_channel(&f, &h_v, &u, 1).unwrap();
        assert_eq!(h.matrix().shape(), (1, 1));
        assert_eq!(h.matrix()[(0, 0)], h_v.h_v[(2, 5)]);
    }

    #[test]
    fn zero_virtual_channel_gives_zero() {
        let h_v = VirtualChannel {
            h_v: CMatrix::zeros(6, 6),
        };
        let f = selector_patterns(6, 2).unwrap();
        let u = selector_patterns(6, 4).unwrap();
        let h = beamspace_channel(&f, &h_v, &u, 2).unwrap();
        assert!(h.matrix().iter().all(|v| *v == ZERO));
        assert_eq!((h.m(), h.n(), h.r()), (2, 2, 2));
    }

    #[test]
    fn beamspace_rejects_bad_shapes() {
        let h_v = VirtualChannel {
            h_v: CMatrix::zeros(6, 6),
        };
        let f = selector_patterns(4, 2).unwrap();
        let u = selector_patterns(6, 4).unwrap();
        assert!(matches!(
            beamspace_channel(&f, &h_v, &u, 2),
            Err(Error::DimensionMismatch(_))
        ));
        let f = selector_patterns(6, 2).unwrap();
        assert!(matches!(
            beamspace_channel(&f, &h_v, &u, 3),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn unit_blocks_reproduce_channel() {
        let h = iid_beamspace_draw(3, 2, 1, 9, 0);
        let w = CoderBlockMatrix::new(alloc::vec![CVector::from_element(1, ONE); 2]).unwrap();
        assert_eq!(effective_channel(&h, &w).unwrap(), *h.matrix());
    }

    #[test]
    fn selector_blocks_select_columns() {
        let h = iid_beamspace_draw(2, 3, 4, 5, 1);
        let picks = [2usize, 0, 3];
        let coders: Vec<PatternCoder> = picks.iter().map(|&p| PatternCoder::selector(p, 4)).collect();
        let refs: Vec<&PatternCoder> = coders.iter().collect();
        let w = CoderBlockMatrix::from_coders(&refs).unwrap();
        let e = effective_channel(&h, &w).unwrap();
        for (j, &p) in picks.iter().enumerate() {
            assert_eq!(e.column(j), h.matrix().column(j * 4 + p));
        }
    }

    #[test]
    fn blockwise_product_matches_dense() {
        let h = iid_beamspace_draw(4, 3, 5, 2, 7);
        let mut rng = stream_rng(11, 0);
        let blocks = (0..3)
            .map(|_| CVector::from_fn(5, |_, _| complex_normal(&mut rng)))
            .collect();
        let w = CoderBlockMatrix::new(blocks).unwrap();
        let dense = w.to_matrix();
        for (j, b) in w.blocks().iter().enumerate() {
            for i in 0..15 {
                let inside = i / 5 == j;
                assert_eq!(dense[(i, j)], if inside { b[i % 5] } else { ZERO });
            }
        }
        let direct = h.matrix() * dense;
        let e = effective_channel(&h, &w).unwrap();
        assert!((e - &direct).norm() <= 1e-12 * direct.norm());
    }

    #[test]
    fn effective_channel_checks_dimensions() {
        let h = iid_beamspace_draw(2, 2, 3, 0, 0);
        let w = CoderBlockMatrix::new(alloc::vec![CVector::zeros(2); 2]).unwrap();
        assert!(effective_channel(&h, &w).is_err());
    }

    #[test]
    fn iid_draws_have_unit_variance() {
        let draws = iid_beamspace_ensemble(4, 5, 5, 1000, 42).unwrap();
        let (mut sum, mut sq, mut count) = (Complex64::new(0.0, 0.0), 0.0, 0.0);
        for d in &draws {
            for v in d.matrix().iter() {
                sum += v;
                sq += v.norm_sqr();
                count += 1.0;
            }
        }
        assert_eq!(count, 1e5);
        assert!((sum / count).norm() < 0.02);
        assert!((sq / count - 1.0).abs() < 0.02);
    }

    #[test]
    fn ensemble_is_seeded() {
        let a = iid_beamspace_ensemble(2, 2, 2, 3, 8).unwrap();
        let b = iid_beamspace_ensemble(2, 2, 2, 3, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a[0], a[1]);
        assert!(iid_beamspace_ensemble(2, 2, 2, 0, 8).is_err());
    }
}
