//! Spectral and energy efficiency of antenna-coded MIMO.
//!
//! Total mutual information splits into the conventional MIMO term
//! `log2 det(I + H_BS W S W^H H_BS^H / N0)` (averaged over the coder matrix
//! `B`) and the antenna-coding term `N log2 P - H(B | H_BS, y)`. The second
//! term is estimated by Monte Carlo: per trial a channel, a coder matrix,
//! symbols and noise are drawn, and the exact posterior over all `P^N`
//! coder matrices is evaluated in the log domain.
//!
//! The posterior needs the symbol-averaged likelihood `p(y | B_i)`. With
//! [`InputModel::Gaussian`] it is the closed-form complex Gaussian density.
//! With [`InputModel::Discrete`] (the default) it is the finite average over
//! constellation points, which is the model under which the coding term
//! approaches `N log2 P` at high SNR.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;

use crate::channel::{effective_channel, BeamspaceChannel, ChannelEnsemble, CoderBlockMatrix};
use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::linalg::{cholesky_in_place, cholesky_quad_form, is_hermitian, CMatrix, ZERO};
use crate::math::{self, compensated_sum};
use crate::pattern::PatternCoder;
use crate::rng::{complex_normal, stream_rng};

pub const DEFAULT_PATH_LOSS_DB: f64 = 100.0;
pub const DEFAULT_NOISE_DBM: f64 = -80.0;
pub const DEFAULT_ENUMERATION_LIMIT: u64 = 4096;
pub const DEFAULT_TRIALS: usize = 10_000;
pub const MIN_TRIALS: usize = 100;

/// Likelihood terms more than this many noise powers above the true
/// hypothesis' distance are dropped (they weigh less than `e^-40`).
const NEGLIGIBLE_EXPONENT: f64 = 40.0;

/// Transmit power, path loss and noise power; `snr = p_t / (p_l n0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrSpec {
    pub p_t: f64,
    pub p_l: f64,
    pub n0: f64,
}

impl SnrSpec {
    pub fn new(p_t: f64, p_l: f64, n0: f64) -> Result<Self> {
        for (name, v) in [("p_t", p_t), ("p_l", p_l), ("n0", n0)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self { p_t, p_l, n0 })
    }

    /// Transmit power in dBm with 100 dB path loss and -80 dBm noise.
    pub fn from_transmit_dbm(p_t_dbm: f64) -> Result<Self> {
        Self::new(
            math::dbm_to_watts(p_t_dbm),
            math::db_to_linear(DEFAULT_PATH_LOSS_DB),
            math::dbm_to_watts(DEFAULT_NOISE_DBM),
        )
    }

    /// Inverse of [`SnrSpec::from_transmit_dbm`]: the transmit power giving
    /// `snr_db` under the default path loss and noise.
    pub fn from_snr_db(snr_db: f64) -> Result<Self> {
        Self::from_transmit_dbm(snr_db + DEFAULT_PATH_LOSS_DB + DEFAULT_NOISE_DBM)
    }

    pub fn snr(&self) -> f64 {
        self.p_t / (self.p_l * self.n0)
    }

    pub fn snr_db(&self) -> f64 {
        math::linear_to_db(self.snr())
    }
}

/// Circuit power consumption of the transmitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerModel {
    pub n_rf: usize,
    pub p_rf: f64,
    pub p_bb: f64,
    pub eta: f64,
    pub n_sw: usize,
    pub p_sw: f64,
}

impl PowerModel {
    pub fn new(n_rf: usize, p_rf: f64, p_bb: f64, eta: f64, n_sw: usize, p_sw: f64) -> Result<Self> {
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::InvalidParameter(format!("eta must be in (0, 1], got {eta}")));
        }
        for (name, v) in [("p_rf", p_rf), ("p_bb", p_bb), ("p_sw", p_sw)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be nonnegative, got {v}")));
            }
        }
        Ok(Self {
            n_rf,
            p_rf,
            p_bb,
            eta,
            n_sw,
            p_sw,
        })
    }

    /// 0.4 W per RF chain, 0.4 W baseband, 20 % PA efficiency, 0.02 W per switch.
    pub fn reference(n_rf: usize, n_sw: usize) -> Self {
        Self {
            n_rf,
            p_rf: 0.4,
            p_bb: 0.4,
            eta: 0.2,
            n_sw,
            p_sw: 0.02,
        }
    }

    pub fn with_switches(self, n_sw: usize) -> Self {
        Self { n_sw, ..self }
    }

    pub fn switch_power(&self) -> f64 {
        self.n_rf as f64 * self.n_sw as f64 * self.p_sw
    }

    pub fn total_power(&self, p_t: f64) -> f64 {
        self.n_rf as f64 * self.p_rf + self.p_bb + p_t / self.eta + self.switch_power()
    }
}

/// `se` divided by the total consumed power at transmit power `p_t` watts.
pub fn energy_efficiency(se: f64, model: &PowerModel, p_t: f64) -> f64 {
    se / model.total_power(p_t)
}

/// `N log2 P`, the high-SNR ceiling of the coding term.
pub fn high_snr_bound(n: usize, p: usize) -> f64 {
    n as f64 * math::log2(p as f64)
}

/// Monte-Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiEstimate {
    pub value: f64,
    pub std_error: f64,
    pub trials: usize,
}

impl MiEstimate {
    pub fn from_samples(samples: &[f64]) -> Self {
        let t = samples.len();
        if t == 0 {
            return Self {
                value: 0.0,
                std_error: 0.0,
                trials: 0,
            };
        }
        let mean = compensated_sum(samples.iter().copied()) / t as f64;
        let std_error = if t > 1 {
            let var = compensated_sum(samples.iter().map(|x| (x - mean) * (x - mean))) / (t - 1) as f64;
            math::sqrt(var / t as f64)
        } else {
            0.0
        };
        Self {
            value: mean,
            std_error,
            trials: t,
        }
    }
}

/// Total spectral efficiency and its two terms; `total.value` is exactly
/// `mimo_term.value + coding_term.value`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeEstimate {
    pub total: MiEstimate,
    pub mimo_term: MiEstimate,
    pub coding_term: MiEstimate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constellation {
    Bpsk,
    Qpsk,
}

impl Constellation {
    /// Unit average-energy points.
    pub fn points(&self) -> Vec<Complex64> {
        match self {
            Constellation::Bpsk => vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)],
            Constellation::Qpsk => {
                let a = core::f64::consts::FRAC_1_SQRT_2;
                vec![
                    Complex64::new(a, a),
                    Complex64::new(-a, a),
                    Complex64::new(-a, -a),
                    Complex64::new(a, -a),
                ]
            }
        }
    }
}

/// Distribution of the transmit symbols `s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputModel {
    /// `s ~ CN(0, S)`.
    Gaussian,
    /// Independent equiprobable constellation points per antenna, scaled by
    /// the diagonal of `S`.
    Discrete(Constellation),
}

impl Default for InputModel {
    fn default() -> Self {
        InputModel::Discrete(Constellation::Qpsk)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub trials: usize,
    pub seed: u64,
    pub input: InputModel,
    pub enumeration_limit: u64,
}

impl McConfig {
    pub fn new(trials: usize, seed: u64) -> Self {
        Self {
            trials,
            seed,
            input: InputModel::default(),
            enumeration_limit: DEFAULT_ENUMERATION_LIMIT,
        }
    }

    pub fn with_input(self, input: InputModel) -> Self {
        Self { input, ..self }
    }
}

/// `S = (snr / n) I_n`: equal power on every transmit antenna with `N0 = 1`.
pub fn uniform_covariance(n: usize, snr: f64) -> CMatrix {
    CMatrix::from_diagonal_element(n, n, Complex64::new(snr / n as f64, 0.0))
}

/// Hermitian square root of a validated covariance.
fn covariance_root(s_cov: &CMatrix, n: usize) -> Result<CMatrix> {
    if s_cov.nrows() != n || s_cov.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "symbol covariance is {}x{}, expected {n}x{n}",
            s_cov.nrows(),
            s_cov.ncols()
        )));
    }
    if s_cov.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::NonPsdCovariance("non-finite entry".into()));
    }
    if !is_hermitian(s_cov, 1e-12) {
        return Err(Error::NonPsdCovariance("matrix is not Hermitian".into()));
    }
    let eig = s_cov.clone().symmetric_eigen();
    let top = eig.eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let low = eig.eigenvalues.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    if low < -1e-10 * top.max(f64::MIN_POSITIVE) {
        return Err(Error::NonPsdCovariance(format!("smallest eigenvalue {low:.3e}")));
    }
    let sqrt_vals = eig.eigenvalues.map(|v| Complex64::new(math::sqrt(v.max(0.0)), 0.0));
    let q = &eig.eigenvectors;
    Ok(q * CMatrix::from_diagonal(&sqrt_vals) * q.adjoint())
}

fn check_n0(n0: f64) -> Result<()> {
    if !(n0 > 0.0) || !n0.is_finite() {
        return Err(Error::InvalidParameter(format!("n0 must be positive, got {n0}")));
    }
    Ok(())
}

/// `ln det(I + A A^H)` through the Cholesky factor of the smaller Gram form.
fn ln_det_identity_plus_gram(a: &CMatrix) -> f64 {
    let (m, n) = a.shape();
    let g = if m <= n { a * a.adjoint() } else { a.adjoint() * a };
    let k = g.nrows();
    let mut buf: Vec<Complex64> = g.as_slice().to_vec();
    for i in 0..k {
        buf[i + i * k] += Complex64::new(1.0, 0.0);
    }
    cholesky_in_place(&mut buf, k).expect("I + A A^H is positive definite")
}

/// Conventional MIMO term in bits: `log2 det(I + H S H^H / n0)` with
/// `H = H_BS W(B)`.
pub fn mimo_mi(h_bs: &BeamspaceChannel, w: &CoderBlockMatrix, s_cov: &CMatrix, n0: f64) -> Result<f64> {
    let h = effective_channel(h_bs, w)?;
    mimo_mi_matrix(&h, s_cov, n0)
}

/// [`mimo_mi`] for an already assembled `m x n` channel.
pub fn mimo_mi_matrix(h: &CMatrix, s_cov: &CMatrix, n0: f64) -> Result<f64> {
    check_n0(n0)?;
    let root = covariance_root(s_cov, h.ncols())?;
    let a = (h * root).unscale(math::sqrt(n0));
    Ok(ln_det_identity_plus_gram(&a) / core::f64::consts::LN_2)
}

/// Antenna-coding term `N log2 P - H(B | H_BS, y)` over i.i.d. Rayleigh
/// `m x (n r)` beamspace channels, `r` being the coder length.
pub fn coding_mi_mc<E: Executor>(
    coders: &[PatternCoder],
    m: usize,
    n: usize,
    s_cov: &CMatrix,
    n0: f64,
    cfg: &McConfig,
    exec: &E,
) -> Result<MiEstimate> {
    let r = coders.first().map(|c| c.len()).unwrap_or(0);
    let ensemble = ChannelEnsemble::iid(m, n, r)?;
    Ok(total_se(&ensemble, coders, s_cov, n0, cfg, exec)?.coding_term)
}

/// Ergodic total spectral efficiency of pattern modulation with the
/// codebook `coders` (each is unit-normalized first).
pub fn total_se<E: Executor>(
    ensemble: &ChannelEnsemble,
    coders: &[PatternCoder],
    s_cov: &CMatrix,
    n0: f64,
    cfg: &McConfig,
    exec: &E,
) -> Result<SeEstimate> {
    let problem = Problem::new(ensemble, coders, s_cov, n0, cfg)?;
    let per_trial = exec.map(cfg.trials, |t| problem.trial(t as u64));
    let mimo: Vec<f64> = per_trial.iter().map(|t| t.0).collect();
    let coding: Vec<f64> = per_trial.iter().map(|t| t.1).collect();
    let total: Vec<f64> = per_trial.iter().map(|t| t.0 + t.1).collect();
    let mimo_term = MiEstimate::from_samples(&mimo);
    let coding_term = MiEstimate::from_samples(&coding);
    let mut total = MiEstimate::from_samples(&total);
    total.value = mimo_term.value + coding_term.value;
    Ok(SeEstimate {
        total,
        mimo_term,
        coding_term,
    })
}

/// Validated inputs shared by all trials.
struct Problem<'a> {
    ensemble: &'a ChannelEnsemble,
    coders: Vec<Vec<Complex64>>,
    root: CMatrix,
    /// Per-antenna symbol alphabets, already scaled by `sqrt(S_jj)`.
    alphabets: Option<Vec<Vec<Complex64>>>,
    n0: f64,
    seed: u64,
    hypotheses: usize,
}

impl<'a> Problem<'a> {
    fn new(
        ensemble: &'a ChannelEnsemble,
        coders: &[PatternCoder],
        s_cov: &CMatrix,
        n0: f64,
        cfg: &McConfig,
    ) -> Result<Self> {
        check_n0(n0)?;
        if cfg.trials < MIN_TRIALS {
            return Err(Error::InsufficientTrials {
                trials: cfg.trials,
                minimum: MIN_TRIALS,
            });
        }
        let p = coders.len();
        if p == 0 {
            return Err(Error::DegenerateCodebook { p });
        }
        let (n, r) = (ensemble.n(), ensemble.r());
        let hypotheses = (p as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        if hypotheses > cfg.enumeration_limit as u128 {
            return Err(Error::EnumerationLimitExceeded {
                hypotheses,
                limit: cfg.enumeration_limit,
            });
        }
        let mut unit = Vec::with_capacity(p);
        for (idx, c) in coders.iter().enumerate() {
            if c.len() != r {
                return Err(Error::DimensionMismatch(format!(
                    "pattern coder {idx} has length {}, the channel has {r} basis patterns per antenna",
                    c.len()
                )));
            }
            let w = c.normalized().ok_or_else(|| Error::ZeroPattern {
                coder: format!("#{idx}"),
            })?;
            unit.push(w.as_slice().to_vec());
        }
        let root = covariance_root(s_cov, n)?;
        let alphabets = match cfg.input {
            InputModel::Gaussian => None,
            InputModel::Discrete(constellation) => {
                let off_diagonal = (0..n).any(|i| (0..n).any(|j| i != j && s_cov[(i, j)] != ZERO));
                if off_diagonal {
                    return Err(Error::InvalidParameter(
                        "discrete inputs need a diagonal symbol covariance".into(),
                    ));
                }
                let points = constellation.points();
                Some(
                    (0..n)
                        .map(|j| {
                            let scale = math::sqrt(s_cov[(j, j)].re.max(0.0));
                            points.iter().map(|x| x * scale).collect()
                        })
                        .collect(),
                )
            }
        };
        Ok(Self {
            ensemble,
            coders: unit,
            root,
            alphabets,
            n0,
            seed: cfg.seed,
            hypotheses: hypotheses as usize,
        })
    }

    /// Returns `(mimo term, coding term)` for trial `t`.
    fn trial(&self, t: u64) -> (f64, f64) {
        let mut rng = stream_rng(self.seed, t);
        let h = self.ensemble.draw(&mut rng);
        let (m, n, p) = (h.m(), h.n(), self.coders.len());

        // pool[(j * p + k) * m ..][..m] = H_BS block j times unit coder k
        let mut pool = vec![ZERO; n * p * m];
        for j in 0..n {
            let block = h.block(j);
            for (k, w) in self.coders.iter().enumerate() {
                let out = &mut pool[(j * p + k) * m..][..m];
                for (c, wc) in w.iter().enumerate() {
                    for i in 0..m {
                        out[i] += block[(i, c)] * wc;
                    }
                }
            }
        }

        let truth: Vec<usize> = (0..n).map(|_| rng.random_range(0..p)).collect();
        let mut y = vec![ZERO; m];
        match &self.alphabets {
            Some(alpha) => {
                for j in 0..n {
                    let x = alpha[j][rng.random_range(0..alpha[j].len())];
                    let g = &pool[(j * p + truth[j]) * m..][..m];
                    for i in 0..m {
                        y[i] += g[i] * x;
                    }
                }
            }
            None => {
                let z: Vec<Complex64> = (0..n).map(|_| complex_normal(&mut rng)).collect();
                for j in 0..n {
                    let x: Complex64 = (0..n).map(|c| self.root[(j, c)] * z[c]).sum();
                    let g = &pool[(j * p + truth[j]) * m..][..m];
                    for i in 0..m {
                        y[i] += g[i] * x;
                    }
                }
            }
        }
        let noise_scale = math::sqrt(self.n0);
        let mut noise_energy = 0.0;
        for yi in y.iter_mut() {
            let e = complex_normal(&mut rng) * noise_scale;
            noise_energy += e.norm_sqr();
            *yi += e;
        }

        let mut mimo = Vec::with_capacity(self.hypotheses);
        let mut gaussian_ll = Vec::with_capacity(self.hypotheses);
        let mut a = CMatrix::zeros(m, n);
        let mut cov = vec![ZERO; m * m];
        let mut digits = vec![0usize; n];
        for _ in 0..self.hypotheses {
            for j in 0..n {
                let g = &pool[(j * p + digits[j]) * m..][..m];
                for c in 0..n {
                    let s = self.root[(j, c)];
                    if s != ZERO {
                        for i in 0..m {
                            a[(i, c)] = if j == 0 { ZERO } else { a[(i, c)] } + g[i] * s;
                        }
                    } else if j == 0 {
                        for i in 0..m {
                            a[(i, c)] = ZERO;
                        }
                    }
                }
            }
            // cov = n0 I + A A^H
            for col in 0..m {
                for row in 0..m {
                    let mut s = ZERO;
                    for c in 0..n {
                        s += a[(row, c)] * a[(col, c)].conj();
                    }
                    cov[row + col * m] = s;
                }
                cov[col + col * m] += Complex64::new(self.n0, 0.0);
            }
            let ln_det = cholesky_in_place(&mut cov, m).expect("noise keeps the covariance positive definite");
            mimo.push((ln_det - m as f64 * math::ln(self.n0)) / core::f64::consts::LN_2);
            if self.alphabets.is_none() {
                gaussian_ll.push(-cholesky_quad_form(&cov, m, &y) - ln_det);
            }
            increment(&mut digits, p);
        }

        let weights = match &self.alphabets {
            None => {
                let top = gaussian_ll.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                gaussian_ll.iter().map(|l| math::exp(l - top)).collect()
            }
            Some(alpha) => {
                let mut acc = vec![0.0; self.hypotheses];
                let search = Search {
                    pool: &pool,
                    alphabets: alpha,
                    m,
                    n,
                    p,
                    d_ref: noise_energy,
                    n0: self.n0,
                };
                let mut residual = vec![ZERO; (n + 1) * m];
                residual[..m].copy_from_slice(&y);
                search.descend(0, 0, &mut residual, &mut acc);
                acc
            }
        };
        let mimo_mean = compensated_sum(mimo.iter().copied()) / self.hypotheses as f64;
        let coding = math::log2(self.hypotheses as f64) - entropy_bits(&weights);
        (mimo_mean, coding)
    }
}

fn increment(digits: &mut [usize], base: usize) {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return;
        }
        *d = 0;
    }
}

/// Entropy of the distribution proportional to `weights`.
fn entropy_bits(weights: &[f64]) -> f64 {
    let total = compensated_sum(weights.iter().copied());
    let h = compensated_sum(weights.iter().filter(|&&w| w > 0.0).map(|&w| {
        let q = w / total;
        -q * math::ln(q)
    }));
    (h / core::f64::consts::LN_2).max(0.0)
}

/// Depth-first enumeration of `(coder, symbol)` per antenna accumulating
/// `sum_x exp(-(||y - H_i x||^2 - d_ref) / n0)` per coder hypothesis `i`.
struct Search<'a> {
    pool: &'a [Complex64],
    alphabets: &'a [Vec<Complex64>],
    m: usize,
    n: usize,
    p: usize,
    d_ref: f64,
    n0: f64,
}

impl Search<'_> {
    fn descend(&self, level: usize, prefix: usize, residual: &mut [Complex64], acc: &mut [f64]) {
        let m = self.m;
        let alpha = &self.alphabets[level];
        if level + 1 == self.n {
            let r = &residual[level * m..][..m];
            let r_norm: f64 = r.iter().map(|v| v.norm_sqr()).sum();
            for k in 0..self.p {
                let g = &self.pool[(level * self.p + k) * m..][..m];
                let mut t = ZERO;
                let mut g_norm = 0.0;
                for i in 0..m {
                    t += g[i].conj() * r[i];
                    g_norm += g[i].norm_sqr();
                }
                let mut sum = 0.0;
                for x in alpha {
                    // ||r - g x||^2 = ||r||^2 - 2 Re(conj(x) g^H r) + |x|^2 ||g||^2
                    let d = r_norm - 2.0 * (x.conj() * t).re + x.norm_sqr() * g_norm;
                    let e = (d - self.d_ref) / self.n0;
                    if e < NEGLIGIBLE_EXPONENT {
                        sum += math::exp(-e);
                    }
                }
                acc[prefix * self.p + k] += sum;
            }
            return;
        }
        for k in 0..self.p {
            let g = &self.pool[(level * self.p + k) * m..][..m];
            for x in alpha {
                {
                    let (head, tail) = residual.split_at_mut((level + 1) * m);
                    let r = &head[level * m..];
                    for i in 0..m {
                        tail[i] = r[i] - g[i] * x;
                    }
                }
                self.descend(level + 1, prefix * self.p + k, residual, acc);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Sequential;
    use crate::linalg::ONE;

    #[test]
    fn snr_from_transmit_power() {
        let s = SnrSpec::from_transmit_dbm(25.0).unwrap();
        assert!((s.snr_db() - 5.0).abs() < 1e-9);
        assert!((SnrSpec::from_snr_db(30.0).unwrap().snr() - 1000.0).abs() < 1e-6);
        assert!(SnrSpec::new(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn energy_efficiency_by_hand() {
        let model = PowerModel::reference(4, 0);
        let ee = energy_efficiency(10.0, &model, 0.3162);
        assert!((ee - 10.0 / 3.581).abs() < 1e-12);
        assert_eq!(energy_efficiency(0.0, &model, 0.3162), 0.0);
        let with_sw = energy_efficiency(10.0, &model.with_switches(3), 0.3162);
        assert!(with_sw < ee);
        assert!(PowerModel::new(1, 0.1, 0.1, 0.0, 0, 0.0).is_err());
        assert!(PowerModel::new(1, -0.1, 0.1, 0.5, 0, 0.0).is_err());
    }

    #[test]
    fn bound_values() {
        assert_eq!(high_snr_bound(4, 8), 12.0);
        assert_eq!(high_snr_bound(3, 1), 0.0);
        assert_eq!(high_snr_bound(2, 4), 4.0);
    }

    #[test]
    fn identity_channel_log_det() {
        let h = CMatrix::identity(2, 2);
        let rho = 7.5;
        let v = mimo_mi_matrix(&h, &CMatrix::from_diagonal_element(2, 2, Complex64::new(rho, 0.0)), 1.0).unwrap();
        assert!((v - 2.0 * math::log2(1.0 + rho)).abs() < 1e-12);
    }

    #[test]
    fn log_det_shrinks_with_noise() {
        let mut rng = stream_rng(3, 0);
        let h = CMatrix::from_fn(3, 2, |_, _| complex_normal(&mut rng));
        let s = uniform_covariance(2, 10.0);
        let mut last = f64::INFINITY;
        for n0 in [0.1, 1.0, 10.0, 1e3, 1e6] {
            let v = mimo_mi_matrix(&h, &s, n0).unwrap();
            assert!(v < last);
            last = v;
        }
        assert!(last < 1e-4);
    }

    #[test]
    fn log_det_matches_eigenvalues() {
        let mut rng = stream_rng(5, 0);
        let h = CMatrix::from_fn(4, 4, |_, _| complex_normal(&mut rng));
        let b = CMatrix::from_fn(4, 4, |_, _| complex_normal(&mut rng));
        let s = &b * b.adjoint();
        let n0 = 0.7;
        let v = mimo_mi_matrix(&h, &s, n0).unwrap();
        let k = CMatrix::identity(4, 4) + &h * &s * h.adjoint() / Complex64::new(n0, 0.0);
        let oracle: f64 = k.symmetric_eigenvalues().iter().map(|l| math::log2(*l)).sum();
        assert!((v - oracle).abs() < 1e-10, "{v} vs {oracle}");
    }

    #[test]
    fn covariance_checks() {
        let h = CMatrix::identity(2, 2);
        let bad = CMatrix::from_diagonal_element(2, 2, Complex64::new(-1.0, 0.0));
        assert!(matches!(mimo_mi_matrix(&h, &bad, 1.0), Err(Error::NonPsdCovariance(_))));
        let mut skew = CMatrix::identity(2, 2);
        skew[(0, 1)] = Complex64::new(0.5, 0.0);
        assert!(matches!(
            mimo_mi_matrix(&h, &skew, 1.0),
            Err(Error::NonPsdCovariance(_))
        ));
        assert!(mimo_mi_matrix(&h, &CMatrix::identity(2, 2), 0.0).is_err());
    }

    fn selectors(p: usize, r: usize) -> Vec<PatternCoder> {
        (0..p).map(|i| PatternCoder::selector(i, r)).collect()
    }

    #[test]
    fn single_coder_carries_nothing() {
        let cfg = McConfig::new(100, 1);
        let s = uniform_covariance(2, 10.0);
        let est = coding_mi_mc(&selectors(1, 3), 2, 2, &s, 1.0, &cfg, &Sequential).unwrap();
        assert_eq!(est.value, 0.0);
        assert_eq!(est.std_error, 0.0);
        let g = cfg.with_input(InputModel::Gaussian);
        assert_eq!(
            coding_mi_mc(&selectors(1, 3), 2, 2, &s, 1.0, &g, &Sequential)
                .unwrap()
                .value,
            0.0
        );
    }

    #[test]
    fn preconditions() {
        let s = uniform_covariance(4, 10.0);
        let too_many = coding_mi_mc(&selectors(9, 9), 4, 4, &s, 1.0, &McConfig::new(100, 0), &Sequential);
        assert_eq!(
            too_many.unwrap_err(),
            Error::EnumerationLimitExceeded {
                hypotheses: 6561,
                limit: 4096
            }
        );
        let few = coding_mi_mc(&selectors(2, 2), 4, 4, &s, 1.0, &McConfig::new(99, 0), &Sequential);
        assert!(matches!(
            few,
            Err(Error::InsufficientTrials {
                trials: 99,
                minimum: 100
            })
        ));
        let zero = [
            PatternCoder::selector(0, 2),
            PatternCoder {
                w: crate::linalg::CVector::zeros(2),
            },
        ];
        let z = coding_mi_mc(
            &zero,
            1,
            1,
            &uniform_covariance(1, 1.0),
            1.0,
            &McConfig::new(100, 0),
            &Sequential,
        );
        assert!(matches!(z, Err(Error::ZeroPattern { .. })));
    }

    #[test]
    fn terms_add_up() {
        let ens = ChannelEnsemble::iid(2, 2, 3).unwrap();
        let s = uniform_covariance(2, 10.0);
        for input in [InputModel::Gaussian, InputModel::default()] {
            let cfg = McConfig::new(200, 4).with_input(input);
            let se = total_se(&ens, &selectors(3, 3), &s, 1.0, &cfg, &Sequential).unwrap();
            assert_eq!(se.total.value, se.mimo_term.value + se.coding_term.value);
            assert!(se.coding_term.value <= high_snr_bound(2, 3) + 1e-12);
            assert!(se.coding_term.value > 0.0);
        }
    }

    #[test]
    fn high_snr_reaches_bound() {
        let cfg = McConfig::new(200, 2);
        let s = uniform_covariance(2, 1e6);
        let est = coding_mi_mc(&selectors(4, 4), 2, 2, &s, 1.0, &cfg, &Sequential).unwrap();
        assert!((est.value - 4.0).abs() < 0.05, "{est:?}");
    }

    #[test]
    fn entropy_of_uniform() {
        assert!((entropy_bits(&[1.0; 8]) - 3.0).abs() < 1e-12);
        assert_eq!(entropy_bits(&[0.0, 5.0, 0.0]), 0.0);
        let _ = ONE;
    }
}
