//! Independent reference computations for the acceptance suite. Nothing
//! here calls into the estimators it checks.

#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

/// Gauss rule from its Jacobi matrix (Golub-Welsch).
fn golub_welsch(diag: &[f64], off: &[f64], mu0: f64) -> (Vec<f64>, Vec<f64>) {
    let n = diag.len();
    let mut j = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        j[(i, i)] = diag[i];
        if i + 1 < n {
            j[(i, i + 1)] = off[i];
            j[(i + 1, i)] = off[i];
        }
    }
    let eig = SymmetricEigen::new(j);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|k| (eig.eigenvalues[k], mu0 * eig.eigenvectors[(0, k)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Nodes and weights for the integral of `f(x) e^{-x}` on `[0, inf)`.
pub fn gauss_laguerre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let diag: Vec<f64> = (0..n).map(|i| 2.0 * i as f64 + 1.0).collect();
    let off: Vec<f64> = (1..n).map(|i| i as f64).collect();
    golub_welsch(&diag, &off, 1.0)
}

/// Same integral as [`gauss_laguerre`] through `x = e^s` and the trapezoid
/// rule in `s` with step `h`. The transformed integrand decays doubly
/// exponentially at both ends, and unlike Laguerre this copes with
/// integrands that vary quickly near `x = 0`.
pub fn exp_trapezoid(h: f64) -> (Vec<f64>, Vec<f64>) {
    let (lo, hi) = (-36.0, 4.0);
    let n = ((hi - lo) / h) as usize + 1;
    (0..n)
        .map(|i| {
            let s = lo + i as f64 * h;
            let x = s.exp();
            (x, h * x * (-x).exp())
        })
        .unzip()
}

/// Nodes and weights for the integral of `f(x) e^{-x^2}` on the real line.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let diag = vec![0.0; n];
    let off: Vec<f64> = (1..n).map(|i| (i as f64 / 2.0).sqrt()).collect();
    golub_welsch(&diag, &off, std::f64::consts::PI.sqrt())
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Coding mutual information `I(B; y | h)` in bits for one receive and one
/// transmit antenna, two orthogonal patterns with i.i.d. CN(0,1) gains, unit
/// noise and QPSK symbols of energy `snr`.
///
/// By symmetry the true pattern is 1 and the true symbol is folded into the
/// gain `u = h1 x`, whose phase is rotated away. What remains is
/// `|u|^2 ~ Exp(1)`, `h2 = sqrt(g2) e^{j phi}` with `phi` over a quarter
/// turn (the QPSK set is invariant under a quarter turn), and the noise.
pub fn qpsk_coding_mi(snr: f64, gain: &(Vec<f64>, Vec<f64>), n_phase: usize, n_noise: usize) -> f64 {
    let (gl_x, gl_w) = gain;
    let (gh_x, gh_w) = gauss_hermite(n_noise);
    let pi = std::f64::consts::PI;
    let rot = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, -1.0),
    ];
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let qpsk = [
        Complex64::new(s, s),
        Complex64::new(-s, s),
        Complex64::new(-s, -s),
        Complex64::new(s, -s),
    ];
    let root = snr.sqrt();
    let mut entropy = 0.0;
    for (&g1, &w1) in gl_x.iter().zip(gl_w) {
        let a = root * g1.sqrt();
        for (&g2, &w2) in gl_x.iter().zip(gl_w) {
            for k in 0..n_phase {
                let phi = (k as f64 + 0.5) * (pi / 2.0) / n_phase as f64;
                let h2 = Complex64::from_polar(root * g2.sqrt(), phi);
                let mut inner = 0.0;
                for (&tr, &wr) in gh_x.iter().zip(&gh_w) {
                    for (&ti, &wi) in gh_x.iter().zip(&gh_w) {
                        let y = Complex64::new(a + tr, ti);
                        let mut own = [0.0; 4];
                        let mut all = [0.0; 8];
                        for c in 0..4 {
                            own[c] = -(y - rot[c] * a).norm_sqr();
                            all[c] = own[c];
                            all[4 + c] = -(y - h2 * qpsk[c]).norm_sqr();
                        }
                        let post = log_sum_exp(&own) - log_sum_exp(&all);
                        inner += wr * wi * (-post);
                    }
                }
                entropy += w1 * w2 * inner / pi / n_phase as f64;
            }
        }
    }
    1.0 - entropy / std::f64::consts::LN_2
}

/// Gaussian-input counterpart: returns `(coding, joint)` in bits, where
/// `joint = I(B, s; y | h)` and `coding = joint - E log2(1 + snr |h_B|^2)`.
/// Given the gains, `|y|^2` is exponential under each pattern, so the
/// output entropy is a one-dimensional Laguerre integral.
pub fn gaussian_mi(snr: f64, gain: &(Vec<f64>, Vec<f64>)) -> (f64, f64) {
    let (x, w) = gain;
    let pi = std::f64::consts::PI;
    let mut joint = 0.0;
    let mut mimo = 0.0;
    for (&g1, &w1) in x.iter().zip(w) {
        for (&g2, &w2) in x.iter().zip(w) {
            let v = [1.0 + snr * g1, 1.0 + snr * g2];
            let ln_p = |t: f64| {
                let terms = [(0.5 / (pi * v[0])).ln() - t / v[0], (0.5 / (pi * v[1])).ln() - t / v[1]];
                log_sum_exp(&terms)
            };
            let mut h_y = 0.0;
            for &vb in &v {
                for (&tau, &wt) in x.iter().zip(w) {
                    h_y -= 0.5 * wt * ln_p(vb * tau);
                }
            }
            joint += w1 * w2 * (h_y - (pi * std::f64::consts::E).ln());
            mimo += w1 * w2 * 0.5 * (v[0].log2() + v[1].log2());
        }
    }
    let joint = joint / std::f64::consts::LN_2;
    (joint - mimo, joint)
}

/// `log2 |det A|` by Gaussian elimination with partial pivoting.
pub fn log2_abs_det(mut a: Vec<Vec<Complex64>>) -> f64 {
    let n = a.len();
    let mut acc = 0.0;
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))
            .unwrap();
        a.swap(col, piv);
        let p = a[col][col];
        acc += p.norm().log2();
        let (top, rest) = a.split_at_mut(col + 1);
        let pivot_row = &top[col];
        for row in rest.iter_mut() {
            let f = row[col] / p;
            for (x, &v) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= f * v;
            }
        }
    }
    acc
}

/// Textbook ergodic capacity `E log2 det(I + snr/n H H^H)` of an `m x n`
/// i.i.d. Rayleigh channel, averaged over `trials` draws.
pub fn ergodic_capacity(m: usize, n: usize, snr: f64, trials: usize, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut draw = || {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    };
    let mut samples = Vec::with_capacity(trials);
    for _ in 0..trials {
        let h: Vec<Vec<Complex64>> = (0..m).map(|_| (0..n).map(|_| draw()).collect()).collect();
        let a: Vec<Vec<Complex64>> = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| {
                        let dot: Complex64 = (0..n).map(|k| h[i][k] * h[j][k].conj()).sum();
                        let id = if i == j { 1.0 } else { 0.0 };
                        Complex64::new(id, 0.0) + dot * (snr / n as f64)
                    })
                    .collect()
            })
            .collect();
        samples.push(log2_abs_det(a));
    }
    mean_and_error(&samples)
}

pub fn mean_and_error(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[cfg(test)]
mod tests {}
