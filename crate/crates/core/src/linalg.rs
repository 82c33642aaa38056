//! Dense complex helpers that the rest of the crate leans on.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    // column-major, L below the diagonal (unit diagonal implied), U on and above
    lu: Vec<Complex64>,
    perm: Vec<usize>,
}

impl Lu {
    /// Returns `None` when a pivot is exactly zero.
    pub fn factor(a: &CMatrix) -> Option<Self> {
        let n = a.nrows();
        assert_eq!(n, a.ncols(), "LU needs a square matrix");
        let mut lu: Vec<Complex64> = a.as_slice().to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        let at = |r: usize, c: usize| r + c * n;
        for k in 0..n {
            let mut piv = k;
            let mut best = lu[at(k, k)].norm_sqr();
            for r in k + 1..n {
                let v = lu[at(r, k)].norm_sqr();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best == 0.0 {
                return None;
            }
            if piv != k {
                perm.swap(piv, k);
                for c in 0..n {
                    lu.swap(at(piv, c), at(k, c));
                }
            }
            let inv = ONE / lu[at(k, k)];
            for r in k + 1..n {
                lu[at(r, k)] *= inv;
            }
            for c in k + 1..n {
                let ukc = lu[at(k, c)];
                if ukc == ZERO {
                    continue;
                }
                for r in k + 1..n {
                    let l = lu[at(r, k)];
                    lu[at(r, c)] -= l * ukc;
                }
            }
        }
        Some(Self { n, lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let at = |r: usize, c: usize| r + c * n;
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for c in 0..n {
            let xc = x[c];
            if xc == ZERO {
                continue;
            }
            for r in c + 1..n {
                x[r] -= self.lu[at(r, c)] * xc;
            }
        }
        for c in (0..n).rev() {
            x[c] /= self.lu[at(c, c)];
            let xc = x[c];
            for r in 0..c {
                x[r] -= self.lu[at(r, c)] * xc;
            }
        }
        x
    }

    /// Solves `A^H x = b`.
    pub fn solve_adjoint(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let at = |r: usize, c: usize| r + c * n;
        // A^H = U^H L^H P, so solve U^H z = b, L^H w = z, x = P^T w.
        let mut z = b.to_vec();
        for r in 0..n {
            let mut acc = z[r];
            for c in 0..r {
                acc -= self.lu[at(c, r)].conj() * z[c];
            }
            z[r] = acc / self.lu[at(r, r)].conj();
        }
        for r in (0..n).rev() {
            let mut acc = z[r];
            for c in r + 1..n {
                acc -= self.lu[at(c, r)].conj() * z[c];
            }
            z[r] = acc;
        }
        let mut x = vec![ZERO; n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = z[i];
        }
        x
    }

    /// Hager/Higham estimate of `||A^{-1}||_1`.
    pub fn inverse_norm1_estimate(&self) -> f64 {
        let n = self.n;
        if n == 0 {
            return 0.0;
        }
        let mut x = vec![Complex64::new(1.0 / n as f64, 0.0); n];
        let mut estimate = 0.0;
        let mut last_j = usize::MAX;
        for iter in 0..5 {
            let y = self.solve(&x);
            let norm: f64 = y.iter().map(|v| v.norm()).sum();
            if iter > 0 && norm <= estimate {
                break;
            }
            estimate = norm;
            let xi: Vec<Complex64> = y
                .iter()
                .map(|v| {
                    let a = v.norm();
                    if a == 0.0 {
                        ONE
                    } else {
                        v / a
                    }
                })
                .collect();
            let z = self.solve_adjoint(&xi);
            let (j, zmax) = z
                .iter()
                .enumerate()
                .map(|(i, v)| (i, v.norm()))
                .fold((0, -1.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
            let ztx: f64 = z.iter().zip(&x).map(|(a, b)| (a.conj() * b).re).sum();
            if zmax <= ztx || j == last_j {
                break;
            }
            last_j = j;
            x = vec![ZERO; n];
            x[j] = ONE;
        }
        // alternating-sign probe guards against the classic underestimate
        let alt: Vec<Complex64> = (0..n)
            .map(|i| {
                let s = if i % 2 == 0 { 1.0 } else { -1.0 };
                Complex64::new(s * (1.0 + i as f64 / (n.max(2) - 1) as f64), 0.0)
            })
            .collect();
        let y = self.solve(&alt);
        let alt_est = 2.0 * y.iter().map(|v| v.norm()).sum::<f64>() / (3.0 * n as f64);
        estimate.max(alt_est)
    }
}

/// Matrix 1-norm (max column sum).
pub fn norm1(a: &CMatrix) -> f64 {
    (0..a.ncols())
        .map(|c| a.column(c).iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Solves `A x = b` after row equilibration and rejects systems whose
/// estimated 1-norm condition number exceeds `max_condition`.
pub fn solve_checked(a: &CMatrix, b: &CVector, max_condition: f64) -> Result<CVector> {
    let n = a.nrows();
    if a.ncols() != n || b.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "system is {}x{} with right-hand side of length {}",
            a.nrows(),
            a.ncols(),
            b.len()
        )));
    }
    let mut scaled = a.clone();
    let mut rhs = b.clone();
    for r in 0..n {
        let m = scaled.row(r).iter().map(|v| v.norm()).fold(0.0, f64::max);
        if !(m > 0.0) || !m.is_finite() {
            return Err(Error::SingularSystem {
                condition: f64::INFINITY,
            });
        }
        let inv = 1.0 / m;
        for c in 0..n {
            scaled[(r, c)] *= inv;
        }
        rhs[r] *= inv;
    }
    let lu = Lu::factor(&scaled).ok_or(Error::SingularSystem {
        condition: f64::INFINITY,
    })?;
    let condition = norm1(&scaled) * lu.inverse_norm1_estimate();
    if !(condition <= max_condition) {
        return Err(Error::SingularSystem { condition });
    }
    let x = lu.solve(rhs.as_slice());
    if x.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::SingularSystem { condition });
    }
    Ok(CVector::from_vec(x))
}

/// In-place Cholesky of a Hermitian positive definite `m x m` matrix stored
/// column-major; the lower triangle receives `L`. Returns `ln det A`, or
/// `None` if a pivot is not strictly positive.
pub fn cholesky_in_place(a: &mut [Complex64], m: usize) -> Option<f64> {
    let mut logdet = 0.0;
    for j in 0..m {
        let mut d = a[j + j * m].re;
        for k in 0..j {
            d -= a[j + k * m].norm_sqr();
        }
        if !(d > 0.0) {
            return None;
        }
        let ljj = math::sqrt(d);
        a[j + j * m] = Complex64::new(ljj, 0.0);
        logdet += 2.0 * math::ln(ljj);
        for i in j + 1..m {
            let mut s = a[i + j * m];
            for k in 0..j {
                s -= a[i + k * m] * a[j + k * m].conj();
            }
            a[i + j * m] = s / ljj;
        }
    }
    Some(logdet)
}

/// `||L^{-1} y||^2` for the factor produced by [`cholesky_in_place`],
/// i.e. `y^H A^{-1} y`.
pub fn cholesky_quad_form(l: &[Complex64], m: usize, y: &[Complex64]) -> f64 {
    let mut z = [ZERO; 16];
    let mut heap;
    let z: &mut [Complex64] = if m <= 16 {
        &mut z[..m]
    } else {
        heap = vec![ZERO; m];
        &mut heap[..]
    };
    let mut q = 0.0;
    for i in 0..m {
        let mut s = y[i];
        for k in 0..i {
            s -= l[i + k * m] * z[k];
        }
        z[i] = s / l[i + i * m].re;
        q += z[i].norm_sqr();
    }
    q
}

/// Hermitian check with a tolerance relative to the largest entry.
pub fn is_hermitian(a: &CMatrix, rel_tol: f64) -> bool {
    if a.nrows() != a.ncols() {
        return false;
    }
    let scale = a.iter().map(|v| v.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    for r in 0..a.nrows() {
        for c in r..a.ncols() {
            if (a[(r, c)] - a[(c, r)].conj()).norm() > rel_tol * scale {
                return false;
            }
        }
    }
    true
}

/// Relative Frobenius distance `||a - b|| / ||b||` (absolute if `b` is zero).
pub fn relative_error(a: &CVector, b: &CVector) -> f64 {
    let diff = (a - b).norm();
    let base = b.norm();
    if base == 0.0 {
        diff
    } else {
        diff / base
    }
}
