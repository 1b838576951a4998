//! Small Hermitian helpers on top of nalgebra.

use nalgebra::{Cholesky, SymmetricEigen};
use num_complex::Complex64;

use crate::channel::ComplexMatrix;

/// Condition numbers above this are treated as numerically singular.
pub const MAX_CONDITION: f64 = 1e12;

/// `scale * A A^H` for a possibly zero-column `A`. Exactly Hermitian.
pub fn scaled_gram(a: &ComplexMatrix, scale: f64) -> ComplexMatrix {
    let m = a.nrows();
    // Rows of `a` become contiguous columns of `t`.
    let n = a.ncols();
    let t = a.transpose();
    let rows = t.as_slice();
    let mut g = ComplexMatrix::zeros(m, m);
    for i in 0..m {
        let ri = &rows[i * n..(i + 1) * n];
        for k in 0..=i {
            let rk = &rows[k * n..(k + 1) * n];
            let (mut re, mut im) = (0.0, 0.0);
            for (x, y) in ri.iter().zip(rk) {
                re += x.re * y.re + x.im * y.im;
                im += x.im * y.re - x.re * y.im;
            }
            let v = Complex64::new(scale * re, scale * im);
            g[(i, k)] = v;
            g[(k, i)] = v.conj();
        }
    }
    g
}

/// Symmetrizes in place so that rounding does not break Hermitian-ness.
pub fn hermitize(m: &mut ComplexMatrix) {
    let n = m.nrows();
    for i in 0..n {
        m[(i, i)] = Complex64::new(m[(i, i)].re, 0.0);
        for j in 0..i {
            let v = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = v;
            m[(j, i)] = v.conj();
        }
    }
}

/// `log2 |K|` of a Hermitian positive-definite matrix via Cholesky.
/// `None` when the factorization fails.
pub fn log2_det_hpd(k: &ComplexMatrix) -> Option<f64> {
    if k.nrows() == 0 {
        return Some(0.0);
    }
    let chol = Cholesky::new(k.clone())?;
    let l = chol.l_dirty();
    let mut acc = 0.0;
    for i in 0..k.nrows() {
        let d = l[(i, i)].re;
        if d <= 0.0 || !d.is_finite() {
            return None;
        }
        acc += d.log2();
    }
    Some(2.0 * acc)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(k: &ComplexMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(k.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Spectral condition number of a Hermitian matrix; infinite when it is not
/// positive definite.
pub fn condition_number(k: &ComplexMatrix) -> f64 {
    let ev = hermitian_eigenvalues(k);
    match (ev.first(), ev.last()) {
        (Some(&lo), Some(&hi)) if lo > 0.0 => hi / lo,
        (None, None) => 1.0,
        _ => f64::INFINITY,
    }
}

/// `log2 |K|` for a Hermitian `K` whose condition number is at most
/// [`MAX_CONDITION`]; `None` otherwise.
///
/// The Cholesky factor gives the upper bound `||K||_F tr(K^-1)` on the
/// condition number. The exact spectrum is only computed when that bound
/// exceeds the limit.
pub fn log2_det_well_conditioned(k: &ComplexMatrix) -> Option<f64> {
    let n = k.nrows();
    if n == 0 {
        return Some(0.0);
    }
    let chol = Cholesky::new(k.clone())?;
    let l = chol.l_dirty();
    let mut acc = 0.0;
    for i in 0..n {
        let d = l[(i, i)].re;
        if d <= 0.0 || !d.is_finite() {
            return None;
        }
        acc += d.log2();
    }
    let l_inv = chol.l().solve_lower_triangular(&ComplexMatrix::identity(n, n))?;
    let bound = k.norm() * l_inv.norm_squared();
    if !(bound <= MAX_CONDITION) && !(condition_number(k) <= MAX_CONDITION) {
        return None;
    }
    Some(2.0 * acc)
}

/// Inverse of a Hermitian positive-definite matrix.
pub fn inverse_hpd(k: &ComplexMatrix) -> Option<ComplexMatrix> {
    Cholesky::new(k.clone()).map(|c| c.inverse())
}

/// Compensated (Neumaier) sum. The result depends only on the order of
/// `values`, which callers keep fixed.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}

/// Sample mean and standard error of the mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub std_err: f64,
    pub samples: usize,
}

impl Estimate {
    pub fn from_samples(xs: &[f64]) -> Estimate {
        let n = xs.len();
        if n == 0 {
            return Estimate { mean: f64::NAN, std_err: f64::NAN, samples: 0 };
        }
        let mean = neumaier_sum(xs.iter().copied()) / n as f64;
        let std_err = if n > 1 {
            let ss = neumaier_sum(xs.iter().map(|x| (x - mean) * (x - mean)));
            (ss / (n as f64 - 1.0) / n as f64).sqrt()
        } else {
            0.0
        };
        Estimate { mean, std_err, samples: n }
    }
}
