//! Dense complex linear algebra at Jacobian scale (m <= 4): determinant by
//! LU with partial pivoting, inverse by Gauss-Jordan, singular values by
//! one-sided Jacobi. Deterministic and allocation-light; not meant for
//! matrices beyond desk size.

use num_complex::Complex;

use crate::scalar::Real;

pub(crate) type Mat<T> = Vec<Vec<Complex<T>>>;

/// Maximum Jacobi sweeps before declaring convergence regardless; at desk
/// scale the threshold test exits far earlier.
const MAX_SWEEPS: usize = 60;

pub(crate) fn identity<T: Real>(n: usize) -> Mat<T> {
    let mut out = vec![vec![Complex::default(); n]; n];
    for (i, row) in out.iter_mut().enumerate() {
        row[i] = Complex::new(T::one(), T::zero());
    }
    out
}

pub(crate) fn mat_vec<T: Real>(a: &[Vec<Complex<T>>], x: &[Complex<T>]) -> Vec<Complex<T>> {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(x)
                .fold(Complex::default(), |acc, (c, v)| acc + c * v)
        })
        .collect()
}

pub(crate) fn mat_mul<T: Real>(a: &[Vec<Complex<T>>], b: &[Vec<Complex<T>>]) -> Mat<T> {
    let n = a.len();
    let p = b[0].len();
    let mut out = vec![vec![Complex::default(); p]; n];
    for i in 0..n {
        for (k, aik) in a[i].iter().enumerate() {
            for j in 0..p {
                out[i][j] = out[i][j] + aik * b[k][j];
            }
        }
    }
    out
}

/// Determinant by LU factorization with partial pivoting.
pub(crate) fn det<T: Real>(a: &[Vec<Complex<T>>]) -> Complex<T> {
    let n = a.len();
    let mut m: Mat<T> = a.to_vec();
    let mut result = Complex::new(T::one(), T::zero());
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r, &s| {
                m[r][col]
                    .norm_sqr()
                    .partial_cmp(&m[s][col].norm_sqr())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("non-empty pivot range");
        if m[pivot_row][col].norm_sqr() == T::zero() {
            return Complex::default();
        }
        if pivot_row != col {
            m.swap(pivot_row, col);
            result = -result;
        }
        let pivot = m[col][col];
        result = result * pivot;
        for r in (col + 1)..n {
            let factor = m[r][col] / pivot;
            for c in col..n {
                let sub = factor * m[col][c];
                m[r][c] = m[r][c] - sub;
            }
        }
    }
    result
}

/// Inverse by Gauss-Jordan elimination with partial pivoting; `None` when a
/// pivot falls below the roundoff floor of the input scale.
pub(crate) fn invert<T: Real>(a: &[Vec<Complex<T>>]) -> Option<Mat<T>> {
    let n = a.len();
    let scale = a
        .iter()
        .flat_map(|row| row.iter())
        .map(|c| c.norm())
        .fold(T::zero(), T::max);
    if scale == T::zero() {
        return None;
    }
    let floor = scale * T::epsilon() * T::of_usize(n);
    let mut m: Mat<T> = a.to_vec();
    let mut inv = identity::<T>(n);
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r, &s| {
                m[r][col]
                    .norm_sqr()
                    .partial_cmp(&m[s][col].norm_sqr())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("non-empty pivot range");
        if m[pivot_row][col].norm() < floor {
            return None;
        }
        m.swap(pivot_row, col);
        inv.swap(pivot_row, col);
        let pivot = m[col][col];
        for c in 0..n {
            m[col][c] = m[col][c] / pivot;
            inv[col][c] = inv[col][c] / pivot;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let factor = m[r][col];
            if factor.norm_sqr() == T::zero() {
                continue;
            }
            for c in 0..n {
                let a_sub = factor * m[col][c];
                m[r][c] = m[r][c] - a_sub;
                let i_sub = factor * inv[col][c];
                inv[r][c] = inv[r][c] - i_sub;
            }
        }
    }
    Some(inv)
}

/// Singular values in descending order, by one-sided Jacobi rotations on the
/// columns: each rotation orthogonalizes one column pair; at convergence the
/// column norms are the singular values.
pub(crate) fn singular_values<T: Real>(a: &[Vec<Complex<T>>]) -> Vec<T> {
    let n = a.len();
    if n == 0 {
        return Vec::new();
    }
    // Column-major working copy.
    let mut cols: Vec<Vec<Complex<T>>> = (0..n).map(|j| (0..n).map(|i| a[i][j]).collect()).collect();
    let eps = T::epsilon() * T::of(4.0);
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let mut app = T::zero();
                let mut aqq = T::zero();
                let mut apq: Complex<T> = Complex::default();
                for i in 0..n {
                    app += cols[p][i].norm_sqr();
                    aqq += cols[q][i].norm_sqr();
                    apq = apq + cols[p][i].conj() * cols[q][i];
                }
                let off = apq.norm();
                if off <= eps * (app * aqq).sqrt() || app == T::zero() || aqq == T::zero() {
                    continue;
                }
                rotated = true;
                // De-phase column q so the Gram cross-term is real, then
                // apply the classical real Jacobi rotation.
                let phase: Complex<T> = apq / off;
                let tau = (aqq - app) / (off + off);
                let t = tau.signum() / (tau.abs() + (T::one() + tau * tau).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                for i in 0..n {
                    let vp = cols[p][i];
                    let vq = cols[q][i] * phase.conj();
                    cols[p][i] = vp * c - vq * s;
                    cols[q][i] = vp * s + vq * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<T> = cols
        .iter()
        .map(|col| col.iter().map(|c| c.norm_sqr()).fold(T::zero(), |a, b| a + b).sqrt())
        .collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    sv
}

/// Operator norm (largest singular value).
pub(crate) fn op_norm<T: Real>(a: &[Vec<Complex<T>>]) -> T {
    singular_values(a).first().copied().unwrap_or_else(T::zero)
}
