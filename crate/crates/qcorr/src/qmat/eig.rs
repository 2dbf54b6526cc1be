//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! The matrices here are at most 64x64 (six qubits), where Jacobi iteration
//! is simple, accurate, and fast enough. Each rotation zeroes one
//! off-diagonal pair; sweeps repeat until the off-diagonal Frobenius mass
//! falls below `EIG_TOL` relative to the input norm.

use super::tol::{EIG_TOL, JACOBI_MAX_SWEEPS};
use super::{CMatrix, QmatError, C64};

/// Eigendecomposition of a Hermitian matrix: `values[k]` descending, with
/// `vectors` column k the matching unit eigenvector.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                s += a[(r, c)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One Jacobi rotation on the (p,q) plane, p < q, annihilating a[p][q].
///
/// With m = |a_pq|, phase w = a_pq/m, and tau = (a_qq - a_pp)/(2m), the
/// tangent t = sign(tau)/(|tau| + sqrt(1 + tau^2)) (t = 1 when tau = 0)
/// gives c = 1/sqrt(1+t^2), s = t*c. Rows/columns p,q mix as
///   A'[i,p] = c*A[i,p] - s*conj(w)*A[i,q]
///   A'[i,q] = s*w*A[i,p] + c*A[i,q]
/// and the diagonal moves by -t*m at p, +t*m at q.
fn rotate(a: &mut CMatrix, v: Option<&mut CMatrix>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let m = apq.norm();
    if m == 0.0 {
        return;
    }
    let w = apq / m;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (2.0 * m);
    let t = if tau == 0.0 {
        1.0
    } else {
        tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let cw = w.conj();
    let n = a.rows();

    // columns p and q of A
    for i in 0..n {
        let aip = a[(i, p)];
        let aiq = a[(i, q)];
        a[(i, p)] = aip * c - aiq * cw * s;
        a[(i, q)] = aip * (w * s) + aiq * c;
    }
    // rows p and q, as the conjugate transpose of the column update
    for j in 0..n {
        let apj = a[(p, j)];
        let aqj = a[(q, j)];
        a[(p, j)] = apj * c - aqj * (w * s);
        a[(q, j)] = apj * (cw * s) + aqj * c;
    }
    // exact values on the rotated 2x2 block
    a[(p, p)] = C64::new(app - t * m, 0.0);
    a[(q, q)] = C64::new(aqq + t * m, 0.0);
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);

    // accumulate the same column mix into V when vectors are wanted
    if let Some(v) = v {
        for i in 0..n {
            let vip = v[(i, p)];
            let viq = v[(i, q)];
            v[(i, p)] = vip * c - viq * cw * s;
            v[(i, q)] = vip * (w * s) + viq * c;
        }
    }
}

fn jacobi(a: &CMatrix, want_vectors: bool) -> Result<(Vec<f64>, Option<CMatrix>), QmatError> {
    debug_assert!(a.is_square());
    let n = a.rows();
    let mut work = a.clone();
    let mut v = want_vectors.then(|| CMatrix::identity(n));
    let scale = a.frobenius_norm().max(1.0);
    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&work) <= EIG_TOL * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                // skip entries already far below the target to save rotations
                if work[(p, q)].norm() > EIG_TOL * scale / (n as f64 * n as f64) {
                    rotate(&mut work, v.as_mut(), p, q);
                }
            }
        }
    }
    if !converged && off_diagonal_norm(&work) > EIG_TOL * scale {
        return Err(QmatError::NoConvergence(JACOBI_MAX_SWEEPS));
    }
    let values: Vec<f64> = (0..n).map(|i| work[(i, i)].re).collect();
    Ok((values, v))
}

/// Eigenvalues of a Hermitian matrix, sorted descending.
pub fn eigvals_hermitian(a: &CMatrix) -> Result<Vec<f64>, QmatError> {
    let (mut values, _) = jacobi(a, false)?;
    values.sort_unstable_by(|x, y| y.partial_cmp(x).expect("finite eigenvalues"));
    Ok(values)
}

/// Full eigendecomposition of a Hermitian matrix, values descending.
pub fn eigh(a: &CMatrix) -> Result<Spectrum, QmatError> {
    let (values, vectors) = jacobi(a, true)?;
    let v = vectors.expect("vectors requested");
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by(|&i, &j| values[j].partial_cmp(&values[i]).expect("finite"));
    let mut sorted_vals = Vec::with_capacity(n);
    let mut sorted_vecs = CMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        sorted_vals.push(values[i]);
        for r in 0..n {
            sorted_vecs[(r, k)] = v[(r, i)];
        }
    }
    Ok(Spectrum {
        values: sorted_vals,
        vectors: sorted_vecs,
    })
}

/// Principal square root of a positive semidefinite Hermitian matrix.
/// Eigenvalues in [-`floor`, 0) are clipped to zero; more negative ones are
/// an error.
pub fn sqrt_psd(a: &CMatrix, floor: f64) -> Result<CMatrix, QmatError> {
    let spec = eigh(a)?;
    let n = spec.values.len();
    let mut roots = Vec::with_capacity(n);
    for &l in &spec.values {
        if l < -floor {
            return Err(QmatError::NegativeEigenvalue {
                value: l,
                limit: floor,
            });
        }
        roots.push(l.max(0.0).sqrt());
    }
    // V * diag(sqrt(l)) * V^dag
    let mut out = CMatrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for (k, &root) in roots.iter().enumerate() {
                acc += spec.vectors[(r, k)] * root * spec.vectors[(c, k)].conj();
            }
            out[(r, c)] = acc;
        }
    }
    Ok(out)
}
