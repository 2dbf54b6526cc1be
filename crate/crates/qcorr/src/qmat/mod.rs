//! Dense complex matrices, kets, and validated density matrices for systems
//! of a few qubits, plus the linear-algebra primitives the correlation
//! measures are built from.
//!
//! Conventions: tensor factors are listed most-significant first, so for
//! labels `(a, b, c)` the basis index of |a b c> is `4a + 2b + c`. All
//! entropies are in bits (base-2 logarithms).

pub mod eig;
pub mod entropy;
pub mod tol;

use num_complex::Complex;
use thiserror::Error;

pub type C64 = Complex<f64>;

#[derive(Debug, Error)]
pub enum QmatError {
    #[error("matrix is {rows}x{cols}, expected square")]
    NonSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite entry at ({row},{col})")]
    NonFinite { row: usize, col: usize },
    #[error("hermitian defect {defect:.3e} exceeds {limit:.3e}")]
    HermitianDefectTooLarge { defect: f64, limit: f64 },
    #[error("trace {trace:.12} deviates from one by more than {limit:.3e}")]
    TraceNotOne { trace: f64, limit: f64 },
    #[error("eigenvalue {value:.3e} below the -{limit:.3e} floor")]
    NegativeEigenvalue { value: f64, limit: f64 },
    #[error("eigensolver did not converge within {0} sweeps")]
    NoConvergence(usize),
    #[error("value {0} outside [0,1]")]
    OutOfRange(f64),
    #[error("unknown label '{0}'")]
    UnknownLabel(String),
    #[error("keep set must be a nonempty subset of the state's labels, without repeats")]
    BadKeepSet,
    #[error("ket norm {0} deviates from one by more than {1:.3e}")]
    KetNotNormalized(f64, f64),
}

/// Dense row-major complex matrix. Entries are finite by construction; every
/// constructor rejects NaN and infinity.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self, QmatError> {
        if data.len() != rows * cols {
            return Err(QmatError::DimensionMismatch(format!(
                "{} entries for a {}x{} matrix",
                data.len(),
                rows,
                cols
            )));
        }
        let m = CMatrix { rows, cols, data };
        m.check_finite()?;
        Ok(m)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    fn check_finite(&self) -> Result<(), QmatError> {
        for r in 0..self.rows {
            for c in 0..self.cols {
                let z = self[(r, c)];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(QmatError::NonFinite { row: r, col: c });
                }
            }
        }
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn conj(&self) -> Self {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(c, r)] = self[(r, c)].conj();
            }
        }
        out
    }

    pub fn mul(&self, other: &CMatrix) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for c in 0..other.cols {
                    out[(r, c)] += a * other[(k, c)];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &CMatrix) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(x, y)| x + y)
            .collect();
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, other: &CMatrix) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(x, y)| x - y)
            .collect();
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, k: C64) -> Self {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * k).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        debug_assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Hermitian part (M + M^dag)/2 together with the largest entry removed,
    /// max_ij |(M - M^dag)/2|_ij.
    pub fn hermitize(&self) -> (Self, f64) {
        debug_assert!(self.is_square());
        let mut out = Self::zeros(self.rows, self.rows);
        let mut defect = 0.0f64;
        for r in 0..self.rows {
            for c in 0..self.cols {
                let h = (self[(r, c)] + self[(c, r)].conj()) * 0.5;
                let a = (self[(r, c)] - self[(c, r)].conj()) * 0.5;
                out[(r, c)] = h;
                defect = defect.max(a.norm());
            }
        }
        (out, defect)
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

/// Kronecker product with the left factor most significant, so
/// `kron(A, B)[(i1*rb + i2, j1*cb + j2)] = A[(i1,j1)] * B[(i2,j2)]`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(a.rows * b.rows, a.cols * b.cols);
    for i1 in 0..a.rows {
        for j1 in 0..a.cols {
            let x = a[(i1, j1)];
            if x.re == 0.0 && x.im == 0.0 {
                continue;
            }
            for i2 in 0..b.rows {
                for j2 in 0..b.cols {
                    out[(i1 * b.rows + i2, j1 * b.cols + j2)] = x * b[(i2, j2)];
                }
            }
        }
    }
    out
}

/// Pure state vector over labeled subsystems, unit norm within `TRACE_TOL`.
#[derive(Debug, Clone)]
pub struct Ket {
    amps: Vec<C64>,
    dims: Vec<usize>,
    labels: Vec<String>,
}

impl Ket {
    pub fn new(amps: Vec<C64>, dims: Vec<usize>, labels: Vec<String>) -> Result<Self, QmatError> {
        check_dims_labels(&dims, &labels)?;
        let total: usize = dims.iter().product();
        if amps.len() != total {
            return Err(QmatError::DimensionMismatch(format!(
                "{} amplitudes for dims of total {}",
                amps.len(),
                total
            )));
        }
        for (i, z) in amps.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(QmatError::NonFinite { row: i, col: 0 });
            }
        }
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > tol::TRACE_TOL {
            return Err(QmatError::KetNotNormalized(norm, tol::TRACE_TOL));
        }
        Ok(Ket { amps, dims, labels })
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Density matrix |psi><psi| as a validated state.
    pub fn to_state(&self) -> QState {
        let n = self.amps.len();
        let mut m = CMatrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                m[(r, c)] = self.amps[r] * self.amps[c].conj();
            }
        }
        // A projector built from a normalized ket passes every validation
        // check by construction.
        QState {
            mat: m,
            dims: self.dims.clone(),
            labels: self.labels.clone(),
            herm_defect: 0.0,
        }
    }
}

/// Validated density matrix: Hermitian (after hermitization), unit trace,
/// positive semidefinite up to `PSD_TOL`, with labeled tensor factors.
#[derive(Debug, Clone)]
pub struct QState {
    mat: CMatrix,
    dims: Vec<usize>,
    labels: Vec<String>,
    herm_defect: f64,
}

fn check_dims_labels(dims: &[usize], labels: &[String]) -> Result<(), QmatError> {
    if dims.is_empty() || dims.len() != labels.len() {
        return Err(QmatError::DimensionMismatch(format!(
            "{} dims vs {} labels",
            dims.len(),
            labels.len()
        )));
    }
    if dims.iter().any(|&d| d < 2) {
        return Err(QmatError::DimensionMismatch(
            "subsystem dimensions must be at least 2".into(),
        ));
    }
    for (i, l) in labels.iter().enumerate() {
        if l.is_empty() || labels[..i].contains(l) {
            return Err(QmatError::DimensionMismatch(format!(
                "labels must be nonempty and distinct, got {:?}",
                labels
            )));
        }
    }
    Ok(())
}

/// Validate a candidate density matrix and wrap it as a `QState`.
///
/// The matrix is hermitized first; the size of the removed anti-Hermitian
/// part is recorded on the state and rejected above `HERM_TOL`. Trace must
/// be one within `TRACE_TOL` and the spectrum nonnegative within `PSD_TOL`.
pub fn validate_state(
    mat: CMatrix,
    dims: Vec<usize>,
    labels: Vec<String>,
) -> Result<QState, QmatError> {
    check_dims_labels(&dims, &labels)?;
    let total: usize = dims.iter().product();
    if !mat.is_square() {
        return Err(QmatError::NonSquare {
            rows: mat.rows,
            cols: mat.cols,
        });
    }
    if mat.rows() != total {
        return Err(QmatError::DimensionMismatch(format!(
            "matrix side {} does not match dims product {}",
            mat.rows(),
            total
        )));
    }
    let (herm, defect) = mat.hermitize();
    if defect > tol::HERM_TOL {
        return Err(QmatError::HermitianDefectTooLarge {
            defect,
            limit: tol::HERM_TOL,
        });
    }
    let tr = herm.trace().re;
    if (tr - 1.0).abs() > tol::TRACE_TOL {
        return Err(QmatError::TraceNotOne {
            trace: tr,
            limit: tol::TRACE_TOL,
        });
    }
    let evs = eig::eigvals_hermitian(&herm)?;
    if let Some(&min) = evs.last() {
        if min < -tol::PSD_TOL {
            return Err(QmatError::NegativeEigenvalue {
                value: min,
                limit: tol::PSD_TOL,
            });
        }
    }
    Ok(QState {
        mat: herm,
        dims,
        labels,
        herm_defect: defect,
    })
}

impl QState {
    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn herm_defect(&self) -> f64 {
        self.herm_defect
    }

    pub fn num_subsystems(&self) -> usize {
        self.dims.len()
    }

    pub fn label_position(&self, label: &str) -> Result<usize, QmatError> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| QmatError::UnknownLabel(label.to_string()))
    }

    /// Construct without re-running validation. Only for results whose
    /// validity is guaranteed algebraically (reductions of valid states,
    /// projectors of normalized kets, convex mixes of valid states).
    pub(crate) fn trusted(mat: CMatrix, dims: Vec<usize>, labels: Vec<String>) -> QState {
        QState {
            mat,
            dims,
            labels,
            herm_defect: 0.0,
        }
    }

    /// Relabel subsystems in place order, e.g. the same matrix under new
    /// names. Lengths must match.
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<QState, QmatError> {
        check_dims_labels(&self.dims, &labels)?;
        self.labels = labels;
        Ok(self)
    }

    /// Reorder subsystems so that labels appear in `order`, permuting the
    /// underlying matrix accordingly. `order` must be a permutation of the
    /// current labels.
    pub fn permuted(&self, order: &[&str]) -> Result<QState, QmatError> {
        if order.len() != self.labels.len() {
            return Err(QmatError::BadKeepSet);
        }
        let mut pos = Vec::with_capacity(order.len());
        for l in order {
            let p = self.label_position(l)?;
            if pos.contains(&p) {
                return Err(QmatError::BadKeepSet);
            }
            pos.push(p);
        }
        let strides = strides_of(&self.dims);
        let new_dims: Vec<usize> = pos.iter().map(|&p| self.dims[p]).collect();
        let new_strides = strides_of(&new_dims);
        let total: usize = self.dims.iter().product();
        let mut map = vec![0usize; total];
        for (old, slot) in map.iter_mut().enumerate().take(total) {
            let mut new_idx = 0;
            for (k, &p) in pos.iter().enumerate() {
                let digit = (old / strides[p]) % self.dims[p];
                new_idx += digit * new_strides[k];
            }
            *slot = new_idx;
        }
        let mut m = CMatrix::zeros(total, total);
        for r in 0..total {
            for c in 0..total {
                m[(map[r], map[c])] = self.mat[(r, c)];
            }
        }
        Ok(QState {
            mat: m,
            dims: new_dims,
            labels: pos.iter().map(|&p| self.labels[p].clone()).collect(),
            herm_defect: self.herm_defect,
        })
    }

    pub fn purity(&self) -> f64 {
        self.mat.mul(&self.mat).trace().re
    }
}

fn strides_of(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

/// Partial trace keeping the subsystems named in `keep`, in their original
/// relative order. Keeping every label returns the state unchanged.
pub fn partial_trace(state: &QState, keep: &[&str]) -> Result<QState, QmatError> {
    if keep.is_empty() {
        return Err(QmatError::BadKeepSet);
    }
    let mut keep_pos = Vec::with_capacity(keep.len());
    for l in keep {
        let p = state.label_position(l)?;
        if keep_pos.contains(&p) {
            return Err(QmatError::BadKeepSet);
        }
        keep_pos.push(p);
    }
    keep_pos.sort_unstable();
    if keep_pos.len() == state.dims.len() {
        return Ok(state.clone());
    }
    let traced_pos: Vec<usize> = (0..state.dims.len())
        .filter(|p| !keep_pos.contains(p))
        .collect();
    let strides = strides_of(&state.dims);
    let kept_dims: Vec<usize> = keep_pos.iter().map(|&p| state.dims[p]).collect();
    let kept_strides = strides_of(&kept_dims);
    let dk: usize = kept_dims.iter().product();
    let dt: usize = traced_pos.iter().map(|&p| state.dims[p]).product();

    // Offset of reduced index r within the full matrix, with traced digits 0.
    let expand = |reduced: usize| -> usize {
        let mut full = 0;
        for (k, &p) in keep_pos.iter().enumerate() {
            let digit = (reduced / kept_strides[k]) % kept_dims[k];
            full += digit * strides[p];
        }
        full
    };
    // Offset contributed by traced multi-index t.
    let traced_offset = |mut t: usize| -> usize {
        let mut full = 0;
        for &p in traced_pos.iter().rev() {
            full += (t % state.dims[p]) * strides[p];
            t /= state.dims[p];
        }
        full
    };

    let mut out = CMatrix::zeros(dk, dk);
    for r in 0..dk {
        let fr = expand(r);
        for c in 0..dk {
            let fc = expand(c);
            let mut acc = C64::new(0.0, 0.0);
            for t in 0..dt {
                let off = traced_offset(t);
                acc += state.mat[(fr + off, fc + off)];
            }
            out[(r, c)] = acc;
        }
    }
    let labels = keep_pos.iter().map(|&p| state.labels[p].clone()).collect();
    Ok(QState::trusted(out, kept_dims, labels))
}

/// Trace distance (1/2)||a - b||_1 between two states on identical
/// dims/labels.
pub fn trace_distance(a: &QState, b: &QState) -> Result<f64, QmatError> {
    if a.dims != b.dims || a.labels != b.labels {
        return Err(QmatError::DimensionMismatch(
            "trace distance needs matching dims and labels".into(),
        ));
    }
    let diff = a.mat.sub(&b.mat);
    let evs = eig::eigvals_hermitian(&diff)?;
    Ok(0.5 * evs.iter().map(|l| l.abs()).sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn kron_of_paulis_matches_hand_expansion() {
        let sx = CMatrix::new(2, 2, vec![c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]).unwrap();
        let sz = CMatrix::new(2, 2, vec![c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]).unwrap();
        let k = kron(&sx, &sz);
        assert_eq!(k[(0, 2)], c(1., 0.));
        assert_eq!(k[(1, 3)], c(-1., 0.));
        assert_eq!(k[(2, 0)], c(1., 0.));
        assert_eq!(k[(3, 1)], c(-1., 0.));
        assert_eq!(k[(0, 0)], c(0., 0.));
        // trace multiplicativity
        assert_eq!(k.trace(), sx.trace() * sz.trace());
    }

    #[test]
    fn hermitize_records_small_defects() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = c(1.0, 0.0);
        m[(0, 1)] = c(0.0, 1e-13);
        m[(1, 0)] = c(0.0, 1e-13); // same sign: anti-Hermitian perturbation
        let st = validate_state(m, vec![2], vec!["a".into()]).unwrap();
        assert!(st.herm_defect() > 0.5e-13 && st.herm_defect() < 2e-13);
        assert_eq!(st.matrix()[(0, 1)], c(0.0, 0.0));
    }

    #[test]
    fn validation_rejects_bad_inputs() {
        // trace != 1
        let m = CMatrix::identity(2);
        assert!(matches!(
            validate_state(m, vec![2], vec!["a".into()]),
            Err(QmatError::TraceNotOne { .. })
        ));
        // negative eigenvalue
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = c(1.5, 0.0);
        m[(1, 1)] = c(-0.5, 0.0);
        assert!(matches!(
            validate_state(m, vec![2], vec!["a".into()]),
            Err(QmatError::NegativeEigenvalue { .. })
        ));
        // hermitian defect too large
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = c(1.0, 0.0);
        m[(0, 1)] = c(1e-3, 0.0);
        assert!(matches!(
            validate_state(m, vec![2], vec!["a".into()]),
            Err(QmatError::HermitianDefectTooLarge { .. })
        ));
        // duplicate labels
        let m = CMatrix::identity(4).scale(c(0.25, 0.0));
        assert!(validate_state(m, vec![2, 2], vec!["a".into(), "a".into()]).is_err());
    }

    #[test]
    fn partial_trace_of_product_recovers_factors() {
        // rho = diag(0.7,0.3) (x) diag(0.6,0.4) on labels (x,y)
        let mut m = CMatrix::zeros(4, 4);
        for (i, v) in [0.42, 0.28, 0.18, 0.12].iter().enumerate() {
            m[(i, i)] = c(*v, 0.0);
        }
        let st = validate_state(m, vec![2, 2], vec!["x".into(), "y".into()]).unwrap();
        let rx = partial_trace(&st, &["x"]).unwrap();
        assert!((rx.matrix()[(0, 0)].re - 0.7).abs() < 1e-14);
        assert!((rx.matrix()[(1, 1)].re - 0.3).abs() < 1e-14);
        let ry = partial_trace(&st, &["y"]).unwrap();
        assert!((ry.matrix()[(0, 0)].re - 0.6).abs() < 1e-14);
        assert_eq!(ry.labels(), &["y".to_string()]);
        // keeping everything is the identity
        let full = partial_trace(&st, &["x", "y"]).unwrap();
        assert_eq!(full.matrix(), st.matrix());
    }

    #[test]
    fn partial_trace_keeps_original_label_order() {
        // Bell pair between x and z with a spectator y in |0>.
        let mut amps = vec![c(0., 0.); 8];
        amps[0] = c(std::f64::consts::FRAC_1_SQRT_2, 0.0); // |000>
        amps[5] = c(std::f64::consts::FRAC_1_SQRT_2, 0.0); // |101>
        let ket = Ket::new(
            amps,
            vec![2, 2, 2],
            vec!["x".into(), "y".into(), "z".into()],
        )
        .unwrap();
        let st = ket.to_state();
        // order of the keep list must not matter
        let xz = partial_trace(&st, &["z", "x"]).unwrap();
        assert_eq!(xz.labels(), &["x".to_string(), "z".to_string()]);
        assert!((xz.matrix()[(0, 0)].re - 0.5).abs() < 1e-14);
        assert!((xz.matrix()[(0, 3)].re - 0.5).abs() < 1e-14);
        assert!((xz.matrix()[(3, 3)].re - 0.5).abs() < 1e-14);
    }

    #[test]
    fn trace_distance_basics() {
        let mut p0 = CMatrix::zeros(2, 2);
        p0[(0, 0)] = c(1.0, 0.0);
        let mut p1 = CMatrix::zeros(2, 2);
        p1[(1, 1)] = c(1.0, 0.0);
        let a = validate_state(p0, vec![2], vec!["q".into()]).unwrap();
        let b = validate_state(p1, vec![2], vec!["q".into()]).unwrap();
        let d = trace_distance(&a, &b).unwrap();
        assert!((d - 1.0).abs() < 1e-14);
        assert!(trace_distance(&a, &a).unwrap() < 1e-15);
    }

    #[test]
    fn permuted_swaps_tensor_factors() {
        // |01> on (x,y) becomes |10> on (y,x)
        let mut amps = vec![c(0., 0.); 4];
        amps[1] = c(1.0, 0.0);
        let st = Ket::new(amps, vec![2, 2], vec!["x".into(), "y".into()])
            .unwrap()
            .to_state();
        let sw = st.permuted(&["y", "x"]).unwrap();
        assert_eq!(sw.labels(), &["y".to_string(), "x".to_string()]);
        assert!((sw.matrix()[(2, 2)].re - 1.0).abs() < 1e-14);
    }
}
