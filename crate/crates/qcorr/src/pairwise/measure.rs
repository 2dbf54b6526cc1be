//! Projective single-qubit measurements and the conditional entropies they
//! induce on the rest of the system.
//!
//! The two-qubit path is hand-tuned: basis optimization evaluates the
//! conditional entropy thousands of times per state, so the per-call work is
//! reduced to a few complex multiplies on precomputed 2x2 blocks. The
//! general path handles any number of qubits and doubles as an independent
//! slow route for cross-checking the fast one.
//!
//! Basis convention: the projector pair is built from
//! |v0> = (cos(t/2), e^{i phi} sin(t/2)) and its orthogonal complement,
//! i.e. the +/- directions along the Bloch vector with polar angle t and
//! azimuth phi. Swapping v0 and v1 permutes the branches and leaves every
//! quantity here unchanged, so angles outside the canonical ranges are fine.

use super::Side;
use crate::qmat::entropy::xlog2;
use crate::qmat::tol::BRANCH_EPS;
use crate::qmat::{eig, CMatrix, QState, QmatError, C64};

/// Entropy contribution of one measurement branch with unnormalized 2x2
/// conditional operator of trace `p` and determinant `det`:
/// p * S(N/p) = f(p) - f(lambda+) - f(lambda-) with f(x) = x log2 x.
fn branch_contribution_2x2(p: f64, det: f64) -> f64 {
    if p <= BRANCH_EPS {
        return 0.0;
    }
    let disc = (p * p - 4.0 * det).max(0.0).sqrt();
    let hi = 0.5 * (p + disc);
    let lo = 0.5 * (p - disc);
    xlog2(p) - xlog2(hi) - xlog2(lo)
}

/// Precomputed blocks of a two-qubit density matrix for fast conditional
/// entropy evaluation under measurement of one side.
///
/// Writing B_xy for the 2x2 block of rho with measured-qubit indices (x, y)
/// and unmeasured indices free, the outcome-0 operator is
///   N0 = c^2 B00 + s^2 B11 + c s (e^{i phi} B01 + e^{-i phi} B01^dag)
/// with c = cos(t/2), s = sin(t/2), which in half-angle-free form needs only
/// (B00+B11)/2, (B00-B11)/2 and B01. N1 follows as the unmeasured reduction
/// minus N0.
pub struct TwoQubitMeasurement {
    msum: [C64; 4],
    mdiff: [C64; 4],
    b01: [C64; 4],
    unmeasured: [C64; 4],
}

impl TwoQubitMeasurement {
    /// Extract the blocks of a 4x4 two-qubit density matrix. The matrix is
    /// trusted (no validation); callers pass matrices of validated states.
    pub fn new(rho: &CMatrix, measured: Side) -> Self {
        debug_assert_eq!((rho.rows(), rho.cols()), (4, 4));
        // entry with unmeasured digits (i, j) and measured digits (x, y)
        let at = |i: usize, x: usize, j: usize, y: usize| -> C64 {
            match measured {
                Side::Second => rho[(2 * i + x, 2 * j + y)],
                Side::First => rho[(2 * x + i, 2 * y + j)],
            }
        };
        let block = |x: usize, y: usize| -> [C64; 4] {
            [
                at(0, x, 0, y),
                at(0, x, 1, y),
                at(1, x, 0, y),
                at(1, x, 1, y),
            ]
        };
        let b00 = block(0, 0);
        let b11 = block(1, 1);
        let b01 = block(0, 1);
        let mut msum = [C64::new(0.0, 0.0); 4];
        let mut mdiff = [C64::new(0.0, 0.0); 4];
        let mut unmeasured = [C64::new(0.0, 0.0); 4];
        for k in 0..4 {
            msum[k] = (b00[k] + b11[k]) * 0.5;
            mdiff[k] = (b00[k] - b11[k]) * 0.5;
            unmeasured[k] = b00[k] + b11[k];
        }
        TwoQubitMeasurement {
            msum,
            mdiff,
            b01,
            unmeasured,
        }
    }

    /// Entropy of the unmeasured qubit's reduced state, in bits.
    pub fn unmeasured_entropy(&self) -> f64 {
        let t = self.unmeasured[0].re + self.unmeasured[3].re;
        let det = self.unmeasured[0].re * self.unmeasured[3].re - self.unmeasured[1].norm_sqr();
        // f(t) vanishes for unit trace; keeping it makes the value exact
        // when the trace carries rounding noise.
        branch_contribution_2x2(t, det)
    }

    /// Average post-measurement entropy of the unmeasured qubit when the
    /// other is measured along Bloch direction (theta, phi), in bits.
    pub fn conditional_entropy(&self, theta: f64, phi: f64) -> f64 {
        let (st, ct) = theta.sin_cos();
        let w = C64::from_polar(1.0, phi);
        let n00 = self.msum[0].re + ct * self.mdiff[0].re + st * (w * self.b01[0]).re;
        let n11 = self.msum[3].re + ct * self.mdiff[3].re + st * (w * self.b01[3]).re;
        let n01 = self.msum[1]
            + self.mdiff[1] * ct
            + (w * self.b01[1] + (w * self.b01[2]).conj()) * (0.5 * st);
        let p0 = n00 + n11;
        let det0 = n00 * n11 - n01.norm_sqr();

        let m00 = self.unmeasured[0].re - n00;
        let m11 = self.unmeasured[3].re - n11;
        let m01 = self.unmeasured[1] - n01;
        let p1 = m00 + m11;
        let det1 = m00 * m11 - m01.norm_sqr();

        branch_contribution_2x2(p0, det0) + branch_contribution_2x2(p1, det1)
    }
}

/// Unnormalized post-measurement operators on the unmeasured subsystems
/// after projecting the qubit `measured_label` along (theta, phi). The trace
/// of each operator is the outcome probability; the two traces sum to one.
pub fn branch_operators(
    state: &QState,
    measured_label: &str,
    theta: f64,
    phi: f64,
) -> Result<[(f64, CMatrix); 2], QmatError> {
    let pos = state.label_position(measured_label)?;
    if state.dims()[pos] != 2 {
        return Err(QmatError::DimensionMismatch(format!(
            "projective qubit measurement needs a two-dimensional target, '{}' has dimension {}",
            measured_label,
            state.dims()[pos]
        )));
    }
    let dims = state.dims();
    let n = dims.len();
    let mut strides = vec![1usize; n];
    for i in (0..n - 1).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let sp = strides[pos];
    let kept: Vec<usize> = (0..n).filter(|&i| i != pos).collect();
    let kept_dims: Vec<usize> = kept.iter().map(|&i| dims[i]).collect();
    let dk: usize = kept_dims.iter().product();
    // reduced index -> full offset with the measured digit set to zero
    let expand = |reduced: usize| -> usize {
        let mut rem = reduced;
        let mut full = 0;
        for &i in kept.iter().rev() {
            full += (rem % dims[i]) * strides[i];
            rem /= dims[i];
        }
        full
    };
    let offsets: Vec<usize> = (0..dk).map(expand).collect();

    let half = 0.5 * theta;
    let kets = [
        [C64::new(half.cos(), 0.0), C64::from_polar(half.sin(), phi)],
        [C64::new(half.sin(), 0.0), -C64::from_polar(half.cos(), phi)],
    ];
    let rho = state.matrix();
    let mut out = Vec::with_capacity(2);
    for ket in &kets {
        let mut m = CMatrix::zeros(dk, dk);
        for r in 0..dk {
            for c in 0..dk {
                let mut acc = C64::new(0.0, 0.0);
                for x in 0..2 {
                    for y in 0..2 {
                        acc += ket[x].conj()
                            * ket[y]
                            * rho[(offsets[r] + x * sp, offsets[c] + y * sp)];
                    }
                }
                m[(r, c)] = acc;
            }
        }
        let p = m.trace().re;
        out.push((p, m));
    }
    let b1 = out.pop().expect("two branches");
    let b0 = out.pop().expect("two branches");
    Ok([b0, b1])
}

/// Average post-measurement entropy of everything except the measured qubit,
/// for states of any size. Matches `TwoQubitMeasurement::conditional_entropy`
/// on two-qubit inputs.
pub fn conditional_entropy_general(
    state: &QState,
    measured_label: &str,
    theta: f64,
    phi: f64,
) -> Result<f64, QmatError> {
    let branches = branch_operators(state, measured_label, theta, phi)?;
    let mut h = 0.0;
    for (p, m) in &branches {
        if *p <= BRANCH_EPS {
            continue;
        }
        let (herm, _) = m.hermitize();
        let evs = eig::eigvals_hermitian(&herm)?;
        h += xlog2(*p) - evs.iter().map(|&l| xlog2(l.max(0.0))).sum::<f64>();
    }
    Ok(h)
}
