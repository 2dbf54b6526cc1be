//! Entropy functions, all in bits.

use super::tol::PSD_TOL;
use super::{eig, CMatrix, QState, QmatError};

/// x * log2(x) extended continuously to zero at x = 0.
pub fn xlog2(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

/// Binary entropy h(p) = -p log2 p - (1-p) log2(1-p) for p in [0,1].
///
/// Arguments a hair outside the interval (within `PSD_TOL`) are clamped;
/// anything further out is rejected.
pub fn binary_entropy(p: f64) -> Result<f64, QmatError> {
    if !(-PSD_TOL..=1.0 + PSD_TOL).contains(&p) {
        return Err(QmatError::OutOfRange(p));
    }
    let p = p.clamp(0.0, 1.0);
    Ok(-xlog2(p) - xlog2(1.0 - p))
}

/// Shannon entropy of a probability vector, clipping tiny negatives (down
/// to -`PSD_TOL`) to zero. Entries more negative than that are rejected.
pub fn shannon(probs: &[f64]) -> Result<f64, QmatError> {
    let mut h = 0.0;
    for &p in probs {
        if p < -PSD_TOL {
            return Err(QmatError::NegativeEigenvalue {
                value: p,
                limit: PSD_TOL,
            });
        }
        h -= xlog2(p.max(0.0));
    }
    Ok(h)
}

/// Von Neumann entropy S(rho) = -Tr rho log2 rho of a Hermitian matrix
/// assumed PSD up to the usual floor.
pub fn von_neumann_matrix(m: &CMatrix) -> Result<f64, QmatError> {
    let evs = eig::eigvals_hermitian(m)?;
    shannon(&evs)
}

/// Von Neumann entropy of a validated state.
pub fn von_neumann(state: &QState) -> Result<f64, QmatError> {
    von_neumann_matrix(state.matrix())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::{validate_state, C64};

    #[test]
    fn binary_entropy_reference_points() {
        let cases = [
            (0.0, 0.0),
            (1.0, 0.0),
            (0.5, 1.0),
            (0.25, 0.8112781244591328), // -0.25*log2(0.25) - 0.75*log2(0.75)
        ];
        for (p, want) in cases {
            assert!((binary_entropy(p).unwrap() - want).abs() < 1e-15, "h({p})");
        }
        assert!(binary_entropy(-0.01).is_err());
        assert!(binary_entropy(1.01).is_err());
        // boundary noise from eigensolvers is tolerated
        assert!(binary_entropy(-1e-12).unwrap() == 0.0);
    }

    #[test]
    fn shannon_matches_direct_sum() {
        let h = shannon(&[0.5, 0.25, 0.25]).unwrap();
        assert!((h - 1.5).abs() < 1e-15);
        assert!(shannon(&[0.9, -1e-12, 0.1]).unwrap() > 0.0);
        assert!(shannon(&[0.9, -1e-3]).is_err());
    }

    #[test]
    fn von_neumann_of_pure_and_maximally_mixed() {
        let mut pure = CMatrix::zeros(2, 2);
        pure[(0, 0)] = C64::new(1.0, 0.0);
        let st = validate_state(pure, vec![2], vec!["q".into()]).unwrap();
        assert!(von_neumann(&st).unwrap().abs() < 1e-12);

        let mixed = CMatrix::identity(4).scale(C64::new(0.25, 0.0));
        let st = validate_state(mixed, vec![2, 2], vec!["x".into(), "y".into()]).unwrap();
        assert!((von_neumann(&st).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn von_neumann_is_basis_independent() {
        // |+><+| is pure regardless of the off-diagonal phase
        let h = 0.5;
        let m = CMatrix::new(
            2,
            2,
            vec![
                C64::new(h, 0.0),
                C64::new(0.0, h),
                C64::new(0.0, -h),
                C64::new(h, 0.0),
            ],
        )
        .unwrap();
        let st = validate_state(m, vec![2], vec!["q".into()]).unwrap();
        assert!(von_neumann(&st).unwrap().abs() < 1e-12);
    }
}
