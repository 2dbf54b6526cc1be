//! Correlation measures for a pair of qubits: mutual information,
//! measurement-based classical correlation, quantum discord, concurrence,
//! and entanglement of formation. Everything is in bits.

pub mod measure;
pub mod optimize;

use measure::TwoQubitMeasurement;
pub use optimize::{OptimizerFailure, OptimizerSettings};
use serde::Serialize;
use std::f64::consts::{PI, TAU};
use thiserror::Error;

use crate::qmat::entropy::{binary_entropy, von_neumann};
use crate::qmat::tol::{DISCORD_CLAMP, PSD_TOL};
use crate::qmat::{eig, kron, partial_trace, CMatrix, Ket, QState, QmatError, C64};

#[derive(Debug, Error)]
pub enum PairwiseError {
    #[error("expected a two-qubit state, got dims {0:?}")]
    NotTwoQubits(Vec<usize>),
    #[error("expected a bipartite state, got {0} subsystems")]
    NotBipartite(usize),
    #[error("classical correlation {j:.12} exceeds mutual information {i:.12} beyond rounding")]
    ClassicalExceedsMutual { j: f64, i: f64 },
    #[error("expected a pure three-qubit state, got dims {0:?}")]
    NotThreeQubitsPure(Vec<usize>),
    #[error("the two named qubits must be distinct")]
    SameQubitTwice,
    #[error(transparent)]
    Optimizer(#[from] OptimizerFailure),
    #[error(transparent)]
    Qmat(#[from] QmatError),
}

/// Which tensor factor of a two-qubit state the measurement acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    First,
    Second,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::First => Side::Second,
            Side::Second => Side::First,
        }
    }
}

/// Measurement direction on the Bloch sphere, canonicalized to
/// theta in [0, pi] and phi in [0, 2pi).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BlochBasis {
    pub theta: f64,
    pub phi: f64,
}

impl BlochBasis {
    /// Fold arbitrary angles onto the canonical ranges; (theta, phi) and
    /// (2pi - theta, phi + pi) describe the same direction.
    pub fn normalized(theta: f64, phi: f64) -> Self {
        let mut t = theta.rem_euclid(TAU);
        let mut p = phi;
        if t > PI {
            t = TAU - t;
            p += PI;
        }
        let p = p.rem_euclid(TAU);
        BlochBasis { theta: t, phi: p }
    }
}

fn require_two_qubits(state: &QState) -> Result<(), PairwiseError> {
    if state.dims() != [2, 2] {
        return Err(PairwiseError::NotTwoQubits(state.dims().to_vec()));
    }
    Ok(())
}

/// Subsystem entropies of a bipartite state: S(first), S(second), S(joint).
pub fn subsystem_entropies(state: &QState) -> Result<(f64, f64, f64), PairwiseError> {
    if state.num_subsystems() != 2 {
        return Err(PairwiseError::NotBipartite(state.num_subsystems()));
    }
    let first = state.labels()[0].clone();
    let second = state.labels()[1].clone();
    let s1 = von_neumann(&partial_trace(state, &[&first])?)?;
    let s2 = von_neumann(&partial_trace(state, &[&second])?)?;
    let s12 = von_neumann(state)?;
    Ok((s1, s2, s12))
}

/// Quantum mutual information I = S(first) + S(second) - S(joint) of a
/// bipartite state.
pub fn mutual_information(state: &QState) -> Result<f64, PairwiseError> {
    let (s1, s2, s12) = subsystem_entropies(state)?;
    Ok(s1 + s2 - s12)
}

/// Classical correlation extracted by the best projective measurement on
/// one side, with the minimizing basis and the optimizer's evaluation count.
#[derive(Debug, Clone, Serialize)]
pub struct ClassicalCorrelation {
    pub value: f64,
    pub measured: Side,
    pub basis: BlochBasis,
    pub evaluations: usize,
}

/// J(state | measured side) = S(unmeasured) - min over bases of the average
/// post-measurement entropy of the unmeasured qubit.
pub fn classical_correlation(
    state: &QState,
    measured: Side,
    settings: &OptimizerSettings,
) -> Result<ClassicalCorrelation, PairwiseError> {
    require_two_qubits(state)?;
    let ctx = TwoQubitMeasurement::new(state.matrix(), measured);
    let s_unmeasured = ctx.unmeasured_entropy();
    let out = optimize::minimize_over_bases(|t, p| ctx.conditional_entropy(t, p), settings)?;
    // concavity of entropy makes the true value nonnegative; rounding can
    // leave a stray -1e-16
    let value = (s_unmeasured - out.value).max(0.0);
    Ok(ClassicalCorrelation {
        value,
        measured,
        basis: BlochBasis::normalized(out.theta, out.phi),
        evaluations: out.evaluations,
    })
}

/// Discord of a two-qubit state for a fixed measured side, together with
/// the ingredients it is built from.
#[derive(Debug, Clone, Serialize)]
pub struct Discord {
    pub mutual_information: f64,
    pub classical: f64,
    pub discord: f64,
    pub measured: Side,
    pub basis: BlochBasis,
    pub evaluations: usize,
}

/// D = I - J for the given measured side. J may exceed I by rounding noise,
/// in which case it is clamped so that D is exactly zero; an excess beyond
/// the clamp window means a real inconsistency and is an error.
pub fn quantum_discord(
    state: &QState,
    measured: Side,
    settings: &OptimizerSettings,
) -> Result<Discord, PairwiseError> {
    let i = mutual_information(state)?;
    let cc = classical_correlation(state, measured, settings)?;
    if cc.value - i > DISCORD_CLAMP {
        return Err(PairwiseError::ClassicalExceedsMutual { j: cc.value, i });
    }
    let classical = cc.value.min(i);
    Ok(Discord {
        mutual_information: i,
        classical,
        discord: i - classical,
        measured,
        basis: cc.basis,
        evaluations: cc.evaluations,
    })
}

fn sigma_y_pair() -> CMatrix {
    let sy = CMatrix::new(
        2,
        2,
        vec![
            C64::new(0.0, 0.0),
            C64::new(0.0, -1.0),
            C64::new(0.0, 1.0),
            C64::new(0.0, 0.0),
        ],
    )
    .expect("fixed 2x2");
    kron(&sy, &sy)
}

/// Concurrence of a two-qubit state.
///
/// With the spin-flipped companion R = (sy x sy) conj(rho) (sy x sy), the
/// nonzero spectrum of rho R matches that of the Hermitian PSD matrix
/// sqrt(rho) R sqrt(rho), so the usual square-rooted eigenvalues come out of
/// the Hermitian eigensolver: C = max(0, l1 - l2 - l3 - l4), descending.
pub fn concurrence(state: &QState) -> Result<f64, PairwiseError> {
    require_two_qubits(state)?;
    let rho = state.matrix();
    let syy = sigma_y_pair();
    let flipped = syy.mul(&rho.conj()).mul(&syy);
    let root = eig::sqrt_psd(rho, PSD_TOL)?;
    let (m, _) = root.mul(&flipped).mul(&root).hermitize();
    let evs = eig::eigvals_hermitian(&m)?;
    let l: Vec<f64> = evs.iter().map(|&e| e.max(0.0).sqrt()).collect();
    Ok((l[0] - l[1] - l[2] - l[3]).max(0.0))
}

/// Entanglement of formation as a function of concurrence:
/// E = h((1 + sqrt(1 - C^2)) / 2) with h the binary entropy.
pub fn eof_from_concurrence(c: f64) -> Result<f64, QmatError> {
    if !(0.0..=1.0 + PSD_TOL).contains(&c) {
        return Err(QmatError::OutOfRange(c));
    }
    let c = c.min(1.0);
    binary_entropy(0.5 * (1.0 + (1.0 - c * c).sqrt()))
}

/// Entanglement of formation of a two-qubit state.
pub fn entanglement_of_formation(state: &QState) -> Result<f64, PairwiseError> {
    Ok(eof_from_concurrence(concurrence(state)?)?)
}

/// Everything the pairwise measures produce for one two-qubit state, with
/// the measurement-based quantities evaluated for both choices of side.
#[derive(Debug, Clone, Serialize)]
pub struct PairwiseReport {
    pub labels: (String, String),
    pub entropy_first: f64,
    pub entropy_second: f64,
    pub entropy_joint: f64,
    pub mutual_information: f64,
    pub measured_first: Discord,
    pub measured_second: Discord,
    pub concurrence: f64,
    pub entanglement_of_formation: f64,
}

pub fn pairwise_report(
    state: &QState,
    settings: &OptimizerSettings,
) -> Result<PairwiseReport, PairwiseError> {
    require_two_qubits(state)?;
    let (s1, s2, s12) = subsystem_entropies(state)?;
    let measured_first = quantum_discord(state, Side::First, settings)?;
    let measured_second = quantum_discord(state, Side::Second, settings)?;
    let c = concurrence(state)?;
    Ok(PairwiseReport {
        labels: (state.labels()[0].clone(), state.labels()[1].clone()),
        entropy_first: s1,
        entropy_second: s2,
        entropy_joint: s12,
        mutual_information: measured_first.mutual_information,
        measured_first,
        measured_second,
        concurrence: c,
        entanglement_of_formation: eof_from_concurrence(c)?,
    })
}

/// Monogamy residual for a pure three-qubit state: discord of the (x, y)
/// pair measured on x, minus the bookkeeping S_x - S_z + E(y, z) it must
/// equal, z being the remaining qubit. Zero up to optimizer resolution;
/// anything beyond ~1e-4 means the discord minimization or the
/// entanglement of formation is off.
pub fn koashi_winter_residual(
    psi: &Ket,
    x: &str,
    y: &str,
    settings: &OptimizerSettings,
) -> Result<f64, PairwiseError> {
    let full = psi.to_state();
    if full.dims() != [2, 2, 2] {
        return Err(PairwiseError::NotThreeQubitsPure(full.dims().to_vec()));
    }
    if x == y {
        return Err(PairwiseError::SameQubitTwice);
    }
    let pos_x = full.label_position(x)?;
    let pos_y = full.label_position(y)?;
    let z = full.labels()[3 - pos_x - pos_y].clone();

    let rho_xy = partial_trace(&full, &[x, y])?;
    // the reduction keeps original subsystem order, so locate x within it
    let side_of_x = if rho_xy.labels()[0] == x {
        Side::First
    } else {
        Side::Second
    };
    let d = quantum_discord(&rho_xy, side_of_x, settings)?.discord;

    let s_x = von_neumann(&partial_trace(&full, &[x])?)?;
    let s_z = von_neumann(&partial_trace(&full, &[&z])?)?;
    let e_yz = entanglement_of_formation(&partial_trace(&full, &[y, &z])?)?;
    Ok(d - (s_x - s_z + e_yz))
}
