//! Exit-code policy. Usage and input problems exit 2, structural
//! failures exit 1, file I/O problems exit 3. Structural means a
//! mathematical invariant broke or a construction property that holds by
//! algebra failed to hold numerically; those are the failures this tool
//! exists to surface, so they get the conventional "job failed" code.

use qcorr::discovery::DiscoveryError;
use qcorr::pairwise::PairwiseError;
use qcorr::qmat::QmatError;
use qcorr::states::StateError;
use qcorr::tripartite::TripartiteError;
use std::fmt;

#[derive(Debug)]
pub enum CliError {
    Structural(String),
    Usage(String),
    Io(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Structural(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Structural(m) | CliError::Usage(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

/// Join an error with its sources, outermost first. Transparent wrappers
/// already forward to their inner error, so nothing prints twice.
fn chain_text(e: &(dyn std::error::Error + 'static)) -> String {
    let mut msg = e.to_string();
    let mut src = e.source();
    while let Some(s) = src {
        let part = s.to_string();
        if !msg.contains(&part) {
            msg.push_str(": ");
            msg.push_str(&part);
        }
        src = s.source();
    }
    msg
}

pub fn from_state(e: StateError, context: &str) -> CliError {
    let msg = format!("{context}: {}", chain_text(&e));
    match e {
        StateError::Io(_) => CliError::Io(msg),
        _ => CliError::Usage(msg),
    }
}

pub fn from_qmat(e: QmatError) -> CliError {
    match e {
        QmatError::NoConvergence(_) => CliError::Structural(chain_text(&e)),
        _ => CliError::Usage(chain_text(&e)),
    }
}

pub fn from_pairwise(e: PairwiseError) -> CliError {
    match e {
        PairwiseError::ClassicalExceedsMutual { .. } | PairwiseError::Optimizer(_) => {
            CliError::Structural(chain_text(&e))
        }
        PairwiseError::Qmat(q) => from_qmat(q),
        _ => CliError::Usage(chain_text(&e)),
    }
}

pub fn from_tripartite(e: TripartiteError) -> CliError {
    match e {
        TripartiteError::CutMismatch { .. } | TripartiteError::GapMismatch { .. } => {
            CliError::Structural(chain_text(&e))
        }
        TripartiteError::Pairwise(p) => from_pairwise(p),
        TripartiteError::Qmat(q) => from_qmat(q),
        TripartiteError::State(s) => from_state(s, "state"),
        _ => CliError::Usage(chain_text(&e)),
    }
}

pub fn from_discovery(e: DiscoveryError) -> CliError {
    match e {
        DiscoveryError::InvalidSpec(_) => CliError::Usage(chain_text(&e)),
        DiscoveryError::ReplayMismatch { .. } => CliError::Structural(chain_text(&e)),
        DiscoveryError::Tripartite(t) => from_tripartite(t),
        DiscoveryError::Pairwise(p) => from_pairwise(p),
        DiscoveryError::State(s) => from_state(s, "state"),
    }
}
