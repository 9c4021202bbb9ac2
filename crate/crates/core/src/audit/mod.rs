//! Executable checks of the security and correctness claims.
//!
//! Obliviousness is checked as exact equality under seed control: the
//! communication check compares transcripts, the computation check access
//! traces. Each check has a negative control that must fail.

mod comm;
mod comp;
pub mod oracle;
mod probe;

pub use comm::{check_comm_oblivious, CommOperator, SizeProfile};
pub use comp::{check_comp_oblivious, Primitive};
pub use oracle::oracle_join;
pub use probe::{failure_probe, ProbeConfig, ProbeOutcome, SlackMode};

use crate::cluster::Divergence;
use crate::oprims::Access;
use serde::{Deserialize, Serialize};

/// What a transcript was compared against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reference {
    FirstTrial,
    Simulator,
}

/// First evidence of a failed check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    Transcript {
        trial: usize,
        against: Reference,
        divergence: Divergence,
    },
    Trace {
        trial: usize,
        entry: usize,
        left: Option<Access>,
        right: Option<Access>,
    },
    Error {
        trial: usize,
        message: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditVerdict {
    pub check_id: String,
    pub passed: bool,
    /// Always present on failure.
    pub witness: Option<Witness>,
    pub trials: usize,
}

impl AuditVerdict {
    fn pass(check_id: &str, trials: usize) -> Self {
        AuditVerdict {
            check_id: check_id.to_string(),
            passed: true,
            witness: None,
            trials,
        }
    }

    fn fail(check_id: &str, trials: usize, witness: Witness) -> Self {
        AuditVerdict {
            check_id: check_id.to_string(),
            passed: false,
            witness: Some(witness),
            trials,
        }
    }
}
