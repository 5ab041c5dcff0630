//! Invariant verdicts shared by all solver traces, and a tagged container so
//! a trace file can be replayed without knowing which solver wrote it.

use serde::{Deserialize, Serialize};

use crate::dl::{DlDoubleGreedyTrace, MatroidGreedyTrace};
use crate::numeric::Comparison;
use crate::smbil::DoubleGreedyTrace;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    /// 1-based step index; 0 for whole-trace conditions.
    pub step: usize,
    pub invariant: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TraceVerdict {
    pub steps_checked: usize,
    pub violations: Vec<Violation>,
}

impl TraceVerdict {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub(crate) fn push(&mut self, step: usize, invariant: &str, detail: String) {
        self.violations.push(Violation { step, invariant: invariant.into(), detail });
    }

    /// First violation of the named invariant, if any.
    pub fn first(&self, invariant: &str) -> Option<&Violation> {
        self.violations.iter().find(|v| v.invariant == invariant)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "trace", rename_all = "snake_case")]
pub enum AnyTrace {
    Smbil(DoubleGreedyTrace),
    MatroidGreedy(MatroidGreedyTrace),
    DlDoubleGreedy(DlDoubleGreedyTrace),
}

impl AnyTrace {
    pub fn validate(&self, cmp: Comparison) -> TraceVerdict {
        match self {
            AnyTrace::Smbil(t) => t.validate(cmp),
            AnyTrace::MatroidGreedy(t) => t.validate(cmp),
            AnyTrace::DlDoubleGreedy(t) => t.validate(cmp),
        }
    }
}
