//! Tester outcomes: accept/reject with rejection provenance and query counts.

use serde::{Deserialize, Serialize};

/// Accept or reject.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Accept,
    Reject,
}

/// Which internal check fired a rejection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "site", rename_all = "snake_case")]
pub enum RejectSite {
    /// A characterization sub-test: outer loop index `j`, inner index `t`
    /// (`None` for the per-`j` diagonal test), and which of the two
    /// variance pairings fired.
    CharTest { j: u32, t: Option<u32>, pairing: u8 },
    /// Two self-correction samples disagreed inside the small ball.
    InBallGap,
    /// The main loop found f(p) inconsistent with the corrected value.
    MainMismatch,
    /// One of the three additivity checks (1 = symmetry, 2 = difference,
    /// 3 = triangle).
    AdditivityCheck { check: u8 },
    /// The additivity self-correction samples disagreed.
    AdditivityGap,
}

impl std::fmt::Display for RejectSite {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RejectSite::CharTest { j, t, pairing } => match t {
                Some(t) => write!(f, "char_test(j={j},t={t},pairing={pairing})"),
                None => write!(f, "char_test(j={j},diag)"),
            },
            RejectSite::InBallGap => write!(f, "in_ball_gap"),
            RejectSite::MainMismatch => write!(f, "main_mismatch"),
            RejectSite::AdditivityCheck { check } => write!(f, "additivity_check_{check}"),
            RejectSite::AdditivityGap => write!(f, "additivity_gap"),
        }
    }
}

/// The offending sample and statistic behind a rejection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    /// Human-readable rendering of the sample tuple.
    pub sample: String,
    /// The statistic value that violated the check.
    pub statistic: f64,
}

/// Outcome of one tester invocation.
///
/// Invariant: a `Reject` carries a site and witness; an `Accept` carries
/// neither.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub decision: Decision,
    pub reject_site: Option<RejectSite>,
    pub witness: Option<Witness>,
    pub queries_used: u64,
}

impl Verdict {
    pub fn accept(queries_used: u64) -> Verdict {
        Verdict {
            decision: Decision::Accept,
            reject_site: None,
            witness: None,
            queries_used,
        }
    }

    pub fn reject(site: RejectSite, witness: Witness, queries_used: u64) -> Verdict {
        Verdict {
            decision: Decision::Reject,
            reject_site: Some(site),
            witness: Some(witness),
            queries_used,
        }
    }

    pub fn is_accept(&self) -> bool {
        self.decision == Decision::Accept
    }

    /// CSV rendering of the rejection site ("-" when accepting).
    pub fn site_label(&self) -> String {
        self.reject_site
            .as_ref()
            .map(|s| s.to_string())
            .unwrap_or_else(|| "-".into())
    }
}
