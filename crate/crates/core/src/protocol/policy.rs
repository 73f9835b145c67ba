use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::qstate::{BellOutcome, JointOutcome};

/// Which outcomes each party announces publicly.
///
/// A round is recorded only when every party announces. With
/// `conditional_last` set, the designated last announcer speaks only after
/// all others have spoken.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnouncementPolicy {
    announceable: Vec<BTreeSet<BellOutcome>>,
    last_announcer: Option<usize>,
    conditional_last: bool,
}

fn outcome_set(dim: usize, pairs: &[(usize, usize)]) -> BTreeSet<BellOutcome> {
    pairs
        .iter()
        .map(|&(i, j)| BellOutcome::new(dim, i, j).expect("static outcome is valid"))
        .collect()
}

impl AnnouncementPolicy {
    pub fn new(
        announceable: Vec<BTreeSet<BellOutcome>>,
        last_announcer: Option<usize>,
        conditional_last: bool,
    ) -> Result<Self> {
        let dim = announceable
            .iter()
            .flatten()
            .map(|o| o.dim)
            .next()
            .ok_or_else(|| Error::InvalidArgument("policy announces nothing".into()))?;
        if let Some(bad) = announceable.iter().flatten().find(|o| o.dim != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: bad.dim });
        }
        if let Some(last) = last_announcer {
            if last >= announceable.len() {
                return Err(Error::IndexOutOfRange { index: last, dim: announceable.len() });
            }
        }
        Ok(AnnouncementPolicy { announceable, last_announcer, conditional_last })
    }

    /// Every party announces only `Phi_10` or `Phi_11`, the two qubit Bell
    /// states a linear-optical analyser separates unambiguously.
    pub fn linear_optics(parties: usize) -> Self {
        AnnouncementPolicy {
            announceable: vec![outcome_set(2, &[(1, 0), (1, 1)]); parties],
            last_announcer: None,
            conditional_last: false,
        }
    }

    /// Qutrit pair announcing only `Phi_00` or `Phi_21`.
    pub fn qudit3() -> Self {
        AnnouncementPolicy {
            announceable: vec![outcome_set(3, &[(0, 0), (2, 1)]); 2],
            last_announcer: None,
            conditional_last: false,
        }
    }

    /// Three GHZ parties: the first two announce `Phi_10`/`Phi_11`; the third
    /// speaks last, only after both others did, and also announces `Phi_00`.
    pub fn ghz3_last_announcer() -> Self {
        let first = outcome_set(2, &[(1, 0), (1, 1)]);
        let last = outcome_set(2, &[(1, 0), (1, 1), (0, 0)]);
        AnnouncementPolicy {
            announceable: vec![first.clone(), first, last],
            last_announcer: Some(2),
            conditional_last: true,
        }
    }

    pub fn parties(&self) -> usize {
        self.announceable.len()
    }

    pub fn dim(&self) -> usize {
        self.announceable.iter().flatten().map(|o| o.dim).next().unwrap_or(2)
    }

    pub fn announceable(&self, party: usize) -> &BTreeSet<BellOutcome> {
        &self.announceable[party]
    }

    /// What each party says publicly for this outcome (`None` = silent).
    pub fn announcements(&self, outcome: &JointOutcome) -> Result<Vec<Option<BellOutcome>>> {
        if outcome.parties.len() != self.parties() {
            return Err(Error::DimensionMismatch {
                expected: self.parties(),
                found: outcome.parties.len(),
            });
        }
        if outcome.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: outcome.dim() });
        }
        let mut said: Vec<Option<BellOutcome>> = outcome
            .parties
            .iter()
            .zip(&self.announceable)
            .map(|(o, set)| set.contains(o).then_some(*o))
            .collect();
        if let (Some(last), true) = (self.last_announcer, self.conditional_last) {
            let others_spoke = said.iter().enumerate().all(|(k, s)| k == last || s.is_some());
            if !others_spoke {
                said[last] = None;
            }
        }
        Ok(said)
    }

    pub fn records(&self, outcome: &JointOutcome) -> Result<bool> {
        Ok(self.announcements(outcome)?.iter().all(Option::is_some))
    }
}

pub fn apply_policy(outcome: &JointOutcome, policy: &AnnouncementPolicy) -> Result<bool> {
    policy.records(outcome)
}
