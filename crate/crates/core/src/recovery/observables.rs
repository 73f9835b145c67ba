use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::protocol::{stat_bound, TallyTable};
use crate::qstate::{JointOutcome, ProbabilityTable};

/// Which announced statistics a recovery works from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservableKind {
    /// Two qubit parties, announcements in `{10, 11}`. Outcomes with equal
    /// probability are pooled into two classes.
    TwoParty,
    /// Two qubit parties with an unknown relative axis rotation.
    Misaligned,
    /// Two qutrit parties, announcements in `{00, 21}`.
    Qudit3,
    /// Three qubit parties sharing a GHZ state, with the third party allowed
    /// to announce `00`.
    Ghz3,
    /// Three qubit parties, every party limited to `{10, 11}`.
    Ghz3LinearOptics,
}

/// A named group of joint outcomes that share one probability.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservableClass {
    pub label: String,
    pub members: Vec<JointOutcome>,
}

impl ObservableKind {
    pub fn dim(self) -> usize {
        match self {
            ObservableKind::Qudit3 => 3,
            _ => 2,
        }
    }

    pub fn parties(self) -> usize {
        match self {
            ObservableKind::Ghz3 | ObservableKind::Ghz3LinearOptics => 3,
            _ => 2,
        }
    }

    fn member_labels(self) -> Vec<Vec<&'static str>> {
        match self {
            ObservableKind::TwoParty => vec![vec!["10,10", "11,11"], vec!["10,11", "11,10"]],
            ObservableKind::Misaligned => {
                vec![vec!["10,10"], vec!["11,11"], vec!["10,11"], vec!["11,10"]]
            }
            ObservableKind::Qudit3 => vec![vec!["00,00"], vec!["21,21"], vec!["00,21"], vec!["21,00"]],
            ObservableKind::Ghz3 => vec![
                vec!["10,10,10", "10,11,11", "11,11,10", "11,10,11"],
                vec!["11,10,10", "10,11,10", "10,10,11", "11,11,11"],
                vec!["10,11,00", "11,10,00"],
                vec!["10,10,00", "11,11,00"],
            ],
            ObservableKind::Ghz3LinearOptics => vec![
                vec!["10,10,10", "10,11,11", "11,11,10", "11,10,11"],
                vec!["11,10,10", "10,11,10", "10,10,11", "11,11,11"],
            ],
        }
    }

    /// Classes in the fixed order used by every predictor.
    pub fn classes(self) -> Vec<ObservableClass> {
        self.member_labels()
            .into_iter()
            .map(|labels| ObservableClass {
                label: labels.join("|"),
                members: labels
                    .iter()
                    .map(|l| JointOutcome::parse(l, self.dim()).expect("static label"))
                    .collect(),
            })
            .collect()
    }

    pub fn labels(self) -> Vec<String> {
        self.member_labels().into_iter().map(|l| l.join("|")).collect()
    }
}

/// Observed or exact probabilities of each class of a kind, plus the number
/// of rounds behind them when they are estimates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Observables {
    kind: ObservableKind,
    values: Vec<f64>,
    rounds: Option<u64>,
}

impl Observables {
    /// `values` in the order of [`ObservableKind::classes`].
    pub fn new(kind: ObservableKind, values: Vec<f64>, rounds: Option<u64>) -> Result<Self> {
        let expected = kind.member_labels().len();
        if values.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: values.len() });
        }
        for &v in &values {
            if !v.is_finite() {
                return Err(Error::NonFinite);
            }
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::DomainError(format!("observed probability {v} outside [0, 1]")));
            }
        }
        if rounds == Some(0) {
            return Err(Error::EmptyRun);
        }
        Ok(Observables { kind, values, rounds })
    }

    /// Values keyed by class label.
    pub fn from_map(kind: ObservableKind, map: &BTreeMap<String, f64>, rounds: Option<u64>) -> Result<Self> {
        let values = kind
            .labels()
            .iter()
            .map(|l| {
                map.get(l)
                    .copied()
                    .ok_or_else(|| Error::InvalidArgument(format!("missing observable {l}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(kind, values, rounds)
    }

    /// Class means of an exact probability table.
    pub fn exact(kind: ObservableKind, table: &ProbabilityTable) -> Result<Self> {
        check_shape(kind, table.dim(), table.parties())?;
        let values = kind
            .classes()
            .iter()
            .map(|c| {
                let sum: f64 = c.members.iter().map(|m| table.get(m)).sum::<Result<f64>>()?;
                Ok(sum / c.members.len() as f64)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(kind, values, None)
    }

    /// Class means of the frequency estimates of a tally.
    pub fn from_tally(kind: ObservableKind, tally: &TallyTable) -> Result<Self> {
        let n = tally.rounds_total();
        if n == 0 {
            return Err(Error::EmptyRun);
        }
        if let Some(o) = tally.counts().keys().next() {
            check_shape(kind, o.dim(), o.parties.len())?;
        }
        let values = kind
            .classes()
            .iter()
            .map(|c| {
                let count: u64 = c.members.iter().map(|m| tally.count(m)).sum();
                count as f64 / (n as f64 * c.members.len() as f64)
            })
            .collect();
        Self::new(kind, values, Some(n))
    }

    pub fn kind(&self) -> ObservableKind {
        self.kind
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn rounds(&self) -> Option<u64> {
        self.rounds
    }

    pub fn to_map(&self) -> BTreeMap<String, f64> {
        self.kind.labels().into_iter().zip(self.values.iter().copied()).collect()
    }

    /// Acceptance tolerance per class: three binomial half widths of the
    /// pooled estimate when the values come from a finite run, otherwise a
    /// tight numerical tolerance.
    pub fn default_tolerance(&self) -> Vec<f64> {
        let classes = self.kind.classes();
        self.values
            .iter()
            .zip(&classes)
            .map(|(&v, c)| match self.rounds {
                Some(n) => {
                    let pooled = (n * c.members.len() as u64) as f64;
                    // an empty class still allows a probability of order 1/n
                    let p = v.clamp(1.0 / pooled, 1.0);
                    let hw = stat_bound(p, n).map_or(0.0, |b| b.half_width);
                    // pooling k equiprobable cells shrinks the spread by sqrt(k)
                    let hw = hw * (n as f64 / pooled).sqrt();
                    (3.0 * hw).max(1e-9)
                }
                None => 1e-9,
            })
            .collect()
    }
}

fn check_shape(kind: ObservableKind, dim: usize, parties: usize) -> Result<()> {
    if dim != kind.dim() {
        return Err(Error::DimensionMismatch { expected: kind.dim(), found: dim });
    }
    if parties != kind.parties() {
        return Err(Error::DimensionMismatch { expected: kind.parties(), found: parties });
    }
    Ok(())
}
