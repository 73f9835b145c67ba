use std::collections::BTreeMap;

use serde::Serialize;

use super::exchange::TallyTable;
use crate::error::{Error, Result};
use crate::qstate::JointOutcome;

/// Frequency estimates `count / rounds_total` for every recorded outcome.
/// Discarded rounds stay in the denominator: they still used up a shared
/// pair.
pub fn estimate(tally: &TallyTable) -> Result<BTreeMap<JointOutcome, f64>> {
    if tally.rounds_total() == 0 {
        return Err(Error::EmptyRun);
    }
    let n = tally.rounds_total() as f64;
    Ok(tally.counts().iter().map(|(o, &c)| (o.clone(), c as f64 / n)).collect())
}

/// Binomial spread of a frequency estimate after `n` rounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StatBound {
    pub p: f64,
    pub n: u64,
    /// `sqrt(2 n p (1 - p)) / n`
    pub half_width: f64,
    /// `1 / sqrt(n)`
    pub coarse: f64,
}

impl StatBound {
    pub fn contains(&self, estimate: f64) -> bool {
        (estimate - self.p).abs() <= self.half_width
    }
}

pub fn stat_bound(p: f64, n: u64) -> Result<StatBound> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::DomainError(format!("probability {p} outside [0, 1]")));
    }
    if n == 0 {
        return Err(Error::DomainError("bound needs at least one round".into()));
    }
    let nf = n as f64;
    Ok(StatBound {
        p,
        n,
        half_width: (2.0 * nf * p * (1.0 - p)).sqrt() / nf,
        coarse: 1.0 / nf.sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn outcome(label: &str) -> JointOutcome {
        JointOutcome::parse(label, 2).unwrap()
    }

    #[test]
    fn estimate_divides_by_all_rounds() {
        let counts = BTreeMap::from([(outcome("10,10"), 50)]);
        let tally = TallyTable::new(400, counts, 350).unwrap();
        let est = estimate(&tally).unwrap();
        assert_eq!(est[&outcome("10,10")], 0.125);
    }

    #[test]
    fn all_discarded() {
        let tally = TallyTable::new(30, BTreeMap::new(), 30).unwrap();
        assert!(estimate(&tally).unwrap().is_empty());
        assert_eq!(tally.discarded(), 30);
    }

    #[test]
    fn empty_run_rejected() {
        let tally = TallyTable::new(0, BTreeMap::new(), 0).unwrap();
        assert_eq!(estimate(&tally), Err(Error::EmptyRun));
    }

    #[test]
    fn inconsistent_tally_rejected() {
        assert!(TallyTable::new(10, BTreeMap::from([(outcome("10,10"), 3)]), 3).is_err());
    }

    #[test]
    fn bound_examples() {
        let b = stat_bound(0.125, 400).unwrap();
        assert!((b.half_width - 0.023385).abs() < 1e-5, "{}", b.half_width);
        assert_eq!(stat_bound(0.0, 17).unwrap().half_width, 0.0);
        assert_eq!(stat_bound(1.0, 17).unwrap().half_width, 0.0);
        let b = stat_bound(0.5, 100).unwrap();
        assert!((b.half_width - 50f64.sqrt() / 100.0).abs() < 1e-15);
        assert!((b.coarse - 0.1).abs() < 1e-15);
        assert!(stat_bound(1.5, 10).is_err());
        assert!(stat_bound(0.5, 0).is_err());
    }
}
