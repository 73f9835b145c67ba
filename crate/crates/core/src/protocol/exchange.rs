use std::collections::BTreeMap;

use rand::Rng;

use super::policy::AnnouncementPolicy;
use crate::error::{Error, Result};
use crate::qstate::{
    ghz_coeffs, misaligned_coeffs, prob_table, two_party_coeffs, AlignmentAngle, CoeffTable,
    JointOutcome, ProbabilityTable, QuditState,
};

/// The four sharing arrangements the exchange can run in.
#[derive(Debug, Clone, PartialEq)]
pub enum Scenario {
    /// Two qubit parties sharing `|Phi_00>`.
    TwoParty { a: QuditState, b: QuditState },
    /// Two qudit parties sharing the `d`-level `|Phi_00>`.
    Qudit { a: QuditState, b: QuditState },
    /// `N` qubit parties sharing a GHZ state.
    Ghz { states: Vec<QuditState> },
    /// Two qubit parties whose reference axes differ by `theta`.
    Misaligned { a: QuditState, b: QuditState, theta: AlignmentAngle },
}

impl Scenario {
    pub fn coeffs(&self) -> Result<CoeffTable> {
        match self {
            Scenario::TwoParty { a, b } => {
                if a.dim() != 2 {
                    return Err(Error::DimensionMismatch { expected: 2, found: a.dim() });
                }
                two_party_coeffs(a, b)
            }
            Scenario::Qudit { a, b } => two_party_coeffs(a, b),
            Scenario::Ghz { states } => ghz_coeffs(states),
            Scenario::Misaligned { a, b, theta } => misaligned_coeffs(a, b, *theta),
        }
    }

    pub fn prob_table(&self) -> Result<ProbabilityTable> {
        Ok(prob_table(&self.coeffs()?))
    }
}

/// Inverse-CDF sampler over a fixed probability table.
#[derive(Debug, Clone)]
pub struct OutcomeSampler {
    dim: usize,
    parties: usize,
    cumulative: Vec<f64>,
    last_positive: usize,
}

impl OutcomeSampler {
    pub fn new(table: &ProbabilityTable) -> Self {
        let mut acc = 0.0;
        let cumulative: Vec<f64> = table
            .entries()
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        let last_positive = table.entries().iter().rposition(|&p| p > 0.0).unwrap_or(0);
        OutcomeSampler { dim: table.dim(), parties: table.parties(), cumulative, last_positive }
    }

    /// Draws one flat outcome index, consuming exactly one `f64`.
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let k = self.cumulative.partition_point(|&c| c <= u);
        // u can land past the last partial sum when the table sums to 1 - eps
        k.min(self.last_positive)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> JointOutcome {
        JointOutcome::from_flat_index(self.dim, self.parties, self.sample_index(rng))
    }
}

/// One joint Bell measurement round drawn from `table`.
pub fn sample_round<R: Rng + ?Sized>(table: &ProbabilityTable, rng: &mut R) -> JointOutcome {
    OutcomeSampler::new(table).sample(rng)
}

/// Counts of fully announced joint outcomes over a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TallyTable {
    rounds_total: u64,
    counts: BTreeMap<JointOutcome, u64>,
    discarded: u64,
}

impl TallyTable {
    pub fn new(rounds_total: u64, counts: BTreeMap<JointOutcome, u64>, discarded: u64) -> Result<Self> {
        let recorded: u64 = counts.values().sum();
        if recorded + discarded != rounds_total {
            return Err(Error::DomainError(format!(
                "tally of {recorded} recorded + {discarded} discarded != {rounds_total} rounds"
            )));
        }
        Ok(TallyTable { rounds_total, counts, discarded })
    }

    pub fn rounds_total(&self) -> u64 {
        self.rounds_total
    }

    pub fn discarded(&self) -> u64 {
        self.discarded
    }

    pub fn counts(&self) -> &BTreeMap<JointOutcome, u64> {
        &self.counts
    }

    pub fn count(&self, outcome: &JointOutcome) -> u64 {
        self.counts.get(outcome).copied().unwrap_or(0)
    }

    pub fn counts_by_label(&self) -> BTreeMap<String, u64> {
        self.counts.iter().map(|(o, &n)| (o.label(), n)).collect()
    }
}

/// Runs `rounds` independent measurement rounds and tallies those the policy
/// records.
pub fn run_exchange<R: Rng + ?Sized>(
    scenario: &Scenario,
    policy: &AnnouncementPolicy,
    rounds: u64,
    rng: &mut R,
) -> Result<TallyTable> {
    if rounds == 0 {
        return Err(Error::DomainError("an exchange needs at least one round".into()));
    }
    let table = scenario.prob_table()?;
    if table.parties() != policy.parties() {
        return Err(Error::DimensionMismatch { expected: table.parties(), found: policy.parties() });
    }
    if table.dim() != policy.dim() {
        return Err(Error::DimensionMismatch { expected: table.dim(), found: policy.dim() });
    }
    // policy decision per flat index, computed once
    let recorded: Vec<bool> = (0..table.entries().len())
        .map(|idx| policy.records(&JointOutcome::from_flat_index(table.dim(), table.parties(), idx)))
        .collect::<Result<_>>()?;

    let sampler = OutcomeSampler::new(&table);
    let mut hits = vec![0u64; recorded.len()];
    let mut discarded = 0;
    for _ in 0..rounds {
        let idx = sampler.sample_index(rng);
        if recorded[idx] {
            hits[idx] += 1;
        } else {
            discarded += 1;
        }
    }
    let counts = hits
        .iter()
        .enumerate()
        .filter(|(_, &n)| n > 0)
        .map(|(idx, &n)| (JointOutcome::from_flat_index(table.dim(), table.parties(), idx), n))
        .collect();
    TallyTable::new(rounds, counts, discarded)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{encode_message, MessageAngles};
    use crate::rng::seeded;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn qubit(theta: f64, phi: f64) -> QuditState {
        encode_message(&MessageAngles::new(theta, phi).unwrap())
    }

    #[test]
    fn certain_outcome_always_drawn() {
        let mut entries = vec![Complex64::new(0.0, 0.0); 16];
        entries[6] = Complex64::new(1.0, 0.0);
        let table = prob_table(&CoeffTable::from_entries(2, 2, entries).unwrap());
        let mut rng = seeded(3);
        for _ in 0..1000 {
            assert_eq!(sample_round(&table, &mut rng).flat_index(), 6);
        }
    }

    #[test]
    fn zero_probability_outcomes_never_drawn() {
        let table = Scenario::TwoParty { a: qubit(0.0, 0.0), b: qubit(0.0, 0.0) }.prob_table().unwrap();
        let sampler = OutcomeSampler::new(&table);
        let mut rng = seeded(11);
        for _ in 0..20_000 {
            let idx = sampler.sample_index(&mut rng);
            assert!(table.entries()[idx] > 1e-12);
        }
    }

    #[test]
    fn empirical_frequencies_for_equal_superpositions() {
        // every nonzero entry is 1/8; 4 sigma binomial band on 1e5 draws
        let h = qubit(PI / 4.0, 0.0);
        let table = Scenario::TwoParty { a: h.clone(), b: h }.prob_table().unwrap();
        let sampler = OutcomeSampler::new(&table);
        let mut rng = seeded(2024);
        let n = 100_000;
        let mut hits = [0u64; 16];
        for _ in 0..n {
            hits[sampler.sample_index(&mut rng)] += 1;
        }
        let sigma = (0.125f64 * 0.875 / n as f64).sqrt();
        for (idx, &p) in table.entries().iter().enumerate() {
            if p > 1e-12 {
                assert!((p - 0.125).abs() < 1e-12);
                let freq = hits[idx] as f64 / n as f64;
                assert!((freq - 0.125).abs() < 4.0 * sigma, "outcome {idx}: {freq}");
            } else {
                assert_eq!(hits[idx], 0);
            }
        }
    }

    #[test]
    fn run_rejects_zero_rounds() {
        let s = Scenario::TwoParty { a: qubit(0.0, 0.0), b: qubit(0.0, 0.0) };
        let p = AnnouncementPolicy::linear_optics(2);
        assert!(run_exchange(&s, &p, 0, &mut seeded(1)).is_err());
    }

    #[test]
    fn basis_states_fill_only_nonzero_cells() {
        let s = Scenario::TwoParty { a: qubit(0.0, 0.0), b: qubit(0.0, 0.0) };
        let p = AnnouncementPolicy::linear_optics(2);
        let tally = run_exchange(&s, &p, 1000, &mut seeded(5)).unwrap();
        for o in tally.counts().keys() {
            assert!(["10,10", "10,11", "11,10", "11,11"].contains(&o.label().as_str()));
        }
        let total: u64 = tally.counts().values().sum();
        assert_eq!(total + tally.discarded(), 1000);
        assert!(total > 0);
    }

    #[test]
    fn same_seed_same_tally() {
        let s = Scenario::Misaligned {
            a: qubit(0.4, 1.0),
            b: qubit(1.1, 2.0),
            theta: AlignmentAngle::new(0.3).unwrap(),
        };
        let p = AnnouncementPolicy::linear_optics(2);
        let t1 = run_exchange(&s, &p, 5000, &mut seeded(77)).unwrap();
        let t2 = run_exchange(&s, &p, 5000, &mut seeded(77)).unwrap();
        assert_eq!(t1, t2);
        let t3 = run_exchange(&s, &p, 5000, &mut seeded(78)).unwrap();
        assert_ne!(t1, t3);
    }

    #[test]
    fn policy_shape_must_match() {
        let s = Scenario::TwoParty { a: qubit(0.1, 0.0), b: qubit(0.2, 0.0) };
        assert!(run_exchange(&s, &AnnouncementPolicy::qudit3(), 10, &mut seeded(1)).is_err());
        assert!(run_exchange(&s, &AnnouncementPolicy::linear_optics(3), 10, &mut seeded(1)).is_err());
    }
}
