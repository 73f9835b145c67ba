use rand::Rng;

use crate::error::{Error, Result};
use crate::qstate::AlignmentAngle;

/// Number of agreeing outcomes when Alice measures her half of `|Phi_00>` in
/// her basis and Bob his half in a basis turned by `theta`. Photon
/// polarization is assumed, so agreement has probability `cos^2 theta`.
///
/// Each round consumes two draws: Alice's outcome, then Bob's agreement.
pub fn baseline_same_count<R: Rng + ?Sized>(theta: AlignmentAngle, n: u64, rng: &mut R) -> Result<u64> {
    if n == 0 {
        return Err(Error::DomainError("baseline needs at least one round".into()));
    }
    let agree = theta.radians().cos().powi(2).clamp(0.0, 1.0);
    let mut same = 0;
    for _ in 0..n {
        let alice = rng.random_bool(0.5);
        let bob = if rng.random_bool(agree) { alice } else { !alice };
        if alice == bob {
            same += 1;
        }
    }
    Ok(same)
}

/// Fraction `N_s / n` of rounds with the same outcome on both sides.
pub fn baseline_direction<R: Rng + ?Sized>(theta: AlignmentAngle, n: u64, rng: &mut R) -> Result<f64> {
    Ok(baseline_same_count(theta, n, rng)? as f64 / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use std::f64::consts::PI;

    #[test]
    fn aligned_and_orthogonal_axes() {
        let f = baseline_direction(AlignmentAngle::zero(), 500, &mut seeded(1)).unwrap();
        assert_eq!(f, 1.0);
        let f = baseline_direction(AlignmentAngle::new(PI / 2.0).unwrap(), 500, &mut seeded(1)).unwrap();
        assert_eq!(f, 0.0);
    }

    #[test]
    fn thirty_degrees() {
        // cos^2(pi/6) = 3/4; band 3 * sqrt(2 p (1-p) / n)
        let n = 10_000;
        let f = baseline_direction(AlignmentAngle::new(PI / 6.0).unwrap(), n, &mut seeded(9)).unwrap();
        let band = 3.0 * (2.0 * 0.75 * 0.25 / n as f64).sqrt();
        assert!((f - 0.75).abs() <= band, "{f}");
    }

    #[test]
    fn zero_rounds_rejected() {
        assert!(baseline_direction(AlignmentAngle::zero(), 0, &mut seeded(1)).is_err());
    }
}
