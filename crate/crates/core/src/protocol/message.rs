use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::QuditState;

/// A qubit message `(cos theta, sin theta e^{i phi})` with
/// `theta in [0, pi/2]` and `phi in [0, 2pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MessageAngles {
    theta: f64,
    phi: f64,
}

impl MessageAngles {
    /// Maps any pair of angles onto the canonical range describing the same
    /// physical state.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::NonFinite);
        }
        let t = theta.rem_euclid(TAU);
        let (theta, phi) = if t <= FRAC_PI_2 {
            (t, phi)
        } else if t <= PI {
            (PI - t, phi + PI)
        } else if t <= 3.0 * FRAC_PI_2 {
            (t - PI, phi)
        } else {
            (TAU - t, phi + PI)
        };
        let mut phi = phi.rem_euclid(TAU);
        if phi >= TAU {
            phi = 0.0;
        }
        Ok(MessageAngles { theta, phi })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn amplitudes(&self) -> [Complex64; 2] {
        [
            Complex64::new(self.theta.cos(), 0.0),
            Complex64::from_polar(self.theta.sin(), self.phi),
        ]
    }
}

pub fn encode_message(m: &MessageAngles) -> QuditState {
    let [a0, a1] = m.amplitudes();
    QuditState::qubit(a0, a1).expect("cos/sin pair is a unit vector")
}

/// Inverse of [`encode_message`]. The phase of a vanishing second amplitude
/// is reported as zero.
pub fn decode_message(state: &QuditState) -> Result<MessageAngles> {
    if state.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: state.dim() });
    }
    let [a0, a1] = [state.amps()[0], state.amps()[1]];
    let theta = a1.norm().atan2(a0.re);
    let phi = if a1.norm() > 0.0 { a1.arg() } else { 0.0 };
    MessageAngles::new(theta, phi)
}
