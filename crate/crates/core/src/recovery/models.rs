//! Closed-form class probabilities and the angle models built on them.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;

use super::solver::{objective, Axis, Model, Trig};
use crate::protocol::MessageAngles;
use crate::error::Result;
use crate::qstate::{make_state, omega_pow, Amplitude, QuditState};

const FINE: f64 = PI / 200.0;
const COARSE: f64 = PI / 32.0;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn qubit(t: Trig, phase: Trig) -> [Complex64; 2] {
    [c(t.cos), Complex64::new(t.sin * phase.cos, t.sin * phase.sin)]
}

/// Two qubit parties: `[P(10,10), P(10,11)]`.
pub fn two_party_probs(a: &[Amplitude; 2], b: &[Amplitude; 2]) -> [f64; 2] {
    let x = a[0] * b[0];
    let y = a[1] * b[1];
    [(x + y).norm_sqr() / 8.0, (x - y).norm_sqr() / 8.0]
}

/// Misaligned qubit parties with relative rotation `alpha`:
/// `[P(10,10), P(11,11), P(10,11), P(11,10)]`.
pub fn misaligned_probs(a: &[Amplitude; 2], b: &[Amplitude; 2], alpha: f64) -> [f64; 4] {
    misaligned_with(a, b, Trig::of(alpha))
}

fn misaligned_with(a: &[Amplitude; 2], b: &[Amplitude; 2], r: Trig) -> [f64; 4] {
    MisalignedRow::new(a, b).probs(r)
}

/// The misaligned class probabilities for fixed states, as quadratic forms
/// in `(cos alpha, sin alpha)`: each is `|X cos + Y sin|^2 / 8` with
/// `X = a0 b0 +- a1 b1` and `Y = a1 b0 -+ a0 b1`.
struct MisalignedRow {
    xx: [f64; 2],
    yy: [f64; 2],
    xy: [f64; 2],
}

impl MisalignedRow {
    fn new(a: &[Amplitude; 2], b: &[Amplitude; 2]) -> Self {
        let (u, v) = (a[0] * b[0], a[1] * b[1]);
        let (p, q) = (a[1] * b[0], a[0] * b[1]);
        let pairs = [(u + v, p - q), (u - v, p + q)];
        MisalignedRow {
            xx: pairs.map(|(x, _)| x.norm_sqr()),
            yy: pairs.map(|(_, y)| y.norm_sqr()),
            xy: pairs.map(|(x, y)| (x * y.conj()).re),
        }
    }

    fn probs(&self, r: Trig) -> [f64; 4] {
        let (c2, s2, cs2) = (r.cos * r.cos, r.sin * r.sin, 2.0 * r.cos * r.sin);
        let base = [0, 1].map(|k| self.xx[k] * c2 + self.yy[k] * s2);
        let cross = [0, 1].map(|k| self.xy[k] * cs2);
        [
            (base[0] + cross[0]) / 8.0,
            (base[0] - cross[0]) / 8.0,
            (base[1] + cross[1]) / 8.0,
            (base[1] - cross[1]) / 8.0,
        ]
    }
}

/// Two qutrit parties: `[P(00,00), P(21,21), P(00,21), P(21,00)]`.
pub fn qudit3_probs(a: &[Amplitude; 3], b: &[Amplitude; 3]) -> [f64; 4] {
    let w = omega_pow(3, 1);
    let w2 = omega_pow(3, 2);
    [
        (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]).norm_sqr() / 27.0,
        (a[0] * b[0] + a[1] * b[1] * w + a[2] * b[2] * w2).norm_sqr() / 27.0,
        (a[2] * b[0] + a[0] * b[1] * w2 + a[1] * b[2] * w).norm_sqr() / 27.0,
        (a[1] * b[0] * w2 + a[2] * b[1] * w + a[0] * b[2]).norm_sqr() / 27.0,
    ]
}

/// Three qubit parties on a GHZ state, one value per class in the order of
/// [`ObservableKind::Ghz3`](super::ObservableKind::Ghz3).
pub fn ghz3_probs(a: &[Amplitude; 2], b: &[Amplitude; 2], cc: &[Amplitude; 2]) -> [f64; 4] {
    ghz3_from_products(a, &ghz_products(b, cc))
}

/// `[b0 c0, b1 c1, b0 c1, b1 c0]`
pub(crate) fn ghz_products(b: &[Amplitude; 2], cc: &[Amplitude; 2]) -> [Complex64; 4] {
    [b[0] * cc[0], b[1] * cc[1], b[0] * cc[1], b[1] * cc[0]]
}

fn ghz3_from_products(a: &[Amplitude; 2], p: &[Complex64; 4]) -> [f64; 4] {
    [
        (a[0] * p[0] + a[1] * p[1]).norm_sqr() / 16.0,
        (a[0] * p[0] - a[1] * p[1]).norm_sqr() / 16.0,
        (a[0] * p[2] - a[1] * p[3]).norm_sqr() / 16.0,
        (a[0] * p[2] + a[1] * p[3]).norm_sqr() / 16.0,
    ]
}

/// Canonical `(theta, phi)` with the phase of a vanishing amplitude ignored.
pub(crate) fn canonical_pair(params: &mut [f64]) {
    let m = MessageAngles::new(params[0], params[1]).expect("finite angles");
    params[0] = m.theta();
    params[1] = m.phi();
}

/// Distance between two qubit angle pairs as physical states.
pub(crate) fn pair_distance(p: &[f64], q: &[f64]) -> f64 {
    let dt = (p[0] - q[0]).abs();
    if p[0].sin().abs().min(q[0].sin().abs()) < 1e-6 {
        return dt;
    }
    let dp = (p[1] - q[1]).rem_euclid(TAU);
    dt.max(dp.min(TAU - dp))
}

fn qubit_axes(step: f64) -> [Axis; 2] {
    [Axis::closed(0.0, FRAC_PI_2, step), Axis::periodic(0.0, TAU, step)]
}

/// Unknown partner `(theta, phi)` given the own qubit.
pub(crate) struct PartnerModel {
    pub known: [Amplitude; 2],
    axes: Vec<Axis>,
}

impl PartnerModel {
    pub fn new(known: [Amplitude; 2]) -> Self {
        PartnerModel { known, axes: qubit_axes(FINE).to_vec() }
    }
}

impl Model for PartnerModel {
    fn axes(&self) -> &[Axis] {
        &self.axes
    }
    fn n_obs(&self) -> usize {
        2
    }
    fn predict(&self, t: &[Trig], out: &mut [f64]) {
        out.copy_from_slice(&two_party_probs(&self.known, &qubit(t[0], t[1])));
    }
    fn canonicalize(&self, p: &mut [f64]) {
        canonical_pair(p);
    }
    fn distance(&self, p: &[f64], q: &[f64]) -> f64 {
        pair_distance(p, q)
    }
    /// Only `cos(phi_a + phi_b)` enters, so `phi_b -> -2 phi_a - phi_b`.
    fn images(&self, p: &[f64]) -> Vec<Vec<f64>> {
        let phi_a = self.known[1].arg();
        vec![vec![p[0], -2.0 * phi_a - p[1]]]
    }
}

/// Unknown partner `(theta, phi)` and alignment angle. The observables are
/// invariant under `alpha -> alpha + pi`, so alignment is searched on
/// `[0, pi)`.
pub(crate) struct MisalignedModel {
    pub known: [Amplitude; 2],
    axes: Vec<Axis>,
}

impl MisalignedModel {
    pub fn new(known: [Amplitude; 2]) -> Self {
        let mut axes = qubit_axes(FINE).to_vec();
        axes.push(Axis::periodic(0.0, PI, FINE));
        MisalignedModel { known, axes }
    }
}

impl Model for MisalignedModel {
    fn axes(&self) -> &[Axis] {
        &self.axes
    }
    fn n_obs(&self) -> usize {
        4
    }
    fn predict(&self, t: &[Trig], out: &mut [f64]) {
        out.copy_from_slice(&misaligned_with(&self.known, &qubit(t[0], t[1]), t[2]));
    }
    fn scan_row(&self, lead: &[Trig], last: &[Trig], obs: &[f64], out: &mut Vec<f32>) {
        let row = MisalignedRow::new(&self.known, &qubit(lead[0], lead[1]));
        out.extend(last.iter().map(|&r| objective(&row.probs(r), obs) as f32));
    }
    fn canonicalize(&self, p: &mut [f64]) {
        canonical_pair(&mut p[..2]);
        p[2] = p[2].rem_euclid(PI);
        if p[2] >= PI {
            p[2] = 0.0;
        }
    }
    fn distance(&self, p: &[f64], q: &[f64]) -> f64 {
        pair_distance(&p[..2], &q[..2]).max(self.axes[2].diff(p[2], q[2]))
    }
}

/// Qutrit in hyperspherical angles
/// `(cos t1, sin t1 cos t2 e^{i f1}, sin t1 sin t2 e^{i f2})`.
pub(crate) fn qutrit(t1: Trig, t2: Trig, f1: Trig, f2: Trig) -> [Complex64; 3] {
    [
        c(t1.cos),
        Complex64::new(f1.cos, f1.sin) * (t1.sin * t2.cos),
        Complex64::new(f2.cos, f2.sin) * (t1.sin * t2.sin),
    ]
}

/// Angles of a canonical qutrit, inverse of [`qutrit`].
pub(crate) fn qutrit_angles(amps: &[Complex64]) -> [f64; 4] {
    let r1 = amps[1].norm();
    let r2 = amps[2].norm();
    let t1 = r1.hypot(r2).atan2(amps[0].re);
    let t2 = r2.atan2(r1);
    let f1 = if r1 > 0.0 { amps[1].arg().rem_euclid(TAU) } else { 0.0 };
    let f2 = if r2 > 0.0 { amps[2].arg().rem_euclid(TAU) } else { 0.0 };
    [t1, t2, f1, f2]
}

pub(crate) fn qutrit_from_params(p: &[f64]) -> [Complex64; 3] {
    qutrit(Trig::of(p[0]), Trig::of(p[1]), Trig::of(p[2]), Trig::of(p[3]))
}

/// Qutrit `(cos t1, sin t1 cos t2 e^{i f1}, sin t1 sin t2 e^{i f2})`,
/// canonicalized.
pub fn qutrit_state(t1: f64, t2: f64, f1: f64, f2: f64) -> Result<QuditState> {
    make_state(&qutrit_from_params(&[t1, t2, f1, f2]))
}

pub(crate) struct QutritModel {
    pub known: [Amplitude; 3],
    axes: Vec<Axis>,
}

impl QutritModel {
    pub fn new(known: [Amplitude; 3]) -> Self {
        let axes = vec![
            Axis::closed(0.0, FRAC_PI_2, COARSE),
            Axis::closed(0.0, FRAC_PI_2, COARSE),
            Axis::periodic(0.0, TAU, COARSE),
            Axis::periodic(0.0, TAU, COARSE),
        ];
        QutritModel { known, axes }
    }
}

impl Model for QutritModel {
    fn axes(&self) -> &[Axis] {
        &self.axes
    }
    fn n_obs(&self) -> usize {
        4
    }
    fn predict(&self, t: &[Trig], out: &mut [f64]) {
        out.copy_from_slice(&qudit3_probs(&self.known, &qutrit(t[0], t[1], t[2], t[3])));
    }
    fn canonicalize(&self, p: &mut [f64]) {
        let state = make_state(&qutrit_from_params(p)).expect("unit vector");
        p.copy_from_slice(&qutrit_angles(state.amps()));
    }
    fn distance(&self, p: &[f64], q: &[f64]) -> f64 {
        let u = qutrit_from_params(p);
        let v = qutrit_from_params(q);
        // both canonical, so the global phase is already fixed
        u.iter().zip(&v).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }
}

/// Unknown `(theta_b, phi_b, theta_c, phi_c)` for the GHZ case.
pub(crate) struct GhzModel {
    pub known: [Amplitude; 2],
    axes: Vec<Axis>,
}

impl GhzModel {
    pub fn new(known: [Amplitude; 2]) -> Self {
        let mut axes = qubit_axes(COARSE).to_vec();
        axes.extend(qubit_axes(COARSE));
        GhzModel { known, axes }
    }

    pub fn products(p: &[f64]) -> [Complex64; 4] {
        let b = qubit(Trig::of(p[0]), Trig::of(p[1]));
        let cc = qubit(Trig::of(p[2]), Trig::of(p[3]));
        ghz_products(&b, &cc)
    }
}

impl Model for GhzModel {
    fn axes(&self) -> &[Axis] {
        &self.axes
    }
    fn n_obs(&self) -> usize {
        4
    }
    fn predict(&self, t: &[Trig], out: &mut [f64]) {
        let b = qubit(t[0], t[1]);
        let cc = qubit(t[2], t[3]);
        out.copy_from_slice(&ghz3_probs(&self.known, &b, &cc));
    }
    fn canonicalize(&self, p: &mut [f64]) {
        canonical_pair(&mut p[..2]);
        canonical_pair(&mut p[2..]);
    }
    /// Only `cos(phi_a + phi_b + phi_c)` and `cos(phi_a + phi_b - phi_c)`
    /// enter, and shifting both partner phases by `pi` flips the sign of
    /// `b0 c1` and `b1 c0` together.
    fn images(&self, p: &[f64]) -> Vec<Vec<f64>> {
        let phi_a = self.known[1].arg();
        let sum = phi_a + p[1] + p[3];
        let diff = phi_a + p[1] - p[3];
        vec![
            vec![p[0], p[1] + PI, p[2], p[3] + PI],
            vec![p[0], p[1] - sum, p[2], p[3] - sum],
            vec![p[0], p[1] - diff, p[2], p[3] + diff],
        ]
    }

    /// Candidates are told apart by the products the observables depend
    /// on, so two factorizations of the same products count as one.
    fn distance(&self, p: &[f64], q: &[f64]) -> f64 {
        let u = Self::products(p);
        let v = Self::products(q);
        u.iter().zip(&v).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }
}

/// Linear-optics GHZ case with public `theta_b`, `theta_c`: the single
/// unknown is `phi_b + phi_c`.
pub(crate) struct PhaseSumModel {
    pub known: [Amplitude; 2],
    pub b0c0: f64,
    pub b1c1_mod: f64,
    axes: Vec<Axis>,
}

impl PhaseSumModel {
    pub fn new(known: [Amplitude; 2], theta_b: f64, theta_c: f64) -> Self {
        PhaseSumModel {
            known,
            b0c0: theta_b.cos() * theta_c.cos(),
            b1c1_mod: theta_b.sin() * theta_c.sin(),
            axes: vec![Axis::periodic(0.0, TAU, FINE)],
        }
    }

    pub fn b1c1(&self, psi: f64) -> Complex64 {
        Complex64::from_polar(self.b1c1_mod, psi)
    }
}

impl Model for PhaseSumModel {
    fn axes(&self) -> &[Axis] {
        &self.axes
    }
    fn n_obs(&self) -> usize {
        2
    }
    fn predict(&self, t: &[Trig], out: &mut [f64]) {
        let x = self.known[0] * self.b0c0;
        let y = self.known[1] * Complex64::new(t[0].cos, t[0].sin) * self.b1c1_mod;
        out[0] = (x + y).norm_sqr() / 16.0;
        out[1] = (x - y).norm_sqr() / 16.0;
    }
    fn canonicalize(&self, p: &mut [f64]) {
        p[0] = p[0].rem_euclid(TAU);
        if p[0] >= TAU {
            p[0] = 0.0;
        }
    }
    fn images(&self, p: &[f64]) -> Vec<Vec<f64>> {
        vec![vec![-2.0 * self.known[1].arg() - p[0]]]
    }
}

/// Both qubits unknown, two-party observables.
pub(crate) struct PairModel {
    axes: Vec<Axis>,
}

impl PairModel {
    pub fn new() -> Self {
        let mut axes = qubit_axes(COARSE).to_vec();
        axes.extend(qubit_axes(COARSE));
        PairModel { axes }
    }
}

impl Model for PairModel {
    fn axes(&self) -> &[Axis] {
        &self.axes
    }
    fn n_obs(&self) -> usize {
        2
    }
    fn predict(&self, t: &[Trig], out: &mut [f64]) {
        out.copy_from_slice(&two_party_probs(&qubit(t[0], t[1]), &qubit(t[2], t[3])));
    }
    fn canonicalize(&self, p: &mut [f64]) {
        canonical_pair(&mut p[..2]);
        canonical_pair(&mut p[2..]);
    }
    fn distance(&self, p: &[f64], q: &[f64]) -> f64 {
        pair_distance(&p[..2], &q[..2]).max(pair_distance(&p[2..], &q[2..]))
    }
}
