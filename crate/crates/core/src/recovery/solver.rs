//! Exhaustive grid scan followed by Levenberg-Marquardt refinement.
//!
//! Every unknown is an angle and every model depends on its unknowns only
//! through their cosines and sines, so the grid stage evaluates models from
//! precomputed per-axis trig tables and never calls `sin_cos` in the inner
//! loop.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Cosine and sine of one unknown angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Trig {
    pub cos: f64,
    pub sin: f64,
}

impl Trig {
    pub fn of(x: f64) -> Self {
        let (sin, cos) = x.sin_cos();
        Trig { cos, sin }
    }
}

/// One coordinate of the search domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub periodic: bool,
    pub step: f64,
}

impl Axis {
    pub fn closed(lo: f64, hi: f64, step: f64) -> Self {
        Axis { lo, hi, periodic: false, step }
    }

    pub fn periodic(lo: f64, hi: f64, step: f64) -> Self {
        Axis { lo, hi, periodic: true, step }
    }

    fn points(&self) -> Vec<f64> {
        let span = self.hi - self.lo;
        let n = (span / self.step).round().max(1.0) as usize;
        if self.periodic {
            (0..n).map(|k| self.lo + span * k as f64 / n as f64).collect()
        } else {
            (0..=n).map(|k| self.lo + span * k as f64 / n as f64).collect()
        }
    }

    /// Coordinate difference, wrapped for periodic axes.
    pub fn diff(&self, a: f64, b: f64) -> f64 {
        let d = (a - b).abs();
        if self.periodic {
            let period = self.hi - self.lo;
            let d = d.rem_euclid(period);
            d.min(period - d)
        } else {
            d
        }
    }
}

/// Predicted observables as a function of angle unknowns.
pub(crate) trait Model {
    fn axes(&self) -> &[Axis];

    fn n_obs(&self) -> usize;

    fn predict(&self, t: &[Trig], out: &mut [f64]);

    /// Maps parameters onto the canonical domain without changing the
    /// predictions.
    fn canonicalize(&self, params: &mut [f64]);

    fn distance(&self, p: &[f64], q: &[f64]) -> f64 {
        self.axes()
            .iter()
            .zip(p.iter().zip(q))
            .map(|(ax, (a, b))| ax.diff(*a, *b))
            .fold(0.0, f64::max)
    }

    /// Parameter points with provably identical predictions. Used to
    /// complete the candidate set from any one accepted solution.
    fn images(&self, _params: &[f64]) -> Vec<Vec<f64>> {
        Vec::new()
    }

    /// Appends the objective along the last axis for fixed leading
    /// coordinates. Models can override this to hoist work out of the
    /// innermost loop.
    fn scan_row(&self, lead: &[Trig], last: &[Trig], obs: &[f64], out: &mut Vec<f32>) {
        let mut t = lead.to_vec();
        t.push(last[0]);
        let k = lead.len();
        let mut pred = vec![0.0; self.n_obs()];
        for &x in last {
            t[k] = x;
            self.predict(&t, &mut pred);
            out.push(objective(&pred, obs) as f32);
        }
    }

    fn predict_at(&self, params: &[f64]) -> Vec<f64> {
        let t: Vec<Trig> = params.iter().map(|&x| Trig::of(x)).collect();
        let mut out = vec![0.0; self.n_obs()];
        self.predict(&t, &mut out);
        out
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct SolverConfig {
    pub max_starts: usize,
    pub merge_tol: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Solution {
    pub params: Vec<f64>,
    /// Largest absolute deviation over the observables.
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct SolveOutput {
    /// Accepted and deduplicated, ascending residual.
    pub kept: Vec<Solution>,
    /// Every accepted refinement before deduplication.
    pub accepted: Vec<Solution>,
}

pub(crate) fn objective(pred: &[f64], obs: &[f64]) -> f64 {
    pred.iter().zip(obs).map(|(p, o)| (p - o) * (p - o)).sum()
}

pub(crate) fn max_deviation(pred: &[f64], obs: &[f64]) -> f64 {
    pred.iter().zip(obs).map(|(p, o)| (p - o).abs()).fold(0.0, f64::max)
}

pub(crate) fn solve<M: Model>(model: &M, obs: &[f64], tol: &[f64], cfg: SolverConfig) -> Result<SolveOutput> {
    assert_eq!(obs.len(), model.n_obs());
    assert_eq!(tol.len(), model.n_obs());
    let grid = Grid::scan(model, obs);
    let starts = grid.starts(cfg.max_starts);

    let mut refined: Vec<Solution> = starts
        .iter()
        .map(|start| {
            let mut x = refine(model, obs, start);
            model.canonicalize(&mut x);
            let residual = max_deviation(&model.predict_at(&x), obs);
            Solution { params: x, residual }
        })
        .collect();
    refined.sort_by(|a, b| a.residual.total_cmp(&b.residual));

    let within = |pred: &[f64]| pred.iter().zip(obs).zip(tol).all(|((p, o), t)| (p - o).abs() <= *t);
    let mut accepted: Vec<Solution> =
        refined.iter().filter(|s| within(&model.predict_at(&s.params))).cloned().collect();
    if accepted.is_empty() {
        let best_residual = refined.first().map_or(f64::INFINITY, |s| s.residual);
        return Err(Error::NoSolution { best_residual });
    }
    complete_with_images(model, obs, &within, cfg.merge_tol, &mut accepted);
    let mut kept: Vec<Solution> = Vec::new();
    for s in &accepted {
        if kept.iter().all(|k| model.distance(&k.params, &s.params) > cfg.merge_tol) {
            kept.push(s.clone());
        }
    }
    Ok(SolveOutput { kept, accepted })
}

fn complete_with_images<M: Model>(
    model: &M,
    obs: &[f64],
    within: &dyn Fn(&[f64]) -> bool,
    merge_tol: f64,
    accepted: &mut Vec<Solution>,
) {
    const MAX_SOLUTIONS: usize = 256;
    let mut frontier = accepted.clone();
    while !frontier.is_empty() && accepted.len() < MAX_SOLUTIONS {
        let mut next: Vec<Solution> = Vec::new();
        for s in &frontier {
            for mut img in model.images(&s.params) {
                model.canonicalize(&mut img);
                let known = accepted.iter().chain(&next).any(|t| model.distance(&t.params, &img) <= merge_tol);
                let pred = model.predict_at(&img);
                if !known && within(&pred) {
                    next.push(Solution { residual: max_deviation(&pred, obs), params: img });
                }
            }
        }
        accepted.extend(next.iter().cloned());
        frontier = next;
    }
    accepted.sort_by(|a, b| a.residual.total_cmp(&b.residual));
}

struct Grid {
    points: Vec<Vec<f64>>,
    periodic: Vec<bool>,
    values: Vec<f32>,
    floor: f64,
}

impl Grid {
    fn scan<M: Model>(model: &M, obs: &[f64]) -> Self {
        let axes = model.axes();
        let points: Vec<Vec<f64>> = axes.iter().map(Axis::points).collect();
        let trig: Vec<Vec<Trig>> = points.iter().map(|p| p.iter().map(|&x| Trig::of(x)).collect()).collect();
        let sizes: Vec<usize> = points.iter().map(Vec::len).collect();
        let total: usize = sizes.iter().product();

        let lead_dims = axes.len() - 1;
        let mut digits = vec![0usize; lead_dims];
        let mut lead: Vec<Trig> = trig[..lead_dims].iter().map(|v| v[0]).collect();
        let mut values = Vec::with_capacity(total);
        for _ in 0..total / sizes[lead_dims] {
            model.scan_row(&lead, &trig[lead_dims], obs, &mut values);
            // odometer over the leading axes, last one fastest
            for k in (0..lead_dims).rev() {
                digits[k] += 1;
                if digits[k] < sizes[k] {
                    lead[k] = trig[k][digits[k]];
                    break;
                }
                digits[k] = 0;
                lead[k] = trig[k][0];
            }
        }

        // objective at a grid node within half a cell of an exact solution,
        // for predictions with slope up to 1/2 per radian
        let half_cell: f64 = 0.5 * axes.iter().map(|a| a.step * a.step).sum::<f64>().sqrt();
        let floor = model.n_obs() as f64 * (0.5 * half_cell).powi(2);
        Grid { points, periodic: axes.iter().map(|a| a.periodic).collect(), values, floor }
    }

    fn starts(&self, max_starts: usize) -> Vec<Vec<f64>> {
        let sizes: Vec<usize> = self.points.iter().map(Vec::len).collect();
        let dims = sizes.len();
        let mut strides = vec![1usize; dims];
        for k in (0..dims.saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * sizes[k + 1];
        }
        let key = |idx: usize| (self.values[idx], idx);
        let less = |a: (f32, usize), b: (f32, usize)| a.0 < b.0 || (a.0 == b.0 && a.1 < b.1);

        let mut minima: Vec<usize> = Vec::new();
        let mut digits = vec![0usize; dims];
        for idx in 0..self.values.len() {
            let mut is_min = true;
            'axes: for k in 0..dims {
                for delta in [-1i64, 1] {
                    let pos = digits[k] as i64 + delta;
                    let pos = if pos < 0 || pos >= sizes[k] as i64 {
                        if !self.periodic[k] {
                            continue;
                        }
                        pos.rem_euclid(sizes[k] as i64)
                    } else {
                        pos
                    } as usize;
                    if pos == digits[k] {
                        continue;
                    }
                    let nb = idx - digits[k] * strides[k] + pos * strides[k];
                    if less(key(nb), key(idx)) {
                        is_min = false;
                        break 'axes;
                    }
                }
            }
            if is_min {
                minima.push(idx);
            }
            for k in (0..dims).rev() {
                digits[k] += 1;
                if digits[k] < sizes[k] {
                    break;
                }
                digits[k] = 0;
            }
        }
        minima.sort_by(|&a, &b| self.values[a].total_cmp(&self.values[b]).then(a.cmp(&b)));
        let best = minima.first().map_or(0.0, |&i| self.values[i] as f64);
        let threshold = (10.0 * best).max(self.floor);
        minima
            .into_iter()
            .filter(|&i| self.values[i] as f64 <= threshold)
            .take(max_starts.max(1))
            .map(|idx| {
                (0..dims).map(|k| self.points[k][(idx / strides[k]) % sizes[k]]).collect()
            })
            .collect()
    }
}

fn residuals<M: Model>(model: &M, obs: &[f64], x: &[f64]) -> DVector<f64> {
    let pred = model.predict_at(x);
    DVector::from_iterator(obs.len(), pred.iter().zip(obs).map(|(p, o)| p - o))
}

/// Central-difference Jacobian of the predictions.
pub(crate) fn jacobian<M: Model>(model: &M, x: &[f64]) -> DMatrix<f64> {
    const H: f64 = 1e-6;
    let m = model.n_obs();
    let n = x.len();
    let mut jac = DMatrix::zeros(m, n);
    let mut probe = x.to_vec();
    for col in 0..n {
        probe[col] = x[col] + H;
        let up = model.predict_at(&probe);
        probe[col] = x[col] - H;
        let down = model.predict_at(&probe);
        probe[col] = x[col];
        for row in 0..m {
            jac[(row, col)] = (up[row] - down[row]) / (2.0 * H);
        }
    }
    jac
}

/// Damped Gauss-Newton (Levenberg) on the squared deviation from `obs`.
pub(crate) fn refine<M: Model>(model: &M, obs: &[f64], start: &[f64]) -> Vec<f64> {
    const MAX_ITER: usize = 400;
    let n = start.len();
    let mut x = start.to_vec();
    let mut r = residuals(model, obs, &x);
    let mut f = r.norm_squared();
    let mut lambda = 1e-3;

    for _ in 0..MAX_ITER {
        if f < 1e-32 {
            break;
        }
        let jac = jacobian(model, &x);
        let jt = jac.transpose();
        let normal = &jt * &jac;
        let grad = &jt * &r;
        let mut improved = false;
        let mut step_size = 0.0;
        // every unknown is an angle, so isotropic damping is scale-free and
        // stays well conditioned along directions the data barely constrain
        let scale = (0..n).map(|k| normal[(k, k)]).fold(1e-30, f64::max);
        while lambda < 1e16 {
            let mut damped = normal.clone();
            for k in 0..n {
                damped[(k, k)] += lambda * scale;
            }
            let Some(chol) = damped.cholesky() else {
                lambda *= 10.0;
                continue;
            };
            let delta = chol.solve(&(-&grad));
            let trial: Vec<f64> = x.iter().zip(delta.iter()).map(|(a, d)| a + d).collect();
            let r_trial = residuals(model, obs, &trial);
            let f_trial = r_trial.norm_squared();
            if f_trial < f {
                step_size = delta.amax();
                x = trial;
                r = r_trial;
                f = f_trial;
                lambda = (lambda / 10.0).max(1e-15);
                improved = true;
                break;
            }
            lambda *= 10.0;
        }
        if !improved || step_size < 1e-15 {
            break;
        }
    }
    x
}

/// True when the Jacobian is numerically rank-deficient at every one of a
/// handful of fixed interior points, i.e. the observables cannot pin down
/// all unknowns for this known side whatever the data.
pub(crate) fn generically_rank_deficient<M: Model>(model: &M) -> bool {
    const SAMPLES: usize = 6;
    const REL_TOL: f64 = 1e-7;
    let axes = model.axes();
    (0..SAMPLES).all(|s| {
        let x: Vec<f64> = axes
            .iter()
            .enumerate()
            .map(|(k, ax)| {
                let frac = (0.2 + 0.618_033_988_75 * (s * axes.len() + k + 1) as f64).fract();
                let frac = 0.1 + 0.8 * frac;
                ax.lo + (ax.hi - ax.lo) * frac
            })
            .collect();
        let jac = jacobian(model, &x);
        if jac.nrows() < jac.ncols() {
            return true;
        }
        let sv = jac.singular_values();
        let max = sv.max();
        max == 0.0 || sv.min() < REL_TOL * max
    })
}
