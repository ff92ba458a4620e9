//! Derivative-free coordinate search shared by the convex-roof engine, the
//! local-unitary swap search and the LOCC-ansatz minimizer.
//!
//! Each coordinate is a one-parameter subgroup (the exponential of a single
//! anti-Hermitian generator element) applied on top of the current point, so
//! after a move the point is re-based and the coordinate origin is reset.
//! Along a coordinate the step is chosen by fitting a parabola through
//! `f(-h), f(0), f(h)`.

use serde::{Deserialize, Serialize};

use crate::linalg::{ComplexMatrix, C64};

/// A problem exposing cheap trial evaluations along single coordinates.
pub trait CoordinateProblem {
    fn dimension(&self) -> usize;
    fn value(&self) -> f64;
    /// Objective after moving coordinate `coord` by `t`, without committing.
    fn trial(&mut self, coord: usize, t: f64) -> f64;
    /// Applies the move; `value` is the objective returned by `trial`.
    fn commit(&mut self, coord: usize, t: f64, value: f64);
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub max_sweeps: usize,
    /// Stop once a full sweep improves the objective by less than this
    /// fraction and every step size has collapsed below `min_step`.
    pub rel_tol: f64,
    pub initial_step: f64,
    pub min_step: f64,
    pub max_step: f64,
    /// Stop as soon as the objective reaches this value.
    pub target: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            max_sweeps: 2000,
            rel_tol: 1e-7,
            initial_step: 0.2,
            min_step: 1e-9,
            max_step: std::f64::consts::FRAC_PI_2,
            target: f64::NEG_INFINITY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOutcome {
    pub value: f64,
    pub sweeps: usize,
    pub converged: bool,
}

/// One quadratic-fit line step along a coordinate. Returns the accepted
/// `(t, f(t))` if it improves on `f0`.
pub fn quadratic_step(f0: f64, h: f64, mut f: impl FnMut(f64) -> f64) -> Option<(f64, f64)> {
    let fp = f(h);
    let fm = f(-h);
    let mut best = (0.0, f0);
    for cand in [(h, fp), (-h, fm)] {
        if cand.1 < best.1 {
            best = cand;
        }
    }
    let curvature = fp + fm - 2.0 * f0;
    if curvature > 0.0 {
        let t = (h * (fm - fp) / (2.0 * curvature)).clamp(-4.0 * h, 4.0 * h);
        if t != 0.0 && t.abs() != h {
            let ft = f(t);
            if ft < best.1 {
                best = (t, ft);
            }
        }
    }
    (best.1 < f0).then_some(best)
}

pub fn coordinate_search<P: CoordinateProblem>(problem: &mut P, opts: &SearchOptions) -> SearchOutcome {
    let n = problem.dimension();
    let mut steps = vec![opts.initial_step; n];
    let mut value = problem.value();
    if n == 0 || value <= opts.target {
        return SearchOutcome { value, sweeps: 0, converged: true };
    }
    for sweep in 1..=opts.max_sweeps {
        let before = value;
        for (k, step) in steps.iter_mut().enumerate() {
            let h = *step;
            match quadratic_step(value, h, |t| problem.trial(k, t)) {
                Some((t, ft)) => {
                    problem.commit(k, t, ft);
                    value = ft;
                    *step = if t.abs() >= h { (2.0 * h).min(opts.max_step) } else { t.abs().max(opts.min_step) };
                }
                None => *step = (0.5 * h).max(opts.min_step),
            }
            if value <= opts.target {
                return SearchOutcome { value, sweeps: sweep, converged: true };
            }
        }
        let improvement = before - value;
        let max_step = steps.iter().copied().fold(0.0, f64::max);
        if improvement <= opts.rel_tol * before.abs() && max_step <= 2.0 * opts.min_step.max(1e-7) {
            return SearchOutcome { value, sweeps: sweep, converged: true };
        }
    }
    SearchOutcome { value, sweeps: opts.max_sweeps, converged: false }
}

/// Coordinates of the `n × n` anti-Hermitian generator basis: `n` diagonal
/// phases followed by a real and an imaginary rotation for every pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    Phase(usize),
    Real(usize, usize),
    Imag(usize, usize),
}

impl Generator {
    pub fn count(n: usize) -> usize {
        n * n
    }

    pub fn nth(n: usize, k: usize) -> Generator {
        if k < n {
            return Generator::Phase(k);
        }
        let p = (k - n) / 2;
        let (mut i, mut rem) = (0, p);
        while rem >= n - 1 - i {
            rem -= n - 1 - i;
            i += 1;
        }
        let j = i + 1 + rem;
        if (k - n).is_multiple_of(2) {
            Generator::Real(i, j)
        } else {
            Generator::Imag(i, j)
        }
    }

    /// Left-multiplies `m` by `exp(t·E)`; only the affected rows change.
    pub fn apply_left(self, m: &mut ComplexMatrix, t: f64) {
        let cols = m.cols();
        let data = m.as_mut_slice();
        match self {
            Generator::Phase(i) => {
                let ph = C64::from_polar(1.0, t);
                for z in &mut data[i * cols..(i + 1) * cols] {
                    *z *= ph;
                }
            }
            Generator::Real(i, j) => {
                let (s, c) = t.sin_cos();
                for col in 0..cols {
                    let a = data[i * cols + col];
                    let b = data[j * cols + col];
                    data[i * cols + col] = a * c + b * s;
                    data[j * cols + col] = b * c - a * s;
                }
            }
            Generator::Imag(i, j) => {
                let (s, c) = t.sin_cos();
                let is = C64::new(0.0, s);
                for col in 0..cols {
                    let a = data[i * cols + col];
                    let b = data[j * cols + col];
                    data[i * cols + col] = a * c + b * is;
                    data[j * cols + col] = b * c + a * is;
                }
            }
        }
    }

    /// Same move applied to two rows given as separate slices.
    pub fn rotate_rows(self, a: &mut [C64], b: &mut [C64], t: f64) {
        let (s, c) = t.sin_cos();
        match self {
            Generator::Phase(_) => unreachable!("phase generators act on one row"),
            Generator::Real(..) => {
                for (x, y) in a.iter_mut().zip(b.iter_mut()) {
                    let (p, q) = (*x, *y);
                    *x = p * c + q * s;
                    *y = q * c - p * s;
                }
            }
            Generator::Imag(..) => {
                let is = C64::new(0.0, s);
                for (x, y) in a.iter_mut().zip(b.iter_mut()) {
                    let (p, q) = (*x, *y);
                    *x = p * c + q * is;
                    *y = q * c + p * is;
                }
            }
        }
    }
}
