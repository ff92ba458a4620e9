//! Convex-roof search over pure-state decompositions.
//!
//! Every decomposition `ρ = Σ_i |φ_i⟩⟨φ_i|` (unnormalized `φ_i`) of size `k`
//! arises from the eigen-ensemble `{√λ_j |v_j⟩}` through a `k × rank`
//! isometry. The search keeps the ensemble itself as its state and moves it
//! by two-row unitary rotations, which are exactly the exponentials of single
//! off-diagonal generator coordinates acting on the isometry. Since a rotation
//! touches two members only, a trial costs two pure-state evaluations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linalg::{
    det_unchecked, eig_hermitian_unchecked, eigvalsh, haar_unitary, shannon_bits, sub_rng, ComplexMatrix, C64,
};
use crate::optim::{coordinate_search, CoordinateProblem, Generator, SearchOptions};
use crate::states::coefficient_matrix;

/// Options for the decomposition search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoofOptions {
    pub restarts: usize,
    /// Ensemble size is `rank(ρ) · ensemble_factor`.
    pub ensemble_factor: usize,
    pub max_iters: usize,
    pub tol: f64,
    pub seed: u64,
    #[serde(skip)]
    pub execution: Execution,
    /// Extra starting decompositions, each a list of unnormalized vectors
    /// whose projectors sum to `ρ`.
    #[serde(skip)]
    pub seed_ensembles: Vec<Vec<Vec<C64>>>,
}

impl Default for RoofOptions {
    fn default() -> Self {
        RoofOptions {
            restarts: 16,
            ensemble_factor: 2,
            max_iters: 2000,
            tol: 1e-7,
            seed: 0,
            execution: Execution::default(),
            seed_ensembles: Vec::new(),
        }
    }
}

/// Pure-state functional extended to unnormalized vectors by degree-one
/// homogeneity in `|φ⟩⟨φ|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PureFunctional {
    /// `d · |det M_φ|^{2/d}`.
    GConcurrence,
    /// `‖φ‖² · S(ρ_A)` in bits.
    EntanglementEntropy,
}

impl PureFunctional {
    pub fn eval(self, phi: &[C64], da: usize, db: usize) -> f64 {
        match self {
            PureFunctional::GConcurrence => g_unnormalized(phi, da, db),
            PureFunctional::EntanglementEntropy => weighted_entropy(phi, da, db),
        }
    }
}

pub(crate) fn g_unnormalized(phi: &[C64], da: usize, db: usize) -> f64 {
    if da != db {
        return 0.0;
    }
    let d = da;
    let det = det_unchecked(&coefficient_matrix(phi, da, db)).norm();
    d as f64 * det.powf(2.0 / d as f64)
}

/// `d · (|det M_φ|² + ε²)^{1/d}`, a smooth surrogate for the G functional.
fn g_smoothed(phi: &[C64], d: usize, eps: f64) -> f64 {
    let det = det_unchecked(&coefficient_matrix(phi, d, d)).norm_sqr();
    d as f64 * (det + eps * eps).powf(1.0 / d as f64)
}

fn weighted_entropy(phi: &[C64], da: usize, db: usize) -> f64 {
    let p: f64 = phi.iter().map(|z| z.norm_sqr()).sum();
    if p <= 1e-300 {
        return 0.0;
    }
    let m = coefficient_matrix(phi, da, db);
    let gram = if da <= db { m.matmul(&m.adjoint()) } else { m.adjoint().matmul(&m) };
    let probs: Vec<f64> = eigvalsh(&gram).into_iter().map(|l| (l / p).max(0.0)).collect();
    p * shannon_bits(&probs)
}

/// Best decomposition found by [`roof_search`].
#[derive(Debug, Clone)]
pub struct RoofOutcome {
    pub value: f64,
    pub ensemble: Vec<Vec<C64>>,
    pub sweeps: usize,
    pub converged: bool,
    /// Index of the winning start; seeds come after the random restarts.
    pub start: usize,
}

struct EnsembleProblem {
    members: Vec<Vec<C64>>,
    contributions: Vec<f64>,
    functional: PureFunctional,
    da: usize,
    db: usize,
    /// Smoothing width for the G functional; zero gives the exact value.
    eps: f64,
    scratch: (Vec<C64>, Vec<C64>),
}

impl EnsembleProblem {
    fn new(members: Vec<Vec<C64>>, functional: PureFunctional, da: usize, db: usize) -> Self {
        let mut p = EnsembleProblem {
            members,
            contributions: Vec::new(),
            functional,
            da,
            db,
            eps: 0.0,
            scratch: (Vec::new(), Vec::new()),
        };
        p.set_smoothing(0.0);
        p
    }

    fn eval(&self, phi: &[C64]) -> f64 {
        match self.functional {
            PureFunctional::GConcurrence if self.eps > 0.0 && self.da == self.db => g_smoothed(phi, self.da, self.eps),
            f => f.eval(phi, self.da, self.db),
        }
    }

    fn set_smoothing(&mut self, eps: f64) {
        self.eps = eps;
        self.contributions = self.members.iter().map(|m| self.eval(m)).collect();
    }

    fn k(&self) -> usize {
        self.members.len()
    }

    fn generator(&self, coord: usize) -> Generator {
        // skip the phase coordinates: a phase on one member leaves the
        // decomposition unchanged
        Generator::nth(self.k(), coord + self.k())
    }

    fn rows(g: Generator) -> (usize, usize) {
        match g {
            Generator::Real(i, j) | Generator::Imag(i, j) => (i, j),
            Generator::Phase(_) => unreachable!(),
        }
    }

    fn rotated(&mut self, coord: usize, t: f64) -> (usize, usize, f64, f64) {
        let g = self.generator(coord);
        let (i, j) = Self::rows(g);
        self.scratch.0.clone_from(&self.members[i]);
        self.scratch.1.clone_from(&self.members[j]);
        g.rotate_rows(&mut self.scratch.0, &mut self.scratch.1, t);
        let ci = self.eval(&self.scratch.0);
        let cj = self.eval(&self.scratch.1);
        (i, j, ci, cj)
    }
}

impl CoordinateProblem for EnsembleProblem {
    fn dimension(&self) -> usize {
        self.k() * (self.k() - 1)
    }

    fn value(&self) -> f64 {
        self.contributions.iter().sum()
    }

    fn trial(&mut self, coord: usize, t: f64) -> f64 {
        let (i, j, ci, cj) = self.rotated(coord, t);
        self.contributions
            .iter()
            .enumerate()
            .map(|(idx, &c)| {
                if idx == i {
                    ci
                } else if idx == j {
                    cj
                } else {
                    c
                }
            })
            .sum()
    }

    fn commit(&mut self, coord: usize, t: f64, _value: f64) {
        let (i, j, ci, cj) = self.rotated(coord, t);
        std::mem::swap(&mut self.members[i], &mut self.scratch.0);
        std::mem::swap(&mut self.members[j], &mut self.scratch.1);
        self.contributions[i] = ci;
        self.contributions[j] = cj;
    }
}

/// `Σ_i F(φ_i)` for an explicit decomposition.
pub fn ensemble_value(ensemble: &[Vec<C64>], functional: PureFunctional, da: usize, db: usize) -> f64 {
    ensemble.iter().map(|m| functional.eval(m, da, db)).sum()
}

fn check_ensemble(ensemble: &[Vec<C64>], rho: &ComplexMatrix) -> Result<()> {
    let n = rho.rows();
    let mut sum = ComplexMatrix::zeros(n, n);
    for m in ensemble {
        if m.len() != n {
            return Err(Error::shape(format!("ensemble member has length {}, expected {n}", m.len())));
        }
        sum = &sum + &ComplexMatrix::outer(m);
    }
    let err = (&sum - rho).frobenius_norm();
    if err > 1e-9 {
        return Err(Error::contract(format!("seed ensemble does not decompose the state (error {err:.2e})")));
    }
    Ok(())
}

/// Eigen-ensemble `{√λ_j v_j}` of the numerically nonzero eigenvalues.
pub(crate) fn eigen_ensemble(rho: &ComplexMatrix) -> Vec<Vec<C64>> {
    let (spec, vecs) = eig_hermitian_unchecked(rho);
    let top = spec.values().first().copied().unwrap_or(0.0).max(0.0);
    let n = rho.rows();
    spec.values()
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > 1e-13 * top.max(1.0))
        .map(|(j, &l)| (0..n).map(|i| vecs[(i, j)] * l.sqrt()).collect())
        .collect()
}

/// Minimizes `Σ_i F(φ_i)` over decompositions of `rho`, running
/// `opts.restarts` Haar-random starts plus every supplied seed ensemble.
/// Restart `r` draws from stream `r` of `opts.seed`.
pub fn roof_search(
    rho: &ComplexMatrix,
    da: usize,
    db: usize,
    functional: PureFunctional,
    opts: &RoofOptions,
) -> Result<RoofOutcome> {
    for e in &opts.seed_ensembles {
        check_ensemble(e, rho)?;
    }
    let base = eigen_ensemble(rho);
    let rank = base.len().max(1);
    let k = (rank * opts.ensemble_factor.max(1)).max(2);
    let n = rho.rows();
    let search =
        SearchOptions { max_sweeps: opts.max_iters, rel_tol: opts.tol, target: 0.0, ..SearchOptions::default() };
    let total = opts.restarts + opts.seed_ensembles.len();
    let runs = opts.execution.map(total, |start| {
        let members = if start < opts.restarts {
            let mut rng = sub_rng(opts.seed, start as u64);
            let u = haar_unitary(k, &mut rng);
            (0..k)
                .map(|i| {
                    let mut v = vec![C64::default(); n];
                    for (j, b) in base.iter().enumerate() {
                        let c = u[(i, j)];
                        for (x, y) in v.iter_mut().zip(b) {
                            *x += c * y;
                        }
                    }
                    v
                })
                .collect()
        } else {
            let mut seed = opts.seed_ensembles[start - opts.restarts].clone();
            if seed.len() < 2 {
                seed.push(vec![C64::default(); n]);
            }
            seed
        };
        let mut problem = EnsembleProblem::new(members, functional, da, db);
        let mut sweeps = 0;
        if functional == PureFunctional::GConcurrence && da == db {
            // |det|^{2/d} has a kink at zero where coordinate moves stall;
            // anneal through smoothed objectives first
            let scale = (1.0 / k as f64).powf(da as f64 / 2.0);
            for eps in [1e-2, 1e-3, 1e-4, 1e-5] {
                problem.set_smoothing(eps * scale);
                let smooth = SearchOptions { target: f64::NEG_INFINITY, ..search };
                sweeps += coordinate_search(&mut problem, &smooth).sweeps;
            }
            problem.set_smoothing(0.0);
        }
        let out = coordinate_search(&mut problem, &search);
        sweeps += out.sweeps;
        // recompute from scratch so the reported value carries no drift
        let value = ensemble_value(&problem.members, functional, da, db);
        RoofOutcome { value, ensemble: problem.members, sweeps, converged: out.converged, start }
    });
    runs.into_iter()
        .min_by(|a, b| a.value.total_cmp(&b.value).then(a.start.cmp(&b.start)))
        .ok_or_else(|| Error::contract("roof search needs at least one restart or seed"))
}
