//! Channel-restricted distance minimization: `min_Λ D(Λ(ρ), τ)` over
//! product-unitary mixtures and one-way LOCC protocols.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize, Serializer};

use super::search::{search_blocks, BlockPoint};
use crate::channels::{KrausPair, LoccDirection, OneWayLoccAnsatz, SeparableInstrument};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linalg::{
    complete_to_unitary, eigvalsh, haar_unitary, hermitian_function, kron_unchecked, sub_rng, trace_distance_hermitian,
    ComplexMatrix, C64,
};
use crate::measures::BoundDirection;
use crate::optim::SearchOptions;
use crate::states::{apply_swap, BipartiteState};

/// Restricted LOCC family searched by [`asymmetry_upper_bound`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnsatzClass {
    /// The identity channel only.
    Identity,
    /// `Σ_i p_i (U_i⊗V_i)·(U_i⊗V_i)†` with `k` terms.
    ProductUnitaryMixture(usize),
    /// Alice measures with the given number of outcomes (default: enough
    /// to fit her input), Bob applies an outcome-dependent isometry.
    OneWayAB(Option<usize>),
    OneWayBA(Option<usize>),
}

impl AnsatzClass {
    /// Every class, with default parameters.
    pub fn all() -> Vec<AnsatzClass> {
        vec![
            AnsatzClass::Identity,
            AnsatzClass::ProductUnitaryMixture(2),
            AnsatzClass::OneWayAB(None),
            AnsatzClass::OneWayBA(None),
        ]
    }
}

impl fmt::Display for AnsatzClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnsatzClass::Identity => write!(f, "identity"),
            AnsatzClass::ProductUnitaryMixture(k) => write!(f, "pum:{k}"),
            AnsatzClass::OneWayAB(None) => write!(f, "one_way_ab"),
            AnsatzClass::OneWayAB(Some(m)) => write!(f, "one_way_ab:{m}"),
            AnsatzClass::OneWayBA(None) => write!(f, "one_way_ba"),
            AnsatzClass::OneWayBA(Some(m)) => write!(f, "one_way_ba:{m}"),
        }
    }
}

impl FromStr for AnsatzClass {
    type Err = Error;

    /// Accepts `identity`, `pum[:k]`, `one_way_ab[:m]`, `one_way_ba[:m]`.
    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::Unknown { kind: "ansatz class", name: s.to_string() };
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a.parse::<usize>().map_err(|_| unknown())?)),
            None => (s, None),
        };
        if arg == Some(0) {
            return Err(unknown());
        }
        match name {
            "identity" if arg.is_none() => Ok(AnsatzClass::Identity),
            "pum" | "product_unitary_mixture" => Ok(AnsatzClass::ProductUnitaryMixture(arg.unwrap_or(2))),
            "one_way_ab" => Ok(AnsatzClass::OneWayAB(arg)),
            "one_way_ba" => Ok(AnsatzClass::OneWayBA(arg)),
            _ => Err(unknown()),
        }
    }
}

impl Serialize for AnsatzClass {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceKind {
    /// `½‖ρ − σ‖₁`.
    #[default]
    Trace,
    /// `√(2 − 2√F)` with the Uhlmann fidelity `F`.
    Bures,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymmetryOptions {
    pub restarts: usize,
    pub max_iters: usize,
    pub tol: f64,
    pub seed: u64,
    pub distance: DistanceKind,
    /// Also start from the identity channel and from block-relabelling
    /// protocols when the dimensions admit them.
    pub structured_seeds: bool,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for AsymmetryOptions {
    fn default() -> Self {
        AsymmetryOptions {
            restarts: 8,
            max_iters: 1000,
            tol: 1e-9,
            seed: 0,
            distance: DistanceKind::Trace,
            structured_seeds: true,
            execution: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymmetryEstimate {
    pub value: f64,
    pub direction: BoundDirection,
    pub ansatz_class: AnsatzClass,
    pub distance_kind: DistanceKind,
    pub best_channel: SeparableInstrument,
    /// Random restarts run; skipped when a structured seed is already exact.
    pub restarts: usize,
    pub structured_starts: usize,
    pub seed: u64,
    pub converged: bool,
}

struct Distance {
    kind: DistanceKind,
    target: ComplexMatrix,
    sqrt_target: ComplexMatrix,
}

impl Distance {
    fn new(kind: DistanceKind, target: ComplexMatrix) -> Self {
        let sqrt_target = match kind {
            DistanceKind::Trace => ComplexMatrix::zeros(0, 0),
            DistanceKind::Bures => hermitian_function(&target, |l| C64::new(l.max(0.0).sqrt(), 0.0)),
        };
        Distance { kind, target, sqrt_target }
    }

    fn eval(&self, out: &ComplexMatrix) -> f64 {
        match self.kind {
            DistanceKind::Trace => trace_distance_hermitian(out, &self.target),
            DistanceKind::Bures => {
                let m = self.sqrt_target.matmul(out).matmul(&self.sqrt_target).hermitian_part();
                let root_fidelity: f64 = eigvalsh(&m).iter().map(|l| l.max(0.0).sqrt()).sum();
                (2.0 - 2.0 * root_fidelity.min(1.0)).max(0.0).sqrt()
            }
        }
    }
}

/// Shape of a one-way protocol: party 1 measures `d1 → d1_out` with `m`
/// outcomes, party 2 applies isometries `d2 → d2_out`.
#[derive(Debug, Clone, Copy)]
struct OneWayShape {
    m: usize,
    d1: usize,
    d1_out: usize,
    d2: usize,
    d2_out: usize,
}

impl OneWayShape {
    fn new(input: (usize, usize), output: (usize, usize), outcomes: Option<usize>) -> Result<Self> {
        let (d1, d2) = input;
        let (d1_out, d2_out) = output;
        if d2_out < d2 {
            return Err(Error::contract(format!(
                "one-way correction needs an isometry {d2} -> {d2_out}, which does not exist"
            )));
        }
        let m = outcomes.unwrap_or_else(|| d1.div_ceil(d1_out).max(2));
        if m * d1_out < d1 {
            return Err(Error::contract(format!("{m} outcomes of dimension {d1_out} cannot resolve dimension {d1}")));
        }
        Ok(OneWayShape { m, d1, d1_out, d2, d2_out })
    }

    /// Blocks: one `m·d1_out` unitary whose first `d1` columns stack the
    /// measurement operators, then one `d2_out` unitary per outcome whose
    /// first `d2` columns form the correction.
    fn pairs(&self, p: &BlockPoint) -> Vec<KrausPair> {
        let q = &p.blocks[0];
        (0..self.m)
            .map(|i| {
                let m = ComplexMatrix::from_fn(self.d1_out, self.d1, |r, c| q[(i * self.d1_out + r, c)]);
                let c = &p.blocks[i + 1];
                let w = ComplexMatrix::from_fn(self.d2_out, self.d2, |r, col| c[(r, col)]);
                KrausPair::new(m, w)
            })
            .collect()
    }

    fn random_point(&self, rng: &mut crate::linalg::Rng64) -> BlockPoint {
        let mut blocks = vec![haar_unitary(self.m * self.d1_out, rng)];
        blocks.extend((0..self.m).map(|_| haar_unitary(self.d2_out, rng)));
        BlockPoint::unitaries(blocks)
    }

    fn point_from_ansatz(&self, a: &OneWayLoccAnsatz) -> Option<BlockPoint> {
        let outcomes = a.measurement.len();
        if outcomes > self.m
            || a.measurement[0].shape() != (self.d1_out, self.d1)
            || a.corrections[0].shape() != (self.d2_out, self.d2)
        {
            return None;
        }
        let n = self.m * self.d1_out;
        let stacked = ComplexMatrix::from_fn(n, self.d1, |r, c| {
            let (i, row) = (r / self.d1_out, r % self.d1_out);
            if i < outcomes {
                a.measurement[i][(row, c)]
            } else {
                C64::default()
            }
        });
        let mut blocks = vec![complete_to_unitary(&stacked)];
        for i in 0..self.m {
            blocks.push(match a.corrections.get(i) {
                Some(w) => complete_to_unitary(w),
                None => ComplexMatrix::identity(self.d2_out),
            });
        }
        Some(BlockPoint::unitaries(blocks))
    }

    fn structured_points(&self) -> Vec<BlockPoint> {
        let mut seeds = Vec::new();
        if self.d1 == self.d1_out && self.d2 == self.d2_out {
            let id = OneWayLoccAnsatz::identity(LoccDirection::AliceToBob, self.d1, self.d2);
            seeds.extend(self.point_from_ansatz(&id));
        }
        if let Some(a) =
            OneWayLoccAnsatz::block_relabel(LoccDirection::AliceToBob, self.d1, self.d1_out, self.d2, self.d2_out)
        {
            seeds.extend(self.point_from_ansatz(&a));
        }
        seeds
    }
}

fn softmax(w: &[f64]) -> Vec<f64> {
    let top = w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = w.iter().map(|x| (x - top).exp()).collect();
    let z: f64 = e.iter().sum();
    e.into_iter().map(|x| x / z).collect()
}

fn pum_pairs(p: &BlockPoint) -> Vec<KrausPair> {
    let probs = softmax(&p.weights);
    probs
        .iter()
        .enumerate()
        .map(|(i, &q)| KrausPair::new(p.blocks[2 * i].scale_real(q.sqrt()), p.blocks[2 * i + 1].clone()))
        .collect()
}

fn output(pairs: &[KrausPair], rho: &ComplexMatrix) -> ComplexMatrix {
    let mut out: Option<ComplexMatrix> = None;
    for pair in pairs {
        let x = kron_unchecked(&pair.a, &pair.b);
        let term = x.conjugate(rho);
        out = Some(match out {
            Some(acc) => &acc + &term,
            None => term,
        });
    }
    out.expect("at least one branch")
}

/// Parameterized channel family on fixed input and output dimensions.
enum Family {
    Pum { k: usize, da: usize, db: usize },
    OneWay(OneWayShape),
}

impl Family {
    fn pairs(&self, p: &BlockPoint) -> Vec<KrausPair> {
        match self {
            Family::Pum { .. } => pum_pairs(p),
            Family::OneWay(s) => s.pairs(p),
        }
    }

    fn random_point(&self, rng: &mut crate::linalg::Rng64) -> BlockPoint {
        match self {
            Family::Pum { k, da, db } => {
                let blocks = (0..*k).flat_map(|_| [haar_unitary(*da, rng), haar_unitary(*db, rng)]).collect();
                BlockPoint { blocks, weights: vec![0.0; *k] }
            }
            Family::OneWay(s) => s.random_point(rng),
        }
    }

    fn structured_points(&self) -> Vec<BlockPoint> {
        match self {
            Family::Pum { k, da, db } => {
                let blocks =
                    (0..*k).flat_map(|_| [ComplexMatrix::identity(*da), ComplexMatrix::identity(*db)]).collect();
                vec![BlockPoint { blocks, weights: vec![0.0; *k] }]
            }
            Family::OneWay(s) => s.structured_points(),
        }
    }
}

struct Minimum {
    value: f64,
    channel: SeparableInstrument,
    converged: bool,
    structured: usize,
    restarts: usize,
}

fn minimize_family(family: &Family, rho: &ComplexMatrix, dist: &Distance, opts: &AsymmetryOptions) -> Result<Minimum> {
    let seeds = if opts.structured_seeds { family.structured_points() } else { Vec::new() };
    let structured = seeds.len();
    let objective = |p: &BlockPoint| dist.eval(&output(&family.pairs(p), rho));
    let search =
        SearchOptions { max_sweeps: opts.max_iters, rel_tol: opts.tol, target: 1e-13, ..SearchOptions::default() };
    let total = structured + opts.restarts;
    if total == 0 {
        return Err(Error::contract("asymmetry search needs at least one restart or structured seed"));
    }
    let run = |start: usize| {
        let point = if start < structured {
            seeds[start].clone()
        } else {
            family.random_point(&mut sub_rng(opts.seed, (start - structured) as u64))
        };
        let (best, out) = search_blocks(point, &objective, &search);
        let best = best.cleaned();
        let pairs = family.pairs(&best);
        let value = dist.eval(&output(&pairs, rho));
        (value, pairs, out.converged, start)
    };
    let mut runs = opts.execution.map(structured, run);
    // random restarts only matter when no structured protocol is exact
    if runs.iter().all(|r| r.0 > search.target) {
        runs.extend(opts.execution.map(opts.restarts, |r| run(structured + r)));
    }
    let restarts = runs.len() - structured;
    let (value, pairs, converged, _) =
        runs.into_iter().min_by(|a, b| a.0.total_cmp(&b.0).then(a.3.cmp(&b.3))).expect("total > 0");
    Ok(Minimum { value, channel: SeparableInstrument::new(pairs)?, converged, structured, restarts })
}

/// Upper bound on `min_Λ D(Λ(ρ), τ)` over the class. Classes that do not fit
/// the input/output dimensions return a contract error.
pub fn channel_distance_upper_bound(
    rho: &BipartiteState,
    target: &BipartiteState,
    class: AnsatzClass,
    opts: &AsymmetryOptions,
) -> Result<AsymmetryEstimate> {
    let input = rho.dims();
    let out_dims = target.dims();
    let estimate =
        |value: f64, channel: SeparableInstrument, converged: bool, starts: (usize, usize)| AsymmetryEstimate {
            value,
            direction: BoundDirection::UpperBound,
            ansatz_class: class,
            distance_kind: opts.distance,
            best_channel: channel,
            restarts: starts.1,
            structured_starts: starts.0,
            seed: opts.seed,
            converged,
        };
    let same_dims = || {
        if input == out_dims {
            Ok(())
        } else {
            Err(Error::contract(format!(
                "class {class} maps {input:?} to itself, but the target has dims {out_dims:?}"
            )))
        }
    };
    match class {
        AnsatzClass::Identity => {
            same_dims()?;
            let dist = Distance::new(opts.distance, target.density().into_owned());
            let value = dist.eval(&rho.density());
            Ok(estimate(value, SeparableInstrument::identity(input.0, input.1), true, (0, 0)))
        }
        AnsatzClass::ProductUnitaryMixture(k) => {
            same_dims()?;
            if k == 0 {
                return Err(Error::contract("product-unitary mixture needs at least one term"));
            }
            let dist = Distance::new(opts.distance, target.density().into_owned());
            let family = Family::Pum { k, da: input.0, db: input.1 };
            let m = minimize_family(&family, &rho.density(), &dist, opts)?;
            Ok(estimate(m.value, m.channel, m.converged, (m.structured, m.restarts)))
        }
        AnsatzClass::OneWayAB(outcomes) => {
            let shape = OneWayShape::new(input, out_dims, outcomes)?;
            let dist = Distance::new(opts.distance, target.density().into_owned());
            let m = minimize_family(&Family::OneWay(shape), &rho.density(), &dist, opts)?;
            Ok(estimate(m.value, m.channel, m.converged, (m.structured, m.restarts)))
        }
        AnsatzClass::OneWayBA(outcomes) => {
            // Bob-first protocols on ρ are Alice-first protocols on VρV
            // towards VτV, conjugated back by the swap
            let rho_s = apply_swap(rho);
            let target_s = apply_swap(target);
            let shape = OneWayShape::new(rho_s.dims(), target_s.dims(), outcomes)?;
            let dist = Distance::new(opts.distance, target_s.density().into_owned());
            let m = minimize_family(&Family::OneWay(shape), &rho_s.density(), &dist, opts)?;
            let swapped = m.channel.branches().iter().map(|p| KrausPair::new(p.b.clone(), p.a.clone())).collect();
            Ok(estimate(m.value, SeparableInstrument::new(swapped)?, m.converged, (m.structured, m.restarts)))
        }
    }
}

/// Upper bound on the asymmetry parameter `inf_Λ D(Λ(ρ), VρV)` restricted
/// to `class`. The minimum is over structured seeds plus random restarts
/// `0..restarts`, so it never increases with the restart budget.
pub fn asymmetry_upper_bound(
    rho: &BipartiteState,
    class: AnsatzClass,
    opts: &AsymmetryOptions,
) -> Result<AsymmetryEstimate> {
    channel_distance_upper_bound(rho, &apply_swap(rho), class, opts)
}

/// Whether `class` can map states of `input` dims onto `output` dims.
pub fn class_fits(class: AnsatzClass, input: (usize, usize), output: (usize, usize)) -> bool {
    match class {
        AnsatzClass::Identity | AnsatzClass::ProductUnitaryMixture(_) => input == output,
        AnsatzClass::OneWayAB(m) => OneWayShape::new(input, output, m).is_ok(),
        AnsatzClass::OneWayBA(m) => OneWayShape::new((input.1, input.0), (output.1, output.0), m).is_ok(),
    }
}
