//! Monte-Carlo campaigns checking the determinant-weight inequalities, the
//! product identity for G, monotonicity of G under separable operations and
//! the consistency of the symmetry bracket.
//!
//! Sample `i` of a campaign draws from stream `i` of the campaign seed, so a
//! report is reproducible from `(campaign, samples, dims, seed)` alone and
//! the worst sample can be replayed in isolation.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::channels::{
    branch_spread, det_weight, det_weight_sum, random_product_unitary_mixture, random_tp_separable_instrument,
    KrausPair, SeparableInstrument,
};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linalg::{ginibre, kron_unchecked, random_density_matrix, random_pure_vector, sub_rng, C64};
use crate::measures::{
    g_pure, g_unnormalized_vector, symmetry_bracket, wootters_concurrence, wootters_eof, RoofOptions,
};
use crate::states::BipartiteState;

pub const LEMMA1_TOL: f64 = 1e-8;
pub const LEMMA2_TOL: f64 = 1e-9;
pub const G_IDENTITY_TOL: f64 = 1e-8;
pub const MONOTONICITY_TOL: f64 = 1e-8;
/// Samples with a weight sum this close to one must have proportional-to-
/// unitary branches.
pub const EQUALITY_BAND: f64 = 1e-9;
pub const EQUALITY_SPREAD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Campaign {
    Lemma1,
    Lemma2,
    GIdentity,
    Monotonicity,
    Theorem2,
}

impl Campaign {
    pub fn id(self) -> &'static str {
        match self {
            Campaign::Lemma1 => "lemma1",
            Campaign::Lemma2 => "lemma2",
            Campaign::GIdentity => "g_identity",
            Campaign::Monotonicity => "monotonicity",
            Campaign::Theorem2 => "theorem2",
        }
    }

    pub fn all() -> [Campaign; 5] {
        [Campaign::Lemma1, Campaign::Lemma2, Campaign::GIdentity, Campaign::Monotonicity, Campaign::Theorem2]
    }

    fn tolerance(self) -> f64 {
        match self {
            Campaign::Lemma1 => LEMMA1_TOL,
            Campaign::Lemma2 => LEMMA2_TOL,
            Campaign::GIdentity => G_IDENTITY_TOL,
            Campaign::Monotonicity => MONOTONICITY_TOL,
            // per-check tolerances are folded into the violation
            Campaign::Theorem2 => 0.0,
        }
    }
}

impl fmt::Display for Campaign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Campaign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Campaign::all()
            .into_iter()
            .find(|c| c.id() == s || c.id().replace('_', "-") == s)
            .ok_or_else(|| Error::Unknown { kind: "campaign", name: s.to_string() })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignOptions {
    pub samples: usize,
    pub dim: usize,
    pub branches: usize,
    pub seed: u64,
    pub execution: Execution,
    /// Record wall-clock time in the report (breaks byte-identity).
    pub timing: bool,
}

impl Default for CampaignOptions {
    fn default() -> Self {
        CampaignOptions { samples: 1000, dim: 2, branches: 3, seed: 0, execution: Execution::default(), timing: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub campaign: Campaign,
    pub samples: usize,
    pub dims: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub branches: Option<usize>,
    pub seed: u64,
    /// Largest per-sample violation, negative when every sample holds with
    /// margin; absent for an empty campaign.
    pub max_violation: Option<f64>,
    pub violations: usize,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub runtime_ms: Option<u64>,
    pub worst_case: Option<Value>,
    /// Campaign-specific counters.
    pub details: Value,
}

impl CampaignReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization is infallible")
    }
}

struct Sample {
    violation: f64,
    failed: bool,
    flags: Vec<(&'static str, bool)>,
    inputs: Value,
}

fn state_value(s: &BipartiteState) -> Value {
    serde_json::from_str(&s.to_json()).expect("state JSON is valid")
}

fn random_pure(d: usize, rng: &mut crate::linalg::Rng64) -> BipartiteState {
    BipartiteState::pure(d, d, random_pure_vector(d * d, rng)).expect("normalized sample")
}

/// `Σ_i G(X_i ψ)` with `G` extended homogeneously, i.e. `Σ_i p_i G(σ_i)`.
fn branch_g_sum(ins: &SeparableInstrument, psi: &BipartiteState) -> f64 {
    let (da, db) = psi.dims();
    let v = psi.vector().expect("pure input");
    ins.branches()
        .iter()
        .map(|p| {
            let x = p.operator();
            let out: Vec<C64> = (0..x.rows()).map(|r| x.row(r).iter().zip(v).map(|(a, b)| a * b).sum()).collect();
            g_unnormalized_vector(&out, da, db)
        })
        .sum()
}

fn sample_instrument(i: usize, d: usize, k: usize, rng: &mut crate::linalg::Rng64) -> SeparableInstrument {
    // every fourth sample sits on the equality branch
    if i % 4 == 3 {
        random_product_unitary_mixture(d, k, rng)
    } else {
        random_tp_separable_instrument(d, k, rng)
    }
}

fn lemma1_violation(psi: &BipartiteState, ins: &SeparableInstrument, d: usize) -> Result<f64> {
    Ok(branch_g_sum(ins, psi) - det_weight_sum(ins, d)? * g_pure(psi)?.value)
}

fn lemma2_sample(ins: &SeparableInstrument, d: usize) -> Result<(f64, bool)> {
    let w = det_weight_sum(ins, d)?;
    let equality_ok = w <= 1.0 - EQUALITY_BAND || ins.branches().iter().all(|p| branch_spread(p) < EQUALITY_SPREAD);
    Ok((w - 1.0, equality_ok))
}

fn g_identity_violation(psi: &BipartiteState, pair: &KrausPair, d: usize) -> Result<f64> {
    let x = kron_unchecked(&pair.a, &pair.b);
    let v = psi.vector().expect("pure input");
    let out: Vec<C64> = (0..x.rows()).map(|r| x.row(r).iter().zip(v).map(|(a, b)| a * b).sum()).collect();
    let lhs = g_unnormalized_vector(&out, d, d);
    let rhs = det_weight(&pair.a, &pair.b, d)? * g_pure(psi)?.value;
    Ok((lhs - rhs).abs())
}

fn monotonicity_violation(psi: &BipartiteState, ins: &SeparableInstrument) -> Result<f64> {
    Ok(branch_g_sum(ins, psi) - g_pure(psi)?.value)
}

fn theorem2_roof(seed: u64) -> RoofOptions {
    RoofOptions { restarts: 8, seed, execution: Execution::Sequential, ..RoofOptions::default() }
}

/// Largest excess over the bracket checks: `0 ≤ s_lower ≤ 1`, hashing
/// `≤ E_F + 1e-3`, and `s_lower = 1` within `1e-6` on pure inputs.
fn theorem2_violation(rho: &BipartiteState, roof_seed: u64) -> Result<f64> {
    let b = symmetry_bracket(rho, &theorem2_roof(roof_seed))?;
    let s = b.s_lower.ok_or_else(|| Error::Inconsistent("entangled sample produced no bracket".into()))?;
    let eof = wootters_eof(rho)?;
    let mut v = (b.ed_lower - eof - 1e-3).max(s - 1.0).max(-s);
    if rho.is_pure() {
        v = v.max((s - 1.0).abs() - 1e-6);
    }
    Ok(v)
}

fn entangled_two_qubit(i: usize, rng: &mut crate::linalg::Rng64) -> BipartiteState {
    loop {
        let s = if i.is_multiple_of(4) {
            random_pure(2, rng)
        } else {
            BipartiteState::mixed(2, 2, random_density_matrix(4, 2 + i % 3, rng)).expect("valid sample")
        };
        if wootters_concurrence(&s).expect("2x2") > 1e-6 {
            return s;
        }
    }
}

fn check_dims(opts: &CampaignOptions, campaign: Campaign) -> Result<()> {
    if campaign == Campaign::Theorem2 {
        return Ok(());
    }
    if !(2..=3).contains(&opts.dim) {
        return Err(Error::contract(format!("campaign {campaign} needs d in {{2, 3}}, got {}", opts.dim)));
    }
    if matches!(campaign, Campaign::Lemma1 | Campaign::Lemma2 | Campaign::Monotonicity)
        && !(1..=6).contains(&opts.branches)
    {
        return Err(Error::contract(format!("campaign {campaign} needs 1..=6 branches, got {}", opts.branches)));
    }
    Ok(())
}

fn run_sample(campaign: Campaign, opts: &CampaignOptions, i: usize) -> Result<Sample> {
    let mut rng = sub_rng(opts.seed, i as u64);
    let (d, k) = (opts.dim, opts.branches);
    let tol = campaign.tolerance();
    let plain =
        |violation: f64, inputs: Value| Sample { violation, failed: violation > tol, flags: Vec::new(), inputs };
    Ok(match campaign {
        Campaign::Lemma1 => {
            let psi = random_pure(d, &mut rng);
            let ins = sample_instrument(i, d, k, &mut rng);
            let v = lemma1_violation(&psi, &ins, d)?;
            plain(v, json!({ "state": state_value(&psi), "instrument": ins.to_json_value() }))
        }
        Campaign::Lemma2 => {
            let ins = sample_instrument(i, d, k, &mut rng);
            let (v, equality_ok) = lemma2_sample(&ins, d)?;
            let near_one = v > -EQUALITY_BAND;
            Sample {
                violation: v,
                failed: v > tol || !equality_ok,
                flags: vec![("equality_samples", near_one), ("equality_branch_failures", !equality_ok)],
                inputs: json!({ "instrument": ins.to_json_value() }),
            }
        }
        Campaign::GIdentity => {
            let psi = random_pure(d, &mut rng);
            let pair = KrausPair::new(ginibre(d, d, &mut rng), ginibre(d, d, &mut rng));
            let v = g_identity_violation(&psi, &pair, d)?;
            let ins = SeparableInstrument::new(vec![pair])?;
            plain(v, json!({ "state": state_value(&psi), "instrument": ins.to_json_value() }))
        }
        Campaign::Monotonicity => {
            let psi = random_pure(d, &mut rng);
            let ins = random_tp_separable_instrument(d, k, &mut rng);
            let v = monotonicity_violation(&psi, &ins)?;
            plain(v, json!({ "state": state_value(&psi), "instrument": ins.to_json_value() }))
        }
        Campaign::Theorem2 => {
            let rho = entangled_two_qubit(i, &mut rng);
            let roof_seed = opts.seed.wrapping_add(i as u64);
            let (v, error) = match theorem2_violation(&rho, roof_seed) {
                Ok(v) => (v, false),
                Err(Error::Inconsistent(_)) => (1.0, true),
                Err(e) => return Err(e),
            };
            Sample {
                violation: v,
                failed: v > tol,
                flags: vec![("pure_samples", rho.is_pure()), ("inconsistent_brackets", error)],
                inputs: json!({ "state": state_value(&rho), "roof_seed": roof_seed }),
            }
        }
    })
}

pub fn run_campaign(campaign: Campaign, opts: &CampaignOptions) -> Result<CampaignReport> {
    check_dims(opts, campaign)?;
    let start = Instant::now();
    let samples = opts.execution.map(opts.samples, |i| run_sample(campaign, opts, i));
    let mut worst: Option<(usize, f64)> = None;
    let mut violations = 0;
    let mut counters: Vec<(&'static str, usize)> = Vec::new();
    let mut results = Vec::with_capacity(samples.len());
    for (i, s) in samples.into_iter().enumerate() {
        let s = s?;
        if s.failed {
            violations += 1;
        }
        for &(name, hit) in &s.flags {
            match counters.iter_mut().find(|(n, _)| *n == name) {
                Some(c) => c.1 += hit as usize,
                None => counters.push((name, hit as usize)),
            }
        }
        if worst.is_none_or(|(_, w)| s.violation > w) {
            worst = Some((i, s.violation));
        }
        results.push(s);
    }
    let worst_case = worst.map(|(i, _)| {
        let mut inputs = std::mem::take(&mut results[i].inputs);
        inputs["index"] = json!(i);
        inputs
    });
    let details = Value::Object(counters.into_iter().map(|(n, c)| (n.to_string(), json!(c))).collect());
    let dims = if campaign == Campaign::Theorem2 { vec![2, 2] } else { vec![opts.dim, opts.dim] };
    let branches =
        matches!(campaign, Campaign::Lemma1 | Campaign::Lemma2 | Campaign::Monotonicity).then_some(opts.branches);
    Ok(CampaignReport {
        campaign,
        samples: opts.samples,
        dims,
        branches,
        seed: opts.seed,
        max_violation: worst.map(|(_, v)| v),
        violations,
        tolerance: campaign.tolerance(),
        passed: violations == 0,
        runtime_ms: opts.timing.then(|| start.elapsed().as_millis() as u64),
        worst_case,
        details,
    })
}

fn options(n: usize, d: usize, k: usize, seed: u64) -> CampaignOptions {
    CampaignOptions { samples: n, dim: d, branches: k, seed, ..CampaignOptions::default() }
}

pub fn run_lemma1_campaign(n: usize, d: usize, k: usize, seed: u64) -> Result<CampaignReport> {
    run_campaign(Campaign::Lemma1, &options(n, d, k, seed))
}

pub fn run_lemma2_campaign(n: usize, d: usize, k: usize, seed: u64) -> Result<CampaignReport> {
    run_campaign(Campaign::Lemma2, &options(n, d, k, seed))
}

pub fn run_g_identity_campaign(n: usize, d: usize, seed: u64) -> Result<CampaignReport> {
    run_campaign(Campaign::GIdentity, &options(n, d, 1, seed))
}

pub fn run_monotonicity_campaign(n: usize, d: usize, seed: u64) -> Result<CampaignReport> {
    run_campaign(Campaign::Monotonicity, &options(n, d, 3, seed))
}

pub fn run_theorem2_consistency(n: usize, seed: u64) -> Result<CampaignReport> {
    run_campaign(Campaign::Theorem2, &options(n, 2, 1, seed))
}

/// Recomputes the violation of the recorded worst case from its serialized
/// inputs alone.
pub fn replay_worst_case(report: &CampaignReport) -> Result<Option<f64>> {
    let Some(w) = &report.worst_case else {
        return Ok(None);
    };
    let state = || -> Result<BipartiteState> {
        BipartiteState::from_json(
            &w.get("state").ok_or_else(|| Error::Parse("worst case has no state".into()))?.to_string(),
        )
    };
    let instrument = || -> Result<SeparableInstrument> {
        SeparableInstrument::from_json_value(
            w.get("instrument").cloned().ok_or_else(|| Error::Parse("worst case has no instrument".into()))?,
        )
    };
    let d = report.dims[0];
    let v = match report.campaign {
        Campaign::Lemma1 => lemma1_violation(&state()?, &instrument()?, d)?,
        Campaign::Lemma2 => lemma2_sample(&instrument()?, d)?.0,
        Campaign::GIdentity => {
            let ins = instrument()?;
            g_identity_violation(&state()?, &ins.branches()[0], d)?
        }
        Campaign::Monotonicity => monotonicity_violation(&state()?, &instrument()?)?,
        Campaign::Theorem2 => {
            let seed = w
                .get("roof_seed")
                .and_then(Value::as_u64)
                .ok_or_else(|| Error::Parse("worst case has no roof seed".into()))?;
            theorem2_violation(&state()?, seed)?
        }
    };
    Ok(Some(v))
}
