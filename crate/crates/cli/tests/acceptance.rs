//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::Instant;

use asymq::channels::{
    ansatz_to_instrument, channel_output, det_weight_sum, random_product_unitary_mixture, LoccDirection,
    OneWayLoccAnsatz,
};
use asymq::linalg::{haar_unitary, kron, random_density_matrix, random_pure_vector, sub_rng, trace_distance, Rng64};
use asymq::measures::{
    eof_convex_roof, g_convex_roof, symmetry_bracket, wootters_concurrence, wootters_eof, EntanglementStatus,
    RoofOptions,
};
use asymq::states::{apply_swap, bell, example_2x4_mixture, example_mix01_bell, local_spectra, product};
use asymq::swap::{
    asymmetry_upper_bound, locc_swapability_report, lu_swap_check, AnsatzClass, AsymmetryOptions, ReportOptions,
    SwapCheckOptions, SwapStatus,
};
use asymq::verify::{run_campaign, Campaign, CampaignOptions};
use asymq::{BipartiteState, ComplexMatrix, Execution, Spectrum, C64};

struct Check {
    ok: bool,
    detail: String,
}

impl Check {
    fn new(ok: bool, detail: impl Into<String>) -> Self {
        Check { ok, detail: detail.into() }
    }

    fn and(self, other: Check) -> Check {
        Check { ok: self.ok && other.ok, detail: format!("{}; {}", self.detail, other.detail) }
    }
}

fn campaign(c: Campaign, samples: usize, dim: usize, branches: usize, seed: u64) -> asymq::verify::CampaignReport {
    let opts = CampaignOptions { samples, dim, branches, seed, ..CampaignOptions::default() };
    run_campaign(c, &opts).unwrap()
}

fn lemma2() -> Check {
    let start = Instant::now();
    let mut violations = 0;
    let mut equality_failures = 0;
    let mut worst = f64::NEG_INFINITY;
    for d in [2, 3] {
        for k in 1..=6 {
            let r = campaign(Campaign::Lemma2, 1000, d, k, 100 + 10 * d as u64 + k as u64);
            violations += r.violations;
            equality_failures += r.details["equality_branch_failures"].as_u64().unwrap();
            worst = worst.max(r.max_violation.unwrap());
        }
    }
    let mut pum_dev: f64 = 0.0;
    for d in [2, 3] {
        for k in 1..=6 {
            let mut rng = sub_rng(7, (10 * d + k) as u64);
            for _ in 0..50 {
                let ins = random_product_unitary_mixture(d, k, &mut rng);
                pum_dev = pum_dev.max((det_weight_sum(&ins, d).unwrap() - 1.0).abs());
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Check::new(
        violations == 0 && equality_failures == 0 && worst <= 1e-9 && pum_dev <= 1e-10 && secs < 30.0,
        format!(
            "12000 instruments (d=2,3; k=1..6), {violations} violations, max W-1 {worst:.2e}, \
             {equality_failures} equality-branch failures, product-unitary |W-1| <= {pum_dev:.1e}, {secs:.1}s"
        ),
    )
}

fn lemma1() -> Check {
    let start = Instant::now();
    let r = campaign(Campaign::Lemma1, 1000, 2, 3, 200);
    let secs = start.elapsed().as_secs_f64();
    Check::new(
        r.violations == 0 && secs < 60.0,
        format!(
            "1000 samples d=2 k=3, {} violations, max excess {:.2e}, {secs:.1}s",
            r.violations,
            r.max_violation.unwrap()
        ),
    )
}

fn g_identity() -> Check {
    let mut ok = true;
    let mut parts = Vec::new();
    for d in [2, 3] {
        let r = campaign(Campaign::GIdentity, 1000, d, 1, 300 + d as u64);
        ok &= r.violations == 0 && r.max_violation.unwrap() <= 1e-8;
        parts.push(format!("d={d}: {} violations, max {:.2e}", r.violations, r.max_violation.unwrap()));
    }
    Check::new(ok, parts.join(", "))
}

fn random_two_qubit(seed: u64, i: usize) -> BipartiteState {
    let mut rng = sub_rng(seed, i as u64);
    BipartiteState::mixed(2, 2, random_density_matrix(4, 1 + i % 4, &mut rng)).unwrap()
}

fn roof_oracle() -> Check {
    let start = Instant::now();
    let errs = Execution::Parallel.map(200, |i| {
        let rho = random_two_qubit(400, i);
        let opts = RoofOptions { seed: i as u64, execution: Execution::Sequential, ..RoofOptions::default() };
        let g = g_convex_roof(&rho, &opts).unwrap().value;
        let e = eof_convex_roof(&rho, &opts).unwrap().value;
        ((g - wootters_concurrence(&rho).unwrap()).abs(), (e - wootters_eof(&rho).unwrap()).abs())
    });
    let g_err = errs.iter().map(|e| e.0).fold(0.0, f64::max);
    let e_err = errs.iter().map(|e| e.1).fold(0.0, f64::max);
    let secs = start.elapsed().as_secs_f64();
    Check::new(
        g_err <= 1e-3 && e_err <= 1e-3 && secs < 300.0,
        format!("200 states ranks 1-4, max |G - C| {g_err:.2e}, max |E - E_F| {e_err:.2e}, {secs:.1}s"),
    )
}

fn werner_line() -> Check {
    let phi = bell(2).density().into_owned();
    let mut worst: f64 = 0.0;
    for j in 0..=10 {
        let p = j as f64 / 10.0;
        let m = &phi.scale_real(p) + &ComplexMatrix::identity(4).scale_real((1.0 - p) / 4.0);
        let rho = BipartiteState::mixed(2, 2, m).unwrap();
        let g = g_convex_roof(&rho, &RoofOptions { seed: j, ..RoofOptions::default() }).unwrap().value;
        worst = worst.max((g - (0.0f64).max((3.0 * p - 1.0) / 2.0)).abs());
    }
    Check::new(worst <= 1e-3, format!("11-point grid, max deviation {worst:.2e}"))
}

fn entangled_mixed(seed: u64, i: usize) -> BipartiteState {
    let mut rng: Rng64 = sub_rng(seed, i as u64);
    loop {
        let rho = BipartiteState::mixed(2, 2, random_density_matrix(4, 2 + i % 3, &mut rng)).unwrap();
        if wootters_concurrence(&rho).unwrap() > 1e-6 {
            return rho;
        }
    }
}

fn theorem2_bracket() -> Check {
    let mut pure_dev: f64 = 0.0;
    for i in 0..100 {
        let d = 2 + i % 2;
        let mut rng = sub_rng(600, i as u64);
        let psi = BipartiteState::pure(d, d, random_pure_vector(d * d, &mut rng)).unwrap();
        let b = symmetry_bracket(&psi, &RoofOptions::default()).unwrap();
        pure_dev = pure_dev.max((b.s_lower.unwrap() - 1.0).abs());
    }
    let phi = symmetry_bracket(&bell(2), &RoofOptions::default()).unwrap();
    let phi_exact = phi.s_lower == Some(1.0) && phi.asym_upper == Some(0.0);

    let results = Execution::Parallel.map(200, |i| {
        let rho = entangled_mixed(601, i);
        let opts =
            RoofOptions { restarts: 8, seed: i as u64, execution: Execution::Sequential, ..RoofOptions::default() };
        let b = symmetry_bracket(&rho, &opts).unwrap();
        let eof = wootters_eof(&rho).unwrap();
        let s = b.s_lower.unwrap_or(f64::NAN);
        (0.0..=1.0).contains(&s) && b.status == EntanglementStatus::Entangled && b.ed_lower <= eof + 1e-3
    });
    let malformed = results.iter().filter(|ok| !**ok).count();
    Check::new(
        pure_dev <= 1e-6 && phi_exact && malformed == 0,
        format!(
            "100 pure states |s_lower - 1| <= {pure_dev:.1e}, Phi+ (s_lower, asym_upper) = ({:?}, {:?}), \
             {malformed}/200 mixed brackets malformed",
            phi.s_lower.unwrap(),
            phi.asym_upper.unwrap()
        ),
    )
}

fn symmetrize(m: &ComplexMatrix, d: usize) -> BipartiteState {
    let s = apply_swap(&BipartiteState::mixed(d, d, m.clone()).unwrap());
    BipartiteState::mixed(d, d, (&m.scale_real(0.5) + &s.raw().scale_real(0.5)).hermitian_part()).unwrap()
}

fn witness_distance(rho: &BipartiteState, u_a: &ComplexMatrix, u_b: &ComplexMatrix) -> f64 {
    let k = kron(u_a, u_b).unwrap();
    trace_distance(&k.conjugate(&rho.density()), &apply_swap(rho).density()).unwrap()
}

fn swap_soundness() -> Check {
    let mut rng = sub_rng(700, 0);
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let mut invariant = vec![bell(2), bell(3), product(&[one, zero], &[one, zero]).unwrap()];
    for i in 0..6 {
        let d = 2 + i % 2;
        invariant.push(symmetrize(&random_density_matrix(d * d, 1 + i % 3, &mut rng), d));
    }
    let mut worst_invariant: f64 = 0.0;
    let mut invariant_fail = 0;
    for rho in &invariant {
        let v = lu_swap_check(rho, &SwapCheckOptions::default()).unwrap();
        if v.status != SwapStatus::LuSwapable {
            invariant_fail += 1;
        }
        worst_invariant = worst_invariant.max(v.residual.unwrap_or(f64::INFINITY));
    }

    let mut others: Vec<BipartiteState> = vec![example_mix01_bell(0.5).unwrap(), example_mix01_bell(0.2).unwrap()];
    for i in 0..4 {
        let sym = symmetrize(&random_density_matrix(4, 2 + i % 2, &mut rng), 2);
        let k = kron(&haar_unitary(2, &mut rng), &haar_unitary(2, &mut rng)).unwrap();
        others.push(BipartiteState::mixed(2, 2, k.conjugate(sym.raw()).hermitian_part()).unwrap());
    }
    for i in 0..2 {
        others.push(BipartiteState::mixed(2, 2, random_density_matrix(4, 2 + i, &mut rng)).unwrap());
    }
    let (mut swapable, mut worst_witness) = (0, 0.0f64);
    for rho in invariant.iter().chain(&others) {
        let v = lu_swap_check(rho, &SwapCheckOptions { restarts: 16, ..Default::default() }).unwrap();
        if v.status == SwapStatus::LuSwapable {
            swapable += 1;
            let w = v.witness.as_ref().unwrap();
            worst_witness = worst_witness.max(witness_distance(rho, &w.u_a, &w.u_b));
        }
    }
    Check::new(
        invariant_fail == 0 && worst_invariant < 1e-10 && worst_witness <= 1e-6,
        format!(
            "{} swap-invariant states all lu_swapable: {}, max residual {worst_invariant:.1e}; \
             {swapable} witnesses re-checked, max trace distance {worst_witness:.1e}",
            invariant.len(),
            invariant_fail == 0
        ),
    )
}

fn two_by_four() -> Check {
    let rho = example_2x4_mixture();
    let (sa, sb) = local_spectra(&rho);
    let spectra = sa.matches(&Spectrum::new(vec![0.5, 0.5]), 1e-12) && sb.matches(&Spectrum::new(vec![0.25; 4]), 1e-12);
    let g = g_convex_roof(&rho, &RoofOptions::default()).unwrap().value;
    let protocol = OneWayLoccAnsatz::block_relabel(LoccDirection::BobToAlice, 4, 2, 2, 4).unwrap();
    let out = channel_output(&ansatz_to_instrument(&protocol).unwrap(), &rho).unwrap();
    let dist = trace_distance(&out, &apply_swap(&rho).density()).unwrap();
    let report = locc_swapability_report(&rho, &ReportOptions::default()).unwrap();
    let label = report.verdict.label();
    Check::new(
        spectra && g == 0.0 && dist <= 1e-9 && label == "Theorem 1 inapplicable / LOCC-swapable",
        format!("spectra ok: {spectra}, G = {g}, protocol distance {dist:.1e}, verdict \"{label}\""),
    )
}

fn sigma_star() -> Check {
    let s = example_mix01_bell(0.5).unwrap();
    let (sa, sb) = local_spectra(&s);
    let ra = s.reduced(asymq::Side::A);
    let rb = s.reduced(asymq::Side::B);
    let diag = |m: &ComplexMatrix, a: f64, b: f64| (m - &ComplexMatrix::from_real_diagonal(&[a, b])).max_abs() < 1e-12;
    let marginals = diag(&ra, 0.75, 0.25) && diag(&rb, 0.25, 0.75) && sa.matches(&sb, 1e-12);
    let c = wootters_concurrence(&s).unwrap();
    let v = lu_swap_check(&s, &SwapCheckOptions::default()).unwrap();
    let both_stages = v.spectral_necessary_passed && v.restarts_used >= 1 && v.residual.is_some();
    let td = trace_distance(s.raw(), apply_swap(&s).raw()).unwrap();
    let mut bounded = true;
    let mut monotone = true;
    let mut values = Vec::new();
    for class in [AnsatzClass::ProductUnitaryMixture(2), AnsatzClass::OneWayAB(None)] {
        let mut prev = f64::INFINITY;
        for restarts in [0, 1, 2, 4, 8] {
            let opts = AsymmetryOptions { restarts, max_iters: 400, ..Default::default() };
            let e = asymmetry_upper_bound(&s, class, &opts).unwrap().value;
            bounded &= e <= td + 1e-9;
            monotone &= e <= prev;
            prev = e;
        }
        values.push(format!("{class} {prev:.2e}"));
    }
    Check::new(
        marginals && c > 0.0 && both_stages && bounded && monotone,
        format!(
            "marginals ok: {marginals}, C = {c:.4}, LU verdict {:?} residual {:.1e} after {} restarts, \
             asymmetry [{}] <= D(s, VsV) = {td:.4}: {bounded}, monotone in budget: {monotone}",
            v.status,
            v.residual.unwrap_or(f64::NAN),
            v.restarts_used,
            values.join(", ")
        ),
    )
}

fn cli(args: &[&str]) -> Vec<u8> {
    let o = Command::new(env!("CARGO_BIN_EXE_asymq")).args(args).env_remove("ASYMQ_SEED").output().unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    o.stdout
}

fn determinism() -> Check {
    let mut identical = 0;
    let mut total = 0;
    for c in Campaign::all() {
        let n = if c == Campaign::Theorem2 { 12 } else { 200 };
        let base = CampaignOptions { samples: n, dim: 2, branches: 3, seed: 42, ..Default::default() };
        let a = run_campaign(c, &base).unwrap().to_json();
        let b = run_campaign(c, &base).unwrap().to_json();
        let seq =
            run_campaign(c, &CampaignOptions { execution: Execution::Sequential, ..base.clone() }).unwrap().to_json();
        total += 2;
        identical += (a == b) as usize + (a == seq) as usize;
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    let path = path.to_str().unwrap();
    cli(&["example", "mix01-bell", "--p", "0.5", "--out", path]);
    for cmd in ["analyze", "swapcheck"] {
        let run = || cli(&[cmd, path, "--json", "--seed", "9"]);
        total += 1;
        identical += (run() == run()) as usize;
    }
    let run = || cli(&["verify", "lemma1", "--samples", "100", "--json", "--seed", "9"]);
    total += 1;
    identical += (run() == run()) as usize;
    Check::new(identical == total, format!("{identical}/{total} repeated runs byte-identical"))
}

type Criterion = (&'static str, fn() -> Check);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("lemma 2 campaign", lemma2),
        ("lemma 1 campaign", lemma1),
        ("product identity", g_identity),
        ("convex-roof oracle agreement", roof_oracle),
        ("Werner line", werner_line),
        ("symmetry bracket", theorem2_bracket),
        ("swap soundness", swap_soundness),
        ("2x4 example", two_by_four),
        ("sigma* example", sigma_star),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let check = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Check::new(false, "panicked"));
        let check = check.and(Check::new(true, format!("wall {:.1}s", start.elapsed().as_secs_f64())));
        println!("criterion {:>2} {} {name}: {}", i + 1, if check.ok { "PASS" } else { "FAIL" }, check.detail);
        failed += !check.ok as usize;
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
