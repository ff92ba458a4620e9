use asymq::channels::{det_weight_sum, random_product_unitary_mixture, KrausPair, SeparableInstrument};
use asymq::linalg::{haar_unitary, random_pure_vector, seeded_rng};
use asymq::measures::g_pure;
use asymq::verify::*;
use asymq::{BipartiteState, ComplexMatrix, Execution};

#[test]
fn small_campaigns_pass() {
    for c in Campaign::all() {
        let opts = CampaignOptions { samples: 24, dim: 3, ..Default::default() };
        let r = run_campaign(c, &opts).unwrap();
        assert!(r.passed, "{c}: {}", r.to_json());
        assert_eq!(r.violations, 0);
        assert!(r.max_violation.unwrap() <= r.tolerance);
    }
}

#[test]
fn empty_campaign_passes_vacuously() {
    let r = run_lemma1_campaign(0, 2, 3, 1).unwrap();
    assert!(r.passed);
    assert_eq!(r.max_violation, None);
    assert!(r.worst_case.is_none());
    assert_eq!(replay_worst_case(&r).unwrap(), None);
}

#[test]
fn out_of_range_parameters_are_rejected() {
    assert!(run_lemma1_campaign(4, 4, 3, 0).is_err());
    assert!(run_lemma2_campaign(4, 2, 7, 0).is_err());
    assert!(run_lemma2_campaign(4, 2, 0, 0).is_err());
    assert!("lemma9".parse::<Campaign>().is_err());
    assert_eq!("g-identity".parse::<Campaign>().unwrap(), Campaign::GIdentity);
}

#[test]
fn product_unitary_mixtures_reach_one() {
    let mut rng = seeded_rng(2);
    for d in [2, 3] {
        for k in 1..=6 {
            let ins = random_product_unitary_mixture(d, k, &mut rng);
            assert!((det_weight_sum(&ins, d).unwrap() - 1.0).abs() < 1e-10);
        }
    }
}

#[test]
fn singular_branch_lowers_the_sum() {
    let p0 = ComplexMatrix::from_real_diagonal(&[1.0, 0.0]);
    let p1 = ComplexMatrix::from_real_diagonal(&[0.0, 1.0]);
    let id = ComplexMatrix::identity(2);
    let ins =
        SeparableInstrument::trace_preserving(vec![KrausPair::new(p0, id.clone()), KrausPair::new(p1, id)]).unwrap();
    assert_eq!(det_weight_sum(&ins, 2).unwrap(), 0.0);
}

#[test]
fn identity_and_unitary_instruments_give_equality() {
    let mut rng = seeded_rng(4);
    let psi = BipartiteState::pure(3, 3, random_pure_vector(9, &mut rng)).unwrap();
    let g = g_pure(&psi).unwrap().value;
    let id = SeparableInstrument::identity(3, 3);
    assert!((det_weight_sum(&id, 3).unwrap() * g - g).abs() < 1e-10);
    let u =
        SeparableInstrument::new(vec![KrausPair::new(haar_unitary(3, &mut rng), haar_unitary(3, &mut rng))]).unwrap();
    assert!((det_weight_sum(&u, 3).unwrap() - 1.0).abs() < 1e-10);
}

#[test]
fn reports_are_deterministic_across_execution_modes() {
    for c in [Campaign::Lemma1, Campaign::Lemma2, Campaign::Theorem2] {
        let seq = CampaignOptions { samples: 12, seed: 9, execution: Execution::Sequential, ..Default::default() };
        let par = CampaignOptions { execution: Execution::Parallel, ..seq.clone() };
        let a = run_campaign(c, &seq).unwrap().to_json();
        assert_eq!(a, run_campaign(c, &seq).unwrap().to_json());
        assert_eq!(a, run_campaign(c, &par).unwrap().to_json());
    }
}

#[test]
fn worst_cases_replay_exactly() {
    for c in Campaign::all() {
        let opts = CampaignOptions { samples: 16, dim: 2, seed: 5, ..Default::default() };
        let r = run_campaign(c, &opts).unwrap();
        let json = r.to_json();
        let back: CampaignReport = serde_json::from_str(&json).unwrap();
        let v = replay_worst_case(&back).unwrap().unwrap();
        assert!((v - r.max_violation.unwrap()).abs() <= 1e-12, "{c}: {v} vs {:?}", r.max_violation);
    }
}

#[test]
fn lemma2_reports_equality_samples() {
    let r = run_lemma2_campaign(40, 2, 3, 3).unwrap();
    assert_eq!(r.details["equality_samples"], 10);
    assert_eq!(r.details["equality_branch_failures"], 0);
}

#[test]
fn timing_is_opt_in() {
    let opts = CampaignOptions { samples: 2, ..Default::default() };
    assert!(!run_campaign(Campaign::Lemma2, &opts).unwrap().to_json().contains("runtime_ms"));
    let timed = CampaignOptions { timing: true, ..opts };
    assert!(run_campaign(Campaign::Lemma2, &timed).unwrap().runtime_ms.is_some());
}
