use std::fmt::Write as _;
use std::path::Path;

use serde_json::{json, Value};

use asymq::measures::{g_convex_roof, symmetry_bracket, wootters_concurrence, wootters_eof, RoofOptions};
use asymq::states::{bell, example_2x4_mixture, example_mix01_bell, load_state_with, local_spectra, product, schmidt};
use asymq::swap::{
    asymmetry_upper_bound, class_fits, locc_swapability_report, lu_swap_check, AnsatzClass, AsymmetryEstimate,
    AsymmetryOptions, ReportOptions, SwapCheckOptions,
};
use asymq::verify::{run_campaign, Campaign, CampaignOptions};
use asymq::{BipartiteState, Error, Execution, Result, C64};

use crate::{Cli, Command, Global, Output, RoofArgs};

const FORMAT: &str = "asymq-report/1";

pub fn run(cli: &Cli) -> Result<Output> {
    let g = &cli.global;
    match &cli.command {
        Command::Analyze { state, roof } => analyze(g, state, roof),
        Command::Verify { campaign, samples, dim, branches } => verify(g, campaign, *samples, *dim, *branches),
        Command::Example { name, p, dim } => example(g, name, *p, *dim),
        Command::Swapcheck { state, restarts, ansatz } => swapcheck(g, state, *restarts, ansatz.as_deref()),
    }
}

fn load(g: &Global, path: &Path) -> Result<(BipartiteState, Value)> {
    let state = load_state_with(path, &g.tol_profile.tolerances())?;
    let inline = serde_json::from_str(&state.to_json())?;
    Ok((state, inline))
}

fn roof_options(g: &Global, a: &RoofArgs) -> RoofOptions {
    RoofOptions {
        restarts: a.restarts,
        ensemble_factor: a.ensemble_factor,
        max_iters: a.max_iters,
        tol: a.tol,
        seed: g.seed,
        ..RoofOptions::default()
    }
}

fn envelope(kind: &str, g: &Global, body: Value) -> Value {
    let mut v = json!({ "format": FORMAT, "kind": kind, "seeds": [g.seed] });
    let (Value::Object(head), Value::Object(body)) = (&mut v, body) else { unreachable!("reports are objects") };
    head.extend(body);
    v
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".into(), |x| format!("{x:.6}"))
}

fn fmt_list(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
    format!("[{}]", items.join(", "))
}

/// Best bound over every default class that maps the state onto its swap.
fn best_asymmetry(rho: &BipartiteState, opts: &AsymmetryOptions) -> Result<Option<AsymmetryEstimate>> {
    let (da, db) = rho.dims();
    let mut best: Option<AsymmetryEstimate> = None;
    for class in AnsatzClass::all() {
        if class == AnsatzClass::Identity || !class_fits(class, (da, db), (db, da)) {
            continue;
        }
        let e = asymmetry_upper_bound(rho, class, opts)?;
        if best.as_ref().is_none_or(|b| e.value < b.value) {
            best = Some(e);
        }
    }
    Ok(best)
}

fn analyze(g: &Global, path: &Path, roof: &RoofArgs) -> Result<Output> {
    let (rho, inline) = load(g, path)?;
    let roof = roof_options(g, roof);
    let (sa, sb) = local_spectra(&rho);
    let schmidt_data = if rho.is_pure() { Some(schmidt(&rho)?) } else { None };
    let gc = g_convex_roof(&rho, &roof)?;
    let two_qubit = rho.dims() == (2, 2);
    let wootters = if two_qubit { Some((wootters_concurrence(&rho)?, wootters_eof(&rho)?)) } else { None };
    let bracket = symmetry_bracket(&rho, &roof)?;
    let swap_opts = SwapCheckOptions { seed: g.seed, ..SwapCheckOptions::default() };
    let lu = lu_swap_check(&rho, &swap_opts)?;
    let asym_opts = AsymmetryOptions { seed: g.seed, ..AsymmetryOptions::default() };
    let asym = best_asymmetry(&rho, &asym_opts)?;

    let mut t = String::new();
    let (da, db) = rho.dims();
    writeln!(t, "state            {da}x{db} {}", if rho.is_pure() { "pure" } else { "mixed" }).unwrap();
    writeln!(t, "spectrum A       {}", fmt_list(sa.values())).unwrap();
    writeln!(t, "spectrum B       {}", fmt_list(sb.values())).unwrap();
    if let Some(s) = &schmidt_data {
        writeln!(t, "schmidt rank     {}", s.rank).unwrap();
        writeln!(t, "schmidt coeffs   {}", fmt_list(&s.coefficients)).unwrap();
    }
    writeln!(t, "G                {:.6} ({:?})", gc.value, gc.direction).unwrap();
    if let Some((c, e)) = wootters {
        writeln!(t, "concurrence      {c:.6}").unwrap();
        writeln!(t, "EoF              {e:.6}").unwrap();
    }
    writeln!(t, "hashing bound    {:.6}", bracket.ed_lower).unwrap();
    writeln!(t, "EoF upper        {:.6}", bracket.ec_upper).unwrap();
    writeln!(t, "s_lower          {}", fmt_opt(bracket.s_lower)).unwrap();
    writeln!(t, "asym_upper       {}", fmt_opt(bracket.asym_upper)).unwrap();
    writeln!(t, "lu swap          {:?} (residual {})", lu.status, fmt_opt(lu.residual)).unwrap();
    if let Some(a) = &asym {
        writeln!(t, "asymmetry upper  {:.6} ({})", a.value, a.ansatz_class).unwrap();
    }

    let json = envelope(
        "analyze",
        g,
        json!({
            "state": inline,
            "local_spectra": { "A": sa, "B": sb },
            "schmidt": schmidt_data.map(|s| json!({ "rank": s.rank, "coefficients": s.coefficients })),
            "g": gc,
            "g_upper": gc.value,
            "wootters": wootters.map(|(c, e)| json!({ "concurrence": c, "eof": e })),
            "bracket": bracket,
            "lu": lu,
            "verdict": lu.status,
            "residual": lu.residual,
            "asymmetry": asym,
            "options": { "roof": roof, "swap": swap_opts, "asymmetry": asym_opts },
        }),
    );
    Ok(Output { json, table: t, code: 0 })
}

fn verify(g: &Global, id: &str, samples: Option<usize>, dim: usize, branches: usize) -> Result<Output> {
    let campaign: Campaign = id.parse()?;
    let default_samples = if campaign == Campaign::Theorem2 { 200 } else { 1000 };
    let opts = CampaignOptions {
        samples: samples.unwrap_or(default_samples),
        dim,
        branches,
        seed: g.seed,
        execution: Execution::Parallel,
        timing: g.timing,
    };
    let report = run_campaign(campaign, &opts)?;
    let mut t = String::new();
    writeln!(
        t,
        "{}: {} ({} samples, dims {:?}, {} violations, max violation {}, tolerance {:e})",
        report.campaign,
        if report.passed { "PASS" } else { "FAIL" },
        report.samples,
        report.dims,
        report.violations,
        report.max_violation.map_or_else(|| "n/a".into(), |v| format!("{v:.3e}")),
        report.tolerance,
    )
    .unwrap();
    if let Some(ms) = report.runtime_ms {
        writeln!(t, "runtime {ms} ms").unwrap();
    }
    let code = if report.passed { 0 } else { 1 };
    let json = envelope("campaign", g, serde_json::to_value(&report)?);
    Ok(Output { json, table: t, code })
}

fn example(g: &Global, name: &str, p: f64, dim: usize) -> Result<Output> {
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let state = match name {
        "mix01-bell" => example_mix01_bell(p)?,
        "mix-2x4" => example_2x4_mixture(),
        "bell" => {
            if dim < 2 {
                return Err(Error::Contract(format!("bell needs dimension at least 2, got {dim}")));
            }
            bell(dim)
        }
        "product" => product(&[one, zero], &[one, zero])?,
        _ => return Err(Error::Unknown { kind: "example", name: name.to_string() }),
    };
    let text = state.to_json();
    let json: Value = serde_json::from_str(&text)?;
    let table = match &g.out {
        Some(path) => format!("wrote {name} to {}\n", path.display()),
        None => text + "\n",
    };
    Ok(Output { json, table, code: 0 })
}

fn swapcheck(g: &Global, path: &Path, restarts: usize, ansatz: Option<&str>) -> Result<Output> {
    let (rho, inline) = load(g, path)?;
    let class = ansatz.map(str::parse::<AnsatzClass>).transpose()?;
    let opts = ReportOptions {
        swap: SwapCheckOptions { restarts, seed: g.seed, ..SwapCheckOptions::default() },
        roof: RoofOptions { seed: g.seed, ..RoofOptions::default() },
        asymmetry: AsymmetryOptions { seed: g.seed, ..AsymmetryOptions::default() },
    };
    let report = locc_swapability_report(&rho, &opts)?;
    let asym = class.map(|c| asymmetry_upper_bound(&rho, c, &opts.asymmetry)).transpose()?;

    let mut t = String::new();
    writeln!(t, "lu swap          {:?}", report.lu.status).unwrap();
    writeln!(t, "residual         {}", fmt_opt(report.lu.residual)).unwrap();
    writeln!(t, "spectral check   {}", if report.lu.spectral_necessary_passed { "passed" } else { "failed" }).unwrap();
    writeln!(t, "restarts used    {}", report.lu.restarts_used).unwrap();
    writeln!(t, "G                {:.6} ({:?})", report.g.value, report.g.direction).unwrap();
    if let Some(p) = &report.protocol {
        writeln!(t, "one-way protocol {:.3e} ({})", p.value, p.ansatz_class).unwrap();
    }
    if let Some(a) = &asym {
        writeln!(t, "asymmetry upper  {:.6} ({})", a.value, a.ansatz_class).unwrap();
    }
    writeln!(t, "verdict          {}", report.verdict.label()).unwrap();

    let json = envelope(
        "swapcheck",
        g,
        json!({
            "state": inline,
            "verdict": report.verdict,
            "lu": report.lu,
            "residual": report.lu.residual,
            "g_upper": report.g.value,
            "report": report,
            "asymmetry": asym,
            "options": { "swap": opts.swap, "roof": opts.roof, "asymmetry": opts.asymmetry },
        }),
    );
    Ok(Output { json, table: t, code: 0 })
}
