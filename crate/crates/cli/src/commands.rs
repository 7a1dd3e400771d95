use std::path::PathBuf;

use serde::de::DeserializeOwned;
use serde_json::json;
use sl_extremal::*;

use crate::args::*;
use crate::output::{csv, num, resolve, Artifact, CliError};

type Result<T> = std::result::Result<T, CliError>;

pub fn run(command: &Command) -> Result<(Artifact, Option<PathBuf>)> {
    let (artifact, out) = match command {
        Command::Eig(a) => (eig(a)?, &a.bc.out),
        Command::EigZero(a) => (eig_zero(a)?, &a.out),
        Command::Norms(a) => (norms(a)?, &a.out),
        Command::Wdist(a) => (wdist(a)?, &a.out),
        Command::Family(a) => (family(a)?, &a.out),
        Command::VerifyThm1(a) => (verify_thm1_cmd(a)?, &a.bc.out),
        Command::VerifyThm2(a) => (verify_thm2_cmd(a)?, &a.bc.out),
        Command::Search(a) => (search(a)?, &a.bc.out),
    };
    Ok((artifact, out.output.clone()))
}

fn parse_json<T: DeserializeOwned>(inline: Option<&str>, file: Option<&PathBuf>, what: &str) -> Result<T> {
    let text = match (inline, file) {
        (Some(s), _) => s.to_owned(),
        (None, Some(p)) => std::fs::read_to_string(p)
            .map_err(|e| CliError::input("InvalidInput", format!("cannot read {}: {e}", p.display())))?,
        (None, None) => return Err(CliError::input("InvalidInput", format!("{what} is required"))),
    };
    serde_json::from_str(&text).map_err(|e| CliError::input("InvalidPotential", format!("{what}: {e}")))
}

fn potential(input: &PotentialInput) -> Result<Potential> {
    parse_json(input.q_json.as_deref(), input.q_file.as_ref(), "potential")
}

fn bc(a: &BcArgs) -> Result<RobinBC> {
    Ok(RobinBC::new(a.k0sq, a.k1sq)?)
}

fn solver(a: &SolverArgs) -> Result<SolverConfig> {
    let cfg = SolverConfig {
        ode_steps_per_cell: a.ode_steps_per_cell,
        integrator: match a.integrator {
            IntegratorArg::Exact => Integrator::Exact,
            IntegratorArg::Rk4 => Integrator::Rk4,
        },
        ..SolverConfig::default()
    };
    cfg.validate()?;
    Ok(cfg)
}

fn eig(a: &EigArgs) -> Result<Artifact> {
    let q = potential(&a.q)?;
    let bc = bc(&a.bc)?;
    let cfg = solver(&a.solver)?;
    let res = match a.samples {
        Some(n) => lambda1_with_eigenfunction(&q, &bc, &cfg, n)?,
        None => lambda1(&q, &bc, &cfg)?,
    };
    match resolve(a.bc.out.format, Format::Json) {
        Format::Json => Artifact::json(&res),
        Format::Csv => Ok(Artifact::Csv(match &res.eigenfunction_samples {
            Some(samples) => csv(&["x", "y"], samples.iter().map(|&(x, y)| vec![num(x), num(y)])),
            None => csv(
                &["lambda1", "residual", "bracket_lo", "bracket_hi", "iterations"],
                [vec![
                    num(res.lambda1),
                    num(res.residual),
                    num(res.bracket.0),
                    num(res.bracket.1),
                    res.iterations.to_string(),
                ]],
            ),
        })),
    }
}

fn eig_zero(a: &BcArgs) -> Result<Artifact> {
    let bc = bc(a)?;
    let l = lambda1_zero(&bc);
    match resolve(a.out.format, Format::Json) {
        Format::Json => Ok(Artifact::Json(json!({
            "k0sq": bc.k0sq(),
            "k1sq": bc.k1sq(),
            "lambda1": l,
        }))),
        Format::Csv => Ok(Artifact::Csv(csv(
            &["k0sq", "k1sq", "lambda1"],
            [vec![num(bc.k0sq()), num(bc.k1sq()), num(l)]],
        ))),
    }
}

fn norms(a: &NormsArgs) -> Result<Artifact> {
    let q = potential(&a.q)?;
    let step = q.step_only()?;
    let rows = a
        .p
        .iter()
        .map(|&p| Ok((p, pnorm(step, NormExponent::new(p)?)?)))
        .collect::<Result<Vec<_>>>()?;
    match resolve(a.out.format, Format::Csv) {
        Format::Csv => Ok(Artifact::Csv(csv(
            &["p", "norm"],
            rows.iter().map(|&(p, v)| vec![num(p), num(v)]),
        ))),
        Format::Json => Ok(Artifact::Json(json!({
            "rows": rows.iter().map(|&(p, v)| json!({ "p": p, "norm": v })).collect::<Vec<_>>(),
        }))),
    }
}

fn wdist(a: &WdistArgs) -> Result<Artifact> {
    let f: SignedMeasure = parse_json(a.f_json.as_deref(), a.f_file.as_ref(), "measure f")?;
    let g: SignedMeasure = if a.g_json.is_some() || a.g_file.is_some() {
        parse_json(a.g_json.as_deref(), a.g_file.as_ref(), "measure g")?
    } else {
        SignedMeasure::zero()
    };
    let rows = a
        .grid
        .iter()
        .map(|&n| Ok((n, wminus1_dist(&f, &g, n)?)))
        .collect::<Result<Vec<_>>>()?;
    match resolve(a.out.format, Format::Csv) {
        Format::Csv => Ok(Artifact::Csv(csv(
            &["grid", "distance"],
            rows.iter().map(|&(n, d)| vec![n.to_string(), num(d)]),
        ))),
        Format::Json => Ok(Artifact::Json(json!({
            "rows": rows.iter().map(|&(n, d)| json!({ "grid": n, "distance": d })).collect::<Vec<_>>(),
        }))),
    }
}

fn missing(flag: &str, statement: u8) -> CliError {
    CliError::Lib(Error::InvalidArgument(format!("--{flag} is required for statement {statement}")))
}

fn family(a: &FamilyArgs) -> Result<Artifact> {
    let gamma = GammaConstraint::new(a.gamma)?;
    let mut doc = match a.statement {
        1 => {
            let zeta = a.zeta.ok_or_else(|| missing("zeta", 1))?;
            let n = a.n.ok_or_else(|| missing("n", 1))?;
            let spec = SpikeFamilySpec::new(zeta, n)?;
            let (q, predicted) = statement1_family(&spec, a.gamma)?;
            let (lo, hi) = spec.support();
            json!({
                "statement": 1,
                "gamma": a.gamma,
                "zeta": zeta,
                "n": n,
                "support": [lo, hi],
                "gamma_norm": pnorm(&q, gamma.exponent())?,
                "predicted_gamma_norm": predicted,
                "q": q,
            })
        }
        2 => {
            let rho = a.rho.ok_or_else(|| missing("rho", 2))?;
            let tuning = TrainTuning {
                nu: a.nu,
                ..TrainTuning::default()
            };
            let mut spec = tuning.spec_for(a.gamma, rho)?;
            if let Some(m) = a.spikes {
                spec.spike_count = m;
            }
            if let Some(h) = a.spike_height {
                spec.spike_height = h;
            }
            if let Some(r) = a.floor {
                spec.floor = r;
            }
            let member = statement2_family(&spec, a.gamma)?;
            json!({
                "statement": 2,
                "gamma": a.gamma,
                "rho": rho,
                "spec": spec,
                "gamma_norm": pnorm(&member.q, gamma.exponent())?,
                "kappa": member.kappa,
                "nu_norm": member.nu_norm,
                "q": member.q,
                "f": member.f,
            })
        }
        _ => {
            let n = a.n.ok_or_else(|| missing("n", 3))?;
            let q = statement3_family(a.gamma, n)?;
            json!({
                "statement": 3,
                "gamma": a.gamma,
                "n": n,
                "gamma_norm": pnorm(&q, gamma.exponent())?,
                "q": q,
            })
        }
    };
    match resolve(a.out.format, Format::Json) {
        Format::Json => Ok(Artifact::Json(doc)),
        Format::Csv => {
            let q: StepPotential = serde_json::from_value(doc["q"].take())
                .map_err(|e| CliError::io(e.to_string()))?;
            Ok(Artifact::Csv(csv(
                &["a", "b", "height"],
                q.cells().map(|(x0, x1, h)| vec![num(x0), num(x1), num(h)]),
            )))
        }
    }
}

fn verify_thm1_cmd(a: &Thm1Args) -> Result<Artifact> {
    let defaults = TrainTuning::default();
    let tuning = TrainTuning {
        floor: a.floor.unwrap_or(defaults.floor),
        spikes_per_sqrt_rho: a.spikes_per_sqrt_rho.unwrap_or(defaults.spikes_per_sqrt_rho),
        min_spikes: a.min_spikes.unwrap_or(defaults.min_spikes),
        nu: a.nu,
        ..defaults
    };
    let table = verify_thm1(a.gamma, &bc(&a.bc)?, &a.rho, &solver(&a.solver)?, &tuning)?;
    match resolve(a.bc.out.format, Format::Csv) {
        Format::Csv => Ok(Artifact::Csv(table.to_csv())),
        Format::Json => Artifact::json(&table),
    }
}

fn verify_thm2_cmd(a: &Thm2Args) -> Result<Artifact> {
    let table = verify_thm2(a.gamma, &bc(&a.bc)?, &a.n, &solver(&a.solver)?)?;
    match resolve(a.bc.out.format, Format::Csv) {
        Format::Csv => Ok(Artifact::Csv(table.to_csv())),
        Format::Json => Artifact::json(&table),
    }
}

fn search(a: &SearchArgs) -> Result<Artifact> {
    let mode = match a.mode {
        ModeArg::Min => SearchMode::Min,
        ModeArg::Max => SearchMode::Max,
    };
    let defaults = ExtremumSearchSpec::new(a.gamma, mode, a.cells);
    let spec = ExtremumSearchSpec {
        max_iters: a.iters,
        seed: a.seed,
        initial_step: a.initial_step.unwrap_or(defaults.initial_step),
        min_step: a.min_step.unwrap_or(defaults.min_step),
        ..defaults
    };
    let bc = bc(&a.bc)?;
    let cfg = solver(&a.solver)?;
    let rounds: Vec<(Option<f64>, SearchResult)> = if a.caps.is_empty() {
        vec![(None, search_extremum(&spec, &bc, &cfg)?)]
    } else {
        a.caps
            .iter()
            .map(|&c| Some(c))
            .zip(search_with_caps(&spec, &a.caps, &bc, &cfg)?)
            .collect()
    };
    match resolve(a.bc.out.format, Format::Json) {
        Format::Json => Ok(Artifact::Json(json!({
            "spec": spec,
            "bc": bc,
            "rounds": rounds
                .iter()
                .map(|(cap, r)| json!({
                    "cap": cap,
                    "best_lambda": r.best_lambda,
                    "best_q": r.best_q,
                    "trace": r.trace,
                }))
                .collect::<Vec<_>>(),
        }))),
        Format::Csv => Ok(Artifact::Csv(csv(
            &["round", "iteration", "cell", "factor", "candidate_lambda", "accepted", "best_lambda"],
            rounds.iter().enumerate().flat_map(|(k, (_, r))| {
                r.trace.iter().map(move |t| {
                    vec![
                        k.to_string(),
                        t.iteration.to_string(),
                        t.cell.to_string(),
                        num(t.factor),
                        num(t.candidate_lambda),
                        t.accepted.to_string(),
                        num(t.best_lambda),
                    ]
                })
            }),
        ))),
    }
}
