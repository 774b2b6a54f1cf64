use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use fpsearch::config::GridConfig;
use fpsearch::model2d::{apply_sequence, min_queries, success_prob_closed, width_approx, SearchParams};
use fpsearch::qsim::{run, Engine, Prep, ProblemInstance};
use fpsearch::schedule::{nest_chain, Mode};
use fpsearch::verify::run_all;
use serde_json::json;

use crate::output::{delta_from_sq, print_csv, print_json, print_pairs, sci, CliError};
use crate::{EngineArg, Format};

/// Query counts quoted elsewhere for particular `(δ², λ_0)`; `minl` flags disagreements.
const QUOTED_QUERIES: &[(f64, f64, usize)] = &[(0.1, 0.25, 4), (0.1, 0.03, 12)];

pub fn phases(l: usize, delta_sq: f64, mode: Mode, nest: &[usize], format: Format) -> Result<(), CliError> {
    let delta = delta_from_sq(delta_sq)?;
    if nest.contains(&0) {
        return Err(CliError::Usage("--nest components must be positive".into()));
    }
    let chain: Vec<usize> = std::iter::once(l).chain(nest.iter().copied()).collect();
    if chain.len() > 1 && l == 0 {
        return Err(CliError::Usage("--l must be positive when nesting".into()));
    }
    let s = nest_chain(&chain, delta, mode)?;
    match format {
        Format::Json => {
            let mut body = serde_json::to_value(s.to_record()).map_err(|e| CliError::Io(e.to_string()))?;
            body["gamma"] = json!(s.gamma());
            body["queries"] = json!(s.queries());
            print_json(body)
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> =
                s.iterates().enumerate().map(|(j, (a, b))| vec![(j + 1).to_string(), sci(a), sci(b)]).collect();
            print_csv(&["j", "alpha", "beta"], &rows)
        }
        Format::Text => {
            println!(
                "l = {}, L = {}, queries = {}, delta = {}, gamma = {}, mode = {}",
                s.l(),
                s.big_l(),
                s.queries(),
                sci(s.delta()),
                sci(s.gamma()),
                s.mode()
            );
            for (j, (a, b)) in s.iterates().enumerate() {
                println!("{:>4}  alpha = {:>24}  beta = {:>24}", j + 1, sci(a), sci(b));
            }
            Ok(())
        }
    }
}

pub fn minl(delta_sq: f64, lambda0: f64, format: Format) -> Result<(), CliError> {
    let delta = delta_from_sq(delta_sq)?;
    if delta == 0.0 {
        return Err(CliError::Usage("--delta-sq must be positive: no finite sequence reaches delta = 0".into()));
    }
    if !(lambda0 > 0.0 && lambda0 <= 1.0) {
        return Err(CliError::Usage(format!("--lambda0 must lie in (0, 1], got {lambda0}")));
    }
    let q = min_queries(delta, lambda0)?;
    let approx = width_approx(q.big_l, delta);
    let quoted = QUOTED_QUERIES
        .iter()
        .find(|(d2, l0, _)| (d2 - delta_sq).abs() < 1e-12 && (l0 - lambda0).abs() < 1e-12)
        .map(|&(_, _, n)| n)
        .filter(|&n| n != q.queries);
    match format {
        Format::Json => {
            let mut body = serde_json::to_value(q).map_err(|e| CliError::Io(e.to_string()))?;
            body["width_approx"] = json!(approx);
            body["quoted_queries"] = json!(quoted);
            print_json(body)
        }
        Format::Csv => print_csv(
            &["L", "queries", "width", "width_approx", "analytic_bound"],
            &[vec![q.big_l.to_string(), q.queries.to_string(), sci(q.width), sci(approx), sci(q.analytic_bound)]],
        ),
        Format::Text => {
            print_pairs(&[
                ("L", q.big_l.to_string()),
                ("queries", q.queries.to_string()),
                ("width", sci(q.width)),
                ("width_approx", sci(approx)),
                ("analytic_bound", sci(q.analytic_bound)),
            ])?;
            if let Some(n) = quoted {
                println!(
                    "note: {n} queries is the commonly quoted figure here; the exact width condition gives {}",
                    q.queries
                );
            }
            Ok(())
        }
    }
}

pub enum Targets {
    First(usize),
    List(Vec<usize>),
}

#[allow(clippy::too_many_arguments)]
pub fn simulate(
    n: usize,
    targets: Targets,
    l: usize,
    delta_sq: f64,
    engine: EngineArg,
    mode: Mode,
    dump: Option<&Path>,
    format: Format,
) -> Result<(), CliError> {
    let delta = delta_from_sq(delta_sq)?;
    let instance = match targets {
        Targets::First(0) => return Err(CliError::Usage("--num-marked must be positive".into())),
        Targets::First(m) if n <= 16 && m > 1 << n => {
            return Err(CliError::Usage(format!("--num-marked {m} exceeds the {} basis states", 1usize << n)))
        }
        Targets::First(m) => ProblemInstance::uniform_first(n, m)?,
        Targets::List(list) => ProblemInstance::new(n, list, Prep::Uniform)?,
    };
    if dump.is_some() && engine == EngineArg::TwoLevel {
        return Err(CliError::Usage("--dump needs the direct or circuit engine".into()));
    }
    let lambda = instance.lambda();
    let s = fpsearch::fixed_point_phases(l, delta, mode)?;
    // Marked-set probability in either mode.
    let p_closed = match mode {
        Mode::Amplify => success_prob_closed(s.big_l(), delta, lambda),
        Mode::Avoid => 1.0 - success_prob_closed(s.big_l(), delta, 1.0 - lambda),
    };
    let (p_sim, leak) = match engine {
        EngineArg::TwoLevel => (apply_sequence(&s, &SearchParams::new(lambda, delta)?).success_prob(), None),
        EngineArg::Direct | EngineArg::Circuit => {
            let e = if engine == EngineArg::Direct { Engine::Direct } else { Engine::Circuit };
            let r = run(&s, &instance, e)?;
            if let Some(path) = dump {
                let state = r.with_ancilla.as_ref().unwrap_or(&r.state);
                let file = File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                state.write_dump(BufWriter::new(file))?;
            }
            (r.probability, r.max_ancilla_leak)
        }
    };
    let diff = (p_sim - p_closed).abs();
    match format {
        Format::Json => print_json(json!({
            "n": n,
            "marked": instance.marked(),
            "mode": mode,
            "lambda": lambda,
            "L": s.big_l(),
            "queries": s.queries(),
            "p_sim": p_sim,
            "p_closed": p_closed,
            "abs_diff": diff,
            "ancilla_leak": leak,
        })),
        Format::Csv => print_csv(
            &["lambda", "L", "queries", "p_sim", "p_closed", "abs_diff", "ancilla_leak"],
            &[vec![
                sci(lambda),
                s.big_l().to_string(),
                s.queries().to_string(),
                sci(p_sim),
                sci(p_closed),
                sci(diff),
                leak.map(sci).unwrap_or_default(),
            ]],
        ),
        Format::Text => {
            let mut rows = vec![
                ("lambda", sci(lambda)),
                ("L", s.big_l().to_string()),
                ("queries", s.queries().to_string()),
                ("P_sim", sci(p_sim)),
                ("P_closed", sci(p_closed)),
                ("abs_diff", sci(diff)),
            ];
            if let Some(leak) = leak {
                rows.push(("ancilla_leak", sci(leak)));
            }
            print_pairs(&rows)
        }
    }
}

pub fn verify(profile: &str, format: Format) -> Result<(), CliError> {
    let cfg = GridConfig::builtin();
    let reports = run_all(cfg.profile(profile)?, &cfg.tolerances)?;
    match format {
        Format::Json => {
            let suites: Vec<_> = reports
                .iter()
                .map(|r| {
                    json!({
                        "suite": r.suite,
                        "passed": r.passed(),
                        "invariants": r.invariants.iter().map(|i| json!({
                            "name": i.name,
                            "checks": i.checks,
                            "worst": i.worst,
                            "passed": i.passed(),
                            "first_failure": i.first_failure,
                        })).collect::<Vec<_>>(),
                    })
                })
                .collect();
            print_json(json!({
                "profile": profile,
                "passed": reports.iter().all(|r| r.passed()),
                "suites": suites,
            }))?;
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> = reports
                .iter()
                .flat_map(|r| {
                    r.invariants.iter().map(move |i| {
                        vec![
                            r.suite.to_string(),
                            i.name.to_string(),
                            i.checks.to_string(),
                            sci(i.worst),
                            i.passed().to_string(),
                        ]
                    })
                })
                .collect();
            print_csv(&["suite", "invariant", "checks", "worst", "passed"], &rows)?;
        }
        Format::Text => {
            for r in &reports {
                println!("{r}");
            }
        }
    }
    let failed: Vec<String> = reports
        .iter()
        .flat_map(|r| {
            r.failures().map(move |i| format!("{}::{} ({})", r.suite, i.name, i.first_failure.as_deref().unwrap_or("")))
        })
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(format!("failing invariants: {}", failed.join("; "))))
    }
}
