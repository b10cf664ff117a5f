//! Command implementations.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng as _;

use nsn_ddu_core::{
    audit_assumptions, build_reaction_map, existence_statement, follower_reaction, jacobi_solve,
    leader_best_response_with, pareto_front, scalarized_worst_case, verify_equilibrium,
    verify_follower_gne, BrMode, BrOptions, BrRefine, EquilibriumCandidate, EquilibriumCertificate,
    JacobiConfig, LeaderProfile, LqGameSpec, Regime, ReactionMap, SolveStatus, SolverDefaults,
    SweepRow, Tiebreak, Verdict,
};

use crate::csvout;
use crate::runrec::RunDir;
use crate::svg;
use crate::{
    AuditArgs, BrArgs, CmdError, CmdResult, CommonOpts, ParetoArgs, SolveArgs, SweepArgs,
    VerifyArgs, EXIT_OK, EXIT_SOLVER,
};

fn input<E: std::fmt::Display>(e: E) -> CmdError {
    CmdError::Input(e.to_string())
}

fn solver<E: std::fmt::Display>(e: E) -> CmdError {
    CmdError::Solver(e.to_string())
}

struct Loaded {
    spec: LqGameSpec,
    defaults: SolverDefaults,
    text: String,
    path: PathBuf,
}

fn load(path: &Path) -> Result<Loaded, CmdError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CmdError::Input(format!("cannot read {}: {e}", path.display())))?;
    let scenario = nsn_ddu_core::parse_scenario(&text).map_err(input)?;
    Ok(Loaded {
        spec: scenario.spec,
        defaults: scenario.solver,
        text,
        path: path.to_path_buf(),
    })
}

/// Solver settings after merging scenario defaults with flags.
#[derive(Clone)]
struct Effective {
    mode: BrMode,
    tiebreak: Tiebreak,
    max_iter: usize,
    conv_tol: f64,
    grid_x: usize,
    grid_w: usize,
    tol: f64,
    br: BrOptions,
}

impl Effective {
    fn jacobi(&self) -> JacobiConfig {
        JacobiConfig {
            mode: self.mode,
            tiebreak: self.tiebreak,
            max_iter: self.max_iter,
            conv_tol: self.conv_tol,
            br: self.br,
        }
    }
}

fn effective(
    defaults: &SolverDefaults,
    mode: Option<crate::ModeArg>,
    tiebreak: Option<crate::TiebreakArg>,
    max_iter: Option<usize>,
    conv_tol: Option<f64>,
    common: &CommonOpts,
) -> Effective {
    Effective {
        mode: mode.map(BrMode::from).unwrap_or(defaults.mode),
        tiebreak: tiebreak.map(Tiebreak::from).unwrap_or(defaults.tiebreak),
        max_iter: max_iter.unwrap_or(defaults.max_iter),
        conv_tol: conv_tol.unwrap_or(defaults.conv_tol),
        grid_x: common.grid_x.unwrap_or(defaults.grid_x),
        grid_w: common.grid_w.unwrap_or(defaults.grid_w),
        tol: common.tol.unwrap_or(defaults.tol),
        br: BrOptions {
            refine: defaults.br_refine,
            dense_grid_points: defaults.br_grid,
        },
    }
}

fn parse_floats(s: &str) -> Result<Vec<f64>, CmdError> {
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|e| CmdError::Input(format!("cannot parse `{tok}` as a number: {e}")))
        })
        .collect()
}

/// Resolves the scalarization weights from `--weights` or `--lambda`.
fn resolve_weights(
    spec: &LqGameSpec,
    defaults: &SolverDefaults,
    lambda: Option<f64>,
    weights: Option<&str>,
) -> Result<(Vec<f64>, f64), CmdError> {
    if let Some(ws) = weights {
        let w = parse_floats(ws)?;
        if w.len() != spec.n_leaders() {
            return Err(CmdError::Input(format!(
                "--weights needs {} entries, got {}",
                spec.n_leaders(),
                w.len()
            )));
        }
        let lam = if spec.n_leaders() == 2 { w[0] } else { f64::NAN };
        return Ok((w, lam));
    }
    let lam = lambda.unwrap_or(defaults.lambda);
    if !(0.0..=1.0).contains(&lam) {
        return Err(CmdError::Input(format!("--lambda {lam} outside [0, 1]")));
    }
    if spec.n_leaders() != 2 {
        return Err(CmdError::Input(
            "the lambda form needs exactly two leaders; pass --weights".into(),
        ));
    }
    Ok((vec![lam, 1.0 - lam], lam))
}

fn fmt_vec(v: &[f64]) -> String {
    let inner: Vec<String> = v.iter().map(|x| format!("{x}")).collect();
    format!("[{}]", inner.join(", "))
}

fn fmt_profile(x: &LeaderProfile) -> String {
    let blocks: Vec<String> = x
        .x
        .iter()
        .map(|b| b.iter().map(|v| format!("{v}")).collect::<Vec<_>>().join(", "))
        .collect();
    format!("[{}]", blocks.join(" | "))
}

fn regime_name(diu: bool) -> &'static str {
    if diu {
        "diu"
    } else {
        "ddu"
    }
}

fn print_certificate(cert: &EquilibriumCertificate) {
    let cand = &cert.candidate;
    println!("x*       : {}", fmt_profile(&cand.x));
    println!("w*       : {}", cand.w);
    println!("y*       : {}", fmt_vec(cand.y_virtual()));
    let weighted: f64 = cand
        .weights
        .iter()
        .zip(&cert.payoffs)
        .map(|(l, f)| l * f)
        .sum();
    println!("payoffs  : {}", fmt_vec(&cert.payoffs));
    println!("weighted : {weighted}");
    let c_line: Vec<String> = cert
        .cond_c
        .iter()
        .map(|c| format!("leader{}:{}", c.leader + 1, if c.pass { "pass" } else { "FAIL" }))
        .collect();
    println!(
        "checks   : a:{} b:{} c:[{}] d1:{} d2:{}",
        if cert.cond_a.pass { "pass" } else { "FAIL" },
        if cert.cond_b.pass { "pass" } else { "FAIL" },
        c_line.join(" "),
        if cert.cond_d1.pass { "pass" } else { "FAIL" },
        if cert.cond_d2.pass { "pass" } else { "FAIL" },
    );
    println!("verdict  : {}", cert.verdict);
}

pub fn solve(args: &SolveArgs) -> CmdResult {
    let loaded = load(&args.scenario)?;
    let eff = effective(
        &loaded.defaults,
        args.mode,
        args.tiebreak,
        args.max_iter,
        args.conv_tol,
        &args.common,
    );
    let (weights, lambda) = resolve_weights(
        &loaded.spec,
        &loaded.defaults,
        args.lambda,
        args.weights.as_deref(),
    )?;
    let spec = if args.diu {
        loaded.spec.with_ddu(false)
    } else {
        loaded.spec.clone()
    };
    let init = match &args.init {
        Some(s) => LeaderProfile::from_flat(&spec, &parse_floats(s)?).map_err(input)?,
        None => LeaderProfile::zeros(&spec),
    };

    let config = serde_json::json!({
        "lambda": lambda,
        "weights": weights,
        "regime": regime_name(args.diu),
        "mode": eff.mode.to_string(),
        "tiebreak": eff.tiebreak.to_string(),
        "init": init.flat(),
        "max_iter": eff.max_iter,
        "conv_tol": eff.conv_tol,
        "grid_x": eff.grid_x,
        "grid_w": eff.grid_w,
        "tol": eff.tol,
        "multistart": args.multistart,
    });
    let mut run = RunDir::create("solve", args.common.out.as_deref(), &loaded.path, &loaded.text, config)
        .map_err(input)?;

    let map = build_reaction_map(&spec).map_err(solver)?;

    println!("scenario : {}", loaded.path.display());
    println!(
        "regime   : {}   lambda: {}   weights: {}",
        regime_name(args.diu),
        lambda,
        fmt_vec(&weights)
    );
    println!("mode     : {}   tiebreak: {}", eff.mode, eff.tiebreak);

    if args.multistart {
        multistart(&spec, &map, &weights, &eff)?;
    }

    let outcome = jacobi_solve(&spec, &map, &weights, &init, &eff.jacobi()).map_err(solver)?;
    match &outcome.status {
        SolveStatus::Converged => {
            println!("status   : converged in {} iterations", outcome.candidate.iterations)
        }
        other => println!("status   : {other:?}"),
    }

    let cert = verify_equilibrium(&spec, &map, &outcome.candidate, eff.grid_x, eff.grid_w, eff.tol)
        .map_err(solver)?;
    print_certificate(&cert);

    run.write("trace.csv", &csvout::trace_csv(&spec, &outcome.trace))
        .map_err(solver)?;
    run.write_json("certificate.json", &cert).map_err(solver)?;
    let dir = run.finalize().map_err(solver)?;
    println!("run dir  : {}", dir.display());

    let ok = outcome.status == SolveStatus::Converged && cert.verdict != Verdict::NotEquilibrium;
    Ok(if ok { EXIT_OK } else { EXIT_SOLVER })
}

/// Runs the solver from every box corner and prints the distinct converged
/// outcomes, exposing equilibrium multiplicity.
fn multistart(
    spec: &LqGameSpec,
    map: &ReactionMap,
    weights: &[f64],
    eff: &Effective,
) -> Result<(), CmdError> {
    let dim = spec.strategy_dim();
    if dim > 12 {
        return Err(CmdError::Input(format!(
            "--multistart needs 2^{dim} starts; refusing above 2^12"
        )));
    }
    let mut distinct: Vec<(Vec<f64>, f64, Verdict, usize)> = Vec::new();
    let mut failures = 0usize;
    for mask in 0u64..(1u64 << dim) {
        let mut flat = Vec::with_capacity(dim);
        let mut pos = 0;
        for l in &spec.leaders {
            for k in 0..l.dim() {
                flat.push(if mask >> pos & 1 == 1 { l.box_hi[k] } else { l.box_lo[k] });
                pos += 1;
            }
        }
        let init = LeaderProfile::from_flat(spec, &flat).expect("corner profile");
        match jacobi_solve(spec, map, weights, &init, &eff.jacobi()) {
            Ok(out) if out.status == SolveStatus::Converged => {
                let x = out.candidate.x.flat();
                let w = out.candidate.w;
                let known = distinct.iter_mut().find(|(xs, ws, _, _)| {
                    (*ws - w).abs() <= 1e-8
                        && xs.iter().zip(&x).all(|(a, b)| (a - b).abs() <= 1e-8)
                });
                match known {
                    Some(entry) => entry.3 += 1,
                    None => {
                        let cert = verify_equilibrium(spec, map, &out.candidate, eff.grid_x, eff.grid_w, eff.tol)
                            .map_err(solver)?;
                        distinct.push((x, w, cert.verdict, 1));
                    }
                }
            }
            _ => failures += 1,
        }
    }
    println!("multistart: {} distinct outcomes, {} non-converged starts", distinct.len(), failures);
    for (x, w, verdict, hits) in &distinct {
        println!("  x = {}  w = {w}  verdict = {verdict}  ({hits} starts)", fmt_vec(x));
    }
    Ok(())
}

fn sweep_lambdas(from: f64, to: f64, step: f64) -> Result<Vec<f64>, CmdError> {
    if !(step > 0.0) {
        return Err(CmdError::Input(format!("--step must be positive, got {step}")));
    }
    if to < from {
        return Err(CmdError::Input(format!("--to {to} below --from {from}")));
    }
    for v in [from, to] {
        if !(0.0..=1.0).contains(&v) {
            return Err(CmdError::Input(format!("sweep bound {v} outside [0, 1]")));
        }
    }
    let mut k_max = ((to - from) / step).round() as i64;
    if from + k_max as f64 * step > to + 1e-9 {
        k_max -= 1;
    }
    Ok((0..=k_max.max(0))
        .map(|k| (from + k as f64 * step).min(to))
        .collect())
}

pub fn sweep(args: &SweepArgs) -> CmdResult {
    let loaded = load(&args.scenario)?;
    let eff = effective(&loaded.defaults, args.mode, args.tiebreak, None, None, &args.common);
    let lambdas = sweep_lambdas(args.from, args.to, args.step)?;
    let spec = loaded.spec.clone();
    let map = build_reaction_map(&spec).map_err(solver)?;

    let config = serde_json::json!({
        "from": args.from,
        "to": args.to,
        "step": args.step,
        "both": args.both,
        "jobs": args.jobs,
        "mode": eff.mode.to_string(),
        "tiebreak": eff.tiebreak.to_string(),
        "grid_x": eff.grid_x,
        "grid_w": eff.grid_w,
        "tol": eff.tol,
    });
    let mut run = RunDir::create("sweep", args.common.out.as_deref(), &loaded.path, &loaded.text, config)
        .map_err(input)?;

    let sweep_cfg = nsn_ddu_core::SweepConfig {
        jacobi: eff.jacobi(),
        init: None,
        grid_n_x: eff.grid_x,
        grid_n_w: eff.grid_w,
        tol: eff.tol,
    };

    let jobs = args.jobs.unwrap_or(1).max(1);
    let rows: Vec<SweepRow> = if jobs == 1 {
        nsn_ddu_core::lambda_sweep(&spec, &map, &lambdas, args.both, &sweep_cfg).map_err(solver)?
    } else {
        if spec.n_leaders() != 2 {
            return Err(CmdError::Input(
                "sweep requires exactly two leaders".into(),
            ));
        }
        let mut cells = Vec::new();
        for &l in &lambdas {
            cells.push((l, Regime::Ddu));
            if args.both {
                cells.push((l, Regime::Diu));
            }
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(solver)?;
        pool.install(|| {
            use rayon::prelude::*;
            cells
                .par_iter()
                .map(|&(l, r)| nsn_ddu_core::engine::sweep_cell(&spec, &map, l, r, &sweep_cfg))
                .collect()
        })
    };

    let csv = csvout::sweep_csv(&spec, &rows, args.both);
    run.write("sweep.csv", &csv).map_err(solver)?;

    if args.svg {
        let mut payoff_series = Vec::new();
        let mut weighted_series = Vec::new();
        let palette = ["#c03030", "#3050c0", "#208040", "#806020"];
        for (ri, regime) in [Regime::Ddu, Regime::Diu].iter().enumerate() {
            let solved: Vec<&SweepRow> = rows
                .iter()
                .filter(|r| r.regime == *regime && r.solution.is_some())
                .collect();
            if solved.is_empty() {
                continue;
            }
            for i in 0..spec.n_leaders() {
                payoff_series.push(svg::Series {
                    label: format!("f{} {}", i + 1, regime),
                    color: palette[(2 * ri + i) % palette.len()],
                    points: solved
                        .iter()
                        .map(|r| (r.lambda, r.solution.as_ref().unwrap().payoffs[i]))
                        .collect(),
                });
            }
            weighted_series.push(svg::Series {
                label: regime.to_string(),
                color: palette[ri],
                points: solved
                    .iter()
                    .map(|r| (r.lambda, r.solution.as_ref().unwrap().weighted))
                    .collect(),
            });
        }
        run.write(
            "sweep_payoffs.svg",
            &svg::line_plot("equilibrium payoffs", "lambda", "payoff", &payoff_series, &[]),
        )
        .map_err(solver)?;
        run.write(
            "sweep_weighted.svg",
            &svg::line_plot("weighted sum at equilibrium", "lambda", "weighted payoff", &weighted_series, &[]),
        )
        .map_err(solver)?;
    }

    let errors = rows.iter().filter(|r| r.error.is_some()).count();
    let dir = run.finalize().map_err(solver)?;
    println!(
        "sweep    : {} rows ({} per regime), {} errors",
        rows.len(),
        lambdas.len(),
        errors
    );
    if args.both {
        let all_ge = lambdas.iter().all(|&l| {
            let find = |reg: Regime| {
                rows.iter()
                    .find(|r| r.lambda == l && r.regime == reg)
                    .and_then(|r| r.solution.as_ref())
                    .map(|s| s.weighted)
            };
            match (find(Regime::Ddu), find(Regime::Diu)) {
                (Some(d), Some(i)) => d >= i - 1e-9,
                _ => false,
            }
        });
        println!("ddu_ge_diu: {}", if all_ge { "true for every row" } else { "VIOLATED" });
    }
    println!("run dir  : {}", dir.display());
    Ok(if errors == 0 { EXIT_OK } else { EXIT_SOLVER })
}

/// Solves one regime and returns the equilibrium candidate.
fn solve_regime(
    spec: &LqGameSpec,
    map: &ReactionMap,
    weights: &[f64],
    regime: Regime,
    eff: &Effective,
) -> Result<EquilibriumCandidate, CmdError> {
    let spec_r = match regime {
        Regime::Ddu => spec.clone(),
        Regime::Diu => spec.with_ddu(false),
    };
    let init = LeaderProfile::zeros(&spec_r);
    let outcome = jacobi_solve(&spec_r, map, weights, &init, &eff.jacobi()).map_err(solver)?;
    if outcome.status != SolveStatus::Converged {
        return Err(CmdError::Solver(format!(
            "{regime} solve did not converge: {:?}",
            outcome.status
        )));
    }
    Ok(outcome.candidate)
}

pub fn pareto(args: &ParetoArgs) -> CmdResult {
    let loaded = load(&args.scenario)?;
    if args.grid_n < 2 {
        return Err(CmdError::Input(format!(
            "--grid-n {} too small, need at least 2",
            args.grid_n
        )));
    }
    let eff = effective(&loaded.defaults, args.mode, args.tiebreak, None, None, &args.common);
    let (weights, lambda) = resolve_weights(&loaded.spec, &loaded.defaults, args.lambda, None)?;
    let regime = Regime::from(args.at);
    let map = build_reaction_map(&loaded.spec).map_err(solver)?;

    let config = serde_json::json!({
        "lambda": lambda,
        "at": regime.to_string(),
        "grid_n": args.grid_n,
        "mode": eff.mode.to_string(),
        "tiebreak": eff.tiebreak.to_string(),
    });
    let mut run = RunDir::create("pareto", args.common.out.as_deref(), &loaded.path, &loaded.text, config)
        .map_err(input)?;

    let cand = solve_regime(&loaded.spec, &map, &weights, regime, &eff)?;
    let spec_r = match regime {
        Regime::Ddu => loaded.spec.clone(),
        Regime::Diu => loaded.spec.with_ddu(false),
    };
    let front = pareto_front(&spec_r, &map, &cand.x, args.grid_n).map_err(solver)?;
    let star = scalarized_worst_case(&spec_r, &map, &cand.x, &weights).map_err(solver)?;

    run.write("pareto.csv", &csvout::pareto_csv(&spec_r, &front))
        .map_err(solver)?;
    run.write_json(
        "pareto_star.json",
        &serde_json::json!({
            "lambda": lambda,
            "regime": regime.to_string(),
            "x": cand.x.flat(),
            "w": star.w_star,
            "f": star.payoffs,
            "objective": star.objective,
            "boundary": star.boundary,
        }),
    )
    .map_err(solver)?;

    if args.svg {
        let mut series = vec![svg::Series {
            label: regime.to_string(),
            color: "#c03030",
            points: front.iter().map(|p| (p.f[0], p.f[1])).collect(),
        }];
        let mut markers = vec![svg::Marker {
            x: star.payoffs[0],
            y: star.payoffs[1],
            color: "#c03030",
        }];
        let other = match regime {
            Regime::Ddu => Regime::Diu,
            Regime::Diu => Regime::Ddu,
        };
        if let Ok(cand2) = solve_regime(&loaded.spec, &map, &weights, other, &eff) {
            let spec2 = match other {
                Regime::Ddu => loaded.spec.clone(),
                Regime::Diu => loaded.spec.with_ddu(false),
            };
            if let (Ok(front2), Ok(star2)) = (
                pareto_front(&spec2, &map, &cand2.x, args.grid_n),
                scalarized_worst_case(&spec2, &map, &cand2.x, &weights),
            ) {
                series.push(svg::Series {
                    label: other.to_string(),
                    color: "#3050c0",
                    points: front2.iter().map(|p| (p.f[0], p.f[1])).collect(),
                });
                markers.push(svg::Marker {
                    x: star2.payoffs[0],
                    y: star2.payoffs[1],
                    color: "#3050c0",
                });
            }
        }
        run.write(
            "pareto.svg",
            &svg::line_plot("objective front at the equilibrium profile", "f1", "f2", &series, &markers),
        )
        .map_err(solver)?;
    }

    let dir = run.finalize().map_err(solver)?;
    println!("regime   : {regime}   lambda: {lambda}");
    println!("x*       : {}", fmt_profile(&cand.x));
    println!(
        "front    : {} samples over w in [{}, {}]",
        front.len(),
        front.first().map(|p| p.w).unwrap_or(f64::NAN),
        front.last().map(|p| p.w).unwrap_or(f64::NAN)
    );
    println!(
        "marked   : w = {}  f = {} (scalarized minimizer)",
        star.w_star,
        fmt_vec(&star.payoffs)
    );
    println!("run dir  : {}", dir.display());
    Ok(EXIT_OK)
}

pub fn audit(args: &AuditArgs) -> CmdResult {
    let loaded = load(&args.scenario)?;
    if args.samples == 0 {
        return Err(CmdError::Input("--samples must be at least 1".into()));
    }
    let seed = args.seed.unwrap_or(loaded.defaults.seed);
    let map = build_reaction_map(&loaded.spec).map_err(solver)?;

    let config = serde_json::json!({
        "samples": args.samples,
        "seed": seed,
        "tol": args.tol,
    });
    let mut run = RunDir::create("audit", args.out.as_deref(), &loaded.path, &loaded.text, config)
        .map_err(input)?;

    let started = Instant::now();
    let report = audit_assumptions(&loaded.spec, &map, args.samples, args.tol, seed);
    let (clause, statement) = existence_statement(&report);

    run.write_json(
        "audit.json",
        &serde_json::json!({
            "report": report,
            "clause": clause,
            "statement": statement,
        }),
    )
    .map_err(solver)?;
    let dir = run.finalize().map_err(solver)?;

    println!("samples  : {} (seed {seed}, {:.0} ms)", args.samples, started.elapsed().as_millis());
    println!(
        "feasible sets : boxes {}  graph {}  interval {}",
        if report.a1a_box { "pass" } else { "FAIL" },
        if report.a1b_graph_convex.pass { "pass" } else { "FAIL" },
        if report.a1c_w_interval.pass { "pass" } else { "FAIL" },
    );
    let fmt_set = |checks: &[nsn_ddu_core::audit::SampledCheck]| {
        checks
            .iter()
            .enumerate()
            .map(|(i, c)| format!("{}:{}", i + 1, if c.pass { "pass" } else { "FAIL" }))
            .collect::<Vec<_>>()
            .join(" ")
    };
    println!("quasi-concave (strategy, outputs) : {}", fmt_set(&report.a2a_quasiconcave));
    println!("concave (outputs, uncertainty)    : {}", fmt_set(&report.a2b_concave));
    println!("quasi-concave (outputs, uncertainty): {}", fmt_set(&report.a3_quasiconcave));
    println!("verdict  : {:?}", report.verdict);
    println!("existence: {statement}");
    println!("run dir  : {}", dir.display());
    Ok(EXIT_OK)
}

pub fn verify(args: &VerifyArgs) -> CmdResult {
    let loaded = load(&args.scenario)?;
    let eff = effective(&loaded.defaults, None, None, None, None, &args.common);
    let cert_text = std::fs::read_to_string(&args.certificate)
        .map_err(|e| CmdError::Input(format!("cannot read {}: {e}", args.certificate.display())))?;
    let candidate: EquilibriumCandidate =
        match serde_json::from_str::<EquilibriumCertificate>(&cert_text) {
            Ok(cert) => cert.candidate,
            Err(_) => serde_json::from_str(&cert_text).map_err(|e| {
                CmdError::Input(format!(
                    "{} is neither a certificate nor a candidate: {e}",
                    args.certificate.display()
                ))
            })?,
        };
    let spec = if args.diu {
        loaded.spec.with_ddu(false)
    } else {
        loaded.spec.clone()
    };
    let map = build_reaction_map(&spec).map_err(solver)?;

    let config = serde_json::json!({
        "certificate": args.certificate.display().to_string(),
        "regime": regime_name(args.diu),
        "grid_x": eff.grid_x,
        "grid_w": eff.grid_w,
        "tol": eff.tol,
    });
    let mut run = RunDir::create("verify", args.common.out.as_deref(), &loaded.path, &loaded.text, config)
        .map_err(input)?;

    let cert = verify_equilibrium(&spec, &map, &candidate, eff.grid_x, eff.grid_w, eff.tol)
        .map_err(solver)?;
    print_certificate(&cert);
    run.write_json("certificate.json", &cert).map_err(solver)?;
    let dir = run.finalize().map_err(solver)?;
    println!("run dir  : {}", dir.display());
    Ok(if cert.verdict == Verdict::NotEquilibrium {
        EXIT_SOLVER
    } else {
        EXIT_OK
    })
}

pub fn br(args: &BrArgs) -> CmdResult {
    let loaded = load(&args.scenario)?;
    let eff = effective(
        &loaded.defaults,
        args.mode,
        args.tiebreak,
        None,
        None,
        &CommonOpts {
            grid_x: None,
            grid_w: None,
            tol: None,
            out: None,
        },
    );
    let (weights, _) = resolve_weights(
        &loaded.spec,
        &loaded.defaults,
        args.lambda,
        args.weights.as_deref(),
    )?;
    if args.leader == 0 || args.leader > loaded.spec.n_leaders() {
        return Err(CmdError::Input(format!(
            "--leader is 1-based; expected 1..={}",
            loaded.spec.n_leaders()
        )));
    }
    let i = args.leader - 1;
    let spec = if args.diu {
        loaded.spec.with_ddu(false)
    } else {
        loaded.spec.clone()
    };
    let profile = LeaderProfile::from_flat(&spec, &parse_floats(&args.profile)?).map_err(input)?;
    let w = match (eff.mode, args.w) {
        (BrMode::Myopic, None) => {
            return Err(CmdError::Input("myopic mode needs --w".into()));
        }
        (_, w) => w.unwrap_or(f64::NAN),
    };
    let map = build_reaction_map(&spec).map_err(solver)?;
    let br = leader_best_response_with(
        &spec,
        &map,
        i,
        &profile,
        w,
        eff.mode,
        &weights,
        eff.tiebreak,
        &BrOptions {
            refine: if eff.br.refine == BrRefine::DenseGrid {
                BrRefine::DenseGrid
            } else {
                BrRefine::Lattice
            },
            dense_grid_points: eff.br.dense_grid_points,
        },
    )
    .map_err(solver)?;
    println!("leader   : {} ({} mode)", args.leader, br.mode);
    println!("x_i      : {}", fmt_vec(&br.x_i));
    println!("value    : {}", br.value);
    println!("w used   : {}", br.w_used);
    println!("y        : {}", fmt_vec(&br.y_anticipated));
    let ties: Vec<String> = br.tie_coordinates.iter().map(|k| (k + 1).to_string()).collect();
    println!(
        "ties     : {}",
        if ties.is_empty() { "none".to_string() } else { format!("coordinates {{{}}} (1-based)", ties.join(", ")) }
    );
    Ok(EXIT_OK)
}

pub fn followers_check(scenario: &Path, samples: usize, seed: u64, tol: f64) -> CmdResult {
    let loaded = load(scenario)?;
    let spec = loaded.spec;
    let map = build_reaction_map(&spec).map_err(solver)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let x = LeaderProfile::new(
            spec.leaders
                .iter()
                .map(|l| {
                    (0..l.dim())
                        .map(|k| {
                            if l.box_hi[k] > l.box_lo[k] {
                                rng.random_range(l.box_lo[k]..=l.box_hi[k])
                            } else {
                                l.box_lo[k]
                            }
                        })
                        .collect()
                })
                .collect(),
        );
        let w = if spec.w_base_hi > spec.w_base_lo {
            rng.random_range(spec.w_base_lo..=spec.w_base_hi)
        } else {
            spec.w_base_lo
        };
        let y = follower_reaction(&map, &x, w);
        let check = verify_follower_gne(&spec, &x, w, &y, tol).map_err(solver)?;
        worst = worst.max(check.worst);
    }
    let pass = worst <= tol;
    println!("followers: {samples} states, worst best-response margin {worst:e}");
    println!("result   : {}", if pass { "pass" } else { "FAIL" });
    Ok(if pass { EXIT_OK } else { EXIT_SOLVER })
}
