use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::time::Instant;

use covsketch::hardness::{
    query_counter_demo, verify_oracle_validity, AuditToken, PurificationInstance, QueryStrategy,
};
use covsketch::hash::derive_seed;
use covsketch::instance::write_edges;
use covsketch::l0_baseline::{kcover_via_l0, sketch_sets, DistinctParams, RepeatedDistinctSketch};
use covsketch::sketch::write_sketch;
use covsketch::solvers::{
    binomial, brute_force_kcover, brute_force_setcover, greedy_kcover, kcover_via_sketch, setcover_multipass,
    setcover_outliers, KCoverConfig, OutlierParams, Solution, KCOVER_GUARD, SETCOVER_GUARD,
};
use covsketch::{CoverageInstance, Error, Exec, SetId, SketchParams, StreamingSketchBuilder};
use serde::Serialize;
use serde_json::json;

use crate::cli::{Args, Command};
use crate::error::{CliError, CliResult};
use crate::input::{edge_format, sidecar_path, GenSpec, Input, SEED_BUILDER, SEED_GOLD, SEED_L0};
use crate::report::{tagged, Report};

pub const EVAL_HEADER: [&str; 9] = [
    "instance", "seed", "algo", "k", "coverage", "opt", "ratio", "space_units", "millis",
];

/// What a command produced: a report, or CSV rows already written.
pub enum Output {
    Report(Report),
    Written,
}

pub fn run(args: &Args) -> CliResult<Output> {
    if args.repeat == 0 {
        return Err(CliError::config("--repeat must be >= 1"));
    }
    match args.command {
        Command::Gen => cmd_gen(args),
        Command::BuildSketch => cmd_build_sketch(args),
        Command::Kcover => cmd_kcover(args),
        Command::SetcoverOutliers => cmd_setcover_outliers(args),
        Command::SetcoverMultipass => cmd_setcover_multipass(args),
        Command::Brute => cmd_brute(args),
        Command::Eval => cmd_eval(args),
        Command::Hardness => cmd_hardness(args),
    }
    .map(|out| match out {
        Output::Report(mut r) => {
            r.put("seed", args.seed);
            Output::Report(r)
        }
        w => w,
    })
}

fn exec(args: &Args) -> Exec {
    if args.parallel {
        Exec::Parallel
    } else {
        Exec::Sequential
    }
}

fn need<T: Copy>(value: Option<T>, flag: &str) -> CliResult<T> {
    value.ok_or_else(|| CliError::config(format!("this command requires {flag}")))
}

fn millis(t: Instant) -> f64 {
    (t.elapsed().as_secs_f64() * 1e6).round() / 1e3
}

fn resolve_input(args: &Args) -> CliResult<Input> {
    match (&args.input, &args.gen) {
        (Some(path), None) => Input::from_path(path, edge_format(args.format), args.meta.as_deref()),
        (None, Some(spec)) => {
            let (inst, planted) = GenSpec::parse(spec)?
                .generate(args.seed)?
                .ok_or_else(|| CliError::config("this generator does not produce a coverage instance"))?;
            Ok(Input::from_instance(spec.clone(), inst, planted))
        }
        (None, None) => Err(CliError::config("provide --input PATH or --gen SPEC")),
        (Some(_), Some(_)) => Err(CliError::config("--input and --gen are mutually exclusive")),
    }
}

fn materialized(input: &Input) -> CliResult<CoverageInstance> {
    input
        .materialize()?
        .ok_or_else(|| CliError::config("this command needs a replayable input (file or --gen)"))
}

fn ids(family: &[SetId]) -> Vec<u32> {
    family.iter().map(|s| s.0).collect()
}

#[derive(Serialize)]
struct SolutionJson<'a, P: Serialize> {
    chosen: Vec<u32>,
    covered: usize,
    target_size: usize,
    estimate: Option<f64>,
    params: &'a P,
    seed: u64,
}

fn solution_json<P: Serialize>(sol: &Solution, params: &P, seed: u64) -> serde_json::Value {
    serde_json::to_value(SolutionJson {
        chosen: ids(&sol.chosen),
        covered: sol.covered_on_target,
        target_size: sol.target_size,
        estimate: sol.estimate_on_g.map(|e| e.scaled),
        params,
        seed,
    })
    .expect("solution serializes")
}

fn guarded<T>(result: covsketch::Result<T>) -> CliResult<Option<T>> {
    match result {
        Ok(v) => Ok(Some(v)),
        Err(Error::Guard { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn write_output<F>(args: &Args, write: F) -> CliResult<()>
where
    F: FnOnce(&mut dyn Write) -> CliResult<()>,
{
    match &args.out {
        Some(path) => {
            let file = File::create(path).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            write(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write(&mut lock)?;
        }
    }
    Ok(())
}

fn cmd_gen(args: &Args) -> CliResult<Output> {
    let spec = args
        .gen
        .as_deref()
        .ok_or_else(|| CliError::config("gen requires --gen SPEC"))?;
    let out = args
        .out
        .as_ref()
        .ok_or_else(|| CliError::config("gen requires --out PATH"))?;
    let (inst, planted) = GenSpec::parse(spec)?
        .generate(args.seed)?
        .ok_or_else(|| CliError::config("this generator does not produce an edge file"))?;
    let file = File::create(out).map_err(|e| CliError::io(format!("{}: {e}", out.display())))?;
    let mut w = BufWriter::new(file);
    let written = write_edges(&mut w, edge_format(args.format), inst.edges())?;
    w.flush()?;
    let meta = inst.meta();
    let sidecar = sidecar_path(out);
    serde_json::to_writer_pretty(File::create(&sidecar)?, &meta)?;
    let mut r = Report::new("gen");
    r.put("generator", spec);
    r.put("meta", meta);
    r.put("edges_written", written);
    r.put("out", out.display().to_string());
    r.put("sidecar", sidecar.display().to_string());
    r.put("planted", planted.as_deref().map(ids));
    Ok(Output::Report(r))
}

fn sketch_params(args: &Args, input: &Input) -> CliResult<SketchParams> {
    let k = need(args.k, "--k")?;
    let params = SketchParams::new(
        input.n(),
        k,
        args.eps.unwrap_or(0.2),
        args.delta2.unwrap_or(1.0),
        Some(input.meta.m),
    )?;
    if args.budget.is_none() && args.cap.is_none() {
        return Ok(params);
    }
    Ok(params.with_limits(
        args.cap.unwrap_or(params.degree_cap),
        args.budget.unwrap_or(params.edge_budget),
    )?)
}

fn cmd_build_sketch(args: &Args) -> CliResult<Output> {
    let input = resolve_input(args)?;
    let params = sketch_params(args, &input)?;
    let seed = derive_seed(args.seed, SEED_BUILDER);
    let mut source = input.source();
    let t = Instant::now();
    let mut builder = StreamingSketchBuilder::new(params, seed);
    builder.extend(source.open()?)?;
    let sketch = builder.finalize()?;
    let build_ms = millis(t);
    if let Some(path) = &args.out {
        let file = File::create(path).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
        let mut w = BufWriter::new(file);
        write_sketch(&sketch, &mut w)?;
        w.flush()?;
    }
    let mut r = Report::new("build-sketch");
    r.put("input", &input.label);
    r.put("input_edges", input.meta.edge_count);
    r.put("edge_count", sketch.total_edges());
    r.put("p_star", sketch.p_star());
    r.put("retained_elements", sketch.retained().len());
    r.put("full_retention", sketch.is_full_retention());
    r.put("space_units", sketch.space_units());
    r.put("params", params);
    r.put("builder", builder.stats());
    r.put("passes", source.passes());
    r.put("millis", json!({ "build": build_ms }));
    Ok(Output::Report(r))
}

/// Coverage recount and brute-force optimum, each tagged with its oracle.
fn kcover_oracles(inst: &CoverageInstance, chosen: &[SetId], k: usize, exec: Exec) -> CliResult<serde_json::Value> {
    let covered = inst.coverage(chosen)?;
    let opt = guarded(brute_force_kcover(inst, k, exec))?.map(|(v, _)| v);
    Ok(json!({
        "true_coverage": tagged(covered, "materialized recount"),
        "opt": opt.map(|v| tagged(v, "brute_force_kcover")),
        "ratio": opt.map(|v| if v == 0 { 1.0 } else { covered as f64 / v as f64 }),
    }))
}

fn cmd_kcover(args: &Args) -> CliResult<Output> {
    let input = resolve_input(args)?;
    let k = need(args.k, "--k")?;
    let eps = args.eps.unwrap_or(0.6);
    let exec = exec(args);
    let truth = match &input.kind {
        crate::input::InputKind::Stdin(_) => None,
        _ => Some(materialized(&input)?),
    };
    let runs = exec.map_range(args.repeat, |i| -> CliResult<serde_json::Value> {
        let run_seed = args.seed + i as u64;
        let cfg = KCoverConfig {
            n: input.n(),
            k,
            eps,
            m_hint: Some(input.meta.m),
            seed: derive_seed(run_seed, SEED_BUILDER),
        };
        let mut source = input.source();
        let t = Instant::now();
        let run = kcover_via_sketch(&mut *source, &cfg)?;
        let solve_ms = millis(t);
        let oracles = match &truth {
            Some(inst) => kcover_oracles(inst, &run.solution.chosen, k, Exec::Sequential)?,
            None => serde_json::Value::Null,
        };
        Ok(json!({
            "solution": solution_json(&run.solution, &cfg, run_seed),
            "oracles": oracles,
            "sketch_edges": run.sketch.total_edges(),
            "peak_retained_elements": run.stats.peak_elements,
            "peak_edges": run.stats.peak_edges,
            "space_units": run.sketch.space_units(),
            "passes": source.passes(),
            "millis": { "sketch_and_greedy": solve_ms },
        }))
    });
    let runs = runs.into_iter().collect::<CliResult<Vec<_>>>()?;
    let mut r = Report::new("kcover");
    r.put("input", &input.label);
    r.put("meta", input.meta);
    r.put("runs", runs);
    Ok(Output::Report(r))
}

fn cmd_setcover_outliers(args: &Args) -> CliResult<Output> {
    let input = resolve_input(args)?;
    let eps = args.eps.unwrap_or(0.3);
    let lambda = args.lambda.unwrap_or((-1.0f64).exp());
    let params = OutlierParams::new(eps, lambda, args.c)?;
    let exec = exec(args);
    let truth = match &input.kind {
        crate::input::InputKind::Stdin(_) => None,
        _ => Some(materialized(&input)?),
    };
    let kappa = match &truth {
        Some(inst) => guarded(brute_force_setcover(inst, 0.0, exec))?.map(|(v, _)| v),
        None => None,
    };
    let mut runs = Vec::new();
    for i in 0..args.repeat {
        let run_seed = args.seed + i as u64;
        let mut source = input.source();
        let t = Instant::now();
        let out = setcover_outliers(
            &mut *source,
            input.n(),
            Some(input.meta.m),
            &params,
            derive_seed(run_seed, SEED_BUILDER),
            exec,
        )?;
        let solve_ms = millis(t);
        let attempts: Vec<_> = out
            .attempts
            .iter()
            .map(|a| {
                json!({
                    "k_prime": a.k_prime,
                    "accepted": a.solution.is_some(),
                    "covered": a.covered,
                    "retained": a.retained,
                    "sketch_edges": a.sketch_edges,
                })
            })
            .collect();
        let fraction = match &truth {
            Some(inst) => Some(inst.coverage(&out.solution.chosen)? as f64 / inst.m().max(1) as f64),
            None => None,
        };
        runs.push(json!({
            "solution": solution_json(&out.solution, &params, run_seed),
            "size": out.solution.len(),
            "k_prime": out.k_prime,
            "covered_fraction": fraction.map(|f| tagged(f, "materialized recount")),
            "attempts": attempts,
            "total_sketch_edges": out.total_sketch_edges,
            "passes": source.passes(),
            "millis": { "solve": solve_ms },
        }));
    }
    let mut r = Report::new("setcover-outliers");
    r.put("input", &input.label);
    r.put("meta", input.meta);
    r.put("planted", input.planted.as_deref().map(ids));
    r.put("kappa", kappa.map(|v| tagged(v, "brute_force_setcover")));
    r.put(
        "size_bound",
        kappa.map(|k| ((1.0 + eps) * (1.0 + eps / 3.0) * k as f64 * (1.0 / params.lambda_prime()).ln()).ceil()),
    );
    r.put("runs", runs);
    Ok(Output::Report(r))
}

fn cmd_setcover_multipass(args: &Args) -> CliResult<Output> {
    let input = resolve_input(args)?;
    let r_iters = args.r.unwrap_or(2);
    let eps = args.eps.unwrap_or(0.3);
    let exec = exec(args);
    let mut runs = Vec::new();
    for i in 0..args.repeat {
        let run_seed = args.seed + i as u64;
        let mut source = input.source();
        let t = Instant::now();
        let out = setcover_multipass(
            &mut *source,
            input.n(),
            input.m(),
            r_iters,
            eps,
            args.c,
            derive_seed(run_seed, SEED_BUILDER),
            exec,
        )?;
        let solve_ms = millis(t);
        runs.push(json!({
            "solution": solution_json(&out.solution, &out.params, run_seed),
            "size": out.solution.len(),
            "iterations": out.iterations,
            "residual_edges": out.residual_edges,
            "passes": out.passes,
            "expected_passes": out.params.pass_count(),
            "millis": { "solve": solve_ms },
        }));
    }
    let mut r = Report::new("setcover-multipass");
    r.put("input", &input.label);
    r.put("meta", input.meta);
    r.put("planted", input.planted.as_deref().map(ids));
    r.put("runs", runs);
    Ok(Output::Report(r))
}

fn cmd_brute(args: &Args) -> CliResult<Output> {
    let input = resolve_input(args)?;
    let inst = materialized(&input)?;
    let exec = exec(args);
    let t = Instant::now();
    let mut r = Report::new("brute");
    r.put("input", &input.label);
    match args.k {
        Some(k) => {
            let (opt, witness) = brute_force_kcover(&inst, k, exec)?;
            r.put("k", k);
            r.put("opt", opt);
            r.put("witness", ids(&witness));
            r.put("candidates", binomial(inst.n(), k.min(inst.n())).to_string());
            r.put("guard", KCOVER_GUARD.to_string());
        }
        None => {
            let lambda = args.lambda.unwrap_or(0.0);
            let (size, witness) = brute_force_setcover(&inst, lambda, exec)?;
            r.put("lambda", lambda);
            r.put("min_cover", size);
            r.put("witness", ids(&witness));
            r.put("guard", SETCOVER_GUARD.to_string());
        }
    }
    r.put("millis", millis(t));
    Ok(Output::Report(r))
}

struct Row {
    algo: &'static str,
    chosen: Option<Vec<SetId>>,
    space_units: u64,
    millis: f64,
}

fn cmd_eval(args: &Args) -> CliResult<Output> {
    let input = resolve_input(args)?;
    let inst = materialized(&input)?;
    let k = need(args.k, "--k")?;
    let eps = args.eps.unwrap_or(0.2);
    if !(eps > 0.0 && eps < 1.0) {
        return Err(CliError::config(format!("eval eps {eps} not in (0, 1)")));
    }
    let exec = exec(args);
    let (n, m) = (input.n(), input.m());
    let graph_space = (inst.edge_count() + inst.m()) as u64;

    let t = Instant::now();
    let brute = guarded(brute_force_kcover(&inst, k, exec))?;
    let brute_ms = millis(t);
    let opt = brute.as_ref().map(|(v, _)| *v);

    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(EVAL_HEADER)?;
    for i in 0..args.repeat {
        let run_seed = args.seed + i as u64;
        let mut rows = Vec::new();

        let cfg = KCoverConfig {
            n,
            k,
            eps,
            m_hint: Some(m as u64),
            seed: derive_seed(run_seed, SEED_BUILDER),
        };
        let t = Instant::now();
        let run = kcover_via_sketch(&mut *input.source(), &cfg)?;
        rows.push(Row {
            algo: "sketch-greedy",
            chosen: Some(run.solution.chosen),
            space_units: run.sketch.space_units(),
            millis: millis(t),
        });

        let t = Instant::now();
        let l0_params = DistinctParams::for_kcover(n, k, eps)?;
        let l0_seed = derive_seed(run_seed, SEED_L0);
        let sketches = sketch_sets(
            n,
            input.source().open()?,
            || RepeatedDistinctSketch::new(l0_params, l0_seed),
            |s, e| s.insert(e),
        )?;
        let l0 = guarded(kcover_via_l0(&sketches, k, exec))?;
        rows.push(Row {
            algo: "l0-enum",
            space_units: l0.as_ref().map_or(0, |s| s.space_units as u64),
            chosen: l0.map(|s| s.chosen),
            millis: millis(t),
        });

        let t = Instant::now();
        let greedy = greedy_kcover(&inst, k);
        rows.push(Row {
            algo: "greedy",
            chosen: Some(greedy.chosen),
            space_units: graph_space,
            millis: millis(t),
        });

        rows.push(Row {
            algo: "brute",
            chosen: brute.as_ref().map(|(_, w)| w.clone()),
            space_units: graph_space,
            millis: brute_ms,
        });

        for row in rows {
            let coverage = row.chosen.as_deref().map(|c| inst.coverage(c)).transpose()?;
            let ratio = match (coverage, opt) {
                (Some(c), Some(0)) => Some(if c == 0 { 1.0 } else { f64::INFINITY }),
                (Some(c), Some(o)) => Some(c as f64 / o as f64),
                _ => None,
            };
            let skipped = coverage.is_none();
            writer.write_record([
                input.label.clone(),
                run_seed.to_string(),
                row.algo.to_owned(),
                k.to_string(),
                coverage.map_or_else(|| "skipped".into(), |c| c.to_string()),
                opt.map_or_else(String::new, |o| o.to_string()),
                ratio.map_or_else(String::new, |r| format!("{r:.6}")),
                if skipped { String::new() } else { row.space_units.to_string() },
                format!("{:.3}", row.millis),
            ])?;
        }
    }
    let bytes = writer.into_inner().map_err(|e| CliError::io(e.to_string()))?;
    write_output(args, |w| Ok(w.write_all(&bytes)?))?;
    Ok(Output::Written)
}

fn cmd_hardness(args: &Args) -> CliResult<Output> {
    if !args.unsafe_audit {
        return Err(CliError::config(
            "hardness reads the hidden gold set; pass --unsafe-audit to allow it",
        ));
    }
    let spec = args
        .gen
        .as_deref()
        .ok_or_else(|| CliError::config("hardness requires --gen purify:n=..,k=.."))?;
    let GenSpec::Purify { n, k } = GenSpec::parse(spec)? else {
        return Err(CliError::config("hardness requires a purify generator spec"));
    };
    let eps = args.eps.unwrap_or(0.1);
    let audit = AuditToken::unsafe_acknowledge();
    let inst = PurificationInstance::new(n, k, eps, derive_seed(args.seed, SEED_GOLD))?;
    let trials = args.repeat;
    let t = Instant::now();
    let report = verify_oracle_validity(&inst, trials, args.seed, exec(args), &audit);
    let validity_ms = millis(t);
    let demos: Vec<_> = [QueryStrategy::RandomSubsets, QueryStrategy::GreedyViaNoisy]
        .into_iter()
        .map(|s| {
            let d = query_counter_demo(&inst, s, trials, args.seed, &audit);
            json!({
                "strategy": d.strategy,
                "queries": d.queries,
                "succeeded": d.succeeded(),
                "first_impure_query": d.first_impure_query,
                "best_ratio": tagged(d.best_ratio, "audit"),
            })
        })
        .collect();
    let opt = inst.optimum(&audit);
    let mut r = Report::new("hardness");
    r.put("n_items", n);
    r.put("k_gold", k);
    r.put("eps", eps);
    r.put("trials", report.trials);
    r.put("impure_queries", report.impure_queries);
    r.put("violations", report.violations.len());
    r.put("first_violations", &report.violations[..report.violations.len().min(5)]);
    r.put("opt", tagged(opt.to_string(), "audit"));
    r.put("opt_is_k_plus_n", opt.to_string() == (n + k).to_string());
    r.put("demos", demos);
    r.put("millis", json!({ "validity": validity_ms }));
    Ok(Output::Report(r))
}
