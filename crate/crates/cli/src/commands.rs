//! One function per subcommand. Each builds its inputs echo and results
//! payload and hands them to the printer.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use setcount::asymptotics::{
    self, alpha_case, class_constants, classify, component_count, AlphaCase, Regime,
};
use setcount::exact::{count, count_log};
use setcount::sampler::{self, ForestSampler};
use setcount::species::{self, ConnectedClass};
use setcount::{Error, Result};

use crate::output::{real, to_value, OutputRecord, Printer};
use crate::{ClassArgs, Cli, Command, Mode};

pub fn name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Constants { .. } => "constants",
        Command::Exact { .. } => "exact",
        Command::Estimate { .. } => "estimate",
        Command::Compare { .. } => "compare",
        Command::Sample { .. } => "sample",
        Command::Series { .. } => "series",
    }
}

pub fn run<W: Write>(cli: &Cli, out: &mut Printer<W>) -> Result<()> {
    let emit = |out: &mut Printer<W>, inputs: Value, results: Value| -> Result<()> {
        out.record(&OutputRecord::new(name(&cli.command), inputs, results))
            .map_err(Error::from)
    };
    match &cli.command {
        Command::Constants { class, lambda } => {
            let c = load(class)?;
            let inputs = json!({"class": class_label(class), "lambda": lambda.map(real)});
            emit(out, inputs, constants(&c, *lambda)?)
        }
        Command::Exact { class, n, k, all_k, mode } => {
            let c = load(class)?;
            let ks: Vec<usize> = if *all_k { (1..=*n).collect() } else { vec![k.unwrap_or(0)] };
            let mut rows = Vec::with_capacity(ks.len());
            for &k in &ks {
                rows.push(exact_row(&c, *n, k, *mode, cli.precision_bits)?);
            }
            let inputs = json!({
                "class": class_label(class),
                "n": n,
                "k": if *all_k { Value::Null } else { json!(k) },
                "mode": mode_label(*mode),
                "precision_bits": cli.precision_bits,
            });
            let results = if *all_k { json!({"rows": rows}) } else { rows.pop().expect("one row") };
            emit(out, inputs, results)
        }
        Command::Estimate { class, n, lambda } => {
            let c = load(class)?;
            check_lambda(*lambda)?;
            let e = asymptotics::estimate(&c, *n, *lambda)?;
            let inputs = json!({"class": class_label(class), "n": n, "lambda": real(*lambda)});
            emit(out, inputs, to_value(&e))
        }
        Command::Compare { class, lambda, n_list, lambda_sweep } => {
            let c = load(class)?;
            if let Some(points) = lambda_sweep {
                let inputs = json!({"class": class_label(class), "lambda_sweep": points});
                return emit(out, inputs, sweep(&c, *points)?);
            }
            let lambda = lambda.ok_or_else(|| Error::Validation("--lambda or --lambda-sweep is required".into()))?;
            check_lambda(lambda)?;
            if n_list.is_empty() {
                return Err(Error::Validation("--n-list must name at least one size".into()));
            }
            let inputs = json!({
                "class": class_label(class),
                "lambda": real(lambda),
                "n_list": n_list,
                "precision_bits": cli.precision_bits,
            });
            emit(out, inputs, compare(&c, lambda, n_list, cli.precision_bits)?)
        }
        Command::Sample { class, x, n, k, trials, max_rejects } => {
            let seed = cli.seed.ok_or_else(|| Error::Validation("--seed is required for sample".into()))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            match (n, k) {
                (Some(n), Some(k)) => {
                    if class.class.is_some() || class.class_file.is_some() {
                        let c = load(class)?;
                        if c.name() != "trees" {
                            return Err(Error::Domain(format!(
                                "forest sampling needs the trees class, got {:?}",
                                c.name()
                            )));
                        }
                    }
                    let fs = ForestSampler::new(*n, *k, *x)?;
                    let inputs = json!({
                        "class": "trees", "n": n, "k": k, "x": real(fs.x()),
                        "trials": trials, "seed": seed, "max_rejects": max_rejects,
                    });
                    for _ in 0..*trials {
                        let f = fs.sample(&mut rng, *max_rejects)?;
                        let edges: Vec<[usize; 2]> = f.edges().into_iter().map(|(a, b)| [a, b]).collect();
                        emit(out, inputs.clone(), json!({"blocks": f.blocks, "edges": edges}))?;
                    }
                    Ok(())
                }
                _ => {
                    let c = load(class)?;
                    let x = x.ok_or_else(|| Error::Validation("sample needs --x, or --n and --k".into()))?;
                    let dist = match cli.trunc_order {
                        Some(t) => sampler::size_distribution(&c, x, t)?,
                        None => sampler::default_size_distribution(&c, x)?,
                    };
                    let inputs = json!({
                        "class": class_label(class), "x": real(x), "n_max": dist.n_max,
                        "truncated_mass": real(dist.truncated_mass), "trials": trials, "seed": seed,
                    });
                    for _ in 0..*trials {
                        let comp = sampler::sample_set(&dist, &mut rng);
                        emit(out, inputs.clone(), to_value(&comp))?;
                    }
                    Ok(())
                }
            }
        }
        Command::Series { class, terms, export, import } => {
            let (c, label) = match import {
                Some(path) => (species::from_file(path)?, Value::String(path.display().to_string())),
                None => (load(class)?, class_label(class)),
            };
            let terms = terms
                .or(cli.trunc_order)
                .or(if import.is_some() { c.max_known_size() } else { None })
                .ok_or_else(|| Error::Validation("--terms is required".into()))?;
            if terms == 0 {
                return Err(Error::Domain("terms must be at least 1".into()));
            }
            let coeffs: Vec<String> = c.coefficients(terms)?.iter().map(|v| v.to_string()).collect();
            if let Some(path) = export {
                let doc = c.export(terms)?;
                let text = serde_json::to_string_pretty(&doc).expect("serializable");
                std::fs::write(path, text + "\n")?;
            }
            let inputs = json!({
                "class": label,
                "terms": terms,
                "export": export.as_ref().map(|p| p.display().to_string()),
            });
            emit(out, inputs, json!({"name": c.name(), "coefficients": coeffs}))
        }
    }
}

fn load(args: &ClassArgs) -> Result<ConnectedClass> {
    match (&args.class, &args.class_file) {
        (Some(spec), _) => match spec.strip_prefix("synthetic:") {
            Some(params) => {
                let v: Vec<f64> = params
                    .split(',')
                    .map(|p| p.trim().parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| Error::Parse(format!("synthetic parameters {params:?}: {e}")))?;
                match v[..] {
                    [b, rho, alpha] => species::synthetic(b, rho, alpha),
                    _ => Err(Error::Parse(format!("synthetic needs b,rho,alpha, got {params:?}"))),
                }
            }
            None => species::builtin(spec),
        },
        (None, Some(path)) => species::from_file(path),
        (None, None) => Err(Error::Validation("--class or --class-file is required".into())),
    }
}

fn class_label(args: &ClassArgs) -> Value {
    match (&args.class, &args.class_file) {
        (Some(s), _) => Value::String(s.clone()),
        (None, Some(p)) => Value::String(p.display().to_string()),
        (None, None) => Value::Null,
    }
}

fn mode_label(m: Mode) -> &'static str {
    match m {
        Mode::Exact => "exact",
        Mode::Float => "float",
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("lambda out of range: {lambda} not in (0, 1)")))
    }
}

fn exact_row(c: &ConnectedClass, n: usize, k: usize, mode: Mode, prec: u32) -> Result<Value> {
    if k > n {
        return Err(Error::Domain(format!("k exceeds n: k = {k}, n = {n}")));
    }
    Ok(match mode {
        Mode::Exact => {
            let v = count(c, n, k)?;
            json!({"k": k, "count": v.to_string(), "log_count": real(v.ln())})
        }
        Mode::Float => json!({"k": k, "log_count": real(count_log(c, n, k, prec)?)}),
    })
}

/// Name of the regime constant at `lambda`.
fn constant_name(regime: Regime, acase: AlphaCase) -> &'static str {
    match (regime, acase) {
        (Regime::Below, _) => "c_minus",
        (Regime::Critical, AlphaCase::AlphaLt2) => "c",
        (Regime::Critical, AlphaCase::AlphaEq2) => "c2",
        (Regime::Critical, AlphaCase::AlphaGt2) | (Regime::Above, _) => "c_plus",
    }
}

fn regime_constant(c: &ConnectedClass, lambda: f64, regime: Regime) -> Result<f64> {
    match regime {
        Regime::Below => asymptotics::constant_below(c, lambda),
        Regime::Critical => asymptotics::constant_critical(c),
        Regime::Above => asymptotics::constant_above(c, lambda),
    }
}

fn constants(c: &ConnectedClass, lambda: Option<f64>) -> Result<Value> {
    let k = class_constants(c)?;
    let mut r = to_value(&k);
    let Some(lambda) = lambda else { return Ok(r) };
    check_lambda(lambda)?;
    let regime = classify(lambda, k.lambda_star);
    let acase = alpha_case(k.alpha);
    let point = match (regime, acase) {
        (Regime::Above, _) => Some(asymptotics::solve_supercritical(c, lambda)?),
        (Regime::Critical, AlphaCase::AlphaGt2) => Some(asymptotics::solve_supercritical(c, k.lambda_star)?),
        _ => None,
    };
    let m = r.as_object_mut().expect("constants are an object");
    m.insert("regime".into(), to_value(&regime));
    m.insert("alpha_case".into(), to_value(&acase));
    m.insert("x_lambda".into(), point.map_or(Value::Null, |p| real(p.x_lambda)));
    m.insert("c_x_lambda".into(), point.map_or(Value::Null, |p| real(p.c_x_lambda)));
    m.insert("sigma2".into(), point.map_or(Value::Null, |p| real(p.sigma2)));
    m.insert(constant_name(regime, acase).into(), real(regime_constant(c, lambda, regime)?));
    Ok(r)
}

fn compare(c: &ConnectedClass, lambda: f64, n_list: &[u64], prec: u32) -> Result<Value> {
    // exact counts are independent per n; rows keep input order
    let rows: Vec<Result<Value>> = std::thread::scope(|s| {
        let handles: Vec<_> = n_list
            .iter()
            .map(|&n| s.spawn(move || compare_row(c, lambda, n, prec)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("compare worker panicked")).collect()
    });
    Ok(json!({"rows": rows.into_iter().collect::<Result<Vec<_>>>()?}))
}

fn compare_row(c: &ConnectedClass, lambda: f64, n: u64, prec: u32) -> Result<Value> {
    let e = asymptotics::estimate(c, n, lambda)?;
    let big_n = component_count(n, lambda);
    let log_exact = count_log(c, n as usize, big_n as usize, prec)?;
    Ok(json!({
        "n": n,
        "log_exact": real(log_exact),
        "log_est": real(e.log_count),
        "ratio": real((log_exact - e.log_count).exp()),
    }))
}

fn sweep(c: &ConnectedClass, points: usize) -> Result<Value> {
    if points == 0 {
        return Err(Error::Domain("lambda sweep needs at least one point".into()));
    }
    let k = class_constants(c)?;
    let acase = alpha_case(k.alpha);
    let mut rows = Vec::with_capacity(points);
    for i in 1..=points {
        let lambda = i as f64 / (points + 1) as f64;
        let regime = classify(lambda, k.lambda_star);
        rows.push(json!({
            "lambda": real(lambda),
            "regime": to_value(&regime),
            "constant_name": constant_name(regime, acase),
            "constant": real(regime_constant(c, lambda, regime)?),
        }));
    }
    Ok(json!({"lambda_star": real(k.lambda_star), "rows": rows}))
}
