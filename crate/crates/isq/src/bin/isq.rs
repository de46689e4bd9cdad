//! Command-line driver: validates a JSON run configuration and emits
//! deterministic CSV/JSON artifacts for the classical, spectral, kernel
//! and wave-packet tasks, plus a self-test table.
//!
//! Exit codes: 0 success, 1 invalid configuration, 2 numerical failure.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use isq::classical::{self, ClassicalState};
use isq::config::{Resolved, RunConfig};
use isq::dynamics;
use isq::eigenbasis::{
    assemble_eigenstate, degenerate_pair, sigma1_eigenstate, Sigma1Basis,
};
use isq::model::{Exponents, PhysicalParams};
use isq::propagator::{
    caustic_weights, kernel_closed, kernel_spectral_extrapolated, KernelRequest,
};
use isq::quad;
use isq::spectrum::{solve_spectrum, spectral_family, Branch};
use isq::{IsqError, Result};

#[derive(Debug, Clone, Copy, PartialEq, ValueEnum)]
enum Profile {
    Strict,
    Fast,
}

#[derive(Parser, Debug)]
#[command(
    name = "isq",
    about = "Harmonic oscillator with an inverse-square core on the punctured line"
)]
struct Cli {
    /// JSON run configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Task override: classical | spectrum | eigenstates | kernel | evolve | copy-demo | selftest.
    #[arg(long)]
    task: Option<String>,
    /// Output directory for artifacts.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Seed override for randomized sweeps.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "strict")]
    tolerance_profile: Profile,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &IsqError) -> u8 {
    match e {
        IsqError::Config(_)
        | IsqError::InvalidParams(_)
        | IsqError::NotUnitary { .. }
        | IsqError::Io(_) => 1,
        _ => 2,
    }
}

fn run(cli: &Cli) -> Result<()> {
    if let Ok(threads) = std::env::var("ISQ_THREADS") {
        let n: usize = threads
            .parse()
            .map_err(|_| IsqError::Config(format!("ISQ_THREADS={threads:?} is not a number")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .ok();
    }
    let text = match &cli.config {
        Some(path) => std::fs::read_to_string(path)?,
        None => r#"{ "g": 0.15625 }"#.to_string(),
    };
    let mut cfg = RunConfig::from_json(&text)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let resolved = cfg.validate()?;
    let task = cli
        .task
        .clone()
        .or_else(|| cfg.task.clone())
        .unwrap_or_else(|| "selftest".to_string());
    if !isq::config::TASKS.contains(&task.as_str()) {
        return Err(IsqError::Config(format!("unknown task {task:?}")));
    }
    std::fs::create_dir_all(&cli.out)?;
    match task.as_str() {
        "classical" => task_classical(&resolved, &cli.out),
        "spectrum" => task_spectrum(&resolved, &cli.out),
        "eigenstates" => task_eigenstates(&resolved, &cli.out),
        "kernel" => task_kernel(&resolved, &cli.out),
        "evolve" => task_evolve(&resolved, &cli.out),
        "copy-demo" => task_copy_demo(&resolved, &cli.out),
        "selftest" => task_selftest(&resolved, cli.tolerance_profile),
        _ => unreachable!(),
    }
}

fn write_artifact(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, contents)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn csv_header(r: &Resolved, task: &str, columns: &str) -> String {
    format!(
        "# task: {task}\n# config: {}\n{columns}\n",
        r.config.header_json()
    )
}

// ---------------------------------------------------------------------
// tasks

fn task_classical(r: &Resolved, out: &Path) -> Result<()> {
    let p = &r.params;
    let e = r.config.energy;
    let e_min = classical::min_energy(p);
    if e < e_min {
        return Err(IsqError::Config(format!(
            "energy {e} below the classical minimum {e_min}"
        )));
    }
    let period = std::f64::consts::PI / p.omega;
    let samples = r.config.samples.max(16);
    let dt = 2.0 * period / samples as f64;
    let x0 = classical::closed_form_trajectory(e, 0.0, 1, 0.0, p)?;
    let v0 = (2.0 / p.m * (e - 0.5 * p.m * p.omega * p.omega * x0 * x0 - p.g / (x0 * x0)))
        .max(0.0)
        .sqrt();
    let states = classical::integrate_trajectory(
        ClassicalState { x: x0, v: v0, t: 0.0 },
        dt,
        samples,
        p,
    )?;
    let mut body = csv_header(r, "classical", "t,x_closed,x_rk4,v_rk4");
    for s in &states {
        let xc = classical::closed_form_trajectory(e, 0.0, 1, s.t, p)?;
        writeln!(body, "{},{},{},{}", s.t, xc, s.x, s.v).unwrap();
    }
    write_artifact(out, "classical.csv", &body)
}

fn task_spectrum(r: &Resolved, out: &Path) -> Result<()> {
    let (plus, minus) = spectral_family(&r.boundary, &r.exps, r.config.n_max, &r.params)?;
    let doc = serde_json::json!({
        "config": serde_json::from_str::<serde_json::Value>(&r.config.header_json()).unwrap(),
        "a": r.exps.a,
        "theta_plus": r.boundary.theta_plus,
        "theta_minus": r.boundary.theta_minus,
        "branches": [
            {
                "branch": "plus",
                "target": plus.target,
                "levels": plus.levels,
                "energies": plus.energies(&r.params),
            },
            {
                "branch": "minus",
                "target": minus.target,
                "levels": minus.levels,
                "energies": minus.energies(&r.params),
            },
        ],
    });
    write_artifact(out, "spectrum.json", &serde_json::to_string_pretty(&doc).unwrap())
}

fn task_eigenstates(r: &Resolved, out: &Path) -> Result<()> {
    let n_show = r.config.n_max.min(12);
    let (plus, minus) = spectral_family(&r.boundary, &r.exps, n_show, &r.params)?;
    let beta = r.params.beta();
    let xs: Vec<f64> = (1..=100)
        .flat_map(|i| {
            let x = i as f64 * 0.05 / beta;
            [-x, x]
        })
        .collect();
    let mut body = csv_header(r, "eigenstates", "branch,n,lambda,x,re,im");
    let emit = |branch: &str, n: usize, lambda: f64, st: &isq::eigenbasis::Eigenstate,
                    body: &mut String| {
        let mut rows: Vec<(f64, Complex64)> =
            xs.iter().map(|&x| (x, st.value(x).unwrap())).collect();
        rows.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for (x, v) in rows {
            writeln!(body, "{branch},{n},{lambda},{x},{},{}", v.re, v.im).unwrap();
        }
    };
    if r.boundary.is_degenerate() {
        for (n, &lambda) in plus.levels.iter().enumerate() {
            let (right, left) = degenerate_pair(lambda, &r.boundary, &r.exps, &r.params)?;
            emit("plus", n, lambda, &right, &mut body);
            emit("minus", n, lambda, &left, &mut body);
        }
    } else {
        for (result, name) in [(&plus, "plus"), (&minus, "minus")] {
            for (n, &lambda) in result.levels.iter().enumerate() {
                let st = assemble_eigenstate(lambda, result.branch, &r.boundary, &r.exps, &r.params)?;
                emit(name, n, lambda, &st, &mut body);
            }
        }
    }
    write_artifact(out, "eigenstates.csv", &body)
}

fn task_kernel(r: &Resolved, out: &Path) -> Result<()> {
    let p = &r.params;
    let e = &r.exps;
    let t = r.config.kernel_time / p.omega;
    let beta = p.beta();
    let x_i = 0.7 / beta;
    let min_eps = r.config.epsilons.iter().cloned().fold(f64::INFINITY, f64::min);
    let basis = Sigma1Basis::new(*e, *p, (32.0 / min_eps).ceil() as usize).ok();
    let xs: Vec<f64> = (-12..=12)
        .filter(|&i| i != 0)
        .map(|i| i as f64 * 0.25 / beta)
        .collect();
    let rows: Vec<Result<String>> = xs
        .par_iter()
        .map(|&x_f| {
            let req = KernelRequest {
                x_f,
                x_i,
                t,
                epsilon: 0.0,
                n_max: 0,
            };
            let closed = kernel_closed(&req, e, p)?;
            let spectral = match &basis {
                Some(b) => Some(kernel_spectral_extrapolated(
                    x_f,
                    x_i,
                    t,
                    b,
                    p,
                    &r.config.epsilons,
                )?),
                None => None,
            };
            let mut row = format!("{x_f},{x_i},{t},{},{}", closed.re, closed.im);
            match spectral {
                Some(s) => {
                    write!(row, ",{},{},{}", s.re, s.im, (s - closed).norm()).unwrap()
                }
                None => row.push_str(",,,"),
            }
            Ok(row)
        })
        .collect();
    let mut body = csv_header(
        r,
        "kernel",
        "x_f,x_i,t,re_closed,im_closed,re_spectral,im_spectral,abs_diff",
    );
    for row in rows {
        body.push_str(&row?);
        body.push('\n');
    }
    write_artifact(out, "kernel.csv", &body)
}

fn right_gaussian(center: f64, width: f64) -> impl Fn(f64) -> Complex64 + Copy {
    move |x: f64| {
        if x <= 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new((-(x - center).powi(2) / (2.0 * width * width)).exp(), 0.0)
        }
    }
}

fn task_evolve(r: &Resolved, out: &Path) -> Result<()> {
    let psi = right_gaussian(r.config.center, r.config.width);
    let rep = dynamics::expand(&psi, &r.exps, &r.params, r.config.n_max)?;
    let mut body = csv_header(r, "evolve", "t,x,re,im,rho");
    let _ = writeln!(body, "# expansion_residual: {}", rep.residual);
    for &t in &r.config.times {
        let packet = dynamics::evolve(&rep.packet, t / r.params.omega);
        for (i, (&x, v)) in packet.grid.iter().zip(&packet.values).enumerate() {
            if i % 4 != 0 {
                continue;
            }
            writeln!(body, "{t},{x},{},{},{}", v.re, v.im, v.norm_sqr()).unwrap();
        }
    }
    write_artifact(out, "evolve.csv", &body)
}

fn task_copy_demo(r: &Resolved, out: &Path) -> Result<()> {
    let k = r.config.k;
    let n_max = r.config.n_max.max(80);
    let report = dynamics::copy_experiment(
        r.config.width,
        r.config.center,
        &r.exps,
        &r.params,
        k,
        n_max,
    )?;
    // Figure-style sequence: densities at eight fractions of the caustic time
    let psi = right_gaussian(r.config.center, r.config.width);
    let rep = dynamics::expand(&psi, &r.exps, &r.params, n_max)?;
    let t_final = k as f64 * std::f64::consts::PI / r.params.omega;
    let mut body = csv_header(r, "copy-demo", "step,t,x,rho");
    for step in 0..=8usize {
        let t = t_final * step as f64 / 8.0;
        let packet = dynamics::evolve(&rep.packet, t);
        for (i, (&x, v)) in packet.grid.iter().zip(&packet.values).enumerate() {
            if i % 8 != 0 {
                continue;
            }
            writeln!(body, "{step},{t},{x},{}", v.norm_sqr()).unwrap();
        }
    }
    write_artifact(out, "copy-demo.csv", &body)?;
    let doc = serde_json::json!({
        "config": serde_json::from_str::<serde_json::Value>(&r.config.header_json()).unwrap(),
        "k": report.k,
        "mass_right": report.mass_right,
        "mass_left": report.mass_left,
        "l1_error": report.l1_error,
        "expansion_residual": report.expansion_residual,
    });
    write_artifact(out, "copy-demo.json", &serde_json::to_string_pretty(&doc).unwrap())
}

// ---------------------------------------------------------------------
// self test

struct Check {
    name: &'static str,
    outcome: std::result::Result<(), String>,
}

fn check(name: &'static str, f: impl FnOnce() -> std::result::Result<(), String>) -> Check {
    Check {
        name,
        outcome: f(),
    }
}

fn natural_pair(a: f64) -> (PhysicalParams, Exponents) {
    let g = Exponents::coupling_for(a, 1.0, 1.0);
    let p = PhysicalParams::natural_limit(g).unwrap();
    let e = Exponents::from_params(&p);
    (p, e)
}

fn task_selftest(r: &Resolved, profile: Profile) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(r.config.seed);
    let mut checks: Vec<Check> = Vec::new();

    checks.push(check("sigma1 ladders exact", || {
        let (p, e) = natural_pair(0.75);
        let u = isq::model::Mat2::sigma1();
        let bd = isq::model::decompose_unitary(u, 1.0).map_err(|e| e.to_string())?;
        let (plus, minus) = spectral_family(&bd, &e, 5, &p).map_err(|e| e.to_string())?;
        let mut ladder: Vec<f64> = plus.levels.iter().chain(&minus.levels).cloned().collect();
        ladder.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (i, &lam) in ladder.iter().take(6).enumerate() {
            let expect = [0.25, 1.75, 2.25, 3.75, 4.25, 5.75][i];
            if (lam - expect).abs() > 1e-12 {
                return Err(format!("level {i}: {lam} vs {expect}"));
            }
        }
        Ok(())
    }));

    checks.push(check("finite-length spectral residuals", || {
        let (p, e) = natural_pair(0.75);
        let res = solve_spectrum(&e, isq::model::ExtLength::Finite(1.0), 10, &p, Branch::Plus)
            .map_err(|e| e.to_string())?;
        for &lam in &res.levels {
            let f = isq::spectrum::spectral_function(lam, &e);
            if (f.value - res.target).abs() > 1e-10 {
                return Err(format!("residual {:.3e} at lambda {lam}", f.value - res.target));
            }
        }
        Ok(())
    }));

    let tuples: Vec<(f64, f64, f64)> = (0..5)
        .map(|_| {
            (
                rng.gen_range(0.3..2.5) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 },
                rng.gen_range(0.3..2.5),
                rng.gen_range(0.3..2.7),
            )
        })
        .collect();

    {
        let tuples = tuples.clone();
        checks.push(check("oscillator kernel limit (a = 1/2)", move || {
            let (p, e) = natural_pair(0.5);
            for &(x_f, x_i, t) in &tuples {
                let req = KernelRequest { x_f, x_i, t, epsilon: 0.0, n_max: 0 };
                let k = kernel_closed(&req, &e, &p).map_err(|e| e.to_string())?;
                let s = t.sin();
                let mehler = (Complex64::new(0.0, 2.0 * std::f64::consts::PI * s)).powf(-0.5)
                    * Complex64::from_polar(
                        1.0,
                        ((x_f * x_f + x_i * x_i) * t.cos() - 2.0 * x_f * x_i) / (2.0 * s),
                    );
                if (k - mehler).norm() > 1e-9 * mehler.norm() {
                    return Err(format!("({x_f}, {x_i}, {t}): {k} vs {mehler}"));
                }
            }
            Ok(())
        }));
    }

    {
        let tuples = tuples.clone();
        checks.push(check("conventional limit blocks tunneling (a = 1)", move || {
            let (p, e) = natural_pair(1.0);
            for &(x_f, x_i, t) in &tuples {
                let req = KernelRequest { x_f: x_f.abs(), x_i: -x_i, t, epsilon: 0.0, n_max: 0 };
                let k = kernel_closed(&req, &e, &p).map_err(|e| e.to_string())?;
                if k.norm() > 1e-12 {
                    return Err(format!("cross-side kernel {k}"));
                }
            }
            Ok(())
        }));
    }

    let gram_n = if profile == Profile::Strict { 6 } else { 3 };
    checks.push(check("orthonormality (sigma1 basis)", move || {
        let (p, e) = natural_pair(0.75);
        let basis = Sigma1Basis::new(e, p, gram_n - 1).map_err(|e| e.to_string())?;
        let dim = 2 * gram_n;
        let mut gram = vec![vec![0.0f64; dim]; dim];
        let cutoff = 30.0 / p.beta();
        for (a, b) in [(0.0, cutoff), (-cutoff, 0.0)] {
            for node in quad::nodes(10, a, b) {
                let (v1, v2) = basis.values(node.x);
                let all: Vec<f64> = v1.into_iter().chain(v2).collect();
                for i in 0..dim {
                    for j in i..dim {
                        gram[i][j] += node.w * all[i] * all[j];
                    }
                }
            }
        }
        for i in 0..dim {
            for j in i..dim {
                let expect = if i == j { 1.0 } else { 0.0 };
                if (gram[i][j] - expect).abs() > 1e-8 {
                    return Err(format!("G[{i}][{j}] = {}", gram[i][j]));
                }
            }
        }
        Ok(())
    }));

    checks.push(check("tunneling current continuity", || {
        let (p, e) = natural_pair(0.75);
        let mut packet = dynamics::WavePacket {
            grid: dynamics::default_grid(&p),
            values: Vec::new(),
            c1: vec![Complex64::new(0.0, 0.0); 2],
            c2: vec![Complex64::new(0.0, 0.0); 2],
            n_max: 1,
            exps: e,
            params: p,
        };
        let rt = 1.0 / 2.0_f64.sqrt();
        packet.c1[0] = Complex64::new(rt, 0.0);
        packet.c2[0] = Complex64::new(0.0, rt);
        let j = dynamics::probability_current_at_origin(&packet);
        if j.plus.abs() < 1e-3 {
            return Err("mixed packet current vanished".to_string());
        }
        if (j.plus - j.minus).abs() > 1e-8 {
            return Err(format!("j(+0) = {} vs j(-0) = {}", j.plus, j.minus));
        }
        packet.c2[0] = Complex64::new(0.0, 0.0);
        let j = dynamics::probability_current_at_origin(&packet);
        if j.plus.abs() > 1e-10 {
            return Err(format!("single-series current {}", j.plus));
        }
        Ok(())
    }));

    checks.push(check("classical caustics period", || {
        let (p, _) = natural_pair(0.75);
        let e_min = classical::min_energy(&p);
        let period = std::f64::consts::PI / p.omega;
        for i in 0..3 {
            let e = e_min * (1.3 + 0.7 * i as f64);
            let x0 = classical::closed_form_trajectory(e, 0.1, 1, 0.0, &p)
                .map_err(|e| e.to_string())?;
            let x_t = classical::closed_form_trajectory(e, 0.1, 1, period, &p)
                .map_err(|e| e.to_string())?;
            if (x_t - x0).abs() > 1e-9 {
                return Err(format!("period recurrence off by {:.3e}", x_t - x0));
            }
        }
        Ok(())
    }));

    if profile == Profile::Strict {
        checks.push(check("kernel spectral extrapolation", || {
            let (p, e) = natural_pair(0.75);
            let basis = Sigma1Basis::new(e, p, 6400).map_err(|e| e.to_string())?;
            let req = KernelRequest { x_f: 1.0, x_i: 0.7, t: 1.1, epsilon: 0.0, n_max: 0 };
            let closed = kernel_closed(&req, &e, &p).map_err(|e| e.to_string())?;
            let spec = kernel_spectral_extrapolated(1.0, 0.7, 1.1, &basis, &p, &[0.02, 0.01, 0.005])
                .map_err(|e| e.to_string())?;
            if (closed - spec).norm() > 1e-3 * closed.norm() {
                return Err(format!("{closed} vs {spec}"));
            }
            Ok(())
        }));

        checks.push(check("caustic copy (a = 3/4, k = 1)", || {
            let (p, e) = natural_pair(0.75);
            let rep = dynamics::copy_experiment(0.5, 2.0, &e, &p, 1, 80)
                .map_err(|e| e.to_string())?;
            if rep.l1_error > 1e-3 {
                return Err(format!("L1 error {}", rep.l1_error));
            }
            if (rep.mass_right - 0.5).abs() > 1e-3 {
                return Err(format!("mass split {} / {}", rep.mass_right, rep.mass_left));
            }
            let w = caustic_weights(1, e.a);
            if (w.same_side.norm_sqr() - 0.5).abs() > 1e-12 {
                return Err("weight normalization".to_string());
            }
            Ok(())
        }));
    }

    // eigenstate roundtrip on the configured boundary, so a selftest also
    // exercises the user's U
    checks.push(check("configured boundary eigenstate residual", {
        let r = r.clone();
        move || {
            let (plus, _) = spectral_family(&r.boundary, &r.exps, 2, &r.params)
                .map_err(|e| e.to_string())?;
            let lambda = plus.levels[0];
            let st = if r.boundary.is_degenerate() {
                degenerate_pair(lambda, &r.boundary, &r.exps, &r.params)
                    .map_err(|e| e.to_string())?
                    .0
            } else {
                assemble_eigenstate(lambda, Branch::Plus, &r.boundary, &r.exps, &r.params)
                    .map_err(|e| e.to_string())?
            };
            let res = isq::eigenbasis::boundary_residual(&st, &r.boundary);
            if res > 1e-8 {
                return Err(format!("boundary residual {res:.3e}"));
            }
            Ok(())
        }
    }));

    let mut failed = 0usize;
    for c in &checks {
        match &c.outcome {
            Ok(()) => println!("PASS  {}", c.name),
            Err(msg) => {
                failed += 1;
                println!("FAIL  {}: {msg}", c.name);
            }
        }
    }
    let total = checks.len();
    println!("{} passed, {failed} failed", total - failed);
    // keep the sanity check honest about the sigma1 basis existing
    let _ = sigma1_eigenstate(0, 1, &r.exps, &r.params);
    if failed > 0 {
        return Err(IsqError::SelfTest { failed, total });
    }
    Ok(())
}
