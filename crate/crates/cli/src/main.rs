//! `ssm`: command-line front end for self-similar measure computations.

mod svg;

use std::fmt::Display;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::{json, Value};
use ssm_ball::RealBall;
use ssm_core::diophantine::{dc_count, dc_pair_bound, liouville_search, recover_beta};
use ssm_core::fourier::{self, BoundKind, NumericIfs, CSV_HEADER, DEFAULT_DELTA};
use ssm_core::ifs::DEFAULT_REWRITE_CAP;
use ssm_core::io::{element_string, parse_rational, FieldJson, IfsJson};
use ssm_core::renewal::{hitting_probs, simulate_stopped, WalkSpec};
use ssm_core::uniqueness::{classify_uniqueness, gamma_search, lambda_field, Interval};
use ssm_core::{Ifs, NumberField, Real, RootSelector, DEFAULT_PREC, MAX_PREC};

type Ball = RealBall;

#[derive(Parser, Debug)]
#[command(name = "ssm", version, about = "Fourier decay, digit changes and uniqueness for self-similar measures")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for randomized subcommands (default: drawn from the clock and printed).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Working precision in bits, at least 64 (default: SSM_PRECISION_BITS or 128).
    #[arg(long, global = true)]
    precision: Option<u32>,
    /// Output format where both are offered.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the main output to this file instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Uniqueness / multiplicity verdict for the attractor.
    Classify { input: String },
    /// Fourier transform and decay bounds.
    Fourier {
        #[command(subcommand)]
        command: FourierCommand,
    },
    /// Digit changes of x along the ladder x λ^-t.
    Dc {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long)]
        epsilon: String,
        /// Also count DC(γ x) and report (DC(x) + DC(γx)) / log log x.
        #[arg(long, allow_hyphen_values = true)]
        gamma: Option<String>,
        #[command(flatten)]
        field: FieldArgs,
    },
    /// Recovers β in Q(λ) from near-integers α λ^j, n ≤ j ≤ K n.
    Recover {
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long)]
        n: u64,
        #[arg(long = "K")]
        k: u64,
        #[arg(long)]
        epsilon: String,
        #[command(flatten)]
        field: FieldArgs,
    },
    /// Searches for approximants β with |α - β| ≤ exp(-H h(β)).
    Liouville {
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long = "H")]
        h: f64,
        #[arg(long, default_value_t = 64)]
        budget: u64,
        #[command(flatten)]
        field: FieldArgs,
    },
    /// Hitting probabilities of the lattice walk, or `renewal sim` for the stopped product.
    #[command(args_conflicts_with_subcommands = true)]
    Renewal {
        #[command(subcommand)]
        sim: Option<RenewalCommand>,
        #[arg(long)]
        kmax: Option<usize>,
        /// Step lengths, comma separated.
        #[arg(long, value_delimiter = ',')]
        steps: Vec<u64>,
        /// Step probabilities, comma separated.
        #[arg(long, value_delimiter = ',')]
        probs: Vec<String>,
        /// Merged walk of this IFS instead of explicit steps.
        input: Option<String>,
        #[arg(long, default_value = "1,2")]
        pair: String,
    },
    /// Algebraic integer γ_R with |γ| ≤ C R^{d-1} and |σ_k(γ)| ≤ C/R.
    Gamma {
        #[arg(long = "R")]
        r: f64,
        #[arg(long = "C")]
        c: Option<f64>,
        #[command(flatten)]
        field: FieldArgs,
        /// Use λ = r^-1 of this IFS as the field generator.
        input: Option<String>,
    },
    /// Equal-ratio rewrite so that the first two maps share a ratio.
    Rewrite {
        /// Map index (1-based, not 1) whose translation the new pair separates.
        #[arg(long)]
        j: usize,
        #[arg(long, default_value_t = DEFAULT_REWRITE_CAP)]
        cap: usize,
        input: String,
    },
}

#[derive(Subcommand, Debug)]
enum FourierCommand {
    /// μ̂(ω) with a certified radius.
    Eval {
        #[arg(long, allow_hyphen_values = true)]
        omega: String,
        #[arg(long)]
        delta: Option<f64>,
        input: String,
    },
    /// Log-spaced sweep of μ̂ and both decay bounds.
    Scan {
        #[arg(long)]
        omega_min: f64,
        #[arg(long)]
        omega_max: f64,
        #[arg(long, default_value_t = 64)]
        points: usize,
        #[arg(long = "C", default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value = "1,2")]
        pair: String,
        #[arg(long)]
        delta: Option<f64>,
        /// Also write a log-log SVG plot of the scan.
        #[arg(long)]
        svg: Option<PathBuf>,
        input: String,
    },
    /// Smallest constant making a bound hold on a frequency grid.
    Calibrate {
        #[arg(long, default_value_t = 1.0)]
        omega_min: f64,
        #[arg(long, default_value_t = 1e4)]
        omega_max: f64,
        #[arg(long, default_value_t = 64)]
        points: usize,
        #[arg(long, value_enum, default_value_t = Kind::Both)]
        kind: Kind,
        #[arg(long, default_value = "1,2")]
        pair: String,
        #[arg(long)]
        delta: Option<f64>,
        input: String,
    },
    /// Monte-Carlo estimate of μ̂(ω).
    Mc {
        #[arg(long, allow_hyphen_values = true)]
        omega: f64,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        input: String,
    },
}

#[derive(Subcommand, Debug)]
enum RenewalCommand {
    /// Mean and standard error of the stopped product W_τ(t).
    Sim {
        #[arg(long)]
        t: u64,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, allow_hyphen_values = true)]
        omega: f64,
        #[arg(long, default_value = "1,2")]
        pair: String,
        input: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Exp,
    Prod,
    Both,
}

#[derive(Args, Debug)]
struct FieldArgs {
    /// Number field as JSON (inline or a file path).
    #[arg(long)]
    field: Option<String>,
    /// Minimal polynomial coefficients c0,…,cd; λ is its largest real root.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    min_poly: Vec<i64>,
}

enum Failure {
    Usage(String),
    Domain(String),
}

fn domain(e: impl Display) -> Failure {
    Failure::Domain(e.to_string())
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

type Res<T> = Result<T, Failure>;

struct Ctx {
    prec: u32,
    seed: Option<u64>,
    format: Option<Format>,
}

impl Ctx {
    fn seed(&self) -> u64 {
        let s = self.seed.unwrap_or_else(|| {
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_nanos() as u64)
                .unwrap_or(0)
        });
        eprintln!("seed: {s}");
        s
    }
}

fn read_source(s: &str) -> Res<String> {
    if s.trim_start().starts_with('{') {
        Ok(s.to_string())
    } else {
        std::fs::read_to_string(s).map_err(|e| usage(format!("cannot read `{s}`: {e}")))
    }
}

fn load_ifs_json(s: &str) -> Res<IfsJson> {
    IfsJson::from_str(&read_source(s)?).map_err(domain)
}

fn load_ifs(s: &str) -> Res<Ifs> {
    load_ifs_json(s)?.build().map_err(domain)
}

fn load_field(f: &FieldArgs) -> Res<NumberField> {
    match (&f.field, f.min_poly.is_empty()) {
        (Some(s), true) => {
            let j: FieldJson = serde_json::from_str(&read_source(s)?).map_err(|e| domain(format!("InvalidJson: {e}")))?;
            j.build().map_err(domain)
        }
        (None, false) => NumberField::new(ssm_core::IntPoly::from_i64(&f.min_poly), RootSelector::LargestReal).map_err(domain),
        (Some(_), false) => Err(usage("give only one of --field and --min-poly")),
        (None, true) => Err(usage("a number field is required: --field or --min-poly")),
    }
}

fn parse_pair(s: &str, k: usize) -> Res<(usize, usize)> {
    let v: Vec<&str> = s.split(',').collect();
    let idx = |t: &str| t.trim().parse::<usize>().ok().filter(|&i| i >= 1 && i <= k);
    match (v.len(), v.first().and_then(|t| idx(t)), v.get(1).and_then(|t| idx(t))) {
        (2, Some(i), Some(j)) if i != j => Ok((i - 1, j - 1)),
        _ => Err(usage(format!("invalid value `{s}` for --pair: two distinct map indices in 1..={k}"))),
    }
}

fn parse_real(s: &str, field: Option<&NumberField>, flag: &str) -> Res<Real> {
    Real::parse(s, field).map_err(|e| usage(format!("invalid value `{s}` for --{flag}: {e}")))
}

fn parse_q(s: &str, flag: &str) -> Res<BigRational> {
    parse_rational(s).map_err(|e| usage(format!("invalid value `{s}` for --{flag}: {e}")))
}

fn delta_or_default(d: Option<f64>) -> Res<f64> {
    match d {
        None => Ok(DEFAULT_DELTA),
        Some(d) if d > 0.0 && d < 1.0 => Ok(d),
        Some(d) => Err(usage(format!("invalid value `{d}` for --delta: need 0 < δ < 1"))),
    }
}

fn ball_json(b: &Ball) -> Value {
    let i = Interval::of(b);
    json!({ "mid": b.to_f64(), "radius": b.rad().to_f64(), "lo": i.lo, "hi": i.hi })
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn run(cli: Cli) -> Res<String> {
    let env_prec = std::env::var("SSM_PRECISION_BITS").ok();
    let prec = match (cli.precision, env_prec) {
        (Some(p), _) => p,
        (None, Some(s)) => s
            .trim()
            .parse()
            .map_err(|_| usage(format!("invalid value `{s}` for SSM_PRECISION_BITS")))?,
        (None, None) => DEFAULT_PREC,
    };
    if !(64..=MAX_PREC).contains(&prec) {
        return Err(usage(format!("invalid value `{prec}` for --precision: need 64..={MAX_PREC}")));
    }
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(usage("invalid value `0` for --threads"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(domain)?;
    }
    let ctx = Ctx { prec, seed: cli.seed, format: cli.format };
    match cli.command {
        Command::Classify { input } => {
            let j = load_ifs_json(&input)?;
            let inp = j.to_input().map_err(domain)?;
            let v = classify_uniqueness(&inp).map_err(domain)?;
            Ok(pretty(&serde_json::to_value(v).expect("serializable verdict")))
        }
        Command::Fourier { command } => fourier_cmd(&ctx, command),
        Command::Dc { x, epsilon, gamma, field } => {
            let k = load_field(&field)?;
            let x = parse_real(&x, Some(&k), "x")?;
            let eps = parse_q(&epsilon, "epsilon")?;
            if let Some(g) = gamma {
                let g = parse_real(&g, Some(&k), "gamma")?;
                let p = dc_pair_bound(&x, &g, &k, &eps).map_err(domain)?;
                return Ok(pretty(&serde_json::to_value(p).expect("serializable")));
            }
            let r = dc_count(&x, &k, &eps).map_err(domain)?;
            if ctx.format == Some(Format::Json) {
                return Ok(pretty(&serde_json::to_value(r).expect("serializable")));
            }
            eprintln!("DC = {}", r.count);
            let mut out = String::from("t,value,nearest_int,distance,counted\n");
            for row in &r.rows {
                out += &format!("{},{},{},{:e},{}\n", row.t, row.value, row.nearest_int, row.distance, row.counted);
            }
            Ok(out)
        }
        Command::Recover { alpha, n, k, epsilon, field } => {
            let f = load_field(&field)?;
            let a = parse_real(&alpha, Some(&f), "alpha")?;
            let eps = parse_q(&epsilon, "epsilon")?;
            let r = recover_beta(&a, &f, n, k, &eps).map_err(domain)?;
            Ok(pretty(&json!({
                "beta": element_string(&r.beta),
                "beta_value": f.embed_real(&r.beta, 64).to_f64(),
                "height": ball_json(&r.height),
                "error_bound": r.error_bound.upper().to_f64(),
                "n": r.n,
                "K": r.k,
                "residuals": r.residuals.iter().map(|(j, kj, e)| json!({"j": j, "K_j": kj.to_string(), "eps_j": e.to_f64()})).collect::<Vec<_>>(),
            })))
        }
        Command::Liouville { alpha, h, budget, field } => {
            let f = load_field(&field)?;
            let a = parse_real(&alpha, Some(&f), "alpha")?;
            let r = liouville_search(&a, &f, h, budget).map_err(domain)?;
            Ok(pretty(&serde_json::to_value(r).expect("serializable")))
        }
        Command::Renewal { sim: Some(RenewalCommand::Sim { t, trials, omega, pair, input }), .. } => {
            let ifs = load_ifs(&input)?;
            let pair = parse_pair(&pair, ifs.len())?;
            let seed = ctx.seed();
            let est = simulate_stopped(&ifs, pair, omega, t, trials, seed).map_err(domain)?;
            let n = NumericIfs::<ssm_ball::BigFloat>::new(&ifs, ctx.prec);
            let mu = fourier::mu_hat(&n, &Ball::from_f64(omega, ctx.prec), DEFAULT_DELTA).map_err(domain)?;
            Ok(pretty(&json!({
                "omega": omega,
                "t": t,
                "mean": est.mean,
                "stderr": est.stderr,
                "trials": est.trials,
                "seed": est.seed,
                "max_overshoot": est.max_overshoot,
                "mu_hat_abs": ball_json(&mu.abs()),
            })))
        }
        Command::Renewal { sim: None, kmax, steps, probs, input, pair } => {
            let kmax = kmax.ok_or_else(|| usage("--kmax is required"))?;
            let spec = match input {
                Some(inp) => {
                    if !steps.is_empty() || !probs.is_empty() {
                        return Err(usage("give either an IFS or --steps/--probs"));
                    }
                    let ifs = load_ifs(&inp)?;
                    let pair = parse_pair(&pair, ifs.len())?;
                    WalkSpec::merged(&ifs, pair).map_err(domain)?
                }
                None => {
                    if steps.is_empty() {
                        return Err(usage("--steps is required without an IFS"));
                    }
                    let probs = if probs.is_empty() {
                        let n = steps.len() as i64;
                        vec![BigRational::new(1.into(), n.into()); steps.len()]
                    } else {
                        probs.iter().map(|p| parse_q(p, "probs")).collect::<Res<Vec<_>>>()?
                    };
                    WalkSpec::new(steps, probs).map_err(domain)?
                }
            };
            let p = hitting_probs(&spec, kmax);
            if ctx.format == Some(Format::Json) {
                let rows: Vec<Value> = p
                    .iter()
                    .enumerate()
                    .map(|(k, q)| json!({"k": k, "P_k": q.to_string(), "P_k_float": to_f64(q)}))
                    .collect();
                return Ok(pretty(&Value::Array(rows)));
            }
            let mut out = String::from("k,P_k,P_k_float\n");
            for (k, q) in p.iter().enumerate() {
                out += &format!("{k},{q},{}\n", to_f64(q));
            }
            Ok(out)
        }
        Command::Gamma { r, c, field, input } => {
            let f = match input {
                Some(inp) => lambda_field(&load_ifs(&inp)?).map_err(domain)?,
                None => load_field(&field)?,
            };
            if c.is_some_and(|c| !(c > 0.0)) {
                return Err(usage("invalid value for --C: must be positive"));
            }
            let w = gamma_search(&f, r, c).map_err(domain)?;
            Ok(pretty(&w.to_json(f.degree())))
        }
        Command::Rewrite { j, cap, input } => {
            let ifs = load_ifs(&input)?;
            if j < 2 || j > ifs.len() {
                return Err(usage(format!("invalid value `{j}` for --j: need 2..={}", ifs.len())));
            }
            let (norm, shift) = ifs.normalize_with_shift();
            let (out, b) = norm.equal_ratio_rewrite(j - 1, cap).map_err(domain)?;
            eprintln!("shift: {shift}");
            eprintln!("b: {b}");
            Ok(pretty(&serde_json::to_value(IfsJson::describe(&out)).expect("serializable")))
        }
    }
}

fn to_f64(q: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

fn fourier_cmd(ctx: &Ctx, cmd: FourierCommand) -> Res<String> {
    type B = ssm_ball::BigFloat;
    match cmd {
        FourierCommand::Eval { omega, delta, input } => {
            let ifs = load_ifs(&input)?;
            let delta = delta_or_default(delta)?;
            let w = parse_real(&omega, None, "omega")?;
            let n = NumericIfs::<B>::new(&ifs, ctx.prec);
            let mu = fourier::mu_hat(&n, &w.eval(ctx.prec), delta).map_err(domain)?;
            let (re, im) = mu.to_f64();
            if ctx.format == Some(Format::Csv) {
                return Ok(format!("omega,re,im,abs,radius\n{:e},{re:e},{im:e},{:e},{:e}\n", w.to_f64(), mu.abs().to_f64(), mu.rad().to_f64()));
            }
            Ok(pretty(&json!({
                "omega": w.to_f64(),
                "re": re,
                "im": im,
                "abs": mu.abs().to_f64(),
                "radius": mu.rad().to_f64(),
                "abs_interval": Interval::of(&mu.abs()),
                "precision": ctx.prec,
            })))
        }
        FourierCommand::Scan { omega_min, omega_max, points, c, pair, delta, svg, input } => {
            if !(omega_min > 0.0 && omega_max >= omega_min && points >= 1) {
                return Err(usage("need 0 < --omega-min ≤ --omega-max and --points ≥ 1"));
            }
            let ifs = load_ifs(&input)?;
            let pair = parse_pair(&pair, ifs.len())?;
            let delta = delta_or_default(delta)?;
            let n = NumericIfs::<B>::new(&ifs, ctx.prec);
            let grid = fourier::log_grid(omega_min, omega_max, points);
            use rayon::prelude::*;
            let reports = grid
                .par_iter()
                .map(|&w| fourier::bounds(&n, pair, &Ball::from_f64(w, ctx.prec), c, delta))
                .collect::<Result<Vec<_>, _>>()
                .map_err(domain)?;
            if let Some(path) = svg {
                let series = [
                    svg::Series { name: "|μ̂(ω)|", color: "black", points: reports.iter().map(|r| (r.omega.to_f64(), r.mu_hat_abs.to_f64())).collect() },
                    svg::Series { name: "bound_exp", color: "#c0392b", points: reports.iter().map(|r| (r.omega.to_f64(), r.bound_exp.to_f64())).collect() },
                    svg::Series { name: "bound_prod", color: "#2471a3", points: reports.iter().map(|r| (r.omega.to_f64(), r.bound_prod.to_f64())).collect() },
                ];
                std::fs::write(&path, svg::plot(&format!("decay scan, C = {c}"), &series))
                    .map_err(|e| domain(format!("IoError: {}: {e}", path.display())))?;
            }
            let mut out = String::from(CSV_HEADER);
            out.push('\n');
            for r in &reports {
                out += &r.csv_row();
                out.push('\n');
            }
            Ok(out)
        }
        FourierCommand::Calibrate { omega_min, omega_max, points, kind, pair, delta, input } => {
            if !(omega_min > 0.0 && omega_max >= omega_min && points >= 1) {
                return Err(usage("need 0 < --omega-min ≤ --omega-max and --points ≥ 1"));
            }
            let ifs = load_ifs(&input)?;
            let pair = parse_pair(&pair, ifs.len())?;
            let delta = delta_or_default(delta)?;
            let n = NumericIfs::<B>::new(&ifs, ctx.prec);
            let grid: Vec<Ball> = fourier::log_grid(omega_min, omega_max, points).iter().map(|&w| Ball::from_f64(w, ctx.prec)).collect();
            let kinds = match kind {
                Kind::Exp => vec![BoundKind::Exp],
                Kind::Prod => vec![BoundKind::Prod],
                Kind::Both => vec![BoundKind::Exp, BoundKind::Prod],
            };
            let cals = kinds
                .into_iter()
                .map(|k| fourier::calibrate(&n, pair, &grid, k, delta))
                .collect::<Result<Vec<_>, _>>()
                .map_err(domain)?;
            Ok(pretty(&serde_json::to_value(cals).expect("serializable")))
        }
        FourierCommand::Mc { omega, samples, input } => {
            let ifs = load_ifs(&input)?;
            let seed = ctx.seed();
            let n = NumericIfs::<B>::new(&ifs, ctx.prec);
            let est = fourier::mu_hat_mc(&n, omega, samples, seed, 52);
            let mut v = serde_json::to_value(est).expect("serializable");
            v["abs"] = json!(est.abs());
            v["stderr"] = json!(est.stderr());
            v["omega"] = json!(omega);
            Ok(pretty(&v))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let output = cli.output.clone();
    match run(cli) {
        Ok(text) => {
            let written = match output {
                Some(p) => std::fs::write(&p, text.as_bytes()),
                None => std::io::stdout().write_all(text.as_bytes()),
            };
            match written {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("IoError: {e}");
                    ExitCode::from(1)
                }
            }
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(m)) => {
            eprintln!("{m}");
            ExitCode::from(1)
        }
    }
}
