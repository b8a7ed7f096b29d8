use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use fourier_cls::bench::{gen_parity_learning, gen_planted_graph, gen_random_card, relative_score};
use fourier_cls::formula::{brute_force_best, parse_formula, write_formula, DiscreteAssignment, Format};
use fourier_cls::heuristics::{HeuristicsConfig, RephasePolicy};
use fourier_cls::optimizer::{Mode, Objective, SolveResult, Status};
use fourier_cls::parallel::{multi_start_run_observed, portfolio_run_observed, RunConfig};
use fourier_cls::walsh::{backward_grad, explicit_grad_oracle, finite_diff_grad, forward_eval, CoeffCache, ShapeKey};
use fourier_cls::{Constraint, Formula, Literal};
use rand::{Rng, SeedableRng};

const EXIT_UNKNOWN: u8 = 10;
const EXIT_USAGE: u8 = 2;
const EXIT_PARSE: u8 = 3;

#[derive(Parser)]
#[command(name = "fcls", version, about = "Continuous local search for hybrid OR/XOR/cardinality formulas")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide satisfiability (or optimize with --mode maxsat).
    Solve(SolveArgs),
    /// Minimize the falsified weight, streaming `o` lines.
    Maxsat(SolveArgs),
    /// Random cardinality benchmark as hnf.
    GenCard {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Noisy parity learning benchmark as hnf.
    GenParity {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Planted-partition max-cut benchmark as whnf, plus its edge list.
    GenMaxcut {
        #[arg(long)]
        clusters: usize,
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 0.5)]
        p_in: f64,
        #[arg(long, default_value_t = 0.5)]
        p_out: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Where to write the `g`/`e` edge list.
        #[arg(long)]
        graph: Option<PathBuf>,
    },
    /// Relative scores from `solver<TAB>instance<TAB>cost` rows.
    Score { costs: PathBuf },
    /// Compare backward, explicit and finite-difference gradients.
    GradCheck {
        /// A formula file or a shape such as `card(4,>=2)`, `or(3)`, `xor(5)`, `xnor(5)`.
        target: String,
        #[arg(long, default_value_t = 100)]
        points: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Exhaustive optimum for at most 26 variables.
    Brute { file: PathBuf },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Sat,
    Maxsat,
}

#[derive(Args)]
struct SolveArgs {
    file: PathBuf,
    #[arg(long, default_value_t = 1)]
    pt: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    policy: Option<String>,
    #[arg(long)]
    max_restarts: Option<u64>,
    #[arg(long)]
    max_inner: Option<usize>,
    #[arg(long)]
    eta0: Option<f64>,
    #[arg(long)]
    eta_min: Option<f64>,
    #[arg(long)]
    timeout_s: Option<f64>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Stop once the falsified weight is at most this (maxsat).
    #[arg(long)]
    target_cost: Option<f64>,
    #[arg(long)]
    portfolio: bool,
    #[arg(long)]
    no_heuristics: bool,
    /// Omit timing lines so output is reproducible byte for byte.
    #[arg(long)]
    quiet_meta: bool,
}

struct Failure {
    code: u8,
    msg: String,
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, msg: msg.into() }
}

fn input(msg: impl Into<String>) -> Failure {
    Failure { code: EXIT_PARSE, msg: msg.into() }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("fcls: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn run(cmd: Cmd) -> Result<u8, Failure> {
    match cmd {
        Cmd::Solve(a) => solve(a, Mode::Decision),
        Cmd::Maxsat(a) => solve(a, Mode::Optimization),
        Cmd::GenCard { n, seed, output } => {
            let f = gen_random_card(n, seed).map_err(|e| usage(e.to_string()))?;
            emit(output.as_deref(), &write_formula(&f, Format::Hnf).expect("unweighted"))
        }
        Cmd::GenParity { n, seed, output } => {
            let inst = gen_parity_learning(n, seed).map_err(|e| usage(e.to_string()))?;
            let text = format!(
                "c parity learning N={n} seed={seed}\nc threshold {} of {}\n{}",
                inst.threshold,
                inst.formula.len(),
                write_formula(&inst.formula, Format::Hnf).expect("unweighted")
            );
            emit(output.as_deref(), &text)
        }
        Cmd::GenMaxcut { clusters, size, p_in, p_out, seed, output, graph } => {
            let g = gen_planted_graph(clusters, size, p_in, p_out, seed).map_err(|e| usage(e.to_string()))?;
            let f = g.to_formula().expect("valid edges");
            if let Some(path) = graph {
                emit(Some(&path), &g.to_edge_list())?;
            }
            let text = format!(
                "c total edge weight {:?}\n{}",
                g.total_weight(),
                write_formula(&f, Format::Whnf).expect("whnf")
            );
            emit(output.as_deref(), &text)
        }
        Cmd::Score { costs } => score(&costs),
        Cmd::GradCheck { target, points, seed } => grad_check(&target, points, seed),
        Cmd::Brute { file } => brute(&file),
    }
}

fn emit(path: Option<&Path>, text: &str) -> Result<u8, Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| usage(format!("cannot write {}: {e}", p.display())))?,
        None => print!("{text}"),
    }
    Ok(0)
}

fn read_formula(path: &Path) -> Result<Formula, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| input(format!("cannot read {}: {e}", path.display())))?;
    let format =
        Format::detect(&text).ok_or_else(|| input(format!("{}: no `p cnf|hnf|whnf` header", path.display())))?;
    parse_formula(&text, format).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn run_config(a: &SolveArgs, mode: Mode) -> Result<RunConfig, Failure> {
    if a.pt == 0 {
        return Err(usage("--pt must be at least 1"));
    }
    if a.portfolio && a.pt < 2 {
        return Err(usage("--portfolio needs --pt >= 2"));
    }
    let mut cfg = RunConfig::new(mode, a.pt, a.seed);
    if a.no_heuristics {
        cfg.heuristics = HeuristicsConfig::blind();
    }
    if let Some(alpha) = a.alpha {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(usage(format!("--alpha {alpha} outside [0, 1]")));
        }
        cfg.heuristics.alpha = alpha;
    }
    if let Some(p) = &a.policy {
        cfg.heuristics.policy = p.parse::<RephasePolicy>().map_err(|e| usage(e.to_string()))?;
    }
    let pgd = &mut cfg.search.pgd;
    if let Some(v) = a.max_restarts {
        pgd.max_restarts = v;
    }
    if let Some(v) = a.max_inner {
        pgd.max_inner_iters = v;
    }
    if let Some(v) = a.eta0 {
        pgd.eta0 = v;
    }
    if let Some(v) = a.eta_min {
        pgd.eta_min = v;
    }
    pgd.validate().map_err(|e| usage(e.to_string()))?;
    if let Some(t) = a.timeout_s {
        if !(t.is_finite() && t >= 0.0) {
            return Err(usage(format!("--timeout-s {t} must be non-negative")));
        }
        cfg.search.timeout = Some(Duration::from_secs_f64(t));
    }
    cfg.search.target_cost = a.target_cost;
    Ok(cfg)
}

fn solve(a: SolveArgs, default_mode: Mode) -> Result<u8, Failure> {
    let mode = match a.mode {
        Some(ModeArg::Sat) => Mode::Decision,
        Some(ModeArg::Maxsat) => Mode::Optimization,
        None => default_mode,
    };
    let mut cfg = run_config(&a, mode)?;
    let f = read_formula(&a.file)?;

    let stop = Arc::new(AtomicBool::new(false));
    let flag = Arc::clone(&stop);
    // A second handler cannot be installed when solve runs twice in-process.
    let _ = ctrlc::set_handler(move || flag.store(true, Ordering::Relaxed));
    cfg.search.stop = Some(stop);

    let out = std::io::stdout();
    let mut out = out.lock();
    let _ = writeln!(out, "c variables {} constraints {}", f.n_vars(), f.len());
    let _ = writeln!(
        out,
        "c mode {} pt {} seed {} policy {} adaptive-weights {}{}",
        if mode == Mode::Decision { "sat" } else { "maxsat" },
        cfg.p_t,
        cfg.search.seed,
        cfg.heuristics.policy,
        cfg.heuristics.adaptive_weights,
        if a.portfolio { " portfolio" } else { "" }
    );
    let started = Instant::now();
    let observe = |imp: &fourier_cls::optimizer::Improvement| {
        if mode == Mode::Optimization {
            let mut o = std::io::stdout().lock();
            let _ = writeln!(o, "o {}", fmt_cost(imp.cost));
            let _ = o.flush();
        }
    };
    drop(out);
    let res = if a.portfolio {
        portfolio_run_observed(&f, &cfg, observe)
    } else {
        multi_start_run_observed(&f, &cfg, observe)
    }
    .map_err(|e| usage(e.to_string()))?;
    let mut out = std::io::stdout().lock();
    let _ = write!(out, "{}", report(&res, mode));
    if !a.quiet_meta {
        let _ = writeln!(out, "c time {:.3}s", started.elapsed().as_secs_f64());
    }
    Ok(match (mode, res.status) {
        (Mode::Decision, Status::Unknown) => EXIT_UNKNOWN,
        _ => 0,
    })
}

fn fmt_cost(c: f64) -> String {
    if c.fract() == 0.0 && c.abs() < 1e15 {
        format!("{}", c as i64)
    } else {
        format!("{c:?}")
    }
}

fn report(res: &SolveResult, mode: Mode) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "c rounds {}{}", res.rounds, if res.timed_out { " (interrupted)" } else { "" });
    if mode == Mode::Optimization {
        let _ = writeln!(s, "c best cost {}", fmt_cost(res.best_cost));
    }
    let _ = writeln!(s, "s {}", res.status);
    if res.status == Status::Sat || mode == Mode::Optimization {
        s.push_str(&v_lines(&res.best_assignment));
    }
    s
}

fn v_lines(a: &DiscreteAssignment) -> String {
    let lits: Vec<String> = a.dimacs_literals().map(|l| l.to_string()).chain(["0".to_string()]).collect();
    lits.chunks(20).map(|c| format!("v {}\n", c.join(" "))).collect()
}

fn brute(path: &Path) -> Result<u8, Failure> {
    let f = read_formula(path)?;
    let (cost, a) = brute_force_best(&f).map_err(|e| usage(e.to_string()))?;
    let mut s = format!("o {}\n", fmt_cost(cost));
    // Exhaustive search is complete, so a positive optimum proves UNSAT.
    s.push_str(if cost == 0.0 { "s SATISFIABLE\n" } else { "s UNSATISFIABLE\n" });
    s.push_str(&v_lines(&a));
    print!("{s}");
    Ok(if cost == 0.0 { 0 } else { 20 })
}

fn score(path: &Path) -> Result<u8, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| input(format!("cannot read {}: {e}", path.display())))?;
    let mut by_instance: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        let [solver, instance, cost] = cols[..] else {
            return Err(input(format!("line {}: expected solver<TAB>instance<TAB>cost", i + 1)));
        };
        let Ok(cost) = cost.parse::<f64>() else {
            if i == 0 {
                continue; // header row
            }
            return Err(input(format!("line {}: bad cost `{cost}`", i + 1)));
        };
        by_instance.entry(instance.to_string()).or_default().insert(solver.to_string(), cost);
    }
    let mut s = String::from("solver\tinstance\tcost\tscore\n");
    for (instance, costs) in &by_instance {
        for (solver, cost) in costs {
            let sc = relative_score(costs, solver).expect("present");
            let _ = writeln!(s, "{solver}\t{instance}\t{}\t{sc:.6}", fmt_cost(*cost));
        }
    }
    print!("{s}");
    Ok(0)
}

fn parse_shape(spec: &str) -> Option<Constraint> {
    let spec: String = spec.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_ascii_lowercase();
    let (name, rest) = spec.split_once('(')?;
    let args: Vec<&str> = rest.strip_suffix(')')?.split(',').collect();
    let k: usize = args.first()?.parse().ok()?;
    let lits: Vec<Literal> = (1..=k as u32).map(Literal::pos).collect();
    match (name, &args[1..]) {
        ("or", []) => Constraint::or(lits).ok(),
        ("xor", []) => Constraint::xor(lits, true).ok(),
        ("xnor", []) => Constraint::xor(lits, false).ok(),
        ("card", [b]) => {
            let b = b.trim_start_matches(">=").trim_start_matches('≥');
            Constraint::card_ge(b.parse().ok()?, lits).ok()
        }
        _ => None,
    }
}

fn grad_check(target: &str, points: usize, seed: u64) -> Result<u8, Failure> {
    let f = if Path::new(target).exists() {
        read_formula(Path::new(target))?
    } else {
        let c = parse_shape(target).ok_or_else(|| usage(format!("`{target}` is neither a file nor a shape")))?;
        Formula::new(c.arity(), vec![c]).expect("shape over its own variables")
    };
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let cache = CoeffCache::global();
    let mut obj = Objective::new(&f);
    let (mut e_be, mut e_bf, mut e_ef, mut e_obj) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut skipped = 0;
    for _ in 0..points {
        let x: Vec<f64> = (0..f.n_vars()).map(|_| rng.gen_range(-0.95..0.95)).collect();
        for c in f.constraints() {
            let xl: Vec<f64> = c.lits().iter().map(|l| l.sign() * x[l.index()]).collect();
            let shape = cache.get(ShapeKey::new(c.kind(), c.arity()));
            let (_, trace) = forward_eval(&shape.conjugated, &xl).map_err(|e| usage(e.to_string()))?;
            let gb = backward_grad(&trace, &shape.conjugated).map_err(|e| usage(e.to_string()))?;
            let fd =
                finite_diff_grad(|p| forward_eval(&shape.conjugated, p).map(|r| r.0).unwrap_or(f64::NAN), &xl, 1e-5);
            let scale = gb.iter().fold(1.0f64, |m, g| m.max(g.abs()));
            match explicit_grad_oracle(&shape.walsh, &xl) {
                Ok((_, ge)) => {
                    for i in 0..xl.len() {
                        e_be = e_be.max((gb[i] - ge[i]).abs());
                        e_ef = e_ef.max((ge[i] - fd[i]).abs() / scale);
                    }
                }
                Err(_) => skipped += 1,
            }
            for i in 0..xl.len() {
                e_bf = e_bf.max((gb[i] - fd[i]).abs() / scale);
            }
        }
        let (_, g) = obj.eval_grad(&x).map_err(|e| usage(e.to_string()))?;
        let fd = finite_diff_grad(|p| obj.clone().value(p).unwrap_or(f64::NAN), &x, 1e-5);
        let scale = g.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        e_obj = g.iter().zip(&fd).fold(e_obj, |m, (a, b)| m.max((a - b).abs() / scale));
    }
    let ok = e_be <= 1e-9 && e_bf <= 1e-4 && e_ef <= 1e-4 && e_obj <= 1e-4;
    println!(
        "c points {points} constraints {}{}",
        f.len(),
        if skipped > 0 { format!(" (explicit oracle skipped {skipped})") } else { String::new() }
    );
    println!("backward-vs-explicit\t{e_be:.3e}");
    println!("backward-vs-finite-diff\t{e_bf:.3e}");
    println!("explicit-vs-finite-diff\t{e_ef:.3e}");
    println!("objective-vs-finite-diff\t{e_obj:.3e}");
    println!("s {}", if ok { "PASS" } else { "FAIL" });
    Ok(if ok { 0 } else { 1 })
}
