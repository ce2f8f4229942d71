//! Command line front end. Every command prints JSON records, one per line, on
//! the output stream and a short human summary on the error stream.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use super::format::{parse_instance, parse_solution, write_rafl_solution, write_rand_solution, Instance, Problem, Solution};
use super::generate::{generate, GeneratorConfig};
use crate::error::{Error, Result};
use crate::model::{eval_rafl_cost, eval_rand_cost, RaflInstance, RandInstance};
use crate::oracle::{default_cap, oracle_rafl, oracle_rand};
use crate::rafl_solver::{ratio_bound, solve_rafl, Certificate};
use crate::rand_solver::{solve_rand_end_to_end, RandConfig, Variant};
use crate::scalar::Scalar;
use crate::steiner::{SteinerMethod, DEFAULT_EXACT_CAP};
use crate::Rational;

#[derive(Debug, Parser)]
#[command(name = "redund", version, about = "Redundancy-aware network design and facility location")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a random instance.
    Gen(GenArgs),
    /// Run the approximation algorithm on an instance.
    Solve(SolveArgs),
    /// Solve an instance exactly by enumeration.
    Oracle(OracleArgs),
    /// Price a solution file against an instance.
    Eval(EvalArgs),
    /// Compare the approximation with the exact optimum.
    Ratio(RatioArgs),
    /// Sweep generator settings and report costs and ratios.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Steiner,
    Prim,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SteinerArg {
    Mst,
    Exact,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub problem: Problem,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 8)]
    pub nodes: usize,
    #[arg(long, default_value_t = 0.3)]
    pub density: f64,
    #[arg(long, default_value_t = 4)]
    pub terminals: usize,
    #[arg(long, default_value_t = 4)]
    pub packets: usize,
    #[arg(long, default_value_t = 2)]
    pub branching: usize,
    #[arg(long, default_value_t = 3)]
    pub facilities: usize,
    #[arg(long, default_value_t = 4)]
    pub weight_max: u64,
    #[arg(long, default_value_t = 10)]
    pub cost_max: u64,
    #[arg(long, default_value_t = 8)]
    pub lambda_max: u64,
    /// Write the instance here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl GenArgs {
    fn config(&self) -> GeneratorConfig {
        GeneratorConfig {
            seed: self.seed,
            nodes: self.nodes,
            density: self.density,
            terminals: self.terminals,
            packets: self.packets,
            branching: self.branching,
            weight: (1, self.weight_max),
            cost: (1, self.cost_max),
            lambda: (1, self.lambda_max),
            facilities: self.facilities,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Expected problem kind; checked against the file.
    #[arg(long, value_enum)]
    pub problem: Option<Problem>,
    #[arg(long, value_enum, default_value = "steiner")]
    pub variant: VariantArg,
    #[arg(long, value_enum, default_value = "mst")]
    pub steiner: SteinerArg,
    #[arg(long, default_value = "3")]
    pub alpha: String,
    /// Use floating point instead of exact rational arithmetic.
    #[arg(long)]
    pub float: bool,
}

impl SolverArgs {
    fn rand_config(&self) -> RandConfig {
        RandConfig {
            variant: match self.variant {
                VariantArg::Steiner => Variant::PerNodeSteiner,
                VariantArg::Prim => Variant::Prim,
            },
            steiner: match self.steiner {
                SteinerArg::Mst => SteinerMethod::MstApprox,
                SteinerArg::Exact => SteinerMethod::Exact { cap: DEFAULT_EXACT_CAP },
            },
        }
    }

    fn alpha<S: Scalar>(&self) -> Result<S> {
        S::parse_literal(&self.alpha).ok_or_else(|| Error::InvalidInstance(format!("invalid alpha '{}'", self.alpha)))
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub instance: PathBuf,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Write the solution file here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also print the full RAFL certificate as a record.
    #[arg(long)]
    pub certificate: bool,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    pub instance: PathBuf,
    /// Largest search space to enumerate (default from REDUND_ORACLE_CAP or 10^7).
    #[arg(long)]
    pub cap: Option<u128>,
    #[arg(long)]
    pub float: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    pub instance: PathBuf,
    pub solution: PathBuf,
    #[arg(long)]
    pub float: bool,
}

#[derive(Debug, Args)]
pub struct RatioArgs {
    pub instance: PathBuf,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long)]
    pub cap: Option<u128>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Instances per generator setting. `--problem` restricts the sweep to one problem.
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long)]
    pub cap: Option<u128>,
    /// Include wall-clock runtimes (makes the output nondeterministic).
    #[arg(long)]
    pub timing: bool,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn load<S: Scalar>(path: &Path, expected: Option<Problem>) -> Result<Instance<S>> {
    let inst = parse_instance::<S>(&read(path)?)?;
    if let Some(p) = expected {
        if p != inst.problem() {
            return Err(Error::InvalidInstance(format!("{} holds a {} instance, not {}", path.display(), inst.problem().name(), p.name())));
        }
    }
    Ok(inst)
}

fn emit(out: &mut dyn Write, record: &Value) -> Result<()> {
    writeln!(out, "{record}")?;
    Ok(())
}

/// Exact string plus decimal approximation.
fn cost_fields<S: Scalar>(record: &mut Map<String, Value>, key: &str, v: &S) {
    record.insert(key.into(), Value::String(v.to_exact_string()));
    record.insert(format!("{key}_decimal"), json!(v.approx_f64()));
}

fn ratio_of<S: Scalar>(cost: &S, optimum: &S) -> Option<S> {
    if optimum.is_zero() {
        cost.is_zero().then(S::one)
    } else {
        Some(cost.clone() / optimum.clone())
    }
}

fn ratio_fields<S: Scalar>(record: &mut Map<String, Value>, cost: &S, optimum: &S) {
    match ratio_of(cost, optimum) {
        Some(r) => cost_fields(record, "ratio", &r),
        None => {
            record.insert("ratio".into(), Value::Null);
            record.insert("ratio_decimal".into(), Value::Null);
        }
    }
}

fn record(command: &str, problem: Problem) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("command".into(), json!(command));
    m.insert("problem".into(), json!(problem.name()));
    m
}

struct Solved<S> {
    cost: S,
    solution: Solution,
    fields: Map<String, Value>,
    certificate: Option<Certificate<S>>,
    /// Proven worst-case ratio for this run.
    bound: S,
}

fn run_rand<S: Scalar>(inst: &RandInstance<S>, args: &SolverArgs) -> Result<Solved<S>> {
    let config = args.rand_config();
    let out = solve_rand_end_to_end(inst, &config)?;
    let mut fields = Map::new();
    fields.insert("variant".into(), json!(if config.variant == Variant::Prim { "prim" } else { "steiner" }));
    if config.variant == Variant::PerNodeSteiner {
        fields.insert("steiner".into(), json!(if args.steiner == SteinerArg::Exact { "exact" } else { "mst" }));
    }
    fields.insert("p_raw".into(), json!(out.stats.p_raw));
    fields.insert("p_preprocessed".into(), json!(out.stats.p_preprocessed));
    fields.insert("tree_depth".into(), json!(out.stats.tree_depth));
    fields.insert("collections".into(), json!(out.stats.collections));
    fields.insert("bound".into(), json!(out.stats.bound_factor));
    Ok(Solved {
        cost: out.cost,
        solution: Solution::Rand(out.solution),
        fields,
        certificate: None,
        bound: S::from_weight(out.stats.bound_factor),
    })
}

fn run_rafl<S: Scalar>(inst: &RaflInstance<S>, args: &SolverArgs) -> Result<Solved<S>> {
    let alpha: S = args.alpha()?;
    let (assignment, cert) = solve_rafl(inst, &alpha)?;
    let bound = ratio_bound(&alpha);
    let mut fields = Map::new();
    fields.insert("alpha".into(), json!(alpha.to_exact_string()));
    cost_fields(&mut fields, "lp_value", &cert.lp_value);
    cost_fields(&mut fields, "facility_cost", &cert.cost.facility);
    cost_fields(&mut fields, "routing_cost", &cert.cost.routing);
    fields.insert("paying".into(), json!(cert.paying));
    fields.insert("free".into(), json!(cert.free));
    fields.insert("copies".into(), json!(cert.copies));
    fields.insert("certified".into(), json!(cert.all_hold()));
    fields.insert("bound".into(), json!(bound.to_exact_string()));
    Ok(Solved { cost: cert.cost.total(), solution: Solution::Rafl(assignment), fields, certificate: Some(cert), bound })
}

fn run_solver<S: Scalar>(inst: &Instance<S>, args: &SolverArgs) -> Result<Solved<S>> {
    match inst {
        Instance::Rand(i) => run_rand(i, args),
        Instance::Rafl(i) => run_rafl(i, args),
    }
}

fn run_oracle<S: Scalar>(inst: &Instance<S>, cap: u128) -> Result<(S, Solution, u128)> {
    Ok(match inst {
        Instance::Rand(i) => {
            let r = oracle_rand(i, cap)?;
            (r.cost, Solution::Rand(r.solution), r.explored)
        }
        Instance::Rafl(i) => {
            let r = oracle_rafl(i, cap)?;
            (r.cost, Solution::Rafl(r.solution), r.explored)
        }
    })
}

fn solution_text(sol: &Solution) -> String {
    match sol {
        Solution::Rand(s) => write_rand_solution(s),
        Solution::Rafl(a) => write_rafl_solution(a),
    }
}

fn certificate_record<S: Scalar>(cert: &Certificate<S>) -> Value {
    let checks: Vec<Value> = cert
        .checks
        .iter()
        .map(|c| json!({ "name": c.name, "lhs": c.lhs.to_exact_string(), "rhs": c.rhs.to_exact_string(), "holds": c.holds }))
        .collect();
    let mut m = record("certificate", Problem::Rafl);
    cost_fields(&mut m, "lp_routing", &cert.lp_routing);
    cost_fields(&mut m, "lp_facility", &cert.lp_facility);
    cost_fields(&mut m, "filtered_facility", &cert.filtered_facility);
    cost_fields(&mut m, "copy_facility_cost", &cert.copy_facility_cost);
    m.insert("checks".into(), Value::Array(checks));
    Value::Object(m)
}

fn cmd_gen(args: &GenArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let inst = generate(&args.config(), args.problem)?;
    let text = inst.to_text();
    match &args.out {
        Some(path) => {
            std::fs::write(path, &text)?;
            let mut m = record("gen", args.problem);
            m.insert("seed".into(), json!(args.seed));
            m.insert("path".into(), json!(path.display().to_string()));
            emit(out, &Value::Object(m))?;
        }
        None => out.write_all(text.as_bytes())?,
    }
    writeln!(err, "generated {} instance with seed {}", args.problem.name(), args.seed)?;
    Ok(())
}

fn cmd_solve<S: Scalar>(args: &SolveArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let inst = load::<S>(&args.instance, args.solver.problem)?;
    let solved = run_solver(&inst, &args.solver)?;
    let mut m = record("solve", inst.problem());
    cost_fields(&mut m, "cost", &solved.cost);
    m.extend(solved.fields);
    emit(out, &Value::Object(m))?;
    if let (true, Some(cert)) = (args.certificate, &solved.certificate) {
        emit(out, &certificate_record(cert))?;
    }
    if let Some(path) = &args.out {
        std::fs::write(path, solution_text(&solved.solution))?;
    }
    writeln!(err, "{} cost {} (~{})", inst.problem().name(), solved.cost.to_exact_string(), solved.cost.approx_f64())?;
    if let Some(cert) = &solved.certificate {
        for c in cert.failures() {
            writeln!(err, "bound violated: {} ({} > {})", c.name, c.lhs, c.rhs)?;
        }
    }
    Ok(())
}

fn cmd_oracle<S: Scalar>(args: &OracleArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let inst = load::<S>(&args.instance, None)?;
    let (cost, sol, explored) = run_oracle(&inst, args.cap.unwrap_or_else(default_cap))?;
    let mut m = record("oracle", inst.problem());
    cost_fields(&mut m, "cost", &cost);
    m.insert("explored".into(), json!(explored.to_string()));
    emit(out, &Value::Object(m))?;
    if let Some(path) = &args.out {
        std::fs::write(path, solution_text(&sol))?;
    }
    writeln!(err, "optimum {} (~{}), {explored} candidates", cost.to_exact_string(), cost.approx_f64())?;
    Ok(())
}

fn cmd_eval<S: Scalar>(args: &EvalArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let inst = load::<S>(&args.instance, None)?;
    let sol = parse_solution(&read(&args.solution)?)?;
    let mut m = record("eval", inst.problem());
    let cost = match (&inst, &sol) {
        (Instance::Rand(i), Solution::Rand(s)) => eval_rand_cost(s, i)?,
        (Instance::Rafl(i), Solution::Rafl(a)) => {
            let c = eval_rafl_cost(a, i)?;
            cost_fields(&mut m, "facility_cost", &c.facility);
            cost_fields(&mut m, "routing_cost", &c.routing);
            c.total()
        }
        _ => return Err(Error::InvalidInstance("solution kind does not match the instance".into())),
    };
    cost_fields(&mut m, "cost", &cost);
    emit(out, &Value::Object(m))?;
    writeln!(err, "cost {} (~{})", cost.to_exact_string(), cost.approx_f64())?;
    Ok(())
}

fn ratio_record<S: Scalar>(inst: &Instance<S>, solver: &SolverArgs, cap: u128) -> Result<(Map<String, Value>, Option<f64>)> {
    let solved = run_solver(inst, solver)?;
    let (optimum, _, explored) = run_oracle(inst, cap)?;
    let mut m = record("ratio", inst.problem());
    cost_fields(&mut m, "cost", &solved.cost);
    cost_fields(&mut m, "optimum", &optimum);
    ratio_fields(&mut m, &solved.cost, &optimum);
    let ratio = ratio_of(&solved.cost, &optimum);
    m.insert("within_bound".into(), json!(ratio.as_ref().is_some_and(|r| r.le_tol(&solved.bound))));
    m.insert("explored".into(), json!(explored.to_string()));
    m.extend(solved.fields);
    Ok((m, ratio.map(|r| r.approx_f64())))
}

fn cmd_ratio<S: Scalar>(args: &RatioArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let inst = load::<S>(&args.instance, args.solver.problem)?;
    let (m, ratio) = ratio_record(&inst, &args.solver, args.cap.unwrap_or_else(default_cap))?;
    emit(out, &Value::Object(m))?;
    match ratio {
        Some(r) => writeln!(err, "ratio ~{r:.4}")?,
        None => writeln!(err, "optimum is zero but the solution is not")?,
    }
    Ok(())
}

/// One bench record and its optional wall-clock time in seconds.
type BenchRecord = (Map<String, Value>, Option<f64>);

/// Generator settings swept by `bench`, small enough for the oracles.
fn bench_settings(problem: Problem) -> Vec<GeneratorConfig> {
    let base = GeneratorConfig::default();
    match problem {
        Problem::Rand => vec![
            GeneratorConfig { nodes: 6, terminals: 3, packets: 3, ..base.clone() },
            GeneratorConfig { nodes: 7, terminals: 4, packets: 4, ..base.clone() },
            GeneratorConfig { nodes: 8, terminals: 4, packets: 6, branching: 1, density: 0.25, ..base },
        ],
        Problem::Rafl => vec![
            GeneratorConfig { nodes: 6, terminals: 3, packets: 3, facilities: 2, ..base.clone() },
            GeneratorConfig { nodes: 8, terminals: 4, packets: 4, facilities: 3, ..base.clone() },
            GeneratorConfig { nodes: 10, terminals: 5, packets: 5, facilities: 4, ..base },
        ],
    }
}

fn cmd_bench<S: Scalar>(args: &BenchArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let problems = match args.solver.problem {
        Some(p) => vec![p],
        None => vec![Problem::Rand, Problem::Rafl],
    };
    let mut jobs = Vec::new();
    for &problem in &problems {
        for (setting, cfg) in bench_settings(problem).into_iter().enumerate() {
            for k in 0..args.count {
                let seed = args.seed.wrapping_add(k as u64);
                jobs.push((problem, setting, GeneratorConfig { seed, ..cfg.clone() }));
            }
        }
    }
    let cap = args.cap.unwrap_or_else(default_cap);
    let results: Vec<Result<BenchRecord>> = jobs
        .par_iter()
        .enumerate()
        .map(|(index, (problem, setting, cfg))| {
            let start = Instant::now();
            let exact = generate(cfg, *problem)?;
            let inst = convert_instance::<Rational, S>(&exact)?;
            let (mut m, ratio) = ratio_record(&inst, &args.solver, cap)?;
            m.insert("command".into(), json!("bench"));
            m.insert("index".into(), json!(index));
            m.insert("setting".into(), json!(setting));
            m.insert("seed".into(), json!(cfg.seed));
            m.insert("nodes".into(), json!(cfg.nodes));
            m.insert("terminals".into(), json!(cfg.terminals));
            m.insert("packets".into(), json!(cfg.packets));
            if *problem == Problem::Rafl {
                m.insert("facilities".into(), json!(cfg.facilities));
            }
            if args.timing {
                m.insert("runtime_ms".into(), json!(start.elapsed().as_secs_f64() * 1e3));
            }
            Ok((m, ratio))
        })
        .collect();
    let mut summary: Vec<(Problem, usize, Vec<f64>)> = Vec::new();
    for ((problem, setting, _), res) in jobs.iter().zip(results) {
        let (m, ratio) = res?;
        emit(out, &Value::Object(m))?;
        match summary.last_mut() {
            Some((p, s, v)) if p == problem && s == setting => v.extend(ratio),
            _ => summary.push((*problem, *setting, ratio.into_iter().collect())),
        }
    }
    writeln!(err, "{:<6} {:>7} {:>5} {:>10} {:>10}", "problem", "setting", "runs", "mean", "max")?;
    for (problem, setting, ratios) in summary {
        let mean = ratios.iter().sum::<f64>() / ratios.len().max(1) as f64;
        let max = ratios.iter().copied().fold(f64::NAN, f64::max);
        writeln!(err, "{:<7} {setting:>7} {:>5} {mean:>10.4} {max:>10.4}", problem.name(), ratios.len())?;
    }
    Ok(())
}

fn convert_instance<S: Scalar, T: Scalar>(inst: &Instance<S>) -> Result<Instance<T>> {
    let f = |v: &S| T::parse_literal(&v.to_exact_string()).expect("scalar text is parseable");
    Ok(match inst {
        Instance::Rand(i) => Instance::Rand(super::convert_rand(i, f)?),
        Instance::Rafl(i) => Instance::Rafl(super::convert_rafl(i, f)?),
    })
}

fn dispatch<S: Scalar>(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Gen(a) => cmd_gen(a, out, err),
        Command::Solve(a) => cmd_solve::<S>(a, out, err),
        Command::Oracle(a) => cmd_oracle::<S>(a, out, err),
        Command::Eval(a) => cmd_eval::<S>(a, out, err),
        Command::Ratio(a) => cmd_ratio::<S>(a, out, err),
        Command::Bench(a) => cmd_bench::<S>(a, out, err),
    }
}

/// Runs a parsed command line.
pub fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let float = match &cli.command {
        Command::Gen(_) => false,
        Command::Solve(a) => a.solver.float,
        Command::Oracle(a) => a.float,
        Command::Eval(a) => a.float,
        Command::Ratio(a) => a.solver.float,
        Command::Bench(a) => a.solver.float,
    };
    if float {
        dispatch::<f64>(cli, out, err)
    } else {
        dispatch::<Rational>(cli, out, err)
    }
}
