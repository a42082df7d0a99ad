use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use wisc_core::cutset::decompose_cutsets;
use wisc_core::dot::{cutset_dot, modular_dot};
use wisc_core::generate::{generate, Family, WeightMode};
use wisc_core::io::{parse_graph, GraphDocument, Provenance};
use wisc_core::modular::{extended_tree, standard_tree, strong_modules, ModuleNode};
use wisc_core::oracle::{brute_weight_vector, oracle_cap, ORACLE_CAP_ENV};
use wisc_core::permanent::PermanentInstance;
use wisc_core::{
    count_max_weight, CountError, Driver, Engine, EngineKind, Estimate, WeightedGraph,
};

const EXIT_PARSE: u8 = 2;
const EXIT_REJECTED: u8 = 3;
const EXIT_BUDGET: u8 = 4;
const EXIT_MISMATCH: u8 = 5;

#[derive(Parser)]
#[command(
    name = "wisc",
    version,
    about = "Weighted independent set counting for (claw, odd hole)-free and (fork, odd hole)-free graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Class {
    Claw,
    Fork,
}

impl From<Class> for Driver {
    fn from(c: Class) -> Driver {
        match c {
            Class::Claw => Driver::Claw,
            Class::Fork => Driver::Fork,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Exact,
    Mcmc,
}

#[derive(Clone, Copy, ValueEnum)]
enum TreeArg {
    Cutset,
    Modular,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Dot,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    LgBipartite,
    Augmented,
    Peculiar,
    CutsetGlued,
    ModuleSubst,
    ForkFreePrime,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Family {
        match f {
            FamilyArg::LgBipartite => Family::LgBipartite,
            FamilyArg::Augmented => Family::Augmented,
            FamilyArg::Peculiar => Family::Peculiar,
            FamilyArg::CutsetGlued => Family::CutsetGlued,
            FamilyArg::ModuleSubst => Family::ModuleSubst,
            FamilyArg::ForkFreePrime => Family::ForkFreePrime,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum WeightsArg {
    Unit,
    Random,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Graph document (JSON) or DIMACS edge list.
    input: PathBuf,
    #[arg(long, value_enum, default_value = "claw")]
    class: Class,
    #[arg(long, value_enum, default_value = "exact")]
    engine: EngineArg,
    /// Target relative error; ignored by the exact engine except with --max-only.
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl RunArgs {
    fn engine(&self) -> Engine {
        let kind = match self.engine {
            EngineArg::Exact => EngineKind::Exact,
            EngineArg::Mcmc => EngineKind::Mcmc,
        };
        Engine::new(kind, self.seed)
    }

    fn count_eps(&self) -> f64 {
        match self.engine {
            EngineArg::Exact => 0.0,
            EngineArg::Mcmc => self.epsilon,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Count W(G), or W_alpha(G) with --max-only.
    Count {
        #[command(flatten)]
        run: RunArgs,
        /// Report the total weight of maximum independent sets instead.
        #[arg(long)]
        max_only: bool,
        /// Leave wall time out of the report.
        #[arg(long)]
        no_timing: bool,
    },
    /// Clique cutset or modular decomposition tree.
    Decompose {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "cutset")]
        tree: TreeArg,
        #[arg(long, value_enum, default_value = "json")]
        format: FormatArg,
    },
    /// Emit a generated instance as a graph document.
    Generate {
        #[arg(long = "class", value_enum)]
        family: FamilyArg,
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "unit")]
        weights: WeightsArg,
        /// Write to this file instead of standard output.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compare the pipeline with exhaustive enumeration.
    Verify {
        #[command(flatten)]
        run: RunArgs,
        /// Accepted for compatibility; the oracle is always used.
        #[arg(long)]
        against_oracle: bool,
    },
    /// Permanent of a square matrix given as JSON rows of "p/q" strings.
    Permanent {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "exact")]
        engine: EngineArg,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

struct Failure {
    code: u8,
    message: String,
}

fn parse_failure(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_PARSE,
        message: message.into(),
    }
}

impl From<CountError> for Failure {
    fn from(e: CountError) -> Self {
        let code = match e {
            CountError::NotInClass { .. } => EXIT_REJECTED,
            CountError::BudgetExceeded { .. } => EXIT_BUDGET,
            CountError::OracleCap { .. } | CountError::Input(_) => EXIT_PARSE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn read_input(path: &Path) -> Result<WeightedGraph, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| parse_failure(format!("{}: {e}", path.display())))?;
    parse_graph(&text).map_err(|e| parse_failure(format!("{}: {e}", path.display())))
}

fn estimate_json(e: &Estimate) -> Value {
    json!({
        "value": e.value.to_string(),
        "approx": e.value.to_f64(),
        "exact": e.is_exact(),
        "epsilon": e.eps,
        "engine": e.engine,
    })
}

fn ids(g: &WeightedGraph, set: &[usize]) -> Vec<usize> {
    let mut v: Vec<usize> = set.iter().map(|&i| g.id(i)).collect();
    v.sort_unstable();
    v
}

fn node_json(g: &WeightedGraph, node: &ModuleNode) -> Value {
    json!({
        "kind": node.kind,
        "vertices": ids(g, &node.vertices),
        "children": node.children.iter().map(|c| node_json(g, c)).collect::<Vec<_>>(),
    })
}

fn cmd_count(run: &RunArgs, max_only: bool, no_timing: bool) -> Result<Value, Failure> {
    let g = read_input(&run.input)?;
    let engine = run.engine();
    let driver: Driver = run.class.into();
    let start = Instant::now();
    let result = if max_only {
        count_max_weight(&g, driver, run.epsilon, &engine)?
    } else {
        driver.count(&g, run.count_eps(), &engine)?
    };
    let mut report = json!({
        "class": driver.class().to_string(),
        "quantity": if max_only { "W_alpha" } else { "W" },
        "n": g.n(),
        "m": g.m(),
        "seed": run.seed,
        "result": estimate_json(&result),
        "trace": engine.trace(),
    });
    if max_only {
        report["floor"] = json!(result.value.floor().to_string());
    }
    if !no_timing {
        report["wall_ms"] = json!(start.elapsed().as_secs_f64() * 1000.0);
    }
    Ok(report)
}

fn cmd_decompose(input: &Path, tree: TreeArg, format: FormatArg) -> Result<String, Failure> {
    let g = read_input(input)?;
    let (value, dot) = match tree {
        TreeArg::Cutset => {
            let mut atoms = Vec::new();
            let mut dot = String::new();
            for (offset, comp) in g.connected_components().into_iter().enumerate() {
                let c = g
                    .induced_subgraph(&comp)
                    .map_err(|e| parse_failure(e.to_string()))?;
                let t = decompose_cutsets(&c);
                atoms.push(json!({
                    "component": ids(&g, &comp),
                    "h": t.h(),
                    "atoms": (0..=t.h()).map(|i| ids(&c, &t.atom(i))).collect::<Vec<_>>(),
                    "cliques": (1..=t.h()).map(|i| ids(&c, t.clique(i))).collect::<Vec<_>>(),
                }));
                let d = cutset_dot(&c, &t);
                // one digraph per component, renamed so they can share a file
                dot.push_str(&d.replacen(
                    "digraph cutsets",
                    &format!("digraph cutsets_{offset}"),
                    1,
                ));
            }
            (json!({ "tree": "cutset", "components": atoms }), dot)
        }
        TreeArg::Modular => {
            let st = standard_tree(&g);
            let ext = extended_tree(&g);
            let value = json!({
                "tree": "modular",
                "strong_modules": strong_modules(&g).iter().map(|m| ids(&g, m)).collect::<Vec<_>>(),
                "standard": st.as_ref().map(|t| node_json(&g, t)),
                "extended": ext.steps,
            });
            (value, modular_dot(&g, st.as_ref(), &ext))
        }
    };
    Ok(match format {
        FormatArg::Json => serde_json::to_string_pretty(&value).unwrap(),
        FormatArg::Dot => dot,
    })
}

fn cmd_generate(
    family: FamilyArg,
    size: usize,
    seed: u64,
    weights: WeightsArg,
) -> Result<String, Failure> {
    let family: Family = family.into();
    let mode = match weights {
        WeightsArg::Unit => WeightMode::Unit,
        WeightsArg::Random => WeightMode::Random,
    };
    let gen = generate(family, size, seed, mode).map_err(|e| parse_failure(e.to_string()))?;
    let doc = GraphDocument::from_graph(&gen.graph).with_provenance(Provenance {
        generator: family.to_string(),
        size,
        seed,
        weights: mode.to_string(),
    });
    Ok(doc.to_json())
}

/// The report and the exit code its verdict maps to.
fn cmd_verify(run: &RunArgs) -> Result<(Value, u8), Failure> {
    let g = read_input(&run.input)?;
    let cap = oracle_cap();
    let oracle = brute_weight_vector(&g).map_err(|_| {
        parse_failure(format!(
            "graph has {} vertices, above the oracle cap {cap} (set {ORACLE_CAP_ENV} to raise it)",
            g.n()
        ))
    })?;
    let want = oracle.total();
    let engine = run.engine();
    let driver: Driver = run.class.into();
    let mut report = json!({
        "class": driver.class().to_string(),
        "n": g.n(),
        "oracle": want.to_string(),
    });
    match driver.count(&g, run.count_eps(), &engine) {
        Ok(e) => {
            let err = e.value.relative_error(&want);
            let ok = if e.is_exact() {
                e.value == want
            } else {
                err <= run.epsilon
            };
            report["result"] = estimate_json(&e);
            report["relative_error"] = json!(err);
            report["verdict"] = json!(match (ok, e.is_exact()) {
                (true, true) => "exact match",
                (true, false) => "within epsilon",
                (false, _) => "mismatch",
            });
            report["trace"] = json!(engine.trace());
            Ok((report, if ok { 0 } else { EXIT_MISMATCH }))
        }
        Err(CountError::NotInClass { class, reason }) => {
            report["verdict"] = json!("rejected");
            report["reason"] = json!(format!("not {class}: {reason}"));
            Ok((report, EXIT_REJECTED))
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_permanent(input: &Path, engine: EngineArg, eps: f64, seed: u64) -> Result<Value, Failure> {
    let text = fs::read_to_string(input)
        .map_err(|e| parse_failure(format!("{}: {e}", input.display())))?;
    let rows: Vec<Vec<wisc_core::Weight>> = serde_json::from_str(&text)
        .map_err(|e| parse_failure(format!("{}: {e}", input.display())))?;
    let a = PermanentInstance::new(rows)?;
    let kind = match engine {
        EngineArg::Exact => EngineKind::Exact,
        EngineArg::Mcmc => EngineKind::Mcmc,
    };
    let engine = Engine::new(kind, seed);
    let e = engine.permanent(&a, eps)?;
    Ok(json!({ "dim": a.dim(), "result": estimate_json(&e), "trace": engine.trace() }))
}

fn write_out(text: &str, output: Option<&Path>) -> Result<(), Failure> {
    match output {
        Some(p) => fs::write(p, format!("{text}\n"))
            .map_err(|e| parse_failure(format!("{}: {e}", p.display()))),
        None => match writeln!(io::stdout().lock(), "{text}") {
            // a closed pipe (e.g. `| head`) is not an error
            Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(parse_failure(e.to_string())),
            _ => Ok(()),
        },
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Count {
            run,
            max_only,
            no_timing,
        } => {
            let v = cmd_count(&run, max_only, no_timing)?;
            write_out(&serde_json::to_string_pretty(&v).unwrap(), None)
        }
        Command::Decompose {
            input,
            tree,
            format,
        } => write_out(&cmd_decompose(&input, tree, format)?, None),
        Command::Generate {
            family,
            size,
            seed,
            weights,
            output,
        } => write_out(
            &cmd_generate(family, size, seed, weights)?,
            output.as_deref(),
        ),
        Command::Verify { run, .. } => {
            let (report, code) = cmd_verify(&run)?;
            write_out(&serde_json::to_string_pretty(&report).unwrap(), None)?;
            match code {
                0 => Ok(()),
                EXIT_REJECTED => Err(Failure {
                    code,
                    message: "input rejected by the class driver".into(),
                }),
                _ => Err(Failure {
                    code,
                    message: "pipeline disagrees with the oracle".into(),
                }),
            }
        }
        Command::Permanent {
            input,
            engine,
            epsilon,
            seed,
        } => write_out(
            &serde_json::to_string_pretty(&cmd_permanent(&input, engine, epsilon, seed)?).unwrap(),
            None,
        ),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
