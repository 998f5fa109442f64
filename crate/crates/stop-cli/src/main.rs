use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};
use std::time::Duration;
use stop_core::bench::{run_bench, BenchInstance};
use stop_core::instance::{generate_stop, parse_instance, serialize_instance, StopInstance};
use stop_core::oracle::enumerate_optimal;
use stop_core::routes::{parse_routes, validate_routes};
use stop_core::separation::Lifting;
use stop_core::solver::{solve, Mode, SolverConfig};

/// Exact solver for the Steiner team orienteering problem.
#[derive(Parser)]
#[command(name = "stop", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance.
    Solve {
        instance: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        /// Mandatory vertices, overriding any `M:` line in the file.
        #[arg(long, value_delimiter = ',')]
        mandatory: Option<Vec<usize>>,
        /// Print the full report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Derive a STOP instance by making a fraction of the profitable vertices mandatory.
    Generate {
        instance: PathBuf,
        #[arg(long)]
        fraction: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write here instead of standard output.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Solve a batch of instances and print per-instance rows and per-set footers.
    Bench {
        /// Instance files.
        instances: Vec<PathBuf>,
        /// File listing one instance path per line, optionally followed by a set id.
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Add wall times to the CSV (they make the output differ between runs).
        #[arg(long)]
        with_timing: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check routes against an instance, or compute the optimum by enumeration.
    Validate {
        instance: PathBuf,
        /// One route per line, vertex ids separated by spaces or commas.
        #[arg(long)]
        routes: Option<PathBuf>,
        /// Expected total reward of the routes.
        #[arg(long)]
        reward: Option<u64>,
        /// Enumerate every route set (tiny instances only).
        #[arg(long)]
        oracle: bool,
        /// Node budget of the enumeration.
        #[arg(long, default_value_t = 50_000_000)]
        budget: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Text,
    Json,
}

#[derive(Args)]
struct SolverArgs {
    /// cpa, baseline, lp or config1..config5.
    #[arg(long, default_value = "cpa")]
    mode: Mode,
    /// Seconds.
    #[arg(long, default_value_t = 7200.0)]
    time_limit: f64,
    #[arg(long)]
    gcc_violation: Option<f64>,
    #[arg(long)]
    gcc_inner_product: Option<f64>,
    #[arg(long)]
    cc_violation: Option<f64>,
    #[arg(long)]
    cc_inner_product: Option<f64>,
    #[arg(long)]
    lci_violation: Option<f64>,
    /// Root cutting stops once a round improves the bound by at most this.
    #[arg(long)]
    root_tolerance: Option<f64>,
    /// Baseline node separation stops once a round improves by at most this.
    #[arg(long)]
    node_tolerance: Option<f64>,
    /// Use plain minimal covers instead of lifted ones.
    #[arg(long)]
    no_lifting: bool,
}

impl SolverArgs {
    fn config(&self) -> Result<SolverConfig> {
        if !(self.time_limit >= 0.0 && self.time_limit.is_finite()) {
            bail!("time limit must be a nonnegative number of seconds");
        }
        let mut c = SolverConfig {
            time_limit: Duration::from_secs_f64(self.time_limit),
            ..SolverConfig::default()
        };
        let set = |slot: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        set(&mut c.gcc.abs_violation, self.gcc_violation);
        set(&mut c.gcc.max_inner_product, self.gcc_inner_product);
        set(&mut c.cc.abs_violation, self.cc_violation);
        set(&mut c.cc.max_inner_product, self.cc_inner_product);
        set(&mut c.lci.abs_violation, self.lci_violation);
        set(&mut c.root_tolerance, self.root_tolerance);
        set(&mut c.node_tolerance, self.node_tolerance);
        if self.no_lifting {
            c.lifting = Lifting::None;
        }
        for (name, p) in [("gcc", c.gcc), ("cc", c.cc), ("lci", c.lci)] {
            if !p.is_valid() {
                bail!("{name} filter parameters out of range: {p:?}");
            }
        }
        Ok(c)
    }
}

fn load(path: &Path, mandatory: Option<&[usize]>) -> Result<StopInstance> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let inst = parse_instance(&text, mandatory).with_context(|| format!("parsing {}", path.display()))?;
    Ok(inst.with_name(name))
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn manifest_entries(path: &Path) -> Result<Vec<(PathBuf, Option<String>)>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let base = path.parent().unwrap_or(Path::new("."));
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            let mut parts = l.split_whitespace();
            let file = base.join(parts.next().expect("line is not empty"));
            (file, parts.next().map(str::to_string))
        })
        .collect())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Solve {
            instance,
            solver,
            mandatory,
            json,
        } => {
            let inst = load(&instance, mandatory.as_deref())?;
            let report = solve(&inst, solver.mode, &solver.config()?)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                println!("instance {} mode {} status {}", report.instance, report.mode, report.status);
                let show = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.4}"));
                let lb = report.lower_bound.map_or("-".to_string(), |v| v.to_string());
                println!("LB {lb} UB {} LP {} root {}", show(report.upper_bound), show(report.lp_bound), show(report.root_bound));
                println!(
                    "gap {:.2}% nodes {} cuts gcc {} cc {} lci {} time {:.2} s",
                    100.0 * report.gap(),
                    report.nodes,
                    report.cuts.gcc,
                    report.cuts.cc,
                    report.cuts.lci,
                    report.times.total()
                );
                for route in &report.routes {
                    let ids: Vec<String> = route.iter().map(|v| v.to_string()).collect();
                    println!("route {}", ids.join(" "));
                }
            }
        }
        Command::Generate {
            instance,
            fraction,
            seed,
            output,
        } => {
            let base = load(&instance, None)?;
            let derived = generate_stop(&base, fraction, seed)?;
            let text = serialize_instance(&derived).context("instance has no coordinates")?;
            emit(output.as_deref(), &text)?;
        }
        Command::Bench {
            instances,
            manifest,
            solver,
            jobs,
            format,
            with_timing,
            output,
        } => {
            let mut entries: Vec<(PathBuf, Option<String>)> = instances.into_iter().map(|p| (p, None)).collect();
            if let Some(m) = manifest {
                entries.extend(manifest_entries(&m)?);
            }
            let items = entries
                .iter()
                .map(|(path, set)| {
                    let b = BenchInstance::from_name(load(path, None)?);
                    Ok(match set {
                        Some(set) => BenchInstance { set: set.clone(), ..b },
                        None => b,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let table = run_bench(&items, solver.mode, &solver.config()?, jobs);
            let text = match format {
                Format::Csv => table.to_csv(with_timing),
                Format::Text => table.to_text(),
                Format::Json => table.rows.iter().map(|r| serde_json::to_string(r).map(|s| s + "\n")).collect::<Result<String, _>>()?,
            };
            emit(output.as_deref(), &text)?;
        }
        Command::Validate {
            instance,
            routes,
            reward,
            oracle,
            budget,
        } => {
            let inst = load(&instance, None)?;
            if routes.is_none() && !oracle {
                bail!("nothing to validate: pass --routes and/or --oracle");
            }
            let mut ok = true;
            let mut claimed = None;
            if let Some(path) = routes {
                let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
                let parsed = parse_routes(&text).map_err(anyhow::Error::msg)?;
                let verdict = validate_routes(&inst, &parsed, reward);
                if verdict.is_valid() {
                    println!("valid: reward {}", verdict.reward);
                    claimed = Some(verdict.reward);
                } else {
                    ok = false;
                    println!("invalid:");
                    for v in &verdict.violations {
                        println!("  {v}");
                    }
                }
            }
            if oracle {
                match enumerate_optimal(&inst, budget)? {
                    Some(best) => {
                        println!("oracle optimum {}", best.reward);
                        for route in &best.routes {
                            let ids: Vec<String> = route.iter().map(|v| v.to_string()).collect();
                            println!("route {}", ids.join(" "));
                        }
                        if let Some(c) = claimed.filter(|&c| c != best.reward) {
                            println!("routes collect {c}, below the optimum");
                            ok = false;
                        }
                    }
                    None => {
                        println!("oracle: infeasible");
                        ok &= claimed.is_none();
                    }
                }
            }
            if !ok {
                std::process::exit(1);
            }
        }
    }
    Ok(())
}
