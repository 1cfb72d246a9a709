//! `arp`: command-line access to valuation, release planning, baselines
//! and plan analysis.
//!
//! Exit status is 0 on success, 1 for usage and input errors, 2 for
//! failures of the environment (I/O, non-convergence).

use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use arp_core::analysis::{compare_manual, core_features, fleiss_kappa, symmetric_difference};
use arp_core::baselines::{greedy_one_factor, greedy_two_factor, Factor};
use arp_core::dataio::{
    self, load_dataset, parse_plans_csv, parse_rankings_csv, plans_csv, profiles_csv, to_json, values_csv, Dataset,
    PlanRow,
};
use arp_core::pipeline::{self, BaselineRequest, Discounts, PlanSummary, ReleaseOverrides, SolveRequest, WhatIfRequest};
use arp_core::solver::{brute_force_pareto, brute_force_scalarized};
use arp_core::{ArpError, Plan};

#[derive(Debug, Parser)]
#[command(name = "arp", version, about = "Asymmetric release planning toolkit")]
struct Cli {
    /// Worker threads for sweeps; defaults to all cores.
    #[arg(long, global = true, env = "ARP_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct Output {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Input {
    /// Dataset JSON file or CSV bundle directory.
    #[arg(long)]
    input: PathBuf,
}

#[derive(Debug, Args)]
struct Release {
    /// Capacity per release, comma separated.
    #[arg(long, value_delimiter = ',')]
    capacity: Option<Vec<f64>>,
    /// Satisfaction discounts w(1..K+1), comma separated.
    #[arg(long, value_delimiter = ',')]
    sat_discounts: Option<Vec<f64>>,
    /// Dissatisfaction discounts z(1..K+1), comma separated.
    #[arg(long, value_delimiter = ',')]
    dissat_discounts: Option<Vec<f64>>,
}

impl Release {
    fn overrides(&self) -> ReleaseOverrides {
        let discounts = (self.sat_discounts.is_some() || self.dissat_discounts.is_some()).then(|| Discounts {
            sat: self.sat_discounts.clone(),
            dissat: self.dissat_discounts.clone(),
        });
        ReleaseOverrides {
            capacities: self.capacity.clone(),
            discounts,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Per-feature satisfaction and dissatisfaction values.
    Value {
        #[arg(value_enum)]
        method: ValueMethod,
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        output: Output,
    },
    /// Sweep alpha and report the trade-off plans.
    Solve {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        release: Release,
        #[arg(long, default_value_t = arp_core::sweep::DEFAULT_STEP)]
        step: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Exact solve at a single alpha.
    SolveOne {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        release: Release,
        #[arg(long)]
        alpha: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Non-optimizing comparison plans.
    Baseline {
        #[command(subcommand)]
        kind: BaselineKind,
    },
    /// Exhaustive enumeration for small instances.
    Oracle {
        #[command(subcommand)]
        kind: OracleKind,
    },
    /// Compare and summarize plan lists.
    Analyze {
        #[command(subcommand)]
        kind: AnalyzeKind,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long, default_value_t = arp_service::DEFAULT_PORT)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: std::net::IpAddr,
        /// Per-request time limit in seconds.
        #[arg(long, default_value_t = arp_service::DEFAULT_TIMEOUT.as_secs())]
        timeout: u64,
        /// Computations allowed to run at once.
        #[arg(long)]
        max_concurrent: Option<usize>,
        /// Persist uploaded datasets here.
        #[arg(long)]
        spool: Option<PathBuf>,
        /// Allowed CORS origin; any when omitted.
        #[arg(long)]
        cors_origin: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ValueMethod {
    Onepoint,
    Ahp,
    Kano,
}

impl ValueMethod {
    fn dataset_method(self) -> &'static str {
        match self {
            ValueMethod::Onepoint => "one_point",
            ValueMethod::Ahp => "ahp",
            ValueMethod::Kano => "kano",
        }
    }
}

#[derive(Debug, Subcommand)]
enum BaselineKind {
    /// Seeded random feasible plans, scored against the sweep.
    Random {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        release: Release,
        #[arg(long, default_value_t = 1000)]
        reps: usize,
        #[arg(long, default_value_t = pipeline::DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = arp_core::sweep::DEFAULT_STEP)]
        step: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Greedy by one ranking factor.
    Greedy {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        release: Release,
        #[arg(long)]
        factor: Factor,
        #[command(flatten)]
        output: Output,
    },
    /// Greedy over two alternately merged rankings.
    Greedy2 {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        release: Release,
        /// Two factors, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        factors: Vec<Factor>,
        #[command(flatten)]
        output: Output,
    },
    /// The H1..H8 suite classified against the sweep.
    Suite {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        release: Release,
        /// Heuristic ids, comma separated; all when omitted.
        #[arg(long, value_delimiter = ',')]
        heuristics: Option<Vec<String>>,
        #[arg(long, default_value_t = arp_core::sweep::DEFAULT_STEP)]
        step: f64,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Subcommand)]
enum OracleKind {
    /// Every maximizer of the weighted objective at one alpha.
    Scalarized {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        release: Release,
        #[arg(long)]
        alpha: f64,
        #[command(flatten)]
        output: Output,
    },
    /// The complete non-dominated set.
    Pareto {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        release: Release,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Subcommand)]
enum AnalyzeKind {
    /// Features offered by exactly one plan of each pair.
    Diff {
        /// Plan CSV.
        #[arg(long)]
        plans: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Features offered by every plan.
    Core {
        #[arg(long)]
        plans: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Fleiss' kappa over a rankings CSV.
    Kappa {
        #[arg(long)]
        rankings: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Average improvement of optimized plans over manual ones.
    CompareManual {
        /// Plan CSV with TS and TDS columns.
        #[arg(long)]
        manual: PathBuf,
        #[arg(long)]
        optimized: PathBuf,
        #[command(flatten)]
        output: Output,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error [{}]: {e}", e.code());
            if let ArpError::Validation(diags) = &e {
                for d in diags {
                    eprintln!("  {d}");
                }
            }
            ExitCode::from(if e.is_runtime() { 2 } else { 1 })
        }
    }
}

fn emit(output: &Output, csv: impl FnOnce() -> String, json: impl FnOnce() -> String) -> Result<(), ArpError> {
    let text = match output.format {
        Format::Csv => csv(),
        Format::Json => json(),
    };
    match &output.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit_json<T: Serialize>(output: &Output, value: &T, csv: impl FnOnce() -> String) -> Result<(), ArpError> {
    emit(output, csv, || to_json(value))
}

fn instance(input: &Input, release: &Release) -> Result<(Dataset, arp_core::ArpInstance), ArpError> {
    let ds = load_dataset(&input.input)?;
    let config = release.overrides().resolve(&ds)?;
    let values = ds.valuate()?.values;
    let inst = ds.instance_with(&values, config)?;
    Ok((ds, inst))
}

fn ids(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

fn single_plan(output: &Output, id: &str, plan: &Plan) -> Result<(), ArpError> {
    emit_json(output, &PlanSummary::new(id, plan, Vec::new()), || {
        plans_csv(&[id.to_string()], std::slice::from_ref(plan))
    })
}

fn read_plans(path: &Path) -> Result<Vec<PlanRow>, ArpError> {
    parse_plans_csv(&std::fs::read_to_string(path)?)
}

fn objectives(rows: &[PlanRow], path: &Path) -> Result<Vec<arp_core::Objectives>, ArpError> {
    rows.iter()
        .map(|r| {
            r.objectives().ok_or_else(|| {
                ArpError::InvalidValue(format!("{}: plan {} lacks TS or TDS", path.display(), r.plan_id))
            })
        })
        .collect()
}

fn feature_list(set: &std::collections::BTreeSet<usize>) -> String {
    set.iter().map(|id| format!("F{id}")).collect::<Vec<_>>().join(" ")
}

#[derive(Serialize)]
struct PairDiff {
    a: String,
    b: String,
    difference: Vec<usize>,
}

fn run(cli: Cli) -> Result<(), ArpError> {
    let threads = cli.threads;
    if threads == Some(0) {
        return Err(ArpError::InvalidValue("--threads must be positive".into()));
    }
    match cli.command {
        Command::Value { method, input, output } => {
            let ds = load_dataset(&input.input)?;
            if ds.method() != method.dataset_method() {
                return Err(ArpError::InvalidValue(format!(
                    "dataset carries '{}' valuation data, not '{}'",
                    ds.method(),
                    method.dataset_method()
                )));
            }
            let valuation = pipeline::valuate(&ds)?;
            emit_json(&output, &valuation, || match &valuation.kano_profiles {
                Some(p) => profiles_csv(p),
                None => values_csv(&valuation.values),
            })
        }
        Command::Solve {
            input,
            release,
            step,
            output,
        } => {
            let ds = load_dataset(&input.input)?;
            let request = SolveRequest {
                release: release.overrides(),
                step: Some(step),
            };
            let (_, result, out) = pipeline::solve(&ds, &request, threads)?;
            emit_json(&output, &out, || dataio::pareto_csv(&result))
        }
        Command::SolveOne {
            input,
            release,
            alpha,
            output,
        } => {
            let ds = load_dataset(&input.input)?;
            let request = WhatIfRequest {
                release: release.overrides(),
                alpha: Some(alpha),
                stakeholder_weight_overrides: None,
            };
            let out = pipeline::whatif(&ds, &request)?;
            let inst = ds.instance_with(&out.values, request.release.resolve(&ds)?)?;
            let plan = inst.evaluate(out.plan.assignment.clone())?;
            emit_json(&output, &out, || plans_csv(&["P1".into()], &[plan]))
        }
        Command::Baseline { kind } => match kind {
            BaselineKind::Random {
                input,
                release,
                reps,
                seed,
                step,
                output,
            } => {
                let ds = load_dataset(&input.input)?;
                let request = BaselineRequest {
                    release: release.overrides(),
                    heuristics: Some(Vec::new()),
                    random_reps: Some(reps),
                    seed: Some(seed),
                    step: Some(step),
                };
                let out = pipeline::baselines(&ds, &request, None, threads)?;
                let random = out
                    .random
                    .ok_or_else(|| ArpError::InvalidValue("--reps must be positive".into()))?;
                emit_json(&output, &random, || {
                    let s = &random.stats;
                    let n = s.points.len().max(1) as f64;
                    format!(
                        "replications,seed,dominated,equal,dominating,dominated_or_equal_pct\n{},{},{},{},{},{}\n",
                        random.replications,
                        random.seed,
                        s.dominated,
                        s.equal,
                        s.dominating,
                        dataio::fmt_sig(100.0 * (s.dominated + s.equal) as f64 / n)
                    )
                })
            }
            BaselineKind::Greedy {
                input,
                release,
                factor,
                output,
            } => {
                let (_, inst) = instance(&input, &release)?;
                single_plan(&output, "G1", &greedy_one_factor(&inst, factor)?)
            }
            BaselineKind::Greedy2 {
                input,
                release,
                factors,
                output,
            } => {
                let [a, b] = factors[..] else {
                    return Err(ArpError::InvalidValue(format!("--factors needs exactly two factors, got {}", factors.len())));
                };
                let (_, inst) = instance(&input, &release)?;
                single_plan(&output, "G1", &greedy_two_factor(&inst, a, b)?)
            }
            BaselineKind::Suite {
                input,
                release,
                heuristics,
                step,
                output,
            } => {
                let (ds, inst) = instance(&input, &release)?;
                let request = BaselineRequest {
                    release: release.overrides(),
                    heuristics,
                    random_reps: None,
                    seed: None,
                    step: Some(step),
                };
                let out = pipeline::baselines(&ds, &request, None, threads)?;
                emit_json(&output, &out, || {
                    let ids: Vec<String> = out.heuristics.iter().map(|h| h.id.clone()).collect();
                    let plans: Vec<Plan> = out
                        .heuristics
                        .iter()
                        .map(|h| inst.evaluate(h.plan.assignment.clone()).expect("plan came from this instance"))
                        .collect();
                    dataio::labelled_plans_csv(&ids, &plans, &out.classification.labels)
                })
            }
        },
        Command::Oracle { kind } => match kind {
            OracleKind::Scalarized {
                input,
                release,
                alpha,
                output,
            } => {
                let (_, inst) = instance(&input, &release)?;
                let opt = brute_force_scalarized(&inst, alpha)?;
                let plans: Vec<Plan> = opt
                    .argmax
                    .iter()
                    .map(|a| inst.evaluate(a.clone()))
                    .collect::<Result<_, _>>()?;
                let summaries: Vec<PlanSummary> = plans
                    .iter()
                    .zip(ids("A", plans.len()))
                    .map(|(p, id)| PlanSummary::new(id, p, Vec::new()))
                    .collect();
                emit_json(
                    &output,
                    &serde_json::json!({ "alpha": alpha, "objective": opt.objective, "argmax": summaries }),
                    || plans_csv(&ids("A", plans.len()), &plans),
                )
            }
            OracleKind::Pareto { input, release, output } => {
                let (_, inst) = instance(&input, &release)?;
                let front = brute_force_pareto(&inst)?;
                let summaries: Vec<PlanSummary> = front
                    .iter()
                    .zip(ids("P", front.len()))
                    .map(|(p, id)| PlanSummary::new(id, p, Vec::new()))
                    .collect();
                emit_json(&output, &summaries, || plans_csv(&ids("P", front.len()), &front))
            }
        },
        Command::Analyze { kind } => match kind {
            AnalyzeKind::Diff { plans, output } => {
                let rows = read_plans(&plans)?;
                let mut pairs = Vec::new();
                for (i, a) in rows.iter().enumerate() {
                    for b in &rows[i + 1..] {
                        pairs.push(PairDiff {
                            a: a.plan_id.clone(),
                            b: b.plan_id.clone(),
                            difference: symmetric_difference(&a.offered(), &b.offered()).into_iter().collect(),
                        });
                    }
                }
                emit_json(&output, &pairs, || {
                    let mut s = String::from("a,b,difference\n");
                    for p in &pairs {
                        let set = p.difference.iter().copied().collect();
                        s.push_str(&format!("{},{},{}\n", p.a, p.b, feature_list(&set)));
                    }
                    s
                })
            }
            AnalyzeKind::Core { plans, output } => {
                let rows = read_plans(&plans)?;
                let sets: Vec<_> = rows.iter().map(PlanRow::offered).collect();
                let core = core_features(&sets)?;
                emit_json(&output, &core, || format!("core_features,count\n{},{}\n", feature_list(&core), core.len()))
            }
            AnalyzeKind::Kappa { rankings, output } => {
                let table = parse_rankings_csv(&std::fs::read_to_string(&rankings)?)?;
                let kappa = fleiss_kappa(&table)?;
                emit_json(&output, &serde_json::json!({ "kappa": kappa }), || {
                    format!("kappa\n{}\n", dataio::fmt_sig(kappa))
                })
            }
            AnalyzeKind::CompareManual {
                manual,
                optimized,
                output,
            } => {
                let m = objectives(&read_plans(&manual)?, &manual)?;
                let o = objectives(&read_plans(&optimized)?, &optimized)?;
                let cmp = compare_manual(&m, &o)?;
                emit_json(&output, &cmp, || {
                    format!(
                        "sat_improvement_pct,dissat_improvement_pct\n{},{}\n",
                        dataio::fmt_sig(cmp.sat_improvement_pct),
                        dataio::fmt_sig(cmp.dissat_improvement_pct)
                    )
                })
            }
        },
        Command::Serve {
            port,
            host,
            timeout,
            max_concurrent,
            spool,
            cors_origin,
        } => {
            tracing_subscriber::fmt()
                .with_env_filter(tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()))
                .with_writer(std::io::stderr)
                .init();
            let defaults = arp_service::ServiceOptions::default();
            let options = arp_service::ServiceOptions {
                request_timeout: Duration::from_secs(timeout),
                max_concurrent: max_concurrent.unwrap_or(defaults.max_concurrent),
                threads,
                spool_dir: spool,
                cors_origin,
            };
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(arp_service::serve(SocketAddr::new(host, port), options))
        }
    }
}
