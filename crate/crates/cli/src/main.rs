//! `balk`: axiom checks, constructions, theorem oracles and pretangent
//! computations over canonical JSON files.
//!
//! Every run writes exactly one document to stdout (or `--output`/`--out`);
//! stderr carries diagnostics only. Exit codes: 0 pass/success, 1 a check
//! or oracle reported a violation, 2 input error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use balk_core::axioms::registry::{checker, CheckInput, InputKind};
use balk_core::axioms::{check_balk, CheckConfig};
use balk_core::construct::{
    balk_to_g, diameter_balk, example_2_5, g_to_balk, generalized_diameter, random_metric,
    tau_squared,
};
use balk_core::pretangent::{rule_by_name, Scenario};
use balk_core::theorems::verifier;
use balk_core::{
    canonical_json, CheckReport, Error, FiniteMetric, GMetricTable, SetFunction, Subset, Tolerance,
};

#[derive(Parser)]
#[command(
    name = "balk",
    version,
    about = "Extended (Balk) metrics: axiom verification, constructions, theorem oracles and pretangent spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args)]
struct CommonFlags {
    /// Comparison tolerance (relative, floor 1).
    #[arg(long, default_value_t = 1e-9)]
    epsilon: f64,
    /// Sample budget for over-cap enumerations.
    #[arg(long)]
    budget: Option<u64>,
    /// Seed for sampled enumerations.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Run an axiom checker on an input file.
    Check {
        /// One of: balk, g, symmetric-g, metric, k-increasing,
        /// k-weakly-decreasing, increasing, ultra.
        #[arg(long)]
        kind: String,
        #[arg(long)]
        input: PathBuf,
        /// Cardinality parameter for the k-checkers.
        #[arg(long)]
        k: Option<u32>,
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Build an object and write it as a canonical document.
    Construct {
        #[command(subcommand)]
        what: ConstructCmd,
    },
    /// Generalized diameter: max of tau over subsets of A of size <= k.
    Diam {
        #[arg(long)]
        tau: PathBuf,
        #[arg(long)]
        k: u32,
        /// Comma-joined labels of A, e.g. "a,b,c".
        #[arg(long)]
        set: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run a theorem or lemma oracle: 2.11, 2.13, 2.15, lemma3.6, lemma3.7.
    Verify {
        theorem: String,
        #[arg(long)]
        tau: PathBuf,
        #[arg(long)]
        k: Option<u32>,
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Pretangent-space computations over a scenario file.
    Pretangent {
        #[arg(value_parser = ["build", "lift", "generated", "ultra-criterion"])]
        action: String,
        #[arg(long)]
        scenario: PathBuf,
        /// Rule for the lifted set function: diameter or explicit.
        #[arg(long, default_value = "diameter")]
        tau_rule: String,
        /// Set function file for the explicit rule.
        #[arg(long)]
        tau: Option<PathBuf>,
        /// Class subset for lift: "all" or comma-joined class indices.
        #[arg(long, default_value = "all")]
        set: String,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(Subcommand)]
enum ConstructCmd {
    /// Diameter-generated extended metric of a metric file.
    Diam {
        #[arg(long)]
        metric: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Increasing extended metric with the given ternary table.
    FromG {
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The k-increasing / not (k+1)-increasing level-table family.
    Example25 {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
        /// Level values t_2..t_{k+2}, comma-separated; defaults otherwise.
        #[arg(long, value_delimiter = ',')]
        t: Option<Vec<f64>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Binary projection of an extended metric (a metric file).
    Tau2 {
        #[arg(long)]
        tau: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Ternary projection of an extended metric (a G table file).
    ToG {
        #[arg(long)]
        tau: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Deterministic random metric: uniform points in the unit square.
    RandomMetric {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn read_text(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path)
        .map_err(|e| Error::input(format!("cannot read {}: {e}", path.display())))
}

fn parse_file<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Error> {
    let text = read_text(path)?;
    serde_json::from_str(&text)
        .map_err(|e| Error::input(format!("cannot parse {}: {e}", path.display())))
}

fn emit(document: &str, output: Option<&Path>) -> Result<(), Error> {
    match output {
        Some(path) => fs::write(path, document)
            .map_err(|e| Error::input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{document}");
            Ok(())
        }
    }
}

fn config(common: &CommonFlags) -> Result<CheckConfig, Error> {
    Ok(CheckConfig {
        tolerance: Tolerance::relative(common.epsilon)?,
        budget: common.budget,
        seed: common.seed,
        ..CheckConfig::default()
    })
}

fn render_check(report: &CheckReport, format: Format) -> String {
    match format {
        Format::Json => canonical_json(report),
        Format::Text => report.render_text(),
    }
}

fn run(command: Command) -> Result<u8, Error> {
    match command {
        Command::Check {
            kind,
            input,
            k,
            common,
        } => {
            let chk = checker(&kind).ok_or_else(|| {
                Error::input(format!(
                    "unknown check kind {kind:?}; known: {}",
                    balk_core::axioms::registry::checker_names().join(", ")
                ))
            })?;
            let cfg = config(&common)?;
            let report = match chk.input_kind() {
                InputKind::SetFunction => {
                    let tau: SetFunction = parse_file(&input)?;
                    chk.run(&CheckInput::Tau(&tau), k, &cfg)?
                }
                InputKind::Metric => {
                    let d: FiniteMetric = parse_file(&input)?;
                    chk.run(&CheckInput::Metric(&d), k, &cfg)?
                }
                InputKind::GTable => {
                    let g: GMetricTable = parse_file(&input)?;
                    chk.run(&CheckInput::GTable(&g), k, &cfg)?
                }
            };
            emit(&render_check(&report, common.format), common.output.as_deref())?;
            Ok(if report.passed() { 0 } else { 1 })
        }

        Command::Construct { what } => run_construct(what),

        Command::Diam {
            tau,
            k,
            set,
            output,
        } => {
            let tau: SetFunction = parse_file(&tau)?;
            let subset = parse_label_list(&set, &tau)?;
            let value = generalized_diameter(&tau, k, subset)?;
            let doc = canonical_json(&serde_json::json!({
                "k": k,
                "set": set,
                "value": value,
            }));
            emit(&doc, output.as_deref())?;
            Ok(0)
        }

        Command::Verify {
            theorem,
            tau,
            k,
            common,
        } => {
            let v = verifier(&theorem).ok_or_else(|| {
                Error::input(format!(
                    "unknown claim {theorem:?}; known: 2.11, 2.13, 2.15, lemma3.6, lemma3.7"
                ))
            })?;
            let tau: SetFunction = parse_file(&tau)?;
            let cfg = config(&common)?;
            let report = v.run(&tau, k, &cfg)?;
            let doc = match common.format {
                Format::Json => canonical_json(&report),
                Format::Text => report.render_text(),
            };
            emit(&doc, common.output.as_deref())?;
            Ok(if report.passed() { 0 } else { 1 })
        }

        Command::Pretangent {
            action,
            scenario,
            tau_rule,
            tau,
            set,
            output,
            format,
        } => {
            let scenario: Scenario = parse_file(&scenario)?;
            let ev = scenario.evaluate()?;
            match action.as_str() {
                "build" => {
                    let (_, out) = ev.build()?;
                    let doc = match format {
                        Format::Json => canonical_json(&out),
                        Format::Text => out.render_text(),
                    };
                    emit(&doc, output.as_deref())?;
                    Ok(0)
                }
                "lift" => {
                    let explicit = tau.as_deref().map(parse_file::<SetFunction>).transpose()?;
                    let rule = rule_by_name(&tau_rule, explicit)?;
                    rule.validate(&ev.ambient, &CheckConfig::default())?;
                    let (quotient, _) = ev.build()?;
                    let classes: Vec<usize> = if set == "all" {
                        (0..quotient.classes.len()).collect()
                    } else {
                        set.split(',')
                            .map(|part| {
                                part.trim().parse::<usize>().map_err(|_| {
                                    Error::input(format!("bad class index {part:?} in --set"))
                                })
                            })
                            .collect::<Result<_, _>>()?
                    };
                    let value = ev.lift(&quotient, rule.as_ref(), &classes)?;
                    let labels: Vec<&str> =
                        classes.iter().map(|&c| quotient.labels[c].as_str()).collect();
                    let doc = canonical_json(&serde_json::json!({
                        "classes": classes,
                        "labels": labels,
                        "rule": rule.name(),
                        "value": value,
                    }));
                    emit(&doc, output.as_deref())?;
                    Ok(0)
                }
                "generated" => {
                    let explicit = tau.as_deref().map(parse_file::<SetFunction>).transpose()?;
                    let rule = rule_by_name(&tau_rule, explicit)?;
                    rule.validate(&ev.ambient, &CheckConfig::default())?;
                    let report = ev.generated_at_point(rule.as_ref())?;
                    emit(&render_check(&report, format), output.as_deref())?;
                    Ok(if report.passed() { 0 } else { 1 })
                }
                "ultra-criterion" => {
                    let report = ev.ultrametric_criterion()?;
                    emit(&render_check(&report, format), output.as_deref())?;
                    Ok(if report.passed() { 0 } else { 1 })
                }
                other => Err(Error::input(format!("unknown pretangent action {other:?}"))),
            }
        }
    }
}

fn run_construct(what: ConstructCmd) -> Result<u8, Error> {
    let cfg = CheckConfig::default();
    match what {
        ConstructCmd::Diam { metric, out } => {
            let d: FiniteMetric = parse_file(&metric)?;
            let tau = diameter_balk(&d, &cfg)?;
            emit(&canonical_json(&tau), out.as_deref())
        }
        ConstructCmd::FromG { g, out } => {
            let g: GMetricTable = parse_file(&g)?;
            let tau = g_to_balk(&g, &cfg)?;
            emit(&canonical_json(&tau), out.as_deref())
        }
        ConstructCmd::Example25 { n, k, t, out } => {
            let tau = example_2_5(n, k, t.as_deref())?;
            emit(&canonical_json(&tau), out.as_deref())
        }
        ConstructCmd::Tau2 { tau, out } => {
            let tau: SetFunction = parse_file(&tau)?;
            if !check_balk(&tau, &cfg).passed() {
                eprintln!(
                    "warning: input is not an extended metric; the output table \
                     is computed anyway and need not be a metric"
                );
            }
            emit(&canonical_json(&tau_squared(&tau)), out.as_deref())
        }
        ConstructCmd::ToG { tau, out } => {
            let tau: SetFunction = parse_file(&tau)?;
            let result = balk_to_g(&tau, &cfg)?;
            if let Some(diag) = &result.diagnostic {
                eprintln!(
                    "warning: input is not increasing; the emitted table is not \
                     guaranteed to be a G-metric (checker verdict: {})",
                    if diag.passed() { "pass" } else { "fail" }
                );
            }
            emit(&canonical_json(&result.table), out.as_deref())
        }
        ConstructCmd::RandomMetric { n, seed, out } => {
            emit(&canonical_json(&random_metric(n, seed)?), out.as_deref())
        }
    }
    .map(|()| 0)
}

/// Parse a comma-joined label list leniently (any order, no duplicates).
fn parse_label_list(list: &str, tau: &SetFunction) -> Result<Subset, Error> {
    let u = tau.universe();
    let mut bits = 0u32;
    for part in list.split(',') {
        let label = part.trim();
        let idx = u
            .index_of(label)
            .ok_or_else(|| Error::input(format!("unknown label {label:?} in --set")))?;
        if bits & (1 << idx) != 0 {
            return Err(Error::input(format!("duplicate label {label:?} in --set")));
        }
        bits |= 1 << idx;
    }
    if bits == 0 {
        return Err(Error::input("--set must name at least one label"));
    }
    Ok(Subset::from_bits(bits))
}
