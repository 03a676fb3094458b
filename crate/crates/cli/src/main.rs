//! Command-line front end: build networks, print bounds, verify equality
//! with the coordinate maximum, run the depth-reduction pipeline, export
//! weight graphs, and canonicalize depth-2 networks.
//!
//! Exit codes: 0 success / equal, 2 counterexample, 3 invalid input or
//! usage, 4 region budget exceeded.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use relumax_core::bounds::{
    alpha, alpha_identity_check, clique_forcing_edges, depth3_width_lower_bound,
    depth_hypothesis_holds, guaranteed_clique_size, turan_max_edges, width_lower_bound,
    BoundResult,
};
use relumax_core::constructions::{max2_gadget, random_network, tournament_max, RationalGrid};
use relumax_core::graph::first_layer_graph;
use relumax_core::io::{network_from_json, network_to_json};
use relumax_core::rational::{floor_decimal, format_rational, parse_rational, Rational};
use relumax_core::sampling::{rng_from_seed, sample_point};
use relumax_core::transforms::{
    depth2_simplify, nondiff_hyperplanes, reduce_pipeline, ReductionOutcome, ReductionReport,
};
use relumax_core::verify::{
    equals_max_on_box, equals_network_on_box, Verdict, DEFAULT_REGION_BUDGET,
};
use relumax_core::{BoxDomain, ReluNetwork};

const EXIT_OK: u8 = 0;
const EXIT_COUNTEREXAMPLE: u8 = 2;
const EXIT_INVALID: u8 = 3;
const EXIT_BUDGET: u8 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Parser)]
#[command(
    name = "relumax",
    version,
    about = "Exact-arithmetic toolkit for ReLU networks and the coordinate maximum"
)]
struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Seed driving every randomized choice
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Cap on visited activation regions in exact verification
    #[arg(long, global = true, default_value_t = DEFAULT_REGION_BUDGET)]
    budget: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct networks in the JSON interchange format
    Build {
        #[command(subcommand)]
        what: BuildWhat,
    },
    /// Closed-form width bounds and clique thresholds for given d and k
    Bounds {
        #[arg(long)]
        d: u64,
        #[arg(long)]
        k: u32,
        /// Clique size for the edge thresholds
        #[arg(long, default_value_t = 3)]
        r: u32,
        /// Slack for the clique-forcing threshold, e.g. 1/38
        #[arg(long)]
        delta: Option<String>,
    },
    /// Decide equality with the coordinate maximum or between two networks
    Verify {
        #[command(subcommand)]
        what: VerifyWhat,
    },
    /// Run the depth-reduction pipeline and emit a full report
    Reduce {
        #[arg(long)]
        net: PathBuf,
        /// Box on which the network is assumed to compute the maximum
        #[arg(long = "box", default_value = "unit", allow_hyphen_values = true)]
        box_spec: String,
        /// Report destination (stdout when omitted)
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Weight graph induced by the first hidden layer
    Graph {
        #[arg(long)]
        net: PathBuf,
        /// Write DOT here instead of printing it
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Canonicalize a depth-2 network and list its kink hyperplanes
    Simplify {
        #[arg(long)]
        net: PathBuf,
        /// Write the simplified network here
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum BuildWhat {
    /// Pairwise-maximum tournament over d inputs
    Tournament {
        #[arg(long)]
        d: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// The three-neuron two-input maximum gadget
    Max2 {
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Seeded random network on a rational grid
    Random {
        #[arg(long)]
        input_dim: usize,
        /// Comma-separated hidden widths, e.g. 4,3
        #[arg(long)]
        widths: String,
        /// Weight grid as lo..hi/denom numerators, e.g. -8..8/4
        #[arg(long, default_value = "-8..8/4", allow_hyphen_values = true)]
        grid: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum VerifyWhat {
    /// Compare a network with the coordinate maximum on a box
    Max {
        #[arg(long)]
        net: PathBuf,
        #[arg(long = "box", default_value = "unit", allow_hyphen_values = true)]
        box_spec: String,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
        /// Sample count for sampled mode
        #[arg(long, default_value_t = 1000)]
        samples: u32,
    },
    /// Compare two networks on a box
    Eq {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long = "box", default_value = "unit", allow_hyphen_values = true)]
        box_spec: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exact,
    Sample,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help and version requests are not usage errors
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_INVALID,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_INVALID)
        }
    }
}

fn run(cli: Cli) -> Result<u8, String> {
    match cli.command {
        Command::Build { what } => build(what, cli.seed),
        Command::Bounds { d, k, r, delta } => bounds(d, k, r, delta, cli.format),
        Command::Verify { what } => verify(what, cli.format, cli.seed, cli.budget),
        Command::Reduce {
            net,
            box_spec,
            output,
        } => reduce(&net, &box_spec, output, cli.seed, cli.budget),
        Command::Graph { net, dot } => graph(&net, dot, cli.format),
        Command::Simplify { net, output } => simplify(&net, output, cli.format),
    }
}

fn load_network(path: &PathBuf) -> Result<ReluNetwork, String> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    network_from_json(&text).map_err(|e| e.to_string())
}

fn emit(path: &Option<PathBuf>, content: &str) -> Result<(), String> {
    match path {
        Some(p) => fs::write(p, content).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => {
            println!("{content}");
            Ok(())
        }
    }
}

fn parse_box(spec: &str, dim: usize) -> Result<BoxDomain, String> {
    if spec == "unit" {
        return Ok(BoxDomain::unit(dim));
    }
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    for part in spec.split(';') {
        let (l, h) = part
            .split_once(',')
            .ok_or_else(|| format!("box interval {part:?} must be lo,hi"))?;
        lo.push(parse_rational(l.trim()).map_err(|e| e.to_string())?);
        hi.push(parse_rational(h.trim()).map_err(|e| e.to_string())?);
    }
    if lo.len() != dim {
        return Err(format!("box has {} intervals, network expects {dim}", lo.len()));
    }
    BoxDomain::new(lo, hi).map_err(|e| e.to_string())
}

fn parse_grid(spec: &str) -> Result<RationalGrid, String> {
    let err = || format!("grid {spec:?} must look like lo..hi/denom, e.g. -8..8/4");
    let (range, denom) = spec.split_once('/').ok_or_else(err)?;
    let (lo, hi) = range.split_once("..").ok_or_else(err)?;
    let lo: i64 = lo.trim().parse().map_err(|_| err())?;
    let hi: i64 = hi.trim().parse().map_err(|_| err())?;
    let denom: u64 = denom.trim().parse().map_err(|_| err())?;
    RationalGrid::new(lo, hi, denom).map_err(|e| e.to_string())
}

fn build(what: BuildWhat, seed: u64) -> Result<u8, String> {
    let (net, output) = match what {
        BuildWhat::Tournament { d, output } => {
            (tournament_max(d).map_err(|e| e.to_string())?, output)
        }
        BuildWhat::Max2 { output } => (max2_gadget(), output),
        BuildWhat::Random {
            input_dim,
            widths,
            grid,
            output,
        } => {
            let widths: Vec<usize> = widths
                .split(',')
                .map(|w| w.trim().parse().map_err(|_| format!("bad width {w:?}")))
                .collect::<Result<_, _>>()?;
            let grid = parse_grid(&grid)?;
            (
                random_network(input_dim, &widths, grid, seed).map_err(|e| e.to_string())?,
                output,
            )
        }
    };
    emit(&output, &network_to_json(&net))?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct BoundsOutput {
    d: u64,
    k: u32,
    hypothesis_holds: bool,
    alpha: String,
    alpha_identity_holds: Option<bool>,
    depth_k_width_bound: BoundResult,
    depth3_width_bound: String,
    turan_r: u32,
    turan_max_edges: String,
    clique_forcing_threshold: Option<BoundResult>,
    guaranteed_clique_size: Option<u64>,
}

fn approx(value: &Rational) -> String {
    format!("{} (~ {})", format_rational(value), floor_decimal(value, 4))
}

fn bounds(d: u64, k: u32, r: u32, delta: Option<String>, format: Format) -> Result<u8, String> {
    let alpha_value = alpha(k).map_err(|e| e.to_string())?;
    let identity = if k >= 4 {
        Some(alpha_identity_check(k).map_err(|e| e.to_string())?)
    } else {
        None
    };
    let width_bound = width_lower_bound(d, k).map_err(|e| e.to_string())?;
    let depth3_bound = depth3_width_lower_bound(d).map_err(|e| e.to_string())?;
    let turan = turan_max_edges(d, r).map_err(|e| e.to_string())?;
    let forcing = match &delta {
        Some(text) => {
            let delta = parse_rational(text).map_err(|e| e.to_string())?;
            Some(clique_forcing_edges(d, r, &delta).map_err(|e| e.to_string())?)
        }
        None => None,
    };
    let hypothesis = depth_hypothesis_holds(d, k);
    let clique_size = if hypothesis {
        Some(guaranteed_clique_size(d, k).map_err(|e| e.to_string())?)
    } else {
        None
    };

    match format {
        Format::Json => {
            let out = BoundsOutput {
                d,
                k,
                hypothesis_holds: hypothesis,
                alpha: format_rational(&alpha_value),
                alpha_identity_holds: identity,
                depth_k_width_bound: width_bound,
                depth3_width_bound: depth3_bound.to_string(),
                turan_r: r,
                turan_max_edges: format_rational(&turan),
                clique_forcing_threshold: forcing,
                guaranteed_clique_size: clique_size,
            };
            println!("{}", serde_json::to_string_pretty(&out).unwrap());
        }
        Format::Text => {
            println!("bounds for d = {d}, k = {k} (decimals are approximate, rounded down)");
            println!("  alpha_k                      {}", approx(&alpha_value));
            if let Some(holds) = identity {
                println!("  alpha telescoping identity   {holds}");
            }
            let exact = width_bound
                .value_exact
                .as_ref()
                .map(format_rational)
                .unwrap_or_else(|| "irrational".to_string());
            println!(
                "  depth-k width lower bound    {} (~ {}) [{}]",
                exact, width_bound.value_decimal, width_bound.validity_note
            );
            println!("  depth-3 width lower bound    {depth3_bound}");
            println!("  max edges without K_{r}       {}", approx(&turan));
            if let Some(forcing) = &forcing {
                let exact = forcing
                    .value_exact
                    .as_ref()
                    .map(format_rational)
                    .unwrap_or_default();
                println!(
                    "  edges forcing a K_{r}         {} (~ {})",
                    exact, forcing.value_decimal
                );
            }
            match clique_size {
                Some(size) => println!("  guaranteed clique size       {size}"),
                None => println!("  guaranteed clique size       n/a (hypothesis fails)"),
            }
        }
    }
    Ok(EXIT_OK)
}

fn exit_code_for(verdict: &Verdict) -> u8 {
    match verdict {
        Verdict::Equal => EXIT_OK,
        Verdict::Counterexample { .. } => EXIT_COUNTEREXAMPLE,
        Verdict::BudgetExceeded { .. } => EXIT_BUDGET,
    }
}

fn print_verdict(verdict: &Verdict, format: Format) {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(verdict).unwrap()),
        Format::Text => match verdict {
            Verdict::Equal => println!("equal"),
            Verdict::Counterexample {
                point,
                net_value,
                target_value,
            } => {
                let coords: Vec<String> = point.iter().map(format_rational).collect();
                println!("counterexample at [{}]", coords.join(", "));
                println!("  network value {}", approx(net_value));
                println!("  target value  {}", approx(target_value));
            }
            Verdict::BudgetExceeded { regions_visited } => {
                println!("budget exceeded after {regions_visited} regions")
            }
        },
    }
}

fn verify(what: VerifyWhat, format: Format, seed: u64, budget: u64) -> Result<u8, String> {
    match what {
        VerifyWhat::Max {
            net,
            box_spec,
            mode,
            samples,
        } => {
            let net = load_network(&net)?;
            let domain = parse_box(&box_spec, net.input_dim())?;
            let verdict = match mode {
                Mode::Exact => {
                    equals_max_on_box(&net, &domain, budget).map_err(|e| e.to_string())?
                }
                Mode::Sample => sampled_max_check(&net, &domain, samples, seed)?,
            };
            print_verdict(&verdict, format);
            Ok(exit_code_for(&verdict))
        }
        VerifyWhat::Eq { a, b, box_spec } => {
            let a = load_network(&a)?;
            let b = load_network(&b)?;
            let domain = parse_box(&box_spec, a.input_dim())?;
            let verdict =
                equals_network_on_box(&a, &b, &domain, budget).map_err(|e| e.to_string())?;
            print_verdict(&verdict, format);
            Ok(exit_code_for(&verdict))
        }
    }
}

fn sampled_max_check(
    net: &ReluNetwork,
    domain: &BoxDomain,
    samples: u32,
    seed: u64,
) -> Result<Verdict, String> {
    let mut rng = rng_from_seed(seed);
    for _ in 0..samples {
        let x = sample_point(&mut rng, domain, 64);
        let net_value = net.eval(&x).map_err(|e| e.to_string())?;
        let target_value = relumax_core::constructions::max_oracle(&x);
        if net_value != target_value {
            return Ok(Verdict::Counterexample {
                point: x,
                net_value,
                target_value,
            });
        }
    }
    Ok(Verdict::Equal)
}

#[derive(Serialize)]
struct ReduceOutput {
    #[serde(flatten)]
    report: ReductionReport,
    /// Verdict of the exact verifier on the collapsed network against the
    /// clique-sized maximum, when a collapse happened.
    collapsed_max_verdict: Option<Verdict>,
}

fn reduce(
    net_path: &PathBuf,
    box_spec: &str,
    output: Option<PathBuf>,
    seed: u64,
    budget: u64,
) -> Result<u8, String> {
    let net = load_network(net_path)?;
    if net.depth() < 3 {
        return Err(format!(
            "the reduction pipeline requires depth >= 3; {} has depth {}",
            net_path.display(),
            net.depth()
        ));
    }
    let domain = parse_box(box_spec, net.input_dim())?;
    if domain != BoxDomain::unit(net.input_dim()) {
        return Err("the reduction pipeline supports only --box unit".to_string());
    }
    let report = reduce_pipeline(&net, &domain, seed);
    let collapsed_max_verdict = match (&report.outcome, &report.collapsed) {
        (ReductionOutcome::Collapsed, Some(collapsed)) => Some(
            equals_max_on_box(collapsed, &BoxDomain::unit(collapsed.input_dim()), budget)
                .map_err(|e| e.to_string())?,
        ),
        _ => None,
    };
    let out = ReduceOutput {
        report,
        collapsed_max_verdict,
    };
    emit(&output, &serde_json::to_string_pretty(&out).unwrap())?;
    Ok(EXIT_OK)
}

fn graph(net_path: &PathBuf, dot: Option<PathBuf>, format: Format) -> Result<u8, String> {
    let net = load_network(net_path)?;
    let graph = first_layer_graph(&net);
    match (dot, format) {
        (Some(path), _) => emit(&Some(path), &graph.to_dot())?,
        (None, Format::Json) => println!("{}", serde_json::to_string_pretty(&graph).unwrap()),
        (None, Format::Text) => print!("{}", graph.to_dot()),
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct SimplifyOutput {
    simplified: ReluNetwork,
    smoothed_pairs: Vec<relumax_core::transforms::SmoothedPair>,
    hyperplanes: Vec<relumax_core::transforms::Hyperplane>,
}

fn simplify(net_path: &PathBuf, output: Option<PathBuf>, format: Format) -> Result<u8, String> {
    let net = load_network(net_path)?;
    let (simplified, smoothed_pairs) = depth2_simplify(&net).map_err(|e| e.to_string())?;
    let hyperplanes: Vec<_> = nondiff_hyperplanes(&net)
        .map_err(|e| e.to_string())?
        .into_iter()
        .collect();
    if let Some(path) = &output {
        fs::write(path, network_to_json(&simplified))
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    match format {
        Format::Json => {
            let out = SimplifyOutput {
                simplified,
                smoothed_pairs,
                hyperplanes,
            };
            println!("{}", serde_json::to_string_pretty(&out).unwrap());
        }
        Format::Text => {
            println!(
                "simplified to width {} ({} smoothed pairs)",
                simplified.width(),
                smoothed_pairs.len()
            );
            println!("kink hyperplanes ({}):", hyperplanes.len());
            for plane in &hyperplanes {
                let terms: Vec<String> = plane.normal.iter().map(format_rational).collect();
                println!("  [{}] . x + {} = 0", terms.join(", "), format_rational(&plane.offset));
            }
        }
    }
    Ok(EXIT_OK)
}
