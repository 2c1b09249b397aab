use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use ercp_core::branching::{gw_survival_monte_carlo, survival_probability};
use ercp_core::expansion::{
    ball_growth_check, certify_global_expansion, certify_small_set_expansion,
    certify_vertex_expansion, Method, SmallSetConfig, DEFAULT_K_MAX_EXACT, DEFAULT_SEARCH_BUDGET,
    DEFAULT_SET_BUDGET,
};
use ercp_core::experiments::{
    emit_records, emit_size_dump, ExperimentConfig, Experiment, Mode, RecordFormat,
};
use ercp_core::generators::{
    construction_feasibility, load_host, original_constant_instance, AnomalyParams,
};
use ercp_core::graph::write_graph;
use ercp_core::percolation::{percolate_with, Sampler};

#[derive(Parser)]
#[command(name = "ercp", version, about = "Bond percolation experiments on regular host graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a graph from a generator spec and write it in the text format.
    Generate {
        /// e.g. `hypercube:d=10` or `random_regular:n=1000,d=8,seed=1`
        spec: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certify or refute an expansion property; prints one JSON line.
    Certify {
        #[arg(long)]
        graph: String,
        #[arg(long, value_enum)]
        property: PropertyArg,
        #[arg(long, value_enum, default_value = "exact")]
        method: MethodArg,
        /// Exhaustive size cap (P2, P3).
        #[arg(long, default_value_t = DEFAULT_K_MAX_EXACT)]
        kmax: usize,
        /// Search size cap (P3); 0 disables search.
        #[arg(long, default_value_t = 0)]
        kmax_search: usize,
        /// P3 slack: violation when e(U, U^C) < (1 - slack) d |U|.
        #[arg(long, default_value_t = 0.001)]
        slack: f64,
        /// P1 constant c1 or P2 constant c3 to test against.
        #[arg(long)]
        target: Option<f64>,
        /// Search proposals.
        #[arg(long, default_value_t = DEFAULT_SEARCH_BUDGET)]
        budget: u64,
        /// Exhaustive enumeration cap (number of sets).
        #[arg(long, default_value_t = DEFAULT_SET_BUDGET)]
        set_budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check ball growth |B(v, r)| >= min(k, eps^(-3r)) at sampled vertices.
    Balls {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        radius: usize,
        #[arg(long, default_value_t = 1000)]
        probes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Galton-Watson survival probability.
    Gw {
        #[arg(long, required_unless_present = "mc")]
        eps: Option<f64>,
        /// Monte Carlo with Bin(d, p) offspring instead of the fixed point.
        #[arg(long, requires_all = ["d", "p"])]
        mc: bool,
        #[arg(long)]
        d: Option<u64>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 200)]
        depth: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Percolate a graph once and print component statistics as JSON.
    Percolate {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Include the full component-size histogram.
        #[arg(long)]
        stats: bool,
        /// Write retained edge ids, one per line.
        #[arg(long)]
        dump_edges: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "auto")]
        sampler: SamplerArg,
    },
    /// Run a batch of percolation trials. Exit status 0 = PASS, 2 = FAIL, 1 = error.
    Experiment {
        /// JSON config; other flags are ignored when given, except outputs and --workers.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, required_unless_present = "config")]
        graph: Option<String>,
        #[arg(long, allow_negative_numbers = true, required_unless_present = "config")]
        eps: Option<f64>,
        #[arg(long, default_value_t = 1)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "ercp")]
        mode: ModeArg,
        #[arg(long)]
        large: Option<f64>,
        #[arg(long)]
        gap_lo: Option<f64>,
        #[arg(long)]
        gap_hi: Option<f64>,
        #[arg(long)]
        workers: Option<usize>,
        /// Records file; `.json` selects JSON, anything else CSV.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Summary JSON; printed to stdout when absent.
        #[arg(long)]
        summary: Option<PathBuf>,
        /// Per-trial component sizes as `trial_idx,size,count` CSV.
        #[arg(long)]
        dump_sizes: Option<PathBuf>,
        /// Record wall time per trial (output then varies between runs).
        #[arg(long)]
        timing: bool,
    },
    /// Closed-form expectations for the partitioned construction.
    Feasibility {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        c1p: usize,
        #[arg(long)]
        nc: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 1.0)]
        desired: f64,
        /// Also evaluate the original constants with this c1.
        #[arg(long)]
        original_c1: Option<f64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PropertyArg {
    P1,
    P2,
    P3,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Exact,
    Spectral,
    Search,
}

#[derive(Clone, Copy, ValueEnum)]
enum SamplerArg {
    Auto,
    PerEdge,
    BlockSkip,
}

impl From<SamplerArg> for Sampler {
    fn from(s: SamplerArg) -> Self {
        match s {
            SamplerArg::Auto => Sampler::Auto,
            SamplerArg::PerEdge => Sampler::PerEdge,
            SamplerArg::BlockSkip => Sampler::BlockSkip,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Ercp,
    Subcritical,
    Gap,
    Sprinkle,
    Anomaly,
    Dense,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Ercp => Mode::Ercp,
            ModeArg::Subcritical => Mode::Subcritical,
            ModeArg::Gap => Mode::Gap,
            ModeArg::Sprinkle => Mode::Sprinkle,
            ModeArg::Anomaly => Mode::Anomaly,
            ModeArg::Dense => Mode::Dense,
        }
    }
}

fn print_line(value: &serde_json::Value) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn generate(spec: &str, out: Option<PathBuf>) -> Result<()> {
    let host = load_host(spec)?;
    match out {
        Some(path) => {
            let file = File::create(&path).with_context(|| path.display().to_string())?;
            let mut w = BufWriter::new(file);
            write_graph(&host.graph, &mut w)?;
            w.flush()?;
        }
        None => {
            let mut w = BufWriter::new(io::stdout().lock());
            write_graph(&host.graph, &mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn certify(
    graph: &str,
    property: PropertyArg,
    method: MethodArg,
    kmax: usize,
    kmax_search: usize,
    slack: f64,
    target: Option<f64>,
    budget: u64,
    set_budget: u64,
    seed: u64,
) -> Result<()> {
    let g = load_host(graph)?.graph;
    let report = match property {
        PropertyArg::P1 => {
            let method = match method {
                MethodArg::Exact => Method::Exact,
                MethodArg::Spectral => Method::Spectral,
                MethodArg::Search => Method::Search,
            };
            certify_global_expansion(&g, method, target, budget, seed)?
        }
        PropertyArg::P2 => certify_vertex_expansion(&g, kmax, target.unwrap_or(0.0), set_budget)?,
        PropertyArg::P3 => {
            let search = if matches!(method, MethodArg::Search) && kmax_search == 0 {
                kmax.max(1) * 4
            } else {
                kmax_search
            };
            let cfg = SmallSetConfig {
                k_max_exact: kmax,
                k_max_search: search,
                slack,
                search_budget: budget,
                set_budget,
                seed,
            };
            certify_small_set_expansion(&g, &cfg)?
        }
    };
    print_line(&serde_json::to_value(&report)?)
}

fn gw(eps: Option<f64>, mc: bool, d: Option<u64>, p: Option<f64>, trials: u64, depth: u32, seed: u64) -> Result<()> {
    if mc {
        let (d, p) = (d.unwrap_or_default(), p.unwrap_or_default());
        let est = gw_survival_monte_carlo(d, p, depth, trials, seed);
        let mut value = serde_json::to_value(est)?;
        if let Some(eps) = eps {
            value["y_reference"] = json!(survival_probability(eps).y);
        }
        return print_line(&value);
    }
    let eps = eps.expect("clap enforces --eps");
    println!("{:.12}", survival_probability(eps).y);
    Ok(())
}

fn percolate_cmd(
    graph: &str,
    p: f64,
    seed: u64,
    stats: bool,
    dump_edges: Option<PathBuf>,
    sampler: SamplerArg,
) -> Result<()> {
    let g = load_host(graph)?.graph;
    let sample = percolate_with(&g, p, seed, sampler.into())?;
    let summary = sample.components(&g)?;
    let mut value = json!({
        "n": g.n(),
        "m": g.m(),
        "p": p,
        "seed": seed,
        "sampler": sample.sampler(),
        "retained": sample.retained_count(),
        "L1": summary.largest(),
        "L2": summary.second_largest(),
        "component_count": summary.count(),
        "largest_sizes": &summary.sizes()[..summary.count().min(10)],
    });
    if stats {
        let mut hist: Vec<[usize; 2]> = Vec::new();
        for &s in summary.sizes() {
            match hist.last_mut() {
                Some(last) if last[0] == s => last[1] += 1,
                _ => hist.push([s, 1]),
            }
        }
        value["size_histogram"] = json!(hist);
    }
    if let Some(path) = dump_edges {
        let file = File::create(&path).with_context(|| path.display().to_string())?;
        let mut w = BufWriter::new(file);
        for e in sample.retained().ids() {
            writeln!(w, "{e}")?;
        }
        w.flush()?;
        value["edge_dump"] = json!(path);
    }
    print_line(&value)
}

#[allow(clippy::too_many_arguments)]
fn experiment(
    config: Option<PathBuf>,
    graph: Option<String>,
    eps: Option<f64>,
    trials: u64,
    seed: u64,
    mode: ModeArg,
    large: Option<f64>,
    gap_lo: Option<f64>,
    gap_hi: Option<f64>,
    workers: Option<usize>,
    out: Option<PathBuf>,
    summary_path: Option<PathBuf>,
    dump_sizes: Option<PathBuf>,
    timing: bool,
) -> Result<bool> {
    let mut cfg = match config {
        Some(path) => ExperimentConfig::from_json_file(path)?,
        None => {
            let mut c = ExperimentConfig::new(
                graph.expect("clap enforces --graph"),
                mode.into(),
                eps.expect("clap enforces --eps"),
                trials,
                seed,
            );
            c.thresholds.large = large;
            c.thresholds.gap_lo = gap_lo;
            c.thresholds.gap_hi = gap_hi;
            c
        }
    };
    if let Some(w) = workers {
        cfg.workers = w;
    }
    cfg.dump_sizes |= dump_sizes.is_some();
    cfg.timing |= timing;
    let exp = Experiment::new(cfg.clone())?;
    let run = exp.run();
    let records = match &run {
        Ok(r) => &r.records,
        Err(partial) => &partial.records,
    };
    if let Some(path) = &out {
        emit_records(records, RecordFormat::from_path(path), path)?;
    }
    if let Some(path) = &dump_sizes {
        emit_size_dump(records, path)?;
    }
    let run = match run {
        Ok(run) => run,
        Err(partial) => {
            return Err(partial.error).context(format!(
                "experiment aborted after {} completed trials",
                partial.records.len()
            ))
        }
    };
    let doc = json!({
        "config": cfg,
        "gap_window": exp.gap_window(),
        "large_threshold": exp.large_threshold(),
        "summary": run.summary,
        "verdict": run.verdict,
    });
    match summary_path {
        Some(path) => {
            let file = File::create(&path).with_context(|| path.display().to_string())?;
            let mut w = BufWriter::new(file);
            serde_json::to_writer_pretty(&mut w, &doc)?;
            writeln!(w)?;
            w.flush()?;
            println!("{}", run.verdict.label());
        }
        None => print_line(&doc)?,
    }
    Ok(run.verdict.pass)
}

fn feasibility(n: usize, d: usize, c1p: usize, nc: usize, eps: f64, desired: f64, original_c1: Option<f64>) -> Result<()> {
    let params = AnomalyParams {
        n,
        d,
        c1_prime: c1p,
        class_size: nc,
    };
    let mut value = serde_json::to_value(construction_feasibility(&params, eps, desired))?;
    if let Some(c1) = original_c1 {
        value["original_constants"] = serde_json::to_value(original_constant_instance(n as f64, d as f64, c1))?;
    }
    print_line(&value)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Generate { spec, out } => generate(&spec, out)?,
        Command::Certify {
            graph,
            property,
            method,
            kmax,
            kmax_search,
            slack,
            target,
            budget,
            set_budget,
            seed,
        } => certify(&graph, property, method, kmax, kmax_search, slack, target, budget, set_budget, seed)?,
        Command::Balls {
            graph,
            k,
            eps,
            radius,
            probes,
            seed,
        } => {
            let g = load_host(&graph)?.graph;
            let report = ball_growth_check(&g, k, eps, radius, probes, seed)?;
            print_line(&serde_json::to_value(report)?)?;
        }
        Command::Gw {
            eps,
            mc,
            d,
            p,
            trials,
            depth,
            seed,
        } => gw(eps, mc, d, p, trials, depth, seed)?,
        Command::Percolate {
            graph,
            p,
            seed,
            stats,
            dump_edges,
            sampler,
        } => percolate_cmd(&graph, p, seed, stats, dump_edges, sampler)?,
        Command::Experiment {
            config,
            graph,
            eps,
            trials,
            seed,
            mode,
            large,
            gap_lo,
            gap_hi,
            workers,
            out,
            summary,
            dump_sizes,
            timing,
        } => {
            return experiment(
                config, graph, eps, trials, seed, mode, large, gap_lo, gap_hi, workers, out, summary,
                dump_sizes, timing,
            )
        }
        Command::Feasibility {
            n,
            d,
            c1p,
            nc,
            eps,
            desired,
            original_c1,
        } => feasibility(n, d, c1p, nc, eps, desired, original_c1)?,
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn rejects_unknown_property() {
        assert!(Cli::try_parse_from(["ercp", "certify", "--graph", "x", "--property", "p9"]).is_err());
    }

    #[test]
    fn negative_eps_parses() {
        let cli = Cli::try_parse_from(["ercp", "experiment", "--graph", "complete:n=10", "--eps", "-0.3"]).unwrap();
        match cli.command {
            Command::Experiment { eps, .. } => assert_eq!(eps, Some(-0.3)),
            _ => panic!(),
        }
    }
}
