mod bench;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};

use steiner_core::graph::validate_tree;
use steiner_core::io::{parse_gr, parse_stp, write_instance, write_solution, Format, ParseError, ParsedInstance};
use steiner_core::reductions::run_pipeline;
use steiner_core::solver::{solve, HeuristicChoice, SolveConfig, SolveError};

pub(crate) const EXIT_OK: u8 = 0;
pub(crate) const EXIT_INTERNAL: u8 = 1;
pub(crate) const EXIT_INPUT: u8 = 2;
pub(crate) const EXIT_UNSUPPORTED: u8 = 3;
pub(crate) const EXIT_TIMEOUT: u8 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Auto,
    Stp,
    Gr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum HeuristicArg {
    Auto,
    Da,
    Onetree,
    Zero,
}

impl From<HeuristicArg> for HeuristicChoice {
    fn from(h: HeuristicArg) -> Self {
        match h {
            HeuristicArg::Auto => HeuristicChoice::Auto,
            HeuristicArg::Da => HeuristicChoice::DualAscent,
            HeuristicArg::Onetree => HeuristicChoice::OneTree,
            HeuristicArg::Zero => HeuristicChoice::Zero,
        }
    }
}

/// Exact minimum Steiner tree solver for SteinLib and PACE instances.
#[derive(Debug, Parser)]
#[command(version, args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    solve: SolveArgs,
}

#[derive(Debug, Clone, clap::Args)]
struct SolveArgs {
    /// Instance file (.stp or .gr)
    input: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Auto)]
    format: FormatArg,
    #[arg(long, value_enum, default_value_t = HeuristicArg::Auto)]
    heuristic: HeuristicArg,
    /// Skip the reduction pipeline
    #[arg(long)]
    no_preprocess: bool,
    /// Disable upper-bound pruning in the search
    #[arg(long)]
    no_prune: bool,
    /// Wall-clock limit in seconds
    #[arg(long, value_name = "SECS")]
    time_limit: Option<f64>,
    /// Terminal label to root the tree at
    #[arg(long)]
    root: Option<u64>,
    /// Print the tree edges after the VALUE line
    #[arg(long)]
    print_tree: bool,
    /// Re-check the returned tree against the input
    #[arg(long)]
    validate: bool,
    /// Print search statistics as JSON on stderr
    #[arg(long)]
    stats: bool,
    /// Write the reduced instance in .gr format to this path
    #[arg(long, value_name = "PATH")]
    dump_reduced: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve every instance in a directory and print a CSV summary
    Bench {
        dir: PathBuf,
        /// Per-instance limit in seconds
        #[arg(long, default_value_t = 60.0)]
        budget: f64,
        #[arg(long, value_enum, default_value_t = HeuristicArg::Auto)]
        heuristic: HeuristicArg,
        #[arg(long)]
        no_preprocess: bool,
    },
}

pub(crate) fn read_instance(path: &Path, format: Option<Format>) -> Result<ParsedInstance, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let format = format.unwrap_or_else(|| Format::detect(&text));
    let parsed: Result<ParsedInstance, ParseError> = match format {
        Format::Stp => parse_stp(&text),
        Format::Gr => parse_gr(&text),
    };
    parsed.map_err(|e| format!("{}: {e}", path.display()))
}

pub(crate) fn limit(secs: Option<f64>) -> Result<Option<Duration>, String> {
    match secs {
        None => Ok(None),
        Some(s) => Duration::try_from_secs_f64(s)
            .map(Some)
            .map_err(|_| format!("invalid time limit {s}")),
    }
}

fn run_solve(args: SolveArgs) -> u8 {
    let Some(input) = args.input.as_deref() else {
        eprintln!("error: no input file given");
        return EXIT_INPUT;
    };
    let format = match args.format {
        FormatArg::Auto => None,
        FormatArg::Stp => Some(Format::Stp),
        FormatArg::Gr => Some(Format::Gr),
    };
    let parsed = match read_instance(input, format) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    let instance = &parsed.instance;
    let root = match args.root {
        None => parsed.root,
        Some(label) => match parsed.vertex(label).filter(|&v| instance.is_terminal(v)) {
            Some(v) => Some(v),
            None => {
                eprintln!("error: root {label} is not a terminal");
                return EXIT_INPUT;
            }
        },
    };
    let time_limit = match limit(args.time_limit) {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    if parsed.dropped_vertices > 0 {
        eprintln!("note: dropped {} vertices outside the terminals' component", parsed.dropped_vertices);
    }
    let config = SolveConfig {
        preprocess: !args.no_preprocess,
        pruning: !args.no_prune,
        heuristic: args.heuristic.into(),
        time_limit,
        root,
        ..Default::default()
    };

    if let Some(path) = &args.dump_reduced {
        let pre = run_pipeline(instance, &config.reductions);
        let labels: Vec<u64> = (0..pre.reduced.network().vertex_count())
            .map(|v| parsed.label(pre.log.original_vertex(v)))
            .collect();
        if let Err(e) = fs::write(path, write_instance(&pre.reduced, Some(&labels), Format::Gr)) {
            eprintln!("error: {}: {e}", path.display());
            return EXIT_INPUT;
        }
        let [introduced, contracted, vertices, edges] = pre.log.summary();
        eprintln!(
            "reduced: {} vertices, {} edges, {} terminals, offset {}; log: {introduced} introduced, {contracted} contracted, {vertices} vertices removed, {edges} edges removed",
            pre.reduced.network().vertex_count(),
            pre.reduced.network().edge_count(),
            pre.reduced.terminals().len(),
            pre.offset,
        );
    }

    let emit = |tree: &steiner_core::graph::SteinerTree| {
        let text = write_solution(instance.network(), tree, &parsed.labels);
        if args.print_tree {
            print!("{text}");
        } else {
            println!("{}", text.lines().next().unwrap_or_default());
        }
    };
    match solve(instance, &config) {
        Ok(solution) => {
            emit(&solution.tree);
            if args.stats {
                match serde_json::to_string(&solution.stats) {
                    Ok(line) => eprintln!("{line}"),
                    Err(e) => eprintln!("error: stats: {e}"),
                }
            }
            if args.validate {
                match validate_tree(instance, &solution.tree) {
                    Ok(c) if c == solution.cost => eprintln!("valid: cost {c}"),
                    Ok(c) => {
                        eprintln!("error: reported cost {} but tree costs {c}", solution.cost);
                        return EXIT_INTERNAL;
                    }
                    Err(e) => {
                        eprintln!("error: invalid tree: {e}");
                        return EXIT_INTERNAL;
                    }
                }
            }
            EXIT_OK
        }
        Err(SolveError::Timeout { incumbent }) => {
            eprintln!("TIMEOUT");
            if let Some(tree) = incumbent {
                emit(&tree);
            }
            EXIT_TIMEOUT
        }
        Err(e @ SolveError::TooManyTerminals { .. }) => {
            eprintln!("error: {e}");
            EXIT_UNSUPPORTED
        }
        Err(e @ SolveError::RootNotTerminal(_)) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INTERNAL
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Some(Command::Bench {
            dir,
            budget,
            heuristic,
            no_preprocess,
        }) => bench::run(&dir, budget, heuristic.into(), !no_preprocess),
        None => run_solve(cli.solve),
    };
    ExitCode::from(code)
}
