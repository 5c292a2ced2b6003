use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use steiner_core::solver::{solve, HeuristicChoice, SolveConfig, SolveError};

use crate::{limit, read_instance, EXIT_INPUT, EXIT_OK};

#[derive(Debug, Serialize)]
struct Row {
    file: String,
    status: &'static str,
    cost: Option<u64>,
    wall_ms: u64,
    expansions: Option<u64>,
    heuristic: &'static str,
}

fn instances(dir: &Path) -> io::Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| {
            p.is_file()
                && p.extension()
                    .and_then(|e| e.to_str())
                    .is_some_and(|e| e.eq_ignore_ascii_case("stp") || e.eq_ignore_ascii_case("gr"))
        })
        .collect();
    files.sort();
    Ok(files)
}

fn row(path: &Path, config: &SolveConfig) -> Row {
    let file = path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
    let started = Instant::now();
    let mut row = Row {
        file,
        status: "error",
        cost: None,
        wall_ms: 0,
        expansions: None,
        heuristic: "",
    };
    match read_instance(path, None) {
        Err(_) => row.status = "parse_error",
        Ok(parsed) => match solve(&parsed.instance, config) {
            Ok(s) => {
                row.status = "solved";
                row.cost = Some(s.cost);
                row.expansions = Some(s.stats.search.expansions);
                row.heuristic = s.stats.heuristic;
            }
            Err(SolveError::Timeout { incumbent }) => {
                row.status = "timeout";
                row.cost = incumbent.map(|t| t.cost());
            }
            Err(SolveError::TooManyTerminals { .. }) => row.status = "unsupported",
            Err(_) => row.status = "error",
        },
    }
    row.wall_ms = started.elapsed().as_millis() as u64;
    row
}

pub(crate) fn run(dir: &Path, budget: f64, heuristic: HeuristicChoice, preprocess: bool) -> u8 {
    let files = match instances(dir) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {}: {e}", dir.display());
            return EXIT_INPUT;
        }
    };
    let time_limit = match limit(Some(budget)) {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    let config = SolveConfig {
        preprocess,
        heuristic,
        time_limit,
        ..Default::default()
    };
    let mut out = csv::Writer::from_writer(io::stdout().lock());
    for path in files {
        if let Err(e) = out.serialize(row(&path, &config)) {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    }
    if let Err(e) = out.flush() {
        eprintln!("error: {e}");
        return EXIT_INPUT;
    }
    EXIT_OK
}
