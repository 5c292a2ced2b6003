use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::bounds::{select_root, upper_bound_pipeline, DualAscentHeuristic, OneTreeHeuristic, SteinerHeuristic, ZeroHeuristic};
use crate::graph::{validate_tree, Cost, Instance, SteinerTree, VertexId};
use crate::reductions::{run_pipeline, unreduce, OpStats, PreprocessResult, Reducer, ReductionConfig};

use super::{ds_star, SearchConfig, SearchStats, SolveError, TerminalOrder};

/// Above this many edges the automatic choice falls back to the 1-tree bound.
pub const DA_EDGE_LIMIT: usize = 10_000;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum HeuristicChoice {
    #[default]
    Auto,
    DualAscent,
    OneTree,
    Zero,
}

impl HeuristicChoice {
    pub fn resolve(self, edges: usize) -> HeuristicChoice {
        match self {
            HeuristicChoice::Auto if edges <= DA_EDGE_LIMIT => HeuristicChoice::DualAscent,
            HeuristicChoice::Auto => HeuristicChoice::OneTree,
            other => other,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            HeuristicChoice::Auto => "auto",
            HeuristicChoice::DualAscent => "da",
            HeuristicChoice::OneTree => "onetree",
            HeuristicChoice::Zero => "zero",
        }
    }
}

impl fmt::Display for HeuristicChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for HeuristicChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "auto" => Ok(HeuristicChoice::Auto),
            "da" => Ok(HeuristicChoice::DualAscent),
            "onetree" => Ok(HeuristicChoice::OneTree),
            "zero" => Ok(HeuristicChoice::Zero),
            other => Err(format!("unknown heuristic {other:?}")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveConfig {
    pub preprocess: bool,
    pub pruning: bool,
    pub heuristic: HeuristicChoice,
    pub time_limit: Option<Duration>,
    /// Terminal to root the returned tree at.
    pub root: Option<VertexId>,
    pub reductions: ReductionConfig,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            preprocess: true,
            pruning: true,
            heuristic: HeuristicChoice::Auto,
            time_limit: None,
            root: None,
            reductions: ReductionConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct SolveStats {
    pub heuristic: &'static str,
    pub original_vertices: usize,
    pub original_edges: usize,
    pub original_terminals: usize,
    pub reduced_vertices: usize,
    pub reduced_edges: usize,
    pub reduced_terminals: usize,
    pub offset: Cost,
    pub preprocess_ms: u64,
    #[serde(flatten)]
    pub search: SearchStats,
    pub total_ms: u64,
    pub reductions: Vec<OpStats>,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub tree: SteinerTree,
    pub cost: Cost,
    pub stats: SolveStats,
}

fn identity(instance: &Instance) -> PreprocessResult {
    Reducer::new(instance).finish()
}

/// Preprocesses, searches and maps the optimum back to `instance`.
pub fn solve(instance: &Instance, config: &SolveConfig) -> Result<Solution, SolveError> {
    let started = Instant::now();
    let deadline = config.time_limit.map(|d| started + d);
    let root = match config.root {
        Some(r) if r >= instance.network().vertex_count() || !instance.is_terminal(r) => {
            return Err(SolveError::RootNotTerminal(r))
        }
        Some(r) => r,
        None => instance.root_or_default(),
    };
    let network = instance.network();
    let mut stats = SolveStats {
        original_vertices: network.vertex_count(),
        original_edges: network.edge_count(),
        original_terminals: instance.terminals().len(),
        ..Default::default()
    };

    let pre = if config.preprocess {
        run_pipeline(instance, &config.reductions)
    } else {
        identity(instance)
    };
    stats.preprocess_ms = started.elapsed().as_millis() as u64;
    let reduced = &pre.reduced;
    stats.reduced_vertices = reduced.network().vertex_count();
    stats.reduced_edges = reduced.network().edge_count();
    stats.reduced_terminals = reduced.terminals().len();
    stats.offset = pre.offset;
    stats.reductions = pre.stats.clone();

    let finish = |tree: SteinerTree| -> Result<SteinerTree, SolveError> {
        let back = unreduce(instance, &pre, &tree).map_err(|e| SolveError::Internal(e.to_string()))?;
        let back = SteinerTree::new(network, back.edges().to_vec(), root);
        validate_tree(instance, &back).map_err(|e| SolveError::Internal(e.to_string()))?;
        Ok(back)
    };
    let timeout = || {
        let rr = select_root(reduced);
        let incumbent = upper_bound_pipeline(reduced, rr).ok().and_then(|t| finish(t).ok());
        SolveError::Timeout {
            incumbent: incumbent.map(Box::new),
        }
    };
    if deadline.is_some_and(|d| Instant::now() >= d) {
        return Err(timeout());
    }

    let reduced_tree = if reduced.terminals().len() <= 1 {
        SteinerTree::new(reduced.network(), Vec::new(), reduced.terminals()[0])
    } else {
        let search_root = select_root(reduced);
        let order = TerminalOrder::new(reduced, search_root)?;
        let choice = config.heuristic.resolve(reduced.network().edge_count());
        stats.heuristic = choice.name();
        let mut heuristic: Box<dyn SteinerHeuristic + '_> = match choice {
            HeuristicChoice::OneTree => Box::new(OneTreeHeuristic::new(reduced, order)),
            HeuristicChoice::Zero => Box::new(ZeroHeuristic),
            _ => Box::new(DualAscentHeuristic::new(reduced, order)),
        };
        let search = SearchConfig {
            pruning: config.pruning,
            deadline,
        };
        match ds_star(reduced, search_root, heuristic.as_mut(), &search) {
            Ok(outcome) => {
                stats.search = outcome.stats;
                outcome.tree
            }
            Err(SolveError::Timeout { .. }) => return Err(timeout()),
            Err(e) => return Err(e),
        }
    };
    if stats.heuristic.is_empty() {
        stats.heuristic = "none";
    }
    let tree = finish(reduced_tree)?;
    stats.total_ms = started.elapsed().as_millis() as u64;
    Ok(Solution {
        cost: tree.cost(),
        tree,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::solver::dreyfus_wagner;

    #[test]
    fn fixtures() {
        for (inst, cost) in [(path(), 5), (star(), 9), (diamond(), 2), (k4(), 27), (ntdk(), 8)] {
            let s = solve(&inst, &SolveConfig::default()).unwrap();
            assert_eq!(s.cost, cost);
            assert_eq!(validate_tree(&inst, &s.tree), Ok(cost));
        }
    }

    #[test]
    fn diamond_needs_no_search() {
        let s = solve(&diamond(), &SolveConfig::default()).unwrap();
        assert_eq!(s.stats.reduced_terminals, 1);
        assert_eq!(s.stats.search.expansions, 0);
        assert_eq!(s.stats.heuristic, "none");
    }

    #[test]
    fn without_preprocessing() {
        let config = SolveConfig {
            preprocess: false,
            heuristic: HeuristicChoice::Zero,
            ..Default::default()
        };
        let s = solve(&k4(), &config).unwrap();
        assert_eq!(s.cost, 27);
        assert_eq!(s.tree.edges().len(), 3);
        assert_eq!(s.stats.heuristic, "zero");
    }

    #[test]
    fn root_override() {
        let config = SolveConfig {
            root: Some(2),
            ..Default::default()
        };
        assert_eq!(solve(&k4(), &config).unwrap().tree.root(), 2);
        let config = SolveConfig {
            root: Some(0),
            ..Default::default()
        };
        assert_eq!(solve(&star(), &config).unwrap_err(), SolveError::RootNotTerminal(0));
    }

    #[test]
    fn zero_budget_times_out_with_incumbent() {
        let config = SolveConfig {
            time_limit: Some(Duration::ZERO),
            ..Default::default()
        };
        match solve(&k4(), &config) {
            Err(SolveError::Timeout { incumbent: Some(t) }) => assert_eq!(validate_tree(&k4(), &t), Ok(27)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn random_instances_match_oracle() {
        for seed in 0..100 {
            let inst = random_instance(5000 + seed, 14, 6);
            let (opt, _) = dreyfus_wagner(&inst, inst.terminals()[0]).unwrap();
            for heuristic in [HeuristicChoice::Auto, HeuristicChoice::OneTree, HeuristicChoice::Zero] {
                let config = SolveConfig {
                    heuristic,
                    ..Default::default()
                };
                let s = solve(&inst, &config).unwrap();
                assert_eq!(s.cost, opt, "seed {seed} {heuristic}");
            }
        }
    }

    #[test]
    fn heuristic_names_parse() {
        for h in [HeuristicChoice::Auto, HeuristicChoice::DualAscent, HeuristicChoice::OneTree, HeuristicChoice::Zero] {
            assert_eq!(h.name().parse::<HeuristicChoice>(), Ok(h));
        }
        assert!("astar".parse::<HeuristicChoice>().is_err());
        assert_eq!(HeuristicChoice::Auto.resolve(DA_EDGE_LIMIT + 1), HeuristicChoice::OneTree);
    }
}
