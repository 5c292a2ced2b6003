//! Exact algorithms: the subset dynamic program and the heuristic best-first search.

mod dsstar;
mod dw;
mod mask;
mod prune;
mod solve;

pub use dsstar::{deadline_after, ds_star, DsStar, Retrace, SearchConfig, SearchOutcome, SearchStats};
pub use dw::{combine_step, dreyfus_wagner, DwTable, DW_TERMINAL_CAP};
pub use mask::{TerminalMask, TerminalOrder};
pub use prune::PruneState;
pub use solve::{solve, HeuristicChoice, Solution, SolveConfig, SolveStats, DA_EDGE_LIMIT};

use thiserror::Error;

use crate::graph::{GraphError, SteinerTree, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("{count} non-root terminals exceed the supported {cap}")]
    TooManyTerminals { count: usize, cap: usize },
    #[error("root {0} is not a terminal")]
    RootNotTerminal(VertexId),
    #[error("time limit reached")]
    Timeout { incumbent: Option<Box<SteinerTree>> },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("internal error: {0}")]
    Internal(String),
}
