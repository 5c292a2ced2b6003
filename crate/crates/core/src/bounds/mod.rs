//! Lower bounds that guide the search and upper bounds from heuristic trees.

mod dual_ascent;
mod heuristic;
mod upper;

pub use dual_ascent::{arc_index, dual_ascent, reduced_distances, DualAscentResult};
pub use heuristic::{ConstantHeuristic, DualAscentHeuristic, OneTreeHeuristic, SteinerHeuristic, ZeroHeuristic};
pub use upper::{local_search, rsph, select_root, upper_bound_pipeline};
