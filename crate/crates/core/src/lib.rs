pub mod bounds;
pub mod graph;
pub mod io;
pub mod reductions;
pub mod solver;
