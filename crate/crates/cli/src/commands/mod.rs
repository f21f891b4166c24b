pub mod eval;
pub mod gen;
pub mod sim;
pub mod stats;
