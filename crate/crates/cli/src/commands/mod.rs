pub mod flag;
pub mod flow;
pub mod lab;
pub mod polytope;
pub mod toric;
