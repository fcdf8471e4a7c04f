//! Library surface of the `profdyn` command-line tool: the spec DSL parser,
//! report types, and command runners. The binary in `main.rs` is a thin
//! argument-parsing shell over [`run`].

pub mod parser;
pub mod report;
pub mod run;
