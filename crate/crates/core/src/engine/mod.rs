//! Surface syntax, proof search and the command-line front end.

pub mod sexp;
pub mod cli;
pub mod prove;
pub mod syntax;
