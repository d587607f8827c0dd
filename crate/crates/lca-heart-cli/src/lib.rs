//! Command language, executor and session store for `lcah`.

pub mod exec;
pub mod parse;
pub mod session;

pub use exec::{run_script, CliError, Executor, Options, Output};
pub use parse::{parse_command, parse_group, parse_morphism, parse_scalar, Command, Env, ParseError, Symbols};
pub use session::{LoadError, Session, Value};
