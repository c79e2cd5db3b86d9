//! OpLang: a small imperative language for crossover operators.
//!
//! Source text is parsed into a surface tree, checked statically, and
//! resolved into a name-free normalized tree that both drives the
//! interpreter and yields a structural [`Fingerprint`]. Renaming variables,
//! reformatting or adding comments leaves the fingerprint unchanged.
//! See `GRAMMAR.md` for the language definition.

pub mod ast;
mod builtins;
mod interp;
mod lexer;
pub mod normalize;
mod parser;
mod program;

pub use builtins::Builtin;
pub use interp::{execute, ExecBudget, ExecError, Value};
pub use lexer::Pos;
pub use program::{similarity, CompileError, Fingerprint, OperatorProgram, ProgramOperator};

/// Selective route exchange written in OpLang.
pub const SREX_SOURCE: &str = include_str!("../operators/srex.opl");

/// Returns parent A unchanged.
pub const IDENTITY_SOURCE: &str = include_str!("../operators/identity.opl");

pub fn compile(source: &str) -> Result<OperatorProgram, CompileError> {
    OperatorProgram::compile(source)
}
