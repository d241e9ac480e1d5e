//! Concrete s-expression syntax for both languages.
//!
//! See `docs/grammar.md` for the grammar. [`Printer`] output is canonical and
//! parses back to the same tree.

mod lexer;
mod parser;
mod printer;

pub use lexer::{ParseError, Pos};
pub use parser::{
    is_identifier, parse_cg_expr, parse_cg_type, parse_fg_expr, parse_fg_type, parse_label, parse_lattice,
    parse_source, parse_source_with, Parser, Program, SourceFile,
};
pub use printer::{Printer, WIDTH};
