//! `.hspec`: a small text format for oscillating Hamiltonians.
//!
//! ```text
//! mode a(6);
//! qubit q;
//! param g = 2.5e3;
//! term (i*g) * adag(a)*sm(q) @ 1.0e4 +h.c.;
//! ```
//!
//! A term is `coefficient * operator-product @ frequency` and contributes
//! `coefficient * O * exp(i frequency t)`. An omitted `@` clause means
//! frequency 0; `+h.c.` adds the Hermitian conjugate.

use std::fmt;
use std::path::Path;

mod ast;
mod lexer;
mod lower;
mod parser;
mod serialize;

pub use ast::{BinOp, Expr, HamiltonianSpec, ModeDecl, OpFactor, OpKind, ParamDecl, TermDecl};
pub use lower::{eval_params, lower};
pub use parser::parse;
pub use serialize::{complex_expr, expr_to_string, format_number, render_term_list, serialize, term_to_string};

/// 1-based source position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagnosticKind {
    Lexical,
    Syntax,
    UnboundIdentifier,
    DuplicateDeclaration,
}

impl fmt::Display for DiagnosticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DiagnosticKind::Lexical => "lexical error",
            DiagnosticKind::Syntax => "syntax error",
            DiagnosticKind::UnboundIdentifier => "unbound identifier",
            DiagnosticKind::DuplicateDeclaration => "duplicate declaration",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub line: usize,
    pub column: usize,
    pub message: String,
    /// Tokens that would have been accepted, sorted.
    pub expected: Vec<String>,
}

impl Diagnostic {
    pub fn new(kind: DiagnosticKind, pos: Pos, message: String, expected: Vec<String>) -> Self {
        Self {
            kind,
            line: pos.line,
            column: pos.column,
            message,
            expected,
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}: {}", self.line, self.column, self.kind, self.message)?;
        if !self.expected.is_empty() {
            let list: Vec<String> = self.expected.iter().map(|e| format!("`{e}`")).collect();
            write!(f, "; expected {}", list.join(", "))?;
        }
        Ok(())
    }
}

impl std::error::Error for Diagnostic {}

/// Parses raw bytes, reporting invalid UTF-8 as a lexical error.
pub fn parse_bytes(bytes: &[u8]) -> Result<HamiltonianSpec, Diagnostic> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse(text),
        Err(e) => {
            let valid = &bytes[..e.valid_up_to()];
            let line = 1 + valid.iter().filter(|&&b| b == b'\n').count();
            let last_line = valid.rsplit(|&b| b == b'\n').next().unwrap_or(valid);
            // valid prefix is UTF-8, so counting chars is safe
            let column = 1 + String::from_utf8_lossy(last_line).chars().count();
            Err(Diagnostic::new(
                DiagnosticKind::Lexical,
                Pos { line, column },
                "input is not valid UTF-8".into(),
                Vec::new(),
            ))
        }
    }
}

pub fn parse_file(path: &Path) -> crate::error::Result<HamiltonianSpec> {
    let bytes = std::fs::read(path).map_err(|e| crate::error::Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    Ok(parse_bytes(&bytes)?)
}
