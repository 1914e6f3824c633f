use super::{Diagnostic, DiagnosticKind, Pos};

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    /// A numeric literal; `int` is set for plain digit strings that fit.
    Number { value: f64, int: Option<u64> },
    LParen,
    RParen,
    Semi,
    Star,
    Slash,
    Plus,
    Minus,
    At,
    Eq,
    /// The `+h.c.` directive.
    HermConj,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number { .. } => "number".into(),
            Tok::Eof => "end of input".into(),
            other => format!("`{}`", other.symbol()),
        }
    }

    pub fn symbol(&self) -> &'static str {
        match self {
            Tok::Ident(_) => "identifier",
            Tok::Number { .. } => "number",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Semi => ";",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::At => "@",
            Tok::Eq => "=",
            Tok::HermConj => "+h.c.",
            Tok::Eof => "end of input",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

pub fn tokenize(text: &str) -> Result<Vec<Token>, Diagnostic> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let (mut line, mut col) = (1usize, 1usize);
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let pos = Pos { line, column: col };
        if c == b'\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c == b' ' || c == b'\t' || c == b'\r' {
            i += 1;
            col += 1;
            continue;
        }
        if c == b'#' {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        let tok = match c {
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b';' => Tok::Semi,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'-' => Tok::Minus,
            b'@' => Tok::At,
            b'=' => Tok::Eq,
            b'+' if bytes[i..].starts_with(b"+h.c.") => {
                i += 4;
                Tok::HermConj
            }
            b'+' => Tok::Plus,
            b'A'..=b'Z' | b'a'..=b'z' | b'_' => {
                while i + 1 < bytes.len() && (bytes[i + 1].is_ascii_alphanumeric() || bytes[i + 1] == b'_') {
                    i += 1;
                }
                Tok::Ident(text[start..=i].to_string())
            }
            b'0'..=b'9' | b'.' => {
                i = scan_number(bytes, i);
                let s = &text[start..i];
                i -= 1;
                number_token(s, pos)?
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('\u{fffd}');
                return Err(Diagnostic::new(
                    DiagnosticKind::Lexical,
                    pos,
                    format!("unexpected character {ch:?}"),
                    Vec::new(),
                ));
            }
        };
        i += 1;
        col += i - start;
        out.push(Token { tok, pos });
    }
    out.push(Token {
        tok: Tok::Eof,
        pos: Pos { line, column: col },
    });
    Ok(out)
}

// Returns the index one past the literal: digits [. digits] [e [+-] digits].
fn scan_number(b: &[u8], mut i: usize) -> usize {
    let digits = |i: &mut usize| {
        while *i < b.len() && b[*i].is_ascii_digit() {
            *i += 1;
        }
    };
    digits(&mut i);
    if i < b.len() && b[i] == b'.' {
        i += 1;
        digits(&mut i);
    }
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        let mut j = i + 1;
        if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
            j += 1;
        }
        if j < b.len() && b[j].is_ascii_digit() {
            i = j;
            digits(&mut i);
        }
    }
    i
}

fn number_token(s: &str, pos: Pos) -> Result<Tok, Diagnostic> {
    let bad = |msg: String| Diagnostic::new(DiagnosticKind::Lexical, pos, msg, Vec::new());
    if !s.as_bytes()[0].is_ascii_digit() {
        return Err(bad(format!("malformed number `{s}`")));
    }
    let value: f64 = s.parse().map_err(|_| bad(format!("malformed number `{s}`")))?;
    if !value.is_finite() {
        return Err(bad(format!("number `{s}` is out of range")));
    }
    let int = if s.bytes().all(|b| b.is_ascii_digit()) {
        s.parse::<u64>().ok()
    } else {
        None
    };
    Ok(Tok::Number { value, int })
}
