use std::collections::HashMap;

use super::ast::{BinOp, Expr, HamiltonianSpec, ModeDecl, OpFactor, OpKind, ParamDecl, TermDecl};
use super::lexer::{tokenize, Tok, Token};
use super::serialize::term_sort_key;
use super::{Diagnostic, DiagnosticKind, Pos};

const MAX_DEPTH: usize = 200;
const RESERVED: &[&str] = &["mode", "qubit", "param", "term", "i", "pi"];

// Identifier occurrence kept for the binding pass.
#[derive(Debug, Clone)]
struct Use {
    name: String,
    pos: Pos,
}

#[derive(Debug)]
enum Stmt {
    Mode(String, Pos, usize),
    Qubit(String, Pos),
    Param(String, Pos, Expr, Vec<Use>),
    Term(TermDecl, Vec<Use>, Vec<(OpFactor, Pos)>),
}

struct Parser {
    toks: Vec<Token>,
    at: usize,
    expected: Vec<&'static str>,
    depth: usize,
    uses: Vec<Use>,
}

type PResult<T> = Result<T, Diagnostic>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.at + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].pos
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        self.expected.clear();
        t
    }

    fn check(&mut self, tok: &Tok, label: &'static str) -> bool {
        self.expected.push(label);
        std::mem::discriminant(self.peek()) == std::mem::discriminant(tok)
    }

    fn eat(&mut self, tok: Tok, label: &'static str) -> bool {
        if self.check(&tok, label) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok, label: &'static str) -> PResult<Token> {
        if self.check(&tok, label) {
            Ok(self.bump())
        } else {
            Err(self.unexpected())
        }
    }

    fn keyword(&mut self, word: &'static str) -> bool {
        self.expected.push(word);
        matches!(self.peek(), Tok::Ident(s) if s == word)
    }

    fn unexpected(&self) -> Diagnostic {
        let tok = &self.toks[self.at];
        // at end of input, point at the last real token
        let (pos, found) = match tok.tok {
            Tok::Eof if self.at > 0 => (self.toks[self.at - 1].pos, "unexpected end of input".to_string()),
            _ => (tok.pos, format!("unexpected {}", tok.tok.describe())),
        };
        let mut expected: Vec<String> = self.expected.iter().map(|s| s.to_string()).collect();
        expected.sort();
        expected.dedup();
        Diagnostic::new(DiagnosticKind::Syntax, pos, found, expected)
    }

    fn ident(&mut self) -> PResult<(String, Pos)> {
        self.expected.push("identifier");
        match self.peek().clone() {
            Tok::Ident(s) => {
                let pos = self.pos();
                self.bump();
                Ok((s, pos))
            }
            _ => Err(self.unexpected()),
        }
    }

    fn declared_name(&mut self) -> PResult<(String, Pos)> {
        let (name, pos) = self.ident()?;
        if RESERVED.contains(&name.as_str()) {
            return Err(Diagnostic::new(
                DiagnosticKind::Syntax,
                pos,
                format!("`{name}` is reserved and cannot be declared"),
                Vec::new(),
            ));
        }
        Ok((name, pos))
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        if self.keyword("mode") {
            self.bump();
            let (name, pos) = self.declared_name()?;
            self.expect(Tok::LParen, "(")?;
            self.expected.push("integer");
            let cutoff = match self.peek() {
                Tok::Number { int: Some(n), .. } => *n,
                _ => return Err(self.unexpected()),
            };
            let cpos = self.pos();
            self.bump();
            let cutoff = usize::try_from(cutoff).map_err(|_| {
                Diagnostic::new(DiagnosticKind::Syntax, cpos, "cutoff is too large".into(), Vec::new())
            })?;
            self.expect(Tok::RParen, ")")?;
            self.expect(Tok::Semi, ";")?;
            return Ok(Stmt::Mode(name, pos, cutoff));
        }
        if self.keyword("qubit") {
            self.bump();
            let (name, pos) = self.declared_name()?;
            self.expect(Tok::Semi, ";")?;
            return Ok(Stmt::Qubit(name, pos));
        }
        if self.keyword("param") {
            self.bump();
            let (name, pos) = self.declared_name()?;
            self.expect(Tok::Eq, "=")?;
            self.uses.clear();
            let value = self.expr()?;
            let uses = std::mem::take(&mut self.uses);
            self.expect(Tok::Semi, ";")?;
            return Ok(Stmt::Param(name, pos, value, uses));
        }
        if self.keyword("term") {
            self.bump();
            self.uses.clear();
            let coefficient = self.expr()?;
            self.expect(Tok::Star, "*")?;
            let mut factors = vec![self.factor()?];
            while self.eat(Tok::Star, "*") {
                factors.push(self.factor()?);
            }
            let frequency = if self.eat(Tok::At, "@") {
                Some(self.expr()?)
            } else {
                None
            };
            let hermitian_conjugate = self.eat(Tok::HermConj, "+h.c.");
            self.expect(Tok::Semi, ";")?;
            let uses = std::mem::take(&mut self.uses);
            let (plain, spans): (Vec<_>, Vec<_>) = factors.into_iter().unzip();
            let spans = plain.iter().cloned().zip(spans).collect();
            let term = TermDecl {
                coefficient,
                factors: plain,
                frequency,
                hermitian_conjugate,
            };
            return Ok(Stmt::Term(term, uses, spans));
        }
        Err(self.unexpected())
    }

    fn factor(&mut self) -> PResult<(OpFactor, Pos)> {
        for k in ["a", "adag", "sp", "sm", "sz"] {
            self.expected.push(k);
        }
        let kind = match self.peek() {
            Tok::Ident(s) => OpKind::from_keyword(s),
            _ => None,
        };
        let Some(kind) = kind else {
            return Err(self.unexpected());
        };
        self.bump();
        self.expect(Tok::LParen, "(")?;
        let (target, pos) = self.ident()?;
        self.expect(Tok::RParen, ")")?;
        Ok((OpFactor { kind, target }, pos))
    }

    fn nested<T>(&mut self, f: impl FnOnce(&mut Self) -> PResult<T>) -> PResult<T> {
        if self.depth >= MAX_DEPTH {
            return Err(Diagnostic::new(
                DiagnosticKind::Syntax,
                self.pos(),
                format!("expression nested deeper than {MAX_DEPTH} levels"),
                Vec::new(),
            ));
        }
        self.depth += 1;
        let r = f(self);
        self.depth -= 1;
        r
    }

    fn expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.product()?;
        loop {
            let op = if self.eat(Tok::Plus, "+") {
                BinOp::Add
            } else if self.eat(Tok::Minus, "-") {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            let rhs = self.product()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    // `*` followed by an operator keyword and `(` ends the coefficient.
    fn starts_factor(&self) -> bool {
        matches!(self.peek_at(1), Tok::Ident(s) if OpKind::from_keyword(s).is_some())
            && matches!(self.peek_at(2), Tok::LParen)
    }

    fn product(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.check(&Tok::Star, "*") && !self.starts_factor() {
                self.bump();
                BinOp::Mul
            } else if self.eat(Tok::Slash, "/") {
                BinOp::Div
            } else {
                return Ok(lhs);
            };
            let rhs = self.unary()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        if self.eat(Tok::Minus, "-") {
            return self.nested(|p| Ok(Expr::Neg(Box::new(p.unary()?))));
        }
        if self.eat(Tok::Plus, "+") {
            return self.nested(|p| p.unary());
        }
        self.primary()
    }

    fn primary(&mut self) -> PResult<Expr> {
        self.expected.extend(["number", "identifier", "("]);
        match self.peek().clone() {
            Tok::Number { value, .. } => {
                self.bump();
                Ok(Expr::Number(value))
            }
            Tok::Ident(s) => {
                let pos = self.pos();
                self.bump();
                Ok(match s.as_str() {
                    "i" => Expr::Imag,
                    "pi" => Expr::Pi,
                    _ => {
                        self.uses.push(Use { name: s.clone(), pos });
                        Expr::Ident(s)
                    }
                })
            }
            Tok::LParen => {
                self.bump();
                let e = self.nested(|p| p.expr())?;
                self.expect(Tok::RParen, ")")?;
                Ok(e)
            }
            _ => Err(self.unexpected()),
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Kind {
    Mode,
    Qubit,
    Param,
}

fn bind(stmts: Vec<Stmt>) -> Result<HamiltonianSpec, Diagnostic> {
    let mut names: HashMap<String, Kind> = HashMap::new();
    let mut spec = HamiltonianSpec::default();
    let declare = |names: &mut HashMap<String, Kind>, name: &str, pos: Pos, kind: Kind| {
        if names.insert(name.to_string(), kind).is_some() {
            Err(Diagnostic::new(
                DiagnosticKind::DuplicateDeclaration,
                pos,
                format!("`{name}` is already declared"),
                Vec::new(),
            ))
        } else {
            Ok(())
        }
    };
    let check_uses = |names: &HashMap<String, Kind>, uses: &[Use]| {
        for u in uses {
            if names.get(&u.name) != Some(&Kind::Param) {
                return Err(Diagnostic::new(
                    DiagnosticKind::UnboundIdentifier,
                    u.pos,
                    format!("`{}` is not a parameter declared before this point", u.name),
                    Vec::new(),
                ));
            }
        }
        Ok(())
    };
    for stmt in stmts {
        match stmt {
            Stmt::Mode(name, pos, cutoff) => {
                declare(&mut names, &name, pos, Kind::Mode)?;
                spec.modes.push(ModeDecl { name, cutoff });
            }
            Stmt::Qubit(name, pos) => {
                declare(&mut names, &name, pos, Kind::Qubit)?;
                spec.qubits.push(name);
            }
            Stmt::Param(name, pos, value, uses) => {
                check_uses(&names, &uses)?;
                declare(&mut names, &name, pos, Kind::Param)?;
                spec.params.push(ParamDecl { name, value });
            }
            Stmt::Term(term, uses, factors) => {
                check_uses(&names, &uses)?;
                for (f, pos) in factors {
                    let want = if f.kind.acts_on_mode() { Kind::Mode } else { Kind::Qubit };
                    if names.get(&f.target) != Some(&want) {
                        let what = if want == Kind::Mode { "mode" } else { "qubit" };
                        return Err(Diagnostic::new(
                            DiagnosticKind::UnboundIdentifier,
                            pos,
                            format!("`{}` is not a declared {what}", f.target),
                            Vec::new(),
                        ));
                    }
                }
                spec.terms.push(term);
            }
        }
    }
    spec.terms.sort_by_cached_key(term_sort_key);
    Ok(spec)
}

/// Parses `.hspec` text into its canonical AST.
pub fn parse(text: &str) -> Result<HamiltonianSpec, Diagnostic> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks,
        at: 0,
        expected: Vec::new(),
        depth: 0,
        uses: Vec::new(),
    };
    let mut stmts = Vec::new();
    while !matches!(p.peek(), Tok::Eof) {
        stmts.push(p.stmt()?);
    }
    bind(stmts)
}
