/// Parsed `.hspec` file in canonical form: modes, qubits and parameters in
/// declaration order (which fixes the tensor layout and binding order), terms
/// sorted by their rendered operator product.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct HamiltonianSpec {
    pub modes: Vec<ModeDecl>,
    pub qubits: Vec<String>,
    pub params: Vec<ParamDecl>,
    pub terms: Vec<TermDecl>,
}

impl HamiltonianSpec {
    pub fn mode_names(&self) -> Vec<String> {
        self.modes.iter().map(|m| m.name.clone()).collect()
    }

    pub fn qubit_names(&self) -> Vec<String> {
        self.qubits.clone()
    }

    pub fn qubit_index(&self, name: &str) -> Option<usize> {
        self.qubits.iter().position(|q| q == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeDecl {
    pub name: String,
    pub cutoff: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParamDecl {
    pub name: String,
    pub value: Expr,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TermDecl {
    pub coefficient: Expr,
    pub factors: Vec<OpFactor>,
    /// `None` when the `@` clause is omitted (frequency 0).
    pub frequency: Option<Expr>,
    pub hermitian_conjugate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum OpKind {
    A,
    Adag,
    Sp,
    Sm,
    Sz,
}

impl OpKind {
    pub fn keyword(self) -> &'static str {
        match self {
            OpKind::A => "a",
            OpKind::Adag => "adag",
            OpKind::Sp => "sp",
            OpKind::Sm => "sm",
            OpKind::Sz => "sz",
        }
    }

    pub fn from_keyword(s: &str) -> Option<OpKind> {
        Some(match s {
            "a" => OpKind::A,
            "adag" => OpKind::Adag,
            "sp" => OpKind::Sp,
            "sm" => OpKind::Sm,
            "sz" => OpKind::Sz,
            _ => return None,
        })
    }

    pub fn acts_on_mode(self) -> bool {
        matches!(self, OpKind::A | OpKind::Adag)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpFactor {
    pub kind: OpKind,
    pub target: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }

    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number(f64),
    /// The imaginary unit `i`.
    Imag,
    Pi,
    Ident(String),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(op, ..) => op.precedence(),
            Expr::Neg(_) => 3,
            _ => 4,
        }
    }

    pub fn is_atom(&self) -> bool {
        self.precedence() == 4
    }

    pub fn binary(op: BinOp, l: Expr, r: Expr) -> Expr {
        Expr::Binary(op, Box::new(l), Box::new(r))
    }
}
