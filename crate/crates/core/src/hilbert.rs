//! Truncated Fock-space and two-level operator algebra.
//!
//! A [`SpaceDescriptor`] is an ordered list of bosonic modes (each truncated at
//! a Fock cutoff `n_max`) followed by a number of two-level systems. Basis
//! indices are little-endian: mode 0 is the least significant digit, then the
//! remaining modes in order, then qubit 0, qubit 1, ... For a qubit the digit
//! `0` is the ground state `|g>` and `1` is the excited state `|e>`, so
//! `sz = |e><e| - |g><g| = diag(-1, +1)`.
//!
//! All operators are dense. Spaces in this crate stay below a few thousand
//! dimensions.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpaceDescriptor {
    mode_cutoffs: Vec<usize>,
    qubit_count: usize,
    dim: usize,
}

impl SpaceDescriptor {
    pub const DEFAULT_DIMENSION_LIMIT: usize = 4096;

    pub fn new(mode_cutoffs: &[usize], qubit_count: usize) -> Result<Self> {
        Self::with_limit(mode_cutoffs, qubit_count, Self::DEFAULT_DIMENSION_LIMIT)
    }

    pub fn with_limit(mode_cutoffs: &[usize], qubit_count: usize, limit: usize) -> Result<Self> {
        let mut dim: usize = 1;
        for (mode, &cutoff) in mode_cutoffs.iter().enumerate() {
            if cutoff == 0 {
                return Err(Error::InvalidCutoff { mode, cutoff });
            }
            dim = dim
                .checked_mul(cutoff + 1)
                .filter(|&d| d <= limit)
                .ok_or(Error::DimensionLimit {
                    dim: dim.saturating_mul(cutoff + 1),
                    limit,
                })?;
        }
        for _ in 0..qubit_count {
            dim = dim
                .checked_mul(2)
                .filter(|&d| d <= limit)
                .ok_or(Error::DimensionLimit {
                    dim: dim.saturating_mul(2),
                    limit,
                })?;
        }
        Ok(Self {
            mode_cutoffs: mode_cutoffs.to_vec(),
            qubit_count,
            dim,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mode_count(&self) -> usize {
        self.mode_cutoffs.len()
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn mode_cutoffs(&self) -> &[usize] {
        &self.mode_cutoffs
    }

    pub fn cutoff(&self, mode: usize) -> Result<usize> {
        self.check_mode(mode)?;
        Ok(self.mode_cutoffs[mode])
    }

    pub fn check_mode(&self, mode: usize) -> Result<()> {
        if mode < self.mode_count() {
            Ok(())
        } else {
            Err(Error::InvalidIndex {
                kind: "mode",
                index: mode,
                count: self.mode_count(),
            })
        }
    }

    pub fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit < self.qubit_count {
            Ok(())
        } else {
            Err(Error::InvalidIndex {
                kind: "qubit",
                index: qubit,
                count: self.qubit_count,
            })
        }
    }

    /// Index stride of a subsystem's digit in the computational basis.
    /// Panics on an out-of-range subsystem.
    pub fn stride(&self, subsystem: Subsystem) -> usize {
        self.layout(subsystem).1
    }

    /// Local dimension and index stride of a subsystem.
    fn layout(&self, subsystem: Subsystem) -> (usize, usize) {
        let mut stride = 1;
        match subsystem {
            Subsystem::Mode(m) => {
                for &c in &self.mode_cutoffs[..m] {
                    stride *= c + 1;
                }
                (self.mode_cutoffs[m] + 1, stride)
            }
            Subsystem::Qubit(q) => {
                for &c in &self.mode_cutoffs {
                    stride *= c + 1;
                }
                (2, stride << q)
            }
        }
    }

    pub fn decode(&self, index: usize) -> BasisState {
        let mut rest = index;
        let modes = self
            .mode_cutoffs
            .iter()
            .map(|&c| {
                let d = rest % (c + 1);
                rest /= c + 1;
                d
            })
            .collect();
        let qubits = (0..self.qubit_count)
            .map(|_| {
                let d = (rest & 1) == 1;
                rest >>= 1;
                d
            })
            .collect();
        BasisState { modes, qubits }
    }

    pub fn encode(&self, state: &BasisState) -> Result<usize> {
        if state.modes.len() != self.mode_count() || state.qubits.len() != self.qubit_count {
            return Err(Error::ShapeMismatch {
                expected: self.to_string(),
                found: format!(
                    "basis state with {} modes and {} qubits",
                    state.modes.len(),
                    state.qubits.len()
                ),
            });
        }
        let mut index = 0;
        let mut stride = 1;
        for (&n, &c) in state.modes.iter().zip(&self.mode_cutoffs) {
            if n > c {
                return Err(Error::InvalidIndex {
                    kind: "Fock level",
                    index: n,
                    count: c + 1,
                });
            }
            index += n * stride;
            stride *= c + 1;
        }
        for &e in &state.qubits {
            if e {
                index += stride;
            }
            stride *= 2;
        }
        Ok(index)
    }

    /// Basis vector for the given occupations; `qubits[k]` is true for `|e>`.
    pub fn basis_vector(&self, modes: &[usize], qubits: &[bool]) -> Result<CVector> {
        let idx = self.encode(&BasisState {
            modes: modes.to_vec(),
            qubits: qubits.to_vec(),
        })?;
        let mut v = CVector::zeros(self.dim);
        v[idx] = ONE;
        Ok(v)
    }

    pub fn ensure_same(&self, other: &SpaceDescriptor) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::SpaceMismatch {
                left: self.to_string(),
                right: other.to_string(),
            })
        }
    }
}

impl fmt::Display for SpaceDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "modes {:?} + {} qubit(s) (dim {})",
            self.mode_cutoffs, self.qubit_count, self.dim
        )
    }
}

pub fn make_space(mode_cutoffs: &[usize], qubit_count: usize) -> Result<SpaceDescriptor> {
    SpaceDescriptor::new(mode_cutoffs, qubit_count)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Subsystem {
    Mode(usize),
    Qubit(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisState {
    pub modes: Vec<usize>,
    pub qubits: Vec<bool>,
}

impl BasisState {
    pub fn occupation(&self, modes: &[usize]) -> usize {
        modes.iter().map(|&m| self.modes[m]).sum()
    }

    pub fn excited_count(&self, qubits: &[usize]) -> usize {
        qubits.iter().filter(|&&q| self.qubits[q]).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    Z,
    Plus,
    Minus,
}

/// Two-level basis state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    Ground,
    Excited,
}

impl Level {
    pub fn is_excited(self) -> bool {
        matches!(self, Level::Excited)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    space: SpaceDescriptor,
    matrix: CMatrix,
}

impl Operator {
    pub fn new(space: SpaceDescriptor, matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != space.dim() || matrix.ncols() != space.dim() {
            return Err(Error::MatrixShape {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
                dim: space.dim(),
            });
        }
        Ok(Self { space, matrix })
    }

    pub fn identity(space: &SpaceDescriptor) -> Self {
        Self {
            matrix: CMatrix::identity(space.dim(), space.dim()),
            space: space.clone(),
        }
    }

    pub fn zeros(space: &SpaceDescriptor) -> Self {
        Self {
            matrix: CMatrix::zeros(space.dim(), space.dim()),
            space: space.clone(),
        }
    }

    /// Embeds a local operator on one subsystem, identity elsewhere.
    pub fn embed(space: &SpaceDescriptor, subsystem: Subsystem, local: &CMatrix) -> Result<Self> {
        match subsystem {
            Subsystem::Mode(m) => space.check_mode(m)?,
            Subsystem::Qubit(q) => space.check_qubit(q)?,
        }
        let (ld, stride) = space.layout(subsystem);
        if local.nrows() != ld || local.ncols() != ld {
            return Err(Error::MatrixShape {
                rows: local.nrows(),
                cols: local.ncols(),
                dim: ld,
            });
        }
        let dim = space.dim();
        let mut matrix = CMatrix::zeros(dim, dim);
        for col in 0..dim {
            let digit = (col / stride) % ld;
            let base = col - digit * stride;
            for row_digit in 0..ld {
                let v = local[(row_digit, digit)];
                if v != ZERO {
                    matrix[(base + row_digit * stride, col)] = v;
                }
            }
        }
        Ok(Self {
            space: space.clone(),
            matrix,
        })
    }

    pub fn space(&self) -> &SpaceDescriptor {
        &self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            space: self.space.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            space: self.space.clone(),
            matrix: &self.matrix * c,
        }
    }

    pub fn checked_add(&self, rhs: &Operator) -> Result<Operator> {
        self.space.ensure_same(&rhs.space)?;
        Ok(Self {
            space: self.space.clone(),
            matrix: &self.matrix + &rhs.matrix,
        })
    }

    pub fn checked_sub(&self, rhs: &Operator) -> Result<Operator> {
        self.space.ensure_same(&rhs.space)?;
        Ok(Self {
            space: self.space.clone(),
            matrix: &self.matrix - &rhs.matrix,
        })
    }

    pub fn checked_mul(&self, rhs: &Operator) -> Result<Operator> {
        self.space.ensure_same(&rhs.space)?;
        Ok(Self {
            space: self.space.clone(),
            matrix: &self.matrix * &rhs.matrix,
        })
    }

    /// `[self, rhs]`
    pub fn commutator(&self, rhs: &Operator) -> Result<Operator> {
        Ok(self.checked_mul(rhs)? - rhs.checked_mul(self)?)
    }

    /// `{self, rhs}`
    pub fn anticommutator(&self, rhs: &Operator) -> Result<Operator> {
        Ok(self.checked_mul(rhs)? + rhs.checked_mul(self)?)
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        &self.matrix * v
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        frobenius(&self.matrix)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        frobenius(&(&self.matrix - self.matrix.adjoint()))
    }

    /// `||U^dagger U - 1||_F`
    pub fn unitarity_defect(&self) -> f64 {
        unitarity_defect(&self.matrix)
    }

    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        max_abs_diff(&self.matrix, &other.matrix)
    }
}

macro_rules! checked_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&Operator> for &Operator {
            type Output = Operator;

            /// Panics if the operands live on different spaces; use the
            /// `checked_*` methods to get an error instead.
            fn $method(self, rhs: &Operator) -> Operator {
                self.$checked(rhs).expect("operator arithmetic")
            }
        }

        impl $trait<Operator> for Operator {
            type Output = Operator;

            fn $method(self, rhs: Operator) -> Operator {
                (&self).$checked(&rhs).expect("operator arithmetic")
            }
        }
    };
}

checked_binop!(Add, add, checked_add);
checked_binop!(Sub, sub, checked_sub);
checked_binop!(Mul, mul, checked_mul);

impl Mul<Complex64> for &Operator {
    type Output = Operator;
    fn mul(self, c: Complex64) -> Operator {
        self.scale(c)
    }
}

impl Mul<f64> for &Operator {
    type Output = Operator;
    fn mul(self, c: f64) -> Operator {
        self.scale(Complex64::new(c, 0.0))
    }
}

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        self.scale(-ONE)
    }
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn unitarity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    frobenius(&(m.adjoint() * m - CMatrix::identity(n, n)))
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Truncated single-mode annihilator on levels `0..=n_max`.
pub fn local_annihilator(n_max: usize) -> CMatrix {
    let d = n_max + 1;
    let mut a = CMatrix::zeros(d, d);
    for n in 1..d {
        a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    a
}

pub fn local_pauli(which: Pauli) -> CMatrix {
    // rows/cols: 0 = g, 1 = e
    let mut m = CMatrix::zeros(2, 2);
    match which {
        Pauli::Z => {
            m[(0, 0)] = -ONE;
            m[(1, 1)] = ONE;
        }
        Pauli::Plus => m[(1, 0)] = ONE,
        Pauli::Minus => m[(0, 1)] = ONE,
    }
    m
}

pub fn annihilator(space: &SpaceDescriptor, mode: usize) -> Result<Operator> {
    let cutoff = space.cutoff(mode)?;
    Operator::embed(space, Subsystem::Mode(mode), &local_annihilator(cutoff))
}

pub fn creator(space: &SpaceDescriptor, mode: usize) -> Result<Operator> {
    Ok(annihilator(space, mode)?.adjoint())
}

pub fn number(space: &SpaceDescriptor, mode: usize) -> Result<Operator> {
    let a = annihilator(space, mode)?;
    Ok(&a.adjoint() * &a)
}

pub fn pauli(space: &SpaceDescriptor, qubit: usize, which: Pauli) -> Result<Operator> {
    space.check_qubit(qubit)?;
    Operator::embed(space, Subsystem::Qubit(qubit), &local_pauli(which))
}

/// `|e><e|` on one qubit.
pub fn excited_projector(space: &SpaceDescriptor, qubit: usize) -> Result<Operator> {
    Ok(&pauli(space, qubit, Pauli::Plus)? * &pauli(space, qubit, Pauli::Minus)?)
}

fn distinct(kind: &'static str, i: usize, j: usize) -> Result<()> {
    if i == j {
        Err(Error::DuplicateIndex { kind, index: i })
    } else {
        Ok(())
    }
}

/// `Q = a^dagger a - b^dagger b` for a single particle/antiparticle mode pair.
pub fn charge_boson(space: &SpaceDescriptor, mode_a: usize, mode_b: usize) -> Result<Operator> {
    space.check_mode(mode_a)?;
    space.check_mode(mode_b)?;
    distinct("mode", mode_a, mode_b)?;
    Ok(number(space, mode_a)? - number(space, mode_b)?)
}

/// `Q = s1+ s1- - s2+ s2-` with the pseudo-spin stand-ins for `c` and `d`.
pub fn charge_fermion(space: &SpaceDescriptor, q1: usize, q2: usize) -> Result<Operator> {
    space.check_qubit(q1)?;
    space.check_qubit(q2)?;
    distinct("qubit", q1, q2)?;
    Ok(excited_projector(space, q1)? - excited_projector(space, q2)?)
}

/// Ordered set of computational-basis states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    space: SpaceDescriptor,
    indices: Vec<usize>,
}

impl Subspace {
    pub fn new(space: &SpaceDescriptor, indices: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; space.dim()];
        for &i in &indices {
            if i >= space.dim() {
                return Err(Error::InvalidIndex {
                    kind: "basis",
                    index: i,
                    count: space.dim(),
                });
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::DuplicateIndex {
                    kind: "basis",
                    index: i,
                });
            }
        }
        Ok(Self {
            space: space.clone(),
            indices,
        })
    }

    pub fn full(space: &SpaceDescriptor) -> Self {
        Self {
            space: space.clone(),
            indices: (0..space.dim()).collect(),
        }
    }

    pub fn from_predicate(space: &SpaceDescriptor, keep: impl Fn(&BasisState) -> bool) -> Self {
        let indices = (0..space.dim())
            .filter(|&i| keep(&space.decode(i)))
            .collect();
        Self {
            space: space.clone(),
            indices,
        }
    }

    pub fn space(&self) -> &SpaceDescriptor {
        &self.space
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn dim(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.contains(&index)
    }

    /// States in either subspace, preserving the order of `self` first.
    pub fn union(&self, other: &Subspace) -> Result<Subspace> {
        self.space.ensure_same(&other.space)?;
        let mut indices = self.indices.clone();
        for &i in &other.indices {
            if !indices.contains(&i) {
                indices.push(i);
            }
        }
        Ok(Subspace {
            space: self.space.clone(),
            indices,
        })
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.space.ensure_same(&other.space)?;
        let indices = self
            .indices
            .iter()
            .copied()
            .filter(|i| other.indices.contains(i))
            .collect();
        Ok(Subspace {
            space: self.space.clone(),
            indices,
        })
    }

    pub fn projector(&self) -> Operator {
        let mut p = Operator::zeros(&self.space);
        for &i in &self.indices {
            p.matrix[(i, i)] = ONE;
        }
        p
    }

    /// The block `P M P` as a `dim x dim` matrix in subspace order.
    pub fn restrict(&self, op: &Operator) -> Result<CMatrix> {
        self.space.ensure_same(op.space())?;
        Ok(self.restrict_matrix(op.matrix()))
    }

    pub fn restrict_matrix(&self, m: &CMatrix) -> CMatrix {
        let d = self.dim();
        CMatrix::from_fn(d, d, |r, c| m[(self.indices[r], self.indices[c])])
    }

    /// `||(1 - P) M P||_F`: weight that `op` moves out of the subspace.
    pub fn leakage(&self, op: &Operator) -> Result<f64> {
        self.space.ensure_same(op.space())?;
        let mut inside = vec![false; self.space.dim()];
        for &i in &self.indices {
            inside[i] = true;
        }
        let m = op.matrix();
        let mut acc = 0.0;
        for &c in &self.indices {
            for r in 0..self.space.dim() {
                if !inside[r] {
                    acc += m[(r, c)].norm_sqr();
                }
            }
        }
        Ok(acc.sqrt())
    }
}

/// States whose summed occupation over `modes` equals `n` (any qubit configuration).
pub fn total_n_subspace(space: &SpaceDescriptor, modes: &[usize], n: usize) -> Result<Subspace> {
    for &m in modes {
        space.check_mode(m)?;
    }
    Ok(Subspace::from_predicate(space, |s| s.occupation(modes) == n))
}

/// States with exactly `k` of the listed qubits excited (any mode occupation).
pub fn excitation_subspace(space: &SpaceDescriptor, qubits: &[usize], k: usize) -> Result<Subspace> {
    for &q in qubits {
        space.check_qubit(q)?;
    }
    Ok(Subspace::from_predicate(space, |s| s.excited_count(qubits) == k))
}
