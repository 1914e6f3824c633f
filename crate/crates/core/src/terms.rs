//! Oscillating Hamiltonian terms.
//!
//! A [`TermList`] represents `H(t) = sum_k amplitude_k * O_k * exp(i nu_k t)`.
//! Terms built from ladder and Pauli factors carry a symbolic [`OpProduct`]
//! label next to their matrix, so that products can be simplified, merged and
//! printed back as `.hspec` text. Terms built from arbitrary matrices carry no
//! label.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{
    frobenius, local_annihilator, local_pauli, CMatrix, Operator, Pauli, SpaceDescriptor,
    Subsystem, ZERO,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ladder {
    Lower,
    Raise,
}

impl Ladder {
    fn adjoint(self) -> Self {
        match self {
            Ladder::Lower => Ladder::Raise,
            Ladder::Raise => Ladder::Lower,
        }
    }
}

/// Single-qubit operator in reduced form. Identity is represented by absence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QubitOp {
    Z,
    Plus,
    Minus,
    /// `|e><e| = sp*sm`
    Excited,
    /// `|g><g| = sm*sp`
    Ground,
}

// 2x2 integer matrices, index [row][col] with 0 = g, 1 = e.
type Mat2 = [[i64; 2]; 2];
const ID2: Mat2 = [[1, 0], [0, 1]];

impl QubitOp {
    fn mat(self) -> Mat2 {
        match self {
            QubitOp::Z => [[-1, 0], [0, 1]],
            QubitOp::Plus => [[0, 0], [1, 0]],
            QubitOp::Minus => [[0, 1], [0, 0]],
            QubitOp::Excited => [[0, 0], [0, 1]],
            QubitOp::Ground => [[1, 0], [0, 0]],
        }
    }

    fn from_pauli(p: Pauli) -> Self {
        match p {
            Pauli::Z => QubitOp::Z,
            Pauli::Plus => QubitOp::Plus,
            Pauli::Minus => QubitOp::Minus,
        }
    }

    fn adjoint(self) -> Self {
        match self {
            QubitOp::Plus => QubitOp::Minus,
            QubitOp::Minus => QubitOp::Plus,
            other => other,
        }
    }

    /// `<level|op|level>` for a diagonal element.
    pub fn diagonal(self, excited: bool) -> i64 {
        let i = usize::from(excited);
        self.mat()[i][i]
    }

    pub fn factors(self) -> Vec<Pauli> {
        match self {
            QubitOp::Z => vec![Pauli::Z],
            QubitOp::Plus => vec![Pauli::Plus],
            QubitOp::Minus => vec![Pauli::Minus],
            QubitOp::Excited => vec![Pauli::Plus, Pauli::Minus],
            QubitOp::Ground => vec![Pauli::Minus, Pauli::Plus],
        }
    }
}

fn mul2(x: &Mat2, y: &Mat2) -> Mat2 {
    let mut r = [[0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            r[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
        }
    }
    r
}

/// Classifies a product of `Z`, `Plus`, `Minus` as `scalar * op`; `None` op is
/// the identity, `None` overall is zero.
fn classify(m: &Mat2) -> Option<(i64, Option<QubitOp>)> {
    let [[gg, ge], [eg, ee]] = *m;
    match (gg, ge, eg, ee) {
        (0, 0, 0, 0) => None,
        (0, 0, s, 0) => Some((s, Some(QubitOp::Plus))),
        (0, s, 0, 0) => Some((s, Some(QubitOp::Minus))),
        (g, 0, 0, e) if g == e => Some((g, None)),
        (g, 0, 0, e) if g == -e => Some((e, Some(QubitOp::Z))),
        (0, 0, 0, e) => Some((e, Some(QubitOp::Excited))),
        (g, 0, 0, 0) => Some((g, Some(QubitOp::Ground))),
        _ => unreachable!("products of ladder Paulis are monomial"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Factor {
    Mode(usize, Ladder),
    Qubit(usize, Pauli),
}

/// Canonical operator product: factors on different subsystems commute, so
/// the product is stored as one ladder word per mode (in application order)
/// and one reduced operator per qubit.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OpProduct {
    modes: BTreeMap<usize, Vec<Ladder>>,
    qubits: BTreeMap<usize, QubitOp>,
}

impl OpProduct {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn is_identity(&self) -> bool {
        self.modes.is_empty() && self.qubits.is_empty()
    }

    /// Canonicalizes a written-out product. Returns the scalar picked up by
    /// qubit reductions (`0` if the product vanishes identically).
    pub fn from_factors(factors: &[Factor]) -> (f64, OpProduct) {
        let mut modes: BTreeMap<usize, Vec<Ladder>> = BTreeMap::new();
        let mut qubit_words: BTreeMap<usize, Mat2> = BTreeMap::new();
        for f in factors {
            match *f {
                Factor::Mode(m, l) => modes.entry(m).or_default().push(l),
                Factor::Qubit(q, p) => {
                    let w = qubit_words.entry(q).or_insert(ID2);
                    *w = mul2(w, &QubitOp::from_pauli(p).mat());
                }
            }
        }
        let mut scalar = 1.0;
        let mut qubits = BTreeMap::new();
        for (q, m) in qubit_words {
            match classify(&m) {
                None => return (0.0, OpProduct::identity()),
                Some((s, op)) => {
                    scalar *= s as f64;
                    if let Some(op) = op {
                        qubits.insert(q, op);
                    }
                }
            }
        }
        (scalar, OpProduct { modes, qubits })
    }

    pub fn single(factor: Factor) -> Self {
        Self::from_factors(&[factor]).1
    }

    /// `self * rhs`, returning the scalar from qubit reductions.
    pub fn multiply(&self, rhs: &OpProduct) -> (f64, OpProduct) {
        let mut modes = self.modes.clone();
        for (m, word) in &rhs.modes {
            modes.entry(*m).or_default().extend_from_slice(word);
        }
        let mut scalar = 1.0;
        let mut qubits = BTreeMap::new();
        let keys: std::collections::BTreeSet<usize> =
            self.qubits.keys().chain(rhs.qubits.keys()).copied().collect();
        for q in keys {
            let l = self.qubits.get(&q).map_or(ID2, |o| o.mat());
            let r = rhs.qubits.get(&q).map_or(ID2, |o| o.mat());
            match classify(&mul2(&l, &r)) {
                None => return (0.0, OpProduct::identity()),
                Some((s, op)) => {
                    scalar *= s as f64;
                    if let Some(op) = op {
                        qubits.insert(q, op);
                    }
                }
            }
        }
        (scalar, OpProduct { modes, qubits })
    }

    pub fn adjoint(&self) -> OpProduct {
        OpProduct {
            modes: self
                .modes
                .iter()
                .map(|(&m, w)| (m, w.iter().rev().map(|l| l.adjoint()).collect()))
                .collect(),
            qubits: self.qubits.iter().map(|(&q, o)| (q, o.adjoint())).collect(),
        }
    }

    pub fn is_self_adjoint(&self) -> bool {
        *self == self.adjoint()
    }

    pub fn mode_words(&self) -> &BTreeMap<usize, Vec<Ladder>> {
        &self.modes
    }

    pub fn qubit_ops(&self) -> &BTreeMap<usize, QubitOp> {
        &self.qubits
    }

    /// Replaces the factor on `qubit` by its expectation in a basis state.
    /// Returns the scalar, which is `0` when the factor is off-diagonal or
    /// vanishes on that state.
    pub fn project_qubit(&self, qubit: usize, excited: bool) -> (f64, OpProduct) {
        let mut out = self.clone();
        match out.qubits.remove(&qubit) {
            None => (1.0, out),
            Some(op) => (op.diagonal(excited) as f64, out),
        }
    }

    pub fn factors(&self) -> Vec<Factor> {
        let mut out = Vec::new();
        for (&m, word) in &self.modes {
            out.extend(word.iter().map(|&l| Factor::Mode(m, l)));
        }
        for (&q, op) in &self.qubits {
            out.extend(op.factors().into_iter().map(|p| Factor::Qubit(q, p)));
        }
        out
    }

    pub fn operator(&self, space: &SpaceDescriptor) -> Result<Operator> {
        let mut acc: Option<Operator> = None;
        for (&m, word) in &self.modes {
            let cutoff = space.cutoff(m)?;
            let a = local_annihilator(cutoff);
            let ad = a.adjoint();
            let d = cutoff + 1;
            let mut local = CMatrix::identity(d, d);
            for l in word {
                local = match l {
                    Ladder::Lower => local * &a,
                    Ladder::Raise => local * &ad,
                };
            }
            let op = Operator::embed(space, Subsystem::Mode(m), &local)?;
            acc = Some(match acc {
                None => op,
                Some(prev) => &prev * &op,
            });
        }
        for (&q, op) in &self.qubits {
            space.check_qubit(q)?;
            let mut local = CMatrix::identity(2, 2);
            for p in op.factors() {
                local *= local_pauli(p);
            }
            let emb = Operator::embed(space, Subsystem::Qubit(q), &local)?;
            acc = Some(match acc {
                None => emb,
                Some(prev) => &prev * &emb,
            });
        }
        Ok(acc.unwrap_or_else(|| Operator::identity(space)))
    }

    /// Renders the product in `.hspec` factor syntax using the given names.
    pub fn render(&self, mode_names: &[String], qubit_names: &[String]) -> String {
        if self.is_identity() {
            return "1".to_string();
        }
        let name = |names: &[String], i: usize, prefix: &str| {
            names.get(i).cloned().unwrap_or_else(|| format!("{prefix}{i}"))
        };
        self.factors()
            .into_iter()
            .map(|f| match f {
                Factor::Mode(m, Ladder::Lower) => format!("a({})", name(mode_names, m, "m")),
                Factor::Mode(m, Ladder::Raise) => format!("adag({})", name(mode_names, m, "m")),
                Factor::Qubit(q, p) => {
                    let f = match p {
                        Pauli::Z => "sz",
                        Pauli::Plus => "sp",
                        Pauli::Minus => "sm",
                    };
                    format!("{f}({})", name(qubit_names, q, "q"))
                }
            })
            .collect::<Vec<_>>()
            .join("*")
    }
}

impl fmt::Display for OpProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&[], &[]))
    }
}

/// `-0.0` compares equal to `0.0` but hashes and prints differently.
pub(crate) fn normalize_zero(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

#[derive(Debug, Clone)]
pub struct Term {
    pub label: Option<OpProduct>,
    pub operator: Operator,
    pub amplitude: Complex64,
    /// Angular frequency `nu` in `exp(i nu t)`, s^-1.
    pub frequency: f64,
}

impl Term {
    pub fn from_product(
        space: &SpaceDescriptor,
        product: OpProduct,
        amplitude: Complex64,
        frequency: f64,
    ) -> Result<Term> {
        Ok(Term {
            operator: product.operator(space)?,
            label: Some(product),
            amplitude,
            frequency: normalize_zero(frequency),
        })
    }

    pub fn from_operator(operator: Operator, amplitude: Complex64, frequency: f64) -> Term {
        Term {
            label: None,
            operator,
            amplitude,
            frequency: normalize_zero(frequency),
        }
    }

    /// The partner `(O^dagger, conj(amplitude), -nu)`.
    pub fn conjugate(&self) -> Term {
        Term {
            label: self.label.as_ref().map(OpProduct::adjoint),
            operator: self.operator.adjoint(),
            amplitude: self.amplitude.conj(),
            frequency: normalize_zero(-self.frequency),
        }
    }

    pub fn describe(&self) -> String {
        let op = self
            .label
            .as_ref()
            .map_or_else(|| "<matrix>".to_string(), |l| l.to_string());
        format!("({}) * {} @ {}", self.amplitude, op, self.frequency)
    }

    /// `amplitude * O` as a matrix.
    pub fn weighted(&self) -> CMatrix {
        self.operator.matrix() * self.amplitude
    }
}

#[derive(Debug, Clone)]
pub struct TermList {
    space: SpaceDescriptor,
    terms: Vec<Term>,
}

impl TermList {
    pub fn new(space: &SpaceDescriptor) -> Self {
        Self {
            space: space.clone(),
            terms: Vec::new(),
        }
    }

    pub fn from_terms(space: &SpaceDescriptor, terms: Vec<Term>) -> Result<Self> {
        let mut list = Self::new(space);
        for t in terms {
            list.push(t)?;
        }
        Ok(list)
    }

    pub fn space(&self) -> &SpaceDescriptor {
        &self.space
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn push(&mut self, term: Term) -> Result<()> {
        self.space.ensure_same(term.operator.space())?;
        self.terms.push(term);
        Ok(())
    }

    pub fn push_product(&mut self, product: OpProduct, amplitude: Complex64, frequency: f64) -> Result<()> {
        let t = Term::from_product(&self.space, product, amplitude, frequency)?;
        self.terms.push(t);
        Ok(())
    }

    /// Pushes `amplitude * product * e^{i nu t}` and its Hermitian conjugate.
    pub fn push_with_conjugate(
        &mut self,
        product: OpProduct,
        amplitude: Complex64,
        frequency: f64,
    ) -> Result<()> {
        let t = Term::from_product(&self.space, product, amplitude, frequency)?;
        let c = t.conjugate();
        self.terms.push(t);
        self.terms.push(c);
        Ok(())
    }

    pub fn is_static(&self) -> bool {
        self.terms.iter().all(|t| t.frequency == 0.0)
    }

    pub fn max_abs_frequency(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.frequency.abs())
            .fold(0.0, f64::max)
    }

    fn frequency_tolerance(&self) -> f64 {
        1e-12 * self.max_abs_frequency().max(1.0)
    }

    /// Sums terms sharing a frequency: `H(t) = sum_nu exp(i nu t) S_nu`.
    pub fn frequency_groups(&self) -> Vec<(f64, CMatrix)> {
        let tol = self.frequency_tolerance();
        let mut groups: Vec<(f64, CMatrix)> = Vec::new();
        for t in &self.terms {
            match groups
                .iter_mut()
                .find(|(nu, _)| (nu - t.frequency).abs() <= tol)
            {
                Some((_, m)) => *m += t.weighted(),
                None => groups.push((t.frequency, t.weighted())),
            }
        }
        groups
    }

    pub fn matrix_at(&self, t: f64) -> CMatrix {
        let d = self.space.dim();
        let mut h = CMatrix::zeros(d, d);
        for term in &self.terms {
            let phase = Complex64::from_polar(1.0, term.frequency * t);
            h += term.operator.matrix() * (term.amplitude * phase);
        }
        h
    }

    /// Sum of a static list as an operator.
    pub fn static_operator(&self) -> Result<Operator> {
        if let Some((index, t)) = self.terms.iter().enumerate().find(|(_, t)| t.frequency != 0.0) {
            return Err(Error::NotStatic {
                index,
                frequency: t.frequency,
            });
        }
        Operator::new(self.space.clone(), self.matrix_at(0.0))
    }

    /// Largest `||S_{-nu} - S_nu^dagger||_F` over frequency groups, with the
    /// offending frequency. Zero exactly when `H(t)` is Hermitian for all `t`.
    pub fn pairing_residual(&self) -> (f64, f64) {
        let groups = self.frequency_groups();
        let tol = self.frequency_tolerance();
        let mut worst = (0.0, 0.0);
        for (nu, s) in &groups {
            let partner = groups.iter().find(|(mu, _)| (mu + nu).abs() <= tol);
            let r = match partner {
                Some((_, p)) => frobenius(&(p - s.adjoint())),
                None => frobenius(s),
            };
            if r > worst.0 {
                worst = (r, *nu);
            }
        }
        worst
    }

    /// Hermiticity-pairing invariant, relative to the largest term norm.
    pub fn check_pairing(&self) -> Result<()> {
        let scale = self
            .terms
            .iter()
            .map(|t| frobenius(&t.weighted()))
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        let (residual, frequency) = self.pairing_residual();
        if residual <= 1e-9 * scale {
            Ok(())
        } else {
            Err(Error::NotHermitian {
                frequency,
                residual,
            })
        }
    }

    pub fn is_hermitian_paired(&self) -> bool {
        self.check_pairing().is_ok()
    }

    pub fn scaled(&self, s: Complex64) -> TermList {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.amplitude *= s;
        }
        out
    }

    /// Conjugates every operator by a fixed unitary, `O -> W O W^dagger`.
    /// Labels are dropped since the result is no longer a ladder product.
    pub fn transformed(&self, w: &Operator) -> Result<TermList> {
        self.space.ensure_same(w.space())?;
        let wd = w.adjoint();
        let terms = self
            .terms
            .iter()
            .map(|t| Term::from_operator(&(w * &t.operator) * &wd, t.amplitude, t.frequency))
            .collect();
        Ok(TermList {
            space: self.space.clone(),
            terms,
        })
    }

    /// Merges labeled terms with equal product and frequency, drops terms whose
    /// amplitude cancelled, and sorts deterministically (frequency, then
    /// product). Unlabeled terms follow in their original order.
    pub fn canonicalize(&self) -> Result<TermList> {
        let mut merged: BTreeMap<(u64, OpProduct), Complex64> = BTreeMap::new();
        let mut order: Vec<(f64, OpProduct)> = Vec::new();
        let mut unlabeled = Vec::new();
        for t in &self.terms {
            match &t.label {
                Some(l) => {
                    let nu = normalize_zero(t.frequency);
                    let key = (nu.to_bits(), l.clone());
                    let slot = merged.entry(key).or_insert_with(|| {
                        order.push((nu, l.clone()));
                        ZERO
                    });
                    *slot += t.amplitude;
                }
                None => unlabeled.push(t.clone()),
            }
        }
        let scale = merged.values().map(|z| z.norm()).fold(0.0, f64::max);
        order.sort_by(|x, y| x.0.total_cmp(&y.0).then_with(|| x.1.cmp(&y.1)));
        let mut out = TermList::new(&self.space);
        for (nu, l) in order {
            let amp = merged[&(nu.to_bits(), l.clone())];
            if amp.norm() <= 1e-14 * scale {
                continue;
            }
            out.push_product(l, amp, nu)?;
        }
        out.terms.extend(unlabeled);
        Ok(out)
    }

}
