use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use super::ast::{BinOp, Expr, HamiltonianSpec, OpKind, TermDecl};
use super::serialize::term_to_string;
use crate::error::{Error, Result};
use crate::hilbert::{make_space, Pauli};
use crate::terms::{Factor, Ladder, OpProduct, Term, TermList};

fn eval(e: &Expr, env: &HashMap<String, Complex64>) -> Result<Complex64> {
    let v = match e {
        Expr::Number(x) => Complex64::new(*x, 0.0),
        Expr::Imag => Complex64::i(),
        Expr::Pi => Complex64::new(PI, 0.0),
        Expr::Ident(name) => *env
            .get(name)
            .ok_or_else(|| Error::Lowering(format!("unbound parameter `{name}`")))?,
        Expr::Neg(x) => -eval(x, env)?,
        Expr::Binary(op, l, r) => {
            let (l, r) = (eval(l, env)?, eval(r, env)?);
            match op {
                BinOp::Add => l + r,
                BinOp::Sub => l - r,
                BinOp::Mul => l * r,
                BinOp::Div => {
                    if r.norm() == 0.0 {
                        return Err(Error::Lowering("division by zero".into()));
                    }
                    l / r
                }
            }
        }
    };
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(Error::Lowering("expression overflows".into()));
    }
    Ok(v)
}

/// Parameter values in declaration order.
pub fn eval_params(spec: &HamiltonianSpec) -> Result<HashMap<String, Complex64>> {
    let mut env = HashMap::new();
    for p in &spec.params {
        let v = eval(&p.value, &env).map_err(|e| Error::Lowering(format!("param `{}`: {e}", p.name)))?;
        env.insert(p.name.clone(), v);
    }
    Ok(env)
}

fn term_frequency(t: &TermDecl, env: &HashMap<String, Complex64>) -> Result<f64> {
    let Some(f) = &t.frequency else {
        return Ok(0.0);
    };
    let v = eval(f, env)?;
    if v.im.abs() > 1e-12 * v.re.abs().max(1.0) {
        return Err(Error::Lowering(format!(
            "`{}`: frequency must be real, got {v}",
            term_to_string(t)
        )));
    }
    Ok(v.re)
}

/// Builds the term list; every term needs a conjugate partner, either
/// written out or requested with `+h.c.`.
pub fn lower(spec: &HamiltonianSpec) -> Result<TermList> {
    let cutoffs: Vec<usize> = spec.modes.iter().map(|m| m.cutoff).collect();
    let space = make_space(&cutoffs, spec.qubits.len())?;
    let mode_index: HashMap<&str, usize> = spec.modes.iter().enumerate().map(|(i, m)| (m.name.as_str(), i)).collect();
    let qubit_index: HashMap<&str, usize> = spec.qubits.iter().enumerate().map(|(i, q)| (q.as_str(), i)).collect();
    let env = eval_params(spec)?;

    let mut list = TermList::new(&space);
    let mut origin = Vec::new();
    for (k, t) in spec.terms.iter().enumerate() {
        let mut factors = Vec::with_capacity(t.factors.len());
        for f in &t.factors {
            let missing = || Error::Lowering(format!("`{}` is not declared", f.target));
            factors.push(match f.kind {
                OpKind::A | OpKind::Adag => {
                    let m = *mode_index.get(f.target.as_str()).ok_or_else(missing)?;
                    Factor::Mode(m, if f.kind == OpKind::A { Ladder::Lower } else { Ladder::Raise })
                }
                kind => {
                    let q = *qubit_index.get(f.target.as_str()).ok_or_else(missing)?;
                    let p = match kind {
                        OpKind::Sp => Pauli::Plus,
                        OpKind::Sm => Pauli::Minus,
                        _ => Pauli::Z,
                    };
                    Factor::Qubit(q, p)
                }
            });
        }
        let (scalar, product) = OpProduct::from_factors(&factors);
        let amplitude = eval(&t.coefficient, &env)? * scalar;
        let term = Term::from_product(&space, product, amplitude, term_frequency(t, &env)?)?;
        let partner = t.hermitian_conjugate.then(|| term.conjugate());
        list.push(term)?;
        origin.push(k);
        if let Some(c) = partner {
            list.push(c)?;
            origin.push(k);
        }
    }

    if let Err(Error::NotHermitian { frequency, .. }) = list.check_pairing() {
        let tol = 1e-12 * list.max_abs_frequency().max(1.0);
        let culprit = spec
            .terms
            .iter()
            .enumerate()
            .find(|(k, t)| {
                !t.hermitian_conjugate
                    && list.terms().iter().zip(&origin).any(|(lt, o)| {
                        o == k && ((lt.frequency - frequency).abs() <= tol || (lt.frequency + frequency).abs() <= tol)
                    })
            })
            .map(|(_, t)| term_to_string(t))
            .unwrap_or_else(|| format!("at frequency {frequency}"));
        return Err(Error::Lowering(format!(
            "term `{culprit}` has no Hermitian-conjugate partner; add +h.c. or write the partner explicitly"
        )));
    }
    Ok(list)
}
