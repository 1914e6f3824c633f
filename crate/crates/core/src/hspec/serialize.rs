use std::fmt::Write;

use num_complex::Complex64;

use super::ast::{BinOp, Expr, HamiltonianSpec, OpFactor, TermDecl};
use crate::terms::TermList;

/// Shortest text that reads back to the same `f64`.
pub fn format_number(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-4..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn write_expr(out: &mut String, e: &Expr, min_prec: u8) {
    let wrap = e.precedence() < min_prec;
    if wrap {
        out.push('(');
    }
    match e {
        Expr::Number(x) => out.push_str(&format_number(*x)),
        Expr::Imag => out.push('i'),
        Expr::Pi => out.push_str("pi"),
        Expr::Ident(s) => out.push_str(s),
        Expr::Neg(inner) => {
            out.push('-');
            write_expr(out, inner, 3);
        }
        Expr::Binary(op, l, r) => {
            let p = op.precedence();
            write_expr(out, l, p);
            match op {
                BinOp::Add | BinOp::Sub => write!(out, " {} ", op.symbol()).unwrap(),
                BinOp::Mul | BinOp::Div => out.push_str(op.symbol()),
            }
            write_expr(out, r, p + 1);
        }
    }
    if wrap {
        out.push(')');
    }
}

pub fn expr_to_string(e: &Expr) -> String {
    let mut s = String::new();
    write_expr(&mut s, e, 0);
    s
}

fn coefficient_to_string(e: &Expr) -> String {
    if e.is_atom() {
        expr_to_string(e)
    } else {
        format!("({})", expr_to_string(e))
    }
}

fn factors_to_string(factors: &[OpFactor]) -> String {
    factors
        .iter()
        .map(|f| format!("{}({})", f.kind.keyword(), f.target))
        .collect::<Vec<_>>()
        .join("*")
}

pub fn term_to_string(t: &TermDecl) -> String {
    let mut s = format!(
        "term {} * {}",
        coefficient_to_string(&t.coefficient),
        factors_to_string(&t.factors)
    );
    if let Some(f) = &t.frequency {
        write!(s, " @ {}", expr_to_string(f)).unwrap();
    }
    if t.hermitian_conjugate {
        s.push_str(" +h.c.");
    }
    s.push(';');
    s
}

/// Sort key for canonical term order: operator product first.
pub(crate) fn term_sort_key(t: &TermDecl) -> (String, String, String, bool) {
    (
        factors_to_string(&t.factors),
        expr_to_string(&t.coefficient),
        t.frequency.as_ref().map(expr_to_string).unwrap_or_default(),
        t.hermitian_conjugate,
    )
}

/// Canonical text: modes, qubits, parameters, then terms, one per line.
pub fn serialize(spec: &HamiltonianSpec) -> String {
    let mut out = String::new();
    for m in &spec.modes {
        writeln!(out, "mode {}({});", m.name, m.cutoff).unwrap();
    }
    for q in &spec.qubits {
        writeln!(out, "qubit {q};").unwrap();
    }
    for p in &spec.params {
        writeln!(out, "param {} = {};", p.name, expr_to_string(&p.value)).unwrap();
    }
    let mut terms: Vec<&TermDecl> = spec.terms.iter().collect();
    terms.sort_by_cached_key(|t| term_sort_key(t));
    for t in terms {
        writeln!(out, "{}", term_to_string(t)).unwrap();
    }
    out
}

/// A complex constant as an expression, `re + im*i`.
pub fn complex_expr(z: Complex64) -> Expr {
    let signed = |x: f64| {
        if x < 0.0 {
            Expr::Neg(Box::new(Expr::Number(-x)))
        } else {
            Expr::Number(x)
        }
    };
    let imag = |x: f64| {
        if x == 1.0 {
            Expr::Imag
        } else {
            Expr::binary(BinOp::Mul, Expr::Number(x), Expr::Imag)
        }
    };
    match (z.re != 0.0, z.im != 0.0) {
        (_, false) => signed(z.re),
        (false, true) if z.im < 0.0 => Expr::Neg(Box::new(imag(-z.im))),
        (false, true) => imag(z.im),
        (true, true) if z.im < 0.0 => Expr::binary(BinOp::Sub, signed(z.re), imag(-z.im)),
        (true, true) => Expr::binary(BinOp::Add, signed(z.re), imag(z.im)),
    }
}

/// Renders a labeled static or oscillating list as `.hspec` text with the
/// given declarations. Conjugate pairs are folded into `+h.c.`, identity
/// terms become comments, and unlabeled terms are reported as comments.
pub fn render_term_list(list: &TermList, spec: &HamiltonianSpec) -> String {
    let modes = spec.mode_names();
    let qubits = spec.qubit_names();
    let mut out = String::new();
    for m in &spec.modes {
        writeln!(out, "mode {}({});", m.name, m.cutoff).unwrap();
    }
    for q in &spec.qubits {
        writeln!(out, "qubit {q};").unwrap();
    }
    let terms = list.terms();
    let mut used = vec![false; terms.len()];
    for (k, t) in terms.iter().enumerate() {
        if used[k] {
            continue;
        }
        used[k] = true;
        let Some(label) = &t.label else {
            writeln!(out, "# unlabeled matrix term omitted: amplitude {}", t.amplitude).unwrap();
            continue;
        };
        if label.is_identity() {
            writeln!(
                out,
                "# dropped constant offset {}",
                expr_to_string(&complex_expr(t.amplitude))
            )
            .unwrap();
            continue;
        }
        let mut hc = false;
        if !label.is_self_adjoint() {
            let adj = label.adjoint();
            let partner = terms.iter().enumerate().position(|(j, u)| {
                !used[j]
                    && u.label.as_ref() == Some(&adj)
                    && u.frequency == -t.frequency
                    && (u.amplitude - t.amplitude.conj()).norm() <= 1e-12 * t.amplitude.norm()
            });
            if let Some(j) = partner {
                used[j] = true;
                hc = true;
            }
        }
        let factors = label.render(&modes, &qubits);
        let mut line = format!("term {} * {factors}", coefficient_to_string(&complex_expr(t.amplitude)));
        if t.frequency != 0.0 {
            write!(line, " @ {}", expr_to_string(&complex_expr(Complex64::new(t.frequency, 0.0)))).unwrap();
        }
        if hc {
            line.push_str(" +h.c.");
        }
        line.push(';');
        writeln!(out, "{line}").unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.0, 1.0, 2500.0, 0.1, 1e-20, 1.2345678901234567e300, 6.02e23, 1e-4, 9.99e15] {
            let s = format_number(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
    }

    #[test]
    fn parenthesization_preserves_structure() {
        let text = "param a = 1; param b = 2; param c = 3; param x = a - (b - c) / (a*b) - -c;";
        let s = parse(text).unwrap();
        let again = parse(&serialize(&s)).unwrap();
        assert_eq!(s, again);
        assert_eq!(serialize(&s).lines().last().unwrap(), "param x = a - (b - c)/(a*b) - -c;");
    }

    #[test]
    fn whitespace_and_order_do_not_matter() {
        let one = "mode a(3);qubit q;term 2*sp(q)*a(a)@1+h.c.;term 1*sz(q);";
        let two = "mode a( 3 ) ;\n qubit   q ; # c\nterm 1 * sz(q);\n term 2 * sp(q) * a(a) @ 1 +h.c. ;";
        assert_eq!(serialize(&parse(one).unwrap()), serialize(&parse(two).unwrap()));
    }

    #[test]
    fn complex_constants_read_back() {
        for z in [
            Complex64::new(1.5, 0.0),
            Complex64::new(-1.5, 0.0),
            Complex64::new(0.0, 2.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(3.0, -4.0),
            Complex64::new(-3.0, 4e-30),
        ] {
            let text = format!("param x = {};", expr_to_string(&complex_expr(z)));
            let spec = parse(&text).unwrap();
            let v = super::super::lower::eval_params(&spec).unwrap()["x"];
            assert_eq!(v, z, "{text}");
        }
    }
}
