use super::Proof;
use crate::syntax::{Formula, ParseError, Parser, Sym, Term, Tok};
use std::fmt::Write as _;

/// Parse a proof in the s-expression format, e.g. `(par 0 (ax P(a)))`.
pub fn parse_proof(src: &str) -> Result<Proof, ParseError> {
    let mut p = Parser::new(src)?;
    p.tight = true;
    let proof = proof(&mut p)?;
    if !p.at_eof() {
        return Err(p.error(format!("unexpected {} after proof", p.peek())));
    }
    Ok(proof)
}

const RULES: [&str; 8] = ["ax", "par", "tensor", "exists", "forall", "cut", "xcut", "perm"];

fn starts_proof(p: &Parser) -> bool {
    *p.peek() == Tok::LParen && matches!(p.peek_at(1), Tok::Ident(k) if RULES.contains(&k.as_str()))
}

fn paren_formula(p: &mut Parser) -> Result<Formula, ParseError> {
    p.expect(Tok::LParen)?;
    let f = p.formula()?;
    p.expect(Tok::RParen)?;
    Ok(f)
}

fn proof(p: &mut Parser) -> Result<Proof, ParseError> {
    p.expect(Tok::LParen)?;
    let kw = p.ident()?;
    let b = |q: Proof| Box::new(q);
    let out = match kw.as_str() {
        "ax" => {
            let left = p.atom()?;
            let right = if *p.peek() == Tok::RParen { left.dual() } else { p.atom()? };
            Proof::Ax { left, right }
        }
        "par" => {
            let at = p.number()?;
            Proof::Par { at, premise: b(proof(p)?) }
        }
        "tensor" | "cut" => {
            let left = b(proof(p)?);
            let right = b(proof(p)?);
            if kw == "tensor" {
                Proof::Tensor { left, right }
            } else {
                Proof::Cut { left, right }
            }
        }
        "exists" => {
            let at = p.number()?;
            let var = p.variable()?;
            let witness = if matches!(p.peek(), Tok::Ident(s) if s == "_") {
                p.next();
                None
            } else {
                Some(p.term()?)
            };
            let body = paren_formula(p)?;
            Proof::Exists { at, var, witness, body, premise: b(proof(p)?) }
        }
        "forall" => {
            let at = p.number()?;
            let var = p.variable()?;
            Proof::Forall { at, var, premise: b(proof(p)?) }
        }
        "xcut" => {
            p.expect(Tok::LParen)?;
            let mut subst: Vec<(Sym, Term)> = Vec::new();
            while *p.peek() == Tok::LParen {
                p.next();
                let x = p.variable()?;
                let t = p.term()?;
                p.expect(Tok::RParen)?;
                subst.push((x, t));
            }
            p.expect(Tok::RParen)?;
            let mut cut_formulas = Vec::new();
            while !starts_proof(p) && cut_formulas.len() < 2 {
                cut_formulas.push(paren_formula(p)?);
            }
            let left = b(proof(p)?);
            let right = b(proof(p)?);
            let cut = match cut_formulas.len() {
                2 => (cut_formulas[0].clone(), cut_formulas[1].clone()),
                1 => (cut_formulas[0].clone(), cut_formulas[0].dual()),
                _ => infer_cut(&left, &subst).map_err(|m| p.error(m))?,
            };
            Proof::ExtendedCut { subst, cut, left, right }
        }
        "perm" => {
            p.expect(Tok::LParen)?;
            let mut order = Vec::new();
            while *p.peek() != Tok::RParen {
                order.push(p.number()?);
            }
            p.next();
            Proof::Perm { order, premise: b(proof(p)?) }
        }
        other => return Err(p.error(format!("unknown rule `{other}`"))),
    };
    p.expect(Tok::RParen)?;
    Ok(out)
}

/// Recover the cut formula from the left hypothesis `A sigma` by abstracting
/// each substituted term back to its variable.
fn infer_cut(left: &Proof, subst: &[(Sym, Term)]) -> Result<(Formula, Formula), String> {
    let s = left.shape_conclusion().map_err(|e| format!("cannot infer cut formula: {e}"))?;
    let a = s.formulas.last().ok_or("left premise of xcut has no formula")?;
    fn abs_term(t: &Term, subst: &[(Sym, Term)]) -> Term {
        if let Some((x, _)) = subst.iter().find(|(_, s)| s == t) {
            return Term::Var(x.clone());
        }
        match t {
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| abs_term(a, subst)).collect()),
            v => v.clone(),
        }
    }
    fn abs(f: &Formula, subst: &[(Sym, Term)]) -> Formula {
        match f {
            Formula::Atom(a) => {
                let mut a = a.clone();
                a.args = a.args.iter().map(|t| abs_term(t, subst)).collect();
                Formula::Atom(a)
            }
            Formula::Tensor(x, y) => Formula::tensor(abs(x, subst), abs(y, subst)),
            Formula::Par(x, y) => Formula::par(abs(x, subst), abs(y, subst)),
            Formula::Forall(v, b) => Formula::Forall(v.clone(), Box::new(abs(b, subst))),
            Formula::Exists(v, b) => Formula::Exists(v.clone(), Box::new(abs(b, subst))),
        }
    }
    let a = abs(a, subst);
    Ok((a.clone(), a.dual()))
}

pub(crate) fn print_proof(p: &Proof) -> String {
    let mut s = String::new();
    print(p, 0, &mut s);
    s
}

fn print(p: &Proof, indent: usize, out: &mut String) {
    let head = match p {
        Proof::Ax { left, right } => {
            if *right == left.dual() {
                let _ = write!(out, "(ax {left})");
            } else {
                let _ = write!(out, "(ax {left} {right})");
            }
            return;
        }
        Proof::Par { at, .. } => format!("par {at}"),
        Proof::Tensor { .. } => "tensor".to_string(),
        Proof::Exists { at, var, witness, body, .. } => {
            let w = witness.as_ref().map_or("_".to_string(), Term::to_string);
            format!("exists {at} {var} {w} ({body})")
        }
        Proof::Forall { at, var, .. } => format!("forall {at} {var}"),
        Proof::Cut { .. } => "cut".to_string(),
        Proof::ExtendedCut { subst, cut: (a, b), .. } => {
            let pairs: Vec<String> = subst.iter().map(|(x, t)| format!("({x} {t})")).collect();
            if b.alpha_eq(&a.dual()) && *b == a.dual() {
                format!("xcut ({}) ({a})", pairs.join(" "))
            } else {
                format!("xcut ({}) ({a}) ({b})", pairs.join(" "))
            }
        }
        Proof::Perm { order, .. } => {
            let o: Vec<String> = order.iter().map(usize::to_string).collect();
            format!("perm ({})", o.join(" "))
        }
    };
    out.push('(');
    out.push_str(&head);
    for q in p.premises() {
        out.push('\n');
        out.push_str(&" ".repeat(indent + 2));
        print(q, indent + 2, out);
    }
    out.push(')');
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::check_proof;

    #[test]
    fn round_trip() {
        let src = "(xcut ((y f(x))) (~P(y))\n  (ax P(f(x)))\n  (exists 1 z _ (~P(f(x)))\n    (ax P(f(x)))))";
        let p = parse_proof(src).unwrap();
        assert_eq!(print_proof(&p), src);
        assert_eq!(parse_proof(&print_proof(&p)).unwrap(), p);
    }

    #[test]
    fn witness_then_body_is_not_an_application() {
        let p = parse_proof("(exists 1 y x (P(y)) (ax ~P(x)))").unwrap();
        match &p {
            Proof::Exists { witness, .. } => assert_eq!(witness.as_ref().unwrap(), &Term::var("x")),
            _ => panic!(),
        }
        assert!(check_proof(&p).is_ok());
    }

    #[test]
    fn xcut_infers_the_cut_formula() {
        let p = parse_proof("(xcut ((y f(x))) (ax P(f(x))) (ax P(f(x))))").unwrap();
        match &p {
            Proof::ExtendedCut { cut, .. } => assert_eq!(cut.0.to_string(), "~P(y)"),
            _ => panic!(),
        }
        assert!(check_proof(&p).is_ok());
    }

    #[test]
    fn errors_are_positioned() {
        assert!(matches!(parse_proof("(frob 1)"), Err(ParseError::Syntax { .. })));
        assert!(parse_proof("(ax P(a)) extra").is_err());
    }
}
