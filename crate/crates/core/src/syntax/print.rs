use super::parse::is_constant_name;
use super::{Atom, CutSequent, Formula, Term};
use std::fmt;

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::App(c, args) if args.is_empty() => {
                if is_constant_name(c.as_str()) {
                    write!(f, "{c}")
                } else {
                    write!(f, "{c}()")
                }
            }
            Term::App(g, args) => {
                write!(f, "{g}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.pred.positive {
            f.write_str("~")?;
        }
        write!(f, "{}", self.pred.name)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn operand(g: &Formula, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match g {
        Formula::Atom(_) => write!(f, "{g}"),
        _ => write!(f, "({g})"),
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::Tensor(a, b) => {
                operand(a, f)?;
                f.write_str(" * ")?;
                operand(b, f)
            }
            Formula::Par(a, b) => {
                operand(a, f)?;
                f.write_str(" | ")?;
                operand(b, f)
            }
            Formula::Forall(x, a) | Formula::Exists(x, a) => {
                let q = if matches!(self, Formula::Forall(..)) { "all" } else { "ex" };
                write!(f, "{q} {x}. ")?;
                match **a {
                    Formula::Tensor(..) | Formula::Par(..) => write!(f, "({a})"),
                    _ => write!(f, "{a}"),
                }
            }
        }
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CutSequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for g in &self.formulas {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "{g}")?;
        }
        for (l, r) in &self.cuts {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "cut{{{l} ; {r}}}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use crate::syntax::parse_sequent;

    #[test]
    fn canonical_form() {
        let src = "all x. ~P(f(x)), ex z. (P(z) * (~Q(z) | Q(z)))";
        assert_eq!(parse_sequent(src).unwrap().to_string(), src);
        let s = parse_sequent("cut{ P ; ~P }, (Q(a))").unwrap();
        assert_eq!(s.to_string(), "Q(a), cut{P ; ~P}");
        assert_eq!(parse_sequent(&s.to_string()).unwrap(), s);
    }

    #[test]
    fn quantifier_operands_are_parenthesized() {
        let s = parse_sequent("(all x. P(x)) | Q, R * (ex y. S(y))").unwrap();
        assert_eq!(s.to_string(), "(all x. P(x)) | Q, R * (ex y. S(y))");
    }
}
