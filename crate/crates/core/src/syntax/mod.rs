//! First-order MLL syntax: terms, formulas, cut sequents and leaf addressing.

mod clean;
mod forest;
mod parse;
mod print;

pub use clean::{cleanse, encode_cuts, is_clean, FreshSupply, Renaming};
pub use forest::{Forest, FNode, NodeKind};
pub use parse::{parse_formula, parse_sequent, parse_term, Lexer, ParseError, Parser, Signature, Tok};

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

/// Interned-ish symbol. Cheap to clone, safe to share across threads.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sym(Arc<str>);

impl Sym {
    pub fn new(s: &str) -> Sym {
        Sym(Arc::from(s))
    }
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Sym {
    fn from(s: &str) -> Sym {
        Sym::new(s)
    }
}

impl fmt::Debug for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Sym),
    /// Function application; constants have no arguments.
    App(Sym, Vec<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(Sym::new(name))
    }

    pub fn constant(name: &str) -> Term {
        Term::App(Sym::new(name), Vec::new())
    }

    pub fn app(name: &str, args: Vec<Term>) -> Term {
        Term::App(Sym::new(name), args)
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn occurs(&self, x: &Sym) -> bool {
        match self {
            Term::Var(v) => v == x,
            Term::App(_, args) => args.iter().any(|a| a.occurs(x)),
        }
    }

    /// Number of occurrences of the symbol `s`, as a variable or as a function head.
    pub fn count_symbol(&self, s: &str) -> usize {
        match self {
            Term::Var(v) => usize::from(v.as_str() == s),
            Term::App(f, args) => {
                usize::from(f.as_str() == s) + args.iter().map(|a| a.count_symbol(s)).sum::<usize>()
            }
        }
    }

    /// Number of variable occurrences, with repetitions.
    pub fn var_occurrences(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => args.iter().map(Term::var_occurrences).sum(),
        }
    }

    pub fn vars_into(&self, out: &mut Vec<Sym>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::App(_, args) => args.iter().for_each(|a| a.vars_into(out)),
        }
    }

    pub fn subst(&self, x: &Sym, t: &Term) -> Term {
        match self {
            Term::Var(v) if v == x => t.clone(),
            Term::Var(_) => self.clone(),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.subst(x, t)).collect()),
        }
    }

    /// Simultaneous substitution.
    pub fn subst_all(&self, s: &dyn Fn(&Sym) -> Option<Term>) -> Term {
        match self {
            Term::Var(v) => s(v).unwrap_or_else(|| self.clone()),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.subst_all(s)).collect()),
        }
    }

    pub fn rename(&self, from: &Sym, to: &Sym) -> Term {
        self.subst(from, &Term::Var(to.clone()))
    }

    pub fn symbols_into(&self, out: &mut BTreeSet<Sym>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::App(f, args) => {
                out.insert(f.clone());
                args.iter().for_each(|a| a.symbols_into(out));
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Predicate {
    pub name: Sym,
    pub positive: bool,
}

impl Predicate {
    pub fn new(name: &str, positive: bool) -> Predicate {
        Predicate { name: Sym::new(name), positive }
    }
    pub fn dual(&self) -> Predicate {
        Predicate { name: self.name.clone(), positive: !self.positive }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub pred: Predicate,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(name: &str, positive: bool, args: Vec<Term>) -> Atom {
        Atom { pred: Predicate::new(name, positive), args }
    }
    pub fn arity(&self) -> usize {
        self.args.len()
    }
    pub fn dual(&self) -> Atom {
        Atom { pred: self.pred.dual(), args: self.args.clone() }
    }
    /// Base-name duality with equal arity; terms may differ.
    pub fn linkable(&self, other: &Atom) -> bool {
        self.pred.name == other.pred.name
            && self.pred.positive != other.pred.positive
            && self.args.len() == other.args.len()
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(Atom),
    Tensor(Box<Formula>, Box<Formula>),
    Par(Box<Formula>, Box<Formula>),
    Forall(Sym, Box<Formula>),
    Exists(Sym, Box<Formula>),
}

/// Child-index sequence from a formula root.
pub type Path = Vec<u8>;

impl Formula {
    pub fn atom(name: &str, positive: bool, args: Vec<Term>) -> Formula {
        Formula::Atom(Atom::new(name, positive, args))
    }
    pub fn tensor(a: Formula, b: Formula) -> Formula {
        Formula::Tensor(Box::new(a), Box::new(b))
    }
    pub fn par(a: Formula, b: Formula) -> Formula {
        Formula::Par(Box::new(a), Box::new(b))
    }
    pub fn forall(x: &str, a: Formula) -> Formula {
        Formula::Forall(Sym::new(x), Box::new(a))
    }
    pub fn exists(x: &str, a: Formula) -> Formula {
        Formula::Exists(Sym::new(x), Box::new(a))
    }

    pub fn dual(&self) -> Formula {
        match self {
            Formula::Atom(a) => Formula::Atom(a.dual()),
            Formula::Tensor(a, b) => Formula::Par(Box::new(a.dual()), Box::new(b.dual())),
            Formula::Par(a, b) => Formula::Tensor(Box::new(a.dual()), Box::new(b.dual())),
            Formula::Forall(x, a) => Formula::Exists(x.clone(), Box::new(a.dual())),
            Formula::Exists(x, a) => Formula::Forall(x.clone(), Box::new(a.dual())),
        }
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Atom(_) => vec![],
            Formula::Tensor(a, b) | Formula::Par(a, b) => vec![a, b],
            Formula::Forall(_, a) | Formula::Exists(_, a) => vec![a],
        }
    }

    /// Number of formula nodes.
    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Formula::size).sum::<usize>()
    }

    pub fn at(&self, path: &[u8]) -> Option<&Formula> {
        let mut f = self;
        for &i in path {
            f = *f.children().get(i as usize)?;
        }
        Some(f)
    }

    pub fn at_mut(&mut self, path: &[u8]) -> Option<&mut Formula> {
        let mut f = self;
        for &i in path {
            f = match (f, i) {
                (Formula::Tensor(a, _) | Formula::Par(a, _), 0) => a,
                (Formula::Tensor(_, b) | Formula::Par(_, b), 1) => b,
                (Formula::Forall(_, a) | Formula::Exists(_, a), 0) => a,
                _ => return None,
            };
        }
        Some(f)
    }

    /// Leaf paths, left to right.
    pub fn leaf_paths(&self) -> Vec<Path> {
        fn go(f: &Formula, p: &mut Path, out: &mut Vec<Path>) {
            let cs = f.children();
            if cs.is_empty() {
                out.push(p.clone());
            }
            for (i, c) in cs.into_iter().enumerate() {
                p.push(i as u8);
                go(c, p, out);
                p.pop();
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn atoms(&self) -> Vec<&Atom> {
        fn go<'a>(f: &'a Formula, out: &mut Vec<&'a Atom>) {
            match f {
                Formula::Atom(a) => out.push(a),
                _ => f.children().into_iter().for_each(|c| go(c, out)),
            }
        }
        let mut out = Vec::new();
        go(self, &mut out);
        out
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            Formula::Atom(_) => 1,
            _ => self.children().into_iter().map(Formula::leaf_count).sum(),
        }
    }

    /// Free variables in first-occurrence left-to-right order.
    pub fn free_vars(&self) -> Vec<Sym> {
        fn go(f: &Formula, bound: &mut Vec<Sym>, out: &mut Vec<Sym>) {
            match f {
                Formula::Atom(a) => {
                    let mut vs = Vec::new();
                    a.args.iter().for_each(|t| t.vars_into(&mut vs));
                    for v in vs {
                        if !bound.contains(&v) && !out.contains(&v) {
                            out.push(v);
                        }
                    }
                }
                Formula::Tensor(a, b) | Formula::Par(a, b) => {
                    go(a, bound, out);
                    go(b, bound, out);
                }
                Formula::Forall(x, a) | Formula::Exists(x, a) => {
                    bound.push(x.clone());
                    go(a, bound, out);
                    bound.pop();
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn has_free(&self, x: &Sym) -> bool {
        match self {
            Formula::Atom(a) => a.args.iter().any(|t| t.occurs(x)),
            Formula::Tensor(a, b) | Formula::Par(a, b) => a.has_free(x) || b.has_free(x),
            Formula::Forall(y, a) | Formula::Exists(y, a) => y != x && a.has_free(x),
        }
    }

    /// Bound variables in preorder (with repetition).
    pub fn binders(&self) -> Vec<Sym> {
        fn go(f: &Formula, out: &mut Vec<Sym>) {
            if let Formula::Forall(x, _) | Formula::Exists(x, _) = f {
                out.push(x.clone());
            }
            f.children().into_iter().for_each(|c| go(c, out));
        }
        let mut out = Vec::new();
        go(self, &mut out);
        out
    }

    /// Substitute `t` for free occurrences of `x`. Returns `None` if a variable
    /// of `t` would be captured by a binder.
    pub fn subst(&self, x: &Sym, t: &Term) -> Option<Formula> {
        let tv = {
            let mut v = Vec::new();
            t.vars_into(&mut v);
            v
        };
        fn go(f: &Formula, x: &Sym, t: &Term, tv: &[Sym]) -> Option<Formula> {
            Some(match f {
                Formula::Atom(a) => Formula::Atom(Atom {
                    pred: a.pred.clone(),
                    args: a.args.iter().map(|s| s.subst(x, t)).collect(),
                }),
                Formula::Tensor(a, b) => Formula::tensor(go(a, x, t, tv)?, go(b, x, t, tv)?),
                Formula::Par(a, b) => Formula::par(go(a, x, t, tv)?, go(b, x, t, tv)?),
                Formula::Forall(y, a) | Formula::Exists(y, a) => {
                    let body = if y == x {
                        (**a).clone()
                    } else {
                        if tv.contains(y) && a.has_free(x) {
                            return None;
                        }
                        go(a, x, t, tv)?
                    };
                    match f {
                        Formula::Forall(..) => Formula::Forall(y.clone(), Box::new(body)),
                        _ => Formula::Exists(y.clone(), Box::new(body)),
                    }
                }
            })
        }
        go(self, x, t, &tv)
    }

    /// Rename free occurrences of `from` to `to` (no capture check).
    pub fn rename_free(&self, from: &Sym, to: &Sym) -> Formula {
        self.map_free(&|v| if v == from { Some(Term::Var(to.clone())) } else { None })
    }

    /// Simultaneous substitution on free variables, no capture check.
    pub fn map_free(&self, s: &dyn Fn(&Sym) -> Option<Term>) -> Formula {
        fn go(f: &Formula, s: &dyn Fn(&Sym) -> Option<Term>, bound: &mut Vec<Sym>) -> Formula {
            match f {
                Formula::Atom(a) => Formula::Atom(Atom {
                    pred: a.pred.clone(),
                    args: a
                        .args
                        .iter()
                        .map(|t| t.subst_all(&|v| if bound.contains(v) { None } else { s(v) }))
                        .collect(),
                }),
                Formula::Tensor(a, b) => Formula::tensor(go(a, s, bound), go(b, s, bound)),
                Formula::Par(a, b) => Formula::par(go(a, s, bound), go(b, s, bound)),
                Formula::Forall(y, a) | Formula::Exists(y, a) => {
                    bound.push(y.clone());
                    let body = go(a, s, bound);
                    bound.pop();
                    match f {
                        Formula::Forall(..) => Formula::Forall(y.clone(), Box::new(body)),
                        _ => Formula::Exists(y.clone(), Box::new(body)),
                    }
                }
            }
        }
        go(self, s, &mut Vec::new())
    }

    /// α-equivalence.
    pub fn alpha_eq(&self, other: &Formula) -> bool {
        fn go(a: &Formula, b: &Formula, env: &mut Vec<(Sym, Sym)>) -> bool {
            match (a, b) {
                (Formula::Atom(x), Formula::Atom(y)) => {
                    x.pred == y.pred
                        && x.args.len() == y.args.len()
                        && x.args.iter().zip(&y.args).all(|(s, t)| term_eq(s, t, env))
                }
                (Formula::Tensor(a1, a2), Formula::Tensor(b1, b2))
                | (Formula::Par(a1, a2), Formula::Par(b1, b2)) => go(a1, b1, env) && go(a2, b2, env),
                (Formula::Forall(x, a), Formula::Forall(y, b))
                | (Formula::Exists(x, a), Formula::Exists(y, b)) => {
                    env.push((x.clone(), y.clone()));
                    let r = go(a, b, env);
                    env.pop();
                    r
                }
                _ => false,
            }
        }
        fn term_eq(s: &Term, t: &Term, env: &[(Sym, Sym)]) -> bool {
            match (s, t) {
                (Term::Var(x), Term::Var(y)) => {
                    for (bx, by) in env.iter().rev() {
                        if bx == x || by == y {
                            return bx == x && by == y;
                        }
                    }
                    x == y
                }
                (Term::App(f, a), Term::App(g, b)) => {
                    f == g && a.len() == b.len() && a.iter().zip(b).all(|(s, t)| term_eq(s, t, env))
                }
                _ => false,
            }
        }
        go(self, other, &mut Vec::new())
    }

    pub fn symbols_into(&self, out: &mut BTreeSet<Sym>) {
        match self {
            Formula::Atom(a) => a.args.iter().for_each(|t| t.symbols_into(out)),
            Formula::Forall(x, b) | Formula::Exists(x, b) => {
                out.insert(x.clone());
                b.symbols_into(out);
            }
            _ => self.children().into_iter().for_each(|c| c.symbols_into(out)),
        }
    }

    pub fn quantifier_free(&self) -> bool {
        match self {
            Formula::Atom(_) => true,
            Formula::Forall(..) | Formula::Exists(..) => false,
            Formula::Tensor(a, b) | Formula::Par(a, b) => a.quantifier_free() && b.quantifier_free(),
        }
    }
}

/// Atom address: member index (formulas first, then two per cut) and path.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LeafId {
    pub member: usize,
    pub path: Path,
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct CutSequent {
    pub formulas: Vec<Formula>,
    pub cuts: Vec<(Formula, Formula)>,
}

/// A sequent is a cut sequent with no cuts.
pub type Sequent = CutSequent;

impl CutSequent {
    pub fn new(formulas: Vec<Formula>) -> CutSequent {
        CutSequent { formulas, cuts: Vec::new() }
    }

    pub fn with_cuts(formulas: Vec<Formula>, cuts: Vec<(Formula, Formula)>) -> CutSequent {
        CutSequent { formulas, cuts }
    }

    pub fn member_count(&self) -> usize {
        self.formulas.len() + 2 * self.cuts.len()
    }

    pub fn member(&self, i: usize) -> &Formula {
        if i < self.formulas.len() {
            &self.formulas[i]
        } else {
            let j = i - self.formulas.len();
            let (l, r) = &self.cuts[j / 2];
            if j % 2 == 0 {
                l
            } else {
                r
            }
        }
    }

    pub fn members(&self) -> impl Iterator<Item = &Formula> {
        self.formulas.iter().chain(self.cuts.iter().flat_map(|(l, r)| [l, r]))
    }

    pub fn leaves(&self) -> Vec<LeafId> {
        let mut out = Vec::new();
        for (m, f) in self.members().enumerate() {
            for path in f.leaf_paths() {
                out.push(LeafId { member: m, path });
            }
        }
        out
    }

    pub fn leaf_count(&self) -> usize {
        self.members().map(Formula::leaf_count).sum()
    }

    pub fn atom_at(&self, leaf: &LeafId) -> Option<&Atom> {
        if leaf.member >= self.member_count() {
            return None;
        }
        match self.member(leaf.member).at(&leaf.path)? {
            Formula::Atom(a) => Some(a),
            _ => None,
        }
    }

    pub fn leaf_atoms(&self) -> Vec<&Atom> {
        self.members().flat_map(|f| f.atoms()).collect()
    }

    /// Number of formula nodes across all members.
    pub fn size(&self) -> usize {
        self.members().map(Formula::size).sum()
    }

    pub fn is_cut_free(&self) -> bool {
        self.cuts.is_empty()
    }

    /// Free variables of the non-cut formulas (cut variables are bound by their cut).
    pub fn free_vars(&self) -> Vec<Sym> {
        let mut out: Vec<Sym> = Vec::new();
        for f in &self.formulas {
            for v in f.free_vars() {
                if !out.contains(&v) {
                    out.push(v);
                }
            }
        }
        out
    }

    pub fn symbols(&self) -> BTreeSet<Sym> {
        let mut out = BTreeSet::new();
        self.members().for_each(|f| f.symbols_into(&mut out));
        out
    }

    /// Index of the first cut whose right formula is not α-equivalent to the dual of its left.
    pub fn malformed_cut(&self) -> Option<usize> {
        self.cuts.iter().position(|(l, r)| !r.alpha_eq(&l.dual()))
    }
}

impl fmt::Debug for CutSequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn dual_clauses() {
        assert_eq!(p("P(x) * Q(y)").dual(), p("~P(x) | ~Q(y)"));
        assert_eq!(p("all x. P(x)").dual().dual(), p("all x. P(x)"));
        assert_eq!(p("ex x. (P(x) * ~P(x))").dual(), p("all x. (~P(x) | P(x))"));
    }

    #[test]
    fn free_vars_in_order() {
        let f = p("Q(y, x) * all y. R(y, z)");
        assert_eq!(f.free_vars(), vec![Sym::new("y"), Sym::new("x"), Sym::new("z")]);
    }

    #[test]
    fn subst_detects_capture() {
        let f = p("all y. P(x, y)");
        assert!(f.subst(&Sym::new("x"), &Term::var("y")).is_none());
        assert_eq!(f.subst(&Sym::new("x"), &Term::var("z")).unwrap(), p("all y. P(z, y)"));
    }

    #[test]
    fn alpha_equivalence() {
        assert!(p("all x. P(x, z)").alpha_eq(&p("all y. P(y, z)")));
        assert!(!p("all x. P(x, z)").alpha_eq(&p("all z. P(z, z)")));
    }

    #[test]
    fn leaves_enumerate_members_then_cuts() {
        let s = parse_sequent("P(a) | Q, cut{R ; ~R}").unwrap();
        let ls = s.leaves();
        assert_eq!(ls.len(), 4);
        assert_eq!(ls[2], LeafId { member: 1, path: vec![] });
        assert_eq!(s.atom_at(&ls[3]).unwrap().pred, Predicate::new("R", false));
    }
}
