use super::{CutSequent, Formula, Path, Sequent, Sym};
use std::collections::{BTreeSet, HashMap};

/// Deterministic fresh names: base name plus an increasing numeric suffix.
#[derive(Debug, Clone, Default)]
pub struct FreshSupply {
    used: BTreeSet<Sym>,
    next: HashMap<String, usize>,
}

impl FreshSupply {
    pub fn avoiding(used: BTreeSet<Sym>) -> FreshSupply {
        FreshSupply { used, next: HashMap::new() }
    }

    pub fn reserve(&mut self, s: &Sym) {
        self.used.insert(s.clone());
    }

    pub fn fresh(&mut self, base: &str) -> Sym {
        let stem = base.trim_end_matches(|c: char| c.is_ascii_digit() || c == '\'');
        let stem = if stem.is_empty() { "v" } else { stem };
        let k = self.next.entry(stem.to_string()).or_insert(1);
        loop {
            let cand = Sym::new(&format!("{stem}{k}"));
            *k += 1;
            if !self.used.contains(&cand) {
                self.used.insert(cand.clone());
                return cand;
            }
        }
    }
}

/// One bound-variable renaming performed by [`cleanse`]. `path` is the binder
/// node inside `member`; `None` marks a cut variable of the cut owning `member`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Renaming {
    pub member: usize,
    pub path: Option<Path>,
    pub from: Sym,
    pub to: Sym,
}

struct Cleaner {
    taken: BTreeSet<Sym>,
    supply: FreshSupply,
    log: Vec<Renaming>,
}

impl Cleaner {
    fn formula(&mut self, f: &Formula, member: usize, path: &mut Path) -> Formula {
        match f {
            Formula::Atom(_) => f.clone(),
            Formula::Tensor(a, b) | Formula::Par(a, b) => {
                path.push(0);
                let a = self.formula(a, member, path);
                path.pop();
                path.push(1);
                let b = self.formula(b, member, path);
                path.pop();
                if matches!(f, Formula::Tensor(..)) {
                    Formula::tensor(a, b)
                } else {
                    Formula::par(a, b)
                }
            }
            Formula::Forall(x, body) | Formula::Exists(x, body) => {
                let (x2, body2) = if self.taken.contains(x) {
                    let y = self.supply.fresh(x.as_str());
                    self.log.push(Renaming { member, path: Some(path.clone()), from: x.clone(), to: y.clone() });
                    let b = body.rename_free(x, &y);
                    (y, b)
                } else {
                    (x.clone(), (**body).clone())
                };
                self.taken.insert(x2.clone());
                path.push(0);
                let b = self.formula(&body2, member, path);
                path.pop();
                if matches!(f, Formula::Forall(..)) {
                    Formula::Forall(x2, Box::new(b))
                } else {
                    Formula::Exists(x2, Box::new(b))
                }
            }
        }
    }
}

/// Rename bound variables (and cut variables) so that all are pairwise distinct
/// and distinct from the free variables.
pub fn cleanse(s: &CutSequent) -> (CutSequent, Vec<Renaming>) {
    let mut c = Cleaner {
        taken: s.free_vars().into_iter().collect(),
        supply: FreshSupply::avoiding(s.symbols()),
        log: Vec::new(),
    };
    let mut out = CutSequent::default();
    for (m, f) in s.formulas.iter().enumerate() {
        out.formulas.push(c.formula(f, m, &mut Vec::new()));
    }
    let nf = s.formulas.len();
    for (i, (l, r)) in s.cuts.iter().enumerate() {
        let (mut l, mut r) = (l.clone(), r.clone());
        let mut vars = l.free_vars();
        for v in r.free_vars() {
            if !vars.contains(&v) {
                vars.push(v);
            }
        }
        for v in vars {
            if c.taken.contains(&v) {
                let y = c.supply.fresh(v.as_str());
                c.log.push(Renaming { member: nf + 2 * i, path: None, from: v.clone(), to: y.clone() });
                l = l.rename_free(&v, &y);
                r = r.rename_free(&v, &y);
                c.taken.insert(y);
            } else {
                c.taken.insert(v);
            }
        }
        let l = c.formula(&l, nf + 2 * i, &mut Vec::new());
        let r = c.formula(&r, nf + 2 * i + 1, &mut Vec::new());
        out.cuts.push((l, r));
    }
    (out, c.log)
}

pub fn is_clean(s: &CutSequent) -> bool {
    cleanse(s).1.is_empty()
}

/// Replace each cut (A, B) by the existentially closed tensor over the free
/// variables of A, in first-occurrence order. Leaf order is unchanged.
pub fn encode_cuts(s: &CutSequent) -> Sequent {
    let mut formulas = s.formulas.clone();
    for (l, r) in &s.cuts {
        let mut f = Formula::tensor(l.clone(), r.clone());
        for x in l.free_vars().into_iter().rev() {
            f = Formula::Exists(x, Box::new(f));
        }
        formulas.push(f);
    }
    CutSequent::new(formulas)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_sequent;

    fn seq(s: &str) -> CutSequent {
        parse_sequent(s).unwrap()
    }

    #[test]
    fn cleanse_examples() {
        let (c, log) = cleanse(&seq("ex x. P(x), all x. Q(z,x)"));
        assert_eq!(c, seq("ex x. P(x), all x1. Q(z,x1)"));
        assert_eq!(log.len(), 1);
        let s = seq("ex x. P(x), all y. Q(z,y)");
        assert_eq!(cleanse(&s).0, s);
        assert_eq!(cleanse(&seq("ex x. P(x), Q(x)")).0, seq("ex x1. P(x1), Q(x)"));
    }

    #[test]
    fn cleanse_cut_variables() {
        let (c, _) = cleanse(&seq("Q(x), cut{P(x) ; ~P(x)}, cut{ex y. R(y) ; all y. ~R(y)}"));
        assert_eq!(c, seq("Q(x), cut{P(x1) ; ~P(x1)}, cut{ex y. R(y) ; all y1. ~R(y1)}"));
        assert!(is_clean(&c));
        assert_eq!(cleanse(&c).0, c);
    }

    #[test]
    fn encoding() {
        let e = encode_cuts(&seq("Q, cut{P(y) ; ~P(y)}"));
        assert_eq!(e, seq("Q, ex y. (P(y) * ~P(y))"));
        let e = encode_cuts(&seq("cut{R ; ~R}"));
        assert_eq!(e, seq("R * ~R"));
        let e = encode_cuts(&seq("cut{Q(x,y) ; ~Q(x,y)}"));
        assert_eq!(e, seq("ex x. ex y. (Q(x,y) * ~Q(x,y))"));
    }

    #[test]
    fn encoding_preserves_leaves() {
        let s = seq("P(a) | Q, cut{ex x. (R(x) * S) ; all x. (~R(x) | ~S)}");
        let e = encode_cuts(&s);
        let la: Vec<_> = s.leaf_atoms().into_iter().cloned().collect();
        let lb: Vec<_> = e.leaf_atoms().into_iter().cloned().collect();
        assert_eq!(la, lb);
    }
}
