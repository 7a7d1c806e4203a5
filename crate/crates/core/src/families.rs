//! Generators for the blow-up families: `par-blowup` (the sequence A_i, whose
//! Girard witnesses double at each step), `quantifier-blowup` (the two-formula
//! sequents Γ_n, with no multiplicative connective), and `cut-chain` (n copies
//! of a small net cut against one another).

use crate::calculus::{translate, Proof};
use crate::nets::{girard_of_proof, GirardNet, Linking};
use crate::syntax::{Atom, CutSequent, Formula, Sym, Term};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    ParBlowup,
    QuantifierBlowup,
    CutChain,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::ParBlowup, Family::QuantifierBlowup, Family::CutChain];

    pub fn name(self) -> &'static str {
        match self {
            Family::ParBlowup => "par-blowup",
            Family::QuantifierBlowup => "quantifier-blowup",
            Family::CutChain => "cut-chain",
        }
    }

    pub fn min_param(self) -> usize {
        match self {
            Family::CutChain => 1,
            _ => 0,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = FamilyError;

    fn from_str(s: &str) -> Result<Family, FamilyError> {
        Family::ALL.into_iter().find(|f| f.name() == s).ok_or_else(|| FamilyError::Unknown(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("unknown family `{0}` (expected par-blowup, quantifier-blowup or cut-chain)")]
    Unknown(String),
    #[error("{family} needs a parameter of at least {min}")]
    TooSmall { family: Family, min: usize },
    #[error("{family}({n}) would have about {size} nodes, over the cap {cap}")]
    Cap { family: Family, n: usize, size: usize, cap: usize },
}

/// Generate the unique net of a family instance. Sizes are linear in `n`; the
/// cap bounds the estimated node count.
pub fn gen_family(family: Family, n: usize, cap: usize) -> Result<Linking, FamilyError> {
    if n < family.min_param() {
        return Err(FamilyError::TooSmall { family, min: family.min_param() });
    }
    let size = 16 * (n + 1);
    if size > cap {
        return Err(FamilyError::Cap { family, n, size, cap });
    }
    Ok(match family {
        Family::ParBlowup => par_blowup(n),
        Family::QuantifierBlowup => quantifier_blowup(n),
        Family::CutChain => cut_chain(n),
    })
}

fn var(s: &str) -> Term {
    Term::var(s)
}

fn dot(a: Term, b: Term) -> Term {
    Term::app("dot", vec![a, b])
}

fn exists_all(vars: impl DoubleEndedIterator<Item = Sym>, body: Formula) -> Formula {
    vars.rev().fold(body, |f, x| Formula::Exists(x, Box::new(f)))
}

/// A_i = ∃x_1…∃x_i (~P(((c·x_1)·x_2)…·x_i) ⅋ P(x_i·(…(x_1·c)))). The mgu sets
/// x_1 = c and x_{k+1} = x_k·x_k, so the axiom atoms hold 2^i copies of c.
pub fn par_blowup_formula(i: usize) -> Formula {
    let xs: Vec<Term> = (1..=i).map(|k| var(&format!("x{k}"))).collect();
    let left = xs.iter().fold(Term::constant("c"), |t, x| dot(t, x.clone()));
    let right = xs.iter().fold(Term::constant("c"), |t, x| dot(x.clone(), t));
    let body = Formula::par(Formula::atom("P", false, vec![left]), Formula::atom("P", true, vec![right]));
    exists_all((1..=i).map(|k| Sym::new(&format!("x{k}"))), body)
}

pub fn par_blowup(i: usize) -> Linking {
    Linking::new_unchecked(CutSequent::new(vec![par_blowup_formula(i)]), vec![(0, 1)])
}

/// Γ_n = ∃x1∃x3… ~P(x1, x1·x1, x3, x3·x3, …), ∃x2∃x4… P(c, x2, x2·x2, x4, …),
/// both predicates n-ary. The axiom atoms together hold 2(2^n − 1) copies of c.
pub fn quantifier_blowup_sequent(n: usize) -> CutSequent {
    let x = |k: usize| var(&format!("x{k}"));
    // Argument k (1-based): odd k pairs x_k with x_{k-1}·x_{k-1}.
    let alpha: Vec<Term> = (1..=n).map(|k| if k % 2 == 1 { x(k) } else { dot(x(k - 1), x(k - 1)) }).collect();
    let beta: Vec<Term> = (1..=n)
        .map(|k| match k {
            1 => Term::constant("c"),
            _ if k % 2 == 0 => x(k),
            _ => dot(x(k - 1), x(k - 1)),
        })
        .collect();
    let odd = (1..=n).filter(|k| k % 2 == 1).map(|k| Sym::new(&format!("x{k}")));
    let even = (1..=n).filter(|k| k % 2 == 0).map(|k| Sym::new(&format!("x{k}")));
    let a = exists_all(odd.collect::<Vec<_>>().into_iter(), Formula::Atom(Atom::new("P", false, alpha)));
    let b = exists_all(even.collect::<Vec<_>>().into_iter(), Formula::Atom(Atom::new("P", true, beta)));
    CutSequent::new(vec![a, b])
}

pub fn quantifier_blowup(n: usize) -> Linking {
    Linking::new_unchecked(quantifier_blowup_sequent(n), vec![(0, 1)])
}

/// Copy `i` of the chained net: a proof of
/// `∀x ~P(x), ∃z (P(z) ⊗ ~P(f(z,z))), ∃y P(y)` with every variable suffixed by `i`.
pub fn chain_link_proof(i: usize) -> Proof {
    let (x, z, y) = (Sym::new(&format!("x{i}")), Sym::new(&format!("z{i}")), Sym::new(&format!("y{i}")));
    let ff = |t: Term| Term::app("f", vec![t.clone(), t]);
    let xv = Term::Var(x.clone());
    let ax = |t: Term| Proof::ax(Atom::new("P", false, vec![t]));
    let tensor = Proof::Tensor { left: Box::new(ax(xv.clone())), right: Box::new(ax(ff(xv.clone()))) };
    let ex_y = Proof::Exists {
        at: 2,
        var: y.clone(),
        witness: Some(ff(xv.clone())),
        body: Formula::atom("P", true, vec![Term::Var(y)]),
        premise: Box::new(tensor),
    };
    let zv = Term::Var(z.clone());
    let ex_z = Proof::Exists {
        at: 1,
        var: z,
        witness: Some(xv),
        body: Formula::tensor(Formula::atom("P", true, vec![zv.clone()]), Formula::atom("P", false, vec![ff(zv)])),
        premise: Box::new(ex_y),
    };
    Proof::Forall { at: 0, var: x, premise: Box::new(ex_z) }
}

/// n copies, each cut from its `∃y P(y)` to the next copy's `∀x ~P(x)`.
pub fn cut_chain_proof(n: usize) -> Proof {
    (2..=n).fold(chain_link_proof(1), |acc, i| Proof::Cut { left: Box::new(acc), right: Box::new(chain_link_proof(i)) })
}

/// The unification net of [`cut_chain_proof`]: n − 1 cuts, each reduced in
/// two local steps.
pub fn cut_chain(n: usize) -> Linking {
    translate(&cut_chain_proof(n)).expect("chain proofs are well formed")
}

/// The Girard net G^n of the same proof, whose normal form holds a term with
/// 2^n variable occurrences.
pub fn girard_chain(n: usize) -> GirardNet {
    girard_of_proof(&cut_chain_proof(n.max(1))).expect("chain proofs are well formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::check_proof;
    use crate::nets::{check_correct, girard_of};

    #[test]
    fn par_blowup_base_cases() {
        assert_eq!(par_blowup_formula(0).to_string(), "~P(c) | P(c)");
        assert_eq!(par_blowup_formula(2).to_string(), "ex x1. ex x2. (~P(dot(dot(c,x1),x2)) | P(dot(x2,dot(x1,c))))");
    }

    #[test]
    fn par_blowup_girard_counts() {
        for i in 0..=8 {
            let l = par_blowup(i);
            assert!(check_correct(&l).unwrap().verdict.is_correct());
            let g = girard_of(&l, 1_000_000).unwrap();
            let atoms = g.leaf_atoms();
            assert_eq!(atoms[0].args[0].count_symbol("c"), 1 << i, "i={i}");
            let step = par_blowup(1).size() - par_blowup(0).size();
            assert_eq!(l.size(), par_blowup(0).size() + step * i);
        }
    }

    #[test]
    fn quantifier_blowup_counts() {
        assert_eq!(quantifier_blowup_sequent(4).to_string(), "ex x1. ex x3. ~P(x1,dot(x1,x1),x3,dot(x3,x3)), ex x2. ex x4. P(c,x2,dot(x2,x2),x4)");
        for n in 1..=8 {
            let l = quantifier_blowup(n);
            assert!(check_correct(&l).unwrap().verdict.is_correct());
            assert_eq!(girard_of(&l, 1_000_000).unwrap().axiom_count("c"), 2 * ((1 << n) - 1), "n={n}");
        }
    }

    #[test]
    fn chain_proofs_check() {
        for n in 1..=5 {
            let p = cut_chain_proof(n);
            let s = check_proof(&p).unwrap();
            assert_eq!(s.formulas.len(), n + 2);
            assert_eq!(s.cuts.len(), n - 1);
            assert!(check_correct(&cut_chain(n)).unwrap().verdict.is_correct());
        }
        assert_eq!(cut_chain(1).host.to_string(), "all x1. ~P(x1), ex z1. (P(z1) * ~P(f(z1,z1))), ex y1. P(y1)");
    }

    #[test]
    fn family_names() {
        for f in Family::ALL {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
        assert!(gen_family(Family::CutChain, 0, 1000).is_err());
        assert!(gen_family(Family::ParBlowup, 100, 1000).is_err());
    }
}
