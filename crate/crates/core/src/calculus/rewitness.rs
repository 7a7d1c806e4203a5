use super::{rule_conclusion, Proof, ProofError, WitnessAssignment};
use crate::syntax::{CutSequent, Formula, Sym, Term};
use crate::unify::{precedences, unify, EquationSet, VarClass};
use std::collections::BTreeSet;
use thiserror::Error;

/// A rewritten derivation that failed to check.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("result is not a proof: {error}")]
pub struct IllFormed {
    pub proof: Proof,
    pub error: ProofError,
}

/// A tracked term occurrence inside a conclusion member.
#[derive(Debug, Clone)]
struct Pos {
    member: usize,
    fpath: Vec<u8>,
    arg: usize,
    tpath: Vec<usize>,
    term: Term,
}

struct Tree {
    concl: CutSequent,
    kids: Vec<Tree>,
}

fn conclusions(p: &Proof) -> Result<Tree, ProofError> {
    fn go(p: &Proof, addr: &mut Vec<usize>) -> Result<Tree, ProofError> {
        let mut kids = Vec::new();
        for (i, q) in p.premises().into_iter().enumerate() {
            addr.push(i);
            kids.push(go(q, addr)?);
            addr.pop();
        }
        let concl = rule_conclusion(p, kids.iter().map(|k| k.concl.clone()).collect(), true, addr)?;
        Ok(Tree { concl, kids })
    }
    go(p, &mut Vec::new())
}

fn set_in_term(t: &mut Term, path: &[usize], new: &Term) {
    match path.split_first() {
        None => *t = new.clone(),
        Some((&i, rest)) => {
            if let Term::App(_, args) = t {
                set_in_term(&mut args[i], rest, new);
            }
        }
    }
}

fn set_in_formula(f: &mut Formula, pos: &Pos, fpath: &[u8]) {
    if let Some(Formula::Atom(a)) = f.at_mut(fpath) {
        set_in_term(&mut a.args[pos.arg], &pos.tpath, &pos.term);
    }
}

/// Paths to the free occurrences of `x` in `f`.
fn occurrences(f: &Formula, x: &Sym) -> Vec<(Vec<u8>, usize, Vec<usize>)> {
    fn term(t: &Term, x: &Sym, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        match t {
            Term::Var(v) if v == x => out.push(path.clone()),
            Term::Var(_) => {}
            Term::App(_, args) => {
                for (i, a) in args.iter().enumerate() {
                    path.push(i);
                    term(a, x, path, out);
                    path.pop();
                }
            }
        }
    }
    fn go(f: &Formula, x: &Sym, fp: &mut Vec<u8>, out: &mut Vec<(Vec<u8>, usize, Vec<usize>)>) {
        match f {
            Formula::Atom(a) => {
                for (i, t) in a.args.iter().enumerate() {
                    let mut ps = Vec::new();
                    term(t, x, &mut Vec::new(), &mut ps);
                    out.extend(ps.into_iter().map(|p| (fp.clone(), i, p)));
                }
            }
            Formula::Forall(y, _) | Formula::Exists(y, _) if y == x => {}
            _ => {
                for (i, c) in f.children().into_iter().enumerate() {
                    fp.push(i as u8);
                    go(c, x, fp, out);
                    fp.pop();
                }
            }
        }
    }
    let mut out = Vec::new();
    go(f, x, &mut Vec::new(), &mut out);
    out
}

fn moved(p: &Pos, member: usize, fpath: &[u8]) -> Pos {
    Pos { member, fpath: fpath.to_vec(), ..p.clone() }
}

/// Positions in the conclusion mapped to positions in each premise.
fn lift(p: &Proof, t: &Tree, tracked: &[Pos]) -> Vec<Vec<Pos>> {
    let mut out: Vec<Vec<Pos>> = vec![Vec::new(); t.kids.len()];
    for pos in tracked {
        let (slot, q) = match p {
            Proof::Par { at, .. } => {
                let m = pos.member;
                if m == *at {
                    (0, moved(pos, at + pos.fpath[0] as usize, &pos.fpath[1..]))
                } else if m < *at {
                    (0, pos.clone())
                } else {
                    (0, moved(pos, m + 1, &pos.fpath))
                }
            }
            Proof::Exists { at, .. } | Proof::Forall { at, .. } if pos.member == *at => {
                (0, moved(pos, *at, &pos.fpath[1..]))
            }
            Proof::Exists { .. } | Proof::Forall { .. } => (0, pos.clone()),
            Proof::Tensor { .. } => {
                let f0 = t.kids[0].concl.formulas.len();
                let m = pos.member;
                if m + 1 < f0 {
                    (0, pos.clone())
                } else if m + 1 == f0 {
                    if pos.fpath[0] == 0 {
                        (0, moved(pos, m, &pos.fpath[1..]))
                    } else {
                        (1, moved(pos, 0, &pos.fpath[1..]))
                    }
                } else {
                    (1, moved(pos, m + 1 - f0, &pos.fpath))
                }
            }
            Proof::Perm { order, .. } => (0, moved(pos, order[pos.member], &pos.fpath)),
            Proof::Ax { .. } | Proof::Cut { .. } | Proof::ExtendedCut { .. } => continue,
        };
        out[slot].push(q);
    }
    out
}

fn rewrite(p: &Proof, t: &Tree, mut tracked: Vec<Pos>, a: &dyn Fn(&Sym) -> Option<Term>) -> Proof {
    let mut node = p.clone();
    match &mut node {
        Proof::Ax { left, right } => {
            for pos in &tracked {
                let atom = if pos.member == 0 { &mut *left } else { &mut *right };
                set_in_term(&mut atom.args[pos.arg], &pos.tpath, &pos.term);
            }
            return node;
        }
        Proof::Exists { at, var, witness, body, .. } => {
            for pos in tracked.iter().filter(|q| q.member == *at) {
                set_in_formula(body, pos, &pos.fpath[1..]);
            }
            if witness.is_some() {
                if let Some(w) = a(var) {
                    *witness = Some(w.clone());
                    for (fp, arg, tp) in occurrences(body, var) {
                        let mut full = vec![0u8];
                        full.extend(fp);
                        tracked.push(Pos { member: *at, fpath: full, arg, tpath: tp, term: w.clone() });
                    }
                }
            }
        }
        _ => {}
    }
    let lifted = lift(&node, t, &tracked);
    for ((q, kt), ps) in node.premises_mut().into_iter().zip(&t.kids).zip(lifted) {
        *q = rewrite(q, kt, ps, a);
    }
    node
}

fn rewrite_all(p: &Proof, a: &dyn Fn(&Sym) -> Option<Term>) -> Result<Proof, ProofError> {
    if !p.is_cut_free() {
        return Err(ProofError { address: vec![], rule: p.rule_name(), reason: "proof has cuts".into() });
    }
    let t = conclusions(p)?;
    Ok(rewrite(p, &t, Vec::new(), a))
}

/// Replace the witness of each assigned existential throughout its scope.
pub fn rewitness(p: &Proof, a: &WitnessAssignment) -> Result<Proof, IllFormed> {
    let q = rewrite_all(p, &|v| a.get(v).cloned()).map_err(|error| IllFormed { proof: p.clone(), error })?;
    match q.conclusion() {
        Ok(_) => Ok(q),
        Err(error) => Err(IllFormed { proof: q, error }),
    }
}

/// Erase witnesses: every non-vacuous existential is witnessed by its own variable.
pub fn skeleton(p: &Proof) -> Proof {
    rewrite_all(p, &|v| Some(Term::Var(v.clone()))).unwrap_or_else(|_| p.clone())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UnificationVerdict {
    Valid,
    Invalid(String),
}

impl UnificationVerdict {
    pub fn is_valid(&self) -> bool {
        *self == UnificationVerdict::Valid
    }
}

/// Decide whether a witness-erased derivation is the skeleton of a proof:
/// the axiom equations must unify and no eigenvariable may flow, through the
/// mgu, into an existential that is free where its universal is introduced.
pub fn verify_unification_proof(u: &Proof) -> UnificationVerdict {
    let t = match conclusions(u) {
        Ok(t) => t,
        Err(e) => return UnificationVerdict::Invalid(e.to_string()),
    };
    let mut eqs = EquationSet::default();
    let mut foralls: Vec<(usize, Sym, CutSequent)> = Vec::new();
    fn walk(p: &Proof, t: &Tree, eqs: &mut EquationSet, foralls: &mut Vec<(usize, Sym, CutSequent)>) {
        match p {
            Proof::Ax { left, right } => {
                for (s, r) in left.args.iter().zip(&right.args) {
                    eqs.push(s.clone(), r.clone());
                }
            }
            Proof::Exists { var, witness: Some(Term::Var(w)), .. } if w == var => {
                eqs.classes.insert(var.clone(), VarClass::Existential);
            }
            Proof::Forall { at, var, .. } => {
                eqs.classes.insert(var.clone(), VarClass::Universal);
                foralls.push((*at, var.clone(), t.kids[0].concl.clone()));
            }
            _ => {}
        }
        for (q, k) in p.premises().into_iter().zip(&t.kids) {
            walk(q, k, eqs, foralls);
        }
    }
    walk(u, &t, &mut eqs, &mut foralls);
    for f in t.concl.members() {
        let mut names = BTreeSet::new();
        f.symbols_into(&mut names);
        eqs.reserved.extend(names);
    }
    let mgu = match unify(&eqs) {
        Ok(m) => m,
        Err(e) => return UnificationVerdict::Invalid(format!("axioms are not unifiable: {e}")),
    };
    let precs: BTreeSet<(Sym, Sym)> =
        precedences(&mgu).into_iter().map(|p| (p.existential, p.universal)).collect();
    for (_, y, premise) in &foralls {
        for f in &premise.formulas {
            for v in f.free_vars() {
                if precs.contains(&(v.clone(), y.clone())) {
                    return UnificationVerdict::Invalid(format!(
                        "the mgu assigns {v} a term containing eigenvariable {y}, but {v} is free where {y} is introduced"
                    ));
                }
            }
        }
    }
    UnificationVerdict::Valid
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{check_proof, parse_proof, translate};
    use crate::syntax::parse_term;

    const LEFT: &str = "(exists 0 x f(c) (~P(x)) (exists 1 y f(c) (P(y)) (ax ~P(f(c)))))";

    fn assign(pairs: &[(&str, &str)]) -> WitnessAssignment {
        pairs.iter().map(|(x, t)| (Sym::new(x), parse_term(t).unwrap())).collect()
    }

    #[test]
    fn partial_rewitness_is_ill_formed() {
        let p = parse_proof(LEFT).unwrap();
        let e = rewitness(&p, &assign(&[("x", "h(z,b)")])).unwrap_err();
        assert_eq!(e.error.rule, "ax");
        match e.proof.at(&[0, 0]).unwrap() {
            Proof::Ax { left, right } => {
                assert_eq!(left.to_string(), "~P(h(z,b))");
                assert_eq!(right.to_string(), "P(f(c))");
            }
            q => panic!("{q}"),
        }
    }

    #[test]
    fn joint_rewitness_is_a_proof() {
        let p = parse_proof(LEFT).unwrap();
        let q = rewitness(&p, &assign(&[("x", "h(z,b)"), ("y", "h(z,b)")])).unwrap();
        assert_eq!(check_proof(&q).unwrap(), check_proof(&p).unwrap());
        assert_eq!(translate(&q).unwrap(), translate(&p).unwrap());
        assert_eq!(skeleton(&q), skeleton(&p));
    }

    #[test]
    fn empty_assignment_is_identity() {
        let p = parse_proof(LEFT).unwrap();
        assert_eq!(rewitness(&p, &WitnessAssignment::new()).unwrap(), p);
    }

    #[test]
    fn skeleton_erases_witnesses() {
        let s = skeleton(&parse_proof(LEFT).unwrap());
        match s.at(&[0, 0]).unwrap() {
            Proof::Ax { left, right } => assert_eq!(format!("{left} {right}"), "~P(x) P(y)"),
            q => panic!("{q}"),
        }
        assert!(verify_unification_proof(&s).is_valid());
        let no_ex = parse_proof("(par 0 (ax P(a)))").unwrap();
        assert_eq!(skeleton(&no_ex), no_ex);
    }

    #[test]
    fn clashing_axiom_is_invalid() {
        let u = parse_proof("(ax P(a) ~P(b))").unwrap();
        assert!(!verify_unification_proof(&u).is_valid());
    }

    #[test]
    fn eigenvariable_escape_is_invalid() {
        // Skeleton for the unprovable prenex extrusion instance.
        let u = parse_proof(
            "(exists 1 y y (P | Q(y)) (par 1 (perm (1 0 2) (tensor (ax P) (forall 0 x (ax ~Q(x) Q(y)))))))",
        )
        .unwrap();
        assert!(u.shape_conclusion().is_ok());
        assert!(!verify_unification_proof(&u).is_valid());
    }
}
