//! Sequent-calculus proofs: checking, translation to linkings, witness
//! replacement, skeletons, rule commutations and equivalence.

mod commute;
mod rewitness;
mod sexpr;

pub use commute::{apply_commutation, commutation_sites, equivalent, CommuteError, EquivalenceError};
pub use rewitness::{rewitness, skeleton, verify_unification_proof, IllFormed, UnificationVerdict};
pub use sexpr::parse_proof;

use crate::nets::Linking;
use crate::syntax::{Atom, CutSequent, Formula, Sym, Term};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// Address of a rule: premise slots from the root.
pub type Address = Vec<usize>;

/// Map from existential variables to replacement witnesses.
pub type WitnessAssignment = BTreeMap<Sym, Term>;

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Proof {
    /// Concludes `left, right`; a proof requires `right = dual(left)`.
    Ax { left: Atom, right: Atom },
    /// Members `at` and `at+1` become their par.
    Par { at: usize, premise: Box<Proof> },
    /// Last formula of `left` tensored with the first of `right`.
    Tensor { left: Box<Proof>, right: Box<Proof> },
    /// Premise has `body[witness/var]` at `at`; `None` marks a vacuous quantifier.
    Exists { at: usize, var: Sym, witness: Option<Term>, body: Formula, premise: Box<Proof> },
    Forall { at: usize, var: Sym, premise: Box<Proof> },
    /// Cuts the last formula of `left` against the first of `right`, keeping the pair.
    Cut { left: Box<Proof>, right: Box<Proof> },
    /// Like `Cut`, but the hypotheses are `A sigma` and `B sigma` for the cut pair `(A, B)`.
    ExtendedCut { subst: Vec<(Sym, Term)>, cut: (Formula, Formula), left: Box<Proof>, right: Box<Proof> },
    /// Conclusion formula `m` is premise formula `order[m]`; entries past the
    /// formulas, when present, permute the cut pairs the same way.
    Perm { order: Vec<usize>, premise: Box<Proof> },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{rule} rule at {address:?}: {reason}")]
pub struct ProofError {
    pub address: Address,
    pub rule: &'static str,
    pub reason: String,
}

impl Proof {
    pub fn ax(a: Atom) -> Proof {
        Proof::Ax { right: a.dual(), left: a }
    }

    pub fn rule_name(&self) -> &'static str {
        match self {
            Proof::Ax { .. } => "ax",
            Proof::Par { .. } => "par",
            Proof::Tensor { .. } => "tensor",
            Proof::Exists { .. } => "exists",
            Proof::Forall { .. } => "forall",
            Proof::Cut { .. } => "cut",
            Proof::ExtendedCut { .. } => "xcut",
            Proof::Perm { .. } => "perm",
        }
    }

    pub fn premises(&self) -> Vec<&Proof> {
        match self {
            Proof::Ax { .. } => vec![],
            Proof::Par { premise, .. }
            | Proof::Exists { premise, .. }
            | Proof::Forall { premise, .. }
            | Proof::Perm { premise, .. } => vec![premise],
            Proof::Tensor { left, right } | Proof::Cut { left, right } | Proof::ExtendedCut { left, right, .. } => {
                vec![left, right]
            }
        }
    }

    pub fn premises_mut(&mut self) -> Vec<&mut Proof> {
        match self {
            Proof::Ax { .. } => vec![],
            Proof::Par { premise, .. }
            | Proof::Exists { premise, .. }
            | Proof::Forall { premise, .. }
            | Proof::Perm { premise, .. } => vec![premise],
            Proof::Tensor { left, right } | Proof::Cut { left, right } | Proof::ExtendedCut { left, right, .. } => {
                vec![left, right]
            }
        }
    }

    pub fn at(&self, addr: &[usize]) -> Option<&Proof> {
        let mut p = self;
        for &i in addr {
            p = *p.premises().get(i)?;
        }
        Some(p)
    }

    pub fn at_mut(&mut self, addr: &[usize]) -> Option<&mut Proof> {
        let mut p = self;
        for &i in addr {
            p = p.premises_mut().into_iter().nth(i)?;
        }
        Some(p)
    }

    /// Number of rule instances.
    pub fn size(&self) -> usize {
        1 + self.premises().into_iter().map(Proof::size).sum::<usize>()
    }

    /// Addresses of all rules in preorder.
    pub fn addresses(&self) -> Vec<Address> {
        fn go(p: &Proof, a: &mut Address, out: &mut Vec<Address>) {
            out.push(a.clone());
            for (i, q) in p.premises().into_iter().enumerate() {
                a.push(i);
                go(q, a, out);
                a.pop();
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn is_cut_free(&self) -> bool {
        !matches!(self, Proof::Cut { .. } | Proof::ExtendedCut { .. })
            && self.premises().into_iter().all(Proof::is_cut_free)
    }

    /// The concluding cut sequent, checking every rule.
    pub fn conclusion(&self) -> Result<CutSequent, ProofError> {
        conclude(self, false, &mut Vec::new())
    }

    /// As [`Proof::conclusion`], but axioms need only be linkable.
    pub fn shape_conclusion(&self) -> Result<CutSequent, ProofError> {
        conclude(self, true, &mut Vec::new())
    }
}

pub fn check_proof(p: &Proof) -> Result<CutSequent, ProofError> {
    p.conclusion()
}

fn err(addr: &[usize], p: &Proof, reason: impl Into<String>) -> ProofError {
    ProofError { address: addr.to_vec(), rule: p.rule_name(), reason: reason.into() }
}

pub(crate) fn apply_subst(f: &Formula, subst: &[(Sym, Term)]) -> Option<Formula> {
    let binders = f.binders();
    for (_, t) in subst {
        let mut vs = Vec::new();
        t.vars_into(&mut vs);
        if vs.iter().any(|v| binders.contains(v)) {
            return None;
        }
    }
    Some(f.map_free(&|v| subst.iter().find(|(x, _)| x == v).map(|(_, t)| t.clone())))
}

fn conclude(p: &Proof, shape_only: bool, addr: &mut Address) -> Result<CutSequent, ProofError> {
    let mut prem = Vec::new();
    for (i, q) in p.premises().into_iter().enumerate() {
        addr.push(i);
        prem.push(conclude(q, shape_only, addr)?);
        addr.pop();
    }
    rule_conclusion(p, prem, shape_only, addr)
}

/// Conclusion of a single rule given its premises' conclusions.
pub(crate) fn rule_conclusion(
    p: &Proof,
    mut prem: Vec<CutSequent>,
    shape_only: bool,
    addr: &[usize],
) -> Result<CutSequent, ProofError> {
    let e = |r: String| err(addr, p, r);
    match p {
        Proof::Ax { left, right } => {
            if shape_only {
                if !left.linkable(right) {
                    return Err(e(format!("{left} and {right} are not linkable")));
                }
            } else if *right != left.dual() {
                return Err(e(format!("{left} and {right} are not dual")));
            }
            Ok(CutSequent::new(vec![Formula::Atom(left.clone()), Formula::Atom(right.clone())]))
        }
        Proof::Par { at, .. } => {
            let mut s = prem.pop().unwrap();
            if at + 1 >= s.formulas.len() {
                return Err(e(format!("position {at} out of range")));
            }
            let b = s.formulas.remove(at + 1);
            let a = s.formulas.remove(*at);
            s.formulas.insert(*at, Formula::par(a, b));
            Ok(s)
        }
        Proof::Tensor { .. } => {
            let r = prem.pop().unwrap();
            let mut l = prem.pop().unwrap();
            if l.formulas.is_empty() || r.formulas.is_empty() {
                return Err(e("a premise has no formula".into()));
            }
            let a = l.formulas.pop().unwrap();
            let mut rf = r.formulas.into_iter();
            let b = rf.next().unwrap();
            l.formulas.push(Formula::tensor(a, b));
            l.formulas.extend(rf);
            l.cuts.extend(r.cuts);
            Ok(l)
        }
        Proof::Exists { at, var, witness, body, .. } => {
            let mut s = prem.pop().unwrap();
            let Some(m) = s.formulas.get(*at) else {
                return Err(e(format!("position {at} out of range")));
            };
            let expected = match witness {
                Some(t) => body.subst(var, t).ok_or_else(|| e(format!("witness {t} is captured in {body}")))?,
                None => {
                    if body.has_free(var) {
                        return Err(e(format!("vacuous marker but {var} occurs in {body}")));
                    }
                    body.clone()
                }
            };
            if !m.alpha_eq(&expected) {
                return Err(e(format!("premise has {m}, expected {expected}")));
            }
            s.formulas[*at] = Formula::Exists(var.clone(), Box::new(body.clone()));
            Ok(s)
        }
        Proof::Forall { at, var, .. } => {
            let mut s = prem.pop().unwrap();
            if *at >= s.formulas.len() {
                return Err(e(format!("position {at} out of range")));
            }
            if let Some(f) = s.formulas.iter().enumerate().find(|(i, f)| i != at && f.has_free(var)) {
                return Err(e(format!("eigenvariable {var} is free in {}", f.1)));
            }
            let a = s.formulas[*at].clone();
            s.formulas[*at] = Formula::Forall(var.clone(), Box::new(a));
            Ok(s)
        }
        Proof::Cut { .. } | Proof::ExtendedCut { .. } => {
            let r = prem.pop().unwrap();
            let mut l = prem.pop().unwrap();
            if l.formulas.is_empty() || r.formulas.is_empty() {
                return Err(e("a premise has no formula".into()));
            }
            let a = l.formulas.pop().unwrap();
            let mut rf = r.formulas.into_iter();
            let b = rf.next().unwrap();
            let pair = match p {
                Proof::ExtendedCut { subst, cut: (ca, cb), .. } => {
                    if !cb.alpha_eq(&ca.dual()) {
                        return Err(e(format!("{ca} and {cb} are not dual")));
                    }
                    let fv = {
                        let mut v = ca.free_vars();
                        v.extend(cb.free_vars());
                        v
                    };
                    if let Some((x, _)) = subst.iter().find(|(x, _)| !fv.contains(x)) {
                        return Err(e(format!("{x} is not free in the cut formulas")));
                    }
                    let sa = apply_subst(ca, subst).ok_or_else(|| e("substitution is captured".into()))?;
                    let sb = apply_subst(cb, subst).ok_or_else(|| e("substitution is captured".into()))?;
                    if !a.alpha_eq(&sa) {
                        return Err(e(format!("left hypothesis {a}, expected {sa}")));
                    }
                    if !b.alpha_eq(&sb) {
                        return Err(e(format!("right hypothesis {b}, expected {sb}")));
                    }
                    (ca.clone(), cb.clone())
                }
                _ => {
                    if !b.alpha_eq(&a.dual()) {
                        return Err(e(format!("{a} and {b} are not dual")));
                    }
                    (a, b)
                }
            };
            l.formulas.extend(rf);
            l.cuts.extend(r.cuts);
            l.cuts.push(pair);
            Ok(l)
        }
        Proof::Perm { order, .. } => {
            let s = prem.pop().unwrap();
            let (nf, nc) = (s.formulas.len(), s.cuts.len());
            if order.len() != nf && order.len() != nf + nc {
                return Err(e(format!("order has {} entries for {nf} formulas and {nc} cuts", order.len())));
            }
            let is_perm = |o: &[usize], n: usize| {
                let mut seen = vec![false; n];
                o.iter().all(|&i| i < n && !std::mem::replace(&mut seen[i], true))
            };
            let (fo, co) = order.split_at(nf.min(order.len()));
            if !is_perm(fo, nf) || (!co.is_empty() && !is_perm(co, nc)) {
                return Err(e(format!("{order:?} is not a permutation")));
            }
            let formulas = fo.iter().map(|&i| s.formulas[i].clone()).collect();
            let cuts = if co.is_empty() { s.cuts.clone() } else { co.iter().map(|&i| s.cuts[i].clone()).collect() };
            Ok(CutSequent { formulas, cuts })
        }
    }
}

/// Where each premise member lands: (conclusion member, leaf offset in it).
fn member_targets(p: &Proof, prem: &[CutSequent]) -> Vec<Vec<(usize, usize)>> {
    let fcount = |s: &CutSequent| s.formulas.len();
    let cut_items = |s: &CutSequent| 2 * s.cuts.len();
    match p {
        Proof::Ax { .. } => vec![],
        Proof::Par { at, .. } => {
            let s = &prem[0];
            let nf = fcount(s);
            let shift = s.formulas[*at].leaf_count();
            let mut v: Vec<(usize, usize)> = (0..nf)
                .map(|m| match m {
                    m if m <= *at => (m, 0),
                    m if m == at + 1 => (*at, shift),
                    m => (m - 1, 0),
                })
                .collect();
            v.extend((0..cut_items(s)).map(|t| (nf - 1 + t, 0)));
            vec![v]
        }
        Proof::Exists { .. } | Proof::Forall { .. } => {
            let s = &prem[0];
            vec![(0..fcount(s) + cut_items(s)).map(|m| (m, 0)).collect()]
        }
        Proof::Tensor { .. } => {
            let (l, r) = (&prem[0], &prem[1]);
            let (f0, f1) = (fcount(l), fcount(r));
            let nf = f0 + f1 - 1;
            let shift = l.formulas[f0 - 1].leaf_count();
            let mut lv: Vec<(usize, usize)> = (0..f0).map(|m| (m, 0)).collect();
            lv.extend((0..cut_items(l)).map(|t| (nf + t, 0)));
            let mut rv: Vec<(usize, usize)> =
                (0..f1).map(|m| if m == 0 { (f0 - 1, shift) } else { (f0 - 1 + m, 0) }).collect();
            rv.extend((0..cut_items(r)).map(|t| (nf + cut_items(l) + t, 0)));
            vec![lv, rv]
        }
        Proof::Cut { .. } | Proof::ExtendedCut { .. } => {
            let (l, r) = (&prem[0], &prem[1]);
            let (f0, f1) = (fcount(l), fcount(r));
            let nf = f0 + f1 - 2;
            let new = nf + cut_items(l) + cut_items(r);
            let mut lv: Vec<(usize, usize)> = (0..f0).map(|m| if m == f0 - 1 { (new, 0) } else { (m, 0) }).collect();
            lv.extend((0..cut_items(l)).map(|t| (nf + t, 0)));
            let mut rv: Vec<(usize, usize)> =
                (0..f1).map(|m| if m == 0 { (new + 1, 0) } else { (f0 + m - 2, 0) }).collect();
            rv.extend((0..cut_items(r)).map(|t| (nf + cut_items(l) + t, 0)));
            vec![lv, rv]
        }
        Proof::Perm { order, .. } => {
            let s = &prem[0];
            let nf = fcount(s);
            let mut v = vec![(0, 0); nf + cut_items(s)];
            for (m, &i) in order.iter().enumerate().take(nf) {
                v[i] = (m, 0);
            }
            for c in 0..s.cuts.len() {
                let src = if order.len() > nf { order[nf + c] } else { c };
                v[nf + 2 * src] = (nf + 2 * c, 0);
                v[nf + 2 * src + 1] = (nf + 2 * c + 1, 0);
            }
            vec![v]
        }
    }
}

fn leaf_starts(s: &CutSequent) -> Vec<usize> {
    let mut out = Vec::with_capacity(s.member_count() + 1);
    let mut k = 0;
    for f in s.members() {
        out.push(k);
        k += f.leaf_count();
    }
    out.push(k);
    out
}

/// For each premise, the conclusion leaf index of each premise leaf.
pub(crate) fn leaf_maps(p: &Proof, prem: &[CutSequent], concl: &CutSequent) -> Vec<Vec<usize>> {
    let starts = leaf_starts(concl);
    member_targets(p, prem)
        .into_iter()
        .zip(prem)
        .map(|(targets, s)| {
            let mut out = Vec::with_capacity(s.leaf_count());
            for (f, (m, off)) in s.members().zip(targets) {
                for i in 0..f.leaf_count() {
                    out.push(starts[m] + off + i);
                }
            }
            out
        })
        .collect()
}

/// Conclusion plus links as conclusion leaf pairs, in axiom order.
pub(crate) fn trace_links(p: &Proof) -> Result<(CutSequent, Vec<(usize, usize)>), ProofError> {
    fn go(p: &Proof, addr: &mut Address) -> Result<(CutSequent, Vec<(usize, usize)>), ProofError> {
        if let Proof::Ax { .. } = p {
            return Ok((conclude(p, true, addr)?, vec![(0, 1)]));
        }
        let mut prem = Vec::new();
        let mut links = Vec::new();
        for (i, q) in p.premises().into_iter().enumerate() {
            addr.push(i);
            let (s, l) = go(q, addr)?;
            addr.pop();
            prem.push(s);
            links.push(l);
        }
        let concl = rule_conclusion(p, prem.clone(), true, addr)?;
        let maps = leaf_maps(p, &prem, &concl);
        let mut out = Vec::new();
        for (ls, map) in links.into_iter().zip(maps) {
            out.extend(ls.into_iter().map(|(a, b)| (map[a], map[b])));
        }
        Ok((concl, out))
    }
    go(p, &mut Vec::new())
}

/// The linking obtained by tracking each axiom's atom pair down to the conclusion.
pub fn translate(p: &Proof) -> Result<Linking, ProofError> {
    let (host, links) = trace_links(p)?;
    Ok(Linking::new_unchecked(host, links))
}

impl fmt::Display for Proof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&sexpr::print_proof(self))
    }
}

impl fmt::Debug for Proof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nets::check_correct;
    use crate::syntax::parse_sequent;

    /// The cut-free proof of `all x. ~P(f(x)), ex z. (P(z) * (~Q(z) | Q(z)))`.
    pub(crate) const FIG3: &str = "
        (forall 0 x
          (exists 1 z f(x) (P(z) * (~Q(z) | Q(z)))
            (tensor (ax ~P(f(x)))
              (par 0 (ax ~Q(f(x)))))))";

    #[test]
    fn fig3_checks_and_translates() {
        let p = parse_proof(FIG3).unwrap();
        let s = check_proof(&p).unwrap();
        assert_eq!(s, parse_sequent("all x. ~P(f(x)), ex z. (P(z) * (~Q(z) | Q(z)))").unwrap());
        let l = translate(&p).unwrap();
        assert_eq!(l.links, vec![(0, 1), (2, 3)]);
        assert!(check_correct(&l).unwrap().verdict.is_correct());
    }

    #[test]
    fn single_axiom() {
        let p = parse_proof("(ax P(a))").unwrap();
        assert_eq!(check_proof(&p).unwrap(), parse_sequent("P(a), ~P(a)").unwrap());
        assert_eq!(translate(&p).unwrap().links, vec![(0, 1)]);
    }

    #[test]
    fn eigenvariable_condition() {
        let p = parse_proof("(forall 0 x (ax P(x)))").unwrap();
        let e = check_proof(&p).unwrap_err();
        assert_eq!(e.rule, "forall");
        assert!(e.reason.contains("eigenvariable"));
    }

    #[test]
    fn non_dual_axiom_is_rejected() {
        let p = parse_proof("(ax P(a) ~P(b))").unwrap();
        assert!(check_proof(&p).is_err());
        assert!(p.shape_conclusion().is_ok());
    }

    #[test]
    fn cut_tracks_into_the_pair() {
        let p = parse_proof("(cut (ax P(a)) (ax P(a)))").unwrap();
        let l = translate(&p).unwrap();
        assert_eq!(l.host, parse_sequent("P(a), ~P(a), cut{~P(a) ; P(a)}").unwrap());
        assert_eq!(l.links, vec![(0, 2), (1, 3)]);
        assert!(check_correct(&l).unwrap().verdict.is_correct());
    }

    #[test]
    fn perm_moves_cut_pairs() {
        let p = parse_proof("(perm (2 1 0 1 0) (tensor (cut (ax P) (ax P)) (cut (ax Q) (ax Q))))");
        let p = p.unwrap();
        let s = check_proof(&p).unwrap();
        assert_eq!(s.cuts[0].0, crate::syntax::parse_formula("~Q").unwrap());
        let l = translate(&p).unwrap();
        assert!(check_correct(&l).unwrap().verdict.is_correct());
    }
}
