use super::{translate, Proof, ProofError};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CommuteError {
    #[error("no rule at address {0:?}")]
    BadAddress(Vec<usize>),
    #[error("not applicable: {0}")]
    NotApplicable(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EquivalenceError {
    #[error("{0}")]
    Invalid(#[from] ProofError),
    #[error("conclusions differ")]
    ConclusionMismatch,
}

/// Origin of a conclusion member relative to the two rules being swapped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tag {
    /// Member `idx` of premise `j` of the upper rule.
    In(usize, usize),
    /// Member of the lower rule's other premise.
    Q(usize),
    UPrin,
    LPrin,
}

fn na(msg: impl Into<String>) -> CommuteError {
    CommuteError::NotApplicable(msg.into())
}

fn is_logical(p: &Proof) -> bool {
    matches!(p, Proof::Par { .. } | Proof::Tensor { .. } | Proof::Exists { .. } | Proof::Forall { .. })
}

fn nformulas(p: &Proof) -> Result<usize, CommuteError> {
    let s = p.shape_conclusion().map_err(|e| na(e.to_string()))?;
    if !s.cuts.is_empty() {
        return Err(na("subproof has cuts"));
    }
    Ok(s.formulas.len())
}

/// Premise `j`'s proof with `front` moved to the front and `back` to the back.
fn arrange(p: Proof, n: usize, front: &[usize], back: &[usize]) -> (Proof, Vec<usize>) {
    let mut order: Vec<usize> = front.to_vec();
    order.extend((0..n).filter(|i| !front.contains(i) && !back.contains(i)));
    order.extend_from_slice(back);
    if order.iter().enumerate().all(|(i, &o)| i == o) {
        (p, order)
    } else {
        (Proof::Perm { order: order.clone(), premise: Box::new(p) }, order)
    }
}

fn with_premises(rule: &Proof, mut prem: Vec<Proof>, at: Option<usize>) -> Proof {
    let mut r = rule.clone();
    match &mut r {
        Proof::Par { at: k, .. } | Proof::Exists { at: k, .. } | Proof::Forall { at: k, .. } => {
            if let Some(a) = at {
                *k = a;
            }
        }
        _ => {}
    }
    for (slot, q) in r.premises_mut().into_iter().zip(prem.drain(..)) {
        *slot = q;
    }
    r
}

/// Swap the rule at `at` with the nearest logical rule above it in premise
/// `slot`, absorbing any permutations in between. The conclusion is unchanged.
pub fn apply_commutation(p: &Proof, at: &[usize], slot: usize) -> Result<Proof, CommuteError> {
    let lower = p.at(at).ok_or_else(|| CommuteError::BadAddress(at.to_vec()))?;
    if !is_logical(lower) {
        return Err(na(format!("{} is not a logical rule", lower.rule_name())));
    }
    let lprem = lower.premises();
    let mut up = *lprem.get(slot).ok_or_else(|| CommuteError::BadAddress(at.to_vec()))?;
    let mut perms: Vec<&Vec<usize>> = Vec::new();
    while let Proof::Perm { order, premise } = up {
        perms.push(order);
        up = premise;
    }
    if !is_logical(up) {
        return Err(na(format!("{} above {} does not commute", up.rule_name(), lower.rule_name())));
    }
    let old = lower.shape_conclusion().map_err(|e| na(e.to_string()))?;
    let strict = lower.conclusion().is_ok();

    // Tags of the upper rule's conclusion.
    let uprem: Vec<&Proof> = up.premises();
    let un: Vec<usize> = uprem.iter().map(|q| nformulas(q)).collect::<Result<_, _>>()?;
    let (tags_u, uhyps): (Vec<Tag>, Vec<Tag>) = match up {
        Proof::Par { at: k, .. } => {
            let mut t: Vec<Tag> = (0..un[0]).filter(|&i| i != k + 1).map(|i| Tag::In(0, i)).collect();
            t[*k] = Tag::UPrin;
            (t, vec![Tag::In(0, *k), Tag::In(0, k + 1)])
        }
        Proof::Tensor { .. } => {
            let mut t: Vec<Tag> = (0..un[0] - 1).map(|i| Tag::In(0, i)).collect();
            t.push(Tag::UPrin);
            t.extend((1..un[1]).map(|i| Tag::In(1, i)));
            (t, vec![Tag::In(0, un[0] - 1), Tag::In(1, 0)])
        }
        Proof::Exists { at: k, .. } | Proof::Forall { at: k, .. } => {
            let mut t: Vec<Tag> = (0..un[0]).map(|i| Tag::In(0, i)).collect();
            t[*k] = Tag::UPrin;
            (t, vec![Tag::In(0, *k)])
        }
        _ => unreachable!(),
    };
    let mut tl = tags_u;
    for order in perms.iter().rev() {
        tl = order.iter().map(|&i| tl[i]).collect();
    }

    // The lower rule's hypotheses and conclusion tags.
    let lprem_n: Vec<usize> = lprem.iter().map(|q| nformulas(q)).collect::<Result<_, _>>()?;
    let premise_tags = |s: usize| -> Vec<Tag> {
        if s == slot {
            tl.clone()
        } else {
            (0..lprem_n[s]).map(Tag::Q).collect()
        }
    };
    let (hyps, tags_c): (Vec<Tag>, Vec<Tag>) = match lower {
        Proof::Par { at: k, .. } => {
            let t = premise_tags(0);
            let mut c = t.clone();
            c.splice(*k..k + 2, [Tag::LPrin]);
            (vec![t[*k], t[k + 1]], c)
        }
        Proof::Exists { at: k, .. } | Proof::Forall { at: k, .. } => {
            let t = premise_tags(0);
            let mut c = t.clone();
            c[*k] = Tag::LPrin;
            (vec![t[*k]], c)
        }
        Proof::Tensor { .. } => {
            let (a, b) = (premise_tags(0), premise_tags(1));
            let mut c = a[..a.len() - 1].to_vec();
            c.push(Tag::LPrin);
            c.extend_from_slice(&b[1..]);
            (vec![*a.last().unwrap(), b[0]], c)
        }
        _ => unreachable!(),
    };
    let from_up: Vec<Tag> = hyps.iter().copied().filter(|t| !matches!(t, Tag::Q(_))).collect();
    if from_up.contains(&Tag::UPrin) {
        return Err(na("the lower rule acts on the upper rule's principal formula"));
    }
    let j = match from_up[0] {
        Tag::In(j, _) => j,
        _ => unreachable!(),
    };
    if from_up.iter().any(|t| !matches!(t, Tag::In(jj, _) if *jj == j)) {
        return Err(na("the lower rule joins formulas from different premises of the upper rule"));
    }
    let idx = |t: &Tag| match t {
        Tag::In(_, i) => *i,
        _ => unreachable!(),
    };

    // Lower rule moved onto premise j of the upper rule.
    let pj = uprem[j].clone();
    let nj = un[j];
    let hidx: Vec<usize> = from_up.iter().map(idx).collect();
    let (new_l, nt): (Proof, Vec<Tag>) = match lower {
        Proof::Tensor { .. } => {
            let q = lprem[1 - slot].clone();
            if slot == 0 {
                let (pj, order) = arrange(pj, nj, &[], &hidx);
                let mut t: Vec<Tag> = order[..nj - 1].iter().map(|&i| Tag::In(j, i)).collect();
                t.push(Tag::LPrin);
                t.extend((1..lprem_n[1]).map(Tag::Q));
                (with_premises(lower, vec![pj, q], None), t)
            } else {
                let (pj, order) = arrange(pj, nj, &hidx, &[]);
                let mut t: Vec<Tag> = (0..lprem_n[0] - 1).map(Tag::Q).collect();
                t.push(Tag::LPrin);
                t.extend(order[1..].iter().map(|&i| Tag::In(j, i)));
                (with_premises(lower, vec![q, pj], None), t)
            }
        }
        _ => {
            let (pj, order) = arrange(pj, nj, &[], &hidx);
            let keep = nj - hidx.len();
            let mut t: Vec<Tag> = order[..keep].iter().map(|&i| Tag::In(j, i)).collect();
            t.push(Tag::LPrin);
            (with_premises(lower, vec![pj], Some(keep)), t)
        }
    };

    // Upper rule re-applied below.
    let pos = |tags: &[Tag], t: Tag| tags.iter().position(|&x| x == t).unwrap();
    let mut new_prem: Vec<Proof> = Vec::new();
    let mut prem_tags: Vec<Vec<Tag>> = Vec::new();
    for (jj, q) in uprem.iter().enumerate() {
        if jj == j {
            new_prem.push(new_l.clone());
            prem_tags.push(nt.clone());
        } else {
            new_prem.push((*q).clone());
            prem_tags.push((0..un[jj]).map(|i| Tag::In(jj, i)).collect());
        }
    }
    let mut placed: Vec<Proof> = Vec::new();
    let mut placed_tags: Vec<Vec<Tag>> = Vec::new();
    let mut uat = None;
    for (jj, (q, t)) in new_prem.into_iter().zip(prem_tags).enumerate() {
        let mine: Vec<usize> =
            uhyps.iter().filter(|h| matches!(h, Tag::In(x, _) if *x == jj)).map(|h| pos(&t, *h)).collect();
        let front_needed = matches!(up, Proof::Tensor { .. }) && jj == 1;
        let (q, order) = if front_needed { arrange(q, t.len(), &mine, &[]) } else { arrange(q, t.len(), &[], &mine) };
        if !matches!(up, Proof::Tensor { .. }) {
            uat = Some(t.len() - mine.len());
        }
        placed_tags.push(order.iter().map(|&i| t[i]).collect());
        placed.push(q);
    }
    let new_u = with_premises(up, placed, uat);
    let ft: Vec<Tag> = match up {
        Proof::Tensor { .. } => {
            let (a, b) = (&placed_tags[0], &placed_tags[1]);
            let mut c = a[..a.len() - 1].to_vec();
            c.push(Tag::UPrin);
            c.extend_from_slice(&b[1..]);
            c
        }
        _ => {
            let t = &placed_tags[0];
            let mut c = t[..t.len() - uhyps.len()].to_vec();
            c.push(Tag::UPrin);
            c
        }
    };
    let order: Vec<usize> = tags_c.iter().map(|&t| pos(&ft, t)).collect();
    let result = if order.iter().enumerate().all(|(i, &o)| i == o) {
        new_u
    } else {
        Proof::Perm { order, premise: Box::new(new_u) }
    };

    let checked = if strict { result.conclusion() } else { result.shape_conclusion() };
    match checked {
        Ok(s) if s == old => {}
        Ok(_) => return Err(na("conclusion would change")),
        Err(e) => return Err(na(format!("side condition fails: {e}"))),
    }
    let mut out = p.clone();
    *out.at_mut(at).unwrap() = result;
    Ok(out)
}

/// Every (address, slot) at which a commutation applies.
pub fn commutation_sites(p: &Proof) -> Vec<(Vec<usize>, usize)> {
    let mut out = Vec::new();
    for a in p.addresses() {
        let n = p.at(&a).map_or(0, |q| q.premises().len());
        for slot in 0..n {
            if apply_commutation(p, &a, slot).is_ok() {
                out.push((a.clone(), slot));
            }
        }
    }
    out
}

/// Equivalence modulo commutations and re-witnessing, decided by comparing
/// translations.
pub fn equivalent(p: &Proof, q: &Proof) -> Result<bool, EquivalenceError> {
    let (sp, sq) = (p.conclusion()?, q.conclusion()?);
    if sp != sq {
        return Err(EquivalenceError::ConclusionMismatch);
    }
    Ok(translate(p)? == translate(q)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::parse_proof;

    const LEFT: &str = "(exists 0 x f(c) (~P(x)) (exists 1 y f(c) (P(y)) (ax ~P(f(c)))))";
    const RIGHT: &str = "(exists 1 y g(z) (P(y)) (exists 0 x g(z) (~P(x)) (ax ~P(g(z)))))";

    #[test]
    fn swap_existentials() {
        let p = parse_proof(LEFT).unwrap();
        let q = apply_commutation(&p, &[], 0).unwrap();
        assert_eq!(q.rule_name(), "exists");
        match &q {
            Proof::Exists { var, .. } => assert_eq!(var.as_str(), "y"),
            _ => unreachable!(),
        }
        assert_eq!(q.conclusion().unwrap(), p.conclusion().unwrap());
        assert_eq!(translate(&q).unwrap(), translate(&p).unwrap());
    }

    #[test]
    fn canonicity_pair() {
        let (p, q) = (parse_proof(LEFT).unwrap(), parse_proof(RIGHT).unwrap());
        assert!(equivalent(&p, &q).unwrap());
        assert!(equivalent(&p, &p).unwrap());
    }

    #[test]
    fn crossed_axioms_differ() {
        let straight = parse_proof("(par 0 (perm (0 2 1) (tensor (ax ~P(a)) (ax P(a)))))").unwrap();
        let crossed = parse_proof("(par 0 (perm (2 0 1) (tensor (ax ~P(a)) (ax P(a)))))").unwrap();
        let s = straight.conclusion().unwrap();
        assert_eq!(s.to_string(), "~P(a) | ~P(a), P(a) * P(a)");
        assert_eq!(crossed.conclusion().unwrap(), s);
        assert!(!equivalent(&straight, &crossed).unwrap());
    }

    #[test]
    fn eigenvariable_blocks_commutation() {
        // forall x below exists y with witness x: not applicable.
        let p = parse_proof("(forall 0 x (exists 1 y x (P(y)) (ax ~P(x))))").unwrap();
        assert!(p.conclusion().is_ok());
        assert!(matches!(apply_commutation(&p, &[], 0), Err(CommuteError::NotApplicable(_))));
    }

    #[test]
    fn par_above_tensor() {
        // par on the right premise's passive formulas, then tensor.
        let p = parse_proof(
            "(tensor (ax P) (par 1 (perm (0 2 1) (tensor (ax Q) (ax R)))))",
        )
        .unwrap();
        let before = p.conclusion().unwrap();
        let q = apply_commutation(&p, &[], 1).unwrap();
        assert_eq!(q.conclusion().unwrap(), before);
        assert_eq!(translate(&q).unwrap(), translate(&p).unwrap());
        assert!(matches!(q.at(&[]).unwrap(), Proof::Par { .. } | Proof::Perm { .. }));
    }

    #[test]
    fn principal_interaction_is_rejected() {
        let p = parse_proof("(par 0 (tensor (ax P) (ax Q)))").unwrap();
        assert!(p.conclusion().is_ok());
        assert!(apply_commutation(&p, &[], 0).is_err());
        assert!(apply_commutation(&p, &[0, 0], 0).is_err());
    }
}
