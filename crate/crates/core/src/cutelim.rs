//! Local cut elimination on unification nets, and the global-substitution
//! eliminator for Girard nets used for comparison.

use crate::nets::{check_correct, GNode, GirardNet, Linking, NetError};
use crate::syntax::{CutSequent, FreshSupply, Formula};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RedexKind {
    /// Two atoms; the links are those meeting the left and right cut leaf.
    Atomic { left_link: (usize, usize), right_link: (usize, usize) },
    Multiplicative,
    Quantifier,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Redex {
    pub cut: usize,
    pub kind: RedexKind,
}

impl fmt::Display for Redex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match self.kind {
            RedexKind::Atomic { .. } => "atomic",
            RedexKind::Multiplicative => "multiplicative",
            RedexKind::Quantifier => "quantifier",
        };
        write!(f, "{k} cut {}", self.cut)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReduceError {
    #[error("no cut {0}")]
    NoSuchCut(usize),
    #[error("cut {0} does not match the redex")]
    Mismatch(usize),
    #[error("cut {0} is linked to itself")]
    SelfLinked(usize),
    #[error("reduction broke correctness after {steps} steps: {reason}")]
    Broken { steps: usize, reason: String },
    #[error(transparent)]
    Net(#[from] NetError),
}

/// Leaf index of the first leaf of each cut side.
fn cut_bases(h: &CutSequent) -> Vec<(usize, usize)> {
    let mut at: usize = h.formulas.iter().map(Formula::leaf_count).sum();
    h.cuts
        .iter()
        .map(|(a, b)| {
            let l = at;
            at += a.leaf_count();
            let r = at;
            at += b.leaf_count();
            (l, r)
        })
        .collect()
}

/// Whether the head connectives of a cut face each other.
fn heads_match(a: &Formula, b: &Formula) -> bool {
    use Formula::*;
    matches!(
        (a, b),
        (Atom(_), Atom(_))
            | (Tensor(..), Par(..))
            | (Par(..), Tensor(..))
            | (Exists(..), Forall(..))
            | (Forall(..), Exists(..))
    )
}

/// One redex per cut, in cut order.
pub fn find_redexes(l: &Linking) -> Vec<Redex> {
    let partners = l.partners();
    let bases = cut_bases(&l.host);
    let mut out = Vec::new();
    for (i, (a, b)) in l.host.cuts.iter().enumerate() {
        let kind = match (a, b) {
            (Formula::Atom(_), Formula::Atom(_)) => {
                let (x, y) = bases[i];
                let sorted = |p: usize, q: usize| (p.min(q), p.max(q));
                RedexKind::Atomic { left_link: sorted(x, partners[x]), right_link: sorted(y, partners[y]) }
            }
            (Formula::Exists(..), _) | (Formula::Forall(..), _) => RedexKind::Quantifier,
            _ => RedexKind::Multiplicative,
        };
        if heads_match(a, b) {
            out.push(Redex { cut: i, kind });
        }
    }
    out
}

/// Apply one cut reduction, rebuilding the linking.
pub fn reduce(l: &Linking, r: &Redex) -> Result<Linking, ReduceError> {
    let i = r.cut;
    let (a, b) = l.host.cuts.get(i).ok_or(ReduceError::NoSuchCut(i))?.clone();
    let (base_a, base_b) = cut_bases(&l.host)[i];
    let mut host = l.host.clone();
    match (&a, &b, r.kind) {
        (Formula::Atom(_), Formula::Atom(_), RedexKind::Atomic { .. }) => {
            let partners = l.partners();
            let (pa, pb) = (partners[base_a], partners[base_b]);
            if pa == base_b {
                return Err(ReduceError::SelfLinked(i));
            }
            host.cuts.remove(i);
            let shift = |x: usize| if x > base_b { x - 2 } else { x };
            let mut links: Vec<(usize, usize)> = l
                .links
                .iter()
                .filter(|&&(x, y)| ![x, y].iter().any(|z| *z == base_a || *z == base_b))
                .map(|&(x, y)| (shift(x), shift(y)))
                .collect();
            links.push((shift(pa), shift(pb)));
            Ok(Linking::new_unchecked(host, links))
        }
        (
            Formula::Tensor(a1, a2) | Formula::Par(a1, a2),
            Formula::Tensor(b1, b2) | Formula::Par(b1, b2),
            RedexKind::Multiplicative,
        ) if heads_match(&a, &b) => {
            let (n1, n2, m1) = (a1.leaf_count(), a2.leaf_count(), b1.leaf_count());
            host.cuts[i] = ((**a1).clone(), (**b1).clone());
            host.cuts.insert(i + 1, ((**a2).clone(), (**b2).clone()));
            // Old order [a1 a2 b1 b2] becomes [a1 b1 a2 b2].
            let map = |x: usize| {
                if (base_a + n1..base_b).contains(&x) {
                    x + m1
                } else if (base_b..base_b + m1).contains(&x) {
                    x - n2
                } else {
                    x
                }
            };
            let links = l.links.iter().map(|&(x, y)| (map(x), map(y))).collect();
            Ok(Linking::new_unchecked(host, links))
        }
        (Formula::Exists(x, abar) | Formula::Forall(x, abar), Formula::Forall(y, a2) | Formula::Exists(y, a2), RedexKind::Quantifier)
            if heads_match(&a, &b) =>
        {
            let (left, right) = strip_quantifiers(&host, x, abar, y, a2);
            host.cuts[i] = (left, right);
            Ok(Linking::new_unchecked(host, l.links.clone()))
        }
        _ => Err(ReduceError::Mismatch(i)),
    }
}

/// Free the dual binders of a quantifier cut under a single name. The name of
/// the left binder is kept unless the right body captures it.
fn strip_quantifiers(
    host: &CutSequent,
    x: &crate::syntax::Sym,
    abar: &Formula,
    y: &crate::syntax::Sym,
    a: &Formula,
) -> (Formula, Formula) {
    if x == y {
        return (abar.clone(), a.clone());
    }
    if let Some(a2) = a.subst(y, &crate::syntax::Term::Var(x.clone())) {
        return (abar.clone(), a2);
    }
    let z = FreshSupply::avoiding(host.symbols()).fresh(x.as_str());
    (abar.rename_free(x, &z), a.rename_free(y, &z))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Leftmost redex first.
    #[default]
    Leftmost,
    /// A uniformly random redex at each step.
    Random(u64),
}

#[derive(Debug, Clone, Default)]
pub struct NormalizeOptions {
    pub strategy: Strategy,
    /// Re-check correctness after every step.
    pub verify: bool,
    /// Record every intermediate net.
    pub trace: bool,
}

#[derive(Debug, Clone)]
pub struct Normalization {
    pub net: Linking,
    pub steps: usize,
    /// Intermediate nets, starting with the input, when tracing.
    pub trace: Vec<Linking>,
}

/// Eliminate all cuts in time linear in the size of the cuts. Conclusion
/// leaves keep their indices; cut leaves are resolved through a partner array.
pub fn normalize(l: &Linking) -> (Linking, usize) {
    if l.host.cuts.is_empty() {
        return (l.clone(), 0);
    }
    let mut partner = l.partners();
    let bases = cut_bases(&l.host);
    let mut leaves = HashMap::new();
    for (a, b) in &l.host.cuts {
        count_leaves(a, &mut leaves);
        count_leaves(b, &mut leaves);
    }
    let lc = |f: &Formula| leaves[&(f as *const Formula)];
    let mut stack: Vec<(&Formula, usize, &Formula, usize)> =
        l.host.cuts.iter().zip(&bases).rev().map(|((a, b), &(x, y))| (a, x, b, y)).collect();
    let mut steps = 0;
    while let Some((a, x, b, y)) = stack.pop() {
        steps += 1;
        match (a, b) {
            (Formula::Atom(_), Formula::Atom(_)) => {
                let (px, py) = (partner[x], partner[y]);
                partner[px] = py;
                partner[py] = px;
            }
            (Formula::Tensor(a1, a2) | Formula::Par(a1, a2), Formula::Tensor(b1, b2) | Formula::Par(b1, b2)) => {
                stack.push((a2, x + lc(a1), b2, y + lc(b1)));
                stack.push((a1, x, b1, y));
            }
            (Formula::Exists(_, a1) | Formula::Forall(_, a1), Formula::Exists(_, b1) | Formula::Forall(_, b1)) => {
                stack.push((a1, x, b1, y));
            }
            _ => unreachable!("cut formulas are dual"),
        }
    }
    let n: usize = l.host.formulas.iter().map(Formula::leaf_count).sum();
    let links = (0..n).filter(|&i| i < partner[i]).map(|i| (i, partner[i])).collect();
    (Linking::new_unchecked(CutSequent::new(l.host.formulas.clone()), links), steps)
}

fn count_leaves(f: &Formula, memo: &mut HashMap<*const Formula, usize>) -> usize {
    let n = match f {
        Formula::Atom(_) => 1,
        _ => f.children().into_iter().map(|c| count_leaves(c, memo)).sum(),
    };
    memo.insert(f as *const Formula, n);
    n
}

/// Step-by-step normalization through [`reduce`], with a choice of redex
/// order, optional per-step verification and tracing.
pub fn normalize_with(l: &Linking, opts: &NormalizeOptions) -> Result<Normalization, ReduceError> {
    let mut rng = match opts.strategy {
        Strategy::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        Strategy::Leftmost => None,
    };
    let mut net = l.clone();
    let mut trace = if opts.trace { vec![net.clone()] } else { Vec::new() };
    let mut steps = 0;
    loop {
        let rs = find_redexes(&net);
        let r = match &mut rng {
            Some(g) => rs.choose(g),
            None => rs.first(),
        };
        let Some(r) = r else { break };
        net = reduce(&net, r)?;
        steps += 1;
        if opts.verify {
            let v = check_correct(&net)?.verdict;
            if !v.is_correct() {
                return Err(ReduceError::Broken { steps, reason: v.to_string() });
            }
        }
        if opts.trace {
            trace.push(net.clone());
        }
    }
    Ok(Normalization { net, steps, trace })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GirardError {
    #[error("cut {0} is not a dual pair")]
    Malformed(String),
    #[error("term size {size} exceeds the cap {cap} after {steps} steps")]
    Cap { size: usize, cap: usize, steps: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GirardStats {
    pub steps: usize,
    /// Largest number of variable occurrences in a single term at any point.
    pub peak_term_vars: usize,
    /// Largest total term size of the net at any point.
    pub peak_size: usize,
}

/// Eliminate the cuts of a Girard net. A quantifier step substitutes the
/// witness for the eigenvariable throughout the whole net.
pub fn girard_normalize(g: &GirardNet, cap: usize) -> Result<(GirardNet, GirardStats), GirardError> {
    let nconcl: usize = g.conclusions.iter().map(|c| c.atoms().len()).sum();
    let mut partner = vec![usize::MAX; g.leaf_atoms().len()];
    for &(a, b) in &g.axioms {
        partner[a] = b;
        partner[b] = a;
    }
    let mut conclusions = g.conclusions.clone();
    let mut at = nconcl;
    let mut pending: Pending = Vec::new();
    for (a, b) in &g.cuts {
        let na = a.atoms().len();
        pending.push((a.clone(), at, b.clone(), at + na));
        at += na + b.atoms().len();
    }
    pending.reverse();
    let measure = |cs: &[GNode], ps: &[(GNode, usize, GNode, usize)], st: &mut GirardStats| {
        let net = GirardNet {
            conclusions: cs.to_vec(),
            cuts: ps.iter().map(|(a, _, b, _)| (a.clone(), b.clone())).collect(),
            axioms: vec![],
        };
        st.peak_term_vars = st.peak_term_vars.max(net.max_term_vars());
        st.peak_size = st.peak_size.max(net.term_size());
    };
    let mut stats = GirardStats::default();
    measure(&conclusions, &pending, &mut stats);
    while let Some((a, x, b, y)) = pending.pop() {
        stats.steps += 1;
        match (a, b) {
            (GNode::Atom(p), GNode::Atom(q)) => {
                if q != p.dual() {
                    return Err(GirardError::Malformed(format!("{p} ; {q}")));
                }
                let (px, py) = (partner[x], partner[y]);
                partner[px] = py;
                partner[py] = px;
            }
            (GNode::Tensor(a1, a2) | GNode::Par(a1, a2), GNode::Tensor(b1, b2) | GNode::Par(b1, b2)) => {
                let (na, nb) = (a1.atoms().len(), b1.atoms().len());
                pending.push((*a2, x + na, *b2, y + nb));
                pending.push((*a1, x, *b1, y));
            }
            (GNode::Forall { var, sub: s1 }, GNode::Exists { witness, sub: s2, .. }) => {
                let (s1, s2) = substitute(*s1, *s2, &var, witness, &mut conclusions, &mut pending);
                pending.push((s1, x, s2, y));
            }
            (GNode::Exists { witness, sub: s2, .. }, GNode::Forall { var, sub: s1 }) => {
                let (s1, s2) = substitute(*s1, *s2, &var, witness, &mut conclusions, &mut pending);
                pending.push((s2, x, s1, y));
            }
            (a, b) => return Err(GirardError::Malformed(format!("{} ; {}", a.formula(), b.formula()))),
        }
        measure(&conclusions, &pending, &mut stats);
        if stats.peak_size > cap {
            return Err(GirardError::Cap { size: stats.peak_size, cap, steps: stats.steps });
        }
    }
    let links = (0..nconcl).filter(|&i| i < partner[i]).map(|i| (i, partner[i])).collect();
    Ok((GirardNet { conclusions, cuts: vec![], axioms: links }, stats))
}

type Pending = Vec<(GNode, usize, GNode, usize)>;

/// Substitute the witness for the eigenvariable of `s1` everywhere.
fn substitute(
    mut s1: GNode,
    s2: GNode,
    var: &crate::syntax::Sym,
    witness: Option<crate::syntax::Term>,
    conclusions: &mut [GNode],
    pending: &mut Pending,
) -> (GNode, GNode) {
    if let Some(t) = witness {
        s1.subst(var, &t);
        for c in conclusions.iter_mut() {
            c.subst(var, &t);
        }
        for (p, _, q, _) in pending.iter_mut() {
            p.subst(var, &t);
            q.subst(var, &t);
        }
    }
    (s1, s2)
}
