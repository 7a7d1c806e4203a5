use super::correct::{build_graph, NetGraph};
use super::{check_correct, Linking, NetError};
use crate::calculus::Proof;
use crate::syntax::{cleanse, Atom, Formula, Sym, Term};
use crate::unify::{apply_mgu, CapExceeded};
use std::collections::{BTreeSet, HashMap};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SequentializeError {
    #[error("{0}")]
    Net(#[from] NetError),
    #[error("{0}")]
    Cap(#[from] CapExceeded),
    #[error("linking is not correct: {0}")]
    NotCorrect(String),
    #[error("linking has cuts; use sequentialize_cuts")]
    HasCuts,
    #[error("no rule applies to {0}")]
    Stuck(String),
}

/// Witness terms are capped at this many nodes.
const WITNESS_CAP: usize = 1_000_000;

#[derive(Debug, Clone)]
enum Item {
    F { f: Formula, leaves: Vec<usize> },
    /// A cut `(a, b)` closed over `vars`, read as `ex vars. (a * b)`.
    Cut { a: Formula, b: Formula, vars: Vec<Sym>, leaves: Vec<usize> },
}

impl Item {
    fn leaves(&self) -> &[usize] {
        match self {
            Item::F { leaves, .. } | Item::Cut { leaves, .. } => leaves,
        }
    }

    fn binders(&self) -> (Vec<Sym>, Vec<Sym>) {
        fn go(f: &Formula, ex: &mut Vec<Sym>, un: &mut Vec<Sym>) {
            match f {
                Formula::Atom(_) => {}
                Formula::Tensor(a, b) | Formula::Par(a, b) => {
                    go(a, ex, un);
                    go(b, ex, un);
                }
                Formula::Exists(x, a) => {
                    ex.push(x.clone());
                    go(a, ex, un);
                }
                Formula::Forall(y, a) => {
                    un.push(y.clone());
                    go(a, ex, un);
                }
            }
        }
        let (mut ex, mut un) = (Vec::new(), Vec::new());
        match self {
            Item::F { f, .. } => go(f, &mut ex, &mut un),
            Item::Cut { a, b, vars, .. } => {
                ex.extend(vars.iter().cloned());
                go(a, &mut ex, &mut un);
                go(b, &mut ex, &mut un);
            }
        }
        (ex, un)
    }
}

struct Ctx<'a> {
    g: &'a NetGraph,
    partner: Vec<usize>,
    precs: HashMap<Sym, Vec<Sym>>,
}

impl Ctx<'_> {
    fn witness(&self, x: &Sym) -> Result<Term, CapExceeded> {
        apply_mgu(&self.g.mgu, &Term::Var(x.clone()), WITNESS_CAP)
    }

    /// Existentials that may be instantiated: no precedence into a present universal.
    fn free_to_go(&self, x: &Sym, present: &BTreeSet<Sym>) -> bool {
        self.precs.get(x).is_none_or(|ys| ys.iter().all(|y| !present.contains(y)))
    }

    fn seq(&self, items: Vec<Item>) -> Result<Proof, SequentializeError> {
        let fidx = |k: usize| items[..k].iter().filter(|i| matches!(i, Item::F { .. })).count();
        // Axiom.
        if let [Item::F { f: Formula::Atom(a), leaves: la }, Item::F { f: Formula::Atom(b), leaves: lb }] =
            items.as_slice()
        {
            if self.partner[la[0]] == lb[0] {
                return Ok(Proof::Ax { left: a.clone(), right: b.clone() });
            }
        }
        // Par, then forall.
        for want_par in [true, false] {
            for (k, it) in items.iter().enumerate() {
                let Item::F { f, leaves } = it else { continue };
                let mut next = items.clone();
                let rule = match (f, want_par) {
                    (Formula::Par(a, b), true) => {
                        let n = a.leaf_count();
                        next[k] = Item::F { f: (**a).clone(), leaves: leaves[..n].to_vec() };
                        next.insert(k + 1, Item::F { f: (**b).clone(), leaves: leaves[n..].to_vec() });
                        Proof::Par { at: fidx(k), premise: hole() }
                    }
                    (Formula::Forall(y, a), false) => {
                        next[k] = Item::F { f: (**a).clone(), leaves: leaves.clone() };
                        Proof::Forall { at: fidx(k), var: y.clone(), premise: hole() }
                    }
                    _ => continue,
                };
                return self.finish(rule, next);
            }
        }
        let binders: Vec<(Vec<Sym>, Vec<Sym>)> = items.iter().map(Item::binders).collect();
        let present: BTreeSet<Sym> = binders.iter().flat_map(|(_, u)| u.iter().cloned()).collect();
        // Exists.
        for (k, it) in items.iter().enumerate() {
            let Item::F { f: Formula::Exists(x, body), leaves } = it else { continue };
            if !self.free_to_go(x, &present) {
                continue;
            }
            let (witness, premise) = if body.has_free(x) {
                let t = self.witness(x)?;
                let p = body.subst(x, &t).ok_or_else(|| SequentializeError::Stuck(format!("capture in {body}")))?;
                (Some(t), p)
            } else {
                (None, (**body).clone())
            };
            let mut next = items.clone();
            next[k] = Item::F { f: premise, leaves: leaves.clone() };
            let rule = Proof::Exists {
                at: fidx(k),
                var: x.clone(),
                witness,
                body: (**body).clone(),
                premise: hole(),
            };
            return self.finish(rule, next);
        }
        // Splitting tensor or cut.
        let mut leaf_item: HashMap<usize, usize> = HashMap::new();
        for (k, it) in items.iter().enumerate() {
            for &l in it.leaves() {
                leaf_item.insert(l, k);
            }
        }
        let edges_with = |owner: &HashMap<Sym, usize>| -> Vec<(usize, usize)> {
            let mut out = Vec::new();
            for (x, ys) in &self.precs {
                let Some(&u) = owner.get(x) else { continue };
                for y in ys {
                    if let Some(&v) = owner.get(y) {
                        out.push((u, v));
                    }
                }
            }
            out
        };
        let mut owner: HashMap<Sym, usize> = HashMap::new();
        for (k, (ex, un)) in binders.iter().enumerate() {
            for v in ex.iter().chain(un) {
                owner.insert(v.clone(), k);
            }
        }
        self.check_frame_tensors(&items, &leaf_item, &owner);
        let mut tensors: Vec<usize> =
            (0..items.len()).filter(|&k| matches!(items[k], Item::F { f: Formula::Tensor(..), .. })).collect();
        tensors.extend((0..items.len()).filter(|&k| match &items[k] {
            Item::Cut { vars, .. } => vars.iter().all(|v| self.free_to_go(v, &present)),
            _ => false,
        }));
        for k in tensors {
            let (a, b, na) = match &items[k] {
                Item::F { f: Formula::Tensor(a, b), .. } => ((**a).clone(), (**b).clone(), a.leaf_count()),
                Item::Cut { a, b, .. } => (a.clone(), b.clone(), a.leaf_count()),
                _ => unreachable!(),
            };
            // Item k is split into halves with ids k and n.
            let n = items.len();
            let mut split_owner = owner.clone();
            let b_binders = Item::F { f: b.clone(), leaves: vec![] }.binders();
            for v in b_binders.0.iter().chain(&b_binders.1) {
                split_owner.insert(v.clone(), n);
            }
            let mut dsu: Vec<usize> = (0..=n).collect();
            fn find(d: &mut [usize], mut i: usize) -> usize {
                while d[i] != i {
                    d[i] = d[d[i]];
                    i = d[i];
                }
                i
            }
            let b_leaves = &items[k].leaves()[na..];
            let side = |l: usize| -> usize {
                let it = leaf_item[&l];
                if it == k && b_leaves.contains(&l) {
                    n
                } else {
                    it
                }
            };
            for it in items.iter() {
                for &l in it.leaves() {
                    let (u, v) = (find(&mut dsu, side(l)), find(&mut dsu, side(self.partner[l])));
                    dsu[u] = v;
                }
            }
            for (u, v) in edges_with(&split_owner) {
                let (u, v) = (find(&mut dsu, u), find(&mut dsu, v));
                dsu[u] = v;
            }
            let (ra, rb) = (find(&mut dsu, k), find(&mut dsu, n));
            if ra == rb {
                continue;
            }
            let mut left: Vec<(usize, Item)> = Vec::new();
            let mut right: Vec<(usize, Item)> = Vec::new();
            for (j, it) in items.iter().enumerate() {
                if j == k {
                    continue;
                }
                let r = find(&mut dsu, j);
                if r == ra {
                    left.push((j, it.clone()));
                } else if r == rb {
                    right.push((j, it.clone()));
                } else {
                    return Err(SequentializeError::Stuck("disconnected linking".into()));
                }
            }
            let leaves = items[k].leaves();
            let ia = Item::F { f: a.clone(), leaves: leaves[..na].to_vec() };
            let ib = Item::F { f: b.clone(), leaves: leaves[na..].to_vec() };
            let (ia, ib, rule) = match &items[k] {
                Item::Cut { vars, a, b, .. } => {
                    let sigma: Vec<(Sym, Term)> =
                        vars.iter().map(|v| self.witness(v).map(|t| (v.clone(), t))).collect::<Result<_, _>>()?;
                    let lookup = |s: &Sym| sigma.iter().find(|(v, _)| v == s).map(|(_, t)| t.clone());
                    let ia = Item::F { f: a.map_free(&lookup), leaves: leaves[..na].to_vec() };
                    let ib = Item::F { f: b.map_free(&lookup), leaves: leaves[na..].to_vec() };
                    let rule = if sigma.is_empty() {
                        Proof::Cut { left: hole(), right: hole() }
                    } else {
                        Proof::ExtendedCut {
                            subst: sigma,
                            cut: (a.clone(), b.clone()),
                            left: hole(),
                            right: hole(),
                        }
                    };
                    (ia, ib, rule)
                }
                _ => (
                    ia,
                    ib,
                    Proof::Tensor { left: hole(), right: hole() },
                ),
            };
            let is_cut = matches!(items[k], Item::Cut { .. });
            let lids: Vec<usize> = left.iter().map(|(j, _)| *j).collect();
            let rids: Vec<usize> = right.iter().map(|(j, _)| *j).collect();
            let mut litems: Vec<Item> = left.into_iter().map(|(_, i)| i).collect();
            litems.push(ia);
            let mut ritems: Vec<Item> = vec![ib];
            ritems.extend(right.into_iter().map(|(_, i)| i));
            let lp = self.seq(litems)?;
            let rp = self.seq(ritems)?;
            let mut rule = rule;
            if let Proof::Tensor { left, right } | Proof::Cut { left, right } | Proof::ExtendedCut { left, right, .. } =
                &mut rule
            {
                **left = lp;
                **right = rp;
            }
            // Conclusion order of the new rule, by item id.
            let is_f = |j: &usize| matches!(items[*j], Item::F { .. });
            let mut cf: Vec<usize> = lids.iter().copied().filter(is_f).collect();
            if !is_cut {
                cf.push(k);
            }
            cf.extend(rids.iter().copied().filter(is_f));
            let mut cc: Vec<usize> = lids.iter().copied().filter(|j| !is_f(j)).collect();
            cc.extend(rids.iter().copied().filter(|j| !is_f(j)));
            if is_cut {
                cc.push(k);
            }
            return Ok(permute(rule, &items, &cf, &cc));
        }
        Err(SequentializeError::Stuck(
            items
                .iter()
                .map(|i| match i {
                    Item::F { f, .. } => f.to_string(),
                    Item::Cut { a, b, .. } => format!("cut{{{a} ; {b}}}"),
                })
                .collect::<Vec<_>>()
                .join(", "),
        ))
    }

    /// No tensor added by the frame splits: for a root existential x with
    /// precedence x to y, the items of x and y stay connected without that edge.
    fn check_frame_tensors(&self, items: &[Item], leaf_item: &HashMap<usize, usize>, owner: &HashMap<Sym, usize>) {
        if !cfg!(debug_assertions) {
            return;
        }
        let mut edges: Vec<(Sym, usize, usize)> = Vec::new();
        for (x, ys) in &self.precs {
            let Some(&u) = owner.get(x) else { continue };
            for y in ys {
                if let Some(&v) = owner.get(y) {
                    edges.push((x.clone(), u, v));
                }
            }
        }
        for (e, (x, u, v)) in edges.iter().enumerate() {
            if !matches!(&items[*u], Item::F { f: Formula::Exists(r, _), .. } if r == x) {
                continue;
            }
            let mut d: Vec<usize> = (0..items.len()).collect();
            fn find(d: &mut [usize], mut i: usize) -> usize {
                while d[i] != i {
                    d[i] = d[d[i]];
                    i = d[i];
                }
                i
            }
            for it in items {
                for &l in it.leaves() {
                    let (a, b) = (find(&mut d, leaf_item[&l]), find(&mut d, leaf_item[&self.partner[l]]));
                    d[a] = b;
                }
            }
            for (f, (_, a, b)) in edges.iter().enumerate() {
                if f != e {
                    let (a, b) = (find(&mut d, *a), find(&mut d, *b));
                    d[a] = b;
                }
            }
            debug_assert_eq!(find(&mut d, *u), find(&mut d, *v), "a frame tensor splits");
        }
    }

    fn finish(&self, mut rule: Proof, next: Vec<Item>) -> Result<Proof, SequentializeError> {
        let sub = self.seq(next)?;
        if let Some(p) = rule.premises_mut().into_iter().next() {
            *p = sub;
        }
        Ok(rule)
    }
}

/// Wrap `rule` in a permutation taking its conclusion (formulas `cf`, cuts
/// `cc`, as item ids) back to the item order.
fn permute(rule: Proof, items: &[Item], cf: &[usize], cc: &[usize]) -> Proof {
    let want_f: Vec<usize> = (0..items.len()).filter(|&j| matches!(items[j], Item::F { .. }) || cf.contains(&j)).collect();
    let want_c: Vec<usize> = (0..items.len()).filter(|&j| cc.contains(&j)).collect();
    let of: Vec<usize> = want_f.iter().map(|j| cf.iter().position(|x| x == j).unwrap()).collect();
    let oc: Vec<usize> = want_c.iter().map(|j| cc.iter().position(|x| x == j).unwrap()).collect();
    let id = |o: &[usize]| o.iter().enumerate().all(|(i, &x)| i == x);
    if id(&of) && id(&oc) {
        return rule;
    }
    let mut order = of;
    if !id(&oc) {
        order.extend(oc);
    }
    Proof::Perm { order, premise: Box::new(rule) }
}

fn hole() -> Box<Proof> {
    Box::new(Proof::Ax { left: Atom::new("#", true, Vec::new()), right: Atom::new("#", false, Vec::new()) })
}

fn run(l: &Linking) -> Result<Proof, SequentializeError> {
    let report = check_correct(l)?;
    if !report.verdict.is_correct() {
        return Err(SequentializeError::NotCorrect(report.verdict.label().to_string()));
    }
    let g = build_graph(l)?;
    let (host, _) = cleanse(&l.host);
    let mut partner = vec![0; host.leaf_count()];
    for &(a, b) in &l.links {
        partner[a] = b;
        partner[b] = a;
    }
    let mut precs: HashMap<Sym, Vec<Sym>> = HashMap::new();
    for p in &g.precedences {
        precs.entry(p.existential.clone()).or_default().push(p.universal.clone());
    }
    let mut items = Vec::new();
    let mut next = 0;
    for f in &host.formulas {
        let n = f.leaf_count();
        items.push(Item::F { f: f.clone(), leaves: (next..next + n).collect() });
        next += n;
    }
    for (a, b) in &host.cuts {
        let n = a.leaf_count() + b.leaf_count();
        items.push(Item::Cut { a: a.clone(), b: b.clone(), vars: a.free_vars(), leaves: (next..next + n).collect() });
        next += n;
    }
    let ctx = Ctx { g: &g, partner, precs };
    ctx.seq(items)
}

/// A cut-free proof whose translation is `l` (on the cleansed host).
pub fn sequentialize(l: &Linking) -> Result<Proof, SequentializeError> {
    if !l.host.is_cut_free() {
        return Err(SequentializeError::HasCuts);
    }
    run(l)
}

/// A proof with extended cuts whose translation is `l` (on the cleansed host).
/// Each cut is introduced by an extended cut whose substitution is the mgu's
/// assignment to the cut variables.
pub fn sequentialize_cuts(l: &Linking) -> Result<Proof, SequentializeError> {
    run(l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{check_proof, translate};

    fn round_trip(src: &str) -> Proof {
        let l = Linking::parse(src).unwrap();
        let p = sequentialize_cuts(&l).unwrap();
        check_proof(&p).unwrap_or_else(|e| panic!("{e}\n{p}"));
        let clean = Linking::new_unchecked(cleanse(&l.host).0, l.links.clone());
        assert_eq!(translate(&p).unwrap(), clean, "{p}");
        p
    }

    #[test]
    fn identity_example() {
        let p = round_trip("(ex x. ~P(x)) | (all y. P(y))\nlinks: (0 1)");
        assert_eq!(p.to_string(), "(par 0\n  (forall 1 y\n    (exists 0 x y (~P(x))\n      (ax ~P(y)))))");
    }

    #[test]
    fn axiom() {
        assert_eq!(round_trip("P, ~P\nlinks: (0 1)").to_string(), "(ax P)");
    }

    #[test]
    fn prenex_and_fig3() {
        round_trip("~P | all x. ~Q(x), ex y. (P * Q(y))\nlinks: (0 2) (1 3)");
        round_trip("all x. ~P(f(x)), ex z. (P(z) * (~Q(z) | Q(z)))\nlinks: (0 1) (2 3)");
        round_trip("P * Q, ~Q, ~P\nlinks: (0 3) (1 2)");
    }

    #[test]
    fn extended_cut_trivial_sigma() {
        let p = round_trip("P(f(x)), cut{~P(f(x)) ; P(f(x))}, ex z. ~P(z)\nlinks: (0 2) (1 3)");
        let s = format!("{p}");
        assert!(s.contains("xcut ((x1 x))"), "{s}");
    }

    #[test]
    fn extended_cut_nontrivial_sigma() {
        let p = round_trip("P(f(x)), cut{~P(y) ; P(y)}, ex z. ~P(z)\nlinks: (0 2) (1 3)");
        assert!(format!("{p}").contains("xcut ((y f(x)))"), "{p}");
    }

    #[test]
    fn incorrect_is_rejected() {
        let l = Linking::parse("~P * all x. ~Q(x), ex y. (P | Q(y))\nlinks: (0 2) (1 3)").unwrap();
        assert!(matches!(sequentialize(&l), Err(SequentializeError::NotCorrect(_))));
    }
}
