//! Independent reference implementations used as test oracles: a naive
//! Robinson unifier over explicit terms and exhaustive switching enumeration
//! on a graph built from scratch.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use unets::nets::Linking;
use unets::syntax::{cleanse, Formula, Sym, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Leaf,
    Tensor,
    Par,
    All,
    Ex,
}

struct Node {
    kind: Kind,
    parent: Option<usize>,
    var: Option<Sym>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleVerdict {
    Correct,
    NotUnifiable,
    Incorrect,
    /// More switchings than the cap, or an mgu larger than the cap.
    TooBig,
}

fn add(f: &Formula, parent: Option<usize>, nodes: &mut Vec<Node>, leaves: &mut Vec<(usize, Vec<Term>)>) {
    let (kind, var) = match f {
        Formula::Atom(_) => (Kind::Leaf, None),
        Formula::Tensor(..) => (Kind::Tensor, None),
        Formula::Par(..) => (Kind::Par, None),
        Formula::Forall(x, _) => (Kind::All, Some(x.clone())),
        Formula::Exists(x, _) => (Kind::Ex, Some(x.clone())),
    };
    let id = nodes.len();
    nodes.push(Node { kind, parent, var });
    match f {
        Formula::Atom(a) => leaves.push((id, a.args.clone())),
        Formula::Tensor(a, b) | Formula::Par(a, b) => {
            add(a, Some(id), nodes, leaves);
            add(b, Some(id), nodes, leaves);
        }
        Formula::Forall(_, a) | Formula::Exists(_, a) => add(a, Some(id), nodes, leaves),
    }
}

/// Explicit substitution over existential variables; rigid variables behave
/// as constants.
fn walk(t: &Term, s: &BTreeMap<Sym, Term>) -> Term {
    match t {
        Term::Var(v) => match s.get(v) {
            Some(u) => walk(u, s),
            None => t.clone(),
        },
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| walk(a, s)).collect()),
    }
}

fn occurs(v: &Sym, t: &Term) -> bool {
    match t {
        Term::Var(w) => v == w,
        Term::App(_, args) => args.iter().any(|a| occurs(v, a)),
    }
}

fn robinson(eqs: &[(Term, Term)], flexible: &BTreeSet<Sym>, cap: usize) -> Result<BTreeMap<Sym, Term>, bool> {
    let mut s: BTreeMap<Sym, Term> = BTreeMap::new();
    let mut stack: Vec<(Term, Term)> = eqs.to_vec();
    while let Some((a, b)) = stack.pop() {
        let (a, b) = (walk(&a, &s), walk(&b, &s));
        if a.size() > cap || b.size() > cap {
            return Err(true);
        }
        if a == b {
            continue;
        }
        match (&a, &b) {
            (Term::Var(v), t) | (t, Term::Var(v)) if flexible.contains(v) => {
                if occurs(v, t) {
                    return Err(false);
                }
                s.insert(v.clone(), t.clone());
            }
            (Term::App(f, xs), Term::App(g, ys)) if f == g && xs.len() == ys.len() => {
                stack.extend(xs.iter().cloned().zip(ys.iter().cloned()));
            }
            _ => return Err(false),
        }
    }
    Ok(s)
}

struct Graph {
    n: usize,
    /// (a, b, the switched vertex the edge enters, if any).
    edges: Vec<(usize, usize, Option<usize>)>,
    switched: Vec<usize>,
}

impl Graph {
    fn choices(&self) -> Vec<Vec<usize>> {
        self.switched.iter().map(|&v| (0..self.edges.len()).filter(|&e| self.edges[e].2 == Some(v)).collect()).collect()
    }

    fn switching_count(&self) -> Option<u64> {
        self.choices().iter().try_fold(1u64, |acc, c| acc.checked_mul(c.len().max(1) as u64))
    }
}

fn build(l: &Linking, max_nodes: usize) -> Result<Graph, OracleVerdict> {
    // Cuts become existentially closed tensors over the left formula's free variables.
    let (host, _) = cleanse(&l.host);
    let mut formulas = host.formulas.clone();
    for (a, b) in &host.cuts {
        let mut f = Formula::tensor(a.clone(), b.clone());
        for x in a.free_vars().into_iter().rev() {
            f = Formula::Exists(x, Box::new(f));
        }
        formulas.push(f);
    }
    let mut nodes = Vec::new();
    let mut leaves = Vec::new();
    for f in &formulas {
        add(f, None, &mut nodes, &mut leaves);
    }
    let flexible: BTreeSet<Sym> =
        nodes.iter().filter(|n| n.kind == Kind::Ex).filter_map(|n| n.var.clone()).collect();
    let mut eqs = Vec::new();
    for &(a, b) in &l.links {
        for (s, t) in leaves[a].1.iter().zip(&leaves[b].1) {
            eqs.push((s.clone(), t.clone()));
        }
    }
    let s = match robinson(&eqs, &flexible, max_nodes) {
        Ok(s) => s,
        Err(true) => return Err(OracleVerdict::TooBig),
        Err(false) => return Err(OracleVerdict::NotUnifiable),
    };
    let binder = |v: &Sym| nodes.iter().position(|n| n.var.as_ref() == Some(v)).unwrap();
    let mut edges: Vec<(usize, usize, Option<usize>)> = Vec::new();
    for (i, n) in nodes.iter().enumerate() {
        if let Some(p) = n.parent {
            let sw = matches!(nodes[p].kind, Kind::Par | Kind::All).then_some(p);
            edges.push((i, p, sw));
        }
    }
    for &(a, b) in &l.links {
        edges.push((leaves[a].0, leaves[b].0, None));
    }
    // Leap x -> y whenever the mgu image of existential x contains universal y.
    for x in &flexible {
        let t = walk(&Term::Var(x.clone()), &s);
        if t.size() > max_nodes {
            return Err(OracleVerdict::TooBig);
        }
        let mut vs = Vec::new();
        t.vars_into(&mut vs);
        for y in vs {
            if nodes.iter().any(|n| n.kind == Kind::All && n.var.as_ref() == Some(&y)) {
                let u = binder(&y);
                edges.push((binder(x), u, Some(u)));
            }
        }
    }
    let switched = (0..nodes.len()).filter(|&v| matches!(nodes[v].kind, Kind::Par | Kind::All)).collect();
    Ok(Graph { n: nodes.len(), edges, switched })
}

/// Decide correctness by brute force: unify, then enumerate every switching.
pub fn oracle(l: &Linking, max_switchings: u64, max_nodes: usize) -> OracleVerdict {
    let g = match build(l, max_nodes) {
        Ok(g) => g,
        Err(v) => return v,
    };
    match g.switching_count() {
        Some(t) if t <= max_switchings => {}
        _ => return OracleVerdict::TooBig,
    }
    let choices = g.choices();
    let mut pick = vec![0usize; g.switched.len()];
    loop {
        let kept = (0..g.edges.len()).filter(|&e| match g.edges[e].2 {
            None => true,
            Some(v) => {
                let k = g.switched.iter().position(|&w| w == v).unwrap();
                choices[k][pick[k]] == e
            }
        });
        if !is_tree(g.n, kept.map(|e| (g.edges[e].0, g.edges[e].1))) {
            return OracleVerdict::Incorrect;
        }
        // Odometer over the switch choices.
        let mut k = 0;
        loop {
            if k == pick.len() {
                return OracleVerdict::Correct;
            }
            pick[k] += 1;
            if pick[k] < choices[k].len() {
                break;
            }
            pick[k] = 0;
            k += 1;
        }
    }
}

/// Number of switchings of a unifiable linking's graph.
pub fn switching_count(l: &Linking) -> Option<u64> {
    build(l, 1_000_000).ok()?.switching_count()
}

fn is_tree(n: usize, edges: impl Iterator<Item = (usize, usize)>) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    let mut count = 0;
    for (a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra == rb {
            return false;
        }
        parent[ra] = rb;
        count += 1;
    }
    count + 1 == n
}

/// Least-squares fit y = a + b x, returning (a, b, r²).
pub fn affine_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (a, b, r2)
}

pub const PRENEX_GOOD: &str = "~P | all x. ~Q(x), ex y. (P * Q(y))\nlinks: (0 2) (1 3)";
pub const PRENEX_BAD: &str = "~P * all x. ~Q(x), ex y. (P | Q(y))\nlinks: (0 2) (1 3)";
pub const IDENTITY: &str = "(ex x. ~P(x)) | (all y. P(y))\nlinks: (0 1)";
pub const CANON_LEFT: &str = "(exists 0 x f(c) (~P(x)) (exists 1 y f(c) (P(y)) (ax ~P(f(c)))))";
pub const CANON_RIGHT: &str = "(exists 1 y g(z) (P(y)) (exists 0 x g(z) (~P(x)) (ax ~P(g(z)))))";
pub const STRAIGHT: &str = "(par 0 (perm (0 2 1) (tensor (ax ~P(a)) (ax P(a)))))";
pub const CROSSED: &str = "(par 0 (perm (2 0 1) (tensor (ax ~P(a)) (ax P(a)))))";
pub const XCUT_TRIVIAL: &str = "P(f(x)), cut{~P(f(x)) ; P(f(x))}, ex z. ~P(z)\nlinks: (0 2) (1 3)";
pub const XCUT_SIGMA: &str = "P(f(x)), cut{~P(y) ; P(y)}, ex z. ~P(z)\nlinks: (0 2) (1 3)";
