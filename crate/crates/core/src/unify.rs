//! First-order unification of the equations induced by a linking.
//!
//! Universal and free variables are rigid; existential (and cut) variables are
//! solvable. The solver is union-find over a term graph with the occurs check
//! postponed to one cycle-detection pass. Its output is a triangular
//! substitution over a shared store, so that neither the mgu nor the
//! precedences ever require expanding a binding.

use crate::syntax::{FreshSupply, Sequent, Sym, Term};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarClass {
    Existential,
    Universal,
    Free,
}

#[derive(Debug, Clone, Default)]
pub struct EquationSet {
    pub equations: Vec<(Term, Term)>,
    pub classes: BTreeMap<Sym, VarClass>,
    /// Names fresh variables must avoid.
    pub reserved: BTreeSet<Sym>,
}

impl EquationSet {
    pub fn class(&self, v: &Sym) -> VarClass {
        self.classes.get(v).copied().unwrap_or(VarClass::Free)
    }

    pub fn push(&mut self, s: Term, t: Term) {
        let mut names = BTreeSet::new();
        s.symbols_into(&mut names);
        t.symbols_into(&mut names);
        self.reserved.extend(names);
        self.equations.push((s, t));
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnifyError {
    #[error("link {0} joins atoms of different arity or non-dual predicates")]
    BadLink(usize),
}

/// Equations of a linking on a clean, cut-free (encoded) sequent. Each link
/// between P(s..) and ~P(t..) contributes s_i = t_i, oriented by leaf order.
pub fn equations_of(seq: &Sequent, links: &[(usize, usize)]) -> Result<EquationSet, UnifyError> {
    let mut e = EquationSet::default();
    fn classify(f: &crate::syntax::Formula, e: &mut EquationSet) {
        use crate::syntax::Formula::*;
        match f {
            Atom(_) => {}
            Tensor(a, b) | Par(a, b) => {
                classify(a, e);
                classify(b, e);
            }
            Forall(x, a) => {
                e.classes.insert(x.clone(), VarClass::Universal);
                classify(a, e);
            }
            Exists(x, a) => {
                e.classes.insert(x.clone(), VarClass::Existential);
                classify(a, e);
            }
        }
    }
    for f in &seq.formulas {
        classify(f, &mut e);
    }
    e.reserved = seq.symbols();
    for v in seq.free_vars() {
        e.classes.entry(v).or_insert(VarClass::Free);
    }
    let atoms = seq.leaf_atoms();
    for (i, &(a, b)) in links.iter().enumerate() {
        let (a, b) = (a.min(b), a.max(b));
        let (Some(x), Some(y)) = (atoms.get(a), atoms.get(b)) else {
            return Err(UnifyError::BadLink(i));
        };
        if !x.linkable(y) {
            return Err(UnifyError::BadLink(i));
        }
        for (s, t) in x.args.iter().zip(&y.args) {
            e.equations.push((s.clone(), t.clone()));
        }
    }
    Ok(e)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NotUnifiable {
    #[error("symbol clash: {0} vs {1}")]
    Clash(String, String),
    #[error("occurs check: {0} would contain itself")]
    Occurs(Sym),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("expanded term would have {size} nodes, over the cap of {cap}")]
pub struct CapExceeded {
    pub size: u128,
    pub cap: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SNode {
    Var(Sym),
    App(Sym, Vec<usize>),
}

/// Append-only DAG of terms; children always precede parents.
#[derive(Debug, Clone, Default)]
pub struct TermStore {
    nodes: Vec<SNode>,
    vars: HashMap<Sym, usize>,
}

impl TermStore {
    pub fn var(&mut self, v: &Sym) -> usize {
        if let Some(&i) = self.vars.get(v) {
            return i;
        }
        self.nodes.push(SNode::Var(v.clone()));
        self.vars.insert(v.clone(), self.nodes.len() - 1);
        self.nodes.len() - 1
    }

    pub fn app(&mut self, f: &Sym, args: Vec<usize>) -> usize {
        self.nodes.push(SNode::App(f.clone(), args));
        self.nodes.len() - 1
    }

    pub fn node(&self, i: usize) -> &SNode {
        &self.nodes[i]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// The stored term, without resolving variables.
    pub fn term(&self, i: usize) -> Term {
        match &self.nodes[i] {
            SNode::Var(v) => Term::Var(v.clone()),
            SNode::App(f, args) => Term::App(f.clone(), args.iter().map(|&a| self.term(a)).collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Precedence {
    pub existential: Sym,
    pub universal: Sym,
}

/// Ordered bindings x1 <- t1, ..., xn <- tn whose sequential composition is the mgu.
#[derive(Debug, Clone)]
pub struct TriangularSubstitution {
    pub store: TermStore,
    pub bindings: Vec<(Sym, usize)>,
    /// Solved existential variables with no constraint, each standing for a fresh free variable.
    pub unconstrained: Vec<(Sym, Sym)>,
    pub classes: BTreeMap<Sym, VarClass>,
    /// Nodes allocated by the solver's working graph.
    pub work_nodes: usize,
    index: HashMap<Sym, usize>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum WKind {
    Flex,
    Rigid,
    Fun,
}

struct Work<'a> {
    sym: Vec<Sym>,
    kind: Vec<WKind>,
    args: Vec<Vec<usize>>,
    parent: Vec<usize>,
    rank: Vec<u8>,
    schema: Vec<Option<usize>>,
    vars: HashMap<Sym, usize>,
    eqs: &'a EquationSet,
}

impl<'a> Work<'a> {
    fn intern(&mut self, t: &Term) -> usize {
        match t {
            Term::Var(v) => {
                if let Some(&i) = self.vars.get(v) {
                    return i;
                }
                let k = if self.eqs.class(v) == VarClass::Existential { WKind::Flex } else { WKind::Rigid };
                let i = self.push(v.clone(), k, Vec::new());
                self.vars.insert(v.clone(), i);
                i
            }
            Term::App(f, args) => {
                let a = args.iter().map(|s| self.intern(s)).collect();
                self.push(f.clone(), WKind::Fun, a)
            }
        }
    }

    fn push(&mut self, s: Sym, k: WKind, args: Vec<usize>) -> usize {
        let i = self.sym.len();
        self.sym.push(s);
        self.kind.push(k);
        self.args.push(args);
        self.parent.push(i);
        self.rank.push(0);
        self.schema.push(if k == WKind::Flex { None } else { Some(i) });
        i
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn show(&self, i: usize) -> String {
        match self.kind[i] {
            WKind::Fun => {
                let a: Vec<String> = self.args[i].iter().map(|&j| self.show(j)).collect();
                if a.is_empty() {
                    Term::App(self.sym[i].clone(), vec![]).to_string()
                } else {
                    format!("{}({})", self.sym[i], a.join(","))
                }
            }
            _ => self.sym[i].to_string(),
        }
    }

    fn union(&mut self, a: usize, b: usize) -> Result<(), NotUnifiable> {
        let mut stack = vec![(a, b)];
        while let Some((a, b)) = stack.pop() {
            let (ra, rb) = (self.find(a), self.find(b));
            if ra == rb {
                continue;
            }
            let schema = match (self.schema[ra], self.schema[rb]) {
                (None, s) | (s, None) => s,
                (Some(x), Some(y)) => {
                    let ok = self.kind[x] == WKind::Fun
                        && self.kind[y] == WKind::Fun
                        && self.sym[x] == self.sym[y]
                        && self.args[x].len() == self.args[y].len();
                    if !ok {
                        return Err(NotUnifiable::Clash(self.show(x), self.show(y)));
                    }
                    for k in 0..self.args[x].len() {
                        stack.push((self.args[x][k], self.args[y][k]));
                    }
                    Some(x)
                }
            };
            let (hi, lo) = if self.rank[ra] >= self.rank[rb] { (ra, rb) } else { (rb, ra) };
            if self.rank[ra] == self.rank[rb] {
                self.rank[hi] += 1;
            }
            self.parent[lo] = hi;
            self.schema[hi] = schema;
        }
        Ok(())
    }
}

/// Solve the equations. Universal and free variables are treated as constants.
pub fn unify(e: &EquationSet) -> Result<TriangularSubstitution, NotUnifiable> {
    let mut w = Work {
        sym: Vec::new(),
        kind: Vec::new(),
        args: Vec::new(),
        parent: Vec::new(),
        rank: Vec::new(),
        schema: Vec::new(),
        vars: HashMap::new(),
        eqs: e,
    };
    // Sweep order of existential variables.
    let mut sweep: Vec<Sym> = Vec::new();
    let mut pairs = Vec::with_capacity(e.equations.len());
    for (s, t) in &e.equations {
        let mut vs = Vec::new();
        s.vars_into(&mut vs);
        t.vars_into(&mut vs);
        for v in vs {
            if e.class(&v) == VarClass::Existential && !sweep.contains(&v) {
                sweep.push(v);
            }
        }
        let a = w.intern(s);
        let b = w.intern(t);
        pairs.push((a, b));
    }
    for (a, b) in pairs {
        w.union(a, b)?;
    }
    let n = w.sym.len();

    // Class members (existential variables in sweep order).
    let mut ex_of: HashMap<usize, Vec<Sym>> = HashMap::new();
    for v in &sweep {
        let r = w.find(w.vars[v]);
        ex_of.entry(r).or_default().push(v.clone());
    }

    // Postponed occurs check: the class graph must be acyclic.
    let mut color = vec![0u8; n];
    for start in 0..n {
        let r0 = w.find(start);
        if color[r0] != 0 {
            continue;
        }
        let mut stack = vec![(r0, 0usize)];
        color[r0] = 1;
        while let Some(&mut (r, ref mut k)) = stack.last_mut() {
            let children = match w.schema[r] {
                Some(s) if w.kind[s] == WKind::Fun => w.args[s].clone(),
                _ => Vec::new(),
            };
            if *k < children.len() {
                let c = children[*k];
                *k += 1;
                let rc = w.find(c);
                match color[rc] {
                    0 => {
                        color[rc] = 1;
                        stack.push((rc, 0));
                    }
                    1 => {
                        let culprit = ex_of
                            .get(&rc)
                            .and_then(|v| v.first().cloned())
                            .or_else(|| stack.iter().find_map(|(r, _)| ex_of.get(r).and_then(|v| v.first().cloned())))
                            .unwrap_or_else(|| w.sym[rc].clone());
                        return Err(NotUnifiable::Occurs(culprit));
                    }
                    _ => {}
                }
            } else {
                color[r] = 2;
                stack.pop();
            }
        }
    }

    let mut out = TriangularSubstitution {
        store: TermStore::default(),
        bindings: Vec::new(),
        unconstrained: Vec::new(),
        classes: e.classes.clone(),
        work_nodes: n,
        index: HashMap::new(),
    };
    let mut supply = FreshSupply::avoiding(e.reserved.clone());
    for v in e.classes.keys() {
        supply.reserve(v);
    }
    for (s, t) in &e.equations {
        let mut names = BTreeSet::new();
        s.symbols_into(&mut names);
        t.symbols_into(&mut names);
        names.iter().for_each(|x| supply.reserve(x));
    }

    let mut emitted = vec![false; n];
    let mut reference: Vec<Option<usize>> = vec![None; n];

    // Store node standing for a class.
    fn refer(
        r: usize,
        w: &mut Work,
        ex_of: &HashMap<usize, Vec<Sym>>,
        reference: &mut Vec<Option<usize>>,
        store: &mut TermStore,
    ) -> usize {
        if let Some(i) = reference[r] {
            return i;
        }
        let i = if let Some(vs) = ex_of.get(&r) {
            store.var(&vs[0])
        } else {
            let s = w.schema[r].expect("class without variables has a schema");
            match w.kind[s] {
                WKind::Rigid => store.var(&w.sym[s].clone()),
                _ => {
                    let args: Vec<usize> = w.args[s].clone();
                    let a = args
                        .into_iter()
                        .map(|c| {
                            let rc = w.find(c);
                            refer(rc, w, ex_of, reference, store)
                        })
                        .collect();
                    store.app(&w.sym[s].clone(), a)
                }
            }
        };
        reference[r] = Some(i);
        i
    }

    fn emit(
        r: usize,
        w: &mut Work,
        ex_of: &HashMap<usize, Vec<Sym>>,
        emitted: &mut Vec<bool>,
        reference: &mut Vec<Option<usize>>,
        out: &mut TriangularSubstitution,
        supply: &mut FreshSupply,
    ) {
        if emitted[r] {
            return;
        }
        emitted[r] = true;
        let schema = w.schema[r];
        if let Some(s) = schema {
            if w.kind[s] == WKind::Fun {
                for c in w.args[s].clone() {
                    let rc = w.find(c);
                    emit(rc, w, ex_of, emitted, reference, out, supply);
                }
            }
        }
        let Some(vs) = ex_of.get(&r) else { return };
        let head = vs[0].clone();
        match schema {
            None => {
                let alpha = supply.fresh(head.as_str());
                out.unconstrained.push((head.clone(), alpha));
            }
            Some(s) => {
                let t = match w.kind[s] {
                    WKind::Rigid => out.store.var(&w.sym[s].clone()),
                    _ => {
                        let a = w.args[s]
                            .clone()
                            .into_iter()
                            .map(|c| {
                                let rc = w.find(c);
                                refer(rc, w, ex_of, reference, &mut out.store)
                            })
                            .collect();
                        out.store.app(&w.sym[s].clone(), a)
                    }
                };
                out.bindings.push((head.clone(), t));
            }
        }
        let hv = out.store.var(&head);
        for v in &vs[1..] {
            out.bindings.push((v.clone(), hv));
        }
    }

    for v in &sweep {
        let r = w.find(w.vars[v]);
        emit(r, &mut w, &ex_of, &mut emitted, &mut reference, &mut out, &mut supply);
    }
    out.index = out.bindings.iter().enumerate().map(|(i, (x, _))| (x.clone(), i)).collect();
    Ok(out)
}

impl TriangularSubstitution {
    pub fn binding(&self, x: &Sym) -> Option<usize> {
        self.index.get(x).map(|&i| self.bindings[i].1)
    }

    pub fn fresh_for(&self, x: &Sym) -> Option<&Sym> {
        self.unconstrained.iter().find(|(y, _)| y == x).map(|(_, a)| a)
    }

    fn class(&self, v: &Sym) -> VarClass {
        self.classes.get(v).copied().unwrap_or(VarClass::Free)
    }

    /// Size of the fully expanded image of a store node.
    fn node_sizes(&self) -> Vec<u128> {
        let mut size = vec![0u128; self.store.len()];
        let mut var_size: HashMap<&Sym, u128> = HashMap::new();
        // Bindings are ordered so that every referenced variable is bound first,
        // but store nodes are not interleaved in that order; resolve lazily.
        fn go<'a>(
            ts: &'a TriangularSubstitution,
            i: usize,
            size: &mut Vec<u128>,
            var_size: &mut HashMap<&'a Sym, u128>,
        ) -> u128 {
            if size[i] != 0 {
                return size[i];
            }
            let s = match ts.store.node(i) {
                SNode::Var(v) => match ts.binding(v) {
                    Some(b) => {
                        if let Some(&k) = var_size.get(v) {
                            k
                        } else {
                            let k = go(ts, b, size, var_size);
                            var_size.insert(v, k);
                            k
                        }
                    }
                    None => 1,
                },
                SNode::App(_, args) => {
                    let mut k: u128 = 1;
                    for &a in args {
                        k = k.saturating_add(go(ts, a, size, var_size));
                    }
                    k
                }
            };
            size[i] = s;
            s
        }
        for i in 0..self.store.len() {
            go(self, i, &mut size, &mut var_size);
        }
        size
    }

    /// Size of the mgu applied to `t`, saturating.
    pub fn expanded_size(&self, t: &Term) -> u128 {
        let sizes = self.node_sizes();
        self.size_with(t, &sizes)
    }

    fn size_with(&self, t: &Term, sizes: &[u128]) -> u128 {
        match t {
            Term::Var(v) => match self.binding(v) {
                Some(b) => sizes[b],
                None => 1,
            },
            Term::App(_, args) => args.iter().fold(1u128, |k, a| k.saturating_add(self.size_with(a, sizes))),
        }
    }

    fn expand_node(&self, i: usize, memo: &mut HashMap<usize, Term>) -> Term {
        if let Some(t) = memo.get(&i) {
            return t.clone();
        }
        let t = match self.store.node(i) {
            SNode::Var(v) => self.expand_var(v, memo),
            SNode::App(f, args) => Term::App(f.clone(), args.iter().map(|&a| self.expand_node(a, memo)).collect()),
        };
        memo.insert(i, t.clone());
        t
    }

    fn expand_var(&self, v: &Sym, memo: &mut HashMap<usize, Term>) -> Term {
        if let Some(b) = self.binding(v) {
            self.expand_node(b, memo)
        } else if let Some(a) = self.fresh_for(v) {
            Term::Var(a.clone())
        } else {
            Term::Var(v.clone())
        }
    }

    fn expand(&self, t: &Term, memo: &mut HashMap<usize, Term>) -> Term {
        match t {
            Term::Var(v) => self.expand_var(v, memo),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| self.expand(a, memo)).collect()),
        }
    }

    /// Explicit image of every solved variable, provided each stays under `cap` nodes.
    pub fn explicit(&self, cap: usize) -> Result<BTreeMap<Sym, Term>, CapExceeded> {
        let sizes = self.node_sizes();
        for (_, b) in &self.bindings {
            if sizes[*b] > cap as u128 {
                return Err(CapExceeded { size: sizes[*b], cap });
            }
        }
        let mut memo = HashMap::new();
        let mut out = BTreeMap::new();
        for (x, b) in &self.bindings {
            out.insert(x.clone(), self.expand_node(*b, &mut memo));
        }
        for (x, a) in &self.unconstrained {
            out.insert(x.clone(), Term::Var(a.clone()));
        }
        Ok(out)
    }

    pub fn solved_vars(&self) -> impl Iterator<Item = &Sym> {
        self.bindings.iter().map(|(x, _)| x).chain(self.unconstrained.iter().map(|(x, _)| x))
    }

    pub fn dump(&self) -> String {
        let mut s = String::new();
        for (x, t) in &self.bindings {
            s.push_str(&format!("{x} <- {}\n", self.store.term(*t)));
        }
        for (x, a) in &self.unconstrained {
            s.push_str(&format!("{x} <- {a}\n"));
        }
        s
    }
}

impl fmt::Display for TriangularSubstitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.dump())
    }
}

/// The mgu applied to `t`, fully expanded, refusing results over `cap` nodes.
pub fn apply_mgu(s: &TriangularSubstitution, t: &Term, cap: usize) -> Result<Term, CapExceeded> {
    let size = s.expanded_size(t);
    if size > cap as u128 {
        return Err(CapExceeded { size, cap });
    }
    Ok(s.expand(t, &mut HashMap::new()))
}

/// Pairs (x, y) such that the mgu assigns x a term containing universal y.
/// Each binding's set is the union of its own universals and those of the
/// variables it references, so the cost is quadratic and no term is expanded.
pub fn precedences(s: &TriangularSubstitution) -> Vec<Precedence> {
    let universals: Vec<Sym> =
        s.classes.iter().filter(|(_, c)| **c == VarClass::Universal).map(|(v, _)| v.clone()).collect();
    let uidx: HashMap<&Sym, usize> = universals.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let words = universals.len().div_ceil(64);
    let mut node_bits: Vec<Option<Vec<u64>>> = vec![None; s.store.len()];
    let mut var_bits: HashMap<Sym, Vec<u64>> = HashMap::new();
    let mut out = Vec::new();

    fn bits(
        i: usize,
        s: &TriangularSubstitution,
        uidx: &HashMap<&Sym, usize>,
        words: usize,
        node_bits: &mut Vec<Option<Vec<u64>>>,
        var_bits: &HashMap<Sym, Vec<u64>>,
    ) -> Vec<u64> {
        if let Some(b) = &node_bits[i] {
            return b.clone();
        }
        let mut b = vec![0u64; words];
        match s.store.node(i) {
            SNode::Var(v) => match s.class(v) {
                VarClass::Universal => {
                    let k = uidx[v];
                    b[k / 64] |= 1 << (k % 64);
                }
                VarClass::Existential => {
                    if let Some(vb) = var_bits.get(v) {
                        b.copy_from_slice(vb);
                    }
                }
                VarClass::Free => {}
            },
            SNode::App(_, args) => {
                for &a in args {
                    let c = bits(a, s, uidx, words, node_bits, var_bits);
                    b.iter_mut().zip(c).for_each(|(x, y)| *x |= y);
                }
            }
        }
        node_bits[i] = Some(b.clone());
        b
    }

    for (x, t) in &s.bindings {
        let b = bits(*t, s, &uidx, words, &mut node_bits, &var_bits);
        for (k, y) in universals.iter().enumerate() {
            if b[k / 64] >> (k % 64) & 1 == 1 {
                out.push(Precedence { existential: x.clone(), universal: y.clone() });
            }
        }
        var_bits.insert(x.clone(), b);
    }
    out
}
