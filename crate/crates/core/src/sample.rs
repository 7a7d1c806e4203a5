//! Random proofs and linkings for property tests and benchmarks.
//!
//! Proofs are grown forward from axioms. Every axiom introduces fresh free
//! variables `u<n>` and every quantifier a fresh name `x<n>`, so conclusions
//! are clean. Cuts are introduced against η-expansions of a conclusion, whose
//! other side then keeps growing.

use crate::calculus::{check_proof, translate, Proof};
use crate::nets::Linking;
use crate::syntax::{Atom, CutSequent, Formula, Sym, Term};
use rand::seq::SliceRandom;
use rand::Rng;

#[derive(Debug, Clone)]
pub struct SampleConfig {
    /// Axioms in the proof, at least one.
    pub max_axioms: usize,
    /// Unary rules attempted per axiom.
    pub ops_per_axiom: usize,
    /// Cut rules attempted.
    pub max_cuts: usize,
    /// Depth of axiom argument terms.
    pub term_depth: usize,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig { max_axioms: 4, ops_per_axiom: 3, max_cuts: 0, term_depth: 2 }
    }
}

impl SampleConfig {
    pub fn with_cuts(max_cuts: usize) -> Self {
        SampleConfig { max_cuts, ..SampleConfig::default() }
    }
}

struct Gen<'r, R: Rng> {
    rng: &'r mut R,
    next: usize,
    cfg: SampleConfig,
}

#[derive(Clone)]
struct Item {
    proof: Proof,
    seq: CutSequent,
}

impl Item {
    fn new(proof: Proof) -> Item {
        let seq = check_proof(&proof).expect("sampler builds valid proofs");
        Item { proof, seq }
    }
}

/// Order moving member `from` to position `to`, others keeping their order.
fn moving(n: usize, from: usize, to: usize) -> Vec<usize> {
    let mut o: Vec<usize> = (0..n).filter(|&i| i != from).collect();
    o.insert(to, from);
    o
}

fn perm(p: Proof, order: Vec<usize>) -> Proof {
    if order.iter().enumerate().all(|(i, &j)| i == j) {
        p
    } else {
        Proof::Perm { order, premise: Box::new(p) }
    }
}

impl<R: Rng> Gen<'_, R> {
    fn fresh(&mut self, base: &str) -> Sym {
        self.next += 1;
        Sym::new(&format!("{base}{}", self.next))
    }

    fn term(&mut self, depth: usize, vars: &[Sym]) -> Term {
        let leaf = depth == 0 || self.rng.gen_bool(0.5);
        if leaf {
            if !vars.is_empty() && self.rng.gen_bool(0.7) {
                Term::Var(vars.choose(self.rng).unwrap().clone())
            } else {
                Term::constant(["a", "b"][self.rng.gen_range(0..2)])
            }
        } else if self.rng.gen_bool(0.5) {
            Term::app("f", vec![self.term(depth - 1, vars)])
        } else {
            Term::app("g", vec![self.term(depth - 1, vars), self.term(depth - 1, vars)])
        }
    }

    fn axiom(&mut self) -> Proof {
        let nv = self.rng.gen_range(0..=2);
        let vars: Vec<Sym> = (0..nv).map(|_| self.fresh("u")).collect();
        let (name, arity) = [("P", 1), ("Q", 2), ("R", 0)][self.rng.gen_range(0..3)];
        let args = (0..arity).map(|_| self.term(self.cfg.term_depth, &vars)).collect();
        Proof::ax(Atom::new(name, self.rng.gen_bool(0.5), args))
    }

    fn tensor(&mut self, a: Item, b: Item) -> Item {
        let (na, nb) = (a.seq.formulas.len(), b.seq.formulas.len());
        let i = self.rng.gen_range(0..na);
        let j = self.rng.gen_range(0..nb);
        let left = perm(a.proof, moving(na, i, na - 1));
        let right = perm(b.proof, moving(nb, j, 0));
        Item::new(Proof::Tensor { left: Box::new(left), right: Box::new(right) })
    }

    fn par(&mut self, a: Item) -> Item {
        let n = a.seq.formulas.len();
        if n < 2 {
            return a;
        }
        let i = self.rng.gen_range(0..n);
        let mut j = self.rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        // Bring i then j to the front, keeping the rest in order.
        let mut order = vec![i, j];
        order.extend((0..n).filter(|&k| k != i && k != j));
        Item::new(Proof::Par { at: 0, premise: Box::new(perm(a.proof, order)) })
    }

    fn forall(&mut self, a: Item) -> Item {
        let mut cands = Vec::new();
        for (i, f) in a.seq.formulas.iter().enumerate() {
            for v in f.free_vars() {
                let elsewhere = a.seq.formulas.iter().enumerate().any(|(k, g)| k != i && g.has_free(&v));
                if !elsewhere {
                    cands.push((i, v));
                }
            }
        }
        let Some((at, var)) = cands.choose(self.rng).cloned() else { return a };
        Item::new(Proof::Forall { at, var, premise: Box::new(a.proof) })
    }

    fn exists(&mut self, a: Item) -> Item {
        let n = a.seq.formulas.len();
        let at = self.rng.gen_range(0..n);
        let f = a.seq.formulas[at].clone();
        let binders = f.binders();
        let mut terms = Vec::new();
        for atom in f.atoms() {
            for t in &atom.args {
                collect_subterms(t, &mut terms);
            }
        }
        terms.retain(|t| {
            let mut vs = Vec::new();
            t.vars_into(&mut vs);
            vs.iter().all(|v| !binders.contains(v))
        });
        let x = self.fresh("x");
        let (witness, body) = match terms.choose(self.rng).cloned() {
            Some(t) if !self.rng.gen_bool(0.15) => {
                let all = self.rng.gen_bool(0.6);
                let body = abstract_formula(&f, &t, &x, &mut || all || self.rng.gen_bool(0.5));
                if body.has_free(&x) {
                    (Some(t), body)
                } else {
                    (None, f.clone())
                }
            }
            _ => (None, f.clone()),
        };
        Item::new(Proof::Exists { at, var: x, witness, body, premise: Box::new(a.proof) })
    }

    /// Cut a conclusion against its η-expansion; the expansion's other side
    /// replaces it.
    fn cut(&mut self, a: Item) -> Item {
        let n = a.seq.formulas.len();
        let i = self.rng.gen_range(0..n);
        let f = a.seq.formulas[i].clone();
        let left = perm(a.proof, moving(n, i, n - 1));
        let eta = self.eta(&f);
        let p = Proof::Cut { left: Box::new(left), right: Box::new(eta) };
        Item::new(perm(p, moving(n, n - 1, i)))
    }

    /// A proof of `~A', A''` where both sides rename A's bound variables apart.
    fn eta(&mut self, f: &Formula) -> Proof {
        match f {
            Formula::Atom(a) => Proof::ax(a.dual()),
            Formula::Tensor(a, b) | Formula::Par(a, b) => {
                let pa = self.eta(a);
                let pb = self.eta(b);
                if matches!(f, Formula::Tensor(..)) {
                    // [~A, A] (x) [B, ~B] gives [~A, A*B, ~B]; par the duals.
                    let t = Proof::Tensor { left: Box::new(pa), right: Box::new(perm(pb, vec![1, 0])) };
                    Proof::Par { at: 0, premise: Box::new(perm(t, vec![0, 2, 1])) }
                } else {
                    // [A, ~A] (x) [~B, B] gives [A, ~A*~B, B].
                    let t = Proof::Tensor { left: Box::new(perm(pa, vec![1, 0])), right: Box::new(pb) };
                    Proof::Par { at: 1, premise: Box::new(perm(t, vec![1, 0, 2])) }
                }
            }
            Formula::Forall(x, b) | Formula::Exists(x, b) => {
                // [~B(y), B(y)], then the existential side abstracts y to z
                // and the universal side generalizes y.
                let y = self.fresh("x");
                let z = self.fresh("x");
                let inner = self.eta(&b.rename_free(x, &y));
                let s = check_proof(&inner).expect("eta is valid");
                let (ex_at, all_at) = if matches!(f, Formula::Forall(..)) { (0, 1) } else { (1, 0) };
                let body = s.formulas[ex_at].rename_free(&y, &z);
                let witness = body.has_free(&z).then(|| Term::Var(y.clone()));
                let ex = Proof::Exists { at: ex_at, var: z, witness, body, premise: Box::new(inner) };
                Proof::Forall { at: all_at, var: y, premise: Box::new(ex) }
            }
        }
    }

    fn proof(&mut self) -> Proof {
        let k = self.rng.gen_range(1..=self.cfg.max_axioms.max(1));
        let mut pool: Vec<Item> = (0..k).map(|_| Item::new(self.axiom())).collect();
        let mut cuts_left = self.cfg.max_cuts;
        let ops = self.cfg.ops_per_axiom * k;
        for _ in 0..ops {
            let idx = self.rng.gen_range(0..pool.len());
            let it = pool.swap_remove(idx);
            let it = match self.rng.gen_range(0..10) {
                0..=2 => self.exists(it),
                3..=4 => self.forall(it),
                5..=7 => self.par(it),
                _ if cuts_left > 0 => {
                    cuts_left -= 1;
                    self.cut(it)
                }
                _ => self.exists(it),
            };
            pool.push(it);
            if pool.len() > 1 && self.rng.gen_bool(0.3) {
                let a = pool.swap_remove(self.rng.gen_range(0..pool.len()));
                let b = pool.swap_remove(self.rng.gen_range(0..pool.len()));
                let t = self.tensor(a, b);
                pool.push(t);
            }
        }
        while pool.len() > 1 {
            let a = pool.swap_remove(self.rng.gen_range(0..pool.len()));
            let b = pool.swap_remove(self.rng.gen_range(0..pool.len()));
            let t = self.tensor(a, b);
            pool.push(t);
        }
        let mut it = pool.pop().unwrap();
        while cuts_left > 0 && self.cfg.max_cuts > 0 && it.seq.cuts.is_empty() {
            cuts_left -= 1;
            it = self.cut(it);
        }
        it.proof
    }
}

fn collect_subterms(t: &Term, out: &mut Vec<Term>) {
    if !out.contains(t) {
        out.push(t.clone());
    }
    if let Term::App(_, args) = t {
        args.iter().for_each(|a| collect_subterms(a, out));
    }
}

fn abstract_term(s: &Term, t: &Term, x: &Sym, pick: &mut dyn FnMut() -> bool) -> Term {
    if s == t && pick() {
        return Term::Var(x.clone());
    }
    match s {
        Term::App(g, args) => Term::App(g.clone(), args.iter().map(|a| abstract_term(a, t, x, pick)).collect()),
        v => v.clone(),
    }
}

/// Replace chosen occurrences of `t` in `f` by `x`.
fn abstract_formula(f: &Formula, t: &Term, x: &Sym, pick: &mut dyn FnMut() -> bool) -> Formula {
    match f {
        Formula::Atom(a) => {
            let mut a = a.clone();
            a.args = a.args.iter().map(|s| abstract_term(s, t, x, pick)).collect();
            Formula::Atom(a)
        }
        Formula::Tensor(a, b) => Formula::tensor(abstract_formula(a, t, x, pick), abstract_formula(b, t, x, pick)),
        Formula::Par(a, b) => Formula::par(abstract_formula(a, t, x, pick), abstract_formula(b, t, x, pick)),
        Formula::Forall(v, b) => Formula::Forall(v.clone(), Box::new(abstract_formula(b, t, x, pick))),
        Formula::Exists(v, b) => Formula::Exists(v.clone(), Box::new(abstract_formula(b, t, x, pick))),
    }
}

/// A random valid proof; cut-free when `cfg.max_cuts` is zero.
pub fn random_proof<R: Rng>(rng: &mut R, cfg: &SampleConfig) -> Proof {
    Gen { rng, next: 0, cfg: cfg.clone() }.proof()
}

/// The net of a random proof, hence correct.
pub fn random_net<R: Rng>(rng: &mut R, cfg: &SampleConfig) -> Linking {
    translate(&random_proof(rng, cfg)).expect("sampled proofs translate")
}

/// A uniformly random linking on the host of `l`, pairing each predicate's
/// positive and negative occurrences at random. Usually incorrect.
pub fn relink<R: Rng>(rng: &mut R, l: &Linking) -> Linking {
    let atoms = l.host.leaf_atoms();
    let mut groups: std::collections::BTreeMap<(String, usize), (Vec<usize>, Vec<usize>)> = Default::default();
    for (i, a) in atoms.iter().enumerate() {
        let g = groups.entry((a.pred.name.to_string(), a.arity())).or_default();
        if a.pred.positive {
            g.0.push(i);
        } else {
            g.1.push(i);
        }
    }
    let mut links = Vec::new();
    for (_, (pos, mut neg)) in groups {
        neg.shuffle(rng);
        links.extend(pos.into_iter().zip(neg));
    }
    Linking::new_unchecked(l.host.clone(), links)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nets::check_correct;
    use crate::syntax::is_clean;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sampled_proofs_are_valid_and_clean() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for cuts in [0, 2] {
            for _ in 0..200 {
                let p = random_proof(&mut rng, &SampleConfig::with_cuts(cuts));
                let s = check_proof(&p).unwrap();
                assert!(is_clean(&CutSequent::new(s.formulas.clone())), "{s}");
                let l = translate(&p).unwrap();
                assert!(check_correct(&l).unwrap().verdict.is_correct(), "{p}\n{l}");
            }
        }
    }

    #[test]
    fn eta_expansions_prove_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut g = Gen { rng: &mut rng, next: 100, cfg: SampleConfig::default() };
        for src in ["P(u) * ~Q(u,a)", "all x. ex y. (Q(x,y) | R)", "ex x. (P(x) * all y. Q(y,x))"] {
            let f = crate::syntax::parse_formula(src).unwrap();
            let s = check_proof(&g.eta(&f)).unwrap();
            assert!(s.formulas[0].alpha_eq(&f.dual()), "{s}");
            assert!(s.formulas[1].alpha_eq(&f), "{s}");
        }
    }

    #[test]
    fn cuts_appear() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let with = (0..50).filter(|_| !random_net(&mut rng, &SampleConfig::with_cuts(2)).host.cuts.is_empty()).count();
        assert_eq!(with, 50);
    }

    #[test]
    fn relinking_keeps_the_host() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let l = random_net(&mut rng, &SampleConfig::default());
            let r = relink(&mut rng, &l);
            assert_eq!(r.host, l.host);
            assert!(r.validate().is_ok());
        }
    }
}
