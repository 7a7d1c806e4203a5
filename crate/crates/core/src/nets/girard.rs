use super::correct::build_graph;
use super::graph::{EdgeKind, SwitchGraph};
use super::{Linking, NetError};
use crate::calculus::{trace_links, Proof, ProofError};
use crate::syntax::{cleanse, Atom, CutSequent, Formula, Sym, Term};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// A link tree of a Girard net; each node concludes [`GNode::formula`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GNode {
    Atom(Atom),
    Tensor(Box<GNode>, Box<GNode>),
    Par(Box<GNode>, Box<GNode>),
    Forall { var: Sym, sub: Box<GNode> },
    /// Concludes `ex var. body`; `sub` concludes `body[witness/var]`.
    Exists { var: Sym, witness: Option<Term>, body: Formula, sub: Box<GNode> },
}

impl GNode {
    pub fn formula(&self) -> Formula {
        match self {
            GNode::Atom(a) => Formula::Atom(a.clone()),
            GNode::Tensor(a, b) => Formula::tensor(a.formula(), b.formula()),
            GNode::Par(a, b) => Formula::par(a.formula(), b.formula()),
            GNode::Forall { var, sub } => Formula::Forall(var.clone(), Box::new(sub.formula())),
            GNode::Exists { var, body, .. } => Formula::Exists(var.clone(), Box::new(body.clone())),
        }
    }

    pub fn children(&self) -> Vec<&GNode> {
        match self {
            GNode::Atom(_) => vec![],
            GNode::Tensor(a, b) | GNode::Par(a, b) => vec![a, b],
            GNode::Forall { sub, .. } | GNode::Exists { sub, .. } => vec![sub],
        }
    }

    pub(crate) fn children_mut(&mut self) -> Vec<&mut GNode> {
        match self {
            GNode::Atom(_) => vec![],
            GNode::Tensor(a, b) | GNode::Par(a, b) => vec![a, b],
            GNode::Forall { sub, .. } | GNode::Exists { sub, .. } => vec![sub],
        }
    }

    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        fn go<'a>(n: &'a GNode, out: &mut Vec<&'a Atom>) {
            match n {
                GNode::Atom(a) => out.push(a),
                _ => n.children().into_iter().for_each(|c| go(c, out)),
            }
        }
        go(self, &mut out);
        out
    }

    /// Total number of term nodes in atoms and witnesses.
    pub fn term_size(&self) -> usize {
        let own = match self {
            GNode::Atom(a) => a.args.iter().map(Term::size).sum(),
            GNode::Exists { witness: Some(t), .. } => t.size(),
            _ => 0,
        };
        own + self.children().into_iter().map(GNode::term_size).sum::<usize>()
    }

    fn for_each_term(&self, f: &mut dyn FnMut(&Term)) {
        match self {
            GNode::Atom(a) => a.args.iter().for_each(&mut *f),
            GNode::Exists { witness: Some(t), .. } => f(t),
            _ => {}
        }
        for c in self.children() {
            c.for_each_term(f);
        }
    }

    pub(crate) fn subst(&mut self, y: &Sym, t: &Term) {
        match self {
            GNode::Atom(a) => a.args.iter_mut().for_each(|s| *s = s.subst(y, t)),
            GNode::Exists { var, witness, body, .. } => {
                if let Some(w) = witness {
                    *w = w.subst(y, t);
                }
                if var != y {
                    *body = body.subst(y, t).expect("clean net");
                }
            }
            _ => {}
        }
        for c in self.children_mut() {
            c.subst(y, t);
        }
    }
}

/// A proof net with explicit witnesses and strictly dual axiom links.
/// Axioms are leaf pairs in left-to-right order over conclusions, then cut sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GirardNet {
    pub conclusions: Vec<GNode>,
    pub cuts: Vec<(GNode, GNode)>,
    pub axioms: Vec<(usize, usize)>,
}

impl GirardNet {
    pub fn roots(&self) -> impl Iterator<Item = &GNode> {
        self.conclusions.iter().chain(self.cuts.iter().flat_map(|(a, b)| [a, b]))
    }

    pub fn leaf_atoms(&self) -> Vec<&Atom> {
        self.roots().flat_map(GNode::atoms).collect()
    }

    /// Occurrences of a symbol across all axiom atoms.
    pub fn axiom_count(&self, name: &str) -> usize {
        self.leaf_atoms().iter().flat_map(|a| a.args.iter()).map(|t| t.count_symbol(name)).sum()
    }

    /// Largest occurrence count of `name` in a single term (atom argument or witness).
    pub fn max_term_count(&self, name: &str) -> usize {
        let mut m = 0;
        for r in self.roots() {
            r.for_each_term(&mut |t| m = m.max(t.count_symbol(name)));
        }
        m
    }

    /// Largest number of variable occurrences in a single term.
    pub fn max_term_vars(&self) -> usize {
        let mut m = 0;
        for r in self.roots() {
            r.for_each_term(&mut |t| m = m.max(t.var_occurrences()));
        }
        m
    }

    pub fn witnesses(&self) -> Vec<(Sym, Term)> {
        fn go(n: &GNode, out: &mut Vec<(Sym, Term)>) {
            if let GNode::Exists { var, witness: Some(t), .. } = n {
                out.push((var.clone(), t.clone()));
            }
            n.children().into_iter().for_each(|c| go(c, out));
        }
        let mut out = Vec::new();
        self.roots().for_each(|r| go(r, &mut out));
        out
    }

    pub fn term_size(&self) -> usize {
        self.roots().map(GNode::term_size).sum()
    }

    pub fn conclusion(&self) -> CutSequent {
        CutSequent::with_cuts(
            self.conclusions.iter().map(GNode::formula).collect(),
            self.cuts.iter().map(|(a, b)| (a.formula(), b.formula())).collect(),
        )
    }
}

impl fmt::Display for GirardNet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.conclusion())?;
        for (x, t) in self.witnesses() {
            writeln!(f, "witness: {x} := {t}")?;
        }
        let atoms = self.leaf_atoms();
        let ax: Vec<String> = self.axioms.iter().map(|&(a, b)| format!("{} -- {}", atoms[a], atoms[b])).collect();
        write!(f, "axioms: {}", ax.join(", "))
    }
}

fn unfold(f: &Formula, w: &BTreeMap<Sym, Term>) -> GNode {
    match f {
        Formula::Atom(a) => {
            let mut a = a.clone();
            a.args = a.args.iter().map(|t| t.subst_all(&|v| w.get(v).cloned())).collect();
            GNode::Atom(a)
        }
        Formula::Tensor(a, b) => GNode::Tensor(Box::new(unfold(a, w)), Box::new(unfold(b, w))),
        Formula::Par(a, b) => GNode::Par(Box::new(unfold(a, w)), Box::new(unfold(b, w))),
        Formula::Forall(x, a) => GNode::Forall { var: x.clone(), sub: Box::new(unfold(a, w)) },
        Formula::Exists(x, a) => {
            let outer: BTreeMap<Sym, Term> = w.iter().filter(|(v, _)| *v != x).map(|(v, t)| (v.clone(), t.clone())).collect();
            let body = a.map_free(&|v| outer.get(v).cloned());
            let witness = if a.has_free(x) { w.get(x).cloned() } else { None };
            GNode::Exists { var: x.clone(), witness, body, sub: Box::new(unfold(a, w)) }
        }
    }
}

/// Unfold a correct linking into a Girard net, instantiating every
/// existential by its explicit mgu image. Exponential in the worst case, so
/// each witness is capped at `cap` nodes.
pub fn girard_of(l: &Linking, cap: usize) -> Result<GirardNet, NetError> {
    let g = build_graph(l)?;
    let w = g.mgu.explicit(cap)?;
    let (host, _) = cleanse(&l.host);
    let total: u128 = w.values().map(|t| t.size() as u128).sum();
    if total > cap as u128 {
        return Err(NetError::Cap(crate::unify::CapExceeded { size: total, cap }));
    }
    Ok(GirardNet {
        conclusions: host.formulas.iter().map(|f| unfold(f, &w)).collect(),
        cuts: host.cuts.iter().map(|(a, b)| (unfold(a, &w), unfold(b, &w))).collect(),
        axioms: l.links.clone(),
    })
}

/// Track the axiom links down onto the concluding formulas.
pub fn unet_of_girard(g: &GirardNet) -> Linking {
    Linking::new_unchecked(g.conclusion(), g.axioms.clone())
}

/// The Girard net of a proof, including its cuts (extended cuts become
/// strict cuts between the substituted hypotheses).
pub fn girard_of_proof(p: &Proof) -> Result<GirardNet, ProofError> {
    fn go(p: &Proof) -> (Vec<GNode>, Vec<(GNode, GNode)>) {
        let mut prem: Vec<(Vec<GNode>, Vec<(GNode, GNode)>)> = p.premises().into_iter().map(go).collect();
        match p {
            Proof::Ax { left, right } => (vec![GNode::Atom(left.clone()), GNode::Atom(right.clone())], vec![]),
            Proof::Par { at, .. } => {
                let (mut ns, cs) = prem.pop().unwrap();
                let b = ns.remove(at + 1);
                let a = ns.remove(*at);
                ns.insert(*at, GNode::Par(Box::new(a), Box::new(b)));
                (ns, cs)
            }
            Proof::Exists { at, var, witness, body, .. } => {
                let (mut ns, cs) = prem.pop().unwrap();
                let sub = ns.remove(*at);
                ns.insert(
                    *at,
                    GNode::Exists { var: var.clone(), witness: witness.clone(), body: body.clone(), sub: Box::new(sub) },
                );
                (ns, cs)
            }
            Proof::Forall { at, var, .. } => {
                let (mut ns, cs) = prem.pop().unwrap();
                let sub = ns.remove(*at);
                ns.insert(*at, GNode::Forall { var: var.clone(), sub: Box::new(sub) });
                (ns, cs)
            }
            Proof::Tensor { .. } | Proof::Cut { .. } | Proof::ExtendedCut { .. } => {
                let (rn, rc) = prem.pop().unwrap();
                let (mut ln, mut lc) = prem.pop().unwrap();
                let a = ln.pop().unwrap();
                let mut rn = rn.into_iter();
                let b = rn.next().unwrap();
                lc.extend(rc);
                if let Proof::Tensor { .. } = p {
                    ln.push(GNode::Tensor(Box::new(a), Box::new(b)));
                } else {
                    lc.push((a, b));
                }
                ln.extend(rn);
                (ln, lc)
            }
            Proof::Perm { order, .. } => {
                let (ns, cs) = prem.pop().unwrap();
                let nf = ns.len();
                let out: Vec<GNode> = order[..nf].iter().map(|&i| ns[i].clone()).collect();
                let cuts =
                    if order.len() > nf { order[nf..].iter().map(|&i| cs[i].clone()).collect() } else { cs };
                (out, cuts)
            }
        }
    }
    let (_, links) = trace_links(p)?;
    let (conclusions, cuts) = go(p);
    Ok(GirardNet { conclusions, cuts, axioms: Linking::new_unchecked(CutSequent::default(), links).links })
}

/// Check a Girard net: well-typed links, strictly dual axioms and cuts,
/// distinct eigenvariables not free in the conclusions, and every switching
/// a tree, with jumps from each link whose witness or cut formula mentions an
/// eigenvariable to that eigenvariable's universal link.
pub fn check_girard(g: &GirardNet) -> bool {
    girard_defect(g).is_none()
}

/// The first reason a Girard net is rejected, if any.
pub fn girard_defect(g: &GirardNet) -> Option<String> {
    // Typing of existential links.
    fn typed(n: &GNode) -> Option<String> {
        if let GNode::Exists { var, witness, body, sub } = n {
            let expect = match witness {
                Some(t) => body.subst(var, t)?,
                None if body.has_free(var) => return Some(format!("vacuous link for {var} but {var} occurs")),
                None => body.clone(),
            };
            if !sub.formula().alpha_eq(&expect) {
                return Some(format!("hypothesis {} is not {expect}", sub.formula()));
            }
        }
        n.children().into_iter().find_map(typed)
    }
    if let Some(e) = g.roots().find_map(typed) {
        return Some(e);
    }
    let atoms = g.leaf_atoms();
    let mut seen = vec![false; atoms.len()];
    for &(a, b) in &g.axioms {
        if a >= atoms.len() || b >= atoms.len() || seen[a] || seen[b] || a == b {
            return Some(format!("axiom ({a} {b}) is not part of a pairing"));
        }
        seen[a] = true;
        seen[b] = true;
        if *atoms[b] != atoms[a].dual() {
            return Some(format!("axiom {} -- {} is not strictly dual", atoms[a], atoms[b]));
        }
    }
    if seen.iter().any(|s| !s) {
        return Some("some leaf has no axiom".into());
    }
    for (a, b) in &g.cuts {
        if !b.formula().alpha_eq(&a.formula().dual()) {
            return Some(format!("cut {} ; {} is not dual", a.formula(), b.formula()));
        }
    }

    // Graph: one vertex per node, one per cut.
    let mut graph = SwitchGraph::new(0);
    let mut leaf_vertex = Vec::new();
    let mut foralls: Vec<(Sym, usize)> = Vec::new();
    let mut exists: Vec<(Option<Term>, usize)> = Vec::new();
    fn build(
        n: &GNode,
        g: &mut SwitchGraph,
        leaves: &mut Vec<usize>,
        foralls: &mut Vec<(Sym, usize)>,
        exists: &mut Vec<(Option<Term>, usize)>,
    ) -> usize {
        let v = g.add_vertex(matches!(n, GNode::Par(..) | GNode::Forall { .. }));
        match n {
            GNode::Atom(_) => leaves.push(v),
            GNode::Forall { var, .. } => foralls.push((var.clone(), v)),
            _ => {}
        }
        for c in n.children() {
            let cv = build(c, g, leaves, foralls, exists);
            g.add_edge(cv, v, EdgeKind::Forest);
            if let GNode::Exists { witness, .. } = n {
                exists.push((witness.clone(), cv));
            }
        }
        v
    }
    let mut cut_roots: Vec<(Formula, usize)> = Vec::new();
    for c in &g.conclusions {
        build(c, &mut graph, &mut leaf_vertex, &mut foralls, &mut exists);
    }
    for (a, b) in &g.cuts {
        let va = build(a, &mut graph, &mut leaf_vertex, &mut foralls, &mut exists);
        let vb = build(b, &mut graph, &mut leaf_vertex, &mut foralls, &mut exists);
        let cv = graph.add_vertex(false);
        graph.add_edge(va, cv, EdgeKind::Cut);
        graph.add_edge(vb, cv, EdgeKind::Cut);
        cut_roots.push((a.formula(), cv));
        cut_roots.push((b.formula(), cv));
    }
    let eigen: BTreeSet<&Sym> = foralls.iter().map(|(y, _)| y).collect();
    if eigen.len() != foralls.len() {
        return Some("eigenvariables are not distinct".into());
    }
    for c in &g.conclusions {
        if let Some(y) = c.formula().free_vars().into_iter().find(|v| eigen.contains(v)) {
            return Some(format!("eigenvariable {y} is free in a conclusion"));
        }
    }
    for &(a, b) in &g.axioms {
        graph.add_edge(leaf_vertex[a], leaf_vertex[b], EdgeKind::Link);
    }
    for (y, fv) in &foralls {
        for (w, hyp) in &exists {
            if w.as_ref().is_some_and(|t| t.occurs(y)) {
                graph.add_edge(*hyp, *fv, EdgeKind::Jump);
            }
        }
        let mut done = BTreeSet::new();
        for (f, cv) in &cut_roots {
            if f.has_free(y) && done.insert(*cv) {
                graph.add_edge(*cv, *fv, EdgeKind::Jump);
            }
        }
    }
    match graph.contract() {
        Ok(()) => None,
        Err(_) => Some("some switching is not a tree".into()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{parse_proof, translate};

    fn net(s: &str) -> Linking {
        Linking::parse(s).unwrap()
    }

    #[test]
    fn fig3_round_trip() {
        let l = net("all x. ~P(f(x)), ex z. (P(z) * (~Q(z) | Q(z)))\nlinks: (0 1) (2 3)");
        let g = girard_of(&l, 1000).unwrap();
        assert!(check_girard(&g), "{:?}", girard_defect(&g));
        assert_eq!(g.witnesses(), vec![(Sym::new("z"), Term::app("f", vec![Term::var("x")]))]);
        assert_eq!(unet_of_girard(&g), l);
    }

    #[test]
    fn proof_square_commutes() {
        let p = parse_proof(
            "(forall 0 x (exists 1 z f(x) (P(z) * (~Q(z) | Q(z))) (tensor (ax ~P(f(x))) (par 0 (ax ~Q(f(x)))))))",
        )
        .unwrap();
        let g = girard_of_proof(&p).unwrap();
        assert!(check_girard(&g));
        assert_eq!(unet_of_girard(&g), translate(&p).unwrap());
    }

    #[test]
    fn quantifier_free() {
        let l = net("P * Q, ~P, ~Q\nlinks: (0 2) (1 3)");
        let g = girard_of(&l, 10).unwrap();
        assert!(check_girard(&g));
        assert_eq!(unet_of_girard(&g), l);
    }

    #[test]
    fn non_dual_axiom() {
        let g = GirardNet {
            conclusions: vec![
                GNode::Atom(Atom::new("P", true, vec![Term::constant("a")])),
                GNode::Atom(Atom::new("P", false, vec![Term::constant("b")])),
            ],
            cuts: vec![],
            axioms: vec![(0, 1)],
        };
        assert!(!check_girard(&g));
    }

    #[test]
    fn escaping_eigenvariable() {
        // The incorrect prenex linking unfolds, but its Girard net has a jump cycle.
        let l = net("~P * all x. ~Q(x), ex y. (P | Q(y))\nlinks: (0 2) (1 3)");
        let g = girard_of(&l, 100).unwrap();
        assert_eq!(girard_defect(&g).as_deref(), Some("some switching is not a tree"));
    }
}
