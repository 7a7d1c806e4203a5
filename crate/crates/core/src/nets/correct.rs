use super::graph::{EdgeKind, Failure, SwitchGraph, Switching};
use super::{Linking, NetError};
use crate::syntax::{cleanse, encode_cuts, Atom, CutSequent, Forest, Formula, NodeKind, Sequent, Sym};
use crate::unify::{equations_of, precedences, unify, NotUnifiable, Precedence, TriangularSubstitution};
use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::time::{Duration, Instant};

/// The graph of a linking: encoded sequent forest, links and leaps.
#[derive(Debug, Clone)]
pub struct NetGraph {
    /// Cleansed host with cuts encoded.
    pub sequent: Sequent,
    pub forest: Forest,
    pub links: Vec<(usize, usize)>,
    pub mgu: TriangularSubstitution,
    pub precedences: Vec<Precedence>,
    /// Leaps as (exists node, forall node).
    pub leaps: Vec<(usize, usize)>,
    pub graph: SwitchGraph,
}

pub(crate) fn binder_nodes(forest: &Forest) -> HashMap<Sym, usize> {
    let mut m = HashMap::new();
    for (i, n) in forest.nodes.iter().enumerate() {
        if let NodeKind::Forall(x) | NodeKind::Exists(x) = &n.kind {
            m.insert(x.clone(), i);
        }
    }
    m
}

/// Forest edges plus links; ⅋ and ∀ vertices are switched.
pub(crate) fn base_graph(forest: &Forest, links: &[(usize, usize)]) -> SwitchGraph {
    let mut g = SwitchGraph::new(0);
    for n in &forest.nodes {
        g.add_vertex(matches!(n.kind, NodeKind::Par | NodeKind::Forall(_)));
    }
    for (i, n) in forest.nodes.iter().enumerate() {
        if let Some(p) = n.parent {
            g.add_edge(i, p, EdgeKind::Forest);
        }
    }
    for &(a, b) in links {
        g.add_edge(forest.leaves[a], forest.leaves[b], EdgeKind::Link);
    }
    g
}

pub fn build_graph(l: &Linking) -> Result<NetGraph, NetError> {
    l.validate()?;
    let (clean, _) = cleanse(&l.host);
    let sequent = encode_cuts(&clean);
    let forest = Forest::new(&sequent.formulas);
    let eqs = equations_of(&sequent, &l.links).map_err(|e| NetError::NotALinking(e.to_string()))?;
    let mgu = unify(&eqs)?;
    let precs = precedences(&mgu);
    let binders = binder_nodes(&forest);
    let mut graph = base_graph(&forest, &l.links);
    let mut leaps = Vec::new();
    for p in &precs {
        let (e, u) = (binders[&p.existential], binders[&p.universal]);
        graph.add_edge(e, u, EdgeKind::Leap);
        leaps.push((e, u));
    }
    Ok(NetGraph { sequent, forest, links: l.links.clone(), mgu, precedences: precs, leaps, graph })
}

impl NetGraph {
    /// Graphviz rendering; vertex and edge kinds are attributes.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph net {\n");
        for (i, n) in self.forest.nodes.iter().enumerate() {
            let (kind, label) = match &n.kind {
                NodeKind::Atom(a) => ("atom", a.to_string()),
                NodeKind::Tensor => ("tensor", "⊗".to_string()),
                NodeKind::Par => ("par", "⅋".to_string()),
                NodeKind::Forall(x) => ("forall", format!("∀{x}")),
                NodeKind::Exists(x) => ("exists", format!("∃{x}")),
            };
            let _ = writeln!(s, "  v{i} [kind={kind}, label=\"{label}\"];");
        }
        for e in &self.graph.edges {
            let extra = if e.kind == EdgeKind::Link { ", dir=none" } else { "" };
            let _ = writeln!(s, "  v{} -> v{} [kind={}{extra}];", e.a, e.b, e.kind);
        }
        s.push_str("}\n");
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Correct,
    NotUnifiable(NotUnifiable),
    /// Some switching is not a tree; the witness is given when one was found within the cap.
    SwitchingFailure { witness: Option<Switching>, reason: String },
}

impl Verdict {
    pub fn is_correct(&self) -> bool {
        *self == Verdict::Correct
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Correct => "correct",
            Verdict::NotUnifiable(_) => "not-unifiable",
            Verdict::SwitchingFailure { .. } => "switching-failure",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Correct => f.write_str("correct"),
            Verdict::NotUnifiable(e) => write!(f, "not-unifiable: {e}"),
            Verdict::SwitchingFailure { reason, .. } => write!(f, "switching-failure: {reason}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheckOptions {
    /// Switchings to enumerate when searching for a failure witness.
    pub max_switchings: u128,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { max_switchings: 10_000 }
    }
}

#[derive(Debug, Clone)]
pub struct CheckReport {
    pub verdict: Verdict,
    pub elapsed: Duration,
    pub vertices: usize,
    pub edges: usize,
    pub leaps: usize,
    /// Nodes allocated by the unifier's working graph and the substitution store.
    pub store_nodes: usize,
}

pub fn check_correct(l: &Linking) -> Result<CheckReport, NetError> {
    check_correct_with(l, &CheckOptions::default())
}

pub fn check_correct_with(l: &Linking, opts: &CheckOptions) -> Result<CheckReport, NetError> {
    let t0 = Instant::now();
    let g = match build_graph(l) {
        Ok(g) => g,
        Err(NetError::NotUnifiable(e)) => {
            return Ok(CheckReport {
                verdict: Verdict::NotUnifiable(e),
                elapsed: t0.elapsed(),
                vertices: 0,
                edges: 0,
                leaps: 0,
                store_nodes: 0,
            })
        }
        Err(e) => return Err(e),
    };
    let verdict = match g.graph.contract() {
        Ok(()) => Verdict::Correct,
        Err(f) => {
            let reason = match &f {
                Failure::Cycle(i) => {
                    let e = &g.graph.edges[*i];
                    format!("cycle through {} edge {} -> {}", e.kind, e.a, e.b)
                }
                Failure::Stuck => "some switching is disconnected or cyclic".to_string(),
            };
            Verdict::SwitchingFailure { witness: g.graph.bad_switching(&f, opts.max_switchings), reason }
        }
    };
    Ok(CheckReport {
        verdict,
        elapsed: t0.elapsed(),
        vertices: g.graph.n,
        edges: g.graph.edges.len(),
        leaps: g.leaps.len(),
        store_nodes: g.mgu.work_nodes + g.mgu.store.len(),
    })
}

/// Propositional MLL check: every switching is a tree.
pub fn check_mll(l: &Linking) -> bool {
    if l.validate().is_err() {
        return false;
    }
    let s = encode_cuts(&l.host);
    if s.formulas.iter().any(|f| !f.quantifier_free()) {
        return false;
    }
    let forest = Forest::new(&s.formulas);
    base_graph(&forest, &l.links).contract().is_ok()
}

enum Tag {
    Old(usize),
    Q(usize),
}

/// Encode each precedence x⌢y as a fresh dual pair `#k`, `~#k` wrapping ∃x
/// with a tensor and ∀y with a par, then drop quantifiers and terms.
pub fn frame(l: &Linking) -> Result<Linking, NetError> {
    let g = build_graph(l)?;
    let mut ex: HashMap<&Sym, Vec<usize>> = HashMap::new();
    let mut un: HashMap<&Sym, Vec<usize>> = HashMap::new();
    for (k, p) in g.precedences.iter().enumerate() {
        ex.entry(&p.existential).or_default().push(k);
        un.entry(&p.universal).or_default().push(k);
    }
    let mut next_leaf = 0usize;
    let mut tags: Vec<Tag> = Vec::new();
    fn q(k: usize, positive: bool) -> Formula {
        Formula::Atom(Atom::new(&format!("#{k}"), positive, Vec::new()))
    }
    fn go(
        f: &Formula,
        ex: &HashMap<&Sym, Vec<usize>>,
        un: &HashMap<&Sym, Vec<usize>>,
        next_leaf: &mut usize,
        tags: &mut Vec<Tag>,
    ) -> Formula {
        match f {
            Formula::Atom(a) => {
                tags.push(Tag::Old(*next_leaf));
                *next_leaf += 1;
                Formula::Atom(Atom { pred: a.pred.clone(), args: Vec::new() })
            }
            Formula::Tensor(a, b) => {
                let a = go(a, ex, un, next_leaf, tags);
                Formula::tensor(a, go(b, ex, un, next_leaf, tags))
            }
            Formula::Par(a, b) => {
                let a = go(a, ex, un, next_leaf, tags);
                Formula::par(a, go(b, ex, un, next_leaf, tags))
            }
            Formula::Exists(x, body) | Formula::Forall(x, body) => {
                let is_ex = matches!(f, Formula::Exists(..));
                let ks = if is_ex { ex.get(x) } else { un.get(x) }.cloned().unwrap_or_default();
                for &k in &ks {
                    tags.push(Tag::Q(k));
                }
                let mut out = go(body, ex, un, next_leaf, tags);
                for &k in ks.iter().rev() {
                    out = if is_ex { Formula::tensor(q(k, true), out) } else { Formula::par(q(k, false), out) };
                }
                out
            }
        }
    }
    // Q leaves are emitted before the body leaves, matching the wrapped shape.
    let formulas: Vec<Formula> =
        g.sequent.formulas.iter().map(|f| go(f, &ex, &un, &mut next_leaf, &mut tags)).collect();
    let mut new_of_old = vec![0usize; next_leaf];
    let mut q_ends: Vec<[usize; 2]> = vec![[usize::MAX; 2]; g.precedences.len()];
    let host = CutSequent::new(formulas);
    let atoms = host.leaf_atoms();
    for (i, t) in tags.iter().enumerate() {
        match t {
            Tag::Old(o) => new_of_old[*o] = i,
            Tag::Q(k) => q_ends[*k][usize::from(!atoms[i].pred.positive)] = i,
        }
    }
    let mut links: Vec<(usize, usize)> = g.links.iter().map(|&(a, b)| (new_of_old[a], new_of_old[b])).collect();
    links.extend(q_ends.iter().map(|[a, b]| (*a, *b)));
    Ok(Linking::new_unchecked(host, links))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn net(s: &str) -> Linking {
        Linking::parse(s).unwrap()
    }

    const IDENTITY: &str = "(ex x. ~P(x)) | (all y. P(y))\nlinks: (0 1)";

    #[test]
    fn identity_example() {
        let l = net(IDENTITY);
        let g = build_graph(&l).unwrap();
        assert_eq!(g.mgu.dump(), "x <- y\n");
        assert_eq!(g.leaps.len(), 1);
        assert_eq!(g.graph.switching_count(), 4);
        assert!(g.graph.switchings(10).unwrap().iter().all(|s| g.graph.is_tree(s)));
        assert!(check_correct(&l).unwrap().verdict.is_correct());
    }

    #[test]
    fn identity_frame() {
        let f = frame(&net(IDENTITY)).unwrap();
        assert_eq!(f.to_string(), "(#0 * ~P) | (~#0 | P)\nlinks: (0 2) (1 3)");
        assert!(check_mll(&f));
    }

    #[test]
    fn prenex_pair() {
        let good = net("~P | all x. ~Q(x), ex y. (P * Q(y))\nlinks: (0 2) (1 3)");
        let bad = net("~P * all x. ~Q(x), ex y. (P | Q(y))\nlinks: (0 2) (1 3)");
        assert!(check_correct(&good).unwrap().verdict.is_correct());
        let g = build_graph(&good).unwrap();
        assert_eq!(g.mgu.dump(), "y <- x\n");
        assert_eq!(g.leaps.len(), 1);
        match check_correct(&bad).unwrap().verdict {
            Verdict::SwitchingFailure { witness: Some(w), .. } => {
                assert!(!build_graph(&bad).unwrap().graph.is_tree(&w))
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn mll_basics() {
        assert!(check_mll(&net("P, ~P\nlinks: (0 1)")));
        assert!(!check_mll(&net("P * ~P\nlinks: (0 1)")));
    }

    #[test]
    fn not_unifiable() {
        let l = net("P(a), ~P(b)\nlinks: (0 1)");
        assert!(matches!(check_correct(&l).unwrap().verdict, Verdict::NotUnifiable(_)));
    }

    #[test]
    fn dot_export_lists_kinds() {
        let d = build_graph(&net(IDENTITY)).unwrap().to_dot();
        assert!(d.contains("kind=leap"));
        assert!(d.contains("kind=link"));
        assert!(d.contains("kind=exists"));
    }
}
