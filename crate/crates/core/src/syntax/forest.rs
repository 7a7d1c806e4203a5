use super::{Atom, Formula, LeafId, Path, Sym};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeKind {
    Atom(Atom),
    Tensor,
    Par,
    Forall(Sym),
    Exists(Sym),
}

#[derive(Debug, Clone)]
pub struct FNode {
    pub kind: NodeKind,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    pub member: usize,
    pub path: Path,
}

/// A list of formulas flattened into a preorder node array.
#[derive(Debug, Clone, Default)]
pub struct Forest {
    pub nodes: Vec<FNode>,
    pub roots: Vec<usize>,
    /// Leaf index (left-to-right) to node.
    pub leaves: Vec<usize>,
    /// Node to leaf index.
    pub leaf_of: Vec<Option<usize>>,
}

impl Forest {
    pub fn new<'a>(members: impl IntoIterator<Item = &'a Formula>) -> Forest {
        let mut fr = Forest::default();
        for (m, f) in members.into_iter().enumerate() {
            let r = fr.add(f, None, m, &mut Vec::new());
            fr.roots.push(r);
        }
        fr
    }

    fn add(&mut self, f: &Formula, parent: Option<usize>, member: usize, path: &mut Path) -> usize {
        let id = self.nodes.len();
        let kind = match f {
            Formula::Atom(a) => NodeKind::Atom(a.clone()),
            Formula::Tensor(..) => NodeKind::Tensor,
            Formula::Par(..) => NodeKind::Par,
            Formula::Forall(x, _) => NodeKind::Forall(x.clone()),
            Formula::Exists(x, _) => NodeKind::Exists(x.clone()),
        };
        let is_leaf = matches!(kind, NodeKind::Atom(_));
        self.nodes.push(FNode { kind, parent, children: Vec::new(), member, path: path.clone() });
        self.leaf_of.push(None);
        if is_leaf {
            self.leaf_of[id] = Some(self.leaves.len());
            self.leaves.push(id);
        }
        for (i, c) in f.children().into_iter().enumerate() {
            path.push(i as u8);
            let cid = self.add(c, Some(id), member, path);
            path.pop();
            self.nodes[id].children.push(cid);
        }
        id
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn atom(&self, node: usize) -> Option<&Atom> {
        match &self.nodes[node].kind {
            NodeKind::Atom(a) => Some(a),
            _ => None,
        }
    }

    pub fn leaf_id(&self, leaf: usize) -> LeafId {
        let n = &self.nodes[self.leaves[leaf]];
        LeafId { member: n.member, path: n.path.clone() }
    }

    /// Formula rooted at a node.
    pub fn formula(&self, node: usize) -> Formula {
        let n = &self.nodes[node];
        let c = |i: usize| Box::new(self.formula(n.children[i]));
        match &n.kind {
            NodeKind::Atom(a) => Formula::Atom(a.clone()),
            NodeKind::Tensor => Formula::Tensor(c(0), c(1)),
            NodeKind::Par => Formula::Par(c(0), c(1)),
            NodeKind::Forall(x) => Formula::Forall(x.clone(), c(0)),
            NodeKind::Exists(x) => Formula::Exists(x.clone(), c(0)),
        }
    }

    /// Is `a` an ancestor of (or equal to) `b`?
    pub fn is_ancestor(&self, a: usize, mut b: usize) -> bool {
        loop {
            if a == b {
                return true;
            }
            match self.nodes[b].parent {
                Some(p) => b = p,
                None => return false,
            }
        }
    }
}
