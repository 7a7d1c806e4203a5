use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    Forest,
    Link,
    Leap,
    Jump,
    Cut,
}

impl fmt::Display for EdgeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EdgeKind::Forest => "forest",
            EdgeKind::Link => "link",
            EdgeKind::Leap => "leap",
            EdgeKind::Jump => "jump",
            EdgeKind::Cut => "cut",
        })
    }
}

/// Edge from `a` to `b`. When `b` is a switched vertex and the edge enters it,
/// `into_switched` is set and the edge belongs to `b`'s bundle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SEdge {
    pub a: usize,
    pub b: usize,
    pub kind: EdgeKind,
    pub into_switched: bool,
}

/// Undirected multigraph with switched vertices: a switching keeps exactly one
/// edge of each switched vertex's bundle.
#[derive(Debug, Clone, Default)]
pub struct SwitchGraph {
    pub n: usize,
    pub switched: Vec<bool>,
    pub edges: Vec<SEdge>,
}

/// One retained bundle edge per switched vertex with a non-empty bundle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Switching {
    pub choice: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Failure {
    /// Some switching containing this edge has a cycle through it.
    Cycle(usize),
    /// Contraction got stuck or left several components.
    Stuck,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{count} switchings exceed the cap of {cap}")]
pub struct SwitchingCapExceeded {
    pub count: u128,
    pub cap: u128,
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn new(n: usize) -> Dsu {
        Dsu((0..n).collect())
    }
    fn find(&mut self, mut i: usize) -> usize {
        while self.0[i] != i {
            self.0[i] = self.0[self.0[i]];
            i = self.0[i];
        }
        i
    }
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        self.0[a] = b;
        true
    }
}

impl SwitchGraph {
    pub fn new(n: usize) -> SwitchGraph {
        SwitchGraph { n, switched: vec![false; n], edges: Vec::new() }
    }

    pub fn add_vertex(&mut self, switched: bool) -> usize {
        self.n += 1;
        self.switched.push(switched);
        self.n - 1
    }

    pub fn add_edge(&mut self, a: usize, b: usize, kind: EdgeKind) -> usize {
        let into_switched = self.switched[b] && kind != EdgeKind::Link;
        self.edges.push(SEdge { a, b, kind, into_switched });
        self.edges.len() - 1
    }

    /// Bundle of each switched vertex, in edge order.
    pub fn bundles(&self) -> Vec<(usize, Vec<usize>)> {
        let mut b: Vec<Vec<usize>> = vec![Vec::new(); self.n];
        for (i, e) in self.edges.iter().enumerate() {
            if e.into_switched {
                b[e.b].push(i);
            }
        }
        b.into_iter().enumerate().filter(|(v, es)| self.switched[*v] && !es.is_empty()).collect()
    }

    pub fn switching_count(&self) -> u128 {
        self.bundles().iter().fold(1u128, |k, (_, es)| k.saturating_mul(es.len() as u128))
    }

    pub fn default_switching(&self) -> Switching {
        Switching { choice: self.bundles().into_iter().map(|(v, es)| (v, es[0])).collect() }
    }

    /// Edges retained by a switching.
    pub fn retained(&self, s: &Switching) -> Vec<usize> {
        let mut keep: Vec<usize> = (0..self.edges.len()).filter(|&i| !self.edges[i].into_switched).collect();
        keep.extend(s.choice.iter().map(|&(_, e)| e));
        keep
    }

    pub fn is_tree(&self, s: &Switching) -> bool {
        let keep = self.retained(s);
        if self.n == 0 {
            return keep.is_empty();
        }
        if keep.len() != self.n - 1 {
            return false;
        }
        let mut d = Dsu::new(self.n);
        keep.iter().all(|&i| d.union(self.edges[i].a, self.edges[i].b))
    }

    /// All switchings, in odometer order.
    pub fn switchings(&self, cap: u128) -> Result<Vec<Switching>, SwitchingCapExceeded> {
        let count = self.switching_count();
        if count > cap {
            return Err(SwitchingCapExceeded { count, cap });
        }
        let bundles = self.bundles();
        let mut idx = vec![0usize; bundles.len()];
        let mut out = Vec::with_capacity(count as usize);
        loop {
            out.push(Switching { choice: bundles.iter().zip(&idx).map(|((v, es), &k)| (*v, es[k])).collect() });
            let mut i = 0;
            loop {
                if i == idx.len() {
                    return Ok(out);
                }
                idx[i] += 1;
                if idx[i] < bundles[i].1.len() {
                    break;
                }
                idx[i] = 0;
                i += 1;
            }
        }
    }

    /// Contractibility: succeeds iff every switching is a tree. Unswitched edges
    /// merge components; a bundle whose far ends all lie in one other component
    /// merges its vertex into it.
    pub fn contract(&self) -> Result<(), Failure> {
        let mut d = Dsu::new(self.n);
        for (i, e) in self.edges.iter().enumerate() {
            if !e.into_switched && !d.union(e.a, e.b) {
                return Err(Failure::Cycle(i));
            }
        }
        let mut pending = self.bundles();
        loop {
            let before = pending.len();
            let mut rest = Vec::with_capacity(pending.len());
            for (v, es) in pending {
                let rv = d.find(v);
                let mut target = None;
                let mut uniform = true;
                for &i in &es {
                    let r = d.find(self.edges[i].a);
                    if r == rv {
                        return Err(Failure::Cycle(i));
                    }
                    match target {
                        None => target = Some(r),
                        Some(t) if t != r => uniform = false,
                        _ => {}
                    }
                }
                if uniform {
                    d.union(v, target.expect("non-empty bundle"));
                } else {
                    rest.push((v, es));
                }
            }
            pending = rest;
            if pending.is_empty() || pending.len() == before {
                break;
            }
        }
        if !pending.is_empty() {
            return Err(Failure::Stuck);
        }
        let r0 = if self.n > 0 { d.find(0) } else { 0 };
        if (0..self.n).any(|v| d.find(v) != r0) {
            return Err(Failure::Stuck);
        }
        Ok(())
    }

    /// A switching that is not a tree, when one can be exhibited within `cap`.
    pub fn bad_switching(&self, failure: &Failure, cap: u128) -> Option<Switching> {
        let mut s = self.default_switching();
        match failure {
            Failure::Cycle(i) => {
                let e = &self.edges[*i];
                if e.into_switched {
                    for c in s.choice.iter_mut() {
                        if c.0 == e.b {
                            c.1 = *i;
                        }
                    }
                }
                debug_assert!(!self.is_tree(&s));
                Some(s)
            }
            Failure::Stuck => {
                if !self.is_tree(&s) {
                    return Some(s);
                }
                self.switchings(cap).ok()?.into_iter().find(|s| !self.is_tree(s))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn par_of_linked_pair_is_a_net() {
        let mut g = SwitchGraph::new(0);
        let p = g.add_vertex(true);
        let a = g.add_vertex(false);
        let b = g.add_vertex(false);
        g.add_edge(a, p, EdgeKind::Forest);
        g.add_edge(b, p, EdgeKind::Forest);
        g.add_edge(a, b, EdgeKind::Link);
        assert_eq!(g.switching_count(), 2);
        assert!(g.switchings(10).unwrap().iter().all(|s| g.is_tree(s)));
        assert!(g.contract().is_ok());
    }

    #[test]
    fn tensor_of_linked_pair_fails() {
        let mut g = SwitchGraph::new(0);
        let t = g.add_vertex(false);
        let a = g.add_vertex(false);
        let b = g.add_vertex(false);
        g.add_edge(a, t, EdgeKind::Forest);
        g.add_edge(b, t, EdgeKind::Forest);
        g.add_edge(a, b, EdgeKind::Link);
        let f = g.contract().unwrap_err();
        let s = g.bad_switching(&f, 10).unwrap();
        assert!(!g.is_tree(&s));
    }

    #[test]
    fn parallel_edges_form_a_cycle() {
        let mut g = SwitchGraph::new(0);
        let e = g.add_vertex(false);
        let u = g.add_vertex(true);
        let leaf = g.add_vertex(false);
        g.add_edge(leaf, u, EdgeKind::Forest);
        g.add_edge(u, e, EdgeKind::Forest);
        g.add_edge(e, u, EdgeKind::Leap);
        assert!(g.contract().is_err());
        assert_eq!(g.switchings(10).unwrap().iter().filter(|s| g.is_tree(s)).count(), 1);
    }
}
