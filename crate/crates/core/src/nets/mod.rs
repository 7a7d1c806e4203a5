//! Linkings, their graphs, correctness, frames, sequentialization and Girard nets.

mod correct;
mod girard;
mod graph;
mod sequentialize;

pub use correct::{
    build_graph, check_correct, check_correct_with, check_mll, frame, CheckOptions, CheckReport, NetGraph, Verdict,
};
pub use girard::{check_girard, girard_defect, girard_of, girard_of_proof, unet_of_girard, GNode, GirardNet};
pub use graph::{EdgeKind, Failure, SEdge, SwitchGraph, Switching, SwitchingCapExceeded};
pub use sequentialize::{sequentialize, sequentialize_cuts, SequentializeError};

use crate::syntax::{CutSequent, LeafId, ParseError, Parser, Tok};
use crate::unify::{CapExceeded, NotUnifiable};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetError {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("not a linking: {0}")]
    NotALinking(String),
    #[error("{0}")]
    Cap(#[from] CapExceeded),
    #[error("not unifiable: {0}")]
    NotUnifiable(#[from] NotUnifiable),
    #[error("incorrect net: {0}")]
    Incorrect(String),
    #[error("malformed Girard net: {0}")]
    Malformed(String),
}

/// A set of links on a cut sequent. Links are pairs of leaf indices in
/// left-to-right leaf order (equivalently LeafIds), each pair sorted and the
/// list sorted, so equality of linkings is structural equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Linking {
    pub host: CutSequent,
    pub links: Vec<(usize, usize)>,
}

impl Linking {
    pub fn new(host: CutSequent, links: Vec<(usize, usize)>) -> Result<Linking, NetError> {
        let l = Linking::new_unchecked(host, links);
        l.validate()?;
        Ok(l)
    }

    /// Normalizes link order without validating.
    pub fn new_unchecked(host: CutSequent, links: Vec<(usize, usize)>) -> Linking {
        let mut links: Vec<(usize, usize)> = links.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
        links.sort_unstable();
        Linking { host, links }
    }

    pub fn validate(&self) -> Result<(), NetError> {
        if let Some(i) = self.host.malformed_cut() {
            return Err(NetError::NotALinking(format!("cut {i} is not a dual pair")));
        }
        let atoms = self.host.leaf_atoms();
        let mut seen = vec![false; atoms.len()];
        for &(a, b) in &self.links {
            if a == b || b >= atoms.len() {
                return Err(NetError::NotALinking(format!("bad link ({a} {b})")));
            }
            for x in [a, b] {
                if std::mem::replace(&mut seen[x], true) {
                    return Err(NetError::NotALinking(format!("leaf {x} is linked twice")));
                }
            }
            if !atoms[a].linkable(atoms[b]) {
                return Err(NetError::NotALinking(format!(
                    "link ({a} {b}) joins {} and {}, which are not dual",
                    atoms[a], atoms[b]
                )));
            }
        }
        if let Some(x) = seen.iter().position(|s| !s) {
            return Err(NetError::NotALinking(format!("leaf {x} ({}) is not linked", atoms[x])));
        }
        Ok(())
    }

    pub fn leaf_id(&self, leaf: usize) -> LeafId {
        self.host.leaves()[leaf].clone()
    }

    pub fn link_ids(&self) -> Vec<(LeafId, LeafId)> {
        let ls = self.host.leaves();
        self.links.iter().map(|&(a, b)| (ls[a].clone(), ls[b].clone())).collect()
    }

    /// Partner of every leaf.
    pub fn partners(&self) -> Vec<usize> {
        let mut p = vec![usize::MAX; self.host.leaf_count()];
        for &(a, b) in &self.links {
            p[a] = b;
            p[b] = a;
        }
        p
    }

    /// Formula nodes plus links.
    pub fn size(&self) -> usize {
        self.host.size() + self.links.len()
    }

    pub fn parse(src: &str) -> Result<Linking, NetError> {
        let mut p = Parser::new(src)?;
        let host = p.sequent()?;
        let mut links = Vec::new();
        if !p.at_eof() {
            let kw = p.ident()?;
            if kw != "links" {
                return Err(p.error(format!("expected `links:`, found `{kw}`")).into());
            }
            p.expect(Tok::Colon)?;
            while *p.peek() == Tok::LParen {
                p.next();
                let a = p.number()?;
                let b = p.number()?;
                p.expect(Tok::RParen)?;
                links.push((a, b));
            }
            if !p.at_eof() {
                return Err(p.error(format!("unexpected {}", p.peek())).into());
            }
        }
        Linking::new(host, links)
    }
}

impl fmt::Display for Linking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.host)?;
        f.write_str("links:")?;
        for (a, b) in &self.links {
            write!(f, " ({a} {b})")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Linking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
