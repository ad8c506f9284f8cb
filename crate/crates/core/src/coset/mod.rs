//! Schreier coset graphs as partial deterministic involutive automata.
//!
//! A [`CosetGraph`] stores a partial transition table `(vertex, letter) →
//! vertex` that always satisfies `δ(v, x) = u ⟺ δ(u, x⁻¹) = v`. The subgroup
//! it represents is the set of words that trace from the root (vertex 0)
//! back to the root. Undefined transitions are resolved according to the
//! backend:
//!
//! * folded graphs of finitely generated subgroups sprout fresh tree
//!   vertices on demand, since the Schreier graph is the core plus hanging
//!   trees;
//! * quotient graphs ask a transition oracle (or are already complete, for
//!   permutation representations);
//! * partial graphs (constructions, truncated products) report
//!   [`Error::UndefinedAtHorizon`].

mod analysis;
mod fold;
mod quotient;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

pub use analysis::{free_group_growth, SandwichRow, Transversal};
pub use fold::fold;
pub use quotient::{from_callback, from_permutations, z_shift, z_squared, PermutationRep, TransitionOracle};

use crate::error::{Error, Result};
use crate::words::{Alphabet, Letter, Word};

pub type Vertex = usize;

pub const ROOT: Vertex = 0;
pub const DEFAULT_MAX_VERTICES: usize = 1_000_000;

pub(crate) struct QuotientState {
    oracle: Arc<dyn TransitionOracle>,
    labels: Vec<Vec<i64>>,
    index: HashMap<Vec<i64>, Vertex>,
}

#[derive(Clone)]
pub enum Backend {
    /// Folded core of `⟨generators⟩`, completed lazily by hanging trees.
    Folded { generators: Vec<Word> },
    /// Action on a (possibly infinite) quotient set.
    Quotient { name: String },
    /// Partial coset function of a construction; defined for every vertex
    /// of tree depth below `safe_horizon`.
    Construction { safe_horizon: usize },
    /// Product graph materialized out to BFS radius `horizon`.
    Product { horizon: usize },
}

impl fmt::Debug for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Folded { generators } => {
                let g: Vec<String> = generators.iter().map(|w| w.to_string()).collect();
                write!(f, "Folded({})", g.join(", "))
            }
            Backend::Quotient { name } => write!(f, "Quotient({name})"),
            Backend::Construction { safe_horizon } => write!(f, "Construction(safe horizon {safe_horizon})"),
            Backend::Product { horizon } => write!(f, "Product(horizon {horizon})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceOutcome {
    Reached(Vertex),
    Stuck { at: Vertex, remaining: Word },
}

pub struct CosetGraph {
    pub(crate) alphabet: Alphabet,
    pub(crate) trans: Vec<Option<Vertex>>,
    pub(crate) backend: Backend,
    pub(crate) quotient: Option<QuotientState>,
    pub(crate) lazy: bool,
    pub(crate) max_vertices: usize,
}

impl fmt::Debug for CosetGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CosetGraph")
            .field("rank", &self.alphabet.rank())
            .field("vertices", &self.num_vertices())
            .field("backend", &self.backend)
            .finish()
    }
}

impl Clone for CosetGraph {
    fn clone(&self) -> Self {
        CosetGraph {
            alphabet: self.alphabet,
            trans: self.trans.clone(),
            backend: self.backend.clone(),
            quotient: self.quotient.as_ref().map(|q| QuotientState {
                oracle: Arc::clone(&q.oracle),
                labels: q.labels.clone(),
                index: q.index.clone(),
            }),
            lazy: self.lazy,
            max_vertices: self.max_vertices,
        }
    }
}

impl CosetGraph {
    pub(crate) fn with_vertices(alphabet: Alphabet, n: usize, backend: Backend) -> Self {
        CosetGraph {
            alphabet,
            trans: vec![None; n * alphabet.size()],
            backend,
            quotient: None,
            lazy: true,
            max_vertices: DEFAULT_MAX_VERTICES,
        }
    }

    /// The graph of the trivial subgroup: a single root, completed lazily.
    pub fn trivial(alphabet: Alphabet) -> Self {
        CosetGraph::with_vertices(alphabet, 1, Backend::Folded { generators: Vec::new() })
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    pub fn is_folded(&self) -> bool {
        matches!(self.backend, Backend::Folded { .. })
    }

    pub fn num_vertices(&self) -> usize {
        self.trans.len() / self.alphabet.size()
    }

    pub fn set_lazy(&mut self, lazy: bool) {
        self.lazy = lazy;
    }

    pub fn set_max_vertices(&mut self, cap: usize) {
        self.max_vertices = cap;
    }

    /// Safe radius for partial backends, `None` when every transition can
    /// be resolved.
    pub fn horizon(&self) -> Option<usize> {
        match self.backend {
            Backend::Construction { safe_horizon } => Some(safe_horizon),
            Backend::Product { horizon } => Some(horizon),
            _ => None,
        }
    }

    pub fn peek(&self, v: Vertex, l: Letter) -> Option<Vertex> {
        self.trans[v * self.alphabet.size() + l.slot()]
    }

    pub(crate) fn add_vertex(&mut self) -> Result<Vertex> {
        let v = self.num_vertices();
        if v >= self.max_vertices {
            return Err(Error::BudgetExceeded(self.max_vertices));
        }
        self.trans.extend(std::iter::repeat_n(None, self.alphabet.size()));
        Ok(v)
    }

    /// Sets `δ(v, l) = u` and `δ(u, l⁻¹) = v`. Both slots must be free.
    pub(crate) fn set_edge(&mut self, v: Vertex, l: Letter, u: Vertex) {
        let m = self.alphabet.size();
        debug_assert!(self.trans[v * m + l.slot()].is_none());
        debug_assert!(self.trans[u * m + l.inverse().slot()].is_none());
        self.trans[v * m + l.slot()] = Some(u);
        self.trans[u * m + l.inverse().slot()] = Some(v);
    }

    /// Resolves `δ(v, l)`, materializing it if the backend allows.
    pub fn step(&mut self, v: Vertex, l: Letter) -> Result<Option<Vertex>> {
        if let Some(u) = self.peek(v, l) {
            return Ok(Some(u));
        }
        match &self.backend {
            Backend::Folded { .. } => {
                if !self.lazy {
                    return Ok(None);
                }
                let u = self.add_vertex()?;
                self.set_edge(v, l, u);
                Ok(Some(u))
            }
            Backend::Quotient { .. } => {
                if self.quotient.is_none() {
                    return Ok(None);
                }
                self.step_oracle(v, l).map(Some)
            }
            Backend::Construction { safe_horizon } => Err(Error::UndefinedAtHorizon {
                vertex: v,
                letter: l,
                horizon: *safe_horizon,
            }),
            Backend::Product { horizon } => Err(Error::UndefinedAtHorizon {
                vertex: v,
                letter: l,
                horizon: *horizon,
            }),
        }
    }

    fn step_oracle(&mut self, v: Vertex, l: Letter) -> Result<Vertex> {
        let (target, back) = {
            let q = self.quotient.as_ref().expect("oracle present");
            let label = &q.labels[v];
            let target = q.oracle.act(label, l);
            let back = q.oracle.act(&target, l.inverse());
            if &back != label {
                return Err(Error::InvolutionViolation {
                    from: label.clone(),
                    letter: l,
                    to: target,
                });
            }
            (target, back)
        };
        debug_assert_eq!(&back, &self.quotient.as_ref().unwrap().labels[v]);
        let existing = self.quotient.as_ref().unwrap().index.get(&target).copied();
        let u = match existing {
            Some(u) => {
                if self.peek(u, l.inverse()).is_some() {
                    // δ(u, l⁻¹) points elsewhere: the oracle is not a permutation.
                    let q = self.quotient.as_ref().unwrap();
                    return Err(Error::InvolutionViolation {
                        from: q.labels[v].clone(),
                        letter: l,
                        to: target,
                    });
                }
                u
            }
            None => {
                let u = self.add_vertex()?;
                let q = self.quotient.as_mut().unwrap();
                q.labels.push(target.clone());
                q.index.insert(target, u);
                u
            }
        };
        self.set_edge(v, l, u);
        Ok(u)
    }

    /// Follows `w` from `from`, materializing transitions where possible.
    pub fn trace(&mut self, w: &Word, from: Vertex) -> Result<TraceOutcome> {
        let mut v = from;
        for (i, &l) in w.letters().iter().enumerate() {
            match self.step(v, l)? {
                Some(u) => v = u,
                None => {
                    return Ok(TraceOutcome::Stuck {
                        at: v,
                        remaining: Word::from_reduced_unchecked(w.letters()[i..].to_vec()),
                    })
                }
            }
        }
        Ok(TraceOutcome::Reached(v))
    }

    /// Follows `w` along defined transitions only.
    pub fn trace_defined(&self, w: &Word, from: Vertex) -> TraceOutcome {
        let mut v = from;
        for (i, &l) in w.letters().iter().enumerate() {
            match self.peek(v, l) {
                Some(u) => v = u,
                None => {
                    return TraceOutcome::Stuck {
                        at: v,
                        remaining: Word::from_reduced_unchecked(w.letters()[i..].to_vec()),
                    }
                }
            }
        }
        TraceOutcome::Reached(v)
    }

    /// Membership of `w` in the subgroup.
    pub fn contains(&mut self, w: &Word) -> Result<bool> {
        if self.is_folded() {
            // Hanging trees never lead back to the root.
            return Ok(self.trace_defined(w, ROOT) == TraceOutcome::Reached(ROOT));
        }
        match self.trace(w, ROOT)? {
            TraceOutcome::Reached(v) => Ok(v == ROOT),
            TraceOutcome::Stuck { at, remaining } => Err(Error::UndefinedAtHorizon {
                vertex: at,
                letter: remaining.first().expect("stuck with letters left"),
                horizon: self.horizon().unwrap_or(0),
            }),
        }
    }

    /// Every defined `(vertex, letter) → vertex` transition.
    pub fn defined_pairs(&self) -> impl Iterator<Item = (Vertex, Letter, Vertex)> + '_ {
        let m = self.alphabet.size();
        self.trans
            .iter()
            .enumerate()
            .filter_map(move |(i, t)| t.map(|u| (i / m, Letter::from_slot(i % m), u)))
    }

    /// Pairs violating `δ(δ(v, x), x⁻¹) = v`.
    pub fn involution_violations(&self) -> Vec<(Vertex, Letter)> {
        self.defined_pairs()
            .filter(|&(v, l, u)| self.peek(u, l.inverse()) != Some(v))
            .map(|(v, l, _)| (v, l))
            .collect()
    }

    /// True when no transition of any materialized vertex is undefined.
    pub fn is_complete(&self) -> bool {
        self.trans.iter().all(Option::is_some)
    }

    /// Edge list `v x u` over positive letters; each undirected edge once.
    pub fn dump(&self) -> String {
        let mut out = format!("# vertices {} root 0 rank {}", self.num_vertices(), self.alphabet.rank());
        if let Some(h) = self.horizon() {
            out.push_str(&format!(" horizon {h}"));
        }
        out.push('\n');
        for (v, l, u) in self.defined_pairs() {
            if l.is_positive() {
                out.push_str(&format!("{v} {l} {u}\n"));
            }
        }
        out
    }

    /// Parses a graph dump into a partial graph. The dump's `horizon`
    /// header, when present, becomes the safe horizon.
    pub fn from_dump(text: &str) -> Result<CosetGraph> {
        let mut vertices = 1usize;
        let mut rank = 2u32;
        let mut horizon = 0usize;
        let mut edges = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            let parse_err = |message: &str| Error::Parse {
                line: i + 1,
                message: message.to_string(),
            };
            if let Some(header) = line.strip_prefix('#') {
                let toks: Vec<&str> = header.split_whitespace().collect();
                for pair in toks.windows(2) {
                    let val = pair[1].parse::<usize>();
                    match (pair[0], val) {
                        ("vertices", Ok(n)) => vertices = vertices.max(n),
                        ("rank", Ok(r)) => rank = r as u32,
                        ("horizon", Ok(h)) => horizon = h,
                        _ => {}
                    }
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 3 {
                return Err(parse_err("expected `v x u`"));
            }
            let v: usize = toks[0].parse().map_err(|_| parse_err("bad source vertex"))?;
            let u: usize = toks[2].parse().map_err(|_| parse_err("bad target vertex"))?;
            let mut chars = toks[1].chars();
            let l = match (chars.next(), chars.next()) {
                (Some(c), None) => Letter::from_char(c)?,
                _ => return Err(parse_err("label must be a single letter")),
            };
            vertices = vertices.max(v + 1).max(u + 1);
            edges.push((i + 1, v, l, u));
        }
        let alphabet = Alphabet::new(rank)?;
        let mut g = CosetGraph::with_vertices(alphabet, vertices, Backend::Construction { safe_horizon: horizon });
        for (line, v, l, u) in edges {
            alphabet.check(l)?;
            if g.peek(v, l).is_some() || g.peek(u, l.inverse()).is_some() {
                return Err(Error::Parse {
                    line,
                    message: format!("transition {v} {l} defined twice"),
                });
            }
            g.set_edge(v, l, u);
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s, Alphabet::default(), false).unwrap()
    }

    #[test]
    fn lazy_trace_sprouts_tree_vertices() {
        let mut g = fold(&[w("a")], Alphabet::default());
        assert_eq!(g.trace(&w("a"), ROOT).unwrap(), TraceOutcome::Reached(ROOT));
        assert_eq!(g.num_vertices(), 1);
        let TraceOutcome::Reached(v) = g.trace(&w("b"), ROOT).unwrap() else {
            panic!("lazy trace never sticks");
        };
        assert_ne!(v, ROOT);
        assert_eq!(g.num_vertices(), 2);
        assert_eq!(g.peek(v, Letter(-2)), Some(ROOT));
        g.set_lazy(false);
        assert_eq!(
            g.trace(&w("bb"), ROOT).unwrap(),
            TraceOutcome::Stuck { at: v, remaining: w("b") }
        );
    }

    #[test]
    fn dump_round_trips() {
        let g = fold(&[w("abAB")], Alphabet::default());
        let back = CosetGraph::from_dump(&g.dump()).unwrap();
        assert_eq!(back.num_vertices(), g.num_vertices());
        let a: Vec<_> = g.defined_pairs().collect();
        let b: Vec<_> = back.defined_pairs().collect();
        assert_eq!(a, b);
        assert!(CosetGraph::from_dump("0 a 1\n0 a 2\n").is_err());
        assert!(CosetGraph::from_dump("0 ab 1\n").is_err());
    }

    #[test]
    fn budget_is_enforced() {
        let mut g = CosetGraph::trivial(Alphabet::default());
        g.set_max_vertices(10);
        let err = g.trace(&w("abababababab"), ROOT).unwrap_err();
        assert_eq!(err, Error::BudgetExceeded(10));
    }
}
