//! Incremental construction of essential subgroups of F₂ whose cogrowth
//! follows a prescribed target function.
//!
//! The state is a Schreier transversal tree `T` together with a partial
//! coset function `π`, stored as an involutive transition table in which
//! tree edges are ordinary transitions and the remaining transitions are
//! chords. Growth sections add levels greedily up to `α` and then close
//! every inner slot by opposite travel; essentiality sections make some
//! power of the next element trace back to the root, extending `T` with two
//! power paths and a tie when travel alone does not close.

use serde::{Deserialize, Serialize};

use crate::coset::{from_permutations, Backend, CosetGraph, PermutationRep, ROOT};
use crate::error::{Error, Result};
use crate::growth::{CgFunction, GrowthTable};
use crate::words::{Alphabet, Letter, ShortLex, Word};

/// Vertices kept free on the last level of every growth section, so the
/// paths of the next essentiality section fit under `α`.
const LEVEL_RESERVE: u64 = 3;
/// Deeper growth sections tried before accepting a short one.
const MAX_RESCHEDULES: usize = 5;
/// Extra periods tried before a tie is declared impossible.
const MAX_TIE_ATTEMPTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Section {
    Root,
    Growth(usize),
    Essential(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CertificateStatus {
    /// Powers of `g` already returned to the root.
    Travel,
    /// Closed by the two-path tie, `k = r + s + 1`.
    Tie,
}

/// `g^k ∈ H`, replayable by tracing `g^k` from the root.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub g: Word,
    pub k: u64,
    pub r: u64,
    pub s: u64,
    pub status: CertificateStatus,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SectionRecord {
    pub section: Section,
    pub depth_from: usize,
    pub depth_to: usize,
    pub element: Option<Word>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunReport {
    pub complete: bool,
    pub certificates: usize,
    pub frontier_depth: usize,
    pub interior_depth: usize,
    pub vertices: usize,
    pub stopped_by: Option<String>,
}

#[derive(Debug, Clone)]
struct Node {
    parent: Option<(usize, Letter)>,
    depth: usize,
    section: Section,
    pos: usize,
}

enum Growth {
    Closed(u64),
    Path { end: usize, periods: u64 },
}

#[derive(Debug, Clone)]
pub struct ConstructionState {
    alpha: CgFunction,
    alpha_cache: Vec<u64>,
    cap_c: u32,
    nodes: Vec<Node>,
    trans: Vec<Option<usize>>,
    levels: Vec<Vec<usize>>,
    interior_depth: usize,
    schedule: Vec<SectionRecord>,
    cursor: ShortLex,
    pending: Option<Word>,
    certificates: Vec<Certificate>,
    growth_sections: usize,
    essential_sections: usize,
    last_e_span: usize,
    max_vertices: usize,
}

const M: usize = 4;

fn alphabet() -> Alphabet {
    Alphabet::default()
}

/// Coset graph of a finite-index subgroup whose cogrowth is eventually the
/// limit of a bounded target: `x` acts as a `k`-cycle, `y` trivially.
pub fn finite_index_fallback(alpha: &CgFunction) -> Result<CosetGraph> {
    let k = alpha.limit().ok_or(Error::UnboundedAlpha)? as usize;
    let cycle: Vec<usize> = (0..k).map(|p| (p + 1) % k).collect();
    let identity: Vec<usize> = (0..k).collect();
    from_permutations(&PermutationRep::new(k, vec![cycle, identity], 0)?)
}

impl ConstructionState {
    pub fn new(alpha: CgFunction) -> Result<Self> {
        if alpha.is_bounded() {
            return Err(Error::BoundedAlpha);
        }
        let cap_c = alpha.cap_c();
        let mut cursor = ShortLex::new(alphabet());
        cursor.next();
        Ok(ConstructionState {
            alpha,
            alpha_cache: vec![1],
            cap_c,
            nodes: vec![Node {
                parent: None,
                depth: 0,
                section: Section::Root,
                pos: 0,
            }],
            trans: vec![None; M],
            levels: vec![vec![ROOT]],
            interior_depth: 0,
            schedule: Vec::new(),
            cursor,
            pending: None,
            certificates: Vec::new(),
            growth_sections: 0,
            essential_sections: 0,
            last_e_span: 0,
            max_vertices: crate::coset::DEFAULT_MAX_VERTICES,
        })
    }

    pub fn set_max_vertices(&mut self, cap: usize) {
        self.max_vertices = cap;
    }

    pub fn alpha(&self) -> &CgFunction {
        &self.alpha
    }

    pub fn cap_c(&self) -> u32 {
        self.cap_c
    }

    pub fn num_vertices(&self) -> usize {
        self.nodes.len()
    }

    pub fn frontier_depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn interior_depth(&self) -> usize {
        self.interior_depth
    }

    pub fn certificates(&self) -> &[Certificate] {
        &self.certificates
    }

    pub fn schedule(&self) -> &[SectionRecord] {
        &self.schedule
    }

    pub fn depth(&self, v: usize) -> usize {
        self.nodes[v].depth
    }

    pub fn section(&self, v: usize) -> Section {
        self.nodes[v].section
    }

    pub fn pi(&self, v: usize, l: Letter) -> Option<usize> {
        self.trans[v * M + l.slot()]
    }

    /// Tree word of a vertex.
    pub fn word(&self, v: usize) -> Word {
        let mut letters = Vec::with_capacity(self.nodes[v].depth);
        let mut cur = v;
        while let Some((p, l)) = self.nodes[cur].parent {
            letters.push(l);
            cur = p;
        }
        letters.reverse();
        Word::from_reduced_unchecked(letters)
    }

    /// `Γ_T(0..=frontier)`.
    pub fn tree_table(&self) -> GrowthTable {
        let counts: Vec<u64> = self.levels.iter().map(|l| l.len() as u64).collect();
        GrowthTable::from_increments(&counts).expect("vertex counts fit")
    }

    fn alpha_at(&mut self, n: usize) -> u64 {
        while self.alpha_cache.len() <= n {
            let i = self.alpha_cache.len();
            let prev = *self.alpha_cache.last().expect("nonempty");
            self.alpha_cache.push(prev.saturating_add(self.alpha.increment(i)));
        }
        self.alpha_cache[n]
    }

    fn set_edge(&mut self, v: usize, l: Letter, u: usize) -> Result<()> {
        if self.pi(v, l).is_some() {
            return Err(Error::AlreadyDefined { vertex: v, letter: l });
        }
        if self.pi(u, l.inverse()).is_some() {
            return Err(Error::AlreadyDefined {
                vertex: u,
                letter: l.inverse(),
            });
        }
        self.trans[v * M + l.slot()] = Some(u);
        self.trans[u * M + l.inverse().slot()] = Some(v);
        Ok(())
    }

    fn add_child(&mut self, parent: usize, l: Letter, section: Section) -> Result<usize> {
        if self.nodes.len() >= self.max_vertices {
            return Err(Error::BudgetExceeded(self.max_vertices));
        }
        let v = self.nodes.len();
        let depth = self.nodes[parent].depth + 1;
        if self.levels.len() <= depth {
            self.levels.push(Vec::new());
        }
        self.nodes.push(Node {
            parent: Some((parent, l)),
            depth,
            section,
            pos: self.levels[depth].len(),
        });
        self.levels[depth].push(v);
        self.trans.extend([None; M]);
        self.set_edge(parent, l, v)?;
        Ok(v)
    }

    /// Orders a level by the ShortLex order of its tree words, given that
    /// the previous level is already ordered.
    fn sort_level(&mut self, d: usize) {
        let mut level = std::mem::take(&mut self.levels[d]);
        level.sort_by_key(|&v| {
            let (p, l) = self.nodes[v].parent.expect("non-root");
            (self.nodes[p].pos, l.slot())
        });
        for (i, &v) in level.iter().enumerate() {
            self.nodes[v].pos = i;
        }
        self.levels[d] = level;
    }

    /// Closes `π(g, x)` by walking `x⁻¹`-transitions from `g` as far as
    /// possible and tying the endpoint back to `g`.
    pub fn opposite_travel(&mut self, g: usize, x: Letter) -> Result<usize> {
        if self.pi(g, x).is_some() {
            return Err(Error::AlreadyDefined { vertex: g, letter: x });
        }
        let mut h = g;
        let mut steps = 0;
        while let Some(next) = self.pi(h, x.inverse()) {
            h = next;
            steps += 1;
            if h == g || steps > self.nodes.len() {
                return Err(Error::Invariant(format!("x⁻¹-orbit of vertex {g} is a cycle")));
            }
        }
        self.set_edge(g, x, h)?;
        Ok(h)
    }

    /// Extends the tree greedily up to `target_depth` without exceeding
    /// `α`, then defines `π` on every vertex of depth `< target_depth − 1`.
    pub fn run_g_section(&mut self, target_depth: usize) -> Result<()> {
        if target_depth <= self.frontier_depth() {
            return Ok(());
        }
        let index = self.growth_sections;
        self.growth_sections += 1;
        let section = Section::Growth(index);
        let first = self.interior_depth + 1;
        for i in first..=target_depth {
            if self.levels.len() <= i {
                self.levels.push(Vec::new());
            }
            self.sort_level(i);
            let below: u64 = self.levels[..i].iter().map(|l| l.len() as u64).sum();
            let existing = self.levels[i].len() as u64;
            let mut cap = self.alpha_at(i);
            if i == target_depth {
                cap = cap.saturating_sub(LEVEL_RESERVE);
            }
            let want = cap.saturating_sub(below + existing);
            let want = if existing == 0 { want.max(1) } else { want };
            let added = self.widen_level(i, want, true, section)?;
            if added == 0 && existing == 0 {
                if self.widen_level(i, 1, false, section)? == 0 {
                    return Err(Error::Invariant(format!("no free slot to grow level {i}")));
                }
            }
            self.sort_level(i);
        }
        for d in 0..target_depth - 1 {
            let level = self.levels[d].clone();
            for v in level {
                for x in alphabet().letters() {
                    if self.pi(v, x).is_none() {
                        self.opposite_travel(v, x)?;
                    }
                }
            }
        }
        let from = self.interior_depth;
        self.interior_depth = self.interior_depth.max(target_depth - 1);
        self.schedule.push(SectionRecord {
            section,
            depth_from: from,
            depth_to: target_depth,
            element: None,
        });
        Ok(())
    }

    /// Adds up to `want` children to level `i`, in ShortLex order of their
    /// words. With `no_repeat`, a non-root parent never gets a child along
    /// its own incoming letter.
    fn widen_level(&mut self, i: usize, want: u64, no_repeat: bool, section: Section) -> Result<u64> {
        let mut added = 0;
        let parents = self.levels[i - 1].clone();
        'outer: for p in parents {
            let incoming = self.nodes[p].parent.map(|(_, l)| l);
            for x in alphabet().letters() {
                if added >= want {
                    break 'outer;
                }
                if self.pi(p, x).is_some() || (no_repeat && incoming == Some(x)) {
                    continue;
                }
                self.add_child(p, x, section)?;
                added += 1;
            }
        }
        Ok(added)
    }

    /// Smallest `k ≥ 1` with `g^k` tracing from the root back to it along
    /// defined transitions.
    fn travel_power(&self, g: &Word) -> Option<u64> {
        if g.is_empty() {
            return Some(1);
        }
        let mut v = ROOT;
        for k in 1..=self.nodes.len() as u64 + 1 {
            for &l in g.letters() {
                v = self.pi(v, l)?;
            }
            if v == ROOT {
                return Some(k);
            }
        }
        None
    }

    fn advance(&mut self, v: usize, l: Letter, section: Section, created: &mut bool) -> Result<usize> {
        match self.pi(v, l) {
            Some(u) => Ok(u),
            None => {
                *created = true;
                self.add_child(v, l, section)
            }
        }
    }

    /// Travels `h1` then powers of `h` from the root, appending fresh
    /// vertices where `π` is undefined. Stops when the travel returns to
    /// `π(h1)` after a whole period, or at the end of the first period (not
    /// before `min_periods`) in which something was appended.
    fn grow_power_path(&mut self, h1: &Word, h: &Word, min_periods: u64, section: Section) -> Result<Growth> {
        let mut created = false;
        let mut v = ROOT;
        for &l in h1.letters() {
            v = self.advance(v, l, section, &mut created)?;
        }
        let p = v;
        if created && min_periods == 0 {
            return Ok(Growth::Path { end: p, periods: 0 });
        }
        let mut j = 0u64;
        loop {
            for &l in h.letters() {
                v = self.advance(v, l, section, &mut created)?;
            }
            j += 1;
            if v == p {
                return Ok(Growth::Closed(j));
            }
            if created && j >= min_periods {
                return Ok(Growth::Path { end: v, periods: j });
            }
            if j > self.nodes.len() as u64 + 1 {
                return Err(Error::Invariant("power travel neither closed nor stuck".into()));
            }
        }
    }

    /// Processes the next element of the ShortLex enumeration.
    pub fn run_e_section(&mut self) -> Result<Certificate> {
        let g = self.next_element();
        self.e_section_for(&g)
    }

    fn next_element(&mut self) -> Word {
        self.pending.take().unwrap_or_else(|| self.cursor.next().expect("infinite enumeration"))
    }

    fn peek_element(&mut self) -> Word {
        if self.pending.is_none() {
            self.pending = self.cursor.next();
        }
        self.pending.clone().expect("infinite enumeration")
    }

    fn e_section_for(&mut self, g: &Word) -> Result<Certificate> {
        let index = self.essential_sections;
        self.essential_sections += 1;
        let section = Section::Essential(index);
        let frontier = self.frontier_depth();
        let before = self.nodes.len();
        let cert = self.certify_element(g, section)?;
        let deepest = self.nodes[before..].iter().map(|n| n.depth).max();
        self.last_e_span = deepest.map_or(0, |d| d.saturating_sub(frontier));
        self.schedule.push(SectionRecord {
            section,
            depth_from: frontier,
            depth_to: deepest.unwrap_or(frontier).max(frontier),
            element: Some(g.clone()),
        });
        if !self.replays(&cert) {
            return Err(Error::Invariant(format!("certificate for {} does not replay", cert.g)));
        }
        self.certificates.push(cert.clone());
        Ok(cert)
    }

    fn certify_element(&mut self, g: &Word, section: Section) -> Result<Certificate> {
        let travel = |g: &Word, k: u64| Certificate {
            g: g.clone(),
            k,
            r: 0,
            s: 0,
            status: CertificateStatus::Travel,
        };
        if let Some(k) = self.travel_power(g) {
            return Ok(travel(g, k));
        }
        let parts = g.cyclic_reduce()?;
        let (h1, h2) = (parts.h1, parts.h2);
        let h2_inv = h2.inverse();
        let x = h2.first().expect("nontrivial core");
        let w = Word::from_reduced_unchecked(h2.letters()[1..].to_vec());
        let mut min_r = 0;
        let mut min_s = 1;
        for _ in 0..MAX_TIE_ATTEMPTS {
            let (u1, r) = match self.grow_power_path(&h1, &h2, min_r, section)? {
                Growth::Closed(k) => return Ok(travel(g, k)),
                Growth::Path { end, periods } => (end, periods),
            };
            let (u2, s) = match self.grow_power_path(&h1, &h2_inv, min_s, section)? {
                Growth::Closed(k) => return Ok(travel(g, k)),
                Growth::Path { end, periods } => (end, periods),
            };
            let u2_slot = match w.last() {
                Some(last) => last.inverse(),
                None => x.inverse(),
            };
            let separated = u1 != u2 && self.pi(u1, x).is_none() && self.pi(u2, u2_slot).is_none();
            if !separated {
                min_r = r + 1;
                min_s = s + 1;
                continue;
            }
            let mut end = u2;
            for &l in w.inverse().letters() {
                end = self.add_child(end, l, section)?;
            }
            self.set_edge(u1, x, end)?;
            return Ok(Certificate {
                g: g.clone(),
                k: r + s + 1,
                r,
                s,
                status: CertificateStatus::Tie,
            });
        }
        Err(Error::Invariant(format!("power paths of {g} never separated")))
    }

    fn replays(&self, cert: &Certificate) -> bool {
        let mut v = ROOT;
        for _ in 0..cert.k {
            for &l in cert.g.letters() {
                match self.pi(v, l) {
                    Some(u) => v = u,
                    None => return false,
                }
            }
        }
        v == ROOT
    }

    /// Alternates growth and essentiality sections until `elements`
    /// certificates exist and the tree reaches `min_depth`. Running out of
    /// vertex budget rolls back the unfinished section and reports partial
    /// progress.
    pub fn run_until(&mut self, elements: usize, min_depth: usize) -> Result<RunReport> {
        let mut last_e_span = 0;
        while self.certificates.len() < elements {
            let g = self.peek_element();
            if let Some(k) = self.travel_power(&g) {
                self.next_element();
                let frontier = self.frontier_depth();
                let index = self.essential_sections;
                self.essential_sections += 1;
                self.schedule.push(SectionRecord {
                    section: Section::Essential(index),
                    depth_from: frontier,
                    depth_to: frontier,
                    element: Some(g.clone()),
                });
                self.certificates.push(Certificate {
                    g,
                    k,
                    r: 0,
                    s: 0,
                    status: CertificateStatus::Travel,
                });
                continue;
            }
            let parts = g.cyclic_reduce()?;
            let estimate = parts.h1.len() + 4 * parts.h2.len();
            let mut span = estimate.max(last_e_span).max(2);
            let mut attempts = 0;
            loop {
                let snapshot = self.clone();
                let target = self.frontier_depth() + span;
                let outcome = self.run_g_section(target).and_then(|_| {
                    let g = self.next_element();
                    self.e_section_for(&g)
                });
                match outcome {
                    Ok(_) if self.last_e_span <= span || attempts >= MAX_RESCHEDULES => {
                        last_e_span = self.last_e_span;
                        break;
                    }
                    Ok(_) => {
                        span = self.last_e_span;
                        *self = snapshot;
                        attempts += 1;
                    }
                    Err(e) if e.is_resource() => {
                        *self = snapshot;
                        return Ok(self.report(false, Some(e.to_string())));
                    }
                    Err(e) => return Err(e),
                }
            }
        }
        let frontier = self.frontier_depth();
        let mut target = min_depth;
        if frontier > self.interior_depth + 1 {
            target = target.max(frontier + last_e_span.max(2));
        }
        if target > frontier {
            let snapshot = self.clone();
            if let Err(e) = self.run_g_section(target) {
                if e.is_resource() {
                    *self = snapshot;
                    return Ok(self.report(false, Some(e.to_string())));
                }
                return Err(e);
            }
        }
        Ok(self.report(true, None))
    }

    fn report(&self, complete: bool, stopped_by: Option<String>) -> RunReport {
        RunReport {
            complete,
            certificates: self.certificates.len(),
            frontier_depth: self.frontier_depth(),
            interior_depth: self.interior_depth,
            vertices: self.nodes.len(),
            stopped_by,
        }
    }

    /// Violations of `π(π(g·x)·x⁻¹) = g` over all defined pairs.
    pub fn involution_violations(&self) -> usize {
        (0..self.nodes.len())
            .flat_map(|v| alphabet().letters().map(move |l| (v, l)))
            .filter(|&(v, l)| self.pi(v, l).is_some_and(|u| self.pi(u, l.inverse()) != Some(v)))
            .count()
    }

    /// The partial coset graph, with safe horizon equal to the interior
    /// depth.
    pub fn export(&self) -> CosetGraph {
        let mut g = CosetGraph::with_vertices(
            alphabet(),
            self.nodes.len(),
            Backend::Construction {
                safe_horizon: self.interior_depth,
            },
        );
        g.trans.clone_from(&self.trans);
        g
    }

    /// Checks the sandwich bounds up to level `n ≤ interior/2`, using
    /// `constant` (default `2c + 2`) for the lower bound.
    pub fn sandwich_report(&mut self, n: usize, constant: Option<u64>) -> Result<SandwichReport> {
        let safe = self.interior_depth;
        if 2 * n > safe {
            return Err(Error::BeyondSafeHorizon {
                requested: n,
                horizon: safe / 2,
            });
        }
        let constant = constant.unwrap_or(2 * u64::from(self.cap_c) + 2);
        if constant == 0 {
            return Err(Error::InvalidArgument("constant must be positive".into()));
        }
        let frontier = self.frontier_depth();
        let tree = self.tree_table();
        let alpha: Vec<u64> = (0..=2 * frontier).map(|i| self.alpha_at(i)).collect();
        let mut graph = self.export();
        let cosets = graph.cogrowth(n)?;

        let tree_below_alpha = (0..=frontier).all(|k| tree.at(k) <= alpha[k]);
        let tree_below_alpha_doubled = (0..=frontier).all(|k| tree.at(k) <= alpha[2 * k]);
        let alpha_below_tree = (0..=frontier).all(|k| alpha[k / constant as usize] <= tree.at(k));
        let tree_below_cosets = (0..=n).all(|k| tree.at(k) <= cosets.at(k));
        let cosets_below_tree = (0..=n).all(|k| cosets.at(k) <= tree.at(2 * k));
        let (sampled, doubling_violations) = self.length_doubling_scan(n);

        Ok(SandwichReport {
            n,
            constant,
            alpha: alpha[..=2 * n].to_vec(),
            tree: tree.values()[..=2 * n].to_vec(),
            cosets: cosets.values().to_vec(),
            tree_below_alpha,
            tree_below_alpha_doubled,
            alpha_below_tree,
            tree_below_cosets,
            cosets_below_tree,
            sampled_words: sampled,
            doubling_violations,
        })
    }

    /// Traces every reduced word of length `≤ len` and counts those whose
    /// representative is more than twice as long.
    fn length_doubling_scan(&self, len: usize) -> (usize, usize) {
        let mut sampled = 0;
        let mut violations = 0;
        let mut stack: Vec<(usize, usize, Option<Letter>)> = vec![(ROOT, 0, None)];
        while let Some((v, l, last)) = stack.pop() {
            sampled += 1;
            if self.nodes[v].depth > 2 * l {
                violations += 1;
            }
            if l == len {
                continue;
            }
            for x in alphabet().letters() {
                if last.is_some_and(|p| p.is_inverse_of(x)) {
                    continue;
                }
                match self.pi(v, x) {
                    Some(u) => stack.push((u, l + 1, Some(x))),
                    None => {
                        sampled += 1;
                        violations += 1;
                    }
                }
            }
        }
        (sampled, violations)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SandwichReport {
    pub n: usize,
    pub constant: u64,
    /// `α(0..=2n)`.
    pub alpha: Vec<u64>,
    /// `Γ_T(0..=2n)`.
    pub tree: Vec<u64>,
    /// `Γ_{G/H}(0..=n)`.
    pub cosets: Vec<u64>,
    /// `Γ_T ≤ α` on every constructed level.
    pub tree_below_alpha: bool,
    /// `Γ_T(k) ≤ α(2k)` on every constructed level.
    pub tree_below_alpha_doubled: bool,
    /// `α(⌊k/C⌋) ≤ Γ_T(k)` on every constructed level.
    pub alpha_below_tree: bool,
    pub tree_below_cosets: bool,
    /// `Γ_{G/H}(k) ≤ Γ_T(2k)`.
    pub cosets_below_tree: bool,
    pub sampled_words: usize,
    /// Sampled words `w` with `l(π(w)) > 2 l(w)`.
    pub doubling_violations: usize,
}

impl SandwichReport {
    pub fn all_pass(&self) -> bool {
        self.tree_below_alpha
            && self.alpha_below_tree
            && self.tree_below_cosets
            && self.cosets_below_tree
            && self.doubling_violations == 0
    }

    /// Rows `n, α, Γ_T, Γ_{G/H}` for levels `0..=n`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,alpha,tree,cosets\n");
        for k in 0..=self.n {
            out.push_str(&format!("{k},{},{},{}\n", self.alpha[k], self.tree[k], self.cosets[k]));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::growth::Family;
    use crate::words::words_up_to;

    fn state(kind: Family) -> ConstructionState {
        ConstructionState::new(CgFunction::family(kind).unwrap()).unwrap()
    }

    fn w(s: &str) -> Word {
        Word::parse(s, alphabet(), false).unwrap()
    }

    fn check_structure(st: &ConstructionState) {
        assert_eq!(st.involution_violations(), 0);
        for v in 0..st.num_vertices() {
            let word = st.word(v);
            assert_eq!(word.len(), st.depth(v));
            let d = st.depth(v);
            let full = alphabet().letters().all(|l| st.pi(v, l).is_some());
            if d < st.interior_depth() {
                assert!(full, "interior vertex {v} at depth {d} incomplete");
            }
            if d == st.frontier_depth() && d > st.interior_depth() {
                assert!(!full, "frontier vertex {v} is closed");
            }
        }
    }

    #[test]
    fn new_rejects_bounded_targets() {
        assert_eq!(state(Family::Polynomial(1)).cap_c(), 1);
        let d5 = CgFunction::from_fn("d5", None, num_rational::Ratio::from_integer(5), |i| 5u64.pow(i as u32)).unwrap();
        assert_eq!(ConstructionState::new(d5).unwrap().cap_c(), 3);
        let finite = CgFunction::family(Family::Finite(2)).unwrap();
        assert_eq!(ConstructionState::new(finite).unwrap_err(), Error::BoundedAlpha);
    }

    #[test]
    fn fallback_has_eventually_constant_cogrowth() {
        for k in [1u64, 2, 5] {
            let alpha = CgFunction::family(Family::Finite(k)).unwrap();
            let mut g = finite_index_fallback(&alpha).unwrap();
            let t = g.cogrowth(6).unwrap();
            assert_eq!(t.at(6), k);
            assert!(t.at(4) == k);
        }
        let unbounded = CgFunction::family(Family::Polynomial(1)).unwrap();
        assert_eq!(finite_index_fallback(&unbounded).unwrap_err(), Error::UnboundedAlpha);
    }

    #[test]
    fn linear_target_grows_a_ray() {
        let mut st = state(Family::Polynomial(1));
        st.run_g_section(6).unwrap();
        assert_eq!(st.tree_table().values(), &[1, 2, 3, 4, 5, 6, 7]);
        check_structure(&st);
        let before = st.clone();
        st.run_g_section(5).unwrap();
        assert_eq!(st.num_vertices(), before.num_vertices());
        assert_eq!(st.schedule().len(), before.schedule().len());
    }

    #[test]
    fn exponential_target_respects_alpha_and_capacity() {
        let mut st = state(Family::Exponential(2));
        st.run_g_section(3).unwrap();
        let t = st.tree_table();
        for n in 0..=3 {
            assert!(t.at(n) <= (1 << (n + 1)) - 1);
        }
        for v in 1..st.num_vertices() {
            let children = alphabet()
                .letters()
                .filter(|&l| st.pi(v, l).is_some_and(|u| st.nodes[u].parent == Some((v, l))))
                .count();
            assert!(children <= 2);
        }
        check_structure(&st);
    }

    #[test]
    fn opposite_travel_is_short_in_first_section() {
        let mut st = state(Family::Polynomial(2));
        st.run_g_section(6).unwrap();
        // The only way back from π(g, x) to g is the single closing step.
        for v in 0..st.num_vertices() {
            if st.depth(v) + 1 >= st.interior_depth() {
                continue;
            }
            for x in alphabet().letters() {
                let u = st.pi(v, x).unwrap();
                assert!(st.depth(u) <= st.depth(v) + 2);
            }
        }
        check_structure(&st);
        let mut fresh = state(Family::Polynomial(1));
        assert_eq!(fresh.opposite_travel(ROOT, Letter(2)).unwrap(), ROOT);
        assert!(fresh.opposite_travel(ROOT, Letter(2)).is_err());
    }

    #[test]
    fn first_elements_certify_and_replay() {
        for kind in [
            Family::Polynomial(1),
            Family::Polynomial(2),
            Family::Exponential(2),
            Family::Intermediate(0.5),
        ] {
            let mut st = state(kind);
            let report = st.run_until(5, 10).unwrap();
            assert!(report.complete);
            assert_eq!(st.certificates().len(), 5);
            let mut g = st.export();
            for c in st.certificates() {
                assert!(g.contains(&c.g.pow(c.k as i64)).unwrap(), "{kind} {c:?}");
            }
            check_structure(&st);
        }
    }

    #[test]
    fn tie_construction_closes_conjugates() {
        let mut st = state(Family::Exponential(3));
        st.run_g_section(4).unwrap();
        let c = st.e_section_for(&w("baB")).unwrap();
        assert!(st.replays(&c));
        if c.status == CertificateStatus::Tie {
            assert_eq!(c.k, c.r + c.s + 1);
        }
        check_structure(&st);
    }

    #[test]
    fn many_elements_keep_all_invariants() {
        let mut st = state(Family::Polynomial(2));
        let report = st.run_until(30, 0).unwrap();
        assert!(report.complete, "{report:?}");
        assert!(st.certificates().iter().any(|c| c.status == CertificateStatus::Tie));
        check_structure(&st);
        let mut g = st.export();
        for c in st.certificates() {
            assert!(g.contains(&c.g.pow(c.k as i64)).unwrap());
            if c.status == CertificateStatus::Tie {
                assert_eq!(c.k, c.r + c.s + 1);
            }
        }
        // Tree words lead to their own vertices, so they are distinct cosets.
        for v in 0..st.num_vertices() {
            if st.depth(v) <= 4 {
                let word = st.word(v);
                assert_eq!(g.trace_defined(&word, ROOT), crate::coset::TraceOutcome::Reached(v));
            }
        }
        for x in g.nielsen_schreier_basis(4).unwrap() {
            assert!(g.contains(&x).unwrap());
        }
    }

    #[test]
    fn construction_is_monotone() {
        let mut st = state(Family::Polynomial(2));
        st.run_until(3, 8).unwrap();
        let before = st.clone();
        st.run_until(12, 0).unwrap();
        for v in 0..before.num_vertices() {
            assert_eq!(before.nodes[v].parent, st.nodes[v].parent);
            for l in alphabet().letters() {
                if let Some(u) = before.pi(v, l) {
                    assert_eq!(st.pi(v, l), Some(u));
                }
            }
        }
    }

    #[test]
    fn sandwich_on_standard_targets() {
        let mut st = state(Family::Polynomial(1));
        st.run_until(5, 24).unwrap();
        let r = st.sandwich_report(st.interior_depth() / 2, None).unwrap();
        assert!(r.all_pass(), "{r:?}");
        let mut st = state(Family::Exponential(2));
        st.run_until(5, 14).unwrap();
        let safe = st.interior_depth();
        let r = st.sandwich_report(safe / 2, None).unwrap();
        assert_eq!(r.constant, 4);
        assert!(r.all_pass(), "{r:?}");
        let r0 = st.sandwich_report(0, None).unwrap();
        assert_eq!((r0.alpha[0], r0.tree[0], r0.cosets[0]), (1, 1, 1));
        assert!(st.sandwich_report(safe, None).is_err());
    }

    #[test]
    fn budget_stops_with_partial_state() {
        let mut st = state(Family::Exponential(2));
        st.set_max_vertices(200);
        let report = st.run_until(5, 30).unwrap();
        assert!(!report.complete);
        assert!(report.vertices <= 200);
        check_structure(&st);
    }

    #[test]
    fn pure_growth_and_scheduler_depth() {
        let mut st = state(Family::Polynomial(1));
        st.run_until(0, 9).unwrap();
        assert!(st.certificates().is_empty());
        assert_eq!(st.frontier_depth(), 9);
        let mut st = state(Family::Polynomial(1));
        st.run_until(3, 0).unwrap();
        assert_eq!(st.certificates().len(), 3);
        let g = st.export();
        assert!(words_up_to(alphabet(), 0).iter().all(|x| g.trace_defined(x, ROOT) == crate::coset::TraceOutcome::Reached(ROOT)));
    }
}
