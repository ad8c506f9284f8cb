use std::collections::VecDeque;

use super::{Backend, CosetGraph, ROOT};
use crate::words::{Alphabet, Letter, Word};

/// Union-find over a growing partial transition table.
struct Folder {
    m: usize,
    parent: Vec<usize>,
    trans: Vec<Option<usize>>,
    pending: Vec<(usize, usize)>,
}

impl Folder {
    fn new(m: usize) -> Self {
        Folder {
            m,
            parent: vec![0],
            trans: vec![None; m],
            pending: Vec::new(),
        }
    }

    fn fresh(&mut self) -> usize {
        let v = self.parent.len();
        self.parent.push(v);
        self.trans.extend(std::iter::repeat_n(None, self.m));
        v
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn half_edge(&mut self, v: usize, l: Letter, u: usize) {
        let slot = v * self.m + l.slot();
        match self.trans[slot] {
            Some(w) => self.pending.push((w, u)),
            None => self.trans[slot] = Some(u),
        }
    }

    fn add_edge(&mut self, v: usize, l: Letter, u: usize) {
        let v = self.find(v);
        let u = self.find(u);
        self.half_edge(v, l, u);
        self.half_edge(u, l.inverse(), v);
        self.settle();
    }

    fn settle(&mut self) {
        while let Some((a, b)) = self.pending.pop() {
            let a = self.find(a);
            let b = self.find(b);
            if a == b {
                continue;
            }
            // The smaller id survives, so the root never moves.
            let (keep, gone) = if a < b { (a, b) } else { (b, a) };
            self.parent[gone] = keep;
            for s in 0..self.m {
                if let Some(t) = self.trans[gone * self.m + s].take() {
                    let t = self.find(t);
                    self.half_edge(keep, Letter::from_slot(s), t);
                }
            }
        }
    }
}

/// Stallings folding of `⟨generators⟩`. The result is the core graph,
/// renumbered by ShortLex breadth-first search from the root, and completed
/// lazily by hanging trees.
pub fn fold(generators: &[Word], alphabet: Alphabet) -> CosetGraph {
    let m = alphabet.size();
    let mut f = Folder::new(m);
    for g in generators {
        let letters = g.letters();
        let Some((&last, body)) = letters.split_last() else {
            continue;
        };
        let mut v = ROOT;
        for &l in body {
            let rv = f.find(v);
            let existing = f.trans[rv * m + l.slot()];
            v = match existing {
                Some(u) => f.find(u),
                None => {
                    let u = f.fresh();
                    f.add_edge(v, l, u);
                    u
                }
            };
        }
        f.add_edge(v, last, ROOT);
    }

    let mut id = vec![usize::MAX; f.parent.len()];
    let mut order = vec![f.find(ROOT)];
    id[order[0]] = 0;
    let mut queue = VecDeque::from([order[0]]);
    while let Some(v) = queue.pop_front() {
        for l in alphabet.letters() {
            if let Some(t) = f.trans[v * m + l.slot()] {
                let t = f.find(t);
                if id[t] == usize::MAX {
                    id[t] = order.len();
                    order.push(t);
                    queue.push_back(t);
                }
            }
        }
    }

    let mut g = CosetGraph::with_vertices(
        alphabet,
        order.len(),
        Backend::Folded {
            generators: generators.to_vec(),
        },
    );
    for (new, &old) in order.iter().enumerate() {
        for s in 0..m {
            if let Some(t) = f.trans[old * m + s] {
                let t = f.find(t);
                g.trans[new * m + s] = Some(id[t]);
            }
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coset::TraceOutcome;
    use crate::words::words_up_to;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn w(s: &str) -> Word {
        Word::parse(s, Alphabet::default(), false).unwrap()
    }

    /// Elements of `⟨gens⟩` reachable as products of at most `depth`
    /// generators or inverses, kept when no longer than `max_len`.
    fn brute_force_members(gens: &[Word], depth: usize, max_len: usize) -> BTreeSet<Word> {
        let mut all: Vec<Word> = gens.to_vec();
        all.extend(gens.iter().map(Word::inverse));
        let mut seen = BTreeSet::from([Word::identity()]);
        let mut frontier = vec![Word::identity()];
        for _ in 0..depth {
            let mut next = Vec::new();
            for u in &frontier {
                for g in &all {
                    let p = u.mul(g);
                    if seen.insert(p.clone()) {
                        next.push(p);
                    }
                }
            }
            frontier = next;
        }
        seen.into_iter().filter(|x| x.len() <= max_len).collect()
    }

    fn assert_involutive(g: &CosetGraph) {
        assert!(g.involution_violations().is_empty(), "{:?}", g.involution_violations());
    }

    #[test]
    fn single_generator_is_a_loop() {
        let g = fold(&[w("a")], Alphabet::default());
        assert_eq!(g.num_vertices(), 1);
        assert_eq!(g.peek(ROOT, Letter(1)), Some(ROOT));
        assert_eq!(g.peek(ROOT, Letter(-1)), Some(ROOT));
        assert_eq!(g.peek(ROOT, Letter(2)), None);
    }

    #[test]
    fn aa_and_b_fold_to_two_vertices() {
        let g = fold(&[w("aa"), w("b")], Alphabet::default());
        assert_eq!(g.num_vertices(), 2);
        assert_eq!(g.peek(ROOT, Letter(2)), Some(ROOT));
        assert_eq!(g.trace_defined(&w("aa"), ROOT), TraceOutcome::Reached(ROOT));
        assert_eq!(g.trace_defined(&w("b"), ROOT), TraceOutcome::Reached(ROOT));
        assert_involutive(&g);
    }

    #[test]
    fn commutator_is_a_four_cycle() {
        let mut g = fold(&[w("abAB")], Alphabet::default());
        assert_eq!(g.num_vertices(), 4);
        assert!(g.contains(&w("abAB")).unwrap());
        assert!(!g.contains(&w("ab")).unwrap());
        assert_involutive(&g);
    }

    #[test]
    fn folding_identifies_shared_prefixes() {
        // Both generators start with `ab`, so their paths share two edges.
        let g = fold(&[w("abab"), w("abaB")], Alphabet::default());
        assert_involutive(&g);
        let g = fold(&[w("abbA"), w("abA")], Alphabet::default());
        assert_involutive(&g);
        assert_eq!(g.num_vertices(), 2);
        assert_eq!(g.trace_defined(&w("abbA"), ROOT), TraceOutcome::Reached(ROOT));
    }

    #[test]
    fn trivial_generators_give_one_vertex() {
        let g = fold(&[Word::identity()], Alphabet::default());
        assert_eq!(g.num_vertices(), 1);
        assert!(g.is_folded());
    }

    #[test]
    fn non_root_vertices_have_degree_at_least_two() {
        let g = fold(&[w("abAB"), w("aab"), w("bbaB")], Alphabet::default());
        for v in 1..g.num_vertices() {
            let deg = Alphabet::default().letters().filter(|&l| g.peek(v, l).is_some()).count();
            assert!(deg >= 2, "vertex {v} has degree {deg}");
        }
    }

    #[test]
    fn membership_matches_invariants_on_finite_index_subgroups() {
        // ⟨aa, ab, bA⟩ is the even-length subgroup.
        let mut even = fold(&[w("aa"), w("ab"), w("bA")], Alphabet::default());
        // ⟨aaa, b, aba⁻¹, aaba⁻²⟩ is the kernel of the a-exponent sum mod 3.
        let mut mod3 = fold(&[w("aaa"), w("b"), w("abA"), w("aabAA")], Alphabet::default());
        for x in words_up_to(Alphabet::default(), 6) {
            assert_eq!(even.contains(&x).unwrap(), x.len() % 2 == 0, "{x}");
            let sum: i32 = x.letters().iter().filter(|l| l.0.abs() == 1).map(|l| l.0 as i32).sum();
            assert_eq!(mod3.contains(&x).unwrap(), sum.rem_euclid(3) == 0, "{x}");
        }
    }

    fn arb_word(max_len: usize) -> impl Strategy<Value = Word> {
        prop::collection::vec(prop::sample::select(vec![1i32, -1, 2, -2]), 1..=max_len)
            .prop_map(|v| Word::from_ints(&v, Alphabet::default()).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn membership_matches_brute_force(gens in prop::collection::vec(arb_word(4), 1..=3)) {
            let mut g = fold(&gens, Alphabet::default());
            prop_assert!(g.involution_violations().is_empty());
            for gen in &gens {
                prop_assert!(g.contains(gen).unwrap());
            }
            for x in &brute_force_members(&gens, 5, 6) {
                prop_assert!(g.contains(x).unwrap(), "{} should be a member", x);
            }
        }
    }
}
