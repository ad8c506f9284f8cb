use super::{fold, Backend, CosetGraph, Vertex, ROOT};
use crate::error::{Error, Result};
use crate::growth::GrowthTable;
use crate::words::{Alphabet, Letter, Word};

const UNSEEN: usize = usize::MAX;

/// Breadth-first ball around the root. Vertices are listed in discovery
/// order, which is ShortLex order of their representatives.
#[derive(Debug, Clone)]
pub(crate) struct Ball {
    pub order: Vec<Vertex>,
    pub dist: Vec<usize>,
    pub parent: Vec<Option<(Vertex, Letter)>>,
}

impl Ball {
    pub fn dist_of(&self, v: Vertex) -> Option<usize> {
        self.dist.get(v).copied().filter(|&d| d != UNSEEN)
    }

    pub fn is_tree_edge(&self, v: Vertex, l: Letter, u: Vertex) -> bool {
        self.parent.get(u).copied().flatten() == Some((v, l))
            || self.parent.get(v).copied().flatten() == Some((u, l.inverse()))
    }

    /// Representatives indexed by vertex id.
    pub fn representatives(&self) -> Vec<Option<Word>> {
        let mut reps: Vec<Option<Word>> = vec![None; self.dist.len()];
        for &v in &self.order {
            reps[v] = Some(match self.parent[v] {
                None => Word::identity(),
                Some((p, l)) => {
                    let mut w = reps[p].clone().expect("parent precedes child");
                    w.push(l);
                    w
                }
            });
        }
        reps
    }
}

/// ShortLex-minimal Schreier transversal up to some length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transversal {
    pub words: Vec<Word>,
    pub level_counts: Vec<u64>,
}

impl Transversal {
    pub fn table(&self) -> GrowthTable {
        GrowthTable::from_increments(&self.level_counts).expect("level counts fit")
    }

    pub fn is_prefix_closed(&self) -> bool {
        let set: std::collections::HashSet<&Word> = self.words.iter().collect();
        self.words
            .iter()
            .all(|w| w.is_empty() || set.contains(&w.prefix(w.len() - 1)))
    }
}

/// One level of the coset sandwich: `lower ≤ total ≤ upper`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SandwichRow {
    pub n: usize,
    pub lower: u64,
    pub total: u64,
    pub upper: u64,
}

impl SandwichRow {
    pub fn holds(&self) -> bool {
        self.lower <= self.total && self.total <= self.upper
    }
}

/// Ball sizes of the free group: `1 + Σ 2m(2m−1)^{i−1}`.
pub fn free_group_growth(alphabet: Alphabet, n: usize) -> GrowthTable {
    GrowthTable::new((0..=n).map(|i| alphabet.ball_size(i)).collect()).expect("ball sizes increase")
}

impl CosetGraph {
    /// Expands every vertex at distance `< radius`. With `materialize`
    /// off, only already-defined transitions are followed.
    pub(crate) fn bfs(&mut self, radius: usize, materialize: bool) -> Result<Ball> {
        let mut dist = vec![UNSEEN; self.num_vertices()];
        let mut parent = vec![None; self.num_vertices()];
        dist[ROOT] = 0;
        let mut order = vec![ROOT];
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            if dist[v] >= radius {
                continue;
            }
            for l in self.alphabet.letters() {
                let next = if materialize { self.step(v, l)? } else { self.peek(v, l) };
                let Some(u) = next else { continue };
                if u >= dist.len() {
                    dist.resize(u + 1, UNSEEN);
                    parent.resize(u + 1, None);
                }
                if dist[u] == UNSEEN {
                    dist[u] = dist[v] + 1;
                    parent[u] = Some((v, l));
                    order.push(u);
                }
            }
        }
        dist.resize(self.num_vertices(), UNSEEN);
        parent.resize(self.num_vertices(), None);
        Ok(Ball { order, dist, parent })
    }

    fn materializes(&self) -> bool {
        !matches!(self.backend, Backend::Folded { .. }) || self.lazy
    }

    /// The unique ShortLex-minimal transversal restricted to length `≤ n`.
    pub fn minimal_transversal(&mut self, n: usize) -> Result<Transversal> {
        let materialize = self.materializes();
        let ball = self.bfs(n, materialize)?;
        let reps = ball.representatives();
        let mut level_counts = vec![0u64; n + 1];
        let mut words = Vec::with_capacity(ball.order.len());
        for &v in &ball.order {
            level_counts[ball.dist[v]] += 1;
            words.push(reps[v].clone().expect("every ball vertex has a representative"));
        }
        Ok(Transversal { words, level_counts })
    }

    /// Cogrowth table `Γ_{G/H}(0..=n)`.
    pub fn cogrowth(&mut self, n: usize) -> Result<GrowthTable> {
        Ok(self.minimal_transversal(n)?.table())
    }

    /// `Γ^{(G)}_H(0..=n)`: reduced words of length `≤ n` tracing root to root.
    pub fn subgroup_growth(&mut self, n: usize) -> Result<GrowthTable> {
        let m = self.alphabet.size();
        let r = n / 2;
        // Hanging trees carry no loops, so folded graphs only need their core.
        let materialize = !self.is_folded();
        let ball = self.bfs(r + 1, materialize)?;
        let pos: std::collections::HashMap<Vertex, usize> = ball
            .order
            .iter()
            .enumerate()
            .filter(|(_, &v)| ball.dist[v] <= r)
            .map(|(i, &v)| (v, i))
            .collect();
        let k = ball.order.len();
        let letters: Vec<Letter> = self.alphabet.letters().collect();
        let mut cur = vec![0u64; k * m];
        let mut values = vec![1u64];
        for &l in &letters {
            if let Some(u) = self.peek(ROOT, l) {
                if let Some(&i) = pos.get(&u) {
                    if n >= 1 && ball.dist[u] < n {
                        cur[i * m + l.slot()] += 1;
                    }
                }
            }
        }
        for j in 1..=n {
            let loops: u64 = letters.iter().map(|l| cur[l.slot()]).sum();
            let total = values[j - 1].checked_add(loops).ok_or(Error::Overflow(j))?;
            values.push(total);
            if j == n {
                break;
            }
            let mut next = vec![0u64; k * m];
            for (i, &v) in ball.order.iter().enumerate() {
                if ball.dist[v] > r {
                    continue;
                }
                for &l in &letters {
                    let c = cur[i * m + l.slot()];
                    if c == 0 {
                        continue;
                    }
                    for &l2 in &letters {
                        if l2.is_inverse_of(l) {
                            continue;
                        }
                        let Some(u) = self.peek(v, l2) else { continue };
                        let Some(&iu) = pos.get(&u) else { continue };
                        if ball.dist[u] + j + 1 > n {
                            continue;
                        }
                        let slot = &mut next[iu * m + l2.slot()];
                        *slot = slot.checked_add(c).ok_or(Error::Overflow(j))?;
                    }
                }
            }
            cur = next;
        }
        GrowthTable::new(values)
    }

    /// Rows of the coset sandwich
    /// `Σ γ_{G/H}(i)·Γ_H(n−i) ≤ Γ_G(n) ≤ Σ γ_{G/H}(i)·Γ_H(n+i)` for levels `0..=n`.
    pub fn sandwich_rows_eq5(&mut self, n: usize) -> Result<Vec<SandwichRow>> {
        let co = self.cogrowth(n)?;
        let sub = self.subgroup_growth(2 * n)?;
        let full = free_group_growth(self.alphabet, n);
        let gamma = co.increments();
        (0..=n)
            .map(|k| {
                let mut lower = 0u64;
                let mut upper = 0u64;
                for (i, &g) in gamma.iter().enumerate().take(k + 1) {
                    lower = g
                        .checked_mul(sub.at(k - i))
                        .and_then(|x| x.checked_add(lower))
                        .ok_or(Error::Overflow(k))?;
                    upper = g
                        .checked_mul(sub.at(k + i))
                        .and_then(|x| x.checked_add(upper))
                        .ok_or(Error::Overflow(k))?;
                }
                Ok(SandwichRow {
                    n: k,
                    lower,
                    total: full.at(k),
                    upper,
                })
            })
            .collect()
    }

    pub fn sandwich_check_eq5(&mut self, n: usize) -> Result<bool> {
        Ok(self.sandwich_rows_eq5(n)?.iter().all(SandwichRow::holds))
    }

    /// `Γ(n1+n2) ≤ Γ(n1−1) + γ(n1)·Γ(n2)`, valid for normal subgroups.
    pub fn normality_check_eq6(&mut self, n1: usize, n2: usize) -> Result<bool> {
        if n1 == 0 {
            return Err(Error::InvalidArgument("n1 must be at least 1".into()));
        }
        let t = self.cogrowth(n1 + n2)?;
        let rhs = t
            .increment(n1)
            .checked_mul(t.at(n2))
            .and_then(|x| x.checked_add(t.at(n1 - 1)))
            .ok_or(Error::Overflow(n1 + n2))?;
        Ok(t.at(n1 + n2) <= rhs)
    }

    /// Free basis from the chords of the ShortLex spanning tree, one
    /// generator `rep(v)·x·rep(u)⁻¹` per non-tree edge `v → u` labelled `x` with both
    /// ends within `depth` of the root.
    pub fn nielsen_schreier_basis(&mut self, depth: usize) -> Result<Vec<Word>> {
        let materialize = matches!(self.backend, Backend::Quotient { .. });
        let ball = self.bfs(depth, materialize)?;
        let reps = ball.representatives();
        let mut basis = Vec::new();
        for &v in &ball.order {
            for l in self.alphabet.generators() {
                let Some(u) = self.peek(v, l) else { continue };
                if ball.dist_of(u).is_none() || ball.is_tree_edge(v, l, u) {
                    continue;
                }
                let rv = reps[v].as_ref().expect("ball vertex");
                let ru = reps[u].as_ref().expect("ball vertex");
                basis.push(rv.mul(&Word::letter(l)).mul(&ru.inverse()));
            }
        }
        Ok(basis)
    }

    /// Checks `Γ_{G/wHw⁻¹}(k) ≤ Γ_{G/H}(k + 2l(w))` for `k ≤ n`.
    pub fn conjugate_cogrowth_shift(&mut self, w: &Word, n: usize) -> Result<bool> {
        let Backend::Folded { generators } = &self.backend else {
            return Err(Error::NotFolded);
        };
        let conj: Vec<Word> = generators.iter().map(|g| w.mul(g).mul(&w.inverse())).collect();
        let mut other = fold(&conj, self.alphabet);
        other.set_max_vertices(self.max_vertices);
        let shifted = other.cogrowth(n)?;
        let base = self.cogrowth(n + 2 * w.len())?;
        Ok((0..=n).all(|k| shifted.at(k) <= base.at(k + 2 * w.len())))
    }
}

#[cfg(test)]
mod tests {
    use super::super::{from_permutations, z_shift, z_squared, PermutationRep};
    use super::*;
    use crate::words::words_up_to;

    fn alph() -> Alphabet {
        Alphabet::default()
    }

    fn w(s: &str) -> Word {
        Word::parse(s, alph(), false).unwrap()
    }

    fn both_swap() -> CosetGraph {
        from_permutations(&PermutationRep::parse("(1 2)\n(1 2)\n").unwrap()).unwrap()
    }

    /// Counts cosets by brute force: words of length `≤ n` grouped by the
    /// coset key, each counted at the length of its shortest member.
    fn brute_cogrowth(key: impl Fn(&Word) -> Vec<i64>, n: usize) -> Vec<u64> {
        let mut seen = std::collections::HashSet::new();
        let mut counts = vec![0u64; n + 1];
        for x in words_up_to(alph(), n) {
            if seen.insert(key(&x)) {
                counts[x.len()] += 1;
            }
        }
        let mut acc = 0;
        counts
            .iter()
            .map(|c| {
                acc += c;
                acc
            })
            .collect()
    }

    fn exponent_sum(x: &Word, gen: i8) -> i64 {
        x.letters()
            .iter()
            .map(|l| match l.0 {
                g if g == gen => 1,
                g if g == -gen => -1,
                _ => 0,
            })
            .sum()
    }

    #[test]
    fn cyclic_subgroup_cogrowth_is_three_to_the_n() {
        let mut g = fold(&[w("a")], alph());
        let t = g.cogrowth(6).unwrap();
        assert_eq!(t.values(), &[1, 3, 9, 27, 81, 243, 729]);
        // Cosets Ha^i·x: words are in the same coset iff they agree after
        // stripping leading a-powers.
        let brute = brute_cogrowth(
            |x| {
                let skip = x.letters().iter().take_while(|l| l.0.abs() == 1).count();
                x.letters()[skip..].iter().map(|l| l.0 as i64).collect()
            },
            5,
        );
        assert_eq!(&t.values()[..6], &brute[..]);
        let tr = g.minimal_transversal(3).unwrap();
        assert!(tr.is_prefix_closed());
        assert!(tr.words[1..].iter().all(|x| x.first().unwrap().0.abs() == 2));
    }

    #[test]
    fn both_swap_cogrowth_is_two() {
        let mut g = both_swap();
        assert_eq!(g.cogrowth(5).unwrap().values(), &[1, 2, 2, 2, 2, 2]);
        let tr = g.minimal_transversal(4).unwrap();
        assert_eq!(tr.words, vec![Word::identity(), w("a")]);
        let brute = brute_cogrowth(|x| vec![(x.len() % 2) as i64], 5);
        assert_eq!(brute, vec![1, 2, 2, 2, 2, 2]);
    }

    #[test]
    fn normal_closure_of_a_has_linear_cogrowth() {
        let mut g = z_shift();
        let t = g.cogrowth(8).unwrap();
        assert_eq!(t.values(), &(0..=8).map(|n| 2 * n + 1).collect::<Vec<u64>>()[..]);
        let brute = brute_cogrowth(|x| vec![exponent_sum(x, 2)], 5);
        assert_eq!(&t.values()[..6], &brute[..]);
        let tr = g.minimal_transversal(3).unwrap();
        assert_eq!(
            tr.words.iter().map(ToString::to_string).collect::<Vec<_>>(),
            vec!["1", "b", "B", "bb", "BB", "bbb", "BBB"]
        );
    }

    #[test]
    fn commutator_quotient_is_the_plane() {
        let mut g = z_squared();
        let t = g.cogrowth(4).unwrap();
        let brute = brute_cogrowth(|x| vec![exponent_sum(x, 1), exponent_sum(x, 2)], 4);
        assert_eq!(t.values(), &brute[..]);
        assert_eq!(t.at(2), 13);
    }

    #[test]
    fn subgroup_growth_matches_brute_force() {
        let fixtures: Vec<CosetGraph> = vec![
            fold(&[w("a")], alph()),
            fold(&[], alph()),
            both_swap(),
            z_shift(),
            fold(&[w("aa"), w("bab")], alph()),
            fold(&[w("abAB")], alph()),
        ];
        for mut g in fixtures {
            let dp = g.subgroup_growth(6).unwrap();
            let mut counts = vec![0u64; 7];
            for x in words_up_to(alph(), 6) {
                if g.contains(&x).unwrap() {
                    counts[x.len()] += 1;
                }
            }
            let brute = GrowthTable::from_increments(&counts).unwrap();
            assert_eq!(dp, brute, "{g:?}");
        }
    }

    #[test]
    fn subgroup_growth_examples() {
        let mut g = fold(&[w("a")], alph());
        let t = g.subgroup_growth(5).unwrap();
        assert_eq!(t.values(), &[1, 3, 5, 7, 9, 11]);
        let mut triv = CosetGraph::trivial(alph());
        assert_eq!(triv.subgroup_growth(4).unwrap().values(), &[1, 1, 1, 1, 1]);
    }

    #[test]
    fn coset_sandwich_holds() {
        let mut g = fold(&[w("a")], alph());
        assert!(g.sandwich_check_eq5(6).unwrap());
        let mut s = both_swap();
        assert!(s.sandwich_check_eq5(8).unwrap());
        let mut triv = CosetGraph::trivial(alph());
        for row in triv.sandwich_rows_eq5(5).unwrap() {
            assert_eq!(row.lower, row.total);
            assert_eq!(row.upper, row.total);
        }
    }

    #[test]
    fn normal_restriction_examples() {
        assert!(both_swap().normality_check_eq6(1, 1).unwrap());
        assert!(z_shift().normality_check_eq6(2, 2).unwrap());
        let mut whole = fold(&[w("a"), w("b")], alph());
        assert!(whole.normality_check_eq6(3, 2).unwrap());
        assert!(whole.normality_check_eq6(0, 2).is_err());
    }

    #[test]
    fn schreier_basis_sizes() {
        let mut s = both_swap();
        let basis = s.nielsen_schreier_basis(4).unwrap();
        assert_eq!(basis, vec![w("bA"), w("aa"), w("ab")]);
        let mut refolded = fold(&basis, alph());
        assert_eq!(refolded.cogrowth(6).unwrap(), s.cogrowth(6).unwrap());

        let mut c = fold(&[w("a")], alph());
        assert_eq!(c.nielsen_schreier_basis(3).unwrap(), vec![w("a")]);

        let mut t = from_permutations(&PermutationRep::parse("(1 2 3)\nid\n").unwrap()).unwrap();
        let basis = t.nielsen_schreier_basis(3).unwrap();
        assert_eq!(basis.len(), 4);
        let mut g = fold(&basis, alph());
        for x in &basis {
            assert!(t.contains(x).unwrap());
        }
        assert_eq!(g.cogrowth(6).unwrap(), t.cogrowth(6).unwrap());
    }

    #[test]
    fn conjugation_shifts_cogrowth() {
        let mut g = fold(&[w("a")], alph());
        assert!(g.conjugate_cogrowth_shift(&w("b"), 5).unwrap());
        assert!(g.conjugate_cogrowth_shift(&Word::identity(), 5).unwrap());
        let mut k = fold(&[w("aa"), w("ab"), w("bA")], alph());
        assert!(k.conjugate_cogrowth_shift(&w("ab"), 5).unwrap());
        let x = w("ab");
        let conj: Vec<Word> = [w("aa"), w("ab"), w("bA")].iter().map(|h| x.mul(h).mul(&x.inverse())).collect();
        assert_eq!(fold(&conj, alph()).cogrowth(5).unwrap(), k.cogrowth(5).unwrap());
        assert_eq!(both_swap().conjugate_cogrowth_shift(&w("a"), 3), Err(Error::NotFolded));
    }

    #[test]
    fn nested_transversals() {
        let mut big = fold(&[w("a")], alph());
        let mut small = fold(&[w("aa")], alph());
        let t1 = big.minimal_transversal(5).unwrap();
        let t2 = small.minimal_transversal(5).unwrap();
        let set: std::collections::HashSet<_> = t2.words.iter().collect();
        assert!(t1.words.iter().all(|x| set.contains(x)));
    }

    #[test]
    fn free_group_growth_matches_enumeration() {
        let t = free_group_growth(alph(), 4);
        assert_eq!(t.values(), &[1, 5, 17, 53, 161]);
        assert_eq!(words_up_to(alph(), 4).len() as u64, t.at(4));
        let r3 = Alphabet::new(3).unwrap();
        assert_eq!(free_group_growth(r3, 3).at(3), words_up_to(r3, 3).len() as u64);
    }
}
