//! Intersections of subgroups through products of coset graphs.

use std::collections::HashMap;

use serde::Serialize;

use crate::coset::{free_group_growth, Backend, CosetGraph, Vertex, ROOT};
use crate::error::{Error, Result};
use crate::words::Word;

/// The `(root, root)` component of a product of two coset graphs, with the
/// pair of component vertices behind each product vertex.
#[derive(Debug, Clone)]
pub struct ProductGraph {
    pub graph: CosetGraph,
    pub pairs: Vec<(Vertex, Vertex)>,
}

/// Product of `g1` and `g2`. Two folded graphs give the exact pullback of
/// their cores (completed lazily, like any folded graph); otherwise the
/// product is materialized out to BFS radius `depth`.
pub fn product(g1: &mut CosetGraph, g2: &mut CosetGraph, depth: usize) -> Result<ProductGraph> {
    if g1.alphabet() != g2.alphabet() {
        return Err(Error::RankMismatch);
    }
    let alphabet = g1.alphabet();
    let exact = g1.is_folded() && g2.is_folded();
    let mut pairs = vec![(ROOT, ROOT)];
    let mut index = HashMap::from([((ROOT, ROOT), ROOT)]);
    let mut dist = vec![0usize];
    let mut edges = Vec::new();
    let mut head = 0;
    while head < pairs.len() {
        let p = head;
        head += 1;
        if !exact && dist[p] >= depth {
            continue;
        }
        let (v1, v2) = pairs[p];
        for l in alphabet.letters() {
            let (t1, t2) = if exact {
                (g1.peek(v1, l), g2.peek(v2, l))
            } else {
                (g1.step(v1, l)?, g2.step(v2, l)?)
            };
            let (Some(u1), Some(u2)) = (t1, t2) else { continue };
            let q = match index.get(&(u1, u2)) {
                Some(&q) => q,
                None => {
                    let q = pairs.len();
                    if q >= g1.max_vertices {
                        return Err(Error::BudgetExceeded(g1.max_vertices));
                    }
                    pairs.push((u1, u2));
                    index.insert((u1, u2), q);
                    dist.push(dist[p] + 1);
                    q
                }
            };
            edges.push((p, l, q));
        }
    }

    let backend = if exact {
        Backend::Folded { generators: Vec::new() }
    } else {
        Backend::Product { horizon: depth }
    };
    let mut graph = CosetGraph::with_vertices(alphabet, pairs.len(), backend);
    graph.max_vertices = g1.max_vertices;
    for (p, l, q) in edges {
        if graph.peek(p, l).is_none() {
            graph.set_edge(p, l, q);
        }
    }
    if exact {
        let basis = graph.nielsen_schreier_basis(pairs.len())?;
        graph.backend = Backend::Folded { generators: basis };
    }
    Ok(ProductGraph { graph, pairs })
}

/// Coset graph of `H₁ ∩ H₂`.
pub fn intersect(g1: &mut CosetGraph, g2: &mut CosetGraph, depth: usize) -> Result<CosetGraph> {
    Ok(product(g1, g2, depth)?.graph)
}

/// Side-by-side cogrowth values at one level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Prop11Row {
    pub n: usize,
    pub first: u64,
    pub second: u64,
    pub intersection: u64,
    pub product: u64,
    pub max: u64,
}

impl Prop11Row {
    pub fn holds(&self) -> bool {
        self.max <= self.intersection && self.intersection <= self.product
    }
}

/// Cogrowth of `H₁`, `H₂` and `H₁ ∩ H₂` for levels `0..=n`.
pub fn prop11_rows(g1: &mut CosetGraph, g2: &mut CosetGraph, n: usize) -> Result<Vec<Prop11Row>> {
    let t1 = g1.cogrowth(n)?;
    let t2 = g2.cogrowth(n)?;
    let mut inter = intersect(g1, g2, n)?;
    let t = inter.cogrowth(n)?;
    (0..=n)
        .map(|k| {
            Ok(Prop11Row {
                n: k,
                first: t1.at(k),
                second: t2.at(k),
                intersection: t.at(k),
                product: t1.at(k).checked_mul(t2.at(k)).ok_or(Error::Overflow(k))?,
                max: t1.at(k).max(t2.at(k)),
            })
        })
        .collect()
}

/// `max(Γ₁, Γ₂) ≤ Γ_∩ ≤ Γ₁·Γ₂` at every level up to `n`.
pub fn prop11_check(g1: &mut CosetGraph, g2: &mut CosetGraph, n: usize) -> Result<bool> {
    Ok(prop11_rows(g1, g2, n)?.iter().all(Prop11Row::holds))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Nontriviality {
    /// `Γ₁(level)·Γ₂(level) < Γ_G(level)`, so the intersection is nontrivial;
    /// `witness` is the ShortLex-least shortest element found in it.
    Witnessed { level: usize, witness: Option<Word> },
    Inconclusive,
}

/// Looks for a level where `Γ₁(n)·Γ₂(n) < Γ_G(n)`.
pub fn sufficient_nontrivial(g1: &mut CosetGraph, g2: &mut CosetGraph, n: usize) -> Result<Nontriviality> {
    let t1 = g1.cogrowth(n)?;
    let t2 = g2.cogrowth(n)?;
    let full = free_group_growth(g1.alphabet(), n);
    let level = (0..=n).find(|&k| t1.at(k).saturating_mul(t2.at(k)) < full.at(k));
    let Some(level) = level else {
        return Ok(Nontriviality::Inconclusive);
    };
    let witness = shortest_loop(g1, g2, n)?;
    Ok(Nontriviality::Witnessed { level, witness })
}

/// ShortLex-least among the shortest nontrivial root loops of the product
/// whose vertices lie within distance `radius`, checked against both inputs.
pub fn shortest_loop(g1: &mut CosetGraph, g2: &mut CosetGraph, radius: usize) -> Result<Option<Word>> {
    let mut prod = product(g1, g2, radius + 1)?;
    let basis = prod.graph.nielsen_schreier_basis(radius)?;
    let Some(best) = basis.into_iter().min() else {
        return Ok(None);
    };
    if !g1.contains(&best)? || !g2.contains(&best)? {
        return Err(Error::Invariant(format!("product loop {best} is not in both subgroups")));
    }
    Ok(Some(best))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coset::{fold, from_permutations, z_shift, PermutationRep};
    use crate::words::{words_up_to, Alphabet};

    fn w(s: &str) -> Word {
        Word::parse(s, Alphabet::default(), false).unwrap()
    }

    fn both_swap() -> CosetGraph {
        from_permutations(&PermutationRep::parse("(1 2)\n(1 2)\n").unwrap()).unwrap()
    }

    fn fixtures() -> Vec<CosetGraph> {
        vec![
            fold(&[w("a")], Alphabet::default()),
            fold(&[w("b")], Alphabet::default()),
            fold(&[w("aa"), w("ab")], Alphabet::default()),
            fold(&[w("abAB")], Alphabet::default()),
            both_swap(),
            z_shift(),
        ]
    }

    #[test]
    fn product_membership_is_conjunction() {
        let words = words_up_to(Alphabet::default(), 6);
        let fx = fixtures();
        for i in 0..fx.len() {
            for j in 0..fx.len() {
                let (mut a, mut b) = (fx[i].clone(), fx[j].clone());
                let mut p = product(&mut a, &mut b, 7).unwrap();
                assert!(p.graph.involution_violations().is_empty());
                let distinct: std::collections::HashSet<_> = p.pairs.iter().collect();
                assert_eq!(distinct.len(), p.pairs.len());
                for x in &words {
                    let both = a.contains(x).unwrap() && b.contains(x).unwrap();
                    assert_eq!(p.graph.contains(x).unwrap(), both, "{i} {j} {x}");
                }
            }
        }
    }

    #[test]
    fn cyclic_subgroups_meet_trivially() {
        let mut a = fold(&[w("a")], Alphabet::default());
        let mut b = fold(&[w("b")], Alphabet::default());
        let mut i = intersect(&mut a, &mut b, 6).unwrap();
        assert_eq!(i.num_vertices(), 1);
        for x in words_up_to(Alphabet::default(), 6).iter().skip(1) {
            assert!(!i.contains(x).unwrap());
        }
        let rows = prop11_rows(&mut a, &mut b, 4).unwrap();
        let inter: Vec<u64> = rows.iter().map(|r| r.intersection).collect();
        assert_eq!(inter, vec![1, 5, 17, 53, 161]);
        assert!(rows.iter().all(Prop11Row::holds));
        assert_eq!(sufficient_nontrivial(&mut a, &mut b, 6).unwrap(), Nontriviality::Inconclusive);
    }

    #[test]
    fn self_intersection_is_diagonal() {
        let mut h = fold(&[w("aab"), w("bAb")], Alphabet::default());
        let mut h2 = h.clone();
        let p = product(&mut h, &mut h2, 5).unwrap();
        assert_eq!(p.graph.num_vertices(), h.num_vertices());
        assert!(p.pairs.iter().all(|&(x, y)| x == y));
        assert!(prop11_check(&mut h, &mut h2, 5).unwrap());
    }

    #[test]
    fn kernel_meets_cyclic_subgroup() {
        let mut k = both_swap();
        let mut a = fold(&[w("a")], Alphabet::default());
        let mut i = intersect(&mut k, &mut a, 4).unwrap();
        assert!(i.contains(&w("aa")).unwrap());
        assert!(!i.contains(&w("a")).unwrap());
        // 2·3ⁿ never drops below 2·3ⁿ − 1, so only the loop search sees it.
        assert_eq!(sufficient_nontrivial(&mut k, &mut a, 4).unwrap(), Nontriviality::Inconclusive);
        assert_eq!(shortest_loop(&mut k, &mut a, 4).unwrap(), Some(w("aa")));
    }

    #[test]
    fn sufficient_condition_examples() {
        let mut k1 = both_swap();
        let mut k2 = both_swap();
        let verdict = sufficient_nontrivial(&mut k1, &mut k2, 2).unwrap();
        let Nontriviality::Witnessed { level, witness } = verdict else {
            panic!("expected a witness");
        };
        assert!(level <= 2);
        assert_eq!(witness, Some(w("aa")));
        let mut g1 = fold(&[w("a"), w("b")], Alphabet::default());
        let mut g2 = g1.clone();
        assert!(matches!(
            sufficient_nontrivial(&mut g1, &mut g2, 1).unwrap(),
            Nontriviality::Witnessed { level: 1, witness: Some(_) }
        ));
    }

    #[test]
    fn rank_mismatch_is_rejected() {
        let mut a = fold(&[w("a")], Alphabet::default());
        let mut b = CosetGraph::trivial(Alphabet::new(3).unwrap());
        assert_eq!(product(&mut a, &mut b, 2).unwrap_err(), Error::RankMismatch);
    }
}
