//! The acceptance suite over a fixtures directory.

use std::collections::BTreeSet;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::coset::{fold, CosetGraph, TraceOutcome};
use crate::error::{Error, Result};
use crate::essential::ConstructionState;
use crate::growth::{CgFunction, Family};
use crate::ideal::{
    augmentation_ideal, correspondence, quotient_search, Algebra, ColonSearch, EchelonBasis, Polynomial,
    DEFAULT_MAX_ROWS,
};
use crate::intersection::{prop11_check, prop11_rows};
use crate::source::{load_subgroup, Subgroup};
use crate::words::{words_up_to, Alphabet, Letter, Word};

/// Files `verify-all` expects in the fixtures directory.
pub const FIXTURE_FILES: [&str; 10] = [
    "a.sub",
    "b.sub",
    "aa.sub",
    "aa_ab.sub",
    "commutator.sub",
    "kernel.sub",
    "mod3.sub",
    "swap.perm",
    "cycle3.perm",
    "s3.perm",
];

pub const RANDOM_SEED: u64 = 0x5eed_0011;
pub const RANDOM_PAIRS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

pub struct Suite {
    fixtures: Vec<Subgroup>,
    constructions: Option<Vec<(String, ConstructionState)>>,
}

fn f2() -> Alphabet {
    Alphabet::default()
}

fn words(list: &[&str]) -> Vec<Word> {
    list.iter().map(|s| Word::parse(s, f2(), false).expect("literal word")).collect()
}

/// Targets for the construction criteria, with their minimum depths.
pub fn construction_targets() -> Vec<(Family, usize)> {
    vec![
        (Family::Polynomial(1), 24),
        (Family::Polynomial(2), 24),
        (Family::Exponential(2), 14),
        (Family::Intermediate(0.5), 24),
    ]
}

impl Suite {
    /// Loads every fixture file plus the built-in quotients.
    pub fn load(dir: &Path) -> Result<Suite> {
        if !dir.is_dir() {
            return Err(Error::Io {
                path: dir.display().to_string(),
                message: "not a directory".into(),
            });
        }
        let mut fixtures = Vec::new();
        for file in FIXTURE_FILES {
            let path = dir.join(file);
            if !path.exists() {
                return Err(Error::Io {
                    path: path.display().to_string(),
                    message: "missing fixture".into(),
                });
            }
            let mut s = load_subgroup(&path.display().to_string(), false)?;
            s.name = file.to_string();
            fixtures.push(s);
        }
        for q in ["quotient:z-shift", "quotient:z2"] {
            fixtures.push(load_subgroup(q, false)?);
        }
        Ok(Suite {
            fixtures,
            constructions: None,
        })
    }

    fn get(&self, name: &str) -> Subgroup {
        self.fixtures
            .iter()
            .find(|s| s.name == name)
            .cloned()
            .expect("fixture loaded")
    }

    fn constructions(&mut self) -> Result<&mut Vec<(String, ConstructionState)>> {
        if self.constructions.is_none() {
            let mut out = Vec::new();
            for (kind, depth) in construction_targets() {
                let mut st = ConstructionState::new(CgFunction::family(kind)?)?;
                let report = st.run_until(5, depth)?;
                if !report.complete {
                    return Err(Error::Invariant(format!("construction for {kind} stopped early")));
                }
                out.push((kind.to_string(), st));
            }
            self.constructions = Some(out);
        }
        Ok(self.constructions.as_mut().expect("just built"))
    }

    pub fn run(&mut self, id: u8) -> Outcome {
        let (name, result) = match id {
            1 => ("schreier identity", self.schreier_identity()),
            2 => ("cogrowth oracles", self.cogrowth_oracles()),
            3 => ("intersection bounds", self.intersection_bounds()),
            4 => ("coset sandwich and normal restriction", self.sandwich_and_normal()),
            5 => ("constructor sandwich", self.constructor_sandwich()),
            6 => ("essentiality certificates", self.certificates()),
            7 => ("nielsen-schreier bases", self.nielsen_schreier()),
            8 => ("nested transversals", self.nested_transversals()),
            9 => ("algebra correspondence", self.algebra_correspondence()),
            10 => ("colon search", self.colon_search()),
            11 => ("determinism", self.determinism()),
            _ => ("unknown", Err(Error::InvalidArgument(format!("no criterion {id}")))),
        };
        let (passed, detail) = match result {
            Ok((passed, detail)) => (passed, detail),
            Err(e) => (false, format!("error: {e}")),
        };
        Outcome { id, name, passed, detail }
    }

    pub fn run_all(&mut self) -> Vec<Outcome> {
        (1..=11).map(|id| self.run(id)).collect()
    }

    fn schreier_identity(&mut self) -> Result<(bool, String)> {
        let mut graphs: Vec<(String, CosetGraph)> = Vec::new();
        for s in &self.fixtures {
            let mut g = s.graph.clone();
            g.cogrowth(6)?;
            graphs.push((s.name.clone(), g));
        }
        for (name, st) in self.constructions()?.iter() {
            graphs.push((format!("construct {name}"), st.export()));
        }
        let mut pairs = 0;
        let mut bad = Vec::new();
        for (name, g) in &graphs {
            pairs += g.defined_pairs().count();
            if !g.involution_violations().is_empty() {
                bad.push(name.clone());
            }
        }
        Ok((
            bad.is_empty(),
            format!("{} graphs, {pairs} defined pairs, violations in {bad:?}", graphs.len()),
        ))
    }

    fn cogrowth_oracles(&mut self) -> Result<(bool, String)> {
        let cases: [(&str, fn(usize) -> u64, fn(&Word) -> bool); 3] = [
            ("a.sub", |n| 3u64.pow(n as u32), |w| w.letters().iter().all(|l| l.0.abs() == 1)),
            ("swap.perm", |n| if n == 0 { 1 } else { 2 }, |w| w.len() % 2 == 0),
            ("quotient:z-shift", |n| 2 * n as u64 + 1, |w| exponent_sum(w, 2) == 0),
        ];
        let mut failures = Vec::new();
        for (name, closed, member) in cases {
            let mut g = self.get(name).graph;
            let t = g.cogrowth(8)?;
            if (0..=8).any(|n| t.at(n) != closed(n)) {
                failures.push(format!("{name} bfs"));
            }
            let brute = brute_force_cogrowth(member, 5);
            if (0..=5).any(|n| brute[n] != closed(n)) {
                failures.push(format!("{name} brute force"));
            }
        }
        Ok((failures.is_empty(), format!("3 closed forms to n=8, brute force to n=5; failures {failures:?}")))
    }

    fn intersection_bounds(&mut self) -> Result<(bool, String)> {
        let mut rng = ChaCha8Rng::seed_from_u64(RANDOM_SEED);
        let mut pairs: Vec<(String, CosetGraph, CosetGraph)> = Vec::new();
        for i in 0..RANDOM_PAIRS {
            let g1 = random_subgroup(&mut rng);
            let g2 = random_subgroup(&mut rng);
            pairs.push((format!("random {i}"), fold(&g1, f2()), fold(&g2, f2())));
        }
        let named: Vec<&Subgroup> = self.fixtures.iter().filter(|s| s.graph.alphabet() == f2()).collect();
        for (i, a) in named.iter().enumerate() {
            for b in &named[i..] {
                pairs.push((format!("{} x {}", a.name, b.name), a.graph.clone(), b.graph.clone()));
            }
        }
        let mut bad = Vec::new();
        for (name, mut a, mut b) in pairs.clone() {
            if !prop11_check(&mut a, &mut b, 5)? {
                bad.push(name);
            }
        }
        Ok((bad.is_empty(), format!("{} pairs to n=5, violations {bad:?}", pairs.len())))
    }

    fn sandwich_and_normal(&mut self) -> Result<(bool, String)> {
        let mut bad = Vec::new();
        let mut normal = Vec::new();
        for s in &self.fixtures {
            let mut g = s.graph.clone();
            if !g.sandwich_check_eq5(6)? {
                bad.push(format!("{} sandwich", s.name));
            }
            if s.is_quotient() && is_normal(s)? {
                normal.push(s.name.clone());
                for n1 in 1..=6 {
                    for n2 in 0..=6 - n1 {
                        if !g.normality_check_eq6(n1, n2)? {
                            bad.push(format!("{} normal ({n1},{n2})", s.name));
                        }
                    }
                }
            }
        }
        Ok((
            bad.is_empty(),
            format!(
                "sandwich on {} fixtures, normal restriction on {normal:?}; violations {bad:?}",
                self.fixtures.len()
            ),
        ))
    }

    fn constructor_sandwich(&mut self) -> Result<(bool, String)> {
        let mut bad = Vec::new();
        let mut seen = Vec::new();
        for (name, st) in self.constructions()?.iter_mut() {
            let n = st.interior_depth() / 2;
            let r = st.sandwich_report(n, None)?;
            seen.push(format!("{name}: n<={n} C={}", r.constant));
            if !r.all_pass() {
                bad.push(format!(
                    "{name} (tree<=alpha {}, alpha<=tree {}, tree<=cosets {}, cosets<=tree2 {}, doubling {})",
                    r.tree_below_alpha,
                    r.alpha_below_tree,
                    r.tree_below_cosets,
                    r.cosets_below_tree,
                    r.doubling_violations
                ));
            }
        }
        Ok((bad.is_empty(), format!("{seen:?}; failures {bad:?}")))
    }

    fn certificates(&mut self) -> Result<(bool, String)> {
        let expected: Vec<Word> = crate::words::enumerate(f2(), 6).into_iter().skip(1).collect();
        let mut bad = Vec::new();
        let mut total = 0;
        for (name, st) in self.constructions()?.iter() {
            let mut g = st.export();
            for (c, want) in st.certificates().iter().zip(&expected) {
                total += 1;
                let shape = c.status == crate::essential::CertificateStatus::Travel || c.k == c.r + c.s + 1;
                if &c.g != want || !shape || !g.contains(&c.g.pow(c.k as i64))? {
                    bad.push(format!("{name} {}", c.g));
                }
            }
            if st.certificates().len() < 5 {
                bad.push(format!("{name} has {} certificates", st.certificates().len()));
            }
        }
        Ok((bad.is_empty(), format!("{total} certificates replayed; failures {bad:?}")))
    }

    fn nielsen_schreier(&mut self) -> Result<(bool, String)> {
        let mut bad = Vec::new();
        let mut checked = Vec::new();
        for s in &self.fixtures {
            let mut g = s.graph.clone();
            if !g.is_complete() {
                continue;
            }
            let index = g.num_vertices();
            let rank = g.alphabet().rank() as usize;
            let basis = g.nielsen_schreier_basis(index)?;
            let expected = index * (rank - 1) + 1;
            let same = fold(&basis, g.alphabet()).cogrowth(6)? == g.cogrowth(6)?;
            checked.push(format!("{} [{index}]", s.name));
            if basis.len() != expected || !same {
                bad.push(format!("{} (basis {} vs {expected})", s.name, basis.len()));
            }
        }
        Ok((bad.is_empty() && !checked.is_empty(), format!("{checked:?}; failures {bad:?}")))
    }

    fn nested_transversals(&mut self) -> Result<(bool, String)> {
        let pairs: Vec<(Subgroup, Subgroup)> = vec![
            (self.get("aa.sub"), self.get("a.sub")),
            (Subgroup::from_words("aaa", &words(&["aaa"]), f2()), self.get("a.sub")),
            (Subgroup::from_words("aaa", &words(&["aaa"]), f2()), self.get("mod3.sub")),
            (self.get("aa.sub"), self.get("kernel.sub")),
            (self.get("aa_ab.sub"), self.get("kernel.sub")),
            (self.get("commutator.sub"), self.get("kernel.sub")),
            (self.get("commutator.sub"), self.get("quotient:z2")),
            (self.get("a.sub"), self.get("quotient:z-shift")),
            (self.get("b.sub"), self.get("mod3.sub")),
            (Subgroup::from_words("aaa,b", &words(&["aaa", "b"]), f2()), self.get("cycle3.perm")),
        ];
        let mut bad = Vec::new();
        for (mut small, mut big) in pairs.clone() {
            let label = format!("{} <= {}", small.name, big.name);
            for h in small.generating_set()? {
                if !big.graph.contains(&h)? {
                    bad.push(format!("{label}: not a subgroup"));
                }
            }
            let outer: BTreeSet<Word> = big.graph.minimal_transversal(5)?.words.into_iter().collect();
            let inner: BTreeSet<Word> = small.graph.minimal_transversal(5)?.words.into_iter().collect();
            if !outer.is_subset(&inner) {
                bad.push(label);
            }
        }
        Ok((bad.is_empty(), format!("{} pairs to depth 5; violations {bad:?}", pairs.len())))
    }

    fn algebra_correspondence(&mut self) -> Result<(bool, String)> {
        let mut bad = Vec::new();
        let mut seen = Vec::new();
        for name in ["a.sub", "swap.perm", "aa_ab.sub"] {
            let mut s = self.get(name);
            let gens = s.generating_set()?;
            let c = correspondence(&mut s.graph, &gens, 4, 12, DEFAULT_MAX_ROWS)?;
            seen.push(format!("{name} stable at {:?}", c.stable_at));
            if !c.matches || c.stable_at.is_none() {
                bad.push(format!("{name}: ideal {:?} vs subgroup {:?}", c.ideal, c.subgroup));
            }
        }
        Ok((bad.is_empty(), format!("{seen:?}; mismatches {bad:?}")))
    }

    fn colon_search(&mut self) -> Result<(bool, String)> {
        let algebra = Algebra::group_algebra(2)?;
        let gens = self.get("swap.perm").generating_set()?;
        let basis = EchelonBasis::new(algebra, augmentation_ideal(&gens), 4)?;
        let r = Polynomial::monomial(Word::letter(Letter(2)));
        let found = match quotient_search(&basis, &r, 3)? {
            ColonSearch::Found { s, .. } => basis.reduce(&r.mul(&s, &algebra)).is_zero().then_some(s),
            ColonSearch::NotFound { .. } => None,
        };
        let free = Algebra::free_assoc(2)?;
        let x = Polynomial::monomial(Word::letter(Letter(1)));
        let y = Polynomial::monomial(Word::letter(Letter(2)));
        let mut not_found = true;
        for m in 1..=8 {
            let b = EchelonBasis::new(free, vec![x.clone()], m)?;
            not_found &= matches!(quotient_search(&b, &y, m - 1)?, ColonSearch::NotFound { .. });
        }
        let detail = match &found {
            Some(s) => format!("b*({s}) reduces to 0; <a>, r=b not found at horizons 1..8: {not_found}"),
            None => format!("no certificate for b; <a>, r=b not found at horizons 1..8: {not_found}"),
        };
        Ok((found.is_some() && not_found, detail))
    }

    fn determinism(&mut self) -> Result<(bool, String)> {
        let first = self.fingerprint()?;
        let second = self.fingerprint()?;
        Ok((first == second, format!("{} bytes of output compared", first.len())))
    }

    /// Serialized outputs of a representative set of computations.
    fn fingerprint(&self) -> Result<String> {
        let mut out = String::new();
        for s in &self.fixtures {
            let mut g = s.graph.clone();
            out.push_str(&g.cogrowth(6)?.to_csv());
            out.push_str(&g.minimal_transversal(4)?.words.iter().map(Word::to_string).collect::<Vec<_>>().join(","));
        }
        let (mut a, mut b) = (self.get("a.sub").graph, self.get("aa_ab.sub").graph);
        out.push_str(&serde_json::to_string(&prop11_rows(&mut a, &mut b, 5)?).expect("rows serialize"));
        let mut st = ConstructionState::new(CgFunction::family(Family::Polynomial(1))?)?;
        st.run_until(3, 12)?;
        out.push_str(&serde_json::to_string(st.certificates()).expect("certificates serialize"));
        out.push_str(&st.export().dump());
        let algebra = Algebra::group_algebra(2)?;
        let basis = EchelonBasis::new(algebra, augmentation_ideal(&words(&["aa", "ab"])), 5)?;
        for row in basis.rows() {
            out.push_str(&row.to_string());
        }
        Ok(out)
    }
}

fn exponent_sum(w: &Word, generator: i8) -> i64 {
    w.letters()
        .iter()
        .filter(|l| l.0.abs() == generator)
        .map(|l| i64::from(l.0.signum()))
        .sum()
}

/// `Γ(0..=n)` by grouping reduced words into cosets with a membership
/// predicate: `u` and `v` share a coset when `u·v⁻¹` is a member.
pub fn brute_force_cogrowth(member: impl Fn(&Word) -> bool, n: usize) -> Vec<u64> {
    let mut reps: Vec<Word> = Vec::new();
    let mut counts = vec![0u64; n + 1];
    for w in words_up_to(f2(), n) {
        if !reps.iter().any(|r| member(&w.mul(&r.inverse()))) {
            counts[w.len()] += 1;
            reps.push(w);
        }
    }
    let mut total = 0;
    counts
        .iter()
        .map(|c| {
            total += c;
            total
        })
        .collect()
}

fn random_subgroup(rng: &mut ChaCha8Rng) -> Vec<Word> {
    let k = rng.gen_range(1..=3);
    let mut gens = Vec::with_capacity(k);
    while gens.len() < k {
        let len = rng.gen_range(1..=4);
        let letters: Vec<Letter> = (0..len)
            .map(|_| {
                let g = rng.gen_range(1..=2i8);
                if rng.gen_bool(0.5) {
                    Letter(g)
                } else {
                    Letter(-g)
                }
            })
            .collect();
        let w = Word::reduce(letters, f2()).expect("letters in range");
        if !w.is_empty() {
            gens.push(w);
        }
    }
    gens
}

/// A complete coset graph is normal when every generator of the subgroup
/// loops at every vertex. Oracle quotients are kernels by construction.
fn is_normal(s: &Subgroup) -> Result<bool> {
    let mut s = s.clone();
    if !s.graph.is_complete() {
        return Ok(matches!(s.graph.backend(), crate::coset::Backend::Quotient { .. }));
    }
    let gens = s.generating_set()?;
    Ok((0..s.graph.num_vertices())
        .all(|v| gens.iter().all(|h| s.graph.trace_defined(h, v) == TraceOutcome::Reached(v))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brute_force_oracle_small_cases() {
        assert_eq!(brute_force_cogrowth(|w| w.is_empty(), 2), vec![1, 5, 17]);
        assert_eq!(brute_force_cogrowth(|_| true, 3), vec![1, 1, 1, 1]);
        assert_eq!(brute_force_cogrowth(|w| w.len() % 2 == 0, 3), vec![1, 2, 2, 2]);
    }

    #[test]
    fn random_subgroups_are_seeded() {
        let mut r1 = ChaCha8Rng::seed_from_u64(RANDOM_SEED);
        let mut r2 = ChaCha8Rng::seed_from_u64(RANDOM_SEED);
        for _ in 0..5 {
            let g = random_subgroup(&mut r1);
            assert_eq!(g, random_subgroup(&mut r2));
            assert!((1..=3).contains(&g.len()));
        }
    }

    #[test]
    fn missing_directory_is_an_error() {
        assert!(Suite::load(Path::new("/nonexistent-fixtures")).is_err());
    }
}
