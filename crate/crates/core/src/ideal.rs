//! Right ideals in the free associative algebra and in the group algebra of
//! a free group, over the rationals.
//!
//! An ideal is seen through a horizon `m`: the span of all products `g·w`
//! of a generator with a monomial whose length is at most `m`. Row counts of
//! the echelon basis of that span are lower bounds for the ideal growth;
//! they become exact once the horizon stabilizes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::coset::{free_group_growth, CosetGraph};
use crate::error::{Error, Result};
use crate::growth::{strict_witness, GrowthTable};
use crate::words::{words_up_to, Alphabet, Word};

pub const DEFAULT_MAX_ROWS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgebraMode {
    /// Monomials are positive words, multiplied by concatenation.
    FreeAssoc,
    /// Monomials are reduced words, multiplied in the free group.
    GroupAlgebra,
}

impl std::str::FromStr for AlgebraMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "free-assoc" | "free" => Ok(AlgebraMode::FreeAssoc),
            "group-algebra" | "group" => Ok(AlgebraMode::GroupAlgebra),
            _ => Err(Error::InvalidArgument(format!("unknown algebra mode {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Algebra {
    pub mode: AlgebraMode,
    pub alphabet: Alphabet,
}

impl Algebra {
    pub fn new(mode: AlgebraMode, rank: u32) -> Result<Self> {
        Ok(Algebra {
            mode,
            alphabet: Alphabet::new(rank)?,
        })
    }

    pub fn free_assoc(rank: u32) -> Result<Self> {
        Self::new(AlgebraMode::FreeAssoc, rank)
    }

    pub fn group_algebra(rank: u32) -> Result<Self> {
        Self::new(AlgebraMode::GroupAlgebra, rank)
    }

    /// All monomials of length `≤ n` in ShortLex order.
    pub fn monomials_up_to(&self, n: usize) -> Vec<Word> {
        match self.mode {
            AlgebraMode::GroupAlgebra => words_up_to(self.alphabet, n),
            AlgebraMode::FreeAssoc => {
                let mut out = vec![Word::identity()];
                let mut level = vec![Word::identity()];
                for _ in 0..n {
                    level = level
                        .iter()
                        .flat_map(|w| {
                            self.alphabet.generators().map(move |l| {
                                let mut v = w.clone();
                                v.push(l);
                                v
                            })
                        })
                        .collect();
                    out.extend(level.iter().cloned());
                }
                out
            }
        }
    }

    /// `Γ_R(0..=n)`.
    pub fn growth(&self, n: usize) -> GrowthTable {
        match self.mode {
            AlgebraMode::GroupAlgebra => free_group_growth(self.alphabet, n),
            AlgebraMode::FreeAssoc => {
                let k = u64::from(self.alphabet.rank());
                let increments: Vec<u64> = (0..=n).map(|i| k.saturating_pow(i as u32)).collect();
                GrowthTable::from_increments(&increments).unwrap_or_else(|_| {
                    GrowthTable::new(vec![u64::MAX; n + 1]).expect("constant table")
                })
            }
        }
    }

    pub fn multiply(&self, u: &Word, v: &Word) -> Word {
        match self.mode {
            AlgebraMode::GroupAlgebra => u.mul(v),
            AlgebraMode::FreeAssoc => {
                let mut w = u.clone();
                for &l in v.letters() {
                    w.push(l);
                }
                w
            }
        }
    }

    fn check_monomial(&self, w: &Word) -> Result<()> {
        for &l in w.letters() {
            self.alphabet.check(l)?;
            if self.mode == AlgebraMode::FreeAssoc && !l.is_positive() {
                return Err(Error::InvalidArgument(format!(
                    "monomial {w} uses an inverse letter in the free associative algebra"
                )));
            }
        }
        Ok(())
    }
}

/// Finite linear combination of monomials with nonzero rational
/// coefficients.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Polynomial {
    terms: BTreeMap<Word, BigRational>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn monomial(w: Word) -> Self {
        Self::term(w, BigRational::one())
    }

    pub fn term(w: Word, c: BigRational) -> Self {
        let mut p = Polynomial::zero();
        p.add_term(w, c);
        p
    }

    pub fn constant(c: i64) -> Self {
        Self::term(Word::identity(), BigRational::from_integer(BigInt::from(c)))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Word, &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, w: &Word) -> Option<&BigRational> {
        self.terms.get(w)
    }

    /// ShortLex-greatest monomial with its coefficient.
    pub fn leading(&self) -> Option<(&Word, &BigRational)> {
        self.terms.last_key_value()
    }

    /// Length of the longest monomial; 0 for the zero polynomial.
    pub fn len(&self) -> usize {
        self.leading().map_or(0, |(w, _)| w.len())
    }

    pub fn add_term(&mut self, w: Word, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// `self += c·other`.
    pub fn add_scaled(&mut self, other: &Polynomial, c: &BigRational) {
        for (w, d) in &other.terms {
            self.add_term(w.clone(), d * c);
        }
    }

    pub fn scale(&mut self, c: &BigRational) {
        if c.is_zero() {
            self.terms.clear();
        } else {
            for d in self.terms.values_mut() {
                *d *= c;
            }
        }
    }

    /// Scales so the leading coefficient is 1.
    pub fn normalize(&mut self) {
        if let Some((_, c)) = self.leading() {
            let inv = c.recip();
            self.scale(&inv);
        }
    }

    /// `self · w`.
    pub fn mul_monomial(&self, w: &Word, algebra: &Algebra) -> Polynomial {
        let mut out = Polynomial::zero();
        for (u, c) in &self.terms {
            out.add_term(algebra.multiply(u, w), c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Polynomial, algebra: &Algebra) -> Polynomial {
        let mut out = Polynomial::zero();
        for (w, c) in &other.terms {
            out.add_scaled(&self.mul_monomial(w, algebra), c);
        }
        out
    }

    /// Parses terms `coefficient*word` joined by `+` and `-` (or `−`).
    /// Coefficients are integers or fractions `p/q` and default to 1; the
    /// word `1`, or a bare coefficient, is the unit.
    pub fn parse(text: &str, algebra: &Algebra) -> Result<Polynomial> {
        let text: String = text.replace('−', "-").chars().filter(|c| !c.is_whitespace()).collect();
        if text.is_empty() {
            return Err(Error::InvalidArgument("empty polynomial".into()));
        }
        let mut p = Polynomial::zero();
        let mut rest = text.as_str();
        while !rest.is_empty() {
            let negative = rest.starts_with('-');
            if rest.starts_with(['+', '-']) {
                rest = &rest[1..];
            }
            let end = rest.find(['+', '-']).unwrap_or(rest.len());
            let (term, tail) = rest.split_at(end);
            rest = tail;
            let (mut c, w) = parse_term(term, algebra)?;
            if negative {
                c = -c;
            }
            p.add_term(w, c);
        }
        Ok(p)
    }
}

fn parse_term(term: &str, algebra: &Algebra) -> Result<(BigRational, Word)> {
    let bad = || Error::InvalidArgument(format!("cannot parse term {term:?}"));
    let split = term.find(|c: char| !(c.is_ascii_digit() || c == '/')).unwrap_or(term.len());
    let (num, word) = term.split_at(split);
    let (star, word) = match word.strip_prefix('*') {
        Some(rest) => (true, rest),
        None => (false, word),
    };
    if term.is_empty() || (num.is_empty() && word.is_empty()) || (star && (num.is_empty() || word.is_empty())) {
        return Err(bad());
    }
    let c = if num.is_empty() {
        BigRational::one()
    } else {
        let (p, q) = num.split_once('/').unwrap_or((num, "1"));
        let p: BigInt = p.parse().map_err(|_| bad())?;
        let q: BigInt = q.parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        BigRational::new(p, q)
    };
    let w = match word {
        "" | "1" => Word::identity(),
        _ => {
            let reduce = algebra.mode == AlgebraMode::GroupAlgebra;
            Word::parse(word, algebra.alphabet, reduce)?
        }
    };
    algebra.check_monomial(&w)?;
    Ok((c, w))
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.terms.iter().rev().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            match (i, sign) {
                (0, "-") => write!(f, "-")?,
                (0, _) => {}
                _ => write!(f, " {sign} ")?,
            }
            let a = c.abs();
            if w.is_empty() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{w}")?;
            } else {
                write!(f, "{a}*{w}")?;
            }
        }
        Ok(())
    }
}

impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Parses an ideal file: one polynomial per line, `#` starts a comment.
pub fn parse_ideal_file(text: &str, algebra: &Algebra) -> Result<Vec<Polynomial>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let p = Polynomial::parse(line, algebra).map_err(|e| Error::Parse {
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(p);
    }
    Ok(out)
}

/// `h − 1` for each nontrivial generator `h`.
pub fn augmentation_ideal(generators: &[Word]) -> Vec<Polynomial> {
    generators
        .iter()
        .filter(|h| !h.is_empty())
        .map(|h| {
            let mut p = Polynomial::monomial(h.clone());
            p.add_term(Word::identity(), -BigRational::one());
            p
        })
        .collect()
}

/// Reduced row echelon basis of the span of `{g·w : l(g·w) ≤ m}`, pivots
/// being ShortLex-greatest monomials.
#[derive(Debug, Clone)]
pub struct EchelonBasis {
    algebra: Algebra,
    generators: Vec<Polynomial>,
    horizon: usize,
    rows: BTreeMap<Word, Polynomial>,
    /// Non-pivot monomial → pivots of the rows it occurs in.
    occurs: BTreeMap<Word, BTreeSet<Word>>,
    max_rows: usize,
}

impl EchelonBasis {
    pub fn new(algebra: Algebra, generators: Vec<Polynomial>, horizon: usize) -> Result<Self> {
        Self::with_max_rows(algebra, generators, horizon, DEFAULT_MAX_ROWS)
    }

    pub fn with_max_rows(
        algebra: Algebra,
        generators: Vec<Polynomial>,
        horizon: usize,
        max_rows: usize,
    ) -> Result<Self> {
        for g in &generators {
            if g.is_zero() {
                return Err(Error::ZeroPolynomial);
            }
            for (w, _) in g.terms() {
                algebra.check_monomial(w)?;
            }
        }
        let longest = generators.iter().map(Polynomial::len).max().unwrap_or(0);
        if horizon < longest {
            return Err(Error::InvalidArgument(format!(
                "horizon {horizon} is shorter than a generator of length {longest}"
            )));
        }
        let mut basis = EchelonBasis {
            algebra,
            generators,
            horizon: 0,
            rows: BTreeMap::new(),
            occurs: BTreeMap::new(),
            max_rows,
        };
        basis.admit(None, horizon)?;
        basis.horizon = horizon;
        Ok(basis)
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.generators
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> impl Iterator<Item = &Polynomial> {
        self.rows.values()
    }

    pub fn is_pivot(&self, w: &Word) -> bool {
        self.rows.contains_key(w)
    }

    /// Raises the horizon, admitting the products that now fit.
    pub fn extend_to(&mut self, horizon: usize) -> Result<()> {
        if horizon > self.horizon {
            self.admit(Some(self.horizon), horizon)?;
            self.horizon = horizon;
        }
        Ok(())
    }

    /// Inserts products `g·w` with `old < l(g·w) ≤ new`.
    fn admit(&mut self, old: Option<usize>, new: usize) -> Result<()> {
        let algebra = self.algebra;
        let fits = |len: usize| len <= new && old.is_none_or(|o| len > o);
        for gi in 0..self.generators.len() {
            let g = self.generators[gi].clone();
            let reach = match algebra.mode {
                AlgebraMode::FreeAssoc => new - g.len(),
                AlgebraMode::GroupAlgebra => new + g.len(),
            };
            for w in algebra.monomials_up_to(reach) {
                let p = g.mul_monomial(&w, &algebra);
                if !p.is_zero() && fits(p.len()) {
                    self.insert(p)?;
                }
            }
        }
        Ok(())
    }

    /// Normal form modulo the span: no monomial of the result is a pivot.
    pub fn reduce(&self, p: &Polynomial) -> Polynomial {
        let mut out = p.clone();
        let pivots: Vec<Word> = out.terms.keys().filter(|w| self.rows.contains_key(*w)).cloned().collect();
        for t in pivots {
            if let Some(c) = out.terms.get(&t).cloned() {
                out.add_scaled(&self.rows[&t], &-c);
            }
        }
        out
    }

    fn index(&mut self, pivot: &Word, row: &Polynomial) {
        for (w, _) in row.terms() {
            if w != pivot {
                self.occurs.entry(w.clone()).or_default().insert(pivot.clone());
            }
        }
    }

    fn unindex(&mut self, pivot: &Word, row: &Polynomial) {
        for (w, _) in row.terms() {
            if let Some(set) = self.occurs.get_mut(w) {
                set.remove(pivot);
                if set.is_empty() {
                    self.occurs.remove(w);
                }
            }
        }
    }

    /// Adds `p` to the span. Returns whether the span grew.
    pub fn insert(&mut self, p: Polynomial) -> Result<bool> {
        let mut r = self.reduce(&p);
        if r.is_zero() {
            return Ok(false);
        }
        if self.rows.len() >= self.max_rows {
            return Err(Error::BudgetExceeded(self.max_rows));
        }
        r.normalize();
        let t = r.leading().expect("nonzero").0.clone();
        if let Some(users) = self.occurs.remove(&t) {
            for pivot in users {
                let mut row = self.rows.remove(&pivot).expect("indexed row");
                self.unindex(&pivot, &row);
                let c = row.terms.get(&t).cloned().expect("row uses monomial");
                row.add_scaled(&r, &-c);
                self.index(&pivot, &row);
                self.rows.insert(pivot, row);
            }
        }
        self.index(&t, &r);
        self.rows.insert(t, r);
        Ok(true)
    }

    /// `Γ_I^{(m)}(n)`: rows whose pivot has length `≤ n`.
    pub fn ideal_growth(&self, n: usize) -> Result<u64> {
        self.check_level(n)?;
        Ok(self.rows.keys().take_while(|w| w.len() <= n).count() as u64)
    }

    /// `Γ_R(n) − Γ_I^{(m)}(n)`.
    pub fn cogrowth(&self, n: usize) -> Result<u64> {
        Ok(self.algebra.growth(n).at(n) - self.ideal_growth(n)?)
    }

    pub fn ideal_table(&self, n: usize) -> Result<GrowthTable> {
        let values = (0..=n).map(|k| self.ideal_growth(k)).collect::<Result<_>>()?;
        GrowthTable::new(values)
    }

    pub fn cogrowth_table(&self, n: usize) -> Result<GrowthTable> {
        let values = (0..=n).map(|k| self.cogrowth(k)).collect::<Result<_>>()?;
        GrowthTable::new(values)
    }

    /// Monomials of length `≤ n` that are not pivots, in ShortLex order.
    pub fn standard_monomials(&self, n: usize) -> Result<Vec<Word>> {
        self.check_level(n)?;
        Ok(self.algebra.monomials_up_to(n).into_iter().filter(|w| !self.is_pivot(w)).collect())
    }

    fn check_level(&self, n: usize) -> Result<()> {
        if n > self.horizon {
            return Err(Error::BeyondBasisHorizon {
                requested: n,
                horizon: self.horizon,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Stabilization {
    /// Least probed horizon whose table up to `n` agrees with the next one.
    pub stable_at: Option<usize>,
    /// Basis at the last horizon reached.
    pub basis: EchelonBasis,
    pub stopped_by: Option<String>,
}

impl Stabilization {
    pub fn is_stable(&self) -> bool {
        self.stable_at.is_some()
    }
}

/// Raises the horizon from `m0` until `Γ_I^{(m)}(0..=n)` stops changing,
/// `max_horizon` is passed, or the row budget runs out.
pub fn stabilize(
    algebra: Algebra,
    generators: Vec<Polynomial>,
    n: usize,
    m0: usize,
    max_horizon: usize,
    max_rows: usize,
) -> Result<Stabilization> {
    if m0 < n {
        return Err(Error::InvalidArgument(format!("start horizon {m0} is below level {n}")));
    }
    let mut basis = EchelonBasis::with_max_rows(algebra, generators, m0, max_rows)?;
    let mut table = basis.ideal_table(n)?;
    let mut m = m0;
    while m < max_horizon {
        let mut next = basis.clone();
        if let Err(e) = next.extend_to(m + 1) {
            if e.is_resource() {
                return Ok(Stabilization {
                    stable_at: None,
                    basis,
                    stopped_by: Some(e.to_string()),
                });
            }
            return Err(e);
        }
        let next_table = next.ideal_table(n)?;
        basis = next;
        if next_table == table {
            return Ok(Stabilization {
                stable_at: Some(m),
                basis,
                stopped_by: None,
            });
        }
        table = next_table;
        m += 1;
    }
    Ok(Stabilization {
        stable_at: None,
        basis,
        stopped_by: Some(format!("horizon limit {max_horizon} reached")),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum ColonSearch {
    /// `s ≠ 0` with `r·s` reducing to 0; `candidates` monomials were tried.
    Found { s: Polynomial, candidates: usize },
    /// The `candidates` products `r·w` stayed independent modulo the basis.
    /// `forced` says whether `Γ_R(n₀) > Γ_{R/I}^{(m)}(n₀ + l(r))`, in which
    /// case a dependency must exist.
    NotFound {
        candidates: usize,
        quotient_dimension: u64,
        forced: bool,
    },
}

/// Looks for `s ≠ 0` supported on monomials of length `≤ n0` with
/// `r·s ∈ I`, by eliminating the products `r·w` modulo the basis.
pub fn quotient_search(basis: &EchelonBasis, r: &Polynomial, n0: usize) -> Result<ColonSearch> {
    if r.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let need = r.len() + n0;
    if need > basis.horizon() {
        return Err(Error::BeyondBasisHorizon {
            requested: need,
            horizon: basis.horizon(),
        });
    }
    let algebra = *basis.algebra();
    let candidates = algebra.monomials_up_to(n0);
    let mut pivots: BTreeMap<Word, (Polynomial, Polynomial)> = BTreeMap::new();
    for (i, w) in candidates.iter().enumerate() {
        let mut v = basis.reduce(&r.mul_monomial(w, &algebra));
        let mut s = Polynomial::monomial(w.clone());
        while let Some((lead, c)) = v.leading() {
            let Some((pv, ps)) = pivots.get(lead) else { break };
            let c = -c.clone();
            v.add_scaled(pv, &c);
            s.add_scaled(ps, &c);
        }
        if v.is_zero() {
            s.normalize();
            if !basis.reduce(&r.mul(&s, &algebra)).is_zero() {
                return Err(Error::Invariant(format!("colon certificate {s} does not reduce to 0")));
            }
            return Ok(ColonSearch::Found { s, candidates: i + 1 });
        }
        let inv = v.leading().expect("nonzero").1.recip();
        v.scale(&inv);
        s.scale(&inv);
        let lead = v.leading().expect("nonzero").0.clone();
        pivots.insert(lead, (v, s));
    }
    let quotient_dimension = basis.cogrowth(need)?;
    Ok(ColonSearch::NotFound {
        candidates: candidates.len(),
        quotient_dimension,
        forced: candidates.len() as u64 > quotient_dimension,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EssentialityReport {
    pub horizon: usize,
    pub growth: Vec<u64>,
    pub ideal: Vec<u64>,
    pub cogrowth: Vec<u64>,
    /// `Γ_{R/I}(n) / Γ_R(n)` as exact fractions.
    pub ratios: Vec<String>,
    pub ratio_nonincreasing: bool,
    pub plausible: bool,
    pub verdict: String,
}

/// Tables and a finite-horizon reading of `Γ_{R/I} ≺ Γ_R`. A positive
/// verdict means the hypothesis looks plausible at this horizon, nothing
/// more.
pub fn essentiality_report(basis: &EchelonBasis, n: usize) -> Result<EssentialityReport> {
    let growth = basis.algebra().growth(n);
    let ideal = basis.ideal_table(n)?;
    let cogrowth = basis.cogrowth_table(n)?;
    let ratios: Vec<BigRational> = (0..=n)
        .map(|k| {
            BigRational::new(
                BigInt::from(cogrowth.at(k)),
                BigInt::from(growth.at(k).max(1)),
            )
        })
        .collect();
    let ratio_nonincreasing = ratios.windows(2).all(|p| p[1] <= p[0]);
    let plausible = cogrowth.values().iter().all(|&v| v == 0) || strict_witness(&cogrowth, &growth, 2)?;
    let verdict = if plausible {
        "consistent with essential: cogrowth lags growth at this horizon"
    } else {
        "no verdict: cogrowth does not lag growth at this horizon"
    };
    Ok(EssentialityReport {
        horizon: basis.horizon(),
        growth: growth.values().to_vec(),
        ideal: ideal.values().to_vec(),
        cogrowth: cogrowth.values().to_vec(),
        ratios: ratios.iter().map(ToString::to_string).collect(),
        ratio_nonincreasing,
        plausible,
        verdict: verdict.into(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Correspondence {
    pub n: usize,
    pub stable_at: Option<usize>,
    pub horizon: usize,
    pub subgroup: Vec<u64>,
    pub ideal: Vec<u64>,
    pub matches: bool,
}

/// Compares the cogrowth of the augmentation ideal of `⟨generators⟩` in the
/// group algebra with the subgroup cogrowth read off `graph`.
pub fn correspondence(
    graph: &mut CosetGraph,
    generators: &[Word],
    n: usize,
    max_horizon: usize,
    max_rows: usize,
) -> Result<Correspondence> {
    let algebra = Algebra {
        mode: AlgebraMode::GroupAlgebra,
        alphabet: graph.alphabet(),
    };
    let gens = augmentation_ideal(generators);
    let start = gens.iter().map(Polynomial::len).max().unwrap_or(0).max(n);
    let st = stabilize(algebra, gens, n, start, max_horizon.max(start), max_rows)?;
    let ideal = st.basis.cogrowth_table(n)?;
    let subgroup = graph.cogrowth(n)?;
    Ok(Correspondence {
        n,
        stable_at: st.stable_at,
        horizon: st.basis.horizon(),
        matches: ideal == subgroup,
        subgroup: subgroup.values().to_vec(),
        ideal: ideal.values().to_vec(),
    })
}
