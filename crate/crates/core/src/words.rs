//! Reduced words in a free group of small rank.
//!
//! Letters are signed integers: `i` is the `i`-th generator and `-i` its
//! inverse. In text, generators are lowercase (`a`, `b`, ...) and inverses
//! uppercase (`A`, `B`, ...). The ShortLex letter order is
//! `a < A < b < B < ...`.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet {
    rank: u8,
}

impl Alphabet {
    pub fn new(rank: u32) -> Result<Self> {
        if rank == 0 || rank > 26 {
            return Err(Error::InvalidRank(rank));
        }
        Ok(Alphabet { rank: rank as u8 })
    }

    pub fn rank(&self) -> u8 {
        self.rank
    }

    /// Number of letters, generators and inverses together.
    pub fn size(&self) -> usize {
        2 * self.rank as usize
    }

    /// All letters in ShortLex order.
    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        (0..self.size()).map(Letter::from_slot)
    }

    pub fn generators(&self) -> impl Iterator<Item = Letter> {
        (1..=self.rank as i8).map(Letter)
    }

    pub fn check(&self, letter: Letter) -> Result<()> {
        let g = letter.0.unsigned_abs();
        if g == 0 || g > self.rank {
            return Err(Error::LetterOutOfRange {
                letter: letter.0 as i32,
                rank: self.rank,
            });
        }
        Ok(())
    }

    /// Number of reduced words of length at most `n`.
    pub fn ball_size(&self, n: usize) -> u64 {
        let m = self.size() as u64;
        let mut total = 1u64;
        let mut level = m;
        for _ in 0..n {
            total = total.saturating_add(level);
            level = level.saturating_mul(m - 1);
        }
        total
    }
}

impl Default for Alphabet {
    fn default() -> Self {
        Alphabet { rank: 2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Letter(pub i8);

impl Letter {
    pub fn inverse(self) -> Letter {
        Letter(-self.0)
    }

    pub fn is_inverse_of(self, other: Letter) -> bool {
        self.0 == -other.0
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    /// Position in the ShortLex letter order, also the transition slot.
    pub fn slot(self) -> usize {
        2 * (self.0.unsigned_abs() as usize - 1) + usize::from(self.0 < 0)
    }

    pub fn from_slot(slot: usize) -> Letter {
        let g = (slot / 2 + 1) as i8;
        if slot % 2 == 0 {
            Letter(g)
        } else {
            Letter(-g)
        }
    }

    pub fn to_char(self) -> char {
        let base = if self.0 > 0 { b'a' } else { b'A' };
        (base + self.0.unsigned_abs() - 1) as char
    }

    pub fn from_char(c: char) -> Result<Letter> {
        match c {
            'a'..='z' => Ok(Letter((c as u8 - b'a' + 1) as i8)),
            'A'..='Z' => Ok(Letter(-((c as u8 - b'A' + 1) as i8))),
            _ => Err(Error::BadCharacter(c)),
        }
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> Ordering {
        self.slot().cmp(&other.slot())
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

/// A freely reduced word. Ordered by ShortLex.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Word {
        Word(Vec::new())
    }

    pub fn letter(l: Letter) -> Word {
        Word(vec![l])
    }

    /// Freely reduces an arbitrary letter sequence.
    pub fn reduce<I>(letters: I, alphabet: Alphabet) -> Result<Word>
    where
        I: IntoIterator<Item = Letter>,
    {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            alphabet.check(l)?;
            push_reduced(&mut out, l);
        }
        Ok(Word(out))
    }

    /// Builds a word from raw signed integers, reducing it.
    pub fn from_ints(ints: &[i32], alphabet: Alphabet) -> Result<Word> {
        let mut letters = Vec::with_capacity(ints.len());
        for &i in ints {
            if i == 0 || i.unsigned_abs() > alphabet.rank as u32 {
                return Err(Error::LetterOutOfRange {
                    letter: i,
                    rank: alphabet.rank,
                });
            }
            letters.push(Letter(i as i8));
        }
        Word::reduce(letters, alphabet)
    }

    /// Wraps letters that are already known to be reduced.
    pub(crate) fn from_reduced_unchecked(letters: Vec<Letter>) -> Word {
        debug_assert!(letters.windows(2).all(|p| !p[0].is_inverse_of(p[1])));
        Word(letters)
    }

    /// Parses the text form. `"1"` and `""` denote the identity. Unless
    /// `reduce` is set, non-reduced input is rejected.
    pub fn parse(text: &str, alphabet: Alphabet, reduce: bool) -> Result<Word> {
        let text = text.trim();
        if text.is_empty() || text == "1" {
            return Ok(Word::identity());
        }
        let mut letters = Vec::with_capacity(text.len());
        for c in text.chars() {
            let l = Letter::from_char(c)?;
            alphabet.check(l)?;
            letters.push(l);
        }
        let w = Word::reduce(letters.iter().copied(), alphabet)?;
        if !reduce && w.len() != letters.len() {
            return Err(Error::NotReduced(text.to_string()));
        }
        Ok(w)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn first(&self) -> Option<Letter> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut out = self.0.clone();
        for &l in &other.0 {
            push_reduced(&mut out, l);
        }
        Word(out)
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..k.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    /// Appends a single letter, cancelling if needed.
    pub fn push(&mut self, l: Letter) {
        push_reduced(&mut self.0, l);
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.first(), self.last()) {
            (Some(f), Some(l)) if self.len() >= 2 => !f.is_inverse_of(l),
            _ => true,
        }
    }

    /// Splits `self = h1 h2 h1⁻¹` with `h2` cyclically reduced and of
    /// minimal length.
    pub fn cyclic_reduce(&self) -> Result<CyclicDecomposition> {
        if self.is_empty() {
            return Err(Error::EmptyWord);
        }
        let n = self.len();
        let mut k = 0;
        while 2 * k + 2 <= n && self.0[k].is_inverse_of(self.0[n - 1 - k]) {
            k += 1;
        }
        Ok(CyclicDecomposition {
            h1: Word(self.0[..k].to_vec()),
            h2: Word(self.0[k..n - k].to_vec()),
        })
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn prefix(&self, len: usize) -> Word {
        Word(self.0[..len].to_vec())
    }
}

fn push_reduced(out: &mut Vec<Letter>, l: Letter) {
    if out.last().is_some_and(|&p| p.is_inverse_of(l)) {
        out.pop();
    } else {
        out.push(l);
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        shortlex_compare(self, other)
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for l in &self.0 {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Word, D::Error> {
        let s = String::deserialize(d)?;
        Word::parse(&s, Alphabet::new(26).expect("rank 26 is valid"), false)
            .map_err(serde::de::Error::custom)
    }
}

pub fn shortlex_compare(u: &Word, v: &Word) -> Ordering {
    u.len().cmp(&v.len()).then_with(|| u.0.cmp(&v.0))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicDecomposition {
    pub h1: Word,
    pub h2: Word,
}

impl CyclicDecomposition {
    pub fn reassemble(&self) -> Word {
        self.h1.mul(&self.h2).mul(&self.h1.inverse())
    }
}

/// ShortLex enumeration of reduced words, level by level.
#[derive(Debug, Clone)]
pub struct ShortLex {
    alphabet: Alphabet,
    level: Vec<Word>,
    pos: usize,
}

impl ShortLex {
    pub fn new(alphabet: Alphabet) -> Self {
        ShortLex {
            alphabet,
            level: vec![Word::identity()],
            pos: 0,
        }
    }
}

impl Iterator for ShortLex {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        if self.pos == self.level.len() {
            self.level = next_level(&self.level, self.alphabet);
            self.pos = 0;
        }
        self.pos += 1;
        Some(self.level[self.pos - 1].clone())
    }
}

fn next_level(level: &[Word], alphabet: Alphabet) -> Vec<Word> {
    let mut out = Vec::with_capacity(level.len() * (alphabet.size() - 1).max(1));
    for w in level {
        for l in alphabet.letters() {
            if w.last().is_some_and(|p| p.is_inverse_of(l)) {
                continue;
            }
            let mut v = w.0.clone();
            v.push(l);
            out.push(Word(v));
        }
    }
    out
}

/// The first `n` reduced words in ShortLex order, starting with the identity.
pub fn enumerate(alphabet: Alphabet, n: usize) -> Vec<Word> {
    ShortLex::new(alphabet).take(n).collect()
}

/// All reduced words of length at most `len`, in ShortLex order.
pub fn words_up_to(alphabet: Alphabet, len: usize) -> Vec<Word> {
    let mut out = vec![Word::identity()];
    let mut level = vec![Word::identity()];
    for _ in 0..len {
        level = next_level(&level, alphabet);
        out.extend(level.iter().cloned());
    }
    out
}

/// The commutator `x y x⁻¹ y⁻¹`. Empty exactly when `x` and `y` commute.
pub fn commutator_witness(x: &Word, y: &Word) -> Word {
    x.mul(y).mul(&x.inverse()).mul(&y.inverse())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f2() -> Alphabet {
        Alphabet::default()
    }

    fn w(s: &str) -> Word {
        Word::parse(s, f2(), false).unwrap()
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(Word::from_ints(&[1, -1], f2()).unwrap(), Word::identity());
        assert_eq!(Word::from_ints(&[1, 2, -2, -1, 1], f2()).unwrap(), w("a"));
        assert_eq!(Word::from_ints(&[1, 2, 1], f2()).unwrap(), w("aba"));
        assert!(matches!(
            Word::from_ints(&[3], f2()),
            Err(Error::LetterOutOfRange { letter: 3, rank: 2 })
        ));
    }

    #[test]
    fn multiply_examples() {
        assert_eq!(w("ab").mul(&w("BA")), Word::identity());
        assert_eq!(w("a").mul(&w("b")), w("ab"));
        assert_eq!(w("ab").mul(&Word::parse("BAa", f2(), true).unwrap()), w("a"));
        // The raw concatenation is not reduced; the product still is.
        assert_eq!(w("ab").mul(&w("B")).mul(&w("A")).mul(&w("a")), w("a"));
    }

    #[test]
    fn parse_rejects_unreduced_without_flag() {
        assert!(matches!(Word::parse("aA", f2(), false), Err(Error::NotReduced(_))));
        assert_eq!(Word::parse("aA", f2(), true).unwrap(), Word::identity());
        assert_eq!(Word::parse("1", f2(), false).unwrap(), Word::identity());
        assert!(Word::parse("c", f2(), false).is_err());
        assert!(Word::parse("a1", f2(), false).is_err());
        assert_eq!(w("abAB").to_string(), "abAB");
        assert_eq!(Word::identity().to_string(), "1");
    }

    #[test]
    fn cyclic_reduce_examples() {
        let d = w("abA").cyclic_reduce().unwrap();
        assert_eq!((d.h1, d.h2), (w("a"), w("b")));
        let d = w("ab").cyclic_reduce().unwrap();
        assert_eq!((d.h1, d.h2), (Word::identity(), w("ab")));
        let d = w("abbA").cyclic_reduce().unwrap();
        assert_eq!((d.h1, d.h2), (w("a"), w("bb")));
        assert_eq!(Word::identity().cyclic_reduce(), Err(Error::EmptyWord));
        let d = w("abaBA").cyclic_reduce().unwrap();
        assert_eq!((d.h1, d.h2), (w("ab"), w("a")));
    }

    #[test]
    fn shortlex_examples() {
        assert_eq!(shortlex_compare(&w("a"), &w("ab")), Ordering::Less);
        assert_eq!(shortlex_compare(&w("aa"), &w("ab")), Ordering::Less);
        assert_eq!(shortlex_compare(&w("b"), &w("A")), Ordering::Greater);
        assert_eq!(shortlex_compare(&w("A"), &w("b")), Ordering::Less);
    }

    #[test]
    fn enumerate_examples() {
        let five: Vec<String> = enumerate(f2(), 5).iter().map(|w| w.to_string()).collect();
        assert_eq!(five, ["1", "a", "A", "b", "B"]);
        assert_eq!(enumerate(f2(), 1), vec![Word::identity()]);
        let two = words_up_to(f2(), 2);
        assert_eq!(two.iter().filter(|w| w.len() == 2).count(), 12);
        assert_eq!(two.len() as u64, f2().ball_size(2));
        let r3 = Alphabet::new(3).unwrap();
        assert_eq!(words_up_to(r3, 3).len() as u64, r3.ball_size(3));
    }

    #[test]
    fn commutator_examples() {
        assert_eq!(commutator_witness(&w("a"), &w("b")), w("abAB"));
        assert_eq!(commutator_witness(&w("a"), &w("a")), Word::identity());
        // abb·BA·B = abAB
        assert_eq!(commutator_witness(&w("ab"), &w("b")), w("abAB"));
        assert_eq!(commutator_witness(&w("aa"), &w("aaa")), Word::identity());
    }

    fn raw_word() -> impl Strategy<Value = Vec<i32>> {
        prop::collection::vec(prop_oneof![Just(1), Just(-1), Just(2), Just(-2)], 0..24)
    }

    proptest! {
        #[test]
        fn reduce_is_idempotent(raw in raw_word()) {
            let once = Word::from_ints(&raw, f2()).unwrap();
            let ints: Vec<i32> = once.letters().iter().map(|l| l.0 as i32).collect();
            prop_assert_eq!(Word::from_ints(&ints, f2()).unwrap(), once);
        }

        #[test]
        fn inverse_cancels(raw in raw_word()) {
            let u = Word::from_ints(&raw, f2()).unwrap();
            prop_assert!(u.mul(&u.inverse()).is_empty());
        }

        #[test]
        fn multiply_is_associative(a in raw_word(), b in raw_word(), c in raw_word()) {
            let (a, b, c) = (
                Word::from_ints(&a, f2()).unwrap(),
                Word::from_ints(&b, f2()).unwrap(),
                Word::from_ints(&c, f2()).unwrap(),
            );
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert!(a.mul(&b).len() <= a.len() + b.len());
        }

        #[test]
        fn shortlex_respects_length(a in raw_word(), b in raw_word()) {
            let (u, v) = (Word::from_ints(&a, f2()).unwrap(), Word::from_ints(&b, f2()).unwrap());
            if u.len() < v.len() {
                prop_assert_eq!(shortlex_compare(&u, &v), Ordering::Less);
            }
            prop_assert_eq!(shortlex_compare(&u, &v), shortlex_compare(&v, &u).reverse());
        }

        #[test]
        fn cyclic_reduce_reassembles(raw in raw_word()) {
            let g = Word::from_ints(&raw, f2()).unwrap();
            prop_assume!(!g.is_empty());
            let d = g.cyclic_reduce().unwrap();
            prop_assert_eq!(d.reassemble(), g.clone());
            prop_assert!(d.h2.is_cyclically_reduced());
            prop_assert!(!d.h2.is_empty());
            prop_assert_eq!(2 * d.h1.len() + d.h2.len(), g.len());
        }
    }

    #[test]
    fn enumeration_is_strictly_increasing_and_gap_free() {
        let list = enumerate(f2(), 161);
        assert!(list.windows(2).all(|p| p[0] < p[1]));
        // gap-free: every reduced word up to length 4 appears, and nothing else
        assert_eq!(list, words_up_to(f2(), 4));
    }
}
