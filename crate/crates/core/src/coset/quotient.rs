use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use super::{Backend, CosetGraph, QuotientState, ROOT};
use crate::error::{Error, Result};
use crate::words::{Alphabet, Letter};

/// Right action of the free group on labelled points. Must be a genuine
/// action: applying `x` then `x⁻¹` returns the original label.
pub trait TransitionOracle: Send + Sync {
    fn act(&self, label: &[i64], letter: Letter) -> Vec<i64>;
}

impl<F> TransitionOracle for F
where
    F: Fn(&[i64], Letter) -> Vec<i64> + Send + Sync,
{
    fn act(&self, label: &[i64], letter: Letter) -> Vec<i64> {
        self(label, letter)
    }
}

/// Coset graph of the stabilizer of `root_label`, materialized on demand.
pub fn from_callback(
    alphabet: Alphabet,
    oracle: Arc<dyn TransitionOracle>,
    root_label: Vec<i64>,
    name: impl Into<String>,
) -> CosetGraph {
    let mut g = CosetGraph::with_vertices(alphabet, 1, Backend::Quotient { name: name.into() });
    g.quotient = Some(QuotientState {
        oracle,
        labels: vec![root_label.clone()],
        index: HashMap::from([(root_label, ROOT)]),
    });
    g
}

/// Normal closure of `a` in F₂: the quotient is ℤ, `a` acts trivially and
/// `b` shifts.
pub fn z_shift() -> CosetGraph {
    let oracle = |label: &[i64], l: Letter| -> Vec<i64> {
        match l.0 {
            2 => vec![label[0] + 1],
            -2 => vec![label[0] - 1],
            _ => label.to_vec(),
        }
    };
    from_callback(Alphabet::default(), Arc::new(oracle), vec![0], "z-shift")
}

/// Commutator subgroup of F₂: the quotient is ℤ² with `a`, `b` acting as
/// the unit translations.
pub fn z_squared() -> CosetGraph {
    let oracle = |label: &[i64], l: Letter| -> Vec<i64> {
        let (x, y) = (label[0], label[1]);
        match l.0 {
            1 => vec![x + 1, y],
            -1 => vec![x - 1, y],
            2 => vec![x, y + 1],
            _ => vec![x, y - 1],
        }
    };
    from_callback(Alphabet::default(), Arc::new(oracle), vec![0, 0], "z2")
}

/// Permutations of `{0..degree}`, one per generator, acting on the right.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationRep {
    degree: usize,
    images: Vec<Vec<usize>>,
    basepoint: usize,
}

impl PermutationRep {
    /// `images[i][p]` is the image of point `p` under generator `i + 1`;
    /// points and basepoint are 0-based.
    pub fn new(degree: usize, images: Vec<Vec<usize>>, basepoint: usize) -> Result<Self> {
        if degree == 0 {
            return Err(Error::InvalidPermutation("degree must be positive".into()));
        }
        if images.is_empty() || images.len() > 26 {
            return Err(Error::InvalidPermutation(format!(
                "need between 1 and 26 generators, got {}",
                images.len()
            )));
        }
        if basepoint >= degree {
            return Err(Error::InvalidPermutation(format!("basepoint {} exceeds degree {degree}", basepoint + 1)));
        }
        for (i, img) in images.iter().enumerate() {
            if img.len() != degree {
                return Err(Error::InvalidPermutation(format!("generator {} has {} images", i + 1, img.len())));
            }
            let mut seen = vec![false; degree];
            for &p in img {
                if p >= degree || std::mem::replace(&mut seen[p], true) {
                    return Err(Error::InvalidPermutation(format!("generator {} is not a bijection", i + 1)));
                }
            }
        }
        Ok(PermutationRep { degree, images, basepoint })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn rank(&self) -> usize {
        self.images.len()
    }

    /// Parses one generator per line in 1-based cycle notation, e.g.
    /// `(1 2)(3 4)`; `()` or `id` is the identity. Optional header lines
    /// `degree N` and `basepoint N`; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut degree = 0usize;
        let mut basepoint = 1usize;
        let mut cycles_per_gen: Vec<Vec<Vec<usize>>> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            let err = |message: String| Error::Parse { line: i + 1, message };
            if line.is_empty() {
                continue;
            }
            let mut words = line.split_whitespace();
            match words.next() {
                Some(key @ ("degree" | "basepoint")) => {
                    let n: usize = words
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| err(format!("{key} needs a positive integer")))?;
                    if key == "degree" {
                        degree = degree.max(n);
                    } else {
                        basepoint = n;
                    }
                    continue;
                }
                _ => {}
            }
            if line == "id" {
                cycles_per_gen.push(Vec::new());
                continue;
            }
            let mut cycles = Vec::new();
            let mut rest = line;
            while !rest.is_empty() {
                let open = rest.strip_prefix('(').ok_or_else(|| err("expected `(`".into()))?;
                let close = open.find(')').ok_or_else(|| err("unclosed cycle".into()))?;
                let points: Vec<usize> = open[..close]
                    .split(|c: char| c.is_whitespace() || c == ',')
                    .filter(|t| !t.is_empty())
                    .map(|t| t.parse::<usize>().ok().filter(|&p| p >= 1))
                    .collect::<Option<_>>()
                    .ok_or_else(|| err("points must be positive integers".into()))?;
                if let Some(&mx) = points.iter().max() {
                    degree = degree.max(mx);
                }
                cycles.push(points);
                rest = open[close + 1..].trim_start();
            }
            cycles_per_gen.push(cycles);
        }
        if cycles_per_gen.is_empty() {
            return Err(Error::InvalidPermutation("no generators given".into()));
        }
        let degree = degree.max(basepoint).max(1);
        let mut images = Vec::with_capacity(cycles_per_gen.len());
        for (g, cycles) in cycles_per_gen.iter().enumerate() {
            let mut img: Vec<usize> = (0..degree).collect();
            let mut moved = vec![false; degree];
            for cycle in cycles {
                for (j, &p) in cycle.iter().enumerate() {
                    if std::mem::replace(&mut moved[p - 1], true) {
                        return Err(Error::InvalidPermutation(format!(
                            "point {p} repeated in generator {}",
                            g + 1
                        )));
                    }
                    img[p - 1] = cycle[(j + 1) % cycle.len()] - 1;
                }
            }
            images.push(img);
        }
        PermutationRep::new(degree, images, basepoint - 1)
    }
}

/// Complete coset graph of the basepoint stabilizer, on the basepoint's
/// orbit. Vertices are numbered in ShortLex breadth-first order.
pub fn from_permutations(rep: &PermutationRep) -> Result<CosetGraph> {
    let alphabet = Alphabet::new(rep.rank() as u32)?;
    let mut inverses = Vec::with_capacity(rep.rank());
    for img in &rep.images {
        let mut inv = vec![0; rep.degree];
        for (p, &q) in img.iter().enumerate() {
            inv[q] = p;
        }
        inverses.push(inv);
    }
    let act = |p: usize, l: Letter| -> usize {
        let i = (l.0.unsigned_abs() - 1) as usize;
        if l.is_positive() {
            rep.images[i][p]
        } else {
            inverses[i][p]
        }
    };
    let mut id = vec![usize::MAX; rep.degree];
    let mut order = vec![rep.basepoint];
    id[rep.basepoint] = 0;
    let mut queue = VecDeque::from([rep.basepoint]);
    while let Some(p) = queue.pop_front() {
        for l in alphabet.letters() {
            let q = act(p, l);
            if id[q] == usize::MAX {
                id[q] = order.len();
                order.push(q);
                queue.push_back(q);
            }
        }
    }
    let m = alphabet.size();
    let mut g = CosetGraph::with_vertices(
        alphabet,
        order.len(),
        Backend::Quotient {
            name: "permutations".into(),
        },
    );
    for (v, &p) in order.iter().enumerate() {
        for l in alphabet.letters() {
            g.trans[v * m + l.slot()] = Some(id[act(p, l)]);
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::Word;

    fn w(s: &str) -> Word {
        Word::parse(s, Alphabet::default(), false).unwrap()
    }

    #[test]
    fn both_swap_is_index_two() {
        let rep = PermutationRep::parse("(1 2)\n(1 2)\n").unwrap();
        let mut g = from_permutations(&rep).unwrap();
        assert_eq!(g.num_vertices(), 2);
        assert!(g.is_complete());
        assert!(g.involution_violations().is_empty());
        assert!(g.contains(&w("ab")).unwrap());
        assert!(g.contains(&w("aa")).unwrap());
        assert!(!g.contains(&w("a")).unwrap());
    }

    #[test]
    fn identity_permutations_give_whole_group() {
        let rep = PermutationRep::parse("degree 1\nid\n()\n").unwrap();
        let mut g = from_permutations(&rep).unwrap();
        assert_eq!(g.num_vertices(), 1);
        assert!(g.contains(&w("abAB")).unwrap());
    }

    #[test]
    fn three_cycle_has_index_three() {
        let rep = PermutationRep::parse("(1 2 3)\nid\n").unwrap();
        let g = from_permutations(&rep).unwrap();
        assert_eq!(g.num_vertices(), 3);
    }

    #[test]
    fn orbit_restriction() {
        let rep = PermutationRep::parse("degree 5\n(1 2)\n(3 4)\n").unwrap();
        let g = from_permutations(&rep).unwrap();
        assert_eq!(g.num_vertices(), 2);
    }

    #[test]
    fn rejects_bad_permutations() {
        assert!(PermutationRep::parse("(1 2)(2 3)\n").is_err());
        assert!(PermutationRep::parse("(1 2\n").is_err());
        assert!(PermutationRep::parse("(0 1)\n").is_err());
        assert!(PermutationRep::parse("# nothing\n").is_err());
        assert!(PermutationRep::new(2, vec![vec![0, 0]], 0).is_err());
    }

    #[test]
    fn z_shift_membership() {
        let mut g = z_shift();
        assert!(g.contains(&w("a")).unwrap());
        assert!(!g.contains(&w("b")).unwrap());
        assert!(g.contains(&w("baB")).unwrap());
        assert!(g.contains(&w("bbaBBA")).unwrap());
        assert!(g.involution_violations().is_empty());
    }

    #[test]
    fn broken_oracle_is_reported() {
        let oracle = |label: &[i64], l: Letter| -> Vec<i64> {
            match l.0 {
                1 => vec![label[0] + 1],
                _ => vec![label[0]],
            }
        };
        let mut g = from_callback(Alphabet::default(), Arc::new(oracle), vec![0], "broken");
        let err = g.trace(&w("a"), ROOT).unwrap_err();
        assert!(matches!(err, Error::InvolutionViolation { .. }));
    }
}
