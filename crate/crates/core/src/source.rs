//! Loading subgroups from files and built-in quotient names.

use std::path::Path;

use crate::coset::{fold, from_permutations, z_shift, z_squared, Backend, CosetGraph, PermutationRep};
use crate::error::{Error, Result};
use crate::words::{Alphabet, Letter, Word};

/// Parses a subgroup file: one generator word per line, `#` comments.
/// The rank is the largest generator letter used, and at least 2.
pub fn parse_subgroup_file(text: &str, reduce: bool) -> Result<(Alphabet, Vec<Word>)> {
    let mut lines = Vec::new();
    let mut rank = 2u32;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        for c in line.chars().filter(|c| *c != '1') {
            let l = Letter::from_char(c).map_err(|e| Error::Parse {
                line: i + 1,
                message: e.to_string(),
            })?;
            rank = rank.max(u32::from(l.0.unsigned_abs()));
        }
        lines.push((i + 1, line));
    }
    let alphabet = Alphabet::new(rank)?;
    let words = lines
        .into_iter()
        .map(|(line, text)| {
            Word::parse(text, alphabet, reduce).map_err(|e| Error::Parse {
                line,
                message: e.to_string(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((alphabet, words))
}

pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// A subgroup ready for analysis.
#[derive(Debug, Clone)]
pub struct Subgroup {
    pub name: String,
    pub graph: CosetGraph,
    /// Generators, when the subgroup was given by them.
    pub generators: Option<Vec<Word>>,
}

impl Subgroup {
    pub fn from_words(name: impl Into<String>, words: &[Word], alphabet: Alphabet) -> Self {
        Subgroup {
            name: name.into(),
            graph: fold(words, alphabet),
            generators: Some(words.to_vec()),
        }
    }

    /// Generators, or a Nielsen–Schreier basis for a finite quotient.
    pub fn generating_set(&mut self) -> Result<Vec<Word>> {
        if let Some(g) = &self.generators {
            return Ok(g.clone());
        }
        if !self.graph.is_complete() {
            return Err(Error::InvalidArgument(format!(
                "{} has no finite generating set on record",
                self.name
            )));
        }
        let n = self.graph.num_vertices();
        self.graph.nielsen_schreier_basis(n)
    }

    pub fn is_quotient(&self) -> bool {
        matches!(self.graph.backend(), Backend::Quotient { .. })
    }
}

/// Loads `quotient:z-shift`, `quotient:z2`, a `.perm` permutation file, or
/// a subgroup file of generator words.
pub fn load_subgroup(spec: &str, reduce: bool) -> Result<Subgroup> {
    if let Some(name) = spec.strip_prefix("quotient:") {
        let graph = match name {
            "z-shift" => z_shift(),
            "z2" => z_squared(),
            _ => return Err(Error::InvalidArgument(format!("unknown quotient {name:?}"))),
        };
        return Ok(Subgroup {
            name: spec.to_string(),
            graph,
            generators: None,
        });
    }
    let path = Path::new(spec);
    let text = read_file(path)?;
    let with_path = |e: Error| Error::Io {
        path: spec.to_string(),
        message: e.to_string(),
    };
    if path.extension().is_some_and(|e| e == "perm") {
        let rep = PermutationRep::parse(&text).map_err(with_path)?;
        return Ok(Subgroup {
            name: spec.to_string(),
            graph: from_permutations(&rep).map_err(with_path)?,
            generators: None,
        });
    }
    let (alphabet, words) = parse_subgroup_file(&text, reduce).map_err(with_path)?;
    Ok(Subgroup::from_words(spec, &words, alphabet))
}
