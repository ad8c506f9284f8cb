//! Finite growth tables, the admissible target functions for the essential
//! subgroup construction, and finite-horizon versions of the asymptotic
//! comparisons between growth functions.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cumulative counts `Γ(0..=N)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthTable {
    values: Vec<u64>,
}

impl GrowthTable {
    pub fn new(values: Vec<u64>) -> Result<Self> {
        if let Some(i) = values.windows(2).position(|p| p[1] < p[0]) {
            return Err(Error::InvalidGrowthFunction(format!(
                "table decreases at level {}",
                i + 1
            )));
        }
        Ok(GrowthTable { values })
    }

    pub fn from_increments(increments: &[u64]) -> Result<Self> {
        let mut values = Vec::with_capacity(increments.len());
        let mut total = 0u64;
        for (i, &f) in increments.iter().enumerate() {
            total = total.checked_add(f).ok_or(Error::Overflow(i))?;
            values.push(total);
        }
        Ok(GrowthTable { values })
    }

    /// Largest level stored. Panics on an empty table.
    pub fn horizon(&self) -> usize {
        self.values.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn get(&self, n: usize) -> Option<u64> {
        self.values.get(n).copied()
    }

    /// `Γ(n)`; panics beyond the horizon.
    pub fn at(&self, n: usize) -> u64 {
        self.values[n]
    }

    /// `γ(n) = Γ(n) − Γ(n−1)`, with `γ(0) = Γ(0)`.
    pub fn increment(&self, n: usize) -> u64 {
        if n == 0 {
            self.values[0]
        } else {
            self.values[n] - self.values[n - 1]
        }
    }

    pub fn increments(&self) -> Vec<u64> {
        (0..self.values.len()).map(|n| self.increment(n)).collect()
    }

    pub fn truncate(&self, n: usize) -> GrowthTable {
        GrowthTable {
            values: self.values[..=n.min(self.horizon())].to_vec(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,value,increment\n");
        for n in 0..self.values.len() {
            out.push_str(&format!("{},{},{}\n", n, self.values[n], self.increment(n)));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({ "horizon": self.horizon(), "values": self.values }).to_string()
    }
}

fn check_pair(g1: &GrowthTable, g2: &GrowthTable, constant: u64) -> Result<()> {
    if g1.is_empty() || g2.is_empty() || constant == 0 {
        return Err(Error::EmptyCheckRange {
            constant,
            left: g1.values.len(),
            right: g2.values.len(),
        });
    }
    Ok(())
}

/// Checks `Γ1(n) ≤ Γ2(C·n)` for every `n` with `n` within the horizon of `g1`
/// and `C·n` within the horizon of `g2`. This is evidence up to the horizon,
/// not a proof of the asymptotic relation.
pub fn preorder_witness(g1: &GrowthTable, g2: &GrowthTable, constant: u64) -> Result<bool> {
    check_pair(g1, g2, constant)?;
    let c = constant as usize;
    Ok((0..=g1.horizon())
        .take_while(|&n| n.saturating_mul(c) <= g2.horizon())
        .all(|n| g1.at(n) <= g2.at(n * c)))
}

pub fn equivalence_witness(g1: &GrowthTable, g2: &GrowthTable, constant: u64) -> Result<bool> {
    Ok(preorder_witness(g1, g2, constant)? && preorder_witness(g2, g1, constant)?)
}

/// Some constant up to `max_constant` witnesses `g1 ⪯ g2`, and none
/// witnesses `g2 ⪯ g1` on the horizon.
pub fn strict_witness(g1: &GrowthTable, g2: &GrowthTable, max_constant: u64) -> Result<bool> {
    let mut below = false;
    for c in 1..=max_constant {
        below |= preorder_witness(g1, g2, c)?;
    }
    if !below {
        return Ok(false);
    }
    for c in 1..=max_constant {
        if preorder_witness(g2, g1, c)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Named families of admissible growth targets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Family {
    /// Partial sums `(n+1)^k`.
    Polynomial(u32),
    /// Increments `base^i`.
    Exponential(u64),
    /// Increments `round(exp(i^β))`, `0 < β < 1`.
    Intermediate(f64),
    /// `limit` unit increments, then zeros.
    Finite(u64),
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Polynomial(k) => write!(f, "poly:{k}"),
            Family::Exponential(b) => write!(f, "exp:{b}"),
            Family::Intermediate(beta) => write!(f, "inter:{beta}"),
            Family::Finite(r) => write!(f, "finite:{r}"),
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidGrowthFunction(format!("cannot parse family {s:?}"));
        let (kind, param) = s.split_once(':').ok_or_else(bad)?;
        match kind.trim() {
            "poly" | "polynomial" => Ok(Family::Polynomial(param.trim().parse().map_err(|_| bad())?)),
            "exp" | "exponential" => Ok(Family::Exponential(param.trim().parse().map_err(|_| bad())?)),
            "inter" | "intermediate" => {
                let param = param.trim();
                let beta = match param.split_once('/') {
                    Some((p, q)) => {
                        let p: f64 = p.parse().map_err(|_| bad())?;
                        let q: f64 = q.parse().map_err(|_| bad())?;
                        p / q
                    }
                    None => param.parse().map_err(|_| bad())?,
                };
                Ok(Family::Intermediate(beta))
            }
            "finite" => Ok(Family::Finite(param.trim().parse().map_err(|_| bad())?)),
            _ => Err(bad()),
        }
    }
}

type IncrementFn = Arc<dyn Fn(usize) -> u64 + Send + Sync>;

/// A target function `α(n) = Σ_{i≤n} f_i` with `f_0 = 1`, positive
/// increments up to the cutoff, zeros after it, and `f_{i+1} ≤ d·f_i`.
///
/// Increments come from a generator function, so every consumer gets its
/// own independent stream.
#[derive(Clone)]
pub struct CgFunction {
    label: String,
    increment: IncrementFn,
    cutoff: Option<usize>,
    ratio: Ratio<u64>,
}

impl fmt::Debug for CgFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CgFunction")
            .field("label", &self.label)
            .field("cutoff", &self.cutoff)
            .field("ratio", &self.ratio)
            .finish()
    }
}

impl CgFunction {
    /// A custom increment stream. `cutoff` is the last level with a
    /// positive increment (`None` for unbounded).
    pub fn from_fn<F>(label: impl Into<String>, cutoff: Option<usize>, ratio: Ratio<u64>, f: F) -> Result<Self>
    where
        F: Fn(usize) -> u64 + Send + Sync + 'static,
    {
        if *ratio.numer() == 0 {
            return Err(Error::InvalidGrowthFunction("ratio bound must be positive".into()));
        }
        Ok(CgFunction {
            label: label.into(),
            increment: Arc::new(f),
            cutoff,
            ratio,
        })
    }

    pub fn family(kind: Family) -> Result<Self> {
        let label = kind.to_string();
        match kind {
            Family::Polynomial(k) => {
                if k == 0 || k > 16 {
                    return Err(Error::InvalidGrowthFunction(format!("polynomial degree {k} out of range 1..=16")));
                }
                let d = (1u64 << k) - 1;
                CgFunction::from_fn(label, None, Ratio::from_integer(d), move |i| {
                    let hi = (i as u64 + 1).checked_pow(k);
                    let lo = (i as u64).checked_pow(k);
                    match (hi, lo) {
                        (Some(h), Some(l)) => h - l,
                        _ => u64::MAX,
                    }
                })
            }
            Family::Exponential(base) => {
                if base < 2 {
                    return Err(Error::InvalidGrowthFunction(format!("exponential base {base} must be at least 2")));
                }
                CgFunction::from_fn(label, None, Ratio::from_integer(base), move |i| {
                    base.checked_pow(i as u32).unwrap_or(u64::MAX)
                })
            }
            Family::Intermediate(beta) => {
                if !(beta > 0.0 && beta < 1.0) {
                    return Err(Error::InvalidGrowthFunction(format!("intermediate exponent {beta} not in (0, 1)")));
                }
                // exp((i+1)^β − i^β) < e for i ≥ 1, and x_i ≥ e there, so
                // rounding keeps the ratio below 4; f_1/f_0 = 3.
                CgFunction::from_fn(label, None, Ratio::from_integer(4), move |i| {
                    let x = (i as f64).powf(beta).exp().round();
                    if x >= u64::MAX as f64 {
                        u64::MAX
                    } else {
                        x as u64
                    }
                })
            }
            Family::Finite(limit) => {
                if limit == 0 {
                    return Err(Error::InvalidGrowthFunction("finite limit must be at least 1".into()));
                }
                let r = (limit - 1) as usize;
                CgFunction::from_fn(label, Some(r), Ratio::from_integer(1), move |i| u64::from(i <= r))
            }
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn increment(&self, i: usize) -> u64 {
        (self.increment)(i)
    }

    /// A fresh, unbounded stream of increments.
    pub fn increments(&self) -> impl Iterator<Item = u64> + '_ {
        (0..).map(move |i| self.increment(i))
    }

    /// Last level with a positive increment, `None` when unbounded.
    pub fn cutoff(&self) -> Option<usize> {
        self.cutoff
    }

    pub fn is_bounded(&self) -> bool {
        self.cutoff.is_some()
    }

    pub fn ratio_bound(&self) -> Ratio<u64> {
        self.ratio
    }

    /// `α(r)` for bounded functions.
    pub fn limit(&self) -> Option<u64> {
        self.cutoff.map(|r| (0..=r).map(|i| self.increment(i)).sum())
    }

    /// Least positive `c` with `2^c ≥ d`.
    pub fn cap_c(&self) -> u32 {
        let mut c = 1;
        while Ratio::from_integer(1u64 << c) < self.ratio {
            c += 1;
        }
        c
    }

    /// Checks the class invariants on `f_0..=f_n`, reporting the first
    /// offending index.
    pub fn validate_prefix(&self, n: usize) -> Result<()> {
        let fail = |i: usize, what: &str| {
            Err(Error::InvalidGrowthFunction(format!("{} at index {i}: {what}", self.label)))
        };
        if self.increment(0) != 1 {
            return fail(0, "f_0 must be 1");
        }
        let (num, den) = (*self.ratio.numer() as u128, *self.ratio.denom() as u128);
        let mut prev = 1u64;
        for i in 1..=n {
            let f = self.increment(i);
            let live = self.cutoff.is_none_or(|r| i <= r);
            if live && f == 0 {
                return fail(i, "increment vanishes before the cutoff");
            }
            if !live && f != 0 {
                return fail(i, "increment nonzero after the cutoff");
            }
            if f as u128 * den > num * prev as u128 {
                return fail(i, "ratio bound exceeded");
            }
            prev = f;
        }
        Ok(())
    }

    pub fn partial_sums(&self, n: usize) -> Result<GrowthTable> {
        self.validate_prefix(n)?;
        let incs: Vec<u64> = self.increments().take(n + 1).collect();
        GrowthTable::from_increments(&incs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(v: &[u64]) -> GrowthTable {
        GrowthTable::new(v.to_vec()).unwrap()
    }

    fn closed(n: usize, f: impl Fn(u64) -> u64) -> GrowthTable {
        table(&(0..=n as u64).map(f).collect::<Vec<_>>())
    }

    #[test]
    fn partial_sums_examples() {
        let two = CgFunction::family(Family::Finite(2)).unwrap();
        assert_eq!(two.partial_sums(3).unwrap().values(), &[1, 2, 2, 2]);
        let exp = CgFunction::family(Family::Exponential(2)).unwrap();
        assert_eq!(exp.partial_sums(3).unwrap().values(), &[1, 3, 7, 15]);
        let lin = CgFunction::family(Family::Polynomial(1)).unwrap();
        assert_eq!(lin.partial_sums(4).unwrap().values(), &[1, 2, 3, 4, 5]);
        let sq = CgFunction::family(Family::Polynomial(2)).unwrap();
        assert_eq!(sq.partial_sums(4).unwrap().values(), &[1, 4, 9, 16, 25]);
    }

    #[test]
    fn validator_reports_offending_index() {
        let bad = CgFunction::from_fn("bad", None, Ratio::from_integer(2), |i| if i == 3 { 9 } else { 1 << i.min(2) })
            .unwrap();
        let err = bad.partial_sums(5).unwrap_err().to_string();
        assert!(err.contains("index 3"), "{err}");
        let hole = CgFunction::from_fn("hole", None, Ratio::from_integer(2), |i| u64::from(i != 2)).unwrap();
        assert!(hole.validate_prefix(4).unwrap_err().to_string().contains("index 2"));
        let start = CgFunction::from_fn("start", None, Ratio::from_integer(2), |_| 2).unwrap();
        assert!(start.validate_prefix(1).is_err());
    }

    #[test]
    fn preorder_examples() {
        let lin = closed(30, |n| n + 1);
        let exp = closed(30, |n| (1 << (n + 1)) - 1);
        assert!(preorder_witness(&lin, &lin, 1).unwrap());
        assert!(preorder_witness(&lin, &exp, 1).unwrap());
        assert!(!preorder_witness(&exp, &lin, 3).unwrap());
        // first failure at n = 3: 15 > 10
        let short = GrowthTable::new(exp.values()[..3].to_vec()).unwrap();
        assert!(preorder_witness(&short, &lin, 3).unwrap());
        let short = GrowthTable::new(exp.values()[..4].to_vec()).unwrap();
        assert!(!preorder_witness(&short, &lin, 3).unwrap());
        assert!(preorder_witness(&lin, &lin, 0).is_err());
    }

    #[test]
    fn equivalence_examples() {
        let t = closed(20, |n| n * n + 1);
        assert!(equivalence_witness(&t, &t, 1).unwrap());
        let odd = closed(40, |n| 2 * n + 1);
        let lin = closed(40, |n| n + 1);
        assert!(equivalence_witness(&odd, &lin, 2).unwrap());
        assert!(!equivalence_witness(&odd, &lin, 1).unwrap());
        let pow3 = closed(60, |n| 3u64.saturating_pow(n as u32));
        let sq = closed(60, |n| n * n);
        for c in 1..=10 {
            assert!(!equivalence_witness(&pow3, &sq, c).unwrap());
        }
        assert!(strict_witness(&sq, &pow3, 10).unwrap());
        assert!(!strict_witness(&odd, &lin, 4).unwrap());
    }

    #[test]
    fn preorder_is_monotone_in_constant() {
        let tables = [
            closed(24, |n| n + 1),
            closed(24, |n| (n + 1) * (n + 1)),
            closed(24, |n| (1 << (n + 1)) - 1),
            closed(24, |n| 2 * n + 1),
        ];
        for g1 in &tables {
            assert!(preorder_witness(g1, g1, 1).unwrap());
            for g2 in &tables {
                let mut seen = false;
                for c in 1..=6 {
                    let holds = preorder_witness(g1, g2, c).unwrap();
                    assert!(!seen || holds, "witness lost when growing the constant");
                    seen |= holds;
                }
            }
        }
    }

    #[test]
    fn families() {
        let lin = CgFunction::family(Family::Polynomial(1)).unwrap();
        assert_eq!(lin.increments().take(5).collect::<Vec<_>>(), vec![1; 5]);
        assert_eq!(lin.cap_c(), 1);
        let exp = CgFunction::family(Family::Exponential(2)).unwrap();
        assert_eq!(exp.increments().take(4).collect::<Vec<_>>(), vec![1, 2, 4, 8]);
        assert_eq!(CgFunction::family(Family::Exponential(5)).unwrap().cap_c(), 3);
        let inter = CgFunction::family(Family::Intermediate(0.5)).unwrap();
        inter.validate_prefix(400).unwrap();
        let t = inter.partial_sums(40).unwrap();
        assert_eq!(t.at(0), 1);
        // superpolynomial against n², subexponential against 2^n
        let sq = closed(40, |n| (n + 1) * (n + 1));
        assert!(!preorder_witness(&t, &sq, 1).unwrap());
        let exp_t = exp.partial_sums(40).unwrap();
        assert!(strict_witness(&t, &exp_t, 2).unwrap());
        assert!(CgFunction::family(Family::Intermediate(1.5)).is_err());
        assert!(CgFunction::family(Family::Exponential(1)).is_err());
        assert!(CgFunction::family(Family::Finite(0)).is_err());
    }

    #[test]
    fn finite_family_is_constant_after_cutoff() {
        let f = CgFunction::family(Family::Finite(4)).unwrap();
        assert_eq!(f.cutoff(), Some(3));
        assert_eq!(f.limit(), Some(4));
        let t = f.partial_sums(8).unwrap();
        assert_eq!(t.values(), &[1, 2, 3, 4, 4, 4, 4, 4, 4]);
    }

    #[test]
    fn every_family_validates_and_is_strictly_increasing() {
        for fam in [
            Family::Polynomial(1),
            Family::Polynomial(3),
            Family::Exponential(3),
            Family::Intermediate(0.3),
            Family::Intermediate(0.9),
        ] {
            let f = CgFunction::family(fam).unwrap();
            let t = f.partial_sums(30).unwrap();
            assert!(t.values().windows(2).all(|p| p[0] < p[1]), "{fam}");
        }
    }

    #[test]
    fn family_parsing() {
        assert_eq!("poly:2".parse::<Family>().unwrap(), Family::Polynomial(2));
        assert_eq!("exp:2".parse::<Family>().unwrap(), Family::Exponential(2));
        assert_eq!("inter:1/2".parse::<Family>().unwrap(), Family::Intermediate(0.5));
        assert_eq!("finite:3".parse::<Family>().unwrap(), Family::Finite(3));
        assert!("poly".parse::<Family>().is_err());
        assert!("cubic:3".parse::<Family>().is_err());
    }

    #[test]
    fn table_emission() {
        let t = table(&[1, 3, 9]);
        assert_eq!(t.to_csv(), "n,value,increment\n0,1,1\n1,3,2\n2,9,6\n");
        assert_eq!(t.to_json(), r#"{"horizon":2,"values":[1,3,9]}"#);
        assert!(GrowthTable::new(vec![2, 1]).is_err());
    }
}
