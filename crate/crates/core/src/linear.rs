//! Period and sequence analysis of (mostly affine) rule vectors by
//! exhaustive search over the state space.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::bits::{BitVector, StateVector};
use crate::ca::{center, Boundary, CodeStepper, Rule, RuleVector};
use crate::error::{Error, Result};
use crate::invert::prior_table_rules;

/// Largest n for the whole-state-space operations here.
pub const STATE_SPACE_LIMIT: usize = 24;

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct PeriodReport {
    /// Steps before the orbit enters its cycle.
    pub tail: u64,
    pub period: u64,
    /// First state on the cycle.
    pub entry: StateVector,
}

fn check_space(n: usize, limit: usize) -> Result<()> {
    if n > limit {
        return Err(Error::BoundExceeded { what: "cells", value: n, limit });
    }
    Ok(())
}

/// Tail and cycle length of the orbit of `seed` (Brent's algorithm).
pub fn eventual_period(f: &RuleVector, seed: &StateVector) -> Result<PeriodReport> {
    check_space(f.len(), 64)?;
    if seed.len() != f.len() {
        return Err(Error::LengthMismatch { expected: f.len(), got: seed.len() });
    }
    let st = CodeStepper::new(f, Boundary::Cyclic)?;
    let x0 = seed.to_code();
    let (mut power, mut lam) = (1u64, 1u64);
    let mut tortoise = x0;
    let mut hare = st.step(x0);
    while tortoise != hare {
        if power == lam {
            tortoise = hare;
            power *= 2;
            lam = 0;
        }
        hare = st.step(hare);
        lam += 1;
    }
    let (mut t, mut h) = (x0, x0);
    for _ in 0..lam {
        h = st.step(h);
    }
    let mut mu = 0u64;
    while t != h {
        t = st.step(t);
        h = st.step(h);
        mu += 1;
    }
    Ok(PeriodReport { tail: mu, period: lam, entry: BitVector::from_code(t, f.len()) })
}

/// Cycle structure of the whole state space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitSummary {
    /// Longest cycle reachable from any seed.
    pub max_period: u64,
    /// Longest cycle reachable from a nonzero seed, with the all-zero fixed
    /// point counted as 0 (the census convention).
    pub census_period: u64,
}

/// Cycle lengths over all 2^n seeds, by walking the functional graph once.
pub fn orbit_summary(f: &RuleVector) -> Result<OrbitSummary> {
    let n = f.len();
    check_space(n, STATE_SPACE_LIMIT)?;
    let st = CodeStepper::new(f, Boundary::Cyclic)?;
    let size = 1usize << n;
    // 0 = unvisited; otherwise the walk id that first reached the state
    let mut mark = vec![0u32; size];
    let mut reach = vec![0u64; size];
    let mut max_period = 0;
    let mut census_period = 0;
    let mut path = Vec::new();
    for start in 0..size {
        if mark[start] != 0 {
            continue;
        }
        let id = start as u32 + 1;
        path.clear();
        let mut x = start;
        while mark[x] == 0 {
            mark[x] = id;
            path.push(x);
            x = st.step(x as u64) as usize;
        }
        // `reach[x]` is the census value of the cycle this walk drains into
        let value = if mark[x] == id {
            // new cycle found; its members are the tail of `path` from x
            let len = (path.len() - path.iter().position(|&p| p == x).unwrap()) as u64;
            max_period = max_period.max(len);
            if x == 0 && len == 1 {
                0
            } else {
                len
            }
        } else {
            reach[x]
        };
        for &p in &path {
            reach[p] = value;
            if p != 0 {
                census_period = census_period.max(value);
            }
        }
    }
    Ok(OrbitSummary { max_period, census_period })
}

/// Maximum eventual period over all seeds.
pub fn max_period(f: &RuleVector) -> Result<u64> {
    Ok(orbit_summary(f)?.max_period)
}

/// All 2^n rule vectors over two rules, indexed by a mask whose bit (n-1-i)
/// selects `one` for cell i (so the mask printed MSB-first reads cell 0 first).
pub fn rule_vector_from_mask(mask: u64, n: usize, one: Rule, zero: Rule) -> RuleVector {
    let rules = (0..n).map(|i| if (mask >> (n - 1 - i)) & 1 == 1 { one } else { zero }).collect();
    RuleVector::new(rules).expect("n >= 3")
}

/// Largest max-period over every rule vector in `family`^n, with the vector that attains it.
pub fn best_max_period(n: usize, family: &[Rule]) -> Result<(u64, RuleVector)> {
    check_space(n, 16)?;
    let k = family.len();
    let total = (k as u64).checked_pow(n as u32).ok_or(Error::BoundExceeded { what: "rule vectors", value: usize::MAX, limit: 1 << 32 })?;
    let best = (0..total)
        .into_par_iter()
        .map(|idx| {
            let mut v = idx;
            let rules: Vec<Rule> = (0..n)
                .map(|_| {
                    let r = family[(v % k as u64) as usize];
                    v /= k as u64;
                    r
                })
                .collect();
            let f = RuleVector::new(rules).expect("n >= 3");
            (max_period(&f).expect("bounded n"), idx)
        })
        .max_by_key(|&(p, idx)| (p, std::cmp::Reverse(idx)))
        .expect("nonempty family");
    let mut v = best.1;
    let rules = (0..n)
        .map(|_| {
            let r = family[(v % k as u64) as usize];
            v /= k as u64;
            r
        })
        .collect();
    Ok((best.0, RuleVector::new(rules)?))
}

/// Seeds grouped by the center-cell sequence of length `len` they produce.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequenceSeedMap {
    pub n: usize,
    pub len: usize,
    /// Sequence code (t = 0 most significant) to seed codes (cell 0 most significant).
    pub map: BTreeMap<u64, Vec<u64>>,
}

impl SequenceSeedMap {
    pub fn distinct(&self) -> usize {
        self.map.len()
    }

    pub fn seeds_for(&self, sequence: &BitVector) -> Vec<StateVector> {
        self.map
            .get(&sequence.to_code())
            .map(|v| v.iter().map(|&s| BitVector::from_code(s, self.n)).collect())
            .unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (BitVector, Vec<StateVector>)> + '_ {
        self.map.iter().map(move |(&k, v)| {
            (BitVector::from_code(k, self.len), v.iter().map(|&s| BitVector::from_code(s, self.n)).collect())
        })
    }

    /// Number of distinct sequences over nonzero seeds.
    pub fn distinct_nonzero(&self) -> usize {
        self.map.values().filter(|v| v.iter().any(|&s| s != 0)).count()
    }
}

pub fn sequence_seed_map(f: &RuleVector, len: usize) -> Result<SequenceSeedMap> {
    let n = f.len();
    check_space(n, 16)?;
    if len == 0 || len > 64 {
        return Err(Error::Precondition("sequence length must be in 1..=64".into()));
    }
    let st = CodeStepper::new(f, Boundary::Cyclic)?;
    let c = center(n);
    let mut map: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for x in 0..1u64 << n {
        map.entry(st.sequence_code(x, c, len)).or_default().push(x);
    }
    Ok(SequenceSeedMap { n, len, map })
}

/// All seeds producing the same center sequence of length `len` as `seed`, including itself.
pub fn matching_seeds(f: &RuleVector, seed: &StateVector, len: usize) -> Result<Vec<StateVector>> {
    let n = f.len();
    check_space(n, 16)?;
    if seed.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: seed.len() });
    }
    let st = CodeStepper::new(f, Boundary::Cyclic)?;
    let c = center(n);
    let target = st.sequence_code(seed.to_code(), c, len);
    Ok((0..1u64 << n)
        .filter(|&x| st.sequence_code(x, c, len) == target)
        .map(|x| BitVector::from_code(x, n))
        .collect())
}

/// XOR of the first seed of each shared sequence between two maps, keyed by sequence.
pub fn seed_differences(a: &SequenceSeedMap, b: &SequenceSeedMap) -> BTreeMap<u64, StateVector> {
    a.map
        .iter()
        .filter_map(|(k, sa)| b.map.get(k).map(|sb| (*k, BitVector::from_code(sa[0] ^ sb[0], a.n))))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HybridDiffRow {
    pub successor: BitVector,
    pub preds: Vec<BitVector>,
    /// Elementwise XOR with the uniform-150 predecessors of the same successor.
    pub diffs: Vec<BitVector>,
}

/// Five-cell predecessors of every three-cell successor under a rule triple,
/// compared with uniform rule 150.
pub fn hybrid_pred_diffs(triple: [Rule; 3]) -> Result<Vec<HybridDiffRow>> {
    for r in triple {
        if r.affine_form().is_none() {
            return Err(Error::NotAffine(r.0));
        }
    }
    let table = prior_table_rules(&triple)?;
    let base = prior_table_rules(&[Rule(150); 3])?;
    Ok(table
        .rows
        .iter()
        .zip(&base.rows)
        .map(|(row, b)| HybridDiffRow {
            successor: row.pattern.clone(),
            preds: row.preds.clone(),
            diffs: row.preds.iter().zip(&b.preds).map(|(p, q)| p.xor(q)).collect(),
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CensusRow {
    /// Cell i is `1` for rule 150 and `0` for rule 90, cell 0 first.
    pub ruleset: String,
    pub period: u64,
    pub sequences: usize,
}

/// Max period and number of distinct center sequences (length n, nonzero
/// seeds) for every rule vector over {90, 150} whose first two cells are 150.
pub fn ruleset_census(n: usize) -> Result<Vec<CensusRow>> {
    if !(3..=12).contains(&n) {
        return Err(Error::Precondition(format!("census supports 3 <= n <= 12, got {n}")));
    }
    let free = n - 2;
    let rows = (0..1u64 << free)
        .into_par_iter()
        .map(|low| {
            let mask = (0b11 << free) | low;
            let f = rule_vector_from_mask(mask, n, Rule(150), Rule(90));
            let summary = orbit_summary(&f)?;
            let sequences = sequence_seed_map(&f, n)?.distinct_nonzero();
            Ok(CensusRow { ruleset: BitVector::from_code(mask, n).to_string(), period: summary.census_period, sequences })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(rows)
}

pub fn census_csv(rows: &[CensusRow]) -> String {
    let mut out = String::from("ruleset,period,sequences\n");
    for r in rows {
        out.push_str(&format!("{},{},{}\n", r.ruleset, r.period, r.sequences));
    }
    out
}
