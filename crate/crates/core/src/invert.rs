//! Predecessor computation: toggle-rule inversion, exhaustive search and
//! prior-state tables.

use std::collections::BTreeSet;

use crate::bits::{BitVector, StateVector};
use crate::ca::{Boundary, CodeStepper, Rule, RuleVector};
use crate::error::{Error, Result};

/// Largest n accepted by the exhaustive searches.
pub const EXHAUSTIVE_LIMIT: usize = 24;

/// Duplicate-free set of predecessor states.
pub type PredecessorSet = BTreeSet<StateVector>;

/// Mirror image of a rule: f'(λ, ω, ρ) = f(ρ, ω, λ).
pub fn mirror_rule(rule: Rule) -> Rule {
    let mut out = 0u8;
    for x in 0..8u8 {
        let m = ((x & 1) << 2) | (x & 2) | ((x >> 2) & 1);
        if rule.apply_index(x) {
            out |= 1 << m;
        }
    }
    Rule(out)
}

fn reversed(s: &BitVector) -> BitVector {
    BitVector::from_bools((0..s.len()).rev().map(|i| s.get(i)))
}

/// All predecessors of `s` under a uniform toggle rule with cyclic boundary.
///
/// A left-toggle rule splits as f = λ ⊕ g(ω, ρ); the complement in rules
/// such as 135 and 149 is carried by g. Each of the four guesses for the two
/// cells that wrap around is swept once from the right end, so the cost is
/// linear in n.
pub fn invert_toggle_rule(f: &RuleVector, s: &StateVector) -> Result<PredecessorSet> {
    let rule = f
        .uniform_rule()
        .ok_or_else(|| Error::Precondition("toggle inversion needs a uniform rule vector".into()))?;
    if f.len() != s.len() {
        return Err(Error::LengthMismatch { expected: f.len(), got: s.len() });
    }
    if rule.is_left_toggle() {
        Ok(invert_left_toggle(rule, s))
    } else if rule.is_right_toggle() {
        let mirrored = invert_left_toggle(mirror_rule(rule), &reversed(s));
        Ok(mirrored.iter().map(reversed).collect())
    } else {
        Err(Error::NotToggle(rule.0))
    }
}

fn invert_left_toggle(rule: Rule, s: &StateVector) -> PredecessorSet {
    let n = s.len();
    let g = |w: bool, r: bool| rule.apply(false, w, r);
    let mut out = PredecessorSet::new();
    let mut p = vec![false; n + 1];
    for guess in 0..4u8 {
        // p[n-1] and p[n] (which stands for cell 0) are guessed
        p[n - 1] = guess & 2 != 0;
        p[n] = guess & 1 != 0;
        for i in (1..n).rev() {
            p[i - 1] = s.get(i) ^ g(p[i], p[i + 1]);
        }
        if p[0] == p[n] && p[n - 1] == s.get(0) ^ g(p[0], p[1]) {
            out.insert(BitVector::from_bools(p[..n].iter().copied()));
        }
    }
    out
}

/// Every state whose cyclic successor is `s`, found by enumeration.
pub fn brute_force_predecessors(f: &RuleVector, s: &StateVector) -> Result<PredecessorSet> {
    let n = f.len();
    if n > EXHAUSTIVE_LIMIT {
        return Err(Error::BoundExceeded { what: "cells", value: n, limit: EXHAUSTIVE_LIMIT });
    }
    if s.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: s.len() });
    }
    let stepper = CodeStepper::new(f, Boundary::Cyclic)?;
    let target = s.to_code();
    Ok((0..1u64 << n)
        .filter(|&x| stepper.step(x) == target)
        .map(|x| BitVector::from_code(x, n))
        .collect())
}

/// Number of states having each possible count of predecessors, indexed by count.
pub fn predecessor_histogram(rule: Rule, n: usize) -> Result<Vec<u64>> {
    if n > 20 {
        return Err(Error::BoundExceeded { what: "cells", value: n, limit: 20 });
    }
    let stepper = CodeStepper::new(&RuleVector::uniform(rule, n)?, Boundary::Cyclic)?;
    let mut counts = vec![0u32; 1 << n];
    for x in 0..1u64 << n {
        counts[stepper.step(x) as usize] += 1;
    }
    let mut hist = vec![0u64; 1];
    for &c in &counts {
        let c = c as usize;
        if c >= hist.len() {
            hist.resize(c + 1, 0);
        }
        hist[c] += 1;
    }
    Ok(hist)
}

/// One row of a prior-state table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PriorRow {
    pub pattern: BitVector,
    /// Predecessor windows in ascending order.
    pub preds: Vec<BitVector>,
    /// How many predecessors have a 1 at each window position.
    pub ones: Vec<usize>,
}

impl PriorRow {
    /// Window positions that hold the same value in every predecessor.
    pub fn fixed(&self) -> Vec<(usize, bool)> {
        if self.preds.is_empty() {
            return Vec::new();
        }
        let m = self.preds.len();
        self.ones
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == 0 || c == m)
            .map(|(i, &c)| (i, c == m))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PriorTable {
    pub width: usize,
    pub rows: Vec<PriorRow>,
}

impl PriorTable {
    pub fn row(&self, pattern: &str) -> Option<&PriorRow> {
        self.rows.iter().find(|r| r.pattern.to_string() == pattern)
    }

    /// CSV with columns pattern, predecessors, ones.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("pattern,predecessors,ones\n");
        for r in &self.rows {
            let preds: Vec<String> = r.preds.iter().map(|p| p.to_string()).collect();
            let ones: Vec<String> = r.ones.iter().map(|c| c.to_string()).collect();
            out.push_str(&format!("{},{},\"[{}]\"\n", r.pattern, preds.join(" "), ones.join(", ")));
        }
        out
    }
}

/// Prior table where output position k of the window uses `rules[k]`.
pub fn prior_table_rules(rules: &[Rule]) -> Result<PriorTable> {
    let w = rules.len();
    if w == 0 || w + 2 > EXHAUSTIVE_LIMIT {
        return Err(Error::BoundExceeded { what: "window width", value: w + 2, limit: EXHAUSTIVE_LIMIT });
    }
    let pw = w + 2;
    let mut buckets: Vec<Vec<u64>> = vec![Vec::new(); 1 << w];
    for p in 0..1u64 << pw {
        let bit = |k: usize| (p >> (pw - 1 - k)) & 1 == 1;
        let mut out = 0u64;
        for (k, rule) in rules.iter().enumerate() {
            out = (out << 1) | rule.apply(bit(k), bit(k + 1), bit(k + 2)) as u64;
        }
        buckets[out as usize].push(p);
    }
    let rows = buckets
        .into_iter()
        .enumerate()
        .map(|(pat, preds)| {
            let preds: Vec<BitVector> = preds.into_iter().map(|p| BitVector::from_code(p, pw)).collect();
            let ones = (0..pw).map(|k| preds.iter().filter(|p| p.get(k)).count()).collect();
            PriorRow { pattern: BitVector::from_code(pat as u64, w), preds, ones }
        })
        .collect();
    Ok(PriorTable { width: w, rows })
}

/// Prior table for a uniform rule and pattern width `w`.
pub fn prior_table(rule: Rule, w: usize) -> Result<PriorTable> {
    prior_table_rules(&vec![rule; w])
}

/// The single rule-30 predecessor of a state containing `010` cyclically.
///
/// The cell two to the left of the `1` is forced to 1, which fixes two
/// adjacent predecessor cells; the rest follows from the left-toggle identity.
pub fn unique_predecessor_from_010(s: &StateVector) -> Result<StateVector> {
    let n = s.len();
    if n < 3 {
        return Err(Error::Precondition("state needs at least 3 cells".into()));
    }
    let at = |i: isize| s.get(i.rem_euclid(n as isize) as usize);
    let i = (0..n as isize)
        .find(|&i| !at(i - 1) && at(i) && !at(i + 1))
        .ok_or(Error::PatternAbsent("010"))?;
    let idx = |k: isize| k.rem_euclid(n as isize) as usize;
    let mut p = vec![false; n];
    p[idx(i - 2)] = true;
    p[idx(i - 3)] = !at(i - 2);
    // s[k] = p[k-1] ^ (p[k] | p[k+1])  =>  p[k-1] = s[k] ^ (p[k] | p[k+1])
    for step in 4..n as isize + 1 {
        let k = i - step + 1;
        p[idx(k - 1)] = at(k) ^ (p[idx(k)] | p[idx(k + 1)]);
    }
    let pred = BitVector::from_bools(p);
    let f = RuleVector::uniform(Rule(30), n)?;
    if crate::ca::step(&f, &pred, Boundary::Cyclic)? != *s {
        return Err(Error::NoPredecessor);
    }
    Ok(pred)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bv(s: &str) -> BitVector {
        BitVector::parse_bits(s).unwrap()
    }

    #[test]
    fn identity_like_rules() {
        let f = RuleVector::uniform(Rule(240), 4).unwrap();
        let preds = invert_toggle_rule(&f, &bv("0110")).unwrap();
        assert_eq!(preds.into_iter().collect::<Vec<_>>(), vec![bv("1100")]);
        assert_eq!(predecessor_histogram(Rule(204), 8).unwrap(), vec![0, 256]);
    }

    #[test]
    fn rejects_non_toggle() {
        let f = RuleVector::uniform(Rule(110), 6).unwrap();
        assert_eq!(invert_toggle_rule(&f, &bv("010101")), Err(Error::NotToggle(110)));
    }

    #[test]
    fn brute_force_trivia() {
        let f = RuleVector::uniform(Rule(0), 5).unwrap();
        assert_eq!(brute_force_predecessors(&f, &bv("00000")).unwrap().len(), 32);
        assert!(brute_force_predecessors(&f, &bv("00100")).unwrap().is_empty());
    }

    #[test]
    fn rule30_histograms() {
        assert_eq!(predecessor_histogram(Rule(30), 6).unwrap(), vec![12, 41, 10, 1]);
        let h9 = predecessor_histogram(Rule(30), 9).unwrap();
        assert_eq!(h9, vec![57, 399, 55, 1]);
        let images: u64 = h9.iter().enumerate().map(|(k, &c)| k as u64 * c).sum();
        assert_eq!(images, 512);
    }

    #[test]
    fn rule30_prior_row_010() {
        let t = prior_table(Rule(30), 3).unwrap();
        let row = t.row("010").unwrap();
        let preds: Vec<String> = row.preds.iter().map(|p| p.to_string()).collect();
        assert_eq!(preds, ["10101", "10110", "10111", "11000"]);
        assert_eq!(row.ones, [4, 1, 3, 2, 2]);
        assert_eq!(row.fixed(), vec![(0, true)]);
    }

    #[test]
    fn mirror_is_involution() {
        for r in 0..=255u8 {
            assert_eq!(mirror_rule(mirror_rule(Rule(r))), Rule(r));
        }
        assert_eq!(mirror_rule(Rule(30)), Rule(86));
    }

    #[test]
    fn from_010_pattern() {
        assert_eq!(unique_predecessor_from_010(&bv("0000000")), Err(Error::PatternAbsent("010")));
        let f = RuleVector::uniform(Rule(30), 8).unwrap();
        let p = bv("10011010");
        let s = crate::ca::step(&f, &p, Boundary::Cyclic).unwrap();
        let got = unique_predecessor_from_010(&s).unwrap();
        assert_eq!(crate::ca::step(&f, &got, Boundary::Cyclic).unwrap(), s);
    }
}
