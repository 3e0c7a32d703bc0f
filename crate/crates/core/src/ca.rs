//! Elementary cellular automata: rules, rule vectors, stepping and histories.

use std::fmt;

use serde::Serialize;

use crate::bits::{BitVector, StateVector};
use crate::error::{Error, Result};

/// A Wolfram rule: output for (λ, ω, ρ) is bit `4λ + 2ω + ρ` of the number.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize)]
pub struct Rule(pub u8);

/// Properties of a rule found by checking all eight neighborhoods.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct RuleClass {
    pub linear: bool,
    pub affine: bool,
    pub left_toggle: bool,
    pub right_toggle: bool,
    /// Number of inputs the output actually depends on.
    pub arity: u8,
}

#[inline]
pub fn apply_rule(rule: Rule, l: bool, w: bool, r: bool) -> bool {
    rule.apply(l, w, r)
}

pub fn classify_rule(rule: Rule) -> RuleClass {
    rule.classify()
}

impl Rule {
    pub const fn number(self) -> u8 {
        self.0
    }

    #[inline]
    pub fn apply(self, l: bool, w: bool, r: bool) -> bool {
        (self.0 >> ((l as u8) << 2 | (w as u8) << 1 | r as u8)) & 1 == 1
    }

    #[inline]
    pub fn apply_index(self, x: u8) -> bool {
        (self.0 >> (x & 7)) & 1 == 1
    }

    /// Flipping λ always flips the output.
    pub fn is_left_toggle(self) -> bool {
        (0..4u8).all(|x| self.apply_index(x) != self.apply_index(x | 4))
    }

    /// Flipping ρ always flips the output.
    pub fn is_right_toggle(self) -> bool {
        (0..8u8).step_by(2).all(|x| self.apply_index(x) != self.apply_index(x | 1))
    }

    pub fn depends_on(self, bit: u8) -> bool {
        (0..8u8).any(|x| self.apply_index(x) != self.apply_index(x ^ bit))
    }

    /// The (a, b, c, d) with f = aλ ⊕ bω ⊕ cρ ⊕ d, if the rule is affine.
    pub fn affine_form(self) -> Option<[bool; 4]> {
        let d = self.apply_index(0);
        let a = self.apply_index(4) != d;
        let b = self.apply_index(2) != d;
        let c = self.apply_index(1) != d;
        let ok = (0..8u8).all(|x| {
            let v = (a && x & 4 != 0) ^ (b && x & 2 != 0) ^ (c && x & 1 != 0) ^ d;
            v == self.apply_index(x)
        });
        ok.then_some([a, b, c, d])
    }

    pub fn classify(self) -> RuleClass {
        let form = self.affine_form();
        RuleClass {
            linear: matches!(form, Some([_, _, _, false])),
            affine: form.is_some(),
            left_toggle: self.is_left_toggle(),
            right_toggle: self.is_right_toggle(),
            arity: [4u8, 2, 1].iter().filter(|&&b| self.depends_on(b)).count() as u8,
        }
    }

    /// Evaluates the rule on 64 neighborhoods at once.
    #[inline]
    pub fn eval_words(self, l: u64, w: u64, r: u64) -> u64 {
        let mut acc = 0u64;
        for x in 0..8u8 {
            if self.apply_index(x) {
                let a = if x & 4 != 0 { l } else { !l };
                let b = if x & 2 != 0 { w } else { !w };
                let c = if x & 1 != 0 { r } else { !r };
                acc |= a & b & c;
            }
        }
        acc
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, Serialize)]
pub enum Boundary {
    #[default]
    Cyclic,
    /// Cells beyond the ends read a constant 0.
    Null,
}

impl std::str::FromStr for Boundary {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cyclic" => Ok(Boundary::Cyclic),
            "null" => Ok(Boundary::Null),
            _ => Err(Error::Parse(format!("unknown boundary {s:?}"))),
        }
    }
}

/// Per-cell rule assignment.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RuleVector {
    rules: Vec<Rule>,
}

impl RuleVector {
    pub fn new(rules: Vec<Rule>) -> Result<Self> {
        if rules.len() < 3 {
            return Err(Error::Precondition(format!("rule vector needs at least 3 cells, got {}", rules.len())));
        }
        Ok(RuleVector { rules })
    }

    pub fn uniform(rule: Rule, n: usize) -> Result<Self> {
        RuleVector::new(vec![rule; n])
    }

    pub fn from_numbers(nums: &[u8]) -> Result<Self> {
        RuleVector::new(nums.iter().map(|&r| Rule(r)).collect())
    }

    /// Parses `30` (uniform, needs `n`), `90,150,90` or the repetition form `90x8,150`.
    pub fn parse(s: &str, n: Option<usize>) -> Result<Self> {
        let mut rules = Vec::new();
        for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (num, rep) = match item.split_once(['x', '*']) {
                Some((a, b)) => (a, b.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad repeat count in {item:?}")))?),
                None => (item, 1),
            };
            let r: u8 = num.trim().parse().map_err(|_| Error::Parse(format!("bad rule number {num:?}")))?;
            rules.extend(std::iter::repeat_n(Rule(r), rep));
        }
        match (rules.len(), n) {
            (0, _) => Err(Error::Parse("empty rule list".into())),
            (1, Some(n)) => RuleVector::uniform(rules[0], n),
            (len, Some(n)) if len != n => Err(Error::LengthMismatch { expected: n, got: len }),
            _ => RuleVector::new(rules),
        }
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn get(&self, i: usize) -> Rule {
        self.rules[i]
    }

    pub fn is_uniform(&self) -> bool {
        self.rules.windows(2).all(|w| w[0] == w[1])
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.rules.len();
        (0..n / 2).all(|i| self.rules[i] == self.rules[n - 1 - i])
    }

    pub fn uniform_rule(&self) -> Option<Rule> {
        self.is_uniform().then(|| self.rules[0])
    }
}

impl fmt::Display for RuleVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.rules.iter().map(|r| r.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

/// Index of the center cell used for temporal sequences (cell ⌈n/2⌉ counting from 1).
pub fn center(n: usize) -> usize {
    (n - 1) / 2
}

pub fn step(f: &RuleVector, s: &StateVector, b: Boundary) -> Result<StateVector> {
    if f.len() != s.len() {
        return Err(Error::LengthMismatch { expected: f.len(), got: s.len() });
    }
    Ok(step_unchecked(f, s, b))
}

fn step_unchecked(f: &RuleVector, s: &StateVector, b: Boundary) -> StateVector {
    let wrap = b == Boundary::Cyclic;
    let l = s.left_neighbors(wrap);
    let r = s.right_neighbors(wrap);
    if let Some(rule) = f.uniform_rule() {
        let words = l
            .words()
            .iter()
            .zip(s.words())
            .zip(r.words())
            .map(|((&a, &w), &c)| rule.eval_words(a, w, c))
            .collect();
        return BitVector::from_words(s.len(), words);
    }
    (0..s.len()).map(|i| f.get(i).apply(l.get(i), s.get(i), r.get(i))).collect()
}

/// History of `t + 1` states, starting with `s`.
pub fn evolve(f: &RuleVector, s: &StateVector, b: Boundary, t: usize) -> Result<Vec<StateVector>> {
    if f.len() != s.len() {
        return Err(Error::LengthMismatch { expected: f.len(), got: s.len() });
    }
    let mut hist = Vec::with_capacity(t + 1);
    hist.push(s.clone());
    for k in 0..t {
        let next = step_unchecked(f, &hist[k], b);
        hist.push(next);
    }
    Ok(hist)
}

/// Outputs of one cell over consecutive time steps.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TemporalSequence {
    pub cell: usize,
    pub bits: BitVector,
}

pub fn temporal_sequence(f: &RuleVector, seed: &StateVector, cell: usize, len: usize, b: Boundary) -> Result<TemporalSequence> {
    if f.len() != seed.len() {
        return Err(Error::LengthMismatch { expected: f.len(), got: seed.len() });
    }
    if cell >= f.len() {
        return Err(Error::IndexOutOfRange { index: cell, len: f.len() });
    }
    if len == 0 {
        return Err(Error::Precondition("sequence length must be at least 1".into()));
    }
    let mut s = seed.clone();
    let mut bits = BitVector::zeros(0);
    bits.push(s.get(cell));
    for _ in 1..len {
        s = step_unchecked(f, &s, b);
        bits.push(s.get(cell));
    }
    Ok(TemporalSequence { cell, bits })
}

/// Word-level stepper for n ≤ 64, used by the exhaustive searches.
///
/// States are codes with cell 0 as the most significant of the n bits (see
/// [`BitVector::from_code`]).
#[derive(Clone, Debug)]
pub struct CodeStepper {
    n: u32,
    mask: u64,
    wrap: bool,
    groups: Vec<(Rule, u64)>,
}

impl CodeStepper {
    pub fn new(f: &RuleVector, b: Boundary) -> Result<Self> {
        let n = f.len();
        if n > 64 {
            return Err(Error::BoundExceeded { what: "cells", value: n, limit: 64 });
        }
        let mut groups: Vec<(Rule, u64)> = Vec::new();
        for (i, &r) in f.rules().iter().enumerate() {
            let bit = 1u64 << (n - 1 - i);
            match groups.iter_mut().find(|(g, _)| *g == r) {
                Some((_, m)) => *m |= bit,
                None => groups.push((r, bit)),
            }
        }
        let mask = if n == 64 { !0 } else { (1u64 << n) - 1 };
        Ok(CodeStepper { n: n as u32, mask, wrap: b == Boundary::Cyclic, groups })
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn step(&self, x: u64) -> u64 {
        let n = self.n;
        // cell i sits at bit n-1-i, so its left neighbor is one bit higher
        let (l, r) = if self.wrap {
            ((x >> 1) | ((x & 1) << (n - 1)), ((x << 1) | (x >> (n - 1))) & self.mask)
        } else {
            (x >> 1, (x << 1) & self.mask)
        };
        let mut out = 0;
        for &(rule, m) in &self.groups {
            out |= rule.eval_words(l, x, r) & m;
        }
        out & self.mask
    }

    /// Value of cell `cell` over `len` steps, packed with t = 0 as the most significant bit.
    pub fn sequence_code(&self, mut x: u64, cell: usize, len: usize) -> u64 {
        let shift = self.n as usize - 1 - cell;
        let mut out = 0u64;
        for t in 0..len {
            if t > 0 {
                x = self.step(x);
            }
            out = (out << 1) | ((x >> shift) & 1);
        }
        out
    }
}
