//! Dense GF(2) matrices (n ≤ 64) and the affine model S' = M·S ⊕ b of an
//! affine rule vector.

use std::fmt;

use crate::bits::{BitVector, StateVector};
use crate::ca::RuleVector;
use crate::error::{Error, Result};

/// Square matrix over GF(2); bit j of `rows[i]` is entry (i, j).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Gf2Matrix {
    n: usize,
    rows: Vec<u64>,
}

impl Gf2Matrix {
    pub fn zero(n: usize) -> Self {
        assert!(n <= 64, "matrices are limited to 64 columns");
        Gf2Matrix { n, rows: vec![0; n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Gf2Matrix::zero(n);
        for i in 0..n {
            m.rows[i] = 1 << i;
        }
        m
    }

    pub fn from_rows(rows: &[&str]) -> Result<Self> {
        let n = rows.len();
        let mut m = Gf2Matrix::zero(n);
        for (i, r) in rows.iter().enumerate() {
            let bits = BitVector::parse_bits(r)?;
            if bits.len() != n {
                return Err(Error::LengthMismatch { expected: n, got: bits.len() });
            }
            m.rows[i] = bits.words().first().copied().unwrap_or(0);
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        (self.rows[i] >> j) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        if v {
            self.rows[i] |= 1 << j;
        } else {
            self.rows[i] &= !(1 << j);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|&r| r == 0)
    }

    pub fn add(&self, other: &Gf2Matrix) -> Gf2Matrix {
        assert_eq!(self.n, other.n);
        Gf2Matrix { n: self.n, rows: self.rows.iter().zip(&other.rows).map(|(a, b)| a ^ b).collect() }
    }

    pub fn mul(&self, other: &Gf2Matrix) -> Gf2Matrix {
        assert_eq!(self.n, other.n);
        let rows = self
            .rows
            .iter()
            .map(|&r| {
                let mut acc = 0u64;
                let mut bits = r;
                while bits != 0 {
                    let k = bits.trailing_zeros() as usize;
                    acc ^= other.rows[k];
                    bits &= bits - 1;
                }
                acc
            })
            .collect();
        Gf2Matrix { n: self.n, rows }
    }

    /// M·x for a column vector packed with cell j at bit j.
    #[inline]
    pub fn mul_word(&self, x: u64) -> u64 {
        let mut out = 0u64;
        for (i, &r) in self.rows.iter().enumerate() {
            out |= (((r & x).count_ones() & 1) as u64) << i;
        }
        out
    }

    pub fn mul_vec(&self, s: &StateVector) -> StateVector {
        assert_eq!(s.len(), self.n);
        let x = s.words().first().copied().unwrap_or(0);
        BitVector::from_words(self.n, vec![self.mul_word(x)])
    }

    pub fn pow(&self, mut p: u64) -> Gf2Matrix {
        let mut base = self.clone();
        let mut acc = Gf2Matrix::identity(self.n);
        while p > 0 {
            if p & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            p >>= 1;
        }
        acc
    }

    /// Polynomial in M with coefficient i taken from bit i of `coeffs`.
    pub fn eval_poly(&self, coeffs: &BitVector) -> Gf2Matrix {
        let mut acc = Gf2Matrix::zero(self.n);
        let mut power = Gf2Matrix::identity(self.n);
        for i in 0..coeffs.len() {
            if coeffs.get(i) {
                acc = acc.add(&power);
            }
            power = power.mul(self);
        }
        acc
    }
}

impl fmt::Display for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            let row: String = (0..self.n).map(|j| if self.get(i, j) { '1' } else { '0' }).collect();
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}

/// (M^p, M + M^2 + … + M^p).
pub fn gf2_power_sum(m: &Gf2Matrix, p: u64) -> Result<(Gf2Matrix, Gf2Matrix)> {
    if p == 0 {
        return Err(Error::Precondition("power must be at least 1".into()));
    }
    let mut power = Gf2Matrix::identity(m.n);
    let mut sum = Gf2Matrix::zero(m.n);
    for _ in 0..p {
        power = power.mul(m);
        sum = sum.add(&power);
    }
    Ok((power, sum))
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Gf2AffineMap {
    pub m: Gf2Matrix,
    pub b: StateVector,
}

impl Gf2AffineMap {
    pub fn apply(&self, s: &StateVector) -> StateVector {
        self.m.mul_vec(s).xor(&self.b)
    }
}

/// Matrix model of an affine rule vector under cyclic boundary. Row i holds
/// the weights feeding cell i.
pub fn affine_map_of(f: &RuleVector) -> Result<Gf2AffineMap> {
    let n = f.len();
    if n > 64 {
        return Err(Error::BoundExceeded { what: "cells", value: n, limit: 64 });
    }
    let mut m = Gf2Matrix::zero(n);
    let mut b = BitVector::zeros(n);
    for (i, &rule) in f.rules().iter().enumerate() {
        let [wl, ww, wr, d] = rule.affine_form().ok_or(Error::NotAffine(rule.0))?;
        let (l, r) = ((i + n - 1) % n, (i + 1) % n);
        if wl {
            m.rows[i] ^= 1 << l;
        }
        if ww {
            m.rows[i] ^= 1 << i;
        }
        if wr {
            m.rows[i] ^= 1 << r;
        }
        b.set(i, d);
    }
    Ok(Gf2AffineMap { m, b })
}

/// Minimal polynomial of M (coefficient i at bit i), by finding the first
/// linear dependency among I, M, M², ….
pub fn minimal_polynomial(m: &Gf2Matrix) -> BitVector {
    let n = m.n;
    // each power flattened to n*n bits; reduced rows carry the combination that produced them
    let mut basis: Vec<(Vec<u64>, BitVector)> = Vec::new();
    let mut power = Gf2Matrix::identity(n);
    for k in 0..=n {
        let mut v = power.rows.clone();
        let mut combo = BitVector::zeros(n + 1);
        combo.set(k, true);
        for (bv, bc) in &basis {
            let pivot = leading(bv);
            if let Some((w, bit)) = pivot {
                if (v[w] >> bit) & 1 == 1 {
                    for (a, b) in v.iter_mut().zip(bv) {
                        *a ^= b;
                    }
                    combo = combo.xor(bc);
                }
            }
        }
        if v.iter().all(|&w| w == 0) {
            return combo.slice(0, k + 1);
        }
        basis.push((v, combo));
        basis.sort_by_key(|(v, _)| std::cmp::Reverse(leading(v)));
        power = power.mul(m);
    }
    unreachable!("Cayley-Hamilton bounds the degree by n")
}

fn leading(v: &[u64]) -> Option<(usize, u32)> {
    v.iter().enumerate().rev().find(|(_, &w)| w != 0).map(|(i, &w)| (i, 63 - w.leading_zeros()))
}

/// Searches for p with M + M² + … + M^p = 0 by adding shifted copies of the
/// minimal polynomial until the running sum has coefficients 1 exactly at
/// x¹…x^p. Each round aligns a shifted copy with the lowest 0 above the
/// run of low-order 1s. Gives up after `max_rounds`. Any p found is checked
/// directly.
pub fn ones_multiple_search(m: &Gf2Matrix, max_rounds: usize) -> Option<u64> {
    let q = minimal_polynomial(m);
    let mut c: Vec<bool> = q.iter().collect();
    if c[0] {
        c.insert(0, false);
    }
    let low = c.iter().position(|&b| b)?;
    if low != 1 {
        return None;
    }
    let mut sum = c.clone();
    for _ in 0..max_rounds {
        while sum.last() == Some(&false) {
            sum.pop();
        }
        let first_zero = (1..).find(|&i| i >= sum.len() || !sum[i]).unwrap();
        if first_zero >= sum.len() {
            let p = (first_zero - 1) as u64;
            let (_, s) = gf2_power_sum(m, p).ok()?;
            return s.is_zero().then_some(p);
        }
        let shift = first_zero - low;
        if sum.len() < shift + c.len() {
            sum.resize(shift + c.len(), false);
        }
        for (k, &b) in c.iter().enumerate() {
            sum[shift + k] ^= b;
        }
    }
    None
}
