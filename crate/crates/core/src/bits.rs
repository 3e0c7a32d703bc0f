//! Bit-packed vectors used for CA values, seeds and temporal sequences.
//!
//! Cell `i` lives in word `i / 64`, bit `i % 64`. Text form is one character
//! per cell with cell 0 leftmost. The "code" form packs up to 64 cells into an
//! integer with cell 0 as the most significant bit, which is how seeds like
//! `417` for a 9-cell CA are written.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

pub type StateVector = BitVector;

fn words_for(len: usize) -> usize {
    len.div_ceil(64)
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        BitVector { len, words: vec![0; words_for(len)] }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = BitVector { len, words: vec![!0; words_for(len)] };
        v.trim();
        v
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut v = BitVector::zeros(0);
        for b in bits {
            v.push(b);
        }
        v
    }

    /// Builds a vector from an integer code, cell 0 = most significant of `len` bits.
    pub fn from_code(code: u64, len: usize) -> Self {
        assert!(len <= 64, "code form holds at most 64 cells");
        let mut v = BitVector::zeros(len);
        for i in 0..len {
            if (code >> (len - 1 - i)) & 1 == 1 {
                v.set(i, true);
            }
        }
        v
    }

    /// Inverse of [`BitVector::from_code`].
    pub fn to_code(&self) -> u64 {
        assert!(self.len <= 64, "code form holds at most 64 cells");
        let mut code = 0u64;
        for b in self.iter() {
            code = (code << 1) | b as u64;
        }
        code
    }

    /// Parses a string of `0`/`1` characters; `_` and whitespace are ignored.
    pub fn parse_bits(s: &str) -> Result<Self> {
        let mut v = BitVector::zeros(0);
        for ch in s.chars() {
            match ch {
                '0' => v.push(false),
                '1' => v.push(true),
                '_' => {}
                c if c.is_whitespace() => {}
                c => return Err(Error::Parse(format!("unexpected character {c:?} in bit string"))),
            }
        }
        Ok(v)
    }

    /// Parses hexadecimal, most significant bit first. An optional `0x` prefix is allowed.
    pub fn parse_hex(s: &str) -> Result<Self> {
        let s = s.trim();
        let s = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")).unwrap_or(s);
        let mut v = BitVector::zeros(0);
        for ch in s.chars() {
            if ch == '_' {
                continue;
            }
            let d = ch
                .to_digit(16)
                .ok_or_else(|| Error::Parse(format!("unexpected character {ch:?} in hex string")))?;
            for k in (0..4).rev() {
                v.push((d >> k) & 1 == 1);
            }
        }
        Ok(v)
    }

    /// Packs bits into bytes, cell 0 = most significant bit of the first byte.
    pub fn from_bytes(bytes: &[u8], len: usize) -> Self {
        assert!(len <= bytes.len() * 8);
        let mut v = BitVector::zeros(len);
        for i in 0..len {
            if (bytes[i / 8] >> (7 - i % 8)) & 1 == 1 {
                v.set(i, true);
            }
        }
        v
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.len.div_ceil(8));
        for k in 0..self.len.div_ceil(8) {
            // trimmed tail bits are zero, so partial bytes come out zero-padded
            out.push(((self.words[k / 8] >> (8 * (k % 8))) as u8).reverse_bits());
        }
        out
    }

    /// Appends `other`, copying whole words when `self` ends on a word boundary.
    pub fn extend(&mut self, other: &BitVector) {
        if self.len.is_multiple_of(64) {
            self.words.truncate(self.len / 64);
            self.words.extend_from_slice(&other.words);
            self.len += other.len;
        } else {
            for b in other.iter() {
                self.push(b);
            }
        }
    }

    pub fn to_hex(&self) -> String {
        let mut s = String::with_capacity(self.len.div_ceil(4));
        for chunk in 0..self.len.div_ceil(4) {
            let mut d = 0u32;
            for k in 0..4 {
                let i = chunk * 4 + k;
                d = (d << 1) | (i < self.len && self.get(i)) as u32;
            }
            s.push(char::from_digit(d, 16).unwrap());
        }
        s
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, b: bool) {
        debug_assert!(i < self.len);
        let m = 1u64 << (i % 64);
        if b {
            self.words[i / 64] |= m;
        } else {
            self.words[i / 64] &= !m;
        }
    }

    pub fn push(&mut self, b: bool) {
        if self.len.is_multiple_of(64) {
            self.words.push(0);
        }
        self.len += 1;
        self.set(self.len - 1, b);
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Ones among cells start..end.
    pub fn count_ones_in(&self, start: usize, end: usize) -> usize {
        assert!(start <= end && end <= self.len);
        if start == end {
            return 0;
        }
        let (ws, we) = (start / 64, (end - 1) / 64);
        let lo = !0u64 << (start % 64);
        let hi = if end.is_multiple_of(64) { !0 } else { (1u64 << (end % 64)) - 1 };
        if ws == we {
            return (self.words[ws] & lo & hi).count_ones() as usize;
        }
        let mut c = (self.words[ws] & lo).count_ones() + (self.words[we] & hi).count_ones();
        for w in &self.words[ws + 1..we] {
            c += w.count_ones();
        }
        c as usize
    }

    /// Number of positions i with self[i] != self[i+1].
    pub fn transitions(&self) -> usize {
        if self.len < 2 {
            return 0;
        }
        let nw = self.words.len();
        let mut c = 0;
        for k in 0..nw {
            let next = if k + 1 < nw { self.words[k + 1] << 63 } else { 0 };
            let mut diff = self.words[k] ^ ((self.words[k] >> 1) | next);
            if k == nw - 1 {
                let valid = (self.len - 1) - 64 * k;
                diff &= if valid >= 64 { !0 } else { (1u64 << valid) - 1 };
            }
            c += diff.count_ones() as usize;
        }
        c
    }

    /// 64 cells starting at `start`, cell `start` in bit 0; cells past the end read as 0.
    pub fn word_at(&self, start: usize) -> u64 {
        let (w, sh) = (start / 64, start % 64);
        let a = self.words.get(w).copied().unwrap_or(0);
        if sh == 0 {
            return a;
        }
        let b = self.words.get(w + 1).copied().unwrap_or(0);
        (a >> sh) | (b << (64 - sh))
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn slice(&self, start: usize, end: usize) -> BitVector {
        assert!(start <= end && end <= self.len);
        BitVector::from_bools((start..end).map(|i| self.get(i)))
    }

    pub fn concat(&self, other: &BitVector) -> BitVector {
        let mut v = self.clone();
        v.extend(other);
        v
    }

    pub fn xor(&self, other: &BitVector) -> BitVector {
        assert_eq!(self.len, other.len, "xor of vectors with different lengths");
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a ^ b).collect();
        BitVector { len: self.len, words }
    }

    pub fn not(&self) -> BitVector {
        let mut v = BitVector { len: self.len, words: self.words.iter().map(|w| !w).collect() };
        v.trim();
        v
    }

    /// Cyclic rotation so that result[i] = self[(i + k) mod n].
    pub fn rotate_left(&self, k: usize) -> BitVector {
        let n = self.len;
        if n == 0 {
            return self.clone();
        }
        BitVector::from_bools((0..n).map(|i| self.get((i + k) % n)))
    }

    /// Cyclic rotation so that result[(i + k) mod n] = self[i].
    pub fn rotate_right(&self, k: usize) -> BitVector {
        let n = self.len;
        if n == 0 {
            return self.clone();
        }
        self.rotate_left(n - k % n)
    }

    /// result[i] = self[i-1]; cell 0 receives the wrapped cell n-1 or `fill`.
    pub(crate) fn left_neighbors(&self, wrap: bool) -> BitVector {
        let mut out = BitVector::zeros(self.len);
        if self.len == 0 {
            return out;
        }
        let mut carry = if wrap { self.get(self.len - 1) as u64 } else { 0 };
        for (o, &w) in out.words.iter_mut().zip(&self.words) {
            *o = (w << 1) | carry;
            carry = w >> 63;
        }
        out.trim();
        out
    }

    /// result[i] = self[i+1]; cell n-1 receives the wrapped cell 0 or 0.
    pub(crate) fn right_neighbors(&self, wrap: bool) -> BitVector {
        let mut out = BitVector::zeros(self.len);
        if self.len == 0 {
            return out;
        }
        let nw = self.words.len();
        for k in 0..nw {
            let next = if k + 1 < nw { self.words[k + 1] << 63 } else { 0 };
            out.words[k] = (self.words[k] >> 1) | next;
        }
        if wrap && self.get(0) {
            out.set(self.len - 1, true);
        }
        out
    }

    pub(crate) fn from_words(len: usize, words: Vec<u64>) -> BitVector {
        let mut v = BitVector { len, words };
        v.trim();
        v
    }

    fn trim(&mut self) {
        let r = self.len % 64;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

/// Lexicographic on the text form: cell 0 is compared first.
impl Ord for BitVector {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        for (a, b) in self.iter().zip(other.iter()) {
            if a != b {
                return a.cmp(&b);
            }
        }
        self.len.cmp(&other.len)
    }
}

impl PartialOrd for BitVector {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl serde::Serialize for BitVector {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl std::str::FromStr for BitVector {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        BitVector::parse_bits(s)
    }
}

impl FromIterator<bool> for BitVector {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        BitVector::from_bools(iter)
    }
}
