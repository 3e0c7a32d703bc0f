//! The Chasm generator: a cyclic FSCA whose cells step through the AES S-Box,
//! each with its own byte offset, and whose output XORs four values spaced
//! n/4 steps apart.

use std::fmt::Write as _;

use num_bigint::BigUint;

use crate::bits::BitVector;
use crate::error::{Error, Result};

/// The AES S-Box.
pub const SBOX: [u8; 256] = [
    0x63, 0x7c, 0x77, 0x7b, 0xf2, 0x6b, 0x6f, 0xc5, 0x30, 0x01, 0x67, 0x2b, 0xfe, 0xd7, 0xab, 0x76,
    0xca, 0x82, 0xc9, 0x7d, 0xfa, 0x59, 0x47, 0xf0, 0xad, 0xd4, 0xa2, 0xaf, 0x9c, 0xa4, 0x72, 0xc0,
    0xb7, 0xfd, 0x93, 0x26, 0x36, 0x3f, 0xf7, 0xcc, 0x34, 0xa5, 0xe5, 0xf1, 0x71, 0xd8, 0x31, 0x15,
    0x04, 0xc7, 0x23, 0xc3, 0x18, 0x96, 0x05, 0x9a, 0x07, 0x12, 0x80, 0xe2, 0xeb, 0x27, 0xb2, 0x75,
    0x09, 0x83, 0x2c, 0x1a, 0x1b, 0x6e, 0x5a, 0xa0, 0x52, 0x3b, 0xd6, 0xb3, 0x29, 0xe3, 0x2f, 0x84,
    0x53, 0xd1, 0x00, 0xed, 0x20, 0xfc, 0xb1, 0x5b, 0x6a, 0xcb, 0xbe, 0x39, 0x4a, 0x4c, 0x58, 0xcf,
    0xd0, 0xef, 0xaa, 0xfb, 0x43, 0x4d, 0x33, 0x85, 0x45, 0xf9, 0x02, 0x7f, 0x50, 0x3c, 0x9f, 0xa8,
    0x51, 0xa3, 0x40, 0x8f, 0x92, 0x9d, 0x38, 0xf5, 0xbc, 0xb6, 0xda, 0x21, 0x10, 0xff, 0xf3, 0xd2,
    0xcd, 0x0c, 0x13, 0xec, 0x5f, 0x97, 0x44, 0x17, 0xc4, 0xa7, 0x7e, 0x3d, 0x64, 0x5d, 0x19, 0x73,
    0x60, 0x81, 0x4f, 0xdc, 0x22, 0x2a, 0x90, 0x88, 0x46, 0xee, 0xb8, 0x14, 0xde, 0x5e, 0x0b, 0xdb,
    0xe0, 0x32, 0x3a, 0x0a, 0x49, 0x06, 0x24, 0x5c, 0xc2, 0xd3, 0xac, 0x62, 0x91, 0x95, 0xe4, 0x79,
    0xe7, 0xc8, 0x37, 0x6d, 0x8d, 0xd5, 0x4e, 0xa9, 0x6c, 0x56, 0xf4, 0xea, 0x65, 0x7a, 0xae, 0x08,
    0xba, 0x78, 0x25, 0x2e, 0x1c, 0xa6, 0xb4, 0xc6, 0xe8, 0xdd, 0x74, 0x1f, 0x4b, 0xbd, 0x8b, 0x8a,
    0x70, 0x3e, 0xb5, 0x66, 0x48, 0x03, 0xf6, 0x0e, 0x61, 0x35, 0x57, 0xb9, 0x86, 0xc1, 0x1d, 0x9e,
    0xe1, 0xf8, 0x98, 0x11, 0x69, 0xd9, 0x8e, 0x94, 0x9b, 0x1e, 0x87, 0xe9, 0xce, 0x55, 0x28, 0xdf,
    0x8c, 0xa1, 0x89, 0x0d, 0xbf, 0xe6, 0x42, 0x68, 0x41, 0x99, 0x2d, 0x0f, 0xb0, 0x54, 0xbb, 0x16,
];

/// Length of one pass through all 256 S-Box entries.
pub const CYCLE: u32 = 256;

/// First `len` fractional binary digits of the golden ratio, most significant first.
pub fn golden_ratio_bits(len: usize) -> BitVector {
    // floor(φ·2^len) = floor((2^len + floor(√5·2^len)) / 2)
    let one = BigUint::from(1u8) << len;
    let root = (BigUint::from(5u8) << (2 * len)).sqrt();
    let scaled: BigUint = (&one + root) >> 1usize;
    let frac = scaled - one;
    BitVector::from_bools((0..len).map(|k| frac.bit((len - 1 - k) as u64)))
}

pub fn check_cells(n: usize) -> Result<()> {
    if n < 4 || !n.is_multiple_of(4) {
        return Err(Error::Precondition(format!("cell count must be a positive multiple of 4, got {n}")));
    }
    Ok(())
}

/// Explicit generator state (n, s, o, i, c). Its stepping methods are a
/// plain per-cell implementation; [`Chasm`] is the fast equivalent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChasmState {
    pub n: usize,
    pub s: BitVector,
    pub o: Vec<u8>,
    pub i: Vec<u8>,
    pub c: u32,
}

impl ChasmState {
    pub fn initialize(seed: &BitVector) -> Result<Self> {
        if !seed.len().is_multiple_of(9) {
            return Err(Error::Precondition(format!("seed length {} is not a multiple of 9", seed.len())));
        }
        let n = seed.len() / 9;
        check_cells(n)?;
        let mixed = seed.xor(&golden_ratio_bits(9 * n));
        let s = mixed.slice(0, n);
        let o = mixed.slice(n, 9 * n).to_bytes();
        Ok(ChasmState { n, s, i: o.clone(), o, c: 0 })
    }

    fn validate(&self) -> Result<()> {
        check_cells(self.n)?;
        for (what, len) in [("value", self.s.len()), ("offsets", self.o.len()), ("indices", self.i.len())] {
            if len != self.n {
                return Err(Error::Precondition(format!("{what} has length {len}, expected {}", self.n)));
            }
        }
        Ok(())
    }

    pub fn time_step(&mut self) {
        let n = self.n;
        let old = self.s.clone();
        for j in 0..n {
            let x = 4 * old.get((j + n - 1) % n) as u8 + 2 * old.get(j) as u8 + old.get((j + 1) % n) as u8;
            let f = SBOX[self.i[j] as usize] ^ self.o[j];
            self.s.set(j, (f >> x) & 1 == 1);
            self.i[j] = self.i[j].wrapping_add(1);
        }
        self.c += 1;
    }

    pub fn next(&mut self) -> BitVector {
        let mut v = BitVector::zeros(self.n);
        for _ in 0..4 {
            for _ in 0..self.n / 4 {
                self.time_step();
            }
            v = v.xor(&self.s);
        }
        if self.c >= CYCLE {
            let saved = self.s.clone();
            let mut u = BitVector::zeros(0);
            for _ in 0..8 {
                self.time_step();
                u.extend(&self.s);
            }
            for (o, b) in self.o.iter_mut().zip(u.to_bytes()) {
                *o ^= b;
            }
            self.s = saved;
            self.c = 0;
        }
        v
    }

    /// `n`, `s`, `o`, `i` and `c` on separate lines, values in hex.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        writeln!(out, "n {:x}", self.n).unwrap();
        writeln!(out, "s {}", self.s.to_hex()).unwrap();
        writeln!(out, "o {}", hex_bytes(&self.o)).unwrap();
        writeln!(out, "i {}", hex_bytes(&self.i)).unwrap();
        writeln!(out, "c {:x}", self.c).unwrap();
        out
    }

    pub fn parse_dump(text: &str) -> Result<Self> {
        let mut fields = std::collections::BTreeMap::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let (k, v) = line.split_once(' ').ok_or_else(|| Error::Parse(format!("bad state line {line:?}")))?;
            fields.insert(k, v.trim());
        }
        let get = |k: &str| fields.get(k).copied().ok_or_else(|| Error::Parse(format!("state dump lacks `{k}`")));
        let int = |k: &str| -> Result<u64> {
            u64::from_str_radix(get(k)?, 16).map_err(|_| Error::Parse(format!("bad hex number for `{k}`")))
        };
        let n = int("n")? as usize;
        let c = int("c")? as u32;
        let mut s = BitVector::parse_hex(get("s")?)?;
        if s.len() < n {
            return Err(Error::Parse("value shorter than n".into()));
        }
        s = s.slice(0, n);
        let o = BitVector::parse_hex(get("o")?)?.to_bytes();
        let i = BitVector::parse_hex(get("i")?)?.to_bytes();
        let state = ChasmState { n, s, o, i, c };
        state.validate()?;
        Ok(state)
    }
}

fn hex_bytes(b: &[u8]) -> String {
    b.iter().map(|x| format!("{x:02x}")).collect()
}

/// Bitsliced generator. Cell j is bit j of the value words; the S-Box part of
/// each cell's function is tabulated per index phase as 8 bit-planes.
#[derive(Clone, Debug)]
pub struct Chasm {
    n: usize,
    words: usize,
    s: Vec<u64>,
    o: Vec<u8>,
    base_i: Vec<u8>,
    phase: u8,
    c: u32,
    /// [phase][bit][word]: bit b of SBOX[base_i[j] + phase]
    sbox_planes: Vec<u64>,
    /// [bit][word]: bit b of o[j]
    offset_planes: Vec<u64>,
    pending: BitVector,
    scratch: [Vec<u64>; 3],
}

impl Chasm {
    pub fn new(seed: &BitVector) -> Result<Self> {
        Chasm::from_state(&ChasmState::initialize(seed)?)
    }

    pub fn from_seed_hex(hex: &str) -> Result<Self> {
        Chasm::new(&BitVector::parse_hex(hex)?)
    }

    pub fn from_state(st: &ChasmState) -> Result<Self> {
        st.validate()?;
        let n = st.n;
        let words = n.div_ceil(64);
        let mut sbox_planes = vec![0u64; 256 * 8 * words];
        for phase in 0..256usize {
            for (j, &i0) in st.i.iter().enumerate() {
                let f = SBOX[(i0 as usize + phase) & 255];
                for b in 0..8 {
                    if (f >> b) & 1 == 1 {
                        sbox_planes[(phase * 8 + b) * words + j / 64] |= 1 << (j % 64);
                    }
                }
            }
        }
        let mut g = Chasm {
            n,
            words,
            s: st.s.words().to_vec(),
            o: st.o.clone(),
            base_i: st.i.clone(),
            phase: 0,
            c: st.c,
            sbox_planes,
            offset_planes: vec![0; 8 * words],
            pending: BitVector::zeros(0),
            scratch: [vec![0; words], vec![0; words], vec![0; words]],
        };
        g.s.resize(words, 0);
        g.load_offsets();
        Ok(g)
    }

    fn load_offsets(&mut self) {
        self.offset_planes.iter_mut().for_each(|w| *w = 0);
        for (j, &o) in self.o.iter().enumerate() {
            for b in 0..8 {
                if (o >> b) & 1 == 1 {
                    self.offset_planes[b * self.words + j / 64] |= 1 << (j % 64);
                }
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn state(&self) -> ChasmState {
        ChasmState {
            n: self.n,
            s: BitVector::from_words(self.n, self.s.clone()),
            o: self.o.clone(),
            i: self.base_i.iter().map(|&i| i.wrapping_add(self.phase)).collect(),
            c: self.c,
        }
    }

    pub fn value(&self) -> BitVector {
        BitVector::from_words(self.n, self.s.clone())
    }

    pub fn time_step(&mut self) {
        let (n, nw) = (self.n, self.words);
        let top = (n - 1) % 64;
        let tail_mask = if n % 64 == 0 { !0 } else { (1u64 << (n % 64)) - 1 };
        let [left, right, out] = &mut self.scratch;
        // left[j] = s[j-1], right[j] = s[j+1], cyclically
        let first = self.s[0] & 1;
        let last = (self.s[nw - 1] >> top) & 1;
        for w in 0..nw {
            let below = if w == 0 { last } else { self.s[w - 1] >> 63 };
            left[w] = (self.s[w] << 1) | below;
            let above = if w + 1 < nw { self.s[w + 1] << 63 } else { 0 };
            right[w] = (self.s[w] >> 1) | above;
        }
        left[nw - 1] &= tail_mask;
        right[nw - 1] |= first << top;
        let planes = &self.sbox_planes[self.phase as usize * 8 * nw..][..8 * nw];
        for w in 0..nw {
            let f = |b: usize| planes[b * nw + w] ^ self.offset_planes[b * nw + w];
            let (l, c, r) = (left[w], self.s[w], right[w]);
            let mux = |sel: u64, a: u64, b: u64| a ^ ((a ^ b) & sel);
            let lo = mux(c, mux(r, f(0), f(1)), mux(r, f(2), f(3)));
            let hi = mux(c, mux(r, f(4), f(5)), mux(r, f(6), f(7)));
            out[w] = mux(l, lo, hi);
        }
        out[nw - 1] &= tail_mask;
        std::mem::swap(&mut self.s, out);
        self.phase = self.phase.wrapping_add(1);
        self.c += 1;
    }

    /// One n-bit output block.
    pub fn next_block(&mut self) -> BitVector {
        let mut v = vec![0u64; self.words];
        for _ in 0..4 {
            for _ in 0..self.n / 4 {
                self.time_step();
            }
            for (a, b) in v.iter_mut().zip(&self.s) {
                *a ^= b;
            }
        }
        if self.c >= CYCLE {
            self.remix();
        }
        BitVector::from_words(self.n, v)
    }

    fn remix(&mut self) {
        let saved = self.s.clone();
        let mut u = BitVector::zeros(0);
        for _ in 0..8 {
            self.time_step();
            u.extend(&BitVector::from_words(self.n, self.s.clone()));
        }
        for (o, b) in self.o.iter_mut().zip(u.to_bytes()) {
            *o ^= b;
        }
        self.load_offsets();
        self.s = saved;
        self.c = 0;
    }

    /// The next `len` output bits; leftover bits of a block are kept for the next call.
    pub fn generate_bits(&mut self, len: usize) -> BitVector {
        let mut out = std::mem::replace(&mut self.pending, BitVector::zeros(0));
        while out.len() < len {
            let block = self.next_block();
            out.extend(&block);
        }
        if out.len() > len {
            self.pending = out.slice(len, out.len());
            out = out.slice(0, len);
        }
        out
    }

    pub fn generate(&mut self, nbytes: usize) -> Vec<u8> {
        self.generate_bits(8 * nbytes).to_bytes()
    }
}
