//! A few of the NIST SP 800-22 tests, group verdicts over many sequences,
//! linear complexity, seed corpora and bit export.

use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use statrs::function::erf::erfc;
use statrs::function::gamma::gamma_ur;

use crate::bits::BitVector;
use crate::chasm::check_cells;
use crate::error::{Error, Result};

/// Shortest sequence the frequency-style tests accept.
pub const MIN_TEST_BITS: usize = 100;

pub const DEFAULT_BLOCK: usize = 128;

/// Significance level used throughout.
pub const ALPHA: f64 = 0.01;

fn check_len(bits: &BitVector) -> Result<()> {
    if bits.len() < MIN_TEST_BITS {
        return Err(Error::Precondition(format!("need at least {MIN_TEST_BITS} bits, got {}", bits.len())));
    }
    Ok(())
}

/// Upper tail of the chi-square distribution.
pub fn chi_square_sf(dof: f64, x: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else {
        gamma_ur(dof / 2.0, x / 2.0)
    }
}

pub fn monobit(bits: &BitVector) -> Result<f64> {
    check_len(bits)?;
    let n = bits.len() as f64;
    let s = 2.0 * bits.count_ones() as f64 - n;
    Ok(erfc(s.abs() / (2.0 * n).sqrt()))
}

pub fn block_frequency(bits: &BitVector, m: usize) -> Result<f64> {
    check_len(bits)?;
    if m == 0 || m > bits.len() {
        return Err(Error::Precondition(format!("block size {m} does not fit {} bits", bits.len())));
    }
    let blocks = bits.len() / m;
    let chi: f64 = (0..blocks)
        .map(|b| {
            let pi = bits.count_ones_in(b * m, (b + 1) * m) as f64 / m as f64;
            (pi - 0.5) * (pi - 0.5)
        })
        .sum::<f64>()
        * 4.0
        * m as f64;
    Ok(chi_square_sf(blocks as f64, chi))
}

/// Runs test; `None` when the proportion of ones is too far from 1/2 for
/// the test to apply.
pub fn runs(bits: &BitVector) -> Result<Option<f64>> {
    check_len(bits)?;
    let n = bits.len() as f64;
    let pi = bits.count_ones() as f64 / n;
    if (pi - 0.5).abs() >= 2.0 / n.sqrt() {
        return Ok(None);
    }
    let v = bits.transitions() as f64 + 1.0;
    let q = pi * (1.0 - pi);
    Ok(Some(erfc((v - 2.0 * n * q).abs() / (2.0 * (2.0 * n).sqrt() * q))))
}

fn xor_shifted(dst: &mut [u64], src: &[u64], shift: usize) {
    let (ws, sh) = (shift / 64, shift % 64);
    for (k, &w) in src.iter().enumerate() {
        if w == 0 || k + ws >= dst.len() {
            continue;
        }
        dst[k + ws] ^= w << sh;
        if sh > 0 && k + ws + 1 < dst.len() {
            dst[k + ws + 1] ^= w >> (64 - sh);
        }
    }
}

/// Length of the shortest LFSR generating `bits` (Berlekamp-Massey).
pub fn linear_complexity(bits: &BitVector) -> usize {
    let n = bits.len();
    // reversed so that the taps c_0..c_L line up with s_N, s_{N-1}, ... as a forward window
    let rev: BitVector = (0..n).rev().map(|i| bits.get(i)).collect();
    let nw = n / 64 + 2;
    let mut c = vec![0u64; nw];
    let mut b = vec![0u64; nw];
    c[0] = 1;
    b[0] = 1;
    let (mut l, mut m) = (0usize, 0usize);
    for big_n in 0..n {
        let base = n - 1 - big_n;
        let mut acc = 0u64;
        for k in 0..=l / 64 {
            acc ^= c[k] & rev.word_at(base + 64 * k);
        }
        if acc.count_ones() & 1 == 1 {
            let saved = c.clone();
            // m is one past the position of the last length change
            xor_shifted(&mut c, &b, big_n + 1 - m);
            if 2 * l <= big_n {
                l = big_n + 1 - l;
                m = big_n + 1;
                b = saved;
            }
        }
    }
    l
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroupVerdict {
    pub count: usize,
    pub passed: usize,
    pub proportion: f64,
    /// Smallest acceptable pass proportion.
    pub threshold: f64,
    pub proportion_failure: bool,
    /// Chi-square p-value of the 10-bin histogram of p-values.
    pub uniformity_p: f64,
    pub uniformity_failure: bool,
}

pub const UNIFORMITY_CUTOFF: f64 = 1e-4;

pub fn group_analysis(pvalues: &[f64], alpha: f64) -> Result<GroupVerdict> {
    let m = pvalues.len();
    if m < 20 {
        return Err(Error::Precondition(format!("group analysis needs at least 20 p-values, got {m}")));
    }
    if let Some(p) = pvalues.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::Precondition(format!("p-value {p} outside [0, 1]")));
    }
    let passed = pvalues.iter().filter(|&&p| p >= alpha).count();
    let p_hat = 1.0 - alpha;
    let threshold = p_hat - 3.0 * (p_hat * alpha / m as f64).sqrt();
    let proportion = passed as f64 / m as f64;
    let mut bins = [0usize; 10];
    for &p in pvalues {
        bins[((p * 10.0) as usize).min(9)] += 1;
    }
    let expected = m as f64 / 10.0;
    let chi: f64 = bins.iter().map(|&f| (f as f64 - expected).powi(2) / expected).sum();
    let uniformity_p = chi_square_sf(9.0, chi);
    Ok(GroupVerdict {
        count: m,
        passed,
        proportion,
        threshold,
        proportion_failure: proportion < threshold,
        uniformity_p,
        uniformity_failure: uniformity_p < UNIFORMITY_CUTOFF,
    })
}

const PATTERNS: [&str; 18] = [
    "0",
    "01",
    "010",
    "101",
    "1",
    "111000",
    "1100",
    "",
    "1110",
    "0001",
    "1011",
    "0100",
    "00000001",
    "11111110",
    "10000000",
    "01111111",
    "11110000",
    "00111100",
];

/// The 18 structured seeds for an n-cell generator, each pattern repeated to
/// 9n bits. Pattern 8 is half zeros then half ones at width n.
pub fn structured_seeds(n: usize) -> Result<Vec<BitVector>> {
    check_cells(n)?;
    let half = "0".repeat(n / 2) + &"1".repeat(n / 2);
    Ok(PATTERNS
        .iter()
        .map(|&p| {
            let p = if p.is_empty() { half.as_str() } else { p };
            p.bytes().cycle().take(9 * n).map(|b| b == b'1').collect()
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BitFormat {
    /// Packed bytes, first bit in the most significant position.
    Raw,
    /// One `0`/`1` character per bit.
    Ascii,
}

impl FromStr for BitFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw" => Ok(BitFormat::Raw),
            "ascii" => Ok(BitFormat::Ascii),
            _ => Err(Error::Parse(format!("unknown bit format {s:?}"))),
        }
    }
}

pub fn encode_bits(bits: &BitVector, format: BitFormat) -> Vec<u8> {
    match format {
        BitFormat::Raw => bits.to_bytes(),
        BitFormat::Ascii => bits.to_string().into_bytes(),
    }
}

pub fn decode_bits(data: &[u8], format: BitFormat) -> Result<BitVector> {
    match format {
        BitFormat::Raw => Ok(BitVector::from_bytes(data, data.len() * 8)),
        BitFormat::Ascii => BitVector::parse_bits(
            std::str::from_utf8(data).map_err(|_| Error::Parse("bit file is not text".into()))?,
        ),
    }
}

pub fn export_bits(bits: &BitVector, path: &Path, format: BitFormat) -> std::io::Result<()> {
    std::fs::write(path, encode_bits(bits, format))
}

pub fn import_bits(path: &Path, format: BitFormat) -> Result<BitVector> {
    let data = std::fs::read(path).map_err(|e| Error::Precondition(format!("{}: {e}", path.display())))?;
    decode_bits(&data, format)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StatTest {
    Monobit,
    BlockFrequency,
    Runs,
    LinearComplexity,
}

impl FromStr for StatTest {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "monobit" => Ok(StatTest::Monobit),
            "block" => Ok(StatTest::BlockFrequency),
            "runs" => Ok(StatTest::Runs),
            "bm" => Ok(StatTest::LinearComplexity),
            _ => Err(Error::Parse(format!("unknown test {s:?}; expected monobit, block, runs or bm"))),
        }
    }
}

/// Bits per sequence examined by the linear complexity probe.
pub const COMPLEXITY_PREFIX: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TestGroupReport {
    pub test: StatTest,
    /// One entry per sequence; `null` where the test did not apply.
    pub p_values: Vec<Option<f64>>,
    pub not_applicable: usize,
    pub verdict: Option<GroupVerdict>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComplexityReport {
    pub prefix_bits: usize,
    pub values: Vec<usize>,
    pub min_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TestReport {
    pub sequences: usize,
    pub sequence_bits: usize,
    pub alpha: f64,
    pub groups: Vec<TestGroupReport>,
    pub linear_complexity: Option<ComplexityReport>,
}

impl TestReport {
    pub fn any_failure(&self) -> bool {
        self.groups
            .iter()
            .filter_map(|g| g.verdict.as_ref())
            .any(|v| v.proportion_failure || v.uniformity_failure)
    }
}

/// Splits `bits` into `sequences` equal parts and runs each requested test on
/// every part. Group verdicts need at least 20 applicable p-values.
pub fn run_battery(bits: &BitVector, sequences: usize, tests: &[StatTest], alpha: f64) -> Result<TestReport> {
    if sequences == 0 {
        return Err(Error::Precondition("need at least one sequence".into()));
    }
    let len = bits.len() / sequences;
    if len < MIN_TEST_BITS {
        return Err(Error::Precondition(format!(
            "{} bits split {sequences} ways leaves {len} bits per sequence; need {MIN_TEST_BITS}",
            bits.len()
        )));
    }
    let parts: Vec<BitVector> = (0..sequences).map(|k| bits.slice(k * len, (k + 1) * len)).collect();
    let mut groups = Vec::new();
    let mut complexity = None;
    for &t in tests {
        if t == StatTest::LinearComplexity {
            let prefix = len.min(COMPLEXITY_PREFIX);
            let values: Vec<usize> = parts.par_iter().map(|p| linear_complexity(&p.slice(0, prefix))).collect();
            let min_ratio = values.iter().copied().min().unwrap_or(0) as f64 / prefix as f64;
            complexity = Some(ComplexityReport { prefix_bits: prefix, values, min_ratio });
            continue;
        }
        let p_values: Vec<Option<f64>> = parts
            .par_iter()
            .map(|p| match t {
                StatTest::Monobit => monobit(p).map(Some),
                StatTest::BlockFrequency => block_frequency(p, DEFAULT_BLOCK.min(p.len())).map(Some),
                StatTest::Runs => runs(p),
                StatTest::LinearComplexity => unreachable!(),
            })
            .collect::<Result<_>>()?;
        let applicable: Vec<f64> = p_values.iter().flatten().copied().collect();
        let verdict = if applicable.len() >= 20 { Some(group_analysis(&applicable, alpha)?) } else { None };
        groups.push(TestGroupReport { test: t, not_applicable: sequences - applicable.len(), p_values, verdict });
    }
    Ok(TestReport { sequences, sequence_bits: len, alpha, groups, linear_complexity: complexity })
}
