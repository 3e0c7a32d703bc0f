//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line.
//!
//! Two criteria are known not to hold as stated (the n=9 predecessor
//! histogram and the stated coin bound). They print FAIL; the test asserts
//! that the reproduced discrepancy is exactly the documented one.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use chasmlab::ca::{center, CodeStepper};
use chasmlab::chasm::{Chasm, ChasmState, SBOX};
use chasmlab::fsca::{FiniteStateCell, Fsca};
use chasmlab::gf2::{affine_map_of, gf2_power_sum};
use chasmlab::invert::{invert_toggle_rule, predecessor_histogram, prior_table};
use chasmlab::linear::{best_max_period, eventual_period, matching_seeds, max_period, ruleset_census, sequence_seed_map, seed_differences};
use chasmlab::recover::{ms_recover, ms_recover_improved};
use chasmlab::sat::{compile, evaluate, Cnf3};
use chasmlab::stats::{block_frequency, group_analysis, linear_complexity, monobit, runs, ALPHA};
use chasmlab::{evolve, step, temporal_sequence, BitVector, Boundary, Rule, RuleVector};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn bv(s: &str) -> BitVector {
    BitVector::parse_bits(s).unwrap()
}

// ---------------------------------------------------------------- 1

const TOGGLE_RULES: [u8; 11] = [30, 45, 75, 86, 89, 106, 120, 135, 149, 169, 225];

fn toggle_inversion() -> Verdict {
    let start = Instant::now();
    let cases: Vec<(u8, usize)> = TOGGLE_RULES.iter().flat_map(|&r| (5..=12).map(move |n| (r, n))).collect();
    let bad: Vec<String> = cases
        .par_iter()
        .filter_map(|&(r, n)| {
            let f = RuleVector::uniform(Rule(r), n).unwrap();
            let stepper = CodeStepper::new(&f, Boundary::Cyclic).unwrap();
            let mut oracle: Vec<BTreeSet<BitVector>> = vec![BTreeSet::new(); 1 << n];
            for x in 0..1u64 << n {
                oracle[stepper.step(x) as usize].insert(BitVector::from_code(x, n));
            }
            for (code, expected) in oracle.iter().enumerate() {
                let s = BitVector::from_code(code as u64, n);
                let got = invert_toggle_rule(&f, &s).unwrap();
                if &got != expected {
                    return Some(format!("rule {r} n={n} state {s}"));
                }
                if got.iter().any(|p| step(&f, p, Boundary::Cyclic).unwrap() != s) {
                    return Some(format!("rule {r} n={n} state {s}: predecessor does not step forward"));
                }
            }
            None
        })
        .collect();
    let elapsed = start.elapsed();
    verdict(
        bad.is_empty() && elapsed < Duration::from_secs(60),
        format!("{} rule/size cases, {} mismatches {:?}, {:.1?}", cases.len(), bad.len(), bad.first(), elapsed),
    )
}

// ---------------------------------------------------------------- 2

/// Returns the verdict and whether the outcome is exactly the documented
/// discrepancy: n=6 matches, n=9 computes to {57, 399, 55, 1}, and the
/// printed n=9 histogram accounts for 518 successors out of 512 states.
fn predecessor_histograms() -> (Verdict, bool) {
    let want6 = vec![12u64, 41, 10, 1];
    let want9 = vec![57u64, 393, 61, 1];
    let got6 = predecessor_histogram(Rule(30), 6).unwrap();
    let got9 = predecessor_histogram(Rule(30), 9).unwrap();
    let weight = |h: &[u64]| h.iter().enumerate().map(|(k, &c)| k as u64 * c).sum::<u64>();
    let documented = got6 == want6 && got9 == [57, 399, 55, 1] && weight(&want9) == 518 && weight(&got9) == 512;
    let v = verdict(
        got6 == want6 && got9 == want9,
        format!(
            "n=6 {got6:?}; n=9 {got9:?} vs expected {want9:?} (expected accounts for {} predecessors of 512 states)",
            weight(&want9)
        ),
    );
    (v, documented)
}

// ---------------------------------------------------------------- 3

const RULE30_PRIORS: &str = "\
000 00000 11101 11110 11111 3,3,3,2,2
001 00001 11010 11011 11100 3,3,1,2,2
010 10101 10110 10111 11000 4,1,3,2,2
011 00010 00011 10100 11001 2,1,1,2,2
100 01101 01110 01111 10000 1,3,3,2,2
101 01010 01011 01100 10001 1,3,1,2,2
110 00101 00110 00111 01000 0,1,3,2,2
111 00100 01001 10010 10011 2,1,1,2,2";

const FIXED_PATTERN_ROWS: &str = "\
30 010 10101 10110 10111 11000 4,1,3,2,2
30 110 00101 00110 00111 01000 0,1,3,2,2
45 000 11001 11100 11110 11111 4,4,3,2,2
45 001 10010 10011 11000 11101 4,2,1,2,2
45 100 01001 01100 01110 01111 0,4,3,2,2
45 101 00010 00011 01000 01101 0,2,1,2,2
75 001 01000 01001 01011 11110 1,4,1,2,2
75 010 10010 10111 11100 11101 4,2,3,2,2
75 011 10000 10001 10011 10110 4,0,1,2,2
75 101 01110 11000 11001 11011 3,4,1,2,2
75 110 00010 00111 01100 01101 0,2,3,2,2
75 111 00000 00001 00011 00110 0,0,1,2,2
86 010 00011 01101 10101 11101 2,2,3,1,4
86 011 00010 01100 10100 11100 2,2,3,1,0
89 010 00111 01001 10111 11101 2,2,3,2,4
89 011 00110 01000 10110 11100 2,2,3,2,0
89 110 00001 01101 10001 11001 2,2,1,0,4
89 111 00000 01100 10000 11000 2,2,1,0,0
101 000 00111 01111 10011 11111 2,2,3,4,4
101 001 00110 01110 10010 11110 2,2,3,4,0
101 010 00100 01100 10001 11100 2,2,3,0,1
101 011 00101 01101 10000 11101 2,2,3,0,3
101 100 00011 01001 10111 11001 2,2,1,2,4
101 101 00010 01000 10110 11000 2,2,1,2,0
106 010 00010 01010 10010 11100 2,2,1,3,0
106 011 00011 01011 10011 11101 2,2,1,3,4
120 010 00111 01000 01001 01010 0,3,1,2,2
120 110 10111 11000 11001 11010 4,3,1,2,2
135 001 10111 11000 11001 11010 4,3,1,2,2
135 101 00111 01000 01001 01010 0,3,1,2,2
149 100 00011 01011 10011 11101 2,2,1,3,4
149 101 00010 01010 10010 11100 2,2,1,3,0
169 100 00010 01100 10100 11100 2,2,3,1,0
169 101 00011 01101 10101 11101 2,2,3,1,4
225 001 00101 00110 00111 01000 0,1,3,2,2
225 101 10101 10110 10111 11000 4,1,3,2,2";

fn row_matches(rule: u8, fields: &[&str]) -> bool {
    let table = prior_table(Rule(rule), 3).unwrap();
    let Some(row) = table.row(fields[0]) else { return false };
    let preds: Vec<String> = row.preds.iter().map(|p| p.to_string()).collect();
    let ones: Vec<usize> = fields[5].split(',').map(|c| c.parse().unwrap()).collect();
    preds == fields[1..5] && row.ones == ones
}

fn prior_tables() -> Verdict {
    let t1 = prior_table(Rule(30), 3).unwrap();
    let t1_ok = t1.rows.len() == 8
        && RULE30_PRIORS.lines().all(|l| row_matches(30, &l.split_whitespace().collect::<Vec<_>>()));
    let mut bad = Vec::new();
    let mut rules = BTreeSet::new();
    for l in FIXED_PATTERN_ROWS.lines() {
        let f: Vec<&str> = l.split_whitespace().collect();
        let rule: u8 = f[0].parse().unwrap();
        rules.insert(rule);
        if !row_matches(rule, &f[1..]) {
            bad.push(format!("{} {}", f[0], f[1]));
        }
    }
    verdict(
        t1_ok && bad.is_empty() && rules.len() == 12,
        format!("rule-30 table {}; {} fixed-pattern rows over {} rules, mismatches {bad:?}", if t1_ok { "exact" } else { "differs" }, FIXED_PATTERN_ROWS.lines().count(), rules.len()),
    )
}

// ---------------------------------------------------------------- 4

fn linear_periods() -> Verdict {
    let family = [Rule(90), Rule(150)];
    let mut got = Vec::new();
    let mut n11_time = Duration::ZERO;
    for n in [5usize, 7, 9, 11] {
        let t = Instant::now();
        got.push(best_max_period(n, &family).unwrap().0);
        if n == 11 {
            n11_time = t.elapsed();
        }
    }
    let f = RuleVector::uniform(Rule(90), 5).unwrap();
    // every orbit returns after 3 steps once past the first step; 00000 and 11111 settle on the fixed point
    let reports: Vec<_> = (0..32u64).map(|x| eventual_period(&f, &BitVector::from_code(x, 5)).unwrap()).collect();
    let exact_three = reports.iter().filter(|r| r.period == 3).count();
    let period_three =
        reports.iter().all(|r| r.tail <= 1 && 3 % r.period == 0) && reports.iter().map(|r| r.period).max() == Some(3);
    let m = affine_map_of(&f).unwrap().m;
    let (_, sum3) = gf2_power_sum(&m, 3).unwrap();
    let pass = got == [8, 14, 30, 62] && n11_time < Duration::from_secs(600) && period_three && m.pow(4) == m && sum3.is_zero();
    verdict(
        pass,
        format!(
            "max periods {got:?} (n=11 in {n11_time:.1?}); rule 90 n=5: s(t+3)=s(t) for t>=1 on all seeds {period_three} ({exact_three}/32 exactly 3), M^4=M {}, M+M^2+M^3=0 {}",
            m.pow(4) == m,
            sum3.is_zero()
        ),
    )
}

// ---------------------------------------------------------------- 5

fn linear_reproductions() -> Verdict {
    let rv = |s: &str| RuleVector::parse(s, None).unwrap();
    let mut notes = Vec::new();
    let mut ok = true;
    let mut check = |cond: bool, what: String| {
        ok &= cond;
        notes.push(format!("{what} {}", if cond { "ok" } else { "MISMATCH" }));
    };
    let p1 = max_period(&rv("90x8,150")).unwrap();
    check(p1 == 28, format!("[90x8,150] period {p1}"));
    let p2 = max_period(&rv("150x5,90x4")).unwrap();
    check(p2 == 30, format!("[150x5,90x4] period {p2}"));

    let seed = bv("110010110");
    let only = matching_seeds(&rv("150x8,90"), &seed, 9).unwrap();
    check(only == vec![seed.clone()], format!("[150x8,90] matches {}", only.len()));
    let edge7 = matching_seeds(&rv("150x7,90,150"), &seed, 9).unwrap();
    check(edge7 == vec![bv("011111011"), bv("110010110")], format!("[150x7,90,150] matches {}", edge7.len()));

    let sym = matching_seeds(&rv("150x4,90,150x4"), &bv("010110110"), 9).unwrap();
    let listed = [
        "000011100", "000110100", "001011000", "001110000", "010011110", "010110110", "011011010", "011110010",
        "100011101", "100110101", "101011001", "101110001", "110011111", "110110111", "111011011", "111110011",
    ];
    check(sym.iter().map(|s| s.to_string()).eq(listed.iter().map(|s| s.to_string())), format!("symmetric example {} seeds", sym.len()));

    let d1 = sequence_seed_map(&rv("90x8,150"), 9).unwrap();
    let d2 = sequence_seed_map(&rv("90x8,105"), 9).unwrap();
    let diffs = seed_differences(&d1, &d2);
    let constant = !diffs.is_empty() && diffs.values().all(|d| d.to_string() == "101101101");
    check(constant, format!("seed differences over {} shared sequences constant", diffs.len()));

    let census = ruleset_census(9).unwrap();
    let find = |r: &str| census.iter().find(|row| row.ruleset == r).map(|row| (row.period, row.sequences));
    check(find("110111101") == Some((30, 511)), format!("census 110111101 {:?}", find("110111101")));
    check(find("110000001") == Some((1, 256)), format!("census 110000001 {:?}", find("110000001")));
    verdict(ok, notes.join("; "))
}

// ---------------------------------------------------------------- 6

fn fsca_matches_ca() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut bad = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(3..=16);
        let rules: Vec<Rule> = (0..n).map(|_| Rule(rng.gen())).collect();
        let seed: BitVector = (0..n).map(|_| rng.gen::<bool>()).collect();
        let t = rng.gen_range(0..=64);
        let f = RuleVector::new(rules.clone()).unwrap();
        let a = Fsca::new(rules.iter().map(|&r| FiniteStateCell::elementary(r)).collect()).unwrap();
        let ca = evolve(&f, &seed, Boundary::Cyclic, t).unwrap();
        let end = a.run(&a.start_with_value(&seed).unwrap(), t).unwrap();
        if end.s != ca[t] {
            bad += 1;
        }
    }
    verdict(bad == 0, format!("1000 random cases, {bad} mismatches"))
}

// ---------------------------------------------------------------- 7

fn truth_table_oracle(clauses: &[[i64; 3]], vars: &[i64], alpha: u64) -> bool {
    let value = |lit: i64| {
        let j = vars.iter().position(|&v| v == lit.abs()).unwrap();
        let b = (alpha >> (vars.len() - 1 - j)) & 1 == 1;
        b != (lit < 0)
    };
    clauses.iter().all(|c| c.iter().any(|&l| value(l)))
}

fn random_cnf(rng: &mut ChaCha8Rng) -> Vec<[i64; 3]> {
    let v: i64 = rng.gen_range(3..=6);
    let c = rng.gen_range(1..=8);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    while out.len() < c {
        let mut picked = BTreeSet::new();
        while picked.len() < 3 {
            picked.insert(rng.gen_range(1..=v));
        }
        let clause: Vec<i64> = picked.into_iter().map(|x| if rng.gen() { -x } else { x }).collect();
        if seen.insert(clause.clone()) {
            out.push([clause[0], clause[1], clause[2]]);
        }
        if seen.len() >= 8 * (v * (v - 1) * (v - 2) / 6) as usize {
            break;
        }
    }
    out
}

fn sat_compiler() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let corpus: Vec<Vec<[i64; 3]>> = (0..240).map(|_| random_cnf(&mut rng)).collect();
    let failures: Vec<String> = corpus
        .par_iter()
        .filter_map(|clauses| {
            let phi = Cnf3::new(clauses).unwrap();
            let r = compile(&phi).unwrap();
            let n = r.n();
            if !r.fsca.is_simple() {
                return Some(format!("{clauses:?}: not simple"));
            }
            if 2 * r.k > 3 * n + 4 {
                return Some(format!("{clauses:?}: k = {} exceeds 3n/2+2 for n = {n}", r.k));
            }
            let vars: Vec<i64> = clauses.iter().flatten().map(|l| l.abs()).collect::<BTreeSet<_>>().into_iter().collect();
            for alpha in 0..1u64 << vars.len() {
                let a = BitVector::from_code(alpha, vars.len());
                if evaluate(&r, &a).unwrap().satisfied != truth_table_oracle(clauses, &vars, alpha) {
                    return Some(format!("{clauses:?}: assignment {a} disagrees"));
                }
            }
            None
        })
        .collect();
    let example = compile(&Cnf3::new(&[[1, 2, -3], [1, 3, 5], [-2, -4, 5], [3, 4, -5]]).unwrap()).unwrap();
    let layout_ok = example.n() == 12 && example.slots == [0, 2, 5, 7, 10] && example.k <= 20;
    let elapsed = start.elapsed();
    verdict(
        failures.is_empty() && layout_ok && elapsed < Duration::from_secs(300),
        format!(
            "{} formulas, {} failures {:?}; example formula n={} slots {:?} k={}; {:.1?}",
            corpus.len(),
            failures.len(),
            failures.first(),
            example.n(),
            example.slots,
            example.k,
            elapsed
        ),
    )
}

// ---------------------------------------------------------------- 8

/// Verdict plus whether the outcome matches the documented analysis: classic
/// recovery is exact, every recovered seed verifies, the only stated-bound
/// violations have a final 1 in the sequence, and the bound that discounts
/// that bit holds everywhere.
fn seed_recovery() -> (Verdict, bool) {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut classic_bad = 0;
    let mut verify_bad = 0;
    let mut stated_bad = 0;
    let mut stated_bad_other = 0;
    let mut corrected_bad = 0;
    for case in 0..100 {
        let n = 5 + case % 9;
        let f = RuleVector::uniform(Rule(30), n).unwrap();
        let seed = BitVector::from_code(rng.gen_range(0..1u64 << n), n);
        let sigma = temporal_sequence(&f, &seed, center(n), n, Boundary::Cyclic).unwrap().bits;

        let stepper = CodeStepper::new(&f, Boundary::Cyclic).unwrap();
        let oracle: Vec<BitVector> = (0..1u64 << n)
            .filter(|&x| stepper.sequence_code(x, center(n), n) == sigma.to_code())
            .map(|x| BitVector::from_code(x, n))
            .collect();
        if ms_recover(Rule(30), &sigma, n).unwrap() != oracle {
            classic_bad += 1;
        }

        let r = ms_recover_improved(Rule(30), &sigma, n).unwrap();
        if temporal_sequence(&f, &r.seed, center(n), n, Boundary::Cyclic).unwrap().bits != sigma {
            verify_bad += 1;
        }
        let ones = sigma.count_ones() as i64;
        let coins = r.coins.len() as i64;
        if coins > n as i64 - ones - 1 {
            stated_bad += 1;
            if !sigma.get(n - 1) {
                stated_bad_other += 1;
            }
        }
        let ones_head = sigma.slice(0, n - 1).count_ones() as i64;
        if coins > n as i64 - 1 - ones_head {
            corrected_bad += 1;
        }
    }
    let documented = classic_bad == 0 && verify_bad == 0 && stated_bad_other == 0 && corrected_bad == 0;
    let v = verdict(
        classic_bad == 0 && verify_bad == 0 && stated_bad == 0,
        format!(
            "100 sequences n=5..13: classic mismatches {classic_bad}, unverified seeds {verify_bad}; \
             coins > n-#1s-1 in {stated_bad} cases ({stated_bad_other} without a final 1); \
             coins > (n-1)-#1s(first n-1 bits) in {corrected_bad} cases"
        ),
    );
    (v, documented)
}

// ---------------------------------------------------------------- 9

const SBOX_TABLE: &str = "\
63 7c 77 7b f2 6b 6f c5 30 01 67 2b fe d7 ab 76
ca 82 c9 7d fa 59 47 f0 ad d4 a2 af 9c a4 72 c0
b7 fd 93 26 36 3f f7 cc 34 a5 e5 f1 71 d8 31 15
04 c7 23 c3 18 96 5 9a 07 12 80 e2 eb 27 b2 75
09 83 2c 1a 1b 6e 5a a0 52 3b d6 b3 29 e3 2f 84
53 d1 00 ed 20 fc b1 5b 6a cb be 39 4a 4c 58 cf
d0 ef aa fb 43 4d 33 85 45 f9 02 7f 50 3c 9f a8
51 a3 40 8f 92 9d 38 f5 bc b6 da 21 10 ff f3 d2
cd 0c 13 ec 5f 97 44 17 c4 a7 7e 3d 64 5d 19 73
60 81 4f dc 22 2a 90 88 46 ee b8 14 de 5e 0b db
e0 32 3a 0a 49 06 24 5c c2 d3 ac 62 91 95 e4 79
e7 c8 37 6d 8d d5 4e a9 6c 56 f4 ea 65 7a ae 08
ba 78 25 2e 1c a6 b4 c6 e8 dd 74 1f 4b bd 8b 8a
70 3e b5 66 48 03 f6 0e 61 35 57 b9 86 c1 1d 9e
e1 f8 98 11 69 d9 8e 94 9b 1e 87 e9 ce 55 28 df
8c a1 89 0d bf e6 42 68 41 99 2d 0f b0 54 bb 16";

fn gf256_mul(mut a: u8, mut b: u8) -> u8 {
    let mut r = 0u8;
    while b != 0 {
        if b & 1 == 1 {
            r ^= a;
        }
        let carry = a & 0x80 != 0;
        a <<= 1;
        if carry {
            a ^= 0x1b;
        }
        b >>= 1;
    }
    r
}

fn algebraic_sbox(x: u8) -> u8 {
    let inv = if x == 0 { 0 } else { (1..=255u8).find(|&y| gf256_mul(x, y) == 1).unwrap() };
    (0..5).fold(0x63, |acc, k| acc ^ inv.rotate_left(k))
}

/// First 32 output bits for n = 8 and the all-zero seed, written out step by
/// step with nothing shared with the library beyond the bit conventions.
fn straight_line_golden() -> u32 {
    const N: usize = 8;
    let len = 9 * N as u32;
    let two = BigUint::from(2u32);
    let scaled = (two.pow(len) + (BigUint::from(5u32) * two.pow(2 * len)).sqrt()) / &two;
    let frac = scaled % two.pow(len);
    let phi: Vec<u8> = (0..len).map(|k| frac.bit((len - 1 - k) as u64) as u8).collect();
    let mut s: Vec<u8> = phi[..N].to_vec();
    let mut o = [0u8; N];
    for (j, byte) in o.iter_mut().enumerate() {
        *byte = phi[N + 8 * j..N + 8 * j + 8].iter().fold(0, |acc, &b| (acc << 1) | b);
    }
    let mut idx = o;
    let mut c = 0u32;
    let tick = |s: &mut Vec<u8>, idx: &mut [u8; N], o: &[u8; N], c: &mut u32| {
        let old = s.clone();
        for j in 0..N {
            let x = 4 * old[(j + N - 1) % N] + 2 * old[j] + old[(j + 1) % N];
            s[j] = ((algebraic_sbox(idx[j]) ^ o[j]) >> x) & 1;
            idx[j] = idx[j].wrapping_add(1);
        }
        *c += 1;
    };
    let mut out = 0u32;
    for _ in 0..4 {
        let mut v = [0u8; N];
        for _ in 0..4 {
            for _ in 0..N / 4 {
                tick(&mut s, &mut idx, &o, &mut c);
            }
            for j in 0..N {
                v[j] ^= s[j];
            }
        }
        // 32 bits use 64 steps, well before the first remix
        assert!(c < 256);
        for b in v {
            out = (out << 1) | b as u32;
        }
    }
    out
}

/// Frozen trace from a separate implementation of the generator.
const GOLDEN_N8_ZERO_SEED: u32 = 0x2024_d578;

fn chasm_scaffolding() -> Verdict {
    let printed: Vec<u8> = SBOX_TABLE.split_whitespace().map(|h| u8::from_str_radix(h, 16).unwrap()).collect();
    let table_ok = printed.len() == 256 && printed[..] == SBOX[..];
    let algebra_ok = (0..=255u8).all(|x| algebraic_sbox(x) == SBOX[x as usize]);
    let perm_ok = SBOX.iter().collect::<BTreeSet<_>>().len() == 256;

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let seed: BitVector = (0..9 * 16).map(|_| rng.gen::<bool>()).collect();
    let a = Chasm::new(&seed).unwrap().generate_bits(1_000_000);
    let b = Chasm::new(&seed).unwrap().generate_bits(1_000_000);
    let deterministic = a == b && a.len() == 1_000_000;

    // drive the reference state to the call that remixes, then replay it by hand
    let mut st = ChasmState::initialize(&seed).unwrap();
    while st.c + 16 < 256 {
        st.next();
    }
    let before = st.clone();
    let mut manual = before.clone();
    for _ in 0..16 {
        manual.time_step();
    }
    let s_after_blocks = manual.s.clone();
    let mut u = Vec::new();
    for _ in 0..8 {
        manual.time_step();
        u.extend(manual.s.iter());
    }
    let remixed: Vec<u8> = before
        .o
        .iter()
        .enumerate()
        .map(|(j, &o)| o ^ u[8 * j..8 * j + 8].iter().fold(0u8, |acc, &b| (acc << 1) | b as u8))
        .collect();
    st.next();
    let remix_ok = st.c == 0 && st.s == s_after_blocks && st.o == remixed && st.o != before.o && st.i == manual.i;

    let lib = Chasm::new(&BitVector::zeros(72)).unwrap().generate_bits(32).to_code() as u32;
    let reference = straight_line_golden();
    let golden_ok = lib == GOLDEN_N8_ZERO_SEED && reference == GOLDEN_N8_ZERO_SEED;
    verdict(
        table_ok && algebra_ok && perm_ok && deterministic && remix_ok && golden_ok,
        format!(
            "s-box table {table_ok}, algebraic {algebra_ok}, permutation {perm_ok}; 10^6-bit determinism {deterministic}; \
             remix {remix_ok}; golden {lib:08x} (reference {reference:08x}, frozen {GOLDEN_N8_ZERO_SEED:08x})"
        ),
    )
}

// ---------------------------------------------------------------- 10

const SEQ_BITS: usize = 1_000_000;
const SEQUENCES: usize = 100;
const SEEDS: usize = 20;

fn chasm_statistics() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut groups = Vec::new();
    let mut notes = Vec::new();
    let mut all_proportions_ok = true;
    for n in [8usize, 16] {
        let seeds: Vec<BitVector> = (0..SEEDS).map(|_| (0..9 * n).map(|_| rng.gen::<bool>()).collect()).collect();
        let per_seed = SEQUENCES / SEEDS;
        let results: Vec<(f64, f64, Option<f64>, usize)> = seeds
            .par_iter()
            .flat_map_iter(|seed| {
                let mut g = Chasm::new(seed).unwrap();
                (0..per_seed)
                    .map(|_| {
                        let bits = g.generate_bits(SEQ_BITS);
                        (
                            monobit(&bits).unwrap(),
                            block_frequency(&bits, 128).unwrap(),
                            runs(&bits).unwrap(),
                            bits.count_ones(),
                        )
                        // collected eagerly so the generator advances in order
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
        let ones: usize = results.iter().map(|r| r.3).sum();
        let bias = ones as f64 / (SEQUENCES * SEQ_BITS) as f64 - 0.5;
        for (name, ps) in [
            ("monobit", results.iter().map(|r| Some(r.0)).collect::<Vec<_>>()),
            ("block", results.iter().map(|r| Some(r.1)).collect()),
            ("runs", results.iter().map(|r| r.2).collect()),
        ] {
            let passed = ps.iter().filter(|p| p.is_some_and(|p| p >= ALPHA)).count();
            let applicable: Vec<f64> = ps.iter().flatten().copied().collect();
            let uniform_p = group_analysis(&applicable, ALPHA).map(|g| g.uniformity_p).unwrap_or(0.0);
            all_proportions_ok &= passed >= 96;
            groups.push(uniform_p >= 1e-4);
            notes.push(format!("n={n} {name} {passed}/100 uniformity p={uniform_p:.4}"));
        }
        notes.push(format!("n={n} ones bias {:+.5}%", 100.0 * bias));
    }
    let uniform_groups = groups.iter().filter(|&&g| g).count();
    let elapsed = start.elapsed();
    verdict(
        all_proportions_ok && uniform_groups >= 5 && elapsed < Duration::from_secs(1800),
        format!("{}; {uniform_groups}/6 groups uniform; {elapsed:.1?}", notes.join(", ")),
    )
}

// ---------------------------------------------------------------- 11

fn naive_berlekamp_massey(s: &[u8]) -> usize {
    let n = s.len();
    let (mut c, mut b) = (vec![0u8; n + 1], vec![0u8; n + 1]);
    c[0] = 1;
    b[0] = 1;
    let (mut l, mut m) = (0usize, 1usize);
    for i in 0..n {
        let d = (0..=l).fold(0, |acc, j| acc ^ (c[j] & s[i - j]));
        if d == 0 {
            m += 1;
        } else if 2 * l <= i {
            let t = c.clone();
            for j in 0..=n - m {
                c[j + m] ^= b[j];
            }
            l = i + 1 - l;
            b = t;
            m = 1;
        } else {
            for j in 0..=n - m {
                c[j + m] ^= b[j];
            }
            m += 1;
        }
    }
    l
}

fn linear_complexity_screen() -> Verdict {
    let n = 129;
    let len = 10_000;
    let f = RuleVector::uniform(Rule(30), n).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let seeds: Vec<BitVector> = (0..10).map(|_| (0..n).map(|_| rng.gen::<bool>()).collect()).collect();
    let values: Vec<(usize, usize)> = seeds
        .par_iter()
        .enumerate()
        .map(|(k, seed)| {
            let seq = temporal_sequence(&f, seed, center(n), len, Boundary::Cyclic).unwrap().bits;
            let fast = linear_complexity(&seq);
            // cross-check the word-level implementation on one seed
            let slow = if k == 0 { naive_berlekamp_massey(&seq.iter().map(u8::from).collect::<Vec<_>>()) } else { fast };
            (fast, slow)
        })
        .collect();
    let agree = values.iter().all(|(a, b)| a == b);
    let min = values.iter().map(|v| v.0).min().unwrap();
    verdict(
        agree && values.iter().all(|v| v.0 * 100 >= 45 * len),
        format!("complexities {:?}, min ratio {:.4}, oracle agreement {agree}", values.iter().map(|v| v.0).collect::<Vec<_>>(), min as f64 / len as f64),
    )
}

#[test]
fn acceptance_criteria() {
    let mut results: BTreeMap<usize, (&str, Verdict)> = BTreeMap::new();
    let mut documented = BTreeMap::new();
    results.insert(1, ("toggle inversion exactness", toggle_inversion()));
    let (v2, d2) = predecessor_histograms();
    documented.insert(2, d2);
    results.insert(2, ("rule-30 predecessor histograms", v2));
    results.insert(3, ("prior-state and fixed-pattern tables", prior_tables()));
    results.insert(4, ("linear cyclic max periods", linear_periods()));
    results.insert(5, ("linear analysis reproductions", linear_reproductions()));
    results.insert(6, ("FSCA matches elementary CA", fsca_matches_ca()));
    results.insert(7, ("SAT compiler soundness and completeness", sat_compiler()));
    let (v8, d8) = seed_recovery();
    documented.insert(8, d8);
    results.insert(8, ("seed recovery", v8));
    results.insert(9, ("Chasm correctness scaffolding", chasm_scaffolding()));
    results.insert(10, ("Chasm statistical behavior", chasm_statistics()));
    results.insert(11, ("rule-30 linear complexity screen", linear_complexity_screen()));

    for (k, (name, v)) in &results {
        println!("criterion {k:>2}: {} {name}: {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
    }
    for (k, (name, v)) in &results {
        match documented.get(k) {
            // a known discrepancy: it must fail exactly as analysed
            Some(&matches_analysis) => assert!(!v.pass && matches_analysis, "criterion {k} ({name}) no longer matches its documented outcome"),
            None => assert!(v.pass, "criterion {k} ({name}) failed: {}", v.detail),
        }
    }
}
