use chasmlab::ca::center;
use chasmlab::chasm::{golden_ratio_bits, SBOX};
use chasmlab::gf2::{affine_map_of, gf2_power_sum};
use chasmlab::invert::{predecessor_histogram, prior_table};
use chasmlab::linear::{best_max_period, matching_seeds, max_period, ruleset_census, seed_differences, sequence_seed_map};
use chasmlab::sat::{compile, Cnf3};
use chasmlab::stats::structured_seeds;
use chasmlab::{temporal_sequence, BitVector, Boundary, Rule, RuleVector};

use crate::{CliResult, Failure};

type Check = (&'static str, fn() -> Result<bool, chasmlab::Error>);

fn rv(s: &str) -> Result<RuleVector, chasmlab::Error> {
    RuleVector::parse(s, None)
}

const CHECKS: &[Check] = &[
    ("rule 30 priors of 010", || {
        let t = prior_table(Rule(30), 3)?;
        let row = t.row("010").expect("all patterns present");
        let preds: Vec<String> = row.preds.iter().map(|p| p.to_string()).collect();
        Ok(preds == ["10101", "10110", "10111", "11000"] && row.ones == [4, 1, 3, 2, 2])
    }),
    ("rule 30 predecessor histogram, n=6", || Ok(predecessor_histogram(Rule(30), 6)? == [12, 41, 10, 1])),
    ("max periods of 90/150 vectors, n=5,7,9", || {
        let fam = [Rule(90), Rule(150)];
        Ok([5, 7, 9].iter().map(|&n| best_max_period(n, &fam).map(|b| b.0)).collect::<Result<Vec<_>, _>>()? == [8, 14, 30])
    }),
    ("rule 90, n=5: M^4 = M and M + M^2 + M^3 = 0", || {
        let m = affine_map_of(&RuleVector::uniform(Rule(90), 5)?)?.m;
        Ok(m.pow(4) == m && gf2_power_sum(&m, 3)?.1.is_zero())
    }),
    ("[90x8,150] period 28, [150x5,90x4] period 30", || {
        Ok(max_period(&rv("90x8,150")?)? == 28 && max_period(&rv("150x5,90x4")?)? == 30)
    }),
    ("matching seeds: edge rule 90 unique, symmetric vector 16", || {
        let seed = BitVector::parse_bits("110010110")?;
        let one = matching_seeds(&rv("150x8,90")?, &seed, 9)?;
        let sym = matching_seeds(&rv("150x4,90,150x4")?, &BitVector::parse_bits("010110110")?, 9)?;
        Ok(one == [seed] && sym.len() == 16)
    }),
    ("[90x8,150] vs [90x8,105] seed difference 101101101", || {
        let d = seed_differences(&sequence_seed_map(&rv("90x8,150")?, 9)?, &sequence_seed_map(&rv("90x8,105")?, 9)?);
        Ok(!d.is_empty() && d.values().all(|x| x.to_string() == "101101101"))
    }),
    ("[90x8,105] seed 417 center sequence", || {
        let f = rv("90x8,105")?;
        let seq = temporal_sequence(&f, &BitVector::from_code(417, 9), center(9), 19, Boundary::Cyclic)?;
        Ok(seq.bits.to_string() == "0100011010001101000")
    }),
    ("census rows 110111101 and 110000001", || {
        let rows = ruleset_census(9)?;
        let get = |r: &str| rows.iter().find(|x| x.ruleset == r).map(|x| (x.period, x.sequences));
        Ok(get("110111101") == Some((30, 511)) && get("110000001") == Some((1, 256)))
    }),
    ("example formula layout", || {
        let r = compile(&Cnf3::new(&[[1, 2, -3], [1, 3, 5], [-2, -4, 5], [3, 4, -5]])?)?;
        Ok(r.n() == 12 && r.slots == [0, 2, 5, 7, 10] && r.k <= 20)
    }),
    ("S-Box corners and golden ratio byte", || {
        Ok(SBOX[0] == 0x63 && SBOX[0xff] == 0x16 && golden_ratio_bits(8).to_bytes() == [0x9e])
    }),
    ("structured seeds 1 and 2", || {
        let s = structured_seeds(8)?;
        Ok(s[0].is_zero() && s[1].to_string() == "01".repeat(36))
    }),
];

const KNOWN_DIFFERENCES: &[&str] = &[
    "rule 30 n=9 predecessor histogram computes to {0:57, 1:399, 2:55, 3:1}; the expected {0:57, 1:393, 2:61, 3:1} sums to 518 predecessors for 512 states",
];

pub fn run() -> CliResult {
    let mut failed = 0;
    for (name, check) in CHECKS {
        let ok = match check() {
            Ok(ok) => ok,
            Err(e) => {
                println!("ERROR {name}: {e}");
                failed += 1;
                continue;
            }
        };
        println!("{} {name}", if ok { "ok  " } else { "FAIL" });
        failed += usize::from(!ok);
    }
    for note in KNOWN_DIFFERENCES {
        println!("note {note}");
    }
    if failed > 0 {
        return Err(Failure::Verification(format!("{failed} of {} checks failed", CHECKS.len())));
    }
    Ok(())
}
