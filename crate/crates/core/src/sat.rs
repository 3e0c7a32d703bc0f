//! 3-CNF formulas and their compilation into simple FSCA that evaluate every
//! clause of the formula from an encoded assignment.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::bits::BitVector;
use crate::error::{Error, Result};
use crate::fsca::{verify_certificate, CellBuilder, Configuration, Fsca, StateId, TransitionKind};

/// A literal over variable `var` (1-based), complemented when `negated`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub var: usize,
    pub negated: bool,
}

/// A 3-CNF formula as a flat literal array; clause i is literals[3i..3i+3].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cnf3 {
    vars: usize,
    literals: Vec<Literal>,
    /// DIMACS number of each dense variable, index 0 for variable 1.
    names: Vec<u64>,
}

impl Cnf3 {
    /// Builds a formula from signed DIMACS-style literals. Variables are
    /// renumbered densely in increasing order of their original numbers.
    pub fn new(clauses: &[[i64; 3]]) -> Result<Self> {
        if clauses.is_empty() {
            return Err(Error::InvalidFormula("empty formula".into()));
        }
        let mut seen = BTreeSet::new();
        for (ci, cl) in clauses.iter().enumerate() {
            if cl.contains(&0) {
                return Err(Error::InvalidFormula(format!("clause {} contains variable 0", ci + 1)));
            }
            let vars: BTreeSet<u64> = cl.iter().map(|l| l.unsigned_abs()).collect();
            if vars.len() < 3 {
                return Err(Error::InvalidFormula(format!("variable repeated in clause {}", ci + 1)));
            }
            let mut key = *cl;
            key.sort_unstable();
            if !seen.insert(key) {
                return Err(Error::InvalidFormula(format!("duplicate clause {}", ci + 1)));
            }
        }
        let names: Vec<u64> =
            clauses.iter().flatten().map(|l| l.unsigned_abs()).collect::<BTreeSet<_>>().into_iter().collect();
        let dense: BTreeMap<u64, usize> = names.iter().enumerate().map(|(i, &v)| (v, i + 1)).collect();
        let literals = clauses
            .iter()
            .flatten()
            .map(|&l| Literal { var: dense[&l.unsigned_abs()], negated: l < 0 })
            .collect();
        Ok(Cnf3 { vars: names.len(), literals, names })
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn clause_count(&self) -> usize {
        self.literals.len() / 3
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn clauses(&self) -> impl Iterator<Item = &[Literal]> {
        self.literals.chunks(3)
    }

    /// Original DIMACS number of dense variable `j` (1-based).
    pub fn original_var(&self, j: usize) -> u64 {
        self.names[j - 1]
    }

    /// Occurrences of each variable, index 0 for variable 1.
    pub fn counts(&self) -> Vec<usize> {
        let mut c = vec![0; self.vars];
        for l in &self.literals {
            c[l.var - 1] += 1;
        }
        c
    }

    /// Value of each clause under `alpha` (bit j-1 is variable j).
    pub fn clause_values(&self, alpha: &BitVector) -> Result<Vec<bool>> {
        if alpha.len() != self.vars {
            return Err(Error::LengthMismatch { expected: self.vars, got: alpha.len() });
        }
        Ok(self.clauses().map(|cl| cl.iter().any(|l| alpha.get(l.var - 1) != l.negated)).collect())
    }

    pub fn is_satisfied_by(&self, alpha: &BitVector) -> Result<bool> {
        Ok(self.clause_values(alpha)?.into_iter().all(|b| b))
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.vars, self.clause_count());
        for cl in self.clauses() {
            for l in cl {
                let v = self.names[l.var - 1] as i64;
                out.push_str(&format!("{} ", if l.negated { -v } else { v }));
            }
            out.push_str("0\n");
        }
        out
    }
}

/// Parses DIMACS CNF where every clause has exactly three literals.
pub fn parse_dimacs(text: &str) -> Result<Cnf3> {
    let mut clauses = Vec::new();
    let mut cur: Vec<i64> = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('p') {
            continue;
        }
        // SATLIB files end with a `%` line followed by a stray 0
        if line.starts_with('%') {
            break;
        }
        for tok in line.split_whitespace() {
            let v: i64 = tok.parse().map_err(|_| Error::Parse(format!("bad literal {tok:?}")))?;
            if v == 0 {
                if cur.len() != 3 {
                    return Err(Error::InvalidFormula(format!(
                        "clause {} has {} literals, expected 3",
                        clauses.len() + 1,
                        cur.len()
                    )));
                }
                clauses.push([cur[0], cur[1], cur[2]]);
                cur.clear();
            } else {
                cur.push(v);
            }
        }
    }
    if !cur.is_empty() {
        return Err(Error::InvalidFormula("last clause is not terminated by 0".into()));
    }
    Cnf3::new(&clauses)
}

/// How a cell obtains its value during one routing pass.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Move {
    Keep,
    FromLeft,
    FromRight,
}

#[derive(Clone, Debug)]
pub struct CompilationResult {
    pub fsca: Fsca,
    /// Steps until the clause values appear.
    pub k: usize,
    /// Occurrences of each variable.
    pub counts: Vec<usize>,
    /// Cell receiving α_j at time 0, index 0 for variable 1.
    pub slots: Vec<usize>,
    /// Variable held by each cell after each routing pass (0 = dummy); entry 0 is the initial layout.
    pub trace: Vec<Vec<usize>>,
    /// Literal position each copy is routed to, in the order produced after spreading.
    pub destinations: Vec<usize>,
    pub spread_passes: usize,
    pub sort_passes: usize,
    clause_count: usize,
}

impl CompilationResult {
    pub fn n(&self) -> usize {
        self.fsca.n()
    }

    pub fn clause_count(&self) -> usize {
        self.clause_count
    }

    pub fn initial_value(&self, alpha: &BitVector) -> Result<BitVector> {
        layout(&self.slots, self.n(), alpha)
    }

    /// Value `(010)^c` reached exactly when every clause is true.
    pub fn target_value(&self) -> BitVector {
        satisfied_value(self.clause_count, self.n())
    }

    /// States after `k` steps with the satisfied value.
    pub fn target(&self) -> Configuration {
        Configuration { q: final_states(&self.fsca, self.k), s: self.target_value() }
    }

    pub fn manifest(&self) -> Manifest {
        Manifest {
            n: self.n(),
            k: self.k,
            c: self.clause_count,
            v: self.slots.len(),
            slots: self.slots.clone(),
            target: self.target_value().to_string(),
        }
    }
}

/// Summary written next to a serialized automaton.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub n: usize,
    pub k: usize,
    pub c: usize,
    pub v: usize,
    pub slots: Vec<usize>,
    pub target: String,
}

fn satisfied_value(c: usize, n: usize) -> BitVector {
    BitVector::from_bools((0..n).map(|i| i < 3 * c && i % 3 == 1))
}

fn final_states(a: &Fsca, k: usize) -> Vec<StateId> {
    a.cells()
        .iter()
        .map(|cell| {
            let mut q = cell.start();
            for _ in 0..k {
                q = cell.successor(q).expect("compiled cells are simple");
            }
            q
        })
        .collect()
}

fn layout(slots: &[usize], n: usize, alpha: &BitVector) -> Result<BitVector> {
    if alpha.len() != slots.len() {
        return Err(Error::LengthMismatch { expected: slots.len(), got: alpha.len() });
    }
    let mut s = BitVector::zeros(n);
    for (j, &p) in slots.iter().enumerate() {
        s.set(p, alpha.get(j));
    }
    Ok(s)
}

/// Starting cell of each variable: centered (rounding left) in a run of cells
/// as long as its occurrence count, runs laid out in variable order.
pub fn assignment_slots(counts: &[usize]) -> Vec<usize> {
    let mut i = 0;
    counts
        .iter()
        .map(|&c| {
            let p = i + (c - 1) / 2;
            i += c;
            p
        })
        .collect()
}

/// Initial value for `alpha` in the layout used by [`compile`].
pub fn initial_value(phi: &Cnf3, alpha: &BitVector) -> Result<BitVector> {
    layout(&assignment_slots(&phi.counts()), 3 * phi.clause_count(), alpha)
}

struct Builder {
    cells: Vec<CellBuilder>,
    last: Vec<StateId>,
    v: Vec<usize>,
    trace: Vec<Vec<usize>>,
}

impl Builder {
    /// One routing pass: every cell gets exactly one new state.
    fn pass(&mut self, moves: &[Move]) {
        let n = self.v.len();
        let old = self.v.clone();
        for (i, &m) in moves.iter().enumerate() {
            let (kind, src) = match m {
                Move::Keep => (TransitionKind::Center, i),
                Move::FromLeft => (TransitionKind::Left, (i + n - 1) % n),
                Move::FromRight => (TransitionKind::Right, (i + 1) % n),
            };
            self.v[i] = old[src];
            let q = self.cells[i].add_state();
            self.cells[i].add_set(kind, self.last[i], q).expect("fresh state");
            self.last[i] = q;
        }
        self.trace.push(self.v.clone());
    }
}

/// Compiles `phi` into a simple FSCA of 3c cells that, started from
/// [`initial_value`], shows `(010)^c` after `k` steps iff `alpha` satisfies
/// every clause. Copies of each assignment are first spread over a run of
/// cells, routed to their literal positions by odd-even transposition sort,
/// complemented where needed and finally ORed per clause.
pub fn compile(phi: &Cnf3) -> Result<CompilationResult> {
    let n = phi.literals.len();
    let counts = phi.counts();
    if counts.contains(&0) {
        return Err(Error::InvalidFormula("every variable must occur".into()));
    }
    let slots = assignment_slots(&counts);
    let mut v = vec![0; n];
    for (j, &p) in slots.iter().enumerate() {
        v[p] = j + 1;
    }
    let mut b = Builder {
        cells: (0..n).map(|_| CellBuilder::new()).collect(),
        last: vec![0; n],
        v: v.clone(),
        trace: vec![v],
    };
    for c in &mut b.cells {
        let q = c.add_state();
        c.set_start(q, false);
    }

    // spread: each pass grows every unfinished run by one cell at each end,
    // the right end taking the extra cell when the count is even
    let mut need: Vec<usize> = counts.iter().map(|c| c - 1).collect();
    let mut span: Vec<(usize, usize)> = slots.iter().map(|&p| (p, p)).collect();
    let mut spread_passes = 0;
    while need.iter().any(|&x| x > 0) {
        let mut moves = vec![Move::Keep; n];
        for j in 0..need.len() {
            if need[j] == 0 {
                continue;
            }
            if need[j] >= 2 {
                moves[span[j].0 - 1] = Move::FromRight;
                span[j].0 -= 1;
                need[j] -= 1;
            }
            moves[span[j].1 + 1] = Move::FromLeft;
            span[j].1 += 1;
            need[j] -= 1;
        }
        b.pass(&moves);
        spread_passes += 1;
    }

    let mut dest: Vec<Vec<usize>> = vec![Vec::new(); phi.vars];
    for (i, l) in phi.literals.iter().enumerate() {
        dest[l.var - 1].push(i);
    }
    let destinations: Vec<usize> = dest.into_iter().flatten().collect();
    let mut d = destinations.clone();

    let mut sort_passes = 0;
    let mut phase = 0;
    while d.windows(2).any(|w| w[0] > w[1]) {
        let mut moves = vec![Move::Keep; n];
        for i in (phase..n.saturating_sub(1)).step_by(2) {
            if d[i] > d[i + 1] {
                d.swap(i, i + 1);
                moves[i] = Move::FromRight;
                moves[i + 1] = Move::FromLeft;
            }
        }
        b.pass(&moves);
        sort_passes += 1;
        phase ^= 1;
    }
    debug_assert!(b.v.iter().zip(&phi.literals).all(|(&x, l)| x == l.var));

    for (i, l) in phi.literals.iter().enumerate() {
        let cell = &mut b.cells[i];
        let (q1, q2) = (cell.add_state(), cell.add_state());
        let lit = if l.negated { TransitionKind::NotCenter } else { TransitionKind::Center };
        cell.add_set(lit, b.last[i], q1)?;
        let clause = if i % 3 == 1 { TransitionKind::Or } else { TransitionKind::Const(false) };
        cell.add_set(clause, q1, q2)?;
        cell.add_set(TransitionKind::Center, q2, q2)?;
    }
    let fsca = Fsca::new(b.cells.iter().map(CellBuilder::build).collect::<Result<Vec<_>>>()?)?;
    Ok(CompilationResult {
        fsca,
        k: spread_passes + sort_passes + 2,
        counts,
        slots,
        trace: b.trace,
        destinations,
        spread_passes,
        sort_passes,
        clause_count: phi.clause_count(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Evaluation {
    pub satisfied: bool,
    pub value: BitVector,
}

/// Runs the compiled automaton for `k` steps from the encoding of `alpha`.
pub fn evaluate(result: &CompilationResult, alpha: &BitVector) -> Result<Evaluation> {
    let c0 = result.fsca.start_with_value(&result.initial_value(alpha)?)?;
    let value = result.fsca.run(&c0, result.k)?.s;
    Ok(Evaluation { satisfied: value == result.target_value(), value })
}

/// A compiled formula with constant-0 cells appended so that n = σk' for the
/// bound k' = 9c/2 + 2 on the step count.
#[derive(Clone, Debug)]
pub struct Padded {
    pub fsca: Fsca,
    pub target: Configuration,
    pub k: usize,
    pub slots: Vec<usize>,
}

impl Padded {
    pub fn initial_value(&self, alpha: &BitVector) -> Result<BitVector> {
        layout(&self.slots, self.fsca.n(), alpha)
    }
}

pub fn pad(phi: &Cnf3, sigma: usize) -> Result<Padded> {
    if sigma == 0 {
        return Err(Error::Precondition("padding factor must be at least 1".into()));
    }
    let c = phi.clause_count();
    if (9 * c * sigma) % 2 == 1 {
        return Err(Error::Precondition(format!("9cσ = {} is odd, so the cell count is not an integer", 9 * c * sigma)));
    }
    let compiled = compile(phi)?;
    let n = 9 * c * sigma / 2 + 2 * sigma;
    let k = compiled.k;
    let mut cells = compiled.fsca.cells().to_vec();
    let mut dummy = CellBuilder::new();
    let states: Vec<StateId> = (0..=k).map(|_| dummy.add_state()).collect();
    dummy.set_start(states[0], false);
    for w in states.windows(2) {
        dummy.add_set(TransitionKind::Const(false), w[0], w[1])?;
    }
    dummy.add_set(TransitionKind::Const(false), states[k], states[k])?;
    let dummy = dummy.build()?;
    cells.extend(std::iter::repeat_n(dummy, n - 3 * c));
    let fsca = Fsca::new(cells)?;
    let target = Configuration { q: final_states(&fsca, k), s: satisfied_value(c, n) };
    Ok(Padded { fsca, target, k, slots: compiled.slots })
}

/// Largest number of assignment slots searched by [`invert_small`].
pub const INVERT_SLOT_LIMIT: usize = 20;

/// Every initial value supported on `slots` that reaches `target` in `k` steps.
pub fn invert_small(a: &Fsca, target: &Configuration, k: usize, slots: &[usize]) -> Result<Vec<BitVector>> {
    if slots.len() > INVERT_SLOT_LIMIT {
        return Err(Error::BoundExceeded { what: "assignment slots", value: slots.len(), limit: INVERT_SLOT_LIMIT });
    }
    let n = a.n();
    if let Some(&p) = slots.iter().find(|&&p| p >= n) {
        return Err(Error::IndexOutOfRange { index: p, len: n });
    }
    let mut out = Vec::new();
    for mask in 0..1u64 << slots.len() {
        let mut s0 = BitVector::zeros(n);
        for (j, &p) in slots.iter().enumerate() {
            s0.set(p, (mask >> j) & 1 == 1);
        }
        if verify_certificate(a, target, k, &s0)? {
            out.push(s0);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single() -> Cnf3 {
        Cnf3::new(&[[1, 2, 3]]).unwrap()
    }

    #[test]
    fn dimacs_parsing() {
        let phi = parse_dimacs("c example\np cnf 3 1\n1 -2 3 0\n").unwrap();
        assert_eq!(phi.clause_count(), 1);
        assert_eq!(phi.literals()[1], Literal { var: 2, negated: true });
        let err = parse_dimacs("p cnf 2 1\n1 1 2 0\n").unwrap_err();
        assert!(err.to_string().contains("variable repeated"));
        assert!(parse_dimacs("1 2 0\n").is_err());
        assert!(parse_dimacs("1 2 3 0\n3 2 1 0\n").is_err());
        assert!(parse_dimacs("c nothing\n").is_err());
        let gaps = parse_dimacs("2 -7 9 0\n%\n0\n").unwrap();
        assert_eq!(gaps.vars(), 3);
        assert_eq!(gaps.original_var(2), 7);
        assert_eq!(parse_dimacs(&gaps.to_dimacs()).unwrap(), gaps);
    }

    #[test]
    fn single_clause() {
        let phi = single();
        let r = compile(&phi).unwrap();
        assert_eq!(r.trace[0], vec![1, 2, 3]);
        assert_eq!((r.spread_passes, r.sort_passes, r.k), (0, 0, 2));
        assert_eq!(r.initial_value(&BitVector::parse_bits("101").unwrap()).unwrap().to_string(), "101");
        let mut sat = 0;
        for m in 0..8 {
            let a = BitVector::from_code(m, 3);
            let e = evaluate(&r, &a).unwrap();
            assert_eq!(e.satisfied, m != 0);
            sat += e.satisfied as usize;
        }
        assert_eq!(sat, 7);
        let found = invert_small(&r.fsca, &r.target(), r.k, &r.slots).unwrap();
        assert_eq!(found.len(), 7);
    }

    #[test]
    fn unsorted_after_first_phase() {
        // destinations [0,3,1,2,4,5] look sorted to the first odd-pair phase
        let phi = Cnf3::new(&[[1, 2, 3], [1, 4, 5]]).unwrap();
        let r = compile(&phi).unwrap();
        assert_eq!(r.destinations, vec![0, 3, 1, 2, 4, 5]);
        assert_eq!(r.trace.last().unwrap(), &vec![1, 2, 3, 1, 4, 5]);
        for m in 0..32 {
            let a = BitVector::from_code(m, 5);
            assert_eq!(evaluate(&r, &a).unwrap().satisfied, phi.is_satisfied_by(&a).unwrap());
        }
    }

    #[test]
    fn padding_rejects_fractional_sizes() {
        assert!(pad(&single(), 1).is_err());
        let p = pad(&single(), 2).unwrap();
        assert_eq!(p.fsca.n(), 9 + 4);
        assert!(p.fsca.is_simple());
    }

    #[test]
    fn all_zero_assignment_is_all_zero_value() {
        let phi = Cnf3::new(&[[1, -2, 3], [2, 3, -4]]).unwrap();
        assert!(initial_value(&phi, &BitVector::zeros(4)).unwrap().is_zero());
    }

    fn five_var() -> Cnf3 {
        Cnf3::new(&[[1, 2, -3], [1, 3, 5], [-2, -4, 5], [3, 4, -5]]).unwrap()
    }

    #[test]
    fn five_variable_formula() {
        let phi = five_var();
        let r = compile(&phi).unwrap();
        assert_eq!(r.n(), 12);
        assert_eq!(r.slots, vec![0, 2, 5, 7, 10]);
        assert!(r.k <= 20, "k = {}", r.k);
        assert!(r.fsca.is_simple());
        assert!(r.fsca.cells().iter().all(|c| c.states() == r.k + 1));
        let a = BitVector::parse_bits("10000").unwrap();
        assert!(evaluate(&r, &a).unwrap().satisfied);
        assert!(!evaluate(&r, &BitVector::zeros(5)).unwrap().satisfied);
        assert_eq!(evaluate(&r, &BitVector::zeros(5)).unwrap().value.to_string(), "010000010010");
    }
}
