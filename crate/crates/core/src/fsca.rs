//! Finite state cellular automata: cells whose local rule depends on an
//! internal state, stepped synchronously on a cyclic array.

use std::fmt::Write as _;

use crate::bits::BitVector;
use crate::ca::Rule;
use crate::error::{Error, Result};

pub type StateId = usize;

/// The function a transition set computes from the neighborhood λωρ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TransitionKind {
    /// Copy the left neighbor.
    Left,
    /// Copy the right neighbor.
    Right,
    /// Keep the cell's own value.
    Center,
    NotCenter,
    /// λ ∨ ω ∨ ρ.
    Or,
    Const(bool),
    /// Arbitrary function given as a Wolfram-style truth table.
    Table(u8),
}

impl TransitionKind {
    pub fn truth_table(self) -> u8 {
        match self {
            TransitionKind::Left => 0b1111_0000,
            TransitionKind::Right => 0b1010_1010,
            TransitionKind::Center => 0b1100_1100,
            TransitionKind::NotCenter => 0b0011_0011,
            TransitionKind::Or => 0b1111_1110,
            TransitionKind::Const(false) => 0,
            TransitionKind::Const(true) => 0xff,
            TransitionKind::Table(t) => t,
        }
    }

    /// Output for input index x = 4λ + 2ω + ρ.
    pub fn output(self, x: u8) -> bool {
        (self.truth_table() >> x) & 1 == 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Transition {
    pub from: StateId,
    pub input: u8,
    pub to: StateId,
    pub output: bool,
}

/// The 8 transitions of a transition set from `from` to `to`.
pub fn expand_transition_set(kind: TransitionKind, from: StateId, to: StateId) -> [Transition; 8] {
    std::array::from_fn(|x| Transition { from, input: x as u8, to, output: kind.output(x as u8) })
}

/// One cell: a total transition table over states 0..states().
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteStateCell {
    start: StateId,
    initial_output: bool,
    delta: Vec<[(StateId, bool); 8]>,
}

impl FiniteStateCell {
    pub fn new(start: StateId, initial_output: bool, delta: Vec<[(StateId, bool); 8]>) -> Result<Self> {
        let m = delta.len();
        if start >= m {
            return Err(Error::InvalidAutomaton(format!("start state {start} outside {m} states")));
        }
        for (q, row) in delta.iter().enumerate() {
            if let Some((next, _)) = row.iter().find(|(next, _)| *next >= m) {
                return Err(Error::InvalidAutomaton(format!("state {q} moves to unknown state {next}")));
            }
        }
        Ok(FiniteStateCell { start, initial_output, delta })
    }

    /// Single-state cell computing an elementary rule.
    pub fn elementary(rule: Rule) -> Self {
        let row = std::array::from_fn(|x| (0, rule.apply_index(x as u8)));
        FiniteStateCell { start: 0, initial_output: false, delta: vec![row] }
    }

    pub fn states(&self) -> usize {
        self.delta.len()
    }

    pub fn start(&self) -> StateId {
        self.start
    }

    pub fn initial_output(&self) -> bool {
        self.initial_output
    }

    pub fn delta(&self) -> &[[(StateId, bool); 8]] {
        &self.delta
    }

    #[inline]
    pub fn apply(&self, q: StateId, x: u8) -> (StateId, bool) {
        self.delta[q][x as usize]
    }

    /// The single successor of `q` when its 8 entries agree on one.
    pub fn successor(&self, q: StateId) -> Option<StateId> {
        let row = &self.delta[q];
        row.iter().all(|e| e.0 == row[0].0).then_some(row[0].0)
    }

    pub fn is_simple(&self) -> bool {
        (0..self.states()).all(|q| self.successor(q).is_some())
    }
}

/// Incremental construction of a cell from transition sets.
#[derive(Clone, Debug, Default)]
pub struct CellBuilder {
    start: StateId,
    initial_output: bool,
    delta: Vec<[Option<(StateId, bool)>; 8]>,
}

impl CellBuilder {
    pub fn new() -> Self {
        CellBuilder::default()
    }

    pub fn add_state(&mut self) -> StateId {
        self.delta.push([None; 8]);
        self.delta.len() - 1
    }

    pub fn states(&self) -> usize {
        self.delta.len()
    }

    pub fn set_start(&mut self, q: StateId, initial_output: bool) -> &mut Self {
        self.start = q;
        self.initial_output = initial_output;
        self
    }

    pub fn add_set(&mut self, kind: TransitionKind, from: StateId, to: StateId) -> Result<&mut Self> {
        for t in expand_transition_set(kind, from, to) {
            self.add(t)?;
        }
        Ok(self)
    }

    pub fn add(&mut self, t: Transition) -> Result<&mut Self> {
        let m = self.delta.len();
        if t.from >= m || t.to >= m || t.input > 7 {
            return Err(Error::InvalidAutomaton(format!("transition {t:?} refers to a missing state")));
        }
        let slot = &mut self.delta[t.from][t.input as usize];
        match slot {
            Some(old) if *old != (t.to, t.output) => {
                return Err(Error::InvalidAutomaton(format!(
                    "state {} input {:03b} defined twice",
                    t.from, t.input
                )))
            }
            _ => *slot = Some((t.to, t.output)),
        }
        Ok(self)
    }

    pub fn build(&self) -> Result<FiniteStateCell> {
        let delta = self
            .delta
            .iter()
            .enumerate()
            .map(|(q, row)| {
                let mut out = [(0, false); 8];
                for (x, e) in row.iter().enumerate() {
                    out[x] = e.ok_or_else(|| {
                        Error::InvalidAutomaton(format!("state {q} has no transition for input {x:03b}"))
                    })?;
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()?;
        FiniteStateCell::new(self.start, self.initial_output, delta)
    }
}

/// Per-cell states and value vector at one time step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Configuration {
    pub q: Vec<StateId>,
    pub s: BitVector,
}

/// Cells wired cyclically: cell i reads cells i-1, i, i+1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fsca {
    cells: Vec<FiniteStateCell>,
}

impl Fsca {
    pub fn new(cells: Vec<FiniteStateCell>) -> Result<Self> {
        if cells.len() < 3 {
            return Err(Error::InvalidAutomaton(format!("need at least 3 cells, got {}", cells.len())));
        }
        Ok(Fsca { cells })
    }

    pub fn elementary(rule: Rule, n: usize) -> Result<Self> {
        Fsca::new(vec![FiniteStateCell::elementary(rule); n])
    }

    pub fn n(&self) -> usize {
        self.cells.len()
    }

    pub fn cells(&self) -> &[FiniteStateCell] {
        &self.cells
    }

    pub fn is_simple(&self) -> bool {
        self.cells.iter().all(FiniteStateCell::is_simple)
    }

    /// Start states with the cells' initial outputs.
    pub fn start_configuration(&self) -> Configuration {
        Configuration {
            q: self.cells.iter().map(|c| c.start).collect(),
            s: self.cells.iter().map(|c| c.initial_output).collect(),
        }
    }

    /// Start states with an externally supplied value.
    pub fn start_with_value(&self, s: &BitVector) -> Result<Configuration> {
        if s.len() != self.n() {
            return Err(Error::LengthMismatch { expected: self.n(), got: s.len() });
        }
        Ok(Configuration { q: self.cells.iter().map(|c| c.start).collect(), s: s.clone() })
    }

    pub fn check(&self, c: &Configuration) -> Result<()> {
        let n = self.n();
        if c.q.len() != n || c.s.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: c.q.len().max(c.s.len()) });
        }
        for (i, (&q, cell)) in c.q.iter().zip(&self.cells).enumerate() {
            if q >= cell.states() {
                return Err(Error::InvalidAutomaton(format!("cell {i} has no state {q}")));
            }
        }
        Ok(())
    }

    pub fn step(&self, c: &Configuration) -> Result<Configuration> {
        self.check(c)?;
        Ok(self.step_unchecked(c))
    }

    fn step_unchecked(&self, c: &Configuration) -> Configuration {
        let n = self.n();
        let mut q = Vec::with_capacity(n);
        let mut s = BitVector::zeros(n);
        for (i, cell) in self.cells.iter().enumerate() {
            let l = c.s.get((i + n - 1) % n) as u8;
            let w = c.s.get(i) as u8;
            let r = c.s.get((i + 1) % n) as u8;
            let (next, out) = cell.apply(c.q[i], (l << 2) | (w << 1) | r);
            q.push(next);
            s.set(i, out);
        }
        Configuration { q, s }
    }

    pub fn run(&self, c: &Configuration, k: usize) -> Result<Configuration> {
        self.check(c)?;
        let mut cur = c.clone();
        for _ in 0..k {
            cur = self.step_unchecked(&cur);
        }
        Ok(cur)
    }

    /// Line-oriented text form: `fsca <n>`, then per cell `cell <states> <start>
    /// <initial output>` followed by `<state> <λωρ> <next> <out>` lines.
    pub fn to_text(&self) -> String {
        let mut out = format!("fsca {}\n", self.n());
        for cell in &self.cells {
            writeln!(out, "cell {} {} {}", cell.states(), cell.start, cell.initial_output as u8).unwrap();
            for (q, row) in cell.delta.iter().enumerate() {
                for (x, &(next, o)) in row.iter().enumerate() {
                    writeln!(out, "{q} {x:03b} {next} {}", o as u8).unwrap();
                }
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let bad = |line: usize, msg: &str| Error::Parse(format!("line {line}: {msg}"));
        let num = |line: usize, tok: Option<&str>| -> Result<usize> {
            tok.and_then(|t| t.parse().ok()).ok_or_else(|| bad(line, "expected a number"))
        };
        let bit = |line: usize, tok: Option<&str>| -> Result<bool> {
            match tok {
                Some("0") => Ok(false),
                Some("1") => Ok(true),
                _ => Err(bad(line, "expected 0 or 1")),
            }
        };
        let (ln, header) = lines.next().ok_or_else(|| Error::Parse("empty automaton description".into()))?;
        let mut tok = header.split_whitespace();
        if tok.next() != Some("fsca") {
            return Err(bad(ln, "missing `fsca` header"));
        }
        let n = num(ln, tok.next())?;
        let mut cells = Vec::with_capacity(n);
        for _ in 0..n {
            let (ln, l) = lines.next().ok_or_else(|| Error::Parse("missing cell".into()))?;
            let mut tok = l.split_whitespace();
            if tok.next() != Some("cell") {
                return Err(bad(ln, "expected `cell`"));
            }
            let m = num(ln, tok.next())?;
            let start = num(ln, tok.next())?;
            let init = bit(ln, tok.next())?;
            let mut b = CellBuilder::new();
            for _ in 0..m {
                b.add_state();
            }
            b.set_start(start, init);
            for _ in 0..m * 8 {
                let (ln, l) = lines.next().ok_or_else(|| Error::Parse("missing transition".into()))?;
                let mut tok = l.split_whitespace();
                let from = num(ln, tok.next())?;
                let input = tok
                    .next()
                    .filter(|t| t.len() == 3)
                    .and_then(|t| u8::from_str_radix(t, 2).ok())
                    .ok_or_else(|| bad(ln, "expected a 3-bit input"))?;
                let to = num(ln, tok.next())?;
                let output = bit(ln, tok.next())?;
                b.add(Transition { from, input, to, output }).map_err(|e| bad(ln, &e.to_string()))?;
            }
            if start >= m {
                return Err(bad(ln, "start state out of range"));
            }
            cells.push(b.build()?);
        }
        if let Some((ln, _)) = lines.next() {
            return Err(bad(ln, "trailing content"));
        }
        Fsca::new(cells)
    }
}

/// Whether starting from `start_states` with value `s0` reaches `target` in exactly `k` steps.
pub fn verify_certificate_from(
    a: &Fsca,
    start_states: &[StateId],
    s0: &BitVector,
    target: &Configuration,
    k: usize,
) -> Result<bool> {
    let c0 = Configuration { q: start_states.to_vec(), s: s0.clone() };
    a.check(target)?;
    Ok(a.run(&c0, k)? == *target)
}

/// Certificate check for a simple automaton, run from the cells' start
/// states. Both the reached states and value must match `target`.
pub fn verify_certificate(a: &Fsca, target: &Configuration, k: usize, s0: &BitVector) -> Result<bool> {
    if !a.is_simple() {
        return Err(Error::Precondition("certificate check without start states needs a simple automaton".into()));
    }
    let start: Vec<StateId> = a.cells.iter().map(|c| c.start).collect();
    verify_certificate_from(a, &start, s0, target, k)
}
