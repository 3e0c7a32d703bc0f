//! Seed recovery from a temporal sequence.
//!
//! `ms_recover` is the classic guess-the-right-half attack: guess the cells
//! right of the observed one, run that triangle forward, then solve the left
//! triangle backwards with the toggle identity. `ms_recover_improved` works
//! on a full (time × cell) grid, fills cells by local deduction and only
//! guesses ("spends a coin") when nothing else can be deduced.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::bits::{BitVector, StateVector};
use crate::ca::{center, temporal_sequence, Boundary, Rule, RuleVector};
use crate::error::{Error, Result};
use crate::invert::{invert_toggle_rule, mirror_rule};

/// Left-adjacent values forced by the observed sequence of a rule-30 cell.
///
/// When σ_t = 1 the OR term is 1, so the left neighbor at t is ¬σ_{t+1}.
pub fn left_adjacent_constraints(sigma: &BitVector) -> Result<Vec<(usize, bool)>> {
    if sigma.len() < 2 {
        return Err(Error::Precondition("sequence needs at least 2 bits".into()));
    }
    Ok((0..sigma.len() - 1).filter(|&t| sigma.get(t)).map(|t| (t, !sigma.get(t + 1))).collect())
}

/// Every seed whose center-cell sequence starts with `sigma`, under a uniform toggle rule.
pub fn ms_recover(rule: Rule, sigma: &BitVector, n: usize) -> Result<Vec<StateVector>> {
    if n < 3 {
        return Err(Error::Precondition("need at least 3 cells".into()));
    }
    let c = center(n);
    if sigma.len() < c + 1 {
        return Err(Error::Precondition(format!("sequence must have at least {} bits", c + 1)));
    }
    if n - 1 - c > 40 {
        return Err(Error::BoundExceeded { what: "guessed cells", value: n - 1 - c, limit: 40 });
    }
    let seeds = if rule.is_left_toggle() {
        recover_left_toggle(rule, sigma, n, c)
    } else if rule.is_right_toggle() {
        recover_left_toggle(mirror_rule(rule), sigma, n, n - 1 - c)
            .into_iter()
            .map(|s| BitVector::from_bools((0..n).rev().map(|i| s.get(i))))
            .collect()
    } else {
        return Err(Error::NotToggle(rule.0));
    };
    let f = RuleVector::uniform(rule, n)?;
    let mut out = BTreeSet::new();
    for s in seeds {
        if temporal_sequence(&f, &s, c, sigma.len(), Boundary::Cyclic)?.bits == *sigma {
            out.insert(s);
        }
    }
    Ok(out.into_iter().collect())
}

/// Candidate seeds for a left-toggle rule observed at `cell`; unverified.
fn recover_left_toggle(rule: Rule, sigma: &BitVector, n: usize, cell: usize) -> Vec<StateVector> {
    let g = |w: bool, r: bool| rule.apply(false, w, r);
    let rows = sigma.len().min(n + 1);
    let right = n - 1 - cell;
    let mut out = Vec::new();
    let mut grid = vec![None::<bool>; rows * n];
    for guess in 0..1u64 << right {
        grid.iter_mut().for_each(|v| *v = None);
        let at = |t: usize, j: usize| t * n + j;
        for t in 0..rows {
            grid[at(t, cell)] = Some(sigma.get(t));
        }
        for k in 0..right {
            grid[at(0, cell + 1 + k)] = Some((guess >> (right - 1 - k)) & 1 == 1);
        }
        // right triangle, forward; the far right cell would need the unknown wrap-around neighbor
        for t in 1..rows {
            for j in cell + 1..n - 1 {
                if let (Some(a), Some(b), Some(c)) = (grid[at(t - 1, j - 1)], grid[at(t - 1, j)], grid[at(t - 1, j + 1)]) {
                    grid[at(t, j)] = Some(rule.apply(a, b, c));
                }
            }
        }
        // left triangle, backward through s[t][j-1] = s[t+1][j] ^ g(s[t][j], s[t][j+1])
        for j in (1..=cell).rev() {
            for t in 0..rows - 1 {
                if let (Some(up), Some(w), Some(r)) = (grid[at(t + 1, j)], grid[at(t, j)], grid[at(t, (j + 1) % n)]) {
                    grid[at(t, j - 1)] = Some(up ^ g(w, r));
                }
            }
        }
        let unknown: Vec<usize> = (0..n).filter(|&j| grid[at(0, j)].is_none()).collect();
        for fill in 0..1u64 << unknown.len() {
            let mut seed = BitVector::zeros(n);
            for j in 0..n {
                let v = match unknown.iter().position(|&u| u == j) {
                    Some(k) => (fill >> k) & 1 == 1,
                    None => grid[at(0, j)].unwrap(),
                };
                seed.set(j, v);
            }
            out.push(seed);
        }
    }
    out
}

/// Every seed whose center-cell sequence starts with `sigma`, by enumeration.
pub fn brute_force_seeds(rule: Rule, sigma: &BitVector, n: usize) -> Result<Vec<StateVector>> {
    if n > crate::invert::EXHAUSTIVE_LIMIT {
        return Err(Error::BoundExceeded { what: "cells", value: n, limit: crate::invert::EXHAUSTIVE_LIMIT });
    }
    if sigma.len() > 64 {
        return Err(Error::BoundExceeded { what: "sequence length", value: sigma.len(), limit: 64 });
    }
    let f = RuleVector::uniform(rule, n)?;
    let stepper = crate::ca::CodeStepper::new(&f, Boundary::Cyclic)?;
    let target = sigma.to_code();
    let c = center(n);
    Ok((0..1u64 << n)
        .filter(|&x| stepper.sequence_code(x, c, sigma.len()) == target)
        .map(|x| BitVector::from_code(x, n))
        .collect())
}

/// A guessed cell: time step, cell index (in the caller's frame) and the chosen bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Coin {
    pub t: usize,
    pub cell: usize,
    pub bit: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Recovery {
    pub seed: StateVector,
    /// Coins on the branch that produced `seed`, in the order they were spent.
    pub coins: Vec<Coin>,
    /// Search nodes visited, including abandoned branches.
    pub nodes: usize,
}

/// Search-node limit for [`ms_recover_improved`].
pub const DEFAULT_NODE_BUDGET: usize = 1 << 20;

/// Grid cells are -1 (unknown), 0 or 1.
#[derive(Clone)]
struct Grid {
    n: usize,
    rows: usize,
    cells: Vec<i8>,
}

struct Contradiction;

impl Grid {
    #[inline]
    fn idx(&self, t: usize, j: isize) -> usize {
        t * self.n + j.rem_euclid(self.n as isize) as usize
    }

    #[inline]
    fn get(&self, t: usize, j: isize) -> i8 {
        self.cells[self.idx(t, j)]
    }

    fn assign(&mut self, t: usize, j: isize, v: bool) -> std::result::Result<bool, Contradiction> {
        let k = self.idx(t, j);
        match self.cells[k] {
            -1 => {
                self.cells[k] = v as i8;
                Ok(true)
            }
            x if (x == 1) == v => Ok(false),
            _ => Err(Contradiction),
        }
    }

    fn row_known(&self, t: usize) -> bool {
        self.cells[t * self.n..(t + 1) * self.n].iter().all(|&v| v >= 0)
    }

    fn row(&self, t: usize) -> StateVector {
        self.cells[t * self.n..(t + 1) * self.n].iter().map(|&v| v == 1).collect()
    }
}

/// Deduces every cell of a window that takes the same value in all
/// assignments consistent with the rule; `pred` cells sit in row t, `succ`
/// cells in row t+1.
fn window_deduce(rule: Rule, g: &mut Grid, t: usize, a: isize, w: usize) -> std::result::Result<bool, Contradiction> {
    let pw = w + 2;
    let pred: Vec<i8> = (0..pw).map(|k| g.get(t, a - 1 + k as isize)).collect();
    let succ: Vec<i8> = (0..w).map(|k| g.get(t + 1, a + k as isize)).collect();
    if pred.iter().all(|&v| v >= 0) && succ.iter().all(|&v| v >= 0) {
        // fully known: only a consistency check
        let ok = (0..w).all(|k| rule.apply(pred[k] == 1, pred[k + 1] == 1, pred[k + 2] == 1) == (succ[k] == 1));
        return if ok { Ok(false) } else { Err(Contradiction) };
    }
    let mut and = !0u32;
    let mut or = 0u32;
    let mut any = false;
    'outer: for p in 0..1u32 << pw {
        for (k, &v) in pred.iter().enumerate() {
            if v >= 0 && ((p >> k) & 1) as i8 != v {
                continue 'outer;
            }
        }
        let mut full = p;
        for k in 0..w {
            let o = rule.apply(p >> k & 1 == 1, p >> (k + 1) & 1 == 1, p >> (k + 2) & 1 == 1);
            if succ[k] >= 0 && (succ[k] == 1) != o {
                continue 'outer;
            }
            full |= (o as u32) << (pw + k);
        }
        and &= full;
        or |= full;
        any = true;
    }
    if !any {
        return Err(Contradiction);
    }
    let mut changed = false;
    for k in 0..pw + w {
        let fixed_one = (and >> k) & 1 == 1;
        let fixed_zero = (or >> k) & 1 == 0;
        if fixed_one || fixed_zero {
            let (row, j) = if k < pw { (t, a - 1 + k as isize) } else { (t + 1, a + (k - pw) as isize) };
            changed |= g.assign(row, j, fixed_one)?;
        }
    }
    Ok(changed)
}

fn propagate(rule: Rule, g: &mut Grid) -> std::result::Result<(), Contradiction> {
    loop {
        let mut changed = false;
        // single-cell constraints first: cheap and they cover the toggle identity,
        // forward fills and the OR-term deductions
        for t in 0..g.rows - 1 {
            for j in 0..g.n as isize {
                changed |= window_deduce(rule, g, t, j, 1)?;
            }
        }
        if !changed {
            // wider windows pick up forced predecessor cells such as the 010 pattern
            for t in 0..g.rows - 1 {
                for j in 0..g.n as isize {
                    changed |= window_deduce(rule, g, t, j, 3)?;
                }
            }
        }
        if !changed {
            return Ok(());
        }
    }
}

struct Search<'a> {
    rule: Rule,
    f: RuleVector,
    sigma: &'a BitVector,
    budget: usize,
    nodes: usize,
}

enum Outcome {
    Found(StateVector, Vec<Coin>),
    Dead,
}

impl Search<'_> {
    fn run(&mut self, mut g: Grid, coins: Vec<Coin>) -> Result<Outcome> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::NoConsistentSeed(format!("search budget of {} nodes exhausted", self.budget)));
        }
        if propagate(self.rule, &mut g).is_err() {
            return Ok(Outcome::Dead);
        }
        if g.row_known(0) {
            let seed = g.row(0);
            let seq = temporal_sequence(&self.f, &seed, g.n - 1, self.sigma.len(), Boundary::Cyclic)?;
            return Ok(if seq.bits == *self.sigma { Outcome::Found(seed, coins) } else { Outcome::Dead });
        }
        // a fully known row is inverted with the toggle algorithm; branches here are not coins
        if let Some(t) = (1..g.rows).find(|&t| g.row_known(t) && !g.row_known(t - 1)) {
            let preds = invert_toggle_rule(&self.f, &g.row(t))?;
            for p in preds {
                let mut h = g.clone();
                let ok = (0..g.n).all(|j| h.assign(t - 1, j as isize, p.get(j)).is_ok());
                if ok {
                    if let Outcome::Found(s, c) = self.run(h, coins.clone())? {
                        return Ok(Outcome::Found(s, c));
                    }
                }
            }
            return Ok(Outcome::Dead);
        }
        let (t, j) = match pick_coin_cell(&g) {
            Some(c) => c,
            None => return Ok(Outcome::Dead),
        };
        for bit in [false, true] {
            let mut h = g.clone();
            if h.assign(t, j as isize, bit).is_err() {
                continue;
            }
            let mut next = coins.clone();
            next.push(Coin { t, cell: j, bit });
            if let Outcome::Found(s, c) = self.run(h, next)? {
                return Ok(Outcome::Found(s, c));
            }
        }
        Ok(Outcome::Dead)
    }
}

/// Bottom-most unknown cell of the triangle whose right neighbor is known,
/// leftmost among ties; falls back to any unknown triangle cell.
fn pick_coin_cell(g: &Grid) -> Option<(usize, usize)> {
    let top = g.rows.min(g.n);
    for t in (0..top).rev() {
        for j in t..g.n {
            if g.get(t, j as isize) < 0 && j + 1 < g.n && g.get(t, j as isize + 1) >= 0 {
                return Some((t, j));
            }
        }
    }
    for t in (0..top).rev() {
        for j in t..g.n {
            if g.get(t, j as isize) < 0 {
                return Some((t, j));
            }
        }
    }
    (0..g.rows).flat_map(|t| (0..g.n).map(move |j| (t, j))).find(|&(t, j)| g.get(t, j as isize) < 0)
}

/// Recovers one seed reproducing `sigma` at the center cell, spending as few
/// guessed bits as the deduction rules allow.
///
/// The grid is rotated so the observed cell is the rightmost one; coin
/// positions in the result are reported in that rotated frame. Guesses are
/// tried 0 before 1, depth first, so results are reproducible.
pub fn ms_recover_improved(rule: Rule, sigma: &BitVector, n: usize) -> Result<Recovery> {
    ms_recover_improved_with_budget(rule, sigma, n, DEFAULT_NODE_BUDGET)
}

pub fn ms_recover_improved_with_budget(rule: Rule, sigma: &BitVector, n: usize, budget: usize) -> Result<Recovery> {
    if !rule.is_left_toggle() {
        return Err(Error::UnsupportedRule(rule.0, "coin-based recovery needs a left-toggle rule"));
    }
    if n < 3 {
        return Err(Error::Precondition("need at least 3 cells".into()));
    }
    if sigma.len() < n {
        return Err(Error::Precondition(format!("sequence must have at least n = {n} bits")));
    }
    let rows = sigma.len();
    let mut g = Grid { n, rows, cells: vec![-1; rows * n] };
    for t in 0..rows {
        g.cells[t * n + n - 1] = sigma.get(t) as i8;
    }
    let mut search = Search { rule, f: RuleVector::uniform(rule, n)?, sigma, budget, nodes: 0 };
    match search.run(g, Vec::new())? {
        Outcome::Found(rotated, coins) => {
            // rotated[j] = original[j - d] with d = n-1-c
            let d = n - 1 - center(n);
            let seed = rotated.rotate_left(d);
            let f = RuleVector::uniform(rule, n)?;
            let check = temporal_sequence(&f, &seed, center(n), sigma.len(), Boundary::Cyclic)?;
            if check.bits != *sigma {
                return Err(Error::NoConsistentSeed("recovered seed failed forward verification".into()));
            }
            Ok(Recovery { seed, coins, nodes: search.nodes })
        }
        Outcome::Dead => Err(Error::NoConsistentSeed("no seed reproduces the sequence".into())),
    }
}
