//! Toy Cook–Levin reduction for one-tape nondeterministic machines.
//!
//! # Machine files
//!
//! ```text
//! # comments start with '#'
//! start q0
//! accept qa
//! blank _
//! states q0 qa      (optional; fixes the state order)
//! symbols 0 1        (optional; symbols in transitions are added anyway)
//! q0 1 -> qa 1 S
//! q0 0 -> q0 0 R
//! ```
//!
//! Symbols are single characters, states are whitespace-free tokens and a
//! move is `L`, `R` or `S`. The accept state has no outgoing transitions
//! and is absorbing.
//!
//! # Tableau
//!
//! With step bound `t`, the tape is cells `1..=t`, the head starts on cell 1
//! and a move off either end of the tape is not available. Rows `0..=t` are
//! configurations. Variables live at `(row, column, slot)`: columns
//! `1..=t` carry per-cell variables (symbol, head, and helper variables
//! linking head, state and symbol), column 0 carries per-row variables
//! (state and transition choice). The variable number is the bit
//! concatenation `row | column | slot` with each field padded to a power of
//! two, and slot 0 is never used, so no variable is 0.
//!
//! Clauses come from a fixed list of templates instantiated at every
//! `(row, column)`; record `row | column | template` of the succinct table
//! holds the instance or a pad clause when the template does not apply.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use crate::circuit::{Circuit, CircuitBuilder, GateId, GateKind};
use crate::cnf::{Clause, Formula3CNF, Lit};
use crate::error::{Error, Result};
use crate::rom::{address_bits, select_into};
use crate::succinct::ClauseEncoding;

/// Default step bound cap.
pub const DEFAULT_STEP_CAP: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Move {
    L,
    R,
    S,
}

impl Move {
    fn parse(s: &str) -> Option<Move> {
        match s {
            "L" => Some(Move::L),
            "R" => Some(Move::R),
            "S" => Some(Move::S),
            _ => None,
        }
    }
}

/// Target of one transition: `(state, written symbol, move)`.
pub type Action = (usize, usize, Move);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ntm {
    pub states: Vec<String>,
    pub symbols: Vec<char>,
    pub blank: usize,
    pub start: usize,
    pub accept: usize,
    /// `delta[q][a]` lists the transitions from state `q` reading symbol `a`.
    pub delta: Vec<Vec<Vec<Action>>>,
}

impl Ntm {
    /// Machine with the given states and symbols and no transitions.
    pub fn new(states: &[&str], symbols: &[char], blank: char, start: &str, accept: &str) -> Result<Self> {
        let states: Vec<String> = states.iter().map(|s| s.to_string()).collect();
        let find_state = |name: &str| {
            states.iter().position(|s| s == name).ok_or_else(|| Error::Machine(format!("unknown state {name}")))
        };
        let start = find_state(start)?;
        let accept = find_state(accept)?;
        let blank = symbols
            .iter()
            .position(|&c| c == blank)
            .ok_or_else(|| Error::Machine(format!("blank {blank:?} is not a symbol")))?;
        let delta = vec![vec![Vec::new(); symbols.len()]; states.len()];
        Ok(Ntm { states, symbols: symbols.to_vec(), blank, start, accept, delta })
    }

    pub fn state(&self, name: &str) -> Result<usize> {
        self.states.iter().position(|s| s == name).ok_or_else(|| Error::Machine(format!("unknown state {name}")))
    }

    pub fn symbol(&self, c: char) -> Result<usize> {
        self.symbols.iter().position(|&s| s == c).ok_or_else(|| Error::Machine(format!("unknown symbol {c:?}")))
    }

    /// Adds `q a -> q2 b mv` by name.
    pub fn add(&mut self, q: &str, a: char, q2: &str, b: char, mv: Move) -> Result<()> {
        let (q, a, q2, b) = (self.state(q)?, self.symbol(a)?, self.state(q2)?, self.symbol(b)?);
        if q == self.accept {
            return Err(Error::Machine("the accept state cannot have transitions".into()));
        }
        if !self.delta[q][a].contains(&(q2, b, mv)) {
            self.delta[q][a].push((q2, b, mv));
        }
        Ok(())
    }

    /// Transitions as used by the tableau: the accept state loops in place.
    pub fn moves(&self, q: usize, a: usize) -> Vec<Action> {
        if q == self.accept {
            vec![(q, a, Move::S)]
        } else {
            self.delta[q][a].clone()
        }
    }

    /// Largest number of choices in any `(state, symbol)` pair (at least 1).
    pub fn branching(&self) -> usize {
        (0..self.states.len())
            .flat_map(|q| (0..self.symbols.len()).map(move |a| (q, a)))
            .map(|(q, a)| self.moves(q, a).len())
            .max()
            .unwrap_or(1)
            .max(1)
    }

    pub fn parse(text: &str) -> Result<Ntm> {
        let mut start = None;
        let mut accept = None;
        let mut blank = None;
        let mut symbols: Vec<char> = Vec::new();
        let mut states: Vec<String> = Vec::new();
        let mut rules: Vec<(usize, [String; 5])> = Vec::new();
        let single = |tok: &str, line: usize| -> Result<char> {
            let mut cs = tok.chars();
            match (cs.next(), cs.next()) {
                (Some(c), None) => Ok(c),
                _ => Err(Error::Machine(format!("line {line}: symbol {tok:?} is not one character"))),
            }
        };
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let toks: Vec<&str> = content.split_whitespace().collect();
            match toks[0] {
                "start" | "accept" if toks.len() == 2 => {
                    let slot = if toks[0] == "start" { &mut start } else { &mut accept };
                    if slot.replace(toks[1].to_string()).is_some() {
                        return Err(Error::Machine(format!("line {line}: duplicate {} line", toks[0])));
                    }
                }
                "blank" if toks.len() == 2 => {
                    if blank.replace(single(toks[1], line)?).is_some() {
                        return Err(Error::Machine(format!("line {line}: duplicate blank line")));
                    }
                }
                "states" => states.extend(toks[1..].iter().map(|s| s.to_string())),
                "symbols" => {
                    for t in &toks[1..] {
                        symbols.push(single(t, line)?);
                    }
                }
                _ if toks.len() == 6 && toks[2] == "->" => {
                    single(toks[1], line)?;
                    single(toks[4], line)?;
                    if Move::parse(toks[5]).is_none() {
                        return Err(Error::Machine(format!("line {line}: move {:?} is not L, R or S", toks[5])));
                    }
                    let r = [toks[0], toks[1], toks[3], toks[4], toks[5]].map(String::from);
                    rules.push((line, r));
                }
                _ => return Err(Error::Machine(format!("line {line}: cannot parse {content:?}"))),
            }
        }
        let start = start.ok_or_else(|| Error::Machine("missing start line".into()))?;
        let accept = accept.ok_or_else(|| Error::Machine("missing accept line".into()))?;
        let blank = blank.ok_or_else(|| Error::Machine("missing blank line".into()))?;
        let mut push_state = |s: &str| {
            if !states.iter().any(|x| x == s) {
                states.push(s.to_string());
            }
        };
        push_state(&start);
        push_state(&accept);
        for (_, r) in &rules {
            push_state(&r[0]);
            push_state(&r[2]);
        }
        let mut push_symbol = |c: char| {
            if !symbols.contains(&c) {
                symbols.push(c);
            }
        };
        push_symbol(blank);
        for (_, r) in &rules {
            push_symbol(r[1].chars().next().unwrap());
            push_symbol(r[3].chars().next().unwrap());
        }
        let state_refs: Vec<&str> = states.iter().map(String::as_str).collect();
        let mut m = Ntm::new(&state_refs, &symbols, blank, &start, &accept)?;
        for (line, r) in &rules {
            let ch = |s: &String| s.chars().next().unwrap();
            m.add(&r[0], ch(&r[1]), &r[2], ch(&r[3]), Move::parse(&r[4]).unwrap())
                .map_err(|e| Error::Machine(format!("line {line}: {e}")))?;
        }
        Ok(m)
    }

    /// Input symbols as indices.
    pub fn input(&self, x: &str) -> Result<Vec<usize>> {
        x.chars().map(|c| self.symbol(c)).collect()
    }
}

impl fmt::Display for Ntm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "start {}", self.states[self.start])?;
        writeln!(f, "accept {}", self.states[self.accept])?;
        writeln!(f, "blank {}", self.symbols[self.blank])?;
        writeln!(f, "states {}", self.states.join(" "))?;
        let syms: Vec<String> = self.symbols.iter().map(|c| c.to_string()).collect();
        writeln!(f, "symbols {}", syms.join(" "))?;
        for (q, row) in self.delta.iter().enumerate() {
            for (a, acts) in row.iter().enumerate() {
                for &(q2, b, mv) in acts {
                    writeln!(
                        f,
                        "{} {} -> {} {} {:?}",
                        self.states[q], self.symbols[a], self.states[q2], self.symbols[b], mv
                    )?;
                }
            }
        }
        Ok(())
    }
}

/// One configuration on the `t`-cell tape; `head` is 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Config {
    pub state: usize,
    pub head: usize,
    pub tape: Vec<usize>,
}

fn check_bounds(m: &Ntm, input: &[usize], t: usize, cap: usize) -> Result<()> {
    if t == 0 || t > cap {
        return Err(Error::ResourceLimit { what: "step bound", value: t, cap });
    }
    if input.len() > t {
        return Err(Error::Machine(format!("input of length {} does not fit {t} cells", input.len())));
    }
    if input.iter().any(|&a| a >= m.symbols.len()) {
        return Err(Error::Machine("input symbol out of range".into()));
    }
    Ok(())
}

pub fn initial_config(m: &Ntm, input: &[usize], t: usize) -> Config {
    let mut tape = vec![m.blank; t];
    tape[..input.len()].copy_from_slice(input);
    Config { state: m.start, head: 1, tape }
}

/// Successor configurations, with the accept state looping in place.
pub fn successors(m: &Ntm, cfg: &Config) -> Vec<Config> {
    let t = cfg.tape.len();
    m.moves(cfg.state, cfg.tape[cfg.head - 1])
        .into_iter()
        .filter_map(|(q2, b, mv)| {
            let head = match mv {
                Move::L if cfg.head > 1 => cfg.head - 1,
                Move::R if cfg.head < t => cfg.head + 1,
                Move::S => cfg.head,
                _ => return None,
            };
            let mut tape = cfg.tape.clone();
            tape[cfg.head - 1] = b;
            Some(Config { state: q2, head, tape })
        })
        .collect()
}

/// Whether some computation of at most `t` steps on the `t`-cell tape accepts.
pub fn ntm_accepts(m: &Ntm, input: &[usize], t: usize) -> Result<bool> {
    ntm_accepts_capped(m, input, t, DEFAULT_STEP_CAP)
}

pub fn ntm_accepts_capped(m: &Ntm, input: &[usize], t: usize, cap: usize) -> Result<bool> {
    check_bounds(m, input, t, cap)?;
    let mut frontier: HashSet<Config> = HashSet::from([initial_config(m, input, t)]);
    for step in 0..=t {
        if frontier.iter().any(|c| c.state == m.accept) {
            return Ok(true);
        }
        if step == t {
            break;
        }
        frontier = frontier.iter().flat_map(|c| successors(m, c)).collect();
    }
    Ok(false)
}

/// Position predicates a template may require.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cond {
    Row0,
    RowBeforeLast,
    RowLast,
    Col0,
    ColTape,
    Col1,
    ColFrom2,
    ColBeforeLast,
    ColLast,
    /// Tape cell whose initial content is this symbol.
    InitSymbol(usize),
}

/// Which column a literal's variable lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ColRef {
    Same,
    Prev,
    Next,
    /// Column 0 (per-row variables).
    Row,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LitRef {
    pub negated: bool,
    pub next_row: bool,
    pub col: ColRef,
    pub slot: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Template {
    pub conds: Vec<Cond>,
    pub lits: Vec<LitRef>,
}

/// Slot numbering and field widths for one machine and step bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Layout {
    pub t: usize,
    pub states: usize,
    pub symbols: usize,
    pub branching: usize,
    pub row_bits: usize,
    pub col_bits: usize,
    pub slot_bits: usize,
    pub template_bits: usize,
}

impl Layout {
    pub fn new(m: &Ntm, t: usize) -> Layout {
        let (q, g, d) = (m.states.len(), m.symbols.len(), m.branching());
        let tape_slots = 3 + 2 * g + q + q * g;
        let row_slots = 1 + 2 * q + 2 * d;
        let template_count = templates(m).len();
        Layout {
            t,
            states: q,
            symbols: g,
            branching: d,
            row_bits: address_bits(t as u64 + 1),
            col_bits: address_bits(t as u64 + 1),
            slot_bits: address_bits(tape_slots.max(row_slots) as u64),
            template_bits: address_bits(template_count as u64),
        }
    }

    /// Bits of a variable number.
    pub fn var_width(&self) -> usize {
        self.row_bits + self.col_bits + self.slot_bits
    }

    pub fn var(&self, row: usize, col: usize, slot: u64) -> u64 {
        (((row as u64) << self.col_bits | col as u64) << self.slot_bits) | slot
    }

    /// `(row, column, slot)` of a variable number.
    pub fn split(&self, var: u64) -> (usize, usize, u64) {
        let slot = var & ((1 << self.slot_bits) - 1);
        let col = (var >> self.slot_bits) & ((1 << self.col_bits) - 1);
        let row = var >> (self.slot_bits + self.col_bits);
        (row as usize, col as usize, slot)
    }

    /// Bits of a record index: `row | column | template`.
    pub fn record_index_bits(&self) -> usize {
        self.row_bits + self.col_bits + self.template_bits
    }

    pub fn encoding(&self) -> ClauseEncoding {
        ClauseEncoding::new(self.var_width()).expect("variable width within range")
    }
}

// tape-cell slots
fn sym(a: usize) -> u64 {
    1 + a as u64
}
fn sym_seen(g: usize, a: usize) -> u64 {
    1 + (g + a) as u64
}
fn head(g: usize) -> u64 {
    1 + 2 * g as u64
}
fn head_seen(g: usize) -> u64 {
    2 + 2 * g as u64
}
fn head_in(g: usize, q: usize) -> u64 {
    (3 + 2 * g + q) as u64
}
fn reads(g: usize, nq: usize, q: usize, a: usize) -> u64 {
    (3 + 2 * g + nq + q * g + a) as u64
}
// per-row slots (column 0)
fn state(q: usize) -> u64 {
    1 + q as u64
}
fn state_seen(nq: usize, q: usize) -> u64 {
    (1 + nq + q) as u64
}
fn choice(nq: usize, k: usize) -> u64 {
    (1 + 2 * nq + k) as u64
}
fn choice_seen(nq: usize, d: usize, k: usize) -> u64 {
    (1 + 2 * nq + d + k) as u64
}

fn lit(negated: bool, next_row: bool, col: ColRef, slot: u64) -> LitRef {
    LitRef { negated, next_row, col, slot }
}
fn pos(col: ColRef, slot: u64) -> LitRef {
    lit(false, false, col, slot)
}
fn neg(col: ColRef, slot: u64) -> LitRef {
    lit(true, false, col, slot)
}

/// Exactly one of `items`, via prefix-OR helpers `seen[k] <=> items[0] or .. or items[k]`.
fn exactly_one(out: &mut Vec<Template>, conds: &[Cond], col: ColRef, items: &[u64], seen: &[u64]) {
    let mut add = |lits: Vec<LitRef>| out.push(Template { conds: conds.to_vec(), lits });
    for k in 0..items.len() {
        add(vec![neg(col, items[k]), pos(col, seen[k])]);
        if k == 0 {
            add(vec![neg(col, seen[0]), pos(col, items[0])]);
        } else {
            add(vec![neg(col, seen[k - 1]), pos(col, seen[k])]);
            add(vec![neg(col, items[k]), neg(col, seen[k - 1])]);
            add(vec![neg(col, seen[k]), pos(col, seen[k - 1]), pos(col, items[k])]);
        }
    }
    add(vec![pos(col, *seen.last().unwrap())]);
}

/// The clause templates of machine `m`, independent of the step bound.
pub fn templates(m: &Ntm) -> Vec<Template> {
    use Cond::*;
    use ColRef::{Next, Prev, Row, Same};
    let (nq, g, d) = (m.states.len(), m.symbols.len(), m.branching());
    let mut out = Vec::new();
    let t = |out: &mut Vec<Template>, conds: &[Cond], lits: Vec<LitRef>| {
        out.push(Template { conds: conds.to_vec(), lits })
    };

    // initial row
    for a in 0..g {
        t(&mut out, &[Row0, InitSymbol(a)], vec![pos(Same, sym(a))]);
    }
    t(&mut out, &[Row0, Col1], vec![pos(Same, head(g))]);
    t(&mut out, &[Row0, Col0], vec![pos(Row, state(m.start))]);

    // exactly one symbol per cell, state per row, choice per row
    let syms: Vec<u64> = (0..g).map(sym).collect();
    let syms_seen: Vec<u64> = (0..g).map(|a| sym_seen(g, a)).collect();
    exactly_one(&mut out, &[ColTape], Same, &syms, &syms_seen);
    let states: Vec<u64> = (0..nq).map(state).collect();
    let states_seen: Vec<u64> = (0..nq).map(|q| state_seen(nq, q)).collect();
    exactly_one(&mut out, &[Col0], Same, &states, &states_seen);
    let choices: Vec<u64> = (0..d).map(|k| choice(nq, k)).collect();
    let choices_seen: Vec<u64> = (0..d).map(|k| choice_seen(nq, d, k)).collect();
    exactly_one(&mut out, &[Col0], Same, &choices, &choices_seen);

    // exactly one head per row, prefix-OR chained along the columns
    let (h, hs) = (head(g), head_seen(g));
    t(&mut out, &[ColTape], vec![neg(Same, h), pos(Same, hs)]);
    t(&mut out, &[Col1], vec![neg(Same, hs), pos(Same, h)]);
    t(&mut out, &[ColFrom2], vec![neg(Prev, hs), pos(Same, hs)]);
    t(&mut out, &[ColFrom2], vec![neg(Same, h), neg(Prev, hs)]);
    t(&mut out, &[ColFrom2], vec![neg(Same, hs), pos(Prev, hs), pos(Same, h)]);
    t(&mut out, &[ColLast], vec![pos(Same, hs)]);

    // head_in(q) <=> head and state q; reads(q, a) <=> head_in(q) and symbol a
    for q in 0..nq {
        let hq = head_in(g, q);
        t(&mut out, &[ColTape], vec![neg(Same, hq), pos(Same, h)]);
        t(&mut out, &[ColTape], vec![neg(Same, hq), pos(Row, state(q))]);
        t(&mut out, &[ColTape], vec![neg(Same, h), neg(Row, state(q)), pos(Same, hq)]);
        for a in 0..g {
            let z = reads(g, nq, q, a);
            t(&mut out, &[ColTape], vec![neg(Same, z), pos(Same, hq)]);
            t(&mut out, &[ColTape], vec![neg(Same, z), pos(Same, sym(a))]);
            t(&mut out, &[ColTape], vec![neg(Same, hq), neg(Same, sym(a)), pos(Same, z)]);
        }
    }

    // transitions: reads(q, a) and choice k force the next row
    for q in 0..nq {
        for a in 0..g {
            let acts = m.moves(q, a);
            let z = reads(g, nq, q, a);
            for k in 0..d {
                let pre = [neg(Same, z), neg(Row, choice(nq, k))];
                let step = [ColTape, RowBeforeLast];
                let Some(&(q2, b, mv)) = acts.get(k) else {
                    t(&mut out, &step, pre.to_vec());
                    continue;
                };
                let with = |l: LitRef| vec![pre[0], pre[1], l];
                t(&mut out, &step, with(lit(false, true, Row, state(q2))));
                t(&mut out, &step, with(lit(false, true, Same, sym(b))));
                match mv {
                    Move::S => t(&mut out, &step, with(lit(false, true, Same, h))),
                    Move::L => {
                        t(&mut out, &[ColFrom2, RowBeforeLast], with(lit(false, true, Prev, h)));
                        t(&mut out, &[Col1, RowBeforeLast], pre.to_vec());
                    }
                    Move::R => {
                        t(&mut out, &[ColBeforeLast, RowBeforeLast], with(lit(false, true, Next, h)));
                        t(&mut out, &[ColLast, RowBeforeLast], pre.to_vec());
                    }
                }
            }
        }
    }

    // cells away from the head keep their symbol
    for a in 0..g {
        t(&mut out, &[ColTape, RowBeforeLast], vec![neg(Same, sym(a)), pos(Same, h), lit(false, true, Same, sym(a))]);
    }

    // acceptance in the last row
    t(&mut out, &[RowLast, Col0], vec![pos(Row, state(m.accept))]);
    out
}

fn cond_holds(cond: Cond, row: usize, col: usize, t: usize, init: &[usize]) -> bool {
    let tape = (1..=t).contains(&col);
    match cond {
        Cond::Row0 => row == 0,
        Cond::RowBeforeLast => row < t,
        Cond::RowLast => row == t,
        Cond::Col0 => col == 0,
        Cond::ColTape => tape,
        Cond::Col1 => col == 1,
        Cond::ColFrom2 => tape && col >= 2,
        Cond::ColBeforeLast => tape && col < t,
        Cond::ColLast => col == t,
        Cond::InitSymbol(a) => tape && init[col - 1] == a,
    }
}

fn instantiate(lay: &Layout, tpl: &Template, row: usize, col: usize) -> Clause {
    tpl.lits
        .iter()
        .map(|l| {
            let r = row + l.next_row as usize;
            let c = match l.col {
                ColRef::Same => col,
                ColRef::Prev => col - 1,
                ColRef::Next => col + 1,
                ColRef::Row => 0,
            };
            Lit { var: lay.var(r, c, l.slot), negated: l.negated }
        })
        .collect()
}

/// Tableau formula, clauses in record order `row | column | template`;
/// satisfiable iff [`ntm_accepts`].
pub fn tableau_to_3cnf(m: &Ntm, input: &[usize], t: usize) -> Result<Formula3CNF> {
    check_bounds(m, input, t, DEFAULT_STEP_CAP)?;
    let lay = Layout::new(m, t);
    let init = initial_config(m, input, t).tape;
    let tpls = templates(m);
    let mut clauses = Vec::new();
    for row in 0..=t {
        for col in 0..=t {
            for tpl in &tpls {
                if tpl.conds.iter().all(|&c| cond_holds(c, row, col, t, &init)) {
                    clauses.push(instantiate(&lay, tpl, row, col));
                }
            }
        }
    }
    Ok(Formula3CNF::new((1u64 << lay.var_width()) - 1, clauses))
}

/// Reads the computation out of a model of the tableau formula and checks
/// that it is an accepting path.
pub fn replay(m: &Ntm, input: &[usize], t: usize, model: &[bool]) -> Result<Vec<Config>> {
    let lay = Layout::new(m, t);
    let (nq, g) = (m.states.len(), m.symbols.len());
    let val = |r: usize, c: usize, slot: u64| model[lay.var(r, c, slot) as usize - 1];
    let fail = |msg: String| Err(Error::Internal(format!("replay: {msg}")));
    let one = |r: usize, what: &str, hits: Vec<usize>| -> Result<usize> {
        match hits[..] {
            [x] => Ok(x),
            _ => Err(Error::Internal(format!("replay: row {r} has {} {what}", hits.len()))),
        }
    };
    let mut path = Vec::with_capacity(t + 1);
    for r in 0..=t {
        let state = one(r, "states", (0..nq).filter(|&q| val(r, 0, self::state(q))).collect())?;
        let head = one(r, "heads", (1..=t).filter(|&c| val(r, c, self::head(g))).collect())?;
        let tape = (1..=t)
            .map(|c| one(r, "symbols in a cell", (0..g).filter(|&a| val(r, c, sym(a))).collect()))
            .collect::<Result<Vec<_>>>()?;
        path.push(Config { state, head, tape });
    }
    if path[0] != initial_config(m, input, t) {
        return fail("row 0 is not the initial configuration".into());
    }
    for r in 0..t {
        if !successors(m, &path[r]).contains(&path[r + 1]) {
            return fail(format!("row {} does not follow from row {r}", r + 1));
        }
    }
    if path[t].state != m.accept {
        return fail("last row does not accept".into());
    }
    Ok(path)
}

/// Constant gates added verbatim, so the circuit's shape does not depend on their values.
fn literal_consts(b: &mut CircuitBuilder, value: u64, bits: usize) -> Vec<GateId> {
    (0..bits).rev().map(|k| b.push(GateKind::Const((value >> k) & 1 == 1), vec![])).collect()
}

fn xnor(b: &mut CircuitBuilder, p: GateId, q: GateId) -> GateId {
    let np = b.not(p);
    let nq = b.not(q);
    let both = b.and([p, q]);
    let neither = b.and([np, nq]);
    b.or([both, neither])
}

fn xor(b: &mut CircuitBuilder, p: GateId, q: GateId) -> GateId {
    let e = xnor(b, p, q);
    b.not(e)
}

/// `x == k` and `x < k` for MSB-first wires `x` and constant gates `k`.
fn compare(b: &mut CircuitBuilder, x: &[GateId], k: &[GateId]) -> (GateId, GateId) {
    let mut eq = Vec::new();
    let mut lt = Vec::new();
    for p in 0..x.len() {
        let nx = b.not(x[p]);
        let mut here = eq.clone();
        here.push(nx);
        here.push(k[p]);
        lt.push(b.and(here));
        eq.push(xnor(b, x[p], k[p]));
    }
    let e = b.and(eq);
    let l = b.or(lt);
    (e, l)
}

/// `x == value` for a value fixed by the construction.
fn equals(b: &mut CircuitBuilder, x: &[GateId], value: u64) -> GateId {
    let n = x.len();
    let lits: Vec<GateId> =
        (0..n).map(|p| if (value >> (n - 1 - p)) & 1 == 1 { x[p] } else { b.not(x[p]) }).collect();
    b.and(lits)
}

/// `x + 1` (or `x - 1`) modulo the width, MSB first.
fn step(b: &mut CircuitBuilder, x: &[GateId], up: bool) -> Vec<GateId> {
    let n = x.len();
    let mut out = vec![0; n];
    let mut carry: Vec<GateId> = Vec::new();
    for p in (0..n).rev() {
        out[p] = if carry.is_empty() {
            b.not(x[p])
        } else {
            let all = b.and(carry.clone());
            xor(b, x[p], all)
        };
        carry.push(if up { x[p] } else { b.not(x[p]) });
    }
    out
}

/// Circuit whose table, read with `enc`, spells [`tableau_to_3cnf`].
///
/// The input is the record index `row | column | template` followed by the
/// in-record bit address. Each template contributes a decoder on its index
/// and position predicates; literal bits come from the row and column
/// fields (shifted by one where a template looks at a neighbour) and from
/// constant slot numbers. The step bound and the input string enter only as
/// constant gates, so the gate count depends on the field widths and the
/// machine but not on `t` itself.
pub fn clause_generator_circuit(m: &Ntm, input: &[usize], t: usize, enc: &ClauseEncoding) -> Result<Circuit> {
    check_bounds(m, input, t, usize::MAX)?;
    let lay = Layout::new(m, t);
    let w = lay.var_width();
    if enc.var_width() < w || enc.num_vars() < (1u64 << w) - 1 {
        return Err(Error::Encoding(format!(
            "tableau variables need {w}-bit indices over the full space; encoding has {} bits and {} variables",
            enc.var_width(),
            enc.num_vars()
        )));
    }
    let tpls = templates(m);
    let (rb, cb, ub) = (lay.row_bits, lay.col_bits, lay.template_bits);
    let l = enc.field_width();
    let fb = enc.field_bits();
    let mut b = CircuitBuilder::new(rb + cb + ub + 2 + fb);
    let ins = b.inputs();
    let row = ins[..rb].to_vec();
    let col = ins[rb..rb + cb].to_vec();
    let tpl_idx = ins[rb + cb..rb + cb + ub].to_vec();
    let addr = ins[rb + cb + ub..].to_vec();

    let t_row = literal_consts(&mut b, t as u64, rb);
    let t_col = literal_consts(&mut b, t as u64, cb);
    let len_col = literal_consts(&mut b, input.len() as u64, cb);
    let (row_eq_t, row_lt_t) = compare(&mut b, &row, &t_row);
    let row_in = b.or([row_eq_t, row_lt_t]);
    let row0 = equals(&mut b, &row, 0);
    let (col_eq_t, col_lt_t) = compare(&mut b, &col, &t_col);
    let col0 = equals(&mut b, &col, 0);
    let col1 = equals(&mut b, &col, 1);
    let not_col0 = b.not(col0);
    let not_col1 = b.not(col1);
    let col_le_t = b.or([col_eq_t, col_lt_t]);
    let col_tape = b.and([not_col0, col_le_t]);
    let col_from2 = b.and([col_tape, not_col1]);
    let col_before_last = b.and([not_col0, col_lt_t]);
    let (col_eq_len, col_lt_len) = compare(&mut b, &col, &len_col);
    let col_in_input = b.or([col_eq_len, col_lt_len]);
    let col_past_input = b.not(col_in_input);
    // cell c holds input symbol c - 1; leaf 0 is unused
    let mut init = Vec::with_capacity(m.symbols.len());
    for a in 0..m.symbols.len() {
        let zero = b.constant(false);
        let mut leaves = vec![zero];
        for &s in input {
            leaves.push(b.push(GateKind::Const(s == a), vec![]));
        }
        let hit = select_into(&mut b, &col, &leaves);
        let from_input = b.and([col_in_input, hit]);
        let cell = if a == m.blank { b.or([from_input, col_past_input]) } else { from_input };
        init.push(b.and([col_tape, cell]));
    }

    let row_next = step(&mut b, &row, true);
    let col_next = step(&mut b, &col, true);
    let col_prev = step(&mut b, &col, false);

    // per (field, bit offset): OR over templates of (active and bit source)
    let mut leaves: Vec<Vec<GateId>> = vec![Vec::new(); 4 * l];
    for (u, tpl) in tpls.iter().enumerate() {
        let mut terms = vec![equals(&mut b, &tpl_idx, u as u64), row_in];
        for &c in &tpl.conds {
            terms.push(match c {
                Cond::Row0 => row0,
                Cond::RowBeforeLast => row_lt_t,
                Cond::RowLast => row_eq_t,
                Cond::Col0 => col0,
                Cond::ColTape => col_tape,
                Cond::Col1 => col1,
                Cond::ColFrom2 => col_from2,
                Cond::ColBeforeLast => col_before_last,
                Cond::ColLast => col_eq_t,
                Cond::InitSymbol(a) => init[a],
            });
        }
        let active = b.and(terms);
        for (f, lr) in tpl.lits.iter().enumerate() {
            let r_src = if lr.next_row { &row_next } else { &row };
            let c_src = match lr.col {
                ColRef::Same => Some(&col),
                ColRef::Prev => Some(&col_prev),
                ColRef::Next => Some(&col_next),
                ColRef::Row => None,
            };
            if lr.negated {
                leaves[f * l].push(active);
            }
            for p in 0..w {
                let src = if p < rb {
                    Some(r_src[p])
                } else if p < rb + cb {
                    c_src.map(|c| c[p - rb])
                } else if (lr.slot >> (w - 1 - p)) & 1 == 1 {
                    Some(active)
                } else {
                    None
                };
                if let Some(s) = src {
                    let bit = if s == active { active } else { b.and([active, s]) };
                    leaves[f * l + l - w + p].push(bit);
                }
            }
        }
    }
    let leaf_ids: Vec<GateId> = leaves.into_iter().map(|fan| b.or(fan)).collect();
    let out = select_into(&mut b, &addr, &leaf_ids);
    Ok(b.finish(out))
}

/// States and symbols reachable in the transition graph, for reporting.
pub fn describe(m: &Ntm) -> String {
    let transitions: usize = m.delta.iter().flatten().map(Vec::len).sum();
    let targets: BTreeSet<usize> = m.delta.iter().flatten().flatten().map(|a| a.0).collect();
    format!(
        "states={} symbols={} transitions={} branching={} target_states={}",
        m.states.len(),
        m.symbols.len(),
        transitions,
        m.branching(),
        targets.len()
    )
}

/// Small machines used by tests and the CLI corpus.
pub mod machines {
    use super::{Move, Ntm};

    /// Accepts before taking a step.
    pub fn immediate_accept() -> Ntm {
        Ntm::new(&["acc"], &['_', '0', '1'], '_', "acc", "acc").unwrap()
    }

    /// No transitions at all.
    pub fn never_accept() -> Ntm {
        Ntm::new(&["q0", "acc"], &['_', '0', '1'], '_', "q0", "acc").unwrap()
    }

    /// Guesses a cell holding `1`: at each step either moves right or, on a
    /// `1`, accepts.
    pub fn guess_one() -> Ntm {
        let mut m = Ntm::new(&["q0", "acc"], &['_', '0', '1'], '_', "q0", "acc").unwrap();
        for a in ['0', '1'] {
            m.add("q0", a, "q0", a, Move::R).unwrap();
        }
        m.add("q0", '1', "acc", '1', Move::S).unwrap();
        m
    }

    /// Guesses a bit, writes it, walks right to the first blank and accepts
    /// if the guessed bit equals the last input symbol.
    pub fn guess_last_bit() -> Ntm {
        let mut m = Ntm::new(&["q0", "g0", "g1", "c0", "c1", "acc"], &['_', '0', '1'], '_', "q0", "acc").unwrap();
        for a in ['0', '1'] {
            m.add("q0", a, "g0", a, Move::S).unwrap();
            m.add("q0", a, "g1", a, Move::S).unwrap();
            for (g, c) in [("g0", "c0"), ("g1", "c1")] {
                // keep walking, or guess this is the last symbol
                m.add(g, a, g, a, Move::R).unwrap();
                let bit = if c == "c0" { '0' } else { '1' };
                if a == bit {
                    m.add(g, a, c, a, Move::R).unwrap();
                }
            }
        }
        m.add("c0", '_', "acc", '_', Move::S).unwrap();
        m.add("c1", '_', "acc", '_', Move::S).unwrap();
        m
    }

    /// Deterministic parity check: accepts iff the input has an even number of `1`s.
    pub fn even_ones() -> Ntm {
        let mut m = Ntm::new(&["even", "odd", "acc"], &['_', '0', '1'], '_', "even", "acc").unwrap();
        m.add("even", '0', "even", '0', Move::R).unwrap();
        m.add("even", '1', "odd", '1', Move::R).unwrap();
        m.add("odd", '0', "odd", '0', Move::R).unwrap();
        m.add("odd", '1', "even", '1', Move::R).unwrap();
        m.add("even", '_', "acc", '_', Move::S).unwrap();
        m
    }

    pub fn all() -> Vec<(&'static str, Ntm)> {
        vec![
            ("immediate-accept", immediate_accept()),
            ("never-accept", never_accept()),
            ("guess-one", guess_one()),
            ("guess-last-bit", guess_last_bit()),
            ("even-ones", even_ones()),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::succinct::{decode_formula, solve_compact};

    fn accepts(m: &Ntm, x: &str, t: usize) -> bool {
        ntm_accepts(m, &m.input(x).unwrap(), t).unwrap()
    }

    #[test]
    fn machine_runs() {
        assert!(accepts(&machines::immediate_accept(), "", 1));
        assert!(!accepts(&machines::never_accept(), "01", 4));
        let g = machines::guess_one();
        assert!(accepts(&g, "001", 3));
        assert!(accepts(&g, "1", 1));
        assert!(!accepts(&g, "000", 5));
        let p = machines::even_ones();
        assert!(accepts(&p, "11", 3));
        assert!(!accepts(&p, "10", 5));
    }

    #[test]
    fn parse_round_trip() {
        for (_, m) in machines::all() {
            let text = m.to_string();
            assert_eq!(Ntm::parse(&text).unwrap(), m);
        }
        assert!(Ntm::parse("start a\naccept b\n").is_err());
        assert!(Ntm::parse("start a\naccept b\nblank _\nb _ -> a _ S\n").is_err());
        assert!(Ntm::parse("start a\naccept b\nblank _\na _ -> b _ X\n").is_err());
    }

    #[test]
    fn tableau_matches_machine() {
        for (name, m) in machines::all() {
            for x in ["", "0", "1", "01", "10", "11", "011"] {
                for t in [1, 2, 3, 4, 5] {
                    if x.len() > t {
                        continue;
                    }
                    let input = m.input(x).unwrap();
                    let f = tableau_to_3cnf(&m, &input, t).unwrap();
                    assert!(f.clauses.iter().all(|c| (1..=3).contains(&c.len())));
                    let model = solve_compact(&f);
                    let expected = ntm_accepts(&m, &input, t).unwrap();
                    assert_eq!(model.is_some(), expected, "{name} on {x:?} with t = {t}");
                    if let Some(a) = model {
                        let path = replay(&m, &input, t, &a).unwrap();
                        assert_eq!(path.len(), t + 1);
                    }
                }
            }
        }
    }

    #[test]
    fn generator_decodes_to_tableau() {
        for (_, m) in machines::all() {
            for (x, t) in [("", 1), ("1", 2), ("01", 3)] {
                let input = m.input(x).unwrap();
                let lay = Layout::new(&m, t);
                let enc = lay.encoding();
                let circuit = clause_generator_circuit(&m, &input, t, &enc).unwrap();
                let decoded = decode_formula(&circuit, &enc).unwrap();
                assert_eq!(decoded, tableau_to_3cnf(&m, &input, t).unwrap());
            }
        }
    }
}
