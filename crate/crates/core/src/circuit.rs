//! Gate-level circuit representation.
//!
//! Gates are numbered `1..=s` in topological order: every fan-in id is
//! strictly smaller than the gate's own id, and gates `1..=n` are the
//! inputs `x1..xn`. Fan-in is unbounded for AND, OR and MOD gates; NOT is
//! an explicit gate rather than an edge attribute.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::truthtable::TruthTable;

/// 1-based gate identifier.
pub type GateId = u32;

/// Largest input count for which tables are materialized by default.
pub const DEFAULT_TABLE_CAP: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    Input(u32),
    Const(bool),
    Not,
    And,
    Or,
    /// Outputs 1 iff the number of 1-valued fan-ins is divisible by the modulus.
    Mod(u32),
}

impl GateKind {
    pub fn mnemonic(&self) -> &'static str {
        match self {
            GateKind::Input(_) => "INPUT",
            GateKind::Const(_) => "CONST",
            GateKind::Not => "NOT",
            GateKind::And => "AND",
            GateKind::Or => "OR",
            GateKind::Mod(_) => "MOD",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Gate {
    pub kind: GateKind,
    pub fanin: Vec<GateId>,
}

impl Gate {
    pub fn new(kind: GateKind, fanin: Vec<GateId>) -> Self {
        Gate { kind, fanin }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Circuit {
    n_inputs: usize,
    gates: Vec<Gate>,
    output: GateId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircuitStats {
    pub size: usize,
    pub depth: usize,
    pub wires: usize,
    pub moduli: BTreeSet<u32>,
    pub n_inputs: usize,
    /// Depth counting only AND/OR/MOD layers.
    pub acc_depth: usize,
}

impl Circuit {
    /// Validates and wraps a gate list.
    pub fn new(n_inputs: usize, gates: Vec<Gate>, output: GateId) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidCircuit(msg));
        if gates.len() < n_inputs {
            return bad(format!("{} gates but {} inputs", gates.len(), n_inputs));
        }
        for (idx, g) in gates.iter().enumerate() {
            let id = idx as GateId + 1;
            if idx < n_inputs {
                if g.kind != GateKind::Input(idx as u32) || !g.fanin.is_empty() {
                    return bad(format!("gate {id} must be INPUT {idx}"));
                }
                continue;
            }
            if let Some(&f) = g.fanin.iter().find(|&&f| f == 0 || f >= id) {
                return bad(format!("gate {id} references gate {f}, which is not an earlier gate"));
            }
            let arity_ok = match g.kind {
                GateKind::Input(_) => return bad(format!("gate {id}: INPUT gates must come first")),
                GateKind::Const(_) => g.fanin.is_empty(),
                GateKind::Not => g.fanin.len() == 1,
                GateKind::And | GateKind::Or => !g.fanin.is_empty(),
                GateKind::Mod(m) => {
                    if m < 2 {
                        return bad(format!("gate {id}: modulus {m} < 2"));
                    }
                    !g.fanin.is_empty()
                }
            };
            if !arity_ok {
                return bad(format!(
                    "gate {id}: {} with {} fan-ins",
                    g.kind.mnemonic(),
                    g.fanin.len()
                ));
            }
        }
        if output == 0 || output as usize > gates.len() {
            return bad(format!("output {output} does not name a gate"));
        }
        Ok(Circuit { n_inputs, gates, output })
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gate(&self, id: GateId) -> &Gate {
        &self.gates[id as usize - 1]
    }

    pub fn output(&self) -> GateId {
        self.output
    }

    pub fn size(&self) -> usize {
        self.gates.len()
    }

    pub fn ids(&self) -> impl Iterator<Item = GateId> {
        1..=self.gates.len() as GateId
    }

    pub fn has_mod_gates(&self) -> bool {
        self.gates.iter().any(|g| matches!(g.kind, GateKind::Mod(_)))
    }

    fn check_arity(&self, len: usize) -> Result<()> {
        if len != self.n_inputs {
            return Err(Error::InputArity { expected: self.n_inputs, got: len });
        }
        Ok(())
    }

    /// Output value on one assignment (`assignment[0]` is `x1`).
    pub fn evaluate(&self, assignment: &[bool]) -> Result<bool> {
        self.check_arity(assignment.len())?;
        let words: Vec<u64> = assignment.iter().map(|&b| if b { !0 } else { 0 }).collect();
        Ok(self.eval_words(&words) & 1 == 1)
    }

    /// Value of every gate on one assignment; entry `j - 1` is gate `j`.
    pub fn wire_trace(&self, assignment: &[bool]) -> Result<Vec<bool>> {
        self.check_arity(assignment.len())?;
        let mut vals: Vec<bool> = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            let arg = |i: usize| vals[g.fanin[i] as usize - 1];
            let v = match g.kind {
                GateKind::Input(k) => assignment[k as usize],
                GateKind::Const(b) => b,
                GateKind::Not => !arg(0),
                GateKind::And => (0..g.fanin.len()).all(arg),
                GateKind::Or => (0..g.fanin.len()).any(arg),
                GateKind::Mod(m) => {
                    let ones = (0..g.fanin.len()).filter(|&i| arg(i)).count();
                    ones % m as usize == 0
                }
            };
            vals.push(v);
        }
        Ok(vals)
    }

    /// Evaluates 64 assignments at once; `inputs[k]` holds lane values of `x_{k+1}`.
    pub fn eval_words(&self, inputs: &[u64]) -> u64 {
        let vals = self.trace_words(inputs);
        vals[self.output as usize - 1]
    }

    /// Gate values for 64 lanes; entry `j - 1` is gate `j`.
    pub fn trace_words(&self, inputs: &[u64]) -> Vec<u64> {
        let mut vals: Vec<u64> = Vec::with_capacity(self.gates.len());
        let mut residues: Vec<u64> = Vec::new();
        for g in &self.gates {
            let v = match g.kind {
                GateKind::Input(k) => inputs[k as usize],
                GateKind::Const(b) => {
                    if b {
                        !0
                    } else {
                        0
                    }
                }
                GateKind::Not => !vals[g.fanin[0] as usize - 1],
                GateKind::And => g.fanin.iter().fold(!0, |acc, &f| acc & vals[f as usize - 1]),
                GateKind::Or => g.fanin.iter().fold(0, |acc, &f| acc | vals[f as usize - 1]),
                GateKind::Mod(2) => !g.fanin.iter().fold(0, |acc, &f| acc ^ vals[f as usize - 1]),
                GateKind::Mod(m) => {
                    // bit-sliced one-hot counter: lane l has residue r iff bit l of residues[r]
                    let m = m as usize;
                    residues.clear();
                    residues.resize(m, 0);
                    residues[0] = !0;
                    for &f in &g.fanin {
                        let y = vals[f as usize - 1];
                        let last = residues[m - 1];
                        for r in (1..m).rev() {
                            residues[r] = (residues[r] & !y) | (residues[r - 1] & y);
                        }
                        residues[0] = (residues[0] & !y) | (last & y);
                    }
                    residues[0]
                }
            };
            vals.push(v);
        }
        vals
    }

    /// Full truth table, refusing more than `cap` inputs.
    pub fn truth_table_capped(&self, cap: usize) -> Result<TruthTable> {
        if self.n_inputs > cap {
            return Err(Error::ResourceLimit { what: "input count", value: self.n_inputs, cap });
        }
        let n = self.n_inputs;
        let n_words = (1usize << n).div_ceil(64);
        let words: Vec<u64> = (0..n_words)
            .into_par_iter()
            .with_min_len(64)
            .map(|w| self.eval_words(&input_words(n, w * 64)))
            .collect();
        Ok(TruthTable::from_words(n, words))
    }

    pub fn truth_table(&self) -> Result<TruthTable> {
        self.truth_table_capped(DEFAULT_TABLE_CAP)
    }

    pub fn stats(&self) -> CircuitStats {
        let mut depth = vec![0usize; self.gates.len()];
        let mut moduli = BTreeSet::new();
        let mut wires = 0;
        for (i, g) in self.gates.iter().enumerate() {
            wires += g.fanin.len();
            if let GateKind::Mod(m) = g.kind {
                moduli.insert(m);
            }
            depth[i] = match g.kind {
                GateKind::Input(_) | GateKind::Const(_) => 0,
                _ => 1 + g.fanin.iter().map(|&f| depth[f as usize - 1]).max().unwrap_or(0),
            };
        }
        CircuitStats {
            size: self.gates.len(),
            depth: depth[self.output as usize - 1],
            wires,
            moduli,
            n_inputs: self.n_inputs,
            acc_depth: self.acc_depth(),
        }
    }

    /// Depth counting only AND, OR and MOD layers (NOT gates are free).
    pub fn acc_depth(&self) -> usize {
        let mut depth = vec![0usize; self.gates.len()];
        for (i, g) in self.gates.iter().enumerate() {
            let below = g.fanin.iter().map(|&f| depth[f as usize - 1]).max().unwrap_or(0);
            depth[i] = match g.kind {
                GateKind::Input(_) | GateKind::Const(_) => 0,
                GateKind::Not => below,
                _ => below + 1,
            };
        }
        depth[self.output as usize - 1]
    }

    /// Drops gates the output does not depend on (inputs are always kept).
    /// The same circuit with a NOT gate appended on the output.
    pub fn negated(&self) -> Circuit {
        let mut gates = self.gates.clone();
        gates.push(Gate::new(GateKind::Not, vec![self.output]));
        let output = gates.len() as GateId;
        Circuit { n_inputs: self.n_inputs, gates, output }
    }

    pub fn compact(&self) -> Circuit {
        let mut live = vec![false; self.gates.len()];
        live[self.output as usize - 1] = true;
        for i in (0..self.gates.len()).rev() {
            if live[i] {
                for &f in &self.gates[i].fanin {
                    live[f as usize - 1] = true;
                }
            }
        }
        let mut remap = vec![0 as GateId; self.gates.len()];
        let mut gates = Vec::new();
        for (i, g) in self.gates.iter().enumerate() {
            if i < self.n_inputs || live[i] {
                let fanin = g.fanin.iter().map(|&f| remap[f as usize - 1]).collect();
                gates.push(Gate::new(g.kind, fanin));
                remap[i] = gates.len() as GateId;
            }
        }
        Circuit { n_inputs: self.n_inputs, gates, output: remap[self.output as usize - 1] }
    }

    /// Substitutes `outer`'s inputs with the outputs of `inner` circuits sharing one arity.
    pub fn compose(outer: &Circuit, inner: &[Circuit]) -> Result<Circuit> {
        if outer.n_inputs != inner.len() {
            return Err(Error::Composition(format!(
                "outer circuit has {} inputs but {} inner circuits were given",
                outer.n_inputs,
                inner.len()
            )));
        }
        let arity = match inner.first() {
            Some(c) => c.n_inputs,
            None => 0,
        };
        if let Some(c) = inner.iter().find(|c| c.n_inputs != arity) {
            return Err(Error::Composition(format!(
                "inner circuits disagree on arity ({} vs {})",
                arity, c.n_inputs
            )));
        }
        let mut b = CircuitBuilder::new(arity);
        let inputs = b.inputs();
        let outs: Vec<GateId> = inner.iter().map(|c| b.embed(c, &inputs)).collect();
        let out = b.embed(outer, &outs);
        Ok(b.finish(out))
    }

    /// Rewrites every AND/OR to exactly two fan-ins (left-associated chains).
    pub fn normalize_fanin2(&self) -> Result<Circuit> {
        if let Some(pos) = self.gates.iter().position(|g| matches!(g.kind, GateKind::Mod(_))) {
            return Err(Error::UnsupportedGate(format!(
                "gate {} is a MOD gate; fan-in-2 normal form covers AND/OR/NOT only",
                pos + 1
            )));
        }
        let mut b = CircuitBuilder::new(self.n_inputs);
        let mut map: Vec<GateId> = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            let fanin: Vec<GateId> = g.fanin.iter().map(|&f| map[f as usize - 1]).collect();
            let id = match g.kind {
                GateKind::Input(k) => b.input(k as usize),
                GateKind::And | GateKind::Or => {
                    let mut acc = fanin[0];
                    if fanin.len() == 1 {
                        acc = b.push(g.kind, vec![acc, acc]);
                    }
                    for &f in &fanin[1..] {
                        acc = b.push(g.kind, vec![acc, f]);
                    }
                    acc
                }
                kind => b.push(kind, fanin),
            };
            map.push(id);
        }
        Ok(b.finish(map[self.output as usize - 1]))
    }

    /// True when every AND/OR gate has exactly two fan-ins and no MOD gate occurs.
    pub fn is_fanin2(&self) -> bool {
        self.gates.iter().all(|g| match g.kind {
            GateKind::And | GateKind::Or => g.fanin.len() == 2,
            GateKind::Mod(_) => false,
            _ => true,
        })
    }

    /// Fixes some inputs to constants and folds; the remaining inputs keep their order.
    pub fn restrict(&self, fixed: &[(usize, bool)]) -> Circuit {
        let mut value: Vec<Option<bool>> = vec![None; self.n_inputs];
        for &(v, b) in fixed {
            value[v] = Some(b);
        }
        let free: Vec<usize> = (0..self.n_inputs).filter(|&v| value[v].is_none()).collect();
        let mut b = CircuitBuilder::folding(free.len());
        let mut map = Vec::with_capacity(self.n_inputs);
        let mut next = 0;
        for v in value {
            match v {
                Some(bit) => map.push(b.constant(bit)),
                None => {
                    map.push(b.input(next));
                    next += 1;
                }
            }
        }
        let out = b.embed(self, &map);
        b.finish(out).compact()
    }

    /// Constant-folds and compacts.
    pub fn fold_constants(&self) -> Circuit {
        let mut b = CircuitBuilder::folding(self.n_inputs);
        let inputs = b.inputs();
        let out = b.embed(self, &inputs);
        b.finish(out).compact()
    }

    /// Equivalent circuit without CONST gates; constants become `x1 OR NOT x1` style tautologies.
    pub fn eliminate_constants(&self) -> Result<Circuit> {
        let folded = self.fold_constants();
        if !folded.gates.iter().any(|g| matches!(g.kind, GateKind::Const(_))) {
            return Ok(folded);
        }
        if folded.n_inputs == 0 {
            return Err(Error::UnsupportedGate(
                "a constant function of zero inputs needs a CONST gate".into(),
            ));
        }
        let mut b = CircuitBuilder::new(folded.n_inputs);
        let x1 = b.input(0);
        let nx1 = b.not(x1);
        let one = b.or([x1, nx1]);
        let zero = b.and([x1, nx1]);
        let mut map: Vec<GateId> = Vec::with_capacity(folded.gates.len());
        for g in &folded.gates {
            let id = match g.kind {
                GateKind::Input(k) => b.input(k as usize),
                GateKind::Const(true) => one,
                GateKind::Const(false) => zero,
                kind => {
                    let fanin = g.fanin.iter().map(|&f| map[f as usize - 1]).collect();
                    b.push(kind, fanin)
                }
            };
            map.push(id);
        }
        Ok(b.finish(map[folded.output as usize - 1]).compact())
    }
}

/// Lane patterns for the 64 consecutive table indices starting at `base`.
///
/// Bit `l` of entry `k` is `x_{k+1}` at index `base + l`. For `n < 6` lanes
/// past `2^n` are garbage and must be masked by the caller.
pub fn input_words(n: usize, base: usize) -> Vec<u64> {
    const PATTERNS: [u64; 6] = [
        0xAAAA_AAAA_AAAA_AAAA,
        0xCCCC_CCCC_CCCC_CCCC,
        0xF0F0_F0F0_F0F0_F0F0,
        0xFF00_FF00_FF00_FF00,
        0xFFFF_0000_FFFF_0000,
        0xFFFF_FFFF_0000_0000,
    ];
    (0..n)
        .map(|v| {
            let pos = n - 1 - v;
            if pos < 6 {
                PATTERNS[pos]
            } else if (base >> pos) & 1 == 1 {
                !0
            } else {
                0
            }
        })
        .collect()
}

/// Incremental circuit construction with optional constant folding.
///
/// Gates are appended in id order, so anything built here is topologically
/// numbered by construction.
#[derive(Clone, Debug)]
pub struct CircuitBuilder {
    n_inputs: usize,
    gates: Vec<Gate>,
    fold: bool,
    consts: [Option<GateId>; 2],
}

impl CircuitBuilder {
    pub fn new(n_inputs: usize) -> Self {
        let gates = (0..n_inputs).map(|k| Gate::new(GateKind::Input(k as u32), vec![])).collect();
        CircuitBuilder { n_inputs, gates, fold: false, consts: [None, None] }
    }

    /// A builder that folds constants and double negations as gates are added.
    pub fn folding(n_inputs: usize) -> Self {
        CircuitBuilder { fold: true, ..Self::new(n_inputs) }
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn input(&self, k: usize) -> GateId {
        assert!(k < self.n_inputs, "input {k} out of range");
        k as GateId + 1
    }

    pub fn inputs(&self) -> Vec<GateId> {
        (1..=self.n_inputs as GateId).collect()
    }

    pub fn gate(&self, id: GateId) -> &Gate {
        &self.gates[id as usize - 1]
    }

    /// Appends a gate verbatim, without folding.
    pub fn push(&mut self, kind: GateKind, fanin: Vec<GateId>) -> GateId {
        self.gates.push(Gate::new(kind, fanin));
        self.gates.len() as GateId
    }

    fn const_value(&self, id: GateId) -> Option<bool> {
        match self.gate(id).kind {
            GateKind::Const(b) => Some(b),
            _ => None,
        }
    }

    pub fn constant(&mut self, b: bool) -> GateId {
        if let Some(id) = self.consts[b as usize] {
            return id;
        }
        let id = self.push(GateKind::Const(b), vec![]);
        self.consts[b as usize] = Some(id);
        id
    }

    pub fn not(&mut self, a: GateId) -> GateId {
        if self.fold {
            if let Some(b) = self.const_value(a) {
                return self.constant(!b);
            }
            let g = self.gate(a);
            if g.kind == GateKind::Not {
                return g.fanin[0];
            }
        }
        self.push(GateKind::Not, vec![a])
    }

    pub fn and(&mut self, fanin: impl IntoIterator<Item = GateId>) -> GateId {
        self.junction(GateKind::And, fanin.into_iter().collect())
    }

    pub fn or(&mut self, fanin: impl IntoIterator<Item = GateId>) -> GateId {
        self.junction(GateKind::Or, fanin.into_iter().collect())
    }

    fn junction(&mut self, kind: GateKind, fanin: Vec<GateId>) -> GateId {
        // AND: identity 1, absorbing 0; OR: identity 0, absorbing 1
        let absorbing = kind == GateKind::Or;
        let fanin = if self.fold {
            let mut kept = Vec::with_capacity(fanin.len());
            for f in fanin {
                match self.const_value(f) {
                    Some(b) if b == absorbing => return self.constant(absorbing),
                    Some(_) => {}
                    None => kept.push(f),
                }
            }
            if kept.len() == 1 {
                return kept[0];
            }
            kept
        } else {
            fanin
        };
        if fanin.is_empty() {
            return self.constant(!absorbing);
        }
        self.push(kind, fanin)
    }

    pub fn modm(&mut self, m: u32, fanin: impl IntoIterator<Item = GateId>) -> GateId {
        assert!(m >= 2, "modulus must be at least 2");
        let fanin: Vec<GateId> = fanin.into_iter().collect();
        let fanin = if self.fold {
            let mut ones = 0usize;
            let mut kept = Vec::with_capacity(fanin.len());
            for f in fanin {
                match self.const_value(f) {
                    Some(true) => ones += 1,
                    Some(false) => {}
                    None => kept.push(f),
                }
            }
            if kept.is_empty() {
                return self.constant(ones.is_multiple_of(m as usize));
            }
            let rem = ones % m as usize;
            if rem > 0 {
                let one = self.constant(true);
                kept.extend(std::iter::repeat_n(one, rem));
            }
            kept
        } else {
            fanin
        };
        if fanin.is_empty() {
            return self.constant(true);
        }
        self.push(GateKind::Mod(m), fanin)
    }

    /// Adds a gate of any non-input kind, folding if enabled.
    pub fn add(&mut self, kind: GateKind, fanin: Vec<GateId>) -> GateId {
        match kind {
            GateKind::Input(k) => self.input(k as usize),
            GateKind::Const(b) => self.constant(b),
            GateKind::Not => self.not(fanin[0]),
            GateKind::And => self.and(fanin),
            GateKind::Or => self.or(fanin),
            GateKind::Mod(m) => self.modm(m, fanin),
        }
    }

    /// Copies `c` into this builder with its inputs wired to `input_map`; returns the copy's output.
    pub fn embed(&mut self, c: &Circuit, input_map: &[GateId]) -> GateId {
        let map = self.embed_all(c, input_map);
        map[c.output as usize - 1]
    }

    /// Like [`embed`](Self::embed), returning the copy of every gate (entry `j - 1` is gate `j`).
    pub fn embed_all(&mut self, c: &Circuit, input_map: &[GateId]) -> Vec<GateId> {
        assert_eq!(input_map.len(), c.n_inputs, "embed: input map arity");
        let mut map: Vec<GateId> = Vec::with_capacity(c.gates.len());
        for g in &c.gates {
            let id = match g.kind {
                GateKind::Input(k) => input_map[k as usize],
                kind => {
                    let fanin = g.fanin.iter().map(|&f| map[f as usize - 1]).collect();
                    self.add(kind, fanin)
                }
            };
            map.push(id);
        }
        map
    }

    pub fn finish(self, output: GateId) -> Circuit {
        debug_assert!(output >= 1 && output as usize <= self.gates.len());
        Circuit { n_inputs: self.n_inputs, gates: self.gates, output }
    }
}

/// Circuit computing a single input (`x_{k+1}`) over `n` inputs.
pub fn projection(n: usize, k: usize) -> Circuit {
    let b = CircuitBuilder::new(n);
    let id = b.input(k);
    b.finish(id)
}

/// Constant circuit over `n` inputs.
pub fn constant(n: usize, value: bool) -> Circuit {
    let mut b = CircuitBuilder::new(n);
    let id = b.constant(value);
    b.finish(id)
}

/// Single-gate circuit applying `kind` to all `n` inputs in order.
pub fn single_gate(n: usize, kind: GateKind) -> Circuit {
    let mut b = CircuitBuilder::new(n);
    let ins = b.inputs();
    let id = b.push(kind, ins);
    b.finish(id)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::truthtable::index_to_assignment;

    fn and2() -> Circuit {
        single_gate(2, GateKind::And)
    }

    #[test]
    fn evaluate_basic_gates() {
        let or2 = single_gate(2, GateKind::Or);
        assert!(or2.evaluate(&[true, false]).unwrap());
        let mod2 = single_gate(2, GateKind::Mod(2));
        assert!(mod2.evaluate(&[true, true]).unwrap());
        assert!(!mod2.evaluate(&[true, false]).unwrap());
        assert_eq!(
            or2.evaluate(&[true]),
            Err(Error::InputArity { expected: 2, got: 1 })
        );
    }

    #[test]
    fn wire_trace_examples() {
        assert_eq!(and2().wire_trace(&[true, true]).unwrap(), vec![true, true, true]);
        let mut b = CircuitBuilder::new(1);
        let n = b.not(1);
        let not1 = b.finish(n);
        assert_eq!(not1.wire_trace(&[false]).unwrap(), vec![false, true]);
    }

    #[test]
    fn truth_tables_of_small_circuits() {
        assert_eq!(and2().truth_table().unwrap().to_bit_string(), "0001");
        assert_eq!(constant(2, true).truth_table().unwrap().to_bit_string(), "1111");
        let big = single_gate(7, GateKind::Mod(3));
        let tt = big.truth_table().unwrap();
        for i in 0..128usize {
            assert_eq!(tt.get(i), i.count_ones() % 3 == 0);
        }
    }

    #[test]
    fn table_cap_is_enforced() {
        let c = single_gate(3, GateKind::And);
        assert!(matches!(c.truth_table_capped(2), Err(Error::ResourceLimit { .. })));
    }

    #[test]
    fn validation_rejects_bad_circuits() {
        let gates = vec![
            Gate::new(GateKind::Input(0), vec![]),
            Gate::new(GateKind::Mod(1), vec![1]),
        ];
        assert!(Circuit::new(1, gates, 2).is_err());
        let gates = vec![
            Gate::new(GateKind::Input(0), vec![]),
            Gate::new(GateKind::And, vec![3]),
            Gate::new(GateKind::Not, vec![1]),
        ];
        assert!(Circuit::new(1, gates, 2).is_err());
        let gates = vec![Gate::new(GateKind::Input(0), vec![])];
        assert!(Circuit::new(1, gates, 2).is_err());
    }

    #[test]
    fn compose_examples() {
        let mut b = CircuitBuilder::new(1);
        let n = b.not(1);
        let not1 = b.finish(n);
        let id = Circuit::compose(&not1, std::slice::from_ref(&not1)).unwrap();
        assert_eq!(id.truth_table().unwrap().to_bit_string(), "01");
        let p = projection(1, 0);
        let c = Circuit::compose(&and2(), &[p.clone(), p]).unwrap();
        assert_eq!(c.truth_table().unwrap().to_bit_string(), "01");
        assert!(Circuit::compose(&and2(), &[projection(1, 0)]).is_err());
        assert!(Circuit::compose(&and2(), &[projection(1, 0), projection(2, 0)]).is_err());
    }

    #[test]
    fn normalize_fanin2_examples() {
        let and3 = single_gate(3, GateKind::And);
        let norm = and3.normalize_fanin2().unwrap();
        assert!(norm.is_fanin2());
        assert_eq!(norm.size(), 5);
        assert_eq!(norm.truth_table().unwrap(), and3.truth_table().unwrap());
        let fixed = and2().normalize_fanin2().unwrap();
        assert_eq!(fixed, and2());
        assert!(single_gate(2, GateKind::Mod(2)).normalize_fanin2().is_err());
    }

    #[test]
    fn stats_examples() {
        let s = projection(1, 0).stats();
        assert_eq!((s.size, s.depth), (1, 0));
        let mut b = CircuitBuilder::new(2);
        let n = b.not(1);
        let a = b.and([n, 2]);
        let c = b.finish(a);
        let s = c.stats();
        assert_eq!((s.size, s.depth, s.wires), (4, 2, 3));
        assert_eq!(c.acc_depth(), 1);
    }

    #[test]
    fn folding_builder_folds() {
        let mut b = CircuitBuilder::folding(2);
        let zero = b.constant(false);
        let one = b.constant(true);
        assert_eq!(b.and([1, zero]), zero);
        assert_eq!(b.or([1, zero]), 1);
        let nn = b.not(1);
        assert_eq!(b.not(nn), 1);
        assert_eq!(b.modm(2, [one, one]), one);
        let m = b.modm(3, [1, one, one, one, one]);
        assert_eq!(b.gate(m).fanin, vec![1, one]);
    }

    #[test]
    fn restrict_and_eliminate_constants() {
        let c = single_gate(3, GateKind::Mod(2));
        let r = c.restrict(&[(1, true)]);
        assert_eq!(r.n_inputs(), 2);
        for i in 0..4 {
            let a = index_to_assignment(2, i);
            let full = [a[0], true, a[1]];
            assert_eq!(r.evaluate(&a).unwrap(), c.evaluate(&full).unwrap());
        }
        let e = r.eliminate_constants().unwrap();
        assert!(!e.gates().iter().any(|g| matches!(g.kind, GateKind::Const(_))));
        assert_eq!(e.truth_table().unwrap(), r.truth_table().unwrap());
        assert!(constant(0, true).eliminate_constants().is_err());
    }
}
