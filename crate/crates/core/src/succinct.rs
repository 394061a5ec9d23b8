//! Succinct 3-CNF formulas: truth tables that spell clause lists.
//!
//! # Table layout
//!
//! A table is a sequence of records, one clause per record. Each record has
//! four fields of `L` bits, where `L` is the smallest power of two that is at
//! least `w + 1`, so a record holds `4L` bits and starts at a multiple of
//! `4L`. Table index bits therefore split as
//! `(clause index | field number, 2 bits | bit offset, log2 L bits)`.
//!
//! Within a field, bit 0 is the sign (1 = negated) and bits `1..L` hold the
//! variable index most significant bit first. The index must fit in the
//! last `w` bits; the leading pad bits are zero. Index 0 marks an absent
//! literal and must carry sign 0. The fourth field is always zero. A record
//! whose three literal fields are all absent is a pad clause and is
//! skipped, which lets formulas shorter than a power of two fill a table.
//!
//! A witness circuit `W` has `ceil(log2 V)` inputs and assigns variable `v`
//! the value `T(W)[v - 1]`.

use rayon::prelude::*;

use crate::circuit::{input_words, Circuit, CircuitBuilder, GateId};
use crate::cnf::{self, Clause, Formula3CNF, Lit};
use crate::error::{Error, Result};
use crate::rom::{address_bits, rom_circuit, table_circuit};
use crate::truthtable::index_to_assignment;

/// Largest table (in input bits) the streaming routines will walk.
pub const DEFAULT_STREAM_CAP: usize = 28;

/// Table words evaluated per parallel batch while streaming.
pub const STREAM_BATCH_WORDS: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClauseEncoding {
    var_width: usize,
    declared_vars: Option<u64>,
}

impl ClauseEncoding {
    /// Encoding with `w`-bit variable indices over the full space `1..2^w`.
    pub fn new(var_width: usize) -> Result<Self> {
        if !(1..=62).contains(&var_width) {
            return Err(Error::Encoding(format!("variable width {var_width} outside 1..=62")));
        }
        Ok(ClauseEncoding { var_width, declared_vars: None })
    }

    /// Encoding that additionally declares the variable count `V`.
    pub fn with_vars(var_width: usize, vars: u64) -> Result<Self> {
        let enc = Self::new(var_width)?;
        if vars > enc.index_limit() {
            return Err(Error::Encoding(format!("{vars} variables do not fit {var_width}-bit indices")));
        }
        Ok(ClauseEncoding { declared_vars: Some(vars), ..enc })
    }

    /// Smallest width able to index `vars` variables.
    pub fn for_vars(vars: u64) -> Result<Self> {
        Self::with_vars(address_bits(vars + 1).max(1), vars)
    }

    pub fn var_width(&self) -> usize {
        self.var_width
    }

    pub fn declared_vars(&self) -> Option<u64> {
        self.declared_vars
    }

    /// Largest index a field can hold: `2^w - 1`.
    pub fn index_limit(&self) -> u64 {
        (1u64 << self.var_width) - 1
    }

    /// Size of the variable space: the declared count, else `2^w - 1`.
    pub fn num_vars(&self) -> u64 {
        self.declared_vars.unwrap_or_else(|| self.index_limit())
    }

    pub fn field_width(&self) -> usize {
        (self.var_width + 1).next_power_of_two()
    }

    pub fn field_bits(&self) -> usize {
        self.field_width().trailing_zeros() as usize
    }

    pub fn record_width(&self) -> usize {
        4 * self.field_width()
    }

    /// `log2(record_width)`: table-index bits consumed inside one record.
    pub fn record_bits(&self) -> usize {
        self.field_bits() + 2
    }

    /// Clause-index bits for a table with `table_inputs` inputs.
    pub fn clause_count_bits(&self, table_inputs: usize) -> Result<usize> {
        table_inputs.checked_sub(self.record_bits()).ok_or(Error::InputArity {
            expected: self.record_bits(),
            got: table_inputs,
        })
    }

    /// Input count of a witness circuit: `ceil(log2 V)`.
    pub fn witness_arity(&self) -> usize {
        address_bits(self.num_vars())
    }

    /// Offset of the first index bit inside a field.
    fn index_offset(&self) -> usize {
        self.field_width() - self.var_width
    }
}

/// Counters reported by the streaming routines.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StreamStats {
    pub records: u64,
    pub clauses: u64,
    /// Largest number of bits held in the record buffer.
    pub peak_buffer_bits: usize,
    /// Size of the fixed batch of table words evaluated together.
    pub batch_bits: usize,
}

fn decode_field(bits: &[bool], enc: &ClauseEncoding, record: u64, f: usize) -> Result<Option<Lit>> {
    let bad = |message: String| Error::Decode { record, message };
    let off = enc.index_offset();
    if bits[1..off].iter().any(|&b| b) {
        return Err(bad(format!("field {f}: nonzero pad bits")));
    }
    let var = bits[off..].iter().fold(0u64, |acc, &b| (acc << 1) | b as u64);
    let negated = bits[0];
    if var == 0 {
        if negated {
            return Err(bad(format!("field {f}: absent literal with sign bit set")));
        }
        return Ok(None);
    }
    if var > enc.num_vars() {
        return Err(bad(format!("field {f}: variable {var} exceeds {}", enc.num_vars())));
    }
    Ok(Some(Lit { var, negated }))
}

/// Decodes one `4L`-bit record; `None` is a pad clause.
pub fn decode_record(bits: &[bool], enc: &ClauseEncoding, record: u64) -> Result<Option<Clause>> {
    let l = enc.field_width();
    assert_eq!(bits.len(), 4 * l);
    if bits[3 * l..].iter().any(|&b| b) {
        return Err(Error::Decode { record, message: "field 3: nonzero bits".into() });
    }
    let mut clause = Clause::new();
    for f in 0..3 {
        if let Some(lit) = decode_field(&bits[f * l..(f + 1) * l], enc, record, f)? {
            clause.push(lit);
        }
    }
    Ok(if clause.is_empty() { None } else { Some(clause) })
}

/// Bits of one record as written to a table.
pub fn encode_record(clause: &[Lit], enc: &ClauseEncoding) -> Result<Vec<bool>> {
    if clause.is_empty() || clause.len() > 3 {
        return Err(Error::Encoding(format!("clause with {} literals", clause.len())));
    }
    let l = enc.field_width();
    let mut bits = vec![false; 4 * l];
    for (f, lit) in clause.iter().enumerate() {
        if lit.var == 0 || lit.var > enc.num_vars() {
            return Err(Error::Encoding(format!("variable {} outside 1..={}", lit.var, enc.num_vars())));
        }
        let field = &mut bits[f * l..(f + 1) * l];
        field[0] = lit.negated;
        for t in 0..enc.var_width {
            field[l - 1 - t] = (lit.var >> t) & 1 == 1;
        }
    }
    Ok(bits)
}

/// Walks `T(x)` record by record without materializing it.
///
/// `visit` sees each record's index and decoded clause (`None` for pad) and
/// returns `false` to stop early.
pub fn stream_records(
    x: &Circuit,
    enc: &ClauseEncoding,
    cap: usize,
    mut visit: impl FnMut(u64, Option<Clause>) -> Result<bool>,
) -> Result<StreamStats> {
    let n = x.n_inputs();
    enc.clause_count_bits(n)?;
    if n > cap {
        return Err(Error::ResourceLimit { what: "table input count", value: n, cap });
    }
    let width = enc.record_width();
    let total = 1u64 << n;
    let mut stats = StreamStats { batch_bits: STREAM_BATCH_WORDS * 64, ..Default::default() };
    let mut buf: Vec<bool> = Vec::with_capacity(width);
    let mut pos = 0u64;
    'batches: while pos < total {
        let words = ((total - pos).div_ceil(64) as usize).min(STREAM_BATCH_WORDS);
        let batch: Vec<u64> = (0..words)
            .into_par_iter()
            .map(|k| x.eval_words(&input_words(n, pos as usize + 64 * k)))
            .collect();
        for word in batch {
            let lanes = (total - pos).min(64);
            for lane in 0..lanes {
                buf.push((word >> lane) & 1 == 1);
                stats.peak_buffer_bits = stats.peak_buffer_bits.max(buf.len());
                if buf.len() == width {
                    let record = stats.records;
                    stats.records += 1;
                    let clause = decode_record(&buf, enc, record)?;
                    buf.clear();
                    if clause.is_some() {
                        stats.clauses += 1;
                    }
                    if !visit(record, clause)? {
                        break 'batches;
                    }
                }
            }
            pos += lanes;
        }
    }
    Ok(stats)
}

/// The formula spelled by `T(x)`, pad clauses removed. Its variable count is
/// the encoding's variable space.
pub fn decode_formula(x: &Circuit, enc: &ClauseEncoding) -> Result<Formula3CNF> {
    decode_formula_capped(x, enc, DEFAULT_STREAM_CAP)
}

pub fn decode_formula_capped(x: &Circuit, enc: &ClauseEncoding, cap: usize) -> Result<Formula3CNF> {
    let mut clauses = Vec::new();
    stream_records(x, enc, cap, |_, c| {
        clauses.extend(c);
        Ok(true)
    })?;
    Ok(Formula3CNF::new(enc.num_vars(), clauses))
}

/// Record-aligned table bits for `f` (at least one record, padded to a power of two).
pub fn formula_table(f: &Formula3CNF, enc: &ClauseEncoding) -> Result<(usize, Vec<bool>)> {
    if f.num_vars > enc.num_vars() {
        return Err(Error::Encoding(format!(
            "{} variables exceed the encoding's {}",
            f.num_vars,
            enc.num_vars()
        )));
    }
    let clause_bits = address_bits(f.clauses.len() as u64);
    let n = clause_bits + enc.record_bits();
    let mut bits = Vec::with_capacity(f.clauses.len() * enc.record_width());
    for c in &f.clauses {
        if c.iter().any(|l| l.var > f.num_vars) {
            return Err(Error::Encoding(format!("clause {c:?} exceeds {} variables", f.num_vars)));
        }
        bits.extend(encode_record(c, enc)?);
    }
    Ok((n, bits))
}

/// A multiplexer-tree circuit whose table decodes to `f`.
pub fn encode_formula(f: &Formula3CNF, enc: &ClauseEncoding) -> Result<Circuit> {
    let (n, bits) = formula_table(f, enc)?;
    Ok(rom_circuit(n, &bits))
}

/// Witness circuit with `ceil(log2 len)` inputs whose table prefix is `bits`.
pub fn encode_assignment(bits: &[bool]) -> Circuit {
    table_circuit(bits)
}

/// Assignment (entry `v - 1` is variable `v`) encoded by `w` for `V` variables.
pub fn witness_assignment(w: &Circuit, vars: u64) -> Result<Vec<bool>> {
    let a = w.n_inputs();
    (0..vars)
        .map(|v| w.evaluate(&index_to_assignment(a, v as usize)))
        .collect()
}

fn check_witness_arity(w: &Circuit, enc: &ClauseEncoding) -> Result<()> {
    if w.n_inputs() != enc.witness_arity() {
        return Err(Error::InputArity { expected: enc.witness_arity(), got: w.n_inputs() });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessCheck {
    pub satisfied: bool,
    /// Least record index whose clause the witness falsifies.
    pub violated: Option<u64>,
    pub stats: StreamStats,
}

/// Streams `T(x)` and evaluates `w` per literal; stops at the first violated clause.
pub fn check_witness_report(x: &Circuit, w: &Circuit, enc: &ClauseEncoding) -> Result<WitnessCheck> {
    check_witness_arity(w, enc)?;
    let a = w.n_inputs();
    let mut violated = None;
    let stats = stream_records(x, enc, DEFAULT_STREAM_CAP, |record, clause| {
        let Some(clause) = clause else { return Ok(true) };
        for lit in &clause {
            let value = w.evaluate(&index_to_assignment(a, (lit.var - 1) as usize))?;
            if value != lit.negated {
                return Ok(true);
            }
        }
        violated = Some(record);
        Ok(false)
    })?;
    Ok(WitnessCheck { satisfied: violated.is_none(), violated, stats })
}

pub fn check_witness(x: &Circuit, w: &Circuit, enc: &ClauseEncoding) -> Result<bool> {
    Ok(check_witness_report(x, w, enc)?.satisfied)
}

fn xor(b: &mut CircuitBuilder, p: GateId, q: GateId) -> GateId {
    let np = b.not(p);
    let nq = b.not(q);
    let l = b.and([p, nq]);
    let r = b.and([np, q]);
    b.or([l, r])
}

/// The clause-check circuit `D` over the clause index `i`.
///
/// `D(i) = 1` iff record `i` is a pad clause or has a literal satisfied by
/// `T(w)`. Each of the three literal fields reads its sign and index bits
/// through one copy of `x` per bit, so `x` appears `3 (w + 1)` times;
/// the index, minus one, addresses a copy of `w`. Records are assumed to
/// decode cleanly; on such tables `D` agrees with [`check_witness`].
pub fn build_clause_check_circuit(x: &Circuit, w: &Circuit, enc: &ClauseEncoding) -> Result<Circuit> {
    let cb = enc.clause_count_bits(x.n_inputs())?;
    check_witness_arity(w, enc)?;
    let mut b = CircuitBuilder::new(cb);
    let clause_inputs = b.inputs();
    let zero = b.constant(false);
    let one = b.constant(true);
    let fb = enc.field_bits();
    let l = enc.field_width();
    let wid = enc.var_width;
    let a = w.n_inputs();

    // reads table bit (i, f, offset) with a verbatim copy of x
    let read = |b: &mut CircuitBuilder, f: usize, offset: usize| {
        let mut map = clause_inputs.clone();
        map.push(if f & 2 != 0 { one } else { zero });
        map.push(if f & 1 != 0 { one } else { zero });
        for t in (0..fb).rev() {
            map.push(if (offset >> t) & 1 == 1 { one } else { zero });
        }
        b.embed(x, &map)
    };

    let mut satisfied = Vec::with_capacity(3);
    let mut absent = Vec::with_capacity(3);
    for f in 0..3 {
        let sign = read(&mut b, f, 0);
        let idx: Vec<GateId> = (l - wid..l).map(|off| read(&mut b, f, off)).collect();
        let present = b.or(idx.clone());
        // (v - 1) mod 2^w: bit p flips iff every lower bit is zero
        let mut dec = Vec::with_capacity(wid);
        let mut lower_zero: Vec<GateId> = Vec::new();
        for p in 0..wid {
            let bit = idx[wid - 1 - p];
            let out = if p == 0 {
                b.not(bit)
            } else {
                let all = b.and(lower_zero.clone());
                xor(&mut b, bit, all)
            };
            dec.push(out);
            let nb = b.not(bit);
            lower_zero.push(nb);
        }
        let w_in: Vec<GateId> = (0..a).map(|k| dec[a - 1 - k]).collect();
        let value = b.embed(w, &w_in);
        let lit = xor(&mut b, value, sign);
        satisfied.push(b.and([present, lit]));
        absent.push(b.not(present));
    }
    let pad = b.and(absent);
    satisfied.push(pad);
    let out = b.or(satisfied);
    Ok(b.finish(out))
}

/// `¬D`: satisfiable exactly when some clause is violated.
pub fn negate(d: &Circuit) -> Circuit {
    d.negated()
}

/// Decodes `T(x)` in full and decides the formula with a complete DPLL search.
pub fn succinct_brute(x: &Circuit, enc: &ClauseEncoding) -> Result<bool> {
    Ok(succinct_solve(x, enc)?.is_some())
}

/// Like [`succinct_brute`], returning a model over the encoding's variables
/// (unused variables are false).
pub fn succinct_solve(x: &Circuit, enc: &ClauseEncoding) -> Result<Option<Vec<bool>>> {
    let f = decode_formula(x, enc)?;
    Ok(solve_compact(&f))
}

/// Solves `f` over only the variables it mentions; the model covers all `f.num_vars`.
pub fn solve_compact(f: &Formula3CNF) -> Option<Vec<bool>> {
    let mut used: Vec<u64> = f.clauses.iter().flatten().map(|l| l.var).collect();
    used.sort_unstable();
    used.dedup();
    let rename = |v: u64| used.binary_search(&v).unwrap() as u64 + 1;
    let clauses = f
        .clauses
        .iter()
        .map(|c| c.iter().map(|l| Lit { var: rename(l.var), negated: l.negated }).collect())
        .collect();
    let model = cnf::solve(&Formula3CNF::new(used.len() as u64, clauses))?;
    let mut full = vec![false; f.num_vars as usize];
    for (k, &v) in used.iter().enumerate() {
        full[v as usize - 1] = model[k];
    }
    Some(full)
}
