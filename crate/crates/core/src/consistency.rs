//! Wire-value circuits and the consistency check that certifies them.
//!
//! A wire-value circuit `C` for a fan-in-2 AND/OR/NOT circuit `x` with `n`
//! inputs and `s` gates takes `(i, j)`: `n` input bits followed by
//! `ceil(log2 s)` bits holding `j - 1` most significant bit first. It claims
//! `C(i, j)` is the value of gate `j` of `x` on input `i`. Here `C` is built
//! for one fixed `x`; a family-wide `C` would read the description of `x` as
//! extra inputs.
//!
//! The consistency circuit `E'(i)` holds when `C` agrees with `i` on the
//! input gates and every other gate's claimed value follows from its
//! predecessors' claimed values. `¬E'` is unsatisfiable exactly when `C` is
//! right everywhere.

use crate::accsat::{decide, SatBackend, SatMetrics};
use crate::circuit::{Circuit, CircuitBuilder, GateId, GateKind};
use crate::error::{Error, Result};
use crate::rom::{address_bits, rom_circuit, select_into};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateTag {
    Input = 0,
    And = 1,
    Or = 2,
    Not = 3,
}

impl GateTag {
    pub const ALL: [GateTag; 4] = [GateTag::Input, GateTag::And, GateTag::Or, GateTag::Not];

    /// Two-bit code, high bit first.
    pub fn bits(self) -> [bool; 2] {
        let v = self as u8;
        [v & 2 != 0, v & 1 != 0]
    }

    pub fn from_bits(bits: [bool; 2]) -> GateTag {
        GateTag::ALL[(bits[0] as usize) << 1 | bits[1] as usize]
    }
}

/// `⟨j, j1, j2, g⟩`; predecessors are 0 where unused (both for INPUT, `j2` for NOT).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GateTuple {
    pub j: u64,
    pub j1: u64,
    pub j2: u64,
    pub tag: GateTag,
}

/// Rewrites `x` into the form the consistency machinery reads: no constants,
/// AND/OR with exactly two fan-ins.
pub fn prepare(x: &Circuit) -> Result<Circuit> {
    if x.has_mod_gates() {
        return Err(Error::UnsupportedGate("wire-value circuits cover AND/OR/NOT circuits only".into()));
    }
    x.eliminate_constants()?.normalize_fanin2()
}

pub fn tuples(x: &Circuit) -> Result<Vec<GateTuple>> {
    x.gates()
        .iter()
        .enumerate()
        .map(|(idx, g)| {
            let j = idx as u64 + 1;
            let f = |k: usize| g.fanin[k] as u64;
            Ok(match g.kind {
                GateKind::Input(_) => GateTuple { j, j1: 0, j2: 0, tag: GateTag::Input },
                GateKind::Not => GateTuple { j, j1: f(0), j2: 0, tag: GateTag::Not },
                GateKind::And | GateKind::Or if g.fanin.len() == 2 => {
                    let tag = if g.kind == GateKind::And { GateTag::And } else { GateTag::Or };
                    GateTuple { j, j1: f(0), j2: f(1), tag }
                }
                kind => {
                    return Err(Error::UnsupportedGate(format!(
                        "gate {j}: {} with {} fan-ins (run `prepare` first)",
                        kind.mnemonic(),
                        g.fanin.len()
                    )))
                }
            })
        })
        .collect()
}

/// Rebuilds a circuit from its tuples (inverse of [`tuples`]).
pub fn circuit_from_tuples(n: usize, tuples: &[GateTuple], output: GateId) -> Result<Circuit> {
    let gates = tuples
        .iter()
        .map(|t| {
            let (kind, fanin) = match t.tag {
                GateTag::Input => (GateKind::Input(t.j as u32 - 1), vec![]),
                GateTag::Not => (GateKind::Not, vec![t.j1 as GateId]),
                GateTag::And => (GateKind::And, vec![t.j1 as GateId, t.j2 as GateId]),
                GateTag::Or => (GateKind::Or, vec![t.j1 as GateId, t.j2 as GateId]),
            };
            crate::circuit::Gate::new(kind, fanin)
        })
        .collect();
    Circuit::new(n, gates, output)
}

/// Bits of a gate address: `ceil(log2 s)`.
pub fn id_bits(s: usize) -> usize {
    address_bits(s as u64)
}

fn id_code(j: u64, bits: usize) -> Vec<bool> {
    let a = j.saturating_sub(1);
    (0..bits).rev().map(|t| (a >> t) & 1 == 1).collect()
}

fn code_value(bits: &[bool]) -> u64 {
    bits.iter().fold(0, |acc, &b| (acc << 1) | b as u64)
}

/// `G_x`: one lookup circuit per output bit, each over the `ceil(log2 s)`
/// address bits of `j`. Predecessor ids are emitted as `j - 1`, matching
/// the address format of a wire-value circuit.
#[derive(Clone, Debug)]
pub struct GateLookup {
    pub id_bits: usize,
    pub j1: Vec<Circuit>,
    pub j2: Vec<Circuit>,
    pub tag: [Circuit; 2],
    /// 1 on addresses that name a gate.
    pub valid: Circuit,
}

impl GateLookup {
    /// Evaluates the bundle on gate `j` and decodes `⟨j1, j2, g⟩`.
    pub fn lookup(&self, j: u64) -> Result<(u64, u64, GateTag)> {
        let addr = id_code(j, self.id_bits);
        let eval = |cs: &[Circuit]| -> Result<Vec<bool>> { cs.iter().map(|c| c.evaluate(&addr)).collect() };
        let tag = GateTag::from_bits([self.tag[0].evaluate(&addr)?, self.tag[1].evaluate(&addr)?]);
        let j1 = code_value(&eval(&self.j1)?) + 1;
        let j2 = code_value(&eval(&self.j2)?) + 1;
        Ok(match tag {
            GateTag::Input => (0, 0, tag),
            GateTag::Not => (j1, 0, tag),
            _ => (j1, j2, tag),
        })
    }
}

pub fn build_gx(x: &Circuit) -> Result<GateLookup> {
    let ts = tuples(x)?;
    let bits = id_bits(ts.len());
    let column = |f: &dyn Fn(&GateTuple) -> bool| -> Circuit {
        let table: Vec<bool> = ts.iter().map(f).collect();
        rom_circuit(bits, &table)
    };
    let field = |pick: fn(&GateTuple) -> u64| -> Vec<Circuit> {
        (0..bits)
            .map(|k| {
                let shift = bits - 1 - k;
                column(&|t: &GateTuple| (pick(t).saturating_sub(1) >> shift) & 1 == 1)
            })
            .collect()
    };
    Ok(GateLookup {
        id_bits: bits,
        j1: field(|t| t.j1),
        j2: field(|t| t.j2),
        tag: [column(&|t| t.tag.bits()[0]), column(&|t| t.tag.bits()[1])],
        valid: column(&|_| true),
    })
}

/// `t(b1, b2, b, g)`: whether gate type `g` maps `(b1, b2)` to `b`. NOT
/// ignores `b2`; INPUT is always consistent here (input gates are checked
/// against `i` separately).
pub fn gate_check_t(b1: bool, b2: bool, b: bool, g: GateTag) -> bool {
    match g {
        GateTag::Input => true,
        GateTag::And => (b1 && b2) == b,
        GateTag::Or => (b1 || b2) == b,
        GateTag::Not => !b1 == b,
    }
}

fn xnor(b: &mut CircuitBuilder, p: GateId, q: GateId) -> GateId {
    let np = b.not(p);
    let nq = b.not(q);
    let both = b.and([p, q]);
    let neither = b.and([np, nq]);
    b.or([both, neither])
}

/// Adds the `t` gadget to `b`; `tag` is the two-bit gate code, high bit first.
pub fn t_into(b: &mut CircuitBuilder, b1: GateId, b2: GateId, v: GateId, tag: [GateId; 2]) -> GateId {
    let n1 = b.not(tag[0]);
    let n0 = b.not(tag[1]);
    let is_input = b.and([n1, n0]);
    let is_and = b.and([n1, tag[1]]);
    let is_or = b.and([tag[0], n0]);
    let is_not = b.and([tag[0], tag[1]]);
    let and = b.and([b1, b2]);
    let or = b.or([b1, b2]);
    let not = b.not(b1);
    let e_and = xnor(b, v, and);
    let e_or = xnor(b, v, or);
    let e_not = xnor(b, v, not);
    let c_and = b.and([is_and, e_and]);
    let c_or = b.and([is_or, e_or]);
    let c_not = b.and([is_not, e_not]);
    b.or([is_input, c_and, c_or, c_not])
}

/// The `t` gadget as a circuit over `(b1, b2, b, g_hi, g_lo)`.
pub fn t_circuit() -> Circuit {
    let mut b = CircuitBuilder::new(5);
    let out = t_into(&mut b, 1, 2, 3, [4, 5]);
    b.finish(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WireValueCandidate {
    pub circuit: Circuit,
    pub n: usize,
    pub s: usize,
}

impl WireValueCandidate {
    pub fn new(circuit: Circuit, n: usize, s: usize) -> Result<Self> {
        let expected = n + id_bits(s);
        if circuit.n_inputs() != expected {
            return Err(Error::InputArity { expected, got: circuit.n_inputs() });
        }
        Ok(WireValueCandidate { circuit, n, s })
    }

    /// Candidate for `x`'s shape.
    pub fn for_circuit(circuit: Circuit, x: &Circuit) -> Result<Self> {
        Self::new(circuit, x.n_inputs(), x.size())
    }

    pub fn id_bits(&self) -> usize {
        id_bits(self.s)
    }

    /// `C(i, j)`.
    pub fn value(&self, i: &[bool], j: u64) -> Result<bool> {
        let mut a = i.to_vec();
        a.extend(id_code(j, self.id_bits()));
        self.circuit.evaluate(&a)
    }

    /// `x' = C(·, j)` as a circuit over `i` alone, constants folded.
    pub fn fix_gate(&self, j: u64) -> Circuit {
        let mut b = CircuitBuilder::folding(self.n);
        let mut map = b.inputs();
        for bit in id_code(j, self.id_bits()) {
            map.push(b.constant(bit));
        }
        let out = b.embed(&self.circuit, &map);
        b.finish(out).compact()
    }
}

/// A correct candidate: one copy of `x` on `i`, with a multiplexer on `j`
/// selecting among its gates.
pub fn make_wire_value_circuit(x: &Circuit) -> Result<WireValueCandidate> {
    tuples(x)?;
    let n = x.n_inputs();
    let bits = id_bits(x.size());
    let mut b = CircuitBuilder::new(n + bits);
    let all = b.inputs();
    let wires = b.embed_all(x, &all[..n]);
    let out = select_into(&mut b, &all[n..], &wires);
    WireValueCandidate::new(b.finish(out).compact(), n, x.size())
}

/// `C` with its output flipped on the single entry `(i, j)`.
pub fn corrupt_candidate(c: &WireValueCandidate, i: &[bool], j: u64) -> WireValueCandidate {
    let arity = c.circuit.n_inputs();
    let mut b = CircuitBuilder::new(arity);
    let ins = b.inputs();
    let v = b.embed(&c.circuit, &ins);
    let mut target = i.to_vec();
    target.extend(id_code(j, c.id_bits()));
    let lits: Vec<GateId> = ins.iter().zip(&target).map(|(&g, &bit)| if bit { g } else { b.not(g) }).collect();
    let hit = b.and(lits);
    let nv = b.not(v);
    let nh = b.not(hit);
    let l = b.and([v, nh]);
    let r = b.and([nv, hit]);
    let out = b.or([l, r]);
    WireValueCandidate { circuit: b.finish(out), n: c.n, s: c.s }
}

/// How `E'` ranges over gates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ConsistencyForm {
    /// `j` unrolled: one conjunct per gate, lookups folded to constants; inputs are `i`.
    #[default]
    Unrolled,
    /// `j` as a circuit input feeding `G_x`: `E(i, j)` over `i` then `j - 1`.
    GateInput,
}

fn check_candidate(x: &Circuit, c: &WireValueCandidate) -> Result<Vec<GateTuple>> {
    let ts = tuples(x)?;
    if c.n != x.n_inputs() || c.s != x.size() {
        return Err(Error::InputArity { expected: x.n_inputs() + id_bits(x.size()), got: c.circuit.n_inputs() });
    }
    Ok(ts)
}

/// The consistency circuit in the requested form. It is 1 exactly where `C`
/// is locally consistent, so `¬E'` is unsatisfiable iff `C` is correct.
pub fn build_consistency_circuit(
    x: &Circuit,
    c: &WireValueCandidate,
    form: ConsistencyForm,
) -> Result<Circuit> {
    let ts = check_candidate(x, c)?;
    let n = x.n_inputs();
    let bits = c.id_bits();
    match form {
        ConsistencyForm::Unrolled => {
            let mut b = CircuitBuilder::folding(n);
            let i = b.inputs();
            let consts = [b.constant(false), b.constant(true)];
            let claim = |b: &mut CircuitBuilder, j: u64| {
                let mut map = i.clone();
                map.extend(id_code(j, bits).into_iter().map(|bit| consts[bit as usize]));
                b.embed(&c.circuit, &map)
            };
            let mut conj = Vec::with_capacity(ts.len());
            for t in &ts {
                let v = claim(&mut b, t.j);
                let ok = match (t.tag, x.gate(t.j as GateId).kind) {
                    (GateTag::Input, GateKind::Input(k)) => xnor(&mut b, v, i[k as usize]),
                    (GateTag::Input, _) => unreachable!("INPUT tuple on a non-input gate"),
                    (tag, _) => {
                        let b1 = claim(&mut b, t.j1);
                        let b2 = if tag == GateTag::Not { consts[0] } else { claim(&mut b, t.j2) };
                        let [hi, lo] = tag.bits();
                        t_into(&mut b, b1, b2, v, [consts[hi as usize], consts[lo as usize]])
                    }
                };
                conj.push(ok);
            }
            let out = b.and(conj);
            Ok(b.finish(out).compact())
        }
        ConsistencyForm::GateInput => {
            let gx = build_gx(x)?;
            let mut b = CircuitBuilder::new(n + bits);
            let all = b.inputs();
            let (i, j) = all.split_at(n);
            let look = |b: &mut CircuitBuilder, cs: &[Circuit]| -> Vec<GateId> {
                cs.iter().map(|cc| b.embed(cc, j)).collect()
            };
            let j1 = look(&mut b, &gx.j1);
            let j2 = look(&mut b, &gx.j2);
            let tag = look(&mut b, &gx.tag);
            let valid = b.embed(&gx.valid, j);
            let claim = |b: &mut CircuitBuilder, addr: &[GateId]| {
                let mut map = i.to_vec();
                map.extend_from_slice(addr);
                b.embed(&c.circuit, &map)
            };
            let v = claim(&mut b, j);
            let b1 = claim(&mut b, &j1);
            let b2 = claim(&mut b, &j2);
            let t = t_into(&mut b, b1, b2, v, [tag[0], tag[1]]);
            // input gate j reads input bit j - 1
            let input_bit = select_into(&mut b, j, i);
            let input_ok = xnor(&mut b, v, input_bit);
            let n1 = b.not(tag[0]);
            let n0 = b.not(tag[1]);
            let is_input = b.and([n1, n0]);
            let not_input = b.not(is_input);
            let a = b.or([not_input, input_ok]);
            let checked = b.and([a, t]);
            let invalid = b.not(valid);
            let out = b.or([invalid, checked]);
            Ok(b.finish(out))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WireCheck {
    pub accepted: bool,
    /// Input `i` on which `C` is caught (the first `n` bits of the `¬E'` witness).
    pub exposing: Option<Vec<bool>>,
    /// For the gate-input form, the gate address part of the witness.
    pub exposing_gate: Option<u64>,
    pub econs_gates: usize,
    pub metrics: SatMetrics,
}

/// Accepts iff `¬E'` is unsatisfiable according to `backend`.
pub fn verify_wire_circuit(
    x: &Circuit,
    c: &WireValueCandidate,
    backend: &SatBackend,
    form: ConsistencyForm,
) -> Result<WireCheck> {
    let e = build_consistency_circuit(x, c, form)?;
    let res = decide(&e.negated(), backend)?;
    let n = x.n_inputs();
    let exposing = res.witness.as_ref().map(|w| w[..n].to_vec());
    let exposing_gate = match form {
        ConsistencyForm::GateInput => res.witness.as_ref().map(|w| code_value(&w[n..]) + 1),
        ConsistencyForm::Unrolled => None,
    };
    Ok(WireCheck {
        accepted: res.witness.is_none(),
        exposing,
        exposing_gate,
        econs_gates: e.size(),
        metrics: res.metrics,
    })
}
