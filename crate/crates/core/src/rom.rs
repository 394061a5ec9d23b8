//! Read-only-memory circuits: multiplexer trees over hardwired bits.

use rustc_hash::FxHashMap;

use crate::circuit::{Circuit, CircuitBuilder, GateId};

/// Circuit on `n` inputs whose truth table starts with `bits` (remaining positions 0).
pub fn rom_circuit(n: usize, bits: &[bool]) -> Circuit {
    assert!(n < usize::BITS as usize && bits.len() <= 1 << n, "rom: {} bits do not fit {n} inputs", bits.len());
    let mut b = CircuitBuilder::folding(n);
    let sel = b.inputs();
    let out = rom_into(&mut b, &sel, bits);
    b.finish(out)
}

/// Smallest `a` with `2^a >= len` (0 for `len <= 1`).
pub fn address_bits(len: u64) -> usize {
    if len <= 1 {
        0
    } else {
        (u64::BITS - (len - 1).leading_zeros()) as usize
    }
}

/// Circuit with `address_bits(bits.len())` inputs whose table prefix is `bits`.
pub fn table_circuit(bits: &[bool]) -> Circuit {
    rom_circuit(address_bits(bits.len() as u64), bits)
}

/// Adds a lookup of `table` addressed by `sel` (most significant first) to `b`.
///
/// Identical subtables share one subcircuit, and constant subtables become
/// constants, so the tree is often far smaller than the table.
pub fn rom_into(b: &mut CircuitBuilder, sel: &[GateId], table: &[bool]) -> GateId {
    let size = 1usize << sel.len();
    assert!(table.len() <= size, "rom: table longer than address space");
    let mut padded;
    let table = if table.len() < size {
        padded = table.to_vec();
        padded.resize(size, false);
        &padded[..]
    } else {
        table
    };
    let negs: Vec<Option<GateId>> = vec![None; sel.len()];
    let mut st = Rom { sel, negs, memo: FxHashMap::default() };
    st.build(b, 0, table)
}

/// Adds a multiplexer returning `leaves[address]` for address `sel` (most
/// significant first); addresses past the end select constant 0.
pub fn select_into(b: &mut CircuitBuilder, sel: &[GateId], leaves: &[GateId]) -> GateId {
    assert!(leaves.len() <= 1usize << sel.len(), "select: more leaves than addresses");
    let zero = b.constant(false);
    let mut level: Vec<GateId> = leaves.to_vec();
    level.resize(1 << sel.len(), zero);
    for &x in sel.iter().rev() {
        let nx = b.not(x);
        level = level
            .chunks(2)
            .map(|pair| {
                if pair[0] == pair[1] {
                    return pair[0];
                }
                let l = b.and([nx, pair[0]]);
                let h = b.and([x, pair[1]]);
                b.or([l, h])
            })
            .collect();
    }
    level[0]
}

struct Rom<'a, 't> {
    sel: &'a [GateId],
    negs: Vec<Option<GateId>>,
    memo: FxHashMap<&'t [bool], GateId>,
}

impl<'t> Rom<'_, 't> {
    fn build(&mut self, b: &mut CircuitBuilder, level: usize, table: &'t [bool]) -> GateId {
        if table.iter().all(|&v| !v) {
            return b.constant(false);
        }
        if table.iter().all(|&v| v) {
            return b.constant(true);
        }
        if let Some(&id) = self.memo.get(table) {
            return id;
        }
        let half = table.len() / 2;
        let lo = self.build(b, level + 1, &table[..half]);
        let hi = self.build(b, level + 1, &table[half..]);
        let x = self.sel[level];
        let id = if lo == hi {
            lo
        } else {
            let nx = *self.negs[level].get_or_insert_with(|| b.not(x));
            let l = b.and([nx, lo]);
            let h = b.and([x, hi]);
            b.or([l, h])
        };
        self.memo.insert(table, id);
        id
    }
}
