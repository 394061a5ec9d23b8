//! Test-side ground truth: a gate-at-a-time evaluator written independently
//! of the library's batched evaluation, and the shared circuit corpus.
#![allow(dead_code)]

use accwb::circuit::CircuitBuilder;
use accwb::cnf::Formula3CNF;
use accwb::gen;
use accwb::{Circuit, GateKind};

pub fn naive_eval(c: &Circuit, x: &[bool]) -> bool {
    assert_eq!(x.len(), c.n_inputs());
    let mut v = vec![false; c.size() + 1];
    for (idx, g) in c.gates().iter().enumerate() {
        let ins = || g.fanin.iter().map(|&f| v[f as usize]);
        v[idx + 1] = match g.kind {
            GateKind::Input(k) => x[k as usize],
            GateKind::Const(b) => b,
            GateKind::Not => !v[g.fanin[0] as usize],
            GateKind::And => ins().all(|b| b),
            GateKind::Or => ins().any(|b| b),
            GateKind::Mod(m) => ins().filter(|&b| b).count() % m as usize == 0,
        };
    }
    v[c.output() as usize]
}

/// Point `i` of the cube, `x1` as the most significant bit.
pub fn point(n: usize, i: u64) -> Vec<bool> {
    (0..n).map(|k| (i >> (n - 1 - k)) & 1 == 1).collect()
}

pub fn naive_table(c: &Circuit) -> Vec<bool> {
    let n = c.n_inputs();
    (0..1u64 << n).map(|i| naive_eval(c, &point(n, i))).collect()
}

pub fn naive_sat(c: &Circuit) -> Option<Vec<bool>> {
    let n = c.n_inputs();
    (0..1u64 << n).map(|i| point(n, i)).find(|x| naive_eval(c, x))
}

/// Exhaustive satisfiability by trying every assignment of the formula's variables.
pub fn cnf_sat_exhaustive(f: &Formula3CNF) -> bool {
    let v = f.num_vars as usize;
    assert!(v <= 20);
    (0..1u64 << v).any(|a| {
        f.clauses
            .iter()
            .all(|c| c.iter().any(|l| ((a >> (l.var - 1)) & 1 == 1) != l.negated))
    })
}

/// One gate of `kind` over literals of `vars` with the given polarity mask.
pub fn literal_gate(n: usize, kind: GateKind, vars: &[usize], neg_mask: u32, negate_out: bool) -> Circuit {
    let mut b = CircuitBuilder::new(n);
    let lits: Vec<_> = vars
        .iter()
        .enumerate()
        .map(|(p, &v)| {
            let x = b.input(v);
            if (neg_mask >> p) & 1 == 1 {
                b.push(GateKind::Not, vec![x])
            } else {
                x
            }
        })
        .collect();
    let mut out = b.push(kind, lits);
    if negate_out {
        out = b.push(GateKind::Not, vec![out]);
    }
    b.finish(out)
}

pub const KINDS: [GateKind; 5] = [GateKind::And, GateKind::Or, GateKind::Mod(2), GateKind::Mod(3), GateKind::Mod(6)];

/// Every single-gate circuit over literals of any nonempty input subset for `n <= 3`.
pub fn structural_corpus() -> Vec<(String, Circuit)> {
    let mut out = Vec::new();
    for n in 1..=3usize {
        for kind in KINDS {
            for subset in 1u32..1 << n {
                let vars: Vec<usize> = (0..n).filter(|&v| (subset >> v) & 1 == 1).collect();
                for neg in 0..1u32 << vars.len() {
                    for negate_out in [false, true] {
                        let name = format!("{}-n{n}-s{subset}-p{neg}-o{}", kind.mnemonic(), negate_out as u8);
                        out.push((name, literal_gate(n, kind, &vars, neg, negate_out)));
                    }
                }
            }
        }
    }
    out
}

/// Seeded family instance at size `n`.
pub fn family(name: &str, n: usize, seed: u64) -> Circuit {
    let mut r = gen::rng(seed.wrapping_mul(0x2545_F491_4F6C_DD1D) ^ n as u64);
    match name {
        "sym-and" => {
            let m = [2u32, 3, 6][(seed % 3) as usize];
            gen::sym_and(&mut r, n, n + 2, GateKind::Mod(m), 1..=3, 0.3)
        }
        "or-mod-and" => gen::or_mod_and(&mut r, n, 2, n.max(2), [2u32, 3, 6][(seed % 3) as usize]),
        "layered" => gen::layered(&mut r, n, 2 + (seed % 2) as usize, n.max(2), &[2, 3], 0.2),
        "mixed" => gen::random_circuit(&mut r, n, 2 * n + 4, 3, &[2, 3]),
        "unrestricted" => gen::unrestricted(&mut r, n, 2 * n + 4, 3),
        other => panic!("unknown family {other}"),
    }
}

pub const FAMILIES: [&str; 5] = ["sym-and", "or-mod-and", "layered", "mixed", "unrestricted"];

/// Structural corpus plus `per` seeded instances per family for every `n` in `1..=max_n`.
pub fn corpus(max_n: usize, per: u64) -> Vec<(String, Circuit)> {
    let mut out = structural_corpus();
    for n in 1..=max_n {
        for fam in FAMILIES {
            for seed in 0..per {
                out.push((format!("{fam}-n{n}-seed{seed}"), family(fam, n, seed)));
            }
        }
    }
    out
}
