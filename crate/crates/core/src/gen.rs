//! Seeded generators for circuit corpora.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Circuit, CircuitBuilder, GateId, GateKind};
use crate::cnf::{Clause, Formula3CNF, Lit};
use crate::cooklevin::{Move, Ntm};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Distinct variables for one AND-of-literals term, each negated with probability `neg`.
fn literal_term<R: Rng>(rng: &mut R, b: &mut CircuitBuilder, width: usize, neg: f64) -> Vec<GateId> {
    let n = b.n_inputs();
    let mut vars: Vec<usize> = (0..n).collect();
    vars.shuffle(rng);
    vars.truncate(width.min(n));
    vars.sort_unstable();
    vars.into_iter()
        .map(|v| {
            let x = b.input(v);
            if rng.gen_bool(neg) {
                b.push(GateKind::Not, vec![x])
            } else {
                x
            }
        })
        .collect()
}

/// A symmetric top gate over AND-of-literals children with widths in `width`.
pub fn sym_and<R: Rng>(
    rng: &mut R,
    n: usize,
    children: usize,
    top: GateKind,
    width: std::ops::RangeInclusive<usize>,
    neg: f64,
) -> Circuit {
    let mut b = CircuitBuilder::new(n);
    let mut kids = Vec::with_capacity(children);
    for _ in 0..children {
        let w = rng.gen_range(width.clone()).max(1);
        let lits = literal_term(rng, &mut b, w, neg);
        let kid = if lits.len() == 1 && rng.gen_bool(0.5) { lits[0] } else { b.push(GateKind::And, lits) };
        kids.push(kid);
    }
    let out = b.push(top, kids);
    b.finish(out)
}

/// Depth-3 `OR ∘ MOD_m ∘ AND` circuit with `blocks` MOD gates of `per_block` children each.
pub fn or_mod_and<R: Rng>(rng: &mut R, n: usize, blocks: usize, per_block: usize, m: u32) -> Circuit {
    let mut b = CircuitBuilder::new(n);
    let mut mods = Vec::with_capacity(blocks);
    for _ in 0..blocks {
        let kids: Vec<GateId> = (0..per_block)
            .map(|_| {
                let w = rng.gen_range(1..=3);
                let lits = literal_term(rng, &mut b, w, 0.3);
                b.push(GateKind::And, lits)
            })
            .collect();
        mods.push(b.push(GateKind::Mod(m), kids));
    }
    let out = b.push(GateKind::Or, mods);
    b.finish(out)
}

/// Layered AND/OR/MOD circuit whose AND/OR/MOD depth is exactly `depth`.
///
/// Layer 1 holds AND-of-literals gates; every later gate reads at least one
/// gate of the layer directly below, and the output is a single gate on the
/// top layer. With `neg = 0` no NOT gates appear, so the plain depth equals
/// `depth` as well.
pub fn layered<R: Rng>(
    rng: &mut R,
    n: usize,
    depth: usize,
    width: usize,
    moduli: &[u32],
    neg: f64,
) -> Circuit {
    assert!(depth >= 1 && width >= 1 && n >= 1);
    let mut b = CircuitBuilder::new(n);
    let mut below: Vec<GateId> = Vec::new();
    let mut all: Vec<GateId> = Vec::new();
    for layer in 1..=depth {
        let count = if layer == depth { 1 } else { width };
        let mut current = Vec::with_capacity(count);
        for _ in 0..count {
            let id = if layer == 1 {
                let w = rng.gen_range(1..=3);
                let lits = literal_term(rng, &mut b, w, neg);
                b.push(GateKind::And, lits)
            } else {
                let kind = match rng.gen_range(0..3) {
                    0 => GateKind::And,
                    1 => GateKind::Or,
                    _ if moduli.is_empty() => GateKind::Or,
                    _ => GateKind::Mod(*moduli.choose(rng).unwrap()),
                };
                let fan = rng.gen_range(2..=4);
                let mut fanin = vec![*below.choose(rng).unwrap()];
                for _ in 1..fan {
                    let pick = if rng.gen_bool(0.7) {
                        *below.choose(rng).unwrap()
                    } else if rng.gen_bool(0.5) && !all.is_empty() {
                        *all.choose(rng).unwrap()
                    } else {
                        let v = rng.gen_range(0..n);
                        let x = b.input(v);
                        if rng.gen_bool(neg) {
                            b.push(GateKind::Not, vec![x])
                        } else {
                            x
                        }
                    };
                    fanin.push(pick);
                }
                if rng.gen_bool(neg) && layer < depth {
                    let g = b.push(kind, fanin);
                    b.push(GateKind::Not, vec![g])
                } else {
                    b.push(kind, fanin)
                }
            };
            current.push(id);
        }
        all.extend(&below);
        below = current;
    }
    let out = below[0];
    b.finish(out)
}

/// Random AND/OR/NOT circuit with `gates` non-input gates and fan-in up to `max_fanin`.
pub fn unrestricted<R: Rng>(rng: &mut R, n: usize, gates: usize, max_fanin: usize) -> Circuit {
    random_circuit(rng, n, gates, max_fanin, &[])
}

/// Random circuit over AND/OR/NOT plus MOD gates with the given moduli (and
/// the occasional constant). The last gate is the output.
pub fn random_circuit<R: Rng>(
    rng: &mut R,
    n: usize,
    gates: usize,
    max_fanin: usize,
    moduli: &[u32],
) -> Circuit {
    let mut b = CircuitBuilder::new(n);
    if n == 0 && gates == 0 {
        let out = b.constant(rng.gen());
        return b.finish(out);
    }
    for _ in 0..gates {
        let avail = b.len() as GateId;
        if avail == 0 {
            b.push(GateKind::Const(rng.gen()), vec![]);
            continue;
        }
        // bias towards recent gates so circuits are deep rather than flat
        let pick = |rng: &mut R| {
            let lo = if rng.gen_bool(0.6) { avail.saturating_sub(6).max(1) } else { 1 };
            rng.gen_range(lo..=avail)
        };
        let roll = rng.gen_range(0..100);
        if roll < 3 {
            b.push(GateKind::Const(rng.gen()), vec![]);
        } else if roll < 25 {
            let f = pick(rng);
            b.push(GateKind::Not, vec![f]);
        } else {
            let kind = if !moduli.is_empty() && roll >= 80 {
                GateKind::Mod(*moduli.choose(rng).unwrap())
            } else if roll % 2 == 0 {
                GateKind::And
            } else {
                GateKind::Or
            };
            let fan = rng.gen_range(1..=max_fanin.max(1));
            let fanin = (0..fan).map(|_| pick(rng)).collect();
            b.push(kind, fanin);
        }
    }
    let out = b.len() as GateId;
    b.finish(out)
}

/// Benchmark SYM∘AND instance: a MOD_6 gate over `n^2 / 8` three-literal ANDs.
pub fn bench_sym_and(n: usize, seed: u64) -> Circuit {
    let mut r = rng(seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    sym_and(&mut r, n, (n * n / 8).max(1), GateKind::Mod(6), 3..=3, 0.3)
}

/// Clause of 1 to 3 literals over distinct variables in `1..=vars` (mostly width 3).
pub fn random_clause<R: Rng>(rng: &mut R, vars: u64) -> Clause {
    let width = match rng.gen_range(0..10) {
        0 => 1,
        1 | 2 => 2,
        _ => 3,
    }
    .min(vars as usize);
    let mut picked: Vec<u64> = Vec::with_capacity(width);
    while picked.len() < width {
        let v = rng.gen_range(1..=vars);
        if !picked.contains(&v) {
            picked.push(v);
        }
    }
    picked.into_iter().map(|var| Lit { var, negated: rng.gen() }).collect()
}

pub fn random_cnf<R: Rng>(rng: &mut R, vars: u64, clauses: usize) -> Formula3CNF {
    Formula3CNF::new(vars, (0..clauses).map(|_| random_clause(rng, vars)).collect())
}

/// Random formula together with an assignment satisfying it (clauses are
/// resampled until the assignment satisfies them).
pub fn planted_cnf<R: Rng>(rng: &mut R, vars: u64, clauses: usize) -> (Formula3CNF, Vec<bool>) {
    let assignment: Vec<bool> = (0..vars).map(|_| rng.gen()).collect();
    let cs = (0..clauses)
        .map(|_| loop {
            let c = random_clause(rng, vars);
            if c.iter().any(|l| l.holds(&assignment)) {
                break c;
            }
        })
        .collect();
    (Formula3CNF::new(vars, cs), assignment)
}

/// Random machine over `{_, 0, 1}` with `states` states besides the accept
/// state and up to `branching` transitions per pair.
pub fn random_ntm<R: Rng>(rng: &mut R, states: usize, branching: usize) -> Ntm {
    let names: Vec<String> = (0..states).map(|q| format!("q{q}")).chain(["acc".to_string()]).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let symbols = ['_', '0', '1'];
    let mut m = Ntm::new(&refs, &symbols, '_', "q0", "acc").expect("valid machine skeleton");
    for q in 0..states {
        for &a in &symbols {
            for _ in 0..rng.gen_range(0..=branching) {
                let q2 = refs[rng.gen_range(0..=states)];
                let b = *symbols.choose(rng).unwrap();
                let mv = [Move::L, Move::R, Move::S][rng.gen_range(0..3)];
                m.add(refs[q], a, q2, b, mv).expect("states and symbols exist");
            }
        }
    }
    m
}
