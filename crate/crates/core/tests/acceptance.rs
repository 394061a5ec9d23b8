//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use accwb::accsat::{acc_sat, k_blowup, k_blowup_unfolded, AccSatParams, BlowupPolicy, SatBackend, Verdict};
use accwb::bench::{advantage_threshold, ratios_by_n, run_suite, strictly_improving, SUITES};
use accwb::circuit::{single_gate, CircuitBuilder};
use accwb::consistency::{
    corrupt_candidate, gate_check_t, make_wire_value_circuit, prepare, t_circuit, verify_wire_circuit,
    ConsistencyForm, GateTag,
};
use accwb::cooklevin::{
    clause_generator_circuit, machines, ntm_accepts, replay, tableau_to_3cnf, Config, Layout, Move, Ntm,
};
use accwb::decompose::{decompose_acc, decompose_sym_and, unify_moduli, DecompositionParams, Verify};
use accwb::gen;
use accwb::harness::{satalg3, satalg5, Satalg5Verdict};
use accwb::multilinear::{compose_eval_all, MultilinearPoly};
use accwb::oracle::brute_sat;
use accwb::succinct::{
    build_clause_check_circuit, check_witness, decode_formula, encode_assignment, encode_formula, solve_compact,
    succinct_brute, ClauseEncoding,
};
use accwb::{Circuit, Error, GateKind};
use common::{cnf_sat_exhaustive, corpus, naive_eval, naive_sat, naive_table, point, FAMILIES};
use num_bigint::BigInt;
use rand::Rng;

/// Random instances per family in the large-n satisfiability sweep.
const SAT_PER_FAMILY: u64 = 1000;
/// Random points per circuit or polynomial where the cube is too large to enumerate.
const SAMPLE_POINTS: usize = 10_000;
/// Largest `n` checked exhaustively.
const EXHAUSTIVE_N: usize = 14;
/// Operation budget constant `c` in `ops <= c * n * 2^n`.
const OPS_CONSTANT: f64 = 1.5;
const BLOWUP_PER_K: u64 = 500;
const ROUND_TRIPS: u64 = 1000;
/// Largest step bound for the machine corpus.
const MAX_T: usize = 8;
/// n₀ must not exceed this.
const MAX_N0: usize = 20;
/// Wall-clock budget for the full bench suite, seconds.
const BENCH_BUDGET_S: f64 = 600.0;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_point<R: Rng>(r: &mut R, n: usize) -> Vec<bool> {
    (0..n).map(|_| r.gen()).collect()
}

fn check_sat(name: &str, c: &Circuit, oracle: Option<&Option<Vec<bool>>>) -> Result<bool, String> {
    let want = brute_sat(c).map_err(|e| format!("{name}: brute_sat: {e}"))?;
    if let Some(o) = oracle {
        ensure(o.is_some() == want.is_some(), || format!("{name}: brute_sat disagrees with the gate walk"))?;
    }
    let got = acc_sat(c, &AccSatParams::default()).map_err(|e| format!("{name}: acc_sat: {e}"))?;
    ensure((got.verdict == Verdict::Sat) == want.is_some(), || format!("{name}: verdict mismatch"))?;
    if let Some(w) = &got.witness {
        ensure(naive_eval(c, w), || format!("{name}: witness does not satisfy"))?;
    }
    Ok(want.is_some())
}

fn criterion_1() -> Outcome {
    let (mut small, mut large, mut sat) = (0u64, 0u64, 0u64);
    for (name, c) in corpus(EXHAUSTIVE_N, 3) {
        for (tag, circ) in [("", c.clone()), ("-neg", c.negated())] {
            let oracle = naive_sat(&circ);
            sat += check_sat(&format!("{name}{tag}"), &circ, Some(&oracle))? as u64;
            small += 1;
        }
    }
    for fam in FAMILIES {
        for seed in 0..SAT_PER_FAMILY {
            let n = 15 + (seed % 8) as usize;
            let c = common::family(fam, n, 10_000 + seed);
            sat += check_sat(&format!("{fam}-n{n}-seed{seed}"), &c, None)? as u64;
            large += 1;
        }
    }
    Ok(format!("corpus n<=14: {small}, random 15<=n<=22: {large}, sat {sat}, mismatches 0"))
}

fn params_off() -> DecompositionParams {
    DecompositionParams { verify: Verify::Off, ..Default::default() }
}

fn criterion_2() -> Outcome {
    let (mut exhaustive, mut sampled, mut skipped) = (0u64, 0u64, 0u64);
    let decomps = |c: &Circuit| {
        [decompose_acc(c, &params_off()), decompose_sym_and(c, &params_off())].into_iter().filter_map(|d| d.ok())
    };
    for (name, c) in corpus(EXHAUSTIVE_N, 3) {
        let want = naive_table(&c);
        let mut any = false;
        for d in decomps(&c) {
            any = true;
            let got = compose_eval_all(&d.g, &d.h).map_err(|e| format!("{name}: {e}"))?;
            for (i, &b) in want.iter().enumerate() {
                ensure(got.get(i) == b, || format!("{name}: table differs at {i}"))?;
            }
            exhaustive += 1;
        }
        skipped += !any as u64;
    }
    let mut r = gen::rng(2);
    for fam in FAMILIES {
        for seed in 0..16u64 {
            let n = 15 + (seed % 8) as usize;
            let c = common::family(fam, n, 20_000 + seed);
            for d in decomps(&c) {
                for _ in 0..SAMPLE_POINTS {
                    let x = random_point(&mut r, n);
                    let got = d.eval(&x).map_err(|e| format!("{fam} n={n}: {e}"))?;
                    ensure(got == naive_eval(&c, &x), || format!("{fam}-n{n}-seed{seed}: differs at {x:?}"))?;
                }
                sampled += 1;
            }
        }
    }
    ensure(exhaustive > 0 && sampled > 0, || "no decompositions were checked".into())?;
    Ok(format!("exhaustive {exhaustive}, sampled {sampled}x{SAMPLE_POINTS} points, unsupported {skipped}"))
}

fn eval_by_terms(p: &MultilinearPoly, x: &[bool]) -> BigInt {
    let ones: u64 = x.iter().enumerate().filter(|(_, &b)| b).map(|(v, _)| 1u64 << v).sum();
    p.terms().filter(|(m, _)| m & !ones == 0).map(|(_, c)| c.clone()).sum()
}

fn random_poly<R: Rng>(r: &mut R, n: usize, terms: usize, coeff: i64) -> MultilinearPoly {
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    MultilinearPoly::from_terms(n, (0..terms).map(|_| (r.gen::<u64>() & full, r.gen_range(-coeff..=coeff))))
}

fn criterion_3() -> Outcome {
    let mut r = gen::rng(3);
    let mut worst = 0f64;
    for n in 1..=26usize {
        let polys: Vec<MultilinearPoly> = if n <= EXHAUSTIVE_N {
            [(8, 3), (60, 1000), (30, i64::MAX / 64)].iter().map(|&(k, c)| random_poly(&mut r, n, k, c)).collect()
        } else {
            vec![random_poly(&mut r, n, 40, 3)]
        };
        for p in polys {
            let (vals, ops) = p.coefficient_to_point_counted(26).map_err(|e| format!("n={n}: {e}"))?;
            let limit = OPS_CONSTANT * n as f64 * (1u64 << n) as f64;
            worst = worst.max(ops as f64 / (n as f64 * (1u64 << n) as f64));
            ensure(ops as f64 <= limit, || format!("n={n}: {ops} operations exceed {limit}"))?;
            if n <= EXHAUSTIVE_N {
                for i in 0..1u64 << n {
                    let x = point(n, i);
                    ensure(vals.get(i as usize) == eval_by_terms(&p, &x), || format!("n={n}: value at {i}"))?;
                }
            } else {
                for _ in 0..SAMPLE_POINTS {
                    let i = r.gen_range(0..1u64 << n);
                    let x = point(n, i);
                    ensure(vals.get(i as usize) == p.eval_point(&x).unwrap(), || format!("n={n}: value at {i}"))?;
                    ensure(vals.get(i as usize) == eval_by_terms(&p, &x), || format!("n={n}: term sum at {i}"))?;
                }
            }
        }
    }
    Ok(format!("n=1..26, max ops/(n*2^n) = {worst:.4} <= c = {OPS_CONSTANT}"))
}

fn criterion_4() -> Outcome {
    let mut checked = 0u64;
    for k in 0..=6usize {
        for seed in 0..BLOWUP_PER_K {
            let mut r = gen::rng(40_000 + seed * 7 + k as u64);
            let n = k.max(1) + r.gen_range(0..=3);
            let c = gen::random_circuit(&mut r, n, 2 * n + 3, 3, &[2, 3, 6]);
            let policy = if seed % 2 == 0 { BlowupPolicy::HighestIndex } else { BlowupPolicy::Fanout };
            let tag = format!("k={k} seed={seed}");
            let b = k_blowup(&c, k, policy).map_err(|e| format!("{tag}: {e}"))?;
            let u = k_blowup_unfolded(&c, k, policy).map_err(|e| format!("{tag}: {e}"))?;
            let bound = (c.size() << k) + 1;
            ensure(u.circuit.size() <= bound && b.unfolded_gates <= bound, || format!("{tag}: size over 2^k*s+1"))?;
            let mut projected = 0u64;
            let mut blown = 0u64;
            for p in 0..1u64 << (n - k) {
                let free = point(n - k, p);
                let extends = (0..1u64 << k).any(|a| {
                    let mut x = vec![false; n];
                    for (&v, &bit) in b.free_vars.iter().zip(&free) {
                        x[v] = bit;
                    }
                    for (&v, &bit) in b.fixed_vars.iter().zip(&point(k, a)) {
                        x[v] = bit;
                    }
                    naive_eval(&c, &x)
                });
                projected += extends as u64;
                blown += naive_eval(&b.circuit, &free) as u64;
                ensure(naive_eval(&u.circuit, &free) == extends, || format!("{tag}: unfolded differs"))?;
            }
            ensure(blown == projected, || format!("{tag}: {blown} models vs {projected} projected"))?;
            let sat = brute_sat(&b.circuit).unwrap().is_some();
            ensure(sat == naive_sat(&c).is_some(), || format!("{tag}: satisfiability changed"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} instances over k=0..6"))
}

fn repeated_mod(n: usize, m: u32, copies: usize) -> Circuit {
    let mut b = CircuitBuilder::new(n);
    let ins: Vec<_> = (0..n).flat_map(|v| std::iter::repeat_n(b.input(v), copies)).collect();
    let out = b.push(GateKind::Mod(m), ins);
    b.finish(out)
}

fn criterion_5() -> Outcome {
    for n in 1..=10usize {
        let table = |c: &Circuit| c.truth_table().map_err(|e| format!("n={n}: {e}"));
        let (m2, m3, m6) = (single_gate(n, GateKind::Mod(2)), single_gate(n, GateKind::Mod(3)), single_gate(n, GateKind::Mod(6)));
        let (t2, t3, t6) = (table(&m2)?, table(&m3)?, table(&m6)?);
        ensure(t6 == t3.and(&t2), || format!("n={n}: MOD6 != MOD3 AND MOD2"))?;
        ensure(table(&repeated_mod(n, 6, 3))? == t2, || format!("n={n}: tripled MOD6 != MOD2"))?;
        ensure(table(&repeated_mod(n, 6, 2))? == t3, || format!("n={n}: doubled MOD6 != MOD3"))?;
        let direct: Vec<bool> = (0..1u64 << n).map(|i| (i.count_ones() % 6) == 0).collect();
        ensure(naive_table(&m6) == direct && t6.iter().collect::<Vec<_>>() == direct, || format!("n={n}: MOD6 table"))?;
    }
    let mut rewritten = 0;
    for (name, c) in corpus(10, 1) {
        let moduli: std::collections::BTreeSet<u32> =
            c.gates().iter().filter_map(|g| if let GateKind::Mod(m) = g.kind { Some(m) } else { None }).collect();
        if moduli.len() > 1 {
            let u = unify_moduli(&c, &moduli);
            ensure(naive_table(&u) == naive_table(&c), || format!("{name}: modulus rewrite changed the function"))?;
            rewritten += 1;
        }
    }
    Ok(format!("three identities for n=1..10, {rewritten} mixed-modulus rewrites preserved"))
}

fn criterion_6() -> Outcome {
    for seed in 0..ROUND_TRIPS {
        let mut r = gen::rng(60_000 + seed);
        let vars = r.gen_range(1..=60u64);
        let clauses = r.gen_range(1..=30);
        let f = gen::random_cnf(&mut r, vars, clauses);
        let enc = ClauseEncoding::for_vars(vars).unwrap();
        let x = encode_formula(&f, &enc).map_err(|e| format!("seed {seed}: {e}"))?;
        let back = decode_formula(&x, &enc).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure(back.clauses == f.clauses, || format!("seed {seed}: round trip"))?;
    }
    let mut d_checks = 0u64;
    for vars in 1..=6u64 {
        for seed in 0..12u64 {
            let mut r = gen::rng(61_000 + seed * 16 + vars);
            let clauses = r.gen_range(1..=24);
            let (f, _) = gen::planted_cnf(&mut r, vars, clauses);
            let enc = ClauseEncoding::for_vars(vars).unwrap();
            let x = encode_formula(&f, &enc).unwrap();
            ensure(x.n_inputs() <= 14, || format!("table of 2^{} bits", x.n_inputs()))?;
            for a in 0..1u64 << vars {
                let assignment: Vec<bool> = (0..vars).map(|v| (a >> v) & 1 == 1).collect();
                let w = encode_assignment(&assignment);
                let d = build_clause_check_circuit(&x, &w, &enc).map_err(|e| format!("{e}"))?;
                let by_d = brute_sat(&d.negated()).unwrap().is_none();
                let direct = check_witness(&x, &w, &enc).unwrap();
                ensure(by_d == direct && direct == f.satisfied_by(&assignment), || {
                    format!("vars={vars} seed={seed} a={a}: D={by_d} check={direct}")
                })?;
                d_checks += 1;
            }
        }
    }
    let (mut decided, mut sat) = (0u64, 0u64);
    for vars in 1..=16u64 {
        for seed in 0..20u64 {
            let mut r = gen::rng(62_000 + seed * 32 + vars);
            let clauses = ((vars as f64 * 4.26) as usize).max(1) + r.gen_range(0..=4);
            let f = gen::random_cnf(&mut r, vars, clauses);
            let enc = ClauseEncoding::for_vars(vars).unwrap();
            let x = encode_formula(&f, &enc).unwrap();
            let want = cnf_sat_exhaustive(&f);
            let got = succinct_brute(&x, &enc).map_err(|e| format!("{e}"))?;
            ensure(got == want, || format!("V={vars} seed={seed}: succinct_brute={got}, exhaustive={want}"))?;
            decided += 1;
            sat += want as u64;
        }
    }
    Ok(format!("{ROUND_TRIPS} round trips, {d_checks} D checks, {decided} succinct decisions ({sat} sat)"))
}

fn criterion_7() -> Outcome {
    let forms = [ConsistencyForm::Unrolled, ConsistencyForm::GateInput];
    let mut xs: Vec<(String, Circuit)> = Vec::new();
    for (name, c) in corpus(8, 3) {
        if !c.has_mod_gates() {
            xs.push((name, prepare(&c).map_err(|e| format!("{e}"))?));
        }
    }
    let mut complete = 0;
    for (name, x) in &xs {
        let c = make_wire_value_circuit(x).map_err(|e| format!("{name}: {e}"))?;
        for form in forms {
            let r = verify_wire_circuit(x, &c, &SatBackend::Brute, form).map_err(|e| format!("{name}: {e}"))?;
            ensure(r.accepted, || format!("{name}: correct candidate rejected ({form:?})"))?;
        }
        complete += 1;
    }
    let mut corruptions = 0u64;
    for n in 1..=6usize {
        for seed in 0..2u64 {
            let x = prepare(&gen::unrestricted(&mut gen::rng(70_000 + seed * 8 + n as u64), n, n + 3, 3)).unwrap();
            let c = make_wire_value_circuit(&x).unwrap();
            for i in 0..1u64 << n {
                let ip = point(n, i);
                for j in 1..=x.size() as u64 {
                    let bad = corrupt_candidate(&c, &ip, j);
                    for form in forms {
                        let r = verify_wire_circuit(&x, &bad, &SatBackend::Brute, form).unwrap();
                        ensure(!r.accepted && r.exposing.as_deref() == Some(&ip[..]), || {
                            format!("n={n} seed={seed} i={i} j={j}: corruption missed ({form:?})")
                        })?;
                        corruptions += 1;
                    }
                }
            }
        }
    }
    ensure(gate_check_t(true, false, true, GateTag::Or), || "t(1,0,1,OR) != 1".into())?;
    let tc = t_circuit();
    for tag in GateTag::ALL {
        for v in 0..8u8 {
            let (b1, b2, b) = (v & 4 != 0, v & 2 != 0, v & 1 != 0);
            let direct = match tag {
                GateTag::Input => true,
                GateTag::And => b == (b1 && b2),
                GateTag::Or => b == (b1 || b2),
                GateTag::Not => b == !b1,
            };
            let [hi, lo] = tag.bits();
            ensure(gate_check_t(b1, b2, b, tag) == direct && naive_eval(&tc, &[b1, b2, b, hi, lo]) == direct, || {
                format!("t({b1},{b2},{b},{tag:?})")
            })?;
        }
    }
    Ok(format!("{complete} circuits complete, {corruptions} corruptions caught, t table 32/32"))
}

fn criterion_8() -> Outcome {
    let backends = [SatBackend::Brute, SatBackend::Acc(AccSatParams::default())];
    let mut runs = 0u64;
    let mut faults = 0u64;
    for vars in 2..=8u64 {
        for seed in 0..6u64 {
            let mut r = gen::rng(80_000 + seed * 16 + vars);
            let clauses = r.gen_range(2..=10);
            let (f, plant) = gen::planted_cnf(&mut r, vars, clauses);
            let enc = ClauseEncoding::for_vars(vars).unwrap();
            let x = prepare(&encode_formula(&f, &enc).unwrap()).unwrap();
            let c = make_wire_value_circuit(&x).unwrap();
            let tag = format!("vars={vars} seed={seed}");
            let mut flipped = plant.clone();
            flipped[r.gen_range(0..plant.len())] ^= true;
            for a in [&plant, &flipped] {
                let w = encode_assignment(a);
                let direct = check_witness(&x, &w, &enc).unwrap();
                for backend in &backends {
                    let r3 = satalg3(&x, &w, &enc, backend).map_err(|e| format!("{tag}: {e}"))?;
                    ensure(r3.accepted == direct, || format!("{tag}: satalg3 disagrees with check_witness"))?;
                    let r5 = satalg5(&x, &w, &c, &enc, backend).map_err(|e| format!("{tag}: {e}"))?;
                    ensure(r5.accepted() == r3.accepted, || format!("{tag}: satalg5 disagrees with satalg3"))?;
                    let want = if direct { Satalg5Verdict::Accept } else { Satalg5Verdict::RejectWitness };
                    ensure(r5.verdict == want, || format!("{tag}: satalg5 verdict {:?}", r5.verdict))?;
                    runs += 1;
                }
            }
            let w = encode_assignment(&plant);
            let bad_c = corrupt_candidate(&c, &point(x.n_inputs(), r.gen_range(0..1u64 << x.n_inputs())), 1 + r.gen_range(0..x.size() as u64));
            let r5 = satalg5(&x, &w, &bad_c, &enc, &SatBackend::Brute).unwrap();
            ensure(r5.verdict == Satalg5Verdict::RejectWireCircuit, || format!("{tag}: corrupted C gave {:?}", r5.verdict))?;
            let short = encode_assignment(&[true]);
            ensure(matches!(satalg3(&x, &short, &enc, &SatBackend::Brute), Err(Error::Stage { stage: "build-d", .. })), || {
                format!("{tag}: wrong witness arity not caught at build-d")
            })?;
            let mut b = CircuitBuilder::new(x.n_inputs());
            let copy: Vec<_> = x.gates().iter().map(|g| b.push(g.kind, g.fanin.clone())).collect();
            let out = copy[x.output() as usize - 1];
            let m = b.push(GateKind::Mod(2), vec![out, out]);
            let and = b.push(GateKind::And, vec![out, m]);
            let x_mod = b.finish(and);
            ensure(matches!(satalg5(&x_mod, &w, &c, &enc, &SatBackend::Brute), Err(Error::Stage { stage: "wire-circuit", .. })), || {
                format!("{tag}: MOD gate not caught at wire-circuit")
            })?;
            faults += 3;
        }
    }
    Ok(format!("{runs} satalg3/satalg5 runs agree, {faults} injected faults rejected at their stage"))
}

fn dfs_accepts(m: &Ntm, tape: &mut Vec<usize>, q: usize, head: usize, steps_left: usize) -> bool {
    if q == m.accept {
        return true;
    }
    if steps_left == 0 {
        return false;
    }
    let a = tape[head];
    for &(q2, b, mv) in &m.delta[q][a] {
        let next = match mv {
            Move::L if head > 0 => head - 1,
            Move::R if head + 1 < tape.len() => head + 1,
            Move::S => head,
            _ => continue,
        };
        tape[head] = b;
        let hit = dfs_accepts(m, tape, q2, next, steps_left - 1);
        tape[head] = a;
        if hit {
            return true;
        }
    }
    false
}

fn oracle_accepts(m: &Ntm, input: &[usize], t: usize) -> bool {
    let mut tape = vec![m.blank; t];
    tape[..input.len()].copy_from_slice(input);
    dfs_accepts(m, &mut tape, m.start, 0, t)
}

/// Whether `b` follows from `a` by one transition, or both sit in the accept state.
fn legal_step(m: &Ntm, a: &Config, b: &Config) -> bool {
    if a.state == m.accept {
        return a == b;
    }
    m.delta[a.state][a.tape[a.head - 1]].iter().any(|&(q2, sym, mv)| {
        let head = match mv {
            Move::L => a.head.wrapping_sub(1),
            Move::R => a.head + 1,
            Move::S => a.head,
        };
        let mut tape = a.tape.clone();
        tape[a.head - 1] = sym;
        head >= 1 && head <= a.tape.len() && b.state == q2 && b.head == head && b.tape == tape
    })
}

fn machine_corpus() -> Vec<(String, Ntm)> {
    let mut out: Vec<(String, Ntm)> = machines::all().into_iter().map(|(n, m)| (n.to_string(), m)).collect();
    for seed in 0..8u64 {
        out.push((format!("random-{seed}"), gen::random_ntm(&mut gen::rng(90_000 + seed), 2 + seed as usize % 3, 2)));
    }
    out
}

fn criterion_9() -> Outcome {
    let (mut tableaux, mut accepting, mut generated) = (0u64, 0u64, 0u64);
    for (name, m) in machine_corpus() {
        for x in ["", "0", "1", "01", "11", "101"] {
            let input = m.input(x).unwrap();
            for t in x.len().max(1)..=MAX_T {
                let tag = format!("{name} x={x:?} t={t}");
                let accepts = ntm_accepts(&m, &input, t).map_err(|e| format!("{tag}: {e}"))?;
                ensure(accepts == oracle_accepts(&m, &input, t), || format!("{tag}: simulator disagrees"))?;
                let f = tableau_to_3cnf(&m, &input, t).map_err(|e| format!("{tag}: {e}"))?;
                ensure(f.clauses.iter().all(|c| c.len() <= 3), || format!("{tag}: clause wider than 3"))?;
                let model = solve_compact(&f);
                ensure(model.is_some() == accepts, || format!("{tag}: tableau satisfiable={}", model.is_some()))?;
                if let Some(a) = model {
                    let path = replay(&m, &input, t, &a).map_err(|e| format!("{tag}: {e}"))?;
                    ensure(path.len() == t + 1 && path.last().unwrap().state == m.accept, || format!("{tag}: path"))?;
                    ensure(path.windows(2).all(|w| legal_step(&m, &w[0], &w[1])), || format!("{tag}: illegal step"))?;
                    accepting += 1;
                }
                tableaux += 1;
                let end_to_end = t <= 3 || (t == MAX_T && x.len() == 2 && name.starts_with("guess"));
                if end_to_end {
                    let enc = Layout::new(&m, t).encoding();
                    let g = clause_generator_circuit(&m, &input, t, &enc).map_err(|e| format!("{tag}: {e}"))?;
                    ensure(decode_formula(&g, &enc).map_err(|e| format!("{tag}: {e}"))? == f, || format!("{tag}: generator"))?;
                    ensure(succinct_brute(&g, &enc).map_err(|e| format!("{tag}: {e}"))? == accepts, || {
                        format!("{tag}: succinct_brute disagrees")
                    })?;
                    generated += 1;
                }
            }
        }
    }
    Ok(format!("{tableaux} tableaux ({accepting} accepting paths replayed), {generated} generator circuits"))
}

fn criterion_10() -> Outcome {
    let seeds = [0u64, 1, 2];
    let start = Instant::now();
    let mut sym = Vec::new();
    for suite in SUITES {
        let rows = run_suite(suite, &seeds, &AccSatParams::default(), true).map_err(|e| format!("{suite}: {e}"))?;
        ensure(rows.iter().all(|r| r.agrees != Some(false)), || format!("{suite}: verdict disagrees with brute force"))?;
        if suite == "sym-and" {
            sym = rows;
        }
    }
    let wall = start.elapsed().as_secs_f64();
    let ratios = ratios_by_n(&sym);
    let shown: Vec<String> = ratios.iter().map(|(n, r)| format!("{n}:{r:.4}")).collect();
    let n0 = advantage_threshold(&ratios);
    ensure(ratios.first().map(|r| r.0) == Some(16) && ratios.last().map(|r| r.0) == Some(24), || "sweep range".into())?;
    ensure(n0.is_some_and(|n0| n0 <= MAX_N0), || format!("n0 = {n0:?}; ratios {}", shown.join(" ")))?;
    ensure(strictly_improving(&ratios), || format!("ratio not monotone: {}", shown.join(" ")))?;
    ensure(wall < BENCH_BUDGET_S, || format!("bench took {wall:.1}s"))?;
    Ok(format!("n0={} ratios {} suite {wall:.1}s", n0.unwrap(), shown.join(" ")))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("oracle equivalence (sat)", criterion_1),
        ("decomposition correctness", criterion_2),
        ("coefficient-to-point", criterion_3),
        ("k-blowup", criterion_4),
        ("MOD identities", criterion_5),
        ("succinct pipeline", criterion_6),
        ("wire-value consistency", criterion_7),
        ("harness", criterion_8),
        ("Cook-Levin", criterion_9),
        ("operation-count advantage", criterion_10),
    ];
    let only: Option<usize> = std::env::var("ACCWB_CRITERION").ok().and_then(|v| v.parse().ok());
    let mut failed = 0;
    for (i, (label, run)) in criteria.iter().enumerate() {
        if only.is_some_and(|o| o != i + 1) {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} PASS {label}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} FAIL {label}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
