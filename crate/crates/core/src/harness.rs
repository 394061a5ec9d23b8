//! End-to-end verification runs with supplied witness circuits.
//!
//! The nondeterministic guesses of the algorithms (the witness `W` for a
//! succinct formula and the wire-value circuit `C`) are inputs here; the
//! harness runs the deterministic verification that follows the guess.

use std::fmt;

use crate::accsat::{decide, SatBackend, SatMetrics, Verdict};
use crate::circuit::{Circuit, CircuitStats};
use crate::consistency::{tuples, verify_wire_circuit, ConsistencyForm, WireCheck, WireValueCandidate};
use crate::error::{Error, Result};
use crate::rom::rom_circuit;
use crate::succinct::{build_clause_check_circuit, check_witness, ClauseEncoding};
use crate::truthtable::assignment_to_index;

/// Witness arities the exhaustive search mode accepts.
pub const MAX_SEARCH_ARITY: usize = 3;

fn staged<T>(stage: &'static str, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Stage { stage, source: Box::new(e) })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Satalg3Report {
    pub accepted: bool,
    /// Least clause index on which `¬D` is satisfied.
    pub violated_clause: Option<u64>,
    pub d_stats: CircuitStats,
    pub backend: &'static str,
    pub metrics: SatMetrics,
}

/// Builds `D` from `(x, w)` and accepts iff `¬D` is unsatisfiable.
pub fn satalg3(x: &Circuit, w: &Circuit, enc: &ClauseEncoding, backend: &SatBackend) -> Result<Satalg3Report> {
    let d = staged("build-d", build_clause_check_circuit(x, w, enc))?;
    let res = staged("decide-not-d", decide(&d.negated(), backend))?;
    Ok(Satalg3Report {
        accepted: res.verdict == Verdict::Unsat,
        violated_clause: res.witness.as_deref().map(|i| assignment_to_index(i) as u64),
        d_stats: d.stats(),
        backend: backend.name(),
        metrics: res.metrics,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Satalg5Verdict {
    Accept,
    /// The wire-value circuit failed its consistency check.
    RejectWireCircuit,
    /// The witness failed on `x' = C(·, j*)`.
    RejectWitness,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Satalg5Report {
    pub verdict: Satalg5Verdict,
    pub wire_check: WireCheck,
    pub x_prime_gates: Option<usize>,
    pub stage2: Option<Satalg3Report>,
}

impl Satalg5Report {
    pub fn accepted(&self) -> bool {
        self.verdict == Satalg5Verdict::Accept
    }
}

/// Stage 1 certifies `C` against `x`; stage 2 replaces `x` by the output
/// column of `C` and runs the witness check on it. `x` must be in the
/// fan-in-2 AND/OR/NOT form that `C` describes.
pub fn satalg5(
    x: &Circuit,
    w: &Circuit,
    c: &WireValueCandidate,
    enc: &ClauseEncoding,
    backend: &SatBackend,
) -> Result<Satalg5Report> {
    staged("wire-circuit", tuples(x))?;
    let wire_check = staged("wire-circuit", verify_wire_circuit(x, c, backend, ConsistencyForm::Unrolled))?;
    if !wire_check.accepted {
        return Ok(Satalg5Report {
            verdict: Satalg5Verdict::RejectWireCircuit,
            wire_check,
            x_prime_gates: None,
            stage2: None,
        });
    }
    let x_prime = c.fix_gate(x.output() as u64);
    let stage2 = staged("witness", satalg3(&x_prime, w, enc, backend))?;
    let verdict = if stage2.accepted { Satalg5Verdict::Accept } else { Satalg5Verdict::RejectWitness };
    Ok(Satalg5Report { verdict, wire_check, x_prime_gates: Some(x_prime.size()), stage2: Some(stage2) })
}

/// Tries every witness table of the encoding's arity (at most
/// [`MAX_SEARCH_ARITY`] inputs) and returns the first that passes.
pub fn search_witness(x: &Circuit, enc: &ClauseEncoding) -> Result<Option<Circuit>> {
    let a = enc.witness_arity();
    if a > MAX_SEARCH_ARITY {
        return Err(Error::ResourceLimit { what: "witness arity for search", value: a, cap: MAX_SEARCH_ARITY });
    }
    let len = 1usize << a;
    for table in 0..1u64 << len {
        let bits: Vec<bool> = (0..len).map(|i| (table >> (len - 1 - i)) & 1 == 1).collect();
        let w = rom_circuit(a, &bits);
        if check_witness(x, &w, enc)? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

fn metrics_line(f: &mut fmt::Formatter<'_>, m: &SatMetrics) -> fmt::Result {
    writeln!(
        f,
        "  metrics k={} monomials={} eval_points={} gate_evals={} monomial_ops={} fallback={}",
        m.k, m.monomials, m.eval_points, m.gate_evals, m.monomial_ops, m.fallback
    )
}

impl fmt::Display for Satalg3Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "stage=clause-check verdict={}", if self.accepted { "accept" } else { "reject" })?;
        writeln!(
            f,
            "  d_inputs={} d_gates={} d_depth={} backend={}",
            self.d_stats.n_inputs, self.d_stats.size, self.d_stats.depth, self.backend
        )?;
        if let Some(i) = self.violated_clause {
            writeln!(f, "  violated_clause={i}")?;
        }
        metrics_line(f, &self.metrics)
    }
}

impl fmt::Display for Satalg5Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wc = &self.wire_check;
        writeln!(
            f,
            "stage=wire-circuit verdict={} econs_gates={}",
            if wc.accepted { "accept" } else { "reject" },
            wc.econs_gates
        )?;
        if let Some(i) = &wc.exposing {
            writeln!(f, "  exposing_input={}", crate::truthtable::bits_to_string(i))?;
        }
        metrics_line(f, &wc.metrics)?;
        if let Some(g) = self.x_prime_gates {
            writeln!(f, "stage=substitute x_prime_gates={g}")?;
        }
        if let Some(s2) = &self.stage2 {
            write!(f, "{s2}")?;
        }
        let v = match self.verdict {
            Satalg5Verdict::Accept => "accept",
            Satalg5Verdict::RejectWireCircuit => "reject stage=wire-circuit",
            Satalg5Verdict::RejectWitness => "reject stage=witness",
        };
        writeln!(f, "verdict={v}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::{Formula3CNF, Lit};
    use crate::consistency::{corrupt_candidate, make_wire_value_circuit, prepare};
    use crate::succinct::{encode_assignment, encode_formula};

    fn instance() -> (Circuit, Circuit, Circuit, ClauseEncoding) {
        let enc = ClauseEncoding::with_vars(2, 3).unwrap();
        let f = Formula3CNF::new(
            3,
            vec![vec![Lit::pos(1), Lit::neg(2)], vec![Lit::pos(3)], vec![Lit::neg(1), Lit::pos(2), Lit::pos(3)]],
        );
        let x = prepare(&encode_formula(&f, &enc).unwrap()).unwrap();
        let good = encode_assignment(&[true, true, true]);
        let bad = encode_assignment(&[true, true, false]);
        (x, good, bad, enc)
    }

    #[test]
    fn satalg3_accepts_planted_and_rejects_corrupted() {
        let (x, good, bad, enc) = instance();
        assert!(satalg3(&x, &good, &enc, &SatBackend::Brute).unwrap().accepted);
        let r = satalg3(&x, &bad, &enc, &SatBackend::Brute).unwrap();
        assert!(!r.accepted);
        assert_eq!(r.violated_clause, Some(1));
    }

    #[test]
    fn satalg5_stages() {
        let (x, good, bad, enc) = instance();
        let c = make_wire_value_circuit(&x).unwrap();
        assert_eq!(satalg5(&x, &good, &c, &enc, &SatBackend::Brute).unwrap().verdict, Satalg5Verdict::Accept);
        assert_eq!(
            satalg5(&x, &bad, &c, &enc, &SatBackend::Brute).unwrap().verdict,
            Satalg5Verdict::RejectWitness
        );
        let broken = corrupt_candidate(&c, &vec![false; x.n_inputs()], x.output() as u64);
        assert_eq!(
            satalg5(&x, &good, &broken, &enc, &SatBackend::Brute).unwrap().verdict,
            Satalg5Verdict::RejectWireCircuit
        );
    }

    #[test]
    fn witness_search_finds_a_model() {
        let (x, _, _, enc) = instance();
        let w = search_witness(&x, &enc).unwrap().unwrap();
        assert!(check_witness(&x, &w, &enc).unwrap());
    }
}
