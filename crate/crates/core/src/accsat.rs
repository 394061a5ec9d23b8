//! Satisfiability of ACC circuits through k-blowup and all-points evaluation.
//!
//! The pipeline fixes `k` inputs in every possible way, ORs the constant-folded
//! restrictions into one circuit over the remaining `n - k` inputs, decomposes
//! that circuit as `g ∘ h`, evaluates `h` on all `2^{n-k}` points and scans
//! for a point where `g` is 1.

use crate::circuit::{Circuit, CircuitBuilder, CircuitStats, GateId, GateKind};
use crate::decompose::{decompose_acc, estimate_f, DecompositionParams, Verify};
use crate::error::{Error, Result};
use crate::multilinear::{compose_eval_all_counted, DEFAULT_POINT_CAP};
use crate::oracle;
use crate::truthtable::{index_to_assignment, TruthTable};

/// Which inputs a k-blowup fixes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BlowupPolicy {
    /// The `k` highest-index inputs.
    #[default]
    HighestIndex,
    /// The `k` inputs with the most fan-out references (ties to the higher index).
    Fanout,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Blowup {
    pub circuit: Circuit,
    /// Original indices of the blown-up circuit's inputs, in order.
    pub free_vars: Vec<usize>,
    /// Original indices of the fixed inputs; restriction `a` sets `fixed_vars[0]` to the MSB of `a`.
    pub fixed_vars: Vec<usize>,
    /// Gate count of the same construction without constant folding.
    pub unfolded_gates: usize,
}

fn select_fixed(c: &Circuit, k: usize, policy: BlowupPolicy) -> Vec<usize> {
    let n = c.n_inputs();
    let mut fixed: Vec<usize> = match policy {
        BlowupPolicy::HighestIndex => (n - k..n).collect(),
        BlowupPolicy::Fanout => {
            let mut refs = vec![0usize; n];
            for g in c.gates() {
                for &f in &g.fanin {
                    if (f as usize) <= n {
                        refs[f as usize - 1] += 1;
                    }
                }
            }
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| refs[b].cmp(&refs[a]).then(b.cmp(&a)));
            order.truncate(k);
            order
        }
    };
    fixed.sort_unstable();
    fixed
}

fn blowup_with(c: &Circuit, k: usize, policy: BlowupPolicy, fold: bool) -> Result<Blowup> {
    let n = c.n_inputs();
    if k > n {
        return Err(Error::ResourceLimit { what: "blowup k", value: k, cap: n });
    }
    if k >= usize::BITS as usize - 1 {
        return Err(Error::ResourceLimit { what: "blowup k", value: k, cap: 62 });
    }
    let fixed = select_fixed(c, k, policy);
    let free: Vec<usize> = (0..n).filter(|v| !fixed.contains(v)).collect();
    let mut b = if fold { CircuitBuilder::folding(free.len()) } else { CircuitBuilder::new(free.len()) };
    let mut outs: Vec<GateId> = Vec::with_capacity(1 << k);
    for a in 0..1usize << k {
        let mut map = vec![0 as GateId; n];
        for (pos, &v) in free.iter().enumerate() {
            map[v] = b.input(pos);
        }
        for (j, &v) in fixed.iter().enumerate() {
            let bit = (a >> (k - 1 - j)) & 1 == 1;
            map[v] = if fold { b.constant(bit) } else { b.push(GateKind::Const(bit), vec![]) };
        }
        outs.push(b.embed(c, &map));
    }
    let out = if fold {
        let consts: Vec<Option<bool>> = outs
            .iter()
            .map(|&o| match b.gate(o).kind {
                GateKind::Const(v) => Some(v),
                _ => None,
            })
            .collect();
        if consts.contains(&Some(true)) {
            b.constant(true)
        } else if consts.iter().all(|v| v.is_some()) {
            b.constant(false)
        } else {
            let live = outs.iter().zip(&consts).filter(|(_, v)| v.is_none()).map(|(&o, _)| o).collect();
            b.push(GateKind::Or, live)
        }
    } else {
        b.push(GateKind::Or, outs)
    };
    let circuit = b.finish(out);
    let circuit = if fold { circuit.compact() } else { circuit };
    let unfolded_gates = free.len() + (1usize << k) * (c.size() - n + k) + 1;
    Ok(Blowup { circuit, free_vars: free, fixed_vars: fixed, unfolded_gates })
}

/// OR of the `2^k` constant-folded restrictions over the selected inputs.
pub fn k_blowup(c: &Circuit, k: usize, policy: BlowupPolicy) -> Result<Blowup> {
    blowup_with(c, k, policy, true)
}

/// The same construction with every gate copied verbatim.
pub fn k_blowup_unfolded(c: &Circuit, k: usize, policy: BlowupPolicy) -> Result<Blowup> {
    blowup_with(c, k, policy, false)
}

#[derive(Clone, Debug)]
pub struct AccSatParams {
    /// Explicit k; `None` applies the planning formula.
    pub k: Option<usize>,
    pub policy: BlowupPolicy,
    pub decomposition: DecompositionParams,
    /// Largest free-variable count evaluated on all points.
    pub point_cap: usize,
}

impl Default for AccSatParams {
    fn default() -> Self {
        AccSatParams {
            k: None,
            policy: BlowupPolicy::HighestIndex,
            decomposition: DecompositionParams { verify: Verify::Off, ..Default::default() },
            point_cap: DEFAULT_POINT_CAP,
        }
    }
}

/// Number of inputs to fix: the largest `k` with `k^(2f) <= n`, reduced
/// until `2^k * s` fits the monomial budget. An explicit `k` is used as given
/// (clamped to `n`).
pub fn choose_k(stats: &CircuitStats, params: &AccSatParams) -> usize {
    let n = stats.n_inputs;
    if let Some(k) = params.k {
        return k.min(n);
    }
    let m = stats.moduli.iter().copied().max().unwrap_or(2);
    let f = params
        .decomposition
        .f_estimate
        .unwrap_or_else(|| estimate_f(stats.acc_depth.max(1), m));
    let mut k = 0usize;
    while k < n && ((k + 1) as f64).powf(2.0 * f) <= n as f64 + 1e-9 {
        k += 1;
    }
    while k > 0 && (stats.size as u128) << k > params.decomposition.k_budget as u128 {
        k -= 1;
    }
    k
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Sat,
    Unsat,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SatMetrics {
    pub k: usize,
    /// Monomials of the decomposed polynomial.
    pub monomials: usize,
    pub pre_merge_terms: u64,
    pub eval_points: u64,
    /// Gate visits: restriction folding plus witness reconstruction (or full enumeration on fallback).
    pub gate_evals: u64,
    /// Polynomial term and table operations: decomposition plus all-points evaluation.
    pub monomial_ops: u64,
    pub blown_up_gates: usize,
    /// The circuit was outside the decomposable class and brute force decided it.
    pub fallback: bool,
}

impl SatMetrics {
    /// Gate evaluations plus polynomial operations plus one lookup per point.
    pub fn total_work(&self) -> u128 {
        self.gate_evals as u128 + self.monomial_ops as u128 + self.eval_points as u128
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SatResult {
    pub verdict: Verdict,
    pub witness: Option<Vec<bool>>,
    pub metrics: SatMetrics,
}

struct Evaluated {
    blowup: Blowup,
    table: TruthTable,
    metrics: SatMetrics,
}

fn evaluate_all(c: &Circuit, params: &AccSatParams) -> Result<Option<Evaluated>> {
    let limit = params.decomposition.depth_limit;
    if c.acc_depth() > limit {
        return Ok(None);
    }
    let k = choose_k(&c.stats(), params);
    let blowup = k_blowup(c, k, params.policy)?;
    let dparams = DecompositionParams { depth_limit: limit + 1, ..params.decomposition.clone() };
    let dec = decompose_acc(&blowup.circuit, &dparams)?;
    let (table, ops) = compose_eval_all_counted(&dec.g, &dec.h, params.point_cap)?;
    let metrics = SatMetrics {
        k,
        monomials: dec.k,
        pre_merge_terms: dec.pre_merge_terms,
        eval_points: table.len() as u64,
        gate_evals: ((c.size() as u64) << k),
        monomial_ops: ops + dec.ops,
        blown_up_gates: blowup.circuit.size(),
        fallback: false,
    };
    Ok(Some(Evaluated { blowup, table, metrics }))
}

fn brute_fallback(c: &Circuit) -> Result<(Option<Vec<bool>>, SatMetrics)> {
    let witness = oracle::brute_sat(c)?;
    let metrics = SatMetrics {
        eval_points: 1u64 << c.n_inputs(),
        gate_evals: oracle::brute_gate_evals(c) as u64,
        fallback: true,
        ..Default::default()
    };
    Ok((witness, metrics))
}

/// Decides satisfiability and returns a verified witness when there is one.
pub fn acc_sat(c: &Circuit, params: &AccSatParams) -> Result<SatResult> {
    let Some(ev) = evaluate_all(c, params)? else {
        let (witness, metrics) = brute_fallback(c)?;
        let verdict = if witness.is_some() { Verdict::Sat } else { Verdict::Unsat };
        return Ok(SatResult { verdict, witness, metrics });
    };
    let Evaluated { blowup, table, mut metrics } = ev;
    let Some(point) = table.first_one() else {
        return Ok(SatResult { verdict: Verdict::Unsat, witness: None, metrics });
    };
    let free_bits = index_to_assignment(blowup.free_vars.len(), point);
    let k = blowup.fixed_vars.len();
    let mut assignment = vec![false; c.n_inputs()];
    for (&v, &b) in blowup.free_vars.iter().zip(&free_bits) {
        assignment[v] = b;
    }
    for a in 0..1usize << k {
        for (j, &v) in blowup.fixed_vars.iter().enumerate() {
            assignment[v] = (a >> (k - 1 - j)) & 1 == 1;
        }
        metrics.gate_evals += c.size() as u64;
        if c.evaluate(&assignment)? {
            return Ok(SatResult { verdict: Verdict::Sat, witness: Some(assignment), metrics });
        }
    }
    Err(Error::Internal(format!(
        "blown-up circuit accepts free point {} but no restriction does",
        crate::truthtable::bits_to_string(&free_bits)
    )))
}

/// Satisfiability procedure used by the verification stages.
#[derive(Clone, Debug, Default)]
pub enum SatBackend {
    #[default]
    Brute,
    Acc(AccSatParams),
}

impl SatBackend {
    pub fn name(&self) -> &'static str {
        match self {
            SatBackend::Brute => "brute",
            SatBackend::Acc(_) => "acc",
        }
    }
}

/// Decides `c` with `backend`; the brute backend reports one gate visit per gate and point.
pub fn decide(c: &Circuit, backend: &SatBackend) -> Result<SatResult> {
    match backend {
        SatBackend::Acc(params) => acc_sat(c, params),
        SatBackend::Brute => {
            let (witness, mut metrics) = brute_fallback(c)?;
            metrics.fallback = false;
            let verdict = if witness.is_some() { Verdict::Sat } else { Verdict::Unsat };
            Ok(SatResult { verdict, witness, metrics })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GapVerdict {
    Unsat,
    Dense,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GapResult {
    pub verdict: GapVerdict,
    /// Accepted points of the blown-up circuit (of the circuit itself on fallback).
    pub accepted_points: u64,
    pub metrics: SatMetrics,
}

/// Decides the promise problem "unsatisfiable or accepts at least half the inputs".
/// Outside the promise the answer is `Dense` whenever anything is accepted.
pub fn gap_sat(c: &Circuit, params: &AccSatParams) -> Result<GapResult> {
    let (count, metrics) = match evaluate_all(c, params)? {
        Some(ev) => (ev.table.count_ones(), ev.metrics),
        None => {
            let (_, metrics) = brute_fallback(c)?;
            (oracle::brute_count(c)?, metrics)
        }
    };
    let verdict = if count == 0 { GapVerdict::Unsat } else { GapVerdict::Dense };
    Ok(GapResult { verdict, accepted_points: count, metrics })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{constant, projection, single_gate};

    #[test]
    fn blowup_k0_is_single_copy_or() {
        let c = single_gate(3, GateKind::Mod(2));
        let b = k_blowup(&c, 0, BlowupPolicy::HighestIndex).unwrap();
        assert_eq!(b.circuit.gate(b.circuit.output()).kind, GateKind::Or);
        assert_eq!(b.circuit.truth_table().unwrap(), c.truth_table().unwrap());
        assert_eq!(b.unfolded_gates, c.size() + 1);
    }

    #[test]
    fn blowup_full_is_constant() {
        let c = single_gate(3, GateKind::And);
        let b = k_blowup(&c, 3, BlowupPolicy::HighestIndex).unwrap();
        assert_eq!(b.circuit.n_inputs(), 0);
        assert_eq!(b.circuit.gate(b.circuit.output()).kind, GateKind::Const(true));
        let u = constant(2, false);
        let b = k_blowup(&u, 2, BlowupPolicy::Fanout).unwrap();
        assert_eq!(b.circuit.gate(b.circuit.output()).kind, GateKind::Const(false));
        assert!(k_blowup(&c, 4, BlowupPolicy::HighestIndex).is_err());
    }

    #[test]
    fn unfolded_size_matches_formula() {
        let c = single_gate(4, GateKind::Mod(3));
        for k in 0..=4 {
            let u = k_blowup_unfolded(&c, k, BlowupPolicy::HighestIndex).unwrap();
            assert_eq!(u.circuit.size(), u.unfolded_gates);
            assert!(u.unfolded_gates <= (c.size() << k) + 1);
        }
    }

    #[test]
    fn choose_k_rules() {
        let mut stats = projection(1, 0).stats();
        let p = AccSatParams::default();
        assert!(choose_k(&stats, &p) <= 1);
        stats.n_inputs = 16;
        stats.size = 40;
        stats.acc_depth = 2;
        let fixed_f = AccSatParams {
            decomposition: DecompositionParams { f_estimate: Some(2.0), ..Default::default() },
            ..Default::default()
        };
        assert_eq!(choose_k(&stats, &fixed_f), 2);
        let over = AccSatParams { k: Some(5), ..Default::default() };
        assert_eq!(choose_k(&stats, &over), 5);
        let tight = AccSatParams {
            decomposition: DecompositionParams {
                f_estimate: Some(0.5),
                k_budget: 160,
                ..Default::default()
            },
            ..Default::default()
        };
        assert_eq!(choose_k(&stats, &tight), 2);
    }

    #[test]
    fn acc_sat_small_cases() {
        let r = acc_sat(&constant(3, false), &AccSatParams::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Unsat);
        let c = single_gate(4, GateKind::And);
        let r = acc_sat(&c, &AccSatParams { k: Some(2), ..Default::default() }).unwrap();
        assert_eq!(r.witness, Some(vec![true; 4]));
        assert_eq!(r.metrics.eval_points, 4);
    }

    #[test]
    fn gap_sat_small_cases() {
        let p = AccSatParams::default();
        assert_eq!(gap_sat(&constant(2, false), &p).unwrap().verdict, GapVerdict::Unsat);
        assert_eq!(gap_sat(&projection(3, 0), &p).unwrap().verdict, GapVerdict::Dense);
    }
}
