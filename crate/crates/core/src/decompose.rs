//! `g ∘ h` decompositions of ACC circuits.
//!
//! A decomposition pairs a lookup table `g` on an integer interval with a
//! multilinear integer polynomial `h` such that `C(x) = g(h(x))` on every
//! cube point. Circuits that already have the shape SYM(AND-of-literals)
//! are decomposed directly. Other bounded-depth circuits go through a
//! staged lowering in which each gate becomes one of
//!
//! * an exact 0/1-valued polynomial (products of literal polynomials),
//! * a symmetric form: an integer polynomial with values in `[0, R)` plus
//!   a lookup table of length `R`; gates over several symmetric children
//!   pack the children's values into mixed-radix digits of one polynomial,
//! * a dense value table on the cube, used when neither of the above stays
//!   within budget; it is turned back into coefficients by the inverse
//!   subset-sum transform.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;

use crate::circuit::{Circuit, CircuitBuilder, Gate, GateId, GateKind};
use crate::error::{Error, Result};
use crate::multilinear::{compose_eval_all, MultilinearPoly, SymFunction};
use crate::truthtable::TruthTable;

pub const DEFAULT_K_BUDGET: usize = 1 << 26;
pub const DEFAULT_DEPTH_LIMIT: usize = 4;
pub const DEFAULT_TABLE_BUDGET: usize = 1 << 20;
/// Largest input count for which dense value tables are materialized.
pub const DENSE_CAP: usize = 26;
/// Largest expansion (product of factor sizes) computed as an explicit product.
const PRODUCT_TERMS: usize = 1 << 12;

/// One transformation stage and the sizes after it ran.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stage {
    pub name: String,
    pub gates: usize,
    pub monomials: usize,
}

impl Stage {
    fn new(name: &str, gates: usize, monomials: usize) -> Self {
        Stage { name: name.to_string(), gates, monomials }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "stage={} gates={} monomials={}", self.name, self.gates, self.monomials)
    }
}

/// How a finished decomposition is checked against its source circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verify {
    /// Every point when `n <= 22`, otherwise 10^4 seeded random points.
    Auto,
    Exhaustive,
    Random(usize),
    Off,
}

#[derive(Clone, Debug)]
pub struct DecompositionParams {
    pub k_budget: usize,
    pub depth_limit: usize,
    /// Largest lookup table built for a symmetric form.
    pub table_budget: usize,
    /// Rewrite mixed moduli to their lcm before lowering.
    pub modulus_unify: bool,
    /// Overrides `estimate_f` when planning.
    pub f_estimate: Option<f64>,
    pub verify: Verify,
}

impl Default for DecompositionParams {
    fn default() -> Self {
        DecompositionParams {
            k_budget: DEFAULT_K_BUDGET,
            depth_limit: DEFAULT_DEPTH_LIMIT,
            table_budget: DEFAULT_TABLE_BUDGET,
            modulus_unify: true,
            f_estimate: None,
            verify: Verify::Auto,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub g: SymFunction,
    pub h: MultilinearPoly,
    /// Monomials stored in `h` after merging.
    pub k: usize,
    /// Expansion terms produced before like monomials were merged.
    pub pre_merge_terms: u64,
    /// Term and table operations spent building the decomposition.
    pub ops: u64,
    pub trace: Vec<Stage>,
}

impl Decomposition {
    pub fn truth_table(&self) -> Result<TruthTable> {
        compose_eval_all(&self.g, &self.h)
    }

    /// `g(h(x))` at one point.
    pub fn eval(&self, point: &[bool]) -> Result<bool> {
        let v = self.h.eval_point(point)?;
        let bit = v.to_i64().and_then(|v| self.g.eval(v));
        bit.ok_or_else(|| Error::Range {
            point: crate::truthtable::bits_to_string(point),
            value: v.to_string(),
            lo: self.g.lo(),
            hi: self.g.hi(),
        })
    }
}

/// Planning value for the decomposition exponent: `d * ceil(log2 m)`.
pub fn estimate_f(d: usize, m: u32) -> f64 {
    let bits = (u32::BITS - (m.max(2) - 1).leading_zeros()) as f64;
    d.max(1) as f64 * bits
}

/// `log2` of the asymptotic monomial target `2^{(log2 s)^f}`.
pub fn k_target_log2(s: usize, f: f64) -> f64 {
    (s.max(2) as f64).log2().powf(f)
}

fn budget_error(attained: usize, budget: usize, trace: &[Stage]) -> Error {
    Error::KBudget { attained, budget, trace: trace.to_vec() }
}

/// Expanded polynomial of an AND of literals; `(v, true)` is `x_{v+1}`, `(v, false)` its negation.
pub fn and_to_monomials(n_vars: usize, literals: &[(usize, bool)]) -> Result<MultilinearPoly> {
    let terms = and_terms(literals)?;
    Ok(MultilinearPoly::from_terms(n_vars, terms))
}

fn and_terms(literals: &[(usize, bool)]) -> Result<Vec<(u64, i64)>> {
    let mut seen = 0u64;
    let mut pos = 0u64;
    let mut neg: Vec<u64> = Vec::new();
    for &(v, polarity) in literals {
        let bit = 1u64 << v;
        if seen & bit != 0 {
            return Err(Error::DuplicateVariable(v + 1));
        }
        seen |= bit;
        if polarity {
            pos |= bit;
        } else {
            neg.push(bit);
        }
    }
    let mut terms = Vec::with_capacity(1 << neg.len());
    for subset in 0u64..(1u64 << neg.len()) {
        let mut mask = pos;
        for (i, &bit) in neg.iter().enumerate() {
            if subset >> i & 1 == 1 {
                mask |= bit;
            }
        }
        let sign = if subset.count_ones() % 2 == 0 { 1 } else { -1 };
        terms.push((mask, sign));
    }
    Ok(terms)
}

fn gate_predicate(kind: GateKind, children: usize) -> impl Fn(i64) -> bool {
    move |v: i64| match kind {
        GateKind::Or => v >= 1,
        GateKind::And => v == children as i64,
        GateKind::Mod(m) => v.rem_euclid(m as i64) == 0,
        _ => unreachable!("not a symmetric gate"),
    }
}

/// Reads a literal gate: `INPUT k`, `NOT INPUT k` or a constant.
enum Literal {
    Var(usize, bool),
    Const(bool),
}

fn as_literal(c: &Circuit, id: GateId) -> Option<Literal> {
    let g = c.gate(id);
    match g.kind {
        GateKind::Input(k) => Some(Literal::Var(k as usize, true)),
        GateKind::Const(b) => Some(Literal::Const(b)),
        GateKind::Not => match c.gate(g.fanin[0]).kind {
            GateKind::Input(k) => Some(Literal::Var(k as usize, false)),
            _ => None,
        },
        _ => None,
    }
}

/// Literal list of an AND-of-literals child; `None` when the AND is constantly 0.
fn child_literals(c: &Circuit, id: GateId) -> Result<Option<Vec<(usize, bool)>>> {
    let not_sym = |why: String| Error::NotSymAnd(why);
    let g = c.gate(id);
    let parts: Vec<GateId> = match g.kind {
        GateKind::And => g.fanin.clone(),
        _ => vec![id],
    };
    let mut lits: BTreeMap<usize, bool> = BTreeMap::new();
    for p in parts {
        match as_literal(c, p) {
            Some(Literal::Const(false)) => return Ok(None),
            Some(Literal::Const(true)) => {}
            Some(Literal::Var(v, pol)) => match lits.get(&v) {
                Some(&prev) if prev != pol => return Ok(None),
                _ => {
                    lits.insert(v, pol);
                }
            },
            None => {
                return Err(not_sym(format!(
                    "gate {p} ({}) is not a literal below the top gate",
                    c.gate(p).kind.mnemonic()
                )))
            }
        }
    }
    Ok(Some(lits.into_iter().collect()))
}

/// Decomposes a circuit whose output is one OR/AND/MOD gate (possibly under
/// NOTs) over AND-of-literals children.
pub fn decompose_sym_and(c: &Circuit, params: &DecompositionParams) -> Result<Decomposition> {
    let mut top = c.output();
    let mut complemented = false;
    while c.gate(top).kind == GateKind::Not {
        complemented = !complemented;
        top = c.gate(top).fanin[0];
    }
    let gate = c.gate(top);
    if !matches!(gate.kind, GateKind::And | GateKind::Or | GateKind::Mod(_)) {
        return Err(Error::NotSymAnd(format!(
            "output gate {top} is {}, not a symmetric gate",
            gate.kind.mnemonic()
        )));
    }

    let n = c.n_inputs();
    let mut sums: FxHashMap<u64, i64> = FxHashMap::default();
    let mut pre_merge = 0u64;
    for &child in &gate.fanin {
        let Some(lits) = child_literals(c, child)? else { continue };
        let negs = lits.iter().filter(|l| !l.1).count();
        if negs >= 63 || (1usize << negs) > params.k_budget {
            let trace = [Stage::new("and-extract", 1, pre_merge as usize)];
            return Err(budget_error(1usize << negs.min(63), params.k_budget, &trace));
        }
        for (mask, coef) in and_terms(&lits)? {
            *sums.entry(mask).or_insert(0) += coef;
            pre_merge += 1;
        }
        if sums.len() > params.k_budget {
            let trace = [Stage::new("and-extract", 1, pre_merge as usize)];
            return Err(budget_error(sums.len(), params.k_budget, &trace));
        }
    }
    let h = MultilinearPoly::from_terms(n, sums);
    let (lo, hi) = h.value_bounds();
    let (lo, hi) = (lo.to_i64().unwrap(), hi.to_i64().unwrap());
    let width = (hi - lo + 1) as usize;
    if width > params.table_budget {
        return Err(Error::ResourceLimit {
            what: "symmetric table width",
            value: width,
            cap: params.table_budget,
        });
    }
    let pred = gate_predicate(gate.kind, gate.fanin.len());
    let mut g = SymFunction::from_predicate(lo, hi, pred);
    if complemented {
        g = g.complement();
    }
    let k = h.k();
    let dec = Decomposition {
        g,
        h,
        k,
        pre_merge_terms: pre_merge,
        ops: pre_merge,
        trace: vec![Stage::new("and-extract", 1, pre_merge as usize), Stage::new("sym-collapse", 0, k)],
    };
    verify(c, &dec, params.verify)?;
    Ok(dec)
}

/// Decomposes a bounded-depth AND/OR/NOT/MOD circuit.
pub fn decompose_acc(c: &Circuit, params: &DecompositionParams) -> Result<Decomposition> {
    let depth = c.acc_depth();
    if depth > params.depth_limit {
        return Err(Error::UnsupportedDepth { depth, limit: params.depth_limit });
    }
    match decompose_sym_and(c, params) {
        Err(Error::NotSymAnd(_)) => {}
        other => return other,
    }
    let mut trace = Vec::new();
    let mut norm = normalize(c);
    trace.push(Stage::new("normalize", live_gates(&norm), 0));
    let moduli = norm.stats().moduli;
    if params.modulus_unify && moduli.len() > 1 {
        norm = unify_moduli(&norm, &moduli);
        trace.push(Stage::new("modulus-unify", live_gates(&norm), 0));
    }
    let dec = Lowerer::new(&norm, params, trace).run()?;
    verify(c, &dec, params.verify)?;
    Ok(dec)
}

fn live_gates(c: &Circuit) -> usize {
    c.gates().iter().filter(|g| matches!(g.kind, GateKind::And | GateKind::Or | GateKind::Mod(_))).count()
}

/// Folds constants and pushes NOTs to the inputs with De Morgan's laws.
/// A NOT above a MOD gate stays in place.
pub fn normalize(c: &Circuit) -> Circuit {
    let c = c.fold_constants();
    let mut b = CircuitBuilder::folding(c.n_inputs());
    let mut pos: Vec<GateId> = Vec::with_capacity(c.size());
    let mut neg: Vec<GateId> = Vec::with_capacity(c.size());
    for g in c.gates() {
        let fp: Vec<GateId> = g.fanin.iter().map(|&f| pos[f as usize - 1]).collect();
        let fn_: Vec<GateId> = g.fanin.iter().map(|&f| neg[f as usize - 1]).collect();
        let (p, q) = match g.kind {
            GateKind::Input(k) => {
                let x = b.input(k as usize);
                (x, b.not(x))
            }
            GateKind::Const(v) => (b.constant(v), b.constant(!v)),
            GateKind::Not => (fn_[0], fp[0]),
            GateKind::And => (b.and(fp), b.or(fn_)),
            GateKind::Or => (b.or(fp), b.and(fn_)),
            GateKind::Mod(m) => {
                let p = b.modm(m, fp);
                (p, b.not(p))
            }
        };
        pos.push(p);
        neg.push(q);
    }
    let out = pos[c.output() as usize - 1];
    b.finish(out).compact()
}

/// Rewrites every `MOD_m` gate as `MOD_L` with each input repeated `L/m` times, `L = lcm`.
pub fn unify_moduli(c: &Circuit, moduli: &std::collections::BTreeSet<u32>) -> Circuit {
    let l = moduli.iter().fold(1u32, |acc, &m| num_integer::lcm(acc, m));
    let gates = c
        .gates()
        .iter()
        .map(|g| match g.kind {
            GateKind::Mod(m) => {
                let rep = (l / m) as usize;
                let fanin = g.fanin.iter().flat_map(|&f| std::iter::repeat_n(f, rep)).collect();
                Gate::new(GateKind::Mod(l), fanin)
            }
            _ => g.clone(),
        })
        .collect();
    Circuit::new(c.n_inputs(), gates, c.output()).expect("modulus rewrite keeps validity")
}

type Sparse = FxHashMap<u64, i64>;

#[derive(Clone)]
enum Form {
    /// Exact 0/1-valued polynomial.
    Poly(Sparse),
    /// Polynomial with values in `[0, table.len())` and the lookup applied to it.
    Sym { h: Sparse, table: Vec<bool> },
    /// Value bitset on the cube in mask order (bit `v` of the index is `x_{v+1}`).
    Dense(TruthTable),
}

impl Form {
    fn terms(&self) -> usize {
        match self {
            Form::Poly(p) => p.len(),
            Form::Sym { h, .. } => h.len(),
            Form::Dense(_) => 0,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Class {
    Literal,
    AndExtract,
    SymCollapse,
    DepthReduce,
}

fn overflow(what: &str) -> Error {
    Error::Overflow(format!("{what} exceeds 64-bit coefficients"))
}

fn sp_add_scaled(acc: &mut Sparse, p: &Sparse, w: i64) -> Result<()> {
    for (&m, &c) in p {
        let add = c.checked_mul(w).ok_or_else(|| overflow("scaled term"))?;
        let e = acc.entry(m).or_insert(0);
        *e = e.checked_add(add).ok_or_else(|| overflow("term sum"))?;
    }
    acc.retain(|_, c| *c != 0);
    Ok(())
}

fn sp_one_minus(p: &Sparse) -> Result<Sparse> {
    let mut out: Sparse = FxHashMap::default();
    out.insert(0, 1);
    sp_add_scaled(&mut out, p, -1)?;
    Ok(out)
}

fn sp_mul(a: &Sparse, b: &Sparse) -> Result<Sparse> {
    let mut out: Sparse = FxHashMap::default();
    for (&ma, &ca) in a {
        for (&mb, &cb) in b {
            let t = ca.checked_mul(cb).ok_or_else(|| overflow("product term"))?;
            let e = out.entry(ma | mb).or_insert(0);
            *e = e.checked_add(t).ok_or_else(|| overflow("product sum"))?;
        }
    }
    out.retain(|_, c| *c != 0);
    Ok(out)
}

fn sp_const(v: i64) -> Sparse {
    let mut p: Sparse = FxHashMap::default();
    if v != 0 {
        p.insert(0, v);
    }
    p
}

struct Lowerer<'a> {
    c: &'a Circuit,
    params: &'a DecompositionParams,
    trace: Vec<Stage>,
    forms: Vec<Form>,
    ops: u64,
    counts: [(usize, usize); 3],
    total_gates: usize,
}

impl<'a> Lowerer<'a> {
    fn new(c: &'a Circuit, params: &'a DecompositionParams, trace: Vec<Stage>) -> Self {
        Lowerer {
            c,
            params,
            trace,
            forms: Vec::with_capacity(c.size()),
            ops: 0,
            counts: [(0, 0); 3],
            total_gates: live_gates(c),
        }
    }

    fn n(&self) -> usize {
        self.c.n_inputs()
    }

    fn stage_trace(&self, final_k: Option<usize>) -> Vec<Stage> {
        let mut trace = self.trace.clone();
        let mut remaining = self.total_gates;
        let names = ["and-extract", "sym-collapse", "depth-reduce"];
        for (i, name) in names.iter().enumerate() {
            remaining -= self.counts[i].0;
            let monomials = if i == 2 { final_k.unwrap_or(self.counts[i].1) } else { self.counts[i].1 };
            trace.push(Stage::new(name, remaining, monomials));
        }
        trace
    }

    fn check_budget(&self, k: usize) -> Result<()> {
        if k > self.params.k_budget {
            return Err(budget_error(k, self.params.k_budget, &self.stage_trace(None)));
        }
        Ok(())
    }

    fn run(mut self) -> Result<Decomposition> {
        for id in self.c.ids() {
            let (form, class) = self.lower_gate(id)?;
            self.check_budget(form.terms())?;
            let slot = match class {
                Class::Literal => None,
                Class::AndExtract => Some(0),
                Class::SymCollapse => Some(1),
                Class::DepthReduce => Some(2),
            };
            if let Some(s) = slot {
                self.counts[s].0 += 1;
                self.counts[s].1 += form.terms();
            }
            self.forms.push(form);
        }
        let top = self.forms[self.c.output() as usize - 1].clone();
        let (h, table, pre_merge) = match top {
            Form::Poly(p) => {
                let len = p.len() as u64;
                (p, vec![false, true], len)
            }
            Form::Sym { h, table } => {
                let len = h.len() as u64;
                (h, table, len)
            }
            Form::Dense(t) => {
                let h = self.mobius(&t)?;
                let len = h.len() as u64;
                (h, vec![false, true], len)
            }
        };
        self.check_budget(h.len())?;
        let h = MultilinearPoly::from_terms(self.n(), h);
        let (lo_sum, hi_sum) = h.value_bounds();
        let lo = lo_sum.to_i64().unwrap_or(i64::MIN).max(0);
        let hi = hi_sum.to_i64().unwrap_or(i64::MAX).min(table.len() as i64 - 1);
        let g = SymFunction::new(lo, table[lo as usize..=hi as usize].to_vec());
        let k = h.k();
        Ok(Decomposition {
            g,
            h,
            k,
            pre_merge_terms: pre_merge.max(k as u64),
            ops: self.ops,
            trace: self.stage_trace(Some(k)),
        })
    }

    fn is_literal(&self, id: GateId) -> bool {
        as_literal(self.c, id).is_some()
    }

    fn lower_gate(&mut self, id: GateId) -> Result<(Form, Class)> {
        let g = self.c.gate(id);
        match g.kind {
            GateKind::Input(k) => {
                let mut p: Sparse = FxHashMap::default();
                p.insert(1u64 << k, 1);
                Ok((Form::Poly(p), Class::Literal))
            }
            GateKind::Const(b) => Ok((Form::Poly(sp_const(b as i64)), Class::Literal)),
            GateKind::Not => {
                let form = match &self.forms[g.fanin[0] as usize - 1] {
                    Form::Poly(p) => Form::Poly(sp_one_minus(p)?),
                    Form::Sym { h, table } => {
                        Form::Sym { h: h.clone(), table: table.iter().map(|b| !b).collect() }
                    }
                    Form::Dense(t) => Form::Dense(t.not()),
                };
                self.ops += form.terms() as u64;
                Ok((form, Class::Literal))
            }
            kind => self.lower_symmetric(kind, &g.fanin),
        }
    }

    fn lower_symmetric(&mut self, kind: GateKind, fanin: &[GateId]) -> Result<(Form, Class)> {
        // distinct children with multiplicities; AND/OR are idempotent
        let mut mult: BTreeMap<GateId, usize> = BTreeMap::new();
        for &f in fanin {
            *mult.entry(f).or_insert(0) += 1;
        }
        if matches!(kind, GateKind::And | GateKind::Or) {
            mult.values_mut().for_each(|m| *m = 1);
        }
        let children: Vec<(GateId, usize)> = mult.into_iter().collect();
        let total: usize = children.iter().map(|c| c.1).sum();

        if children.iter().any(|&(f, _)| matches!(self.forms[f as usize - 1], Form::Dense(_))) {
            return Ok((self.dense_gate(kind, &children)?, Class::DepthReduce));
        }
        let (result, ops) = self.lower_sparse(kind, &children, total)?;
        self.ops += ops;
        match result {
            Some(done) => Ok(done),
            None => Ok((self.dense_gate(kind, &children)?, Class::DepthReduce)),
        }
    }

    /// Sparse lowering of a symmetric gate; `None` when the packed table would exceed its budget.
    fn lower_sparse(
        &self,
        kind: GateKind,
        children: &[(GateId, usize)],
        total: usize,
    ) -> Result<(Option<(Form, Class)>, u64)> {
        let pred = gate_predicate(kind, total);
        let mut ops = 0u64;
        let forms: Vec<&Form> = children.iter().map(|&(f, _)| &self.forms[f as usize - 1]).collect();

        if forms.iter().all(|f| matches!(f, Form::Poly(_))) {
            let polys: Vec<&Sparse> = forms
                .iter()
                .map(|f| match f {
                    Form::Poly(p) => p,
                    _ => unreachable!(),
                })
                .collect();
            let all_literals = children.iter().all(|&(f, _)| self.is_literal(f));
            let class = if kind == GateKind::And && all_literals {
                Class::AndExtract
            } else {
                Class::SymCollapse
            };
            let estimate = match kind {
                GateKind::And => polys.iter().try_fold(1usize, |acc, p| acc.checked_mul(p.len().max(1))),
                GateKind::Or => polys.iter().try_fold(1usize, |acc, p| acc.checked_mul(p.len() + 1)),
                _ => None,
            };
            if let Some(est) = estimate.filter(|&e| e <= PRODUCT_TERMS) {
                let poly = match kind {
                    GateKind::And => {
                        let mut acc = sp_const(1);
                        for p in &polys {
                            acc = sp_mul(&acc, p)?;
                        }
                        acc
                    }
                    _ => {
                        let mut acc = sp_const(1);
                        for p in &polys {
                            acc = sp_mul(&acc, &sp_one_minus(p)?)?;
                        }
                        sp_one_minus(&acc)?
                    }
                };
                ops += est as u64;
                return Ok((Some((Form::Poly(poly), class)), ops));
            }
            let mut h: Sparse = FxHashMap::default();
            for (p, &(_, mu)) in polys.iter().zip(children) {
                sp_add_scaled(&mut h, p, mu as i64)?;
                ops += p.len() as u64;
            }
            let table = (0..=total as i64).map(&pred).collect();
            return Ok((Some((Form::Sym { h, table }, class)), ops));
        }

        // some symmetric children: pack every child's value into one digit
        let mut radix: Vec<usize> = Vec::new();
        let mut count_range = 0usize;
        for (form, &(_, mu)) in forms.iter().zip(children) {
            match form {
                Form::Poly(_) => count_range += mu,
                Form::Sym { table, .. } => radix.push(table.len()),
                Form::Dense(_) => unreachable!(),
            }
        }
        let size = radix
            .iter()
            .try_fold(count_range + 1, |acc, &r| acc.checked_mul(r))
            .filter(|&s| s <= self.params.table_budget);
        let Some(size) = size else {
            return Ok((None, ops));
        };

        let mut h: Sparse = FxHashMap::default();
        let mut weight = count_range as i64 + 1;
        let mut syms: Vec<(&Vec<bool>, usize, usize, usize)> = Vec::new();
        for (form, &(_, mu)) in forms.iter().zip(children) {
            match form {
                Form::Poly(p) => sp_add_scaled(&mut h, p, mu as i64)?,
                Form::Sym { h: hj, table } => {
                    sp_add_scaled(&mut h, hj, weight)?;
                    syms.push((table, weight as usize, table.len(), mu));
                    weight *= table.len() as i64;
                }
                Form::Dense(_) => unreachable!(),
            }
            ops += form.terms() as u64;
        }
        let table: Vec<bool> = (0..size)
            .map(|v| {
                let mut ones = (v % (count_range + 1)) as i64;
                for &(t, w, r, mu) in &syms {
                    if t[(v / w) % r] {
                        ones += mu as i64;
                    }
                }
                pred(ones)
            })
            .collect();
        ops += size as u64;
        Ok((Some((Form::Sym { h, table }, Class::DepthReduce)), ops))
    }

    fn dense_cap_check(&self) -> Result<()> {
        if self.n() > DENSE_CAP {
            return Err(Error::ResourceLimit {
                what: "inputs for dense materialization",
                value: self.n(),
                cap: DENSE_CAP,
            });
        }
        Ok(())
    }

    /// Values of a sparse polynomial on every point, indexed by mask.
    fn zeta(&mut self, p: &Sparse) -> Result<Vec<i64>> {
        self.dense_cap_check()?;
        let n = self.n();
        p.values()
            .try_fold(0i64, |acc, &c| acc.checked_add(c.checked_abs()?))
            .ok_or_else(|| overflow("polynomial norm"))?;
        let mut a = vec![0i64; 1 << n];
        for (&m, &c) in p {
            a[m as usize] = c;
        }
        for v in 0..n {
            let step = 1usize << v;
            for chunk in a.chunks_mut(2 * step) {
                let (lo, hi) = chunk.split_at_mut(step);
                hi.iter_mut().zip(lo.iter()).for_each(|(x, y)| *x += *y);
            }
        }
        self.ops += (n as u64) << n;
        Ok(a)
    }

    fn densify(&mut self, form: &Form) -> Result<TruthTable> {
        let n = self.n();
        let (values, table) = match form {
            Form::Dense(t) => return Ok(t.clone()),
            Form::Poly(p) => (self.zeta(p)?, None),
            Form::Sym { h, table } => (self.zeta(h)?, Some(table)),
        };
        let mut out = TruthTable::zeros(n);
        for (m, &v) in values.iter().enumerate() {
            let bit = match table {
                None => v == 1,
                Some(t) => *usize::try_from(v).ok().and_then(|i| t.get(i)).ok_or_else(|| {
                    Error::Internal(format!("symmetric form value {v} outside its table"))
                })?,
            };
            if bit {
                out.set(m, true);
            }
        }
        Ok(out)
    }

    fn dense_gate(&mut self, kind: GateKind, children: &[(GateId, usize)]) -> Result<Form> {
        let mut tables = Vec::with_capacity(children.len());
        for &(f, mu) in children {
            let form = self.forms[f as usize - 1].clone();
            tables.push((self.densify(&form)?, mu));
        }
        let n = self.n();
        let n_words = tables[0].0.words().len();
        self.ops += (n_words * tables.len()) as u64;
        let words: Vec<u64> = match kind {
            GateKind::And => (0..n_words)
                .map(|w| tables.iter().fold(!0u64, |acc, (t, _)| acc & t.words()[w]))
                .collect(),
            GateKind::Or => (0..n_words)
                .map(|w| tables.iter().fold(0u64, |acc, (t, _)| acc | t.words()[w]))
                .collect(),
            GateKind::Mod(m) => {
                let m = m as usize;
                let mut residues = vec![0u64; m];
                (0..n_words)
                    .map(|w| {
                        residues.iter_mut().for_each(|r| *r = 0);
                        residues[0] = !0;
                        for (t, mu) in &tables {
                            let y = t.words()[w];
                            let shift = mu % m;
                            if shift == 0 {
                                continue;
                            }
                            let rotated: Vec<u64> =
                                (0..m).map(|r| residues[(r + m - shift) % m]).collect();
                            for r in 0..m {
                                residues[r] = (residues[r] & !y) | (rotated[r] & y);
                            }
                        }
                        residues[0]
                    })
                    .collect()
            }
            _ => unreachable!(),
        };
        Ok(Form::Dense(TruthTable::from_words(n, words)))
    }

    /// Coefficients of the multilinear extension of a 0/1 table in mask order.
    fn mobius(&mut self, t: &TruthTable) -> Result<Sparse> {
        self.dense_cap_check()?;
        let n = self.n();
        // |coefficient| <= 2^n <= 2^26 fits i32
        let mut a: Vec<i32> = (0..1usize << n).map(|m| t.get(m) as i32).collect();
        for v in 0..n {
            let step = 1usize << v;
            for chunk in a.chunks_mut(2 * step) {
                let (lo, hi) = chunk.split_at_mut(step);
                hi.iter_mut().zip(lo.iter()).for_each(|(x, y)| *x -= *y);
            }
        }
        self.ops += (n as u64) << n;
        let nonzero = a.iter().filter(|&&c| c != 0).count();
        self.check_budget(nonzero)?;
        Ok(a.iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(m, &c)| (m as u64, c as i64))
            .collect())
    }
}

const VERIFY_SEED: u64 = 0x0dec_0de5;

/// Checks `g(h(x)) = C(x)` per the requested policy.
pub fn verify(c: &Circuit, dec: &Decomposition, policy: Verify) -> Result<()> {
    let n = c.n_inputs();
    let policy = match policy {
        Verify::Auto if n <= 22 => Verify::Exhaustive,
        Verify::Auto => Verify::Random(10_000),
        p => p,
    };
    let mismatch = |point: &[bool]| {
        Error::Internal(format!(
            "decomposition disagrees with the circuit at {}",
            crate::truthtable::bits_to_string(point)
        ))
    };
    match policy {
        Verify::Off | Verify::Auto => Ok(()),
        Verify::Exhaustive => {
            let got = dec.truth_table()?;
            let want = c.truth_table_capped(DENSE_CAP)?;
            match got.first_difference(&want) {
                None => Ok(()),
                Some(i) => Err(mismatch(&crate::truthtable::index_to_assignment(n, i))),
            }
        }
        Verify::Random(count) => {
            let mut rng = ChaCha8Rng::seed_from_u64(VERIFY_SEED);
            for _ in 0..count {
                let point: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
                if dec.eval(&point)? != c.evaluate(&point)? {
                    return Err(mismatch(&point));
                }
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::single_gate;
    use num_bigint::BigInt;

    fn params() -> DecompositionParams {
        DecompositionParams { verify: Verify::Exhaustive, ..Default::default() }
    }

    #[test]
    fn and_to_monomials_examples() {
        let p = and_to_monomials(2, &[(0, true), (1, true)]).unwrap();
        assert_eq!(p.k(), 1);
        assert_eq!(p.coefficient(0b11), BigInt::from(1));
        let q = and_to_monomials(1, &[(0, false)]).unwrap();
        assert_eq!(q, MultilinearPoly::from_terms(1, [(0u64, 1), (1, -1)]));
        let r = and_to_monomials(3, &[(0, false), (1, false), (2, true)]).unwrap();
        for i in 0..8usize {
            let point = crate::truthtable::index_to_assignment(3, i);
            let want = i == 0b001;
            assert_eq!(r.eval_point(&point).unwrap(), BigInt::from(want as i32));
        }
        assert_eq!(and_to_monomials(2, &[(1, true), (1, false)]), Err(Error::DuplicateVariable(2)));
    }

    #[test]
    fn sym_and_parity() {
        let c = single_gate(2, GateKind::Mod(2));
        let d = decompose_sym_and(&c, &params()).unwrap();
        assert_eq!(d.h, MultilinearPoly::from_terms(2, [(1u64, 1), (2, 1)]));
        assert_eq!(d.truth_table().unwrap().to_bit_string(), "1001");
        assert_eq!((d.g.lo(), d.g.hi()), (0, 2));
    }

    #[test]
    fn sym_and_or_of_and() {
        let mut b = CircuitBuilder::new(3);
        let a = b.and([1, 2]);
        let o = b.or([a, 3]);
        let c = b.finish(o);
        let d = decompose_sym_and(&c, &params()).unwrap();
        assert_eq!(d.h, MultilinearPoly::from_terms(3, [(0b011u64, 1), (0b100, 1)]));
        assert_eq!(d.truth_table().unwrap(), c.truth_table().unwrap());
        assert_eq!(d.trace.last().unwrap().to_string(), "stage=sym-collapse gates=0 monomials=2");
    }

    #[test]
    fn sym_and_rejects_deeper_circuits() {
        let mut b = CircuitBuilder::new(3);
        let m = b.modm(2, [1, 2]);
        let o = b.or([m, 3]);
        let c = b.finish(o);
        assert!(matches!(decompose_sym_and(&c, &params()), Err(Error::NotSymAnd(_))));
        let d = decompose_acc(&c, &params()).unwrap();
        assert_eq!(d.truth_table().unwrap(), c.truth_table().unwrap());
        assert_eq!(d.trace[0].name, "normalize");
    }

    #[test]
    fn negated_top_and_constant_children() {
        let mut b = CircuitBuilder::new(2);
        let one = b.constant(true);
        let nx = b.not(1);
        let a = b.and([nx, 2, one]);
        let m = b.modm(3, [a, 2, 2]);
        let top = b.not(m);
        let c = b.finish(top);
        let d = decompose_sym_and(&c, &params()).unwrap();
        assert_eq!(d.truth_table().unwrap(), c.truth_table().unwrap());
    }

    #[test]
    fn acc_mixed_moduli_and_packing() {
        let mut b = CircuitBuilder::new(6);
        let a1 = b.and([1, 2]);
        let n3 = b.not(3);
        let a2 = b.and([n3, 4]);
        let m2 = b.modm(2, [a1, a2, 5]);
        let m3 = b.modm(3, [a1, 6, 4, 2]);
        let nm = b.not(m3);
        let top = b.or([m2, nm, 1]);
        let c = b.finish(top);
        let d = decompose_acc(&c, &params()).unwrap();
        assert_eq!(d.truth_table().unwrap(), c.truth_table().unwrap());
        assert!(d.trace.iter().any(|s| s.name == "modulus-unify"));
        let tight = DecompositionParams { table_budget: 4, ..params() };
        let d = decompose_acc(&c, &tight).unwrap();
        assert_eq!(d.truth_table().unwrap(), c.truth_table().unwrap());
    }

    #[test]
    fn budget_and_depth_errors() {
        let mut b = CircuitBuilder::new(4);
        let m = b.modm(2, [1, 2]);
        let o = b.or([m, 3]);
        let a = b.and([o, 4]);
        let m2 = b.modm(3, [a, 1]);
        let o2 = b.or([m2, 2]);
        let c = b.finish(o2);
        let shallow = DecompositionParams { depth_limit: 2, ..params() };
        assert!(matches!(decompose_acc(&c, &shallow), Err(Error::UnsupportedDepth { depth: 5, limit: 2 })));
        let tiny = DecompositionParams { k_budget: 1, depth_limit: 6, ..params() };
        match decompose_acc(&c, &tiny) {
            Err(Error::KBudget { budget: 1, trace, .. }) => assert!(!trace.is_empty()),
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn estimate_f_is_monotone() {
        assert!(estimate_f(2, 2) >= 1.0);
        assert!(estimate_f(3, 6) >= estimate_f(2, 6));
        assert!(estimate_f(2, 6) >= estimate_f(2, 2));
        assert_eq!(estimate_f(2, 2), 2.0);
    }

    #[test]
    fn normalize_pushes_nots_down() {
        let mut b = CircuitBuilder::new(3);
        let a = b.and([1, 2]);
        let o = b.or([a, 3]);
        let top = b.not(o);
        let c = b.finish(top);
        let norm = normalize(&c);
        for g in norm.gates() {
            if g.kind == GateKind::Not {
                assert!(matches!(norm.gate(g.fanin[0]).kind, GateKind::Input(_) | GateKind::Mod(_)));
            }
        }
        assert_eq!(norm.truth_table().unwrap(), c.truth_table().unwrap());
    }
}
