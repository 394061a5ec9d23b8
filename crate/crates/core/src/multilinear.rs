//! Multilinear polynomials with unbounded integer coefficients.
//!
//! A monomial is a bitmask over the variables: bit `v` stands for `x_{v+1}`.
//! Points follow the truth-table convention, so point index `i` has `x1` in
//! its most significant bit.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::truthtable::{bits_to_string, index_to_assignment, TruthTable};

/// Largest variable count for which all-points evaluation is attempted.
pub const DEFAULT_POINT_CAP: usize = 26;

/// Largest supported variable count (one bit per variable in a `u64`).
pub const MAX_VARS: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultilinearPoly {
    n_vars: usize,
    terms: BTreeMap<u64, BigInt>,
}

fn var_bit(v: usize) -> u64 {
    1u64 << v
}

impl MultilinearPoly {
    pub fn zero(n_vars: usize) -> Self {
        assert!(n_vars <= MAX_VARS, "at most {MAX_VARS} variables are supported");
        MultilinearPoly { n_vars, terms: BTreeMap::new() }
    }

    pub fn constant(n_vars: usize, c: impl Into<BigInt>) -> Self {
        let mut p = Self::zero(n_vars);
        p.add_term(0, c.into());
        p
    }

    /// The polynomial `x_{v+1}`.
    pub fn var(n_vars: usize, v: usize) -> Self {
        assert!(v < n_vars);
        let mut p = Self::zero(n_vars);
        p.add_term(var_bit(v), BigInt::one());
        p
    }

    pub fn from_terms<C: Into<BigInt>>(
        n_vars: usize,
        terms: impl IntoIterator<Item = (u64, C)>,
    ) -> Self {
        let mut p = Self::zero(n_vars);
        for (mask, c) in terms {
            p.add_term(mask, c.into());
        }
        p
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    /// Number of stored (nonzero) monomials.
    pub fn k(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, &BigInt)> + '_ {
        self.terms.iter().map(|(&m, c)| (m, c))
    }

    pub fn coefficient(&self, mask: u64) -> BigInt {
        self.terms.get(&mask).cloned().unwrap_or_default()
    }

    /// Adds `c` to the coefficient of `mask`, dropping the entry if it cancels.
    pub fn add_term(&mut self, mask: u64, c: BigInt) {
        assert!(
            self.n_vars == MAX_VARS || mask >> self.n_vars == 0,
            "monomial {mask:#x} uses variables beyond n_vars={}",
            self.n_vars
        );
        if c.is_zero() {
            return;
        }
        match self.terms.entry(mask) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n_vars, other.n_vars);
        let mut out = self.clone();
        for (&m, c) in &other.terms {
            out.add_term(m, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        let terms = self.terms.iter().map(|(&m, c)| (m, -c)).collect();
        MultilinearPoly { n_vars: self.n_vars, terms }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Product with `x^2 = x` reduction.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n_vars, other.n_vars);
        let mut out = Self::zero(self.n_vars);
        for (&a, ca) in &self.terms {
            for (&b, cb) in &other.terms {
                out.add_term(a | b, ca * cb);
            }
        }
        out
    }

    /// Sum of absolute coefficient values; bounds every point value and every
    /// partial sum formed while evaluating.
    pub fn l1_norm(&self) -> BigInt {
        self.terms.values().map(|c| c.abs()).sum()
    }

    /// Sums of the negative and of the positive coefficients.
    pub fn value_bounds(&self) -> (BigInt, BigInt) {
        let mut lo = BigInt::zero();
        let mut hi = BigInt::zero();
        for c in self.terms.values() {
            if c.is_negative() {
                lo += c;
            } else {
                hi += c;
            }
        }
        (lo, hi)
    }

    pub fn eval_point(&self, point: &[bool]) -> Result<BigInt> {
        if point.len() != self.n_vars {
            return Err(Error::InputArity { expected: self.n_vars, got: point.len() });
        }
        let ones = point
            .iter()
            .enumerate()
            .fold(0u64, |acc, (v, &b)| if b { acc | var_bit(v) } else { acc });
        Ok(self.eval_mask(ones))
    }

    /// Evaluates at the point whose 1-set is `ones` (bit `v` = `x_{v+1}`).
    pub fn eval_mask(&self, ones: u64) -> BigInt {
        self.terms
            .iter()
            .filter(|(&m, _)| m & !ones == 0)
            .map(|(_, c)| c)
            .sum()
    }

    /// Splits as `p = x_{var+1} * q1 + q2` with neither part mentioning that variable.
    pub fn split(&self, var: usize) -> (Self, Self) {
        assert!(var < self.n_vars);
        let bit = var_bit(var);
        let mut q1 = Self::zero(self.n_vars);
        let mut q2 = Self::zero(self.n_vars);
        for (&m, c) in &self.terms {
            if m & bit != 0 {
                q1.terms.insert(m & !bit, c.clone());
            } else {
                q2.terms.insert(m, c.clone());
            }
        }
        (q1, q2)
    }

    /// Inverse of `split`.
    pub fn recombine(var: usize, q1: &Self, q2: &Self) -> Self {
        let x = Self::var(q1.n_vars, var);
        x.mul(q1).add(q2)
    }

    /// Values at all `2^n` points (index `i` = lexicographic point, `x1` MSB).
    pub fn coefficient_to_point(&self) -> Result<PointValues> {
        self.coefficient_to_point_counted(DEFAULT_POINT_CAP).map(|(v, _)| v)
    }

    /// Like `coefficient_to_point`, also returning the number of arithmetic
    /// operations performed (one per coefficient placement, one per merge addition).
    pub fn coefficient_to_point_counted(&self, cap: usize) -> Result<(PointValues, u64)> {
        let n = self.n_vars;
        if n > cap {
            return Err(Error::ResourceLimit { what: "polynomial variable count", value: n, cap });
        }
        let bound = self.l1_norm();
        let (values, merge_ops) = if bound <= BigInt::from(i8::MAX) {
            let (v, ops) = self.transform::<i8>(|c| c.to_i8().unwrap());
            (PointValues::I8(v), ops)
        } else if bound <= BigInt::from(i16::MAX) {
            let (v, ops) = self.transform::<i16>(|c| c.to_i16().unwrap());
            (PointValues::I16(v), ops)
        } else if bound <= BigInt::from(i32::MAX) {
            let (v, ops) = self.transform::<i32>(|c| c.to_i32().unwrap());
            (PointValues::I32(v), ops)
        } else if bound <= BigInt::from(i64::MAX) {
            let (v, ops) = self.transform::<i64>(|c| c.to_i64().unwrap());
            (PointValues::I64(v), ops)
        } else {
            let (v, ops) = self.transform::<BigInt>(|c| c.clone());
            (PointValues::Big(v), ops)
        };
        Ok((values, merge_ops + self.k() as u64))
    }

    fn transform<T: Cell>(&self, conv: impl Fn(&BigInt) -> T) -> (Vec<T>, u64) {
        let n = self.n_vars;
        let mut table = vec![T::default(); 1usize << n];
        for (&m, c) in &self.terms {
            table[mask_to_index(n, m)] = conv(c);
        }
        let ops = split_merge(&mut table);
        (table, ops)
    }
}

/// Table index of the point whose 1-set is `mask`.
pub fn mask_to_index(n: usize, mask: u64) -> usize {
    if n == 0 {
        return 0;
    }
    (mask.reverse_bits() >> (64 - n)) as usize
}

/// 1-set mask of the point with table index `i`.
pub fn index_to_mask(n: usize, i: usize) -> u64 {
    mask_to_index(n, i as u64) as u64
}

trait Cell: Clone + Default + Send + Sync {
    fn add_from(&mut self, other: &Self);
}

macro_rules! prim_cell {
    ($($t:ty),*) => {$(
        impl Cell for $t {
            #[inline]
            fn add_from(&mut self, other: &Self) {
                *self += *other;
            }
        }
    )*};
}
prim_cell!(i8, i16, i32, i64);

impl Cell for BigInt {
    fn add_from(&mut self, other: &Self) {
        *self += other;
    }
}

const PARALLEL_SPLIT: usize = 1 << 16;

/// In-place coefficient-to-point recursion on a table laid out by point index.
///
/// The lower half holds the part without `x1` (q2), the upper half the
/// cofactor of `x1` (q1). After both halves are transformed, the `x1 = 1`
/// half becomes `T1 + T2`.
fn split_merge<T: Cell>(table: &mut [T]) -> u64 {
    let len = table.len();
    if len <= 1 {
        return 0;
    }
    let half = len / 2;
    let (lo, hi) = table.split_at_mut(half);
    let (a, b) = if len >= PARALLEL_SPLIT {
        rayon::join(|| split_merge(lo), || split_merge(hi))
    } else {
        (split_merge(lo), split_merge(hi))
    };
    if len >= PARALLEL_SPLIT {
        hi.par_chunks_mut(4096)
            .zip(lo.par_chunks(4096))
            .for_each(|(h, l)| h.iter_mut().zip(l).for_each(|(x, y)| x.add_from(y)));
    } else {
        hi.iter_mut().zip(lo.iter()).for_each(|(x, y)| x.add_from(y));
    }
    a + b + half as u64
}

/// Values of a polynomial on every cube point, stored in the narrowest
/// integer type that provably holds every intermediate sum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PointValues {
    I8(Vec<i8>),
    I16(Vec<i16>),
    I32(Vec<i32>),
    I64(Vec<i64>),
    Big(Vec<BigInt>),
}

impl PointValues {
    pub fn len(&self) -> usize {
        match self {
            PointValues::I8(v) => v.len(),
            PointValues::I16(v) => v.len(),
            PointValues::I32(v) => v.len(),
            PointValues::I64(v) => v.len(),
            PointValues::Big(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, i: usize) -> BigInt {
        match self {
            PointValues::I8(v) => v[i].into(),
            PointValues::I16(v) => v[i].into(),
            PointValues::I32(v) => v[i].into(),
            PointValues::I64(v) => v[i].into(),
            PointValues::Big(v) => v[i].clone(),
        }
    }

    /// The value as `i64`, if it fits.
    pub fn get_i64(&self, i: usize) -> Option<i64> {
        match self {
            PointValues::I8(v) => Some(v[i] as i64),
            PointValues::I16(v) => Some(v[i] as i64),
            PointValues::I32(v) => Some(v[i] as i64),
            PointValues::I64(v) => Some(v[i]),
            PointValues::Big(v) => v[i].to_i64(),
        }
    }

    pub fn to_vec(&self) -> Vec<BigInt> {
        (0..self.len()).map(|i| self.get(i)).collect()
    }
}

/// A predicate on the integers of `[lo, hi]`, stored as a lookup table.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymFunction {
    lo: i64,
    hi: i64,
    table: Vec<bool>,
}

impl SymFunction {
    pub fn new(lo: i64, table: Vec<bool>) -> Self {
        assert!(!table.is_empty(), "empty symmetric-function table");
        let hi = lo + table.len() as i64 - 1;
        SymFunction { lo, hi, table }
    }

    pub fn from_predicate(lo: i64, hi: i64, f: impl Fn(i64) -> bool) -> Self {
        assert!(hi >= lo, "empty interval [{lo}, {hi}]");
        SymFunction { lo, hi, table: (lo..=hi).map(f).collect() }
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    pub fn table(&self) -> &[bool] {
        &self.table
    }

    pub fn eval(&self, v: i64) -> Option<bool> {
        if v < self.lo || v > self.hi {
            return None;
        }
        Some(self.table[(v - self.lo) as usize])
    }

    pub fn complement(&self) -> Self {
        SymFunction { table: self.table.iter().map(|b| !b).collect(), ..self.clone() }
    }
}

/// Truth table of `g ∘ h` over all points of `h`'s cube.
pub fn compose_eval_all(g: &SymFunction, h: &MultilinearPoly) -> Result<TruthTable> {
    compose_eval_all_counted(g, h, DEFAULT_POINT_CAP).map(|(t, _)| t)
}

/// As `compose_eval_all`, also returning the coefficient-to-point operation count.
pub fn compose_eval_all_counted(
    g: &SymFunction,
    h: &MultilinearPoly,
    cap: usize,
) -> Result<(TruthTable, u64)> {
    let (values, ops) = h.coefficient_to_point_counted(cap)?;
    let n = h.n_vars();
    let mut table = TruthTable::zeros(n);
    for i in 0..values.len() {
        let bit = values.get_i64(i).and_then(|v| g.eval(v));
        match bit {
            Some(true) => table.set(i, true),
            Some(false) => {}
            None => {
                return Err(Error::Range {
                    point: bits_to_string(&index_to_assignment(n, i)),
                    value: values.get(i).to_string(),
                    lo: g.lo,
                    hi: g.hi,
                })
            }
        }
    }
    Ok((table, ops))
}

/// Text form: a `poly n=<n>` header, then one `coeff mask-hex` line per monomial.
pub fn format_poly(p: &MultilinearPoly) -> String {
    let mut out = format!("poly n={}\n", p.n_vars);
    for (m, c) in p.terms() {
        let _ = writeln!(out, "{c} {m:x}");
    }
    out
}

pub fn parse_poly(text: &str) -> Result<MultilinearPoly> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let syntax = |line: usize, message: String| Error::Syntax { line: line + 1, column: 1, message };
    let (hl, header) = lines.next().ok_or_else(|| syntax(0, "missing 'poly n=' header".into()))?;
    let n: usize = header
        .trim()
        .strip_prefix("poly n=")
        .and_then(|s| s.parse().ok())
        .filter(|&n| n <= MAX_VARS)
        .ok_or_else(|| syntax(hl, format!("bad header '{header}'")))?;
    let mut p = MultilinearPoly::zero(n);
    for (ln, line) in lines {
        let mut parts = line.split_whitespace();
        let (Some(c), Some(m), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(syntax(ln, format!("expected 'coeff mask', found '{line}'")));
        };
        let c: BigInt = c.parse().map_err(|_| syntax(ln, format!("bad coefficient '{c}'")))?;
        let m = u64::from_str_radix(m, 16).map_err(|_| syntax(ln, format!("bad mask '{m}'")))?;
        if n < MAX_VARS && m >> n != 0 {
            return Err(syntax(ln, format!("mask {m:x} uses variables beyond n={n}")));
        }
        p.add_term(m, c);
    }
    Ok(p)
}
