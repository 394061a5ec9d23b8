//! Exhaustive-enumeration ground truth.
//!
//! Every routine walks the cube in table-index order, 64 assignments per
//! batched evaluation, and reduces with order-respecting combinators so the
//! result does not depend on how rayon partitions the work.

use rayon::prelude::*;

use crate::circuit::{input_words, Circuit, DEFAULT_TABLE_CAP};
use crate::error::{Error, Result};
use crate::truthtable::index_to_assignment;

fn check_cap(c: &Circuit, cap: usize) -> Result<()> {
    if c.n_inputs() > cap {
        return Err(Error::ResourceLimit { what: "input count", value: c.n_inputs(), cap });
    }
    Ok(())
}

fn lane_mask(n: usize) -> u64 {
    if n >= 6 {
        !0
    } else {
        (1u64 << (1u32 << n)) - 1
    }
}

fn word_count(n: usize) -> usize {
    (1usize << n).div_ceil(64)
}

/// Output word for table indices `64 * w ..`, with lanes past `2^n` cleared.
fn output_word(c: &Circuit, w: usize) -> u64 {
    c.eval_words(&input_words(c.n_inputs(), w * 64)) & lane_mask(c.n_inputs())
}

/// Lexicographically least satisfying assignment.
pub fn brute_sat(c: &Circuit) -> Result<Option<Vec<bool>>> {
    brute_sat_capped(c, DEFAULT_TABLE_CAP)
}

pub fn brute_sat_capped(c: &Circuit, cap: usize) -> Result<Option<Vec<bool>>> {
    check_cap(c, cap)?;
    let n = c.n_inputs();
    let hit = (0..word_count(n))
        .into_par_iter()
        .with_min_len(64)
        .map(|w| (w, output_word(c, w)))
        .find_first(|&(_, word)| word != 0);
    Ok(hit.map(|(w, word)| index_to_assignment(n, w * 64 + word.trailing_zeros() as usize)))
}

/// Number of satisfying assignments.
pub fn brute_count(c: &Circuit) -> Result<u64> {
    brute_count_capped(c, DEFAULT_TABLE_CAP)
}

pub fn brute_count_capped(c: &Circuit, cap: usize) -> Result<u64> {
    check_cap(c, cap)?;
    Ok((0..word_count(c.n_inputs()))
        .into_par_iter()
        .with_min_len(64)
        .map(|w| output_word(c, w).count_ones() as u64)
        .sum())
}

/// Least assignment on which the two circuits differ.
pub fn brute_equiv(a: &Circuit, b: &Circuit) -> Result<Option<Vec<bool>>> {
    brute_equiv_capped(a, b, DEFAULT_TABLE_CAP)
}

pub fn brute_equiv_capped(a: &Circuit, b: &Circuit, cap: usize) -> Result<Option<Vec<bool>>> {
    if a.n_inputs() != b.n_inputs() {
        return Err(Error::InputArity { expected: a.n_inputs(), got: b.n_inputs() });
    }
    check_cap(a, cap)?;
    let n = a.n_inputs();
    let hit = (0..word_count(n))
        .into_par_iter()
        .with_min_len(64)
        .map(|w| (w, output_word(a, w) ^ output_word(b, w)))
        .find_first(|&(_, diff)| diff != 0);
    Ok(hit.map(|(w, diff)| index_to_assignment(n, w * 64 + diff.trailing_zeros() as usize)))
}

/// Cost of exhaustive search in gate evaluations: every gate on every point.
pub fn brute_gate_evals(c: &Circuit) -> u128 {
    c.size() as u128 * (1u128 << c.n_inputs())
}
