//! 3-CNF formulas and a complete DPLL solver.

use std::fmt;

/// A literal over 1-based variable `var`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit {
    pub var: u64,
    pub negated: bool,
}

impl Lit {
    pub fn pos(var: u64) -> Self {
        Lit { var, negated: false }
    }

    pub fn neg(var: u64) -> Self {
        Lit { var, negated: true }
    }

    pub fn holds(&self, assignment: &[bool]) -> bool {
        assignment[self.var as usize - 1] != self.negated
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "-{}", self.var)
        } else {
            write!(f, "{}", self.var)
        }
    }
}

pub type Clause = Vec<Lit>;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Formula3CNF {
    pub num_vars: u64,
    pub clauses: Vec<Clause>,
}

impl Formula3CNF {
    pub fn new(num_vars: u64, clauses: Vec<Clause>) -> Self {
        Formula3CNF { num_vars, clauses }
    }

    /// True when every clause has one to three literals over variables in `[1, num_vars]`.
    pub fn is_well_formed(&self) -> bool {
        self.clauses.iter().all(|c| {
            (1..=3).contains(&c.len()) && c.iter().all(|l| l.var >= 1 && l.var <= self.num_vars)
        })
    }

    /// Index of the first clause falsified by `assignment` (entry `v - 1` is variable `v`).
    pub fn first_violated(&self, assignment: &[bool]) -> Option<usize> {
        self.clauses.iter().position(|c| !c.iter().any(|l| l.holds(assignment)))
    }

    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        self.first_violated(assignment).is_none()
    }

    /// DIMACS-style text (`p cnf V C`, one zero-terminated clause per line).
    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                out.push_str(&l.to_string());
                out.push(' ');
            }
            out.push_str("0\n");
        }
        out
    }
}

/// Exhaustive search over all `2^V` assignments; returns the least model in
/// lexicographic order (variable 1 most significant).
pub fn brute_solve(f: &Formula3CNF) -> Option<Vec<bool>> {
    assert!(f.num_vars <= 24, "exhaustive search is limited to 24 variables");
    let v = f.num_vars as usize;
    (0..1u64 << v)
        .map(|i| (0..v).map(|j| (i >> (v - 1 - j)) & 1 == 1).collect::<Vec<bool>>())
        .find(|a| f.satisfied_by(a))
}

const UNASSIGNED: i8 = -1;

fn code(l: &Lit) -> usize {
    ((l.var as usize - 1) << 1) | l.negated as usize
}

/// DPLL with two watched literals and chronological backtracking.
pub struct Solver {
    num_vars: usize,
    clauses: Vec<Vec<usize>>,
    watches: Vec<Vec<usize>>,
    value: Vec<i8>,
    trail: Vec<usize>,
    levels: Vec<(usize, bool)>,
    order: Vec<usize>,
    qhead: usize,
    pub decisions: u64,
    pub propagations: u64,
}

impl Solver {
    pub fn new(f: &Formula3CNF) -> Self {
        let num_vars = f.num_vars as usize;
        let mut occurrences = vec![0usize; num_vars];
        let mut clauses = Vec::with_capacity(f.clauses.len());
        for c in &f.clauses {
            let mut lits: Vec<usize> = c.iter().map(code).collect();
            lits.sort_unstable();
            lits.dedup();
            if lits.windows(2).any(|w| w[0] ^ 1 == w[1]) {
                continue;
            }
            for &l in &lits {
                occurrences[l >> 1] += 1;
            }
            clauses.push(lits);
        }
        let mut order: Vec<usize> = (0..num_vars).collect();
        order.sort_by(|&a, &b| occurrences[b].cmp(&occurrences[a]).then(a.cmp(&b)));
        Solver {
            num_vars,
            clauses,
            watches: vec![Vec::new(); 2 * num_vars],
            value: vec![UNASSIGNED; num_vars],
            trail: Vec::new(),
            levels: Vec::new(),
            order,
            qhead: 0,
            decisions: 0,
            propagations: 0,
        }
    }

    fn lit_value(&self, l: usize) -> i8 {
        let v = self.value[l >> 1];
        if v == UNASSIGNED {
            UNASSIGNED
        } else {
            v ^ (l & 1) as i8
        }
    }

    fn assign(&mut self, l: usize) {
        self.value[l >> 1] = 1 ^ (l & 1) as i8;
        self.trail.push(l);
    }

    /// Returns false on conflict.
    fn propagate(&mut self) -> bool {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.propagations += 1;
            let false_lit = p ^ 1;
            let mut watchers = std::mem::take(&mut self.watches[false_lit]);
            let mut i = 0;
            let mut conflict = false;
            while i < watchers.len() {
                let ci = watchers[i];
                let clause = &mut self.clauses[ci];
                if clause[0] == false_lit {
                    clause.swap(0, 1);
                }
                let other = clause[0];
                if self.value[other >> 1] != UNASSIGNED && self.lit_value(other) == 1 {
                    i += 1;
                    continue;
                }
                let clause = &self.clauses[ci];
                let replacement = (2..clause.len()).find(|&k| self.lit_value(clause[k]) != 0);
                if let Some(k) = replacement {
                    let clause = &mut self.clauses[ci];
                    clause.swap(1, k);
                    let nw = clause[1];
                    self.watches[nw].push(ci);
                    watchers.swap_remove(i);
                    continue;
                }
                match self.lit_value(other) {
                    0 => {
                        conflict = true;
                        break;
                    }
                    UNASSIGNED => self.assign(other),
                    _ => {}
                }
                i += 1;
            }
            self.watches[false_lit] = watchers;
            if conflict {
                return false;
            }
        }
        true
    }

    fn backtrack_to(&mut self, len: usize) {
        while self.trail.len() > len {
            let l = self.trail.pop().unwrap();
            self.value[l >> 1] = UNASSIGNED;
        }
        self.qhead = len;
    }

    /// A model (entry `v - 1` is variable `v`) or `None` when unsatisfiable.
    pub fn solve(mut self) -> Option<Vec<bool>> {
        let mut units = Vec::new();
        for ci in 0..self.clauses.len() {
            match self.clauses[ci].len() {
                0 => return None,
                1 => units.push(self.clauses[ci][0]),
                _ => {
                    let (a, b) = (self.clauses[ci][0], self.clauses[ci][1]);
                    self.watches[a].push(ci);
                    self.watches[b].push(ci);
                }
            }
        }
        for u in units {
            match self.lit_value(u) {
                0 => return None,
                UNASSIGNED => self.assign(u),
                _ => {}
            }
        }
        let mut ok = self.propagate();
        loop {
            if !ok {
                // flip the most recent unflipped decision
                loop {
                    let (start, flipped) = self.levels.pop()?;
                    let decided = self.trail[start];
                    self.backtrack_to(start);
                    if !flipped {
                        self.levels.push((start, true));
                        self.assign(decided ^ 1);
                        break;
                    }
                }
                ok = self.propagate();
                continue;
            }
            let Some(&var) = self.order.iter().find(|&&v| self.value[v] == UNASSIGNED) else {
                return Some((0..self.num_vars).map(|v| self.value[v] == 1).collect());
            };
            self.decisions += 1;
            self.levels.push((self.trail.len(), false));
            // try false first
            self.assign((var << 1) | 1);
            ok = self.propagate();
        }
    }
}

pub fn solve(f: &Formula3CNF) -> Option<Vec<bool>> {
    Solver::new(f).solve()
}
