//! Coset enumeration over the trivial subgroup (HLT strategy).
//!
//! Cosets are numbered from 1; 0 marks an undefined table entry. Coset 1 is
//! the subgroup itself. Coincidences are resolved eagerly through a
//! union-find with a queue of dead cosets whose rows still need merging.

use std::time::{Duration, Instant};

use crate::presentation::Presentation;

const UNDEF: u32 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Finite(usize),
    Exceeded(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumerationResult {
    pub outcome: Outcome,
    pub cosets_defined: usize,
    pub wall_time: Duration,
}

impl EnumerationResult {
    pub fn order(&self) -> Option<usize> {
        match self.outcome {
            Outcome::Finite(n) => Some(n),
            Outcome::Exceeded(_) => None,
        }
    }
}

struct BudgetExceeded;

/// Partial right-multiplication table. Columns are indexed by letter code,
/// so column `c ^ 1` is the inverse of column `c`.
pub struct CosetTable {
    cols: usize,
    table: Vec<u32>,
    parent: Vec<u32>,
    defined: usize,
    max_cosets: usize,
    queue: Vec<u32>,
}

impl CosetTable {
    pub fn new(rank: usize, max_cosets: usize) -> CosetTable {
        let cols = 2 * rank;
        CosetTable {
            cols,
            table: vec![UNDEF; cols * 2],
            parent: vec![0, 1],
            defined: 1,
            max_cosets: max_cosets.max(1),
            queue: Vec::new(),
        }
    }

    #[inline]
    fn get(&self, c: u32, x: usize) -> u32 {
        self.table[c as usize * self.cols + x]
    }

    #[inline]
    fn set(&mut self, c: u32, x: usize, d: u32) {
        self.table[c as usize * self.cols + x] = d;
    }

    pub fn is_live(&self, c: u32) -> bool {
        self.parent[c as usize] == c
    }

    pub fn cosets_defined(&self) -> usize {
        self.defined
    }

    fn define(&mut self, c: u32, x: usize) -> Result<(), BudgetExceeded> {
        if self.defined >= self.max_cosets {
            return Err(BudgetExceeded);
        }
        self.defined += 1;
        let d = self.defined as u32;
        self.parent.push(d);
        self.table.resize(self.table.len() + self.cols, UNDEF);
        self.set(c, x, d);
        self.set(d, x ^ 1, c);
        Ok(())
    }

    fn rep(&mut self, c: u32) -> u32 {
        let mut root = c;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        let mut k = c;
        while self.parent[k as usize] != root {
            let next = self.parent[k as usize];
            self.parent[k as usize] = root;
            k = next;
        }
        root
    }

    fn merge(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.rep(a), self.rep(b));
        if ra != rb {
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.parent[hi as usize] = lo;
            self.queue.push(hi);
        }
    }

    fn coincidence(&mut self, a: u32, b: u32) {
        self.queue.clear();
        self.merge(a, b);
        let mut i = 0;
        while i < self.queue.len() {
            let dead = self.queue[i];
            i += 1;
            for x in 0..self.cols {
                let d = self.get(dead, x);
                if d == UNDEF {
                    continue;
                }
                self.set(d, x ^ 1, UNDEF);
                let mu = self.rep(dead);
                let nu = self.rep(d);
                let mu_x = self.get(mu, x);
                if mu_x != UNDEF {
                    self.merge(nu, mu_x);
                } else {
                    let nu_inv = self.get(nu, x ^ 1);
                    if nu_inv != UNDEF {
                        self.merge(mu, nu_inv);
                    } else {
                        self.set(mu, x, nu);
                        self.set(nu, x ^ 1, mu);
                    }
                }
            }
        }
    }

    /// Traces `word` from `coset` forwards and backwards, defining cosets to
    /// close the gap and recording the deduction or coincidence it implies.
    fn scan_and_fill(&mut self, coset: u32, word: &[usize]) -> Result<(), BudgetExceeded> {
        if word.is_empty() {
            return Ok(());
        }
        let mut f = coset;
        let mut b = coset;
        let mut i = 0usize;
        let mut j = word.len() as isize - 1;
        loop {
            while (i as isize) <= j && self.get(f, word[i]) != UNDEF {
                f = self.get(f, word[i]);
                i += 1;
            }
            if i as isize > j {
                if f != b {
                    self.coincidence(f, b);
                }
                return Ok(());
            }
            while j >= i as isize && self.get(b, word[j as usize] ^ 1) != UNDEF {
                b = self.get(b, word[j as usize] ^ 1);
                j -= 1;
            }
            if j < i as isize {
                self.coincidence(f, b);
                return Ok(());
            }
            if i as isize == j {
                self.set(f, word[i], b);
                self.set(b, word[i] ^ 1, f);
                return Ok(());
            }
            self.define(f, word[i])?;
        }
    }

    fn run(&mut self, relators: &[Vec<usize>]) -> Result<(), BudgetExceeded> {
        let mut c: u32 = 1;
        while c as usize <= self.defined {
            if self.is_live(c) {
                for r in relators {
                    self.scan_and_fill(c, r)?;
                    if !self.is_live(c) {
                        break;
                    }
                }
                if self.is_live(c) {
                    for x in 0..self.cols {
                        if self.get(c, x) == UNDEF {
                            self.define(c, x)?;
                        }
                    }
                }
            }
            c += 1;
        }
        Ok(())
    }

    pub fn live_cosets(&self) -> Vec<u32> {
        (1..=self.defined as u32).filter(|&c| self.is_live(c)).collect()
    }

    /// For each generator, its action on live cosets as a map from index
    /// into [`CosetTable::live_cosets`] to index. `None` where undefined.
    pub fn generator_actions(&self) -> Vec<Vec<Option<usize>>> {
        let live = self.live_cosets();
        let index = |c: u32| live.binary_search(&c).ok();
        (0..self.cols / 2)
            .map(|g| {
                live.iter()
                    .map(|&c| match self.get(c, 2 * g) {
                        UNDEF => None,
                        d => index(d),
                    })
                    .collect()
            })
            .collect()
    }

    /// Every live entry defined, pointing at a live coset, with the inverse
    /// entry pointing back.
    pub fn is_complete_and_consistent(&self) -> bool {
        self.live_cosets().iter().all(|&c| {
            (0..self.cols).all(|x| {
                let d = self.get(c, x);
                d != UNDEF && self.is_live(d) && self.get(d, x ^ 1) == c
            })
        })
    }
}

fn relator_columns(p: &Presentation) -> Vec<Vec<usize>> {
    p.relators()
        .iter()
        .map(|w| w.letters().iter().map(|l| l.code() as usize).collect())
        .collect()
}

/// Enumerates cosets of the trivial subgroup, returning the table alongside
/// the result.
pub fn enumerate_with_table(p: &Presentation, max_cosets: usize) -> (EnumerationResult, CosetTable) {
    let start = Instant::now();
    let mut table = CosetTable::new(p.rank(), max_cosets);
    let relators = relator_columns(p);
    let outcome = match table.run(&relators) {
        Ok(()) => Outcome::Finite(table.live_cosets().len()),
        Err(BudgetExceeded) => Outcome::Exceeded(max_cosets),
    };
    let result = EnumerationResult {
        outcome,
        cosets_defined: table.cosets_defined(),
        wall_time: start.elapsed(),
    };
    (result, table)
}

pub fn enumerate_cosets(p: &Presentation, max_cosets: usize) -> EnumerationResult {
    enumerate_with_table(p, max_cosets).0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order(s: &str) -> Outcome {
        enumerate_cosets(&s.parse().unwrap(), 10_000).outcome
    }

    #[test]
    fn small_groups() {
        assert_eq!(order("x y"), Outcome::Finite(1));
        assert_eq!(order("xxx y"), Outcome::Finite(3));
        assert_eq!(order("xy xxxxx"), Outcome::Finite(5));
        // quaternion group
        assert_eq!(order("xyxY yxyX"), Outcome::Finite(8));
        assert_eq!(order("xxYYY xyxYXY"), Outcome::Finite(1));
    }

    #[test]
    fn binary_icosahedral() {
        let r = enumerate_cosets(&"yxyXX xyxYYYY".parse().unwrap(), 10_000);
        assert_eq!(r.outcome, Outcome::Finite(120));
    }

    #[test]
    fn infinite_group_exceeds_budget() {
        let r = enumerate_cosets(&"xyXY 1".parse().unwrap(), 500);
        assert_eq!(r.outcome, Outcome::Exceeded(500));
        assert_eq!(r.cosets_defined, 500);
    }

    #[test]
    fn closed_table_is_a_permutation_action() {
        let (r, table) = enumerate_with_table(&"yxyXX xyxYYYY".parse().unwrap(), 10_000);
        assert_eq!(r.order(), Some(120));
        assert!(table.is_complete_and_consistent());
        for action in table.generator_actions() {
            let mut image: Vec<usize> = action.into_iter().map(Option::unwrap).collect();
            image.sort_unstable();
            assert_eq!(image, (0..120).collect::<Vec<_>>());
        }
    }

    #[test]
    fn deterministic() {
        let p: Presentation = "yxyXX xyxYYYY".parse().unwrap();
        let a = enumerate_cosets(&p, 10_000);
        let b = enumerate_cosets(&p, 10_000);
        assert_eq!((a.outcome, a.cosets_defined), (b.outcome, b.cosets_defined));
    }
}
