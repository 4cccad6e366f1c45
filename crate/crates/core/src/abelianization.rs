//! Abelian invariants of a presentation from its exponent-sum matrix.

use std::fmt;

use crate::presentation::Presentation;

/// Dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> IntMatrix {
        IntMatrix {
            rows,
            cols,
            entries: vec![0; rows * cols],
        }
    }

    /// Panics if the rows are ragged.
    pub fn from_rows(rows: &[Vec<i64>]) -> IntMatrix {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix");
        IntMatrix {
            rows: rows.len(),
            cols,
            entries: rows.concat(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: i64) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        self.entries.chunks(self.cols.max(1)).map(<[i64]>::to_vec).collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.entries.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for r in 0..self.rows {
                self.entries.swap(r * self.cols + a, r * self.cols + b);
            }
        }
    }

    /// row[dst] -= k * row[src]
    fn sub_row(&mut self, dst: usize, src: usize, k: i64) {
        for c in 0..self.cols {
            let v = self.get(src, c);
            self.entries[dst * self.cols + c] -= k * v;
        }
    }

    fn sub_col(&mut self, dst: usize, src: usize, k: i64) {
        for r in 0..self.rows {
            let v = self.get(r, src);
            self.entries[r * self.cols + dst] -= k * v;
        }
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_rows())
    }
}

/// Row `i`, column `g`: exponent sum of generator `g` in relator `i`.
pub fn relation_matrix(p: &Presentation) -> IntMatrix {
    let n = p.rank();
    let mut m = IntMatrix::zeros(n, n);
    for (i, w) in p.relators().iter().enumerate() {
        for l in w.letters() {
            let c = l.generator() - 1;
            m.set(i, c, m.get(i, c) + l.sign());
        }
    }
    m
}

/// Invariant factors `d1 | d2 | ...`, `min(rows, cols)` of them, zeros last.
///
/// Elementary row and column operations, always pivoting on the smallest
/// nonzero absolute value in the remaining block.
pub fn smith_normal_form(m: &IntMatrix) -> Vec<i64> {
    let mut a = m.clone();
    let n = a.rows.min(a.cols);
    let mut diag = Vec::with_capacity(n);
    for t in 0..n {
        loop {
            let pivot = (t..a.rows)
                .flat_map(|r| (t..a.cols).map(move |c| (r, c)))
                .filter(|&(r, c)| a.get(r, c) != 0)
                .min_by_key(|&(r, c)| a.get(r, c).abs());
            let Some((pr, pc)) = pivot else {
                diag.resize(n, 0);
                return finish(diag);
            };
            a.swap_rows(t, pr);
            a.swap_cols(t, pc);
            let p = a.get(t, t);
            let mut clean = true;
            for r in t + 1..a.rows {
                let q = a.get(r, t) / p;
                a.sub_row(r, t, q);
                clean &= a.get(r, t) == 0;
            }
            for c in t + 1..a.cols {
                let q = a.get(t, c) / p;
                a.sub_col(c, t, q);
                clean &= a.get(t, c) == 0;
            }
            if !clean {
                continue;
            }
            // p must divide the rest of the block; otherwise fold a row in
            let bad = (t + 1..a.rows)
                .find(|&r| (t + 1..a.cols).any(|c| a.get(r, c) % p != 0));
            match bad {
                Some(r) => {
                    for c in t..a.cols {
                        let v = a.get(r, c);
                        a.set(t, c, a.get(t, c) + v);
                    }
                }
                None => {
                    diag.push(p.abs());
                    break;
                }
            }
        }
    }
    finish(diag)
}

fn finish(mut diag: Vec<i64>) -> Vec<i64> {
    // nonzero factors already divide each other in order; keep zeros last
    diag.sort_by_key(|&d| (d == 0, d));
    diag
}

pub fn invariant_factors(p: &Presentation) -> Vec<i64> {
    smith_normal_form(&relation_matrix(p))
}

pub fn has_trivial_abelianization(p: &Presentation) -> bool {
    invariant_factors(p).iter().all(|&d| d == 1)
}

/// Determinant of a 2x2 exponent matrix, the fast path used by the census.
pub fn det2(m: &IntMatrix) -> i64 {
    assert!(m.rows == 2 && m.cols == 2);
    m.get(0, 0) * m.get(1, 1) - m.get(0, 1) * m.get(1, 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Presentation {
        s.parse().unwrap()
    }

    #[test]
    fn relation_matrix_examples() {
        assert_eq!(relation_matrix(&p("x y")).to_rows(), vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(
            relation_matrix(&p("xxYYY xyxYXY")).to_rows(),
            vec![vec![2, -3], vec![1, -1]]
        );
        assert_eq!(
            relation_matrix(&p("XyyxYYY YxxyXXX")).to_rows(),
            vec![vec![0, -1], vec![-1, 0]]
        );
    }

    #[test]
    fn snf_examples() {
        let m = |r: &[Vec<i64>]| IntMatrix::from_rows(r);
        assert_eq!(smith_normal_form(&m(&[vec![1, 0], vec![0, 1]])), vec![1, 1]);
        assert_eq!(smith_normal_form(&m(&[vec![2, 0], vec![0, 3]])), vec![1, 6]);
        assert_eq!(smith_normal_form(&m(&[vec![0, 0], vec![0, 0]])), vec![0, 0]);
        assert_eq!(smith_normal_form(&m(&[vec![2, 4], vec![6, 8]])), vec![2, 4]);
        assert_eq!(smith_normal_form(&m(&[vec![0, 3], vec![0, 0]])), vec![3, 0]);
        assert_eq!(
            smith_normal_form(&m(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]])),
            vec![2, 6, 12]
        );
        assert_eq!(smith_normal_form(&m(&[vec![4, 6, 0]])), vec![2]);
    }

    #[test]
    fn triviality_examples() {
        assert!(has_trivial_abelianization(&p("xxYYY xyxYXY")));
        assert!(has_trivial_abelianization(&p("XyyxYYY YxxyXXX")));
        assert!(!has_trivial_abelianization(&p("xx y")));
        assert_eq!(invariant_factors(&p("xx y")), vec![1, 2]);
        assert_eq!(det2(&relation_matrix(&p("xxYYY xyxYXY"))), 1);
    }
}
