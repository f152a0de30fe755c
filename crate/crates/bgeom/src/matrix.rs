//! Exact linear algebra over the rationals: bilinear forms, dense solves,
//! definiteness tests and signatures by symmetric congruence.

use num_traits::Zero;

use crate::rat::Rat;

/// Evaluates the bilinear form `aᵀ G b`.
pub fn form(gram: &[Vec<Rat>], a: &[Rat], b: &[Rat]) -> Rat {
    let mut acc = Rat::zero();
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        let row = &gram[i];
        for (j, bj) in b.iter().enumerate() {
            if bj.is_zero() || row[j].is_zero() {
                continue;
            }
            acc += ai * &row[j] * bj;
        }
    }
    acc
}

pub fn is_symmetric(m: &[Vec<Rat>]) -> bool {
    let n = m.len();
    if m.iter().any(|row| row.len() != n) {
        return false;
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if m[i][j] != m[j][i] {
                return false;
            }
        }
    }
    true
}

/// Solves the square system `A x = b` by Gaussian elimination.
/// Returns `None` when `A` is singular.
pub fn solve(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let n = a.len();
    debug_assert!(a.iter().all(|r| r.len() == n) && b.len() == n);
    let mut m: Vec<Vec<Rat>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();

    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        let inv = m[col][col].recip();
        for j in col..=n {
            m[col][j] = &m[col][j] * &inv;
        }
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].clone();
            for j in col..=n {
                let delta = &factor * &m[col][j];
                m[r][j] = &m[r][j] - &delta;
            }
        }
    }
    Some(m.into_iter().map(|row| row[n].clone()).collect())
}

/// Solves `Σ xⱼ colsⱼ = v` for a full-column-rank set of columns.
/// Returns `None` when the system is inconsistent or the columns are
/// linearly dependent.
pub fn solve_in_span(cols: &[Vec<Rat>], v: &[Rat]) -> Option<Vec<Rat>> {
    let rows = v.len();
    let k = cols.len();
    debug_assert!(cols.iter().all(|c| c.len() == rows));
    let mut m: Vec<Vec<Rat>> = (0..rows)
        .map(|i| {
            let mut row: Vec<Rat> = cols.iter().map(|c| c[i].clone()).collect();
            row.push(v[i].clone());
            row
        })
        .collect();

    let mut pivot_rows = Vec::with_capacity(k);
    let mut next_row = 0;
    for col in 0..k {
        let pivot = (next_row..rows).find(|&r| !m[r][col].is_zero())?;
        m.swap(next_row, pivot);
        let inv = m[next_row][col].recip();
        for j in col..=k {
            m[next_row][j] = &m[next_row][j] * &inv;
        }
        for r in 0..rows {
            if r == next_row || m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].clone();
            for j in col..=k {
                let delta = &factor * &m[next_row][j];
                m[r][j] = &m[r][j] - &delta;
            }
        }
        pivot_rows.push(next_row);
        next_row += 1;
    }
    // Any nonzero residue in the remaining rows means v is outside the span.
    for r in next_row..rows {
        if !m[r][k].is_zero() {
            return None;
        }
    }
    Some(pivot_rows.iter().map(|&r| m[r][k].clone()).collect())
}

/// Tests negative definiteness via in-order LDLᵀ pivots: all pivots must
/// exist and be negative. A zero or nonnegative pivot disqualifies.
pub fn is_negative_definite(m: &[Vec<Rat>]) -> bool {
    let n = m.len();
    let mut a: Vec<Vec<Rat>> = m.to_vec();
    for k in 0..n {
        if !(a[k][k] < Rat::zero()) {
            return false;
        }
        for i in (k + 1)..n {
            if a[i][k].is_zero() {
                continue;
            }
            let factor = &a[i][k] / &a[k][k];
            for j in k..n {
                let delta = &factor * &a[k][j];
                a[i][j] = &a[i][j] - &delta;
            }
        }
    }
    true
}

/// Signature `(n₊, n₋, n₀)` of a symmetric matrix, computed exactly by
/// symmetric congruence diagonalization. When the remaining block has a
/// zero diagonal but a nonzero entry `m[i][j]`, the congruence
/// `row_i += row_j; col_i += col_j` produces the pivot `2 m[i][j]`.
pub fn signature(m: &[Vec<Rat>]) -> (usize, usize, usize) {
    let n = m.len();
    debug_assert!(is_symmetric(m));
    let mut a: Vec<Vec<Rat>> = m.to_vec();
    let (mut pos, mut neg) = (0usize, 0usize);
    let mut k = 0;
    while k < n {
        if a[k][k].is_zero() {
            match (k..n).find(|&i| !a[i][i].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    for row in a.iter_mut() {
                        row.swap(k, i);
                    }
                }
                None => {
                    // Fully zero diagonal: look for an off-diagonal entry.
                    let mut found = None;
                    'scan: for i in k..n {
                        for j in (i + 1)..n {
                            if !a[i][j].is_zero() {
                                found = Some((i, j));
                                break 'scan;
                            }
                        }
                    }
                    let Some((i, j)) = found else { break };
                    for col in 0..n {
                        let v = a[j][col].clone();
                        a[i][col] += v;
                    }
                    for row in a.iter_mut() {
                        let v = row[j].clone();
                        row[i] += v;
                    }
                    a.swap(k, i);
                    for row in a.iter_mut() {
                        row.swap(k, i);
                    }
                }
            }
        }
        if a[k][k].is_zero() {
            break;
        }
        if a[k][k] > Rat::zero() {
            pos += 1;
        } else {
            neg += 1;
        }
        for i in (k + 1)..n {
            if a[i][k].is_zero() {
                continue;
            }
            let factor = &a[i][k] / &a[k][k];
            for col in 0..n {
                let delta = &factor * &a[k][col];
                a[i][col] = &a[i][col] - &delta;
            }
            for row in a.iter_mut().skip(k) {
                let delta = &factor * &row[k];
                row[i] = &row[i] - &delta;
            }
        }
        k += 1;
    }
    (pos, neg, n - pos - neg)
}

/// Incremental row space over ℚ; used to pick maximal independent subsets.
#[derive(Default)]
pub struct RowSpace {
    rows: Vec<Vec<Rat>>,
    pivots: Vec<usize>,
}

impl RowSpace {
    pub fn new() -> Self {
        Self::default()
    }

    /// Reduces `v` against the stored rows; inserts it and returns `true`
    /// when it is independent of the current span.
    pub fn insert(&mut self, v: &[Rat]) -> bool {
        let mut v = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v[p].is_zero() {
                continue;
            }
            let factor = v[p].clone();
            for (x, y) in v.iter_mut().zip(row) {
                let delta = &factor * y;
                *x = &*x - &delta;
            }
        }
        match v.iter().position(|x| !x.is_zero()) {
            None => false,
            Some(p) => {
                let inv = v[p].recip();
                for x in v.iter_mut() {
                    *x = &*x * &inv;
                }
                self.rows.push(v);
                self.pivots.push(p);
                true
            }
        }
    }
}
