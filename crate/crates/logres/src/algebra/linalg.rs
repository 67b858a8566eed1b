use num_traits::Zero;

use super::poly::Rat;

/// Rank of a rational matrix given as rows, by exact Gaussian elimination.
pub fn rank(rows: &[Vec<Rat>]) -> usize {
    let mut basis: Vec<Vec<Rat>> = Vec::new();
    for row in rows {
        if let Some(reduced) = reduce_against(row.clone(), &basis) {
            basis.push(reduced);
        }
    }
    basis.len()
}

/// Indices of a maximal linearly independent subset of the rows, in order.
pub fn independent_rows(rows: &[Vec<Rat>]) -> Vec<usize> {
    let mut basis: Vec<Vec<Rat>> = Vec::new();
    let mut picked = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        if let Some(reduced) = reduce_against(row.clone(), &basis) {
            basis.push(reduced);
            picked.push(i);
        }
    }
    picked
}

/// Reduces `row` against the echelon `basis`; `None` when it reduces to zero.
fn reduce_against(mut row: Vec<Rat>, basis: &[Vec<Rat>]) -> Option<Vec<Rat>> {
    for b in basis {
        let pivot = b.iter().position(|x| !x.is_zero()).unwrap();
        if !row[pivot].is_zero() {
            let f = &row[pivot] / &b[pivot];
            for (r, bv) in row.iter_mut().zip(b) {
                *r -= &f * bv;
            }
        }
    }
    if row.iter().all(|x| x.is_zero()) {
        None
    } else {
        Some(row)
    }
}

/// Solves the square system `m x = b` when `m` is invertible.
pub fn solve_square(m: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let n = m.len();
    let mut aug: Vec<Vec<Rat>> = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !aug[r][col].is_zero())?;
        aug.swap(col, pivot);
        let p = aug[col][col].clone();
        for x in aug[col].iter_mut() {
            *x /= &p;
        }
        for r in 0..n {
            if r != col && !aug[r][col].is_zero() {
                let f = aug[r][col].clone();
                for c in col..=n {
                    let v = &f * &aug[col][c];
                    aug[r][c] -= v;
                }
            }
        }
    }
    Some(aug.into_iter().map(|row| row[n].clone()).collect())
}

/// Any solution of `a x = b`, with free variables set to zero.
/// `None` when the system is inconsistent.
pub fn solve(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    if a.is_empty() {
        return if b.iter().all(|x| x.is_zero()) {
            Some(Vec::new())
        } else {
            None
        };
    }
    let n = a[0].len();
    let mut aug: Vec<Vec<Rat>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..aug.len()).find(|&r| !aug[r][col].is_zero()) else {
            continue;
        };
        aug.swap(row, p);
        let pv = aug[row][col].clone();
        for x in aug[row].iter_mut() {
            *x /= &pv;
        }
        for r in 0..aug.len() {
            if r != row && !aug[r][col].is_zero() {
                let f = aug[r][col].clone();
                for c in col..=n {
                    let v = &f * &aug[row][c];
                    aug[r][c] -= v;
                }
            }
        }
        pivots.push((row, col));
        row += 1;
        if row == aug.len() {
            break;
        }
    }
    for r in aug.iter().skip(row) {
        if !r[n].is_zero() {
            return None;
        }
    }
    let mut x = vec![Rat::zero(); n];
    for (r, c) in pivots {
        x[c] = aug[r][n].clone();
    }
    Some(x)
}

/// The least Euclidean norm solution of `a x = b`, or `None` when the
/// system is inconsistent. Computed from a maximal independent row subset
/// `B` as `x = Bᵀ y` with `(B Bᵀ) y = b_B`, then checked against every row.
pub fn least_norm_solution(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    assert_eq!(a.len(), b.len());
    if a.is_empty() {
        return Some(Vec::new());
    }
    let n = a[0].len();
    let idx = independent_rows(a);
    if idx.is_empty() {
        return if b.iter().all(|x| x.is_zero()) {
            Some(vec![Rat::zero(); n])
        } else {
            None
        };
    }
    let bmat: Vec<&Vec<Rat>> = idx.iter().map(|&i| &a[i]).collect();
    let rhs: Vec<Rat> = idx.iter().map(|&i| b[i].clone()).collect();
    let gram: Vec<Vec<Rat>> = bmat
        .iter()
        .map(|r1| {
            bmat.iter()
                .map(|r2| r1.iter().zip(r2.iter()).map(|(x, y)| x * y).sum())
                .collect()
        })
        .collect();
    let y = solve_square(&gram, &rhs)?;
    let mut x = vec![Rat::zero(); n];
    for (yi, row) in y.iter().zip(&bmat) {
        for (xj, rj) in x.iter_mut().zip(row.iter()) {
            *xj += yi * rj;
        }
    }
    for (row, bi) in a.iter().zip(b) {
        let dot: Rat = row.iter().zip(&x).map(|(r, v)| r * v).sum();
        if &dot != bi {
            return None;
        }
    }
    Some(x)
}
