//! The logarithmic Jacobian matrix of a morphism in an adapted chart, its
//! Fitting ideals, and the transformation law under blowups.
//!
//! Row `i` differentiates component `i`; the column of an exceptional
//! variable `u` carries `u * d/du`, the column of a free variable `v`
//! carries `d/dv`. The `k`-th Fitting ideal is generated by the minors of
//! order `n - k`.

use std::collections::HashMap;

use itertools::Itertools;

use crate::algebra::linalg;
use crate::algebra::poly::Rat;
use crate::algebra::{Monomial, Polynomial};
use crate::charts::Chart;
use crate::error::{Error, Result, Verdict};
use crate::ideal::{decide_staircase, MonomialIdeal};

/// The logarithmic Jacobian: one row per component, one column per variable.
#[derive(Debug, Clone)]
pub struct LogJacobian {
    pub entries: Vec<Vec<Polynomial>>,
    pub n_vars: usize,
}

pub fn log_jacobian(chart: &Chart) -> LogJacobian {
    let n = chart.n_vars();
    let entries = chart
        .components
        .iter()
        .map(|sigma| {
            (0..n)
                .map(|j| {
                    if chart.frame.exceptional[j] {
                        sigma.log_derivative(j)
                    } else {
                        sigma.derivative(j)
                    }
                })
                .collect()
        })
        .collect();
    LogJacobian { entries, n_vars: n }
}

impl LogJacobian {
    pub fn n_rows(&self) -> usize {
        self.entries.len()
    }

    /// Constant terms of every entry, as a rational matrix.
    pub fn at_origin(&self) -> Vec<Vec<Rat>> {
        self.entries
            .iter()
            .map(|row| row.iter().map(|p| p.constant_term()).collect())
            .collect()
    }
}

/// Minor evaluator with memoized cofactor expansion, keyed by the row and
/// column index sets as bitmasks.
pub struct MinorCache<'a> {
    jac: &'a LogJacobian,
    memo: HashMap<(u64, u64), Polynomial>,
}

impl<'a> MinorCache<'a> {
    pub fn new(jac: &'a LogJacobian) -> Self {
        MinorCache {
            jac,
            memo: HashMap::new(),
        }
    }

    /// Determinant of the submatrix selected by the two bitmasks, which
    /// must have equal popcount.
    pub fn minor(&mut self, rows: u64, cols: u64) -> Polynomial {
        debug_assert_eq!(rows.count_ones(), cols.count_ones());
        if rows == 0 {
            return Polynomial::one(self.jac.n_vars);
        }
        if let Some(p) = self.memo.get(&(rows, cols)) {
            return p.clone();
        }
        let r0 = rows.trailing_zeros() as usize;
        let rest_rows = rows & (rows - 1);
        let mut acc = Polynomial::zero(self.jac.n_vars);
        let mut sign_flip = false;
        for c in 0..64u32 {
            if cols & (1u64 << c) == 0 {
                continue;
            }
            let entry = &self.jac.entries[r0][c as usize];
            if !entry.is_zero() {
                let sub = self.minor(rest_rows, cols & !(1u64 << c));
                let term = entry.mul(&sub);
                acc = if sign_flip { acc.sub(&term) } else { acc.add(&term) };
            }
            sign_flip = !sign_flip;
        }
        self.memo.insert((rows, cols), acc.clone());
        acc
    }
}

/// Generators of the `k`-th Fitting ideal: all nonzero minors of order
/// `n - k`, in increasing bitmask order of the row and column sets.
pub fn fitting_ideal(chart: &Chart, k: usize) -> Result<Vec<Polynomial>> {
    let jac = log_jacobian(chart);
    fitting_from_jacobian(&jac, k)
}

pub fn fitting_from_jacobian(jac: &LogJacobian, k: usize) -> Result<Vec<Polynomial>> {
    let n = jac.n_vars;
    if k >= n {
        return Err(Error::Unsupported(format!(
            "fitting index {k} out of range for {n} variables"
        )));
    }
    if n > 64 || jac.n_rows() > 64 {
        return Err(Error::Unsupported("matrix too large for bitmask minors".into()));
    }
    let m = n - k;
    if m > jac.n_rows() {
        return Ok(Vec::new());
    }
    let mut cache = MinorCache::new(jac);
    let mut gens = Vec::new();
    for rows in (0..jac.n_rows()).combinations(m) {
        let row_mask = rows.iter().fold(0u64, |acc, &r| acc | (1 << r));
        for cols in (0..n).combinations(m) {
            let col_mask = cols.iter().fold(0u64, |acc, &c| acc | (1 << c));
            let minor = cache.minor(row_mask, col_mask);
            if !minor.is_zero() {
                gens.push(minor);
            }
        }
    }
    Ok(gens)
}

/// Rank of the logarithmic Jacobian at the chart origin.
pub fn log_rank_at_origin(chart: &Chart) -> usize {
    linalg::rank(&log_jacobian(chart).at_origin())
}

/// The staircase of a Fitting ideal, when it falls in the decidable
/// monomial fragment.
pub fn fitting_staircase(chart: &Chart, k: usize) -> Result<Option<MonomialIdeal>> {
    let gens = fitting_ideal(chart, k)?;
    Ok(decide_staircase(chart.n_vars(), &gens))
}

/// Checks the transformation law of Fitting ideals under one blowup.
///
/// For `k = 0` the law is `F_0(after) = exc^l * pullback(F_0(before))`
/// with `l` the number of free center coordinates. For `k > 0` it requires
/// a combinatorial blowup, where `F_k(after) = pullback(F_k(before))`.
/// Ideal comparison happens on staircases; when either side falls outside
/// the decidable monomial fragment the verdict is undecidable.
pub fn verify_fitting_transform(
    parent: &Chart,
    center: &[usize],
    chart_var: usize,
    k: usize,
) -> Result<Verdict> {
    parent.validate_center(center)?;
    if !center.contains(&chart_var) {
        return Err(Error::Internal("chart variable not in center".into()));
    }
    let l = center
        .iter()
        .filter(|&&i| !parent.frame.exceptional[i])
        .count();
    if k > 0 && l > 0 {
        return Err(Error::Unsupported(
            "the law for k > 0 applies to combinatorial blowups only".into(),
        ));
    }
    let children = parent.blowup(center)?;
    let child_pos = center.iter().position(|&c| c == chart_var).unwrap();
    let child = &children[child_pos];
    let n = parent.n_vars();

    let lhs = fitting_ideal(child, k)?;

    let subst = parent.blowup_substitution(center, chart_var);
    let mut rhs: Vec<Polynomial> = fitting_ideal(parent, k)?
        .iter()
        .map(|g| g.substitute(&subst))
        .collect();
    if k == 0 && l > 0 {
        let mut exc = Monomial::unit(n);
        exc.0[chart_var] = l as u32;
        rhs = rhs
            .iter()
            .map(|g| g.mul_monomial(&exc, &Rat::from_integer(1.into())))
            .collect();
    }

    let (Some(lhs_st), Some(rhs_st)) = (decide_staircase(n, &lhs), decide_staircase(n, &rhs))
    else {
        return Ok(Verdict::Undecidable(
            "a side of the transform law is not in the monomial fragment".into(),
        ));
    };
    if lhs_st == rhs_st {
        Ok(Verdict::Pass)
    } else {
        Ok(Verdict::Fail(format!(
            "staircases differ: after = {:?}, law = {:?}",
            lhs_st.gens(),
            rhs_st.gens()
        )))
    }
}
