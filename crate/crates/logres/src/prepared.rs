//! Prepared normal forms at one- and two-points of the exceptional divisor:
//! the shape checks on the Weierstrass coefficients, the companion ideals
//! `H` and `G` with the secondary blowup count `iota`, the contact ideal
//! `J`, and the declared divisor with its monomial ideal.


use crate::algebra::linalg;
use crate::algebra::poly::{rat_int, Order, Rat};
use crate::algebra::{Monomial, Polynomial};
use crate::error::{Error, Result};
use crate::ideal::{
    decide_staircase, maximal_power, monomial_times_unit, newton_principalize, MonomialIdeal,
    PRINCIPALIZATION_STEP_CAP,
};
use crate::invariants::Weier;

/// Kind of surface point, by the number of exceptional coordinates and,
/// at a one-point, whether the middle coefficients avoid the extra free
/// coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointKind {
    TwoPoint,
    OnePointGeneric,
    OnePointNonGeneric,
}

/// Data read off a prepared chart: the distinguished row of the
/// coefficient table, its exceptional exponent `beta`, and the monomial
/// content of each nonzero middle coefficient.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub kind: PointKind,
    /// Index into the coefficient rows (aligned with `weier.a`) of the
    /// component whose constant coefficient is exactly a monomial.
    pub i0: usize,
    /// Exceptional exponent of that constant coefficient.
    pub beta: Monomial,
    /// `monomials[i][j]` is the full monomial of `a[i][j]` for `j >= 1`
    /// when that coefficient is nonzero. Column `0` is always `None`.
    pub monomials: Vec<Vec<Option<Monomial>>>,
}

/// Outcome of the preparedness check, with the failing condition spelled
/// out when the chart is not prepared.
#[derive(Debug, Clone)]
pub enum PreparedCheck {
    Prepared(Prepared),
    NotPrepared { reason: String },
}

fn not_prepared(reason: impl Into<String>) -> Result<PreparedCheck> {
    Ok(PreparedCheck::NotPrepared {
        reason: reason.into(),
    })
}

/// Restriction of a monomial to the coordinates selected by `mask`.
fn masked(m: &Monomial, mask: &[bool]) -> Monomial {
    Monomial(
        m.0.iter()
            .zip(mask)
            .map(|(&e, &keep)| if keep { e } else { 0 })
            .collect(),
    )
}

fn supported_on(m: &Monomial, mask: &[bool]) -> bool {
    m.0.iter().zip(mask).all(|(&e, &keep)| keep || e == 0)
}

/// Checks the prepared normal form conditions on Weierstrass data at a
/// surface chart: every middle coefficient `a[i][j]`, `j >= 1`, is zero or
/// a monomial times a unit supported off the distinguished variable; some
/// constant coefficient is exactly a monomial of the required shape, with
/// minimal exceptional exponent `beta`; `u^beta` divides every constant
/// coefficient; and at a two-point the exponents `delta + beta` and
/// `alpha` are linearly independent.
pub fn check_prepared(w: &Weier) -> Result<PreparedCheck> {
    let chart = &w.prelim.chart;
    let n = chart.n_vars();
    if n != 3 {
        return Err(Error::Unsupported(
            "prepared forms are only checked on three-variable charts".into(),
        ));
    }
    let exc = chart.frame.exceptional_indices();
    let kind_base = match exc.len() {
        2 => PointKind::TwoPoint,
        1 => PointKind::OnePointGeneric,
        _ => {
            return Err(Error::Unsupported(
                "prepared forms need one or two exceptional coordinates".into(),
            ))
        }
    };
    let extra_free: Vec<usize> = chart
        .frame
        .free_indices()
        .into_iter()
        .filter(|&i| i != w.v_index)
        .collect();
    let mut coeff_mask = vec![false; n];
    for &e in &exc {
        coeff_mask[e] = true;
    }
    if kind_base != PointKind::TwoPoint {
        for &f in &extra_free {
            coeff_mask[f] = true;
        }
    }

    let d = w.d as usize;
    let mut monomials: Vec<Vec<Option<Monomial>>> = Vec::with_capacity(w.a.len());
    let mut nongeneric = false;
    for (i, row) in w.a.iter().enumerate() {
        let mut out = vec![None; d + 1];
        for (j, a) in row.iter().enumerate().take(d).skip(1) {
            if a.is_zero() {
                continue;
            }
            let Some(m) = monomial_times_unit(a) else {
                return not_prepared(format!(
                    "coefficient a[{i}][{j}] is not a monomial times a unit"
                ));
            };
            if !supported_on(&m, &coeff_mask) {
                return not_prepared(format!(
                    "coefficient a[{i}][{j}] involves a disallowed variable"
                ));
            }
            if kind_base != PointKind::TwoPoint
                && extra_free.iter().any(|&f| m.0[f] > 0)
            {
                nongeneric = true;
            }
            out[j] = Some(m);
        }
        monomials.push(out);
    }

    // The distinguished row: its constant coefficient must be exactly a
    // rational multiple of an exceptional monomial, times the extra free
    // coordinate at a one-point.
    let mut exc_mask = vec![false; n];
    for &e in &exc {
        exc_mask[e] = true;
    }
    let mut best: Option<(Monomial, usize)> = None;
    let mut any_nonzero = false;
    for (i, row) in w.a.iter().enumerate() {
        let a0 = &row[0];
        if a0.is_zero() {
            continue;
        }
        any_nonzero = true;
        let Some((m, _)) = a0.as_single_term() else {
            continue;
        };
        let shape_ok = supported_on(m, &coeff_mask)
            && match kind_base {
                PointKind::TwoPoint => true,
                _ => extra_free.len() == 1 && m.0[extra_free[0]] == 1,
            };
        if !shape_ok {
            continue;
        }
        let beta = masked(m, &exc_mask);
        let better = match &best {
            None => true,
            Some((b, _)) => beta < *b,
        };
        if better {
            best = Some((beta, i));
        }
    }
    if !any_nonzero {
        return Err(Error::Unsupported(
            "all constant coefficients vanish; the component ideal is a power of the distinguished variable".into(),
        ));
    }
    let Some((beta, i0)) = best else {
        return not_prepared("no constant coefficient is exactly a monomial of the required shape");
    };

    for (i, row) in w.a.iter().enumerate() {
        if !row[0].terms().all(|(m, _)| beta.divides(m)) {
            return not_prepared(format!(
                "u^beta does not divide the constant coefficient a[{i}][0]"
            ));
        }
    }

    let kind = match kind_base {
        PointKind::TwoPoint => {
            let alpha = &w.prelim.alpha;
            let shifted = w.prelim.delta.mul(&beta);
            let rows: Vec<Vec<Rat>> = [alpha, &shifted]
                .iter()
                .map(|m| {
                    exc.iter()
                        .map(|&e| Rat::from_integer(m.0[e].into()))
                        .collect()
                })
                .collect();
            if linalg::rank(&rows) != 2 {
                return not_prepared(
                    "delta + beta is linearly dependent on alpha over the exceptional coordinates",
                );
            }
            PointKind::TwoPoint
        }
        _ if nongeneric => PointKind::OnePointNonGeneric,
        _ => PointKind::OnePointGeneric,
    };

    Ok(PreparedCheck::Prepared(Prepared {
        kind,
        i0,
        beta,
        monomials,
    }))
}

/// Generators `H_i` of the companion ideal, one per coefficient row: the
/// coefficient of the log two-form `d(sigma_1) /\ d(u^delta a[i][0])` in
/// the exceptional log basis of the surface. Rows with vanishing constant
/// coefficient give zero.
pub fn h_generators(w: &Weier) -> Result<Vec<Polynomial>> {
    let chart = &w.prelim.chart;
    let n = chart.n_vars();
    let exc = chart.frame.exceptional_indices();
    let alpha = &w.prelim.alpha;
    let scale = Polynomial::term(n, alpha.clone(), w.prelim.alpha_coeff.clone());
    let mut out = Vec::with_capacity(w.a.len());
    for row in &w.a {
        let f = row[0].mul_monomial(&w.prelim.delta, &rat_int(1));
        let h = match exc.len() {
            2 => {
                let (e1, e2) = (exc[0], exc[1]);
                let a1 = Rat::from_integer(alpha.0[e1].into());
                let a2 = Rat::from_integer(alpha.0[e2].into());
                f.log_derivative(e2)
                    .scale(&a1)
                    .sub(&f.log_derivative(e1).scale(&a2))
            }
            1 => {
                let e = exc[0];
                let free: Vec<usize> = chart
                    .frame
                    .free_indices()
                    .into_iter()
                    .filter(|&i| i != w.v_index)
                    .collect();
                if free.len() != 1 {
                    return Err(Error::Unsupported(
                        "one-point companion ideal needs exactly one extra free coordinate".into(),
                    ));
                }
                f.derivative(free[0])
                    .scale(&Rat::from_integer(alpha.0[e].into()))
            }
            _ => {
                return Err(Error::Unsupported(
                    "companion ideal needs one or two exceptional coordinates".into(),
                ))
            }
        };
        out.push(scale.mul(&h));
    }
    Ok(out)
}

/// Generators of `G`: each `H_i` multiplied by the product of all nonzero
/// middle coefficients.
pub fn g_generators(w: &Weier) -> Result<Vec<Polynomial>> {
    let n = w.prelim.chart.n_vars();
    let mut product = Polynomial::one(n);
    for row in &w.a {
        for a in row.iter().take(w.d as usize).skip(1) {
            if !a.is_zero() {
                product = product.mul(a);
            }
        }
    }
    Ok(h_generators(w)?
        .into_iter()
        .map(|h| h.mul(&product))
        .collect())
}

/// Number of point blowups needed to principalize an ideal on the surface
/// cross-section, when the question is decidable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Iota {
    Rounds(usize),
    Undecidable(String),
}

/// Computes `iota` for polynomial generators on the surface: compares the
/// ideal against its staircase and, when they agree, counts the rounds of
/// Newton-polyhedron point blowups in the coordinates selected by
/// `allowed` until every chart is principal.
pub fn iota(n_vars: usize, gens: &[Polynomial], allowed: &[bool]) -> Result<Iota> {
    if gens.iter().all(|g| g.is_zero()) {
        return Ok(Iota::Undecidable(
            "the ideal is zero, so no blowup sequence principalizes it".into(),
        ));
    }
    let Some(ideal) = decide_staircase(n_vars, gens) else {
        return Ok(Iota::Undecidable(
            "a generator is not monomial times unit and escapes the staircase".into(),
        ));
    };
    let tree = newton_principalize(&ideal, allowed, PRINCIPALIZATION_STEP_CAP)?;
    Ok(Iota::Rounds(tree.rounds))
}

/// `iota` of the chart: the blowup count of `G` in the two coordinates of
/// the surface cross-section (every variable except the distinguished
/// one).
pub fn iota_of_weier(w: &Weier) -> Result<Iota> {
    let n = w.prelim.chart.n_vars();
    let mut allowed = vec![true; n];
    allowed[w.v_index] = false;
    iota(n, &g_generators(w)?, &allowed)
}

/// The contact ideal `J` at a one-point whose component order `mu` falls
/// below the contact degree `d`: the `d`-th power of the maximal ideal
/// plus, for each homogeneous part of degree `k` in `mu..d` of some `T_i`
/// with exceptional content `u^c`, the term `u^c * m^(k - c)`.
pub fn j_ideal(w: &Weier) -> Result<MonomialIdeal> {
    let chart = &w.prelim.chart;
    let n = chart.n_vars();
    let exc = chart.frame.exceptional_indices();
    if exc.len() != 1 {
        return Err(Error::Unsupported(
            "the contact ideal is defined at one-points".into(),
        ));
    }
    let e = exc[0];
    let mu = w
        .prelim
        .t
        .iter()
        .map(|t| t.order())
        .min()
        .unwrap_or(Order::Infinite);
    let Order::Finite(mu) = mu else {
        return Err(Error::Unsupported(
            "the component ideal vanishes; no contact ideal".into(),
        ));
    };
    if mu >= w.d {
        return Err(Error::Unsupported(
            "the component order is not below the contact degree".into(),
        ));
    }
    let all: Vec<usize> = (0..n).collect();
    let mut ideal = maximal_power(n, &all, w.d as u32);
    for t in &w.prelim.t {
        for k in mu..w.d {
            let part = t.homogeneous_part(k);
            if part.is_zero() {
                continue;
            }
            let c = part
                .terms()
                .map(|(m, _)| m.0[e])
                .min()
                .expect("nonzero part has terms");
            if c == 0 || u64::from(c) >= k {
                return Err(Error::Unsupported(
                    "a homogeneous part has exceptional content outside the expected range".into(),
                ));
            }
            let mut shift = Monomial::unit(n);
            shift.0[e] = c;
            ideal = ideal.sum(&maximal_power(n, &all, k as u32 - c).mul_monomial(&shift));
        }
    }
    Ok(ideal)
}

/// The declared divisor and monomial ideal of a prepared chart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Declared {
    /// Mask of the coordinates whose product cuts the declared divisor.
    pub divisor: Vec<bool>,
    pub ideal: MonomialIdeal,
}

/// Builds the declared data from a prepared chart: the divisor is the
/// exceptional locus together with the distinguished hypersurface (and the
/// extra free coordinate at a non-generic one-point); the ideal collects
/// `v^d`, each middle coefficient monomial times the matching power of
/// `v`, and the distinguished constant coefficient.
pub fn declared_ideal(w: &Weier, p: &Prepared) -> Result<Declared> {
    let chart = &w.prelim.chart;
    let n = chart.n_vars();
    let exc = chart.frame.exceptional_indices();
    let extra_free: Vec<usize> = chart
        .frame
        .free_indices()
        .into_iter()
        .filter(|&i| i != w.v_index)
        .collect();

    let mut divisor = vec![false; n];
    for &e in &exc {
        divisor[e] = true;
    }
    divisor[w.v_index] = true;
    if p.kind == PointKind::OnePointNonGeneric {
        for &f in &extra_free {
            divisor[f] = true;
        }
    }

    let mut gens = Vec::new();
    let mut vd = Monomial::unit(n);
    vd.0[w.v_index] = w.d as u32;
    gens.push(vd);
    for row in &p.monomials {
        for (j, m) in row.iter().enumerate() {
            if let Some(m) = m {
                let mut g = m.clone();
                g.0[w.v_index] += j as u32;
                gens.push(g);
            }
        }
    }
    let mut last = p.beta.clone();
    if p.kind == PointKind::OnePointNonGeneric {
        if extra_free.len() != 1 {
            return Err(Error::Unsupported(
                "non-generic declared ideal needs exactly one extra free coordinate".into(),
            ));
        }
        last.0[extra_free[0]] += 1;
    }
    gens.push(last);
    Ok(Declared {
        divisor,
        ideal: MonomialIdeal::from_gens(n, gens),
    })
}
