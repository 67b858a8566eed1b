//! Local invariants of the morphism at a chart origin: the residual order
//! `rho` of the next-to-smallest Fitting ideal along the stratum, the
//! contact degree `d` read off a monomial presentation of the components,
//! and the Weierstrass data underlying the prepared normal forms.

use num_traits::{One, Signed, Zero};

use crate::algebra::linalg;
use crate::algebra::poly::{Order, Rat};
use crate::algebra::series::{iterate_to_fixed_point, TruncatedSeries};
use crate::algebra::{Monomial, Polynomial};
use crate::charts::Chart;
use crate::error::{Error, Result};
use crate::ideal::{monomial_times_unit, residual_factor};
use crate::logfit::fitting_ideal;

/// Order along the stratum of the residual ideal of the `k`-th Fitting
/// ideal: write `F_k = u^c * R` with `u^c` the common exceptional factor,
/// restrict `R` to the stratum (all exceptional coordinates zero) and take
/// the minimal vanishing order. Infinite when the restriction is zero.
pub fn rho_k(chart: &Chart, k: usize) -> Result<Order> {
    let gens = fitting_ideal(chart, k)?;
    let (_, residual) = residual_factor(&gens, &chart.frame.exceptional);
    Ok(residual
        .iter()
        .map(|g| g.restrict_zero(&chart.frame.exceptional).order())
        .min()
        .unwrap_or(Order::Infinite))
}

/// The main control invariant `rho = rho_{n-2}`.
pub fn rho(chart: &Chart) -> Result<Order> {
    let n = chart.n_vars();
    if n < 2 {
        return Err(Error::Unsupported(
            "rho needs at least two variables".into(),
        ));
    }
    rho_k(chart, n - 2)
}

/// Presentation of the components as `sigma_1 = c * u^alpha` and
/// `sigma_i = g_i + u^delta * T_i` with a common `delta`, where the `g_i`
/// collect the terms that are rational-multiple powers of `u^alpha` and no
/// exceptional variable divides every `T_i`.
#[derive(Debug, Clone)]
pub struct Prelim {
    /// Working chart, updated by any normalizing coordinate changes.
    pub chart: Chart,
    pub trunc: u64,
    /// Whether a series-level change was applied, making the component
    /// data exact only below the truncation degree.
    pub truncated: bool,
    /// Component permutation: `order[0]` is the monomial component.
    pub order: Vec<usize>,
    pub alpha: Monomial,
    pub alpha_coeff: Rat,
    /// Aligned with `order[1..]`.
    pub g: Vec<Polynomial>,
    pub delta: Monomial,
    pub t: Vec<Polynomial>,
}

/// True when `gamma = q * alpha` componentwise for a single rational
/// `q >= 1`.
fn is_rational_multiple_at_least_one(gamma: &Monomial, alpha: &Monomial) -> bool {
    let mut q: Option<Rat> = None;
    for (&g, &a) in gamma.0.iter().zip(&alpha.0) {
        if a == 0 {
            if g != 0 {
                return false;
            }
            continue;
        }
        let ratio = Rat::new(g.into(), a.into());
        match &q {
            None => q = Some(ratio),
            Some(prev) if *prev == ratio => {}
            _ => return false,
        }
    }
    match q {
        Some(q) => q >= Rat::one(),
        None => false,
    }
}

/// Rewrites the chart so the selected component becomes exactly
/// `c * u^alpha`: scales each exceptional coordinate by a fractional power
/// of the unit cofactor, with exponents `eps` solving `<alpha, eps> = 1`,
/// and expresses every component in the new coordinates.
fn normalize_monomial_component(
    chart: &Chart,
    comp: usize,
    alpha: &Monomial,
    trunc: u64,
) -> Result<(Chart, bool)> {
    let n = chart.n_vars();
    let sigma = &chart.components[comp];
    let unit = sigma.div_exact_monomial(alpha)?;
    let c = unit.constant_term();
    let w = unit.scale(&c.recip());
    if w.n_terms() == 1 {
        return Ok((chart.clone(), false));
    }

    let row: Vec<Rat> = alpha.0.iter().map(|&e| Rat::from_integer(e.into())).collect();
    let eps = linalg::least_norm_solution(&[row], &[Rat::one()])
        .ok_or_else(|| Error::Internal("no solution for the scaling exponents".into()))?;

    // Old coordinates in terms of new: u_h = new_h * W(old)^(-eps_h), solved
    // by fixed point iteration; free coordinates are unchanged.
    let identity: Vec<Polynomial> = (0..n).map(|i| Polynomial::var(n, i)).collect();
    let old_in_new = iterate_to_fixed_point(identity, trunc, |cur| {
        let w_cur = TruncatedSeries::new(w.substitute_capped(cur, Some(trunc)), trunc);
        (0..n)
            .map(|h| {
                if eps[h].is_zero() || !chart.frame.exceptional[h] {
                    return Ok(Polynomial::var(n, h));
                }
                let factor = w_cur.fractional_power(&-eps[h].clone())?;
                Ok(Polynomial::var(n, h).mul_capped(&factor.poly, Some(trunc)))
            })
            .collect()
    })?;

    let components: Vec<Polynomial> = chart
        .components
        .iter()
        .map(|p| p.substitute_capped(&old_in_new, Some(trunc)))
        .collect();
    let new_chart = Chart::new(chart.frame.clone(), components, chart.label.clone());

    let check = new_chart.components[comp]
        .div_exact_monomial(alpha)
        .map_err(|_| Error::Internal("normalization lost the monomial factor".into()))?;
    if check.n_terms() != 1 || check.constant_term() != c {
        return Err(Error::Internal(
            "normalization did not reduce the unit to a constant".into(),
        ));
    }
    Ok((new_chart, true))
}

/// Extracts the presentation, normalizing the chart if the monomial
/// component carries a non-constant unit.
pub fn to_prelim(chart: &Chart, trunc: u64) -> Result<Prelim> {
    let exc = &chart.frame.exceptional;
    if !exc.iter().any(|&e| e) {
        return Err(Error::Unsupported(
            "no exceptional variables in the chart".into(),
        ));
    }
    let candidates: Vec<(usize, Monomial)> = chart
        .components
        .iter()
        .enumerate()
        .filter_map(|(i, s)| {
            let m = monomial_times_unit(s)?;
            if m.supported_on(exc) && !m.is_unit() {
                Some((i, m))
            } else {
                None
            }
        })
        .collect();
    let chosen = candidates.iter().find(|(_, alpha)| {
        chart.components.iter().all(|s| {
            s.terms().all(|(m, _)| alpha.divides(m))
        })
    });
    let Some((first, alpha)) = chosen.cloned() else {
        return Err(Error::Unsupported(
            "no component is an exceptional monomial times a unit dividing the rest".into(),
        ));
    };

    let (work, truncated) = normalize_monomial_component(chart, first, &alpha, trunc)?;
    let alpha_coeff = work.components[first]
        .div_exact_monomial(&alpha)?
        .constant_term();

    let mut order = vec![first];
    order.extend((0..work.components.len()).filter(|&i| i != first));

    let mut g = Vec::new();
    let mut rests = Vec::new();
    for &i in &order[1..] {
        let sigma = &work.components[i];
        let mut gi = Polynomial::zero(work.n_vars());
        let mut rest = Polynomial::zero(work.n_vars());
        for (m, c) in sigma.terms() {
            if m.supported_on(exc) && is_rational_multiple_at_least_one(m, &alpha) {
                gi.add_term(m.clone(), c.clone());
            } else {
                rest.add_term(m.clone(), c.clone());
            }
        }
        g.push(gi);
        rests.push(rest);
    }

    let mut delta: Option<Monomial> = None;
    for rest in &rests {
        if rest.is_zero() {
            continue;
        }
        let content = rest.monomial_gcd().unwrap().restricted_to(exc);
        delta = Some(match delta {
            None => content,
            Some(d) => d.gcd(&content),
        });
    }
    let delta = delta.unwrap_or_else(|| Monomial::unit(work.n_vars()));
    let t = rests
        .iter()
        .map(|r| r.div_exact_monomial(&delta).expect("common content divides"))
        .collect();

    Ok(Prelim {
        chart: work,
        trunc,
        truncated,
        order,
        alpha,
        alpha_coeff,
        g,
        delta,
        t,
    })
}

impl Prelim {
    /// The contact degree: the least total degree of a term supported on
    /// the free variables in some `T_i`; infinite when no `T_i` has one.
    pub fn d_invariant(&self) -> Order {
        let free = self.chart.frame.free_mask();
        self.t
            .iter()
            .flat_map(|t| t.terms())
            .filter(|(m, _)| m.supported_on(&free))
            .map(|(m, _)| m.degree())
            .min()
            .map_or(Order::Infinite, Order::Finite)
    }
}

/// The contact degree of a chart.
pub fn d_invariant(chart: &Chart, trunc: u64) -> Result<Order> {
    Ok(to_prelim(chart, trunc)?.d_invariant())
}

/// Weierstrass data over the presentation: a distinguished free variable
/// `v` with `T_i = Ttilde_i * v^d + sum_j a_ij * v^j`, the main component's
/// `Ttilde` a unit and its subleading coefficient removed.
#[derive(Debug, Clone)]
pub struct Weier {
    pub prelim: Prelim,
    pub v_index: usize,
    pub d: u64,
    /// Index into `prelim.t` of the main component.
    pub main: usize,
    /// Coefficients `a[i][j]`, `j = 0..d`, free of `v`.
    pub a: Vec<Vec<Polynomial>>,
    pub t_tilde: Vec<Polynomial>,
}

/// Coefficients of powers of variable `v`: entry `j` is the coefficient of
/// `v^j` with the `v` exponent removed.
pub fn coeffs_in_var(p: &Polynomial, v: usize) -> Vec<Polynomial> {
    let n = p.n_vars();
    let max = p
        .terms()
        .map(|(m, _)| m.0[v])
        .max()
        .unwrap_or(0) as usize;
    let mut out = vec![Polynomial::zero(n); max + 1];
    for (m, c) in p.terms() {
        let mut e = m.clone();
        let j = e.0[v] as usize;
        e.0[v] = 0;
        out[j].add_term(e, c.clone());
    }
    out
}

fn v_split(t: &Polynomial, v: usize, d: u64) -> (Vec<Polynomial>, Polynomial) {
    let n = t.n_vars();
    let coeffs = coeffs_in_var(t, v);
    let mut a = vec![Polynomial::zero(n); d as usize];
    let mut tilde = Polynomial::zero(n);
    for (j, c) in coeffs.into_iter().enumerate() {
        if (j as u64) < d {
            a[j] = c;
        } else {
            let mut m = Monomial::unit(n);
            m.0[v] = (j as u64 - d) as u32;
            tilde = tilde.add(&c.mul_monomial(&m, &Rat::one()));
        }
    }
    (a, tilde)
}

/// Enumerates integer tuples by increasing Chebyshev radius, in
/// lexicographic order within each radius shell.
fn integer_tuples(len: usize, radius: i64) -> Vec<Vec<i64>> {
    if len == 0 {
        return if radius == 0 { vec![vec![]] } else { vec![] };
    }
    let mut all = vec![vec![]];
    for _ in 0..len {
        let mut next = Vec::new();
        for t in &all {
            for c in -radius..=radius {
                let mut t2 = t.clone();
                t2.push(c);
                next.push(t2);
            }
        }
        all = next;
    }
    all.into_iter()
        .filter(|t| t.iter().map(|c| c.abs()).max().unwrap() == radius)
        .collect()
}

/// Builds the Weierstrass data for a chart with finite contact degree
/// `d >= 1`. Searches deterministically for a distinguished free variable
/// and an integer shear of the other free variables making the `v^d`
/// coefficient of some `T_i` a unit; the subleading coefficient of the
/// main component is then removed by translations in `v`.
pub fn to_weierstrass(prelim: &Prelim) -> Result<Weier> {
    let d = match prelim.d_invariant() {
        Order::Finite(d) if d >= 1 => d,
        other => {
            return Err(Error::Unsupported(format!(
                "weierstrass data needs finite positive contact degree, got {other}"
            )))
        }
    };
    let mut prelim = prelim.clone();
    let n = prelim.chart.n_vars();
    let free = prelim.chart.frame.free_indices();
    let trunc = prelim.trunc;

    let mut found: Option<(usize, Vec<i64>, usize)> = None;
    'search: for radius in 0..=(d as i64) {
        for &v in &free {
            let others: Vec<usize> = free.iter().copied().filter(|&f| f != v).collect();
            for tuple in integer_tuples(others.len(), radius) {
                for (ti, t) in prelim.t.iter().enumerate() {
                    let sheared = shear(t, v, &others, &tuple);
                    let coeffs = coeffs_in_var(&sheared, v);
                    if let Some(c) = coeffs.get(d as usize) {
                        if c.is_unit_at_origin() {
                            found = Some((v, tuple, ti));
                            break 'search;
                        }
                    }
                }
            }
        }
    }
    let Some((v_index, tuple, main)) = found else {
        return Err(Error::Unsupported(
            "no integer shear exposes a unit leading coefficient".into(),
        ));
    };

    let others: Vec<usize> = free.iter().copied().filter(|&f| f != v_index).collect();
    if tuple.iter().any(|&c| c != 0) {
        let subst: Vec<Polynomial> = (0..n)
            .map(|i| match others.iter().position(|&o| o == i) {
                Some(pos) if tuple[pos] != 0 => {
                    let c = Rat::from_integer(tuple[pos].into());
                    Polynomial::var(n, i)
                        .add(&Polynomial::var(n, v_index).scale(&c))
                }
                _ => Polynomial::var(n, i),
            })
            .collect();
        apply_substitution(&mut prelim, &subst, false);
    }

    // Remove the subleading coefficient of the main component by shifting
    // v; each pass strictly raises its order.
    for _ in 0..=trunc + 2 {
        let (a, tilde) = v_split(&prelim.t[main], v_index, d);
        let sub = &a[d as usize - 1];
        if sub.is_zero() {
            break;
        }
        let lead = TruncatedSeries::new(tilde.scale(&Rat::from_integer((d as i64).into())), trunc)
            .inverse()
            .map_err(|_| Error::Internal("leading coefficient not a unit".into()))?;
        let shift = sub.mul_capped(&lead.poly, Some(trunc));
        if shift.terms().any(|(m, _)| m.0[v_index] > 0) {
            return Err(Error::Internal("shift depends on the variable it moves".into()));
        }
        let subst: Vec<Polynomial> = (0..n)
            .map(|i| {
                if i == v_index {
                    Polynomial::var(n, i).sub(&shift)
                } else {
                    Polynomial::var(n, i)
                }
            })
            .collect();
        apply_substitution(&mut prelim, &subst, true);
    }
    let (a_main, _) = v_split(&prelim.t[main], v_index, d);
    if !a_main[d as usize - 1].is_zero() {
        return Err(Error::Internal(
            "subleading coefficient survived the translation passes".into(),
        ));
    }

    let mut a = Vec::new();
    let mut t_tilde = Vec::new();
    for t in &prelim.t {
        let (ai, tilde) = v_split(t, v_index, d);
        a.push(ai);
        t_tilde.push(tilde);
    }
    Ok(Weier {
        prelim,
        v_index,
        d,
        main,
        a,
        t_tilde,
    })
}

fn shear(t: &Polynomial, v: usize, others: &[usize], tuple: &[i64]) -> Polynomial {
    if tuple.iter().all(|&c| c == 0) {
        return t.clone();
    }
    let n = t.n_vars();
    let subst: Vec<Polynomial> = (0..n)
        .map(|i| match others.iter().position(|&o| o == i) {
            Some(pos) if tuple[pos] != 0 => {
                let c = Rat::from_integer(tuple[pos].into());
                Polynomial::var(n, i).add(&Polynomial::var(n, v).scale(&c))
            }
            _ => Polynomial::var(n, i),
        })
        .collect();
    t.substitute(&subst)
}

/// Applies a free-variable substitution to every piece of the presentation.
fn apply_substitution(prelim: &mut Prelim, subst: &[Polynomial], truncating: bool) {
    let cap = if truncating || prelim.truncated {
        Some(prelim.trunc)
    } else {
        None
    };
    let components: Vec<Polynomial> = prelim
        .chart
        .components
        .iter()
        .map(|p| p.substitute_capped(subst, cap))
        .collect();
    prelim.chart = Chart::new(
        prelim.chart.frame.clone(),
        components,
        prelim.chart.label.clone(),
    );
    for t in prelim.t.iter_mut() {
        *t = t.substitute_capped(subst, cap);
    }
    // g_i are supported on exceptional variables and do not move.
}

/// Coherence of the two invariants on one chart, as a hard relation:
/// `rho` infinite iff `d` infinite; `rho = 0` iff `d <= 1`; and for
/// `0 < rho < infinity`, `d = rho + 1`.
pub fn check_rho_d_coherence(chart: &Chart, trunc: u64) -> Result<()> {
    let r = rho(chart)?;
    let d = d_invariant(chart, trunc)?;
    let ok = match (r, d) {
        (Order::Infinite, Order::Infinite) => true,
        (Order::Infinite, _) | (_, Order::Infinite) => false,
        (Order::Finite(0), Order::Finite(dv)) => dv <= 1,
        (Order::Finite(rv), Order::Finite(dv)) => dv == rv + 1,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Internal(format!(
            "incoherent invariants: rho = {r}, d = {d}"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charts::Frame;

    fn chart(names: &[&str], exc: &[bool], comps: &[&str]) -> Chart {
        let frame = Frame::new(
            names.iter().map(|s| s.to_string()).collect(),
            exc.to_vec(),
        );
        let components = comps.iter().map(|s| frame.parse(s).unwrap()).collect();
        Chart::new(frame, components, "root")
    }

    fn ex1() -> Chart {
        chart(
            &["u", "v", "w"],
            &[true, false, false],
            &["u^2", "u^3*(v^2+u*w)", "u^4*v"],
        )
    }

    #[test]
    fn rho_of_the_base_example_is_one() {
        assert_eq!(rho(&ex1()).unwrap(), Order::Finite(1));
    }

    #[test]
    fn prelim_presentation_of_the_base_example() {
        let p = to_prelim(&ex1(), 16).unwrap();
        assert!(!p.truncated);
        assert_eq!(p.order, vec![0, 1, 2]);
        assert_eq!(p.alpha, Monomial(vec![2, 0, 0]));
        assert_eq!(p.alpha_coeff, Rat::one());
        assert_eq!(p.delta, Monomial(vec![3, 0, 0]));
        assert!(p.g.iter().all(|g| g.is_zero()));
        assert_eq!(p.t[0], p.chart.frame.parse("v^2+u*w").unwrap());
        assert_eq!(p.t[1], p.chart.frame.parse("u*v").unwrap());
        assert_eq!(p.d_invariant(), Order::Finite(2));
    }

    #[test]
    fn two_point_chart_has_infinite_invariants() {
        let c = chart(
            &["u", "v", "w"],
            &[true, true, false],
            &["u^2*v^2", "u^3*v^4*(v+u*w)", "u^4*v^5"],
        );
        assert_eq!(d_invariant(&c, 16).unwrap(), Order::Infinite);
        assert_eq!(rho(&c).unwrap(), Order::Infinite);
        check_rho_d_coherence(&c, 16).unwrap();
    }

    #[test]
    fn coherence_on_the_base_example() {
        check_rho_d_coherence(&ex1(), 16).unwrap();
    }

    #[test]
    fn weierstrass_data_of_the_base_example() {
        let p = to_prelim(&ex1(), 16).unwrap();
        let w = to_weierstrass(&p).unwrap();
        assert_eq!(w.v_index, 1);
        assert_eq!(w.d, 2);
        assert_eq!(w.main, 0);
        assert!(w.t_tilde[0].is_unit_at_origin());
        assert!(w.a[0][1].is_zero());
        assert_eq!(w.a[0][0], w.prelim.chart.frame.parse("u*w").unwrap());
        assert!(w.a[1][0].is_zero());
        assert_eq!(w.a[1][1], w.prelim.chart.frame.parse("u").unwrap());
    }

    #[test]
    fn unit_normalization_restores_a_pure_monomial() {
        let c = chart(
            &["u", "v"],
            &[true, false],
            &["u^2*(1+v)", "u^3*v"],
        );
        let p = to_prelim(&c, 12).unwrap();
        assert!(p.truncated);
        assert_eq!(p.alpha, Monomial(vec![2, 0]));
        let normalized = &p.chart.components[0];
        assert_eq!(
            normalized.div_exact_monomial(&p.alpha).unwrap(),
            Polynomial::one(2)
        );
    }

    #[test]
    fn g_terms_are_rational_alpha_multiples() {
        let c = chart(
            &["u", "v"],
            &[true, false],
            &["u^2", "u^3 + u^4*v"],
        );
        let p = to_prelim(&c, 16).unwrap();
        // u^3 has exponent (3,0) = (3/2) * (2,0), a rational multiple >= 1.
        assert_eq!(p.g[0], p.chart.frame.parse("u^3").unwrap());
        assert_eq!(p.t[0], p.chart.frame.parse("v").unwrap());
        assert_eq!(p.delta, Monomial(vec![4, 0]));
    }

    #[test]
    fn shear_search_exposes_a_unit_leading_coefficient() {
        // T = v*w has no pure power of either free variable; the shear
        // w -> w + c*v makes the v^2 coefficient the constant c.
        let c = chart(
            &["u", "v", "w"],
            &[true, false, false],
            &["u^2", "u^3*(v*w + u)"],
        );
        let p = to_prelim(&c, 16).unwrap();
        assert_eq!(p.d_invariant(), Order::Finite(2));
        let w = to_weierstrass(&p).unwrap();
        assert_eq!(w.d, 2);
        assert!(w.t_tilde[0].is_unit_at_origin());
    }

    #[test]
    fn subleading_coefficient_is_removed() {
        // T = v^2 + u*v: translation v -> v - u/2 must kill the v-linear
        // part, producing a0 = -u^2/4.
        let c = chart(
            &["u", "v"],
            &[true, false],
            &["u^2", "u^3*(v^2 + u*v)"],
        );
        let p = to_prelim(&c, 16).unwrap();
        let w = to_weierstrass(&p).unwrap();
        assert_eq!(w.d, 2);
        assert!(w.a[0][1].is_zero());
        assert_eq!(
            w.a[0][0],
            w.prelim.chart.frame.parse("-1/4*u^2").unwrap()
        );
    }
}
