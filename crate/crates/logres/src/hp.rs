//! Monomial generation of the pulled back differentials: log differentials
//! in the mixed basis, exact membership of a form in the module spanned by
//! monomial differentials, and the inductive extraction of the monomial
//! generators together with the resulting certificate.

use std::collections::{BTreeSet, HashMap};

use num_traits::{One, Zero};

use crate::algebra::linalg;
use crate::algebra::poly::Rat;
use crate::algebra::series::iterate_to_fixed_point;
use crate::algebra::{Monomial, Polynomial};
use crate::charts::Chart;
use crate::error::{Error, Result};
use crate::ideal::{maximal_power, MonomialIdeal};
use crate::logfit::fitting_staircase;

/// The log differential of `f` in the mixed basis: slot `i` holds
/// `u_i * df/du_i` at an exceptional coordinate and `df/dv_i` at a free
/// one.
pub fn log_differential(exceptional: &[bool], f: &Polynomial) -> Vec<Polynomial> {
    (0..f.n_vars())
        .map(|i| {
            if exceptional[i] {
                f.log_derivative(i)
            } else {
                f.derivative(i)
            }
        })
        .collect()
}

/// Weight of a basis slot: differentials of free coordinates carry an
/// extra degree, so the log differential of a monomial is weighted
/// homogeneous of the monomial's degree.
fn slot_weight(exceptional: &[bool], slot: usize) -> u64 {
    if exceptional[slot] {
        0
    } else {
        1
    }
}

fn form_degrees(exceptional: &[bool], form: &[Polynomial]) -> BTreeSet<u64> {
    let mut out = BTreeSet::new();
    for (slot, p) in form.iter().enumerate() {
        for (m, _) in p.terms() {
            out.insert(m.degree() + slot_weight(exceptional, slot));
        }
    }
    out
}

/// Result of a membership test for a log form in a polynomial module.
#[derive(Debug, Clone)]
pub enum Membership {
    /// A polynomial combination reproducing the target, with the degree up
    /// to which the input data was trusted when it came from truncated
    /// series. `None` means the identity is exact.
    Member {
        witness: Vec<Polynomial>,
        verified_to: Option<u64>,
    },
    /// The linear system at this weighted degree is inconsistent, so no
    /// combination exists. `slot` is the first basis slot whose equations
    /// close the contradiction, when one can be singled out.
    Obstructed { degree: u64, slot: Option<usize> },
}

/// Decides whether `target` lies in the module spanned by `gens` over the
/// polynomial ring. Each generator form must be weighted homogeneous;
/// the question then splits into one exact rational linear system per
/// weighted degree of the target, and the decision is complete.
pub fn form_membership(
    exceptional: &[bool],
    target: &[Polynomial],
    gens: &[Vec<Polynomial>],
    verified_to: Option<u64>,
) -> Result<Membership> {
    let n = exceptional.len();
    let mut gen_degrees = Vec::with_capacity(gens.len());
    for g in gens {
        let ds = form_degrees(exceptional, g);
        if ds.len() > 1 {
            return Err(Error::Unsupported(
                "membership needs weighted homogeneous generator forms".into(),
            ));
        }
        gen_degrees.push(ds.into_iter().next());
    }
    let all: Vec<usize> = (0..n).collect();
    let mut witness = vec![Polynomial::zero(n); gens.len()];
    for degree in form_degrees(exceptional, target) {
        let mut cols: Vec<(usize, Monomial)> = Vec::new();
        for (gi, dg) in gen_degrees.iter().enumerate() {
            let Some(dg) = dg else { continue };
            if *dg > degree {
                continue;
            }
            for m in maximal_power(n, &all, (degree - dg) as u32).gens() {
                cols.push((gi, m.clone()));
            }
        }
        // Equations are indexed by (slot, monomial); collect every index
        // touched by the target slice or by a column.
        let mut row_of: HashMap<(usize, Monomial), usize> = HashMap::new();
        let mut keys: Vec<(usize, Monomial)> = Vec::new();
        let mut touch = |key: (usize, Monomial), keys: &mut Vec<(usize, Monomial)>| {
            if !row_of.contains_key(&key) {
                row_of.insert(key.clone(), keys.len());
                keys.push(key);
            }
        };
        let mut col_entries: Vec<Vec<((usize, Monomial), Rat)>> = Vec::new();
        for (gi, cm) in &cols {
            let mut entries = Vec::new();
            for (slot, p) in gens[*gi].iter().enumerate() {
                for (m, c) in p.terms() {
                    let key = (slot, m.mul(cm));
                    touch(key.clone(), &mut keys);
                    entries.push((key, c.clone()));
                }
            }
            col_entries.push(entries);
        }
        for (slot, p) in target.iter().enumerate() {
            for (m, _) in p.terms() {
                if m.degree() + slot_weight(exceptional, slot) == degree {
                    touch((slot, m.clone()), &mut keys);
                }
            }
        }
        let n_rows = keys.len();
        let mut matrix = vec![vec![Rat::zero(); cols.len()]; n_rows];
        for (ci, entries) in col_entries.iter().enumerate() {
            for (key, c) in entries {
                matrix[row_of[key]][ci] = &matrix[row_of[key]][ci] + c;
            }
        }
        let mut rhs = vec![Rat::zero(); n_rows];
        for (key, &ri) in &row_of {
            let (slot, m) = key;
            if m.degree() + slot_weight(exceptional, *slot) == degree {
                rhs[ri] = target[*slot].coeff(m);
            }
        }
        let Some(solution) = linalg::solve(&matrix, &rhs) else {
            // Localize the contradiction: the first slot whose equations,
            // joined with all earlier slots, are already inconsistent.
            let mut slot_found = None;
            for s in 0..n {
                let picked: Vec<usize> = keys
                    .iter()
                    .enumerate()
                    .filter(|(_, (slot, _))| *slot <= s)
                    .map(|(i, _)| i)
                    .collect();
                let sub: Vec<Vec<Rat>> = picked.iter().map(|&i| matrix[i].clone()).collect();
                let sub_rhs: Vec<Rat> = picked.iter().map(|&i| rhs[i].clone()).collect();
                if linalg::solve(&sub, &sub_rhs).is_none() {
                    slot_found = Some(s);
                    break;
                }
            }
            return Ok(Membership::Obstructed {
                degree,
                slot: slot_found,
            });
        };
        for (ci, (gi, cm)) in cols.iter().enumerate() {
            if !solution[ci].is_zero() {
                witness[*gi].add_term(cm.clone(), solution[ci].clone());
            }
        }
    }
    // The degreewise systems are exact, so the witness must reproduce the
    // target on the nose.
    for slot in 0..n {
        let mut acc = Polynomial::zero(n);
        for (gi, g) in gens.iter().enumerate() {
            acc = acc.add(&witness[gi].mul(&g[slot]));
        }
        if acc != target[slot] {
            return Err(Error::Internal(
                "membership witness fails re-substitution".into(),
            ));
        }
    }
    Ok(Membership::Member {
        witness,
        verified_to,
    })
}

/// Kind of an extracted monomial generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenKind {
    Alpha,
    Beta { free_var: usize },
}

/// One extracted generator: `coeff * x^monomial` is the distinguished part
/// of the named component in the final coordinates.
#[derive(Debug, Clone)]
pub struct HpGen {
    pub kind: GenKind,
    pub monomial: Monomial,
    pub coeff: Rat,
    pub component: usize,
}

impl HpGen {
    /// Exceptional part of the generator exponent.
    pub fn exc(&self, exceptional: &[bool]) -> Monomial {
        Monomial(
            self.monomial
                .0
                .iter()
                .zip(exceptional)
                .map(|(&e, &x)| if x { e } else { 0 })
                .collect(),
        )
    }
}

/// Running state of the generator extraction.
#[derive(Debug, Clone)]
pub struct HpState {
    pub chart: Chart,
    pub trunc: u64,
    /// Whether a series-level coordinate change has made the component
    /// data exact only below `trunc`.
    pub truncated: bool,
    pub gens: Vec<HpGen>,
    /// Component indices already matched to a generator.
    pub consumed: Vec<usize>,
}

pub fn hp_start(chart: &Chart, trunc: u64) -> HpState {
    HpState {
        chart: chart.clone(),
        trunc,
        truncated: false,
        gens: Vec::new(),
        consumed: Vec::new(),
    }
}

/// Outcome of one extraction step.
#[derive(Debug, Clone)]
pub enum HpStep {
    Advanced(HpState),
    Blocked { stage: usize, reason: String },
}

fn is_zero_monomial(m: &Monomial) -> bool {
    m.0.iter().all(|&e| e == 0)
}

fn in_span(e: &Monomial, gens: &[Monomial]) -> bool {
    if is_zero_monomial(e) {
        return true;
    }
    let usable: Vec<&Monomial> = gens
        .iter()
        .filter(|g| !is_zero_monomial(g) && g.divides(e))
        .collect();
    if usable.is_empty() {
        return false;
    }
    let rows: Vec<Vec<Rat>> = (0..e.0.len())
        .map(|h| usable.iter().map(|g| Rat::from_integer(g.0[h].into())).collect())
        .collect();
    let b: Vec<Rat> = e.0.iter().map(|&x| Rat::from_integer(x.into())).collect();
    linalg::solve(&rows, &b).is_some()
}

/// Splits a polynomial into the part whose terms are rational-power
/// products of generators that divide them and the rest. Divisibility
/// keeps the chain-rule cofactors polynomial, so differentials of the
/// inside part lie in the module spanned by the generator differentials.
fn subring_split(p: &Polynomial, gens: &[Monomial]) -> (Polynomial, Polynomial) {
    let n = p.n_vars();
    let mut inside = Polynomial::zero(n);
    let mut rest = Polynomial::zero(n);
    for (m, c) in p.terms() {
        if in_span(m, gens) {
            inside.add_term(m.clone(), c.clone());
        } else {
            rest.add_term(m.clone(), c.clone());
        }
    }
    (inside, rest)
}

fn exceptional_content(p: &Polynomial, exceptional: &[bool]) -> Monomial {
    let n = p.n_vars();
    let mut out: Option<Vec<u32>> = None;
    for (m, _) in p.terms() {
        let masked: Vec<u32> =
            m.0.iter()
                .zip(exceptional)
                .map(|(&e, &x)| if x { e } else { 0 })
                .collect();
        out = Some(match out {
            None => masked,
            Some(prev) => prev.iter().zip(&masked).map(|(&a, &b)| a.min(b)).collect(),
        });
    }
    Monomial(out.unwrap_or_else(|| vec![0; n]))
}

fn dot(m: &Monomial, eps: &[Rat], exceptional: &[bool]) -> Rat {
    m.0.iter()
        .zip(eps)
        .zip(exceptional)
        .filter(|(_, &x)| x)
        .map(|((&e, c), _)| c * Rat::from_integer(e.into()))
        .fold(Rat::zero(), |a, b| a + b)
}

fn blocked(stage: usize, reason: impl Into<String>) -> Result<HpStep> {
    Ok(HpStep::Blocked {
        stage,
        reason: reason.into(),
    })
}

/// Performs one extraction step: splits every unmatched component against
/// the subring of the extracted generators, picks the component with the
/// componentwise smallest residual exponent, and turns its residual into
/// the next monomial generator by a coordinate change when one of the two
/// admissible shapes applies.
pub fn hp_extract_step(state: &HpState) -> Result<HpStep> {
    let chart = &state.chart;
    let n = chart.n_vars();
    let k = state.gens.len();
    if k >= n {
        return Err(Error::Unsupported(
            "all generator slots are already filled".into(),
        ));
    }
    let exceptional = &chart.frame.exceptional;
    let gen_monos: Vec<Monomial> = state.gens.iter().map(|g| g.monomial.clone()).collect();

    struct Candidate {
        component: usize,
        delta: Monomial,
        s_part: Polynomial,
    }
    let mut candidates: Vec<Candidate> = Vec::new();
    for m in 0..chart.components.len() {
        if state.consumed.contains(&m) {
            continue;
        }
        let sigma = &chart.components[m];
        let (ghat, rest) = subring_split(sigma, &gen_monos);
        if rest.is_zero() {
            continue;
        }
        let delta = exceptional_content(&rest, exceptional);
        let (q, _) = sigma.divrem_monomial(&delta);
        let corner = ghat.coeff(&delta);
        let s_part = if corner.is_zero() {
            q
        } else {
            q.sub(&Polynomial::constant(n, corner))
        };
        candidates.push(Candidate {
            component: m,
            delta,
            s_part,
        });
    }
    if candidates.is_empty() {
        return blocked(k, "components exhausted before all generators were found");
    }
    let mut best = None;
    'search: for i in 0..candidates.len() {
        for j in 0..candidates.len() {
            if i != j && !candidates[i].delta.divides(&candidates[j].delta) {
                continue 'search;
            }
        }
        best = Some(i);
        break;
    }
    let Some(best) = best else {
        return blocked(k, "residual exponents of the components are incomparable");
    };
    let pick = &candidates[best];
    if let Some(last) = state.gens.last() {
        if !last.exc(exceptional).divides(&pick.delta) {
            return blocked(k, "residual exponent does not dominate the last generator");
        }
    }

    let s0 = pick.s_part.constant_term();
    let mut next = state.clone();
    if !s0.is_zero() {
        // Unit residual: the new generator is the pure exceptional
        // monomial, after scaling the exceptional coordinates to absorb
        // the unit.
        let alpha_rows: Vec<&Monomial> = state
            .gens
            .iter()
            .filter(|g| matches!(g.kind, GenKind::Alpha))
            .map(|g| &g.monomial)
            .collect();
        let exc_vars: Vec<usize> = (0..n).filter(|&i| exceptional[i]).collect();
        let mut rows: Vec<Vec<Rat>> = alpha_rows
            .iter()
            .map(|m| {
                exc_vars
                    .iter()
                    .map(|&i| Rat::from_integer(m.0[i].into()))
                    .collect()
            })
            .collect();
        let mut rhs = vec![Rat::zero(); rows.len()];
        rows.push(
            exc_vars
                .iter()
                .map(|&i| Rat::from_integer(pick.delta.0[i].into()))
                .collect(),
        );
        rhs.push(Rat::one());
        let Some(eps_exc) = linalg::least_norm_solution(&rows, &rhs) else {
            return blocked(
                k,
                "unit residual with exponent rationally dependent on the extracted ones",
            );
        };
        let mut eps = vec![Rat::zero(); n];
        for (j, &i) in exc_vars.iter().enumerate() {
            eps[i] = eps_exc[j].clone();
        }
        let w_norm = pick.s_part.scale(&s0.recip());
        if w_norm.n_terms() > 1 {
            let compensations: Vec<(usize, Rat)> = state
                .gens
                .iter()
                .filter_map(|g| match g.kind {
                    GenKind::Beta { free_var } => {
                        Some((free_var, dot(&g.monomial, &eps, exceptional)))
                    }
                    GenKind::Alpha => None,
                })
                .collect();
            let chart2 = apply_alpha_change(&next, &eps, &w_norm, &compensations)?;
            next.chart = chart2;
            next.truncated = true;
        }
        next.gens.push(HpGen {
            kind: GenKind::Alpha,
            monomial: pick.delta.clone(),
            coeff: s0,
            component: pick.component,
        });
    } else {
        // Residual vanishing at the origin: absorb it into a fresh free
        // coordinate with nonzero linear part.
        let used: Vec<usize> = state
            .gens
            .iter()
            .filter_map(|g| match g.kind {
                GenKind::Beta { free_var } => Some(free_var),
                GenKind::Alpha => None,
            })
            .collect();
        let mut pick_q = None;
        for q in 0..n {
            if exceptional[q] || used.contains(&q) {
                continue;
            }
            let mut e = Monomial::unit(n);
            e.0[q] = 1;
            if !pick.s_part.coeff(&e).is_zero() {
                pick_q = Some(q);
                break;
            }
        }
        let Some(q) = pick_q else {
            return blocked(
                k,
                "residual has no usable linear free coordinate and is not a unit",
            );
        };
        let exact = apply_beta_change(&mut next, q, &pick.s_part)?;
        if !exact {
            next.truncated = true;
        }
        let mut gamma = pick.delta.clone();
        gamma.0[q] = 1;
        next.gens.push(HpGen {
            kind: GenKind::Beta { free_var: q },
            monomial: gamma,
            coeff: Rat::one(),
            component: pick.component,
        });
    }
    next.consumed.push(pick.component);

    // Cross-check the Fitting staircase against the partial exponent sum
    // whenever it is decidable.
    let m = next.gens.len();
    let expect = next
        .gens
        .iter()
        .fold(Monomial::unit(n), |acc, g| acc.mul(&g.exc(exceptional)));
    if let Some(stair) = fitting_staircase(&next.chart, n - m)? {
        if stair != MonomialIdeal::from_gens(n, vec![expect]) {
            return blocked(
                k,
                "Fitting staircase disagrees with the partial exponent sum",
            );
        }
    }
    Ok(HpStep::Advanced(next))
}

/// Rewrites the chart under the scaling `new_u_h = W^eps_h * u_h` of the
/// exceptional coordinates, with the listed free coordinates compensated
/// by `new_v_q = W^(-eta_q) * v_q`. Always leaves series data truncated.
fn apply_alpha_change(
    state: &HpState,
    eps: &[Rat],
    w_norm: &Polynomial,
    compensations: &[(usize, Rat)],
) -> Result<Chart> {
    let chart = &state.chart;
    let n = chart.n_vars();
    let trunc = state.trunc;
    let identity: Vec<Polynomial> = (0..n).map(|i| Polynomial::var(n, i)).collect();
    let old_in_new = iterate_to_fixed_point(identity, trunc, |cur| {
        let w_cur = crate::algebra::series::TruncatedSeries::new(
            w_norm.substitute_capped(cur, Some(trunc)),
            trunc,
        );
        (0..n)
            .map(|h| {
                let exponent = if chart.frame.exceptional[h] {
                    -eps[h].clone()
                } else {
                    match compensations.iter().find(|(q, _)| *q == h) {
                        Some((_, eta)) => eta.clone(),
                        None => Rat::zero(),
                    }
                };
                if exponent.is_zero() {
                    return Ok(Polynomial::var(n, h));
                }
                let factor = w_cur.fractional_power(&exponent)?;
                Ok(Polynomial::var(n, h).mul_capped(&factor.poly, Some(trunc)))
            })
            .collect()
    })?;
    let components = chart
        .components
        .iter()
        .map(|c| c.substitute_capped(&old_in_new, Some(trunc)))
        .collect();
    Ok(Chart::new(
        chart.frame.clone(),
        components,
        chart.label.clone(),
    ))
}

/// Renames the free coordinate `q` to the residual `S`, rewriting every
/// component through the inverse series. Returns whether the rewrite is
/// exact, which happens when `S` is linear in `q` with a constant
/// coefficient.
fn apply_beta_change(state: &mut HpState, q: usize, s_poly: &Polynomial) -> Result<bool> {
    let chart = &state.chart;
    let n = chart.n_vars();
    let mut e = Monomial::unit(n);
    e.0[q] = 1;
    let c = s_poly.coeff(&e);
    let linear = Polynomial::term(n, e, c.clone());
    let b_part = s_poly.sub(&linear);
    let b_has_q = b_part.terms().any(|(m, _)| m.0[q] > 0);
    let exact = !b_has_q;
    let mut subst: Vec<Polynomial> = (0..n).map(|i| Polynomial::var(n, i)).collect();
    if exact {
        subst[q] = Polynomial::var(n, q).sub(&b_part).scale(&c.recip());
        let components = chart
            .components
            .iter()
            .map(|p| p.substitute(&subst))
            .collect();
        state.chart = Chart::new(chart.frame.clone(), components, chart.label.clone());
        return Ok(true);
    }
    let trunc = state.trunc;
    let identity: Vec<Polynomial> = (0..n).map(|i| Polynomial::var(n, i)).collect();
    let old_in_new = iterate_to_fixed_point(identity, trunc, |cur| {
        let b_cur = b_part.substitute_capped(cur, Some(trunc));
        (0..n)
            .map(|h| {
                if h == q {
                    Ok(Polynomial::var(n, q).sub(&b_cur).scale(&c.recip()))
                } else {
                    Ok(Polynomial::var(n, h))
                }
            })
            .collect()
    })?;
    let components = chart
        .components
        .iter()
        .map(|p| p.substitute_capped(&old_in_new, Some(trunc)))
        .collect();
    state.chart = Chart::new(chart.frame.clone(), components, chart.label.clone());
    Ok(false)
}

/// A full certificate: monomial generators in the final coordinates, the
/// partial exponent sums matching the Fitting staircases, and the flags
/// on the strengthened ordering and on truncation.
#[derive(Debug, Clone)]
pub struct HpCertificate {
    pub chart: Chart,
    pub gens: Vec<HpGen>,
    pub gamma_sums: Vec<Monomial>,
    /// Whether every extracted free-coordinate exponent is rationally
    /// dependent on the exceptional exponents extracted before it.
    pub strengthened: bool,
    pub truncated: bool,
    pub trunc: u64,
}

/// Outcome of a certification attempt.
#[derive(Debug, Clone)]
pub enum HpOutcome {
    Certified(Box<HpCertificate>),
    Failed { stage: usize, reason: String },
}

/// Partial exponent sums checked against the Fitting staircases: for each
/// `m`, the staircase of the `(n-m)`-th Fitting ideal must be the
/// principal ideal on the sum of the first `m` exceptional exponents.
pub fn hp_fitting_exponents(chart: &Chart, gens: &[HpGen]) -> Result<Vec<Monomial>> {
    let n = chart.n_vars();
    let exceptional = &chart.frame.exceptional;
    let mut sums = Vec::with_capacity(gens.len());
    let mut acc = Monomial::unit(n);
    for (m, g) in gens.iter().enumerate() {
        acc = acc.mul(&g.exc(exceptional));
        let Some(stair) = fitting_staircase(chart, n - m - 1)? else {
            return Err(Error::Unsupported(format!(
                "Fitting staircase at level {} is undecidable",
                n - m - 1
            )));
        };
        if stair != MonomialIdeal::from_gens(n, vec![acc.clone()]) {
            return Err(Error::Unsupported(format!(
                "Fitting staircase at level {} is not the partial exponent sum",
                n - m - 1
            )));
        }
        sums.push(acc.clone());
    }
    Ok(sums)
}

fn rational_span_contains(span: &[Monomial], target: &Monomial, exceptional: &[bool]) -> bool {
    let exc_vars: Vec<usize> = (0..exceptional.len()).filter(|&i| exceptional[i]).collect();
    let to_row = |m: &Monomial| -> Vec<Rat> {
        exc_vars
            .iter()
            .map(|&i| Rat::from_integer(m.0[i].into()))
            .collect()
    };
    let base: Vec<Vec<Rat>> = span.iter().map(to_row).collect();
    let mut extended = base.clone();
    extended.push(to_row(target));
    linalg::rank(&base) == linalg::rank(&extended)
}

/// Runs the extraction to completion and assembles the certificate: the
/// right number of generators of each kind, rationally independent
/// exceptional exponents, a totally ordered merged chain, membership of
/// every component differential in the generated module, and the Fitting
/// staircase equalities.
pub fn hp_certificate(chart: &Chart, trunc: u64) -> Result<HpOutcome> {
    let n = chart.n_vars();
    let exceptional = chart.frame.exceptional.clone();
    let s = exceptional.iter().filter(|&&x| x).count();
    let mut state = hp_start(chart, trunc);
    for _ in 0..n {
        match hp_extract_step(&state)? {
            HpStep::Advanced(next) => state = next,
            HpStep::Blocked { stage, reason } => return Ok(HpOutcome::Failed { stage, reason }),
        }
    }
    let fail = |stage: usize, reason: String| Ok(HpOutcome::Failed { stage, reason });

    let alphas: Vec<&HpGen> = state
        .gens
        .iter()
        .filter(|g| matches!(g.kind, GenKind::Alpha))
        .collect();
    let betas: Vec<&HpGen> = state
        .gens
        .iter()
        .filter(|g| matches!(g.kind, GenKind::Beta { .. }))
        .collect();
    if alphas.len() != s {
        return fail(
            n,
            format!(
                "expected {} exceptional generators, found {}",
                s,
                alphas.len()
            ),
        );
    }
    let mut free_used: Vec<usize> = betas
        .iter()
        .filter_map(|g| match g.kind {
            GenKind::Beta { free_var } => Some(free_var),
            GenKind::Alpha => None,
        })
        .collect();
    free_used.sort_unstable();
    free_used.dedup();
    if betas.len() != n - s || free_used.len() != n - s {
        return fail(
            n,
            "free coordinates are not matched one to one by the mixed generators".into(),
        );
    }
    let alpha_rows: Vec<Vec<Rat>> = alphas
        .iter()
        .map(|g| {
            (0..n)
                .filter(|&i| exceptional[i])
                .map(|i| Rat::from_integer(g.monomial.0[i].into()))
                .collect()
        })
        .collect();
    if linalg::rank(&alpha_rows) != s {
        return fail(
            n,
            "exceptional generator exponents are rationally dependent".into(),
        );
    }
    for pair in state.gens.windows(2) {
        if !pair[0].exc(&exceptional).divides(&pair[1].exc(&exceptional)) {
            return fail(n, "merged exponent chain is not totally ordered".into());
        }
    }

    let gen_forms: Vec<Vec<Polynomial>> = state
        .gens
        .iter()
        .map(|g| {
            log_differential(
                &exceptional,
                &Polynomial::term(n, g.monomial.clone(), Rat::one()),
            )
        })
        .collect();
    let verified_to = if state.truncated {
        Some(state.trunc)
    } else {
        None
    };
    for (i, comp) in state.chart.components.iter().enumerate() {
        let target = log_differential(&exceptional, comp);
        match form_membership(&exceptional, &target, &gen_forms, verified_to)? {
            Membership::Member { .. } => {}
            Membership::Obstructed { degree, .. } => {
                return fail(
                    n,
                    format!(
                        "differential of component {} escapes the module at weighted degree {}",
                        i + 1,
                        degree
                    ),
                );
            }
        }
    }

    let gamma_sums = match hp_fitting_exponents(&state.chart, &state.gens) {
        Ok(sums) => sums,
        Err(Error::Unsupported(reason)) => return fail(n, reason),
        Err(e) => return Err(e),
    };

    let mut strengthened = true;
    let mut preceding: Vec<Monomial> = Vec::new();
    for g in &state.gens {
        match g.kind {
            GenKind::Alpha => preceding.push(g.monomial.clone()),
            GenKind::Beta { .. } => {
                if !rational_span_contains(&preceding, &g.monomial, &exceptional) {
                    strengthened = false;
                }
            }
        }
    }

    Ok(HpOutcome::Certified(Box::new(HpCertificate {
        chart: state.chart,
        gens: state.gens,
        gamma_sums,
        strengthened,
        truncated: state.truncated,
        trunc: state.trunc,
    })))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charts::Frame;

    fn frame(names: &[&str], exceptional: &[bool]) -> Frame {
        Frame::new(
            names.iter().map(|s| s.to_string()).collect(),
            exceptional.to_vec(),
        )
    }

    fn chart(names: &[&str], exceptional: &[bool], comps: &[&str]) -> Chart {
        let f = frame(names, exceptional);
        let components = comps.iter().map(|s| f.parse(s).unwrap()).collect();
        Chart::new(f, components, "test")
    }

    #[test]
    fn log_differential_uses_the_mixed_basis() {
        let f = frame(&["x", "v"], &[true, false]);
        let p = f.parse("x^2*v + x^3").unwrap();
        let d = log_differential(&f.exceptional, &p);
        assert_eq!(f.print(&d[0]), "3*x^3 + 2*x^2*v");
        assert_eq!(f.print(&d[1]), "x^2");
    }

    #[test]
    fn membership_finds_a_polynomial_witness() {
        let f = frame(&["x", "y", "w"], &[true, true, false]);
        let exc = &f.exceptional;
        let target = log_differential(exc, &f.parse("x^6*y^3").unwrap());
        let gens = vec![
            log_differential(exc, &f.parse("x^4*y^2").unwrap()),
            log_differential(exc, &f.parse("x^2*y").unwrap()),
        ];
        let Membership::Member { witness, .. } =
            form_membership(exc, &target, &gens, None).unwrap()
        else {
            panic!("expected membership");
        };
        let mut acc = vec![Polynomial::zero(3); 3];
        for (wit, g) in witness.iter().zip(&gens) {
            for s in 0..3 {
                acc[s] = acc[s].add(&wit.mul(&g[s]));
            }
        }
        assert_eq!(acc, target);
    }

    #[test]
    fn membership_reports_the_obstruction_degree() {
        let f = frame(&["x", "y", "w"], &[true, true, false]);
        let exc = &f.exceptional;
        let target = log_differential(exc, &f.parse("x^9*y^5").unwrap());
        let gens = vec![
            log_differential(exc, &f.parse("x^4*y^2").unwrap()),
            log_differential(exc, &f.parse("x^8*y^4*w").unwrap()),
        ];
        let Membership::Obstructed { degree, slot } =
            form_membership(exc, &target, &gens, None).unwrap()
        else {
            panic!("expected an obstruction");
        };
        assert_eq!(degree, 14);
        assert_eq!(slot, Some(1));
    }

    #[test]
    fn certificate_of_a_normal_crossings_chart() {
        let c = chart(
            &["x", "v", "w"],
            &[true, false, false],
            &["x^2", "x^4*(x*v + w)", "x^5*v"],
        );
        let HpOutcome::Certified(cert) = hp_certificate(&c, 12).unwrap() else {
            panic!("expected a certificate");
        };
        assert!(!cert.truncated);
        assert_eq!(cert.gens.len(), 3);
        assert!(matches!(cert.gens[0].kind, GenKind::Alpha));
        assert_eq!(cert.gens[0].monomial, Monomial(vec![2, 0, 0]));
        assert!(matches!(cert.gens[1].kind, GenKind::Beta { free_var: 2 }));
        assert_eq!(cert.gens[1].monomial, Monomial(vec![4, 0, 1]));
        assert!(matches!(cert.gens[2].kind, GenKind::Beta { free_var: 1 }));
        assert_eq!(cert.gens[2].monomial, Monomial(vec![5, 1, 0]));
        assert_eq!(
            cert.gamma_sums,
            vec![
                Monomial(vec![2, 0, 0]),
                Monomial(vec![6, 0, 0]),
                Monomial(vec![11, 0, 0])
            ]
        );
        assert!(cert.strengthened);
        let f = &cert.chart.frame;
        assert_eq!(f.print(&cert.chart.components[1]), "x^4*w");
    }

    #[test]
    fn certificate_fails_at_an_unresolved_origin() {
        let c = chart(
            &["u", "v", "w"],
            &[true, false, false],
            &["u^2", "u^3*(v^2 + u*w)", "u^4*v"],
        );
        let HpOutcome::Failed { stage, reason } = hp_certificate(&c, 12).unwrap() else {
            panic!("expected failure");
        };
        assert_eq!(stage, 1);
        assert!(reason.contains("linear free coordinate"), "{reason}");
    }

    #[test]
    fn alpha_change_absorbs_a_unit_with_least_norm_exponents() {
        let c = chart(
            &["u1", "u2"],
            &[true, true],
            &["u1^2*u2^2", "u1^3*u2^4 + u1^4*u2^5"],
        );
        let HpOutcome::Certified(cert) = hp_certificate(&c, 16).unwrap() else {
            panic!("expected a certificate");
        };
        assert!(cert.truncated);
        assert_eq!(cert.gens[0].monomial, Monomial(vec![2, 2]));
        assert_eq!(cert.gens[1].monomial, Monomial(vec![3, 4]));
        assert_eq!(
            cert.gamma_sums,
            vec![Monomial(vec![2, 2]), Monomial(vec![5, 6])]
        );
        let f = &cert.chart.frame;
        assert_eq!(f.print(&cert.chart.components[0]), "u1^2*u2^2");
        assert_eq!(f.print(&cert.chart.components[1]), "u1^3*u2^4");
    }

    #[test]
    fn beta_change_with_nonlinear_tail_is_truncated() {
        let c = chart(
            &["x", "v"],
            &[true, false],
            &["x^3", "x^4*(v + v^2)"],
        );
        let HpOutcome::Certified(cert) = hp_certificate(&c, 10).unwrap() else {
            panic!("expected a certificate");
        };
        assert!(cert.truncated);
        assert_eq!(cert.gens[1].monomial, Monomial(vec![4, 1]));
        let f = &cert.chart.frame;
        assert_eq!(f.print(&cert.chart.components[1]), "x^4*v");
    }

    #[test]
    fn subring_terms_are_split_off() {
        let gens = vec![Monomial(vec![2, 0, 0]), Monomial(vec![4, 0, 1])];
        let f = frame(&["x", "v", "w"], &[true, false, false]);
        let p = f.parse("x^2 + x^6*w + x^4 + x^5*v").unwrap();
        let (inside, rest) = subring_split(&p, &gens);
        assert_eq!(f.print(&inside), "x^6*w + x^4 + x^2");
        assert_eq!(f.print(&rest), "x^5*v");
    }
}
