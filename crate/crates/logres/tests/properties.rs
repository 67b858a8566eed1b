//! Randomized property tests: ring and division laws in the polynomial
//! kernel, blowup transform identities on charts and monomial ideals,
//! Fitting ideal symmetries, and coherence of the pointwise invariants.

use std::collections::BTreeSet;

use proptest::prelude::*;

use logres::algebra::linalg::least_norm_solution;
use logres::algebra::poly::{rat_frac, rat_int};
use logres::algebra::{
    parse_poly, print_poly, Monomial, Order, Polynomial, Rat, TruncatedSeries,
};
use logres::charts::{Chart, ChartTree, Frame};
use logres::ideal::{newton_principalize, residual_factor, MonomialIdeal};
use logres::invariants::{check_rho_d_coherence, rho, to_prelim, to_weierstrass};
use logres::logfit::{fitting_ideal, log_jacobian, log_rank_at_origin, MinorCache};
use logres::pipeline::{resolve3d, Config};
use logres::scenario::Scenario;

fn mono(exps: &[u32]) -> Monomial {
    Monomial(exps.to_vec())
}

fn var_power(n: usize, i: usize, e: u32) -> Monomial {
    let mut m = Monomial::unit(n);
    m.0[i] = e;
    m
}

fn names(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

/// Cofactor-expansion determinant of a small square polynomial matrix,
/// independent of the minor evaluator under test.
fn det_poly(m: &[Vec<Polynomial>]) -> Polynomial {
    let nv = m[0][0].n_vars();
    if m.len() == 1 {
        return m[0][0].clone();
    }
    let mut acc = Polynomial::zero(nv);
    for (c, entry) in m[0].iter().enumerate() {
        if entry.is_zero() {
            continue;
        }
        let sub: Vec<Vec<Polynomial>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(cc, _)| cc != c)
                    .map(|(_, e)| e.clone())
                    .collect()
            })
            .collect();
        let term = entry.mul(&det_poly(&sub));
        acc = if c % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
    }
    acc
}

/// Cofactor-expansion determinant of a rational submatrix given by index
/// sets.
fn det_rat(m: &[Vec<Rat>], rows: &[usize], cols: &[usize]) -> Rat {
    if rows.len() == 1 {
        return m[rows[0]][cols[0]].clone();
    }
    let mut acc = rat_int(0);
    for (c, &col) in cols.iter().enumerate() {
        let sub_cols: Vec<usize> = cols.iter().copied().filter(|&cc| cc != col).collect();
        let term = m[rows[0]][col].clone() * det_rat(m, &rows[1..], &sub_cols);
        acc = if c % 2 == 0 { acc + term } else { acc - term };
    }
    acc
}

fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..(1 << n))
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|i| m & (1 << i) != 0).collect())
        .collect()
}

fn arb_rat() -> impl Strategy<Value = Rat> {
    (1i64..=9, 1i64..=4, any::<bool>())
        .prop_map(|(p, q, neg)| rat_frac(if neg { -p } else { p }, q))
}

fn arb_monomial(n: usize, max_exp: u32) -> impl Strategy<Value = Monomial> {
    prop::collection::vec(0..=max_exp, n).prop_map(Monomial)
}

fn arb_poly(n: usize, max_terms: usize, max_exp: u32) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((arb_monomial(n, max_exp), arb_rat()), 1..=max_terms).prop_map(
        move |terms| {
            let mut p = Polynomial::zero(n);
            for (m, c) in terms {
                p.add_term(m, c);
            }
            p
        },
    )
}

fn arb_nonzero_poly(n: usize, max_terms: usize, max_exp: u32) -> impl Strategy<Value = Polynomial> {
    arb_poly(n, max_terms, max_exp).prop_filter("nonzero", |p| !p.is_zero())
}

/// A unit series with constant term exactly one, so every rational
/// fractional power exists.
fn arb_unit_series(n: usize, trunc: u64) -> impl Strategy<Value = TruncatedSeries> {
    arb_poly(n, 4, 3).prop_map(move |p| {
        let mut q = Polynomial::one(n);
        for (m, c) in p.terms() {
            if m.degree() >= 1 {
                q.add_term(m.clone(), c.clone());
            }
        }
        TruncatedSeries::new(q, trunc)
    })
}

fn arb_ideal(n: usize) -> impl Strategy<Value = MonomialIdeal> {
    prop::collection::vec(arb_monomial(n, 4), 1..=3)
        .prop_map(move |gens| MonomialIdeal::from_gens(n, gens))
}

fn arb_chart3() -> impl Strategy<Value = Chart> {
    (
        prop::collection::vec(arb_nonzero_poly(3, 3, 3), 2..=3),
        prop::collection::vec(any::<bool>(), 3),
    )
        .prop_map(|(components, exceptional)| {
            let frame = Frame::new(names(&["x0", "x1", "x2"]), exceptional);
            Chart::new(frame, components, "root")
        })
}

/// A surface presentation with one exceptional coordinate: a monomial
/// component, a component with contact along `v`, and a `v`-multiple.
fn one_point_chart() -> impl Strategy<Value = Chart> {
    (
        1u32..=2,
        1u32..=2,
        2u32..=3,
        0usize..=2,
        1u32..=2,
        0u32..=1,
        2u32..=3,
        prop::collection::vec(arb_rat(), 4),
    )
        .prop_map(|(a, pe, d, tail, r, jt, qe, c)| {
            let frame = Frame::new(names(&["u", "v", "w"]), vec![true, false, false]);
            let p = a + pe;
            let sigma1 = Polynomial::term(3, mono(&[a, 0, 0]), c[0].clone());
            let mut sigma2 = Polynomial::term(3, mono(&[p, d, 0]), c[1].clone());
            match tail {
                1 => sigma2.add_term(mono(&[p + r, jt, 0]), c[2].clone()),
                2 => sigma2.add_term(mono(&[p + r, 0, 1]), c[2].clone()),
                _ => {}
            }
            let sigma3 = Polynomial::term(3, mono(&[a + qe, 1, 0]), c[3].clone());
            Chart::new(frame, vec![sigma1, sigma2, sigma3], "root")
        })
}

/// The two-exceptional-coordinate variant of the same family.
fn two_point_chart() -> impl Strategy<Value = Chart> {
    (
        (1u32..=2, 1u32..=2),
        (1u32..=2, 0u32..=1),
        2u32..=3,
        (1u32..=2, 0u32..=2),
        1u32..=2,
        prop::collection::vec(arb_rat(), 3),
    )
        .prop_map(|((a1, a2), (p1, p2), d, (r1, r2), qe, c)| {
            let frame = Frame::new(names(&["u1", "u2", "v"]), vec![true, true, false]);
            let sigma1 = Polynomial::term(3, mono(&[a1, a2, 0]), c[0].clone());
            let mut sigma2 = Polynomial::term(3, mono(&[a1 + p1, a2 + p2, d]), c[1].clone());
            sigma2.add_term(mono(&[a1 + p1 + r1, a2 + p2 + r2, 0]), c[2].clone());
            let sigma3 = Polynomial::term(3, mono(&[a1 + qe, a2 + qe, 1]), rat_int(1));
            Chart::new(frame, vec![sigma1, sigma2, sigma3], "root")
        })
}

fn surface_chart() -> impl Strategy<Value = Chart> {
    prop_oneof![one_point_chart(), two_point_chart()]
}

fn small_point_entry() -> impl Strategy<Value = Rat> {
    prop_oneof![
        Just(rat_int(0)),
        Just(rat_int(1)),
        Just(rat_int(-1)),
        Just(rat_frac(1, 2)),
        Just(rat_frac(-1, 3)),
        Just(rat_int(2)),
    ]
}

proptest! {
    #[test]
    fn monomial_division_reassembles(
        p in arb_poly(3, 5, 4),
        m in arb_monomial(3, 3),
    ) {
        let (q, r) = p.divrem_monomial(&m);
        prop_assert_eq!(q.mul_monomial(&m, &rat_int(1)).add(&r), p);
        prop_assert!(r.terms().all(|(t, _)| !m.divides(t)));
    }

    #[test]
    fn order_is_additive_on_products(
        p in arb_nonzero_poly(3, 4, 3),
        q in arb_nonzero_poly(3, 4, 3),
    ) {
        let (Order::Finite(a), Order::Finite(b)) = (p.order(), q.order()) else {
            return Err(TestCaseError::fail("nonzero polynomial with infinite order"));
        };
        prop_assert_eq!(p.mul(&q).order(), Order::Finite(a + b));
    }

    #[test]
    fn substitution_is_a_ring_map(
        p in arb_poly(2, 3, 2),
        q in arb_poly(2, 3, 2),
        args in prop::collection::vec(arb_poly(2, 2, 2), 2),
    ) {
        let sum = p.add(&q).substitute(&args);
        prop_assert_eq!(sum, p.substitute(&args).add(&q.substitute(&args)));
        let prod = p.mul(&q).substitute(&args);
        prop_assert_eq!(prod, p.substitute(&args).mul(&q.substitute(&args)));
    }

    #[test]
    fn printer_and_parser_roundtrip(p in arb_poly(3, 5, 4)) {
        let name_list = names(&["u", "v", "w"]);
        let printed = print_poly(&p, &name_list);
        let reparsed = parse_poly(&printed, &name_list).unwrap();
        prop_assert_eq!(reparsed, p);
    }

    #[test]
    fn least_norm_solution_satisfies_constraints(
        rows in prop::collection::vec(
            prop::collection::vec((-3i64..=3).prop_map(rat_int), 3),
            1..=3,
        ),
        rhs in prop::collection::vec((-3i64..=3).prop_map(rat_int), 1..=3),
    ) {
        let m = rows.len().min(rhs.len());
        let a = &rows[..m];
        let b = &rhs[..m];
        if let Some(x) = least_norm_solution(a, b) {
            for (row, want) in a.iter().zip(b) {
                let got: Rat = row.iter().zip(&x).map(|(c, xi)| c.clone() * xi.clone()).sum();
                prop_assert_eq!(&got, want);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fractional_power_roundtrips(s in arb_unit_series(2, 8), k in 2u32..=3) {
        let root = s.fractional_power(&rat_frac(1, k as i64)).unwrap();
        let back = root.fractional_power(&rat_int(k as i64)).unwrap();
        prop_assert_eq!(back.poly, s.poly);
    }

    #[test]
    fn weak_transform_matches_substitution_oracle(
        ideal in arb_ideal(3),
        i in 0usize..3,
        j in 0usize..3,
        pick in any::<bool>(),
    ) {
        prop_assume!(i != j);
        let chart = if pick { i } else { j };
        let other = if pick { j } else { i };
        let (power, transformed) = ideal.weak_transform(i, j, chart);

        let mut totals = Vec::new();
        for g in ideal.gens() {
            let mut e = g.clone();
            e.0[chart] += e.0[other];
            totals.push(e);
        }
        let min_power = totals.iter().map(|e| e.0[chart]).min().unwrap();
        for e in &mut totals {
            e.0[chart] -= min_power;
        }
        prop_assert_eq!(power, min_power);
        prop_assert_eq!(transformed, MonomialIdeal::from_gens(3, totals));
    }

    #[test]
    fn residual_factoring_is_idempotent(
        gens in prop::collection::vec(arb_nonzero_poly(3, 3, 3), 1..=3),
        exc in prop::collection::vec(any::<bool>(), 3),
    ) {
        let (_, residual) = residual_factor(&gens, &exc);
        let (again, stable) = residual_factor(&residual, &exc);
        prop_assert!(again.is_unit());
        prop_assert_eq!(stable, residual);
    }

    #[test]
    fn redundant_generators_change_nothing(
        ideal in arb_ideal(3),
        extra in arb_monomial(3, 3),
    ) {
        let mut gens = ideal.gens().to_vec();
        gens.push(ideal.gens()[0].mul(&extra));
        let widened = MonomialIdeal::from_gens(3, gens);
        prop_assert_eq!(widened, ideal);
    }

    #[test]
    fn newton_leaves_match_the_substitution_pullback(ideal in arb_ideal(3)) {
        let tree = match newton_principalize(&ideal, &[true, true, true], 64) {
            Ok(tree) => tree,
            Err(_) => return Err(TestCaseError::reject("hit the step cap")),
        };
        for leaf in tree.leaves() {
            prop_assert!(tree.nodes[leaf].ideal.as_principal().is_some());

            let mut steps = Vec::new();
            let mut at = leaf;
            while let Some(parent) = tree.nodes[at].parent {
                let (i, j) = tree.nodes[at].center.unwrap();
                steps.push((i, j, tree.nodes[at].chart_var.unwrap()));
                at = parent;
            }
            steps.reverse();

            let mut pulled: Vec<Polynomial> = ideal
                .gens()
                .iter()
                .map(|m| Polynomial::term(3, m.clone(), rat_int(1)))
                .collect();
            for (i, j, chart) in steps {
                let other = if chart == i { j } else { i };
                let args: Vec<Polynomial> = (0..3)
                    .map(|k| {
                        if k == other {
                            Polynomial::var(3, other).mul(&Polynomial::var(3, chart))
                        } else {
                            Polynomial::var(3, k)
                        }
                    })
                    .collect();
                pulled = pulled.iter().map(|p| p.substitute(&args)).collect();
            }
            let monomials: Vec<Monomial> = pulled
                .iter()
                .map(|p| p.as_single_term().unwrap().0.clone())
                .collect();
            prop_assert_eq!(
                &MonomialIdeal::from_gens(3, monomials),
                &tree.nodes[leaf].ideal
            );
        }
    }

    #[test]
    fn blowup_children_agree_on_the_overlap(
        chart in arb_chart3(),
        i in 0usize..3,
        j in 0usize..3,
    ) {
        prop_assume!(i != j);
        let children = chart.blowup(&[i, j]).unwrap();
        let (child_i, child_j) = (&children[0], &children[1]);
        for (pi, pj) in child_i.components.iter().zip(&child_j.components) {
            let mut mapped = Polynomial::zero(3);
            for (m, c) in pj.terms() {
                let mut e = m.clone();
                let (p, q) = (e.0[i], e.0[j]);
                e.0[i] = q;
                prop_assert!(q >= p, "transition exponent would be negative");
                e.0[j] = q - p;
                mapped.add_term(e, c.clone());
            }
            prop_assert_eq!(&mapped, pi);
        }
    }

    #[test]
    fn pullback_composes_along_tree_paths(
        root in arb_chart3(),
        first in (0usize..3, 0usize..3),
        second in (0usize..3, 0usize..3),
        lower in any::<bool>(),
    ) {
        prop_assume!(first.0 != first.1 && second.0 != second.1);
        let center1 = [first.0, first.1];
        let center2 = [second.0, second.1];

        let mut tree = ChartTree::new(root.clone());
        let kids = tree.apply_blowup(0, &center1).unwrap();
        let child = kids[if lower { 0 } else { 1 }];
        let grandkids = tree.apply_blowup(child, &center2).unwrap();
        let grandchild = grandkids[0];

        let args1 = root.blowup_substitution(&center1, center1[if lower { 0 } else { 1 }]);
        let args2 = tree.node(child).chart.blowup_substitution(&center2, center2[0]);
        let composed: Vec<Polynomial> = args1.iter().map(|p| p.substitute(&args2)).collect();

        for (orig, target) in root.components.iter().zip(&tree.node(grandchild).chart.components) {
            prop_assert_eq!(&orig.substitute(&composed), target);
        }
    }

    #[test]
    fn center_pullback_lands_on_the_new_exceptional(
        chart in arb_chart3(),
        i in 0usize..3,
        j in 0usize..3,
    ) {
        prop_assume!(i != j);
        let center = [i, j];
        for &chart_var in &center {
            let args = chart.blowup_substitution(&center, chart_var);
            for &c in &center {
                let pulled = Polynomial::var(3, c).substitute(&args);
                let (_, rem) = pulled.divrem_monomial(&var_power(3, chart_var, 1));
                prop_assert!(rem.is_zero());
            }
        }
    }

    #[test]
    fn top_minors_factor_through_the_plain_jacobian(chart in arb_chart3()) {
        let n = 3;
        let jac = log_jacobian(&chart);
        let mut cache = MinorCache::new(&jac);
        let cols_mask = (1u64 << n) - 1;

        let mut exc_product = Monomial::unit(n);
        for (k, &e) in chart.frame.exceptional.iter().enumerate() {
            if e {
                exc_product.0[k] = 1;
            }
        }

        let rows = chart.components.len();
        prop_assume!(rows >= n);
        for subset in subsets_of_size(rows, n) {
            let rows_mask = subset.iter().fold(0u64, |m, &r| m | (1 << r));
            let log_minor = cache.minor(rows_mask, cols_mask);

            let plain: Vec<Vec<Polynomial>> = subset
                .iter()
                .map(|&r| (0..n).map(|c| chart.components[r].derivative(c)).collect())
                .collect();
            let expected = det_poly(&plain).mul_monomial(&exc_product, &rat_int(1));
            prop_assert_eq!(&log_minor, &expected);
        }
    }

    #[test]
    fn fitting_generators_ignore_component_order(
        chart in arb_chart3(),
        perm_index in 0usize..6,
        k in 0usize..3,
    ) {
        const PERMS: [[usize; 3]; 6] = [
            [0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0],
        ];
        prop_assume!(chart.components.len() == 3);
        let perm = PERMS[perm_index];
        let shuffled = Chart::new(
            chart.frame.clone(),
            perm.iter().map(|&i| chart.components[i].clone()).collect(),
            "root",
        );

        let canon = |gens: Vec<Polynomial>| -> BTreeSet<String> {
            gens.iter()
                .map(|g| print_poly(&g.normalize_leading_sign(), &chart.frame.names))
                .collect()
        };
        prop_assert_eq!(
            canon(fitting_ideal(&chart, k).unwrap()),
            canon(fitting_ideal(&shuffled, k).unwrap())
        );
    }

    #[test]
    fn log_rank_agrees_with_origin_minors(chart in arb_chart3()) {
        let r = log_rank_at_origin(&chart);
        let m = log_jacobian(&chart).at_origin();
        let (rows, cols) = (m.len(), 3);

        if r + 1 <= rows.min(cols) {
            for rs in subsets_of_size(rows, r + 1) {
                for cs in subsets_of_size(cols, r + 1) {
                    prop_assert_eq!(det_rat(&m, &rs, &cs), rat_int(0));
                }
            }
        }
        if r > 0 {
            let mut witness = false;
            'outer: for rs in subsets_of_size(rows, r) {
                for cs in subsets_of_size(cols, r) {
                    if det_rat(&m, &rs, &cs) != rat_int(0) {
                        witness = true;
                        break 'outer;
                    }
                }
            }
            prop_assert!(witness, "no nonzero minor of the stated rank");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn contact_degree_and_residual_order_cohere(chart in surface_chart()) {
        check_rho_d_coherence(&chart, 16).unwrap();
    }

    #[test]
    fn weierstrass_data_reassembles(chart in surface_chart()) {
        let prelim = to_prelim(&chart, 16).unwrap();
        let weier = match to_weierstrass(&prelim) {
            Ok(w) => w,
            Err(_) => {
                // Refusal is only legitimate when no component has contact
                // with a free coordinate at all.
                prop_assert_eq!(prelim.d_invariant(), Order::Infinite);
                return Ok(());
            }
        };
        let p = &weier.prelim;
        let trunc = p.trunc;

        for (pos, g) in p.g.iter().enumerate() {
            let component = &p.chart.components[p.order[pos + 1]];
            let lhs = g.add(&p.t[pos].mul_monomial(&p.delta, &rat_int(1)));
            if p.truncated {
                prop_assert_eq!(lhs.truncate_deg(trunc), component.truncate_deg(trunc));
            } else {
                prop_assert_eq!(&lhs, component);
            }
        }

        let d = weier.d;
        for (i, t) in p.t.iter().enumerate() {
            let mut rebuilt = weier.t_tilde[i]
                .mul_monomial(&var_power(3, weier.v_index, d as u32), &rat_int(1));
            for (j, coeff) in weier.a[i].iter().enumerate() {
                rebuilt = rebuilt.add(
                    &coeff.mul_monomial(&var_power(3, weier.v_index, j as u32), &rat_int(1)),
                );
            }
            prop_assert_eq!(&rebuilt, t);
        }
        prop_assert!(weier.a[weier.main][d as usize - 1].is_zero());
        prop_assert!(weier.t_tilde[weier.main].is_unit_at_origin());
    }

    #[test]
    fn residual_order_is_semicontinuous_on_the_stratum(
        chart in surface_chart(),
        moves in prop::collection::vec(small_point_entry(), 2),
    ) {
        let mut point = Vec::new();
        let mut next = moves.into_iter();
        for &e in &chart.frame.exceptional {
            point.push(if e { rat_int(0) } else { next.next().unwrap() });
        }
        let moved = chart.recenter(&point).unwrap();
        prop_assert!(rho(&chart).unwrap() >= rho(&moved).unwrap());
    }

    #[test]
    fn residual_order_descends_under_combinatorial_blowups(chart in two_point_chart()) {
        let parent = rho(&chart).unwrap();
        for child in chart.blowup(&[0, 1]).unwrap() {
            prop_assert!(rho(&child).unwrap() <= parent);
        }
    }
}

#[test]
fn resolution_replays_are_bit_identical() {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden/ex1_scenario.json");
    let scenario = Scenario::from_json(&std::fs::read_to_string(path).unwrap()).unwrap();
    let config = Config::default();
    let first = resolve3d(&scenario, &config).unwrap().to_json().unwrap();
    let second = resolve3d(&scenario, &config).unwrap().to_json().unwrap();
    assert_eq!(first, second);
}
