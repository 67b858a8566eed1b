//! Monomial ideals and the combinatorial side of principalization:
//! staircase normal forms, monomialization of polynomial generators,
//! residual factors along the exceptional divisor, and Newton-style
//! principalization by blowups in pairs of coordinates.

use std::collections::BTreeSet;

use crate::algebra::{Monomial, Polynomial};
use crate::error::{Error, Result};

/// Cap on the number of blowups a single principalization may take.
pub const PRINCIPALIZATION_STEP_CAP: usize = 64;

/// Monomial ideal in staircase normal form: the minimal generators under
/// divisibility, sorted. The empty list is the zero ideal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialIdeal {
    n_vars: usize,
    gens: Vec<Monomial>,
}

impl MonomialIdeal {
    pub fn zero(n_vars: usize) -> Self {
        MonomialIdeal {
            n_vars,
            gens: Vec::new(),
        }
    }

    pub fn unit(n_vars: usize) -> Self {
        Self::principal(Monomial::unit(n_vars))
    }

    pub fn principal(m: Monomial) -> Self {
        MonomialIdeal {
            n_vars: m.n_vars(),
            gens: vec![m],
        }
    }

    /// Builds the ideal from arbitrary monomial generators, reducing to the
    /// minimal antichain.
    pub fn from_gens(n_vars: usize, gens: Vec<Monomial>) -> Self {
        let set: BTreeSet<Monomial> = gens.into_iter().collect();
        let mut minimal: Vec<Monomial> = Vec::new();
        // BTreeSet iterates in graded lex order, so earlier elements never
        // strictly divide later ones of smaller degree; one pass suffices.
        for m in set {
            if !minimal.iter().any(|g| g.divides(&m)) {
                minimal.push(m);
            }
        }
        MonomialIdeal {
            n_vars,
            gens: minimal,
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn gens(&self) -> &[Monomial] {
        &self.gens
    }

    pub fn is_zero(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn is_unit_ideal(&self) -> bool {
        self.gens.len() == 1 && self.gens[0].is_unit()
    }

    /// The single generator when the ideal is principal and nonzero.
    pub fn as_principal(&self) -> Option<&Monomial> {
        if self.gens.len() == 1 {
            Some(&self.gens[0])
        } else {
            None
        }
    }

    pub fn contains_monomial(&self, m: &Monomial) -> bool {
        self.gens.iter().any(|g| g.divides(m))
    }

    pub fn contains(&self, other: &MonomialIdeal) -> bool {
        other.gens.iter().all(|m| self.contains_monomial(m))
    }

    /// Polynomial membership. A polynomial lies in a monomial ideal exactly
    /// when each of its terms does.
    pub fn contains_poly(&self, p: &Polynomial) -> bool {
        p.terms().all(|(m, _)| self.contains_monomial(m))
    }

    pub fn sum(&self, other: &MonomialIdeal) -> MonomialIdeal {
        let mut gens = self.gens.clone();
        gens.extend(other.gens.iter().cloned());
        MonomialIdeal::from_gens(self.n_vars, gens)
    }

    pub fn product(&self, other: &MonomialIdeal) -> MonomialIdeal {
        let mut gens = Vec::new();
        for a in &self.gens {
            for b in &other.gens {
                gens.push(a.mul(b));
            }
        }
        MonomialIdeal::from_gens(self.n_vars, gens)
    }

    pub fn mul_monomial(&self, m: &Monomial) -> MonomialIdeal {
        MonomialIdeal {
            n_vars: self.n_vars,
            gens: self.gens.iter().map(|g| g.mul(m)).collect(),
        }
    }

    /// Total transform under the blowup in the pair `(i, j)`, in the chart
    /// of coordinate `chart` (one of the two): the other coordinate's
    /// exponent is added onto the chart coordinate.
    pub fn blowup_pair_transform(&self, i: usize, j: usize, chart: usize) -> MonomialIdeal {
        let other = if chart == i { j } else { i };
        let gens = self
            .gens
            .iter()
            .map(|g| {
                let mut e = g.0.clone();
                e[chart] += e[other];
                Monomial(e)
            })
            .collect();
        MonomialIdeal::from_gens(self.n_vars, gens)
    }

    /// Total transform under the blowup of an arbitrary coordinate center,
    /// in the chart of one of its coordinates: the chart coordinate's
    /// exponent becomes the total center degree of each generator.
    pub fn blowup_center_transform(&self, center: &[usize], chart: usize) -> MonomialIdeal {
        let gens = self
            .gens
            .iter()
            .map(|g| {
                let total: u32 = center.iter().map(|&i| g.0[i]).sum();
                let mut e = g.0.clone();
                e[chart] = total;
                Monomial(e)
            })
            .collect();
        MonomialIdeal::from_gens(self.n_vars, gens)
    }

    /// Weak transform under the same blowup: the total transform with the
    /// largest common power of the chart coordinate divided out. Returns
    /// the stripped exponent together with the residual ideal.
    pub fn weak_transform(&self, i: usize, j: usize, chart: usize) -> (u32, MonomialIdeal) {
        let total = self.blowup_pair_transform(i, j, chart);
        let Some(strip) = total.gens.iter().map(|g| g.0[chart]).min() else {
            return (0, total);
        };
        let gens = total
            .gens
            .iter()
            .map(|g| {
                let mut e = g.0.clone();
                e[chart] -= strip;
                Monomial(e)
            })
            .collect();
        (strip, MonomialIdeal::from_gens(self.n_vars, gens))
    }
}

/// `m^k` for the maximal ideal `m` of the selected variables: all degree
/// `k` monomials in those variables.
pub fn maximal_power(n_vars: usize, vars: &[usize], k: u32) -> MonomialIdeal {
    if vars.is_empty() {
        return if k == 0 {
            MonomialIdeal::unit(n_vars)
        } else {
            MonomialIdeal::zero(n_vars)
        };
    }
    let mut gens = Vec::new();
    let mut stack = vec![(0usize, Monomial::unit(n_vars), k)];
    while let Some((pos, m, rem)) = stack.pop() {
        if pos + 1 == vars.len() {
            let mut e = m;
            e.0[vars[pos]] += rem;
            gens.push(e);
            continue;
        }
        for take in 0..=rem {
            let mut e = m.clone();
            e.0[vars[pos]] += take;
            stack.push((pos + 1, e, rem - take));
        }
    }
    MonomialIdeal::from_gens(n_vars, gens)
}

/// The monomial content of a polynomial when it is a monomial times a unit.
pub fn monomial_times_unit(p: &Polynomial) -> Option<Monomial> {
    let m = p.monomial_gcd()?;
    let cofactor = p.div_exact_monomial(&m).ok()?;
    if cofactor.is_unit_at_origin() {
        Some(m)
    } else {
        None
    }
}

/// Monomializes an ideal given by polynomial generators: every nonzero
/// generator must be a monomial times a unit. `None` when some generator
/// is not of that shape, in which case staircase comparisons are out of
/// reach and callers report the question as undecidable.
pub fn monomialize(n_vars: usize, gens: &[Polynomial]) -> Option<MonomialIdeal> {
    let mut out = Vec::new();
    for g in gens {
        if g.is_zero() {
            continue;
        }
        out.push(monomial_times_unit(g)?);
    }
    Some(MonomialIdeal::from_gens(n_vars, out))
}

/// Like [`monomialize`], but also returns each input generator's factored
/// form `(monomial, unit)`, aligned with the input slice. Zero generators
/// get `None`.
pub fn monomialize_with_units(
    n_vars: usize,
    gens: &[Polynomial],
) -> Option<(MonomialIdeal, Vec<Option<(Monomial, Polynomial)>>)> {
    let mut table = Vec::with_capacity(gens.len());
    let mut out = Vec::new();
    for g in gens {
        if g.is_zero() {
            table.push(None);
            continue;
        }
        let m = monomial_times_unit(g)?;
        let unit = g.div_exact_monomial(&m).ok()?;
        out.push(m.clone());
        table.push(Some((m, unit)));
    }
    Some((MonomialIdeal::from_gens(n_vars, out), table))
}

/// Staircase of a polynomially generated ideal, when decidable: the
/// monomial ideal spanned by the generators of monomial-times-unit shape,
/// provided every remaining generator lies in it termwise. In that case the
/// two ideals are equal. `None` when some generator escapes the monomial
/// part, which leaves equality outside the decidable fragment.
pub fn decide_staircase(n_vars: usize, gens: &[Polynomial]) -> Option<MonomialIdeal> {
    let mut monomial_gens = Vec::new();
    let mut rest = Vec::new();
    for g in gens {
        if g.is_zero() {
            continue;
        }
        match monomial_times_unit(g) {
            Some(m) => monomial_gens.push(m),
            None => rest.push(g),
        }
    }
    let ideal = MonomialIdeal::from_gens(n_vars, monomial_gens);
    if rest.iter().all(|g| ideal.contains_poly(g)) {
        Some(ideal)
    } else {
        None
    }
}

/// Factors the ideal as `u^c * residual` where `u^c` is the largest
/// monomial in the selected (exceptional) variables dividing every
/// generator. Division is exact by construction.
pub fn residual_factor(gens: &[Polynomial], exc_mask: &[bool]) -> (Monomial, Vec<Polynomial>) {
    let n = exc_mask.len();
    let nonzero: Vec<&Polynomial> = gens.iter().filter(|g| !g.is_zero()).collect();
    let mut c = match nonzero.first() {
        None => return (Monomial::unit(n), Vec::new()),
        Some(g) => g.monomial_gcd().unwrap().restricted_to(exc_mask),
    };
    for g in &nonzero[1..] {
        c = c.gcd(&g.monomial_gcd().unwrap().restricted_to(exc_mask));
    }
    let residual = nonzero
        .iter()
        .map(|g| g.div_exact_monomial(&c).expect("gcd divides"))
        .collect();
    (c, residual)
}

/// Whether an ideal is principal, generated by a monomial in the selected
/// variables times a unit. Decidable: after pulling out the common
/// exceptional factor, the residual ideal contains a unit exactly when one
/// of its generators does.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Principality {
    /// The ideal equals `(u^c)` for the returned exponent.
    Monomial(Monomial),
    /// Not principal in that sense; the witness is a residual generator of
    /// minimal order that is not a unit.
    Not { witness: Polynomial },
    /// The zero ideal.
    Zero,
}

pub fn principal_exceptional_monomial(gens: &[Polynomial], exc_mask: &[bool]) -> Principality {
    let (c, residual) = residual_factor(gens, exc_mask);
    if residual.is_empty() {
        return Principality::Zero;
    }
    if residual.iter().any(|g| g.is_unit_at_origin()) {
        return Principality::Monomial(c);
    }
    let witness = residual
        .iter()
        .min_by_key(|g| (g.order(), g.n_terms()))
        .unwrap()
        .clone();
    Principality::Not { witness }
}

/// Strips the largest power of variable `var` dividing every generator.
/// Returns the power and the divided generators; this is the weak
/// transform step after pulling an ideal back through a blowup.
pub fn strip_variable_power(gens: &[Polynomial], var: usize) -> (u32, Vec<Polynomial>) {
    let mut power = u32::MAX;
    for g in gens {
        if g.is_zero() {
            continue;
        }
        let m = g.monomial_gcd().unwrap();
        power = power.min(m.0[var]);
    }
    if power == u32::MAX {
        return (0, gens.to_vec());
    }
    let n = gens.iter().map(|g| g.n_vars()).next().unwrap_or(0);
    let mut divisor = Monomial::unit(n);
    divisor.0[var] = power;
    let out = gens
        .iter()
        .map(|g| g.div_exact_monomial(&divisor).expect("common power divides"))
        .collect();
    (power, out)
}

/// One chart in a principalization tree.
#[derive(Debug, Clone)]
pub struct NewtonNode {
    pub ideal: MonomialIdeal,
    pub parent: Option<usize>,
    /// The pair of coordinates blown up to create this chart, and which of
    /// the two is the chart coordinate.
    pub center: Option<(usize, usize)>,
    pub chart_var: Option<usize>,
    pub depth: usize,
    pub children: Vec<usize>,
}

/// Result of principalizing a monomial ideal by blowups in coordinate
/// pairs. Leaves carry principal ideals; `rounds` is the maximal number of
/// blowups along a branch.
#[derive(Debug, Clone)]
pub struct NewtonTree {
    pub nodes: Vec<NewtonNode>,
    pub rounds: usize,
}

impl NewtonTree {
    pub fn leaves(&self) -> Vec<usize> {
        (0..self.nodes.len())
            .filter(|&i| self.nodes[i].children.is_empty())
            .collect()
    }
}

/// Picks the lex-minimal pair of incomparable generators and from it the
/// pair of center coordinates with the largest balanced disagreement:
/// among coordinates where the first generator exceeds the second and
/// vice versa, the pair maximizing the smaller gap, ties broken by index.
/// Pairing the largest balanced gaps first removes equal disagreements in
/// both charts at once; taking the first disagreeing indices instead can
/// alternate between two coordinate pairs without ever shrinking either.
/// `None` when the ideal is already principal.
pub fn choose_center(ideal: &MonomialIdeal) -> Option<(usize, usize)> {
    let gens = ideal.gens();
    for a in 0..gens.len() {
        for b in (a + 1)..gens.len() {
            let (g, h) = (&gens[a], &gens[b]);
            if g.divides(h) || h.divides(g) {
                continue;
            }
            let n = g.n_vars();
            let mut best: Option<(u32, usize, usize)> = None;
            for i in (0..n).filter(|&k| g.0[k] > h.0[k]) {
                for j in (0..n).filter(|&k| g.0[k] < h.0[k]) {
                    let balance = (g.0[i] - h.0[i]).min(h.0[j] - g.0[j]);
                    let candidate = (balance, i.min(j), i.max(j));
                    let better = match best {
                        None => true,
                        Some((bal, lo, hi)) => {
                            balance > bal
                                || (balance == bal && (candidate.1, candidate.2) < (lo, hi))
                        }
                    };
                    if better {
                        best = Some(candidate);
                    }
                }
            }
            let (_, lo, hi) = best.unwrap();
            return Some((lo, hi));
        }
    }
    None
}

/// Principalizes by iterated blowups in pairs of allowed coordinates.
/// Deterministic; fails if a chosen center leaves the allowed set or the
/// step cap is hit.
pub fn newton_principalize(
    ideal: &MonomialIdeal,
    allowed: &[bool],
    cap: usize,
) -> Result<NewtonTree> {
    if ideal.is_zero() {
        return Err(Error::Unsupported(
            "cannot principalize the zero ideal".into(),
        ));
    }
    let mut tree = NewtonTree {
        nodes: vec![NewtonNode {
            ideal: ideal.clone(),
            parent: None,
            center: None,
            chart_var: None,
            depth: 0,
            children: Vec::new(),
        }],
        rounds: 0,
    };
    let mut queue = vec![0usize];
    let mut steps = 0usize;
    while let Some(node) = queue.pop() {
        let Some((i, j)) = choose_center(&tree.nodes[node].ideal) else {
            continue;
        };
        if !allowed[i] || !allowed[j] {
            return Err(Error::Unsupported(format!(
                "principalization center ({i}, {j}) leaves the allowed coordinate set"
            )));
        }
        steps += 1;
        if steps > cap {
            return Err(Error::StepLimit(format!(
                "principalization exceeded {cap} blowups"
            )));
        }
        let depth = tree.nodes[node].depth + 1;
        tree.rounds = tree.rounds.max(depth);
        for chart in [i, j] {
            let child_ideal = tree.nodes[node].ideal.blowup_pair_transform(i, j, chart);
            let id = tree.nodes.len();
            tree.nodes.push(NewtonNode {
                ideal: child_ideal,
                parent: Some(node),
                center: Some((i, j)),
                chart_var: Some(chart),
                depth,
                children: Vec::new(),
            });
            tree.nodes[node].children.push(id);
            queue.push(id);
        }
    }
    Ok(tree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::rat_int;

    fn m(e: &[u32]) -> Monomial {
        Monomial(e.to_vec())
    }

    #[test]
    fn staircase_is_minimal_antichain() {
        let i = MonomialIdeal::from_gens(2, vec![m(&[2, 0]), m(&[2, 1]), m(&[0, 3])]);
        assert_eq!(i.gens(), &[m(&[2, 0]), m(&[0, 3])]);
        assert!(i.contains_monomial(&m(&[2, 5])));
        assert!(!i.contains_monomial(&m(&[1, 2])));
    }

    #[test]
    fn sum_product_and_membership() {
        let a = MonomialIdeal::from_gens(2, vec![m(&[1, 0])]);
        let b = MonomialIdeal::from_gens(2, vec![m(&[0, 2])]);
        let s = a.sum(&b);
        assert_eq!(s.gens(), &[m(&[1, 0]), m(&[0, 2])]);
        let p = a.product(&b);
        assert_eq!(p.gens(), &[m(&[1, 2])]);
        assert!(s.contains(&p));
        assert!(!p.contains(&s));
    }

    #[test]
    fn maximal_power_lists_compositions() {
        let i = maximal_power(3, &[0, 1], 2);
        assert_eq!(
            i.gens(),
            &[m(&[0, 2, 0]), m(&[1, 1, 0]), m(&[2, 0, 0])]
        );
    }

    #[test]
    fn weak_transform_strips_the_chart_coordinate() {
        let i = MonomialIdeal::from_gens(2, vec![m(&[1, 0]), m(&[0, 2])]);
        let (strip, weak) = i.weak_transform(0, 1, 0);
        assert_eq!(strip, 1);
        assert_eq!(weak.gens(), &[m(&[0, 0])]);
        let (strip, weak) = i.weak_transform(0, 1, 1);
        assert_eq!(strip, 1);
        assert_eq!(weak.gens(), &[m(&[0, 1]), m(&[1, 0])]);
    }

    #[test]
    fn center_transform_collects_the_total_center_degree() {
        let i = MonomialIdeal::from_gens(3, vec![m(&[3, 0, 0]), m(&[1, 1, 0]), m(&[0, 0, 2])]);
        let t = i.blowup_center_transform(&[0, 1, 2], 1);
        assert_eq!(t.gens(), &[m(&[1, 2, 0]), m(&[0, 2, 2])]);
        let pair = i.blowup_center_transform(&[0, 1], 0);
        assert_eq!(pair.gens(), i.blowup_pair_transform(0, 1, 0).gens());
    }

    #[test]
    fn monomialization_detects_units() {
        let names = vec!["u".to_string(), "v".to_string()];
        let p = crate::algebra::parse_poly("u^2*(1+v)", &names).unwrap();
        assert_eq!(monomial_times_unit(&p), Some(m(&[2, 0])));
        let q = crate::algebra::parse_poly("u^2*(v+u)", &names).unwrap();
        assert_eq!(monomial_times_unit(&q), None);
        let ideal = monomialize(2, &[p.clone(), Polynomial::zero(2)]).unwrap();
        assert_eq!(ideal.gens(), &[m(&[2, 0])]);
        assert!(monomialize(2, &[q]).is_none());
    }

    #[test]
    fn residual_factor_strips_exceptional_content() {
        let names = vec!["u".to_string(), "v".to_string()];
        let g1 = crate::algebra::parse_poly("u^6", &names).unwrap();
        let g2 = crate::algebra::parse_poly("u^5*v", &names).unwrap();
        let (c, residual) = residual_factor(&[g1, g2], &[true, false]);
        assert_eq!(c, m(&[5, 0]));
        assert_eq!(residual[0], crate::algebra::parse_poly("u", &names).unwrap());
        assert_eq!(residual[1], crate::algebra::parse_poly("v", &names).unwrap());
    }

    #[test]
    fn principality_test_is_exact() {
        let names = vec!["u".to_string(), "v".to_string()];
        let exc = [true, false];
        let f0 = [crate::algebra::parse_poly("u^10", &names).unwrap()];
        match principal_exceptional_monomial(&f0, &exc) {
            Principality::Monomial(c) => assert_eq!(c, m(&[10, 0])),
            other => panic!("expected principal, got {other:?}"),
        }
        // A unit appears only in a combination of generators.
        let g1 = crate::algebra::parse_poly("u^2*(1+v)", &names).unwrap();
        let g2 = crate::algebra::parse_poly("u^2*v", &names).unwrap();
        match principal_exceptional_monomial(&[g1, g2], &exc) {
            Principality::Monomial(c) => assert_eq!(c, m(&[2, 0])),
            other => panic!("expected principal, got {other:?}"),
        }
        let h1 = crate::algebra::parse_poly("u^5*u", &names).unwrap();
        let h2 = crate::algebra::parse_poly("u^5*v", &names).unwrap();
        match principal_exceptional_monomial(&[h1, h2], &exc) {
            Principality::Not { witness } => {
                assert_eq!(witness, crate::algebra::parse_poly("u", &names).unwrap());
            }
            other => panic!("expected non-principal, got {other:?}"),
        }
    }

    #[test]
    fn strip_power_is_exact_division() {
        let names = vec!["u".to_string(), "v".to_string()];
        let g1 = crate::algebra::parse_poly("u^3*v", &names).unwrap();
        let g2 = crate::algebra::parse_poly("u^2*(v^2+u)", &names).unwrap();
        let (p, out) = strip_variable_power(&[g1, g2], 0);
        assert_eq!(p, 2);
        assert_eq!(out[0], crate::algebra::parse_poly("u*v", &names).unwrap());
        assert_eq!(out[1], crate::algebra::parse_poly("v^2+u", &names).unwrap());
    }

    #[test]
    fn principalization_of_a_staircase_with_two_steps() {
        let ideal = MonomialIdeal::from_gens(2, vec![m(&[1, 0]), m(&[0, 2])]);
        let tree = newton_principalize(&ideal, &[true, true], 64).unwrap();
        assert_eq!(tree.rounds, 2);
        for leaf in tree.leaves() {
            assert!(tree.nodes[leaf].ideal.as_principal().is_some());
        }
        // First chart of the first blowup is principal immediately.
        let first_children = &tree.nodes[0].children;
        assert_eq!(first_children.len(), 2);
        assert!(tree.nodes[first_children[0]]
            .ideal
            .as_principal()
            .is_some());
        assert!(tree.nodes[first_children[1]].ideal.as_principal().is_none());
    }

    #[test]
    fn principalization_respects_allowed_set() {
        let ideal = MonomialIdeal::from_gens(3, vec![m(&[1, 0, 0]), m(&[0, 0, 2])]);
        assert!(newton_principalize(&ideal, &[true, true, false], 64).is_err());
        assert!(newton_principalize(&ideal, &[true, true, true], 64).is_ok());
    }

    #[test]
    fn skew_disagreements_do_not_cycle() {
        // First-index center choice alternates between (0, 2) and (0, 1)
        // on this ideal forever; the balanced-gap choice starts at (1, 2)
        // and finishes in a few rounds.
        let ideal = MonomialIdeal::from_gens(3, vec![m(&[0, 0, 2]), m(&[1, 2, 0])]);
        assert_eq!(choose_center(&ideal), Some((1, 2)));
        let tree = newton_principalize(&ideal, &[true, true, true], 64).unwrap();
        assert!(tree.rounds <= 8);
        for leaf in tree.leaves() {
            assert!(tree.nodes[leaf].ideal.as_principal().is_some());
        }
    }

    #[test]
    fn already_principal_needs_no_rounds() {
        let ideal = MonomialIdeal::principal(m(&[3, 1]));
        let tree = newton_principalize(&ideal, &[true, true], 64).unwrap();
        assert_eq!(tree.rounds, 0);
        assert_eq!(tree.nodes.len(), 1);
        let _ = rat_int(0);
    }
}
