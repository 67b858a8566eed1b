use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::monomial::Monomial;
use crate::error::{Error, Result};

/// Exact rational scalar used throughout.
pub type Rat = BigRational;

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat_frac(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

pub fn rat_pow(r: &Rat, e: u32) -> Rat {
    let mut acc = Rat::one();
    let mut base = r.clone();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    acc
}

/// Order of vanishing at the origin: the least total degree in the support.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Order {
    Finite(u64),
    Infinite,
}

impl Order {
    pub fn finite(self) -> Option<u64> {
        match self {
            Order::Finite(k) => Some(k),
            Order::Infinite => None,
        }
    }
}

impl std::fmt::Display for Order {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Order::Finite(k) => write!(f, "{k}"),
            Order::Infinite => write!(f, "infinity"),
        }
    }
}

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// Terms are kept in a map ordered by graded lex on the monomials, so all
/// traversals, printing included, are deterministic. Zero coefficients are
/// never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    n_vars: usize,
    terms: BTreeMap<Monomial, Rat>,
}

impl Polynomial {
    pub fn zero(n_vars: usize) -> Self {
        Polynomial {
            n_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(n_vars: usize) -> Self {
        Self::constant(n_vars, Rat::one())
    }

    pub fn constant(n_vars: usize, c: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::unit(n_vars), c);
        }
        Polynomial { n_vars, terms }
    }

    pub fn var(n_vars: usize, i: usize) -> Self {
        Self::term(n_vars, Monomial::var(n_vars, i), Rat::one())
    }

    pub fn term(n_vars: usize, m: Monomial, c: Rat) -> Self {
        assert_eq!(m.n_vars(), n_vars);
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { n_vars, terms }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in increasing graded lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    /// Terms in decreasing graded lex order (leading term first).
    pub fn terms_desc(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter().rev()
    }

    pub fn coeff(&self, m: &Monomial) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn constant_term(&self) -> Rat {
        self.coeff(&Monomial::unit(self.n_vars))
    }

    pub fn is_unit_at_origin(&self) -> bool {
        !self.constant_term().is_zero()
    }

    /// True when the polynomial is a single term.
    pub fn as_single_term(&self) -> Option<(&Monomial, &Rat)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: Rat) {
        assert_eq!(m.n_vars(), self.n_vars);
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.n_vars, other.n_vars);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial {
            n_vars: self.n_vars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.n_vars);
        }
        Polynomial {
            n_vars: self.n_vars,
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        self.mul_capped(other, None)
    }

    /// Product, dropping terms of total degree above `cap` when given.
    pub fn mul_capped(&self, other: &Polynomial, cap: Option<u64>) -> Polynomial {
        assert_eq!(self.n_vars, other.n_vars);
        let mut out = Polynomial::zero(self.n_vars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let m = m1.mul(m2);
                if let Some(cap) = cap {
                    if m.degree() > cap {
                        continue;
                    }
                }
                out.add_term(m, c1 * c2);
            }
        }
        out
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Rat) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.n_vars);
        }
        Polynomial {
            n_vars: self.n_vars,
            terms: self
                .terms
                .iter()
                .map(|(m0, c0)| (m0.mul(m), c0 * c))
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        self.pow_capped(k, None)
    }

    pub fn pow_capped(&self, k: u32, cap: Option<u64>) -> Polynomial {
        let mut acc = Polynomial::one(self.n_vars);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul_capped(&base, cap);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul_capped(&base, cap);
            }
        }
        acc
    }

    pub fn derivative(&self, i: usize) -> Polynomial {
        let mut out = Polynomial::zero(self.n_vars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.0[i] = e - 1;
            out.add_term(m2, c * Rat::from_integer(BigInt::from(e)));
        }
        out
    }

    /// Logarithmic derivative `x_i * d/dx_i`; keeps every exponent intact.
    pub fn log_derivative(&self, i: usize) -> Polynomial {
        let mut out = Polynomial::zero(self.n_vars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            out.add_term(m.clone(), c * Rat::from_integer(BigInt::from(e)));
        }
        out
    }

    pub fn order(&self) -> Order {
        self.terms
            .keys()
            .map(|m| m.degree())
            .min()
            .map_or(Order::Infinite, Order::Finite)
    }

    /// Order counting only the degrees of the variables selected by `mask`.
    pub fn order_on(&self, mask: &[bool]) -> Order {
        self.terms
            .keys()
            .map(|m| m.degree_on(mask))
            .min()
            .map_or(Order::Infinite, Order::Finite)
    }

    /// Greatest monomial dividing every term; `None` for the zero polynomial.
    pub fn monomial_gcd(&self) -> Option<Monomial> {
        let mut it = self.terms.keys();
        let first = it.next()?.clone();
        Some(it.fold(first, |acc, m| acc.gcd(m)))
    }

    /// Quotient and remainder on division by a monomial: the quotient collects
    /// the divisible terms, the remainder the rest, so `self = m*q + r`.
    pub fn divrem_monomial(&self, m: &Monomial) -> (Polynomial, Polynomial) {
        let mut q = Polynomial::zero(self.n_vars);
        let mut r = Polynomial::zero(self.n_vars);
        for (m0, c) in &self.terms {
            match m0.checked_div(m) {
                Some(m1) => q.add_term(m1, c.clone()),
                None => r.add_term(m0.clone(), c.clone()),
            }
        }
        (q, r)
    }

    pub fn div_exact_monomial(&self, m: &Monomial) -> Result<Polynomial> {
        let (q, r) = self.divrem_monomial(m);
        if r.is_zero() {
            Ok(q)
        } else {
            Err(Error::NotDivisible(format!(
                "a term is not divisible by the monomial with exponents {:?}",
                m.0
            )))
        }
    }

    /// Sets the variables selected by `mask` to zero.
    pub fn restrict_zero(&self, mask: &[bool]) -> Polynomial {
        Polynomial {
            n_vars: self.n_vars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.0.iter().zip(mask).all(|(&e, &z)| e == 0 || !z))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Keeps only the terms of total degree exactly `k`.
    pub fn homogeneous_part(&self, k: u64) -> Polynomial {
        Polynomial {
            n_vars: self.n_vars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == k)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Drops the terms of total degree above `cap`.
    pub fn truncate_deg(&self, cap: u64) -> Polynomial {
        Polynomial {
            n_vars: self.n_vars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() <= cap)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn max_degree(&self) -> Option<u64> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    /// Exact substitution of one polynomial per variable.
    pub fn substitute(&self, args: &[Polynomial]) -> Polynomial {
        self.substitute_capped(args, None)
    }

    /// Substitution dropping all terms of total degree above `cap`.
    pub fn substitute_capped(&self, args: &[Polynomial], cap: Option<u64>) -> Polynomial {
        assert_eq!(args.len(), self.n_vars);
        let out_vars = args
            .first()
            .map_or(self.n_vars, |p| p.n_vars());
        for a in args {
            assert_eq!(a.n_vars(), out_vars);
        }
        let mut powers: Vec<Vec<Polynomial>> = args
            .iter()
            .map(|a| vec![Polynomial::one(out_vars), a.clone()])
            .collect();
        let mut out = Polynomial::zero(out_vars);
        for (m, c) in &self.terms {
            let mut t = Polynomial::constant(out_vars, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let last = powers[i].last().unwrap();
                    let next = last.mul_capped(&args[i], cap);
                    powers[i].push(next);
                }
                t = t.mul_capped(&powers[i][e as usize], cap);
                if t.is_zero() {
                    break;
                }
            }
            out = out.add(&t);
        }
        out
    }

    /// Exact evaluation at a rational point.
    pub fn eval(&self, point: &[Rat]) -> Rat {
        assert_eq!(point.len(), self.n_vars);
        let mut acc = Rat::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t *= rat_pow(&point[i], e);
                }
            }
            acc += t;
        }
        acc
    }

    /// Content sign normalization: scales so the leading coefficient is
    /// positive, returning the scaled polynomial. Used to compare ideals
    /// generated up to a rational factor.
    pub fn normalize_leading_sign(&self) -> Polynomial {
        match self.terms.iter().next_back() {
            Some((_, c)) if c.is_negative() => self.neg(),
            _ => self.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: usize, terms: &[(&[u32], i64)]) -> Polynomial {
        let mut out = Polynomial::zero(n);
        for (e, c) in terms {
            out.add_term(Monomial(e.to_vec()), rat_int(*c));
        }
        out
    }

    #[test]
    fn arithmetic_matches_evaluation() {
        let a = p(2, &[(&[2, 0], 1), (&[0, 1], -3)]);
        let b = p(2, &[(&[1, 1], 2), (&[0, 0], 5)]);
        let pt = vec![rat_frac(2, 3), rat_frac(-1, 7)];
        let sum = a.add(&b);
        let prod = a.mul(&b);
        assert_eq!(sum.eval(&pt), a.eval(&pt) + b.eval(&pt));
        assert_eq!(prod.eval(&pt), a.eval(&pt) * b.eval(&pt));
    }

    #[test]
    fn divrem_monomial_reassembles() {
        let f = p(2, &[(&[3, 1], 2), (&[1, 0], 1), (&[0, 2], -5)]);
        let m = Monomial(vec![1, 0]);
        let (q, r) = f.divrem_monomial(&m);
        let back = q.mul_monomial(&m, &rat_int(1)).add(&r);
        assert_eq!(back, f);
        assert!(r.terms().all(|(mm, _)| !m.divides(mm)));
    }

    #[test]
    fn substitution_matches_evaluation() {
        let f = p(2, &[(&[2, 1], 1), (&[0, 3], -2), (&[1, 0], 7)]);
        let g = p(2, &[(&[1, 1], 1), (&[0, 0], 1)]);
        let h = p(2, &[(&[0, 1], 3)]);
        let composed = f.substitute(&[g.clone(), h.clone()]);
        let pt = vec![rat_frac(1, 2), rat_frac(3, 5)];
        let expected = f.eval(&[g.eval(&pt), h.eval(&pt)]);
        assert_eq!(composed.eval(&pt), expected);
    }

    #[test]
    fn log_derivative_keeps_exponents() {
        let f = p(2, &[(&[3, 2], 4)]);
        let ld = f.log_derivative(0);
        assert_eq!(ld, p(2, &[(&[3, 2], 12)]));
    }

    #[test]
    fn order_and_restriction() {
        let f = p(3, &[(&[2, 0, 0], 1), (&[1, 1, 1], 1)]);
        assert_eq!(f.order(), Order::Finite(2));
        assert_eq!(f.order_on(&[true, false, false]), Order::Finite(1));
        let g = f.restrict_zero(&[false, true, false]);
        assert_eq!(g, p(3, &[(&[2, 0, 0], 1)]));
        assert_eq!(Polynomial::zero(3).order(), Order::Infinite);
    }
}
