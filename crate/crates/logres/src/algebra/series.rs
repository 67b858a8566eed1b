use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::poly::{Polynomial, Rat};
use crate::error::{Error, Result};

/// Exact `den`-th root of an integer, or an error when none exists.
fn bigint_exact_root(v: &BigInt, den: u32) -> Result<BigInt> {
    if den == 0 {
        return Err(Error::Internal("zeroth root".into()));
    }
    if v.is_negative() && den % 2 == 0 {
        return Err(Error::InexactRoot(format!(
            "no real {den}-th root of negative {v}"
        )));
    }
    let (sign, abs) = if v.is_negative() {
        (-BigInt::one(), -v)
    } else {
        (BigInt::one(), v.clone())
    };
    let root = num_integer::Roots::nth_root(&abs, den);
    if num_traits::pow::pow(root.clone(), den as usize) == abs {
        Ok(sign * root)
    } else {
        Err(Error::InexactRoot(format!("{v} has no exact {den}-th root")))
    }
}

/// Exact rational power `c^q`; errors when the result is not rational.
pub fn rational_pow(c: &Rat, q: &Rat) -> Result<Rat> {
    if c.is_zero() {
        return if q.is_positive() {
            Ok(Rat::zero())
        } else {
            Err(Error::InexactRoot("zero to a nonpositive power".into()))
        };
    }
    let den: u32 = q
        .denom()
        .to_u32()
        .ok_or_else(|| Error::InexactRoot("root index too large".into()))?;
    let root = Rat::new(
        bigint_exact_root(c.numer(), den)?,
        bigint_exact_root(c.denom(), den)?,
    );
    let num = q.numer();
    let e: u32 = num
        .abs()
        .to_u32()
        .ok_or_else(|| Error::InexactRoot("exponent too large".into()))?;
    let powered = super::poly::rat_pow(&root, e);
    if num.is_negative() {
        Ok(powered.recip())
    } else {
        Ok(powered)
    }
}

/// Generalized binomial coefficient for a rational upper index.
fn binomial(q: &Rat, k: u64) -> Rat {
    let mut acc = Rat::one();
    for j in 0..k {
        acc *= q - Rat::from_integer(BigInt::from(j));
        acc /= Rat::from_integer(BigInt::from(j + 1));
    }
    acc
}

/// Polynomial considered modulo terms of total degree above `trunc`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    pub poly: Polynomial,
    pub trunc: u64,
}

impl TruncatedSeries {
    pub fn new(poly: Polynomial, trunc: u64) -> Self {
        TruncatedSeries {
            poly: poly.truncate_deg(trunc),
            trunc,
        }
    }

    pub fn n_vars(&self) -> usize {
        self.poly.n_vars()
    }

    pub fn mul(&self, other: &TruncatedSeries) -> TruncatedSeries {
        let trunc = self.trunc.min(other.trunc);
        TruncatedSeries::new(self.poly.mul_capped(&other.poly, Some(trunc)), trunc)
    }

    pub fn add(&self, other: &TruncatedSeries) -> TruncatedSeries {
        let trunc = self.trunc.min(other.trunc);
        TruncatedSeries::new(self.poly.add(&other.poly), trunc)
    }

    /// `self^q` for rational `q`; requires a unit with an exact rational
    /// `q`-th power of its constant term.
    pub fn fractional_power(&self, q: &Rat) -> Result<TruncatedSeries> {
        let c = self.poly.constant_term();
        if c.is_zero() {
            return Err(Error::InexactRoot(
                "fractional power of a non-unit series".into(),
            ));
        }
        let scale = rational_pow(&c, q)?;
        let n = self.n_vars();
        let h = TruncatedSeries::new(
            self.poly.scale(&c.recip()).sub(&Polynomial::one(n)),
            self.trunc,
        );
        let mut acc = Polynomial::zero(n);
        let mut h_pow = Polynomial::one(n);
        for k in 0..=self.trunc {
            let b = binomial(q, k);
            if !b.is_zero() {
                acc = acc.add(&h_pow.scale(&b));
            }
            if k < self.trunc {
                h_pow = h_pow.mul_capped(&h.poly, Some(self.trunc));
                if h_pow.is_zero() {
                    break;
                }
            }
        }
        Ok(TruncatedSeries::new(acc.scale(&scale), self.trunc))
    }

    /// Multiplicative inverse of a unit series.
    pub fn inverse(&self) -> Result<TruncatedSeries> {
        self.fractional_power(&-Rat::one())
    }
}

/// Iterates `step` from `init` until the result stabilizes, which for
/// substitutions correcting one degree per pass happens within `trunc + 2`
/// rounds. Used to express old coordinates in terms of new ones.
pub fn iterate_to_fixed_point<F>(init: Vec<Polynomial>, trunc: u64, step: F) -> Result<Vec<Polynomial>>
where
    F: Fn(&[Polynomial]) -> Result<Vec<Polynomial>>,
{
    let mut cur = init;
    for _ in 0..=trunc + 2 {
        let next: Vec<Polynomial> = step(&cur)?
            .into_iter()
            .map(|p| p.truncate_deg(trunc))
            .collect();
        if next == cur {
            return Ok(cur);
        }
        cur = next;
    }
    Err(Error::Internal(
        "coordinate inversion did not stabilize within the truncation degree".into(),
    ))
}

/// Integer gcd helper for exponent vectors.
pub fn gcd_u32(a: u32, b: u32) -> u32 {
    (a as u64).gcd(&(b as u64)) as u32
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::monomial::Monomial;
    use crate::algebra::poly::{rat_frac, rat_int};

    fn one_plus_u(n: usize) -> Polynomial {
        let mut p = Polynomial::one(n);
        p.add_term(Monomial::var(n, 0), rat_int(1));
        p
    }

    #[test]
    fn exact_rational_roots() {
        assert_eq!(
            rational_pow(&rat_frac(4, 9), &rat_frac(1, 2)).unwrap(),
            rat_frac(2, 3)
        );
        assert_eq!(
            rational_pow(&rat_int(-8), &rat_frac(1, 3)).unwrap(),
            rat_int(-2)
        );
        assert_eq!(
            rational_pow(&rat_frac(9, 4), &rat_frac(-1, 2)).unwrap(),
            rat_frac(2, 3)
        );
        assert!(rational_pow(&rat_int(2), &rat_frac(1, 2)).is_err());
        assert!(rational_pow(&rat_int(-4), &rat_frac(1, 2)).is_err());
    }

    #[test]
    fn square_of_square_root_recovers_series() {
        let s = TruncatedSeries::new(one_plus_u(2), 12);
        let r = s.fractional_power(&rat_frac(1, 2)).unwrap();
        let sq = r.mul(&r);
        assert_eq!(sq, s);
    }

    #[test]
    fn unit_times_inverse_is_one() {
        let mut p = one_plus_u(2);
        p.add_term(Monomial(vec![0, 2]), rat_frac(-3, 5));
        p = p.scale(&rat_frac(7, 2));
        let s = TruncatedSeries::new(p, 10);
        let inv = s.inverse().unwrap();
        let prod = s.mul(&inv);
        assert_eq!(prod.poly, Polynomial::one(2));
    }

    #[test]
    fn fractional_power_needs_exact_root_of_constant() {
        let s = TruncatedSeries::new(one_plus_u(1).scale(&rat_int(2)), 8);
        assert!(s.fractional_power(&rat_frac(1, 2)).is_err());
    }

    #[test]
    fn fixed_point_inverts_a_shear() {
        // new = old + old^2 in one variable; recover old in terms of new.
        let trunc = 8;
        let new_var = Polynomial::var(1, 0);
        let inv = iterate_to_fixed_point(vec![new_var.clone()], trunc, |cur| {
            let sq = cur[0].mul_capped(&cur[0], Some(trunc));
            Ok(vec![new_var.sub(&sq)])
        })
        .unwrap();
        // Check forward(inverse) = identity mod degree trunc.
        let forward = {
            let x = Polynomial::var(1, 0);
            x.add(&x.mul(&x))
        };
        let composed = forward.substitute_capped(&inv, Some(trunc));
        assert_eq!(composed, Polynomial::var(1, 0));
    }
}
