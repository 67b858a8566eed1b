use std::cmp::Ordering;

/// Exponent vector of a monomial in a fixed set of variables.
///
/// Ordered by graded lexicographic order: total degree first, then
/// lexicographic comparison of exponents. This order is total and is
/// used everywhere a deterministic traversal of terms is needed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn unit(n_vars: usize) -> Self {
        Monomial(vec![0; n_vars])
    }

    pub fn var(n_vars: usize, i: usize) -> Self {
        let mut e = vec![0; n_vars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn n_vars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    /// Total degree counting only the variables selected by `mask`.
    pub fn degree_on(&self, mask: &[bool]) -> u64 {
        self.0
            .iter()
            .zip(mask)
            .filter(|(_, &m)| m)
            .map(|(&e, _)| e as u64)
            .sum()
    }

    /// True when every variable with a positive exponent is selected by `mask`.
    pub fn supported_on(&self, mask: &[bool]) -> bool {
        self.0.iter().zip(mask).all(|(&e, &m)| e == 0 || m)
    }

    pub fn is_unit(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Componentwise quotient `self / other`, if `other` divides `self`.
    pub fn checked_div(&self, other: &Monomial) -> Option<Monomial> {
        if other.divides(self) {
            Some(Monomial(
                self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect(),
            ))
        } else {
            None
        }
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn pow(&self, k: u32) -> Monomial {
        Monomial(self.0.iter().map(|&e| e * k).collect())
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| *a.min(b))
                .collect(),
        )
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| *a.max(b))
                .collect(),
        )
    }

    /// Restriction to the variables selected by `mask` (others zeroed).
    pub fn restricted_to(&self, mask: &[bool]) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(mask)
                .map(|(&e, &m)| if m { e } else { 0 })
                .collect(),
        )
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => self.0.cmp(&other.0),
            ord => ord,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grlex_orders_by_degree_first() {
        let a = Monomial(vec![3, 0]);
        let b = Monomial(vec![0, 4]);
        assert!(a < b);
        let c = Monomial(vec![2, 1]);
        assert!(c < a);
    }

    #[test]
    fn division_is_componentwise() {
        let a = Monomial(vec![2, 3]);
        let b = Monomial(vec![1, 3]);
        assert!(b.divides(&a));
        assert_eq!(a.checked_div(&b), Some(Monomial(vec![1, 0])));
        assert_eq!(b.checked_div(&a), None);
    }

    #[test]
    fn gcd_lcm_roundtrip() {
        let a = Monomial(vec![2, 0, 5]);
        let b = Monomial(vec![1, 4, 3]);
        let g = a.gcd(&b);
        let l = a.lcm(&b);
        assert_eq!(g.mul(&l), a.mul(&b));
    }
}
