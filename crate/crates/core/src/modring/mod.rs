//! Arithmetic over `Z/n` and the linear algebra built on it.
//!
//! Everything downstream (function tables, cocycles, H² classes) is a vector
//! or matrix over `Z/n`, so this module supplies:
//!
//! - [`Residue`] and [`ModMatrix`], the value types;
//! - Howell row canonical forms ([`canonicalize`]) which make subgroup
//!   membership exact over the non-field ring `Z/n`;
//! - Smith forms over `Z/n` for invariant factors ([`structure`]) and cyclic
//!   decompositions;
//! - [`solve_linear`] for `A·x = b`.
//!
//! Moduli are restricted to `2 <= n < 2^31` so that every product of two
//! reduced values fits in a `u64`.

mod howell;
mod matrix;
mod smith;
mod solve;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use howell::{canonicalize, howell_rows, membership, SubgroupZnk};
pub use matrix::ModMatrix;
pub use smith::{invariant_factors_from_orders, smith_mod, structure, AbelianStructure, SmithForm};
pub use solve::{solve_linear, Solution};

/// Exclusive upper bound on supported moduli.
pub const MAX_MODULUS: u64 = 1 << 31;

pub(crate) fn check_modulus(n: u64) -> Result<()> {
    if (2..MAX_MODULUS).contains(&n) {
        Ok(())
    } else {
        Err(Error::InvalidModulus(n))
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Extended gcd on non-negative integers: returns `(g, s, t)` with
/// `s*a + t*b = g`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Reduces a signed integer into `[0, n)`.
pub fn reduce(x: i128, n: u64) -> u64 {
    x.rem_euclid(n as i128) as u64
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

#[inline]
pub(crate) fn add_mod(a: u64, b: u64, n: u64) -> u64 {
    let s = a + b;
    if s >= n {
        s - n
    } else {
        s
    }
}

#[inline]
pub(crate) fn sub_mod(a: u64, b: u64, n: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + n - b
    }
}

pub fn pow_mod(mut base: u64, mut exp: u64, n: u64) -> u64 {
    let mut acc = 1 % n;
    base %= n;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, n);
        }
        base = mul_mod(base, base, n);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `n`, if `a` is a unit.
pub fn inv_mod(a: u64, n: u64) -> Option<u64> {
    let (g, s, _) = ext_gcd((a % n) as i128, n as i128);
    if g == 1 {
        Some(reduce(s, n))
    } else {
        None
    }
}

/// A unit `u` modulo `n` with `u*a ≡ gcd(a, n) (mod n)`, for `a != 0 mod n`.
pub(crate) fn unit_normalizer(a: u64, n: u64) -> u64 {
    let a = a % n;
    debug_assert!(a != 0);
    let d = gcd(a, n);
    let m = n / d;
    if m == 1 {
        return 1;
    }
    let u0 = inv_mod((a / d) % m, m).expect("a/d is a unit modulo n/d");
    let mut u = u0;
    while gcd(u, n) != 1 {
        u += m;
    }
    u % n
}

/// `n(n-1)/2 mod n`, the coefficient that keeps appearing next to squares.
pub fn binom2(n: u64) -> Result<Residue> {
    check_modulus(n)?;
    Ok(Residue::new(n, binom2_raw(n)))
}

#[inline]
pub(crate) fn binom2_raw(n: u64) -> u64 {
    ((n as u128 * (n as u128 - 1) / 2) % n as u128) as u64
}

/// Solutions `a` of `2a ≡ v (mod n)`, in increasing order.
pub fn halve(v: u64, n: u64) -> Vec<u64> {
    let v = v % n;
    if n % 2 == 1 {
        let inv2 = n.div_ceil(2);
        vec![mul_mod(v, inv2, n)]
    } else if v % 2 == 1 {
        Vec::new()
    } else {
        vec![v / 2, v / 2 + n / 2]
    }
}

/// An element of `Z/n`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Residue {
    modulus: u64,
    value: u64,
}

impl Residue {
    pub fn new(modulus: u64, value: u64) -> Self {
        Residue { modulus, value: value % modulus }
    }

    pub fn from_signed(modulus: u64, value: i64) -> Self {
        Residue { modulus, value: reduce(value as i128, modulus) }
    }

    pub fn zero(modulus: u64) -> Self {
        Residue { modulus, value: 0 }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn checked_add(self, rhs: Residue) -> Result<Residue> {
        self.same(rhs)?;
        Ok(self + rhs)
    }

    pub fn checked_mul(self, rhs: Residue) -> Result<Residue> {
        self.same(rhs)?;
        Ok(self * rhs)
    }

    pub fn scale(self, k: u64) -> Residue {
        Residue::new(self.modulus, mul_mod(self.value, k % self.modulus, self.modulus))
    }

    pub fn inverse(self) -> Option<Residue> {
        inv_mod(self.value, self.modulus).map(|v| Residue::new(self.modulus, v))
    }

    fn same(&self, rhs: Residue) -> Result<()> {
        if self.modulus == rhs.modulus {
            Ok(())
        } else {
            Err(Error::ModulusMismatch(self.modulus, rhs.modulus))
        }
    }
}

impl fmt::Debug for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

// The operator impls panic on mismatched moduli; use the checked_* variants
// when operands come from untrusted input.
impl Add for Residue {
    type Output = Residue;
    fn add(self, rhs: Residue) -> Residue {
        assert_eq!(self.modulus, rhs.modulus, "modulus mismatch");
        Residue { modulus: self.modulus, value: add_mod(self.value, rhs.value, self.modulus) }
    }
}

impl Sub for Residue {
    type Output = Residue;
    fn sub(self, rhs: Residue) -> Residue {
        assert_eq!(self.modulus, rhs.modulus, "modulus mismatch");
        Residue { modulus: self.modulus, value: sub_mod(self.value, rhs.value, self.modulus) }
    }
}

impl Mul for Residue {
    type Output = Residue;
    fn mul(self, rhs: Residue) -> Residue {
        assert_eq!(self.modulus, rhs.modulus, "modulus mismatch");
        Residue { modulus: self.modulus, value: mul_mod(self.value, rhs.value, self.modulus) }
    }
}

impl Neg for Residue {
    type Output = Residue;
    fn neg(self) -> Residue {
        Residue { modulus: self.modulus, value: sub_mod(0, self.value, self.modulus) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binom2_examples() {
        assert_eq!(binom2(2).unwrap().value(), 1);
        assert_eq!(binom2(3).unwrap().value(), 0);
        assert_eq!(binom2(4).unwrap().value(), 2);
        assert_eq!(binom2(1), Err(Error::InvalidModulus(1)));
        assert_eq!(binom2(0), Err(Error::InvalidModulus(0)));
    }

    #[test]
    fn binom2_vanishes_for_odd_moduli() {
        for n in (3..200).step_by(2) {
            assert_eq!(binom2(n).unwrap().value(), 0, "n = {n}");
        }
        for n in (2..200).step_by(2) {
            assert_eq!(binom2(n).unwrap().value(), n / 2, "n = {n}");
        }
    }

    #[test]
    fn normalizer_hits_the_gcd() {
        for n in 2..40u64 {
            for a in 1..n {
                let u = unit_normalizer(a, n);
                assert_eq!(gcd(u, n), 1);
                assert_eq!(mul_mod(u, a, n), gcd(a, n));
            }
        }
    }

    #[test]
    fn halving() {
        assert_eq!(halve(1, 3), vec![2]);
        assert_eq!(halve(2, 4), vec![1, 3]);
        assert!(halve(1, 4).is_empty());
        assert_eq!(halve(0, 6), vec![0, 3]);
    }

    #[test]
    fn residue_ops() {
        let a = Residue::new(7, 5);
        let b = Residue::new(7, 4);
        assert_eq!((a + b).value(), 2);
        assert_eq!((a - b).value(), 1);
        assert_eq!((b - a).value(), 6);
        assert_eq!((a * b).value(), 6);
        assert_eq!((-a).value(), 2);
        assert_eq!(a.inverse().unwrap().value(), 3);
        assert!(a.checked_add(Residue::new(5, 1)).is_err());
        assert_eq!(Residue::from_signed(5, -1).value(), 4);
    }
}
