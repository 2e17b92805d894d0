//! Finite fields `F_q`, discrete logarithms and Kummer characters.
//!
//! Elements are encoded as integers `Σ c_i p^i` in `[0, q)`, where `c_i` is
//! the coefficient of `x^i` in the residue modulo the defining polynomial.
//! For prime fields the encoding is the usual representative in `[0, p)`.
//!
//! Characters `K^× → Z/n` are stored by their value on the fixed generator,
//! which determines them completely because `K^×` is cyclic.

mod kummer;
mod poly;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modring::{check_modulus, mul_mod, pow_mod};

pub use kummer::{char_eval, omega, restrict_character, Embedding, KummerCharacter, RootOfUnity};

/// Fields up to this order get full exp/log tables.
pub const TABLE_LIMIT: u64 = 1 << 20;
/// Largest supported field order; discrete logs above the table limit use
/// baby-step giant-step.
pub const FIELD_LIMIT: u64 = 1 << 32;

pub(crate) fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn prime_factors(mut x: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= x {
        if x.is_multiple_of(d) {
            out.push(d);
            while x.is_multiple_of(d) {
                x /= d;
            }
        }
        d += 1;
    }
    if x > 1 {
        out.push(x);
    }
    out
}

/// Raw arithmetic in `F_p[x]/(f)` on encoded elements, used both during
/// construction and as the fallback when no tables exist.
#[derive(Clone, Debug)]
struct Arith {
    p: u64,
    k: u32,
    q: u64,
    poly: Vec<u64>,
}

impl Arith {
    fn coeffs(&self, mut x: u64) -> Vec<u64> {
        let mut c = Vec::with_capacity(self.k as usize);
        for _ in 0..self.k {
            c.push(x % self.p);
            x /= self.p;
        }
        poly::trim(c)
    }

    fn encode(&self, c: &[u64]) -> u64 {
        c.iter().rev().fold(0, |acc, &v| acc * self.p + v)
    }

    fn add(&self, x: u64, y: u64) -> u64 {
        if self.k == 1 {
            return (x + y) % self.p;
        }
        let (mut x, mut y) = (x, y);
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.k {
            out += ((x % self.p + y % self.p) % self.p) * place;
            x /= self.p;
            y /= self.p;
            place *= self.p;
        }
        out
    }

    fn neg(&self, x: u64) -> u64 {
        if self.k == 1 {
            return (self.p - x % self.p) % self.p;
        }
        let mut x = x;
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.k {
            out += ((self.p - x % self.p) % self.p) * place;
            x /= self.p;
            place *= self.p;
        }
        out
    }

    fn mul(&self, x: u64, y: u64) -> u64 {
        if self.k == 1 {
            return mul_mod(x, y, self.p);
        }
        let prod = poly::mulmod(&self.coeffs(x), &self.coeffs(y), &self.poly, self.p);
        self.encode(&prod)
    }

    fn pow(&self, x: u64, mut e: u64) -> u64 {
        if self.k == 1 {
            return pow_mod(x, e, self.p);
        }
        let mut acc = 1;
        let mut b = x;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        acc
    }

    fn has_full_order(&self, x: u64, factors: &[u64]) -> bool {
        x != 0 && self.pow(x, self.q - 1) == 1 && factors.iter().all(|&r| self.pow(x, (self.q - 1) / r) != 1)
    }
}

#[derive(Clone)]
enum Dlog {
    Table { exp: Vec<u32>, log: Vec<u32> },
    Bsgs { step: u64, baby: HashMap<u64, u32>, giant: u64 },
}

/// JSON descriptor of a field: `{p, k, poly, n, generator}`. `poly` lists
/// the defining polynomial's coefficients from the constant term up to the
/// leading 1, and is empty for prime fields.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDescriptor {
    pub p: u64,
    pub k: u32,
    pub poly: Vec<u64>,
    pub n: u64,
    pub generator: u64,
}

/// The finite field `F_q`, `q = p^k`, together with a fixed generator of
/// `F_q^×`, discrete logarithms to that generator, and the modulus `n` of the
/// characters considered on it (`n | q - 1`).
#[derive(Clone)]
pub struct FqField {
    arith: Arith,
    n: u64,
    generator: u64,
    order_factors: Vec<u64>,
    dlog: Dlog,
}

impl fmt::Debug for FqField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{} (n = {}, g = {})", self.arith.q, self.n, self.generator)
    }
}

impl PartialEq for FqField {
    fn eq(&self, other: &Self) -> bool {
        self.descriptor() == other.descriptor()
    }
}

impl Eq for FqField {}

/// Constructs `F_{p^k}` with the given or a canonical defining polynomial.
///
/// When `poly` is omitted for `k > 1`, the first monic polynomial (ordered by
/// the integer encoding of its lower coefficients) is chosen that is
/// irreducible, has `x` as a primitive element, and is compatible with the
/// canonical polynomials of every proper subfield: `x^((q-1)/(p^d-1))` is a
/// root of the canonical degree-`d` polynomial. This makes
/// `g_K ↦ g_L^((q_L-1)/(q_K-1))` a field embedding for canonical fields.
pub fn make_field(p: u64, k: u32, poly: Option<&[u64]>, n: u64) -> Result<FqField> {
    FqField::new(p, k, poly, n)
}

/// Discrete logarithm of `x` to the field's generator.
pub fn dlog(field: &FqField, x: u64) -> Result<u64> {
    field.dlog(x)
}

fn field_order(p: u64, k: u32) -> Result<u64> {
    let mut q: u64 = 1;
    for _ in 0..k {
        q = q.checked_mul(p).filter(|&q| q <= FIELD_LIMIT).ok_or(Error::FieldTooLarge(u64::MAX))?;
    }
    if q > FIELD_LIMIT {
        return Err(Error::FieldTooLarge(q));
    }
    Ok(q)
}

fn smallest_primitive_root(p: u64) -> u64 {
    let factors = prime_factors(p - 1);
    (1..p)
        .find(|&g| factors.iter().all(|&r| pow_mod(g, (p - 1) / r, p) != 1))
        .expect("every prime has a primitive root")
}

/// Canonical defining polynomial of `F_{p^k}` as described at [`make_field`];
/// for `k = 1` this is `x - g` with `g` the smallest primitive root.
pub(crate) fn canonical_poly(p: u64, k: u32) -> Result<Vec<u64>> {
    if k == 1 {
        let g = smallest_primitive_root(p);
        return Ok(vec![(p - g) % p, 1]);
    }
    let q = field_order(p, k)?;
    let factors = prime_factors(q - 1);
    let subs: Vec<(u32, Vec<u64>)> =
        (1..k).filter(|d| k.is_multiple_of(*d)).map(|d| canonical_poly(p, d).map(|f| (d, f))).collect::<Result<_>>()?;
    for code in 0..q {
        let mut lower = Vec::with_capacity(k as usize);
        let mut c = code;
        for _ in 0..k {
            lower.push(c % p);
            c /= p;
        }
        if lower[0] == 0 {
            continue;
        }
        let f = poly::monic_from_lower(&lower);
        if !poly::is_irreducible(&f, p) {
            continue;
        }
        let arith = Arith { p, k, q, poly: f.clone() };
        let x = p; // encoding of the class of x
        if !arith.has_full_order(x, &factors) {
            continue;
        }
        let compatible = subs.iter().all(|(d, sub)| {
            let qd = p.pow(*d);
            let beta = arith.pow(x, (q - 1) / (qd - 1));
            // Horner evaluation of sub at beta inside F_q.
            let value = sub.iter().rev().fold(0, |acc, &c| arith.add(arith.mul(acc, beta), c));
            value == 0
        });
        if compatible {
            return Ok(f);
        }
    }
    Err(Error::Unsupported(format!("no compatible defining polynomial for F_{p}^{k}")))
}

impl FqField {
    pub fn new(p: u64, k: u32, poly: Option<&[u64]>, n: u64) -> Result<Self> {
        if p >= FIELD_LIMIT || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if k == 0 {
            return Err(Error::InvalidInput("field degree must be at least 1".into()));
        }
        let q = field_order(p, k)?;
        check_modulus(n)?;
        if (q - 1) % n != 0 {
            return Err(Error::RootsOfUnityAbsent { n, q });
        }
        let poly = match (k, poly) {
            (1, None) => Vec::new(),
            (1, Some(f)) => {
                if !(f.is_empty() || (f.len() == 2 && f[1] == 1 && f[0] < p)) {
                    return Err(Error::Reducible(f.to_vec()));
                }
                Vec::new()
            }
            (_, Some(f)) => {
                let ok = f.len() == k as usize + 1
                    && f[k as usize] == 1
                    && f.iter().all(|&c| c < p)
                    && poly::is_irreducible(f, p);
                if !ok {
                    return Err(Error::Reducible(f.to_vec()));
                }
                f.to_vec()
            }
            (_, None) => canonical_poly(p, k)?,
        };
        let arith = Arith { p, k, q, poly };
        let order_factors = prime_factors(q - 1);
        let generator = (1..q)
            .find(|&x| arith.has_full_order(x, &order_factors))
            .expect("the multiplicative group of a finite field is cyclic");
        let dlog = if q <= TABLE_LIMIT {
            let mut exp = vec![0u32; (q - 1) as usize];
            let mut log = vec![u32::MAX; q as usize];
            let mut x = 1u64;
            for (i, slot) in exp.iter_mut().enumerate() {
                *slot = x as u32;
                log[x as usize] = i as u32;
                x = arith.mul(x, generator);
            }
            assert_eq!(x, 1, "generator order check disagrees with table walk");
            Dlog::Table { exp, log }
        } else {
            let step = ((q - 1) as f64).sqrt().ceil() as u64;
            let mut baby = HashMap::with_capacity(step as usize);
            let mut x = 1u64;
            for j in 0..step {
                baby.entry(x).or_insert(j as u32);
                x = arith.mul(x, generator);
            }
            let giant = arith.pow(generator, (q - 1) - step % (q - 1));
            Dlog::Bsgs { step, baby, giant }
        };
        Ok(FqField { arith, n, generator, order_factors, dlog })
    }

    /// Builds a field from its JSON descriptor; the generator recorded there
    /// must match the one this crate selects.
    pub fn from_descriptor(d: &FieldDescriptor) -> Result<Self> {
        let poly = if d.poly.is_empty() { None } else { Some(d.poly.as_slice()) };
        let field = Self::new(d.p, d.k, poly, d.n)?;
        if field.generator != d.generator {
            return Err(Error::InvalidInput(format!(
                "descriptor generator {} differs from the canonical generator {}",
                d.generator, field.generator
            )));
        }
        Ok(field)
    }

    pub fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor {
            p: self.arith.p,
            k: self.arith.k,
            poly: self.arith.poly.clone(),
            n: self.n,
            generator: self.generator,
        }
    }

    pub fn characteristic(&self) -> u64 {
        self.arith.p
    }

    pub fn degree(&self) -> u32 {
        self.arith.k
    }

    pub fn order(&self) -> u64 {
        self.arith.q
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn generator(&self) -> u64 {
        self.generator
    }

    pub fn poly(&self) -> &[u64] {
        &self.arith.poly
    }

    pub fn is_element(&self, x: u64) -> bool {
        x < self.arith.q
    }

    fn check(&self, x: u64) -> Result<()> {
        if self.is_element(x) {
            Ok(())
        } else {
            Err(Error::NotAnElement(x))
        }
    }

    pub fn add(&self, x: u64, y: u64) -> u64 {
        self.arith.add(x, y)
    }

    pub fn neg(&self, x: u64) -> u64 {
        self.arith.neg(x)
    }

    pub fn sub(&self, x: u64, y: u64) -> u64 {
        self.arith.add(x, self.arith.neg(y))
    }

    /// `1 - x`
    pub fn one_minus(&self, x: u64) -> u64 {
        self.arith.add(1, self.arith.neg(x))
    }

    pub fn mul(&self, x: u64, y: u64) -> u64 {
        if x == 0 || y == 0 {
            return 0;
        }
        match &self.dlog {
            Dlog::Table { exp, log } => {
                let s = log[x as usize] as u64 + log[y as usize] as u64;
                exp[(s % (self.arith.q - 1)) as usize] as u64
            }
            Dlog::Bsgs { .. } => self.arith.mul(x, y),
        }
    }

    pub fn pow(&self, x: u64, e: u64) -> u64 {
        self.arith.pow(x, e)
    }

    pub fn inv(&self, x: u64) -> Result<u64> {
        self.check(x)?;
        if x == 0 {
            return Err(Error::ZeroElement);
        }
        Ok(self.pow(x, self.arith.q - 2))
    }

    /// `g^i`
    pub fn exp(&self, i: u64) -> u64 {
        let i = i % (self.arith.q - 1);
        match &self.dlog {
            Dlog::Table { exp, .. } => exp[i as usize] as u64,
            Dlog::Bsgs { .. } => self.arith.pow(self.generator, i),
        }
    }

    /// The unique `i ∈ [0, q-1)` with `g^i = x`.
    pub fn dlog(&self, x: u64) -> Result<u64> {
        self.check(x)?;
        if x == 0 {
            return Err(Error::ZeroElement);
        }
        match &self.dlog {
            Dlog::Table { log, .. } => Ok(log[x as usize] as u64),
            Dlog::Bsgs { step, baby, giant } => {
                let mut y = x;
                for i in 0..*step {
                    if let Some(&j) = baby.get(&y) {
                        return Ok((i * step + j as u64) % (self.arith.q - 1));
                    }
                    y = self.arith.mul(y, *giant);
                }
                unreachable!("baby-step giant-step covers the whole cyclic group")
            }
        }
    }

    /// Multiplicative order of a nonzero element.
    pub fn element_order(&self, x: u64) -> Result<u64> {
        let d = self.dlog(x)?;
        let m = self.arith.q - 1;
        Ok(m / crate::modring::gcd(d, m))
    }

    /// Prime divisors of `q - 1`.
    pub fn order_factors(&self) -> &[u64] {
        &self.order_factors
    }

    /// The points of `K ∖ {0, 1}` in canonical order: ascending integers for
    /// prime fields, ascending discrete logarithm for extensions.
    pub fn points(&self) -> Vec<u64> {
        if self.arith.k == 1 {
            (2..self.arith.q).collect()
        } else {
            (1..self.arith.q - 1).map(|i| self.exp(i)).collect()
        }
    }

    /// Every nonzero element, in ascending encoding.
    pub fn units(&self) -> impl Iterator<Item = u64> {
        1..self.arith.q
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_examples() {
        let f = make_field(7, 1, None, 3).unwrap();
        assert_eq!(f.order(), 7);
        assert_eq!(f.generator(), 3);
        // powers of 3 mod 7 are 3, 2, 6, 4, 5, 1
        let powers: Vec<u64> = (1..=6).map(|i| pow_mod(3, i, 7)).collect();
        assert_eq!(powers, vec![3, 2, 6, 4, 5, 1]);
        assert_eq!(f.dlog(3).unwrap(), 1);
        assert_eq!(f.dlog(1).unwrap(), 0);
        assert_eq!(f.dlog(6).unwrap(), 3);
        assert_eq!(f.dlog(0), Err(Error::ZeroElement));
        assert_eq!(f.dlog(7), Err(Error::NotAnElement(7)));
    }

    #[test]
    fn construction_errors() {
        assert_eq!(make_field(7, 1, None, 4).unwrap_err(), Error::RootsOfUnityAbsent { n: 4, q: 7 });
        assert_eq!(make_field(9, 1, None, 2).unwrap_err(), Error::NotPrime(9));
        assert!(matches!(make_field(5, 2, Some(&[4, 0, 1]), 8), Err(Error::Reducible(_))));
        assert!(matches!(make_field(5, 2, Some(&[1, 1]), 8), Err(Error::Reducible(_))));
        assert!(matches!(make_field(2, 40, None, 3), Err(Error::FieldTooLarge(_))));
        assert_eq!(make_field(7, 1, None, 1).unwrap_err(), Error::InvalidModulus(1));
    }

    #[test]
    fn f25_with_supplied_quadratic() {
        // x^2 + x + 1 has no root mod 5: the values at 0..5 are 1, 3, 2, 3, 1.
        let vals: Vec<u64> = (0..5u64).map(|x| (x * x + x + 1) % 5).collect();
        assert!(vals.iter().all(|&v| v != 0));
        let f = make_field(5, 2, Some(&[1, 1, 1]), 8).unwrap();
        assert_eq!(f.order(), 25);
        assert_eq!(f.element_order(f.generator()).unwrap(), 24);
    }

    #[test]
    fn dlog_is_a_homomorphism_small_fields() {
        for (p, k, n) in [(7, 1, 3), (13, 1, 4), (5, 2, 8), (7, 2, 3), (2, 4, 3), (3, 3, 2)] {
            let f = make_field(p, k, None, n).unwrap();
            let m = f.order() - 1;
            for x in f.units() {
                assert_eq!(f.exp(f.dlog(x).unwrap()), x);
                for y in f.units() {
                    let xy = f.mul(x, y);
                    assert_eq!(f.arith.mul(x, y), xy);
                    assert_eq!(f.dlog(xy).unwrap(), (f.dlog(x).unwrap() + f.dlog(y).unwrap()) % m);
                }
            }
        }
    }

    #[test]
    fn generator_is_smallest_primitive() {
        let f = make_field(13, 1, None, 4).unwrap();
        assert_eq!(f.generator(), 2);
        let f = make_field(41, 1, None, 2).unwrap();
        assert_eq!(f.generator(), 6);
        for x in 2..6 {
            assert!(f.element_order(x).unwrap() < 40);
        }
    }

    #[test]
    fn canonical_extension_polys_are_compatible() {
        // The norm of x down to F_p is the smallest primitive root.
        for (p, k) in [(7u64, 2u32), (5, 2), (13, 2), (2, 4), (3, 4), (2, 6)] {
            let q = p.pow(k);
            let n = prime_factors(q - 1)[0];
            let f = make_field(p, k, None, n).unwrap();
            assert_eq!(f.generator(), p, "x should be primitive");
            let norm = f.pow(f.generator(), (q - 1) / (p - 1));
            assert_eq!(norm, smallest_primitive_root(p));
        }
    }

    #[test]
    fn large_field_uses_bsgs() {
        let p = 1_048_583; // prime above the table limit
        assert!(is_prime(p));
        let f = make_field(p, 1, None, 2).unwrap();
        assert!(matches!(f.dlog, Dlog::Bsgs { .. }));
        for x in [2u64, 3, 12345, p - 1] {
            let d = f.dlog(x).unwrap();
            assert_eq!(f.pow(f.generator(), d), x);
        }
    }

    #[test]
    fn points_order() {
        let f = make_field(5, 1, None, 2).unwrap();
        assert_eq!(f.points(), vec![2, 3, 4]);
        let f = make_field(3, 2, None, 2).unwrap();
        let pts = f.points();
        assert_eq!(pts.len(), 7);
        assert!(!pts.contains(&0) && !pts.contains(&1));
        let logs: Vec<u64> = pts.iter().map(|&x| f.dlog(x).unwrap()).collect();
        assert!(logs.windows(2).all(|w| w[0] < w[1]));
    }
}
