use std::sync::Arc;

use serde::Serialize;

use super::{prime_factors, FqField};
use crate::error::{Error, Result};
use crate::modring::{gcd, inv_mod, mul_mod, Residue};

/// A primitive `n`-th root of unity `g^(index·(q-1)/n)` in a finite field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootOfUnity {
    field: Arc<FqField>,
    element: u64,
    order: u64,
    index: u64,
}

impl RootOfUnity {
    pub fn field(&self) -> &Arc<FqField> {
        &self.field
    }

    pub fn element(&self) -> u64 {
        self.element
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    /// Value on `g` of the character attached to the Frobenius `x ↦ x^q`:
    /// `(ⁿ√x)^(q-1) = g^(dlog(x)(q-1)/n) = ω^(dlog(x)/index)`, so it is
    /// `index⁻¹ mod n`.
    pub fn frobenius_value(&self) -> u64 {
        inv_mod(self.index, self.order).expect("index is a unit")
    }
}

/// `ω = g^(index·(q-1)/n)`, with primitivity verified.
pub fn omega(field: &Arc<FqField>, n: u64, index: u64) -> Result<RootOfUnity> {
    let q = field.order();
    if n < 2 || !(q - 1).is_multiple_of(n) {
        return Err(Error::RootsOfUnityAbsent { n, q });
    }
    let index = index % n;
    if gcd(index, n) != 1 {
        return Err(Error::NotUnit { value: index, modulus: n });
    }
    let element = field.exp(index * ((q - 1) / n));
    let primitive = field.pow(element, n) == 1 && prime_factors(n).iter().all(|&r| field.pow(element, n / r) != 1);
    assert!(primitive, "g^(index (q-1)/n) must be a primitive n-th root of unity");
    Ok(RootOfUnity { field: Arc::clone(field), element, order: n, index })
}

/// A character `K^× → Z/n`, `x ↦ value · dlog(x) mod n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KummerCharacter {
    field: Arc<FqField>,
    value: u64,
}

impl Serialize for KummerCharacter {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u64(self.value)
    }
}

impl KummerCharacter {
    pub fn new(field: &Arc<FqField>, value: u64) -> Self {
        KummerCharacter { field: Arc::clone(field), value: value % field.n() }
    }

    pub fn zero(field: &Arc<FqField>) -> Self {
        Self::new(field, 0)
    }

    /// All `n` characters, `f_0, ..., f_{n-1}`.
    pub fn all(field: &Arc<FqField>) -> Vec<Self> {
        (0..field.n()).map(|c| Self::new(field, c)).collect()
    }

    pub fn field(&self) -> &Arc<FqField> {
        &self.field
    }

    pub fn modulus(&self) -> u64 {
        self.field.n()
    }

    /// Value on the fixed generator.
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn eval(&self, x: u64) -> Result<Residue> {
        self.eval_raw(x).map(|v| Residue::new(self.modulus(), v))
    }

    pub(crate) fn eval_raw(&self, x: u64) -> Result<u64> {
        let n = self.modulus();
        Ok(mul_mod(self.value, self.field.dlog(x)? % n, n))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(Self::new(&self.field, self.value + other.value))
    }

    pub fn scale(&self, c: u64) -> Self {
        Self::new(&self.field, mul_mod(self.value, c % self.modulus(), self.modulus()))
    }

    pub(crate) fn same_field(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.field, &other.field) || self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }
}

/// `char_eval(f, x) = f(x)`
pub fn char_eval(f: &KummerCharacter, x: u64) -> Result<Residue> {
    f.eval(x)
}

/// A field embedding `K ↪ L` sending `g_K` to `g_L^exponent`.
#[derive(Clone, Debug)]
pub struct Embedding {
    sub: Arc<FqField>,
    ext: Arc<FqField>,
    exponent: u64,
}

impl Embedding {
    /// Finds the embedding. For canonically constructed fields it is
    /// `g_K ↦ g_L^((q_L-1)/(q_K-1))`; for other defining polynomials that
    /// exponent is multiplied by the first unit `j` modulo `q_K - 1` that makes
    /// the map additive. Additivity is verified on all of `K`.
    pub fn new(sub: &Arc<FqField>, ext: &Arc<FqField>) -> Result<Self> {
        let not = || Error::NotEmbeddable { sub: sub.order(), ext: ext.order() };
        if sub.characteristic() != ext.characteristic() || !ext.degree().is_multiple_of(sub.degree()) {
            return Err(not());
        }
        let (qk, ql) = (sub.order(), ext.order());
        let m = (ql - 1) / (qk - 1);
        for j in 1..qk.max(2) {
            if gcd(j, qk - 1) != 1 {
                continue;
            }
            let candidate = Embedding { sub: Arc::clone(sub), ext: Arc::clone(ext), exponent: (m * j) % (ql - 1) };
            if candidate.is_additive() {
                return Ok(candidate);
            }
        }
        Err(not())
    }

    /// `φ(x + 1) = φ(x) + 1` for all `x`; together with multiplicativity
    /// this gives `φ(x + y) = φ(y)·φ(x/y + 1) = φ(x) + φ(y)`.
    fn is_additive(&self) -> bool {
        let one = self.map(1);
        one == 1
            && (0..self.sub.order()).all(|x| {
                let lhs = self.map(self.sub.add(x, 1));
                let rhs = self.ext.add(self.map(x), 1);
                lhs == rhs
            })
    }

    pub fn sub(&self) -> &Arc<FqField> {
        &self.sub
    }

    pub fn ext(&self) -> &Arc<FqField> {
        &self.ext
    }

    /// Discrete log in `L` of the image of `g_K`.
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn map(&self, x: u64) -> u64 {
        if x == 0 {
            return 0;
        }
        let d = self.sub.dlog(x).expect("element of the subfield");
        let ql1 = (self.ext.order() - 1) as u128;
        self.ext.exp(((d as u128 * self.exponent as u128) % ql1) as u64)
    }

    /// Requires `embed(ω_K) = ω_L`.
    pub fn check_omega(&self, omega_l: &RootOfUnity, omega_k: &RootOfUnity) -> Result<()> {
        if omega_l.order() != omega_k.order() {
            return Err(Error::IncompatibleOmega(format!("orders {} and {} differ", omega_l.order(), omega_k.order())));
        }
        let image = self.map(omega_k.element());
        if image != omega_l.element() {
            return Err(Error::IncompatibleOmega(format!(
                "subfield root {} embeds as {}, extension root is {}",
                omega_k.element(),
                image,
                omega_l.element()
            )));
        }
        Ok(())
    }

    /// The index `i` such that `g_K^i ↦ ω_L` lands on the subfield's root of
    /// unity with a compatible choice, i.e. the subfield index matching
    /// `index_L`.
    pub fn compatible_index(&self, index_l: u64) -> Result<u64> {
        let n = self.ext.n();
        // embed(g_K^(i (q_K-1)/n)) = g_L^(i j (q_L-1)/n) with j = exponent / m.
        let m = (self.ext.order() - 1) / (self.sub.order() - 1);
        let j = (self.exponent / m) % n;
        let ji = inv_mod(j, n).ok_or(Error::NotUnit { value: j, modulus: n })?;
        Ok(mul_mod(index_l % n, ji, n))
    }
}

/// `f ↦ f ∘ embed`, a character of `K^×`.
pub fn restrict_character(emb: &Embedding, f: &KummerCharacter) -> Result<KummerCharacter> {
    if f.field().as_ref() != emb.ext.as_ref() {
        return Err(Error::FieldMismatch);
    }
    let n = f.modulus();
    if emb.sub.n() != n {
        return Err(Error::ModulusMismatch(n, emb.sub.n()));
    }
    Ok(KummerCharacter::new(&emb.sub, mul_mod(f.value(), emb.exponent % n, n)))
}
