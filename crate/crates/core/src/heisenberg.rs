//! The Heisenberg group of unitriangular `3×3` matrices over `Z/n`, with
//! `h(a,b;c)·h(a',b';c') = h(a+a', b+b'; c+c'+ab')`.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::finfield::{KummerCharacter, RootOfUnity};
use crate::groupcoh::{cup_and_carry_cocycles, CentralExtension, CentralSeriesData, TableGroup, GROUP_LIMIT};
use crate::modring::{binom2, check_modulus, mul_mod};

/// Largest `n` for which homomorphisms are enumerated.
pub const HOM_ENUM_LIMIT: u64 = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct HeisElem {
    pub n: u64,
    pub a: u64,
    pub b: u64,
    pub c: u64,
}

impl HeisElem {
    pub fn new(n: u64, a: u64, b: u64, c: u64) -> Self {
        HeisElem { n, a: a % n, b: b % n, c: c % n }
    }

    pub fn identity(n: u64) -> Self {
        Self::new(n, 0, 0, 0)
    }

    /// `h(−a, −b; ab − c)`
    pub fn inverse(&self) -> Self {
        let n = self.n;
        Self::new(n, n - self.a, n - self.b, mul_mod(self.a, self.b, n) + n - self.c)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        heis_mul(self, other)
    }

    pub fn pow(&self, e: u64) -> Self {
        let mut acc = Self::identity(self.n);
        let mut base = *self;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = heis_mul(&acc, &base).expect("same modulus");
            }
            base = heis_mul(&base, &base).expect("same modulus");
            e >>= 1;
        }
        acc
    }

    /// Class in `𝔤₁ ≅ Λ²`.
    pub fn h1(&self) -> (u64, u64) {
        (self.a, self.b)
    }

    /// Table index `(a·n + b)·n + c`.
    pub fn index(&self) -> usize {
        let n = self.n as usize;
        (self.a as usize * n + self.b as usize) * n + self.c as usize
    }

    pub fn from_index(n: u64, idx: usize) -> Self {
        let m = n as usize;
        Self::new(n, (idx / (m * m)) as u64, ((idx / m) % m) as u64, (idx % m) as u64)
    }
}

pub fn heis_mul(u: &HeisElem, v: &HeisElem) -> Result<HeisElem> {
    if u.n != v.n {
        return Err(Error::ModulusMismatch(u.n, v.n));
    }
    let n = u.n;
    Ok(HeisElem::new(n, u.a + v.a, u.b + v.b, (u.c + v.c) % n + mul_mod(u.a, v.b, n)))
}

/// `u⁻¹v⁻¹uv`
pub fn heis_commutator(u: &HeisElem, v: &HeisElem) -> Result<HeisElem> {
    heis_mul(&heis_mul(&u.inverse(), &v.inverse())?, &heis_mul(u, v)?)
}

/// Central coordinates of `[u, v]` and `u^n`: `ab' − a'b` and
/// `C(n,2)·ab`, checked against the literal products.
pub fn heis_comm_pow(u: &HeisElem, v: &HeisElem) -> Result<(u64, u64)> {
    if u.n != v.n {
        return Err(Error::ModulusMismatch(u.n, v.n));
    }
    let n = u.n;
    let comm = (mul_mod(u.a, v.b, n) + n - mul_mod(v.a, u.b, n)) % n;
    let pow = mul_mod(binom2(n)?.value(), mul_mod(u.a, u.b, n), n);
    let lit_comm = heis_commutator(u, v)?;
    let lit_pow = u.pow(n);
    if lit_comm != HeisElem::new(n, 0, 0, comm) || lit_pow != HeisElem::new(n, 0, 0, pow) {
        return Err(Error::TheoremViolation(format!("closed forms disagree with literal products at {u:?}, {v:?}")));
    }
    Ok((comm, pow))
}

pub fn to_table_group(n: u64) -> Result<TableGroup> {
    check_modulus(n)?;
    let order = (n as usize).checked_pow(3).filter(|&o| o <= GROUP_LIMIT);
    let Some(order) = order else {
        return Err(Error::GroupTooLarge { order: usize::MAX, limit: GROUP_LIMIT });
    };
    let mut labels = Vec::with_capacity(order);
    for i in 0..order {
        let h = HeisElem::from_index(n, i);
        labels.push(format!("h({},{};{})", h.a, h.b, h.c));
    }
    let table: Vec<Vec<usize>> = (0..order)
        .map(|x| {
            let hx = HeisElem::from_index(n, x);
            (0..order).map(|y| heis_mul(&hx, &HeisElem::from_index(n, y)).expect("same modulus").index()).collect()
        })
        .collect();
    TableGroup::from_table(table, labels)
}

/// Central series with `𝔤₁` based on `h(1,0;0), h(0,1;0)` and `𝔤₂` on
/// `h(0,0;1)`.
pub fn heisenberg_series(n: u64) -> Result<CentralSeriesData> {
    let g = Arc::new(to_table_group(n)?);
    let e1 = HeisElem::new(n, 1, 0, 0).index();
    let e2 = HeisElem::new(n, 0, 1, 0).index();
    let z = HeisElem::new(n, 0, 0, 1).index();
    CentralSeriesData::with_bases(&g, n, 2, &[Some(&[e1, e2]), Some(&[z])])
}

/// The extension `Λ → 𝓗 → Λ²`, base `(Z/n)²` indexed `a + b·n`.
pub fn heisenberg_extension(n: u64) -> Result<CentralExtension> {
    let cover = Arc::new(to_table_group(n)?);
    let base = Arc::new(TableGroup::elementary(2, n as usize)?);
    let proj: Vec<usize> = (0..cover.order())
        .map(|i| {
            let h = HeisElem::from_index(n, i);
            (h.a + h.b * n) as usize
        })
        .collect();
    CentralExtension::new(&cover, &base, proj, HeisElem::new(n, 0, 0, 1).index())
}

/// Pairs where the extension cocycle read off the section `h(a,b;0)`
/// differs from `U_{e1,e2}`.
pub fn extension_cocycle_mismatches(n: u64) -> Result<u64> {
    let ext = heisenberg_extension(n)?;
    let xi = ext.cocycle()?;
    let (u, _) = cup_and_carry_cocycles(2, n, &[1, 0], &[0, 1])?;
    let order = xi.group().order();
    Ok((0..order).into_par_iter().map(|s| (0..order).filter(|&t| xi.value(s, t) != u.value(s, t)).count() as u64).sum())
}

/// The embedding problem for `(x_ω, y_ω)` over a finite field.
#[derive(Clone, Debug)]
pub struct EmbeddingProblem {
    omega: RootOfUnity,
    x: u64,
    y: u64,
}

impl EmbeddingProblem {
    pub fn new(omega: &RootOfUnity, x: u64, y: u64) -> Result<Self> {
        let f = omega.field();
        if omega.order() != f.n() {
            return Err(Error::IncompatibleOmega(format!(
                "ω has order {} but the field carries n = {}",
                omega.order(),
                f.n()
            )));
        }
        for v in [x, y] {
            if v == 0 {
                return Err(Error::ZeroElement);
            }
            if !f.is_element(v) {
                return Err(Error::NotAnElement(v));
            }
        }
        Ok(EmbeddingProblem { omega: omega.clone(), x, y })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EmbeddingSolution {
    /// `x_ω` and `y_ω` at the Frobenius.
    pub x_value: u64,
    pub y_value: u64,
    /// Images of the Frobenius, one for each central coordinate `t`.
    pub generator_images: Vec<HeisElem>,
}

/// Over a finite field the cup product vanishes, so every problem is
/// solvable: the Frobenius may go to `h(x_ω(σ₀), y_ω(σ₀); t)` for any `t`.
pub fn solve_embedding_cyclic(problem: &EmbeddingProblem) -> Result<EmbeddingSolution> {
    let f = problem.omega.field();
    let n = f.n();
    let c0 = problem.omega.frobenius_value();
    let xv = mul_mod(c0, f.dlog(problem.x)? % n, n);
    let yv = mul_mod(c0, f.dlog(problem.y)? % n, n);
    let mut images = Vec::with_capacity(n as usize);
    for t in 0..n {
        let h = HeisElem::new(n, xv, yv, t);
        if h.pow(n * n) != HeisElem::identity(n) {
            return Err(Error::TheoremViolation(format!("{h:?} has order not dividing n²")));
        }
        if h.h1() != (xv, yv) {
            return Err(Error::TheoremViolation("generator image does not cover (x_ω, y_ω)".into()));
        }
        images.push(h);
    }
    Ok(EmbeddingSolution { x_value: xv, y_value: yv, generator_images: images })
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct HomEnumReport {
    /// Number of homomorphisms enumerated (`n³`).
    pub homomorphisms: u64,
    /// Whether the group exponent divides `n²` (checked on every element).
    pub exponent_divides_n2: bool,
    /// Every commutator sum vanishes.
    pub all_vanish: bool,
    /// The bilinear criterion agrees with the commutator sum for every
    /// homomorphism.
    pub bilinear_agrees: bool,
}

/// Enumerates all homomorphisms from the order-`n²` cyclic quotient to
/// `𝓗` and checks `Σ_i [φ σ_i, φ τ_i] = 0` by literal commutators.
pub fn enumerate_homs_check(
    pairs: &[(KummerCharacter, KummerCharacter)],
    omega: &RootOfUnity,
) -> Result<HomEnumReport> {
    let f = omega.field();
    let n = f.n();
    if n > HOM_ENUM_LIMIT {
        return Err(Error::EnumerationBound(format!("n = {n} exceeds {HOM_ENUM_LIMIT}")));
    }
    if omega.order() != n {
        return Err(Error::IncompatibleOmega(format!("ω has order {} but n = {n}", omega.order())));
    }
    for (s, t) in pairs {
        if s.field() != f || t.field() != f {
            return Err(Error::FieldMismatch);
        }
    }
    let table = to_table_group(n)?;
    let exponent_divides_n2 = (n * n).is_multiple_of(table.exponent());
    let idx = omega.index();
    let n3 = n * n * n;
    let results: Vec<(bool, bool)> = (0..n3 as usize)
        .into_par_iter()
        .map(|i| -> Result<(bool, bool)> {
            // Frobenius ↦ h; σ with σ^ω(g) = c is Frobenius^(c·index).
            let h = HeisElem::from_index(n, i);
            let image = |c: &KummerCharacter| h.pow(mul_mod(c.value(), idx, n));
            let mut sum = 0u64;
            for (s, t) in pairs {
                let comm = heis_commutator(&image(s), &image(t))?;
                if (comm.a, comm.b) != (0, 0) {
                    return Err(Error::TheoremViolation("commutator outside the centre".into()));
                }
                sum = (sum + comm.c) % n;
            }
            // x, y with x_ω(σ₀) = a, y_ω(σ₀) = b.
            let x = f.exp(mul_mod(h.a, idx, n));
            let y = f.exp(mul_mod(h.b, idx, n));
            let mut bil = 0u64;
            for (s, t) in pairs {
                let term = mul_mod(s.eval(x)?.value(), t.eval(y)?.value(), n) + n
                    - mul_mod(s.eval(y)?.value(), t.eval(x)?.value(), n);
                bil = (bil + term) % n;
            }
            Ok((sum == 0, (sum == 0) == (bil == 0)))
        })
        .collect::<Result<_>>()?;
    Ok(HomEnumReport {
        homomorphisms: n3,
        exponent_divides_n2,
        all_vanish: results.iter().all(|r| r.0),
        bilinear_agrees: results.iter().all(|r| r.1),
    })
}
