use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::cocycle::{term_cocycle, CocycleTerm};
use super::{Cocycle2, TableGroup};
use crate::error::{Error, Result};
use crate::modring::{binom2, check_modulus, Residue};

/// A class in `H²((Z/n)^k, Z/n)` written as
/// `Σ_{a<b} cup[a][b]·x_a∪x_b + Σ_j bock[j]·βx_j`, `x_j` the dual basis.
///
/// Normal form: `x_a∪x_a` is rewritten as `C(n,2)·βx_a` and `x_b∪x_a`
/// (`a < b`) as `−x_a∪x_b`, so only the strict upper triangle of `cup` is
/// ever nonzero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct H2Class {
    k: usize,
    n: u64,
    cup: Vec<Vec<u64>>,
    bock: Vec<u64>,
}

impl H2Class {
    pub fn zero(k: usize, n: u64) -> Result<Self> {
        check_modulus(n)?;
        Ok(H2Class { k, n, cup: vec![vec![0; k]; k], bock: vec![0; k] })
    }

    /// Normalizes an arbitrary cup matrix and Bockstein vector.
    pub fn new(n: u64, cup: Vec<Vec<u64>>, bock: Vec<u64>) -> Result<Self> {
        check_modulus(n)?;
        let k = bock.len();
        if cup.len() != k || cup.iter().any(|r| r.len() != k) {
            return Err(Error::DimensionMismatch { expected: k, got: cup.len() });
        }
        let c = binom2(n)?.value();
        let mut out = H2Class::zero(k, n)?;
        for j in 0..k {
            out.bock[j] = bock[j] % n;
        }
        for a in 0..k {
            for b in 0..k {
                let v = cup[a][b] % n;
                match a.cmp(&b) {
                    std::cmp::Ordering::Less => out.cup[a][b] = (out.cup[a][b] + v) % n,
                    std::cmp::Ordering::Greater => out.cup[b][a] = (out.cup[b][a] + n - v) % n,
                    std::cmp::Ordering::Equal => out.bock[a] = (out.bock[a] + c * v) % n,
                }
            }
        }
        Ok(out)
    }

    /// `x_a ∪ x_b` in normal form.
    pub fn cup_basis(k: usize, n: u64, a: usize, b: usize) -> Result<Self> {
        let mut cup = vec![vec![0; k]; k];
        cup[a][b] = 1;
        Self::new(n, cup, vec![0; k])
    }

    /// `βx_j`
    pub fn bock_basis(k: usize, n: u64, j: usize) -> Result<Self> {
        let mut bock = vec![0; k];
        bock[j] = 1;
        Self::new(n, vec![vec![0; k]; k], bock)
    }

    /// The class of `Σ c·term` (cup terms expand bilinearly, `βz` linearly).
    pub fn from_terms(k: usize, n: u64, terms: &[(u64, CocycleTerm)]) -> Result<Self> {
        let mut cup = vec![vec![0u64; k]; k];
        let mut bock = vec![0u64; k];
        for (c, t) in terms {
            if t.rank() != k {
                return Err(Error::DimensionMismatch { expected: k, got: t.rank() });
            }
            let c = c % n;
            match t {
                CocycleTerm::U { x, y } => {
                    for a in 0..k {
                        for b in 0..k {
                            let v = (c as u128 * x[a] as u128 % n as u128 * y[b] as u128 % n as u128) as u64;
                            cup[a][b] = (cup[a][b] + v) % n;
                        }
                    }
                }
                CocycleTerm::B { z } => {
                    for j in 0..k {
                        bock[j] = (bock[j] + c * (z[j] % n)) % n;
                    }
                }
            }
        }
        Self::new(n, cup, bock)
    }

    pub fn rank(&self) -> usize {
        self.k
    }

    pub fn modulus(&self) -> u64 {
        self.n
    }

    /// Coefficient of `x_a ∪ x_b` for `a < b`.
    pub fn cup(&self, a: usize, b: usize) -> u64 {
        self.cup[a][b]
    }

    pub fn bock(&self) -> &[u64] {
        &self.bock
    }

    pub fn is_zero(&self) -> bool {
        self.to_vector().iter().all(|&v| v == 0)
    }

    /// Number of normal-form coordinates: `k(k+1)/2`.
    pub fn dimension(k: usize) -> usize {
        k * (k + 1) / 2
    }

    /// `[cup[a][b] for a < b in lexicographic order] ++ bock`.
    pub fn to_vector(&self) -> Vec<u64> {
        let mut v = Vec::with_capacity(Self::dimension(self.k));
        for a in 0..self.k {
            for b in a + 1..self.k {
                v.push(self.cup[a][b]);
            }
        }
        v.extend_from_slice(&self.bock);
        v
    }

    pub fn from_vector(k: usize, n: u64, v: &[u64]) -> Result<Self> {
        if v.len() != Self::dimension(k) {
            return Err(Error::DimensionMismatch { expected: Self::dimension(k), got: v.len() });
        }
        let mut out = H2Class::zero(k, n)?;
        let mut i = 0;
        for a in 0..k {
            for b in a + 1..k {
                out.cup[a][b] = v[i] % n;
                i += 1;
            }
        }
        for j in 0..k {
            out.bock[j] = v[i + j] % n;
        }
        Ok(out)
    }

    pub fn add(&self, other: &H2Class) -> Result<Self> {
        self.check_same(other)?;
        let v: Vec<u64> = self.to_vector().iter().zip(other.to_vector()).map(|(a, b)| (a + b) % self.n).collect();
        Self::from_vector(self.k, self.n, &v)
    }

    pub fn scale(&self, c: u64) -> Self {
        let v: Vec<u64> = self.to_vector().iter().map(|&a| (a as u128 * c as u128 % self.n as u128) as u64).collect();
        Self::from_vector(self.k, self.n, &v).expect("same shape")
    }

    fn check_same(&self, other: &H2Class) -> Result<()> {
        if self.n != other.n {
            return Err(Error::ModulusMismatch(self.n, other.n));
        }
        if self.k != other.k {
            return Err(Error::DimensionMismatch { expected: self.k, got: other.k });
        }
        Ok(())
    }

    /// The decomposition read off the normal form:
    /// `Σ cup[a][b]·U_{e_a,e_b} + Σ bock[j]·B_{e_j}`.
    pub fn terms(&self) -> Vec<(u64, CocycleTerm)> {
        let e = |i: usize| -> Vec<u64> { (0..self.k).map(|j| u64::from(i == j)).collect() };
        let mut out = Vec::new();
        for a in 0..self.k {
            for b in a + 1..self.k {
                if self.cup[a][b] != 0 {
                    out.push((self.cup[a][b], CocycleTerm::U { x: e(a), y: e(b) }));
                }
            }
        }
        for j in 0..self.k {
            if self.bock[j] != 0 {
                out.push((self.bock[j], CocycleTerm::B { z: e(j) }));
            }
        }
        out
    }

    /// Representative cocycle of [`H2Class::terms`] on `group`, which must
    /// be `TableGroup::elementary(k, n)`.
    pub fn representative(&self, group: &Arc<TableGroup>) -> Result<Cocycle2> {
        term_cocycle(group, self.k, self.n, &self.terms())
    }
}

/// A pair `(f, g)`, `f` bilinear and `g` linear on the dual of
/// `(Z/n)^k`, with `f(x, x) = C(n,2)·g(x)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SElement {
    k: usize,
    n: u64,
    f: Vec<Vec<u64>>,
    g: Vec<u64>,
}

impl SElement {
    /// Checks `F[i][i] = C(n,2)·g[i]` and `F[i][j] + F[j][i] = 0`.
    pub fn new(n: u64, f: Vec<Vec<u64>>, g: Vec<u64>) -> Result<Self> {
        check_modulus(n)?;
        let k = g.len();
        if f.len() != k || f.iter().any(|r| r.len() != k) {
            return Err(Error::DimensionMismatch { expected: k, got: f.len() });
        }
        let c = binom2(n)?.value();
        let f: Vec<Vec<u64>> = f.into_iter().map(|r| r.into_iter().map(|v| v % n).collect()).collect();
        let g: Vec<u64> = g.into_iter().map(|v| v % n).collect();
        for i in 0..k {
            if f[i][i] != c * g[i] % n {
                return Err(Error::InvalidInput(format!("diagonal entry {i} is not C(n,2)·g")));
            }
            for j in i + 1..k {
                if !(f[i][j] + f[j][i]).is_multiple_of(n) {
                    return Err(Error::InvalidInput(format!("entries ({i},{j}) are not antisymmetric")));
                }
            }
        }
        Ok(SElement { k, n, f, g })
    }

    pub fn zero(k: usize, n: u64) -> Result<Self> {
        Self::new(n, vec![vec![0; k]; k], vec![0; k])
    }

    pub fn rank(&self) -> usize {
        self.k
    }

    pub fn modulus(&self) -> u64 {
        self.n
    }

    pub fn form(&self) -> &[Vec<u64>] {
        &self.f
    }

    pub fn linear(&self) -> &[u64] {
        &self.g
    }

    pub fn is_zero(&self) -> bool {
        self.f.iter().flatten().chain(&self.g).all(|&v| v == 0)
    }

    /// Coordinates in the basis `E_ab` (`a < b`, `F = e_ab − e_ba`) and
    /// `G_j` (`F_jj = C(n,2)`, `g = e_j`); the pairing with an [`H2Class`]
    /// is then the dot product with [`H2Class::to_vector`].
    pub fn to_vector(&self) -> Vec<u64> {
        let mut v = Vec::with_capacity(H2Class::dimension(self.k));
        for a in 0..self.k {
            for b in a + 1..self.k {
                v.push(self.f[a][b]);
            }
        }
        v.extend_from_slice(&self.g);
        v
    }

    /// Basis of the module of all such pairs, in [`SElement::to_vector`]
    /// order.
    pub fn basis(k: usize, n: u64) -> Result<Vec<SElement>> {
        let c = binom2(n)?.value();
        let mut out = Vec::new();
        for a in 0..k {
            for b in a + 1..k {
                let mut f = vec![vec![0; k]; k];
                f[a][b] = 1;
                f[b][a] = n - 1;
                out.push(SElement::new(n, f, vec![0; k])?);
            }
        }
        for j in 0..k {
            let mut f = vec![vec![0; k]; k];
            f[j][j] = c;
            let mut g = vec![0; k];
            g[j] = 1;
            out.push(SElement::new(n, f, g)?);
        }
        Ok(out)
    }
}

/// `((f,g), x_a∪x_b) = f(x_a, x_b)` and `((f,g), βx_j) = g(x_j)`, extended
/// linearly over the normal form.
pub fn pairing(s: &SElement, c: &H2Class) -> Result<Residue> {
    if s.n != c.n {
        return Err(Error::ModulusMismatch(s.n, c.n));
    }
    if s.k != c.k {
        return Err(Error::DimensionMismatch { expected: s.k, got: c.k });
    }
    let n = s.n as u128;
    let mut acc = 0u128;
    for a in 0..s.k {
        for b in a + 1..s.k {
            acc = (acc + s.f[a][b] as u128 * c.cup[a][b] as u128) % n;
        }
        acc = (acc + s.g[a] as u128 * c.bock[a] as u128) % n;
    }
    Ok(Residue::new(s.n, acc as u64))
}

/// `(σ⊗τ − τ⊗σ, 0)` and `(C(n,2)·σ⊗σ, σ)`.
pub fn special_elements(sigma: &[u64], tau: &[u64], n: u64) -> Result<(SElement, SElement)> {
    let k = sigma.len();
    if tau.len() != k {
        return Err(Error::DimensionMismatch { expected: k, got: tau.len() });
    }
    let c = binom2(n)?.value() as u128;
    let m = n as u128;
    let (s, t): (Vec<u128>, Vec<u128>) =
        (sigma.iter().map(|&v| (v % n) as u128).collect(), tau.iter().map(|&v| (v % n) as u128).collect());
    let comm = (0..k).map(|a| (0..k).map(|b| ((s[a] * t[b] % m + m - t[a] * s[b] % m) % m) as u64).collect()).collect();
    let pow = (0..k).map(|a| (0..k).map(|b| (c * (s[a] * s[b] % m) % m) as u64).collect()).collect();
    Ok((SElement::new(n, comm, vec![0; k])?, SElement::new(n, pow, sigma.iter().map(|&v| v % n).collect())?))
}
