use std::collections::BTreeSet;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::TableGroup;
use crate::error::{Error, Result};
use crate::modring::{binom2, check_modulus, howell_rows, solve_linear, ModMatrix, Residue, Solution};

#[derive(Clone, Debug)]
enum Storage {
    Table(Vec<u32>),
    /// `(a, b) ↦ base(proj a, proj b)`.
    Inflated {
        base: Arc<Cocycle2>,
        proj: Arc<Vec<usize>>,
    },
}

/// A normalized-or-not 2-cocycle `G × G → Z/n` with trivial action.
#[derive(Clone, Debug)]
pub struct Cocycle2 {
    group: Arc<TableGroup>,
    modulus: u64,
    storage: Storage,
}

impl Cocycle2 {
    /// Builds a cocycle from its value table (row-major, `N × N`) and checks
    /// the cocycle identity.
    pub fn new(group: &Arc<TableGroup>, modulus: u64, values: Vec<u64>) -> Result<Self> {
        check_modulus(modulus)?;
        let n2 = group.order() * group.order();
        if values.len() != n2 {
            return Err(Error::DimensionMismatch { expected: n2, got: values.len() });
        }
        let table = values.into_iter().map(|v| (v % modulus) as u32).collect();
        let c = Cocycle2 { group: Arc::clone(group), modulus, storage: Storage::Table(table) };
        c.verify_identity()?;
        Ok(c)
    }

    pub fn from_fn(group: &Arc<TableGroup>, modulus: u64, f: impl Fn(usize, usize) -> u64 + Sync) -> Result<Self> {
        let n = group.order();
        let values: Vec<u64> = (0..n * n).into_par_iter().map(|i| f(i / n, i % n)).collect();
        Self::new(group, modulus, values)
    }

    pub fn zero(group: &Arc<TableGroup>, modulus: u64) -> Result<Self> {
        check_modulus(modulus)?;
        let n = group.order();
        Ok(Cocycle2 { group: Arc::clone(group), modulus, storage: Storage::Table(vec![0; n * n]) })
    }

    /// Pulls back along a homomorphism `proj : target → self.group`.
    pub fn inflate(self: &Arc<Self>, target: &Arc<TableGroup>, proj: Vec<usize>) -> Result<Self> {
        if !target.is_hom_into(&self.group, &proj) {
            return Err(Error::NotHomomorphism("inflation map".into()));
        }
        Ok(Cocycle2 {
            group: Arc::clone(target),
            modulus: self.modulus,
            storage: Storage::Inflated { base: Arc::clone(self), proj: Arc::new(proj) },
        })
    }

    pub fn group(&self) -> &Arc<TableGroup> {
        &self.group
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    #[inline]
    pub fn value(&self, a: usize, b: usize) -> u64 {
        match &self.storage {
            Storage::Table(t) => u64::from(t[a * self.group.order() + b]),
            Storage::Inflated { base, proj } => base.value(proj[a], proj[b]),
        }
    }

    /// Full value table, row-major.
    pub fn values(&self) -> Vec<u64> {
        let n = self.group.order();
        (0..n * n).map(|i| self.value(i / n, i % n)).collect()
    }

    pub fn is_normalized(&self) -> bool {
        let e = self.group.identity();
        (0..self.group.order()).all(|g| self.value(e, g) == 0 && self.value(g, e) == 0)
    }

    /// Pointwise `a·self + b·other`.
    pub fn combine(&self, a: u64, other: &Cocycle2, b: u64) -> Result<Self> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch(self.modulus, other.modulus));
        }
        if self.group != other.group {
            return Err(Error::InvalidInput("cocycles live on different groups".into()));
        }
        let m = self.modulus as u128;
        let (a, b) = (a as u128 % m, b as u128 % m);
        Self::from_fn(&self.group, self.modulus, |x, y| {
            ((a * self.value(x, y) as u128 + b * other.value(x, y) as u128) % m) as u64
        })
    }

    /// Adds the coboundary of `v`: `(σ, τ) ↦ ξ(σ, τ) + v(σ) + v(τ) − v(στ)`.
    pub fn add_coboundary(&self, v: &[u64]) -> Result<Self> {
        let g = &self.group;
        if v.len() != g.order() {
            return Err(Error::DimensionMismatch { expected: g.order(), got: v.len() });
        }
        let m = self.modulus;
        Self::from_fn(g, m, |a, b| (self.value(a, b) + v[a] % m + v[b] % m + m - v[g.mul(a, b)] % m) % m)
    }

    /// Checks `ξ(σ,τ) + ξ(στ,ρ) = ξ(τ,ρ) + ξ(σ,τρ)`. Checking `ρ` over a
    /// generating set together with constancy of `ξ(·, 1)` is equivalent to
    /// checking all triples, by induction on word length of `ρ`.
    pub fn verify_identity(&self) -> Result<()> {
        let g = self.group.as_ref();
        let n = g.order();
        if matches!(self.storage, Storage::Inflated { .. }) {
            // The base was verified and `proj` is a homomorphism.
            return Ok(());
        }
        let e = g.identity();
        let c = self.value(e, e);
        if let Some(s) = (0..n).find(|&s| self.value(s, e) != c) {
            return Err(Error::NotCocycle(s, e, e));
        }
        let m = self.modulus;
        let bad = (0..n).into_par_iter().find_map_any(|a| {
            for b in 0..n {
                let ab = g.mul(a, b);
                let x = self.value(a, b);
                for &r in g.generators() {
                    let lhs = (x + self.value(ab, r)) % m;
                    let rhs = (self.value(b, r) + self.value(a, g.mul(b, r))) % m;
                    if lhs != rhs {
                        return Some((a, b, r));
                    }
                }
            }
            None
        });
        match bad {
            Some((a, b, r)) => Err(Error::NotCocycle(a, b, r)),
            None => Ok(()),
        }
    }
}

/// `⟨σ, x⟩ = Σ σ_i x_i` in `Z/n`.
pub fn pair(sigma: &[u64], x: &[u64], n: u64) -> u64 {
    sigma.iter().zip(x).fold(0u128, |acc, (&s, &t)| (acc + s as u128 * t as u128) % n as u128) as u64
}

/// Elementary cocycle building blocks on `(Z/n)^k`; `x, y, z` are linear
/// forms given by their values on the standard basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum CocycleTerm {
    /// Cup product cocycle `(σ, τ) ↦ σ(x)·τ(y)`.
    U { x: Vec<u64>, y: Vec<u64> },
    /// Carry cocycle `(σ, τ) ↦ [f_z(σ) + f_z(τ) >= n]`, representing `βz`.
    B { z: Vec<u64> },
}

impl CocycleTerm {
    pub fn value(&self, sigma: &[u64], tau: &[u64], n: u64) -> u64 {
        match self {
            CocycleTerm::U { x, y } => (pair(sigma, x, n) as u128 * pair(tau, y, n) as u128 % n as u128) as u64,
            CocycleTerm::B { z } => u64::from(pair(sigma, z, n) + pair(tau, z, n) >= n),
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            CocycleTerm::U { x, .. } => x.len(),
            CocycleTerm::B { z } => z.len(),
        }
    }
}

/// `Σ c_i n^i ↦ (c_0, c_1, ...)`
pub fn elementary_coords(mut idx: usize, k: usize, n: u64) -> Vec<u64> {
    (0..k)
        .map(|_| {
            let c = (idx as u64) % n;
            idx /= n as usize;
            c
        })
        .collect()
}

pub fn elementary_index(coords: &[u64], n: u64) -> usize {
    coords.iter().rev().fold(0usize, |acc, &c| acc * n as usize + (c % n) as usize)
}

/// Cocycle `Σ c·term` on `(Z/n)^k` realized as [`TableGroup::elementary`].
pub fn term_cocycle(group: &Arc<TableGroup>, k: usize, n: u64, terms: &[(u64, CocycleTerm)]) -> Result<Cocycle2> {
    if group.order() != (n as usize).pow(k as u32) {
        return Err(Error::DimensionMismatch { expected: (n as usize).pow(k as u32), got: group.order() });
    }
    for (_, t) in terms {
        if t.rank() != k {
            return Err(Error::DimensionMismatch { expected: k, got: t.rank() });
        }
    }
    let coords: Vec<Vec<u64>> = (0..group.order()).map(|i| elementary_coords(i, k, n)).collect();
    Cocycle2::from_fn(group, n, |a, b| {
        terms.iter().fold(0, |acc, (c, t)| {
            ((acc as u128 + (*c % n) as u128 * t.value(&coords[a], &coords[b], n) as u128) % n as u128) as u64
        })
    })
}

/// Cup and carry cocycles `U_{x,y}` and `B_x` on `(Z/n)^k`.
pub fn cup_and_carry_cocycles(k: usize, n: u64, x: &[u64], y: &[u64]) -> Result<(Cocycle2, Cocycle2)> {
    check_modulus(n)?;
    let g = Arc::new(TableGroup::elementary(k, n as usize)?);
    let u = term_cocycle(&g, k, n, &[(1, CocycleTerm::U { x: x.to_vec(), y: y.to_vec() })])?;
    let b = term_cocycle(&g, k, n, &[(1, CocycleTerm::B { z: x.to_vec() })])?;
    Ok((u, b))
}

/// Violation counters for the four cup/carry identities.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CupBockReport {
    pub rank: usize,
    pub modulus: u64,
    /// `U(σ,τ) + U(τ⁻¹,στ) − U(τ⁻¹,τ) = σ(x)τ(y) − σ(y)τ(x)`
    pub cup_commutator: u64,
    /// `Σ_i U(σ^i, σ) = C(n,2)·σ(x)σ(y)`
    pub cup_power: u64,
    /// `B(σ,τ) + B(τ⁻¹,στ) − B(τ⁻¹,τ) = 0`
    pub carry_commutator: u64,
    /// `Σ_i B(σ^i, σ) = σ(x)`
    pub carry_power: u64,
    pub cases: u64,
}

impl CupBockReport {
    pub fn violations(&self) -> u64 {
        self.cup_commutator + self.cup_power + self.carry_commutator + self.carry_power
    }
}

/// Checks the four identities for all `σ, τ ∈ (Z/n)^k` and all standard
/// basis forms `x, y`, using the tabulated cocycles.
pub fn verify_cup_bock_identities(k: usize, n: u64) -> Result<CupBockReport> {
    check_modulus(n)?;
    let c = binom2(n)?.value();
    let g = Arc::new(TableGroup::elementary(k, n as usize)?);
    let order = g.order();
    let coords: Vec<Vec<u64>> = (0..order).map(|i| elementary_coords(i, k, n)).collect();
    let mut report = CupBockReport { rank: k, modulus: n, ..Default::default() };
    let basis = |i: usize| -> Vec<u64> { (0..k).map(|j| u64::from(i == j)).collect() };
    let sub = |a: u64, b: u64| (a + n - b) % n;
    for i in 0..k {
        for j in 0..k {
            let (x, y) = (basis(i), basis(j));
            let (u, b) = cup_and_carry_cocycles(k, n, &x, &y)?;
            let counts = (0..order)
                .into_par_iter()
                .map(|s| {
                    let mut cnt = [0u64; 4];
                    let sx = pair(&coords[s], &x, n);
                    let sy = pair(&coords[s], &y, n);
                    for t in 0..order {
                        let ti = g.inv(t);
                        let st = g.mul(s, t);
                        let tx = pair(&coords[t], &x, n);
                        let ty = pair(&coords[t], &y, n);
                        let lhs = sub((u.value(s, t) + u.value(ti, st)) % n, u.value(ti, t));
                        let rhs = sub(sx * ty % n, sy * tx % n);
                        cnt[0] += u64::from(lhs != rhs);
                        let lhs = sub((b.value(s, t) + b.value(ti, st)) % n, b.value(ti, t));
                        cnt[2] += u64::from(lhs != 0);
                    }
                    let (mut su, mut sb) = (0u64, 0u64);
                    for p in 0..n {
                        let si = g.pow(s, p);
                        su = (su + u.value(si, s)) % n;
                        sb = (sb + b.value(si, s)) % n;
                    }
                    cnt[1] += u64::from(su != c * (sx * sy % n) % n);
                    cnt[3] += u64::from(sb != sx);
                    cnt
                })
                .reduce(|| [0; 4], |a, b| [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]);
            report.cup_commutator += counts[0];
            report.cup_power += counts[1];
            report.carry_commutator += counts[2];
            report.carry_power += counts[3];
            report.cases += (order * order) as u64;
        }
    }
    Ok(report)
}

/// Outcome of a coboundary solve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Coboundary {
    /// `u` with `u(στ) = u(σ) + u(τ) − ξ(σ,τ)` for all `σ, τ`.
    Trivial(Vec<u64>),
    /// No such `u` exists.
    NonTrivial,
}

impl Coboundary {
    pub fn cochain(&self) -> Option<&[u64]> {
        match self {
            Coboundary::Trivial(u) => Some(u),
            Coboundary::NonTrivial => None,
        }
    }
}

/// Breadth-first spanning tree of the Cayley graph on the group's
/// generators. A cochain with `du = ξ` is pinned down by its values on the
/// generators: along a tree edge `g → gs`, `u(gs) = u(g) + u(s) − ξ(g,s)`.
/// The remaining edges give linear conditions on those values, and the
/// edge conditions over all `g` and generators `s` imply `du = ξ`
/// everywhere (cocycle identity plus induction on word length).
pub(crate) struct CayleyTree<'a> {
    group: &'a TableGroup,
    /// BFS order, starting at the identity.
    order: Vec<usize>,
    /// `(parent, generator position)` for each non-identity element.
    parent: Vec<(usize, usize)>,
}

impl<'a> CayleyTree<'a> {
    pub(crate) fn new(group: &'a TableGroup) -> Self {
        let n = group.order();
        let mut parent = vec![(usize::MAX, usize::MAX); n];
        let e = group.identity();
        parent[e] = (e, usize::MAX);
        let mut order = vec![e];
        let mut i = 0;
        while i < order.len() {
            let g = order[i];
            for (j, &s) in group.generators().iter().enumerate() {
                let h = group.mul(g, s);
                if parent[h].0 == usize::MAX {
                    parent[h] = (g, j);
                    order.push(h);
                }
            }
            i += 1;
        }
        CayleyTree { group, order, parent }
    }

    /// Edge conditions for the family `ξ_c = Σ_j c_j ξ_j`, where `xi(g, h)`
    /// returns `(ξ_j(g, h))_j`. Each row reads `(α | β)` meaning
    /// `α·w + β·c = 0`, `w` the values of `u` on the generators. Zero and
    /// duplicate rows are dropped.
    pub(crate) fn conditions(&self, m: usize, n: u64, xi: &(dyn Fn(usize, usize) -> Vec<u64> + Sync)) -> Vec<Vec<u64>> {
        let g = self.group;
        let s = g.generators().len();
        let size = g.order();
        // u(h) = a[h]·w + b[h]·c
        let mut a = vec![vec![0u64; s]; size];
        let mut b = vec![vec![0u64; m]; size];
        let e = g.identity();
        b[e] = xi(e, e);
        for &h in &self.order[1..] {
            let (p, j) = self.parent[h];
            let x = xi(p, g.generators()[j]);
            let mut ah = a[p].clone();
            ah[j] = (ah[j] + 1) % n;
            let bh = b[p].iter().zip(&x).map(|(&u, &v)| (u + n - v % n) % n).collect();
            a[h] = ah;
            b[h] = bh;
        }
        let rows: BTreeSet<Vec<u64>> = (0..size)
            .into_par_iter()
            .flat_map_iter(|h| {
                let (a, b) = (&a, &b);
                g.generators().iter().enumerate().map(move |(j, &gen)| {
                    let hs = g.mul(h, gen);
                    let x = xi(h, gen);
                    let mut row = Vec::with_capacity(s + m);
                    for t in 0..s {
                        row.push((a[h][t] + u64::from(t == j) + n - a[hs][t]) % n);
                    }
                    for t in 0..m {
                        row.push((b[h][t] + 2 * n - b[hs][t] - x[t] % n) % n);
                    }
                    row
                })
            })
            .filter(|r| r.iter().any(|&v| v != 0))
            .collect();
        rows.into_iter().collect()
    }

    /// The values `u(h)` given `w` (values on generators) for one cocycle.
    pub(crate) fn extend(&self, w: &[u64], n: u64, xi: impl Fn(usize, usize) -> u64) -> Vec<u64> {
        let g = self.group;
        let mut u = vec![0u64; g.order()];
        let e = g.identity();
        u[e] = xi(e, e) % n;
        for &h in &self.order[1..] {
            let (p, j) = self.parent[h];
            let s = g.generators()[j];
            u[h] = (u[p] + w[j] + n - xi(p, s) % n) % n;
        }
        u
    }
}

/// Checks `u(στ) = u(σ) + u(τ) − ξ(σ,τ)` on all pairs; returns the first
/// failing pair.
pub fn check_coboundary(xi: &Cocycle2, u: &[u64]) -> Option<(usize, usize)> {
    let g = xi.group();
    let n = xi.modulus();
    (0..g.order()).into_par_iter().find_map_first(|a| {
        (0..g.order()).find(|&b| (u[a] + u[b] + n - xi.value(a, b)) % n != u[g.mul(a, b)] % n).map(|b| (a, b))
    })
}

/// Finds `u` with `du = ξ` (and `u(1) = ξ(1,1)`, which is `0` for
/// normalized `ξ`), or certifies that none exists.
pub fn solve_coboundary(group: &TableGroup, xi: &Cocycle2) -> Result<Coboundary> {
    if group != xi.group().as_ref() {
        return Err(Error::InvalidInput("cocycle is defined on a different group".into()));
    }
    xi.verify_identity()?;
    let n = xi.modulus();
    let tree = CayleyTree::new(group);
    let rows = tree.conditions(1, n, &|a, b| vec![xi.value(a, b)]);
    let s = group.generators().len();
    let w = if rows.is_empty() {
        vec![0; s]
    } else {
        let a = ModMatrix::from_rows(n, s, &rows.iter().map(|r| r[..s].to_vec()).collect::<Vec<_>>())?;
        let rhs: Vec<Residue> = rows.iter().map(|r| Residue::new(n, (n - r[s]) % n)).collect();
        match solve_linear(&a, &rhs)? {
            Solution::Found(w) => w.iter().map(Residue::value).collect(),
            Solution::NoSolution => return Ok(Coboundary::NonTrivial),
        }
    };
    let u = tree.extend(&w, n, |a, b| xi.value(a, b));
    if let Some((a, b)) = check_coboundary(xi, &u) {
        return Err(Error::TheoremViolation(format!("solved cochain fails du = ξ at ({a}, {b})")));
    }
    Ok(Coboundary::Trivial(u))
}

/// Coefficient vectors `c` with `Σ c_j ξ_j` a coboundary on `group`, as
/// canonical (Howell) generators of that subgroup of `(Z/n)^m`.
pub(crate) fn coboundary_relations(
    group: &TableGroup,
    n: u64,
    m: usize,
    xi: &(dyn Fn(usize, usize) -> Vec<u64> + Sync),
) -> Vec<Vec<u64>> {
    let tree = CayleyTree::new(group);
    let rows = tree.conditions(m, n, xi);
    let s = group.generators().len();
    let e = rows.len();
    // Row t of the transpose carries column t of (α | β), then e_t on the
    // c-part: combinations with vanishing first block are exactly
    // (0, c) with α·w + β·c = 0 for some w.
    let mut trans = Vec::with_capacity(s + m);
    for t in 0..s + m {
        let mut r: Vec<u64> = rows.iter().map(|row| row[t]).collect();
        r.extend((0..m).map(|j| u64::from(t >= s && t - s == j)));
        trans.push(r);
    }
    howell_rows(n, e + m, trans).into_iter().filter(|(p, _)| *p >= e).map(|(_, r)| r[e..].to_vec()).collect()
}
