//! Howell row canonical form over `Z/n`.
//!
//! A Howell basis `H` of a submodule `S ⊆ (Z/n)^k` is an echelon basis whose
//! pivots are divisors of `n` and whose entries above each pivot are reduced
//! modulo that pivot, with the extra property that for every column `j` the
//! rows with pivot column `>= j` span exactly the elements of `S` vanishing
//! on columns `< j`. That last property is what makes greedy reduction a
//! correct membership test when `n` is not prime. The form is unique, so two
//! generator sets span the same subgroup iff their canonical forms agree.

use serde::Serialize;

use super::{check_modulus, ext_gcd, mul_mod, reduce, sub_mod, unit_normalizer, ModMatrix, Residue};
use crate::error::{Error, Result};

#[inline]
fn scale_row(row: &mut [u64], k: u64, n: u64) {
    for x in row.iter_mut() {
        *x = mul_mod(*x, k, n);
    }
}

/// `dst -= k * src`
#[inline]
fn sub_multiple(dst: &mut [u64], src: &[u64], k: u64, n: u64, from: usize) {
    if k == 0 {
        return;
    }
    for j in from..dst.len() {
        if src[j] != 0 {
            dst[j] = sub_mod(dst[j], mul_mod(k, src[j], n), n);
        }
    }
}

/// Replaces `(p, r)` by a unimodular combination so that `p[c] = gcd` and
/// `r[c] = 0`.
fn gcd_combine(p: &mut [u64], r: &mut [u64], c: usize, n: u64) {
    let a = p[c] as i128;
    let b = r[c] as i128;
    let (g, s, t) = ext_gcd(a, b);
    let s = reduce(s, n);
    let t = reduce(t, n);
    let u = reduce(a / g, n);
    let v = reduce(-(b / g), n);
    for j in c..p.len() {
        let (x, y) = (p[j], r[j]);
        if x == 0 && y == 0 {
            continue;
        }
        p[j] = (mul_mod(s, x, n) + mul_mod(t, y, n)) % n;
        r[j] = (mul_mod(v, x, n) + mul_mod(u, y, n)) % n;
    }
}

fn is_zero(row: &[u64]) -> bool {
    row.iter().all(|&x| x == 0)
}

/// Computes the Howell form of the span of `rows` (each of length `cols`).
/// Returns `(pivot_column, row)` pairs sorted by pivot column; zero rows are
/// dropped.
pub fn howell_rows(modulus: u64, cols: usize, rows: Vec<Vec<u64>>) -> Vec<(usize, Vec<u64>)> {
    let n = modulus;
    let mut active: Vec<Vec<u64>> = rows
        .into_iter()
        .map(|mut r| {
            for x in r.iter_mut() {
                *x %= n;
            }
            r
        })
        .filter(|r| !is_zero(r))
        .collect();
    let mut result: Vec<(usize, Vec<u64>)> = Vec::new();

    for c in 0..cols {
        if active.is_empty() {
            break;
        }
        let (mut hit, mut rest): (Vec<_>, Vec<_>) = active.into_iter().partition(|r| r[c] != 0);
        let Some(mut pivot) = hit.pop() else {
            active = rest;
            continue;
        };
        let u = unit_normalizer(pivot[c], n);
        scale_row(&mut pivot, u, n);
        for mut r in hit {
            let d = pivot[c];
            if r[c] % d == 0 {
                let q = r[c] / d;
                sub_multiple(&mut r, &pivot, q, n, c);
            } else {
                gcd_combine(&mut pivot, &mut r, c, n);
                let u = unit_normalizer(pivot[c], n);
                scale_row(&mut pivot, u, n);
            }
            if !is_zero(&r) {
                rest.push(r);
            }
        }
        // The multiple (n/d)·pivot vanishes on column c; it is exactly what
        // the rows with later pivots must still account for.
        let d = pivot[c];
        let mut ann = pivot.clone();
        scale_row(&mut ann, n / d, n);
        if !is_zero(&ann) {
            rest.push(ann);
        }
        result.push((c, pivot));
        active = rest;
    }

    for r in 0..result.len() {
        let (c, d) = (result[r].0, result[r].1[result[r].0]);
        let (head, tail) = result.split_at_mut(r);
        let src = &tail[0].1;
        for (_, row) in head.iter_mut() {
            let q = row[c] / d;
            sub_multiple(row, src, q, n, c);
        }
    }
    result
}

/// A subgroup of `(Z/n)^k` together with its Howell canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubgroupZnk {
    modulus: u64,
    ambient_rank: usize,
    #[serde(skip)]
    generators: ModMatrix,
    canonical: ModMatrix,
    pivots: Vec<usize>,
}

/// Canonical form of the subgroup generated by the rows of `gens`.
pub fn canonicalize(gens: &ModMatrix) -> Result<SubgroupZnk> {
    SubgroupZnk::generated_by(gens.clone())
}

/// Whether `v` lies in `s`.
pub fn membership(s: &SubgroupZnk, v: &[Residue]) -> Result<bool> {
    if v.len() != s.ambient_rank {
        return Err(Error::DimensionMismatch { expected: s.ambient_rank, got: v.len() });
    }
    let mut raw = Vec::with_capacity(v.len());
    for x in v {
        if x.modulus() != s.modulus {
            return Err(Error::ModulusMismatch(s.modulus, x.modulus()));
        }
        raw.push(x.value());
    }
    Ok(s.contains(&raw))
}

impl SubgroupZnk {
    pub fn generated_by(gens: ModMatrix) -> Result<Self> {
        let n = gens.modulus();
        check_modulus(n)?;
        let k = gens.cols();
        let rows = howell_rows(n, k, gens.row_vecs());
        let pivots = rows.iter().map(|(c, _)| *c).collect();
        let canonical = ModMatrix::from_rows(n, k, &rows.into_iter().map(|(_, r)| r).collect::<Vec<_>>())?;
        Ok(SubgroupZnk { modulus: n, ambient_rank: k, generators: gens, canonical, pivots })
    }

    /// Convenience constructor from raw generator rows.
    pub fn from_rows(modulus: u64, ambient_rank: usize, rows: &[Vec<u64>]) -> Result<Self> {
        Self::generated_by(ModMatrix::from_rows(modulus, ambient_rank, rows)?)
    }

    pub fn trivial(modulus: u64, ambient_rank: usize) -> Result<Self> {
        Self::generated_by(ModMatrix::zeros(modulus, 0, ambient_rank)?)
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn generators(&self) -> &ModMatrix {
        &self.generators
    }

    pub fn canonical(&self) -> &ModMatrix {
        &self.canonical
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Reduces `v` against the canonical rows. Returns the remainder and the
    /// coefficient used for each canonical row; `v` is a member iff the
    /// remainder is zero, in which case `v = Σ coeff_i · row_i`.
    pub fn reduce(&self, v: &[u64]) -> (Vec<u64>, Vec<u64>) {
        let n = self.modulus;
        let mut rem: Vec<u64> = v.iter().map(|x| x % n).collect();
        let mut coeffs = vec![0; self.pivots.len()];
        let mut next = 0;
        for c in 0..self.ambient_rank {
            if rem[c] == 0 {
                if next < self.pivots.len() && self.pivots[next] == c {
                    next += 1;
                }
                continue;
            }
            if next < self.pivots.len() && self.pivots[next] == c {
                let row = self.canonical.row(next);
                let d = row[c];
                if !rem[c].is_multiple_of(d) {
                    return (rem, coeffs);
                }
                let q = rem[c] / d;
                sub_multiple(&mut rem, row, q, n, c);
                coeffs[next] = q;
                next += 1;
            } else {
                return (rem, coeffs);
            }
        }
        (rem, coeffs)
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        v.len() == self.ambient_rank && is_zero(&self.reduce(v).0)
    }

    /// Order of the subgroup, `Π n/d` over the pivots `d`; `None` on overflow.
    pub fn order(&self) -> Option<u128> {
        self.pivots
            .iter()
            .enumerate()
            .try_fold(1u128, |acc, (i, &c)| acc.checked_mul((self.modulus / self.canonical.get(i, c)) as u128))
    }

    pub fn is_trivial(&self) -> bool {
        self.pivots.is_empty()
    }

    /// Same span as `other` (same modulus and rank).
    pub fn same_span(&self, other: &SubgroupZnk) -> bool {
        self.modulus == other.modulus && self.ambient_rank == other.ambient_rank && self.canonical == other.canonical
    }

    /// Enumerates every element; intended for small subgroups in tests and
    /// reports.
    pub fn elements(&self) -> Vec<Vec<u64>> {
        let n = self.modulus;
        let mut out = vec![vec![0u64; self.ambient_rank]];
        for (i, &c) in self.pivots.iter().enumerate() {
            let row = self.canonical.row(i);
            let count = n / row[c];
            let mut next = Vec::with_capacity(out.len() * count as usize);
            for v in &out {
                for q in 0..count {
                    next.push(v.iter().zip(row).map(|(&a, &b)| (a + mul_mod(q, b, n)) % n).collect());
                }
            }
            out = next;
        }
        out
    }
}
