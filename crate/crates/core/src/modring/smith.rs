//! Smith forms over `Z/n` and invariant factors of subgroups.
//!
//! Row and column operations are unimodular over `Z/n`, so the row space of
//! `P·A·Q` is isomorphic (via `Q`) to that of `A`. Once `P·A·Q` is diagonal
//! with entries `d_i`, the row space is `⊕ Z/(n/gcd(d_i, n))`. Working mod
//! `n` gives the same diagonal as an integer Smith form of `[A; n·I]`,
//! reduced, without intermediate coefficient growth.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{ext_gcd, gcd, inv_mod, mul_mod, reduce, sub_mod, unit_normalizer, ModMatrix, SubgroupZnk};
use crate::error::Result;

/// Invariant factors `d_1 | d_2 | ... | d_r` of a finite abelian group, each
/// at least 2.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AbelianStructure {
    pub invariant_factors: Vec<u64>,
}

impl AbelianStructure {
    pub fn order(&self) -> Option<u128> {
        self.invariant_factors.iter().try_fold(1u128, |acc, &d| acc.checked_mul(d as u128))
    }

    pub fn exponent(&self) -> u64 {
        self.invariant_factors.last().copied().unwrap_or(1)
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty()
    }
}

/// Diagonalization `P·A·Q = D` over `Z/n`.
#[derive(Clone, Debug)]
pub struct SmithForm {
    /// Diagonal entries, one per row of `A` up to `min(rows, cols)`; each is
    /// zero or a divisor of `n`.
    pub diagonal: Vec<u64>,
    pub p: ModMatrix,
    pub q: ModMatrix,
    pub q_inv: ModMatrix,
}

impl SmithForm {
    /// Orders of the cyclic summands `Z/(n/gcd(d_i, n))` of the row space,
    /// in diagonal order (entries of order 1 included).
    pub fn cyclic_orders(&self) -> Vec<u64> {
        let n = self.p.modulus();
        self.diagonal.iter().map(|&d| if d == 0 { 1 } else { n / gcd(d, n) }).collect()
    }
}

struct Dense {
    n: u64,
    rows: usize,
    cols: usize,
    m: Vec<Vec<u64>>,
}

impl Dense {
    fn from(a: &ModMatrix) -> Self {
        Dense { n: a.modulus(), rows: a.rows(), cols: a.cols(), m: a.row_vecs() }
    }

    fn identity(n: u64, size: usize) -> Self {
        let mut m = vec![vec![0; size]; size];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1 % n;
        }
        Dense { n, rows: size, cols: size, m }
    }

    fn into_matrix(self) -> ModMatrix {
        ModMatrix::from_rows(self.n, self.cols, &self.m).expect("consistent dense matrix")
    }

    /// `(row_i, row_j) <- (α·row_i + β·row_j, γ·row_i + δ·row_j)`
    fn row_op(&mut self, i: usize, j: usize, [a, b, c, d]: [u64; 4]) {
        let n = self.n;
        for k in 0..self.cols {
            let (x, y) = (self.m[i][k], self.m[j][k]);
            self.m[i][k] = (mul_mod(a, x, n) + mul_mod(b, y, n)) % n;
            self.m[j][k] = (mul_mod(c, x, n) + mul_mod(d, y, n)) % n;
        }
    }

    /// `(col_i, col_j) <- (α·col_i + β·col_j, γ·col_i + δ·col_j)`
    fn col_op(&mut self, i: usize, j: usize, [a, b, c, d]: [u64; 4]) {
        let n = self.n;
        for row in self.m.iter_mut() {
            let (x, y) = (row[i], row[j]);
            row[i] = (mul_mod(a, x, n) + mul_mod(b, y, n)) % n;
            row[j] = (mul_mod(c, x, n) + mul_mod(d, y, n)) % n;
        }
    }

    fn scale_row(&mut self, i: usize, u: u64) {
        let n = self.n;
        for x in self.m[i].iter_mut() {
            *x = mul_mod(*x, u, n);
        }
    }

    fn scale_col(&mut self, j: usize, u: u64) {
        let n = self.n;
        for row in self.m.iter_mut() {
            row[j] = mul_mod(row[j], u, n);
        }
    }
}

/// The 2×2 unimodular matrix sending `(a, b)` to `(gcd, 0)`, and its inverse.
fn gcd_transform(a: u64, b: u64, n: u64) -> ([u64; 4], [u64; 4]) {
    let (g, s, t) = ext_gcd(a as i128, b as i128);
    let (s, t) = (reduce(s, n), reduce(t, n));
    let u = reduce(a as i128 / g, n);
    let v = reduce(b as i128 / g, n);
    // [[s, t], [-v, u]] has determinant s·u + t·v = 1; inverse [[u, -t], [v, s]].
    let fwd = [s, t, sub_mod(0, v, n), u];
    let inv = [u, sub_mod(0, t, n), v, s];
    (fwd, inv)
}

/// Diagonalizes `a` by unimodular row and column operations over `Z/n`.
pub fn smith_mod(a: &ModMatrix) -> SmithForm {
    let n = a.modulus();
    let mut m = Dense::from(a);
    let mut p = Dense::identity(n, m.rows);
    let mut q = Dense::identity(n, m.cols);
    let mut qi = Dense::identity(n, m.cols);
    let size = m.rows.min(m.cols);
    let mut diagonal = Vec::with_capacity(size);

    // Column operation `E` on M updates Q <- Q·E and Q⁻¹ <- E⁻¹·Q⁻¹.
    let col_op = |m: &mut Dense, q: &mut Dense, qi: &mut Dense, i, j, fwd: [u64; 4], inv: [u64; 4]| {
        m.col_op(i, j, fwd);
        q.col_op(i, j, fwd);
        // E acts on columns as (c_i, c_j)·[[a, c], [b, d]]; E⁻¹ acts on rows
        // of Q⁻¹ with the transposed inverse coefficients.
        qi.row_op(i, j, [inv[0], inv[2], inv[1], inv[3]]);
    };

    for t in 0..size {
        loop {
            // Pick the entry with the smallest gcd with n.
            let mut best: Option<(u64, usize, usize)> = None;
            for i in t..m.rows {
                for j in t..m.cols {
                    let x = m.m[i][j];
                    if x != 0 {
                        let g = gcd(x, n);
                        if best.is_none_or(|(bg, _, _)| g < bg) {
                            best = Some((g, i, j));
                        }
                    }
                }
            }
            let Some((_, bi, bj)) = best else { break };
            if bi != t {
                m.m.swap(bi, t);
                p.m.swap(bi, t);
            }
            if bj != t {
                col_op(&mut m, &mut q, &mut qi, t, bj, [0, 1, 1, 0], [0, 1, 1, 0]);
            }
            let u = unit_normalizer(m.m[t][t], n);
            m.scale_row(t, u);
            p.scale_row(t, u);

            let mut dirty = false;
            for i in t + 1..m.rows {
                let (d, b) = (m.m[t][t], m.m[i][t]);
                if b == 0 {
                    continue;
                }
                if b % d == 0 {
                    let k = sub_mod(0, b / d, n);
                    m.row_op(t, i, [1, 0, k, 1]);
                    p.row_op(t, i, [1, 0, k, 1]);
                } else {
                    let (fwd, _) = gcd_transform(d, b, n);
                    m.row_op(t, i, fwd);
                    p.row_op(t, i, fwd);
                    dirty = true;
                    break;
                }
            }
            if dirty {
                continue;
            }
            for j in t + 1..m.cols {
                let (d, b) = (m.m[t][t], m.m[t][j]);
                if b == 0 {
                    continue;
                }
                if b % d == 0 {
                    let k = b / d;
                    // c_j <- c_j - k·c_t
                    col_op(&mut m, &mut q, &mut qi, t, j, [1, 0, sub_mod(0, k, n), 1], [1, 0, k, 1]);
                } else {
                    let (fwd, inv) = gcd_transform(d, b, n);
                    col_op(&mut m, &mut q, &mut qi, t, j, fwd, inv);
                    dirty = true;
                    break;
                }
            }
            if !dirty {
                break;
            }
        }
        diagonal.push(m.m[t][t]);
    }
    // Normalize pivots to divisors of n (a unit column scale keeps Q honest).
    for (t, d) in diagonal.iter_mut().enumerate() {
        if *d != 0 {
            let u = unit_normalizer(*d, n);
            if u != 1 {
                let ui = inv_mod(u, n).expect("normalizer is a unit");
                m.scale_col(t, u);
                q.scale_col(t, u);
                qi.scale_row(t, ui);
            }
            *d = m.m[t][t];
        }
    }
    SmithForm { diagonal, p: p.into_matrix(), q: q.into_matrix(), q_inv: qi.into_matrix() }
}

fn factorize(mut x: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= x {
        if x.is_multiple_of(d) {
            let mut e = 0;
            while x.is_multiple_of(d) {
                x /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if x > 1 {
        out.push((x, 1));
    }
    out
}

/// Invariant factors of `⊕ Z/o_i` for the given cyclic orders.
pub fn invariant_factors_from_orders(orders: &[u64]) -> Vec<u64> {
    let mut by_prime: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for &o in orders {
        for (p, e) in factorize(o) {
            by_prime.entry(p).or_default().push(p.pow(e));
        }
    }
    let len = by_prime.values().map(Vec::len).max().unwrap_or(0);
    let mut factors = vec![1u64; len];
    for powers in by_prime.values_mut() {
        powers.sort_unstable_by(|a, b| b.cmp(a));
        for (i, pp) in powers.iter().enumerate() {
            factors[i] *= pp;
        }
    }
    factors.reverse();
    factors
}

/// Invariant factors of a subgroup of `(Z/n)^k`.
pub fn structure(s: &SubgroupZnk) -> Result<AbelianStructure> {
    if s.is_trivial() {
        return Ok(AbelianStructure::default());
    }
    let smith = smith_mod(s.canonical());
    Ok(AbelianStructure { invariant_factors: invariant_factors_from_orders(&smith.cyclic_orders()) })
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use proptest::prelude::*;

    use super::*;

    fn closure(n: u64, k: usize, gens: &[Vec<u64>]) -> BTreeSet<Vec<u64>> {
        let mut seen = BTreeSet::from([vec![0u64; k]]);
        let mut queue = vec![vec![0u64; k]];
        while let Some(v) = queue.pop() {
            for g in gens {
                let w: Vec<u64> = v.iter().zip(g).map(|(a, b)| (a + b) % n).collect();
                if seen.insert(w.clone()) {
                    queue.push(w);
                }
            }
        }
        seen
    }

    /// Invariant factors from element orders alone: for a finite abelian
    /// group the number of elements of order dividing m determines the
    /// isomorphism type, and this is checked against that count.
    fn count_divisible(set: &BTreeSet<Vec<u64>>, n: u64, m: u64) -> usize {
        set.iter().filter(|v| v.iter().all(|&x| (x * m).is_multiple_of(n))).count()
    }

    fn count_from_factors(factors: &[u64], m: u64) -> usize {
        factors.iter().map(|&d| gcd(d, m) as usize).product()
    }

    #[test]
    fn examples() {
        let triv = SubgroupZnk::from_rows(4, 2, &[]).unwrap();
        assert!(structure(&triv).unwrap().invariant_factors.is_empty());
        let s = SubgroupZnk::from_rows(4, 2, &[vec![2, 0], vec![0, 2]]).unwrap();
        assert_eq!(structure(&s).unwrap().invariant_factors, vec![2, 2]);
        let full = SubgroupZnk::from_rows(6, 1, &[vec![1]]).unwrap();
        assert_eq!(structure(&full).unwrap().invariant_factors, vec![6]);
    }

    #[test]
    fn factors_from_orders() {
        assert_eq!(invariant_factors_from_orders(&[2, 3]), vec![6]);
        assert_eq!(invariant_factors_from_orders(&[2, 4, 1]), vec![2, 4]);
        assert_eq!(invariant_factors_from_orders(&[6, 4, 9]), vec![6, 36]);
        assert!(invariant_factors_from_orders(&[1, 1]).is_empty());
    }

    #[test]
    fn transforms_are_consistent() {
        let a = ModMatrix::from_rows(12, 3, &[vec![4, 6, 2], vec![3, 9, 0], vec![8, 0, 6]]).unwrap();
        let s = smith_mod(&a);
        let d = s.p.mul(&a).unwrap().mul(&s.q).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { s.diagonal[i] } else { 0 };
                assert_eq!(d.get(i, j), expect, "({i},{j})");
            }
        }
        let id = s.q.mul(&s.q_inv).unwrap();
        assert_eq!(id, ModMatrix::identity(12, 3).unwrap());
    }

    fn gens_strategy() -> impl Strategy<Value = (u64, usize, Vec<Vec<u64>>)> {
        (2u64..=6, 1usize..=4).prop_flat_map(|(n, k)| {
            let row = proptest::collection::vec(0..n, k);
            (Just(n), Just(k), proptest::collection::vec(row, 0..5))
        })
    }

    proptest! {
        #[test]
        fn structure_matches_closure((n, k, gens) in gens_strategy()) {
            let s = SubgroupZnk::from_rows(n, k, &gens).unwrap();
            let st = structure(&s).unwrap();
            let cl = closure(n, k, &gens);
            prop_assert_eq!(st.order(), Some(cl.len() as u128));
            for w in st.invariant_factors.windows(2) {
                prop_assert_eq!(w[1] % w[0], 0);
            }
            for m in 1..=n {
                prop_assert_eq!(count_divisible(&cl, n, m), count_from_factors(&st.invariant_factors, m));
            }
        }

        #[test]
        fn smith_transforms_hold(n in 2u64..=12, rows in proptest::collection::vec(proptest::collection::vec(0u64..12, 3), 0..4)) {
            let a = ModMatrix::from_rows(n, 3, &rows).unwrap();
            let s = smith_mod(&a);
            let d = s.p.mul(&a).unwrap().mul(&s.q).unwrap();
            for i in 0..d.rows() {
                for j in 0..d.cols() {
                    let expect = if i == j && i < s.diagonal.len() { s.diagonal[i] } else { 0 };
                    prop_assert_eq!(d.get(i, j), expect);
                }
            }
            prop_assert_eq!(s.q.mul(&s.q_inv).unwrap(), ModMatrix::identity(n, 3).unwrap());
        }
    }
}
