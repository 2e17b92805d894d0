use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest group order accepted for table groups.
pub const GROUP_LIMIT: usize = 10_000;

/// JSON form of a table group: `{order, table, labels}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableGroupJson {
    pub order: usize,
    pub table: Vec<Vec<usize>>,
    #[serde(default)]
    pub labels: Vec<String>,
}

/// A finite group given by its multiplication table, verified at
/// construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableGroup {
    order: usize,
    table: Vec<u32>,
    identity: usize,
    inverses: Vec<usize>,
    generators: Vec<usize>,
    labels: Vec<String>,
}

impl TableGroup {
    /// Validates a multiplication table: entries in range, an identity,
    /// Latin-square rows and columns (so inverses exist) and associativity.
    pub fn from_table(table: Vec<Vec<usize>>, labels: Vec<String>) -> Result<Self> {
        let order = table.len();
        if order == 0 {
            return Err(Error::InvalidGroup("empty table".into()));
        }
        if order > GROUP_LIMIT {
            return Err(Error::GroupTooLarge { order, limit: GROUP_LIMIT });
        }
        if !labels.is_empty() && labels.len() != order {
            return Err(Error::InvalidGroup(format!("{} labels for {} elements", labels.len(), order)));
        }
        let mut flat = Vec::with_capacity(order * order);
        for (i, row) in table.iter().enumerate() {
            if row.len() != order {
                return Err(Error::InvalidGroup(format!("row {i} has length {}", row.len())));
            }
            for &v in row {
                if v >= order {
                    return Err(Error::InvalidGroup(format!("entry {v} out of range in row {i}")));
                }
                flat.push(v as u32);
            }
        }
        let mul = |a: usize, b: usize| flat[a * order + b] as usize;
        let identity = (0..order)
            .find(|&e| (0..order).all(|x| mul(e, x) == x && mul(x, e) == x))
            .ok_or_else(|| Error::InvalidGroup("no identity element".into()))?;
        let mut seen = vec![usize::MAX; order];
        for a in 0..order {
            for b in 0..order {
                if seen[mul(a, b)] == a {
                    return Err(Error::InvalidGroup(format!("row {a} repeats an entry")));
                }
                seen[mul(a, b)] = a;
            }
        }
        let mut seen = vec![usize::MAX; order];
        for b in 0..order {
            for a in 0..order {
                if seen[mul(a, b)] == b {
                    return Err(Error::InvalidGroup(format!("column {b} repeats an entry")));
                }
                seen[mul(a, b)] = b;
            }
        }
        let inverses: Vec<usize> =
            (0..order).map(|a| (0..order).find(|&b| mul(a, b) == identity).expect("latin square")).collect();
        let mut group = TableGroup { order, table: flat, identity, inverses, generators: Vec::new(), labels };
        group.generators = group.greedy_generators();
        group.check_associative()?;
        Ok(group)
    }

    /// Builds the table of `f` on `0..order`.
    pub fn from_fn(order: usize, f: impl Fn(usize, usize) -> usize) -> Result<Self> {
        if order > GROUP_LIMIT {
            return Err(Error::GroupTooLarge { order, limit: GROUP_LIMIT });
        }
        let table = (0..order).map(|a| (0..order).map(|b| f(a, b)).collect()).collect();
        Self::from_table(table, Vec::new())
    }

    pub fn from_json(j: &TableGroupJson) -> Result<Self> {
        if j.order != j.table.len() {
            return Err(Error::InvalidGroup(format!("order {} but {} rows", j.order, j.table.len())));
        }
        Self::from_table(j.table.clone(), j.labels.clone())
    }

    pub fn to_json(&self) -> TableGroupJson {
        TableGroupJson {
            order: self.order,
            table: (0..self.order).map(|a| (0..self.order).map(|b| self.mul(a, b)).collect()).collect(),
            labels: self.labels.clone(),
        }
    }

    /// `Z/m`, element `i` standing for `i mod m`.
    pub fn cyclic(m: usize) -> Result<Self> {
        Self::from_fn(m, |a, b| (a + b) % m)
    }

    /// `(Z/m)^k`, element index `Σ c_i m^i`.
    pub fn elementary(k: usize, m: usize) -> Result<Self> {
        let order = m
            .checked_pow(k as u32)
            .filter(|&o| o <= GROUP_LIMIT)
            .ok_or(Error::GroupTooLarge { order: usize::MAX, limit: GROUP_LIMIT })?;
        Self::from_fn(order, |a, b| {
            let (mut a, mut b) = (a, b);
            let mut out = 0;
            let mut place = 1;
            for _ in 0..k {
                out += ((a % m + b % m) % m) * place;
                a /= m;
                b /= m;
                place *= m;
            }
            out
        })
    }

    /// `A × B`, element `(a, b)` at index `a·|B| + b`.
    pub fn direct_product(a: &TableGroup, b: &TableGroup) -> Result<Self> {
        let nb = b.order;
        Self::from_fn(a.order * nb, |x, y| a.mul(x / nb, y / nb) * nb + b.mul(x % nb, y % nb))
    }

    /// Dihedral group of order `2m`: index `r + m·s` for `ρ^r φ^s`.
    pub fn dihedral(m: usize) -> Result<Self> {
        Self::from_fn(2 * m, |x, y| {
            let (r1, s1) = (x % m, x / m);
            let (r2, s2) = (y % m, y / m);
            let r = if s1 == 0 { (r1 + r2) % m } else { (r1 + m - r2) % m };
            r + m * ((s1 + s2) % 2)
        })
    }

    /// The quaternion group of order 8, elements `±1, ±i, ±j, ±k` indexed
    /// `sign·4 + unit` with units `1, i, j, k` as `0..4`.
    pub fn quaternion() -> Result<Self> {
        // unit products with sign: table[u][v] = (sign, unit)
        const T: [[(usize, usize); 4]; 4] = [
            [(0, 0), (0, 1), (0, 2), (0, 3)],
            [(0, 1), (1, 0), (0, 3), (1, 2)],
            [(0, 2), (1, 3), (1, 0), (0, 1)],
            [(0, 3), (0, 2), (1, 1), (1, 0)],
        ];
        Self::from_fn(8, |x, y| {
            let (s, u) = T[x % 4][y % 4];
            ((x / 4 + y / 4 + s) % 2) * 4 + u
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// A generating set chosen greedily in index order.
    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn pow(&self, a: usize, e: u64) -> usize {
        let mut acc = self.identity;
        let mut base = a;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// `a⁻¹ b⁻¹ a b`
    pub fn commutator(&self, a: usize, b: usize) -> usize {
        let left = self.mul(self.inv(a), self.inv(b));
        self.mul(self.mul(left, a), b)
    }

    pub fn element_order(&self, a: usize) -> u64 {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn exponent(&self) -> u64 {
        (0..self.order).map(|a| self.element_order(a)).fold(1, |acc, o| acc / crate::modring::gcd(acc, o) * o)
    }

    pub fn is_abelian(&self) -> bool {
        self.generators.iter().all(|&s| (0..self.order).all(|x| self.mul(s, x) == self.mul(x, s)))
    }

    /// Subgroup generated by `gens`, as a sorted element list.
    pub fn closure(&self, gens: &[usize]) -> Vec<usize> {
        let mut member = vec![false; self.order];
        member[self.identity] = true;
        let mut list = vec![self.identity];
        let mut i = 0;
        while i < list.len() {
            let x = list[i];
            for &s in gens {
                let y = self.mul(x, s);
                if !member[y] {
                    member[y] = true;
                    list.push(y);
                }
            }
            i += 1;
        }
        list.sort_unstable();
        list
    }

    /// Whether the subgroup `h` (a sorted element list) is normal.
    pub fn is_normal(&self, h: &[usize]) -> bool {
        let mut member = vec![false; self.order];
        for &x in h {
            member[x] = true;
        }
        self.generators.iter().all(|&g| h.iter().all(|&x| member[self.mul(self.mul(self.inv(g), x), g)]))
    }

    /// Whether `f` (indexed by element) is a homomorphism into `target`.
    pub fn is_hom_into(&self, target: &TableGroup, f: &[usize]) -> bool {
        f.len() == self.order
            && f.iter().all(|&y| y < target.order)
            && (0..self.order).all(|a| (0..self.order).all(|b| f[self.mul(a, b)] == target.mul(f[a], f[b])))
    }

    fn greedy_generators(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut member = vec![false; self.order];
        member[self.identity] = true;
        for x in 0..self.order {
            if member[x] {
                continue;
            }
            gens.push(x);
            for y in self.closure(&gens) {
                member[y] = true;
            }
        }
        gens
    }

    /// Light's associativity test: the elements `a` with `(xa)y = x(ay)` for
    /// all `x, y` are closed under products, so checking a generating set
    /// suffices. Every element is a left-normed product of the greedy
    /// generators, which makes the check complete.
    fn check_associative(&self) -> Result<()> {
        for &a in &self.generators {
            for x in 0..self.order {
                let xa = self.mul(x, a);
                for y in 0..self.order {
                    if self.mul(xa, y) != self.mul(x, self.mul(a, y)) {
                        return Err(Error::InvalidGroup(format!("not associative at ({x}, {a}, {y})")));
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_and_elementary() {
        let z4 = TableGroup::cyclic(4).unwrap();
        assert_eq!(z4.identity(), 0);
        assert_eq!(z4.inv(1), 3);
        assert_eq!(z4.element_order(1), 4);
        assert_eq!(z4.generators(), &[1]);
        let v = TableGroup::elementary(2, 3).unwrap();
        assert_eq!(v.order(), 9);
        assert_eq!(v.exponent(), 3);
        assert_eq!(v.generators(), &[1, 3]);
        assert!(v.is_abelian());
    }

    #[test]
    fn nonabelian_examples() {
        let d4 = TableGroup::dihedral(4).unwrap();
        assert_eq!(d4.order(), 8);
        assert!(!d4.is_abelian());
        let q8 = TableGroup::quaternion().unwrap();
        assert!(!q8.is_abelian());
        // Q8 has a unique element of order 2.
        assert_eq!((0..8).filter(|&x| q8.element_order(x) == 2).count(), 1);
        assert_eq!((0..8).filter(|&x| d4.element_order(x) == 2).count(), 5);
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(TableGroup::from_table(vec![vec![0, 1], vec![1, 1]], vec![]).is_err());
        assert!(TableGroup::from_table(vec![vec![0, 2], vec![1, 0]], vec![]).is_err());
        assert!(TableGroup::from_table(vec![], vec![]).is_err());
        // A Latin square with identity that is not associative (order 5 loop).
        let loop5 = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        let err = TableGroup::from_table(loop5, vec![]).unwrap_err();
        assert!(matches!(err, Error::InvalidGroup(m) if m.contains("associative")));
    }

    #[test]
    fn light_test_agrees_with_full_check() {
        let d3 = TableGroup::dihedral(3).unwrap();
        for x in 0..6 {
            for y in 0..6 {
                for z in 0..6 {
                    assert_eq!(d3.mul(d3.mul(x, y), z), d3.mul(x, d3.mul(y, z)));
                }
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let g = TableGroup::quaternion().unwrap();
        let j = g.to_json();
        let text = serde_json::to_string(&j).unwrap();
        let back: TableGroupJson = serde_json::from_str(&text).unwrap();
        assert_eq!(TableGroup::from_json(&back).unwrap(), g);
        let bad = TableGroupJson { order: 3, ..j };
        assert!(TableGroup::from_json(&bad).is_err());
    }

    #[test]
    fn closure_and_normality() {
        let d4 = TableGroup::dihedral(4).unwrap();
        let rot = d4.closure(&[1]);
        assert_eq!(rot, vec![0, 1, 2, 3]);
        assert!(d4.is_normal(&rot));
        let refl = d4.closure(&[4]);
        assert_eq!(refl.len(), 2);
        assert!(!d4.is_normal(&refl));
    }
}
