use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::TableGroup;
use crate::error::{Error, Result};
use crate::modring::{smith_mod, ModMatrix};

/// The quotient `G^(i) / G^(i+1)` with coordinates in `⊕ Z/o_j`.
#[derive(Clone, Debug)]
pub struct Layer {
    /// `coset[g]` for `g ∈ G^(i)`, `usize::MAX` otherwise.
    coset: Vec<usize>,
    /// Elements of each coset, ascending.
    members: Vec<Vec<usize>>,
    basis: Vec<usize>,
    orders: Vec<u64>,
    coords: Vec<Vec<u64>>,
    /// Coset of each coordinate vector, by mixed-radix code.
    by_code: Vec<usize>,
}

impl Layer {
    pub fn size(&self) -> usize {
        self.members.len()
    }

    /// Group elements whose classes form the chosen basis.
    pub fn basis(&self) -> &[usize] {
        &self.basis
    }

    /// Orders of the basis classes.
    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn contains(&self, g: usize) -> bool {
        self.coset[g] != usize::MAX
    }

    /// Coordinates of the class of `g`; `None` if `g ∉ G^(i)`.
    pub fn coords_of(&self, g: usize) -> Option<&[u64]> {
        let c = *self.coset.get(g)?;
        (c != usize::MAX).then(|| self.coords[c].as_slice())
    }

    /// Elements of the class with the given coordinates, ascending.
    pub fn preimages(&self, coords: &[u64]) -> Result<&[usize]> {
        if coords.len() != self.orders.len() {
            return Err(Error::DimensionMismatch { expected: self.orders.len(), got: coords.len() });
        }
        Ok(&self.members[self.by_code[self.code(coords)]])
    }

    fn code(&self, coords: &[u64]) -> usize {
        let mut code = 0usize;
        let mut place = 1usize;
        for (&c, &o) in coords.iter().zip(&self.orders) {
            code += (c % o) as usize * place;
            place *= o as usize;
        }
        code
    }

    /// All coordinate vectors, in mixed-radix order (first coordinate
    /// fastest).
    pub fn all_coords(&self) -> Vec<Vec<u64>> {
        let mut out = vec![Vec::new()];
        for &o in &self.orders {
            out = (0..o).flat_map(|c| out.iter().map(move |v| [v.as_slice(), &[c]].concat())).collect();
        }
        // reorder so that the first coordinate varies fastest
        out.sort_by_key(|v| self.code(v));
        out
    }

    fn build(group: &TableGroup, upper: &[usize], lower: &[usize], basis: Option<&[usize]>) -> Result<Self> {
        let n = group.order();
        let mut in_lower = vec![false; n];
        for &x in lower {
            in_lower[x] = true;
        }
        let mut coset = vec![usize::MAX; n];
        let mut members: Vec<Vec<usize>> = Vec::new();
        for &h in upper {
            if coset[h] != usize::MAX {
                continue;
            }
            let id = members.len();
            let mut elems: Vec<usize> = lower.iter().map(|&m| group.mul(h, m)).collect();
            elems.sort_unstable();
            for &e in &elems {
                coset[e] = id;
            }
            members.push(elems);
        }
        let q = members.len();
        let quotient_mul = |a: usize, b: usize| coset[group.mul(members[a][0], members[b][0])];
        let basis: Vec<usize> = match basis {
            Some(b) => {
                for &g in b {
                    if coset.get(g).copied().unwrap_or(usize::MAX) == usize::MAX {
                        return Err(Error::InvalidInput(format!("basis element {g} lies outside the layer")));
                    }
                }
                b.to_vec()
            }
            None => Self::find_basis(group, upper, &coset, &members, quotient_mul)?,
        };
        let class_orders: Vec<u64> = basis
            .iter()
            .map(|&g| {
                let c = coset[g];
                let mut x = c;
                let mut k = 1;
                while x != coset[group.identity()] {
                    x = quotient_mul(x, c);
                    k += 1;
                }
                k
            })
            .collect();
        // Enumerate Π b_j^{c_j} and require a bijection onto the quotient.
        let total: usize = class_orders.iter().map(|&o| o as usize).product();
        if total != q {
            return Err(Error::InvalidInput(format!(
                "basis of orders {class_orders:?} cannot span a quotient of order {q}"
            )));
        }
        let mut coords = vec![Vec::new(); q];
        let mut by_code = vec![usize::MAX; q];
        let mut hit = vec![false; q];
        for code in 0..total {
            let mut rest = code;
            let mut elem = group.identity();
            let mut v = Vec::with_capacity(basis.len());
            for (&b, &o) in basis.iter().zip(&class_orders) {
                let c = (rest % o as usize) as u64;
                rest /= o as usize;
                elem = group.mul(elem, group.pow(b, c));
                v.push(c);
            }
            let c = coset[elem];
            if hit[c] {
                return Err(Error::InvalidInput("layer basis is not independent".into()));
            }
            hit[c] = true;
            coords[c] = v;
            by_code[code] = c;
        }
        Ok(Layer { coset, members, basis, orders: class_orders, coords, by_code })
    }

    /// A basis of the abelian quotient from a Smith form of its relation
    /// module over `Z/e`, `e` the quotient exponent. Relations are read off
    /// a breadth-first spanning tree of the Cayley graph on a greedy
    /// generating set of classes.
    fn find_basis(
        group: &TableGroup,
        upper: &[usize],
        coset: &[usize],
        members: &[Vec<usize>],
        quotient_mul: impl Fn(usize, usize) -> usize,
    ) -> Result<Vec<usize>> {
        let q = members.len();
        let ident = coset[group.identity()];
        if q == 1 {
            return Ok(Vec::new());
        }
        // Generators of the quotient: a greedy generating set of the classes.
        let mut gens: Vec<usize> = Vec::new();
        let mut reached = vec![false; q];
        reached[ident] = true;
        for &h in upper {
            let c = coset[h];
            if reached[c] {
                continue;
            }
            gens.push(c);
            let mut list: Vec<usize> = (0..q).filter(|&x| reached[x]).collect();
            let mut i = 0;
            while i < list.len() {
                let x = list[i];
                for &s in &gens {
                    let y = quotient_mul(x, s);
                    if !reached[y] {
                        reached[y] = true;
                        list.push(y);
                    }
                }
                i += 1;
            }
        }
        let exponent = {
            let mut e = 1u64;
            for c in 0..q {
                let mut x = c;
                let mut k = 1u64;
                while x != ident {
                    x = quotient_mul(x, c);
                    k += 1;
                }
                e = e / crate::modring::gcd(e, k) * k;
            }
            e
        };
        let s = gens.len();
        // Spanning tree: word vectors for every class.
        let mut word: Vec<Option<Vec<u64>>> = vec![None; q];
        word[ident] = Some(vec![0; s]);
        let mut queue = vec![ident];
        let mut i = 0;
        while i < queue.len() {
            let x = queue[i];
            for (j, &g) in gens.iter().enumerate() {
                let y = quotient_mul(x, g);
                if word[y].is_none() {
                    let mut w = word[x].clone().expect("visited");
                    w[j] = (w[j] + 1) % exponent;
                    word[y] = Some(w);
                    queue.push(y);
                }
            }
            i += 1;
        }
        let mut relations = Vec::new();
        if exponent >= 2 {
            for x in 0..q {
                for (j, &g) in gens.iter().enumerate() {
                    let y = quotient_mul(x, g);
                    let (wx, wy) = (word[x].as_ref().expect("spanned"), word[y].as_ref().expect("spanned"));
                    let rel: Vec<u64> =
                        (0..s).map(|t| (wx[t] + u64::from(t == j) + exponent - wy[t]) % exponent).collect();
                    if rel.iter().any(|&v| v != 0) {
                        relations.push(rel);
                    }
                }
            }
        }
        let rel = ModMatrix::from_rows(exponent.max(2), s, &relations)?;
        let smith = smith_mod(&rel);
        let e = exponent.max(2);
        let mut basis = Vec::new();
        for t in 0..s {
            let d = smith.diagonal.get(t).copied().unwrap_or(0);
            let order = if d == 0 { e } else { crate::modring::gcd(d, e) };
            if order == 1 {
                continue;
            }
            // Basis class t is Σ_j Q⁻¹[t][j]·gen_j.
            let mut elem = group.identity();
            for (j, &g) in gens.iter().enumerate() {
                let c = smith.q_inv.get(t, j);
                elem = group.mul(elem, group.pow(members[g][0], c));
            }
            basis.push(elem);
        }
        Ok(basis)
    }
}

/// Mod-`n` central descending series `G^(1) ⊇ G^(2) ⊇ ...` with layer
/// quotients.
#[derive(Clone, Debug)]
pub struct CentralSeriesData {
    group: Arc<TableGroup>,
    modulus: u64,
    subgroups: Vec<Vec<usize>>,
    layers: Vec<Layer>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LayerMapResult {
    /// Coordinates of `[σ, τ]` in the second layer.
    pub commutator: Vec<u64>,
    /// Coordinates of `σ^π` in the second layer.
    pub power: Vec<u64>,
    /// First-preimage lifts used.
    pub first_lifts: (usize, usize),
    /// Seeded random lifts used for the cross-check.
    pub random_lifts: (usize, usize),
    pub seed: u64,
    pub lift_independent: bool,
}

/// `G^(i+1) = [G, G^(i)]·(G^(i))^n` for `i = 1..=depth`.
pub fn central_series(group: &Arc<TableGroup>, n: u64, depth: usize) -> Result<CentralSeriesData> {
    CentralSeriesData::new(group, n, depth, None)
}

/// Lifts `σ, τ ∈ 𝔤₁` to the group (first preimage in table order and a
/// seeded random preimage) and returns `[σ, τ]` and `σ^π` in `𝔤₂`.
pub fn layer_maps(cs: &CentralSeriesData, sigma: &[u64], tau: &[u64], seed: u64) -> Result<LayerMapResult> {
    cs.layer_maps(sigma, tau, seed)
}

impl CentralSeriesData {
    /// Builds the series; `g1_basis` optionally fixes the basis of `𝔤₁`
    /// (group elements whose classes are the basis).
    pub fn new(group: &Arc<TableGroup>, n: u64, depth: usize, g1_basis: Option<&[usize]>) -> Result<Self> {
        Self::with_bases(group, n, depth, &[g1_basis])
    }

    /// Like [`CentralSeriesData::new`] with an optional basis per layer.
    pub fn with_bases(group: &Arc<TableGroup>, n: u64, depth: usize, bases: &[Option<&[usize]>]) -> Result<Self> {
        if depth < 2 {
            return Err(Error::InvalidInput(format!("series depth must be at least 2, got {depth}")));
        }
        crate::modring::check_modulus(n)?;
        let g = group.as_ref();
        let mut subgroups: Vec<Vec<usize>> = vec![(0..g.order()).collect()];
        for _ in 0..depth {
            let current = subgroups.last().expect("nonempty");
            let mut gens: Vec<usize> = Vec::new();
            let mut seen = vec![false; g.order()];
            for &a in current {
                for x in (0..g.order()).map(|b| g.commutator(b, a)).chain(std::iter::once(g.pow(a, n))) {
                    if !seen[x] {
                        seen[x] = true;
                        gens.push(x);
                    }
                }
            }
            let next = g.closure(&gens);
            if !g.is_normal(&next) {
                return Err(Error::InvalidGroup("series term is not normal".into()));
            }
            subgroups.push(next);
        }
        let mut layers = Vec::with_capacity(depth);
        for i in 0..depth {
            let basis = bases.get(i).copied().flatten();
            layers.push(Layer::build(g, &subgroups[i], &subgroups[i + 1], basis)?);
        }
        Ok(CentralSeriesData { group: Arc::clone(group), modulus: n, subgroups, layers })
    }

    pub fn group(&self) -> &Arc<TableGroup> {
        &self.group
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// `|G^(1)|, |G^(2)|, ...`
    pub fn sizes(&self) -> Vec<usize> {
        self.subgroups.iter().map(Vec::len).collect()
    }

    /// `G^(i)` for `i >= 1`, sorted.
    pub fn subgroup(&self, i: usize) -> &[usize] {
        &self.subgroups[i - 1]
    }

    /// The quotient `G^(i)/G^(i+1)` for `i >= 1`; `layer(1)` is `𝔤₁`.
    pub fn layer(&self, i: usize) -> &Layer {
        &self.layers[i - 1]
    }

    pub fn g1(&self) -> &Layer {
        &self.layers[0]
    }

    pub fn g2(&self) -> &Layer {
        &self.layers[1]
    }

    /// Whether `𝔤₁ ≅ (Z/n)^k` in the chosen basis.
    pub fn g1_is_elementary(&self) -> bool {
        self.g1().orders.iter().all(|&o| o == self.modulus)
    }

    pub fn layer_maps(&self, sigma: &[u64], tau: &[u64], seed: u64) -> Result<LayerMapResult> {
        let g = self.group.as_ref();
        let g1 = self.g1();
        let g2 = self.g2();
        let s_pre = g1.preimages(sigma)?;
        let t_pre = g1.preimages(tau)?;
        let eval = |s: usize, t: usize| -> (Vec<u64>, Vec<u64>) {
            let c = g.commutator(s, t);
            let p = g.pow(s, self.modulus);
            let cc = g2.coords_of(c).expect("commutators of lifts lie in the second term").to_vec();
            let pc = g2.coords_of(p).expect("n-th powers lie in the second term").to_vec();
            (cc, pc)
        };
        let first = (s_pre[0], t_pre[0]);
        let (commutator, power) = eval(first.0, first.1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let random = (s_pre[rng.gen_range(0..s_pre.len())], t_pre[rng.gen_range(0..t_pre.len())]);
        let (c2, p2) = eval(random.0, random.1);
        let lift_independent = c2 == commutator && p2 == power;
        Ok(LayerMapResult { commutator, power, first_lifts: first, random_lifts: random, seed, lift_independent })
    }

    /// Coordinates in `𝔤₁` of every group element.
    pub fn projection(&self) -> Vec<Vec<u64>> {
        (0..self.group.order()).map(|g| self.g1().coords_of(g).expect("every element lies in G^(1)").to_vec()).collect()
    }
}
