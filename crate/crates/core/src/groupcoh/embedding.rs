use std::sync::Arc;

use super::{solve_coboundary, Coboundary, Cocycle2, TableGroup};
use crate::error::{Error, Result};

/// A central extension `1 → A → H̃ → H → 1` with `A` cyclic, generated by
/// `kernel_generator`.
#[derive(Clone, Debug)]
pub struct CentralExtension {
    cover: Arc<TableGroup>,
    base: Arc<TableGroup>,
    projection: Vec<usize>,
    kernel_generator: usize,
    kernel_order: u64,
    /// `log[x]` for `x ∈ A`, `u64::MAX` elsewhere.
    log: Vec<u64>,
}

impl CentralExtension {
    pub fn new(
        cover: &Arc<TableGroup>,
        base: &Arc<TableGroup>,
        projection: Vec<usize>,
        kernel_generator: usize,
    ) -> Result<Self> {
        if !cover.is_hom_into(base, &projection) {
            return Err(Error::NotHomomorphism("extension projection".into()));
        }
        let mut hit = vec![false; base.order()];
        for &y in &projection {
            hit[y] = true;
        }
        if hit.iter().any(|&h| !h) {
            return Err(Error::InvalidInput("extension projection is not surjective".into()));
        }
        let kernel: Vec<usize> = (0..cover.order()).filter(|&x| projection[x] == base.identity()).collect();
        if kernel_generator >= cover.order() || projection[kernel_generator] != base.identity() {
            return Err(Error::InvalidInput("kernel generator is not in the kernel".into()));
        }
        let mut log = vec![u64::MAX; cover.order()];
        let mut x = cover.identity();
        let mut e = 0u64;
        loop {
            log[x] = e;
            x = cover.mul(x, kernel_generator);
            e += 1;
            if x == cover.identity() {
                break;
            }
        }
        if e as usize != kernel.len() {
            return Err(Error::Unsupported("extension kernel is not cyclic on the given generator".into()));
        }
        if e < 2 {
            return Err(Error::InvalidInput("extension kernel is trivial".into()));
        }
        for &a in &kernel {
            if (0..cover.order()).any(|g| cover.mul(a, g) != cover.mul(g, a)) {
                return Err(Error::NonCentral(format!("kernel element {a} is not central")));
            }
        }
        Ok(CentralExtension {
            cover: Arc::clone(cover),
            base: Arc::clone(base),
            projection,
            kernel_generator,
            kernel_order: e,
            log,
        })
    }

    pub fn cover(&self) -> &Arc<TableGroup> {
        &self.cover
    }

    pub fn base(&self) -> &Arc<TableGroup> {
        &self.base
    }

    pub fn kernel_order(&self) -> u64 {
        self.kernel_order
    }

    /// Section `s` with `s(1) = 1`, first preimage in table order otherwise.
    pub fn section(&self) -> Vec<usize> {
        let mut s = vec![usize::MAX; self.base.order()];
        for (x, &y) in self.projection.iter().enumerate() {
            if s[y] == usize::MAX {
                s[y] = x;
            }
        }
        s[self.base.identity()] = self.cover.identity();
        s
    }

    /// `ξ(h1, h2) = log_a(s(h1)·s(h2)·s(h1h2)⁻¹)`.
    pub fn cocycle(&self) -> Result<Cocycle2> {
        let s = self.section();
        let (c, b) = (&self.cover, &self.base);
        Cocycle2::from_fn(b, self.kernel_order, |x, y| self.log[c.mul(c.mul(s[x], s[y]), c.inv(s[b.mul(x, y)]))])
    }
}

/// Whether `φ : G → H` lifts through `H̃ → H`; on success the returned
/// lift has been checked to be a homomorphism covering `φ`.
pub fn embedding_solvable(
    group: &Arc<TableGroup>,
    ext: &CentralExtension,
    hom: &[usize],
) -> Result<Option<Vec<usize>>> {
    if !group.is_hom_into(&ext.base, hom) {
        return Err(Error::NotHomomorphism("map to the extension base".into()));
    }
    let xi = Arc::new(ext.cocycle()?);
    let pulled = xi.inflate(group, hom.to_vec())?;
    let u = match solve_coboundary(group, &pulled)? {
        Coboundary::Trivial(u) => u,
        Coboundary::NonTrivial => return Ok(None),
    };
    let s = ext.section();
    let c = &ext.cover;
    let m = ext.kernel_order;
    let lift: Vec<usize> =
        (0..group.order()).map(|g| c.mul(s[hom[g]], c.pow(ext.kernel_generator, (m - u[g] % m) % m))).collect();
    if !group.is_hom_into(c, &lift) || (0..group.order()).any(|g| ext.projection[lift[g]] != hom[g]) {
        return Err(Error::TheoremViolation("constructed lift is not a homomorphism covering φ".into()));
    }
    Ok(Some(lift))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(m: usize) -> Arc<TableGroup> {
        Arc::new(TableGroup::cyclic(m).unwrap())
    }

    #[test]
    fn z4_over_z2() {
        let ext = CentralExtension::new(&z(4), &z(2), vec![0, 1, 0, 1], 2).unwrap();
        let lift = embedding_solvable(&z(4), &ext, &[0, 1, 0, 1]).unwrap().unwrap();
        assert!(z(4).is_hom_into(&z(4), &lift));
        assert_eq!(embedding_solvable(&z(2), &ext, &[0, 1]).unwrap(), None);
    }

    #[test]
    fn split_extension_always_lifts() {
        let v = Arc::new(TableGroup::elementary(2, 2).unwrap());
        // (Z/2)² → Z/2 on the first factor, kernel generated by index 2.
        let ext = CentralExtension::new(&v, &z(2), vec![0, 1, 0, 1], 2).unwrap();
        for g in [z(2), z(4), z(6)] {
            let hom: Vec<usize> = (0..g.order()).map(|x| x % 2).collect();
            assert!(embedding_solvable(&g, &ext, &hom).unwrap().is_some());
        }
    }

    #[test]
    fn non_central_kernel_rejected() {
        // D3 → Z/2 has kernel Z/3, which is not central.
        let d3 = Arc::new(TableGroup::dihedral(3).unwrap());
        let proj: Vec<usize> = (0..6).map(|x| x / 3).collect();
        assert!(matches!(CentralExtension::new(&d3, &z(2), proj, 1), Err(Error::NonCentral(_))));
    }
}
