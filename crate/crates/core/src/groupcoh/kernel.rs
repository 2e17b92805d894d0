use std::collections::HashSet;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::cocycle::{coboundary_relations, elementary_index, pair, term_cocycle, Coboundary, CocycleTerm};
use super::h2::{pairing, special_elements, H2Class, SElement};
use super::{central_series, solve_coboundary, CentralSeriesData, TableGroup};
use crate::error::{Error, Result};
use crate::modring::{binom2, SubgroupZnk};

fn unit(k: usize, i: usize) -> Vec<u64> {
    (0..k).map(|j| u64::from(i == j)).collect()
}

/// Terms of the normal-form basis of `H²((Z/n)^k)`, in vector order.
fn basis_terms(k: usize) -> Vec<CocycleTerm> {
    let mut out = Vec::new();
    for a in 0..k {
        for b in a + 1..k {
            out.push(CocycleTerm::U { x: unit(k, a), y: unit(k, b) });
        }
    }
    for j in 0..k {
        out.push(CocycleTerm::B { z: unit(k, j) });
    }
    out
}

fn require_elementary(cs: &CentralSeriesData) -> Result<()> {
    if cs.g1_is_elementary() {
        Ok(())
    } else {
        Err(Error::NotElementary(cs.modulus()))
    }
}

/// Generators (Howell-canonical) of `ker(H²(𝔤₁) → H²(G))`, with `𝔤₁`
/// identified with `(Z/n)^k` through the layer basis.
pub fn kernel_of_inflation(cs: &CentralSeriesData) -> Result<Vec<H2Class>> {
    require_elementary(cs)?;
    let n = cs.modulus();
    let k = cs.g1().rank();
    let m = H2Class::dimension(k);
    if m == 0 {
        return Ok(Vec::new());
    }
    let coords = cs.projection();
    let terms = basis_terms(k);
    let xi = |a: usize, b: usize| -> Vec<u64> { terms.iter().map(|t| t.value(&coords[a], &coords[b], n)).collect() };
    coboundary_relations(cs.group(), n, m, &xi).iter().map(|v| H2Class::from_vector(k, n, v)).collect()
}

/// Checks for one kernel generator.
#[derive(Clone, Debug, Default, Serialize)]
pub struct GeneratorReport {
    /// Normal-form vector of the class.
    pub class: Vec<u64>,
    /// `u(1) = 0`
    pub normalized: bool,
    /// Pairs in `G^(2)` where `u` is not additive.
    pub additive_failures: u64,
    /// `u(g a g⁻¹) ≠ u(a)` for `a ∈ G^(2)`.
    pub conjugation_failures: u64,
    /// `u ≠ 0` on `G^(3)`.
    pub third_term_failures: u64,
    /// `−u([g,h]) ≠ Σ σ(x_i)τ(y_i) − σ(y_i)τ(x_i)` over all `g, h ∈ G`.
    pub commutator_failures: u64,
    /// `−u(g^n) ≠ C(n,2)·Σ σ(x_i)σ(y_i) + Σ σ(z_j)` over all `g ∈ G`.
    pub power_failures: u64,
    /// Same two checks for a second decomposition of the class that adds
    /// `x_1∪x_1 − C(n,2)·βx_1`.
    pub alt_commutator_failures: u64,
    pub alt_power_failures: u64,
}

impl GeneratorReport {
    pub fn failures(&self) -> u64 {
        u64::from(!self.normalized)
            + self.additive_failures
            + self.conjugation_failures
            + self.third_term_failures
            + self.commutator_failures
            + self.power_failures
            + self.alt_commutator_failures
            + self.alt_power_failures
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct LayerIsoReport {
    pub group_order: usize,
    pub modulus: u64,
    pub series_sizes: Vec<usize>,
    pub g1_rank: usize,
    pub g2_orders: Vec<u64>,
    pub kernel: Vec<Vec<u64>>,
    pub generators: Vec<GeneratorReport>,
    pub g2_size: usize,
    pub image_size: usize,
    /// Order of the image of the restriction of the dual space `S` to functions on the kernel generators.
    pub s_r_size: u128,
    pub well_defined: bool,
    pub homomorphism: bool,
    pub injective: bool,
    pub image_in_s_r: bool,
    pub surjective: bool,
    /// Pairs `(σ, τ)` where the layer map on `[σ,τ]` or `σ^π` disagrees with the
    /// restricted special elements.
    pub formula_failures: u64,
    /// Pairs where two lifts gave different layer maps.
    pub lift_failures: u64,
    pub seed: u64,
    pub first_counterexample: Option<String>,
}

impl LayerIsoReport {
    pub fn passed(&self) -> bool {
        self.generators.iter().all(|g| g.failures() == 0)
            && self.well_defined
            && self.homomorphism
            && self.injective
            && self.image_in_s_r
            && self.surjective
            && self.formula_failures == 0
            && self.lift_failures == 0
    }
}

/// Runs the full check on `G` with the automatically chosen layer bases.
pub fn verify_layer_isomorphism(group: &Arc<TableGroup>, n: u64, seed: u64) -> Result<LayerIsoReport> {
    let cs = central_series(group, n, 2)?;
    verify_layer_isomorphism_on(&cs, seed)
}

fn sub(a: u64, b: u64, n: u64) -> u64 {
    (a + n - b % n) % n
}

/// Expected `−u([g,h])` and `−u(g^n)` for a decomposition.
fn expected_commutator(terms: &[(u64, CocycleTerm)], s: &[u64], t: &[u64], n: u64) -> u64 {
    terms.iter().fold(0, |acc, (c, term)| match term {
        CocycleTerm::U { x, y } => {
            let v = sub(pair(s, x, n) * pair(t, y, n) % n, pair(s, y, n) * pair(t, x, n) % n, n);
            (acc + c * v) % n
        }
        CocycleTerm::B { .. } => acc,
    })
}

fn expected_power(terms: &[(u64, CocycleTerm)], s: &[u64], n: u64, c2: u64) -> u64 {
    terms.iter().fold(0, |acc, (c, term)| match term {
        CocycleTerm::U { x, y } => (acc + c * (c2 * (pair(s, x, n) * pair(s, y, n) % n) % n)) % n,
        CocycleTerm::B { z } => (acc + c * pair(s, z, n)) % n,
    })
}

struct Solved {
    u: Vec<u64>,
}

fn solve_terms(cs: &CentralSeriesData, terms: &[(u64, CocycleTerm)]) -> Result<Solved> {
    let n = cs.modulus();
    let k = cs.g1().rank();
    let g = cs.group();
    let quotient = Arc::new(TableGroup::elementary(k, n as usize)?);
    let base = Arc::new(term_cocycle(&quotient, k, n, terms)?);
    let proj: Vec<usize> = cs.projection().iter().map(|c| elementary_index(c, n)).collect();
    let xi = base.inflate(g, proj)?;
    match solve_coboundary(g, &xi)? {
        Coboundary::Trivial(u) => Ok(Solved { u }),
        Coboundary::NonTrivial => Err(Error::TheoremViolation("kernel class does not inflate to a coboundary".into())),
    }
}

/// Counts pairing-identity failures of `u` for the given decomposition.
fn formula_failures(cs: &CentralSeriesData, u: &[u64], terms: &[(u64, CocycleTerm)]) -> Result<(u64, u64)> {
    let n = cs.modulus();
    let g = cs.group();
    let c2 = binom2(n)?.value();
    let coords = cs.projection();
    let comm = (0..g.order())
        .into_par_iter()
        .map(|a| {
            (0..g.order())
                .filter(|&b| {
                    let lhs = sub(0, u[g.commutator(a, b)], n);
                    lhs != expected_commutator(terms, &coords[a], &coords[b], n)
                })
                .count() as u64
        })
        .sum();
    let pow = (0..g.order()).filter(|&a| sub(0, u[g.pow(a, n)], n) != expected_power(terms, &coords[a], n, c2)).count()
        as u64;
    Ok((comm, pow))
}

fn check_generator(cs: &CentralSeriesData, class: &H2Class) -> Result<(GeneratorReport, Vec<u64>)> {
    let n = cs.modulus();
    let g = cs.group();
    let k = class.rank();
    let terms = class.terms();
    let Solved { u } = solve_terms(cs, &terms)?;
    let mut rep = GeneratorReport { class: class.to_vector(), normalized: u[g.identity()] == 0, ..Default::default() };
    let g2 = cs.subgroup(2);
    let g3 = cs.subgroup(3);
    rep.additive_failures =
        g2.par_iter().map(|&a| g2.iter().filter(|&&b| u[g.mul(a, b)] != (u[a] + u[b]) % n).count() as u64).sum();
    rep.conjugation_failures = g2
        .par_iter()
        .map(|&a| (0..g.order()).filter(|&x| u[g.mul(g.mul(x, a), g.inv(x))] != u[a]).count() as u64)
        .sum();
    rep.third_term_failures = g3.iter().filter(|&&a| u[a] != 0).count() as u64;
    (rep.commutator_failures, rep.power_failures) = formula_failures(cs, &u, &terms)?;
    if k > 0 {
        let c2 = binom2(n)?.value();
        let mut alt = terms.clone();
        alt.push((1, CocycleTerm::U { x: unit(k, 0), y: unit(k, 0) }));
        alt.push((1, CocycleTerm::B { z: unit(k, 0).iter().map(|&v| (n - c2 * v % n) % n).collect() }));
        debug_assert_eq!(H2Class::from_terms(k, n, &alt)?, *class);
        let Solved { u: u_alt } = solve_terms(cs, &alt)?;
        (rep.alt_commutator_failures, rep.alt_power_failures) = formula_failures(cs, &u_alt, &alt)?;
    }
    Ok((rep, u))
}

/// Solves for every kernel generator, checks the commutator and power
/// formulas, and verifies that `δ ↦ (η ↦ −u_η(δ̃))` is an isomorphism of
/// `𝔤₂` onto the restriction of `S` to the kernel generators.
pub fn verify_layer_isomorphism_on(cs: &CentralSeriesData, seed: u64) -> Result<LayerIsoReport> {
    require_elementary(cs)?;
    let n = cs.modulus();
    let g = cs.group();
    let k = cs.g1().rank();
    let kernel = kernel_of_inflation(cs)?;
    let mut report = LayerIsoReport {
        group_order: g.order(),
        modulus: n,
        series_sizes: cs.sizes(),
        g1_rank: k,
        g2_orders: cs.g2().orders().to_vec(),
        kernel: kernel.iter().map(H2Class::to_vector).collect(),
        g2_size: cs.g2().size(),
        seed,
        ..Default::default()
    };
    let mut cochains = Vec::with_capacity(kernel.len());
    for class in &kernel {
        let (rep, u) = check_generator(cs, class)?;
        if rep.failures() > 0 && report.first_counterexample.is_none() {
            report.first_counterexample = Some(format!("formula failures for class {:?}", rep.class));
        }
        report.generators.push(rep);
        cochains.push(u);
    }
    let r = kernel.len();
    let res_r = |s: &SElement| -> Result<Vec<u64>> { kernel.iter().map(|c| Ok(pairing(s, c)?.value())).collect() };

    // layer map on 𝔤₂, evaluated on every lift.
    let g2 = cs.g2();
    let classes = g2.all_coords();
    let mut omega: Vec<Vec<u64>> = Vec::with_capacity(classes.len());
    report.well_defined = true;
    for d in &classes {
        let lifts = g2.preimages(d)?;
        let value: Vec<u64> = cochains.iter().map(|u| sub(0, u[lifts[0]], n)).collect();
        if lifts.iter().any(|&l| cochains.iter().zip(&value).any(|(u, &v)| sub(0, u[l], n) != v)) {
            report.well_defined = false;
        }
        omega.push(value);
    }
    let index_of = |c: &[u64]| classes.iter().position(|x| x == c).expect("class coordinates");
    report.homomorphism = (0..classes.len()).all(|i| {
        (0..classes.len()).all(|j| {
            let sum: Vec<u64> =
                classes[i].iter().zip(&classes[j]).zip(g2.orders()).map(|((a, b), o)| (a + b) % o).collect();
            let lhs = &omega[index_of(&sum)];
            lhs.iter().zip(&omega[i]).zip(&omega[j]).all(|((l, a), b)| *l == (a + b) % n)
        })
    });
    let distinct: HashSet<&Vec<u64>> = omega.iter().collect();
    report.image_size = distinct.len();
    report.injective = report.image_size == classes.len();

    let basis_images: Vec<Vec<u64>> = SElement::basis(k, n)?.iter().map(&res_r).collect::<Result<_>>()?;
    if r == 0 {
        report.s_r_size = 1;
        report.image_in_s_r = true;
    } else {
        let s_r = SubgroupZnk::from_rows(n, r, &basis_images)?;
        report.s_r_size = s_r.order().unwrap_or(u128::MAX);
        report.image_in_s_r = omega.iter().all(|v| s_r.contains(v));
    }
    report.surjective = report.image_in_s_r && report.image_size as u128 == report.s_r_size;

    // layer map on [σ,τ] and σ^π against the special elements.
    let g1_classes = cs.g1().all_coords();
    let mut formula = 0u64;
    let mut lift = 0u64;
    for s in &g1_classes {
        for t in &g1_classes {
            let lm = cs.layer_maps(s, t, seed)?;
            if !lm.lift_independent {
                lift += 1;
            }
            let (comm, pow) = special_elements(s, t, n)?;
            let ok = omega[index_of(&lm.commutator)] == res_r(&comm)? && omega[index_of(&lm.power)] == res_r(&pow)?;
            if !ok {
                formula += 1;
                if report.first_counterexample.is_none() {
                    report.first_counterexample = Some(format!("layer formula fails at σ={s:?}, τ={t:?}"));
                }
            }
        }
    }
    report.formula_failures = formula;
    report.lift_failures = lift;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn heis(n: usize) -> Arc<TableGroup> {
        Arc::new(
            TableGroup::from_fn(n * n * n, |x, y| {
                let (a, b, c) = (x / (n * n), (x / n) % n, x % n);
                let (a2, b2, c2) = (y / (n * n), (y / n) % n, y % n);
                (((a + a2) % n) * n + (b + b2) % n) * n + (c + c2 + a * b2) % n
            })
            .unwrap(),
        )
    }

    fn heis_series(n: usize) -> CentralSeriesData {
        let g = heis(n);
        let idx = |a: usize, b: usize, c: usize| (a * n + b) * n + c;
        CentralSeriesData::with_bases(&g, n as u64, 2, &[Some(&[idx(1, 0, 0), idx(0, 1, 0)]), Some(&[idx(0, 0, 1)])])
            .unwrap()
    }

    #[test]
    fn kernel_examples() {
        let k = kernel_of_inflation(&heis_series(2)).unwrap();
        assert_eq!(k, vec![H2Class::cup_basis(2, 2, 0, 1).unwrap()]);
        let k3 = kernel_of_inflation(&heis_series(3)).unwrap();
        assert_eq!(k3, vec![H2Class::cup_basis(2, 3, 0, 1).unwrap()]);

        let v = Arc::new(TableGroup::elementary(2, 3).unwrap());
        assert!(kernel_of_inflation(&central_series(&v, 3, 2).unwrap()).unwrap().is_empty());

        for n in [2u64, 3, 5] {
            let z = Arc::new(TableGroup::cyclic((n * n) as usize).unwrap());
            let k = kernel_of_inflation(&central_series(&z, n, 2).unwrap()).unwrap();
            assert_eq!(k, vec![H2Class::bock_basis(1, n, 0).unwrap()], "n={n}");
        }
    }

    #[test]
    fn omega_on_small_groups() {
        let rep = verify_layer_isomorphism_on(&heis_series(2), 3).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert_eq!(rep.g2_size, 2);

        let z4 = Arc::new(TableGroup::cyclic(4).unwrap());
        let rep = verify_layer_isomorphism(&z4, 2, 0).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert_eq!(rep.s_r_size, 2);

        let v = Arc::new(TableGroup::elementary(2, 2).unwrap());
        let rep = verify_layer_isomorphism(&v, 2, 0).unwrap();
        assert!(rep.passed());
        assert!(rep.kernel.is_empty());
        assert_eq!(rep.g2_size, 1);
    }

    #[test]
    fn non_elementary_layer_rejected() {
        let g = Arc::new(
            TableGroup::direct_product(&TableGroup::cyclic(2).unwrap(), &TableGroup::cyclic(4).unwrap()).unwrap(),
        );
        assert!(matches!(verify_layer_isomorphism(&g, 4, 0), Err(Error::NotElementary(4))));
    }
}
