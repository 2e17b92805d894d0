//! Function tables on `K ∖ {0,1}` attached to Kummer characters over a
//! finite field, the subgroup they generate, and relation detection.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use rayon::prelude::*;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::finfield::{restrict_character, Embedding, FqField, KummerCharacter, RootOfUnity};
use crate::groupcoh::{CocycleTerm, H2Class};
use crate::modring::{binom2, mul_mod, structure, AbelianStructure, SubgroupZnk};

mod relations;

pub use relations::{relation_check, RelationContext, RelationReport, Witness};

/// A function `K ∖ {0,1} → Λ²`, one pair per point of
/// [`FqField::points`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FnTable {
    n: u64,
    values: Vec<(u64, u64)>,
}

impl Serialize for FnTable {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.values.len()))?;
        for (a, b) in &self.values {
            seq.serialize_element(&[a, b])?;
        }
        seq.end()
    }
}

impl FnTable {
    pub fn zero(field: &FqField) -> Self {
        FnTable { n: field.n(), values: vec![(0, 0); field.order() as usize - 2] }
    }

    pub fn from_values(n: u64, values: Vec<(u64, u64)>) -> Self {
        FnTable { n, values: values.into_iter().map(|(a, b)| (a % n, b % n)).collect() }
    }

    pub fn modulus(&self) -> u64 {
        self.n
    }

    pub fn values(&self) -> &[(u64, u64)] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&(a, b)| a == 0 && b == 0)
    }

    /// `[a_0, b_0, a_1, b_1, ...]`
    pub fn flatten(&self) -> Vec<u64> {
        self.values.iter().flat_map(|&(a, b)| [a, b]).collect()
    }

    fn check(&self, other: &FnTable) -> Result<()> {
        if self.n != other.n {
            return Err(Error::ModulusMismatch(self.n, other.n));
        }
        if self.values.len() != other.values.len() {
            return Err(Error::DimensionMismatch { expected: self.values.len(), got: other.values.len() });
        }
        Ok(())
    }

    pub fn add(&self, other: &FnTable) -> Result<FnTable> {
        self.check(other)?;
        let n = self.n;
        let values =
            self.values.iter().zip(&other.values).map(|(&(a, b), &(c, d))| ((a + c) % n, (b + d) % n)).collect();
        Ok(FnTable { n, values })
    }

    /// Multiplies by a signed integer.
    pub fn scale(&self, c: i64) -> FnTable {
        let n = self.n;
        let c = c.rem_euclid(n as i64) as u64;
        FnTable { n, values: self.values.iter().map(|&(a, b)| (mul_mod(a, c, n), mul_mod(b, c, n))).collect() }
    }

    pub fn sub(&self, other: &FnTable) -> Result<FnTable> {
        self.add(&other.scale(-1))
    }
}

fn check_context(f: &KummerCharacter, omega: &RootOfUnity) -> Result<()> {
    if f.field() != omega.field() {
        return Err(Error::FieldMismatch);
    }
    if omega.order() != f.modulus() {
        return Err(Error::ModulusMismatch(f.modulus(), omega.order()));
    }
    Ok(())
}

/// Dlog of every point and of `1 − x`, reduced mod `n`.
struct PointLogs {
    x: Vec<u64>,
    one_minus: Vec<u64>,
    omega: u64,
}

impl PointLogs {
    fn new(field: &FqField, omega: &RootOfUnity) -> Result<Self> {
        let n = field.n();
        let pts = field.points();
        let x = pts.iter().map(|&p| Ok(field.dlog(p)? % n)).collect::<Result<_>>()?;
        let one_minus = pts.iter().map(|&p| Ok(field.dlog(field.one_minus(p))? % n)).collect::<Result<_>>()?;
        Ok(PointLogs { x, one_minus, omega: field.dlog(omega.element())? % n })
    }
}

fn commutator_table_from_logs(f: u64, g: u64, logs: &PointLogs, n: u64) -> FnTable {
    // f(x) = f·dlog(x), so both components factor through the logs.
    let (fw, gw) = (mul_mod(f, logs.omega, n), mul_mod(g, logs.omega, n));
    let values = logs
        .x
        .iter()
        .zip(&logs.one_minus)
        .map(|(&lx, &ly)| {
            let (fx, fy, gx, gy) = (mul_mod(f, lx, n), mul_mod(f, ly, n), mul_mod(g, lx, n), mul_mod(g, ly, n));
            ((mul_mod(fx, gy, n) + n - mul_mod(fy, gx, n)) % n, (mul_mod(fx, gw, n) + n - mul_mod(fw, gx, n)) % n)
        })
        .collect();
    FnTable { n, values }
}

fn power_table_from_logs(f: u64, logs: &PointLogs, n: u64, c: u64) -> FnTable {
    let fw = mul_mod(f, logs.omega, n);
    let values = logs
        .x
        .iter()
        .zip(&logs.one_minus)
        .map(|(&lx, &ly)| {
            let (fx, fy) = (mul_mod(f, lx, n), mul_mod(f, ly, n));
            (mul_mod(c, mul_mod(fx, fy, n), n), (mul_mod(c, mul_mod(fx, fw, n), n) + fx) % n)
        })
        .collect();
    FnTable { n, values }
}

/// `comm(f,g)(x) = (f(x)g(1−x) − f(1−x)g(x), f(x)g(ω) − f(ω)g(x))`
pub fn commutator_table(f: &KummerCharacter, g: &KummerCharacter, omega: &RootOfUnity) -> Result<FnTable> {
    check_context(f, omega)?;
    check_context(g, omega)?;
    let field = f.field();
    let n = field.n();
    let w = omega.element();
    let values = field
        .points()
        .into_iter()
        .map(|x| {
            let y = field.one_minus(x);
            let (fx, fy, fw) = (f.eval(x)?.value(), f.eval(y)?.value(), f.eval(w)?.value());
            let (gx, gy, gw) = (g.eval(x)?.value(), g.eval(y)?.value(), g.eval(w)?.value());
            Ok(((mul_mod(fx, gy, n) + n - mul_mod(fy, gx, n)) % n, (mul_mod(fx, gw, n) + n - mul_mod(fw, gx, n)) % n))
        })
        .collect::<Result<_>>()?;
    Ok(FnTable { n, values })
}

/// `pow(f)(x) = (C(n,2)·f(x)f(1−x), C(n,2)·f(x)f(ω) + f(x))`
pub fn power_table(f: &KummerCharacter, omega: &RootOfUnity) -> Result<FnTable> {
    check_context(f, omega)?;
    let field = f.field();
    let n = field.n();
    let c = binom2(n)?.value();
    let fw = f.eval(omega.element())?.value();
    let values = field
        .points()
        .into_iter()
        .map(|x| {
            let (fx, fy) = (f.eval(x)?.value(), f.eval(field.one_minus(x))?.value());
            Ok((mul_mod(c, mul_mod(fx, fy, n), n), (mul_mod(c, mul_mod(fx, fw, n), n) + fx) % n))
        })
        .collect::<Result<_>>()?;
    Ok(FnTable { n, values })
}

/// The subgroup of `Fun(K ∖ {0,1}, Λ²)` generated by all commutator tables
/// `comm(f,g)` and power tables `pow(f)`.
#[derive(Clone, Debug)]
pub struct FunctionGroup {
    field: Arc<FqField>,
    omega: RootOfUnity,
    /// Distinct generator tables with the label of their first occurrence.
    generators: Vec<(String, FnTable)>,
    subgroup: SubgroupZnk,
    structure: AbelianStructure,
}

#[derive(Clone, Debug, Serialize)]
pub struct FunctionGroupJson {
    pub p: u64,
    pub k: u32,
    pub n: u64,
    pub omega: u64,
    pub generators: Vec<FnTable>,
    pub labels: Vec<String>,
    pub invariant_factors: Vec<u64>,
}

impl FunctionGroup {
    pub fn field(&self) -> &Arc<FqField> {
        &self.field
    }

    pub fn omega(&self) -> &RootOfUnity {
        &self.omega
    }

    pub fn generators(&self) -> &[(String, FnTable)] {
        &self.generators
    }

    pub fn subgroup(&self) -> &SubgroupZnk {
        &self.subgroup
    }

    pub fn structure(&self) -> &AbelianStructure {
        &self.structure
    }

    pub fn contains(&self, t: &FnTable) -> bool {
        t.len() * 2 == self.subgroup.ambient_rank() && self.subgroup.contains(&t.flatten())
    }

    pub fn to_json(&self) -> FunctionGroupJson {
        FunctionGroupJson {
            p: self.field.characteristic(),
            k: self.field.degree(),
            n: self.field.n(),
            omega: self.omega.element(),
            generators: self.generators.iter().map(|(_, t)| t.clone()).collect(),
            labels: self.generators.iter().map(|(l, _)| l.clone()).collect(),
            invariant_factors: self.structure.invariant_factors.clone(),
        }
    }
}

/// Span of a list of tables inside `(Z/n)^{2(q−2)}`.
pub(crate) fn span(n: u64, points: usize, tables: &[&FnTable]) -> Result<SubgroupZnk> {
    let rows: Vec<Vec<u64>> = tables.iter().map(|t| t.flatten()).collect();
    SubgroupZnk::from_rows(n, 2 * points, &rows)
}

/// Generates the table group from all `n²` tables `comm(f_a, f_b)` and
/// `n` tables `pow(f_a)`; identical tables are kept once.
pub fn generate_function_group(field: &Arc<FqField>, omega: &RootOfUnity) -> Result<FunctionGroup> {
    let n = field.n();
    if omega.field() != field || omega.order() != n {
        return Err(Error::IncompatibleOmega("ω does not belong to this field and modulus".into()));
    }
    if field.order() < 3 {
        return Err(Error::InvalidInput("field has no points outside {0, 1}".into()));
    }
    let logs = PointLogs::new(field, omega)?;
    let c = binom2(n)?.value();
    let mut candidates: Vec<(String, FnTable)> = (0..n * n)
        .into_par_iter()
        .map(|i| (format!("comm({},{})", i / n, i % n), commutator_table_from_logs(i / n, i % n, &logs, n)))
        .collect();
    candidates.extend((0..n).map(|a| (format!("pow({a})"), power_table_from_logs(a, &logs, n, c))));
    let mut seen = HashSet::new();
    let generators: Vec<(String, FnTable)> =
        candidates.into_iter().filter(|(_, t)| !t.is_zero() && seen.insert(t.clone())).collect();
    let points = field.order() as usize - 2;
    let subgroup = span(n, points, &generators.iter().map(|(_, t)| t).collect::<Vec<_>>())?;
    let structure = structure(&subgroup)?;
    Ok(FunctionGroup { field: Arc::clone(field), omega: omega.clone(), generators, subgroup, structure })
}

/// A term of a formal word in `[σ,τ]` and `σ^π`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WordTerm {
    Comm(KummerCharacter, KummerCharacter),
    Pow(KummerCharacter),
}

/// `Σ c_i · term_i` with integer coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FormalWord {
    terms: Vec<(i64, WordTerm)>,
}

impl FormalWord {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn comm(mut self, c: i64, s: &KummerCharacter, t: &KummerCharacter) -> Self {
        self.terms.push((c, WordTerm::Comm(s.clone(), t.clone())));
        self
    }

    pub fn pow(mut self, c: i64, s: &KummerCharacter) -> Self {
        self.terms.push((c, WordTerm::Pow(s.clone())));
        self
    }

    pub fn terms(&self) -> &[(i64, WordTerm)] {
        &self.terms
    }

    /// Applies `f` to every character.
    pub fn map_characters(&self, f: impl Fn(&KummerCharacter) -> Result<KummerCharacter>) -> Result<FormalWord> {
        let terms = self
            .terms
            .iter()
            .map(|(c, t)| {
                Ok((
                    *c,
                    match t {
                        WordTerm::Comm(s, u) => WordTerm::Comm(f(s)?, f(u)?),
                        WordTerm::Pow(s) => WordTerm::Pow(f(s)?),
                    },
                ))
            })
            .collect::<Result<_>>()?;
        Ok(FormalWord { terms })
    }
}

/// `Σ c·comm(σ,τ) + Σ c·pow(σ)`
pub fn omega_eval(word: &FormalWord, omega: &RootOfUnity) -> Result<FnTable> {
    let mut acc = FnTable::zero(omega.field());
    for (c, t) in &word.terms {
        let table = match t {
            WordTerm::Comm(s, u) => commutator_table(s, u, omega)?,
            WordTerm::Pow(s) => power_table(s, omega)?,
        };
        acc = acc.add(&table.scale(*c))?;
    }
    Ok(acc)
}

/// `[σ,τ]` for all pairs and `σ^π` for all characters.
pub fn generator_words(field: &Arc<FqField>) -> Vec<FormalWord> {
    let all = KummerCharacter::all(field);
    let mut out = Vec::new();
    for s in &all {
        for t in &all {
            out.push(FormalWord::new().comm(1, s, t));
        }
        out.push(FormalWord::new().pow(1, s));
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct RestrictionReport {
    pub words: usize,
    pub failures: usize,
    pub passed: bool,
}

/// For each word over `L`, restricting its table to the points of `K`
/// must equal the table of the restricted word over `K`.
pub fn restriction_check(
    emb: &Embedding,
    omega_l: &RootOfUnity,
    omega_k: &RootOfUnity,
    words: &[FormalWord],
) -> Result<RestrictionReport> {
    emb.check_omega(omega_l, omega_k)?;
    let (l, k) = (emb.ext(), emb.sub());
    let l_index: HashMap<u64, usize> = l.points().into_iter().enumerate().map(|(i, x)| (x, i)).collect();
    let k_points = k.points();
    let mut failures = 0;
    for w in words {
        let big = omega_eval(w, omega_l)?;
        let restricted: Vec<(u64, u64)> = k_points.iter().map(|&x| big.values[l_index[&emb.map(x)]]).collect();
        let small = omega_eval(&w.map_characters(|f| restrict_character(emb, f))?, omega_k)?;
        if restricted != small.values {
            failures += 1;
        }
    }
    Ok(RestrictionReport { words: words.len(), failures, passed: failures == 0 })
}

#[derive(Clone, Debug, Serialize)]
pub struct SpanReport {
    pub p: u64,
    pub k: u32,
    pub n: u64,
    /// Number of classes `x∪(1−x)` and `x∪ω + βx` generated.
    pub classes: usize,
    pub span_order: u128,
    pub spans_all: bool,
}

/// Over `F_q`, `𝔤₁ ≅ Z/n` with dual basis `e(σ₀) = 1`, `σ₀` the
/// Frobenius, and `x_ω = (c₀·dlog x)·e`. Checks that the classes
/// `x_ω∪(1−x)_ω` and `x_ω∪ω_ω + βx_ω` span `H²(Z/n) ≅ Z/n`.
pub fn h2_span_check(field: &Arc<FqField>, omega: &RootOfUnity) -> Result<SpanReport> {
    let n = field.n();
    if omega.field() != field || omega.order() != n {
        return Err(Error::IncompatibleOmega("ω does not belong to this field and modulus".into()));
    }
    let c0 = omega.frobenius_value();
    let class = |x: u64| -> Result<u64> { Ok(mul_mod(c0, field.dlog(x)? % n, n)) };
    let w = class(omega.element())?;
    debug_assert_eq!(w, ((field.order() - 1) / n) % n);
    let mut vectors = Vec::new();
    for x in field.points() {
        let (a, b) = (class(x)?, class(field.one_minus(x))?);
        let cup = H2Class::from_terms(1, n, &[(1, CocycleTerm::U { x: vec![a], y: vec![b] })])?;
        let mixed = H2Class::from_terms(
            1,
            n,
            &[(1, CocycleTerm::U { x: vec![a], y: vec![w] }), (1, CocycleTerm::B { z: vec![a] })],
        )?;
        vectors.push(cup.to_vector());
        vectors.push(mixed.to_vector());
    }
    let s = SubgroupZnk::from_rows(n, 1, &vectors)?;
    let order = s.order().unwrap_or(u128::MAX);
    Ok(SpanReport {
        p: field.characteristic(),
        k: field.degree(),
        n,
        classes: vectors.len(),
        span_order: order,
        spans_all: order == n as u128,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finfield::omega;

    fn field(p: u64, k: u32, n: u64) -> Arc<FqField> {
        Arc::new(FqField::new(p, k, None, n).unwrap())
    }

    #[test]
    fn commutator_table_alternates() {
        let f = field(13, 1, 4);
        let w = omega(&f, 4, 1).unwrap();
        for s in KummerCharacter::all(&f) {
            assert!(commutator_table(&s, &s, &w).unwrap().is_zero());
            for c in 0..4 {
                assert!(commutator_table(&s, &s.scale(c), &w).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn power_table_examples() {
        let f = field(7, 1, 3);
        let w = omega(&f, 3, 1).unwrap();
        let t = power_table(&KummerCharacter::new(&f, 1), &w).unwrap();
        // points 2..=6, x = 3 at position 1
        assert_eq!(t.values()[1], (0, 1));
        assert!(power_table(&KummerCharacter::zero(&f), &w).unwrap().is_zero());

        let f5 = field(5, 1, 2);
        let w5 = omega(&f5, 2, 1).unwrap();
        assert_eq!(w5.element(), 4);
        let t = power_table(&KummerCharacter::new(&f5, 1), &w5).unwrap();
        assert_eq!(t.values(), &[(0, 1), (1, 1), (0, 0)]);
    }

    #[test]
    fn fast_tables_match_direct_formula() {
        let f = field(31, 1, 6);
        let w = omega(&f, 6, 5).unwrap();
        let logs = PointLogs::new(&f, &w).unwrap();
        for a in 0..6 {
            let fa = KummerCharacter::new(&f, a);
            assert_eq!(power_table_from_logs(a, &logs, 6, 15 % 6), power_table(&fa, &w).unwrap());
            for b in 0..6 {
                assert_eq!(
                    commutator_table_from_logs(a, b, &logs, 6),
                    commutator_table(&fa, &KummerCharacter::new(&f, b), &w).unwrap()
                );
            }
        }
    }

    #[test]
    fn function_group_examples() {
        for (p, n) in [(7, 3), (5, 2), (13, 4)] {
            let f = field(p, 1, n);
            let g = generate_function_group(&f, &omega(&f, n, 1).unwrap()).unwrap();
            assert_eq!(g.structure().invariant_factors, vec![n], "p={p} n={n}");
        }
    }

    #[test]
    fn word_evaluation() {
        let f = field(7, 1, 3);
        let w = omega(&f, 3, 1).unwrap();
        let s = KummerCharacter::new(&f, 1);
        let t = KummerCharacter::new(&f, 2);
        assert!(omega_eval(&FormalWord::new().comm(1, &s, &s), &w).unwrap().is_zero());
        assert_eq!(omega_eval(&FormalWord::new().pow(2, &s), &w).unwrap().values()[1], (0, 2));
        assert!(omega_eval(&FormalWord::new().comm(1, &s, &t).comm(1, &t, &s), &w).unwrap().is_zero());
        assert!(omega_eval(&FormalWord::new(), &w).unwrap().is_zero());
    }

    #[test]
    fn restriction_examples() {
        let l = field(7, 2, 3);
        let k = field(7, 1, 3);
        let emb = Embedding::new(&k, &l).unwrap();
        let wl = omega(&l, 3, 1).unwrap();
        let wk = omega(&k, 3, emb.compatible_index(1).unwrap()).unwrap();
        let words: Vec<FormalWord> = KummerCharacter::all(&l).iter().map(|s| FormalWord::new().pow(1, s)).collect();
        assert!(restriction_check(&emb, &wl, &wk, &words).unwrap().passed);
        assert!(restriction_check(&emb, &wl, &wk, &[FormalWord::new()]).unwrap().passed);
    }

    #[test]
    fn span_examples() {
        for (p, n) in [(7, 3), (7, 6), (13, 4), (5, 2)] {
            let f = field(p, 1, n);
            assert!(h2_span_check(&f, &omega(&f, n, 1).unwrap()).unwrap().spans_all, "p={p} n={n}");
        }
    }
}
