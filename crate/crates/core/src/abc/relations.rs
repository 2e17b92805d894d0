use std::sync::Arc;

use serde::Serialize;

use super::{omega_eval, power_table, span, FnTable, FormalWord};
use crate::error::{Error, Result};
use crate::finfield::{FqField, KummerCharacter, RootOfUnity};
use crate::heisenberg::{
    enumerate_homs_check, heis_commutator, solve_embedding_cyclic, EmbeddingProblem, HOM_ENUM_LIMIT,
};
use crate::modring::{halve, mul_mod, SubgroupZnk};

/// Above this many pairs, the `(x, y)` scan runs over dlog classes mod `n`
/// instead of all of `(K^×)²`.
const PAIR_SCAN_LIMIT: u64 = 10_000_000;

/// Solutions of `2a = σ(ω)` and `2b = τ(ω)` for one pair.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub a: Vec<u64>,
    pub b: Vec<u64>,
}

/// The seven equivalent conditions on `Σ_i [σ_i, τ_i]`; `None` where not
/// evaluated.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RelationReport {
    /// Alternating sum at `(x, 1−x)` vanishes for all `x`.
    #[serde(rename = "1")]
    pub c1: bool,
    /// Equality with `Σ b_i·2σ_i^π − a_i·2τ_i^π`.
    #[serde(rename = "2")]
    pub c2: bool,
    /// Membership in `⟨2σ_i^π, 2τ_i^π⟩`.
    #[serde(rename = "3")]
    pub c3: bool,
    /// Membership in `2·𝔤₁^π`.
    #[serde(rename = "4")]
    pub c4: bool,
    /// Every homomorphism to the Heisenberg group kills the sum.
    #[serde(rename = "5")]
    pub c5: Option<bool>,
    /// Alternating sum vanishes at all `(x, y)`.
    #[serde(rename = "6")]
    pub c6: bool,
    /// Every `x` admits a solution of the `(x, 1−x)` embedding problem
    /// killing the sum.
    #[serde(rename = "7")]
    pub c7: Option<bool>,
    pub witnesses: Vec<Witness>,
    pub first_failing_point: Option<u64>,
    /// `2n | q − 1`
    pub hypothesis: bool,
    /// Whether the `(x, y)` scan covered every pair or one per dlog class.
    pub pair_scan_exhaustive: bool,
}

impl RelationReport {
    /// Conditions that were evaluated, in order.
    pub fn flags(&self) -> Vec<bool> {
        let mut v = vec![self.c1, self.c2, self.c3, self.c4];
        v.extend(self.c5);
        v.push(self.c6);
        v.extend(self.c7);
        v
    }

    pub fn consistent(&self) -> bool {
        let f = self.flags();
        f.iter().all(|&b| b == f[0])
    }
}

/// Per-`(K, ω)` data shared across relation checks: the doubled power tables and
/// the subgroup `2·𝔤₁^π` they generate.
pub struct RelationContext {
    field: Arc<FqField>,
    omega: RootOfUnity,
    double_power_tables: Vec<FnTable>,
    double_pi: SubgroupZnk,
}

impl RelationContext {
    pub fn new(omega: &RootOfUnity) -> Result<Self> {
        let field = Arc::clone(omega.field());
        let n = field.n();
        let q = field.order();
        if omega.order() != n {
            return Err(Error::IncompatibleOmega(format!("ω has order {} but n = {n}", omega.order())));
        }
        if !(q - 1).is_multiple_of(2 * n) {
            return Err(Error::Hypothesis(format!("2n = {} does not divide q − 1 = {}", 2 * n, q - 1)));
        }
        let double_power_tables: Vec<FnTable> =
            KummerCharacter::all(&field).iter().map(|f| Ok(power_table(f, omega)?.scale(2))).collect::<Result<_>>()?;
        let points = q as usize - 2;
        let double_pi = span(n, points, &double_power_tables.iter().collect::<Vec<_>>())?;
        Ok(RelationContext { field, omega: omega.clone(), double_power_tables, double_pi })
    }

    fn alternating(&self, pairs: &[(KummerCharacter, KummerCharacter)], x: u64, y: u64) -> Result<u64> {
        let n = self.field.n();
        let mut acc = 0;
        for (s, t) in pairs {
            let term = mul_mod(s.eval(x)?.value(), t.eval(y)?.value(), n) + n
                - mul_mod(s.eval(y)?.value(), t.eval(x)?.value(), n);
            acc = (acc + term) % n;
        }
        Ok(acc)
    }

    /// Evaluates every condition; unequal flags are a theorem violation.
    pub fn check(&self, pairs: &[(KummerCharacter, KummerCharacter)]) -> Result<RelationReport> {
        let field = &self.field;
        let n = field.n();
        for (s, t) in pairs {
            if s.field() != field || t.field() != field {
                return Err(Error::FieldMismatch);
            }
        }
        let mut report = RelationReport { hypothesis: true, ..Default::default() };

        // (1) by direct scan.
        for x in field.points() {
            if self.alternating(pairs, x, field.one_minus(x))? != 0 {
                report.first_failing_point = Some(x);
                break;
            }
        }
        report.c1 = report.first_failing_point.is_none();

        let sum = omega_eval(&pairs.iter().fold(FormalWord::new(), |w, (s, t)| w.comm(1, s, t)), &self.omega)?;

        // (2) with witnesses 2a = σ(ω), 2b = τ(ω).
        let w = self.omega.element();
        let mut rhs = FnTable::zero(field);
        for (s, t) in pairs {
            let a = halve(s.eval(w)?.value(), n);
            let b = halve(t.eval(w)?.value(), n);
            let (Some(&a0), Some(&b0)) = (a.first(), b.first()) else {
                return Err(Error::Hypothesis("σ(ω) is not divisible by 2 although ω is a square".into()));
            };
            let two_s = power_table(s, &self.omega)?.scale(2);
            let two_t = power_table(t, &self.omega)?.scale(2);
            rhs = rhs.add(&two_s.scale(b0 as i64))?.sub(&two_t.scale(a0 as i64))?;
            report.witnesses.push(Witness { a, b });
        }
        report.c2 = sum == rhs;

        // (3) membership in ⟨2σ_i^π, 2τ_i^π⟩.
        let points = field.order() as usize - 2;
        let mut local = Vec::with_capacity(2 * pairs.len());
        for (s, t) in pairs {
            local.push(power_table(s, &self.omega)?.scale(2));
            local.push(power_table(t, &self.omega)?.scale(2));
        }
        let local_span = span(n, points, &local.iter().collect::<Vec<_>>())?;
        report.c3 = local_span.contains(&sum.flatten());

        // (4) membership in 2·𝔤₁^π.
        report.c4 = self.double_pi.contains(&sum.flatten());

        // (5) and (7) by enumeration into the Heisenberg group.
        if n <= HOM_ENUM_LIMIT {
            let homs = enumerate_homs_check(pairs, &self.omega)?;
            if !homs.exponent_divides_n2 || !homs.bilinear_agrees {
                return Err(Error::TheoremViolation(format!("homomorphism enumeration inconsistent: {homs:?}")));
            }
            report.c5 = Some(homs.all_vanish);
            report.c7 = Some(self.embedding_condition(pairs)?);
        }

        // (6): every cup product vanishes over a finite field.
        let q1 = field.order() - 1;
        report.pair_scan_exhaustive = q1 * q1 <= PAIR_SCAN_LIMIT;
        let reps: Vec<u64> =
            if report.pair_scan_exhaustive { field.units().collect() } else { (0..n).map(|i| field.exp(i)).collect() };
        report.c6 = true;
        'scan: for &x in &reps {
            for &y in &reps {
                if self.alternating(pairs, x, y)? != 0 {
                    report.c6 = false;
                    break 'scan;
                }
            }
        }

        if !report.consistent() {
            return Err(Error::TheoremViolation(format!("conditions disagree: {:?}", report.flags())));
        }
        Ok(report)
    }

    fn embedding_condition(&self, pairs: &[(KummerCharacter, KummerCharacter)]) -> Result<bool> {
        let field = &self.field;
        let n = field.n();
        let idx = self.omega.index();
        for x in field.points() {
            let sol = solve_embedding_cyclic(&EmbeddingProblem::new(&self.omega, x, field.one_minus(x))?)?;
            let mut found = false;
            for h in &sol.generator_images {
                let mut sum = 0;
                for (s, t) in pairs {
                    let hs = h.pow(mul_mod(s.value(), idx, n));
                    let ht = h.pow(mul_mod(t.value(), idx, n));
                    sum = (sum + heis_commutator(&hs, &ht)?.c) % n;
                }
                if sum == 0 {
                    found = true;
                    break;
                }
            }
            if !found {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn double_power_tables(&self) -> &[FnTable] {
        &self.double_power_tables
    }
}

/// Checks all conditions for a finite family of pairs.
pub fn relation_check(pairs: &[(KummerCharacter, KummerCharacter)], omega: &RootOfUnity) -> Result<RelationReport> {
    RelationContext::new(omega)?.check(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finfield::omega;

    #[test]
    fn examples() {
        let f = Arc::new(FqField::new(13, 1, None, 3).unwrap());
        let w = omega(&f, 3, 1).unwrap();
        assert_eq!(w.element(), 3);
        let s = KummerCharacter::new(&f, 1);
        let r = relation_check(&[(s.clone(), s.clone())], &w).unwrap();
        assert!(r.consistent() && r.c1 && r.c5 == Some(true) && r.c7 == Some(true));
        assert_eq!(r.witnesses[0].a, vec![2]);
        let r = relation_check(&[], &w).unwrap();
        assert!(r.flags().iter().all(|&b| b));
        let json = serde_json::to_value(&r).unwrap();
        assert!(json.get("1").is_some() && json.get("7").is_some());
    }

    #[test]
    fn hypothesis_enforced() {
        let f = Arc::new(FqField::new(7, 1, None, 6).unwrap());
        let w = omega(&f, 6, 1).unwrap();
        assert!(matches!(relation_check(&[], &w), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn even_modulus_has_two_witnesses() {
        let f = Arc::new(FqField::new(17, 1, None, 4).unwrap());
        let w = omega(&f, 4, 1).unwrap();
        let all = KummerCharacter::all(&f);
        let pairs: Vec<_> = all.iter().map(|s| (s.clone(), all[1].clone())).collect();
        let r = relation_check(&pairs, &w).unwrap();
        assert!(r.consistent());
        assert!(r.witnesses.iter().all(|x| x.a.len() == 2 && x.b.len() == 2));
    }
}
