use super::{howell_rows, mul_mod, sub_mod, ModMatrix, Residue};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solution {
    Found(Vec<Residue>),
    NoSolution,
}

impl Solution {
    pub fn found(&self) -> Option<&[Residue]> {
        match self {
            Solution::Found(x) => Some(x),
            Solution::NoSolution => None,
        }
    }
}

/// Solves `A·x = b` over `Z/n`, returning some solution or `NoSolution`.
/// A returned solution has been checked by substitution.
pub fn solve_linear(a: &ModMatrix, b: &[Residue]) -> Result<Solution> {
    let n = a.modulus();
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch { expected: a.rows(), got: b.len() });
    }
    let mut raw = Vec::with_capacity(b.len());
    for x in b {
        if x.modulus() != n {
            return Err(Error::ModulusMismatch(n, x.modulus()));
        }
        raw.push(x.value());
    }
    Ok(match solve_raw(a, &raw) {
        Some(x) => Solution::Found(x.into_iter().map(|v| Residue::new(n, v)).collect()),
        None => Solution::NoSolution,
    })
}

/// Raw-value variant of [`solve_linear`]; `b` must have `a.rows()` entries.
pub(crate) fn solve_raw(a: &ModMatrix, b: &[u64]) -> Option<Vec<u64>> {
    let n = a.modulus();
    let (m, c) = (a.rows(), a.cols());
    // Row j of [Aᵀ | I] is (column j of A, e_j); any combination with
    // coefficients λ reads (A·λ, λ).
    let rows: Vec<Vec<u64>> = (0..c)
        .map(|j| {
            let mut r = Vec::with_capacity(m + c);
            r.extend((0..m).map(|i| a.get(i, j)));
            r.extend((0..c).map(|k| u64::from(k == j)));
            r
        })
        .collect();
    let basis = howell_rows(n, m + c, rows);
    let mut rem: Vec<u64> = b.iter().map(|v| v % n).collect();
    let mut x = vec![0u64; c];
    let mut next = 0;
    for col in 0..m {
        let pivot = basis.get(next).filter(|(pc, _)| *pc == col);
        if let Some((_, row)) = pivot {
            next += 1;
            if rem[col] == 0 {
                continue;
            }
            let d = row[col];
            if !rem[col].is_multiple_of(d) {
                return None;
            }
            let q = rem[col] / d;
            for j in col..m {
                rem[j] = sub_mod(rem[j], mul_mod(q, row[j], n), n);
            }
            for k in 0..c {
                x[k] = (x[k] + mul_mod(q, row[m + k], n)) % n;
            }
        } else if rem[col] != 0 {
            return None;
        }
    }
    let check = a.mul_vec(&x).expect("dimensions agree");
    let target: Vec<u64> = b.iter().map(|v| v % n).collect();
    assert_eq!(check, target, "linear solve produced a non-solution");
    Some(x)
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn res(n: u64, v: &[u64]) -> Vec<Residue> {
        v.iter().map(|&x| Residue::new(n, x)).collect()
    }

    #[test]
    fn identity_system() {
        let a = ModMatrix::identity(5, 2).unwrap();
        let x = solve_linear(&a, &res(5, &[3, 4])).unwrap();
        assert_eq!(x, Solution::Found(res(5, &[3, 4])));
    }

    #[test]
    fn parity_obstruction() {
        let a = ModMatrix::from_rows(4, 1, &[vec![2]]).unwrap();
        assert_eq!(solve_linear(&a, &res(4, &[1])).unwrap(), Solution::NoSolution);
        let x = solve_linear(&a, &res(4, &[2])).unwrap();
        let v = x.found().unwrap()[0].value();
        // enumerate x in Z/4: exactly 1 and 3 solve 2x = 2
        let all: Vec<u64> = (0..4).filter(|x| 2 * x % 4 == 2).collect();
        assert_eq!(all, vec![1, 3]);
        assert!(all.contains(&v));
    }

    #[test]
    fn dimension_mismatch() {
        let a = ModMatrix::identity(5, 2).unwrap();
        assert!(solve_linear(&a, &res(5, &[1])).is_err());
    }

    #[test]
    fn empty_system() {
        let a = ModMatrix::zeros(7, 0, 3).unwrap();
        assert_eq!(solve_linear(&a, &[]).unwrap(), Solution::Found(res(7, &[0, 0, 0])));
        let a = ModMatrix::zeros(7, 2, 0).unwrap();
        assert_eq!(solve_linear(&a, &res(7, &[0, 0])).unwrap(), Solution::Found(vec![]));
        assert_eq!(solve_linear(&a, &res(7, &[0, 1])).unwrap(), Solution::NoSolution);
    }

    fn enumerate_solutions(a: &ModMatrix, b: &[u64]) -> bool {
        let n = a.modulus();
        let c = a.cols();
        let total = n.pow(c as u32);
        (0..total).any(|mut code| {
            let x: Vec<u64> = (0..c)
                .map(|_| {
                    let d = code % n;
                    code /= n;
                    d
                })
                .collect();
            a.mul_vec(&x).unwrap() == b
        })
    }

    proptest! {
        #[test]
        fn agrees_with_enumeration(
            n in 2u64..=6,
            cols in 0usize..=4,
            rows in 1usize..=4,
            seed in proptest::collection::vec(0u64..6, 32),
        ) {
            let data: Vec<Vec<u64>> = (0..rows)
                .map(|i| (0..cols).map(|j| seed[i * 4 + j] % n).collect())
                .collect();
            let b: Vec<u64> = (0..rows).map(|i| seed[16 + i] % n).collect();
            let a = ModMatrix::from_rows(n, cols, &data).unwrap();
            let got = solve_linear(&a, &res(n, &b)).unwrap();
            let exists = enumerate_solutions(&a, &b);
            match got {
                Solution::Found(x) => {
                    let raw: Vec<u64> = x.iter().map(|r| r.value()).collect();
                    prop_assert_eq!(a.mul_vec(&raw).unwrap(), b);
                }
                Solution::NoSolution => prop_assert!(!exists),
            }
        }
    }
}
