use serde::Serialize;

use super::{check_modulus, mul_mod, Residue};
use crate::error::{Error, Result};

/// A dense row-major matrix over `Z/n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ModMatrix {
    modulus: u64,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl ModMatrix {
    pub fn zeros(modulus: u64, rows: usize, cols: usize) -> Result<Self> {
        check_modulus(modulus)?;
        Ok(ModMatrix { modulus, rows, cols, data: vec![0; rows * cols] })
    }

    pub fn identity(modulus: u64, size: usize) -> Result<Self> {
        let mut m = Self::zeros(modulus, size, size)?;
        for i in 0..size {
            m.data[i * size + i] = 1;
        }
        Ok(m)
    }

    /// Builds a matrix from raw rows; every value is reduced modulo `modulus`.
    pub fn from_rows(modulus: u64, cols: usize, rows: &[Vec<u64>]) -> Result<Self> {
        check_modulus(modulus)?;
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, got: r.len() });
            }
            data.extend(r.iter().map(|&v| v % modulus));
        }
        Ok(ModMatrix { modulus, rows: rows.len(), cols, data })
    }

    /// Builds a matrix from rows of residues, rejecting mixed moduli.
    pub fn from_residue_rows(modulus: u64, cols: usize, rows: &[Vec<Residue>]) -> Result<Self> {
        check_modulus(modulus)?;
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, got: r.len() });
            }
            for x in r {
                if x.modulus() != modulus {
                    return Err(Error::ModulusMismatch(modulus, x.modulus()));
                }
                data.push(x.value());
            }
        }
        Ok(ModMatrix { modulus, rows: rows.len(), cols, data })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v % self.modulus;
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entry(&self, i: usize, j: usize) -> Residue {
        Residue::new(self.modulus, self.get(i, j))
    }

    pub fn transpose(&self) -> ModMatrix {
        let mut data = vec![0; self.data.len()];
        for i in 0..self.rows {
            for j in 0..self.cols {
                data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        ModMatrix { modulus: self.modulus, rows: self.cols, cols: self.rows, data }
    }

    /// `A·x` for a column vector `x`.
    pub fn mul_vec(&self, x: &[u64]) -> Result<Vec<u64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, got: x.len() });
        }
        let n = self.modulus;
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).fold(0u64, |acc, (&a, &b)| (acc + mul_mod(a, b % n, n)) % n))
            .collect())
    }

    pub fn mul(&self, rhs: &ModMatrix) -> Result<ModMatrix> {
        if self.modulus != rhs.modulus {
            return Err(Error::ModulusMismatch(self.modulus, rhs.modulus));
        }
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, got: rhs.rows });
        }
        let n = self.modulus;
        let mut out = ModMatrix::zeros(n, self.rows, rhs.cols)?;
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    let idx = i * rhs.cols + j;
                    out.data[idx] = (out.data[idx] + mul_mod(a, rhs.get(k, j), n)) % n;
                }
            }
        }
        Ok(out)
    }
}
