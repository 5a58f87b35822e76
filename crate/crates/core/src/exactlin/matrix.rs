use super::Ring;
use crate::error::{Error, Result};

/// Dense matrix over Z/p^N, row-major. Vectors act on the left: x ↦ x·M.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RMatrix {
    ring: Ring,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl RMatrix {
    pub fn zeros(ring: Ring, rows: usize, cols: usize) -> RMatrix {
        RMatrix { ring, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(ring: Ring, n: usize) -> RMatrix {
        let mut m = RMatrix::zeros(ring, n, n);
        for i in 0..n {
            m.set(i, i, 1 % ring.modulus());
        }
        m
    }

    pub fn scalar(ring: Ring, n: usize, c: u64) -> RMatrix {
        let mut m = RMatrix::zeros(ring, n, n);
        for i in 0..n {
            m.set(i, i, c % ring.modulus());
        }
        m
    }

    /// Rows must share the length `cols`; entries are reduced.
    pub fn from_rows(ring: Ring, cols: usize, rows: &[Vec<u64>]) -> Result<RMatrix> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::Dimension(format!(
                    "row of length {} in a {}-column matrix",
                    r.len(),
                    cols
                )));
            }
            data.extend(r.iter().map(|&x| x % ring.modulus()));
        }
        Ok(RMatrix { ring, rows: rows.len(), cols, data })
    }

    pub fn from_i64_rows(ring: Ring, cols: usize, rows: &[Vec<i64>]) -> Result<RMatrix> {
        let conv: Vec<Vec<u64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| ring.from_i64(x)).collect())
            .collect();
        RMatrix::from_rows(ring, cols, &conv)
    }

    pub fn from_flat(ring: Ring, rows: usize, cols: usize, data: Vec<u64>) -> RMatrix {
        assert_eq!(data.len(), rows * cols);
        RMatrix { ring, rows, cols, data }
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn data(&self) -> &[u64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> RMatrix {
        let mut t = RMatrix::zeros(self.ring, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &RMatrix) -> Result<RMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        if self.ring != other.ring {
            return Err(Error::RingMismatch(format!("{} vs {}", self.ring, other.ring)));
        }
        let m = self.ring.modulus() as u128;
        let mut out = RMatrix::zeros(self.ring, self.rows, other.cols);
        let mut acc = vec![0u128; other.cols];
        for i in 0..self.rows {
            acc.iter_mut().for_each(|a| *a = 0);
            for k in 0..self.cols {
                let a = self.get(i, k) as u128;
                if a == 0 {
                    continue;
                }
                let orow = other.row(k);
                for (j, &b) in orow.iter().enumerate() {
                    acc[j] = (acc[j] + a * b as u128) % m;
                }
            }
            for j in 0..other.cols {
                out.set(i, j, acc[j] as u64);
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &RMatrix) -> Result<RMatrix> {
        self.zip(other, |r, a, b| r.add(a, b))
    }

    pub fn sub(&self, other: &RMatrix) -> Result<RMatrix> {
        self.zip(other, |r, a, b| r.sub(a, b))
    }

    fn zip(&self, other: &RMatrix, f: impl Fn(&Ring, u64, u64) -> u64) -> Result<RMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        if self.ring != other.ring {
            return Err(Error::RingMismatch(format!("{} vs {}", self.ring, other.ring)));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f(&self.ring, a, b))
            .collect();
        Ok(RMatrix { ring: self.ring, rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&self, c: u64) -> RMatrix {
        let r = self.ring;
        RMatrix {
            ring: r,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| r.mul(x, c)).collect(),
        }
    }

    /// Row vector times matrix.
    pub fn apply(&self, x: &[u64]) -> Vec<u64> {
        assert_eq!(x.len(), self.rows, "vector length vs matrix rows");
        let m = self.ring.modulus() as u128;
        let mut acc = vec![0u128; self.cols];
        for (k, &a) in x.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in self.row(k).iter().enumerate() {
                acc[j] = (acc[j] + a as u128 * b as u128) % m;
            }
        }
        acc.into_iter().map(|v| v as u64).collect()
    }

    pub fn hstack(&self, other: &RMatrix) -> Result<RMatrix> {
        if self.rows != other.rows {
            return Err(Error::Dimension("hstack row count".into()));
        }
        let mut out = RMatrix::zeros(self.ring, self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j));
            }
            for j in 0..other.cols {
                out.set(i, self.cols + j, other.get(i, j));
            }
        }
        Ok(out)
    }

    pub fn vstack(&self, other: &RMatrix) -> Result<RMatrix> {
        if self.cols != other.cols {
            return Err(Error::Dimension("vstack column count".into()));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(RMatrix { ring: self.ring, rows: self.rows + other.rows, cols: self.cols, data })
    }

    pub fn block_diag(blocks: &[&RMatrix]) -> RMatrix {
        let ring = blocks[0].ring;
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = RMatrix::zeros(ring, rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out.set(r0 + i, c0 + j, b.get(i, j));
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> RMatrix {
        let mut out = RMatrix::zeros(self.ring, rows.len(), cols.len());
        for (a, i) in rows.clone().enumerate() {
            for (b, j) in cols.clone().enumerate() {
                out.set(a, b, self.get(i, j));
            }
        }
        out
    }

    pub fn select_cols(&self, cols: &[usize]) -> RMatrix {
        let mut out = RMatrix::zeros(self.ring, self.rows, cols.len());
        for i in 0..self.rows {
            for (b, &j) in cols.iter().enumerate() {
                out.set(i, b, self.get(i, j));
            }
        }
        out
    }

    /// Reduce entries into a ring with the same prime and smaller or equal exponent.
    pub fn reduce_to(&self, ring: Ring) -> RMatrix {
        assert_eq!(ring.p(), self.ring.p());
        assert!(ring.exp() <= self.ring.exp());
        RMatrix {
            ring,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x % ring.modulus()).collect(),
        }
    }

    /// Reinterpret the representatives in a ring with a larger exponent.
    pub fn lift_to(&self, ring: Ring) -> RMatrix {
        assert_eq!(ring.p(), self.ring.p());
        RMatrix { ring, rows: self.rows, cols: self.cols, data: self.data.clone() }
    }

    pub fn signed_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|&x| self.ring.to_signed(x)).collect())
            .collect()
    }
}

impl std::fmt::Display for RMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ";")?;
            }
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            write!(f, "{}", row.join(","))?;
        }
        write!(f, "]")
    }
}
