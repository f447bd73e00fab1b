use alloc::format;
use alloc::vec::Vec;

use crate::dist::{kl_sum, Distribution};
use crate::error::Error;
use crate::scalar::Scalar;
use crate::support::SupportPattern;

/// A bivariate probability distribution: a nonnegative `n×m` table with
/// grand total 1. Elements of transportation polytopes live here.
#[derive(Clone, Debug, PartialEq)]
pub struct JointTable<T: Scalar> {
    rows: usize,
    cols: usize,
    entries: Vec<T>, // row-major
}

impl<T: Scalar> JointTable<T> {
    pub fn new(rows: usize, cols: usize, entries: Vec<T>) -> Result<Self, Error> {
        if entries.len() != rows * cols || rows == 0 || cols == 0 {
            return Err(Error::ShapeMismatch(
                rows,
                cols,
                entries.len() / cols.max(1),
                cols,
            ));
        }
        let mut sum = T::zero();
        for (k, e) in entries.iter().enumerate() {
            if !e.mass_is_valid() {
                let (i, j) = (k / cols, k % cols);
                return Err(if e.to_f64().is_nan() || e.to_f64().is_infinite() {
                    Error::NonFinite(k)
                } else {
                    Error::NegativeEntry(i, j)
                });
            }
            sum = sum + e.clone();
        }
        if !T::sum_is_one(&sum) {
            return Err(Error::BadTotal(format!("{}", sum.to_f64())));
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn from_rows(data: Vec<Vec<T>>) -> Result<Self, Error> {
        let rows = data.len();
        let cols = data.first().map(Vec::len).unwrap_or(0);
        let mut entries = Vec::with_capacity(rows * cols);
        for (i, row) in data.into_iter().enumerate() {
            if row.len() != cols {
                return Err(Error::RaggedRows {
                    row: i,
                    got: row.len(),
                    expected: cols,
                });
            }
            entries.extend(row);
        }
        Self::new(rows, cols, entries)
    }

    /// Bypasses validation; for internal iterates whose invariants hold by
    /// construction.
    pub(crate) fn from_raw(rows: usize, cols: usize, entries: Vec<T>) -> Self {
        debug_assert_eq!(entries.len(), rows * cols);
        Self {
            rows,
            cols,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, i: usize, j: usize) -> &T {
        &self.entries[i * self.cols + j]
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols
    }

    fn shape_check(&self, other: &Self) -> Result<(), Error> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(
                self.rows, self.cols, other.rows, other.cols,
            ))
        }
    }

    /// Exact row sums and column sums.
    pub fn marginals(&self) -> (Distribution<T>, Distribution<T>) {
        let mut row_sums = alloc::vec![T::zero(); self.rows];
        let mut col_sums = alloc::vec![T::zero(); self.cols];
        for i in 0..self.rows {
            for j in 0..self.cols {
                let e = self.entry(i, j);
                row_sums[i] = row_sums[i].clone() + e.clone();
                col_sums[j] = col_sums[j].clone() + e.clone();
            }
        }
        let p = Distribution::new(row_sums).expect("row sums of a valid table");
        let q = Distribution::new(col_sums).expect("column sums of a valid table");
        (p, q)
    }

    /// Cells with entry strictly above `threshold`. Exact mode ignores the
    /// threshold and takes `entry > 0`; float mode defaults to `1e-12`.
    pub fn support(&self, threshold: f64) -> SupportPattern {
        let mut pattern = SupportPattern::empty(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let e = self.entry(i, j);
                let positive = if T::EXACT {
                    !e.is_zero()
                } else {
                    e.to_f64() > threshold
                };
                if positive {
                    pattern.insert(i, j);
                }
            }
        }
        pattern
    }

    /// `D(self‖other)` in nats with the `0·ln(0/q) = 0`, `p·ln(p/0) = +∞`
    /// conventions. `+∞` is a meaningful outcome, not an error.
    pub fn kl_divergence(&self, other: &Self) -> Result<f64, Error> {
        self.shape_check(other)?;
        Ok(kl_sum(self.entries.iter().zip(other.entries.iter())))
    }

    pub fn to_f64(&self) -> JointTable<f64> {
        JointTable {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(Scalar::to_f64).collect(),
        }
    }
}

impl JointTable<f64> {
    /// `Σ |a − b|` over entries.
    pub fn l1_distance(&self, other: &Self) -> Result<f64, Error> {
        self.shape_check(other)?;
        Ok(self
            .entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| (a - b).abs())
            .sum())
    }
}

/// The product table `p × q` with entries `pᵢ·qⱼ`; its marginals are
/// exactly `(p, q)`.
pub fn product_table<T: Scalar>(p: &Distribution<T>, q: &Distribution<T>) -> JointTable<T> {
    let entries = p
        .masses()
        .iter()
        .flat_map(|pi| q.masses().iter().map(move |qj| pi.clone() * qj.clone()))
        .collect();
    JointTable::from_raw(p.len(), q.len(), entries)
}
