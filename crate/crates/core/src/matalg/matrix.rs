//! Square complex matrices in compressed-row form.
//!
//! Almost every operator this crate builds is a partial permutation matrix
//! (path-space Cuntz-Krieger families, regular representations, groupoid
//! convolution operators), so products and trace pairings are done on the
//! nonzero pattern only. Dense conversions exist for spectral work.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub type C64 = Complex64;

/// Entries with modulus below this are dropped after arithmetic.
pub const DROP: f64 = 1e-14;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Clone, PartialEq)]
pub struct Mat {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mat({}x{}, [", self.n, self.n)?;
        for (k, (i, j, v)) in self.entries().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            if v.im == 0.0 {
                write!(f, "({i},{j})={}", v.re)?;
            } else {
                write!(f, "({i},{j})={}{:+}i", v.re, v.im)?;
            }
        }
        write!(f, "])")
    }
}

impl Mat {
    pub fn zeros(n: usize) -> Self {
        Mat { n, row_ptr: vec![0; n + 1], cols: Vec::new(), vals: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        Mat { n, row_ptr: (0..=n).collect(), cols: (0..n).collect(), vals: vec![ONE; n] }
    }

    /// Matrix unit `e_{ij}`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        Self::from_triplets(n, vec![(i, j, ONE)])
    }

    pub fn diagonal(values: &[C64]) -> Self {
        let n = values.len();
        Self::from_triplets(n, values.iter().enumerate().map(|(i, v)| (i, i, *v)).collect())
    }

    /// Builds a matrix from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, C64)>) -> Self {
        triplets.sort_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0; n + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<C64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        let mut rows_of = Vec::with_capacity(triplets.len());
        for (i, j, v) in triplets {
            assert!(i < n && j < n, "entry ({i},{j}) outside {n}x{n}");
            if last == Some((i, j)) {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(j);
                vals.push(v);
                rows_of.push(i);
                last = Some((i, j));
            }
        }
        let mut out_cols = Vec::with_capacity(cols.len());
        let mut out_vals = Vec::with_capacity(vals.len());
        for ((i, j), v) in rows_of.into_iter().zip(cols).zip(vals) {
            if v.norm() > DROP {
                row_ptr[i + 1] += 1;
                out_cols.push(j);
                out_vals.push(v);
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Mat { n, row_ptr, cols: out_cols, vals: out_vals }
    }

    pub fn from_dense(m: &DMatrix<C64>) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "matrix must be square");
        let n = m.nrows();
        let mut t = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let v = m[(i, j)];
                if v.norm() > DROP {
                    t.push((i, j, v));
                }
            }
        }
        Self::from_triplets(n, t)
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::from_element(self.n, self.n, ZERO);
        for (i, j, v) in self.entries() {
            m[(i, j)] = v;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vals.is_empty()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
        self.cols[a..b].iter().copied().zip(self.vals[a..b].iter().copied())
    }

    /// All nonzero entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.n).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    /// Nonzero entries keyed by flattened position `i * n + j`, ascending.
    pub fn flat_entries(&self) -> impl Iterator<Item = (usize, C64)> + '_ {
        let n = self.n;
        self.entries().map(move |(i, j, v)| (i * n + j, v))
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
        match self.cols[a..b].binary_search(&j) {
            Ok(k) => self.vals[a + k],
            Err(_) => ZERO,
        }
    }

    pub fn scale(&self, c: C64) -> Mat {
        if c.norm() <= DROP {
            return Mat::zeros(self.n);
        }
        let mut out = self.clone();
        for v in &mut out.vals {
            *v *= c;
        }
        out
    }

    pub fn adjoint(&self) -> Mat {
        let t = self.entries().map(|(i, j, v)| (j, i, v.conj())).collect();
        Mat::from_triplets(self.n, t)
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.n, other.n, "dimension mismatch in product");
        let n = self.n;
        let mut acc = vec![ZERO; n];
        let mut seen = vec![false; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut row_ptr = vec![0; n + 1];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for i in 0..n {
            for (k, a) in self.row(i) {
                for (j, b) in other.row(k) {
                    if !seen[j] {
                        seen[j] = true;
                        touched.push(j);
                    }
                    acc[j] += a * b;
                }
            }
            touched.sort_unstable();
            for &j in &touched {
                let v = acc[j];
                if v.norm() > DROP {
                    cols.push(j);
                    vals.push(v);
                }
                acc[j] = ZERO;
                seen[j] = false;
            }
            touched.clear();
            row_ptr[i + 1] = cols.len();
        }
        Mat { n, row_ptr, cols, vals }
    }

    /// `Σ c_k M_k` over equally sized matrices.
    pub fn lin_comb<'a, I>(n: usize, terms: I) -> Mat
    where
        I: IntoIterator<Item = (C64, &'a Mat)>,
    {
        let terms: Vec<(C64, &Mat)> = terms.into_iter().filter(|(c, _)| c.norm() > 0.0).collect();
        let mut acc = vec![ZERO; n];
        let mut seen = vec![false; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut row_ptr = vec![0; n + 1];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for i in 0..n {
            for (c, m) in &terms {
                debug_assert_eq!(m.n, n);
                for (j, v) in m.row(i) {
                    if !seen[j] {
                        seen[j] = true;
                        touched.push(j);
                    }
                    acc[j] += *c * v;
                }
            }
            touched.sort_unstable();
            for &j in &touched {
                let v = acc[j];
                if v.norm() > DROP {
                    cols.push(j);
                    vals.push(v);
                }
                acc[j] = ZERO;
                seen[j] = false;
            }
            touched.clear();
            row_ptr[i + 1] = cols.len();
        }
        Mat { n, row_ptr, cols, vals }
    }

    pub fn sum<'a, I: IntoIterator<Item = &'a Mat>>(n: usize, items: I) -> Mat {
        Mat::lin_comb(n, items.into_iter().map(|m| (ONE, m)))
    }

    /// Kronecker product; `self` indexes the outer blocks.
    pub fn kron(&self, other: &Mat) -> Mat {
        let m = other.n;
        let mut t = Vec::with_capacity(self.nnz() * other.nnz());
        for (i, j, a) in self.entries() {
            for (k, l, b) in other.entries() {
                t.push((i * m + k, j * m + l, a * b));
            }
        }
        Mat::from_triplets(self.n * m, t)
    }

    /// Block-diagonal sum `self ⊕ other`.
    pub fn direct_sum(&self, other: &Mat) -> Mat {
        let off = self.n;
        let mut t: Vec<_> = self.entries().collect();
        t.extend(other.entries().map(|(i, j, v)| (i + off, j + off, v)));
        Mat::from_triplets(self.n + other.n, t)
    }

    /// Trace pairing `tr(self* other)`.
    pub fn inner(&self, other: &Mat) -> C64 {
        assert_eq!(self.n, other.n, "dimension mismatch in trace pairing");
        let mut s = ZERO;
        for i in 0..self.n {
            let (mut a, ae) = (self.row_ptr[i], self.row_ptr[i + 1]);
            let (mut b, be) = (other.row_ptr[i], other.row_ptr[i + 1]);
            while a < ae && b < be {
                match self.cols[a].cmp(&other.cols[b]) {
                    std::cmp::Ordering::Less => a += 1,
                    std::cmp::Ordering::Greater => b += 1,
                    std::cmp::Ordering::Equal => {
                        s += self.vals[a].conj() * other.vals[b];
                        a += 1;
                        b += 1;
                    }
                }
            }
        }
        s
    }

    pub fn norm_fro(&self) -> f64 {
        self.vals.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.vals.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Mat) -> f64 {
        assert_eq!(self.n, other.n, "dimension mismatch in comparison");
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            let (mut a, ae) = (self.row_ptr[i], self.row_ptr[i + 1]);
            let (mut b, be) = (other.row_ptr[i], other.row_ptr[i + 1]);
            while a < ae || b < be {
                let ca = if a < ae { self.cols[a] } else { usize::MAX };
                let cb = if b < be { other.cols[b] } else { usize::MAX };
                let d = if ca == cb {
                    let d = (self.vals[a] - other.vals[b]).norm();
                    a += 1;
                    b += 1;
                    d
                } else if ca < cb {
                    a += 1;
                    self.vals[a - 1].norm()
                } else {
                    b += 1;
                    other.vals[b - 1].norm()
                };
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn approx_eq(&self, other: &Mat, tol: f64) -> bool {
        self.n == other.n && self.max_abs_diff(other) <= tol
    }

    pub fn trace(&self) -> C64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// Spectral norm, via the largest eigenvalue of `self* self`.
    pub fn operator_norm(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        let g = self.adjoint().matmul(self).to_dense();
        let eig = nalgebra::SymmetricEigen::new(g);
        eig.eigenvalues.iter().copied().fold(0.0, f64::max).max(0.0).sqrt()
    }

    /// Smallest eigenvalue of the Hermitian part; negative values signal failure of positivity.
    pub fn min_hermitian_eigenvalue(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        let d = self.to_dense();
        let h = (&d + d.adjoint()).scale(0.5);
        let eig = nalgebra::SymmetricEigen::new(h);
        eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn is_self_adjoint(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    /// Restriction to the principal block `[start, start + size)`.
    pub fn block(&self, row0: usize, col0: usize, size: usize) -> Mat {
        let mut t = Vec::new();
        for i in row0..row0 + size {
            for (j, v) in self.row(i) {
                if j >= col0 && j < col0 + size {
                    t.push((i - row0, j - col0, v));
                }
            }
        }
        Mat::from_triplets(size, t)
    }
}

impl Add for &Mat {
    type Output = Mat;
    fn add(self, rhs: &Mat) -> Mat {
        Mat::lin_comb(self.n, [(ONE, self), (ONE, rhs)])
    }
}

impl Sub for &Mat {
    type Output = Mat;
    fn sub(self, rhs: &Mat) -> Mat {
        Mat::lin_comb(self.n, [(ONE, self), (-ONE, rhs)])
    }
}

impl Mul for &Mat {
    type Output = Mat;
    fn mul(self, rhs: &Mat) -> Mat {
        self.matmul(rhs)
    }
}

/// Serialized as `{ "dim": n, "entries": [[i, j, re, im], ...] }`.
#[derive(Serialize, Deserialize)]
struct MatRepr {
    dim: usize,
    entries: Vec<(usize, usize, f64, f64)>,
}

impl Serialize for Mat {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MatRepr { dim: self.n, entries: self.entries().map(|(i, j, v)| (i, j, v.re, v.im)).collect() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Mat {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = MatRepr::deserialize(d)?;
        if r.entries.iter().any(|&(i, j, _, _)| i >= r.dim || j >= r.dim) {
            return Err(serde::de::Error::custom("matrix entry outside declared dimension"));
        }
        Ok(Mat::from_triplets(r.dim, r.entries.into_iter().map(|(i, j, a, b)| (i, j, C64::new(a, b))).collect()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_mul(a: &Mat, b: &Mat) -> Mat {
        Mat::from_dense(&(a.to_dense() * b.to_dense()))
    }

    #[test]
    fn product_matches_dense() {
        let a = Mat::from_triplets(3, vec![(0, 1, ONE), (1, 2, C64::new(0.5, -2.0)), (2, 0, C64::new(0.0, 1.0))]);
        let b = Mat::from_triplets(3, vec![(1, 1, C64::new(3.0, 0.0)), (2, 0, ONE), (0, 2, C64::new(1.0, 1.0))]);
        assert!(a.matmul(&b).approx_eq(&dense_mul(&a, &b), 1e-14));
    }

    #[test]
    fn cancellation_drops_entries() {
        let a = Mat::unit(2, 0, 1);
        let z = &a - &a;
        assert_eq!(z.nnz(), 0);
    }

    #[test]
    fn kron_and_direct_sum_dimensions() {
        let a = Mat::unit(2, 0, 1);
        let b = Mat::identity(3);
        assert_eq!(a.kron(&b).dim(), 6);
        assert_eq!(a.direct_sum(&b).dim(), 5);
        assert_eq!(a.kron(&b).get(1, 4), ONE);
    }

    #[test]
    fn trace_pairing_is_frobenius() {
        let a = Mat::from_triplets(2, vec![(0, 0, C64::new(1.0, 1.0)), (1, 0, ONE)]);
        assert!((a.inner(&a).re - a.norm_fro().powi(2)).abs() < 1e-14);
    }

    #[test]
    fn operator_norm_of_partial_isometry_is_one() {
        let a = Mat::from_triplets(3, vec![(0, 1, ONE), (1, 2, ONE)]);
        assert!((a.operator_norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn serde_round_trip() {
        let a = Mat::from_triplets(2, vec![(0, 1, C64::new(0.25, -1.0))]);
        let s = serde_json::to_string(&a).unwrap();
        let b: Mat = serde_json::from_str(&s).unwrap();
        assert_eq!(a, b);
    }
}
