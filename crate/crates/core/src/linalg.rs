//! Small dense linear algebra over a generic [`Scalar`].
//!
//! Dimensions in this crate never exceed 10 (fibers) or 49 (endomorphism
//! spaces), so everything is plain Gaussian elimination with partial
//! pivoting. In exact mode pivoting is by nonzero test, so the same code
//! doubles as exact rational elimination.

use crate::error::GeometryError;
use crate::scalar::Scalar;

/// Dense row-major matrix.
#[derive(Clone, PartialEq, Debug)]
pub struct Mat<S> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<S>,
}

impl<S: Scalar> Mat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, S::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        assert!(rows.iter().all(|row| row.len() == c));
        Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.cols + j] = v;
    }

    pub fn add(&self, rhs: &Mat<S>) -> Mat<S> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &Mat<S>) -> Mat<S> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    pub fn scale(&self, c: &S) -> Mat<S> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.mul(c)).collect(),
        }
    }

    pub fn neg(&self) -> Mat<S> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.neg()).collect(),
        }
    }

    pub fn matmul(&self, rhs: &Mat<S>) -> Mat<S> {
        assert_eq!(self.cols, rhs.rows);
        let mut out: Mat<S> = Mat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = out.at(i, j).add(&a.mul(rhs.at(k, j)));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Mat<S> {
        let mut out = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.at(i, j).clone());
            }
        }
        out
    }

    pub fn apply(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = S::zero();
                for j in 0..self.cols {
                    acc = acc.add(&self.at(i, j).mul(&v[j]));
                }
                acc
            })
            .collect()
    }

    /// Commutator `[self, rhs]`.
    pub fn commutator(&self, rhs: &Mat<S>) -> Mat<S> {
        self.matmul(rhs).sub(&rhs.matmul(self))
    }

    pub fn trace(&self) -> S {
        assert_eq!(self.rows, self.cols);
        let mut acc = S::zero();
        for i in 0..self.rows {
            acc = acc.add(self.at(i, i));
        }
        acc
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.abs_f64()).fold(0.0, f64::max)
    }

    pub fn det(&self) -> S {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut det = S::one();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| {
                    a.at(i, col)
                        .abs_f64()
                        .partial_cmp(&a.at(j, col).abs_f64())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .unwrap();
            if a.at(pivot, col).is_zero() {
                return S::zero();
            }
            if pivot != col {
                for j in 0..n {
                    a.data.swap(pivot * n + j, col * n + j);
                }
                det = det.neg();
            }
            let p = a.at(col, col).clone();
            det = det.mul(&p);
            for i in col + 1..n {
                let f = a.at(i, col).div(&p);
                for j in col..n {
                    let v = a.at(i, j).sub(&f.mul(a.at(col, j)));
                    a.set(i, j, v);
                }
            }
        }
        det
    }

    /// Solves `self * x = b` for several right-hand sides (columns of `b`).
    pub fn solve(&self, b: &Mat<S>) -> Result<Mat<S>, GeometryError> {
        assert_eq!(self.rows, self.cols);
        assert_eq!(self.rows, b.rows);
        let n = self.rows;
        let m = b.cols;
        let mut a = self.clone();
        let mut rhs = b.clone();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| {
                    a.at(i, col)
                        .abs_f64()
                        .partial_cmp(&a.at(j, col).abs_f64())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .unwrap();
            if a.at(pivot, col).is_zero() {
                return Err(GeometryError::SingularMatrix);
            }
            if pivot != col {
                for j in 0..n {
                    a.data.swap(pivot * n + j, col * n + j);
                }
                for j in 0..m {
                    rhs.data.swap(pivot * m + j, col * m + j);
                }
            }
            let p = a.at(col, col).clone();
            for i in 0..n {
                if i == col || a.at(i, col).is_zero() {
                    continue;
                }
                let f = a.at(i, col).div(&p);
                for j in 0..n {
                    let v = a.at(i, j).sub(&f.mul(a.at(col, j)));
                    a.set(i, j, v);
                }
                for j in 0..m {
                    let v = rhs.at(i, j).sub(&f.mul(rhs.at(col, j)));
                    rhs.set(i, j, v);
                }
            }
        }
        let mut x = Mat::zeros(n, m);
        for i in 0..n {
            let p = a.at(i, i).clone();
            for j in 0..m {
                x.set(i, j, rhs.at(i, j).div(&p));
            }
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<Mat<S>, GeometryError> {
        self.solve(&Mat::identity(self.rows))
    }

    /// Symmetry defect `max |A - A^t|`.
    pub fn symmetry_residual(&self) -> f64 {
        let mut r: f64 = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                r = r.max(self.at(i, j).sub(self.at(j, i)).abs_f64());
            }
        }
        r
    }
}

pub fn vec_add<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(x, y)| x.add(y)).collect()
}

pub fn vec_sub<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(x, y)| x.sub(y)).collect()
}

pub fn vec_scale<S: Scalar>(a: &[S], c: &S) -> Vec<S> {
    a.iter().map(|x| x.mul(c)).collect()
}

pub fn vec_axpy<S: Scalar>(acc: &mut [S], c: &S, v: &[S]) {
    for (a, x) in acc.iter_mut().zip(v) {
        *a = a.add(&c.mul(x));
    }
}

pub fn vec_max_abs<S: Scalar>(a: &[S]) -> f64 {
    a.iter().map(|x| x.abs_f64()).fold(0.0, f64::max)
}

/// Euclidean dot product of coefficient vectors.
pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    let mut acc = S::zero();
    for (x, y) in a.iter().zip(b) {
        acc = acc.add(&x.mul(y));
    }
    acc
}

/// Incremental span basis with rank decisions by elimination.
///
/// Vectors are stored twice: in original form and in reduced row-echelon
/// form. A candidate is admitted when its echelon remainder is larger than
/// `threshold` relative to the candidate's own magnitude (exact mode uses
/// the symbolic nonzero test instead).
pub struct SpanBasis<S> {
    dim: usize,
    threshold: f64,
    pub basis: Vec<Vec<S>>,
    echelon: Vec<Vec<S>>,
    pivots: Vec<usize>,
}

impl<S: Scalar> SpanBasis<S> {
    pub fn new(dim: usize, threshold: f64) -> Self {
        SpanBasis {
            dim,
            threshold,
            basis: Vec::new(),
            echelon: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    fn reduce(&self, v: &[S]) -> Vec<S> {
        let mut w = v.to_vec();
        for (row, &p) in self.echelon.iter().zip(&self.pivots) {
            if w[p].is_zero() {
                continue;
            }
            let f = w[p].div(&row[p]);
            for j in 0..self.dim {
                w[j] = w[j].sub(&f.mul(&row[j]));
            }
        }
        w
    }

    /// Residual of `v` against the current span, relative to `|v|`.
    pub fn residual(&self, v: &[S]) -> f64 {
        let scale = vec_max_abs(v);
        if scale == 0.0 {
            return 0.0;
        }
        vec_max_abs(&self.reduce(v)) / scale
    }

    /// Adds `v` if independent; returns true when the rank grew.
    pub fn insert(&mut self, v: &[S]) -> bool {
        let scale = vec_max_abs(v);
        if scale == 0.0 {
            return false;
        }
        let w = self.reduce(v);
        let admit = if S::EXACT {
            w.iter().any(|x| !x.is_zero())
        } else {
            vec_max_abs(&w) / scale > self.threshold
        };
        if !admit {
            return false;
        }
        let pivot = (0..self.dim)
            .max_by(|&i, &j| {
                w[i].abs_f64()
                    .partial_cmp(&w[j].abs_f64())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap();
        self.basis.push(v.to_vec());
        self.echelon.push(w);
        self.pivots.push(pivot);
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    #[test]
    fn solve_and_inverse_roundtrip() {
        let a = Mat::from_rows(vec![vec![4.0, 1.0], vec![2.0, 3.0]]);
        let inv = a.inverse().unwrap();
        let id = a.matmul(&inv);
        assert!(id.sub(&Mat::identity(2)).max_abs() < 1e-14);
    }

    #[test]
    fn rational_det_exact() {
        let a = Mat::from_rows(vec![
            vec![Rational::new(1, 2), Rational::from_i64(1)],
            vec![Rational::from_i64(1), Rational::from_i64(3)],
        ]);
        assert_eq!(a.det(), Rational::new(1, 2));
    }

    #[test]
    fn singular_solve_rejected() {
        let a = Mat::from_rows(vec![vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(a.inverse().is_err());
    }

    #[test]
    fn span_basis_rank() {
        let mut sb = SpanBasis::new(3, 1e-9);
        assert!(sb.insert(&[1.0, 0.0, 0.0]));
        assert!(sb.insert(&[1.0, 1.0, 0.0]));
        assert!(!sb.insert(&[2.0, 1.0, 0.0]));
        assert!(sb.insert(&[0.0, 0.0, 5.0]));
        assert_eq!(sb.rank(), 3);
        assert!(sb.residual(&[3.0, -2.0, 1.0]) < 1e-12);
    }
}
