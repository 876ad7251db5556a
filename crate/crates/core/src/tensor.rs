//! Dense multilinear algebra on a finite-dimensional inner-product fiber.
//!
//! Tensors are stored as dense component arrays; dimensions in scope stay
//! at or below 10, so there is no sparsity machinery. All values are
//! immutable after construction and every operation is a pure function.

use crate::error::GeometryError;
use crate::linalg::Mat;
use crate::scalar::Scalar;

/// Relative alternation tolerance used by constructors in float mode.
pub const ALTERNATION_TOL: f64 = 1e-12;

/// Inner-product space underlying a reductive complement.
#[derive(Clone, Debug)]
pub struct Fiber<S> {
    pub dim: usize,
    pub metric: Mat<S>,
    metric_inv: Mat<S>,
}

impl<S: Scalar> Fiber<S> {
    /// Builds a fiber from a symmetric positive definite metric.
    ///
    /// Positivity is checked through leading principal minors, which is
    /// exact in rational mode.
    pub fn new(metric: Mat<S>) -> Result<Self, GeometryError> {
        let dim = metric.rows;
        if metric.cols != dim {
            return Err(GeometryError::DimMismatch {
                what: "metric",
                expected: dim,
                got: metric.cols,
            });
        }
        if metric.symmetry_residual() > 0.0 && !S::EXACT {
            if metric.symmetry_residual() > ALTERNATION_TOL {
                return Err(GeometryError::MetricNotSpd);
            }
        } else if metric.symmetry_residual() > 0.0 {
            return Err(GeometryError::MetricNotSpd);
        }
        for k in 1..=dim {
            let mut minor = Mat::zeros(k, k);
            for i in 0..k {
                for j in 0..k {
                    minor.set(i, j, metric.at(i, j).clone());
                }
            }
            if !minor.det().is_positive() {
                return Err(GeometryError::MetricNotSpd);
            }
        }
        let metric_inv = metric.inverse().map_err(|_| GeometryError::MetricNotSpd)?;
        Ok(Fiber {
            dim,
            metric,
            metric_inv,
        })
    }

    pub fn euclidean(dim: usize) -> Self {
        Fiber::new(Mat::identity(dim)).expect("identity metric is SPD")
    }

    pub fn inner(&self, x: &[S], y: &[S]) -> S {
        let mut acc = S::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc = acc.add(&x[i].mul(&self.metric.at(i, j).mul(&y[j])));
            }
        }
        acc
    }

    /// Index lowering: `flat(v)(x) = g(v, x)`.
    pub fn flat(&self, v: &[S]) -> Vec<S> {
        self.metric.transpose().apply(v)
    }

    /// Index raising; round-trips with [`Fiber::flat`].
    pub fn sharp(&self, w: &[S]) -> Vec<S> {
        self.metric_inv.transpose().apply(w)
    }

    /// g-adjoint of an endomorphism, `g(A x, y) = g(x, adj(A) y)`.
    pub fn adjoint(&self, a: &Mat<S>) -> Mat<S> {
        self.metric_inv.matmul(&a.transpose()).matmul(&self.metric)
    }

    /// Skew-adjointness defect `max |g(Ax,y) + g(x,Ay)|` on basis vectors.
    pub fn skew_adjoint_residual(&self, a: &Mat<S>) -> f64 {
        let ga = self.metric.matmul(a);
        ga.add(&ga.transpose()).max_abs()
    }

    /// Invariant inner product on endomorphisms: `tr(adj(A) B)`.
    ///
    /// Equals the Frobenius product in any g-orthonormal basis, without
    /// requiring square roots (stays exact in rational mode).
    pub fn endo_inner(&self, a: &Mat<S>, b: &Mat<S>) -> S {
        self.adjoint(a).matmul(b).trace()
    }

    /// g-orthogonal projection of `v` onto the span of `basis`.
    pub fn project_onto(&self, basis: &[Vec<S>], v: &[S]) -> Result<Vec<S>, GeometryError> {
        if basis.is_empty() {
            return Ok(vec![S::zero(); self.dim]);
        }
        let r = basis.len();
        let mut gram = Mat::zeros(r, r);
        let mut rhs = Mat::zeros(r, 1);
        for i in 0..r {
            for j in 0..r {
                gram.set(i, j, self.inner(&basis[i], &basis[j]));
            }
            rhs.set(i, 0, self.inner(&basis[i], v));
        }
        let coeff = gram.solve(&rhs)?;
        let mut out = vec![S::zero(); self.dim];
        for (i, b) in basis.iter().enumerate() {
            crate::linalg::vec_axpy(&mut out, coeff.at(i, 0), b);
        }
        Ok(out)
    }
}

/// Marker for the role of a component array.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TensorKind {
    /// Covariant tensor without symmetry constraints (e.g. the metric).
    General,
    /// Totally antisymmetric covariant tensor.
    AlternatingForm,
    /// Type (1,1) tensor stored as a matrix acting on vectors.
    Endomorphism,
    /// Type (0,1) tensor.
    Vector,
}

/// Dense invariant tensor on a fiber.
///
/// Covariant tensors of rank `p` store `dim^p` components indexed
/// lexicographically; endomorphisms store the matrix `E[out][in]`.
#[derive(Clone, Debug)]
pub struct Tensor<S> {
    pub p: usize,
    pub q: usize,
    pub dim: usize,
    pub kind: TensorKind,
    pub comps: Vec<S>,
}

/// Iterates over all multi-indices of length `k` with entries below `dim`.
pub fn for_each_index(dim: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if dim == 0 && k > 0 {
        return;
    }
    let mut idx = vec![0usize; k];
    loop {
        f(&idx);
        let mut pos = k;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < dim {
                break;
            }
            idx[pos] = 0;
        }
    }
}

#[inline]
pub fn flat_index(dim: usize, idx: &[usize]) -> usize {
    idx.iter().fold(0, |acc, &i| acc * dim + i)
}

fn alternation_residual<S: Scalar>(dim: usize, k: usize, comps: &[S]) -> f64 {
    if k < 2 {
        return 0.0;
    }
    let mut res: f64 = 0.0;
    for_each_index(dim, k, |idx| {
        for s in 0..k - 1 {
            let mut swapped = idx.to_vec();
            swapped.swap(s, s + 1);
            let sum = comps[flat_index(dim, idx)].add(&comps[flat_index(dim, &swapped)]);
            res = res.max(sum.abs_f64());
        }
    });
    res
}

impl<S: Scalar> Tensor<S> {
    pub fn vector(comps: Vec<S>) -> Self {
        let dim = comps.len();
        Tensor {
            p: 0,
            q: 1,
            dim,
            kind: TensorKind::Vector,
            comps,
        }
    }

    pub fn endomorphism(m: Mat<S>) -> Self {
        assert_eq!(m.rows, m.cols);
        Tensor {
            p: 1,
            q: 1,
            dim: m.rows,
            kind: TensorKind::Endomorphism,
            comps: m.data,
        }
    }

    pub fn covariant(dim: usize, p: usize, comps: Vec<S>) -> Self {
        assert_eq!(comps.len(), dim.pow(p as u32));
        Tensor {
            p,
            q: 0,
            dim,
            kind: TensorKind::General,
            comps,
        }
    }

    /// Alternating form constructor; rejects non-antisymmetric components.
    pub fn form(dim: usize, degree: usize, comps: Vec<S>) -> Result<Self, GeometryError> {
        assert_eq!(comps.len(), dim.pow(degree as u32));
        let scale = crate::linalg::vec_max_abs(&comps).max(1.0);
        let res = alternation_residual(dim, degree, &comps);
        let ok = if S::EXACT {
            res == 0.0
        } else {
            res / scale <= ALTERNATION_TOL
        };
        if !ok {
            return Err(GeometryError::NotAlternating { residual: res });
        }
        Ok(Tensor {
            p: degree,
            q: 0,
            dim,
            kind: TensorKind::AlternatingForm,
            comps,
        })
    }

    pub(crate) fn form_unchecked(dim: usize, degree: usize, comps: Vec<S>) -> Self {
        Tensor {
            p: degree,
            q: 0,
            dim,
            kind: TensorKind::AlternatingForm,
            comps,
        }
    }

    pub fn zero_form(dim: usize, degree: usize) -> Self {
        Tensor::form_unchecked(dim, degree, vec![S::zero(); dim.pow(degree as u32)])
    }

    pub fn degree(&self) -> usize {
        self.p
    }

    pub fn as_matrix(&self) -> Mat<S> {
        assert!(
            self.kind == TensorKind::Endomorphism || (self.p == 2 && self.q == 0),
            "matrix view requires an endomorphism or rank-2 covariant tensor"
        );
        Mat {
            rows: self.dim,
            cols: self.dim,
            data: self.comps.clone(),
        }
    }

    pub fn component(&self, idx: &[usize]) -> &S {
        &self.comps[flat_index(self.dim, idx)]
    }

    /// Multilinear evaluation on coefficient vectors (covariant tensors).
    pub fn eval(&self, args: &[&[S]]) -> S {
        assert_eq!(self.q, 0, "eval applies to covariant tensors");
        assert_eq!(args.len(), self.p);
        let mut acc = S::zero();
        for_each_index(self.dim, self.p, |idx| {
            let c = &self.comps[flat_index(self.dim, idx)];
            if c.is_zero() {
                return;
            }
            let mut term = c.clone();
            for (slot, &i) in idx.iter().enumerate() {
                term = term.mul(&args[slot][i]);
            }
            acc = acc.add(&term);
        });
        acc
    }

    pub fn add(&self, rhs: &Tensor<S>) -> Tensor<S> {
        assert_eq!((self.p, self.q, self.dim), (rhs.p, rhs.q, rhs.dim));
        Tensor {
            p: self.p,
            q: self.q,
            dim: self.dim,
            kind: if self.kind == rhs.kind {
                self.kind
            } else {
                TensorKind::General
            },
            comps: self
                .comps
                .iter()
                .zip(&rhs.comps)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &Tensor<S>) -> Tensor<S> {
        self.add(&rhs.scale(&S::one().neg()))
    }

    pub fn scale(&self, c: &S) -> Tensor<S> {
        Tensor {
            p: self.p,
            q: self.q,
            dim: self.dim,
            kind: self.kind,
            comps: self.comps.iter().map(|a| a.mul(c)).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        crate::linalg::vec_max_abs(&self.comps)
    }

    /// Antisymmetry defect over adjacent-slot transpositions.
    pub fn alternation_residual(&self) -> f64 {
        assert_eq!(self.q, 0);
        alternation_residual(self.dim, self.p, &self.comps)
    }
}

fn shuffle_sign(k: usize, mask: usize) -> i32 {
    // Sign of the permutation sorting (selected positions, remaining
    // positions); inversions are pairs (unselected before selected).
    let mut sign = 0usize;
    let mut unselected_seen = 0usize;
    for pos in 0..k {
        if mask & (1 << pos) != 0 {
            sign += unselected_seen;
        } else {
            unselected_seen += 1;
        }
    }
    if sign % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Wedge product with the shuffle convention (no factorial denominators):
/// for a 1-form and 2-form,
/// `(eta ^ Phi)(X,Y,Z) = eta(X)Phi(Y,Z) + eta(Y)Phi(Z,X) + eta(Z)Phi(X,Y)`.
pub fn wedge<S: Scalar>(a: &Tensor<S>, b: &Tensor<S>) -> Result<Tensor<S>, GeometryError> {
    assert_eq!(a.q, 0);
    assert_eq!(b.q, 0);
    if a.dim != b.dim {
        return Err(GeometryError::DimMismatch {
            what: "wedge operands",
            expected: a.dim,
            got: b.dim,
        });
    }
    let (p, q, dim) = (a.p, b.p, a.dim);
    let k = p + q;
    if k > dim {
        return Err(GeometryError::RankOverflow { degree: k, dim });
    }
    let mut comps = vec![S::zero(); dim.pow(k as u32)];
    let masks: Vec<usize> = (0usize..1 << k)
        .filter(|m| m.count_ones() as usize == p)
        .collect();
    for_each_index(dim, k, |idx| {
        let mut acc = S::zero();
        for &mask in &masks {
            let mut ia = Vec::with_capacity(p);
            let mut ib = Vec::with_capacity(q);
            for (pos, &i) in idx.iter().enumerate() {
                if mask & (1 << pos) != 0 {
                    ia.push(i);
                } else {
                    ib.push(i);
                }
            }
            let term = a.comps[flat_index(dim, &ia)].mul(&b.comps[flat_index(dim, &ib)]);
            if shuffle_sign(k, mask) > 0 {
                acc = acc.add(&term);
            } else {
                acc = acc.sub(&term);
            }
        }
        comps[flat_index(dim, idx)] = acc;
    });
    Ok(Tensor::form_unchecked(dim, k, comps))
}

/// Interior product `(v ⌟ a)(X_2,...,X_k) = a(v, X_2, ..., X_k)`.
pub fn interior_product<S: Scalar>(
    v: &[S],
    a: &Tensor<S>,
) -> Result<Tensor<S>, GeometryError> {
    assert_eq!(a.q, 0);
    if a.p == 0 {
        return Err(GeometryError::DegreeZero);
    }
    let dim = a.dim;
    let k = a.p - 1;
    let mut comps = vec![S::zero(); dim.pow(k as u32)];
    for_each_index(dim, k, |idx| {
        let mut acc = S::zero();
        let mut full = Vec::with_capacity(k + 1);
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            full.clear();
            full.push(i);
            full.extend_from_slice(idx);
            acc = acc.add(&vi.mul(&a.comps[flat_index(dim, &full)]));
        }
        comps[flat_index(dim, idx)] = acc;
    });
    Ok(Tensor::form_unchecked(dim, k, comps))
}

/// Returns the cyclic symmetrization `(X,Y,Z) -> f(X,Y,Z)+f(Y,Z,X)+f(Z,X,Y)`.
pub fn cyclic_sum<S: Scalar, F>(f: F) -> impl Fn(&[S], &[S], &[S]) -> S
where
    F: Fn(&[S], &[S], &[S]) -> S,
{
    move |x, y, z| f(x, y, z).add(&f(y, z, x)).add(&f(z, x, y))
}

/// Derivation action of an endomorphism on a tensor.
///
/// Vectors transform as `A x`, covariant slots pick up a minus sign, and
/// endomorphisms transform by the commutator `A φ - φ A`.
pub fn endo_action<S: Scalar>(a: &Mat<S>, s: &Tensor<S>) -> Tensor<S> {
    match s.kind {
        TensorKind::Vector => Tensor::vector(a.apply(&s.comps)),
        TensorKind::Endomorphism => Tensor::endomorphism(a.commutator(&s.as_matrix())),
        _ => {
            let dim = s.dim;
            let k = s.p;
            let mut comps = vec![S::zero(); s.comps.len()];
            for_each_index(dim, k, |idx| {
                let mut acc = S::zero();
                let mut probe = idx.to_vec();
                for slot in 0..k {
                    let orig = idx[slot];
                    for m in 0..dim {
                        let coeff = a.at(m, orig);
                        if coeff.is_zero() {
                            continue;
                        }
                        probe[slot] = m;
                        acc = acc.sub(&s.comps[flat_index(dim, &probe)].mul(coeff));
                    }
                    probe[slot] = orig;
                }
                comps[flat_index(dim, idx)] = acc;
            });
            Tensor {
                p: k,
                q: 0,
                dim,
                kind: s.kind,
                comps,
            }
        }
    }
}

/// Endomorphism associated to a 2-form: `g(A X, Y) = omega(X, Y)`.
pub fn endo_from_two_form<S: Scalar>(fiber: &Fiber<S>, omega: &Tensor<S>) -> Mat<S> {
    assert_eq!(omega.p, 2);
    // g A = -omega as matrices, hence A = -g^{-1} omega.
    let om = omega.as_matrix();
    fiber
        .metric
        .inverse()
        .expect("fiber metric is invertible")
        .matmul(&om)
        .neg()
}

/// 2-form associated to an endomorphism: `omega(X, Y) = g(A X, Y)`.
pub fn two_form_from_endo<S: Scalar>(fiber: &Fiber<S>, a: &Mat<S>) -> Tensor<S> {
    let om = a.transpose().matmul(&fiber.metric);
    Tensor {
        p: 2,
        q: 0,
        dim: fiber.dim,
        kind: TensorKind::AlternatingForm,
        comps: om.data,
    }
}
