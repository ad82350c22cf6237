//! Dense complex operators on the system Hilbert space.
//!
//! Everything downstream is built on one vectorization convention: column
//! stacking, so that `vec(A X B) = (Bᵀ ⊗ A) vec(X)`. nalgebra stores matrices
//! column-major, which makes `vec` a plain copy of the storage.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
pub use num_complex::Complex64 as c64;

use crate::error::{Error, Result};

/// Square complex matrix acting on a `d`-dimensional Hilbert space.
pub type Operator = DMatrix<c64>;
/// Column vector of complex coordinates.
pub type Vector = DVector<c64>;

/// Default absolute comparison tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;

pub const ZERO: c64 = c64 { re: 0.0, im: 0.0 };
pub const ONE: c64 = c64 { re: 1.0, im: 0.0 };
pub const I: c64 = c64 { re: 0.0, im: 1.0 };

#[inline]
pub fn real(x: f64) -> c64 {
    c64::new(x, 0.0)
}

pub fn identity(dim: usize) -> Operator {
    Operator::identity(dim, dim)
}

pub fn zeros(dim: usize) -> Operator {
    Operator::zeros(dim, dim)
}

/// Builds an operator from real diagonal entries.
pub fn diagonal(entries: &[f64]) -> Operator {
    let n = entries.len();
    Operator::from_fn(n, n, |i, j| if i == j { real(entries[i]) } else { ZERO })
}

/// Kronecker product `a ⊗ b`; the first factor indexes the outer blocks.
pub fn kron(a: &Operator, b: &Operator) -> Operator {
    a.kronecker(b)
}

/// Kronecker product of a sequence of factors, left to right.
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a Operator>) -> Operator {
    factors
        .into_iter()
        .fold(Operator::identity(1, 1), |acc, f| acc.kronecker(f))
}

pub fn commutator(a: &Operator, b: &Operator) -> Result<Operator> {
    check_square(a, "commutator")?;
    check_same_dim(a, b, "commutator")?;
    Ok(a * b - b * a)
}

pub fn dagger(a: &Operator) -> Operator {
    a.adjoint()
}

pub fn trace(a: &Operator) -> c64 {
    a.diagonal().iter().sum()
}

pub fn frobenius_norm(a: &Operator) -> f64 {
    a.norm()
}

/// Largest absolute entrywise deviation between `a` and its adjoint.
pub fn hermitian_deviation(a: &Operator) -> f64 {
    if !a.is_square() {
        return f64::INFINITY;
    }
    let n = a.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..=j {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn is_hermitian(a: &Operator, tol: f64) -> bool {
    hermitian_deviation(a) <= tol
}

pub(crate) fn ensure_hermitian(a: &Operator, what: &str, tol: f64) -> Result<()> {
    let deviation = hermitian_deviation(a);
    if deviation <= tol {
        Ok(())
    } else {
        Err(Error::NotHermitian {
            what: what.to_string(),
            deviation,
        })
    }
}

pub(crate) fn check_square(a: &Operator, context: &'static str) -> Result<()> {
    if a.is_square() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            context,
            left: a.nrows(),
            right: a.ncols(),
        })
    }
}

pub(crate) fn check_same_dim(a: &Operator, b: &Operator, context: &'static str) -> Result<()> {
    if a.shape() == b.shape() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            context,
            left: a.nrows(),
            right: b.nrows(),
        })
    }
}

/// Spectral resolution of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// Unitary matrix whose columns are the matching eigenvectors.
    pub vectors: Operator,
}

impl HermitianEigen {
    /// `U diag(f(λ)) U†`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> c64) -> Operator {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (j, &lambda) in self.values.iter().enumerate() {
            let factor = f(lambda);
            for i in 0..n {
                scaled[(i, j)] *= factor;
            }
        }
        scaled * self.vectors.adjoint()
    }

    pub fn reconstruct(&self) -> Operator {
        self.map_spectrum(real)
    }
}

/// Eigendecomposition of a Hermitian matrix with a deterministic ordering.
///
/// Eigenvalues come out ascending. Inside a degenerate cluster, vectors are
/// ordered by the row of their largest-magnitude component and then by that
/// component's phase in `[0, 2π)`.
pub fn hermitian_eig(h: &Operator) -> Result<HermitianEigen> {
    check_square(h, "hermitian_eig")?;
    let scale = h.iter().fold(1.0f64, |m, z| m.max(z.norm()));
    ensure_hermitian(h, "hermitian_eig input", DEFAULT_TOL * scale)?;
    let n = h.nrows();
    if n == 0 {
        return Ok(HermitianEigen {
            values: Vec::new(),
            vectors: Operator::zeros(0, 0),
        });
    }
    let symmetric = (h + h.adjoint()) * real(0.5);
    let eig = symmetric.symmetric_eigen();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let spread = eig.eigenvalues.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let cluster_tol = 1e-12 * spread;
    let key = |col: usize| -> (usize, f64) {
        let column = eig.eigenvectors.column(col);
        let mut best = 0;
        for (i, z) in column.iter().enumerate() {
            if z.norm() > column[best].norm() {
                best = i;
            }
        }
        (best, column[best].arg().rem_euclid(TAU))
    };

    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n
            && eig.eigenvalues[order[end]] - eig.eigenvalues[order[end - 1]] <= cluster_tol
        {
            end += 1;
        }
        if end - start > 1 {
            order[start..end].sort_by(|&a, &b| {
                let (ia, pa) = key(a);
                let (ib, pb) = key(b);
                ia.cmp(&ib).then(pa.total_cmp(&pb))
            });
        }
        start = end;
    }

    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = Operator::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(HermitianEigen { values, vectors })
}

/// Matrix exponential `exp(s·a)`.
///
/// Delegates to nalgebra's scaling-and-squaring Padé implementation. An
/// argument of zero returns the identity exactly.
pub fn expm(a: &Operator, s: f64) -> Result<Operator> {
    check_square(a, "expm")?;
    if !s.is_finite() || a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidArgument(
            "expm needs finite entries and a finite scale".into(),
        ));
    }
    let n = a.nrows();
    if s == 0.0 || n == 0 {
        return Ok(identity(n));
    }
    let scaled = a * real(s);
    let result = scaled.exp();
    if result
        .iter()
        .any(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(Error::Overflow {
            norm: scaled.norm(),
        });
    }
    Ok(result)
}

/// Column-stacking vectorization.
pub fn vec(a: &Operator) -> Vector {
    Vector::from_column_slice(a.as_slice())
}

/// Inverse of [`vec`]; the length must be a perfect square.
pub fn unvec(v: &Vector) -> Result<Operator> {
    let d = perfect_sqrt(v.len()).ok_or_else(|| {
        Error::InvalidArgument(format!("vector length {} is not a perfect square", v.len()))
    })?;
    Ok(Operator::from_column_slice(d, d, v.as_slice()))
}

pub(crate) fn perfect_sqrt(n: usize) -> Option<usize> {
    let mut r = (n as f64).sqrt().round() as usize;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    (r * r == n).then_some(r)
}

/// Superoperator matrix of `X ↦ a X`.
pub fn left_multiplication(a: &Operator) -> Operator {
    kron(&identity(a.nrows()), a)
}

/// Superoperator matrix of `X ↦ X b`.
pub fn right_multiplication(b: &Operator) -> Operator {
    kron(&b.transpose(), &identity(b.nrows()))
}

/// Superoperator matrix of `X ↦ a X b`.
pub fn sandwich(a: &Operator, b: &Operator) -> Operator {
    kron(&b.transpose(), a)
}

pub fn sigma_x() -> Operator {
    Operator::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn sigma_y() -> Operator {
    Operator::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
}

/// `diag(1, -1)`: basis state 0 is the excited state.
pub fn sigma_z() -> Operator {
    diagonal(&[1.0, -1.0])
}

/// Raising operator `|e⟩⟨g|`.
pub fn sigma_plus() -> Operator {
    Operator::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO])
}

/// Lowering operator `|g⟩⟨e|`.
pub fn sigma_minus() -> Operator {
    Operator::from_row_slice(2, 2, &[ZERO, ZERO, ONE, ZERO])
}

/// Truncated annihilation operator on `levels` Fock states.
pub fn annihilation(levels: usize) -> Operator {
    Operator::from_fn(levels, levels, |i, j| {
        if j == i + 1 {
            real((j as f64).sqrt())
        } else {
            ZERO
        }
    })
}

pub fn creation(levels: usize) -> Operator {
    annihilation(levels).adjoint()
}

pub fn number(levels: usize) -> Operator {
    diagonal(&(0..levels).map(|n| n as f64).collect::<Vec<_>>())
}

/// Projector `|k⟩⟨k|` onto a computational basis state.
pub fn basis_projector(dim: usize, k: usize) -> Operator {
    let mut p = zeros(dim);
    p[(k, k)] = ONE;
    p
}
