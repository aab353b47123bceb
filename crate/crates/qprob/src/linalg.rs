//! Dense complex matrix algebra and Hermitian spectral decompositions.
//!
//! Every operator in the crate is a [`CMatrix`]. The eigensolver itself is
//! nalgebra's Hermitian QR iteration; degeneracy grouping, ordering and
//! projector assembly happen here.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{QprobError, Result};
use crate::tol;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

pub fn sigma_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn sigma_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
}

pub fn sigma_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

/// Real diagonal matrix.
pub fn diag(values: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_iterator(
        values.len(),
        values.iter().map(|&v| c64(v, 0.0)),
    ))
}

/// `|a><b|`
pub fn outer(a: &CVector, b: &CVector) -> CMatrix {
    a * b.adjoint()
}

pub fn check_square(a: &CMatrix) -> Result<usize> {
    if a.nrows() != a.ncols() || a.nrows() == 0 {
        return Err(QprobError::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(QprobError::NonFinite);
    }
    Ok(a.nrows())
}

pub fn check_same_dim(context: &'static str, expected: usize, a: &CMatrix) -> Result<()> {
    if a.nrows() != expected || a.ncols() != expected {
        return Err(QprobError::DimensionMismatch {
            context,
            expected,
            found: a.nrows().max(a.ncols()),
        });
    }
    Ok(())
}

/// Largest entrywise modulus.
pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().fold(0.0, |m, z| m.max(z.norm()))
}

pub fn frobenius(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `max |H - H^dagger|` over entries.
pub fn hermiticity_residual(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn ensure_hermitian(a: &CMatrix, tol: f64) -> Result<()> {
    check_square(a)?;
    let residual = hermiticity_residual(a);
    if residual > tol {
        return Err(QprobError::NonHermitianInput { residual });
    }
    Ok(())
}

pub fn dagger(a: &CMatrix) -> CMatrix {
    a.adjoint()
}

pub fn trace(a: &CMatrix) -> Complex64 {
    a.diagonal().iter().sum()
}

/// `tr(AB)` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for j in 0..a.ncols() {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

pub fn matmul(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    if a.ncols() != b.nrows() {
        return Err(QprobError::DimensionMismatch {
            context: "matmul",
            expected: a.ncols(),
            found: b.nrows(),
        });
    }
    Ok(a * b)
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    Ok(matmul(a, b)? - matmul(b, a)?)
}

pub fn anticommutator(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    Ok(matmul(a, b)? + matmul(b, a)?)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// One eigenvalue together with the orthogonal projector onto its eigenspace.
#[derive(Debug, Clone)]
pub struct Branch {
    pub value: f64,
    pub projector: CMatrix,
    pub rank: usize,
}

/// Eigen-branches of a Hermitian operator, strictly ascending in eigenvalue.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub branches: Vec<Branch>,
    pub source_dim: usize,
}

impl SpectralDecomposition {
    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    pub fn values(&self) -> Vec<f64> {
        self.branches.iter().map(|b| b.value).collect()
    }

    pub fn projectors(&self) -> impl Iterator<Item = &CMatrix> {
        self.branches.iter().map(|b| &b.projector)
    }

    /// `sum_b f(lambda_b) Pi_b`
    pub fn map<F: Fn(f64) -> Complex64>(&self, f: F) -> CMatrix {
        let n = self.source_dim;
        let mut out = CMatrix::zeros(n, n);
        for b in &self.branches {
            out += &b.projector * f(b.value);
        }
        out
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.map(|v| c64(v, 0.0))
    }

    /// Builds a decomposition from user-supplied `(value, projector)` pairs,
    /// checking orthogonality and completeness. Pairs are sorted ascending.
    pub fn from_projectors(mut pairs: Vec<(f64, CMatrix)>, tol: f64) -> Result<Self> {
        let n = match pairs.first() {
            Some((_, p)) => check_square(p)?,
            None => return Err(QprobError::InvalidParameter("empty spectrum".into())),
        };
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut sum = CMatrix::zeros(n, n);
        for (i, (_, p)) in pairs.iter().enumerate() {
            check_same_dim("projector", n, p)?;
            let idem = max_abs(&(p * p - p)).max(hermiticity_residual(p));
            if idem > tol {
                return Err(QprobError::NotAProjector { residual: idem });
            }
            for (_, q) in pairs.iter().skip(i + 1) {
                let overlap = max_abs(&(p * q));
                if overlap > tol {
                    return Err(QprobError::NotAProjector { residual: overlap });
                }
            }
            sum += p;
        }
        let completeness = frobenius(&(sum - identity(n)));
        if completeness > tol {
            return Err(QprobError::NotAProjector {
                residual: completeness,
            });
        }
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(QprobError::InvalidParameter(
                    "repeated eigenvalue label; merge the projectors".into(),
                ));
            }
        }
        let branches = pairs
            .into_iter()
            .map(|(value, projector)| {
                let rank = trace(&projector).re.round() as usize;
                Branch {
                    value,
                    projector,
                    rank,
                }
            })
            .collect();
        Ok(SpectralDecomposition {
            branches,
            source_dim: n,
        })
    }
}

/// Eigen-decomposition of a Hermitian matrix with degenerate eigenvalues merged.
///
/// Two consecutive eigenvalues land in the same branch when they differ by at
/// most `group_tol * max(1, |lambda|)`.
pub fn hermitian_eig(h: &CMatrix, group_tol: f64) -> Result<SpectralDecomposition> {
    ensure_hermitian(h, tol::HERMITIAN_TOL)?;
    let n = h.nrows();
    let sym = (h + h.adjoint()) * c64(0.5, 0.0);
    let eig = sym.symmetric_eigen();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let mut branches: Vec<Branch> = Vec::new();
    let mut members: Vec<usize> = Vec::new();
    let flush = |members: &mut Vec<usize>, branches: &mut Vec<Branch>| {
        if members.is_empty() {
            return;
        }
        let mut projector = CMatrix::zeros(n, n);
        let mut mean = 0.0;
        for &m in members.iter() {
            let v = eig.eigenvectors.column(m);
            projector += v * v.adjoint();
            mean += eig.eigenvalues[m];
        }
        branches.push(Branch {
            value: mean / members.len() as f64,
            projector,
            rank: members.len(),
        });
        members.clear();
    };
    for &idx in &order {
        if let Some(&last) = members.last() {
            let prev = eig.eigenvalues[last];
            let cur = eig.eigenvalues[idx];
            if (cur - prev).abs() > group_tol * prev.abs().max(1.0) {
                flush(&mut members, &mut branches);
            }
        }
        members.push(idx);
    }
    flush(&mut members, &mut branches);
    Ok(SpectralDecomposition {
        branches,
        source_dim: n,
    })
}

/// `exp(c H)` for Hermitian `H` and complex `c`, evaluated spectrally.
pub fn expm_hermitian(h: &CMatrix, c: Complex64) -> Result<CMatrix> {
    let spec = hermitian_eig(h, tol::GROUP_TOL)?;
    Ok(spec.map(|v| (c * v).exp()))
}

/// `max |U^dagger U - I|`
pub fn unitarity_residual(u: &CMatrix) -> f64 {
    max_abs(&(u.adjoint() * u - identity(u.nrows())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
        max_abs(&(a - b)) < tol
    }

    #[test]
    fn sigma_z_branches() {
        let s = hermitian_eig(&sigma_z(), tol::GROUP_TOL).unwrap();
        assert_eq!(s.values(), vec![-1.0, 1.0]);
        assert!(close(&s.branches[0].projector, &diag(&[0.0, 1.0]), 1e-14));
        assert!(close(&s.branches[1].projector, &diag(&[1.0, 0.0]), 1e-14));
    }

    #[test]
    fn identity_is_one_branch() {
        let s = hermitian_eig(&identity(5), 1e-9).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.branches[0].rank, 5);
        assert!(close(&s.branches[0].projector, &identity(5), 1e-12));
    }

    #[test]
    fn spin1_sx_spectrum() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let sx = CMatrix::from_row_slice(
            3,
            3,
            &[
                ZERO,
                c64(r, 0.0),
                ZERO,
                c64(r, 0.0),
                ZERO,
                c64(r, 0.0),
                ZERO,
                c64(r, 0.0),
                ZERO,
            ],
        );
        let s = hermitian_eig(&sx, 1e-9).unwrap();
        let v = s.values();
        assert!((v[0] + 1.0).abs() < 1e-12 && v[1].abs() < 1e-12 && (v[2] - 1.0).abs() < 1e-12);
        // eigenvector for +1 is (1, sqrt2, 1)/2
        let e = CVector::from_vec(vec![c64(0.5, 0.0), c64(r, 0.0), c64(0.5, 0.0)]);
        assert!(close(&s.branches[2].projector, &outer(&e, &e), 1e-12));
    }

    #[test]
    fn degenerate_branch_has_rank_two() {
        let s = hermitian_eig(&diag(&[2.0, -1.0, 2.0]), 1e-9).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.branches[1].rank, 2);
    }

    #[test]
    fn non_hermitian_rejected() {
        let mut m = sigma_x();
        m[(0, 1)] = c64(2.0, 0.0);
        match hermitian_eig(&m, 1e-9) {
            Err(QprobError::NonHermitianInput { residual }) => assert!((residual - 1.0).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn exponentials() {
        let u = 0.37;
        let e = expm_hermitian(&sigma_z(), c64(0.0, -u)).unwrap();
        let want = CMatrix::from_row_slice(2, 2, &[c64(0.0, -u).exp(), ZERO, ZERO, c64(0.0, u).exp()]);
        assert!(close(&e, &want, 1e-14));
        assert!(close(&expm_hermitian(&sigma_x(), ZERO).unwrap(), &identity(2), 1e-14));
        let half_pi = expm_hermitian(&sigma_x(), c64(0.0, -std::f64::consts::FRAC_PI_2)).unwrap();
        assert!(close(&half_pi, &(sigma_x() * -I), 1e-14));
    }

    #[test]
    fn pauli_algebra() {
        let c = commutator(&sigma_x(), &sigma_y()).unwrap();
        assert!(close(&c, &(sigma_z() * c64(0.0, 2.0)), 1e-15));
        let a = anticommutator(&sigma_x(), &sigma_x()).unwrap();
        assert!(close(&a, &(identity(2) * c64(2.0, 0.0)), 1e-15));
        let k = kron(&sigma_z(), &identity(2));
        assert_eq!(k.nrows(), 4);
        assert!(trace(&k).norm() < 1e-15);
    }

    #[test]
    fn matmul_checks_dimensions() {
        let err = matmul(&identity(2), &identity(3)).unwrap_err();
        assert!(matches!(err, QprobError::DimensionMismatch { .. }));
    }

    #[test]
    fn from_projectors_rejects_incomplete_sets() {
        let p = diag(&[1.0, 0.0]);
        assert!(SpectralDecomposition::from_projectors(vec![(0.0, p)], 1e-10).is_err());
    }
}
