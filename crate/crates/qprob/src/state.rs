//! Density operators, observables and channels.

use num_complex::Complex64;

use crate::error::{QprobError, Result};
use crate::linalg::{
    self, c64, check_same_dim, check_square, hermitian_eig, max_abs, CMatrix, CVector,
    SpectralDecomposition,
};
use crate::tol;

/// Hermitian, positive semidefinite, unit trace.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    matrix: CMatrix,
}

impl DensityOperator {
    /// Validates `matrix`. Eigenvalues in `[-1e-10, 0)` are clipped to zero and
    /// the result renormalised; anything more negative is rejected.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let n = check_square(&matrix)?;
        let herm = linalg::hermiticity_residual(&matrix);
        if herm > tol::DENSITY_TOL {
            return Err(QprobError::NonHermitianInput { residual: herm });
        }
        let tr = linalg::trace(&matrix);
        let trace_err = (tr - Complex64::new(1.0, 0.0)).norm();
        if trace_err > tol::DENSITY_TOL {
            return Err(QprobError::InvalidDensity {
                reason: "trace differs from 1",
                residual: trace_err,
            });
        }
        let spec = hermitian_eig(&matrix, tol::GROUP_TOL)?;
        let min = spec.branches[0].value;
        if min < -tol::DENSITY_TOL {
            return Err(QprobError::InvalidDensity {
                reason: "negative eigenvalue",
                residual: -min,
            });
        }
        if min < 0.0 {
            let clipped = spec.map(|v| c64(v.max(0.0), 0.0));
            let norm = linalg::trace(&clipped).re;
            let matrix = clipped / c64(norm, 0.0);
            debug_assert_eq!(matrix.nrows(), n);
            return Ok(DensityOperator { matrix });
        }
        Ok(DensityOperator { matrix })
    }

    pub fn pure(psi: &CVector) -> Result<Self> {
        let norm = psi.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(QprobError::InvalidParameter("zero state vector".into()));
        }
        let v = psi / c64(norm, 0.0);
        Self::new(linalg::outer(&v, &v))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityOperator {
            matrix: linalg::identity(dim) / c64(dim as f64, 0.0),
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn expectation(&self, a: &CMatrix) -> Complex64 {
        linalg::trace_product(&self.matrix, a)
    }
}

/// A Hermitian operator together with its degeneracy-grouped spectrum.
#[derive(Debug, Clone)]
pub struct Observable {
    pub matrix: CMatrix,
    pub spectrum: SpectralDecomposition,
    pub label: String,
}

impl Observable {
    pub fn new(matrix: CMatrix, label: impl Into<String>) -> Result<Self> {
        Self::with_group_tol(matrix, label, tol::GROUP_TOL)
    }

    pub fn with_group_tol(matrix: CMatrix, label: impl Into<String>, group_tol: f64) -> Result<Self> {
        let spectrum = hermitian_eig(&matrix, group_tol)?;
        Ok(Observable {
            matrix,
            spectrum,
            label: label.into(),
        })
    }

    /// Observable assembled from explicit `(value, projector)` pairs.
    pub fn from_projectors(pairs: Vec<(f64, CMatrix)>, label: impl Into<String>) -> Result<Self> {
        let spectrum = SpectralDecomposition::from_projectors(pairs, 1e-10)?;
        Ok(Observable {
            matrix: spectrum.reconstruct(),
            spectrum,
            label: label.into(),
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn values(&self) -> Vec<f64> {
        self.spectrum.values()
    }

    pub fn projector(&self, s: usize) -> &CMatrix {
        &self.spectrum.branches[s].projector
    }

    pub fn len(&self) -> usize {
        self.spectrum.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spectrum.is_empty()
    }
}

/// CPTP map in unitary or Kraus form.
#[derive(Debug, Clone)]
pub enum QuantumChannel {
    Unitary(CMatrix),
    Kraus(Vec<CMatrix>),
}

impl QuantumChannel {
    pub fn unitary(u: CMatrix) -> Result<Self> {
        check_square(&u)?;
        let residual = linalg::unitarity_residual(&u);
        if residual > tol::UNITARY_TOL {
            return Err(QprobError::InvalidChannel {
                reason: "U is not unitary",
                residual,
            });
        }
        Ok(QuantumChannel::Unitary(u))
    }

    pub fn kraus(ops: Vec<CMatrix>) -> Result<Self> {
        let first = ops
            .first()
            .ok_or_else(|| QprobError::InvalidParameter("empty Kraus list".into()))?;
        let n = first.nrows();
        let mut sum = CMatrix::zeros(n, n);
        for k in &ops {
            check_same_dim("Kraus operator", n, k)?;
            sum += k.adjoint() * k;
        }
        let residual = max_abs(&(sum - linalg::identity(n)));
        if residual > tol::KRAUS_TOL {
            return Err(QprobError::InvalidChannel {
                reason: "Kraus operators are not complete",
                residual,
            });
        }
        Ok(QuantumChannel::Kraus(ops))
    }

    pub fn identity(dim: usize) -> Self {
        QuantumChannel::Unitary(linalg::identity(dim))
    }

    /// `exp(-iHt)`
    pub fn evolution(h: &CMatrix, t: f64) -> Result<Self> {
        Ok(QuantumChannel::Unitary(linalg::expm_hermitian(h, c64(0.0, -t))?))
    }

    /// Complete dephasing in the eigenbasis of `o`.
    pub fn dephasing(o: &Observable) -> Self {
        QuantumChannel::Kraus(o.spectrum.projectors().cloned().collect())
    }

    pub fn dim(&self) -> usize {
        match self {
            QuantumChannel::Unitary(u) => u.nrows(),
            QuantumChannel::Kraus(k) => k[0].nrows(),
        }
    }

    pub fn as_unitary(&self) -> Option<&CMatrix> {
        match self {
            QuantumChannel::Unitary(u) => Some(u),
            QuantumChannel::Kraus(_) => None,
        }
    }

    pub fn kraus_ops(&self) -> Vec<CMatrix> {
        match self {
            QuantumChannel::Unitary(u) => vec![u.clone()],
            QuantumChannel::Kraus(k) => k.clone(),
        }
    }

    /// Heisenberg-picture action, `sum_k K^dagger A K`.
    pub fn heisenberg(&self, a: &CMatrix) -> Result<CMatrix> {
        check_same_dim("heisenberg", self.dim(), a)?;
        Ok(match self {
            QuantumChannel::Unitary(u) => u.adjoint() * a * u,
            QuantumChannel::Kraus(ks) => {
                let mut out = CMatrix::zeros(a.nrows(), a.ncols());
                for k in ks {
                    out += k.adjoint() * a * k;
                }
                out
            }
        })
    }

    /// Schrodinger-picture action on an arbitrary operator, `sum_k K X K^dagger`.
    pub fn apply_operator(&self, x: &CMatrix) -> Result<CMatrix> {
        check_same_dim("apply_channel", self.dim(), x)?;
        Ok(match self {
            QuantumChannel::Unitary(u) => u * x * u.adjoint(),
            QuantumChannel::Kraus(ks) => {
                let mut out = CMatrix::zeros(x.nrows(), x.ncols());
                for k in ks {
                    out += k * x * k.adjoint();
                }
                out
            }
        })
    }

    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        DensityOperator::new(self.apply_operator(rho.matrix())?)
    }
}

/// `exp(-beta H) / Z`
pub fn gibbs_state(h: &Observable, beta: f64) -> Result<DensityOperator> {
    if !beta.is_finite() {
        return Err(QprobError::InvalidParameter("beta must be finite".into()));
    }
    let e0 = h.spectrum.branches[0].value;
    // shift by the ground energy so large beta does not overflow
    let unnorm = h.spectrum.map(|v| c64((-beta * (v - e0)).exp(), 0.0));
    let z = linalg::trace(&unnorm).re;
    DensityOperator::new(unnorm / c64(z, 0.0))
}

/// `ln tr exp(-beta H)`, computed stably.
pub fn log_partition(h: &Observable, beta: f64) -> f64 {
    let e0 = h.spectrum.branches[0].value;
    let z: f64 = h
        .spectrum
        .branches
        .iter()
        .map(|b| b.rank as f64 * (-beta * (b.value - e0)).exp())
        .sum();
    z.ln() - beta * e0
}

/// `sum_s Pi_s rho Pi_s`
pub fn dephase(rho: &DensityOperator, o: &Observable) -> Result<DensityOperator> {
    Ok(DensityOperator {
        matrix: dephase_matrix(rho.matrix(), o)?,
    })
}

pub(crate) fn dephase_matrix(x: &CMatrix, o: &Observable) -> Result<CMatrix> {
    check_same_dim("dephase", o.dim(), x)?;
    let mut out = CMatrix::zeros(x.nrows(), x.ncols());
    for p in o.spectrum.projectors() {
        out += p * x * p;
    }
    Ok(out)
}

/// `chi = rho - D[rho]`, the coherences of `rho` in the eigenbasis of `o`.
pub fn coherence_part(rho: &DensityOperator, o: &Observable) -> Result<CMatrix> {
    Ok(rho.matrix() - dephase_matrix(rho.matrix(), o)?)
}

pub fn heisenberg(channel: &QuantumChannel, a: &CMatrix) -> Result<CMatrix> {
    channel.heisenberg(a)
}

pub fn apply_channel(channel: &QuantumChannel, rho: &DensityOperator) -> Result<DensityOperator> {
    channel.apply(rho)
}

/// Partial trace of a bipartite operator on `dims = (d_a, d_b)`; keeps `a` when
/// `keep_first` is set.
pub fn partial_trace(x: &CMatrix, dims: (usize, usize), keep_first: bool) -> Result<CMatrix> {
    let (da, db) = dims;
    check_same_dim("partial_trace", da * db, x)?;
    let d = if keep_first { da } else { db };
    let mut out = CMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let mut acc = Complex64::new(0.0, 0.0);
            if keep_first {
                for k in 0..db {
                    acc += x[(i * db + k, j * db + k)];
                }
            } else {
                for k in 0..da {
                    acc += x[(k * db + i, k * db + j)];
                }
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{diag, sigma_x, sigma_z, ONE, ZERO};

    fn close(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
        max_abs(&(a - b)) < tol
    }

    fn plus() -> CVector {
        CVector::from_vec(vec![ONE, ONE]) / c64(2f64.sqrt(), 0.0)
    }

    #[test]
    fn gibbs_limits() {
        let z = Observable::new(sigma_z(), "z").unwrap();
        let g0 = gibbs_state(&z, 0.0).unwrap();
        assert!(close(g0.matrix(), &diag(&[0.5, 0.5]), 1e-15));
        let b = 0.8;
        let g = gibbs_state(&z, b).unwrap();
        let zsum = 2.0 * b.cosh();
        assert!(close(g.matrix(), &diag(&[(-b).exp() / zsum, b.exp() / zsum]), 1e-14));
        let comm = linalg::commutator(g.matrix(), &z.matrix).unwrap();
        assert!(max_abs(&comm) < 1e-10);
    }

    #[test]
    fn large_beta_does_not_overflow() {
        let z = Observable::new(sigma_z() * c64(50.0, 0.0), "z").unwrap();
        let g = gibbs_state(&z, 100.0).unwrap();
        assert!((g.matrix()[(1, 1)].re - 1.0).abs() < 1e-15);
        assert!((log_partition(&z, 100.0) - 5000.0).abs() < 1e-9);
    }

    #[test]
    fn dephasing_and_coherences() {
        let z = Observable::new(sigma_z(), "z").unwrap();
        let rho01 = c64(0.2, -0.1);
        let m = CMatrix::from_row_slice(2, 2, &[c64(0.5, 0.0), rho01, rho01.conj(), c64(0.5, 0.0)]);
        let rho = DensityOperator::new(m.clone()).unwrap();
        assert!(close(dephase(&rho, &z).unwrap().matrix(), &diag(&[0.5, 0.5]), 1e-15));
        let chi = coherence_part(&rho, &z).unwrap();
        let want = CMatrix::from_row_slice(2, 2, &[ZERO, rho01, rho01.conj(), ZERO]);
        assert!(close(&chi, &want, 1e-15));
        assert!(linalg::trace(&chi).norm() < 1e-12);

        let p = DensityOperator::pure(&plus()).unwrap();
        assert!(close(&coherence_part(&p, &z).unwrap(), &(sigma_x() * c64(0.5, 0.0)), 1e-15));
        assert!(close(dephase(&p, &z).unwrap().matrix(), &diag(&[0.5, 0.5]), 1e-15));

        let d = DensityOperator::new(diag(&[0.3, 0.7])).unwrap();
        assert!(close(dephase(&d, &z).unwrap().matrix(), d.matrix(), 1e-15));
        assert!(max_abs(&coherence_part(&d, &z).unwrap()) == 0.0);
    }

    #[test]
    fn heisenberg_action() {
        let z = Observable::new(sigma_z(), "z").unwrap();
        let deph = QuantumChannel::dephasing(&z);
        assert!(max_abs(&deph.heisenberg(&sigma_x()).unwrap()) < 1e-15);
        let id = QuantumChannel::identity(2);
        assert!(close(&id.heisenberg(&sigma_x()).unwrap(), &sigma_x(), 1e-15));
        assert!(close(&deph.heisenberg(&linalg::identity(2)).unwrap(), &linalg::identity(2), 1e-12));
    }

    #[test]
    fn invalid_inputs() {
        assert!(DensityOperator::new(diag(&[1.2, -0.2])).is_err());
        assert!(DensityOperator::new(diag(&[0.5, 0.4])).is_err());
        assert!(QuantumChannel::unitary(diag(&[1.0, 2.0])).is_err());
        assert!(QuantumChannel::kraus(vec![diag(&[1.0, 0.0])]).is_err());
    }

    #[test]
    fn tiny_negative_eigenvalues_are_clipped() {
        let rho = DensityOperator::new(diag(&[1.0 + 5e-11, -5e-11])).unwrap();
        assert!(rho.matrix()[(1, 1)].re >= 0.0);
        assert!((linalg::trace(rho.matrix()).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn partial_traces() {
        let a = diag(&[0.3, 0.7]);
        let b = diag(&[0.9, 0.1]);
        let ab = linalg::kron(&a, &b);
        assert!(close(&partial_trace(&ab, (2, 2), true).unwrap(), &a, 1e-15));
        assert!(close(&partial_trace(&ab, (2, 2), false).unwrap(), &b, 1e-15));
    }
}
