//! Qubit driven by a field rotating about z,
//! `H(t) = [Omega (cos(delta t) sx + sin(delta t) sy) + delta sz] / 2`,
//! prepared with coherence `c` between the eigenstates of `H(0)`.

use num_complex::Complex64;

use super::WorkProtocol;
use crate::error::{QprobError, Result};
use crate::linalg::{self, c64, outer, sigma_x, sigma_y, sigma_z, CMatrix, CVector};
use crate::state::{DensityOperator, Observable, QuantumChannel};

/// Parameters of the driven-qubit protocol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrivenQubit {
    pub omega: f64,
    pub delta: f64,
    /// population of the lower level of `H(0)`
    pub p: f64,
    /// real coherence between the two levels of `H(0)`
    pub c: f64,
    pub t: f64,
}

impl DrivenQubit {
    /// Level splitting `sqrt(delta^2 + Omega^2)`.
    pub fn gap(&self) -> f64 {
        self.delta.hypot(self.omega)
    }

    pub fn hamiltonian(&self, t: f64) -> CMatrix {
        let (s, c) = (self.delta * t).sin_cos();
        (sigma_x() * c64(self.omega * c, 0.0) + sigma_y() * c64(self.omega * s, 0.0) + sigma_z() * c64(self.delta, 0.0))
            * c64(0.5, 0.0)
    }

    /// `exp(-i delta sz t/2) exp(-i Omega sx t/2)`
    pub fn propagator(&self) -> Result<CMatrix> {
        let a = linalg::expm_hermitian(&sigma_z(), c64(0.0, -self.delta * self.t / 2.0))?;
        let b = linalg::expm_hermitian(&sigma_x(), c64(0.0, -self.omega * self.t / 2.0))?;
        Ok(a * b)
    }

    /// Lower and upper eigenvectors of `H(0)`.
    pub fn eigenvectors(&self) -> (CVector, CVector) {
        let phi = self.omega.atan2(self.delta);
        let (s, c) = (phi / 2.0).sin_cos();
        let lower = CVector::from_vec(vec![c64(-s, 0.0), c64(c, 0.0)]);
        let upper = CVector::from_vec(vec![c64(c, 0.0), c64(s, 0.0)]);
        (lower, upper)
    }

    pub fn initial_state(&self) -> Result<DensityOperator> {
        if !(0.0..=1.0).contains(&self.p) || self.c * self.c > self.p * (1.0 - self.p) + 1e-15 {
            return Err(QprobError::NotPositiveSemidefinite {
                reason: format!("c^2 = {:.6} exceeds p(1-p) = {:.6}", self.c * self.c, self.p * (1.0 - self.p)),
            });
        }
        let (lo, up) = self.eigenvectors();
        let cross = outer(&lo, &up);
        let rho = outer(&lo, &lo) * c64(self.p, 0.0)
            + outer(&up, &up) * c64(1.0 - self.p, 0.0)
            + (&cross + cross.adjoint()) * c64(self.c, 0.0);
        DensityOperator::new(rho)
    }
}

pub fn driven_qubit_preset(omega: f64, delta: f64, p: f64, c: f64, t: f64) -> Result<WorkProtocol> {
    let params = DrivenQubit { omega, delta, p, c, t };
    if !(omega.is_finite() && delta.is_finite() && t.is_finite()) || params.gap() == 0.0 {
        return Err(QprobError::InvalidParameter(
            "driven qubit needs finite Omega, delta, t with Omega^2 + delta^2 > 0".into(),
        ));
    }
    WorkProtocol::new(
        Observable::new(params.hamiltonian(0.0), "H(0)")?,
        Observable::new(params.hamiltonian(t), "H(t)")?,
        QuantumChannel::unitary(params.propagator()?)?,
        params.initial_state()?,
    )
}

/// Closed-form `q_if`, row = initial level, column = final level, `0` the lower.
pub fn driven_qubit_analytic(omega: f64, delta: f64, p: f64, c: f64, t: f64) -> CMatrix {
    let d2 = delta * delta + omega * omega;
    let d = d2.sqrt();
    let (s, co) = (omega * t).sin_cos();
    let (sh, ch) = (omega * t / 2.0).sin_cos();
    let i = Complex64::i();
    let a = p * delta + c * omega;
    let b = (1.0 - p) * delta - c * omega;
    let q_mm = (p * (delta * delta + 2.0 * omega * omega) - c * delta * omega + delta * a * co
        + i * c * delta * d * s)
        / (2.0 * d2);
    let q_mp = delta * sh * (-i * c * ch / d + a * sh / d2);
    let q_pm = (delta * b * (1.0 - co) - i * c * delta * d * s) / (2.0 * d2);
    let q_pp = ((1.0 - p) * (delta * delta + 2.0 * omega * omega) + c * delta * omega + delta * b * co
        + i * c * delta * d * s)
        / (2.0 * d2);
    CMatrix::from_row_slice(2, 2, &[q_mm, q_mp, q_pm, q_pp])
}
