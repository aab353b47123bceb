//! Small worked setups: the qubit measured along z then x, the spin-1 weak
//! two-point measurement, and the Gaussian detector.

use num_complex::Complex64;

use crate::error::{QprobError, Result};
use crate::linalg::{c64, diag, sigma_x, sigma_z, CMatrix, CVector, ONE, ZERO};
use crate::quasiprob::{self, NdqpTable, Ordering, OutcomePairTable};
use crate::schemes::DetectorSpec;
use crate::state::{DensityOperator, Observable, QuantumChannel};

/// Initial state, first observable, channel, second observable.
#[derive(Debug, Clone)]
pub struct TwoTimeSetup {
    pub rho: DensityOperator,
    pub o1: Observable,
    pub channel: QuantumChannel,
    pub o2: Observable,
}

impl TwoTimeSetup {
    pub fn new(rho: DensityOperator, o1: Observable, channel: QuantumChannel, o2: Observable) -> Result<Self> {
        let n = rho.dim();
        for (context, found) in [("O1", o1.dim()), ("channel", channel.dim()), ("O2", o2.dim())] {
            if found != n {
                return Err(QprobError::DimensionMismatch {
                    context,
                    expected: n,
                    found,
                });
            }
        }
        Ok(TwoTimeSetup { rho, o1, channel, o2 })
    }

    pub fn kdq(&self, ordering: Ordering) -> Result<OutcomePairTable> {
        quasiprob::kdq(&self.rho, &self.o1, &self.channel, &self.o2, ordering)
    }

    pub fn ndqp(&self) -> Result<NdqpTable> {
        quasiprob::ndqp(&self.rho, &self.o1, &self.channel, &self.o2)
    }

    pub fn characteristic(&self, u: Complex64) -> Result<Complex64> {
        quasiprob::characteristic(&self.rho, &self.o1, &self.channel, &self.o2, u)
    }
}

/// `rho = diag(rho00, rho11)` plus the coherence `rho01`.
pub fn qubit_state(rho01: Complex64, rho11: f64) -> Result<DensityOperator> {
    let rho00 = 1.0 - rho11;
    if !(0.0..=1.0).contains(&rho11) || rho01.norm_sqr() > rho00 * rho11 + 1e-15 {
        return Err(QprobError::NotPositiveSemidefinite {
            reason: format!("|rho01|^2 = {:.6} exceeds rho00*rho11 = {:.6}", rho01.norm_sqr(), rho00 * rho11),
        });
    }
    DensityOperator::new(CMatrix::from_row_slice(
        2,
        2,
        &[c64(rho00, 0.0), rho01, rho01.conj(), c64(rho11, 0.0)],
    ))
}

/// Spin-1/2 measured along z and then along x with no evolution in between.
/// The z outcomes are labelled `-1` for `|0>` and `+1` for `|1>`.
pub fn stern_gerlach(rho01: Complex64, rho11: f64) -> Result<TwoTimeSetup> {
    TwoTimeSetup::new(
        qubit_state(rho01, rho11)?,
        Observable::new(diag(&[-1.0, 1.0]), "z")?,
        QuantumChannel::identity(2),
        Observable::new(sigma_x(), "x")?,
    )
}

/// Same measurement sequence with the standard `sigma^z` (`|0>` has `+1`),
/// on the state `I/2 + chi`.
pub fn qubit_ramsey(rho01: Complex64) -> Result<TwoTimeSetup> {
    TwoTimeSetup::new(
        qubit_state(rho01, 0.5)?,
        Observable::new(sigma_z(), "sigma_z")?,
        QuantumChannel::identity(2),
        Observable::new(sigma_x(), "sigma_x")?,
    )
}

pub fn spin1_sz() -> CMatrix {
    diag(&[1.0, 0.0, -1.0])
}

pub fn spin1_sx() -> CMatrix {
    let r = c64(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    CMatrix::from_row_slice(3, 3, &[ZERO, r, ZERO, r, ZERO, r, ZERO, r, ZERO])
}

/// Spin-1 measured along z then x on `(0, -1, 1)/sqrt2`.
pub fn spin1_wtpm() -> Result<TwoTimeSetup> {
    let psi = CVector::from_vec(vec![ZERO, -ONE, ONE]);
    TwoTimeSetup::new(
        DensityOperator::pure(&psi)?,
        Observable::new(spin1_sz(), "S_z")?,
        QuantumChannel::identity(3),
        Observable::new(spin1_sx(), "S_x")?,
    )
}

/// Qubit of [`qubit_ramsey`] read out by a Gaussian pointer.
pub fn gaussian_detector(rho01: Complex64, kappa: f64, sigma: f64, p0: f64) -> Result<(TwoTimeSetup, DetectorSpec)> {
    let half_width = 2.0 * kappa.abs() + 10.0 * sigma;
    let n = 2001;
    Ok((
        qubit_ramsey(rho01)?,
        DetectorSpec {
            kappa,
            p0,
            sigma,
            grid: (-half_width, half_width, n),
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_positive_qubits() {
        assert!(qubit_state(c64(0.6, 0.0), 0.5).is_err());
        assert!(qubit_state(c64(0.5, 0.0), 0.5).is_ok());
    }

    #[test]
    fn spin1_branch_order() {
        let s = spin1_wtpm().unwrap();
        assert_eq!(s.o1.values(), vec![-1.0, 0.0, 1.0]);
        let v = s.o2.values();
        assert!((v[0] + 1.0).abs() < 1e-12 && v[1].abs() < 1e-12 && (v[2] - 1.0).abs() < 1e-12);
    }
}
