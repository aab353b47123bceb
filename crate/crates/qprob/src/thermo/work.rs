use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{QprobError, Result};
use crate::linalg::{self, c64, trace_product, CMatrix};
use crate::quasiprob::{self, AtomDistribution, Ordering, OutcomePairTable};
use crate::state::{self, DensityOperator, Observable, QuantumChannel};
use crate::tol;

/// A two-time work protocol: measure `h1`, apply `channel`, measure `h2`.
#[derive(Debug, Clone)]
pub struct WorkProtocol {
    pub h1: Observable,
    pub h2: Observable,
    pub channel: QuantumChannel,
    pub rho: DensityOperator,
}

impl WorkProtocol {
    pub fn new(h1: Observable, h2: Observable, channel: QuantumChannel, rho: DensityOperator) -> Result<Self> {
        let n = rho.dim();
        for (context, found) in [("H1", h1.dim()), ("H2", h2.dim()), ("channel", channel.dim())] {
            if found != n {
                return Err(QprobError::DimensionMismatch {
                    context,
                    expected: n,
                    found,
                });
            }
        }
        Ok(WorkProtocol { h1, h2, channel, rho })
    }

    pub fn dim(&self) -> usize {
        self.rho.dim()
    }

    /// `Phi^dagger[H2]`
    pub fn h2_heisenberg(&self) -> Result<CMatrix> {
        self.channel.heisenberg(&self.h2.matrix)
    }
}

/// KDQ table over `(E_i, E_f)`.
pub fn work_table(protocol: &WorkProtocol) -> Result<OutcomePairTable> {
    quasiprob::kdq(&protocol.rho, &protocol.h1, &protocol.channel, &protocol.h2, Ordering::Kdq1)
}

/// Quasiprobability distribution of `W = E_f - E_i`.
pub fn work_distribution(protocol: &WorkProtocol) -> Result<AtomDistribution> {
    work_table(protocol)?.distribution()
}

/// `-ln(Z2/Z1)/beta`; at `beta = 0` the limit `(tr H2 - tr H1)/d`.
pub fn free_energy_difference(h1: &Observable, h2: &Observable, beta: f64) -> Result<f64> {
    if !beta.is_finite() {
        return Err(QprobError::InvalidParameter("beta must be finite".into()));
    }
    if beta == 0.0 {
        if h1.dim() != h2.dim() {
            return Err(QprobError::InvalidParameter(
                "free energy difference at beta = 0 diverges for unequal dimensions".into(),
            ));
        }
        let d = h1.dim() as f64;
        return Ok((linalg::trace(&h2.matrix).re - linalg::trace(&h1.matrix).re) / d);
    }
    Ok(-(state::log_partition(h2, beta) - state::log_partition(h1, beta)) / beta)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JarzynskiTpm {
    /// `<exp(-beta W)>` over the TPM distribution
    pub lhs: f64,
    /// `exp(-beta dF) gamma`
    pub rhs: f64,
    pub gamma: f64,
    pub delta_f: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JarzynskiKdq {
    /// `<exp(-beta W)>` over the KDQ distribution
    pub lhs: Complex64,
    /// `exp(-beta dF) Gamma`
    pub rhs: Complex64,
    pub correction: Complex64,
    pub delta_f: f64,
}

/// `(rho_th)^{-1}`, rejecting states whose smallest eigenvalue underflows.
fn inverse_thermal(h: &Observable, beta: f64) -> Result<CMatrix> {
    let ln_z = state::log_partition(h, beta);
    let ln_min = h
        .spectrum
        .branches
        .iter()
        .map(|b| -beta * b.value - ln_z)
        .fold(f64::INFINITY, f64::min);
    if ln_min < tol::MIN_THERMAL_EIGENVALUE.ln() {
        return Err(QprobError::SingularThermalState {
            min_eigenvalue: ln_min.exp(),
        });
    }
    Ok(h.spectrum.map(|v| c64((beta * v + ln_z).exp(), 0.0)))
}

/// `tr[(rho_th1)^{-1} X Phi^dagger[rho_th2]]`
fn thermal_sandwich(protocol: &WorkProtocol, x: &CMatrix, beta: f64) -> Result<Complex64> {
    let inv = inverse_thermal(&protocol.h1, beta)?;
    let th2 = protocol.channel.heisenberg(state::gibbs_state(&protocol.h2, beta)?.matrix())?;
    Ok(trace_product(&(inv * x), &th2))
}

fn z_ratio(protocol: &WorkProtocol, beta: f64) -> f64 {
    (state::log_partition(&protocol.h2, beta) - state::log_partition(&protocol.h1, beta)).exp()
}

pub fn jarzynski_tpm(protocol: &WorkProtocol, beta: f64) -> Result<JarzynskiTpm> {
    let table = work_table(protocol)?;
    let mut lhs = 0.0;
    for (i, ei) in table.outcomes1.iter().enumerate() {
        for (f, ef) in table.outcomes2.iter().enumerate() {
            lhs += table.p_tpm[(i, f)] * (-beta * (ef - ei)).exp();
        }
    }
    let dephased = state::dephase(&protocol.rho, &protocol.h1)?;
    let gamma = thermal_sandwich(protocol, dephased.matrix(), beta)?.re;
    Ok(JarzynskiTpm {
        lhs,
        rhs: z_ratio(protocol, beta) * gamma,
        gamma,
        delta_f: free_energy_difference(&protocol.h1, &protocol.h2, beta)?,
    })
}

pub fn jarzynski_kdq(protocol: &WorkProtocol, beta: f64) -> Result<JarzynskiKdq> {
    let table = work_table(protocol)?;
    let lhs = table.characteristic(c64(0.0, beta));
    let correction = thermal_sandwich(protocol, protocol.rho.matrix(), beta)?;
    Ok(JarzynskiKdq {
        lhs,
        rhs: correction * z_ratio(protocol, beta),
        correction,
        delta_f: free_energy_difference(&protocol.h1, &protocol.h2, beta)?,
    })
}

/// First moment of the KDQ work distribution.
pub fn average_work(protocol: &WorkProtocol) -> Result<f64> {
    let table = work_table(protocol)?;
    Ok(first_moment(&table, &table.q.map(|z| z.re)))
}

/// `tr[Phi[rho] H2] - tr[rho H1]`, without any intermediate measurement.
pub fn unperturbed_work(protocol: &WorkProtocol) -> Result<f64> {
    let evolved = protocol.channel.apply_operator(protocol.rho.matrix())?;
    Ok(trace_product(&evolved, &protocol.h2.matrix).re - protocol.rho.expectation(&protocol.h1.matrix).re)
}

pub fn extractable_work(protocol: &WorkProtocol) -> Result<f64> {
    Ok(-average_work(protocol)?)
}

fn first_moment(table: &OutcomePairTable, w: &DMatrix<f64>) -> f64 {
    let mut acc = 0.0;
    for (i, ei) in table.outcomes1.iter().enumerate() {
        for (f, ef) in table.outcomes2.iter().enumerate() {
            acc += w[(i, f)] * (ef - ei);
        }
    }
    acc
}

#[derive(Debug, Clone)]
pub struct ExtractionBoundReport {
    pub avg_work_kdq: f64,
    pub avg_work_tpm: f64,
    pub classical_bound: f64,
    /// `Lambda_if`, zero where `p_if p_f` vanishes
    pub activities: DMatrix<f64>,
    /// Activities are only meaningful for pure states and rank-1 branches.
    pub activity_available: bool,
    pub violation: bool,
}

impl ExtractionBoundReport {
    pub fn extractable_kdq(&self) -> f64 {
        -self.avg_work_kdq
    }

    pub fn extractable_tpm(&self) -> f64 {
        -self.avg_work_tpm
    }
}

pub fn classical_bound(protocol: &WorkProtocol) -> Result<ExtractionBoundReport> {
    let table = work_table(protocol)?;
    let evolved = protocol.channel.apply_operator(protocol.rho.matrix())?;
    let p_final: Vec<f64> = protocol
        .h2
        .spectrum
        .projectors()
        .map(|p| trace_product(p, &evolved).re)
        .collect();
    let (n1, n2) = table.shape();
    let mut bound = 0.0;
    let mut activities = DMatrix::zeros(n1, n2);
    for (i, ei) in table.outcomes1.iter().enumerate() {
        for (f, ef) in table.outcomes2.iter().enumerate() {
            let joint = table.p_tpm[(i, f)].max(0.0) * p_final[f].max(0.0);
            let root = joint.sqrt();
            if ei >= ef {
                bound += (ei - ef) * root;
            }
            if joint > 1e-12 {
                activities[(i, f)] = table.q[(i, f)].re / root;
            }
        }
    }
    let rho = protocol.rho.matrix();
    let purity = trace_product(rho, rho).re;
    let rank_one = protocol.h1.spectrum.branches.iter().all(|b| b.rank == 1)
        && protocol.h2.spectrum.branches.iter().all(|b| b.rank == 1);
    let avg_work_kdq = first_moment(&table, &table.mhq());
    Ok(ExtractionBoundReport {
        avg_work_kdq,
        avg_work_tpm: first_moment(&table, &table.p_tpm),
        classical_bound: bound,
        activities,
        activity_available: rank_one && (purity - 1.0).abs() < 1e-10,
        violation: -avg_work_kdq > bound + 1e-10,
    })
}

/// Complex work variance and its decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorkVariance {
    /// `<W^2> - <W>^2` over the KDQ distribution
    pub variance: Complex64,
    pub re: f64,
    pub im: f64,
    /// `Delta H1^2 + Delta H2^2 - 2 Cov`, with `Delta H2^2 = <Phi^dagger[H2^2]> - <Phi^dagger[H2]>^2`
    pub re_from_covariance: f64,
    /// `-i tr[rho [H1, Phi^dagger[H2]]]`
    pub im_from_commutator: f64,
    /// `2 Delta H1 Delta B` with `B = Phi^dagger[H2]`
    pub robertson_bound: f64,
    pub tpm_variance: f64,
}

pub fn work_variance(protocol: &WorkProtocol) -> Result<WorkVariance> {
    let table = work_table(protocol)?;
    let dist = table.distribution()?;
    let variance = dist.variance();

    let rho = &protocol.rho;
    let h1 = &protocol.h1.matrix;
    let b = protocol.h2_heisenberg()?;
    let b_sq = protocol.channel.heisenberg(&(&protocol.h2.matrix * &protocol.h2.matrix))?;
    let m1 = rho.expectation(h1).re;
    let mb = rho.expectation(&b).re;
    let var1 = rho.expectation(&(h1 * h1)).re - m1 * m1;
    let var2 = rho.expectation(&b_sq).re - mb * mb;
    let var_b = (rho.expectation(&(&b * &b)).re - mb * mb).max(0.0);
    let cov = 0.5 * rho.expectation(&linalg::anticommutator(h1, &b)?).re - m1 * mb;
    let comm = rho.expectation(&linalg::commutator(h1, &b)?);

    let tpm = table.tpm_distribution()?.variance().re;
    Ok(WorkVariance {
        variance,
        re: variance.re,
        im: variance.im,
        re_from_covariance: var1 + var2 - 2.0 * cov,
        im_from_commutator: (c64(0.0, -1.0) * comm).re,
        robertson_bound: 2.0 * var1.max(0.0).sqrt() * var_b.sqrt(),
        tpm_variance: tpm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{sigma_x, sigma_z};

    fn qubit(h1: CMatrix, h2: CMatrix, rho: DensityOperator, u: CMatrix) -> WorkProtocol {
        WorkProtocol::new(
            Observable::new(h1, "H1").unwrap(),
            Observable::new(h2, "H2").unwrap(),
            QuantumChannel::unitary(u).unwrap(),
            rho,
        )
        .unwrap()
    }

    #[test]
    fn identity_protocol_has_single_atom() {
        let rho = DensityOperator::maximally_mixed(2);
        let p = qubit(sigma_x(), sigma_x(), rho, linalg::identity(2));
        let d = work_distribution(&p).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.atoms[0].value, 0.0);
        assert!(average_work(&p).unwrap().abs() < 1e-15);
    }

    #[test]
    fn free_energy_of_rescaled_qubit() {
        let h1 = Observable::new(sigma_z(), "z").unwrap();
        let h2 = Observable::new(sigma_z() * c64(2.0, 0.0), "2z").unwrap();
        let df = free_energy_difference(&h1, &h2, 1.0).unwrap();
        let expected = -((2.0f64).cosh() / 1.0f64.cosh()).ln();
        assert!((df - expected).abs() < 1e-14);
        assert_eq!(free_energy_difference(&h1, &h1, 0.7).unwrap(), 0.0);
        assert_eq!(free_energy_difference(&h1, &h2, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn thermal_unitary_gives_unit_efficacy() {
        let h1 = Observable::new(sigma_z(), "z").unwrap();
        let rho = state::gibbs_state(&h1, 0.8).unwrap();
        let u = linalg::expm_hermitian(&sigma_x(), c64(0.0, -0.4)).unwrap();
        let p = qubit(sigma_z(), sigma_x() * c64(1.5, 0.0), rho, u);
        let tpm = jarzynski_tpm(&p, 0.8).unwrap();
        let kdq = jarzynski_kdq(&p, 0.8).unwrap();
        assert!((tpm.gamma - 1.0).abs() < 1e-12);
        assert!((kdq.correction - c64(1.0, 0.0)).norm() < 1e-12);
        assert!((tpm.lhs - tpm.rhs).abs() < 1e-12);
    }

    #[test]
    fn beta_zero_is_trivial() {
        let rho = state::gibbs_state(&Observable::new(sigma_x(), "x").unwrap(), 1.0).unwrap();
        let u = linalg::expm_hermitian(&sigma_x(), c64(0.0, -0.3)).unwrap();
        let p = qubit(sigma_z(), sigma_z(), rho, u);
        let j = jarzynski_tpm(&p, 0.0).unwrap();
        assert!((j.lhs - 1.0).abs() < 1e-15 && (j.rhs - 1.0).abs() < 1e-15 && (j.gamma - 1.0).abs() < 1e-15);
    }

    #[test]
    fn huge_beta_is_rejected() {
        let p = qubit(
            sigma_z() * c64(500.0, 0.0),
            sigma_z(),
            DensityOperator::maximally_mixed(2),
            linalg::identity(2),
        );
        assert!(matches!(
            jarzynski_kdq(&p, 1.0),
            Err(QprobError::SingularThermalState { .. })
        ));
    }

    #[test]
    fn commuting_protocol_has_real_variance() {
        let rho = state::gibbs_state(&Observable::new(sigma_z(), "z").unwrap(), 0.3).unwrap();
        let p = qubit(sigma_z(), sigma_z() * c64(3.0, 0.0), rho, linalg::identity(2));
        let v = work_variance(&p).unwrap();
        assert!(v.im.abs() < 1e-15);
        assert!((v.re - v.tpm_variance).abs() < 1e-12);
    }
}
