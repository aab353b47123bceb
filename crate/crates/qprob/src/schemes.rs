//! Simulated measurement schemes: weak two-point measurement, Ramsey
//! interferometry on an auxiliary qubit, and a Gaussian pointer detector.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{QprobError, Result};
use crate::linalg::{self, c64, identity, kron, max_abs, trace_product, CMatrix, ZERO};
use crate::quasiprob::{self, coalesce, AtomDistribution, NdqpTable};
use crate::state::{DensityOperator, Observable, QuantumChannel};
use crate::tol;

fn ensure_projector(p: &CMatrix) -> Result<()> {
    linalg::check_square(p)?;
    let residual = max_abs(&(p * p - p)).max(linalg::hermiticity_residual(p));
    if residual > tol::PROJECTOR_TOL {
        return Err(QprobError::NotAProjector { residual });
    }
    Ok(())
}

/// `tr[Pi^H_s2 (Pi rho Pi + Pi^perp rho Pi^perp)]`, the probability of the
/// second outcome after a non-selective binary measurement `{Pi, 1 - Pi}`.
pub fn wtpm_probability(
    rho: &DensityOperator,
    pi1: &CMatrix,
    channel: &QuantumChannel,
    pi2: &CMatrix,
) -> Result<f64> {
    ensure_projector(pi1)?;
    ensure_projector(pi2)?;
    let n = rho.dim();
    linalg::check_same_dim("wTPM projector", n, pi1)?;
    let perp = identity(n) - pi1;
    let post = pi1 * rho.matrix() * pi1 + &perp * rho.matrix() * &perp;
    let h = channel.heisenberg(pi2)?;
    Ok(trace_product(&h, &post).re)
}

/// `p + (p_s2 - w) / 2`
pub fn mhq_from_wtpm(p_joint: f64, p_s2: f64, w: f64) -> f64 {
    p_joint + 0.5 * (p_s2 - w)
}

/// Margenau-Hill table rebuilt from measurable probabilities only: the TPM
/// joint, the unperturbed final marginal and the wTPM probabilities.
pub fn mhq_table_via_wtpm(
    rho: &DensityOperator,
    o1: &Observable,
    channel: &QuantumChannel,
    o2: &Observable,
) -> Result<DMatrix<f64>> {
    let p = quasiprob::tpm_joint(rho, o1, channel, o2)?;
    let ph = quasiprob::heisenberg_projectors(channel, o2)?;
    let mut out = DMatrix::zeros(o1.len(), o2.len());
    for i in 0..o1.len() {
        for (j, h) in ph.iter().enumerate() {
            let p_s2 = trace_product(h, rho.matrix()).re;
            let w = wtpm_probability(rho, o1.projector(i), channel, o2.projector(j))?;
            out[(i, j)] = mhq_from_wtpm(p[(i, j)], p_s2, w);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RamseySample {
    pub u: f64,
    pub sx: f64,
    pub sy: f64,
}

impl RamseySample {
    pub fn value(&self) -> Complex64 {
        c64(self.sx, self.sy)
    }
}

/// Auxiliary-qubit expectations `<sigma^x>`, `<sigma^y>` over a grid of `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct RamseyReadout {
    pub samples: Vec<RamseySample>,
}

/// Runs the interferometer on `system (x) ancilla` for one value of `u`.
///
/// Circuit: Hadamard on the ancilla, `exp(-iu O1)` on the system controlled by
/// ancilla `|0>`, the channel on the system, `exp(-iu O2)` controlled by
/// ancilla `|1>`, then `sigma^x` on the ancilla.
fn ramsey_point(
    rho: &DensityOperator,
    o1: &Observable,
    channel: &QuantumChannel,
    o2: &Observable,
    u: f64,
) -> RamseySample {
    let n = rho.dim();
    let id_s = identity(n);
    let id_a = identity(2);
    let p0 = linalg::diag(&[1.0, 0.0]);
    let p1 = linalg::diag(&[0.0, 1.0]);
    let had = (linalg::sigma_x() + linalg::sigma_z()) * c64(std::f64::consts::FRAC_1_SQRT_2, 0.0);

    let e1 = o1.spectrum.map(|v| c64(0.0, -u * v).exp());
    let e2 = o2.spectrum.map(|v| c64(0.0, -u * v).exp());

    let gates = [
        kron(&id_s, &had),
        kron(&e1, &p0) + kron(&id_s, &p1),
    ];
    let mut state = kron(rho.matrix(), &p0);
    for g in &gates {
        state = g * &state * g.adjoint();
    }
    let mut evolved = CMatrix::zeros(2 * n, 2 * n);
    for k in channel.kraus_ops() {
        let kk = kron(&k, &id_a);
        evolved += &kk * &state * kk.adjoint();
    }
    let f2 = kron(&id_s, &p0) + kron(&e2, &p1);
    let flip = kron(&id_s, &linalg::sigma_x());
    let g = flip * f2;
    let fin = &g * evolved * g.adjoint();

    let sx = trace_product(&fin, &kron(&id_s, &linalg::sigma_x())).re;
    let sy = trace_product(&fin, &kron(&id_s, &linalg::sigma_y())).re;
    RamseySample { u, sx, sy }
}

pub fn ramsey_simulate(
    rho: &DensityOperator,
    o1: &Observable,
    channel: &QuantumChannel,
    o2: &Observable,
    u_grid: &[f64],
) -> Result<RamseyReadout> {
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
    let samples = u_grid
        .par_iter()
        .map(|&u| ramsey_point(rho, o1, channel, o2, u))
        .collect();
    Ok(RamseyReadout { samples })
}

/// `4 * len(atoms)` points uniform on `[0, 2 pi / gap)`, with `gap` the
/// smallest spacing between candidate atom values.
pub fn default_u_grid(atom_values: &[f64]) -> Vec<f64> {
    let mut vals = atom_values.to_vec();
    vals.sort_by(f64::total_cmp);
    let gap = vals
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|g| *g > 0.0)
        .fold(f64::INFINITY, f64::min);
    let span = if gap.is_finite() { 2.0 * std::f64::consts::PI / gap } else { 1.0 };
    let m = 4 * vals.len().max(1);
    (0..m).map(|j| span * j as f64 / m as f64).collect()
}

/// Atom weights recovered from a readout by least squares on a known support.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub distribution: AtomDistribution,
    pub residual: f64,
    pub condition: f64,
}

/// Solves `G(u_j) = sum_a w_a exp(i u_j v_a)` for the weights `w_a`.
pub fn reconstruct_distribution(readout: &RamseyReadout, atom_values: &[f64]) -> Result<Reconstruction> {
    let m = readout.samples.len();
    let k = atom_values.len();
    if k == 0 {
        return Err(QprobError::EmptyDistribution);
    }
    if m < k {
        return Err(QprobError::InvalidParameter(format!(
            "{m} u-points cannot resolve {k} atoms"
        )));
    }
    let a = CMatrix::from_fn(m, k, |j, i| c64(0.0, readout.samples[j].u * atom_values[i]).exp());
    let b = CMatrix::from_fn(m, 1, |j, _| readout.samples[j].value());
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if condition > tol::MAX_CONDITION {
        return Err(QprobError::IllConditionedGrid { condition });
    }
    let w = svd
        .solve(&b, 0.0)
        .map_err(|e| QprobError::InvalidParameter(e.to_string()))?;
    let residual = linalg::frobenius(&(&a * &w - &b));
    let atoms = atom_values
        .iter()
        .zip(w.iter())
        .map(|(&v, &wt)| (v, wt))
        .collect();
    Ok(Reconstruction {
        distribution: AtomDistribution::from_pairs(atoms, 0.0)?,
        residual,
        condition,
    })
}

/// Pointer coupling `kappa`, momentum offset `p0` and position width `sigma`
/// of the detector, with the position grid `(x_min, x_max, n_points)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorSpec {
    pub kappa: f64,
    pub p0: f64,
    pub sigma: f64,
    pub grid: (f64, f64, usize),
}

impl DetectorSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0) {
            return Err(QprobError::InvalidParameter("sigma must be positive".into()));
        }
        if self.grid.2 < 2 || !(self.grid.1 > self.grid.0) {
            return Err(QprobError::InvalidParameter("position grid needs two or more points".into()));
        }
        Ok(())
    }

    pub fn xs(&self) -> Vec<f64> {
        let (a, b, n) = self.grid;
        (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PositionDistribution {
    pub xs: Vec<f64>,
    pub density: Vec<f64>,
}

impl PositionDistribution {
    pub fn integral(&self) -> f64 {
        trapezoid(&self.xs, &self.density)
    }

    /// Mass on `x > 0` minus mass on `x < 0`.
    pub fn asymmetry(&self) -> f64 {
        let signed: Vec<f64> = self
            .xs
            .iter()
            .zip(&self.density)
            .map(|(&x, p)| if x == 0.0 { 0.0 } else { x.signum() * p })
            .collect();
        trapezoid(&self.xs, &signed)
    }
}

fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

/// `sum q(s1,s1',s2) exp(i kappa p0 [o_s2 - (o_s1 + o_s1')/2])`
pub fn detector_phase_from(table: &NdqpTable, kappa_p0: f64) -> Complex64 {
    let mut acc = ZERO;
    for a in 0..table.n1() {
        for b in 0..table.n1() {
            for s2 in 0..table.n2() {
                let shift = table.outcomes2[s2] - 0.5 * (table.outcomes1[a] + table.outcomes1[b]);
                acc += table.get(a, b, s2) * c64(0.0, kappa_p0 * shift).exp();
            }
        }
    }
    acc
}

pub fn detector_phase(
    rho: &DensityOperator,
    o1: &Observable,
    channel: &QuantumChannel,
    o2: &Observable,
    kappa_p0: f64,
) -> Result<Complex64> {
    Ok(detector_phase_from(&quasiprob::ndqp(rho, o1, channel, o2)?, kappa_p0))
}

/// Real quasi-distribution of `o_s2 - (o_s1 + o_s1')/2`, pairing `(s1, s1')`
/// with `(s1', s1)` so that imaginary parts cancel.
pub fn ndqp_distribution(
    rho: &DensityOperator,
    o1: &Observable,
    channel: &QuantumChannel,
    o2: &Observable,
) -> Result<AtomDistribution> {
    let t = quasiprob::ndqp(rho, o1, channel, o2)?;
    let mut pairs = Vec::new();
    let scale = t
        .outcomes1
        .iter()
        .chain(&t.outcomes2)
        .fold(0.0f64, |m, v| m.max(v.abs()));
    for a in 0..t.n1() {
        for b in a..t.n1() {
            for s2 in 0..t.n2() {
                let v = t.outcomes2[s2] - 0.5 * (t.outcomes1[a] + t.outcomes1[b]);
                let w = if a == b {
                    t.get(a, a, s2).re
                } else {
                    (t.get(a, b, s2) + t.get(b, a, s2)).re
                };
                pairs.push((v, c64(w, 0.0)));
            }
        }
    }
    let mut dist = AtomDistribution {
        atoms: coalesce(pairs, tol::COALESCE_TOL * scale),
    };
    dist.prune(quasiprob::NULL_WEIGHT);
    Ok(dist)
}

/// Pointer wave packet `g(x) = (2 pi sigma^2)^(-1/4) exp(-x^2 / (4 sigma^2))`.
pub fn pointer(x: f64, sigma: f64) -> f64 {
    (2.0 * std::f64::consts::PI * sigma * sigma).powf(-0.25) * (-x * x / (4.0 * sigma * sigma)).exp()
}

/// Pointer position density `P(x) = sum q(s1,s1',s2) g(x - k do) g(x - k do')`.
pub fn detector_position(
    rho: &DensityOperator,
    o1: &Observable,
    channel: &QuantumChannel,
    o2: &Observable,
    spec: &DetectorSpec,
) -> Result<PositionDistribution> {
    spec.validate()?;
    let t = quasiprob::ndqp(rho, o1, channel, o2)?;
    let xs = spec.xs();
    let density: Vec<f64> = xs
        .par_iter()
        .map(|&x| {
            let mut acc = ZERO;
            for a in 0..t.n1() {
                for b in 0..t.n1() {
                    for s2 in 0..t.n2() {
                        let da = t.outcomes2[s2] - t.outcomes1[a];
                        let db = t.outcomes2[s2] - t.outcomes1[b];
                        let g = pointer(x - spec.kappa * da, spec.sigma)
                            * pointer(x - spec.kappa * db, spec.sigma);
                        acc += t.get(a, b, s2) * g;
                    }
                }
            }
            acc.re
        })
        .collect();
    let dist = PositionDistribution { xs, density };
    let outside = 1.0 - dist.integral();
    if outside > tol::GRID_MASS_TOL {
        return Err(QprobError::GridTooNarrow { outside });
    }
    Ok(dist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{diag, sigma_x, sigma_z};

    fn qubit(rho01: Complex64) -> DensityOperator {
        DensityOperator::new(CMatrix::from_row_slice(
            2,
            2,
            &[c64(0.5, 0.0), rho01, rho01.conj(), c64(0.5, 0.0)],
        ))
        .unwrap()
    }

    #[test]
    fn wtpm_commuting_limit_is_marginal() {
        let rho = DensityOperator::new(diag(&[0.2, 0.8])).unwrap();
        let x = Observable::new(sigma_x(), "x").unwrap();
        let id = QuantumChannel::identity(2);
        let w = wtpm_probability(&rho, &diag(&[1.0, 0.0]), &id, x.projector(1)).unwrap();
        assert!((w - 0.5).abs() < 1e-15);
        assert!(matches!(
            wtpm_probability(&rho, &diag(&[0.5, 0.0]), &id, x.projector(1)),
            Err(QprobError::NotAProjector { .. })
        ));
    }

    #[test]
    fn wtpm_affine_combination() {
        assert_eq!(mhq_from_wtpm(0.3, 0.4, 0.4), 0.3);
    }

    #[test]
    fn ramsey_zero_u_is_unity() {
        let rho = qubit(c64(0.2, 0.1));
        let z = Observable::new(sigma_z(), "z").unwrap();
        let x = Observable::new(sigma_x(), "x").unwrap();
        let r = ramsey_simulate(&rho, &z, &QuantumChannel::identity(2), &x, &[0.0]).unwrap();
        assert!((r.samples[0].sx - 1.0).abs() < 1e-14 && r.samples[0].sy.abs() < 1e-14);
    }

    #[test]
    fn single_atom_reconstruction() {
        let readout = RamseyReadout {
            samples: (0..5)
                .map(|j| {
                    let u = 0.3 * j as f64;
                    let g = c64(0.0, 1.5 * u).exp();
                    RamseySample { u, sx: g.re, sy: g.im }
                })
                .collect(),
        };
        let r = reconstruct_distribution(&readout, &[1.5]).unwrap();
        assert!((r.distribution.atoms[0].weight - c64(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn degenerate_grid_is_rejected() {
        let readout = RamseyReadout {
            samples: vec![RamseySample { u: 0.0, sx: 1.0, sy: 0.0 }; 4],
        };
        assert!(matches!(
            reconstruct_distribution(&readout, &[-1.0, 1.0]),
            Err(QprobError::IllConditionedGrid { .. })
        ));
    }

    #[test]
    fn detector_needs_wide_grid() {
        let rho = qubit(c64(0.3, 0.0));
        let z = Observable::new(sigma_z(), "z").unwrap();
        let x = Observable::new(sigma_x(), "x").unwrap();
        let spec = DetectorSpec {
            kappa: 1.0,
            p0: 1.0,
            sigma: 0.6,
            grid: (-1.0, 1.0, 201),
        };
        let err = detector_position(&rho, &z, &QuantumChannel::identity(2), &x, &spec).unwrap_err();
        assert!(matches!(err, QprobError::GridTooNarrow { .. }));
    }

    #[test]
    fn pointer_is_normalised() {
        let xs: Vec<f64> = (0..4001).map(|i| -10.0 + 0.005 * i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| pointer(x, 0.7).powi(2)).collect();
        assert!((trapezoid(&xs, &ys) - 1.0).abs() < 1e-12);
    }
}
