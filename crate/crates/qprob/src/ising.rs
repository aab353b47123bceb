//! Work quasiprobabilities for a sudden quench `lambda0 -> lambda1` of the
//! periodic transverse-field Ising chain, built mode by mode.
//!
//! The chain maps to free fermions with `k = 2 pi m / N`. Each pair `(k, -k)`
//! with `0 < k < pi` contributes an independent six-transition table; the
//! unpaired `k = pi` mode keeps its occupation and contributes two. The
//! initial state is `p |Psi_G><Psi_G| + (1-p) rho_G` taken pair by pair,
//! which is exact at `p = 0` and `p = 1`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{QprobError, Result};
use crate::linalg::{self, c64, kron, outer, CMatrix, CVector, ONE, ZERO};
use crate::quasiprob::{self, AtomDistribution, Ordering};
use crate::state::{DensityOperator, Observable, QuantumChannel};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsingQuenchSpec {
    pub n: usize,
    pub lambda0: f64,
    pub lambda1: f64,
    pub beta: f64,
    /// weight of the coherent Gibbs state
    pub p: f64,
}

impl IsingQuenchSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n % 2 == 1 {
            return Err(QprobError::InvalidParameter(format!(
                "chain length must be even and positive, got {}",
                self.n
            )));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(QprobError::InvalidParameter(format!("p = {} outside [0, 1]", self.p)));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(QprobError::InvalidParameter(format!("beta = {} must be finite and >= 0", self.beta)));
        }
        if !(self.lambda0.is_finite() && self.lambda1.is_finite()) {
            return Err(QprobError::InvalidParameter("fields must be finite".into()));
        }
        Ok(())
    }

    pub fn with_p(&self, p: f64) -> Self {
        IsingQuenchSpec { p, ..*self }
    }
}

/// `eps_k(lambda) = 2 sqrt(sin^2 k + (lambda - cos k)^2)`
pub fn dispersion(k: f64, lambda: f64) -> f64 {
    2.0 * k.sin().hypot(lambda - k.cos())
}

/// `theta_k` with `exp(i theta_k) = (lambda - exp(-ik)) / |lambda - exp(-ik)|`.
pub fn bogoliubov_angle(k: f64, lambda: f64) -> Result<f64> {
    if dispersion(k, lambda) < 1e-14 {
        return Err(QprobError::UndefinedAngle { k, lambda });
    }
    Ok(k.sin().atan2(lambda - k.cos()))
}

/// `Delta_k = theta_k(lambda1) - theta_k(lambda0)`
pub fn angle_difference(k: f64, lambda0: f64, lambda1: f64) -> Result<f64> {
    Ok(bogoliubov_angle(k, lambda1)? - bogoliubov_angle(k, lambda0)?)
}

/// Positive quasimomenta `2 pi m / N`, `m = 1..=N/2`; the last one is `pi`.
pub fn quasimomenta(n: usize) -> Result<Vec<f64>> {
    if n == 0 || n % 2 == 1 {
        return Err(QprobError::InvalidParameter(format!(
            "chain length must be even and positive, got {n}"
        )));
    }
    Ok((1..=n / 2).map(|m| 2.0 * PI * m as f64 / n as f64).collect())
}

fn is_unpaired(k: f64) -> bool {
    (k - PI).abs() < 1e-12
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeTransition {
    /// `"mn->m'n'"` occupations of `(k, -k)` before and after
    pub label: &'static str,
    pub w: f64,
    pub q: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeTransitionTable {
    pub k: f64,
    pub eps0: f64,
    pub eps1: f64,
    pub delta_k: f64,
    pub zk: f64,
    pub entries: Vec<ModeTransition>,
}

impl ModeTransitionTable {
    pub fn total(&self) -> f64 {
        self.entries.iter().map(|e| e.q).sum()
    }

    pub fn mean(&self) -> f64 {
        self.entries.iter().map(|e| e.q * e.w).sum()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.entries.iter().map(|e| e.q * e.w * e.w).sum::<f64>() - m * m
    }

    pub fn get(&self, label: &str) -> Option<&ModeTransition> {
        self.entries.iter().find(|e| e.label == label)
    }
}

/// Analytic per-mode table.
pub fn mode_table(k: f64, spec: &IsingQuenchSpec) -> Result<ModeTransitionTable> {
    let (l0, l1, beta, p) = (spec.lambda0, spec.lambda1, spec.beta, spec.p);
    let e0 = dispersion(k, l0);
    let e1 = dispersion(k, l1);
    let delta_k = angle_difference(k, l0, l1)?;
    let zk = 2.0 * (beta * e0 / 2.0).cosh();
    if is_unpaired(k) {
        // the k = pi mode has H = 2 (lambda + 1)(n - 1/2) and keeps n
        let level = |lambda: f64, n: f64| 2.0 * (lambda + 1.0) * (n - 0.5);
        let entries = [("0->0", 0.0), ("1->1", 1.0)]
            .into_iter()
            .map(|(label, n)| ModeTransition {
                label,
                w: level(l1, n) - level(l0, n),
                q: (-beta * level(l0, n)).exp() / zk,
            })
            .collect();
        return Ok(ModeTransitionTable {
            k,
            eps0: e0,
            eps1: e1,
            delta_k,
            zk,
            entries,
        });
    }
    let z2 = zk * zk;
    let (c2, s2) = ((delta_k / 2.0).cos().powi(2), (delta_k / 2.0).sin().powi(2));
    let coh = p * delta_k.sin() / (2.0 * z2);
    let up = (beta * e0).exp() / z2;
    let down = (-beta * e0).exp() / z2;
    let entries = vec![
        ModeTransition { label: "00->00", w: e0 - e1, q: up * c2 - coh },
        ModeTransition { label: "00->11", w: e1 + e0, q: up * s2 + coh },
        ModeTransition { label: "01->01", w: 0.0, q: 1.0 / z2 },
        ModeTransition { label: "10->10", w: 0.0, q: 1.0 / z2 },
        ModeTransition { label: "11->00", w: -e1 - e0, q: down * s2 - coh },
        ModeTransition { label: "11->11", w: e1 - e0, q: down * c2 + coh },
    ];
    Ok(ModeTransitionTable {
        k,
        eps0: e0,
        eps1: e1,
        delta_k,
        zk,
        entries,
    })
}

/// All mode tables in ascending `k`.
pub fn mode_tables(spec: &IsingQuenchSpec) -> Result<Vec<ModeTransitionTable>> {
    spec.validate()?;
    quasimomenta(spec.n)?
        .par_iter()
        .map(|&k| mode_table(k, spec))
        .collect()
}

pub fn assemble_distribution(spec: &IsingQuenchSpec) -> Result<AtomDistribution> {
    assemble_distribution_with_cap(spec, tol::ATOM_CAP)
}

/// Convolves the mode tables in ascending `k`, coalescing after every step.
pub fn assemble_distribution_with_cap(spec: &IsingQuenchSpec, cap: usize) -> Result<AtomDistribution> {
    let tables = mode_tables(spec)?;
    let scale = tables
        .iter()
        .fold(0.0f64, |m, t| m.max(t.eps0).max(t.eps1));
    let coalesce_tol = tol::COALESCE_TOL * scale.max(1.0);
    let mut atoms = vec![quasiprob::Atom { value: 0.0, weight: ONE }];
    for table in &tables {
        let mut next = Vec::with_capacity(atoms.len() * table.entries.len());
        for a in &atoms {
            for e in &table.entries {
                next.push((a.value + e.w, a.weight * e.q));
            }
        }
        atoms = quasiprob::coalesce(next, coalesce_tol);
        if atoms.len() > cap {
            return Err(QprobError::AtomExplosion { count: atoms.len(), cap });
        }
    }
    Ok(AtomDistribution { atoms })
}

/// Mean and variance from the additive per-mode cumulants.
pub fn mode_cumulants(spec: &IsingQuenchSpec) -> Result<(f64, f64)> {
    let tables = mode_tables(spec)?;
    Ok(tables
        .iter()
        .fold((0.0, 0.0), |(m, v), t| (m + t.mean(), v + t.variance())))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentRow {
    pub p: f64,
    pub mean: f64,
    pub variance: f64,
}

/// First two moments of the assembled distribution for each `p`.
pub fn moments_sweep(spec: &IsingQuenchSpec, p_values: &[f64]) -> Result<Vec<MomentRow>> {
    p_values
        .iter()
        .map(|&p| {
            let dist = assemble_distribution(&spec.with_p(p))?;
            Ok(MomentRow {
                p,
                mean: dist.mean().re,
                variance: dist.variance().re,
            })
        })
        .collect()
}

/// Histogram of an atom distribution on `bins` equal-width bins spanning its
/// support; returns `(bin centre, summed real weight)`.
pub fn histogram(dist: &AtomDistribution, bins: usize) -> Vec<(f64, f64)> {
    let (lo, hi) = match (dist.atoms.first(), dist.atoms.last()) {
        (Some(a), Some(b)) => (a.value, b.value),
        _ => return Vec::new(),
    };
    let bins = bins.max(1);
    let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let mut out: Vec<(f64, f64)> = (0..bins).map(|b| (lo + (b as f64 + 0.5) * width, 0.0)).collect();
    for a in &dist.atoms {
        let b = (((a.value - lo) / width) as usize).min(bins - 1);
        out[b].1 += a.weight.re;
    }
    out
}

// Dense two-mode oracle. Basis |n_k n_-k>, index 2 n_k + n_-k, empty = 0.

fn lowering() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO])
}

/// `(c_k, c_-k)` on the two-mode Fock space via Jordan-Wigner.
fn pair_operators() -> (CMatrix, CMatrix) {
    let id = linalg::identity(2);
    let parity = linalg::diag(&[1.0, -1.0]);
    (kron(&lowering(), &id), kron(&parity, &lowering()))
}

/// Quasiparticle operators `(gamma_k, gamma_-k)` at field `lambda`. The phase
/// of `gamma_-k` is fixed so that the vacua of different fields are related
/// by real amplitudes.
fn quasiparticles(k: f64, lambda: f64) -> Result<(CMatrix, CMatrix)> {
    let theta = bogoliubov_angle(k, lambda)?;
    let (ck, cm) = pair_operators();
    let (s, c) = (theta / 2.0).sin_cos();
    let i = Complex64::i();
    let gk = &ck * c64(c, 0.0) - cm.adjoint() * (i * s);
    let gm = (&cm * c64(c, 0.0) + ck.adjoint() * (i * s)) * i;
    Ok((gk, gm))
}

/// `H_k = eps (gamma_k^+ gamma_k + gamma_-k^+ gamma_-k - 1)`
fn pair_hamiltonian(k: f64, lambda: f64) -> Result<CMatrix> {
    let (gk, gm) = quasiparticles(k, lambda)?;
    let eps = dispersion(k, lambda);
    Ok((gk.adjoint() * &gk + gm.adjoint() * &gm - linalg::identity(4)) * c64(eps, 0.0))
}

/// Fock states `|00>, |01>, |10>, |11>` of the quasiparticles at `lambda`,
/// index `2 m + n` for `m` quanta at `k` and `n` at `-k`.
fn quasiparticle_fock(k: f64, lambda: f64) -> Result<Vec<CVector>> {
    let (gk, gm) = quasiparticles(k, lambda)?;
    let h = pair_hamiltonian(k, lambda)?;
    let spec = linalg::hermitian_eig(&h, tol::GROUP_TOL)?;
    let ground = &spec.branches[0];
    if ground.rank != 1 {
        return Err(QprobError::UndefinedAngle { k, lambda });
    }
    // any non-zero column of the rank-1 projector is the vacuum up to phase
    let col = (0..4)
        .max_by(|&a, &b| ground.projector[(a, a)].re.total_cmp(&ground.projector[(b, b)].re))
        .expect("four columns");
    let vac: CVector = ground.projector.column(col) / c64(ground.projector[(col, col)].re.sqrt(), 0.0);
    let one_m = gm.adjoint() * &vac;
    let one_k = gk.adjoint() * &vac;
    let both = gk.adjoint() * (gm.adjoint() * &vac);
    Ok(vec![vac, one_m, one_k, both])
}

fn label_observable(states: &[CVector], name: &str) -> Result<Observable> {
    let pairs = states
        .iter()
        .enumerate()
        .map(|(j, v)| (j as f64, outer(v, v)))
        .collect();
    Observable::from_projectors(pairs, name)
}

/// Per-mode table recomputed from the two-mode Fock space: Hamiltonians built
/// from `c_k, c_-k`, the initial state from the coherent Gibbs state, and the
/// generic KDQ routine over quasiparticle occupations. Also returns the
/// largest weight found outside the six allowed transitions.
pub fn mode_oracle(k: f64, spec: &IsingQuenchSpec) -> Result<(ModeTransitionTable, f64)> {
    if is_unpaired(k) {
        return unpaired_oracle(spec);
    }
    let (l0, l1, beta, p) = (spec.lambda0, spec.lambda1, spec.beta, spec.p);
    let e0 = dispersion(k, l0);
    let e1 = dispersion(k, l1);
    let zk = 2.0 * (beta * e0 / 2.0).cosh();
    let initial = quasiparticle_fock(k, l0)?;
    let fin = quasiparticle_fock(k, l1)?;

    // single-mode coherent Gibbs amplitudes for empty / occupied
    let amp = [(beta * e0 / 4.0).exp() / zk.sqrt(), (-beta * e0 / 4.0).exp() / zk.sqrt()];
    let mut psi = CVector::zeros(4);
    for (j, v) in initial.iter().enumerate() {
        psi += v * c64(amp[j >> 1] * amp[j & 1], 0.0);
    }
    let h0 = pair_hamiltonian(k, l0)?;
    let gibbs = linalg::expm_hermitian(&h0, c64(-beta, 0.0))?;
    let gibbs = &gibbs / linalg::trace(&gibbs);
    let rho = DensityOperator::new(outer(&psi, &psi) * c64(p, 0.0) + gibbs * c64(1.0 - p, 0.0))?;

    let table = quasiprob::kdq(
        &rho,
        &label_observable(&initial, "initial occupations")?,
        &QuantumChannel::identity(4),
        &label_observable(&fin, "final occupations")?,
        Ordering::Kdq1,
    )?;
    let energy = |j: usize, eps: f64| eps * ((j >> 1) + (j & 1)) as f64 - eps;
    let labels = [
        ("00->00", 0, 0),
        ("00->11", 0, 3),
        ("01->01", 1, 1),
        ("10->10", 2, 2),
        ("11->00", 3, 0),
        ("11->11", 3, 3),
    ];
    let mut entries = Vec::new();
    let mut residual: f64 = 0.0;
    for i in 0..4 {
        for f in 0..4 {
            let q = table.q[(i, f)];
            match labels.iter().find(|(_, a, b)| *a == i && *b == f) {
                Some(&(label, _, _)) => {
                    residual = residual.max(q.im.abs());
                    entries.push(ModeTransition {
                        label,
                        w: energy(f, e1) - energy(i, e0),
                        q: q.re,
                    });
                }
                None => residual = residual.max(q.norm()),
            }
        }
    }
    entries.sort_by_key(|e| labels.iter().position(|l| l.0 == e.label));
    Ok((
        ModeTransitionTable {
            k,
            eps0: e0,
            eps1: e1,
            delta_k: angle_difference(k, l0, l1)?,
            zk,
            entries,
        },
        residual,
    ))
}

/// The `k = pi` mode on its own two-level Fock space, `H = 2 (lambda + 1)(c^+ c - 1/2)`.
fn unpaired_oracle(spec: &IsingQuenchSpec) -> Result<(ModeTransitionTable, f64)> {
    let (l0, l1, beta, p) = (spec.lambda0, spec.lambda1, spec.beta, spec.p);
    let c = lowering();
    let number = c.adjoint() * &c;
    let h = |lambda: f64| (&number - linalg::identity(2) * c64(0.5, 0.0)) * c64(2.0 * (lambda + 1.0), 0.0);
    let h0 = Observable::new(h(l0), "H0")?;
    let e0 = dispersion(PI, l0);
    let zk = 2.0 * (beta * e0 / 2.0).cosh();
    // coherent Gibbs state in the eigenbasis of H0
    let mut psi = CVector::zeros(2);
    for b in &h0.spectrum.branches {
        let amp = (-beta * b.value / 2.0).exp() / zk.sqrt();
        let col = (0..2).find(|&j| b.projector[(j, j)].re > 0.5).expect("diagonal projector");
        psi[col] = c64(amp, 0.0);
    }
    let gibbs = crate::state::gibbs_state(&h0, beta)?;
    let rho = DensityOperator::new(outer(&psi, &psi) * c64(p, 0.0) + gibbs.matrix() * c64(1.0 - p, 0.0))?;
    let n_obs = Observable::new(number.clone(), "n")?;
    let table = quasiprob::kdq(&rho, &n_obs, &QuantumChannel::identity(2), &n_obs, Ordering::Kdq1)?;
    let level = |m: &CMatrix, n: usize| m[(n, n)].re;
    let (m0, m1) = (h(l0), h(l1));
    let mut residual = table.q[(0, 1)].norm().max(table.q[(1, 0)].norm());
    let entries = [("0->0", 0usize), ("1->1", 1usize)]
        .into_iter()
        .map(|(label, n)| {
            residual = residual.max(table.q[(n, n)].im.abs());
            ModeTransition {
                label,
                w: level(&m1, n) - level(&m0, n),
                q: table.q[(n, n)].re,
            }
        })
        .collect();
    Ok((
        ModeTransitionTable {
            k: PI,
            eps0: e0,
            eps1: dispersion(PI, l1),
            delta_k: angle_difference(PI, l0, l1)?,
            zk,
            entries,
        },
        residual,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: usize, p: f64) -> IsingQuenchSpec {
        IsingQuenchSpec {
            n,
            lambda0: 0.0,
            lambda1: 0.5,
            beta: 0.1,
            p,
        }
    }

    #[test]
    fn dispersion_values() {
        assert!(dispersion(0.0, 1.0).abs() < 1e-15);
        assert!((dispersion(PI, 1.0) - 4.0).abs() < 1e-14);
        assert!((dispersion(PI / 2.0, 0.0) - 2.0).abs() < 1e-14);
        assert!(matches!(bogoliubov_angle(0.0, 1.0), Err(QprobError::UndefinedAngle { .. })));
    }

    #[test]
    fn angle_is_the_phase_of_lambda_minus_exp() {
        for &(k, l) in &[(0.3, 0.2), (2.0, 1.5), (1.0, -0.7)] {
            let th = bogoliubov_angle(k, l).unwrap();
            let z = (c64(l, 0.0) - c64(0.0, -k).exp()) / c64(k.sin().hypot(l - k.cos()), 0.0);
            assert!((c64(0.0, th).exp() - z).norm() < 1e-12);
        }
    }

    #[test]
    fn quasimomenta_count() {
        assert_eq!(quasimomenta(12).unwrap().len(), 6);
        assert!(quasimomenta(7).is_err());
    }

    #[test]
    fn oracle_matches_table() {
        for &k in &[PI / 3.0, 1.0, 2.5, PI] {
            for &p in &[0.0, 0.4, 1.0] {
                let s = IsingQuenchSpec { n: 12, lambda0: 0.3, lambda1: 1.7, beta: 0.5, p };
                let a = mode_table(k, &s).unwrap();
                let (o, off) = mode_oracle(k, &s).unwrap();
                assert!(off < 1e-12, "off-table weight {off}");
                for (x, y) in a.entries.iter().zip(&o.entries) {
                    assert_eq!(x.label, y.label);
                    assert!((x.q - y.q).abs() < 1e-12 && (x.w - y.w).abs() < 1e-12, "{k} {p} {x:?} {y:?}");
                }
            }
        }
    }

    #[test]
    fn assembled_moments_match_cumulants() {
        let s = spec(12, 0.6);
        let d = assemble_distribution(&s).unwrap();
        let (m, v) = mode_cumulants(&s).unwrap();
        assert!((d.total() - ONE).norm() < 1e-12);
        assert!((d.mean().re - m).abs() < 1e-10);
        assert!((d.variance().re - v).abs() < 1e-10);
    }

    #[test]
    fn no_quench_is_a_point() {
        let s = IsingQuenchSpec { lambda1: 0.0, ..spec(8, 1.0) };
        let mut d = assemble_distribution(&s).unwrap();
        d.prune(1e-15);
        assert_eq!(d.len(), 1);
        assert!(d.atoms[0].value.abs() < 1e-12);
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            assemble_distribution_with_cap(&spec(12, 0.0), 10),
            Err(QprobError::AtomExplosion { .. })
        ));
    }
}
