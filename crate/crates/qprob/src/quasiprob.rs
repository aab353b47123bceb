//! Two-time statistics of a pair of observables separated by a channel.
//!
//! With `Pi_s1` the projectors of `O1`, `Pi^H_s2 = Phi^dagger[Pi_s2]` the
//! Heisenberg-evolved projectors of `O2` and `rho` the initial state:
//!
//! * TPM joint probability: `p(s1,s2) = tr[Pi^H_s2 Pi_s1 rho Pi_s1]`
//! * Kirkwood-Dirac: `q(s1,s2) = tr[Pi^H_s2 Pi_s1 rho]`
//! * Margenau-Hill: `Re q`
//! * non-demolition: `q(s1,s1',s2) = tr[Pi^H_s2 Pi_s1 rho Pi_s1']`

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QprobError, Result};
use crate::linalg::{self, c64, frobenius, trace_product, CMatrix, CVector, ZERO};
use crate::state::{DensityOperator, Observable, QuantumChannel};
use crate::tol;

/// Operator ordering of the Kirkwood-Dirac quasiprobability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Ordering {
    /// `tr[Pi^H_s2 Pi_s1 rho]`
    #[default]
    Kdq1,
    /// `tr[rho Pi_s1 Pi^H_s2]`
    Kdq2,
}

/// Joint quasiprobability table over pairs of spectral branches, with the TPM
/// table of the same setup alongside.
#[derive(Debug, Clone)]
pub struct OutcomePairTable {
    pub outcomes1: Vec<f64>,
    pub outcomes2: Vec<f64>,
    pub q: CMatrix,
    pub p_tpm: DMatrix<f64>,
    pub ordering: Ordering,
}

impl OutcomePairTable {
    pub fn shape(&self) -> (usize, usize) {
        (self.outcomes1.len(), self.outcomes2.len())
    }

    pub fn sum_q(&self) -> Complex64 {
        self.q.iter().sum()
    }

    pub fn sum_p(&self) -> f64 {
        self.p_tpm.iter().sum()
    }

    pub fn mhq(&self) -> DMatrix<f64> {
        self.q.map(|z| z.re)
    }

    pub fn nonpositivity(&self) -> f64 {
        nonpositivity(&self.q)
    }

    /// `max(|sum q - 1|, |sum p - 1|)`
    pub fn normalization_residual(&self) -> f64 {
        (self.sum_q() - c64(1.0, 0.0)).norm().max((self.sum_p() - 1.0).abs())
    }

    /// Scale used for coalescing outcome differences.
    pub fn scale(&self) -> f64 {
        self.outcomes1
            .iter()
            .chain(&self.outcomes2)
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn distribution(&self) -> Result<AtomDistribution> {
        distribution(self)
    }

    pub fn tpm_distribution(&self) -> Result<AtomDistribution> {
        let mut atoms = Vec::with_capacity(self.q.len());
        for (i, o1) in self.outcomes1.iter().enumerate() {
            for (j, o2) in self.outcomes2.iter().enumerate() {
                atoms.push((o2 - o1, c64(self.p_tpm[(i, j)], 0.0)));
            }
        }
        AtomDistribution::from_pairs(atoms, tol::COALESCE_TOL * self.scale())
    }

    /// `sum q exp(iu (o2 - o1))`
    pub fn characteristic(&self, u: Complex64) -> Complex64 {
        let mut acc = ZERO;
        for (i, o1) in self.outcomes1.iter().enumerate() {
            for (j, o2) in self.outcomes2.iter().enumerate() {
                acc += self.q[(i, j)] * (Complex64::i() * u * (o2 - o1)).exp();
            }
        }
        acc
    }
}

fn check_setup(
    rho: &DensityOperator,
    o1: &Observable,
    channel: &QuantumChannel,
    o2: &Observable,
) -> Result<usize> {
    let n = rho.dim();
    for (context, found) in [
        ("O1", o1.dim()),
        ("channel", channel.dim()),
        ("O2", o2.dim()),
    ] {
        if found != n {
            return Err(QprobError::DimensionMismatch {
                context,
                expected: n,
                found,
            });
        }
    }
    Ok(n)
}

/// `Phi^dagger[Pi_s2]` for every branch of `o2`.
pub fn heisenberg_projectors(channel: &QuantumChannel, o2: &Observable) -> Result<Vec<CMatrix>> {
    o2.spectrum
        .projectors()
        .map(|p| channel.heisenberg(p))
        .collect()
}

/// TPM joint probabilities `p(s1,s2)`.
pub fn tpm_joint(
    rho: &DensityOperator,
    o1: &Observable,
    channel: &QuantumChannel,
    o2: &Observable,
) -> Result<DMatrix<f64>> {
    check_setup(rho, o1, channel, o2)?;
    let ph = heisenberg_projectors(channel, o2)?;
    Ok(tpm_from_parts(rho, o1, &ph))
}

fn tpm_from_parts(rho: &DensityOperator, o1: &Observable, ph: &[CMatrix]) -> DMatrix<f64> {
    let mut p = DMatrix::zeros(o1.len(), ph.len());
    for (i, b) in o1.spectrum.branches.iter().enumerate() {
        let post = &b.projector * rho.matrix() * &b.projector;
        for (j, h) in ph.iter().enumerate() {
            p[(i, j)] = trace_product(h, &post).re;
        }
    }
    p
}

/// Kirkwood-Dirac table in the requested ordering, with the TPM companion.
pub fn kdq(
    rho: &DensityOperator,
    o1: &Observable,
    channel: &QuantumChannel,
    o2: &Observable,
    ordering: Ordering,
) -> Result<OutcomePairTable> {
    check_setup(rho, o1, channel, o2)?;
    let ph = heisenberg_projectors(channel, o2)?;
    let mut q = CMatrix::zeros(o1.len(), ph.len());
    for (i, b) in o1.spectrum.branches.iter().enumerate() {
        match ordering {
            Ordering::Kdq1 => {
                let a = &b.projector * rho.matrix();
                for (j, h) in ph.iter().enumerate() {
                    q[(i, j)] = trace_product(h, &a);
                }
            }
            Ordering::Kdq2 => {
                let a = rho.matrix() * &b.projector;
                for (j, h) in ph.iter().enumerate() {
                    q[(i, j)] = trace_product(&a, h);
                }
            }
        }
    }
    Ok(OutcomePairTable {
        outcomes1: o1.values(),
        outcomes2: o2.values(),
        q,
        p_tpm: tpm_from_parts(rho, o1, &ph),
        ordering,
    })
}

/// Margenau-Hill table, `Re q` of the KDQ1 ordering.
pub fn mhq(
    rho: &DensityOperator,
    o1: &Observable,
    channel: &QuantumChannel,
    o2: &Observable,
) -> Result<DMatrix<f64>> {
    Ok(kdq(rho, o1, channel, o2, Ordering::Kdq1)?.mhq())
}

/// Margenau-Hill table through the symmetrised form `1/2 tr[{Pi^H, Pi} rho]`.
pub fn mhq_anticommutator(
    rho: &DensityOperator,
    o1: &Observable,
    channel: &QuantumChannel,
    o2: &Observable,
) -> Result<DMatrix<f64>> {
    check_setup(rho, o1, channel, o2)?;
    let ph = heisenberg_projectors(channel, o2)?;
    let mut out = DMatrix::zeros(o1.len(), ph.len());
    for (i, b) in o1.spectrum.branches.iter().enumerate() {
        for (j, h) in ph.iter().enumerate() {
            let anti = linalg::anticommutator(h, &b.projector)?;
            out[(i, j)] = 0.5 * trace_product(&anti, rho.matrix()).re;
        }
    }
    Ok(out)
}

/// Three-index non-demolition quasiprobability.
#[derive(Debug, Clone)]
pub struct NdqpTable {
    pub outcomes1: Vec<f64>,
    pub outcomes2: Vec<f64>,
    data: Vec<Complex64>,
}

impl NdqpTable {
    /// `q(s1, s1', s2)`
    pub fn get(&self, s1: usize, s1p: usize, s2: usize) -> Complex64 {
        let (n1, n2) = (self.outcomes1.len(), self.outcomes2.len());
        self.data[(s1 * n1 + s1p) * n2 + s2]
    }

    pub fn n1(&self) -> usize {
        self.outcomes1.len()
    }

    pub fn n2(&self) -> usize {
        self.outcomes2.len()
    }

    pub fn total(&self) -> Complex64 {
        self.data.iter().sum()
    }

    /// The `s1' = s1` slice, equal to the TPM table.
    pub fn diagonal(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n1(), self.n2(), |i, j| self.get(i, i, j).re)
    }

    /// `sum_{s1' != s1} q(s1, s1', s2)`, the KDQ minus TPM gap.
    pub fn cross_terms(&self) -> CMatrix {
        CMatrix::from_fn(self.n1(), self.n2(), |i, j| {
            (0..self.n1()).filter(|&k| k != i).map(|k| self.get(i, k, j)).sum()
        })
    }
}

pub fn ndqp(
    rho: &DensityOperator,
    o1: &Observable,
    channel: &QuantumChannel,
    o2: &Observable,
) -> Result<NdqpTable> {
    check_setup(rho, o1, channel, o2)?;
    let ph = heisenberg_projectors(channel, o2)?;
    let br = &o1.spectrum.branches;
    let mut data = Vec::with_capacity(br.len() * br.len() * ph.len());
    for a in br {
        let left = &a.projector * rho.matrix();
        for b in br {
            let m = &left * &b.projector;
            for h in &ph {
                data.push(trace_product(h, &m));
            }
        }
    }
    Ok(NdqpTable {
        outcomes1: o1.values(),
        outcomes2: o2.values(),
        data,
    })
}

/// `-1 + sum |q|`; zero exactly when every entry is real and non-negative.
pub fn nonpositivity(q: &CMatrix) -> f64 {
    q.iter().map(|z| z.norm()).sum::<f64>() - 1.0
}

/// `max_s2 |sum_s1 q(s1,s2) - tr[Pi^H_s2 rho]|`
pub fn no_signaling_residual(
    q: &CMatrix,
    rho: &DensityOperator,
    channel: &QuantumChannel,
    o2: &Observable,
) -> Result<f64> {
    let ph = heisenberg_projectors(channel, o2)?;
    if ph.len() != q.ncols() {
        return Err(QprobError::DimensionMismatch {
            context: "table columns",
            expected: ph.len(),
            found: q.ncols(),
        });
    }
    let mut worst: f64 = 0.0;
    for (j, h) in ph.iter().enumerate() {
        let marginal: Complex64 = q.column(j).iter().sum();
        worst = worst.max((marginal - trace_product(h, rho.matrix())).norm());
    }
    Ok(worst)
}

/// Largest Frobenius norm among `[rho, Pi_s1]` and `[Pi_s1, Pi^H_s2]`.
pub fn noncommutativity(
    rho: &DensityOperator,
    o1: &Observable,
    channel: &QuantumChannel,
    o2: &Observable,
) -> Result<f64> {
    check_setup(rho, o1, channel, o2)?;
    let ph = heisenberg_projectors(channel, o2)?;
    let mut worst: f64 = 0.0;
    for p in o1.spectrum.projectors() {
        worst = worst.max(frobenius(&linalg::commutator(rho.matrix(), p)?));
        for h in &ph {
            worst = worst.max(frobenius(&linalg::commutator(p, h)?));
        }
    }
    Ok(worst)
}

/// A point mass of a (quasi)distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub value: f64,
    pub weight: Complex64,
}

/// Finite sum of weighted deltas with strictly increasing support points.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomDistribution {
    pub atoms: Vec<Atom>,
}

/// Sorts by value and merges neighbours closer than `tol` to the first member
/// of their cluster; the merged atom sits at the weight-agnostic mean value.
pub fn coalesce(mut pairs: Vec<(f64, Complex64)>, tol: f64) -> Vec<Atom> {
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<Atom> = Vec::with_capacity(pairs.len());
    let mut anchor = f64::NAN;
    let mut sum_v = 0.0;
    let mut count = 0usize;
    for (v, w) in pairs {
        if count > 0 && (v - anchor).abs() <= tol {
            let last = out.last_mut().expect("cluster open");
            last.weight += w;
            sum_v += v;
            count += 1;
            last.value = sum_v / count as f64;
        } else {
            anchor = v;
            sum_v = v;
            count = 1;
            out.push(Atom { value: v, weight: w });
        }
    }
    out
}

impl AtomDistribution {
    pub fn from_pairs(pairs: Vec<(f64, Complex64)>, tol: f64) -> Result<Self> {
        if pairs.is_empty() {
            return Err(QprobError::EmptyDistribution);
        }
        Ok(AtomDistribution {
            atoms: coalesce(pairs, tol),
        })
    }

    pub fn point(value: f64) -> Self {
        AtomDistribution {
            atoms: vec![Atom {
                value,
                weight: c64(1.0, 0.0),
            }],
        }
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Drops atoms with `|w| <= threshold`, keeping the heaviest if all vanish.
    pub fn prune(&mut self, threshold: f64) {
        if self.atoms.iter().all(|a| a.weight.norm() <= threshold) {
            let best = self
                .atoms
                .iter()
                .copied()
                .max_by(|a, b| a.weight.norm().total_cmp(&b.weight.norm()));
            self.atoms = best.into_iter().collect();
            return;
        }
        self.atoms.retain(|a| a.weight.norm() > threshold);
    }

    pub fn total(&self) -> Complex64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    pub fn values(&self) -> Vec<f64> {
        self.atoms.iter().map(|a| a.value).collect()
    }

    /// `sum_a w_a v_a^k`
    pub fn moment(&self, k: u32) -> Complex64 {
        self.atoms
            .iter()
            .map(|a| a.weight * a.value.powi(k as i32))
            .sum()
    }

    pub fn mean(&self) -> Complex64 {
        self.moment(1)
    }

    /// `<v^2> - <v>^2`, complex in general.
    pub fn variance(&self) -> Complex64 {
        let m = self.moment(1);
        self.moment(2) - m * m
    }

    /// `sum_a w_a exp(iu v_a)`
    pub fn characteristic(&self, u: Complex64) -> Complex64 {
        self.atoms
            .iter()
            .map(|a| a.weight * (Complex64::i() * u * a.value).exp())
            .sum()
    }

    /// Weight at the atom closest to `value` within `tol`, or zero.
    pub fn weight_at(&self, value: f64, tol: f64) -> Complex64 {
        self.atoms
            .iter()
            .filter(|a| (a.value - value).abs() <= tol)
            .map(|a| a.weight)
            .sum()
    }

    /// `max(|sum w - 1|, |sum Im w|)`
    pub fn normalization_residual(&self) -> f64 {
        (self.total() - c64(1.0, 0.0)).norm()
    }

    pub fn min_real_weight(&self) -> f64 {
        self.atoms
            .iter()
            .map(|a| a.weight.re)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Weights below this modulus are treated as structural zeros and dropped
/// from table-derived distributions.
pub const NULL_WEIGHT: f64 = 1e-15;

/// Distribution of `o2 - o1` under the table's quasiprobabilities. Atoms whose
/// merged weight vanishes are dropped, keeping at least one atom.
pub fn distribution(table: &OutcomePairTable) -> Result<AtomDistribution> {
    let mut pairs = Vec::with_capacity(table.q.len());
    for (i, o1) in table.outcomes1.iter().enumerate() {
        for (j, o2) in table.outcomes2.iter().enumerate() {
            pairs.push((o2 - o1, table.q[(i, j)]));
        }
    }
    let mut dist = AtomDistribution::from_pairs(pairs, tol::COALESCE_TOL * table.scale())?;
    dist.prune(NULL_WEIGHT);
    Ok(dist)
}

/// All candidate values `o2 - o1`, coalesced, regardless of weight.
pub fn support(outcomes1: &[f64], outcomes2: &[f64]) -> Vec<f64> {
    let scale = outcomes1
        .iter()
        .chain(outcomes2)
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let pairs = outcomes1
        .iter()
        .flat_map(|a| outcomes2.iter().map(move |b| (b - a, ZERO)))
        .collect();
    coalesce(pairs, tol::COALESCE_TOL * scale)
        .into_iter()
        .map(|a| a.value)
        .collect()
}

/// `tr[exp(-iu O1) rho Phi^dagger[exp(iu O2)]]`, evaluated on operators.
/// Complex `u` is allowed.
pub fn characteristic(
    rho: &DensityOperator,
    o1: &Observable,
    channel: &QuantumChannel,
    o2: &Observable,
    u: Complex64,
) -> Result<Complex64> {
    check_setup(rho, o1, channel, o2)?;
    let iu = Complex64::i() * u;
    let e1 = o1.spectrum.map(|v| (-iu * v).exp());
    let e2 = channel.heisenberg(&o2.spectrum.map(|v| (iu * v).exp()))?;
    Ok(trace_product(&(e1 * rho.matrix()), &e2))
}

/// `<post|O1|psi> / <post|psi>`
pub fn weak_value(o1: &Observable, psi: &CVector, post: &CVector) -> Result<Complex64> {
    if psi.len() != o1.dim() || post.len() != o1.dim() {
        return Err(QprobError::DimensionMismatch {
            context: "weak value state",
            expected: o1.dim(),
            found: psi.len().max(post.len()),
        });
    }
    let overlap = post.dotc(psi);
    let scale = psi.norm() * post.norm();
    if overlap.norm() <= 1e-12 * scale.max(1.0) {
        return Err(QprobError::OrthogonalPostselection {
            overlap: overlap.norm(),
        });
    }
    Ok(post.dotc(&(&o1.matrix * psi)) / overlap)
}

pub fn moments(dist: &AtomDistribution, k: u32) -> Complex64 {
    dist.moment(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{diag, sigma_x, sigma_z, ONE};

    fn qubit(rho01: Complex64) -> DensityOperator {
        DensityOperator::new(CMatrix::from_row_slice(
            2,
            2,
            &[c64(0.5, 0.0), rho01, rho01.conj(), c64(0.5, 0.0)],
        ))
        .unwrap()
    }

    fn obs(m: CMatrix) -> Observable {
        Observable::new(m, "o").unwrap()
    }

    #[test]
    fn maximally_mixed_gives_quarter_everywhere() {
        let t = kdq(
            &qubit(ZERO),
            &obs(sigma_z()),
            &QuantumChannel::identity(2),
            &obs(sigma_x()),
            Ordering::Kdq1,
        )
        .unwrap();
        for z in t.q.iter() {
            assert!((z - c64(0.25, 0.0)).norm() < 1e-15);
        }
        for p in t.p_tpm.iter() {
            assert!((p - 0.25).abs() < 1e-15);
        }
        assert!(t.nonpositivity().abs() < 1e-15);
    }

    #[test]
    fn commuting_case_is_diagonal() {
        let rho = DensityOperator::new(diag(&[0.3, 0.7])).unwrap();
        let z = obs(sigma_z());
        let t = kdq(&rho, &z, &QuantumChannel::identity(2), &z, Ordering::Kdq1).unwrap();
        // ascending branches: -1 <-> |1>, +1 <-> |0>
        assert!((t.q[(0, 0)] - c64(0.7, 0.0)).norm() < 1e-15);
        assert!((t.q[(1, 1)] - c64(0.3, 0.0)).norm() < 1e-15);
        assert!(t.q[(0, 1)].norm() < 1e-15 && t.q[(1, 0)].norm() < 1e-15);
        let d = t.distribution().unwrap();
        assert_eq!(d.len(), 1);
        assert!((d.atoms[0].weight - ONE).norm() < 1e-15);
    }

    #[test]
    fn orderings_are_conjugate() {
        let rho = qubit(c64(0.2, 0.3));
        let u = QuantumChannel::evolution(&(sigma_x() + sigma_z() * c64(0.4, 0.0)), 0.9).unwrap();
        let a = kdq(&rho, &obs(sigma_z()), &u, &obs(sigma_x()), Ordering::Kdq1).unwrap();
        let b = kdq(&rho, &obs(sigma_z()), &u, &obs(sigma_x()), Ordering::Kdq2).unwrap();
        for (x, y) in a.q.iter().zip(b.q.iter()) {
            assert!((x.conj() - y).norm() < 1e-15);
        }
    }

    #[test]
    fn tpm_signaling_gap_on_coherent_qubit() {
        // with O1 = sigma_z, O2 = sigma_x the TPM marginal misses tr[Pi^x chi] = +-Re rho01
        let rho01 = c64(0.3, -0.1);
        let rho = qubit(rho01);
        let id = QuantumChannel::identity(2);
        let (z, x) = (obs(sigma_z()), obs(sigma_x()));
        let t = kdq(&rho, &z, &id, &x, Ordering::Kdq1).unwrap();
        assert!(no_signaling_residual(&t.q, &rho, &id, &x).unwrap() < 1e-15);
        let p = t.p_tpm.map(|v| c64(v, 0.0));
        let gap = no_signaling_residual(&p, &rho, &id, &x).unwrap();
        assert!((gap - rho01.re.abs()).abs() < 1e-15);
        let diag_rho = qubit(ZERO);
        let t2 = kdq(&diag_rho, &z, &id, &x, Ordering::Kdq1).unwrap();
        let p2 = t2.p_tpm.map(|v| c64(v, 0.0));
        assert!(no_signaling_residual(&p2, &diag_rho, &id, &x).unwrap() < 1e-15);
    }

    #[test]
    fn coalescing_merges_equal_differences() {
        let d = AtomDistribution::from_pairs(
            vec![(1.0, c64(0.25, 0.0)), (0.0, c64(0.5, 0.0)), (1.0 + 1e-12, c64(0.25, 0.0))],
            1e-9,
        )
        .unwrap();
        assert_eq!(d.len(), 2);
        assert!((d.weight_at(1.0, 1e-9) - c64(0.5, 0.0)).norm() < 1e-15);
        assert!(AtomDistribution::from_pairs(vec![], 1e-9).is_err());
    }

    #[test]
    fn weak_values() {
        let z = obs(sigma_z());
        let zero = CVector::from_vec(vec![ONE, ZERO]);
        let any = CVector::from_vec(vec![c64(0.6, 0.0), c64(0.0, 0.8)]);
        assert!((weak_value(&z, &zero, &any).unwrap() - ONE).norm() < 1e-15);
        let plus = CVector::from_vec(vec![ONE, ONE]) / c64(2f64.sqrt(), 0.0);
        assert!(weak_value(&z, &plus, &plus).unwrap().norm() < 1e-15);
        let one = CVector::from_vec(vec![ZERO, ONE]);
        assert!(matches!(
            weak_value(&z, &zero, &one),
            Err(QprobError::OrthogonalPostselection { .. })
        ));
        // <post|z|+> / <post|+> with post = (|0> + i|1>)/sqrt2 equals (1 + i)/(1 - i) = i
        let post = CVector::from_vec(vec![ONE, Complex64::i()]) / c64(2f64.sqrt(), 0.0);
        let w = weak_value(&z, &plus, &post).unwrap();
        assert!((w - Complex64::i()).norm() < 1e-15);
    }

    #[test]
    fn weak_value_matches_conditional_kdq() {
        let x = obs(sigma_x() * c64(0.7, 0.0) + sigma_z() * c64(0.2, 0.0));
        let psi = CVector::from_vec(vec![c64(0.6, 0.1), c64(-0.3, 0.7)]);
        let post = CVector::from_vec(vec![c64(0.2, 0.0), c64(0.9, -0.4)]);
        let rho = DensityOperator::pure(&psi).unwrap();
        let post_n = &post / c64(post.norm(), 0.0);
        let post_obs = Observable::from_projectors(
            vec![
                (1.0, linalg::outer(&post_n, &post_n)),
                (0.0, linalg::identity(2) - linalg::outer(&post_n, &post_n)),
            ],
            "post",
        )
        .unwrap();
        let t = kdq(&rho, &x, &QuantumChannel::identity(2), &post_obs, Ordering::Kdq1).unwrap();
        let col = 1; // value 1.0 is the second ascending branch
        let p_post: Complex64 = t.q.column(col).iter().sum();
        let conditional: Complex64 = (0..t.outcomes1.len())
            .map(|i| t.q[(i, col)] * t.outcomes1[i])
            .sum::<Complex64>()
            / p_post;
        let w = weak_value(&x, &psi, &post).unwrap();
        assert!((w - conditional).norm() < 1e-12);
    }
}
