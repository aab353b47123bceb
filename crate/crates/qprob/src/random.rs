//! Seeded random instances and the cross-cutting property suite run by
//! `qprob check`. Seeds only ever feed these helpers, never a physics preset.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::error::Result;
use crate::linalg::{self, c64, hermitian_eig, CMatrix};
use crate::presets::TwoTimeSetup;
use crate::quasiprob::{self, Ordering};
use crate::state::{self, DensityOperator, Observable, QuantumChannel};
use crate::tol;

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Entries uniform in the unit square of the complex plane.
pub fn complex_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

pub fn hermitian<R: Rng>(rng: &mut R, dim: usize) -> CMatrix {
    let a = complex_matrix(rng, dim, dim);
    (&a + a.adjoint()) * c64(0.5, 0.0)
}

pub fn unitary<R: Rng>(rng: &mut R, dim: usize) -> CMatrix {
    let h = hermitian(rng, dim);
    linalg::expm_hermitian(&h, c64(0.0, std::f64::consts::PI)).expect("Hermitian input")
}

/// Full-rank mixed state `A A^dagger / tr`.
pub fn density<R: Rng>(rng: &mut R, dim: usize) -> DensityOperator {
    let a = complex_matrix(rng, dim, dim);
    let m = &a * a.adjoint();
    let tr = linalg::trace(&m).re;
    DensityOperator::new(m / c64(tr, 0.0)).expect("positive by construction")
}

pub fn pure<R: Rng>(rng: &mut R, dim: usize) -> DensityOperator {
    let v = complex_matrix(rng, dim, 1);
    let v = linalg::CVector::from_iterator(dim, v.iter().copied());
    DensityOperator::pure(&(&v / c64(v.norm(), 0.0))).expect("normalised")
}

/// Observable in a random eigenbasis. With `degenerate` the eigenvalues are
/// drawn from a few integers, so repeated values are common.
pub fn observable<R: Rng>(rng: &mut R, dim: usize, degenerate: bool) -> Observable {
    let values: Vec<f64> = (0..dim)
        .map(|_| {
            if degenerate {
                rng.gen_range(-2i32..=2) as f64
            } else {
                rng.gen_range(-3.0..3.0)
            }
        })
        .collect();
    let v = unitary(rng, dim);
    let m = &v * linalg::diag(&values) * v.adjoint();
    Observable::new((&m + m.adjoint()) * c64(0.5, 0.0), "random").expect("Hermitian input")
}

/// `count` Kraus operators normalised as `K_j = A_j S^(-1/2)`, `S = sum A^dagger A`.
pub fn kraus<R: Rng>(rng: &mut R, dim: usize, count: usize) -> QuantumChannel {
    let ops: Vec<CMatrix> = (0..count.max(1)).map(|_| complex_matrix(rng, dim, dim)).collect();
    let s = ops.iter().fold(CMatrix::zeros(dim, dim), |acc, a| acc + a.adjoint() * a);
    let inv_sqrt = hermitian_eig(&s, tol::GROUP_TOL)
        .expect("Hermitian input")
        .map(|v| c64(1.0 / v.sqrt(), 0.0));
    QuantumChannel::kraus(ops.iter().map(|a| a * &inv_sqrt).collect()).expect("trace preserving by construction")
}

pub fn channel<R: Rng>(rng: &mut R, dim: usize) -> QuantumChannel {
    match rng.gen_range(0..3) {
        0 => QuantumChannel::identity(dim),
        1 => QuantumChannel::unitary(unitary(rng, dim)).expect("unitary by construction"),
        _ => {
            let k = rng.gen_range(2..=3);
            kraus(rng, dim, k)
        }
    }
}

/// Random state, observables and channel of dimension `2..=max_dim`.
pub fn setup<R: Rng>(rng: &mut R, max_dim: usize) -> TwoTimeSetup {
    let dim = rng.gen_range(2..=max_dim.max(2));
    let rho = if rng.gen_bool(0.3) { pure(rng, dim) } else { density(rng, dim) };
    let (d1, d2) = (rng.gen_bool(0.3), rng.gen_bool(0.3));
    let o1 = observable(rng, dim, d1);
    let o2 = observable(rng, dim, d2);
    let ch = channel(rng, dim);
    TwoTimeSetup::new(rho, o1, ch, o2).expect("dimensions agree")
}

/// Setup in which the state, both observables and the channel commute:
/// `rho` is dephased in the eigenbasis of `O1`, `O2` is a function of `O1`
/// and there is no evolution.
pub fn commuting_setup<R: Rng>(rng: &mut R, max_dim: usize) -> TwoTimeSetup {
    let dim = rng.gen_range(2..=max_dim.max(2));
    let degenerate = rng.gen_bool(0.3);
    let o1 = observable(rng, dim, degenerate);
    let rho = state::dephase(&density(rng, dim), &o1).expect("same dimension");
    let (a, b) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let m = o1.spectrum.map(|v| c64(a * v + b * v * v, 0.0));
    let o2 = Observable::new(m, "f(O1)").expect("Hermitian input");
    TwoTimeSetup::new(rho, o1, QuantumChannel::identity(dim), o2).expect("dimensions agree")
}

/// Worst residual of one property over a batch of instances.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyResult {
    pub name: &'static str,
    pub cases: usize,
    pub worst: f64,
    pub tol: f64,
}

impl PropertyResult {
    fn new(name: &'static str, tol: f64) -> Self {
        PropertyResult { name, cases: 0, worst: 0.0, tol }
    }

    fn record(&mut self, residual: f64) {
        self.cases += 1;
        if residual.is_nan() || residual > self.worst {
            self.worst = residual;
        }
    }

    pub fn passed(&self) -> bool {
        self.cases > 0 && self.worst <= self.tol
    }
}

/// Runs the cross-cutting identities on `cases` random setups (dimension up
/// to 6) plus `cases / 4` commuting ones. Every setup feeds every property.
pub fn property_suite(seed: u64, cases: usize) -> Result<Vec<PropertyResult>> {
    let mut rng = rng(seed);
    let mut norm = PropertyResult::new("sum of KDQ = 1", 1e-10);
    let mut signal = PropertyResult::new("KDQ no-signaling residual", 1e-10);
    let mut conj = PropertyResult::new("KDQ2 = conj(KDQ1)", 1e-10);
    let mut mhq = PropertyResult::new("MHQ = Re KDQ", 1e-10);
    let mut collapse = PropertyResult::new("commuting case: KDQ = TPM", 1e-10);
    let mut witness = PropertyResult::new("commuting case: aleph = 0", 1e-9);

    for _ in 0..cases {
        let s = setup(&mut rng, 6);
        let t1 = s.kdq(Ordering::Kdq1)?;
        let t2 = s.kdq(Ordering::Kdq2)?;
        norm.record(t1.normalization_residual());
        signal.record(quasiprob::no_signaling_residual(&t1.q, &s.rho, &s.channel, &s.o2)?);
        conj.record(linalg::max_abs(&(t1.q.map(|z| z.conj()) - &t2.q)));
        let anti = quasiprob::mhq_anticommutator(&s.rho, &s.o1, &s.channel, &s.o2)?;
        mhq.record((t1.mhq() - anti).amax());
    }
    for _ in 0..cases.div_ceil(4) {
        let s = commuting_setup(&mut rng, 6);
        let t = s.kdq(Ordering::Kdq1)?;
        collapse.record((t.mhq() - &t.p_tpm).amax().max(t.q.iter().map(|z| z.im.abs()).fold(0.0, f64::max)));
        let nc = quasiprob::noncommutativity(&s.rho, &s.o1, &s.channel, &s.o2)?;
        // only meaningful when the setup really commutes to working precision
        witness.record(if nc < 1e-9 { t.nonpositivity().max(0.0) } else { 0.0 });
    }
    Ok(vec![norm, signal, conj, mhq, collapse, witness])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_valid_and_seeded() {
        let mut a = rng(7);
        let mut b = rng(7);
        assert_eq!(complex_matrix(&mut a, 3, 3), complex_matrix(&mut b, 3, 3));
        let u = unitary(&mut a, 4);
        assert!(linalg::unitarity_residual(&u) < 1e-12);
        let ch = kraus(&mut a, 3, 3);
        let id = ch.heisenberg(&linalg::identity(3)).unwrap();
        assert!(linalg::max_abs(&(id - linalg::identity(3))) < 1e-12);
    }

    #[test]
    fn small_suite_passes() {
        for r in property_suite(1, 40).unwrap() {
            assert!(r.passed(), "{r:?}");
        }
    }
}
