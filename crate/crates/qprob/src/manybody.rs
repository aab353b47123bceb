//! Scrambling and echo probes written as KDQ characteristic functions.
//!
//! Branch tables here follow the library-wide ascending order of outcomes.
//! The qubit presets label `|0>` as the `+1` (or upper-energy) branch, so a
//! paper-style index `0` is the *last* row of a two-outcome table.

use num_complex::Complex64;

use crate::error::{QprobError, Result};
use crate::linalg::{self, c64, kron, sigma_x, sigma_z, trace_product, CMatrix, I};
use crate::quasiprob::{self, Ordering, OutcomePairTable};
use crate::state::{self, DensityOperator, Observable, QuantumChannel};
use crate::tol;

/// Ingredients of `F(t) = <Y_t^dagger V^dagger Y_t V>` with `V = exp(iu O)`.
#[derive(Debug, Clone)]
pub struct OtocSpec {
    pub rho: DensityOperator,
    pub y: CMatrix,
    pub obs: Observable,
    pub h: Observable,
}

impl OtocSpec {
    pub fn new(rho: DensityOperator, y: CMatrix, obs: Observable, h: Observable) -> Result<Self> {
        let n = rho.dim();
        linalg::check_same_dim("Y", n, &y)?;
        for (context, found) in [("observable", obs.dim()), ("H", h.dim())] {
            if found != n {
                return Err(QprobError::DimensionMismatch {
                    context,
                    expected: n,
                    found,
                });
            }
        }
        let residual = linalg::unitarity_residual(&y);
        if residual > tol::UNITARY_TOL {
            return Err(QprobError::InvalidChannel {
                reason: "Y must be unitary",
                residual,
            });
        }
        Ok(OtocSpec { rho, y, obs, h })
    }

    /// `Y_t = U^dagger Y U`, `U = exp(-iHt)`
    pub fn y_t(&self, t: f64) -> Result<CMatrix> {
        let u = self.h.spectrum.map(|e| (-I * e * t).exp());
        Ok(u.adjoint() * &self.y * u)
    }

    /// `V(u) = exp(iu O)`
    pub fn v(&self, u: f64) -> CMatrix {
        self.obs.spectrum.map(|o| (I * u * o).exp())
    }
}

/// `F(t) = tr[rho Y_t^dagger V^dagger Y_t V]`
pub fn otoc(spec: &OtocSpec, t: f64, u: f64) -> Result<Complex64> {
    let yt = spec.y_t(t)?;
    let v = spec.v(u);
    let chain = yt.adjoint() * v.adjoint() * &yt * &v;
    Ok(spec.rho.expectation(&chain))
}

/// `C(t) = <[Y_t, V]^dagger [Y_t, V]> / 2`
pub fn oto_commutator(spec: &OtocSpec, t: f64, u: f64) -> Result<f64> {
    let yt = spec.y_t(t)?;
    let comm = linalg::commutator(&yt, &spec.v(u))?;
    Ok(0.5 * spec.rho.expectation(&(comm.adjoint() * comm)).re)
}

/// `q_nm = tr[rho Y_t^dagger Pi_n Y_t Pi_m]`, stored with `m` as the row
/// (first measurement) and `n` as the column.
pub fn otoc_kdq(spec: &OtocSpec, t: f64) -> Result<OutcomePairTable> {
    let channel = QuantumChannel::unitary(spec.y_t(t)?)?;
    quasiprob::kdq(&spec.rho, &spec.obs, &channel, &spec.obs, Ordering::Kdq1)
}

/// `sum q_nm exp(iu (o_m - o_n))`
pub fn otoc_characteristic(spec: &OtocSpec, t: f64, u: f64) -> Result<Complex64> {
    Ok(otoc_kdq(spec, t)?.characteristic(c64(-u, 0.0)))
}

/// Margenau-Hill version of the characteristic function, `Re F(t)`.
pub fn otoc_characteristic_mhq(spec: &OtocSpec, t: f64, u: f64) -> Result<f64> {
    let table = otoc_kdq(spec, t)?;
    let mut acc = 0.0;
    for (m, om) in table.outcomes1.iter().enumerate() {
        for (n, on) in table.outcomes2.iter().enumerate() {
            let z = table.q[(m, n)] * (I * u * (om - on)).exp();
            acc += z.re;
        }
    }
    Ok(acc)
}

/// `H = B1 sz (x) I + B2 I (x) sz + J sx (x) sx` at inverse temperature `beta`,
/// scrambled by `Y = sz` on qubit 1 and probed by `sz` on qubit 2.
pub fn two_qubit_otoc_preset(b1: f64, b2: f64, j: f64, beta: f64) -> Result<OtocSpec> {
    let id = linalg::identity(2);
    let h = kron(&sigma_z(), &id) * c64(b1, 0.0)
        + kron(&id, &sigma_z()) * c64(b2, 0.0)
        + kron(&sigma_x(), &sigma_x()) * c64(j, 0.0);
    let h = Observable::new(h, "H")?;
    let rho = state::gibbs_state(&h, beta)?;
    OtocSpec::new(
        rho,
        kron(&sigma_z(), &id),
        Observable::new(kron(&id, &sigma_z()), "sz_2")?,
        h,
    )
}

/// Frequencies of `Y_t` in the `{|00>, |11>}` and `{|01>, |10>}` sectors,
/// `2 sqrt((B1 +- B2)^2 + J^2)`. The first governs the low-temperature state.
pub fn two_qubit_otoc_frequencies(b1: f64, b2: f64, j: f64) -> (f64, f64) {
    (2.0 * (b1 + b2).hypot(j), 2.0 * (b1 - b2).hypot(j))
}

/// Initial state with its unperturbed and perturbed Hamiltonians.
#[derive(Debug, Clone)]
pub struct LoschmidtSpec {
    pub rho: DensityOperator,
    pub h0: Observable,
    pub hdelta: Observable,
}

impl LoschmidtSpec {
    pub fn new(rho: DensityOperator, h0: Observable, hdelta: Observable) -> Result<Self> {
        let n = rho.dim();
        for (context, found) in [("H0", h0.dim()), ("H_delta", hdelta.dim())] {
            if found != n {
                return Err(QprobError::DimensionMismatch {
                    context,
                    expected: n,
                    found,
                });
            }
        }
        Ok(LoschmidtSpec { rho, h0, hdelta })
    }
}

/// `G(t) = tr[rho exp(iH0 t) exp(-iH_delta t)]`
pub fn loschmidt_amplitude(spec: &LoschmidtSpec, t: f64) -> Complex64 {
    let forward = spec.h0.spectrum.map(|e| (I * e * t).exp());
    let back = spec.hdelta.spectrum.map(|e| (-I * e * t).exp());
    trace_product(&(spec.rho.matrix() * forward), &back)
}

/// `L(t) = |G(t)|^2`
pub fn loschmidt_echo(spec: &LoschmidtSpec, t: f64) -> f64 {
    loschmidt_amplitude(spec, t).norm_sqr()
}

/// `q_nm = tr[rho Pi_n Pi^delta_m]`
pub fn loschmidt_kdq(spec: &LoschmidtSpec) -> Result<OutcomePairTable> {
    let n = spec.rho.dim();
    quasiprob::kdq(&spec.rho, &spec.h0, &QuantumChannel::identity(n), &spec.hdelta, Ordering::Kdq2)
}

/// `sum q_nm exp(-i (E^delta_m - E_n) t)`
pub fn loschmidt_from_kdq(table: &OutcomePairTable, t: f64) -> Complex64 {
    table.characteristic(c64(-t, 0.0))
}

/// `psi = (|0> + |1>)/sqrt2`, `H0 = B sz`, `H_delta = H0 + delta sx`.
pub fn qubit_loschmidt_preset(b: f64, delta: f64) -> Result<LoschmidtSpec> {
    let h0 = sigma_z() * c64(b, 0.0);
    let hd = &h0 + sigma_x() * c64(delta, 0.0);
    let r = c64(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let psi = linalg::CVector::from_vec(vec![r, r]);
    LoschmidtSpec::new(
        DensityOperator::pure(&psi)?,
        Observable::new(h0, "H0")?,
        Observable::new(hd, "H_delta")?,
    )
}

/// Closed-form qubit echo amplitude.
pub fn qubit_loschmidt_closed_form(b: f64, delta: f64, t: f64) -> Complex64 {
    let bd = b.hypot(delta);
    let (sb, cb) = (b * t).sin_cos();
    let (sd, cd) = (bd * t).sin_cos();
    c64(cb * cd, 0.0) + c64(b * sb, -delta * cb) * (sd / bd)
}

/// Closed-form `q_nm = [B_delta + (-1)^m (delta + (-1)^n B)] / (4 B_delta)`,
/// with `0` the upper level of each Hamiltonian (paper labels).
pub fn qubit_loschmidt_kdq_closed_form(b: f64, delta: f64) -> [[f64; 2]; 2] {
    let bd = b.hypot(delta);
    let sign = |k: usize| if k == 0 { 1.0 } else { -1.0 };
    let mut q = [[0.0; 2]; 2];
    for (n, row) in q.iter_mut().enumerate() {
        for (m, v) in row.iter_mut().enumerate() {
            *v = (bd + sign(m) * (delta + sign(n) * b)) / (4.0 * bd);
        }
    }
    q
}
