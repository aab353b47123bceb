//! Heat exchange between a cold body `c` and a hot body `h`, ordered `c (x) h`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{QprobError, Result};
use crate::linalg::{self, c64, kron, trace_product, CMatrix, ZERO};
use crate::state::{self, DensityOperator, Observable};
use crate::tol;

/// Two locally thermal bodies coupled by an energy-preserving unitary.
#[derive(Debug, Clone)]
pub struct HeatExchangeSpec {
    pub hc: Observable,
    pub hh: Observable,
    pub beta_c: f64,
    pub beta_h: f64,
    pub rho: DensityOperator,
    pub u: CMatrix,
}

impl HeatExchangeSpec {
    pub fn new(
        hc: Observable,
        hh: Observable,
        beta_c: f64,
        beta_h: f64,
        rho: DensityOperator,
        u: CMatrix,
    ) -> Result<Self> {
        let (dc, dh) = (hc.dim(), hh.dim());
        let n = dc * dh;
        if rho.dim() != n {
            return Err(QprobError::DimensionMismatch {
                context: "joint state",
                expected: n,
                found: rho.dim(),
            });
        }
        linalg::check_same_dim("coupling unitary", n, &u)?;
        let residual = linalg::unitarity_residual(&u);
        if residual > tol::UNITARY_TOL {
            return Err(QprobError::InvalidChannel {
                reason: "U is not unitary",
                residual,
            });
        }
        let total = total_hamiltonian(&hc.matrix, &hh.matrix);
        let residual = linalg::frobenius(&linalg::commutator(&total, &u)?);
        if residual > tol::ENERGY_PRESERVING_TOL {
            return Err(QprobError::NotEnergyPreserving { residual });
        }
        let rc = state::partial_trace(rho.matrix(), (dc, dh), true)?;
        let rh = state::partial_trace(rho.matrix(), (dc, dh), false)?;
        let residual = linalg::max_abs(&(rc - state::gibbs_state(&hc, beta_c)?.matrix()))
            .max(linalg::max_abs(&(rh - state::gibbs_state(&hh, beta_h)?.matrix())));
        if residual > 1e-9 {
            return Err(QprobError::NotLocallyThermal { residual });
        }
        Ok(HeatExchangeSpec {
            hc,
            hh,
            beta_c,
            beta_h,
            rho,
            u,
        })
    }

    /// `beta_c - beta_h`
    pub fn delta_beta(&self) -> f64 {
        self.beta_c - self.beta_h
    }

    /// `<Q> = tr[(rho - U rho U^dagger) Hc]`
    pub fn average_heat(&self) -> f64 {
        average_heat_functional(self.rho.matrix(), &self.u, &self.hc.matrix, self.hh.dim())
    }

    /// `ln(d) / (beta_c - beta_h)` with `d` the local dimension.
    pub fn strong_backflow_threshold(&self) -> f64 {
        (self.hc.dim() as f64).ln() / self.delta_beta()
    }

    pub fn is_backflow(&self) -> bool {
        self.average_heat() > 0.0
    }

    pub fn is_strong_backflow(&self) -> bool {
        self.delta_beta() > 0.0 && self.average_heat() > self.strong_backflow_threshold()
    }
}

fn total_hamiltonian(hc: &CMatrix, hh: &CMatrix) -> CMatrix {
    kron(hc, &linalg::identity(hh.nrows())) + kron(&linalg::identity(hc.nrows()), hh)
}

/// `Re tr[(X - U X U^dagger)(Hc (x) I)]` for any Hermitian `X`, PSD or not.
pub fn average_heat_functional(x: &CMatrix, u: &CMatrix, hc: &CMatrix, dim_h: usize) -> f64 {
    let h = kron(hc, &linalg::identity(dim_h));
    let evolved = u * x * u.adjoint();
    trace_product(&(x - evolved), &h).re
}

/// Joint quasiprobabilities over local-branch quadruples `(ic, ih, fc, fh)`.
#[derive(Debug, Clone)]
pub struct HeatTable {
    pub energies_c: Vec<f64>,
    pub energies_h: Vec<f64>,
    pub q: Vec<Complex64>,
    pub p_tpm: Vec<f64>,
}

impl HeatTable {
    fn index(&self, ic: usize, ih: usize, fc: usize, fh: usize) -> usize {
        let (nc, nh) = (self.energies_c.len(), self.energies_h.len());
        ((ic * nh + ih) * nc + fc) * nh + fh
    }

    pub fn get(&self, ic: usize, ih: usize, fc: usize, fh: usize) -> Complex64 {
        self.q[self.index(ic, ih, fc, fh)]
    }

    pub fn tpm(&self, ic: usize, ih: usize, fc: usize, fh: usize) -> f64 {
        self.p_tpm[self.index(ic, ih, fc, fh)]
    }

    /// `(ic, ih, fc, fh)` in storage order.
    pub fn indices(&self) -> impl Iterator<Item = (usize, usize, usize, usize)> + '_ {
        let (nc, nh) = (self.energies_c.len(), self.energies_h.len());
        (0..nc).flat_map(move |ic| {
            (0..nh).flat_map(move |ih| (0..nc).flat_map(move |fc| (0..nh).map(move |fh| (ic, ih, fc, fh))))
        })
    }

    /// `Q = E_ic - E_fc`
    pub fn heat(&self, ic: usize, fc: usize) -> f64 {
        self.energies_c[ic] - self.energies_c[fc]
    }

    pub fn total(&self) -> Complex64 {
        self.q.iter().sum()
    }

    /// `sum Re q Q`
    pub fn average_heat(&self) -> f64 {
        self.indices()
            .map(|(ic, ih, fc, fh)| self.get(ic, ih, fc, fh).re * self.heat(ic, fc))
            .sum()
    }

    pub fn tpm_average_heat(&self) -> f64 {
        self.indices()
            .map(|(ic, ih, fc, fh)| self.tpm(ic, ih, fc, fh) * self.heat(ic, fc))
            .sum()
    }

    pub fn nonpositivity(&self) -> f64 {
        -1.0 + self.q.iter().map(|z| z.norm()).sum::<f64>()
    }
}

/// `Pi_ic (x) Pi_ih` in row-major `(ic, ih)` order.
fn joint_projectors(spec: &HeatExchangeSpec) -> Vec<CMatrix> {
    let mut out = Vec::new();
    for pc in spec.hc.spectrum.projectors() {
        for ph in spec.hh.spectrum.projectors() {
            out.push(kron(pc, ph));
        }
    }
    out
}

pub fn heat_table(spec: &HeatExchangeSpec) -> Result<HeatTable> {
    let proj = joint_projectors(spec);
    let rho = spec.rho.matrix();
    let heis: Vec<CMatrix> = proj.iter().map(|p| spec.u.adjoint() * p * &spec.u).collect();
    let rows: Vec<(Vec<Complex64>, Vec<f64>)> = proj
        .par_iter()
        .map(|pi| {
            let a = pi * rho;
            let post = &a * pi;
            heis.iter()
                .map(|h| (trace_product(h, &a), trace_product(h, &post).re))
                .unzip()
        })
        .collect();
    let (q, p_tpm) = rows.into_iter().fold((Vec::new(), Vec::new()), |(mut q, mut p), (rq, rp)| {
        q.extend(rq);
        p.extend(rp);
        (q, p)
    });
    Ok(HeatTable {
        energies_c: spec.hc.values(),
        energies_h: spec.hh.values(),
        q,
        p_tpm,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExchangeFluctuation {
    /// `<exp(dI + dbeta Q)>` over the heat quasiprobabilities
    pub lhs: Complex64,
    pub upsilon: Complex64,
    /// stochastic mutual information `I_{jc jh}` in row-major order
    pub mutual_information: Vec<f64>,
}

pub fn exchange_fluctuation(spec: &HeatExchangeSpec) -> Result<ExchangeFluctuation> {
    let table = heat_table(spec)?;
    let proj = joint_projectors(spec);
    let rho = spec.rho.matrix();
    let support: Vec<f64> = proj.iter().map(|p| trace_product(p, rho).re).collect();
    for (index, &s) in support.iter().enumerate() {
        if s <= 1e-14 {
            return Err(QprobError::ZeroSupportProjector { index, support: s });
        }
    }
    let local = |h: &Observable, beta: f64| -> Result<Vec<f64>> {
        let g = state::gibbs_state(h, beta)?;
        Ok(h.spectrum.projectors().map(|p| trace_product(p, g.matrix()).re).collect())
    };
    let pc = local(&spec.hc, spec.beta_c)?;
    let ph = local(&spec.hh, spec.beta_h)?;
    let nh = ph.len();
    let info: Vec<f64> = support
        .iter()
        .enumerate()
        .map(|(j, s)| (s / (pc[j / nh] * ph[j % nh])).ln())
        .collect();

    // coherences with respect to the local-pair projectors
    let mut chi = rho.clone();
    for p in &proj {
        chi -= p * rho * p;
    }
    let db = spec.delta_beta();
    let mut lhs = ZERO;
    let mut upsilon = ZERO;
    for (ic, ih, fc, fh) in table.indices() {
        let (i, f) = (ic * nh + ih, fc * nh + fh);
        let weight = (info[f] - info[i] + db * table.heat(ic, fc)).exp();
        lhs += table.get(ic, ih, fc, fh) * weight;
        let heis = spec.u.adjoint() * &proj[f] * &spec.u;
        upsilon += trace_product(&heis, &(&proj[i] * &chi)) * support[f] / support[i];
    }
    Ok(ExchangeFluctuation {
        lhs,
        upsilon,
        mutual_information: info,
    })
}

fn alpha(beta: f64) -> f64 {
    1.0 + (-beta).exp()
}

/// The two-qubit state with thermal marginals and a single coherence
/// `eta e^{i xi}` between `|01>` and `|10>`. Hermitian with unit trace for any
/// parameters; positivity is not checked here.
pub fn two_qubit_heat_matrix(p: f64, eta: f64, xi: f64, beta_c: f64, beta_h: f64) -> CMatrix {
    let (ac, ah) = (1.0 / alpha(beta_c), 1.0 / alpha(beta_h));
    let coh = c64(eta * xi.cos(), eta * xi.sin());
    let mut m = CMatrix::zeros(4, 4);
    m[(0, 0)] = c64(p, 0.0);
    m[(1, 1)] = c64(ac - p, 0.0);
    m[(2, 2)] = c64(ah - p, 0.0);
    m[(3, 3)] = c64(1.0 - ac - ah + p, 0.0);
    m[(1, 2)] = coh;
    m[(2, 1)] = coh.conj();
    m
}

/// Partial swap between `|01>` and `|10>`.
pub fn partial_swap(theta: f64) -> CMatrix {
    let (s, c) = theta.sin_cos();
    let mut u = linalg::identity(4);
    u[(1, 1)] = c64(c, 0.0);
    u[(1, 2)] = c64(-s, 0.0);
    u[(2, 1)] = c64(s, 0.0);
    u[(2, 2)] = c64(c, 0.0);
    u
}

/// `sin^2(theta) (1/(1+e^{beta_c}) - 1/(1+e^{beta_h}))`
pub fn two_qubit_heat_tpm_closed_form(theta: f64, beta_c: f64, beta_h: f64) -> f64 {
    theta.sin().powi(2) * (1.0 / (1.0 + beta_c.exp()) - 1.0 / (1.0 + beta_h.exp()))
}

/// `-eta cos(xi) sin(2 theta) + <Q>_TPM`
pub fn two_qubit_heat_closed_form(eta: f64, xi: f64, theta: f64, beta_c: f64, beta_h: f64) -> f64 {
    -eta * xi.cos() * (2.0 * theta).sin() + two_qubit_heat_tpm_closed_form(theta, beta_c, beta_h)
}

/// Two qubits with local Hamiltonians `diag(0, 1)`. Both the diagonal and the
/// coherent block of the state must be positive.
pub fn two_qubit_heat_preset(
    p: f64,
    eta: f64,
    xi: f64,
    theta: f64,
    beta_c: f64,
    beta_h: f64,
) -> Result<HeatExchangeSpec> {
    let m = two_qubit_heat_matrix(p, eta, xi, beta_c, beta_h);
    let d: Vec<f64> = (0..4).map(|k| m[(k, k)].re).collect();
    if let Some(k) = d.iter().position(|&v| v < -tol::DENSITY_TOL) {
        return Err(QprobError::NotPositiveSemidefinite {
            reason: format!("population {k} = {:.6} is negative; p must lie in [{:.6}, {:.6}]",
                d[k],
                1.0 / alpha(beta_c) + 1.0 / alpha(beta_h) - 1.0,
                (1.0 / alpha(beta_c)).min(1.0 / alpha(beta_h))),
        });
    }
    if eta * eta > d[1] * d[2] + 1e-15 {
        return Err(QprobError::NotPositiveSemidefinite {
            reason: format!("|eta| = {:.6} exceeds sqrt((1/alpha_c - p)(1/alpha_h - p)) = {:.6}", eta.abs(), (d[1] * d[2]).sqrt()),
        });
    }
    let h = Observable::new(linalg::diag(&[0.0, 1.0]), "diag(0,1)")?;
    HeatExchangeSpec::new(h.clone(), h, beta_c, beta_h, DensityOperator::new(m)?, partial_swap(theta))
}
