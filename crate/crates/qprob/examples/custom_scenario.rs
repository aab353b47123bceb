//! Builds a qutrit scenario by hand: a state, two observables and a noisy
//! channel, then prints the KDQ next to the non-demolition quasiprobability.

use qprob::linalg::{c64, diag, CMatrix};
use qprob::quasiprob::{self, Ordering};
use qprob::state::{DensityOperator, Observable, QuantumChannel};

fn main() -> qprob::Result<()> {
    let rho = DensityOperator::new(CMatrix::from_row_slice(
        3,
        3,
        &[
            c64(0.5, 0.0), c64(0.2, 0.1), c64(0.0, 0.0),
            c64(0.2, -0.1), c64(0.3, 0.0), c64(0.1, 0.0),
            c64(0.0, 0.0), c64(0.1, 0.0), c64(0.2, 0.0),
        ],
    ))?;
    let o1 = Observable::new(diag(&[-1.0, 0.0, 1.0]), "Jz")?;
    let o2 = Observable::new(qprob::presets::spin1_sx(), "Jx")?;
    // partial dephasing in the Jz basis
    let g = 0.3f64;
    let channel = QuantumChannel::kraus(vec![
        CMatrix::identity(3, 3) * c64((1.0 - g).sqrt(), 0.0),
        o1.spectrum.map(|v| c64(v, 0.0)) * c64(g.sqrt(), 0.0),
        o1.spectrum.map(|v| c64(1.0 - v * v, 0.0)) * c64(g.sqrt(), 0.0),
    ])?;

    let kdq = quasiprob::kdq(&rho, &o1, &channel, &o2, Ordering::Kdq1)?;
    let nd = quasiprob::ndqp(&rho, &o1, &channel, &o2)?;
    println!("KDQ sum {:.3}, aleph {:.4}", kdq.sum_q(), kdq.nonpositivity());
    println!("non-demolition total {:.3}", nd.total());
    println!("KDQ - TPM from the NDQP cross terms:\n{:.4}", nd.cross_terms());
    Ok(())
}
