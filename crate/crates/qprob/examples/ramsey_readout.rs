//! Reads the characteristic function off an ancilla qubit and inverts it on
//! the known support `{-2, 0, 2}`.

use qprob::linalg::c64;
use qprob::{presets, schemes};

fn main() -> qprob::Result<()> {
    let s = presets::qubit_ramsey(c64(0.3, 0.2))?;
    let atoms = [-2.0, 0.0, 2.0];
    let us = schemes::default_u_grid(&atoms);
    let readout = schemes::ramsey_simulate(&s.rho, &s.o1, &s.channel, &s.o2, &us)?;
    for sample in readout.samples.iter().take(4) {
        let exact = s.characteristic(c64(sample.u, 0.0))?;
        println!("u = {:.3}  <sx> + i<sy> = {:.6}  G(u) = {:.6}", sample.u, sample.value(), exact);
    }
    let rec = schemes::reconstruct_distribution(&readout, &atoms)?;
    println!("condition number {:.2}, residual {:.1e}", rec.condition, rec.residual);
    for a in &rec.distribution.atoms {
        println!("P[{:+.0}] = {:.6}", a.value, a.weight);
    }
    Ok(())
}
