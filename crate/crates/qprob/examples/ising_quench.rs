//! Work distribution of a transverse-field Ising chain quenched from a
//! coherent Gibbs state, assembled mode by mode.

use qprob::ising::{self, IsingQuenchSpec};

fn main() -> qprob::Result<()> {
    let spec = IsingQuenchSpec { n: 12, lambda0: 0.0, lambda1: 0.5, beta: 0.1, p: 1.0 };
    let dist = ising::assemble_distribution(&spec)?;
    let negative = dist.atoms.iter().filter(|a| a.weight.re < 0.0).count();
    println!("{} atoms, {negative} with negative weight", dist.len());
    for row in ising::moments_sweep(&spec, &[0.0, 0.5, 1.0])? {
        println!("p = {:.1}  <W> = {:+.5}  var = {:.5}", row.p, row.mean, row.variance);
    }
    for (w, mass) in ising::histogram(&dist, 12) {
        println!("{w:+7.3} {mass:+.5}");
    }
    Ok(())
}
