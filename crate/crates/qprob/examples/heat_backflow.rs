//! Two qubits at different temperatures, correlated through a coherence
//! between |01> and |10>. For some swap angles heat flows from cold to hot.

use std::f64::consts::PI;

use qprob::thermo;

fn main() -> qprob::Result<()> {
    let (p, xi, beta_c, beta_h) = (0.26, 0.0, 1.0, 0.1);
    for eta in [0.0, 0.2] {
        println!("eta = {eta}");
        for k in 0..=4 {
            let theta = PI * k as f64 / 4.0;
            let spec = thermo::two_qubit_heat_preset(p, eta, xi, theta, beta_c, beta_h)?;
            let table = thermo::heat_table(&spec)?;
            let ex = thermo::exchange_fluctuation(&spec)?;
            println!(
                "  theta = {:.2}  <Q> = {:+.4}  aleph = {:.4}  <e^(dI + db Q)> = {:.6}",
                theta,
                table.average_heat(),
                table.nonpositivity().max(0.0),
                ex.lhs
            );
        }
    }
    Ok(())
}
