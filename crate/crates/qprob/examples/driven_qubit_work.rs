//! Work statistics of a driven qubit prepared with coherence between its
//! energy levels: more work is extracted than any classical mixture allows.

use std::f64::consts::{PI, SQRT_2};

use qprob::thermo;

fn main() -> qprob::Result<()> {
    let omega = 1.0 + SQRT_2;
    println!("Omega t/pi   <W>_KDQ    <W>_TPM   bound   Re var    Im var");
    for k in 0..=8 {
        let x = k as f64 / 4.0;
        let protocol = thermo::driven_qubit_preset(omega, 1.0, 0.5, -0.5, x * PI / omega)?;
        let b = thermo::classical_bound(&protocol)?;
        let v = thermo::work_variance(&protocol)?;
        println!(
            "{x:>9.2}  {:+.4}  {:+.1e}  {:.4}  {:.4}  {:+.4}{}",
            b.avg_work_kdq,
            b.avg_work_tpm,
            b.classical_bound,
            v.re,
            v.im,
            if b.violation { "  exceeds bound" } else { "" }
        );
    }
    Ok(())
}
