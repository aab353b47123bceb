//! Loschmidt echo of a qubit and the nonclassicality of its KDQ as the
//! perturbation grows.

use qprob::manybody;

fn main() -> qprob::Result<()> {
    let b = 1.0;
    for delta in [0.2, 0.5, 1.0, 2.0, 4.0] {
        let spec = manybody::qubit_loschmidt_preset(b, delta)?;
        let table = manybody::loschmidt_kdq(&spec)?;
        println!(
            "delta = {delta:.1}  L(1) = {:.4}  aleph = {:.4}",
            manybody::loschmidt_echo(&spec, 1.0),
            table.nonpositivity()
        );
    }
    Ok(())
}
