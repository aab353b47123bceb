//! Jarzynski-type equalities for a random protocol that starts with
//! coherence, in both the TPM and the KDQ form.

use qprob::random;
use qprob::thermo::{self, WorkProtocol};

fn main() -> qprob::Result<()> {
    let mut rng = random::rng(3);
    let protocol = WorkProtocol::new(
        random::observable(&mut rng, 3, false),
        random::observable(&mut rng, 3, false),
        random::channel(&mut rng, 3),
        random::density(&mut rng, 3),
    )?;
    let beta = 0.7;
    let tpm = thermo::jarzynski_tpm(&protocol, beta)?;
    let kdq = thermo::jarzynski_kdq(&protocol, beta)?;
    println!("dF = {:.6}", tpm.delta_f);
    println!("TPM: <e^-bW> = {:.12}, e^-bdF gamma = {:.12}", tpm.lhs, tpm.rhs);
    println!("KDQ: <e^-bW> = {:.12}, e^-bdF Gamma = {:.12}", kdq.lhs, kdq.rhs);
    Ok(())
}
