//! A qubit measured along z and then along x. The KDQ departs from the
//! two-point-measurement probabilities by exactly the coherence.

use qprob::linalg::c64;
use qprob::presets;
use qprob::quasiprob::Ordering;

fn main() -> qprob::Result<()> {
    let rho01 = c64(0.3, 0.1);
    let setup = presets::stern_gerlach(rho01, 0.5)?;
    let t = setup.kdq(Ordering::Kdq1)?;
    println!("  z    x         KDQ                 TPM");
    for (i, z) in t.outcomes1.iter().enumerate() {
        for (j, x) in t.outcomes2.iter().enumerate() {
            let q = t.q[(i, j)];
            println!("{z:+.0} {x:+.0}   {:+.4} {:+.4}i   {:.4}", q.re, q.im, t.p_tpm[(i, j)]);
        }
    }
    println!("aleph = {:.4}", t.nonpositivity());
    println!("<do> = {:.4} (2 Re rho01 = {:.4})", t.distribution()?.mean().re, 2.0 * rho01.re);
    Ok(())
}
