//! Margenau-Hill quasiprobability of a spin-1 rebuilt from three measurable
//! probabilities: the strong two-point joint, the undisturbed final marginal
//! and the final marginal after a binary weak-then-strong measurement.

use qprob::presets;
use qprob::quasiprob::Ordering;
use qprob::schemes;

fn main() -> qprob::Result<()> {
    let s = presets::spin1_wtpm()?;
    let direct = s.kdq(Ordering::Kdq1)?.mhq();
    let rebuilt = schemes::mhq_table_via_wtpm(&s.rho, &s.o1, &s.channel, &s.o2)?;
    println!("Sz\\Sx    -1        0        +1");
    for (i, z) in s.o1.values().iter().enumerate() {
        let row: Vec<String> = (0..3).map(|j| format!("{:+.5}", rebuilt[(i, j)])).collect();
        println!("{z:+.0}   {}", row.join("  "));
    }
    println!("max |direct - rebuilt| = {:.1e}", (direct - rebuilt).amax());
    Ok(())
}
