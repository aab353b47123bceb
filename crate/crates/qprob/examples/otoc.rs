//! Out-of-time-ordered correlator of two coupled qubits as the
//! characteristic function of a KDQ.

use std::f64::consts::PI;

use qprob::manybody;

fn main() -> qprob::Result<()> {
    let spec = manybody::two_qubit_otoc_preset(1.0, 1.1, 2.0, 10.0)?;
    println!("   t     F(t)                 Re q(+1,+1)");
    for k in 0..=10 {
        let t = 0.3 * k as f64;
        let f = manybody::otoc(&spec, t, PI / 2.0)?;
        let q = manybody::otoc_kdq(&spec, t)?.q;
        println!("{t:5.2}  {:+.4} {:+.4}i   {:+.4}", f.re, f.im, q[(1, 1)].re);
    }
    Ok(())
}
