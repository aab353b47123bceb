//! Gaussian pointer coupled to a qubit before a projective x measurement.
//! The sign of Re rho01 decides which side of the pointer gains weight.

use qprob::linalg::c64;
use qprob::{presets, schemes};

fn main() -> qprob::Result<()> {
    for r in [-0.3, 0.0, 0.3] {
        let (s, spec) = presets::gaussian_detector(c64(r, 0.0), 1.0, 0.6, 1.0)?;
        let pd = schemes::detector_position(&s.rho, &s.o1, &s.channel, &s.o2, &spec)?;
        let phase = schemes::detector_phase(&s.rho, &s.o1, &s.channel, &s.o2, spec.kappa * spec.p0)?;
        println!(
            "rho01 = {r:+.1}: integral {:.6}, asymmetry {:+.4}, phase {:.4}",
            pd.integral(),
            pd.asymmetry(),
            phase
        );
    }
    Ok(())
}
