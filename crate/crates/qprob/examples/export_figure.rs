//! Writes a figure's data series as CSV and JSON with provenance metadata.

use qprob::figures;
use qprob::io::{Format, Metadata, ResultEnvelope};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let id = std::env::args().nth(1).unwrap_or_else(|| "fig3a".into());
    let payload = figures::figure(&id)?;
    let env = ResultEnvelope::new(Metadata::new("figure", &id), payload)?;
    let dir = std::env::temp_dir().join("qprob-figures");
    std::fs::create_dir_all(&dir)?;
    for path in env.write(&dir.join(&id), Format::Both)? {
        println!("wrote {}", path.display());
    }
    println!("{:?}", env.checks);
    Ok(())
}
