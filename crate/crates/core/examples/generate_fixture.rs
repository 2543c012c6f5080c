//! Writes the synthetic project to a directory.
//!
//! ```text
//! cargo run -p sociominer-core --example generate_fixture -- fixtures/synthetic [seed]
//! ```

use std::path::PathBuf;

fn main() -> std::io::Result<()> {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| "fixtures/synthetic".into()));
    let seed = args.next().map(|s| s.parse().expect("seed must be an integer")).unwrap_or(42);
    let project = sociominer_core::fixtures::synthetic_project(&dir, seed)?;
    println!("wrote {} ({} committers)", project.config.display(), project.committers.len());
    Ok(())
}
