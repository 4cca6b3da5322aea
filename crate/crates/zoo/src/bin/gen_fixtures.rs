//! Regenerates the fixture tree: `gen-fixtures [DIR]` (default `fixtures`).

use std::path::PathBuf;
use std::{env, fs};

fn main() -> std::io::Result<()> {
    let root = PathBuf::from(env::args().nth(1).unwrap_or_else(|| "fixtures".into()));
    for (rel, text) in dnnreuse_zoo::fixtures::render() {
        let path = root.join(rel);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        fs::write(&path, text)?;
    }
    println!("{:<22} {:>14} {:>9} {:>9} {:>9} {:>9}", "model", "macs", "M/W", "M/A", "ref M/W", "ref M/A");
    let profiles = dnnreuse_zoo::fixtures::zoo_profiles();
    for ((name, p), r) in profiles.iter().zip(dnnreuse_zoo::table::TABLE.iter()) {
        println!(
            "{:<22} {:>14} {:>9.2} {:>9.2} {:>9.2} {:>9.2}",
            name,
            p.macs,
            p.weight_reuse(),
            p.activation_reuse(),
            r.weight_reuse,
            r.activation_reuse
        );
    }
    Ok(())
}
