//! Samples a Poisson strip, saves it in the CLPP binary format and reloads it.

use clpp::model::{default_window, read_cloud, sample_poisson_strip, write_cloud};

fn main() -> clpp::Result<()> {
    let t = 100.0;
    let cloud = sample_poisson_strip(1.0, t, default_window(t, 1.0), 7)?;
    let dir = std::env::temp_dir().join("clpp-example");
    std::fs::create_dir_all(&dir).map_err(|e| clpp::Error::Io { path: dir.display().to_string(), source: e })?;
    let path = dir.join("strip.clpp");
    write_cloud(&cloud, &path)?;
    let back = read_cloud(&path)?;
    assert_eq!(back, cloud);
    println!("{} points written to {} and reloaded", cloud.len(), path.display());
    Ok(())
}
