//! Writes the bundled fixture scenes to JSON files usable with the CLI.

use momapos::fixtures;
use std::fs;

fn main() -> std::io::Result<()> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "scenes".into());
    fs::create_dir_all(&dir)?;
    for (name, scene) in [
        ("fridge", fixtures::fridge_scene()),
        ("table", fixtures::table_scene()),
        ("kitchen_30", fixtures::kitchen_30()),
    ] {
        let path = format!("{dir}/{name}.json");
        fs::write(&path, scene.to_json())?;
        println!("wrote {path} ({} objects)", scene.objects.len());
    }
    Ok(())
}
