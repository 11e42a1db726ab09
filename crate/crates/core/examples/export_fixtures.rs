//! Write the procedural corridor and validation shapes as OBJ + TOML + CSV
//! files that the `preverb` command line tool can consume.
//!
//! ```text
//! cargo run --example export_fixtures [out_dir]
//! preverb bake --scene out/corridor.obj --materials out/corridor.toml --path out/corridor_path.csv --out bake.json
//! ```

use std::fs;
use std::path::PathBuf;

use preverb::fixtures;

fn main() -> std::io::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "fixtures".into()));
    fs::create_dir_all(&dir)?;
    let corridor = fixtures::corridor();
    fs::write(dir.join("corridor.obj"), &corridor.source.mesh)?;
    fs::write(dir.join("corridor.toml"), &corridor.source.materials)?;
    fs::write(dir.join("corridor_path.csv"), corridor.path_csv())?;
    for shape in fixtures::table1_shapes() {
        let stem = shape.name.to_lowercase().replace(' ', "_");
        fs::write(dir.join(format!("{stem}.obj")), &shape.source.mesh)?;
        fs::write(dir.join(format!("{stem}.toml")), &shape.source.materials)?;
    }
    let mut names: Vec<String> = fs::read_dir(&dir)?.filter_map(|e| e.ok()).map(|e| e.file_name().to_string_lossy().into_owned()).collect();
    names.sort();
    for n in names {
        println!("{}", dir.join(n).display());
    }
    Ok(())
}
