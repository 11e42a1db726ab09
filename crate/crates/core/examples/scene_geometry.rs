//! Load a mesh and its materials, check that it is closed, and report volume,
//! surface area and the analytic mean-free path 4V/S.
//!
//! ```text
//! cargo run --example scene_geometry                          # built-in shapes
//! cargo run --example scene_geometry -- room.obj room.toml    # your own scene
//! ```

use preverb::acoustics::mfp_analytic;
use preverb::fixtures;
use preverb::scene::Scene;

fn report(name: &str, scene: &Scene) -> preverb::Result<()> {
    let (v, s) = scene.analytic_volume_and_area()?;
    println!(
        "{name:<14} {:>5} triangles  V {v:>8.3} m^3  S {s:>8.3} m^2  mu {:.4} m  bounds {} .. {}",
        scene.triangles().len(),
        mfp_analytic(v, s)?,
        scene.bounds().min,
        scene.bounds().max
    );
    Ok(())
}

fn main() -> preverb::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if let [mesh, materials] = &args[..] {
        let scene = Scene::load_files(mesh.as_ref(), materials.as_ref())?;
        return report(mesh, &scene);
    }
    for shape in fixtures::table1_shapes() {
        report(shape.name, &shape.source.load()?)?;
    }
    report("corridor", &fixtures::corridor().source.load()?)?;

    // an open box is rejected with the offending edges
    let open = "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 0 1\nf 1 3 2\nf 1 2 4\nf 1 4 3\n";
    let scene = Scene::load(open, "[materials]\ndefault = [0.1, 0.1, 0.1, 0.1]\n")?;
    match scene.analytic_volume_and_area() {
        Err(e) => println!("open tetrahedron: {e}"),
        Ok(_) => unreachable!("a tetrahedron missing a face is not closed"),
    }
    Ok(())
}
