//! Renders the candidate-area potential map for opening the fridge door to
//! a PGM image and a CSV table, and prints the best cell.

use momapos::fixtures;
use momapos::kinematics::presets;
use momapos::potential::{candidate_area, potential_map, target_waypoints, Weights};
use momapos::reachability::build_irm;
use std::collections::HashSet;
use std::fs::File;
use std::io::BufWriter;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scene = fixtures::fridge_scene();
    let robot = presets::generic6();
    let irm = build_irm(&robot, 500_000, 0.05, 7);

    let subset: HashSet<String> = scene.ids().map(str::to_string).collect();
    let area = candidate_area(&scene, &subset, &robot, "fridge")?;
    println!("candidate radius {:.3} m, {} member cells", area.radius, area.member_cells().len());

    let waypoints = target_waypoints(scene.object("fridge").unwrap());
    let map = potential_map(&area, &irm, &robot, &waypoints, 0.05, Weights::default())?;

    let dir = std::env::temp_dir();
    map.write_pgm(&mut BufWriter::new(File::create(dir.join("fridge_potential.pgm"))?))?;
    map.write_csv(&mut BufWriter::new(File::create(dir.join("fridge_potential.csv"))?))?;
    println!("wrote {}", dir.join("fridge_potential.pgm").display());

    let best = map.argmax().expect("area has member cells");
    println!("best cell: ({:.2}, {:.2})", best[0], best[1]);
    Ok(())
}
