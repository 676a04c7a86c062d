//! Builds an inverse reachability map for the 6-DOF preset, saves it, and
//! queries a few base-relative points.

use momapos::kinematics::{presets, BasePose};
use momapos::reachability::{build_irm, irm_query, load_irm, save_irm};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let robot = presets::generic6();
    let irm = build_irm(&robot, 500_000, 0.05, 7);
    println!(
        "built: {}x{}x{} voxels, {} nonzero, reach {:.3} m",
        irm.dims[0],
        irm.dims[1],
        irm.dims[2],
        irm.nonzero_voxels(),
        robot.arm_reach()
    );

    let path = std::env::temp_dir().join("generic6.irm");
    save_irm(&irm, &path)?;
    let reloaded = load_irm(&path)?;
    assert_eq!(irm, reloaded);
    println!("round-tripped through {}", path.display());

    // score a target from a few standoff distances
    let target = [0.6, 0.0, 0.9];
    for d in [0.3, 0.5, 0.8, 1.2] {
        let base = BasePose::facing([target[0] - d, 0.0], target);
        println!("standoff {d:.1} m -> score {:.3}", irm_query(&irm, &robot, &base, target));
    }
    Ok(())
}
