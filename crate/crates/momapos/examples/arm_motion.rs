//! Low-level motion primitives: IK to a grasp point, RRT around an
//! obstacle, and an A* navigation path on the occupancy grid.

use momapos::geom::Aabb;
use momapos::kinematics::{presets, BasePose, IkParams};
use momapos::motion::{arm_rrt, nav_path, path_length, RrtParams};
use momapos::scene::build_occupancy;
use momapos::fixtures;
use std::collections::HashSet;

fn main() {
    let robot = presets::generic6();

    // IK: reach a point 0.7 m out, 0.9 m up, in the arm frame
    let target = [0.7, 0.0, 0.9];
    let q = robot.solve_ik(target, &IkParams::default()).expect("reachable");
    let ee = robot.fk_unchecked(&q).position;
    println!("ik error: {:.4} m", (0..3).map(|k| (ee[k] - target[k]).powi(2)).sum::<f64>().sqrt());

    // RRT: detour around a box between two configurations, arm based at
    // the world origin
    let q_goal = robot.solve_ik([0.0, 0.7, 0.9], &IkParams::default()).expect("reachable");
    let at_origin = BasePose { xy: [0.0, 0.0], yaw: 0.0 };
    let block = Aabb::new([0.35, 0.35, 0.8], [0.55, 0.55, 2.0]);
    let params = RrtParams { seed: 5, ..RrtParams::default() };
    match arm_rrt(&robot, &at_origin, &q, &q_goal, &[block], &params) {
        Some(traj) => println!("rrt: {} configurations", traj.len()),
        None => println!("rrt: no trajectory in budget"),
    }

    // navigation on the fridge-scene occupancy grid
    let scene = fixtures::fridge_scene();
    let subset: HashSet<String> = scene.ids().map(str::to_string).collect();
    let footprint = Aabb::new([0.0; 3], robot.base_dims);
    let grid = build_occupancy(&scene, &subset, 0.05, &footprint).unwrap();
    let base = BasePose::facing([0.95, 3.0], [1.15, 3.77, 0.95]);
    let path = nav_path(&grid, [0.0, 1.0], base.xy).expect("reachable");
    println!("nav: {} cells, {:.2} m", path.len(), path_length(&path));
}
