//! End-to-end placement plan: find a base pose from which the robot can
//! drive up and open the fridge door, and print the timing breakdown.

use momapos::fixtures;
use momapos::kinematics::presets;
use momapos::reachability::build_irm;
use momapos::search::{plan, PlannerConfig};

fn main() {
    let scene = fixtures::fridge_scene();
    let robot = presets::generic6();
    let irm = build_irm(&robot, 500_000, 0.05, 7);

    let config = PlannerConfig {
        start_xy: [0.0, 1.0],
        ..PlannerConfig::default()
    }
    .with_seed(42);
    let result = plan(&scene, &robot, &irm, "fridge", &config).unwrap();

    match result.base {
        Some(base) => {
            println!("base: ({:.3}, {:.3}) yaw {:.3}", base.xy[0], base.xy[1], base.yaw);
            println!("nav path: {} waypoints", result.nav.as_ref().map_or(0, Vec::len));
        }
        None => println!("infeasible"),
    }
    println!(
        "selected {} of {} objects (alpha {:.3}), {} candidates over {} round(s)",
        result.importance.selected.len(),
        scene.objects.len(),
        result.alpha_final,
        result.candidates_evaluated,
        result.rounds
    );
    let [imp, model, field, tsp, feas] = result.timings.percentages();
    println!("timing: importance {imp:.1}% | modeling {model:.1}% | field {field:.1}% | sampling+tsp {tsp:.1}% | feasibility {feas:.1}%");
}
