//! Benchmarks all four placement strategies on a small open-table suite
//! and prints the success-rate/time/cost table.

use momapos::eval::{evaluate, EvalConfig};
use momapos::fixtures;
use momapos::kinematics::presets;
use momapos::reachability::build_irm;

fn main() {
    let scenes = fixtures::table_suite(5);
    let robot = presets::generic6();
    let irm = build_irm(&robot, 200_000, 0.05, 7);

    let config = EvalConfig {
        start_xy: [-1.5, -1.5],
        ..EvalConfig::default()
    }
    .with_seed(1);
    let report = evaluate(&scenes, &robot, &irm, "apple", &config).unwrap();
    print!("{}", report.summary_text());

    let mut csv = Vec::new();
    report.write_csv(&mut csv).unwrap();
    let path = std::env::temp_dir().join("benchmark.csv");
    std::fs::write(&path, csv).unwrap();
    println!("per-case rows -> {}", path.display());
}
