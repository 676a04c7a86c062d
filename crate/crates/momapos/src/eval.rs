//! Benchmark harness: runs placement strategies over scene suites, verifies
//! every proposed placement with the same ground-truth check, and reports
//! success rate, planning time, and navigation cost.

use crate::baselines::{habitat_placement, m3star_placement, reuleaux_placement, DEFAULT_BUDGET};
use crate::geom::Aabb;
use crate::kinematics::{BasePose, RobotModel};
use crate::motion::{check_manipulation_feasibility, nav_path, path_length, FeasibilityParams};
use crate::reachability::ReachabilityMap;
use crate::scene::{build_occupancy, Scene};
use crate::search::{plan, PlanError, PlannerConfig};
use serde::Serialize;
use std::collections::HashSet;
use std::io::Write;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    MomaPos,
    Habitat,
    M3Star,
    Reuleaux,
}

impl Strategy {
    pub const ALL: [Strategy; 4] =
        [Strategy::MomaPos, Strategy::Habitat, Strategy::M3Star, Strategy::Reuleaux];

    pub fn name(&self) -> &'static str {
        match self {
            Strategy::MomaPos => "momapos",
            Strategy::Habitat => "habitat",
            Strategy::M3Star => "m3star",
            Strategy::Reuleaux => "reuleaux",
        }
    }

    pub fn from_name(name: &str) -> Option<Strategy> {
        Strategy::ALL.iter().copied().find(|s| s.name() == name)
    }
}

#[derive(Debug, Clone)]
pub struct EvalConfig {
    pub strategies: Vec<Strategy>,
    pub planner: PlannerConfig,
    pub budget: usize,
    pub seed: u64,
    pub start_xy: [f64; 2],
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            strategies: Strategy::ALL.to_vec(),
            planner: PlannerConfig::default(),
            budget: DEFAULT_BUDGET,
            seed: 0,
            start_xy: [0.0, 0.0],
        }
    }
}

impl EvalConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self.planner = self.planner.with_seed(seed);
        self
    }
}

/// Ground-truth acceptance of a placement: the robot can drive there from
/// the start, and the full manipulation succeeds with every scene object
/// modeled. Returns the navigation cost on success.
pub fn verify_placement(
    scene: &Scene,
    robot: &RobotModel,
    base: &BasePose,
    target_id: &str,
    start_xy: [f64; 2],
    resolution: f64,
    seed: u64,
) -> Option<f64> {
    let subset: HashSet<String> = scene.ids().map(str::to_string).collect();
    let footprint = Aabb::new([0.0; 3], robot.base_dims);
    let grid = build_occupancy(scene, &subset, resolution, &footprint).ok()?;
    let path = nav_path(&grid, start_xy, base.xy)?;
    let params = FeasibilityParams::default().with_seed(seed);
    check_manipulation_feasibility(scene, &subset, robot, base, target_id, &params).ok()?;
    Some(path_length(&path))
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseResult {
    pub scene_index: usize,
    pub strategy: Strategy,
    /// Strategy proposed a placement at all.
    pub proposed: bool,
    /// Proposed placement passed ground-truth verification.
    pub success: bool,
    pub time_s: f64,
    /// Navigation cost from the start; only present on success.
    pub cost: Option<f64>,
    pub base: Option<BasePose>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct StrategySummary {
    pub strategy: Strategy,
    pub cases: usize,
    pub successes: usize,
    pub srate: f64,
    pub mean_time_s: f64,
    /// Mean over successful cases; None when there are none.
    pub mean_cost: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvalReport {
    pub target: String,
    pub cases: Vec<CaseResult>,
}

impl EvalReport {
    /// Aggregates are always derived from the case rows, never cached.
    pub fn summaries(&self) -> Vec<StrategySummary> {
        Strategy::ALL
            .iter()
            .filter(|s| self.cases.iter().any(|c| c.strategy == **s))
            .map(|&strategy| {
                let rows: Vec<&CaseResult> =
                    self.cases.iter().filter(|c| c.strategy == strategy).collect();
                let successes = rows.iter().filter(|c| c.success).count();
                let costs: Vec<f64> = rows.iter().filter_map(|c| c.cost).collect();
                StrategySummary {
                    strategy,
                    cases: rows.len(),
                    successes,
                    srate: successes as f64 / rows.len() as f64,
                    mean_time_s: rows.iter().map(|c| c.time_s).sum::<f64>() / rows.len() as f64,
                    mean_cost: if costs.is_empty() {
                        None
                    } else {
                        Some(costs.iter().sum::<f64>() / costs.len() as f64)
                    },
                }
            })
            .collect()
    }

    pub fn write_csv(&self, w: &mut impl Write) -> std::io::Result<()> {
        writeln!(w, "scene,strategy,proposed,success,time_s,cost,base_x,base_y,base_yaw")?;
        for c in &self.cases {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{}",
                c.scene_index,
                c.strategy.name(),
                u8::from(c.proposed),
                u8::from(c.success),
                c.time_s,
                c.cost.map(|v| v.to_string()).unwrap_or_default(),
                c.base.map(|b| b.xy[0].to_string()).unwrap_or_default(),
                c.base.map(|b| b.xy[1].to_string()).unwrap_or_default(),
                c.base.map(|b| b.yaw.to_string()).unwrap_or_default(),
            )?;
        }
        Ok(())
    }

    pub fn summary_text(&self) -> String {
        let mut out = format!("target: {}\n", self.target);
        for s in self.summaries() {
            out.push_str(&format!(
                "{:<9} srate {:>5.1}%  ({}/{})  mean time {:.3}s  mean cost {}\n",
                s.strategy.name(),
                100.0 * s.srate,
                s.successes,
                s.cases,
                s.mean_time_s,
                s.mean_cost.map(|c| format!("{c:.2} m")).unwrap_or_else(|| "-".into()),
            ));
        }
        out
    }
}

/// Runs every configured strategy on every scene against the same target
/// object, verifying each proposal with `verify_placement`.
pub fn evaluate(
    scenes: &[Scene],
    robot: &RobotModel,
    irm: &ReachabilityMap,
    target_id: &str,
    config: &EvalConfig,
) -> Result<EvalReport, PlanError> {
    let mut cases = Vec::with_capacity(scenes.len() * config.strategies.len());
    for (scene_index, scene) in scenes.iter().enumerate() {
        for &strategy in &config.strategies {
            let seed = config.seed ^ ((scene_index as u64) << 8);
            let t = Instant::now();
            let base = match strategy {
                Strategy::MomaPos => {
                    let planner = PlannerConfig {
                        start_xy: config.start_xy,
                        ..config.planner.clone()
                    }
                    .with_seed(seed);
                    plan(scene, robot, irm, target_id, &planner)?.base
                }
                Strategy::Habitat => habitat_placement(scene, robot, target_id),
                Strategy::M3Star => {
                    m3star_placement(scene, robot, target_id, seed, config.budget)
                }
                Strategy::Reuleaux => {
                    reuleaux_placement(scene, robot, irm, target_id, seed, config.budget)
                }
            };
            let time_s = t.elapsed().as_secs_f64();
            let cost = base.as_ref().and_then(|b| {
                verify_placement(
                    scene,
                    robot,
                    b,
                    target_id,
                    config.start_xy,
                    config.planner.resolution,
                    seed,
                )
            });
            cases.push(CaseResult {
                scene_index,
                strategy,
                proposed: base.is_some(),
                success: cost.is_some(),
                time_s,
                cost,
                base,
            });
        }
    }
    Ok(EvalReport {
        target: target_id.to_string(),
        cases,
    })
}
