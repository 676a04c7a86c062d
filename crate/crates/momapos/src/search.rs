//! The full placement pipeline: importance-driven scene reduction, Latin
//! hypercube candidate sampling over the reachable area, score-ordered
//! groups visited in open-TSP order, and per-candidate feasibility checks
//! with threshold annealing when a round comes up empty.

use crate::geom::Aabb;
use crate::importance::{score_scene, select_objects, EmbedParams, ImportanceError, ImportanceResult, WalkParams};
use crate::kinematics::{BasePose, RobotModel};
use crate::motion::{check_manipulation_feasibility, nav_path, FeasibilityParams};
use crate::potential::{
    candidate_area, combined_score, target_waypoints, CandidateArea, PlacementError, Weights,
};
use crate::reachability::ReachabilityMap;
use crate::scene::{build_occupancy, Scene, SceneError};
use serde::Serialize;
use std::collections::HashSet;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("importance scoring failed: {0}")]
    Importance(#[from] ImportanceError),
    #[error("scene problem: {0}")]
    Scene(#[from] SceneError),
    #[error("unknown target `{0}`")]
    UnknownTarget(String),
    #[error("grid would be smaller than 2x2 cells at this resolution")]
    ResolutionTooCoarse,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlannerConfig {
    /// Candidate samples per round; when it covers the whole cell lattice
    /// the round degrades to exhaustive enumeration.
    pub samples: usize,
    /// Candidates per visit group.
    pub group_size: usize,
    /// Distance weight in the visit-order objective.
    pub k1: f64,
    /// Field-difference weight in the visit-order objective.
    pub k1_prime: f64,
    pub alpha_init: f64,
    pub alpha_decay: f64,
    /// At or below this threshold the selection becomes the whole scene.
    pub alpha_min: f64,
    pub weights: Weights,
    /// Cell pitch for candidate snapping and the navigation grid.
    pub resolution: f64,
    pub seed: u64,
    /// Where the robot starts; placements it cannot drive to are rejected.
    pub start_xy: [f64; 2],
    pub walk: WalkParams,
    pub embed: EmbedParams,
    pub feasibility: FeasibilityParams,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig {
            samples: 100,
            group_size: 8,
            k1: 1.0,
            k1_prime: -1.0,
            alpha_init: 0.45,
            alpha_decay: 0.9,
            alpha_min: 0.05,
            weights: Weights::default(),
            resolution: 0.05,
            seed: 0,
            start_xy: [0.0, 0.0],
            // lighter than the standalone-analysis defaults: inside the
            // planner the scores only gate object selection, and the stage
            // has to stay a sliver of total planning time
            walk: WalkParams {
                walks_per_node: 4,
                walk_length: 6,
                ..WalkParams::default()
            },
            embed: EmbedParams {
                dim: 8,
                window: 2,
                negatives: 2,
                epochs: 4,
                learning_rate: 0.06,
                ..EmbedParams::default()
            },
            feasibility: FeasibilityParams::default(),
        }
    }
}

impl PlannerConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self.walk.seed = seed;
        self.embed.seed = seed.wrapping_add(1);
        self
    }
}

/// Wall-clock seconds per pipeline stage.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct StageTimings {
    pub importance: f64,
    pub modeling: f64,
    pub potential_field: f64,
    pub sampling_tsp: f64,
    pub feasibility: f64,
}

impl StageTimings {
    pub fn total(&self) -> f64 {
        self.importance + self.modeling + self.potential_field + self.sampling_tsp + self.feasibility
    }

    /// Stage shares in percent, in struct field order.
    pub fn percentages(&self) -> [f64; 5] {
        let t = self.total().max(f64::MIN_POSITIVE);
        [
            100.0 * self.importance / t,
            100.0 * self.modeling / t,
            100.0 * self.potential_field / t,
            100.0 * self.sampling_tsp / t,
            100.0 * self.feasibility / t,
        ]
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PlanResult {
    pub target: String,
    /// Chosen placement, or None when every round proves infeasible.
    pub base: Option<BasePose>,
    /// Drivable path from the start to the placement.
    pub nav: Option<Vec<[f64; 2]>>,
    pub importance: ImportanceResult,
    /// Selection threshold of the round that produced the answer.
    pub alpha_final: f64,
    pub rounds: usize,
    pub candidates_evaluated: usize,
    pub timings: StageTimings,
}

impl PlanResult {
    pub fn feasible(&self) -> bool {
        self.base.is_some()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Latin hypercube sample over the area's bounding rectangle: `m` strata
/// per axis, one jittered point per (column, permuted row) pair, rejecting
/// up to 20 redraws per stratum against area membership. Strata whose
/// member region misses the jitter budget yield no sample.
pub fn lhs_sample(area: &CandidateArea, m: usize, seed: u64) -> Vec<[f64; 2]> {
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    assert!(m >= 1);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let b = area.bounds;
    let (dx, dy) = (b.width() / m as f64, b.height() / m as f64);
    let mut rows: Vec<usize> = (0..m).collect();
    rows.shuffle(&mut rng);
    let mut out = Vec::with_capacity(m);
    for (col, &row) in rows.iter().enumerate() {
        for _ in 0..20 {
            let p = [
                b.min[0] + (col as f64 + rng.random::<f64>()) * dx,
                b.min[1] + (row as f64 + rng.random::<f64>()) * dy,
            ];
            if area.is_member(p) {
                out.push(p);
                break;
            }
        }
    }
    out
}

/// Visit order over candidate points starting from `start`: minimizes
/// sum of k1 * distance + k1' * (field gain) along the open path. Exact
/// (Held-Karp) up to 12 points, greedy nearest-weight beyond. Ties break
/// toward the lower index.
pub fn open_tsp_order(
    start: [f64; 2],
    points: &[[f64; 2]],
    fields: &[f64],
    k1: f64,
    k1_prime: f64,
) -> Vec<usize> {
    assert_eq!(points.len(), fields.len());
    let n = points.len();
    if n == 0 {
        return vec![];
    }
    let d = |a: [f64; 2], b: [f64; 2]| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
    let w = |i: usize, j: usize| k1 * d(points[i], points[j]) + k1_prime * (fields[j] - fields[i]);
    let w0 = |j: usize| k1 * d(start, points[j]) + k1_prime * fields[j];
    if n <= 12 {
        // Held-Karp over subsets; dp[mask][last] = best cost reaching
        // `last` having visited `mask`
        let full = 1usize << n;
        let mut dp = vec![vec![f64::INFINITY; n]; full];
        let mut from = vec![vec![usize::MAX; n]; full];
        for j in 0..n {
            dp[1 << j][j] = w0(j);
        }
        for mask in 1..full {
            for last in 0..n {
                if mask & (1 << last) == 0 || !dp[mask][last].is_finite() {
                    continue;
                }
                for next in 0..n {
                    if mask & (1 << next) != 0 {
                        continue;
                    }
                    let nm = mask | (1 << next);
                    let c = dp[mask][last] + w(last, next);
                    if c < dp[nm][next] {
                        dp[nm][next] = c;
                        from[nm][next] = last;
                    }
                }
            }
        }
        let mut best = 0;
        for j in 1..n {
            if dp[full - 1][j] < dp[full - 1][best] {
                best = j;
            }
        }
        let mut order = vec![best];
        let mut mask = full - 1;
        let mut at = best;
        while from[mask][at] != usize::MAX {
            let prev = from[mask][at];
            mask &= !(1 << at);
            at = prev;
            order.push(at);
        }
        order.reverse();
        order
    } else {
        let mut left: Vec<usize> = (0..n).collect();
        let mut order = Vec::with_capacity(n);
        let cost_from = |cur: Option<usize>, j: usize| match cur {
            None => w0(j),
            Some(i) => w(i, j),
        };
        let mut cur = None;
        while !left.is_empty() {
            let mut pick = 0;
            let mut pick_cost = f64::INFINITY;
            for (k, &j) in left.iter().enumerate() {
                let c = cost_from(cur, j);
                if c < pick_cost {
                    pick = k;
                    pick_cost = c;
                }
            }
            let j = left.remove(pick);
            order.push(j);
            cur = Some(j);
        }
        order
    }
}

/// Splits candidate indices into groups of `t`, highest combined score
/// first (ties toward the lower index).
pub fn group_candidates(scores: &[f64], t: usize) -> Vec<Vec<usize>> {
    assert!(t >= 1);
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap().then(a.cmp(&b)));
    idx.chunks(t).map(|c| c.to_vec()).collect()
}

/// Deterministic per-candidate seed shared by the planner and any external
/// verifier, derived from the cell's lattice indices.
pub fn candidate_seed(seed: u64, ix: usize, iy: usize) -> u64 {
    seed ^ ((ix as u64) << 24) ^ ((iy as u64) << 4) ^ 0x5bd1_e995
}

struct RoundOutcome {
    base: Option<BasePose>,
    nav: Option<Vec<[f64; 2]>>,
    evaluated: usize,
}

pub fn plan(
    scene: &Scene,
    robot: &RobotModel,
    irm: &ReachabilityMap,
    target_id: &str,
    config: &PlannerConfig,
) -> Result<PlanResult, PlanError> {
    let target_obj = scene
        .object(target_id)
        .ok_or_else(|| PlanError::UnknownTarget(target_id.to_string()))?;
    let mut timings = StageTimings::default();

    let t = Instant::now();
    let scores = score_scene(scene, target_id, &config.walk, &config.embed)?;
    timings.importance = t.elapsed().as_secs_f64();

    let waypoints = target_waypoints(target_obj);
    let mut alpha = config.alpha_init;
    let mut rounds = 0;
    let mut evaluated = 0;
    loop {
        rounds += 1;
        let whole_scene = alpha <= config.alpha_min;
        let importance = select_objects(&scores, target_id, alpha);
        let subset: HashSet<String> = if whole_scene {
            scene.ids().map(str::to_string).collect()
        } else {
            importance.selected.iter().cloned().collect()
        };

        match plan_round(scene, robot, irm, target_id, &subset, &waypoints, config, &mut timings) {
            Ok(outcome) => {
                evaluated += outcome.evaluated;
                if outcome.base.is_some() {
                    return Ok(PlanResult {
                        target: target_id.to_string(),
                        base: outcome.base,
                        nav: outcome.nav,
                        importance,
                        alpha_final: alpha,
                        rounds,
                        candidates_evaluated: evaluated,
                        timings,
                    });
                }
            }
            Err(RoundError::Empty) => {}
            Err(RoundError::OutOfVerticalReach) => {
                // no base height fixes this; modeling more objects won't
                // either
                return Ok(PlanResult {
                    target: target_id.to_string(),
                    base: None,
                    nav: None,
                    importance,
                    alpha_final: alpha,
                    rounds,
                    candidates_evaluated: evaluated,
                    timings,
                });
            }
            Err(RoundError::TooCoarse) => return Err(PlanError::ResolutionTooCoarse),
            Err(RoundError::Scene(e)) => return Err(PlanError::Scene(e)),
        }
        if whole_scene {
            return Ok(PlanResult {
                target: target_id.to_string(),
                base: None,
                nav: None,
                importance,
                alpha_final: alpha,
                rounds,
                candidates_evaluated: evaluated,
                timings,
            });
        }
        alpha = (alpha * config.alpha_decay).max(config.alpha_min * 0.999);
        // jump straight to the whole scene once decay bottoms out
        if alpha < config.alpha_min {
            alpha = config.alpha_min;
        }
    }
}

enum RoundError {
    Empty,
    OutOfVerticalReach,
    TooCoarse,
    Scene(SceneError),
}

#[allow(clippy::too_many_arguments)]
fn plan_round(
    scene: &Scene,
    robot: &RobotModel,
    irm: &ReachabilityMap,
    target_id: &str,
    subset: &HashSet<String>,
    waypoints: &[[f64; 3]],
    config: &PlannerConfig,
    timings: &mut StageTimings,
) -> Result<RoundOutcome, RoundError> {
    // modeling: reachable area and navigation grid for this subset
    let t = Instant::now();
    let area = match candidate_area(scene, subset, robot, target_id) {
        Ok(a) => a,
        Err(PlacementError::EmptyArea) => return Err(RoundError::Empty),
        Err(PlacementError::OutOfVerticalReach) => return Err(RoundError::OutOfVerticalReach),
        Err(PlacementError::ResolutionTooCoarse) => return Err(RoundError::TooCoarse),
        Err(e) => unreachable!("{e}"),
    };
    let footprint = Aabb::new([0.0; 3], robot.base_dims);
    let mut nav_subset = subset.clone();
    nav_subset.insert(target_id.to_string());
    let grid = match build_occupancy(scene, &nav_subset, config.resolution, &footprint) {
        Ok(g) => g,
        Err(SceneError::ResolutionTooCoarse) => return Err(RoundError::TooCoarse),
        Err(e) => return Err(RoundError::Scene(e)),
    };
    timings.modeling += t.elapsed().as_secs_f64();

    // potential field normalizer over the member lattice
    let t = Instant::now();
    let field_max = area.field_max(waypoints);
    timings.potential_field += t.elapsed().as_secs_f64();

    // sampling: candidate cells at the planner resolution
    let t = Instant::now();
    let snap = |p: [f64; 2]| -> (usize, usize, [f64; 2]) {
        let ix = ((p[0] - area.bounds.min[0]) / config.resolution).floor().max(0.0) as usize;
        let iy = ((p[1] - area.bounds.min[1]) / config.resolution).floor().max(0.0) as usize;
        (
            ix,
            iy,
            [
                area.bounds.min[0] + (ix as f64 + 0.5) * config.resolution,
                area.bounds.min[1] + (iy as f64 + 0.5) * config.resolution,
            ],
        )
    };
    let lattice: Vec<(usize, usize, [f64; 2])> = {
        let nx = (area.bounds.width() / config.resolution).ceil() as usize;
        let ny = (area.bounds.height() / config.resolution).ceil() as usize;
        let mut cells = Vec::new();
        for iy in 0..ny {
            for ix in 0..nx {
                let p = [
                    area.bounds.min[0] + (ix as f64 + 0.5) * config.resolution,
                    area.bounds.min[1] + (iy as f64 + 0.5) * config.resolution,
                ];
                if area.is_member(p) {
                    cells.push((ix, iy, p));
                }
            }
        }
        cells
    };
    if lattice.is_empty() {
        timings.sampling_tsp += t.elapsed().as_secs_f64();
        return Err(RoundError::Empty);
    }
    let candidates: Vec<(usize, usize, [f64; 2])> = if config.samples >= lattice.len() {
        lattice
    } else {
        let mut seen = HashSet::new();
        lhs_sample(&area, config.samples, config.seed)
            .into_iter()
            .map(snap)
            .filter(|&(ix, iy, p)| area.is_member(p) && seen.insert((ix, iy)))
            .collect()
    };
    if candidates.is_empty() {
        timings.sampling_tsp += t.elapsed().as_secs_f64();
        return Err(RoundError::Empty);
    }
    let scores: Vec<f64> = candidates
        .iter()
        .map(|&(_, _, p)| {
            combined_score(&area, irm, robot, p, waypoints, config.weights, field_max)
                .expect("candidate is a member")
        })
        .collect();
    let fields: Vec<f64> = candidates
        .iter()
        .map(|&(_, _, p)| {
            if field_max > 0.0 {
                area.field_sum(p, waypoints) / field_max
            } else {
                0.0
            }
        })
        .collect();
    let groups = group_candidates(&scores, config.group_size);
    // visit order: open TSP within each group, chaining the start point
    let mut visit: Vec<usize> = Vec::with_capacity(candidates.len());
    let mut cur = config.start_xy;
    for g in &groups {
        let pts: Vec<[f64; 2]> = g.iter().map(|&i| candidates[i].2).collect();
        let fs: Vec<f64> = g.iter().map(|&i| fields[i]).collect();
        for k in open_tsp_order(cur, &pts, &fs, config.k1, config.k1_prime) {
            visit.push(g[k]);
        }
        if let Some(&last) = visit.last() {
            cur = candidates[last].2;
        }
    }
    timings.sampling_tsp += t.elapsed().as_secs_f64();

    // feasibility sweep in visit order
    let t = Instant::now();
    let mut evaluated = 0;
    let mut found: Option<(BasePose, Vec<[f64; 2]>)> = None;
    for &i in &visit {
        let (ix, iy, p) = candidates[i];
        evaluated += 1;
        let Some(path) = nav_path(&grid, config.start_xy, p) else {
            continue;
        };
        let base = BasePose::facing(p, area.target);
        let params = config
            .feasibility
            .clone()
            .with_seed(candidate_seed(config.seed, ix, iy));
        if check_manipulation_feasibility(scene, subset, robot, &base, target_id, &params).is_ok()
        {
            found = Some((base, path));
            break;
        }
    }
    timings.feasibility += t.elapsed().as_secs_f64();
    Ok(RoundOutcome {
        base: found.as_ref().map(|(b, _)| *b),
        nav: found.map(|(_, p)| p),
        evaluated,
    })
}
