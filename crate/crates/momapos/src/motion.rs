//! Motion feasibility: grid A* for the base, a joint-space RRT for the arm,
//! and the combined manipulation check used to vet a base placement.

use crate::geom::{Aabb, ObbXy};
use crate::grid::OccupancyGrid;
use crate::kinematics::{BasePose, IkParams, RobotModel};
use crate::scene::{collision_boxes, handle_waypoints, ObjectKind, Scene, DEFAULT_SWEEP_STEPS};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};

/// World-space sampling pitch for link collision points.
pub const LINK_POINT_SPACING: f64 = 0.02;
/// Joint-space interpolation pitch for edge collision checks (radians).
pub const EDGE_JOINT_STEP: f64 = 0.05;

/// Shortest 8-connected path between two world points on an occupancy
/// grid, as a polyline of cell centers. Diagonal moves may not cut corners.
pub fn nav_path(grid: &OccupancyGrid, start: [f64; 2], goal: [f64; 2]) -> Option<Vec<[f64; 2]>> {
    let (sx, sy) = grid.cell_of(start)?;
    let (gx, gy) = grid.cell_of(goal)?;
    if grid.is_occupied(sx, sy) || grid.is_occupied(gx, gy) {
        return None;
    }
    let idx = |x: usize, y: usize| y * grid.width + x;
    let h = |x: usize, y: usize| {
        let dx = x as f64 - gx as f64;
        let dy = y as f64 - gy as f64;
        (dx * dx + dy * dy).sqrt() * grid.resolution
    };
    let mut dist = vec![f64::INFINITY; grid.width * grid.height];
    let mut prev = vec![usize::MAX; grid.width * grid.height];
    // (f-score bits, tie-break index); f64 bits of nonnegative floats sort
    // like the floats themselves
    let mut heap: BinaryHeap<Reverse<(u64, usize)>> = BinaryHeap::new();
    dist[idx(sx, sy)] = 0.0;
    heap.push(Reverse((h(sx, sy).to_bits(), idx(sx, sy))));
    let mut done = vec![false; grid.width * grid.height];
    while let Some(Reverse((_, cur))) = heap.pop() {
        if done[cur] {
            continue;
        }
        done[cur] = true;
        let (cx, cy) = (cur % grid.width, cur / grid.width);
        if (cx, cy) == (gx, gy) {
            let mut cells = vec![(gx, gy)];
            let mut at = cur;
            while prev[at] != usize::MAX {
                at = prev[at];
                cells.push((at % grid.width, at / grid.width));
            }
            cells.reverse();
            return Some(cells.into_iter().map(|(x, y)| grid.cell_center(x, y)).collect());
        }
        for dy in -1i64..=1 {
            for dx in -1i64..=1 {
                if dx == 0 && dy == 0 {
                    continue;
                }
                let nx = cx as i64 + dx;
                let ny = cy as i64 + dy;
                if !grid.in_bounds(nx, ny) || grid.is_occupied(nx as usize, ny as usize) {
                    continue;
                }
                // no corner cutting: a diagonal needs both orthogonal
                // neighbors free
                if dx != 0
                    && dy != 0
                    && (grid.is_occupied(nx as usize, cy) || grid.is_occupied(cx, ny as usize))
                {
                    continue;
                }
                let step = if dx != 0 && dy != 0 {
                    std::f64::consts::SQRT_2
                } else {
                    1.0
                } * grid.resolution;
                let ni = idx(nx as usize, ny as usize);
                let nd = dist[cur] + step;
                if nd < dist[ni] {
                    dist[ni] = nd;
                    prev[ni] = cur;
                    heap.push(Reverse(((nd + h(nx as usize, ny as usize)).to_bits(), ni)));
                }
            }
        }
    }
    None
}

/// Total polyline length in the plane.
pub fn path_length(path: &[[f64; 2]]) -> f64 {
    path.windows(2)
        .map(|w| ((w[1][0] - w[0][0]).powi(2) + (w[1][1] - w[0][1]).powi(2)).sqrt())
        .sum()
}

/// World-space collision points of an arm configuration: the joint origins
/// plus interpolated points along every link at the sampling pitch.
pub fn link_points(robot: &RobotModel, base: &BasePose, q: &[f64]) -> Vec<[f64; 3]> {
    let origins = robot.joint_origins(q);
    let mut pts = Vec::new();
    for w in origins.windows(2) {
        let a = base.arm_to_world(robot, w[0]);
        let b = base.arm_to_world(robot, w[1]);
        let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2) + (b[2] - a[2]).powi(2)).sqrt();
        let steps = (len / LINK_POINT_SPACING).ceil().max(1.0) as usize;
        for s in 0..=steps {
            let t = s as f64 / steps as f64;
            pts.push([
                a[0] + t * (b[0] - a[0]),
                a[1] + t * (b[1] - a[1]),
                a[2] + t * (b[2] - a[2]),
            ]);
        }
    }
    pts
}

pub fn config_collides(
    robot: &RobotModel,
    base: &BasePose,
    q: &[f64],
    obstacles: &[Aabb],
) -> bool {
    link_points(robot, base, q)
        .iter()
        .any(|&p| obstacles.iter().any(|b| b.contains_point(p)))
}

/// Straight joint-space edge check, subdivided so no joint moves more than
/// the interpolation pitch between checked configurations.
pub fn edge_collides(
    robot: &RobotModel,
    base: &BasePose,
    from: &[f64],
    to: &[f64],
    obstacles: &[Aabb],
) -> bool {
    let max_delta = from
        .iter()
        .zip(to)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let steps = (max_delta / EDGE_JOINT_STEP).ceil().max(1.0) as usize;
    (0..=steps).any(|s| {
        let t = s as f64 / steps as f64;
        let q: Vec<f64> = from.iter().zip(to).map(|(a, b)| a + t * (b - a)).collect();
        config_collides(robot, base, &q, obstacles)
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RrtParams {
    pub step: f64,
    pub goal_bias: f64,
    pub max_iters: usize,
    pub seed: u64,
}

impl Default for RrtParams {
    fn default() -> Self {
        RrtParams {
            step: 0.1,
            goal_bias: 0.1,
            max_iters: 5000,
            seed: 0,
        }
    }
}

fn joint_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Seeded joint-space RRT between two collision-free configurations.
/// Returns the waypoint list (start and goal included), or None when the
/// endpoints collide or the iteration budget runs out.
pub fn arm_rrt(
    robot: &RobotModel,
    base: &BasePose,
    start: &[f64],
    goal: &[f64],
    obstacles: &[Aabb],
    params: &RrtParams,
) -> Option<Vec<Vec<f64>>> {
    if config_collides(robot, base, start, obstacles)
        || config_collides(robot, base, goal, obstacles)
    {
        return None;
    }
    // direct connection first; most queries in open space need nothing else
    if !edge_collides(robot, base, start, goal, obstacles) {
        return Some(vec![start.to_vec(), goal.to_vec()]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut nodes: Vec<Vec<f64>> = vec![start.to_vec()];
    let mut parent: Vec<usize> = vec![usize::MAX];
    for _ in 0..params.max_iters {
        let sample: Vec<f64> = if rng.random_bool(params.goal_bias) {
            goal.to_vec()
        } else {
            robot.random_config(&mut rng)
        };
        // nearest node, ties to the lowest index
        let (mut best, mut best_d) = (0usize, f64::INFINITY);
        for (i, n) in nodes.iter().enumerate() {
            let d = joint_dist(n, &sample);
            if d < best_d {
                best = i;
                best_d = d;
            }
        }
        if best_d < 1e-12 {
            continue;
        }
        let scale = (params.step / best_d).min(1.0);
        let new: Vec<f64> = nodes[best]
            .iter()
            .zip(&sample)
            .map(|(a, b)| a + scale * (b - a))
            .collect();
        if edge_collides(robot, base, &nodes[best], &new, obstacles) {
            continue;
        }
        nodes.push(new);
        parent.push(best);
        let ni = nodes.len() - 1;
        if joint_dist(&nodes[ni], goal) <= params.step
            && !edge_collides(robot, base, &nodes[ni], goal, obstacles)
        {
            let mut path = vec![goal.to_vec()];
            let mut at = ni;
            while at != usize::MAX {
                path.push(nodes[at].clone());
                at = parent[at];
            }
            path.reverse();
            return Some(path);
        }
    }
    None
}

/// Static obstacle set for arm motion while manipulating `target_id`:
/// every selected object's body box (closed door panels included), except
/// that the target contributes only its body — the grasped handle and the
/// moving door panel travel with the arm and are not obstacles to it. For
/// a rigid target even the body is dropped, since it is the grasped thing.
pub fn manipulation_obstacles(
    scene: &Scene,
    subset: &HashSet<String>,
    target_id: &str,
) -> Vec<Aabb> {
    let mut boxes = Vec::new();
    for obj in &scene.objects {
        if obj.id == target_id {
            if obj.kind == ObjectKind::Articulated {
                boxes.push(obj.bbox);
            }
            continue;
        }
        if !subset.contains(&obj.id) {
            continue;
        }
        boxes.push(obj.bbox);
        if let Some(j) = &obj.joint {
            boxes.push(j.panel_home);
        }
    }
    boxes
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityParams {
    /// Arc discretization for articulated targets.
    pub waypoints: usize,
    pub ik: IkParams,
    pub rrt: RrtParams,
    /// Reseeded IK attempts per waypoint when solutions collide.
    pub ik_attempts: usize,
}

impl Default for FeasibilityParams {
    fn default() -> Self {
        FeasibilityParams {
            waypoints: 10,
            ik: IkParams::default(),
            rrt: RrtParams::default(),
            ik_attempts: 10,
        }
    }
}

impl FeasibilityParams {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.ik = self.ik.with_seed(seed);
        self.rrt.seed = seed;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FeasibilityFailure {
    /// The base footprint intersects a selected object's body or door sweep.
    FootprintCollision,
    /// The arm's home configuration collides at this base pose.
    HomeCollision,
    /// No collision-free IK solution for this waypoint index.
    Ik { waypoint: usize },
    /// No arm path to the configuration for this waypoint index.
    Path { waypoint: usize },
    /// The target does not exist in the scene.
    UnknownTarget,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManipulationPlan {
    /// Collision-free configuration per waypoint.
    pub configs: Vec<Vec<f64>>,
    /// Arm path segments: home -> first waypoint, then between waypoints.
    pub segments: Vec<Vec<Vec<f64>>>,
}

/// Full manipulation check for a base placement: footprint clearance
/// against bodies and door sweeps, collision-free IK for every handle
/// waypoint, and RRT-connected arm motion through the whole sequence.
pub fn check_manipulation_feasibility(
    scene: &Scene,
    subset: &HashSet<String>,
    robot: &RobotModel,
    base: &BasePose,
    target_id: &str,
    params: &FeasibilityParams,
) -> Result<ManipulationPlan, FeasibilityFailure> {
    let target = match scene.object(target_id) {
        Some(o) => o,
        None => return Err(FeasibilityFailure::UnknownTarget),
    };
    // the parked base must clear door sweeps, not just static bodies
    let footprint = ObbXy {
        center: base.xy,
        half: [robot.base_dims[0] / 2.0, robot.base_dims[1] / 2.0],
        yaw: base.yaw,
    };
    for obj in &scene.objects {
        if obj.id != target_id && !subset.contains(&obj.id) {
            continue;
        }
        for b in collision_boxes(obj, DEFAULT_SWEEP_STEPS) {
            if b.z_overlaps(0.0, robot.base_dims[2])
                && footprint.overlaps_rect(&crate::geom::Rect::new(
                    [b.min[0], b.min[1]],
                    [b.max[0], b.max[1]],
                ))
            {
                return Err(FeasibilityFailure::FootprintCollision);
            }
        }
    }

    let waypoints: Vec<[f64; 3]> = match target.kind {
        ObjectKind::Articulated => {
            handle_waypoints(target, params.waypoints).expect("articulated target")
        }
        ObjectKind::Rigid => vec![target.position],
    };
    let obstacles = manipulation_obstacles(scene, subset, target_id);

    let home = robot.home_config();
    if config_collides(robot, base, &home, &obstacles) {
        return Err(FeasibilityFailure::HomeCollision);
    }

    let mut configs = Vec::with_capacity(waypoints.len());
    for (j, &wp) in waypoints.iter().enumerate() {
        let local = base.world_to_arm(robot, wp);
        let mut found = None;
        // attempt 0: full solve (home start first); later attempts descend
        // from fresh random configurations to reach other IK branches
        let mut rng = ChaCha8Rng::seed_from_u64(params.ik.seed ^ (j as u64) << 32);
        for attempt in 0..params.ik_attempts {
            let sol = if attempt == 0 {
                robot.solve_ik(local, &params.ik)
            } else {
                robot.solve_ik_from(&robot.random_config(&mut rng), local, &params.ik)
            };
            if let Some(q) = sol {
                if !config_collides(robot, base, &q, &obstacles) {
                    found = Some(q);
                    break;
                }
            }
        }
        match found {
            Some(q) => configs.push(q),
            None => return Err(FeasibilityFailure::Ik { waypoint: j }),
        }
    }

    let mut segments = Vec::with_capacity(configs.len());
    let mut cursor: &[f64] = &home;
    for (j, q) in configs.iter().enumerate() {
        match arm_rrt(robot, base, cursor, q, &obstacles, &params.rrt) {
            Some(path) => segments.push(path),
            None => return Err(FeasibilityFailure::Path { waypoint: j }),
        }
        cursor = q;
    }
    Ok(ManipulationPlan { configs, segments })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::geom::Rect;
    use crate::kinematics::presets;
    use crate::potential::target_point;
    use std::collections::VecDeque;

    fn grid_from_rows(rows: &[&str]) -> OccupancyGrid {
        let h = rows.len();
        let w = rows[0].len();
        let bounds = Rect::new([0.0, 0.0], [w as f64, h as f64]);
        let mut g = OccupancyGrid::new_free(&bounds, 1.0).unwrap();
        for (iy, row) in rows.iter().rev().enumerate() {
            for (ix, c) in row.chars().enumerate() {
                g.set_occupied(ix, iy, c == '#');
            }
        }
        g
    }

    /// Dijkstra over the same move set, as the cost oracle.
    fn dijkstra_cost(grid: &OccupancyGrid, s: (usize, usize), g: (usize, usize)) -> Option<f64> {
        let idx = |x: usize, y: usize| y * grid.width + x;
        if grid.is_occupied(s.0, s.1) || grid.is_occupied(g.0, g.1) {
            return None;
        }
        let mut dist = vec![f64::INFINITY; grid.width * grid.height];
        dist[idx(s.0, s.1)] = 0.0;
        let mut heap = BinaryHeap::new();
        heap.push(Reverse((0u64, idx(s.0, s.1))));
        while let Some(Reverse((dbits, cur))) = heap.pop() {
            let d = f64::from_bits(dbits);
            if d > dist[cur] {
                continue;
            }
            if cur == idx(g.0, g.1) {
                return Some(d);
            }
            let (cx, cy) = (cur % grid.width, cur / grid.width);
            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    if dx == 0 && dy == 0 {
                        continue;
                    }
                    let nx = cx as i64 + dx;
                    let ny = cy as i64 + dy;
                    if !grid.in_bounds(nx, ny) || grid.is_occupied(nx as usize, ny as usize) {
                        continue;
                    }
                    if dx != 0
                        && dy != 0
                        && (grid.is_occupied(nx as usize, cy) || grid.is_occupied(cx, ny as usize))
                    {
                        continue;
                    }
                    let step = if dx != 0 && dy != 0 {
                        std::f64::consts::SQRT_2
                    } else {
                        1.0
                    } * grid.resolution;
                    let ni = idx(nx as usize, ny as usize);
                    if d + step < dist[ni] {
                        dist[ni] = d + step;
                        heap.push(Reverse(((d + step).to_bits(), ni)));
                    }
                }
            }
        }
        None
    }

    fn bfs_reachable(grid: &OccupancyGrid, s: (usize, usize), g: (usize, usize)) -> bool {
        if grid.is_occupied(s.0, s.1) || grid.is_occupied(g.0, g.1) {
            return false;
        }
        let mut seen = vec![false; grid.width * grid.height];
        let mut q = VecDeque::from([s]);
        seen[s.1 * grid.width + s.0] = true;
        while let Some((cx, cy)) = q.pop_front() {
            if (cx, cy) == g {
                return true;
            }
            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    let nx = cx as i64 + dx;
                    let ny = cy as i64 + dy;
                    if (dx == 0 && dy == 0) || !grid.in_bounds(nx, ny) {
                        continue;
                    }
                    if grid.is_occupied(nx as usize, ny as usize) {
                        continue;
                    }
                    if dx != 0
                        && dy != 0
                        && (grid.is_occupied(nx as usize, cy) || grid.is_occupied(cx, ny as usize))
                    {
                        continue;
                    }
                    let ni = ny as usize * grid.width + nx as usize;
                    if !seen[ni] {
                        seen[ni] = true;
                        q.push_back((nx as usize, ny as usize));
                    }
                }
            }
        }
        false
    }

    #[test]
    fn astar_matches_dijkstra_on_random_grids() {
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let bounds = Rect::new([0.0, 0.0], [20.0, 20.0]);
            let mut grid = OccupancyGrid::new_free(&bounds, 1.0).unwrap();
            for iy in 0..grid.height {
                for ix in 0..grid.width {
                    grid.set_occupied(ix, iy, rng.random_bool(0.25));
                }
            }
            grid.set_occupied(0, 0, false);
            grid.set_occupied(19, 19, false);
            let start = grid.cell_center(0, 0);
            let goal = grid.cell_center(19, 19);
            let path = nav_path(&grid, start, goal);
            let oracle = dijkstra_cost(&grid, (0, 0), (19, 19));
            assert_eq!(path.is_some(), oracle.is_some());
            assert_eq!(path.is_some(), bfs_reachable(&grid, (0, 0), (19, 19)));
            if let (Some(p), Some(c)) = (path, oracle) {
                assert!((path_length(&p) - c).abs() < 1e-9, "{} vs {c}", path_length(&p));
            }
        }
    }

    #[test]
    fn astar_degenerate_cases() {
        let g = grid_from_rows(&["....", "....", "...."]);
        let p = nav_path(&g, [0.5, 0.5], [0.5, 0.5]).unwrap();
        assert_eq!(p, vec![[0.5, 0.5]]);
        let g = grid_from_rows(&["..#.", "..#.", "..#."]);
        assert!(nav_path(&g, [0.5, 0.5], [3.5, 0.5]).is_none());
        let mut g = grid_from_rows(&["....", "....", "...."]);
        g.set_occupied(0, 0, true);
        assert!(nav_path(&g, [0.5, 0.5], [3.5, 0.5]).is_none());
        // outside the grid
        let g = grid_from_rows(&["....", "....", "...."]);
        assert!(nav_path(&g, [-1.0, 0.5], [3.5, 0.5]).is_none());
    }

    #[test]
    fn link_points_cover_the_arm_densely() {
        let robot = presets::planar2();
        let base = BasePose { xy: [0.0, 0.0], yaw: 0.0 };
        let q = vec![0.0, 0.0]; // straight along +x at mount height
        let pts = link_points(&robot, &base, &q);
        for w in pts.windows(2) {
            let d = ((w[1][0] - w[0][0]).powi(2)
                + (w[1][1] - w[0][1]).powi(2)
                + (w[1][2] - w[0][2]).powi(2))
            .sqrt();
            assert!(d <= LINK_POINT_SPACING + 1e-9);
        }
        // tip at x = 1.0, mount height 0.4
        let tip = pts.last().unwrap();
        assert!((tip[0] - 1.0).abs() < 1e-9 && (tip[2] - 0.4).abs() < 1e-9);
    }

    #[test]
    fn config_collision_detects_small_boxes_on_the_link() {
        let robot = presets::planar2();
        let base = BasePose { xy: [0.0, 0.0], yaw: 0.0 };
        let q = vec![0.0, 0.0];
        // 3 cm box straddling the link mid-span
        let on_link = Aabb::new([0.48, -0.015, 0.385], [0.52, 0.015, 0.415]);
        assert!(config_collides(&robot, &base, &q, &[on_link]));
        let off_link = Aabb::new([0.48, 0.2, 0.385], [0.52, 0.23, 0.415]);
        assert!(!config_collides(&robot, &base, &q, &[off_link]));
    }

    #[test]
    fn rrt_connects_trivially_in_free_space() {
        let robot = presets::planar2();
        let base = BasePose { xy: [0.0, 0.0], yaw: 0.0 };
        let start = vec![0.0, 0.0];
        let goal = vec![1.2, -0.4];
        let path = arm_rrt(&robot, &base, &start, &goal, &[], &RrtParams::default()).unwrap();
        assert_eq!(path.first().unwrap(), &start);
        assert_eq!(path.last().unwrap(), &goal);
    }

    #[test]
    fn rrt_rejects_colliding_goal() {
        let robot = presets::planar2();
        let base = BasePose { xy: [0.0, 0.0], yaw: 0.0 };
        let start = vec![0.0, 0.0];
        let goal = vec![std::f64::consts::FRAC_PI_2, 0.0]; // arm along +y
        let block = Aabb::new([-0.2, 0.3, 0.0], [0.2, 0.7, 1.0]);
        assert!(arm_rrt(&robot, &base, &start, &goal, &[block], &RrtParams::default()).is_none());
    }

    #[test]
    fn rrt_goes_around_an_obstacle() {
        let robot = presets::planar2();
        let base = BasePose { xy: [0.0, 0.0], yaw: 0.0 };
        let start = vec![-0.6, 0.0];
        let goal = vec![0.6, 0.0];
        // post in front of the arm near theta1 = 0; direct sweep hits it
        let post = Aabb::new([0.9, -0.05, 0.0], [1.0, 0.05, 1.0]);
        let path =
            arm_rrt(&robot, &base, &start, &goal, &[post], &RrtParams::default()).unwrap();
        assert!(path.len() > 2, "direct edge should have been blocked");
        for w in path.windows(2) {
            assert!(!edge_collides(&robot, &base, &w[0], &w[1], &[post]));
        }
    }

    #[test]
    fn rrt_is_deterministic_per_seed() {
        let robot = presets::planar2();
        let base = BasePose { xy: [0.0, 0.0], yaw: 0.0 };
        let start = vec![-0.6, 0.0];
        let goal = vec![0.6, 0.0];
        let post = Aabb::new([0.9, -0.05, 0.0], [1.0, 0.05, 1.0]);
        let p = RrtParams { seed: 3, ..Default::default() };
        let a = arm_rrt(&robot, &base, &start, &goal, &[post], &p);
        let b = arm_rrt(&robot, &base, &start, &goal, &[post], &p);
        assert_eq!(a, b);
    }

    #[test]
    fn fridge_frontal_base_fails_on_the_door_sweep() {
        let scene = fixtures::fridge_scene();
        let robot = presets::generic6();
        let subset: HashSet<String> = scene.ids().map(str::to_string).collect();
        let handle = target_point(scene.object("fridge").unwrap());
        // straight in front of the door at 0.6 m: inside the sweep
        let base = BasePose::facing([1.35, 3.3], handle);
        let out = check_manipulation_feasibility(
            &scene,
            &subset,
            &robot,
            &base,
            "fridge",
            &FeasibilityParams::default(),
        );
        assert_eq!(out.unwrap_err(), FeasibilityFailure::FootprintCollision);
    }

    #[test]
    fn fridge_offset_base_opens_the_door() {
        let scene = fixtures::fridge_scene();
        let robot = presets::generic6();
        let subset: HashSet<String> = scene.ids().map(str::to_string).collect();
        let handle = target_point(scene.object("fridge").unwrap());
        // to the side of the swing, still within horizontal reach
        let base = BasePose::facing([0.95, 3.0], handle);
        let plan = check_manipulation_feasibility(
            &scene,
            &subset,
            &robot,
            &base,
            "fridge",
            &FeasibilityParams::default(),
        )
        .unwrap();
        assert_eq!(plan.configs.len(), 10);
        assert_eq!(plan.segments.len(), 10);
        // every waypoint config actually puts the tool at the handle arc
        let wps = handle_waypoints(scene.object("fridge").unwrap(), 10).unwrap();
        for (q, wp) in plan.configs.iter().zip(&wps) {
            let tip = base.arm_to_world(&robot, robot.fk_unchecked(q).position);
            let err = ((tip[0] - wp[0]).powi(2)
                + (tip[1] - wp[1]).powi(2)
                + (tip[2] - wp[2]).powi(2))
            .sqrt();
            assert!(err <= 0.011, "waypoint error {err}");
        }
    }

    #[test]
    fn table_grasp_is_feasible_from_the_edge() {
        let scene = fixtures::table_scene();
        let robot = presets::generic6();
        let subset: HashSet<String> = scene.ids().map(str::to_string).collect();
        let apple = target_point(scene.object("apple").unwrap());
        let base = BasePose::facing([2.58, 1.6], apple);
        let plan = check_manipulation_feasibility(
            &scene,
            &subset,
            &robot,
            &base,
            "apple",
            &FeasibilityParams::default(),
        )
        .unwrap();
        assert_eq!(plan.configs.len(), 1);
    }

    #[test]
    fn unreachable_waypoint_reports_its_index() {
        let scene = fixtures::fridge_scene();
        let robot = presets::generic6();
        let subset: HashSet<String> = scene.ids().map(str::to_string).collect();
        // far from the fridge: footprint is fine, every IK fails at index 0
        let base = BasePose::facing([4.5, 0.0], [1.15, 3.77, 0.95]);
        let out = check_manipulation_feasibility(
            &scene,
            &subset,
            &robot,
            &base,
            "fridge",
            &FeasibilityParams::default(),
        );
        assert_eq!(out.unwrap_err(), FeasibilityFailure::Ik { waypoint: 0 });
    }
}
