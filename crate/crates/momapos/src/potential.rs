//! Base placement scoring: the candidate area within horizontal reach, the
//! line-of-sight potential field, and the combined per-cell feasibility
//! score summed over manipulation waypoints.

use crate::geom::{dist_xy2, segment_intersects_aabb, Aabb, ObbXy, Rect};
use crate::kinematics::{BasePose, KinematicsError, RobotModel};
use crate::reachability::{irm_query, ReachabilityMap};
use crate::scene::{collision_boxes, ObjectInstance, ObjectKind, Scene, DEFAULT_SWEEP_STEPS};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::io::Write;
use thiserror::Error;

/// Distance floor for the attraction term (a base cannot coincide with a
/// handle).
pub const STANDOFF_FLOOR: f64 = 0.05;
/// Grid pitch used for area membership scans and defaults.
pub const DEFAULT_RESOLUTION: f64 = 0.05;
/// Waypoint count for articulated targets.
pub const DEFAULT_WAYPOINTS: usize = 10;

#[derive(Debug, Error)]
pub enum PlacementError {
    #[error("target height is beyond vertical arm reach")]
    OutOfVerticalReach,
    #[error("no candidate cell is reachable and collision-free")]
    EmptyArea,
    #[error("candidate position is not an area member")]
    NotInArea,
    #[error("grid would be smaller than 2x2 cells at this resolution")]
    ResolutionTooCoarse,
    #[error("unknown target `{0}`")]
    UnknownTarget(String),
}

impl From<KinematicsError> for PlacementError {
    fn from(e: KinematicsError) -> Self {
        match e {
            KinematicsError::OutOfVerticalReach => PlacementError::OutOfVerticalReach,
            other => panic!("unexpected kinematics error: {other}"),
        }
    }
}

/// Normalized blend weights for the reachability and field terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Weights {
    pub irm: f64,
    pub field: f64,
}

impl Default for Weights {
    fn default() -> Self {
        Weights { irm: 0.5, field: 0.5 }
    }
}

impl Weights {
    pub fn normalized(self) -> Self {
        let total = self.irm + self.field;
        assert!(total > 0.0, "weights must not both be zero");
        Weights {
            irm: self.irm / total,
            field: self.field / total,
        }
    }
}

/// The manipulation point of a target object: its position for rigid
/// objects, the handle home position for articulated ones.
pub fn target_point(obj: &ObjectInstance) -> [f64; 3] {
    match (&obj.kind, &obj.joint) {
        (ObjectKind::Articulated, Some(j)) => j.handle_home,
        _ => obj.position,
    }
}

/// Manipulation waypoints for a target: the door-opening arc for
/// articulated objects, the single grasp point for rigid ones.
pub fn target_waypoints(obj: &ObjectInstance) -> Vec<[f64; 3]> {
    match obj.kind {
        ObjectKind::Articulated => {
            crate::scene::handle_waypoints(obj, DEFAULT_WAYPOINTS).expect("articulated")
        }
        ObjectKind::Rigid => vec![obj.position],
    }
}

/// The candidate base placement region: positions within horizontal reach
/// of the target whose base footprint clears every selected object's
/// geometry (door sweeps included).
#[derive(Debug, Clone)]
pub struct CandidateArea {
    pub target_id: String,
    /// Target manipulation point; membership distances are measured to it.
    pub target: [f64; 3],
    /// Horizontal reach radius.
    pub radius: f64,
    /// Bounding rectangle of the area, clipped to the floor.
    pub bounds: Rect,
    base_half: [f64; 2],
    base_height: f64,
    /// Footprint obstacles in the base's z-band, as xy rectangles.
    footprint_rects: Vec<Rect>,
    /// Boxes that occlude the line of sight (selected objects minus the
    /// target itself).
    occlusion_boxes: Vec<Aabb>,
    /// Member cell centers of the 0.05 m scan, kept for sampling and
    /// normalization.
    member_cells: Vec<[f64; 2]>,
}

pub fn candidate_area(
    scene: &Scene,
    subset: &HashSet<String>,
    robot: &RobotModel,
    target_id: &str,
) -> Result<CandidateArea, PlacementError> {
    let target_obj = scene
        .object(target_id)
        .ok_or_else(|| PlacementError::UnknownTarget(target_id.to_string()))?;
    let target = target_point(target_obj);
    let radius = robot.delta_r(robot.base_dims[2], target[2])?;

    let mut footprint_rects = Vec::new();
    let mut occlusion_boxes = Vec::new();
    for obj in &scene.objects {
        if !subset.contains(&obj.id) && obj.id != target_id {
            continue;
        }
        for b in collision_boxes(obj, DEFAULT_SWEEP_STEPS) {
            if b.z_overlaps(0.0, robot.base_dims[2]) {
                footprint_rects.push(Rect::new([b.min[0], b.min[1]], [b.max[0], b.max[1]]));
            }
            if obj.id != target_id {
                occlusion_boxes.push(b);
            }
        }
    }
    let bounds = Rect::new(
        [target[0] - radius, target[1] - radius],
        [target[0] + radius, target[1] + radius],
    )
    .clipped_to(&scene.floor);
    let mut area = CandidateArea {
        target_id: target_id.to_string(),
        target,
        radius,
        bounds,
        base_half: [robot.base_dims[0] / 2.0, robot.base_dims[1] / 2.0],
        base_height: robot.base_dims[2],
        footprint_rects,
        occlusion_boxes,
        member_cells: Vec::new(),
    };
    for xy in grid_centers(&area.bounds, DEFAULT_RESOLUTION) {
        if area.is_member(xy) {
            area.member_cells.push(xy);
        }
    }
    if area.member_cells.is_empty() {
        return Err(PlacementError::EmptyArea);
    }
    Ok(area)
}

pub fn grid_centers(bounds: &Rect, resolution: f64) -> impl Iterator<Item = [f64; 2]> + '_ {
    let nx = (bounds.width() / resolution).ceil() as usize;
    let ny = (bounds.height() / resolution).ceil() as usize;
    let min = bounds.min;
    (0..ny).flat_map(move |iy| {
        (0..nx).map(move |ix| {
            [
                min[0] + (ix as f64 + 0.5) * resolution,
                min[1] + (iy as f64 + 0.5) * resolution,
            ]
        })
    })
}

impl CandidateArea {
    /// Membership: within horizontal reach, and the base footprint at the
    /// deterministic target-facing yaw clears every obstacle rectangle.
    pub fn is_member(&self, xy: [f64; 2]) -> bool {
        if dist_xy2(xy, [self.target[0], self.target[1]]) > self.radius {
            return false;
        }
        let yaw = BasePose::facing(xy, self.target).yaw;
        let footprint = ObbXy {
            center: xy,
            half: self.base_half,
            yaw,
        };
        !self
            .footprint_rects
            .iter()
            .any(|r| footprint.overlaps_rect(r))
    }

    pub fn member_cells(&self) -> &[[f64; 2]] {
        &self.member_cells
    }

    pub fn base_height(&self) -> f64 {
        self.base_height
    }

    /// Line-of-sight test from a candidate (at sample height) to a
    /// waypoint, against the cached occlusion boxes.
    pub fn sight_clear(&self, candidate_xy: [f64; 2], sample_z: f64, waypoint: [f64; 3]) -> bool {
        let p = [candidate_xy[0], candidate_xy[1], sample_z];
        !self
            .occlusion_boxes
            .iter()
            .any(|b| segment_intersects_aabb(p, waypoint, b))
    }

    /// Attraction field toward a waypoint: zero when occluded, otherwise
    /// inverse horizontal distance with a standoff floor.
    pub fn field_value(&self, candidate_xy: [f64; 2], sample_z: f64, waypoint: [f64; 3]) -> f64 {
        if !self.sight_clear(candidate_xy, sample_z, waypoint) {
            return 0.0;
        }
        1.0 / dist_xy2(candidate_xy, [waypoint[0], waypoint[1]]).max(STANDOFF_FLOOR)
    }

    /// Raw field term: sum over waypoints, each sampled at its own height.
    pub fn field_sum(&self, candidate_xy: [f64; 2], waypoints: &[[f64; 3]]) -> f64 {
        waypoints
            .iter()
            .map(|&wp| self.field_value(candidate_xy, wp[2], wp))
            .sum()
    }

    /// Maximum raw field sum over the member grid; the normalizer for the
    /// combined score.
    pub fn field_max(&self, waypoints: &[[f64; 3]]) -> f64 {
        self.member_cells
            .iter()
            .map(|&xy| self.field_sum(xy, waypoints))
            .fold(0.0, f64::max)
    }
}

/// Line-of-sight between two world points against the selected objects'
/// geometry (bboxes and door sweeps), excluding the target object itself.
pub fn line_of_sight_clear(
    scene: &Scene,
    subset: &HashSet<String>,
    exclude_id: &str,
    p: [f64; 3],
    q: [f64; 3],
) -> bool {
    for obj in &scene.objects {
        if obj.id == exclude_id || !subset.contains(&obj.id) {
            continue;
        }
        for b in collision_boxes(obj, DEFAULT_SWEEP_STEPS) {
            if segment_intersects_aabb(p, q, &b) {
                return false;
            }
        }
    }
    true
}

/// Combined feasibility score at a candidate: the normalized field sum
/// blended with the mean reachability-map score over the waypoints.
pub fn combined_score(
    area: &CandidateArea,
    irm: &ReachabilityMap,
    robot: &RobotModel,
    candidate_xy: [f64; 2],
    waypoints: &[[f64; 3]],
    weights: Weights,
    field_max: f64,
) -> Result<f64, PlacementError> {
    assert!(!waypoints.is_empty());
    if !area.is_member(candidate_xy) {
        return Err(PlacementError::NotInArea);
    }
    Ok(combined_unchecked(area, irm, robot, candidate_xy, waypoints, weights, field_max))
}

fn combined_unchecked(
    area: &CandidateArea,
    irm: &ReachabilityMap,
    robot: &RobotModel,
    candidate_xy: [f64; 2],
    waypoints: &[[f64; 3]],
    weights: Weights,
    field_max: f64,
) -> f64 {
    let weights = weights.normalized();
    let field_raw = area.field_sum(candidate_xy, waypoints);
    let field_norm = if field_max > 0.0 { field_raw / field_max } else { 0.0 };
    let base = BasePose::facing(candidate_xy, area.target);
    let irm_mean = waypoints
        .iter()
        .map(|&wp| irm_query(irm, robot, &base, wp))
        .sum::<f64>()
        / waypoints.len() as f64;
    weights.irm * irm_mean + weights.field * field_norm
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialCell {
    pub member: bool,
    pub field: f64,
    pub irm: f64,
    pub combined: f64,
}

/// Per-cell feasibility scores over the candidate area's bounding
/// rectangle; higher combined values mark more feasible placements.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialMap {
    pub resolution: f64,
    pub origin: [f64; 2],
    pub width: usize,
    pub height: usize,
    pub weights: Weights,
    pub radius: f64,
    pub cells: Vec<PotentialCell>,
}

impl PotentialMap {
    pub fn cell(&self, ix: usize, iy: usize) -> &PotentialCell {
        &self.cells[iy * self.width + ix]
    }

    pub fn cell_center(&self, ix: usize, iy: usize) -> [f64; 2] {
        [
            self.origin[0] + (ix as f64 + 0.5) * self.resolution,
            self.origin[1] + (iy as f64 + 0.5) * self.resolution,
        ]
    }

    /// Cell center with the maximal combined score, ties broken by index.
    pub fn argmax(&self) -> Option<[f64; 2]> {
        let mut best: Option<(f64, usize)> = None;
        for (i, c) in self.cells.iter().enumerate() {
            if c.member && best.map_or(true, |(s, _)| c.combined > s) {
                best = Some((c.combined, i));
            }
        }
        best.map(|(_, i)| self.cell_center(i % self.width, i / self.width))
    }

    /// PGM render: combined scores normalized to 0-255, higher = brighter.
    pub fn write_pgm(&self, w: &mut impl Write) -> std::io::Result<()> {
        let max = self.cells.iter().map(|c| c.combined).fold(0.0, f64::max);
        writeln!(w, "P5")?;
        writeln!(
            w,
            "# w_irm {} w_field {} resolution {} delta_r {}",
            self.weights.irm, self.weights.field, self.resolution, self.radius
        )?;
        writeln!(w, "{} {}", self.width, self.height)?;
        writeln!(w, "255")?;
        for iy in (0..self.height).rev() {
            for ix in 0..self.width {
                let c = self.cell(ix, iy);
                let v = if max > 0.0 { (c.combined / max * 255.0).round() as u8 } else { 0 };
                w.write_all(&[v])?;
            }
        }
        Ok(())
    }

    pub fn write_csv(&self, w: &mut impl Write) -> std::io::Result<()> {
        writeln!(
            w,
            "# w_irm {} w_field {} resolution {} delta_r {}",
            self.weights.irm, self.weights.field, self.resolution, self.radius
        )?;
        writeln!(w, "x,y,member,field,irm,combined")?;
        for iy in 0..self.height {
            for ix in 0..self.width {
                let c = self.cell(ix, iy);
                let p = self.cell_center(ix, iy);
                writeln!(
                    w,
                    "{},{},{},{},{},{}",
                    p[0],
                    p[1],
                    u8::from(c.member),
                    c.field,
                    c.irm,
                    c.combined
                )?;
            }
        }
        Ok(())
    }
}

pub fn potential_map(
    area: &CandidateArea,
    irm: &ReachabilityMap,
    robot: &RobotModel,
    waypoints: &[[f64; 3]],
    resolution: f64,
    weights: Weights,
) -> Result<PotentialMap, PlacementError> {
    assert!(resolution > 0.0 && !waypoints.is_empty());
    let width = (area.bounds.width() / resolution).ceil() as usize;
    let height = (area.bounds.height() / resolution).ceil() as usize;
    if width < 2 || height < 2 {
        return Err(PlacementError::ResolutionTooCoarse);
    }
    let field_max = area.field_max(waypoints);
    let mut cells = Vec::with_capacity(width * height);
    for iy in 0..height {
        for ix in 0..width {
            let xy = [
                area.bounds.min[0] + (ix as f64 + 0.5) * resolution,
                area.bounds.min[1] + (iy as f64 + 0.5) * resolution,
            ];
            if area.is_member(xy) {
                let field = area.field_sum(xy, waypoints);
                let base = BasePose::facing(xy, area.target);
                let irm_mean = waypoints
                    .iter()
                    .map(|&wp| irm_query(irm, robot, &base, wp))
                    .sum::<f64>()
                    / waypoints.len() as f64;
                let combined =
                    combined_unchecked(area, irm, robot, xy, waypoints, weights, field_max);
                cells.push(PotentialCell { member: true, field, irm: irm_mean, combined });
            } else {
                cells.push(PotentialCell { member: false, field: 0.0, irm: 0.0, combined: 0.0 });
            }
        }
    }
    Ok(PotentialMap {
        resolution,
        origin: area.bounds.min,
        width,
        height,
        weights: weights.normalized(),
        radius: area.radius,
        cells,
    })
}
