//! Built-in benchmark scenes: a 30-object kitchen, the canonical fridge and
//! table tasks with translated suite variants, and seeded random layouts.

use crate::geom::{Aabb, Rect};
use crate::scene::{
    HingeSide, JointSpec, ObjectInstance, ObjectKind, RelationKind, Scene, SpatialRelation,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rigid(id: &str, bbox: Aabb) -> ObjectInstance {
    ObjectInstance {
        id: id.into(),
        position: bbox.center(),
        bbox,
        kind: ObjectKind::Rigid,
        joint: None,
    }
}

fn rel(parent: &str, child: &str, relation: RelationKind) -> SpatialRelation {
    SpatialRelation {
        parent: parent.into(),
        child: child.into(),
        relation,
    }
}

/// The fridge used across the fixtures: door hinged on the +x edge, swinging
/// out toward -y, handle near the -x edge of the panel.
fn fridge_at_origin() -> ObjectInstance {
    ObjectInstance {
        id: "fridge".into(),
        position: [1.35, 4.25, 0.85],
        bbox: Aabb::new([1.0, 3.9, 0.0], [1.7, 4.6, 1.7]),
        kind: ObjectKind::Articulated,
        joint: Some(JointSpec {
            pivot: [1.7, 3.9, 0.0],
            axis: [0.0, 0.0, 1.0],
            handle_home: [1.15, 3.77, 0.95],
            panel_home: Aabb::new([1.0, 3.84, 0.1], [1.7, 3.9, 1.6]),
            angle_range: [0.0, std::f64::consts::FRAC_PI_3],
            hinge_side: HingeSide::Left,
        }),
    }
}

/// Microwave sitting on the west counter; door swings into the room (+x).
fn microwave_on_counter() -> ObjectInstance {
    ObjectInstance {
        id: "microwave".into(),
        position: [-3.825, 2.6, 1.1],
        bbox: Aabb::new([-4.1, 2.3, 0.9], [-3.55, 2.9, 1.3]),
        kind: ObjectKind::Articulated,
        joint: Some(JointSpec {
            pivot: [-3.525, 2.3, 0.9],
            axis: [0.0, 0.0, 1.0],
            handle_home: [-3.49, 2.85, 1.1],
            panel_home: Aabb::new([-3.55, 2.3, 0.95], [-3.50, 2.9, 1.25]),
            angle_range: [0.0, std::f64::consts::FRAC_PI_2],
            hinge_side: HingeSide::Right,
        }),
    }
}

/// Thirty-object kitchen: articulated fridge and microwave, large furniture,
/// and small items attached through on/in relations.
pub fn kitchen_30() -> Scene {
    let mut objects = vec![
        fridge_at_origin(),
        rigid("counter", Aabb::new([-4.2, 1.5, 0.0], [-3.5, 4.5, 0.9])),
        microwave_on_counter(),
        rigid("sink", Aabb::new([-4.2, -1.0, 0.0], [-3.5, 0.5, 0.9])),
        rigid("stove", Aabb::new([-1.0, 4.2, 0.0], [0.5, 5.0, 0.9])),
        rigid("table", Aabb::new([-0.8, -0.5, 0.0], [0.8, 0.5, 0.6])),
        rigid("shelf", Aabb::new([3.5, -4.5, 0.0], [4.5, -3.5, 1.8])),
        rigid("trash", Aabb::new([4.0, 2.0, 0.0], [4.5, 2.5, 0.6])),
    ];
    let mut relations = Vec::new();
    relations.push(rel("counter", "microwave", RelationKind::On));

    // (id, parent, relation, bbox)
    let small: &[(&str, &str, RelationKind, Aabb)] = &[
        ("milk", "fridge", RelationKind::In, Aabb::new([1.20, 4.10, 0.30], [1.30, 4.20, 0.55])),
        ("juice", "fridge", RelationKind::In, Aabb::new([1.40, 4.10, 0.30], [1.50, 4.20, 0.58])),
        ("butter", "fridge", RelationKind::In, Aabb::new([1.20, 4.35, 0.90], [1.32, 4.45, 0.96])),
        ("eggs", "fridge", RelationKind::In, Aabb::new([1.40, 4.35, 0.90], [1.55, 4.48, 0.98])),
        ("kettle", "counter", RelationKind::On, Aabb::new([-4.05, 1.60, 0.90], [-3.85, 1.80, 1.12])),
        ("toaster", "counter", RelationKind::On, Aabb::new([-4.10, 3.20, 0.90], [-3.80, 3.50, 1.08])),
        ("jar", "counter", RelationKind::On, Aabb::new([-4.00, 3.90, 0.90], [-3.88, 4.02, 1.06])),
        ("board", "counter", RelationKind::On, Aabb::new([-4.10, 4.10, 0.90], [-3.70, 4.40, 0.93])),
        ("bowl", "microwave", RelationKind::In, Aabb::new([-3.95, 2.50, 0.95], [-3.80, 2.65, 1.02])),
        ("plate", "table", RelationKind::On, Aabb::new([-0.40, -0.20, 0.60], [-0.15, 0.05, 0.63])),
        ("cup", "table", RelationKind::On, Aabb::new([0.10, 0.10, 0.60], [0.18, 0.18, 0.70])),
        ("fork", "table", RelationKind::On, Aabb::new([-0.10, -0.35, 0.60], [0.05, -0.33, 0.62])),
        ("knife", "table", RelationKind::On, Aabb::new([-0.10, 0.28, 0.60], [0.05, 0.30, 0.62])),
        ("salad_bowl", "table", RelationKind::On, Aabb::new([0.35, -0.25, 0.60], [0.60, 0.00, 0.72])),
        ("napkin", "table", RelationKind::On, Aabb::new([0.30, 0.20, 0.60], [0.45, 0.35, 0.61])),
        ("book", "shelf", RelationKind::In, Aabb::new([3.70, -4.30, 0.90], [3.90, -4.05, 1.15])),
        ("vase", "shelf", RelationKind::On, Aabb::new([4.10, -4.30, 1.80], [4.25, -4.15, 2.05])),
        ("radio", "shelf", RelationKind::In, Aabb::new([4.05, -3.95, 0.40], [4.35, -3.70, 0.58])),
        ("sponge", "sink", RelationKind::In, Aabb::new([-3.95, -0.40, 0.80], [-3.83, -0.28, 0.85])),
        ("pan", "stove", RelationKind::On, Aabb::new([-0.70, 4.40, 0.90], [-0.35, 4.75, 0.98])),
        ("pot", "stove", RelationKind::On, Aabb::new([-0.10, 4.40, 0.90], [0.20, 4.70, 1.10])),
        ("stool", "table", RelationKind::On, Aabb::new([1.20, -0.40, 0.00], [1.55, -0.05, 0.45])),
    ];
    for (id, parent, relation, bbox) in small {
        objects.push(rigid(id, *bbox));
        relations.push(rel(parent, id, *relation));
    }
    assert_eq!(objects.len(), 30);
    Scene {
        floor: Rect::new([-5.0, -5.0], [5.0, 5.0]),
        objects,
        relations,
    }
}

/// Canonical fridge task: open the fridge door. The sweep of the door
/// covers the naive frontal standing spot.
pub fn fridge_scene() -> Scene {
    let objects = vec![
        fridge_at_origin(),
        rigid("milk", Aabb::new([1.20, 4.10, 0.30], [1.30, 4.20, 0.55])),
        rigid("cabinet", Aabb::new([4.0, 4.5, 0.0], [5.0, 5.5, 0.9])),
        rigid("cup", Aabb::new([4.3, 4.8, 0.9], [4.4, 4.9, 1.0])),
    ];
    let relations = vec![
        rel("fridge", "milk", RelationKind::In),
        rel("cabinet", "cup", RelationKind::On),
    ];
    Scene {
        floor: Rect::new([-2.0, -2.0], [6.0, 7.0]),
        objects,
        relations,
    }
}

/// Canonical table task: grasp the apple near the table edge. No sweeps
/// are involved, so even naive placement strategies succeed.
pub fn table_scene() -> Scene {
    let objects = vec![
        rigid("table", Aabb::new([1.2, 1.2, 0.0], [2.0, 2.0, 0.6])),
        rigid("apple", Aabb::new([1.90, 1.55, 0.60], [1.98, 1.65, 0.72])),
        rigid("vase", Aabb::new([1.30, 1.30, 0.60], [1.40, 1.40, 0.80])),
        rigid("shelf2", Aabb::new([-1.0, 4.5, 0.0], [0.0, 4.9, 1.8])),
        rigid("book", Aabb::new([-0.8, 4.6, 0.9], [-0.6, 4.8, 1.15])),
    ];
    let relations = vec![
        rel("table", "apple", RelationKind::On),
        rel("table", "vase", RelationKind::On),
        rel("shelf2", "book", RelationKind::In),
    ];
    Scene {
        floor: Rect::new([-2.0, -2.0], [6.0, 7.0]),
        objects,
        relations,
    }
}

/// Clones a scene with every object (bboxes, joints) shifted in the plane;
/// the floor is left as-is, so offsets must keep objects inside it.
pub fn translate_scene(scene: &Scene, dx: f64, dy: f64) -> Scene {
    let shift3 = |p: [f64; 3]| [p[0] + dx, p[1] + dy, p[2]];
    let shift_box = |b: &Aabb| Aabb::new(shift3(b.min), shift3(b.max));
    let objects = scene
        .objects
        .iter()
        .map(|o| ObjectInstance {
            id: o.id.clone(),
            position: shift3(o.position),
            bbox: shift_box(&o.bbox),
            kind: o.kind,
            joint: o.joint.as_ref().map(|j| JointSpec {
                pivot: shift3(j.pivot),
                axis: j.axis,
                handle_home: shift3(j.handle_home),
                panel_home: shift_box(&j.panel_home),
                angle_range: j.angle_range,
                hinge_side: j.hinge_side,
            }),
        })
        .collect();
    Scene {
        floor: scene.floor,
        objects,
        relations: scene.relations.clone(),
    }
}

/// Deterministic lattice of planar offsets in [-1, 1] for suite variants.
fn suite_offsets(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| (-1.0 + (i % 5) as f64 * 0.5, -1.0 + (i / 5) as f64 * 0.5))
        .collect()
}

pub fn fridge_suite(n: usize) -> Vec<Scene> {
    let base = fridge_scene();
    suite_offsets(n)
        .into_iter()
        .map(|(dx, dy)| translate_scene(&base, dx, dy))
        .collect()
}

pub fn table_suite(n: usize) -> Vec<Scene> {
    let base = table_scene();
    suite_offsets(n)
        .into_iter()
        .map(|(dx, dy)| translate_scene(&base, dx, dy))
        .collect()
}

/// Seeded random layout: a pedestal carrying the object `target`, a handful
/// of clutter boxes kept away from it, and — for roughly a third of seeds —
/// an enclosing wall ring taller than the arm can ever reach, which makes
/// the task infeasible from every base position.
pub fn random_scene(seed: u64) -> Scene {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let px = rng.random_range(-1.5..1.5);
    let py = rng.random_range(-1.5..1.5);
    let mut objects = vec![
        rigid("pedestal", Aabb::new([px - 0.2, py - 0.2, 0.0], [px + 0.2, py + 0.2, 0.5])),
        rigid("target", Aabb::new([px - 0.05, py - 0.05, 0.5], [px + 0.05, py + 0.05, 0.62])),
    ];
    let mut relations = vec![rel("pedestal", "target", RelationKind::On)];
    let clutter = rng.random_range(3..=9);
    let mut placed = 0;
    while placed < clutter {
        let cx = rng.random_range(-3.5..3.5);
        let cy = rng.random_range(-3.5..3.5);
        // keep clutter away from the pedestal so feasible variants stay
        // robustly feasible
        if ((cx - px).powi(2) + (cy - py).powi(2)).sqrt() < 2.2 {
            continue;
        }
        let hx = rng.random_range(0.1..0.4);
        let hy = rng.random_range(0.1..0.4);
        let h = rng.random_range(0.2..1.2);
        objects.push(rigid(
            &format!("clutter{placed}"),
            Aabb::new([cx - hx, cy - hy, 0.0], [cx + hx, cy + hy, h]),
        ));
        placed += 1;
    }
    if rng.random_bool(0.35) {
        // wall ring: inner half-width 0.5, thickness 0.2, taller than any
        // arm configuration can clear
        let (lo, hi, t, z) = (0.5, 0.7, 0.7, 2.2);
        objects.push(rigid("wall_n", Aabb::new([px - t, py + lo, 0.0], [px + t, py + hi, z])));
        objects.push(rigid("wall_s", Aabb::new([px - t, py - hi, 0.0], [px + t, py - lo, z])));
        objects.push(rigid("wall_e", Aabb::new([px + lo, py - t, 0.0], [px + hi, py + t, z])));
        objects.push(rigid("wall_w", Aabb::new([px - hi, py - t, 0.0], [px - lo, py + t, z])));
        for w in ["wall_n", "wall_s", "wall_e", "wall_w"] {
            relations.push(rel("pedestal", w, RelationKind::On));
        }
    }
    Scene {
        floor: Rect::new([-4.0, -4.0], [4.0, 4.0]),
        objects,
        relations,
    }
}
