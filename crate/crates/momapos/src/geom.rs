//! Geometric primitives shared across the planner: axis-aligned boxes,
//! horizontal distances, axis-angle rotation, and intersection tests.

use nalgebra::{Point3, UnitVector3, Vector3};
use serde::{Deserialize, Serialize};

/// Axis-aligned box in world coordinates (meters).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

impl Aabb {
    pub fn new(min: [f64; 3], max: [f64; 3]) -> Self {
        Self { min, max }
    }

    pub fn is_valid(&self) -> bool {
        (0..3).all(|k| self.min[k] <= self.max[k])
    }

    pub fn center(&self) -> [f64; 3] {
        [
            0.5 * (self.min[0] + self.max[0]),
            0.5 * (self.min[1] + self.max[1]),
            0.5 * (self.min[2] + self.max[2]),
        ]
    }

    pub fn extents(&self) -> [f64; 3] {
        [
            self.max[0] - self.min[0],
            self.max[1] - self.min[1],
            self.max[2] - self.min[2],
        ]
    }

    pub fn volume(&self) -> f64 {
        let e = self.extents();
        e[0] * e[1] * e[2]
    }

    pub fn corners(&self) -> [[f64; 3]; 8] {
        let mut out = [[0.0; 3]; 8];
        for (i, c) in out.iter_mut().enumerate() {
            c[0] = if i & 1 == 0 { self.min[0] } else { self.max[0] };
            c[1] = if i & 2 == 0 { self.min[1] } else { self.max[1] };
            c[2] = if i & 4 == 0 { self.min[2] } else { self.max[2] };
        }
        out
    }

    /// Smallest box enclosing a point set.
    pub fn enclosing(points: impl IntoIterator<Item = [f64; 3]>) -> Option<Self> {
        let mut it = points.into_iter();
        let first = it.next()?;
        let mut b = Aabb::new(first, first);
        for p in it {
            for k in 0..3 {
                b.min[k] = b.min[k].min(p[k]);
                b.max[k] = b.max[k].max(p[k]);
            }
        }
        Some(b)
    }

    pub fn contains_point(&self, p: [f64; 3]) -> bool {
        (0..3).all(|k| p[k] >= self.min[k] && p[k] <= self.max[k])
    }

    pub fn contains_point_eps(&self, p: [f64; 3], eps: f64) -> bool {
        (0..3).all(|k| p[k] >= self.min[k] - eps && p[k] <= self.max[k] + eps)
    }

    pub fn overlaps(&self, other: &Aabb) -> bool {
        (0..3).all(|k| self.min[k] <= other.max[k] && self.max[k] >= other.min[k])
    }

    /// Overlap of the z-interval with [z_lo, z_hi].
    pub fn z_overlaps(&self, z_lo: f64, z_hi: f64) -> bool {
        self.min[2] <= z_hi && self.max[2] >= z_lo
    }
}

/// 2D axis-aligned rectangle (floor plans, grid bounds).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub min: [f64; 2],
    pub max: [f64; 2],
}

impl Rect {
    pub fn new(min: [f64; 2], max: [f64; 2]) -> Self {
        Self { min, max }
    }

    pub fn width(&self) -> f64 {
        self.max[0] - self.min[0]
    }

    pub fn height(&self) -> f64 {
        self.max[1] - self.min[1]
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        p[0] >= self.min[0] && p[0] <= self.max[0] && p[1] >= self.min[1] && p[1] <= self.max[1]
    }

    pub fn clipped_to(&self, other: &Rect) -> Rect {
        Rect::new(
            [self.min[0].max(other.min[0]), self.min[1].max(other.min[1])],
            [self.max[0].min(other.max[0]), self.max[1].min(other.max[1])],
        )
    }
}

/// Horizontal (xy-plane) distance between two 3D points; z is ignored.
pub fn dist_xy(a: [f64; 3], b: [f64; 3]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    (dx * dx + dy * dy).sqrt()
}

pub fn dist_xy2(a: [f64; 2], b: [f64; 2]) -> f64 {
    dist_xy([a[0], a[1], 0.0], [b[0], b[1], 0.0])
}

/// Rotates `point` about the line through `pivot` along unit `axis` by `angle`
/// radians (Rodrigues formula).
pub fn rotate_about_axis(point: [f64; 3], pivot: [f64; 3], axis: [f64; 3], angle: f64) -> [f64; 3] {
    let p = Point3::from(point) - Point3::from(pivot);
    let ax = UnitVector3::new_normalize(Vector3::from(axis));
    let (s, c) = angle.sin_cos();
    let rotated = p * c + ax.cross(&p) * s + ax.into_inner() * (ax.dot(&p)) * (1.0 - c);
    [
        pivot[0] + rotated.x,
        pivot[1] + rotated.y,
        pivot[2] + rotated.z,
    ]
}

/// Segment-vs-AABB intersection via the slab test. Degenerate segments
/// (p == q) reduce to point containment.
pub fn segment_intersects_aabb(p: [f64; 3], q: [f64; 3], b: &Aabb) -> bool {
    let mut t_min = 0.0_f64;
    let mut t_max = 1.0_f64;
    for k in 0..3 {
        let d = q[k] - p[k];
        if d.abs() < 1e-15 {
            if p[k] < b.min[k] || p[k] > b.max[k] {
                return false;
            }
        } else {
            let inv = 1.0 / d;
            let mut t0 = (b.min[k] - p[k]) * inv;
            let mut t1 = (b.max[k] - p[k]) * inv;
            if t0 > t1 {
                std::mem::swap(&mut t0, &mut t1);
            }
            t_min = t_min.max(t0);
            t_max = t_max.min(t1);
            if t_min > t_max {
                return false;
            }
        }
    }
    true
}

/// Oriented rectangle in the xy plane: center, half extents, yaw.
#[derive(Debug, Clone, Copy)]
pub struct ObbXy {
    pub center: [f64; 2],
    pub half: [f64; 2],
    pub yaw: f64,
}

impl ObbXy {
    pub fn corners(&self) -> [[f64; 2]; 4] {
        let (s, c) = self.yaw.sin_cos();
        let mut out = [[0.0; 2]; 4];
        for (i, (sx, sy)) in [(1.0, 1.0), (1.0, -1.0), (-1.0, -1.0), (-1.0, 1.0)]
            .iter()
            .enumerate()
        {
            let lx = sx * self.half[0];
            let ly = sy * self.half[1];
            out[i] = [
                self.center[0] + c * lx - s * ly,
                self.center[1] + s * lx + c * ly,
            ];
        }
        out
    }

    /// SAT overlap test between this oriented rectangle and an axis-aligned
    /// rectangle. Touching boundaries count as overlap.
    pub fn overlaps_rect(&self, r: &Rect) -> bool {
        let obb = self.corners();
        let rect = [
            [r.min[0], r.min[1]],
            [r.max[0], r.min[1]],
            [r.max[0], r.max[1]],
            [r.min[0], r.max[1]],
        ];
        let (s, c) = self.yaw.sin_cos();
        let axes = [[1.0, 0.0], [0.0, 1.0], [c, s], [-s, c]];
        for ax in axes {
            let proj = |pts: &[[f64; 2]; 4]| {
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for p in pts {
                    let v = p[0] * ax[0] + p[1] * ax[1];
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
                (lo, hi)
            };
            let (a0, a1) = proj(&obb);
            let (b0, b1) = proj(&rect);
            if a1 < b0 || b1 < a0 {
                return false;
            }
        }
        true
    }
}

/// Distance from a point to an axis-aligned rectangle (0 when inside).
pub fn point_rect_distance(p: [f64; 2], r: &Rect) -> f64 {
    let dx = (r.min[0] - p[0]).max(0.0).max(p[0] - r.max[0]);
    let dy = (r.min[1] - p[1]).max(0.0).max(p[1] - r.max[1]);
    (dx * dx + dy * dy).sqrt()
}

/// Wraps an angle into (-pi, pi].
pub fn wrap_angle(a: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut x = a % two_pi;
    if x <= -std::f64::consts::PI {
        x += two_pi;
    } else if x > std::f64::consts::PI {
        x -= two_pi;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dist_xy_ignores_z() {
        assert_eq!(dist_xy([0.0, 0.0, 0.0], [0.0, 0.0, 5.0]), 0.0);
        assert_eq!(dist_xy([0.0, 0.0, 0.0], [3.0, 4.0, 1.0]), 5.0);
    }

    #[test]
    fn dist_xy_matches_hand_computation() {
        let d = dist_xy([1.2, 0.7, 0.9], [2.0, 1.9, 0.3]);
        assert!((d - (0.64_f64 + 1.44).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rotate_quarter_turn() {
        let p = rotate_about_axis(
            [0.6, 0.0, 1.0],
            [0.0, 0.0, 0.0],
            [0.0, 0.0, 1.0],
            std::f64::consts::FRAC_PI_2,
        );
        assert!((p[0]).abs() < 1e-12);
        assert!((p[1] - 0.6).abs() < 1e-12);
        assert!((p[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn slab_test_basics() {
        let b = Aabb::new([-0.5, -0.5, -0.5], [0.5, 0.5, 0.5]);
        // through the middle
        assert!(segment_intersects_aabb([-2.0, 0.0, 0.0], [2.0, 0.0, 0.0], &b));
        // misses
        assert!(!segment_intersects_aabb([-2.0, 2.0, 0.0], [2.0, 2.0, 0.0], &b));
        // degenerate point outside
        assert!(!segment_intersects_aabb([3.0, 0.0, 0.0], [3.0, 0.0, 0.0], &b));
        // degenerate point inside
        assert!(segment_intersects_aabb([0.1, 0.0, 0.0], [0.1, 0.0, 0.0], &b));
    }

    #[test]
    fn slab_test_agrees_with_dense_sampling() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..500 {
            let b = {
                let c: [f64; 3] = [
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                ];
                let h: [f64; 3] = [
                    rng.random_range(0.05..0.6),
                    rng.random_range(0.05..0.6),
                    rng.random_range(0.05..0.6),
                ];
                Aabb::new(
                    [c[0] - h[0], c[1] - h[1], c[2] - h[2]],
                    [c[0] + h[0], c[1] + h[1], c[2] + h[2]],
                )
            };
            let p: [f64; 3] = [
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
            ];
            let q: [f64; 3] = [
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
            ];
            let len = ((q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2) + (q[2] - p[2]).powi(2))
                .sqrt()
                .max(1e-9);
            let steps = (len / 0.001).ceil() as usize;
            let sampled = (0..=steps).any(|i| {
                let t = i as f64 / steps as f64;
                b.contains_point([
                    p[0] + t * (q[0] - p[0]),
                    p[1] + t * (q[1] - p[1]),
                    p[2] + t * (q[2] - p[2]),
                ])
            });
            let slab = segment_intersects_aabb(p, q, &b);
            // dense sampling can only miss grazing hits, never invent them
            if sampled {
                assert!(slab);
            }
        }
    }

    #[test]
    fn obb_vs_rect_overlap() {
        let r = Rect::new([0.0, 0.0], [1.0, 1.0]);
        let inside = ObbXy {
            center: [0.5, 0.5],
            half: [0.1, 0.1],
            yaw: 0.3,
        };
        assert!(inside.overlaps_rect(&r));
        let outside = ObbXy {
            center: [3.0, 3.0],
            half: [0.2, 0.2],
            yaw: 1.0,
        };
        assert!(!outside.overlaps_rect(&r));
        // rotated diamond whose corner pokes into the rect
        let diag = ObbXy {
            center: [1.2, 0.5],
            half: [0.3, 0.05],
            yaw: std::f64::consts::FRAC_PI_4,
        };
        assert!(diag.overlaps_rect(&r));
    }
}
