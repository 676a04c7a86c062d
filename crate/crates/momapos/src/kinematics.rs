//! Robot model: base and body dimensions, a DH-parameterized serial arm,
//! forward kinematics, reach derivation, the horizontal reach radius, and
//! damped-least-squares inverse kinematics.

use crate::geom::wrap_angle;
use nalgebra::{DMatrix, DVector, Matrix3, Matrix4, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::path::Path;
use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum KinematicsError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid robot model: {0}")]
    Invalid(String),
    #[error("joint vector violates limits or has wrong length")]
    JointLimit,
    #[error("target height is beyond vertical arm reach")]
    OutOfVerticalReach,
}

/// One Denavit-Hartenberg row for a revolute joint, with limits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DhRow {
    pub a: f64,
    pub alpha: f64,
    pub d: f64,
    pub theta_offset: f64,
    pub limits: [f64; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RobotModel {
    pub name: String,
    /// Base dimensions (width, length, height) in meters.
    pub base_dims: [f64; 3],
    /// Body height between base top and the arm mount.
    pub body_height: f64,
    pub dh: Vec<DhRow>,
    #[serde(skip)]
    reach_cache: OnceLock<f64>,
}

impl PartialEq for RobotModel {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.base_dims == other.base_dims
            && self.body_height == other.body_height
            && self.dh == other.dh
    }
}

/// Base placement: 2D position plus yaw in (-pi, pi].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasePose {
    pub xy: [f64; 2],
    pub yaw: f64,
}

impl BasePose {
    /// Base placed at `xy` facing a world target point.
    pub fn facing(xy: [f64; 2], target: [f64; 3]) -> Self {
        let yaw = wrap_angle((target[1] - xy[1]).atan2(target[0] - xy[0]));
        BasePose { xy, yaw }
    }

    /// Height of the arm mount above the floor: base height plus body height.
    pub fn arm_mount_z(robot: &RobotModel) -> f64 {
        robot.base_dims[2] + robot.body_height
    }

    /// World position of a point given in the arm-base frame.
    pub fn arm_to_world(&self, robot: &RobotModel, p: [f64; 3]) -> [f64; 3] {
        let (s, c) = self.yaw.sin_cos();
        [
            self.xy[0] + c * p[0] - s * p[1],
            self.xy[1] + s * p[0] + c * p[1],
            Self::arm_mount_z(robot) + p[2],
        ]
    }

    /// Arm-base-frame position of a world point.
    pub fn world_to_arm(&self, robot: &RobotModel, p: [f64; 3]) -> [f64; 3] {
        let (s, c) = self.yaw.sin_cos();
        let dx = p[0] - self.xy[0];
        let dy = p[1] - self.xy[1];
        [c * dx + s * dy, -s * dx + c * dy, p[2] - Self::arm_mount_z(robot)]
    }
}

fn dh_matrix(row: &DhRow, q: f64) -> Matrix4<f64> {
    let theta = q + row.theta_offset;
    let (st, ct) = theta.sin_cos();
    let (sa, ca) = row.alpha.sin_cos();
    Matrix4::new(
        ct, -st * ca, st * sa, row.a * ct,
        st, ct * ca, -ct * sa, row.a * st,
        0.0, sa, ca, row.d,
        0.0, 0.0, 0.0, 1.0,
    )
}

/// End-effector pose in the arm-base frame.
#[derive(Debug, Clone, Copy)]
pub struct EePose {
    pub position: [f64; 3],
    pub rotation: Matrix3<f64>,
}

impl RobotModel {
    pub fn new(name: &str, base_dims: [f64; 3], body_height: f64, dh: Vec<DhRow>) -> Result<Self, KinematicsError> {
        let model = RobotModel {
            name: name.to_string(),
            base_dims,
            body_height,
            dh,
            reach_cache: OnceLock::new(),
        };
        model.validate()?;
        Ok(model)
    }

    fn validate(&self) -> Result<(), KinematicsError> {
        if self.base_dims.iter().any(|&d| d <= 0.0) || self.body_height <= 0.0 {
            return Err(KinematicsError::Invalid("nonpositive dimension".into()));
        }
        if self.dh.len() < 2 {
            return Err(KinematicsError::Invalid("arm needs at least 2 joints".into()));
        }
        for row in &self.dh {
            if row.limits[0] >= row.limits[1] {
                return Err(KinematicsError::Invalid("joint limits must satisfy lo < hi".into()));
            }
        }
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, KinematicsError> {
        let text = std::fs::read_to_string(path)?;
        let model: RobotModel = serde_json::from_str(&text)?;
        model.validate()?;
        Ok(model)
    }

    pub fn joint_count(&self) -> usize {
        self.dh.len()
    }

    pub fn within_limits(&self, q: &[f64]) -> bool {
        q.len() == self.dh.len()
            && q.iter()
                .zip(&self.dh)
                .all(|(&qi, row)| qi >= row.limits[0] && qi <= row.limits[1])
    }

    /// Mid-range configuration, the deterministic home pose.
    pub fn home_config(&self) -> Vec<f64> {
        self.dh
            .iter()
            .map(|row| 0.5 * (row.limits[0] + row.limits[1]))
            .collect()
    }

    pub fn clamp_to_limits(&self, q: &mut [f64]) {
        for (qi, row) in q.iter_mut().zip(&self.dh) {
            *qi = qi.clamp(row.limits[0], row.limits[1]);
        }
    }

    pub fn random_config(&self, rng: &mut impl Rng) -> Vec<f64> {
        self.dh
            .iter()
            .map(|row| rng.random_range(row.limits[0]..=row.limits[1]))
            .collect()
    }

    /// Cumulative frame transforms A_1..A_n; index i holds the transform of
    /// frame i relative to the arm base.
    fn frame_transforms(&self, q: &[f64]) -> Vec<Matrix4<f64>> {
        let mut out = Vec::with_capacity(self.dh.len());
        let mut t = Matrix4::identity();
        for (row, &qi) in self.dh.iter().zip(q) {
            t *= dh_matrix(row, qi);
            out.push(t);
        }
        out
    }

    pub fn forward_kinematics(&self, q: &[f64]) -> Result<EePose, KinematicsError> {
        if !self.within_limits(q) {
            return Err(KinematicsError::JointLimit);
        }
        Ok(self.fk_unchecked(q))
    }

    pub fn fk_unchecked(&self, q: &[f64]) -> EePose {
        let t = self
            .frame_transforms(q)
            .pop()
            .expect("arm has joints");
        EePose {
            position: [t[(0, 3)], t[(1, 3)], t[(2, 3)]],
            rotation: t.fixed_view::<3, 3>(0, 0).into_owned(),
        }
    }

    /// Frame origins along the chain (arm base first), for link collision
    /// checks.
    pub fn joint_origins(&self, q: &[f64]) -> Vec<[f64; 3]> {
        let mut pts = vec![[0.0, 0.0, 0.0]];
        for t in self.frame_transforms(q) {
            pts.push([t[(0, 3)], t[(1, 3)], t[(2, 3)]]);
        }
        pts
    }

    /// Maximum end-effector distance from the arm base over a dense joint
    /// grid (7 samples per joint by default, coarsened to stay under 1e6
    /// total FK evaluations).
    pub fn arm_reach(&self) -> f64 {
        *self.reach_cache.get_or_init(|| {
            let n = self.dh.len() as u32;
            let mut per_joint = 7usize;
            while per_joint > 2 && (per_joint as f64).powi(n as i32) > 1e6 {
                per_joint -= 1;
            }
            let mut best = 0.0_f64;
            let total = (per_joint as u64).pow(n);
            let mut q = vec![0.0; self.dh.len()];
            for idx in 0..total {
                let mut rem = idx;
                for (j, row) in self.dh.iter().enumerate() {
                    let s = (rem % per_joint as u64) as f64 / (per_joint as f64 - 1.0);
                    rem /= per_joint as u64;
                    q[j] = row.limits[0] + s * (row.limits[1] - row.limits[0]);
                }
                let p = self.fk_unchecked(&q).position;
                let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
                best = best.max(r);
            }
            best
        })
    }

    /// Horizontal reach radius at a target height:
    /// sqrt(reach^2 - (target_z - base_z - body_height)^2).
    pub fn delta_r(&self, base_z: f64, target_z: f64) -> Result<f64, KinematicsError> {
        let reach = self.arm_reach();
        let offset = target_z - base_z - self.body_height;
        let radicand = reach * reach - offset * offset;
        if radicand < 0.0 {
            return Err(KinematicsError::OutOfVerticalReach);
        }
        Ok(radicand.sqrt())
    }

    fn position_jacobian(&self, q: &[f64]) -> DMatrix<f64> {
        let frames = self.frame_transforms(q);
        let pe = Vector3::new(
            frames[frames.len() - 1][(0, 3)],
            frames[frames.len() - 1][(1, 3)],
            frames[frames.len() - 1][(2, 3)],
        );
        let mut jac = DMatrix::zeros(3, self.dh.len());
        for i in 0..self.dh.len() {
            let (z, p) = if i == 0 {
                (Vector3::z(), Vector3::zeros())
            } else {
                let t = &frames[i - 1];
                (
                    Vector3::new(t[(0, 2)], t[(1, 2)], t[(2, 2)]),
                    Vector3::new(t[(0, 3)], t[(1, 3)], t[(2, 3)]),
                )
            };
            let col = z.cross(&(pe - p));
            jac.set_column(i, &DVector::from_column_slice(col.as_slice()));
        }
        jac
    }

    /// Damped-least-squares IK toward a position target in the arm-base
    /// frame. Returns None when no restart converges within tolerance.
    pub fn solve_ik(&self, target: [f64; 3], params: &IkParams) -> Option<Vec<f64>> {
        assert!(params.tol > 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        for restart in 0..params.restarts {
            let start = if restart == 0 {
                self.home_config()
            } else {
                self.random_config(&mut rng)
            };
            if let Some(q) = self.solve_ik_from(&start, target, params) {
                return Some(q);
            }
        }
        None
    }

    /// Single damped-least-squares descent from an explicit start
    /// configuration (no restarts).
    pub fn solve_ik_from(
        &self,
        start: &[f64],
        target: [f64; 3],
        params: &IkParams,
    ) -> Option<Vec<f64>> {
        assert!(params.tol > 0.0);
        let goal = Vector3::from(target);
        let mut q = start.to_vec();
        self.clamp_to_limits(&mut q);
        for _ in 0..params.max_iters {
            let p = Vector3::from(self.fk_unchecked(&q).position);
            let err = goal - p;
            if err.norm() <= params.tol {
                return Some(q);
            }
            let jac = self.position_jacobian(&q);
            let jjt =
                &jac * jac.transpose() + Matrix3::identity() * (params.damping * params.damping);
            let inv = jjt.try_inverse()?;
            let mut dq = jac.transpose() * (inv * err);
            let norm = dq.norm();
            if norm > params.step_cap {
                dq *= params.step_cap / norm;
            }
            for (qi, di) in q.iter_mut().zip(dq.iter()) {
                *qi += di;
            }
            self.clamp_to_limits(&mut q);
        }
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IkParams {
    pub tol: f64,
    pub damping: f64,
    pub max_iters: usize,
    pub restarts: usize,
    pub step_cap: f64,
    pub seed: u64,
}

impl Default for IkParams {
    fn default() -> Self {
        IkParams {
            tol: 0.01,
            damping: 0.05,
            max_iters: 200,
            restarts: 10,
            step_cap: 0.5,
            seed: 0,
        }
    }
}

impl IkParams {
    pub fn with_seed(self, seed: u64) -> Self {
        IkParams { seed, ..self }
    }
}

/// Robot presets standing in for the hardware variety used in evaluation.
pub mod presets {
    use super::*;
    use std::f64::consts::PI;

    fn row(a: f64, alpha: f64, d: f64, limits: [f64; 2]) -> DhRow {
        DhRow {
            a,
            alpha,
            d,
            theta_offset: 0.0,
            limits,
        }
    }

    /// Default 6-DOF arm on a 0.5 x 0.5 x 0.3 m base. Home configuration
    /// points the arm straight up above the base center.
    pub fn generic6() -> RobotModel {
        RobotModel::new(
            "generic6",
            [0.5, 0.5, 0.3],
            0.4,
            vec![
                row(0.0, PI / 2.0, 0.15, [-PI, PI]),
                row(0.55, 0.0, 0.0, [0.0, PI]),
                row(0.45, 0.0, 0.0, [-2.9, 2.9]),
                row(0.0, PI / 2.0, 0.08, [-PI, PI]),
                row(0.0, -PI / 2.0, 0.0, [-1.9, 1.9]),
                row(0.0, 0.0, 0.08, [-PI, PI]),
            ],
        )
        .expect("valid preset")
    }

    /// Short-reach variant (links scaled down).
    pub fn short6() -> RobotModel {
        RobotModel::new(
            "short6",
            [0.4, 0.4, 0.25],
            0.3,
            vec![
                row(0.0, PI / 2.0, 0.10, [-PI, PI]),
                row(0.28, 0.0, 0.0, [0.0, PI]),
                row(0.22, 0.0, 0.0, [-2.9, 2.9]),
                row(0.0, PI / 2.0, 0.06, [-PI, PI]),
                row(0.0, -PI / 2.0, 0.0, [-1.9, 1.9]),
                row(0.0, 0.0, 0.06, [-PI, PI]),
            ],
        )
        .expect("valid preset")
    }

    /// Tall-body variant with the default arm.
    pub fn tall6() -> RobotModel {
        RobotModel::new(
            "tall6",
            [0.5, 0.5, 0.35],
            0.65,
            generic6().dh.clone(),
        )
        .expect("valid preset")
    }

    /// Two-link planar test arm (links 0.5 and 0.5, full limits).
    pub fn planar2() -> RobotModel {
        RobotModel::new(
            "planar2",
            [0.4, 0.4, 0.2],
            0.2,
            vec![
                row(0.5, 0.0, 0.0, [-PI, PI]),
                row(0.5, 0.0, 0.0, [-PI, PI]),
            ],
        )
        .expect("valid preset")
    }

    pub fn by_name(name: &str) -> Option<RobotModel> {
        match name {
            "generic6" => Some(generic6()),
            "short6" => Some(short6()),
            "tall6" => Some(tall6()),
            "planar2" => Some(planar2()),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn planar_fk_straight_and_bent() {
        let robot = presets::planar2();
        let p = robot.forward_kinematics(&[0.0, 0.0]).unwrap().position;
        assert!((p[0] - 1.0).abs() < 1e-12 && p[1].abs() < 1e-12 && p[2].abs() < 1e-12);
        let p = robot.forward_kinematics(&[FRAC_PI_2, 0.0]).unwrap().position;
        assert!(p[0].abs() < 1e-12 && (p[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fk_matches_naive_matrix_product_oracle() {
        use rand::SeedableRng;
        // independent re-implementation: multiply the four elementary
        // transforms one by one instead of the closed-form DH matrix
        fn naive_fk(robot: &RobotModel, q: &[f64]) -> [f64; 3] {
            let mut t = Matrix4::<f64>::identity();
            for (row, &qi) in robot.dh.iter().zip(q) {
                let theta = qi + row.theta_offset;
                let rz = Matrix4::new(
                    theta.cos(), -theta.sin(), 0.0, 0.0,
                    theta.sin(), theta.cos(), 0.0, 0.0,
                    0.0, 0.0, 1.0, 0.0,
                    0.0, 0.0, 0.0, 1.0,
                );
                let tz = Matrix4::new(
                    1.0, 0.0, 0.0, 0.0,
                    0.0, 1.0, 0.0, 0.0,
                    0.0, 0.0, 1.0, row.d,
                    0.0, 0.0, 0.0, 1.0,
                );
                let tx = Matrix4::new(
                    1.0, 0.0, 0.0, row.a,
                    0.0, 1.0, 0.0, 0.0,
                    0.0, 0.0, 1.0, 0.0,
                    0.0, 0.0, 0.0, 1.0,
                );
                let rx = Matrix4::new(
                    1.0, 0.0, 0.0, 0.0,
                    0.0, row.alpha.cos(), -row.alpha.sin(), 0.0,
                    0.0, row.alpha.sin(), row.alpha.cos(), 0.0,
                    0.0, 0.0, 0.0, 1.0,
                );
                t = t * rz * tz * tx * rx;
            }
            [t[(0, 3)], t[(1, 3)], t[(2, 3)]]
        }
        let robot = presets::generic6();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let q = robot.random_config(&mut rng);
            let got = robot.forward_kinematics(&q).unwrap().position;
            let want = naive_fk(&robot, &q);
            for k in 0..3 {
                assert!((got[k] - want[k]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn fk_rejects_out_of_limit() {
        let robot = presets::generic6();
        let mut q = robot.home_config();
        q[1] = 100.0;
        assert!(matches!(
            robot.forward_kinematics(&q),
            Err(KinematicsError::JointLimit)
        ));
    }

    #[test]
    fn planar_reach_is_one() {
        let robot = presets::planar2();
        assert!((robot.arm_reach() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn single_link_reach() {
        let robot = RobotModel::new(
            "onelink",
            [0.4, 0.4, 0.2],
            0.2,
            vec![
                DhRow { a: 0.7, alpha: 0.0, d: 0.0, theta_offset: 0.0, limits: [-PI, PI] },
                DhRow { a: 0.0, alpha: 0.0, d: 0.0, theta_offset: 0.0, limits: [-PI, PI] },
            ],
        )
        .unwrap();
        assert!((robot.arm_reach() - 0.7).abs() < 1e-9);
    }

    #[test]
    fn reach_matches_monte_carlo_on_limited_elbow() {
        use rand::{Rng, SeedableRng};
        let robot = RobotModel::new(
            "elbow3",
            [0.4, 0.4, 0.2],
            0.2,
            vec![
                DhRow { a: 0.4, alpha: 0.0, d: 0.0, theta_offset: 0.0, limits: [-PI, PI] },
                DhRow { a: 0.3, alpha: 0.0, d: 0.0, theta_offset: 0.0, limits: [0.0, FRAC_PI_2] },
                DhRow { a: 0.2, alpha: 0.0, d: 0.0, theta_offset: 0.0, limits: [0.0, FRAC_PI_2] },
            ],
        )
        .unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut best = 0.0_f64;
        for _ in 0..1_000_000 {
            let q = robot.random_config(&mut rng);
            let p = robot.fk_unchecked(&q).position;
            best = best.max((p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt());
        }
        let grid = robot.arm_reach();
        assert!((grid - best).abs() / best < 0.01, "grid {grid} mc {best}");
        let _ = rng.random::<u8>();
    }

    #[test]
    fn delta_r_pythagorean_cases() {
        let robot = presets::planar2(); // reach 1.0, body 0.2, base z 0.2
        let base_z = robot.base_dims[2];
        // zero vertical offset
        let d = robot.delta_r(base_z, base_z + robot.body_height).unwrap();
        assert!((d - 1.0).abs() < 1e-9);
        // 0.6 offset -> 0.8
        let d = robot.delta_r(base_z, base_z + robot.body_height + 0.6).unwrap();
        assert!((d - 0.8).abs() < 1e-9);
        // beyond reach
        assert!(matches!(
            robot.delta_r(base_z, base_z + robot.body_height + 1.1),
            Err(KinematicsError::OutOfVerticalReach)
        ));
    }

    #[test]
    fn delta_r_even_and_decreasing_in_offset() {
        let robot = presets::planar2();
        let z0 = robot.base_dims[2] + robot.body_height;
        let mut prev = f64::INFINITY;
        for off in [0.0, 0.2, 0.4, 0.6, 0.8, 0.99] {
            let up = robot.delta_r(robot.base_dims[2], z0 + off).unwrap();
            let down = robot.delta_r(robot.base_dims[2], z0 - off).unwrap();
            assert!((up - down).abs() < 1e-12);
            assert!(up < prev || off == 0.0);
            prev = up;
        }
    }

    #[test]
    fn ik_recovers_fk_targets() {
        use rand::SeedableRng;
        let robot = presets::generic6();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for i in 0..20 {
            let q0 = robot.random_config(&mut rng);
            let target = robot.fk_unchecked(&q0).position;
            let params = IkParams::default().with_seed(i);
            let q = robot.solve_ik(target, &params).expect("reachable target");
            let p = robot.fk_unchecked(&q).position;
            let err = ((p[0] - target[0]).powi(2)
                + (p[1] - target[1]).powi(2)
                + (p[2] - target[2]).powi(2))
            .sqrt();
            assert!(err <= params.tol);
            assert!(robot.within_limits(&q));
        }
    }

    #[test]
    fn ik_rejects_unreachable() {
        let robot = presets::planar2();
        assert!(robot
            .solve_ik([1.2, 0.0, 0.0], &IkParams::default())
            .is_none());
    }

    #[test]
    fn ik_agrees_with_planar_annulus() {
        use rand::{Rng, SeedableRng};
        let robot = presets::planar2();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mut agree = 0;
        let n = 1000;
        for i in 0..n {
            let r: f64 = rng.random_range(0.01..1.3);
            let ang: f64 = rng.random_range(-PI..PI);
            let target = [r * ang.cos(), r * ang.sin(), 0.0];
            let reachable = r <= 1.0; // |l1 - l2| = 0
            let solved = robot
                .solve_ik(target, &IkParams::default().with_seed(i))
                .is_some();
            if reachable == solved {
                agree += 1;
            }
        }
        assert!(agree * 100 >= n * 99, "agreement {agree}/{n}");
    }

    #[test]
    fn home_pose_is_a_vertical_column() {
        let robot = presets::generic6();
        let home = robot.home_config();
        // wrist offsets push the tool point out laterally, but everything
        // stays above the 0.25 m base half-width
        for p in robot.joint_origins(&home) {
            assert!((p[0] * p[0] + p[1] * p[1]).sqrt() < 0.2, "{p:?}");
        }
    }

    #[test]
    fn robot_file_roundtrip() {
        let robot = presets::generic6();
        let text = serde_json::to_string(&robot).unwrap();
        let back: RobotModel = serde_json::from_str(&text).unwrap();
        assert_eq!(robot, back);
    }
}
