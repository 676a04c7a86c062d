//! Inverse reachability map: forward-sampled end-effector positions binned
//! into a voxel grid in the arm-base frame, queried by transforming world
//! targets into that frame.

use crate::geom::Aabb;
use crate::kinematics::{BasePose, RobotModel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::io::{Read, Write};
use std::path::Path;
use thiserror::Error;

const MAGIC: &[u8; 4] = b"IRM1";
const VERSION: u16 = 1;

#[derive(Debug, Error)]
pub enum IrmError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("format error: {0}")]
    Format(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReachabilityMap {
    pub voxel_size: f64,
    /// Cube in the arm-base frame, half-width = arm reach.
    pub extent: Aabb,
    pub dims: [usize; 3],
    pub counts: Vec<u32>,
    pub max_count: u32,
    pub robot_name: String,
    pub build_seed: u64,
}

impl ReachabilityMap {
    fn voxel_index(&self, p: [f64; 3]) -> Option<usize> {
        let mut idx = [0usize; 3];
        for k in 0..3 {
            let i = ((p[k] - self.extent.min[k]) / self.voxel_size).floor();
            if i < 0.0 || i >= self.dims[k] as f64 {
                return None;
            }
            idx[k] = i as usize;
        }
        Some((idx[2] * self.dims[1] + idx[1]) * self.dims[0] + idx[0])
    }

    pub fn count_at(&self, p: [f64; 3]) -> u32 {
        self.voxel_index(p).map_or(0, |i| self.counts[i])
    }

    /// Normalized reachability score for a target given in the arm-base
    /// frame.
    pub fn score_local(&self, p: [f64; 3]) -> f64 {
        if self.max_count == 0 {
            return 0.0;
        }
        f64::from(self.count_at(p)) / f64::from(self.max_count)
    }

    pub fn nonzero_voxels(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }

    /// Center of voxel (i, j, k).
    pub fn voxel_center(&self, i: usize, j: usize, k: usize) -> [f64; 3] {
        [
            self.extent.min[0] + (i as f64 + 0.5) * self.voxel_size,
            self.extent.min[1] + (j as f64 + 0.5) * self.voxel_size,
            self.extent.min[2] + (k as f64 + 0.5) * self.voxel_size,
        ]
    }

    pub fn write_csv(&self, w: &mut impl Write) -> std::io::Result<()> {
        writeln!(w, "x,y,z,count,score")?;
        for k in 0..self.dims[2] {
            for j in 0..self.dims[1] {
                for i in 0..self.dims[0] {
                    let idx = (k * self.dims[1] + j) * self.dims[0] + i;
                    let c = self.counts[idx];
                    if c > 0 {
                        let p = self.voxel_center(i, j, k);
                        writeln!(
                            w,
                            "{},{},{},{},{}",
                            p[0],
                            p[1],
                            p[2],
                            c,
                            f64::from(c) / f64::from(self.max_count)
                        )?;
                    }
                }
            }
        }
        Ok(())
    }
}

pub const DEFAULT_IRM_SAMPLES: usize = 2_000_000;
pub const DEFAULT_VOXEL_SIZE: f64 = 0.05;

/// Builds the map by drawing uniform in-limit joint samples and binning FK
/// end-effector positions.
pub fn build_irm(robot: &RobotModel, samples: usize, voxel_size: f64, seed: u64) -> ReachabilityMap {
    assert!(samples >= 1 && voxel_size > 0.0);
    let reach = robot.arm_reach();
    let half = reach + voxel_size; // margin so boundary points bin cleanly
    let extent = Aabb::new([-half, -half, -half], [half, half, half]);
    let n = ((2.0 * half) / voxel_size).ceil() as usize;
    let mut map = ReachabilityMap {
        voxel_size,
        extent,
        dims: [n, n, n],
        counts: vec![0; n * n * n],
        max_count: 0,
        robot_name: robot.name.clone(),
        build_seed: seed,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let q = robot.random_config(&mut rng);
        let p = robot.fk_unchecked(&q).position;
        if let Some(idx) = map.voxel_index(p) {
            map.counts[idx] += 1;
        }
    }
    map.max_count = map.counts.iter().copied().max().unwrap_or(0);
    map
}

/// Looks up the reachability score for a world-frame target from a base
/// pose. Targets outside the map extent score 0.
pub fn irm_query(
    map: &ReachabilityMap,
    robot: &RobotModel,
    base: &BasePose,
    target: [f64; 3],
) -> f64 {
    map.score_local(base.world_to_arm(robot, target))
}

pub fn save_irm(map: &ReachabilityMap, path: impl AsRef<Path>) -> Result<(), IrmError> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&map.voxel_size.to_le_bytes())?;
    for v in map.extent.min.iter().chain(map.extent.max.iter()) {
        w.write_all(&v.to_le_bytes())?;
    }
    for d in map.dims {
        w.write_all(&(d as u32).to_le_bytes())?;
    }
    w.write_all(&map.build_seed.to_le_bytes())?;
    let name = map.robot_name.as_bytes();
    w.write_all(&(name.len() as u32).to_le_bytes())?;
    w.write_all(name)?;
    for c in &map.counts {
        w.write_all(&c.to_le_bytes())?;
    }
    Ok(())
}

pub fn load_irm(path: impl AsRef<Path>) -> Result<ReachabilityMap, IrmError> {
    let mut r = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)
        .map_err(|_| IrmError::Format("truncated header".into()))?;
    if &magic != MAGIC {
        return Err(IrmError::Format("bad magic".into()));
    }
    let mut buf2 = [0u8; 2];
    r.read_exact(&mut buf2)
        .map_err(|_| IrmError::Format("truncated header".into()))?;
    let version = u16::from_le_bytes(buf2);
    if version != VERSION {
        return Err(IrmError::Format(format!("unsupported version {version}")));
    }
    let mut f64buf = [0u8; 8];
    let mut read_f64 = |r: &mut dyn Read| -> Result<f64, IrmError> {
        r.read_exact(&mut f64buf)
            .map_err(|_| IrmError::Format("truncated header".into()))?;
        Ok(f64::from_le_bytes(f64buf))
    };
    let voxel_size = read_f64(&mut r)?;
    if !(voxel_size.is_finite() && voxel_size > 0.0) {
        return Err(IrmError::Format("bad voxel size".into()));
    }
    let mut ext = [0.0; 6];
    for e in &mut ext {
        *e = read_f64(&mut r)?;
    }
    let extent = Aabb::new([ext[0], ext[1], ext[2]], [ext[3], ext[4], ext[5]]);
    let mut dims = [0usize; 3];
    let mut buf4 = [0u8; 4];
    for d in &mut dims {
        r.read_exact(&mut buf4)
            .map_err(|_| IrmError::Format("truncated header".into()))?;
        *d = u32::from_le_bytes(buf4) as usize;
    }
    let total = dims[0]
        .checked_mul(dims[1])
        .and_then(|v| v.checked_mul(dims[2]))
        .ok_or_else(|| IrmError::Format("dims overflow".into()))?;
    if total == 0 || total > 1 << 30 {
        return Err(IrmError::Format("implausible dims".into()));
    }
    let mut buf8 = [0u8; 8];
    r.read_exact(&mut buf8)
        .map_err(|_| IrmError::Format("truncated header".into()))?;
    let build_seed = u64::from_le_bytes(buf8);
    r.read_exact(&mut buf4)
        .map_err(|_| IrmError::Format("truncated header".into()))?;
    let name_len = u32::from_le_bytes(buf4) as usize;
    if name_len > 4096 {
        return Err(IrmError::Format("implausible name length".into()));
    }
    let mut name = vec![0u8; name_len];
    r.read_exact(&mut name)
        .map_err(|_| IrmError::Format("truncated name".into()))?;
    let robot_name =
        String::from_utf8(name).map_err(|_| IrmError::Format("name not utf-8".into()))?;
    let mut counts = vec![0u32; total];
    for c in &mut counts {
        r.read_exact(&mut buf4)
            .map_err(|_| IrmError::Format("truncated payload".into()))?;
        *c = u32::from_le_bytes(buf4);
    }
    let max_count = counts.iter().copied().max().unwrap_or(0);
    Ok(ReachabilityMap {
        voxel_size,
        extent,
        dims,
        counts,
        max_count,
        robot_name,
        build_seed,
    })
}
