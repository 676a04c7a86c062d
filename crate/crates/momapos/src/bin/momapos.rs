//! Thin command-line front end over the library. Everything here is
//! argument plumbing; the planning logic lives in the crate.

use clap::{Args, Parser, Subcommand};
use momapos::eval::{evaluate, EvalConfig, Strategy};
use momapos::importance::{score_scene, select_objects};
use momapos::kinematics::{presets, RobotModel};
use momapos::potential::{candidate_area, potential_map, target_waypoints, Weights};
use momapos::reachability::{build_irm, load_irm, save_irm, ReachabilityMap, DEFAULT_VOXEL_SIZE};
use momapos::scene::{load_scene, Scene};
use momapos::search::{plan, PlannerConfig};
use serde::Deserialize;
use std::collections::HashSet;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "momapos", about = "Base placement planning for mobile manipulators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build or inspect an inverse reachability map.
    Irm {
        #[command(subcommand)]
        action: IrmAction,
    },
    /// Plan a base placement for a manipulation target.
    Plan(PlanArgs),
    /// Score object importance relative to a target.
    Importance(ImportanceArgs),
    /// Render the potential map over the candidate area.
    Render(RenderArgs),
    /// Run the strategy benchmark over one or more scenes.
    Eval(EvalArgs),
}

#[derive(Subcommand)]
enum IrmAction {
    Build {
        #[arg(long, default_value = "generic6")]
        robot: String,
        #[arg(long, default_value_t = 200_000)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_VOXEL_SIZE)]
        voxel: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    Info {
        #[arg(long)]
        irm: PathBuf,
    },
}

#[derive(Args)]
struct PlanArgs {
    #[arg(long)]
    scene: PathBuf,
    #[arg(long, default_value = "generic6")]
    robot: String,
    #[arg(long)]
    target: String,
    /// Planner overrides as a JSON file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Prebuilt reachability map; built in memory when absent.
    #[arg(long)]
    irm: Option<PathBuf>,
    #[arg(long, default_value_t = 200_000)]
    irm_samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Start position as "x,y".
    #[arg(long, value_parser = parse_xy, allow_hyphen_values = true)]
    start: Option<[f64; 2]>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ImportanceArgs {
    #[arg(long)]
    scene: PathBuf,
    #[arg(long)]
    target: String,
    #[arg(long, default_value_t = 0.45)]
    alpha: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long)]
    scene: PathBuf,
    #[arg(long, default_value = "generic6")]
    robot: String,
    #[arg(long)]
    target: String,
    #[arg(long)]
    irm: Option<PathBuf>,
    #[arg(long, default_value_t = 200_000)]
    irm_samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.05)]
    resolution: f64,
    /// "pgm" or "csv".
    #[arg(long, default_value = "pgm")]
    format: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    /// Scene file; repeat for a suite.
    #[arg(long, required = true)]
    scene: Vec<PathBuf>,
    #[arg(long, default_value = "generic6")]
    robot: String,
    #[arg(long)]
    target: String,
    /// Comma-separated subset of momapos,habitat,m3star,reuleaux.
    #[arg(long, default_value = "momapos,habitat,m3star,reuleaux")]
    strategies: String,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    irm: Option<PathBuf>,
    #[arg(long, default_value_t = 200_000)]
    irm_samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_parser = parse_xy, allow_hyphen_values = true)]
    start: Option<[f64; 2]>,
    /// Per-case CSV; the summary always goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_xy(s: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err("expected \"x,y\"".into());
    }
    let x = parts[0].trim().parse().map_err(|e| format!("bad x: {e}"))?;
    let y = parts[1].trim().parse().map_err(|e| format!("bad y: {e}"))?;
    Ok([x, y])
}

/// Optional planner overrides accepted by `--config`.
#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    samples: Option<usize>,
    group_size: Option<usize>,
    k1: Option<f64>,
    k1_prime: Option<f64>,
    alpha_init: Option<f64>,
    alpha_decay: Option<f64>,
    alpha_min: Option<f64>,
    w_irm: Option<f64>,
    w_field: Option<f64>,
    resolution: Option<f64>,
    budget: Option<usize>,
}

impl ConfigFile {
    fn apply(&self, mut c: PlannerConfig) -> PlannerConfig {
        if let Some(v) = self.samples {
            c.samples = v;
        }
        if let Some(v) = self.group_size {
            c.group_size = v;
        }
        if let Some(v) = self.k1 {
            c.k1 = v;
        }
        if let Some(v) = self.k1_prime {
            c.k1_prime = v;
        }
        if let Some(v) = self.alpha_init {
            c.alpha_init = v;
        }
        if let Some(v) = self.alpha_decay {
            c.alpha_decay = v;
        }
        if let Some(v) = self.alpha_min {
            c.alpha_min = v;
        }
        if let Some(v) = self.w_irm {
            c.weights.irm = v;
        }
        if let Some(v) = self.w_field {
            c.weights.field = v;
        }
        if let Some(v) = self.resolution {
            c.resolution = v;
        }
        c
    }
}

/// IO/usage failures exit 2; an infeasible result exits 1.
enum CliError {
    Usage(String),
    Io(String),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

type CliResult = Result<ExitCode, CliError>;

fn load_robot(spec: &str) -> Result<RobotModel, CliError> {
    match spec {
        "generic6" => Ok(presets::generic6()),
        "tall6" => Ok(presets::tall6()),
        "planar2" => Ok(presets::planar2()),
        path => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("robot `{path}`: {e}")))?;
            serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("robot `{path}`: {e}")))
        }
    }
}

fn read_scene(path: &Path) -> Result<Scene, CliError> {
    load_scene(path).map_err(|e| CliError::Io(format!("scene `{}`: {e}", path.display())))
}

fn read_config(path: Option<&PathBuf>) -> Result<ConfigFile, CliError> {
    match path {
        None => Ok(ConfigFile::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Io(format!("config `{}`: {e}", p.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("config `{}`: {e}", p.display())))
        }
    }
}

/// Loads the map when the path exists, otherwise builds one (and saves it
/// if a path was given).
fn obtain_irm(
    path: Option<&PathBuf>,
    robot: &RobotModel,
    samples: usize,
    seed: u64,
) -> Result<ReachabilityMap, CliError> {
    if let Some(p) = path {
        if p.exists() {
            return load_irm(p).map_err(|e| CliError::Io(format!("irm `{}`: {e}", p.display())));
        }
    }
    let map = build_irm(robot, samples, DEFAULT_VOXEL_SIZE, seed);
    if let Some(p) = path {
        save_irm(&map, p).map_err(|e| CliError::Io(format!("irm `{}`: {e}", p.display())))?;
    }
    Ok(map)
}

fn out_writer(path: Option<&PathBuf>) -> Result<Box<dyn Write>, CliError> {
    match path {
        Some(p) => Ok(Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::Io(format!("out `{}`: {e}", p.display())))?,
        ))),
        None => Ok(Box::new(std::io::stdout())),
    }
}

fn cmd_irm(action: IrmAction) -> CliResult {
    match action {
        IrmAction::Build { robot, samples, voxel, seed, out } => {
            let robot = load_robot(&robot)?;
            let map = build_irm(&robot, samples, voxel, seed);
            save_irm(&map, &out).map_err(|e| CliError::Io(e.to_string()))?;
            println!(
                "wrote {} ({} voxels nonzero of {})",
                out.display(),
                map.nonzero_voxels(),
                map.counts.len()
            );
            Ok(ExitCode::SUCCESS)
        }
        IrmAction::Info { irm } => {
            let map = load_irm(&irm).map_err(|e| CliError::Io(e.to_string()))?;
            println!("robot: {}", map.robot_name);
            println!("voxel_size: {}", map.voxel_size);
            println!("dims: {}x{}x{}", map.dims[0], map.dims[1], map.dims[2]);
            println!(
                "extent: [{}, {}] per axis",
                map.extent.min[0], map.extent.max[0]
            );
            println!("nonzero_voxels: {}", map.nonzero_voxels());
            println!("max_count: {}", map.max_count);
            println!("build_seed: {}", map.build_seed);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn cmd_plan(args: PlanArgs) -> CliResult {
    let scene = read_scene(&args.scene)?;
    let robot = load_robot(&args.robot)?;
    let irm = obtain_irm(args.irm.as_ref(), &robot, args.irm_samples, args.seed)?;
    let mut config = read_config(args.config.as_ref())?
        .apply(PlannerConfig::default())
        .with_seed(args.seed);
    config.feasibility = config.feasibility.with_seed(args.seed);
    if let Some(start) = args.start {
        config.start_xy = start;
    }
    let result = plan(&scene, &robot, &irm, &args.target, &config)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let mut w = out_writer(args.out.as_ref())?;
    writeln!(w, "{}", result.to_json())?;
    w.flush()?;
    Ok(if result.feasible() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_importance(args: ImportanceArgs) -> CliResult {
    let scene = read_scene(&args.scene)?;
    let mut config = PlannerConfig::default().with_seed(args.seed);
    config.walk.seed = args.seed;
    config.embed.seed = args.seed.wrapping_add(1);
    let scores = score_scene(&scene, &args.target, &config.walk, &config.embed)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let result = select_objects(&scores, &args.target, args.alpha);
    let mut w = out_writer(args.out.as_ref())?;
    result.write_csv(&mut w)?;
    w.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_render(args: RenderArgs) -> CliResult {
    let scene = read_scene(&args.scene)?;
    let robot = load_robot(&args.robot)?;
    let irm = obtain_irm(args.irm.as_ref(), &robot, args.irm_samples, args.seed)?;
    let subset: HashSet<String> = scene.ids().map(str::to_string).collect();
    let area = candidate_area(&scene, &subset, &robot, &args.target)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let obj = scene
        .object(&args.target)
        .ok_or_else(|| CliError::Usage(format!("unknown target `{}`", args.target)))?;
    let waypoints = target_waypoints(obj);
    let map = potential_map(&area, &irm, &robot, &waypoints, args.resolution, Weights::default())
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let mut w = out_writer(Some(&args.out))?;
    match args.format.as_str() {
        "pgm" => map.write_pgm(&mut w)?,
        "csv" => map.write_csv(&mut w)?,
        other => return Err(CliError::Usage(format!("unknown format `{other}`"))),
    }
    w.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_eval(args: EvalArgs) -> CliResult {
    let scenes: Vec<Scene> = args
        .scene
        .iter()
        .map(|p| read_scene(p))
        .collect::<Result<_, _>>()?;
    let robot = load_robot(&args.robot)?;
    let irm = obtain_irm(args.irm.as_ref(), &robot, args.irm_samples, args.seed)?;
    let strategies: Vec<Strategy> = args
        .strategies
        .split(',')
        .map(|s| {
            Strategy::from_name(s.trim())
                .ok_or_else(|| CliError::Usage(format!("unknown strategy `{s}`")))
        })
        .collect::<Result<_, _>>()?;
    let file_config = read_config(args.config.as_ref())?;
    let mut config = EvalConfig {
        strategies,
        planner: file_config.apply(PlannerConfig::default()),
        ..EvalConfig::default()
    }
    .with_seed(args.seed);
    if let Some(b) = file_config.budget {
        config.budget = b;
    }
    if let Some(start) = args.start {
        config.start_xy = start;
    }
    let report = evaluate(&scenes, &robot, &irm, &args.target, &config)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    if let Some(out) = &args.out {
        let mut w = out_writer(Some(out))?;
        report.write_csv(&mut w)?;
        w.flush()?;
    }
    print!("{}", report.summary_text());
    let all_ok = report.cases.iter().all(|c| c.success);
    Ok(if all_ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Irm { action } => cmd_irm(action),
        Command::Plan(args) => cmd_plan(args),
        Command::Importance(args) => cmd_importance(args),
        Command::Render(args) => cmd_render(args),
        Command::Eval(args) => cmd_eval(args),
    };
    match result {
        Ok(code) => code,
        Err(CliError::Usage(msg)) | Err(CliError::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
