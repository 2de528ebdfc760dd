use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use touchscan::job::{self, CompareOptions, Job, JobError};
use touchscan::kinematics::{forward_kinematics, inverse_kinematics, JointAngles, Pose, RobotGeometry};
use touchscan::Point;

#[derive(Parser)]
#[command(name = "touchscan", version, about = "Contact-probe scanning simulator for a six-axis arm")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scan job and write its STL, XYZ, trace and report
    Scan { config: PathBuf },
    /// Chamfer distance between two STL or XYZ files
    Compare {
        a: PathBuf,
        b: PathBuf,
        /// Samples drawn from STL operands
        #[arg(long)]
        samples: Option<usize>,
        /// Samples per mm² drawn from STL operands (overrides --samples)
        #[arg(long)]
        density: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Sphere accuracy test from the [test_a] section
    TestA { config: PathBuf },
    /// Single-point repeatability test from the [test_b] section
    TestB { config: PathBuf },
    /// Tool pose for six joint angles in degrees
    Fk {
        #[arg(num_args = 6, allow_negative_numbers = true, required = true)]
        angles: Vec<f64>,
        /// Job file whose [robot] section sets the geometry
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Joint angles in degrees for a tool-tip position
    Ik {
        #[arg(num_args = 3, allow_negative_numbers = true, required = true)]
        position: Vec<f64>,
        /// Approach direction of the tool; straight down when omitted
        #[arg(long, num_args = 3, allow_negative_numbers = true)]
        approach: Option<Vec<f64>>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn geometry(config: Option<&Path>) -> Result<RobotGeometry, JobError> {
    match config {
        Some(p) => Ok(Job::load(p)?.geometry()),
        None => Ok(RobotGeometry::default()),
    }
}

fn run(cli: Cli) -> Result<(), JobError> {
    match cli.command {
        Command::Scan { config } => {
            let out = job::run_scan_job(&Job::load(&config)?)?;
            print!("{}", out.report);
        }
        Command::Compare { a, b, samples, density, seed } => {
            let report = job::compare_paths(&a, &b, &CompareOptions { samples, density, seed })?;
            println!("{report}");
        }
        Command::TestA { config } => print!("{}", job::run_test_a_job(&Job::load(&config)?)?),
        Command::TestB { config } => print!("{}", job::run_test_b_job(&Job::load(&config)?)?),
        Command::Fk { angles, config } => {
            let geom = geometry(config.as_deref())?;
            let q = JointAngles::from_degrees(angles.try_into().expect("clap enforces six values"));
            let pose = forward_kinematics(&q, &geom);
            let p = pose.position;
            println!("position {:.6} {:.6} {:.6}", p.x, p.y, p.z);
            for r in 0..3 {
                let row = pose.rotation.row(r);
                println!("rotation {:.9} {:.9} {:.9}", row[0], row[1], row[2]);
            }
        }
        Command::Ik { position, approach, config } => {
            let geom = geometry(config.as_deref())?;
            let p = Point::new(position[0], position[1], position[2]);
            let bad = |e: touchscan::kinematics::KinematicsError| JobError::Unreachable(e.to_string());
            let pose = match approach {
                Some(a) => Pose::with_approach(p, Point::new(a[0], a[1], a[2])).map_err(bad)?,
                None => Pose::tool_down(p),
            };
            let sol = inverse_kinematics(&pose, &geom).map_err(bad)?;
            println!("{}", sol.angles);
            if sol.wrist_singular {
                println!("wrist singular: theta4 fixed at 0");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error [{}]: {e}", e.stage());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
