use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use slitspiral::cli::{self, CaseChoice, Format, InputDocument, Params, PathDocument, ValidatedDomain};
use slitspiral::Result;

#[derive(Parser)]
#[command(name = "slitspiral", version, about = "Spiral coverage paths for multiply connected planar domains")]
struct Cli {
    /// More log output (repeat for debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline: map, space, spiral, fuse, trim and score.
    Plan {
        #[command(flatten)]
        common: Common,
        /// Artifacts to write (default: all).
        #[arg(long, value_enum, value_delimiter = ',')]
        formats: Vec<Format>,
    },
    /// Solve the slit map only; writes mapped radii, slits and boundary images.
    Map {
        #[command(flatten)]
        common: Common,
    },
    /// Largest inscribed circle of the domain or of a mapped band.
    Mic {
        #[command(flatten)]
        common: Common,
        /// Band between the preimages of |w| = RA and |w| = RB.
        #[arg(long, num_args = 2, value_names = ["RA", "RB"])]
        gap: Option<Vec<f64>>,
    },
    /// Re-score an existing path JSON against the domain.
    Metrics {
        #[command(flatten)]
        common: Common,
        /// Path document written by `plan`.
        #[arg(long)]
        path: PathBuf,
    },
}

/// Flags mirroring the `params` block of the input document; flags win.
#[derive(Args)]
struct Common {
    /// Domain document (JSON).
    input: PathBuf,
    /// Output directory (default: $SLITSPIRAL_OUT_DIR, else ./out).
    #[arg(short, long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    case: Option<CaseChoice>,
    /// Samples per boundary.
    #[arg(short = 'n', long)]
    samples: Option<usize>,
    /// Samples per iso-parameter curve.
    #[arg(long)]
    n_hat: Option<usize>,
    /// Corner grading exponent.
    #[arg(short = 'p', long)]
    grading: Option<u32>,
    /// Tool radius C.
    #[arg(short = 'c', long)]
    spacing: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Fixed spiral start angle in (-pi, pi]; scans when absent.
    #[arg(long, allow_hyphen_values = true)]
    theta0: Option<f64>,
    #[arg(long)]
    samples_per_turn: Option<usize>,
    /// Coverage raster cell (default C/20).
    #[arg(long)]
    resolution: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Emit the spiral outside-in instead of inside-out.
    #[arg(long)]
    outside_in: bool,
    #[arg(long)]
    no_trim: bool,
}

impl Common {
    fn params(&self, base: &Params) -> Params {
        let mut p = base.clone();
        if let Some(v) = self.case {
            p.case = v;
        }
        if let Some(v) = self.samples {
            p.n = v;
        }
        if let Some(v) = self.n_hat {
            p.n_hat = v;
        }
        if let Some(v) = self.grading {
            p.p = v;
        }
        if self.spacing.is_some() {
            p.spacing = self.spacing;
        }
        if let Some(v) = self.epsilon {
            p.epsilon = v;
        }
        if self.theta0.is_some() {
            p.theta0 = self.theta0;
        }
        if let Some(v) = self.samples_per_turn {
            p.samples_per_turn = v;
        }
        if self.resolution.is_some() {
            p.resolution = self.resolution;
        }
        if let Some(v) = self.seed {
            p.seed = v;
        }
        if self.outside_in {
            p.reverse = false;
        }
        if self.no_trim {
            p.trim = false;
        }
        p
    }

    fn load(&self) -> Result<(ValidatedDomain, Params, PathBuf)> {
        let doc = InputDocument::load(&self.input)?;
        let params = self.params(&doc.params);
        let domain = cli::validate_spec(&doc, &params)?;
        Ok((domain, params, cli::output_dir(self.out.clone())))
    }
}

fn report_written(files: &[PathBuf]) {
    for f in files {
        println!("{}", f.display());
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Plan { common, formats } => {
            let (domain, params, dir) = common.load()?;
            let out = cli::plan(&domain, &params)?;
            let formats = if formats.is_empty() { cli::ALL_FORMATS.to_vec() } else { formats };
            let files = cli::write_plan(&out, &dir, &formats)?;
            let r = &out.report;
            log::info!(
                "{} case, k = {}, coverage {:.4}, length {:.4}, {:.2} s",
                r.case,
                r.k,
                r.path.coverage_fraction,
                r.path.length,
                r.timings.total
            );
            report_written(&files);
        }
        Command::Map { common } => {
            let (domain, params, dir) = common.load()?;
            let (_, report) = cli::map(&domain, &params)?;
            report_written(&[cli::write_json(&report, &dir, "map.json")?]);
        }
        Command::Mic { common, gap } => {
            let (domain, params, dir) = common.load()?;
            let gap = gap.map(|g| (g[0], g[1]));
            let report = cli::mic(&domain, &params, gap)?;
            report_written(&[cli::write_json(&report, &dir, "mic.json")?]);
        }
        Command::Metrics { common, path } => {
            let (domain, params, dir) = common.load()?;
            let doc: PathDocument = serde_json::from_str(&std::fs::read_to_string(Path::new(&path))?)?;
            let report = cli::rescore(&domain, &params, &doc)?;
            report_written(&[cli::write_json(&report, &dir, "metrics.json")?]);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Cli::parse();
    let level = match args.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(args.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(cli::exit_code(&e) as u8)
        }
    }
}
