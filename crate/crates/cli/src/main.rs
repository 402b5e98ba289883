use std::fs;
use std::io::Write;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use dnabrick::cost::{estimate_cost, CostConfig, DEFAULT_RATE_USD_PER_BASE};
use dnabrick::io::{
    export_csv, export_latex, export_project, export_report, import_project, CachedSequences,
    ImportedProject,
};
use dnabrick::{CanvasSpec, ConstraintConfig, Project, ProtectorPolicy, VoxelCoord};

const EXIT_USAGE: u8 = 2;
const EXIT_VALIDATION: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Validation(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Io { .. } => EXIT_IO,
        }
    }
}

impl From<dnabrick::Error> for CliError {
    fn from(e: dnabrick::Error) -> Self {
        match e {
            dnabrick::Error::Io(source) => CliError::Io {
                path: PathBuf::new(),
                source,
            },
            other => CliError::Validation(other.to_string()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "dnabrick",
    version,
    about = "Design DNA-brick nanostructures from a voxel canvas"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Create a project with every voxel selected
    New {
        #[arg(long)]
        width: u32,
        #[arg(long)]
        height: u32,
        /// Depth in base pairs (multiple of 16)
        #[arg(long)]
        depth: u32,
        #[arg(short, long, default_value = "project.3dna")]
        output: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Remove or restore voxels
    Sculpt {
        project: PathBuf,
        /// Voxel to remove, as x,y,k
        #[arg(long, value_name = "X,Y,K", num_args = 1..)]
        remove: Vec<String>,
        /// Inclusive box to remove, as x,y,k:x,y,k
        #[arg(long, value_name = "LO:HI")]
        remove_box: Vec<String>,
        /// File with one x,y,k per line
        #[arg(long)]
        remove_file: Option<PathBuf>,
        /// Voxel to select again, as x,y,k
        #[arg(long, value_name = "X,Y,K", num_args = 1..)]
        restore: Vec<String>,
    },
    /// Change canvas dimensions, keeping the overlapping selection
    Resize {
        project: PathBuf,
        #[arg(long)]
        width: u32,
        #[arg(long)]
        height: u32,
        #[arg(long)]
        depth: u32,
    },
    /// Set sequence generation parameters and strand options
    Generate(GenerateArgs),
    /// Print canvas, brick and nucleotide counts
    Stats {
        project: PathBuf,
        #[command(flatten)]
        rate: RateArg,
    },
    /// Print the 8/7/6 identical-base pair histogram
    Analyze { project: PathBuf },
    /// Print the synthesis cost estimate
    Cost {
        project: PathBuf,
        #[command(flatten)]
        rate: RateArg,
    },
    /// Write sequences or the project in another format
    Export {
        project: PathBuf,
        #[arg(long, value_enum)]
        format: ExportFormat,
        #[arg(short, long)]
        output: PathBuf,
        /// Embed the generated sequences (3dna only)
        #[arg(long)]
        with_sequences: bool,
        #[command(flatten)]
        rate: RateArg,
    },
    /// Run the HTTP API
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
        #[arg(long, env = "DNABRICK_TOKEN")]
        token: Option<String>,
        #[command(flatten)]
        rate: RateArg,
    },
}

#[derive(Debug, Args)]
struct RateArg {
    /// USD per nucleotide
    #[arg(long, env = "DNABRICK_COST_RATE", default_value_t = DEFAULT_RATE_USD_PER_BASE)]
    rate: f64,
}

impl RateArg {
    fn config(&self) -> CostConfig {
        CostConfig {
            rate_usd_per_base: self.rate,
        }
    }
}

#[derive(Debug, Args)]
struct GenerateArgs {
    project: PathBuf,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    gc_min: Option<f64>,
    #[arg(long)]
    gc_max: Option<f64>,
    #[arg(long)]
    max_run: Option<u32>,
    #[arg(long)]
    hamming: Option<u32>,
    #[arg(long)]
    retry_budget: Option<u32>,
    #[arg(long)]
    check_complements: bool,
    /// Merge half bricks into contiguous full bricks (48-nt boundary bricks)
    #[arg(long)]
    boundary_merge: bool,
    #[arg(long, value_enum, default_value_t = Protector::Emit)]
    protector: Protector,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Protector {
    /// Keep 8- and 24-nt fragments
    Emit,
    /// Drop 8-nt fragments and poly-T their exposed partners
    Protect,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ExportFormat {
    Csv,
    Tex,
    #[value(name = "3dna")]
    Dna3,
    Txt,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(command: Command) -> CliResult<()> {
    match command {
        Command::New {
            width,
            height,
            depth,
            output,
            seed,
        } => {
            let spec = CanvasSpec::new(width, height, depth)?;
            let mut project = Project::new(spec)?;
            project.generation.seed = seed;
            save(&output, &project, None)?;
            println!(
                "created {} ({spec}, {} voxels)",
                output.display(),
                spec.voxel_count()
            );
            Ok(())
        }
        Command::Sculpt {
            project: path,
            remove,
            remove_box,
            remove_file,
            restore,
        } => {
            let ImportedProject { mut project, .. } = load(&path)?;
            let mut removals = remove
                .iter()
                .map(|s| parse_voxel(s))
                .collect::<CliResult<Vec<_>>>()?;
            if let Some(file) = remove_file {
                let text = fs::read_to_string(&file).map_err(|source| CliError::Io {
                    path: file.clone(),
                    source,
                })?;
                for line in text
                    .lines()
                    .map(str::trim)
                    .filter(|l| !l.is_empty() && !l.starts_with('#'))
                {
                    removals.push(parse_voxel(line)?);
                }
            }
            let boxes = remove_box
                .iter()
                .map(|s| parse_box(s))
                .collect::<CliResult<Vec<_>>>()?;
            let restores = restore
                .iter()
                .map(|s| parse_voxel(s))
                .collect::<CliResult<Vec<_>>>()?;
            for v in removals {
                project.canvas.set_voxel(v, false)?;
            }
            for (lo, hi) in boxes {
                project.canvas.remove_box(lo, hi)?;
            }
            for v in restores {
                project.canvas.set_voxel(v, true)?;
            }
            save(&path, &project, None)?;
            println!(
                "{}: {} of {} voxels selected",
                path.display(),
                project.canvas.selected_count(),
                project.spec().voxel_count()
            );
            Ok(())
        }
        Command::Resize {
            project: path,
            width,
            height,
            depth,
        } => {
            let ImportedProject { mut project, .. } = load(&path)?;
            let spec = CanvasSpec::new(width, height, depth)?;
            project.canvas = project.canvas.resize(spec)?;
            save(&path, &project, None)?;
            println!("{}: resized to {spec}", path.display());
            Ok(())
        }
        Command::Generate(args) => generate(args),
        Command::Stats { project, rate } => {
            let ImportedProject { project, .. } = load(&project)?;
            print!("{}", stats_report(&project, rate.config())?);
            Ok(())
        }
        Command::Analyze { project } => {
            let ImportedProject { project, .. } = load(&project)?;
            let h = project.histogram()?;
            let assignment = project.assignment()?;
            println!("domains: {}", h.total_domains);
            println!("pairs with 8 identical bases: {}", h.pairs_8);
            println!("pairs with 7 identical bases: {}", h.pairs_7);
            println!("pairs with 6 identical bases: {}", h.pairs_6);
            println!(
                "domains below target distance {}: {}",
                assignment.config.target_hamming,
                assignment.violations.len()
            );
            Ok(())
        }
        Command::Cost { project, rate } => {
            let ImportedProject { project, .. } = load(&project)?;
            let nt = project.plan()?.total_nt() as u64;
            println!("{}", estimate_cost(nt, rate.config())?);
            Ok(())
        }
        Command::Export {
            project: path,
            format,
            output,
            with_sequences,
            rate,
        } => {
            let ImportedProject { project, .. } = load(&path)?;
            let bytes = match format {
                ExportFormat::Csv => export_csv(&project.strands()?),
                ExportFormat::Tex => export_latex(&project.strands()?),
                ExportFormat::Txt => {
                    export_report(&project.summary(rate.config())?, &project.strands()?)
                }
                ExportFormat::Dna3 => {
                    let cache = with_sequences
                        .then(|| project.strands().map(|s| CachedSequences::from_strands(&s)))
                        .transpose()?;
                    export_project(&project, cache.as_ref())
                }
            };
            write_atomic(&output, &bytes)?;
            println!("wrote {}", output.display());
            Ok(())
        }
        Command::Serve {
            port,
            host,
            token,
            rate,
        } => {
            tracing_subscriber::fmt::init();
            let config = dnabrick_service::ServiceConfig {
                bearer_token: token,
                cost: rate.config(),
            };
            let runtime = tokio::runtime::Runtime::new().map_err(|source| CliError::Io {
                path: PathBuf::from("<runtime>"),
                source,
            })?;
            let addr = SocketAddr::new(host, port);
            runtime
                .block_on(dnabrick_service::serve(addr, config))
                .map_err(|source| CliError::Io {
                    path: PathBuf::from(addr.to_string()),
                    source,
                })
        }
    }
}

fn generate(args: GenerateArgs) -> CliResult<()> {
    let ImportedProject { mut project, .. } = load(&args.project)?;
    let defaults = ConstraintConfig::default();
    let constraints = ConstraintConfig {
        gc_min: args.gc_min.unwrap_or(defaults.gc_min),
        gc_max: args.gc_max.unwrap_or(defaults.gc_max),
        max_run: args.max_run.unwrap_or(defaults.max_run),
        target_hamming: args.hamming.unwrap_or(defaults.target_hamming),
        retry_budget: args.retry_budget.unwrap_or(defaults.retry_budget),
        check_complements: args.check_complements,
    };
    project.generation.seed = args.seed;
    project.generation.constraints = constraints;
    project.options.boundary_merge = args.boundary_merge;
    project.options.protector_policy = match args.protector {
        Protector::Emit => ProtectorPolicy::EmitFragments,
        Protector::Protect => ProtectorPolicy::SuppressAndProtect,
    };
    // fail before touching the file if the constraints cannot be met
    let assignment = project.assignment()?;
    save(&args.project, &project, None)?;
    println!(
        "{}: seed {}, {} domains below target distance {}",
        args.project.display(),
        args.seed,
        assignment.violations.len(),
        constraints.target_hamming
    );
    Ok(())
}

fn stats_report(project: &Project, cost: CostConfig) -> CliResult<String> {
    let s = project.summary(cost)?;
    let plan = project.plan()?;
    let (x, y, z) = s.physical_size_nm;
    let b = s.bricks;
    let mut out = String::new();
    out.push_str(&format!("canvas: {}\n", s.canvas));
    out.push_str(&format!("size: {x:.1} nm x {y:.1} nm x {z:.1} nm\n"));
    out.push_str(&format!("voxels: {}\n", s.selected_voxels));
    out.push_str(&format!("domains: {}\n", s.domains));
    out.push_str(&format!(
        "strands: {} (full {}, half {}, boundary {}, fragment {})\n",
        s.strands, b.full, b.half, b.boundary, b.fragment
    ));
    out.push_str(&format!("nucleotides: {}\n", s.total_nt));
    out.push_str(&format!("cost: {}\n", s.cost));
    if !plan.protected_domains.is_empty() {
        out.push_str(&format!(
            "protected domains: {}\n",
            plan.protected_domains.len()
        ));
    }
    if !plan.warnings.is_empty() {
        out.push_str(&format!("warnings: {}\n", plan.warnings.len()));
    }
    Ok(out)
}

fn parse_voxel(s: &str) -> CliResult<VoxelCoord> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [x, y, k] = parts[..] else {
        return Err(CliError::Usage(format!("expected x,y,k but got {s:?}")));
    };
    let num = |p: &str| {
        p.parse::<u32>()
            .map_err(|_| CliError::Usage(format!("bad coordinate {p:?} in {s:?}")))
    };
    Ok(VoxelCoord::new(num(x)?, num(y)?, num(k)?))
}

fn parse_box(s: &str) -> CliResult<(VoxelCoord, VoxelCoord)> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| CliError::Usage(format!("expected x,y,k:x,y,k but got {s:?}")))?;
    Ok((parse_voxel(lo)?, parse_voxel(hi)?))
}

fn load(path: &Path) -> CliResult<ImportedProject> {
    let bytes = fs::read(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    import_project(&bytes).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

fn save(path: &Path, project: &Project, cache: Option<&CachedSequences>) -> CliResult<()> {
    write_atomic(path, &export_project(project, cache))
}

/// Writes via a temporary file in the target directory and renames it over
/// the destination.
fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let io_err = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(bytes).map_err(io_err)?;
    tmp.as_file().sync_all().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}
