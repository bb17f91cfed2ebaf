//! xrt: X-ray transform of pixel and voxel images from the command line.
//!
//! Subcommands: `row` prints one intersection row, `project` /
//! `backproject` / `matrix` run the linear operator against files,
//! `gen-rays` writes standard acquisition configs, `selftest` re-verifies
//! the build, `bench` measures per-row cost and work counts.
//!
//! Exit codes: 0 success, 1 validation (bad flags, config text, shape
//! mismatches), 2 file and format errors, 3 selftest failure.

use std::fmt::Write as _;
use std::fs::File;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use xrt_core::error::Error;
use xrt_core::format::sig_digits;
use xrt_core::geometry::BeamSpec;
use xrt_core::grid::ImageGrid;
use xrt_core::io::{
    format_rayset, parse_grid_fields, parse_ray_line, parse_rayset, read_dense, write_dense,
    write_matrix, DenseData, ANGLE_KEYS,
};
use xrt_core::projector::{compute_row, Image, RaySet};
use xrt_core::selftest::{
    random_ray_2d, random_ray_3d, run_golden_suites, run_oracle_sweep,
};
use xrt_core::tally::CountTally;

#[derive(Parser)]
#[command(
    name = "xrt",
    version,
    about = "X-ray transform (line integrals) of pixel and voxel images",
    after_help = "Exit codes: 0 success, 1 validation error, 2 IO error, 3 selftest failure."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the intersection row of a single ray
    Row(RowArgs),
    /// Forward-project an image file into a sinogram file
    Project(ProjectArgs),
    /// Apply the adjoint: accumulate a sinogram file into an image file
    Backproject(BackprojectArgs),
    /// Assemble the sparse projection matrix and write it to a file
    Matrix(MatrixArgs),
    /// Write a ray-set config for a standard acquisition
    GenRays(GenRaysArgs),
    /// Re-verify the build: golden rows plus a randomized oracle sweep
    Selftest,
    /// Measure per-row time and examined candidates across grid sizes
    Bench(BenchArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum IndexForm {
    /// One flat index per line (row-major, x fastest)
    Flat,
    /// Grid coordinates per line: `j i` in 2D, `k j i` in 3D
    Nd,
}

#[derive(Args)]
struct RowArgs {
    /// Ray-set config file holding exactly one ray
    #[arg(long, conflicts_with_all = ["grid", "ray"])]
    config: Option<PathBuf>,
    /// Inline grid description, e.g. "nx=3 ny=3" (with --ray)
    #[arg(long, requires = "ray")]
    grid: Option<String>,
    /// Inline ray line, e.g. "parallel2d s=1 phi=0.785398" (with --grid)
    #[arg(long, requires = "grid")]
    ray: Option<String>,
    /// How to print the box index column
    #[arg(long, value_enum, default_value_t = IndexForm::Flat)]
    index_form: IndexForm,
    /// Print full double precision instead of 6 significant digits
    #[arg(long)]
    full_precision: bool,
    /// Treat angle-valued fields of the inline --ray line as degrees
    #[arg(long)]
    degrees: bool,
}

#[derive(Args)]
struct ProjectArgs {
    /// Ray-set config file
    #[arg(long)]
    config: PathBuf,
    /// Input image (XRTDENSE; shape must match the config grid)
    #[arg(long)]
    image: PathBuf,
    /// Output sinogram (XRTDENSE vector, one value per ray)
    #[arg(long)]
    out: PathBuf,
    /// Cap the worker count (results are identical for any value)
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct BackprojectArgs {
    /// Ray-set config file
    #[arg(long)]
    config: PathBuf,
    /// Input sinogram (XRTDENSE vector, one value per ray)
    #[arg(long)]
    sino: PathBuf,
    /// Output image (XRTDENSE, shaped like the config grid)
    #[arg(long)]
    out: PathBuf,
    /// Cap the worker count (results are identical for any value)
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct MatrixArgs {
    /// Ray-set config file
    #[arg(long)]
    config: PathBuf,
    /// Output sparse matrix (XRTSPMAT)
    #[arg(long)]
    out: PathBuf,
    /// Cap the worker count (results are identical for any value)
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GeometryTag {
    #[value(name = "parallel2d")]
    Parallel2d,
    #[value(name = "fan_equiangular")]
    FanEquiangular,
    #[value(name = "fan_equispaced")]
    FanEquispaced,
    #[value(name = "parallel3d")]
    Parallel3d,
    #[value(name = "cone_equiangular")]
    ConeEquiangular,
    #[value(name = "cone_equispaced")]
    ConeEquispaced,
    #[value(name = "helical_equiangular")]
    HelicalEquiangular,
    #[value(name = "helical_equispaced")]
    HelicalEquispaced,
}

/// View angles cover a half turn (parallel) or full turn (divergent),
/// half-open so no view repeats; detector samples are endpoint-inclusive
/// over the declared range, with a single sample landing at 0.
#[derive(Args)]
struct GenRaysArgs {
    /// Acquisition geometry
    #[arg(long, value_enum)]
    geometry: GeometryTag,
    /// Number of views (source positions / view angles)
    #[arg(long)]
    views: usize,
    /// Detector samples along the first detector axis
    #[arg(long)]
    dets: usize,
    /// Detector samples along the second detector axis (3D geometries)
    #[arg(long, default_value_t = 1)]
    dets2: usize,
    /// Grid description, e.g. "nx=64 ny=64" or "nx=32 ny=32 nz=32"
    #[arg(long)]
    grid: String,
    /// Output config path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Half-range of the parallel detector offset s (or s1 in 3D)
    #[arg(long)]
    s_max: Option<f64>,
    /// Source-to-origin distance D for divergent geometries
    #[arg(long)]
    source_distance: Option<f64>,
    /// Half-range of the fan angle (fan_equiangular)
    #[arg(long)]
    gamma_max: Option<f64>,
    /// Half-range of the flat-detector offset t (equispaced geometries)
    #[arg(long)]
    t_max: Option<f64>,
    /// Half-range of the in-plane cone angle (cone/helical equiangular)
    #[arg(long)]
    alpha_max: Option<f64>,
    /// Half-range of the axial cone angle (cone/helical equiangular)
    #[arg(long)]
    beta_max: Option<f64>,
    /// Half-range of the axial detector offset (parallel3d s2, equispaced h)
    #[arg(long)]
    h_max: Option<f64>,
    /// Fixed tilt angle phi2 for parallel3d views
    #[arg(long, default_value_t = 0.0)]
    phi2: f64,
    /// Axial source advance per full turn; view v gets H = pitch * v / views
    #[arg(long)]
    pitch: Option<f64>,
}

#[derive(Args)]
struct BenchArgs {
    /// Grid dimensionality to benchmark
    #[arg(long, default_value_t = 2)]
    dim: u32,
    /// Comma-separated grid side lengths (defaults: 64,128,256 or 16,32,64)
    #[arg(long)]
    sizes: Option<String>,
    /// Rays sampled per grid size
    #[arg(long, default_value_t = 200)]
    rays: usize,
    /// Seed of the sampled rays
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

/// A failed command: what to print and which exit code it maps to.
enum Failure {
    Validation(String),
    Io(String),
    Selftest(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 1,
            Failure::Io(_) => 2,
            Failure::Selftest(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Validation(m) | Failure::Io(m) | Failure::Selftest(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        match err {
            Error::Io(_) | Error::Format { .. } => Failure::Io(err.to_string()),
            other => Failure::Validation(other.to_string()),
        }
    }
}

fn validation(msg: impl Into<String>) -> Failure {
    Failure::Validation(msg.into())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Row(args) => cmd_row(args),
        Command::Project(args) => cmd_project(args),
        Command::Backproject(args) => cmd_backproject(args),
        Command::Matrix(args) => cmd_matrix(args),
        Command::GenRays(args) => cmd_gen_rays(args),
        Command::Selftest => cmd_selftest(),
        Command::Bench(args) => cmd_bench(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("xrt: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn open_reader(path: &Path) -> Result<File, Failure> {
    File::open(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn create_writer(path: &Path) -> Result<File, Failure> {
    File::create(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn load_rayset(path: &Path) -> Result<RaySet, Failure> {
    Ok(parse_rayset(&read_text(path)?)?)
}

/// Runs `f` on a dedicated pool of `threads` workers; on the caller's pool
/// when no cap is given.
fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, Failure> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(validation("--threads must be at least 1")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| validation(format!("cannot build a {n}-worker pool: {e}"))),
    }
}

/// Re-renders an inline ray line with angle-valued fields converted from
/// degrees to radians.
fn ray_line_degrees_to_radians(line: &str) -> Result<String, Failure> {
    let mut out = Vec::new();
    for token in line.split_whitespace() {
        match token.split_once('=') {
            Some((key, value)) if ANGLE_KEYS.contains(&key) => {
                let degrees: f64 = value.parse().map_err(|_| {
                    validation(format!("key `{key}`: `{value}` is not a number"))
                })?;
                out.push(format!("{key}={:?}", degrees.to_radians()));
            }
            _ => out.push(token.to_string()),
        }
    }
    Ok(out.join(" "))
}

fn cmd_row(args: RowArgs) -> Result<(), Failure> {
    let rays = match (&args.config, &args.grid, &args.ray) {
        (Some(path), None, None) => {
            if args.degrees {
                return Err(validation(
                    "--degrees only applies to the inline --ray line; config files are radians",
                ));
            }
            let rays = load_rayset(path)?;
            if rays.len() != 1 {
                return Err(validation(format!(
                    "{}: row needs exactly one ray, found {}",
                    path.display(),
                    rays.len()
                )));
            }
            rays
        }
        (None, Some(grid), Some(ray)) => {
            let grid = parse_grid_fields(grid)?;
            let line =
                if args.degrees { ray_line_degrees_to_radians(ray)? } else { ray.clone() };
            let spec = parse_ray_line(&line)?;
            RaySet::new(grid, vec![spec])?
        }
        _ => return Err(validation("provide either --config PATH or --grid BODY --ray LINE")),
    };

    let grid = rays.grid();
    let row = compute_row(&rays.specs()[0], grid)?;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for rec in row.records() {
        let length = if args.full_precision {
            format!("{:?}", rec.length)
        } else {
            sig_digits(rec.length, 6)
        };
        let line = match args.index_form {
            IndexForm::Flat => format!("{} {length}", rec.index),
            IndexForm::Nd => match grid.nz() {
                None => {
                    let idx = grid.unflat_index_2d(rec.index)?;
                    format!("{} {} {length}", idx.j, idx.i)
                }
                Some(_) => {
                    let idx = grid.unflat_index_3d(rec.index)?;
                    format!("{} {} {} {length}", idx.k, idx.j, idx.i)
                }
            },
        };
        writeln!(out, "{line}").map_err(|e| Failure::Io(e.to_string()))?;
    }
    Ok(())
}

/// Accepts a dense file as the image for `grid`: either a bare vector of
/// matching length or a shaped image with matching extents.
fn image_from_dense(data: DenseData, grid: &ImageGrid) -> Result<Image, Failure> {
    let shape_err = |got: &str| {
        validation(format!(
            "image shape {got} does not match the config grid ({}x{}{})",
            grid.nx(),
            grid.ny(),
            grid.nz().map(|nz| format!("x{nz}")).unwrap_or_default()
        ))
    };
    let values = match data {
        DenseData::Vector(values) => values,
        DenseData::Image2D { nx, ny, data } => {
            if grid.nz().is_some() || (nx, ny) != (grid.nx(), grid.ny()) {
                return Err(shape_err(&format!("{nx}x{ny}")));
            }
            data
        }
        DenseData::Image3D { nx, ny, nz, data } => {
            if grid.nz() != Some(nz) || (nx, ny) != (grid.nx(), grid.ny()) {
                return Err(shape_err(&format!("{nx}x{ny}x{nz}")));
            }
            data
        }
    };
    if values.len() != grid.unit_count() {
        return Err(shape_err(&format!("{} values", values.len())));
    }
    Ok(Image::new(grid.clone(), values)?)
}

fn cmd_project(args: ProjectArgs) -> Result<(), Failure> {
    let rays = load_rayset(&args.config)?;
    let data = read_dense(&mut open_reader(&args.image)?)?;
    let image = image_from_dense(data, rays.grid())?;
    let sino = with_pool(args.threads, || rays.forward_project(&image))??;
    write_dense(&mut create_writer(&args.out)?, &DenseData::Vector(sino))?;
    Ok(())
}

fn cmd_backproject(args: BackprojectArgs) -> Result<(), Failure> {
    let rays = load_rayset(&args.config)?;
    let sino = match read_dense(&mut open_reader(&args.sino)?)? {
        DenseData::Vector(values) => values,
        other => {
            return Err(validation(format!(
                "sinogram must be a vector, found a {} image",
                match other {
                    DenseData::Image2D { .. } => "2D",
                    _ => "3D",
                }
            )))
        }
    };
    if sino.len() != rays.len() {
        return Err(validation(format!(
            "sinogram holds {} values but the config lists {} rays",
            sino.len(),
            rays.len()
        )));
    }
    let image = with_pool(args.threads, || rays.back_project(&sino))??;
    let grid = rays.grid();
    let shaped = match grid.nz() {
        None => DenseData::Image2D { nx: grid.nx(), ny: grid.ny(), data: image.into_data() },
        Some(nz) => {
            DenseData::Image3D { nx: grid.nx(), ny: grid.ny(), nz, data: image.into_data() }
        }
    };
    write_dense(&mut create_writer(&args.out)?, &shaped)?;
    Ok(())
}

fn cmd_matrix(args: MatrixArgs) -> Result<(), Failure> {
    let rays = load_rayset(&args.config)?;
    let matrix = with_pool(args.threads, || rays.assemble_matrix())??;
    write_matrix(&mut create_writer(&args.out)?, &matrix)?;
    Ok(())
}

/// Endpoint-inclusive symmetric samples: m of count over [-max, max],
/// exact at the endpoints and at 0 for odd counts; a single sample is 0.
fn detector_offset(m: usize, count: usize, max: f64) -> f64 {
    if count == 1 {
        0.0
    } else {
        (2 * m as i64 - (count - 1) as i64) as f64 / (count - 1) as f64 * max
    }
}

fn cmd_gen_rays(args: GenRaysArgs) -> Result<(), Failure> {
    if args.views == 0 || args.dets == 0 || args.dets2 == 0 {
        return Err(validation("--views, --dets, and --dets2 must be at least 1"));
    }
    let grid = parse_grid_fields(&args.grid)?;
    let need = |flag: Option<f64>, name: &str| {
        flag.ok_or_else(|| {
            validation(format!("this geometry needs --{name}"))
        })
    };

    use std::f64::consts::{PI, TAU};
    let v_count = args.views as f64;
    let parallel_view = |v: usize| v as f64 * PI / v_count;
    let divergent_view = |v: usize| v as f64 * TAU / v_count;
    let pitch_offset = |v: usize, pitch: Option<f64>| {
        pitch.map(|p| p * v as f64 / v_count).unwrap_or(0.0)
    };

    let mut specs = Vec::with_capacity(args.views * args.dets * args.dets2);
    for v in 0..args.views {
        for m1 in 0..args.dets {
            for m2 in 0..args.dets2 {
                let spec = match args.geometry {
                    GeometryTag::Parallel2d => {
                        let s_max = need(args.s_max, "s-max")?;
                        BeamSpec::Parallel2D {
                            s: detector_offset(m1, args.dets, s_max),
                            phi: parallel_view(v),
                        }
                    }
                    GeometryTag::FanEquiangular => {
                        let d = need(args.source_distance, "source-distance")?;
                        let gamma_max = need(args.gamma_max, "gamma-max")?;
                        BeamSpec::FanEquiangular {
                            d,
                            alpha: divergent_view(v),
                            gamma: detector_offset(m1, args.dets, gamma_max),
                            gamma_max: Some(gamma_max),
                        }
                    }
                    GeometryTag::FanEquispaced => {
                        let d = need(args.source_distance, "source-distance")?;
                        let t_max = need(args.t_max, "t-max")?;
                        BeamSpec::FanEquispaced {
                            d,
                            alpha: divergent_view(v),
                            t: detector_offset(m1, args.dets, t_max),
                            t_max: Some(t_max),
                        }
                    }
                    GeometryTag::Parallel3d => {
                        let s_max = need(args.s_max, "s-max")?;
                        let h_max = need(args.h_max, "h-max")?;
                        BeamSpec::Parallel3D {
                            s1: detector_offset(m1, args.dets, s_max),
                            s2: detector_offset(m2, args.dets2, h_max),
                            phi1: parallel_view(v),
                            phi2: args.phi2,
                        }
                    }
                    GeometryTag::ConeEquiangular | GeometryTag::HelicalEquiangular => {
                        let d = need(args.source_distance, "source-distance")?;
                        let alpha_max = need(args.alpha_max, "alpha-max")?;
                        let beta_max = need(args.beta_max, "beta-max")?;
                        let alpha = detector_offset(m1, args.dets, alpha_max);
                        let beta = detector_offset(m2, args.dets2, beta_max);
                        let phi1p = divergent_view(v);
                        if args.geometry == GeometryTag::ConeEquiangular {
                            BeamSpec::ConeEquiangular { d, phi1p, alpha, beta }
                        } else {
                            BeamSpec::HelicalEquiangular {
                                d,
                                phi1p,
                                alpha,
                                beta,
                                h_offset: pitch_offset(v, args.pitch),
                            }
                        }
                    }
                    GeometryTag::ConeEquispaced | GeometryTag::HelicalEquispaced => {
                        let d = need(args.source_distance, "source-distance")?;
                        let t_max = need(args.t_max, "t-max")?;
                        let h_max = need(args.h_max, "h-max")?;
                        let t = detector_offset(m1, args.dets, t_max);
                        let h = detector_offset(m2, args.dets2, h_max);
                        let phi1p = divergent_view(v);
                        if args.geometry == GeometryTag::ConeEquispaced {
                            BeamSpec::ConeEquispaced { d, phi1p, t, h }
                        } else {
                            BeamSpec::HelicalEquispaced {
                                d,
                                phi1p,
                                t,
                                h,
                                h_offset: pitch_offset(v, args.pitch),
                            }
                        }
                    }
                };
                specs.push(spec);
            }
        }
    }

    let dim_wanted = specs[0].dim();
    if dim_wanted != grid.dim() {
        return Err(validation(format!(
            "{dim_wanted}D geometry against a {}D grid",
            grid.dim()
        )));
    }
    let text = format_rayset(&RaySet::new(grid, specs)?);
    match &args.out {
        None => print!("{text}"),
        Some(path) => create_writer(path)?
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?,
    }
    Ok(())
}

fn cmd_selftest() -> Result<(), Failure> {
    let suites = run_golden_suites().map_err(Failure::Selftest)?;
    run_oracle_sweep(7, 200, &[1, 2, 3, 5, 8, 17], &[1, 2, 3, 4, 8])
        .map_err(Failure::Selftest)?;
    println!("{suites}/5 golden suites, oracle sweep OK");
    Ok(())
}

fn parse_sizes(arg: &Option<String>, default: &[usize]) -> Result<Vec<usize>, Failure> {
    match arg {
        None => Ok(default.to_vec()),
        Some(list) => list
            .split(',')
            .map(|part| {
                part.trim()
                    .parse::<usize>()
                    .ok()
                    .filter(|&n| n >= 1)
                    .ok_or_else(|| validation(format!("--sizes: `{part}` is not a grid size")))
            })
            .collect(),
    }
}

fn median_ns(mut samples: Vec<u128>) -> u128 {
    samples.sort_unstable();
    samples[samples.len() / 2]
}

fn cmd_bench(args: BenchArgs) -> Result<(), Failure> {
    if args.rays == 0 {
        return Err(validation("--rays must be at least 1"));
    }
    let sizes = match args.dim {
        2 => parse_sizes(&args.sizes, &[64, 128, 256])?,
        3 => parse_sizes(&args.sizes, &[16, 32, 64])?,
        d => return Err(validation(format!("--dim must be 2 or 3, got {d}"))),
    };

    println!(
        "dim {}, {} rays per size, seed {}",
        args.dim, args.rays, args.seed
    );
    println!(
        "{:>6} {:>15} {:>17} {:>12} {:>15}",
        "N", "median ns/row", "mean candidates", "boxes", "oracle ns/row"
    );

    let mut report = String::new();
    for &n in &sizes {
        let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
        let mut times = Vec::with_capacity(args.rays);
        let mut candidates = 0usize;
        let oracle_samples = args.rays.min(8);
        let mut oracle_times = Vec::with_capacity(oracle_samples);

        if args.dim == 2 {
            let rays: Vec<_> = (0..args.rays).map(|_| random_ray_2d(&mut rng, n)).collect();
            for ray in &rays {
                let start = Instant::now();
                let row = xrt_core::intersect2d::intersection_row_2d(ray, n, n);
                times.push(start.elapsed().as_nanos());
                std::hint::black_box(row);
                let mut tally = CountTally::default();
                xrt_core::intersect2d::intersection_row_2d_counted(ray, n, n, &mut tally);
                candidates += tally.candidates;
            }
            for ray in rays.iter().take(oracle_samples) {
                let start = Instant::now();
                std::hint::black_box(xrt_core::oracle::oracle_row_2d(ray, n, n));
                oracle_times.push(start.elapsed().as_nanos());
            }
        } else {
            let rays: Vec<_> = (0..args.rays).map(|_| random_ray_3d(&mut rng, n)).collect();
            for ray in &rays {
                let start = Instant::now();
                let row = xrt_core::intersect3d::intersection_row_3d(ray, n, n, n);
                times.push(start.elapsed().as_nanos());
                std::hint::black_box(row);
                let mut tally = CountTally::default();
                xrt_core::intersect3d::intersection_row_3d_counted(ray, n, n, n, &mut tally);
                candidates += tally.candidates;
            }
            for ray in rays.iter().take(oracle_samples) {
                let start = Instant::now();
                std::hint::black_box(xrt_core::oracle::oracle_row_3d(ray, n, n, n));
                oracle_times.push(start.elapsed().as_nanos());
            }
        }

        let boxes = if args.dim == 2 { n * n } else { n * n * n };
        let _ = writeln!(
            report,
            "{:>6} {:>15} {:>17.1} {:>12} {:>15}",
            n,
            median_ns(times),
            candidates as f64 / args.rays as f64,
            boxes,
            median_ns(oracle_times)
        );
    }
    print!("{report}");

    // parallel scaling on the largest size: rows/sec at 1, 2, 4 workers
    let n = *sizes.last().unwrap();
    let count = args.rays.max(512);
    print!("parallel scaling at N={n} ({count} rows):");
    for workers in [1usize, 2, 4] {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| validation(format!("cannot build a {workers}-worker pool: {e}")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(args.seed ^ 0x9e3779b9);
        let elapsed = if args.dim == 2 {
            let rays: Vec<_> = (0..count).map(|_| random_ray_2d(&mut rng, n)).collect();
            let start = Instant::now();
            pool.install(|| {
                rays.par_iter()
                    .map(|ray| xrt_core::intersect2d::intersection_row_2d(ray, n, n).len())
                    .sum::<usize>()
            });
            start.elapsed()
        } else {
            let rays: Vec<_> = (0..count).map(|_| random_ray_3d(&mut rng, n)).collect();
            let start = Instant::now();
            pool.install(|| {
                rays.par_iter()
                    .map(|ray| xrt_core::intersect3d::intersection_row_3d(ray, n, n, n).len())
                    .sum::<usize>()
            });
            start.elapsed()
        };
        let rate = count as f64 / elapsed.as_secs_f64();
        print!(" {workers} worker{}: {rate:.0} rows/s;", if workers == 1 { "" } else { "s" });
    }
    println!();
    Ok(())
}
