use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use featagg::experiments::{
    self, bench, denoise, isometry, percolation, BenchConfig, IsometryConfig, Summary,
};
use featagg::io::{read_labeling, read_volume, write_labeling, write_volume};
use featagg::synth::{smooth_random_field, SmoothFieldSpec, SubjectConditionSpec};
use featagg::{
    build_lattice_topology, CompressionModel, Connectivity, Error, GridShape, ImageStack, KSpec, Method,
    Reduction, ScalingMode, Seed,
};
use ndarray::Array2;

const SCHEMAS: &str = "\
Output schemas (CSV, header row always present):
  labeling:        voxel_index,label
  compress.v1:     cluster,size,s0,...,s<n-1>
  percolation.v1:  method,k,repeats,bin_lo,bin_hi,count,largest_fraction,singleton_count,max_median_ratio
  isometry.v1:     method,k,record,i,j,value   (record = pair|mean|std|iqr|excluded)
  denoise.v1:      k,record,voxel,value        (record = voxel|excluded|min|q1|median|q3|max|mean)
  bench.v1:        method,p,k,seconds

Volume files: \"F32V\", u32 LE header length, JSON header, f32 LE payload (voxel-major).
Cluster counts accept an integer, 'p' or 'p/<d>'.
Exit codes: 0 success, 2 usage or infeasible request, 3 IO or malformed input.";

#[derive(Parser)]
#[command(name = "featagg", version, about = "Feature agglomeration of masked image volumes", after_help = SCHEMAS)]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output path (a directory for `synth`); standard output when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Suppress progress messages on standard error.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate smooth random fields plus white noise (signal, noise and combined volumes).
    Synth(SynthArgs),
    /// Cluster the voxels of a volume into exactly k connected clusters.
    Cluster(ClusterArgs),
    /// Reduce a volume with a labeling, or expand it back to voxel space.
    Compress(CompressArgs),
    /// Cluster size histograms (percolation.v1).
    EvalPercolation(PercolationArgs),
    /// Distance-preservation ratios on held-out samples (isometry.v1).
    EvalIsometry(IsometryArgs),
    /// Signal-to-noise variance ratio before and after compression (denoise.v1).
    EvalDenoise(DenoiseArgs),
    /// Wall-clock timing of clusterers on growing cubes (bench.v1).
    Bench(BenchArgs),
}

#[derive(Args)]
struct ShapeArgs {
    /// Grid dimensions, e.g. 20,20,20 or 64,64.
    #[arg(long, value_delimiter = ',', default_values_t = [20usize, 20, 20])]
    shape: Vec<usize>,
}

#[derive(Args)]
struct SynthArgs {
    #[command(flatten)]
    shape: ShapeArgs,
    #[arg(long, default_value_t = 50)]
    n: usize,
    /// Smoothing kernel FWHM in voxels.
    #[arg(long, default_value_t = 8.0)]
    fwhm: f64,
    /// White noise standard deviation.
    #[arg(long, default_value_t = 1.0)]
    noise: f64,
}

#[derive(Args)]
struct ClusterArgs {
    #[arg(long)]
    input: PathBuf,
    /// fast, rand-single, single, average, complete or ward.
    #[arg(long, default_value = "fast")]
    method: Method,
    #[arg(long, default_value = "p/10")]
    k: KSpec,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Mean,
    Scaled,
}

#[derive(Args)]
struct CompressArgs {
    #[arg(long)]
    input: PathBuf,
    /// Labeling CSV (voxel_index,label).
    #[arg(long)]
    labels: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeArg::Scaled)]
    mode: ModeArg,
    /// Write expand(reduce(x)) as a volume file instead of the reduced CSV.
    #[arg(long)]
    expanded: bool,
}

#[derive(Args)]
struct PercolationArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "fast,single,average,complete,ward,rand-single")]
    methods: Vec<Method>,
    #[arg(long, default_value = "p/10")]
    k: KSpec,
    /// Seeds averaged per method.
    #[arg(long, default_value_t = 1)]
    repeats: usize,
}

#[derive(Args)]
struct IsometryArgs {
    #[arg(long)]
    input: PathBuf,
    /// Clusterers and/or rp (sparse random projection).
    #[arg(long, value_delimiter = ',', default_value = "ward,fast,rp")]
    methods: Vec<Reduction>,
    #[arg(long, value_delimiter = ',', default_value = "p/20,p/10,p/5")]
    k_grid: Vec<KSpec>,
    #[arg(long, default_value_t = 2000)]
    pairs: usize,
    #[arg(long, default_value_t = 0.5)]
    train_frac: f64,
}

#[derive(Args)]
struct DenoiseArgs {
    #[command(flatten)]
    shape: ShapeArgs,
    #[arg(long, default_value_t = 10)]
    subjects: usize,
    #[arg(long, default_value_t = 5)]
    conditions: usize,
    #[arg(long, default_value_t = 8.0)]
    fwhm: f64,
    #[arg(long, default_value_t = 1.0)]
    subject_sigma: f64,
    #[arg(long, value_delimiter = ',', default_value = "p/20,p/10,p/5,p/2")]
    k_grid: Vec<KSpec>,
}

#[derive(Args)]
struct BenchArgs {
    /// Cube edge lengths.
    #[arg(long, value_delimiter = ',', default_values_t = [8usize, 16, 32])]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 25)]
    n: usize,
    /// k = p / k-ratio.
    #[arg(long, default_value_t = 10)]
    k_ratio: usize,
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    #[arg(long, default_value_t = 8.0)]
    fwhm: f64,
    #[arg(long, value_delimiter = ',', default_value = "fast,ward,rp")]
    methods: Vec<Reduction>,
}

struct Ctx {
    seed: Seed,
    out: Option<PathBuf>,
    quiet: bool,
}

impl Ctx {
    fn note(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("{}", msg.as_ref());
        }
    }

    /// Runs `write` against the output file, or standard output.
    fn emit(&self, write: impl FnOnce(&mut dyn Write) -> featagg::Result<()>) -> featagg::Result<()> {
        match &self.out {
            Some(path) => {
                let mut f = io::BufWriter::new(fs::File::create(path)?);
                write(&mut f)?;
                f.flush()?;
                self.note(format!("wrote {}", path.display()));
            }
            None => {
                let stdout = io::stdout();
                let mut lock = stdout.lock();
                write(&mut lock)?;
            }
        }
        Ok(())
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) | Error::Format(_) | Error::Csv(_) | Error::Json(_) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = Ctx {
        seed: Seed(cli.seed),
        out: cli.out,
        quiet: cli.quiet,
    };
    let result = match cli.command {
        Command::Synth(a) => synth(&ctx, a),
        Command::Cluster(a) => cluster(&ctx, a),
        Command::Compress(a) => compress(&ctx, a),
        Command::EvalPercolation(a) => eval_percolation(&ctx, a),
        Command::EvalIsometry(a) => eval_isometry(&ctx, a),
        Command::EvalDenoise(a) => eval_denoise(&ctx, a),
        Command::Bench(a) => run_bench(&ctx, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Error::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn load(path: &Path) -> featagg::Result<ImageStack> {
    read_volume(path).map_err(|e| match e {
        Error::Io(io) => Error::Io(io::Error::new(io.kind(), format!("{}: {io}", path.display()))),
        other => other,
    })
}

fn synth(ctx: &Ctx, a: SynthArgs) -> featagg::Result<()> {
    let spec = SmoothFieldSpec {
        shape: GridShape::new(&a.shape.shape)?,
        n: a.n,
        fwhm: a.fwhm,
        noise_sigma: a.noise,
        seed: ctx.seed,
    };
    let stacks = smooth_random_field(&spec)?;
    let dir = ctx.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir)?;
    let mut files = serde_json::Map::new();
    for (name, stack) in [
        ("signal", &stacks.signal),
        ("noise", &stacks.noise),
        ("combined", &stacks.combined),
    ] {
        let path = dir.join(format!("{name}.f32v"));
        write_volume(&path, stack)?;
        files.insert(
            name.into(),
            serde_json::json!({ "path": path.display().to_string(), "bytes": fs::metadata(&path)?.len() }),
        );
    }
    let summary = serde_json::json!({
        "shape": spec.shape.dims(),
        "p": stacks.combined.n_voxels(),
        "n": spec.n,
        "fwhm": spec.fwhm,
        "noise_sigma": spec.noise_sigma,
        "seed": ctx.seed.0,
        "payload_bytes": stacks.combined.n_voxels() * spec.n * 4,
        "files": files,
    });
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}

fn cluster(ctx: &Ctx, a: ClusterArgs) -> featagg::Result<()> {
    let stack = load(&a.input)?;
    let topology = build_lattice_topology(stack.mask(), Connectivity::Faces);
    let k = a.k.resolve(stack.n_voxels());
    let labeling = a.method.cluster(&stack, &topology, k, ctx.seed)?;
    ctx.note(format!("{}: {} voxels into {} clusters", a.method, stack.n_voxels(), k));
    ctx.emit(|w| write_labeling(w, &labeling))
}

fn compress(ctx: &Ctx, a: CompressArgs) -> featagg::Result<()> {
    let stack = load(&a.input)?;
    let labeling = read_labeling(fs::File::open(&a.labels)?)?;
    let mode = match a.mode {
        ModeArg::Mean => ScalingMode::Mean,
        ModeArg::Scaled => ScalingMode::Scaled,
    };
    let model = CompressionModel::new(labeling, mode);
    let reduced = model.reduce_columns(stack.data())?;
    if a.expanded {
        let path = ctx
            .out
            .as_ref()
            .ok_or_else(|| Error::InvalidData("--expanded needs --out".into()))?;
        let expanded = model.expand_columns(&reduced)?;
        write_volume(path, &ImageStack::new(stack.mask().clone(), expanded)?)?;
        ctx.note(format!("wrote {}", path.display()));
        return Ok(());
    }
    ctx.emit(|w| write_reduced(w, &reduced, model.sizes()))
}

fn write_reduced(out: &mut dyn Write, reduced: &Array2<f64>, sizes: &[usize]) -> featagg::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["cluster".to_string(), "size".to_string()];
    header.extend((0..reduced.ncols()).map(|s| format!("s{s}")));
    w.write_record(&header)?;
    for (c, row) in reduced.rows().into_iter().enumerate() {
        let mut record = vec![c.to_string(), sizes[c].to_string()];
        record.extend(row.iter().map(|v| v.to_string()));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

fn eval_percolation(ctx: &Ctx, a: PercolationArgs) -> featagg::Result<()> {
    let stack = load(&a.input)?;
    let topology = build_lattice_topology(stack.mask(), Connectivity::Faces);
    let k = a.k.resolve(stack.n_voxels());
    let mut reports = Vec::new();
    let mut last_error = None;
    for (method, result) in a
        .methods
        .iter()
        .zip(percolation(&stack, &topology, &a.methods, k, ctx.seed, a.repeats))
    {
        match result {
            Ok(r) => {
                ctx.note(format!(
                    "{method}: largest fraction {:.4}, singletons {}",
                    r.largest_fraction, r.singleton_count
                ));
                reports.push(r);
            }
            Err(e) => {
                eprintln!("{method}: {e}");
                last_error = Some(e);
            }
        }
    }
    if reports.is_empty() {
        return Err(last_error.unwrap_or_else(|| Error::InvalidData("no methods given".into())));
    }
    ctx.emit(|w| experiments::write_percolation_csv(w, &reports))
}

fn resolve_grid(grid: &[KSpec], p: usize) -> Vec<usize> {
    grid.iter().map(|k| k.resolve(p)).collect()
}

fn eval_isometry(ctx: &Ctx, a: IsometryArgs) -> featagg::Result<()> {
    let stack = load(&a.input)?;
    let topology = build_lattice_topology(stack.mask(), Connectivity::Faces);
    let config = IsometryConfig {
        methods: a.methods,
        k_grid: resolve_grid(&a.k_grid, stack.n_voxels()),
        pairs: a.pairs,
        train_frac: a.train_frac,
        seed: ctx.seed,
    };
    let reports = isometry(&stack, &topology, &config)?;
    for r in &reports {
        if let Some(s) = r.summary() {
            ctx.note(format!(
                "{} k={}: mean {:.4}, std {:.4}, iqr {:.4}",
                r.method,
                r.k,
                s.mean,
                s.std,
                s.iqr()
            ));
        }
    }
    ctx.emit(|w| experiments::write_isometry_csv(w, &reports))
}

fn eval_denoise(ctx: &Ctx, a: DenoiseArgs) -> featagg::Result<()> {
    let shape = GridShape::new(&a.shape.shape)?;
    let p = shape.n_cells();
    let spec = SubjectConditionSpec {
        shape,
        subjects: a.subjects,
        conditions: a.conditions,
        fwhm: a.fwhm,
        subject_sigma: a.subject_sigma,
        seed: ctx.seed,
    };
    let reports = denoise(&spec, &resolve_grid(&a.k_grid, p))?;
    for r in &reports {
        let median = r.summary().map(|s: Summary| s.median);
        ctx.note(format!("k={}: median log quotient {median:?}, excluded {}", r.k, r.excluded));
    }
    ctx.emit(|w| experiments::write_denoise_csv(w, &reports))
}

fn run_bench(ctx: &Ctx, a: BenchArgs) -> featagg::Result<()> {
    let rows = bench(&BenchConfig {
        sizes: a.sizes,
        n: a.n,
        k_ratio: a.k_ratio,
        repeats: a.repeats,
        fwhm: a.fwhm,
        methods: a.methods,
        seed: ctx.seed,
    })?;
    for r in &rows {
        ctx.note(format!("{} p={} k={}: {:.5}s", r.method, r.p, r.k, r.seconds));
    }
    ctx.emit(|w| experiments::write_bench_csv(w, &rows))
}
