use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use polardm::dle::{DecisionRule, EdgeWeightParams};
use polardm::eval::{self, EvalConfig, Timing};
use polardm::io;
use polardm::stokes::{self, Colormap, Scaling};
use polardm::{Angle, ChannelStack, Method, MethodSpec, PfaPattern, Plane};

#[derive(Parser)]
#[command(name = "polardm", version, about = "DoFP polarization demosaicking")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Demosaic one mosaic into four channel planes and optional renders.
    Demosaic(DemosaicArgs),
    /// Sample a four-channel stack into a mosaic.
    Simulate(SimulateArgs),
    /// Render Stokes, DoLP and AoLP products of a four-plane container.
    Stokes(StokesArgs),
    /// Compare a demosaicked stack against ground truth.
    Eval(EvalArgs),
    /// Time demosaicking methods on one mosaic.
    Bench(BenchArgs),
}

#[derive(Args)]
struct PipelineArgs {
    /// Logistic steepness at a dynamic range of 255.
    #[arg(long, env = "POLARDM_K0", default_value_t = 1.0)]
    k0: f64,
    /// `logistic` or `ternary:T`.
    #[arg(long, default_value = "logistic", value_parser = parse_decision)]
    decision: DecisionRule,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

impl PipelineArgs {
    fn spec(&self, method: Method) -> MethodSpec {
        let params = EdgeWeightParams {
            k0: self.k0,
            rule: self.decision,
            ..EdgeWeightParams::default()
        };
        match MethodSpec::default_for(method) {
            MethodSpec::Lepd(_) => MethodSpec::Lepd(params),
            MethodSpec::Leic(_, w) => MethodSpec::Leic(params, w),
            other => other,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Channels,
    Stokes,
    Dolp,
    Aolp,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutFormat {
    Png16,
    Pgm16,
    Raw,
}

#[derive(Args)]
struct DemosaicArgs {
    /// Mosaic file (.pgm, .png, or .json/.raw with sidecar).
    input: PathBuf,
    #[arg(long, default_value = "leic")]
    method: Method,
    /// PFA tile, e.g. "90,45;135,0". Overrides any sidecar pattern.
    #[arg(long, env = "POLARDM_PATTERN")]
    pattern: Option<PfaPattern>,
    /// Override the sample bit depth of the input.
    #[arg(long)]
    bit_depth: Option<u8>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Products to write; repeatable or comma-separated.
    #[arg(long, value_delimiter = ',', default_value = "channels")]
    emit: Vec<Emit>,
    #[arg(long, default_value = "png16")]
    out_format: OutFormat,
    #[command(flatten)]
    pipeline: PipelineArgs,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, requires_all = ["i45", "i90", "i135"], conflicts_with_all = ["stack", "scene_seed"])]
    i0: Option<PathBuf>,
    #[arg(long)]
    i45: Option<PathBuf>,
    #[arg(long)]
    i90: Option<PathBuf>,
    #[arg(long)]
    i135: Option<PathBuf>,
    /// Four-plane container (.json/.raw).
    #[arg(long, conflicts_with = "scene_seed")]
    stack: Option<PathBuf>,
    /// Generate a synthetic scene with this seed instead of reading planes.
    #[arg(long)]
    scene_seed: Option<u64>,
    /// Synthetic scene size, WxH.
    #[arg(long, default_value = "256x256", value_parser = parse_size)]
    scene_size: (usize, usize),
    /// Where to write the synthetic ground-truth container.
    #[arg(long, requires = "scene_seed")]
    gt_out: Option<PathBuf>,
    #[arg(long, env = "POLARDM_PATTERN")]
    pattern: Option<PfaPattern>,
    /// Output bit depth; defaults to the input's.
    #[arg(long)]
    bit_depth: Option<u8>,
    /// Mosaic destination (.pgm, .png, or .json).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct StokesArgs {
    /// Four-plane container.
    input: PathBuf,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "all")]
    emit: Vec<Emit>,
}

#[derive(Args)]
struct EvalArgs {
    /// Ground-truth four-plane container.
    #[arg(long)]
    gt: PathBuf,
    /// Demosaicked four-plane container.
    #[arg(long, conflicts_with = "method", required_unless_present = "method")]
    test: Option<PathBuf>,
    /// Simulate the mosaic from the ground truth and run this method inline.
    #[arg(long)]
    method: Option<Method>,
    #[arg(long, env = "POLARDM_PATTERN")]
    pattern: Option<PfaPattern>,
    /// Score AoLP with the wrap-aware difference.
    #[arg(long)]
    aolp_wrap: bool,
    /// Text report path; a CSV copy is written alongside. Prints to stdout
    /// when omitted.
    #[arg(long)]
    report: Option<PathBuf>,
    #[command(flatten)]
    pipeline: PipelineArgs,
}

#[derive(Args)]
struct BenchArgs {
    input: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "lepd,leic")]
    methods: Vec<Method>,
    #[arg(long, default_value_t = 5)]
    reps: usize,
    #[arg(long, env = "POLARDM_PATTERN")]
    pattern: Option<PfaPattern>,
    #[command(flatten)]
    pipeline: PipelineArgs,
}

fn parse_decision(s: &str) -> std::result::Result<DecisionRule, String> {
    match s.split_once(':') {
        None if s == "logistic" => Ok(DecisionRule::Logistic),
        Some(("ternary", t)) => t
            .parse::<f64>()
            .ok()
            .filter(|t| t.is_finite() && *t >= 0.0)
            .map(|threshold| DecisionRule::Ternary { threshold })
            .ok_or_else(|| format!("invalid ternary threshold {t:?}")),
        _ => Err(format!("expected `logistic` or `ternary:T`, got {s:?}")),
    }
}

fn parse_size(s: &str) -> std::result::Result<(usize, usize), String> {
    let (w, h) = s.split_once('x').ok_or("expected WxH")?;
    let parse = |v: &str| v.parse::<usize>().map_err(|e| e.to_string());
    Ok((parse(w)?, parse(h)?))
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("out")
        .to_string()
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn wants(emit: &[Emit], what: Emit) -> bool {
    emit.contains(&what) || emit.contains(&Emit::All)
}

fn write_renders(stack: &ChannelStack, emit: &[Emit], dir: &Path, base: &str) -> Result<()> {
    let st = stokes::stokes_from_stack(stack);
    let render = |plane: &Plane, map, scaling, name: &str| -> Result<()> {
        let path = dir.join(format!("{base}_{name}.png"));
        io::write_rgb_png(&path, &stokes::render_pseudocolor(plane, map, scaling))?;
        Ok(())
    };
    if wants(emit, Emit::Stokes) {
        render(&st.s0, Colormap::Gray, Scaling::MinMax, "S0")?;
        render(&st.s1, Colormap::Parula, Scaling::MinMax, "S1")?;
        render(&st.s2, Colormap::Parula, Scaling::MinMax, "S2")?;
    }
    if wants(emit, Emit::Dolp) || wants(emit, Emit::Aolp) {
        let view = stokes::dolp_aolp(&st, stokes::DEFAULT_EPS);
        if wants(emit, Emit::Dolp) {
            render(&view.dolp, Colormap::Parula, Scaling::Clamp01, "DoLP")?;
        }
        if wants(emit, Emit::Aolp) {
            render(&view.aolp, Colormap::HsvAngle, Scaling::Clamp01, "AoLP")?;
        }
    }
    Ok(())
}

fn cmd_demosaic(args: DemosaicArgs) -> Result<()> {
    let img = io::read_mosaic(&args.input, args.pattern, args.bit_depth)?;
    let spec = args.pipeline.spec(args.method);
    spec.validate()?;
    let (stack, seconds, threads) = eval::with_threads(args.pipeline.threads, || {
        let t = Instant::now();
        let out = polardm::demosaic(&img, &spec);
        (out, t.elapsed().as_secs_f64(), rayon::current_num_threads())
    })?;
    let stack = stack?;
    ensure_dir(&args.out_dir)?;
    let base = format!("{}_{}", stem(&args.input), args.method);
    let depth = img.bit_depth();
    if wants(&args.emit, Emit::Channels) {
        match args.out_format {
            OutFormat::Raw => {
                io::write_stack(&args.out_dir.join(format!("{base}.json")), &stack, depth)?
            }
            fmt => {
                let ext = if fmt == OutFormat::Png16 {
                    "png"
                } else {
                    "pgm"
                };
                for a in Angle::ALL {
                    let path = args.out_dir.join(format!("{base}_{}.{ext}", a.label()));
                    match fmt {
                        OutFormat::Png16 => io::write_png16(&path, stack.get(a), depth)?,
                        _ => io::write_pgm(&path, stack.get(a), depth)?,
                    }
                }
            }
        }
    }
    write_renders(&stack, &args.emit, &args.out_dir, &base)?;
    println!(
        "demosaic method={} size={}x{} threads={} seconds={:.6}",
        args.method,
        img.width(),
        img.height(),
        threads,
        seconds
    );
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> Result<()> {
    let (stack, depth) = if let Some(seed) = args.scene_seed {
        let (width, height) = args.scene_size;
        let params = eval::SceneParams {
            width,
            height,
            ..eval::SceneParams::default()
        };
        let gt = eval::synthetic_scene(seed, &params);
        if let Some(path) = &args.gt_out {
            io::write_stack(path, &gt, 8)?;
        }
        (gt, 8)
    } else if let Some(path) = &args.stack {
        io::read_stack(path)?
    } else if let (Some(a), Some(b), Some(c), Some(d)) =
        (&args.i0, &args.i45, &args.i90, &args.i135)
    {
        let mut depth = 0;
        let mut planes = Vec::with_capacity(4);
        for p in [a, b, c, d] {
            let m = io::read_mosaic(p, None, None)
                .with_context(|| format!("reading {}", p.display()))?;
            depth = depth.max(m.bit_depth());
            planes.push(m.plane().clone());
        }
        let planes: [Plane; 4] = planes.try_into().expect("four planes");
        (ChannelStack::new(planes)?, depth)
    } else {
        bail!("provide --i0/--i45/--i90/--i135, --stack, or --scene-seed");
    };
    let depth = args.bit_depth.unwrap_or(depth);
    let mosaic = eval::mosaic_from_stack(&stack, args.pattern.unwrap_or_default(), depth)?;
    io::write_mosaic(&args.out, &mosaic)?;
    Ok(())
}

fn cmd_stokes(args: StokesArgs) -> Result<()> {
    let (stack, _) = io::read_stack(&args.input)?;
    ensure_dir(&args.out_dir)?;
    write_renders(&stack, &args.emit, &args.out_dir, &stem(&args.input))
}

fn cmd_eval(args: EvalArgs) -> Result<()> {
    let (gt, depth) = io::read_stack(&args.gt).context("reading ground truth")?;
    let (out, timing, name) = match (&args.test, args.method) {
        (Some(path), _) => {
            let (out, _) = io::read_stack(path).context("reading test stack")?;
            (out, None, stem(path))
        }
        (None, Some(method)) => {
            let mosaic = eval::mosaic_from_stack(&gt, args.pattern.unwrap_or_default(), depth)?;
            let spec = args.pipeline.spec(method);
            spec.validate()?;
            let (out, seconds, threads) = eval::with_threads(args.pipeline.threads, || {
                let t = Instant::now();
                let out = polardm::demosaic(&mosaic, &spec);
                (out, t.elapsed().as_secs_f64(), rayon::current_num_threads())
            })?;
            (out?, Some(Timing { seconds, threads }), method.to_string())
        }
        (None, None) => bail!("provide --test or --method"),
    };
    let config = EvalConfig {
        bit_depth: depth,
        aolp_wrap: args.aolp_wrap,
        ..EvalConfig::default()
    };
    let mut report = eval::evaluate(&gt, &out, &config)?;
    report.method = name;
    report.timing = timing;
    match &args.report {
        Some(path) => {
            let csv = path.with_extension("csv");
            if csv == *path {
                bail!("report path must not end in .csv; the CSV copy goes next to it");
            }
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                ensure_dir(dir)?;
            }
            std::fs::write(path, report.to_text())
                .with_context(|| format!("writing {}", path.display()))?;
            std::fs::write(&csv, report.to_csv())
                .with_context(|| format!("writing {}", csv.display()))?;
        }
        None => print!("{}", report.to_text()),
    }
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<()> {
    let img = io::read_mosaic(&args.input, args.pattern, None)?;
    println!("method,width,height,threads,reps,median_s");
    for &method in &args.methods {
        let r = eval::bench(
            &img,
            &args.pipeline.spec(method),
            args.reps,
            args.pipeline.threads,
        )?;
        println!(
            "{},{},{},{},{},{:.6}",
            r.method,
            r.width,
            r.height,
            r.threads,
            r.timings.len(),
            r.median_seconds
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Demosaic(a) => cmd_demosaic(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Stokes(a) => cmd_stokes(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
