use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use squash_core::conditions::{feasible_region_3d, RegionRow};
use squash_core::io;
use squash_core::report::{reconstruct, report_schema, verify, Checks, RunConfig, RunMode};
use squash_core::{sample_manifold, AnalyticManifold, Error, Execution, PointCloud, SampleSpec, SimplicialComplex};

/// Surface reconstruction from point samples by vertical collapses.
#[derive(Parser)]
#[command(name = "squash", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample an analytic surface to an XYZ or PLY cloud.
    Sample(SampleArgs),
    /// Squash the alpha-complex of a cloud into a mesh, with trace and report.
    Reconstruct(ReconstructArgs),
    /// Write a verification report for a cloud and optional mesh.
    Verify(VerifyArgs),
    /// Write the feasible (eps/R, alpha/R) region as CSV.
    Region(RegionArgs),
    /// Print the JSON schema of the verification report.
    Schema {
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct Lengths {
    /// Analytic surface, e.g. "sphere r=1" or "torus R=3 r=1".
    #[arg(long)]
    surface: Option<String>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    eps_ratio: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    delta_ratio: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    alpha_ratio: Option<f64>,
    /// Reach used for ratios and conditions, overriding the surface's.
    #[arg(long)]
    reach: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Run every loop on the calling thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    lengths: Lengths,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Naive,
    Practical,
    Noncrossing,
    Restricted,
}

impl From<ModeArg> for RunMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Naive => RunMode::Naive,
            ModeArg::Practical => RunMode::Practical,
            ModeArg::Noncrossing => RunMode::NonCrossing,
            ModeArg::Restricted => RunMode::Restricted,
        }
    }
}

#[derive(Args, Clone)]
struct CheckArgs {
    /// Also check vertical convexity of the alpha-complex.
    #[arg(long)]
    convexity: bool,
    #[arg(long)]
    no_conditions: bool,
    #[arg(long)]
    no_restricted: bool,
    #[arg(long)]
    no_structure: bool,
    #[arg(long, default_value_t = 4)]
    angle_resolution: usize,
}

impl CheckArgs {
    fn checks(&self) -> Checks {
        Checks {
            conditions: !self.no_conditions,
            restricted: !self.no_restricted,
            dual_graph: !self.no_structure,
            skins: !self.no_structure,
            vertical_convexity: self.convexity,
            angle_resolution: self.angle_resolution,
            ..Checks::default()
        }
    }
}

#[derive(Args)]
struct ReconstructArgs {
    #[command(flatten)]
    lengths: Lengths,
    #[command(flatten)]
    check: CheckArgs,
    #[arg(long, value_enum, default_value = "naive")]
    mode: ModeArg,
    /// Input cloud (.xyz or .ply).
    #[arg(short, long)]
    input: PathBuf,
    /// Output mesh (.off, .ply, or .edges for curves).
    #[arg(short, long)]
    output: PathBuf,
    /// Defaults to the output path with extension .trace.jsonl.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Defaults to the output path with extension .report.json.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Write the dual graph of the alpha-complex as DOT.
    #[arg(long)]
    dump_dual: Option<PathBuf>,
    /// Append the maximal simplices every N collapses to <output>.snapshots.jsonl.
    #[arg(long)]
    snapshot_every: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    lengths: Lengths,
    #[command(flatten)]
    check: CheckArgs,
    #[arg(short, long)]
    input: PathBuf,
    /// Mesh over the same points to certify.
    #[arg(long)]
    mesh: Option<PathBuf>,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum RegionMode {
    Naive,
    Practical,
    Both,
}

#[derive(Args)]
struct RegionArgs {
    #[arg(long, value_enum, default_value = "both")]
    mode: RegionMode,
    #[arg(long, default_value_t = 400)]
    grid: usize,
    /// Largest eps/R and alpha/R on the grid.
    #[arg(long, default_value_t = 0.6)]
    extent: f64,
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long)]
    sequential: bool,
}

enum Failure {
    Input(String),
    Gate,
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_)
            | Error::Io(_)
            | Error::InfeasibleSpec(_)
            | Error::TooFewPoints { .. }
            | Error::AllCoplanar
            | Error::DuplicatePoint(_)
            | Error::NonFinite(_) => Failure::Input(e.to_string()),
            _ => Failure::Internal(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn exec(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn config(command: &str, mode: RunMode, l: &Lengths) -> RunConfig {
    let mut c = RunConfig::new(command, mode);
    c.surface = l.surface.clone();
    c.epsilon = l.eps;
    c.epsilon_ratio = l.eps_ratio;
    c.delta = l.delta;
    c.delta_ratio = l.delta_ratio;
    c.alpha = l.alpha;
    c.alpha_ratio = l.alpha_ratio;
    c.reach = l.reach;
    c.seed = l.seed;
    c.execution = exec(l.sequential);
    c
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path).map(BufWriter::new).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn open(path: &Path) -> Result<BufReader<File>, Failure> {
    File::open(path).map(BufReader::new).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn ext(path: &Path) -> String {
    path.extension().and_then(|e| e.to_str()).unwrap_or("").to_ascii_lowercase()
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    path.with_file_name(format!("{stem}{suffix}"))
}

fn read_cloud(path: &Path) -> Result<PointCloud, Failure> {
    let r = open(path)?;
    Ok(match ext(path).as_str() {
        "ply" => io::read_ply_cloud(r)?,
        _ => io::read_xyz(r)?,
    })
}

fn read_mesh(path: &Path) -> Result<SimplicialComplex, Failure> {
    let r = open(path)?;
    Ok(match ext(path).as_str() {
        "ply" => io::read_ply_mesh(r)?,
        "edges" | "txt" => io::read_edge_list(r)?,
        _ => io::read_off(r)?,
    })
}

fn write_mesh(path: &Path, k: &SimplicialComplex) -> Outcome {
    let mut w = create(path)?;
    match ext(path).as_str() {
        "ply" => io::write_ply_mesh(&mut w, k)?,
        "edges" | "txt" => io::write_edge_list(&mut w, k)?,
        _ => io::write_off(&mut w, k)?,
    }
    w.flush()?;
    Ok(())
}

fn write_json(path: &Path, v: &impl serde::Serialize) -> Outcome {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, v).map_err(|e| Failure::Input(e.to_string()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn require_surface(l: &Lengths) -> Result<AnalyticManifold, Failure> {
    let s = l.surface.as_deref().ok_or_else(|| Failure::Input("--surface is required".into()))?;
    Ok(AnalyticManifold::parse(s)?)
}

fn cmd_sample(a: &SampleArgs) -> Outcome {
    let m = require_surface(&a.lengths)?;
    let c = config("sample", RunMode::Naive, &a.lengths);
    let r = c.resolve(Some(&m))?;
    let epsilon = r.epsilon.ok_or_else(|| Failure::Input("--eps or --eps-ratio is required".into()))?;
    let cloud = sample_manifold(&SampleSpec { epsilon, delta: r.delta, seed: a.lengths.seed, manifold: m })?;
    let mut w = create(&a.output)?;
    match ext(&a.output).as_str() {
        "ply" => io::write_ply_cloud(&mut w, &cloud)?,
        _ => io::write_xyz(&mut w, &cloud)?,
    }
    w.flush()?;
    eprintln!("wrote {} points to {}", cloud.len(), a.output.display());
    Ok(())
}

fn cmd_reconstruct(a: &ReconstructArgs) -> Outcome {
    let mode: RunMode = a.mode.into();
    let mut c = config("reconstruct", mode, &a.lengths);
    c.input = Some(a.input.display().to_string());
    c.output = Some(a.output.display().to_string());
    c.snapshot_every = a.snapshot_every;
    c.checks = a.check.checks();
    let m = c.manifold()?;
    let cloud = read_cloud(&a.input)?;

    let snap_path = with_suffix(&a.output, ".snapshots.jsonl");
    let mut snap_out = match a.snapshot_every {
        Some(_) => Some(create(&snap_path)?),
        None => None,
    };
    let mut snap_err = None;
    let mut snap = |step: usize, k: &SimplicialComplex| {
        if let Some(w) = snap_out.as_mut() {
            let line = serde_json::json!({ "step": step, "maximal_simplices": io::maximal_simplices(k) });
            if let Err(e) = writeln!(w, "{line}") {
                snap_err = Some(e);
            }
        }
    };
    let run = reconstruct(&c, &cloud, m.as_ref(), Some(&mut snap))?;
    if let Some(e) = snap_err {
        return Err(e.into());
    }
    if let Some(mut w) = snap_out {
        w.flush()?;
    }

    write_mesh(&a.output, &run.output)?;
    if let Some(t) = &run.trace {
        let mut w = create(&a.trace.clone().unwrap_or_else(|| with_suffix(&a.output, ".trace.jsonl")))?;
        t.write_jsonl(&mut w)?;
        w.flush()?;
    }
    if let (Some(p), Some(g)) = (&a.dump_dual, &run.dual) {
        std::fs::write(p, g.to_dot())?;
    }
    let report_path = a.report.clone().unwrap_or_else(|| with_suffix(&a.output, ".report.json"));
    write_json(&report_path, &run.report)?;
    if let Some(t) = &run.report.topology {
        eprintln!("euler characteristic {}, components {}, closed surface {}", t.euler_characteristic, t.num_components, t.is_closed_surface);
    }
    gate_outcome(run.report.hypotheses_hold())
}

fn gate_outcome(hold: Option<bool>) -> Outcome {
    match hold {
        Some(false) => Err(Failure::Gate),
        _ => Ok(()),
    }
}

fn cmd_verify(a: &VerifyArgs) -> Outcome {
    let m = require_surface(&a.lengths)?;
    let mut c = config("verify", RunMode::Naive, &a.lengths);
    c.input = Some(a.input.display().to_string());
    c.output = Some(a.output.display().to_string());
    c.checks = a.check.checks();
    let cloud = read_cloud(&a.input)?;
    let mesh = a.mesh.as_deref().map(read_mesh).transpose()?;
    let report = verify(&c, &cloud, mesh.as_ref(), &m)?;
    write_json(&a.output, &report)?;
    gate_outcome(report.hypotheses_hold())
}

fn cmd_region(a: &RegionArgs) -> Outcome {
    if a.grid < 2 || !(a.extent > 0.0) {
        return Err(Failure::Input("--grid must be at least 2 and --extent positive".into()));
    }
    let rows = feasible_region_3d(a.grid, a.extent, exec(a.sequential));
    let mut w = create(&a.output)?;
    let cols: &[(&str, fn(&RegionRow) -> bool)] = match a.mode {
        RegionMode::Naive => &[("naive_feasible", |r| r.naive_feasible)],
        RegionMode::Practical => &[("practical_feasible", |r| r.practical_feasible)],
        RegionMode::Both => &[("naive_feasible", |r| r.naive_feasible), ("practical_feasible", |r| r.practical_feasible)],
    };
    let head: Vec<&str> = cols.iter().map(|c| c.0).collect();
    writeln!(w, "eps_over_R,alpha_over_R,{}", head.join(","))?;
    for r in &rows {
        let vals: Vec<&str> = cols.iter().map(|c| if (c.1)(r) { "true" } else { "false" }).collect();
        writeln!(w, "{},{},{}", r.eps_over_r, r.alpha_over_r, vals.join(","))?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_schema(output: Option<&Path>) -> Outcome {
    let s = report_schema();
    match output {
        Some(p) => write_json(p, &s),
        None => {
            println!("{}", serde_json::to_string_pretty(&s).expect("schema serializes"));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let out = match &cli.command {
        Command::Sample(a) => cmd_sample(a),
        Command::Reconstruct(a) => cmd_reconstruct(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Region(a) => cmd_region(a),
        Command::Schema { output } => cmd_schema(output.as_deref()),
    };
    match out {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Gate) => {
            eprintln!("hypotheses not met; artifacts written");
            ExitCode::from(2)
        }
        Err(Failure::Internal(e)) => {
            eprintln!("internal error: {e}");
            ExitCode::from(3)
        }
    }
}
