mod svg;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use invis_core::body::{build_invisible_body, build_invisible_body_with_dilation, EdgeSet};
use invis_core::conics::make_confocal_pair;
use invis_core::document::{deserialize_body, serialize_body, to_document};
use invis_core::geom::{Vec2, Vec3};
use invis_core::invisibility::{
    perturb, verify_fan_with, BodyParameters, FanConfig, Perturbation, Verifier, DEFAULT_SEED,
    DEFAULT_TOLERANCE,
};
use invis_core::symmetry3d::{
    export_mesh, revolve, trace3d_from_focus, verify_fan3d, RevolutionVariant, TrajectoryRecord3D,
};
use invis_core::tracer::{trace, TrajectoryRecord, DEFAULT_MAX_BOUNCES};
use invis_core::Body;

const DEFAULT_A: f64 = 2.0;
const DEFAULT_B: f64 = 1.732_050_807_568_877_2;
const DEFAULT_PHI_B: f64 = 0.8;

#[derive(Parser)]
#[command(
    name = "invis",
    version,
    about = "Mirror bodies invisible from a focal point"
)]
struct Cli {
    /// Read every angle argument in degrees instead of radians.
    #[arg(long, global = true)]
    degrees: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a body from (a, b, phi_b) and write its document.
    Construct(ConstructArgs),
    /// Trace one ray from F1, in the plane or in a solid of revolution.
    Trace(TraceArgs),
    /// Run a seeded verification fan; exit 1 when the body is not invisible.
    Verify(VerifyArgs),
    /// Draw an SVG figure.
    Figure(FigureArgs),
    /// Export a solid of revolution as a Wavefront OBJ mesh.
    Mesh(MeshArgs),
}

#[derive(Args)]
struct BodyArg {
    /// Body document; the default body is a=2, b=√3, phi_b=0.8.
    #[arg(long)]
    body: Option<PathBuf>,
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(long, default_value_t = DEFAULT_A)]
    a: f64,
    #[arg(long, default_value_t = DEFAULT_B)]
    b: f64,
    #[arg(long, default_value_t = DEFAULT_PHI_B, allow_negative_numbers = true)]
    phi_b: f64,
    /// Dilation coefficient; defaults to the tangent one.
    #[arg(long)]
    lambda: Option<f64>,
    /// Output file; the document goes to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Variant {
    MajorAxis,
    PerpendicularAxis,
}

impl From<Variant> for RevolutionVariant {
    fn from(v: Variant) -> Self {
        match v {
            Variant::MajorAxis => RevolutionVariant::AboutMajorAxis,
            Variant::PerpendicularAxis => RevolutionVariant::AboutPerpendicularAxisThroughF1,
        }
    }
}

#[derive(Args)]
struct TraceArgs {
    #[command(flatten)]
    body: BodyArg,
    /// Direction angle from F1, measured from the major axis.
    #[arg(
        long,
        allow_negative_numbers = true,
        conflicts_with = "dir3",
        required_unless_present = "dir3"
    )]
    angle: Option<f64>,
    /// 3D direction from F1 as X,Y,Z.
    #[arg(long, value_parser = parse_vec3, allow_negative_numbers = true)]
    dir3: Option<[f64; 3]>,
    #[arg(long, value_enum, default_value_t = Variant::MajorAxis)]
    variant: Variant,
    #[arg(long, default_value_t = DEFAULT_MAX_BOUNCES)]
    max_bounces: usize,
    /// Write an SVG of the body (or meridian section) with the trajectory.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Write the trajectory record.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    body: BodyArg,
    #[arg(long, default_value_t = 10_000)]
    rays: usize,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tolerance: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// 2 for the planar fan, 3 for solids of revolution.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(2..=3))]
    dim: u8,
    /// Solid to verify with --dim 3; both when omitted.
    #[arg(long, value_enum)]
    variant: Option<Variant>,
    /// Negative control: scale lambda, phi-b or beta by a factor before
    /// verifying, e.g. `lambda=0.99`.
    #[arg(long, value_parser = parse_perturbation)]
    perturb: Vec<Perturbation>,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Style {
    Fig2,
    Fig3,
    Fig4,
}

#[derive(Args)]
struct FigureArgs {
    #[command(flatten)]
    body: BodyArg,
    #[arg(long, value_enum)]
    style: Style,
    #[arg(long)]
    out: PathBuf,
    /// Angle of the drawn trajectory; defaults to the middle of the upper sector.
    #[arg(long, allow_negative_numbers = true)]
    angle: Option<f64>,
    /// Canvas width in pixels.
    #[arg(long, default_value_t = 800.0)]
    width: f64,
}

#[derive(Args)]
struct MeshArgs {
    #[command(flatten)]
    body: BodyArg,
    #[arg(long, value_enum, default_value_t = Variant::MajorAxis)]
    variant: Variant,
    /// Azimuthal x meridian steps.
    #[arg(long, default_value = "64x32", value_parser = parse_steps)]
    steps: (usize, usize),
    #[arg(long)]
    out: PathBuf,
}

fn parse_vec3(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected X,Y,Z, got {s:?}"));
    }
    let mut v = [0.0; 3];
    for (slot, p) in v.iter_mut().zip(parts) {
        *slot = p.trim().parse().map_err(|e| format!("{p:?}: {e}"))?;
    }
    Ok(v)
}

fn parse_steps(s: &str) -> Result<(usize, usize), String> {
    let (a, m) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected AxM, got {s:?}"))?;
    let n = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    Ok((n(a)?, n(m)?))
}

fn parse_perturbation(s: &str) -> Result<Perturbation, String> {
    let (name, factor) = s
        .split_once('=')
        .ok_or_else(|| format!("expected NAME=FACTOR, got {s:?}"))?;
    let k: f64 = factor
        .trim()
        .parse()
        .map_err(|e| format!("{factor:?}: {e}"))?;
    if !(k > 0.0 && k.is_finite()) {
        return Err(format!("factor must be a positive number, got {k}"));
    }
    match name.trim() {
        "lambda" => Ok(Perturbation::Lambda(k)),
        "phi-b" | "phi_b" => Ok(Perturbation::PhiB(k)),
        "beta" => Ok(Perturbation::Beta(k)),
        other => Err(format!(
            "unknown quantity {other:?}; expected lambda, phi-b or beta"
        )),
    }
}

fn angle_arg(v: f64, degrees: bool) -> f64 {
    if degrees {
        v.to_radians()
    } else {
        v
    }
}

fn load_body(arg: &BodyArg) -> Result<Body> {
    match &arg.body {
        Some(path) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            deserialize_body(&text).with_context(|| format!("loading body from {}", path.display()))
        }
        None => {
            let pair = make_confocal_pair(DEFAULT_A, DEFAULT_B)?;
            Ok(build_invisible_body(&pair, DEFAULT_PHI_B)?)
        }
    }
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn construct(args: &ConstructArgs, degrees: bool) -> Result<ExitCode> {
    ensure!(
        args.a.is_finite() && args.b.is_finite(),
        "a and b must be finite"
    );
    ensure!(args.b > 0.0, "b must be positive");
    ensure!(args.a > args.b, "a must exceed b");
    let pair = make_confocal_pair(args.a, args.b)?;
    let phi_b = angle_arg(args.phi_b, degrees);
    let (phi_h, asym) = (pair.phi_h(), pair.asymptote_angle());
    ensure!(phi_b > phi_h, "phi_b below phi_H={phi_h}");
    ensure!(
        phi_b < asym,
        "phi_b beyond the asymptote angle atan(beta/alpha)={asym}"
    );
    let body = match args.lambda {
        Some(l) => build_invisible_body_with_dilation(&pair, phi_b, l)?,
        None => build_invisible_body(&pair, phi_b)?,
    };
    let doc = serialize_body(&body)?;
    let summary = format!(
        "c = {}\nalpha = {}\nbeta = {}\nphi_H = {}\nphi_B = {}\nlambda = {}\n",
        pair.c(),
        pair.alpha(),
        pair.beta(),
        body.phi_h,
        body.phi_b,
        body.lambda
    );
    match &args.out {
        Some(path) => {
            write(path, &doc)?;
            print!("{summary}");
        }
        None => {
            eprint!("{summary}");
            print!("{doc}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn trace_cmd(args: &TraceArgs, degrees: bool) -> Result<ExitCode> {
    let body = load_body(&args.body)?;
    ensure!(args.max_bounces >= 1, "max-bounces must be at least 1");
    if let Some(angle) = args.angle {
        let theta = angle_arg(angle, degrees);
        ensure!(theta.is_finite(), "angle must be finite");
        let traj = trace(
            &body,
            body.pair.f1(),
            Vec2::from_angle(theta),
            args.max_bounces,
        );
        let verdict = Verifier::new(&body, DEFAULT_TOLERANCE).judge(&traj);
        println!("angle = {theta}");
        println!("status = {:?}", traj.status);
        println!("reflections = {}", traj.reflections.len());
        for (i, r) in traj.reflections.iter().enumerate() {
            println!(
                "  {i}: edge {} {:?} at ({}, {})",
                r.edge_id.0, r.class, r.point.x, r.point.y
            );
        }
        println!("verdict = {:?}", verdict.verdict);
        if let Some(reason) = &verdict.reason {
            println!("reason = {reason}");
        }
        if let Some(path) = &args.json {
            write(path, &to_document(&TrajectoryRecord::from(&traj))?)?;
        }
        if let Some(path) = &args.svg {
            write(
                path,
                &svg::body_figure(body.edges(), &body.pair, &traj, 800.0),
            )?;
        }
        return Ok(ExitCode::SUCCESS);
    }
    let [x, y, z] = args.dir3.context("either --angle or --dir3 is required")?;
    let dir = Vec3::new(x, y, z);
    ensure!(
        dir.norm() > 0.0 && dir.norm().is_finite(),
        "dir3 must be a nonzero finite vector"
    );
    let rb = revolve(&body, args.variant.into());
    let traj = trace3d_from_focus(&rb, dir)?;
    let record = TrajectoryRecord3D::from(&traj);
    println!("variant = {:?}", rb.variant);
    println!("status = {:?}", traj.status);
    println!("reflections = {}", traj.reflections.len());
    for (i, r) in traj.reflections.iter().enumerate() {
        println!(
            "  {i}: edge {} {:?} at ({}, {}, {})",
            r.edge_id.0, r.class, r.point.x, r.point.y, r.point.z
        );
    }
    println!("plane_deviation = {:e}", record.plane_deviation);
    println!("collinearity_error = {:e}", record.collinearity_error);
    if let Some(path) = &args.json {
        write(path, &to_document(&record)?)?;
    }
    if let Some(path) = &args.svg {
        let frame = rb.meridian_frame(dir)?;
        let d = frame.dir_to_plane(dir.normalized().unwrap_or(dir));
        let planar = trace(rb.section(), body.pair.f1(), d, args.max_bounces);
        write(
            path,
            &svg::body_figure(rb.section().edges(), &body.pair, &planar, 800.0),
        )?;
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct Report3D {
    body: BodyParameters,
    fans: Vec<invis_core::symmetry3d::Fan3DReport>,
    pass: bool,
}

fn verify(args: &VerifyArgs) -> Result<ExitCode> {
    ensure!(args.rays >= 1, "rays must be at least 1");
    ensure!(
        args.tolerance > 0.0 && args.tolerance.is_finite(),
        "tolerance must be positive"
    );
    let mut body = load_body(&args.body)?;
    for p in &args.perturb {
        body = perturb(&body, *p).with_context(|| format!("applying {p:?}"))?;
    }
    let (text, pass) = if args.dim == 2 {
        let cfg = FanConfig {
            rays: args.rays,
            tolerance: args.tolerance,
            seed: args.seed,
        };
        let r = verify_fan_with(&body, &cfg);
        println!(
            "rays = {}  seed = {}  tolerance = {:e}",
            r.rays, r.seed, r.tolerance
        );
        println!(
            "invisible_pass = {}  miss = {}  degenerate = {}  fail = {}",
            r.counts.invisible_pass, r.counts.miss, r.counts.degenerate, r.counts.fail
        );
        println!(
            "max collinearity error = {:e} rad",
            r.max_collinearity_error
        );
        println!(
            "max exit-line distance = {:e} a",
            r.max_exit_line_distance_rel
        );
        println!("max identity residual = {:e}", r.max_identity_residual);
        println!("four-bounce structure = {}", r.four_bounce_structure);
        (to_document(&r)?, r.pass)
    } else {
        let variants: Vec<Variant> = match args.variant {
            Some(v) => vec![v],
            None => vec![Variant::MajorAxis, Variant::PerpendicularAxis],
        };
        let mut fans = Vec::new();
        for v in variants {
            let rb = revolve(&body, v.into());
            let r = verify_fan3d(&rb, args.rays, args.tolerance, args.seed);
            println!("{:?}: rays = {}  seed = {}", r.variant, r.rays, r.seed);
            println!(
                "  invisible_pass = {}  miss = {}  degenerate = {}  fail = {}",
                r.counts.invisible_pass, r.counts.miss, r.counts.degenerate, r.counts.fail
            );
            println!(
                "  max collinearity error = {:e} rad",
                r.max_collinearity_error
            );
            println!("  max plane deviation = {:e} a", r.max_plane_deviation_rel);
            fans.push(r);
        }
        let pass = fans.iter().all(|f| f.pass);
        (
            to_document(&Report3D {
                body: BodyParameters::from(&body),
                fans,
                pass,
            })?,
            pass,
        )
    };
    if let Some(path) = &args.report {
        write(path, &text)?;
    }
    println!("{}", if pass { "PASS" } else { "FAIL" });
    Ok(if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn figure(args: &FigureArgs, degrees: bool) -> Result<ExitCode> {
    ensure!(
        args.width >= 16.0 && args.width.is_finite(),
        "width must be at least 16 pixels"
    );
    let body = load_body(&args.body)?;
    let theta = match args.angle {
        Some(a) => angle_arg(a, degrees),
        None => 0.5 * (body.phi_h + body.phi_b),
    };
    ensure!(theta.is_finite(), "angle must be finite");
    let dir = Vec2::from_angle(theta);
    let text = match args.style {
        Style::Fig2 => svg::conics_figure(&body.pair, args.width),
        Style::Fig3 => {
            let inner = body.inner_body();
            let traj = trace(&inner, body.pair.f1(), dir, DEFAULT_MAX_BOUNCES);
            svg::inner_figure(&body, &traj, args.width)
        }
        Style::Fig4 => {
            let traj = trace(&body, body.pair.f1(), dir, DEFAULT_MAX_BOUNCES);
            svg::body_figure(body.edges(), &body.pair, &traj, args.width)
        }
    };
    write(&args.out, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn mesh(args: &MeshArgs) -> Result<ExitCode> {
    let body = load_body(&args.body)?;
    let rb = revolve(&body, args.variant.into());
    let (az, mer) = args.steps;
    let mesh = export_mesh(&rb, az, mer)?;
    if mesh.faces.is_empty() {
        bail!("mesh has no faces");
    }
    write(&args.out, &mesh.to_obj())?;
    println!(
        "vertices = {}  faces = {}  shells = {}",
        mesh.vertices.len(),
        mesh.faces.len(),
        mesh.shell_count()
    );
    Ok(ExitCode::SUCCESS)
}

fn run(cli: &Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Construct(a) => construct(a, cli.degrees),
        Command::Trace(a) => trace_cmd(a, cli.degrees),
        Command::Verify(a) => verify(a),
        Command::Figure(a) => figure(a, cli.degrees),
        Command::Mesh(a) => mesh(a),
    }
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
