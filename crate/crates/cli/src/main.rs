//! `p3p`: solve, analyze and stress-test three-point pose problems.
//!
//! Exit codes: 0 success, 2 parse or usage error, 3 degenerate scene,
//! 4 campaign finished with failures, 5 I/O error, 1 anything else.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use p3p_core::io::{
    campaign_summary, campaign_table, companion_table, failure_table, membership_table, pair_overview, pair_table,
    sig9, solution_table, ResolvedScene, SceneFile,
};
use p3p_core::lab::{self, TheoremId, CLASSIFY_TOL};
use p3p_core::mesh::{skew_mesh, MeshBounds};
use p3p_core::types::cocyclic_degeneracy;
use p3p_core::{classify_solution_set, companion_check, solve, Error, SolutionSet, Tolerances, Vertex};

const EXIT_OTHER: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_DEGENERATE: u8 = 3;
const EXIT_FAILURES: u8 = 4;
const EXIT_IO: u8 = 5;

/// Centers closer than this (relative) to the circumcircle are rejected.
const COCYCLIC_BAND: f64 = 1e-9;

#[derive(Parser)]
#[command(name = "p3p", version, about = "Perspective-three-point solutions, sharing pairs and danger loci")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a scene file and print every positive solution.
    Solve(SceneArgs),
    /// Solve, classify sharing pairs and report locus memberships.
    Analyze(AnalyzeArgs),
    /// Run a randomized campaign for one theorem.
    Verify(VerifyArgs),
    /// Write a triangle mesh of a skewed danger cylinder as OBJ.
    ExportSkewMesh(MeshArgs),
}

#[derive(Args)]
struct SceneArgs {
    /// Scene file (TOML).
    scene: PathBuf,
    /// Relative residual accepted for the distance constraints.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Relative tolerance for exact constructions.
    #[arg(long, default_value_t = 1e-12)]
    exact_tol: f64,
    /// Also write the solution table as CSV here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    scene: SceneArgs,
    /// Residual under which a pair counts as sharing.
    #[arg(long, default_value_t = CLASSIFY_TOL)]
    classify_tol: f64,
}

#[derive(Args)]
struct VerifyArgs {
    /// side_nsc, point_nsc, companion, danger_repeat, construct_side or construct_point.
    theorem: String,
    #[arg(long, default_value_t = 500)]
    trials: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
    /// Directory for report.csv, failures.csv and summary.txt.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MeshArgs {
    /// Scene file; only its control points are used.
    scene: PathBuf,
    /// Shared vertex of the surface.
    #[arg(long, default_value = "A")]
    vertex: Vertex,
    /// Grid cells, `N` or `NXxNY`.
    #[arg(long, default_value = "200")]
    grid: String,
    /// `xmin,xmax,ymin,ymax,zmax` in the canonical frame of the vertex.
    #[arg(long)]
    bounds: Option<String>,
    #[arg(long, default_value = "skew_mesh.obj")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(&a),
        Command::Analyze(a) => cmd_analyze(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::ExportSkewMesh(a) => cmd_export_skew_mesh(&a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let code = exit_code(&e);
            if code == EXIT_DEGENERATE {
                eprintln!("degenerate scene: {e}");
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(code)
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) | Error::UnknownTheorem(_) | Error::InvalidArgument(_) => EXIT_PARSE,
        Error::Io(_) => EXIT_IO,
        Error::DegenerateInput(_)
        | Error::DegenerateAngle(_)
        | Error::InfeasibleAngles(_)
        | Error::DegeneratePencil(_)
        | Error::RightAngleDegeneracy(_) => EXIT_DEGENERATE,
        _ => EXIT_OTHER,
    }
}

fn write_file(path: &Path, text: &str) -> p3p_core::Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn load(args: &SceneArgs) -> p3p_core::Result<(ResolvedScene, SolutionSet)> {
    let scene = SceneFile::read(&args.scene)?.resolve()?;
    if let Some(o) = scene.center {
        let d = cocyclic_degeneracy(&scene.triangle, &o) / scene.triangle.scale();
        if d.abs() < COCYCLIC_BAND {
            return Err(Error::DegeneratePencil(format!("optical center on the control circle (residual {d:e})")));
        }
    }
    let tol = Tolerances { residual: args.tol, exact: args.exact_tol, ..Tolerances::default() };
    let set = solve(&scene.triangle, scene.angles, &tol)?;
    Ok((scene, set))
}

fn header(scene: &ResolvedScene, set: &SolutionSet) -> String {
    let mut s = String::new();
    if let Some(l) = &scene.label {
        let _ = writeln!(s, "scene: {l}");
    }
    let d = scene.angles.degrees();
    let _ = writeln!(s, "subtended angles (deg): alpha {} beta {} gamma {}", sig9(d[0]), sig9(d[1]), sig9(d[2]));
    let _ = writeln!(s, "solutions: {}", set.count());
    s
}

fn cmd_solve(args: &SceneArgs) -> p3p_core::Result<u8> {
    let (scene, set) = load(args)?;
    let table = solution_table(&set);
    print!("{}\n{}", header(&scene, &set), table.to_text());
    if let Some(out) = &args.out {
        write_file(out, &table.to_csv())?;
    }
    Ok(0)
}

fn cmd_analyze(args: &AnalyzeArgs) -> p3p_core::Result<u8> {
    let (scene, set) = load(&args.scene)?;
    let classes = classify_solution_set(&set, args.classify_tol);
    let companion = companion_check(&set, &classes, args.classify_tol);
    let solutions = solution_table(&set);
    let pairs = pair_table(&classes);
    let companions = companion_table(&companion);
    let mut out = header(&scene, &set);
    out.push('\n');
    out.push_str(&solutions.to_text());
    let overview = pair_overview(&set, &classes, args.classify_tol);
    out.push_str("\nsolution pairs\n");
    if overview.rows.is_empty() {
        out.push_str("(none)\n");
    } else {
        out.push_str(&overview.to_text());
    }
    if !classes.pairs.is_empty() {
        out.push_str("\nsharing pairs\n");
        out.push_str(&pairs.to_text());
    }
    for i in &classes.repeated {
        let _ = writeln!(out, "solution {} is a repeated root", i + 1);
    }
    for d in &classes.disagreements {
        let _ = writeln!(
            out,
            "solutions {} and {}: {} tests disagree (line {}, distances {})",
            d.i + 1,
            d.j + 1,
            d.label,
            d.line_test,
            d.distance_test
        );
    }
    let membership = scene.center.map(|o| membership_table(&lab::membership_table(&scene.triangle, &o)));
    match &membership {
        Some(t) => {
            out.push_str("\nlocus membership of the optical center\n");
            out.push_str(&t.to_text());
        }
        None => out.push_str("\nlocus membership: scene gives cosines only, no center\n"),
    }
    let _ = writeln!(out, "\ncompanion check: {}", companion.summary());
    out.push_str(&companions.to_text());
    print!("{out}");
    if let Some(dir) = &args.scene.out {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
        write_file(&dir.join("solutions.csv"), &solutions.to_csv())?;
        write_file(&dir.join("pairs.csv"), &pairs.to_csv())?;
        write_file(&dir.join("pair_overview.csv"), &overview.to_csv())?;
        write_file(&dir.join("companion.csv"), &companions.to_csv())?;
        if let Some(t) = &membership {
            write_file(&dir.join("membership.csv"), &t.to_csv())?;
        }
    }
    Ok(0)
}

fn cmd_verify(args: &VerifyArgs) -> p3p_core::Result<u8> {
    let theorem: TheoremId = args.theorem.parse()?;
    let report = lab::verify_theorem(theorem, args.trials, args.tol, args.seed)?;
    let summary = campaign_summary(&report);
    print!("{summary}");
    eprintln!("wall time {:.3} s", report.wall_time_secs);
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
        write_file(&dir.join("report.csv"), &campaign_table(&report).to_csv())?;
        write_file(&dir.join("failures.csv"), &failure_table(&report).to_csv())?;
        write_file(&dir.join("summary.txt"), &summary)?;
    }
    Ok(if report.failures.is_empty() { 0 } else { EXIT_FAILURES })
}

fn parse_grid(s: &str) -> p3p_core::Result<(usize, usize)> {
    let bad = || Error::InvalidArgument(format!("grid `{s}` is not `N` or `NXxNY`"));
    let parts: Vec<&str> = s.split(['x', 'X']).collect();
    let n: Vec<usize> = parts.iter().map(|p| p.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?;
    match n[..] {
        [k] => Ok((k, k)),
        [a, b] => Ok((a, b)),
        _ => Err(bad()),
    }
}

fn parse_bounds(s: &str) -> p3p_core::Result<MeshBounds> {
    let v: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse().map_err(|_| Error::InvalidArgument(format!("bounds `{s}` need five numbers"))))
        .collect::<Result<_, _>>()?;
    match v[..] {
        [x_min, x_max, y_min, y_max, z_max] => Ok(MeshBounds { x_min, x_max, y_min, y_max, z_max }),
        _ => Err(Error::InvalidArgument(format!("bounds `{s}` need five numbers"))),
    }
}

fn cmd_export_skew_mesh(args: &MeshArgs) -> p3p_core::Result<u8> {
    let file = SceneFile::read(&args.scene)?;
    let tri = p3p_core::ControlTriangle::from_arrays(file.control_points)?;
    let (nx, ny) = parse_grid(&args.grid)?;
    let bounds = match &args.bounds {
        Some(b) => parse_bounds(b)?,
        None => MeshBounds::around(&tri, args.vertex),
    };
    let mesh = skew_mesh(&tri, args.vertex, nx, ny, &bounds)?;
    let comment = format!("skewed danger cylinder, shared vertex {}, grid {nx}x{ny}", args.vertex);
    write_file(&args.out, &mesh.to_obj(&comment))?;
    println!(
        "wrote {} vertices, {} faces ({} on z = 0) to {}",
        mesh.vertices.len(),
        mesh.faces.len(),
        mesh.on_base.iter().filter(|b| **b).count(),
        args.out.display()
    );
    Ok(0)
}
