use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use iga_radiation::app::{
    convergence_study, output, pollution_study, run, AppError, MmsConfig, PollutionConfig, RunConfig, RunOptions,
    SolverChoice,
};
use iga_radiation::geometry::{coons_patch, make_semicircle_boundary, quality_map, DomainConfig};
use iga_radiation::solver::{
    build_cslp, direct_solve, gmres, matrix_market, GmresConfig, IdentityPreconditioner, PrecondSide,
};

#[derive(Parser)]
#[command(name = "iga-radiation", version, about = "Isogeometric Helmholtz radiation solver on a semicircle")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a radiation problem from a JSON config.
    Run(RunArgs),
    /// Mean-ratio Jacobian of the semicircle parametrization.
    QualityMap(QualityArgs),
    /// Manufactured-solution convergence study.
    MmsConverge(StudyArgs),
    /// Error growth with k at fixed resolution per wavelength.
    Pollution(StudyArgs),
    /// Solve a system stored in Matrix Market files.
    SolveMm(SolveMmArgs),
}

#[derive(Args)]
struct RunArgs {
    config: PathBuf,
    /// Allow runs above the desk-scale dof limit.
    #[arg(long)]
    full_scale: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    frequency: Option<f64>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    radius_factor: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    /// Sets both spline orders.
    #[arg(long)]
    order: Option<usize>,
    #[arg(long)]
    beta_factor: Option<f64>,
    #[arg(long, value_parser = ["gmres", "direct"])]
    solver: Option<String>,
    #[arg(long)]
    restart: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    compare_direct: bool,
    /// Leave the aperture ends off the knot vector.
    #[arg(long)]
    no_align_aperture: bool,
    /// Also write a legacy VTK file with this name.
    #[arg(long)]
    vtk: Option<String>,
    /// Dump S, M, E, A and b as Matrix Market into this subdirectory.
    #[arg(long)]
    export_matrices: Option<String>,
}

#[derive(Args)]
struct QualityArgs {
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_4)]
    theta: f64,
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    #[arg(long, default_value_t = 200)]
    res: usize,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct StudyArgs {
    config: PathBuf,
    /// Write the table as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct SolveMmArgs {
    matrix: PathBuf,
    rhs: PathBuf,
    /// Mass matrix for the shifted-Laplacian preconditioner.
    #[arg(long)]
    mass: Option<PathBuf>,
    /// Shift `β` of `A − iβM`.
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    direct: bool,
    #[arg(long, default_value_t = 50)]
    restart: usize,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 100)]
    max_outer: usize,
    #[arg(long)]
    right: bool,
    /// Solution vector output.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T, AppError> {
    let text = std::fs::read_to_string(path).map_err(|e| AppError::Io { path: path.clone(), source: e })?;
    serde_json::from_str(&text).map_err(|e| AppError::Config(format!("{}: {e}", path.display())))
}

fn cmd_run(args: RunArgs) -> Result<(), AppError> {
    let mut cfg = RunConfig::load(&args.config)?;
    macro_rules! set {
        ($($field:ident),*) => { $(if let Some(v) = args.$field { cfg.$field = v; })* };
    }
    set!(frequency, a, radius_factor, theta, n, m, beta_factor);
    if let Some(o) = args.order {
        cfg.order_xi = o;
        cfg.order_eta = o;
    }
    if let Some(s) = args.solver.as_deref() {
        cfg.solver = if s == "direct" { SolverChoice::Direct } else { SolverChoice::Gmres };
    }
    if let Some(r) = args.restart {
        cfg.gmres.restart = r;
    }
    if let Some(t) = args.tol {
        cfg.gmres.tol = t;
    }
    cfg.compare_direct |= args.compare_direct;
    cfg.align_aperture_knots &= !args.no_align_aperture;
    if let Some(d) = args.out {
        cfg.output.dir = d;
    }
    if args.vtk.is_some() {
        cfg.output.vtk = args.vtk;
    }
    if args.export_matrices.is_some() {
        cfg.output.matrices = args.export_matrices;
    }
    cfg.validate()?;
    println!(
        "k = {:.6}, N_f = {:.6} m, r = {:.6} m, N = {}, estimated peak memory {:.2} GB",
        cfg.wavenumber(),
        cfg.near_field(),
        cfg.near_field() * cfg.radius_factor,
        cfg.n * cfg.m,
        cfg.memory_estimate_bytes() / 1e9
    );
    let out = run(&cfg, &RunOptions { full_scale: args.full_scale, write_outputs: true })?;
    let r = &out.report;
    if let Some(g) = &r.gmres {
        println!(
            "gmres: converged={} outer={} krylov={} preconditioned residual={:.3e} true residual={:.3e} ({:.2} s)",
            g.converged, g.outer_iterations, g.krylov_iterations, g.preconditioned_residual, g.true_residual, g.wall_time_s
        );
    }
    if let Some(d) = &r.direct {
        println!("direct comparison: relative difference {:.3e}", d.relative_difference);
    }
    println!("max |u - C| on aperture: {:.3e}", r.dirichlet_deviation);
    println!(
        "axis: peak |u| = {:.4} at y = {:.5} m, local maxima before/after N_f: {}/{} (half-wavelength average: {}/{})",
        r.axis.peak_abs,
        r.axis.peak_y,
        r.axis.maxima_before_near_field,
        r.axis.maxima_after_near_field,
        r.axis.envelope_maxima_before_near_field,
        r.axis.envelope_maxima_after_near_field
    );
    println!(
        "diameter: even defect {:.3e}, averaged extrema outside the aperture {}",
        r.bottom.even_defect, r.bottom.envelope_extrema_outside
    );
    println!("outputs in {}", cfg.output.dir.display());
    if let Some(g) = &r.gmres {
        if !g.converged {
            return Err(AppError::NotConverged(format!(
                "residual {:.3e} after {} restart cycles",
                g.preconditioned_residual, g.outer_iterations
            )));
        }
    }
    if r.dirichlet_deviation > 1e-10 {
        return Err(AppError::Check(format!("aperture deviation {:.3e} exceeds 1e-10", r.dirichlet_deviation)));
    }
    Ok(())
}

fn cmd_quality(args: QualityArgs) -> Result<(), AppError> {
    let cfg = DomainConfig {
        a: 0.5 * args.radius,
        r: args.radius,
        theta: args.theta,
        dirichlet: Complex64::new(1.0, 0.0),
        c_sound: 1.0,
        frequency: 1.0,
    };
    cfg.validate()?;
    let b = make_semicircle_boundary(&cfg)?;
    let f = coons_patch(&b.bottom, &b.top, &b.left, &b.right)?;
    let q = quality_map(&f, args.res)?;
    println!(
        "theta = {:.6}: min J_r = {:.4}, mean = {:.4}, max = {:.4}, fraction >= 0.8: {:.4}",
        args.theta,
        q.min(),
        q.mean(),
        q.max(),
        q.fraction_at_least(0.8)
    );
    if let Some(p) = args.csv {
        let file = std::fs::File::create(&p).map_err(|e| AppError::Io { path: p.clone(), source: e })?;
        q.write_csv(std::io::BufWriter::new(file)).map_err(|e| AppError::Io { path: p, source: e })?;
    }
    Ok(())
}

fn cmd_mms(args: StudyArgs) -> Result<(), AppError> {
    let cfg: MmsConfig = read_json(&args.config)?;
    let t = convergence_study(&cfg)?;
    println!("{:>6} {:>10} {:>24} {:>8}", "spans", "dofs", "L2 error", "rate");
    for r in &t.rows {
        let rate = r.rate.map(|v| format!("{v:.3}")).unwrap_or_default();
        println!("{:>6} {:>10} {:>24.16e} {:>8}", r.spans, r.dofs, r.l2_error, rate);
    }
    println!("observed order {:.3}, monotone {}", t.observed_order, t.monotone);
    if let Some(p) = args.json {
        output::save_json(&p, &t)?;
    }
    if !t.monotone {
        return Err(AppError::Check("errors are not monotone under refinement".into()));
    }
    Ok(())
}

fn cmd_pollution(args: StudyArgs) -> Result<(), AppError> {
    let cfg: PollutionConfig = read_json(&args.config)?;
    let t = pollution_study(&cfg)?;
    println!("{:>6} {:>8} {:>6} {:>10} {:>24}", "order", "k", "spans", "dofs", "relative L2 error");
    for r in &t.rows {
        println!("{:>6} {:>8} {:>6} {:>10} {:>24.16e}", r.order, r.k, r.spans, r.dofs, r.relative_error);
    }
    for (order, g) in &t.growth {
        println!("order {order}: growth factor {g:.4}");
    }
    if let Some(p) = args.json {
        output::save_json(&p, &t)?;
    }
    Ok(())
}

fn cmd_solve_mm(args: SolveMmArgs) -> Result<(), AppError> {
    let a = matrix_market::read_matrix(&args.matrix)?;
    let b = matrix_market::read_vector(&args.rhs)?;
    let x = if args.direct {
        direct_solve(&a, &b)?
    } else {
        let config = GmresConfig {
            restart: args.restart,
            tol: args.tol,
            max_outer: args.max_outer,
            side: if args.right { PrecondSide::Right } else { PrecondSide::Left },
        };
        let outcome = match (&args.mass, args.beta) {
            (Some(mp), Some(beta)) => {
                let mass = matrix_market::read_matrix(mp)?;
                let pre = build_cslp(&a, &mass, beta)?;
                gmres(&a, &b, None, &pre, &config)?
            }
            (None, None) => gmres(&a, &b, None, &IdentityPreconditioner, &config)?,
            _ => return Err(AppError::Config("--mass and --beta go together".into())),
        };
        let r = &outcome.report;
        println!(
            "gmres: converged={} outer={} krylov={} preconditioned residual={:.3e} true residual={:.3e}",
            r.converged, r.outer_iterations, r.krylov_iterations, r.preconditioned_residual, r.true_residual
        );
        if !r.converged {
            if let Some(p) = &args.out {
                matrix_market::write_vector(p, &outcome.x)?;
            }
            return Err(AppError::NotConverged(format!("residual {:.3e}", r.preconditioned_residual)));
        }
        outcome.x
    };
    if let Some(p) = &args.out {
        matrix_market::write_vector(p, &x)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::QualityMap(a) => cmd_quality(a),
        Command::MmsConverge(a) => cmd_mms(a),
        Command::Pollution(a) => cmd_pollution(a),
        Command::SolveMm(a) => cmd_solve_mm(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
