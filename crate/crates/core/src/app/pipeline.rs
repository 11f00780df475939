use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;

use crate::assembly::{assemble, build_system, classify_dofs, DiscreteSpace, LinearSystem, QuadratureRule, SystemMatrices};
use crate::geometry::{near_field_length, DomainConfig};
use crate::solver::{
    build_cslp, direct_solve, gmres, matrix_market, norm2, GmresOutcome, SolveReport, SparseComplex,
};

use super::field::{
    axis_profile, bottom_profile, dirichlet_deviation, local_maxima, local_minima, moving_average, sample_grid,
    FieldSample,
};
use super::output::{save_axis_csv, save_bottom_csv, save_field_csv, save_json, save_matrix, save_vtk};
use super::{io_err, AppError, RunConfig, SolutionField, SolverChoice};

type C = Complex64;

/// Runs above this many dofs need `--full-scale`.
pub const FULL_SCALE_DOFS: usize = 200_000;

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub full_scale: bool,
    /// Write the files named in `output`.
    pub write_outputs: bool,
}

/// Quantities derived from the configuration and the discretization.
#[derive(Debug, Clone, Serialize)]
pub struct Derived {
    pub k: f64,
    pub wavelength: f64,
    pub near_field: f64,
    pub radius: f64,
    pub beta: f64,
    pub aperture_params: (f64, f64),
    /// Basis counts after aperture knot alignment.
    pub n: usize,
    pub m: usize,
    pub dofs: usize,
    pub free_dofs: usize,
    pub dirichlet_dofs: usize,
    pub nnz: usize,
    /// `nnz / n₀²`.
    pub density: f64,
    pub memory_estimate_bytes: f64,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Timings {
    pub setup_s: f64,
    pub assembly_s: f64,
    pub preconditioner_s: f64,
    pub solve_s: f64,
    pub direct_s: f64,
    pub postprocess_s: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DirectComparison {
    /// `‖x_gmres − x_direct‖ / ‖x_direct‖`.
    pub relative_difference: f64,
    pub true_residual: f64,
}

/// Features of `|uʰ(0, y)|`.
#[derive(Debug, Clone, Serialize)]
pub struct AxisSummary {
    /// Whether `ξ = 1/2` maps onto `x = 0`.
    pub midline: bool,
    pub near_field: f64,
    pub peak_y: f64,
    pub peak_abs: f64,
    pub maxima_before_near_field: usize,
    pub maxima_after_near_field: usize,
    pub maxima_y: Vec<f64>,
    /// Same counts after a moving average over `λ/2`.
    pub envelope_maxima_before_near_field: usize,
    pub envelope_minima_before_near_field: usize,
    pub envelope_maxima_after_near_field: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct BottomSummary {
    /// `max |uʰ(x,0) − C|` on `[−a, a]` from the profile samples.
    pub aperture_deviation: f64,
    /// `max |uʰ(x,0)| − |uʰ(−x,0)|`.
    pub even_defect: f64,
    pub max_abs_outside: f64,
    /// Interior extrema of `|uʰ(x,0)|` on each side of the aperture, `|x| > a`,
    /// after a moving average over `λ/2`.
    pub envelope_extrema_outside: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub config: RunConfig,
    pub derived: Derived,
    pub solver: SolverChoice,
    pub gmres: Option<SolveReport>,
    pub direct: Option<DirectComparison>,
    /// `‖b − Ax‖ / ‖b‖` of the returned solution.
    pub true_residual: f64,
    /// `max |uʰ − C|` over 200 aperture samples.
    pub dirichlet_deviation: f64,
    pub axis: AxisSummary,
    pub bottom: BottomSummary,
    pub timings: Timings,
}

/// Geometry, space, matrices and right-hand side of one run.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub config: RunConfig,
    pub domain: DomainConfig,
    pub space: DiscreteSpace,
    pub system: SystemMatrices,
    pub linear: LinearSystem,
    pub setup_s: f64,
    pub assembly_s: f64,
}

pub struct RunOutcome {
    pub report: RunReport,
    pub field: SolutionField,
}

pub fn prepare(cfg: &RunConfig, opts: &RunOptions) -> Result<Prepared, AppError> {
    cfg.validate()?;
    let dofs = cfg.n * cfg.m;
    let estimate = cfg.memory_estimate_bytes();
    if dofs > FULL_SCALE_DOFS {
        if !opts.full_scale {
            return Err(AppError::NeedsFullScale { dofs, estimate });
        }
        eprintln!("full-scale run: {dofs} dofs, estimated peak memory {:.1} GB", estimate / 1e9);
    }
    let t0 = Instant::now();
    let domain = cfg.domain()?;
    let space = DiscreteSpace::semicircle(&domain, &cfg.space_spec())?;
    let setup_s = t0.elapsed().as_secs_f64();

    let t1 = Instant::now();
    let quad = match cfg.quadrature_points {
        Some(p) => QuadratureRule::new(p, p),
        None => QuadratureRule::for_orders(cfg.order_xi, cfg.order_eta),
    };
    let global = assemble(&space, &quad)?;
    let partition = classify_dofs(&space.space, &domain)?;
    let system = SystemMatrices::restrict(&global, partition)?;
    let linear = build_system(&system, domain.wavenumber(), domain.dirichlet)?;
    let assembly_s = t1.elapsed().as_secs_f64();
    log::info!(
        "assembled {} free of {} dofs in {:.2} s",
        linear.n_free(),
        space.dim(),
        assembly_s
    );
    if let Some(dir) = cfg.output.path(&cfg.output.matrices) {
        if opts.write_outputs {
            export_matrices(&dir, &system, &linear)?;
        }
    }
    Ok(Prepared { config: cfg.clone(), domain, space, system, linear, setup_s, assembly_s })
}

fn export_matrices(dir: &std::path::Path, sys: &SystemMatrices, ls: &LinearSystem) -> Result<(), AppError> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    save_matrix(&dir.join("stiffness.mtx"), &sys.stiffness.to_complex())?;
    save_matrix(&dir.join("mass.mtx"), &sys.mass.to_complex())?;
    save_matrix(&dir.join("boundary.mtx"), &sys.boundary.to_complex())?;
    save_matrix(&dir.join("system.mtx"), &ls.a)?;
    let path = dir.join("rhs.mtx");
    matrix_market::write_vector(&path, &ls.b)?;
    Ok(())
}

fn relative_residual(a: &SparseComplex, b: &[C], x: &[C]) -> f64 {
    let r: Vec<C> = a.matvec(x).iter().zip(b).map(|(ax, bi)| bi - ax).collect();
    let nb = norm2(b);
    if nb == 0.0 {
        norm2(&r)
    } else {
        norm2(&r) / nb
    }
}

/// Free-dof solution of a prepared system, with the GMRES report and the
/// optional comparison against a direct solve.
pub fn solve(
    prep: &Prepared,
    timings: &mut Timings,
) -> Result<(Vec<C>, Option<SolveReport>, Option<DirectComparison>), AppError> {
    let cfg = &prep.config;
    let ls = &prep.linear;
    let direct = |timings: &mut Timings| -> Result<Vec<C>, AppError> {
        let t = Instant::now();
        let x = direct_solve(&ls.a, &ls.b)?;
        timings.direct_s = t.elapsed().as_secs_f64();
        Ok(x)
    };
    match cfg.solver {
        SolverChoice::Direct => Ok((direct(timings)?, None, None)),
        SolverChoice::Gmres => {
            let t = Instant::now();
            let mass = prep.system.mass.to_complex();
            let pre = build_cslp(&ls.a, &mass, cfg.beta())?;
            timings.preconditioner_s = t.elapsed().as_secs_f64();
            let t = Instant::now();
            let GmresOutcome { x, report } = gmres(&ls.a, &ls.b, None, &pre, &cfg.gmres)?;
            timings.solve_s = t.elapsed().as_secs_f64();
            // release the preconditioner factors before any second factorization
            drop(pre);
            log::info!(
                "gmres: converged={} outer={} krylov={} residual={:e}",
                report.converged,
                report.outer_iterations,
                report.krylov_iterations,
                report.preconditioned_residual
            );
            let cmp = if cfg.compare_direct {
                let xd = direct(timings)?;
                let diff: Vec<C> = x.iter().zip(&xd).map(|(a, b)| a - b).collect();
                let nd = norm2(&xd);
                Some(DirectComparison {
                    relative_difference: if nd == 0.0 { norm2(&diff) } else { norm2(&diff) / nd },
                    true_residual: relative_residual(&ls.a, &ls.b, &xd),
                })
            } else {
                None
            };
            Ok((x, Some(report), cmp))
        }
    }
}

fn summarize_axis(axis: &[FieldSample], midline: bool, near_field: f64, wavelength: f64) -> AxisSummary {
    let abs: Vec<f64> = axis.iter().map(FieldSample::abs).collect();
    let peak = (0..abs.len()).fold(0, |best, i| if abs[i] > abs[best] { i } else { best });
    let maxima = local_maxima(&abs);
    let ys: Vec<f64> = axis.iter().map(|s| s.y).collect();
    let (ye, env) = moving_average(&ys, &abs, 0.5 * wavelength, 2 * ys.len());
    let count = |idx: Vec<usize>, before: bool| idx.iter().filter(|&&i| (ye[i] < near_field) == before).count();
    AxisSummary {
        envelope_maxima_before_near_field: count(local_maxima(&env), true),
        envelope_minima_before_near_field: count(local_minima(&env), true),
        envelope_maxima_after_near_field: count(local_maxima(&env), false),
        midline,
        near_field,
        peak_y: axis[peak].y,
        peak_abs: abs[peak],
        maxima_before_near_field: maxima.iter().filter(|&&i| axis[i].y < near_field).count(),
        maxima_after_near_field: maxima.iter().filter(|&&i| axis[i].y >= near_field).count(),
        maxima_y: maxima.iter().map(|&i| axis[i].y).collect(),
    }
}

fn summarize_bottom(bottom: &[FieldSample], domain: &DomainConfig) -> BottomSummary {
    let mut s = BottomSummary { aperture_deviation: 0.0, even_defect: 0.0, max_abs_outside: 0.0, envelope_extrema_outside: 0 };
    for sign in [1.0, -1.0] {
        let mut side: Vec<(f64, f64)> =
            bottom.iter().filter(|p| sign * p.x > domain.a).map(|p| (sign * p.x, p.abs())).collect();
        side.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (xs, vs): (Vec<f64>, Vec<f64>) = side.into_iter().unzip();
        if xs.len() >= 2 {
            let (_, env) = moving_average(&xs, &vs, 0.5 * domain.wavelength(), 2 * xs.len());
            s.envelope_extrema_outside = s.envelope_extrema_outside.max(local_maxima(&env).len() + local_minima(&env).len());
        }
    }
    let n = bottom.len();
    for (i, p) in bottom.iter().enumerate() {
        if p.x.abs() <= domain.a {
            s.aperture_deviation = s.aperture_deviation.max((p.value - domain.dirichlet).norm());
        } else {
            s.max_abs_outside = s.max_abs_outside.max(p.abs());
        }
        s.even_defect = s.even_defect.max((p.abs() - bottom[n - 1 - i].abs()).abs());
    }
    s
}

/// Full pipeline: assembly, solve, postprocessing and, if requested, output files.
pub fn run(cfg: &RunConfig, opts: &RunOptions) -> Result<RunOutcome, AppError> {
    let prep = prepare(cfg, opts)?;
    let mut timings = Timings { setup_s: prep.setup_s, assembly_s: prep.assembly_s, ..Default::default() };
    let (x, gm, direct) = solve(&prep, &mut timings)?;
    let true_residual = relative_residual(&prep.linear.a, &prep.linear.b, &x);

    let t = Instant::now();
    let part = &prep.system.partition;
    let coeffs = prep.linear.full_coefficients(part, &x)?;
    let field = SolutionField::new(coeffs, prep.space.clone(), prep.domain.wavenumber())?;
    let dev = dirichlet_deviation(&field, &prep.domain, 200)?;
    let (axis, midline) = axis_profile(&field, cfg.profile_samples)?;
    let bottom = bottom_profile(&field, cfg.profile_samples)?;
    let nf = near_field_length(&prep.domain);
    let out = &cfg.output;
    if opts.write_outputs {
        if out.field_csv.is_some() || out.vtk.is_some() {
            let [nx, ny] = cfg.field_resolution;
            let grid = sample_grid(&field, nx, ny)?;
            if let Some(p) = out.path(&out.field_csv) {
                save_field_csv(&p, &grid)?;
            }
            if let Some(p) = out.path(&out.vtk) {
                save_vtk(&p, &grid, nx, ny)?;
            }
        }
        if let Some(p) = out.path(&out.axis_csv) {
            save_axis_csv(&p, &axis)?;
        }
        if let Some(p) = out.path(&out.bottom_csv) {
            save_bottom_csv(&p, &bottom)?;
        }
    }
    timings.postprocess_s = t.elapsed().as_secs_f64();

    let n0 = prep.linear.n_free();
    let sp = &prep.space.space;
    let report = RunReport {
        config: cfg.clone(),
        derived: Derived {
            k: prep.domain.wavenumber(),
            wavelength: prep.domain.wavelength(),
            near_field: nf,
            radius: prep.domain.r,
            beta: cfg.beta(),
            aperture_params: prep.domain.aperture_params(),
            n: sp.n(),
            m: sp.m(),
            dofs: sp.dim(),
            free_dofs: n0,
            dirichlet_dofs: part.n_dirichlet(),
            nnz: prep.linear.a.nnz(),
            density: prep.linear.a.nnz() as f64 / (n0 as f64 * n0 as f64),
            memory_estimate_bytes: cfg.memory_estimate_bytes(),
        },
        solver: cfg.solver,
        gmres: gm,
        direct,
        true_residual,
        dirichlet_deviation: dev,
        axis: summarize_axis(&axis, midline, nf, prep.domain.wavelength()),
        bottom: summarize_bottom(&bottom, &prep.domain),
        timings,
    };
    if opts.write_outputs {
        if let Some(p) = out.path(&out.report_json) {
            save_json(&p, &report)?;
        }
    }
    Ok(RunOutcome { report, field })
}
