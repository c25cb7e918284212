use crate::config::write_sidecar;
use crate::{AntennaArgs, CliError, Common, CurvesArgs, DynArgs, EscapeArgs, FamilyArg, FormatArg, OutputArgs, PlaneArgs, PointArg};
use rootdyn::orbit::{classify_family, known_attractors, EscapeConfig, Outcome};
use rootdyn::render::{
    colorize, render_dynamical_plane, render_parameter_plane, write_grid, write_image, write_summary_csv, ColorMode,
    FamilySpec, GridSpec, ImageFormat, Palette, PlaneGrid, Window,
};
use rootdyn::stability::{
    antenna_b_image, antenna_intervals, trace_boundary, BoundaryQuery, Parametrization, TraceConfig, WhichPoint,
};
use rootdyn::{format_complex, BehlParams, Family, GeneralParams, C64};
use serde::Serialize;
use std::path::{Path, PathBuf};

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub fn check_degrees(n: u32, k: u32) -> Result<(), CliError> {
    if n < 2 {
        return Err(usage(format!("--n must be at least 2 (got {n})")));
    }
    if k < 1 {
        return Err(usage(format!("--k must be at least 1 (got {k})")));
    }
    Ok(())
}

pub fn check_threads(common: &Common) -> Result<Option<usize>, CliError> {
    match common.threads {
        Some(0) => Err(usage("--threads must be at least 1")),
        t => Ok(t),
    }
}

pub fn escape_config(e: &EscapeArgs) -> Result<EscapeConfig, CliError> {
    if e.max_iter < 1 {
        return Err(usage("--max-iter must be at least 1"));
    }
    if !(e.eps_zero > 0.0 && e.eps_zero < 1.0) {
        return Err(usage(format!("--eps-zero must lie in (0, 1), got {}", e.eps_zero)));
    }
    if !(e.eps_inf > 1.0 && e.eps_inf.is_finite()) {
        return Err(usage(format!("--eps-inf must be a finite number above 1, got {}", e.eps_inf)));
    }
    let cfg = EscapeConfig {
        max_iter: e.max_iter,
        eps_zero: e.eps_zero,
        eps_inf: e.eps_inf,
        circle_projection: !e.no_circle_projection,
        ..EscapeConfig::default()
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Runs `f` on a pool of `threads` workers, or the global pool.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match threads {
        None => Ok(f()),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| usage(format!("--threads: {e}"))),
    }
}

pub fn general_params(a: C64, n: u32, k: u32) -> Result<GeneralParams, CliError> {
    check_degrees(n, k)?;
    GeneralParams::new(a, n, k).map_err(|e| usage(format!("--a: {e}")))
}

pub fn behl_params(b: C64) -> Result<BehlParams, CliError> {
    BehlParams::new(b).map_err(|e| usage(format!("--b: {e}")))
}

/// The map selected by `--a` (with `--n`, `--k`) or `--b`.
pub fn chosen_family(a: Option<C64>, b: Option<C64>, n: u32, k: u32) -> Result<Family, CliError> {
    match (a, b) {
        (Some(_), Some(_)) => Err(usage("give either --a or --b, not both")),
        (None, None) => Err(usage("one of --a or --b is required")),
        (Some(a), None) => Ok(Family::General(general_params(a, n, k)?)),
        (None, Some(b)) => Ok(Family::Behl(behl_params(b)?)),
    }
}

fn palette(name: &str) -> Result<Palette, CliError> {
    Palette::by_name(name).ok_or_else(|| {
        usage(format!("--palette: unknown palette {name:?}; available: {}", Palette::names().join(", ")))
    })
}

fn grid_spec((w, h): (usize, usize)) -> Result<GridSpec, CliError> {
    GridSpec::new(w, h).map_err(|e| usage(format!("--res: {e}")))
}

fn window([x0, x1, y0, y1]: [f64; 4]) -> Result<Window, CliError> {
    Window::new(x0, x1, y0, y1).map_err(|e| usage(format!("--window: {e}")))
}

fn announce(path: &Path, sidecar: &Path) {
    println!("wrote {} (config {})", path.display(), sidecar.display());
}

fn write_outputs(
    grid: &PlaneGrid,
    mode: ColorMode,
    output: &OutputArgs,
    default_out: &str,
    command: &str,
    args: &impl Serialize,
) -> Result<(), CliError> {
    let pal = palette(&output.palette)?;
    let out = output.out.clone().unwrap_or_else(|| PathBuf::from(default_out));
    let format = match output.format {
        Some(FormatArg::Ppm) => ImageFormat::Ppm,
        Some(FormatArg::Png) => ImageFormat::Png,
        None => ImageFormat::from_path(&out),
    };
    write_image(&colorize(grid, &pal, mode), &out, format)?;
    announce(&out, &write_sidecar(&out, command, args)?);
    if let Some(g) = &output.grid {
        write_grid(grid, g)?;
        announce(g, &write_sidecar(g, command, args)?);
    }
    let counts = grid.counts();
    if let Some(s) = &output.summary {
        write_summary_csv(&counts, s)?;
        announce(s, &write_sidecar(s, command, args)?);
    }
    println!(
        "to_zero {}\nto_infinity {}\nto_strange {}\nundecided {}\ndegenerate {}",
        counts.to_zero, counts.to_infinity, counts.to_strange, counts.undecided, counts.degenerate
    );
    Ok(())
}

pub fn param_plane(args: &PlaneArgs) -> Result<(), CliError> {
    let threads = check_threads(&args.common)?;
    let cfg = escape_config(&args.escape)?;
    let spec = grid_spec(args.res)?;
    let (family, default_window) = match args.family {
        FamilyArg::Behl => (FamilySpec::Behl, [-50.0, 10.0, -15.0, 15.0]),
        FamilyArg::General => {
            check_degrees(args.n, args.k)?;
            (FamilySpec::General { n: args.n, k: args.k }, [-3.2, 3.2, -3.2, 3.2])
        }
    };
    let win = window(args.window.unwrap_or(default_window))?;
    palette(&args.output.palette)?;
    let grid = render_parameter_plane(family, &win, &spec, &cfg, threads)?;
    let mut echoed = args.clone();
    echoed.window = Some(args.window.unwrap_or(default_window));
    write_outputs(&grid, ColorMode::Parameter, &args.output, "param-plane.ppm", "param-plane", &echoed)
}

pub fn dyn_plane(args: &DynArgs) -> Result<(), CliError> {
    let threads = check_threads(&args.common)?;
    let cfg = escape_config(&args.escape)?;
    let spec = grid_spec(args.res)?;
    let win = window(args.window)?;
    let family = chosen_family(args.a, args.b, args.n, args.k)?;
    palette(&args.output.palette)?;
    let attractors = with_threads(threads, || known_attractors(&family))?;
    for at in &attractors {
        let pts: Vec<String> = at
            .points
            .iter()
            .map(|p| p.to_complex().map_or("∞".to_string(), format_complex))
            .collect();
        println!(
            "attractor {}: period {} at {} with |multiplier| {:.3e}",
            at.id,
            at.points.len(),
            pts.join(", "),
            at.multiplier.norm()
        );
    }
    let grid = render_dynamical_plane(&family, &win, &spec, &cfg, &attractors, threads)?;
    write_outputs(&grid, ColorMode::Dynamical, &args.output, "dyn-plane.ppm", "dyn-plane", args)
}

pub fn curves(args: &CurvesArgs) -> Result<(), CliError> {
    let threads = check_threads(&args.common)?;
    let which_point = match args.point {
        PointArg::Z1 => WhichPoint::Z1,
        PointArg::Zm1 => WhichPoint::Zm1,
        PointArg::Zpm => WhichPoint::Zpm,
    };
    let parametrization = match args.family {
        FamilyArg::Behl => Parametrization::Behl,
        FamilyArg::General => {
            check_degrees(args.n, args.k)?;
            if which_point == WhichPoint::Zpm && (args.n, args.k) != (4, 1) {
                return Err(usage("--point zpm with --family general needs --n 4 --k 1"));
            }
            Parametrization::General { n: args.n, k: args.k }
        }
    };
    let query = BoundaryQuery { which_point, parametrization };
    let samples = args.samples;
    let boundary = with_threads(threads, || trace_boundary(query, samples, &TraceConfig::default()))?
        .map_err(|e| usage(format!("--samples: {e}")))?;
    let family = match args.family {
        FamilyArg::Behl => "behl",
        FamilyArg::General => "general",
    };
    let point = match args.point {
        PointArg::Z1 => "z1",
        PointArg::Zm1 => "zm1",
        PointArg::Zpm => "zpm",
    };
    let out = args.out.clone().unwrap_or_else(|| PathBuf::from(format!("{point}-{family}.csv")));
    let json = out.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    if json {
        boundary.write_json(&out)?;
    } else {
        boundary.write_csv(&out)?;
    }
    announce(&out, &write_sidecar(&out, "curves", args)?);
    println!(
        "{} component(s), {} point(s)",
        boundary.components.len(),
        boundary.points().count()
    );
    Ok(())
}

/// `count` midpoints of equal slices of `(lo, hi)`; an unbounded end is
/// replaced by steps of 2.5 away from the finite one.
fn interval_samples(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|j| {
            let t = (j as f64 + 0.5) / count as f64;
            match (lo.is_finite(), hi.is_finite()) {
                (true, true) => lo + (hi - lo) * t,
                (false, _) => hi - 0.25 - 2.5 * j as f64,
                (true, false) => lo + 0.25 + 2.5 * j as f64,
            }
        })
        .collect()
}

pub fn antenna(args: &AntennaArgs) -> Result<(), CliError> {
    let threads = check_threads(&args.common)?;
    let cfg = escape_config(&args.escape)?;
    let (ant, label) = match args.family {
        FamilyArg::Behl => (antenna_b_image(), "of b (Behl)".to_string()),
        FamilyArg::General => {
            check_degrees(args.n, args.k)?;
            let ant = antenna_intervals(args.n, args.k).map_err(|e| usage(format!("--n/--k: {e}")))?;
            (ant, format!("of a, (n, k) = ({}, {})", args.n, args.k))
        }
    };
    let family_at = |x: f64| -> Result<Family, CliError> {
        let z = C64::new(x, 0.0);
        match args.family {
            FamilyArg::Behl => Ok(Family::Behl(behl_params(z)?)),
            FamilyArg::General => Ok(Family::General(general_params(z, args.n, args.k)?)),
        }
    };
    let mut rows = Vec::new();
    for &(lo, hi) in &ant.intervals {
        let xs = interval_samples(lo, hi, args.samples);
        let fams = xs.iter().map(|&x| family_at(x)).collect::<Result<Vec<_>, _>>()?;
        let checked = with_threads(threads, || {
            use rayon::prelude::*;
            fams.par_iter()
                .filter(|f| !f.is_degenerate())
                .map(|f| {
                    let pair = match f {
                        Family::General(p) => p.free_critical_pair(),
                        Family::Behl(p) => p.free_critical_pair().ok(),
                    };
                    let off = pair.map_or(f64::NAN, |(p, m)| (p.norm() - 1.0).abs().max((m.norm() - 1.0).abs()));
                    (off, classify_family(f, &cfg).outcome == Outcome::Undecided)
                })
                .collect::<Vec<_>>()
        })?;
        let worst = checked.iter().map(|c| c.0).fold(0.0, f64::max);
        let undecided = checked.iter().filter(|c| c.1).count();
        rows.push(serde_json::json!({
            "low": lo.to_string(),
            "high": hi.to_string(),
            "samples": checked.len(),
            "max_unit_circle_offset": worst,
            "undecided": undecided,
        }));
    }
    if args.json {
        let v = serde_json::json!({ "plane": ant.plane, "intervals": rows });
        println!("{}", serde_json::to_string_pretty(&v).expect("serializes"));
        return Ok(());
    }
    println!("antenna intervals {label}:");
    for r in &rows {
        print!("  ({}, {})", r["low"].as_str().unwrap_or_default(), r["high"].as_str().unwrap_or_default());
        if args.samples > 0 {
            print!(
                "  {} sampled, max ||c±| - 1| {:.2e}, {} undecided",
                r["samples"],
                r["max_unit_circle_offset"].as_f64().unwrap_or(f64::NAN),
                r["undecided"]
            );
        }
        println!();
    }
    Ok(())
}
