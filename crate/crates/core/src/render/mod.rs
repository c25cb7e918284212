//! Parameter and dynamical planes: pixel grids of orbit classifications,
//! their coloring, and their file formats.

mod io;
mod palette;

pub use io::{
    decode_ppm, encode_ppm, read_grid, read_ppm, write_grid, write_image, write_summary_csv, ImageFormat,
    GRID_CELL_BYTES, GRID_HEADER_BYTES, GRID_MAGIC, GRID_VERSION,
};
pub use palette::{colorize, ColorMode, Palette, Rgb};

use crate::error::{Error, Result};
use crate::operator::{BehlParams, Family, GeneralParams};
use crate::orbit::{classify_family, classify_seed, EscapeConfig, KnownAttractor, OrbitClassification, Outcome};
use crate::sphere::ExtendedComplex;
use crate::C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Window {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self> {
        let w = Window { x_min, x_max, y_min, y_max };
        if !(x_min < x_max && y_min < y_max) || ![x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidArgument(format!("invalid window {w:?}")));
        }
        Ok(w)
    }

    pub fn square(half: f64) -> Self {
        Window {
            x_min: -half,
            x_max: half,
            y_min: -half,
            y_max: half,
        }
    }

    /// Center of pixel `(i, j)`, row `j = 0` at the top. Written as
    /// midpoint plus signed offset so that mirrored pixels of a symmetric
    /// window get exactly negated coordinates.
    pub fn pixel_center(&self, i: usize, j: usize, spec: &GridSpec) -> C64 {
        let (w, h) = (spec.width as f64, spec.height as f64);
        let t = (2.0 * i as f64 + 1.0 - w) / w;
        let s = (2.0 * j as f64 + 1.0 - h) / h;
        C64::new(
            0.5 * ((self.x_min + self.x_max) + (self.x_max - self.x_min) * t),
            0.5 * ((self.y_min + self.y_max) - (self.y_max - self.y_min) * s),
        )
    }

    pub fn pixel_size(&self, spec: &GridSpec) -> (f64, f64) {
        (
            (self.x_max - self.x_min) / spec.width as f64,
            (self.y_max - self.y_min) / spec.height as f64,
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub width: usize,
    pub height: usize,
}

impl GridSpec {
    pub fn new(width: usize, height: usize) -> Result<Self> {
        if width < 2 || height < 2 || width > u32::MAX as usize || height > u32::MAX as usize {
            return Err(Error::InvalidArgument(format!(
                "grid must be at least 2×2, got {width}×{height}"
            )));
        }
        Ok(GridSpec { width, height })
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub outcome: Outcome,
    pub iterations: u32,
    pub degenerate: bool,
}

impl Cell {
    /// Whether the pixel is drawn black: no escape to a root was observed.
    pub fn is_black(&self) -> bool {
        matches!(self.outcome, Outcome::Undecided | Outcome::ToStrange(_))
    }
}

impl From<OrbitClassification> for Cell {
    fn from(c: OrbitClassification) -> Self {
        Cell {
            outcome: c.outcome,
            iterations: c.iterations,
            degenerate: c.degenerate,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlaneKind {
    Parameter,
    Dynamical,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaneGrid {
    pub kind: PlaneKind,
    pub window: Window,
    pub spec: GridSpec,
    pub max_iter: u32,
    /// Row-major, top row first.
    pub cells: Vec<Cell>,
}

impl PlaneGrid {
    pub fn cell(&self, i: usize, j: usize) -> &Cell {
        &self.cells[j * self.spec.width + i]
    }

    pub fn point(&self, i: usize, j: usize) -> C64 {
        self.window.pixel_center(i, j, &self.spec)
    }

    /// `(i, j, point, cell)` for every pixel in row-major order.
    pub fn pixels(&self) -> impl Iterator<Item = (usize, usize, C64, &Cell)> {
        let w = self.spec.width;
        self.cells
            .iter()
            .enumerate()
            .map(move |(idx, c)| (idx % w, idx / w, self.point(idx % w, idx / w), c))
    }

    pub fn counts(&self) -> OutcomeCounts {
        let mut c = OutcomeCounts::default();
        for cell in &self.cells {
            match cell.outcome {
                Outcome::ToZero => c.to_zero += 1,
                Outcome::ToInfinity => c.to_infinity += 1,
                Outcome::ToStrange(_) => c.to_strange += 1,
                Outcome::Undecided => c.undecided += 1,
            }
            if cell.degenerate {
                c.degenerate += 1;
            }
        }
        c
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeCounts {
    pub to_zero: usize,
    pub to_infinity: usize,
    pub to_strange: usize,
    pub undecided: usize,
    pub degenerate: usize,
}

/// Which family a parameter plane ranges over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilySpec {
    Behl,
    General { n: u32, k: u32 },
}

impl FamilySpec {
    pub fn at(&self, parameter: C64) -> Result<Family> {
        Ok(match *self {
            FamilySpec::Behl => Family::Behl(BehlParams::new(parameter)?),
            FamilySpec::General { n, k } => Family::General(GeneralParams::new(parameter, n, k)?),
        })
    }
}

fn compute_rows<F>(spec: &GridSpec, threads: Option<usize>, f: F) -> Result<Vec<Cell>>
where
    F: Fn(usize, usize) -> Cell + Sync,
{
    let run = || -> Vec<Cell> {
        let blank = Cell {
            outcome: Outcome::Undecided,
            iterations: 0,
            degenerate: false,
        };
        let mut cells = vec![blank; spec.len()];
        cells
            .par_chunks_mut(spec.width)
            .enumerate()
            .for_each(|(j, row)| {
                for (i, cell) in row.iter_mut().enumerate() {
                    *cell = f(i, j);
                }
            });
        cells
    };
    match threads {
        None => Ok(run()),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t.max(1))
                .build()
                .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
            Ok(pool.install(run))
        }
    }
}

/// Classifies the free critical orbit at every pixel center. `threads`
/// caps the worker count; results do not depend on it.
pub fn render_parameter_plane(
    family: FamilySpec,
    window: &Window,
    spec: &GridSpec,
    cfg: &EscapeConfig,
    threads: Option<usize>,
) -> Result<PlaneGrid> {
    cfg.validate()?;
    if let FamilySpec::General { n, k } = family {
        GeneralParams::new(C64::new(0.5, 0.0), n, k)?;
    }
    let cells = compute_rows(spec, threads, |i, j| {
        let p = window.pixel_center(i, j, spec);
        match family.at(p) {
            Ok(fam) => classify_family(&fam, cfg).into(),
            Err(_) => Cell {
                outcome: Outcome::Undecided,
                iterations: 0,
                degenerate: true,
            },
        }
    })?;
    Ok(PlaneGrid {
        kind: PlaneKind::Parameter,
        window: *window,
        spec: *spec,
        max_iter: cfg.max_iter,
        cells,
    })
}

/// Classifies the orbit of every pixel center under one map.
pub fn render_dynamical_plane(
    map: &Family,
    window: &Window,
    spec: &GridSpec,
    cfg: &EscapeConfig,
    attractors: &[KnownAttractor],
    threads: Option<usize>,
) -> Result<PlaneGrid> {
    cfg.validate()?;
    let cells = compute_rows(spec, threads, |i, j| {
        let z = ExtendedComplex::finite(window.pixel_center(i, j, spec));
        classify_seed(map, z, cfg, attractors).into()
    })?;
    Ok(PlaneGrid {
        kind: PlaneKind::Dynamical,
        window: *window,
        spec: *spec,
        max_iter: cfg.max_iter,
        cells,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentStats {
    pub pixels: usize,
    /// Largest distance between two pixel centers of the component.
    pub diameter: f64,
    pub touches_edge: bool,
}

/// The 4-connected component of pixels satisfying `pred` that contains
/// `(i0, j0)`, or `None` if that pixel fails `pred`.
pub fn connected_component(
    grid: &PlaneGrid,
    i0: usize,
    j0: usize,
    pred: impl Fn(&Cell) -> bool,
) -> Option<ComponentStats> {
    let (w, h) = (grid.spec.width, grid.spec.height);
    if !pred(grid.cell(i0, j0)) {
        return None;
    }
    let mut seen = vec![false; w * h];
    let mut stack = vec![(i0, j0)];
    seen[j0 * w + i0] = true;
    let mut members = Vec::new();
    let mut touches_edge = false;
    while let Some((i, j)) = stack.pop() {
        members.push(grid.point(i, j));
        touches_edge |= i == 0 || j == 0 || i == w - 1 || j == h - 1;
        let mut push = |ni: usize, nj: usize| {
            let idx = nj * w + ni;
            if !seen[idx] && pred(&grid.cells[idx]) {
                seen[idx] = true;
                stack.push((ni, nj));
            }
        };
        if i > 0 {
            push(i - 1, j);
        }
        if i + 1 < w {
            push(i + 1, j);
        }
        if j > 0 {
            push(i, j - 1);
        }
        if j + 1 < h {
            push(i, j + 1);
        }
    }
    Some(ComponentStats {
        pixels: members.len(),
        diameter: diameter(&members),
        touches_edge,
    })
}

/// Diameter of a point set via its convex hull (monotone chain).
fn diameter(points: &[C64]) -> f64 {
    let mut pts: Vec<(f64, f64)> = points.iter().map(|p| (p.re, p.im)).collect();
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite pixel centers"));
    pts.dedup();
    if pts.len() < 3 {
        return pts
            .first()
            .zip(pts.last())
            .map_or(0.0, |(a, b)| ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt());
    }
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &(f64, f64)>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    let mut best = 0.0f64;
    for (a, p) in hull.iter().enumerate() {
        for q in &hull[a + 1..] {
            best = best.max((p.0 - q.0).hypot(p.1 - q.1));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pixel_centers() {
        let w = Window::new(-2.0, 2.0, -1.0, 1.0).unwrap();
        let s = GridSpec::new(4, 5).unwrap();
        let (dx, dy) = w.pixel_size(&s);
        let p = w.pixel_center(0, 0, &s);
        assert!((p - C64::new(-2.0 + dx / 2.0, 1.0 - dy / 2.0)).norm() < 1e-15);
        assert_eq!(w.pixel_center(1, 2, &s).re, -w.pixel_center(2, 2, &s).re);
        assert_eq!(w.pixel_center(1, 2, &s).im, 0.0);
    }

    #[test]
    fn monomial_dynamical_plane_splits_at_the_circle() {
        let fam = Family::General(GeneralParams::new(C64::new(0.0, 0.0), 4, 1).unwrap());
        let w = Window::square(2.0);
        let s = GridSpec::new(41, 41).unwrap();
        let g = render_dynamical_plane(&fam, &w, &s, &EscapeConfig::default(), &[], Some(1)).unwrap();
        for (_, _, z, c) in g.pixels() {
            if z.norm() < 0.99 {
                assert_eq!(c.outcome, Outcome::ToZero, "{z}");
            } else if z.norm() > 1.01 {
                assert_eq!(c.outcome, Outcome::ToInfinity, "{z}");
            }
        }
    }

    #[test]
    fn hull_diameter() {
        let pts: Vec<C64> = (0..10)
            .flat_map(|i| (0..10).map(move |j| C64::new(i as f64, j as f64)))
            .collect();
        assert!((diameter(&pts) - 9.0 * 2f64.sqrt()).abs() < 1e-12);
    }
}
