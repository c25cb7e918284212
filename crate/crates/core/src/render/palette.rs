use super::{Cell, PlaneGrid};
use crate::orbit::Outcome;
use image::RgbImage;
use serde::{Deserialize, Serialize};

pub type Rgb = [u8; 3];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColorMode {
    /// Escape pixels along the ramp by iteration count, the rest black.
    Parameter,
    /// Blue towards 0, red towards ∞, black otherwise.
    Dynamical,
}

/// Piecewise-linear color ramps over the normalized iteration count.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Palette {
    pub escape_ramp: Vec<(f64, Rgb)>,
    pub non_escape: Rgb,
    pub to_zero_ramp: Vec<(f64, Rgb)>,
    pub to_inf_ramp: Vec<(f64, Rgb)>,
}

impl Default for Palette {
    /// Pale blue → green → yellow → red for escape times; blue and red
    /// basins that darken with slower convergence.
    fn default() -> Self {
        Palette {
            escape_ramp: vec![
                (0.0, [200, 220, 255]),
                (1.0 / 3.0, [0, 160, 60]),
                (2.0 / 3.0, [255, 220, 0]),
                (1.0, [200, 0, 0]),
            ],
            non_escape: [0, 0, 0],
            to_zero_ramp: vec![(0.0, [150, 190, 255]), (1.0, [0, 0, 110])],
            to_inf_ramp: vec![(0.0, [255, 160, 150]), (1.0, [110, 0, 0])],
        }
    }
}

impl Palette {
    pub fn grayscale() -> Self {
        Palette {
            escape_ramp: vec![(0.0, [255, 255, 255]), (1.0, [64, 64, 64])],
            non_escape: [0, 0, 0],
            to_zero_ramp: vec![(0.0, [230, 230, 230]), (1.0, [120, 120, 120])],
            to_inf_ramp: vec![(0.0, [200, 200, 200]), (1.0, [80, 80, 80])],
        }
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "default" => Some(Palette::default()),
            "grayscale" => Some(Palette::grayscale()),
            _ => None,
        }
    }

    pub fn names() -> &'static [&'static str] {
        &["default", "grayscale"]
    }
}

/// Interpolates the ramp at `t ∈ [0, 1]`; stops hit their colors exactly.
pub(crate) fn ramp(stops: &[(f64, Rgb)], t: f64) -> Rgb {
    let t = t.clamp(0.0, 1.0);
    let last = stops.len() - 1;
    if t >= stops[last].0 {
        return stops[last].1;
    }
    let seg = stops.windows(2).position(|w| t < w[1].0).unwrap_or(last - 1);
    let ((t0, c0), (t1, c1)) = (stops[seg], stops[seg + 1]);
    let u = (t - t0) / (t1 - t0);
    let mut out = [0u8; 3];
    for ch in 0..3 {
        let v = c0[ch] as f64 + (c1[ch] as f64 - c0[ch] as f64) * u;
        out[ch] = v.round().clamp(0.0, 255.0) as u8;
    }
    out
}

/// Iteration `1` maps to 0 and `max_iter` to 1.
fn fraction(iterations: u32, max_iter: u32) -> f64 {
    if max_iter <= 1 {
        return 0.0;
    }
    (iterations.max(1) - 1) as f64 / (max_iter - 1) as f64
}

fn cell_color(cell: &Cell, max_iter: u32, palette: &Palette, mode: ColorMode) -> Rgb {
    let t = fraction(cell.iterations, max_iter);
    match (mode, cell.outcome) {
        (_, Outcome::Undecided | Outcome::ToStrange(_)) => palette.non_escape,
        (ColorMode::Parameter, _) => ramp(&palette.escape_ramp, t),
        (ColorMode::Dynamical, Outcome::ToZero) => ramp(&palette.to_zero_ramp, t),
        (ColorMode::Dynamical, Outcome::ToInfinity) => ramp(&palette.to_inf_ramp, t),
    }
}

pub fn colorize(grid: &PlaneGrid, palette: &Palette, mode: ColorMode) -> RgbImage {
    let (w, h) = (grid.spec.width as u32, grid.spec.height as u32);
    let mut img = RgbImage::new(w, h);
    for (idx, cell) in grid.cells.iter().enumerate() {
        let (i, j) = (idx as u32 % w, idx as u32 / w);
        img.put_pixel(i, j, image::Rgb(cell_color(cell, grid.max_iter, palette, mode)));
    }
    img
}
