use rootdyn::orbit::{known_attractors, EscapeConfig, Outcome};
use rootdyn::render::*;
use rootdyn::{Family, GeneralParams, C64};
use sha2::{Digest, Sha256};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn general(a: f64, n: u32, k: u32) -> Family {
    Family::General(GeneralParams::new(c(a, 0.0), n, k).unwrap())
}

fn param_grid(family: FamilySpec, window: Window, w: usize, h: usize, threads: Option<usize>) -> PlaneGrid {
    render_parameter_plane(family, &window, &GridSpec::new(w, h).unwrap(), &EscapeConfig::default(), threads).unwrap()
}

fn dyn_grid(fam: &Family, window: Window, res: usize) -> PlaneGrid {
    let at = known_attractors(fam);
    render_dynamical_plane(fam, &window, &GridSpec::new(res, res).unwrap(), &EscapeConfig::default(), &at, None)
        .unwrap()
}

#[test]
fn ppm_bytes_for_two_pixels() {
    let img = image::RgbImage::from_raw(2, 1, vec![255, 0, 0, 0, 0, 0]).unwrap();
    let mut expected = b"P6\n2 1\n255\n".to_vec();
    expected.extend_from_slice(&[0xff, 0, 0, 0, 0, 0]);
    assert_eq!(encode_ppm(&img), expected);
}

#[test]
fn image_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let grid = param_grid(FamilySpec::General { n: 4, k: 1 }, Window::square(3.2), 37, 23, None);
    let img = colorize(&grid, &Palette::default(), ColorMode::Parameter);
    let ppm = dir.path().join("plane.ppm");
    write_image(&img, &ppm, ImageFormat::Ppm).unwrap();
    assert_eq!(read_ppm(&ppm).unwrap(), img);
    let png = dir.path().join("plane.png");
    write_image(&img, &png, ImageFormat::Png).unwrap();
    assert_eq!(image::open(&png).unwrap().to_rgb8(), img);
}

#[test]
fn unwritable_path_reports_it() {
    let img = image::RgbImage::new(2, 2);
    let err = write_image(&img, std::path::Path::new("/nonexistent-dir/x.ppm"), ImageFormat::Ppm).unwrap_err();
    assert!(err.to_string().contains("/nonexistent-dir/x.ppm"), "{err}");
}

#[test]
fn grid_round_trip_and_size() {
    let dir = tempfile::tempdir().unwrap();
    let grid = param_grid(FamilySpec::General { n: 4, k: 1 }, Window::square(3.2), 301, 301, None);
    let path = dir.path().join("plane.grid");
    write_grid(&grid, &path).unwrap();
    let len = std::fs::metadata(&path).unwrap().len() as usize;
    assert_eq!(len, GRID_HEADER_BYTES + 301 * 301 * GRID_CELL_BYTES);
    assert_eq!(read_grid(&path).unwrap(), grid);

    let fam = general(5.0 / 3.0, 4, 1);
    let dgrid = dyn_grid(&fam, Window::square(1.5), 31);
    assert!(dgrid.cells.iter().any(|c| matches!(c.outcome, Outcome::ToStrange(_))));
    write_grid(&dgrid, &path).unwrap();
    assert_eq!(read_grid(&path).unwrap(), dgrid);
}

#[test]
fn foreign_grid_header_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.grid");
    let grid = param_grid(FamilySpec::Behl, Window::square(1.0), 4, 4, None);
    write_grid(&grid, &path).unwrap();
    let mut bytes = std::fs::read(&path).unwrap();
    bytes[8] = GRID_VERSION + 1;
    std::fs::write(&path, &bytes).unwrap();
    assert!(read_grid(&path).unwrap_err().to_string().contains("version"));
    bytes[0] = b'X';
    std::fs::write(&path, &bytes).unwrap();
    assert!(read_grid(&path).unwrap_err().to_string().contains("version"));
}

#[test]
fn all_undecided_grid_is_black() {
    let mut grid = param_grid(FamilySpec::Behl, Window::square(1.0), 5, 4, None);
    for cell in &mut grid.cells {
        cell.outcome = Outcome::Undecided;
    }
    for mode in [ColorMode::Parameter, ColorMode::Dynamical] {
        let img = colorize(&grid, &Palette::default(), mode);
        assert!(img.pixels().all(|p| p.0 == [0, 0, 0]));
    }
}

#[test]
fn ramp_endpoints_are_exact() {
    let mut grid = param_grid(FamilySpec::Behl, Window::square(1.0), 2, 2, None);
    let max = grid.max_iter;
    for (cell, (outcome, it)) in grid.cells.iter_mut().zip([
        (Outcome::ToZero, 1),
        (Outcome::ToInfinity, max),
        (Outcome::ToZero, max),
        (Outcome::ToInfinity, 1),
    ]) {
        cell.outcome = outcome;
        cell.iterations = it;
    }
    let pal = Palette::default();
    let img = colorize(&grid, &pal, ColorMode::Parameter);
    let first = pal.escape_ramp[0].1;
    let last = pal.escape_ramp.last().unwrap().1;
    assert_eq!(img.get_pixel(0, 0).0, first);
    assert_eq!(img.get_pixel(1, 0).0, last);
    assert_eq!(img.get_pixel(0, 1).0, last);
    assert_eq!(img.get_pixel(1, 1).0, first);
    let dynamic = colorize(&grid, &pal, ColorMode::Dynamical);
    assert_eq!(dynamic.get_pixel(0, 0).0, pal.to_zero_ramp[0].1);
    assert_eq!(dynamic.get_pixel(1, 0).0, pal.to_inf_ramp.last().unwrap().1);
}

#[test]
fn recoloring_is_byte_identical() {
    let grid = param_grid(FamilySpec::General { n: 4, k: 1 }, Window::square(3.2), 61, 61, None);
    let a = encode_ppm(&colorize(&grid, &Palette::default(), ColorMode::Parameter));
    let b = encode_ppm(&colorize(&grid, &Palette::default(), ColorMode::Parameter));
    assert_eq!(a, b);
}

/// Frozen hash of a small Behl parameter-plane grid file. Any change to
/// the classification or the file layout shows up here.
#[test]
fn golden_behl_grid() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("golden.grid");
    let mut hashes = Vec::new();
    for threads in [1, 3, 8] {
        let grid = param_grid(FamilySpec::Behl, Window::new(-50.0, 10.0, -15.0, 15.0).unwrap(), 121, 61, Some(threads));
        write_grid(&grid, &path).unwrap();
        hashes.push(format!("{:x}", Sha256::digest(std::fs::read(&path).unwrap())));
    }
    assert!(hashes.windows(2).all(|w| w[0] == w[1]));
    assert_eq!(hashes[0], GOLDEN_BEHL_GRID_SHA256);
}

const GOLDEN_BEHL_GRID_SHA256: &str = "f7d95d844cf50b9db7c7b04e2659c3fc0934aeb8c97324500a1e1c5ebbdb0fd5";

#[test]
fn threads_do_not_change_the_grid() {
    let w = Window::square(3.2);
    let one = param_grid(FamilySpec::General { n: 3, k: 5 }, w, 97, 89, Some(1));
    for t in [2, 4, 8] {
        assert_eq!(param_grid(FamilySpec::General { n: 3, k: 5 }, w, 97, 89, Some(t)), one);
    }
}

#[test]
fn parameter_plane_is_symmetric_when_degree_is_odd() {
    for (n, k) in [(4, 1), (3, 2)] {
        let grid = param_grid(FamilySpec::General { n, k }, Window::square(3.2), 101, 101, None);
        for j in 0..101 {
            for i in 0..101 {
                let (x, y) = (grid.cell(i, j), grid.cell(100 - i, 100 - j));
                assert_eq!(x.outcome, y.outcome, "({n},{k}) at {}", grid.point(i, j));
                assert_eq!(x.iterations, y.iterations);
            }
        }
    }
}

#[test]
fn first_pixel_center() {
    let w = Window::new(-50.0, 10.0, -15.0, 15.0).unwrap();
    let s = GridSpec::new(3001, 1501).unwrap();
    let (dx, dy) = w.pixel_size(&s);
    let p = w.pixel_center(0, 0, &s);
    assert!((p.re - (-50.0 + dx / 2.0)).abs() < 1e-12);
    assert!((p.im - (15.0 - dy / 2.0)).abs() < 1e-12);
}

#[test]
fn behl_infinite_antenna_is_black() {
    let grid = param_grid(FamilySpec::Behl, Window::new(-50.0, 10.0, -15.0, 15.0).unwrap(), 301, 151, None);
    let edge = -7.0 - 2.0 * 10f64.sqrt();
    let row: Vec<_> = (0..301).map(|i| (grid.point(i, 75), *grid.cell(i, 75))).collect();
    assert!(row.iter().all(|(p, _)| p.im == 0.0));
    for (p, cell) in row.iter().filter(|(p, _)| p.re < edge) {
        assert_eq!(cell.outcome, Outcome::Undecided, "b = {p}");
    }
}

#[test]
fn zpm_region_is_mostly_undecided() {
    let grid = param_grid(
        FamilySpec::General { n: 4, k: 1 },
        Window::new(2.05, 2.4, -0.05, 0.05).unwrap(),
        301,
        301,
        None,
    );
    let counts = grid.counts();
    assert!(counts.undecided as f64 >= 0.95 * 301.0 * 301.0, "{counts:?}");
}

#[test]
fn attracting_one_leaves_a_black_region() {
    let grid = dyn_grid(&general(5.0 / 3.0, 4, 1), Window::new(-1.2, 2.0, -1.6, 1.6).unwrap(), 121);
    let counts = grid.counts();
    assert!(counts.to_zero > 0 && counts.to_infinity > 0, "{counts:?}");
    let near_one: Vec<_> = grid.pixels().filter(|(_, _, z, _)| (z - 1.0).norm() < 0.05).collect();
    assert!(!near_one.is_empty());
    assert!(near_one.iter().all(|(_, _, _, c)| c.is_black()));
}

#[test]
fn pole_preimages_punch_holes_in_the_zero_basin() {
    let grid = dyn_grid(&general(3.0, 4, 1), Window::square(1.1), 201);
    // the pole 1/3 itself goes to ∞ although it sits inside the blue region
    let (i, j) = grid
        .pixels()
        .min_by(|a, b| (a.2 - 1.0 / 3.0).norm().total_cmp(&(b.2 - 1.0 / 3.0).norm()))
        .map(|(i, j, _, _)| (i, j))
        .unwrap();
    assert_eq!(grid.cell(i, j).outcome, Outcome::ToInfinity);
    let zero = connected_component(&grid, 100, 100, |c| c.outcome == Outcome::ToZero).unwrap();
    let inf_hole = connected_component(&grid, i, j, |c| c.outcome == Outcome::ToInfinity).unwrap();
    assert!(!inf_hole.touches_edge && zero.pixels > 100);
}

#[test]
fn summary_csv_lists_counts() {
    let dir = tempfile::tempdir().unwrap();
    let grid = param_grid(FamilySpec::General { n: 4, k: 1 }, Window::square(3.2), 21, 21, None);
    let path = dir.path().join("counts.csv");
    write_summary_csv(&grid.counts(), &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "to_zero,to_infinity,to_strange,undecided,degenerate,total");
    let total: usize = lines.next().unwrap().rsplit(',').next().unwrap().parse().unwrap();
    assert_eq!(total, 441);
}
