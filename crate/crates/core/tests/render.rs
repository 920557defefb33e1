//! Whole-grid properties of the renderer.

use std::collections::BTreeSet;

use num_complex::Complex64;

use expograph::basicfamily::FamilyParams;
use expograph::imageio::{png_bytes, read_png};
use expograph::render::{colorize, render_scene, Status};
use expograph::scene::{Figure, Mode, Palette, PolySpec, Scene, Tolerances, Viewport};

fn scene(poly: PolySpec, mode: Mode, center: Complex64, width: f64, cols: u32, rows: u32) -> Scene {
    Scene {
        poly,
        mode,
        viewport: Viewport { center, width, cols, rows },
        tolerances: Tolerances { max_iter: 100, ..Tolerances::default() },
        palette: Palette::Hue,
    }
}

fn p2_newton(cols: u32, rows: u32) -> Scene {
    scene(PolySpec::PartialSum(2), Mode::Basins(FamilyParams::newton()), Complex64::new(-1.0, 0.0), 4.0, cols, rows)
}

#[test]
fn newton_basins_of_p2_are_half_planes() {
    let s = p2_newton(96, 96);
    let r = render_scene(&s, 3).unwrap();
    let upper = r.roots.roots.iter().position(|z| z.im > 0.0).unwrap();
    for row in 0..96 {
        for col in 0..96 {
            let z = s.viewport.pixel_to_complex(col, row);
            let out = r.grid.get(col, row);
            assert_eq!(out.status, Status::Converged, "pixel {z}");
            assert_eq!(out.root() == Some(upper), z.im > 0.0, "pixel {z}");
        }
    }
}

// Power-of-two rows and a real center make mirrored pixel centers exact
// conjugates, so the outcomes must mirror exactly.
fn assert_conjugate_symmetric(s: &Scene) {
    let r = render_scene(s, 2).unwrap();
    let roots = &r.roots.roots;
    let conj: Vec<usize> = roots
        .iter()
        .map(|z| roots.iter().position(|w| *w == z.conj()).expect("roots come in exact conjugate pairs"))
        .collect();
    let (cols, rows) = (s.viewport.cols, s.viewport.rows);
    for row in 0..rows {
        for col in 0..cols {
            let a = r.grid.get(col, row);
            let b = r.grid.get(col, rows - 1 - row);
            assert_eq!(s.viewport.pixel_to_complex(col, row), s.viewport.pixel_to_complex(col, rows - 1 - row).conj());
            assert_eq!(a.status, b.status);
            assert_eq!(a.iterations, b.iterations);
            assert_eq!(a.root().map(|i| conj[i]), b.root());
        }
    }
}

#[test]
fn real_polynomials_render_conjugate_symmetric_grids() {
    assert_conjugate_symmetric(&scene(
        PolySpec::PartialSum(5),
        Mode::Basins(FamilyParams::newton()),
        Complex64::new(-0.5, 0.0),
        8.0,
        64,
        64,
    ));
    assert_conjugate_symmetric(&scene(
        PolySpec::PartialSum(6),
        Mode::Basins(FamilyParams::halley()),
        Complex64::new(0.0, 0.0),
        16.0,
        48,
        32,
    ));
    assert_conjugate_symmetric(&scene(
        PolySpec::PartialSum(4),
        Mode::VoronoiSequence { m_max: 30 },
        Complex64::new(0.0, 0.0),
        8.0,
        64,
        64,
    ));
}

#[test]
fn grids_do_not_depend_on_worker_count() {
    for s in [Figure::Fig3.scene(4), Figure::Fig4.scene(3)] {
        let mut s = s;
        s.viewport.cols = 90;
        s.viewport.rows = 70;
        let base = render_scene(&s, 1).unwrap();
        for workers in [2, 3, 7, 16] {
            let other = render_scene(&s, workers).unwrap();
            assert_eq!(other.grid.to_bytes(), base.grid.to_bytes(), "workers={workers}");
        }
    }
}

#[test]
fn rendered_image_survives_png_round_trip() {
    let s = p2_newton(64, 48);
    let r = render_scene(&s, 1).unwrap();
    let img = colorize(&r.grid, r.roots.len(), s.palette);
    let back = read_png(&png_bytes(&img)).unwrap();
    assert_eq!(back, img);
}

#[test]
fn p2_newton_image_has_two_hues_and_black_axis() {
    // An odd row count puts the middle row on the real axis, where Newton
    // orbits stay real and never settle.
    let mut s = p2_newton(65, 65);
    s.palette = Palette::HueFlat;
    let r = render_scene(&s, 1).unwrap();
    let img = colorize(&r.grid, r.roots.len(), s.palette);
    let colors: BTreeSet<[u8; 3]> = img.pixels().chunks_exact(3).map(|p| [p[0], p[1], p[2]]).collect();
    let expected: BTreeSet<[u8; 3]> = [[0, 0, 0], [255, 0, 0], [0, 255, 255]].into();
    assert_eq!(colors, expected);
    for col in 0..65 {
        assert_eq!(img.pixel(col, 32), [0, 0, 0]);
    }

    s.palette = Palette::Hue;
    let img = colorize(&r.grid, r.roots.len(), s.palette);
    for p in img.pixels().chunks_exact(3) {
        let red = p[1] == 0 && p[2] == 0;
        let cyan = p[0] == 0 && p[1] == p[2];
        assert!(red || cyan, "{p:?}");
    }
}

#[test]
fn fig4_cells_cover_the_four_roots_for_n2() {
    let mut s = Figure::Fig4.scene(2);
    s.viewport.cols = 80;
    s.viewport.rows = 80;
    let r = render_scene(&s, 2).unwrap();
    let hit: BTreeSet<usize> = r.grid.pixels.iter().filter_map(|p| p.root()).collect();
    assert_eq!(hit, (0..4).collect());
    assert_eq!(r.grid.count(Status::Converged), r.grid.pixels.len());
}
