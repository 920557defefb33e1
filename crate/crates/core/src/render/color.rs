use super::{OutcomeGrid, Status};
use crate::imageio::ImageBuffer;
use crate::scene::Palette;

/// Iteration count at which shading reaches black.
pub const BRIGHTNESS_CAP: u32 = 64;

/// HSV to 8-bit RGB with hue in degrees.
pub fn hsv_to_rgb(hue: f64, saturation: f64, value: f64) -> [u8; 3] {
    let h = hue.rem_euclid(360.0) / 60.0;
    let sector = h.floor();
    let f = h - sector;
    let p = value * (1.0 - saturation);
    let q = value * (1.0 - saturation * f);
    let t = value * (1.0 - saturation * (1.0 - f));
    let (r, g, b) = match sector as u32 {
        0 => (value, t, p),
        1 => (q, value, p),
        2 => (p, value, t),
        3 => (p, q, value),
        4 => (t, p, value),
        _ => (value, p, q),
    };
    let byte = |x: f64| (x * 255.0).round().clamp(0.0, 255.0) as u8;
    [byte(r), byte(g), byte(b)]
}

/// Color a grid: one hue per root spread evenly around the circle,
/// MaxIter and Singular black, Diverged white.
pub fn colorize(grid: &OutcomeGrid, degree: usize, palette: Palette) -> ImageBuffer {
    let degree = degree.max(1) as f64;
    let mut pixels = Vec::with_capacity(grid.pixels.len() * 3);
    for px in &grid.pixels {
        let rgb = match px.status {
            Status::Converged => {
                let hue = 360.0 * px.root_index as f64 / degree;
                let value = match palette {
                    Palette::Hue => {
                        let it = (px.iterations as u32).min(BRIGHTNESS_CAP);
                        1.0 - it as f64 / BRIGHTNESS_CAP as f64
                    }
                    Palette::HueFlat => 1.0,
                };
                hsv_to_rgb(hue, 1.0, value)
            }
            Status::MaxIter | Status::Singular => [0, 0, 0],
            Status::Diverged => [255, 255, 255],
        };
        pixels.extend_from_slice(&rgb);
    }
    ImageBuffer::new(grid.cols, grid.rows, pixels).expect("colorize produces a full buffer")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::render::PixelOutcome;

    fn grid(pixels: Vec<PixelOutcome>) -> OutcomeGrid {
        OutcomeGrid { cols: pixels.len() as u32, rows: 1, pixels }
    }

    #[test]
    fn all_max_iter_is_black() {
        let img = colorize(&grid(vec![PixelOutcome::failed(Status::MaxIter, 9); 5]), 3, Palette::Hue);
        assert!(img.pixels().iter().all(|&b| b == 0));
    }

    #[test]
    fn single_root_zero_iterations_is_full_red() {
        let img = colorize(&grid(vec![PixelOutcome::converged(0, 0); 4]), 1, Palette::Hue);
        assert_eq!(img.pixels(), &[255, 0, 0].repeat(4)[..]);
    }

    #[test]
    fn status_colors_and_shading() {
        let g = grid(vec![
            PixelOutcome::failed(Status::Diverged, 3),
            PixelOutcome::failed(Status::Singular, 3),
            PixelOutcome::converged(1, 32),
            PixelOutcome::converged(1, 500),
        ]);
        let img = colorize(&g, 2, Palette::Hue);
        assert_eq!(&img.pixels()[0..3], &[255, 255, 255]);
        assert_eq!(&img.pixels()[3..6], &[0, 0, 0]);
        // hue 180 at half brightness
        assert_eq!(&img.pixels()[6..9], &[0, 128, 128]);
        assert_eq!(&img.pixels()[9..12], &[0, 0, 0]);
        let flat = colorize(&g, 2, Palette::HueFlat);
        assert_eq!(&flat.pixels()[9..12], &[0, 255, 255]);
    }

    #[test]
    fn hsv_primaries() {
        assert_eq!(hsv_to_rgb(0.0, 1.0, 1.0), [255, 0, 0]);
        assert_eq!(hsv_to_rgb(120.0, 1.0, 1.0), [0, 255, 0]);
        assert_eq!(hsv_to_rgb(240.0, 1.0, 1.0), [0, 0, 255]);
        assert_eq!(hsv_to_rgb(360.0, 1.0, 1.0), [255, 0, 0]);
    }
}
