//! Image buffers and their PPM/PNG encodings.

use std::io::{self, Write};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ImageError {
    #[error("pixel buffer has {actual} bytes, expected {expected} for {width}x{height} RGB")]
    BadLength { width: u32, height: u32, expected: usize, actual: usize },
    #[error("i/o failure: {0}")]
    Io(#[from] io::Error),
    #[error("png encoding failed: {0}")]
    Png(#[from] png::EncodingError),
    #[error("png decoding failed: {0}")]
    PngDecode(#[from] png::DecodingError),
    #[error("unsupported png layout: {0}")]
    Unsupported(String),
}

/// Row-major 8-bit RGB image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageBuffer {
    width: u32,
    height: u32,
    pixels: Vec<u8>,
}

impl ImageBuffer {
    pub fn new(width: u32, height: u32, pixels: Vec<u8>) -> Result<Self, ImageError> {
        let expected = width as usize * height as usize * 3;
        if pixels.len() != expected {
            return Err(ImageError::BadLength { width, height, expected, actual: pixels.len() });
        }
        Ok(ImageBuffer { width, height, pixels })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn pixel(&self, x: u32, y: u32) -> [u8; 3] {
        let i = (y as usize * self.width as usize + x as usize) * 3;
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }
}

/// Binary PPM (P6, maxval 255).
pub fn write_ppm<W: Write>(img: &ImageBuffer, mut sink: W) -> Result<(), ImageError> {
    write!(sink, "P6\n{} {}\n255\n", img.width, img.height)?;
    sink.write_all(&img.pixels)?;
    sink.flush()?;
    Ok(())
}

pub fn ppm_bytes(img: &ImageBuffer) -> Vec<u8> {
    let mut out = Vec::with_capacity(img.pixels.len() + 32);
    write_ppm(img, &mut out).expect("writing to a Vec cannot fail");
    out
}

/// 8-bit RGB PNG with fixed encoder settings.
pub fn write_png<W: Write>(img: &ImageBuffer, sink: W) -> Result<(), ImageError> {
    let mut enc = png::Encoder::new(sink, img.width, img.height);
    enc.set_color(png::ColorType::Rgb);
    enc.set_depth(png::BitDepth::Eight);
    enc.set_compression(png::Compression::Default);
    enc.set_filter(png::FilterType::Sub);
    let mut writer = enc.write_header()?;
    writer.write_image_data(&img.pixels)?;
    writer.finish()?;
    Ok(())
}

pub fn png_bytes(img: &ImageBuffer) -> Vec<u8> {
    let mut out = Vec::new();
    write_png(img, &mut out).expect("encoding to a Vec cannot fail");
    out
}

/// Decode an 8-bit RGB PNG.
pub fn read_png(bytes: &[u8]) -> Result<ImageBuffer, ImageError> {
    let decoder = png::Decoder::new(bytes);
    let mut reader = decoder.read_info()?;
    let mut buf = vec![0; reader.output_buffer_size()];
    let info = reader.next_frame(&mut buf)?;
    if info.color_type != png::ColorType::Rgb || info.bit_depth != png::BitDepth::Eight {
        return Err(ImageError::Unsupported(format!("{:?} {:?}", info.color_type, info.bit_depth)));
    }
    buf.truncate(info.buffer_size());
    ImageBuffer::new(info.width, info.height, buf)
}
