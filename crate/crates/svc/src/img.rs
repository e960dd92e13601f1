//! Shared image carriers: 1-bit images for shares and payload frames, and
//! 24-bit RGB covers (re-exported from the `image` crate) with lossless file I/O.

use std::path::Path;

use thiserror::Error;

/// RGB cover/stego carrier, row-major R,G,B samples.
pub use image::RgbImage;

#[derive(Debug, Error)]
pub enum ImgError {
    #[error("image has no pixels")]
    Empty,
    #[error("bit buffer length {got} does not match {width}x{height}")]
    BadLength { width: u32, height: u32, got: usize },
    #[error("writing JPEG would destroy the embedded least-significant bits; use PNG")]
    JpegOutputRejected,
    #[error("unsupported output format {0:?}; stego and share images are written as PNG")]
    UnsupportedOutput(String),
    #[error(transparent)]
    Image(#[from] image::ImageError),
}

/// A width x height matrix of 1-bit pixels. `0` is white, `1` is black.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryImage {
    width: u32,
    height: u32,
    bits: Vec<u8>,
}

impl BinaryImage {
    /// All-white image.
    pub fn new(width: u32, height: u32) -> Self {
        Self {
            width,
            height,
            bits: vec![0; width as usize * height as usize],
        }
    }

    /// Builds an image from row-major bit values (each must be 0 or 1).
    pub fn from_bits(width: u32, height: u32, bits: Vec<u8>) -> Result<Self, ImgError> {
        if bits.len() != width as usize * height as usize {
            return Err(ImgError::BadLength {
                width,
                height,
                got: bits.len(),
            });
        }
        debug_assert!(bits.iter().all(|&b| b <= 1));
        Ok(Self { width, height, bits })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixel_count(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> u8 {
        self.bits[y as usize * self.width as usize + x as usize]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, bit: u8) {
        debug_assert!(bit <= 1);
        self.bits[y as usize * self.width as usize + x as usize] = bit;
    }

    /// Row-major bit values, one byte per pixel.
    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    /// Number of black (1) pixels.
    pub fn count_black(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    /// Renders to 8-bit grayscale: black pixels become 0x00, white 0xFF.
    pub fn to_luma(&self) -> image::GrayImage {
        let data = self
            .bits
            .iter()
            .map(|&b| if b == 1 { 0x00 } else { 0xFF })
            .collect();
        image::GrayImage::from_vec(self.width, self.height, data)
            .expect("bit buffer length matches dimensions")
    }

    /// Thresholds 8-bit grayscale back to bits: values below 128 are black.
    pub fn from_luma(img: &image::GrayImage) -> Self {
        let bits = img.pixels().map(|p| u8::from(p.0[0] < 128)).collect();
        Self {
            width: img.width(),
            height: img.height(),
            bits,
        }
    }

    pub fn save_png<P: AsRef<Path>>(&self, path: P) -> Result<(), ImgError> {
        check_output_path(path.as_ref())?;
        self.to_luma().save(path.as_ref())?;
        Ok(())
    }

    pub fn load_png<P: AsRef<Path>>(path: P) -> Result<Self, ImgError> {
        let img = image::open(path)?.to_luma8();
        Ok(Self::from_luma(&img))
    }
}

/// Loads a lossless RGB cover (PNG or 24-bit BMP).
pub fn load_rgb<P: AsRef<Path>>(path: P) -> Result<RgbImage, ImgError> {
    Ok(image::open(path)?.to_rgb8())
}

/// Writes an RGB image as PNG. JPEG targets are refused since lossy
/// compression rewrites the LSB plane.
pub fn save_rgb_png<P: AsRef<Path>>(img: &RgbImage, path: P) -> Result<(), ImgError> {
    check_output_path(path.as_ref())?;
    img.save(path.as_ref())?;
    Ok(())
}

fn check_output_path(path: &Path) -> Result<(), ImgError> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .unwrap_or("")
        .to_ascii_lowercase();
    match ext.as_str() {
        "png" => Ok(()),
        "jpg" | "jpeg" => Err(ImgError::JpegOutputRejected),
        other => Err(ImgError::UnsupportedOutput(other.to_string())),
    }
}
