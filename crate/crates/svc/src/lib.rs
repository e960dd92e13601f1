//! Layered transport for secret messages: a Blowfish-encrypted message is
//! rendered as a binary image, split into two (2,2) visual-cryptography
//! shares, and each share is hidden in the least-significant bits of its own
//! RGB cover image. The library also carries the measurement side: MSE/PSNR
//! and histogram quality metrics, bit-plane slicing, and statistical LSB
//! detectors with score fusion.

pub mod blowfish;
pub mod img;
pub mod rng;

pub use img::{BinaryImage, RgbImage};
