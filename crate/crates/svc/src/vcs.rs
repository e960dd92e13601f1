//! (2,2) visual cryptography. Every secret pixel expands to a 2x2 subpixel
//! block in each of two shares; each block holds exactly two black subpixels.
//! A white pixel gives both shares the same block, a black pixel gives them
//! complementary blocks, so one share alone is uniform noise while XOR of the
//! pair reconstructs the secret exactly (OR stacks it like transparencies).

use thiserror::Error;

use crate::img::BinaryImage;
use crate::rng::SplitMix64;

/// Subpixel block edge: each secret pixel becomes a 2x2 block.
pub const EXPANSION: u32 = 2;

/// The six 2-of-4 subpixel patterns, positions (r0c0, r0c1, r1c0, r1c1):
/// two horizontal, two vertical, two diagonal. The set is closed under
/// complement, which keeps black-pixel shares inside the same pattern set.
pub const PATTERNS: [[u8; 4]; 6] = [
    [1, 1, 0, 0],
    [0, 0, 1, 1],
    [1, 0, 1, 0],
    [0, 1, 0, 1],
    [1, 0, 0, 1],
    [0, 1, 1, 0],
];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VcsError {
    #[error("secret image has no pixels")]
    EmptyImage,
    #[error("share dimensions differ: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(u32, u32, u32, u32),
    #[error("share block at secret pixel ({x}, {y}) is neither all-black nor all-white; shares are corrupted")]
    InconsistentBlock { x: u32, y: u32 },
    #[error("share dimensions {0}x{1} are not a multiple of the block size")]
    NotExpanded(u32, u32),
}

/// Two shares of identical expanded dimensions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SharePair {
    sh1: BinaryImage,
    sh2: BinaryImage,
}

impl SharePair {
    /// Pairs two independently transported shares, checking that they agree
    /// on dimensions and are block-aligned.
    pub fn from_shares(sh1: BinaryImage, sh2: BinaryImage) -> Result<Self, VcsError> {
        if sh1.width() != sh2.width() || sh1.height() != sh2.height() {
            return Err(VcsError::DimensionMismatch(
                sh1.width(),
                sh1.height(),
                sh2.width(),
                sh2.height(),
            ));
        }
        if sh1.is_empty() {
            return Err(VcsError::EmptyImage);
        }
        if sh1.width() % EXPANSION != 0 || sh1.height() % EXPANSION != 0 {
            return Err(VcsError::NotExpanded(sh1.width(), sh1.height()));
        }
        Ok(Self { sh1, sh2 })
    }

    pub fn sh1(&self) -> &BinaryImage {
        &self.sh1
    }

    pub fn sh2(&self) -> &BinaryImage {
        &self.sh2
    }

    pub fn into_shares(self) -> (BinaryImage, BinaryImage) {
        (self.sh1, self.sh2)
    }
}

/// Splits a binary secret into two noise shares. The pattern for every pixel
/// is drawn uniformly from [`PATTERNS`] by a SplitMix64 stream, so the same
/// seed and secret always reproduce the same pair.
pub fn split(secret: &BinaryImage, seed: u64) -> Result<SharePair, VcsError> {
    if secret.is_empty() {
        return Err(VcsError::EmptyImage);
    }
    let mut rng = SplitMix64::new(seed);
    let (w, h) = (secret.width(), secret.height());
    let mut sh1 = BinaryImage::new(w * EXPANSION, h * EXPANSION);
    let mut sh2 = BinaryImage::new(w * EXPANSION, h * EXPANSION);
    for y in 0..h {
        for x in 0..w {
            let pattern = &PATTERNS[rng.next_index(6) as usize];
            let black = secret.get(x, y) == 1;
            for (i, &bit) in pattern.iter().enumerate() {
                let sx = x * EXPANSION + (i as u32 % 2);
                let sy = y * EXPANSION + (i as u32 / 2);
                sh1.set(sx, sy, bit);
                sh2.set(sx, sy, if black { 1 - bit } else { bit });
            }
        }
    }
    Ok(SharePair { sh1, sh2 })
}

/// Pixelwise OR: models stacking printed transparencies (black dominates).
pub fn superimpose_or(sh1: &BinaryImage, sh2: &BinaryImage) -> Result<BinaryImage, VcsError> {
    combine(sh1, sh2, |a, b| a | b)
}

/// Pixelwise XOR: exact reconstruction with full contrast.
pub fn superimpose_xor(sh1: &BinaryImage, sh2: &BinaryImage) -> Result<BinaryImage, VcsError> {
    combine(sh1, sh2, |a, b| a ^ b)
}

fn combine(
    sh1: &BinaryImage,
    sh2: &BinaryImage,
    op: impl Fn(u8, u8) -> u8,
) -> Result<BinaryImage, VcsError> {
    if sh1.width() != sh2.width() || sh1.height() != sh2.height() {
        return Err(VcsError::DimensionMismatch(
            sh1.width(),
            sh1.height(),
            sh2.width(),
            sh2.height(),
        ));
    }
    let bits = sh1
        .bits()
        .iter()
        .zip(sh2.bits())
        .map(|(&a, &b)| op(a, b))
        .collect();
    Ok(BinaryImage::from_bits(sh1.width(), sh1.height(), bits).expect("same dimensions"))
}

/// XOR-superimposes the pair and collapses every 2x2 block back to one
/// pixel. Valid pairs produce only all-black or all-white blocks; anything
/// else means a share was corrupted in transit.
pub fn reconstruct_secret(pair: &SharePair) -> Result<BinaryImage, VcsError> {
    let combined = superimpose_xor(&pair.sh1, &pair.sh2)?;
    let (w, h) = (combined.width() / EXPANSION, combined.height() / EXPANSION);
    let mut secret = BinaryImage::new(w, h);
    for y in 0..h {
        for x in 0..w {
            let mut sum = 0u8;
            for dy in 0..EXPANSION {
                for dx in 0..EXPANSION {
                    sum += combined.get(x * EXPANSION + dx, y * EXPANSION + dy);
                }
            }
            match sum {
                0 => {}
                4 => secret.set(x, y, 1),
                _ => return Err(VcsError::InconsistentBlock { x, y }),
            }
        }
    }
    Ok(secret)
}
