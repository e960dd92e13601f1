//! LSB substitution steganography. Payload bits replace the least
//! significant bit of successive cover samples — row-major, R then G then B
//! within each pixel — leaving every other bit untouched. Shares travel as a
//! self-describing frame (magic, length, 16-bit width and height, pixel
//! bits), so extraction needs no side channel.

use thiserror::Error;

use crate::codec::{self, CodecError, PayloadFrame, HEADER_BYTES};
use crate::img::{BinaryImage, RgbImage};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StegoError {
    #[error("payload needs {required} bits but the cover holds {available}")]
    Capacity { required: usize, available: usize },
    #[error("share of {0}x{1} pixels does not fit the 16-bit dimension fields")]
    ShareTooLarge(u32, u32),
    #[error("embedded share is malformed: body length does not match its dimensions")]
    MalformedShare,
    #[error(transparent)]
    Codec(#[from] CodecError),
}

/// Number of payload bits a cover can carry: one per color sample.
pub fn capacity(cover: &RgbImage) -> usize {
    cover.as_raw().len()
}

/// A framed share bitstream ready for embedding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StegoPayload {
    frame: Vec<u8>,
}

impl StegoPayload {
    /// Serializes a share as 16-bit width, 16-bit height, then its pixel
    /// bits (packed MSB first), wrapped in a payload frame.
    pub fn from_share(share: &BinaryImage) -> Result<Self, StegoError> {
        let (w, h) = (share.width(), share.height());
        if w > u32::from(u16::MAX) || h > u32::from(u16::MAX) {
            return Err(StegoError::ShareTooLarge(w, h));
        }
        let mut body = Vec::with_capacity(4 + share.pixel_count().div_ceil(8));
        body.extend_from_slice(&(w as u16).to_be_bytes());
        body.extend_from_slice(&(h as u16).to_be_bytes());
        body.extend_from_slice(&codec::bits_to_bytes(share.bits()));
        Ok(Self {
            frame: PayloadFrame::new(body).encode(),
        })
    }

    /// Parses the framed bytes back into the share image.
    pub fn to_share(&self) -> Result<BinaryImage, StegoError> {
        let body = PayloadFrame::decode(&self.frame)?.into_body();
        if body.len() < 4 {
            return Err(StegoError::MalformedShare);
        }
        let w = u32::from(u16::from_be_bytes([body[0], body[1]]));
        let h = u32::from(u16::from_be_bytes([body[2], body[3]]));
        let pixel_bytes = &body[4..];
        if pixel_bytes.len() != (w as usize * h as usize).div_ceil(8) {
            return Err(StegoError::MalformedShare);
        }
        let mut bits = codec::bytes_to_bits(pixel_bytes);
        bits.truncate(w as usize * h as usize);
        BinaryImage::from_bits(w, h, bits).map_err(|_| StegoError::MalformedShare)
    }

    pub fn from_frame_bytes(frame: Vec<u8>) -> Self {
        Self { frame }
    }

    pub fn frame_bytes(&self) -> &[u8] {
        &self.frame
    }

    pub fn bit_len(&self) -> usize {
        self.frame.len() * 8
    }

    /// Payload bits in embedding order (MSB first within each byte).
    pub fn bits(&self) -> Vec<u8> {
        codec::bytes_to_bits(&self.frame)
    }
}

/// Writes raw bit values (0/1) into the LSBs of the first `bits.len()`
/// samples; everything past the payload is byte-identical to the cover.
pub fn embed_bits(cover: &RgbImage, bits: &[u8]) -> Result<RgbImage, StegoError> {
    let available = capacity(cover);
    if bits.len() > available {
        return Err(StegoError::Capacity {
            required: bits.len(),
            available,
        });
    }
    let mut stego = cover.clone();
    for (sample, &bit) in stego.iter_mut().zip(bits) {
        *sample = (*sample & !1) | bit;
    }
    Ok(stego)
}

/// Reads the LSBs of the first `n` samples.
pub fn extract_bits(stego: &RgbImage, n: usize) -> Vec<u8> {
    stego.as_raw().iter().take(n).map(|&s| s & 1).collect()
}

/// Embeds a framed payload into the cover.
pub fn embed(cover: &RgbImage, payload: &StegoPayload) -> Result<RgbImage, StegoError> {
    embed_bits(cover, &payload.bits())
}

/// Recovers a framed payload from a stego image. Images with no embedded
/// frame fail the magic check rather than yielding garbage.
pub fn extract(stego: &RgbImage) -> Result<StegoPayload, StegoError> {
    let available = capacity(stego);
    if available < HEADER_BYTES * 8 {
        return Err(CodecError::BadMagic.into());
    }
    let header = codec::bits_to_bytes(&extract_bits(stego, HEADER_BYTES * 8));
    let body_len = codec::parse_header(&header)?;
    let total_bits = (HEADER_BYTES + body_len) * 8;
    if total_bits > available {
        return Err(CodecError::LengthOverflow {
            declared: body_len as u64,
            available: (available - HEADER_BYTES * 8) as u64,
        }
        .into());
    }
    let frame = codec::bits_to_bytes(&extract_bits(stego, total_bits));
    Ok(StegoPayload::from_frame_bytes(frame))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn rgb_from_samples(width: u32, height: u32, samples: Vec<u8>) -> RgbImage {
        RgbImage::from_vec(width, height, samples).unwrap()
    }

    fn random_cover(width: u32, height: u32, seed: u64) -> RgbImage {
        let mut rng = SplitMix64::new(seed);
        let mut samples = vec![0u8; (width * height * 3) as usize];
        rng.fill_bytes(&mut samples);
        rgb_from_samples(width, height, samples)
    }

    fn random_share(w: u32, h: u32, seed: u64) -> BinaryImage {
        let mut rng = SplitMix64::new(seed);
        let bits = (0..(w * h) as usize).map(|_| (rng.next_u64() & 1) as u8).collect();
        BinaryImage::from_bits(w, h, bits).unwrap()
    }

    #[test]
    fn capacity_is_three_bits_per_pixel() {
        assert_eq!(capacity(&RgbImage::new(512, 512)), 786_432);
        assert_eq!(capacity(&RgbImage::new(1, 1)), 3);
        let noisy = random_cover(1, 1, 5);
        assert_eq!(capacity(&noisy), 3);
    }

    #[test]
    fn worked_seven_sample_example() {
        // Seven cover samples whose trailing bit is the LSB, carrying the
        // bits 1110011: only the last bit of each sample may change.
        let mut samples: Vec<u8> =
            vec![0b1011010, 0b1100000, 0b1100010, 0b1100011, 0b1100101, 0b1100101, 0b1100011];
        samples.extend_from_slice(&[0, 0]); // pad to a whole 3x1 RGB image
        let cover = rgb_from_samples(3, 1, samples);

        let stego = embed_bits(&cover, &[1, 1, 1, 0, 0, 1, 1]).unwrap();
        let expected: [u8; 7] =
            [0b1011011, 0b1100001, 0b1100011, 0b1100010, 0b1100100, 0b1100101, 0b1100011];
        assert_eq!(&stego.as_raw()[..7], &expected[..]);
        // Untouched samples stay byte-identical.
        assert_eq!(&stego.as_raw()[7..], &cover.as_raw()[7..]);
    }

    #[test]
    fn all_zero_bits_into_even_cover_change_nothing() {
        let cover = rgb_from_samples(2, 2, vec![2, 4, 6, 8, 10, 12, 14, 16, 18, 20, 22, 24]);
        let stego = embed_bits(&cover, &vec![0; 12]).unwrap();
        assert_eq!(stego.as_raw(), cover.as_raw());
    }

    #[test]
    fn over_capacity_is_rejected_with_counts() {
        let cover = RgbImage::new(4, 4);
        let bits = vec![1u8; capacity(&cover) + 1];
        assert_eq!(
            embed_bits(&cover, &bits).unwrap_err(),
            StegoError::Capacity {
                required: 49,
                available: 48
            }
        );
    }

    #[test]
    fn distortion_is_at_most_one_level_everywhere() {
        let cover = random_cover(24, 16, 9);
        let share = random_share(16, 12, 10);
        let payload = StegoPayload::from_share(&share).unwrap();
        let stego = embed(&cover, &payload).unwrap();
        for (a, b) in cover.as_raw().iter().zip(stego.as_raw()) {
            assert!(a.abs_diff(*b) <= 1);
        }
    }

    #[test]
    fn roundtrip_share_through_cover() {
        for seed in 0..20 {
            let cover = random_cover(40, 30, seed);
            let share = random_share(30, 20, seed + 100);
            let payload = StegoPayload::from_share(&share).unwrap();
            let stego = embed(&cover, &payload).unwrap();
            let recovered = extract(&stego).unwrap();
            assert_eq!(recovered, payload);
            assert_eq!(recovered.to_share().unwrap(), share);
        }
    }

    #[test]
    fn pristine_cover_has_no_payload() {
        for seed in 0..50 {
            let cover = random_cover(16, 16, seed);
            assert!(matches!(
                extract(&cover),
                Err(StegoError::Codec(CodecError::BadMagic))
            ));
        }
    }

    #[test]
    fn changed_sample_fraction_is_about_half() {
        let cover = random_cover(128, 128, 77);
        let share = random_share(100, 100, 78);
        let payload = StegoPayload::from_share(&share).unwrap();
        let stego = embed(&cover, &payload).unwrap();
        let embedded = payload.bit_len();
        let changed = cover
            .as_raw()
            .iter()
            .zip(stego.as_raw())
            .filter(|(a, b)| a != b)
            .count();
        let fraction = changed as f64 / embedded as f64;
        assert!((0.45..=0.55).contains(&fraction), "fraction {fraction}");
    }

    #[test]
    fn mse_bound_from_embedded_bits() {
        let cover = random_cover(64, 64, 50);
        let share = random_share(48, 48, 51);
        let payload = StegoPayload::from_share(&share).unwrap();
        let stego = embed(&cover, &payload).unwrap();
        let sum_sq: u64 = cover
            .as_raw()
            .iter()
            .zip(stego.as_raw())
            .map(|(a, b)| u64::from(a.abs_diff(*b)).pow(2))
            .sum();
        let mse = sum_sq as f64 / capacity(&cover) as f64;
        assert!(mse <= payload.bit_len() as f64 / capacity(&cover) as f64);
    }

    #[test]
    fn tampered_length_overflows_on_extract() {
        let cover = random_cover(10, 10, 1);
        let payload = StegoPayload::from_share(&random_share(8, 8, 2)).unwrap();
        let mut stego = embed(&cover, &payload).unwrap();
        // Force a huge declared length in the embedded header (bit 33).
        let sample = &mut stego.as_mut()[33];
        *sample |= 1;
        assert!(matches!(
            extract(&stego).unwrap_err(),
            StegoError::Codec(CodecError::LengthOverflow { .. })
        ));
    }

    #[test]
    fn share_dimension_mismatch_is_malformed() {
        let share = random_share(10, 10, 3);
        let payload = StegoPayload::from_share(&share).unwrap();
        let mut frame = payload.frame_bytes().to_vec();
        frame[HEADER_BYTES] ^= 0x40; // corrupt the width field
        let bad = StegoPayload::from_frame_bytes(frame);
        assert_eq!(bad.to_share().unwrap_err(), StegoError::MalformedShare);
    }
}
