//! Lossless conversion between ciphertext bytes and a binary image. The
//! bytes are wrapped in a magic+length frame and written bit-by-bit into a
//! near-square image, so decoding is deterministic and fail-closed — no
//! character recognition step, no recognition error.

use thiserror::Error;

use crate::img::BinaryImage;

/// Frame marker preceding every payload.
pub const MAGIC: [u8; 4] = *b"SVC1";
/// Frame header size: magic plus 32-bit big-endian body length.
pub const HEADER_BYTES: usize = 8;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodecError {
    #[error("input is empty")]
    EmptyInput,
    #[error("missing or wrong frame magic; not an encoded payload")]
    BadMagic,
    #[error("declared body length {declared} bytes exceeds the {available} bits available")]
    LengthOverflow { declared: u64, available: u64 },
}

/// A length-prefixed byte payload: magic, 32-bit big-endian body length,
/// then the body itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PayloadFrame {
    body: Vec<u8>,
}

impl PayloadFrame {
    pub fn new(body: impl Into<Vec<u8>>) -> Self {
        Self { body: body.into() }
    }

    pub fn body(&self) -> &[u8] {
        &self.body
    }

    pub fn into_body(self) -> Vec<u8> {
        self.body
    }

    /// Serialized frame length in bytes.
    pub fn encoded_len(&self) -> usize {
        HEADER_BYTES + self.body.len()
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.encoded_len());
        out.extend_from_slice(&MAGIC);
        out.extend_from_slice(&(self.body.len() as u32).to_be_bytes());
        out.extend_from_slice(&self.body);
        out
    }

    /// Parses a frame from a byte stream that may carry trailing padding.
    pub fn decode(bytes: &[u8]) -> Result<Self, CodecError> {
        let body_len = parse_header(bytes)?;
        let end = HEADER_BYTES + body_len;
        if end > bytes.len() {
            return Err(CodecError::LengthOverflow {
                declared: body_len as u64,
                available: (bytes.len().saturating_sub(HEADER_BYTES) as u64) * 8,
            });
        }
        Ok(Self {
            body: bytes[HEADER_BYTES..end].to_vec(),
        })
    }
}

/// Checks the magic and returns the declared body length in bytes.
pub fn parse_header(bytes: &[u8]) -> Result<usize, CodecError> {
    if bytes.len() < HEADER_BYTES || bytes[..4] != MAGIC {
        return Err(CodecError::BadMagic);
    }
    Ok(u32::from_be_bytes(bytes[4..8].try_into().unwrap()) as usize)
}

/// Unpacks bytes into bit values, most significant bit first.
pub(crate) fn bytes_to_bits(bytes: &[u8]) -> Vec<u8> {
    let mut bits = Vec::with_capacity(bytes.len() * 8);
    for &byte in bytes {
        for shift in (0..8).rev() {
            bits.push((byte >> shift) & 1);
        }
    }
    bits
}

/// Packs bit values (0/1) into bytes, most significant bit first; a trailing
/// partial byte is zero-padded.
pub(crate) fn bits_to_bytes(bits: &[u8]) -> Vec<u8> {
    let mut bytes = vec![0u8; bits.len().div_ceil(8)];
    for (i, &bit) in bits.iter().enumerate() {
        bytes[i / 8] |= bit << (7 - i % 8);
    }
    bytes
}

/// Frames the ciphertext and lays its bits out row-major, MSB first, in the
/// smallest near-square image whose width is a multiple of 8. Bit 1 maps to
/// a black pixel; trailing pixels stay white.
pub fn ciphertext_to_image(c: &[u8]) -> Result<BinaryImage, CodecError> {
    if c.is_empty() {
        return Err(CodecError::EmptyInput);
    }
    let bits = bytes_to_bits(&PayloadFrame::new(c).encode());
    let total_bits = bits.len() as u64;
    let width = (total_bits as f64).sqrt().ceil() as u64;
    let width = width.div_ceil(8) * 8;
    let height = total_bits.div_ceil(width);
    let mut pixels = bits;
    pixels.resize((width * height) as usize, 0);
    Ok(BinaryImage::from_bits(width as u32, height as u32, pixels).expect("sized to fit"))
}

/// Reads the image back to the framed ciphertext. Any image that does not
/// open with the frame magic is rejected rather than misread.
pub fn image_to_ciphertext(img: &BinaryImage) -> Result<Vec<u8>, CodecError> {
    let header_bits: Vec<u8> = img.bits().iter().take(HEADER_BYTES * 8).copied().collect();
    if header_bits.len() < HEADER_BYTES * 8 {
        return Err(CodecError::BadMagic);
    }
    let body_len = parse_header(&bits_to_bytes(&header_bits))?;
    let needed_bits = (HEADER_BYTES + body_len) * 8;
    if needed_bits > img.pixel_count() {
        return Err(CodecError::LengthOverflow {
            declared: body_len as u64,
            available: (img.pixel_count() - HEADER_BYTES * 8) as u64,
        });
    }
    let body_bits = &img.bits()[HEADER_BYTES * 8..needed_bits];
    Ok(bits_to_bytes(body_bits))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    #[test]
    fn eight_byte_payload_gives_16_by_8() {
        let img = ciphertext_to_image(&[0xA5; 8]).unwrap();
        assert_eq!((img.width(), img.height()), (16, 8));
        assert_eq!(image_to_ciphertext(&img).unwrap(), vec![0xA5; 8]);
    }

    #[test]
    fn body_bits_follow_the_header() {
        let img = ciphertext_to_image(&[0xFF]).unwrap();
        let bits = img.bits();
        // 64 header bits, then 8 black pixels for the 0xFF body byte.
        assert!(bits[64..72].iter().all(|&b| b == 1));
        assert!(bits[72..].iter().all(|&b| b == 0));
    }

    #[test]
    fn empty_input_is_rejected() {
        assert_eq!(ciphertext_to_image(&[]).unwrap_err(), CodecError::EmptyInput);
    }

    #[test]
    fn all_white_image_has_no_magic() {
        let img = BinaryImage::new(32, 32);
        assert_eq!(image_to_ciphertext(&img).unwrap_err(), CodecError::BadMagic);
        let tiny = BinaryImage::new(4, 4);
        assert_eq!(image_to_ciphertext(&tiny).unwrap_err(), CodecError::BadMagic);
    }

    #[test]
    fn tampered_length_field_overflows() {
        let mut img = ciphertext_to_image(&[1, 2, 3, 4]).unwrap();
        // Bit 33 sits in the length word; setting it declares a 2^30-byte body.
        img.set(33 % img.width(), 33 / img.width(), 1);
        assert!(matches!(
            image_to_ciphertext(&img).unwrap_err(),
            CodecError::LengthOverflow { .. }
        ));
    }

    #[test]
    fn roundtrip_random_payloads() {
        let mut rng = SplitMix64::new(3);
        for len in [1usize, 2, 7, 8, 9, 63, 64, 65, 500, 4096] {
            let mut c = vec![0u8; len];
            rng.fill_bytes(&mut c);
            let img = ciphertext_to_image(&c).unwrap();
            assert_eq!(image_to_ciphertext(&img).unwrap(), c, "len {len}");
        }
    }

    #[test]
    fn frame_decode_tolerates_padding_but_not_truncation() {
        let frame = PayloadFrame::new(vec![9, 8, 7]);
        let mut encoded = frame.encode();
        encoded.extend_from_slice(&[0, 0, 0, 0]);
        assert_eq!(PayloadFrame::decode(&encoded).unwrap(), frame);
        assert!(matches!(
            PayloadFrame::decode(&frame.encode()[..9]),
            Err(CodecError::LengthOverflow { .. })
        ));
    }
}
