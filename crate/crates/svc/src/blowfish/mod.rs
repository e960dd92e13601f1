//! Blowfish block cipher: 16-round Feistel network over 64-bit blocks with a
//! key-dependent schedule (18-entry P-array, four 256-entry S-boxes), plus
//! message-level padding and key derivation from an optional key image.

mod consts;

use thiserror::Error;

use crate::img::RgbImage;

pub const BLOCK_SIZE: usize = 8;
pub const MIN_KEY_BYTES: usize = 4;
pub const MAX_KEY_BYTES: usize = 56;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BlowfishError {
    #[error("key length {0} outside [{MIN_KEY_BYTES}, {MAX_KEY_BYTES}] bytes")]
    KeyLength(usize),
    #[error("user key is empty")]
    EmptyKey,
    #[error("message is empty")]
    EmptyMessage,
    #[error("ciphertext length {0} is not a positive multiple of {BLOCK_SIZE}")]
    Length(usize),
    #[error("invalid padding after decryption (wrong key or corrupted ciphertext)")]
    Padding,
}

/// Validated key bytes, 32 to 448 bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyMaterial(Vec<u8>);

impl KeyMaterial {
    pub fn new(bytes: impl Into<Vec<u8>>) -> Result<Self, BlowfishError> {
        let bytes = bytes.into();
        if bytes.len() < MIN_KEY_BYTES || bytes.len() > MAX_KEY_BYTES {
            return Err(BlowfishError::KeyLength(bytes.len()));
        }
        Ok(Self(bytes))
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

/// Block cipher mode for message-level encryption. ECB is the default;
/// CBC uses an all-zero IV so both directions stay deterministic from the
/// key alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Ecb,
    Cbc,
}

/// Expanded subkeys. Immutable once built; all cipher operations are pure.
#[derive(Clone, PartialEq, Eq)]
pub struct KeySchedule {
    p: [u32; 18],
    s: [[u32; 256]; 4],
}

impl std::fmt::Debug for KeySchedule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("KeySchedule").finish_non_exhaustive()
    }
}

/// Runs the standard key expansion: XOR the pi-digit tables with the key
/// bytes cyclically, then replace every entry with iterated encryptions of
/// the all-zero block.
pub fn expand_key(key: &KeyMaterial) -> KeySchedule {
    let mut ks = KeySchedule {
        p: consts::P_INIT,
        s: [consts::S0_INIT, consts::S1_INIT, consts::S2_INIT, consts::S3_INIT],
    };
    let key = key.as_bytes();
    let mut j = 0usize;
    for entry in ks.p.iter_mut() {
        let mut word = 0u32;
        for _ in 0..4 {
            word = (word << 8) | u32::from(key[j % key.len()]);
            j += 1;
        }
        *entry ^= word;
    }

    let (mut l, mut r) = (0u32, 0u32);
    for i in (0..18).step_by(2) {
        (l, r) = ks.encrypt_halves(l, r);
        ks.p[i] = l;
        ks.p[i + 1] = r;
    }
    for sbox in 0..4 {
        for i in (0..256).step_by(2) {
            (l, r) = ks.encrypt_halves(l, r);
            ks.s[sbox][i] = l;
            ks.s[sbox][i + 1] = r;
        }
    }
    ks
}

impl KeySchedule {
    pub fn p_array(&self) -> &[u32; 18] {
        &self.p
    }

    pub fn s_boxes(&self) -> &[[u32; 256]; 4] {
        &self.s
    }

    /// The round function: split the half-block into four byte quarters
    /// a,b,c,d (a most significant) and combine the S-box lookups as
    /// ((S1[a] + S2[b]) ^ S3[c]) + S4[d], additions mod 2^32.
    #[inline]
    pub fn f(&self, x: u32) -> u32 {
        let a = (x >> 24) as usize;
        let b = (x >> 16) as usize & 0xFF;
        let c = (x >> 8) as usize & 0xFF;
        let d = x as usize & 0xFF;
        (self.s[0][a].wrapping_add(self.s[1][b]) ^ self.s[2][c]).wrapping_add(self.s[3][d])
    }

    #[inline]
    fn encrypt_halves(&self, mut xl: u32, mut xr: u32) -> (u32, u32) {
        for i in 0..16 {
            xl ^= self.p[i];
            xr ^= self.f(xl);
            std::mem::swap(&mut xl, &mut xr);
        }
        std::mem::swap(&mut xl, &mut xr);
        xr ^= self.p[16];
        xl ^= self.p[17];
        (xl, xr)
    }

    #[inline]
    fn decrypt_halves(&self, mut xl: u32, mut xr: u32) -> (u32, u32) {
        for i in (2..18).rev() {
            xl ^= self.p[i];
            xr ^= self.f(xl);
            std::mem::swap(&mut xl, &mut xr);
        }
        std::mem::swap(&mut xl, &mut xr);
        xr ^= self.p[1];
        xl ^= self.p[0];
        (xl, xr)
    }

    /// Encrypts one 64-bit block (big-endian halves xL || xR).
    pub fn encrypt_block(&self, x: u64) -> u64 {
        let (l, r) = self.encrypt_halves((x >> 32) as u32, x as u32);
        (u64::from(l) << 32) | u64::from(r)
    }

    /// Exact inverse of [`encrypt_block`](Self::encrypt_block): same
    /// schedule, subkeys applied in reverse order.
    pub fn decrypt_block(&self, y: u64) -> u64 {
        let (l, r) = self.decrypt_halves((y >> 32) as u32, y as u32);
        (u64::from(l) << 32) | u64::from(r)
    }

    /// Pads the message (pad value = pad length, always appended) and
    /// encrypts block by block in ECB mode. Output length is a multiple of 8.
    pub fn encrypt_message(&self, m: &[u8]) -> Result<Vec<u8>, BlowfishError> {
        self.encrypt_message_with(m, Mode::Ecb)
    }

    pub fn encrypt_message_with(&self, m: &[u8], mode: Mode) -> Result<Vec<u8>, BlowfishError> {
        if m.is_empty() {
            return Err(BlowfishError::EmptyMessage);
        }
        let pad = BLOCK_SIZE - m.len() % BLOCK_SIZE;
        let mut data = Vec::with_capacity(m.len() + pad);
        data.extend_from_slice(m);
        data.extend(std::iter::repeat(pad as u8).take(pad));

        let mut prev = 0u64; // CBC runs from a zero IV
        for chunk in data.chunks_exact_mut(BLOCK_SIZE) {
            let mut x = u64::from_be_bytes(chunk.try_into().unwrap());
            if mode == Mode::Cbc {
                x ^= prev;
            }
            let y = self.encrypt_block(x);
            prev = y;
            chunk.copy_from_slice(&y.to_be_bytes());
        }
        Ok(data)
    }

    /// Decrypts and strips padding; a padding failure signals a wrong key or
    /// corrupted ciphertext.
    pub fn decrypt_message(&self, c: &[u8]) -> Result<Vec<u8>, BlowfishError> {
        self.decrypt_message_with(c, Mode::Ecb)
    }

    pub fn decrypt_message_with(&self, c: &[u8], mode: Mode) -> Result<Vec<u8>, BlowfishError> {
        if c.is_empty() || c.len() % BLOCK_SIZE != 0 {
            return Err(BlowfishError::Length(c.len()));
        }
        let mut data = c.to_vec();
        let mut prev = 0u64;
        for chunk in data.chunks_exact_mut(BLOCK_SIZE) {
            let y = u64::from_be_bytes(chunk.try_into().unwrap());
            let mut x = self.decrypt_block(y);
            if mode == Mode::Cbc {
                x ^= prev;
                prev = y;
            }
            chunk.copy_from_slice(&x.to_be_bytes());
        }
        let pad = *data.last().unwrap() as usize;
        if pad == 0 || pad > BLOCK_SIZE || data[data.len() - pad..].iter().any(|&b| b as usize != pad)
        {
            return Err(BlowfishError::Padding);
        }
        data.truncate(data.len() - pad);
        Ok(data)
    }
}

/// Derives cipher key material from a passphrase and an optional key image.
///
/// With a key image, each pixel's luminance byte (round(0.299 R + 0.587 G +
/// 0.114 B), half away from zero) is folded into a 56-byte accumulator by
/// `acc[i mod 56] ^= lum.rotate_left(i mod 8)`, and the result is XORed with
/// the passphrase repeated cyclically. Without one, the passphrase is used
/// directly: repeated cyclically up to 4 bytes if shorter, truncated to 56
/// bytes if longer.
pub fn derive_key(user_key: &[u8], kimg: Option<&RgbImage>) -> Result<KeyMaterial, BlowfishError> {
    if user_key.is_empty() {
        return Err(BlowfishError::EmptyKey);
    }
    match kimg {
        Some(img) => {
            let mut acc = [0u8; MAX_KEY_BYTES];
            for (i, px) in img.pixels().enumerate() {
                let [r, g, b] = px.0;
                let lum = (0.299 * f64::from(r) + 0.587 * f64::from(g) + 0.114 * f64::from(b))
                    .round() as u8;
                acc[i % MAX_KEY_BYTES] ^= lum.rotate_left((i % 8) as u32);
            }
            for (i, byte) in acc.iter_mut().enumerate() {
                *byte ^= user_key[i % user_key.len()];
            }
            KeyMaterial::new(acc.to_vec())
        }
        None => {
            let mut bytes = user_key.to_vec();
            while bytes.len() < MIN_KEY_BYTES {
                bytes.push(user_key[bytes.len() % user_key.len()]);
            }
            bytes.truncate(MAX_KEY_BYTES);
            KeyMaterial::new(bytes)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn schedule(key: &[u8]) -> KeySchedule {
        expand_key(&KeyMaterial::new(key.to_vec()).unwrap())
    }

    #[test]
    fn zero_key_reference_block() {
        let ks = schedule(&[0u8; 8]);
        assert_eq!(ks.encrypt_block(0), 0x4EF997456198DD78);
        assert_eq!(ks.decrypt_block(0x4EF997456198DD78), 0);
    }

    #[test]
    fn alphabet_key_ascii_block() {
        let ks = schedule(b"abcdefghijklmnopqrstuvwxyz");
        let pt = u64::from_be_bytes(*b"BLOWFISH");
        assert_eq!(ks.encrypt_block(pt), 0x324ED0FEF413A203);
    }

    #[test]
    fn key_expansion_is_deterministic() {
        let a = schedule(b"same-key-bytes");
        let b = schedule(b"same-key-bytes");
        assert_eq!(a, b);
    }

    #[test]
    fn key_length_bounds() {
        assert_eq!(KeyMaterial::new(vec![1, 2, 3]).unwrap_err(), BlowfishError::KeyLength(3));
        assert_eq!(
            KeyMaterial::new(vec![0; 57]).unwrap_err(),
            BlowfishError::KeyLength(57)
        );
        assert!(KeyMaterial::new(vec![0; 4]).is_ok());
        assert!(KeyMaterial::new(vec![0; 56]).is_ok());
    }

    #[test]
    fn schedule_has_4168_bytes_of_subkeys() {
        let ks = schedule(&[0u8; 8]);
        let words = ks.p_array().len() + ks.s_boxes().iter().map(|b| b.len()).sum::<usize>();
        assert_eq!(words, 18 + 4 * 256);
        assert_eq!(words * 4, 4168);
    }

    #[test]
    fn f_matches_definition_at_index_zero() {
        let ks = schedule(&[0u8; 8]);
        let s = ks.s_boxes();
        let expected = (s[0][0].wrapping_add(s[1][0]) ^ s[2][0]).wrapping_add(s[3][0]);
        assert_eq!(ks.f(0), expected);
    }

    #[test]
    fn f_quarters_are_msb_first() {
        let ks = schedule(b"quarter order");
        let s = ks.s_boxes();
        let expected = (s[0][1].wrapping_add(s[1][2]) ^ s[2][3]).wrapping_add(s[3][4]);
        assert_eq!(ks.f(0x01020304), expected);
    }

    #[test]
    fn f_zero_key_reference_points() {
        // Frozen from an independent table-lookup recomputation over the
        // pi-digit schedule.
        let ks = schedule(&[0u8; 8]);
        assert_eq!(ks.f(0x00000000), 0xD267185A);
        assert_eq!(ks.f(0x00000001), 0x6D11C748);
        assert_eq!(ks.f(0x01020304), 0x1BF3BE61);
        assert_eq!(ks.f(0xDEADBEEF), 0xB672D536);
    }

    #[test]
    fn block_roundtrip_random() {
        let ks = schedule(b"roundtrip-key");
        let mut rng = SplitMix64::new(7);
        for _ in 0..10_000 {
            let x = rng.next_u64();
            assert_eq!(ks.decrypt_block(ks.encrypt_block(x)), x);
        }
    }

    #[test]
    fn wrong_key_block_differs() {
        let ks = schedule(b"right key");
        let other = schedule(b"wrong key");
        let mut rng = SplitMix64::new(11);
        let mismatches = (0..1000)
            .filter(|_| {
                let x = rng.next_u64();
                other.decrypt_block(ks.encrypt_block(x)) != x
            })
            .count();
        assert!(mismatches >= 999, "only {mismatches}/1000 mismatched");
    }

    #[test]
    fn avalanche_one_plaintext_bit() {
        let ks = schedule(b"avalanche");
        let mut rng = SplitMix64::new(13);
        let trials = 1000;
        let mut total = 0u64;
        for _ in 0..trials {
            let x = rng.next_u64();
            let flipped = x ^ (1 << (rng.next_u64() % 64));
            total += u64::from((ks.encrypt_block(x) ^ ks.encrypt_block(flipped)).count_ones());
        }
        let mean = total as f64 / trials as f64;
        assert!((28.0..=36.0).contains(&mean), "avalanche mean {mean}");
    }

    #[test]
    fn message_roundtrip_and_padding_length() {
        let ks = schedule(b"message key");
        let c = ks.encrypt_message(b"secret").unwrap();
        assert_eq!(c.len(), 8);
        assert_eq!(ks.decrypt_message(&c).unwrap(), b"secret");

        // A full block of padding is appended to block-aligned messages.
        let c8 = ks.encrypt_message(&[0xAB; 8]).unwrap();
        assert_eq!(c8.len(), 16);
        assert_eq!(ks.decrypt_message(&c8).unwrap(), vec![0xAB; 8]);

        for len in 1..=64usize {
            let m: Vec<u8> = (0..len as u8).collect();
            let c = ks.encrypt_message(&m).unwrap();
            assert_eq!(c.len(), 8 * (len / 8 + 1));
            assert_eq!(ks.decrypt_message(&c).unwrap(), m);
        }
    }

    #[test]
    fn cbc_mode_roundtrip_differs_from_ecb() {
        let ks = schedule(b"cbc key");
        let m = vec![0x5A; 32];
        let ecb = ks.encrypt_message_with(&m, Mode::Ecb).unwrap();
        let cbc = ks.encrypt_message_with(&m, Mode::Cbc).unwrap();
        // ECB repeats identical blocks, CBC must not.
        assert_eq!(&ecb[0..8], &ecb[8..16]);
        assert_ne!(&cbc[0..8], &cbc[8..16]);
        assert_eq!(ks.decrypt_message_with(&cbc, Mode::Cbc).unwrap(), m);
    }

    #[test]
    fn message_error_paths() {
        let ks = schedule(b"err key");
        assert_eq!(ks.encrypt_message(b"").unwrap_err(), BlowfishError::EmptyMessage);
        assert_eq!(ks.decrypt_message(&[0; 12]).unwrap_err(), BlowfishError::Length(12));
        assert_eq!(ks.decrypt_message(&[]).unwrap_err(), BlowfishError::Length(0));
    }

    #[test]
    fn wrong_key_decryption_fails_padding_check() {
        let ks = schedule(b"the real key");
        let wrong = schedule(b"not that key");
        let mut rng = SplitMix64::new(17);
        let trials = 1000;
        let mut rejected = 0usize;
        for _ in 0..trials {
            let mut m = vec![0u8; 24];
            rng.fill_bytes(&mut m);
            let c = ks.encrypt_message(&m).unwrap();
            match wrong.decrypt_message(&c) {
                Err(BlowfishError::Padding) => rejected += 1,
                Err(e) => panic!("unexpected error {e:?}"),
                Ok(out) => assert_ne!(out, m),
            }
        }
        // Accepting bad padding happens with probability ~2^-8 per trial.
        assert!(rejected >= trials - 12, "only {rejected}/{trials} rejected");
    }

    #[test]
    fn derive_key_passthrough_without_image() {
        let key = derive_key(&[9u8; 16], None).unwrap();
        assert_eq!(key.as_bytes(), &[9u8; 16]);

        // Short keys repeat cyclically up to the 4-byte minimum.
        let key = derive_key(b"ab", None).unwrap();
        assert_eq!(key.as_bytes(), b"abab");

        let long = vec![7u8; 80];
        let key = derive_key(&long, None).unwrap();
        assert_eq!(key.as_bytes(), &long[..56]);

        assert_eq!(derive_key(&[], None).unwrap_err(), BlowfishError::EmptyKey);
    }

    #[test]
    fn derive_key_black_image_reduces_to_cyclic_expansion() {
        let black = RgbImage::new(6, 6);
        let key = derive_key(b"abc", Some(&black)).unwrap();
        let expected: Vec<u8> = (0..56).map(|i| b"abc"[i % 3]).collect();
        assert_eq!(key.as_bytes(), &expected[..]);
    }

    #[test]
    fn derive_key_fold_matches_reference() {
        // Frozen from an independent 20-line fold script over the same
        // 8x8 synthetic key image.
        let mut img = RgbImage::new(8, 8);
        for y in 0..8u32 {
            for x in 0..8u32 {
                let px = image::Rgb([
                    ((x * 37 + y * 11) % 256) as u8,
                    ((x * 5 + y * 73) % 256) as u8,
                    ((x * 101 + y * 3) % 256) as u8,
                ]);
                img.put_pixel(x, y, px);
            }
        }
        let key = derive_key(b"k", Some(&img)).unwrap();
        let expected = "c43b9650d90576df45fbe2991c5908463687290f019c44af\
                        e02091b62651d1b04f1136f1bd46e6cc39b37d67d2997254\
                        ea5eb9eef7b38f3d";
        let expected: Vec<u8> = (0..expected.len())
            .step_by(2)
            .map(|i| u8::from_str_radix(&expected[i..i + 2], 16).unwrap())
            .collect();
        assert_eq!(key.as_bytes(), &expected[..]);
    }
}
