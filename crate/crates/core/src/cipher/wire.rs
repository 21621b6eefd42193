//! Session byte format.
//!
//! A session is a 41-byte header followed by any number of frames:
//!
//! | offset | size | field                                 |
//! |--------|------|---------------------------------------|
//! | 0      | 4    | magic `CNRS`                          |
//! | 4      | 1    | version, `1`                          |
//! | 5      | 32   | SHA-256 fingerprint of the codebook   |
//! | 37     | 4    | `l` in bits, big-endian               |
//!
//! Each frame holds one ciphertext packed MSB-first into `⌈l/8⌉` bytes. The
//! unused low bits of the last byte are random, not zero.

use rand::RngCore;

use crate::bits::BitString;
use crate::cipher::Ciphertext;
use crate::codec::PrefixCode;
use crate::error::{Error, Result};

pub const SESSION_MAGIC: [u8; 4] = *b"CNRS";
pub const SESSION_VERSION: u8 = 1;
pub const HEADER_LEN: usize = 41;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SessionHeader {
    pub code_fingerprint: [u8; 32],
    pub l: u32,
}

impl SessionHeader {
    pub fn for_code(code: &PrefixCode) -> Self {
        SessionHeader {
            code_fingerprint: code.fingerprint(),
            l: u32::try_from(code.max_len()).expect("codeword length fits in u32"),
        }
    }

    /// Errors unless the header was written for `code`.
    pub fn check(&self, code: &PrefixCode) -> Result<()> {
        if *self != SessionHeader::for_code(code) {
            return Err(Error::WireFormat(
                "session was produced with a different codebook".into(),
            ));
        }
        Ok(())
    }

    pub fn frame_len(&self) -> usize {
        (self.l as usize).div_ceil(8)
    }

    pub fn to_bytes(&self) -> [u8; HEADER_LEN] {
        let mut out = [0u8; HEADER_LEN];
        out[..4].copy_from_slice(&SESSION_MAGIC);
        out[4] = SESSION_VERSION;
        out[5..37].copy_from_slice(&self.code_fingerprint);
        out[37..].copy_from_slice(&self.l.to_be_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(Error::WireFormat("truncated session header".into()));
        }
        if bytes[..4] != SESSION_MAGIC {
            return Err(Error::WireFormat("bad session magic".into()));
        }
        if bytes[4] != SESSION_VERSION {
            return Err(Error::WireFormat(format!("unsupported session version {}", bytes[4])));
        }
        let l = u32::from_be_bytes(bytes[37..41].try_into().expect("4 bytes"));
        if l == 0 {
            return Err(Error::WireFormat("zero ciphertext length".into()));
        }
        Ok(SessionHeader {
            code_fingerprint: bytes[5..37].try_into().expect("32 bytes"),
            l,
        })
    }
}

/// Packs a ciphertext into a frame, filling spare low bits from `rng`.
pub fn to_frame<R: RngCore + ?Sized>(c: &Ciphertext, rng: &mut R) -> Vec<u8> {
    let mut bytes = c.bits().as_bytes().to_vec();
    let spare = bytes.len() * 8 - c.len();
    if spare > 0 {
        let mut noise = [0u8; 1];
        rng.fill_bytes(&mut noise);
        let last = bytes.len() - 1;
        bytes[last] |= noise[0] & ((1u8 << spare) - 1);
    }
    bytes
}

pub fn from_frame(frame: &[u8], l: usize) -> Result<Ciphertext> {
    if frame.len() != l.div_ceil(8) {
        return Err(Error::WireFormat(format!(
            "frame of {} bytes for l = {l}",
            frame.len()
        )));
    }
    Ok(Ciphertext::from_bits(BitString::from_bytes(frame, l)?))
}

pub fn write_session<R: RngCore + ?Sized>(
    header: &SessionHeader,
    ciphertexts: &[Ciphertext],
    rng: &mut R,
) -> Result<Vec<u8>> {
    let mut out = header.to_bytes().to_vec();
    for c in ciphertexts {
        if c.len() != header.l as usize {
            return Err(Error::WireFormat(format!(
                "ciphertext of {} bits in a session with l = {}",
                c.len(),
                header.l
            )));
        }
        out.extend(to_frame(c, rng));
    }
    Ok(out)
}

pub fn read_session(bytes: &[u8]) -> Result<(SessionHeader, Vec<Ciphertext>)> {
    let header = SessionHeader::from_bytes(bytes)?;
    let body = &bytes[HEADER_LEN..];
    let n = header.frame_len();
    if !body.len().is_multiple_of(n) {
        return Err(Error::WireFormat("trailing partial frame".into()));
    }
    let frames = body
        .chunks(n)
        .map(|f| from_frame(f, header.l as usize))
        .collect::<Result<_>>()?;
    Ok((header, frames))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::keystore::{SeededRandom, ZeroRandom};

    fn code() -> PrefixCode {
        PrefixCode::new(vec![
            (b"a".to_vec(), "000".parse().unwrap()),
            (b"b".to_vec(), "001".parse().unwrap()),
            (b"c".to_vec(), "01".parse().unwrap()),
            (b"d".to_vec(), "1".parse().unwrap()),
        ])
        .unwrap()
    }

    #[test]
    fn header_layout() {
        let h = SessionHeader::for_code(&code());
        let bytes = h.to_bytes();
        assert_eq!(&bytes[..5], b"CNRS\x01");
        assert_eq!(&bytes[37..], &[0, 0, 0, 3]);
        assert_eq!(SessionHeader::from_bytes(&bytes).unwrap(), h);
        assert!(h.check(&code()).is_ok());
        let other = PrefixCode::new(vec![(b"a".to_vec(), "0".parse().unwrap())]).unwrap();
        assert!(h.check(&other).is_err());
    }

    #[test]
    fn frame_spare_bits_are_random() {
        let c = Ciphertext::from_bits("101".parse().unwrap());
        assert_eq!(to_frame(&c, &mut ZeroRandom), vec![0b1010_0000]);
        let mut rng = SeededRandom::insecure_from_seed(5);
        let frames: Vec<u8> = (0..32).map(|_| to_frame(&c, &mut rng)[0]).collect();
        assert!(frames.iter().all(|b| b >> 5 == 0b101));
        assert!(frames.iter().any(|b| b & 0x1f != 0));
        assert_eq!(from_frame(&frames[..1], 3).unwrap(), c);
    }

    #[test]
    fn session_round_trip_and_errors() {
        let h = SessionHeader::for_code(&code());
        let cs: Vec<_> = ["101", "000", "111"]
            .iter()
            .map(|s| Ciphertext::from_bits(s.parse().unwrap()))
            .collect();
        let mut rng = SeededRandom::insecure_from_seed(1);
        let bytes = write_session(&h, &cs, &mut rng).unwrap();
        assert_eq!(bytes.len(), HEADER_LEN + 3);
        let (h2, back) = read_session(&bytes).unwrap();
        assert_eq!(h2, h);
        assert_eq!(back, cs);
        assert!(read_session(&bytes[..10]).is_err());
        let bad = [Ciphertext::from_bits("10".parse().unwrap())];
        assert!(write_session(&h, &bad, &mut rng).is_err());
        let mut v = bytes.clone();
        v[4] = 9;
        assert!(read_session(&v).is_err());
    }
}
