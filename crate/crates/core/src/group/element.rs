use std::fmt;

use num_bigint::{BigInt, Sign};
use num_traits::ToPrimitive;

use crate::error::{LabError, Result};

/// A group element. The payload shape depends on the backend that produced it;
/// equality everywhere in the crate goes through [`Element::canonical_bytes`].
#[derive(Clone)]
pub enum Element {
    /// Residue vector of a product of cyclic groups.
    Residues(Vec<u64>),
    /// Strictly-upper entries (row major) of a unitriangular matrix mod p.
    Unitriangular(Vec<u64>),
    /// Lamplighter state: lighter position and lamp bitmask.
    Lamplighter {
        position: u32,
        lamps: u64,
    },
    /// `(σ; v)` in `Sym(n) ⋉ F_p^n`, `perm[i] = σ(i)`.
    SymFp {
        perm: Vec<u8>,
        vector: Vec<u64>,
    },
    /// Coefficients of a truncated noncommutative polynomial, indexed by words
    /// of length `0..=s` (shortlex). The constant term is always 1.
    Polynomial(Vec<BigInt>),
    Pair(Box<Element>, Box<Element>),
}

impl Element {
    /// Deterministic injective byte encoding, used as the hash key by every engine.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16);
        self.encode_into(&mut out);
        out
    }

    pub(crate) fn encode_into(&self, out: &mut Vec<u8>) {
        match self {
            Element::Residues(v) | Element::Unitriangular(v) => {
                for x in v {
                    out.extend_from_slice(&x.to_le_bytes());
                }
            }
            Element::Lamplighter { position, lamps } => {
                out.extend_from_slice(&position.to_le_bytes());
                out.extend_from_slice(&lamps.to_le_bytes());
            }
            Element::SymFp { perm, vector } => {
                out.extend_from_slice(perm);
                for x in vector {
                    out.extend_from_slice(&x.to_le_bytes());
                }
            }
            Element::Polynomial(coeffs) => {
                for c in coeffs {
                    out.push(match c.sign() {
                        Sign::Minus => 2,
                        Sign::NoSign => 0,
                        Sign::Plus => 1,
                    });
                    if let Some(v) = c.magnitude().to_u64() {
                        let len = (64 - v.leading_zeros() as usize).div_ceil(8);
                        out.extend_from_slice(&(len as u32).to_le_bytes());
                        out.extend_from_slice(&v.to_le_bytes()[..len]);
                    } else {
                        let mag = c.magnitude().to_bytes_le();
                        out.extend_from_slice(&(mag.len() as u32).to_le_bytes());
                        out.extend_from_slice(&mag);
                    }
                }
            }
            Element::Pair(a, b) => {
                let start = out.len();
                out.extend_from_slice(&[0; 4]);
                a.encode_into(out);
                let len = (out.len() - start - 4) as u32;
                out[start..start + 4].copy_from_slice(&len.to_le_bytes());
                b.encode_into(out);
            }
        }
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Residues(v) => write!(f, "{v:?}"),
            Element::Unitriangular(v) => write!(f, "U{v:?}"),
            Element::Lamplighter { position, lamps } => {
                write!(f, "({position}; {lamps:#b})")
            }
            Element::SymFp { perm, vector } => {
                let images: Vec<usize> = perm.iter().map(|&x| x as usize + 1).collect();
                write!(f, "({images:?}; {vector:?})")
            }
            Element::Polynomial(c) => {
                let nz: Vec<String> = c
                    .iter()
                    .enumerate()
                    .filter(|(_, x)| **x != BigInt::from(0))
                    .map(|(i, x)| format!("{i}:{x}"))
                    .collect();
                write!(f, "Poly{{{}}}", nz.join(", "))
            }
            Element::Pair(a, b) => write!(f, "({a:?}, {b:?})"),
        }
    }
}

/// Little reader used by the backend decoders.
pub(crate) struct ByteReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> ByteReader<'a> {
    pub(crate) fn new(bytes: &'a [u8]) -> Self {
        ByteReader { bytes, pos: 0 }
    }

    pub(crate) fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.bytes.len() {
            return Err(LabError::Decode("unexpected end of input".into()));
        }
        let out = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    pub(crate) fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    pub(crate) fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    pub(crate) fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    pub(crate) fn bigint(&mut self) -> Result<BigInt> {
        let sign = match self.u8()? {
            0 => Sign::NoSign,
            1 => Sign::Plus,
            2 => Sign::Minus,
            other => return Err(LabError::Decode(format!("bad sign byte {other}"))),
        };
        let len = self.u32()? as usize;
        let mag = self.take(len)?;
        if sign == Sign::NoSign {
            if len != 0 {
                return Err(LabError::Decode("nonempty magnitude for zero".into()));
            }
            return Ok(BigInt::from(0));
        }
        Ok(BigInt::from_bytes_le(sign, mag))
    }

    pub(crate) fn finish(&self) -> Result<()> {
        if self.pos == self.bytes.len() {
            Ok(())
        } else {
            Err(LabError::Decode("trailing bytes".into()))
        }
    }
}
