//! Packed 8-nt domain sequences.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

pub const DOMAIN_LEN: usize = 8;

const BASES: [u8; 4] = *b"ACGT";

/// An 8-mer over {A, C, G, T}, two bits per base with the 5' base in the
/// high bits. Complement is `code ^ 0b11` per base.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DomainSeq(u16);

impl DomainSeq {
    pub const POLY_T: DomainSeq = DomainSeq(0xFFFF);

    pub const fn from_code(code: u16) -> Self {
        DomainSeq(code)
    }

    pub const fn code(self) -> u16 {
        self.0
    }

    /// Base code (0..4) at position `i` counted from the 5' end.
    pub fn base(self, i: usize) -> u8 {
        ((self.0 >> (2 * (DOMAIN_LEN - 1 - i))) & 0b11) as u8
    }

    pub fn reverse_complement(self) -> DomainSeq {
        let mut out = 0u16;
        let mut v = self.0;
        for _ in 0..DOMAIN_LEN {
            out = (out << 2) | (v & 0b11);
            v >>= 2;
        }
        DomainSeq(!out)
    }

    pub fn hamming(self, other: DomainSeq) -> u32 {
        let diff = self.0 ^ other.0;
        ((diff | (diff >> 1)) & 0x5555).count_ones()
    }

    pub fn gc_count(self) -> u32 {
        // C = 01, G = 10: exactly one of the two bits is set
        let v = self.0;
        ((v ^ (v >> 1)) & 0x5555).count_ones()
    }

    /// Length of the longest run of one repeated base.
    pub fn longest_run(self) -> u32 {
        let mut best = 1;
        let mut run = 1;
        for i in 1..DOMAIN_LEN {
            if self.base(i) == self.base(i - 1) {
                run += 1;
                best = best.max(run);
            } else {
                run = 1;
            }
        }
        best
    }

    pub fn all() -> impl Iterator<Item = DomainSeq> {
        (0..=u16::MAX).map(DomainSeq)
    }
}

/// Reverse complement of an 8-mer given as text.
pub fn reverse_complement(seq: &str) -> Result<String, Error> {
    Ok(seq.parse::<DomainSeq>()?.reverse_complement().to_string())
}

impl FromStr for DomainSeq {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let n = s.chars().count();
        if n != DOMAIN_LEN {
            return Err(Error::LengthMismatch(n));
        }
        let mut code = 0u16;
        for c in s.chars() {
            let b = match c.to_ascii_uppercase() {
                'A' => 0,
                'C' => 1,
                'G' => 2,
                'T' => 3,
                other => return Err(Error::InvalidBase(other)),
            };
            code = (code << 2) | b;
        }
        Ok(DomainSeq(code))
    }
}

impl fmt::Display for DomainSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut buf = [0u8; DOMAIN_LEN];
        for (i, b) in buf.iter_mut().enumerate() {
            *b = BASES[self.base(i) as usize];
        }
        f.write_str(std::str::from_utf8(&buf).unwrap())
    }
}

impl fmt::Debug for DomainSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DomainSeq({self})")
    }
}

impl Serialize for DomainSeq {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DomainSeq {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
