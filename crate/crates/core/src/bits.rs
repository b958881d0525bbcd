//! Fixed-width bit strings, one machine word wide.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest supported number of circuit lines.
pub const MAX_WIDTH: usize = 64;

/// Mask with the low `width` bits set.
#[inline]
pub fn width_mask(width: usize) -> u64 {
    debug_assert!(width <= MAX_WIDTH);
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

pub(crate) fn check_width(width: usize) -> Result<()> {
    if (1..=MAX_WIDTH).contains(&width) {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "width must be in 1..={MAX_WIDTH}, got {width}"
        )))
    }
}

/// An `n`-bit value where line `i` is bit `i`.
///
/// Bits above `width - 1` are always zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    width: u8,
    bits: u64,
}

impl BitString {
    pub fn new(width: usize, bits: u64) -> Result<Self> {
        check_width(width)?;
        if bits & !width_mask(width) != 0 {
            return Err(Error::invalid(format!(
                "value {bits:#x} does not fit in {width} bits"
            )));
        }
        Ok(BitString {
            width: width as u8,
            bits,
        })
    }

    /// Builds a bit string, discarding bits at or above `width`.
    pub fn truncated(width: usize, bits: u64) -> Result<Self> {
        check_width(width)?;
        Ok(BitString {
            width: width as u8,
            bits: bits & width_mask(width),
        })
    }

    pub fn zero(width: usize) -> Result<Self> {
        Self::new(width, 0)
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width as usize
    }

    #[inline]
    pub fn bits(&self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn get(&self, line: usize) -> bool {
        line < self.width() && (self.bits >> line) & 1 == 1
    }

    pub fn with_flipped(self, line: usize) -> Result<Self> {
        if line >= self.width() {
            return Err(Error::invalid(format!(
                "line {line} out of range for width {}",
                self.width
            )));
        }
        Ok(BitString {
            bits: self.bits ^ (1 << line),
            ..self
        })
    }

    pub fn count_ones(&self) -> u32 {
        self.bits.count_ones()
    }

    /// Renders the value as `width` binary digits, highest line first.
    pub fn to_binary_string(&self) -> String {
        format!("{:0width$b}", self.bits, width = self.width())
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_binary_string())
    }
}

/// Parses the binary form produced by [`BitString::to_binary_string`].
impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() || s.len() > MAX_WIDTH || !s.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(Error::format("bit string", format!("{s:?}")));
        }
        let bits = u64::from_str_radix(s, 2).map_err(|e| Error::format("bit string", e))?;
        BitString::new(s.len(), bits)
    }
}
