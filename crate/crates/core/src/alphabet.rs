use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Bits per symbol of a text: one of 1, 2, 3, 4 or 8.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AlphabetBits(u8);

impl AlphabetBits {
    pub const SUPPORTED: [u8; 5] = [1, 2, 3, 4, 8];

    pub fn new(bits: u8) -> Result<Self> {
        if Self::SUPPORTED.contains(&bits) {
            Ok(Self(bits))
        } else {
            Err(Error::invalid(format!(
                "unsupported alphabet width {bits} (expected one of 1, 2, 3, 4, 8)"
            )))
        }
    }

    pub fn all() -> impl Iterator<Item = AlphabetBits> {
        Self::SUPPORTED.into_iter().map(AlphabetBits)
    }

    pub fn get(self) -> u8 {
        self.0
    }

    /// Number of symbols, `2^bits`.
    pub fn sigma(self) -> usize {
        1 << self.0
    }

    #[inline]
    pub fn contains(self, symbol: u8) -> bool {
        (symbol as usize) < self.sigma()
    }
}

impl TryFrom<u8> for AlphabetBits {
    type Error = Error;

    fn try_from(bits: u8) -> Result<Self> {
        Self::new(bits)
    }
}

impl FromStr for AlphabetBits {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits: u8 = s
            .trim()
            .parse()
            .map_err(|_| Error::invalid(format!("alphabet width {s:?} is not a number")))?;
        Self::new(bits)
    }
}

impl fmt::Display for AlphabetBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn only_five_widths() {
        for b in 0..=16u8 {
            assert_eq!(AlphabetBits::new(b).is_ok(), [1, 2, 3, 4, 8].contains(&b));
        }
        assert_eq!("8".parse::<AlphabetBits>().unwrap().sigma(), 256);
        assert!("x".parse::<AlphabetBits>().is_err());
        assert!(AlphabetBits::new(3).unwrap().contains(7));
        assert!(!AlphabetBits::new(3).unwrap().contains(8));
    }
}
