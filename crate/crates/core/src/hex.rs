// SPDX-License-Identifier: Apache-2.0
//! Fixed-width big-endian hex parsing.

use crate::error::{Error, Result};

/// Parse exactly `bits / 4` hex digits (an optional `0x` prefix is allowed).
/// Upper and lower case are accepted.
pub fn parse_fixed(s: &str, bits: u32) -> Result<u128> {
    let digits = s
        .strip_prefix("0x")
        .or_else(|| s.strip_prefix("0X"))
        .unwrap_or(s);
    let expected = (bits / 4) as usize;
    if digits.len() != expected {
        return Err(Error::HexWidth {
            bits,
            expected,
            got: digits.len(),
        });
    }
    if !digits.bytes().all(|b| b.is_ascii_hexdigit()) {
        return Err(Error::InvalidHex(s.to_string()));
    }
    u128::from_str_radix(digits, 16).map_err(|_| Error::InvalidHex(s.to_string()))
}

pub fn parse_u16(s: &str) -> Result<u16> {
    parse_fixed(s, 16).map(|v| v as u16)
}

pub fn parse_u32(s: &str) -> Result<u32> {
    parse_fixed(s, 32).map(|v| v as u32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn widths() {
        assert_eq!(parse_fixed("00ff", 16).unwrap(), 0xff);
        assert_eq!(parse_fixed("0xABcd", 16).unwrap(), 0xabcd);
        assert!(matches!(
            parse_fixed("abc", 16),
            Err(Error::HexWidth {
                expected: 4,
                got: 3,
                ..
            })
        ));
        assert!(matches!(parse_fixed("zzzz", 16), Err(Error::InvalidHex(_))));
        // 126-bit key string: 31.5 digits is impossible, 31 digits is the closest
        assert!(parse_fixed(&"f".repeat(31), 128).is_err());
    }
}
