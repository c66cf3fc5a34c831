//! Plain-text eigenvalue tables.

use thiserror::Error;

use crate::sequence::{SequenceError, SpectralSequence};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IngestError {
    #[error("line {0}: not a real number")]
    ParseError(usize),
    #[error("line {0}: value does not exceed the previous one")]
    NonMonotone(usize),
    #[error("line {0}: value is not finite")]
    NonFinite(usize),
    #[error("input is not valid UTF-8")]
    Encoding,
    #[error(transparent)]
    Sequence(#[from] SequenceError),
}

/// Parsed table with the largest number of decimal places seen.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroTable {
    pub sequence: SpectralSequence,
    pub precision: usize,
}

/// One real per line; blank lines and lines starting with `#` are skipped.
/// Line numbers in errors are 1-based.
pub fn parse_zero_table(bytes: &[u8]) -> Result<ZeroTable, IngestError> {
    let text = std::str::from_utf8(bytes).map_err(|_| IngestError::Encoding)?;
    let mut values = Vec::new();
    let mut precision = 0;
    let mut prev: Option<f64> = None;
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let x: f64 = t.parse().map_err(|_| IngestError::ParseError(line_no))?;
        if !x.is_finite() {
            return Err(IngestError::NonFinite(line_no));
        }
        if prev.is_some_and(|p| x <= p) {
            return Err(IngestError::NonMonotone(line_no));
        }
        prev = Some(x);
        precision = precision.max(decimal_places(t));
        values.push(x);
    }
    Ok(ZeroTable {
        sequence: SpectralSequence::new(values, "zero table")?,
        precision,
    })
}

fn decimal_places(token: &str) -> usize {
    let mantissa = token.split(['e', 'E']).next().unwrap_or("");
    mantissa.split_once('.').map_or(0, |(_, frac)| {
        frac.chars().take_while(char::is_ascii_digit).count()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_two_zero_heights() {
        let t = parse_zero_table(b"14.134725\n21.022040\n").unwrap();
        assert_eq!(t.sequence.values(), &[14.134725, 21.02204]);
        assert_eq!(t.precision, 6);
    }

    #[test]
    fn skips_comments_and_blanks() {
        let t = parse_zero_table(b"# header\n1.0\n\n2.0\n").unwrap();
        assert_eq!(t.sequence.values(), &[1.0, 2.0]);
    }

    #[test]
    fn reports_line_numbers() {
        assert_eq!(
            parse_zero_table(b"1.0\nabc\n"),
            Err(IngestError::ParseError(2))
        );
        assert_eq!(
            parse_zero_table(b"# c\n2.0\n1.0\n"),
            Err(IngestError::NonMonotone(3))
        );
        assert_eq!(
            parse_zero_table(b"1.0\ninf\n"),
            Err(IngestError::NonFinite(2))
        );
    }

    #[test]
    fn crlf_and_exponents() {
        let t = parse_zero_table(b"1.25e1\r\n  13.5  \r\n").unwrap();
        assert_eq!(t.sequence.values(), &[12.5, 13.5]);
        assert_eq!(t.precision, 2);
    }
}
