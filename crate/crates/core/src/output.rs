//! CSV output with a fixed number of significant digits.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::Result;

pub const SIGNIFICANT_DIGITS: usize = 12;

/// `%.{digits}g`-style formatting: shortest of fixed or scientific notation,
/// trailing zeros removed.
pub fn format_sig(v: f64, digits: usize) -> String {
    let digits = digits.clamp(1, 17);
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, v)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn fmt(v: f64) -> String {
    format_sig(v, SIGNIFICANT_DIGITS)
}

/// Round to what survives a write/read cycle through [`fmt`].
pub fn quantize(v: f64) -> f64 {
    if v.is_finite() {
        fmt(v).parse().expect("formatted float parses")
    } else {
        v
    }
}

/// Write a header plus rows, LF line endings.
pub fn write_csv<P, I, R>(path: P, header: &[&str], rows: I) -> Result<()>
where
    P: AsRef<Path>,
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(BufWriter::new(File::create(path)?));
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_text<P: AsRef<Path>>(path: P, text: &str) -> Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    f.write_all(text.as_bytes())?;
    f.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_style() {
        assert_eq!(fmt(0.0), "0");
        assert_eq!(fmt(-0.0), "0");
        assert_eq!(fmt(1.0), "1");
        assert_eq!(fmt(0.5), "0.5");
        assert_eq!(fmt(-2.5e-7), "-2.5e-07");
        assert_eq!(fmt(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt(123456.7890123456), "123456.789012");
        assert_eq!(fmt(1e12), "1e+12");
        assert_eq!(fmt(999999999999.9), "1e+12");
        assert_eq!(fmt(0.0001), "0.0001");
        assert_eq!(fmt(f64::NAN), "nan");
        assert_eq!(format_sig(std::f64::consts::PI, 4), "3.142");
    }

    #[test]
    fn quantize_is_idempotent() {
        for v in [0.1, 1.0 / 7.0, -3.3e-9, 12345.678901234567] {
            let q = quantize(v);
            assert_eq!(quantize(q), q);
            assert!((q - v).abs() <= 1e-11 * v.abs());
        }
    }
}
