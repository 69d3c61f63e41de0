//! Text container for scalar fields.
//!
//! ```text
//! gpf v1 dim=2 n=64 L=6
//! 0x1.8p-1
//! -0x1.2b7e151628aedp+3
//! ...
//! ```
//!
//! One value per line in node order, written as hexadecimal floats so that a
//! dump and its parse agree bit for bit.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::grid::build_grid;

const MAGIC: &str = "gpf";
const VERSION: &str = "v1";

/// Render `x` like C's `%a`: `0x1.<hex>p<exp>`, trailing zero digits removed.
pub fn format_hex_float(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { "-" } else { "" };
    let biased = ((bits >> 52) & 0x7ff) as i32;
    let mantissa = bits & ((1u64 << 52) - 1);
    if biased == 0 && mantissa == 0 {
        return format!("{sign}0x0p+0");
    }
    let (lead, exp) = if biased == 0 {
        (0, -1022)
    } else {
        (1, biased - 1023)
    };
    let mut out = format!("{sign}0x{lead}");
    if mantissa != 0 {
        let digits = format!("{mantissa:013x}");
        out.push('.');
        out.push_str(digits.trim_end_matches('0'));
    }
    let _ = write!(out, "p{exp:+}");
    out
}

/// Inverse of [`format_hex_float`]; also accepts upper-case digits and an
/// omitted exponent sign.
pub fn parse_hex_float(s: &str) -> Option<f64> {
    let s = s.trim();
    match s {
        "nan" => return Some(f64::NAN),
        "inf" => return Some(f64::INFINITY),
        "-inf" => return Some(f64::NEG_INFINITY),
        _ => {}
    }
    let (negative, rest) = match s.as_bytes().first()? {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let rest = rest.strip_prefix("0x").or_else(|| rest.strip_prefix("0X"))?;
    let (mant, exp) = rest.split_once(['p', 'P'])?;
    let exp: i32 = exp.parse().ok()?;
    let (int_part, frac_part) = mant.split_once('.').unwrap_or((mant, ""));
    if int_part.is_empty() || int_part.len() > 1 || frac_part.len() > 13 {
        return None;
    }
    let mut m: u64 = 0;
    for c in int_part.chars().chain(frac_part.chars()) {
        m = (m << 4) | c.to_digit(16)? as u64;
    }
    // At most 53 significant bits, so the scaling below is exact except
    // where the result itself is subnormal and was written as such.
    let scale = exp - 4 * frac_part.len() as i32;
    let v = libm::scalbn(m as f64, scale);
    Some(if negative { -v } else { v })
}

/// Write a field in the dump format.
pub fn write_field<W: Write>(field: &ScalarField, mut out: W) -> Result<()> {
    let g = field.grid();
    writeln!(
        out,
        "{MAGIC} {VERSION} dim={} n={} L={}",
        g.dim(),
        g.points_per_axis(),
        g.half_width()
    )?;
    for &v in field.values() {
        writeln!(out, "{}", format_hex_float(v))?;
    }
    Ok(())
}

pub fn to_dump_string(field: &ScalarField) -> String {
    let mut buf = Vec::new();
    write_field(field, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("dump is ASCII")
}

fn parse_header(line: &str) -> Result<(usize, usize, f64)> {
    let bad = |reason: String| Error::Parse { line: 1, reason };
    let mut parts = line.split_whitespace();
    if parts.next() != Some(MAGIC) || parts.next() != Some(VERSION) {
        return Err(bad(format!("expected '{MAGIC} {VERSION}' header, got '{line}'")));
    }
    let mut dim = None;
    let mut n = None;
    let mut half_width = None;
    for part in parts {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| bad(format!("malformed header entry '{part}'")))?;
        let invalid = || bad(format!("invalid value for {key}: '{value}'"));
        match key {
            "dim" => dim = Some(value.parse::<usize>().map_err(|_| invalid())?),
            "n" => n = Some(value.parse::<usize>().map_err(|_| invalid())?),
            "L" => half_width = Some(value.parse::<f64>().map_err(|_| invalid())?),
            _ => return Err(bad(format!("unknown header key '{key}'"))),
        }
    }
    match (dim, n, half_width) {
        (Some(d), Some(n), Some(l)) => Ok((d, n, l)),
        _ => Err(bad("header needs dim, n and L".into())),
    }
}

/// Parse a dump, building the grid it names.
pub fn read_field<R: BufRead>(input: R) -> Result<ScalarField> {
    let mut lines = input.lines();
    let header = lines.next().ok_or(Error::Parse {
        line: 1,
        reason: "empty input".into(),
    })??;
    let (dim, n, half_width) = parse_header(&header)?;
    let grid = build_grid(dim, half_width, n)?;
    let mut values = Vec::with_capacity(grid.len());
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let v = parse_hex_float(&line).ok_or_else(|| Error::Parse {
            line: i + 2,
            reason: format!("not a hexadecimal float: '{line}'"),
        })?;
        values.push(v);
    }
    if values.len() != grid.len() {
        return Err(Error::Parse {
            line: values.len() + 1,
            reason: format!("expected {} values, found {}", grid.len(), values.len()),
        });
    }
    ScalarField::new(&grid, values)
}

pub fn parse_dump(text: &str) -> Result<ScalarField> {
    read_field(text.as_bytes())
}
