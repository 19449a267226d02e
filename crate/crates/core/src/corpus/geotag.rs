//! `{{coord}}` template parsing.
//!
//! Accepted positional forms, hemisphere letters case-insensitive:
//!
//! ```text
//! {{coord|lat|lon}}                       signed decimal degrees
//! {{coord|lat|N|lon|E}}                   unsigned decimal with hemispheres
//! {{coord|d|m|N|d|m|E}}                   degrees, minutes
//! {{coord|d|m|s|N|d|m|s|E}}               degrees, minutes, seconds
//! ```
//!
//! Named arguments (`display=`, `format=`, ...) are ignored, as are the
//! trailing `type:city`-style parameter strings.

use thiserror::Error;

use super::Coordinate;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeotagError {
    #[error("coordinate ({lat}, {lon}) out of range")]
    OutOfRange { lat: f64, lon: f64 },
    #[error("unparseable coord template: {0}")]
    Malformed(String),
}

/// Parses the first coord template in `wikitext`. `Ok(None)` when there is
/// none.
pub fn extract_geotag(wikitext: &str) -> Result<Option<Coordinate>, GeotagError> {
    let Some(args) = first_coord_args(wikitext) else {
        return Ok(None);
    };
    let positional: Vec<&str> = args.split('|').map(str::trim).filter(|a| !a.contains('=')).collect();
    let (lat, lon) =
        parse_positional(&positional).ok_or_else(|| GeotagError::Malformed(format!("{{{{coord|{args}}}}}")))?;
    Coordinate::new(lat, lon)
        .map(Some)
        .ok_or(GeotagError::OutOfRange { lat, lon })
}

fn first_coord_args(wikitext: &str) -> Option<&str> {
    let mut from = 0;
    while let Some(p) = wikitext[from..].find("{{") {
        let start = from + p + 2;
        let body = &wikitext[start..];
        let name_end = body.find(['|', '}']).unwrap_or(body.len());
        if body[..name_end].trim().eq_ignore_ascii_case("coord") && body[name_end..].starts_with('|') {
            let args = &body[name_end + 1..];
            let end = args.find("}}")?;
            return Some(&args[..end]);
        }
        from = start;
    }
    None
}

fn parse_positional(args: &[&str]) -> Option<(f64, f64)> {
    let hemi_at = |from: usize, letters: [&str; 2]| {
        (from..args.len().min(from + 4)).find(|&i| letters.iter().any(|l| args[i].eq_ignore_ascii_case(l)))
    };
    match hemi_at(0, ["N", "S"]) {
        Some(ns) if (1..=3).contains(&ns) => {
            let ew = hemi_at(ns + 1, ["E", "W"])?;
            let lon_parts = ew - ns - 1;
            if !(1..=3).contains(&lon_parts) {
                return None;
            }
            let lat = sexagesimal(&args[..ns])?;
            let lon = sexagesimal(&args[ns + 1..ew])?;
            let lat = if args[ns].eq_ignore_ascii_case("S") { -lat } else { lat };
            let lon = if args[ew].eq_ignore_ascii_case("W") { -lon } else { lon };
            Some((lat, lon))
        }
        Some(_) => None,
        None => {
            let lat = number(args.first()?)?;
            let lon = number(args.get(1)?)?;
            Some((lat, lon))
        }
    }
}

/// Degrees with optional minutes and seconds; components must be
/// non-negative and minutes/seconds below 60.
fn sexagesimal(parts: &[&str]) -> Option<f64> {
    let mut value = 0.0;
    for (i, part) in parts.iter().enumerate() {
        let x = number(part)?;
        if x < 0.0 || (i > 0 && x >= 60.0) {
            return None;
        }
        value += x / 60f64.powi(i as i32);
    }
    Some(value)
}

fn number(s: &str) -> Option<f64> {
    let s = s.trim();
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit() || matches!(b, b'.' | b'-' | b'+')) {
        return None;
    }
    s.parse::<f64>().ok().filter(|x| x.is_finite())
}
