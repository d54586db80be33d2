//! Number formatting and output routing.

use std::fs;
use std::path::Path;

use crate::commands::Failure;

/// Six significant digits: fixed notation for moderate magnitudes,
/// scientific otherwise.
pub fn g6(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..6).contains(&mag) {
        let decimals = (5 - mag).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let s = format!("{x:.5e}");
        let (mantissa, exp) = s.split_once('e').expect("exponent");
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        format!("{mantissa}e{exp}")
    }
}

pub fn list(xs: &[f64]) -> String {
    xs.iter().map(|&x| g6(x)).collect::<Vec<_>>().join(", ")
}

pub fn yes(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

/// Writes `text` to `path`, or to standard output when no path is given.
pub fn emit(text: &str, path: Option<&Path>) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_digits() {
        assert_eq!(g6(0.385543289), "0.385543");
        assert_eq!(g6(2.0), "2");
        assert_eq!(g6(-1.0 / 3.0), "-0.333333");
        assert_eq!(g6(123456.7), "123457");
        assert_eq!(g6(1234567.0), "1.23457e6");
        assert_eq!(g6(1.5e-9), "1.5e-9");
        assert_eq!(g6(f64::INFINITY), "inf");
        assert_eq!(g6(0.0), "0");
    }
}
