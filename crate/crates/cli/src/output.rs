//! Number formatting and atomic file output.

use std::io::Write;
use std::path::Path;

use anyhow::Context;

/// `%.12g`: twelve significant digits, scientific only for very small or
/// very large magnitudes.
pub fn g12(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let exp = v.abs().log10().floor() as i32;
    if !(-5..12).contains(&exp) {
        let s = format!("{v:.11e}");
        let (mant, e) = s.split_once('e').expect("exponent present");
        return format!("{}e{e}", trim_zeros(mant));
    }
    let decimals = (11 - exp).max(0) as usize;
    trim_zeros(&format!("{v:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Writes `content` to `out` through a temporary file in the same directory,
/// or to stdout when no path is given.
pub fn emit(out: Option<&Path>, content: &str) -> anyhow::Result<()> {
    let Some(path) = out else {
        std::io::stdout().write_all(content.as_bytes())?;
        return Ok(());
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating a temporary file in {}", dir.display()))?;
    tmp.write_all(content.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(g12(1.0), "1");
        assert_eq!(g12(-0.5), "-0.5");
        assert_eq!(g12(1.2338962692634), "1.23389626926");
        assert_eq!(g12(123456.7890123456), "123456.789012");
        assert_eq!(g12(1.5e-7), "1.5e-7");
        assert_eq!(g12(2.0e13), "2e13");
        assert_eq!(g12(0.000123456789012345), "0.000123456789012");
    }

    #[test]
    fn round_trips_within_precision() {
        for v in [3.14159265358979, -2.718281828459045e-9, 6.02214076e23, 0.1] {
            let back: f64 = g12(v).parse().unwrap();
            assert!((back / v - 1.0).abs() < 1e-11, "{v} -> {}", g12(v));
        }
    }
}
