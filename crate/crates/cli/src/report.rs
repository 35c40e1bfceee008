//! Plain-text run reports and CSV output.

use std::fmt::Display;
use std::fs;
use std::path::Path;
use std::time::Instant;

use sha2::{Digest, Sha256};

/// Lowercase hex SHA-256 of `bytes`.
pub fn digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// A real with 17 significant digits, `.` as decimal separator.
pub fn real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// `x` rounded to `places` decimals, toward `-inf` or `+inf`.
pub fn rounded(x: f64, places: i32, up: bool) -> String {
    let scale = 10f64.powi(places);
    let y = if up { (x * scale).ceil() } else { (x * scale).floor() } / scale;
    format!("{y:.*}", places as usize)
}

pub struct Report {
    started: Instant,
    lines: Vec<String>,
    warnings: Vec<String>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            started: Instant::now(),
            lines: vec![format!("command={command}")],
            warnings: Vec::new(),
        }
    }

    pub fn field(&mut self, key: &str, value: impl Display) -> &mut Self {
        self.lines.push(format!("{key}={value}"));
        self
    }

    pub fn real(&mut self, key: &str, value: f64) -> &mut Self {
        self.field(key, real(value))
    }

    pub fn theorem(&mut self, statement: &str) -> &mut Self {
        self.field("theorem", statement)
    }

    pub fn warn(&mut self, message: impl Into<String>) {
        self.warnings.push(message.into());
    }

    pub fn warn_all(&mut self, messages: impl IntoIterator<Item = String>) {
        self.warnings.extend(messages);
    }

    /// Finished report text, warnings and wall time last.
    pub fn render(&self) -> String {
        let mut out = self.lines.join("\n");
        for w in &self.warnings {
            out.push_str(&format!("\nwarning: {w}"));
        }
        out.push_str(&format!("\nwall_time_s={:.6}\n", self.started.elapsed().as_secs_f64()));
        out
    }
}

/// Comma-separated table with a header row.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Csv {
            text: header.join(",") + "\n",
        }
    }

    pub fn row(&mut self, cells: &[String]) {
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        fs::write(path, &self.text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_keep_seventeen_digits() {
        assert_eq!(real(0.1), "1.0000000000000001e-1");
        assert_eq!(real(-2.0), "-2.0000000000000000e0");
        assert_eq!(real(f64::NEG_INFINITY), "-inf");
        let x = std::f64::consts::LN_2 / std::f64::consts::LN_10;
        assert_eq!(real(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn outward_rounding() {
        assert_eq!(rounded(0.630929753571, 10, false), "0.6309297535");
        assert_eq!(rounded(0.630929753571, 10, true), "0.6309297536");
    }

    #[test]
    fn digest_of_empty_input() {
        assert_eq!(
            digest(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }
}
