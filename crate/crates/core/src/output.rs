//! Plain-text formatting shared by every emitted artifact.

use std::fmt::Write;

/// Formats `x` like C's `%.9g`: nine significant digits, trailing zeros
/// trimmed, exponent form outside `1e-4 <= |x| < 1e9`.
pub fn fmt_sig(x: f64) -> String {
    fmt_sig_digits(x, 9)
}

pub fn fmt_sig_digits(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// CSV writer with leading `#` comment lines.
#[derive(Debug, Clone, Default)]
pub struct CsvTable {
    comments: Vec<String>,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            comments: Vec::new(),
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn comment(&mut self, line: impl Into<String>) -> &mut Self {
        self.comments.push(line.into());
        self
    }

    pub fn push_row(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            let _ = writeln!(out, "# {c}");
        }
        let _ = writeln!(out, "{}", self.header.join(","));
        for r in &self.rows {
            let _ = writeln!(out, "{}", r.join(","));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    #[allow(clippy::approx_constant, clippy::excessive_precision)]
    fn matches_printf_g() {
        assert_eq!(fmt_sig(0.70710678118654757), "0.707106781");
        assert_eq!(fmt_sig(-64.0), "-64");
        assert_eq!(fmt_sig(1.0 / 3.0), "0.333333333");
        assert_eq!(fmt_sig(1.5e-7), "1.5e-07");
        assert_eq!(fmt_sig(123456789.0), "123456789");
        assert_eq!(fmt_sig(1234567890.0), "1.23456789e+09");
        assert_eq!(fmt_sig(0.0001), "0.0001");
        assert_eq!(fmt_sig(4096.0), "4096");
        assert_eq!(fmt_sig(9.9999999999), "10");
        assert_eq!(fmt_sig(f64::NAN), "nan");
    }

    #[test]
    fn csv_layout() {
        let mut t = CsvTable::new(["a", "b"]);
        t.comment("version 1");
        t.push_row(vec!["1".into(), "2".into()]);
        assert_eq!(t.render(), "# version 1\na,b\n1,2\n");
    }
}
