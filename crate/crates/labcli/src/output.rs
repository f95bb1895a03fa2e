//! Canonical JSON and CSV writers.

use std::io::{self, Write};
use std::path::Path;

use num_complex::Complex64;
use polyext::linalg::CMatrix;
use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::{json, Value};

/// Compact JSON with sorted keys and every float written with 17 significant digits.
struct Canonical;

impl Formatter for Canonical {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

pub fn to_canonical(value: &Value) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Canonical);
    value.serialize(&mut ser).expect("in-memory JSON serialization");
    buf.push(b'\n');
    String::from_utf8(buf).expect("JSON is UTF-8")
}

pub fn cx(z: Complex64) -> Value {
    json!([z.re, z.im])
}

pub fn cvec(zs: &[Complex64]) -> Value {
    Value::Array(zs.iter().map(|&z| cx(z)).collect())
}

/// Row-major array of rows of `[re, im]` pairs.
pub fn cmat(m: &CMatrix) -> Value {
    Value::Array((0..m.nrows()).map(|i| Value::Array((0..m.ncols()).map(|j| cx(m[(i, j)])).collect())).collect())
}

/// CSV with a header row and LF line endings.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Self { text }
    }

    pub fn row(&mut self, fields: &[f64]) {
        let cells: Vec<String> = fields.iter().map(|x| format!("{x:.16e}")).collect();
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

/// Header for `d` complex columns split into real and imaginary parts.
pub fn complex_header(d: usize) -> Vec<String> {
    (1..=d).flat_map(|k| [format!("z{k}re"), format!("z{k}im")]).collect()
}

pub fn emit(out: Option<&Path>, text: &str) -> io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => io::stdout().write_all(text.as_bytes()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_bit_exactly() {
        let xs = [0.1, 1.0 / 3.0, -2.5e-300, 1e300, 0.0, 5e-324, std::f64::consts::PI];
        let text = to_canonical(&json!(xs));
        let back: Vec<f64> = serde_json::from_str(&text).unwrap();
        for (a, b) in xs.iter().zip(&back) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn keys_are_sorted() {
        let text = to_canonical(&json!({"b": 1, "a": [1.5], "c": {"z": null, "y": true}}));
        assert_eq!(text, "{\"a\":[1.5000000000000000e0],\"b\":1,\"c\":{\"y\":true,\"z\":null}}\n");
    }

    #[test]
    fn csv_uses_lf() {
        let mut csv = Csv::new(&["a", "b"]);
        csv.row(&[1.0, -0.5]);
        assert_eq!(csv.into_string(), "a,b\n1.0000000000000000e0,-5.0000000000000000e-1\n");
    }
}
