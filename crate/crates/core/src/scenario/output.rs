//! Curve tables with a metadata header, and config hashing.

use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::io::Write;

use crate::error::{Error, Result};

/// Build identifier written into every output.
pub fn build_id() -> String {
    format!("ionlight {}", env!("CARGO_PKG_VERSION"))
}

/// Lower-case hex SHA-256 of the raw config bytes.
pub fn config_hash(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Named columns over one independent variable.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveOutput {
    pub variable: String,
    pub values: Vec<f64>,
    pub series: Vec<(String, Vec<f64>)>,
    pub metadata: BTreeMap<String, String>,
}

impl CurveOutput {
    pub fn new(variable: &str, values: Vec<f64>) -> Self {
        Self {
            variable: variable.to_string(),
            values,
            series: Vec::new(),
            metadata: BTreeMap::new(),
        }
    }

    pub fn push_series(&mut self, name: &str, values: Vec<f64>) -> Result<()> {
        if values.len() != self.values.len() {
            return Err(Error::invalid(
                name,
                format!("series has {} rows, expected {}", values.len(), self.values.len()),
            ));
        }
        self.series.push((name.to_string(), values));
        Ok(())
    }

    pub fn series(&self, name: &str) -> Option<&[f64]> {
        self.series.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.insert(key.to_string(), value.to_string());
    }

    /// `# key=value` lines, a header row, then one row per grid point.
    /// Floats use the shortest representation that round-trips.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        for (k, v) in &self.metadata {
            writeln!(out, "# {k}={v}")?;
        }
        let mut header = vec![self.variable.as_str()];
        header.extend(self.series.iter().map(|(n, _)| n.as_str()));
        writeln!(out, "{}", header.join(","))?;
        for (i, x) in self.values.iter().enumerate() {
            let mut row = format!("{x}");
            for (_, s) in &self.series {
                row.push_str(&format!(",{}", s[i]));
            }
            writeln!(out, "{row}")?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("ASCII output"))
    }
}

/// Reads the `# key=value` header lines of an output.
pub fn read_metadata(text: &str) -> BTreeMap<String, String> {
    text.lines()
        .map_while(|l| l.strip_prefix("# "))
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

/// Whether an output was produced from exactly these config bytes.
pub fn verify_config_hash(output: &str, config: &[u8]) -> bool {
    read_metadata(output).get("config_sha256") == Some(&config_hash(config))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout_and_hash() {
        let mut c = CurveOutput::new("nbar", vec![64.0, 100.5]);
        c.push_series("p", vec![0.1, 1.0 / 3.0]).unwrap();
        c.meta("config_sha256", config_hash(b"x"));
        let s = c.to_csv_string().unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[1], "nbar,p");
        assert_eq!(lines[2], "64,0.1");
        assert_eq!(lines[3], "100.5,0.3333333333333333");
        assert!(verify_config_hash(&s, b"x"));
        assert!(!verify_config_hash(&s, b"y"));
        assert!(c.push_series("q", vec![1.0]).is_err());
    }

    #[test]
    fn known_digest() {
        assert_eq!(
            config_hash(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
