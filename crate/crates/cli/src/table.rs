//! In-memory result tables and their CSV form.

use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

/// One CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Real(f64),
    Count(u64),
    Text(String),
}

impl Value {
    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Value::Real(x) => Some(x),
            Value::Count(n) => Some(n as f64),
            Value::Text(_) => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            // 17 significant digits round-trip every f64.
            Value::Real(x) => write!(f, "{x:.16e}"),
            Value::Count(n) => write!(f, "{n}"),
            Value::Text(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Numeric values of the named column.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column_index(name)?;
        self.rows.iter().map(|r| r[i].as_f64()).collect()
    }

    /// Writes the table as comma-separated values with LF line endings.
    pub fn write_csv<W: Write>(&self, w: W) -> io::Result<()> {
        let mut out = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(w);
        out.write_record(&self.header)?;
        for row in &self.rows {
            out.write_record(row.iter().map(ToString::to_string))?;
        }
        out.flush()
    }

    pub fn write_csv_file(&self, path: &Path) -> io::Result<()> {
        let mut file = BufWriter::new(File::create(path)?);
        self.write_csv(&mut file)?;
        file.flush()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut t = Table::new(["theta1_rad", "state", "n"]);
        t.push(vec![Value::Real(0.5), Value::Text("sf".into()), Value::Count(4)]);
        t.push(vec![Value::Real(-1.0 / 3.0), Value::Text("mi".into()), Value::Count(30)]);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "theta1_rad,state,n\n\
             5.0000000000000000e-1,sf,4\n\
             -3.3333333333333331e-1,mi,30\n"
        );
        assert_eq!(t.column("n").unwrap(), vec![4.0, 30.0]);
        assert!(t.column("state").is_none());
        assert!(t.column("missing").is_none());
    }

    #[test]
    fn reals_round_trip() {
        for x in [0.1, 1.0 / 3.0, std::f64::consts::PI, 1e-300, -7.5e200] {
            let s = Value::Real(x).to_string();
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
    }
}
