//! CSV and plot-script emission. Numbers are printed with a fixed format so
//! files are byte-stable across runs and platforms.

use std::path::{Path, PathBuf};

use crate::HarnessError;

/// Fixed 9-decimal rendering; `None` becomes an empty field.
pub fn num(x: Option<f64>) -> String {
    match x {
        Some(v) if v == 0.0 => "0.000000000".to_owned(),
        Some(v) => format!("{v:.9}"),
        None => String::new(),
    }
}

pub fn db(x: f64) -> String {
    if x == 0.0 {
        "0.00".to_owned()
    } else {
        format!("{x:.2}")
    }
}

/// Rows accumulated in memory and written in one go.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.header.len(), "row width");
        self.rows.push(row);
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, HarnessError> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().map_err(|e| HarnessError::Io(e.into_error()))
    }

    pub fn write(&self, dir: &Path, name: &str) -> Result<PathBuf, HarnessError> {
        std::fs::create_dir_all(dir)?;
        let path = dir.join(name);
        std::fs::write(&path, self.to_csv()?)?;
        Ok(path)
    }
}

/// One plotted series: column `y` restricted to rows whose `filter`
/// columns hold the given literal values.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub label: String,
    pub y: usize,
    pub filter: Vec<(usize, String)>,
}

/// gnuplot script drawing `curves` from `csv` against column `x`.
pub fn gnuplot_script(csv: &str, title: &str, x: (usize, &str), y_label: &str, curves: &[Curve]) -> String {
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set terminal pngcairo size 900,600\n");
    s.push_str(&format!("set output '{}.png'\n", csv.trim_end_matches(".csv")));
    s.push_str(&format!("set title '{title}'\n"));
    s.push_str(&format!("set xlabel '{}'\n", x.1));
    s.push_str(&format!("set ylabel '{y_label}'\n"));
    s.push_str("set key outside right\n");
    let lines: Vec<String> = curves
        .iter()
        .map(|c| {
            let cond: Vec<String> =
                c.filter.iter().map(|(col, v)| format!("strcol({}) eq '{}'", col + 1, v)).collect();
            let y = if cond.is_empty() {
                format!("{}", c.y + 1)
            } else {
                format!("({} ? ${} : NaN)", cond.join(" && "), c.y + 1)
            };
            format!("'{csv}' skip 1 using {}:{y} with linespoints title '{}'", x.0 + 1, c.label)
        })
        .collect();
    s.push_str(&format!("plot {}\n", lines.join(", \\\n     ")));
    s
}

pub fn write_text(dir: &Path, name: &str, text: &str) -> Result<PathBuf, HarnessError> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, text)?;
    Ok(path)
}
