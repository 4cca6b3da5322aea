//! Fixed-precision CSV rendering shared by all commands.

use serde::Serialize;

/// Ratios and intensities: four decimals.
pub fn ratio(x: f64) -> String {
    format!("{x:.4}")
}

/// Counts, energies and throughputs: four significant digits.
pub fn sci(x: f64) -> String {
    format!("{x:.3e}")
}

pub fn field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Accumulates CSV lines; nothing reaches stdout until the command
/// succeeds.
#[derive(Default)]
pub struct Table {
    out: String,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        let mut t = Self::default();
        t.row(header.iter().map(|s| s.to_string()));
        t
    }

    pub fn row<I: IntoIterator<Item = String>>(&mut self, cells: I) {
        let line: Vec<String> = cells.into_iter().collect();
        self.out.push_str(&line.join(","));
        self.out.push('\n');
    }

    /// `#key,value` trailer line.
    pub fn trailer(&mut self, key: &str, value: String) {
        self.out.push_str(&format!("#{key},{value}\n"));
    }

    pub fn finish(self) -> String {
        self.out
    }
}

pub fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report values serialize");
    s.push('\n');
    s
}
