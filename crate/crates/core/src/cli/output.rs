//! CSV layout shared with downstream plotting.
//!
//! Each file starts with one comment line
//! `# qfilter <version> schema=<kind>/<format> config_hash=<hex> seed=<n>`
//! followed by a header row. Numbers use the shortest representation that
//! round-trips; infinities are written as `inf`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::Result;

use super::config::FORMAT_VERSION;

/// Trajectory columns; ensemble files start with the same columns.
pub const TRAJECTORY_COLUMNS: [&str; 11] = [
    "t",
    "P_L_real",
    "P_L_est",
    "P_L_ideal",
    "C_fid",
    "B_fid",
    "one_minus_C_fid",
    "one_minus_B_fid",
    "C_re",
    "B_re",
    "E_re",
];

pub const ENSEMBLE_STDERR_COLUMNS: [&str; 7] = [
    "P_L_real_stderr",
    "P_L_est_stderr",
    "C_fid_stderr",
    "B_fid_stderr",
    "C_re_stderr",
    "B_re_stderr",
    "E_re_stderr",
];

/// Metrics of the averaged states.
pub const ENSEMBLE_MOM_COLUMNS: [&str; 5] = ["C_fid_mom", "B_fid_mom", "C_re_mom", "B_re_mom", "E_re_mom"];

pub const ME2_COLUMN: &str = "P_L_me2";

pub const SWEEP_COLUMNS: [&str; 5] = ["t", "kappa", "C_re", "B_re", "E_re"];

pub const CROSSING_COLUMNS: [&str; 3] = ["kappa", "t_cross", "t_argmin_E"];

pub const GOAL_COLUMNS: [&str; 7] = ["t", "kappa", "O", "d1p", "d1m", "d2p", "d2m"];

pub const DISCORD_COLUMNS: [&str; 7] = ["state", "basis", "theta", "phi", "C", "D", "holds"];

/// Formats a number for CSV output.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else if x != 0.0 && (x.abs() < 1e-4 || x.abs() >= 1e15) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "nan".into(), fmt_num)
}

/// In-memory CSV document.
pub struct Csv {
    text: String,
    width: usize,
}

impl Csv {
    pub fn new(schema: &str, config_hash: &str, seed: u64, columns: &[&str]) -> Self {
        let mut text = String::new();
        writeln!(
            text,
            "# qfilter {} schema={schema}/{FORMAT_VERSION} config_hash={config_hash} seed={seed}",
            env!("CARGO_PKG_VERSION")
        )
        .unwrap();
        text.push_str(&columns.join(","));
        text.push('\n');
        Csv {
            text,
            width: columns.len(),
        }
    }

    pub fn row(&mut self, cells: &[String]) {
        debug_assert_eq!(cells.len(), self.width);
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn write(&self, dir: &Path, name: &str) -> Result<PathBuf> {
        write_file(dir, name, &self.text)
    }
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, contents)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formatting_round_trips() {
        for x in [0.0, 1.0, 0.1, -2.5, 1e-20, 3.3e-5, std::f64::consts::LN_2, 2f64.sqrt(), 1e16, 123456.789] {
            let s = fmt_num(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(fmt_num(f64::INFINITY), "inf");
        assert_eq!(fmt_num(0.5), "0.5");
        assert_eq!(fmt_num(1e-20), "1e-20");
        assert_eq!(fmt_opt(None), "nan");
    }

    #[test]
    fn header_and_rows() {
        let mut c = Csv::new("trajectory", "abcd", 9, &["t", "x"]);
        c.row(&[fmt_num(0.0), fmt_num(f64::INFINITY)]);
        let lines: Vec<&str> = c.as_str().lines().collect();
        assert!(lines[0].starts_with("# qfilter "));
        assert!(lines[0].ends_with("schema=trajectory/1 config_hash=abcd seed=9"));
        assert_eq!(lines[1], "t,x");
        assert_eq!(lines[2], "0,inf");
    }
}
