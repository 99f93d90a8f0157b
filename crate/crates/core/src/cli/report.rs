use serde::{Deserialize, Serialize};

pub const REPORT_FILE: &str = "report.json";
pub const ARTIFACT_VERSION: &str = concat!("kahlerq ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckResult {
    /// Passes when `residual ≤ tolerance`; NaN fails.
    pub fn at_most(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self { name: name.into(), residual, tolerance, pass: residual <= tolerance }
    }

    /// Passes when `value ∈ [lo, hi]`; reports the distance from the centre.
    pub fn within(name: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        let centre = 0.5 * (lo + hi);
        Self {
            name: name.into(),
            residual: (value - centre).abs(),
            tolerance: 0.5 * (hi - lo),
            pass: (lo..=hi).contains(&value),
        }
    }

    /// Pass/fail condition with no numeric residual (residual 0 or 1).
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self { name: name.into(), residual: if ok { 0.0 } else { 1.0 }, tolerance: 0.0, pass: ok }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub artifact_version: String,
    pub config_echo: serde_json::Value,
    pub checks: Vec<CheckResult>,
    pub pass: bool,
    /// Kind-specific results, read back by `plot`.
    pub data: serde_json::Value,
    /// Excluded from determinism comparisons.
    pub wall_time_ms: u64,
}

impl RunReport {
    pub fn kind(&self) -> Option<&str> {
        self.config_echo.get("kind").and_then(|k| k.as_str())
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is serializable");
        s.push('\n');
        s
    }
}
