use serde::{Deserialize, Serialize};

/// Default acceptance slack for sampled inequalities.
pub const DEFAULT_TOLERANCE: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

/// Outcome of checking one inequality on a grid of radii.
///
/// Margins are signed so that positive values favour the inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub check: String,
    pub r_range: (f64, f64),
    pub grid_size: usize,
    pub min_margin: f64,
    pub worst_r: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl BoundReport {
    /// Builds a report from `(r, margin)` pairs; the verdict is pass iff every
    /// margin is at least `-tolerance`. NaN margins fail.
    pub fn from_margins<I>(check: &str, r_range: (f64, f64), tolerance: f64, margins: I) -> Self
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let mut min_margin = f64::INFINITY;
        let mut worst_r = f64::NAN;
        let mut count = 0usize;
        let mut nan = false;
        for (r, m) in margins {
            count += 1;
            if m.is_nan() {
                nan = true;
                worst_r = r;
                continue;
            }
            if m < min_margin && !nan {
                min_margin = m;
                worst_r = r;
            }
        }
        if nan {
            min_margin = f64::NAN;
        }
        let ok = !nan && count > 0 && min_margin >= -tolerance;
        BoundReport {
            check: check.to_string(),
            r_range,
            grid_size: count,
            min_margin,
            worst_r,
            tolerance,
            verdict: if ok { Verdict::Pass } else { Verdict::Fail },
            note: None,
        }
    }

    /// A failed report carrying an error message instead of data.
    pub fn failed(check: &str, r_range: (f64, f64), tolerance: f64, why: String) -> Self {
        BoundReport {
            check: check.to_string(),
            r_range,
            grid_size: 0,
            min_margin: f64::NAN,
            worst_r: f64::NAN,
            tolerance,
            verdict: Verdict::Fail,
            note: Some(why),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }
}
