//! Schema-versioned experiment records.

use serde::{Deserialize, Serialize};

use super::fit::{fit_linear, fit_power_law, fit_through_origin, LinearFit, PowerFit};

pub const SCHEMA_VERSION: u32 = 1;

/// Non-finite floats are written as `null` and read back as NaN.
pub mod nullable {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }

    pub mod vec {
        use serde::{Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
            s.collect_seq(v.iter().map(|x| x.is_finite().then_some(*x)))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
            Ok(Vec::<Option<f64>>::deserialize(d)?.into_iter().map(|x| x.unwrap_or(f64::NAN)).collect())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub x_label: String,
    pub y_label: String,
    #[serde(with = "nullable::vec")]
    pub x: Vec<f64>,
    #[serde(with = "nullable::vec")]
    pub y: Vec<f64>,
}

impl Series {
    pub fn new(name: &str, x_label: &str, y_label: &str, x: Vec<f64>, y: Vec<f64>) -> Self {
        Self { name: name.into(), x_label: x_label.into(), y_label: y_label.into(), x, y }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitKind {
    PowerLaw,
    Linear,
    ThroughOrigin,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitRecord {
    pub name: String,
    /// Name of the series the fit was computed from.
    pub series: String,
    pub kind: FitKind,
    #[serde(with = "nullable")]
    pub slope: f64,
    #[serde(with = "nullable")]
    pub intercept: f64,
    #[serde(with = "nullable")]
    pub r_squared: f64,
    #[serde(with = "nullable::vec")]
    pub residuals: Vec<f64>,
}

impl FitRecord {
    pub fn compute(name: &str, series: &Series, kind: FitKind) -> Self {
        let (slope, intercept, r_squared, residuals) = match kind {
            FitKind::PowerLaw => {
                let PowerFit { exponent, log_prefactor, r_squared, residuals } = fit_power_law(&series.x, &series.y);
                (exponent, log_prefactor, r_squared, residuals)
            }
            FitKind::Linear => {
                let LinearFit { slope, intercept, r_squared, residuals } = fit_linear(&series.x, &series.y);
                (slope, intercept, r_squared, residuals)
            }
            FitKind::ThroughOrigin => {
                let a = fit_through_origin(&series.x, &series.y);
                let residuals: Vec<f64> = series.x.iter().zip(&series.y).map(|(x, y)| y - a * x).collect();
                let ss_res: f64 = residuals.iter().map(|r| r * r).sum();
                let ss_tot: f64 = series.y.iter().map(|y| y * y).sum();
                let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
                (a, 0.0, r2, residuals)
            }
        };
        Self { name: name.into(), series: series.name.clone(), kind, slope, intercept, r_squared, residuals }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "op")]
pub enum Comparison {
    Ge { threshold: f64 },
    Le { threshold: f64 },
    Gt { threshold: f64 },
    Lt { threshold: f64 },
    /// `|value − target| ≤ tolerance`
    Within { target: f64, tolerance: f64 },
}

impl Comparison {
    pub fn holds(&self, v: f64) -> bool {
        match *self {
            Comparison::Ge { threshold } => v >= threshold,
            Comparison::Le { threshold } => v <= threshold,
            Comparison::Gt { threshold } => v > threshold,
            Comparison::Lt { threshold } => v < threshold,
            Comparison::Within { target, tolerance } => (v - target).abs() <= tolerance,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Criterion {
    pub name: String,
    #[serde(with = "nullable")]
    pub value: f64,
    pub comparison: Comparison,
    pub pass: bool,
}

impl Criterion {
    pub fn new(name: &str, value: f64, comparison: Comparison) -> Self {
        Self { name: name.into(), value, comparison, pass: comparison.holds(value) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 2,
            Verdict::Inconclusive => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub experiment: String,
    pub inputs: serde_json::Value,
    pub series: Vec<Series>,
    pub fits: Vec<FitRecord>,
    pub criteria: Vec<Criterion>,
    pub verdict: Verdict,
    pub seed: u64,
    pub notes: Vec<String>,
    /// Wall-clock stamp; excluded from reproducibility comparisons.
    pub timestamp: Option<String>,
}

impl ExperimentReport {
    pub fn new(experiment: &str, inputs: serde_json::Value, seed: u64) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            experiment: experiment.into(),
            inputs,
            series: Vec::new(),
            fits: Vec::new(),
            criteria: Vec::new(),
            verdict: Verdict::Inconclusive,
            seed,
            notes: Vec::new(),
            timestamp: None,
        }
    }

    pub fn series(&self, name: &str) -> Option<&Series> {
        self.series.iter().find(|s| s.name == name)
    }

    pub fn fit(&self, name: &str) -> Option<&FitRecord> {
        self.fits.iter().find(|f| f.name == name)
    }

    pub fn criterion(&self, name: &str) -> Option<&Criterion> {
        self.criteria.iter().find(|c| c.name == name)
    }

    /// Add a fit computed from an already stored series.
    pub fn add_fit(&mut self, name: &str, series: &str, kind: FitKind) -> &FitRecord {
        let s = self.series(series).unwrap_or_else(|| panic!("unknown series {series}")).clone();
        self.fits.push(FitRecord::compute(name, &s, kind));
        self.fits.last().expect("just pushed")
    }

    pub fn add_criterion(&mut self, c: Criterion) {
        self.criteria.push(c);
    }

    /// Pass iff every criterion passes (an empty list is inconclusive).
    pub fn finalize(&mut self) {
        self.verdict = if self.criteria.is_empty() {
            Verdict::Inconclusive
        } else if self.criteria.iter().all(|c| c.pass) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
    }

    /// Refit every stored fit from its series and compare.
    pub fn fits_reproducible(&self) -> bool {
        self.fits.iter().all(|f| {
            self.series(&f.series).is_some_and(|s| {
                let g = FitRecord::compute(&f.name, s, f.kind);
                same(g.slope, f.slope) && same(g.intercept, f.intercept)
            })
        })
    }

    /// JSON with the timestamp removed, for reproducibility checks.
    pub fn canonical_json(&self) -> String {
        let mut c = self.clone();
        c.timestamp = None;
        serde_json::to_string_pretty(&c).expect("report serializes")
    }
}

fn same(a: f64, b: f64) -> bool {
    a == b || (a.is_nan() && b.is_nan())
}
