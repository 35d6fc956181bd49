use serde::{Deserialize, Serialize};

/// Outcome of a pointwise identity check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub name: String,
    pub samples: usize,
    /// `null` in JSON when a residual was not finite.
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Set when zero samples were requested; the pass is then vacuous.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub vacuous: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl VerificationReport {
    pub fn failed(name: impl Into<String>, tolerance: f64, err: impl ToString) -> Self {
        VerificationReport {
            name: name.into(),
            samples: 0,
            max_residual: f64::INFINITY,
            tolerance,
            pass: false,
            vacuous: false,
            error: Some(err.to_string()),
        }
    }
}

/// Accumulates residuals into a [`VerificationReport`].
#[derive(Clone, Debug)]
pub struct Check {
    name: String,
    tolerance: f64,
    samples: usize,
    max_residual: f64,
    finite: bool,
    error: Option<String>,
}

impl Check {
    pub fn new(name: impl Into<String>, tolerance: f64) -> Check {
        Check { name: name.into(), tolerance, samples: 0, max_residual: 0.0, finite: true, error: None }
    }

    /// Runs `body` against a fresh check; an `Err` marks it failed.
    pub fn run(
        name: impl Into<String>,
        tolerance: f64,
        body: impl FnOnce(&mut Check) -> crate::Result<()>,
    ) -> VerificationReport {
        let mut check = Check::new(name, tolerance);
        if let Err(e) = body(&mut check) {
            check.fail(e);
        }
        check.finish()
    }

    /// Records one sample's residual.
    pub fn record(&mut self, residual: f64) {
        self.samples += 1;
        self.observe(residual);
    }

    /// Folds an extra residual into the current sample without counting it.
    pub fn observe(&mut self, residual: f64) {
        if residual.is_finite() {
            self.max_residual = self.max_residual.max(residual.abs());
        } else {
            self.finite = false;
        }
    }

    pub fn record_all(&mut self, residuals: impl IntoIterator<Item = f64>) {
        self.samples += 1;
        for r in residuals {
            self.observe(r);
        }
    }

    /// Marks the check failed; the first error is kept.
    pub fn fail(&mut self, err: impl ToString) {
        if self.error.is_none() {
            self.error = Some(err.to_string());
        }
    }

    pub fn max_residual(&self) -> f64 {
        if self.finite {
            self.max_residual
        } else {
            f64::INFINITY
        }
    }

    pub fn finish(self) -> VerificationReport {
        let max_residual = self.max_residual();
        VerificationReport {
            pass: self.error.is_none() && max_residual <= self.tolerance,
            vacuous: self.samples == 0 && self.error.is_none(),
            name: self.name,
            samples: self.samples,
            max_residual,
            tolerance: self.tolerance,
            error: self.error,
        }
    }
}

/// max |a_i − b_i|
pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// |a − b| / max(1, |b|)
pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_samples_is_vacuous_pass() {
        let r = Check::new("empty", 1e-9).finish();
        assert!(r.pass && r.vacuous);
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"vacuous\":true"), "{json}");
    }

    #[test]
    fn nan_fails() {
        let mut c = Check::new("nan", 1.0);
        c.record(0.5);
        c.record(f64::NAN);
        let r = c.finish();
        assert!(!r.pass);
        assert_eq!(r.max_residual, f64::INFINITY);
    }

    #[test]
    fn json_shape() {
        let mut c = Check::new("x", 1e-3);
        c.record(1e-4);
        let json = serde_json::to_string(&c.finish()).unwrap();
        assert_eq!(json, r#"{"name":"x","samples":1,"max_residual":0.0001,"tolerance":0.001,"pass":true}"#);
    }
}
