//! JSON context files binding a metric, named 1-forms, the tangent vector,
//! representation choice and tolerances into an evaluation context.
//!
//! Schema:
//! ```json
//! {
//!   "metric": {"signature": [-1,1,1,1]},
//!   "forms": {"A": [0.1, 0.0, 0.0, 0.0]},
//!   "y": [1.0, 0.0, 0.0, 0.0],
//!   "rep": "dirac",
//!   "tolerances": {"null": 1e-12}
//! }
//! ```

use serde::Deserialize;
use std::collections::BTreeMap;
use std::path::Path;

use crate::algebra::EvalContext;
use crate::error::{Error, Result};
use crate::gamma::RepId;
use crate::metric::{MetricSpec, OneForm, Tangent};
use crate::scalar::Real;

fn default_null_tol() -> f64 {
    1e-12
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_null_tol")]
    pub null: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            null: default_null_tol(),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContextFile {
    pub metric: MetricSpec,
    #[serde(default)]
    pub forms: BTreeMap<String, [f64; 4]>,
    pub y: [f64; 4],
    #[serde(default)]
    pub rep: Option<String>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl ContextFile {
    pub fn from_str(src: &str) -> Result<Self> {
        serde_json::from_str(src).map_err(|e| Error::InvalidContext(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let src = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidContext(format!("{}: {e}", path.display())))?;
        Self::from_str(&src)
    }

    /// Resolved representation: explicit override beats the file entry,
    /// which beats the Dirac default.
    pub fn rep_id(&self, rep_override: Option<RepId>) -> Result<RepId> {
        if let Some(rep) = rep_override {
            return Ok(rep);
        }
        match &self.rep {
            Some(name) => name.parse(),
            None => Ok(RepId::Dirac),
        }
    }

    pub fn build<T: Real>(&self, rep_override: Option<RepId>) -> Result<EvalContext<T>> {
        for v in self.y {
            if !v.is_finite() {
                return Err(Error::InvalidContext("y components must be finite".into()));
            }
        }
        if !(self.tolerances.null.is_finite() && self.tolerances.null >= 0.0) {
            return Err(Error::InvalidContext(
                "null tolerance must be finite and non-negative".into(),
            ));
        }
        let metric = self.metric.build::<T>()?;
        let mut forms = Vec::new();
        for (name, comps) in &self.forms {
            for v in comps {
                if !v.is_finite() {
                    return Err(Error::InvalidContext(format!(
                        "form `{name}` components must be finite"
                    )));
                }
            }
            forms.push(OneForm::new(
                name.clone(),
                [
                    T::of(comps[0]),
                    T::of(comps[1]),
                    T::of(comps[2]),
                    T::of(comps[3]),
                ],
            ));
        }
        let y = Tangent::new([
            T::of(self.y[0]),
            T::of(self.y[1]),
            T::of(self.y[2]),
            T::of(self.y[3]),
        ]);
        EvalContext::new(
            metric,
            forms,
            y,
            self.rep_id(rep_override)?,
            T::of(self.tolerances.null),
        )
    }
}
