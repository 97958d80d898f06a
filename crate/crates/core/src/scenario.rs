//! Scenario files: gas law, Riemann data, scan grid and run options in TOML.
//!
//! ```toml
//! name = "gamma2"
//! gamma = 2.0
//!
//! [data]
//! rho_minus = 2.0
//! v_minus = [0.0, 1.0]   # [tangential, normal]
//! rho_plus = 1.0
//! v_plus = [0.0, -2.0]
//!
//! [grid]
//! rho1 = { start = 2.5, end = 2.88, n = 40 }
//! C = { start = 0.05, end = 0.3, n = 51 }
//!
//! [options]
//! L = 1.0
//! residual_tol = 1e-10
//! margin_floor = 1e-6
//! weak_tol = 1e-8
//! seed = 7
//! test_functions = 50
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::certificate::CertifyConfig;
use crate::gas::GasLaw;
use crate::riemann::RiemannData;
use crate::solver::{Grid, SolveOptions};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioOptions {
    #[serde(rename = "L")]
    pub box_half_width: f64,
    pub residual_tol: f64,
    pub margin_floor: f64,
    pub weak_tol: f64,
    pub seed: u64,
    pub test_functions: usize,
}

impl Default for ScenarioOptions {
    fn default() -> Self {
        let c = CertifyConfig::default();
        Self {
            box_half_width: c.box_half_width,
            residual_tol: c.residual_tol,
            margin_floor: c.margin_floor,
            weak_tol: c.weak_tol,
            seed: c.seed,
            test_functions: c.test_functions,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub name: String,
    pub gamma: f64,
    pub data: RiemannData,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Grid>,
    #[serde(default)]
    pub options: ScenarioOptions,
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self> {
        let s: Self = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        GasLaw::new(self.gamma)?;
        self.data.validate()?;
        let o = &self.options;
        let positive = [
            ("L", o.box_half_width),
            ("residual_tol", o.residual_tol),
            ("margin_floor", o.margin_floor),
            ("weak_tol", o.weak_tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        if o.test_functions == 0 {
            return Err(Error::InvalidArgument("test_functions must be at least 1".into()));
        }
        if let Some(g) = &self.grid {
            for (name, r) in [("rho1", g.rho1), ("C", g.c)] {
                if !(r.start > 0.0 && r.end > 0.0) || !r.start.is_finite() || !r.end.is_finite() {
                    return Err(Error::InvalidArgument(format!("grid {name} must stay positive")));
                }
            }
        }
        Ok(())
    }

    pub fn law(&self) -> GasLaw {
        GasLaw::new(self.gamma).expect("validated on load")
    }

    pub fn solve_options(&self) -> SolveOptions {
        SolveOptions {
            residual_tol: self.options.residual_tol,
            margin_floor: self.options.margin_floor,
            ..SolveOptions::default()
        }
    }

    pub fn certify_config(&self) -> CertifyConfig {
        CertifyConfig {
            box_half_width: self.options.box_half_width,
            residual_tol: self.options.residual_tol,
            margin_floor: self.options.margin_floor,
            weak_tol: self.options.weak_tol,
            seed: self.options.seed,
            test_functions: self.options.test_functions,
            ..CertifyConfig::default()
        }
    }
}
