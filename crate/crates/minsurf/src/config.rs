//! Run configuration and the tolerance ladder.
//!
//! Tolerances are named and individually overridable (`--tol NAME=VALUE`).
//! The defaults follow the accuracy the analytic jet pipeline actually
//! delivers: ~1e-9 for algebraic and frame-level identities, 1e-8 for first
//! derivatives, down to 1e-5 for identities driven by fourth chart
//! derivatives. Residuals of `O(1)`-bounded quantities (curvatures) are
//! absolute; residuals involving `P`, `Q`, `ΔS` are measured relative to
//! `max(1, P)` or `max(1, Q)`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::catalog::ImmersionSpec;
use crate::error::{Error, Result};
use crate::grid::GridSpec;

pub const DEFAULT_TOLERANCES: &[(&str, f64)] = &[
    // frame / algebraic level
    ("unit_sphere", 1e-10),
    ("frame", 1e-9),
    ("minimality", 1e-9),
    ("gauss_s_relation", 1e-9),
    // first derivatives of the immersion
    ("codazzi", 1e-8),
    ("wintgen", 1e-8),
    ("normal_tensor_reduction", 1e-8),
    ("b_squared", 1e-8),
    ("sbar", 1e-8),
    ("canonical_form", 1e-8),
    ("constants", 1e-8),
    ("gauss_equation", 1e-7),
    ("gradient_relations", 1e-7),
    ("covariant_s_derivative", 1e-7),
    // identities consuming third and fourth chart derivatives
    ("simons_flat", 1e-5),
    ("simons_general", 1e-5),
    ("simons_canonical", 1e-5),
    ("second_derivative_relations", 1e-5),
    ("ricci_e3", 1e-5),
    ("ricci_general", 1e-5),
    ("laplacian_h", 1e-5),
    ("q_lower_bound", 1e-5),
    ("normal_curvature_derivative", 1e-5),
    ("chern_identity", 1e-5),
    // gates and scales
    ("flatness", 1e-8),
    ("positive_k_gate", 1e-6),
    ("classify", 1e-6),
];

/// Named tolerance ladder with overridable entries.
#[derive(Clone, Debug, Serialize)]
#[serde(transparent)]
pub struct Tolerances {
    map: BTreeMap<String, f64>,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            map: DEFAULT_TOLERANCES
                .iter()
                .map(|&(k, v)| (k.to_string(), v))
                .collect(),
        }
    }
}

impl Tolerances {
    /// Override a named tolerance. Unknown names are rejected so typos do
    /// not silently leave a default in place.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::Usage(format!(
                "tolerance {name} must be a nonnegative finite number, got {value}"
            )));
        }
        match self.map.get_mut(name) {
            Some(slot) => {
                *slot = value;
                Ok(())
            }
            None => Err(Error::Usage(format!(
                "unknown tolerance `{name}`; known names: {}",
                DEFAULT_TOLERANCES
                    .iter()
                    .map(|(k, _)| *k)
                    .collect::<Vec<_>>()
                    .join(", ")
            ))),
        }
    }

    pub fn get(&self, name: &str) -> f64 {
        *self
            .map
            .get(name)
            .unwrap_or_else(|| panic!("tolerance `{name}` missing from the ladder"))
    }

    pub fn as_map(&self) -> &BTreeMap<String, f64> {
        &self.map
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

/// Everything a run needs: surface, grid, jet order, tier, tolerances, seed.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub surface: String,
    pub nu: usize,
    pub nv: usize,
    pub jet_order: usize,
    pub tier: u8,
    pub seed: u64,
    pub format: OutputFormat,
    pub tolerances: Tolerances,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            surface: String::new(),
            nu: 10,
            nv: 10,
            jet_order: 4,
            tier: 1,
            seed: 0,
            format: OutputFormat::Json,
            tolerances: Tolerances::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.nu < 2 || self.nv < 2 {
            return Err(Error::Usage(format!(
                "grid must be at least 2x2, got {}x{}",
                self.nu, self.nv
            )));
        }
        if self.jet_order != 3 && self.jet_order != 4 {
            return Err(Error::Usage(format!(
                "jet order must be 3 or 4, got {}",
                self.jet_order
            )));
        }
        if self.tier != 1 && self.tier != 2 {
            return Err(Error::Usage(format!(
                "tier must be 1 or 2, got {}",
                self.tier
            )));
        }
        if self.tier == 2 && self.jet_order != 4 {
            return Err(Error::Usage(
                "tier 2 checks consume second covariant derivatives and require jet order 4".into(),
            ));
        }
        Ok(())
    }

    /// Grid over the surface's valid chart rectangle.
    pub fn grid_for(&self, spec: &ImmersionSpec) -> GridSpec {
        GridSpec::new(self.nu, self.nv, spec.valid_rect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_overrides() {
        let mut t = Tolerances::default();
        assert_eq!(t.get("wintgen"), 1e-8);
        t.set("wintgen", 1e-6).unwrap();
        assert_eq!(t.get("wintgen"), 1e-6);
        assert!(t.set("no_such_check", 1.0).is_err());
        assert!(t.set("wintgen", -1.0).is_err());
    }

    #[test]
    fn tier2_requires_order4() {
        let cfg = RunConfig {
            tier: 2,
            jet_order: 3,
            ..RunConfig::default()
        };
        assert!(cfg.validate().is_err());
        let ok = RunConfig {
            tier: 2,
            jet_order: 4,
            ..RunConfig::default()
        };
        assert!(ok.validate().is_ok());
    }

    #[test]
    fn tiny_grids_are_rejected() {
        let cfg = RunConfig {
            nu: 1,
            ..RunConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}
