//! Flat configuration for a single ground-state run.

use serde::{Deserialize, Serialize};

use crate::dmrg::SolverConfig;
use crate::error::{Error, Result};
use crate::point::PointSpec;

/// All model, lattice and solver fields at the top level of one table.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GroundConfig {
    #[serde(flatten)]
    pub point: PointSpec,
    #[serde(flatten)]
    pub solver: SolverConfig,
}

impl GroundConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let table: toml::Table = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        // Flattened structs cannot deny unknown fields themselves.
        let known: toml::Table = toml::from_str(&GroundConfig::default().to_toml()).expect("default config parses");
        if let Some(k) = table.keys().find(|k| !known.contains_key(*k)) {
            return Err(Error::Config(format!("unknown key `{k}`")));
        }
        let cfg: GroundConfig = table.try_into().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.point.validate()?;
        self.solver.validate()
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configs always serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_keys() {
        let cfg = GroundConfig::from_toml(
            "alpha = 0.02\nbeta = 0.01\npilot_z = -1e-5\nchain_length = 31\nd_c = 30\nd_p = 24\nstrict = true\ngeometry = \"two_chain\"\n",
        )
        .unwrap();
        assert_eq!(cfg.point.params.alpha, 0.02);
        assert_eq!(cfg.point.chain_length, 31);
        assert_eq!(cfg.solver.d_c, 30);
        assert!(cfg.solver.strict);
        assert_eq!(GroundConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(GroundConfig::from_toml("d_opt = 30\nd_p = 24\n").is_err());
        assert!(GroundConfig::from_toml("lambda = 1.0\n").is_err());
        assert!(GroundConfig::from_toml("alpah = 0.1\n").is_err());
    }
}
