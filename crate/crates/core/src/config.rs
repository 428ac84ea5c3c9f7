//! JSON run configuration. Every section has defaults; CLI flags override
//! individual fields after the file is loaded.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dynamics::SolverParams;
use crate::error::{Error, Result};
use crate::init::InitSpec;
use crate::integrator::IntegratorConfig;
use crate::picard::PicardConfig;
use crate::spectral::GridSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct AppConfig {
    pub grid: GridSpec,
    pub params: SolverParams,
    pub integrator: IntegratorConfig,
    pub picard: PicardConfig,
    pub init: InitSpec,
}

impl AppConfig {
    pub fn validate(&self) -> Result<()> {
        GridSpec::with_dealias(self.grid.l, self.grid.n, self.grid.dealias_num, self.grid.dealias_den)?;
        self.params.validate()?;
        self.params.check_grid(&self.grid)?;
        self.integrator.validate()?;
        self.picard.validate()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: AppConfig = serde_json::from_str(&text)
            .map_err(|e| Error::InvalidParam(format!("config {}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load_or_default(path: Option<&Path>) -> Result<Self> {
        match path {
            Some(p) => Self::load(p),
            None => {
                let cfg = Self::default();
                cfg.validate()?;
                Ok(cfg)
            }
        }
    }
}
