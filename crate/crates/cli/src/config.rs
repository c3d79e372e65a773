use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const N_CAP_ENV: &str = "WITNESS_N_CAP";
const N_CAP_LIMIT: usize = 16;

/// Effective settings for one run: flags override the config file, which overrides defaults.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    pub eps_zero: f64,
    pub tol_rank: f64,
    pub tol_reconstruct: f64,
    pub restarts: usize,
    pub n_cap: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            eps_zero: mqwitness::smq::DEFAULT_EPS_ZERO,
            tol_rank: mqwitness::states::DEFAULT_RANK_TOL,
            tol_reconstruct: 1e-10,
            restarts: mqwitness::oracle::DEFAULT_RESTARTS,
            n_cap: mqwitness::states::DEFAULT_N_CAP,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    seed: Option<u64>,
    eps_zero: Option<f64>,
    tol_rank: Option<f64>,
    tol_reconstruct: Option<f64>,
    restarts: Option<usize>,
    n_cap: Option<usize>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>, seed_flag: Option<u64>, env_n_cap: Option<String>) -> Result<Self, String> {
        let mut cfg = Self::default();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            let file: ConfigFile = toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
            cfg.seed = file.seed.unwrap_or(cfg.seed);
            cfg.eps_zero = file.eps_zero.unwrap_or(cfg.eps_zero);
            cfg.tol_rank = file.tol_rank.unwrap_or(cfg.tol_rank);
            cfg.tol_reconstruct = file.tol_reconstruct.unwrap_or(cfg.tol_reconstruct);
            cfg.restarts = file.restarts.unwrap_or(cfg.restarts);
            cfg.n_cap = file.n_cap.unwrap_or(cfg.n_cap);
        }
        if let Some(v) = env_n_cap {
            cfg.n_cap = v.trim().parse().map_err(|_| format!("{N_CAP_ENV}={v:?} is not an integer"))?;
        }
        if let Some(seed) = seed_flag {
            cfg.seed = seed;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), String> {
        for (name, v) in [("eps_zero", self.eps_zero), ("tol_rank", self.tol_rank), ("tol_reconstruct", self.tol_reconstruct)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(format!("{name} must be positive, got {v}"));
            }
        }
        if self.n_cap == 0 || self.n_cap > N_CAP_LIMIT {
            return Err(format!("n_cap must lie in 1..={N_CAP_LIMIT}, got {}", self.n_cap));
        }
        if self.restarts == 0 {
            return Err("restarts must be at least 1".into());
        }
        Ok(())
    }

    /// Seed for one labelled consumer: the first 8 bytes of SHA-256(seed || label).
    pub fn sub_seed(&self, label: &str) -> u64 {
        let mut h = Sha256::new();
        h.update(self.seed.to_le_bytes());
        h.update(label.as_bytes());
        let digest = h.finalize();
        u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
    }
}
