//! Suite configuration. Every field has a default, so `{}` is a valid config.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    /// Seeds every ensemble; the same seed gives byte-identical reports.
    pub seed: u64,
    /// Fields (or symbols, or pairs) per ensemble.
    pub ensemble: usize,
    pub grids: Grids,
    pub tolerances: Tolerances,
    pub peetre_samples: usize,
    pub mollifier: MollifierConfig,
    pub schatten: SchattenConfig,
    /// Quantization parameters for the Hilbert-Schmidt identity.
    pub taus: Vec<f64>,
    /// Sobolev orders straddling the calculus threshold; recorded, not judged.
    pub threshold_orders: Vec<f64>,
    /// Used when `verify` gets no `--out`.
    pub out: Option<String>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 20_251_015,
            ensemble: 50,
            grids: Grids::default(),
            tolerances: Tolerances::default(),
            peetre_samples: 100_000,
            mollifier: MollifierConfig::default(),
            schatten: SchattenConfig::default(),
            taus: vec![0.0, 0.5, 1.0],
            threshold_orders: vec![0.7, 0.8],
            out: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Grids {
    /// Samples per axis for function-space ensembles, coarse then fine.
    pub coarse: usize,
    pub fine: usize,
    /// Samples per axis of the operator `x` grid.
    pub operator_coarse: usize,
    pub operator_fine: usize,
}

impl Default for Grids {
    fn default() -> Self {
        Grids { coarse: 128, fine: 256, operator_coarse: 16, operator_fine: 32 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Allowed relative drift of an ensemble ratio between the two grids.
    pub stability: f64,
    pub operator_stability: f64,
    pub convolution: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { stability: 0.05, operator_stability: 0.10, convolution: 0.05 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MollifierConfig {
    /// `(s, s')` pairs.
    pub pairs: Vec<[f64; 2]>,
    pub eps: Vec<f64>,
    pub samples: usize,
    /// Extra decay of the rate field beyond `H^s`.
    pub delta: f64,
    pub slope_tolerance: f64,
}

impl Default for MollifierConfig {
    fn default() -> Self {
        MollifierConfig {
            pairs: vec![[2.0, 1.0], [1.5, 1.0], [1.0, 0.75]],
            eps: vec![0.4, 0.2, 0.1, 0.05],
            samples: 2048,
            delta: 0.02,
            slope_tolerance: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchattenConfig {
    pub p: f64,
    /// Order on the `x` and `xi` blocks.
    pub order: [f64; 2],
    pub tau: f64,
    /// Wave packets per random symbol.
    pub packets: usize,
}

impl Default for SchattenConfig {
    fn default() -> Self {
        SchattenConfig { p: 1.0, order: [2.0, 2.0], tau: 0.5, packets: 3 }
    }
}

impl SuiteConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let cfg: SuiteConfig = serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.ensemble < 2 {
            return bad(format!("ensemble must have at least 2 members, got {}", self.ensemble));
        }
        let g = &self.grids;
        for (name, n) in [("coarse", g.coarse), ("fine", g.fine), ("operator_coarse", g.operator_coarse), ("operator_fine", g.operator_fine)] {
            if n < 8 || n % 2 != 0 {
                return bad(format!("grids.{name} must be even and at least 8, got {n}"));
            }
        }
        if !g.coarse.is_multiple_of(4) || !g.fine.is_multiple_of(4) {
            return bad("function grids must be divisible by 4".into());
        }
        if g.coarse >= g.fine || g.operator_coarse >= g.operator_fine {
            return bad("fine grids must be finer than coarse grids".into());
        }
        let t = &self.tolerances;
        if !(t.stability > 0.0 && t.operator_stability > 0.0 && t.convolution >= 0.0) {
            return bad("tolerances must be positive".into());
        }
        if self.peetre_samples == 0 {
            return bad("peetre_samples must be positive".into());
        }
        let m = &self.mollifier;
        if m.pairs.is_empty() || m.eps.len() < 2 {
            return bad("mollifier needs at least one (s, s') pair and two eps values".into());
        }
        if m.pairs.iter().any(|[s, sp]| sp > s) {
            return bad("mollifier pairs need s' <= s".into());
        }
        if m.eps.iter().any(|e| !(*e > 0.0)) || m.samples < 8 || !m.samples.is_multiple_of(2) {
            return bad("mollifier eps must be positive and samples even".into());
        }
        if !(self.schatten.p >= 1.0) || self.schatten.packets == 0 {
            return bad("schatten.p must be at least 1 and packets positive".into());
        }
        if self.taus.iter().any(|t| !t.is_finite()) {
            return bad("taus must be finite".into());
        }
        Ok(())
    }
}
