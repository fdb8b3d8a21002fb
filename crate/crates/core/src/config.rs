//! Plain-text quadrature settings: `key = value` lines with `#` comments.
//!
//! Every key is optional and falls back to [`QuadratureConfig::default`]:
//!
//! ```text
//! base_resolution = 64        # angular nodes per level
//! max_levels = 3
//! rel_tol = 1e-3
//! domain_scale = 1e5          # scale-separation cutoff at level 0
//! divergence_growth = 2.0
//! cutoff_growth = 3.16227766  # cutoff factor per level
//! execution = parallel        # or sequential
//! ```

use std::path::Path;

use crate::collision::QuadratureConfig;
use crate::error::{Error, Result};
use crate::par::Execution;

/// Parses config text over the defaults and validates the result.
pub fn parse_config(text: &str) -> Result<QuadratureConfig> {
    let mut cfg = QuadratureConfig::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split_once('#').map_or(raw, |(c, _)| c).trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(Error::Parse { line, msg: format!("expected `key = value`, got {content:?}") });
        };
        let (key, value) = (key.trim(), value.trim());
        let int = || value.parse::<usize>().map_err(|_| bad_value(line, key, value));
        let real = || value.parse::<f64>().map_err(|_| bad_value(line, key, value));
        match key {
            "base_resolution" => cfg.base_resolution = int()?,
            "max_levels" => cfg.max_levels = int()?,
            "rel_tol" => cfg.rel_tol = real()?,
            "domain_scale" => cfg.domain_scale = real()?,
            "divergence_growth" => cfg.divergence_growth = real()?,
            "cutoff_growth" => cfg.cutoff_growth = real()?,
            "execution" => {
                cfg.execution = match value {
                    "parallel" => Execution::Parallel,
                    "sequential" => Execution::Sequential,
                    _ => return Err(bad_value(line, key, value)),
                }
            }
            _ => return Err(Error::Parse { line, msg: format!("unknown key {key:?}") }),
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn bad_value(line: usize, key: &str, value: &str) -> Error {
    Error::Parse { line, msg: format!("invalid value {value:?} for {key}") }
}

pub fn load_config(path: &Path) -> Result<QuadratureConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

/// Config text that [`parse_config`] reads back to `cfg`.
pub fn render_config(cfg: &QuadratureConfig) -> String {
    let execution = match cfg.execution {
        Execution::Parallel => "parallel",
        Execution::Sequential => "sequential",
    };
    format!(
        "base_resolution = {}\nmax_levels = {}\nrel_tol = {:e}\ndomain_scale = {:e}\n\
         divergence_growth = {:e}\ncutoff_growth = {:e}\nexecution = {}\n",
        cfg.base_resolution,
        cfg.max_levels,
        cfg.rel_tol,
        cfg.domain_scale,
        cfg.divergence_growth,
        cfg.cutoff_growth,
        execution
    )
}
