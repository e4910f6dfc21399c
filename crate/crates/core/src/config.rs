//! Tracker configuration and its flat `key = value` file format.
//!
//! Blank lines and lines starting with `#` are ignored. Keys missing from a
//! file keep their defaults; unknown keys are rejected. [`TrackerConfig::to_text`]
//! writes every key, and parsing that text gives back an identical config.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::detection::ScalePyramidConfig;
use crate::error::{Error, Result};
use crate::model_update::UpdateSchedule;
use crate::solver::SolverConfig;
use crate::spatial_map::{MapKind, MapParams};

#[derive(Clone, Debug, PartialEq)]
pub struct TrackerConfig {
    pub solver: SolverConfig,
    pub schedule: UpdateSchedule,
    /// Label sigma as a fraction of `sqrt(W*H)` of the target in cells.
    pub output_sigma_factor: f64,
    pub cell_size: usize,
    /// Linear search window factor; the window covers `factor^2` target areas.
    pub search_area_scale: f64,
    /// Cap on the fiducial search area in pixels. Larger windows are
    /// downsampled to fit.
    pub max_search_area: f64,
    pub pyramid: ScalePyramidConfig,
    pub map_kind: MapKind,
    pub map_params: MapParams,
    pub cn_table: Option<PathBuf>,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            solver: SolverConfig::default(),
            schedule: UpdateSchedule::default(),
            output_sigma_factor: 1.0 / 16.0,
            cell_size: 4,
            search_area_scale: 4.0,
            max_search_area: 40000.0,
            pyramid: ScalePyramidConfig::default(),
            map_kind: MapKind::Ours,
            map_params: MapParams::default(),
            cn_table: None,
        }
    }
}

pub const KEYS: &[&str] = &[
    "lambda",
    "mu0",
    "beta",
    "mu_max",
    "iterations",
    "early_exit_tol",
    "alpha",
    "rho",
    "output_sigma_factor",
    "cell_size",
    "search_area_scale",
    "max_search_area",
    "scale_a",
    "scale_s",
    "map.kind",
    "map.nu",
    "map.delta",
    "map.expansion",
    "cn_table",
];

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::config(format!("`{key}`: cannot parse `{value}`")))
}

impl TrackerConfig {
    pub fn validate(&self) -> Result<()> {
        self.solver.validate()?;
        self.schedule.validate()?;
        self.pyramid.validate()?;
        if !(self.output_sigma_factor > 0.0) || !self.output_sigma_factor.is_finite() {
            return Err(Error::config("output_sigma_factor must be positive"));
        }
        if self.cell_size == 0 {
            return Err(Error::config("cell_size must be positive"));
        }
        if !(self.search_area_scale >= 1.0) || !self.search_area_scale.is_finite() {
            return Err(Error::config("search_area_scale must be at least 1"));
        }
        if !(self.max_search_area >= (4 * self.cell_size * self.cell_size) as f64) || !self.max_search_area.is_finite()
        {
            return Err(Error::config("max_search_area must cover at least a 2x2 cell grid"));
        }
        if self.map_kind == MapKind::Custom {
            return Err(Error::config("map.kind must be binary, rquadratic or ours"));
        }
        let MapParams { nu, delta, expansion } = self.map_params;
        if !(nu > 0.0) || !nu.is_finite() {
            return Err(Error::config(format!("map.nu must be positive, got {nu}")));
        }
        if !(delta >= 0.0) || !delta.is_finite() {
            return Err(Error::config(format!("map.delta must be non-negative, got {delta}")));
        }
        if !(expansion > 0.0) || !expansion.is_finite() {
            return Err(Error::config(format!("map.expansion must be positive, got {expansion}")));
        }
        Ok(())
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "lambda" => self.solver.lambda = num(key, value)?,
            "mu0" => self.solver.mu0 = num(key, value)?,
            "beta" => self.solver.beta = num(key, value)?,
            "mu_max" => self.solver.mu_max = num(key, value)?,
            "iterations" => self.solver.iterations = num(key, value)?,
            "early_exit_tol" => {
                self.solver.early_exit_tol = match value {
                    "off" | "none" | "" => None,
                    v => Some(num(key, v)?),
                }
            }
            "alpha" => self.schedule.alpha = num(key, value)?,
            "rho" => self.schedule.rho = num(key, value)?,
            "output_sigma_factor" => self.output_sigma_factor = num(key, value)?,
            "cell_size" => self.cell_size = num(key, value)?,
            "search_area_scale" => self.search_area_scale = num(key, value)?,
            "max_search_area" => self.max_search_area = num(key, value)?,
            "scale_a" => self.pyramid.a = num(key, value)?,
            "scale_s" => self.pyramid.s = num(key, value)?,
            "map.kind" => self.map_kind = value.parse()?,
            "map.nu" => self.map_params.nu = num(key, value)?,
            "map.delta" => self.map_params.delta = num(key, value)?,
            "map.expansion" => self.map_params.expansion = num(key, value)?,
            "cn_table" => self.cn_table = if value.is_empty() || value == "none" { None } else { Some(value.into()) },
            other => return Err(Error::config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Parses a config text on top of the defaults and validates it.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) =
                line.split_once('=').ok_or_else(|| Error::config(format!("line {}: expected `key = value`", i + 1)))?;
            cfg.set(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Every key with its current value.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("lambda", self.solver.lambda.to_string());
        put("mu0", self.solver.mu0.to_string());
        put("beta", self.solver.beta.to_string());
        put("mu_max", self.solver.mu_max.to_string());
        put("iterations", self.solver.iterations.to_string());
        put("early_exit_tol", self.solver.early_exit_tol.map_or("off".into(), |t| t.to_string()));
        put("alpha", self.schedule.alpha.to_string());
        put("rho", self.schedule.rho.to_string());
        put("output_sigma_factor", self.output_sigma_factor.to_string());
        put("cell_size", self.cell_size.to_string());
        put("search_area_scale", self.search_area_scale.to_string());
        put("max_search_area", self.max_search_area.to_string());
        put("scale_a", self.pyramid.a.to_string());
        put("scale_s", self.pyramid.s.to_string());
        put("map.kind", self.map_kind.to_string());
        put("map.nu", self.map_params.nu.to_string());
        put("map.delta", self.map_params.delta.to_string());
        put("map.expansion", self.map_params.expansion.to_string());
        put("cn_table", self.cn_table.as_ref().map_or("none".into(), |p| p.display().to_string()));
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        TrackerConfig::default().validate().unwrap();
    }

    #[test]
    fn round_trip() {
        let mut cfg = TrackerConfig::default();
        cfg.solver.lambda = 0.1 + 0.2;
        cfg.solver.early_exit_tol = Some(1e-7);
        cfg.map_kind = MapKind::Rquadratic;
        cfg.pyramid.s = 3;
        cfg.cn_table = Some("assets/cn.txt".into());
        let back = TrackerConfig::parse(&cfg.to_text()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.to_text(), cfg.to_text());
    }

    #[test]
    fn every_key_written() {
        let text = TrackerConfig::default().to_text();
        for k in KEYS {
            assert!(text.lines().any(|l| l.starts_with(&format!("{k} ="))), "{k}");
        }
        assert_eq!(text.lines().count(), KEYS.len());
    }

    #[test]
    fn comments_and_partial_files() {
        let cfg = TrackerConfig::parse("# test\n\nmap.kind = binary\niterations=3\n").unwrap();
        assert_eq!(cfg.map_kind, MapKind::Binary);
        assert_eq!(cfg.solver.iterations, 3);
        assert_eq!(cfg.schedule, UpdateSchedule::default());
    }

    #[test]
    fn rejects_bad_input() {
        for text in ["iterations = 0", "bogus = 1", "lambda = abc", "scale_s = 4", "map.kind = square", "no equals"] {
            assert!(matches!(TrackerConfig::parse(text), Err(Error::Config(_))), "{text}");
        }
    }
}
