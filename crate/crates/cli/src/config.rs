//! Run configuration: a JSON document with a schema version; unknown keys
//! are rejected.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub model: Option<ModelConfig>,
    #[serde(default)]
    pub tolerance: Option<ToleranceConfig>,
    /// Half-width of the clipping window.
    #[serde(default)]
    pub window: Option<f64>,
    #[serde(default)]
    pub check: Option<CheckConfig>,
    #[serde(default)]
    pub glue_dist: Option<GlueDistConfig>,
    #[serde(default)]
    pub s5: Option<S5Section>,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub plot: Option<PlotConfig>,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum SideConfig {
    Above,
    Below,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SheetConfig {
    pub slope: f64,
    pub side: SideConfig,
    #[serde(default)]
    pub reflected: bool,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelConfig {
    /// The whole plane with the maximum norm.
    Plane {},
    /// One half-plane sheet on its own.
    HalfPlane { sheet: SheetConfig },
    /// Two or more sheets glued along their boundary lines.
    Glued { sheets: Vec<SheetConfig> },
    /// `ξ₂ >= ±a ξ₁` glued to `ξ₂ <= b ξ₁`.
    HalfPlanePair {
        a: f64,
        b: f64,
        #[serde(default)]
        reflected: bool,
    },
    /// A distance matrix, inline or from a file.
    Finite {
        #[serde(default)]
        rows: Option<Vec<Vec<f64>>>,
        #[serde(default)]
        path: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ToleranceConfig {
    pub eps_feas: f64,
    pub eps_eq: f64,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    Hyperconvex,
    StronglyConvex,
    ExternallyHyperconvex,
    Gated,
    Proximinal,
    MetricAxioms,
}

impl Property {
    pub fn needs_set(self) -> bool {
        !matches!(self, Property::Hyperconvex | Property::MetricAxioms)
    }

    pub fn randomized(self) -> bool {
        !matches!(self, Property::MetricAxioms)
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetConfig {
    /// The gluing set of a glued model, or the boundary line of a sheet.
    GluingSet {},
    /// Convex hull of the listed vertices.
    Polygon { vertices: Vec<[f64; 2]> },
    /// Convex hull of the vertices in a polygon file.
    PolygonFile { path: PathBuf },
    /// Axis box `[min, max]`; degenerate boxes give segments and points.
    Rect { min: [f64; 2], max: [f64; 2] },
    /// Open axis box (not closed, for proximinality tests).
    OpenBox { min: [f64; 2], max: [f64; 2] },
    /// Indices of a finite space.
    Members { members: Vec<usize> },
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CheckConfig {
    pub property: Property,
    #[serde(default)]
    pub set: Option<SetConfig>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_family_size")]
    pub max_family_size: usize,
    #[serde(default = "default_half_width")]
    pub half_width: f64,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PointConfig {
    #[serde(default)]
    pub sheet: usize,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GlueDistConfig {
    pub x: PointConfig,
    pub y: PointConfig,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct S5Section {
    pub a: f64,
    pub b: f64,
    #[serde(default)]
    pub reflected: bool,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default = "default_sweep_trials")]
    pub trials: usize,
    #[serde(default = "default_family_size")]
    pub max_family_size: usize,
    #[serde(default = "default_half_width")]
    pub half_width: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            steps: default_steps(),
            trials: default_sweep_trials(),
            max_family_size: default_family_size(),
            half_width: default_half_width(),
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PlotConfig {
    pub a: f64,
    pub b: f64,
    #[serde(default)]
    pub reflected: bool,
    #[serde(default = "default_view")]
    pub view: f64,
}

fn default_trials() -> usize {
    1000
}

fn default_family_size() -> usize {
    8
}

fn default_half_width() -> f64 {
    5.0
}

fn default_steps() -> usize {
    21
}

fn default_sweep_trials() -> usize {
    200
}

pub fn default_view() -> f64 {
    3.5
}

impl RunConfig {
    /// An empty configuration, used when no file is given.
    pub fn empty() -> Self {
        RunConfig { schema_version: SCHEMA_VERSION, ..RunConfig::default() }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).context("invalid config")?;
        if cfg.schema_version != SCHEMA_VERSION {
            bail!("unsupported schema_version {} (expected {SCHEMA_VERSION})", cfg.schema_version);
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        let mut cfg = Self::parse(&text).with_context(|| format!("in {}", path.display()))?;
        cfg.resolve_paths(path.parent().unwrap_or(Path::new(".")));
        Ok(cfg)
    }

    /// Makes relative file references relative to the config's directory.
    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(ModelConfig::Finite { path: Some(p), .. }) = &mut self.model {
            fix(p);
        }
        if let Some(CheckConfig { set: Some(SetConfig::PolygonFile { path }), .. }) = &mut self.check {
            fix(path);
        }
    }
}
