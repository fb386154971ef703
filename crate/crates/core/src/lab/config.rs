use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::gauge::GridDomain;
use crate::lie::RealForm;

/// Run configuration, read from flat `key = value` text with `#` comments.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub group_n: usize,
    pub real_form: RealForm,
    pub p: usize,
    pub chart_radius: f64,
    /// Chart scale for points of G^n in the form suites.
    pub sample_scale: f64,
    /// Chart scale for triples in U³.
    pub eta_scale: f64,
    /// Coefficient amplitude of random loops.
    pub loop_amplitude: f64,
    pub grid: GridDomain,
    /// Side of the torus grid used by the degree-3 cochain.
    pub torus_n: usize,
    pub quadrature_degree: usize,
    pub fd_step: f64,
    pub seed: u64,
    pub workers: usize,
    pub samples: Samples,
    pub tolerances: BTreeMap<String, f64>,
    pub hooks: Hooks,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Samples {
    pub bss: usize,
    pub calibration: usize,
    pub eta: usize,
    pub eta_convergence: usize,
    pub loops: usize,
    pub kac_moody: usize,
    pub feigin: usize,
    pub extension: usize,
}

/// Negative-control switches.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Hooks {
    /// Flips the sign of the last face in the relation on G³.
    pub corrupt_face_sign: bool,
    /// Adds `μ · mean ‖log g‖²` of the first argument to the loop cocycle.
    pub perturb_cocycle: f64,
}

pub const DEFAULT_TOLERANCES: &[(&str, f64)] = &[
    ("vanishing", 1e-9),
    ("degeneracy", 1e-9),
    ("relations", 1e-7),
    ("oracle", 1e-8),
    ("calibration_stability", 1e-10),
    ("eta", 1e-6),
    ("eta_noise", 0.1),
    ("loop_cocycle", 1e-6),
    ("kac_moody", 1e-3),
    ("selection", 1e-8),
    ("a_part", 1e-6),
    ("km_cocycle", 1e-8),
    ("feigin_km", 1e-8),
    ("antisymmetry", 1e-10),
    ("ce", 1e-6),
    ("extension", 1e-6),
];

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            group_n: 2,
            real_form: RealForm::Gl,
            p: 2,
            chart_radius: 0.5,
            sample_scale: 0.1,
            eta_scale: 0.05,
            loop_amplitude: 0.05,
            grid: GridDomain::Circle { n: 64 },
            torus_n: 32,
            quadrature_degree: 8,
            fd_step: 1e-3,
            seed: 20240601,
            workers: 1,
            samples: Samples {
                bss: 100,
                calibration: 100,
                eta: 100,
                eta_convergence: 8,
                loops: 50,
                kac_moody: 20,
                feigin: 20,
                extension: 20,
            },
            tolerances: DEFAULT_TOLERANCES.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            hooks: Hooks::default(),
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("`{key}`: cannot parse `{value}`")))
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut grid_kind = "circle".to_string();
        let mut grid_n = cfg.grid.side();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "group_n" => cfg.group_n = parse_num(key, value)?,
                "real_form" => {
                    cfg.real_form = match value {
                        "gl" => RealForm::Gl,
                        "sl" => RealForm::Sl,
                        "su" => RealForm::Su,
                        _ => return Err(Error::Config(format!("unknown real form `{value}`"))),
                    }
                }
                "p" => cfg.p = parse_num(key, value)?,
                "chart_radius" => cfg.chart_radius = parse_num(key, value)?,
                "sample_scale" => cfg.sample_scale = parse_num(key, value)?,
                "eta_scale" => cfg.eta_scale = parse_num(key, value)?,
                "loop_amplitude" => cfg.loop_amplitude = parse_num(key, value)?,
                "grid" => grid_kind = value.to_string(),
                "grid_n" => grid_n = parse_num(key, value)?,
                "torus_n" => cfg.torus_n = parse_num(key, value)?,
                "quadrature_degree" => cfg.quadrature_degree = parse_num(key, value)?,
                "fd_step" => cfg.fd_step = parse_num(key, value)?,
                "seed" => cfg.seed = parse_num(key, value)?,
                "workers" => cfg.workers = parse_num(key, value)?,
                "samples.bss" => cfg.samples.bss = parse_num(key, value)?,
                "samples.calibration" => cfg.samples.calibration = parse_num(key, value)?,
                "samples.eta" => cfg.samples.eta = parse_num(key, value)?,
                "samples.eta_convergence" => cfg.samples.eta_convergence = parse_num(key, value)?,
                "samples.loops" => cfg.samples.loops = parse_num(key, value)?,
                "samples.kac_moody" => cfg.samples.kac_moody = parse_num(key, value)?,
                "samples.feigin" => cfg.samples.feigin = parse_num(key, value)?,
                "samples.extension" => cfg.samples.extension = parse_num(key, value)?,
                "hook.corrupt_face_sign" => cfg.hooks.corrupt_face_sign = parse_num(key, value)?,
                "hook.perturb_cocycle" => cfg.hooks.perturb_cocycle = parse_num(key, value)?,
                _ => match key.strip_prefix("tol.") {
                    Some(name) if cfg.tolerances.contains_key(name) => {
                        cfg.tolerances.insert(name.to_string(), parse_num(key, value)?);
                    }
                    _ => return Err(Error::Config(format!("unknown key `{key}`"))),
                },
            }
        }
        cfg.grid = match grid_kind.as_str() {
            "circle" => GridDomain::Circle { n: grid_n },
            "torus" => GridDomain::Torus { n: grid_n },
            _ => return Err(Error::Config(format!("unknown grid `{grid_kind}`"))),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("chart_radius", self.chart_radius),
            ("sample_scale", self.sample_scale),
            ("eta_scale", self.eta_scale),
            ("loop_amplitude", self.loop_amplitude),
            ("fd_step", self.fd_step),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("`{name}` must be positive, got {v}")));
            }
        }
        if self.group_n < 1 || self.workers < 1 || self.quadrature_degree < 1 {
            return Err(Error::Config("group_n, workers and quadrature_degree must be at least 1".into()));
        }
        if self.p != 2 {
            return Err(Error::Config(format!(
                "the suites use the degree-2 closed forms; p = {} is not supported",
                self.p
            )));
        }
        if !matches!(self.grid, GridDomain::Circle { .. }) {
            return Err(Error::Config("the loop suites need `grid = circle`".into()));
        }
        if self.grid.side() < 8 || self.torus_n < 8 {
            return Err(Error::Config("grids need at least 8 points per axis".into()));
        }
        if !(1e-4..=1e-2).contains(&self.fd_step) {
            return Err(Error::Config("fd_step must lie in [1e-4, 1e-2]".into()));
        }
        if self.tolerances.values().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        Ok(())
    }

    pub fn tol(&self, name: &str) -> f64 {
        self.tolerances[name]
    }
}
