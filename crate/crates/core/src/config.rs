//! Run configuration as flat `key = value` text, and deterministic initial data.
//!
//! ```text
//! # comments start with '#'
//! tau = 1.0
//! D1 = 1.0
//! nx = 64
//! scheme = imex
//! dt = auto
//! ic = random
//! seed = 42
//! ```
//!
//! Unknown keys are rejected. [`RunConfig::to_text`] writes a file that parses
//! back to the same configuration.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{ChevronError, Result};
use crate::field::{ComplexField, RealField};
use crate::grid::Grid2D;
use crate::params::ChevronParams;
use crate::pde::{reaction_rate, stable_dt_with_safety, Scheme, StepperConfig, DEFAULT_SAFETY};
use crate::snapshot;
use crate::state::SimState;

/// Generator behind the `random` initial condition.
pub const PRNG_NAME: &str = "ChaCha8Rng (rand_chacha), seed_from_u64";

#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    Zero,
    Random { seed: u64, amplitude: f64 },
    SingleMode { kx: u32, ky: u32, amplitude: f64 },
    File(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DtPolicy {
    Fixed(f64),
    /// Largest step allowed by the stability heuristic for the initial state.
    Auto,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: ChevronParams,
    pub grid: Grid2D,
    pub scheme: Scheme,
    pub dt: DtPolicy,
    pub safety: f64,
    pub t_end: f64,
    pub observe_every: f64,
    /// 0 disables periodic snapshots.
    pub snapshot_every: f64,
    pub ic: InitialCondition,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: ChevronParams::default(),
            grid: Grid2D::new(64, 64, 1.0, 1.0).expect("valid default grid"),
            scheme: Scheme::ImexEuler,
            dt: DtPolicy::Auto,
            safety: DEFAULT_SAFETY,
            t_end: 1.0,
            observe_every: 0.1,
            snapshot_every: 0.0,
            ic: InitialCondition::Random { seed: 0, amplitude: 0.1 },
            output_dir: PathBuf::from("out"),
        }
    }
}

/// Every accepted key, in the order [`RunConfig::to_text`] writes them.
pub const KEYS: [&str; 24] = [
    "tau", "D1", "D2", "c1", "c2", "h", "beta", "nx", "ny", "Lx", "Ly", "scheme", "dt", "safety", "t_end",
    "observe_every", "snapshot_every", "ic", "seed", "amplitude", "kx", "ky", "ic_file", "output_dir",
];

/// Flat key/value view used while parsing; validated into a [`RunConfig`].
#[derive(Debug, Clone)]
struct Raw {
    /// `(key, value, where it came from)`; later entries win.
    entries: Vec<(String, String, String)>,
}

impl Raw {
    fn entry(&self, key: &str) -> Option<&(String, String, String)> {
        self.entries.iter().rev().find(|(k, _, _)| k == key)
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.entry(key).map(|(_, v, _)| v.as_str())
    }

    /// Error about the value of `key`, prefixed with its location.
    fn bad(&self, key: &str, msg: String) -> ChevronError {
        let at = self.entry(key).map_or("<defaults>", |(_, _, at)| at.as_str());
        ChevronError::InvalidParameter(format!("{at}: {msg}"))
    }

    fn set(&mut self, key: &str, value: &str, at: String) -> Result<()> {
        if !KEYS.contains(&key) {
            return Err(ChevronError::InvalidParameter(format!(
                "unknown config key '{key}' (known keys: {})",
                KEYS.join(", ")
            )));
        }
        self.entries.push((key.to_string(), value.trim().to_string(), at));
        Ok(())
    }

    fn num<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| self.bad(key, format!("config key '{key}': cannot parse '{v}'"))),
        }
    }
}

impl RunConfig {
    /// Parses config text. `origin` names the source in error messages.
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        Self::parse_with_overrides(text, origin, &[])
    }

    /// Parses config text, then applies `key=value` overrides in order.
    pub fn parse_with_overrides(text: &str, origin: &str, overrides: &[String]) -> Result<Self> {
        let mut raw = Raw { entries: Vec::new() };
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                ChevronError::InvalidParameter(format!("{origin}:{}: expected 'key = value', got '{line}'", n + 1))
            })?;
            let at = format!("{origin}:{}", n + 1);
            raw.set(k.trim(), v, at.clone())
                .map_err(|e| ChevronError::InvalidParameter(format!("{at}: {e}")))?;
        }
        for o in overrides {
            let (k, v) = o
                .split_once('=')
                .ok_or_else(|| ChevronError::InvalidParameter(format!("override '{o}' is not key=value")))?;
            raw.set(k.trim(), v, format!("--set {o}"))?;
        }
        Self::from_raw(&raw)
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ChevronError::InvalidParameter(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse_with_overrides(&text, &path.display().to_string(), overrides)
    }

    fn from_raw(raw: &Raw) -> Result<Self> {
        let d = RunConfig::default();
        let dp = d.params;
        let params = ChevronParams::new(
            raw.num("tau", dp.tau)?,
            raw.num("D1", dp.d1)?,
            raw.num("D2", dp.d2)?,
            raw.num("c1", dp.c1)?,
            raw.num("c2", dp.c2)?,
            raw.num("h", dp.h)?,
            raw.num("beta", dp.beta)?,
        )?;
        let grid = Grid2D::new(
            raw.num("nx", d.grid.nx())?,
            raw.num("ny", d.grid.ny())?,
            raw.num("Lx", d.grid.lx())?,
            raw.num("Ly", d.grid.ly())?,
        )?;
        let scheme: Scheme = match raw.get("scheme") {
            None => d.scheme,
            Some(v) => v.parse().map_err(|e: ChevronError| raw.bad("scheme", e.to_string()))?,
        };
        let dt = match raw.get("dt") {
            None => d.dt,
            Some(v) if v.eq_ignore_ascii_case("auto") => DtPolicy::Auto,
            Some(_) => DtPolicy::Fixed(raw.num("dt", 0.0)?),
        };
        let amplitude = raw.num("amplitude", 0.1)?;
        let ic = match raw.get("ic").unwrap_or("random").to_ascii_lowercase().as_str() {
            "zero" => InitialCondition::Zero,
            "random" => InitialCondition::Random { seed: raw.num("seed", 0)?, amplitude },
            "single_mode" => InitialCondition::SingleMode { kx: raw.num("kx", 1)?, ky: raw.num("ky", 1)?, amplitude },
            "file" => InitialCondition::File(PathBuf::from(
                raw.get("ic_file").ok_or_else(|| raw.bad("ic", "ic = file requires ic_file".into()))?,
            )),
            other => return Err(raw.bad("ic", format!("unknown ic '{other}' (zero | random | single_mode | file)"))),
        };
        let cfg = RunConfig {
            params,
            grid,
            scheme,
            dt,
            safety: raw.num("safety", d.safety)?,
            t_end: raw.num("t_end", d.t_end)?,
            observe_every: raw.num("observe_every", d.observe_every)?,
            snapshot_every: raw.num("snapshot_every", d.snapshot_every)?,
            ic,
            output_dir: raw.get("output_dir").map_or(d.output_dir, PathBuf::from),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        let bad = |msg: String| Err(ChevronError::InvalidParameter(msg));
        if let DtPolicy::Fixed(dt) = self.dt {
            StepperConfig { scheme: self.scheme, dt, safety: self.safety }.validate()?;
        }
        if !(self.safety > 0.0 && self.safety <= 1.0) {
            return bad(format!("safety must be in (0, 1], got {}", self.safety));
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return bad(format!("t_end must be >= 0, got {}", self.t_end));
        }
        if !(self.observe_every.is_finite() && self.observe_every > 0.0) {
            return bad(format!("observe_every must be > 0, got {}", self.observe_every));
        }
        if !(self.snapshot_every.is_finite() && self.snapshot_every >= 0.0) {
            return bad(format!("snapshot_every must be >= 0, got {}", self.snapshot_every));
        }
        match self.ic {
            InitialCondition::Random { amplitude, .. } | InitialCondition::SingleMode { amplitude, .. }
                if !(amplitude.is_finite() && amplitude >= 0.0) =>
            {
                bad(format!("amplitude must be >= 0, got {amplitude}"))
            }
            InitialCondition::SingleMode { kx: 0, .. } | InitialCondition::SingleMode { ky: 0, .. } => {
                bad("single_mode wave numbers kx, ky must be >= 1".into())
            }
            _ => Ok(()),
        }
    }

    /// Concrete step size for `initial`: the fixed value, or the stability
    /// heuristic evaluated at `max(1, max |A|, max |phi|)`.
    pub fn resolve_dt(&self, initial: &SimState) -> f64 {
        match self.dt {
            DtPolicy::Fixed(dt) => dt,
            DtPolicy::Auto => {
                let bound = 1f64.max(initial.a.max_abs()).max(initial.phi.max_abs());
                match self.scheme {
                    Scheme::Rk4Explicit => stable_dt_with_safety(&self.params, &self.grid, bound, self.safety),
                    Scheme::ImexEuler => self.safety / reaction_rate(&self.params, &self.grid, bound),
                }
            }
        }
    }

    pub fn stepper_config(&self, initial: &SimState) -> Result<StepperConfig> {
        let cfg = StepperConfig { scheme: self.scheme, dt: self.resolve_dt(initial), safety: self.safety };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Config text in the accepted format; parsing it gives back `self`.
    pub fn to_text(&self) -> String {
        let p = &self.params;
        let g = &self.grid;
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("tau", fmt_f64(p.tau));
        kv("D1", fmt_f64(p.d1));
        kv("D2", fmt_f64(p.d2));
        kv("c1", fmt_f64(p.c1));
        kv("c2", fmt_f64(p.c2));
        kv("h", fmt_f64(p.h));
        kv("beta", fmt_f64(p.beta));
        kv("nx", g.nx().to_string());
        kv("ny", g.ny().to_string());
        kv("Lx", fmt_f64(g.lx()));
        kv("Ly", fmt_f64(g.ly()));
        kv("scheme", self.scheme.name().to_string());
        kv(
            "dt",
            match self.dt {
                DtPolicy::Fixed(dt) => fmt_f64(dt),
                DtPolicy::Auto => "auto".into(),
            },
        );
        kv("safety", fmt_f64(self.safety));
        kv("t_end", fmt_f64(self.t_end));
        kv("observe_every", fmt_f64(self.observe_every));
        kv("snapshot_every", fmt_f64(self.snapshot_every));
        match &self.ic {
            InitialCondition::Zero => kv("ic", "zero".into()),
            InitialCondition::Random { seed, amplitude } => {
                kv("ic", "random".into());
                kv("seed", seed.to_string());
                kv("amplitude", fmt_f64(*amplitude));
            }
            InitialCondition::SingleMode { kx, ky, amplitude } => {
                kv("ic", "single_mode".into());
                kv("kx", kx.to_string());
                kv("ky", ky.to_string());
                kv("amplitude", fmt_f64(*amplitude));
            }
            InitialCondition::File(path) => {
                kv("ic", "file".into());
                kv("ic_file", path.display().to_string());
            }
        }
        kv("output_dir", self.output_dir.display().to_string());
        s
    }
}

/// Shortest decimal that parses back to the same `f64`.
fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

/// Builds the initial state described by `ic` on `grid`.
pub fn make_initial(ic: &InitialCondition, grid: &Grid2D) -> Result<SimState> {
    let (lx, ly) = (grid.lx(), grid.ly());
    match ic {
        InitialCondition::Zero => Ok(SimState::zeros(*grid)),
        InitialCondition::SingleMode { kx, ky, amplitude } => {
            let (kx, ky) = (*kx as f64, *ky as f64);
            let a = RealField::from_fn(*grid, |x, y| amplitude * (kx * PI * x / lx).sin() * (ky * PI * y / ly).sin());
            SimState::new(a.to_complex(), RealField::zeros(*grid), 0.0)
        }
        InitialCondition::Random { seed, amplitude } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut uniform = || amplitude * (2.0 * rng.random::<f64>() - 1.0);
            let bubble = |x: f64, y: f64| x * (lx - x) * y * (ly - y) / (lx * lx * ly * ly / 16.0);
            // Draw order: phi at every node, then (re, im) of A at every node.
            let phi = RealField::from_fn(*grid, |x, y| uniform() * bubble(x, y));
            let re = RealField::from_fn(*grid, |x, y| uniform() * bubble(x, y));
            let im = RealField::from_fn(*grid, |x, y| uniform() * bubble(x, y));
            let a = ComplexField::from_parts(&re, &im)?;
            SimState::new(a, phi, 0.0)
        }
        InitialCondition::File(path) => {
            let s = snapshot::read_file(path)?;
            if s.grid() != grid {
                return Err(ChevronError::InvalidParameter(format!(
                    "snapshot {} is on a {}x{} grid over {}x{}, config expects {}x{} over {}x{}",
                    path.display(),
                    s.grid().nx(),
                    s.grid().ny(),
                    s.grid().lx(),
                    s.grid().ly(),
                    grid.nx(),
                    grid.ny(),
                    grid.lx(),
                    grid.ly()
                )));
            }
            Ok(s)
        }
    }
}
