//! Run configuration: flat dotted keys loaded from a plain-text file
//! (`key = value` lines, `#` comments) with command-line `--set`
//! overrides applied on top.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::model::ModelParams;
use crate::pde_radial::BoundaryDerivative;
use crate::{Dim, Error, Result};

/// Which experiment a run executes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Integrate the front DAE and emit `front.csv`.
    Analytic,
    /// Sample the closed-form profile and emit `profile.csv`.
    Profile,
    /// Tabulate the inner radius over an outer-radius range
    /// (`relation.csv`).
    Relation,
    /// Run the 1D scheme (`snapshot_*.csv`, `diagnostics.csv`).
    Sim1d,
    /// Run the radial scheme.
    SimRadial,
    /// Run PDE and DAE side by side and emit `discrepancy.csv`.
    Compare,
    /// Cross product over one parameter, one subdirectory per value plus
    /// `summary.csv`.
    Sweep,
}

impl Command {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(Command::Analytic),
            "profile" => Ok(Command::Profile),
            "relation" => Ok(Command::Relation),
            "sim1d" => Ok(Command::Sim1d),
            "simradial" => Ok(Command::SimRadial),
            "compare" => Ok(Command::Compare),
            "sweep" => Ok(Command::Sweep),
            other => Err(Error::Config(format!("unknown command '{other}'"))),
        }
    }
}

/// Time-step selection: explicit, or via a CFL number re-evaluated each
/// step. Exactly one may be configured.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeStep {
    Fixed(f64),
    Cfl(f64),
}

/// Fully resolved configuration for one run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub params: ModelParams,
    pub dim: Dim,
    /// Initial outer radius.
    pub r0: f64,
    /// Initial inner radius; solved from the boundary relation when
    /// absent.
    pub r1_0: Option<f64>,
    /// Half-width of the symmetric 1D domain, or the radial domain
    /// radius; derived from the expected final front when absent.
    pub domain: Option<f64>,
    /// Cell count; exactly one of `n`/`dx` is given.
    pub n: Option<usize>,
    pub dx: Option<f64>,
    pub t_end: f64,
    pub time_step: TimeStep,
    pub out_dir: PathBuf,
    /// Emit `snapshot_XXXX.csv` every this many steps (0 = never).
    pub snapshot_stride: usize,
    /// Append a diagnostics row every this many steps.
    pub diag_stride: usize,
    /// Front detection threshold.
    pub front_threshold: f64,
    /// Median-of-3 filter on the measured pressure jump.
    pub jump_median3: bool,
    /// Boundary closure for the radial first derivative.
    pub radial_derivative: BoundaryDerivative,
    /// Outer-radius range for the `relation` command.
    pub relation_range: (f64, f64, usize),
    pub sweep: Option<SweepSpec>,
    pub jobs: usize,
}

/// Sweep description: dotted parameter key, values, and the command run
/// per value.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub parameter: String,
    pub values: Vec<f64>,
    pub run: Command,
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.trim()
        .parse::<f64>()
        .map_err(|_| Error::Config(format!("key '{key}': expected a number, got '{v}'")))
}

fn parse_usize(key: &str, v: &str) -> Result<usize> {
    v.trim()
        .parse::<usize>()
        .map_err(|_| Error::Config(format!("key '{key}': expected an integer, got '{v}'")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v.trim() {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        other => Err(Error::Config(format!("key '{key}': expected a boolean, got '{other}'"))),
    }
}

/// Raw key-value map, before resolution into a [`RunConfig`].
#[derive(Debug, Clone, Default)]
pub struct KeyValues(pub BTreeMap<String, String>);

impl KeyValues {
    /// Parse `key = value` lines; `#` starts a comment.
    pub fn parse_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse_text(&text)
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .or_else(|| line.split_once(':'))
                .ok_or_else(|| {
                    Error::Config(format!("line {}: expected 'key = value'", lineno + 1))
                })?;
            map.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(KeyValues(map))
    }

    /// Apply one `key=value` override.
    pub fn set(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("--set expects key=value, got '{assignment}'")))?;
        self.0.insert(key.trim().to_string(), value.trim().to_string());
        Ok(())
    }

    fn take(&mut self, key: &str) -> Option<String> {
        self.0.remove(key)
    }

    /// Resolve the map into a full configuration. `command` and `dim`
    /// come from the command line and win over file keys.
    pub fn resolve(mut self, command: Command, dim: Dim, out: Option<PathBuf>) -> Result<RunConfig> {
        // command/dim keys in the file are accepted but overridden
        self.take("command");
        self.take("geometry.dim");

        let c_s = self.take("params.c_s").map(|v| parse_f64("params.c_s", &v)).transpose()?;
        let c_z = self.take("params.c_z").map(|v| parse_f64("params.c_z", &v)).transpose()?;
        let c_p = self.take("params.c_p").map(|v| parse_f64("params.c_p", &v)).transpose()?;
        let c_nu = self.take("params.c_nu").map(|v| parse_f64("params.c_nu", &v)).transpose()?;
        let eta = self.take("params.eta").map(|v| parse_f64("params.eta", &v)).transpose()?;
        let params = ModelParams::new(
            c_s.unwrap_or(1.0),
            c_z.unwrap_or(0.2),
            c_p.unwrap_or(1.0),
            c_nu.unwrap_or(50.0),
            eta.unwrap_or(1e-3),
        )?;

        let r0 = self.take("geometry.r0").map(|v| parse_f64("geometry.r0", &v)).transpose()?;
        // geometry.r_0 accepted as an alias
        let r0_alias = self.take("geometry.r_0").map(|v| parse_f64("geometry.r_0", &v)).transpose()?;
        let r0 = r0.or(r0_alias).unwrap_or(1.5);
        let r1_0 = self.take("geometry.r1_0").map(|v| parse_f64("geometry.r1_0", &v)).transpose()?;

        let x_max = self.take("grid.x_max").map(|v| parse_f64("grid.x_max", &v)).transpose()?;
        let l_r = self.take("grid.l_r").map(|v| parse_f64("grid.l_r", &v)).transpose()?;
        if x_max.is_some() && l_r.is_some() {
            return Err(Error::Config("give either grid.x_max or grid.l_r, not both".into()));
        }
        let domain = x_max.or(l_r);
        let n = self.take("grid.n").map(|v| parse_usize("grid.n", &v)).transpose()?;
        let dx = self.take("grid.dx").map(|v| parse_f64("grid.dx", &v)).transpose()?;
        if n.is_some() && dx.is_some() {
            return Err(Error::Config("give either grid.n or grid.dx, not both".into()));
        }

        let t_end =
            self.take("time.t_end").map(|v| parse_f64("time.t_end", &v)).transpose()?.unwrap_or(5.0);
        if t_end <= 0.0 {
            return Err(Error::Config(format!("time.t_end must be positive, got {t_end}")));
        }
        let dt = self.take("time.dt").map(|v| parse_f64("time.dt", &v)).transpose()?;
        let cfl = self.take("time.cfl").map(|v| parse_f64("time.cfl", &v)).transpose()?;
        let time_step = match (dt, cfl) {
            (Some(_), Some(_)) => {
                return Err(Error::Config("give either time.dt or time.cfl, not both".into()))
            }
            (Some(dt), None) => {
                if dt <= 0.0 {
                    return Err(Error::Config(format!("time.dt must be positive, got {dt}")));
                }
                TimeStep::Fixed(dt)
            }
            (None, Some(cfl)) => {
                if !(cfl > 0.0 && cfl <= crate::pde1d::CFL_LIMIT) {
                    return Err(Error::Config(format!(
                        "time.cfl must lie in (0, {}], got {cfl}",
                        crate::pde1d::CFL_LIMIT
                    )));
                }
                TimeStep::Cfl(cfl)
            }
            (None, None) => TimeStep::Cfl(crate::pde1d::CFL_LIMIT),
        };

        let out_dir = out
            .or_else(|| self.take("output.directory").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("out"));
        let snapshot_stride = self
            .take("output.snapshot_stride")
            .map(|v| parse_usize("output.snapshot_stride", &v))
            .transpose()?
            .unwrap_or(0);
        let diag_stride = self
            .take("output.diag_stride")
            .map(|v| parse_usize("output.diag_stride", &v))
            .transpose()?
            .unwrap_or(50)
            .max(1);

        let front_threshold = self
            .take("diag.front_threshold")
            .map(|v| parse_f64("diag.front_threshold", &v))
            .transpose()?
            .unwrap_or(0.5);
        let jump_median3 = self
            .take("diag.jump_median3")
            .map(|v| parse_bool("diag.jump_median3", &v))
            .transpose()?
            .unwrap_or(false);

        let radial_derivative = match self.take("scheme.radial_derivative").as_deref() {
            None | Some("verbatim") => BoundaryDerivative::Verbatim,
            Some("standard") => BoundaryDerivative::Standard,
            Some(other) => {
                return Err(Error::Config(format!(
                    "scheme.radial_derivative must be 'verbatim' or 'standard', got '{other}'"
                )))
            }
        };

        let rel_min =
            self.take("relation.r_min").map(|v| parse_f64("relation.r_min", &v)).transpose()?;
        let rel_max =
            self.take("relation.r_max").map(|v| parse_f64("relation.r_max", &v)).transpose()?;
        let rel_steps = self
            .take("relation.steps")
            .map(|v| parse_usize("relation.steps", &v))
            .transpose()?
            .unwrap_or(100);
        let relation_range = (rel_min.unwrap_or(0.5), rel_max.unwrap_or(3.0), rel_steps.max(2));

        let sweep = match (
            self.take("sweep.parameter"),
            self.take("sweep.values"),
            self.take("sweep.run"),
        ) {
            (None, None, None) => None,
            (Some(parameter), Some(values), run) => {
                let values: Vec<f64> = values
                    .split(',')
                    .map(|v| parse_f64("sweep.values", v))
                    .collect::<Result<_>>()?;
                if values.is_empty() || values.iter().any(|v| !v.is_finite() || *v <= 0.0) {
                    return Err(Error::Config(
                        "sweep.values must be a nonempty list of positive numbers".into(),
                    ));
                }
                let run = Command::parse(run.as_deref().unwrap_or("sim1d"))?;
                if matches!(run, Command::Sweep) {
                    return Err(Error::Config("sweep.run cannot itself be 'sweep'".into()));
                }
                Some(SweepSpec { parameter, values, run })
            }
            _ => {
                return Err(Error::Config(
                    "a sweep needs both sweep.parameter and sweep.values".into(),
                ))
            }
        };
        if command == Command::Sweep && sweep.is_none() {
            return Err(Error::Config("the sweep command needs sweep.* keys".into()));
        }

        let jobs = self
            .take("jobs")
            .map(|v| parse_usize("jobs", &v))
            .transpose()?
            .unwrap_or(1)
            .max(1);

        // reserved, accepted for reproducibility scripts
        self.take("seed");

        if let Some((key, _)) = self.0.iter().next() {
            return Err(Error::Config(format!("unknown config key '{key}'")));
        }

        Ok(RunConfig {
            command,
            params,
            dim,
            r0,
            r1_0,
            domain,
            n,
            dx,
            t_end,
            time_step,
            out_dir,
            snapshot_stride,
            diag_stride,
            front_threshold,
            jump_median3,
            radial_derivative,
            relation_range,
            sweep,
            jobs,
        })
    }
}

impl RunConfig {
    /// Override one dotted physical parameter (used by sweeps).
    pub fn set_parameter(&mut self, key: &str, value: f64) -> Result<()> {
        match key {
            "params.c_s" => self.params.c_s = value,
            "params.c_z" => self.params.c_z = value,
            "params.c_p" => self.params.c_p = value,
            "params.c_nu" => self.params.c_nu = value,
            "params.eta" => self.params.eta = value,
            "geometry.r0" => self.r0 = value,
            "time.t_end" => self.t_end = value,
            "time.dt" => self.time_step = TimeStep::Fixed(value),
            other => {
                return Err(Error::Config(format!("'{other}' is not sweepable")));
            }
        }
        self.params.validate()
    }
}
