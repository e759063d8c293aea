//! Flat `key = value` run configuration.

use std::f64::consts::PI;
use std::fmt::Write as _;

use dimer_core::{DeviationParams, SystemParams};

/// First and last lines of the config echo in CSV headers.
pub const ECHO_BEGIN: &str = "# [config]";
pub const ECHO_END: &str = "# [end config]";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{}{message}", match line { Some(n) => format!("line {n}: "), None => String::new() })]
pub struct ConfigError {
    pub line: Option<usize>,
    pub key: Option<String>,
    pub message: String,
}

impl ConfigError {
    fn at(line: Option<usize>, key: &str, message: impl Into<String>) -> Self {
        ConfigError {
            line,
            key: Some(key.to_string()),
            message: message.into(),
        }
    }

    pub fn general(message: impl Into<String>) -> Self {
        ConfigError {
            line: None,
            key: None,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Spectrum,
    Sweep2d,
    Dynamics,
    G2,
    Fano,
    Asym,
}

impl Task {
    pub const ALL: [Task; 6] = [Task::Spectrum, Task::Sweep2d, Task::Dynamics, Task::G2, Task::Fano, Task::Asym];

    pub fn name(self) -> &'static str {
        match self {
            Task::Spectrum => "spectrum",
            Task::Sweep2d => "sweep2d",
            Task::Dynamics => "dynamics",
            Task::G2 => "g2",
            Task::Fano => "fano",
            Task::Asym => "asym",
        }
    }

    pub fn parse(s: &str) -> Option<Task> {
        Task::ALL.into_iter().find(|t| t.name() == s)
    }
}

/// How the probe detuning is chosen for each series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaRule {
    /// Use `delta` as given.
    Value,
    /// `J + J e^{-d/L}`, the bright-state line at Bragg spacing.
    Superradiant,
    /// `Delta = J`.
    J,
}

impl DeltaRule {
    fn name(self) -> &'static str {
        match self {
            DeltaRule::Value => "value",
            DeltaRule::Superradiant => "superradiant",
            DeltaRule::J => "j",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [DeltaRule::Value, DeltaRule::Superradiant, DeltaRule::J]
            .into_iter()
            .find(|r| r.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Initial {
    Left,
    Right,
    A,
    B,
}

impl Initial {
    fn name(self) -> &'static str {
        match self {
            Initial::Left => "left",
            Initial::Right => "right",
            Initial::A => "a",
            Initial::B => "b",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [Initial::Left, Initial::Right, Initial::A, Initial::B]
            .into_iter()
            .find(|r| r.name() == s)
    }

    pub fn state(self) -> dimer_core::InitialState {
        match self {
            Initial::Left => dimer_core::InitialState::Left,
            Initial::Right => dimer_core::InitialState::Right,
            Initial::A => dimer_core::InitialState::A,
            Initial::B => dimer_core::InitialState::B,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotColumn {
    T,
    Theta,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub task: Option<Task>,
    pub gamma_1d_1: f64,
    pub gamma_1d_2: f64,
    pub gamma_prime: f64,
    pub j: f64,
    pub kad: f64,
    pub d_over_l: f64,
    /// When set, `d/L = kad / ka_l` (fixed bound-state length).
    pub ka_l: Option<f64>,
    pub omega_p: f64,
    pub delta: f64,
    pub delta_rule: DeltaRule,
    pub delta_min: f64,
    pub delta_max: f64,
    pub delta_points: usize,
    pub kad_min: f64,
    pub kad_max: f64,
    pub kad_points: usize,
    pub t_max: f64,
    pub t_points: usize,
    pub initial: Initial,
    pub tau_max: f64,
    pub tau_points: usize,
    /// Spacing error; when set the spacing is `(1 + eta) pi`.
    pub eta: Option<f64>,
    pub xi: Vec<f64>,
    pub j_values: Vec<f64>,
    pub plot_column: PlotColumn,
    pub out: Option<String>,
    pub svg: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            task: None,
            gamma_1d_1: 1.0,
            gamma_1d_2: 1.0,
            gamma_prime: 0.0,
            j: 1.0,
            kad: PI,
            d_over_l: 0.1,
            ka_l: None,
            omega_p: 1e-4,
            delta: 0.0,
            delta_rule: DeltaRule::Value,
            delta_min: -6.0,
            delta_max: 6.0,
            delta_points: 1201,
            kad_min: 0.0,
            kad_max: 2.0 * PI,
            kad_points: 201,
            t_max: 10.0,
            t_points: 2001,
            initial: Initial::Left,
            tau_max: 10.0,
            tau_points: 2001,
            eta: None,
            xi: vec![0.0],
            j_values: Vec::new(),
            plot_column: PlotColumn::T,
            out: None,
            svg: None,
        }
    }
}

pub const KEYS: &[&str] = &[
    "task", "gamma_1d_1", "gamma_1d_2", "gamma_prime", "j", "kad", "d_over_l", "ka_l", "omega_p",
    "delta", "delta_rule", "delta_min", "delta_max", "delta_points", "kad_min", "kad_max",
    "kad_points", "t_max", "t_points", "initial", "tau_max", "tau_points", "eta", "xi", "j_values",
    "plot_column", "out", "svg",
];

fn num(line: Option<usize>, key: &str, v: &str) -> Result<f64, ConfigError> {
    let x: f64 = v
        .parse()
        .map_err(|_| ConfigError::at(line, key, format!("`{key}`: `{v}` is not a number")))?;
    if !x.is_finite() {
        return Err(ConfigError::at(line, key, format!("`{key}` must be finite")));
    }
    Ok(x)
}

fn count(line: Option<usize>, key: &str, v: &str) -> Result<usize, ConfigError> {
    v.parse()
        .map_err(|_| ConfigError::at(line, key, format!("`{key}`: `{v}` is not a non-negative integer")))
}

fn list(line: Option<usize>, key: &str, v: &str) -> Result<Vec<f64>, ConfigError> {
    v.split(',').map(|s| num(line, key, s.trim())).collect()
}

impl RunConfig {
    /// Apply one `key = value` assignment.
    pub fn set(&mut self, key: &str, value: &str, line: Option<usize>) -> Result<(), ConfigError> {
        let v = value.trim();
        match key {
            "task" => {
                self.task = Some(Task::parse(v).ok_or_else(|| {
                    ConfigError::at(line, key, format!("`task`: unknown task `{v}`"))
                })?)
            }
            "gamma_1d_1" => self.gamma_1d_1 = num(line, key, v)?,
            "gamma_1d_2" => self.gamma_1d_2 = num(line, key, v)?,
            "gamma_prime" => self.gamma_prime = num(line, key, v)?,
            "j" => self.j = num(line, key, v)?,
            "kad" => self.kad = num(line, key, v)?,
            "d_over_l" => self.d_over_l = num(line, key, v)?,
            "ka_l" => self.ka_l = if v == "none" { None } else { Some(num(line, key, v)?) },
            "omega_p" => self.omega_p = num(line, key, v)?,
            "delta" => self.delta = num(line, key, v)?,
            "delta_rule" => {
                self.delta_rule = DeltaRule::parse(v).ok_or_else(|| {
                    ConfigError::at(line, key, format!("`delta_rule`: expected value, superradiant or j, got `{v}`"))
                })?
            }
            "delta_min" => self.delta_min = num(line, key, v)?,
            "delta_max" => self.delta_max = num(line, key, v)?,
            "delta_points" => self.delta_points = count(line, key, v)?,
            "kad_min" => self.kad_min = num(line, key, v)?,
            "kad_max" => self.kad_max = num(line, key, v)?,
            "kad_points" => self.kad_points = count(line, key, v)?,
            "t_max" => self.t_max = num(line, key, v)?,
            "t_points" => self.t_points = count(line, key, v)?,
            "initial" => {
                self.initial = Initial::parse(v).ok_or_else(|| {
                    ConfigError::at(line, key, format!("`initial`: expected left, right, a or b, got `{v}`"))
                })?
            }
            "tau_max" => self.tau_max = num(line, key, v)?,
            "tau_points" => self.tau_points = count(line, key, v)?,
            "eta" => self.eta = if v == "none" { None } else { Some(num(line, key, v)?) },
            "xi" => self.xi = list(line, key, v)?,
            "j_values" => self.j_values = if v.is_empty() { Vec::new() } else { list(line, key, v)? },
            "plot_column" => {
                self.plot_column = match v {
                    "T" => PlotColumn::T,
                    "theta" => PlotColumn::Theta,
                    _ => return Err(ConfigError::at(line, key, format!("`plot_column`: expected T or theta, got `{v}`"))),
                }
            }
            "out" => self.out = Some(v.to_string()),
            "svg" => self.svg = Some(v.to_string()),
            _ => return Err(ConfigError::at(line, key, format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Apply every assignment in `text` on top of `self`, then validate.
    pub fn merge_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (idx, raw) in text.lines().enumerate() {
            let line = Some(idx + 1);
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| ConfigError {
                line,
                key: None,
                message: format!("expected `key = value`, got `{content}`"),
            })?;
            let key = key.trim();
            if key.is_empty() {
                return Err(ConfigError {
                    line,
                    key: None,
                    message: "missing key before `=`".into(),
                });
            }
            self.set(key, value, line)?;
        }
        self.validate()
    }

    /// Series values of `J`; a single `j` unless `j_values` is given.
    pub fn js(&self) -> Vec<f64> {
        if self.j_values.is_empty() {
            vec![self.j]
        } else {
            self.j_values.clone()
        }
    }

    pub fn effective_kad(&self) -> f64 {
        match self.eta {
            Some(eta) => (1.0 + eta) * PI,
            None => self.kad,
        }
    }

    pub fn d_over_l_at(&self, kad: f64) -> f64 {
        match self.ka_l {
            Some(l) => kad / l,
            None => self.d_over_l,
        }
    }

    pub fn deviation(&self) -> Option<DeviationParams> {
        self.eta.map(|eta| DeviationParams { eta })
    }

    /// Physical parameters for one series at spacing `kad`.
    pub fn params_at(&self, j: f64, kad: f64) -> SystemParams {
        let base = SystemParams {
            gamma_1d_1: self.gamma_1d_1,
            gamma_1d_2: self.gamma_1d_2,
            gamma_prime: self.gamma_prime,
            j_strength: j,
            kad,
            d_over_l: self.d_over_l_at(kad),
            omega_p_amp: self.omega_p,
            delta: self.delta,
        };
        let delta = match self.delta_rule {
            DeltaRule::Value => self.delta,
            DeltaRule::Superradiant => j + base.exchange(),
            DeltaRule::J => j,
        };
        base.with_delta(delta)
    }

    pub fn params(&self, j: f64) -> SystemParams {
        self.params_at(j, self.effective_kad())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let field = |key: &str, msg: String| ConfigError::at(None, key, msg);
        if let Some(l) = self.ka_l {
            if !(l > 0.0) {
                return Err(field("ka_l", format!("`ka_l` must be > 0, got {l}")));
            }
        }
        if let Some(eta) = self.eta {
            DeviationParams::new(eta).map_err(|e| field("eta", format!("`eta`: {e}")))?;
        }
        for j in self.js() {
            self.params(j).validate().map_err(|e| match e {
                dimer_core::Error::InvalidParameter { name, reason } => {
                    let key = match name {
                        "j_strength" => "j",
                        "omega_p_amp" => "omega_p",
                        other => other,
                    };
                    field(key, format!("`{key}` {reason}"))
                }
                other => ConfigError::general(other.to_string()),
            })?;
        }
        if !(self.delta_min < self.delta_max) {
            return Err(field("delta_min", "`delta_min` must be below `delta_max`".into()));
        }
        if !(self.kad_min < self.kad_max) || self.kad_min < 0.0 {
            return Err(field("kad_min", "need 0 <= `kad_min` < `kad_max`".into()));
        }
        for (key, n) in [
            ("delta_points", self.delta_points),
            ("kad_points", self.kad_points),
            ("t_points", self.t_points),
            ("tau_points", self.tau_points),
        ] {
            if n < 2 {
                return Err(field(key, format!("`{key}` must be at least 2, got {n}")));
            }
        }
        for (key, v) in [("t_max", self.t_max), ("tau_max", self.tau_max)] {
            if v < 0.0 {
                return Err(field(key, format!("`{key}` must be >= 0, got {v}")));
            }
        }
        if self.xi.is_empty() || self.xi.iter().any(|x| !(0.0..1.0).contains(x)) {
            return Err(field("xi", "`xi` values must lie in [0, 1)".into()));
        }
        Ok(())
    }

    /// `key = value` lines that re-parse to this config.
    pub fn echo(&self) -> String {
        let f = |x: f64| format!("{x:.16e}");
        let fl = |v: &[f64]| v.iter().map(|&x| f(x)).collect::<Vec<_>>().join(", ");
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        if let Some(t) = self.task {
            kv("task", t.name().into());
        }
        kv("gamma_1d_1", f(self.gamma_1d_1));
        kv("gamma_1d_2", f(self.gamma_1d_2));
        kv("gamma_prime", f(self.gamma_prime));
        kv("j", f(self.j));
        kv("kad", f(self.kad));
        kv("d_over_l", f(self.d_over_l));
        kv("ka_l", self.ka_l.map_or("none".into(), f));
        kv("omega_p", f(self.omega_p));
        kv("delta", f(self.delta));
        kv("delta_rule", self.delta_rule.name().into());
        kv("delta_min", f(self.delta_min));
        kv("delta_max", f(self.delta_max));
        kv("delta_points", self.delta_points.to_string());
        kv("kad_min", f(self.kad_min));
        kv("kad_max", f(self.kad_max));
        kv("kad_points", self.kad_points.to_string());
        kv("t_max", f(self.t_max));
        kv("t_points", self.t_points.to_string());
        kv("initial", self.initial.name().into());
        kv("tau_max", f(self.tau_max));
        kv("tau_points", self.tau_points.to_string());
        kv("eta", self.eta.map_or("none".into(), f));
        kv("xi", fl(&self.xi));
        kv("j_values", fl(&self.j_values));
        kv(
            "plot_column",
            match self.plot_column {
                PlotColumn::T => "T".into(),
                PlotColumn::Theta => "theta".into(),
            },
        );
        s
    }

    /// Recover a config from the echo block of a CSV header.
    pub fn from_header(csv: &str) -> Result<RunConfig, ConfigError> {
        let mut body = String::new();
        let mut inside = false;
        for line in csv.lines() {
            if line == ECHO_BEGIN {
                inside = true;
            } else if line == ECHO_END {
                break;
            } else if inside {
                body.push_str(line.strip_prefix("# ").unwrap_or(line));
                body.push('\n');
            }
        }
        parse_config(&body)
    }
}

/// Parse a config on top of the defaults.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    cfg.merge_text(text)?;
    Ok(cfg)
}
