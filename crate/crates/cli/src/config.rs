//! Run configuration: a flat `key = value` file merged with command-line flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use escatter_core::density_matrix::DEFAULT_GRID_CAP;
use escatter_core::SpinChannel;
use sha2::{Digest, Sha256};
use thiserror::Error;

pub const THREADS_ENV: &str = "ESCATTER_THREADS";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("line {line}: expected `key = value`, found `{text}`")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` given twice")]
    Duplicate { line: usize, key: String },
    #[error("{field}: invalid value `{value}`: {reason}")]
    Invalid {
        field: &'static str,
        value: String,
        reason: String,
    },
    #[error("missing {0}")]
    Missing(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    SpinlessSweep,
    SphereSweep,
    VnCompare,
    SpinSweep,
    PostselectRange,
    Equator,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::SpinlessSweep,
        Command::SphereSweep,
        Command::VnCompare,
        Command::SpinSweep,
        Command::PostselectRange,
        Command::Equator,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::SpinlessSweep => "spinless-sweep",
            Command::SphereSweep => "sphere-sweep",
            Command::VnCompare => "vn-compare",
            Command::SpinSweep => "spin-sweep",
            Command::PostselectRange => "postselect-range",
            Command::Equator => "equator",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s.trim())
            .ok_or_else(|| {
                let names: Vec<_> = Command::ALL.iter().map(|c| c.name()).collect();
                format!("expected one of {}", names.join(", "))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeometryArg {
    Rings,
    Sphere,
    Meridian,
    Equator,
}

impl GeometryArg {
    pub fn name(self) -> &'static str {
        match self {
            GeometryArg::Rings => "rings",
            GeometryArg::Sphere => "sphere",
            GeometryArg::Meridian => "meridian",
            GeometryArg::Equator => "equator",
        }
    }
}

impl FromStr for GeometryArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "rings" | "ring" => Ok(GeometryArg::Rings),
            "sphere" => Ok(GeometryArg::Sphere),
            "meridian" => Ok(GeometryArg::Meridian),
            "equator" => Ok(GeometryArg::Equator),
            _ => Err("expected rings, sphere, meridian or equator".into()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err("expected csv or json".into()),
        }
    }
}

/// Settings as text, before validation. File values are overridden by flags.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub command: Option<String>,
    pub energy_ev: Option<String>,
    pub energy_list: Option<String>,
    pub packet_nm: Option<String>,
    pub k_scale: Option<String>,
    pub grid_cap: Option<String>,
    pub n_grid: Option<String>,
    pub channel: Option<String>,
    pub geometry: Option<String>,
    pub theta_r: Option<String>,
    pub cells: Option<String>,
    pub delta_theta_mrad: Option<String>,
    pub out: Option<String>,
    pub format: Option<String>,
    pub threads: Option<String>,
}

pub const KEYS: [&str; 15] = [
    "command",
    "energy_ev",
    "energy_list",
    "packet_nm",
    "k_scale",
    "grid_cap",
    "n_grid",
    "channel",
    "geometry",
    "theta_r",
    "cells",
    "delta_theta_mrad",
    "out",
    "format",
    "threads",
];

impl Settings {
    fn slot(&mut self, key: &str) -> Option<&mut Option<String>> {
        Some(match key {
            "command" => &mut self.command,
            "energy_ev" => &mut self.energy_ev,
            "energy_list" => &mut self.energy_list,
            "packet_nm" => &mut self.packet_nm,
            "k_scale" => &mut self.k_scale,
            "grid_cap" => &mut self.grid_cap,
            "n_grid" => &mut self.n_grid,
            "channel" => &mut self.channel,
            "geometry" => &mut self.geometry,
            "theta_r" => &mut self.theta_r,
            "cells" => &mut self.cells,
            "delta_theta_mrad" => &mut self.delta_theta_mrad,
            "out" => &mut self.out,
            "format" => &mut self.format,
            "threads" => &mut self.threads,
            _ => return None,
        })
    }

    /// Parses `key = value` lines. `#` starts a comment; keys may use `-` or `_`.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut s = Settings::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line,
                text: raw.trim().to_string(),
            })?;
            let key = key.trim().replace('-', "_");
            let value = value.trim().trim_matches('"').to_string();
            if key.is_empty() {
                return Err(ConfigError::Syntax {
                    line,
                    text: raw.trim().to_string(),
                });
            }
            let slot = s.slot(&key).ok_or_else(|| ConfigError::UnknownKey {
                line,
                key: key.clone(),
            })?;
            if slot.is_some() {
                return Err(ConfigError::Duplicate { line, key });
            }
            *slot = Some(value);
        }
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Values set in `flags` replace those in `self`.
    pub fn overridden_by(mut self, flags: Settings) -> Self {
        for key in KEYS {
            let v = flags.clone().slot(key).and_then(|s| s.take());
            if v.is_some() {
                *self.slot(key).expect("known key") = v;
            }
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub energies_ev: Vec<f64>,
    pub packet_nm: f64,
    pub k_scale: f64,
    pub grid_cap: usize,
    pub n_grid: usize,
    pub channel: SpinChannel,
    pub geometry: Option<GeometryArg>,
    pub theta_r: Option<Vec<f64>>,
    pub cells: Option<Vec<usize>>,
    pub delta_theta_mrad: Option<Vec<f64>>,
    pub out: Option<PathBuf>,
    pub format: Format,
    /// 0 lets the thread pool pick.
    pub threads: usize,
}

pub const DEFAULT_PACKET_NM: f64 = 100.0;
pub const DEFAULT_N_GRID: usize = 512;

fn invalid(field: &'static str, value: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field,
        value: value.to_string(),
        reason: reason.into(),
    }
}

fn parse_one<T: FromStr>(field: &'static str, value: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    value
        .trim()
        .parse::<T>()
        .map_err(|e| invalid(field, value, e.to_string()))
}

fn positive(field: &'static str, value: &str) -> Result<f64, ConfigError> {
    let x: f64 = parse_one(field, value)?;
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(invalid(field, value, "must be a positive number"))
    }
}

/// Comma-separated numbers, or `start:stop:count` for a geometric sequence.
pub fn parse_list(field: &'static str, value: &str) -> Result<Vec<f64>, ConfigError> {
    let v = value.trim();
    if v.contains(':') {
        let parts: Vec<&str> = v.split(':').collect();
        if parts.len() != 3 {
            return Err(invalid(field, value, "range form is start:stop:count"));
        }
        let a = positive(field, parts[0])?;
        let b = positive(field, parts[1])?;
        let n: usize = parse_one(field, parts[2])?;
        if n < 2 {
            return Err(invalid(field, value, "range needs at least 2 points"));
        }
        let r = (b / a).ln();
        return Ok((0..n)
            .map(|i| {
                if i + 1 == n {
                    b
                } else {
                    a * (r * i as f64 / (n - 1) as f64).exp()
                }
            })
            .collect());
    }
    let xs = v
        .split(',')
        .map(|s| positive(field, s))
        .collect::<Result<Vec<_>, _>>()?;
    if xs.is_empty() {
        return Err(invalid(field, value, "empty list"));
    }
    Ok(xs)
}

impl RunConfig {
    pub fn from_settings(s: &Settings) -> Result<Self, ConfigError> {
        let command: Command = match &s.command {
            Some(c) => parse_one("command", c)?,
            None => return Err(ConfigError::Missing("command")),
        };
        let geometry = s
            .geometry
            .as_deref()
            .map(|g| parse_one::<GeometryArg>("geometry", g))
            .transpose()?;
        let allowed: &[GeometryArg] = match command {
            Command::SpinlessSweep | Command::SphereSweep => {
                &[GeometryArg::Rings, GeometryArg::Sphere]
            }
            Command::VnCompare => &[GeometryArg::Meridian],
            Command::SpinSweep | Command::PostselectRange => &[GeometryArg::Rings],
            Command::Equator => &[GeometryArg::Equator],
        };
        if let Some(g) = geometry {
            if !allowed.contains(&g) {
                return Err(invalid(
                    "geometry",
                    g.name(),
                    format!("not available for {command}"),
                ));
            }
        }

        let mut energies_ev = match (&s.energy_list, &s.energy_ev) {
            (Some(l), _) => parse_list("energy_list", l)?,
            (None, Some(e)) => vec![positive("energy_ev", e)?],
            (None, None) => Vec::new(),
        };
        let delta_theta_mrad = s
            .delta_theta_mrad
            .as_deref()
            .map(|v| parse_list("delta_theta_mrad", v))
            .transpose()?;
        if energies_ev.is_empty() && !(command == Command::Equator && delta_theta_mrad.is_some()) {
            return Err(ConfigError::Missing("energy (energy_ev or energy_list)"));
        }
        if command == Command::Equator && delta_theta_mrad.is_some() {
            energies_ev.clear();
        }

        let packet_nm = match &s.packet_nm {
            Some(v) => positive("packet_nm", v)?,
            None => DEFAULT_PACKET_NM,
        };
        let k_scale = match &s.k_scale {
            Some(v) => positive("k_scale", v)?,
            None => 1.0,
        };
        let grid_cap = match &s.grid_cap {
            Some(v) => parse_one::<usize>("grid_cap", v)?,
            None => DEFAULT_GRID_CAP,
        };
        if grid_cap == 0 {
            return Err(invalid("grid_cap", "0", "must be at least 1"));
        }
        let n_grid = match &s.n_grid {
            Some(v) => parse_one::<usize>("n_grid", v)?,
            None => DEFAULT_N_GRID.min(grid_cap),
        };
        if n_grid == 0 {
            return Err(invalid("n_grid", "0", "must be at least 1"));
        }
        if n_grid > grid_cap {
            return Err(invalid(
                "n_grid",
                &n_grid.to_string(),
                format!("exceeds grid_cap {grid_cap}"),
            ));
        }
        let channel = match &s.channel {
            Some(v) => parse_one::<SpinChannel>("channel", v)?,
            None => SpinChannel::Spinless,
        };
        let theta_r = s
            .theta_r
            .as_deref()
            .map(|v| {
                v.split(',')
                    .map(|x| positive("theta_r", x))
                    .collect::<Result<Vec<_>, _>>()
            })
            .transpose()?;
        let cells = s
            .cells
            .as_deref()
            .map(|v| {
                v.split(',')
                    .map(|x| {
                        let n: usize = parse_one("cells", x)?;
                        if n == 0 {
                            Err(invalid("cells", x, "must be at least 1"))
                        } else {
                            Ok(n)
                        }
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .transpose()?;
        let format = match (&s.format, &s.out) {
            (Some(f), _) => parse_one::<Format>("format", f)?,
            (None, Some(o)) if o.ends_with(".json") => Format::Json,
            _ => Format::Csv,
        };
        let threads = match s
            .threads
            .clone()
            .or_else(|| std::env::var(THREADS_ENV).ok())
        {
            Some(v) => parse_one::<usize>("threads", &v)?,
            None => 0,
        };
        Ok(RunConfig {
            command,
            energies_ev,
            packet_nm,
            k_scale,
            grid_cap,
            n_grid,
            channel,
            geometry,
            theta_r,
            cells,
            delta_theta_mrad,
            out: s.out.as_ref().map(PathBuf::from),
            format,
            threads,
        })
    }

    /// Canonical text of every setting that affects the numbers. The output
    /// path and thread count are left out, so they never change the bytes.
    pub fn canonical(&self) -> String {
        let list = |xs: &[f64]| {
            xs.iter()
                .map(|x| format!("{x:e}"))
                .collect::<Vec<_>>()
                .join(",")
        };
        let mut m = BTreeMap::new();
        m.insert("command", self.command.name().to_string());
        m.insert("energies_ev", list(&self.energies_ev));
        m.insert("packet_nm", format!("{:e}", self.packet_nm));
        m.insert("k_scale", format!("{:e}", self.k_scale));
        m.insert("grid_cap", self.grid_cap.to_string());
        m.insert("n_grid", self.n_grid.to_string());
        m.insert("channel", self.channel.name().to_string());
        m.insert(
            "geometry",
            self.geometry
                .map(|g| g.name())
                .unwrap_or("default")
                .to_string(),
        );
        m.insert(
            "theta_r",
            self.theta_r.as_deref().map(list).unwrap_or_default(),
        );
        m.insert(
            "cells",
            self.cells
                .as_ref()
                .map(|c| {
                    c.iter()
                        .map(|n| n.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                })
                .unwrap_or_default(),
        );
        m.insert(
            "delta_theta_mrad",
            self.delta_theta_mrad
                .as_deref()
                .map(list)
                .unwrap_or_default(),
        );
        m.insert(
            "format",
            match self.format {
                Format::Csv => "csv",
                Format::Json => "json",
            }
            .to_string(),
        );
        m.iter()
            .map(|(k, v)| format!("{k}={v}\n"))
            .collect::<String>()
    }

    pub fn hash_hex(&self) -> String {
        hex::encode(Sha256::digest(self.canonical().as_bytes()))
    }
}
