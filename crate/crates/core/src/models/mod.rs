//! Benchmark systems and file loading.
//!
//! Built-in models: [`oscillator`], [`tdof`], [`heat3d`] and the synthetic
//! 270-dimensional [`iss_synthetic`] stand-in. Arbitrary sparse systems load
//! from a MatrixMarket file plus a JSON side-car, see [`load_system`].

mod builtin;
mod io;

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

pub use builtin::{heat3d, heat3d_center_index, iss_synthetic, oscillator, tdof, ISS_DIM};
pub use io::{
    load_benchmark, load_system, read_matrix_market, read_sidecar, write_iss_files,
    write_matrix_market, write_sidecar, SetDescriptor, Sidecar,
};

use crate::discretize::LinearSystem;
use crate::{Result, Vector};

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("invalid model parameter: {0}")]
    InvalidParameter(String),

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: invalid side-car: {message}", path.display())]
    Sidecar { path: PathBuf, message: String },

    #[error("inconsistent dimensions: {0}")]
    Dimension(String),
}

/// A system together with the reference step and output direction used in
/// the experiments.
#[derive(Debug, Clone)]
pub struct Benchmark {
    pub name: String,
    pub system: LinearSystem,
    pub delta: f64,
    pub direction: Vector,
}

/// Model name plus numeric parameters, written `name` or
/// `name:key=value,key=value` (for example `heat3d:n=10` or
/// `oscillator:f=1,r=0.5`).
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub name: String,
    pub params: BTreeMap<String, f64>,
}

impl ModelSpec {
    pub fn new(name: impl Into<String>) -> Self {
        ModelSpec {
            name: name.into(),
            params: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.into(), value);
        self
    }

    fn param(&self, key: &str, default: f64) -> f64 {
        self.params.get(key).copied().unwrap_or(default)
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        match self.params.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(ModelError::InvalidParameter(format!(
                "model {} has no parameter {k:?} (expected one of {allowed:?})",
                self.name
            ))
            .into()),
            None => Ok(()),
        }
    }

    /// Builds one of the built-in models: `oscillator` (`f`, `r`), `tdof`,
    /// `heat3d` (`n`) or `iss` (synthetic).
    pub fn build(&self) -> Result<Benchmark> {
        match self.name.as_str() {
            "oscillator" => {
                self.check_keys(&["f", "r"])?;
                let (f, r) = (self.param("f", 0.0), self.param("r", 0.0));
                let system = oscillator(f, r)?;
                Ok(Benchmark {
                    name: self.to_string(),
                    system,
                    delta: 0.01,
                    direction: Vector::from_element(2, 1.0),
                })
            }
            "tdof" => {
                self.check_keys(&[])?;
                Ok(Benchmark {
                    name: "tdof".into(),
                    system: tdof()?,
                    delta: 1e-5,
                    direction: Vector::from_element(4, 1.0),
                })
            }
            "heat3d" => {
                self.check_keys(&["n"])?;
                let n = self.param("n", 5.0);
                if n.fract() != 0.0 || n < 0.0 {
                    return Err(ModelError::InvalidParameter(format!(
                        "mesh size must be a nonnegative integer, got {n}"
                    ))
                    .into());
                }
                let n = n as usize;
                let system = heat3d(n)?;
                let mut direction = Vector::zeros(n * n * n);
                direction[heat3d_center_index(n)] = 1.0;
                Ok(Benchmark {
                    name: self.to_string(),
                    system,
                    delta: 0.01,
                    direction,
                })
            }
            "iss" => {
                self.check_keys(&[])?;
                iss_synthetic()
            }
            other => Err(ModelError::InvalidParameter(format!(
                "unknown model {other:?}; built-ins are oscillator, tdof, heat3d, iss"
            ))
            .into()),
        }
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        for (i, (k, v)) in self.params.iter().enumerate() {
            write!(f, "{}{k}={v}", if i == 0 { ':' } else { ',' })?;
        }
        Ok(())
    }
}

impl FromStr for ModelSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, rest) = match s.split_once(':') {
            Some((n, r)) => (n, Some(r)),
            None => (s, None),
        };
        let name = name.trim();
        if name.is_empty() {
            return Err("empty model name".into());
        }
        let mut spec = ModelSpec::new(name.to_ascii_lowercase());
        for kv in rest.into_iter().flat_map(|r| r.split(',')) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| format!("expected key=value, got {kv:?}"))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| format!("parameter {k:?}: not a number: {v:?}"))?;
            spec.params.insert(k.trim().to_string(), v);
        }
        Ok(spec)
    }
}
