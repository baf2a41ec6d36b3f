//! Model loading and one timed discretization with the command-line knobs.

use std::time::Instant;

use lti_reach::discretize::{
    discretize, DiscretizationResult, DiscretizeOptions, LinearSystem, Metadata, Method,
};
use lti_reach::matfun::KrylovConfig;
use lti_reach::models::{load_benchmark, Benchmark};
use lti_reach::sets::ConvexSet;
use lti_reach::transform::{homogenize, project_out_aux, shrink_time_step};
use lti_reach::Vector;

use crate::args::{MethodOpts, ModelArgs};
use crate::CliError;

/// Reference step for file-loaded models.
pub const FILE_MODEL_DELTA: f64 = 0.01;

pub fn load_model(m: &ModelArgs) -> Result<Benchmark, CliError> {
    match (&m.matrix, &m.sidecar) {
        (Some(mtx), Some(side)) => {
            let name = mtx
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "file".into());
            Ok(load_benchmark(&name, FILE_MODEL_DELTA, mtx, side, m.input_sidecar.as_deref())?)
        }
        _ => Ok(m.model.build()?),
    }
}

pub fn check_delta(delta: f64) -> Result<f64, CliError> {
    if delta.is_finite() && delta > 0.0 {
        Ok(delta)
    } else {
        Err(CliError::Usage(format!("time step must be positive and finite, got {delta}")))
    }
}

pub fn to_direction(b: &Benchmark, d: Option<&[f64]>) -> Result<Vector, CliError> {
    match d {
        None => Ok(b.direction.clone()),
        Some(v) if v.len() == b.system.dim() => Ok(Vector::from_column_slice(v)),
        Some(v) => Err(CliError::Usage(format!(
            "direction has {} entries, model {} has dimension {}",
            v.len(),
            b.name,
            b.system.dim()
        ))),
    }
}

/// Replaces the correction-hull order everywhere in `m`.
pub fn with_order(m: &Method, order: Option<usize>) -> Method {
    match (m, order) {
        (Method::CorrectionHull { .. }, Some(p)) => Method::CorrectionHull { order: p },
        (Method::Intersection(ms), _) => {
            Method::Intersection(ms.iter().map(|x| with_order(x, order)).collect())
        }
        _ => m.clone(),
    }
}

/// Ω₀ with its metadata and the wall time of the discretization call.
#[derive(Debug, Clone)]
pub struct Run {
    pub method: Method,
    pub delta: f64,
    pub omega0: ConvexSet,
    pub metadata: Metadata,
    pub seconds: f64,
}

fn step(
    sys: &LinearSystem,
    delta: f64,
    m: &Method,
    opts: &DiscretizeOptions,
    k: usize,
) -> lti_reach::Result<DiscretizationResult> {
    if k == 1 {
        discretize(sys, delta, m, opts)
    } else {
        shrink_time_step(sys, delta, k, m, opts)
    }
}

pub fn execute(
    sys: &LinearSystem,
    delta: f64,
    method: &Method,
    o: &MethodOpts,
) -> lti_reach::Result<Run> {
    let method = with_order(method, o.order);
    let opts = DiscretizeOptions {
        krylov: match method {
            Method::ForwardOnly => o.krylov_dim.map(|m| KrylovConfig::new(m, 0.0)),
            _ => None,
        },
        ..Default::default()
    };
    let start = Instant::now();
    let (omega0, metadata) = if o.homogenize {
        let (lifted, info) = homogenize(sys, 1.0)?;
        let r = step(&lifted, delta, &method, &opts, o.k)?;
        let mut md = r.metadata;
        md.homogenized = true;
        md.notes.push("projected from the homogenized system".into());
        (project_out_aux(&r.omega0, &info)?, md)
    } else {
        let r = step(sys, delta, &method, &opts, o.k)?;
        (r.omega0, r.metadata)
    };
    Ok(Run {
        method,
        delta,
        omega0,
        metadata,
        seconds: start.elapsed().as_secs_f64(),
    })
}
