use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::builtin::iss_parts;
use super::{Benchmark, ModelError};
use crate::discretize::LinearSystem;
use crate::matfun::SparseMatrix;
use crate::sets::{ConvexSet, Norm};
use crate::{Matrix, Result, Vector};

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ModelError + '_ {
    move |source| ModelError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> ModelError {
    ModelError::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

#[derive(PartialEq)]
enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
}

/// Reads a real (or integer, or pattern) coordinate MatrixMarket file.
/// `general`, `symmetric` and `skew-symmetric` storage are accepted.
pub fn read_matrix_market(path: &Path) -> Result<SparseMatrix> {
    let file = fs::File::open(path).map_err(io_err(path))?;
    let mut lines = BufReader::new(file).lines().enumerate();

    let (lineno, header) = match lines.next() {
        Some((i, l)) => (i + 1, l.map_err(io_err(path))?),
        None => return Err(parse_err(path, 1, "empty file").into()),
    };
    let fields: Vec<String> = header
        .split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect();
    if fields.len() != 5 || fields[0] != "%%matrixmarket" || fields[1] != "matrix" {
        return Err(parse_err(path, lineno, "expected '%%MatrixMarket matrix <format> <field> <symmetry>'").into());
    }
    if fields[2] != "coordinate" {
        return Err(parse_err(path, lineno, format!("unsupported format {:?}", fields[2])).into());
    }
    let pattern = match fields[3].as_str() {
        "real" | "integer" | "double" => false,
        "pattern" => true,
        other => return Err(parse_err(path, lineno, format!("unsupported field {other:?}")).into()),
    };
    let symmetry = match fields[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        other => {
            return Err(parse_err(path, lineno, format!("unsupported symmetry {other:?}")).into())
        }
    };

    let mut size: Option<(usize, usize, usize)> = None;
    let mut trip = Vec::new();
    let mut last_line = lineno;
    for (i, line) in lines {
        let lineno = i + 1;
        last_line = lineno;
        let line = line.map_err(io_err(path))?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let toks: Vec<&str> = t.split_whitespace().collect();
        let Some((rows, cols, nnz)) = size else {
            if toks.len() != 3 {
                return Err(parse_err(path, lineno, "expected size line 'rows cols entries'").into());
            }
            let p = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| parse_err(path, lineno, format!("invalid integer {s:?}")))
            };
            let (r, c, n) = (p(toks[0])?, p(toks[1])?, p(toks[2])?);
            if symmetry != Symmetry::General && r != c {
                return Err(parse_err(path, lineno, "symmetric storage needs a square matrix").into());
            }
            size = Some((r, c, n));
            trip.reserve(n);
            continue;
        };
        let want = if pattern { 2 } else { 3 };
        if toks.len() != want {
            return Err(parse_err(
                path,
                lineno,
                format!("expected {want} fields per entry, found {}", toks.len()),
            )
            .into());
        }
        if trip.len() >= nnz {
            return Err(parse_err(path, lineno, format!("more than the declared {nnz} entries")).into());
        }
        let index = |s: &str, bound: usize| -> Result<usize, ModelError> {
            let k: usize = s
                .parse()
                .map_err(|_| parse_err(path, lineno, format!("invalid index {s:?}")))?;
            if k == 0 || k > bound {
                return Err(parse_err(path, lineno, format!("index {k} outside 1..={bound}")));
            }
            Ok(k - 1)
        };
        let r = index(toks[0], rows)?;
        let c = index(toks[1], cols)?;
        let v = if pattern {
            1.0
        } else {
            let v: f64 = toks[2]
                .parse()
                .map_err(|_| parse_err(path, lineno, format!("invalid value {:?}", toks[2])))?;
            if !v.is_finite() {
                return Err(parse_err(path, lineno, "non-finite value").into());
            }
            v
        };
        if symmetry != Symmetry::General && c > r {
            return Err(parse_err(path, lineno, "symmetric storage lists the lower triangle only").into());
        }
        trip.push((r, c, v));
    }
    let Some((rows, cols, nnz)) = size else {
        return Err(parse_err(path, last_line, "missing size line").into());
    };
    if trip.len() != nnz {
        return Err(parse_err(
            path,
            last_line,
            format!("declared {nnz} entries, found {}", trip.len()),
        )
        .into());
    }
    if symmetry != Symmetry::General {
        let sign = if symmetry == Symmetry::Symmetric { 1.0 } else { -1.0 };
        let mirrored: Vec<_> = trip
            .iter()
            .filter(|t| t.0 != t.1)
            .map(|&(r, c, v)| (c, r, sign * v))
            .collect();
        trip.extend(mirrored);
    }
    Ok(SparseMatrix::from_triplets(rows, cols, trip)?)
}

/// Writes `m` as a `general` real coordinate file. Values use the shortest
/// representation that parses back to the same `f64`.
pub fn write_matrix_market(path: &Path, m: &SparseMatrix) -> Result<()> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    let mut body = || -> std::io::Result<()> {
        writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
        writeln!(w, "{} {} {}", m.nrows(), m.ncols(), m.nnz())?;
        for (i, j, v) in m.triplets() {
            writeln!(w, "{} {} {:?}", i + 1, j + 1, v)?;
        }
        w.flush()
    };
    body().map_err(io_err(path))?;
    Ok(())
}

/// JSON description of a concrete set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum SetDescriptor {
    Hyperrectangle {
        center: Vec<f64>,
        radius: Vec<f64>,
    },
    /// Generators listed one per inner array.
    Zonotope {
        center: Vec<f64>,
        generators: Vec<Vec<f64>>,
    },
    Singleton {
        #[serde(alias = "point")]
        center: Vec<f64>,
    },
    Ball {
        center: Vec<f64>,
        radius: f64,
        #[serde(default)]
        norm: Norm,
    },
}

impl SetDescriptor {
    pub fn dim(&self) -> usize {
        match self {
            SetDescriptor::Hyperrectangle { center, .. }
            | SetDescriptor::Zonotope { center, .. }
            | SetDescriptor::Singleton { center }
            | SetDescriptor::Ball { center, .. } => center.len(),
        }
    }

    pub fn to_set(&self) -> Result<ConvexSet> {
        let vec = |x: &[f64]| Vector::from_column_slice(x);
        Ok(match self {
            SetDescriptor::Hyperrectangle { center, radius } => {
                ConvexSet::hyperrectangle(vec(center), vec(radius))?
            }
            SetDescriptor::Zonotope { center, generators } => {
                let n = center.len();
                if let Some(g) = generators.iter().find(|g| g.len() != n) {
                    return Err(ModelError::Dimension(format!(
                        "zonotope generator of length {} for center of length {n}",
                        g.len()
                    ))
                    .into());
                }
                let flat: Vec<f64> = generators.iter().flatten().copied().collect();
                ConvexSet::zonotope(vec(center), Matrix::from_column_slice(n, generators.len(), &flat))?
            }
            SetDescriptor::Singleton { center } => ConvexSet::singleton(vec(center))?,
            SetDescriptor::Ball {
                center,
                radius,
                norm,
            } => ConvexSet::ball(*norm, vec(center), *radius)?,
        })
    }
}

/// Side-car file: `{"X0": {...}, "U": {...}, "B": [[...], ...], "direction": [...]}`.
/// All keys are optional; `B` is a dense matrix listed by rows and maps `U`
/// into the state space.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sidecar {
    #[serde(rename = "X0", default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<SetDescriptor>,
    #[serde(rename = "U", default, skip_serializing_if = "Option::is_none")]
    pub u: Option<SetDescriptor>,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<Vec<f64>>,
}

pub fn read_sidecar(path: &Path) -> Result<Sidecar> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|e| {
        ModelError::Parse {
            path: path.to_path_buf(),
            line: e.line(),
            message: e.to_string(),
        }
        .into()
    })
}

pub fn write_sidecar(path: &Path, sidecar: &Sidecar) -> Result<()> {
    let text = serde_json::to_string_pretty(sidecar).expect("side-car serializes");
    fs::write(path, text + "\n").map_err(io_err(path))?;
    Ok(())
}

fn sidecar_err(path: &Path, message: impl Into<String>) -> crate::Error {
    ModelError::Sidecar {
        path: path.to_path_buf(),
        message: message.into(),
    }
    .into()
}

/// `B U`, exact for zonotopic `U`.
fn fold_input(path: &Path, b: &[Vec<f64>], u: ConvexSet, n: usize) -> Result<ConvexSet> {
    let m = u.dim();
    if b.len() != n || b.iter().any(|r| r.len() != m) {
        return Err(sidecar_err(
            path,
            format!("B must be {n}x{m} to map the {m}-dim input into the state space"),
        ));
    }
    let flat: Vec<f64> = b.iter().flatten().copied().collect();
    let bm = Matrix::from_row_slice(n, m, &flat);
    Ok(match u.to_zonotope() {
        Some(z) => z.linear_map(&bm)?.into(),
        None => ConvexSet::map(bm, u)?,
    })
}

struct Loaded {
    system: LinearSystem,
    direction: Option<Vector>,
}

fn load(matrix_path: &Path, x0_path: &Path, u_path: Option<&Path>) -> Result<Loaded> {
    let a = read_matrix_market(matrix_path)?;
    if a.nrows() != a.ncols() {
        return Err(ModelError::Dimension(format!(
            "flow matrix is {}x{}, expected square",
            a.nrows(),
            a.ncols()
        ))
        .into());
    }
    let n = a.nrows();
    let main = read_sidecar(x0_path)?;
    let x0 = main
        .x0
        .as_ref()
        .ok_or_else(|| sidecar_err(x0_path, "missing \"X0\""))?;
    if x0.dim() != n {
        return Err(ModelError::Dimension(format!(
            "X0 has dimension {}, flow matrix {n}",
            x0.dim()
        ))
        .into());
    }
    let x0 = x0.to_set()?;

    let extra = u_path.map(|p| read_sidecar(p).map(|s| (p, s))).transpose()?;
    let (u_src, u_desc, b) = match &extra {
        Some((p, s)) => (*p, s.u.as_ref(), s.b.as_ref()),
        None => (x0_path, main.u.as_ref(), main.b.as_ref()),
    };
    let u = match (u_desc, b) {
        (None, None) => ConvexSet::origin(n),
        (None, Some(_)) => return Err(sidecar_err(u_src, "\"B\" given without \"U\"")),
        (Some(d), Some(b)) => fold_input(u_src, b, d.to_set()?, n)?,
        (Some(d), None) => {
            if d.dim() != n {
                return Err(ModelError::Dimension(format!(
                    "U has dimension {} but no B maps it to the state dimension {n}",
                    d.dim()
                ))
                .into());
            }
            d.to_set()?
        }
    };
    let direction = match main.direction.or_else(|| extra.and_then(|e| e.1.direction)) {
        Some(d) if d.len() != n => {
            return Err(ModelError::Dimension(format!(
                "direction has length {}, state dimension {n}",
                d.len()
            ))
            .into())
        }
        d => d.map(Vector::from_vec),
    };
    Ok(Loaded {
        system: LinearSystem::from_sparse(a, x0, u)?,
        direction,
    })
}

/// Loads `A` from a MatrixMarket file and `X₀` (and optionally `U`, `B`)
/// from the JSON side-car at `x0_path`. A separate `u_path` side-car, when
/// given, supplies `U` and `B` instead.
pub fn load_system(matrix_path: &Path, x0_path: &Path, u_path: Option<&Path>) -> Result<LinearSystem> {
    Ok(load(matrix_path, x0_path, u_path)?.system)
}

/// [`load_system`] plus the side-car direction (all ones if absent).
pub fn load_benchmark(
    name: &str,
    delta: f64,
    matrix_path: &Path,
    x0_path: &Path,
    u_path: Option<&Path>,
) -> Result<Benchmark> {
    let l = load(matrix_path, x0_path, u_path)?;
    let n = l.system.dim();
    Ok(Benchmark {
        name: name.into(),
        delta,
        direction: l.direction.unwrap_or_else(|| Vector::from_element(n, 1.0)),
        system: l.system,
    })
}

/// Writes the synthetic ISS stand-in as `iss.mtx` and `iss.json` under
/// `dir`, in the layout [`load_system`] reads.
pub fn write_iss_files(dir: &Path) -> Result<(PathBuf, PathBuf)> {
    let (a, x0, u, b) = iss_parts()?;
    let mtx = dir.join("iss.mtx");
    let json = dir.join("iss.json");
    write_matrix_market(&mtx, &a)?;
    let mut direction = vec![0.0; a.nrows()];
    direction[super::builtin::ISS_INPUT_DOF[1]] = 1.0;
    let sidecar = Sidecar {
        x0: Some(SetDescriptor::Hyperrectangle {
            center: x0.center.iter().copied().collect(),
            radius: x0.radius.iter().copied().collect(),
        }),
        u: Some(SetDescriptor::Hyperrectangle {
            center: u.center.iter().copied().collect(),
            radius: u.radius.iter().copied().collect(),
        }),
        b: Some(b.row_iter().map(|r| r.iter().copied().collect()).collect()),
        direction: Some(direction),
    };
    write_sidecar(&json, &sidecar)?;
    Ok((mtx, json))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Error;

    fn parse_line(err: Error) -> usize {
        match err {
            Error::Model(ModelError::Parse { line, .. }) => line,
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn symmetric_storage_is_mirrored() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.mtx");
        fs::write(
            &p,
            "%%MatrixMarket matrix coordinate real symmetric\n% c\n3 3 3\n1 1 2.0\n3 1 -1.5\n2 2 4\n",
        )
        .unwrap();
        let m = read_matrix_market(&p).unwrap();
        assert_eq!(m.get(0, 2), -1.5);
        assert_eq!(m.get(2, 0), -1.5);
        assert!(m.is_symmetric());
    }

    #[test]
    fn diagnostics_carry_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.mtx");
        let cases = [
            ("%%MatrixMarket matrix array real general\n2 2\n", 1),
            ("%%MatrixMarket matrix coordinate real general\n2 2 1\n% x\n1 x 3.0\n", 4),
            ("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n", 3),
            ("%%MatrixMarket matrix coordinate real general\n2 2\n", 2),
            ("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 1\n2 2 1\n", 4),
        ];
        for (text, line) in cases {
            fs::write(&p, text).unwrap();
            assert_eq!(parse_line(read_matrix_market(&p).unwrap_err()), line, "{text}");
        }
        let missing = read_matrix_market(&dir.path().join("none.mtx")).unwrap_err();
        assert!(matches!(missing, Error::Model(ModelError::Io { .. })));
    }

    #[test]
    fn sidecar_round_trip_and_folding() {
        let dir = tempfile::tempdir().unwrap();
        let mtx = dir.path().join("a.mtx");
        write_matrix_market(&mtx, &SparseMatrix::identity(2)).unwrap();
        let json = dir.path().join("a.json");
        fs::write(
            &json,
            r#"{"X0": {"type": "ball", "center": [0, 1], "radius": 0.5},
                "U": {"type": "hyperrectangle", "center": [1], "radius": [0.5]},
                "B": [[0], [2]]}"#,
        )
        .unwrap();
        let sys = load_system(&mtx, &json, None).unwrap();
        let d = Vector::from_column_slice(&[0.0, 1.0]);
        assert_eq!(sys.u().support(&d).unwrap(), 3.0);
        assert_eq!(sys.x0().support(&d).unwrap(), 1.5);
        let sc = read_sidecar(&json).unwrap();
        let again = dir.path().join("b.json");
        write_sidecar(&again, &sc).unwrap();
        assert_eq!(read_sidecar(&again).unwrap(), sc);

        fs::write(&json, r#"{"X0": {"type": "singleton", "center": [0, 1, 2]}}"#).unwrap();
        assert!(matches!(
            load_system(&mtx, &json, None).unwrap_err(),
            Error::Model(ModelError::Dimension(_))
        ));
        fs::write(&json, "{\n \"X0\": 3\n}").unwrap();
        assert_eq!(parse_line(load_system(&mtx, &json, None).unwrap_err()), 2);
    }

    #[test]
    fn separate_input_file() {
        let dir = tempfile::tempdir().unwrap();
        let mtx = dir.path().join("a.mtx");
        write_matrix_market(&mtx, &SparseMatrix::identity(2)).unwrap();
        let x0 = dir.path().join("x0.json");
        let u = dir.path().join("u.json");
        fs::write(&x0, r#"{"X0": {"type": "singleton", "point": [0, 1]}}"#).unwrap();
        fs::write(
            &u,
            r#"{"U": {"type": "zonotope", "center": [0, 0], "generators": [[1, 1]]}}"#,
        )
        .unwrap();
        let sys = load_system(&mtx, &x0, Some(&u)).unwrap();
        assert_eq!(sys.u().support(&Vector::from_column_slice(&[1.0, 1.0])).unwrap(), 2.0);
        assert!(load_system(&mtx, &x0, None).unwrap().is_homogeneous());
    }
}
