use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use lti_reach::audit::{
    audit_enclosure, find_unreachable_point, underapprox_counterexample, AuditConfig,
};
use lti_reach::discretize::{
    ddt_shrink_underapprox, e_plus_dense, e_plus_krylov, FlowMatrix, LinearSystem, Metadata,
    Method,
};
use lti_reach::matfun::{KrylovConfig, Norm};
use lti_reach::sets::polygon_outline;
use lti_reach::Vector;

use crate::args::{BenchArgs, DiscretizeArgs, Format, MethodOpts, SoundnessArgs, SweepArgs};
use crate::exec::{check_delta, execute, load_model, to_direction, with_order};
use crate::output::{column_names, create_file, join, write_json, write_rows, SweepRecord, SweepTable};
use crate::CliError;

fn norm_name(n: Norm) -> &'static str {
    match n {
        Norm::One => "1",
        Norm::Two => "2",
        Norm::Inf => "inf",
    }
}

fn metadata_lines(md: &Metadata) -> Vec<(&'static str, String)> {
    let mut v = vec![("norm", norm_name(md.norm).to_string())];
    if let Some(e) = md.epsilon {
        v.push(("epsilon", e.to_string()));
    }
    if let Some(p) = md.order {
        v.push(("order", p.to_string()));
    }
    if let Some(a) = md.alpha {
        v.push(("alpha", a.to_string()));
    }
    if md.epsilon_clamped {
        v.push(("epsilon_clamped", "true".into()));
    }
    if md.homogenized {
        v.push(("homogenized", "true".into()));
    }
    if let Some((g, k)) = md.shrink {
        v.push(("shrink", format!("gamma={g},k={k}")));
    }
    if let Some(k) = md.krylov {
        v.push(("krylov_dim", k.m.to_string()));
    }
    if !md.input_set.is_empty() {
        v.push(("input_set", md.input_set.clone()));
    }
    for n in &md.notes {
        v.push(("note", n.clone()));
    }
    v
}

fn put(out: &mut dyn Write, key: &str, value: impl std::fmt::Display) -> Result<(), CliError> {
    writeln!(out, "{key}\t{value}")?;
    Ok(())
}

#[derive(Serialize)]
struct DirectionSupport {
    direction: Vec<f64>,
    support: f64,
}

#[derive(Serialize)]
struct DiscretizeReport<'a> {
    model: &'a str,
    method: String,
    delta: f64,
    seconds: f64,
    metadata: &'a Metadata,
    supports: Vec<DirectionSupport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    polygon: Option<Vec<[f64; 2]>>,
}

pub fn discretize(a: &DiscretizeArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let b = load_model(&a.model)?;
    let delta = check_delta(a.delta.unwrap_or(b.delta))?;
    let dirs: Vec<Vector> = if a.direction.is_empty() {
        vec![b.direction.clone()]
    } else {
        a.direction
            .iter()
            .map(|d| to_direction(&b, Some(d)))
            .collect::<Result<_, _>>()?
    };
    let run = execute(&b.system, delta, &a.method, &a.opts)?;
    let supports = dirs
        .iter()
        .map(|d| run.omega0.support(d))
        .collect::<Result<Vec<f64>, _>>()
        .map_err(lti_reach::Error::from)?;
    let polygon = if b.system.dim() == 2 && a.polygon >= 3 {
        Some(polygon_outline(&run.omega0, a.polygon).map_err(lti_reach::Error::from)?)
    } else {
        None
    };

    put(out, "model", &b.name)?;
    put(out, "method", run.method.label())?;
    put(out, "delta", delta)?;
    for (k, v) in metadata_lines(&run.metadata) {
        put(out, k, v)?;
    }
    put(out, "seconds", run.seconds)?;
    for (d, s) in dirs.iter().zip(&supports) {
        writeln!(out, "support\t{}\t{s}", join(d.as_slice()))?;
    }

    if let Some(dir) = &a.output.out {
        match a.output.format {
            Format::Csv => {
                let (p, w) = create_file(dir, "discretize.tsv")?;
                let rows: Vec<Vec<String>> = dirs
                    .iter()
                    .zip(&supports)
                    .map(|(d, s)| vec![join(d.as_slice()), s.to_string()])
                    .collect();
                write_rows(w, &["direction", "support"], &rows)?;
                put(out, "file", p.display())?;
                if let Some(poly) = &polygon {
                    let (p, w) = create_file(dir, "polygon.tsv")?;
                    let rows: Vec<Vec<String>> =
                        poly.iter().map(|v| vec![v[0].to_string(), v[1].to_string()]).collect();
                    write_rows(w, &["x", "y"], &rows)?;
                    put(out, "file", p.display())?;
                }
            }
            Format::Json => {
                let report = DiscretizeReport {
                    model: &b.name,
                    method: run.method.label(),
                    delta,
                    seconds: run.seconds,
                    metadata: &run.metadata,
                    supports: dirs
                        .iter()
                        .zip(&supports)
                        .map(|(d, &s)| DirectionSupport {
                            direction: d.as_slice().to_vec(),
                            support: s,
                        })
                        .collect(),
                    polygon,
                };
                let p = write_json(dir, "discretize.json", &report)?;
                put(out, "file", p.display())?;
            }
        }
    }
    Ok(())
}

/// `hi:lo:n` (log-spaced, inclusive) or a comma-separated list.
pub fn parse_deltas(s: &str) -> Result<Vec<f64>, CliError> {
    let bad = |m: String| CliError::Usage(format!("--deltas {s:?}: {m}"));
    let num = |x: &str| x.trim().parse::<f64>().map_err(|_| bad(format!("not a number: {x:?}")));
    let ds = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected hi:lo:n".into()));
        }
        let (hi, lo) = (num(parts[0])?, num(parts[1])?);
        let n: usize = parts[2].trim().parse().map_err(|_| bad("n must be a positive integer".into()))?;
        if n == 0 || !(hi > 0.0 && lo > 0.0) {
            return Err(bad("need n >= 1 and positive bounds".into()));
        }
        if n == 1 {
            vec![hi]
        } else {
            let (a, b) = (hi.log10(), lo.log10());
            (0..n)
                .map(|i| 10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64))
                .collect()
        }
    } else {
        s.split(',').map(num).collect::<Result<Vec<_>, _>>()?
    };
    if ds.is_empty() {
        return Err(bad("no steps".into()));
    }
    ds.into_iter().map(check_delta).collect()
}

fn cell(sys: &LinearSystem, d: &Vector, delta: f64, m: &Method, name: &str, o: &MethodOpts) -> SweepRecord {
    let res = execute(sys, delta, m, o).and_then(|r| {
        let s = r.omega0.support(d)?;
        Ok((s, r.seconds))
    });
    match res {
        Ok((s, t)) => SweepRecord {
            delta,
            method: name.into(),
            support: Some(s),
            seconds: Some(t),
            error: None,
        },
        Err(e) => SweepRecord {
            delta,
            method: name.into(),
            support: None,
            seconds: None,
            error: Some(e.to_string()),
        },
    }
}

/// Evaluates every (δ, method) pair on `workers` threads. Records come back
/// δ-major in input order whatever the concurrency.
pub fn run_sweep(
    sys: &LinearSystem,
    d: &Vector,
    deltas: &[f64],
    methods: &[Method],
    o: &MethodOpts,
    workers: usize,
) -> Result<Vec<SweepRecord>, CliError> {
    if workers == 0 {
        return Err(CliError::Usage("--workers must be at least 1".into()));
    }
    if methods.is_empty() {
        return Err(CliError::Usage("no methods given".into()));
    }
    let methods: Vec<Method> = methods.iter().map(|m| with_order(m, o.order)).collect();
    let names = column_names(&methods);
    let grid: Vec<(f64, usize)> = deltas
        .iter()
        .flat_map(|&delta| (0..methods.len()).map(move |j| (delta, j)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(pool.install(|| {
        grid.par_iter()
            .map(|&(delta, j)| cell(sys, d, delta, &methods[j], &names[j], o))
            .collect()
    }))
}

pub fn sweep(a: &SweepArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let b = load_model(&a.model)?;
    let d = to_direction(&b, a.direction.as_deref())?;
    let deltas = parse_deltas(&a.deltas)?;
    let methods = if a.method.is_empty() { Method::all() } else { a.method.clone() };
    let records = run_sweep(&b.system, &d, &deltas, &methods, &a.opts, a.workers)?;
    let names = column_names(&methods.iter().map(|m| with_order(m, a.opts.order)).collect::<Vec<_>>());

    let mut warned = std::collections::BTreeSet::new();
    for r in &records {
        if let Some(e) = &r.error {
            if warned.insert(r.method.clone()) {
                eprintln!("warning: {} left blank where it failed, first at delta {}: {e}", r.method, r.delta);
            }
        }
    }

    let table = SweepTable::from_records(&records, names.clone(), |r| r.support);
    match (&a.output.out, a.output.format) {
        (Some(dir), Format::Csv) => {
            let (p, w) = create_file(dir, "sweep.tsv")?;
            table.write_tsv(w)?;
            put(out, "file", p.display())?;
            let times = SweepTable::from_records(&records, names, |r| r.seconds);
            let (p, w) = create_file(dir, "sweep_times.tsv")?;
            times.write_tsv(w)?;
            put(out, "file", p.display())?;
        }
        (Some(dir), Format::Json) => {
            let p = write_json(dir, "sweep.json", &records)?;
            put(out, "file", p.display())?;
        }
        (None, Format::Csv) => table.write_tsv(out)?,
        (None, Format::Json) => {
            serde_json::to_writer_pretty(&mut *out, &records).map_err(|e| CliError::Output(e.to_string()))?;
            writeln!(out)?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub model: String,
    pub method: String,
    pub repetitions: usize,
    pub median_ms: Option<f64>,
    pub min_ms: Option<f64>,
    pub max_ms: Option<f64>,
    pub note: Option<String>,
}

fn summarize(model: &str, method: String, mut times: Vec<f64>, note: Option<String>) -> BenchRow {
    times.sort_by(f64::total_cmp);
    let ms = |x: f64| x * 1e3;
    BenchRow {
        model: model.into(),
        method,
        repetitions: times.len(),
        median_ms: (!times.is_empty()).then(|| ms(times[times.len() / 2])),
        min_ms: times.first().map(|&x| ms(x)),
        max_ms: times.last().map(|&x| ms(x)),
        note,
    }
}

fn timed<T>(
    reps: usize,
    mut f: impl FnMut() -> lti_reach::Result<T>,
) -> (Vec<f64>, Option<String>) {
    let mut times = Vec::with_capacity(reps);
    for _ in 0..reps {
        let t = Instant::now();
        if let Err(e) = f() {
            return (times, Some(e.to_string()));
        }
        times.push(t.elapsed().as_secs_f64());
    }
    (times, None)
}

pub fn bench(a: &BenchArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if a.repetitions < 3 {
        return Err(CliError::Usage(format!("need at least 3 repetitions, got {}", a.repetitions)));
    }
    let b = load_model(&a.model)?;
    let delta = check_delta(a.delta.unwrap_or(b.delta))?;
    let methods = if a.method.is_empty() { Method::all() } else { a.method.clone() };
    let mut rows = Vec::new();
    for m in &methods {
        let mut times = Vec::new();
        let mut note = None;
        for _ in 0..a.repetitions {
            match execute(&b.system, delta, m, &a.opts) {
                Ok(r) => times.push(r.seconds),
                Err(e) => {
                    note = Some(e.to_string());
                    break;
                }
            }
        }
        rows.push(summarize(&b.name, with_order(m, a.opts.order).label(), times, note));
    }

    if matches!(b.system.flow(), FlowMatrix::Sparse(_)) {
        let n = b.system.dim();
        let cfg = KrylovConfig::new(a.opts.krylov_dim.unwrap_or(30).min(n), 0.0);
        let (t, note) = timed(a.repetitions, || e_plus_krylov(&b.system, delta, &cfg));
        rows.push(summarize(&b.name, format!("E+ Krylov (m={})", cfg.m), t, note));
        if !a.skip_dense {
            let (t, note) = timed(a.repetitions, || e_plus_dense(&b.system, delta));
            rows.push(summarize(&b.name, "E+ dense".into(), t, note));
        }
    }

    let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.model.clone(),
                r.method.clone(),
                r.repetitions.to_string(),
                opt(r.median_ms),
                opt(r.min_ms),
                opt(r.max_ms),
                r.note.clone().unwrap_or_default(),
            ]
        })
        .collect();
    let header = ["model", "method", "repetitions", "median_ms", "min_ms", "max_ms", "note"];
    match (&a.output.out, a.output.format) {
        (Some(dir), Format::Csv) => {
            let (p, w) = create_file(dir, "bench.tsv")?;
            write_rows(w, &header, &cells)?;
            put(out, "file", p.display())?;
        }
        (Some(dir), Format::Json) => {
            let p = write_json(dir, "bench.json", &rows)?;
            put(out, "file", p.display())?;
        }
        (None, Format::Csv) => write_rows(&mut *out, &header, &cells)?,
        (None, Format::Json) => {
            serde_json::to_writer_pretty(&mut *out, &rows).map_err(|e| CliError::Output(e.to_string()))?;
            writeln!(out)?;
        }
    }
    Ok(())
}

pub fn soundness(a: &SoundnessArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if a.underapprox {
        return underapprox_demo(out);
    }
    let b = load_model(&a.model)?;
    let delta = check_delta(a.delta.unwrap_or(b.delta))?;
    put(out, "model", &b.name)?;
    if a.samples == 0 {
        eprintln!("warning: zero samples requested; the audit passes trivially");
        put(out, "samples", 0)?;
        put(out, "violations", 0)?;
        return Ok(());
    }
    let run = execute(&b.system, delta, &a.method, &a.opts)?;
    let cfg = AuditConfig {
        samples: a.samples,
        directions: a.directions,
        grid: a.grid,
        tol: a.tol,
        seed: a.seed,
    };
    let rep = audit_enclosure(&b.system, &run.omega0, delta, &cfg)?;
    put(out, "method", run.method.label())?;
    put(out, "delta", delta)?;
    put(out, "samples", rep.samples)?;
    put(out, "directions", rep.directions)?;
    put(out, "violations", rep.violations)?;
    put(out, "max_relative_slack", rep.max_relative_slack)?;
    put(out, "min_relative_slack", rep.min_relative_slack)?;
    match rep.worst {
        Some(w) if !rep.passed() => {
            put(out, "worst_time", w.time)?;
            put(out, "worst_state", join(w.state.as_slice()))?;
            put(out, "worst_direction", join(w.direction.as_slice()))?;
            put(out, "worst_excess", w.excess)?;
            Err(CliError::Soundness(format!(
                "{} of {} samples outside Omega0; worst excess {} at t = {} along d = [{}]",
                rep.violations,
                rep.samples,
                w.excess,
                w.time,
                join(w.direction.as_slice())
            )))
        }
        _ => Ok(()),
    }
}

fn underapprox_demo(out: &mut dyn Write) -> Result<(), CliError> {
    let (sys, delta) = underapprox_counterexample()?;
    let shrunk = ddt_shrink_underapprox(&sys, delta)?;
    put(out, "model", "oscillator, X0 = [-1,1] x [-0.05,0.05]")?;
    put(out, "delta", delta)?;
    match find_unreachable_point(&sys, &shrunk, delta, 720, 10_000)? {
        Some(w) => {
            put(out, "unreachable_point", join(w.point.as_slice()))?;
            put(out, "margin", w.margin)?;
            put(out, "closest_time", w.closest_time)?;
            Err(CliError::Soundness(format!(
                "the shrunk d/dt set contains ({}) whose backward flow stays at distance >= {} from X0",
                join(w.point.as_slice()),
                w.margin
            )))
        }
        None => {
            put(out, "unreachable_point", "none found")?;
            Ok(())
        }
    }
}
