//! JSON and text reports over grids of instances.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::verify::{
    building_verdicts, complex_verdicts, conjecture_report, ConjectureReport, Verdict,
};
use super::{HarnessError, Instance, InstanceSpectrum, Session, Source, Timings};
use crate::spectra::{fmt_rational, RootValue};

pub const REPORT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Grid {
    Default,
    Extended,
}

impl std::str::FromStr for Grid {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "default" => Ok(Grid::Default),
            "extended" => Ok(Grid::Extended),
            other => Err(format!(
                "unknown grid {other:?}; expected default or extended"
            )),
        }
    }
}

impl Grid {
    pub fn name(self) -> &'static str {
        match self {
            Grid::Default => "default",
            Grid::Extended => "extended",
        }
    }

    /// (ell, q, i) triples in report order.
    pub fn instances(self) -> Vec<(usize, u64, usize)> {
        let mut v: Vec<(usize, u64, usize)> = [2, 3, 4, 5, 7].iter().map(|&q| (1, q, 0)).collect();
        v.extend([(2, 2, 0), (2, 2, 1), (2, 3, 0), (2, 3, 1), (3, 2, 0)]);
        if self == Grid::Extended {
            v.extend([(3, 3, 0), (4, 2, 0)]);
            for q in [4, 5, 7] {
                v.extend([(2, q, 0), (2, q, 1)]);
            }
            v.extend([(3, 2, 1), (3, 2, 2)]);
        }
        v
    }
}

/// Exact value or open interval, as strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueJson {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub exact: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lo: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub hi: Option<String>,
    pub approx: f64,
}

impl From<&RootValue> for ValueJson {
    fn from(v: &RootValue) -> Self {
        match v {
            RootValue::Exact(x) => ValueJson {
                exact: Some(fmt_rational(x)),
                lo: None,
                hi: None,
                approx: v.to_f64(),
            },
            RootValue::Interval { lo, hi } => ValueJson {
                exact: None,
                lo: Some(fmt_rational(lo)),
                hi: Some(fmt_rational(hi)),
                approx: v.to_f64(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceJson {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ell: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub q: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub complex: Option<String>,
    pub i: usize,
}

impl From<&Instance> for InstanceJson {
    fn from(inst: &Instance) -> Self {
        match &inst.source {
            Source::Building { ell, q } => InstanceJson {
                ell: Some(*ell),
                q: Some(*q),
                complex: None,
                i: inst.i,
            },
            Source::Complex { hash } => InstanceJson {
                ell: None,
                q: None,
                complex: Some(hash.clone()),
                i: inst.i,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootJson {
    pub lo: String,
    pub hi: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub exact: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceReport {
    pub instance: InstanceJson,
    pub dim: usize,
    /// Exact coefficients `c0/d0 c1/d1 ...`, low-to-high.
    pub minpoly: String,
    pub minpoly_display: String,
    pub roots: Vec<RootJson>,
    pub m: ValueJson,
    #[serde(rename = "M")]
    pub big_m: ValueJson,
    pub verdicts: Vec<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub conjecture: Option<ConjectureReport>,
    pub timings: Timings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub grid: String,
    pub width: String,
    pub instances: Vec<InstanceReport>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        serde_json::from_str(text).map_err(|e| HarnessError::Cache(format!("report: {e}")))
    }

    /// All verdicts across instances.
    pub fn verdicts(&self) -> impl Iterator<Item = &Verdict> {
        self.instances.iter().flat_map(|r| r.verdicts.iter())
    }
}

/// JSON text with every `timings` object removed, for comparing runs.
pub fn strip_timings(json: &str) -> Result<String, serde_json::Error> {
    let mut v: serde_json::Value = serde_json::from_str(json)?;
    fn walk(v: &mut serde_json::Value) {
        match v {
            serde_json::Value::Object(map) => {
                map.remove("timings");
                map.values_mut().for_each(walk);
            }
            serde_json::Value::Array(items) => items.iter_mut().for_each(walk),
            _ => {}
        }
    }
    walk(&mut v);
    serde_json::to_string_pretty(&v)
}

pub fn instance_report(
    s: &InstanceSpectrum,
    verdicts: Vec<Verdict>,
    conjecture: Option<ConjectureReport>,
) -> InstanceReport {
    let r = &s.report;
    InstanceReport {
        instance: (&s.instance).into(),
        dim: r.dim,
        minpoly: r.minpoly.to_string(),
        minpoly_display: r.minpoly.pretty(),
        roots: r
            .isolation
            .roots()
            .iter()
            .map(|x| RootJson {
                lo: fmt_rational(&x.lo),
                hi: fmt_rational(&x.hi),
                exact: x.exact.as_ref().map(fmt_rational),
            })
            .collect(),
        m: (&r.m).into(),
        big_m: (&r.big_m).into(),
        verdicts,
        conjecture,
        timings: s.timings,
    }
}

/// Spectrum, verdicts and distance table for one instance.
pub fn analyze(session: &Session, inst: &Instance) -> Result<InstanceReport, HarnessError> {
    let s = session.spectrum(inst)?;
    let (verdicts, conj) = match inst.source {
        Source::Building { ell, .. } => (
            building_verdicts(session, inst)?,
            Some(conjecture_report(&s, ell)),
        ),
        Source::Complex { .. } => (complex_verdicts(session, inst)?, None),
    };
    Ok(instance_report(&s, verdicts, conj))
}

/// Runs the given instances on the current rayon pool; output order follows
/// the input order.
pub fn run_instances(
    session: &Session,
    grid_name: &str,
    instances: &[Instance],
) -> Result<Report, HarnessError> {
    let reports = instances
        .par_iter()
        .map(|inst| analyze(session, inst))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Report {
        version: REPORT_VERSION.to_string(),
        grid: grid_name.to_string(),
        width: fmt_rational(&session.config().width),
        instances: reports,
    })
}

/// Runs `f` on a dedicated pool of `threads` workers (the global pool when
/// `None`).
pub fn with_threads<R: Send>(
    threads: Option<usize>,
    f: impl FnOnce() -> R + Send,
) -> Result<R, HarnessError> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| HarnessError::Io(std::io::Error::other(e)))?;
            Ok(pool.install(f))
        }
    }
}

pub fn run_grid(session: &Session, grid: Grid) -> Result<Report, HarnessError> {
    let instances: Vec<Instance> = grid
        .instances()
        .into_iter()
        .map(|(ell, q, i)| Instance::building(ell, q, i))
        .collect();
    run_instances(session, grid.name(), &instances)
}

/// Plain-text rendering.
pub fn render_text(report: &Report) -> String {
    let mut out = String::new();
    for r in &report.instances {
        let inst = &r.instance;
        match (&inst.ell, &inst.q, &inst.complex) {
            (Some(l), Some(q), _) => writeln!(out, "B({l},{q}) i={}  dim {}", inst.i, r.dim),
            (_, _, Some(h)) => writeln!(out, "complex {h} i={}  dim {}", inst.i, r.dim),
            _ => writeln!(out, "instance i={}", inst.i),
        }
        .unwrap();
        writeln!(out, "  minimal polynomial: {}", r.minpoly_display).unwrap();
        writeln!(out, "  m = {}  M = {}", show(&r.m), show(&r.big_m)).unwrap();
        for v in &r.verdicts {
            let status = serde_json::to_value(v.status).unwrap();
            writeln!(
                out,
                "  [{}] {}: {}",
                status.as_str().unwrap(),
                v.check,
                v.statement
            )
            .unwrap();
        }
        if let Some(c) = &r.conjecture {
            writeln!(
                out,
                "  distance to nearest admissible integer: {} (~{:.6})",
                c.epsilon, c.epsilon_approx
            )
            .unwrap();
        }
    }
    out
}

fn show(v: &ValueJson) -> String {
    match (&v.exact, &v.lo, &v.hi) {
        (Some(x), _, _) => x.clone(),
        (_, Some(lo), Some(hi)) => format!("({lo}, {hi}) ~{:.6}", v.approx),
        _ => "?".into(),
    }
}
