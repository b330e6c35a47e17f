//! Verification drivers: instances, budgets, caching, theorem checks and
//! reports.

pub mod cache;
pub mod published;
pub mod report;
pub mod verify;

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};
use std::time::Instant;

use num_rational::BigRational;
use thiserror::Error;

use crate::building::{flag_complex, BuildingError, TypedBuilding};
use crate::complex::{Complex, ComplexError};
use crate::gf::{field_of_order, GfError};
use crate::laplace::{assemble_matrix, LaplaceError};
use crate::spectra::{
    self, default_width, MinpolyConfig, MinpolyStats, SpectraError, SpectralReport,
};

use cache::{building_key, complex_key, Cache, CacheEntry, CACHE_VERSION};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("no published polynomial for l={ell}, q={q}, i={i}")]
    UnknownPublishedInstance { ell: usize, q: u64, i: usize },
    #[error("{0} exceeds the size budget")]
    BudgetExceeded(String),
    #[error("degree {i} is outside 0..{dim} for a complex of dimension {dim}")]
    DegreeOutOfRange { i: usize, dim: usize },
    #[error("unknown complex {0}")]
    UnknownComplex(String),
    #[error("cache: {0}")]
    Cache(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Field(#[from] GfError),
    #[error(transparent)]
    Building(#[from] BuildingError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Laplace(#[from] LaplaceError),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
}

/// The complex an instance lives on.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Source {
    Building {
        ell: usize,
        q: u64,
    },
    /// Ingested complex, by content hash.
    Complex {
        hash: String,
    },
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Building { ell, q } => write!(f, "B({ell},{q})"),
            Source::Complex { hash } => write!(f, "complex {hash}"),
        }
    }
}

/// A Laplacian: a complex and a cochain degree.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Instance {
    pub source: Source,
    pub i: usize,
}

impl Instance {
    pub fn building(ell: usize, q: u64, i: usize) -> Self {
        Instance {
            source: Source::Building { ell, q },
            i,
        }
    }

    pub fn rank(&self) -> Option<usize> {
        match self.source {
            Source::Building { ell, .. } => Some(ell),
            Source::Complex { .. } => None,
        }
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} i={}", self.source, self.i)
    }
}

/// Size limits; instances above them fail with `BudgetExceeded`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Number of chambers (top simplices) of a building.
    pub max_chambers: u128,
    /// Dimension of the cochain space the Laplacian acts on.
    pub max_dim: usize,
}

impl Budget {
    pub const DEFAULT: Budget = Budget {
        max_chambers: 20_000,
        max_dim: 3_000,
    };
    pub const EXTENDED: Budget = Budget {
        max_chambers: 1_000_000,
        max_dim: 100_000,
    };
}

#[derive(Debug, Clone)]
pub struct HarnessConfig {
    /// Krylov seed; results do not depend on it.
    pub seed: u64,
    /// Isolating interval width for reported roots.
    pub width: BigRational,
    /// Narrowest width tried before a comparison is reported inconclusive.
    pub floor: BigRational,
    pub budget: Budget,
    pub cache_dir: Option<PathBuf>,
    /// Per-prime certification work above which building Laplacians are
    /// certified on automorphism-orbit representatives only.
    pub orbit_threshold: u128,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        HarnessConfig {
            seed: 0,
            width: default_width(),
            floor: BigRational::new(1.into(), 1_000_000_000_000i64.into()),
            budget: Budget::DEFAULT,
            cache_dir: None,
            orbit_threshold: 2_000_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Timings {
    pub build_ms: u64,
    pub minpoly_ms: u64,
    pub roots_ms: u64,
    pub cached: bool,
}

/// Certified spectrum of one instance plus how long it took.
#[derive(Debug, Clone)]
pub struct InstanceSpectrum {
    pub instance: Instance,
    pub report: SpectralReport,
    pub timings: Timings,
}

/// A complex held by a session.
#[derive(Debug, Clone)]
pub enum Held {
    Building(Arc<TypedBuilding>),
    Complex(Arc<Complex>),
}

impl Held {
    pub fn complex(&self) -> &Complex {
        match self {
            Held::Building(b) => &b.complex,
            Held::Complex(c) => c,
        }
    }

    pub fn building(&self) -> Option<&TypedBuilding> {
        match self {
            Held::Building(b) => Some(b),
            Held::Complex(_) => None,
        }
    }
}

/// Number of complete flags in GF(q)^(ell+2).
pub fn chamber_count(ell: usize, q: u64) -> u128 {
    let q = q as u128;
    (1..=ell as u32 + 2)
        .map(|k| (0..k).map(|j| q.pow(j)).sum::<u128>())
        .product()
}

fn ms(t: Instant) -> u64 {
    t.elapsed().as_millis() as u64
}

/// A building and its construction time in milliseconds.
type BuiltBuilding = (Arc<TypedBuilding>, u64);

/// Shared state for a run: configuration, cache, and memoized complexes and
/// spectra. Safe to use from several threads.
pub struct Session {
    cfg: HarnessConfig,
    cache: Option<Cache>,
    buildings: Mutex<BTreeMap<(usize, u64), BuiltBuilding>>,
    complexes: Mutex<BTreeMap<String, Arc<Complex>>>,
    spectra: Mutex<BTreeMap<Instance, Arc<InstanceSpectrum>>>,
}

impl Session {
    pub fn new(cfg: HarnessConfig) -> Result<Self, HarnessError> {
        let cache = cfg.cache_dir.as_ref().map(Cache::open).transpose()?;
        Ok(Session {
            cfg,
            cache,
            buildings: Mutex::new(BTreeMap::new()),
            complexes: Mutex::new(BTreeMap::new()),
            spectra: Mutex::new(BTreeMap::new()),
        })
    }

    pub fn config(&self) -> &HarnessConfig {
        &self.cfg
    }

    /// Builds B(ell, q) once per session; returns it with its build time.
    pub fn building(&self, ell: usize, q: u64) -> Result<(Arc<TypedBuilding>, u64), HarnessError> {
        let chambers = chamber_count(ell, q);
        if chambers > self.cfg.budget.max_chambers {
            return Err(HarnessError::BudgetExceeded(format!(
                "B({ell},{q}) with {chambers} chambers"
            )));
        }
        let mut map = self.buildings.lock().unwrap();
        if let Some(b) = map.get(&(ell, q)) {
            return Ok(b.clone());
        }
        let t = Instant::now();
        let b = Arc::new(flag_complex(ell, &field_of_order(q)?)?);
        let entry = (b, ms(t));
        map.insert((ell, q), entry.clone());
        Ok(entry)
    }

    /// Registers an ingested complex and returns its source handle.
    pub fn add_complex(&self, c: Complex) -> Source {
        let hash = c.content_hash();
        self.complexes
            .lock()
            .unwrap()
            .entry(hash.clone())
            .or_insert_with(|| Arc::new(c));
        Source::Complex { hash }
    }

    pub fn complex(&self, source: &Source) -> Result<Held, HarnessError> {
        match source {
            Source::Building { ell, q } => Ok(Held::Building(self.building(*ell, *q)?.0)),
            Source::Complex { hash } => self
                .complexes
                .lock()
                .unwrap()
                .get(hash)
                .cloned()
                .map(Held::Complex)
                .ok_or_else(|| HarnessError::UnknownComplex(hash.clone())),
        }
    }

    /// Certified spectrum of the Laplacian on C^i, memoized and cached.
    pub fn spectrum(&self, inst: &Instance) -> Result<Arc<InstanceSpectrum>, HarnessError> {
        if let Some(s) = self.spectra.lock().unwrap().get(inst) {
            return Ok(s.clone());
        }
        let s = Arc::new(self.compute(inst)?);
        self.spectra.lock().unwrap().insert(inst.clone(), s.clone());
        Ok(s)
    }

    fn compute(&self, inst: &Instance) -> Result<InstanceSpectrum, HarnessError> {
        let mut timings = Timings::default();
        let held = self.complex(&inst.source)?;
        let (key, probe) = match &inst.source {
            Source::Building { ell, q } => {
                timings.build_ms = self.building(*ell, *q)?.1;
                let ell_i = *ell as i64;
                (
                    building_key(*ell, *q, inst.i),
                    (ell_i - inst.i as i64, ell_i + 1),
                )
            }
            Source::Complex { hash } => (
                complex_key(hash, inst.i),
                (0, held.complex().dim() as i64 + 1),
            ),
        };
        let complex = held.complex();
        let n = complex.dim();
        if inst.i >= n {
            return Err(HarnessError::DegreeOutOfRange { i: inst.i, dim: n });
        }
        let dim = complex.count(inst.i);
        if dim > self.cfg.budget.max_dim {
            return Err(HarnessError::BudgetExceeded(format!(
                "{inst} with {dim} cochains"
            )));
        }
        let identity = inst.source.to_string();
        let t = Instant::now();
        let cached = self
            .cache
            .as_ref()
            .and_then(|c| c.get(&key))
            .filter(|e| e.dim == dim);
        let (poly, stats) = match cached {
            Some(entry) => {
                timings.cached = true;
                (entry.poly()?, MinpolyStats::default())
            }
            None => {
                let matrix = assemble_matrix(complex, inst.i)?;
                let mut mcfg = MinpolyConfig {
                    seed: self.cfg.seed,
                    ..MinpolyConfig::default()
                };
                if let Held::Building(b) = &held {
                    // Degree estimate ell^2 + 10 covers every computed case.
                    let est = spectra::minpoly::certification_work(&matrix, dim, n * n + 10);
                    if est > self.cfg.orbit_threshold {
                        mcfg.certify_columns = Some(b.simplex_orbit_representatives(inst.i)?);
                    }
                }
                let (poly, stats) = spectra::minimal_polynomial_with(&matrix, dim, &mcfg)?;
                if let Some(c) = &self.cache {
                    c.put(&CacheEntry {
                        version: CACHE_VERSION.to_string(),
                        key: key.clone(),
                        dim,
                        minpoly: poly.to_string(),
                        minpoly_ms: ms(t),
                    })?;
                }
                (poly, stats)
            }
        };
        timings.minpoly_ms = ms(t);
        let t = Instant::now();
        let report = spectra::summarize(
            identity,
            inst.i,
            dim,
            poly,
            stats,
            &self.cfg.width,
            Some(probe),
        )?;
        timings.roots_ms = ms(t);
        Ok(InstanceSpectrum {
            instance: inst.clone(),
            report,
            timings,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chamber_counts() {
        assert_eq!(chamber_count(1, 2), 21);
        assert_eq!(chamber_count(2, 2), 315);
        assert_eq!(chamber_count(4, 2), 615_195);
        assert_eq!(chamber_count(3, 3), 251_680);
    }

    #[test]
    fn budget_rejects_large_buildings() {
        let s = Session::new(HarnessConfig::default()).unwrap();
        assert!(matches!(
            s.building(4, 2),
            Err(HarnessError::BudgetExceeded(_))
        ));
        assert!(matches!(
            s.spectrum(&Instance::building(1, 2, 1)),
            Err(HarnessError::DegreeOutOfRange { .. })
        ));
    }

    #[test]
    fn cached_spectrum_matches_fresh() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = HarnessConfig {
            cache_dir: Some(dir.path().to_path_buf()),
            ..HarnessConfig::default()
        };
        let inst = Instance::building(1, 3, 0);
        let fresh = Session::new(cfg.clone()).unwrap().spectrum(&inst).unwrap();
        assert!(!fresh.timings.cached);
        let again = Session::new(cfg).unwrap().spectrum(&inst).unwrap();
        assert!(again.timings.cached);
        assert_eq!(fresh.report.minpoly, again.report.minpoly);
        assert_eq!(
            fresh.report.isolation.roots(),
            again.report.isolation.roots()
        );
    }
}
