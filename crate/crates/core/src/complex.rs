//! Pure finite simplicial complexes with chamber-count weights.
//!
//! Every simplex is stored once, as its ascending vertex list (the canonical
//! orientation). Simplices of each dimension are kept in lexicographic order
//! in a flat array, so the index of a simplex within its dimension is stable
//! across runs and is the row/column index of every operator built on top.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt::Write as _;

use sha2::{Digest, Sha256};
use thiserror::Error;

pub type VertexId = u32;

/// Largest accepted complex dimension; a top simplex has 2^(n+1) - 1 faces.
pub const MAX_DIMENSION: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("no simplices given")]
    EmptyInput,
    #[error("maximal simplices must share one dimension: expected {expected}, found {found}")]
    MixedDimensions { expected: usize, found: usize },
    #[error("duplicate simplex {0:?}")]
    DuplicateSimplex(Vec<VertexId>),
    #[error("repeated vertex in {0:?}")]
    RepeatedVertex(Vec<VertexId>),
    #[error("simplex {0:?} is not in the complex")]
    SimplexNotFound(Vec<VertexId>),
    #[error("the link of a top-dimensional simplex is empty")]
    EmptyLink,
    #[error("dimension {0} exceeds the supported maximum {MAX_DIMENSION}")]
    DimensionTooLarge(usize),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// A simplex in canonical (strictly ascending) form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex(Vec<VertexId>);

impl Simplex {
    /// Accepts any ordering of distinct vertices and sorts it.
    pub fn new(mut vertices: Vec<VertexId>) -> Result<Self, ComplexError> {
        if vertices.is_empty() {
            return Err(ComplexError::EmptyInput);
        }
        vertices.sort_unstable();
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(ComplexError::RepeatedVertex(vertices));
        }
        Ok(Simplex(vertices))
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }
}

/// An ordered vertex list, meaningful up to even permutations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrientedSimplex(pub Vec<VertexId>);

/// Canonical representative and the sign of the sorting permutation.
pub fn orientation_sign(os: &OrientedSimplex) -> Result<(Simplex, i8), ComplexError> {
    let v = &os.0;
    if v.is_empty() {
        return Err(ComplexError::EmptyInput);
    }
    let mut inversions = 0usize;
    for a in 0..v.len() {
        for b in a + 1..v.len() {
            match v[a].cmp(&v[b]) {
                Ordering::Greater => inversions += 1,
                Ordering::Equal => return Err(ComplexError::RepeatedVertex(v.clone())),
                Ordering::Less => {}
            }
        }
    }
    let sign = if inversions.is_multiple_of(2) { 1 } else { -1 };
    Ok((Simplex::new(v.clone())?, sign))
}

#[derive(Debug, Clone)]
struct Level {
    arity: usize,
    /// Lexicographically sorted canonical simplices, `arity` ids each.
    verts: Vec<VertexId>,
    weights: Vec<u64>,
    /// `arity` entries per simplex: index (one level down) of the face that
    /// omits position j. Empty for vertices.
    faces: Vec<u32>,
    coface_ptr: Vec<usize>,
    cofaces: Vec<u32>,
}

impl Level {
    fn len(&self) -> usize {
        self.verts.len() / self.arity
    }

    fn get(&self, idx: usize) -> &[VertexId] {
        &self.verts[idx * self.arity..(idx + 1) * self.arity]
    }

    fn find(&self, key: &[VertexId]) -> Option<usize> {
        if key.len() != self.arity {
            return None;
        }
        let (mut lo, mut hi) = (0usize, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.get(mid).cmp(key) {
                Ordering::Less => lo = mid + 1,
                Ordering::Greater => hi = mid,
                Ordering::Equal => return Some(mid),
            }
        }
        None
    }
}

/// Sorts `count` chunks of `arity` ids and removes duplicates.
fn sort_dedup_chunks(flat: Vec<VertexId>, arity: usize) -> Vec<VertexId> {
    let count = flat.len() / arity;
    let mut order: Vec<u32> = (0..count as u32).collect();
    let chunk = |i: u32| &flat[i as usize * arity..(i as usize + 1) * arity];
    order.sort_unstable_by(|&a, &b| chunk(a).cmp(chunk(b)));
    let mut out: Vec<VertexId> = Vec::with_capacity(flat.len());
    for i in order {
        let c = chunk(i);
        if out.len() >= arity && &out[out.len() - arity..] == c {
            continue;
        }
        out.extend_from_slice(c);
    }
    out
}

/// A finite pure simplicial complex in which every simplex lies in a top simplex.
#[derive(Debug, Clone)]
pub struct Complex {
    levels: Vec<Level>,
}

impl Complex {
    /// Closure of a list of equal-dimension simplices under taking faces.
    pub fn from_maximal_simplices<S: AsRef<[VertexId]>>(faces: &[S]) -> Result<Self, ComplexError> {
        if faces.is_empty() {
            return Err(ComplexError::EmptyInput);
        }
        let arity = faces[0].as_ref().len();
        if arity == 0 {
            return Err(ComplexError::EmptyInput);
        }
        if arity > MAX_DIMENSION + 1 {
            return Err(ComplexError::DimensionTooLarge(arity - 1));
        }
        let mut flat = Vec::with_capacity(faces.len() * arity);
        for f in faces {
            let f = f.as_ref();
            if f.len() != arity {
                return Err(ComplexError::MixedDimensions {
                    expected: arity - 1,
                    found: f.len().saturating_sub(1),
                });
            }
            let s = Simplex::new(f.to_vec())?;
            flat.extend_from_slice(s.vertices());
        }
        let n_top = faces.len();
        let top = sort_dedup_chunks(flat, arity);
        if top.len() / arity != n_top {
            let mut seen = std::collections::HashSet::new();
            for f in faces {
                let s = Simplex::new(f.as_ref().to_vec())?;
                if !seen.insert(s.clone()) {
                    return Err(ComplexError::DuplicateSimplex(s.0));
                }
            }
        }

        let n = arity - 1;
        let mut levels: Vec<Option<Level>> = vec![None; arity];
        let new_level = |arity: usize, verts: Vec<VertexId>| Level {
            arity,
            weights: vec![0; verts.len() / arity],
            verts,
            faces: Vec::new(),
            coface_ptr: Vec::new(),
            cofaces: Vec::new(),
        };
        levels[n] = Some(new_level(arity, top));
        for i in (0..n).rev() {
            let upper = levels[i + 1].as_ref().unwrap();
            let a = i + 1;
            let mut cand = Vec::with_capacity(upper.len() * (a + 1) * a);
            for idx in 0..upper.len() {
                let s = upper.get(idx);
                for j in 0..s.len() {
                    cand.extend(
                        s.iter()
                            .enumerate()
                            .filter(|&(k, _)| k != j)
                            .map(|(_, &v)| v),
                    );
                }
            }
            levels[i] = Some(new_level(a, sort_dedup_chunks(cand, a)));
        }
        let mut levels: Vec<Level> = levels.into_iter().map(Option::unwrap).collect();

        // w(s) counts the top simplices containing s; tally every nonempty
        // subset of every top simplex.
        let mut sub = Vec::with_capacity(arity);
        for t_idx in 0..levels[n].len() {
            let t = levels[n].get(t_idx).to_vec();
            for mask in 1u64..(1u64 << arity) {
                sub.clear();
                sub.extend(
                    t.iter()
                        .enumerate()
                        .filter(|&(k, _)| mask & (1 << k) != 0)
                        .map(|(_, &v)| v),
                );
                let lvl = &mut levels[sub.len() - 1];
                let idx = lvl.find(&sub).expect("face closure is complete");
                lvl.weights[idx] += 1;
            }
        }

        for i in 1..=n {
            let (lower, upper) = levels.split_at_mut(i);
            let lower = &mut lower[i - 1];
            let upper = &mut upper[0];
            let mut faces = Vec::with_capacity(upper.verts.len());
            let mut counts = vec![0usize; lower.len() + 1];
            let mut key = Vec::with_capacity(i);
            for idx in 0..upper.len() {
                let s = upper.get(idx);
                for j in 0..=i {
                    key.clear();
                    key.extend(
                        s.iter()
                            .enumerate()
                            .filter(|&(k, _)| k != j)
                            .map(|(_, &v)| v),
                    );
                    let f = lower.find(&key).expect("face closure is complete");
                    faces.push(f as u32);
                    counts[f + 1] += 1;
                }
            }
            for k in 1..counts.len() {
                counts[k] += counts[k - 1];
            }
            let mut fill = counts.clone();
            let mut cofaces = vec![0u32; faces.len()];
            for (pos, &f) in faces.iter().enumerate() {
                let s_idx = pos / (i + 1);
                cofaces[fill[f as usize]] = s_idx as u32;
                fill[f as usize] += 1;
            }
            upper.faces = faces;
            lower.coface_ptr = counts;
            lower.cofaces = cofaces;
        }
        let top = &mut levels[n];
        top.coface_ptr = vec![0; top.len() + 1];
        Ok(Complex { levels })
    }

    pub fn dim(&self) -> usize {
        self.levels.len() - 1
    }

    /// Number of i-simplices (0 outside 0..=dim).
    pub fn count(&self, i: usize) -> usize {
        self.levels.get(i).map_or(0, Level::len)
    }

    pub fn counts(&self) -> Vec<usize> {
        self.levels.iter().map(Level::len).collect()
    }

    pub fn simplex(&self, i: usize, idx: usize) -> &[VertexId] {
        self.levels[i].get(idx)
    }

    pub fn simplices(&self, i: usize) -> impl Iterator<Item = &[VertexId]> + '_ {
        self.levels[i].verts.chunks_exact(i + 1)
    }

    /// Index of a canonical simplex within its dimension.
    pub fn index_of(&self, s: &[VertexId]) -> Option<usize> {
        if s.is_empty() {
            return None;
        }
        self.levels.get(s.len() - 1)?.find(s)
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.index_of(s.vertices()).is_some()
    }

    pub fn vertex_ids(&self) -> &[VertexId] {
        &self.levels[0].verts
    }

    pub fn vertex_index(&self, v: VertexId) -> Option<usize> {
        self.levels[0].find(&[v])
    }

    pub fn weight(&self, i: usize, idx: usize) -> u64 {
        self.levels[i].weights[idx]
    }

    pub fn weights(&self, i: usize) -> &[u64] {
        &self.levels[i].weights
    }

    /// Indices of the (i-1)-faces; entry j omits vertex position j.
    pub fn faces(&self, i: usize, idx: usize) -> &[u32] {
        if i == 0 {
            return &[];
        }
        &self.levels[i].faces[idx * (i + 1)..(idx + 1) * (i + 1)]
    }

    /// Indices of the (i+1)-simplices containing the given i-simplex.
    pub fn cofaces(&self, i: usize, idx: usize) -> &[u32] {
        let l = &self.levels[i];
        if l.coface_ptr.is_empty() {
            return &[];
        }
        &l.cofaces[l.coface_ptr[idx]..l.coface_ptr[idx + 1]]
    }

    /// Indices of the top simplices containing the given simplex.
    pub fn tops_containing(&self, i: usize, idx: usize) -> Vec<usize> {
        let mut current = vec![idx];
        for lvl in i..self.dim() {
            let mut next: Vec<usize> = current
                .iter()
                .flat_map(|&c| self.cofaces(lvl, c).iter().map(|&x| x as usize))
                .collect();
            next.sort_unstable();
            next.dedup();
            current = next;
        }
        current
    }

    fn locate(&self, s: &Simplex) -> Result<usize, ComplexError> {
        self.index_of(s.vertices())
            .ok_or_else(|| ComplexError::SimplexNotFound(s.vertices().to_vec()))
    }

    /// Closure of all top simplices containing `s`, keeping global vertex ids.
    pub fn star(&self, s: &Simplex) -> Result<Complex, ComplexError> {
        let idx = self.locate(s)?;
        let tops: Vec<&[VertexId]> = self
            .tops_containing(s.dim(), idx)
            .into_iter()
            .map(|t| self.simplex(self.dim(), t))
            .collect();
        Complex::from_maximal_simplices(&tops)
    }

    /// The link of `s` as a standalone complex with dense vertex ids.
    pub fn link(&self, s: &Simplex) -> Result<Link, ComplexError> {
        let idx = self.locate(s)?;
        if s.dim() == self.dim() {
            return Err(ComplexError::EmptyLink);
        }
        let tops: Vec<Vec<VertexId>> = self
            .tops_containing(s.dim(), idx)
            .into_iter()
            .map(|t| {
                self.simplex(self.dim(), t)
                    .iter()
                    .copied()
                    .filter(|v| !s.vertices().contains(v))
                    .collect()
            })
            .collect();
        let mut to_global: Vec<VertexId> = tops.iter().flatten().copied().collect();
        to_global.sort_unstable();
        to_global.dedup();
        // Order-preserving relabel keeps canonical orientations intact.
        let relabeled: Vec<Vec<VertexId>> = tops
            .iter()
            .map(|t| {
                t.iter()
                    .map(|v| to_global.binary_search(v).unwrap() as VertexId)
                    .collect()
            })
            .collect();
        Ok(Link {
            center: s.clone(),
            complex: Complex::from_maximal_simplices(&relabeled)?,
            to_global,
        })
    }

    /// Checks sum over cofaces of w = (n - i) w(sigma) for every sigma with i < n.
    pub fn check_weight_identity(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| {
            (0..self.count(i)).all(|idx| {
                let sum: u64 = self
                    .cofaces(i, idx)
                    .iter()
                    .map(|&c| self.weight(i + 1, c as usize))
                    .sum();
                sum == (n - i) as u64 * self.weight(i, idx)
            })
        })
    }

    /// Top simplices in the ingestion text format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in self.simplices(self.dim()) {
            let line: Vec<String> = s.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }

    /// SHA-256 of the canonical top-simplex listing.
    pub fn content_hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_text().as_bytes()))
    }
}

/// The link of a simplex together with its vertex relabeling.
#[derive(Debug, Clone)]
pub struct Link {
    pub center: Simplex,
    pub complex: Complex,
    /// Link vertex id -> vertex id in the ambient complex (ascending).
    pub to_global: Vec<VertexId>,
}

impl Link {
    pub fn to_local(&self, v: VertexId) -> Option<VertexId> {
        self.to_global.binary_search(&v).ok().map(|i| i as VertexId)
    }
}

/// A complex read from text, with the original label of every dense id.
#[derive(Debug, Clone)]
pub struct IngestedComplex {
    pub complex: Complex,
    pub labels: Vec<u64>,
}

/// Parses one maximal simplex per line; `#` starts a comment.
pub fn parse_complex_text(text: &str) -> Result<IngestedComplex, ComplexError> {
    let mut faces: Vec<Vec<u64>> = Vec::new();
    let mut arity: Option<(usize, usize)> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parse_err = |message: String| ComplexError::Parse {
            line: lineno + 1,
            message,
        };
        let face = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<u64>()
                    .map_err(|_| parse_err(format!("invalid vertex label {tok:?}")))
            })
            .collect::<Result<Vec<u64>, _>>()?;
        match arity {
            None => arity = Some((face.len(), lineno + 1)),
            Some((a, first)) if a != face.len() => {
                return Err(parse_err(format!(
                    "simplex has {} vertices but line {first} has {a}",
                    face.len()
                )))
            }
            _ => {}
        }
        let mut sorted = face.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(parse_err(format!("repeated vertex in {face:?}")));
        }
        faces.push(face);
    }
    // Dense ids follow label order, so the result does not depend on the
    // order of lines or of vertices within a line.
    let mut labels: Vec<u64> = faces.iter().flatten().copied().collect();
    labels.sort_unstable();
    labels.dedup();
    if labels.len() > VertexId::MAX as usize {
        return Err(ComplexError::Parse {
            line: 0,
            message: "too many vertices".into(),
        });
    }
    let ids: HashMap<u64, VertexId> = labels
        .iter()
        .enumerate()
        .map(|(i, &l)| (l, i as VertexId))
        .collect();
    let dense: Vec<Vec<VertexId>> = faces
        .iter()
        .map(|f| f.iter().map(|l| ids[l]).collect())
        .collect();
    let complex = Complex::from_maximal_simplices(&dense)?;
    Ok(IngestedComplex { complex, labels })
}
