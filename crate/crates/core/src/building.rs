//! Spherical buildings of type A as flag complexes over GF(q).
//!
//! Vertices of `B(ell, q)` are the proper nonzero subspaces of GF(q)^(ell+2)
//! and simplices are flags. Vertex ids are assigned dimension-major and then
//! in subspace enumeration order, so the ids in any flag ascend with the
//! type `dim - 1` and the canonical orientation is the increasing-type one.

use std::collections::HashMap;

use thiserror::Error;

use crate::complex::{Complex, ComplexError, VertexId};
use crate::gf::{FieldSpec, FieldTables, GfError};
use crate::laplace::Cochain;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildingError {
    #[error("subspace dimension {d} out of range for ambient dimension {n}")]
    DimensionOutOfRange { n: usize, d: usize },
    #[error("ambient dimensions differ: {0} vs {1}")]
    AmbientMismatch(usize, usize),
    #[error("building rank must be at least 1, got {0}")]
    InvalidRank(usize),
    #[error("cochain has degree {degree} and {len} values; expected {expected} values")]
    DimensionMismatch {
        degree: usize,
        len: usize,
        expected: usize,
    },
    #[error("generator {0} does not map chambers to chambers")]
    NotAnAutomorphism(usize),
    #[error(transparent)]
    Field(#[from] GfError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// A linear subspace of GF(q)^n in reduced row echelon form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    /// `dim * ambient` field indices, row-major.
    rows: Vec<u8>,
}

impl Subspace {
    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len().checked_div(self.ambient).unwrap_or(0)
    }

    pub fn row(&self, r: usize) -> &[u8] {
        &self.rows[r * self.ambient..(r + 1) * self.ambient]
    }

    pub fn pivots(&self) -> Vec<usize> {
        (0..self.dim())
            .map(|r| self.row(r).iter().position(|&x| x != 0).unwrap())
            .collect()
    }

    /// The span of arbitrary vectors, in canonical form.
    pub fn span(ambient: usize, vectors: &[Vec<u8>], t: &FieldTables) -> Subspace {
        let mut m: Vec<Vec<u8>> = vectors.to_vec();
        let mut rank = 0;
        for col in 0..ambient {
            let Some(p) = (rank..m.len()).find(|&r| m[r][col] != 0) else {
                continue;
            };
            m.swap(rank, p);
            let inv = t.inv(m[rank][col]);
            for x in m[rank].iter_mut() {
                *x = t.mul(*x, inv);
            }
            let pivot = m[rank].clone();
            for (r, row) in m.iter_mut().enumerate() {
                if r != rank && row[col] != 0 {
                    let f = row[col];
                    for (x, &pv) in row.iter_mut().zip(&pivot) {
                        *x = t.sub(*x, t.mul(f, pv));
                    }
                }
            }
            rank += 1;
        }
        m.truncate(rank);
        Subspace {
            ambient,
            rows: m.into_iter().flatten().collect(),
        }
    }

    /// Reduces `v` against this subspace; zero iff `v` lies in it.
    fn reduce(&self, v: &mut [u8], pivots: &[usize], t: &FieldTables) {
        for (r, &p) in pivots.iter().enumerate() {
            let f = v[p];
            if f != 0 {
                for (c, &x) in self.row(r).iter().enumerate() {
                    v[c] = t.sub(v[c], t.mul(f, x));
                }
            }
        }
    }

    /// Whether `other` is a subspace of `self`.
    pub fn contains(&self, other: &Subspace, t: &FieldTables) -> bool {
        let pivots = self.pivots();
        (0..other.dim()).all(|r| {
            let mut v = other.row(r).to_vec();
            self.reduce(&mut v, &pivots, t);
            v.iter().all(|&x| x == 0)
        })
    }
}

/// Lexicographic successor of a d-combination of 0..n.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let d = c.len();
    for i in (0..d).rev() {
        if c[i] < n - d + i {
            c[i] += 1;
            for j in i + 1..d {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// All d-dimensional subspaces of GF(q)^n as RREF matrices: pivot sets in
/// lexicographic order, then free entries as an odometer (last entry fastest).
pub fn enumerate_subspaces(
    n: usize,
    d: usize,
    field: &FieldSpec,
) -> Result<Vec<Subspace>, BuildingError> {
    if d > n {
        return Err(BuildingError::DimensionOutOfRange { n, d });
    }
    let q = field.tables()?.order();
    let mut out = Vec::new();
    let mut pivots: Vec<usize> = (0..d).collect();
    loop {
        let free: Vec<(usize, usize)> = pivots
            .iter()
            .enumerate()
            .flat_map(|(r, &p)| {
                let pivots = &pivots;
                (p + 1..n)
                    .filter(move |c| !pivots.contains(c))
                    .map(move |c| (r, c))
            })
            .collect();
        let mut values = vec![0usize; free.len()];
        loop {
            let mut rows = vec![0u8; d * n];
            for (r, &p) in pivots.iter().enumerate() {
                rows[r * n + p] = 1;
            }
            for (&(r, c), &x) in free.iter().zip(&values) {
                rows[r * n + c] = x as u8;
            }
            out.push(Subspace { ambient: n, rows });
            let mut pos = values.len();
            let mut carried = true;
            while pos > 0 {
                pos -= 1;
                values[pos] += 1;
                if values[pos] < q {
                    carried = false;
                    break;
                }
                values[pos] = 0;
            }
            if carried {
                break;
            }
        }
        if !next_combination(&mut pivots, n) {
            break;
        }
    }
    Ok(out)
}

/// Gaussian binomial coefficient by the product formula.
pub fn gaussian_binomial(n: u32, d: u32, q: u64) -> u128 {
    if d > n {
        return 0;
    }
    let q = q as u128;
    let (mut num, mut den) = (1u128, 1u128);
    for j in 0..d {
        num *= q.pow(n - j) - 1;
        den *= q.pow(j + 1) - 1;
    }
    num / den
}

/// True iff one subspace is properly contained in the other.
pub fn incident(a: &Subspace, b: &Subspace, field: &FieldSpec) -> Result<bool, BuildingError> {
    if a.ambient != b.ambient {
        return Err(BuildingError::AmbientMismatch(a.ambient, b.ambient));
    }
    let t = field.tables()?;
    Ok(match a.dim().cmp(&b.dim()) {
        std::cmp::Ordering::Less => b.contains(a, &t),
        std::cmp::Ordering::Greater => a.contains(b, &t),
        std::cmp::Ordering::Equal => false,
    })
}

/// The flag complex of GF(q)^(ell+2) with its type function.
#[derive(Debug, Clone)]
pub struct TypedBuilding {
    pub ell: usize,
    pub q: u64,
    pub complex: Complex,
    /// Type of each vertex id: subspace dimension minus one.
    pub types: Vec<u8>,
    pub subspaces: Vec<Subspace>,
    /// The standard flag <e1> < <e1,e2> < ... as vertex ids.
    pub chamber: Vec<VertexId>,
    pub field: FieldSpec,
}

pub fn flag_complex(ell: usize, field: &FieldSpec) -> Result<TypedBuilding, BuildingError> {
    if ell < 1 {
        return Err(BuildingError::InvalidRank(ell));
    }
    let n = ell + 2;
    let t = field.tables()?;
    let q = t.order();

    let mut subspaces = Vec::new();
    let mut types = Vec::new();
    let mut offsets = Vec::new();
    let mut lookup: Vec<HashMap<Vec<u8>, VertexId>> = Vec::new();
    for d in 1..=ell + 1 {
        offsets.push(subspaces.len());
        let subs = enumerate_subspaces(n, d, field)?;
        let base = subspaces.len() as VertexId;
        lookup.push(
            subs.iter()
                .enumerate()
                .map(|(i, s)| (s.rows.clone(), base + i as VertexId))
                .collect(),
        );
        types.extend(std::iter::repeat_n((d - 1) as u8, subs.len()));
        subspaces.extend(subs);
    }

    // covers[v]: ids of the (d+1)-dimensional subspaces containing v.
    let total_vectors = (q as u64).pow(n as u32);
    let mut covers: Vec<Vec<VertexId>> = vec![Vec::new(); subspaces.len()];
    for (id, u) in subspaces.iter().enumerate() {
        let d = u.dim();
        if d > ell {
            continue;
        }
        let pivots = u.pivots();
        let mut ups = Vec::new();
        let mut v = vec![0u8; n];
        for idx in 0..total_vectors {
            let mut x = idx;
            for c in v.iter_mut() {
                *c = (x % q as u64) as u8;
                x /= q as u64;
            }
            let mut r = v.clone();
            u.reduce(&mut r, &pivots, &t);
            if r.iter().all(|&c| c == 0) {
                continue;
            }
            let mut gens: Vec<Vec<u8>> = (0..d).map(|k| u.row(k).to_vec()).collect();
            gens.push(r);
            let w = Subspace::span(n, &gens, &t);
            ups.push(lookup[d][&w.rows]);
        }
        ups.sort_unstable();
        ups.dedup();
        covers[id] = ups;
    }

    let mut chambers: Vec<Vec<VertexId>> = Vec::new();
    let mut stack: Vec<Vec<VertexId>> = (offsets[0]
        ..offsets.get(1).copied().unwrap_or(subspaces.len()))
        .map(|v| vec![v as VertexId])
        .collect();
    stack.reverse();
    while let Some(chain) = stack.pop() {
        if chain.len() == ell + 1 {
            chambers.push(chain);
            continue;
        }
        let last = *chain.last().unwrap() as usize;
        for &next in covers[last].iter().rev() {
            let mut c = chain.clone();
            c.push(next);
            stack.push(c);
        }
    }

    let complex = Complex::from_maximal_simplices(&chambers)?;
    let chamber: Vec<VertexId> = offsets.iter().map(|&o| o as VertexId).collect();
    debug_assert!((0..chamber.len())
        .all(|k| subspaces[chamber[k] as usize].pivots() == (0..=k).collect::<Vec<_>>()));
    Ok(TypedBuilding {
        ell,
        q: field.order(),
        complex,
        types,
        subspaces,
        chamber,
        field: field.clone(),
    })
}

impl TypedBuilding {
    pub fn vertex_type(&self, v: VertexId) -> u8 {
        self.types[v as usize]
    }

    /// The fundamental chamber as a standalone full simplex whose vertex
    /// ids are the types 0..=ell.
    pub fn chamber_complex(&self) -> Complex {
        let top: Vec<VertexId> = (0..=self.ell as VertexId).collect();
        Complex::from_maximal_simplices(&[top]).expect("a single simplex is a valid complex")
    }

    /// Vertex permutations induced by the transvections x -> x (I + c E_ab)
    /// for a != b and c running over the powers of the field generator up to
    /// the extension degree. Each is checked to send every chamber to a
    /// chamber, so each is a simplicial automorphism.
    pub fn transvection_automorphisms(&self) -> Result<Vec<Vec<VertexId>>, BuildingError> {
        let t = self.field.tables()?;
        let n = self.ell + 2;
        let lookup: HashMap<&[u8], VertexId> = self
            .subspaces
            .iter()
            .enumerate()
            .map(|(id, s)| (s.rows.as_slice(), id as VertexId))
            .collect();
        let p = self.field.characteristic() as u64;
        let scalars: Vec<u8> = (0..self.field.degree()).map(|m| p.pow(m) as u8).collect();
        let mut out = Vec::new();
        for a in 0..n {
            for b in (0..n).filter(|&b| b != a) {
                for &c in &scalars {
                    let perm: Vec<VertexId> = self
                        .subspaces
                        .iter()
                        .map(|s| {
                            let rows: Vec<Vec<u8>> = (0..s.dim())
                                .map(|r| {
                                    let mut v = s.row(r).to_vec();
                                    v[b] = t.add(v[b], t.mul(v[a], c));
                                    v
                                })
                                .collect();
                            lookup[Subspace::span(n, &rows, &t).rows.as_slice()]
                        })
                        .collect();
                    let top = self.ell;
                    let preserved = (0..self.complex.count(top)).all(|k| {
                        let mut img: Vec<VertexId> = self
                            .complex
                            .simplex(top, k)
                            .iter()
                            .map(|&v| perm[v as usize])
                            .collect();
                        img.sort_unstable();
                        self.complex.index_of(&img).is_some()
                    });
                    if !preserved {
                        return Err(BuildingError::NotAnAutomorphism(out.len()));
                    }
                    out.push(perm);
                }
            }
        }
        Ok(out)
    }

    /// Smallest index in each orbit of i-simplices under
    /// [`Self::transvection_automorphisms`], in increasing order.
    pub fn simplex_orbit_representatives(&self, i: usize) -> Result<Vec<usize>, BuildingError> {
        let gens = self.transvection_automorphisms()?;
        let n = self.complex.count(i);
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut img = Vec::with_capacity(i + 1);
        for perm in &gens {
            for k in 0..n {
                img.clear();
                img.extend(self.complex.simplex(i, k).iter().map(|&v| perm[v as usize]));
                img.sort_unstable();
                let j = self
                    .complex
                    .index_of(&img)
                    .expect("automorphisms map simplices to simplices");
                let (a, b) = (find(&mut parent, k), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        Ok((0..n).filter(|&k| find(&mut parent, k) == k).collect())
    }

    /// Number of chambers (complete flags).
    pub fn chamber_count(&self) -> usize {
        self.complex.count(self.ell)
    }

    /// Lifts a cochain on the fundamental chamber to the type-invariant
    /// cochain with the same value on every simplex of the same type set,
    /// orienting each simplex by increasing type.
    pub fn type_invariant_lift(&self, f: &Cochain) -> Result<Cochain, BuildingError> {
        let k = self.chamber_complex();
        let i = f.degree();
        let expected = k.count(i);
        if f.values().len() != expected || i > self.ell {
            return Err(BuildingError::DimensionMismatch {
                degree: i,
                len: f.values().len(),
                expected,
            });
        }
        let mut type_set = Vec::with_capacity(i + 1);
        let values = self
            .complex
            .simplices(i)
            .map(|s| {
                type_set.clear();
                type_set.extend(s.iter().map(|&v| self.types[v as usize] as VertexId));
                // Ids ascend with type, so this is already sorted.
                debug_assert!(type_set.windows(2).all(|w| w[0] < w[1]));
                let idx = k.index_of(&type_set).expect("types in a flag are distinct");
                f.values()[idx].clone()
            })
            .collect();
        Ok(Cochain::new(i, values))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::make_field;

    /// All d x n matrices in RREF found by brute force over every matrix.
    fn brute_rref_count(n: usize, d: usize, q: u32) -> usize {
        let field = make_field(q, 1).unwrap();
        let t = field.tables().unwrap();
        let cells = n * d;
        let mut seen = std::collections::HashSet::new();
        for idx in 0..(q as u64).pow(cells as u32) {
            let mut x = idx;
            let rows: Vec<Vec<u8>> = (0..d)
                .map(|_| {
                    (0..n)
                        .map(|_| {
                            let c = (x % q as u64) as u8;
                            x /= q as u64;
                            c
                        })
                        .collect()
                })
                .collect();
            let s = Subspace::span(n, &rows, &t);
            if s.dim() == d {
                seen.insert(s);
            }
        }
        seen.len()
    }

    #[test]
    fn subspace_counts() {
        let f2 = make_field(2, 1).unwrap();
        assert_eq!(enumerate_subspaces(3, 1, &f2).unwrap().len(), 7);
        assert_eq!(enumerate_subspaces(4, 2, &f2).unwrap().len(), 35);
        assert_eq!(brute_rref_count(4, 2, 2), 35);
        assert_eq!(enumerate_subspaces(5, 0, &f2).unwrap().len(), 1);
        assert_eq!(
            enumerate_subspaces(2, 3, &f2).unwrap_err(),
            BuildingError::DimensionOutOfRange { n: 2, d: 3 }
        );
        for (p, k) in [(2, 1), (3, 1), (2, 2), (5, 1)] {
            let f = make_field(p, k).unwrap();
            for n in 1..=4 {
                for d in 0..=n {
                    let subs = enumerate_subspaces(n, d, &f).unwrap();
                    assert_eq!(
                        subs.len() as u128,
                        gaussian_binomial(n as u32, d as u32, f.order())
                    );
                    let unique: std::collections::HashSet<_> = subs.iter().collect();
                    assert_eq!(unique.len(), subs.len());
                }
            }
        }
    }

    #[test]
    fn enumeration_is_canonical() {
        let f3 = make_field(3, 1).unwrap();
        let t = f3.tables().unwrap();
        for s in enumerate_subspaces(4, 2, &f3).unwrap() {
            let rows: Vec<Vec<u8>> = (0..2).map(|r| s.row(r).to_vec()).collect();
            assert_eq!(Subspace::span(4, &rows, &t), s);
        }
    }

    #[test]
    fn incidence() {
        let f = make_field(2, 1).unwrap();
        let t = f.tables().unwrap();
        let e = |v: &[u8]| v.to_vec();
        let l1 = Subspace::span(3, &[e(&[1, 0, 0])], &t);
        let p12 = Subspace::span(3, &[e(&[1, 0, 0]), e(&[0, 1, 0])], &t);
        let p23 = Subspace::span(3, &[e(&[0, 1, 0]), e(&[0, 0, 1])], &t);
        let l2 = Subspace::span(3, &[e(&[0, 1, 0])], &t);
        assert!(incident(&l1, &p12, &f).unwrap());
        assert!(incident(&p12, &l1, &f).unwrap());
        assert!(!incident(&l1, &p23, &f).unwrap());
        assert!(!incident(&l1, &l2, &f).unwrap());
        assert!(!incident(&l1, &l1, &f).unwrap());
        let other = Subspace::span(4, &[e(&[1, 0, 0, 0])], &t);
        assert_eq!(
            incident(&l1, &other, &f).unwrap_err(),
            BuildingError::AmbientMismatch(3, 4)
        );
    }

    #[test]
    fn rank_one_building_over_f2() {
        let b = flag_complex(1, &make_field(2, 1).unwrap()).unwrap();
        assert_eq!(b.complex.counts(), vec![14, 21]);
        assert_eq!(b.chamber_count(), 21);
        assert!(b.complex.weights(1).iter().all(|&w| w == 1));
        assert!(b.complex.weights(0).iter().all(|&w| w == 3));
        assert!(b.complex.check_weight_identity());
        assert_eq!(b.chamber, vec![0, 7]);
        // Bipartite: every edge joins a line and a plane.
        for e in b.complex.simplices(1) {
            assert_eq!((b.vertex_type(e[0]), b.vertex_type(e[1])), (0, 1));
        }
    }

    #[test]
    fn rank_two_building_over_f2() {
        let b = flag_complex(2, &make_field(2, 1).unwrap()).unwrap();
        assert_eq!(b.complex.count(0), 65);
        assert_eq!(b.types.iter().filter(|&&t| t == 1).count(), 35);
        assert_eq!(b.chamber_count(), 15 * 7 * 3);
        assert!(b.complex.check_weight_identity());
        for i in 0..=2 {
            for s in b.complex.simplices(i) {
                let mut ty: Vec<u8> = s.iter().map(|&v| b.vertex_type(v)).collect();
                ty.dedup();
                assert_eq!(ty.len(), s.len());
            }
        }
        assert_eq!(b.complex.index_of(&b.chamber).map(|_| ()), Some(()));
    }

    #[test]
    fn transvection_orbits_are_type_sets() {
        for (ell, p, k) in [(1, 2, 1), (1, 2, 2), (2, 2, 1), (2, 3, 1)] {
            let b = flag_complex(ell, &make_field(p, k).unwrap()).unwrap();
            for i in 0..=ell {
                let reps = b.simplex_orbit_representatives(i).unwrap();
                // One orbit per set of i+1 types out of ell+1.
                let expect = (0..=i).fold(1, |acc, j| acc * (ell + 1 - j) / (j + 1));
                assert_eq!(reps.len(), expect, "ell {ell} q {}^{k} i {i}", p);
                assert_eq!(reps[0], 0);
            }
        }
    }

    #[test]
    fn lift_of_vertex_cochain() {
        use num_rational::BigRational;
        let b = flag_complex(1, &make_field(2, 1).unwrap()).unwrap();
        let r = |x: i64| BigRational::from_integer(x.into());
        let f = Cochain::new(0, vec![r(1), r(-1)]);
        let lifted = b.type_invariant_lift(&f).unwrap();
        for (v, val) in b.complex.vertex_ids().iter().zip(lifted.values()) {
            let expect = if b.vertex_type(*v) == 0 { r(1) } else { r(-1) };
            assert_eq!(val, &expect);
        }
        let zero = b.type_invariant_lift(&Cochain::zeros(0, 2)).unwrap();
        assert!(zero.is_zero());
        assert!(matches!(
            b.type_invariant_lift(&Cochain::zeros(0, 3)),
            Err(BuildingError::DimensionMismatch { .. })
        ));
    }
}
