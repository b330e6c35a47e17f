//! Theorem checks. Every verdict carries exact values or isolating
//! intervals that are enough to re-check it by hand.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::published::{published_polynomial, PublishedComparison};
use super::{HarnessError, Instance, InstanceSpectrum, Session, Source};
use crate::complex::{Complex, Simplex};
use crate::laplace::assemble_matrix;
use crate::spectra::{
    fmt_rational, minimal_polynomial, reduced_cohomology_vanishes, summarize, MinpolyStats,
    RootIsolation, RootValue, SturmSequence,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    CertifiedTrue,
    CertifiedFalse,
    InconclusiveAtWidth,
}

impl Status {
    fn from_option(v: Option<bool>) -> Status {
        match v {
            Some(true) => Status::CertifiedTrue,
            Some(false) => Status::CertifiedFalse,
            None => Status::InconclusiveAtWidth,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub check: String,
    pub instance: String,
    pub statement: String,
    pub status: Status,
    pub witness: BTreeMap<String, String>,
}

impl Verdict {
    fn new(check: &str, inst: &Instance, statement: String, status: Status) -> Self {
        Verdict {
            check: check.to_string(),
            instance: inst.to_string(),
            statement,
            status,
            witness: BTreeMap::new(),
        }
    }

    fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.witness.insert(key.to_string(), value.to_string());
        self
    }
}

fn int(k: i64) -> BigRational {
    BigRational::from_integer(k.into())
}

/// An affine image a*r + b (a > 0) of a certified real root, refinable on
/// demand.
#[derive(Debug, Clone)]
pub struct CertReal {
    iso: Option<(RootIsolation, usize)>,
    exact: Option<BigRational>,
    a: BigRational,
    b: BigRational,
}

impl CertReal {
    pub fn exact(v: BigRational) -> Self {
        CertReal {
            iso: None,
            exact: Some(v),
            a: int(1),
            b: int(0),
        }
    }

    pub fn root(iso: &RootIsolation, idx: usize) -> Self {
        let r = &iso.roots()[idx];
        match &r.exact {
            Some(v) => Self::exact(v.clone()),
            None => CertReal {
                iso: Some((iso.clone(), idx)),
                exact: None,
                a: int(1),
                b: int(0),
            },
        }
    }

    /// Smallest nonzero root.
    pub fn min_nonzero(iso: &RootIsolation) -> Option<Self> {
        let idx = iso.roots().iter().position(|r| !r.is_zero())?;
        Some(Self::root(iso, idx))
    }

    pub fn max_root(iso: &RootIsolation) -> Option<Self> {
        (!iso.is_empty()).then(|| Self::root(iso, iso.len() - 1))
    }

    pub fn affine(mut self, a: BigRational, b: BigRational) -> Self {
        assert!(a.is_positive());
        self.b = &a * &self.b + b;
        self.a *= a;
        self
    }

    pub fn value(&self) -> RootValue {
        let base = match (&self.exact, &self.iso) {
            (Some(v), _) => RootValue::Exact(v.clone()),
            (None, Some((iso, idx))) => iso.roots()[*idx].value(),
            (None, None) => unreachable!(),
        };
        base.affine(&self.a, &self.b)
    }

    fn width(&self) -> BigRational {
        let v = self.value();
        v.upper() - v.lower()
    }

    fn refine(&mut self, floor: &BigRational) -> bool {
        if self.width() <= *floor {
            return false;
        }
        match &mut self.iso {
            Some((iso, idx)) => iso.bisect(*idx),
            None => false,
        }
    }
}

/// Certified x <= y, refining the wider side until decided or both are
/// narrower than `floor`.
pub fn certified_le(x: &mut CertReal, y: &mut CertReal, floor: &BigRational) -> Option<bool> {
    loop {
        let (vx, vy) = (x.value(), y.value());
        if vx.upper() <= vy.lower() {
            return Some(true);
        }
        if vx.lower() >= vy.upper() {
            return Some(false);
        }
        let (wide, narrow) = if x.width() >= y.width() {
            (&mut *x, &mut *y)
        } else {
            (&mut *y, &mut *x)
        };
        if !(wide.refine(floor) || narrow.refine(floor)) {
            return None;
        }
    }
}

fn building_params(inst: &Instance) -> Option<(usize, u64)> {
    match inst.source {
        Source::Building { ell, q } => Some((ell, q)),
        Source::Complex { .. } => None,
    }
}

/// M^i = ell + 1: exact root and no larger real root.
pub fn verify_max_eigenvalue(s: &InstanceSpectrum, ell: usize) -> Verdict {
    let p = &s.report.minpoly;
    let target = int(ell as i64 + 1);
    let is_root = p.eval(&target).is_zero();
    let above = SturmSequence::new(p).count_above(&target);
    Verdict::new(
        "max-eigenvalue",
        &s.instance,
        format!("M^{} = {}", s.instance.i, ell + 1),
        Status::from_option(Some(is_root && above == 0)),
    )
    .with("M", &s.report.big_m)
    .with("p(l+1)", fmt_rational(&p.eval(&target)))
    .with("roots_above", above)
}

/// m^i <= ell - i.
pub fn verify_min_bound(s: &InstanceSpectrum, ell: usize, floor: &BigRational) -> Verdict {
    let i = s.instance.i;
    let bound = int(ell as i64 - i as i64);
    let iso = &s.report.isolation;
    let exact_hit = bound.is_positive() && iso.poly().eval(&bound).is_zero();
    let status = if exact_hit {
        Some(true)
    } else {
        let mut m = CertReal::min_nonzero(iso).expect("spectral reports have a nonzero root");
        certified_le(&mut m, &mut CertReal::exact(bound.clone()), floor)
    };
    Verdict::new(
        "min-bound",
        &s.instance,
        format!("m^{i} <= {}", fmt_rational(&bound)),
        Status::from_option(status),
    )
    .with("m", &s.report.m)
    .with("l-i_is_root", exact_hit)
}

/// ell+1, ell, ..., ell-i+1 are eigenvalues; also records whether ell-i is.
pub fn verify_integer_eigenvalues(s: &InstanceSpectrum, ell: usize) -> Verdict {
    let i = s.instance.i as i64;
    let ell = ell as i64;
    let p = &s.report.minpoly;
    let mut v = Verdict::new(
        "integer-eigenvalues",
        &s.instance,
        format!("{}..={} are eigenvalues", ell - i + 1, ell + 1),
        Status::CertifiedTrue,
    );
    for k in (ell - i..=ell + 1).rev() {
        let root = p.eval(&int(k)).is_zero();
        if k > ell - i && !root {
            v.status = Status::CertifiedFalse;
        }
        v = v.with(&format!("p({k})=0"), root);
    }
    v
}

/// Compares the computed minimal polynomial with the published one.
pub fn reproduce_published_polynomial(
    s: &InstanceSpectrum,
) -> Result<(Verdict, PublishedComparison), HarnessError> {
    let (ell, q) = building_params(&s.instance).ok_or(HarnessError::UnknownPublishedInstance {
        ell: 0,
        q: 0,
        i: s.instance.i,
    })?;
    let published = published_polynomial(ell, q, s.instance.i)?;
    let cmp = PublishedComparison::new(published, s.report.minpoly.clone());
    let mut v = Verdict::new(
        "published-polynomial",
        &s.instance,
        "computed minimal polynomial equals the published one".into(),
        Status::from_option(Some(cmp.matches())),
    )
    .with("published", &cmp.published)
    .with("computed", &cmp.computed);
    if let Some(d) = cmp.describe_difference() {
        v = v.with("first_difference", d);
    }
    Ok((v, cmp))
}

/// Hypothesis of the vanishing criterion for H^i: m^{i-1} > (ell+1-i)/(i+1),
/// evaluated on the spectrum of degree i-1.
pub fn verify_vanishing_threshold(
    s: &InstanceSpectrum,
    ell: usize,
    floor: &BigRational,
) -> Verdict {
    let i = s.instance.i + 1;
    let threshold = BigRational::new((ell as i64 + 1 - i as i64).into(), (i as i64 + 1).into());
    let mut m = CertReal::min_nonzero(&s.report.isolation).expect("nonzero root");
    let le = certified_le(&mut m, &mut CertReal::exact(threshold.clone()), floor);
    let inst = Instance {
        source: s.instance.source.clone(),
        i,
    };
    Verdict::new(
        "vanishing-threshold",
        &inst,
        format!(
            "hypothesis check: m^{} > {}",
            i - 1,
            fmt_rational(&threshold)
        ),
        Status::from_option(le.map(|x| !x)),
    )
    .with("m", m.value())
    .with("threshold", fmt_rational(&threshold))
}

/// Spectrum of one vertex link in degree i-1.
#[derive(Debug, Clone)]
pub struct LinkSpectrum {
    pub vertex: u32,
    pub isolation: RootIsolation,
    pub m: RootValue,
    pub big_m: RootValue,
    pub cohomology_vanishes: bool,
}

/// Vertices whose links must be examined: one per automorphism orbit for
/// buildings, all vertices otherwise.
fn link_vertices(session: &Session, source: &Source) -> Result<Vec<u32>, HarnessError> {
    let held = session.complex(source)?;
    match held.building() {
        Some(b) => Ok(b
            .simplex_orbit_representatives(0)?
            .into_iter()
            .map(|k| b.complex.simplex(0, k)[0])
            .collect()),
        None => Ok(held.complex().vertex_ids().to_vec()),
    }
}

pub fn link_spectra(
    session: &Session,
    source: &Source,
    degree: usize,
) -> Result<Vec<LinkSpectrum>, HarnessError> {
    let held = session.complex(source)?;
    let c: &Complex = held.complex();
    let mut memo: BTreeMap<String, (RootIsolation, RootValue, RootValue, bool)> = BTreeMap::new();
    let mut out = Vec::new();
    for v in link_vertices(session, source)? {
        let link = c.link(&Simplex::new(vec![v])?)?;
        let key = link.complex.to_text();
        if !memo.contains_key(&key) {
            let lc = &link.complex;
            let m = assemble_matrix(lc, degree)?;
            let p = minimal_polynomial(&m, m.rows(), session.config().seed)?;
            let rep = summarize(
                String::new(),
                degree,
                m.rows(),
                p,
                MinpolyStats::default(),
                &session.config().width,
                None,
            )?;
            let h = reduced_cohomology_vanishes(lc, degree);
            memo.insert(key.clone(), (rep.isolation, rep.m, rep.big_m, h));
        }
        let (isolation, m, big_m, h) = memo[&key].clone();
        out.push(LinkSpectrum {
            vertex: v,
            isolation,
            m,
            big_m,
            cohomology_vanishes: h,
        });
    }
    Ok(out)
}

/// Index of the link whose value is largest (or smallest) by midpoint;
/// used only to pick what to report.
fn extreme_by_midpoint(links: &[LinkSpectrum], max: bool) -> usize {
    let key = |l: &LinkSpectrum| {
        if max {
            l.big_m.midpoint()
        } else {
            l.m.midpoint()
        }
    };
    let mut best = 0;
    for (k, l) in links.iter().enumerate() {
        let better = if max {
            key(l) > key(&links[best])
        } else {
            key(l) < key(&links[best])
        };
        if better {
            best = k;
        }
    }
    best
}

/// Upper and lower two-sided bounds relating the spectrum on C^i to the
/// extremal link spectra on C^{i-1}:
/// i M^i <= (i+1) lmax - (n-i) and, when every link has vanishing reduced
/// cohomology in degree i-1, i m^i >= (i+1) lmin - (n-i). On buildings also
/// checks M^i >= lmax and m^i <= lmin; those fail on general complexes (the
/// 3-simplex has m^1 = 4 while its links have lmin^0 = 3).
pub fn verify_fundamental_inequality(
    session: &Session,
    inst: &Instance,
) -> Result<Vec<Verdict>, HarnessError> {
    let i = inst.i;
    assert!(i >= 1, "the link inequalities need i >= 1");
    let s = session.spectrum(inst)?;
    let n = session.complex(&inst.source)?.complex().dim() as i64;
    let links = link_spectra(session, &inst.source, i - 1)?;
    let floor = session.config().floor.clone();
    let ii = int(i as i64);
    let i1 = int(i as i64 + 1);
    let shift = int(-(n - i as i64));
    let iso = &s.report.isolation;
    let big = CertReal::max_root(iso).unwrap();
    let small = CertReal::min_nonzero(iso).unwrap();

    // lmax >= M_v for each v, so one certified link suffices for "true"
    // and every link must fail for "false"; dually for lmin.
    let decide = |f: &mut dyn FnMut(&LinkSpectrum) -> Option<bool>| -> Option<bool> {
        let mut all_false = true;
        for l in &links {
            match f(l) {
                Some(true) => return Some(true),
                Some(false) => {}
                None => all_false = false,
            }
        }
        all_false.then_some(false)
    };
    let link_max = |l: &LinkSpectrum| CertReal::max_root(&l.isolation).unwrap();
    let link_min = |l: &LinkSpectrum| CertReal::min_nonzero(&l.isolation).unwrap();

    let upper = decide(&mut |l| {
        let mut lhs = big.clone().affine(ii.clone(), int(0));
        let mut rhs = link_max(l).affine(i1.clone(), shift.clone());
        certified_le(&mut lhs, &mut rhs, &floor)
    });
    let hyp = links.iter().all(|l| l.cohomology_vanishes);
    let lower = decide(&mut |l| {
        let mut lhs = link_min(l).affine(i1.clone(), shift.clone());
        let mut rhs = small.clone().affine(ii.clone(), int(0));
        certified_le(&mut lhs, &mut rhs, &floor)
    });
    let lifted_max = decide(&mut |l| certified_le(&mut link_max(l), &mut big.clone(), &floor));
    let lifted_min = decide(&mut |l| certified_le(&mut small.clone(), &mut link_min(l), &floor));

    let lmax = &links[extreme_by_midpoint(&links, true)];
    let lmin = &links[extreme_by_midpoint(&links, false)];
    let lhs_u = big.clone().affine(ii.clone(), int(0)).value();
    let rhs_u = link_max(lmax).affine(i1.clone(), shift.clone()).value();
    let lhs_l = small.clone().affine(ii.clone(), int(0)).value();
    let rhs_l = link_min(lmin).affine(i1.clone(), shift.clone()).value();

    let mut out = vec![Verdict::new(
        "link-inequality-upper",
        inst,
        format!("{i}*M^{i} <= {}*lmax^{} - {}", i + 1, i - 1, n - i as i64),
        Status::from_option(upper),
    )
    .with("i*M", &lhs_u)
    .with("rhs", &rhs_u)
    .with("lmax", &lmax.big_m)
    .with(
        "margin_lower",
        fmt_rational(&(rhs_u.lower() - lhs_u.upper())),
    )];
    if hyp {
        out.push(
            Verdict::new(
                "link-inequality-lower",
                inst,
                format!("{i}*m^{i} >= {}*lmin^{} - {}", i + 1, i - 1, n - i as i64),
                Status::from_option(lower),
            )
            .with("i*m", &lhs_l)
            .with("rhs", &rhs_l)
            .with("lmin", &lmin.m)
            .with(
                "margin_lower",
                fmt_rational(&(lhs_l.lower() - rhs_l.upper())),
            ),
        );
    }
    if matches!(inst.source, Source::Building { .. }) {
        out.push(
            Verdict::new(
                "lifted-max",
                inst,
                format!("M^{i} >= lmax^{}", i - 1),
                Status::from_option(lifted_max),
            )
            .with("M", &s.report.big_m)
            .with("lmax", &lmax.big_m),
        );
        out.push(
            Verdict::new(
                "lifted-min",
                inst,
                format!("m^{i} <= lmin^{}", i - 1),
                Status::from_option(lifted_min),
            )
            .with("m", &s.report.m)
            .with("lmin", &lmin.m),
        );
    }
    for v in out.iter_mut() {
        v.witness
            .insert("link_cohomology_vanishes".into(), hyp.to_string());
    }
    Ok(out)
}

/// One row of the distance-to-integers table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjectureRow {
    pub root: String,
    pub nearest: i64,
    pub distance: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjectureReport {
    pub rows: Vec<ConjectureRow>,
    /// Largest distance over all nonzero roots, as an interval or exact value.
    pub epsilon: String,
    pub epsilon_approx: f64,
}

/// Distance of each nonzero root to the nearest integer in [ell-i, ell+1].
pub fn conjecture_report(s: &InstanceSpectrum, ell: usize) -> ConjectureReport {
    let i = s.instance.i as i64;
    let (lo_k, hi_k) = (ell as i64 - i, ell as i64 + 1);
    let mut rows = Vec::new();
    let mut eps = RootValue::Exact(int(0));
    for r in s.report.isolation.roots().iter().filter(|r| !r.is_zero()) {
        let v = r.value();
        let mid = v.midpoint();
        let nearest = (lo_k..=hi_k)
            .min_by_key(|&k| (&mid - int(k)).abs())
            .expect("nonempty range");
        let k = int(nearest);
        let d = match &v {
            RootValue::Exact(x) => RootValue::Exact((x - &k).abs()),
            RootValue::Interval { lo, hi } => {
                let (a, b) = ((lo - &k).abs(), (hi - &k).abs());
                if lo < &k && &k < hi {
                    RootValue::Interval {
                        lo: int(0),
                        hi: a.max(b),
                    }
                } else {
                    RootValue::Interval {
                        lo: a.clone().min(b.clone()),
                        hi: a.max(b),
                    }
                }
            }
        };
        if d.upper() > eps.upper() {
            eps = d.clone();
        }
        rows.push(ConjectureRow {
            root: v.to_string(),
            nearest,
            distance: d.to_string(),
        });
    }
    ConjectureReport {
        rows,
        epsilon: eps.to_string(),
        epsilon_approx: eps.to_f64(),
    }
}

/// Every check that applies to a building instance, including the
/// vanishing hypothesis for degree i+1.
pub fn building_verdicts(session: &Session, inst: &Instance) -> Result<Vec<Verdict>, HarnessError> {
    let (ell, q) = building_params(inst).expect("building instance");
    let s = session.spectrum(inst)?;
    let floor = session.config().floor.clone();
    let mut out = vec![
        verify_max_eigenvalue(&s, ell),
        verify_min_bound(&s, ell, &floor),
        verify_integer_eigenvalues(&s, ell),
    ];
    if inst.i >= 1 {
        out.extend(verify_fundamental_inequality(session, inst)?);
    }
    if inst.i < ell {
        out.push(verify_vanishing_threshold(&s, ell, &floor));
    }
    if published_polynomial(ell, q, inst.i).is_ok() {
        out.push(reproduce_published_polynomial(&s)?.0);
    }
    Ok(out)
}

/// Checks that apply to an arbitrary complex.
pub fn complex_verdicts(session: &Session, inst: &Instance) -> Result<Vec<Verdict>, HarnessError> {
    if inst.i >= 1 && session.complex(&inst.source)?.complex().dim() >= 2 {
        verify_fundamental_inequality(session, inst)
    } else {
        Ok(Vec::new())
    }
}
