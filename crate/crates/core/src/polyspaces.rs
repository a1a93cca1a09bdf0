//! Homology of `Poly^{d,m}_n`, of based rational maps `Hol*_d(S², ℂP^{N-1})`,
//! and of `Ω²S^{2N-1}`, assembled from the stable splitting into shifted
//! Snaith summands `D_k`.
//!
//! Integral answers always come from the splitting. The E¹ pages of the
//! discriminant spectral sequences are built for bookkeeping and checked
//! against the splitting only rank-wise over fields.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use crate::braid::{BraidEngine, CoefficientSystem};
use crate::error::{Error, Result};
use crate::exactalg::{AbelianGroup, GradedAbelianGroup, Ring};

/// Parameters `(d, m, n)` of `Poly^{d,m}_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Params {
    d: u32,
    m: u32,
    n: u32,
}

impl Params {
    pub fn new(d: u32, m: u32, n: u32) -> Result<Self> {
        if d < 1 || m < 1 || n < 1 {
            return Err(Error::InvalidParameter(format!("need d, m, n >= 1, got ({d}, {m}, {n})")));
        }
        if (m, n) == (1, 1) {
            return Err(Error::InvalidParameter("(m, n) = (1, 1) is excluded".into()));
        }
        Ok(Params { d, m, n })
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn mn(&self) -> u32 {
        self.m * self.n
    }

    /// `⌊d/n⌋`, the number of splitting summands.
    pub fn summands(&self) -> u32 {
        self.d / self.n
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(d,m,n)=({},{},{})", self.d, self.m, self.n)
    }
}

/// Parameters `(d, N)` of `Hol*_d(S², ℂP^{N-1})`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HolParams {
    d: u32,
    target: u32,
}

impl HolParams {
    pub fn new(d: u32, target: u32) -> Result<Self> {
        if target < 2 {
            return Err(Error::InvalidParameter(format!("need N >= 2, got {target}")));
        }
        Ok(HolParams { d, target })
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn target(&self) -> u32 {
        self.target
    }
}

impl fmt::Display for HolParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(d,N)=({},{})", self.d, self.target)
    }
}

/// Which discriminant spectral sequence an E¹ page belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Space {
    Poly(Params),
    Hol(HolParams),
}

impl Space {
    /// Largest filtration index `k` with a nonzero column.
    fn k_top(&self) -> u32 {
        match self {
            Space::Poly(p) => p.summands(),
            Space::Hol(h) => h.d,
        }
    }

    /// `N` with `s ≥ 2(N-1)k` bounding the support; `mn` for the poly flavor.
    fn weight(&self) -> u32 {
        match self {
            Space::Poly(p) => p.mn(),
            Space::Hol(h) => h.target,
        }
    }
}

/// `D(d;m,n) = (2mn-3)(⌊d/n⌋+1) - 1`.
pub fn stability_dimension(p: &Params) -> i64 {
    (2 * p.mn() as i64 - 3) * (p.summands() as i64 + 1) - 1
}

/// Rank of the affine bundle over `C_k(ℂ)` in the `k`-th filtration stratum:
/// `2m(d-nk)+k-1` for Poly, `2N(d-k)+k-1` for Hol.
pub fn bundle_rank(space: &Space, k: u32) -> Result<i64> {
    let top = space.k_top();
    if k < 1 || k > top {
        return Err(Error::InvalidParameter(format!("k = {k} outside 1..={top}")));
    }
    let k = k as i64;
    Ok(match space {
        Space::Poly(p) => 2 * p.m as i64 * (p.d as i64 - p.n as i64 * k) + k - 1,
        Space::Hol(h) => 2 * h.target as i64 * (h.d as i64 - k) + k - 1,
    })
}

/// How far a table or series is known to be exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Exactness {
    /// Every degree is determined; unlisted degrees are zero.
    Complete,
    /// Exact in degrees `0..=bound`.
    Through(i64),
}

/// Unreduced homology of a connected space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomologyTable {
    pub ring: Ring,
    pub groups: GradedAbelianGroup,
    pub exactness: Exactness,
    pub notes: Vec<String>,
}

impl HomologyTable {
    fn from_reduced(ring: Ring, reduced: GradedAbelianGroup, notes: Vec<String>) -> Self {
        let mut groups = reduced;
        let bottom = groups.get(0).direct_sum(&AbelianGroup::free(1));
        groups.set(0, bottom);
        HomologyTable { ring, groups, exactness: Exactness::Complete, notes }
    }

    fn point(ring: Ring, note: &str) -> Self {
        Self::from_reduced(ring, GradedAbelianGroup::new(), vec![note.to_string()])
    }

    pub fn get(&self, degree: i64) -> AbelianGroup {
        self.groups.get(degree)
    }

    pub fn dimension(&self, degree: i64) -> usize {
        self.groups.dimension(degree)
    }
}

/// `⊕_{k=1}^{top} H̃_{*-2(N-2)k}(D_k; ring)`.
fn splitting_sum(engine: &BraidEngine, top: u32, target: u32, ring: Ring) -> Result<GradedAbelianGroup> {
    if top > engine.k_max() {
        return Err(Error::OutOfRange { k: top, k_max: engine.k_max() });
    }
    let shift = 2 * (target as i64 - 2);
    let summands: Vec<GradedAbelianGroup> = (1..=top)
        .into_par_iter()
        .map(|k| Ok(engine.dk_homology(k, ring)?.shifted(shift * k as i64)))
        .collect::<Result<_>>()?;
    Ok(summands.iter().fold(GradedAbelianGroup::new(), |acc, s| acc.direct_sum(s)))
}

pub fn poly_homology(engine: &BraidEngine, p: &Params, ring: Ring) -> Result<HomologyTable> {
    if p.d < p.n {
        return Ok(HomologyTable::point(ring, "d < n: the space is an affine space"));
    }
    let reduced = splitting_sum(engine, p.summands(), p.mn(), ring)?;
    let mut notes = vec![format!(
        "stable splitting: wedge of suspensions Sigma^(2(mn-2)k) D_k for k = 1..{}",
        p.summands()
    )];
    if p.mn() == 2 {
        notes.push("mn = 2: stable/homology-level only; homotopy-level stability needs mn >= 3".into());
    }
    Ok(HomologyTable::from_reduced(ring, reduced, notes))
}

pub fn hol_homology(engine: &BraidEngine, h: &HolParams, ring: Ring) -> Result<HomologyTable> {
    if h.d == 0 {
        return Ok(HomologyTable::point(ring, "d = 0: empty wedge"));
    }
    let reduced = splitting_sum(engine, h.d, h.target, ring)?;
    let notes = vec![format!("stable splitting: wedge of suspensions Sigma^(2(N-2)k) D_k for k = 1..{}", h.d)];
    Ok(HomologyTable::from_reduced(ring, reduced, notes))
}

#[derive(Debug, Clone)]
pub struct PolyHolReport {
    pub params: Params,
    pub hol: HolParams,
    pub poly_table: HomologyTable,
    pub hol_table: HomologyTable,
    pub equal: bool,
}

/// Compares `Poly^{d,m}_n` with `Hol*_{⌊d/n⌋}(S², ℂP^{mn-1})` degree by degree.
pub fn theorem4_check(engine: &BraidEngine, p: &Params, ring: Ring) -> Result<PolyHolReport> {
    let hol = HolParams::new(p.summands(), p.mn())?;
    let poly_table = poly_homology(engine, p, ring)?;
    let hol_table = hol_homology(engine, &hol, ring)?;
    let equal = poly_table.groups == hol_table.groups;
    Ok(PolyHolReport { params: *p, hol, poly_table, hol_table, equal })
}

/// E¹ page of a discriminant spectral sequence converging to `H_{s-k}`.
#[derive(Debug, Clone)]
pub struct E1Page {
    pub space: Space,
    pub ring: Ring,
    entries: BTreeMap<(u32, i64), AbelianGroup>,
}

impl E1Page {
    pub fn get(&self, k: u32, s: i64) -> AbelianGroup {
        self.entries.get(&(k, s)).cloned().unwrap_or_default()
    }

    /// Nonzero entries in `(k, s)` order.
    pub fn entries(&self) -> impl Iterator<Item = ((u32, i64), &AbelianGroup)> {
        self.entries.iter().map(|(key, g)| (*key, g))
    }

    /// Whether `(k, s)` may carry a nonzero entry.
    pub fn in_support(&self, k: u32, s: i64) -> bool {
        (k, s) == (0, 0)
            || (1..=self.space.k_top()).contains(&k) && s >= 2 * (self.space.weight() as i64 - 1) * k as i64
    }

    /// Total dimension on the antidiagonal `s - k = j`.
    pub fn antidiagonal_dimension(&self, j: i64) -> usize {
        self.entries
            .iter()
            .filter(|((k, s), _)| s - *k as i64 == j)
            .map(|(_, g)| g.free_rank + g.torsion.len())
            .sum()
    }
}

pub fn e1_page(engine: &BraidEngine, space: &Space, ring: Ring) -> Result<E1Page> {
    let top = space.k_top();
    if top > engine.k_max() {
        return Err(Error::OutOfRange { k: top, k_max: engine.k_max() });
    }
    let mut entries = BTreeMap::new();
    entries.insert((0, 0), AbelianGroup::free(1));
    let offset = 2 * (space.weight() as i64 - 1);
    for k in 1..=top {
        let h = engine.config_homology(k, CoefficientSystem::Sign, ring)?;
        for (i, g) in h.iter() {
            entries.insert((k, i + offset * k as i64), g.clone());
        }
    }
    Ok(E1Page { space: *space, ring, entries })
}

/// Dimensions of field homology by degree, `coefficients[j] = dim H_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoincareSeries {
    pub coefficients: Vec<u64>,
}

impl PoincareSeries {
    pub fn through(&self) -> i64 {
        self.coefficients.len() as i64 - 1
    }

    pub fn coefficient(&self, degree: i64) -> u64 {
        usize::try_from(degree).ok().and_then(|d| self.coefficients.get(d)).copied().unwrap_or(0)
    }
}

/// Highest degree at which `Ω²S^{2N-1}` is determined by the summands
/// `k ≤ k_max`: summand `k` starts in degree `(2N-3)k`.
pub fn omega_exactness_bound(target: u32, k_max: u32) -> i64 {
    (2 * target as i64 - 3) * (k_max as i64 + 1) - 1
}

/// Field Poincaré series of `Ω²S^{2N-1}` through `through`, as
/// `Σ_{k≥0} dim H̃_{j-2(N-2)k}(D_k)`.
pub fn omega_series(engine: &BraidEngine, target: u32, ring: Ring, through: i64) -> Result<PoincareSeries> {
    if target < 2 {
        return Err(Error::InvalidParameter(format!("need N >= 2, got {target}")));
    }
    if !ring.is_field() {
        return Err(Error::InvalidParameter("Poincare series need a field".into()));
    }
    let bound = omega_exactness_bound(target, engine.k_max());
    if through > bound {
        return Err(Error::BeyondExactness { requested: through, bound });
    }
    if through < 0 {
        return Err(Error::InvalidParameter(format!("negative degree {through}")));
    }
    let mut coefficients = vec![0u64; through as usize + 1];
    coefficients[0] = 1;
    let k_top = (through / (2 * target as i64 - 3)) as u32;
    let shift = 2 * (target as i64 - 2);
    let summands: Vec<GradedAbelianGroup> = (1..=k_top)
        .into_par_iter()
        .map(|k| Ok(engine.dk_homology(k, ring)?.shifted(shift * k as i64)))
        .collect::<Result<_>>()?;
    for s in &summands {
        for (j, c) in coefficients.iter_mut().enumerate() {
            *c += s.dimension(j as i64) as u64;
        }
    }
    Ok(PoincareSeries { coefficients })
}

#[derive(Debug, Clone)]
pub struct StableRangeReport {
    pub params: Params,
    pub stability_dimension: i64,
    /// Field dimensions of `Poly^{d,m}_n` and `Ω²S^{2mn-1}` agree in degrees `≤ D`.
    pub agrees_through_stability_dimension: bool,
    /// `(2mn-3)(⌊d/n⌋+1)`, where the first omitted summand starts.
    pub first_possible_deviation: i64,
    /// Bottom degree of the first omitted summand, read off its integral homology.
    pub omitted_summand_bottom: i64,
    /// First degree `≤ D+1` where the two field series differ, if any.
    pub observed_deviation: Option<i64>,
    /// Comparison with `d + 1` when `⌊d/n⌋ = ⌊(d+1)/n⌋`.
    pub plateau_equal: Option<bool>,
}

impl StableRangeReport {
    pub fn passed(&self) -> bool {
        self.agrees_through_stability_dimension
            && self.first_possible_deviation == self.stability_dimension + 1
            && self.omitted_summand_bottom == self.first_possible_deviation
            && self.observed_deviation.map_or(true, |j| j == self.first_possible_deviation)
            && self.plateau_equal != Some(false)
    }
}

pub fn stable_range_check(engine: &BraidEngine, p: &Params, ring: Ring) -> Result<StableRangeReport> {
    let dim = stability_dimension(p);
    let table = poly_homology(engine, p, ring)?;
    let series = omega_series(engine, p.mn(), ring, dim + 1)?;
    let agrees = (0..=dim).all(|j| table.dimension(j) as u64 == series.coefficient(j));
    let observed_deviation = (0..=dim + 1).find(|&j| table.dimension(j) as u64 != series.coefficient(j));
    let omitted = p.summands() + 1;
    let omitted_summand_bottom = engine
        .dk_homology(omitted, Ring::Integers)?
        .shifted(2 * (p.mn() as i64 - 2) * omitted as i64)
        .bottom_degree()
        .expect("D_k has nonzero integral homology");
    let next = Params::new(p.d + 1, p.m, p.n)?;
    let plateau_equal = (next.summands() == p.summands())
        .then(|| poly_homology(engine, &next, ring).map(|t| t.groups == table.groups))
        .transpose()?;
    Ok(StableRangeReport {
        params: *p,
        stability_dimension: dim,
        agrees_through_stability_dimension: agrees,
        first_possible_deviation: (2 * p.mn() as i64 - 3) * omitted as i64,
        omitted_summand_bottom,
        observed_deviation,
        plateau_equal,
    })
}
