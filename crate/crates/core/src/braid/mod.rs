//! Homology of unordered configuration spaces `C_k(ℂ)` with trivial or sign
//! coefficients, from the Fox–Neuwirth cell structure on the one-point
//! compactification.
//!
//! A cell is a composition `(a_1, …, a_r)` of `k`: points lie on `r` vertical
//! lines with `a_i` points on the `i`-th line, giving a cell of dimension
//! `k + r`. The cellular boundary merges adjacent lines. The incidence number
//! for merging blocks of sizes `a` and `b` is a sum over the `(a, b)`-shuffles
//! recording how the two columns of points interleave: each shuffle carries
//! its permutation sign from the orientation change, and under the sign
//! system a second copy of the same sign from the monodromy. So the trivial
//! system uses `Σ sgn(σ)` (a Gaussian binomial at `q = -1`) and the sign
//! system uses the plain count `binom(a + b, a)`.
//!
//! This complex computes compactly supported cohomology; Poincaré duality on
//! the oriented `2k`-manifold `C_k(ℂ)` turns `H^{2k-j}_c` into `H_j`.

mod cache;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactalg::{homology_unchecked, ChainComplex, GradedAbelianGroup, IntMatrix, Ring};

pub use cache::{CacheStats, HomologyCache, CACHE_FORMAT_VERSION};

/// Default upper bound on `k` for the cell model.
pub const DEFAULT_K_MAX: u32 = 10;

/// A composition of `k`, i.e. a Fox–Neuwirth cell of `C_k(ℂ)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Composition {
    parts: Vec<u32>,
}

impl Composition {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.is_empty() || parts.contains(&0) {
            return Err(Error::InvalidParameter(format!("{parts:?} is not a composition")));
        }
        Ok(Composition { parts })
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn k(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn r(&self) -> u32 {
        self.parts.len() as u32
    }

    pub fn cell_dimension(&self) -> u32 {
        self.k() + self.r()
    }

    /// Merges blocks `i` and `i + 1`.
    fn merged(&self, i: usize) -> Composition {
        let mut parts = self.parts.clone();
        let b = parts.remove(i + 1);
        parts[i] += b;
        Composition { parts }
    }

    /// Decodes the composition whose cut points `1..k` are the set bits of `mask`.
    fn from_cuts(k: u32, mask: u32) -> Composition {
        let mut parts = Vec::new();
        let mut last = 0;
        for pos in 1..k {
            if mask >> (pos - 1) & 1 == 1 {
                parts.push(pos - last);
                last = pos;
            }
        }
        parts.push(k - last);
        Composition { parts }
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.parts.iter().map(u32::to_string).collect();
        write!(f, "({})", s.join(","))
    }
}

/// Rank-one coefficient system on `C_k(ℂ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CoefficientSystem {
    Trivial,
    /// Each point swap acts by −1.
    Sign,
}

impl CoefficientSystem {
    pub fn tag(self) -> &'static str {
        match self {
            CoefficientSystem::Trivial => "trivial",
            CoefficientSystem::Sign => "sign",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "trivial" => Ok(CoefficientSystem::Trivial),
            "sign" => Ok(CoefficientSystem::Sign),
            _ => Err(Error::Parse(format!("unknown coefficient system `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BraidHomologyKey {
    pub k: u32,
    pub coeff: CoefficientSystem,
    pub ring: Ring,
}

impl BraidHomologyKey {
    pub fn canonical(&self) -> String {
        format!("k={} coeff={} ring={}", self.k, self.coeff.tag(), self.ring.tag())
    }
}

fn check_range(k: u32, k_max: u32) -> Result<()> {
    if k == 0 || k > k_max {
        Err(Error::OutOfRange { k, k_max })
    } else {
        Ok(())
    }
}

/// All `2^{k-1}` compositions of `k`, keyed by cell dimension `k + r`, each
/// list in lexicographic order.
pub fn enumerate_cells(k: u32, k_max: u32) -> Result<BTreeMap<u32, Vec<Composition>>> {
    check_range(k, k_max)?;
    if k > 31 {
        return Err(Error::OutOfRange { k, k_max: 31 });
    }
    let mut cells: BTreeMap<u32, Vec<Composition>> = BTreeMap::new();
    for mask in 0..1u32 << (k - 1) {
        let c = Composition::from_cuts(k, mask);
        cells.entry(c.cell_dimension()).or_default().push(c);
    }
    for list in cells.values_mut() {
        list.sort();
    }
    Ok(cells)
}

/// Incidence number for merging blocks of sizes `a` and `b`.
pub fn merge_coefficient(a: u32, b: u32, coeff: CoefficientSystem) -> BigInt {
    match coeff {
        CoefficientSystem::Sign => binomial(a + b, a),
        CoefficientSystem::Trivial => gaussian_binomial_at_minus_one(a + b, a),
    }
}

fn binomial(n: u32, k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// `[n choose k]_q` at `q = -1`: zero when `n` is even and `k` odd, else
/// `binom(⌊n/2⌋, ⌊k/2⌋)`.
fn gaussian_binomial_at_minus_one(n: u32, k: u32) -> BigInt {
    if k > n {
        BigInt::zero()
    } else if n % 2 == 0 && k % 2 == 1 {
        BigInt::zero()
    } else {
        binomial(n / 2, k / 2)
    }
}

/// Cellular chain complex of the one-point compactification of `C_k(ℂ)`
/// relative to the point at infinity, in degrees `k+1 ..= 2k`.
pub fn build_fn_complex(k: u32, coeff: CoefficientSystem, k_max: u32) -> Result<ChainComplex> {
    let cells = enumerate_cells(k, k_max)?;
    let index: HashMap<&Composition, usize> =
        cells.values().flat_map(|list| list.iter().enumerate().map(|(i, c)| (c, i))).collect();
    let counts: Vec<usize> = (1..=k).map(|r| cells[&(k + r)].len()).collect();
    let mut boundaries = Vec::with_capacity(k as usize - 1);
    for r in 2..=k {
        let source = &cells[&(k + r)];
        let target = &cells[&(k + r - 1)];
        let mut m = IntMatrix::zeros(target.len(), source.len());
        for (col, cell) in source.iter().enumerate() {
            for i in 0..cell.parts.len() - 1 {
                let c = merge_coefficient(cell.parts[i], cell.parts[i + 1], coeff);
                if c.is_zero() {
                    continue;
                }
                let row = index[&cell.merged(i)];
                let signed = if i % 2 == 0 { c } else { -c };
                let v = m.get(row, col) + signed;
                m.set(row, col, v);
            }
        }
        boundaries.push(m);
    }
    let complex = ChainComplex::new(k as i64 + 1, counts, boundaries)?;
    complex.check_square_zero()?;
    Ok(complex)
}

/// Computes braid homology on demand, memoized in process and optionally
/// persisted through a [`HomologyCache`].
pub struct BraidEngine {
    k_max: u32,
    cache: Option<HomologyCache>,
    memo: Mutex<HashMap<BraidHomologyKey, GradedAbelianGroup>>,
}

impl Default for BraidEngine {
    fn default() -> Self {
        Self::new(DEFAULT_K_MAX)
    }
}

impl BraidEngine {
    pub fn new(k_max: u32) -> Self {
        BraidEngine { k_max, cache: None, memo: Mutex::new(HashMap::new()) }
    }

    pub fn with_cache(mut self, cache: HomologyCache) -> Self {
        self.cache = Some(cache);
        self
    }

    pub fn k_max(&self) -> u32 {
        self.k_max
    }

    pub fn cache(&self) -> Option<&HomologyCache> {
        self.cache.as_ref()
    }

    /// `H_*(C_k(ℂ); L ⊗ ring)`.
    pub fn config_homology(&self, k: u32, coeff: CoefficientSystem, ring: Ring) -> Result<GradedAbelianGroup> {
        check_range(k, self.k_max)?;
        let key = BraidHomologyKey { k, coeff, ring };
        if let Some(h) = self.memo.lock().expect("memo poisoned").get(&key) {
            return Ok(h.clone());
        }
        if let Some(h) = self.cache.as_ref().and_then(|c| c.get(&key)) {
            self.memo.lock().expect("memo poisoned").insert(key, h.clone());
            return Ok(h);
        }
        let h = compute_config_homology(k, coeff, ring, self.k_max)?;
        if let Some(cache) = &self.cache {
            if let Err(e) = cache.put(&key, &h) {
                log::warn!("could not write cache entry {}: {e}", key.canonical());
            }
        }
        self.memo.lock().expect("memo poisoned").insert(key, h.clone());
        Ok(h)
    }

    /// Reduced homology of `D_k = F(ℂ,k)_+ ∧_{S_k} (S¹)^{∧k}`:
    /// `H̃_q(D_k) = H_{q-k}(C_k(ℂ); ±ring)`.
    pub fn dk_homology(&self, k: u32, ring: Ring) -> Result<GradedAbelianGroup> {
        Ok(self.config_homology(k, CoefficientSystem::Sign, ring)?.shifted(k as i64))
    }
}

fn compute_config_homology(k: u32, coeff: CoefficientSystem, ring: Ring, k_max: u32) -> Result<GradedAbelianGroup> {
    let cells = build_fn_complex(k, coeff, k_max)?;
    Ok(homology_unchecked(&cells.dual(2 * k as i64), ring))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{complex_homology, AbelianGroup};

    const Z: Ring = Ring::Integers;

    fn parts(c: &[Composition]) -> Vec<Vec<u32>> {
        c.iter().map(|c| c.parts().to_vec()).collect()
    }

    #[test]
    fn small_cell_lists() {
        let one = enumerate_cells(1, 10).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(parts(&one[&2]), vec![vec![1]]);

        let two = enumerate_cells(2, 10).unwrap();
        assert_eq!(parts(&two[&3]), vec![vec![2]]);
        assert_eq!(parts(&two[&4]), vec![vec![1, 1]]);

        let three = enumerate_cells(3, 10).unwrap();
        assert_eq!(parts(&three[&4]), vec![vec![3]]);
        assert_eq!(parts(&three[&5]), vec![vec![1, 2], vec![2, 1]]);
        assert_eq!(parts(&three[&6]), vec![vec![1, 1, 1]]);
    }

    #[test]
    fn cell_count_is_power_of_two() {
        for k in 1..=10 {
            let total: usize = enumerate_cells(k, 10).unwrap().values().map(Vec::len).sum();
            assert_eq!(total, 1 << (k - 1));
        }
    }

    #[test]
    fn bounds_are_enforced() {
        assert!(matches!(enumerate_cells(0, 10), Err(Error::OutOfRange { .. })));
        assert!(matches!(enumerate_cells(11, 10), Err(Error::OutOfRange { .. })));
        assert!(BraidEngine::new(4).config_homology(5, CoefficientSystem::Sign, Z).is_err());
    }

    #[test]
    fn composition_rejects_zero_parts() {
        assert!(Composition::new(vec![1, 0]).is_err());
        assert!(Composition::new(vec![]).is_err());
        assert_eq!(Composition::new(vec![2, 1]).unwrap().cell_dimension(), 5);
    }

    #[test]
    fn k2_differentials() {
        let triv = build_fn_complex(2, CoefficientSystem::Trivial, 10).unwrap();
        assert!(triv.boundary(4).unwrap().is_zero());
        let sign = build_fn_complex(2, CoefficientSystem::Sign, 10).unwrap();
        assert_eq!(sign.boundary(4).unwrap().get(0, 0).magnitude().to_string(), "2");
        let one = build_fn_complex(1, CoefficientSystem::Sign, 10).unwrap();
        assert_eq!(one.generator_count(2), 1);
        assert!(one.boundary(2).is_none());
    }

    #[test]
    fn shuffle_sign_sums() {
        // brute-force Σ sgn over (a,b)-shuffles
        fn brute(a: u32, b: u32) -> i64 {
            let n = a + b;
            (0u32..1 << n)
                .filter(|m| m.count_ones() == a)
                .map(|m| {
                    // inversions: a-block element after a b-block element
                    let mut inv = 0;
                    let mut seen_b = 0;
                    for pos in 0..n {
                        if m >> pos & 1 == 1 {
                            inv += seen_b;
                        } else {
                            seen_b += 1;
                        }
                    }
                    if inv % 2 == 0 { 1 } else { -1 }
                })
                .sum()
        }
        for a in 1..6 {
            for b in 1..6 {
                assert_eq!(merge_coefficient(a, b, CoefficientSystem::Trivial), BigInt::from(brute(a, b)), "({a},{b})");
            }
        }
    }

    #[test]
    fn square_zero_both_systems() {
        for k in 1..=9 {
            for coeff in [CoefficientSystem::Trivial, CoefficientSystem::Sign] {
                build_fn_complex(k, coeff, 10).unwrap().check_square_zero().unwrap();
            }
        }
    }

    #[test]
    fn small_configuration_homology() {
        let e = BraidEngine::default();
        let h1 = e.config_homology(1, CoefficientSystem::Trivial, Z).unwrap();
        assert_eq!(h1.iter().collect::<Vec<_>>(), vec![(0, &AbelianGroup::free(1))]);

        let h2 = e.config_homology(2, CoefficientSystem::Sign, Z).unwrap();
        assert_eq!(h2.iter().collect::<Vec<_>>(), vec![(0, &AbelianGroup::cyclic(2))]);

        let h3 = e.config_homology(3, CoefficientSystem::Trivial, Z).unwrap();
        assert_eq!(h3.get(0), AbelianGroup::free(1));
        assert_eq!(h3.get(1), AbelianGroup::free(1));
        assert_eq!(h3.top_degree(), Some(1));
    }

    /// Twisted homology of `Br_3 = ⟨a, b | aba = bab⟩` from Fox derivatives of
    /// `R = a b a b⁻¹ a⁻¹ b⁻¹` under the character `a, b ↦ ε`; the
    /// presentation complex is aspherical.
    fn fox_br3(eps: i64) -> GradedAbelianGroup {
        // prefix exponent sums of R, evaluated under ε
        let word: [(char, i64); 6] = [('a', 1), ('b', 1), ('a', 1), ('b', -1), ('a', -1), ('b', -1)];
        let mut da = 0i64;
        let mut db = 0i64;
        let mut prefix = 0i64;
        for (g, e) in word {
            // ∂(w g)/∂g = w  for e = 1;  ∂(w g⁻¹)/∂g = -w g⁻¹  for e = -1
            let term = if e == 1 { eps.pow(prefix as u32 % 2) } else { -eps.pow(((prefix - 1).rem_euclid(2)) as u32) };
            if g == 'a' { da += term } else { db += term }
            prefix += e;
        }
        let d2 = IntMatrix::from_rows(&[vec![da], vec![db]]);
        let d1 = IntMatrix::from_rows(&[vec![eps - 1, eps - 1]]);
        complex_homology(&ChainComplex::new(0, vec![1, 2, 1], vec![d1, d2]).unwrap(), Z).unwrap()
    }

    #[test]
    fn br3_matches_fox_calculus() {
        let e = BraidEngine::default();
        assert_eq!(e.config_homology(3, CoefficientSystem::Trivial, Z).unwrap(), fox_br3(1));
        let sign = e.config_homology(3, CoefficientSystem::Sign, Z).unwrap();
        assert_eq!(sign, fox_br3(-1));
        assert_eq!(sign.get(0), AbelianGroup::cyclic(2));
        assert_eq!(sign.get(1), AbelianGroup::cyclic(3));
    }

    #[test]
    fn classical_low_degree_values() {
        let e = BraidEngine::default();
        for k in 2..=9 {
            let triv = e.config_homology(k, CoefficientSystem::Trivial, Z).unwrap();
            assert_eq!(triv.get(0), AbelianGroup::free(1));
            assert_eq!(triv.get(1), AbelianGroup::free(1));
            let sign = e.config_homology(k, CoefficientSystem::Sign, Z).unwrap();
            assert_eq!(sign.get(0), AbelianGroup::cyclic(2));
            assert!(triv.top_degree().unwrap() < k as i64);
            assert!(sign.top_degree().unwrap() < k as i64);
            assert!(e.config_homology(k, CoefficientSystem::Sign, Ring::Rationals).unwrap().is_zero());
        }
        // H_*(Br_4) = Z, Z, Z/2
        let h4 = e.config_homology(4, CoefficientSystem::Trivial, Z).unwrap();
        assert_eq!(h4.get(2), AbelianGroup::cyclic(2));
        assert_eq!(h4.top_degree(), Some(2));
    }

    #[test]
    fn field_results_follow_universal_coefficients() {
        let e = BraidEngine::default();
        for k in 1..=8 {
            for coeff in [CoefficientSystem::Trivial, CoefficientSystem::Sign] {
                let hz = e.config_homology(k, coeff, Z).unwrap();
                for ring in [Ring::Rationals, Ring::Prime(2), Ring::Prime(3), Ring::Prime(5)] {
                    assert_eq!(e.config_homology(k, coeff, ring).unwrap(), hz.universal_coefficients(ring), "k={k} {coeff:?} {ring}");
                }
            }
        }
    }

    #[test]
    fn classical_stability() {
        let e = BraidEngine::default();
        for k in 1..=9u32 {
            let a = e.config_homology(k, CoefficientSystem::Trivial, Z).unwrap();
            let b = e.config_homology(k + 1, CoefficientSystem::Trivial, Z).unwrap();
            for i in 0..=(k as i64 / 2) {
                assert_eq!(a.get(i), b.get(i), "H_{i}(C_{k}) vs C_{}", k + 1);
            }
        }
    }

    #[test]
    fn d_k_values() {
        let e = BraidEngine::default();
        assert_eq!(e.dk_homology(1, Z).unwrap().iter().collect::<Vec<_>>(), vec![(1, &AbelianGroup::free(1))]);
        assert_eq!(e.dk_homology(2, Z).unwrap().iter().collect::<Vec<_>>(), vec![(2, &AbelianGroup::cyclic(2))]);
        assert_eq!(e.dk_homology(1, Ring::Rationals).unwrap().iter().collect::<Vec<_>>(), vec![(1, &AbelianGroup::free(1))]);
        for k in 1..=8 {
            let h = e.dk_homology(k, Z).unwrap();
            assert!(h.bottom_degree().unwrap() >= k as i64);
            assert!(h.top_degree().unwrap() < 2 * k as i64);
        }
    }
}
