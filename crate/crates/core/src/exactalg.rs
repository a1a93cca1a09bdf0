//! Exact integer linear algebra: Smith normal form, ranks over ℚ and prime
//! fields, and homology of finite chain complexes.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Coefficient ring for homology and rank computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ring {
    Integers,
    Rationals,
    /// The prime field ℤ/p.
    Prime(u64),
}

impl Ring {
    /// Checked constructor for a prime field.
    pub fn prime(p: u64) -> Result<Ring> {
        if is_prime(p) {
            Ok(Ring::Prime(p))
        } else {
            Err(Error::InvalidParameter(format!("{p} is not a prime")))
        }
    }

    pub fn is_field(self) -> bool {
        !matches!(self, Ring::Integers)
    }

    /// Short tag used by the cache and the CLI: `z`, `q`, `f<p>`.
    pub fn tag(self) -> String {
        match self {
            Ring::Integers => "z".into(),
            Ring::Rationals => "q".into(),
            Ring::Prime(p) => format!("f{p}"),
        }
    }

    pub fn parse(s: &str) -> Result<Ring> {
        match s.trim().to_ascii_lowercase().as_str() {
            "z" | "zz" | "int" | "integers" => Ok(Ring::Integers),
            "q" | "qq" | "rationals" => Ok(Ring::Rationals),
            other => {
                let digits = other
                    .strip_prefix("fp")
                    .or_else(|| other.strip_prefix('f'))
                    .or_else(|| other.strip_prefix('p'))
                    .unwrap_or(other);
                let p: u64 = digits
                    .parse()
                    .map_err(|_| Error::InvalidParameter(format!("unknown ring `{s}`")))?;
                Ring::prime(p)
            }
        }
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::Integers => write!(f, "Z"),
            Ring::Rationals => write!(f, "Q"),
            Ring::Prime(p) => write!(f, "F_{p}"),
        }
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut i = 2u64;
    while i * i <= p {
        if p % i == 0 {
            return false;
        }
        i += 1;
    }
    true
}

/// Integer matrix with dense semantics and row-sparse storage.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    // each row sorted by column, no explicit zeros
    data: Vec<Vec<(usize, BigInt)>>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![Vec::new(); rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i].push((i, BigInt::one()));
        }
        m
    }

    /// Builds a matrix from row vectors; all rows must have equal length.
    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged rows");
            for (j, v) in row.iter().enumerate() {
                m.set(i, j, v.clone().into());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> BigInt {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        match self.data[i].binary_search_by_key(&j, |e| e.0) {
            Ok(pos) => self.data[i][pos].1.clone(),
            Err(_) => BigInt::zero(),
        }
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        let row = &mut self.data[i];
        match row.binary_search_by_key(&j, |e| e.0) {
            Ok(pos) => {
                if v.is_zero() {
                    row.remove(pos);
                } else {
                    row[pos].1 = v;
                }
            }
            Err(pos) => {
                if !v.is_zero() {
                    row.insert(pos, (j, v));
                }
            }
        }
    }

    /// Nonzero entries of row `i`, sorted by column.
    pub fn row_entries(&self, i: usize) -> &[(usize, BigInt)] {
        &self.data[i]
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Vec::is_empty)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for (i, row) in self.data.iter().enumerate() {
            for (j, v) in row {
                t.data[*j].push((i, v.clone()));
            }
        }
        t
    }

    pub fn mul(&self, rhs: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for (i, row) in self.data.iter().enumerate() {
            let mut acc: BTreeMap<usize, BigInt> = BTreeMap::new();
            for (k, a) in row {
                for (j, b) in &rhs.data[*k] {
                    *acc.entry(*j).or_insert_with(BigInt::zero) += a * b;
                }
            }
            out.data[i] = acc.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        }
        Ok(out)
    }

    fn to_dense(&self) -> Vec<Vec<BigInt>> {
        let mut d = vec![vec![BigInt::zero(); self.cols]; self.rows];
        for (i, row) in self.data.iter().enumerate() {
            for (j, v) in row {
                d[i][*j] = v.clone();
            }
        }
        d
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dense = self.to_dense();
        f.debug_struct("IntMatrix")
            .field("rows", &self.rows)
            .field("cols", &self.cols)
            .field("entries", &dense.iter().map(|r| r.iter().map(|v| v.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>())
            .finish()
    }
}

/// Invariant factors of an integer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm {
    pub invariant_factors: Vec<BigUint>,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.invariant_factors.len()
    }
}

/// Smith normal form by gcd-driven elimination with smallest-entry pivoting.
pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let mut a = m.to_dense();
    let (rows, cols) = (m.rows, m.cols);
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows && t < cols {
        let Some((pi, pj)) = min_abs_entry(&a, t) else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            // clear column t below the pivot
            let mut dirty = false;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                if !q.is_zero() {
                    let (top, bottom) = a.split_at_mut(i);
                    for j in t..cols {
                        if !top[t][j].is_zero() {
                            let s = &q * &top[t][j];
                            bottom[0][j] -= s;
                        }
                    }
                }
                if !a[i][t].is_zero() {
                    dirty = true;
                }
            }
            // clear row t right of the pivot
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                if !q.is_zero() {
                    for row in a.iter_mut().skip(t) {
                        if !row[t].is_zero() {
                            let s = &q * &row[t];
                            row[j] -= s;
                        }
                    }
                }
                if !a[t][j].is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                // a smaller remainder exists in row or column t; make it the pivot
                let (bi, bj) = smallest_in_cross(&a, t);
                a.swap(t, bi);
                for row in a.iter_mut() {
                    row.swap(t, bj);
                }
                continue;
            }
            // pivot must divide the remaining block
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a[i][j].is_multiple_of(&a[t][t])));
            match bad {
                Some(i) => {
                    let (top, bottom) = a.split_at_mut(i);
                    for j in t..cols {
                        let v = bottom[0][j].clone();
                        top[t][j] += v;
                    }
                }
                None => break,
            }
        }
        diag.push(a[t][t].abs().to_biguint().expect("nonnegative"));
        t += 1;
    }
    SmithForm { invariant_factors: diag }
}

fn min_abs_entry(a: &[Vec<BigInt>], t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, BigInt)> = None;
    for (i, row) in a.iter().enumerate().skip(t) {
        for (j, v) in row.iter().enumerate().skip(t) {
            if v.is_zero() {
                continue;
            }
            let av = v.abs();
            if best.as_ref().map_or(true, |b| av < b.2) {
                let one = av.is_one();
                best = Some((i, j, av));
                if one {
                    return best.map(|b| (b.0, b.1));
                }
            }
        }
    }
    best.map(|b| (b.0, b.1))
}

fn smallest_in_cross(a: &[Vec<BigInt>], t: usize) -> (usize, usize) {
    let mut best = (t, t, a[t][t].abs());
    for (i, row) in a.iter().enumerate().skip(t + 1) {
        if !row[t].is_zero() && row[t].abs() < best.2 {
            best = (i, t, row[t].abs());
        }
    }
    for j in t + 1..a[t].len() {
        if !a[t][j].is_zero() && a[t][j].abs() < best.2 {
            best = (t, j, a[t][j].abs());
        }
    }
    (best.0, best.1)
}

/// Exact rank over ℚ or a prime field. Over ℤ this is the ℚ-rank.
pub fn rank_over_field(m: &IntMatrix, ring: Ring) -> usize {
    match ring {
        Ring::Integers | Ring::Rationals => rank_rational(m),
        Ring::Prime(2) => rank_mod2(m),
        Ring::Prime(p) => rank_mod_p(m, p),
    }
}

/// Fraction-free (Bareiss) elimination.
fn rank_rational(m: &IntMatrix) -> usize {
    let mut a = m.to_dense();
    let (rows, cols) = (m.rows, m.cols);
    let mut prev = BigInt::one();
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(rank, p);
        for i in rank + 1..rows {
            for j in c + 1..cols {
                let v = (&a[rank][c] * &a[i][j] - &a[i][c] * &a[rank][j]) / &prev;
                a[i][j] = v;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[rank][c].clone();
        rank += 1;
    }
    rank
}

fn reduce_mod(v: &BigInt, p: u64) -> u64 {
    let r = v.mod_floor(&BigInt::from(p));
    r.to_u64().expect("residue fits")
}

fn rank_mod_p(m: &IntMatrix, p: u64) -> usize {
    let (rows, cols) = (m.rows, m.cols);
    let mut a = vec![vec![0u64; cols]; rows];
    for i in 0..rows {
        for (j, v) in m.row_entries(i) {
            a[i][*j] = reduce_mod(v, p);
        }
    }
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(piv) = (rank..rows).find(|&i| a[i][c] != 0) else { continue };
        a.swap(rank, piv);
        let inv = mod_pow(a[rank][c], p - 2, p);
        for j in c..cols {
            a[rank][j] = a[rank][j] * inv % p;
        }
        let (top, bottom) = a.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        for row in bottom.iter_mut() {
            let f = row[c];
            if f == 0 {
                continue;
            }
            for j in c..cols {
                if pivot_row[j] != 0 {
                    row[j] = (row[j] + (p - f) * pivot_row[j]) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Bit-packed elimination over 𝔽_2.
fn rank_mod2(m: &IntMatrix) -> usize {
    let words = m.cols.div_ceil(64);
    let mut a: Vec<Vec<u64>> = (0..m.rows)
        .map(|i| {
            let mut row = vec![0u64; words];
            for (j, v) in m.row_entries(i) {
                if v.is_odd() {
                    row[j / 64] |= 1 << (j % 64);
                }
            }
            row
        })
        .collect();
    let mut rank = 0;
    for c in 0..m.cols {
        if rank == m.rows {
            break;
        }
        let (w, bit) = (c / 64, 1u64 << (c % 64));
        let Some(piv) = (rank..m.rows).find(|&i| a[i][w] & bit != 0) else { continue };
        a.swap(rank, piv);
        let (top, bottom) = a.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        for row in bottom.iter_mut() {
            if row[w] & bit != 0 {
                for (x, y) in row[w..].iter_mut().zip(&pivot_row[w..]) {
                    *x ^= y;
                }
            }
        }
        rank += 1;
    }
    rank
}

pub(crate) fn mod_pow(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = (r as u128 * b as u128 % p as u128) as u64;
        }
        b = (b as u128 * b as u128 % p as u128) as u64;
        e >>= 1;
    }
    r
}

/// One finitely generated abelian group (or vector space, when torsion is empty).
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct AbelianGroup {
    pub free_rank: usize,
    /// Invariant factors > 1, each dividing the next.
    pub torsion: Vec<BigUint>,
}

impl AbelianGroup {
    pub fn free(rank: usize) -> Self {
        AbelianGroup { free_rank: rank, torsion: Vec::new() }
    }

    pub fn cyclic(order: u64) -> Self {
        AbelianGroup { free_rank: 0, torsion: vec![BigUint::from(order)] }
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    /// Direct sum; torsion is renormalized to divisibility order.
    pub fn direct_sum(&self, other: &AbelianGroup) -> AbelianGroup {
        let mut all: Vec<BigUint> = self.torsion.iter().chain(&other.torsion).cloned().collect();
        AbelianGroup { free_rank: self.free_rank + other.free_rank, torsion: invariant_factors_of(&mut all) }
    }

    /// Number of torsion factors divisible by `p`.
    pub fn p_torsion_count(&self, p: u64) -> usize {
        let p = BigUint::from(p);
        self.torsion.iter().filter(|t| (*t % &p).is_zero()).count()
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for t in &self.torsion {
            parts.push(format!("Z/{t}"));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Converts a multiset of cyclic orders into invariant-factor form.
fn invariant_factors_of(orders: &mut [BigUint]) -> Vec<BigUint> {
    let diag: Vec<BigInt> = orders.iter().map(|o| BigInt::from_biguint(Sign::Plus, o.clone())).collect();
    let n = diag.len();
    let mut m = IntMatrix::zeros(n, n);
    for (i, v) in diag.into_iter().enumerate() {
        m.set(i, i, v);
    }
    smith_normal_form(&m).invariant_factors.into_iter().filter(|f| !f.is_one()).collect()
}

/// Homology by degree; absent degrees are zero.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct GradedAbelianGroup {
    groups: BTreeMap<i64, AbelianGroup>,
}

impl GradedAbelianGroup {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts a group, dropping zero entries so equality is structural.
    pub fn set(&mut self, degree: i64, group: AbelianGroup) {
        if group.is_zero() {
            self.groups.remove(&degree);
        } else {
            self.groups.insert(degree, group);
        }
    }

    pub fn get(&self, degree: i64) -> AbelianGroup {
        self.groups.get(&degree).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &AbelianGroup)> {
        self.groups.iter().map(|(d, g)| (*d, g))
    }

    pub fn is_zero(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn top_degree(&self) -> Option<i64> {
        self.groups.keys().next_back().copied()
    }

    pub fn bottom_degree(&self) -> Option<i64> {
        self.groups.keys().next().copied()
    }

    /// Degree shift: the group in degree `q` moves to `q + by`.
    pub fn shifted(&self, by: i64) -> Self {
        GradedAbelianGroup { groups: self.groups.iter().map(|(d, g)| (d + by, g.clone())).collect() }
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (d, g) in other.iter() {
            let sum = out.get(d).direct_sum(g);
            out.set(d, sum);
        }
        out
    }

    /// Per-degree dimension after tensoring a field (for field tables this is the rank).
    pub fn dimension(&self, degree: i64) -> usize {
        let g = self.get(degree);
        g.free_rank + g.torsion.len()
    }

    /// Field homology from integral homology by universal coefficients:
    /// dim H_i(−; 𝔽_p) = free_i + #(p | tors_i) + #(p | tors_{i−1}).
    pub fn universal_coefficients(&self, ring: Ring) -> Self {
        let mut out = GradedAbelianGroup::new();
        let degrees: Vec<i64> = self.groups.keys().flat_map(|&d| [d, d + 1]).collect();
        for d in degrees {
            let dim = match ring {
                Ring::Integers => return self.clone(),
                Ring::Rationals => self.get(d).free_rank,
                Ring::Prime(p) => {
                    self.get(d).free_rank + self.get(d).p_torsion_count(p) + self.get(d - 1).p_torsion_count(p)
                }
            };
            out.set(d, AbelianGroup::free(dim));
        }
        out
    }
}

impl FromIterator<(i64, AbelianGroup)> for GradedAbelianGroup {
    fn from_iter<I: IntoIterator<Item = (i64, AbelianGroup)>>(iter: I) -> Self {
        let mut g = GradedAbelianGroup::new();
        for (d, a) in iter {
            let sum = g.get(d).direct_sum(&a);
            g.set(d, sum);
        }
        g
    }
}

impl fmt::Display for GradedAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.groups.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.groups.iter().map(|(d, g)| format!("H_{d} = {g}")).collect();
        write!(f, "{}", parts.join(", "))
    }
}

/// A bounded chain complex of free ℤ-modules.
///
/// Degrees run over `lowest ..= lowest + counts.len() - 1`. The boundary in
/// degree `i` maps `C_i → C_{i-1}` and is stored as a `count(i-1) × count(i)`
/// matrix; the boundary out of the lowest degree is zero.
#[derive(Debug, Clone)]
pub struct ChainComplex {
    lowest: i64,
    counts: Vec<usize>,
    // boundaries[i] is the differential out of degree lowest + i + 1
    boundaries: Vec<IntMatrix>,
}

impl ChainComplex {
    pub fn new(lowest: i64, counts: Vec<usize>, boundaries: Vec<IntMatrix>) -> Result<Self> {
        if boundaries.len() + 1 != counts.len().max(1) {
            return Err(Error::ShapeMismatch(format!(
                "{} generator counts need {} boundary matrices, got {}",
                counts.len(),
                counts.len().saturating_sub(1),
                boundaries.len()
            )));
        }
        for (i, b) in boundaries.iter().enumerate() {
            if b.rows() != counts[i] || b.cols() != counts[i + 1] {
                return Err(Error::ShapeMismatch(format!(
                    "boundary out of degree {} is {}x{}, expected {}x{}",
                    lowest + i as i64 + 1,
                    b.rows(),
                    b.cols(),
                    counts[i],
                    counts[i + 1]
                )));
            }
        }
        Ok(ChainComplex { lowest, counts, boundaries })
    }

    pub fn lowest_degree(&self) -> i64 {
        self.lowest
    }

    pub fn highest_degree(&self) -> i64 {
        self.lowest + self.counts.len() as i64 - 1
    }

    pub fn generator_count(&self, degree: i64) -> usize {
        self.index(degree).map_or(0, |i| self.counts[i])
    }

    /// Boundary out of `degree`, or `None` where it is zero by range.
    pub fn boundary(&self, degree: i64) -> Option<&IntMatrix> {
        let i = self.index(degree)?;
        if i == 0 {
            None
        } else {
            Some(&self.boundaries[i - 1])
        }
    }

    fn index(&self, degree: i64) -> Option<usize> {
        let i = degree - self.lowest;
        (i >= 0 && (i as usize) < self.counts.len()).then_some(i as usize)
    }

    /// Checks ∂∘∂ = 0, naming the first degree where it fails.
    pub fn check_square_zero(&self) -> Result<()> {
        for (i, w) in self.boundaries.windows(2).enumerate() {
            if !w[0].mul(&w[1])?.is_zero() {
                return Err(Error::NotAComplex { degree: self.lowest + i as i64 + 2 });
            }
        }
        Ok(())
    }

    /// Degree-wise dual: generators in degree `i` move to `total - i` and
    /// each boundary is transposed, giving the complex that computes the
    /// cohomology of `self` as homology.
    pub fn dual(&self, total: i64) -> ChainComplex {
        let counts: Vec<usize> = self.counts.iter().rev().copied().collect();
        let boundaries: Vec<IntMatrix> = self.boundaries.iter().rev().map(IntMatrix::transpose).collect();
        ChainComplex { lowest: total - self.highest_degree(), counts, boundaries }
    }
}

/// Homology of a chain complex over ℤ, ℚ or 𝔽_p.
pub fn complex_homology(c: &ChainComplex, ring: Ring) -> Result<GradedAbelianGroup> {
    c.check_square_zero()?;
    Ok(homology_unchecked(c, ring))
}

pub(crate) fn homology_unchecked(c: &ChainComplex, ring: Ring) -> GradedAbelianGroup {
    let n = c.counts.len();
    // rank and (over ℤ) Smith form of the boundary out of each degree
    let mut ranks = vec![0usize; n + 1];
    let mut smith: Vec<Option<SmithForm>> = vec![None; n + 1];
    for i in 1..n {
        let b = &c.boundaries[i - 1];
        if ring == Ring::Integers {
            let s = smith_normal_form(b);
            ranks[i] = s.rank();
            smith[i] = Some(s);
        } else {
            ranks[i] = rank_over_field(b, ring);
        }
    }
    let mut out = GradedAbelianGroup::new();
    for i in 0..n {
        let free_rank = c.counts[i] - ranks[i] - ranks[i + 1];
        let torsion = smith[i + 1]
            .as_ref()
            .map(|s| s.invariant_factors.iter().filter(|f| !f.is_one()).cloned().collect())
            .unwrap_or_default();
        out.set(c.lowest + i as i64, AbelianGroup { free_rank, torsion });
    }
    out
}
