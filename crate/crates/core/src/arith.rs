//! Polynomials over prime fields, membership in `Poly^{d,m}_n(𝔽_p)`, and
//! exhaustive point counts.

use std::fmt;

use num_bigint::BigUint;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactalg::{is_prime, mod_pow};

/// Default number of tuples `count_points` may enumerate.
pub const DEFAULT_BUDGET: u128 = 10_000_000;

/// A polynomial over `𝔽_p`, coefficients constant term first.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FpPoly {
    p: u64,
    coeffs: Vec<u64>,
}

impl FpPoly {
    /// Reduces the coefficients mod `p` and trims leading zeros.
    pub fn new(p: u64, coeffs: &[u64]) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidParameter(format!("{p} is not a prime")));
        }
        Ok(Self::from_reduced(p, coeffs.iter().map(|c| c % p).collect()))
    }

    /// Accepts signed coefficients, e.g. `z - 1` as `[-1, 1]`.
    pub fn from_signed(p: u64, coeffs: &[i64]) -> Result<Self> {
        let reduced: Vec<u64> = coeffs.iter().map(|c| c.rem_euclid(p as i64) as u64).collect();
        Self::new(p, &reduced)
    }

    fn from_reduced(p: u64, mut coeffs: Vec<u64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        FpPoly { p, coeffs }
    }

    pub fn zero(p: u64) -> Self {
        FpPoly { p, coeffs: Vec::new() }
    }

    pub fn one(p: u64) -> Self {
        FpPoly { p, coeffs: vec![1] }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last() == Some(&1)
    }

    fn inv(&self, a: u64) -> u64 {
        mod_pow(a, self.p - 2, self.p)
    }

    pub fn monic(&self) -> FpPoly {
        match self.coeffs.last() {
            None | Some(1) => self.clone(),
            Some(&lead) => {
                let inv = self.inv(lead);
                FpPoly { p: self.p, coeffs: self.coeffs.iter().map(|c| c * inv % self.p).collect() }
            }
        }
    }

    pub fn mul(&self, other: &FpPoly) -> FpPoly {
        if self.is_zero() || other.is_zero() {
            return FpPoly::zero(self.p);
        }
        let mut out = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = (out[i + j] + a * b) % self.p;
            }
        }
        FpPoly::from_reduced(self.p, out)
    }

    pub fn pow(&self, e: u32) -> FpPoly {
        (0..e).fold(FpPoly::one(self.p), |acc, _| acc.mul(self))
    }

    /// Quotient and remainder; panics on division by zero.
    pub fn div_rem(&self, divisor: &FpPoly) -> (FpPoly, FpPoly) {
        let p = self.p;
        let dd = divisor.degree().expect("division by zero polynomial");
        let lead_inv = self.inv(divisor.coeffs[dd]);
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (FpPoly::zero(p), self.clone());
        }
        let mut quot = vec![0u64; rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = rem[i + dd] * lead_inv % p;
            quot[i] = c;
            if c == 0 {
                continue;
            }
            for (j, b) in divisor.coeffs.iter().enumerate() {
                rem[i + j] = (rem[i + j] + p - c * b % p) % p;
            }
        }
        rem.truncate(dd);
        (FpPoly::from_reduced(p, quot), FpPoly::from_reduced(p, rem))
    }

    pub fn derivative(&self) -> FpPoly {
        let coeffs = self.coeffs.iter().enumerate().skip(1).map(|(i, c)| (i as u64 % self.p) * c % self.p).collect();
        FpPoly::from_reduced(self.p, coeffs)
    }

    /// `g` with `g^p = self`, for `self` whose derivative vanishes. Over a
    /// prime field the Frobenius fixes every coefficient, so this just
    /// keeps the coefficients at multiples of `p`.
    fn pth_root(&self) -> FpPoly {
        let p = self.p as usize;
        FpPoly::from_reduced(self.p, self.coeffs.iter().step_by(p).copied().collect())
    }

    pub fn substitute_shift(&self, c: u64) -> FpPoly {
        // self(z + c) by Horner
        let shift = FpPoly::from_reduced(self.p, vec![c % self.p, 1]);
        self.coeffs.iter().rev().fold(FpPoly::zero(self.p), |acc, a| {
            let mut next = acc.mul(&shift);
            if next.coeffs.is_empty() {
                next.coeffs.push(0);
            }
            next.coeffs[0] = (next.coeffs[0] + a) % self.p;
            FpPoly::from_reduced(self.p, next.coeffs)
        })
    }

    /// Squarefree decomposition: pairs `(g_i, e)` with `self = lead · Π g_i^e`,
    /// each `g_i` squarefree, monic, nonconstant, and pairwise coprime.
    pub fn squarefree_decomposition(&self) -> Vec<(FpPoly, u32)> {
        let mut out = Vec::new();
        if self.degree().map_or(true, |d| d == 0) {
            return out;
        }
        let f = self.monic();
        let mut c = f.gcd(&f.derivative()).expect("same prime");
        let mut w = f.div_rem(&c).0;
        let mut i = 1;
        while !w.is_one() {
            let y = w.gcd(&c).expect("same prime");
            let factor = w.div_rem(&y).0;
            if !factor.is_one() {
                out.push((factor, i));
            }
            w = y;
            c = c.div_rem(&w).0;
            i += 1;
        }
        if !c.is_one() {
            let root = c.pth_root();
            let p = self.p as u32;
            out.extend(root.squarefree_decomposition().into_iter().map(|(g, e)| (g, e * p)));
        }
        out
    }

    /// Monic gcd; `gcd(f, 0)` is `f` made monic.
    pub fn gcd(&self, other: &FpPoly) -> Result<FpPoly> {
        if self.p != other.p {
            return Err(Error::PrimeMismatch(self.p, other.p));
        }
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        Ok(a.monic())
    }
}

impl fmt::Debug for FpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} (mod {})", self.p)
    }
}

impl fmt::Display for FpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| **c != 0)
            .map(|(i, c)| match (i, c) {
                (0, c) => c.to_string(),
                (1, 1) => "z".into(),
                (1, c) => format!("{c}z"),
                (i, 1) => format!("z^{i}"),
                (i, c) => format!("{c}z^{i}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// `m` monic polynomials over `𝔽_p` of common degree `d`, with multiplicity bound `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpTuple {
    polys: Vec<FpPoly>,
    n: u32,
}

impl FpTuple {
    pub fn new(polys: Vec<FpPoly>, n: u32) -> Result<Self> {
        let Some(first) = polys.first() else {
            return Err(Error::InvalidParameter("empty tuple".into()));
        };
        if n == 0 {
            return Err(Error::InvalidParameter("n must be positive".into()));
        }
        let (p, d) = (first.p, first.degree());
        for f in &polys {
            if f.p != p {
                return Err(Error::PrimeMismatch(p, f.p));
            }
            if !f.is_monic() || f.degree() != d {
                return Err(Error::InvalidParameter(format!("{f} is not monic of degree {d:?}")));
            }
        }
        Ok(FpTuple { polys, n })
    }

    pub fn polys(&self) -> &[FpPoly] {
        &self.polys
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn gcd(&self) -> FpPoly {
        let p = self.polys[0].p;
        self.polys.iter().fold(FpPoly::zero(p), |g, f| g.gcd(f).expect("primes checked"))
    }
}

/// Largest `e` such that some irreducible `q` has `q^e` dividing every entry; 0 if coprime.
pub fn max_common_multiplicity(t: &FpTuple) -> u32 {
    t.gcd().squarefree_decomposition().iter().map(|(_, e)| *e).max().unwrap_or(0)
}

/// No common root of multiplicity `≥ n` over the algebraic closure.
pub fn is_member(t: &FpTuple) -> bool {
    max_common_multiplicity(t) < t.n
}

/// Number of monic tuples in `Poly^{d,m}_n(𝔽_p)`, by enumerating all `p^{dm}`.
pub fn count_points(d: u32, m: u32, n: u32, p: u64, budget: u128) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::InvalidParameter(format!("{p} is not a prime")));
    }
    if d == 0 || m == 0 || n == 0 {
        return Err(Error::InvalidParameter("d, m, n must be positive".into()));
    }
    let free = d * m;
    let required = (p as u128).checked_pow(free).filter(|r| *r <= budget);
    let Some(total) = required else {
        let required = (p as u128).checked_pow(free).unwrap_or(u128::MAX);
        return Err(Error::BudgetExceeded { required, budget });
    };
    let total = total as u64;
    let count = (0..total)
        .into_par_iter()
        .filter(|&index| {
            // digits of `index` in base p, lexicographic over the coefficient vectors
            let mut rest = index;
            let polys: Vec<FpPoly> = (0..m)
                .map(|_| {
                    let mut coeffs: Vec<u64> = (0..d)
                        .map(|_| {
                            let c = rest % p;
                            rest /= p;
                            c
                        })
                        .collect();
                    coeffs.push(1);
                    FpPoly { p, coeffs }
                })
                .collect();
            is_member(&FpTuple { polys, n })
        })
        .count();
    Ok(count as u64)
}

/// `q^{dm}` if `d < n`, else `q^{dm} - q^{dm-mn+1}`.
pub fn closed_form_count(d: u32, m: u32, n: u32, q: u64) -> BigUint {
    let q = BigUint::from(q);
    let all = q.pow(d * m);
    if d < n {
        all
    } else {
        let excluded = q.pow(d * m - m * n + 1);
        all - excluded
    }
}
