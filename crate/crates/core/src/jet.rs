//! The jet map `(f_1, …, f_m) ↦ (f_k + f_k^{(j)})_{k, 0≤j<n}` over ℚ and the
//! two membership tests it relates.
//!
//! A tuple has a common root of multiplicity `≥ n` exactly when the `mn`
//! jet polynomials share a root; in characteristic zero both sides are
//! decided by exact gcds.
//!
//! The associated map of spaces sends `∞` to the base point `[1:…:1]`; only
//! the algebraic map is modelled here.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Error, Result};

/// A polynomial with exact rational coefficients, constant term first.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QPoly {
    coeffs: Vec<BigRational>,
}

impl QPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        QPoly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigRational::from_integer(BigInt::from(c))).collect())
    }

    pub fn zero() -> Self {
        QPoly { coeffs: Vec::new() }
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(One::is_one)
    }

    pub fn monic(&self) -> QPoly {
        match self.coeffs.last() {
            Some(lead) if !lead.is_one() => QPoly { coeffs: self.coeffs.iter().map(|c| c / lead).collect() },
            _ => self.clone(),
        }
    }

    pub fn add(&self, other: &QPoly) -> QPoly {
        let len = self.coeffs.len().max(other.coeffs.len());
        let zero = BigRational::zero();
        QPoly::new(
            (0..len)
                .map(|i| self.coeffs.get(i).unwrap_or(&zero) + other.coeffs.get(i).unwrap_or(&zero))
                .collect(),
        )
    }

    pub fn mul(&self, other: &QPoly) -> QPoly {
        if self.is_zero() || other.is_zero() {
            return QPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        QPoly::new(out)
    }

    pub fn pow(&self, e: u32) -> QPoly {
        (0..e).fold(QPoly::from_ints(&[1]), |acc, _| acc.mul(self))
    }

    pub fn derivative(&self) -> QPoly {
        QPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn nth_derivative(&self, j: u32) -> QPoly {
        (0..j).fold(self.clone(), |f, _| f.derivative())
    }

    pub fn rem(&self, divisor: &QPoly) -> QPoly {
        let dd = divisor.degree().expect("division by zero polynomial");
        let lead = &divisor.coeffs[dd];
        let mut rem = self.coeffs.clone();
        while rem.len() > dd {
            let top = rem.len() - 1;
            let c = &rem[top] / lead;
            if !c.is_zero() {
                for (j, b) in divisor.coeffs.iter().enumerate() {
                    rem[top - dd + j] -= &c * b;
                }
            }
            rem.pop();
        }
        QPoly::new(rem)
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &QPoly) -> QPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `f(λz + c)`.
    pub fn substitute_affine(&self, scale: &BigRational, shift: &BigRational) -> QPoly {
        let lin = QPoly::new(vec![shift.clone(), scale.clone()]);
        self.coeffs
            .iter()
            .rev()
            .fold(QPoly::zero(), |acc, a| acc.mul(&lin).add(&QPoly::new(vec![a.clone()])))
    }
}

impl fmt::Debug for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", s.join(","))
    }
}

/// `m` monic rational polynomials of common degree `d ≥ 1`, with multiplicity bound `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QTuple {
    polys: Vec<QPoly>,
    n: u32,
}

impl QTuple {
    pub fn new(polys: Vec<QPoly>, n: u32) -> Result<Self> {
        let Some(first) = polys.first() else {
            return Err(Error::InvalidParameter("empty tuple".into()));
        };
        if n == 0 {
            return Err(Error::InvalidParameter("n must be positive".into()));
        }
        if (polys.len(), n) == (1, 1) {
            return Err(Error::InvalidParameter("(m, n) = (1, 1) is excluded".into()));
        }
        let d = first.degree();
        if d.unwrap_or(0) == 0 {
            return Err(Error::InvalidParameter("degree must be at least 1".into()));
        }
        for f in &polys {
            if !f.is_monic() || f.degree() != d {
                return Err(Error::InvalidParameter(format!("[{f}] is not monic of degree {}", d.unwrap())));
            }
        }
        Ok(QTuple { polys, n })
    }

    pub fn polys(&self) -> &[QPoly] {
        &self.polys
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.polys[0].degree().expect("validated")
    }

    /// Parses one input line: polynomials separated by `;`, each a
    /// comma-separated list of rationals `a` or `a/b`, constant term first.
    pub fn parse_line(line: &str, n: u32) -> Result<Self> {
        let polys = line
            .split(';')
            .map(|block| {
                block
                    .split(',')
                    .map(|c| c.trim().parse::<BigRational>().map_err(|_| Error::Parse(format!("bad coefficient `{}`", c.trim()))))
                    .collect::<Result<Vec<_>>>()
                    .map(QPoly::new)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(polys, n)
    }
}

fn gcd_all<'a>(polys: impl IntoIterator<Item = &'a QPoly>) -> QPoly {
    polys.into_iter().fold(QPoly::zero(), |g, f| g.gcd(f))
}

/// `mn` polynomials, block `k` being `f_k, f_k + f_k′, …, f_k + f_k^{(n-1)}`.
pub fn jet_map(t: &QTuple) -> Vec<QPoly> {
    t.polys
        .iter()
        .flat_map(|f| (0..t.n).map(move |j| if j == 0 { f.clone() } else { f.add(&f.nth_derivative(j)) }))
        .collect()
}

/// No common root of multiplicity `≥ n`: the gcd `g` of the entries
/// satisfies `gcd(g, g′, …, g^{(n-1)}) = 1`.
pub fn q_membership_poly(t: &QTuple) -> bool {
    let g = gcd_all(&t.polys);
    let h = (1..t.n).fold(g.clone(), |h, j| h.gcd(&g.nth_derivative(j)));
    h.degree() == Some(0)
}

/// No common root at all.
pub fn q_membership_hol(fs: &[QPoly]) -> bool {
    gcd_all(fs).degree() == Some(0)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JetReport {
    pub poly_member: bool,
    pub hol_member: bool,
    pub jet: Vec<QPoly>,
}

impl JetReport {
    pub fn agree(&self) -> bool {
        self.poly_member == self.hol_member
    }
}

pub fn jet_equivalence_check(t: &QTuple) -> JetReport {
    let jet = jet_map(t);
    JetReport { poly_member: q_membership_poly(t), hol_member: q_membership_hol(&jet), jet }
}

/// Random tuple with coefficients in `[-3, 3]`. When `degenerate` is set the
/// entries share a factor `q^e`, `q` linear or quadratic, with `e` drawn so
/// that both `e < n` and `e ≥ n` occur.
pub fn random_tuple<R: Rng>(rng: &mut R, d: u32, m: u32, n: u32, degenerate: bool) -> QTuple {
    let small = |rng: &mut R| rng.gen_range(-3i64..=3);
    let random_monic = |rng: &mut R, deg: u32| {
        let mut c: Vec<i64> = (0..deg).map(|_| small(rng)).collect();
        c.push(1);
        QPoly::from_ints(&c)
    };
    let polys = if degenerate {
        let quadratic = d >= 2 && rng.gen_bool(0.3);
        let base = if quadratic {
            // z² + b z + c with b² < 4c has no rational root
            let c = rng.gen_range(1i64..=3);
            QPoly::from_ints(&[c, rng.gen_range(-1i64..=1), 1])
        } else {
            QPoly::from_ints(&[small(rng), 1])
        };
        let base_deg = base.degree().unwrap() as u32;
        let e = rng.gen_range(1..=d / base_deg);
        let shared = base.pow(e);
        (0..m).map(|_| shared.mul(&random_monic(rng, d - e * base_deg))).collect()
    } else {
        (0..m).map(|_| random_monic(rng, d)).collect()
    };
    QTuple::new(polys, n).expect("generated tuple is valid")
}
