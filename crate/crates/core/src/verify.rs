//! Named verification suites run by `polystab verify`.

use std::time::{Duration, Instant};

use rand::SeedableRng;

use crate::arith::{closed_form_count, count_points, DEFAULT_BUDGET};
use crate::braid::{build_fn_complex, BraidEngine, CoefficientSystem, HomologyCache};
use crate::error::{Error, Result};
use crate::exactalg::{AbelianGroup, GradedAbelianGroup, Ring};
use crate::jet::{jet_equivalence_check, random_tuple};
use crate::polyspaces::{
    bundle_rank, e1_page, hol_homology, omega_exactness_bound, omega_series, poly_homology,
    stable_range_check, theorem4_check, HolParams, Params, Space,
};

pub const SUITES: &[&str] =
    &["splitting", "spheres", "counts", "jet", "cells", "series", "stability", "d2", "e1", "poly-hol"];

/// Largest `k` any suite needs; the series suite reaches degree 15 for `N = 2`.
const SUITE_K_MAX: u32 = 15;

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub suite: &'static str,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

pub struct VerifyContext {
    engine: BraidEngine,
    budget: u128,
}

impl VerifyContext {
    pub fn new(k_max: u32, cache: Option<HomologyCache>, budget: u128) -> Self {
        let mut engine = BraidEngine::new(k_max.max(SUITE_K_MAX));
        if let Some(c) = cache {
            engine = engine.with_cache(c);
        }
        VerifyContext { engine, budget }
    }
}

impl Default for VerifyContext {
    fn default() -> Self {
        Self::new(SUITE_K_MAX, None, DEFAULT_BUDGET)
    }
}

/// Runs one suite by name, or every suite for `"all"`.
pub fn run_suite(ctx: &VerifyContext, name: &str) -> Result<Vec<CheckResult>> {
    if name == "all" {
        let mut out = Vec::new();
        for s in SUITES {
            out.extend(run_suite(ctx, s)?);
        }
        return Ok(out);
    }
    let suite: &'static str = SUITES
        .iter()
        .find(|s| **s == name)
        .ok_or_else(|| Error::InvalidParameter(format!("unknown suite `{name}`; known: all, {}", SUITES.join(", "))))?;
    let mut checks = Checks { suite, out: Vec::new() };
    match suite {
        "splitting" => splitting(ctx, &mut checks),
        "spheres" => spheres(ctx, &mut checks),
        "counts" => counts(ctx, &mut checks),
        "jet" => jet(&mut checks),
        "cells" => cells(ctx, &mut checks),
        "series" => series(ctx, &mut checks),
        "stability" => stability(ctx, &mut checks),
        "d2" => d2(ctx, &mut checks),
        "e1" => e1(ctx, &mut checks),
        "poly-hol" => poly_hol(ctx, &mut checks),
        _ => unreachable!(),
    }
    Ok(checks.out)
}

struct Checks {
    suite: &'static str,
    out: Vec<CheckResult>,
}

impl Checks {
    /// Times `body`; an `Err` counts as a failure with its message as detail.
    fn run(&mut self, name: String, body: impl FnOnce() -> Result<(bool, String)>) {
        let start = Instant::now();
        let (passed, detail) = body().unwrap_or_else(|e| (false, format!("error: {e}")));
        self.out.push(CheckResult { suite: self.suite, name, passed, detail, elapsed: start.elapsed() });
    }
}

fn params(d: u32, m: u32, n: u32) -> Result<Params> {
    Params::new(d, m, n)
}

fn splitting(ctx: &VerifyContext, c: &mut Checks) {
    for d in 2..=8 {
        c.run(format!("poly({d},1,2) = H_*(C_{d}; Z)"), || {
            let split = poly_homology(&ctx.engine, &params(d, 1, 2)?, Ring::Integers)?;
            let direct = ctx.engine.config_homology(d, CoefficientSystem::Trivial, Ring::Integers)?;
            Ok((split.groups == direct, format!("{}", split.groups)))
        });
    }
}

fn sphere(dim: i64) -> GradedAbelianGroup {
    [(0, AbelianGroup::free(1)), (dim, AbelianGroup::free(1))].into_iter().collect()
}

fn spheres(ctx: &VerifyContext, c: &mut Checks) {
    for (m, n) in [(1, 3), (2, 2), (3, 2), (2, 3)] {
        c.run(format!("poly({n},{m},{n}) = S^{}", 2 * m * n - 3), || {
            let t = poly_homology(&ctx.engine, &params(n, m, n)?, Ring::Integers)?;
            Ok((t.groups == sphere(2 * (m * n) as i64 - 3), format!("{}", t.groups)))
        });
        for d in 1..n {
            c.run(format!("poly({d},{m},{n}) = point"), || {
                let t = poly_homology(&ctx.engine, &params(d, m, n)?, Ring::Integers)?;
                Ok((t.groups == [(0, AbelianGroup::free(1))].into_iter().collect(), format!("{}", t.groups)))
            });
        }
    }
}

fn counts(ctx: &VerifyContext, c: &mut Checks) {
    for p in [2u64, 3] {
        for d in 1..=4u32 {
            for m in 1..=2u32 {
                for n in 1..=3u32 {
                    if (m, n) == (1, 1) || (p as u128).pow(d * m) > ctx.budget {
                        continue;
                    }
                    c.run(format!("count({d},{m},{n},{p})"), || {
                        let brute = count_points(d, m, n, p, ctx.budget)?;
                        let formula = closed_form_count(d, m, n, p);
                        Ok((formula == brute.into(), format!("brute {brute}, formula {formula}")))
                    });
                }
            }
        }
    }
}

/// Generated jet tuples cycling through `d ≤ 6, m ≤ 3, n ≤ 3`; indices with
/// `i mod 10 < 3` are forced degenerate, so 30% of the sample shares a factor.
pub fn jet_sample(count: usize, seed: u64) -> Vec<(crate::jet::QTuple, bool)> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let d = 1 + (i % 6) as u32;
            let m = 1 + (i / 6 % 3) as u32;
            let mut n = 1 + (i / 18 % 3) as u32;
            if (m, n) == (1, 1) {
                n = 2;
            }
            let degenerate = i % 10 < 3;
            (random_tuple(&mut rng, d, m, n, degenerate), degenerate)
        })
        .collect()
}

fn jet(c: &mut Checks) {
    c.run("1000 generated tuples, d<=6 m<=3 n<=3".into(), || {
        let sample = jet_sample(1000, 0x6a65_74);
        let forced = sample.iter().filter(|(_, deg)| *deg).count();
        let disagreements = sample.iter().filter(|(t, _)| !jet_equivalence_check(t).agree()).count();
        let ok = disagreements == 0 && forced * 10 >= sample.len() * 3;
        Ok((ok, format!("{disagreements} disagreements, {forced} forced-degenerate")))
    });
}

fn cells(ctx: &VerifyContext, c: &mut Checks) {
    let e = &ctx.engine;
    for k in 1..=9u32 {
        c.run(format!("C_{k} soundness"), || {
            let mut failures = Vec::new();
            for coeff in [CoefficientSystem::Trivial, CoefficientSystem::Sign] {
                if let Err(err) = build_fn_complex(k, coeff, e.k_max()) {
                    failures.push(format!("{coeff:?}: {err}"));
                }
            }
            let triv = e.config_homology(k, CoefficientSystem::Trivial, Ring::Integers)?;
            let sign = e.config_homology(k, CoefficientSystem::Sign, Ring::Integers)?;
            if triv.get(0) != AbelianGroup::free(1) {
                failures.push("H_0(C_k; Z) != Z".into());
            }
            if k >= 2 {
                if triv.get(1) != AbelianGroup::free(1) {
                    failures.push("H_1(C_k; Z) != Z".into());
                }
                if sign.get(0) != AbelianGroup::cyclic(2) {
                    failures.push("H_0(C_k; ±Z) != Z/2".into());
                }
                if triv.top_degree().unwrap_or(0) >= k as i64 || sign.top_degree().unwrap_or(0) >= k as i64 {
                    failures.push("nonzero H_i for i >= k".into());
                }
                if !e.config_homology(k, CoefficientSystem::Sign, Ring::Rationals)?.is_zero() {
                    failures.push("H_*(C_k; ±Q) != 0".into());
                }
                for ring in [Ring::Prime(2), Ring::Prime(3), Ring::Rationals] {
                    for coeff in [CoefficientSystem::Trivial, CoefficientSystem::Sign] {
                        let h = e.config_homology(k, coeff, ring)?;
                        let euler: i64 = h.iter().map(|(d, g)| if d % 2 == 0 { 1 } else { -1 } * g.free_rank as i64).sum();
                        if euler != 0 {
                            failures.push(format!("Euler characteristic {euler} over {ring}"));
                        }
                    }
                }
            }
            Ok((failures.is_empty(), failures.join("; ")))
        });
    }
}

/// Mod-2 Poincaré series of a polynomial algebra on generators of degree
/// `2^j - 1`, `j ≥ 1`, by counting partitions into those parts.
pub fn partition_series(through: usize) -> Vec<u64> {
    let mut coeffs = vec![0u64; through + 1];
    coeffs[0] = 1;
    let mut part = 1usize;
    while part <= through {
        for j in part..=through {
            coeffs[j] += coeffs[j - part];
        }
        part = 2 * part + 1;
    }
    coeffs
}

fn series(ctx: &VerifyContext, c: &mut Checks) {
    c.run("Omega^2 S^3 mod 2 through 15".into(), || {
        let s = omega_series(&ctx.engine, 2, Ring::Prime(2), 15)?;
        let oracle = partition_series(15);
        Ok((s.coefficients == oracle, format!("{:?}", s.coefficients)))
    });
    for target in 2..=4u32 {
        c.run(format!("Omega^2 S^{} over Q", 2 * target - 1), || {
            let through = omega_exactness_bound(target, ctx.engine.k_max().min(10));
            let s = omega_series(&ctx.engine, target, Ring::Rationals, through)?;
            let top = 2 * target as i64 - 3;
            let ok = (0..=through).all(|j| s.coefficient(j) == u64::from(j == 0 || j == top));
            Ok((ok, format!("through {through}: {:?}", s.coefficients)))
        });
    }
}

fn stability(ctx: &VerifyContext, c: &mut Checks) {
    for (m, n) in [(2u32, 2u32), (1, 3)] {
        for d in 1..=9u32 {
            for ring in [Ring::Prime(2), Ring::Prime(3), Ring::Rationals] {
                c.run(format!("stable range ({d},{m},{n}) over {ring}"), || {
                    let r = stable_range_check(&ctx.engine, &params(d, m, n)?, ring)?;
                    Ok((r.passed(), format!("D = {}, deviation {:?}", r.stability_dimension, r.observed_deviation)))
                });
            }
        }
    }
}

fn d2(ctx: &VerifyContext, c: &mut Checks) {
    c.run("D_2 = Z/2 in degree 2".into(), || {
        let h = ctx.engine.dk_homology(2, Ring::Integers)?;
        let expected: GradedAbelianGroup = [(2, AbelianGroup::cyclic(2))].into_iter().collect();
        Ok((h == expected, format!("{h}")))
    });
}

fn e1(ctx: &VerifyContext, c: &mut Checks) {
    let poly_params = [(2, 1, 2), (4, 1, 2), (6, 1, 2), (5, 2, 2), (6, 1, 3), (3, 3, 1), (4, 2, 1)];
    for (d, m, n) in poly_params {
        c.run(format!("E1 poly ({d},{m},{n})"), || {
            let p = params(d, m, n)?;
            let mut ok = true;
            let page = e1_page(&ctx.engine, &Space::Poly(p), Ring::Integers)?;
            ok &= page.get(0, 0) == AbelianGroup::free(1);
            ok &= page.entries().all(|((k, s), _)| page.in_support(k, s));
            for k in 1..=p.summands() {
                let l = bundle_rank(&Space::Poly(p), k)?;
                let (d, m, n, k) = (d as i64, m as i64, n as i64, k as i64);
                for s in 0..4 * m * n * k {
                    ok &= (2 * m * d + k - s - 1) - l == 2 * m * n * k - s;
                }
            }
            for ring in [Ring::Prime(2), Ring::Prime(3), Ring::Rationals] {
                let page = e1_page(&ctx.engine, &Space::Poly(p), ring)?;
                let table = poly_homology(&ctx.engine, &p, ring)?;
                let top = table.groups.top_degree().unwrap_or(0) + 2;
                ok &= (0..=top).all(|j| page.antidiagonal_dimension(j) == table.dimension(j));
            }
            Ok((ok, String::new()))
        });
    }
    for (d, target) in [(1, 2), (3, 2), (2, 3), (4, 4)] {
        c.run(format!("E1 hol ({d},{target})"), || {
            let h = HolParams::new(d, target)?;
            let page = e1_page(&ctx.engine, &Space::Hol(h), Ring::Prime(2))?;
            let table = hol_homology(&ctx.engine, &h, Ring::Prime(2))?;
            let top = table.groups.top_degree().unwrap_or(0) + 2;
            let ok = page.entries().all(|((k, s), _)| page.in_support(k, s))
                && (0..=top).all(|j| page.antidiagonal_dimension(j) == table.dimension(j));
            Ok((ok, String::new()))
        });
    }
}

fn poly_hol(ctx: &VerifyContext, c: &mut Checks) {
    for (d, m, n) in [(4, 1, 2), (2, 2, 2), (1, 2, 2), (7, 1, 3), (9, 2, 2), (5, 3, 1), (8, 1, 2)] {
        for ring in [Ring::Integers, Ring::Prime(2), Ring::Rationals] {
            c.run(format!("poly({d},{m},{n}) = hol over {ring}"), || {
                let r = theorem4_check(&ctx.engine, &params(d, m, n)?, ring)?;
                Ok((r.equal, format!("{}", r.poly_table.groups)))
            });
        }
    }
}
