mod report;

use std::io::{self, BufRead, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use polystab_core::arith::{closed_form_count, count_points, DEFAULT_BUDGET};
use polystab_core::braid::{BraidEngine, HomologyCache, DEFAULT_K_MAX};
use polystab_core::jet::{jet_equivalence_check, QTuple};
use polystab_core::polyspaces::{
    e1_page, hol_homology, omega_exactness_bound, omega_series, poly_homology, stability_dimension, HolParams,
    Params, Space,
};
use polystab_core::verify::{run_suite, VerifyContext};
use polystab_core::{Error, Ring};

const EXIT_INVALID: u8 = 1;
const EXIT_VERIFY_FAILED: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "polystab", version, about = "Exact homology of polynomial-tuple spaces and their stable limits")]
struct Cli {
    /// Emit a single JSON document on stdout.
    #[arg(long, global = true)]
    json: bool,

    /// Largest configuration size k for the braid cell model.
    #[arg(long, global = true, default_value_t = DEFAULT_K_MAX)]
    kmax: u32,

    /// Cache directory (falls back to $POLYSTAB_CACHE, then the user cache dir).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,

    /// Do not read or write the on-disk cache.
    #[arg(long, global = true)]
    no_cache: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
struct PolyArgs {
    #[arg(long)]
    d: u32,
    #[arg(long)]
    m: u32,
    #[arg(long)]
    n: u32,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Homology of Poly^{d,m}_n.
    Betti {
        #[command(flatten)]
        p: PolyArgs,
        #[arg(long, default_value = "z")]
        ring: String,
    },
    /// Homology of based degree-d holomorphic maps S^2 -> CP^{N-1}.
    HolBetti {
        #[arg(long)]
        d: u32,
        /// N, so the target is CP^{N-1}.
        #[arg(long = "target-dim")]
        target_dim: u32,
        #[arg(long, default_value = "z")]
        ring: String,
    },
    /// E^1 page of the discriminant spectral sequence.
    E1 {
        #[arg(long, value_enum, default_value_t = Flavor::Poly)]
        flavor: Flavor,
        #[arg(long)]
        d: u32,
        #[arg(long, required_if_eq("flavor", "poly"))]
        m: Option<u32>,
        #[arg(long, required_if_eq("flavor", "poly"))]
        n: Option<u32>,
        #[arg(long = "target-dim", required_if_eq("flavor", "hol"))]
        target_dim: Option<u32>,
        #[arg(long, default_value = "z")]
        ring: String,
    },
    /// Poincare series of the double loop space of S^{2N-1} over a field.
    StableSeries {
        #[arg(long = "target-dim")]
        target_dim: u32,
        #[arg(long, default_value = "f2")]
        ring: String,
        /// Last degree to report; defaults to the exactness bound.
        #[arg(long)]
        through: Option<i64>,
    },
    /// Stability dimension D(d;m,n).
    StabilityDim {
        #[command(flatten)]
        p: PolyArgs,
    },
    /// Number of F_p-points of Poly^{d,m}_n.
    Count {
        #[command(flatten)]
        p: PolyArgs,
        /// The prime p.
        #[arg(long = "p")]
        prime: u64,
        #[arg(long, value_enum, default_value_t = CountMode::Both)]
        mode: CountMode,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
    },
    /// Jet map and membership tests on rational tuples read one per line.
    Jet {
        #[arg(long)]
        n: u32,
        /// Input file; standard input when absent.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Run a verification suite ("all" for every suite).
    Verify {
        suite: String,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
    },
    /// Inspect or clear the braid homology cache.
    Cache {
        #[arg(value_enum)]
        action: CacheAction,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Flavor {
    Poly,
    Hol,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum CountMode {
    Brute,
    Formula,
    Both,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum CacheAction {
    Stats,
    Clear,
}

/// What a command produced: the JSON document and its text rendering.
struct Output {
    doc: Value,
    text: String,
    exit: u8,
}

impl Output {
    fn ok(doc: Value, text: String) -> Self {
        Output { doc, text, exit: 0 }
    }
}

fn cache_dir(cli: &Cli) -> PathBuf {
    if let Some(dir) = &cli.cache_dir {
        return dir.clone();
    }
    if let Some(dir) = std::env::var_os("POLYSTAB_CACHE") {
        return dir.into();
    }
    let base = std::env::var_os("XDG_CACHE_HOME")
        .map(PathBuf::from)
        .or_else(|| std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache")))
        .unwrap_or_else(std::env::temp_dir);
    base.join("polystab")
}

fn open_cache(cli: &Cli) -> Option<HomologyCache> {
    if cli.no_cache {
        return None;
    }
    let dir = cache_dir(cli);
    match HomologyCache::open(&dir) {
        Ok(c) => Some(c),
        Err(e) => {
            log::warn!("cache disabled, cannot open {}: {e}", dir.display());
            None
        }
    }
}

fn engine(cli: &Cli) -> BraidEngine {
    let e = BraidEngine::new(cli.kmax);
    match open_cache(cli) {
        Some(c) => e.with_cache(c),
        None => e,
    }
}

fn poly_params(p: &PolyArgs) -> Result<Params, Error> {
    Params::new(p.d, p.m, p.n)
}

fn run(cli: &Cli) -> Result<Output, Error> {
    match &cli.command {
        Command::Betti { p, ring } => {
            let ring = Ring::parse(ring)?;
            let params = poly_params(p)?;
            let table = poly_homology(&engine(cli), &params, ring)?;
            let (result, exact, notes) = report::table_payload(&table);
            let text = format!("H_*(Poly^{{{},{}}}_{}; {ring})\n{}", p.d, p.m, p.n, report::graded_text(&table.groups, ring));
            let parameters = json!({"d": p.d, "m": p.m, "n": p.n, "ring": ring.tag()});
            Ok(Output::ok(report::document("betti", parameters, result, exact, notes), text))
        }
        Command::HolBetti { d, target_dim, ring } => {
            let ring = Ring::parse(ring)?;
            let h = HolParams::new(*d, *target_dim)?;
            let table = hol_homology(&engine(cli), &h, ring)?;
            let (result, exact, notes) = report::table_payload(&table);
            let text = format!("H_*(Hol*_{d}(S^2, CP^{}); {ring})\n{}", target_dim - 1, report::graded_text(&table.groups, ring));
            let parameters = json!({"d": d, "target_dim": target_dim, "ring": ring.tag()});
            Ok(Output::ok(report::document("hol-betti", parameters, result, exact, notes), text))
        }
        Command::E1 { flavor, d, m, n, target_dim, ring } => {
            let ring = Ring::parse(ring)?;
            let (space, parameters) = match flavor {
                Flavor::Poly => {
                    let (m, n) = (m.expect("required by clap"), n.expect("required by clap"));
                    (Space::Poly(Params::new(*d, m, n)?), json!({"flavor": "poly", "d": d, "m": m, "n": n, "ring": ring.tag()}))
                }
                Flavor::Hol => {
                    let t = target_dim.expect("required by clap");
                    (Space::Hol(HolParams::new(*d, t)?), json!({"flavor": "hol", "d": d, "target_dim": t, "ring": ring.tag()}))
                }
            };
            let page = e1_page(&engine(cli), &space, ring)?;
            let mut text = String::from("nonzero E^1_{k,s} (total degree s - k)\n");
            for ((k, s), g) in page.entries() {
                text.push_str(&format!("  k={k:<3} s={s:<4} total={:<4} {g}\n", s - k as i64));
            }
            let notes = vec!["E^1 entries are H_{s-2(N-1)k}(C_k; sign) with N = mn (poly) or N (hol)".to_string()];
            Ok(Output::ok(report::document("e1", parameters, report::e1_value(&page), json!("complete"), notes), text))
        }
        Command::StableSeries { target_dim, ring, through } => {
            let ring = Ring::parse(ring)?;
            let e = engine(cli);
            let bound = omega_exactness_bound(*target_dim, e.k_max());
            let through = through.unwrap_or(bound);
            let series = omega_series(&e, *target_dim, ring, through)?;
            let text = series
                .coefficients
                .iter()
                .enumerate()
                .map(|(j, c)| format!("  dim H_{j:<3} = {c}\n"))
                .collect::<String>();
            let parameters = json!({"target_dim": target_dim, "ring": ring.tag(), "through": through});
            let notes = vec![format!("sum over Snaith summands D_k, k <= {}; exact through degree {bound}", e.k_max())];
            Ok(Output::ok(
                report::document("stable-series", parameters, report::series_value(&series), json!(through), notes),
                text,
            ))
        }
        Command::StabilityDim { p } => {
            let dim = stability_dimension(&poly_params(p)?);
            let parameters = json!({"d": p.d, "m": p.m, "n": p.n});
            Ok(Output::ok(report::document("stability-dim", parameters, json!(dim), json!("complete"), vec![]), format!("{dim}\n")))
        }
        Command::Count { p, prime, mode, budget } => {
            let q = *prime;
            if !polystab_core::exactalg::is_prime(q) {
                return Err(Error::InvalidParameter(format!("{q} is not a prime")));
            }
            poly_params(p)?;
            let brute = match mode {
                CountMode::Formula => None,
                _ => Some(count_points(p.d, p.m, p.n, q, *budget)?),
            };
            let formula = match mode {
                CountMode::Brute => None,
                _ => Some(closed_form_count(p.d, p.m, p.n, q)),
            };
            let equal = match (&brute, &formula) {
                (Some(b), Some(f)) => Some(num_bigint::BigUint::from(*b) == *f),
                _ => None,
            };
            let mut text = String::new();
            if let Some(b) = brute {
                text.push_str(&format!("brute {b}\n"));
            }
            if let Some(f) = &formula {
                text.push_str(&format!("formula {f}\n"));
            }
            if let Some(eq) = equal {
                text.push_str(if eq { "equal\n" } else { "DIFFERENT\n" });
            }
            let result = json!({
                "brute": brute,
                "formula": formula.map(|f| u64::try_from(&f).map(Value::from).unwrap_or_else(|_| json!(f.to_string()))),
                "equal": equal,
            });
            let parameters = json!({"d": p.d, "m": p.m, "n": p.n, "p": q, "mode": format!("{mode:?}").to_lowercase()});
            Ok(Output::ok(report::document("count", parameters, result, json!("complete"), vec![]), text))
        }
        Command::Jet { n, input } => {
            let lines: Vec<String> = match input {
                Some(path) => std::fs::read_to_string(path)?.lines().map(str::to_string).collect(),
                None => io::stdin().lock().lines().collect::<Result<_, _>>()?,
            };
            let mut rows = Vec::new();
            let mut text = String::new();
            let mut all_agree = true;
            for (i, line) in lines.iter().enumerate() {
                if line.trim().is_empty() || line.trim_start().starts_with('#') {
                    continue;
                }
                let t = QTuple::parse_line(line, *n).map_err(|e| Error::Parse(format!("line {}: {e}", i + 1)))?;
                let r = jet_equivalence_check(&t);
                all_agree &= r.agree();
                let jet: Vec<String> = r.jet.iter().map(ToString::to_string).collect();
                text.push_str(&format!(
                    "line {}: poly {} hol {} {}\n  jet: {}\n",
                    i + 1,
                    r.poly_member,
                    r.hol_member,
                    if r.agree() { "agree" } else { "DISAGREE" },
                    jet.join("; ")
                ));
                rows.push(json!({"line": i + 1, "poly_member": r.poly_member, "hol_member": r.hol_member, "agree": r.agree(), "jet": jet}));
            }
            let doc = report::document("jet", json!({"n": n}), Value::Array(rows), json!("complete"), vec![]);
            Ok(Output { doc, text, exit: if all_agree { 0 } else { EXIT_VERIFY_FAILED } })
        }
        Command::Verify { suite, budget } => {
            let ctx = VerifyContext::new(cli.kmax, open_cache(cli), *budget);
            let results = run_suite(&ctx, suite)?;
            let failed = results.iter().filter(|r| !r.passed).count();
            let mut text = String::new();
            let mut rows = Vec::new();
            for r in &results {
                let verdict = if r.passed { "PASS" } else { "FAIL" };
                text.push_str(&format!("{verdict} {:<10} {:<44} {:>8.3}s {}\n", r.suite, r.name, r.elapsed.as_secs_f64(), r.detail));
                rows.push(json!({
                    "suite": r.suite,
                    "check": r.name,
                    "passed": r.passed,
                    "detail": r.detail,
                    "elapsed_ms": r.elapsed.as_millis() as u64,
                }));
            }
            text.push_str(&format!("{} checks, {failed} failed\n", results.len()));
            let result = json!({"checks": rows, "total": results.len(), "failed": failed});
            let doc = report::document("verify", json!({"suite": suite}), result, json!("complete"), vec![]);
            Ok(Output { doc, text, exit: if failed == 0 { 0 } else { EXIT_VERIFY_FAILED } })
        }
        Command::Cache { action } => {
            let cache = HomologyCache::open(cache_dir(cli))?;
            let dir = cache.dir().display().to_string();
            let (result, text) = match action {
                CacheAction::Stats => {
                    let s = cache.stats()?;
                    (json!({"dir": dir, "entries": s.entries, "bytes": s.bytes}), format!("{dir}: {} entries, {} bytes\n", s.entries, s.bytes))
                }
                CacheAction::Clear => {
                    let removed = cache.clear()?;
                    (json!({"dir": dir, "removed": removed}), format!("{dir}: removed {removed} entries\n"))
                }
            };
            let parameters = json!({"action": format!("{action:?}").to_lowercase()});
            Ok(Output::ok(report::document("cache", parameters, result, json!("complete"), vec![]), text))
        }
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::InvalidParameter(_) => "invalid_parameter",
        Error::ShapeMismatch(_) => "shape_mismatch",
        Error::NotAComplex { .. } => "not_a_complex",
        Error::OutOfRange { .. } => "out_of_range",
        Error::BeyondExactness { .. } => "beyond_exactness",
        Error::BudgetExceeded { .. } => "budget_exceeded",
        Error::PrimeMismatch(..) => "prime_mismatch",
        Error::Parse(_) => "parse",
        Error::Io(_) => "io",
    }
}

fn emit(json_mode: bool, doc: &Value, text: &str) {
    let mut out = io::stdout().lock();
    if json_mode {
        let _ = writeln!(out, "{}", serde_json::to_string(doc).expect("serializable"));
    } else {
        let _ = write!(out, "{text}");
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let json_requested = std::env::args().any(|a| a == "--json");
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            if json_requested {
                emit(true, &report::error_document("usage", &e.kind().to_string()), "");
            }
            return ExitCode::from(EXIT_INVALID);
        }
    };
    match run(&cli) {
        Ok(out) => {
            emit(cli.json, &out.doc, &out.text);
            ExitCode::from(out.exit)
        }
        Err(e) => {
            eprintln!("error: {e}");
            if cli.json {
                emit(true, &report::error_document(error_kind(&e), &e.to_string()), "");
            }
            ExitCode::from(EXIT_INVALID)
        }
    }
}
