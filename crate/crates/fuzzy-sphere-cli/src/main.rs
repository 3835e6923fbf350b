//! Command-line front end for the fuzzy-sphere kernel.
//!
//! Every subcommand prints a single JSON document on stdout (except
//! `sphere-eval`, which dumps plain-text grid rows). Exit codes: 0 on
//! success, 1 on a domain error (reported as `{"error": ...}`), 2 on a
//! usage error.

mod suites;

use clap::{Parser, Subcommand};
use fuzzy_sphere::basis::{BasisCache, BasisDecomp, LadderOp};
use fuzzy_sphere::freealg::{self, NormalForm};
use fuzzy_sphere::matrep;
use fuzzy_sphere::sphere;
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "fuzzy-sphere",
    about = "Exact symbolic kernel for the two-parameter fuzzy-sphere algebra",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reduce an expression to the canonical ladder normal form.
    Normalize {
        expr: String,
        /// Include the rewrite-step count in the output.
        #[arg(long)]
        steps: bool,
    },
    /// Expand an expression over the orthogonal basis.
    Decompose {
        expr: String,
        /// Use the evaluate-and-interpolate route instead of the
        /// reference projection (identical output).
        #[arg(long)]
        fast: bool,
        /// Evaluate the coefficients at k = <rat> (with --u).
        #[arg(long)]
        kappa: Option<String>,
        /// Evaluate the coefficients at u = <rat> (with --kappa).
        #[arg(long)]
        u: Option<String>,
    },
    /// Exact bilinear pairing of two expressions.
    Inner {
        f: String,
        g: String,
        #[arg(long)]
        kappa: Option<String>,
        #[arg(long)]
        u: Option<String>,
    },
    /// Hermitian conjugate, in normal form.
    Conjugate { expr: String },
    /// Apply a ladder/Laplacian operator on the basis expansion.
    Apply {
        /// One of: ex, ey, ez, ep, em, delta.
        #[arg(long)]
        op: String,
        expr: String,
    },
    /// Exact N x N matrix image of an expression.
    Matrix {
        expr: String,
        #[arg(long = "N")]
        n: usize,
    },
    /// Commutator limit of two expressions as a sphere function.
    Moyal {
        f: String,
        g: String,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
    },
    /// Evaluate an expression's commutative limit on a grid
    /// (plain-text rows: theta phi re im).
    SphereEval {
        expr: String,
        /// Grid size as <n_theta>x<n_phi>.
        #[arg(long, default_value = "33x64")]
        grid: String,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
    },
    /// Run a named invariant suite; exits 0 iff every check passes.
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 4)]
        nmax: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Compare the fast and direct decomposition routes on seeded
    /// random dense inputs.
    Bench {
        #[arg(long)]
        degree: u32,
        #[arg(long, default_value_t = 1)]
        trials: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Skip the direct (rewriting) route.
        #[arg(long)]
        no_direct: bool,
    },
}

fn parse_rational(text: &str) -> Result<BigRational, String> {
    let parts: Vec<&str> = text.split('/').collect();
    let parse_int = |s: &str| -> Result<BigInt, String> {
        s.trim()
            .parse::<BigInt>()
            .map_err(|_| format!("invalid rational `{text}`"))
    };
    match parts.as_slice() {
        [a] => Ok(BigRational::from(parse_int(a)?)),
        [a, b] => {
            let den = parse_int(b)?;
            if den == BigInt::from(0) {
                return Err(format!("zero denominator in `{text}`"));
            }
            Ok(BigRational::new(parse_int(a)?, den))
        }
        _ => Err(format!("invalid rational `{text}`")),
    }
}

fn normal_form_json(nf: &NormalForm) -> Value {
    let terms: Vec<Value> = nf
        .terms()
        .map(|(&(a, b, c), coeff)| json!({"a": a, "b": b, "c": c, "coeff": coeff.to_string()}))
        .collect();
    json!({ "normal_form": terms })
}

fn decomp_json(d: &BasisDecomp) -> Value {
    let terms: Vec<Value> = d
        .terms()
        .map(|(&(n, m), coeff)| json!({"n": n, "m": m, "coeff": coeff.to_string()}))
        .collect();
    json!({ "basis": "T", "terms": terms })
}

fn usage_to_domain(msg: String) -> fuzzy_sphere::Error {
    fuzzy_sphere::Error::DomainError(msg)
}

fn parse_grid(text: &str) -> Result<(usize, usize), String> {
    let parts: Vec<&str> = text.split('x').collect();
    if parts.len() != 2 {
        return Err(format!("invalid grid `{text}`, expected <n>x<m>"));
    }
    let a = parts[0]
        .parse::<usize>()
        .map_err(|_| format!("invalid grid `{text}`"))?;
    let b = parts[1]
        .parse::<usize>()
        .map_err(|_| format!("invalid grid `{text}`"))?;
    if a == 0 || b == 0 {
        return Err(format!("grid `{text}` must be positive"));
    }
    Ok((a, b))
}

fn run() -> Result<Value, fuzzy_sphere::Error> {
    let cli = Cli::parse();
    let basis = BasisCache::new();

    match cli.command {
        Command::Normalize { expr, steps } => {
            let parsed = freealg::parse(&expr)?;
            let (nf, count) = freealg::normalize_counted(&parsed)?;
            let mut out = normal_form_json(&nf);
            if steps {
                out["rewrite_steps"] = json!(count);
            }
            Ok(out)
        }
        Command::Decompose {
            expr,
            fast,
            kappa,
            u,
        } => {
            let nf = freealg::normalize(&freealg::parse(&expr)?)?;
            let d = if fast {
                matrep::decompose_fast(&basis, &nf)?
            } else {
                basis.decompose(&nf)?
            };
            let mut out = decomp_json(&d);
            if let (Some(k_text), Some(u_text)) = (kappa.as_deref(), u.as_deref()) {
                let k0 = parse_rational(k_text).map_err(usage_to_domain)?;
                let u0 = parse_rational(u_text).map_err(usage_to_domain)?;
                let (values, degenerate) = d.evaluate_at(&k0, &u0)?;
                out["values"] = Value::Array(
                    values
                        .iter()
                        .map(|(&(n, m), v)| json!({"n": n, "m": m, "value": v.to_string()}))
                        .collect(),
                );
                out["degenerate"] = json!(degenerate);
            }
            Ok(out)
        }
        Command::Inner { f, g, kappa, u } => {
            let nf = freealg::normalize(&freealg::parse(&f)?)?;
            let ng = freealg::normalize(&freealg::parse(&g)?)?;
            let val = basis.inner(&nf, &ng);
            let mut out = json!({ "inner": val.to_string() });
            if let (Some(k_text), Some(u_text)) = (kappa.as_deref(), u.as_deref()) {
                let k0 = parse_rational(k_text).map_err(usage_to_domain)?;
                let u0 = parse_rational(u_text).map_err(usage_to_domain)?;
                out["value"] = json!(val.eval(&k0, &u0)?.to_string());
            }
            Ok(out)
        }
        Command::Conjugate { expr } => {
            let nf = freealg::normalize(&freealg::parse(&expr)?)?;
            Ok(normal_form_json(&nf.dagger()))
        }
        Command::Apply { op, expr } => {
            let op = LadderOp::parse(&op).ok_or_else(|| {
                fuzzy_sphere::Error::DomainError(format!(
                    "unknown operator `{op}` (expected ex|ey|ez|ep|em|delta)"
                ))
            })?;
            let nf = freealg::normalize(&freealg::parse(&expr)?)?;
            let d = basis.decompose(&nf)?;
            Ok(decomp_json(&basis.apply_operator(op, &d)))
        }
        Command::Matrix { expr, n } => {
            let nf = freealg::normalize(&freealg::parse(&expr)?)?;
            let mat = matrep::phi_n(&nf, n)?;
            let rows: Vec<Value> = (0..mat.size())
                .map(|r| {
                    Value::Array(
                        (0..mat.size())
                            .map(|c| json!(mat.at(r, c).to_string()))
                            .collect(),
                    )
                })
                .collect();
            Ok(json!({ "N": n, "entries": rows }))
        }
        Command::Moyal { f, g, radius } => {
            let nf = freealg::normalize(&freealg::parse(&f)?)?;
            let ng = freealg::normalize(&freealg::parse(&g)?)?;
            let out = sphere::moyal_limit(&basis, &nf, &ng, radius)?;
            let harmonics: Vec<Value> = out
                .harmonics()
                .iter()
                .map(|(&(n, m), c)| json!({"n": n, "m": m, "re": c.re, "im": c.im}))
                .collect();
            Ok(json!({ "radius": radius, "harmonics": harmonics }))
        }
        Command::SphereEval { expr, grid, radius } => {
            let (n_theta, n_phi) = parse_grid(&grid).map_err(usage_to_domain)?;
            let nf = freealg::normalize(&freealg::parse(&expr)?)?;
            let d = basis.decompose(&nf)?;
            let f = sphere::to_sphere(&basis, &d, radius)?;
            let mut text = String::new();
            for (theta, phi) in sphere::grid(n_theta, n_phi) {
                let v = f.eval(theta, phi);
                text.push_str(&format!("{theta} {phi} {} {}\n", v.re, v.im));
            }
            print!("{text}");
            Ok(Value::Null)
        }
        Command::Verify { suite, nmax, seed } => {
            let report = suites::run(&suite, nmax, seed).ok_or_else(|| {
                fuzzy_sphere::Error::DomainError(format!(
                    "unknown suite `{suite}` (available: {})",
                    suites::SUITE_NAMES.join(", ")
                ))
            })?;
            let passed = report.failures.is_empty();
            let out = json!({
                "suite": suite,
                "nmax": nmax,
                "checks": report.checks,
                "failures": report.failures,
                "passed": passed,
            });
            if !passed {
                println!("{}", serde_json::to_string(&out).unwrap());
                std::process::exit(1);
            }
            Ok(out)
        }
        Command::Bench {
            degree,
            trials,
            seed,
            no_direct,
        } => {
            let report = matrep::bench_decompose(&basis, degree, trials, seed, !no_direct)?;
            Ok(json!({
                "degree": report.degree,
                "fast_ms": report.fast_ms,
                "direct_ms": report.direct_ms,
                "direct_rewrite_steps": report.direct_rewrite_steps,
                "agree": report.agree,
            }))
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(Value::Null) => ExitCode::SUCCESS,
        Ok(value) => {
            println!("{}", serde_json::to_string(&value).unwrap());
            ExitCode::SUCCESS
        }
        Err(err) => {
            println!(
                "{}",
                serde_json::to_string(&json!({"error": err.to_string()})).unwrap()
            );
            ExitCode::from(1)
        }
    }
}
