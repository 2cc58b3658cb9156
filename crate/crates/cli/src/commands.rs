use clap::Args;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use freewick::bounds::{masterineq_check, PermutationSpec, ProfileParams};
use freewick::combin::{enumerate_configurations, remark_configuration, verify_bounds};
use freewick::ncalg::{NcPoly, Word};
use freewick::rmt::{
    expansion_coefficients, gue_exact_mixed_moment, mc_lp_norm, mc_moment,
    strong_convergence_experiment, tail_check,
};
use freewick::wick::{edgtn_lhs, edgtn_rhs_terms, free_trace, hkz_route, CovarianceSpec};
use freewick::{Error, Result};

use crate::parse;

pub struct Outcome {
    pub report: Value,
    pub pass: bool,
}

fn ok(report: Value) -> Result<Outcome> {
    Ok(Outcome { report, pass: true })
}

/// 1 for failed assertions, 2 for bad input.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Consistency(_) | Error::BoundViolation(_) | Error::NoConvergence { .. } => 1,
        _ => 2,
    }
}

fn to_value<T: serde::Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("serializable")
}

#[derive(Args, Debug)]
pub struct MomentsArgs {
    /// Scalar polynomial, e.g. X1^4 or X1X2X1X2.
    #[arg(long)]
    pub word: String,
    #[arg(long = "N")]
    pub n: Option<u64>,
    /// Highest power of 1/N^2 to list (default: all nonzero).
    #[arg(long)]
    pub pmax: Option<usize>,
    /// Monte Carlo samples (needs --N).
    #[arg(long)]
    pub mc: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

pub fn moments(a: &MomentsArgs) -> Result<Outcome> {
    let p = parse::poly(&a.word)?;
    if p.has_deterministic() {
        return Err(Error::InvalidInput("moments take X letters only".into()));
    }
    let max_len = p.terms().map(|(w, _)| w.len()).max().unwrap_or(0);
    let pmax = a.pmax.unwrap_or(max_len / 2);
    let mut coeffs = vec![freewick::C64::new(0.0, 0.0); pmax + 1];
    let mut exact = freewick::C64::new(0.0, 0.0);
    let mut rational = None;
    for (w, c) in p.terms() {
        let slots = w.x_slots().unwrap_or_default();
        for (g, alpha) in expansion_coefficients(&slots, pmax)?.iter().enumerate() {
            coeffs[g] += c[(0, 0)] * alpha.to_string().parse::<f64>().unwrap_or(f64::NAN);
        }
        if let Some(n) = a.n {
            let m = gue_exact_mixed_moment(&slots)?;
            exact += c[(0, 0)] * m.eval_f64(n);
            if p.len() == 1 && c[(0, 0)] == freewick::C64::new(1.0, 0.0) {
                rational = Some(m.eval(n).to_string());
            }
        }
    }
    let tr = free_trace(&p)?;
    let mut report = json!({
        "word": p.to_string(),
        "free_trace": tr.re,
        "coefficients": coeffs.iter().map(|z| z.re).collect::<Vec<_>>(),
    });
    if coeffs.iter().any(|z| z.im != 0.0) || tr.im != 0.0 {
        report["free_trace_im"] = json!(tr.im);
        report["coefficients_im"] = json!(coeffs.iter().map(|z| z.im).collect::<Vec<_>>());
    }
    if let Some(n) = a.n {
        report["N"] = json!(n);
        report["exact"] = json!(exact.re);
        if let Some(r) = rational {
            report["exact_rational"] = json!(r);
        }
    }
    if let Some(samples) = a.mc {
        let n =
            a.n.ok_or_else(|| Error::InvalidInput("--mc needs --N".into()))?;
        let row = mc_moment(&p, 1, n as usize, samples, a.seed)?;
        report["mc_mean"] = json!(row.mc_mean);
        report["mc_stderr"] = json!(row.mc_stderr);
        report["samples"] = json!(samples);
        report["seed"] = json!(a.seed);
    }
    ok(report)
}

#[derive(Args, Debug)]
pub struct ConfigsArgs {
    #[arg(long)]
    pub n: usize,
    /// Report the fan-plus-boundary configuration.
    #[arg(long)]
    pub check_remark: bool,
    /// Include every configuration.
    #[arg(long)]
    pub dump: bool,
}

pub fn configs(a: &ConfigsArgs) -> Result<Outcome> {
    let r = verify_bounds(a.n)?;
    let mut report = to_value(&r);
    report["pass"] = json!(true);
    if a.check_remark {
        let k = remark_configuration(a.n)?;
        report["remark_chords"] = json!(k.to_json().chords);
        report["remark_attains"] = json!(r.remark_ck == r.bound_4n6);
    }
    if a.dump {
        let all: Vec<Value> = enumerate_configurations(a.n)?
            .iter()
            .map(|k| json!({ "chords": serde_json::to_string(&k.to_json().chords).expect("serializable"), "cK": k.c_k() }))
            .collect();
        report["configurations"] = json!(all);
    }
    ok(report)
}

#[derive(Args, Debug)]
pub struct WickArgs {
    /// Comma-separated monomials, one per family.
    #[arg(long, conflicts_with = "random")]
    pub words: Option<String>,
    /// Covariance as JSON rows; a bare `c` is replaced by --c.
    #[arg(long)]
    pub kappa: Option<String>,
    #[arg(long)]
    pub c: Option<f64>,
    /// Random monomials and covariances instead of --words.
    #[arg(long)]
    pub random: bool,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 3)]
    pub maxdeg: usize,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

fn wick_instance(words: &[Word], kappa: &CovarianceSpec) -> Result<(f64, f64, f64, Vec<Value>)> {
    let lhs = edgtn_lhs(words, kappa)?;
    let terms = edgtn_rhs_terms(words, kappa)?;
    let values: Vec<f64> = terms.iter().map(|t| t.value).collect();
    let rhs = freewick::linalg::pairwise_sum(&values);
    let hkz = hkz_route(words, kappa)?;
    Ok((lhs, rhs, hkz, terms.iter().map(to_value).collect()))
}

pub fn wick_verify(a: &WickArgs) -> Result<Outcome> {
    if a.random {
        if a.n == 0 || a.d == 0 || a.trials == 0 {
            return Err(Error::InvalidInput(
                "--n, --d and --trials must be positive".into(),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
        let mut rows = Vec::new();
        let mut all = true;
        for t in 0..a.trials {
            let words: Vec<Word> = (0..a.n)
                .map(|_| {
                    let len = rng.random_range(0..=a.maxdeg);
                    Word::from_x(
                        &(0..len)
                            .map(|_| rng.random_range(1..=a.d))
                            .collect::<Vec<_>>(),
                    )
                })
                .collect();
            let kappa = CovarianceSpec::random(a.n, &mut rng);
            let (lhs, rhs, hkz, _) = wick_instance(&words, &kappa)?;
            let diff = (lhs - rhs).abs().max((lhs - hkz).abs());
            let pass = diff <= a.tol;
            all &= pass;
            let shown: Vec<String> = words.iter().map(Word::to_string).collect();
            rows.push(json!({ "trial": t, "words": shown.join(" | "), "lhs": lhs, "rhs": rhs, "hkz": hkz, "diff": diff, "pass": pass }));
        }
        let report = json!({ "n": a.n, "maxdeg": a.maxdeg, "d": a.d, "trials": a.trials, "seed": a.seed, "tol": a.tol, "pass": all, "rows": rows });
        return Ok(Outcome { report, pass: all });
    }
    let text = a
        .words
        .as_deref()
        .ok_or_else(|| Error::InvalidInput("pass --words or --random".into()))?;
    let words = text
        .split(',')
        .map(|w| parse::word(w.trim()))
        .collect::<Result<Vec<_>>>()?;
    let kappa = match &a.kappa {
        Some(k) => CovarianceSpec::from_rows(&parse::real_rows(k, a.c)?)?,
        None => CovarianceSpec::identity(words.len()),
    };
    let (lhs, rhs, hkz, terms) = wick_instance(&words, &kappa)?;
    let pass = (lhs - rhs).abs() <= a.tol && (lhs - hkz).abs() <= a.tol;
    let rows: Vec<Vec<f64>> = (0..kappa.n())
        .map(|i| (0..kappa.n()).map(|j| kappa.get(i, j)).collect())
        .collect();
    let report = json!({
        "words": words.iter().map(Word::to_string).collect::<Vec<_>>().join(","),
        "kappa": serde_json::to_string(&rows).expect("serializable"),
        "lhs": lhs,
        "rhs": rhs,
        "hkz": hkz,
        "pass": pass,
        "terms": terms.iter().map(|t| json!({
            "K": t["K"].to_string(),
            "splits": t["splits"].to_string(),
            "value": t["value"],
        })).collect::<Vec<_>>(),
    });
    Ok(Outcome { report, pass })
}

#[derive(Args, Debug)]
pub struct MasterArgs {
    /// Comma-separated scalar polynomials.
    #[arg(long)]
    pub polys: Option<String>,
    /// Polynomial JSON files (matrix coefficients allowed); repeat per factor.
    #[arg(long = "json")]
    pub json: Vec<String>,
    /// Images of 1..n, comma separated (default: identity).
    #[arg(long)]
    pub sigma: Option<String>,
    /// Largest matrix dimension per norm evaluation.
    #[arg(long, default_value_t = 1024)]
    pub budget: usize,
}

pub fn masterineq(a: &MasterArgs) -> Result<Outcome> {
    let mut polys: Vec<NcPoly> = match &a.polys {
        Some(t) => t
            .split(',')
            .map(|s| parse::poly(s.trim()))
            .collect::<Result<_>>()?,
        None => Vec::new(),
    };
    for path in &a.json {
        polys.push(parse::poly_json_file(path)?);
    }
    if polys.is_empty() {
        return Err(Error::InvalidInput("pass --polys or --json".into()));
    }
    let sigma = match &a.sigma {
        Some(s) => PermutationSpec::new(parse::list(s)?)?,
        None => PermutationSpec::identity(polys.len()),
    };
    let params = ProfileParams {
        dim_budget: a.budget,
        ..ProfileParams::default()
    };
    let r = masterineq_check(&polys, &sigma, &params)?;
    let pass = r.pass;
    let mut report = json!({ "n": r.n, "sigma": r.sigma, "lhs": r.lhs, "rhs": r.rhs, "alpha": r.alpha, "pass": r.pass });
    report["profiles"] = json!(r.profiles);
    report["lhs_level"] = json!(r.lhs_level);
    Ok(Outcome { report, pass })
}

#[derive(Args, Debug)]
pub struct McArgs {
    #[arg(long)]
    pub poly: String,
    /// Comma-separated matrix sizes.
    #[arg(long = "N")]
    pub n: String,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Estimate E ts_N(P^k) instead of the L^{2k} norm.
    #[arg(long)]
    pub moment: bool,
}

pub fn mc(a: &McArgs) -> Result<Outcome> {
    let p = parse::poly(&a.poly)?;
    let rows = parse::list::<usize>(&a.n)?
        .into_iter()
        .map(|n| {
            if a.moment {
                mc_moment(&p, a.k, n, a.samples, a.seed)
            } else {
                mc_lp_norm(&p, a.k, n, a.samples, a.seed)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    ok(json!({ "rows": rows }))
}

#[derive(Args, Debug)]
pub struct StrongArgs {
    /// Polynomial in X letters and Y (or Z) letters.
    #[arg(long)]
    pub poly: String,
    /// Matrix for Y1, Y2, ..: diag(..) or JSON rows; repeat per letter.
    #[arg(long = "Y")]
    pub y: Vec<String>,
    #[arg(long = "N", default_value = "64,128,256")]
    pub n: String,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

pub fn strongconv(a: &StrongArgs) -> Result<Outcome> {
    let p = parse::poly(&a.poly)?;
    let ys =
        a.y.iter()
            .map(|s| parse::matrix(s))
            .collect::<Result<Vec<_>>>()?;
    let grid = parse::list::<usize>(&a.n)?;
    let r = strong_convergence_experiment(&p, &grid, &ys, a.k, a.samples, a.seed)?;
    let shrinking = r.rows.windows(2).all(|w| w[1].gap.abs() <= w[0].gap.abs());
    ok(json!({
        "poly": p.to_string(),
        "k": r.k,
        "M": r.m,
        "samples": r.samples,
        "seed": r.seed,
        "free_norm": r.free.value,
        "free_uncertainty": r.free.uncertainty,
        "free_level": r.free.level,
        "free_converged": r.free.converged,
        "gap_shrinking": shrinking,
        "rows": r.rows,
    }))
}

#[derive(Args, Debug)]
pub struct TailArgs {
    #[arg(long = "N")]
    pub n: String,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

pub fn tail(a: &TailArgs) -> Result<Outcome> {
    let mut rows = Vec::new();
    let mut pass = true;
    for n in parse::list::<usize>(&a.n)? {
        let r = tail_check(n, a.samples, a.seed)?;
        pass &= r.rows.windows(2).all(|w| w[1].freq <= w[0].freq);
        for t in &r.rows {
            rows.push(json!({ "N": n, "median": r.median, "u": t.u, "exceed": t.exceed, "freq": t.freq, "wilson_lo": t.wilson_lo, "wilson_hi": t.wilson_hi }));
        }
    }
    Ok(Outcome {
        report: json!({ "samples": a.samples, "seed": a.seed, "pass": pass, "rows": rows }),
        pass,
    })
}
