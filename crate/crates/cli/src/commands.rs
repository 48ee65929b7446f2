use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use xyzcorr::corrfn::{
    correlations, f_in_disc, f_infinity_boundary_defects, f_infinity_branch, f_zeta, regime, symmetry_residual,
    tabulated_f, xxz_triple,
};
use xyzcorr::edoracle::{
    ground_state_even_sector, infer_from, measure_correlations, transfer_check, INVERSION_RADIUS, MAX_SITES,
    MAX_TRANSFER_SITES, SPECTRAL_POINTS, ZETA_SAMPLES,
};
use xyzcorr::pvi::{chain, factorization_check, fpqp_residual, hamilton_residuals, residual_text};
use xyzcorr::qsolver::{ddt_check, f_from_q, qfc_check, solve_q, wronskian_checks};
use xyzcorr::taurec::TauTable;
use xyzcorr::thetanum::{baxter_f_infinity, c64, identity_suite, modular_values, IDENTITY_TOLERANCE, LEMMA_TOLERANCE};

use crate::{EdArgs, Format, QArgs, QCheck, Variable};

#[derive(Debug)]
pub struct UsageError(pub String);

/// Rendered output plus the verification failures it embeds.
#[derive(Debug, Default)]
pub struct Output {
    pub text: String,
    pub failures: Vec<String>,
}

impl Output {
    fn json(value: &impl Serialize, failures: Vec<String>) -> Self {
        let mut text = serde_json::to_string_pretty(value).expect("serializable report");
        text.push('\n');
        Output { text, failures }
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, UsageError> {
    Err(UsageError(msg.into()))
}

/// Accepts `p/q`, integers and terminating decimals.
pub fn parse_rational(text: &str) -> Result<BigRational, UsageError> {
    let t = text.trim();
    if let Some((int_part, frac)) = t.split_once('.') {
        let digits = format!("{int_part}{frac}");
        let num: BigRational = digits.parse().map_err(|_| UsageError(format!("not a number: {text:?}")))?;
        let den = BigRational::from_integer(num_traits::pow(10u32.into(), frac.len()));
        return Ok(num / den);
    }
    t.parse().map_err(|_| UsageError(format!("not a rational: {text:?}")))
}

fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

fn check_tau(im: f64) -> Result<(), UsageError> {
    if !(im > 0.0 && im.is_finite()) {
        return usage(format!("Im tau must be positive, got {im}"));
    }
    Ok(())
}

fn check_n(n: i64) -> Result<(), UsageError> {
    if n < 0 {
        return usage(format!("n must be non-negative, got {n}"));
    }
    Ok(())
}

pub fn tau(n_min: i64, n_max: i64) -> Result<Output, UsageError> {
    if n_min > n_max {
        return usage("n-min exceeds n-max");
    }
    let table = match TauTable::with_range(n_min, n_max) {
        Ok(t) => t,
        Err(e) => return Ok(Output::json(&json!({ "error": e.to_string() }), vec![e.to_string()])),
    };
    let mut failures: Vec<String> = table
        .recursion_residuals()
        .into_iter()
        .filter(|(_, _, r)| !r.is_zero())
        .map(|(fam, n, _)| format!("recursion residual nonzero at n={n} ({fam:?})"))
        .collect();
    failures.extend(
        table.direction_mismatches().into_iter().map(|(fam, n)| format!("direction mismatch at n={n} ({fam:?})")),
    );
    Ok(Output::json(&table.dump(), failures))
}

pub fn f_n(n: i64, variable: Variable) -> Result<Output, UsageError> {
    check_n(n)?;
    let mut table = TauTable::new();
    let result = match variable {
        Variable::Zeta => f_zeta(&mut table, n),
        Variable::Disc => f_in_disc(&mut table, n).map(|f| f.in_disc),
    };
    let f = match result {
        Ok(f) => f,
        Err(e) => return Ok(Output::json(&json!({ "error": e.to_string() }), vec![e.to_string()])),
    };
    let mut failures = Vec::new();
    if variable == Variable::Disc {
        if let Some(want) = tabulated_f(n) {
            if want != f {
                failures.push(format!("f_{n} differs from its tabulated closed form"));
            }
        }
    }
    Ok(Output::json(&f, failures))
}

pub fn corr(n: i64, zeta: &str) -> Result<Output, UsageError> {
    check_n(n)?;
    let z = parse_rational(zeta)?;
    let mut table = TauTable::new();
    match correlations(&mut table, n, &z) {
        Ok(c) => {
            let defect = c.sum_rule_defect(&z);
            let failures = if defect.is_zero() { vec![] } else { vec![format!("sum rule defect {defect}")] };
            let value = json!({
                "n": n,
                "zeta": z.to_string(),
                "cx": c.cx.to_string(),
                "cy": c.cy.to_string(),
                "cz": c.cz.to_string(),
            });
            Ok(Output::json(&value, failures))
        }
        Err(e) => Ok(Output::json(&json!({ "error": e.to_string() }), vec![e.to_string()])),
    }
}

fn zeta_grid(text: &str) -> Result<Vec<BigRational>, UsageError> {
    if text == "default" {
        return Ok(ZETA_SAMPLES.iter().map(|&(p, q)| BigRational::new(p.into(), q.into())).collect());
    }
    if let Some((a, rest)) = text.split_once(':') {
        let (b, k) = rest.split_once(':').ok_or_else(|| UsageError("grid must be start:stop:points".into()))?;
        let (a, b) = (parse_rational(a)?, parse_rational(b)?);
        let k: usize = k.parse().map_err(|_| UsageError(format!("bad point count {k:?}")))?;
        if k < 2 {
            return usage("grid needs at least 2 points");
        }
        let steps = BigRational::from_integer((k - 1).into());
        return Ok((0..k).map(|i| &a + (&b - &a) * BigRational::from_integer(i.into()) / &steps).collect());
    }
    text.split(',').map(parse_rational).collect()
}

#[derive(Serialize)]
struct EdSample {
    #[serde(rename = "L")]
    l: usize,
    zeta: String,
    energy: f64,
    energy_residual: f64,
    f_exact: f64,
    f_inferred: [f64; 3],
    f_agreement: f64,
    inversion_agreement: f64,
    per_bond_spread: f64,
    passed: bool,
}

#[derive(Serialize)]
struct TransferRow {
    #[serde(rename = "L")]
    l: usize,
    tau: f64,
    transfer_residual: f64,
    commutator: f64,
    quasi_periodicity: f64,
    passed: bool,
}

pub fn ed_verify(args: &EdArgs, format: Format) -> Result<Output, UsageError> {
    for &l in &args.lengths {
        if !(3..=MAX_SITES).contains(&l) || l.is_multiple_of(2) {
            return usage(format!("L must be odd with 3 <= L <= {MAX_SITES}, got {l}"));
        }
    }
    let grid = zeta_grid(&args.zeta_grid)?;
    let mut table = TauTable::new();
    let mut samples = Vec::new();
    let mut skipped = Vec::new();
    let mut failures = Vec::new();
    for &l in &args.lengths {
        let n = ((l - 1) / 2) as i64;
        let f = f_zeta(&mut table, n).map_err(|e| UsageError(e.to_string()))?;
        for zq in &grid {
            let z = to_f64(zq);
            let label = format!("L={l} zeta={zq}");
            if (z - 1.0).abs() < INVERSION_RADIUS || (z + 1.0).abs() < INVERSION_RADIUS {
                skipped.push(json!({ "sample": label, "reason": "x/y inversion is singular at zeta = ±1" }));
                continue;
            }
            let run = || -> Result<EdSample, String> {
                let gs = ground_state_even_sector(l, z).map_err(|e| e.to_string())?;
                let c = measure_correlations(&gs);
                let inf = infer_from(&c, z).map_err(|e| e.to_string())?;
                let exact = to_f64(&f.eval(zq).map_err(|e| e.to_string())?);
                let e_want = -(l as f64) * (z * z + 3.0) / 4.0;
                let energy_residual = ((gs.energy - e_want) / e_want).abs();
                let f_agreement = [inf.fx, inf.fy, inf.fz].iter().map(|v| (v - exact).abs()).fold(0.0, f64::max);
                let passed = energy_residual < args.energy_tol
                    && f_agreement < args.f_tol
                    && inf.disagreement() < args.f_tol
                    && c.spread < args.spread_tol;
                Ok(EdSample {
                    l,
                    zeta: zq.to_string(),
                    energy: gs.energy,
                    energy_residual,
                    f_exact: exact,
                    f_inferred: [inf.fx, inf.fy, inf.fz],
                    f_agreement,
                    inversion_agreement: inf.disagreement(),
                    per_bond_spread: c.spread,
                    passed,
                })
            };
            match run() {
                Ok(s) => {
                    if !s.passed {
                        failures.push(format!("{label}: outside tolerance"));
                    }
                    samples.push(s);
                }
                Err(e) => failures.push(format!("{label}: {e}")),
            }
        }
    }
    let mut transfer = Vec::new();
    if args.transfer {
        for &l in args.lengths.iter().filter(|&&l| l <= MAX_TRANSFER_SITES) {
            for t in [0.5, 1.0] {
                match transfer_check(l, c64(0.0, t), &SPECTRAL_POINTS) {
                    Ok(r) => {
                        let passed = r.eigen_residual < args.transfer_tol && r.commutator < 1e-9;
                        if !passed {
                            failures.push(format!("transfer L={l} tau={t}i outside tolerance"));
                        }
                        transfer.push(TransferRow {
                            l,
                            tau: t,
                            transfer_residual: r.eigen_residual,
                            commutator: r.commutator,
                            quasi_periodicity: r.quasi_periodicity,
                            passed,
                        });
                    }
                    Err(e) => failures.push(format!("transfer L={l} tau={t}i: {e}")),
                }
            }
        }
    }
    if format == Format::Csv {
        let mut text =
            String::from("L,zeta,energy,energy_residual,f_exact,f_x,f_y,f_z,f_agreement,per_bond_spread,passed\n");
        for s in &samples {
            text.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{}\n",
                s.l,
                s.zeta,
                s.energy,
                s.energy_residual,
                s.f_exact,
                s.f_inferred[0],
                s.f_inferred[1],
                s.f_inferred[2],
                s.f_agreement,
                s.per_bond_spread,
                s.passed
            ));
        }
        return Ok(Output { text, failures });
    }
    let value = json!({
        "samples": samples,
        "skipped": skipped,
        "transfer": transfer,
        "passed": failures.is_empty(),
    });
    Ok(Output::json(&value, failures))
}

pub fn pvi_verify(n_max: usize) -> Result<Output, UsageError> {
    if n_max > 8 {
        return usage("n-max above 8 is not supported");
    }
    let points = match chain(n_max) {
        Ok(p) => p,
        Err(e) => return Ok(Output::json(&json!({ "error": e.to_string() }), vec![e.to_string()])),
    };
    let mut table = TauTable::new();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (n, pt) in points.iter().enumerate() {
        let n = n as i64;
        let (r1, r2) = hamilton_residuals(pt);
        let fpqp = f_in_disc(&mut table, n)
            .map_err(|e| e.to_string())
            .and_then(|f| fpqp_residual(pt, n, &f.in_disc).map_err(|e| e.to_string()));
        let fpqp_text = match &fpqp {
            Ok(r) => residual_text(r),
            Err(e) => e.clone(),
        };
        let factorization = factorization_check(n);
        let hamilton = [residual_text(&r1), residual_text(&r2)];
        if hamilton.iter().any(|r| r != "0/1") {
            failures.push(format!("n={n}: Hamilton residual nonzero"));
        }
        if fpqp_text != "0/1" {
            failures.push(format!("n={n}: f(p,q) residual {fpqp_text}"));
        }
        if !factorization {
            failures.push(format!("n={n}: factorization fails"));
        }
        rows.push(json!({
            "n": n,
            "params": pt.params,
            "hamilton_residuals": hamilton,
            "fpqp_residual": fpqp_text,
            "factorization": factorization,
        }));
    }
    Ok(Output::json(&json!({ "chain": rows, "passed": failures.is_empty() }), failures))
}

pub fn theta_suite(
    re: f64,
    im: f64,
    seed: u64,
    tol: Option<f64>,
    lemma_tol: Option<f64>,
) -> Result<Output, UsageError> {
    check_tau(im)?;
    let mut report = match identity_suite(c64(re, im), seed) {
        Ok(r) => r,
        Err(e) => return Ok(Output::json(&json!({ "error": e.to_string() }), vec![e.to_string()])),
    };
    let mut failures = Vec::new();
    for e in &mut report.entries {
        let is_lemma = e.tolerance == LEMMA_TOLERANCE;
        e.tolerance = if is_lemma { lemma_tol.unwrap_or(LEMMA_TOLERANCE) } else { tol.unwrap_or(IDENTITY_TOLERANCE) };
        e.passed = e.max_residual < e.tolerance;
        if !e.passed {
            failures.push(format!("{}: {:e}", e.name, e.max_residual));
        }
    }
    report.passed = failures.is_empty();
    Ok(Output::json(&report, failures))
}

pub fn finf(im: f64, tol: f64) -> Result<Output, UsageError> {
    check_tau(im)?;
    match baxter_f_infinity(c64(0.0, im)) {
        Ok(lim) => {
            let failures = if lim.diff < tol { vec![] } else { vec![format!("diff {:e}", lim.diff)] };
            let value = json!({
                "tau": im,
                "zeta": lim.zeta,
                "series": lim.series,
                "closed": lim.closed,
                "diff": lim.diff,
            });
            Ok(Output::json(&value, failures))
        }
        Err(e) => Ok(Output::json(&json!({ "error": e.to_string() }), vec![e.to_string()])),
    }
}

pub fn qsolve(args: &QArgs) -> Result<Output, UsageError> {
    check_tau(args.tau)?;
    if args.n > 4 {
        return usage("qsolve supports n <= 4");
    }
    let tau = c64(0.0, args.tau);
    let qc = match solve_q(args.n, tau) {
        Ok(q) => q,
        Err(e) => return Ok(Output::json(&json!({ "error": e.to_string() }), vec![e.to_string()])),
    };
    let mut failures = Vec::new();
    let mut value = json!({
        "n": args.n,
        "tau": args.tau,
        "nullspace_gap": qc.nullspace_gap,
        "singular_values": qc.singular_values,
        "coefficients": qc.base,
    });
    let mut bad = |name: &str, r: f64, tol: f64| {
        if r.is_nan() || r >= tol {
            failures.push(format!("{name} residual {r:e}"));
        }
    };
    for check in &args.check {
        let (key, report) = match check {
            QCheck::Wronskian => match wronskian_checks(&qc) {
                Ok(w) => {
                    bad("wronskian", w.max_residual.max(w.antisymmetry), args.tol);
                    ("wronskian", serde_json::to_value(w))
                }
                Err(e) => ("wronskian", Ok(json!({ "error": e.to_string() }))),
            },
            QCheck::Ddt => match ddt_check(&qc) {
                Ok(d) => {
                    bad("ddt", d.residual, args.tol);
                    bad("beta", d.beta_residual, args.tol);
                    ("ddt", serde_json::to_value(d))
                }
                Err(e) => ("ddt", Ok(json!({ "error": e.to_string() }))),
            },
            QCheck::Qfc => match qfc_check(&qc) {
                Ok(q) => {
                    bad("qfc", q.residual, args.tol);
                    bad("e decomposition", q.e_decomposition_residual, args.tol);
                    ("qfc", serde_json::to_value(q))
                }
                Err(e) => ("qfc", Ok(json!({ "error": e.to_string() }))),
            },
            QCheck::Fn => {
                let run = || -> Result<Value, String> {
                    let zeta = modular_values(tau).map_err(|e| e.to_string())?.zeta.re;
                    let from_q = f_from_q(&qc).map_err(|e| e.to_string())?;
                    let exact = f_zeta(&mut TauTable::new(), args.n as i64).map_err(|e| e.to_string())?.eval_f64(zeta);
                    Ok(json!({ "zeta": zeta, "from_q": from_q, "exact": exact, "diff": (from_q - exact).norm() }))
                };
                match run() {
                    Ok(v) => {
                        bad("fn", v["diff"].as_f64().unwrap_or(f64::NAN), args.f_tol);
                        ("fn", Ok(v))
                    }
                    Err(e) => ("fn", Ok(json!({ "error": e }))),
                }
            }
        };
        value[key] = report.expect("serializable report");
    }
    for key in ["wronskian", "ddt", "qfc", "fn"] {
        if let Some(err) = value.get(key).and_then(|v| v.get("error")) {
            failures.push(format!("{key}: {err}"));
        }
    }
    Ok(Output::json(&value, failures))
}

fn parse_range(text: &str) -> Result<(BigRational, BigRational, usize), UsageError> {
    let parts: Vec<&str> = text.split(':').collect();
    let [a, b, k] = parts[..] else { return usage("zeta-range must be start:stop:steps") };
    let steps: usize = k.parse().map_err(|_| UsageError(format!("bad step count {k:?}")))?;
    if steps == 0 {
        return usage("zeta-range needs at least one step");
    }
    Ok((parse_rational(a)?, parse_rational(b)?, steps))
}

pub fn plot_data(ns: &[i64], text: &str, format: Format) -> Result<Output, UsageError> {
    for &n in ns {
        if !(0..=12).contains(&n) {
            return usage(format!("n must lie in 0..=12, got {n}"));
        }
    }
    let (a, b, steps) = parse_range(text)?;
    let mut table = TauTable::new();
    let fs = ns
        .iter()
        .map(|&n| f_zeta(&mut table, n))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| UsageError(e.to_string()))?;
    let den = BigRational::from_integer(steps.into());
    let mut rows: Vec<(f64, Vec<Option<f64>>)> = Vec::with_capacity(steps + 1);
    for i in 0..=steps {
        let z = &a + (&b - &a) * BigRational::from_integer(i.into()) / &den;
        let zf = to_f64(&z);
        let mut vals: Vec<Option<f64>> = fs.iter().map(|f| f.eval(&z).ok().map(|v| to_f64(&v))).collect();
        vals.push(Some(to_f64(&f_infinity_branch(regime(zf), &z))));
        rows.push((zf, vals));
    }
    let names: Vec<String> = ns.iter().map(|n| format!("f_{n}")).chain(["f_inf".to_string()]).collect();
    if format == Format::Json {
        let mut obj = serde_json::Map::new();
        obj.insert("zeta".into(), json!(rows.iter().map(|r| r.0).collect::<Vec<_>>()));
        for (j, name) in names.iter().enumerate() {
            obj.insert(name.clone(), json!(rows.iter().map(|r| r.1[j]).collect::<Vec<_>>()));
        }
        return Ok(Output::json(&Value::Object(obj), vec![]));
    }
    let mut text = format!("zeta,{}\n", names.join(","));
    for (z, vals) in rows {
        let cells: Vec<String> = vals.iter().map(|v| v.map(|x| x.to_string()).unwrap_or_default()).collect();
        text.push_str(&format!("{z},{}\n", cells.join(",")));
    }
    Ok(Output { text, failures: vec![] })
}

fn exact_suite(n_max: i64) -> Vec<String> {
    let mut t = TauTable::new();
    let mut failures = Vec::new();
    for n in 0..=n_max {
        match symmetry_residual(&mut t, n) {
            Ok(r) if r.is_zero() => {}
            Ok(_) => failures.push(format!("symmetry residual nonzero at n={n}")),
            Err(e) => failures.push(e.to_string()),
        }
        match correlations(&mut t, n, &BigRational::zero()) {
            Ok(c) if c == xxz_triple(n) => {}
            Ok(_) => failures.push(format!("XXZ triple differs at n={n}")),
            Err(e) => failures.push(e.to_string()),
        }
    }
    failures
}

fn fn_table() -> Vec<String> {
    (0..=5).flat_map(|n| f_n(n, Variable::Disc).map(|o| o.failures).unwrap_or_else(|e| vec![e.0])).collect()
}

pub fn verify_all(quick: bool, seed: u64) -> Result<Output, UsageError> {
    let ed = |lengths: Vec<usize>, transfer: bool| {
        let args = EdArgs {
            lengths,
            zeta_grid: "default".into(),
            transfer,
            energy_tol: 1e-10,
            f_tol: 1e-7,
            spread_tol: 1e-9,
            transfer_tol: 1e-8,
        };
        ed_verify(&args, Format::Json)
    };
    let mut checks: Vec<(&str, Result<Output, UsageError>)> = Vec::new();
    if quick {
        checks.push(("tau", tau(-5, 5)));
        checks.push(("fn-table", Ok(Output { failures: fn_table(), ..Default::default() })));
        checks.push(("ed-verify", ed(vec![3, 5, 7], false)));
        checks.push(("pvi-verify", pvi_verify(3)));
        checks.push(("theta-suite", theta_suite(0.0, 1.0, seed, None, None)));
    } else {
        checks.push(("tau", tau(-9, 9)));
        checks.push(("fn-table", Ok(Output { failures: fn_table(), ..Default::default() })));
        checks.push(("symmetry-and-xxz", Ok(Output { failures: exact_suite(5), ..Default::default() })));
        checks.push(("ed-verify", ed(vec![3, 5, 7, 9, 11], false)));
        checks.push((
            "transfer",
            ed(vec![3, 5, 7], true).map(|mut o| {
                o.failures.retain(|f| f.starts_with("transfer"));
                o
            }),
        ));
        checks.push(("pvi-verify", pvi_verify(5)));
        for t in [0.5, 1.0, 2.0] {
            checks.push(("theta-suite", theta_suite(0.0, t, seed, None, None)));
        }
        for t in [0.6, 1.0, 1.5, 2.5] {
            checks.push(("finf", finf(t, 1e-9)));
        }
        let branches = f_infinity_boundary_defects()
            .into_iter()
            .filter(|(_, d)| !d.is_zero())
            .map(|(z, _)| format!("f_inf branches disagree at zeta={z}"))
            .collect();
        checks.push(("finf-branches", Ok(Output { failures: branches, ..Default::default() })));
        for n in 0..=3 {
            let args = QArgs {
                n,
                tau: 1.0,
                check: if n <= 2 {
                    vec![QCheck::Ddt, QCheck::Qfc, QCheck::Wronskian, QCheck::Fn]
                } else {
                    vec![QCheck::Ddt, QCheck::Qfc, QCheck::Wronskian]
                },
                tol: 1e-7,
                f_tol: 1e-6,
            };
            checks.push(("qsolve", qsolve(&args)));
        }
    }
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (name, out) in checks {
        let fs = match out {
            Ok(o) => o.failures,
            Err(e) => vec![e.0],
        };
        failures.extend(fs.iter().map(|f| format!("{name}: {f}")));
        rows.push(json!({ "check": name, "passed": fs.is_empty(), "failures": fs }));
    }
    Ok(Output::json(&json!({ "quick": quick, "checks": rows, "passed": failures.is_empty() }), failures))
}
