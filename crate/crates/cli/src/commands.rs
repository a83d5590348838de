use std::io::Read;

use hschwarz::equivalence::{
    check_equal_schwarzian, classify_dilatation, normalize_pair, verify_corollary, verify_invariance,
    verify_phi_identity, verify_phi_lemma_limits, verify_prop31, verify_slopes, verify_thm33, CheckOptions,
    DilatationClass, IdentityReport, InvarianceSamples, NotEqualReason, Verdict,
};
use hschwarz::harmonic::{
    dilatation, jacobian, normalize_at, pre_schwarzian_h, schwarzian_h_closed, schwarzian_h_definition,
    schwarzian_h_deviation, schwarzian_h_pointwise, NormalizationCheck, PairLinearMap,
};
use hschwarz::{Grid, HarmonicMap, Scheme, WirtingerStencil};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::args::{Cli, Command, Common, Format, Quantity, Suite};
use crate::document::{MapCatalog, MapDocument};
use crate::output::{complex, csv_table, json_results, number};
use crate::{CliError, CommandOutput, EXIT_ERROR, EXIT_NOT_EQUAL, EXIT_OK, EXIT_SKIPPED};

/// Runs a parsed command line; errors become exit code 2 with a message.
pub fn run(cli: &Cli) -> CommandOutput {
    execute(cli).unwrap_or_else(|e| CommandOutput { text: format!("error: {e}\n"), exit_code: EXIT_ERROR })
}

fn execute(cli: &Cli) -> Result<CommandOutput, CliError> {
    match &cli.command {
        Command::Eval { common, map, quantity, stencil_step } => eval(common, map, *quantity, *stencil_step),
        Command::CheckEqual { common, first, second, tol_field, tol_witness, base_point } => {
            check_equal(common, first, second, *tol_field, *tol_witness, *base_point)
        }
        Command::Normalize { common, map, w } => normalize(common, map, *w),
        Command::Verify { common, first, second, suite, tol_field, base_point } => {
            verify(common, first, second.as_deref().unwrap_or(first), *suite, *tol_field, *base_point)
        }
    }
}

fn load(common: &Common) -> Result<(MapCatalog, Grid), CliError> {
    let text = if common.input.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        s
    } else {
        std::fs::read_to_string(&common.input)
            .map_err(|e| CliError::Input(format!("{}: {e}", common.input.display())))?
    };
    Ok((MapCatalog::parse(&text)?, common.grid_spec().to_grid()?))
}

fn at<T>(z: Complex64, r: hschwarz::Result<T>) -> Result<T, CliError> {
    r.map_err(|source| CliError::EvalAt { z, source })
}

fn eval(common: &Common, name: &str, quantity: Quantity, step: f64) -> Result<CommandOutput, CliError> {
    let (catalog, grid) = load(common)?;
    let f = catalog.map(name)?;
    let stencil = WirtingerStencil::new(step, Scheme::Central4).map_err(|e| CliError::Input(e.to_string()))?;
    let mut rows: Vec<(Complex64, Complex64, Option<f64>)> = Vec::with_capacity(grid.len());
    for z in grid.iter() {
        let row = match quantity {
            Quantity::Value => (at(z, f.value(z))?, None),
            Quantity::Jacobian => (Complex64::new(at(z, jacobian(&f, z))?, 0.0), None),
            Quantity::Dilatation => (at(z, dilatation(&f, z))?.w, None),
            Quantity::Preschwarzian => (at(z, pre_schwarzian_h(&f, z))?, None),
            Quantity::Schwarzian => {
                let closed = at(z, schwarzian_h_closed(&f, z))?;
                let pointwise = at(z, schwarzian_h_pointwise(&f, z))?;
                let definition = at(z, schwarzian_h_definition(&f, z, stencil))?;
                (closed, Some((closed - pointwise).norm().max((closed - definition).norm())))
            }
        };
        rows.push((z, row.0, row.1));
    }
    let with_dev = quantity == Quantity::Schwarzian;
    let text = match common.format {
        Format::Csv => {
            let mut header = vec!["z_re", "z_im", "out_re", "out_im"];
            if with_dev {
                header.push("route_deviation");
            }
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|(z, v, d)| {
                    let mut r = vec![number(z.re), number(z.im), number(v.re), number(v.im)];
                    r.extend(d.map(number));
                    r
                })
                .collect();
            csv_table(&header, &body)
        }
        Format::Json => json_results(
            rows.iter()
                .map(|(z, v, d)| {
                    let mut o = json!({ "z": complex(*z), "out": complex(*v) });
                    if let Some(d) = d {
                        o["route_deviation"] = json!(d);
                    }
                    o
                })
                .collect(),
        ),
    };
    Ok(CommandOutput { text, exit_code: EXIT_OK })
}

fn check_equal(
    common: &Common,
    first: &str,
    second: &str,
    tol_field: f64,
    tol_witness: f64,
    base_point: Option<Complex64>,
) -> Result<CommandOutput, CliError> {
    let (catalog, grid) = load(common)?;
    let f1 = catalog.map(first)?;
    let f2 = catalog.map(second)?;
    let opts = CheckOptions { tol_field, tol_witness, grid, base_point };
    let result = check_equal_schwarzian(&f1, &f2, &opts)?;
    let d = result.diagnostics;
    let diagnostics = json!({
        "max_deviation": d.max_deviation,
        "worst_point": complex(d.worst_point),
        "points": d.points,
    });
    let (kind, witness, residual, reason) = match &result.verdict {
        Verdict::EqualNonConstant { affine, mu, base_point, residual } => {
            let [a, b, c] = affine.coefficients();
            let w = json!({
                "a": complex(a), "b": complex(b), "c": complex(c),
                "mu": complex(mu.mu()), "base_point": complex(*base_point),
            });
            ("equal-nonconstant", w, json!(residual), Value::Null)
        }
        Verdict::EqualConstantFamily { mobius, alpha1, alpha2, gamma1, gamma2, residual } => {
            let w = json!({
                "mobius": mobius.coefficients().map(complex),
                "alpha1": complex(*alpha1), "alpha2": complex(*alpha2),
                "gamma1": complex(*gamma1), "gamma2": complex(*gamma2),
            });
            ("equal-constant-family", w, json!(residual), Value::Null)
        }
        Verdict::NotEqual(reason) => {
            let r = match reason {
                NotEqualReason::FieldMismatch => json!({ "kind": "field-mismatch" }),
                NotEqualReason::DilatationClassMismatch => json!({ "kind": "dilatation-class-mismatch" }),
                NotEqualReason::NormalizedMismatch(x) => json!({ "kind": "normalized-mismatch", "deviation": x }),
                NotEqualReason::WitnessResidual(x) => json!({ "kind": "witness-residual", "residual": x }),
            };
            ("not-equal", Value::Null, Value::Null, r)
        }
    };
    let exit_code = if result.is_equal() { EXIT_OK } else { EXIT_NOT_EQUAL };
    let text = match common.format {
        Format::Json => json_results(vec![json!({
            "first": first,
            "second": second,
            "verdict": kind,
            "witness": witness,
            "residual": residual,
            "reason": reason,
            "diagnostics": diagnostics,
            "conjugated": result.conjugated,
        })]),
        Format::Csv => csv_table(
            &["first", "second", "verdict", "residual", "max_deviation", "worst_re", "worst_im"],
            &[vec![
                first.to_string(),
                second.to_string(),
                kind.to_string(),
                residual.as_f64().map(number).unwrap_or_default(),
                number(d.max_deviation),
                number(d.worst_point.re),
                number(d.worst_point.im),
            ]],
        ),
    };
    Ok(CommandOutput { text, exit_code })
}

fn pair_map_json(m: &PairLinearMap) -> Value {
    let [[m11, m12], [m21, m22]] = m.matrix();
    let [t1, t2] = m.translation();
    json!({
        "matrix": [[complex(m11), complex(m12)], [complex(m21), complex(m22)]],
        "translation": [complex(t1), complex(t2)],
    })
}

fn normalize(common: &Common, name: &str, w: Complex64) -> Result<CommandOutput, CliError> {
    let (catalog, _) = load(common)?;
    let f = catalog.map(name)?;
    let n = normalize_at(&f, w)?;
    let check = NormalizationCheck::of(&n.map)?;
    let document = MapDocument::from_maps([(name, &n.map)]);
    let text = json_results(vec![json!({
        "name": name,
        "document": document,
        "pair_map": pair_map_json(&n.pair_map),
        "automorphism": { "w": complex(n.automorphism.w()) },
        "normalization": {
            "abs_h0": check.h0,
            "abs_g0": check.g0,
            "abs_dh0_minus_1": check.dh0,
            "abs_omega0": check.omega0,
            "abs_im_domega0": check.im_domega0,
            "re_domega0": check.re_domega0,
        },
    })]);
    Ok(CommandOutput { text, exit_code: EXIT_OK })
}

/// One row of a verification run: a report, or the reason the check was skipped.
#[derive(Debug, Clone)]
pub struct VerifyRow {
    pub suite: &'static str,
    pub outcome: Result<IdentityReport, (String, String)>,
}

/// Sample points `w` for the frozen-dilatation suite: the origin and eight
/// points spread over radii 0.1 to 0.6.
pub fn frozen_samples() -> Vec<Complex64> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    std::iter::once(Complex64::new(0.0, 0.0))
        .chain((0..8).map(|k| Complex64::from_polar(0.1 + 0.5 * k as f64 / 7.0, golden * k as f64)))
        .collect()
}

/// Runs the requested suites on a pair of maps.
pub fn verify_rows(
    f1: &HarmonicMap,
    f2: &HarmonicMap,
    same: bool,
    suite: Suite,
    tol_field: f64,
    base_point: Option<Complex64>,
    grid: &Grid,
) -> Result<Vec<VerifyRow>, CliError> {
    let wants = |s: Suite| suite == Suite::All || suite == s;
    let mut rows = Vec::new();
    let push_reports = |rows: &mut Vec<VerifyRow>, suite, reports: hschwarz::Result<Vec<IdentityReport>>| match reports {
        Ok(rs) => rows.extend(rs.into_iter().map(|r| VerifyRow { suite, outcome: Ok(r) })),
        Err(e) => rows.push(VerifyRow { suite, outcome: Err((suite.to_string(), e.to_string())) }),
    };

    rows.push(VerifyRow {
        suite: "fields",
        outcome: Ok(IdentityReport::new("harmonic-schwarzian-fields", schwarzian_h_deviation(f1, f2, grid)?, tol_field)),
    });

    if wants(Suite::Invariance) {
        let samples = InvarianceSamples::standard();
        push_reports(&mut rows, "invariance", verify_invariance(f1, &samples, grid));
        if !same {
            push_reports(&mut rows, "invariance", verify_invariance(f2, &samples, grid));
        }
    }

    let pair_suites = [Suite::Prop31, Suite::Thm33, Suite::Corollary, Suite::Phi, Suite::Limits];
    if pair_suites.iter().any(|&s| wants(s)) {
        let normalized = normalize_pair(f1, f2, base_point, grid);
        let run = |rows: &mut Vec<VerifyRow>, suite: &'static str, body: &dyn Fn(&HarmonicMap, &HarmonicMap) -> hschwarz::Result<Vec<IdentityReport>>| {
            match &normalized {
                Ok((n1, n2)) => push_reports(rows, suite, body(&n1.map, &n2.map)),
                Err(e) => rows.push(VerifyRow { suite, outcome: Err((suite.to_string(), e.to_string())) }),
            }
        };
        if wants(Suite::Prop31) {
            run(&mut rows, "prop31", &|a, b| {
                let mut r = verify_prop31(a, b, grid)?;
                r.push(verify_slopes(a, b)?);
                Ok(r)
            });
        }
        if wants(Suite::Thm33) {
            run(&mut rows, "thm33", &|a, b| Ok(vec![verify_thm33(a, b, &frozen_samples(), grid)?]));
        }
        if wants(Suite::Corollary) {
            run(&mut rows, "corollary", &|a, b| verify_corollary(a, b, grid));
        }
        if wants(Suite::Phi) {
            let constant = [f1, f2]
                .iter()
                .map(|f| classify_dilatation(f, grid).map(|c| matches!(c, DilatationClass::Constant(_))))
                .collect::<hschwarz::Result<Vec<bool>>>()?;
            if constant.contains(&true) {
                rows.push(VerifyRow {
                    suite: "phi",
                    outcome: Err(("phi".into(), hschwarz::Error::ConstantDilatation.to_string())),
                });
            } else {
                run(&mut rows, "phi", &|a, b| Ok(vec![verify_phi_identity(a, b, grid)?]));
            }
        }
        if wants(Suite::Limits) {
            run(&mut rows, "limits", &verify_phi_lemma_limits);
        }
    }
    Ok(rows)
}

/// 1 if any check failed, else 3 if any was skipped, else 0.
pub fn verify_exit_code(rows: &[VerifyRow]) -> i32 {
    if rows.iter().any(|r| matches!(&r.outcome, Ok(rep) if !rep.pass)) {
        EXIT_NOT_EQUAL
    } else if rows.iter().any(|r| r.outcome.is_err()) {
        EXIT_SKIPPED
    } else {
        EXIT_OK
    }
}

fn verify(
    common: &Common,
    first: &str,
    second: &str,
    suite: Suite,
    tol_field: f64,
    base_point: Option<Complex64>,
) -> Result<CommandOutput, CliError> {
    let (catalog, grid) = load(common)?;
    let f1 = catalog.map(first)?;
    let f2 = catalog.map(second)?;
    let rows = verify_rows(&f1, &f2, first == second, suite, tol_field, base_point, &grid)?;
    let exit_code = verify_exit_code(&rows);
    let text = match common.format {
        Format::Json => json_results(
            rows.iter()
                .map(|r| match &r.outcome {
                    Ok(rep) => json!({
                        "suite": r.suite,
                        "name": rep.name,
                        "status": if rep.pass { "pass" } else { "fail" },
                        "max_residual": rep.max_residual,
                        "worst_point": complex(rep.worst_point),
                        "tolerance": rep.tolerance,
                    }),
                    Err((name, reason)) => json!({
                        "suite": r.suite,
                        "name": name,
                        "status": "skipped",
                        "reason": reason,
                    }),
                })
                .collect(),
        ),
        Format::Csv => csv_table(
            &["suite", "name", "status", "max_residual", "worst_re", "worst_im", "tolerance", "reason"],
            &rows
                .iter()
                .map(|r| match &r.outcome {
                    Ok(rep) => vec![
                        r.suite.to_string(),
                        rep.name.clone(),
                        if rep.pass { "pass" } else { "fail" }.to_string(),
                        number(rep.max_residual),
                        number(rep.worst_point.re),
                        number(rep.worst_point.im),
                        number(rep.tolerance),
                        String::new(),
                    ],
                    Err((name, reason)) => vec![
                        r.suite.to_string(),
                        name.clone(),
                        "skipped".to_string(),
                        String::new(),
                        String::new(),
                        String::new(),
                        String::new(),
                        reason.clone(),
                    ],
                })
                .collect::<Vec<_>>(),
        ),
    };
    Ok(CommandOutput { text, exit_code })
}
