//! Acceptance gate: one line per criterion, nonzero exit if any fails.
//!
//! Every check draws from a fixed seed, so reruns print the same numbers
//! (timings aside).

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::{metric_for, params, random_field, random_metric, random_point, rng, span_residual, SOUND_FAMILIES};
use diagkill::catalog::{self, ExampleMode, RunConfig};
use diagkill::families::{self, ClassifierConfig, FamilyGenerator, GeneratorConfig};
use diagkill::flow::Flow;
use diagkill::killing::{self, residual_coordinate_oracle, residual_frame, FrameVectorField};
use diagkill::metric::{DiagonalMetric, DomainBox};
use diagkill::{Axis, FamilyParams, FamilyTag, Point};
use nalgebra::{DMatrix, DVector};

type Check = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn oracle_equivalence() -> Check {
    let mut r = rng(1);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let m = random_metric(&mut r);
        let v = random_field(&mut r);
        let p = random_point(&mut r, 1.0);
        let a = residual_frame(&m, &v, p).map_err(|e| e.to_string())?;
        let b = residual_coordinate_oracle(&m, &v, p).map_err(|e| e.to_string())?;
        worst = worst.max(a.gap(&b));
    }
    ensure(
        worst <= 1e-9,
        format!("200 triples, max entrywise gap {worst:.2e} (≤ 1e-9)"),
    )
}

fn reference_examples() -> Check {
    let outcomes = catalog::run_examples(&RunConfig::default()).map_err(|e| e.to_string())?;
    let mut ok = true;
    let mut parts = Vec::new();
    for o in &outcomes {
        match (o.mode, o.audit) {
            (ExampleMode::Asserted, _) => {
                ok &= o.check.killing && o.check.max_residual <= 1e-7;
                parts.push(format!("{} {:.1e}", o.name, o.check.max_residual));
            }
            (ExampleMode::Audit, Some(a)) => {
                ok &= !a.printed.killing && a.closed_form.max_residual <= 1e-7 && a.generated.max_residual <= 1e-7;
                parts.push(format!(
                    "{} audit: printed {} ({:.2e}), closed form {:.1e}, generated {:.1e}",
                    o.name,
                    if a.printed.killing { "pass" } else { "fail" },
                    a.printed.max_residual,
                    a.closed_form.max_residual,
                    a.generated.max_residual
                ));
            }
            (ExampleMode::Audit, None) => ok = false,
        }
    }
    ensure(ok && outcomes.len() == 5, parts.join("; "))
}

/// The fields drawn for generator soundness, reused by the flow check.
fn sound_fields() -> Vec<(FamilyTag, DiagonalMetric, Vec<FrameVectorField>)> {
    let mut r = rng(3);
    SOUND_FAMILIES
        .iter()
        .map(|&tag| {
            let m = metric_for(tag);
            let fields = {
                let g = FamilyGenerator::new(&m).expect("classifiable");
                let n = g.param_names(tag).len();
                (0..100)
                    .map(|_| {
                        g.generate(tag, &FamilyParams::positional(params(&mut r, n, 1.0)))
                            .expect("admitted")
                    })
                    .collect()
            };
            (tag, m, fields)
        })
        .collect()
}

fn generator_soundness(sets: &[(FamilyTag, DiagonalMetric, Vec<FrameVectorField>)]) -> Check {
    let mut ok = true;
    let mut parts = Vec::new();
    for (tag, m, fields) in sets {
        let mut worst = 0.0f64;
        let mut passed = 0;
        for v in fields {
            let res = killing::max_residual_grid(m, v, killing::DEFAULT_GRID)
                .map_err(|e| e.to_string())?
                .max_abs;
            worst = worst.max(res);
            passed += usize::from(res <= 1e-6);
        }
        ok &= passed == fields.len();
        parts.push(format!("{tag} {passed}/{} ({worst:.0e})", fields.len()));
    }
    ensure(ok, parts.join(", "))
}

fn classifier() -> Check {
    let cfg = ClassifierConfig::default();
    let mut r = rng(4);
    let mut fails = Vec::new();
    let classify = |f1: &str, f2: &str| {
        let m = DiagonalMetric::from_strs(f1, f2, "1", DomainBox::default()).expect("valid metric");
        families::classify_with(&m, &cfg).expect("classifies")
    };
    let mut cases = 0;
    for _ in 0..10 {
        let a = r_range(&mut r, 0.5, 3.0);
        let b = r_range(&mut r, 0.2, 1.5) * if cases % 2 == 0 { 1.0 } else { -1.0 };
        // f₁ = f₂ = a e^{bt}: k = b²
        let f = format!("{a}*exp({b}*x1)");
        let d = classify(&f, &f);
        if d.tag != FamilyTag::Te1IV || d.k.map_or(true, |k| (k - b * b).abs() > 1e-8) {
            fails.push(format!("{f}: {} k={:?}", d.tag, d.k));
        }
        // f₁ = a₁e^{2bt}, f₂ = a₂e^{bt}: k = 2b²(a₁/a₂)² e^{2bt}
        let a2 = r_range(&mut r, 0.5, 3.0);
        let (f1, f2) = (format!("{a}*exp({}*x1)", 2.0 * b), format!("{a2}*exp({b}*x1)"));
        let d = classify(&f1, &f2);
        if d.tag != FamilyTag::None || d.reason.as_deref() != Some("k nonconstant") {
            fails.push(format!("{f1}, {f2}: {}", d.tag));
        }
        // f₁ = 1, f₂ = a₁e^{a₂x¹}: k = 0
        let f2 = format!("{a}*exp({b}*x1)");
        let d = classify("1", &f2);
        if d.tag != FamilyTag::Te1III {
            fails.push(format!("1, {f2}: {}", d.tag));
        }
        cases += 3;
    }
    ensure(
        fails.is_empty(),
        if fails.is_empty() {
            format!("{cases} metrics classified as expected")
        } else {
            fails.join("; ")
        },
    )
}

fn r_range(r: &mut impl rand::Rng, a: f64, b: f64) -> f64 {
    (r.gen_range(a..b) * 1000.0f64).round() / 1000.0
}

fn frame_fields() -> Check {
    let e1 = catalog::FRAME_FIELD_E1.metric().map_err(|e| e.to_string())?;
    let constant = metric_for(FamilyTag::ConstMetric);
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, m, expect) in [
        ("E1 example", &e1, vec!["E1"]),
        ("constant", &constant, vec!["E1", "E2", "E3"]),
    ] {
        let set = families::killing_frame_fields(m);
        ok &= set.names() == expect;
        for a in Axis::ALL {
            let unit = FrameVectorField::unit(a);
            let tol = if set.contains(a) { 1e-9 } else { 1e-3 };
            let killing = killing::is_killing(m, &unit, killing::DEFAULT_GRID, tol).map_err(|e| e.to_string())?;
            ok &= killing == set.contains(a);
        }
        parts.push(format!("{name}: {set}"));
    }
    ensure(ok, parts.join(", "))
}

/// Index of a generator in the constant-metric basis order
/// `(a1, a2, a3, b1, b2, b3) = (L3, L2, L1, P1, P2, P3)`.
#[derive(Clone, Copy)]
enum Gen {
    L(usize),
    P(usize),
}

const BASIS_ORDER: [Gen; 6] = [Gen::L(2), Gen::L(1), Gen::L(0), Gen::P(0), Gen::P(1), Gen::P(2)];

fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// `[L_i, L_j] = -ε_ijk L_k`, `[L_i, P_j] = -ε_ijk P_k`, `[P_i, P_j] = 0`, as
/// coefficients in `BASIS_ORDER`.
fn structure_constants(x: Gen, y: Gen) -> [f64; 6] {
    let mut out = [0.0; 6];
    let pos = |g: Gen| {
        BASIS_ORDER
            .iter()
            .position(|b| matches!((b, g), (Gen::L(a), Gen::L(c)) | (Gen::P(a), Gen::P(c)) if *a == c))
            .unwrap()
    };
    for k in 0..3 {
        match (x, y) {
            (Gen::L(i), Gen::L(j)) => out[pos(Gen::L(k))] -= levi_civita(i, j, k),
            (Gen::L(i), Gen::P(j)) => out[pos(Gen::P(k))] -= levi_civita(i, j, k),
            (Gen::P(j), Gen::L(i)) => out[pos(Gen::P(k))] += levi_civita(i, j, k),
            (Gen::P(_), Gen::P(_)) => {}
        }
    }
    out
}

fn lie_algebra() -> Check {
    let m = DiagonalMetric::from_strs("1", "1", "1", DomainBox::default()).map_err(|e| e.to_string())?;
    let basis = FamilyGenerator::new(&m)
        .map_err(|e| e.to_string())?
        .basis(FamilyTag::ConstMetric)
        .map_err(|e| e.to_string())?;
    let points = m.domain().interior_grid([3, 3, 3]);
    let (mut worst_killing, mut worst_table) = (0.0f64, 0.0f64);
    for (a, v) in basis.iter().enumerate() {
        for (b, w) in basis.iter().enumerate() {
            let bracket = killing::lie_bracket(&m, v, w);
            worst_killing = worst_killing.max(
                killing::max_residual_grid(&m, &bracket, killing::DEFAULT_GRID)
                    .map_err(|e| e.to_string())?
                    .max_abs,
            );
            let c = structure_constants(BASIS_ORDER[a], BASIS_ORDER[b]);
            let expect = FrameVectorField::linear_combination(c.iter().copied().zip(basis.iter()));
            worst_table = worst_table.max(common::max_diff(&bracket, &expect, &points));
        }
    }
    ensure(
        worst_killing <= 1e-8 && worst_table <= 1e-8,
        format!("36 brackets: max residual {worst_killing:.1e}, max deviation from so(3)⋉R³ table {worst_table:.1e}"),
    )
}

fn flow_check(sets: &[(FamilyTag, DiagonalMetric, Vec<FrameVectorField>)]) -> Check {
    let mut r = rng(7);
    let points: Vec<Point> = (0..10).map(|_| random_point(&mut r, 0.5)).collect();
    let mut worst = 0.0f64;
    let mut count = 0;
    for (tag, m, fields) in sets {
        for v in fields {
            let flow = Flow::new(m, v);
            for &p in &points {
                let d = flow.isometry_defect(p, 0.3, 30).map_err(|e| format!("{tag}: {e}"))?;
                worst = worst.max(d);
                count += 1;
            }
        }
    }
    let euclid = DiagonalMetric::euclidean(DomainBox::default());
    let shear = FrameVectorField::from_strs("x2^2", "0", "0").map_err(|e| e.to_string())?;
    let flow = Flow::new(&euclid, &shear);
    // the shear's defect is max(2t|x₂|, 4t²x₂²), zero on x₂ = 0: judge
    // the control by its largest defect
    let mut control = 0.0f64;
    for &p in &points {
        control = control.max(flow.isometry_defect(p, 0.3, 30).map_err(|e| e.to_string())?);
    }
    ensure(
        worst <= 1e-5 && control >= 1e-2,
        format!(
            "{count} (field, point) pairs: max defect {worst:.1e} (≤ 1e-5); shear control defect {control:.2} (≥ 1e-2)"
        ),
    )
}

/// te1(ii) against the family written with `c₄/k₃`, `c₄/k₂`, on
/// `f₁ = 1/(1+x₁²)` where `F = x₁ + x₁³/3` in closed form.
fn parametrization() -> Check {
    let (k2, k3) = (2.0, -0.5);
    let m = DiagonalMetric::from_strs("1/(1 + x1^2)", "2", "-0.5", DomainBox::default()).map_err(|e| e.to_string())?;
    let g = FamilyGenerator::new(&m).map_err(|e| e.to_string())?;
    let pts = m.domain().interior_grid([5, 5, 5]);
    let mut r = rng(8);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let c = params(&mut r, 6, 1.0);
        let s = |x: f64| format!("({x:e})");
        let f = "(x1 + x1^3/3)";
        let alt = FrameVectorField::from_strs(
            &format!("{}*x2 + {}*x3 + {}", s(c[0]), s(c[1]), s(c[2])),
            &format!("-{}*{}*{f} - {}*x3 + {}", s(c[0]), s(k2), s(c[3] / k3), s(c[4])),
            &format!("-{}*{}*{f} + {}*x2 + {}", s(c[1]), s(k3), s(c[3] / k2), s(c[5])),
        )
        .map_err(|e| e.to_string())?;
        let mut te1 = c.clone();
        te1[3] = c[3] / (k2 * k3);
        let v = g
            .generate(FamilyTag::Te1II, &FamilyParams::positional(te1))
            .map_err(|e| e.to_string())?;
        worst = worst.max(common::max_diff(&v, &alt, &pts));
    }
    let mut span = 0.0f64;
    for tag in [
        FamilyTag::Te1II,
        FamilyTag::Te1III,
        FamilyTag::Te1IV,
        FamilyTag::Te1V,
        FamilyTag::SplitX1X2K3,
    ] {
        let m = metric_for(tag);
        let base = FamilyGenerator::new(&m)
            .and_then(|g| g.basis(tag))
            .map_err(|e| e.to_string())?;
        let config = GeneratorConfig {
            base_point: 0.75,
            ..Default::default()
        };
        let shifted = FamilyGenerator::with_config(&m, config)
            .and_then(|g| g.basis(tag))
            .map_err(|e| e.to_string())?;
        let pts = m.domain().interior_grid([4, 4, 4]);
        for v in &shifted {
            span = span.max(span_residual(&base, v, &pts));
        }
    }
    ensure(
        worst <= 1e-10 && span <= 1e-8,
        format!("rescaled c4 agreement {worst:.1e} (≤ 1e-10); base-point shift span residual {span:.1e} (≤ 1e-8)"),
    )
}

fn variance(xs: &[f64]) -> f64 {
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / xs.len() as f64
}

fn difference_structure() -> Check {
    let mut r = rng(9);
    let pts: Vec<Point> = (0..40).map(|_| random_point(&mut r, 1.0)).collect();

    let m = metric_for(FamilyTag::Pr2Restricted);
    let g = FamilyGenerator::new(&m).map_err(|e| e.to_string())?;
    let mut worst_var = 0.0f64;
    for _ in 0..50 {
        let mut draw = || {
            g.generate(
                FamilyTag::Pr2Restricted,
                &FamilyParams::positional(params(&mut r, 3, 5.0)),
            )
        };
        let (a, b) = (draw().map_err(|e| e.to_string())?, draw().map_err(|e| e.to_string())?);
        let d = a.sub(&b);
        let values: Vec<[f64; 3]> = pts.iter().map(|&p| d.eval(p).unwrap()).collect();
        for i in 0..3 {
            worst_var = worst_var.max(variance(&values.iter().map(|v| v[i]).collect::<Vec<_>>()));
        }
    }

    // D¹ = c̃₁, D^i = c̃_i + c_i/f_i: least squares on {1, 1/f_i}
    let m = metric_for(FamilyTag::Pr1Restricted);
    let g = FamilyGenerator::new(&m).map_err(|e| e.to_string())?;
    let mut worst_fit = 0.0f64;
    for _ in 0..50 {
        let mut draw = || {
            g.generate(
                FamilyTag::Pr1Restricted,
                &FamilyParams::positional(params(&mut r, 2, 5.0)),
            )
        };
        let (a, b) = (draw().map_err(|e| e.to_string())?, draw().map_err(|e| e.to_string())?);
        let d = a.sub(&b);
        for axis in Axis::ALL {
            let n = pts.len();
            let mut design = DMatrix::zeros(n, 2);
            let mut rhs = DVector::zeros(n);
            for (row, &p) in pts.iter().enumerate() {
                design[(row, 0)] = 1.0;
                design[(row, 1)] = if axis == Axis::X1 {
                    0.0
                } else {
                    1.0 / m.lame(axis).eval(p).unwrap()
                };
                rhs[row] = d.component(axis).eval(p).unwrap();
            }
            let coef = design
                .clone()
                .svd(true, true)
                .solve(&rhs, 1e-12)
                .map_err(|e| e.to_string())?;
            worst_fit = worst_fit.max((design * coef - rhs).amax());
        }
    }
    ensure(
        worst_var <= 1e-16 && worst_fit <= 1e-8,
        format!("50 pr2 pairs: max variance {worst_var:.1e} (≤ 1e-16); 50 pr1 pairs: affine fit residual {worst_fit:.1e} (≤ 1e-8)"),
    )
}

fn main() -> ExitCode {
    let start = Instant::now();
    let sets = sound_fields();
    let setup = start.elapsed();
    let criteria: Vec<(&str, Box<dyn Fn() -> Check + '_>)> = vec![
        ("oracle equivalence", Box::new(oracle_equivalence)),
        ("reference examples", Box::new(reference_examples)),
        ("generator soundness", Box::new(|| generator_soundness(&sets))),
        ("classifier", Box::new(classifier)),
        ("frame-field detection", Box::new(frame_fields)),
        ("Lie-algebra closure", Box::new(lie_algebra)),
        ("flow check", Box::new(|| flow_check(&sets))),
        ("parametrization consistency", Box::new(parametrization)),
        ("difference structure", Box::new(difference_structure)),
    ];
    let mut failed = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = run();
        let mut ms = t.elapsed().as_secs_f64() * 1e3;
        if n == 2 {
            ms += setup.as_secs_f64() * 1e3;
        }
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("[{tag}] {}. {name}: {detail} ({ms:.0} ms)", n + 1);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
