//! Acceptance criteria, one `[PASS]`/`[FAIL]` line each. Exits nonzero if any fail.

mod common;

use std::collections::BTreeMap;
use std::process::ExitCode;

use cscoh::analysis::{
    analyze, hlc_check, lemma_verdict, massey_triple, omega_perturbation_scan, primitive, wedge_closure_probe,
    Analysis, ScanWhat,
};
use cscoh::catalog;
use cscoh::cohomology::{harmonic_spaces, CohomologyTable, Flavor};
use cscoh::exterior::{binomial, component_dim, to_vector, wedge};
use cscoh::operators::{build_symplectic_star, minkowski_identity_check, star_cross_checks, validate_sl2};
use cscoh::{Bidegree, ComplexInstance, Form, GaussianRational as Q, Subspace};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn load(name: &str, params: &[(&str, Q)]) -> Result<Analysis, String> {
    let p: BTreeMap<String, Q> = params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
    let inst = catalog::get(name, &p).map_err(|e| format!("{name}: {e}"))?;
    analyze(inst).map_err(|e| format!("{name}: {e}"))
}

fn forms(inst: &ComplexInstance, texts: &[&str]) -> Vec<Form> {
    texts.iter().map(|t| inst.parse_form(t).expect("form")).collect()
}

fn span(n: usize, bd: Bidegree, fs: &[Form]) -> Subspace {
    let vs: Vec<_> = fs.iter().map(|f| to_vector(f, bd).expect("bidegree")).collect();
    Subspace::span(component_dim(n, bd), &vs)
}

/// Span of the class representatives plus boundaries equals that of `expected` plus boundaries.
fn classes_span(table: &CohomologyTable, flavor: Flavor, bd: Bidegree, expected: &[Form]) -> bool {
    let cell = &table.cell(flavor, bd).quotient;
    let den = cell.denominator.basis_vectors();
    let with_den = |fs: &[Form]| {
        let mut vs: Vec<_> = fs.iter().map(|f| to_vector(f, bd).expect("bidegree")).collect();
        vs.extend(den.iter().cloned());
        Subspace::span(component_dim(table.n, bd), &vs)
    };
    cell.dim == expected.len() && with_den(&cell.representatives) == with_den(expected)
}

fn power(f: &Form, k: usize) -> Form {
    (0..k).fold(Form::constant(f.n(), Q::from_integer(1)), |acc, _| wedge(&acc, f))
}

fn kodaira_thurston_bott_chern() -> Outcome {
    let a = load("kodaira-thurston", &[])?;
    let order = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (2, 1), (1, 2), (2, 2)];
    let dims: Vec<usize> = order.iter().map(|&(p, q)| a.table.dim(Flavor::BottChern, Bidegree::new(p, q))).collect();
    ensure(dims == [1, 1, 2, 1, 3, 1, 1, 2, 1], || format!("BC dims {dims:?}"))?;
    let b11 = Bidegree::new(1, 1);
    let expected = span(2, b11, &forms(&a.inst, &["phib1^phi2", "phi1^phib2", "phi1^phib1"]));
    ensure(a.table.cell(Flavor::BottChern, b11).harmonic == expected, || "H_BC^{1,1} span".into())
}

fn kodaira_thurston_dolbeault() -> Outcome {
    let a = load("kodaira-thurston", &[])?;
    let b10 = Bidegree::new(1, 0);
    let b11 = Bidegree::new(1, 1);
    ensure(classes_span(&a.table, Flavor::Dolbeault, b10, &forms(&a.inst, &["phi1"])), || "H^{1,0} != <phi1>".into())?;
    ensure(classes_span(&a.table, Flavor::Dolbeault, b11, &forms(&a.inst, &["phi1^phib2", "phi2^phib1"])), || {
        "H^{1,1} != <phi1^phib2, phi2^phib1>".into()
    })?;
    let v = lemma_verdict(&a.inst, &a.sl2, &a.table).map_err(|e| e.to_string())?;
    ensure(!v.holds && !v.hlc_route && !v.dimension_route && !v.definition_route, || "lemma should fail".into())
}

fn kodaira_thurston_wedge_probe() -> Outcome {
    let a = load("kodaira-thurston", &[])?;
    let f = forms(&a.inst, &["phi1^phi2", "phib2"]);
    let (u, v) = (&f[0], &f[1]);
    let harmonic = |w: &Form| {
        let bd = w.bidegree().expect("homogeneous");
        a.table.cell(Flavor::BottChern, bd).harmonic.contains(&to_vector(w, bd).expect("bidegree"))
    };
    ensure(harmonic(u) && harmonic(v), || "factors should be BC-harmonic".into())?;
    ensure(!harmonic(&wedge(u, v)), || "wedge should not be BC-harmonic".into())?;
    let probe = wedge_closure_probe(Flavor::BottChern, &a.table);
    let found = probe.failures.iter().any(|w| (w.left == *u && w.right == *v) || (w.left == *v && w.right == *u));
    ensure(found, || format!("witness missing among {} failures", probe.failures.len()))
}

fn iwasawa() -> Outcome {
    let a = load("iwasawa", &[])?;
    let b01 = Bidegree::new(0, 1);
    let psib1 = a.inst.parse_form("psib1").expect("form");
    let cell = &a.table.cell(Flavor::Dolbeault, b01).quotient;
    let v = to_vector(&psib1, b01).expect("bidegree");
    ensure(cell.numerator.contains(&v) && !cell.denominator.contains(&v), || {
        "[psib1] should be a nonzero class".into()
    })?;
    let w2 = wedge(&power(&a.inst.omega, 2), &psib1);
    let beta = primitive(&a.inst.dbar, &w2, Bidegree::new(2, 3)).ok_or("omega^2 ^ psib1 not exact")?;
    ensure(a.inst.dbar.apply(&beta) == w2, || "primitive check".into())?;
    let h = hlc_check(Flavor::Dolbeault, &a.table, &a.inst);
    ensure(!h.steps[2].iso, || "HLC should fail at k = 2".into())?;
    let v = lemma_verdict(&a.inst, &a.sl2, &a.table).map_err(|e| e.to_string())?;
    ensure(!v.holds, || "lemma should fail".into())
}

fn nakamura_zero() -> Outcome {
    let a = load("nakamura", &[])?;
    ensure(a.inst.dbar.is_zero(), || "dbar should vanish".into())?;
    for bd in Bidegree::all(3) {
        let d = a.table.dim(Flavor::Dolbeault, bd);
        ensure(d == binomial(3, bd.p) * binomial(3, bd.q), || format!("h at {bd} = {d}"))?;
    }
    let h = hlc_check(Flavor::Dolbeault, &a.table, &a.inst);
    ensure(h.overall, || "HLC should hold".into())?;
    let v = lemma_verdict(&a.inst, &a.sl2, &a.table).map_err(|e| e.to_string())?;
    ensure(v.holds, || "lemma should hold".into())?;
    ensure(wedge_closure_probe(Flavor::Dolbeault, &a.table).closed(), || {
        "Dolbeault harmonic forms not closed under wedge".into()
    })
}

fn nakamura_deformed() -> Outcome {
    for t in [Q::ratio(1, 2), Q::from_integer(1), Q::ratio(-1, 3)] {
        let a = load("nakamura", &[("t", t.clone())])?;
        let tag = |m: &str| format!("t = {t}: {m}");
        let b10 = Bidegree::new(1, 0);
        ensure(classes_span(&a.table, Flavor::Dolbeault, b10, &forms(&a.inst, &["Phi1", "Phi2"])), || tag("H^{1,0}"))?;
        let h01 = a.table.dim(Flavor::Dolbeault, Bidegree::new(0, 1));
        ensure(h01 == 3, || tag(&format!("h^{{0,1}} = {h01}")))?;
        let f = forms(&a.inst, &["2*t*Phi1", "Phib2"]);
        let m = massey_triple(&f[0], &f[1], &f[1], &a.inst).map_err(|e| tag(&e.to_string()))?;
        ensure(!m.vanishes, || tag("Massey product vanishes"))?;
        let w2 = wedge(&power(&a.inst.omega, 2), &f[1]);
        ensure(primitive(&a.inst.dbar, &w2, Bidegree::new(2, 3)).is_some(), || tag("omega^2 ^ Phib2 not exact"))?;
        let v = lemma_verdict(&a.inst, &a.sl2, &a.table).map_err(|e| tag(&e.to_string()))?;
        ensure(!v.holds, || tag("lemma should fail"))?;
    }
    Ok(())
}

fn every_catalog_instance() -> Vec<(String, ComplexInstance)> {
    let mut out = Vec::new();
    for e in catalog::list() {
        out.push((e.name.to_string(), catalog::get(e.name, &BTreeMap::new()).expect("catalog entry")));
    }
    for t in [Q::ratio(1, 2), Q::from_integer(1), Q::ratio(-1, 3), Q::ratio(1, 2) * Q::i()] {
        let p = BTreeMap::from([("t".to_string(), t.clone())]);
        out.push((format!("nakamura(t = {t})"), catalog::get("nakamura", &p).expect("nakamura")));
    }
    out
}

fn operator_identities() -> Outcome {
    for (name, inst) in every_catalog_instance() {
        let a = analyze(inst).map_err(|e| format!("{name}: {e}"))?;
        ensure(a.inst.dbar.compose(&a.inst.dbar).is_zero(), || format!("{name}: dbar^2"))?;
        let report = validate_sl2(&a.sl2, &a.inst).map_err(|e| format!("{name}: {e}"))?;
        ensure(report.checks.len() == 4, || format!("{name}: sl2 report incomplete"))?;
        harmonic_spaces(&a.inst, &a.sl2, &a.metric).map_err(|e| format!("{name}: {e}"))?;
    }
    Ok(())
}

fn star_cross_checks_hold() -> Outcome {
    for name in ["kodaira-thurston", "kodaira-thurston-xi", "iwasawa"] {
        let a = load(name, &[])?;
        let star = build_symplectic_star(&a.inst).map_err(|e| format!("{name}: {e}"))?;
        star_cross_checks(&a.inst, &a.sl2, &star).map_err(|e| format!("{name}: {e}"))?;
        ensure(a.metric.is_admissible(), || format!("{name}: shipped metric not admissible"))?;
        let checks =
            minkowski_identity_check(&a.inst, &a.sl2, &a.metric, Some(&star)).map_err(|e| format!("{name}: {e}"))?;
        ensure(checks.len() == 5, || format!("{name}: {} metric checks", checks.len()))?;
    }
    Ok(())
}

fn structural_theorems() -> Outcome {
    let mut instances = every_catalog_instance();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for k in 0..12 {
        let n = if k % 3 == 0 { 2 } else { 3 };
        instances.push((format!("random #{k} (n = {n})"), common::random_instance(&mut rng, n)));
    }
    for (name, inst) in instances {
        // analyze checks quotient = harmonic dims and the D-complex identity.
        let a = analyze(inst).map_err(|e| format!("{name}: {e}"))?;
        lemma_verdict(&a.inst, &a.sl2, &a.table).map_err(|e| format!("{name}: {e}"))?;
        for f in [Flavor::BottChern, Flavor::Aeppli] {
            let h = hlc_check(f, &a.table, &a.inst);
            ensure(h.steps.iter().all(|s| s.well_defined), || format!("{name}: L not well defined on {f}"))?;
            ensure(h.overall, || format!("{name}: HLC fails on {f}"))?;
        }
    }
    Ok(())
}

fn frame_invariance() -> Outcome {
    let phi = load("kodaira-thurston", &[])?;
    let xi = load("kodaira-thurston-xi", &[])?;
    ensure(phi.table.same_dimensions(&xi.table), || "tables differ".into())?;
    let lv =
        |a: &Analysis| lemma_verdict(&a.inst, &a.sl2, &a.table).map(|v| (v.holds, v.slack)).map_err(|e| e.to_string());
    ensure(lv(&phi)? == lv(&xi)?, || "lemma verdicts differ".into())?;
    for f in Flavor::ALL {
        let steps = |a: &Analysis| -> Vec<(bool, usize)> {
            hlc_check(f, &a.table, &a.inst).steps.iter().map(|s| (s.iso, s.rank)).collect()
        };
        ensure(steps(&phi) == steps(&xi), || format!("HLC differs on {f}"))?;
    }
    Ok(())
}

fn omega_stability() -> Outcome {
    let spec = catalog::spec("nakamura").map_err(|e| e.to_string())?;
    let inst = catalog::get("nakamura", &BTreeMap::new()).map_err(|e| e.to_string())?;
    let direction = inst.parse_form("(1/2*i) * Phi1^Phib1").expect("form");
    let eps = [Q::ratio(1, 10), Q::ratio(-1, 10), Q::ratio(1, 100)];
    let rows = omega_perturbation_scan(&spec, &BTreeMap::new(), &direction, &eps, &ScanWhat::Lemma)
        .map_err(|e| e.to_string())?;
    for row in rows {
        let holds = row.outcome.map_err(|e| format!("eps = {}: {e}", row.value))?.flag();
        ensure(holds, || format!("lemma fails at eps = {}", row.value))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 11] = [
        ("1 Kodaira-Thurston Bott-Chern table and H_BC^{1,1}", kodaira_thurston_bott_chern),
        ("2 Kodaira-Thurston Dolbeault classes, lemma fails", kodaira_thurston_dolbeault),
        ("3 Kodaira-Thurston BC wedge-closure witness", kodaira_thurston_wedge_probe),
        ("4 Iwasawa class, exact omega^2 ^ psib1, HLC and lemma fail", iwasawa),
        ("5 Nakamura t = 0: dbar = 0, full Hodge numbers, HLC, lemma, formality probe", nakamura_zero),
        ("6 Nakamura t = 1/2, 1, -1/3: classes, Massey product, lemma fails", nakamura_deformed),
        ("7 operator identities and harmonic characterizations on the catalog", operator_identities),
        ("8 symplectic star and admissible-metric identities", star_cross_checks_hold),
        ("9 structural identities on catalog and random specs", structural_theorems),
        ("10 frame invariance of Kodaira-Thurston", frame_invariance),
        ("11 omega-stability of the lemma on Nakamura t = 0", omega_stability),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(()) => println!("[PASS] {name}"),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {name}: {why}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
