//! Text and JSON rendering. Both carry the tool version and the instance's
//! validation digest; output is a pure function of the inputs.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use clap::ValueEnum;
use cscoh::analysis::{
    analyze, deformation_scan, hlc_check, lemma_verdict, massey_triple, omega_perturbation_scan, Analysis, HlcReport,
    LemmaVerdict, MasseyResult, ScanOutcome, ScanRow, ScanWhat,
};
use cscoh::catalog;
use cscoh::cohomology::Flavor;
use cscoh::model::Check;
use cscoh::operators::{
    build_symplectic_star, minkowski_identity_check, star_cross_checks, validate_sl2, Admissibility,
};
use cscoh::{instantiate, Bidegree, Error, Form, GaussianRational as Q, ManifoldSpec};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

fn bd_key(bd: Bidegree) -> String {
    format!("{},{}", bd.p, bd.q)
}

fn json_out(v: Value) -> String {
    let mut s = serde_json::to_string_pretty(&v).expect("json values serialize");
    s.push('\n');
    s
}

/// First 16 hex digits of SHA-256 over the resolved document and validation lines.
pub fn digest(analysis: &Analysis) -> String {
    let mut h = Sha256::new();
    h.update(analysis.inst.spec.to_document().as_bytes());
    for line in analysis.inst.validation_lines() {
        h.update(line.as_bytes());
        h.update(b"\n");
    }
    hex::encode(h.finalize())[..16].to_string()
}

fn grid(n: usize, cell: impl Fn(Bidegree) -> String) -> String {
    let mut out = String::from("  p\\q");
    for q in 0..=n {
        let _ = write!(out, "{q:>4}");
    }
    out.push('\n');
    for p in 0..=n {
        let _ = write!(out, "  {p:>3}");
        for q in 0..=n {
            let _ = write!(out, "{:>4}", cell(Bidegree::new(p, q)));
        }
        out.push('\n');
    }
    out
}

fn title(f: Flavor) -> &'static str {
    match f {
        Flavor::Dolbeault => "H_dbar",
        Flavor::DbarLambda => "H_dbar^Lambda",
        Flavor::BottChern => "H_BC",
        Flavor::Aeppli => "H_A",
    }
}

fn ks(list: &[usize]) -> String {
    list.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

pub struct Report {
    pub a: Analysis,
    pub format: Format,
    pub digest: String,
}

impl Report {
    pub fn load(spec: &ManifoldSpec, params: &BTreeMap<String, Q>, format: Format) -> Result<Self, Error> {
        let a = analyze(instantiate(spec, params)?)?;
        let digest = digest(&a);
        Ok(Self { a, format, digest })
    }

    fn fmt(&self, f: &Form) -> String {
        self.a.inst.format(f)
    }

    fn header_text(&self) -> String {
        let inst = &self.a.inst;
        let mut out = format!("cscoh {VERSION}\ninstance: {} (n = {})\n", inst.spec.name, inst.n());
        if !inst.parameter_values.is_empty() {
            let ps: Vec<String> = inst.parameter_values.iter().map(|(k, v)| format!("{k} = {v}")).collect();
            let _ = writeln!(out, "parameters: {}", ps.join(", "));
        }
        let _ = writeln!(out, "digest: {}\nvalidation:", self.digest);
        for line in inst.validation_lines() {
            let _ = writeln!(out, "  {line}");
        }
        out
    }

    fn header_json(&self) -> Map<String, Value> {
        let inst = &self.a.inst;
        let params: Map<String, Value> =
            inst.parameter_values.iter().map(|(k, v)| (k.clone(), Value::String(v.to_string()))).collect();
        let mut m = Map::new();
        m.insert("schema".into(), json!(1));
        m.insert("version".into(), json!(VERSION));
        m.insert(
            "instance".into(),
            json!({
                "name": inst.spec.name,
                "n": inst.n(),
                "parameters": params,
                "digest": self.digest,
                "validation": inst.validation_lines(),
            }),
        );
        m
    }

    fn emit(&self, text: String, key: &str, body: Value) -> String {
        match self.format {
            Format::Text => format!("{}{text}", self.header_text()),
            Format::Json => {
                let mut m = self.header_json();
                m.insert(key.into(), body);
                json_out(Value::Object(m))
            }
        }
    }

    pub fn validate(&self) -> Result<String, Error> {
        let (inst, s, m) = (&self.a.inst, &self.a.sl2, &self.a.metric);
        let sl2 = validate_sl2(s, inst)?;
        let star = build_symplectic_star(inst).ok();
        let star_checks: Vec<Check> = match &star {
            Some(star) => star_cross_checks(inst, s, star)?,
            None => Vec::new(),
        };
        let metric_checks: Result<Vec<Check>, String> = match minkowski_identity_check(inst, s, m, star.as_ref()) {
            Ok(c) => Ok(c),
            Err(Error::Precondition(why)) => Err(why),
            Err(e) => return Err(e),
        };
        let weights: Vec<String> = m.weights.iter().map(|w| Q::from(w.clone()).to_string()).collect();
        let eigen: Option<Vec<String>> =
            m.eigenvalues.as_ref().map(|ev| ev.iter().map(|e| Q::from(e.clone()).to_string()).collect());
        let admissibility = match m.admissibility {
            Admissibility::Admissible => "admissible",
            Admissibility::NotAdmissible => "not admissible",
            Admissibility::Undecided => "undecided (irrational eigenvalues)",
        };
        let b: Vec<String> = sl2.b_scalars.iter().map(Q::to_string).collect();

        let mut text = String::from("sl2:\n");
        for c in &sl2.checks {
            let _ = writeln!(text, "  {}", c.line());
        }
        let _ = writeln!(text, "  B by degree: {}", b.join(", "));
        let _ = writeln!(text, "  Lambda(omega) = {}", sl2.lambda_omega);
        text.push_str("star:\n");
        if star.is_none() {
            text.push_str("  not available (no conjugation data)\n");
        }
        for c in &star_checks {
            let _ = writeln!(text, "  {}", c.line());
        }
        let _ = write!(text, "metric: weights {} ({admissibility}", weights.join(", "));
        match &eigen {
            Some(ev) => {
                let _ = writeln!(text, "; eigenvalues {})", ev.join(", "));
            }
            None => text.push_str(")\n"),
        }
        match &metric_checks {
            Ok(cs) => cs.iter().for_each(|c| {
                let _ = writeln!(text, "  {}", c.line());
            }),
            Err(why) => {
                let _ = writeln!(text, "  admissible-metric identities: not checked ({why})");
            }
        }
        text.push_str("validate: OK\n");

        let lines = |cs: &[Check]| cs.iter().map(Check::line).collect::<Vec<_>>();
        let body = json!({
            "ok": true,
            "sl2": {"checks": lines(&sl2.checks), "b_scalars": b, "lambda_omega": sl2.lambda_omega.to_string()},
            "star": if star.is_some() { json!(lines(&star_checks)) } else { Value::Null },
            "metric": {
                "weights": weights,
                "admissibility": admissibility,
                "eigenvalues": eigen,
                "checks": match &metric_checks { Ok(cs) => json!(lines(cs)), Err(_) => Value::Null },
            },
        });
        Ok(self.emit(text, "validate", body))
    }

    pub fn cohomology(&self, flavors: &[Flavor]) -> String {
        let t = &self.a.table;
        let mut text = String::new();
        let mut body = Map::new();
        for &f in flavors {
            let _ = writeln!(text, "{} ({f}):", title(f));
            text.push_str(&grid(t.n, |bd| t.dim(f, bd).to_string()));
            let cells: Map<String, Value> = Bidegree::all(t.n)
                .map(|bd| {
                    let cell = &t.cell(f, bd).quotient;
                    let reps: Vec<String> = cell.representatives.iter().map(|r| self.fmt(r)).collect();
                    (bd_key(bd), json!({"dim": cell.dim, "representatives": reps}))
                })
                .collect();
            body.insert(f.name().into(), Value::Object(cells));
        }
        let d: Vec<String> = t.d_dims.iter().map(|(k, d)| format!("{k}:{d}")).collect();
        let _ = writeln!(text, "H_D by k: {}", d.join("  "));
        let d_json: Map<String, Value> = t.d_dims.iter().map(|(k, d)| (k.to_string(), json!(d))).collect();
        let mut out = Map::new();
        out.insert("flavors".into(), Value::Object(body));
        out.insert("d_cohomology".into(), Value::Object(d_json));
        self.emit(text, "cohomology", Value::Object(out))
    }

    pub fn harmonic(&self, flavors: &[Flavor]) -> String {
        let t = &self.a.table;
        let mut text = String::new();
        let mut body = Map::new();
        for &f in flavors {
            let _ = writeln!(text, "harmonic {f}:");
            let mut cells = Map::new();
            for bd in Bidegree::all(t.n) {
                let basis: Vec<String> = t.cell(f, bd).harmonic_basis(t.n, bd).iter().map(|h| self.fmt(h)).collect();
                if !basis.is_empty() {
                    let _ = writeln!(text, "  {bd} dim {}: {}", basis.len(), basis.join(", "));
                }
                cells.insert(bd_key(bd), json!(basis));
            }
            body.insert(f.name().into(), Value::Object(cells));
        }
        self.emit(text, "harmonic", Value::Object(body))
    }

    fn hlc_text(&self, h: &HlcReport) -> String {
        let n = self.a.inst.n();
        let failing: Vec<usize> = h.steps.iter().filter(|s| !s.iso).map(|s| s.k).collect();
        let mut text = if h.overall {
            format!("hlc {}: HOLDS\n", h.flavor)
        } else {
            format!("hlc {}: FAILS at k = {}\n", h.flavor, ks(&failing))
        };
        for s in &h.steps {
            let _ = write!(
                text,
                "  k = {}: H^{} ({}) -> H^{} ({}), rank {}",
                s.k,
                n - s.k,
                s.source_dim,
                n + s.k,
                s.target_dim,
                s.rank
            );
            if !s.well_defined {
                text.push_str(", omega^k does not descend");
            }
            text.push_str(if s.iso { ", iso\n" } else { ", not iso" });
            if !s.iso {
                match &s.witness {
                    Some(w) => {
                        let _ = writeln!(text, "; dying class {}", self.fmt(w));
                    }
                    None => text.push('\n'),
                }
            }
        }
        text
    }

    fn hlc_json(&self, h: &HlcReport) -> Value {
        let steps: Vec<Value> = h
            .steps
            .iter()
            .map(|s| {
                json!({
                    "k": s.k,
                    "well_defined": s.well_defined,
                    "rank": s.rank,
                    "source_dim": s.source_dim,
                    "target_dim": s.target_dim,
                    "iso": s.iso,
                    "witness": s.witness.as_ref().map(|w| self.fmt(w)),
                })
            })
            .collect();
        json!({"overall": h.overall, "steps": steps})
    }

    pub fn hlc(&self, flavors: &[Flavor]) -> String {
        let mut text = String::new();
        let mut body = Map::new();
        for &f in flavors {
            let h = hlc_check(f, &self.a.table, &self.a.inst);
            text.push_str(&self.hlc_text(&h));
            body.insert(f.name().into(), self.hlc_json(&h));
        }
        self.emit(text, "hlc", Value::Object(body))
    }

    pub fn lemma(&self) -> Result<String, Error> {
        let v = lemma_verdict(&self.a.inst, &self.a.sl2, &self.a.table)?;
        let mut text = format!("lemma: {}\n", lemma_line(&v));
        text.push_str("slack (BC + A) - (dbar + dbar^Lambda):\n");
        text.push_str(&grid(self.a.table.n, |bd| v.slack[&bd].to_string()));
        let slack: Map<String, Value> = v.slack.iter().map(|(bd, s)| (bd_key(*bd), json!(s))).collect();
        let body = json!({
            "holds": v.holds,
            "hlc_route": v.hlc_route,
            "dimension_route": v.dimension_route,
            "definition_route": v.definition_route,
            "hlc_failures": v.hlc.steps.iter().filter(|s| !s.iso).map(|s| s.k).collect::<Vec<_>>(),
            "slack": slack,
        });
        Ok(self.emit(text, "lemma", body))
    }

    pub fn massey(&self, a: &str, b: &str, c: &str) -> Result<String, Error> {
        let inst = &self.a.inst;
        let m = massey_triple(&inst.parse_form(a)?, &inst.parse_form(b)?, &inst.parse_form(c)?, inst)?;
        let text = self.massey_text(&m);
        Ok(self.emit(text, "massey", self.massey_json(&m)))
    }

    fn massey_text(&self, m: &MasseyResult) -> String {
        format!(
            "a = {}\nb = {}\nc = {}\nf = {}\ng = {}\nproduct = {} in {}\nindeterminacy dim {}\nmassey: {}\n",
            self.fmt(&m.a),
            self.fmt(&m.b),
            self.fmt(&m.c),
            self.fmt(&m.f),
            self.fmt(&m.g),
            self.fmt(&m.product),
            m.bidegree,
            m.indeterminacy_dim,
            if m.vanishes { "VANISHES" } else { "NONZERO" }
        )
    }

    fn massey_json(&self, m: &MasseyResult) -> Value {
        json!({
            "a": self.fmt(&m.a),
            "b": self.fmt(&m.b),
            "c": self.fmt(&m.c),
            "f": self.fmt(&m.f),
            "g": self.fmt(&m.g),
            "product": self.fmt(&m.product),
            "bidegree": bd_key(m.bidegree),
            "indeterminacy_dim": m.indeterminacy_dim,
            "vanishes": m.vanishes,
        })
    }
}

fn lemma_line(v: &LemmaVerdict) -> String {
    if v.holds {
        return "HOLDS (hlc route: holds; dimension route: zero slack; definition route: holds)".into();
    }
    let failing: Vec<usize> = v.hlc.steps.iter().filter(|s| !s.iso).map(|s| s.k).collect();
    let slack: Vec<String> = v.strict_slack().iter().map(Bidegree::to_string).collect();
    format!(
        "FAILS (hlc route: fail at k={}; dimension route: strict slack at {}; definition route: fails)",
        ks(&failing),
        slack.join(", ")
    )
}

fn outcome_word(o: &ScanOutcome) -> &'static str {
    match o {
        ScanOutcome::Lemma(v) if v.holds => "HOLDS",
        ScanOutcome::Hlc(h) if h.overall => "HOLDS",
        ScanOutcome::Lemma(_) | ScanOutcome::Hlc(_) => "FAILS",
        ScanOutcome::Massey(m) if m.vanishes => "VANISHES",
        ScanOutcome::Massey(_) => "NONZERO",
    }
}

fn what_name(w: &ScanWhat) -> String {
    match w {
        ScanWhat::Lemma => "lemma".into(),
        ScanWhat::Hlc(f) => format!("hlc {f}"),
        ScanWhat::Massey { .. } => "massey".into(),
    }
}

fn scan_report(spec: &ManifoldSpec, label: &str, rows: &[ScanRow], what: &ScanWhat, format: Format) -> String {
    let held: Vec<bool> = rows.iter().filter_map(|r| r.outcome.as_ref().ok().map(ScanOutcome::flag)).collect();
    match format {
        Format::Text => {
            let mut text = format!("cscoh {VERSION}\nscan: {} of {} over {label}\n", what_name(what), spec.name);
            for r in rows {
                match &r.outcome {
                    Ok(o) => {
                        let _ = writeln!(text, "  {label} = {}: {}", r.value, outcome_word(o));
                    }
                    Err(e) => {
                        let _ = writeln!(text, "  {label} = {}: error: {e}", r.value);
                    }
                }
            }
            let _ = writeln!(
                text,
                "{} of {} sampled values have flag true; nothing is claimed between samples",
                held.iter().filter(|&&b| b).count(),
                rows.len()
            );
            text
        }
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|r| match &r.outcome {
                    Ok(o) => json!({"value": r.value.to_string(), "result": outcome_word(o), "flag": o.flag()}),
                    Err(e) => json!({"value": r.value.to_string(), "error": e.to_string()}),
                })
                .collect();
            json_out(json!({
                "schema": 1,
                "version": VERSION,
                "scan": {"spec": spec.name, "over": label, "what": what_name(what), "rows": rows},
            }))
        }
    }
}

pub fn parameter_scan(
    spec: &ManifoldSpec,
    name: &str,
    base: &BTreeMap<String, Q>,
    values: &[Q],
    what: &ScanWhat,
    format: Format,
) -> Result<String, Error> {
    let rows = deformation_scan(spec, name, base, values, what)?;
    Ok(scan_report(spec, name, &rows, what, format))
}

pub fn omega_scan(
    spec: &ManifoldSpec,
    params: &BTreeMap<String, Q>,
    direction: &str,
    eps: &[Q],
    what: &ScanWhat,
    format: Format,
) -> Result<String, Error> {
    let inst = instantiate(spec, params)?;
    let u = inst.parse_form(direction)?;
    let rows = omega_perturbation_scan(spec, params, &u, eps, what)?;
    Ok(scan_report(spec, "eps", &rows, what, format))
}

pub fn catalog_list(format: Format) -> String {
    match format {
        Format::Text => {
            let mut out = String::new();
            for e in catalog::list() {
                let _ = writeln!(out, "{}", e.name);
                for (p, v) in e.parameters {
                    let _ = writeln!(out, "  parameter {p} (default {v})");
                }
                for line in e.provenance {
                    let _ = writeln!(out, "  - {line}");
                }
            }
            out
        }
        Format::Json => {
            let entries: Vec<Value> = catalog::list()
                .iter()
                .map(|e| {
                    let params: Map<String, Value> =
                        e.parameters.iter().map(|(p, v)| (p.to_string(), json!(v))).collect();
                    json!({"name": e.name, "parameters": params, "expected": e.provenance})
                })
                .collect();
            json_out(json!({"schema": 1, "version": VERSION, "catalog": entries}))
        }
    }
}
