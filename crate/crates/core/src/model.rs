//! Manifold specifications, the spec document format, and validated
//! instances carrying the `∂̄` and `∂` matrices.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::exterior::{component_dim, enumerate_basis, wedge, Bidegree, Form, MonomialIndex, Side, MAX_N};
use crate::family::OperatorFamily;
use crate::linalg::ExactMatrix;
use crate::poly::{Poly, SymForm};
use crate::scalar::GaussianRational as Q;
use crate::syntax::{self, NameContext, Token};
use crate::Error;

/// A generator: `ξ^{index+1}` or `η^{index+1}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Generator {
    pub side: Side,
    pub index: usize,
}

impl Generator {
    pub fn holo(index: usize) -> Self {
        Self { side: Side::Holo, index }
    }

    pub fn anti(index: usize) -> Self {
        Self { side: Side::Anti, index }
    }

    pub fn form(self, n: usize) -> Form {
        Form::generator(n, self.side, self.index)
    }
}

/// Which generator rules to extend.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Rules {
    Dbar,
    Del,
}

impl Rules {
    fn required(self, side: Side) -> Bidegree {
        match (self, side) {
            (Rules::Dbar, Side::Holo) => Bidegree::new(1, 1),
            (Rules::Dbar, Side::Anti) => Bidegree::new(0, 2),
            (Rules::Del, Side::Holo) => Bidegree::new(2, 0),
            (Rules::Del, Side::Anti) => Bidegree::new(1, 1),
        }
    }

    fn shift(self) -> (i32, i32) {
        match self {
            Rules::Dbar => (0, 1),
            Rules::Del => (1, 0),
        }
    }

    fn section(self) -> &'static str {
        match self {
            Rules::Dbar => "dbar",
            Rules::Del => "del",
        }
    }
}

/// `η^k = factor · conj(ξ^{partner})`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ConjugatePair {
    pub partner: usize,
    pub factor: Q,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ManifoldSpec {
    pub name: String,
    pub n: usize,
    pub holo_names: Vec<String>,
    pub anti_names: Vec<String>,
    /// Declared parameters and their default values, in declaration order.
    pub parameters: Vec<(String, Q)>,
    pub dbar_rules: BTreeMap<Generator, SymForm>,
    pub del_rules: Option<BTreeMap<Generator, SymForm>>,
    pub omega: SymForm,
    pub metric_weights: Vec<BigRational>,
    /// Indexed by antiholomorphic generator.
    pub conjugation: Option<Vec<ConjugatePair>>,
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_') && chars.all(|c| c.is_alphanumeric() || c == '_')
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

struct Section {
    header_line: usize,
    lines: Vec<(usize, String)>,
}

const SECTIONS: [&str; 7] = ["manifold", "parameters", "dbar", "del", "omega", "metric", "conjugation"];

fn split_sections(text: &str) -> Result<BTreeMap<String, Section>, Error> {
    let mut sections: BTreeMap<String, Section> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        if let Some(inner) = line.strip_prefix('[') {
            let name = inner
                .strip_suffix(']')
                .ok_or_else(|| Error::parse(line_no, line, "malformed section header"))?
                .trim()
                .to_string();
            if !SECTIONS.contains(&name.as_str()) {
                return Err(Error::parse(line_no, line, "unknown section"));
            }
            if sections.contains_key(&name) {
                return Err(Error::parse(line_no, line, "duplicate section"));
            }
            sections.insert(name.clone(), Section { header_line: line_no, lines: Vec::new() });
            current = Some(name);
            continue;
        }
        let Some(name) = &current else {
            return Err(Error::parse(line_no, line, "content before the first section header"));
        };
        sections.get_mut(name).expect("current section").lines.push((line_no, line.to_string()));
    }
    Ok(sections)
}

fn key_value(line_no: usize, line: &str) -> Result<(String, String), Error> {
    let (k, v) = line.split_once('=').ok_or_else(|| Error::parse(line_no, line, "expected `name = value`"))?;
    let key = k.trim().to_string();
    if !is_identifier(&key) {
        return Err(Error::parse(line_no, key, "expected a name before `=`"));
    }
    Ok((key, v.trim().to_string()))
}

fn parse_name_list(line_no: usize, value: &str) -> Result<Vec<String>, Error> {
    value
        .split(',')
        .map(|s| {
            let s = s.trim();
            if is_identifier(s) {
                Ok(s.to_string())
            } else {
                Err(Error::parse(line_no, s, "expected a generator name"))
            }
        })
        .collect()
}

fn scalar_at(line_no: usize, value: &str) -> Result<Q, Error> {
    match syntax::parse_scalar(value) {
        Ok(q) => Ok(q),
        Err(Error::Parse { token, message, .. }) => Err(Error::parse(line_no, token, message)),
        Err(e) => Err(e),
    }
}

struct ManifoldHeader {
    name: String,
    n: usize,
    holo: Vec<String>,
    anti: Vec<String>,
}

fn parse_manifold(section: &Section) -> Result<ManifoldHeader, Error> {
    let mut fields: BTreeMap<String, (usize, String)> = BTreeMap::new();
    for (line_no, line) in &section.lines {
        let (k, v) = key_value(*line_no, line)?;
        if !["name", "n", "generators_10", "generators_01"].contains(&k.as_str()) {
            return Err(Error::parse(*line_no, k, "unknown key in [manifold]"));
        }
        if fields.insert(k.clone(), (*line_no, v)).is_some() {
            return Err(Error::parse(*line_no, k, "duplicate key"));
        }
    }
    let get = |k: &str| {
        fields
            .get(k)
            .cloned()
            .ok_or_else(|| Error::parse(section.header_line, "[manifold]", format!("missing key `{k}`")))
    };
    let (_, name) = get("name")?;
    let (n_line, n_text) = get("n")?;
    let n: usize = n_text.parse().map_err(|_| Error::parse(n_line, n_text.clone(), "expected a positive integer"))?;
    if n == 0 || n > MAX_N {
        return Err(Error::parse(n_line, n_text, format!("n must be between 1 and {MAX_N}")));
    }
    let (h_line, h_text) = get("generators_10")?;
    let (a_line, a_text) = get("generators_01")?;
    let holo = parse_name_list(h_line, &h_text)?;
    let anti = parse_name_list(a_line, &a_text)?;
    if holo.len() != n {
        return Err(Error::parse(h_line, h_text, format!("expected {n} generator names")));
    }
    if anti.len() != n {
        return Err(Error::parse(a_line, a_text, format!("expected {n} generator names")));
    }
    let mut seen = BTreeSet::new();
    for (line_no, g) in holo.iter().map(|g| (h_line, g)).chain(anti.iter().map(|g| (a_line, g))) {
        if g == "i" {
            return Err(Error::parse(line_no, g, "`i` is reserved for the imaginary unit"));
        }
        if !seen.insert(g.clone()) {
            return Err(Error::parse(line_no, g, "duplicate generator name"));
        }
    }
    Ok(ManifoldHeader { name, n, holo, anti })
}

fn tokens_of(line_no: usize, text: &str) -> Result<Vec<Token>, Error> {
    syntax::tokenize(text, line_no)
}

fn first_bad_term(f: &SymForm, bd: Bidegree, ctx: &NameContext) -> Option<String> {
    f.terms()
        .iter()
        .find(|(m, _)| m.bidegree() != bd)
        .map(|(&m, p)| syntax::format_sym_form(&SymForm::monomial(f.n(), m, p.clone()), &ctx.holo, &ctx.anti))
}

fn parse_rules(section: &Section, ctx: &NameContext, which: Rules) -> Result<BTreeMap<Generator, SymForm>, Error> {
    let mut rules = BTreeMap::new();
    for (line_no, line) in &section.lines {
        let (k, v) = key_value(*line_no, line)?;
        let generator = if let Some(j) = ctx.holo.iter().position(|g| *g == k) {
            Generator::holo(j)
        } else if let Some(j) = ctx.anti.iter().position(|g| *g == k) {
            Generator::anti(j)
        } else {
            return Err(Error::parse(*line_no, k, "unknown generator name"));
        };
        let value = syntax::parse_tokens(&tokens_of(*line_no, &v)?, ctx, *line_no)?;
        let required = which.required(generator.side);
        if let Some(bad) = first_bad_term(&value, required, ctx) {
            return Err(Error::parse(
                *line_no,
                bad,
                format!("[{}] value for `{k}` must have bidegree {required}", which.section()),
            ));
        }
        if rules.insert(generator, value).is_some() {
            return Err(Error::parse(*line_no, k, "duplicate rule"));
        }
    }
    Ok(rules)
}

/// Parses a spec document.
pub fn parse_spec(text: &str) -> Result<ManifoldSpec, Error> {
    let sections = split_sections(text)?;
    let manifold = sections.get("manifold").ok_or_else(|| Error::parse(1, "", "missing [manifold] section"))?;
    let header = parse_manifold(manifold)?;
    let n = header.n;

    let mut parameters: Vec<(String, Q)> = Vec::new();
    if let Some(sec) = sections.get("parameters") {
        for (line_no, line) in &sec.lines {
            let (k, v) = key_value(*line_no, line)?;
            if k == "i" || header.holo.contains(&k) || header.anti.contains(&k) {
                return Err(Error::parse(*line_no, k, "parameter name collides with a generator or `i`"));
            }
            if parameters.iter().any(|(p, _)| *p == k) {
                return Err(Error::parse(*line_no, k, "duplicate parameter"));
            }
            parameters.push((k, scalar_at(*line_no, &v)?));
        }
    }

    let ctx = NameContext {
        n,
        holo: header.holo.clone(),
        anti: header.anti.clone(),
        params: parameters.iter().map(|(p, _)| p.clone()).collect(),
    };

    let dbar_rules = match sections.get("dbar") {
        Some(sec) => parse_rules(sec, &ctx, Rules::Dbar)?,
        None => BTreeMap::new(),
    };
    let del_rules = sections.get("del").map(|sec| parse_rules(sec, &ctx, Rules::Del)).transpose()?;

    let omega_sec = sections.get("omega").ok_or_else(|| Error::parse(1, "", "missing [omega] section"))?;
    let mut tokens = Vec::new();
    for (line_no, line) in &omega_sec.lines {
        tokens.extend(tokens_of(*line_no, line)?);
    }
    let end_line = omega_sec.lines.last().map_or(omega_sec.header_line, |(l, _)| *l);
    if tokens.is_empty() {
        return Err(Error::parse(omega_sec.header_line, "[omega]", "empty symplectic form"));
    }
    let omega = syntax::parse_tokens(&tokens, &ctx, end_line)?;
    if let Some(bad) = first_bad_term(&omega, Bidegree::new(1, 1), &ctx) {
        return Err(Error::parse(omega_sec.header_line, bad, "omega must have bidegree (1,1)"));
    }

    let mut metric_weights = vec![BigRational::one(); n];
    if let Some(sec) = sections.get("metric") {
        for (line_no, line) in &sec.lines {
            let (k, v) = key_value(*line_no, line)?;
            if k != "weights" {
                return Err(Error::parse(*line_no, k, "unknown key in [metric]"));
            }
            let items: Vec<&str> = v.split(',').map(str::trim).collect();
            if items.len() != n {
                return Err(Error::parse(*line_no, v.clone(), format!("expected {n} weights")));
            }
            metric_weights = items
                .iter()
                .map(|s| {
                    let q = scalar_at(*line_no, s)?;
                    if !q.is_real() || !q.re().is_positive() {
                        return Err(Error::parse(*line_no, *s, "weights must be positive rationals"));
                    }
                    Ok(q.re().clone())
                })
                .collect::<Result<_, Error>>()?;
        }
    }

    let conjugation = sections.get("conjugation").map(|sec| parse_conjugation(sec, &ctx)).transpose()?;

    Ok(ManifoldSpec {
        name: header.name,
        n,
        holo_names: header.holo,
        anti_names: header.anti,
        parameters,
        dbar_rules,
        del_rules,
        omega,
        metric_weights,
        conjugation,
    })
}

fn parse_conjugation(sec: &Section, ctx: &NameContext) -> Result<Vec<ConjugatePair>, Error> {
    let n = ctx.n;
    let mut pairs: Vec<Option<ConjugatePair>> = vec![None; n];
    for (line_no, line) in &sec.lines {
        let (k, v) = key_value(*line_no, line)?;
        let Some(slot) = ctx.anti.iter().position(|g| *g == k) else {
            return Err(Error::parse(*line_no, k, "expected a (0,1) generator"));
        };
        let plain = NameContext { params: Vec::new(), ..ctx.clone() };
        let value = syntax::parse_tokens(&tokens_of(*line_no, &v)?, &plain, *line_no)?
            .as_form()
            .expect("no parameters in scope");
        let single = (value.terms().len() == 1).then(|| value.terms().iter().next().expect("one term"));
        let Some((&m, c)) = single.filter(|(m, _)| m.bidegree() == Bidegree::new(1, 0)) else {
            return Err(Error::parse(*line_no, v, "expected a unit scalar times a (1,0) generator"));
        };
        if !c.is_unit_modulus() {
            return Err(Error::parse(*line_no, v, "conjugation factor must have modulus 1"));
        }
        let partner = m.holo.trailing_zeros() as usize;
        if pairs[slot].is_some() {
            return Err(Error::parse(*line_no, k, "duplicate conjugation entry"));
        }
        if pairs.iter().flatten().any(|p| p.partner == partner) {
            return Err(Error::parse(*line_no, v, "two (0,1) generators conjugate to the same (1,0) generator"));
        }
        pairs[slot] = Some(ConjugatePair { partner, factor: c.clone() });
    }
    pairs
        .into_iter()
        .enumerate()
        .map(|(k, p)| p.ok_or_else(|| Error::parse(sec.header_line, ctx.anti[k].clone(), "missing conjugation entry")))
        .collect()
}

impl ManifoldSpec {
    pub fn name_context(&self) -> NameContext {
        NameContext {
            n: self.n,
            holo: self.holo_names.clone(),
            anti: self.anti_names.clone(),
            params: self.parameters.iter().map(|(p, _)| p.clone()).collect(),
        }
    }

    pub fn format_sym(&self, f: &SymForm) -> String {
        syntax::format_sym_form(f, &self.holo_names, &self.anti_names)
    }

    pub fn format(&self, f: &Form) -> String {
        syntax::format_form(f, &self.holo_names, &self.anti_names)
    }

    pub fn generator_name(&self, g: Generator) -> &str {
        match g.side {
            Side::Holo => &self.holo_names[g.index],
            Side::Anti => &self.anti_names[g.index],
        }
    }

    pub fn rules(&self, which: Rules) -> Option<&BTreeMap<Generator, SymForm>> {
        match which {
            Rules::Dbar => Some(&self.dbar_rules),
            Rules::Del => self.del_rules.as_ref(),
        }
    }

    /// The document this spec parses back from.
    pub fn to_document(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "[manifold]");
        let _ = writeln!(out, "name = {}", self.name);
        let _ = writeln!(out, "n = {}", self.n);
        let _ = writeln!(out, "generators_10 = {}", self.holo_names.join(", "));
        let _ = writeln!(out, "generators_01 = {}", self.anti_names.join(", "));
        if !self.parameters.is_empty() {
            let _ = writeln!(out, "\n[parameters]");
            for (p, v) in &self.parameters {
                let _ = writeln!(out, "{p} = {v}");
            }
        }
        let rules_text = |out: &mut String, section: &str, rules: &BTreeMap<Generator, SymForm>| {
            let _ = writeln!(out, "\n[{section}]");
            for (g, f) in rules {
                if !f.is_zero() {
                    let _ = writeln!(out, "{} = {}", self.generator_name(*g), self.format_sym(f));
                }
            }
        };
        rules_text(&mut out, "dbar", &self.dbar_rules);
        if let Some(del) = &self.del_rules {
            rules_text(&mut out, "del", del);
        }
        let _ = writeln!(out, "\n[omega]\n{}", self.format_sym(&self.omega));
        let weights: Vec<String> = self.metric_weights.iter().map(|w| Q::from(w.clone()).to_string()).collect();
        let _ = writeln!(out, "\n[metric]\nweights = {}", weights.join(", "));
        if let Some(conj) = &self.conjugation {
            let _ = writeln!(out, "\n[conjugation]");
            for (k, pair) in conj.iter().enumerate() {
                let c = &pair.factor;
                let c_text = if c.is_real() { c.to_string() } else { format!("({c})") };
                let _ = writeln!(out, "{} = {} * {}", self.anti_names[k], c_text, self.holo_names[pair.partner]);
            }
        }
        out
    }

    /// The same spec with every parameter replaced by its value.
    pub fn resolve(&self, assignments: &BTreeMap<String, Q>) -> Result<ManifoldSpec, Error> {
        for name in assignments.keys() {
            if !self.parameters.iter().any(|(p, _)| p == name) {
                return Err(Error::Spec(format!("unknown parameter `{name}`")));
            }
        }
        let values: BTreeMap<String, Q> = self
            .parameters
            .iter()
            .map(|(p, d)| (p.clone(), assignments.get(p).cloned().unwrap_or_else(|| d.clone())))
            .collect();
        let eval = |f: &SymForm| f.evaluate(&values).map(|f| SymForm::from(&f));
        let eval_rules = |rules: &BTreeMap<Generator, SymForm>| -> Result<BTreeMap<Generator, SymForm>, Error> {
            rules.iter().map(|(g, f)| Ok((*g, eval(f)?))).collect()
        };
        Ok(ManifoldSpec {
            parameters: Vec::new(),
            dbar_rules: eval_rules(&self.dbar_rules)?,
            del_rules: self.del_rules.as_ref().map(eval_rules).transpose()?,
            omega: eval(&self.omega)?,
            ..self.clone()
        })
    }

    /// Rule values as forms; fails if a parameter is still unresolved.
    fn rule_forms(&self, which: Rules) -> Result<Option<Vec<Form>>, Error> {
        let Some(rules) = self.rules(which) else {
            return Ok(None);
        };
        let n = self.n;
        let mut forms = vec![Form::zero(n); 2 * n];
        for (g, f) in rules {
            let form = f.as_form().ok_or_else(|| {
                Error::Spec(format!("rule for `{}` still contains parameters", self.generator_name(*g)))
            })?;
            let slot = match g.side {
                Side::Holo => g.index,
                Side::Anti => n + g.index,
            };
            forms[slot] = form;
        }
        Ok(Some(forms))
    }

    /// Returns a copy with `omega + form` as symplectic form.
    pub fn with_omega_perturbation(&self, name: &str, form: &Form) -> Result<ManifoldSpec, Error> {
        if !form.is_homogeneous_of(Bidegree::new(1, 1)) {
            return Err(Error::Spec("omega perturbation must have bidegree (1,1)".into()));
        }
        let mut out = self.clone();
        out.name = name.to_string();
        out.omega = self.omega.add(&SymForm::from(form));
        Ok(out)
    }

    /// `conj` of a form, when conjugation data is present.
    pub fn conjugate(&self, f: &Form) -> Option<Form> {
        let conj = self.conjugation.as_ref()?;
        let n = self.n;
        // conj(ξ^j) = conj(c_k)·η^k and conj(η^k) = conj(c_k)·ξ^j for η^k = c_k·conj(ξ^j).
        let mut image = vec![Form::zero(n); 2 * n];
        for (k, pair) in conj.iter().enumerate() {
            image[pair.partner] = Form::generator(n, Side::Anti, k).scale(&pair.factor.conj());
            image[n + k] = Form::generator(n, Side::Holo, pair.partner).scale(&pair.factor.conj());
        }
        let mut out = Form::zero(n);
        for (&m, c) in f.terms() {
            let mut term = Form::constant(n, c.conj());
            for (side, j) in m.generators() {
                let slot = if side == Side::Holo { j } else { n + j };
                term = wedge(&term, &image[slot]);
            }
            out = out.add(&term);
        }
        Some(out)
    }
}

/// The anti-derivation extending the generator rules, as matrices.
pub fn extend_derivation(spec: &ManifoldSpec, which: Rules) -> Result<OperatorFamily, Error> {
    let n = spec.n;
    let forms = spec.rule_forms(which)?.unwrap_or_else(|| vec![Form::zero(n); 2 * n]);
    Ok(derivation_from_forms(n, which.shift(), &forms))
}

fn derivation_from_forms(n: usize, shift: (i32, i32), forms: &[Form]) -> OperatorFamily {
    OperatorFamily::from_action(n, shift, |u| {
        let mut out = Form::zero(n);
        for (&m, c) in u.terms() {
            let gens = m.generators();
            for (i, &(side, j)) in gens.iter().enumerate() {
                let slot = if side == Side::Holo { j } else { n + j };
                if forms[slot].is_zero() {
                    continue;
                }
                let mut term = Form::constant(n, if i % 2 == 0 { c.clone() } else { -c.clone() });
                for (k, &(s, jj)) in gens.iter().enumerate() {
                    let factor = if k == i { forms[slot].clone() } else { Form::generator(n, s, jj) };
                    term = wedge(&term, &factor);
                }
                out = out.add(&term);
            }
        }
        out
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckStatus {
    Passed,
    NotChecked(String),
}

/// One line of the validation report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub identity: String,
    pub status: CheckStatus,
}

impl Check {
    fn passed(identity: &str) -> Self {
        Self { identity: identity.to_string(), status: CheckStatus::Passed }
    }

    fn skipped(identity: &str, reason: &str) -> Self {
        Self { identity: identity.to_string(), status: CheckStatus::NotChecked(reason.to_string()) }
    }

    pub fn line(&self) -> String {
        match &self.status {
            CheckStatus::Passed => format!("{}: ok", self.identity),
            CheckStatus::NotChecked(why) => format!("{}: not checked ({why})", self.identity),
        }
    }
}

/// A validated finite complex.
#[derive(Clone, Debug)]
pub struct ComplexInstance {
    /// The spec with all parameters substituted.
    pub spec: ManifoldSpec,
    /// Parameter values used, in declaration order.
    pub parameter_values: Vec<(String, Q)>,
    pub dbar: OperatorFamily,
    pub del: Option<OperatorFamily>,
    pub omega: Form,
    /// `omega = i Σ Ω_jk ξ^j ∧ η^k`.
    pub omega_matrix: ExactMatrix,
    pub omega_inverse: ExactMatrix,
    pub checks: Vec<Check>,
}

fn require_zero(identity: &str, op: &OperatorFamily, spec: &ManifoldSpec) -> Result<(), Error> {
    match op.nonzero_witness() {
        None => Ok(()),
        Some(w) => Err(Error::Validation {
            identity: identity.to_string(),
            witness: w.describe(&spec.holo_names, &spec.anti_names),
        }),
    }
}

fn power(f: &Form, k: usize) -> Form {
    (0..k).fold(Form::constant(f.n(), Q::one()), |acc, _| wedge(&acc, f))
}

/// Resolves parameters, builds `∂̄` (and `∂`), and checks every structural identity.
pub fn instantiate(spec: &ManifoldSpec, assignments: &BTreeMap<String, Q>) -> Result<ComplexInstance, Error> {
    let parameter_values: Vec<(String, Q)> = spec
        .parameters
        .iter()
        .map(|(p, d)| (p.clone(), assignments.get(p).cloned().unwrap_or_else(|| d.clone())))
        .collect();
    let resolved = spec.resolve(assignments)?;
    let n = resolved.n;
    let mut checks = Vec::new();

    let dbar = extend_derivation(&resolved, Rules::Dbar)?;
    require_zero("dbar^2 = 0", &dbar.compose(&dbar), &resolved)?;
    checks.push(Check::passed("dbar^2 = 0"));

    let omega = resolved.omega.as_form().expect("resolved");
    if !omega.is_homogeneous_of(Bidegree::new(1, 1)) {
        return Err(Error::Validation { identity: "omega of bidegree (1,1)".into(), witness: resolved.format(&omega) });
    }
    let minus_i = -Q::i();
    let omega_matrix = ExactMatrix::from_rows(
        (0..n)
            .map(|j| (0..n).map(|k| &minus_i * &omega.coefficient(MonomialIndex::new(1 << j, 1 << k))).collect())
            .collect(),
    );
    let omega_n = power(&omega, n);
    let inverse = omega_matrix.inverse();
    match (&inverse, omega_n.is_zero()) {
        (Some(_), false) => {}
        (None, true) => {
            return Err(Error::Validation {
                identity: "omega nondegenerate".into(),
                witness: format!("omega^{n} = 0 for omega = {}", resolved.format(&omega)),
            })
        }
        _ => return Err(Error::Consistency("invertibility of the omega matrix disagrees with omega^n != 0".into())),
    }
    let omega_inverse = inverse.expect("checked");
    checks.push(Check::passed("omega nondegenerate"));

    let dbar_omega = dbar.apply(&omega);
    if !dbar_omega.is_zero() {
        return Err(Error::Validation { identity: "dbar omega = 0".into(), witness: resolved.format(&dbar_omega) });
    }
    checks.push(Check::passed("dbar omega = 0"));

    let del = match extend_derivation_opt(&resolved, Rules::Del)? {
        Some(del) => {
            require_zero("del^2 = 0", &del.compose(&del), &resolved)?;
            checks.push(Check::passed("del^2 = 0"));
            require_zero("del dbar + dbar del = 0", &OperatorFamily::anticommutator(&del, &dbar), &resolved)?;
            checks.push(Check::passed("del dbar + dbar del = 0"));
            let del_omega = del.apply(&omega);
            if !del_omega.is_zero() {
                return Err(Error::Validation {
                    identity: "del omega = 0".into(),
                    witness: resolved.format(&del_omega),
                });
            }
            checks.push(Check::passed("del omega = 0"));
            Some(del)
        }
        None => {
            checks.push(Check::skipped("del omega = 0", "no del rules"));
            None
        }
    };

    if resolved.conjugation.is_some() {
        let conj_omega = resolved.conjugate(&omega).expect("conjugation present");
        if conj_omega != omega {
            return Err(Error::Validation {
                identity: "omega real".into(),
                witness: format!("conj(omega) = {}", resolved.format(&conj_omega)),
            });
        }
        checks.push(Check::passed("omega real"));
        if let Some(del_op) = &del {
            for side in [Side::Holo, Side::Anti] {
                for j in 0..n {
                    let g = Form::generator(n, side, j);
                    let lhs = resolved.conjugate(&dbar.apply(&g)).expect("conjugation present");
                    let rhs = del_op.apply(&resolved.conjugate(&g).expect("conjugation present"));
                    if lhs != rhs {
                        return Err(Error::Validation {
                            identity: "conj(dbar g) = del(conj g)".into(),
                            witness: format!("g = {}", resolved.format(&g)),
                        });
                    }
                }
            }
            checks.push(Check::passed("conj(dbar g) = del(conj g)"));
        } else {
            checks.push(Check::skipped("conj(dbar g) = del(conj g)", "no del rules"));
        }
    } else {
        checks.push(Check::skipped("omega real", "no conjugation data"));
    }

    Ok(ComplexInstance { spec: resolved, parameter_values, dbar, del, omega, omega_matrix, omega_inverse, checks })
}

fn extend_derivation_opt(spec: &ManifoldSpec, which: Rules) -> Result<Option<OperatorFamily>, Error> {
    match spec.rules(which) {
        Some(_) => extend_derivation(spec, which).map(Some),
        None => Ok(None),
    }
}

impl ComplexInstance {
    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn dim(&self, bd: Bidegree) -> usize {
        component_dim(self.n(), bd)
    }

    pub fn format(&self, f: &Form) -> String {
        self.spec.format(f)
    }

    /// Parses a form in this instance's generator names; parameter names
    /// stand for the values this instance was built with.
    pub fn parse_form(&self, text: &str) -> Result<Form, Error> {
        let ctx = NameContext {
            params: self.parameter_values.iter().map(|(p, _)| p.clone()).collect(),
            ..self.spec.name_context()
        };
        let values: BTreeMap<String, Q> = self.parameter_values.iter().cloned().collect();
        syntax::parse_sym_form(text, &ctx)?.evaluate(&values)
    }

    pub fn generator(&self, side: Side, j: usize) -> Form {
        Form::generator(self.n(), side, j)
    }

    pub fn basis(&self, bd: Bidegree) -> Vec<MonomialIndex> {
        enumerate_basis(self.n(), bd)
    }

    pub fn has_conjugation(&self) -> bool {
        self.spec.conjugation.is_some()
    }

    pub fn conjugate(&self, f: &Form) -> Option<Form> {
        self.spec.conjugate(f)
    }

    pub fn validation_lines(&self) -> Vec<String> {
        self.checks.iter().map(Check::line).collect()
    }
}

fn substitute(f: &SymForm, images: &[SymForm]) -> SymForm {
    let n = f.n();
    let mut out = SymForm::zero(n);
    for (&m, p) in f.terms() {
        let mut term = SymForm::scalar(n, p.clone());
        for (side, j) in m.generators() {
            let slot = if side == Side::Holo { j } else { n + j };
            term = term.wedge(&images[slot]);
        }
        out = out.add(&term);
    }
    out
}

fn linear_combination(n: usize, side: Side, coeffs: impl Iterator<Item = Q>) -> SymForm {
    let mut out = SymForm::zero(n);
    for (k, c) in coeffs.enumerate() {
        out = out.add(&SymForm::monomial(n, MonomialIndex::generator(side, k), Poly::constant(c)));
    }
    out
}

/// Rewrites the spec in the frame `ξ' = m·ξ`, `η' = conj(m)·η`, keeping names.
pub fn change_frame(spec: &ManifoldSpec, m: &ExactMatrix) -> Result<ManifoldSpec, Error> {
    change_frame_named(spec, m, &spec.holo_names, &spec.anti_names)
}

/// [`change_frame`] with new generator names. Metric weights reset to 1,
/// since a frame change does not keep a diagonal metric diagonal.
pub fn change_frame_named(
    spec: &ManifoldSpec,
    m: &ExactMatrix,
    holo_names: &[String],
    anti_names: &[String],
) -> Result<ManifoldSpec, Error> {
    let n = spec.n;
    if m.rows() != n || m.cols() != n {
        return Err(Error::Dimension(format!("frame change must be {n}x{n}")));
    }
    if holo_names.len() != n || anti_names.len() != n {
        return Err(Error::Spec(format!("expected {n} names of each kind")));
    }
    let inv = m.inverse().ok_or_else(|| Error::Spec("frame change matrix is singular".into()))?;
    let conj_m = ExactMatrix::from_rows(m.row_vecs().iter().map(|r| r.iter().map(Q::conj).collect()).collect());

    // Old generators in the new frame: ξ = m⁻¹ξ', η = conj(m⁻¹)η'.
    let mut images = Vec::with_capacity(2 * n);
    for j in 0..n {
        images.push(linear_combination(n, Side::Holo, inv.row(j).iter().cloned()));
    }
    for j in 0..n {
        images.push(linear_combination(n, Side::Anti, inv.row(j).iter().map(Q::conj)));
    }

    let rewrite_rules = |rules: &BTreeMap<Generator, SymForm>| -> BTreeMap<Generator, SymForm> {
        let mut out = BTreeMap::new();
        for side in [Side::Holo, Side::Anti] {
            let coeffs = if side == Side::Holo { m } else { &conj_m };
            for a in 0..n {
                let mut value = SymForm::zero(n);
                for j in 0..n {
                    let c = coeffs.get(a, j);
                    if let (false, Some(rule)) = (c.is_zero(), rules.get(&Generator { side, index: j })) {
                        value = value.add(&substitute(rule, &images).scale(c));
                    }
                }
                if !value.is_zero() {
                    out.insert(Generator { side, index: a }, value);
                }
            }
        }
        out
    };

    let conjugation = spec.conjugation.as_ref().and_then(|pairs| {
        // conj(ξ^j) = Σ_k P_jk η^k, and P transforms to conj(m)·P·conj(m)⁻¹.
        let mut p = ExactMatrix::zeros(n, n);
        for (k, pair) in pairs.iter().enumerate() {
            p.set(pair.partner, k, pair.factor.conj());
        }
        let p_new = conj_m.mul(&p).mul(&conj_m.inverse().expect("conjugate of invertible"));
        unit_monomial_pairs(&p_new)
    });

    let out = ManifoldSpec {
        name: spec.name.clone(),
        n,
        holo_names: holo_names.to_vec(),
        anti_names: anti_names.to_vec(),
        parameters: spec.parameters.clone(),
        dbar_rules: rewrite_rules(&spec.dbar_rules),
        del_rules: spec.del_rules.as_ref().map(rewrite_rules),
        omega: substitute(&spec.omega, &images),
        metric_weights: vec![BigRational::one(); n],
        conjugation,
    };
    instantiate(&out, &BTreeMap::new())?;
    Ok(out)
}

fn unit_monomial_pairs(p: &ExactMatrix) -> Option<Vec<ConjugatePair>> {
    let n = p.rows();
    let mut pairs = Vec::with_capacity(n);
    for k in 0..n {
        let col = p.column(k);
        let nonzero: Vec<usize> = (0..n).filter(|&j| !col[j].is_zero()).collect();
        let [j] = nonzero[..] else { return None };
        if !col[j].is_unit_modulus() {
            return None;
        }
        pairs.push(ConjugatePair { partner: j, factor: col[j].conj() });
    }
    let partners: BTreeSet<usize> = pairs.iter().map(|p| p.partner).collect();
    (partners.len() == n).then_some(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    const KT: &str = "
[manifold]
name = kt
n = 2
generators_10 = phi1, phi2
generators_01 = phib1, phib2
[dbar]
phi2 = (-1/2*i) * phi1^phib1
[del]
phib2 = (-1/2*i) * phi1^phib1
[omega]
1/2 * phi1^phib2
  - 1/2 * phi2^phib1
[conjugation]
phib1 = 1 * phi1
phib2 = 1 * phi2
";

    fn q(s: &str) -> Q {
        s.parse().unwrap()
    }

    #[test]
    fn parses_and_round_trips() {
        let spec = parse_spec(KT).unwrap();
        assert_eq!(spec.n, 2);
        assert_eq!(spec.dbar_rules.len(), 1);
        assert_eq!(parse_spec(&spec.to_document()).unwrap(), spec);
    }

    #[test]
    fn empty_dbar_gives_zero_operator() {
        let doc = "[manifold]\nname = flat\nn = 1\ngenerators_10 = x\ngenerators_01 = y\n[dbar]\n[omega]\ni*x^y\n";
        let spec = parse_spec(doc).unwrap();
        assert!(extend_derivation(&spec, Rules::Dbar).unwrap().is_zero());
        assert!(instantiate(&spec, &BTreeMap::new()).is_ok());
    }

    #[test]
    fn diagnostics_name_line_and_token() {
        let bad = KT.replace("phi2 = (-1/2*i) * phi1^phib1", "phi2 = phi1^phi2");
        match parse_spec(&bad) {
            Err(Error::Parse { line, token, .. }) => {
                assert_eq!(line, 8);
                assert_eq!(token, "phi1^phi2");
            }
            other => panic!("unexpected {other:?}"),
        }
        let unknown = KT.replace("phi2 = (-1/2*i)", "chi = (-1/2*i)");
        assert!(matches!(parse_spec(&unknown), Err(Error::Parse { token, .. }) if token == "chi"));
        let section = format!("{KT}\n[extras]\n");
        assert!(matches!(parse_spec(&section), Err(Error::Parse { .. })));
        let scalar = KT.replace("1/2 * phi1^phib2", "1/ * phi1^phib2");
        assert!(matches!(parse_spec(&scalar), Err(Error::Parse { line: 12, .. })));
        let omega = KT.replace("1/2 * phi1^phib2", "phi1^phi2 + 1/2 * phi1^phib2");
        assert!(matches!(parse_spec(&omega), Err(Error::Parse { .. })));
    }

    #[test]
    fn derivation_spot_checks() {
        let spec = parse_spec(KT).unwrap();
        let inst = instantiate(&spec, &BTreeMap::new()).unwrap();
        let ctx = spec.name_context();
        let f = |s: &str| syntax::parse_form(s, &ctx).unwrap();
        assert!(inst.dbar.apply(&f("phi1")).is_zero());
        assert_eq!(inst.dbar.apply(&f("phi2")), f("(-1/2*i) * phi1^phib1"));
        assert_eq!(inst.dbar.apply(&f("phi2^phib2")), f("(-1/2*i) * phi1^phib1^phib2"));
    }

    #[test]
    fn accepts_closed_rule() {
        let doc = "[manifold]\nname = x\nn = 1\ngenerators_10 = x1\ngenerators_01 = y1\n[dbar]\nx1 = x1^y1\n[omega]\ni*x1^y1\n";
        let spec = parse_spec(doc).unwrap();
        // Here dbar omega = dbar(x1)^y1 = 0, and dbar^2 x1 = dbar(x1)^y1 - x1^dbar(y1) = 0.
        assert!(instantiate(&spec, &BTreeMap::new()).is_ok());
    }

    #[test]
    fn rejects_broken_identities() {
        let not_closed =
            KT.replace("1/2 * phi1^phib2\n  - 1/2 * phi2^phib1", "i * phi2^phib2 + phi1^phib2 - phi2^phib1");
        // dbar(phi2^phib2) = (-1/2*i) phi1^phib1^phib2 != 0, so omega is not closed.
        let spec = parse_spec(&not_closed.replace("[del]\nphib2 = (-1/2*i) * phi1^phib1\n", "")).unwrap();
        let err = instantiate(&spec, &BTreeMap::new()).unwrap_err();
        assert!(matches!(err, Error::Validation { ref identity, .. } if identity == "dbar omega = 0"), "{err:?}");

        let degenerate = KT.replace("1/2 * phi1^phib2\n  - 1/2 * phi2^phib1", "i * phi1^phib1");
        let spec = parse_spec(&degenerate).unwrap();
        assert!(matches!(instantiate(&spec, &BTreeMap::new()), Err(Error::Validation { .. })));

        let doc = "[manifold]\nname = x\nn = 2\ngenerators_10 = a, b\ngenerators_01 = c, d\n[dbar]\nb = a^c\nc = c^d\n[omega]\ni*a^c + i*b^d\n";
        let spec = parse_spec(doc).unwrap();
        let err = instantiate(&spec, &BTreeMap::new()).unwrap_err();
        assert!(matches!(err, Error::Validation { ref identity, .. } if identity == "dbar^2 = 0"), "{err:?}");
    }

    #[test]
    fn frame_change_identity_and_functoriality() {
        let spec = parse_spec(KT).unwrap();
        assert_eq!(change_frame(&spec, &ExactMatrix::identity(2)).unwrap(), spec);
        let a = ExactMatrix::from_rows(vec![vec![q("1"), q("i")], vec![q("1"), q("-i")]]);
        let b = ExactMatrix::from_rows(vec![vec![q("2"), q("0")], vec![q("1"), q("1")]]);
        let direct = change_frame(&spec, &a.mul(&b)).unwrap();
        let stepwise = change_frame(&change_frame(&spec, &b).unwrap(), &a).unwrap();
        assert_eq!(direct, stepwise);
    }

    #[test]
    fn frame_change_rules() {
        let spec = parse_spec(KT).unwrap();
        let m = ExactMatrix::from_rows(vec![vec![q("1"), q("i")], vec![q("1"), q("-i")]]);
        let names = |p: &str| vec![format!("{p}1"), format!("{p}2")];
        let xi = change_frame_named(&spec, &m, &names("xi"), &names("eta")).unwrap();
        let ctx = xi.name_context();
        let f = |s: &str| syntax::parse_form(s, &ctx).unwrap();
        assert_eq!(xi.omega.as_form().unwrap(), f("(1/4*i) * (xi1^eta1 - xi2^eta2)"));
        let expected = f("1/8 * (xi1 + xi2)^(eta1 + eta2)");
        assert_eq!(xi.dbar_rules[&Generator::holo(0)].as_form().unwrap(), expected);
        assert_eq!(xi.dbar_rules[&Generator::holo(1)].as_form().unwrap(), expected.scale(&q("-1")));
        assert!(xi.conjugation.is_some());
    }

    #[test]
    fn parameters_resolve() {
        let doc = "[manifold]\nname = nak\nn = 3\ngenerators_10 = a1, a2, a3\ngenerators_01 = b1, b2, b3\n\
                   [parameters]\nt = 0\n[dbar]\na3 = (2*t) * a1^b2\n[omega]\n(1/2*i)*a1^b1 + 1/2*b2^a3 + 1/2*a2^b3\n";
        let spec = parse_spec(doc).unwrap();
        let at0 = instantiate(&spec, &BTreeMap::new()).unwrap();
        assert!(at0.dbar.is_zero());
        let half = BTreeMap::from([("t".to_string(), q("1/2"))]);
        let inst = instantiate(&spec, &half).unwrap();
        let rules = inst.spec.dbar_rules.values().filter(|f| !f.is_zero()).count();
        assert_eq!(rules, 1);
        assert!(instantiate(&spec, &BTreeMap::from([("s".to_string(), q("1"))])).is_err());
        assert_eq!(parse_spec(&spec.to_document()).unwrap(), spec);
    }
}
