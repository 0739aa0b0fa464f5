//! Verdicts on a computed table: Hard Lefschetz, the `∂̄∂̄^Λ`-lemma,
//! Dolbeault–Massey triple products, wedge closure of harmonic spaces and
//! parameter scans.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::cohomology::{compute_table, image_into, kernel_at, CohomologyTable, Flavor};
use crate::exterior::{component_dim, from_vector, to_vector, wedge, Bidegree, Form};
use crate::family::OperatorFamily;
use crate::linalg::{kernel, solve, subspace_intersect, subspace_sum, ExactMatrix, Subspace};
use crate::model::{instantiate, ComplexInstance, ManifoldSpec};
use crate::operators::{build_sl2, validate_sl2, MetricData, Sl2Data};
use crate::scalar::GaussianRational as Q;
use crate::Error;

fn power(f: &Form, k: usize) -> Form {
    (0..k).fold(Form::constant(f.n(), Q::one()), |acc, _| wedge(&acc, f))
}

fn vector(u: &Form, bd: Bidegree) -> Vec<Q> {
    to_vector(u, bd).expect("form of the stated bidegree")
}

/// A primitive `β` with `op β = u`, if `u` is in the image.
pub fn primitive(op: &OperatorFamily, u: &Form, bd: Bidegree) -> Option<Form> {
    let n = op.n();
    let (a, b) = op.shift();
    let src = bd.shifted((-a, -b), n)?;
    let x = solve(op.block(src), &vector(u, bd))?;
    Some(from_vector(n, &x, src).expect("block shape"))
}

/// `[ω^k]: H^{n-k} → H^{n+k}` for one `k`.
#[derive(Clone, Debug)]
pub struct HlcStep {
    pub k: usize,
    pub well_defined: bool,
    pub rank: usize,
    pub source_dim: usize,
    pub target_dim: usize,
    pub iso: bool,
    /// A nonzero class (representative) whose image vanishes.
    pub witness: Option<Form>,
}

#[derive(Clone, Debug)]
pub struct HlcReport {
    pub flavor: Flavor,
    pub steps: Vec<HlcStep>,
    pub overall: bool,
}

impl HlcReport {
    pub fn first_failure(&self) -> Option<&HlcStep> {
        self.steps.iter().find(|s| !s.iso)
    }
}

/// Hard Lefschetz on the total-degree spaces of one flavor. `ω^k` has
/// bidegree `(k,k)`, so the class map splits over bidegrees.
pub fn hlc_check(flavor: Flavor, table: &CohomologyTable, inst: &ComplexInstance) -> HlcReport {
    let n = inst.n();
    let mut steps = Vec::new();
    for k in 0..=n {
        let wk = power(&inst.omega, k);
        let (mut well_defined, mut rank, mut witness) = (true, 0, None);
        for src in Bidegree::of_total(n, n - k) {
            let tgt = Bidegree::new(src.p + k, src.q + k);
            let (s_cell, t_cell) = (&table.cell(flavor, src).quotient, &table.cell(flavor, tgt).quotient);
            let lift = |basis: Vec<Vec<Q>>| -> Vec<Vec<Q>> {
                basis.iter().map(|v| vector(&wedge(&wk, &from_vector(n, v, src).expect("shape")), tgt)).collect()
            };
            let num_image = Subspace::span(component_dim(n, tgt), &lift(s_cell.numerator.basis_vectors()));
            let den_image = Subspace::span(component_dim(n, tgt), &lift(s_cell.denominator.basis_vectors()));
            if !t_cell.numerator.contains_subspace(&num_image) || !t_cell.denominator.contains_subspace(&den_image) {
                well_defined = false;
            }
            let images: Vec<Vec<Q>> = s_cell.representatives.iter().map(|r| vector(&wedge(&wk, r), tgt)).collect();
            let hit =
                Subspace::span(component_dim(n, tgt), &[images.clone(), t_cell.denominator.basis_vectors()].concat());
            rank += hit.dim() - t_cell.denominator.dim();
            if witness.is_none() {
                witness = dying_class(&s_cell.representatives, &images, &t_cell.denominator, n, tgt);
            }
        }
        let (source_dim, target_dim) = (table.total_dim(flavor, n - k), table.total_dim(flavor, n + k));
        let iso = well_defined && rank == source_dim && rank == target_dim;
        steps.push(HlcStep { k, well_defined, rank, source_dim, target_dim, iso, witness });
    }
    let overall = steps.iter().all(|s| s.iso);
    HlcReport { flavor, steps, overall }
}

// Σ c_i r_i with Σ c_i L^k r_i in the denominator, c ≠ 0.
fn dying_class(reps: &[Form], images: &[Vec<Q>], den: &Subspace, n: usize, tgt: Bidegree) -> Option<Form> {
    if reps.is_empty() {
        return None;
    }
    let mut columns = images.to_vec();
    columns.extend(den.basis_vectors());
    let m = ExactMatrix::from_columns(component_dim(n, tgt), &columns);
    kernel(&m).basis_vectors().into_iter().find_map(|c| {
        let coeffs = &c[..reps.len()];
        if coeffs.iter().all(Zero::is_zero) {
            return None;
        }
        Some(reps.iter().zip(coeffs).fold(Form::zero(n), |acc, (r, x)| acc.add(&r.scale(x))))
    })
}

/// The `∂̄∂̄^Λ`-lemma decided three ways.
#[derive(Clone, Debug)]
pub struct LemmaVerdict {
    /// Hard Lefschetz on Dolbeault cohomology.
    pub hlc_route: bool,
    /// `dim H_BC + dim H_A = dim H_∂̄ + dim H_∂̄^Λ` at every bidegree.
    pub dimension_route: bool,
    /// `ker∂̄ ∩ ker∂̄^Λ ∩ (Im∂̄ + Im∂̄^Λ) = Im∂̄∂̄^Λ` at every bidegree.
    pub definition_route: bool,
    pub holds: bool,
    /// `(dim H_BC + dim H_A) - (dim H_∂̄ + dim H_∂̄^Λ)`, never negative.
    pub slack: BTreeMap<Bidegree, usize>,
    pub hlc: HlcReport,
}

impl LemmaVerdict {
    pub fn strict_slack(&self) -> Vec<Bidegree> {
        self.slack.iter().filter(|(_, &s)| s > 0).map(|(&bd, _)| bd).collect()
    }
}

pub fn lemma_verdict(inst: &ComplexInstance, s: &Sl2Data, table: &CohomologyTable) -> Result<LemmaVerdict, Error> {
    let n = inst.n();
    let hlc = hlc_check(Flavor::Dolbeault, table, inst);
    let mut slack = BTreeMap::new();
    for bd in Bidegree::all(n) {
        let upper = table.dim(Flavor::BottChern, bd) + table.dim(Flavor::Aeppli, bd);
        let lower = table.dim(Flavor::Dolbeault, bd) + table.dim(Flavor::DbarLambda, bd);
        if upper < lower {
            return Err(Error::Consistency(format!(
                "dim H_BC + dim H_A = {upper} < {lower} = dim H_dbar + dim H_dbar^Lambda at {bd}"
            )));
        }
        slack.insert(bd, upper - lower);
    }
    let dimension_route = slack.values().all(|&x| x == 0);

    let d = &inst.dbar;
    let dl = &s.dbar_lambda;
    let ddl = d.compose(dl);
    let mut definition_route = true;
    for bd in Bidegree::all(n) {
        let closed = subspace_intersect(&kernel_at(d, bd), &kernel_at(dl, bd))?;
        let exact = subspace_sum(&image_into(d, bd), &image_into(dl, bd))?;
        if subspace_intersect(&closed, &exact)? != image_into(&ddl, bd) {
            definition_route = false;
        }
    }

    if hlc.overall != dimension_route || dimension_route != definition_route {
        return Err(Error::Consistency(format!(
            "lemma routes disagree: hlc {}, dimension {}, definition {}",
            hlc.overall, dimension_route, definition_route
        )));
    }
    Ok(LemmaVerdict { hlc_route: hlc.overall, dimension_route, definition_route, holds: dimension_route, slack, hlc })
}

#[derive(Clone, Debug)]
pub struct MasseyResult {
    pub a: Form,
    pub b: Form,
    pub c: Form,
    pub f: Form,
    pub g: Form,
    pub product: Form,
    pub bidegree: Bidegree,
    /// `dim(Im∂̄ + Z·γ + α·Z)` inside the product bidegree.
    pub indeterminacy_dim: usize,
    pub vanishes: bool,
}

fn homogeneous(u: &Form, what: &str) -> Result<Bidegree, Error> {
    u.bidegree().ok_or_else(|| Error::Precondition(format!("{what} must be a nonzero form of one bidegree")))
}

fn shifted(bd: Bidegree, dp: i32, dq: i32, n: usize) -> Option<Bidegree> {
    bd.shifted((dp, dq), n)
}

/// `⟨[α],[β],[γ]⟩ = [f∧γ + (-1)^{p+q+1} α∧g]` with `∂̄f = α∧β`, `∂̄g = β∧γ`.
pub fn massey_triple(a: &Form, b: &Form, c: &Form, inst: &ComplexInstance) -> Result<MasseyResult, Error> {
    let n = inst.n();
    let d = &inst.dbar;
    for (u, what) in [(a, "a"), (b, "b"), (c, "c")] {
        if !u.is_zero() {
            homogeneous(u, what)?;
        }
        if !d.apply(u).is_zero() {
            return Err(Error::Precondition(format!("{what} = {} is not dbar-closed", inst.format(u))));
        }
    }
    let find_primitive = |u: &Form, what: &str| -> Result<Form, Error> {
        if u.is_zero() {
            return Ok(Form::zero(n));
        }
        let bd = homogeneous(u, what)?;
        primitive(d, u, bd).ok_or_else(|| Error::Precondition(format!("{what} = {} is not dbar-exact", inst.format(u))))
    };
    let ab = wedge(a, b);
    let bc = wedge(b, c);
    let f = find_primitive(&ab, "a.b")?;
    let g = find_primitive(&bc, "b.c")?;
    massey_with_primitives(a, b, c, &f, &g, inst)
}

/// As [`massey_triple`] with given primitives.
pub fn massey_with_primitives(
    a: &Form,
    b: &Form,
    c: &Form,
    f: &Form,
    g: &Form,
    inst: &ComplexInstance,
) -> Result<MasseyResult, Error> {
    let n = inst.n();
    let d = &inst.dbar;
    if d.apply(f) != wedge(a, b) || d.apply(g) != wedge(b, c) {
        return Err(Error::Precondition("primitives do not satisfy dbar f = a.b, dbar g = b.c".into()));
    }
    if a.is_zero() || b.is_zero() || c.is_zero() {
        let product = Form::zero(n);
        return Ok(MasseyResult {
            a: a.clone(),
            b: b.clone(),
            c: c.clone(),
            f: f.clone(),
            g: g.clone(),
            product,
            bidegree: Bidegree::new(0, 0),
            indeterminacy_dim: 0,
            vanishes: true,
        });
    }
    let (pa, pb, pc) = (homogeneous(a, "a")?, homogeneous(b, "b")?, homogeneous(c, "c")?);
    let out_of_range = || Error::Precondition("the triple product has no bidegree in this algebra".into());
    let total = Bidegree::new(pa.p + pb.p + pc.p, pa.q + pb.q + pc.q);
    let bd = shifted(total, 0, -1, n).ok_or_else(out_of_range)?;
    let sign = Q::sign(pa.total() + 1);
    let product = wedge(f, c).add(&wedge(a, g).scale(&sign));
    let dim = component_dim(n, bd);

    let mut gens = image_into(d, bd).basis_vectors();
    // Z^{p+r, q+s-1} ∧ γ and α ∧ Z^{r+u, s+v-1}.
    if let Some(left) = shifted(Bidegree::new(pa.p + pb.p, pa.q + pb.q), 0, -1, n) {
        for z in kernel_at(d, left).basis_vectors() {
            gens.push(vector(&wedge(&from_vector(n, &z, left)?, c), bd));
        }
    }
    if let Some(right) = shifted(Bidegree::new(pb.p + pc.p, pb.q + pc.q), 0, -1, n) {
        for z in kernel_at(d, right).basis_vectors() {
            gens.push(vector(&wedge(a, &from_vector(n, &z, right)?), bd));
        }
    }
    let indeterminacy = Subspace::span(dim, &gens);
    let vanishes = indeterminacy.contains(&vector(&product, bd));
    Ok(MasseyResult {
        a: a.clone(),
        b: b.clone(),
        c: c.clone(),
        f: f.clone(),
        g: g.clone(),
        product,
        bidegree: bd,
        indeterminacy_dim: indeterminacy.dim(),
        vanishes,
    })
}

/// A pair of harmonic basis forms whose wedge is not harmonic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WedgeFailure {
    pub left: Form,
    pub right: Form,
    pub product: Form,
}

#[derive(Clone, Debug)]
pub struct WedgeProbe {
    pub flavor: Flavor,
    pub pairs_checked: usize,
    pub failures: Vec<WedgeFailure>,
}

impl WedgeProbe {
    pub fn closed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Tests every unordered pair of harmonic basis forms.
pub fn wedge_closure_probe(flavor: Flavor, table: &CohomologyTable) -> WedgeProbe {
    let n = table.n;
    let basis: Vec<(Bidegree, Form)> = Bidegree::all(n)
        .flat_map(|bd| table.cell(flavor, bd).harmonic_basis(n, bd).into_iter().map(move |f| (bd, f)))
        .collect();
    let mut pairs_checked = 0;
    let mut failures = Vec::new();
    for (i, (b1, u)) in basis.iter().enumerate() {
        for (b2, v) in &basis[i..] {
            let Some(bd) = b1.shifted((b2.p as i32, b2.q as i32), n) else { continue };
            pairs_checked += 1;
            let w = wedge(u, v);
            if !table.cell(flavor, bd).harmonic.contains(&vector(&w, bd)) {
                failures.push(WedgeFailure { left: u.clone(), right: v.clone(), product: w });
            }
        }
    }
    WedgeProbe { flavor, pairs_checked, failures }
}

/// What [`deformation_scan`] evaluates at each value.
#[derive(Clone, Debug)]
pub enum ScanWhat {
    Lemma,
    Hlc(Flavor),
    /// Class representatives as text; parameter names are substituted.
    Massey {
        a: String,
        b: String,
        c: String,
    },
}

#[derive(Clone, Debug)]
pub enum ScanOutcome {
    Lemma(LemmaVerdict),
    Hlc(HlcReport),
    Massey(MasseyResult),
}

impl ScanOutcome {
    /// The headline boolean: lemma holds, HLC holds, Massey product vanishes.
    pub fn flag(&self) -> bool {
        match self {
            ScanOutcome::Lemma(v) => v.holds,
            ScanOutcome::Hlc(h) => h.overall,
            ScanOutcome::Massey(m) => m.vanishes,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ScanRow {
    pub value: Q,
    pub outcome: Result<ScanOutcome, Error>,
}

/// The whole pipeline on one instance.
pub struct Analysis {
    pub inst: ComplexInstance,
    pub sl2: Sl2Data,
    pub metric: MetricData,
    pub table: CohomologyTable,
}

pub fn analyze(inst: ComplexInstance) -> Result<Analysis, Error> {
    let sl2 = build_sl2(&inst);
    validate_sl2(&sl2, &inst)?;
    let metric = MetricData::from_instance(&inst)?;
    let table = compute_table(&inst, &sl2, &metric)?;
    Ok(Analysis { inst, sl2, metric, table })
}

pub fn evaluate(what: &ScanWhat, a: &Analysis) -> Result<ScanOutcome, Error> {
    Ok(match what {
        ScanWhat::Lemma => ScanOutcome::Lemma(lemma_verdict(&a.inst, &a.sl2, &a.table)?),
        ScanWhat::Hlc(f) => ScanOutcome::Hlc(hlc_check(*f, &a.table, &a.inst)),
        ScanWhat::Massey { a: x, b: y, c: z } => {
            let (x, y, z) = (a.inst.parse_form(x)?, a.inst.parse_form(y)?, a.inst.parse_form(z)?);
            ScanOutcome::Massey(massey_triple(&x, &y, &z, &a.inst)?)
        }
    })
}

/// Evaluates `what` at each value of `param`; failures are kept per row.
/// Internal consistency errors still abort the scan.
pub fn deformation_scan(
    spec: &ManifoldSpec,
    param: &str,
    base: &BTreeMap<String, Q>,
    values: &[Q],
    what: &ScanWhat,
) -> Result<Vec<ScanRow>, Error> {
    let mut rows = Vec::new();
    for v in values {
        let mut assignment = base.clone();
        assignment.insert(param.to_string(), v.clone());
        let outcome = instantiate(spec, &assignment).and_then(analyze).and_then(|a| evaluate(what, &a));
        if let Err(e) = &outcome {
            if e.is_internal() {
                return Err(e.clone());
            }
        }
        rows.push(ScanRow { value: v.clone(), outcome });
    }
    Ok(rows)
}

/// Evaluates `what` on `ω + ε·direction` for each `ε`.
pub fn omega_perturbation_scan(
    spec: &ManifoldSpec,
    params: &BTreeMap<String, Q>,
    direction: &Form,
    epsilons: &[Q],
    what: &ScanWhat,
) -> Result<Vec<ScanRow>, Error> {
    let mut rows = Vec::new();
    for eps in epsilons {
        let outcome = spec
            .with_omega_perturbation(&spec.name, &direction.scale(eps))
            .and_then(|s| instantiate(&s, params))
            .and_then(analyze)
            .and_then(|a| evaluate(what, &a));
        if let Err(e) = &outcome {
            if e.is_internal() {
                return Err(e.clone());
            }
        }
        rows.push(ScanRow { value: eps.clone(), outcome });
    }
    Ok(rows)
}
