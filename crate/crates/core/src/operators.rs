//! The symplectic operator calculus on a validated instance: `L`, `Λ`, `B`,
//! `∂̄^Λ`, the symplectic star, metric adjoints and the four Laplacians.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::exterior::{component_dim, contract, enumerate_basis, wedge, Bidegree, Form, MonomialIndex, Side};
use crate::family::{OperatorFamily, Witness};
use crate::linalg::ExactMatrix;
use crate::model::{Check, CheckStatus, ComplexInstance};
use crate::scalar::GaussianRational as Q;
use crate::Error;

fn fail(inst: &ComplexInstance, identity: &str, w: Witness) -> Error {
    Error::Validation { identity: identity.into(), witness: w.describe(&inst.spec.holo_names, &inst.spec.anti_names) }
}

fn require_equal(
    inst: &ComplexInstance,
    identity: &str,
    a: &OperatorFamily,
    b: &OperatorFamily,
) -> Result<Check, Error> {
    match a.difference(b) {
        None => Ok(Check { identity: identity.into(), status: CheckStatus::Passed }),
        Some(w) => Err(fail(inst, identity, w)),
    }
}

fn require_zero(inst: &ComplexInstance, identity: &str, a: &OperatorFamily) -> Result<Check, Error> {
    require_equal(inst, identity, a, &OperatorFamily::zero(a.n(), a.shift()))
}

/// `u ↦ ω ∧ u`.
pub fn build_l(inst: &ComplexInstance) -> OperatorFamily {
    OperatorFamily::from_action(inst.n(), (1, 1), |u| wedge(&inst.omega, u))
}

/// `Λ = i Σ_{j,k} (Ω⁻¹)_{kj} ι(ξ_j) ι(η_k)`, contracting the antiholomorphic slot first.
pub fn build_lambda(inst: &ComplexInstance) -> OperatorFamily {
    let n = inst.n();
    let inv = &inst.omega_inverse;
    OperatorFamily::from_action(n, (-1, -1), |u| {
        let mut out = Form::zero(n);
        for j in 0..n {
            for k in 0..n {
                let c = inv.get(k, j);
                if c.is_zero() {
                    continue;
                }
                let term = contract(Side::Holo, j, &contract(Side::Anti, k, u));
                out = out.add(&term.scale(&(c * &Q::i())));
            }
        }
        out
    })
}

/// The `sl2` operators and the symplectic adjoint of `∂̄`.
#[derive(Clone, Debug)]
pub struct Sl2Data {
    pub l: OperatorFamily,
    pub lambda: OperatorFamily,
    /// `[L, Λ]`.
    pub b: OperatorFamily,
    /// `[∂̄, Λ]`, of shift `(-1, 0)`.
    pub dbar_lambda: OperatorFamily,
}

pub fn build_sl2(inst: &ComplexInstance) -> Sl2Data {
    let l = build_l(inst);
    let lambda = build_lambda(inst);
    let b = OperatorFamily::commutator(&l, &lambda);
    let dbar_lambda = OperatorFamily::commutator(&inst.dbar, &lambda);
    Sl2Data { l, lambda, b, dbar_lambda }
}

#[derive(Clone, Debug)]
pub struct Sl2Report {
    pub checks: Vec<Check>,
    /// The scalar by which `B` acts on total degree `k`, for `k = 0..=2n`.
    pub b_scalars: Vec<Q>,
    /// `Λ(ω)`, a constant.
    pub lambda_omega: Q,
}

/// Checks the `sl2` identities blockwise; the first failure aborts.
pub fn validate_sl2(s: &Sl2Data, inst: &ComplexInstance) -> Result<Sl2Report, Error> {
    let n = inst.n();
    let dbar = &inst.dbar;
    let mut checks = Vec::new();
    let llb = OperatorFamily::commutator(&s.b, dbar);
    checks.push(require_equal(inst, "[[L,Lambda],dbar] = dbar", &llb, dbar)?);
    checks.push(require_zero(inst, "(dbar^Lambda)^2 = 0", &s.dbar_lambda.compose(&s.dbar_lambda))?);
    checks.push(require_zero(
        inst,
        "dbar dbar^Lambda + dbar^Lambda dbar = 0",
        &OperatorFamily::anticommutator(dbar, &s.dbar_lambda),
    )?);

    let mut b_scalars: Vec<Option<Q>> = vec![None; 2 * n + 1];
    for bd in Bidegree::all(n) {
        let block = s.b.block(bd);
        let c = block.get(0, 0).clone();
        if *block != ExactMatrix::identity(block.rows()).scale(&c) {
            return Err(Error::Validation {
                identity: "B scalar on each total degree".into(),
                witness: format!("B is not a multiple of the identity on {bd}"),
            });
        }
        match &b_scalars[bd.total()] {
            Some(prev) if *prev != c => {
                return Err(Error::Validation {
                    identity: "B scalar on each total degree".into(),
                    witness: format!("B acts by {prev} and {c} in total degree {}", bd.total()),
                })
            }
            _ => b_scalars[bd.total()] = Some(c),
        }
    }
    let b_scalars: Vec<Q> = b_scalars.into_iter().map(|c| c.expect("every degree has a bidegree")).collect();
    for k in 1..b_scalars.len() {
        if &b_scalars[k] - &b_scalars[k - 1] != Q::one() {
            return Err(Error::Validation {
                identity: "B increases by 1 per degree".into(),
                witness: format!("B = {} on degree {} but {} on degree {k}", b_scalars[k - 1], k - 1, b_scalars[k]),
            });
        }
    }
    checks.push(Check { identity: "B scalar per degree, step 1".into(), status: CheckStatus::Passed });

    let lw = s.lambda.apply(&inst.omega);
    let lambda_omega = lw.coefficient(MonomialIndex::ONE);
    Ok(Sl2Report { checks, b_scalars, lambda_omega })
}

/// `*_s`, mapping `A^{p,q}` to `A^{n-q,n-p}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymplecticStar {
    n: usize,
    blocks: BTreeMap<Bidegree, ExactMatrix>,
}

fn det_minor(m: &ExactMatrix, rows: u16, cols: u16) -> Q {
    let r: Vec<usize> = (0..16).filter(|i| rows >> i & 1 == 1).collect();
    let c: Vec<usize> = (0..16).filter(|i| cols >> i & 1 == 1).collect();
    if r.is_empty() {
        return Q::one();
    }
    ExactMatrix::from_rows(r.iter().map(|&i| c.iter().map(|&j| m.get(i, j).clone()).collect()).collect()).determinant()
}

fn power(f: &Form, k: usize) -> Form {
    (0..k).fold(Form::constant(f.n(), Q::one()), |acc, _| wedge(&acc, f))
}

fn factorial(k: usize) -> Q {
    (1..=k as i64).fold(Q::one(), |acc, j| acc * Q::from_integer(j))
}

impl SymplecticStar {
    pub fn target(n: usize, bd: Bidegree) -> Bidegree {
        Bidegree::new(n - bd.q, n - bd.p)
    }

    pub fn block(&self, bd: Bidegree) -> &ExactMatrix {
        &self.blocks[&bd]
    }

    /// `*_s ∘ f ∘ *_s`; a shift `(a, b)` becomes `(-b, -a)`.
    pub fn conjugate(&self, f: &OperatorFamily) -> OperatorFamily {
        let n = self.n;
        let (a, b) = f.shift();
        OperatorFamily::from_blocks(n, (-b, -a), |bd| {
            let mid = Self::target(n, bd);
            match f.target(mid) {
                Some(t) => self.block(t).mul(f.block(mid)).mul(self.block(bd)),
                None => {
                    let rows = bd.shifted((-b, -a), n).map_or(0, |t| component_dim(n, t));
                    ExactMatrix::zeros(rows, component_dim(n, bd))
                }
            }
        })
    }

    pub fn square(&self) -> OperatorFamily {
        let n = self.n;
        OperatorFamily::from_blocks(n, (0, 0), |bd| self.block(Self::target(n, bd)).mul(self.block(bd)))
    }

    pub fn apply(&self, u: &Form) -> Form {
        let n = self.n;
        let mut out = Form::zero(n);
        for bd in Bidegree::all(n) {
            let part = u.project(bd);
            if part.is_zero() {
                continue;
            }
            let v = self.block(bd).apply(&crate::exterior::to_vector(&part, bd).expect("projected"));
            out = out.add(&crate::exterior::from_vector(n, &v, Self::target(n, bd)).expect("block shape"));
        }
        out
    }

    /// Metric adjoint, returned as an operator of the same shape.
    pub fn adjoint(&self, m: &MetricData) -> SymplecticStar {
        let n = self.n;
        let blocks = Bidegree::all(n)
            .map(|bd| {
                // (*_s)* on bd is the adjoint of *_s on bd' = target(bd), which maps bd' → bd.
                let src = Self::target(n, bd);
                let adj = m.gram_inverse(src).mul(&self.block(src).conj_transpose()).mul(m.gram(bd));
                (bd, adj)
            })
            .collect();
        SymplecticStar { n, blocks }
    }
}

/// Builds `*_s` from `φ ∧ *_s χ = i^{p-q} ω⁻¹(φ, χ̄) ωⁿ/n!` for `φ ∈ A^{p,q}`,
/// `χ ∈ A^{q,p}`, solved through the wedge pairing into `A^{n,n}`.
pub fn build_symplectic_star(inst: &ComplexInstance) -> Result<SymplecticStar, Error> {
    if !inst.has_conjugation() {
        return Err(Error::StarUnavailable(format!("`{}` has no conjugation data", inst.spec.name)));
    }
    let n = inst.n();
    let inv = &inst.omega_inverse;
    let vol = power(&inst.omega, n).top_coefficient() / factorial(n);
    let mut blocks = BTreeMap::new();
    for src in Bidegree::all(n) {
        // χ ∈ A^{src}; φ runs over A^{(src.q, src.p)}; *_s χ ∈ A^{target}.
        let (p, q) = (src.q, src.p);
        let phi_basis = enumerate_basis(n, Bidegree::new(p, q));
        let target = SymplecticStar::target(n, src);
        let target_basis = enumerate_basis(n, target);
        let pairing = ExactMatrix::from_rows(
            phi_basis
                .iter()
                .map(|&phi| {
                    target_basis
                        .iter()
                        .map(|&t| match crate::exterior::monomial_wedge(phi, t) {
                            Some((neg, _)) => Q::sign(neg as usize),
                            None => Q::zero(),
                        })
                        .collect()
                })
                .collect(),
        );
        let pairing_inv = pairing.inverse().ok_or_else(|| Error::Consistency("wedge pairing is degenerate".into()))?;
        let phase = Q::i_pow(p as i64 - q as i64);
        let reorder = Q::sign(p * q);
        let columns: Vec<Vec<Q>> = enumerate_basis(n, src)
            .into_iter()
            .map(|chi| {
                // χ = ξ^S η^R = (-1)^{pq} η^R ξ^S, with |S| = q and |R| = p.
                let rhs: Vec<Q> = phi_basis
                    .iter()
                    .map(|phi| {
                        let pair = det_minor(inv, chi.anti, phi.holo) * det_minor(inv, phi.anti, chi.holo);
                        &phase * &reorder * pair * &vol
                    })
                    .collect();
                pairing_inv.apply(&rhs)
            })
            .collect();
        blocks.insert(src, ExactMatrix::from_columns(target_basis.len(), &columns));
    }
    Ok(SymplecticStar { n, blocks })
}

/// The `*_s` cross-checks: involution, `Λ = *_s L *_s`, the two formulas for
/// `∂̄^Λ`, and reality of `*_s`.
pub fn star_cross_checks(inst: &ComplexInstance, s: &Sl2Data, star: &SymplecticStar) -> Result<Vec<Check>, Error> {
    let n = inst.n();
    let mut checks = vec![require_equal(inst, "*_s^2 = id", &star.square(), &OperatorFamily::identity(n))?];
    checks.push(require_equal(inst, "Lambda = *_s L *_s", &s.lambda, &star.conjugate(&s.l))?);
    let via_star = star.conjugate(&inst.dbar).scale_by_degree(|k| Q::sign(k + 1));
    checks.push(require_equal(inst, "dbar^Lambda = (-1)^(k+1) *_s dbar *_s", &s.dbar_lambda, &via_star)?);
    for bd in Bidegree::all(n) {
        for m in enumerate_basis(n, bd) {
            let u = Form::monomial(n, m, Q::one());
            let lhs = inst.conjugate(&star.apply(&u)).expect("conjugation present");
            let rhs = star.apply(&inst.conjugate(&u).expect("conjugation present"));
            if lhs != rhs {
                return Err(Error::Validation {
                    identity: "*_s real".into(),
                    witness: format!("on {}", inst.format(&u)),
                });
            }
        }
    }
    checks.push(Check { identity: "*_s real".into(), status: CheckStatus::Passed });
    Ok(checks)
}

/// Whether `ω` has all eigenvalues `±1` against the metric.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Admissibility {
    Admissible,
    NotAdmissible,
    /// Some eigenvalue is irrational; admissible-metric checks are skipped.
    Undecided,
}

/// A diagonal Hermitian metric: `|ξ^j|² = |η^j|² = w_j`.
#[derive(Clone, Debug)]
pub struct MetricData {
    pub weights: Vec<BigRational>,
    gram: BTreeMap<Bidegree, ExactMatrix>,
    gram_inv: BTreeMap<Bidegree, ExactMatrix>,
    pub admissibility: Admissibility,
    /// Eigenvalues of `W·Ω` with multiplicity, ascending, when all are rational.
    pub eigenvalues: Option<Vec<BigRational>>,
}

impl MetricData {
    pub fn from_instance(inst: &ComplexInstance) -> Result<Self, Error> {
        Self::with_weights(inst, &inst.spec.metric_weights)
    }

    pub fn with_weights(inst: &ComplexInstance, weights: &[BigRational]) -> Result<Self, Error> {
        let n = inst.n();
        if weights.len() != n || weights.iter().any(|w| !w.is_positive()) {
            return Err(Error::Spec(format!("expected {n} positive weights")));
        }
        let mono_norm = |m: MonomialIndex| -> Q {
            let mut c = BigRational::one();
            for (_, j) in m.generators() {
                c *= &weights[j];
            }
            Q::from(c)
        };
        let mut gram = BTreeMap::new();
        let mut gram_inv = BTreeMap::new();
        for bd in Bidegree::all(n) {
            let diag: Vec<Q> = enumerate_basis(n, bd).into_iter().map(mono_norm).collect();
            let inv: Vec<Q> = diag.iter().map(|d| d.inv().expect("positive")).collect();
            gram.insert(bd, ExactMatrix::diagonal(&diag));
            gram_inv.insert(bd, ExactMatrix::diagonal(&inv));
        }
        let weights_q: Vec<Q> = weights.iter().cloned().map(Q::from).collect();
        let w_omega = ExactMatrix::diagonal(&weights_q).mul(&inst.omega_matrix);
        let eigenvalues = rational_eigenvalues(&w_omega);
        let admissibility = if w_omega.mul(&w_omega) == ExactMatrix::identity(n) {
            Admissibility::Admissible
        } else if eigenvalues.is_some() {
            Admissibility::NotAdmissible
        } else {
            Admissibility::Undecided
        };
        if let (Admissibility::Admissible, Some(ev)) = (&admissibility, &eigenvalues) {
            if ev.iter().any(|l| !(l * l).is_one()) {
                return Err(Error::Consistency("(W Omega)^2 = I but an eigenvalue is not +-1".into()));
            }
        }
        Ok(Self { weights: weights.to_vec(), gram, gram_inv, admissibility, eigenvalues })
    }

    pub fn gram(&self, bd: Bidegree) -> &ExactMatrix {
        &self.gram[&bd]
    }

    pub fn gram_inverse(&self, bd: Bidegree) -> &ExactMatrix {
        &self.gram_inv[&bd]
    }

    pub fn is_admissible(&self) -> bool {
        self.admissibility == Admissibility::Admissible
    }

    /// `⟪u, v⟫ = Σ conj(u_m) v_m |m|²` on homogeneous forms.
    pub fn inner(&self, u: &Form, v: &Form) -> Q {
        let mut total = Q::zero();
        for (&m, c) in u.terms() {
            let d = v.coefficient(m);
            if !d.is_zero() {
                total += &(c.conj() * d * self.gram(m.bidegree()).get(0, 0).clone() * self.ratio(m));
            }
        }
        total
    }

    // |m|² divided by the first diagonal entry of its block.
    fn ratio(&self, m: MonomialIndex) -> Q {
        let bd = m.bidegree();
        let basis = enumerate_basis(self.weights.len(), bd);
        let pos = basis.iter().position(|&x| x == m).expect("monomial in basis");
        self.gram(bd).get(pos, pos) / self.gram(bd).get(0, 0)
    }
}

/// `A* = G_src⁻¹ Aᴴ G_tgt`, blockwise.
pub fn adjoint(op: &OperatorFamily, m: &MetricData) -> OperatorFamily {
    let n = op.n();
    let (a, b) = op.shift();
    OperatorFamily::from_blocks(n, (-a, -b), |bd| match bd.shifted((-a, -b), n) {
        Some(src) => m.gram_inverse(src).mul(&op.block(src).conj_transpose()).mul(m.gram(bd)),
        None => ExactMatrix::zeros(0, component_dim(n, bd)),
    })
}

fn char_poly(m: &ExactMatrix) -> Vec<Q> {
    // Faddeev–LeVerrier: coefficients c_n = 1, c_{n-1}, …, c_0 of det(xI − M).
    let n = m.rows();
    let mut coeffs = vec![Q::zero(); n + 1];
    coeffs[n] = Q::one();
    let mut mk = ExactMatrix::zeros(n, n);
    for k in 1..=n {
        mk = m.mul(&mk.add(&ExactMatrix::identity(n).scale(&coeffs[n - k + 1])));
        let trace: Q = (0..n).map(|i| mk.get(i, i).clone()).sum();
        coeffs[n - k] = -(trace / Q::from_integer(k as i64));
    }
    coeffs
}

fn divisors(v: &BigInt) -> Option<Vec<BigInt>> {
    let v = v.abs().to_u64()?;
    if v > 1 << 40 {
        return None;
    }
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= v {
        if v % d == 0 {
            out.push(BigInt::from(d));
            if d * d != v {
                out.push(BigInt::from(v / d));
            }
        }
        d += 1;
    }
    Some(out)
}

fn eval_poly(coeffs: &[BigRational], x: &BigRational) -> BigRational {
    coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
}

/// Divides out `(x − r)`; `coeffs[k]` multiplies `x^k`.
fn deflate(coeffs: &[BigRational], r: &BigRational) -> Vec<BigRational> {
    let d = coeffs.len() - 1;
    let mut out = vec![BigRational::zero(); d];
    let mut carry = BigRational::zero();
    for k in (0..d).rev() {
        carry = &carry * r + &coeffs[k + 1];
        out[k] = carry.clone();
    }
    out
}

/// All eigenvalues when every root of the characteristic polynomial is rational.
pub fn rational_eigenvalues(m: &ExactMatrix) -> Option<Vec<BigRational>> {
    let cp = char_poly(m);
    if cp.iter().any(|c| !c.is_real()) {
        return None;
    }
    let mut coeffs: Vec<BigRational> = cp.iter().map(|c| c.re().clone()).collect();
    let mut roots = Vec::new();
    while coeffs.len() > 1 {
        if coeffs[0].is_zero() {
            roots.push(BigRational::zero());
            coeffs.remove(0);
            continue;
        }
        let lcm = coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> =
            coeffs.iter().map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer()).collect();
        let nums = divisors(&ints[0])?;
        let dens = divisors(ints.last().expect("nonconstant"))?;
        let root = nums
            .iter()
            .flat_map(|p| dens.iter().map(move |q| BigRational::new(p.clone(), q.clone())))
            .flat_map(|r| [r.clone(), -r])
            .find(|r| eval_poly(&coeffs, r).is_zero())?;
        coeffs = deflate(&coeffs, &root);
        roots.push(root);
    }
    roots.sort();
    Some(roots)
}

/// The four Laplacians, composed exactly as in their definition.
#[derive(Clone, Debug)]
pub struct Laplacians {
    pub dolbeault: OperatorFamily,
    pub dbar_lambda: OperatorFamily,
    pub bott_chern: OperatorFamily,
    pub aeppli: OperatorFamily,
}

/// Adjoints of `∂̄` and `∂̄^Λ` under a metric.
#[derive(Clone, Debug)]
pub struct Adjoints {
    pub dbar: OperatorFamily,
    pub dbar_lambda: OperatorFamily,
}

pub fn build_adjoints(inst: &ComplexInstance, s: &Sl2Data, m: &MetricData) -> Adjoints {
    Adjoints { dbar: adjoint(&inst.dbar, m), dbar_lambda: adjoint(&s.dbar_lambda, m) }
}

fn chain(ops: &[&OperatorFamily]) -> OperatorFamily {
    let (last, rest) = ops.split_last().expect("nonempty");
    rest.iter().rev().fold((*last).clone(), |acc, op| op.compose(&acc))
}

pub fn build_laplacians(inst: &ComplexInstance, s: &Sl2Data, m: &MetricData) -> Laplacians {
    let d = &inst.dbar;
    let dl = &s.dbar_lambda;
    let adj = build_adjoints(inst, s, m);
    let (ds, dls) = (&adj.dbar, &adj.dbar_lambda);
    let sum = |terms: Vec<OperatorFamily>| -> OperatorFamily {
        terms.iter().skip(1).fold(terms[0].clone(), |acc, t| acc.add(t))
    };
    let dolbeault = sum(vec![chain(&[d, ds]), chain(&[ds, d])]);
    let dbar_lambda = sum(vec![chain(&[dl, dls]), chain(&[dls, dl])]);
    let bott_chern = sum(vec![
        chain(&[d, dl, dls, ds]),
        chain(&[dls, ds, d, dl]),
        chain(&[dls, d, ds, dl]),
        chain(&[ds, dl, dls, d]),
        chain(&[dls, dl]),
        chain(&[ds, d]),
    ]);
    let aeppli = sum(vec![
        chain(&[d, ds]),
        chain(&[dl, dls]),
        chain(&[ds, dls, dl, d]),
        chain(&[dl, ds, d, dls]),
        chain(&[dl, d, ds, dls]),
        chain(&[d, dls, dl, ds]),
    ]);
    Laplacians { dolbeault, dbar_lambda, bott_chern, aeppli }
}

/// Identities that hold for an admissible metric: `Λ* = L`,
/// `(∂̄^Λ)* = [L, ∂̄*]`, `[(∂̄^Λ)*, L] = 0`, and with `*_s` available
/// `(*_s)* = *_s` and the star relation between the two Laplacians.
pub fn minkowski_identity_check(
    inst: &ComplexInstance,
    s: &Sl2Data,
    m: &MetricData,
    star: Option<&SymplecticStar>,
) -> Result<Vec<Check>, Error> {
    if !m.is_admissible() {
        return Err(Error::Precondition(format!("metric is not admissible ({:?})", m.admissibility)));
    }
    let adj = build_adjoints(inst, s, m);
    let mut checks = vec![require_equal(inst, "Lambda* = L", &adjoint(&s.lambda, m), &s.l)?];
    checks.push(require_equal(
        inst,
        "(dbar^Lambda)* = [L, dbar*]",
        &adj.dbar_lambda,
        &OperatorFamily::commutator(&s.l, &adj.dbar),
    )?);
    checks.push(require_zero(inst, "[(dbar^Lambda)*, L] = 0", &OperatorFamily::commutator(&adj.dbar_lambda, &s.l))?);
    if let Some(star) = star {
        if star.adjoint(m) != *star {
            return Err(Error::Validation { identity: "(*_s)* = *_s".into(), witness: "blockwise mismatch".into() });
        }
        checks.push(Check { identity: "(*_s)* = *_s".into(), status: CheckStatus::Passed });
        let lap = build_laplacians(inst, s, m);
        checks.push(require_equal(
            inst,
            "box_dbar^Lambda = *_s box_dbar *_s",
            &lap.dbar_lambda,
            &star.conjugate(&lap.dolbeault),
        )?);
    } else {
        checks.push(Check {
            identity: "box_dbar^Lambda = *_s box_dbar *_s".into(),
            status: CheckStatus::NotChecked("star unavailable".into()),
        });
    }
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{instantiate, parse_spec};

    fn instance(doc: &str) -> ComplexInstance {
        instantiate(&parse_spec(doc).unwrap(), &BTreeMap::new()).unwrap()
    }

    fn flat(omega: &str, n: usize) -> String {
        let h: Vec<String> = (1..=n).map(|j| format!("x{j}")).collect();
        let a: Vec<String> = (1..=n).map(|j| format!("y{j}")).collect();
        let conj: Vec<String> = (1..=n).map(|j| format!("y{j} = 1 * x{j}")).collect();
        format!(
            "[manifold]\nname = flat\nn = {n}\ngenerators_10 = {}\ngenerators_01 = {}\n[omega]\n{omega}\n[conjugation]\n{}\n",
            h.join(", "),
            a.join(", "),
            conj.join("\n")
        )
    }

    #[test]
    fn lambda_in_one_dimension() {
        let inst = instance(&flat("3*i*x1^y1", 1));
        let s = build_sl2(&inst);
        let top = inst.parse_form("x1^y1").unwrap();
        // Λ(x∧y) = −i/Ω with Ω = 3.
        assert_eq!(s.lambda.apply(&top), Form::constant(1, Q::complex(0, 1, -1, 3)));
        let report = validate_sl2(&s, &inst).unwrap();
        assert_eq!(report.lambda_omega, Q::one());
        assert_eq!(report.b_scalars, vec![Q::from_integer(-1), Q::zero(), Q::one()]);
    }

    #[test]
    fn star_in_one_dimension() {
        let inst = instance(&flat("2*i*x1^y1", 1));
        let star = build_symplectic_star(&inst).unwrap();
        let f = |s: &str| inst.parse_form(s).unwrap();
        assert_eq!(star.apply(&f("1")), inst.omega);
        assert_eq!(star.apply(&f("x1^y1")), f("(-1/2*i)"));
        assert_eq!(star.apply(&f("x1")), f("-x1"));
        assert_eq!(star.apply(&f("y1")), f("-y1"));
        let s = build_sl2(&inst);
        star_cross_checks(&inst, &s, &star).unwrap();
    }

    #[test]
    fn eigenvalues_and_admissibility() {
        let m = ExactMatrix::from_rows(vec![vec![Q::ratio(1, 2), Q::zero()], vec![Q::zero(), Q::ratio(-1, 3)]]);
        assert_eq!(
            rational_eigenvalues(&m).unwrap(),
            vec![BigRational::new((-1).into(), 3.into()), BigRational::new(1.into(), 2.into())]
        );
        let rot = ExactMatrix::from_rows(vec![vec![Q::zero(), Q::one()], vec![Q::from_integer(2), Q::zero()]]);
        assert!(rational_eigenvalues(&rot).is_none());

        let inst = instance(&flat("1/4*i*x1^y1 - 1/4*i*x2^y2", 2));
        let unit = MetricData::from_instance(&inst).unwrap();
        assert_eq!(unit.admissibility, Admissibility::NotAdmissible);
        let four = BigRational::from_integer(4.into());
        let canonical = MetricData::with_weights(&inst, &[four.clone(), four]).unwrap();
        assert!(canonical.is_admissible());
    }

    #[test]
    fn adjoint_is_an_involution_and_satisfies_the_pairing() {
        let inst = instance(&flat("i*x1^y1 + 2*i*x2^y2", 2));
        let w = [BigRational::from_integer(3.into()), BigRational::new(1.into(), 2.into())];
        let m = MetricData::with_weights(&inst, &w).unwrap();
        let s = build_sl2(&inst);
        let id = OperatorFamily::identity(2);
        assert_eq!(adjoint(&id, &m), id);
        assert_eq!(adjoint(&adjoint(&s.lambda, &m), &m), s.lambda);
        let lam_adj = adjoint(&s.lambda, &m);
        for u in [inst.parse_form("x1^y1 + x2^y1").unwrap(), inst.parse_form("i*x2^y2").unwrap()] {
            for v in [inst.parse_form("1").unwrap(), inst.parse_form("3 - 2*i").unwrap()] {
                assert_eq!(m.inner(&s.lambda.apply(&u), &v), m.inner(&u, &lam_adj.apply(&v)));
            }
        }
    }

    // Embed a form of the 1-dimensional algebra as block `slot` of the 2-dimensional one.
    fn embed(u: &Form, slot: u32) -> Form {
        let mut out = Form::zero(2);
        for (&m, c) in u.terms() {
            out.add_term(MonomialIndex::new(m.holo << slot, m.anti << slot), c.clone());
        }
        out
    }

    #[test]
    fn guillemin_factorization() {
        for (a, b) in [(1, 1), (2, -3), (-1, 5)] {
            let split =
                instance(&flat(&format!("{a}*i*x1^y1 {} {}*i*x2^y2", if b < 0 { "-" } else { "+" }, b.abs()), 2));
            let one = instance(&flat(&format!("{a}*i*x1^y1"), 1));
            let two = instance(&flat(&format!("{b}*i*x1^y1"), 1));
            let (s, s1, s2) = (
                build_symplectic_star(&split).unwrap(),
                build_symplectic_star(&one).unwrap(),
                build_symplectic_star(&two).unwrap(),
            );
            for bd1 in Bidegree::all(1) {
                for bd2 in Bidegree::all(1) {
                    for &m1 in &enumerate_basis(1, bd1) {
                        for &m2 in &enumerate_basis(1, bd2) {
                            let u = Form::monomial(1, m1, Q::one());
                            let v = Form::monomial(1, m2, Q::one());
                            let lhs = s.apply(&wedge(&embed(&u, 0), &embed(&v, 1)));
                            let sign = Q::sign(bd1.total() * bd2.total());
                            let rhs = wedge(&embed(&s1.apply(&u), 0), &embed(&s2.apply(&v), 1)).scale(&sign);
                            assert_eq!(lhs, rhs, "u = {u:?}, v = {v:?}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn zero_dbar_gives_zero_laplacians() {
        let inst = instance(&flat("i*x1^y1 - i*x2^y2", 2));
        let s = build_sl2(&inst);
        assert!(s.dbar_lambda.is_zero());
        let m = MetricData::from_instance(&inst).unwrap();
        let lap = build_laplacians(&inst, &s, &m);
        for op in [&lap.dolbeault, &lap.dbar_lambda, &lap.bott_chern, &lap.aeppli] {
            assert!(op.is_zero());
        }
        assert!(validate_sl2(&s, &inst).is_ok());
        let checks = minkowski_identity_check(&inst, &s, &m, build_symplectic_star(&inst).ok().as_ref()).unwrap();
        assert!(checks.iter().all(|c| c.status == CheckStatus::Passed));
    }
}
