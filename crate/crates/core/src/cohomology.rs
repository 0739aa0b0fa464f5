//! The four cohomologies as quotients, their harmonic spaces as Laplacian
//! kernels, and the total cohomology of `D = ∂̄ + ∂̄^Λ`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::exterior::{component_dim, from_vector, Bidegree, Form};
use crate::family::OperatorFamily;
use crate::linalg::{self, kernel, quotient_basis, subspace_intersect, subspace_sum, ExactMatrix, Subspace};
use crate::model::ComplexInstance;
use crate::operators::{adjoint, build_adjoints, build_laplacians, MetricData, Sl2Data};
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Flavor {
    Dolbeault,
    DbarLambda,
    BottChern,
    Aeppli,
}

impl Flavor {
    pub const ALL: [Flavor; 4] = [Flavor::Dolbeault, Flavor::DbarLambda, Flavor::BottChern, Flavor::Aeppli];

    pub fn name(self) -> &'static str {
        match self {
            Flavor::Dolbeault => "dolbeault",
            Flavor::DbarLambda => "dbar-lambda",
            Flavor::BottChern => "bc",
            Flavor::Aeppli => "aeppli",
        }
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Flavor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Flavor::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Spec(format!("unknown flavor `{s}` (expected dolbeault, dbar-lambda, bc or aeppli)")))
    }
}

/// Numerator, denominator and quotient representatives at one bidegree.
#[derive(Clone, Debug)]
pub struct QuotientCell {
    pub numerator: Subspace,
    pub denominator: Subspace,
    pub dim: usize,
    pub representatives: Vec<Form>,
}

/// Image of `op` inside the component `bd`.
pub fn image_into(op: &OperatorFamily, bd: Bidegree) -> Subspace {
    let n = op.n();
    let (a, b) = op.shift();
    match bd.shifted((-a, -b), n) {
        Some(src) => linalg::image(op.block(src)),
        None => Subspace::zero(component_dim(n, bd)),
    }
}

pub fn kernel_at(op: &OperatorFamily, bd: Bidegree) -> Subspace {
    kernel(op.block(bd))
}

fn forms(n: usize, bd: Bidegree, vectors: &[Vec<crate::scalar::GaussianRational>]) -> Vec<Form> {
    vectors.iter().map(|v| from_vector(n, v, bd).expect("component vector")).collect()
}

fn quotient(n: usize, bd: Bidegree, numerator: Subspace, denominator: Subspace) -> Result<QuotientCell, Error> {
    if !numerator.contains_subspace(&denominator) {
        return Err(Error::Consistency(format!("denominator not inside numerator at {bd}")));
    }
    let reps = quotient_basis(&numerator, &denominator)?;
    Ok(QuotientCell { dim: reps.len(), representatives: forms(n, bd, &reps), numerator, denominator })
}

/// `ker/im` of the given flavor, at every bidegree.
pub fn quotient_cells(
    flavor: Flavor,
    inst: &ComplexInstance,
    s: &Sl2Data,
) -> Result<BTreeMap<Bidegree, QuotientCell>, Error> {
    let n = inst.n();
    let d = &inst.dbar;
    let dl = &s.dbar_lambda;
    let ddl = d.compose(dl);
    Bidegree::all(n)
        .map(|bd| {
            let (num, den) = match flavor {
                Flavor::Dolbeault => (kernel_at(d, bd), image_into(d, bd)),
                Flavor::DbarLambda => (kernel_at(dl, bd), image_into(dl, bd)),
                Flavor::BottChern => (subspace_intersect(&kernel_at(d, bd), &kernel_at(dl, bd))?, image_into(&ddl, bd)),
                Flavor::Aeppli => (kernel_at(&ddl, bd), subspace_sum(&image_into(d, bd), &image_into(dl, bd))?),
            };
            Ok((bd, quotient(n, bd, num, den)?))
        })
        .collect()
}

pub fn dolbeault(inst: &ComplexInstance, s: &Sl2Data) -> Result<BTreeMap<Bidegree, QuotientCell>, Error> {
    quotient_cells(Flavor::Dolbeault, inst, s)
}

pub fn dbar_lambda_cohomology(inst: &ComplexInstance, s: &Sl2Data) -> Result<BTreeMap<Bidegree, QuotientCell>, Error> {
    quotient_cells(Flavor::DbarLambda, inst, s)
}

pub fn bott_chern(inst: &ComplexInstance, s: &Sl2Data) -> Result<BTreeMap<Bidegree, QuotientCell>, Error> {
    quotient_cells(Flavor::BottChern, inst, s)
}

pub fn aeppli(inst: &ComplexInstance, s: &Sl2Data) -> Result<BTreeMap<Bidegree, QuotientCell>, Error> {
    quotient_cells(Flavor::Aeppli, inst, s)
}

/// Harmonic spaces of every flavor, computed both as Laplacian kernels and
/// as intersections of first-order kernels; the two must agree.
pub fn harmonic_spaces(
    inst: &ComplexInstance,
    s: &Sl2Data,
    m: &MetricData,
) -> Result<BTreeMap<Flavor, BTreeMap<Bidegree, Subspace>>, Error> {
    let n = inst.n();
    let lap = build_laplacians(inst, s, m);
    let adj = build_adjoints(inst, s, m);
    let d = &inst.dbar;
    let dl = &s.dbar_lambda;
    let ddl = d.compose(dl);
    let ddl_adj = adjoint(&ddl, m);
    let meet = |ops: &[&OperatorFamily], bd: Bidegree| -> Result<Subspace, Error> {
        ops.iter()
            .try_fold(Subspace::full(component_dim(n, bd)), |acc, op| subspace_intersect(&acc, &kernel_at(op, bd)))
    };
    let mut out = BTreeMap::new();
    for flavor in Flavor::ALL {
        let (laplacian, first_order): (&OperatorFamily, Vec<&OperatorFamily>) = match flavor {
            Flavor::Dolbeault => (&lap.dolbeault, vec![d, &adj.dbar]),
            Flavor::DbarLambda => (&lap.dbar_lambda, vec![dl, &adj.dbar_lambda]),
            Flavor::BottChern => (&lap.bott_chern, vec![d, dl, &ddl_adj]),
            Flavor::Aeppli => (&lap.aeppli, vec![&ddl, &adj.dbar, &adj.dbar_lambda]),
        };
        let mut spaces = BTreeMap::new();
        for bd in Bidegree::all(n) {
            let by_laplacian = kernel_at(laplacian, bd);
            let by_kernels = meet(&first_order, bd)?;
            if by_laplacian != by_kernels {
                return Err(Error::Consistency(format!(
                    "{flavor} harmonic space at {bd}: Laplacian kernel has dim {}, kernel characterization dim {}",
                    by_laplacian.dim(),
                    by_kernels.dim()
                )));
            }
            spaces.insert(bd, by_laplacian);
        }
        out.insert(flavor, spaces);
    }
    Ok(out)
}

/// One flavor at one bidegree.
#[derive(Clone, Debug)]
pub struct Cell {
    pub quotient: QuotientCell,
    pub harmonic: Subspace,
}

impl Cell {
    pub fn dim(&self) -> usize {
        self.quotient.dim
    }

    pub fn harmonic_basis(&self, n: usize, bd: Bidegree) -> Vec<Form> {
        forms(n, bd, &self.harmonic.basis_vectors())
    }
}

#[derive(Clone, Debug)]
pub struct CohomologyTable {
    pub name: String,
    pub n: usize,
    pub cells: BTreeMap<Flavor, BTreeMap<Bidegree, Cell>>,
    /// `(k, dim H_D^k)` for `k = -n..=n`.
    pub d_dims: Vec<(i32, usize)>,
}

impl CohomologyTable {
    pub fn cell(&self, flavor: Flavor, bd: Bidegree) -> &Cell {
        &self.cells[&flavor][&bd]
    }

    pub fn dim(&self, flavor: Flavor, bd: Bidegree) -> usize {
        self.cell(flavor, bd).dim()
    }

    /// `dim ⊕_{p+q=k} H^{p,q}`.
    pub fn total_dim(&self, flavor: Flavor, k: usize) -> usize {
        Bidegree::of_total(self.n, k).map(|bd| self.dim(flavor, bd)).sum()
    }

    /// True when both tables have the same dimensions and `H_D` dimensions.
    pub fn same_dimensions(&self, other: &CohomologyTable) -> bool {
        self.n == other.n
            && self.d_dims == other.d_dims
            && Flavor::ALL.iter().all(|&f| Bidegree::all(self.n).all(|bd| self.dim(f, bd) == other.dim(f, bd)))
    }
}

/// Cohomology of `D = ∂̄ + ∂̄^Λ` on `T^k = ⊕_{q-p=k} A^{p,q}`.
pub fn d_cohomology(inst: &ComplexInstance, s: &Sl2Data) -> Vec<(i32, usize)> {
    let n = inst.n();
    let d = [&inst.dbar, &s.dbar_lambda];
    let strand = |k: i32| -> Vec<Bidegree> { Bidegree::all(n).filter(|bd| bd.q as i32 - bd.p as i32 == k).collect() };
    // D as one matrix T^k → T^{k+1}.
    let d_matrix = |k: i32| -> ExactMatrix {
        let (src, tgt) = (strand(k), strand(k + 1));
        let rows: usize = tgt.iter().map(|&bd| component_dim(n, bd)).sum();
        let cols: usize = src.iter().map(|&bd| component_dim(n, bd)).sum();
        let mut out = ExactMatrix::zeros(rows, cols);
        let mut col0 = 0;
        for &a in &src {
            for (op, &b) in d.iter().flat_map(|op| tgt.iter().map(move |b| (op, b))) {
                if op.target(a) != Some(b) {
                    continue;
                }
                let row0: usize = tgt.iter().take_while(|&&x| x != b).map(|&x| component_dim(n, x)).sum();
                let block = op.block(a);
                for r in 0..block.rows() {
                    for c in 0..block.cols() {
                        let v = out.get(row0 + r, col0 + c) + block.get(r, c);
                        out.set(row0 + r, col0 + c, v);
                    }
                }
            }
            col0 += component_dim(n, a);
        }
        out
    };
    let n = n as i32;
    (-n..=n)
        .map(|k| {
            let z = kernel(&d_matrix(k));
            let b = linalg::image(&d_matrix(k - 1));
            (k, z.dim() - b.dim())
        })
        .collect()
}

/// Everything: quotients, harmonic spaces and `H_D`, with the finite
/// Hodge-theoretic identities checked on the way.
pub fn compute_table(inst: &ComplexInstance, s: &Sl2Data, m: &MetricData) -> Result<CohomologyTable, Error> {
    let n = inst.n();
    let mut harmonic = harmonic_spaces(inst, s, m)?;
    let mut cells = BTreeMap::new();
    for flavor in Flavor::ALL {
        let mut spaces = harmonic.remove(&flavor).expect("every flavor");
        let mut row = BTreeMap::new();
        for (bd, q) in quotient_cells(flavor, inst, s)? {
            let h = spaces.remove(&bd).expect("every bidegree");
            if h.dim() != q.dim {
                return Err(Error::Consistency(format!(
                    "{flavor} at {bd}: quotient dim {} but harmonic dim {}",
                    q.dim,
                    h.dim()
                )));
            }
            if !q.numerator.contains_subspace(&h) || subspace_intersect(&h, &q.denominator)?.dim() != 0 {
                return Err(Error::Consistency(format!(
                    "{flavor} at {bd}: harmonic space is not a complement of the boundaries"
                )));
            }
            row.insert(bd, Cell { quotient: q, harmonic: h });
        }
        cells.insert(flavor, row);
    }
    let d_dims = d_cohomology(inst, s);
    let table = CohomologyTable { name: inst.spec.name.clone(), n, cells, d_dims };
    for &(k, dim) in &table.d_dims {
        let expected: usize = Bidegree::all(n)
            .filter(|bd| bd.q as i32 - bd.p as i32 == k)
            .map(|bd| table.dim(Flavor::Dolbeault, bd))
            .sum();
        if dim != expected {
            return Err(Error::Consistency(format!("dim H_D^{k} = {dim} but the Dolbeault strand sums to {expected}")));
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::exterior::binomial;
    use crate::operators::build_sl2;

    fn setup(name: &str) -> (ComplexInstance, Sl2Data, MetricData) {
        let inst = catalog::get(name, &BTreeMap::new()).unwrap();
        let s = build_sl2(&inst);
        let m = MetricData::from_instance(&inst).unwrap();
        (inst, s, m)
    }

    fn span(inst: &ComplexInstance, bd: Bidegree, forms: &[&str]) -> Subspace {
        let vs: Vec<_> =
            forms.iter().map(|f| crate::exterior::to_vector(&inst.parse_form(f).unwrap(), bd).unwrap()).collect();
        Subspace::span(component_dim(inst.n(), bd), &vs)
    }

    #[test]
    fn kodaira_thurston_tables() {
        let (inst, s, m) = setup("kodaira-thurston");
        let t = compute_table(&inst, &s, &m).unwrap();
        let order = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (2, 1), (1, 2), (2, 2)];
        let bc: Vec<usize> = order.iter().map(|&(p, q)| t.dim(Flavor::BottChern, Bidegree::new(p, q))).collect();
        assert_eq!(bc, vec![1, 1, 2, 1, 3, 1, 1, 2, 1]);
        let b11 = Bidegree::new(1, 1);
        assert_eq!(
            t.cell(Flavor::BottChern, b11).harmonic,
            span(&inst, b11, &["phib1^phi2", "phi1^phib2", "phi1^phib1"])
        );
        let b12 = Bidegree::new(1, 2);
        assert_eq!(
            t.cell(Flavor::BottChern, b12).harmonic,
            span(&inst, b12, &["phi2^phib1^phib2", "phi1^phib1^phib2"])
        );
        let b10 = Bidegree::new(1, 0);
        assert_eq!(t.dim(Flavor::Dolbeault, b10), 1);
        assert_eq!(t.cell(Flavor::Dolbeault, b10).harmonic, span(&inst, b10, &["phi1"]));
        assert_eq!(t.dim(Flavor::Dolbeault, b11), 2);
        assert_eq!(t.cell(Flavor::DbarLambda, b10).harmonic, span(&inst, b10, &["phi1", "phi2"]));
        for bd in Bidegree::all(2) {
            let mirror = Bidegree::new(2 - bd.q, 2 - bd.p);
            assert_eq!(t.dim(Flavor::DbarLambda, mirror), t.dim(Flavor::Dolbeault, bd));
        }
    }

    #[test]
    fn iwasawa_class() {
        let (inst, s, m) = setup("iwasawa");
        let t = compute_table(&inst, &s, &m).unwrap();
        let b01 = Bidegree::new(0, 1);
        let cell = t.cell(Flavor::Dolbeault, b01);
        let psib1 = crate::exterior::to_vector(&inst.parse_form("psib1").unwrap(), b01).unwrap();
        assert!(cell.harmonic.contains(&psib1));
        assert!(!cell.quotient.denominator.contains(&psib1));
        for bd in Bidegree::all(3) {
            let mirror = Bidegree::new(3 - bd.q, 3 - bd.p);
            assert_eq!(t.dim(Flavor::DbarLambda, mirror), t.dim(Flavor::Dolbeault, bd));
        }
    }

    #[test]
    fn vanishing_dbar_gives_full_spaces() {
        let (inst, s, m) = setup("nakamura");
        let t = compute_table(&inst, &s, &m).unwrap();
        for f in Flavor::ALL {
            for bd in Bidegree::all(3) {
                assert_eq!(t.dim(f, bd), binomial(3, bd.p) * binomial(3, bd.q));
            }
        }
        let d: Vec<usize> = t.d_dims.iter().map(|&(_, d)| d).collect();
        assert_eq!(d, vec![1, 6, 15, 20, 15, 6, 1]);
    }

    #[test]
    fn flavor_names_round_trip() {
        for f in Flavor::ALL {
            assert_eq!(f.name().parse::<Flavor>().unwrap(), f);
        }
        assert!("de-rham".parse::<Flavor>().is_err());
    }
}
