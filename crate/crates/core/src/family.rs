//! Bidegree-indexed families of matrices: the common carrier for every
//! linear operator on the exterior algebra.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::exterior::{component_dim, enumerate_basis, from_vector, to_vector, Bidegree, Form};
use crate::linalg::ExactMatrix;
use crate::scalar::GaussianRational as Q;

/// A basis vector on which two operators (or an operator and zero) differ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub bidegree: Bidegree,
    pub index: usize,
    /// `lhs - rhs` applied to the basis vector.
    pub residue: Form,
}

impl Witness {
    pub fn describe(&self, holo: &[String], anti: &[String]) -> String {
        let m = enumerate_basis(self.residue.n(), self.bidegree)[self.index];
        let input = Form::monomial(self.residue.n(), m, Q::from_integer(1));
        format!(
            "on {} in {}: difference {}",
            crate::syntax::format_form(&input, holo, anti),
            self.bidegree,
            crate::syntax::format_form(&self.residue, holo, anti)
        )
    }
}

/// One matrix per source bidegree, each mapping `A^{p,q}` to
/// `A^{p+Δp,q+Δq}` (a zero-row matrix when the target is out of range).
#[derive(Clone, PartialEq, Eq)]
pub struct OperatorFamily {
    n: usize,
    shift: (i32, i32),
    blocks: BTreeMap<Bidegree, ExactMatrix>,
}

fn target_dim(n: usize, bd: Bidegree, shift: (i32, i32)) -> usize {
    bd.shifted(shift, n).map_or(0, |t| component_dim(n, t))
}

impl OperatorFamily {
    /// Builds every block from `f`, checking block shapes.
    pub fn from_blocks(n: usize, shift: (i32, i32), mut f: impl FnMut(Bidegree) -> ExactMatrix) -> Self {
        let blocks = Bidegree::all(n)
            .map(|bd| {
                let m = f(bd);
                assert_eq!(m.cols(), component_dim(n, bd), "block source dimension at {bd}");
                assert_eq!(m.rows(), target_dim(n, bd, shift), "block target dimension at {bd}");
                (bd, m)
            })
            .collect();
        Self { n, shift, blocks }
    }

    /// The family of a linear map given by its action on basis monomials.
    pub fn from_action(n: usize, shift: (i32, i32), f: impl Fn(&Form) -> Form) -> Self {
        Self::from_blocks(n, shift, |bd| {
            let Some(t) = bd.shifted(shift, n) else {
                return ExactMatrix::zeros(0, component_dim(n, bd));
            };
            let columns: Vec<Vec<Q>> = enumerate_basis(n, bd)
                .into_iter()
                .map(|m| {
                    let image = f(&Form::monomial(n, m, Q::from_integer(1)));
                    to_vector(&image, t).expect("operator image has the declared bidegree")
                })
                .collect();
            ExactMatrix::from_columns(component_dim(n, t), &columns)
        })
    }

    pub fn zero(n: usize, shift: (i32, i32)) -> Self {
        Self::from_blocks(n, shift, |bd| ExactMatrix::zeros(target_dim(n, bd, shift), component_dim(n, bd)))
    }

    pub fn identity(n: usize) -> Self {
        Self::from_blocks(n, (0, 0), |bd| ExactMatrix::identity(component_dim(n, bd)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn shift(&self) -> (i32, i32) {
        self.shift
    }

    pub fn block(&self, bd: Bidegree) -> &ExactMatrix {
        &self.blocks[&bd]
    }

    pub fn blocks(&self) -> &BTreeMap<Bidegree, ExactMatrix> {
        &self.blocks
    }

    pub fn target(&self, bd: Bidegree) -> Option<Bidegree> {
        bd.shifted(self.shift, self.n)
    }

    /// `self ∘ rhs`.
    pub fn compose(&self, rhs: &OperatorFamily) -> OperatorFamily {
        assert_eq!(self.n, rhs.n, "operators over different algebras");
        let n = self.n;
        let shift = (self.shift.0 + rhs.shift.0, self.shift.1 + rhs.shift.1);
        Self::from_blocks(n, shift, |bd| match rhs.target(bd) {
            Some(mid) => self.block(mid).mul(rhs.block(bd)),
            None => ExactMatrix::zeros(target_dim(n, bd, shift), component_dim(n, bd)),
        })
    }

    fn zip(&self, other: &OperatorFamily, f: impl Fn(&ExactMatrix, &ExactMatrix) -> ExactMatrix) -> OperatorFamily {
        assert_eq!(self.n, other.n, "operators over different algebras");
        assert_eq!(self.shift, other.shift, "cannot combine operators of different shifts");
        Self::from_blocks(self.n, self.shift, |bd| f(self.block(bd), other.block(bd)))
    }

    pub fn add(&self, other: &OperatorFamily) -> OperatorFamily {
        self.zip(other, ExactMatrix::add)
    }

    pub fn sub(&self, other: &OperatorFamily) -> OperatorFamily {
        self.zip(other, ExactMatrix::sub)
    }

    pub fn scale(&self, c: &Q) -> OperatorFamily {
        Self::from_blocks(self.n, self.shift, |bd| self.block(bd).scale(c))
    }

    /// Multiplies the block on total degree `k` by `f(k)`.
    pub fn scale_by_degree(&self, f: impl Fn(usize) -> Q) -> OperatorFamily {
        Self::from_blocks(self.n, self.shift, |bd| self.block(bd).scale(&f(bd.total())))
    }

    /// `a∘b − b∘a`.
    pub fn commutator(a: &OperatorFamily, b: &OperatorFamily) -> OperatorFamily {
        a.compose(b).sub(&b.compose(a))
    }

    /// `a∘b + b∘a`.
    pub fn anticommutator(a: &OperatorFamily, b: &OperatorFamily) -> OperatorFamily {
        a.compose(b).add(&b.compose(a))
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.values().all(ExactMatrix::is_zero)
    }

    /// First basis vector (in bidegree then basis order) not sent to zero.
    pub fn nonzero_witness(&self) -> Option<Witness> {
        for (&bd, m) in &self.blocks {
            for c in 0..m.cols() {
                let col = m.column(c);
                if col.iter().any(|x| !x.is_zero()) {
                    let t = self.target(bd).expect("nonzero entries imply a target");
                    let residue = from_vector(self.n, &col, t).expect("block shape");
                    return Some(Witness { bidegree: bd, index: c, residue });
                }
            }
        }
        None
    }

    /// `None` when equal, otherwise the first basis vector where they differ.
    pub fn difference(&self, other: &OperatorFamily) -> Option<Witness> {
        self.sub(other).nonzero_witness()
    }

    /// Applies the family to any form, bidegree by bidegree.
    pub fn apply(&self, u: &Form) -> Form {
        let mut out = Form::zero(self.n);
        for bd in Bidegree::all(self.n) {
            let part = u.project(bd);
            if part.is_zero() {
                continue;
            }
            let Some(t) = self.target(bd) else { continue };
            let v = self.block(bd).apply(&to_vector(&part, bd).expect("projected"));
            out = out.add(&from_vector(self.n, &v, t).expect("block shape"));
        }
        out
    }
}

impl fmt::Debug for OperatorFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "OperatorFamily(n = {}, shift = {:?})", self.n, self.shift)?;
        for (bd, m) in &self.blocks {
            if m.rows() > 0 && m.cols() > 0 {
                writeln!(f, "{bd}: {m:?}")?;
            }
        }
        Ok(())
    }
}
