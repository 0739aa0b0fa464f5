//! The bigraded exterior algebra on `n` holomorphic generators `ξ¹…ξⁿ` and
//! `n` antiholomorphic generators `η¹…ηⁿ`.
//!
//! A monomial is a pair of bitmasks. All generators anticommute in one global
//! order: every holomorphic generator precedes every antiholomorphic one, and
//! within each kind indices ascend. Bit `j` of the global mask is `ξ^{j+1}`,
//! bit `16 + k` is `η^{k+1}`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::scalar::GaussianRational as Q;
use crate::Error;

pub const MAX_N: usize = 16;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Bidegree {
    pub p: usize,
    pub q: usize,
}

impl Bidegree {
    pub const fn new(p: usize, q: usize) -> Self {
        Self { p, q }
    }

    pub fn total(self) -> usize {
        self.p + self.q
    }

    pub fn is_valid(self, n: usize) -> bool {
        self.p <= n && self.q <= n
    }

    /// `self + (dp, dq)` if the result stays inside `0..=n` in both slots.
    pub fn shifted(self, (dp, dq): (i32, i32), n: usize) -> Option<Bidegree> {
        let p = self.p as i64 + dp as i64;
        let q = self.q as i64 + dq as i64;
        (0..=n as i64).contains(&p).then_some(())?;
        (0..=n as i64).contains(&q).then_some(())?;
        Some(Bidegree::new(p as usize, q as usize))
    }

    /// All bidegrees for `n`, row by row: `(0,0), (0,1), …, (n,n)`.
    pub fn all(n: usize) -> impl Iterator<Item = Bidegree> {
        (0..=n).flat_map(move |p| (0..=n).map(move |q| Bidegree::new(p, q)))
    }

    /// Bidegrees of total degree `k`, by increasing `p`.
    pub fn of_total(n: usize, k: usize) -> impl Iterator<Item = Bidegree> {
        (0..=n).filter(move |&p| k >= p && k - p <= n).map(move |p| Bidegree::new(p, k - p))
    }
}

impl fmt::Display for Bidegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.p, self.q)
    }
}

/// Which kind of generator.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Side {
    Holo,
    Anti,
}

/// A basis monomial `ξ^J ∧ η^K`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct MonomialIndex {
    pub holo: u16,
    pub anti: u16,
}

impl MonomialIndex {
    pub const ONE: MonomialIndex = MonomialIndex { holo: 0, anti: 0 };

    pub fn new(holo: u16, anti: u16) -> Self {
        Self { holo, anti }
    }

    /// The single generator of the given kind, `j` zero-based.
    pub fn generator(side: Side, j: usize) -> Self {
        match side {
            Side::Holo => Self::new(1 << j, 0),
            Side::Anti => Self::new(0, 1 << j),
        }
    }

    pub fn bidegree(self) -> Bidegree {
        Bidegree::new(self.holo.count_ones() as usize, self.anti.count_ones() as usize)
    }

    pub fn degree(self) -> usize {
        self.bidegree().total()
    }

    fn global(self) -> u32 {
        self.holo as u32 | (self.anti as u32) << 16
    }

    pub fn contains(self, side: Side, j: usize) -> bool {
        match side {
            Side::Holo => self.holo >> j & 1 == 1,
            Side::Anti => self.anti >> j & 1 == 1,
        }
    }

    /// Generators in canonical order.
    pub fn generators(self) -> Vec<(Side, usize)> {
        let holo = (0..MAX_N).filter(|&j| self.holo >> j & 1 == 1).map(|j| (Side::Holo, j));
        let anti = (0..MAX_N).filter(|&j| self.anti >> j & 1 == 1).map(|j| (Side::Anti, j));
        holo.chain(anti).collect()
    }
}

/// Sign and product of two monomials, `None` when they share a generator.
pub fn monomial_wedge(a: MonomialIndex, b: MonomialIndex) -> Option<(bool, MonomialIndex)> {
    let (ga, gb) = (a.global(), b.global());
    if ga & gb != 0 {
        return None;
    }
    // Each generator of b jumps over the generators of a that sit after it.
    let mut swaps = 0;
    let mut rest = gb;
    while rest != 0 {
        let bit = rest.trailing_zeros();
        rest &= rest - 1;
        swaps += (ga >> bit).count_ones();
    }
    let negative = swaps % 2 == 1;
    Some((negative, MonomialIndex::new(a.holo | b.holo, a.anti | b.anti)))
}

/// All monomials of bidegree `bd`, ordered by `(holo mask, anti mask)`.
pub fn enumerate_basis(n: usize, bd: Bidegree) -> Vec<MonomialIndex> {
    assert!(n <= MAX_N, "at most {MAX_N} generators of each kind");
    if !bd.is_valid(n) {
        return Vec::new();
    }
    let masks =
        |k: usize| -> Vec<u16> { (0u32..1 << n).filter(|m| m.count_ones() as usize == k).map(|m| m as u16).collect() };
    let (holo, anti) = (masks(bd.p), masks(bd.q));
    holo.iter().flat_map(|&h| anti.iter().map(move |&a| MonomialIndex::new(h, a))).collect()
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// `dim A^{p,q}`; zero outside the valid range.
pub fn component_dim(n: usize, bd: Bidegree) -> usize {
    binomial(n, bd.p) * binomial(n, bd.q)
}

/// Position of `m` in [`enumerate_basis`] order.
pub fn basis_position(n: usize, m: MonomialIndex) -> usize {
    enumerate_basis(n, m.bidegree()).iter().position(|&x| x == m).expect("monomial outside the algebra")
}

/// A finite combination of monomials. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Form {
    n: usize,
    terms: BTreeMap<MonomialIndex, Q>,
}

impl Form {
    pub fn zero(n: usize) -> Self {
        assert!(n <= MAX_N, "at most {MAX_N} generators of each kind");
        Self { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: Q) -> Self {
        Self::monomial(n, MonomialIndex::ONE, c)
    }

    pub fn monomial(n: usize, m: MonomialIndex, c: Q) -> Self {
        let mut f = Self::zero(n);
        f.add_term(m, c);
        f
    }

    pub fn generator(n: usize, side: Side, j: usize) -> Self {
        assert!(j < n, "generator index out of range");
        Self::monomial(n, MonomialIndex::generator(side, j), Q::from_integer(1))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<MonomialIndex, Q> {
        &self.terms
    }

    pub fn coefficient(&self, m: MonomialIndex) -> Q {
        self.terms.get(&m).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The common bidegree of all terms; `None` when mixed or zero.
    pub fn bidegree(&self) -> Option<Bidegree> {
        let mut it = self.terms.keys().map(|m| m.bidegree());
        let first = it.next()?;
        it.all(|b| b == first).then_some(first)
    }

    pub fn is_homogeneous_of(&self, bd: Bidegree) -> bool {
        self.terms.keys().all(|m| m.bidegree() == bd)
    }

    pub fn add_term(&mut self, m: MonomialIndex, c: Q) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m).or_insert_with(Q::zero);
        *entry += &c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn add(&self, other: &Form) -> Form {
        assert_eq!(self.n, other.n, "forms over different algebras");
        let mut out = self.clone();
        for (&m, c) in &other.terms {
            out.add_term(m, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Form) -> Form {
        self.add(&other.scale(&-Q::from_integer(1)))
    }

    pub fn scale(&self, c: &Q) -> Form {
        let mut out = Form::zero(self.n);
        for (&m, x) in &self.terms {
            out.add_term(m, x * c);
        }
        out
    }

    pub fn wedge(&self, other: &Form) -> Form {
        wedge(self, other)
    }

    /// Component of bidegree `bd`.
    pub fn project(&self, bd: Bidegree) -> Form {
        let terms = self.terms.iter().filter(|(m, _)| m.bidegree() == bd).map(|(&m, c)| (m, c.clone())).collect();
        Form { n: self.n, terms }
    }

    /// The coefficient of `ξ¹…ξⁿη¹…ηⁿ`.
    pub fn top_coefficient(&self) -> Q {
        let full = ((1u32 << self.n) - 1) as u16;
        self.coefficient(MonomialIndex::new(full, full))
    }
}

impl fmt::Debug for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = crate::syntax::default_names(self.n);
        write!(f, "{}", crate::syntax::format_form(self, &names.0, &names.1))
    }
}

pub fn wedge(a: &Form, b: &Form) -> Form {
    assert_eq!(a.n, b.n, "forms over different algebras");
    let mut out = Form::zero(a.n);
    for (&ma, ca) in &a.terms {
        for (&mb, cb) in &b.terms {
            if let Some((negative, m)) = monomial_wedge(ma, mb) {
                let c = ca * cb;
                out.add_term(m, if negative { -c } else { c });
            }
        }
    }
    out
}

/// Interior product with the dual vector of generator `j` (zero-based).
pub fn contract(side: Side, j: usize, u: &Form) -> Form {
    assert!(j < u.n, "generator index out of range");
    let bit = match side {
        Side::Holo => j as u32,
        Side::Anti => 16 + j as u32,
    };
    let mut out = Form::zero(u.n);
    for (&m, c) in &u.terms {
        if !m.contains(side, j) {
            continue;
        }
        let before = (m.global() & ((1u32 << bit) - 1)).count_ones();
        let rest = match side {
            Side::Holo => MonomialIndex::new(m.holo & !(1 << j), m.anti),
            Side::Anti => MonomialIndex::new(m.holo, m.anti & !(1 << j)),
        };
        out.add_term(rest, if before % 2 == 1 { -c.clone() } else { c.clone() });
    }
    out
}

/// Coordinates of `u` in the basis of `bd`.
pub fn to_vector(u: &Form, bd: Bidegree) -> Result<Vec<Q>, Error> {
    if !u.is_homogeneous_of(bd) {
        return Err(Error::Dimension(format!("form is not homogeneous of bidegree {bd}")));
    }
    Ok(enumerate_basis(u.n, bd).into_iter().map(|m| u.coefficient(m)).collect())
}

pub fn from_vector(n: usize, v: &[Q], bd: Bidegree) -> Result<Form, Error> {
    let basis = enumerate_basis(n, bd);
    if basis.len() != v.len() {
        return Err(Error::Dimension(format!(
            "vector of length {} does not fit bidegree {bd} (dimension {})",
            v.len(),
            basis.len()
        )));
    }
    let mut f = Form::zero(n);
    for (m, c) in basis.into_iter().zip(v) {
        f.add_term(m, c.clone());
    }
    Ok(f)
}
