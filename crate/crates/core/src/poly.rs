//! Polynomials in named parameters, and forms whose coefficients are such
//! polynomials. They only live between parsing and instantiation: every
//! parameter is substituted by an exact scalar before any linear algebra.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::exterior::{monomial_wedge, Form, MonomialIndex};
use crate::scalar::GaussianRational as Q;
use crate::Error;

/// Exponents of each parameter; absent names have exponent zero.
pub type PowerProduct = BTreeMap<String, u32>;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Poly {
    terms: BTreeMap<PowerProduct, Q>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Q) -> Self {
        let mut p = Self::zero();
        p.add_term(PowerProduct::new(), c);
        p
    }

    pub fn var(name: &str) -> Self {
        let mut p = Self::zero();
        p.add_term(PowerProduct::from([(name.to_string(), 1)]), Q::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value when no parameter occurs.
    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => self.terms.get(&PowerProduct::new()).cloned(),
            _ => None,
        }
    }

    pub fn variables(&self) -> Vec<String> {
        let mut vars: Vec<String> = self.terms.keys().flat_map(|k| k.keys().cloned()).collect();
        vars.sort();
        vars.dedup();
        vars
    }

    fn add_term(&mut self, k: PowerProduct, c: Q) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(k.clone()).or_insert_with(Q::zero);
        *e += &c;
        if e.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Q) -> Poly {
        let mut out = Poly::zero();
        for (k, x) in &self.terms {
            out.add_term(k.clone(), x * c);
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let mut k = ka.clone();
                for (v, e) in kb {
                    *k.entry(v.clone()).or_insert(0) += e;
                }
                out.add_term(k, ca * cb);
            }
        }
        out
    }

    pub fn evaluate(&self, values: &BTreeMap<String, Q>) -> Result<Q, Error> {
        let mut total = Q::zero();
        for (k, c) in &self.terms {
            let mut term = c.clone();
            for (v, &e) in k {
                let x = values.get(v).ok_or_else(|| Error::Spec(format!("parameter `{v}` has no value")))?;
                term = &term * &x.pow(e);
            }
            total += &term;
        }
        Ok(total)
    }

    /// True when the text needs parentheses to multiply a monomial.
    pub(crate) fn needs_parens(&self) -> bool {
        match self.as_constant() {
            Some(c) => !c.is_real(),
            None => true,
        }
    }
}

impl fmt::Display for Poly {
    /// `2*t`, `t*t - 1/2*i`, `(1+i)*s*t`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in &self.terms {
            let vars: Vec<String> = k.iter().flat_map(|(v, &e)| std::iter::repeat_n(v.clone(), e as usize)).collect();
            let mut text = if vars.is_empty() {
                c.to_string()
            } else if c.is_one() {
                vars.join("*")
            } else if (-c).is_one() {
                format!("-{}", vars.join("*"))
            } else if c.is_compound() {
                format!("({c})*{}", vars.join("*"))
            } else {
                format!("{c}*{}", vars.join("*"))
            };
            if !first {
                text = match text.strip_prefix('-') {
                    Some(rest) => format!(" - {rest}"),
                    None => format!(" + {text}"),
                };
            }
            f.write_str(&text)?;
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A form with polynomial coefficients.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymForm {
    n: usize,
    terms: BTreeMap<MonomialIndex, Poly>,
}

impl SymForm {
    pub fn zero(n: usize) -> Self {
        Self { n, terms: BTreeMap::new() }
    }

    pub fn scalar(n: usize, p: Poly) -> Self {
        Self::monomial(n, MonomialIndex::ONE, p)
    }

    pub fn monomial(n: usize, m: MonomialIndex, p: Poly) -> Self {
        let mut f = Self::zero(n);
        f.add_term(m, p);
        f
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<MonomialIndex, Poly> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, m: MonomialIndex, p: Poly) {
        if p.is_zero() {
            return;
        }
        let e = self.terms.entry(m).or_default();
        *e = e.add(&p);
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn add(&self, other: &SymForm) -> SymForm {
        let mut out = self.clone();
        for (&m, p) in &other.terms {
            out.add_term(m, p.clone());
        }
        out
    }

    pub fn neg(&self) -> SymForm {
        self.scale(&-Q::one())
    }

    pub fn scale(&self, c: &Q) -> SymForm {
        let mut out = SymForm::zero(self.n);
        for (&m, p) in &self.terms {
            out.add_term(m, p.scale(c));
        }
        out
    }

    pub fn wedge(&self, other: &SymForm) -> SymForm {
        let mut out = SymForm::zero(self.n);
        for (&ma, pa) in &self.terms {
            for (&mb, pb) in &other.terms {
                if let Some((negative, m)) = monomial_wedge(ma, mb) {
                    let p = pa.mul(pb);
                    out.add_term(m, if negative { p.scale(&-Q::one()) } else { p });
                }
            }
        }
        out
    }

    /// The degree-zero part when nothing else is present.
    pub fn as_scalar(&self) -> Option<Poly> {
        match self.terms.len() {
            0 => Some(Poly::zero()),
            1 => self.terms.get(&MonomialIndex::ONE).cloned(),
            _ => None,
        }
    }

    pub fn variables(&self) -> Vec<String> {
        let mut vars: Vec<String> = self.terms.values().flat_map(Poly::variables).collect();
        vars.sort();
        vars.dedup();
        vars
    }

    pub fn evaluate(&self, values: &BTreeMap<String, Q>) -> Result<Form, Error> {
        let mut f = Form::zero(self.n);
        for (&m, p) in &self.terms {
            f.add_term(m, p.evaluate(values)?);
        }
        Ok(f)
    }

    /// The form itself if no parameter occurs.
    pub fn as_form(&self) -> Option<Form> {
        let mut f = Form::zero(self.n);
        for (&m, p) in &self.terms {
            f.add_term(m, p.as_constant()?);
        }
        Some(f)
    }
}

impl From<&Form> for SymForm {
    fn from(f: &Form) -> Self {
        let mut s = SymForm::zero(f.n());
        for (&m, c) in f.terms() {
            s.add_term(m, Poly::constant(c.clone()));
        }
        s
    }
}

impl fmt::Debug for SymForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (h, a) = crate::syntax::default_names(self.n);
        write!(f, "{}", crate::syntax::format_sym_form(self, &h, &a))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_evaluation() {
        let t = Poly::var("t");
        let p = t.mul(&t).add(&t.scale(&Q::from_integer(2))).add(&Poly::constant(-Q::one()));
        let at = BTreeMap::from([("t".to_string(), Q::ratio(1, 2))]);
        assert_eq!(p.evaluate(&at).unwrap(), Q::ratio(1, 4));
        assert!(p.evaluate(&BTreeMap::new()).is_err());
        assert!(t.add(&t.scale(&-Q::one())).is_zero());
    }

    #[test]
    fn display() {
        let t = Poly::var("t");
        assert_eq!(t.scale(&Q::from_integer(2)).to_string(), "2*t");
        assert_eq!(t.mul(&t).add(&Poly::constant(-Q::i())).to_string(), "-i + t*t");
        assert_eq!(t.scale(&Q::complex(1, 1, 1, 1)).to_string(), "(1+i)*t");
    }
}
