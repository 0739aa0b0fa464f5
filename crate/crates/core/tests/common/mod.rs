//! Random valid specs for property-style checks.
//!
//! Base structure: `∂̄η = 0`, a set of closed holomorphic generators `C`
//! containing the first, and `∂̄ξ^j = β_j ∧ η^j` with `β_j ∈ span{ξ^a : a ∈ C}`
//! for the rest. With `ω = i Σ λ_j ξ^j ∧ η^j` this has `∂̄² = 0` and
//! `∂̄ω = 0` by construction; a random frame change then mixes everything.

#![allow(dead_code)]

use std::collections::BTreeMap;

use cscoh::exterior::wedge;
use cscoh::model::change_frame;
use cscoh::syntax::{default_names, format_form};
use cscoh::{instantiate, parse_spec, ComplexInstance, ExactMatrix, Form, GaussianRational as Q, ManifoldSpec, Side};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn small_rational(rng: &mut ChaCha8Rng) -> Q {
    let num = rng.gen_range(-3i64..=3);
    let den = rng.gen_range(1i64..=3);
    Q::ratio(num, den)
}

fn nonzero_rational(rng: &mut ChaCha8Rng) -> Q {
    loop {
        let q = small_rational(rng);
        if !num_traits::Zero::is_zero(&q) {
            return q;
        }
    }
}

fn small_gaussian(rng: &mut ChaCha8Rng) -> Q {
    let re = small_rational(rng);
    if rng.gen_bool(0.5) {
        re
    } else {
        re + small_rational(rng) * Q::i()
    }
}

pub fn random_base(rng: &mut ChaCha8Rng, n: usize) -> ManifoldSpec {
    let (holo, anti) = default_names(n);
    let closed: Vec<usize> = (0..n).filter(|&j| j == 0 || rng.gen_bool(0.4)).collect();
    let mut doc = format!(
        "[manifold]\nname = random\nn = {n}\ngenerators_10 = {}\ngenerators_01 = {}\n[dbar]\n",
        holo.join(", "),
        anti.join(", ")
    );
    for j in 0..n {
        if closed.contains(&j) {
            continue;
        }
        let beta = closed
            .iter()
            .fold(Form::zero(n), |acc, &a| acc.add(&Form::generator(n, Side::Holo, a).scale(&small_gaussian(rng))));
        let rule = wedge(&beta, &Form::generator(n, Side::Anti, j));
        if !rule.is_zero() {
            doc.push_str(&format!("{} = {}\n", holo[j], format_form(&rule, &holo, &anti)));
        }
    }
    let mut omega = Form::zero(n);
    for j in 0..n {
        let term = wedge(&Form::generator(n, Side::Holo, j), &Form::generator(n, Side::Anti, j));
        omega = omega.add(&term.scale(&(nonzero_rational(rng) * Q::i())));
    }
    doc.push_str(&format!("[omega]\n{}\n", format_form(&omega, &holo, &anti)));
    parse_spec(&doc).expect("generated document parses")
}

pub fn random_frame(rng: &mut ChaCha8Rng, n: usize) -> ExactMatrix {
    loop {
        let m = ExactMatrix::from_rows((0..n).map(|_| (0..n).map(|_| small_gaussian(rng)).collect()).collect());
        if m.inverse().is_some() {
            return m;
        }
    }
}

/// A valid instance on `n` generators, in a random frame.
pub fn random_instance(rng: &mut ChaCha8Rng, n: usize) -> ComplexInstance {
    let base = random_base(rng, n);
    let spec = change_frame(&base, &random_frame(rng, n)).expect("invertible frame");
    instantiate(&spec, &BTreeMap::new()).expect("random spec is valid by construction")
}
