//! Equational normalization into dagger-canonical form.
//!
//! Sums are distributed to the top, daggers are pushed onto ladder atoms,
//! identity factors are removed from compositions and every sum-free term is
//! brought to a site-wise form: one composition word per site, tensored in
//! site order. Factoring a composition of tensors site by site is exact on
//! boson spans; on spans with fermions it picks up the exchange sign
//! `(-1)^{p(r_s)·p(l_t)}` for every site pair `s < t`, where `p` counts the
//! fermionic ladders of a factor. Pushing a dagger through a tensor
//! likewise contributes `(-1)^{p1·p2}`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use thiserror::Error;

use crate::ir::{Expr, IrError, SiteType};
use crate::scalar::{c_literal, c_negligible, conj, re, Scalar, C};

/// Amplitudes this small are dropped when equal bodies are merged.
pub const MERGE_TOL: f64 = 1e-14;

/// Amplitude tolerance for matching terms in [`eq_modulo`].
pub const MATCH_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RewriteError {
    #[error(transparent)]
    Shape(#[from] IrError),
}

/// Ladder atom of a site word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Ladder {
    Lower,
    Raise,
}

/// Sum-free term body: `words[k]` is the composition word on site
/// `start + k`, applied right to left. An empty word is the identity.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Body {
    pub start: usize,
    pub words: Vec<Vec<Ladder>>,
}

impl Body {
    fn atom(site: usize, word: Vec<Ladder>) -> Body {
        Body { start: site, words: vec![word] }
    }

    /// Number of fermionic ladder atoms.
    pub fn parity(&self, shape: &[SiteType]) -> usize {
        self.words
            .iter()
            .enumerate()
            .filter(|(k, _)| shape[self.start + k].is_fermion())
            .map(|(_, w)| w.len())
            .sum()
    }

    /// Ordering key: the touched sites, then their words.
    pub fn key(&self) -> (Vec<usize>, Vec<Vec<Ladder>>) {
        let touched: Vec<(usize, &Vec<Ladder>)> =
            self.words.iter().enumerate().filter(|(_, w)| !w.is_empty()).map(|(k, w)| (self.start + k, w)).collect();
        (touched.iter().map(|(s, _)| *s).collect(), touched.into_iter().map(|(_, w)| w.clone()).collect())
    }

    pub fn is_identity(&self) -> bool {
        self.words.iter().all(|w| w.is_empty())
    }

    /// The body as an expression: a tensor chain of per-site compositions
    /// with unit amplitudes.
    pub fn to_expr<T: Scalar>(&self) -> Expr<T> {
        let site_expr = |k: usize, w: &Vec<Ladder>| {
            let site = self.start + k;
            Expr::compose_all(w.iter().map(|l| match l {
                Ladder::Lower => Expr::a(site),
                Ladder::Raise => Expr::adag(site),
            }))
            .unwrap_or(Expr::id(site))
        };
        Expr::tensor_all(self.words.iter().enumerate().map(|(k, w)| site_expr(k, w))).expect("body spans a site")
    }
}

impl fmt::Display for Body {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "I");
        }
        let mut first = true;
        for (k, w) in self.words.iter().enumerate() {
            if w.is_empty() {
                continue;
            }
            if !first {
                write!(f, " (x) ")?;
            }
            first = false;
            let parts: Vec<String> = w
                .iter()
                .map(|l| match l {
                    Ladder::Lower => format!("a({})", self.start + k),
                    Ladder::Raise => format!("adag({})", self.start + k),
                })
                .collect();
            write!(f, "{}", parts.join("."))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CanonTerm<T = f64> {
    pub amp: C<T>,
    pub body: Body,
}

/// Linear combination of distinct bodies, sorted by [`Body::key`].
#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalExpr<T = f64> {
    pub n_sites: usize,
    pub terms: Vec<CanonTerm<T>>,
}

impl<T: Scalar> CanonicalExpr<T> {
    /// The canonical form as a plain expression (sum of scaled bodies).
    /// Identity bodies on sites of dimension above two cannot carry an
    /// amplitude, so this returns `None` for them.
    pub fn to_expr(&self, shape: &[SiteType]) -> Option<Expr<T>> {
        let items: Option<Vec<Expr<T>>> = self
            .terms
            .iter()
            .map(|t| crate::parser::scale(t.body.to_expr(), &t.amp, shape).ok())
            .collect();
        Expr::sum_all(items?)
    }
}

impl<T: Scalar> fmt::Display for CanonicalExpr<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, t) in self.terms.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            write!(f, "{} * {}", c_literal(&t.amp), t.body)?;
        }
        Ok(())
    }
}

fn sign<T: Scalar>(odd: bool) -> C<T> {
    if odd {
        re(-T::one())
    } else {
        re(T::one())
    }
}

/// `l ∘ r` for bodies over the same span, with the fermionic exchange sign.
fn compose_bodies(l: &Body, r: &Body, shape: &[SiteType]) -> (bool, Body) {
    let fermion_len = |b: &Body, k: usize| if shape[b.start + k].is_fermion() { b.words[k].len() } else { 0 };
    let mut odd = 0usize;
    let mut later_l = 0usize;
    for k in (0..l.words.len()).rev() {
        odd += fermion_len(r, k) * later_l;
        later_l += fermion_len(l, k);
    }
    let words = l.words.iter().zip(&r.words).map(|(a, b)| a.iter().chain(b).copied().collect()).collect();
    (odd % 2 == 1, Body { start: l.start, words })
}

fn tensor_bodies(l: &Body, r: &Body) -> Body {
    Body { start: l.start, words: l.words.iter().chain(&r.words).cloned().collect() }
}

fn canon_rec<T: Scalar>(e: &Expr<T>, dag: bool, shape: &[SiteType]) -> Vec<(C<T>, Body)> {
    match e {
        Expr::Annihilate { amp, site } => {
            if dag {
                vec![(conj(amp), Body::atom(*site, vec![Ladder::Raise]))]
            } else {
                vec![(amp.clone(), Body::atom(*site, vec![Ladder::Lower]))]
            }
        }
        Expr::Identity { site } => vec![(re(T::one()), Body::atom(*site, Vec::new()))],
        Expr::Dagger(inner) => canon_rec(inner, !dag, shape),
        Expr::Sum(l, r) => {
            let mut out = canon_rec(l, dag, shape);
            out.extend(canon_rec(r, dag, shape));
            out
        }
        Expr::Compose(l, r) => {
            // †(l∘r) = †r ∘ †l
            let (first, second) = if dag { (r, l) } else { (l, r) };
            let lt = canon_rec(first, dag, shape);
            let rt = canon_rec(second, dag, shape);
            let mut out = Vec::with_capacity(lt.len() * rt.len());
            for (za, ba) in &lt {
                for (zb, bb) in &rt {
                    let (odd, body) = compose_bodies(ba, bb, shape);
                    out.push((za.clone() * zb.clone() * sign::<T>(odd), body));
                }
            }
            out
        }
        Expr::Tensor(l, r) => {
            let lt = canon_rec(l, dag, shape);
            let rt = canon_rec(r, dag, shape);
            let mut out = Vec::with_capacity(lt.len() * rt.len());
            for (za, ba) in &lt {
                for (zb, bb) in &rt {
                    let odd = dag && ba.parity(shape) % 2 == 1 && bb.parity(shape) % 2 == 1;
                    out.push((za.clone() * zb.clone() * sign::<T>(odd), tensor_bodies(ba, bb)));
                }
            }
            out
        }
    }
}

/// Sort key of a term: its sites and words, then the body itself.
type MergeKey = (Vec<usize>, Vec<Vec<Ladder>>, Body);

fn merge<T: Scalar>(n_sites: usize, raw: Vec<(C<T>, Body)>) -> CanonicalExpr<T> {
    let mut map: BTreeMap<MergeKey, C<T>> = BTreeMap::new();
    for (z, b) in raw {
        let (sites, words) = b.key();
        let slot = map.entry((sites, words, b)).or_insert_with(C::zero);
        *slot = slot.clone() + z;
    }
    let terms = map
        .into_iter()
        .filter(|(_, z)| !c_negligible(z, MERGE_TOL))
        .map(|((_, _, body), amp)| CanonTerm { amp, body })
        .collect();
    CanonicalExpr { n_sites, terms }
}

/// Dagger-canonical form of `e` over `shape`.
pub fn dag_canonicalize<T: Scalar>(e: &Expr<T>, shape: &[SiteType]) -> Result<CanonicalExpr<T>, RewriteError> {
    e.span(shape.len())?;
    Ok(merge(shape.len(), canon_rec(e, false, shape)))
}

/// Canonical form of `†e`, computed without building the dagger node.
pub fn dag_canonicalize_adjoint<T: Scalar>(e: &Expr<T>, shape: &[SiteType]) -> Result<CanonicalExpr<T>, RewriteError> {
    e.span(shape.len())?;
    Ok(merge(shape.len(), canon_rec(e, true, shape)))
}

/// Term-wise comparison of two canonical forms: the same bodies with
/// amplitudes within `tol`.
pub fn canonical_eq<T: Scalar>(a: &CanonicalExpr<T>, b: &CanonicalExpr<T>, tol: f64) -> bool {
    a.terms.len() == b.terms.len()
        && a.terms.iter().zip(&b.terms).all(|(x, y)| x.body == y.body && c_negligible(&(x.amp.clone() - y.amp.clone()), tol))
}

/// First term of `a` without a matching term in `b`.
pub fn first_mismatch<'a, T: Scalar>(a: &'a CanonicalExpr<T>, b: &CanonicalExpr<T>, tol: f64) -> Option<&'a CanonTerm<T>> {
    a.terms.iter().find(|x| {
        !b.terms.iter().any(|y| x.body == y.body && c_negligible(&(x.amp.clone() - y.amp.clone()), tol))
    })
}

/// Equality modulo the equational theory, decided on canonical forms.
pub fn eq_modulo<T: Scalar>(e1: &Expr<T>, e2: &Expr<T>, shape: &[SiteType]) -> Result<bool, RewriteError> {
    Ok(canonical_eq(&dag_canonicalize(e1, shape)?, &dag_canonicalize(e2, shape)?, MATCH_TOL))
}
