//! Particle transformation onto qubits.
//!
//! A fermion site becomes one qubit; its ladders carry a Z string over the
//! qubits of all earlier fermion sites (Jordan-Wigner). A `Boson(m)` site
//! becomes `⌈log₂ m⌉` qubits holding the occupation in binary, least
//! significant bit first, and `a` becomes `Σ_j √j |j-1⟩⟨j|` written as a
//! product of per-bit transition operators. The tensor of site factors is
//! emitted as an ordered product, which reproduces the exchange signs of
//! the source semantics exactly.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::ir::{Pauli, SiteType, StateVector};
use crate::rewrite::{CanonicalExpr, Ladder};
use crate::scalar::{c_literal, Real, Scalar, C};
use crate::semantics::Dense;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransformError {
    #[error("amplitude sqrt({0}) is not exact in this scalar type")]
    Inexact(usize),
    #[error("state does not match the shape: {0}")]
    State(String),
}

/// Single-qubit factor of a qubit expression.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LocalOp {
    Pauli(Pauli),
    /// `½(X + iY) = |0⟩⟨1|`.
    Lower,
    /// `½(X - iY) = |1⟩⟨0|`.
    Raise,
    /// `½(I + Z) = |0⟩⟨0|`.
    Vacant,
    /// `½(I - Z) = |1⟩⟨1|`.
    Occupied,
}

impl LocalOp {
    /// Action on a computational basis bit: amplitude as a power of `i`
    /// times a sign, and the new bit, or `None` for zero.
    pub fn act(self, bit: usize) -> Option<(u32, usize)> {
        match (self, bit) {
            (LocalOp::Pauli(Pauli::I), b) => Some((0, b)),
            (LocalOp::Pauli(Pauli::X), b) => Some((0, 1 - b)),
            (LocalOp::Pauli(Pauli::Y), 0) => Some((1, 1)),
            (LocalOp::Pauli(Pauli::Y), _) => Some((3, 0)),
            (LocalOp::Pauli(Pauli::Z), 0) => Some((0, 0)),
            (LocalOp::Pauli(Pauli::Z), _) => Some((2, 1)),
            (LocalOp::Lower, 1) => Some((0, 0)),
            (LocalOp::Raise, 0) => Some((0, 1)),
            (LocalOp::Vacant, 0) => Some((0, 0)),
            (LocalOp::Occupied, 1) => Some((0, 1)),
            _ => None,
        }
    }
}

impl fmt::Display for LocalOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LocalOp::Pauli(p) => write!(f, "{}", p.letter()),
            LocalOp::Lower => write!(f, "lower"),
            LocalOp::Raise => write!(f, "raise"),
            LocalOp::Vacant => write!(f, "n0"),
            LocalOp::Occupied => write!(f, "n1"),
        }
    }
}

/// Operator expression over qubits.
#[derive(Clone, Debug, PartialEq)]
pub enum QubitExpr<T = f64> {
    Identity,
    Local { qubit: usize, op: LocalOp },
    Scaled { amp: C<T>, inner: Box<QubitExpr<T>> },
    Sum(Vec<QubitExpr<T>>),
    /// Product; the last factor acts first.
    Compose(Vec<QubitExpr<T>>),
}

impl<T: Scalar> fmt::Display for QubitExpr<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QubitExpr::Identity => write!(f, "I"),
            QubitExpr::Local { qubit, op } => write!(f, "{op}({qubit})"),
            QubitExpr::Scaled { amp, inner } => write!(f, "{} * {}", c_literal(amp), inner),
            QubitExpr::Sum(items) => {
                if items.is_empty() {
                    return write!(f, "0");
                }
                let parts: Vec<String> = items.iter().map(|e| format!("{e}")).collect();
                write!(f, "({})", parts.join(" + "))
            }
            QubitExpr::Compose(items) => {
                if items.is_empty() {
                    return write!(f, "I");
                }
                let parts: Vec<String> = items.iter().map(|e| format!("{e}")).collect();
                write!(f, "{}", parts.join(" . "))
            }
        }
    }
}

/// Qubit placement of each source site.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SiteLayout {
    pub offsets: Vec<usize>,
    pub counts: Vec<usize>,
    pub width: usize,
}

/// Qubits needed for a site: one per fermion, `⌈log₂ m⌉` per boson.
pub fn qubit_count(site: SiteType) -> usize {
    match site {
        SiteType::Fermion => 1,
        SiteType::Boson(m) => (usize::BITS - (m - 1).leading_zeros()) as usize,
    }
}

impl SiteLayout {
    pub fn new(shape: &[SiteType]) -> Self {
        let counts: Vec<usize> = shape.iter().map(|&s| qubit_count(s)).collect();
        let mut offsets = Vec::with_capacity(counts.len());
        let mut acc = 0;
        for c in &counts {
            offsets.push(acc);
            acc += c;
        }
        SiteLayout { offsets, counts, width: acc }
    }
}

/// Per-bit factor of `|to⟩⟨from|` at bit `k`.
pub fn boson_bit_operator(from: usize, to: usize, k: usize) -> LocalOp {
    match ((from >> k) & 1, (to >> k) & 1) {
        (0, 1) => LocalOp::Raise,
        (1, 0) => LocalOp::Lower,
        (1, 1) => LocalOp::Occupied,
        _ => LocalOp::Vacant,
    }
}

fn sqrt_int<T: Scalar>(j: usize) -> Result<T, TransformError> {
    T::from_usize(j).sqrt_exact().ok_or(TransformError::Inexact(j))
}

/// Encoding of fermionic ladders onto one qubit per fermion site.
pub trait FermionEncoding {
    /// Qubit form of `op` on fermion site `s`.
    fn fermion_ladder<T: Scalar>(&self, op: Ladder, s: usize, shape: &[SiteType], layout: &SiteLayout) -> QubitExpr<T>;
}

/// Jordan-Wigner: a Z on every earlier fermion qubit, then the ladder.
#[derive(Clone, Copy, Debug, Default)]
pub struct JordanWigner;

impl FermionEncoding for JordanWigner {
    fn fermion_ladder<T: Scalar>(&self, op: Ladder, s: usize, shape: &[SiteType], layout: &SiteLayout) -> QubitExpr<T> {
        let mut factors: Vec<QubitExpr<T>> = (0..s)
            .filter(|&f| shape[f].is_fermion())
            .map(|f| QubitExpr::Local { qubit: layout.offsets[f], op: LocalOp::Pauli(Pauli::Z) })
            .collect();
        let op = match op {
            Ladder::Lower => LocalOp::Lower,
            Ladder::Raise => LocalOp::Raise,
        };
        factors.push(QubitExpr::Local { qubit: layout.offsets[s], op });
        QubitExpr::Compose(factors)
    }
}

/// Qubit form of `op` on boson site `s` of dimension `m`.
pub fn boson_ladder<T: Scalar>(op: Ladder, s: usize, m: usize, layout: &SiteLayout) -> Result<QubitExpr<T>, TransformError> {
    let mut terms = Vec::with_capacity(m - 1);
    for j in 1..m {
        let (from, to) = match op {
            Ladder::Lower => (j, j - 1),
            Ladder::Raise => (j - 1, j),
        };
        let bits = (0..layout.counts[s])
            .map(|k| QubitExpr::Local { qubit: layout.offsets[s] + k, op: boson_bit_operator(from, to, k) })
            .collect();
        let amp = C::new(sqrt_int::<T>(j)?, T::zero());
        terms.push(QubitExpr::Scaled { amp, inner: Box::new(QubitExpr::Compose(bits)) });
    }
    Ok(QubitExpr::Sum(terms))
}

/// Transform a canonical expression with the given fermion encoding.
pub fn transform_expr_with<T: Scalar, E: FermionEncoding>(
    enc: &E,
    c: &CanonicalExpr<T>,
    shape: &[SiteType],
) -> Result<(QubitExpr<T>, SiteLayout), TransformError> {
    let layout = SiteLayout::new(shape);
    let mut terms = Vec::with_capacity(c.terms.len());
    for t in &c.terms {
        let mut factors = Vec::new();
        for (k, word) in t.body.words.iter().enumerate() {
            let s = t.body.start + k;
            for &l in word {
                factors.push(match shape[s] {
                    SiteType::Fermion => enc.fermion_ladder(l, s, shape, &layout),
                    SiteType::Boson(m) => boson_ladder(l, s, m, &layout)?,
                });
            }
        }
        terms.push(QubitExpr::Scaled { amp: t.amp.clone(), inner: Box::new(QubitExpr::Compose(factors)) });
    }
    Ok((QubitExpr::Sum(terms), layout))
}

/// Transform a canonical expression using Jordan-Wigner for fermions.
pub fn transform_expr<T: Scalar>(c: &CanonicalExpr<T>, shape: &[SiteType]) -> Result<(QubitExpr<T>, SiteLayout), TransformError> {
    transform_expr_with(&JordanWigner, c, shape)
}

/// Map a state to its qubit encoding: one bit per fermion, the binary
/// occupation (LSB first) per boson.
pub fn transform_state<T: Scalar>(psi: &StateVector<T>, shape: &[SiteType]) -> Result<StateVector<T>, TransformError> {
    psi.validate(shape).map_err(|e| TransformError::State(e.to_string()))?;
    let layout = SiteLayout::new(shape);
    Ok(StateVector::from_amps(psi.kets().map(|(ket, z)| {
        let mut bits = vec![0usize; layout.width];
        for (s, &k) in ket.iter().enumerate() {
            for b in 0..layout.counts[s] {
                bits[layout.offsets[s] + b] = (k >> b) & 1;
            }
        }
        (bits, z.clone())
    })))
}

fn i_pow_times<T: Real>(k: u32, z: C<T>) -> C<T> {
    z * crate::semantics::i_pow::<T>(k)
}

fn apply_bits<T: Real>(e: &QubitExpr<T>, bits: &[usize]) -> Vec<(Vec<usize>, C<T>)> {
    match e {
        QubitExpr::Identity => vec![(bits.to_vec(), C::one())],
        QubitExpr::Local { qubit, op } => match op.act(bits[*qubit]) {
            None => Vec::new(),
            Some((pow, b)) => {
                let mut out = bits.to_vec();
                out[*qubit] = b;
                vec![(out, i_pow_times(pow, C::one()))]
            }
        },
        QubitExpr::Scaled { amp, inner } => apply_bits(inner, bits).into_iter().map(|(k, z)| (k, z * amp)).collect(),
        QubitExpr::Sum(items) => items.iter().flat_map(|e| apply_bits(e, bits)).collect(),
        QubitExpr::Compose(items) => {
            let mut cur = vec![(bits.to_vec(), C::<T>::one())];
            for f in items.iter().rev() {
                let mut next = Vec::new();
                for (k, z) in &cur {
                    for (k2, w) in apply_bits(f, k) {
                        next.push((k2, w * z));
                    }
                }
                cur = next;
            }
            cur
        }
    }
}

/// Apply a qubit expression to a state over `width` qubits.
pub fn apply_qubit<T: Real>(e: &QubitExpr<T>, psi: &StateVector<T>) -> StateVector<T> {
    let mut acc: BTreeMap<Vec<usize>, C<T>> = BTreeMap::new();
    for (ket, z) in psi.kets() {
        for (k2, w) in apply_bits(e, ket) {
            *acc.entry(k2).or_insert_with(C::zero) += w * z;
        }
    }
    StateVector::from_amps(acc)
}

/// Dense matrix of a qubit expression; qubit 0 is the least significant bit.
pub fn qubit_matrix<T: Real>(e: &QubitExpr<T>, width: usize) -> Dense<T> {
    let dim = 1usize << width;
    let mut m = Dense::<T>::zeros(dim, dim);
    for col in 0..dim {
        let bits: Vec<usize> = (0..width).map(|q| (col >> q) & 1).collect();
        for (k2, z) in apply_bits(e, &bits) {
            let row: usize = k2.iter().enumerate().map(|(q, b)| b << q).sum();
            m[(row, col)] += z;
        }
    }
    m
}
