//! Shared data types of the pipeline: site types, kinds, expressions, Pauli
//! strings and Hamiltonians, states, circuits and analog schedules.
//!
//! Basis kets are tuples `(k_0, .., k_{n-1})` with site 0 the least
//! significant digit of the dense index. Qubit 0 is likewise the least
//! significant bit, and Pauli strings print qubit 0 first.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{c_literal, c_negligible, re, Scalar, C};

/// Largest Hilbert-space dimension the dense oracle accepts.
pub const DENSE_LIMIT: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SiteType {
    /// Truncated boson with `dim` levels, `dim >= 2`.
    Boson(usize),
    /// Two-level fermionic mode.
    Fermion,
}

impl SiteType {
    pub fn dim(self) -> usize {
        match self {
            SiteType::Boson(m) => m,
            SiteType::Fermion => 2,
        }
    }

    pub fn is_fermion(self) -> bool {
        matches!(self, SiteType::Fermion)
    }
}

impl fmt::Display for SiteType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SiteType::Boson(m) => write!(f, "boson({m})"),
            SiteType::Fermion => write!(f, "fermion"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IrError {
    #[error("empty system shape")]
    EmptyShape,
    #[error("boson dimension must be at least 2, got {0}")]
    BadBosonDim(usize),
    #[error("system dimension exceeds the dense-oracle limit {limit}")]
    TooLarge { limit: usize },
    #[error("site {site} out of range for {len} sites")]
    SiteOutOfRange { site: usize, len: usize },
    #[error("occupation {k} out of range at site {site} (dimension {dim})")]
    OccupationOutOfRange { site: usize, k: usize, dim: usize },
    #[error("Pauli string width {got} does not match {expected}")]
    WidthMismatch { expected: usize, got: usize },
    #[error("invalid Pauli letter {0:?}")]
    BadPauli(char),
    #[error("site ranges do not line up: {0}")]
    SpanMismatch(String),
}

/// Product of site dimensions, capped at `limit`.
pub fn system_dimension_with_limit(shape: &[SiteType], limit: usize) -> Result<usize, IrError> {
    if shape.is_empty() {
        return Err(IrError::EmptyShape);
    }
    let mut dim = 1usize;
    for s in shape {
        if let SiteType::Boson(m) = s {
            if *m < 2 {
                return Err(IrError::BadBosonDim(*m));
            }
        }
        dim = dim
            .checked_mul(s.dim())
            .filter(|d| *d <= limit)
            .ok_or(IrError::TooLarge { limit })?;
    }
    Ok(dim)
}

pub fn system_dimension(shape: &[SiteType]) -> Result<usize, IrError> {
    system_dimension_with_limit(shape, DENSE_LIMIT)
}

/// Dense index of an occupation tuple, site 0 least significant.
pub fn ket_index(shape: &[SiteType], ket: &[usize]) -> usize {
    let mut idx = 0;
    let mut stride = 1;
    for (s, k) in shape.iter().zip(ket) {
        idx += k * stride;
        stride *= s.dim();
    }
    idx
}

/// Inverse of [`ket_index`].
pub fn index_ket(shape: &[SiteType], mut idx: usize) -> Vec<usize> {
    shape
        .iter()
        .map(|s| {
            let k = idx % s.dim();
            idx /= s.dim();
            k
        })
        .collect()
}

/// Operator kind from the three-point lattice `h ⊑ p`, `u ⊑ p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Kind {
    Plain,
    Hermitian,
    Unitary,
}

impl Kind {
    /// Least upper bound, `None` for the forbidden `h ⊔ u`.
    pub fn join(self, other: Kind) -> Option<Kind> {
        use Kind::*;
        match (self, other) {
            (Plain, _) | (_, Plain) => Some(Plain),
            (Hermitian, Hermitian) => Some(Hermitian),
            (Unitary, Unitary) => Some(Unitary),
            _ => None,
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Plain => "p",
            Kind::Hermitian => "h",
            Kind::Unitary => "u",
        })
    }
}

/// Second-quantized operator expression. Leaves carry absolute site indices;
/// a `Tensor` joins the operators of two adjacent site ranges.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr<T = f64> {
    /// `amp · a` on one site.
    Annihilate { amp: C<T>, site: usize },
    Identity { site: usize },
    Dagger(Box<Expr<T>>),
    Tensor(Box<Expr<T>>, Box<Expr<T>>),
    Sum(Box<Expr<T>>, Box<Expr<T>>),
    Compose(Box<Expr<T>>, Box<Expr<T>>),
}

impl<T: Scalar> Expr<T> {
    pub fn a(site: usize) -> Self {
        Expr::Annihilate { amp: re(T::one()), site }
    }

    pub fn scaled_a(amp: C<T>, site: usize) -> Self {
        Expr::Annihilate { amp, site }
    }

    pub fn adag(site: usize) -> Self {
        Expr::Dagger(Box::new(Self::a(site)))
    }

    pub fn id(site: usize) -> Self {
        Expr::Identity { site }
    }

    pub fn dagger(e: Self) -> Self {
        Expr::Dagger(Box::new(e))
    }

    pub fn tensor(l: Self, r: Self) -> Self {
        Expr::Tensor(Box::new(l), Box::new(r))
    }

    pub fn sum(l: Self, r: Self) -> Self {
        Expr::Sum(Box::new(l), Box::new(r))
    }

    pub fn compose(l: Self, r: Self) -> Self {
        Expr::Compose(Box::new(l), Box::new(r))
    }

    /// Left-nested sum of a non-empty list.
    pub fn sum_all(items: impl IntoIterator<Item = Self>) -> Option<Self> {
        items.into_iter().reduce(Self::sum)
    }

    /// Left-nested tensor of a non-empty list.
    pub fn tensor_all(items: impl IntoIterator<Item = Self>) -> Option<Self> {
        items.into_iter().reduce(Self::tensor)
    }

    /// Left-nested composition of a non-empty list.
    pub fn compose_all(items: impl IntoIterator<Item = Self>) -> Option<Self> {
        items.into_iter().reduce(Self::compose)
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Expr::Annihilate { .. } | Expr::Identity { .. } => 1,
            Expr::Dagger(e) => 1 + e.size(),
            Expr::Tensor(l, r) | Expr::Sum(l, r) | Expr::Compose(l, r) => 1 + l.size() + r.size(),
        }
    }

    /// Whether some leaf is a ladder operator.
    pub fn has_ladder(&self) -> bool {
        match self {
            Expr::Annihilate { .. } => true,
            Expr::Identity { .. } => false,
            Expr::Dagger(e) => e.has_ladder(),
            Expr::Tensor(l, r) | Expr::Sum(l, r) | Expr::Compose(l, r) => l.has_ladder() || r.has_ladder(),
        }
    }

    /// Sites touched by the leaves, ascending and deduplicated.
    pub fn sites(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_sites(&mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    fn collect_sites(&self, out: &mut Vec<usize>) {
        match self {
            Expr::Annihilate { site, .. } | Expr::Identity { site } => out.push(*site),
            Expr::Dagger(e) => e.collect_sites(out),
            Expr::Tensor(l, r) | Expr::Sum(l, r) | Expr::Compose(l, r) => {
                l.collect_sites(out);
                r.collect_sites(out);
            }
        }
    }

    /// Apply `f` to every leaf amplitude.
    pub fn map_amps<U: Scalar>(&self, f: &impl Fn(&C<T>) -> C<U>) -> Expr<U> {
        match self {
            Expr::Annihilate { amp, site } => Expr::Annihilate { amp: f(amp), site: *site },
            Expr::Identity { site } => Expr::Identity { site: *site },
            Expr::Dagger(e) => Expr::Dagger(Box::new(e.map_amps(f))),
            Expr::Tensor(l, r) => Expr::Tensor(Box::new(l.map_amps(f)), Box::new(r.map_amps(f))),
            Expr::Sum(l, r) => Expr::Sum(Box::new(l.map_amps(f)), Box::new(r.map_amps(f))),
            Expr::Compose(l, r) => Expr::Compose(Box::new(l.map_amps(f)), Box::new(r.map_amps(f))),
        }
    }

    /// Site range `[start, end)` covered by the expression, checking that
    /// tensor factors are adjacent and that sum and composition operands
    /// cover the same range.
    pub fn span(&self, n_sites: usize) -> Result<(usize, usize), IrError> {
        match self {
            Expr::Annihilate { site, .. } | Expr::Identity { site } => {
                if *site < n_sites {
                    Ok((*site, *site + 1))
                } else {
                    Err(IrError::SiteOutOfRange { site: *site, len: n_sites })
                }
            }
            Expr::Dagger(e) => e.span(n_sites),
            Expr::Tensor(l, r) => {
                let (a, b) = l.span(n_sites)?;
                let (c, d) = r.span(n_sites)?;
                if b != c {
                    return Err(IrError::SpanMismatch(format!("tensor factors cover [{a},{b}) and [{c},{d})")));
                }
                Ok((a, d))
            }
            Expr::Sum(l, r) | Expr::Compose(l, r) => {
                let sl = l.span(n_sites)?;
                let sr = r.span(n_sites)?;
                if sl != sr {
                    return Err(IrError::SpanMismatch(format!(
                        "operands cover [{},{}) and [{},{})",
                        sl.0, sl.1, sr.0, sr.1
                    )));
                }
                Ok(sl)
            }
        }
    }

    /// Number of ladder leaves on fermion sites, the parity that decides
    /// fermionic exchange signs.
    pub fn fermion_ladders(&self, shape: &[SiteType]) -> usize {
        match self {
            Expr::Annihilate { site, .. } => usize::from(shape.get(*site).is_some_and(|s| s.is_fermion())),
            Expr::Identity { .. } => 0,
            Expr::Dagger(e) => e.fermion_ladders(shape),
            Expr::Tensor(l, r) | Expr::Sum(l, r) | Expr::Compose(l, r) => {
                l.fermion_ladders(shape) + r.fermion_ladders(shape)
            }
        }
    }
}

/// Prints the raw positional form accepted by the parser: `a@j`, `I@j`,
/// `dag(e)`, `(e (x) e)`, `(e + e)`, `(e . e)` and `amp*a@j`.
impl<T: Scalar> fmt::Display for Expr<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Annihilate { amp, site } => {
                if *amp == re(T::one()) {
                    write!(f, "a@{site}")
                } else {
                    write!(f, "{}*a@{site}", c_literal(amp))
                }
            }
            Expr::Identity { site } => write!(f, "I@{site}"),
            Expr::Dagger(e) => write!(f, "dag({e})"),
            Expr::Tensor(l, r) => write!(f, "({l} (x) {r})"),
            Expr::Sum(l, r) => write!(f, "({l} + {r})"),
            Expr::Compose(l, r) => write!(f, "({l} . {r})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_letter(c: char) -> Option<Pauli> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    /// Whether the two single-qubit operators anticommute.
    pub fn anticommutes(self, other: Pauli) -> bool {
        self != Pauli::I && other != Pauli::I && self != other
    }
}

/// Phase-free tensor product of Paulis; entry `k` acts on qubit `k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    pub ops: Vec<Pauli>,
}

impl PauliString {
    pub fn identity(width: usize) -> Self {
        PauliString { ops: vec![Pauli::I; width] }
    }

    /// Identity except for `p` on qubit `q`.
    pub fn single(width: usize, q: usize, p: Pauli) -> Self {
        let mut s = Self::identity(width);
        s.ops[q] = p;
        s
    }

    pub fn from_pairs(width: usize, pairs: &[(usize, Pauli)]) -> Self {
        let mut s = Self::identity(width);
        for &(q, p) in pairs {
            s.ops[q] = p;
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self, IrError> {
        text.chars()
            .map(|c| Pauli::from_letter(c).ok_or(IrError::BadPauli(c)))
            .collect::<Result<Vec<_>, _>>()
            .map(|ops| PauliString { ops })
    }

    pub fn width(&self) -> usize {
        self.ops.len()
    }

    pub fn locality(&self) -> usize {
        self.ops.iter().filter(|p| **p != Pauli::I).count()
    }

    /// Qubits carrying a non-identity factor, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.ops.len()).filter(|&q| self.ops[q] != Pauli::I).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.locality() == 0
    }

    pub fn anticommutes(&self, other: &PauliString) -> bool {
        self.ops.iter().zip(&other.ops).filter(|(a, b)| a.anticommutes(**b)).count() % 2 == 1
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.ops {
            write!(f, "{}", p.letter())?;
        }
        Ok(())
    }
}

impl Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        PauliString::parse(&text).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliTerm<T = f64> {
    pub coeff: T,
    pub string: PauliString,
}

/// Real-weighted sum of distinct Pauli strings, sorted by string.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliHamiltonian<T = f64> {
    pub width: usize,
    pub terms: Vec<PauliTerm<T>>,
}

impl<T: Scalar> PauliHamiltonian<T> {
    pub fn new(width: usize) -> Self {
        PauliHamiltonian { width, terms: Vec::new() }
    }

    /// Build from possibly repeated strings, merging coefficients and
    /// dropping exact zeros.
    pub fn from_terms(
        width: usize,
        terms: impl IntoIterator<Item = (T, PauliString)>,
    ) -> Result<Self, IrError> {
        let mut map: BTreeMap<PauliString, T> = BTreeMap::new();
        for (c, s) in terms {
            if s.width() != width {
                return Err(IrError::WidthMismatch { expected: width, got: s.width() });
            }
            let slot = map.entry(s).or_insert_with(T::zero);
            *slot = slot.clone() + c;
        }
        Ok(PauliHamiltonian {
            width,
            terms: map
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(string, coeff)| PauliTerm { coeff, string })
                .collect(),
        })
    }

    /// Add `coeff · string`, keeping the invariants.
    pub fn insert(&mut self, coeff: T, string: PauliString) -> Result<(), IrError> {
        if string.width() != self.width {
            return Err(IrError::WidthMismatch { expected: self.width, got: string.width() });
        }
        match self.terms.binary_search_by(|t| t.string.cmp(&string)) {
            Ok(k) => {
                let c = self.terms[k].coeff.clone() + coeff;
                if c.is_zero() {
                    self.terms.remove(k);
                } else {
                    self.terms[k].coeff = c;
                }
            }
            Err(k) if !coeff.is_zero() => self.terms.insert(k, PauliTerm { coeff, string }),
            Err(_) => {}
        }
        Ok(())
    }

    pub fn coeff_of(&self, string: &PauliString) -> Option<&T> {
        self.terms.iter().find(|t| &t.string == string).map(|t| &t.coeff)
    }

    /// `Σ |c_j|`.
    pub fn lambda(&self) -> T {
        self.terms.iter().fold(T::zero(), |acc, t| acc + t.coeff.abs())
    }

    pub fn max_locality(&self) -> usize {
        self.terms.iter().map(|t| t.string.locality()).max().unwrap_or(0)
    }

    pub fn map_coeffs<U: Scalar>(&self, f: impl Fn(&T) -> U) -> PauliHamiltonian<U> {
        PauliHamiltonian {
            width: self.width,
            terms: self.terms.iter().map(|t| PauliTerm { coeff: f(&t.coeff), string: t.string.clone() }).collect(),
        }
    }
}

impl<T: Scalar> fmt::Display for PauliHamiltonian<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, t) in self.terms.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            write!(f, "{} {}", t.coeff, t.string)?;
        }
        Ok(())
    }
}

/// Sparse state over a shape. `Zero` is the annihilated state and absorbs
/// every operation, tensoring included.
#[derive(Clone, Debug, PartialEq)]
pub enum StateVector<T = f64> {
    Zero,
    Kets(BTreeMap<Vec<usize>, C<T>>),
}

impl<T: Scalar> StateVector<T> {
    pub fn basis(ket: Vec<usize>) -> Self {
        let mut m = BTreeMap::new();
        m.insert(ket, re(T::one()));
        StateVector::Kets(m)
    }

    /// Build from amplitudes, normalizing an all-zero map to `Zero`.
    pub fn from_amps(amps: impl IntoIterator<Item = (Vec<usize>, C<T>)>) -> Self {
        let mut m: BTreeMap<Vec<usize>, C<T>> = BTreeMap::new();
        for (k, z) in amps {
            let slot = m.entry(k).or_insert_with(C::zero);
            *slot = slot.clone() + z;
        }
        m.retain(|_, z| !z.is_zero());
        if m.is_empty() {
            StateVector::Zero
        } else {
            StateVector::Kets(m)
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, StateVector::Zero)
    }

    pub fn kets(&self) -> impl Iterator<Item = (&Vec<usize>, &C<T>)> {
        let map = match self {
            StateVector::Zero => None,
            StateVector::Kets(m) => Some(m),
        };
        map.into_iter().flat_map(|m| m.iter())
    }

    pub fn amp(&self, ket: &[usize]) -> C<T> {
        match self {
            StateVector::Zero => C::zero(),
            StateVector::Kets(m) => m.get(ket).cloned().unwrap_or_else(C::zero),
        }
    }

    /// Check every occupation against the shape.
    pub fn validate(&self, shape: &[SiteType]) -> Result<(), IrError> {
        for (ket, _) in self.kets() {
            if ket.len() != shape.len() {
                return Err(IrError::WidthMismatch { expected: shape.len(), got: ket.len() });
            }
            for (site, (k, s)) in ket.iter().zip(shape).enumerate() {
                if *k >= s.dim() {
                    return Err(IrError::OccupationOutOfRange { site, k: *k, dim: s.dim() });
                }
            }
        }
        Ok(())
    }

    /// Linear combination `a·self + b·other`.
    pub fn combine(&self, a: &C<T>, other: &Self, b: &C<T>) -> Self {
        let left = self.kets().map(|(k, z)| (k.clone(), z.clone() * a.clone()));
        let right = other.kets().map(|(k, z)| (k.clone(), z.clone() * b.clone()));
        Self::from_amps(left.chain(right))
    }

    /// Tensor product; `Zero` absorbs.
    pub fn tensor(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return StateVector::Zero;
        }
        let mut out = Vec::new();
        for (k1, z1) in self.kets() {
            for (k2, z2) in other.kets() {
                let mut k = k1.clone();
                k.extend(k2);
                out.push((k, z1.clone() * z2.clone()));
            }
        }
        Self::from_amps(out)
    }

    /// Equality of amplitudes within `tol`, with `Zero` matching an all-zero map.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let keys: std::collections::BTreeSet<&Vec<usize>> = self.kets().map(|(k, _)| k).chain(other.kets().map(|(k, _)| k)).collect();
        keys.into_iter().all(|k| c_negligible(&(self.amp(k) - other.amp(k)), tol))
    }
}

/// Elementary gate. Rotations follow `R_P(θ) = exp(-iθP/2)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gate", rename_all = "lowercase")]
pub enum Gate<T = f64> {
    H { q: usize },
    Rx { theta: T, q: usize },
    Ry { theta: T, q: usize },
    Rz { theta: T, q: usize },
    Cx { ctrl: usize, tgt: usize },
}

impl<T> Gate<T> {
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::H { q } | Gate::Rx { q, .. } | Gate::Ry { q, .. } | Gate::Rz { q, .. } => vec![*q],
            Gate::Cx { ctrl, tgt } => vec![*ctrl, *tgt],
        }
    }
}

/// Gate list applied left to right. The implemented unitary is
/// `exp(-i·phase) · G_last ⋯ G_first`; `phase` collects identity terms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circuit<T = f64> {
    pub width: usize,
    pub gates: Vec<Gate<T>>,
    pub phase: T,
}

impl<T: Scalar> Circuit<T> {
    pub fn new(width: usize) -> Self {
        Circuit { width, gates: Vec::new(), phase: T::zero() }
    }

    /// Number of ASAP layers.
    pub fn depth(&self) -> usize {
        let mut level = vec![0usize; self.width];
        for g in &self.gates {
            let qs = g.qubits();
            let l = qs.iter().map(|&q| level[q]).max().unwrap_or(0) + 1;
            for q in qs {
                level[q] = l;
            }
        }
        level.into_iter().max().unwrap_or(0)
    }

    /// Check index invariants.
    pub fn validate(&self) -> bool {
        self.gates.iter().all(|g| {
            let qs = g.qubits();
            qs.iter().all(|&q| q < self.width) && !(qs.len() == 2 && qs[0] == qs[1])
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Machine {
    Ibm,
    Indiana,
}

impl fmt::Display for Machine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Machine::Ibm => "ibm",
            Machine::Indiana => "indiana",
        })
    }
}

/// Product-formula family selected for a compilation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgoChoice {
    Standard,
    Qdrift,
}

impl fmt::Display for AlgoChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AlgoChoice::Standard => "standard",
            AlgoChoice::Qdrift => "qdrift",
        })
    }
}

impl std::str::FromStr for AlgoChoice {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "standard" => Ok(AlgoChoice::Standard),
            "qdrift" => Ok(AlgoChoice::Qdrift),
            _ => Err(format!("unknown algorithm `{s}` (expected standard or qdrift)")),
        }
    }
}

/// Compilation back end.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetChoice {
    Digital,
    Ibm,
    Indiana,
}

impl TargetChoice {
    pub fn machine(self) -> Option<Machine> {
        match self {
            TargetChoice::Digital => None,
            TargetChoice::Ibm => Some(Machine::Ibm),
            TargetChoice::Indiana => Some(Machine::Indiana),
        }
    }
}

impl fmt::Display for TargetChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TargetChoice::Digital => "digital",
            TargetChoice::Ibm => "ibm",
            TargetChoice::Indiana => "indiana",
        })
    }
}

impl std::str::FromStr for TargetChoice {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "digital" => Ok(TargetChoice::Digital),
            "ibm" => Ok(TargetChoice::Ibm),
            "indiana" => Ok(TargetChoice::Indiana),
            _ => Err(format!("unknown target `{s}` (expected digital, ibm or indiana)")),
        }
    }
}

/// Evolution `exp(-i·duration·string)` on the device.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pulse<T = f64> {
    pub duration: T,
    pub string: PauliString,
}

/// Pulses applied in order, with a known global phase as for [`Circuit`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalogSchedule<T = f64> {
    pub machine: Machine,
    pub width: usize,
    pub pulses: Vec<Pulse<T>>,
    pub phase: T,
}
