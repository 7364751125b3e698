//! Executable denotational semantics and the dense-matrix oracle.
//!
//! An expression acts on basis kets in a fermionic context `g`, the number
//! of occupied fermion sites to the left of its span. A fermionic ladder
//! contributes `(-1)^g`. In `e1 ⊗ e2` the right operand runs in context
//! `g + S(w1)`, where `S(w1)` counts the occupied fermion sites of the
//! left operand's input ket. `†e` is the conjugate transpose of the local
//! operator of `e` in the same context.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_traits::{Float, One, Zero};
use thiserror::Error;

use crate::ir::{index_ket, ket_index, system_dimension, Expr, IrError, Pauli, PauliHamiltonian, PauliString, SiteType, StateVector};
use crate::rewrite::Ladder;
use crate::scalar::{lit, re, Real, Scalar, C};

/// Dense operator over the basis ordered by [`ket_index`].
pub type Dense<T = f64> = DMatrix<C<T>>;

/// Tolerance for the Hermiticity precondition of [`simulate`].
pub const HERMITIAN_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SemanticsError {
    #[error(transparent)]
    Ir(#[from] IrError),
    #[error("operator is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),
    #[error("matrix is not square or dimensions differ")]
    DimensionMismatch,
}

/// Single-site ladder rule. Returns the amplitude and new occupation, or
/// `None` when the result is the zero vector.
pub fn ladder_apply<T: Real>(op: Ladder, m: usize, k: usize) -> Option<(T, usize)> {
    match op {
        Ladder::Raise if k + 1 < m => Some((Float::sqrt(lit::<T>((k + 1) as f64)), k + 1)),
        Ladder::Lower if k > 0 => Some((Float::sqrt(lit::<T>(k as f64)), k - 1)),
        _ => None,
    }
}

/// `(-1)^g` with `g` the occupied fermion sites strictly before `j`.
pub fn fermion_sign(shape: &[SiteType], ket: &[usize], j: usize) -> i32 {
    let g: usize = (0..j).filter(|&s| shape[s].is_fermion()).map(|s| ket[s]).sum();
    if g.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

type Ket = Vec<usize>;

fn signed<T: Real>(z: C<T>, g: usize, fermion: bool) -> C<T> {
    if fermion && g % 2 == 1 {
        -z
    } else {
        z
    }
}

fn apply_ket<T: Real>(e: &Expr<T>, shape: &[SiteType], ket: &Ket, g: usize) -> Vec<(Ket, C<T>)> {
    match e {
        Expr::Annihilate { amp, site } => {
            let s = *site;
            match ladder_apply::<T>(Ladder::Lower, shape[s].dim(), ket[s]) {
                None => Vec::new(),
                Some((x, k)) => {
                    let mut out = ket.clone();
                    out[s] = k;
                    vec![(out, signed(amp * x, g, shape[s].is_fermion()))]
                }
            }
        }
        Expr::Identity { .. } => vec![(ket.clone(), C::one())],
        Expr::Dagger(inner) => {
            if let Expr::Annihilate { amp, site } = inner.as_ref() {
                let s = *site;
                return match ladder_apply::<T>(Ladder::Raise, shape[s].dim(), ket[s]) {
                    None => Vec::new(),
                    Some((x, k)) => {
                        let mut out = ket.clone();
                        out[s] = k;
                        vec![(out, signed(amp.conj() * x, g, shape[s].is_fermion()))]
                    }
                };
            }
            // ⟨x|†e|ket⟩ = conj(⟨ket|e|x⟩) over the local configurations x.
            let (a, b) = inner.span(shape.len()).expect("validated span");
            let mut out = Vec::new();
            for_each_local(shape, ket, a, b, |x| {
                for (k2, z) in apply_ket(inner, shape, x, g) {
                    if k2 == *ket {
                        out.push((x.clone(), z.conj()));
                    }
                }
            });
            out
        }
        Expr::Sum(l, r) => {
            let mut out = apply_ket(l, shape, ket, g);
            out.extend(apply_ket(r, shape, ket, g));
            out
        }
        Expr::Compose(l, r) => {
            let mut out = Vec::new();
            for (k1, z1) in apply_ket(r, shape, ket, g) {
                for (k2, z2) in apply_ket(l, shape, &k1, g) {
                    out.push((k2, z1 * z2));
                }
            }
            out
        }
        Expr::Tensor(l, r) => {
            let (a, b) = l.span(shape.len()).expect("validated span");
            let g2 = g + (a..b).filter(|&s| shape[s].is_fermion()).map(|s| ket[s]).sum::<usize>();
            let mut out = Vec::new();
            for (k1, z1) in apply_ket(l, shape, ket, g) {
                for (k2, z2) in apply_ket(r, shape, &k1, g2) {
                    out.push((k2, z1 * z2));
                }
            }
            out
        }
    }
}

/// Visit every ket that agrees with `ket` outside `[a, b)`.
fn for_each_local(shape: &[SiteType], ket: &Ket, a: usize, b: usize, mut f: impl FnMut(&Ket)) {
    let mut x = ket.clone();
    x[a..b].fill(0);
    loop {
        f(&x);
        let mut s = a;
        loop {
            if s == b {
                return;
            }
            x[s] += 1;
            if x[s] < shape[s].dim() {
                break;
            }
            x[s] = 0;
            s += 1;
        }
    }
}

fn check_expr<T: Scalar>(e: &Expr<T>, shape: &[SiteType]) -> Result<(), SemanticsError> {
    let span = e.span(shape.len())?;
    if span != (0, shape.len()) {
        return Err(IrError::SpanMismatch(format!("expression covers [{},{}) of {} sites", span.0, span.1, shape.len())).into());
    }
    Ok(())
}

/// Apply `e` to a state, extending linearly over kets.
pub fn apply<T: Real>(e: &Expr<T>, shape: &[SiteType], psi: &StateVector<T>) -> Result<StateVector<T>, SemanticsError> {
    check_expr(e, shape)?;
    psi.validate(shape)?;
    let mut acc: BTreeMap<Ket, C<T>> = BTreeMap::new();
    for (ket, z) in psi.kets() {
        for (k2, w) in apply_ket(e, shape, ket, 0) {
            *acc.entry(k2).or_insert_with(C::zero) += z * w;
        }
    }
    Ok(StateVector::from_amps(acc))
}

/// Dense matrix of `e`: column `k` is `e` applied to basis ket `k`.
pub fn to_matrix<T: Real>(e: &Expr<T>, shape: &[SiteType]) -> Result<Dense<T>, SemanticsError> {
    check_expr(e, shape)?;
    let dim = system_dimension(shape)?;
    let mut m = Dense::<T>::zeros(dim, dim);
    for col in 0..dim {
        let ket = index_ket(shape, col);
        for (k2, z) in apply_ket(e, shape, &ket, 0) {
            m[(ket_index(shape, &k2), col)] += z;
        }
    }
    Ok(m)
}

/// Dense column vector of a state.
pub fn state_to_vector<T: Real>(psi: &StateVector<T>, shape: &[SiteType]) -> Result<nalgebra::DVector<C<T>>, SemanticsError> {
    let dim = system_dimension(shape)?;
    psi.validate(shape)?;
    let mut v = nalgebra::DVector::<C<T>>::zeros(dim);
    for (ket, z) in psi.kets() {
        v[ket_index(shape, ket)] += *z;
    }
    Ok(v)
}

/// Sparse state of a dense vector, dropping exact zeros.
pub fn vector_to_state<T: Real>(v: &nalgebra::DVector<C<T>>, shape: &[SiteType]) -> StateVector<T> {
    StateVector::from_amps(v.iter().enumerate().filter(|(_, z)| !z.is_zero()).map(|(k, z)| (index_ket(shape, k), *z)))
}

/// Largest deviation `‖H - H†‖₂`.
pub fn hermitian_deviation<T: Real>(h: &Dense<T>) -> T {
    spectral_norm(&(h - h.adjoint()))
}

/// Largest singular value.
pub fn spectral_norm<T: Real>(m: &Dense<T>) -> T {
    if m.is_empty() {
        return T::zero();
    }
    m.clone().svd(false, false).singular_values.max()
}

/// `exp(-i·r·H)` through the Hermitian eigendecomposition.
pub fn simulate<T: Real>(h: &Dense<T>, r: T) -> Result<Dense<T>, SemanticsError> {
    if !h.is_square() {
        return Err(SemanticsError::DimensionMismatch);
    }
    let dev = hermitian_deviation(h);
    if dev.as_f64() > HERMITIAN_TOL {
        return Err(SemanticsError::NotHermitian(dev.as_f64()));
    }
    let sym = (h + h.adjoint()) * C::new(lit::<T>(0.5), T::zero());
    let eig = sym.symmetric_eigen();
    let v = eig.eigenvectors;
    let phases = Dense::<T>::from_diagonal(&eig.eigenvalues.map(|lam| C::from_polar(T::one(), -(r * lam))));
    Ok(&v * phases * v.adjoint())
}

/// Matrix of a single Pauli letter.
pub fn pauli_matrix<T: Real>(p: Pauli) -> Dense<T> {
    let (o, z, i) = (C::<T>::one(), C::<T>::zero(), C::new(T::zero(), T::one()));
    match p {
        Pauli::I => Dense::from_row_slice(2, 2, &[o, z, z, o]),
        Pauli::X => Dense::from_row_slice(2, 2, &[z, o, o, z]),
        Pauli::Y => Dense::from_row_slice(2, 2, &[z, -i, i, z]),
        Pauli::Z => Dense::from_row_slice(2, 2, &[o, z, z, -o]),
    }
}

/// Image of basis index `col` under a Pauli string: the phase as a power
/// of `i` and the new index. Qubit 0 is the least significant bit.
pub fn pauli_apply_index(p: &PauliString, col: usize) -> (u32, usize) {
    let mut pow = 0u32;
    let mut row = col;
    for (q, op) in p.ops.iter().enumerate() {
        let bit = (col >> q) & 1;
        pow += match (op, bit) {
            (Pauli::Z, 1) => 2,
            (Pauli::Y, 0) => 1,
            (Pauli::Y, 1) => 3,
            _ => 0,
        };
        if matches!(op, Pauli::X | Pauli::Y) {
            row ^= 1 << q;
        }
    }
    (pow % 4, row)
}

/// Matrix of a Pauli string; qubit 0 is the least significant index bit.
pub fn pauli_string_matrix<T: Real>(p: &PauliString) -> Dense<T> {
    let dim = 1usize << p.width();
    let mut m = Dense::<T>::zeros(dim, dim);
    for col in 0..dim {
        let (pow, row) = pauli_apply_index(p, col);
        m[(row, col)] = i_pow::<T>(pow);
    }
    m
}

/// `i^k`.
pub fn i_pow<T: Scalar>(k: u32) -> C<T> {
    match k % 4 {
        0 => re(T::one()),
        1 => C::new(T::zero(), T::one()),
        2 => re(-T::one()),
        _ => C::new(T::zero(), -T::one()),
    }
}

/// Dense matrix of `Σ_j c_j P_j`.
pub fn hamiltonian_matrix<T: Real>(h: &PauliHamiltonian<T>) -> Result<Dense<T>, SemanticsError> {
    if h.width > 10 {
        return Err(IrError::TooLarge { limit: crate::ir::DENSE_LIMIT }.into());
    }
    let dim = 1usize << h.width;
    let mut m = Dense::<T>::zeros(dim, dim);
    for t in &h.terms {
        m += pauli_string_matrix::<T>(&t.string) * re(t.coeff);
    }
    Ok(m)
}

/// Kronecker product `a ⊗ b` where `b` acts on the less significant index.
pub fn kron<T: Real>(a: &Dense<T>, b: &Dense<T>) -> Dense<T> {
    a.kronecker(b)
}
