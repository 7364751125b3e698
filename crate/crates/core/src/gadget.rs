//! Perturbative gadget reduction of k-local Pauli Hamiltonians to two-local
//! ones.
//!
//! Each term `r_j P_j` with locality above two gets a register of `k_j`
//! ancilla qubits, one per support site. The register carries the
//! ferromagnetic penalty `½ Σ_{m<n} (I - Z_m Z_n)` and couples back to the
//! system through `λ Σ_n r_{j,n} P_{j,n} X_n`, where only the first
//! coupling carries the term coefficient. Terms of locality at most two are
//! passed through unchanged.

use std::collections::HashMap;

use nalgebra::DVector;
use num_traits::{Float, Zero};
use thiserror::Error;

use crate::ir::{Pauli, PauliHamiltonian, PauliString, PauliTerm};
use crate::scalar::{lit, Real, Scalar, C};
use crate::semantics::{hamiltonian_matrix, i_pow, pauli_apply_index, Dense, SemanticsError};

/// Largest total width accepted by the dense trend check.
pub const TREND_WIDTH_LIMIT: usize = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GadgetError {
    #[error("coupling λ = {lambda} exceeds λ_max = {lambda_max}")]
    LambdaTooLarge { lambda: f64, lambda_max: f64 },
    #[error("coupling λ must be positive, got {0}")]
    NonPositiveLambda(f64),
    #[error("trend check needs at most {TREND_WIDTH_LIMIT} qubits, got {0}")]
    TooLarge(usize),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

/// Ancilla register built for one source term.
#[derive(Clone, Debug, PartialEq)]
pub struct GadgetRegister<T = f64> {
    /// Index of the source term in the input Hamiltonian.
    pub source: usize,
    /// System qubits of the source term, ascending.
    pub support: Vec<usize>,
    /// Ancilla qubit paired with each support site.
    pub ancillas: Vec<usize>,
    /// Ferromagnetic penalty on the ancillas.
    pub anc: PauliHamiltonian<T>,
    /// System-ancilla couplings before scaling by λ.
    pub couplings: PauliHamiltonian<T>,
}

/// Result of [`gadgetize`].
#[derive(Clone, Debug, PartialEq)]
pub struct GadgetOutput<T = f64> {
    /// The two-local Hamiltonian over system and ancilla qubits.
    pub hamiltonian: PauliHamiltonian<T>,
    /// Ancilla qubits per source term; empty for passed-through terms.
    pub ancilla_map: Vec<Vec<usize>>,
    pub registers: Vec<GadgetRegister<T>>,
    /// Coupling used; zero when no term needed a gadget.
    pub lambda: T,
    /// Upper limit on λ; `None` when no term needed a gadget.
    pub lambda_max: Option<T>,
}

fn widen(s: &PauliString, width: usize) -> PauliString {
    let mut ops = s.ops.clone();
    ops.resize(width, Pauli::I);
    PauliString { ops }
}

/// `(k-1)/4 · (Σ|r_j| + N(k-1))^{-1}` with `k` the largest locality above
/// two and the sum and `N` over all terms, or `None` if the input is
/// already two-local.
pub fn lambda_max<T: Scalar>(h: &PauliHamiltonian<T>) -> Option<T> {
    let k = h.terms.iter().map(|t| t.string.locality()).filter(|&l| l > 2).max()?;
    let km1 = T::from_usize(k - 1);
    let n = T::from_usize(h.terms.len());
    Some(km1.clone() / T::from_usize(4) / (h.lambda() + n * km1))
}

/// Reduce `h` to a two-local Hamiltonian. `lambda` defaults to `λ_max / 2`.
pub fn gadgetize<T: Scalar>(h: &PauliHamiltonian<T>, lambda: Option<T>) -> Result<GadgetOutput<T>, GadgetError> {
    let lmax = lambda_max(h);
    let lambda = match (&lmax, lambda) {
        (None, l) => l.unwrap_or_else(T::zero),
        (Some(m), None) => m.clone() * T::half(),
        (Some(m), Some(l)) => {
            if l <= T::zero() {
                return Err(GadgetError::NonPositiveLambda(l.as_f64()));
            }
            if &l > m {
                return Err(GadgetError::LambdaTooLarge { lambda: l.as_f64(), lambda_max: m.as_f64() });
            }
            l
        }
    };
    let extra: usize = h.terms.iter().map(|t| t.string.locality()).filter(|&l| l > 2).sum();
    let width = h.width + extra;
    let mut next = h.width;
    let mut all: Vec<(T, PauliString)> = Vec::new();
    let mut registers = Vec::new();
    let mut ancilla_map = Vec::with_capacity(h.terms.len());
    for (j, t) in h.terms.iter().enumerate() {
        let support = t.string.support();
        if support.len() <= 2 {
            all.push((t.coeff.clone(), widen(&t.string, width)));
            ancilla_map.push(Vec::new());
            continue;
        }
        let ancillas: Vec<usize> = (next..next + support.len()).collect();
        next += support.len();
        let mut anc = Vec::new();
        for m in 0..ancillas.len() {
            for n in m + 1..ancillas.len() {
                anc.push((T::half(), PauliString::identity(width)));
                anc.push((-T::half(), PauliString::from_pairs(width, &[(ancillas[m], Pauli::Z), (ancillas[n], Pauli::Z)])));
            }
        }
        let couplings: Vec<(T, PauliString)> = support
            .iter()
            .zip(&ancillas)
            .enumerate()
            .map(|(n, (&s, &a))| {
                let r = if n == 0 { t.coeff.clone() } else { T::one() };
                (r, PauliString::from_pairs(width, &[(s, t.string.ops[s]), (a, Pauli::X)]))
            })
            .collect();
        all.extend(anc.iter().cloned());
        all.extend(couplings.iter().map(|(r, s)| (lambda.clone() * r.clone(), s.clone())));
        let build = |v: Vec<(T, PauliString)>| PauliHamiltonian::from_terms(width, v).expect("width is uniform");
        registers.push(GadgetRegister { source: j, support, ancillas: ancillas.clone(), anc: build(anc), couplings: build(couplings) });
        ancilla_map.push(ancillas);
    }
    Ok(GadgetOutput {
        hamiltonian: PauliHamiltonian::from_terms(width, all).expect("width is uniform"),
        ancilla_map,
        registers,
        lambda,
        lambda_max: lmax,
    })
}

/// Low-energy agreement of a gadget with its target.
///
/// Every register's `X^{⊗k}` commutes with the gadget Hamiltonian. In the
/// sector where each register has eigenvalue `(-1)^{k-1}` the effective
/// low-energy Hamiltonian is proportional to the target. The check takes
/// the lowest state in that sector, traces out the ancillas and returns the
/// Frobenius distance between the reduced state and its normalized
/// projection onto the target ground space.
pub fn sector_ground_gap<T: Real>(target: &PauliHamiltonian<T>, out: &GadgetOutput<T>) -> Result<T, GadgetError> {
    let n = target.width;
    let w = out.hamiltonian.width;
    if w > TREND_WIDTH_LIMIT {
        return Err(GadgetError::TooLarge(w));
    }
    let regs: Vec<(usize, usize, T)> = out
        .registers
        .iter()
        .map(|r| {
            let mask: usize = r.ancillas.iter().map(|&a| 1 << a).sum();
            let sign = if r.ancillas.len() % 2 == 1 { T::one() } else { -T::one() };
            (mask, 1usize << r.ancillas[0], sign)
        })
        .collect();
    // Representative of an index: every register's first ancilla bit cleared.
    let canon = |mut idx: usize| -> (usize, T) {
        let mut s = T::one();
        for &(mask, first, sign) in &regs {
            if idx & first != 0 {
                idx ^= mask;
                s *= sign;
            }
        }
        (idx, s)
    };
    let reps: Vec<usize> = (0..1usize << w).filter(|&i| canon(i).0 == i).collect();
    let pos: HashMap<usize, usize> = reps.iter().enumerate().map(|(k, &r)| (r, k)).collect();
    let norm = Float::sqrt(lit::<T>((1usize << regs.len()) as f64));
    let expand = |rep: usize| -> Vec<(usize, T)> {
        let mut v = vec![(rep, T::one())];
        for &(mask, _, sign) in &regs {
            v = v.into_iter().flat_map(|(i, c)| [(i, c), (i ^ mask, c * sign)]).collect();
        }
        v.into_iter().map(|(i, c)| (i, c / norm)).collect()
    };
    let dim = reps.len();
    let mut hs = Dense::<T>::zeros(dim, dim);
    for (b, &rep) in reps.iter().enumerate() {
        for (idx, c) in expand(rep) {
            for t in &out.hamiltonian.terms {
                let (pow, row) = pauli_apply_index(&t.string, idx);
                let (r, s) = canon(row);
                hs[(pos[&r], b)] += i_pow::<T>(pow) * C::new(c * t.coeff * s / norm, T::zero());
            }
        }
    }
    let eig = ((&hs + hs.adjoint()) * C::new(lit::<T>(0.5), T::zero())).symmetric_eigen();
    let lowest = eig.eigenvalues.imin();
    let v = eig.eigenvectors.column(lowest);
    let mut psi = DVector::<C<T>>::zeros(1usize << w);
    for (a, &rep) in reps.iter().enumerate() {
        for (idx, c) in expand(rep) {
            psi[idx] += v[a] * C::new(c, T::zero());
        }
    }
    let sys = 1usize << n;
    let mut rho = Dense::<T>::zeros(sys, sys);
    for anc in 0..(1usize << (w - n)) {
        for s in 0..sys {
            let zs = psi[(anc << n) | s];
            if zs.is_zero() {
                continue;
            }
            for s2 in 0..sys {
                rho[(s, s2)] += zs * psi[(anc << n) | s2].conj();
            }
        }
    }
    let ht = hamiltonian_matrix(target)?;
    let te = ht.symmetric_eigen();
    let e0 = te.eigenvalues.min();
    let mut proj = Dense::<T>::zeros(sys, sys);
    for (k, &e) in te.eigenvalues.iter().enumerate() {
        if (e - e0).as_f64().abs() <= 1e-9 {
            let col = te.eigenvectors.column(k);
            proj += col * col.adjoint();
        }
    }
    let inside = &proj * &rho * &proj;
    let weight = inside.trace().re;
    if weight <= T::zero() {
        return Ok(rho.norm());
    }
    Ok((rho - inside * C::new(T::one() / weight, T::zero())).norm())
}

/// Whether every term acts on at most two qubits.
pub fn is_two_local<T>(h: &PauliHamiltonian<T>) -> bool {
    h.terms.iter().all(|t: &PauliTerm<T>| t.string.locality() <= 2)
}
