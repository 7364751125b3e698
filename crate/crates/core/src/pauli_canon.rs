//! Pauli canonical form: a real-weighted sum of distinct Pauli strings.
//!
//! Qubit expressions are expanded into phased Pauli sums, multiplied
//! position-wise through the single-qubit product table, and merged. Phases
//! are tracked as powers of `i`, so any imaginary residue in a coefficient
//! comes from the input amplitudes.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::ir::{Pauli, PauliHamiltonian, PauliString};
use crate::rewrite::MERGE_TOL;
use crate::scalar::{c_negligible, Scalar, C};
use crate::semantics::i_pow;
use crate::transform::{LocalOp, QubitExpr};

/// Largest imaginary part tolerated before truncating to a real coefficient.
pub const REAL_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CanonError {
    #[error("coefficient of {string} has imaginary part {imag:e}; the input is not Hermitian")]
    NonRealResidual { string: String, imag: f64 },
    #[error("qubit {qubit} is outside a register of width {width}")]
    QubitOutOfRange { qubit: usize, width: usize },
}

/// A Pauli with a phase `i^phase`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PhasedPauli {
    /// Exponent of `i`, in `0..4`.
    pub phase: u8,
    pub op: Pauli,
}

/// Product `p·q` of two single-qubit Paulis.
pub fn pauli_mul(p: Pauli, q: Pauli) -> PhasedPauli {
    use Pauli::*;
    let (phase, op) = match (p, q) {
        (I, o) | (o, I) => (0, o),
        (a, b) if a == b => (0, I),
        (X, Y) => (1, Z),
        (Y, X) => (3, Z),
        (Y, Z) => (1, X),
        (Z, Y) => (3, X),
        (Z, X) => (1, Y),
        (X, Z) => (3, Y),
        _ => unreachable!(),
    };
    PhasedPauli { phase, op }
}

/// Product of two strings of equal width, with the accumulated phase.
pub fn string_mul(a: &PauliString, b: &PauliString) -> (u8, PauliString) {
    let mut phase = 0u8;
    let ops = a
        .ops
        .iter()
        .zip(&b.ops)
        .map(|(&p, &q)| {
            let r = pauli_mul(p, q);
            phase = (phase + r.phase) % 4;
            r.op
        })
        .collect();
    (phase, PauliString { ops })
}

/// Complex-weighted Pauli sum used during expansion.
pub type PauliSum<T> = BTreeMap<PauliString, C<T>>;

fn add_into<T: Scalar>(acc: &mut PauliSum<T>, s: PauliString, z: C<T>) {
    let slot = acc.entry(s).or_insert_with(C::zero);
    *slot = slot.clone() + z;
}

fn prune<T: Scalar>(mut m: PauliSum<T>) -> PauliSum<T> {
    m.retain(|_, z| !c_negligible(z, MERGE_TOL));
    m
}

fn local_sum<T: Scalar>(width: usize, q: usize, op: LocalOp) -> PauliSum<T> {
    let half = T::half();
    let re = |x: T| C::new(x, T::zero());
    let im = |x: T| C::new(T::zero(), x);
    let s = |p| PauliString::single(width, q, p);
    let pairs: Vec<(PauliString, C<T>)> = match op {
        LocalOp::Pauli(p) => vec![(s(p), C::one())],
        LocalOp::Lower => vec![(s(Pauli::X), re(half.clone())), (s(Pauli::Y), im(half))],
        LocalOp::Raise => vec![(s(Pauli::X), re(half.clone())), (s(Pauli::Y), im(-half))],
        LocalOp::Vacant => vec![(s(Pauli::I), re(half.clone())), (s(Pauli::Z), re(half))],
        LocalOp::Occupied => vec![(s(Pauli::I), re(half.clone())), (s(Pauli::Z), re(-half))],
    };
    pairs.into_iter().collect()
}

fn product<T: Scalar>(a: &PauliSum<T>, b: &PauliSum<T>) -> PauliSum<T> {
    let mut out = PauliSum::new();
    for (sa, za) in a {
        for (sb, zb) in b {
            let (ph, s) = string_mul(sa, sb);
            add_into(&mut out, s, za.clone() * zb.clone() * i_pow::<T>(ph as u32));
        }
    }
    prune(out)
}

/// Expand a qubit expression into a complex Pauli sum.
pub fn expand<T: Scalar>(e: &QubitExpr<T>, width: usize) -> Result<PauliSum<T>, CanonError> {
    Ok(match e {
        QubitExpr::Identity => PauliSum::from([(PauliString::identity(width), C::one())]),
        QubitExpr::Local { qubit, op } => {
            if *qubit >= width {
                return Err(CanonError::QubitOutOfRange { qubit: *qubit, width });
            }
            local_sum(width, *qubit, *op)
        }
        QubitExpr::Scaled { amp, inner } => {
            let mut m = expand(inner, width)?;
            for z in m.values_mut() {
                *z = z.clone() * amp.clone();
            }
            prune(m)
        }
        QubitExpr::Sum(items) => {
            let mut acc = PauliSum::new();
            for it in items {
                for (s, z) in expand(it, width)? {
                    add_into(&mut acc, s, z);
                }
            }
            prune(acc)
        }
        QubitExpr::Compose(items) => {
            let mut acc = PauliSum::from([(PauliString::identity(width), C::one())]);
            for it in items {
                acc = product(&acc, &expand(it, width)?);
            }
            acc
        }
    })
}

/// Pauli canonical form of a Hermitian qubit expression on `width` qubits.
pub fn canonicalize<T: Scalar>(e: &QubitExpr<T>, width: usize) -> Result<PauliHamiltonian<T>, CanonError> {
    let sum = expand(e, width)?;
    let mut h = PauliHamiltonian::new(width);
    for (s, z) in sum {
        if !T::is_negligible(&z.im, REAL_TOL) {
            return Err(CanonError::NonRealResidual { string: s.to_string(), imag: z.im.as_f64() });
        }
        h.terms.push(crate::ir::PauliTerm { coeff: z.re, string: s });
    }
    Ok(h)
}

/// Whether a term is dropped by `--drop-trivial`: the identity string or a
/// single Z.
pub fn is_trivial(s: &PauliString) -> bool {
    s.is_identity() || (s.locality() == 1 && s.ops.contains(&Pauli::Z))
}

/// Split into kept and dropped terms under the drop-trivial policy.
pub fn split_trivial<T: Scalar>(h: &PauliHamiltonian<T>) -> (PauliHamiltonian<T>, PauliHamiltonian<T>) {
    let (dropped, kept): (Vec<_>, Vec<_>) = h.terms.iter().cloned().partition(|t| is_trivial(&t.string));
    (
        PauliHamiltonian { width: h.width, terms: kept },
        PauliHamiltonian { width: h.width, terms: dropped },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;
    use crate::rewrite::dag_canonicalize;
    use crate::scalar::Rational;
    use crate::semantics::{hamiltonian_matrix, pauli_matrix, to_matrix, Dense};
    use crate::transform::{qubit_matrix, transform_expr};
    use num_complex::Complex;

    fn ps(t: &str) -> PauliString {
        PauliString::parse(t).unwrap()
    }

    #[test]
    fn table_matches_matrices() {
        for p in Pauli::ALL {
            for q in Pauli::ALL {
                let r = pauli_mul(p, q);
                let lhs: Dense<f64> = pauli_matrix::<f64>(p) * pauli_matrix::<f64>(q);
                let rhs = pauli_matrix::<f64>(r.op) * i_pow::<f64>(r.phase as u32);
                assert_eq!(lhs, rhs, "{p:?}{q:?}");
            }
        }
        assert_eq!(pauli_mul(Pauli::X, Pauli::Y), PhasedPauli { phase: 1, op: Pauli::Z });
        assert_eq!(pauli_mul(Pauli::Z, Pauli::Z), PhasedPauli { phase: 0, op: Pauli::I });
    }

    #[test]
    fn number_operator_and_square() {
        let n1 = QubitExpr::<Rational>::Local { qubit: 0, op: LocalOp::Occupied };
        let h = canonicalize(&n1, 1).unwrap();
        let half = Rational::new(1, 2);
        assert_eq!(h.coeff_of(&ps("I")), Some(&half));
        assert_eq!(h.coeff_of(&ps("Z")), Some(&-half));
        let xx = QubitExpr::<f64>::Compose(vec![
            QubitExpr::Local { qubit: 0, op: LocalOp::Pauli(Pauli::X) },
            QubitExpr::Local { qubit: 0, op: LocalOp::Pauli(Pauli::X) },
        ]);
        let h = canonicalize(&xx, 1).unwrap();
        assert_eq!(h.terms.len(), 1);
        assert_eq!(h.coeff_of(&ps("I")), Some(&1.0));
    }

    #[test]
    fn hubbard_terms_exact() {
        let p = parse::<Rational>(
            "sites [fermion, fermion]; H = -1*(adag(0).a(1) + adag(1).a(0)) + 2*(n1(0).n1(1))",
        )
        .unwrap();
        let c = dag_canonicalize(&p.hamiltonian, &p.shape).unwrap();
        let (q, layout) = transform_expr(&c, &p.shape).unwrap();
        let h = canonicalize(&q, layout.width).unwrap();
        let r = |n, d| Rational::new(n, d);
        let expect = [("II", r(1, 2)), ("IZ", r(-1, 2)), ("XX", r(-1, 2)), ("YY", r(-1, 2)), ("ZI", r(-1, 2)), ("ZZ", r(1, 2))];
        assert_eq!(h.terms.len(), 6);
        for (t, (s, c)) in h.terms.iter().zip(expect) {
            assert_eq!(t.string, ps(s));
            assert_eq!(t.coeff, c);
        }
        let (kept, dropped) = split_trivial(&h);
        let names: Vec<String> = kept.terms.iter().map(|t| t.string.to_string()).collect();
        assert_eq!(names, vec!["XX", "YY", "ZZ"]);
        assert_eq!(dropped.terms.len(), 3);
    }

    #[test]
    fn dense_agreement() {
        let p = parse::<f64>("sites [fermion, boson(4), fermion]; H = adag(0).a(2) + adag(2).a(0) + 0.3*(adag(1).a(1)) + 0.25*(a(1) + adag(1)).n1(2)").unwrap();
        let c = dag_canonicalize(&p.hamiltonian, &p.shape).unwrap();
        let (q, layout) = transform_expr(&c, &p.shape).unwrap();
        let h = canonicalize(&q, layout.width).unwrap();
        let dense = hamiltonian_matrix(&h).unwrap();
        let direct = qubit_matrix(&q, layout.width);
        assert!((dense - direct).iter().all(|z| z.norm() < 1e-12));
        // The source matrix and the encoded one share a spectrum here since
        // Boson(4) fills its two qubits.
        let src = to_matrix(&p.hamiltonian, &p.shape).unwrap();
        let tr_src: Complex<f64> = src.trace();
        let tr_q: Complex<f64> = hamiltonian_matrix(&h).unwrap().trace();
        assert!((tr_src - tr_q).norm() < 1e-12);
    }

    #[test]
    fn non_hermitian_input_is_reported() {
        let q = QubitExpr::<f64>::Scaled { amp: Complex::new(0.0, 1.0), inner: Box::new(QubitExpr::Identity) };
        assert!(matches!(canonicalize(&q, 1), Err(CanonError::NonRealResidual { .. })));
    }
}
