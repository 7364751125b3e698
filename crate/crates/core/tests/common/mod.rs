//! Seeded generators shared by the integration tests.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use sqc::ir::{Expr, Pauli, PauliHamiltonian, PauliString, SiteType, StateVector};
use sqc::parser::scale;
use sqc::scalar::C;
use sqc::typecheck::infer;

/// Random shape of `1..=max_sites` sites; bosons get dimensions `2..=max_dim`.
pub fn shape(rng: &mut ChaCha8Rng, max_sites: usize, fermions_only: bool, max_dim: usize) -> Vec<SiteType> {
    let n = rng.gen_range(1..=max_sites);
    (0..n)
        .map(|_| {
            if fermions_only || rng.gen_bool(0.5) {
                SiteType::Fermion
            } else {
                SiteType::Boson(rng.gen_range(2..=max_dim))
            }
        })
        .collect()
}

/// Complex amplitude with components in `[-1, 1]`.
pub fn amp(rng: &mut ChaCha8Rng) -> C<f64> {
    C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Composition word of up to three ladders on `site`; the empty word is the
/// identity.
pub fn word(rng: &mut ChaCha8Rng, site: usize) -> Expr<f64> {
    let len = rng.gen_range(0..=3);
    let atoms: Vec<Expr<f64>> = (0..len).map(|_| if rng.gen_bool(0.5) { Expr::a(site) } else { Expr::adag(site) }).collect();
    Expr::compose_all(atoms).unwrap_or_else(|| Expr::id(site))
}

/// Tensor chain over the whole shape with a random word per site and a
/// random overall amplitude.
pub fn term(rng: &mut ChaCha8Rng, shape: &[SiteType]) -> Expr<f64> {
    let chain = Expr::tensor_all((0..shape.len()).map(|s| word(rng, s))).expect("non-empty shape");
    let chain = if rng.gen_bool(0.2) { Expr::dagger(chain) } else { chain };
    let z = amp(rng);
    scale(chain.clone(), &z, shape).unwrap_or(chain)
}

/// Random expression: a sum of one to three terms, sometimes composed with
/// another term.
pub fn expr(rng: &mut ChaCha8Rng, shape: &[SiteType]) -> Expr<f64> {
    let n = rng.gen_range(1..=3);
    let mut e = Expr::sum_all((0..n).map(|_| term(rng, shape))).expect("at least one term");
    if rng.gen_bool(0.3) {
        e = Expr::compose(term(rng, shape), e);
    }
    e
}

/// Random well-typed expression, retrying until the typechecker accepts.
pub fn typed_expr(rng: &mut ChaCha8Rng, shape: &[SiteType]) -> Expr<f64> {
    loop {
        let e = expr(rng, shape);
        if infer(&e, shape).is_ok() {
            return e;
        }
    }
}

/// Random superposition of one to four basis kets.
pub fn state(rng: &mut ChaCha8Rng, shape: &[SiteType]) -> StateVector<f64> {
    let n = rng.gen_range(1..=4);
    StateVector::from_amps((0..n).map(|_| {
        let ket = shape.iter().map(|s| rng.gen_range(0..s.dim())).collect();
        (ket, amp(rng))
    }))
}

/// Random Pauli string of the given width with locality in `1..=max_locality`.
pub fn pauli_string(rng: &mut ChaCha8Rng, width: usize, max_locality: usize) -> PauliString {
    let k = rng.gen_range(1..=max_locality.min(width));
    let mut sites: Vec<usize> = (0..width).collect();
    for i in 0..k {
        let j = rng.gen_range(i..width);
        sites.swap(i, j);
    }
    let pairs: Vec<(usize, Pauli)> = sites[..k].iter().map(|&q| (q, [Pauli::X, Pauli::Y, Pauli::Z][rng.gen_range(0..3)])).collect();
    PauliString::from_pairs(width, &pairs)
}

/// Random Hamiltonian of up to `max_terms` distinct strings on `width` qubits.
pub fn hamiltonian(rng: &mut ChaCha8Rng, width: usize, max_terms: usize, max_locality: usize) -> PauliHamiltonian<f64> {
    let n = rng.gen_range(1..=max_terms);
    let mut h = PauliHamiltonian::new(width);
    for _ in 0..n {
        let s = pauli_string(rng, width, max_locality);
        if h.coeff_of(&s).is_none() {
            h.insert(rng.gen_range(-1.0..1.0), s).expect("width matches");
        }
    }
    h
}
