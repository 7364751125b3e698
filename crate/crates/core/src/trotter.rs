//! Product formulas for `exp(-i·r·H)` over a Pauli Hamiltonian.
//!
//! The standard formula sweeps the terms `m` times with angle `r·c_j/m`.
//! Its bound is the nested-commutator sum over the expanded list of `d·m`
//! scaled terms. QDrift draws `N` terms with probability `|c_j|/λ` from a
//! ChaCha8 stream seeded with a 64-bit seed, each with angle
//! `sign(c_j)·r·λ/N`, and is bounded by `2λ²r²/N`.

use std::collections::BTreeMap;

use num_traits::{Float, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ir::{PauliHamiltonian, PauliString, PauliTerm};
use crate::pauli_canon::string_mul;
use crate::scalar::{lit, Real, Scalar, C};
use crate::semantics::{hamiltonian_matrix, i_pow, pauli_apply_index, simulate, spectral_norm, Dense, SemanticsError};

/// Widest register for which commutator norms are taken on dense matrices.
pub const DENSE_NORM_WIDTH: usize = 10;

/// Budget of dense eigenvalue work before falling back to the triangle
/// inequality, in units of `dim³`.
const DENSE_BUDGET: f64 = 2e8;

/// Largest repetition count tried by [`choose_m`].
pub const MAX_REPETITIONS: usize = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrotterError {
    #[error("Hamiltonian has no terms")]
    Empty,
    #[error("repetition count must be positive")]
    ZeroRepetitions,
    #[error("sample count must be positive")]
    ZeroSamples,
    #[error("error budget {epsilon} is unreachable (dropped terms alone cost {drop_penalty}, best bound {best})")]
    Unreachable { epsilon: f64, drop_penalty: f64, best: f64 },
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

/// One evolution `exp(-i·theta·string)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrotterStep<T = f64> {
    pub theta: T,
    pub string: PauliString,
}

/// Formula that produced a plan.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Algorithm {
    Standard { m: usize },
    Qdrift { samples: usize, seed: u64 },
}

/// Ordered evolutions with their error bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrotterPlan<T = f64> {
    pub width: usize,
    pub algorithm: Algorithm,
    pub steps: Vec<TrotterStep<T>>,
    /// Bound of the formula alone.
    pub bound: T,
    /// Cost of terms dropped before planning.
    pub drop_penalty: T,
}

impl<T: Scalar> TrotterPlan<T> {
    /// `bound + drop_penalty`.
    pub fn total_bound(&self) -> T {
        self.bound.clone() + self.drop_penalty.clone()
    }
}

/// Letters of the non-identity factors, in qubit order.
fn letters(s: &PauliString) -> String {
    s.ops.iter().filter(|p| **p != crate::ir::Pauli::I).map(|p| p.letter()).collect()
}

/// Sweep order: lexicographic by string, then grouped by the first entry of
/// `order` that prefixes the term's non-identity letters. Terms matching no
/// entry come last.
pub fn order_terms<T: Scalar>(h: &PauliHamiltonian<T>, order: &[String]) -> Vec<PauliTerm<T>> {
    let mut terms = h.terms.clone();
    terms.sort_by(|a, b| a.string.cmp(&b.string));
    let rank = |t: &PauliTerm<T>| {
        let l = letters(&t.string);
        order.iter().position(|o| l.starts_with(o.as_str())).unwrap_or(order.len())
    };
    terms.sort_by_key(rank);
    terms
}

/// Commutator `[Σ later, h]` as a complex Pauli sum.
fn commutator<T: Scalar>(later: &[PauliTerm<T>], h: &PauliTerm<T>) -> BTreeMap<PauliString, C<T>> {
    let mut out: BTreeMap<PauliString, C<T>> = BTreeMap::new();
    for t in later {
        if !t.string.anticommutes(&h.string) {
            continue;
        }
        let (ph, s) = string_mul(&t.string, &h.string);
        let two = T::one() + T::one();
        let z = i_pow::<T>(ph as u32) * C::new(two * t.coeff.clone() * h.coeff.clone(), T::zero());
        let slot = out.entry(s).or_insert_with(C::zero);
        *slot = slot.clone() + z;
    }
    out.retain(|_, z| !z.is_zero());
    out
}

fn sum_dense<T: Real>(m: &BTreeMap<PauliString, C<T>>, width: usize) -> Dense<T> {
    let dim = 1usize << width;
    let mut d = Dense::<T>::zeros(dim, dim);
    for (s, z) in m {
        for col in 0..dim {
            let (pow, row) = pauli_apply_index(s, col);
            d[(row, col)] += i_pow::<T>(pow) * z;
        }
    }
    d
}

fn abs_sum<T: Real>(m: &BTreeMap<PauliString, C<T>>) -> T {
    m.values().fold(T::zero(), |a, z| a + z.norm())
}

/// Norm of an anti-Hermitian matrix through the Hermitian `i·A`.
fn anti_hermitian_norm<T: Real>(a: &Dense<T>) -> T {
    if a.is_empty() {
        return T::zero();
    }
    let h = a * C::new(T::zero(), T::one());
    let h = (&h + h.adjoint()) * C::new(lit::<T>(0.5), T::zero());
    h.symmetric_eigen().eigenvalues.iter().fold(T::zero(), |acc, e| Float::max(acc, Float::abs(*e)))
}

/// Nested-commutator bound for `m` sweeps of `terms` in the given order.
///
/// Position `p` of sweep `s` sees the rest of its own sweep plus `m-s-1`
/// full sweeps after it, so its commutator is `(X_p + (m-s-1)·Y_p)/m²` with
/// `X_p = [Σ_{q>p} h_q, h_p]` and `Y_p = [H, h_p]`.
pub fn bound_standard<T: Real>(terms: &[PauliTerm<T>], width: usize, r: T, m: usize) -> T {
    if terms.is_empty() || m == 0 {
        return T::zero();
    }
    let xs: Vec<_> = (0..terms.len()).map(|p| commutator(&terms[p + 1..], &terms[p])).collect();
    let ys: Vec<_> = terms.iter().map(|h| commutator(terms, h)).collect();
    let dim = (1usize << width.min(63)) as f64;
    let dense = width <= DENSE_NORM_WIDTH && dim.powi(3) * (terms.len() * m) as f64 <= DENSE_BUDGET;
    let mut total = T::zero();
    for p in 0..terms.len() {
        if xs[p].is_empty() && ys[p].is_empty() {
            continue;
        }
        if dense {
            let (x, y) = (sum_dense(&xs[p], width), sum_dense(&ys[p], width));
            for s in 0..m {
                let c = lit::<T>((m - s - 1) as f64);
                total += anti_hermitian_norm(&(&x + &y * C::new(c, T::zero())));
            }
        } else {
            let (x, y) = (abs_sum(&xs[p]), abs_sum(&ys[p]));
            let reps = lit::<T>(m as f64);
            let later = lit::<T>((m * (m - 1) / 2) as f64);
            total += x * reps + y * later;
        }
    }
    let mf = lit::<T>(m as f64);
    r * r / lit::<T>(2.0) * total / (mf * mf)
}

/// `2λ²r²/N`.
pub fn bound_qdrift<T: Scalar>(h: &PauliHamiltonian<T>, r: T, samples: usize) -> T {
    let lam = h.lambda();
    let two = T::one() + T::one();
    two * lam.clone() * lam * r.clone() * r / T::from_usize(samples)
}

/// `|r|·‖Σ dropped‖`, ignoring identity strings, which only shift the
/// global phase.
pub fn drop_penalty<T: Real>(dropped: &PauliHamiltonian<T>, r: T) -> T {
    let rest = PauliHamiltonian {
        width: dropped.width,
        terms: dropped.terms.iter().filter(|t| !t.string.is_identity()).cloned().collect(),
    };
    if rest.terms.is_empty() {
        return T::zero();
    }
    let norm = match hamiltonian_matrix(&rest) {
        Ok(d) => spectral_norm(&d),
        Err(_) => rest.lambda(),
    };
    Float::abs(r) * norm
}

/// Standard plan over `terms` in the given order.
pub fn plan_standard<T: Real>(
    width: usize,
    terms: &[PauliTerm<T>],
    r: T,
    m: usize,
    drop_penalty: T,
) -> Result<TrotterPlan<T>, TrotterError> {
    if terms.is_empty() {
        return Err(TrotterError::Empty);
    }
    if m == 0 {
        return Err(TrotterError::ZeroRepetitions);
    }
    let mf = lit::<T>(m as f64);
    let sweep: Vec<TrotterStep<T>> = terms.iter().map(|t| TrotterStep { theta: r * t.coeff / mf, string: t.string.clone() }).collect();
    let steps = (0..m).flat_map(|_| sweep.iter().cloned()).collect();
    Ok(TrotterPlan {
        width,
        algorithm: Algorithm::Standard { m },
        steps,
        bound: bound_standard(terms, width, r, m),
        drop_penalty,
    })
}

/// QDrift plan with a deterministic sample stream.
pub fn plan_qdrift<T: Real>(
    h: &PauliHamiltonian<T>,
    r: T,
    samples: usize,
    seed: u64,
    drop_penalty: T,
) -> Result<TrotterPlan<T>, TrotterError> {
    if h.terms.is_empty() {
        return Err(TrotterError::Empty);
    }
    if samples == 0 {
        return Err(TrotterError::ZeroSamples);
    }
    let lam = h.lambda();
    let weights: Vec<f64> = h.terms.iter().map(|t| Float::abs(t.coeff).as_f64()).collect();
    let total: f64 = weights.iter().sum();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let angle = r * lam / lit::<T>(samples as f64);
    let steps = (0..samples)
        .map(|_| {
            let u: f64 = rng.gen::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = weights.len() - 1;
            for (j, w) in weights.iter().enumerate() {
                acc += w;
                if u < acc {
                    pick = j;
                    break;
                }
            }
            let t = &h.terms[pick];
            let theta = if t.coeff < T::zero() { -angle } else { angle };
            TrotterStep { theta, string: t.string.clone() }
        })
        .collect();
    Ok(TrotterPlan {
        width: h.width,
        algorithm: Algorithm::Qdrift { samples, seed },
        steps,
        bound: bound_qdrift(h, r, samples),
        drop_penalty,
    })
}

/// Smallest `m` with `bound_standard + drop_penalty ≤ epsilon`.
///
/// Searches by doubling and bisection, then confirms `m-1` fails; if that
/// check shows the bound is not monotone it rescans linearly from 1.
pub fn choose_m<T: Real>(terms: &[PauliTerm<T>], width: usize, r: T, epsilon: T, drop_penalty: T) -> Result<usize, TrotterError> {
    let ok = |m: usize| bound_standard(terms, width, r, m) + drop_penalty <= epsilon;
    if ok(1) {
        return Ok(1);
    }
    let unreachable = || TrotterError::Unreachable {
        epsilon: epsilon.as_f64(),
        drop_penalty: drop_penalty.as_f64(),
        best: (bound_standard(terms, width, r, MAX_REPETITIONS) + drop_penalty).as_f64(),
    };
    if drop_penalty > epsilon {
        return Err(unreachable());
    }
    let mut hi = 2;
    while !ok(hi) {
        if hi >= MAX_REPETITIONS {
            return Err(unreachable());
        }
        hi *= 2;
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    if hi > 1 && ok(hi - 1) {
        return Ok((1..hi).find(|&m| ok(m)).unwrap_or(hi));
    }
    Ok(hi)
}

/// Left-multiply `u` by `exp(-i·theta·P) = cos θ·I - i·sin θ·P`.
pub fn apply_step<T: Real>(u: &mut Dense<T>, theta: T, string: &PauliString) {
    let (c, s) = (Float::cos(theta), Float::sin(theta));
    let dim = u.nrows();
    let mut pu = Dense::<T>::zeros(dim, u.ncols());
    for row in 0..dim {
        let (pow, target) = pauli_apply_index(string, row);
        let ph = i_pow::<T>(pow);
        for col in 0..u.ncols() {
            pu[(target, col)] = ph * u[(row, col)];
        }
    }
    *u = &*u * C::new(c, T::zero()) - pu * C::new(T::zero(), s);
}

/// Dense product of a plan's evolutions, first step applied first.
pub fn plan_unitary<T: Real>(plan: &TrotterPlan<T>) -> Dense<T> {
    let mut u = Dense::<T>::identity(1 << plan.width, 1 << plan.width);
    for st in &plan.steps {
        apply_step(&mut u, st.theta, &st.string);
    }
    u
}

/// Outcome of the statistical QDrift check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QdriftCheck {
    pub seeds: usize,
    /// Worst trace distance over basis inputs between the averaged sampled
    /// channel and the exact evolution.
    pub distance: f64,
    pub bound: f64,
    /// Standard error of the per-seed worst trace distance.
    pub sigma: f64,
    pub pass: bool,
}

fn trace_norm<T: Real>(m: &Dense<T>) -> T {
    let h = (m + m.adjoint()) * C::new(lit::<T>(0.5), T::zero());
    h.symmetric_eigen().eigenvalues.iter().fold(T::zero(), |a, e| a + Float::abs(*e))
}

/// Average the sampled channels of `seeds` QDrift plans and compare with
/// the exact channel on every computational basis input.
pub fn qdrift_channel_check<T: Real>(
    h: &PauliHamiltonian<T>,
    r: T,
    samples: usize,
    seeds: std::ops::Range<u64>,
) -> Result<QdriftCheck, TrotterError> {
    let exact = simulate(&hamiltonian_matrix(h)?, r)?;
    let dim = 1usize << h.width;
    let count = (seeds.end - seeds.start) as usize;
    let mut avg: Vec<Dense<T>> = vec![Dense::<T>::zeros(dim, dim); dim];
    let mut per_seed = Vec::with_capacity(count);
    let inv = lit::<T>(1.0 / count as f64);
    let half = lit::<T>(0.5);
    for seed in seeds {
        let plan = plan_qdrift(h, r, samples, seed, T::zero())?;
        let u = plan_unitary(&plan);
        let mut worst = T::zero();
        for (b, acc) in avg.iter_mut().enumerate() {
            let col = u.column(b);
            let rho = col * col.adjoint();
            let ex = exact.column(b);
            let rho_exact = ex * ex.adjoint();
            worst = Float::max(worst, trace_norm(&(&rho - rho_exact)) * half);
            *acc += rho * C::new(inv, T::zero());
        }
        per_seed.push(worst.as_f64());
    }
    let mut distance = 0.0f64;
    for (b, acc) in avg.iter().enumerate() {
        let ex = exact.column(b);
        let rho_exact = ex * ex.adjoint();
        distance = distance.max((trace_norm(&(acc - rho_exact)) * half).as_f64());
    }
    let mean = per_seed.iter().sum::<f64>() / count as f64;
    let var = per_seed.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (count.max(2) - 1) as f64;
    let sigma = (var / count as f64).sqrt();
    let bound = bound_qdrift(h, r, samples).as_f64();
    Ok(QdriftCheck { seeds: count, distance, bound, sigma, pass: distance <= bound + 3.0 * sigma })
}
