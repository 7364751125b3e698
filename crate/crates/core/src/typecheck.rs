//! Kind inference for operator expressions.
//!
//! Leaves are plain (ladders) or Hermitian (identities). Sums and tensors
//! take the join of their operand kinds, daggers keep the kind, and a
//! composition of two Hermitian operands is only known to be plain. A tensor
//! of two Hermitian operands stays Hermitian unless both sides contain odd
//! fermionic parity, in which case the exchange sign can break Hermiticity.
//! Whenever a sum, composition or tensor ends up plain, the node is promoted
//! to Hermitian if it equals its own adjoint in canonical form.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::ir::{Expr, IrError, Kind, SiteType};
use crate::rewrite::{canonical_eq, dag_canonicalize, dag_canonicalize_adjoint, first_mismatch, MATCH_TOL};
use crate::scalar::{c_literal, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TypeError {
    #[error("kind mismatch: cannot join {left} with {right}")]
    KindMismatch { left: Kind, right: Kind },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("Hamiltonian is not Hermitian; term without a matching adjoint: {witness}")]
    NotHermitian { witness: String },
}

impl From<IrError> for TypeError {
    fn from(e: IrError) -> Self {
        TypeError::ShapeMismatch(e.to_string())
    }
}

/// `ι ⊢ e ▷ F^ζ(ι)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeJudgment {
    pub shape: Vec<SiteType>,
    pub kind: Kind,
}

struct Info {
    kind: Kind,
    /// Fermionic ladder parities that occur among the summands.
    parities: BTreeSet<u8>,
}

fn combine(a: &BTreeSet<u8>, b: &BTreeSet<u8>) -> BTreeSet<u8> {
    a.iter().flat_map(|x| b.iter().map(move |y| (x + y) % 2)).collect()
}

fn promote<T: Scalar>(kind: Kind, e: &Expr<T>, shape: &[SiteType]) -> Kind {
    if kind == Kind::Plain && check_hermitian(e, shape) {
        Kind::Hermitian
    } else {
        kind
    }
}

fn join(l: Kind, r: Kind) -> Result<Kind, TypeError> {
    l.join(r).ok_or(TypeError::KindMismatch { left: l, right: r })
}

fn infer_rec<T: Scalar>(e: &Expr<T>, shape: &[SiteType]) -> Result<Info, TypeError> {
    Ok(match e {
        Expr::Annihilate { site, .. } => {
            Info { kind: Kind::Plain, parities: BTreeSet::from([u8::from(shape[*site].is_fermion())]) }
        }
        Expr::Identity { .. } => Info { kind: Kind::Hermitian, parities: BTreeSet::from([0]) },
        Expr::Dagger(inner) => infer_rec(inner, shape)?,
        Expr::Sum(l, r) => {
            let (a, b) = (infer_rec(l, shape)?, infer_rec(r, shape)?);
            let kind = match join(a.kind, b.kind)? {
                Kind::Unitary => return Err(TypeError::KindMismatch { left: a.kind, right: b.kind }),
                k => k,
            };
            Info { kind: promote(kind, e, shape), parities: a.parities.union(&b.parities).copied().collect() }
        }
        Expr::Compose(l, r) => {
            let (a, b) = (infer_rec(l, shape)?, infer_rec(r, shape)?);
            let kind = match join(a.kind, b.kind)? {
                Kind::Hermitian => Kind::Plain,
                k => k,
            };
            Info { kind: promote(kind, e, shape), parities: combine(&a.parities, &b.parities) }
        }
        Expr::Tensor(l, r) => {
            let (a, b) = (infer_rec(l, shape)?, infer_rec(r, shape)?);
            let mut kind = join(a.kind, b.kind)?;
            if kind == Kind::Hermitian && a.parities.contains(&1) && b.parities.contains(&1) {
                kind = Kind::Plain;
            }
            Info { kind: promote(kind, e, shape), parities: combine(&a.parities, &b.parities) }
        }
    })
}

/// Least derivable kind of `e`, which must cover every site of `shape`.
pub fn infer<T: Scalar>(e: &Expr<T>, shape: &[SiteType]) -> Result<TypeJudgment, TypeError> {
    if shape.is_empty() {
        return Err(TypeError::ShapeMismatch("empty shape".into()));
    }
    let span = e.span(shape.len())?;
    if span != (0, shape.len()) {
        return Err(TypeError::ShapeMismatch(format!(
            "expression covers sites [{},{}) but the system has {} sites",
            span.0,
            span.1,
            shape.len()
        )));
    }
    Ok(TypeJudgment { shape: shape.to_vec(), kind: infer_rec(e, shape)?.kind })
}

/// Whether `e` and `†e` have the same canonical form. Never consults the
/// dense oracle.
pub fn check_hermitian<T: Scalar>(e: &Expr<T>, shape: &[SiteType]) -> bool {
    match (dag_canonicalize(e, shape), dag_canonicalize_adjoint(e, shape)) {
        (Ok(a), Ok(b)) => canonical_eq(&a, &b, MATCH_TOL),
        _ => false,
    }
}

/// Admit `exp(-i·r·e)`: succeeds with kind unitary iff `e` is Hermitian.
pub fn admit_simulation<T: Scalar>(e: &Expr<T>, shape: &[SiteType]) -> Result<TypeJudgment, TypeError> {
    let j = infer(e, shape)?;
    if j.kind == Kind::Hermitian {
        return Ok(TypeJudgment { shape: j.shape, kind: Kind::Unitary });
    }
    let witness = match (dag_canonicalize(e, shape), dag_canonicalize_adjoint(e, shape)) {
        (Ok(a), Ok(b)) => first_mismatch(&a, &b, MATCH_TOL)
            .or_else(|| first_mismatch(&b, &a, MATCH_TOL))
            .map(|t| format!("{} * {}", c_literal(&t.amp), t.body))
            .unwrap_or_else(|| e.to_string()),
        _ => e.to_string(),
    };
    Err(TypeError::NotHermitian { witness })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;
    use crate::scalar::Rational;

    fn kind_of(src: &str) -> Kind {
        let p = parse::<f64>(src).unwrap();
        infer(&p.hamiltonian, &p.shape).unwrap().kind
    }

    #[test]
    fn hopping_is_hermitian() {
        assert_eq!(kind_of("sites [fermion×2]; H = adag(0).a(1) + adag(1).a(0)"), Kind::Hermitian);
    }

    #[test]
    fn scaled_boson_annihilator_is_plain() {
        let e: Expr<f64> = Expr::scaled_a(crate::scalar::re(0.5), 0);
        assert_eq!(infer(&e, &[SiteType::Boson(4)]).unwrap().kind, Kind::Plain);
    }

    #[test]
    fn identity_tensor_is_hermitian() {
        let e: Expr<f64> = Expr::tensor(Expr::id(0), Expr::id(1));
        assert_eq!(infer(&e, &[SiteType::Boson(3), SiteType::Fermion]).unwrap().kind, Kind::Hermitian);
    }

    #[test]
    fn hermiticity_examples() {
        let one = [SiteType::Boson(2)];
        let x: Expr<f64> = Expr::sum(Expr::adag(0), Expr::a(0));
        assert!(check_hermitian(&x, &one));
        assert!(!check_hermitian(&Expr::<f64>::a(0), &one));
        let y = parse::<f64>("sites [qubit]; H = Y(0)").unwrap().hamiltonian;
        assert!(check_hermitian(&y, &one));
        // The literal form i·a + (−i)·a† is Hermitian as well.
        let lit = parse::<f64>("sites [qubit]; H = i*a(0) + (-i)*adag(0)").unwrap().hamiltonian;
        assert!(check_hermitian(&lit, &one));
    }

    #[test]
    fn admit_examples() {
        let p = parse::<Rational>("sites [fermion, fermion]; H = -1*(adag(0).a(1) + adag(1).a(0)) + 2*(n1(0).n1(1))").unwrap();
        assert_eq!(admit_simulation(&p.hamiltonian, &p.shape).unwrap().kind, Kind::Unitary);
        let p = parse::<f64>("sites [fermion×2]; H = adag(0)").unwrap();
        assert!(matches!(admit_simulation(&p.hamiltonian, &p.shape), Err(TypeError::NotHermitian { .. })));
        let p = parse::<f64>("sites [qubit×3]; H = 0.7*(X(0) + X(1) + X(2)) + Z(0).Z(1) + Z(1).Z(2)").unwrap();
        assert!(admit_simulation(&p.hamiltonian, &p.shape).is_ok());
    }

    #[test]
    fn composed_hermitians_need_promotion() {
        // Z∘X is not Hermitian although both factors are.
        assert_eq!(kind_of("sites [qubit]; H = Z(0).X(0)"), Kind::Plain);
        assert_eq!(kind_of("sites [qubit×2]; H = Z(0).X(1)"), Kind::Hermitian);
    }

    #[test]
    fn odd_fermionic_tensor_is_not_hermitian() {
        // X on two fermion sites picks up an exchange sign.
        let e: Expr<f64> = Expr::tensor(Expr::sum(Expr::adag(0), Expr::a(0)), Expr::sum(Expr::adag(1), Expr::a(1)));
        assert_eq!(infer(&e, &[SiteType::Fermion; 2]).unwrap().kind, Kind::Plain);
        assert_eq!(infer(&e, &[SiteType::Boson(2); 2]).unwrap().kind, Kind::Hermitian);
    }

    #[test]
    fn shape_errors() {
        let e: Expr<f64> = Expr::a(0);
        assert!(matches!(infer(&e, &[SiteType::Fermion; 2]), Err(TypeError::ShapeMismatch(_))));
    }
}
