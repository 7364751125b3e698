//! Compiler from second-quantized Hamiltonians to quantum simulation
//! programs.

pub mod ir;
pub mod parser;
pub mod scalar;
pub mod rewrite;
pub mod typecheck;
pub mod semantics;
pub mod transform;
pub mod pauli_canon;
pub mod gadget;
pub mod trotter;
pub mod synth;
pub mod pipeline;
pub mod verify;
pub mod cli;

use thiserror::Error;

/// Pauli Hamiltonian with floating-point weights.
pub type Hamiltonian = ir::PauliHamiltonian<f64>;
/// Pauli Hamiltonian with exact rational weights.
pub type ExactHamiltonian = ir::PauliHamiltonian<scalar::Rational>;
/// Expression with floating-point amplitudes.
pub type Expression = ir::Expr<f64>;
/// Expression with exact rational amplitudes.
pub type ExactExpression = ir::Expr<scalar::Rational>;
/// Parsed program with floating-point amplitudes.
pub type Program = parser::ProgramFile<f64>;
/// Parsed program with exact rational amplitudes.
pub type ExactProgram = parser::ProgramFile<scalar::Rational>;
/// Digital circuit with `f64` angles.
pub type Circuit = ir::Circuit<f64>;
/// Analog schedule with `f64` durations.
pub type Schedule = ir::AnalogSchedule<f64>;

/// Any failure surfaced by the library's top-level entry points.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{source}")]
    Parse { source: parser::ParseError, text: String },
    #[error(transparent)]
    Pipeline(#[from] pipeline::PipelineError),
    #[error(transparent)]
    Verify(#[from] verify::VerifyError),
    #[error(transparent)]
    Semantics(#[from] semantics::SemanticsError),
    #[error("config: {0}")]
    Config(String),
    #[error("{0}: {1}")]
    Io(String, String),
}

impl Error {
    /// Whether the error signals a broken internal invariant.
    pub fn is_internal(&self) -> bool {
        match self {
            Error::Pipeline(p) | Error::Verify(verify::VerifyError::Pipeline(p)) => p.is_internal(),
            _ => false,
        }
    }
}
