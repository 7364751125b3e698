//! Lowering of Pauli evolutions to gates or machine pulses.
//!
//! Digital synthesis conjugates each support qubit into the Z basis, folds
//! the parity onto the lowest support qubit with a CX ladder and applies
//! `Rz(2θ)` there. Analog synthesis targets two machines. The IBM machine
//! offers single X, single Z and ZZ couplings. The Indiana machine offers
//! all-X strings on any support and single Z. Basis changes are built from
//! quarter-period pulses, and every duration is folded into `(0, 2π]`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_traits::Float;
use serde::Serialize;
use thiserror::Error;

use crate::ir::{AnalogSchedule, Circuit, Gate, Machine, Pauli, PauliString, Pulse};
use crate::scalar::{lit, Real};
use crate::trotter::TrotterPlan;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SynthError {
    #[error("{machine} accepts at most 2-local strings, got {string} (compile with --gadget)")]
    LocalityExceeded { machine: Machine, string: String },
}

/// Compiled artifact of a plan.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Artifact<T = f64> {
    Digital(Circuit<T>),
    Analog(AnalogSchedule<T>),
}

impl<T> Artifact<T> {
    /// Number of gates or pulses.
    pub fn len(&self) -> usize {
        match self {
            Artifact::Digital(c) => c.gates.len(),
            Artifact::Analog(s) => s.pulses.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Basis change taking `p` to Z, in application order.
fn to_z_basis<T: Real>(p: Pauli, q: usize) -> Vec<Gate<T>> {
    match p {
        Pauli::X => vec![Gate::H { q }],
        Pauli::Y => vec![Gate::Rz { theta: lit(-PI / 2.0), q }, Gate::H { q }],
        _ => Vec::new(),
    }
}

/// Inverse of [`to_z_basis`], in application order.
fn from_z_basis<T: Real>(p: Pauli, q: usize) -> Vec<Gate<T>> {
    match p {
        Pauli::X => vec![Gate::H { q }],
        Pauli::Y => vec![Gate::H { q }, Gate::Rz { theta: lit(PI / 2.0), q }],
        _ => Vec::new(),
    }
}

/// Circuit for `exp(-i·theta·p)`. The identity string becomes a phase.
pub fn synth_digital_step<T: Real>(theta: T, p: &PauliString) -> Circuit<T> {
    let mut c = Circuit::new(p.width());
    let support = p.support();
    let two = lit::<T>(2.0);
    match support.as_slice() {
        [] => c.phase = theta,
        &[q] => c.gates.push(match p.ops[q] {
            Pauli::X => Gate::Rx { theta: two * theta, q },
            Pauli::Y => Gate::Ry { theta: two * theta, q },
            _ => Gate::Rz { theta: two * theta, q },
        }),
        sites => {
            for &q in sites {
                c.gates.extend(to_z_basis(p.ops[q], q));
            }
            for j in (1..sites.len()).rev() {
                c.gates.push(Gate::Cx { ctrl: sites[j], tgt: sites[j - 1] });
            }
            c.gates.push(Gate::Rz { theta: two * theta, q: sites[0] });
            for j in 1..sites.len() {
                c.gates.push(Gate::Cx { ctrl: sites[j], tgt: sites[j - 1] });
            }
            for &q in sites {
                c.gates.extend(from_z_basis(p.ops[q], q));
            }
        }
    }
    c
}

/// Duration folded into `(0, 2π]`; `exp(-i·d·P)` has period 2π in `d`.
pub fn fold_duration<T: Real>(theta: T) -> T {
    let period = lit::<T>(2.0 * PI);
    let d = theta - period * Float::floor(theta / period);
    if d <= T::zero() {
        d + period
    } else if d > period {
        d - period
    } else {
        d
    }
}

fn pulse<T: Real>(width: usize, duration: T, pairs: &[(usize, Pauli)]) -> Pulse<T> {
    Pulse { duration: fold_duration(duration), string: PauliString::from_pairs(width, pairs) }
}

/// Pulses proportional to a Hadamard on `q`: `exp(-iπ/4·X) exp(-iπ/4·Z) exp(-iπ/4·X)`.
fn hadamard_pulses<T: Real>(width: usize, q: usize) -> Vec<Pulse<T>> {
    let quarter = lit::<T>(PI / 4.0);
    vec![pulse(width, quarter, &[(q, Pauli::X)]), pulse(width, quarter, &[(q, Pauli::Z)]), pulse(width, quarter, &[(q, Pauli::X)])]
}

/// `exp(-i·7π/4·Z)`, proportional to S†, which turns Y into X.
fn s_dagger_pulse<T: Real>(width: usize, q: usize) -> Pulse<T> {
    pulse(width, lit::<T>(7.0 * PI / 4.0), &[(q, Pauli::Z)])
}

/// `exp(-i·π/4·Z)`, proportional to S.
fn s_pulse<T: Real>(width: usize, q: usize) -> Pulse<T> {
    pulse(width, lit::<T>(PI / 4.0), &[(q, Pauli::Z)])
}

/// Whether a pulse string is native to the machine.
pub fn is_native(machine: Machine, s: &PauliString) -> bool {
    let support = s.support();
    let letters: Vec<Pauli> = support.iter().map(|&q| s.ops[q]).collect();
    match machine {
        Machine::Ibm => matches!(letters.as_slice(), [Pauli::X] | [Pauli::Z] | [Pauli::Z, Pauli::Z]),
        Machine::Indiana => {
            matches!(letters.as_slice(), [Pauli::Z]) || (!letters.is_empty() && letters.iter().all(|&p| p == Pauli::X))
        }
    }
}

/// Pulses for `exp(-i·theta·p)` on `machine`. The identity string becomes a
/// phase.
pub fn synth_analog_step<T: Real>(theta: T, p: &PauliString, machine: Machine) -> Result<AnalogSchedule<T>, SynthError> {
    let width = p.width();
    let mut s = AnalogSchedule { machine, width, pulses: Vec::new(), phase: T::zero() };
    let support = p.support();
    if support.is_empty() {
        s.phase = theta;
        return Ok(s);
    }
    if machine == Machine::Ibm && support.len() > 2 {
        return Err(SynthError::LocalityExceeded { machine, string: p.to_string() });
    }
    // Native letter each site is rotated to before the core pulse.
    let core_letter = |orig: Pauli| match machine {
        Machine::Ibm if support.len() == 2 => Pauli::Z,
        Machine::Ibm => {
            if orig == Pauli::Z {
                Pauli::Z
            } else {
                Pauli::X
            }
        }
        Machine::Indiana if support.len() == 1 && orig == Pauli::Z => Pauli::Z,
        Machine::Indiana => Pauli::X,
    };
    let mut before = Vec::new();
    let mut after = Vec::new();
    let mut core = Vec::new();
    for &q in &support {
        let orig = p.ops[q];
        let target = core_letter(orig);
        core.push((q, target));
        match (orig, target) {
            (a, b) if a == b => {}
            (Pauli::Y, Pauli::X) => {
                before.push(s_dagger_pulse(width, q));
                after.push(s_pulse(width, q));
            }
            (Pauli::X, Pauli::Z) | (Pauli::Z, Pauli::X) => {
                before.extend(hadamard_pulses(width, q));
                after.extend(hadamard_pulses(width, q));
            }
            _ => {
                // Y to Z: S† then H, undone by H then S.
                before.push(s_dagger_pulse(width, q));
                before.extend(hadamard_pulses(width, q));
                after.extend(hadamard_pulses(width, q));
                after.push(s_pulse(width, q));
            }
        }
    }
    s.pulses.extend(before);
    s.pulses.push(pulse(width, theta, &core));
    s.pulses.extend(after);
    Ok(s)
}

/// Concatenate the digital synthesis of every plan step.
pub fn synth_plan_digital<T: Real>(plan: &TrotterPlan<T>) -> Circuit<T> {
    let mut c = Circuit::new(plan.width);
    for st in &plan.steps {
        let part = synth_digital_step(st.theta, &st.string);
        c.gates.extend(part.gates);
        c.phase += part.phase;
    }
    c
}

/// Concatenate the analog synthesis of every plan step.
pub fn synth_plan_analog<T: Real>(plan: &TrotterPlan<T>, machine: Machine) -> Result<AnalogSchedule<T>, SynthError> {
    let mut s = AnalogSchedule { machine, width: plan.width, pulses: Vec::new(), phase: T::zero() };
    for st in &plan.steps {
        let part = synth_analog_step(st.theta, &st.string, machine)?;
        s.pulses.extend(part.pulses);
        s.phase += part.phase;
    }
    Ok(s)
}

/// Synthesize for a machine, or as gates when `machine` is `None`.
pub fn synth_plan<T: Real>(plan: &TrotterPlan<T>, machine: Option<Machine>) -> Result<Artifact<T>, SynthError> {
    Ok(match machine {
        None => Artifact::Digital(synth_plan_digital(plan)),
        Some(m) => Artifact::Analog(synth_plan_analog(plan, m)?),
    })
}

/// OpenQASM 2.0 text. Angles use the shortest decimal that round-trips; the
/// known global phase is a trailing comment.
pub fn to_qasm(c: &Circuit<f64>) -> String {
    let mut out = String::new();
    out.push_str("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    let _ = writeln!(out, "qreg q[{}];", c.width);
    for g in &c.gates {
        let _ = match g {
            Gate::H { q } => writeln!(out, "h q[{q}];"),
            Gate::Rx { theta, q } => writeln!(out, "rx({theta:?}) q[{q}];"),
            Gate::Ry { theta, q } => writeln!(out, "ry({theta:?}) q[{q}];"),
            Gate::Rz { theta, q } => writeln!(out, "rz({theta:?}) q[{q}];"),
            Gate::Cx { ctrl, tgt } => writeln!(out, "cx q[{ctrl}],q[{tgt}];"),
        };
    }
    let _ = writeln!(out, "// global phase: exp(-i*{:?})", c.phase);
    out
}
