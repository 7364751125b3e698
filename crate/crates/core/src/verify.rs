//! End-to-end checking of compiled artifacts against the exact evolution.

use std::time::Instant;

use num_traits::{Float, One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::gadget::{gadgetize, is_two_local, sector_ground_gap, TREND_WIDTH_LIMIT};
use crate::ir::{AlgoChoice, AnalogSchedule, Circuit, Gate};
use crate::parser::ProgramFile;
use crate::pipeline::{compile, CompileOptions, Compiled, PipelineError};
use crate::scalar::{lit, Real, C};
use crate::semantics::{hamiltonian_matrix, simulate, spectral_norm, Dense, SemanticsError};
use crate::synth::{is_native, Artifact};
use crate::trotter::{apply_step, qdrift_channel_check};

/// Slack added to every bound comparison.
pub const PASS_TOL: f64 = 1e-9;

/// Widest register that is expanded into a dense unitary.
pub const DENSE_WIDTH_LIMIT: usize = 10;

/// Widest register for the statistical QDrift check.
pub const QDRIFT_CHECK_WIDTH: usize = 6;

/// Seeds averaged by the statistical QDrift check.
pub const QDRIFT_SEEDS: u64 = 1000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("{width} qubits exceed the dense limit of {DENSE_WIDTH_LIMIT}")]
    TooLarge { width: usize },
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
}

/// Left-multiply `u` by the embedding of gate `g`; qubit 0 is the least
/// significant index bit.
pub fn apply_gate<T: Real>(u: &mut Dense<T>, g: &Gate<T>) {
    let dim = u.nrows();
    let local = |q: usize, m: [C<T>; 4], u: &mut Dense<T>| {
        let bit = 1usize << q;
        for r0 in (0..dim).filter(|r| r & bit == 0) {
            let r1 = r0 | bit;
            for c in 0..u.ncols() {
                let (a, b) = (u[(r0, c)], u[(r1, c)]);
                u[(r0, c)] = m[0] * a + m[1] * b;
                u[(r1, c)] = m[2] * a + m[3] * b;
            }
        }
    };
    let z = C::<T>::zero();
    let half = |t: T| t / lit::<T>(2.0);
    match *g {
        Gate::H { q } => {
            let s = C::new(Float::sqrt(lit::<T>(0.5)), T::zero());
            local(q, [s, s, s, -s], u);
        }
        Gate::Rx { theta, q } => {
            let (c, s) = (C::new(Float::cos(half(theta)), T::zero()), C::new(T::zero(), -Float::sin(half(theta))));
            local(q, [c, s, s, c], u);
        }
        Gate::Ry { theta, q } => {
            let (c, s) = (C::new(Float::cos(half(theta)), T::zero()), C::new(Float::sin(half(theta)), T::zero()));
            local(q, [c, -s, s, c], u);
        }
        Gate::Rz { theta, q } => {
            let e = C::from_polar(T::one(), -half(theta));
            local(q, [e, z, z, e.conj()], u);
        }
        Gate::Cx { ctrl, tgt } => {
            let (cb, tb) = (1usize << ctrl, 1usize << tgt);
            for r in (0..dim).filter(|r| r & cb != 0 && r & tb == 0) {
                u.swap_rows(r, r | tb);
            }
        }
    }
}

fn check_width(width: usize) -> Result<usize, VerifyError> {
    if width > DENSE_WIDTH_LIMIT {
        Err(VerifyError::TooLarge { width })
    } else {
        Ok(1usize << width)
    }
}

/// Dense unitary of a circuit, including its recorded global phase.
pub fn circuit_to_matrix<T: Real>(c: &Circuit<T>) -> Result<Dense<T>, VerifyError> {
    let dim = check_width(c.width)?;
    let mut u = Dense::<T>::identity(dim, dim);
    for g in &c.gates {
        apply_gate(&mut u, g);
    }
    Ok(u * C::from_polar(T::one(), -c.phase))
}

/// Dense unitary of a pulse schedule, including its recorded global phase.
pub fn schedule_to_matrix<T: Real>(s: &AnalogSchedule<T>) -> Result<Dense<T>, VerifyError> {
    let dim = check_width(s.width)?;
    let mut u = Dense::<T>::identity(dim, dim);
    for p in &s.pulses {
        apply_step(&mut u, p.duration, &p.string);
    }
    Ok(u * C::from_polar(T::one(), -s.phase))
}

/// Dense unitary of either artifact kind.
pub fn artifact_matrix<T: Real>(a: &Artifact<T>) -> Result<Dense<T>, VerifyError> {
    match a {
        Artifact::Digital(c) => circuit_to_matrix(c),
        Artifact::Analog(s) => schedule_to_matrix(s),
    }
}

/// How [`distance`] treats a global phase.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistanceMode {
    Exact,
    GlobalPhase,
}

/// Spectral distance `‖U - V‖`, or `‖U - e^{iφ}V‖` with `φ = arg tr(V†U)`.
pub fn distance<T: Real>(u: &Dense<T>, v: &Dense<T>, mode: DistanceMode) -> T {
    match mode {
        DistanceMode::Exact => spectral_norm(&(u - v)),
        DistanceMode::GlobalPhase => {
            let tr = (v.adjoint() * u).trace();
            let phase = if tr.norm() > T::zero() { tr / C::new(tr.norm(), T::zero()) } else { C::one() };
            spectral_norm(&(u - v * phase))
        }
    }
}

/// One named check in a report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// Outcome of verifying one compilation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    /// Measured distance, when a numeric comparison was made.
    pub distance: Option<f64>,
    /// Bound the distance is held to.
    pub bound: Option<f64>,
    pub pass: bool,
    pub gates: usize,
    pub pulses: usize,
    pub depth: usize,
    pub checks: Vec<Check>,
    /// Wall-clock seconds per stage; left out of serialized reports so that
    /// output stays deterministic.
    #[serde(skip)]
    pub timings: Vec<(String, f64)>,
}

impl Report {
    /// Human-readable table.
    pub fn table(&self, with_timings: bool) -> String {
        let fmt = |x: Option<f64>| x.map(|v| format!("{v:.12}")).unwrap_or_else(|| "-".into());
        let mut out = String::new();
        out.push_str(&format!("{:<22} {}\n", "distance", fmt(self.distance)));
        out.push_str(&format!("{:<22} {}\n", "bound", fmt(self.bound)));
        out.push_str(&format!("{:<22} {}\n", "gates", self.gates));
        out.push_str(&format!("{:<22} {}\n", "pulses", self.pulses));
        out.push_str(&format!("{:<22} {}\n", "depth", self.depth));
        for c in &self.checks {
            out.push_str(&format!("{:<22} {} {}\n", c.name, if c.pass { "pass" } else { "FAIL" }, c.detail));
        }
        if with_timings {
            for (stage, secs) in &self.timings {
                out.push_str(&format!("{:<22} {secs:.6}s\n", format!("time:{stage}")));
            }
        }
        out.push_str(&format!("{:<22} {}\n", "result", if self.pass { "PASS" } else { "FAIL" }));
        out
    }
}

fn check(name: &str, pass: bool, detail: impl Into<String>) -> Check {
    Check { name: name.into(), pass, detail: detail.into() }
}

/// Verify an already compiled program.
pub fn verify_compiled(c: &Compiled) -> Result<Report, VerifyError> {
    let mut checks = Vec::new();
    let mut timings = Vec::new();
    let (gates, pulses, depth) = match &c.artifact {
        Artifact::Digital(circ) => (circ.gates.len(), 0, circ.depth()),
        Artifact::Analog(s) => (0, s.pulses.len(), s.pulses.len()),
    };
    if let Artifact::Analog(s) = &c.artifact {
        let native = s.pulses.iter().all(|p| is_native(s.machine, &p.string));
        let positive = s.pulses.iter().all(|p| p.duration > 0.0);
        checks.push(check("machine-set", native, format!("{} pulses on {}", s.pulses.len(), s.machine)));
        checks.push(check("positive-durations", positive, ""));
    }
    let r = c.options.time;
    let mut distance = None;
    let mut bound = None;
    if let Some(g) = &c.gadget {
        checks.push(check("two-local", is_two_local(&g.hamiltonian), format!("max locality {}", g.hamiltonian.max_locality())));
        if g.registers.is_empty() {
            checks.push(check("trend", true, "no gadgets needed"));
        } else if g.hamiltonian.width > TREND_WIDTH_LIMIT {
            checks.push(check("trend", true, format!("skipped: {} qubits", g.hamiltonian.width)));
        } else {
            let start = Instant::now();
            let half = gadgetize(&c.kept, Some(g.lambda / 2.0)).map_err(PipelineError::from)?;
            let g1 = sector_ground_gap(&c.kept, g).map_err(PipelineError::from)?;
            let g2 = sector_ground_gap(&c.kept, &half).map_err(PipelineError::from)?;
            timings.push(("trend".into(), start.elapsed().as_secs_f64()));
            checks.push(check("trend", g2 < g1, format!("gap {g1:.3e} at λ, {g2:.3e} at λ/2")));
        }
    } else if c.options.algorithm == AlgoChoice::Qdrift {
        if c.kept.width > QDRIFT_CHECK_WIDTH {
            checks.push(check("qdrift-channel", true, format!("skipped: {} qubits", c.kept.width)));
        } else {
            let start = Instant::now();
            let seeds = c.options.seed..c.options.seed + QDRIFT_SEEDS;
            let q = qdrift_channel_check(&c.kept, r, c.options.samples, seeds).map_err(PipelineError::from)?;
            timings.push(("qdrift-channel".into(), start.elapsed().as_secs_f64()));
            distance = Some(q.distance);
            bound = Some(q.bound);
            checks.push(check(
                "qdrift-channel",
                q.pass,
                format!("{} seeds, distance {:.6e} vs bound {:.6e} + 3σ ({:.1e})", q.seeds, q.distance, q.bound, q.sigma),
            ));
        }
    } else if c.full.width > DENSE_WIDTH_LIMIT {
        checks.push(check("oracle", true, format!("bound only: {} qubits", c.full.width)));
        bound = Some(c.plan.total_bound());
    } else {
        let start = Instant::now();
        let u = artifact_matrix(&c.artifact)?;
        let exact = simulate(&hamiltonian_matrix(&c.full)?, r)?;
        let d = crate::verify::distance(&u, &exact, DistanceMode::GlobalPhase);
        timings.push(("oracle".into(), start.elapsed().as_secs_f64()));
        let b = c.plan.total_bound();
        distance = Some(d);
        bound = Some(b);
        checks.push(check("distance", d <= b + PASS_TOL, format!("{d:.6e} <= {b:.6e}")));
    }
    let pass = checks.iter().all(|c| c.pass);
    Ok(Report { distance, bound, pass, gates, pulses, depth, checks, timings })
}

/// Compile `program` and verify the result.
pub fn verify_pipeline(program: &ProgramFile<f64>, opts: &CompileOptions) -> Result<Report, VerifyError> {
    let start = Instant::now();
    let compiled = compile(program, opts)?;
    let elapsed = start.elapsed().as_secs_f64();
    let mut report = verify_compiled(&compiled)?;
    report.timings.insert(0, ("compile".into(), elapsed));
    Ok(report)
}
