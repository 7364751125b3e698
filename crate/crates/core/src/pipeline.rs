//! The compilation pipeline from a parsed program to a synthesized artifact.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gadget::{gadgetize, GadgetError, GadgetOutput};
use crate::ir::{AlgoChoice, PauliHamiltonian, TargetChoice};
use crate::parser::{ProgramFile, Simulation};
use crate::pauli_canon::{canonicalize, split_trivial, CanonError};
use crate::rewrite::{dag_canonicalize, CanonicalExpr, RewriteError};
use crate::synth::{synth_plan, Artifact, SynthError};
use crate::transform::{transform_expr, QubitExpr, SiteLayout, TransformError};
use crate::trotter::{choose_m, drop_penalty, order_terms, plan_qdrift, plan_standard, TrotterError, TrotterPlan};
use crate::typecheck::{admit_simulation, TypeError};

/// Failure of a pipeline stage.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum PipelineError {
    #[error("typecheck: {0}")]
    Type(#[from] TypeError),
    #[error("canonicalize: {0}")]
    Rewrite(#[from] RewriteError),
    #[error("transform: {0}")]
    Transform(#[from] TransformError),
    #[error("pauli-canon: {0}")]
    Canon(#[from] CanonError),
    #[error("gadget: {0}")]
    Gadget(#[from] GadgetError),
    #[error("trotter: {0}")]
    Trotter(#[from] TrotterError),
    #[error("synth: {0}")]
    Synth(#[from] SynthError),
}

impl PipelineError {
    /// Whether the error signals a broken internal invariant rather than a
    /// problem with the input.
    pub fn is_internal(&self) -> bool {
        matches!(self, PipelineError::Canon(_) | PipelineError::Rewrite(_))
    }
}

/// Partial settings from one source: the program's `simulate` block, a
/// config file, or command-line flags.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    pub time: Option<f64>,
    pub algorithm: Option<AlgoChoice>,
    pub m: Option<usize>,
    pub samples: Option<usize>,
    pub epsilon: Option<f64>,
    pub seed: Option<u64>,
    pub target: Option<TargetChoice>,
    pub order: Option<Vec<String>>,
    pub gadget: Option<bool>,
    pub lambda: Option<f64>,
    pub drop_trivial: Option<bool>,
}

impl From<&Simulation> for Settings {
    fn from(s: &Simulation) -> Self {
        Settings {
            time: s.time,
            algorithm: s.algorithm,
            m: s.m,
            samples: s.samples,
            epsilon: s.epsilon,
            seed: s.seed,
            target: s.target,
            order: s.order.clone(),
            ..Settings::default()
        }
    }
}

impl Settings {
    /// Fill unset fields from `lower`.
    pub fn over(self, lower: &Settings) -> Settings {
        Settings {
            time: self.time.or(lower.time),
            algorithm: self.algorithm.or(lower.algorithm),
            m: self.m.or(lower.m),
            samples: self.samples.or(lower.samples),
            epsilon: self.epsilon.or(lower.epsilon),
            seed: self.seed.or(lower.seed),
            target: self.target.or(lower.target),
            order: self.order.or_else(|| lower.order.clone()),
            gadget: self.gadget.or(lower.gadget),
            lambda: self.lambda.or(lower.lambda),
            drop_trivial: self.drop_trivial.or(lower.drop_trivial),
        }
    }
}

/// Fully resolved compilation options.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompileOptions {
    pub time: f64,
    pub algorithm: AlgoChoice,
    /// Repetitions; `None` defers to `epsilon` or defaults to 1.
    pub m: Option<usize>,
    pub samples: usize,
    pub epsilon: Option<f64>,
    pub seed: u64,
    pub target: TargetChoice,
    pub order: Vec<String>,
    pub gadget: bool,
    pub lambda: Option<f64>,
    pub drop_trivial: bool,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions::from(&Settings::default())
    }
}

impl From<&Settings> for CompileOptions {
    fn from(s: &Settings) -> Self {
        CompileOptions {
            time: s.time.unwrap_or(1.0),
            algorithm: s.algorithm.unwrap_or(AlgoChoice::Standard),
            m: s.m,
            samples: s.samples.unwrap_or(100),
            epsilon: s.epsilon,
            seed: s.seed.unwrap_or(0),
            target: s.target.unwrap_or(TargetChoice::Digital),
            order: s.order.clone().unwrap_or_default(),
            gadget: s.gadget.unwrap_or(false) || s.lambda.is_some(),
            lambda: s.lambda,
            drop_trivial: s.drop_trivial.unwrap_or(false),
        }
    }
}

impl CompileOptions {
    /// Options for `program` with `flags` and `config` layered over its
    /// `simulate` block.
    pub fn resolve(program: &ProgramFile<f64>, config: &Settings, flags: &Settings) -> Self {
        let block = program.simulation.as_ref().map(Settings::from).unwrap_or_default();
        CompileOptions::from(&flags.clone().over(&config.clone().over(&block)))
    }
}

/// Every intermediate form of one compilation.
#[derive(Clone, Debug)]
pub struct Compiled {
    pub options: CompileOptions,
    pub canonical: CanonicalExpr<f64>,
    pub qubit: QubitExpr<f64>,
    pub layout: SiteLayout,
    /// Pauli form before dropping.
    pub full: PauliHamiltonian<f64>,
    /// Terms handed to the product formula (before gadgets).
    pub kept: PauliHamiltonian<f64>,
    pub dropped: PauliHamiltonian<f64>,
    pub gadget: Option<GadgetOutput<f64>>,
    pub plan: TrotterPlan<f64>,
    pub artifact: Artifact<f64>,
}

/// Run every stage through synthesis.
pub fn compile(program: &ProgramFile<f64>, opts: &CompileOptions) -> Result<Compiled, PipelineError> {
    let shape = &program.shape;
    admit_simulation(&program.hamiltonian, shape)?;
    let canonical = dag_canonicalize(&program.hamiltonian, shape)?;
    let (qubit, layout) = transform_expr(&canonical, shape)?;
    let full = canonicalize(&qubit, layout.width)?;
    let (kept, dropped) = if opts.drop_trivial {
        split_trivial(&full)
    } else {
        (full.clone(), PauliHamiltonian::new(full.width))
    };
    let gadget = if opts.gadget { Some(gadgetize(&kept, opts.lambda)?) } else { None };
    let planned = gadget.as_ref().map(|g| &g.hamiltonian).unwrap_or(&kept);
    let r = opts.time;
    let penalty = drop_penalty(&dropped, r);
    let plan = match opts.algorithm {
        AlgoChoice::Standard => {
            let terms = order_terms(planned, &opts.order);
            let m = match (opts.m, opts.epsilon) {
                (Some(m), _) => m,
                (None, Some(eps)) => choose_m(&terms, planned.width, r, eps, penalty)?,
                (None, None) => 1,
            };
            plan_standard(planned.width, &terms, r, m, penalty)?
        }
        AlgoChoice::Qdrift => plan_qdrift(planned, r, opts.samples, opts.seed, penalty)?,
    };
    let artifact = synth_plan(&plan, opts.target.machine())?;
    Ok(Compiled { options: opts.clone(), canonical, qubit, layout, full, kept, dropped, gadget, plan, artifact })
}
