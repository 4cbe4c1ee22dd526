//! Every system derived from one input system, built once.

use thiserror::Error;

use crate::complement::{complementation_with, ComplementError, SignedSystem, DEFAULT_LIMIT};
use crate::decide::{DecideError, DecisionSession};
use crate::par::Exec;
use crate::saturation::{
    extract_automaton, saturate_with, SaturatedSystem, SaturationError, SaturationOptions,
};
use crate::system::System;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PipelineError {
    #[error("saturation: {0}")]
    Saturation(#[from] SaturationError),
    #[error("complement: {0}")]
    Complement(#[from] ComplementError),
    #[error(transparent)]
    Decide(#[from] DecideError),
}

#[derive(Clone, Copy, Debug)]
pub struct PipelineOptions {
    pub saturation: SaturationOptions,
    /// Bound on complement rules per basis pattern.
    pub complement_limit: usize,
    pub exec: Exec,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            saturation: SaturationOptions::default(),
            complement_limit: DEFAULT_LIMIT,
            exec: Exec::default(),
        }
    }
}

/// `I`, its saturation `I'`, the automaton `A`, and the complementations
/// `I_J` and `A_B`.
#[derive(Clone, Debug)]
pub struct Pipeline {
    pub saturated: SaturatedSystem,
    pub automaton: System,
    pub original_signed: SignedSystem,
    pub automaton_signed: SignedSystem,
}

impl Pipeline {
    pub fn build(system: &System) -> Result<Self, PipelineError> {
        Self::build_with(system, PipelineOptions::default())
    }

    pub fn build_with(system: &System, opts: PipelineOptions) -> Result<Self, PipelineError> {
        let saturated = saturate_with(system, opts.saturation)?;
        let automaton = extract_automaton(&saturated);
        let original_signed = complementation_with(system, opts.complement_limit, opts.exec)?;
        let automaton_signed = complementation_with(&automaton, opts.complement_limit, opts.exec)?;
        Ok(Pipeline {
            saturated,
            automaton,
            original_signed,
            automaton_signed,
        })
    }

    pub fn original(&self) -> &System {
        self.saturated.base()
    }

    pub fn session(&self) -> DecisionSession<'_> {
        DecisionSession::new(&self.automaton, &self.automaton_signed)
            .expect("introduction rules only")
    }
}
