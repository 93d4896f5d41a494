//! The whole bench run in one call: compile, simulate, run the gel, read out.

use crate::compiler::{compile_runnable, CompileError, CompileOptions, EncodingPlan, ProtocolPlan};
use crate::decision::DecisionMatrix;
use crate::gel::{readout, run_gel, DecisionReport, Gel, GelConfig, GelError};
use crate::scalar::Scalar;
use crate::wetlab::{run_protocol, TubeState, WetlabError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Wetlab(#[from] WetlabError),
    #[error(transparent)]
    Gel(#[from] GelError),
}

#[derive(Debug, Clone)]
pub struct Run<T> {
    pub plan: EncodingPlan<T>,
    pub protocol: ProtocolPlan,
    /// Set when fixture sequences were swapped for generated ones.
    pub note: Option<String>,
    pub tubes: Vec<TubeState<T>>,
    pub gel: Gel<T>,
    pub report: DecisionReport<T>,
}

pub fn run<T: Scalar>(
    matrix: &DecisionMatrix<T>,
    options: &CompileOptions,
    cycles: i64,
    gel: &GelConfig,
) -> Result<Run<T>, PipelineError> {
    let (plan, protocol, note) = compile_runnable(matrix, options)?;
    let tubes = run_protocol(&plan, cycles)?;
    let gel = run_gel(&tubes, gel)?;
    let report = readout(&gel, &plan, matrix)?;
    Ok(Run {
        plan,
        protocol,
        note,
        tubes,
        gel,
        report,
    })
}
