use std::path::PathBuf;

use tvdehaze::dehaze::SolverConfig;
use tvdehaze::synth::SynthSpec;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Dehaze,
    Synthesize,
    Evaluate,
}

/// Everything one invocation needs: inputs, outputs, mode, solver
/// configuration, synthesis parameters and the diagnostic emit switches.
#[derive(Debug, Clone)]
pub struct RunManifest {
    pub inputs: Vec<PathBuf>,
    /// Ground-truth images paired with `inputs`, evaluate mode only.
    pub truths: Vec<PathBuf>,
    pub out_dir: PathBuf,
    pub mode: Mode,
    pub config: SolverConfig,
    pub synth: Option<SynthSpec>,
    pub emit_transmission: bool,
    pub emit_fields: bool,
    pub emit_energy: bool,
    pub emit_metrics: bool,
    /// Seed for generated test patterns (synthesize mode without inputs).
    pub seed: u64,
}

impl RunManifest {
    pub fn validate(&self) -> Result<(), CliError> {
        self.config
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        match self.mode {
            Mode::Dehaze => {
                if self.inputs.is_empty() {
                    return Err(CliError::Config("dehaze mode needs input images".into()));
                }
            }
            Mode::Evaluate => {
                if self.inputs.is_empty() {
                    return Err(CliError::Config("evaluate mode needs input images".into()));
                }
                if self.truths.len() != self.inputs.len() {
                    return Err(CliError::Config(format!(
                        "evaluate mode needs one ground-truth image per input ({} inputs, {} truths)",
                        self.inputs.len(),
                        self.truths.len()
                    )));
                }
            }
            Mode::Synthesize => {
                let spec = self
                    .synth
                    .as_ref()
                    .ok_or_else(|| CliError::Config("synthesize mode needs a haze spec".into()))?;
                spec.validate()
                    .map_err(|e| CliError::Config(e.to_string()))?;
            }
        }
        Ok(())
    }
}
