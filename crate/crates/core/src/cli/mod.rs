//! Scenario configuration, the end-to-end analysis report, and helpers the
//! command-line front end shares with other embedders.

mod report;
mod scenario;

use thiserror::Error;

use crate::exactnum::{parse, ExactReal};
use crate::floorlog::{normalize, NormalizedInstance, ProblemInstance};
use crate::langreg::DigitSource;
use crate::numeration::GeneralWord;

pub use report::{
    jump_indicator, run_analyze, run_batch, BatchEntry, DfaoEvidence, Evidence, JumpEvidence, KernelEvidence, Report,
    RkEvidence, URegularity, Verdicts, SCHEMA_VERSION,
};
pub use scenario::{Checks, ChecksPatch, OutputFormat, Scenario, ScenarioPatch};

/// Exit status for a run that completed, whatever the verdict.
pub const EXIT_OK: i32 = 0;
/// Exit status for malformed flags, files or numbers.
pub const EXIT_USAGE: i32 = 1;
/// Exit status when two independent computations disagree.
pub const EXIT_INTERNAL: i32 = 2;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }
}

pub fn parse_real(what: &str, text: &str) -> Result<ExactReal, CliError> {
    parse(text).map_err(|e| CliError::Usage(format!("{what} {text:?}: {e}")))
}

/// Parses and normalizes `⌊log_b(αn + β)⌋`.
pub fn instance(alpha: &str, beta: &str, base: u32) -> Result<NormalizedInstance, CliError> {
    let inst = ProblemInstance::new(parse_real("alpha", alpha)?, parse_real("beta", beta)?, base)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(normalize(&inst))
}

/// Which digit sequence `language`, `decide` and `dfa` operate on.
#[derive(Clone, Debug, Default)]
pub struct SourceSpec {
    /// `rk`, `periodic`, `explicit` or `tm-blocks`.
    pub kind: String,
    pub alpha: Option<String>,
    pub beta: Option<String>,
    pub pre: Option<String>,
    pub period: Option<String>,
    pub word: Option<String>,
    pub block_a: Option<String>,
    pub block_b: Option<String>,
}

fn word_arg(name: &str, text: Option<&str>) -> Result<GeneralWord, CliError> {
    let text = text.ok_or_else(|| CliError::Usage(format!("--{name} is required for this source")))?;
    text.parse()
        .map_err(|e| CliError::Usage(format!("--{name} {text:?}: {e}")))
}

impl SourceSpec {
    pub fn build(&self, base: u32) -> Result<DigitSource, CliError> {
        let usage = |e: crate::langreg::LangError| CliError::Usage(e.to_string());
        match self.kind.as_str() {
            "rk" => {
                let alpha = self.alpha.as_deref().unwrap_or("1");
                let beta = self.beta.as_deref().unwrap_or("0");
                Ok(DigitSource::FromRk(instance(alpha, beta, base)?))
            }
            "periodic" => {
                let pre = match self.pre.as_deref() {
                    Some(text) => word_arg("pre", Some(text))?,
                    None => GeneralWord::from_digits(Vec::new()),
                };
                DigitSource::periodic(pre, word_arg("period", self.period.as_deref())?).map_err(usage)
            }
            "explicit" => Ok(DigitSource::Explicit(word_arg("word", self.word.as_deref())?)),
            "tm-blocks" => DigitSource::thue_morse(
                word_arg("block-a", self.block_a.as_deref())?,
                word_arg("block-b", self.block_b.as_deref())?,
            )
            .map_err(usage),
            other => Err(CliError::Usage(format!(
                "unknown source {other:?}; expected rk, periodic, explicit or tm-blocks"
            ))),
        }
    }
}
