use serde::{Deserialize, Serialize};

use super::CliError;

pub const DEFAULT_KMAX: u32 = 200;
pub const DEFAULT_NMAX: u64 = 100_000;
pub const DEFAULT_WINDOW: u64 = 1_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Pretty,
    Json,
}

/// Optional evidence stages of `analyze`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checks {
    pub lemmas: bool,
    pub dfao: bool,
    pub kernel: bool,
    pub fk: bool,
}

impl Default for Checks {
    fn default() -> Self {
        Checks {
            lemmas: true,
            dfao: true,
            kernel: true,
            fk: true,
        }
    }
}

/// A fully resolved analysis request.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: Option<String>,
    pub alpha: String,
    pub beta: String,
    pub base: u32,
    pub kmax: u32,
    pub nmax: u64,
    pub window: u64,
    pub checks: Checks,
    pub format: OutputFormat,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChecksPatch {
    pub lemmas: Option<bool>,
    pub dfao: Option<bool>,
    pub kernel: Option<bool>,
    pub fk: Option<bool>,
}

/// Scenario fields as read from a file or from flags; unset fields fall
/// through to the next layer.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioPatch {
    pub name: Option<String>,
    pub alpha: Option<String>,
    pub beta: Option<String>,
    pub base: Option<u32>,
    pub kmax: Option<u32>,
    pub nmax: Option<u64>,
    pub window: Option<u64>,
    pub checks: ChecksPatch,
    pub format: Option<OutputFormat>,
}

impl ScenarioPatch {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Usage(format!("scenario file: {e}")))
    }

    pub fn batch_from_json(text: &str) -> Result<Vec<Self>, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Usage(format!("batch file: {e}")))
    }

    /// `self` with every field that `top` sets replaced.
    pub fn overlay(&self, top: &ScenarioPatch) -> ScenarioPatch {
        ScenarioPatch {
            name: top.name.clone().or_else(|| self.name.clone()),
            alpha: top.alpha.clone().or_else(|| self.alpha.clone()),
            beta: top.beta.clone().or_else(|| self.beta.clone()),
            base: top.base.or(self.base),
            kmax: top.kmax.or(self.kmax),
            nmax: top.nmax.or(self.nmax),
            window: top.window.or(self.window),
            checks: ChecksPatch {
                lemmas: top.checks.lemmas.or(self.checks.lemmas),
                dfao: top.checks.dfao.or(self.checks.dfao),
                kernel: top.checks.kernel.or(self.checks.kernel),
                fk: top.checks.fk.or(self.checks.fk),
            },
            format: top.format.or(self.format),
        }
    }

    /// Fills defaults and validates. `alpha` is the only required field.
    pub fn resolve(&self) -> Result<Scenario, CliError> {
        let alpha = self
            .alpha
            .clone()
            .ok_or_else(|| CliError::Usage("alpha is required".into()))?;
        let base = self.base.unwrap_or(2);
        if base < 2 {
            return Err(CliError::Usage(format!("base must be at least 2, got {base}")));
        }
        let positive = |name: &str, v: u64| {
            if v == 0 {
                Err(CliError::Usage(format!("{name} must be positive")))
            } else {
                Ok(v)
            }
        };
        let d = Checks::default();
        Ok(Scenario {
            name: self.name.clone(),
            alpha,
            beta: self.beta.clone().unwrap_or_else(|| "0".into()),
            base,
            kmax: positive("kmax", u64::from(self.kmax.unwrap_or(DEFAULT_KMAX)))? as u32,
            nmax: positive("nmax", self.nmax.unwrap_or(DEFAULT_NMAX))?,
            window: positive("window", self.window.unwrap_or(DEFAULT_WINDOW))?,
            checks: Checks {
                lemmas: self.checks.lemmas.unwrap_or(d.lemmas),
                dfao: self.checks.dfao.unwrap_or(d.dfao),
                kernel: self.checks.kernel.unwrap_or(d.kernel),
                fk: self.checks.fk.unwrap_or(d.fk),
            },
            format: self.format.unwrap_or_default(),
        })
    }
}

impl Scenario {
    pub fn new(alpha: &str, beta: &str, base: u32) -> Result<Self, CliError> {
        ScenarioPatch {
            alpha: Some(alpha.into()),
            beta: Some(beta.into()),
            base: Some(base),
            ..ScenarioPatch::default()
        }
        .resolve()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file = ScenarioPatch::from_json(r#"{"alpha":"3/2","base":3,"kmax":50,"checks":{"fk":false}}"#).unwrap();
        let flags = ScenarioPatch {
            base: Some(2),
            ..ScenarioPatch::default()
        };
        let s = file.overlay(&flags).resolve().unwrap();
        assert_eq!((s.alpha.as_str(), s.base, s.kmax), ("3/2", 2, 50));
        assert!(!s.checks.fk && s.checks.kernel);
        assert_eq!((s.nmax, s.window), (DEFAULT_NMAX, DEFAULT_WINDOW));
    }

    #[test]
    fn invalid_scenarios() {
        assert!(ScenarioPatch::default().resolve().is_err());
        assert!(ScenarioPatch::from_json(r#"{"alpha":"1","bogus":1}"#).is_err());
        let zero = ScenarioPatch {
            alpha: Some("1".into()),
            window: Some(0),
            ..ScenarioPatch::default()
        };
        assert!(zero.resolve().is_err());
        assert!(Scenario::new("1", "0", 1).is_err());
    }
}
