//! Runtime-dispatched checker registry.
//!
//! Each axiom system lives behind the [`Checker`] trait and is registered
//! under a stable name, so callers (the CLI in particular) select a checker
//! by string at runtime. The plain `check_*` functions remain the primary
//! API; the registry only wraps them.

use crate::axioms::{
    check_balk, check_g_metric, check_increasing, check_k_increasing,
    check_k_weakly_decreasing, check_metric, check_symmetric_g, check_ultra_balk, CheckConfig,
};
use crate::error::{Error, Result};
use crate::g_table::GMetricTable;
use crate::metric::FiniteMetric;
use crate::report::CheckReport;
use crate::set_function::SetFunction;

/// What a checker consumes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputKind {
    SetFunction,
    Metric,
    GTable,
}

impl InputKind {
    pub fn describe(&self) -> &'static str {
        match self {
            InputKind::SetFunction => "a set function file",
            InputKind::Metric => "a metric file",
            InputKind::GTable => "a G table file",
        }
    }
}

/// A parsed input object, handed to whichever checker was selected.
pub enum CheckInput<'a> {
    Tau(&'a SetFunction),
    Metric(&'a FiniteMetric),
    GTable(&'a GMetricTable),
}

impl CheckInput<'_> {
    pub fn kind(&self) -> InputKind {
        match self {
            CheckInput::Tau(_) => InputKind::SetFunction,
            CheckInput::Metric(_) => InputKind::Metric,
            CheckInput::GTable(_) => InputKind::GTable,
        }
    }
}

/// One axiom system, selectable by name.
pub trait Checker: Sync {
    fn name(&self) -> &'static str;
    fn input_kind(&self) -> InputKind;
    fn needs_k(&self) -> bool {
        false
    }
    fn run(&self, input: &CheckInput, k: Option<u32>, cfg: &CheckConfig) -> Result<CheckReport>;
}

fn expect_tau<'a>(input: &'a CheckInput, name: &str) -> Result<&'a SetFunction> {
    match input {
        CheckInput::Tau(t) => Ok(t),
        other => Err(Error::input(format!(
            "check {name:?} needs a set function, got {}",
            other.kind().describe()
        ))),
    }
}

struct BalkChecker;
impl Checker for BalkChecker {
    fn name(&self) -> &'static str {
        "balk"
    }
    fn input_kind(&self) -> InputKind {
        InputKind::SetFunction
    }
    fn run(&self, input: &CheckInput, _k: Option<u32>, cfg: &CheckConfig) -> Result<CheckReport> {
        Ok(check_balk(expect_tau(input, self.name())?, cfg))
    }
}

struct IncreasingChecker;
impl Checker for IncreasingChecker {
    fn name(&self) -> &'static str {
        "increasing"
    }
    fn input_kind(&self) -> InputKind {
        InputKind::SetFunction
    }
    fn run(&self, input: &CheckInput, _k: Option<u32>, cfg: &CheckConfig) -> Result<CheckReport> {
        Ok(check_increasing(expect_tau(input, self.name())?, cfg))
    }
}

struct KIncreasingChecker;
impl Checker for KIncreasingChecker {
    fn name(&self) -> &'static str {
        "k-increasing"
    }
    fn input_kind(&self) -> InputKind {
        InputKind::SetFunction
    }
    fn needs_k(&self) -> bool {
        true
    }
    fn run(&self, input: &CheckInput, k: Option<u32>, cfg: &CheckConfig) -> Result<CheckReport> {
        let k = k.ok_or_else(|| Error::input("check \"k-increasing\" needs --k"))?;
        check_k_increasing(expect_tau(input, self.name())?, k, cfg)
    }
}

struct KWeaklyDecreasingChecker;
impl Checker for KWeaklyDecreasingChecker {
    fn name(&self) -> &'static str {
        "k-weakly-decreasing"
    }
    fn input_kind(&self) -> InputKind {
        InputKind::SetFunction
    }
    fn needs_k(&self) -> bool {
        true
    }
    fn run(&self, input: &CheckInput, k: Option<u32>, cfg: &CheckConfig) -> Result<CheckReport> {
        let k = k.ok_or_else(|| Error::input("check \"k-weakly-decreasing\" needs --k"))?;
        check_k_weakly_decreasing(expect_tau(input, self.name())?, k, cfg)
    }
}

struct MetricChecker;
impl Checker for MetricChecker {
    fn name(&self) -> &'static str {
        "metric"
    }
    fn input_kind(&self) -> InputKind {
        InputKind::Metric
    }
    fn run(&self, input: &CheckInput, _k: Option<u32>, cfg: &CheckConfig) -> Result<CheckReport> {
        match input {
            CheckInput::Metric(d) => Ok(check_metric(d, cfg)),
            other => Err(Error::input(format!(
                "check \"metric\" needs a metric, got {}",
                other.kind().describe()
            ))),
        }
    }
}

struct GMetricChecker;
impl Checker for GMetricChecker {
    fn name(&self) -> &'static str {
        "g"
    }
    fn input_kind(&self) -> InputKind {
        InputKind::GTable
    }
    fn run(&self, input: &CheckInput, _k: Option<u32>, cfg: &CheckConfig) -> Result<CheckReport> {
        match input {
            CheckInput::GTable(g) => Ok(check_g_metric(g, cfg)),
            other => Err(Error::input(format!(
                "check \"g\" needs a G table, got {}",
                other.kind().describe()
            ))),
        }
    }
}

struct SymmetricGChecker;
impl Checker for SymmetricGChecker {
    fn name(&self) -> &'static str {
        "symmetric-g"
    }
    fn input_kind(&self) -> InputKind {
        InputKind::GTable
    }
    fn run(&self, input: &CheckInput, _k: Option<u32>, cfg: &CheckConfig) -> Result<CheckReport> {
        match input {
            CheckInput::GTable(g) => Ok(check_symmetric_g(g, cfg)),
            other => Err(Error::input(format!(
                "check \"symmetric-g\" needs a G table, got {}",
                other.kind().describe()
            ))),
        }
    }
}

struct UltraBalkChecker;
impl Checker for UltraBalkChecker {
    fn name(&self) -> &'static str {
        "ultra"
    }
    fn input_kind(&self) -> InputKind {
        InputKind::SetFunction
    }
    fn run(&self, input: &CheckInput, _k: Option<u32>, cfg: &CheckConfig) -> Result<CheckReport> {
        Ok(check_ultra_balk(expect_tau(input, self.name())?, cfg))
    }
}

/// All registered checkers, in the order the CLI lists them.
pub static CHECKERS: &[&dyn Checker] = &[
    &BalkChecker,
    &GMetricChecker,
    &SymmetricGChecker,
    &MetricChecker,
    &KIncreasingChecker,
    &KWeaklyDecreasingChecker,
    &IncreasingChecker,
    &UltraBalkChecker,
];

/// Look a checker up by its registered name.
pub fn checker(name: &str) -> Option<&'static dyn Checker> {
    CHECKERS.iter().copied().find(|c| c.name() == name)
}

pub fn checker_names() -> Vec<&'static str> {
    CHECKERS.iter().map(|c| c.name()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Universe;

    #[test]
    fn registry_resolves_all_names() {
        for name in [
            "balk",
            "g",
            "symmetric-g",
            "metric",
            "k-increasing",
            "k-weakly-decreasing",
            "increasing",
            "ultra",
        ] {
            assert!(checker(name).is_some(), "missing checker {name}");
        }
        assert!(checker("nope").is_none());
    }

    #[test]
    fn input_kind_mismatch_is_an_input_error() {
        let u = Universe::lettered(1).unwrap();
        let tau = SetFunction::new(u, vec![0.0]).unwrap();
        let c = checker("metric").unwrap();
        let err = c.run(&CheckInput::Tau(&tau), None, &CheckConfig::default());
        assert!(err.is_err());
    }

    #[test]
    fn k_checkers_require_k() {
        let u = Universe::lettered(1).unwrap();
        let tau = SetFunction::new(u, vec![0.0]).unwrap();
        let c = checker("k-increasing").unwrap();
        assert!(c.needs_k());
        assert!(c.run(&CheckInput::Tau(&tau), None, &CheckConfig::default()).is_err());
    }
}
