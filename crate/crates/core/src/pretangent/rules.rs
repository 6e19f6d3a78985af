//! Evaluation rules for the set function being lifted.
//!
//! A [`TauRule`] turns a finite list of ambient points into a value of the
//! extended metric on their image. Rules are interchangeable strategies:
//! the built-in diameter rule, an explicit table over a tabulated ambient,
//! or an arbitrary callback for programmatic use.

use crate::axioms::{check_balk, CheckConfig};
use crate::error::{Error, Result};
use crate::pretangent::{diameter_of, Ambient, Pt};
use crate::set_function::SetFunction;
use crate::space::Subset;

pub trait TauRule: Sync {
    fn name(&self) -> &str;

    /// Value of the extended metric on the image of `points` (duplicates
    /// collapse).
    fn eval(&self, ambient: &Ambient, points: &[&Pt]) -> Result<f64>;

    /// Pre-flight validation against the ambient. The lift theory assumes
    /// the rule is an extended metric compatible with the ambient distance;
    /// rules verify what they can.
    fn validate(&self, _ambient: &Ambient, _cfg: &CheckConfig) -> Result<()> {
        Ok(())
    }
}

/// `tau(S) = diam_d(S)`: compatible with the ambient by construction.
pub struct DiameterRule;

impl TauRule for DiameterRule {
    fn name(&self) -> &str {
        "diameter"
    }

    fn eval(&self, ambient: &Ambient, points: &[&Pt]) -> Result<f64> {
        diameter_of(ambient, points)
    }
}

/// An explicit set function over the points of a tabulated ambient.
pub struct ExplicitRule {
    pub tau: SetFunction,
}

impl TauRule for ExplicitRule {
    fn name(&self) -> &str {
        "explicit"
    }

    fn eval(&self, ambient: &Ambient, points: &[&Pt]) -> Result<f64> {
        match ambient {
            Ambient::Tabulated { .. } => {}
            _ => return Err(Error::input("an explicit rule needs a tabulated ambient")),
        }
        let mut bits = 0u32;
        for p in points {
            match p {
                Pt::Index(i) => bits |= 1 << i,
                _ => return Err(Error::input("explicit rule got a non-index point")),
            }
        }
        self.tau.eval(Subset::from_bits(bits))
    }

    /// The lift guarantees need the rule to be an extended metric whose
    /// binary projection equals the ambient distance; both are checkable
    /// for explicit tables and verified here.
    fn validate(&self, ambient: &Ambient, cfg: &CheckConfig) -> Result<()> {
        let metric = match ambient {
            Ambient::Tabulated { metric, .. } => metric,
            _ => return Err(Error::input("an explicit rule needs a tabulated ambient")),
        };
        if self.tau.universe() != metric.universe() {
            return Err(Error::input(
                "explicit rule universe does not match the ambient point set",
            ));
        }
        let report = check_balk(&self.tau, cfg);
        if !report.passed() {
            let w = report.witness.as_ref().expect("fail carries a witness");
            return Err(Error::input(format!(
                "explicit rule is not an extended metric; violated: {} (lhs {}, rhs {})",
                w.relation, w.lhs, w.rhs
            )));
        }
        let n = metric.len();
        for i in 0..n {
            for j in (i + 1)..n {
                let mask = (1u32 << i) | (1u32 << j);
                let tau_ij = self.tau.eval(Subset::from_bits(mask))?;
                if !cfg.tolerance.eq(tau_ij, metric.dist(i, j)) {
                    return Err(Error::input(format!(
                        "explicit rule is not compatible with the ambient: tau({},{}) = {tau_ij} \
                         but d = {}",
                        metric.universe().label(i),
                        metric.universe().label(j),
                        metric.dist(i, j)
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A programmatic rule; compatibility is the caller's responsibility.
pub struct CallbackRule {
    pub name: String,
    #[allow(clippy::type_complexity)]
    pub eval: Box<dyn Fn(&Ambient, &[&Pt]) -> Result<f64> + Send + Sync>,
}

impl TauRule for CallbackRule {
    fn name(&self) -> &str {
        &self.name
    }

    fn eval(&self, ambient: &Ambient, points: &[&Pt]) -> Result<f64> {
        (self.eval)(ambient, points)
    }
}

/// Resolve a rule by its registered name. `explicit` needs the table.
pub fn rule_by_name(name: &str, explicit_tau: Option<SetFunction>) -> Result<Box<dyn TauRule>> {
    match name {
        "diameter" => Ok(Box::new(DiameterRule)),
        "explicit" => {
            let tau = explicit_tau
                .ok_or_else(|| Error::input("the explicit rule needs a set function (--tau)"))?;
            Ok(Box::new(ExplicitRule { tau }))
        }
        other => Err(Error::input(format!(
            "unknown tau rule {other:?}; registered: diameter, explicit"
        ))),
    }
}
