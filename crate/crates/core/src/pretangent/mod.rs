//! Numerical pretangent spaces.
//!
//! Given a marked point `p` in a metric space and a normalizing sequence
//! `r_m -> 0`, point sequences converging to `p` are compared through the
//! rescaled distances `d(x_m, y_m) / r_m`. Pairs whose rescaled distance
//! converges are mutually stable; a maximal mutually-stable family,
//! quotiented by zero rescaled distance, is a pretangent space carrying the
//! limit metric `rho`. An extended metric compatible with `d` lifts to the
//! quotient by tail estimates of `tau(Im(x^1_m, ..., x^n_m)) / r_m`.
//!
//! Genuine ultrafilter limits are replaced by convergent-subsequence
//! selection: a [`LimitSelector`] picks an index subsequence, and a limit is
//! reported only when the tail actually settles. Bounded non-convergent
//! tails are an error, never a silent choice.

pub mod rules;
pub mod scenario;

use serde::Serialize;

use crate::axioms::{check_metric, CheckConfig};
use crate::error::{Error, Result};
use crate::metric::FiniteMetric;
use crate::report::{CheckReport, Witness};
use crate::space::Universe;
use crate::tolerance::Tolerance;

pub use rules::{rule_by_name, CallbackRule, DiameterRule, ExplicitRule, TauRule};
pub use scenario::{
    AmbientSpec, NormalizingSpec, Scenario, SelectorSpec, SequenceSpec, TabPoint,
};

/// Fraction of the overall approach scale that the tail of a converging
/// sequence may still occupy. Loose enough to admit `d(x_m, p) ~ 1/sqrt(m)`
/// at the default prefix length, tight enough to reject stalled sequences.
pub const MEMBERSHIP_ENVELOPE: f64 = 0.05;

/// Declining factor demanded from window means when asserting that a
/// nonnegative series tends to zero slower than the tolerance can see.
const VANISH_DECAY: f64 = 0.9;

/// A point of the ambient space: coordinates for the euclidean kind, an
/// index into the tabulated point set otherwise.
#[derive(Clone, Debug, PartialEq)]
pub enum Pt {
    Coords(Vec<f64>),
    Index(usize),
}

type OracleFn = dyn Fn(&Pt, &Pt) -> f64 + Send + Sync;

/// The ambient metric space with its marked point.
pub enum Ambient {
    Euclidean { dim: usize, p: Vec<f64> },
    Tabulated { metric: FiniteMetric, p: usize },
    /// An opaque distance oracle. Axioms are spot-checked, not proven;
    /// see [`Ambient::spot_check`].
    Oracle { dist: Box<OracleFn>, p: Pt },
}

impl Ambient {
    pub fn marked_point(&self) -> Pt {
        match self {
            Ambient::Euclidean { p, .. } => Pt::Coords(p.clone()),
            Ambient::Tabulated { p, .. } => Pt::Index(*p),
            Ambient::Oracle { p, .. } => p.clone(),
        }
    }

    pub fn dist(&self, a: &Pt, b: &Pt) -> Result<f64> {
        match (self, a, b) {
            (Ambient::Euclidean { dim, .. }, Pt::Coords(x), Pt::Coords(y)) => {
                if x.len() != *dim || y.len() != *dim {
                    return Err(Error::input("point dimension mismatch"));
                }
                Ok(x.iter()
                    .zip(y)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt())
            }
            (Ambient::Tabulated { metric, .. }, Pt::Index(i), Pt::Index(j)) => {
                if *i >= metric.len() || *j >= metric.len() {
                    return Err(Error::input("point index outside the tabulated space"));
                }
                Ok(metric.dist(*i, *j))
            }
            (Ambient::Oracle { dist, .. }, a, b) => Ok(dist(a, b)),
            _ => Err(Error::input("point payload does not match the ambient kind")),
        }
    }

    /// Spot-check the metric axioms on all triples from a point sample.
    /// The only validation available for the oracle kind.
    pub fn spot_check(&self, sample: &[Pt], tol: Tolerance) -> Result<()> {
        for (i, a) in sample.iter().enumerate() {
            if !tol.eq(self.dist(a, a)?, 0.0) {
                return Err(Error::input(format!("oracle distance d(x,x) != 0 at sample {i}")));
            }
            for (j, b) in sample.iter().enumerate().skip(i + 1) {
                let ab = self.dist(a, b)?;
                if !tol.eq(ab, self.dist(b, a)?) {
                    return Err(Error::input(format!(
                        "oracle distance asymmetric on samples ({i},{j})"
                    )));
                }
                if ab < 0.0 {
                    return Err(Error::input(format!(
                        "oracle distance negative on samples ({i},{j})"
                    )));
                }
                for (k, c) in sample.iter().enumerate() {
                    if !tol.le(ab, self.dist(a, c)? + self.dist(c, b)?) {
                        return Err(Error::input(format!(
                            "oracle distance violates the triangle on samples ({i},{j},{k})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

impl std::fmt::Debug for Ambient {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Ambient::Euclidean { dim, p } => {
                f.debug_struct("Euclidean").field("dim", dim).field("p", p).finish()
            }
            Ambient::Tabulated { metric, p } => f
                .debug_struct("Tabulated")
                .field("n", &metric.len())
                .field("p", p)
                .finish(),
            Ambient::Oracle { p, .. } => f.debug_struct("Oracle").field("p", p).finish(),
        }
    }
}

/// Index subsequence standing in for an ultrafilter: limits are taken along
/// the selected ranks only. Ranks are 1-based.
#[derive(Clone, Debug, PartialEq)]
pub enum LimitSelector {
    Ordinary,
    /// Ranks `offset, offset + step, offset + 2 step, ...`.
    Arithmetic { offset: u64, step: u64 },
}

impl LimitSelector {
    /// 0-based positions into a prefix of length `m`.
    pub fn positions(&self, m: usize) -> Vec<usize> {
        match self {
            LimitSelector::Ordinary => (0..m).collect(),
            LimitSelector::Arithmetic { offset, step } => {
                let mut out = Vec::new();
                let mut rank = *offset;
                while rank as usize <= m {
                    out.push(rank as usize - 1);
                    rank += step;
                }
                out
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            LimitSelector::Ordinary => "ordinary".into(),
            LimitSelector::Arithmetic { offset: 2, step: 2 } => "even".into(),
            LimitSelector::Arithmetic { offset: 1, step: 2 } => "odd".into(),
            LimitSelector::Arithmetic { offset, step } => {
                format!("arithmetic(offset {offset}, step {step})")
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Stability {
    Stable { limit: f64 },
    Unstable,
    Inconclusive,
}

/// Verdict on one rescaled-distance series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StabilityVerdict {
    pub status: Stability,
    /// max - min of the series over the decision window.
    pub tail_spread: f64,
}

impl StabilityVerdict {
    pub fn limit(&self) -> Option<f64> {
        match self.status {
            Stability::Stable { limit } => Some(limit),
            _ => None,
        }
    }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn spread(values: &[f64]) -> f64 {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    hi - lo
}

/// Tail decision on a selected series.
///
/// The estimate is the mean over the last quarter of the series; `stable`
/// requires the window spread to sit inside `tol * max(1, |estimate|)`.
/// `unstable` requires the spread to exceed three margins *and* not to be
/// collapsing against the previous window (ratio >= 2/3), which separates
/// persistent oscillation and divergence from slow convergence; the rest is
/// `inconclusive`.
pub fn series_verdict(series: &[f64], tol: Tolerance) -> StabilityVerdict {
    debug_assert!(series.len() >= 8);
    let w = series.len().div_ceil(4);
    let last = &series[series.len() - w..];
    let prev = &series[series.len() - 2 * w..series.len() - w];
    if last.iter().chain(prev).any(|v| !v.is_finite()) {
        return StabilityVerdict {
            status: Stability::Inconclusive,
            tail_spread: f64::INFINITY,
        };
    }
    let est = mean(last);
    let sp = spread(last);
    let margin = tol.margin(est, 0.0);
    let status = if sp <= margin {
        Stability::Stable { limit: est }
    } else if sp > 3.0 * margin && 3.0 * sp >= 2.0 * spread(prev) {
        Stability::Unstable
    } else {
        Stability::Inconclusive
    };
    StabilityVerdict {
        status,
        tail_spread: sp,
    }
}

/// Does a nonnegative series tend to zero? True when the last-window mean
/// is inside the tolerance, or keeps declining by [`VANISH_DECAY`] against
/// the previous window. Returns the last-window mean as the estimate.
fn vanishes(series: &[f64], tol: Tolerance) -> (bool, f64) {
    let w = series.len().div_ceil(4);
    let last = &series[series.len() - w..];
    let prev = &series[series.len() - 2 * w..series.len() - w];
    let est = mean(last);
    let est_prev = mean(prev);
    let ok = est.abs() <= tol.margin(est, 0.0) || est <= VANISH_DECAY * est_prev;
    (ok, est)
}

/// One point sequence of a scenario.
#[derive(Debug)]
pub struct Track {
    pub label: String,
    pub points: Vec<Pt>,
}

/// A materialized scenario: ambient, radii, selector positions and point
/// tracks, ready for stability arithmetic. Track 0 is always the constant
/// sequence at the marked point.
#[derive(Debug)]
pub struct EvaluatedScenario {
    pub ambient: Ambient,
    pub radii: Vec<f64>,
    pub selector: LimitSelector,
    pub positions: Vec<usize>,
    pub tracks: Vec<Track>,
    pub tolerance: Tolerance,
    /// Families of track indices for the pointwise-generation and
    /// ultrametricity checks. Defaults to one family of all user tracks.
    pub families: Vec<Vec<usize>>,
}

/// Label reserved for the implicit constant sequence at the marked point.
pub const MARKED_LABEL: &str = "~p";

/// The quotient of a self-stable family by zero rescaled distance.
#[derive(Clone, Debug)]
pub struct Quotient {
    /// Admitted track indices, pool order.
    pub family: Vec<usize>,
    /// Track indices per class, each sorted; classes ordered by first member.
    pub classes: Vec<Vec<usize>>,
    /// Representative track (first member) per class.
    pub reps: Vec<usize>,
    /// Class labels: the representative labels.
    pub labels: Vec<String>,
    pub rho: Vec<Vec<f64>>,
}

/// Serializable output of `pretangent build`.
#[derive(Debug, Serialize)]
pub struct BuildOutput {
    pub classes: Vec<ClassOut>,
    pub rho: Vec<Vec<f64>>,
    pub stability: Vec<PairOut>,
    pub rejected: Vec<RejectOut>,
    pub provenance: Provenance,
}

#[derive(Debug, Serialize)]
pub struct ClassOut {
    pub members: Vec<String>,
    pub representative: String,
}

#[derive(Debug, Serialize)]
pub struct PairOut {
    pub x: String,
    pub y: String,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limit: Option<f64>,
    pub tail_spread: f64,
}

#[derive(Debug, Serialize)]
pub struct RejectOut {
    pub label: String,
    pub reason: String,
}

#[derive(Debug, Serialize)]
pub struct Provenance {
    #[serde(rename = "M")]
    pub prefix_len: usize,
    pub selector: String,
    pub tolerance: f64,
    pub pool: Vec<String>,
}

impl BuildOutput {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "pretangent space: {} class(es) from {} sequence(s) (M = {}, selector {}, tol {})\n",
            self.classes.len(),
            self.provenance.pool.len(),
            self.provenance.prefix_len,
            self.provenance.selector,
            self.provenance.tolerance
        ));
        for (i, class) in self.classes.iter().enumerate() {
            out.push_str(&format!(
                "class {i}: {{{}}} (representative {})\n",
                class.members.join(", "),
                class.representative
            ));
        }
        out.push_str("rho:\n");
        for row in &self.rho {
            let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            out.push_str(&format!("  [{}]\n", cells.join(", ")));
        }
        for pair in &self.stability {
            out.push_str(&format!(
                "stability({}, {}): {}{}\n",
                pair.x,
                pair.y,
                pair.status,
                pair.limit.map_or(String::new(), |l| format!(" (limit {l})"))
            ));
        }
        for reject in &self.rejected {
            out.push_str(&format!("rejected {}: {}\n", reject.label, reject.reason));
        }
        out
    }
}

impl EvaluatedScenario {
    fn track(&self, i: usize) -> &Track {
        &self.tracks[i]
    }

    fn rescaled_series(&self, x: usize, y: usize) -> Result<Vec<f64>> {
        let (tx, ty) = (self.track(x), self.track(y));
        if tx.points.len() != ty.points.len() {
            return Err(Error::input(format!(
                "sequences {:?} and {:?} have different prefix lengths",
                tx.label, ty.label
            )));
        }
        self.positions
            .iter()
            .map(|&pos| {
                Ok(self.ambient.dist(&tx.points[pos], &ty.points[pos])? / self.radii[pos])
            })
            .collect()
    }

    /// Mutual stability of two tracks: the verdict on
    /// `d(x_m, y_m) / r_m` along the selector.
    pub fn stability(&self, x: usize, y: usize) -> Result<StabilityVerdict> {
        let series = self.rescaled_series(x, y)?;
        Ok(series_verdict(&series, self.tolerance))
    }

    /// Greedy maximal self-stable family within the pool, in pool order,
    /// starting from the constant sequence at the marked point. A sequence
    /// is admitted iff it is mutually stable with everything already
    /// admitted. Any inconclusive verdict aborts the run.
    pub fn build_family(&self) -> Result<(Vec<usize>, Vec<RejectOut>)> {
        let mut admitted: Vec<usize> = Vec::new();
        let mut rejected: Vec<RejectOut> = Vec::new();
        for cand in 0..self.tracks.len() {
            let mut reason: Option<String> = None;
            for &prev in &admitted {
                let verdict = self.stability(prev, cand)?;
                match verdict.status {
                    Stability::Stable { .. } => {}
                    Stability::Unstable => {
                        reason = Some(format!(
                            "not mutually stable with {:?} (tail spread {})",
                            self.track(prev).label,
                            verdict.tail_spread
                        ));
                        break;
                    }
                    Stability::Inconclusive => {
                        return Err(Error::input(format!(
                            "stability of ({:?}, {:?}) is inconclusive (tail spread {}); \
                             refusing to guess",
                            self.track(prev).label,
                            self.track(cand).label,
                            verdict.tail_spread
                        )));
                    }
                }
            }
            match reason {
                None => admitted.push(cand),
                Some(reason) => rejected.push(RejectOut {
                    label: self.track(cand).label.clone(),
                    reason,
                }),
            }
        }
        Ok((admitted, rejected))
    }

    /// Quotient a self-stable family by zero rescaled distance.
    ///
    /// Classes are formed by single linkage over the `d~ = 0` graph (within
    /// tolerance), then validated: intra-class distances must stay within 3
    /// margins, inter-class distances above 10, and the class metric must
    /// not depend on the choice of representatives beyond 3 margins. A
    /// violation aborts: the configuration straddles the tolerance.
    pub fn quotient(&self, family: &[usize]) -> Result<Quotient> {
        if family.is_empty() {
            return Err(Error::input("cannot quotient an empty family"));
        }
        let n = family.len();
        let mut dtilde = vec![vec![0.0f64; n]; n];
        for i in 0..n {
            for j in (i + 1)..n {
                let verdict = self.stability(family[i], family[j])?;
                match verdict.status {
                    Stability::Stable { limit } => {
                        dtilde[i][j] = limit;
                        dtilde[j][i] = limit;
                    }
                    _ => {
                        return Err(Error::input(format!(
                            "family is not self-stable: pair ({:?}, {:?})",
                            self.track(family[i]).label,
                            self.track(family[j]).label
                        )));
                    }
                }
            }
        }
        let tol = self.tolerance;
        let zero_margin = tol.margin(0.0, 0.0);

        // Single linkage.
        let mut class_of: Vec<usize> = (0..n).collect();
        fn find(class_of: &mut Vec<usize>, i: usize) -> usize {
            if class_of[i] != i {
                let root = find(class_of, class_of[i]);
                class_of[i] = root;
            }
            class_of[i]
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if tol.eq(dtilde[i][j], 0.0) {
                    let (a, b) = (find(&mut class_of, i), find(&mut class_of, j));
                    if a != b {
                        class_of[b.max(a)] = a.min(b);
                    }
                }
            }
        }
        let mut classes: Vec<Vec<usize>> = Vec::new();
        let mut class_index = vec![usize::MAX; n];
        for i in 0..n {
            let root = find(&mut class_of, i);
            if class_index[root] == usize::MAX {
                class_index[root] = classes.len();
                classes.push(Vec::new());
            }
            classes[class_index[root]].push(i);
        }

        // Validation: the linkage must not straddle the tolerance.
        for members in &classes {
            for (ai, &a) in members.iter().enumerate() {
                for &b in &members[ai + 1..] {
                    if dtilde[a][b] > 3.0 * zero_margin {
                        return Err(Error::inconsistency(format!(
                            "class members ({:?}, {:?}) sit {} apart, above 3 margins: \
                             equivalence classes straddle the tolerance",
                            self.track(family[a]).label,
                            self.track(family[b]).label,
                            dtilde[a][b]
                        )));
                    }
                }
            }
        }
        let k = classes.len();
        let mut rho = vec![vec![0.0f64; k]; k];
        for ci in 0..k {
            for cj in (ci + 1)..k {
                let rep = dtilde[classes[ci][0]][classes[cj][0]];
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for &a in &classes[ci] {
                    for &b in &classes[cj] {
                        lo = lo.min(dtilde[a][b]);
                        hi = hi.max(dtilde[a][b]);
                    }
                }
                if hi - lo > 3.0 * tol.margin(rep, 0.0) {
                    return Err(Error::inconsistency(format!(
                        "rho between classes {ci} and {cj} depends on representatives \
                         (range {lo}..{hi}): aborting"
                    )));
                }
                if lo <= 10.0 * zero_margin {
                    return Err(Error::inconsistency(format!(
                        "classes {ci} and {cj} are only {lo} apart, below 10 margins: \
                         clustering straddles the tolerance"
                    )));
                }
                rho[ci][cj] = rep;
                rho[cj][ci] = rep;
            }
        }

        let reps: Vec<usize> = classes.iter().map(|m| family[m[0]]).collect();
        let labels: Vec<String> = reps.iter().map(|&t| self.track(t).label.clone()).collect();
        let quotient = Quotient {
            family: family.to_vec(),
            classes: classes
                .iter()
                .map(|m| m.iter().map(|&i| family[i]).collect())
                .collect(),
            reps,
            labels: labels.clone(),
            rho: rho.clone(),
        };

        // The class metric must be an actual metric within 10 margins.
        let metric = FiniteMetric::new(Universe::new(labels)?, rho)?;
        let cfg = CheckConfig {
            tolerance: Tolerance::new(10.0 * tol.eps(), tol.mode())?,
            ..CheckConfig::default()
        };
        let report = check_metric(&metric, &cfg);
        if !report.passed() {
            let w = report.witness.as_ref().expect("fail carries a witness");
            return Err(Error::inconsistency(format!(
                "class distances do not form a metric within 10 margins; violated: {} \
                 (lhs {}, rhs {})",
                w.relation, w.lhs, w.rhs
            )));
        }
        Ok(quotient)
    }

    /// Greedy family construction plus quotient, with the serializable
    /// report of the whole build.
    pub fn build(&self) -> Result<(Quotient, BuildOutput)> {
        let (family, rejected) = self.build_family()?;
        let quotient = self.quotient(&family)?;
        let mut stability = Vec::new();
        for (ai, &a) in family.iter().enumerate() {
            for &b in family[ai + 1..].iter() {
                let verdict = self.stability(a, b)?;
                stability.push(PairOut {
                    x: self.track(a).label.clone(),
                    y: self.track(b).label.clone(),
                    status: match verdict.status {
                        Stability::Stable { .. } => "stable".into(),
                        Stability::Unstable => "unstable".into(),
                        Stability::Inconclusive => "inconclusive".into(),
                    },
                    limit: verdict.limit(),
                    tail_spread: verdict.tail_spread,
                });
            }
        }
        let out = BuildOutput {
            classes: quotient
                .classes
                .iter()
                .zip(&quotient.reps)
                .map(|(members, &rep)| ClassOut {
                    members: members.iter().map(|&t| self.track(t).label.clone()).collect(),
                    representative: self.track(rep).label.clone(),
                })
                .collect(),
            rho: quotient.rho.clone(),
            stability,
            rejected,
            provenance: Provenance {
                prefix_len: self.radii.len(),
                selector: self.selector.describe(),
                tolerance: self.tolerance.eps(),
                pool: self.tracks.iter().map(|t| t.label.clone()).collect(),
            },
        };
        Ok((quotient, out))
    }

    /// The lifted extended metric on a set of classes: the stable limit of
    /// `tau(Im(x^1_m, ..., x^n_m)) / r_m` along the selector, evaluated on
    /// the class representatives. A non-convergent tail is an error:
    /// ultrafilter limits of bounded non-convergent data are out of scope.
    pub fn lift(&self, quotient: &Quotient, rule: &dyn TauRule, classes: &[usize]) -> Result<f64> {
        if classes.is_empty() {
            return Err(Error::input("lift needs at least one class"));
        }
        for &c in classes {
            if c >= quotient.reps.len() {
                return Err(Error::input(format!(
                    "class index {c} out of range ({} classes)",
                    quotient.reps.len()
                )));
            }
        }
        let series: Vec<f64> = self
            .positions
            .iter()
            .map(|&pos| {
                let pts: Vec<&Pt> = classes
                    .iter()
                    .map(|&c| &self.track(quotient.reps[c]).points[pos])
                    .collect();
                Ok(rule.eval(&self.ambient, &pts)? / self.radii[pos])
            })
            .collect::<Result<_>>()?;
        let verdict = series_verdict(&series, self.tolerance);
        match verdict.status {
            Stability::Stable { limit } => Ok(limit),
            _ => Err(Error::input(format!(
                "lifted values did not converge on the selected classes \
                 (tail spread {}); non-convergent ultrafilter limits are out of scope",
                verdict.tail_spread
            ))),
        }
    }

    /// Pointwise-generation check: for each family, the normalized defect
    /// `|tau(Im(...)) - diam_d(Im(...))| / max_i d(x^i_m, p)` must tend to
    /// zero (defined as 0 when every point equals `p`). A per-family
    /// numerical check: failing families refute, passing families are
    /// evidence only.
    pub fn generated_at_point(&self, rule: &dyn TauRule) -> Result<CheckReport> {
        let name = "generated-at-point";
        let tol = self.tolerance;
        let p = self.ambient.marked_point();
        let mut examined: u64 = 0;
        for family in &self.families {
            let series: Vec<f64> = self
                .positions
                .iter()
                .map(|&pos| {
                    let pts: Vec<&Pt> =
                        family.iter().map(|&t| &self.track(t).points[pos]).collect();
                    let denom = pts
                        .iter()
                        .map(|q| self.ambient.dist(q, &p))
                        .collect::<Result<Vec<f64>>>()?
                        .into_iter()
                        .fold(0.0f64, f64::max);
                    if denom == 0.0 {
                        return Ok(0.0);
                    }
                    let tau_val = rule.eval(&self.ambient, &pts)?;
                    let diam = diameter_of(&self.ambient, &pts)?;
                    Ok((tau_val - diam).abs() / denom)
                })
                .collect::<Result<_>>()?;
            examined += series.len() as u64;
            let (ok, est) = vanishes(&series, tol);
            if !ok {
                let labels = family
                    .iter()
                    .map(|&t| self.track(t).label.clone())
                    .collect::<Vec<_>>()
                    .join(",");
                let w = Witness::new(
                    "normalized defect |tau - diam_d| / max dist to p tends to 0",
                    vec![("family".into(), labels)],
                    est,
                    0.0,
                );
                return Ok(CheckReport::fail(name, w, examined, tol)
                    .with_note("a failing family refutes pointwise generation"));
            }
        }
        Ok(CheckReport::pass(name, examined, tol).with_note(
            "numerical evidence on the supplied families only; passing families prove nothing",
        ))
    }

    /// Ultrametricity criterion on triple families: the product
    /// `Phi_d(x,y,z) * (d1/d2 - 1)` must tend to zero along every supplied
    /// triple approaching `p` (`d1`, `d2` the two largest sides, with
    /// `d1/d2 := 1` when `d2 = 0`). Fail refutes ultrametric pretangent
    /// spaces; pass is consistency on the sampled families, not proof.
    pub fn ultrametric_criterion(&self) -> Result<CheckReport> {
        let name = "ultrametric-criterion";
        let tol = self.tolerance;
        let p = self.ambient.marked_point();
        let mut examined: u64 = 0;
        for family in &self.families {
            if family.len() != 3 {
                return Err(Error::input(format!(
                    "the ultrametricity criterion needs triples; got a family of {}",
                    family.len()
                )));
            }
            let series: Vec<f64> = self
                .positions
                .iter()
                .map(|&pos| {
                    let pts: Vec<&Pt> =
                        family.iter().map(|&t| &self.track(t).points[pos]).collect();
                    let dp: Vec<f64> = pts
                        .iter()
                        .map(|q| self.ambient.dist(q, &p))
                        .collect::<Result<_>>()?;
                    let f = |i: usize, j: usize| -> Result<f64> {
                        let (a, b) = (dp[i], dp[j]);
                        if a == 0.0 && b == 0.0 {
                            return Ok(0.0);
                        }
                        let side = self.ambient.dist(pts[i], pts[j])?;
                        Ok(side * a.min(b) / (a.max(b) * a.max(b)))
                    };
                    let phi = f(0, 1)?.max(f(0, 2)?).max(f(1, 2)?);
                    let mut sides = [
                        self.ambient.dist(pts[0], pts[1])?,
                        self.ambient.dist(pts[0], pts[2])?,
                        self.ambient.dist(pts[1], pts[2])?,
                    ];
                    sides.sort_by(|a, b| b.partial_cmp(a).expect("finite distances"));
                    let factor = if sides[1] == 0.0 {
                        0.0
                    } else {
                        sides[0] / sides[1] - 1.0
                    };
                    Ok(phi * factor)
                })
                .collect::<Result<_>>()?;
            examined += series.len() as u64;
            let (ok, est) = vanishes(&series, tol);
            if !ok {
                let labels = family
                    .iter()
                    .map(|&t| self.track(t).label.clone())
                    .collect::<Vec<_>>()
                    .join(",");
                let w = Witness::new(
                    "Phi_d(x,y,z) * (d1/d2 - 1) tends to 0 as the triple approaches p",
                    vec![("family".into(), labels)],
                    est,
                    0.0,
                );
                return Ok(CheckReport::fail(name, w, examined, tol)
                    .with_note("a failing family refutes ultrametric pretangent spaces"));
            }
        }
        Ok(CheckReport::pass(name, examined, tol).with_note(
            "consistent with ultrametric pretangent spaces on the supplied families; not a proof",
        ))
    }
}

/// Diameter of a point list under the ambient metric.
pub(crate) fn diameter_of(ambient: &Ambient, pts: &[&Pt]) -> Result<f64> {
    let mut best = 0.0f64;
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i + 1..] {
            best = best.max(ambient.dist(a, b)?);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tolerance() -> Tolerance {
        Tolerance::relative(1e-6).unwrap()
    }

    #[test]
    fn constant_series_is_stable() {
        let series = vec![2.5; 100];
        let v = series_verdict(&series, tolerance());
        assert_eq!(v.status, Stability::Stable { limit: 2.5 });
        assert_eq!(v.tail_spread, 0.0);
    }

    #[test]
    fn oscillating_series_is_unstable() {
        let series: Vec<f64> = (1..=100).map(|m| if m % 2 == 0 { 2.0 } else { 0.0 }).collect();
        let v = series_verdict(&series, tolerance());
        assert_eq!(v.status, Stability::Unstable);
        assert_eq!(v.tail_spread, 2.0);
    }

    #[test]
    fn divergent_series_is_unstable() {
        let series: Vec<f64> = (1..=200).map(|m| (m as f64).sqrt()).collect();
        let v = series_verdict(&series, tolerance());
        assert_eq!(v.status, Stability::Unstable);
    }

    #[test]
    fn slowly_converging_series_is_inconclusive() {
        let series: Vec<f64> = (1..=10_000).map(|m| 1.0 + 1.0 / m as f64).collect();
        let v = series_verdict(&series, tolerance());
        assert_eq!(v.status, Stability::Inconclusive);
    }

    #[test]
    fn selector_positions() {
        assert_eq!(LimitSelector::Ordinary.positions(4), vec![0, 1, 2, 3]);
        assert_eq!(
            LimitSelector::Arithmetic { offset: 2, step: 2 }.positions(8),
            vec![1, 3, 5, 7]
        );
        assert_eq!(
            LimitSelector::Arithmetic { offset: 1, step: 2 }.positions(8),
            vec![0, 2, 4, 6]
        );
    }

    #[test]
    fn vanishing_detection() {
        let tol = tolerance();
        let declining: Vec<f64> = (1..=1000).map(|m| 1.0 / m as f64).collect();
        assert!(vanishes(&declining, tol).0);
        let constant = vec![0.5; 1000];
        let (ok, est) = vanishes(&constant, tol);
        assert!(!ok);
        assert_eq!(est, 0.5);
        let zero = vec![0.0; 1000];
        assert!(vanishes(&zero, tol).0);
    }
}
