//! Scenario files: the serializable description of a pretangent
//! computation, and its materialization into an [`EvaluatedScenario`].

use serde::{Deserialize, Serialize};

use crate::axioms::{check_metric, CheckConfig};
use crate::error::{Error, Result};
use crate::metric::FiniteMetric;
use crate::pretangent::{
    Ambient, EvaluatedScenario, LimitSelector, Pt, Track, MARKED_LABEL, MEMBERSHIP_ENVELOPE,
};
use crate::tolerance::Tolerance;

fn default_prefix_len() -> usize {
    10_000
}

fn default_tolerance() -> f64 {
    1e-6
}

/// A pretangent scenario: ambient space with marked point, normalizing
/// sequence, prefix length, limit selector, and a pool of point sequences.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub ambient: AmbientSpec,
    pub normalizing: NormalizingSpec,
    #[serde(rename = "M", default = "default_prefix_len")]
    pub prefix_len: usize,
    #[serde(default)]
    pub selector: SelectorSpec,
    pub sequences: Vec<SequenceSpec>,
    /// Optional grouping of sequence labels into families for the
    /// pointwise-generation and ultrametricity checks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub families: Option<Vec<Vec<String>>>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum AmbientSpec {
    Euclidean { dim: usize, p: Vec<f64> },
    Tabulated { metric: FiniteMetric, p: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "lowercase")]
pub enum NormalizingSpec {
    /// `r_m = c * m^(-a)`, `a > 0`.
    Power { c: f64, a: f64 },
    /// `r_m = c * q^m`, `0 < q < 1`.
    Geometric { c: f64, q: f64 },
    Tabulated { r: Vec<f64> },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum SelectorSpec {
    #[default]
    Ordinary,
    Even,
    Odd,
    Arithmetic {
        offset: u64,
        step: u64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "lowercase")]
pub enum SequenceSpec {
    /// `x_m = p + r_m * v` (euclidean ambient).
    Linear { label: String, v: Vec<f64> },
    /// `x_m = p + r_m * v + r_m^alpha * w`, `alpha > 1` (euclidean ambient).
    Analytic {
        label: String,
        v: Vec<f64>,
        w: Vec<f64>,
        alpha: f64,
    },
    /// Explicit prefix of points: coordinate arrays for the euclidean
    /// ambient, point labels for the tabulated one.
    Tabulated { label: String, points: Vec<TabPoint> },
}

impl SequenceSpec {
    pub fn label(&self) -> &str {
        match self {
            SequenceSpec::Linear { label, .. } => label,
            SequenceSpec::Analytic { label, .. } => label,
            SequenceSpec::Tabulated { label, .. } => label,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TabPoint {
    Coords(Vec<f64>),
    Label(String),
}

impl SelectorSpec {
    pub fn to_selector(&self) -> LimitSelector {
        match self {
            SelectorSpec::Ordinary => LimitSelector::Ordinary,
            SelectorSpec::Even => LimitSelector::Arithmetic { offset: 2, step: 2 },
            SelectorSpec::Odd => LimitSelector::Arithmetic { offset: 1, step: 2 },
            SelectorSpec::Arithmetic { offset, step } => LimitSelector::Arithmetic {
                offset: *offset,
                step: *step,
            },
        }
    }
}

fn evaluate_radii(spec: &NormalizingSpec, m: usize) -> Result<Vec<f64>> {
    let radii: Vec<f64> = match spec {
        NormalizingSpec::Power { c, a } => {
            if !(c.is_finite() && *c > 0.0) {
                return Err(Error::input("power normalizing sequence needs c > 0"));
            }
            if !(a.is_finite() && *a > 0.0) {
                return Err(Error::input("power normalizing sequence needs a > 0"));
            }
            (1..=m)
                .map(|i| {
                    let base = i as f64;
                    // Integral exponents through powi keep 1/m exact.
                    if a.fract() == 0.0 && *a <= 16.0 {
                        c / base.powi(*a as i32)
                    } else {
                        c * base.powf(-a)
                    }
                })
                .collect()
        }
        NormalizingSpec::Geometric { c, q } => {
            if !(c.is_finite() && *c > 0.0) {
                return Err(Error::input("geometric normalizing sequence needs c > 0"));
            }
            if !(q.is_finite() && *q > 0.0 && *q < 1.0) {
                return Err(Error::input(
                    "geometric normalizing sequence needs 0 < q < 1",
                ));
            }
            let mut out = Vec::with_capacity(m);
            let mut r = *c * *q;
            for _ in 0..m {
                out.push(r);
                r *= *q;
            }
            out
        }
        NormalizingSpec::Tabulated { r } => {
            if r.len() != m {
                return Err(Error::input(format!(
                    "tabulated normalizing sequence has {} entries for prefix length {m}",
                    r.len()
                )));
            }
            r.clone()
        }
    };
    for (i, &r) in radii.iter().enumerate() {
        if !(r.is_finite() && r > 1e-300) {
            return Err(Error::input(format!(
                "normalizing sequence entry r_{} = {r} is not usably positive \
                 (underflow or bad value)",
                i + 1
            )));
        }
    }
    if let NormalizingSpec::Tabulated { .. } = spec {
        // Cannot assert convergence to zero from a finite prefix; assert a
        // nonincreasing tail and overall decline instead.
        if radii[m - 1] >= radii[0] {
            return Err(Error::input(
                "tabulated normalizing sequence does not decline (r_M >= r_1)",
            ));
        }
        for i in (m / 2)..(m - 1) {
            if radii[i + 1] > radii[i] {
                return Err(Error::input(format!(
                    "tabulated normalizing sequence increases inside its tail at index {}",
                    i + 1
                )));
            }
        }
    }
    Ok(radii)
}

fn evaluate_ambient(spec: &AmbientSpec) -> Result<Ambient> {
    match spec {
        AmbientSpec::Euclidean { dim, p } => {
            if *dim == 0 {
                return Err(Error::input("euclidean ambient needs dim >= 1"));
            }
            if p.len() != *dim {
                return Err(Error::input(format!(
                    "marked point has {} coordinates for dimension {dim}",
                    p.len()
                )));
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::input("marked point has a non-finite coordinate"));
            }
            Ok(Ambient::Euclidean {
                dim: *dim,
                p: p.clone(),
            })
        }
        AmbientSpec::Tabulated { metric, p } => {
            let report = check_metric(metric, &CheckConfig::default());
            if !report.passed() {
                let w = report.witness.as_ref().expect("fail carries a witness");
                return Err(Error::input(format!(
                    "tabulated ambient is not a metric; violated: {} (lhs {}, rhs {})",
                    w.relation, w.lhs, w.rhs
                )));
            }
            let idx = metric
                .universe()
                .index_of(p)
                .ok_or_else(|| Error::input(format!("marked point {p:?} not in the point set")))?;
            Ok(Ambient::Tabulated {
                metric: metric.clone(),
                p: idx,
            })
        }
    }
}

fn evaluate_sequence(
    spec: &SequenceSpec,
    ambient: &Ambient,
    radii: &[f64],
) -> Result<Track> {
    let m = radii.len();
    let points: Vec<Pt> = match (spec, ambient) {
        (SequenceSpec::Linear { v, .. }, Ambient::Euclidean { dim, p }) => {
            if v.len() != *dim {
                return Err(Error::input(format!(
                    "sequence {:?}: direction has {} coordinates for dimension {dim}",
                    spec.label(),
                    v.len()
                )));
            }
            radii
                .iter()
                .map(|&r| Pt::Coords(p.iter().zip(v).map(|(pi, vi)| pi + r * vi).collect()))
                .collect()
        }
        (SequenceSpec::Analytic { v, w, alpha, .. }, Ambient::Euclidean { dim, p }) => {
            if v.len() != *dim || w.len() != *dim {
                return Err(Error::input(format!(
                    "sequence {:?}: directions must have dimension {dim}",
                    spec.label()
                )));
            }
            if !(alpha.is_finite() && *alpha > 1.0) {
                return Err(Error::input(format!(
                    "sequence {:?}: analytic form needs alpha > 1",
                    spec.label()
                )));
            }
            radii
                .iter()
                .map(|&r| {
                    let ra = r.powf(*alpha);
                    Pt::Coords(
                        p.iter()
                            .zip(v.iter().zip(w))
                            .map(|(pi, (vi, wi))| pi + r * vi + ra * wi)
                            .collect(),
                    )
                })
                .collect()
        }
        (SequenceSpec::Linear { .. } | SequenceSpec::Analytic { .. }, _) => {
            return Err(Error::input(format!(
                "sequence {:?}: analytic forms need a euclidean ambient",
                spec.label()
            )));
        }
        (SequenceSpec::Tabulated { points, .. }, ambient) => {
            if points.len() != m {
                return Err(Error::input(format!(
                    "sequence {:?}: {} points for prefix length {m}",
                    spec.label(),
                    points.len()
                )));
            }
            points
                .iter()
                .map(|tp| match (tp, ambient) {
                    (TabPoint::Coords(c), Ambient::Euclidean { dim, .. }) => {
                        if c.len() != *dim || c.iter().any(|v| !v.is_finite()) {
                            Err(Error::input(format!(
                                "sequence {:?}: bad coordinate point",
                                spec.label()
                            )))
                        } else {
                            Ok(Pt::Coords(c.clone()))
                        }
                    }
                    (TabPoint::Label(l), Ambient::Tabulated { metric, .. }) => metric
                        .universe()
                        .index_of(l)
                        .map(Pt::Index)
                        .ok_or_else(|| {
                            Error::input(format!(
                                "sequence {:?}: unknown point label {l:?}",
                                spec.label()
                            ))
                        }),
                    _ => Err(Error::input(format!(
                        "sequence {:?}: point payload does not match the ambient kind",
                        spec.label()
                    ))),
                })
                .collect::<Result<_>>()?
        }
    };
    Ok(Track {
        label: spec.label().to_string(),
        points,
    })
}

/// Numerical membership in the space of sequences converging to `p`: the
/// tail of `d(x_m, p)` must have shrunk under a declining envelope,
/// [`MEMBERSHIP_ENVELOPE`] times the overall approach scale. The envelope
/// floor `8/M` keeps power-law prefixes (`d ~ 1/m`) admissible at short
/// prefix lengths.
fn check_membership(track: &Track, ambient: &Ambient) -> Result<()> {
    let p = ambient.marked_point();
    let m = track.points.len();
    let mut overall: f64 = 0.0;
    let mut tail: f64 = 0.0;
    for (i, q) in track.points.iter().enumerate() {
        let d = ambient.dist(q, &p)?;
        overall = overall.max(d);
        if i >= m / 2 {
            tail = tail.max(d);
        }
    }
    if overall == 0.0 {
        return Ok(()); // the constant sequence at p
    }
    let envelope = MEMBERSHIP_ENVELOPE.max(8.0 / m as f64);
    if tail > envelope * overall {
        return Err(Error::input(format!(
            "sequence {:?} does not converge to the marked point: tail distance {tail} \
             against overall scale {overall}",
            track.label
        )));
    }
    Ok(())
}

impl Scenario {
    /// Validate and materialize the scenario.
    pub fn evaluate(&self) -> Result<EvaluatedScenario> {
        if self.prefix_len < 8 {
            return Err(Error::input("prefix length M must be at least 8"));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(Error::input("scenario tolerance must be positive"));
        }
        let tolerance = Tolerance::relative(self.tolerance)?;
        let ambient = evaluate_ambient(&self.ambient)?;
        let radii = evaluate_radii(&self.normalizing, self.prefix_len)?;
        let selector = self.selector.to_selector();
        let positions = selector.positions(self.prefix_len);
        if positions.len() * 4 < self.prefix_len {
            return Err(Error::input(format!(
                "selector keeps {} of {} indices, below the quarter-density floor",
                positions.len(),
                self.prefix_len
            )));
        }
        if positions.len() < 8 {
            return Err(Error::input("selector keeps fewer than 8 indices"));
        }

        let mut tracks = vec![Track {
            label: MARKED_LABEL.into(),
            points: vec![ambient.marked_point(); self.prefix_len],
        }];
        for spec in &self.sequences {
            let label = spec.label();
            if label.is_empty() || label == MARKED_LABEL {
                return Err(Error::input(format!(
                    "sequence label {label:?} is empty or reserved"
                )));
            }
            if tracks.iter().any(|t| t.label == label) {
                return Err(Error::input(format!("duplicate sequence label {label:?}")));
            }
            let track = evaluate_sequence(spec, &ambient, &radii)?;
            check_membership(&track, &ambient)?;
            tracks.push(track);
        }

        let families: Vec<Vec<usize>> = match &self.families {
            None => {
                if tracks.len() > 1 {
                    vec![(1..tracks.len()).collect()]
                } else {
                    Vec::new()
                }
            }
            Some(groups) => {
                let mut out = Vec::new();
                for group in groups {
                    if group.is_empty() {
                        return Err(Error::input("empty family"));
                    }
                    let mut indices = Vec::new();
                    for label in group {
                        let idx = tracks
                            .iter()
                            .position(|t| &t.label == label)
                            .ok_or_else(|| {
                                Error::input(format!("family references unknown label {label:?}"))
                            })?;
                        indices.push(idx);
                    }
                    out.push(indices);
                }
                out
            }
        };

        Ok(EvaluatedScenario {
            ambient,
            radii,
            selector,
            positions,
            tracks,
            tolerance,
            families,
        })
    }
}
