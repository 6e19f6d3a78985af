//! Constructive maps between metrics, extended metrics and G-metrics:
//! diameter generation, binary projection, generalized diameters, the
//! k-increasing counterexample family, and the symmetric-G extension
//! pipeline (partial table -> full extended metric).

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::{self, MapAccess, Visitor};
use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::axioms::{check_balk, check_increasing, check_metric, check_symmetric_g, CheckConfig};
use crate::error::{Error, Result};
use crate::g_table::GMetricTable;
use crate::metric::FiniteMetric;
use crate::report::CheckReport;
use crate::set_function::{resolve_entries, KeyedValues, SetFunction};
use crate::space::{
    canonical_subset_key, image_set, nonempty_submasks, Subset, Universe, MAX_UNIVERSE,
};
use crate::tolerance::Tolerance;

/// For every nonempty mask, the max of `base` over its submasks with
/// cardinality <= `cap`. Ascending-mask dynamic program:
/// `f(A) = max(base(A) if |A| <= cap, max over i in A of f(A \ {i}))`.
fn max_capped_subset_table(n: usize, cap: u32, base: impl Fn(u32) -> f64) -> Vec<f64> {
    let full: u32 = if n == 32 { u32::MAX } else { (1 << n) - 1 };
    let mut table = vec![f64::NEG_INFINITY; full as usize];
    for a in 1..=full {
        let mut best = if a.count_ones() <= cap {
            base(a)
        } else {
            f64::NEG_INFINITY
        };
        let mut bits = a;
        while bits != 0 {
            let bit = bits & bits.wrapping_neg();
            bits &= bits - 1;
            let sub = a & !bit;
            if sub != 0 {
                best = best.max(table[(sub - 1) as usize]);
            }
        }
        table[(a - 1) as usize] = best;
    }
    table
}

/// The diameter-generated extended metric of a valid finite metric:
/// `tau(A) = max over x,y in A of d(x,y)`.
pub fn diameter_balk(d: &FiniteMetric, cfg: &CheckConfig) -> Result<SetFunction> {
    let report = check_metric(d, cfg);
    if !report.passed() {
        let w = report.witness.as_ref().expect("fail carries a witness");
        return Err(Error::input(format!(
            "diameter generation needs a valid metric; violated: {} (lhs {}, rhs {})",
            w.relation, w.lhs, w.rhs
        )));
    }
    let n = d.len();
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let mut table = vec![0.0f64; full as usize];
    for a in 1..=full {
        if a.count_ones() == 1 {
            continue;
        }
        let top = 31 - a.leading_zeros();
        let rest = a & !(1 << top);
        let mut best = table[(rest - 1) as usize];
        let mut bits = rest;
        while bits != 0 {
            let i = bits.trailing_zeros();
            bits &= bits - 1;
            best = best.max(d.dist(i as usize, top as usize));
        }
        table[(a - 1) as usize] = best;
    }
    SetFunction::new(d.universe().clone(), table)
}

/// The binary projection `tau^2`: `dist[i][j] = tau({i,j})`, zero on the
/// diagonal. A metric whenever `tau` satisfies the extended-metric axioms;
/// computed regardless, so callers can inspect broken inputs.
pub fn tau_squared(tau: &SetFunction) -> FiniteMetric {
    let u = tau.universe();
    let n = u.len();
    let vals = tau.values();
    let mut dist = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let mask = (1u32 << i) | (1u32 << j);
            let v = vals[(mask - 1) as usize];
            dist[i][j] = v;
            dist[j][i] = v;
        }
    }
    FiniteMetric::new(u.clone(), dist).expect("shape is valid by construction")
}

/// The k-ary projection `tau^k(x_1, ..., x_k) = tau(Im(x_1, ..., x_k))`.
/// Invariant under permutation and duplication of arguments.
pub fn project_tau_k(tau: &SetFunction, points: &[usize]) -> Result<f64> {
    let image = image_set(points, tau.universe())?;
    tau.eval(image)
}

/// The generalized diameter `max { tau(B) : B subseteq A, 1 <= |B| <= k }`.
pub fn generalized_diameter(tau: &SetFunction, k: u32, a: Subset) -> Result<f64> {
    if k < 1 {
        return Err(Error::input("generalized diameter needs k >= 1"));
    }
    if a.is_empty() {
        return Err(Error::input("generalized diameter of the empty set"));
    }
    if a.bits() & !tau.universe().full_mask() != 0 {
        return Err(Error::input("subset outside the universe"));
    }
    let vals = tau.values();
    let mut best = f64::NEG_INFINITY;
    for b in nonempty_submasks(a) {
        if b.cardinality() <= k {
            best = best.max(vals[(b.bits() - 1) as usize]);
        }
    }
    Ok(best)
}

/// `generalized_diameter` for every nonempty subset at once.
pub fn generalized_diameter_table(tau: &SetFunction, k: u32) -> Result<Vec<f64>> {
    if k < 1 {
        return Err(Error::input("generalized diameter needs k >= 1"));
    }
    let vals = tau.values();
    Ok(max_capped_subset_table(tau.universe().len(), k, |mask| {
        vals[(mask - 1) as usize]
    }))
}

/// The level-table family that is k-increasing but not (k+1)-increasing:
/// `tau(A) = t_{|A|}` for `2 <= |A| <= k+1` and `t_{k+2}` beyond, with
/// `t_2 < ... < t_{k+1}` in `(1,2)` and `t_k < t_{k+2} < t_{k+1}`.
///
/// `t` lists `t_2 ..= t_{k+2}` (length k+1); when absent the defaults are
/// `t_i = 1 + (i-1)/(k+2)` for `i <= k+1` and `t_{k+2} = 1 + (k-0.5)/(k+2)`.
pub fn example_2_5(n: u32, k: u32, t: Option<&[f64]>) -> Result<SetFunction> {
    if k < 2 {
        return Err(Error::input(format!("example needs k >= 2, got k = {k}")));
    }
    if n < k + 2 {
        return Err(Error::input(format!(
            "example needs n >= k + 2, got n = {n}, k = {k}"
        )));
    }
    if n as usize > MAX_UNIVERSE {
        return Err(Error::input(format!("n = {n} exceeds {MAX_UNIVERSE}")));
    }
    // levels[i] = t_{i+2}, i = 0 ..= k.
    let levels: Vec<f64> = match t {
        Some(t) => {
            if t.len() != (k + 1) as usize {
                return Err(Error::input(format!(
                    "expected {} level values t_2..t_{}, got {}",
                    k + 1,
                    k + 2,
                    t.len()
                )));
            }
            t.to_vec()
        }
        None => {
            let denom = (k + 2) as f64;
            let mut levels: Vec<f64> = (2..=k + 1).map(|i| 1.0 + (i - 1) as f64 / denom).collect();
            levels.push(1.0 + (k as f64 - 0.5) / denom);
            levels
        }
    };
    for (i, v) in levels.iter().enumerate() {
        if !(v.is_finite() && *v > 1.0 && *v < 2.0) {
            return Err(Error::input(format!(
                "violated constraint: t_{} = {v} must lie in (1, 2)",
                i + 2
            )));
        }
    }
    // t_i < t_{i+1} for i = 2..k, i.e. strictly increasing up to t_{k+1}.
    for i in 0..(k - 1) as usize {
        if levels[i] >= levels[i + 1] {
            return Err(Error::input(format!(
                "violated constraint: t_{} < t_{} (got {} >= {})",
                i + 2,
                i + 3,
                levels[i],
                levels[i + 1]
            )));
        }
    }
    let t_k = levels[(k - 2) as usize];
    let t_k1 = levels[(k - 1) as usize];
    let t_k2 = levels[k as usize];
    if !(t_k < t_k2 && t_k2 < t_k1) {
        return Err(Error::input(format!(
            "violated constraint: t_{k} < t_{} < t_{} (got {t_k}, {t_k2}, {t_k1})",
            k + 2,
            k + 1
        )));
    }
    let universe = Universe::lettered(n as usize)?;
    SetFunction::from_fn(universe, |s| {
        let c = s.cardinality();
        if c == 1 {
            0.0
        } else if c <= k + 1 {
            levels[(c - 2) as usize]
        } else {
            levels[k as usize]
        }
    })
}

/// A total table on the subsets of cardinality <= `k_cap` only.
///
/// JSON mirrors [`SetFunction`] with an extra `k_cap` field and keys
/// restricted to the cardinality cap.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialSetFunction {
    universe: Universe,
    k_cap: u32,
    values: BTreeMap<u32, f64>, // keyed by bitmask, all cards in [1, k_cap]
}

impl PartialSetFunction {
    pub fn new(universe: Universe, k_cap: u32, values: BTreeMap<u32, f64>) -> Result<Self> {
        if k_cap < 1 {
            return Err(Error::input("k_cap must be at least 1"));
        }
        let n = universe.len() as u32;
        let cap = k_cap.min(n);
        let mut expected: usize = 0;
        let mut binom: u128 = 1;
        for j in 1..=cap {
            binom = binom * (n - j + 1) as u128 / j as u128;
            expected += binom as usize;
        }
        if values.len() != expected {
            return Err(Error::input(format!(
                "partial table needs {expected} values for n = {n}, k_cap = {k_cap}, got {}",
                values.len()
            )));
        }
        for (&mask, v) in &values {
            let s = Subset::from_bits(mask);
            if s.is_empty() || mask & !universe.full_mask() != 0 || s.cardinality() > k_cap {
                return Err(Error::input(format!(
                    "mask {mask:#b} outside the partial domain"
                )));
            }
            if !v.is_finite() {
                return Err(Error::input("partial table value is not finite"));
            }
        }
        Ok(PartialSetFunction {
            universe,
            k_cap,
            values,
        })
    }

    pub fn from_fn(
        universe: Universe,
        k_cap: u32,
        mut f: impl FnMut(Subset) -> f64,
    ) -> Result<Self> {
        let mut values = BTreeMap::new();
        for s in universe.subsets() {
            if s.cardinality() <= k_cap {
                values.insert(s.bits(), f(s));
            }
        }
        PartialSetFunction::new(universe, k_cap, values)
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn k_cap(&self) -> u32 {
        self.k_cap
    }

    pub fn eval(&self, s: Subset) -> Result<f64> {
        self.values.get(&s.bits()).copied().ok_or_else(|| {
            Error::input(format!(
                "subset of cardinality {} outside the partial domain (k_cap = {})",
                s.cardinality(),
                self.k_cap
            ))
        })
    }

    /// Entries in ascending mask order.
    pub fn iter(&self) -> impl Iterator<Item = (Subset, f64)> + '_ {
        self.values
            .iter()
            .map(|(&mask, &v)| (Subset::from_bits(mask), v))
    }
}

impl Serialize for PartialSetFunction {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        struct Ordered<'a>(&'a PartialSetFunction);
        impl Serialize for Ordered<'_> {
            fn serialize<S: Serializer>(
                &self,
                serializer: S,
            ) -> std::result::Result<S::Ok, S::Error> {
                let mut map = serializer.serialize_map(Some(self.0.values.len()))?;
                for (s, v) in self.0.iter() {
                    let key = canonical_subset_key(s, &self.0.universe)
                        .expect("nonempty by construction");
                    map.serialize_entry(&key, &v)?;
                }
                map.end()
            }
        }
        let mut st = serializer.serialize_struct("PartialSetFunction", 3)?;
        st.serialize_field("universe", self.universe.names())?;
        st.serialize_field("k_cap", &self.k_cap)?;
        st.serialize_field("values", &Ordered(self))?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for PartialSetFunction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = PartialSetFunction;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a partial set function object")
            }
            fn visit_map<A: MapAccess<'de>>(
                self,
                mut map: A,
            ) -> std::result::Result<Self::Value, A::Error> {
                let mut names: Option<Vec<String>> = None;
                let mut k_cap: Option<u32> = None;
                let mut raw: Option<KeyedValues> = None;
                while let Some(field) = map.next_key::<String>()? {
                    match field.as_str() {
                        "universe" => names = Some(map.next_value()?),
                        "k_cap" => k_cap = Some(map.next_value()?),
                        "values" => raw = Some(map.next_value()?),
                        other => {
                            return Err(de::Error::unknown_field(
                                other,
                                &["universe", "k_cap", "values"],
                            ))
                        }
                    }
                }
                let names = names.ok_or_else(|| de::Error::missing_field("universe"))?;
                let k_cap = k_cap.ok_or_else(|| de::Error::missing_field("k_cap"))?;
                let raw = raw.ok_or_else(|| de::Error::missing_field("values"))?;
                let universe = Universe::new(names).map_err(de::Error::custom)?;
                let resolved =
                    resolve_entries(&universe, &raw.0, k_cap).map_err(de::Error::custom)?;
                let values: BTreeMap<u32, f64> =
                    resolved.into_iter().map(|(s, v)| (s.bits(), v)).collect();
                PartialSetFunction::new(universe, k_cap, values).map_err(de::Error::custom)
            }
        }
        deserializer.deserialize_map(V)
    }
}

/// Restrict a symmetric G-metric to the partial table it determines on
/// subsets of cardinality <= 3. Well-defined only under symmetry, which is
/// verified here; the violating pair is named otherwise.
pub fn g_to_partial(g: &GMetricTable, tol: Tolerance) -> Result<PartialSetFunction> {
    let u = g.universe();
    let n = u.len();
    for x in 0..n {
        for y in (x + 1)..n {
            let lhs = g.value_multiset((x, y, y));
            let rhs = g.value_multiset((x, x, y));
            if !tol.eq(lhs, rhs) {
                return Err(Error::input(format!(
                    "G is not symmetric: G({x1},{y1},{y1}) = {lhs} but G({y1},{x1},{x1}) = {rhs}",
                    x1 = u.label(x),
                    y1 = u.label(y),
                )));
            }
        }
    }
    PartialSetFunction::from_fn(u.clone(), 3, |s| {
        let idx: Vec<usize> = s.indices().collect();
        match idx.as_slice() {
            [x] => g.value_multiset((*x, *x, *x)),
            [x, y] => g.value_multiset((*x, *y, *y)),
            [x, y, z] => g.value_multiset((*x, *y, *z)),
            _ => unreachable!("k_cap = 3"),
        }
    })
}

/// Verify the extension hypotheses on a partial table: increasing on its
/// domain, zero exactly on singletons, and the triangle restricted to
/// triples whose unions stay in the domain.
fn verify_extension_preconditions(pt: &PartialSetFunction, tol: Tolerance) -> Result<()> {
    let u = pt.universe();
    let n = u.len();
    let cap = pt.k_cap;
    let key = |mask: u32| subset_key_str(mask, u);

    // Zero exactly on singletons.
    for (s, v) in pt.iter() {
        if s.cardinality() == 1 {
            if !tol.eq(v, 0.0) {
                return Err(Error::input(format!(
                    "partial table violates (value = 0 iff singleton): value({}) = {v}",
                    key(s.bits())
                )));
            }
        } else if !tol.positive(v) {
            return Err(Error::input(format!(
                "partial table violates (value = 0 iff singleton): value({}) = {v}",
                key(s.bits())
            )));
        }
    }
    // Increasing on the domain.
    for (a, va) in pt.iter() {
        for b in nonempty_submasks(a) {
            let vb = pt.eval(b)?;
            if !tol.le(vb, va) {
                return Err(Error::input(format!(
                    "partial table is not increasing: value({}) = {vb} > value({}) = {va}",
                    key(b.bits()),
                    key(a.bits())
                )));
            }
        }
    }
    // Restricted triangle. Increase was verified above, so checking
    // singleton C suffices: for general C pick c in C, then
    // value(A u {c}) <= value(A u C) by increase.
    for (d, vd) in pt.iter() {
        let dm = d.bits();
        // Ordered covers (A, B) of D: every element of D goes to A, B or
        // both; skip empty sides.
        for a_side in submasks_with_empty_bits(dm) {
            let forced_b = dm & !a_side;
            for extra in submasks_with_empty_bits(a_side) {
                let b_side = forced_b | extra;
                if a_side == 0 || b_side == 0 {
                    continue;
                }
                for c in 0..n {
                    let bit = 1u32 << c;
                    let ac = a_side | bit;
                    let bc = b_side | bit;
                    if ac.count_ones() > cap || bc.count_ones() > cap {
                        continue;
                    }
                    let vac = pt.eval(Subset::from_bits(ac))?;
                    let vbc = pt.eval(Subset::from_bits(bc))?;
                    if !tol.le(vd, vac + vbc) {
                        return Err(Error::input(format!(
                            "partial table violates the restricted triangle: \
                             value({}) = {vd} > value({}) + value({}) = {}",
                            key(dm),
                            key(ac),
                            key(bc),
                            vac + vbc
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

fn subset_key_str(mask: u32, u: &Universe) -> String {
    canonical_subset_key(Subset::from_bits(mask), u).expect("nonempty")
}

fn submasks_with_empty_bits(mask: u32) -> impl Iterator<Item = u32> {
    crate::space::submasks_with_empty(Subset::from_bits(mask)).map(|s| s.bits())
}

/// Extend a partial table to the whole lattice by
/// `tau(A) = max { value(B) : B subseteq A, |B| <= k_cap }`.
///
/// The three extension hypotheses are verified first; the restriction of
/// the output to the partial domain reproduces the input exactly.
pub fn extend_partial(pt: &PartialSetFunction, tol: Tolerance) -> Result<SetFunction> {
    if pt.k_cap < 2 {
        return Err(Error::input(
            "extension from k_cap = 1 is degenerate: every extension value would be 0",
        ));
    }
    verify_extension_preconditions(pt, tol)?;
    let n = pt.universe().len();
    let values = &pt.values;
    let table = max_capped_subset_table(n, pt.k_cap, |mask| values[&mask]);
    SetFunction::new(pt.universe().clone(), table)
}

/// Symmetric G-metric to increasing extended metric with `tau^3 = G`:
/// the composition of [`g_to_partial`] and [`extend_partial`].
pub fn g_to_balk(g: &GMetricTable, cfg: &CheckConfig) -> Result<SetFunction> {
    let report = check_symmetric_g(g, cfg);
    if !report.passed() {
        let w = report.witness.as_ref().expect("fail carries a witness");
        return Err(Error::input(format!(
            "input is not a symmetric G-metric; violated: {} (lhs {}, rhs {})",
            w.relation, w.lhs, w.rhs
        )));
    }
    let pt = g_to_partial(g, cfg.tolerance)
        .map_err(|e| Error::inconsistency(format!("G passed the checker yet {e}")))?;
    // The extension hypotheses are guaranteed for symmetric G-metrics, so a
    // failure here means the checker and the construction disagree.
    extend_partial(&pt, cfg.tolerance)
        .map_err(|e| Error::inconsistency(format!("G passed the checker yet {e}")))
}

/// Result of projecting an extended metric to its ternary table.
#[derive(Debug)]
pub struct BalkToG {
    pub table: GMetricTable,
    /// Present when the input is not increasing: the G-metric guarantee is
    /// void, and this is the checker's report on the emitted table.
    pub diagnostic: Option<CheckReport>,
}

/// The ternary projection `G = tau^3` of an extended metric. A symmetric
/// G-metric whenever `tau` is increasing; for non-increasing input the
/// table is still emitted, with the checker report attached.
pub fn balk_to_g(tau: &SetFunction, cfg: &CheckConfig) -> Result<BalkToG> {
    let balk = check_balk(tau, cfg);
    if !balk.passed() {
        let w = balk.witness.as_ref().expect("fail carries a witness");
        return Err(Error::input(format!(
            "input is not an extended metric; violated: {} (lhs {}, rhs {})",
            w.relation, w.lhs, w.rhs
        )));
    }
    let vals = tau.values();
    let table = GMetricTable::from_fn(tau.universe().clone(), |(i, j, k)| {
        let mask = (1u32 << i) | (1u32 << j) | (1u32 << k);
        vals[(mask - 1) as usize]
    })?;
    let increasing = check_increasing(tau, cfg);
    let diagnostic = if increasing.passed() {
        None
    } else {
        Some(check_symmetric_g(&table, cfg))
    };
    Ok(BalkToG { table, diagnostic })
}

/// Deterministic random metric: `n` points sampled uniformly in the unit
/// square, straight-line distances. Resamples on near-coincident points so
/// positivity holds with slack.
pub fn random_metric(n: u32, seed: u64) -> Result<FiniteMetric> {
    if n < 1 {
        return Err(Error::input("random metric needs n >= 1"));
    }
    if n as usize > MAX_UNIVERSE {
        return Err(Error::input(format!("n = {n} exceeds {MAX_UNIVERSE}")));
    }
    let n = n as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = loop {
        let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen::<f64>(), rng.gen::<f64>())).collect();
        let mut ok = true;
        'sep: for i in 0..n {
            for j in (i + 1)..n {
                let (dx, dy) = (pts[i].0 - pts[j].0, pts[i].1 - pts[j].1);
                if (dx * dx + dy * dy).sqrt() <= 1e-6 {
                    ok = false;
                    break 'sep;
                }
            }
        }
        if ok {
            break pts;
        }
    };
    let mut dist = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let (dx, dy) = (points[i].0 - points[j].0, points[i].1 - points[j].1);
            let d = (dx * dx + dy * dy).sqrt();
            dist[i][j] = d;
            dist[j][i] = d;
        }
    }
    FiniteMetric::new(Universe::lettered(n)?, dist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::image_set;

    fn line_metric() -> FiniteMetric {
        // Points 0, 1, 3 on the line.
        FiniteMetric::new(
            Universe::lettered(3).unwrap(),
            vec![
                vec![0.0, 1.0, 3.0],
                vec![1.0, 0.0, 2.0],
                vec![3.0, 2.0, 0.0],
            ],
        )
        .unwrap()
    }

    #[test]
    fn diameter_on_the_line() {
        let cfg = CheckConfig::default();
        let tau = diameter_balk(&line_metric(), &cfg).unwrap();
        let u = tau.universe().clone();
        assert_eq!(tau.eval(image_set(&[0, 1, 2], &u).unwrap()).unwrap(), 3.0);
        assert_eq!(tau.eval(image_set(&[0, 1], &u).unwrap()).unwrap(), 1.0);
        assert_eq!(tau.eval(image_set(&[0], &u).unwrap()).unwrap(), 0.0);
        assert!(check_balk(&tau, &cfg).passed());
        assert!(check_increasing(&tau, &cfg).passed());
    }

    #[test]
    fn diameter_rejects_invalid_metric() {
        let bad = FiniteMetric::new(
            Universe::lettered(2).unwrap(),
            vec![vec![0.0, 0.0], vec![0.0, 0.0]],
        )
        .unwrap();
        assert!(diameter_balk(&bad, &CheckConfig::default()).is_err());
    }

    #[test]
    fn tau_squared_inverts_diameter_on_pairs() {
        let cfg = CheckConfig::default();
        let d = line_metric();
        let tau = diameter_balk(&d, &cfg).unwrap();
        let back = tau_squared(&tau);
        assert_eq!(back, d);
    }

    #[test]
    fn projection_collapses_duplicates() {
        let cfg = CheckConfig::default();
        let tau = diameter_balk(&line_metric(), &cfg).unwrap();
        assert_eq!(project_tau_k(&tau, &[0, 0, 1]).unwrap(), 1.0);
        assert_eq!(project_tau_k(&tau, &[1, 0, 0]).unwrap(), 1.0);
        assert_eq!(project_tau_k(&tau, &[2]).unwrap(), 0.0);
        assert!(project_tau_k(&tau, &[]).is_err());
    }

    #[test]
    fn example_2_5_validation() {
        assert!(example_2_5(3, 2, None).is_err()); // needs n >= k + 2
        assert!(example_2_5(4, 1, None).is_err());
        assert!(example_2_5(4, 2, Some(&[1.5, 1.4, 1.45])).is_err()); // t2 >= t3
        assert!(example_2_5(4, 2, Some(&[0.5, 1.4, 1.2])).is_err()); // outside (1,2)
        assert!(example_2_5(4, 2, None).is_ok());
    }

    #[test]
    fn example_2_5_levels() {
        // k = 2 defaults: t2 = 1.25, t3 = 1.5, t4 = 1.375.
        let tau = example_2_5(4, 2, None).unwrap();
        let u = tau.universe().clone();
        assert_eq!(tau.eval(image_set(&[0], &u).unwrap()).unwrap(), 0.0);
        assert_eq!(tau.eval(image_set(&[0, 1], &u).unwrap()).unwrap(), 1.25);
        assert_eq!(tau.eval(image_set(&[0, 1, 2], &u).unwrap()).unwrap(), 1.5);
        assert_eq!(tau.eval(image_set(&[0, 1, 2, 3], &u).unwrap()).unwrap(), 1.375);
    }

    #[test]
    fn extension_from_k_cap_one_is_rejected() {
        let u = Universe::lettered(3).unwrap();
        let pt = PartialSetFunction::from_fn(u, 1, |_| 0.0).unwrap();
        assert!(extend_partial(&pt, Tolerance::default()).is_err());
    }

    #[test]
    fn extension_reproduces_diameter_from_pairs() {
        let cfg = CheckConfig::default();
        let tau = diameter_balk(&line_metric(), &cfg).unwrap();
        let pt = PartialSetFunction::from_fn(tau.universe().clone(), 2, |s| {
            tau.eval(s).unwrap()
        })
        .unwrap();
        let extended = extend_partial(&pt, cfg.tolerance).unwrap();
        assert_eq!(extended, tau);
    }

    #[test]
    fn random_metric_is_deterministic_and_valid() {
        let a = random_metric(6, 42).unwrap();
        let b = random_metric(6, 42).unwrap();
        assert_eq!(a, b);
        assert!(check_metric(&a, &CheckConfig::default()).passed());
        let one = random_metric(1, 7).unwrap();
        assert_eq!(one.rows(), &[vec![0.0]]);
        assert!(random_metric(25, 0).is_err());
    }

    #[test]
    fn partial_json_round_trip() {
        let u = Universe::lettered(3).unwrap();
        let pt = PartialSetFunction::from_fn(u, 2, |s| s.cardinality() as f64 - 1.0).unwrap();
        let text = serde_json::to_string(&pt).unwrap();
        let back: PartialSetFunction = serde_json::from_str(&text).unwrap();
        assert_eq!(back, pt);
        // Keys above the cap are rejected.
        let bad = r#"{"universe":["a","b"],"k_cap":1,"values":{"a":0.0,"b":0.0,"a,b":1.0}}"#;
        assert!(serde_json::from_str::<PartialSetFunction>(bad).is_err());
    }
}
