//! Permutation-invariant ternary tables (candidate G-metrics).

use std::collections::BTreeMap;
use std::fmt;

use serde::de::{self, MapAccess, Visitor};
use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::space::Universe;

/// A sorted index triple with repetition: the canonical form of a size-<=3
/// multiset of points.
pub type Multiset3 = (usize, usize, usize);

/// A candidate G-metric stored by multiset, so permutation invariance
/// (condition (iv)) holds by construction.
///
/// JSON form: `{"points": ["a","b"], "values": {"a,a,a": 0.0, "a,a,b": 1.0,
/// ...}}` with one entry per multiset `{i,j,k}`, `i <= j <= k`, keys in
/// sorted-label form. The parser rejects missing, duplicate, unsorted and
/// unknown keys.
#[derive(Clone, Debug, PartialEq)]
pub struct GMetricTable {
    universe: Universe,
    values: BTreeMap<Multiset3, f64>,
}

/// Number of size-3 multisets over `n` points: `C(n+2, 3)`.
pub fn multiset_count(n: usize) -> usize {
    n * (n + 1) * (n + 2) / 6
}

impl GMetricTable {
    pub fn new(universe: Universe, values: BTreeMap<Multiset3, f64>) -> Result<Self> {
        let n = universe.len();
        if values.len() != multiset_count(n) {
            return Err(Error::input(format!(
                "G table needs {} multiset values for {n} points, got {}",
                multiset_count(n),
                values.len()
            )));
        }
        for (&(i, j, k), v) in &values {
            if !(i <= j && j <= k && k < n) {
                return Err(Error::input(format!(
                    "multiset ({i},{j},{k}) is not sorted inside the universe"
                )));
            }
            if !v.is_finite() {
                return Err(Error::input(format!(
                    "G value for multiset ({i},{j},{k}) is not finite"
                )));
            }
        }
        Ok(GMetricTable { universe, values })
    }

    /// Build by evaluating a closure on every sorted multiset.
    pub fn from_fn(universe: Universe, mut f: impl FnMut(Multiset3) -> f64) -> Result<Self> {
        let n = universe.len();
        let mut values = BTreeMap::new();
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    values.insert((i, j, k), f((i, j, k)));
                }
            }
        }
        GMetricTable::new(universe, values)
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    /// Evaluate on an arbitrary ordered triple of indices.
    pub fn value(&self, x: usize, y: usize, z: usize) -> f64 {
        let mut t = [x, y, z];
        t.sort_unstable();
        self.values[&(t[0], t[1], t[2])]
    }

    /// Lookup by a sorted multiset.
    pub fn value_multiset(&self, m: Multiset3) -> f64 {
        self.values[&m]
    }

    /// Entries in canonical (sorted multiset) order.
    pub fn iter(&self) -> impl Iterator<Item = (Multiset3, f64)> + '_ {
        self.values.iter().map(|(&m, &v)| (m, v))
    }

    pub fn multiset_key(&self, m: Multiset3) -> String {
        format!(
            "{},{},{}",
            self.universe.label(m.0),
            self.universe.label(m.1),
            self.universe.label(m.2)
        )
    }
}

fn parse_multiset_key(key: &str, universe: &Universe) -> Result<Multiset3> {
    let parts: Vec<&str> = key.split(',').collect();
    if parts.len() != 3 {
        return Err(Error::input(format!(
            "G key {key:?} must list exactly three labels"
        )));
    }
    let mut idx = [0usize; 3];
    for (slot, part) in idx.iter_mut().zip(&parts) {
        *slot = universe
            .index_of(part)
            .ok_or_else(|| Error::input(format!("unknown label {part:?} in key {key:?}")))?;
    }
    if !(idx[0] <= idx[1] && idx[1] <= idx[2]) {
        return Err(Error::input(format!(
            "G key {key:?} is not in sorted-multiset order"
        )));
    }
    Ok((idx[0], idx[1], idx[2]))
}

impl Serialize for GMetricTable {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("GMetricTable", 2)?;
        st.serialize_field("points", self.universe.names())?;
        st.serialize_field("values", &OrderedValues(self))?;
        st.end()
    }
}

struct OrderedValues<'a>(&'a GMetricTable);

impl Serialize for OrderedValues<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let g = self.0;
        let mut map = serializer.serialize_map(Some(g.values.len()))?;
        for (m, v) in g.iter() {
            map.serialize_entry(&g.multiset_key(m), &v)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for GMetricTable {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = GMetricTable;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a G table object with points and values")
            }
            fn visit_map<A: MapAccess<'de>>(
                self,
                mut map: A,
            ) -> std::result::Result<Self::Value, A::Error> {
                let mut names: Option<Vec<String>> = None;
                let mut raw: Option<crate::set_function::KeyedValues> = None;
                while let Some(field) = map.next_key::<String>()? {
                    match field.as_str() {
                        "points" => {
                            if names.is_some() {
                                return Err(de::Error::duplicate_field("points"));
                            }
                            names = Some(map.next_value()?);
                        }
                        "values" => {
                            if raw.is_some() {
                                return Err(de::Error::duplicate_field("values"));
                            }
                            raw = Some(map.next_value()?);
                        }
                        other => {
                            return Err(de::Error::unknown_field(other, &["points", "values"]))
                        }
                    }
                }
                let names = names.ok_or_else(|| de::Error::missing_field("points"))?;
                let raw = raw.ok_or_else(|| de::Error::missing_field("values"))?;
                let universe = Universe::new(names).map_err(de::Error::custom)?;
                let mut values = BTreeMap::new();
                for (key, v) in &raw.0 {
                    let m = parse_multiset_key(key, &universe).map_err(de::Error::custom)?;
                    if values.insert(m, *v).is_some() {
                        return Err(de::Error::custom(format!("duplicate key {key:?}")));
                    }
                }
                GMetricTable::new(universe, values).map_err(de::Error::custom)
            }
        }
        deserializer.deserialize_map(V)
    }
}
