//! Total real-valued tables on the nonempty subsets of a finite universe.

use std::fmt;

use serde::de::{self, MapAccess, Visitor};
use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::space::{canonical_subset_key, parse_subset_key, Subset, Universe};

/// A candidate extended metric: one finite value per nonempty subset.
///
/// Totality is enforced at construction, so evaluation never fails on a
/// valid nonempty subset. Instances are immutable.
///
/// JSON form: `{"universe": ["a","b"], "values": {"a": 0.0, "b": 0.0,
/// "a,b": 1.5}}` with all `2^n - 1` canonical keys mandatory; the parser
/// rejects missing, duplicate and unknown keys. Values are emitted in
/// ascending bitmask order.
#[derive(Clone, Debug, PartialEq)]
pub struct SetFunction {
    universe: Universe,
    values: Vec<f64>, // indexed by bitmask - 1
}

impl SetFunction {
    /// Build from a flat table in ascending bitmask order (`values[mask-1]`).
    pub fn new(universe: Universe, values: Vec<f64>) -> Result<Self> {
        let expect = universe.subset_count() as usize;
        if values.len() != expect {
            return Err(Error::input(format!(
                "set function needs {expect} values for a universe of {}, got {}",
                universe.len(),
                values.len()
            )));
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::input(format!(
                "set function value for mask {} is not finite",
                bad + 1
            )));
        }
        Ok(SetFunction { universe, values })
    }

    /// Build by evaluating a closure on every nonempty subset.
    pub fn from_fn(universe: Universe, f: impl FnMut(Subset) -> f64) -> Result<Self> {
        let values: Vec<f64> = universe.subsets().map(f).collect();
        SetFunction::new(universe, values)
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    /// Table lookup; errors on the empty subset or a subset outside the
    /// universe.
    pub fn eval(&self, s: Subset) -> Result<f64> {
        if s.is_empty() {
            return Err(Error::input("tau is undefined on the empty subset"));
        }
        if s.bits() & !self.universe.full_mask() != 0 {
            return Err(Error::input("subset outside the universe"));
        }
        Ok(self.values[(s.bits() - 1) as usize])
    }

    /// Raw table, indexed by `bitmask - 1`. Intended for enumeration loops.
    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

impl Serialize for SetFunction {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("SetFunction", 2)?;
        st.serialize_field("universe", self.universe.names())?;
        st.serialize_field("values", &OrderedValues(self))?;
        st.end()
    }
}

struct OrderedValues<'a>(&'a SetFunction);

impl Serialize for OrderedValues<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let sf = self.0;
        let mut map = serializer.serialize_map(Some(sf.values.len()))?;
        for s in sf.universe.subsets() {
            let key = canonical_subset_key(s, &sf.universe).expect("nonempty by construction");
            map.serialize_entry(&key, &sf.values[(s.bits() - 1) as usize])?;
        }
        map.end()
    }
}

/// Values object captured as an ordered entry list, so coverage can be
/// validated once the universe is known.
pub(crate) struct KeyedValues(pub Vec<(String, f64)>);

impl<'de> Deserialize<'de> for KeyedValues {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = KeyedValues;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map from subset keys to reals")
            }
            fn visit_map<A: MapAccess<'de>>(
                self,
                mut map: A,
            ) -> std::result::Result<Self::Value, A::Error> {
                let mut entries = Vec::with_capacity(map.size_hint().unwrap_or(0));
                while let Some((k, v)) = map.next_entry::<String, f64>()? {
                    entries.push((k, v));
                }
                Ok(KeyedValues(entries))
            }
        }
        deserializer.deserialize_map(V)
    }
}

/// Resolve keyed entries against a universe into a dense table over all
/// masks with cardinality in `[1, max_card]`. Rejects duplicates, unknown
/// keys, keys above the cardinality cap, and missing keys.
pub(crate) fn resolve_entries(
    universe: &Universe,
    entries: &[(String, f64)],
    max_card: u32,
) -> Result<Vec<(Subset, f64)>> {
    let mut table: Vec<Option<f64>> = vec![None; universe.subset_count() as usize];
    for (key, value) in entries {
        let s = parse_subset_key(key, universe)?;
        if s.cardinality() > max_card {
            return Err(Error::input(format!(
                "key {key:?} has cardinality {} above the cap {max_card}",
                s.cardinality()
            )));
        }
        if !value.is_finite() {
            return Err(Error::input(format!("value for key {key:?} is not finite")));
        }
        let slot = &mut table[(s.bits() - 1) as usize];
        if slot.is_some() {
            return Err(Error::input(format!("duplicate key {key:?}")));
        }
        *slot = Some(*value);
    }
    let mut out = Vec::new();
    for s in universe.subsets() {
        if s.cardinality() > max_card {
            continue;
        }
        match table[(s.bits() - 1) as usize] {
            Some(v) => out.push((s, v)),
            None => {
                let key = canonical_subset_key(s, universe)?;
                return Err(Error::input(format!("missing key {key:?}")));
            }
        }
    }
    Ok(out)
}

impl<'de> Deserialize<'de> for SetFunction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = SetFunction;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a set function object with universe and values")
            }
            fn visit_map<A: MapAccess<'de>>(
                self,
                mut map: A,
            ) -> std::result::Result<Self::Value, A::Error> {
                let mut names: Option<Vec<String>> = None;
                let mut raw: Option<KeyedValues> = None;
                while let Some(field) = map.next_key::<String>()? {
                    match field.as_str() {
                        "universe" => {
                            if names.is_some() {
                                return Err(de::Error::duplicate_field("universe"));
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
                            return Err(de::Error::unknown_field(other, &["universe", "values"]))
                        }
                    }
                }
                let names = names.ok_or_else(|| de::Error::missing_field("universe"))?;
                let raw = raw.ok_or_else(|| de::Error::missing_field("values"))?;
                let universe = Universe::new(names).map_err(de::Error::custom)?;
                let resolved = resolve_entries(&universe, &raw.0, u32::MAX)
                    .map_err(de::Error::custom)?;
                let mut values = vec![0.0; universe.subset_count() as usize];
                for (s, v) in resolved {
                    values[(s.bits() - 1) as usize] = v;
                }
                SetFunction::new(universe, values).map_err(de::Error::custom)
            }
        }
        deserializer.deserialize_map(V)
    }
}
