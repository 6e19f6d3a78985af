//! Finite universes and their nonempty subsets.
//!
//! A [`Universe`] is an ordered list of distinct labels; a [`Subset`] is a
//! bitmask over universe indices. All set functions in this crate are total
//! tables over the nonzero bitmasks, so the universe size is capped at 24
//! (2^24 - 1 stored values).

use crate::error::{Error, Result};

/// Hard cap on universe size: bitmask width and 2^n table storage.
pub const MAX_UNIVERSE: usize = 24;

/// An ordered set of distinct, nonempty element labels.
///
/// Labels must not contain commas: the canonical subset keys of the file
/// formats are comma-joined label lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Universe {
    names: Vec<String>,
}

impl Universe {
    pub fn new(names: Vec<String>) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::input("universe must have at least one element"));
        }
        if names.len() > MAX_UNIVERSE {
            return Err(Error::input(format!(
                "universe has {} elements, maximum is {MAX_UNIVERSE}",
                names.len()
            )));
        }
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() {
                return Err(Error::input(format!("label {i} is empty")));
            }
            if name.contains(',') {
                return Err(Error::input(format!(
                    "label {name:?} contains a comma, which the key format reserves"
                )));
            }
            if names[..i].contains(name) {
                return Err(Error::input(format!("duplicate label {name:?}")));
            }
        }
        Ok(Universe { names })
    }

    /// Universe with labels `a`, `b`, ... (n <= 24).
    pub fn lettered(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_UNIVERSE {
            return Err(Error::input(format!(
                "lettered universe needs 1..={MAX_UNIVERSE} elements, got {n}"
            )));
        }
        Universe::new(
            (0..n)
                .map(|i| ((b'a' + i as u8) as char).to_string())
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        false // by construction
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn label(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.names.iter().position(|n| n == label)
    }

    /// Bitmask with every element present.
    pub fn full_mask(&self) -> u32 {
        if self.names.len() == 32 {
            u32::MAX
        } else {
            (1u32 << self.names.len()) - 1
        }
    }

    /// Number of nonempty subsets, `2^n - 1`.
    pub fn subset_count(&self) -> u64 {
        (1u64 << self.names.len()) - 1
    }

    /// All nonempty subsets in ascending bitmask order (the canonical order
    /// of the file formats).
    pub fn subsets(&self) -> impl Iterator<Item = Subset> {
        (1..=self.full_mask()).map(Subset::from_bits)
    }
}

/// A subset of a universe, stored as a bitmask over element indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subset(u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn from_bits(bits: u32) -> Self {
        Subset(bits)
    }

    pub fn singleton(index: usize) -> Self {
        Subset(1 << index)
    }

    pub fn bits(&self) -> u32 {
        self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn cardinality(&self) -> u32 {
        self.0.count_ones()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.0 & (1 << index) != 0
    }

    pub fn union(&self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub fn is_subset_of(&self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn with(&self, index: usize) -> Subset {
        Subset(self.0 | (1 << index))
    }

    pub fn without(&self, index: usize) -> Subset {
        Subset(self.0 & !(1 << index))
    }

    /// Indices of the elements, ascending.
    pub fn indices(&self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }
}

/// Nonempty submasks of `s`, in descending bitmask order (includes `s`).
pub fn nonempty_submasks(s: Subset) -> impl Iterator<Item = Subset> {
    let full = s.bits();
    let mut cur = full;
    let mut done = full == 0;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let out = cur;
        if cur == 0 {
            return None;
        }
        cur = (cur - 1) & full;
        if cur == 0 {
            done = true;
        }
        Some(Subset::from_bits(out))
    })
}

/// All submasks of `s` including the empty one, descending from `s`.
pub fn submasks_with_empty(s: Subset) -> impl Iterator<Item = Subset> {
    let full = s.bits();
    let mut cur = full;
    let mut done = false;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let out = cur;
        if cur == 0 {
            done = true;
        } else {
            cur = (cur - 1) & full;
        }
        Some(Subset::from_bits(out))
    })
}

/// The image of a point list: the subset of distinct indices occurring in it.
pub fn image_set(points: &[usize], universe: &Universe) -> Result<Subset> {
    if points.is_empty() {
        return Err(Error::input("image of an empty point list is undefined"));
    }
    let mut bits = 0u32;
    for &p in points {
        if p >= universe.len() {
            return Err(Error::input(format!(
                "point index {p} out of range for a universe of {}",
                universe.len()
            )));
        }
        bits |= 1 << p;
    }
    Ok(Subset(bits))
}

/// Canonical file-format key of a nonempty subset: comma-joined labels in
/// universe order.
pub fn canonical_subset_key(s: Subset, universe: &Universe) -> Result<String> {
    if s.is_empty() {
        return Err(Error::input("empty subset has no canonical key"));
    }
    if s.bits() & !universe.full_mask() != 0 {
        return Err(Error::input("subset outside the universe"));
    }
    Ok(s.indices()
        .map(|i| universe.label(i))
        .collect::<Vec<_>>()
        .join(","))
}

/// Parse a canonical subset key. Rejects unknown labels, duplicates and
/// out-of-order labels, so the key encoding stays bijective.
pub fn parse_subset_key(key: &str, universe: &Universe) -> Result<Subset> {
    if key.is_empty() {
        return Err(Error::input("empty subset key"));
    }
    let mut bits = 0u32;
    let mut last: Option<usize> = None;
    for part in key.split(',') {
        let idx = universe
            .index_of(part)
            .ok_or_else(|| Error::input(format!("unknown label {part:?} in key {key:?}")))?;
        if let Some(prev) = last {
            if idx <= prev {
                return Err(Error::input(format!(
                    "key {key:?} is not in canonical universe order"
                )));
            }
        }
        last = Some(idx);
        bits |= 1 << idx;
    }
    Ok(Subset(bits))
}
