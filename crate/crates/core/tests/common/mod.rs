//! Shared test support: independent brute-force oracles (string-set based,
//! no bitmask machinery) and the generator suite spanning diameter-generated,
//! G-generated, level-table and perturbed-then-repaired extended metrics.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use balk_core::axioms::{check_balk, check_symmetric_g, CheckConfig};
use balk_core::construct::{diameter_balk, example_2_5, g_to_balk, random_metric};
use balk_core::{
    canonical_subset_key, parse_subset_key, CheckReport, FiniteMetric, GMetricTable, SetFunction,
    Subset, Universe,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type SetKey = BTreeSet<String>;

/// Margin of the default tolerance (1e-9 relative), reimplemented here so
/// the oracle does not share code with the implementation under test.
pub fn oracle_margin(a: f64, b: f64) -> f64 {
    1e-9 * 1.0_f64.max(a.abs()).max(b.abs())
}

/// Re-extract a set function as a label-set table through the public API.
pub fn label_table(tau: &SetFunction) -> BTreeMap<SetKey, f64> {
    let u = tau.universe();
    let mut out = BTreeMap::new();
    for s in u.subsets() {
        let key: SetKey = s.indices().map(|i| u.label(i).to_string()).collect();
        out.insert(key, tau.eval(s).unwrap());
    }
    out
}

/// Independent extended-metric check over a label-set table. Returns a
/// violation description, or None when the axioms hold.
pub fn naive_balk_violation(table: &BTreeMap<SetKey, f64>) -> Option<String> {
    for (set, &v) in table {
        if set.len() == 1 {
            if v.abs() > oracle_margin(v, 0.0) {
                return Some(format!("tau({set:?}) = {v} on a singleton"));
            }
        } else if v < oracle_margin(v, 0.0) {
            return Some(format!("tau({set:?}) = {v} not positive"));
        }
    }
    let keys: Vec<&SetKey> = table.keys().collect();
    for a in &keys {
        for b in &keys {
            for c in &keys {
                let ab: SetKey = a.union(b).cloned().collect();
                let ac: SetKey = a.union(c).cloned().collect();
                let cb: SetKey = c.union(b).cloned().collect();
                let lhs = table[&ab];
                let rhs = table[&ac] + table[&cb];
                if lhs > rhs + oracle_margin(lhs, rhs) {
                    return Some(format!("triangle fails on A={a:?} B={b:?} C={c:?}"));
                }
            }
        }
    }
    None
}

/// Independent G-metric check (conditions (i)-(iii), (v)) over labels.
pub fn naive_g_violation(g: &GMetricTable) -> Option<String> {
    let n = g.universe().len();
    for x in 0..n {
        let v = g.value(x, x, x);
        if v.abs() > oracle_margin(v, 0.0) {
            return Some(format!("G(x,x,x) = {v} at {x}"));
        }
        for y in 0..n {
            if x != y && g.value(x, x, y) < oracle_margin(g.value(x, x, y), 0.0) {
                return Some(format!("G(x,x,y) not positive at ({x},{y})"));
            }
        }
    }
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if z != y {
                    let (lhs, rhs) = (g.value(x, x, y), g.value(x, y, z));
                    if lhs > rhs + oracle_margin(lhs, rhs) {
                        return Some(format!("(iii) fails at ({x},{y},{z})"));
                    }
                }
                for a in 0..n {
                    let lhs = g.value(x, y, z);
                    let rhs = g.value(x, a, a) + g.value(a, y, z);
                    if lhs > rhs + oracle_margin(lhs, rhs) {
                        return Some(format!("(v) fails at ({x},{y},{z},{a})"));
                    }
                }
            }
        }
    }
    None
}

/// The max-pairwise-distance G table of a metric: always a symmetric
/// G-metric.
pub fn max_pairwise_g(d: &FiniteMetric) -> GMetricTable {
    GMetricTable::from_fn(d.universe().clone(), |(i, j, k)| {
        d.dist(i, j).max(d.dist(i, k)).max(d.dist(j, k))
    })
    .unwrap()
}

/// Deterministic G-generated extended metric.
pub fn g_generated(n: u32, seed: u64) -> (GMetricTable, SetFunction) {
    let d = random_metric(n, seed).unwrap();
    let g = max_pairwise_g(&d);
    let tau = g_to_balk(&g, &CheckConfig::default()).unwrap();
    (g, tau)
}

/// Perturb a diameter table multiplicatively, then repair the triangle by
/// relaxation sweeps (lower the left side onto the bound until a full sweep
/// is clean). Returns None when the repaired table fails the axioms.
pub fn perturbed_repaired(n: u32, seed: u64) -> Option<SetFunction> {
    let cfg = CheckConfig::default();
    let base = diameter_balk(&random_metric(n, seed).unwrap(), &cfg).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9).wrapping_add(7));
    let u = base.universe().clone();
    let full = u.full_mask();
    let mut vals: Vec<f64> = base.values().to_vec();
    for mask in 1..=full {
        if mask.count_ones() >= 2 {
            vals[(mask - 1) as usize] *= rng.gen_range(0.95..1.05);
        }
    }
    for _sweep in 0..50 {
        let mut dirty = false;
        for a in 1..=full {
            for b in 1..=full {
                for c in 1..=full {
                    let bound = vals[((a | c) - 1) as usize] + vals[((c | b) - 1) as usize];
                    let slot = ((a | b) - 1) as usize;
                    if vals[slot] > bound {
                        vals[slot] = bound;
                        dirty = true;
                    }
                }
            }
        }
        if !dirty {
            break;
        }
    }
    let tau = SetFunction::new(u, vals).ok()?;
    check_balk(&tau, &cfg).passed().then_some(tau)
}

/// Symmetry-preserving perturbation of a max-pairwise G table, rejection
/// sampled against the symmetric-G checker. Pair entries move jointly in
/// `[1, 1 + eta/2]`, distinct-triple entries in `[1 + eta/2, 1 + eta]`,
/// which keeps conditions (i)-(iii) by construction; the rectangle
/// inequality is what the rejection filters on.
pub fn rejection_sampled_g(n: u32, seed: u64) -> GMetricTable {
    const ETA: f64 = 0.005;
    let cfg = CheckConfig::default();
    for attempt in 0..500u64 {
        let d = random_metric(n, seed.wrapping_add(attempt.wrapping_mul(0x51ed_270b))).unwrap();
        let base = max_pairwise_g(&d);
        let mut rng =
            ChaCha8Rng::seed_from_u64(seed ^ attempt.wrapping_mul(0xdead_beef).wrapping_add(3));
        let nn = n as usize;
        let mut pair_factor = vec![vec![1.0f64; nn]; nn];
        for x in 0..nn {
            for y in (x + 1)..nn {
                let f = 1.0 + rng.gen_range(0.0..ETA / 2.0);
                pair_factor[x][y] = f;
                pair_factor[y][x] = f;
            }
        }
        let g = GMetricTable::from_fn(base.universe().clone(), |(i, j, k)| {
            let v = base.value_multiset((i, j, k));
            if i == j && j == k {
                v
            } else if i == j || j == k {
                let (x, y) = if i == j { (i, k) } else { (i, j) };
                v * pair_factor[x][y]
            } else {
                v * (1.0 + ETA / 2.0 + rng.gen_range(0.0..ETA / 2.0))
            }
        })
        .unwrap();
        if check_symmetric_g(&g, &cfg).passed() {
            return g;
        }
    }
    panic!("rejection sampling failed to produce a symmetric G-metric at n = {n}, seed = {seed}");
}

/// Deterministic alternative level parameters for the counterexample
/// family, distinct from the built-in defaults.
pub fn alt_levels(k: u32) -> Vec<f64> {
    // t_2 < ... < t_{k+1} tight under 1.9, t_{k+2} between the last two.
    let mut t: Vec<f64> = (0..k).map(|i| 1.1 + 0.8 * (i as f64) / k as f64).collect();
    let t_k = t[(k - 2) as usize];
    let t_k1 = t[(k - 1) as usize];
    t.push(0.5 * (t_k + t_k1) + 0.21 * (t_k1 - t_k));
    t
}

/// One named object of the generator suite.
pub struct Sample {
    pub name: String,
    pub tau: SetFunction,
}

/// The generator suite. `full` yields the 500+ objects of the acceptance
/// run; otherwise a fast subset with the same families.
pub fn generator_suite(full: bool) -> Vec<Sample> {
    let cfg = CheckConfig::default();
    let mut out = Vec::new();
    let diam_seeds: u64 = if full { 30 } else { 3 };
    for n in 2..=6u32 {
        for seed in 0..diam_seeds {
            let tau = diameter_balk(&random_metric(n, seed).unwrap(), &cfg).unwrap();
            out.push(Sample {
                name: format!("diam(n={n},seed={seed})"),
                tau,
            });
        }
    }
    let g_seeds: u64 = if full { 50 } else { 4 };
    for n in 3..=5u32 {
        for seed in 0..g_seeds {
            let (_, tau) = g_generated(n, seed);
            out.push(Sample {
                name: format!("g_gen(n={n},seed={seed})"),
                tau,
            });
        }
    }
    for k in 2..=4u32 {
        for n in (k + 2)..=7u32 {
            out.push(Sample {
                name: format!("example25(n={n},k={k})"),
                tau: example_2_5(n, k, None).unwrap(),
            });
            out.push(Sample {
                name: format!("example25(n={n},k={k},alt)"),
                tau: example_2_5(n, k, Some(&alt_levels(k))).unwrap(),
            });
        }
    }
    let perturbed_per_n: u64 = if full { 47 } else { 3 };
    for n in 3..=6u32 {
        let mut accepted = 0u64;
        let mut seed = 0u64;
        while accepted < perturbed_per_n {
            if let Some(tau) = perturbed_repaired(n, seed.wrapping_add(1000 * n as u64)) {
                out.push(Sample {
                    name: format!("repaired(n={n},seed={seed})"),
                    tau,
                });
                accepted += 1;
            }
            seed += 1;
            assert!(seed < 10 * perturbed_per_n + 50, "repair acceptance too low");
        }
    }
    out
}

/// Re-evaluate a failing report's witness against the object it came from,
/// independently of the checker: parse the slots, recompute both sides,
/// confirm the violation and the reported values.
pub fn witness_reproduces(tau: &SetFunction, report: &CheckReport) -> bool {
    let Some(w) = &report.witness else {
        return false;
    };
    let u = tau.universe();
    let get = |slot: &str| -> Subset { parse_subset_key(w.slot(slot).unwrap(), u).unwrap() };
    let tv = |s: Subset| tau.eval(s).unwrap();
    let margin = oracle_margin(w.lhs, w.rhs);
    let (lhs, rhs, violated) = match w.relation.as_str() {
        "tau(A) = 0 for |A| = 1" => {
            let a = get("A");
            let v = tv(a);
            (v, 0.0, a.cardinality() == 1 && v.abs() > oracle_margin(v, 0.0))
        }
        "tau(A) > 0 for |A| >= 2" => {
            let a = get("A");
            let v = tv(a);
            (v, 0.0, a.cardinality() >= 2 && v < oracle_margin(v, 0.0))
        }
        "tau(A u B) <= tau(A u C) + tau(C u B)" => {
            let (a, b, c) = (get("A"), get("B"), get("C"));
            let lhs = tv(a.union(b));
            let rhs = tv(a.union(c)) + tv(c.union(b));
            (lhs, rhs, lhs > rhs + margin)
        }
        "tau(A u B) <= max(tau(A u C), tau(C u B))" => {
            let (a, b, c) = (get("A"), get("B"), get("C"));
            let lhs = tv(a.union(b));
            let rhs = tv(a.union(c)).max(tv(c.union(b)));
            (lhs, rhs, lhs > rhs + margin)
        }
        "tau(B) <= tau(A) for B subseteq A" => {
            let (b, a) = (get("B"), get("A"));
            (tv(b), tv(a), b.is_subset_of(a) && tv(b) > tv(a) + margin)
        }
        "exists proper nonempty B subset A with tau(B) >= tau(A)" => {
            let a = get("A");
            let va = tv(a);
            let mut dominated = false;
            let mut best = f64::NEG_INFINITY;
            for s in u.subsets() {
                if s != a && s.is_subset_of(a) {
                    best = best.max(tv(s));
                    if tv(s) + oracle_margin(tv(s), va) >= va {
                        dominated = true;
                    }
                }
            }
            (va, best, !dominated)
        }
        _ => return false,
    };
    violated && (lhs - w.lhs).abs() <= 1e-12 && (rhs - w.rhs).abs() <= 1e-12
}

/// Canonical small fixtures.
pub fn line_metric_013() -> FiniteMetric {
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

pub fn key_of(tau: &SetFunction, indices: &[usize]) -> String {
    let bits = indices.iter().fold(0u32, |m, &i| m | (1 << i));
    canonical_subset_key(Subset::from_bits(bits), tau.universe()).unwrap()
}
