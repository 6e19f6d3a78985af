//! Executable oracles for the equivalence theorems and inequality lemmas.
//!
//! Each equivalence is evaluated clause by clause on a concrete object, and
//! the clauses must agree: the statements are proved, so a disagreement is
//! always an implementation defect, never a counterexample to the theorem.
//! Existence clauses are decided through their canonical candidates (the
//! binary table for pair generation, the ternary table for triple
//! generation), which the proofs show is lossless.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::axioms::{
    check_balk, check_increasing, check_k_increasing, check_k_weakly_decreasing, check_metric,
    check_symmetric_g, CheckConfig,
};
use crate::construct::{generalized_diameter_table, tau_squared};
use crate::error::{Error, Result};
use crate::g_table::GMetricTable;
use crate::report::{CheckReport, Verdict, Witness};
use crate::set_function::SetFunction;
use crate::space::{canonical_subset_key, Subset};

/// Default budget for the sampled parts of the inequality lemmas.
pub const DEFAULT_LEMMA_BUDGET: u64 = 100_000;

#[derive(Clone, Debug)]
pub struct Clause {
    pub id: String,
    pub pass: bool,
    pub witness: Option<Witness>,
}

impl Clause {
    fn new(id: &str, pass: bool, witness: Option<Witness>) -> Self {
        Clause {
            id: id.into(),
            pass,
            witness,
        }
    }

    fn from_report(id: &str, report: CheckReport) -> Self {
        Clause {
            id: id.into(),
            pass: report.passed(),
            witness: report.witness,
        }
    }
}

impl Serialize for Clause {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let n = 2 + usize::from(self.witness.is_some());
        let mut st = serializer.serialize_struct("Clause", n)?;
        st.serialize_field("id", &self.id)?;
        st.serialize_field("verdict", if self.pass { "pass" } else { "fail" })?;
        if let Some(w) = &self.witness {
            st.serialize_field("witness", w)?;
        }
        st.end()
    }
}

/// Per-clause verdicts for one theorem on one object.
#[derive(Clone, Debug)]
pub struct EquivalenceReport {
    pub theorem: String,
    pub k: Option<u32>,
    pub clauses: Vec<Clause>,
    pub agree: bool,
    pub note: Option<String>,
}

impl EquivalenceReport {
    fn new(theorem: &str, k: Option<u32>, clauses: Vec<Clause>, note: Option<String>) -> Self {
        let agree = clauses.windows(2).all(|w| w[0].pass == w[1].pass);
        EquivalenceReport {
            theorem: theorem.into(),
            k,
            clauses,
            agree,
            note,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.agree && self.clauses.iter().all(|c| c.pass)
    }

    pub fn all_fail(&self) -> bool {
        self.agree && self.clauses.iter().all(|c| !c.pass)
    }

    /// The clause ids on each side of a disagreement.
    pub fn disagreement(&self) -> Option<(Vec<&str>, Vec<&str>)> {
        if self.agree {
            return None;
        }
        let passing = self
            .clauses
            .iter()
            .filter(|c| c.pass)
            .map(|c| c.id.as_str())
            .collect();
        let failing = self
            .clauses
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.id.as_str())
            .collect();
        Some((passing, failing))
    }

    pub fn render_text(&self) -> String {
        let mut out = format!("theorem: {}\n", self.theorem);
        if let Some(k) = self.k {
            out.push_str(&format!("k: {k}\n"));
        }
        for c in &self.clauses {
            out.push_str(&format!(
                "clause {}: {}\n",
                c.id,
                if c.pass { "pass" } else { "fail" }
            ));
            if let Some(w) = &c.witness {
                out.push_str(&format!(
                    "  witness: {} (lhs {} vs rhs {})\n",
                    w.relation, w.lhs, w.rhs
                ));
            }
        }
        out.push_str(&format!("agree: {}\n", self.agree));
        if let Some(note) = &self.note {
            out.push_str(&format!("note: {note}\n"));
        }
        out
    }
}

impl Serialize for EquivalenceReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut n = 3;
        if self.k.is_some() {
            n += 1;
        }
        if !self.agree {
            n += 1;
        }
        if self.note.is_some() {
            n += 1;
        }
        let mut st = serializer.serialize_struct("EquivalenceReport", n)?;
        st.serialize_field("theorem", &self.theorem)?;
        if let Some(k) = self.k {
            st.serialize_field("k", &k)?;
        }
        st.serialize_field("clauses", &self.clauses)?;
        st.serialize_field("agree", &self.agree)?;
        if let Some((passing, failing)) = self.disagreement() {
            #[derive(Serialize)]
            struct Disagreement<'a> {
                passing: Vec<&'a str>,
                failing: Vec<&'a str>,
            }
            st.serialize_field("disagreement", &Disagreement { passing, failing })?;
        }
        if let Some(note) = &self.note {
            st.serialize_field("note", note)?;
        }
        st.end()
    }
}

fn require_balk(tau: &SetFunction, cfg: &CheckConfig, who: &str) -> Result<()> {
    let report = check_balk(tau, cfg);
    if !report.passed() {
        let w = report.witness.as_ref().expect("fail carries a witness");
        return Err(Error::input(format!(
            "{who} requires an extended metric; violated: {} (lhs {}, rhs {})",
            w.relation, w.lhs, w.rhs
        )));
    }
    Ok(())
}

/// `tau(A) = diam_{tau^k}(A)` pointwise, as a clause.
fn equality_clause(tau: &SetFunction, k: u32, id: &str, cfg: &CheckConfig) -> Result<Clause> {
    let tol = cfg.tolerance;
    let table = generalized_diameter_table(tau, k)?;
    let vals = tau.values();
    let u = tau.universe();
    for s in u.subsets() {
        let idx = (s.bits() - 1) as usize;
        if !tol.eq(vals[idx], table[idx]) {
            let w = Witness::new(
                format!("tau(A) = max tau over subsets of A of size <= {k}"),
                vec![("A".into(), canonical_subset_key(s, u)?)],
                vals[idx],
                table[idx],
            );
            return Ok(Clause::new(id, false, Some(w)));
        }
    }
    Ok(Clause::new(id, true, None))
}

fn conjunction_clause(id: &str, first: CheckReport, second: CheckReport) -> Clause {
    if !first.passed() {
        Clause::from_report(id, first)
    } else if !second.passed() {
        Clause::from_report(id, second)
    } else {
        Clause::new(id, true, None)
    }
}

/// Structural characterization of `tau = diam_{tau^k}`:
/// (i) the equality holds pointwise; (ii) k-increasing and k-weakly
/// decreasing; (iii) increasing and k-weakly decreasing.
pub fn verify_thm_2_11(tau: &SetFunction, k: u32, cfg: &CheckConfig) -> Result<EquivalenceReport> {
    if k < 2 {
        return Err(Error::input("the characterization needs k >= 2"));
    }
    require_balk(tau, cfg, "the k-diameter characterization")?;
    let ci = equality_clause(tau, k, "i", cfg)?;
    let kinc = check_k_increasing(tau, k, cfg)?;
    let kwd = check_k_weakly_decreasing(tau, k, cfg)?;
    let inc = check_increasing(tau, cfg);
    let cii = conjunction_clause("ii", kinc, kwd.clone());
    let ciii = conjunction_clause("iii", inc, kwd);
    Ok(EquivalenceReport::new("2.11", Some(k), vec![ci, cii, ciii], None))
}

/// Pair-generation characterization: existence of a binary table (i), of a
/// generating metric (ii), generation by the own binary projection (iii),
/// and the two monotonicity forms (iv), (v).
pub fn verify_thm_2_13(tau: &SetFunction, cfg: &CheckConfig) -> Result<EquivalenceReport> {
    require_balk(tau, cfg, "the pair-generation characterization")?;
    let generated = equality_clause(tau, 2, "iii", cfg)?;
    let ci = Clause::new("i", generated.pass, generated.witness.clone());
    let cii = if generated.pass {
        // The binary projection of an extended metric is a metric, so a
        // failure here is a tolerance inconsistency surfacing as clause
        // disagreement.
        Clause::from_report("ii", check_metric(&tau_squared(tau), cfg))
    } else {
        Clause::new("ii", false, generated.witness.clone())
    };
    let kinc = check_k_increasing(tau, 2, cfg)?;
    let kwd = check_k_weakly_decreasing(tau, 2, cfg)?;
    let inc = check_increasing(tau, cfg);
    let civ = conjunction_clause("iv", kinc, kwd.clone());
    let cv = conjunction_clause("v", inc, kwd);
    Ok(EquivalenceReport::new(
        "2.13",
        None,
        vec![ci, cii, generated, civ, cv],
        Some("existence clauses decided via the canonical candidate: the binary projection".into()),
    ))
}

/// Triple-generation characterization, the ternary analogue of the above,
/// with the symmetric-G condition in clause (ii).
pub fn verify_thm_2_15(tau: &SetFunction, cfg: &CheckConfig) -> Result<EquivalenceReport> {
    require_balk(tau, cfg, "the triple-generation characterization")?;
    let generated = equality_clause(tau, 3, "iii", cfg)?;
    let ci = Clause::new("i", generated.pass, generated.witness.clone());
    let cii = if generated.pass {
        let vals = tau.values();
        let g = GMetricTable::from_fn(tau.universe().clone(), |(i, j, k)| {
            let mask = (1u32 << i) | (1u32 << j) | (1u32 << k);
            vals[(mask - 1) as usize]
        })
        .expect("projection table is total");
        Clause::from_report("ii", check_symmetric_g(&g, cfg))
    } else {
        Clause::new("ii", false, generated.witness.clone())
    };
    let kinc = check_k_increasing(tau, 3, cfg)?;
    let kwd = check_k_weakly_decreasing(tau, 3, cfg)?;
    let inc = check_increasing(tau, cfg);
    let civ = conjunction_clause("iv", kinc, kwd.clone());
    let cv = conjunction_clause("v", inc, kwd);
    Ok(EquivalenceReport::new(
        "2.15",
        None,
        vec![ci, cii, generated, civ, cv],
        Some("existence clauses decided via the canonical candidate: the ternary projection".into()),
    ))
}

/// Chain and perturbation bounds for an extended metric against its binary
/// projection `d`:
///
/// * chain: `tau({x_1..x_j}) <= d(x_1,x_2) + ... + d(x_{j-1},x_j)` for
///   every subset and every enumeration of it;
/// * perturbation: `|tau(S) - tau(S')| <= sum d(x_i, x'_i)` for every pair
///   of equal-size subsets and every alignment between them.
///
/// Exhaustive while the enumeration counts stay under the budget
/// (10^5 by default), seeded sampling above.
pub fn verify_lemma_3_6(tau: &SetFunction, cfg: &CheckConfig) -> Result<CheckReport> {
    require_balk(tau, cfg, "the chain bound")?;
    let name = "lemma3.6";
    let tol = cfg.tolerance;
    let budget = cfg.budget.unwrap_or(DEFAULT_LEMMA_BUDGET);
    let u = tau.universe();
    let n = u.len();
    let d = tau_squared(tau);
    let vals = tau.values();
    let tv = |mask: u32| vals[(mask - 1) as usize];
    let mut examined: u64 = 0;
    let mut sampled_note: Option<String> = None;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let chain_sum = |order: &[usize]| -> f64 {
        order.windows(2).map(|w| d.dist(w[0], w[1])).sum()
    };
    let mask_of = |order: &[usize]| -> u32 { order.iter().fold(0u32, |m, &i| m | (1 << i)) };
    let chain_violation = |order: &[usize]| -> Option<(f64, f64)> {
        let lhs = tv(mask_of(order));
        let rhs = chain_sum(order);
        (!tol.le(lhs, rhs)).then_some((lhs, rhs))
    };
    let chain_witness = |order: &[usize], lhs: f64, rhs: f64| -> Witness {
        let key = canonical_subset_key(Subset::from_bits(mask_of(order)), u).expect("nonempty");
        let order_str = order
            .iter()
            .map(|&i| u.label(i))
            .collect::<Vec<_>>()
            .join(",");
        Witness::new(
            "tau(S) <= chain sum of d along the enumeration",
            vec![("S".into(), key), ("order".into(), order_str)],
            lhs,
            rhs,
        )
    };

    // Chain bound.
    let factorial = |j: usize| -> u128 { (1..=j as u128).product() };
    let chain_count: u128 = u
        .subsets()
        .map(|s| factorial(s.cardinality() as usize))
        .sum();
    if chain_count <= budget as u128 {
        for s in u.subsets() {
            let mut order: Vec<usize> = s.indices().collect();
            let mut result: Option<Witness> = None;
            permutations(&mut order, &mut |perm| {
                if result.is_none() {
                    if let Some((lhs, rhs)) = chain_violation(perm) {
                        result = Some(chain_witness(perm, lhs, rhs));
                    }
                }
            });
            examined += factorial(s.cardinality() as usize) as u64;
            if let Some(w) = result {
                return Ok(CheckReport::fail(name, w, examined, tol));
            }
        }
    } else {
        for _ in 0..budget {
            let mask = rng.gen_range(1..=u.full_mask());
            let mut order: Vec<usize> = Subset::from_bits(mask).indices().collect();
            order.shuffle(&mut rng);
            examined += 1;
            if let Some((lhs, rhs)) = chain_violation(&order) {
                return Ok(CheckReport::fail(name, chain_witness(&order, lhs, rhs), examined, tol));
            }
        }
        sampled_note = Some(format!(
            "chain bound sampled: {budget} of {chain_count} enumerations"
        ));
    }

    // Perturbation bound. An instance is (S, S', alignment); alignments are
    // the bijections S -> S'.
    let perturb_violation = |src: &[usize], dst: &[usize]| -> Option<(f64, f64)> {
        let lhs = (tv(mask_of(src)) - tv(mask_of(dst))).abs();
        let rhs: f64 = src.iter().zip(dst).map(|(&x, &y)| d.dist(x, y)).sum();
        (!tol.le(lhs, rhs)).then_some((lhs, rhs))
    };
    let perturb_witness = |src: &[usize], dst: &[usize], lhs: f64, rhs: f64| -> Witness {
        let fmt = |idx: &[usize]| {
            idx.iter()
                .map(|&i| u.label(i))
                .collect::<Vec<_>>()
                .join(",")
        };
        Witness::new(
            "|tau(S) - tau(S')| <= sum of d over the alignment",
            vec![("S".into(), fmt(src)), ("S'".into(), fmt(dst))],
            lhs,
            rhs,
        )
    };

    let mut pair_count: u128 = 0;
    {
        let mut binom: u128 = 1;
        for j in 1..=n {
            binom = binom * (n - j + 1) as u128 / j as u128;
            pair_count += binom * binom * factorial(j);
        }
    }
    if pair_count <= budget as u128 {
        for j in 1..=n {
            let masks: Vec<u32> = (1..=u.full_mask())
                .filter(|m| m.count_ones() as usize == j)
                .collect();
            for &sm in &masks {
                let src: Vec<usize> = Subset::from_bits(sm).indices().collect();
                for &tm in &masks {
                    let mut dst: Vec<usize> = Subset::from_bits(tm).indices().collect();
                    let mut result: Option<Witness> = None;
                    permutations(&mut dst, &mut |perm| {
                        if result.is_none() {
                            if let Some((lhs, rhs)) = perturb_violation(&src, perm) {
                                result = Some(perturb_witness(&src, perm, lhs, rhs));
                            }
                        }
                    });
                    examined += factorial(j) as u64;
                    if let Some(w) = result {
                        return Ok(CheckReport::fail(name, w, examined, tol));
                    }
                }
            }
        }
    } else {
        for _ in 0..budget {
            let j = rng.gen_range(1..=n);
            let src = random_distinct(&mut rng, n, j);
            let dst = random_distinct(&mut rng, n, j);
            examined += 1;
            if let Some((lhs, rhs)) = perturb_violation(&src, &dst) {
                return Ok(CheckReport::fail(
                    name,
                    perturb_witness(&src, &dst, lhs, rhs),
                    examined,
                    tol,
                ));
            }
        }
        let extra = format!("perturbation bound sampled: {budget} of {pair_count} alignments");
        sampled_note = Some(match sampled_note {
            Some(prev) => format!("{prev}; {extra}"),
            None => extra,
        });
    }

    Ok(match sampled_note {
        Some(note) => CheckReport::sampled_pass(name, examined, tol, note),
        None => CheckReport::pass(name, examined, tol),
    })
}

/// Half-projection bound: `tau(K) >= d(x,y)/2` for all `x, y in K`.
/// Always exhaustive over the `2^n - 1` subsets.
pub fn verify_lemma_3_7(tau: &SetFunction, cfg: &CheckConfig) -> Result<CheckReport> {
    require_balk(tau, cfg, "the half-projection bound")?;
    let name = "lemma3.7";
    let tol = cfg.tolerance;
    let u = tau.universe();
    let vals = tau.values();
    let pair_max = generalized_diameter_table(tau, 2)?;
    let mut examined: u64 = 0;
    for s in u.subsets() {
        examined += 1;
        let idx = (s.bits() - 1) as usize;
        let half = 0.5 * pair_max[idx];
        if !tol.le(half, vals[idx]) {
            let w = Witness::new(
                "tau(K) >= d(x,y)/2 for x,y in K",
                vec![("K".into(), canonical_subset_key(s, u)?)],
                vals[idx],
                half,
            );
            return Ok(CheckReport::fail(name, w, examined, tol));
        }
    }
    Ok(CheckReport::pass(name, examined, tol))
}

/// Heap's algorithm; calls `visit` on every permutation of `items`.
fn permutations(items: &mut [usize], visit: &mut impl FnMut(&[usize])) {
    fn heap(k: usize, items: &mut [usize], visit: &mut impl FnMut(&[usize])) {
        if k <= 1 {
            visit(items);
            return;
        }
        for i in 0..k {
            heap(k - 1, items, visit);
            if k % 2 == 0 {
                items.swap(i, k - 1);
            } else {
                items.swap(0, k - 1);
            }
        }
    }
    let k = items.len();
    heap(k, items, visit);
}

fn random_distinct(rng: &mut ChaCha8Rng, n: usize, j: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..n).collect();
    pool.shuffle(rng);
    pool.truncate(j);
    pool
}

/// Claim verifiers, selectable by the claim id.
pub trait TheoremVerifier: Sync {
    fn id(&self) -> &'static str;
    fn needs_k(&self) -> bool {
        false
    }
    fn run(&self, tau: &SetFunction, k: Option<u32>, cfg: &CheckConfig) -> Result<VerifyReport>;
}

/// Either an equivalence report (theorems) or a plain check (lemmas).
#[derive(Clone, Debug)]
pub enum VerifyReport {
    Equivalence(EquivalenceReport),
    Check(CheckReport),
}

impl VerifyReport {
    /// Exit-code semantics: a theorem passes when its clauses agree; a
    /// lemma passes when its inequality holds.
    pub fn passed(&self) -> bool {
        match self {
            VerifyReport::Equivalence(r) => r.agree,
            VerifyReport::Check(r) => r.verdict != Verdict::Fail,
        }
    }

    pub fn render_text(&self) -> String {
        match self {
            VerifyReport::Equivalence(r) => r.render_text(),
            VerifyReport::Check(r) => r.render_text(),
        }
    }
}

impl Serialize for VerifyReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            VerifyReport::Equivalence(r) => r.serialize(serializer),
            VerifyReport::Check(r) => r.serialize(serializer),
        }
    }
}

struct Thm211;
impl TheoremVerifier for Thm211 {
    fn id(&self) -> &'static str {
        "2.11"
    }
    fn needs_k(&self) -> bool {
        true
    }
    fn run(&self, tau: &SetFunction, k: Option<u32>, cfg: &CheckConfig) -> Result<VerifyReport> {
        let k = k.ok_or_else(|| Error::input("verify 2.11 needs --k"))?;
        Ok(VerifyReport::Equivalence(verify_thm_2_11(tau, k, cfg)?))
    }
}

struct Thm213;
impl TheoremVerifier for Thm213 {
    fn id(&self) -> &'static str {
        "2.13"
    }
    fn run(&self, tau: &SetFunction, _k: Option<u32>, cfg: &CheckConfig) -> Result<VerifyReport> {
        Ok(VerifyReport::Equivalence(verify_thm_2_13(tau, cfg)?))
    }
}

struct Thm215;
impl TheoremVerifier for Thm215 {
    fn id(&self) -> &'static str {
        "2.15"
    }
    fn run(&self, tau: &SetFunction, _k: Option<u32>, cfg: &CheckConfig) -> Result<VerifyReport> {
        Ok(VerifyReport::Equivalence(verify_thm_2_15(tau, cfg)?))
    }
}

struct Lemma36;
impl TheoremVerifier for Lemma36 {
    fn id(&self) -> &'static str {
        "lemma3.6"
    }
    fn run(&self, tau: &SetFunction, _k: Option<u32>, cfg: &CheckConfig) -> Result<VerifyReport> {
        Ok(VerifyReport::Check(verify_lemma_3_6(tau, cfg)?))
    }
}

struct Lemma37;
impl TheoremVerifier for Lemma37 {
    fn id(&self) -> &'static str {
        "lemma3.7"
    }
    fn run(&self, tau: &SetFunction, _k: Option<u32>, cfg: &CheckConfig) -> Result<VerifyReport> {
        Ok(VerifyReport::Check(verify_lemma_3_7(tau, cfg)?))
    }
}

pub static VERIFIERS: &[&dyn TheoremVerifier] =
    &[&Thm211, &Thm213, &Thm215, &Lemma36, &Lemma37];

pub fn verifier(id: &str) -> Option<&'static dyn TheoremVerifier> {
    VERIFIERS.iter().copied().find(|v| v.id() == id)
}
