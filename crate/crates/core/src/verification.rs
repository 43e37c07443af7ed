//! Seeded property suites tying the enumeration to the identities and
//! growth predictions.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::counting::{
    affine_leading_monomial, count_really_likely_upto, projective_average_order,
    projective_stable_prediction, H2Value,
};
use crate::error::{Error, Result};
use crate::group::{ElemId, FiniteGroup};
use crate::nielsen::{
    braid_in_place, conjugate_block, conjugate_tuple, rotate, Direction, NielsenTuple,
};
use crate::orbit::{factorize, ComponentQuery, Connectedness, OrbitEngine, Space};
use crate::quasipoly::fit;
use crate::setup::ClassSetup;
use crate::subgroup::Subgroup;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    ExactMatch,
    RatioWithinTolerance,
    GrowthConsistent,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub kind: CheckKind,
    pub passed: bool,
    pub enumerated: Value,
    pub predicted: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub seed: u64,
    pub inputs: Value,
    pub checks: Vec<Check>,
    pub samples: u64,
    pub states_visited: u64,
}

impl ScenarioReport {
    fn new(scenario: &str, seed: u64, inputs: Value) -> Self {
        ScenarioReport {
            scenario: scenario.to_string(),
            seed,
            inputs,
            checks: Vec::new(),
            samples: 0,
            states_visited: 0,
        }
    }

    fn push(
        &mut self,
        name: &str,
        kind: CheckKind,
        passed: bool,
        enumerated: Value,
        predicted: Value,
    ) {
        self.checks.push(Check {
            name: name.to_string(),
            kind,
            passed,
            enumerated,
            predicted,
        });
    }

    /// True when there is at least one check and every check passed.
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "scenario {} (seed {}, {} samples, {} states)\n",
            self.scenario, self.seed, self.samples, self.states_visited
        );
        for c in &self.checks {
            s.push_str(&format!(
                "  [{}] {}: enumerated {} / predicted {}\n",
                if c.passed { "ok" } else { "FAIL" },
                c.name,
                c.enumerated,
                c.predicted
            ));
        }
        s
    }
}

fn random_tuple(rng: &mut ChaCha8Rng, pool: &[ElemId], len: usize) -> NielsenTuple {
    NielsenTuple((0..len).map(|_| *pool.choose(rng).unwrap()).collect())
}

fn random_product_one(
    rng: &mut ChaCha8Rng,
    g: &FiniteGroup,
    pool: &[ElemId],
    len: usize,
) -> NielsenTuple {
    let mut t = random_tuple(rng, pool, len.saturating_sub(1));
    let p = t.product(g);
    t.0.push(g.inv(p));
    t
}

fn scramble(rng: &mut ChaCha8Rng, g: &FiniteGroup, t: &NielsenTuple, steps: usize) -> NielsenTuple {
    let mut e = t.0.clone();
    if e.len() >= 2 {
        for _ in 0..steps {
            let i = rng.gen_range(0..e.len() - 1);
            let dir = if rng.gen_bool(0.5) {
                Direction::Forward
            } else {
                Direction::Inverse
            };
            braid_in_place(g, &mut e, i, dir).expect("in range");
        }
    }
    NielsenTuple(e)
}

fn random_in(rng: &mut ChaCha8Rng, h: &Subgroup) -> ElemId {
    *h.element_list().choose(rng).unwrap()
}

fn counterexample(g: &FiniteGroup, clause: &str, ts: &[&NielsenTuple]) -> Error {
    let shown: Vec<String> = ts.iter().map(|t| format!("({})", t.display(g))).collect();
    Error::Verification(format!("clause {clause} fails on {}", shown.join(" ")))
}

/// Each clause of the concatenation/rotation/conjugation identities on
/// `samples` random instances. Tuple sizes stay at most `max_len`.
pub fn run_identity_suite(
    engine: &OrbitEngine,
    g: &FiniteGroup,
    samples: usize,
    seed: u64,
    max_len: usize,
) -> Result<ScenarioReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool: Vec<ElemId> = g.elements().filter(|&x| x != 0).collect();
    let max_len = max_len.max(2);
    let mut report = ScenarioReport::new(
        "identities",
        seed,
        json!({"group_order": g.order(), "samples": samples, "max_len": max_len}),
    );
    let same = |a: &NielsenTuple, b: &NielsenTuple| engine.same_orbit(g, a, b);
    let split = |rng: &mut ChaCha8Rng| {
        let a = rng.gen_range(0..=max_len / 2);
        let b = rng.gen_range(0..=max_len - a);
        (a, b)
    };
    let mut passed = [0u64; 6];

    for _ in 0..samples {
        // (i) concatenation respects equivalence
        let (a, b) = split(&mut rng);
        let g1 = random_tuple(&mut rng, &pool, a);
        let h1 = random_tuple(&mut rng, &pool, b);
        let g2 = scramble(&mut rng, g, &g1, 3 * a);
        let h2 = scramble(&mut rng, g, &h1, 3 * b);
        if !same(&g1.concat(&h1), &g2.concat(&h2))? {
            return Err(counterexample(g, "(i)", &[&g1, &h1, &g2, &h2]));
        }
        passed[0] += 1;

        // (ii) moving a block across another conjugates it
        let (a, b) = split(&mut rng);
        let g1 = random_tuple(&mut rng, &pool, a);
        let g2 = random_tuple(&mut rng, &pool, b);
        let lhs = g1.concat(&g2);
        let mid = g2.conjugate_by(g, g1.product(g)).concat(&g1);
        let rhs = g2.concat(&g1.conjugate_by(g, g.inv(g2.product(g))));
        if !same(&lhs, &mid)? || !same(&lhs, &rhs)? {
            return Err(counterexample(g, "(ii)", &[&g1, &g2]));
        }
        passed[1] += 1;

        // (iii) a product-one block commutes
        let (a, b) = split(&mut rng);
        let g1 = random_product_one(&mut rng, g, &pool, a.max(1));
        let g2 = random_tuple(&mut rng, &pool, b.min(max_len - g1.len()));
        if !same(&g1.concat(&g2), &g2.concat(&g1))? {
            return Err(counterexample(g, "(iii)", &[&g1, &g2]));
        }
        passed[2] += 1;

        // (iv) rotation of a product-one tuple
        let len = rng.gen_range(1..=max_len);
        let t = random_product_one(&mut rng, g, &pool, len);
        let w = rotate(g, &t)?;
        let mut rotated = t.0[1..].to_vec();
        rotated.push(t.0[0]);
        if w.tuple.0 != rotated || w.word.apply(g, &t)? != w.tuple || !same(&t, &w.tuple)? {
            return Err(counterexample(g, "(iv)", &[&t]));
        }
        passed[3] += 1;

        // (v) conjugation by an element of the generated group
        let len = rng.gen_range(1..=max_len);
        let t = random_product_one(&mut rng, g, &pool, len);
        let gamma = random_in(&mut rng, &t.generated_subgroup(g));
        let w = conjugate_tuple(g, &t, gamma)?;
        if w.tuple != t.conjugate_by(g, gamma)
            || w.word.apply(g, &t)? != w.tuple
            || !same(&t, &w.tuple)?
        {
            return Err(counterexample(g, "(v)", &[&t]));
        }
        passed[4] += 1;

        // (vi) conjugating an inner product-one block
        let mid_len = rng.gen_range(1..=max_len.saturating_sub(1).max(1));
        let rest = max_len - mid_len;
        let a = rng.gen_range(0..=rest);
        let b = rng.gen_range(0..=rest - a);
        let g1 = random_tuple(&mut rng, &pool, a);
        let g2 = random_product_one(&mut rng, g, &pool, mid_len);
        let g3 = random_tuple(&mut rng, &pool, b);
        let outer = g1.concat(&g3).generated_subgroup(g);
        let gamma = random_in(&mut rng, &outer);
        let t = g1.concat(&g2).concat(&g3);
        let w = conjugate_block(g, &t, a, a + mid_len, gamma)?;
        let expect = g1.concat(&g2.conjugate_by(g, gamma)).concat(&g3);
        if w.tuple != expect || w.word.apply(g, &t)? != w.tuple || !same(&t, &w.tuple)? {
            return Err(counterexample(g, "(vi)", &[&g1, &g2, &g3]));
        }
        passed[5] += 1;
    }
    for (i, name) in ["(i)", "(ii)", "(iii)", "(iv)", "(v)", "(vi)"]
        .iter()
        .enumerate()
    {
        report.push(
            name,
            CheckKind::ExactMatch,
            passed[i] == samples as u64 && samples > 0,
            json!(passed[i]),
            json!(samples),
        );
    }
    report.samples = samples as u64;
    Ok(report)
}

/// Random admissible splitting instances over `c`, each factorized and
/// checked by witness replay, generation of the remainder, and orbit search.
pub fn run_factorization_suite(
    engine: &OrbitEngine,
    s: &ClassSetup,
    samples: usize,
    seed: u64,
    max_len: usize,
) -> Result<ScenarioReport> {
    let g = s.group();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = s.c_elements();
    let mut report = ScenarioReport::new(
        "factorization",
        seed,
        json!({"group_order": g.order(), "samples": samples, "max_len": max_len}),
    );
    let classes = s.classes();
    let kappa = s.kappa();
    let mut done = 0u64;
    let mut via_md = 0u64;
    let mut implication_ok = true;
    let mut attempts = 0usize;
    while (done as usize) < samples {
        attempts += 1;
        if attempts > samples * 200 {
            return Err(Error::Precondition(format!(
                "could not draw admissible instances of size ≤ {max_len}"
            )));
        }
        // Half the draws target the multidiscriminant form of the
        // hypothesis, the rest the bare per-class form.
        let md_form = rng.gen_bool(0.5);
        let flen = rng.gen_range(1..=2);
        let factor = random_tuple(&mut rng, &c, flen);
        let mut need: BTreeMap<usize, u64> = BTreeMap::new();
        for &x in factor.entries() {
            *need.entry(classes.class_of(x)).or_default() += 1;
        }
        let mut big = Vec::new();
        for (&k, &nk) in &need {
            let base = if md_form {
                kappa
            } else {
                classes.class_size(k) as u64 * classes.class_order(k) as u64
            };
            for _ in 0..base + nk {
                big.push(*classes.class(k).choose(&mut rng).unwrap());
            }
        }
        if big.len() > max_len {
            continue;
        }
        let extra = rng.gen_range(0..=max_len - big.len());
        for _ in 0..extra {
            big.push(*c.choose(&mut rng).unwrap());
        }
        big.shuffle(&mut rng);
        let big = NielsenTuple(big);
        if big.generated_subgroup(g).order() != g.order() {
            continue;
        }

        let mx = factor.multidiscriminant(s)?;
        let my = big.multidiscriminant(s)?;
        let md_holds =
            mx.0.iter()
                .zip(&my.0)
                .all(|(&x, &y)| y >= x + if x >= 1 { kappa } else { 0 });
        let per_class_holds = need.iter().all(|(&k, &nk)| {
            let have = big
                .entries()
                .iter()
                .filter(|&&x| classes.class_of(x) == k)
                .count() as u64;
            have >= classes.class_size(k) as u64 * classes.class_order(k) as u64 + nk
        });
        if md_holds {
            via_md += 1;
            if !per_class_holds {
                implication_ok = false;
            }
        }

        let f = factorize(g, &factor, &big)?;
        let joined = factor.concat(&f.remainder);
        let replay = f.word.apply(g, &big)?;
        if replay != joined
            || f.remainder.generated_subgroup(g).order() != g.order()
            || !engine.same_orbit(g, &joined, &big)?
        {
            return Err(counterexample(g, "split", &[&factor, &big]));
        }
        done += 1;
    }
    report.push(
        "split",
        CheckKind::ExactMatch,
        done == samples as u64 && samples > 0,
        json!(done),
        json!(samples),
    );
    report.push(
        "multidiscriminant-hypothesis",
        CheckKind::ExactMatch,
        implication_ok && (samples < 4 || via_md > 0),
        json!(via_md),
        json!({"kappa": kappa}),
    );
    report.samples = done;
    Ok(report)
}

/// Counts, fits and leading-term comparisons for one setup up to `n_max`.
pub fn run_growth_suite(
    engine: &OrbitEngine,
    s: &ClassSetup,
    n_max: u32,
    h2: Option<&H2Value>,
    tolerance: f64,
) -> Result<ScenarioReport> {
    let omega = s.omega();
    let mut report = ScenarioReport::new(
        "growth",
        0,
        json!({"n_max": n_max, "omega": omega, "h2": h2, "tolerance": tolerance}),
    );
    let mut affine = BTreeMap::new();
    let mut projective = BTreeMap::new();
    for n in 0..=n_max {
        let a = engine.count_components(
            s,
            &ComponentQuery::new(n, Space::Affine, Connectedness::Connected),
        )?;
        let p = engine.count_components(
            s,
            &ComponentQuery::new(n, Space::Projective, Connectedness::Connected),
        )?;
        report.states_visited += a.states_visited + p.states_visited;
        affine.insert(n as u64, BigInt::from(a.total));
        projective.insert(n as u64, BigInt::from(p.total));
    }
    let to_json =
        |m: &BTreeMap<u64, BigInt>| json!(m.values().map(|v| v.to_string()).collect::<Vec<_>>());
    let max_period = (s.abelianization().ab_order() as usize).max(2) * 2;
    // Skip degree 0, where the empty tuple never generates a nontrivial G.
    let tail = |m: &BTreeMap<u64, BigInt>| {
        m.range(1..)
            .map(|(&k, v)| (k, v.clone()))
            .collect::<BTreeMap<_, _>>()
    };

    let fa = fit(&tail(&affine), max_period, omega + 1)?;
    let lead = fa.average_order_leading();
    report.push(
        "affine-degree",
        CheckKind::ExactMatch,
        lead.degree as usize == omega,
        json!(lead.degree),
        json!(omega),
    );
    if let Some(h2) = h2 {
        let want = affine_leading_monomial(s, h2);
        report.push(
            "affine-leading-coefficient",
            CheckKind::ExactMatch,
            want.coefficient == lead.coefficient && want.degree == lead.degree,
            json!(lead.coefficient.to_string()),
            json!(want.coefficient.to_string()),
        );
    }
    report.push(
        "affine-counts",
        CheckKind::GrowthConsistent,
        true,
        to_json(&affine),
        json!(fa.report()),
    );

    if omega == 0 {
        if let Some(h2) = h2 {
            let pred = projective_stable_prediction(s, h2)?;
            let fp = fit(&tail(&projective), max_period, 1)?;
            let ok = (fp.onset..=n_max as u64).all(|n| {
                let want = if n % pred.k == 0 {
                    pred.stable_value
                } else {
                    0
                };
                projective[&n] == BigInt::from(want)
            });
            report.push(
                "projective-stable",
                CheckKind::ExactMatch,
                ok,
                to_json(&projective),
                json!(pred),
            );
        }
    } else {
        report.push(
            "projective-counts",
            CheckKind::GrowthConsistent,
            true,
            to_json(&projective),
            Value::Null,
        );
    }

    if s.xi_total() == 1 {
        if let Some(h2) = h2 {
            let avg = projective_average_order(s, h2)?;
            let cumulative: BigInt = projective.values().sum();
            // Σ_{m ≤ n} c·m^{d} ≈ c·n^{d+1}/(d+1)
            let nm = n_max as f64;
            let predicted = avg.coefficient.to_f64().unwrap_or(0.0)
                * nm.powi(avg.degree as i32 + 1)
                / (avg.degree as f64 + 1.0);
            let got = cumulative.to_f64().unwrap_or(0.0);
            let ratio = if predicted > 0.0 {
                got / predicted
            } else {
                f64::INFINITY
            };
            report.push(
                "projective-cumulative",
                CheckKind::RatioWithinTolerance,
                (ratio - 1.0).abs() <= tolerance,
                json!(cumulative.to_string()),
                json!(predicted),
            );
        }
        let (exact, lead) = count_really_likely_upto(s, n_max as u64);
        let predicted =
            lead.coefficient.to_f64().unwrap_or(0.0) * (n_max as f64).powi(lead.degree as i32);
        let ratio = exact.to_f64().unwrap_or(0.0) / predicted;
        report.push(
            "really-likely-cumulative",
            CheckKind::RatioWithinTolerance,
            (ratio - 1.0).abs() <= tolerance,
            json!(exact.to_string()),
            json!(predicted),
        );
    }
    report.samples = n_max as u64 + 1;
    Ok(report)
}

/// Exact rational ratio helper for reports.
pub fn ratio(a: &BigInt, b: &BigInt) -> Option<BigRational> {
    (!b.is_zero()).then(|| BigRational::new(a.clone(), b.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupSpec;
    use crate::orbit::EngineConfig;
    use std::sync::Arc;

    fn grp(s: &str) -> Arc<FiniteGroup> {
        Arc::new(FiniteGroup::build(&GroupSpec::parse_short(s).unwrap()).unwrap())
    }

    #[test]
    fn identities_small() {
        let e = OrbitEngine::new(EngineConfig::default()).unwrap();
        for name in ["S3", "C4"] {
            let r = run_identity_suite(&e, &grp(name), 20, 7, 5).unwrap();
            assert!(r.passed(), "{}", r.to_text());
        }
    }

    #[test]
    fn factorization_small() {
        let e = OrbitEngine::new(EngineConfig::default()).unwrap();
        let s = ClassSetup::single_block(grp("S3"), &["(1 2)"]).unwrap();
        let r = run_factorization_suite(&e, &s, 10, 3, 10).unwrap();
        assert!(r.passed(), "{}", r.to_text());
    }

    #[test]
    fn growth_c2() {
        let e = OrbitEngine::new(EngineConfig::default()).unwrap();
        let s = ClassSetup::single_block(grp("C2"), &["g"]).unwrap();
        let h = H2Value::user(1).unwrap();
        let r = run_growth_suite(&e, &s, 20, Some(&h), 0.15).unwrap();
        assert!(r.passed(), "{}", r.to_text());
    }

    #[test]
    fn empty_report_fails() {
        assert!(!ScenarioReport::new("x", 0, Value::Null).passed());
    }
}
