//! Closed-form counts and leading-term predictions.
//!
//! Everything here is exact: big integers and rationals only.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::nielsen::{abelianized_product, Multidiscriminant};
use crate::orbit::{ComponentQuery, Connectedness, OrbitEngine, Space};
use crate::setup::ClassSetup;

/// `coefficient · n^degree`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeadingMonomial {
    pub degree: u32,
    pub coefficient: BigRational,
}

impl LeadingMonomial {
    pub fn new(degree: u32, coefficient: BigRational) -> Self {
        LeadingMonomial {
            degree,
            coefficient,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum H2Provenance {
    UserSupplied,
    Table {
        source: String,
    },
    Empirical {
        degrees: Vec<u64>,
        plateau: Vec<u64>,
    },
}

/// The integer |H₂(G, c)|.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct H2Value {
    pub value: u64,
    pub provenance: H2Provenance,
}

impl H2Value {
    pub fn user(value: u64) -> Result<Self> {
        if value == 0 {
            return Err(Error::Precondition("|H2| must be at least 1".into()));
        }
        Ok(H2Value {
            value,
            provenance: H2Provenance::UserSupplied,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Formula {
    #[serde(rename = "thm4.8")]
    AffineLeading,
    #[serde(rename = "prop4.11")]
    ProjectiveStable,
    #[serde(rename = "cor4.14")]
    ProjectiveAverage,
    #[serde(rename = "remark1.5")]
    Symmetric,
    #[serde(rename = "remark4.15")]
    EqualDegree,
}

/// Prediction report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Prediction {
    pub degree: u32,
    pub coefficient_num: String,
    pub coefficient_den: String,
    pub formula: Formula,
    pub inputs: serde_json::Value,
}

impl Prediction {
    pub fn new(m: &LeadingMonomial, formula: Formula, inputs: serde_json::Value) -> Self {
        Prediction {
            degree: m.degree,
            coefficient_num: m.coefficient.numer().to_string(),
            coefficient_den: m.coefficient.denom().to_string(),
            formula,
            inputs,
        }
    }
}

fn rat(n: u64, d: u64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * i)
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Ω(D) = |D*| − |D|.
pub fn splitting_number(s: &ClassSetup) -> usize {
    s.omega()
}

/// Number of likely maps of degree n: Π_γ C(nξ(γ) + |τ⁻¹γ| − 1, |τ⁻¹γ| − 1).
pub fn count_likely_maps(s: &ClassSetup, n: u64) -> BigUint {
    (0..s.blocks().len())
        .map(|b| {
            let f = s.fibre_size(b) as u64;
            binomial(n * s.xi()[b] as u64 + f - 1, f - 1)
        })
        .product()
}

/// All likely maps of degree n, in lexicographic order.
pub fn enumerate_likely_maps(s: &ClassSetup, n: u64) -> Vec<Multidiscriminant> {
    let tau = s.tau();
    let len = tau.len();
    let mut last_of_block = vec![0; s.blocks().len()];
    for (i, &b) in tau.iter().enumerate() {
        last_of_block[b] = i;
    }
    let mut remaining: Vec<u64> = s.xi().iter().map(|&x| n * x as u64).collect();
    let mut cur = vec![0u64; len];
    let mut out = Vec::new();
    fn rec(
        i: usize,
        tau: &[usize],
        last: &[usize],
        remaining: &mut [u64],
        cur: &mut [u64],
        out: &mut Vec<Multidiscriminant>,
    ) {
        if i == tau.len() {
            out.push(Multidiscriminant(cur.to_vec()));
            return;
        }
        let b = tau[i];
        let r = remaining[b];
        let range = if last[b] == i { r..=r } else { 0..=r };
        for v in range {
            cur[i] = v;
            remaining[b] -= v;
            rec(i + 1, tau, last, remaining, cur, out);
            remaining[b] += v;
        }
    }
    rec(0, tau, &last_of_block, &mut remaining, &mut cur, &mut out);
    out
}

/// Π_γ ξ(γ)^{|τ⁻¹γ|−1}/(|τ⁻¹γ|−1)! · n^{Ω(D)}.
pub fn likely_leading_monomial(s: &ClassSetup) -> LeadingMonomial {
    let mut c = BigRational::one();
    for b in 0..s.blocks().len() {
        let f = s.fibre_size(b) as u64 - 1;
        let xi = BigInt::from(s.xi()[b]).pow(f as u32);
        c *= BigRational::new(xi, BigInt::from(factorial(f)));
    }
    LeadingMonomial::new(s.omega() as u32, c)
}

/// π̃(ψ) = 1.
pub fn is_really_likely(psi: &Multidiscriminant, s: &ClassSetup) -> bool {
    s.abelianization()
        .quotient()
        .is_identity(&abelianized_product(&psi.as_signed(), s))
}

/// Really-likely maps of degree ≤ n, with the leading term
/// n^s/(|G^ab|·s!) (meaningful for |ξ| = 1).
pub fn count_really_likely_upto(s: &ClassSetup, n: u64) -> (BigUint, LeadingMonomial) {
    let exact = (0..=n)
        .map(|m| {
            enumerate_likely_maps(s, m)
                .iter()
                .filter(|p| is_really_likely(p, s))
                .count() as u64
        })
        .sum::<u64>();
    let sd = s.dstar().len() as u64;
    let lead = LeadingMonomial::new(
        sd as u32,
        BigRational::new(
            BigInt::one(),
            BigInt::from(s.abelianization().ab_order()) * BigInt::from(factorial(sd)),
        ),
    );
    (BigUint::from(exact), lead)
}

/// |[G,G]|·|H₂(G,c)|·Π ξ^{|τ⁻¹|−1}/(|τ⁻¹|−1)! · n^{Ω(D)}.
pub fn affine_leading_monomial(s: &ClassSetup, h2: &H2Value) -> LeadingMonomial {
    let base = likely_leading_monomial(s);
    let comm = s.abelianization().commutator_subgroup().order() as u64;
    LeadingMonomial::new(base.degree, base.coefficient * rat(comm * h2.value, 1))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectivePrediction {
    /// Order of π̃(ξ) in G^ab.
    pub k: u64,
    /// Count at large degrees divisible by k.
    pub stable_value: u64,
    pub average_num: String,
    pub average_den: String,
}

/// Stable projective count in the non-splitting case.
pub fn projective_stable_prediction(s: &ClassSetup, h2: &H2Value) -> Result<ProjectivePrediction> {
    if s.omega() != 0 {
        return Err(Error::Precondition(format!(
            "needs a non-splitting setup, splitting number is {}",
            s.omega()
        )));
    }
    let xi: Vec<i64> = (0..s.dstar().len())
        .map(|i| s.xi()[s.tau()[i]] as i64)
        .collect();
    let q = s.abelianization().quotient();
    let k = q.elem_order(&abelianized_product(&xi, s));
    let avg = rat(h2.value, k);
    Ok(ProjectivePrediction {
        k,
        stable_value: h2.value,
        average_num: avg.numer().to_string(),
        average_den: avg.denom().to_string(),
    })
}

fn require_unit_xi(s: &ClassSetup) -> Result<()> {
    if s.xi_total() != 1 {
        return Err(Error::Precondition(format!(
            "needs a single block with multiplicity 1, |ξ| = {}",
            s.xi_total()
        )));
    }
    Ok(())
}

/// Average order h2/(|G^ab|(s−1)!) · n^{s−1} of projective counts, |ξ| = 1.
pub fn projective_average_order(s: &ClassSetup, h2: &H2Value) -> Result<LeadingMonomial> {
    require_unit_xi(s)?;
    let sd = s.dstar().len() as u64;
    let den = BigInt::from(s.abelianization().ab_order()) * BigInt::from(factorial(sd - 1));
    Ok(LeadingMonomial::new(
        (sd - 1) as u32,
        BigRational::new(BigInt::from(h2.value), den),
    ))
}

/// `(q₀, c)` with q₀ = d·h2/(|G^ab|(s−1)!) and c = d^s·h2/(|G^ab|(s−1)!),
/// the leading coefficient along degrees dn.
pub fn equal_degree_generator_coefficient(
    s: &ClassSetup,
    h2: &H2Value,
    d: u64,
) -> Result<(BigRational, BigRational)> {
    let base = projective_average_order(s, h2)?.coefficient;
    let sd = s.dstar().len() as u32;
    let q0 = &base * rat(d, 1);
    let along = base * BigRational::from_integer(BigInt::from(d).pow(sd));
    Ok((q0, along))
}

/// Leading term of P_d in the variable n/2 for S_d with transpositions.
pub fn symmetric_leading_monomial(d: u64) -> Result<LeadingMonomial> {
    if d < 2 {
        return Err(Error::Precondition("needs d ≥ 2".into()));
    }
    let dp = d / 2;
    let den = BigUint::from(2u32).pow(dp as u32) * factorial(dp) * factorial(dp - 1);
    let mut c = BigRational::new(BigInt::from(factorial(d)), BigInt::from(den));
    if d % 2 == 1 {
        c *= BigRational::one() + rat(dp, 3);
    }
    Ok(LeadingMonomial::new((dp - 1) as u32, c))
}

/// Distributes each block's nξ as evenly as possible over its classes,
/// lower class index first.
pub fn balanced_likely_map(s: &ClassSetup, n: u64) -> Multidiscriminant {
    let mut psi = vec![0u64; s.dstar().len()];
    for b in 0..s.blocks().len() {
        let members: Vec<usize> = (0..psi.len()).filter(|&i| s.tau()[i] == b).collect();
        let total = n * s.xi()[b] as u64;
        let (q, r) = total.div_rem(&(members.len() as u64));
        for (j, &i) in members.iter().enumerate() {
            psi[i] = q + u64::from((j as u64) < r);
        }
    }
    Multidiscriminant(psi)
}

/// Reads |H₂(G,c)| off the plateau of |F_ψ| along balanced likely maps.
pub fn estimate_h2c(
    engine: &OrbitEngine,
    s: &ClassSetup,
    n_max: u64,
    window: usize,
) -> Result<H2Value> {
    let window = window.max(1);
    let comm = s.abelianization().commutator_subgroup().order() as u64;
    let mut degrees = Vec::new();
    let mut values: Vec<u64> = Vec::new();
    for n in 1..=n_max {
        let psi = balanced_likely_map(s, n);
        let q = ComponentQuery {
            n: n as u32,
            space: Space::Affine,
            connectedness: Connectedness::Connected,
            psi: Some(psi),
        };
        let f = engine
            .count_components(s, &q)?
            .total
            .to_u64()
            .unwrap_or(u64::MAX);
        degrees.push(n);
        values.push(f);
        let k = values.len();
        if k >= window && f > 0 && values[k - window..].iter().all(|&v| v == f) {
            if f % comm != 0 {
                return Err(Error::Inconsistent(format!(
                    "plateau value {f} is not divisible by |[G,G]| = {comm}"
                )));
            }
            return Ok(H2Value {
                value: f / comm,
                provenance: H2Provenance::Empirical {
                    degrees: degrees[k - window..].to_vec(),
                    plateau: values[k - window..].to_vec(),
                },
            });
        }
    }
    Err(Error::NotStabilized(format!(
        "|F_psi| did not stay constant over {window} degrees up to n = {n_max}: {values:?}"
    )))
}

/// Connected components of degree n whose multidiscriminant has min < m.
pub fn count_m_small(
    engine: &OrbitEngine,
    s: &ClassSetup,
    n: u64,
    m: u64,
    space: Space,
) -> Result<BigUint> {
    let mut total = BigUint::zero();
    for psi in enumerate_likely_maps(s, n) {
        if psi.min_count() >= m {
            continue;
        }
        let q = ComponentQuery {
            n: n as u32,
            space,
            connectedness: Connectedness::Connected,
            psi: Some(psi),
        };
        total += engine.count_components(s, &q)?.total;
    }
    Ok(total)
}

/// JSON description of a setup's numeric inputs for prediction reports.
pub fn setup_inputs(s: &ClassSetup, h2: Option<&H2Value>) -> serde_json::Value {
    json!({
        "group_order": s.group().order(),
        "ab_order": s.abelianization().ab_order(),
        "commutator_order": s.abelianization().commutator_subgroup().order(),
        "dstar": s.dstar().len(),
        "blocks": s.blocks().len(),
        "xi": s.xi(),
        "fibres": (0..s.blocks().len()).map(|b| s.fibre_size(b)).collect::<Vec<_>>(),
        "omega": s.omega(),
        "h2": h2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{FiniteGroup, GroupSpec};
    use std::sync::Arc;

    fn setup(g: &str, reps: &[&str]) -> ClassSetup {
        let g = Arc::new(FiniteGroup::build(&GroupSpec::parse_short(g).unwrap()).unwrap());
        ClassSetup::single_block(g, reps).unwrap()
    }

    #[test]
    fn likely_maps_small() {
        let s = setup("C3", &["g", "g^2"]);
        assert_eq!(splitting_number(&s), 1);
        for n in 0..6 {
            assert_eq!(count_likely_maps(&s, n), BigUint::from(n + 1));
            let maps = enumerate_likely_maps(&s, n);
            assert_eq!(maps.len() as u64, n + 1);
            assert!(maps.windows(2).all(|w| w[0] < w[1]));
        }
        let s3 = setup("S3", &["(1 2)"]);
        assert_eq!(
            enumerate_likely_maps(&s3, 4),
            vec![Multidiscriminant(vec![4])]
        );
        assert_eq!(count_likely_maps(&s3, 7), BigUint::one());
        assert_eq!(
            enumerate_likely_maps(&s, 0),
            vec![Multidiscriminant(vec![0, 0])]
        );
    }

    #[test]
    fn leading_monomials() {
        let s = setup("C3", &["g", "g^2"]);
        assert_eq!(
            likely_leading_monomial(&s),
            LeadingMonomial::new(1, rat(1, 1))
        );
        let h = H2Value::user(1).unwrap();
        assert_eq!(
            affine_leading_monomial(&s, &h),
            LeadingMonomial::new(1, rat(1, 1))
        );
        let s3 = setup("S3", &["(1 2)"]);
        assert_eq!(
            affine_leading_monomial(&s3, &h),
            LeadingMonomial::new(0, rat(3, 1))
        );
        assert_eq!(
            projective_average_order(&s, &h).unwrap(),
            LeadingMonomial::new(1, rat(1, 3))
        );
    }

    #[test]
    fn really_likely() {
        let s = setup("C3", &["g", "g^2"]);
        assert!(is_really_likely(&Multidiscriminant(vec![0, 0]), &s));
        assert!(is_really_likely(&Multidiscriminant(vec![1, 1]), &s));
        assert!(!is_really_likely(&Multidiscriminant(vec![1, 0]), &s));
        let (exact, lead) = count_really_likely_upto(&s, 6);
        let oracle = (0..=6u64)
            .flat_map(|a| (0..=6 - a).map(move |b| (a, b)))
            .filter(|&(a, b)| (a + 2 * b) % 3 == 0)
            .count();
        assert_eq!(exact, BigUint::from(oracle));
        assert_eq!(lead, LeadingMonomial::new(2, rat(1, 6)));
    }

    #[test]
    fn projective_stable() {
        let h = H2Value::user(1).unwrap();
        let p = projective_stable_prediction(&setup("S3", &["(1 2)"]), &h).unwrap();
        assert_eq!((p.k, p.stable_value), (2, 1));
        let p = projective_stable_prediction(&setup("C2", &["g"]), &h).unwrap();
        assert_eq!(p.k, 2);
        let p = projective_stable_prediction(&setup("C3", &["g", "g^2"]), &h);
        assert!(p.is_err());
    }

    #[test]
    fn equal_degree() {
        let h = H2Value::user(1).unwrap();
        let c2 = setup("C2", &["g"]);
        let (q0, _) = equal_degree_generator_coefficient(&c2, &h, 2).unwrap();
        assert_eq!(q0, rat(1, 1));
        let c3 = setup("C3", &["g", "g^2"]);
        let (q0, along) = equal_degree_generator_coefficient(&c3, &h, 1).unwrap();
        assert_eq!(q0, projective_average_order(&c3, &h).unwrap().coefficient);
        assert_eq!(along, q0);
    }

    #[test]
    fn symmetric_coefficients() {
        assert_eq!(
            symmetric_leading_monomial(4).unwrap(),
            LeadingMonomial::new(1, rat(3, 1))
        );
        assert_eq!(
            symmetric_leading_monomial(2).unwrap(),
            LeadingMonomial::new(0, rat(1, 1))
        );
        assert_eq!(
            symmetric_leading_monomial(5).unwrap(),
            LeadingMonomial::new(1, rat(25, 1))
        );
        assert!(symmetric_leading_monomial(1).is_err());
    }

    #[test]
    fn balanced_maps() {
        let s = setup("C3", &["g", "g^2"]);
        assert_eq!(balanced_likely_map(&s, 5), Multidiscriminant(vec![3, 2]));
        assert_eq!(balanced_likely_map(&s, 4), Multidiscriminant(vec![2, 2]));
    }
}
