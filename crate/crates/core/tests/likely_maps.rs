mod common;

use common::{brute_likely_maps, dp_likely_count, finite_difference_leading, random_setups};
use hurwitz_core::counting::{count_likely_maps, enumerate_likely_maps, likely_leading_monomial};

#[test]
fn counts_match_dynamic_programming() {
    for s in random_setups(11, 24) {
        let mut seq = Vec::new();
        for n in 0..=50 {
            let got: u128 = count_likely_maps(&s, n).try_into().unwrap();
            assert_eq!(got, dp_likely_count(&s, n), "n={n}");
            seq.push(got as i128);
        }
        let (d, c) = finite_difference_leading(&seq);
        let lead = likely_leading_monomial(&s);
        assert_eq!((d as u32, c), (lead.degree, lead.coefficient));
        assert_eq!(d, s.omega());
    }
}

#[test]
fn enumeration_matches_brute_force() {
    for s in random_setups(12, 24) {
        for n in 0..=3 {
            let got: Vec<Vec<u64>> = enumerate_likely_maps(&s, n)
                .into_iter()
                .map(|m| m.0)
                .collect();
            assert_eq!(got, brute_likely_maps(&s, n), "n={n}");
        }
    }
}
