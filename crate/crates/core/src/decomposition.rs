//! Splitting component counts by monodromy group, and Möbius inversion on
//! the poset of D-generated subgroups.

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::orbit::{ComponentQuery, Connectedness, OrbitEngine, Space};
use crate::setup::ClassSetup;
use crate::subgroup::Subgroup;

/// A finite poset of subgroups under containment with its Möbius function.
#[derive(Debug, Clone)]
pub struct SubgroupLattice {
    nodes: Vec<Subgroup>,
    leq: Vec<Vec<bool>>,
    mobius: Vec<Vec<i64>>,
}

impl SubgroupLattice {
    /// Nodes are sorted by order (a linear extension of containment).
    pub fn new(mut nodes: Vec<Subgroup>) -> Self {
        nodes.sort_by(|a, b| (a.order(), a.elements()).cmp(&(b.order(), b.elements())));
        nodes.dedup();
        let k = nodes.len();
        let leq: Vec<Vec<bool>> = (0..k)
            .map(|i| (0..k).map(|j| nodes[i].is_subgroup_of(&nodes[j])).collect())
            .collect();
        let mobius = mobius(&leq);
        SubgroupLattice { nodes, leq, mobius }
    }

    /// Sub_{G,D} (which includes the trivial subgroup).
    pub fn for_setup(s: &ClassSetup, lattice_bound: usize) -> Result<Self> {
        Ok(Self::new(s.d_generated_subgroups(lattice_bound)?))
    }

    pub fn nodes(&self) -> &[Subgroup] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i][j]
    }

    /// μ(node i, node j); zero unless i ≤ j.
    pub fn mobius(&self, i: usize, j: usize) -> i64 {
        self.mobius[i][j]
    }

    pub fn index_of(&self, h: &Subgroup) -> Option<usize> {
        self.nodes.iter().position(|x| x == h)
    }
}

/// Möbius function of a finite poset given by its order relation, whose
/// index order must extend the partial order.
pub fn mobius(leq: &[Vec<bool>]) -> Vec<Vec<i64>> {
    let k = leq.len();
    let mut mu = vec![vec![0i64; k]; k];
    for i in 0..k {
        mu[i][i] = 1;
        for j in i + 1..k {
            if !leq[i][j] {
                continue;
            }
            let s: i64 = (i..j)
                .filter(|&m| leq[i][m] && leq[m][j])
                .map(|m| mu[i][m])
                .sum();
            mu[i][j] = -s;
        }
    }
    mu
}

#[derive(Debug, Clone, Serialize)]
pub struct DecompositionRow {
    pub subgroup: String,
    pub order: usize,
    pub omega: usize,
    pub chur: BigUint,
}

/// One degree of the subgroup decomposition: per-subgroup connected counts and their sum.
#[derive(Debug, Clone, Serialize)]
pub struct DecompositionTable {
    pub n: u32,
    pub space: Space,
    pub rows: Vec<DecompositionRow>,
    pub hur_sum: BigUint,
    pub hur_direct: BigUint,
}

/// Connected counts over Sub_{G,D} via restricted setups, checked against
/// a direct count of all components.
pub fn hur_from_chur(
    engine: &OrbitEngine,
    s: &ClassSetup,
    n: u32,
    space: Space,
    lattice: &SubgroupLattice,
) -> Result<DecompositionTable> {
    let g = s.group();
    let mut rows = Vec::new();
    let mut sum = BigUint::zero();
    for h in lattice.nodes() {
        let (chur, omega) = if h.is_trivial() {
            (BigUint::from(u32::from(n == 0)), 0)
        } else {
            let r = s.restrict(h)?;
            let q = ComponentQuery::new(n, space, Connectedness::Connected);
            (engine.count_components(&r, &q)?.total, r.omega())
        };
        sum += &chur;
        rows.push(DecompositionRow {
            subgroup: h.describe(g),
            order: h.order(),
            omega,
            chur,
        });
    }
    let direct = engine
        .count_components(s, &ComponentQuery::new(n, space, Connectedness::All))?
        .total;
    if direct != sum {
        return Err(Error::Inconsistent(format!(
            "degree {n}: direct count {direct} differs from the subgroup sum {sum}"
        )));
    }
    Ok(DecompositionTable {
        n,
        space,
        rows,
        hur_sum: sum,
        hur_direct: direct,
    })
}

/// hur(H) = Σ_{H′ ≤ H} chur(H′), indexed like the lattice nodes.
pub fn hur_per_subgroup(chur: &[BigInt], lattice: &SubgroupLattice) -> Vec<BigInt> {
    (0..lattice.len())
        .map(|j| {
            (0..lattice.len())
                .filter(|&i| lattice.leq(i, j))
                .map(|i| chur[i].clone())
                .sum()
        })
        .collect()
}

/// chur(H) = Σ_{H′ ≤ H} μ(H′, H)·hur(H′).
pub fn chur_from_hur(hur: &[BigInt], lattice: &SubgroupLattice) -> Result<Vec<BigInt>> {
    if hur.len() != lattice.len() {
        return Err(Error::Precondition(format!(
            "{} counts for a lattice of {} nodes",
            hur.len(),
            lattice.len()
        )));
    }
    let mut out = Vec::with_capacity(hur.len());
    for j in 0..lattice.len() {
        let v: BigInt = (0..lattice.len())
            .filter(|&i| lattice.leq(i, j))
            .map(|i| BigInt::from(lattice.mobius(i, j)) * &hur[i])
            .sum();
        if v.is_negative() {
            return Err(Error::Inconsistent(format!(
                "negative connected count {v} for subgroup {j}"
            )));
        }
        out.push(v);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{FiniteGroup, GroupSpec};
    use crate::orbit::EngineConfig;
    use crate::subgroup::all_subgroups;
    use std::sync::Arc;

    fn s3() -> ClassSetup {
        let g = Arc::new(FiniteGroup::build(&GroupSpec::parse_short("S3").unwrap()).unwrap());
        ClassSetup::single_block(g, &["(1 2)"]).unwrap()
    }

    #[test]
    fn mobius_small_posets() {
        let chain = vec![vec![true, true], vec![false, true]];
        assert_eq!(mobius(&chain)[0][1], -1);
        let boolean = vec![
            vec![true, true, true, true],
            vec![false, true, false, true],
            vec![false, false, true, true],
            vec![false, false, false, true],
        ];
        assert_eq!(mobius(&boolean)[0][3], 1);
    }

    #[test]
    fn mobius_of_s3_lattices() {
        let s = s3();
        let full = SubgroupLattice::new(all_subgroups(s.group(), 200).unwrap());
        assert_eq!(full.len(), 6);
        assert_eq!(full.mobius(0, 5), 3);
        let d = SubgroupLattice::for_setup(&s, 200).unwrap();
        assert_eq!(d.len(), 5);
        assert_eq!(d.mobius(0, 4), 2);
        assert_eq!(d.mobius(1, 4), -1);
    }

    #[test]
    fn s3_decomposition() {
        let s = s3();
        let e = OrbitEngine::new(EngineConfig::default()).unwrap();
        let lat = SubgroupLattice::for_setup(&s, 200).unwrap();
        let t = hur_from_chur(&e, &s, 2, Space::Affine, &lat).unwrap();
        let churs: Vec<u64> = t
            .rows
            .iter()
            .map(|r| r.chur.clone().try_into().unwrap())
            .collect();
        assert_eq!(churs, vec![0, 1, 1, 1, 2]);
        assert_eq!(t.hur_direct, BigUint::from(5u32));
        let t = hur_from_chur(&e, &s, 2, Space::Projective, &lat).unwrap();
        assert_eq!(t.hur_direct, BigUint::from(3u32));
        let t = hur_from_chur(&e, &s, 0, Space::Affine, &lat).unwrap();
        assert_eq!(t.hur_direct, BigUint::from(1u32));

        let chur: Vec<BigInt> = churs.iter().map(|&x| BigInt::from(x)).collect();
        let hur = hur_per_subgroup(&chur, &lat);
        assert_eq!(hur[4], BigInt::from(5));
        assert_eq!(chur_from_hur(&hur, &lat).unwrap(), chur);
        let zeros = vec![BigInt::zero(); lat.len()];
        assert_eq!(chur_from_hur(&zeros, &lat).unwrap(), zeros);
    }
}
