//! Subgroups, the subgroup lattice, and abelianization.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{ElemId, FiniteGroup, IDENTITY};

/// Default bound on the group order for exhaustive lattice enumeration.
pub const DEFAULT_LATTICE_BOUND: usize = 200;

/// A set of element ids backed by a bit vector.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ElementSet {
    words: Vec<u64>,
}

impl ElementSet {
    pub fn empty(universe: usize) -> Self {
        ElementSet {
            words: vec![0; universe.div_ceil(64)],
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut s = Self::empty(universe);
        for x in 0..universe {
            s.insert(x as ElemId);
        }
        s
    }

    pub fn from_elements(universe: usize, elems: impl IntoIterator<Item = ElemId>) -> Self {
        let mut s = Self::empty(universe);
        for x in elems {
            s.insert(x);
        }
        s
    }

    #[inline]
    pub fn contains(&self, x: ElemId) -> bool {
        let x = x as usize;
        self.words
            .get(x / 64)
            .is_some_and(|w| w >> (x % 64) & 1 == 1)
    }

    /// Returns `true` if `x` was not present.
    #[inline]
    pub fn insert(&mut self, x: ElemId) -> bool {
        let x = x as usize;
        let bit = 1u64 << (x % 64);
        let w = &mut self.words[x / 64];
        let fresh = *w & bit == 0;
        *w |= bit;
        fresh
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_subset(&self, other: &ElementSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &ElementSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = ElemId> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            (0..64)
                .filter(move |b| w >> b & 1 == 1)
                .map(move |b| (i * 64 + b) as ElemId)
        })
    }
}

impl fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Subgroup {
    elements: ElementSet,
    generators: Vec<ElemId>,
    order: usize,
}

/// Equality is equality of element sets; generators are ignored.
impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.elements == other.elements
    }
}

impl Eq for Subgroup {}

impl std::hash::Hash for Subgroup {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.elements.hash(state);
    }
}

impl Subgroup {
    /// Smallest subgroup containing `gens`.
    pub fn closure(g: &FiniteGroup, gens: &[ElemId]) -> Subgroup {
        let mut elements = ElementSet::empty(g.order());
        elements.insert(IDENTITY);
        let mut list = vec![IDENTITY];
        let mut gens_nt: Vec<ElemId> = gens.iter().copied().filter(|&x| x != IDENTITY).collect();
        gens_nt.dedup();
        let mut head = 0;
        while head < list.len() {
            let x = list[head];
            head += 1;
            for &s in &gens_nt {
                let y = g.mul(x, s);
                if elements.insert(y) {
                    list.push(y);
                }
            }
        }
        Subgroup {
            order: list.len(),
            elements,
            generators: gens.to_vec(),
        }
    }

    pub fn trivial(g: &FiniteGroup) -> Subgroup {
        Self::closure(g, &[])
    }

    pub fn whole(g: &FiniteGroup) -> Subgroup {
        Subgroup {
            elements: ElementSet::full(g.order()),
            generators: g.elements().skip(1).collect(),
            order: g.order(),
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn elements(&self) -> &ElementSet {
        &self.elements
    }

    pub fn generators(&self) -> &[ElemId] {
        &self.generators
    }

    pub fn contains(&self, x: ElemId) -> bool {
        self.elements.contains(x)
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.elements.is_subset(&other.elements)
    }

    /// Sorted element ids.
    pub fn element_list(&self) -> Vec<ElemId> {
        self.elements.iter().collect()
    }

    /// Short human-readable label: order and generator labels.
    pub fn describe(&self, g: &FiniteGroup) -> String {
        if self.is_trivial() {
            return "1".to_string();
        }
        if self.order == g.order() {
            return "G".to_string();
        }
        let gens: Vec<&str> = self.generators.iter().map(|&x| g.label(x)).collect();
        format!("<{}>", gens.join(","))
    }
}

/// Every subgroup of `g`, each exactly once, sorted by (order, element set).
pub fn all_subgroups(g: &FiniteGroup, bound: usize) -> Result<Vec<Subgroup>> {
    if g.order() > bound {
        return Err(Error::LatticeTooLarge {
            order: g.order(),
            max: bound,
        });
    }
    let mut seen: HashSet<ElementSet> = HashSet::new();
    let mut cyclic: Vec<Subgroup> = Vec::new();
    for x in g.elements() {
        let c = Subgroup::closure(g, &[x]);
        if seen.insert(c.elements.clone()) {
            cyclic.push(c);
        }
    }
    // Every subgroup is the join of its cyclic subgroups, so joining found
    // subgroups with cyclic ones until nothing new appears reaches them all.
    let mut all: Vec<Subgroup> = cyclic.clone();
    let mut head = 0;
    while head < all.len() {
        let h = all[head].clone();
        head += 1;
        for c in &cyclic {
            if c.is_subgroup_of(&h) {
                continue;
            }
            let mut gens = h.generators.clone();
            gens.extend(c.generators.iter().copied().filter(|&x| x != IDENTITY));
            let j = Subgroup::closure(g, &gens);
            if seen.insert(j.elements.clone()) {
                all.push(j);
            }
        }
    }
    for s in &mut all {
        minimise_generators(g, s);
    }
    all.sort_by(|a, b| (a.order, &a.elements).cmp(&(b.order, &b.elements)));
    Ok(all)
}

/// Greedily drops redundant generators, keeping the subgroup unchanged.
fn minimise_generators(g: &FiniteGroup, s: &mut Subgroup) {
    let mut gens: Vec<ElemId> = s
        .generators
        .iter()
        .copied()
        .filter(|&x| x != IDENTITY)
        .collect();
    gens.sort_unstable();
    gens.dedup();
    let mut i = 0;
    while i < gens.len() {
        let mut trial = gens.clone();
        trial.remove(i);
        if Subgroup::closure(g, &trial).order == s.order {
            gens = trial;
        } else {
            i += 1;
        }
    }
    s.generators = gens;
}

/// Finite abelian group `Z/m_1 × … × Z/m_k` in invariant-factor form
/// (`m_{i+1} | m_i`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AbelianGroup {
    factors: Vec<u64>,
}

pub type AbElem = Vec<u64>;

impl AbelianGroup {
    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn order(&self) -> u64 {
        self.factors.iter().product()
    }

    pub fn exponent(&self) -> u64 {
        self.factors.first().copied().unwrap_or(1)
    }

    pub fn identity(&self) -> AbElem {
        vec![0; self.factors.len()]
    }

    pub fn add(&self, a: &AbElem, b: &AbElem) -> AbElem {
        a.iter()
            .zip(b)
            .zip(&self.factors)
            .map(|((x, y), m)| (x + y) % m)
            .collect()
    }

    pub fn scale(&self, a: &AbElem, k: i64) -> AbElem {
        a.iter()
            .zip(&self.factors)
            .map(|(&x, &m)| {
                let k = k.rem_euclid(m as i64) as u64;
                (x * k) % m
            })
            .collect()
    }

    pub fn is_identity(&self, a: &AbElem) -> bool {
        a.iter().all(|&x| x == 0)
    }

    pub fn elem_order(&self, a: &AbElem) -> u64 {
        a.iter().zip(&self.factors).fold(1, |acc, (&x, &m)| {
            num_integer::lcm(acc, m / num_integer::gcd(x, m))
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Abelianization {
    commutator_subgroup: Subgroup,
    quotient: AbelianGroup,
    project: Vec<AbElem>,
}

impl Abelianization {
    pub fn new(g: &FiniteGroup) -> Result<Self> {
        let mut comms: Vec<ElemId> = Vec::new();
        let mut seen = ElementSet::empty(g.order());
        for a in g.elements() {
            for b in g.elements() {
                let c = g.commutator(a, b);
                if seen.insert(c) {
                    comms.push(c);
                }
            }
        }
        let derived = Subgroup::closure(g, &comms);

        // Cosets x[G,G], represented by their minimal element.
        let n = g.order();
        let mut coset_of = vec![usize::MAX; n];
        let mut reps: Vec<ElemId> = Vec::new();
        for x in g.elements() {
            if coset_of[x as usize] != usize::MAX {
                continue;
            }
            let idx = reps.len();
            reps.push(x);
            for k in derived.elements.iter() {
                coset_of[g.mul(x, k) as usize] = idx;
            }
        }
        let m = reps.len();
        let qmul = |a: usize, b: usize| coset_of[g.mul(reps[a], reps[b]) as usize];

        // Peel cyclic factors: repeatedly take an element of maximal order
        // modulo the span found so far, lifted to have exactly that order.
        let mut coords: HashMap<usize, Vec<u64>> = HashMap::new();
        coords.insert(0, Vec::new());
        let mut factors: Vec<u64> = Vec::new();
        while coords.len() < m {
            let order_mod_span = |x: usize| {
                let mut k = 1u64;
                let mut y = x;
                while !coords.contains_key(&y) {
                    y = qmul(y, x);
                    k += 1;
                }
                k
            };
            let (best, k) = (0..m)
                .map(|x| (x, order_mod_span(x)))
                .max_by_key(|&(x, k)| (k, std::cmp::Reverse(x)))
                .expect("nonempty quotient");
            let q_order = |x: usize| {
                let mut k = 1u64;
                let mut y = x;
                while y != 0 {
                    y = qmul(y, x);
                    k += 1;
                }
                k
            };
            let mut span: Vec<usize> = coords.keys().copied().collect();
            span.sort_unstable();
            let lift = span
                .iter()
                .map(|&s| qmul(best, s))
                .find(|&x| q_order(x) == k)
                .ok_or_else(|| {
                    Error::Inconsistent("abelian quotient has no complement lift".into())
                })?;
            let mut next: HashMap<usize, Vec<u64>> = HashMap::new();
            for (&s, c) in &coords {
                let mut y = s;
                for j in 0..k {
                    let mut cj = c.clone();
                    cj.push(j);
                    next.insert(y, cj);
                    y = qmul(y, lift);
                }
            }
            coords = next;
            factors.push(k);
        }
        let project = (0..n).map(|x| coords[&coset_of[x]].clone()).collect();
        Ok(Abelianization {
            commutator_subgroup: derived,
            quotient: AbelianGroup { factors },
            project,
        })
    }

    pub fn commutator_subgroup(&self) -> &Subgroup {
        &self.commutator_subgroup
    }

    pub fn quotient(&self) -> &AbelianGroup {
        &self.quotient
    }

    pub fn ab_order(&self) -> u64 {
        self.quotient.order()
    }

    pub fn exponent_ab(&self) -> u64 {
        self.quotient.exponent()
    }

    pub fn project(&self, x: ElemId) -> &AbElem {
        &self.project[x as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupSpec;

    fn grp(s: &str) -> FiniteGroup {
        FiniteGroup::build(&GroupSpec::parse_short(s).unwrap()).unwrap()
    }

    #[test]
    fn closure_examples() {
        let s3 = grp("S3");
        assert!(Subgroup::closure(&s3, &[]).is_trivial());
        let t = s3.parse_element("(1 2)").unwrap();
        assert_eq!(Subgroup::closure(&s3, &[t]).order(), 2);
        let s4 = grp("S4");
        let a = s4.parse_element("(1 2)").unwrap();
        let b = s4.parse_element("(3 4)").unwrap();
        assert_eq!(Subgroup::closure(&s4, &[a, b]).order(), 4);
    }

    #[test]
    fn lattice_sizes() {
        assert_eq!(all_subgroups(&grp("C5"), 200).unwrap().len(), 2);
        assert_eq!(all_subgroups(&grp("S3"), 200).unwrap().len(), 6);
        assert_eq!(all_subgroups(&grp("S4"), 200).unwrap().len(), 30);
        assert_eq!(all_subgroups(&grp("D4"), 200).unwrap().len(), 10);
        assert_eq!(all_subgroups(&grp("Q8"), 200).unwrap().len(), 6);
        assert!(matches!(
            all_subgroups(&grp("S4"), 20),
            Err(Error::LatticeTooLarge { .. })
        ));
    }

    #[test]
    fn lattice_is_sorted_and_lagrange_holds() {
        let g = grp("S4");
        let subs = all_subgroups(&g, 200).unwrap();
        assert!(subs.first().unwrap().is_trivial());
        assert_eq!(subs.last().unwrap().order(), 24);
        for w in subs.windows(2) {
            assert!((w[0].order(), w[0].elements()) < (w[1].order(), w[1].elements()));
        }
        for h in &subs {
            assert_eq!(g.order() % h.order(), 0);
            assert_eq!(
                Subgroup::closure(&g, h.generators()).elements(),
                h.elements()
            );
        }
    }

    #[test]
    fn abelianization_examples() {
        let s3 = Abelianization::new(&grp("S3")).unwrap();
        assert_eq!(s3.ab_order(), 2);
        assert_eq!(s3.commutator_subgroup().order(), 3);
        let c6 = Abelianization::new(&grp("C6")).unwrap();
        assert_eq!(c6.ab_order(), 6);
        assert!(c6.commutator_subgroup().is_trivial());
        let s4 = Abelianization::new(&grp("S4")).unwrap();
        assert_eq!(s4.ab_order(), 2);
        assert_eq!(s4.commutator_subgroup().order(), 12);
        let q8 = Abelianization::new(&grp("Q8")).unwrap();
        assert_eq!(q8.quotient().factors(), &[2, 2]);
        let c2c4 = Abelianization::new(&grp("C2xC4")).unwrap();
        assert_eq!(c2c4.quotient().factors(), &[4, 2]);
        let a5 = Abelianization::new(&grp("A5")).unwrap();
        assert_eq!(a5.ab_order(), 1);
    }

    #[test]
    fn projection_is_a_homomorphism_killing_exactly_the_derived_subgroup() {
        for name in ["S3", "S4", "D4", "Q8", "C2xC4", "S3xC2", "A4"] {
            let g = grp(name);
            let ab = Abelianization::new(&g).unwrap();
            let q = ab.quotient();
            assert_eq!(
                q.order() as usize * ab.commutator_subgroup().order(),
                g.order()
            );
            for x in g.elements() {
                assert_eq!(
                    q.is_identity(ab.project(x)),
                    ab.commutator_subgroup().contains(x)
                );
                for y in g.elements() {
                    assert_eq!(
                        ab.project(g.mul(x, y)),
                        &q.add(ab.project(x), ab.project(y))
                    );
                }
            }
        }
    }
}
