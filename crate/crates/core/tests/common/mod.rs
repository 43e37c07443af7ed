//! Brute-force oracles shared by the integration tests. Nothing here uses
//! the orbit engine.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use hurwitz_core::orbit::{Connectedness, Space};
use hurwitz_core::subgroup::Subgroup;
use hurwitz_core::{ClassSetup, ElemId, FiniteGroup, GroupSpec};

pub fn grp(name: &str) -> Arc<FiniteGroup> {
    Arc::new(FiniteGroup::build(&GroupSpec::parse_short(name).unwrap()).unwrap())
}

pub fn setup(name: &str, reps: &[&str]) -> ClassSetup {
    ClassSetup::single_block(grp(name), reps).unwrap()
}

struct Dsu(Vec<u32>);

impl Dsu {
    fn find(&mut self, mut x: u32) -> u32 {
        while self.0[x as usize] != x {
            let p = self.0[x as usize];
            self.0[x as usize] = self.0[p as usize];
            x = p;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b) as usize] = a.min(b);
        }
    }
}

#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct Oracle {
    /// Lexicographically least member of each orbit, sorted.
    pub reps: Vec<Vec<ElemId>>,
    pub sizes: Vec<u64>,
    /// Orbit count per multidiscriminant.
    pub per_psi: BTreeMap<Vec<u64>, u64>,
}

impl Oracle {
    pub fn total(&self) -> u64 {
        self.reps.len() as u64
    }
}

fn product(g: &FiniteGroup, t: &[ElemId]) -> ElemId {
    t.iter().fold(0, |acc, &x| g.mul(acc, x))
}

/// Orbits of degree-n tuples over `c`, by union-find over every tuple.
pub fn brute_orbits(s: &ClassSetup, n: u32, space: Space, conn: Connectedness) -> Oracle {
    let g = s.group();
    let c = s.c_elements();
    let len = n as usize * s.xi_total() as usize;
    let want: Vec<u64> = s.xi().iter().map(|&x| x as u64 * n as u64).collect();
    let block_of = |x: ElemId| s.tau()[s.dstar_index(x).unwrap()];
    let total = c.len().pow(len as u32);
    assert!(total <= 4_000_000, "oracle too large");

    let decode = |mut code: usize| {
        let mut t = vec![0; len];
        for i in (0..len).rev() {
            t[i] = c[code % c.len()];
            code /= c.len();
        }
        t
    };
    let index_of: BTreeMap<ElemId, usize> = c.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let encode = |t: &[ElemId]| t.iter().fold(0usize, |acc, x| acc * c.len() + index_of[x]);

    let admissible = |t: &[ElemId]| {
        let mut sums = vec![0u64; want.len()];
        for &x in t {
            sums[block_of(x)] += 1;
        }
        if sums != want {
            return false;
        }
        if space == Space::Projective && product(g, t) != 0 {
            return false;
        }
        conn == Connectedness::All || Subgroup::closure(g, t).order() == g.order()
    };

    let mut dsu = Dsu((0..total as u32).collect());
    let mut keep = vec![false; total];
    for code in 0..total {
        let t = decode(code);
        if !admissible(&t) {
            continue;
        }
        keep[code] = true;
        for i in 0..len.saturating_sub(1) {
            let mut u = t.clone();
            let (a, b) = (u[i], u[i + 1]);
            u[i] = g.conj(b, a);
            u[i + 1] = a;
            dsu.union(code as u32, encode(&u) as u32);
        }
    }
    let mut by_root: BTreeMap<u32, (Vec<ElemId>, u64)> = BTreeMap::new();
    for code in 0..total {
        if !keep[code] {
            continue;
        }
        let t = decode(code);
        let r = dsu.find(code as u32);
        let e = by_root.entry(r).or_insert_with(|| (t.clone(), 0));
        if t < e.0 {
            e.0 = t;
        }
        e.1 += 1;
    }
    let mut orbits: Vec<(Vec<ElemId>, u64)> = by_root.into_values().collect();
    orbits.sort();
    let mut out = Oracle::default();
    for (rep, size) in orbits {
        let mut psi = vec![0u64; s.dstar().len()];
        for &x in &rep {
            psi[s.dstar_index(x).unwrap()] += 1;
        }
        *out.per_psi.entry(psi).or_default() += 1;
        out.reps.push(rep);
        out.sizes.push(size);
    }
    out
}

/// Likely maps by direct enumeration of all vectors with the right block
/// sums, sorted.
pub fn brute_likely_maps(s: &ClassSetup, n: u64) -> Vec<Vec<u64>> {
    let k = s.dstar().len();
    let want: Vec<u64> = s.xi().iter().map(|&x| x as u64 * n).collect();
    let bound = want.iter().copied().max().unwrap_or(0);
    let mut out = Vec::new();
    let mut psi = vec![0u64; k];
    loop {
        let mut sums = vec![0u64; want.len()];
        for (i, &v) in psi.iter().enumerate() {
            sums[s.tau()[i]] += v;
        }
        if sums == want {
            out.push(psi.clone());
        }
        // odometer, last coordinate fastest
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if psi[i] < bound {
                psi[i] += 1;
                break;
            }
            psi[i] = 0;
        }
    }
}

/// Number of likely maps by a table of ways to write each block sum with
/// a given number of nonnegative parts.
pub fn dp_likely_count(s: &ClassSetup, n: u64) -> u128 {
    let mut total = 1u128;
    for b in 0..s.xi().len() {
        let parts = s.tau().iter().filter(|&&t| t == b).count();
        let target = (s.xi()[b] as u64 * n) as usize;
        let mut ways = vec![0u128; target + 1];
        ways[0] = 1;
        for _ in 0..parts {
            let mut next = vec![0u128; target + 1];
            for (sum, &w) in ways.iter().enumerate() {
                for add in 0..=target - sum {
                    next[sum + add] += w;
                }
            }
            ways = next;
        }
        total *= ways[target];
    }
    total
}

/// Seeded random setups with at most 3 blocks, at most 6 classes in D*
/// and multiplicities at most 3.
pub fn random_setups(seed: u64, count: usize) -> Vec<ClassSetup> {
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let groups: Vec<Arc<FiniteGroup>> = ["C7", "C6", "S4", "S3xC2", "D4", "Q8", "C2xC2"]
        .iter()
        .map(|n| grp(n))
        .collect();
    let mut out = Vec::new();
    while out.len() < count {
        let g = groups.choose(&mut rng).unwrap().clone();
        let classes = hurwitz_core::classes::ConjugacyClassTable::new(&g);
        let mut ks: Vec<usize> = (0..classes.len())
            .filter(|&k| classes.class(k) != [0])
            .collect();
        ks.shuffle(&mut rng);
        ks.truncate(rng.gen_range(1..=ks.len().min(6)));
        let nb = rng.gen_range(1..=ks.len().min(3));
        let mut blocks = vec![Vec::new(); nb];
        for (i, &k) in ks.iter().enumerate() {
            let b = if i < nb { i } else { rng.gen_range(0..nb) };
            blocks[b].push(k);
        }
        let xi = (0..nb).map(|_| rng.gen_range(1..=3)).collect();
        if let Ok(s) = ClassSetup::new(g, blocks, xi) {
            out.push(s);
        }
    }
    out
}

/// Degree and leading coefficient of a sequence that is polynomial in n
/// from its start, by repeated differences.
pub fn finite_difference_leading(values: &[i128]) -> (usize, num_rational::BigRational) {
    let mut diff: Vec<i128> = values.to_vec();
    let mut d = 0;
    loop {
        if diff.iter().all(|&v| v == diff[0]) {
            let fact: i128 = (1..=d as i128).product();
            return (
                d,
                num_rational::BigRational::new(diff[0].into(), fact.into()),
            );
        }
        diff = diff.windows(2).map(|w| w[1] - w[0]).collect();
        d += 1;
        assert!(diff.len() >= 2, "sequence too short for its degree");
    }
}
