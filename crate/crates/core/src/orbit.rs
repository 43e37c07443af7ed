//! Exact enumeration of braid orbits.
//!
//! Tuples are handled as words over an alphabet (the set `c`, or the union
//! of the conjugacy classes of a tuple's entries). Each likely map ψ is an
//! independent bucket: its tuples are swept in lexicographic order and every
//! unvisited one seeds a breadth-first closure under all σ_i^{±1}.
//!
//! When the raw state space would not fit the budget, states are taken
//! modulo swaps of adjacent commuting entries (such a swap is itself a braid
//! move, so orbits are unions of these classes) and each class is stored by
//! its lexicographically least word.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use dashmap::DashSet;
use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::counting::enumerate_likely_maps;
use crate::error::{Error, Result};
use crate::group::{ElemId, FiniteGroup, IDENTITY};
use crate::nielsen::{
    abelianized_product, word_in_entries, BraidWord, Multidiscriminant, NielsenTuple, Tracker,
};
use crate::setup::ClassSetup;
use crate::subgroup::Subgroup;

pub const DEFAULT_MAX_STATES: u64 = 200_000_000;
pub const DEFAULT_MAX_MEMORY: u64 = 8 << 30;

/// Frontiers smaller than this are expanded on the calling thread.
const PAR_FRONTIER: usize = 4096;
const PAR_CHUNK: usize = 1024;
/// Rough cost of one hashed state, in bytes.
const HASHED_STATE_BYTES: u64 = 48;
const NONE: u16 = u16::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    Affine,
    Projective,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Connectedness {
    All,
    Connected,
}

/// State-space representation used by the orbit search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reduction {
    /// Raw tuples when they fit the state budget (always reduced for abelian groups).
    Auto,
    Raw,
    /// Classes modulo commuting adjacent swaps.
    Commutation,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EngineConfig {
    pub workers: usize,
    pub max_states: u64,
    pub max_memory_bytes: u64,
    pub reduction: Reduction,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            workers: 1,
            max_states: DEFAULT_MAX_STATES,
            max_memory_bytes: DEFAULT_MAX_MEMORY,
            reduction: Reduction::Auto,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComponentQuery {
    /// Degree; tuples have size n·|ξ|.
    pub n: u32,
    pub space: Space,
    pub connectedness: Connectedness,
    /// Restricts the count to one likely map.
    pub psi: Option<Multidiscriminant>,
}

impl ComponentQuery {
    pub fn new(n: u32, space: Space, connectedness: Connectedness) -> Self {
        ComponentQuery {
            n,
            space,
            connectedness,
            psi: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OrbitRecord {
    /// Lexicographically least member.
    pub canonical_rep: NielsenTuple,
    /// Exact number of tuples; absent when the search ran on reduced states.
    pub orbit_size: Option<u64>,
    /// States visited by the search (equals `orbit_size` for raw searches).
    pub states: u64,
    pub size: usize,
    pub product: ElemId,
    pub monodromy: Subgroup,
    pub multidiscriminant: Option<Multidiscriminant>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PsiCount {
    pub psi: Multidiscriminant,
    pub components: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComponentCount {
    pub total: BigUint,
    pub per_psi: Vec<PsiCount>,
    pub states_visited: u64,
    pub reduced: bool,
}

impl ComponentCount {
    /// Largest number of components sharing one multidiscriminant.
    pub fn max_per_psi(&self) -> u64 {
        self.per_psi.iter().map(|p| p.components).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone)]
pub struct Factorization {
    /// g″ with `t_factor · g″ ∼ t_big`.
    pub remainder: NielsenTuple,
    /// Word taking `t_big` to `t_factor · g″`.
    pub word: BraidWord,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Equal,
    Distinct,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StableVerdict {
    pub verdict: Verdict,
    /// Number of seed copies appended in the deciding round.
    pub padding: usize,
    pub m: u64,
}

/// Word alphabet with precomputed move tables.
struct Alphabet {
    elems: Vec<ElemId>,
    index: Vec<u16>,
    fwd: Vec<u16>,
    bwd: Vec<u16>,
    comm: Vec<bool>,
    label: Vec<u16>,
    k: usize,
}

impl Alphabet {
    /// `elems` must be closed under conjugation.
    fn new(
        g: &FiniteGroup,
        mut elems: Vec<ElemId>,
        label_of: impl Fn(ElemId) -> usize,
    ) -> Result<Self> {
        elems.sort_unstable();
        elems.dedup();
        let k = elems.len();
        if k >= NONE as usize {
            return Err(Error::BudgetExceeded(format!(
                "alphabet of size {k} is too large"
            )));
        }
        let mut index = vec![NONE; g.order()];
        for (i, &x) in elems.iter().enumerate() {
            index[x as usize] = i as u16;
        }
        let mut fwd = vec![0; k * k];
        let mut bwd = vec![0; k * k];
        let mut comm = vec![false; k * k];
        for (i, &a) in elems.iter().enumerate() {
            for (j, &b) in elems.iter().enumerate() {
                let f = index[g.conj(b, a) as usize];
                let r = index[g.conj(a, g.inv(b)) as usize];
                if f == NONE || r == NONE {
                    return Err(Error::Inconsistent(
                        "alphabet is not conjugation-closed".into(),
                    ));
                }
                fwd[i * k + j] = f;
                bwd[i * k + j] = r;
                comm[i * k + j] = g.mul(a, b) == g.mul(b, a);
            }
        }
        let label = elems.iter().map(|&x| label_of(x) as u16).collect();
        Ok(Alphabet {
            elems,
            index,
            fwd,
            bwd,
            comm,
            label,
            k,
        })
    }

    fn for_setup(s: &ClassSetup) -> Result<Self> {
        Self::new(s.group(), s.c_elements(), |x| {
            s.dstar_index(x).expect("x in c")
        })
    }

    /// Union of the conjugacy classes of the entries; labels are positions
    /// in the sorted list of those classes.
    fn for_entries(g: &FiniteGroup, entries: &[ElemId]) -> Result<(Self, Vec<usize>)> {
        let classes = crate::classes::ConjugacyClassTable::new(g);
        let mut ks: Vec<usize> = entries.iter().map(|&x| classes.class_of(x)).collect();
        ks.sort_unstable();
        ks.dedup();
        let elems: Vec<ElemId> = ks
            .iter()
            .flat_map(|&k| classes.class(k).iter().copied())
            .collect();
        let a = Self::new(g, elems, |x| {
            ks.binary_search(&classes.class_of(x)).unwrap()
        })?;
        Ok((a, ks))
    }

    #[inline]
    fn commutes(&self, a: u16, b: u16) -> bool {
        self.comm[a as usize * self.k + b as usize]
    }

    fn encode_word(&self, t: &[ElemId]) -> Result<Vec<u16>> {
        t.iter()
            .map(|&x| match self.index[x as usize] {
                NONE => Err(Error::Precondition(
                    "tuple entry outside the alphabet".into(),
                )),
                i => Ok(i),
            })
            .collect()
    }

    fn decode_word(&self, w: &[u16]) -> NielsenTuple {
        NielsenTuple(w.iter().map(|&i| self.elems[i as usize]).collect())
    }
}

/// Mixed-radix codes over the alphabet; code order is lexicographic order.
struct Codec {
    pow: Vec<u128>,
    k: u128,
}

impl Codec {
    fn new(k: usize, n: usize) -> Result<Self> {
        let mut pow = vec![0u128; n];
        let mut p: u128 = 1;
        for i in (0..n).rev() {
            pow[i] = p;
            p = p.checked_mul(k as u128).ok_or_else(|| {
                Error::BudgetExceeded(format!(
                    "tuples of size {n} over {k} letters do not fit a 128-bit code"
                ))
            })?;
        }
        Ok(Codec { pow, k: k as u128 })
    }

    #[inline]
    fn encode(&self, w: &[u16]) -> u128 {
        w.iter().fold(0u128, |acc, &x| acc * self.k + x as u128)
    }

    fn decode(&self, mut code: u128, n: usize) -> Vec<u16> {
        let mut w = vec![0u16; n];
        for i in (0..n).rev() {
            w[i] = (code % self.k) as u16;
            code /= self.k;
        }
        w
    }
}

enum Visited {
    Dense(Vec<AtomicU64>),
    Hashed(DashSet<u128>),
}

impl Visited {
    fn dense(bits: u128) -> Self {
        let words = (bits as usize).div_ceil(64).max(1);
        Visited::Dense((0..words).map(|_| AtomicU64::new(0)).collect())
    }

    fn hashed() -> Self {
        Visited::Hashed(DashSet::new())
    }

    #[inline]
    fn insert(&self, key: u128) -> bool {
        match self {
            Visited::Dense(words) => {
                let i = key as usize;
                let mask = 1u64 << (i & 63);
                words[i >> 6].fetch_or(mask, Ordering::Relaxed) & mask == 0
            }
            Visited::Hashed(set) => set.insert(key),
        }
    }

    fn is_hashed(&self) -> bool {
        matches!(self, Visited::Hashed(_))
    }
}

struct Budget {
    states: AtomicU64,
    max_states: u64,
    max_memory: u64,
}

impl Budget {
    fn new(cfg: &EngineConfig) -> Self {
        Budget {
            states: AtomicU64::new(0),
            max_states: cfg.max_states,
            max_memory: cfg.max_memory_bytes,
        }
    }

    fn charge(&self, k: u64, hashed: bool, frontier: usize) -> Result<()> {
        let total = self.states.fetch_add(k, Ordering::Relaxed) + k;
        if total > self.max_states {
            return Err(Error::BudgetExceeded(format!(
                "more than {} states (frontier size {frontier})",
                self.max_states
            )));
        }
        if hashed && total.saturating_mul(HASHED_STATE_BYTES) > self.max_memory {
            return Err(Error::BudgetExceeded(format!(
                "visited set would exceed {} bytes (frontier size {frontier})",
                self.max_memory
            )));
        }
        Ok(())
    }

    fn used(&self) -> u64 {
        self.states.load(Ordering::Relaxed)
    }
}

/// Scratch space for normal forms.
#[derive(Default)]
struct NfScratch {
    blockers: Vec<u16>,
    removed: Vec<bool>,
    out: Vec<u16>,
}

/// Replaces `w` by the least word equivalent to it under swaps of adjacent
/// commuting letters.
fn normal_form(alpha: &Alphabet, w: &mut [u16], sc: &mut NfScratch) {
    let n = w.len();
    sc.blockers.clear();
    sc.blockers.resize(n, 0);
    sc.removed.clear();
    sc.removed.resize(n, false);
    sc.out.clear();
    for j in 0..n {
        for i in 0..j {
            if !alpha.commutes(w[i], w[j]) {
                sc.blockers[j] += 1;
            }
        }
    }
    for _ in 0..n {
        let mut best = usize::MAX;
        for j in 0..n {
            if !sc.removed[j] && sc.blockers[j] == 0 && (best == usize::MAX || w[j] < w[best]) {
                best = j;
            }
        }
        let a = w[best];
        sc.removed[best] = true;
        sc.out.push(a);
        for l in best + 1..n {
            if !sc.removed[l] && !alpha.commutes(a, w[l]) {
                sc.blockers[l] -= 1;
            }
        }
    }
    w.copy_from_slice(&sc.out);
}

/// Whether appending `a` to a normal-form word keeps it in normal form.
#[inline]
fn can_append(alpha: &Alphabet, prefix: &[u16], a: u16) -> bool {
    for &b in prefix.iter().rev() {
        if !alpha.commutes(a, b) {
            return true;
        }
        if a < b {
            return false;
        }
    }
    true
}

/// One closure search context: alphabet, codes, visited set and budget.
struct Walk<'a> {
    alpha: &'a Alphabet,
    codec: &'a Codec,
    reduced: bool,
    visited: &'a Visited,
    budget: &'a Budget,
    n: usize,
}

struct Closure {
    states: u64,
    min_code: u128,
    found: bool,
}

impl Walk<'_> {
    /// Breadth-first closure from `start`, which the caller has already
    /// inserted into the visited set.
    fn closure(&self, start: &[u16], target: Option<u128>) -> Result<Closure> {
        let n = self.n;
        let start_code = self.codec.encode(start);
        let mut out = Closure {
            states: 1,
            min_code: start_code,
            found: target == Some(start_code),
        };
        if n < 2 || out.found {
            return Ok(out);
        }
        let found = AtomicBool::new(false);
        let mut frontier = start.to_vec();
        while !frontier.is_empty() {
            let states = frontier.len() / n;
            let (next, min) = if states >= PAR_FRONTIER {
                frontier
                    .par_chunks(n * PAR_CHUNK)
                    .map(|chunk| self.expand(chunk, target, &found))
                    .reduce(
                        || (Vec::new(), u128::MAX),
                        |(mut a, ma), (b, mb)| {
                            a.extend_from_slice(&b);
                            (a, ma.min(mb))
                        },
                    )
            } else {
                self.expand(&frontier, target, &found)
            };
            let k = (next.len() / n) as u64;
            out.states += k;
            out.min_code = out.min_code.min(min);
            self.budget
                .charge(k, self.visited.is_hashed(), next.len() / n)?;
            if found.load(Ordering::Relaxed) {
                out.found = true;
                return Ok(out);
            }
            frontier = next;
        }
        Ok(out)
    }

    fn expand(&self, chunk: &[u16], target: Option<u128>, found: &AtomicBool) -> (Vec<u16>, u128) {
        let n = self.n;
        let a = self.alpha;
        let k = a.k;
        let mut out = Vec::new();
        let mut min = u128::MAX;
        let mut buf = vec![0u16; n];
        let mut sc = NfScratch::default();
        let mut future: Vec<usize> = Vec::with_capacity(n);
        let visit = |buf: &[u16], code: u128, out: &mut Vec<u16>, min: &mut u128| {
            if self.visited.insert(code) {
                out.extend_from_slice(buf);
                *min = (*min).min(code);
                if target == Some(code) {
                    found.store(true, Ordering::Relaxed);
                }
            }
        };
        for s in chunk.chunks_exact(n) {
            if self.reduced {
                // Any two letters that some representative of the trace
                // puts side by side. `future` holds the positions after i
                // that must stay to the right of s[i].
                for i in 0..n - 1 {
                    future.clear();
                    for j in i + 1..n {
                        let y = s[j];
                        if future.iter().any(|&f| !a.commutes(s[f], y)) {
                            future.push(j);
                            continue;
                        }
                        let x = s[i];
                        if a.commutes(x, y) {
                            continue;
                        }
                        for (u, v) in [
                            (a.fwd[x as usize * k + y as usize], x),
                            (y, a.bwd[x as usize * k + y as usize]),
                        ] {
                            let mut p = i;
                            for l in i + 1..j {
                                if !future.contains(&l) {
                                    buf[p] = s[l];
                                    p += 1;
                                }
                            }
                            buf[..i].copy_from_slice(&s[..i]);
                            buf[p] = u;
                            buf[p + 1] = v;
                            p += 2;
                            for &f in &future {
                                buf[p] = s[f];
                                p += 1;
                            }
                            buf[j + 1..].copy_from_slice(&s[j + 1..]);
                            normal_form(a, &mut buf, &mut sc);
                            let code = self.codec.encode(&buf);
                            visit(&buf, code, &mut out, &mut min);
                        }
                        future.push(j);
                    }
                }
                continue;
            }
            let base = self.codec.encode(s);
            for i in 0..n - 1 {
                let (x, y) = (s[i], s[i + 1]);
                let moves = [
                    (a.fwd[x as usize * k + y as usize], x),
                    (y, a.bwd[x as usize * k + y as usize]),
                ];
                for (u, v) in moves {
                    let (pi, pj) = (self.codec.pow[i], self.codec.pow[i + 1]);
                    let code = base
                        .wrapping_sub(x as u128 * pi + y as u128 * pj)
                        .wrapping_add(u as u128 * pi + v as u128 * pj);
                    if self.visited.insert(code) {
                        out.extend_from_slice(&s[..i]);
                        out.push(u);
                        out.push(v);
                        out.extend_from_slice(&s[i + 2..]);
                        min = min.min(code);
                        if target == Some(code) {
                            found.store(true, Ordering::Relaxed);
                        }
                    }
                }
            }
        }
        (out, min)
    }
}

/// Number of words with the given letter-class counts, as a float estimate.
fn words_with_counts(counts: &[u64], class_sizes: &[usize]) -> f64 {
    let mut remaining: u64 = counts.iter().sum();
    let mut total = 1f64;
    for (&c, &size) in counts.iter().zip(class_sizes) {
        let mut binom = 1f64;
        for i in 0..c {
            binom = binom * (remaining - i) as f64 / (i + 1) as f64;
        }
        total *= binom * (size as f64).powi(c as i32);
        remaining -= c;
    }
    total
}

struct SeedInfo {
    word: Vec<u16>,
    states: u64,
    min_code: u128,
}

pub struct OrbitEngine {
    config: EngineConfig,
    pool: rayon::ThreadPool,
}

impl OrbitEngine {
    pub fn new(config: EngineConfig) -> Result<Self> {
        let workers = config.workers.max(1);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::Precondition(format!("cannot start worker pool: {e}")))?;
        Ok(OrbitEngine { config, pool })
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    fn choose_reduced(&self, abelian: bool, estimate: f64) -> bool {
        match self.config.reduction {
            Reduction::Raw => false,
            Reduction::Commutation => true,
            Reduction::Auto => abelian || estimate > self.config.max_states as f64,
        }
    }

    fn make_visited(&self, k: usize, n: usize, estimate: f64, reduced: bool) -> Visited {
        let bits = (k as f64).powi(n as i32);
        let dense_ok = bits <= (1u64 << 36) as f64
            && bits / 8.0 <= self.config.max_memory_bytes as f64 / 2.0
            && (bits <= (1u64 << 20) as f64
                || (!reduced && bits / 8.0 <= estimate * HASHED_STATE_BYTES as f64));
        if dense_ok {
            Visited::dense(bits as u128)
        } else {
            Visited::hashed()
        }
    }

    /// Sweeps all words with letter counts `counts` (and product one when
    /// `projective`), closing the orbit of every unvisited word.
    #[allow(clippy::too_many_arguments)]
    fn sweep(
        &self,
        g: &FiniteGroup,
        alpha: &Alphabet,
        counts: &[u64],
        projective: bool,
        reduced: bool,
        estimate: f64,
        budget: &Budget,
    ) -> Result<Vec<SeedInfo>> {
        let n = counts.iter().sum::<u64>() as usize;
        let codec = Codec::new(alpha.k, n)?;
        let visited = self.make_visited(alpha.k, n, estimate, reduced);
        let walk = Walk {
            alpha,
            codec: &codec,
            reduced,
            visited: &visited,
            budget,
            n,
        };
        let mut remaining = counts.to_vec();
        let mut word = Vec::with_capacity(n);
        let mut prods = vec![IDENTITY];
        let mut seeds = Vec::new();
        self.seed_dfs(
            g,
            &walk,
            &mut remaining,
            &mut word,
            &mut prods,
            projective,
            &mut seeds,
        )?;
        Ok(seeds)
    }

    #[allow(clippy::too_many_arguments)]
    fn seed_dfs(
        &self,
        g: &FiniteGroup,
        walk: &Walk<'_>,
        remaining: &mut [u64],
        word: &mut Vec<u16>,
        prods: &mut Vec<ElemId>,
        projective: bool,
        seeds: &mut Vec<SeedInfo>,
    ) -> Result<()> {
        let alpha = walk.alpha;
        let d = word.len();
        if d == walk.n {
            if projective && prods[d] != IDENTITY {
                return Ok(());
            }
            let code = walk.codec.encode(word);
            if walk.visited.insert(code) {
                walk.budget.charge(1, walk.visited.is_hashed(), 1)?;
                let c = walk.closure(word, None)?;
                seeds.push(SeedInfo {
                    word: word.clone(),
                    states: c.states,
                    min_code: c.min_code,
                });
            }
            return Ok(());
        }
        let candidates: Vec<u16> = if projective && d + 1 == walk.n {
            let last = alpha.index[g.inv(prods[d]) as usize];
            if last == NONE {
                return Ok(());
            }
            vec![last]
        } else {
            (0..alpha.k as u16).collect()
        };
        for a in candidates {
            let l = alpha.label[a as usize] as usize;
            if remaining[l] == 0 || (walk.reduced && !can_append(alpha, word, a)) {
                continue;
            }
            remaining[l] -= 1;
            word.push(a);
            prods.push(g.mul(prods[d], alpha.elems[a as usize]));
            let r = self.seed_dfs(g, walk, remaining, word, prods, projective, seeds);
            prods.pop();
            word.pop();
            remaining[l] += 1;
            r?;
        }
        Ok(())
    }

    /// Orbits of all tuples over `c` with multidiscriminant exactly `psi`.
    fn bucket_records(
        &self,
        s: &ClassSetup,
        alpha: &Alphabet,
        psi: &Multidiscriminant,
        space: Space,
        conn: Connectedness,
        reduced: bool,
        budget: &Budget,
    ) -> Result<Vec<OrbitRecord>> {
        let g = s.group();
        let projective = space == Space::Projective;
        if projective
            && !s
                .abelianization()
                .quotient()
                .is_identity(&abelianized_product(&psi.as_signed(), s))
        {
            return Ok(Vec::new());
        }
        if conn == Connectedness::Connected {
            let support: Vec<ElemId> = (0..psi.0.len())
                .filter(|&i| psi.0[i] > 0)
                .flat_map(|i| s.dstar_class(i).iter().copied())
                .collect();
            if Subgroup::closure(g, &support).order() != g.order() {
                return Ok(Vec::new());
            }
        }
        let sizes: Vec<usize> = (0..psi.0.len()).map(|i| s.dstar_class(i).len()).collect();
        let mut estimate = words_with_counts(&psi.0, &sizes);
        if projective {
            estimate /= s.abelianization().commutator_subgroup().order() as f64;
        }
        let seeds = self.sweep(g, alpha, &psi.0, projective, reduced, estimate, budget)?;
        let n = psi.total() as usize;
        let mut out = Vec::new();
        for seed in seeds {
            let rep = alpha.decode_word(&seed.word);
            let monodromy = rep.generated_subgroup(g);
            if conn == Connectedness::Connected && monodromy.order() != g.order() {
                continue;
            }
            debug_assert!(reduced || Codec::new(alpha.k, n)?.encode(&seed.word) == seed.min_code);
            out.push(OrbitRecord {
                product: rep.product(g),
                canonical_rep: rep,
                orbit_size: (!reduced).then_some(seed.states),
                states: seed.states,
                size: n,
                monodromy,
                multidiscriminant: Some(psi.clone()),
            });
        }
        Ok(out)
    }

    fn estimate_query(&self, s: &ClassSetup, psis: &[Multidiscriminant], space: Space) -> f64 {
        let sizes: Vec<usize> = (0..s.dstar().len())
            .map(|i| s.dstar_class(i).len())
            .collect();
        let mut est: f64 = psis.iter().map(|p| words_with_counts(&p.0, &sizes)).sum();
        if space == Space::Projective {
            est /= s.abelianization().commutator_subgroup().order() as f64;
        }
        est
    }

    fn query_psis(&self, s: &ClassSetup, q: &ComponentQuery) -> Result<Vec<Multidiscriminant>> {
        match &q.psi {
            Some(psi) => {
                if psi.0.len() != s.dstar().len() {
                    return Err(Error::Precondition(format!(
                        "multidiscriminant has {} entries, expected {}",
                        psi.0.len(),
                        s.dstar().len()
                    )));
                }
                let sums = psi.block_sums(s);
                let want: Vec<u64> = s.xi().iter().map(|&x| q.n as u64 * x as u64).collect();
                if sums != want {
                    return Err(Error::Precondition(format!(
                        "block sums {sums:?} differ from n·ξ = {want:?}"
                    )));
                }
                Ok(vec![psi.clone()])
            }
            None => Ok(enumerate_likely_maps(s, q.n as u64)),
        }
    }

    fn run_buckets(
        &self,
        s: &ClassSetup,
        psis: &[Multidiscriminant],
        space: Space,
        conn: Connectedness,
    ) -> Result<(Vec<Vec<OrbitRecord>>, u64, bool)> {
        let alpha = Alphabet::for_setup(s)?;
        let reduced =
            self.choose_reduced(s.group().is_abelian(), self.estimate_query(s, psis, space));
        let budget = Budget::new(&self.config);
        let per = self.pool.install(|| {
            psis.par_iter()
                .map(|psi| self.bucket_records(s, &alpha, psi, space, conn, reduced, &budget))
                .collect::<Result<Vec<_>>>()
        })?;
        Ok((per, budget.used(), reduced))
    }

    /// |π₀ Hur| or |π₀ CHur| at degree `q.n` (tuple size n·|ξ|).
    pub fn count_components(&self, s: &ClassSetup, q: &ComponentQuery) -> Result<ComponentCount> {
        let psis = self.query_psis(s, q)?;
        let (per, states, reduced) = self.run_buckets(s, &psis, q.space, q.connectedness)?;
        let per_psi: Vec<PsiCount> = psis
            .into_iter()
            .zip(&per)
            .map(|(psi, recs)| PsiCount {
                psi,
                components: recs.len() as u64,
            })
            .collect();
        let total = per_psi.iter().map(|p| BigUint::from(p.components)).sum();
        Ok(ComponentCount {
            total,
            per_psi,
            states_visited: states,
            reduced,
        })
    }

    /// All orbit records of a query, ordered by multidiscriminant then
    /// canonical representative.
    pub fn components(&self, s: &ClassSetup, q: &ComponentQuery) -> Result<Vec<OrbitRecord>> {
        let psis = self.query_psis(s, q)?;
        let (per, _, _) = self.run_buckets(s, &psis, q.space, q.connectedness)?;
        Ok(per.into_iter().flatten().collect())
    }

    /// The orbits with multidiscriminant exactly `psi` (any vector over D*).
    pub fn components_by_multidiscriminant(
        &self,
        s: &ClassSetup,
        psi: &Multidiscriminant,
        space: Space,
        conn: Connectedness,
    ) -> Result<Vec<OrbitRecord>> {
        if psi.0.len() != s.dstar().len() {
            return Err(Error::Precondition(format!(
                "multidiscriminant has {} entries, expected {}",
                psi.0.len(),
                s.dstar().len()
            )));
        }
        let (mut per, _, _) = self.run_buckets(s, std::slice::from_ref(psi), space, conn)?;
        Ok(per.pop().unwrap_or_default())
    }

    /// Exact orbit of a single tuple, by raw breadth-first search.
    pub fn enumerate_orbit(&self, g: &FiniteGroup, t: &NielsenTuple) -> Result<OrbitRecord> {
        let (alpha, _) = Alphabet::for_entries(g, t.entries())?;
        let n = t.len();
        let codec = Codec::new(alpha.k, n)?;
        let budget = Budget::new(&self.config);
        let visited = self.make_visited(alpha.k, n, 0.0, false);
        let walk = Walk {
            alpha: &alpha,
            codec: &codec,
            reduced: false,
            visited: &visited,
            budget: &budget,
            n,
        };
        let w = alpha.encode_word(t.entries())?;
        visited.insert(codec.encode(&w));
        budget.charge(1, visited.is_hashed(), 1)?;
        let c = self.pool.install(|| walk.closure(&w, None))?;
        Ok(OrbitRecord {
            canonical_rep: alpha.decode_word(&codec.decode(c.min_code, n)),
            orbit_size: Some(c.states),
            states: c.states,
            size: n,
            product: t.product(g),
            monodromy: t.generated_subgroup(g),
            multidiscriminant: None,
        })
    }

    /// Whether `t2` lies in the braid orbit of `t1`.
    pub fn same_orbit(
        &self,
        g: &FiniteGroup,
        t1: &NielsenTuple,
        t2: &NielsenTuple,
    ) -> Result<bool> {
        if t1.len() != t2.len() || t1.product(g) != t2.product(g) {
            return Ok(false);
        }
        if t1 == t2 {
            return Ok(true);
        }
        let (alpha, _) = Alphabet::for_entries(g, t1.entries())?;
        let mut m1 = vec![0u32; alpha.k];
        let mut m2 = vec![0u32; alpha.k];
        for &x in t1.entries() {
            m1[alpha.label[alpha.index[x as usize] as usize] as usize] += 1;
        }
        for &x in t2.entries() {
            let i = alpha.index[x as usize];
            if i == NONE {
                return Ok(false);
            }
            m2[alpha.label[i as usize] as usize] += 1;
        }
        if m1 != m2 || t1.generated_subgroup(g).elements() != t2.generated_subgroup(g).elements() {
            return Ok(false);
        }
        let n = t1.len();
        let codec = Codec::new(alpha.k, n)?;
        let budget = Budget::new(&self.config);
        let visited = Visited::hashed();
        let reduced = self.choose_reduced(g.is_abelian(), (alpha.k as f64).powi(n as i32));
        let walk = Walk {
            alpha: &alpha,
            codec: &codec,
            reduced,
            visited: &visited,
            budget: &budget,
            n,
        };
        let mut sc = NfScratch::default();
        let mut w1 = alpha.encode_word(t1.entries())?;
        let mut w2 = alpha.encode_word(t2.entries())?;
        if reduced {
            normal_form(&alpha, &mut w1, &mut sc);
            normal_form(&alpha, &mut w2, &mut sc);
        }
        if w1 == w2 {
            return Ok(true);
        }
        visited.insert(codec.encode(&w1));
        let c = self
            .pool
            .install(|| walk.closure(&w1, Some(codec.encode(&w2))))?;
        Ok(c.found)
    }

    /// Splits `t_factor` off the front of `t_big` up to braid equivalence.
    pub fn factorize(
        &self,
        g: &FiniteGroup,
        t_factor: &NielsenTuple,
        t_big: &NielsenTuple,
    ) -> Result<Factorization> {
        factorize(g, t_factor, t_big)
    }

    /// Lifting-invariant comparison by padding both tuples with copies of a
    /// D-generating seed.
    pub fn stable_equivalence(
        &self,
        s: &ClassSetup,
        t1: &NielsenTuple,
        t2: &NielsenTuple,
        padding_rounds: usize,
        m: Option<u64>,
    ) -> Result<StableVerdict> {
        let g = s.group();
        let m = m.unwrap_or_else(|| default_bigness(s));
        if t1.len() != t2.len()
            || t1.product(g) != t2.product(g)
            || t1.generated_subgroup(g).order() != g.order()
            || t2.generated_subgroup(g).order() != g.order()
            || t1.multidiscriminant(s)? != t2.multidiscriminant(s)?
        {
            return Err(Error::Precondition(
                "tuples must share size, product, monodromy group G and multidiscriminant".into(),
            ));
        }
        let (seed, _) = seed_tuple(s);
        let mut a = t1.clone();
        let mut b = t2.clone();
        for round in 0..=padding_rounds {
            if round > 0 {
                a = a.concat(&seed);
                b = b.concat(&seed);
            }
            match self.same_orbit(g, &a, &b) {
                Ok(true) => {
                    return Ok(StableVerdict {
                        verdict: Verdict::Equal,
                        padding: round,
                        m,
                    })
                }
                Ok(false) => {}
                Err(Error::BudgetExceeded(_)) => {
                    return Ok(StableVerdict {
                        verdict: Verdict::Inconclusive,
                        padding: round,
                        m,
                    })
                }
                Err(e) => return Err(e),
            }
        }
        let verdict = if is_m_big(g, &a, m) {
            Verdict::Distinct
        } else {
            Verdict::Inconclusive
        };
        Ok(StableVerdict {
            verdict,
            padding: padding_rounds,
            m,
        })
    }
}

/// `max |γ|·ord(γ) + 1` over D*.
pub fn default_bigness(s: &ClassSetup) -> u64 {
    s.kappa() + 1
}

/// Whether each class of ⟨t⟩ meeting `t` contains at least `m` of its entries.
pub fn is_m_big(g: &FiniteGroup, t: &NielsenTuple, m: u64) -> bool {
    let h = t.generated_subgroup(g).element_list();
    let mut counts: BTreeMap<ElemId, u64> = BTreeMap::new();
    for &x in t.entries() {
        let rep = h.iter().map(|&a| g.conj(x, a)).min().unwrap_or(x);
        *counts.entry(rep).or_default() += 1;
    }
    counts.values().all(|&c| c >= m)
}

/// A tuple over `c` generating G whose per-block counts are `r·ξ`; returns
/// it with `r`.
pub fn seed_tuple(s: &ClassSetup) -> (NielsenTuple, u64) {
    let nb = s.blocks().len();
    let mut per_block: Vec<Vec<ElemId>> = vec![Vec::new(); nb];
    for x in s.c().iter() {
        let b = s.tau()[s.dstar_index(x).unwrap()];
        per_block[b].push(x);
    }
    let r = (0..nb)
        .map(|b| (per_block[b].len() as u64).div_ceil(s.xi()[b] as u64))
        .max()
        .unwrap_or(0);
    let mut entries = Vec::new();
    for (b, elems) in per_block.iter().enumerate() {
        entries.extend_from_slice(elems);
        let pad = r * s.xi()[b] as u64 - elems.len() as u64;
        entries.extend(std::iter::repeat_n(elems[0], pad as usize));
    }
    (NielsenTuple(entries), r)
}

/// Inductive splitting: for each factor entry f, gather ord(f)+1 copies of
/// one h ~ f at the front of the unprocessed part, then conjugate the first
/// ord(f) copies (a product-one block) so that they become f.
pub fn factorize(
    g: &FiniteGroup,
    t_factor: &NielsenTuple,
    t_big: &NielsenTuple,
) -> Result<Factorization> {
    let n_big = t_big.len();
    if t_big.generated_subgroup(g).order() != g.order() {
        return Err(Error::Precondition(
            "the big tuple must generate the group".into(),
        ));
    }
    let classes = crate::classes::ConjugacyClassTable::new(g);
    let mut need: BTreeMap<usize, u64> = BTreeMap::new();
    for &f in t_factor.entries() {
        if f == IDENTITY {
            return Err(Error::Precondition(
                "factor entries must be nontrivial".into(),
            ));
        }
        *need.entry(classes.class_of(f)).or_default() += 1;
    }
    let mut deficits = Vec::new();
    for (&k, &nk) in &need {
        let have = t_big
            .entries()
            .iter()
            .filter(|&&x| classes.class_of(x) == k)
            .count() as u64;
        let want = classes.class_size(k) as u64 * classes.class_order(k) as u64 + nk;
        if have < want {
            deficits.push(format!(
                "class of {}: {} entries, need {} (deficit {})",
                g.label(classes.class(k)[0]),
                have,
                want,
                want - have
            ));
        }
    }
    if !deficits.is_empty() {
        return Err(Error::Precondition(format!(
            "hypothesis fails: {}",
            deficits.join("; ")
        )));
    }
    let mut tr = Tracker::new(g, t_big);
    for (p, &f) in t_factor.entries().iter().enumerate() {
        let k = classes.class_of(f);
        let ord = classes.class_order(k) as usize;
        let suffix = &tr.t[p..];
        let h = classes
            .class(k)
            .iter()
            .copied()
            .find(|&h| suffix.iter().filter(|&&x| x == h).count() > ord)
            .ok_or_else(|| Error::Inconsistent("no repeated class element in the suffix".into()))?;
        for j in 0..=ord {
            let q = (p + j..n_big)
                .find(|&q| tr.t[q] == h)
                .expect("copy present");
            tr.pull_left(q, p + j);
        }
        if h != f {
            let outside: Vec<(usize, ElemId)> =
                tr.t.iter()
                    .copied()
                    .enumerate()
                    .filter(|&(i, _)| i < p || i >= p + ord)
                    .collect();
            let a = g
                .elements()
                .find(|&a| g.conj(h, a) == f)
                .expect("h and f are conjugate");
            let word = word_in_entries(g, &outside, a).ok_or_else(|| {
                Error::Inconsistent("outside entries do not generate the group".into())
            })?;
            for &(pos, sign) in word.iter().rev() {
                tr.conj_block_by_entry(p, p + ord, pos, sign);
            }
        }
        debug_assert_eq!(tr.t[p], f);
    }
    let w = tr.finish();
    let remainder = NielsenTuple(w.tuple.entries()[t_factor.len()..].to_vec());
    if w.tuple.entries()[..t_factor.len()] != *t_factor.entries() {
        return Err(Error::Inconsistent("factor not reproduced".into()));
    }
    Ok(Factorization {
        remainder,
        word: w.word,
    })
}

/// Orbit dump: a JSON header line, then one representative per line.
pub fn dump_records(
    g: &FiniteGroup,
    header: &serde_json::Value,
    records: &[OrbitRecord],
) -> String {
    let mut s = header.to_string();
    s.push('\n');
    for r in records {
        s.push_str(&r.canonical_rep.display(g).to_string());
        s.push('\n');
    }
    s
}
