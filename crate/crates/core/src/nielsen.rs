//! Nielsen tuples and the braid-group action on them.
//!
//! The elementary move σ_i replaces `(g_i, g_{i+1})` by
//! `(g_i g_{i+1} g_i⁻¹, g_i)`; its inverse replaces it by
//! `(g_{i+1}, g_{i+1}⁻¹ g_i g_{i+1})`. Positions are 0-based here: the move
//! at position `i` acts on entries `i` and `i + 1`.
//!
//! Conjugation is written `x^a = a x a⁻¹`, the convention under which
//! `σ_1.(a, b) = (b^a, a)`.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{ElemId, FiniteGroup, IDENTITY};
use crate::setup::ClassSetup;
use crate::subgroup::{AbElem, Subgroup};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Inverse,
}

/// One elementary braid σ_{pos}^{±1}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BraidLetter {
    pub pos: usize,
    pub dir: Direction,
}

/// A word in elementary braids, applied left to right.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BraidWord(pub Vec<BraidLetter>);

impl BraidWord {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[BraidLetter] {
        &self.0
    }

    pub fn apply(&self, g: &FiniteGroup, t: &NielsenTuple) -> Result<NielsenTuple> {
        let mut entries = t.0.clone();
        for l in &self.0 {
            braid_in_place(g, &mut entries, l.pos, l.dir)?;
        }
        Ok(NielsenTuple(entries))
    }

    pub fn inverse(&self) -> BraidWord {
        BraidWord(
            self.0
                .iter()
                .rev()
                .map(|l| BraidLetter {
                    pos: l.pos,
                    dir: match l.dir {
                        Direction::Forward => Direction::Inverse,
                        Direction::Inverse => Direction::Forward,
                    },
                })
                .collect(),
        )
    }
}

/// Applies σ_i^{±1} in place.
#[inline]
pub fn braid_in_place(g: &FiniteGroup, t: &mut [ElemId], i: usize, dir: Direction) -> Result<()> {
    if i + 1 >= t.len() {
        return Err(Error::IndexOutOfRange {
            index: i,
            len: t.len(),
        });
    }
    let (a, b) = (t[i], t[i + 1]);
    match dir {
        Direction::Forward => {
            t[i] = g.conj(b, a);
            t[i + 1] = a;
        }
        Direction::Inverse => {
            t[i] = b;
            t[i + 1] = g.conj(a, g.inv(b));
        }
    }
    Ok(())
}

/// An ordered tuple of group elements.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NielsenTuple(pub Vec<ElemId>);

impl NielsenTuple {
    pub fn new(entries: Vec<ElemId>) -> Self {
        NielsenTuple(entries)
    }

    pub fn entries(&self) -> &[ElemId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Parses a comma-separated list of element labels.
    pub fn parse(g: &FiniteGroup, input: &str) -> Result<Self> {
        split_top_level(input)
            .iter()
            .map(|s| g.parse_element(s))
            .collect::<Result<Vec<_>>>()
            .map(NielsenTuple)
    }

    pub fn display<'a>(&'a self, g: &'a FiniteGroup) -> TupleDisplay<'a> {
        TupleDisplay { t: self, g }
    }

    /// Left-to-right product g₁g₂⋯gₙ.
    pub fn product(&self, g: &FiniteGroup) -> ElemId {
        product(g, &self.0)
    }

    pub fn generated_subgroup(&self, g: &FiniteGroup) -> Subgroup {
        Subgroup::closure(g, &self.0)
    }

    pub fn apply_braid(&self, g: &FiniteGroup, i: usize, dir: Direction) -> Result<Self> {
        let mut e = self.0.clone();
        braid_in_place(g, &mut e, i, dir)?;
        Ok(NielsenTuple(e))
    }

    pub fn concat(&self, other: &NielsenTuple) -> NielsenTuple {
        let mut e = self.0.clone();
        e.extend_from_slice(&other.0);
        NielsenTuple(e)
    }

    /// Entrywise `a x a⁻¹`.
    pub fn conjugate_by(&self, g: &FiniteGroup, a: ElemId) -> NielsenTuple {
        NielsenTuple(self.0.iter().map(|&x| g.conj(x, a)).collect())
    }

    pub fn multidiscriminant(&self, s: &ClassSetup) -> Result<Multidiscriminant> {
        multidiscriminant(s, &self.0)
    }

    pub fn repeat(&self, k: usize) -> NielsenTuple {
        NielsenTuple(self.0.repeat(k))
    }
}

pub struct TupleDisplay<'a> {
    t: &'a NielsenTuple,
    g: &'a FiniteGroup,
}

impl fmt::Display for TupleDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &x) in self.t.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", self.g.label(x))?;
        }
        Ok(())
    }
}

/// Splits on commas that are not nested inside parentheses or brackets.
pub fn split_top_level(input: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in input.chars() {
        match ch {
            '(' | '[' => {
                depth += 1;
                cur.push(ch);
            }
            ')' | ']' => {
                depth -= 1;
                cur.push(ch);
            }
            ',' if depth == 0 => {
                out.push(cur.trim().to_string());
                cur.clear();
            }
            _ => cur.push(ch),
        }
    }
    if !cur.trim().is_empty() || !out.is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

pub fn product(g: &FiniteGroup, entries: &[ElemId]) -> ElemId {
    entries.iter().fold(IDENTITY, |acc, &x| g.mul(acc, x))
}

/// Occurrence counts of the D* classes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Multidiscriminant(pub Vec<u64>);

impl Multidiscriminant {
    pub fn zero(len: usize) -> Self {
        Multidiscriminant(vec![0; len])
    }

    pub fn counts(&self) -> &[u64] {
        &self.0
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn min_count(&self) -> u64 {
        self.0.iter().copied().min().unwrap_or(0)
    }

    pub fn add(&self, other: &Multidiscriminant) -> Multidiscriminant {
        Multidiscriminant(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn as_signed(&self) -> Vec<i64> {
        self.0.iter().map(|&x| x as i64).collect()
    }

    /// Per-block sums Σ_{γ′ ∈ τ⁻¹(γ)} ψ(γ′).
    pub fn block_sums(&self, s: &ClassSetup) -> Vec<u64> {
        let mut sums = vec![0; s.blocks().len()];
        for (i, &v) in self.0.iter().enumerate() {
            sums[s.tau()[i]] += v;
        }
        sums
    }
}

pub fn multidiscriminant(s: &ClassSetup, entries: &[ElemId]) -> Result<Multidiscriminant> {
    let mut counts = vec![0u64; s.dstar().len()];
    for &x in entries {
        let i = s.dstar_index(x).ok_or_else(|| {
            Error::Precondition(format!("entry {} is not in c", s.group().label(x)))
        })?;
        counts[i] += 1;
    }
    Ok(Multidiscriminant(counts))
}

/// π̃(ψ) = Π γ̃^{ψ(γ)} in G^ab, for any integer vector indexed by D*.
pub fn abelianized_product(psi: &[i64], s: &ClassSetup) -> AbElem {
    let ab = s.abelianization();
    let q = ab.quotient();
    psi.iter().enumerate().fold(q.identity(), |acc, (i, &k)| {
        let rep = s.dstar_class(i)[0];
        q.add(&acc, &q.scale(ab.project(rep), k))
    })
}

/// A transformed tuple together with a braid word taking the input to it.
#[derive(Debug, Clone)]
pub struct Witnessed {
    pub tuple: NielsenTuple,
    pub word: BraidWord,
}

/// Current tuple plus the braid word applied so far.
pub(crate) struct Tracker<'g> {
    g: &'g FiniteGroup,
    pub(crate) t: Vec<ElemId>,
    pub(crate) word: BraidWord,
}

impl<'g> Tracker<'g> {
    pub(crate) fn new(g: &'g FiniteGroup, t: &NielsenTuple) -> Self {
        Tracker {
            g,
            t: t.0.clone(),
            word: BraidWord::default(),
        }
    }

    fn step(&mut self, pos: usize, dir: Direction) {
        braid_in_place(self.g, &mut self.t, pos, dir).expect("tracked move in range");
        self.word.0.push(BraidLetter { pos, dir });
    }

    /// Block `[l, l+m)` moves right past the entry at `l+m`.
    fn block_right_past(&mut self, l: usize, m: usize) {
        for p in (l..l + m).rev() {
            self.step(p, Direction::Forward);
        }
    }

    /// Block `[l, l+m)` moves left past the entry at `l-1`.
    fn block_left_past(&mut self, l: usize, m: usize) {
        for p in l - 1..l - 1 + m {
            self.step(p, Direction::Inverse);
        }
    }

    /// Entry at `l-1` crosses block `[l, l+m)` rightwards; block becomes `x B x⁻¹`.
    fn entry_right_over(&mut self, l: usize, m: usize) {
        for p in l - 1..l - 1 + m {
            self.step(p, Direction::Forward);
        }
    }

    /// Entry at `l+m` crosses block `[l, l+m)` leftwards; block becomes `x⁻¹ B x`.
    fn entry_left_over(&mut self, l: usize, m: usize) {
        for p in (l..l + m).rev() {
            self.step(p, Direction::Inverse);
        }
    }

    /// Conjugates the product-one block `[lo, hi)` by the outside entry at
    /// `p` (raised to `sign`), leaving every other entry unchanged.
    pub(crate) fn conj_block_by_entry(&mut self, lo: usize, hi: usize, p: usize, sign: i8) {
        let m = hi - lo;
        if m == 0 {
            return;
        }
        if p < lo {
            let mut l = lo;
            while l > p + 1 {
                self.block_left_past(l, m);
                l -= 1;
            }
            if sign > 0 {
                self.entry_right_over(l, m);
                self.block_right_past(l - 1, m);
            } else {
                self.block_left_past(l, m);
                self.entry_left_over(l - 1, m);
            }
            while l < lo {
                self.block_right_past(l, m);
                l += 1;
            }
        } else {
            debug_assert!(p >= hi);
            let mut l = lo;
            while l + m < p {
                self.block_right_past(l, m);
                l += 1;
            }
            if sign > 0 {
                self.block_right_past(l, m);
                self.entry_right_over(l + 1, m);
            } else {
                self.entry_left_over(l, m);
                self.block_left_past(l + 1, m);
            }
            while l > lo {
                self.block_left_past(l, m);
                l -= 1;
            }
        }
    }

    /// Moves the entry at `from` to `to < from`, keeping its value; the
    /// entries it passes are conjugated by it.
    pub(crate) fn pull_left(&mut self, from: usize, to: usize) {
        for p in (to..from).rev() {
            self.step(p, Direction::Inverse);
        }
    }

    fn rotate_left(&mut self) {
        let n = self.t.len();
        for p in 0..n.saturating_sub(1) {
            self.step(p, Direction::Inverse);
        }
    }

    fn rotate_right(&mut self) {
        let n = self.t.len();
        for p in (0..n.saturating_sub(1)).rev() {
            self.step(p, Direction::Forward);
        }
    }

    /// For a product-one tuple: conjugate everything by the entry at `pos`
    /// (raised to `sign`).
    fn conj_all_by_entry(&mut self, pos: usize, sign: i8) {
        let n = self.t.len();
        for _ in 0..pos {
            self.rotate_left();
        }
        if n > 1 {
            if sign > 0 {
                self.entry_right_over(1, n - 1);
                self.block_right_past(0, n - 1);
            } else {
                self.block_left_past(1, n - 1);
                self.entry_left_over(0, n - 1);
            }
        }
        for _ in 0..pos {
            self.rotate_right();
        }
    }

    pub(crate) fn finish(self) -> Witnessed {
        Witnessed {
            tuple: NielsenTuple(self.t),
            word: self.word,
        }
    }
}

/// Shortest word `a = w₁⋯w_k` in the letters `(position, ±1)` standing for
/// `entries[position]^{±1}`; `None` if `a` is not in their span.
pub(crate) fn word_in_entries(
    g: &FiniteGroup,
    entries: &[(usize, ElemId)],
    a: ElemId,
) -> Option<Vec<(usize, i8)>> {
    let n = g.order();
    let mut prev: Vec<Option<(ElemId, usize, i8)>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[IDENTITY as usize] = true;
    let mut queue = VecDeque::from([IDENTITY]);
    while let Some(x) = queue.pop_front() {
        if x == a {
            break;
        }
        for &(pos, e) in entries {
            for sign in [1i8, -1] {
                let letter = if sign > 0 { e } else { g.inv(e) };
                let y = g.mul(x, letter);
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    prev[y as usize] = Some((x, pos, sign));
                    queue.push_back(y);
                }
            }
        }
    }
    if !seen[a as usize] {
        return None;
    }
    let mut word = Vec::new();
    let mut x = a;
    while let Some((p, pos, sign)) = prev[x as usize] {
        word.push((pos, sign));
        x = p;
    }
    word.reverse();
    Some(word)
}

/// `(g₁, g₂, …, gₙ) ~ (g₂, …, gₙ, g₁)` for product-one tuples.
pub fn rotate(g: &FiniteGroup, t: &NielsenTuple) -> Result<Witnessed> {
    if t.product(g) != IDENTITY {
        return Err(Error::Precondition(
            "rotation needs a product-one tuple".into(),
        ));
    }
    let mut tr = Tracker::new(g, t);
    tr.rotate_left();
    Ok(tr.finish())
}

/// `g ~ g^a` for a product-one tuple and `a ∈ ⟨g⟩`.
pub fn conjugate_tuple(g: &FiniteGroup, t: &NielsenTuple, a: ElemId) -> Result<Witnessed> {
    if t.product(g) != IDENTITY {
        return Err(Error::Precondition(
            "tuple conjugation needs a product-one tuple".into(),
        ));
    }
    let letters: Vec<(usize, ElemId)> = t.0.iter().copied().enumerate().collect();
    let word = word_in_entries(g, &letters, a).ok_or_else(|| {
        Error::Precondition(format!(
            "conjugator {} is not in the group generated by the tuple",
            g.label(a)
        ))
    })?;
    // Conjugating by the current entry at position j multiplies the
    // accumulated conjugator on the right by the original entry t_j.
    let mut tr = Tracker::new(g, t);
    for (pos, sign) in word {
        tr.conj_all_by_entry(pos, sign);
    }
    Ok(tr.finish())
}

/// `g₁ g₂ g₃ ~ g₁ g₂^a g₃` where `g₂ = t[lo..hi]` has product one and
/// `a ∈ ⟨g₁, g₃⟩`.
pub fn conjugate_block(
    g: &FiniteGroup,
    t: &NielsenTuple,
    lo: usize,
    hi: usize,
    a: ElemId,
) -> Result<Witnessed> {
    if lo > hi || hi > t.len() {
        return Err(Error::IndexOutOfRange {
            index: hi,
            len: t.len(),
        });
    }
    if product(g, &t.0[lo..hi]) != IDENTITY {
        return Err(Error::Precondition(
            "the block must have product one".into(),
        ));
    }
    let outside: Vec<(usize, ElemId)> =
        t.0.iter()
            .copied()
            .enumerate()
            .filter(|&(i, _)| i < lo || i >= hi)
            .collect();
    let word = word_in_entries(g, &outside, a).ok_or_else(|| {
        Error::Precondition(format!(
            "conjugator {} is not generated by the entries outside the block",
            g.label(a)
        ))
    })?;
    let mut tr = Tracker::new(g, t);
    for &(pos, sign) in word.iter().rev() {
        tr.conj_block_by_entry(lo, hi, pos, sign);
    }
    Ok(tr.finish())
}
