//! Finite groups stored as complete multiplication tables.
//!
//! Every group is built by breadth-first closure from an ordered list of
//! generators, so element ids are dense, the identity is always `0`, and the
//! numbering is a deterministic function of the input.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense element id. The identity is always `0`.
pub type ElemId = u16;

pub const IDENTITY: ElemId = 0;

/// Default cap on the order of a group that may be built.
pub const DEFAULT_MAX_ORDER: usize = 10_000;

/// Exhaustive associativity checks below this order, sampling above.
const EXHAUSTIVE_ASSOC_LIMIT: usize = 64;
const ASSOC_SAMPLES: usize = 100_000;

/// Group specification document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupSpec {
    Builtin {
        builtin: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        factors: Option<Vec<GroupSpec>>,
    },
    Permutations {
        permutations: Vec<String>,
    },
    Cayley {
        cayley: Vec<Vec<usize>>,
    },
}

impl GroupSpec {
    pub fn builtin(name: &str, n: usize) -> Self {
        GroupSpec::Builtin {
            builtin: name.to_string(),
            n: Some(n),
            factors: None,
        }
    }

    pub fn product(factors: Vec<GroupSpec>) -> Self {
        GroupSpec::Builtin {
            builtin: "product".to_string(),
            n: None,
            factors: Some(factors),
        }
    }

    pub fn permutations<S: AsRef<str>>(gens: &[S]) -> Self {
        GroupSpec::Permutations {
            permutations: gens.iter().map(|s| s.as_ref().to_string()).collect(),
        }
    }

    /// Parses shorthand such as `S4`, `C3`, `D4`, `Q8`, `symmetric(3)`,
    /// `cyclic(5)`, `S3xC2`, or an inline JSON document.
    pub fn parse_short(input: &str) -> Result<Self> {
        let s = input.trim();
        if s.starts_with('{') {
            return Ok(serde_json::from_str(s)?);
        }
        let parts: Vec<&str> = s.split(['x', '×']).map(str::trim).collect();
        if parts.len() > 1 {
            let factors = parts
                .iter()
                .map(|p| Self::parse_single(p, input))
                .collect::<Result<Vec<_>>>()?;
            return Ok(GroupSpec::product(factors));
        }
        Self::parse_single(s, input)
    }

    fn parse_single(s: &str, input: &str) -> Result<Self> {
        let (name, arg) = if let Some(open) = s.find('(') {
            let close = s
                .rfind(')')
                .ok_or_else(|| Error::parse("group", input, "unbalanced parenthesis"))?;
            (&s[..open], &s[open + 1..close])
        } else {
            let split = s
                .find(|ch: char| ch.is_ascii_digit())
                .ok_or_else(|| Error::parse("group", input, "missing parameter"))?;
            (&s[..split], &s[split..])
        };
        let n: usize = arg
            .trim()
            .parse()
            .map_err(|_| Error::parse("group", input, "parameter is not an integer"))?;
        let family = match name.trim().to_ascii_lowercase().as_str() {
            "s" | "sym" | "symmetric" => "symmetric",
            "a" | "alt" | "alternating" => "alternating",
            "c" | "z" | "cyclic" => "cyclic",
            "d" | "dih" | "dihedral" => "dihedral",
            "q" | "quaternion" => "quaternion",
            other => {
                return Err(Error::parse(
                    "group",
                    input,
                    format!("unknown family {other:?}"),
                ))
            }
        };
        Ok(GroupSpec::builtin(family, n))
    }
}

/// Where a group came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Builtin { name: String },
    Permutations { generators: Vec<String> },
    RawTable,
    Subgroup { parent: String, order: usize },
}

/// A finite group given by its full multiplication table.
#[derive(Clone)]
pub struct FiniteGroup {
    order: usize,
    mul: Vec<ElemId>,
    inv: Vec<ElemId>,
    elem_order: Vec<u32>,
    labels: Vec<String>,
    label_index: HashMap<String, ElemId>,
    perms: Option<Vec<Perm>>,
    source: Provenance,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGroup")
            .field("order", &self.order)
            .field("source", &self.source)
            .finish()
    }
}

impl FiniteGroup {
    pub fn build(spec: &GroupSpec) -> Result<Self> {
        Self::build_with_max(spec, DEFAULT_MAX_ORDER)
    }

    pub fn build_with_max(spec: &GroupSpec, max_order: usize) -> Result<Self> {
        match spec {
            GroupSpec::Builtin {
                builtin,
                n,
                factors,
            } => build_builtin(builtin, *n, factors.as_deref(), max_order),
            GroupSpec::Permutations { permutations } => {
                let perms = permutations
                    .iter()
                    .map(|s| Perm::parse(s))
                    .collect::<Result<Vec<_>>>()?;
                let degree = perms.iter().map(Perm::degree).max().unwrap_or(1);
                let perms: Vec<Perm> = perms.into_iter().map(|p| p.extend(degree)).collect();
                perm_group(
                    &perms,
                    Provenance::Permutations {
                        generators: permutations.clone(),
                    },
                    max_order,
                )
            }
            GroupSpec::Cayley { cayley } => from_cayley(cayley, max_order),
        }
    }

    /// Builds a group from a validated table. `mul[a * order + b]` is `a·b`.
    fn from_parts(
        mul: Vec<ElemId>,
        labels: Vec<String>,
        perms: Option<Vec<Perm>>,
        source: Provenance,
    ) -> Result<Self> {
        let order = labels.len();
        if mul.len() != order * order {
            return Err(Error::InvalidGroup("table is not square".into()));
        }
        let mut inv = vec![IDENTITY; order];
        for a in 0..order {
            let found = (0..order).find(|&b| mul[a * order + b] == IDENTITY);
            match found {
                Some(b) => inv[a] = b as ElemId,
                None => {
                    return Err(Error::InvalidGroup(format!(
                        "element {} has no inverse",
                        labels[a]
                    )))
                }
            }
        }
        let label_index = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i as ElemId))
            .collect();
        let mut g = FiniteGroup {
            order,
            mul,
            inv,
            elem_order: Vec::new(),
            labels,
            label_index,
            perms,
            source,
        };
        g.validate()?;
        g.elem_order = (0..order).map(|x| g.compute_order(x as ElemId)).collect();
        Ok(g)
    }

    /// Identity, inverse and associativity checks.
    pub fn validate(&self) -> Result<()> {
        let n = self.order;
        for x in 0..n as ElemId {
            if self.mul(IDENTITY, x) != x || self.mul(x, IDENTITY) != x {
                return Err(Error::InvalidGroup(format!(
                    "element 0 is not a two-sided identity for {}",
                    self.labels[x as usize]
                )));
            }
            if self.mul(x, self.inv(x)) != IDENTITY || self.mul(self.inv(x), x) != IDENTITY {
                return Err(Error::InvalidGroup(format!(
                    "inverse of {} is not two-sided",
                    self.labels[x as usize]
                )));
            }
        }
        let assoc = |a: ElemId, b: ElemId, c: ElemId| {
            self.mul(self.mul(a, b), c) == self.mul(a, self.mul(b, c))
        };
        if n <= EXHAUSTIVE_ASSOC_LIMIT {
            for a in 0..n as ElemId {
                for b in 0..n as ElemId {
                    for c in 0..n as ElemId {
                        if !assoc(a, b, c) {
                            return Err(Error::InvalidGroup(format!(
                                "not associative on ({a}, {b}, {c})"
                            )));
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            for _ in 0..ASSOC_SAMPLES {
                let a = rng.gen_range(0..n) as ElemId;
                let b = rng.gen_range(0..n) as ElemId;
                let c = rng.gen_range(0..n) as ElemId;
                if !assoc(a, b, c) {
                    return Err(Error::InvalidGroup(format!(
                        "not associative on ({a}, {b}, {c})"
                    )));
                }
            }
        }
        Ok(())
    }

    fn compute_order(&self, x: ElemId) -> u32 {
        let mut k = 1;
        let mut y = x;
        while y != IDENTITY {
            y = self.mul(y, x);
            k += 1;
        }
        k
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn mul(&self, a: ElemId, b: ElemId) -> ElemId {
        self.mul[a as usize * self.order + b as usize]
    }

    #[inline]
    pub fn inv(&self, a: ElemId) -> ElemId {
        self.inv[a as usize]
    }

    /// `a x a⁻¹`.
    #[inline]
    pub fn conj(&self, x: ElemId, a: ElemId) -> ElemId {
        self.mul(self.mul(a, x), self.inv(a))
    }

    /// `a b a⁻¹ b⁻¹`.
    pub fn commutator(&self, a: ElemId, b: ElemId) -> ElemId {
        self.mul(self.mul(a, b), self.mul(self.inv(a), self.inv(b)))
    }

    pub fn pow(&self, x: ElemId, k: i64) -> ElemId {
        let ord = self.elem_order(x) as i64;
        let e = k.rem_euclid(ord);
        let mut y = IDENTITY;
        for _ in 0..e {
            y = self.mul(y, x);
        }
        y
    }

    pub fn elem_order(&self, x: ElemId) -> u32 {
        self.elem_order[x as usize]
    }

    pub fn exponent(&self) -> u64 {
        self.elem_order
            .iter()
            .fold(1u64, |acc, &o| num_integer::lcm(acc, o as u64))
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order as ElemId).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn elements(&self) -> impl Iterator<Item = ElemId> {
        0..self.order as ElemId
    }

    pub fn label(&self, x: ElemId) -> &str {
        &self.labels[x as usize]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn source(&self) -> &Provenance {
        &self.source
    }

    /// Raw row-major table, `table[a][b] = a·b`.
    pub fn table(&self) -> Vec<Vec<usize>> {
        (0..self.order)
            .map(|a| {
                (0..self.order)
                    .map(|b| self.mul[a * self.order + b] as usize)
                    .collect()
            })
            .collect()
    }

    /// Resolves an element from its label; permutation groups also accept
    /// any cycle notation of the same permutation.
    pub fn parse_element(&self, input: &str) -> Result<ElemId> {
        let s = input.trim();
        if let Some(&id) = self.label_index.get(s) {
            return Ok(id);
        }
        if matches!(s, "e" | "1" | "()" | "id") {
            return Ok(IDENTITY);
        }
        if let Some(perms) = &self.perms {
            if let Ok(p) = Perm::parse(s) {
                let degree = perms[0].degree().max(p.degree());
                let p = p.extend(degree);
                if let Some(pos) = perms.iter().position(|q| q.clone().extend(degree) == p) {
                    return Ok(pos as ElemId);
                }
            }
        }
        Err(Error::parse(
            "element",
            input,
            "not an element of the group",
        ))
    }

    /// Re-tables a subgroup (given as a sorted element list closed under
    /// multiplication) as a group of its own. Returns the group and the
    /// embedding `local id -> parent id`.
    pub fn subgroup_group(&self, generators: &[ElemId]) -> Result<(FiniteGroup, Vec<ElemId>)> {
        let gens: Vec<ElemId> = generators.to_vec();
        let (elems, table) = closure_table(IDENTITY, &gens, |&a, &b| self.mul(a, b), self.order)?;
        let labels = elems
            .iter()
            .map(|&x| self.labels[x as usize].clone())
            .collect();
        let perms = self
            .perms
            .as_ref()
            .map(|ps| elems.iter().map(|&x| ps[x as usize].clone()).collect());
        let source = Provenance::Subgroup {
            parent: format!("{:?}", self.source),
            order: elems.len(),
        };
        let g = FiniteGroup::from_parts(table, labels, perms, source)?;
        Ok((g, elems))
    }
}

/// Breadth-first closure from `identity` under right multiplication by
/// `gens`, returning the element list (in discovery order) and the table.
fn closure_table<T, F>(
    identity: T,
    gens: &[T],
    mul: F,
    max_order: usize,
) -> Result<(Vec<T>, Vec<ElemId>)>
where
    T: Clone + Eq + Hash,
    F: Fn(&T, &T) -> T,
{
    let mut elems = vec![identity.clone()];
    let mut index: HashMap<T, usize> = HashMap::new();
    index.insert(identity, 0);
    let mut head = 0;
    while head < elems.len() {
        let x = elems[head].clone();
        head += 1;
        for g in gens {
            let y = mul(&x, g);
            if !index.contains_key(&y) {
                if elems.len() >= max_order {
                    return Err(Error::GroupTooLarge {
                        order: elems.len() + 1,
                        max: max_order,
                    });
                }
                if elems.len() > ElemId::MAX as usize {
                    return Err(Error::GroupTooLarge {
                        order: elems.len() + 1,
                        max: ElemId::MAX as usize,
                    });
                }
                index.insert(y.clone(), elems.len());
                elems.push(y);
            }
        }
    }
    let n = elems.len();
    let mut table = vec![IDENTITY; n * n];
    for (a, x) in elems.iter().enumerate() {
        for (b, y) in elems.iter().enumerate() {
            table[a * n + b] = index[&mul(x, y)] as ElemId;
        }
    }
    Ok((elems, table))
}

/// A permutation of `{0, …, degree-1}`; printed 1-based in cycle notation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Perm(Vec<u16>);

impl Perm {
    pub fn identity(degree: usize) -> Self {
        Perm((0..degree as u16).collect())
    }

    pub fn from_images(images: Vec<u16>) -> Self {
        Perm(images)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    fn extend(mut self, degree: usize) -> Self {
        for i in self.0.len()..degree {
            self.0.push(i as u16);
        }
        self
    }

    /// Left-to-right product: `self` is applied first.
    pub fn then(&self, other: &Perm) -> Perm {
        Perm(self.0.iter().map(|&x| other.0[x as usize]).collect())
    }

    /// Parses cycle notation, e.g. `(1 2)(3 4)`, `(1,2,3)` or `()`.
    pub fn parse(input: &str) -> Result<Perm> {
        let s = input.trim();
        if s.is_empty() {
            return Err(Error::parse("permutation", input, "empty string"));
        }
        let mut cycles: Vec<Vec<usize>> = Vec::new();
        let mut rest = s;
        while !rest.is_empty() {
            rest = rest.trim_start();
            if rest.is_empty() {
                break;
            }
            if !rest.starts_with('(') {
                return Err(Error::parse("permutation", input, "expected '('"));
            }
            let close = rest
                .find(')')
                .ok_or_else(|| Error::parse("permutation", input, "unbalanced parenthesis"))?;
            let body = &rest[1..close];
            let mut cycle = Vec::new();
            for tok in body.split(|c: char| c.is_whitespace() || c == ',') {
                if tok.is_empty() {
                    continue;
                }
                let p: usize = tok.parse().map_err(|_| {
                    Error::parse("permutation", input, format!("bad point {tok:?}"))
                })?;
                if p == 0 {
                    return Err(Error::parse("permutation", input, "points are 1-based"));
                }
                cycle.push(p - 1);
            }
            cycles.push(cycle);
            rest = &rest[close + 1..];
        }
        let degree = cycles.iter().flatten().map(|&p| p + 1).max().unwrap_or(1);
        let mut images: Vec<u16> = (0..degree as u16).collect();
        let mut seen = vec![false; degree];
        for cycle in &cycles {
            for &p in cycle {
                if seen[p] {
                    return Err(Error::parse("permutation", input, "repeated point"));
                }
                seen[p] = true;
            }
            for (i, &p) in cycle.iter().enumerate() {
                images[p] = cycle[(i + 1) % cycle.len()] as u16;
            }
        }
        Ok(Perm(images))
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut seen = vec![false; self.0.len()];
        let mut any = false;
        for start in 0..self.0.len() {
            if seen[start] || self.0[start] as usize == start {
                continue;
            }
            any = true;
            write!(f, "(")?;
            let mut p = start;
            let mut first = true;
            while !seen[p] {
                seen[p] = true;
                if !first {
                    write!(f, " ")?;
                }
                write!(f, "{}", p + 1)?;
                first = false;
                p = self.0[p] as usize;
            }
            write!(f, ")")?;
        }
        if !any {
            write!(f, "()")?;
        }
        Ok(())
    }
}

fn perm_group(gens: &[Perm], source: Provenance, max_order: usize) -> Result<FiniteGroup> {
    let degree = gens.iter().map(Perm::degree).max().unwrap_or(1);
    let (elems, table) = closure_table(Perm::identity(degree), gens, |a, b| a.then(b), max_order)?;
    let labels = elems.iter().map(|p| p.to_string()).collect();
    FiniteGroup::from_parts(table, labels, Some(elems), source)
}

fn cycle_perm(points: &[usize], degree: usize) -> Perm {
    let mut images: Vec<u16> = (0..degree as u16).collect();
    for (i, &p) in points.iter().enumerate() {
        images[p] = points[(i + 1) % points.len()] as u16;
    }
    Perm(images)
}

fn build_builtin(
    name: &str,
    n: Option<usize>,
    factors: Option<&[GroupSpec]>,
    max_order: usize,
) -> Result<FiniteGroup> {
    let source = Provenance::Builtin {
        name: match n {
            Some(n) => format!("{name}({n})"),
            None => name.to_string(),
        },
    };
    let need_n = || n.ok_or_else(|| Error::parse("group", name, "missing parameter n"));
    match name {
        "symmetric" => {
            let d = need_n()?;
            if d < 1 {
                return Err(Error::parse("group", name, "degree must be positive"));
            }
            let mut gens = Vec::new();
            if d >= 2 {
                gens.push(cycle_perm(&[0, 1], d));
            }
            if d >= 3 {
                gens.push(cycle_perm(&(0..d).collect::<Vec<_>>(), d));
            }
            perm_group(&gens, source, max_order)
        }
        "alternating" => {
            let d = need_n()?;
            let gens: Vec<Perm> = (2..d).map(|k| cycle_perm(&[0, 1, k], d)).collect();
            perm_group(&gens, source, max_order)
        }
        "cyclic" => {
            let m = need_n()?;
            if m == 0 {
                return Err(Error::parse("group", name, "order must be positive"));
            }
            if m > max_order {
                return Err(Error::GroupTooLarge {
                    order: m,
                    max: max_order,
                });
            }
            let (_, table) = closure_table(0usize, &[1 % m], |a, b| (a + b) % m, max_order)?;
            let labels = (0..m)
                .map(|k| match k {
                    0 => "1".to_string(),
                    1 => "g".to_string(),
                    k => format!("g^{k}"),
                })
                .collect();
            FiniteGroup::from_parts(table, labels, None, source)
        }
        "dihedral" => {
            let m = need_n()?;
            if m < 3 {
                return Err(Error::parse("group", name, "dihedral(n) needs n >= 3"));
            }
            let rotation = cycle_perm(&(0..m).collect::<Vec<_>>(), m);
            let reflection = Perm((0..m).map(|i| ((m - i) % m) as u16).collect());
            perm_group(&[rotation, reflection], source, max_order)
        }
        "quaternion" => {
            if n.unwrap_or(8) != 8 {
                return Err(Error::parse(
                    "group",
                    name,
                    "only quaternion(8) is supported",
                ));
            }
            // (sign, unit) with units 1, i, j, k.
            type Q = (bool, u8);
            fn qmul(a: &Q, b: &Q) -> Q {
                const TABLE: [[(bool, u8); 4]; 4] = [
                    [(false, 0), (false, 1), (false, 2), (false, 3)],
                    [(false, 1), (true, 0), (false, 3), (true, 2)],
                    [(false, 2), (true, 3), (true, 0), (false, 1)],
                    [(false, 3), (false, 2), (true, 1), (true, 0)],
                ];
                let (s, u) = TABLE[a.1 as usize][b.1 as usize];
                (a.0 ^ b.0 ^ s, u)
            }
            let (elems, table) =
                closure_table((false, 0u8), &[(false, 1), (false, 2)], qmul, max_order)?;
            let labels = elems
                .iter()
                .map(|&(neg, u)| {
                    let unit = ["1", "i", "j", "k"][u as usize];
                    if neg {
                        format!("-{unit}")
                    } else {
                        unit.to_string()
                    }
                })
                .collect();
            FiniteGroup::from_parts(table, labels, None, source)
        }
        "product" => {
            let factors = factors
                .filter(|f| !f.is_empty())
                .ok_or_else(|| Error::parse("group", name, "product needs factors"))?;
            let groups = factors
                .iter()
                .map(|f| FiniteGroup::build_with_max(f, max_order))
                .collect::<Result<Vec<_>>>()?;
            let k = groups.len();
            let mut gens = Vec::new();
            for (i, g) in groups.iter().enumerate() {
                for x in 1..g.order() as ElemId {
                    let mut v = vec![IDENTITY; k];
                    v[i] = x;
                    gens.push(v);
                }
            }
            let (elems, table) = closure_table(
                vec![IDENTITY; k],
                &gens,
                |a: &Vec<ElemId>, b: &Vec<ElemId>| {
                    a.iter()
                        .zip(b)
                        .zip(&groups)
                        .map(|((&x, &y), g)| g.mul(x, y))
                        .collect()
                },
                max_order,
            )?;
            let labels = elems
                .iter()
                .map(|v| {
                    let parts: Vec<&str> =
                        v.iter().zip(&groups).map(|(&x, g)| g.label(x)).collect();
                    format!("[{}]", parts.join(","))
                })
                .collect();
            let source = Provenance::Builtin {
                name: format!(
                    "product({})",
                    groups
                        .iter()
                        .map(|g| format!("{:?}", g.source()))
                        .collect::<Vec<_>>()
                        .join(",")
                ),
            };
            FiniteGroup::from_parts(table, labels, None, source)
        }
        other => Err(Error::parse("group", other, "unknown builtin family")),
    }
}

fn from_cayley(rows: &[Vec<usize>], max_order: usize) -> Result<FiniteGroup> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::InvalidGroup("empty table".into()));
    }
    if n > max_order {
        return Err(Error::GroupTooLarge {
            order: n,
            max: max_order,
        });
    }
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidGroup("table is not square".into()));
    }
    if rows.iter().flatten().any(|&x| x >= n) {
        return Err(Error::InvalidGroup("table entry out of range".into()));
    }
    let identity = (0..n)
        .find(|&e| (0..n).all(|x| rows[e][x] == x && rows[x][e] == x))
        .ok_or_else(|| Error::InvalidGroup("no identity element".into()))?;
    let gens: Vec<usize> = (0..n).filter(|&x| x != identity).collect();
    let (elems, table) = closure_table(identity, &gens, |&a, &b| rows[a][b], max_order)?;
    if elems.len() != n {
        return Err(Error::InvalidGroup("table is not a group".into()));
    }
    let labels = elems.iter().map(|&x| format!("x{x}")).collect();
    FiniteGroup::from_parts(table, labels, None, Provenance::RawTable)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> FiniteGroup {
        FiniteGroup::build(&GroupSpec::parse_short(s).unwrap()).unwrap()
    }

    #[test]
    fn builtin_orders() {
        assert_eq!(g("symmetric(3)").order(), 6);
        assert_eq!(g("S4").order(), 24);
        assert_eq!(g("cyclic(5)").order(), 5);
        assert_eq!(g("D4").order(), 8);
        assert_eq!(g("Q8").order(), 8);
        assert_eq!(g("A4").order(), 12);
        assert_eq!(g("S3xC2").order(), 12);
    }

    #[test]
    fn permutation_generators_close_to_s4() {
        let grp = FiniteGroup::build(&GroupSpec::permutations(&["(1 2)", "(1 2 3 4)"])).unwrap();
        assert_eq!(grp.order(), 24);
        assert_eq!(grp.label(IDENTITY), "()");
        assert_eq!(grp.label(1), "(1 2)");
    }

    #[test]
    fn bad_permutation_strings() {
        assert!(Perm::parse("(1 2").is_err());
        assert!(Perm::parse("(1 x)").is_err());
        assert!(Perm::parse("(0 1)").is_err());
        assert!(Perm::parse("(1 2 1)").is_err());
    }

    #[test]
    fn raw_table_validation() {
        let z3 = vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]];
        let grp = FiniteGroup::build(&GroupSpec::Cayley { cayley: z3 }).unwrap();
        assert_eq!(grp.order(), 3);
        let not_assoc = vec![vec![0, 1, 2], vec![1, 0, 1], vec![2, 2, 0]];
        assert!(FiniteGroup::build(&GroupSpec::Cayley { cayley: not_assoc }).is_err());
        // Identity not at index 0 is relabelled to id 0.
        let shifted = vec![vec![1, 0], vec![0, 1]];
        let grp = FiniteGroup::build(&GroupSpec::Cayley { cayley: shifted }).unwrap();
        assert_eq!(grp.label(IDENTITY), "x1");
    }

    #[test]
    fn order_cap() {
        let err = FiniteGroup::build_with_max(&GroupSpec::builtin("symmetric", 5), 100);
        assert!(matches!(err, Err(Error::GroupTooLarge { .. })));
    }

    #[test]
    fn element_parsing_accepts_any_cycle_notation() {
        let s3 = g("S3");
        let a = s3.parse_element("(1 2 3)").unwrap();
        assert_eq!(s3.parse_element("(2 3 1)").unwrap(), a);
        assert_eq!(s3.parse_element("(1,2,3)").unwrap(), a);
        assert_eq!(s3.elem_order(a), 3);
        assert!(s3.parse_element("(1 4)").is_err());
    }

    #[test]
    fn product_convention_is_left_to_right() {
        let s3 = g("S3");
        let a = s3.parse_element("(1 2)").unwrap();
        let b = s3.parse_element("(1 3)").unwrap();
        // apply (1 2) then (1 3): 1 -> 2, 2 -> 1 -> 3, 3 -> 1
        assert_eq!(s3.label(s3.mul(a, b)), "(1 2 3)");
        assert_eq!(s3.conj(b, a), s3.parse_element("(2 3)").unwrap());
    }

    #[test]
    fn quaternion_relations() {
        let q = g("Q8");
        let i = q.parse_element("i").unwrap();
        let j = q.parse_element("j").unwrap();
        let k = q.parse_element("k").unwrap();
        let m1 = q.parse_element("-1").unwrap();
        assert_eq!(q.mul(i, j), k);
        assert_eq!(q.mul(i, i), m1);
        assert_eq!(q.mul(j, i), q.parse_element("-k").unwrap());
        assert_eq!(q.exponent(), 4);
    }
}
