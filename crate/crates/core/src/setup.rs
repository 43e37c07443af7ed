//! The triple (G, D, ξ): disjoint unions of conjugacy classes with
//! multiplicities, plus everything derived from it (c, D*, τ, Ω).

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::classes::ConjugacyClassTable;
use crate::error::{Error, Result};
use crate::group::{ElemId, FiniteGroup, IDENTITY};
use crate::subgroup::{all_subgroups, Abelianization, ElementSet, Subgroup};

/// Setup document: each block lists representative elements and is expanded
/// to the union of their conjugacy classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetupDoc {
    pub blocks: Vec<Vec<String>>,
    pub xi: Vec<u32>,
}

const NOT_IN_C: u32 = u32::MAX;

#[derive(Debug, Clone)]
pub struct ClassSetup {
    group: Arc<FiniteGroup>,
    classes: Arc<ConjugacyClassTable>,
    ab: Arc<Abelianization>,
    blocks: Vec<Vec<usize>>,
    xi: Vec<u32>,
    c: ElementSet,
    dstar: Vec<usize>,
    tau: Vec<usize>,
    elem_dstar: Vec<u32>,
    embedding: Option<Vec<ElemId>>,
}

impl ClassSetup {
    /// `blocks` are lists of conjugacy-class indices of `group`.
    pub fn new(group: Arc<FiniteGroup>, blocks: Vec<Vec<usize>>, xi: Vec<u32>) -> Result<Self> {
        let classes = Arc::new(ConjugacyClassTable::new(&group));
        Self::with_tables(group, classes, blocks, xi, None)
    }

    fn with_tables(
        group: Arc<FiniteGroup>,
        classes: Arc<ConjugacyClassTable>,
        mut blocks: Vec<Vec<usize>>,
        xi: Vec<u32>,
        embedding: Option<Vec<ElemId>>,
    ) -> Result<Self> {
        if blocks.is_empty() && group.order() > 1 {
            return Err(Error::InvalidSetup("no blocks given".into()));
        }
        if blocks.len() != xi.len() {
            return Err(Error::InvalidSetup(format!(
                "{} blocks but {} multiplicities",
                blocks.len(),
                xi.len()
            )));
        }
        if xi.contains(&0) {
            return Err(Error::InvalidSetup(
                "multiplicities must be positive".into(),
            ));
        }
        let identity_class = classes.class_of(IDENTITY);
        let mut owner = vec![usize::MAX; classes.len()];
        for (b, block) in blocks.iter_mut().enumerate() {
            block.sort_unstable();
            block.dedup();
            if block.is_empty() {
                return Err(Error::InvalidSetup(format!("block {b} is empty")));
            }
            for &k in block.iter() {
                if k >= classes.len() {
                    return Err(Error::InvalidSetup(format!("class index {k} out of range")));
                }
                if k == identity_class {
                    return Err(Error::InvalidSetup(
                        "blocks must not contain the identity".into(),
                    ));
                }
                if owner[k] != usize::MAX {
                    return Err(Error::InvalidSetup(format!(
                        "blocks {} and {b} overlap",
                        owner[k]
                    )));
                }
                owner[k] = b;
            }
        }
        let mut c = ElementSet::empty(group.order());
        let mut dstar: Vec<usize> = Vec::new();
        for (k, &b) in owner.iter().enumerate() {
            if b != usize::MAX {
                dstar.push(k);
                for &x in classes.class(k) {
                    c.insert(x);
                }
            }
        }
        let tau: Vec<usize> = dstar.iter().map(|&k| owner[k]).collect();
        let mut elem_dstar = vec![NOT_IN_C; group.order()];
        for (i, &k) in dstar.iter().enumerate() {
            for &x in classes.class(k) {
                elem_dstar[x as usize] = i as u32;
            }
        }
        let c_list: Vec<ElemId> = c.iter().collect();
        if Subgroup::closure(&group, &c_list).order() != group.order() {
            return Err(Error::InvalidSetup(
                "the blocks do not generate the group".into(),
            ));
        }
        let ab = Arc::new(Abelianization::new(&group)?);
        Ok(ClassSetup {
            group,
            classes,
            ab,
            blocks,
            xi,
            c,
            dstar,
            tau,
            elem_dstar,
            embedding,
        })
    }

    pub fn from_doc(group: Arc<FiniteGroup>, doc: &SetupDoc) -> Result<Self> {
        let classes = ConjugacyClassTable::new(&group);
        let mut blocks = Vec::new();
        for reps in &doc.blocks {
            let mut block = Vec::new();
            for r in reps {
                // allow "a,b" inside one string as well as separate entries
                for part in crate::nielsen::split_top_level(r) {
                    let x = group.parse_element(&part)?;
                    block.push(classes.class_of(x));
                }
            }
            blocks.push(block);
        }
        Self::with_tables(group, Arc::new(classes), blocks, doc.xi.clone(), None)
    }

    /// The single-block setup `D = {c}` with `ξ(c) = 1`.
    pub fn single_block(group: Arc<FiniteGroup>, reps: &[&str]) -> Result<Self> {
        let doc = SetupDoc {
            blocks: vec![reps.iter().map(|s| s.to_string()).collect()],
            xi: vec![1],
        };
        Self::from_doc(group, &doc)
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn group_arc(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn classes(&self) -> &ConjugacyClassTable {
        &self.classes
    }

    pub fn abelianization(&self) -> &Abelianization {
        &self.ab
    }

    /// Blocks of D as lists of class indices.
    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn xi(&self) -> &[u32] {
        &self.xi
    }

    /// |ξ| = Σ ξ(γ).
    pub fn xi_total(&self) -> u64 {
        self.xi.iter().map(|&x| x as u64).sum()
    }

    /// The union c of all blocks.
    pub fn c(&self) -> &ElementSet {
        &self.c
    }

    pub fn c_elements(&self) -> Vec<ElemId> {
        self.c.iter().collect()
    }

    /// Class indices of D*, ascending.
    pub fn dstar(&self) -> &[usize] {
        &self.dstar
    }

    /// Block index of each D* entry.
    pub fn tau(&self) -> &[usize] {
        &self.tau
    }

    /// Number of D* classes in block `b`, i.e. |τ⁻¹(b)|.
    pub fn fibre_size(&self, b: usize) -> usize {
        self.tau.iter().filter(|&&t| t == b).count()
    }

    /// Ω(D) = |D*| − |D|.
    pub fn omega(&self) -> usize {
        self.dstar.len() - self.blocks.len()
    }

    /// Position in D* of the class of `x`, if `x ∈ c`.
    #[inline]
    pub fn dstar_index(&self, x: ElemId) -> Option<usize> {
        match self.elem_dstar[x as usize] {
            NOT_IN_C => None,
            i => Some(i as usize),
        }
    }

    /// Elements of the D* class at position `i`.
    pub fn dstar_class(&self, i: usize) -> &[ElemId] {
        self.classes.class(self.dstar[i])
    }

    /// Local → parent element map when this setup was restricted to a subgroup.
    pub fn embedding(&self) -> Option<&[ElemId]> {
        self.embedding.as_deref()
    }

    /// κ = max over D* of |γ|·ord(γ).
    pub fn kappa(&self) -> u64 {
        self.dstar
            .iter()
            .map(|&k| self.classes.class_size(k) as u64 * self.classes.class_order(k) as u64)
            .max()
            .unwrap_or(0)
    }

    /// Whether `h` is D-generated: meets every block and is generated by c ∩ h.
    pub fn is_d_generated(&self, h: &Subgroup) -> bool {
        let meets_all = self.blocks.iter().all(|b| {
            b.iter()
                .any(|&k| self.classes.class(k).iter().any(|&x| h.contains(x)))
        });
        if !meets_all {
            return false;
        }
        let inside: Vec<ElemId> = self.c.iter().filter(|&x| h.contains(x)).collect();
        Subgroup::closure(&self.group, &inside).order() == h.order()
    }

    /// Sub_{G,D}: the trivial subgroup and every D-generated subgroup.
    pub fn d_generated_subgroups(&self, lattice_bound: usize) -> Result<Vec<Subgroup>> {
        Ok(all_subgroups(&self.group, lattice_bound)?
            .into_iter()
            .filter(|h| h.is_trivial() || self.is_d_generated(h))
            .collect())
    }

    /// The setup (H, D_H, ξ_H) on a nontrivial D-generated subgroup, with H
    /// re-tabled as a group of its own.
    pub fn restrict(&self, h: &Subgroup) -> Result<ClassSetup> {
        if h.is_trivial() || !self.is_d_generated(h) {
            return Err(Error::Precondition(
                "restriction needs a nontrivial D-generated subgroup".into(),
            ));
        }
        let (hg, emb) = self.group.subgroup_group(h.generators())?;
        let hclasses = ConjugacyClassTable::new(&hg);
        let mut blocks = vec![Vec::new(); self.blocks.len()];
        for k in 0..hclasses.len() {
            let x = emb[hclasses.class(k)[0] as usize];
            if let Some(i) = self.dstar_index(x) {
                blocks[self.tau[i]].push(k);
            }
        }
        let emb = match &self.embedding {
            Some(parent) => emb.iter().map(|&x| parent[x as usize]).collect(),
            None => emb,
        };
        Self::with_tables(
            Arc::new(hg),
            Arc::new(hclasses),
            blocks,
            self.xi.clone(),
            Some(emb),
        )
    }
}
