use serde::Serialize;

use crate::group::{ElemId, FiniteGroup};

/// Conjugacy classes, indexed deterministically by
/// `(element order, class size, minimal element id)`.
#[derive(Debug, Clone, Serialize)]
pub struct ConjugacyClassTable {
    classes: Vec<Vec<ElemId>>,
    class_of: Vec<usize>,
    class_order: Vec<u32>,
}

impl ConjugacyClassTable {
    pub fn new(g: &FiniteGroup) -> Self {
        let n = g.order();
        let mut assigned = vec![false; n];
        let mut classes: Vec<Vec<ElemId>> = Vec::new();
        for x in g.elements() {
            if assigned[x as usize] {
                continue;
            }
            let mut class: Vec<ElemId> = g.elements().map(|a| g.conj(x, a)).collect();
            class.sort_unstable();
            class.dedup();
            for &y in &class {
                assigned[y as usize] = true;
            }
            classes.push(class);
        }
        classes.sort_by_key(|c| (g.elem_order(c[0]), c.len(), c[0]));
        let mut class_of = vec![0; n];
        for (i, c) in classes.iter().enumerate() {
            for &x in c {
                class_of[x as usize] = i;
            }
        }
        let class_order = classes.iter().map(|c| g.elem_order(c[0])).collect();
        ConjugacyClassTable {
            classes,
            class_of,
            class_order,
        }
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn class(&self, i: usize) -> &[ElemId] {
        &self.classes[i]
    }

    pub fn classes(&self) -> &[Vec<ElemId>] {
        &self.classes
    }

    pub fn class_of(&self, x: ElemId) -> usize {
        self.class_of[x as usize]
    }

    /// Common order of the elements of class `i`.
    pub fn class_order(&self, i: usize) -> u32 {
        self.class_order[i]
    }

    pub fn class_size(&self, i: usize) -> usize {
        self.classes[i].len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupSpec;

    fn classes(s: &str) -> (FiniteGroup, ConjugacyClassTable) {
        let g = FiniteGroup::build(&GroupSpec::parse_short(s).unwrap()).unwrap();
        let t = ConjugacyClassTable::new(&g);
        (g, t)
    }

    #[test]
    fn s3_classes() {
        let (_, t) = classes("S3");
        let sizes: Vec<usize> = (0..t.len()).map(|i| t.class_size(i)).collect();
        assert_eq!(sizes, vec![1, 3, 2]);
    }

    #[test]
    fn cyclic_classes_are_singletons() {
        let (_, t) = classes("cyclic(5)");
        assert_eq!(t.len(), 5);
        assert!(t.classes().iter().all(|c| c.len() == 1));
    }

    #[test]
    fn s4_transpositions() {
        let (g, t) = classes("S4");
        assert_eq!(t.len(), 5);
        let tr = g.parse_element("(1 2)").unwrap();
        assert_eq!(t.class_size(t.class_of(tr)), 6);
    }

    #[test]
    fn classes_are_conjugation_closed() {
        for name in ["S4", "D4", "Q8", "A4"] {
            let (g, t) = classes(name);
            let total: usize = t.classes().iter().map(Vec::len).sum();
            assert_eq!(total, g.order());
            for x in g.elements() {
                for a in g.elements() {
                    assert_eq!(t.class_of(g.conj(x, a)), t.class_of(x));
                }
                assert_eq!(g.elem_order(x), t.class_order(t.class_of(x)));
            }
        }
    }
}
