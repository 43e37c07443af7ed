mod common;

use common::{grp, setup};
use hurwitz_core::nielsen::{
    abelianized_product, braid_in_place, conjugate_block, conjugate_tuple, rotate, BraidLetter,
    BraidWord, Direction, NielsenTuple,
};
use hurwitz_core::orbit::{EngineConfig, OrbitEngine};
use hurwitz_core::{ElemId, FiniteGroup};
use proptest::prelude::*;

const GROUPS: [&str; 5] = ["S3", "S4", "D4", "Q8", "C3xC2"];

fn tuple_and_moves(
    order: usize,
    len: std::ops::Range<usize>,
    moves: usize,
) -> impl Strategy<Value = (Vec<ElemId>, Vec<(usize, bool)>)> {
    prop::collection::vec(0..order as ElemId, len).prop_flat_map(move |t| {
        let l = t.len();
        (
            Just(t),
            prop::collection::vec((0..l - 1, any::<bool>()), moves),
        )
    })
}

fn dir(forward: bool) -> Direction {
    if forward {
        Direction::Forward
    } else {
        Direction::Inverse
    }
}

fn product(g: &FiniteGroup, t: &[ElemId]) -> ElemId {
    t.iter().fold(0, |acc, &x| g.mul(acc, x))
}

fn sorted_classes(g: &FiniteGroup, t: &[ElemId]) -> Vec<Vec<ElemId>> {
    let classes = hurwitz_core::classes::ConjugacyClassTable::new(g);
    let mut v: Vec<usize> = t.iter().map(|&x| classes.class_of(x)).collect();
    v.sort();
    v.into_iter().map(|k| classes.class(k).to_vec()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    // 256 cases × 64 moves per group, well over 10⁴ random moves each.
    #[test]
    fn moves_preserve_invariants(gi in 0..GROUPS.len(), seed in tuple_and_moves(24, 2..8, 64)) {
        let g = grp(GROUPS[gi]);
        let (raw, moves) = seed;
        let t0: Vec<ElemId> = raw.iter().map(|&x| x % g.order() as ElemId).collect();
        let mut t = t0.clone();
        let p = product(&g, &t);
        let h = hurwitz_core::subgroup::Subgroup::closure(&g, &t).order();
        let cls = sorted_classes(&g, &t);
        for &(i, f) in &moves {
            braid_in_place(&g, &mut t, i, dir(f)).unwrap();
            prop_assert_eq!(product(&g, &t), p);
        }
        prop_assert_eq!(hurwitz_core::subgroup::Subgroup::closure(&g, &t).order(), h);
        prop_assert_eq!(sorted_classes(&g, &t), cls);
        // undo in reverse order
        for &(i, f) in moves.iter().rev() {
            braid_in_place(&g, &mut t, i, dir(!f)).unwrap();
        }
        prop_assert_eq!(t, t0);
    }

    #[test]
    fn braid_relations(gi in 0..GROUPS.len(), raw in prop::collection::vec(0u32..24, 4..8), i in 0usize..6, j in 0usize..6) {
        let g = grp(GROUPS[gi]);
        let t0: Vec<ElemId> = raw.iter().map(|&x| (x % g.order() as u32) as ElemId).collect();
        let n = t0.len();
        let i = i % (n - 2);
        let word = |letters: &[usize]| BraidWord(letters.iter().map(|&p| BraidLetter { pos: p, dir: Direction::Forward }).collect());
        let nt = NielsenTuple(t0.clone());
        prop_assert_eq!(word(&[i, i + 1, i]).apply(&g, &nt).unwrap(), word(&[i + 1, i, i + 1]).apply(&g, &nt).unwrap());
        let j = j % (n - 1);
        if i.abs_diff(j) >= 2 {
            prop_assert_eq!(word(&[i, j]).apply(&g, &nt).unwrap(), word(&[j, i]).apply(&g, &nt).unwrap());
        }
        let w = word(&[i, j, i + 1]);
        prop_assert_eq!(w.inverse().apply(&g, &w.apply(&g, &nt).unwrap()).unwrap(), nt);
    }

    #[test]
    fn abelianized_product_matches(raw in prop::collection::vec(0usize..6, 0..10)) {
        let s = setup("S4", &["(1 2)", "(1 2 3)"]);
        let c = s.c_elements();
        let t: Vec<ElemId> = raw.iter().map(|&i| c[i % c.len()]).collect();
        let psi = NielsenTuple(t.clone()).multidiscriminant(&s).unwrap();
        let ab = s.abelianization();
        prop_assert_eq!(abelianized_product(&psi.as_signed(), &s), ab.project(product(s.group(), &t)).clone());
    }

    #[test]
    fn witnesses_replay(gi in 0..GROUPS.len(), raw in prop::collection::vec(0u32..24, 1..7), a in 0u32..24, outer in prop::collection::vec(0u32..24, 0..3)) {
        let g = grp(GROUPS[gi]);
        let m = g.order() as u32;
        let mut t: Vec<ElemId> = raw.iter().map(|&x| (x % m) as ElemId).collect();
        let p = product(&g, &t);
        t.push(g.inv(p));
        let t = NielsenTuple(t);

        let w = rotate(&g, &t).unwrap();
        prop_assert_eq!(w.word.apply(&g, &t).unwrap(), w.tuple);

        let sub = t.generated_subgroup(&g).element_list();
        let gamma = sub[a as usize % sub.len()];
        let w = conjugate_tuple(&g, &t, gamma).unwrap();
        prop_assert_eq!(&w.tuple, &t.conjugate_by(&g, gamma));
        prop_assert_eq!(w.word.apply(&g, &t).unwrap(), w.tuple);

        let left = NielsenTuple(outer.iter().map(|&x| (x % m) as ElemId).collect());
        let big = left.concat(&t).concat(&left);
        let sub = left.generated_subgroup(&g).element_list();
        let gamma = sub[a as usize % sub.len()];
        let w = conjugate_block(&g, &big, left.len(), left.len() + t.len(), gamma).unwrap();
        prop_assert_eq!(&w.tuple, &left.concat(&t.conjugate_by(&g, gamma)).concat(&left));
        prop_assert_eq!(w.word.apply(&g, &big).unwrap(), w.tuple);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn concatenation_descends(gi in 0..3usize, a in prop::collection::vec(0u32..24, 1..4), b in prop::collection::vec(0u32..24, 1..3), moves in prop::collection::vec((0usize..3, any::<bool>()), 0..12)) {
        let g = grp(GROUPS[gi]);
        let e = OrbitEngine::new(EngineConfig::default()).unwrap();
        let m = g.order() as u32;
        let t1: Vec<ElemId> = a.iter().map(|&x| (x % m) as ElemId).collect();
        let t2: Vec<ElemId> = b.iter().map(|&x| (x % m) as ElemId).collect();
        let mut u1 = t1.clone();
        let l = u1.len();
        if l >= 2 {
            for &(i, f) in &moves {
                braid_in_place(&g, &mut u1, i % (l - 1), dir(f)).unwrap();
            }
        }
        let lhs = NielsenTuple(t1).concat(&NielsenTuple(t2.clone()));
        let rhs = NielsenTuple(u1).concat(&NielsenTuple(t2));
        prop_assert!(e.same_orbit(&g, &lhs, &rhs).unwrap());
    }

    #[test]
    fn central_entries_commute(x in 0u32..16, y in 0u32..16) {
        // −1 is central in Q8.
        let g = grp("Q8");
        let z = g.parse_element("-1").unwrap();
        let x = (x % 8) as ElemId;
        let y = (y % 8) as ElemId;
        let t = NielsenTuple(vec![z, x, y]);
        let w = BraidWord(vec![BraidLetter { pos: 0, dir: Direction::Forward }]);
        prop_assert_eq!(w.apply(&g, &t).unwrap(), NielsenTuple(vec![x, z, y]));
    }
}
