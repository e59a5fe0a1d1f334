use std::collections::{BTreeMap, BTreeSet};

use glq_core::homotopy::{conjugacy_classes, norm_star, verify_sum_properties, ClassTable, EminTable, FiniteGroup};
use proptest::prelude::*;

const GROUPS: [&str; 7] = ["Z2", "Z3", "Z4", "Z6", "D3", "D4", "Q8"];

fn inverse(g: &FiniteGroup, x: usize) -> usize {
    (0..g.order()).find(|&y| g.mul(x, y) == g.identity()).unwrap()
}

/// Orbits of `a ↦ x a x⁻¹`, computed from the table alone.
fn orbits(g: &FiniteGroup) -> BTreeSet<BTreeSet<usize>> {
    (0..g.order())
        .map(|a| (0..g.order()).map(|x| g.mul(g.mul(x, a), inverse(g, x))).collect())
        .collect()
}

fn element_sum(g: &FiniteGroup, t: &ClassTable, a: usize, b: usize) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    for &x in &t.class(a).members {
        for &y in &t.class(b).members {
            out.insert(t.class_of(g.mul(x, y)));
        }
    }
    out
}

/// Least cost over multisets of nontrivial classes of size ≤ `max_len`,
/// extending the sum set term by term.
fn brute_norms(t: &ClassTable, emin: &[f64], max_len: usize) -> Vec<f64> {
    let k = t.len();
    let mut best = vec![f64::INFINITY; k];
    best[0] = 0.0;
    fn rec(
        t: &ClassTable,
        emin: &[f64],
        start: usize,
        left: usize,
        set: &BTreeSet<usize>,
        cost: f64,
        best: &mut [f64],
    ) {
        for c in start..t.len() {
            let next = t.sum_set(set, c);
            let cost = cost + emin[c];
            for &s in &next {
                best[s] = best[s].min(cost);
            }
            if left > 1 {
                rec(t, emin, c, left - 1, &next, cost, best);
            }
        }
    }
    rec(t, emin, 1, max_len, &BTreeSet::from([0]), 0.0, &mut best);
    best
}

fn symmetric_emin(t: &ClassTable, raw: &[f64]) -> Vec<f64> {
    (0..t.len()).map(|id| if id == 0 { 0.0 } else { raw[id.min(t.negation(id))] }).collect()
}

#[test]
fn classes_partition_the_group_into_conjugation_orbits() {
    for name in GROUPS {
        let g = FiniteGroup::builtin(name).unwrap();
        let classes = conjugacy_classes(&g).unwrap();
        let got: BTreeSet<BTreeSet<usize>> = classes.iter().map(|c| c.members.iter().copied().collect()).collect();
        assert_eq!(got, orbits(&g), "{name}");
        let total: usize = classes.iter().map(|c| c.members.len()).sum();
        assert_eq!(total, g.order(), "{name}: classes overlap");
        assert_eq!(classes[0].members, vec![g.identity()], "{name}");
    }
}

#[test]
fn class_counts() {
    let counts: BTreeMap<&str, usize> = GROUPS
        .iter()
        .map(|&n| (n, ClassTable::new(FiniteGroup::builtin(n).unwrap()).unwrap().len()))
        .collect();
    assert_eq!(counts["Z2"], 2);
    assert_eq!(counts["Z4"], 4);
    assert_eq!(counts["D3"], 3);
    assert_eq!(counts["D4"], 5);
    assert_eq!(counts["Q8"], 5);
}

#[test]
fn sums_match_elementwise_products_and_satisfy_the_properties() {
    for name in GROUPS {
        let g = FiniteGroup::builtin(name).unwrap();
        let t = ClassTable::new(g.clone()).unwrap();
        for a in 0..t.len() {
            assert_eq!(t.sum_ids(0, a), &BTreeSet::from([a]), "{name}: identity");
            assert!(t.sum_ids(a, t.negation(a)).contains(&0), "{name}: inverse");
            for b in 0..t.len() {
                assert_eq!(t.sum_ids(a, b), &element_sum(&g, &t, a, b), "{name}");
                assert_eq!(t.sum_ids(a, b), t.sum_ids(b, a), "{name}: commutativity");
            }
        }
        assert!(verify_sum_properties(&g).holds(), "{name}");
    }
}

#[test]
fn quaternion_i_plus_j_is_k() {
    let g = FiniteGroup::quaternion();
    let t = ClassTable::new(g.clone()).unwrap();
    let id = |label: &str| t.class_of((0..8).find(|&x| g.label(x) == label).unwrap());
    assert_eq!(t.sum_ids(id("i"), id("j")), &BTreeSet::from([id("k")]));
}

#[test]
fn quaternion_cheap_minus_one_lowers_only_its_own_norm() {
    // [i] cannot be reached through [−1] alone; the cheap class only helps [−1] itself
    let t = ClassTable::new(FiniteGroup::quaternion()).unwrap();
    let minus = t.class_of((0..8).find(|&x| t.group().label(x) == "-1").unwrap());
    let emin: Vec<f64> = (0..5).map(|c| if c == 0 { 0.0 } else if c == minus { 0.1 } else { 1.0 }).collect();
    let n = norm_star(&EminTable::new("Q8", emin.clone()), &t).unwrap();
    assert_eq!(n.norms, brute_norms(&t, &emin, 8));
    assert_eq!(n.norms[minus], 0.1);
    for c in 1..5 {
        if c != minus {
            assert_eq!(n.norms[c], 1.0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norm_star_matches_enumeration_and_is_a_norm(
        which in 0..GROUPS.len(),
        raw in prop::collection::vec(0.05f64..5.0, 8),
    ) {
        let g = FiniteGroup::builtin(GROUPS[which]).unwrap();
        let t = ClassTable::new(g.clone()).unwrap();
        let emin = symmetric_emin(&t, &raw);
        let table = norm_star(&EminTable::new(g.name(), emin.clone()), &t).unwrap();
        let oracle = brute_norms(&t, &emin, g.order());
        for (a, b) in table.norms.iter().zip(&oracle) {
            prop_assert!((a - b).abs() <= 1e-12 * b.max(1.0), "{:?} vs {:?}", table.norms, oracle);
        }
        let n = &table.norms;
        for a in 0..t.len() {
            prop_assert_eq!(n[a] == 0.0, a == 0);
            prop_assert!(n[a] <= emin[a] + 1e-15);
            for b in 0..t.len() {
                if t.sum_ids(a, b).contains(&0) {
                    prop_assert!((n[a] - n[b]).abs() <= 1e-12 * n[a].max(1.0));
                }
                for &s in t.sum_ids(a, b) {
                    prop_assert!(n[s] <= n[a] + n[b] + 1e-12);
                }
            }
        }
        let gap = n[1..].iter().copied().fold(f64::INFINITY, f64::min);
        prop_assert_eq!(table.gap, Some(gap));
    }
}
