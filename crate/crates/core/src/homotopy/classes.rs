//! Conjugacy classes, i.e. free homotopy classes of loops, and their set-valued sum.

use std::collections::BTreeSet;

use serde::Serialize;

use super::{AlgebraError, FiniteGroup};

/// A free homotopy class, represented by its conjugacy orbit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FreeHomotopyClass {
    pub class_id: usize,
    /// Sorted element indices.
    pub members: Vec<usize>,
    #[serde(skip)]
    group_fingerprint: u64,
}

impl FreeHomotopyClass {
    pub fn is_trivial(&self) -> bool {
        self.class_id == 0
    }

    pub fn representative(&self) -> usize {
        self.members[0]
    }
}

/// The class list of a group together with the element-to-class map and the
/// precomputed sum table.
#[derive(Debug, Clone)]
pub struct ClassTable {
    group: FiniteGroup,
    classes: Vec<FreeHomotopyClass>,
    class_of: Vec<usize>,
    sums: Vec<BTreeSet<usize>>,
}

/// Conjugacy classes of a group that passes the axiom check.
///
/// Classes are ordered by their least member index, so the identity's class is
/// always first.
pub fn conjugacy_classes(group: &FiniteGroup) -> Result<Vec<FreeHomotopyClass>, AlgebraError> {
    group.check_associativity()?;
    Ok(orbit_partition(group))
}

/// Orbits of `g ↦ a g a⁻¹`, closed transitively. For a genuine group these are
/// the conjugacy classes; for a corrupted table they still partition the elements.
pub(crate) fn orbit_partition(group: &FiniteGroup) -> Vec<FreeHomotopyClass> {
    let n = group.order();
    let fingerprint = group.fingerprint();
    let mut assigned = vec![usize::MAX; n];
    let mut classes = Vec::new();
    for start in 0..n {
        if assigned[start] != usize::MAX {
            continue;
        }
        let id = classes.len();
        let mut members = vec![start];
        assigned[start] = id;
        let mut cursor = 0;
        while cursor < members.len() {
            let g = members[cursor];
            cursor += 1;
            for a in 0..n {
                let c = group.conjugate(g, a);
                if assigned[c] == usize::MAX {
                    assigned[c] = id;
                    members.push(c);
                }
            }
        }
        members.sort_unstable();
        classes.push(FreeHomotopyClass {
            class_id: id,
            members,
            group_fingerprint: fingerprint,
        });
    }
    classes
}

impl ClassTable {
    pub fn new(group: FiniteGroup) -> Result<Self, AlgebraError> {
        let classes = conjugacy_classes(&group)?;
        Ok(Self::from_partition(group, classes))
    }

    /// Build without the associativity check; used to diagnose corrupted tables.
    pub(crate) fn new_unchecked(group: FiniteGroup) -> Self {
        let classes = orbit_partition(&group);
        Self::from_partition(group, classes)
    }

    fn from_partition(group: FiniteGroup, classes: Vec<FreeHomotopyClass>) -> Self {
        let mut class_of = vec![0; group.order()];
        for c in &classes {
            for &m in &c.members {
                class_of[m] = c.class_id;
            }
        }
        let k = classes.len();
        let mut sums = Vec::with_capacity(k * k);
        for a in &classes {
            for b in &classes {
                let set: BTreeSet<usize> = a
                    .members
                    .iter()
                    .flat_map(|&x| b.members.iter().map(move |&y| (x, y)))
                    .map(|(x, y)| class_of[group.mul(x, y)])
                    .collect();
                sums.push(set);
            }
        }
        Self {
            group,
            classes,
            class_of,
            sums,
        }
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn classes(&self) -> &[FreeHomotopyClass] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn class(&self, id: usize) -> &FreeHomotopyClass {
        &self.classes[id]
    }

    pub fn class_of(&self, element: usize) -> usize {
        self.class_of[element]
    }

    /// Class of inverses (`−σ`).
    pub fn negation(&self, id: usize) -> usize {
        self.class_of[self.group.inv(self.classes[id].representative())]
    }

    /// Label such as `{i,-i}`.
    pub fn class_label(&self, id: usize) -> String {
        let names: Vec<&str> = self.classes[id]
            .members
            .iter()
            .map(|&m| self.group.label(m))
            .collect();
        format!("{{{}}}", names.join(","))
    }

    /// Sum by class index.
    pub fn sum_ids(&self, a: usize, b: usize) -> &BTreeSet<usize> {
        &self.sums[a * self.classes.len() + b]
    }

    /// `{ class(xy) : x ∈ a, y ∈ b }`
    pub fn class_add(
        &self,
        a: &FreeHomotopyClass,
        b: &FreeHomotopyClass,
    ) -> Result<BTreeSet<usize>, AlgebraError> {
        let fp = self.group.fingerprint();
        if a.group_fingerprint != fp || b.group_fingerprint != fp {
            return Err(AlgebraError::Structure(
                "classes belong to a different group than this table".into(),
            ));
        }
        if a.class_id >= self.len() || b.class_id >= self.len() {
            return Err(AlgebraError::Structure("class index out of range".into()));
        }
        Ok(self.sum_ids(a.class_id, b.class_id).clone())
    }

    /// Set-valued sum extended to a set on the left.
    pub fn sum_set(&self, left: &BTreeSet<usize>, b: usize) -> BTreeSet<usize> {
        left.iter()
            .flat_map(|&a| self.sum_ids(a, b).iter().copied())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_orbits(g: &FiniteGroup) -> Vec<BTreeSet<usize>> {
        let mut out: Vec<BTreeSet<usize>> = Vec::new();
        for x in 0..g.order() {
            let orbit: BTreeSet<usize> = (0..g.order())
                .map(|a| g.mul(g.mul(a, x), g.inv(a)))
                .collect();
            if !out.contains(&orbit) {
                out.push(orbit);
            }
        }
        out.sort_by_key(|s| *s.iter().next().unwrap());
        out
    }

    #[test]
    fn abelian_groups_have_singleton_classes() {
        for k in [2, 4, 5] {
            let classes = conjugacy_classes(&FiniteGroup::cyclic(k)).unwrap();
            assert_eq!(classes.len(), k);
            assert!(classes.iter().all(|c| c.members.len() == 1));
        }
    }

    #[test]
    fn quaternion_classes() {
        let q = FiniteGroup::quaternion();
        let classes = conjugacy_classes(&q).unwrap();
        let members: Vec<Vec<usize>> = classes.iter().map(|c| c.members.clone()).collect();
        assert_eq!(members, vec![vec![0], vec![1], vec![2, 3], vec![4, 5], vec![6, 7]]);
        let oracle: Vec<Vec<usize>> = brute_force_orbits(&q)
            .into_iter()
            .map(|s| s.into_iter().collect())
            .collect();
        assert_eq!(members, oracle);
    }

    #[test]
    fn trivial_class_is_identity_orbit() {
        let t = ClassTable::new(FiniteGroup::dihedral(4)).unwrap();
        assert!(t.class(0).is_trivial());
        assert_eq!(t.class(0).members, vec![t.group().identity()]);
    }

    #[test]
    fn sums() {
        let z2 = ClassTable::new(FiniteGroup::cyclic(2)).unwrap();
        let s = z2.class_add(z2.class(1), z2.class(1)).unwrap();
        assert_eq!(s.into_iter().collect::<Vec<_>>(), vec![0]);

        let q = ClassTable::new(FiniteGroup::quaternion()).unwrap();
        let (ci, cj, ck) = (2, 3, 4);
        assert_eq!(q.class_label(ci), "{i,-i}");
        let s = q.class_add(q.class(ci), q.class(cj)).unwrap();
        assert_eq!(s.into_iter().collect::<Vec<_>>(), vec![ck]);
        for a in 0..q.len() {
            let s = q.class_add(q.class(0), q.class(a)).unwrap();
            assert_eq!(s.into_iter().collect::<Vec<_>>(), vec![a]);
        }
    }

    #[test]
    fn foreign_classes_rejected() {
        let q = ClassTable::new(FiniteGroup::quaternion()).unwrap();
        let d = ClassTable::new(FiniteGroup::dihedral(4)).unwrap();
        assert!(q.class_add(q.class(1), d.class(1)).is_err());
    }

    #[test]
    fn nonassociative_table_rejected() {
        let mut mul = FiniteGroup::cyclic(4).table().to_vec();
        mul[5] = 3;
        mul[6] = 2;
        let g = FiniteGroup::from_table("bad", 4, mul, None).unwrap();
        assert!(matches!(
            conjugacy_classes(&g),
            Err(AlgebraError::NonAssociative { .. })
        ));
    }
}
