//! Finite groups given by explicit multiplication tables.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use super::AlgebraError;

/// A finite group stored as a row-major Cayley table over element indices.
///
/// Construction checks the table shape, the two-sided identity and two-sided
/// inverses. Associativity is checked separately by [`FiniteGroup::check_associativity`]
/// so that corrupted tables can still be loaded and diagnosed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    mul: Vec<usize>,
    identity: usize,
    inverse: Vec<usize>,
    labels: Vec<String>,
    name: String,
}

/// On-disk form of a group table.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupFile {
    #[serde(default)]
    pub name: Option<String>,
    pub order: usize,
    /// Row-major `order * order` table; entry `a * order + b` holds the index of `a b`.
    pub mul: Vec<usize>,
    #[serde(default)]
    pub labels: Option<Vec<String>>,
}

impl FiniteGroup {
    pub fn from_table(
        name: impl Into<String>,
        order: usize,
        mul: Vec<usize>,
        labels: Option<Vec<String>>,
    ) -> Result<Self, AlgebraError> {
        if order == 0 {
            return Err(AlgebraError::Structure("group order must be positive".into()));
        }
        if mul.len() != order * order {
            return Err(AlgebraError::Structure(format!(
                "multiplication table has {} entries, expected {}",
                mul.len(),
                order * order
            )));
        }
        if let Some(pos) = mul.iter().position(|&x| x >= order) {
            return Err(AlgebraError::Structure(format!(
                "table entry {} at ({}, {}) is not an element index",
                mul[pos],
                pos / order,
                pos % order
            )));
        }
        let labels = match labels {
            Some(l) if l.len() != order => {
                return Err(AlgebraError::Structure(format!(
                    "{} labels for a group of order {}",
                    l.len(),
                    order
                )))
            }
            Some(l) => l,
            None => (0..order).map(|i| format!("g{i}")).collect(),
        };

        let identity = (0..order)
            .find(|&e| (0..order).all(|g| mul[e * order + g] == g && mul[g * order + e] == g))
            .ok_or_else(|| AlgebraError::Structure("table has no two-sided identity".into()))?;

        let mut inverse = Vec::with_capacity(order);
        for g in 0..order {
            let inv = (0..order)
                .find(|&h| mul[g * order + h] == identity && mul[h * order + g] == identity)
                .ok_or_else(|| {
                    AlgebraError::Structure(format!("element {} has no two-sided inverse", labels[g]))
                })?;
            inverse.push(inv);
        }

        Ok(Self {
            order,
            mul,
            identity,
            inverse,
            labels,
            name: name.into(),
        })
    }

    pub fn from_file(file: GroupFile) -> Result<Self, AlgebraError> {
        let name = file.name.unwrap_or_else(|| "group".to_string());
        Self::from_table(name, file.order, file.mul, file.labels)
    }

    pub fn to_file(&self) -> GroupFile {
        GroupFile {
            name: Some(self.name.clone()),
            order: self.order,
            mul: self.mul.clone(),
            labels: Some(self.labels.clone()),
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, g: usize) -> &str {
        &self.labels[g]
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b]
    }

    #[inline]
    pub fn inv(&self, g: usize) -> usize {
        self.inverse[g]
    }

    pub fn table(&self) -> &[usize] {
        &self.mul
    }

    /// `a g a⁻¹`
    #[inline]
    pub fn conjugate(&self, g: usize, a: usize) -> usize {
        self.mul(self.mul(a, g), self.inv(a))
    }

    /// Full triple loop; returns the first failing triple.
    pub fn check_associativity(&self) -> Result<(), AlgebraError> {
        let n = self.order;
        for a in 0..n {
            for b in 0..n {
                let ab = self.mul(a, b);
                for c in 0..n {
                    if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                        return Err(AlgebraError::NonAssociative {
                            a: self.labels[a].clone(),
                            b: self.labels[b].clone(),
                            c: self.labels[c].clone(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Hash of the table, used to tie classes to the group they came from.
    pub fn fingerprint(&self) -> u64 {
        let mut hasher = DefaultHasher::new();
        self.order.hash(&mut hasher);
        self.mul.hash(&mut hasher);
        hasher.finish()
    }

    /// Cyclic group Z/k with elements `0..k` under addition.
    pub fn cyclic(k: usize) -> Self {
        assert!(k > 0, "cyclic group needs a positive order");
        let mul = (0..k * k).map(|i| (i / k + i % k) % k).collect();
        let labels = (0..k).map(|i| i.to_string()).collect();
        Self::from_table(format!("Z{k}"), k, mul, Some(labels)).expect("cyclic table is a group")
    }

    /// Dihedral group of order `2n`: elements `r^i` (index `i`) and `s r^i` (index `n + i`).
    pub fn dihedral(n: usize) -> Self {
        assert!(n >= 1, "dihedral group needs n >= 1");
        let order = 2 * n;
        let decode = |g: usize| (g >= n, g % n);
        let encode = |s: bool, i: usize| if s { n + i % n } else { i % n };
        let mut mul = vec![0; order * order];
        for a in 0..order {
            for b in 0..order {
                let (sa, ia) = decode(a);
                let (sb, ib) = decode(b);
                // r^i s = s r^{-i}
                let prod = match (sa, sb) {
                    (false, false) => encode(false, ia + ib),
                    (false, true) => encode(true, ib + n - ia),
                    (true, false) => encode(true, ia + ib),
                    (true, true) => encode(false, ib + n - ia),
                };
                mul[a * order + b] = prod;
            }
        }
        let labels = (0..order)
            .map(|g| {
                let (s, i) = decode(g);
                match (s, i) {
                    (false, 0) => "e".to_string(),
                    (false, i) => format!("r{i}"),
                    (true, 0) => "s".to_string(),
                    (true, i) => format!("sr{i}"),
                }
            })
            .collect();
        Self::from_table(format!("D{n}"), order, mul, Some(labels)).expect("dihedral table is a group")
    }

    /// Quaternion group Q8, ordered `1, -1, i, -i, j, -j, k, -k`.
    pub fn quaternion() -> Self {
        // unit index 0..4 = 1, i, j, k; sign bit in the low position of the element index
        const UNIT_MUL: [[(usize, bool); 4]; 4] = [
            [(0, false), (1, false), (2, false), (3, false)],
            [(1, false), (0, true), (3, false), (2, true)],
            [(2, false), (3, true), (0, true), (1, false)],
            [(3, false), (2, false), (1, true), (0, true)],
        ];
        let mut mul = vec![0; 64];
        for a in 0..8 {
            for b in 0..8 {
                let (ua, na) = (a / 2, a % 2 == 1);
                let (ub, nb) = (b / 2, b % 2 == 1);
                let (u, neg) = UNIT_MUL[ua][ub];
                let sign = na ^ nb ^ neg;
                mul[a * 8 + b] = 2 * u + usize::from(sign);
            }
        }
        let labels = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        Self::from_table("Q8", 8, mul, Some(labels)).expect("quaternion table is a group")
    }

    pub fn direct_product(a: &Self, b: &Self) -> Self {
        let order = a.order * b.order;
        let mut mul = vec![0; order * order];
        for x in 0..order {
            for y in 0..order {
                let (xa, xb) = (x / b.order, x % b.order);
                let (ya, yb) = (y / b.order, y % b.order);
                mul[x * order + y] = a.mul(xa, ya) * b.order + b.mul(xb, yb);
            }
        }
        let labels = (0..order)
            .map(|x| format!("({},{})", a.labels[x / b.order], b.labels[x % b.order]))
            .collect();
        Self::from_table(format!("{}x{}", a.name, b.name), order, mul, Some(labels))
            .expect("product of groups is a group")
    }

    /// Resolve a built-in name: `Z<k>`, `D<n>` (order 2n), `Q8`, `trivial`.
    pub fn builtin(name: &str) -> Result<Self, AlgebraError> {
        let bad = || AlgebraError::Structure(format!("unknown built-in group `{name}`"));
        match name {
            "Q8" => Ok(Self::quaternion()),
            "trivial" => Ok(Self::cyclic(1)),
            _ => {
                let (head, tail) = name.split_at(1);
                let k: usize = tail.parse().map_err(|_| bad())?;
                match head {
                    "Z" if k >= 1 => Ok(Self::cyclic(k)),
                    "D" if k >= 1 => Ok(Self::dihedral(k)),
                    _ => Err(bad()),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_are_groups() {
        for g in [
            FiniteGroup::cyclic(1),
            FiniteGroup::cyclic(6),
            FiniteGroup::dihedral(3),
            FiniteGroup::dihedral(4),
            FiniteGroup::quaternion(),
            FiniteGroup::direct_product(&FiniteGroup::cyclic(2), &FiniteGroup::quaternion()),
        ] {
            g.check_associativity().unwrap();
            for x in 0..g.order() {
                assert_eq!(g.mul(x, g.inv(x)), g.identity());
            }
        }
    }

    #[test]
    fn quaternion_relations() {
        let q = FiniteGroup::quaternion();
        let (minus_one, i, j, k) = (1, 2, 4, 6);
        assert_eq!(q.mul(i, i), minus_one);
        assert_eq!(q.mul(j, j), minus_one);
        assert_eq!(q.mul(k, k), minus_one);
        assert_eq!(q.mul(i, j), k);
        assert_eq!(q.mul(j, i), k + 1);
        assert_eq!(q.mul(q.mul(i, j), k), minus_one);
    }

    #[test]
    fn dihedral_relation() {
        let d = FiniteGroup::dihedral(4);
        let (r, s) = (1, 4);
        // s r s = r^{-1}
        assert_eq!(d.mul(d.mul(s, r), s), d.inv(r));
        assert_eq!(d.label(r), "r1");
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(FiniteGroup::from_table("x", 2, vec![0, 1, 1], None).is_err());
        assert!(FiniteGroup::from_table("x", 2, vec![0, 1, 1, 2], None).is_err());
        // no inverse for element 1
        assert!(FiniteGroup::from_table("x", 2, vec![0, 1, 1, 1], None).is_err());
    }

    #[test]
    fn corrupted_table_names_a_triple() {
        let mut mul = FiniteGroup::cyclic(4).table().to_vec();
        mul[4 + 1] = 3;
        mul[4 + 2] = 2;
        let g = FiniteGroup::from_table("bad", 4, mul, None).unwrap();
        match g.check_associativity() {
            Err(AlgebraError::NonAssociative { .. }) => {}
            other => panic!("expected associativity failure, got {other:?}"),
        }
    }

    #[test]
    fn builtin_names() {
        assert_eq!(FiniteGroup::builtin("Z4").unwrap().order(), 4);
        assert_eq!(FiniteGroup::builtin("D4").unwrap().order(), 8);
        assert_eq!(FiniteGroup::builtin("Q8").unwrap().order(), 8);
        assert!(FiniteGroup::builtin("X3").is_err());
    }
}
