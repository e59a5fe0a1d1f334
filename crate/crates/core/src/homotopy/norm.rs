//! Loop-energy tables and the decomposition norm over free homotopy classes.

use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap};

use serde::{Deserialize, Serialize};

use super::{AlgebraError, ClassTable};

/// Relative tolerance for the `E_min(σ) = E_min(−σ)` check on loaded tables.
const SYMMETRY_RTOL: f64 = 1e-6;

/// Least loop energy per class, indexed like the class list of a [`ClassTable`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EminTable {
    /// Name of the group whose class list indexes `values`.
    pub group_ref: String,
    pub values: Vec<f64>,
}

impl EminTable {
    pub fn new(group_ref: impl Into<String>, values: Vec<f64>) -> Self {
        Self {
            group_ref: group_ref.into(),
            values,
        }
    }

    pub fn validate(&self, table: &ClassTable) -> Result<(), AlgebraError> {
        if self.values.len() != table.len() {
            return Err(AlgebraError::Validation(format!(
                "E_min table has {} entries but the group has {} classes",
                self.values.len(),
                table.len()
            )));
        }
        for (id, &v) in self.values.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(AlgebraError::Validation(format!(
                    "E_min of class {} is {v}; entries must be finite and nonnegative",
                    table.class_label(id)
                )));
            }
            if id == 0 && v != 0.0 {
                return Err(AlgebraError::Validation(format!(
                    "E_min of the trivial class must be 0, got {v}"
                )));
            }
            if id != 0 && v == 0.0 {
                return Err(AlgebraError::Validation(format!(
                    "E_min of nontrivial class {} must be positive",
                    table.class_label(id)
                )));
            }
            let neg = self.values[table.negation(id)];
            if (v - neg).abs() > SYMMETRY_RTOL * v.max(neg) {
                return Err(AlgebraError::Validation(format!(
                    "E_min({}) = {v} differs from the inverse class value {neg}",
                    table.class_label(id)
                )));
            }
        }
        Ok(())
    }
}

/// Per-class norms together with the gap `c₀`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormTable {
    pub group_ref: String,
    pub classes: Vec<NormEntry>,
    pub norms: Vec<f64>,
    /// Least nontrivial norm; `None` for the trivial group.
    pub gap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormEntry {
    pub class_id: usize,
    pub label: String,
    pub emin: f64,
    pub norm: f64,
    /// One optimal decomposition, as class ids (empty for the trivial class).
    pub decomposition: Vec<usize>,
}

impl NormTable {
    pub fn nontrivial_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.norms.iter().skip(1).copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Frontier {
    cost: f64,
    class: usize,
}

impl Eq for Frontier {}

impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.class.cmp(&self.class))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Least total `E_min` over decompositions `σ ∈ σ₁ + … + σ_k`.
///
/// Shortest paths over the class set: a state is the class accumulated so far,
/// and appending a term `τ` moves to any class of `state + τ` at cost `E_min(τ)`.
/// All weights are nonnegative and the trivial class is a zero-cost start, so
/// Dijkstra settles every class exactly.
pub fn norm_star(emin: &EminTable, table: &ClassTable) -> Result<NormTable, AlgebraError> {
    emin.validate(table)?;
    let k = table.len();
    let mut cost = vec![f64::INFINITY; k];
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; k];
    let mut settled = vec![false; k];
    let mut heap = BinaryHeap::new();
    cost[0] = 0.0;
    heap.push(Frontier { cost: 0.0, class: 0 });

    while let Some(Frontier { cost: c, class }) = heap.pop() {
        if settled[class] || c > cost[class] {
            continue;
        }
        settled[class] = true;
        for term in 1..k {
            let step = c + emin.values[term];
            for &next in table.sum_ids(class, term) {
                if step < cost[next] {
                    cost[next] = step;
                    parent[next] = Some((class, term));
                    heap.push(Frontier {
                        cost: step,
                        class: next,
                    });
                }
            }
        }
    }

    let classes = (0..k)
        .map(|id| {
            let mut decomposition = Vec::new();
            let mut cursor = id;
            while let Some((prev, term)) = parent[cursor] {
                decomposition.push(term);
                cursor = prev;
            }
            decomposition.reverse();
            NormEntry {
                class_id: id,
                label: table.class_label(id),
                emin: emin.values[id],
                norm: cost[id],
                decomposition,
            }
        })
        .collect();
    let gap = cost.iter().skip(1).copied().reduce(f64::min);
    Ok(NormTable {
        group_ref: emin.group_ref.clone(),
        classes,
        norms: cost,
        gap,
    })
}

/// A failed instance of one of the sum properties.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "property", rename_all = "snake_case")]
pub enum SumViolation {
    /// `trivial + α ≠ {α}`
    Identity { alpha: usize },
    /// no `β` with `trivial ∈ α + β`
    Inverse { alpha: usize },
    Associativity { alpha: usize, beta: usize, gamma: usize },
    Commutativity { alpha: usize, beta: usize },
}

#[derive(Debug, Clone, Serialize)]
pub struct SumPropertyReport {
    pub group: String,
    pub class_count: usize,
    /// Element-level failing triple, when the table itself is not associative.
    pub table_associativity: Option<[String; 3]>,
    pub violations: Vec<SumViolation>,
}

impl SumPropertyReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty() && self.table_associativity.is_none()
    }
}

/// Exhaustive check of identity, inverses, associativity and commutativity of
/// the set-valued class sum.
pub fn verify_sum_properties(group: &super::FiniteGroup) -> SumPropertyReport {
    let table_associativity = match group.check_associativity() {
        Err(AlgebraError::NonAssociative { a, b, c }) => Some([a, b, c]),
        _ => None,
    };
    let table = ClassTable::new_unchecked(group.clone());
    let k = table.len();
    let mut violations = Vec::new();

    for alpha in 0..k {
        let s = table.sum_ids(0, alpha);
        if s.len() != 1 || !s.contains(&alpha) {
            violations.push(SumViolation::Identity { alpha });
        }
        if !(0..k).any(|beta| table.sum_ids(alpha, beta).contains(&0)) {
            violations.push(SumViolation::Inverse { alpha });
        }
    }
    for alpha in 0..k {
        for beta in 0..k {
            if table.sum_ids(alpha, beta) != table.sum_ids(beta, alpha) {
                violations.push(SumViolation::Commutativity { alpha, beta });
            }
            for gamma in 0..k {
                let left = table.sum_set(table.sum_ids(alpha, beta), gamma);
                let right: BTreeSet<usize> = table
                    .sum_ids(beta, gamma)
                    .iter()
                    .flat_map(|&s| table.sum_ids(alpha, s).iter().copied())
                    .collect();
                if left != right {
                    violations.push(SumViolation::Associativity { alpha, beta, gamma });
                }
            }
        }
    }

    SumPropertyReport {
        group: group.name().to_string(),
        class_count: k,
        table_associativity,
        violations,
    }
}
