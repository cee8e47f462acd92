//! Group element abstraction and finite groups given by multiplication tables.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::FinitaryPermutation;

/// Minimal group interface needed to form Gram matrices `[φ(g_j⁻¹ g_i)]`.
pub trait GroupElement: Clone {
    /// `self · other`.
    fn compose(&self, other: &Self) -> Self;
    fn inverse(&self) -> Self;

    /// `h · self · h⁻¹`.
    fn conjugate_by(&self, h: &Self) -> Self {
        h.compose(self).compose(&h.inverse())
    }
}

/// A finite group presented by its multiplication table, `table[a][b] = a · b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<usize>>", into = "Vec<Vec<usize>>")]
pub struct FiniteGroup {
    table: Vec<Vec<usize>>,
    identity: usize,
    inverses: Vec<usize>,
}

impl FiniteGroup {
    /// Validates closure, identity, inverses and associativity.
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::InvalidGroup("empty table".into()));
        }
        for (a, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidGroup(format!("row {a} has length {}", row.len())));
            }
            if let Some(&bad) = row.iter().find(|&&c| c >= n) {
                return Err(Error::InvalidGroup(format!("entry {bad} out of range")));
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| table[e][a] == a && table[a][e] == a))
            .ok_or_else(|| Error::InvalidGroup("no identity element".into()))?;
        let mut inverses = Vec::with_capacity(n);
        for a in 0..n {
            let inv = (0..n)
                .find(|&b| table[a][b] == identity && table[b][a] == identity)
                .ok_or_else(|| Error::InvalidGroup(format!("element {a} has no inverse")))?;
            inverses.push(inv);
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::InvalidGroup(format!(
                            "associativity fails at ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }
        Ok(Self {
            table,
            identity,
            inverses,
        })
    }

    /// Group generated by the given permutations, closed by orbit
    /// enumeration. Elements are returned alongside the group, indexed
    /// consistently with the table; index 0 is the identity.
    pub fn generated_by(
        generators: &[FinitaryPermutation],
        max_order: usize,
    ) -> Result<(Self, Vec<FinitaryPermutation>)> {
        let elements = close_under(
            FinitaryPermutation::identity(),
            generators,
            |a, b| a.compose(b),
            max_order,
        )?;
        let index: std::collections::HashMap<&FinitaryPermutation, usize> =
            elements.iter().enumerate().map(|(i, g)| (g, i)).collect();
        let table = elements
            .iter()
            .map(|a| elements.iter().map(|b| index[&a.compose(b)]).collect())
            .collect();
        Ok((Self::from_table(table)?, elements))
    }

    /// The symmetric group on `{1..n}`; element list in the same order as the table.
    pub fn symmetric(n: usize) -> Result<(Self, Vec<FinitaryPermutation>)> {
        let mut gens = Vec::new();
        if n >= 2 {
            gens.push(FinitaryPermutation::transposition(1, 2)?);
        }
        if n >= 3 {
            gens.push(FinitaryPermutation::from_cycles(&[(1..=n).collect::<Vec<_>>()])?);
        }
        let order = (1..=n).product();
        Self::generated_by(&gens, order)
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    /// Handle to element `index` that implements [`GroupElement`].
    pub fn element(self: &Arc<Self>, index: usize) -> TableElement {
        assert!(index < self.order());
        TableElement {
            group: Arc::clone(self),
            index,
        }
    }

    pub fn elements(self: &Arc<Self>) -> Vec<TableElement> {
        (0..self.order()).map(|i| self.element(i)).collect()
    }
}

impl TryFrom<Vec<Vec<usize>>> for FiniteGroup {
    type Error = Error;

    fn try_from(table: Vec<Vec<usize>>) -> Result<Self> {
        Self::from_table(table)
    }
}

impl From<FiniteGroup> for Vec<Vec<usize>> {
    fn from(g: FiniteGroup) -> Self {
        g.table
    }
}

/// An element of a [`FiniteGroup`].
#[derive(Clone)]
pub struct TableElement {
    group: Arc<FiniteGroup>,
    index: usize,
}

impl TableElement {
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }
}

impl std::fmt::Debug for TableElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "g{}", self.index)
    }
}

impl PartialEq for TableElement {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.group, &other.group) && self.index == other.index
    }
}

impl GroupElement for TableElement {
    fn compose(&self, other: &Self) -> Self {
        debug_assert!(Arc::ptr_eq(&self.group, &other.group));
        self.group.element(self.group.mul(self.index, other.index))
    }

    fn inverse(&self) -> Self {
        self.group.element(self.group.inv(self.index))
    }
}

/// Breadth-first closure of `{identity}` under right multiplication by the
/// generators. Fails once more than `max_order` elements are found.
pub(crate) fn close_under<T, F>(
    identity: T,
    generators: &[T],
    mul: F,
    max_order: usize,
) -> Result<Vec<T>>
where
    T: Clone + Eq + std::hash::Hash,
    F: Fn(&T, &T) -> T,
{
    let mut seen = std::collections::HashSet::new();
    seen.insert(identity.clone());
    let mut elements = vec![identity];
    let mut frontier = 0;
    while frontier < elements.len() {
        let current = elements[frontier].clone();
        frontier += 1;
        for g in generators {
            let next = mul(&current, g);
            if seen.insert(next.clone()) {
                if elements.len() == max_order {
                    return Err(Error::InvalidGroup(format!(
                        "closure exceeds {max_order} elements"
                    )));
                }
                elements.push(next);
            }
        }
    }
    Ok(elements)
}
