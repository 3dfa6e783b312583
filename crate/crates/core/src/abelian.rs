//! Finite abelian groups in invariant-factor form.
//!
//! A group is presented by integer relations on named generators and
//! normalized through the Smith form to `Z_{d1} x Z_{d2} x ...` with
//! `d1 | d2 | ...` and every `d_i >= 2`. Elements are coordinate vectors in
//! that product.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::snf::smith_normal_form;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("relation lattice has rank {rank} < {generators} generators; the group is infinite")]
    InfiniteGroup { rank: usize, generators: usize },
    #[error("relation row {row} has {len} entries, expected {expected}")]
    RelationLength {
        row: usize,
        len: usize,
        expected: usize,
    },
    #[error("group order exceeds the supported range")]
    TooLarge,
    #[error("element {0} does not belong to this group")]
    ForeignElement(String),
}

/// Element of a finite abelian group: one residue per invariant factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement {
    coords: Vec<u64>,
}

impl GroupElement {
    pub fn coords(&self) -> &[u64] {
        &self.coords
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coords.len() == 1 {
            return write!(f, "{}", self.coords[0]);
        }
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianGroup {
    invariant_factors: Vec<u64>,
    order: u64,
    named_generators: Vec<(String, GroupElement)>,
}

fn generator_name(i: usize) -> String {
    const NAMES: &[&str] = &["a", "b", "c", "d", "e", "f", "g", "h"];
    NAMES
        .get(i)
        .map(|s| s.to_string())
        .unwrap_or_else(|| format!("x{i}"))
}

impl AbelianGroup {
    /// `Z^num_generators / <relations>` in invariant-factor form. Generators
    /// are named `a`, `b`, `c`, ... in input order.
    pub fn from_relations(num_generators: usize, relations: &[Vec<i64>]) -> Result<Self, GroupError> {
        for (row, r) in relations.iter().enumerate() {
            if r.len() != num_generators {
                return Err(GroupError::RelationLength {
                    row,
                    len: r.len(),
                    expected: num_generators,
                });
            }
        }
        let form = smith_normal_form(relations, num_generators);
        let rank = form.diagonal.iter().filter(|d| !d.is_zero()).count();
        if rank < num_generators {
            return Err(GroupError::InfiniteGroup {
                rank,
                generators: num_generators,
            });
        }
        // keep the columns whose factor is >= 2; they come last in the chain
        let kept: Vec<usize> = (0..num_generators)
            .filter(|&j| form.diagonal[j] > BigInt::from(1))
            .collect();
        let mut factors = Vec::with_capacity(kept.len());
        let mut order: u64 = 1;
        for &j in &kept {
            let d = form.diagonal[j].to_u64().ok_or(GroupError::TooLarge)?;
            order = order.checked_mul(d).ok_or(GroupError::TooLarge)?;
            factors.push(d);
        }
        let named_generators = (0..num_generators)
            .map(|g| {
                let coords = kept
                    .iter()
                    .zip(&factors)
                    .map(|(&j, &d)| {
                        let x = form.column_transform[g][j].mod_floor(&BigInt::from(d));
                        x.to_u64().expect("residue fits")
                    })
                    .collect();
                (generator_name(g), GroupElement { coords })
            })
            .collect();
        Ok(Self {
            invariant_factors: factors,
            order,
            named_generators,
        })
    }

    /// `Z_n` with generator `a = 1`.
    pub fn cyclic(n: u64) -> Result<Self, GroupError> {
        Self::from_relations(1, &[vec![n as i64]])
    }

    /// `Z_{n1} x Z_{n2} x ...` with generators the standard basis vectors.
    pub fn direct_product(moduli: &[u64]) -> Result<Self, GroupError> {
        let k = moduli.len();
        let rows: Vec<Vec<i64>> = (0..k)
            .map(|i| {
                let mut r = vec![0; k];
                r[i] = moduli[i] as i64;
                r
            })
            .collect();
        Self::from_relations(k, &rows)
    }

    pub fn invariant_factors(&self) -> &[u64] {
        &self.invariant_factors
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors.len()
    }

    pub fn named_generators(&self) -> &[(String, GroupElement)] {
        &self.named_generators
    }

    pub fn generator(&self, name: &str) -> Option<&GroupElement> {
        self.named_generators
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, g)| g)
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement {
            coords: vec![0; self.rank()],
        }
    }

    pub fn is_zero(&self, g: &GroupElement) -> bool {
        g.coords.iter().all(|&c| c == 0)
    }

    /// Builds an element from arbitrary integers, reducing each coordinate.
    pub fn element(&self, coords: &[i64]) -> Result<GroupElement, GroupError> {
        if coords.len() != self.rank() {
            return Err(GroupError::ForeignElement(format!("{coords:?}")));
        }
        Ok(GroupElement {
            coords: coords
                .iter()
                .zip(&self.invariant_factors)
                .map(|(&c, &d)| c.rem_euclid(d as i64) as u64)
                .collect(),
        })
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        g.coords.len() == self.rank()
            && g.coords.iter().zip(&self.invariant_factors).all(|(c, d)| c < d)
    }

    pub fn add(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        debug_assert!(self.contains(g) && self.contains(h));
        GroupElement {
            coords: g
                .coords
                .iter()
                .zip(&h.coords)
                .zip(&self.invariant_factors)
                .map(|((x, y), d)| (x + y) % d)
                .collect(),
        }
    }

    pub fn sub(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        self.add(g, &self.negate(h))
    }

    pub fn negate(&self, g: &GroupElement) -> GroupElement {
        GroupElement {
            coords: g
                .coords
                .iter()
                .zip(&self.invariant_factors)
                .map(|(x, d)| (d - x) % d)
                .collect(),
        }
    }

    pub fn scalar_multiply(&self, k: i64, g: &GroupElement) -> GroupElement {
        GroupElement {
            coords: g
                .coords
                .iter()
                .zip(&self.invariant_factors)
                .map(|(&x, &d)| (k as i128 * x as i128).rem_euclid(d as i128) as u64)
                .collect(),
        }
    }

    /// Least `k > 0` with `k·g = 0`.
    pub fn element_order(&self, g: &GroupElement) -> u64 {
        g.coords
            .iter()
            .zip(&self.invariant_factors)
            .map(|(&x, &d)| d / x.gcd(&d))
            .fold(1, |acc, o| acc.lcm(&o))
    }

    /// `|G : <g>|`.
    pub fn subgroup_index(&self, g: &GroupElement) -> u64 {
        self.order / self.element_order(g)
    }

    /// Elements of the cyclic subgroup `<g>` in the order `0, g, 2g, ...`.
    pub fn cyclic_subgroup(&self, g: &GroupElement) -> Vec<GroupElement> {
        let mut out = vec![self.zero()];
        let mut cur = g.clone();
        while !self.is_zero(&cur) {
            out.push(cur.clone());
            cur = self.add(&cur, g);
        }
        out
    }

    /// `|<g> ∩ <h>|`.
    pub fn intersection_order(&self, g: &GroupElement, h: &GroupElement) -> u64 {
        let hs: HashSet<GroupElement> = self.cyclic_subgroup(h).into_iter().collect();
        self.cyclic_subgroup(g)
            .iter()
            .filter(|x| hs.contains(*x))
            .count() as u64
    }

    /// All elements in lexicographic coordinate order.
    pub fn elements(&self) -> Vec<GroupElement> {
        (0..self.order).map(|i| self.element_at(i as usize)).collect()
    }

    /// Position of `g` in [`AbelianGroup::elements`].
    pub fn index_of(&self, g: &GroupElement) -> usize {
        g.coords
            .iter()
            .zip(&self.invariant_factors)
            .fold(0usize, |acc, (&c, &d)| acc * d as usize + c as usize)
    }

    pub fn element_at(&self, mut index: usize) -> GroupElement {
        let mut coords = vec![0; self.rank()];
        for (slot, &d) in coords.iter_mut().zip(&self.invariant_factors).rev() {
            *slot = (index % d as usize) as u64;
            index /= d as usize;
        }
        GroupElement { coords }
    }

    /// Nonzero solutions of `2x = 0`, lexicographically ordered.
    pub fn elements_of_order_two(&self) -> Vec<GroupElement> {
        // per coordinate the solutions are 0 and d/2 (when d is even)
        let mut out = vec![self.zero()];
        for (i, &d) in self.invariant_factors.iter().enumerate() {
            if d % 2 == 0 {
                let extra: Vec<GroupElement> = out
                    .iter()
                    .map(|e| {
                        let mut e = e.clone();
                        e.coords[i] = d / 2;
                        e
                    })
                    .collect();
                out.extend(extra);
            }
        }
        out.retain(|e| !self.is_zero(e));
        out.sort();
        out
    }

    /// Subgroup generated by `gens`, as a set of elements.
    pub fn span(&self, gens: &[GroupElement]) -> HashSet<GroupElement> {
        let mut seen: HashSet<GroupElement> = HashSet::new();
        let mut stack = vec![self.zero()];
        seen.insert(self.zero());
        while let Some(x) = stack.pop() {
            for g in gens {
                let y = self.add(&x, g);
                if seen.insert(y.clone()) {
                    stack.push(y);
                }
            }
        }
        seen
    }

    pub fn generates(&self, gens: &[GroupElement]) -> bool {
        self.span(gens).len() as u64 == self.order
    }

    /// Every group automorphism, as images of the standard basis vectors
    /// `e_i` (one per invariant factor). Exhaustive; meant for small groups.
    pub fn automorphisms(&self) -> Vec<Vec<GroupElement>> {
        let t = self.rank();
        let elements = self.elements();
        let candidates: Vec<Vec<&GroupElement>> = self
            .invariant_factors
            .iter()
            .map(|&d| {
                elements
                    .iter()
                    .filter(|x| self.is_zero(&self.scalar_multiply(d as i64, x)))
                    .collect()
            })
            .collect();
        let mut out = Vec::new();
        let mut current: Vec<GroupElement> = Vec::with_capacity(t);
        fn rec(
            g: &AbelianGroup,
            level: usize,
            candidates: &[Vec<&GroupElement>],
            current: &mut Vec<GroupElement>,
            out: &mut Vec<Vec<GroupElement>>,
        ) {
            if level == candidates.len() {
                if g.generates(current) {
                    out.push(current.clone());
                }
                return;
            }
            for &x in &candidates[level] {
                current.push(x.clone());
                rec(g, level + 1, candidates, current, out);
                current.pop();
            }
        }
        rec(self, 0, &candidates, &mut current, &mut out);
        out
    }

    /// Applies the homomorphism sending `e_i` to `images[i]`.
    pub fn apply_hom(&self, images: &[GroupElement], g: &GroupElement) -> GroupElement {
        let mut acc = self.zero();
        for (c, img) in g.coords.iter().zip(images) {
            acc = self.add(&acc, &self.scalar_multiply(*c as i64, img));
        }
        acc
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.invariant_factors.is_empty() {
            write!(f, "Z_1")?;
        } else {
            let parts: Vec<String> = self
                .invariant_factors
                .iter()
                .map(|d| format!("Z_{d}"))
                .collect();
            write!(f, "{}", parts.join(" x "))?;
        }
        if !self.named_generators.is_empty() {
            let gens: Vec<String> = self
                .named_generators
                .iter()
                .map(|(n, g)| format!("{n}={g}"))
                .collect();
            write!(f, " [{}]", gens.join(" "))?;
        }
        Ok(())
    }
}
