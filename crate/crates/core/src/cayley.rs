//! Cayley graphs of finite abelian groups and the toroidal grids `Qd`/`Tr`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abelian::{AbelianGroup, GroupElement, GroupError};
use crate::graph::{Graph, GraphError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CayleyError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("invalid connection set: {0}")]
    InvalidConnectionSet(String),
    #[error("invalid shift: {0}")]
    InvalidShift(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// An inverse-closed, identity-free, nonempty subset of an abelian group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectionSet {
    group: AbelianGroup,
    elements: Vec<GroupElement>,
}

impl ConnectionSet {
    /// Validates and deduplicates `elements`.
    pub fn new(group: AbelianGroup, elements: Vec<GroupElement>) -> Result<Self, CayleyError> {
        let mut elements = elements;
        for s in &elements {
            if !group.contains(s) {
                return Err(GroupError::ForeignElement(s.to_string()).into());
            }
        }
        elements.sort();
        elements.dedup();
        if elements.is_empty() {
            return Err(CayleyError::InvalidConnectionSet("empty".into()));
        }
        if let Some(z) = elements.iter().find(|s| group.is_zero(s)) {
            return Err(CayleyError::InvalidConnectionSet(format!("contains the identity {z}")));
        }
        for s in &elements {
            let neg = group.negate(s);
            if elements.binary_search(&neg).is_err() {
                return Err(CayleyError::InvalidConnectionSet(format!(
                    "{s} is present but its inverse {neg} is not"
                )));
            }
        }
        Ok(ConnectionSet { group, elements })
    }

    /// `{±g : g ∈ gens}`.
    pub fn symmetric(group: AbelianGroup, gens: &[GroupElement]) -> Result<Self, CayleyError> {
        let mut elements = Vec::with_capacity(2 * gens.len());
        for g in gens {
            elements.push(g.clone());
            elements.push(group.negate(g));
        }
        ConnectionSet::new(group, elements)
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn valency(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.elements.binary_search(g).is_ok()
    }

    pub fn generates_group(&self) -> bool {
        self.group.generates(&self.elements)
    }

    /// Whether `S + z = S` for some nonzero `z`.
    pub fn has_translation_symmetry(&self) -> bool {
        self.group.elements().iter().any(|z| {
            !self.group.is_zero(z)
                && self.elements.iter().all(|s| self.contains(&self.group.add(s, z)))
        })
    }
}

impl fmt::Display for ConnectionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, s) in self.elements.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "}}")
    }
}

/// `Cay(G; S)`: one vertex per group element in lexicographic coordinate
/// order, `g ~ h` iff `g - h ∈ S`.
pub fn cayley_graph(s: &ConnectionSet) -> Graph {
    let group = &s.group;
    let elems = group.elements();
    let mut edges = Vec::with_capacity(elems.len() * s.valency() / 2);
    for (i, g) in elems.iter().enumerate() {
        for x in &s.elements {
            let j = group.index_of(&group.add(g, x));
            if i < j {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(elems.len(), edges).expect("Cayley graphs are simple")
}

/// `S + z` for an involution `z`, provided the result is again a
/// connection set.
pub fn shift_connection_set(s: &ConnectionSet, z: &GroupElement) -> Result<ConnectionSet, CayleyError> {
    let group = &s.group;
    if !group.contains(z) {
        return Err(GroupError::ForeignElement(z.to_string()).into());
    }
    if group.is_zero(z) || !group.is_zero(&group.add(z, z)) {
        return Err(CayleyError::InvalidShift(format!("{z} does not have order 2")));
    }
    let shifted: Vec<GroupElement> = s.elements.iter().map(|x| group.add(x, z)).collect();
    ConnectionSet::new(group.clone(), shifted).map_err(|e| match e {
        CayleyError::InvalidConnectionSet(msg) => CayleyError::InvalidShift(msg),
        other => other,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridKind {
    Qd,
    Tr,
}

impl fmt::Display for GridKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GridKind::Qd => "qd",
            GridKind::Tr => "tr",
        })
    }
}

impl FromStr for GridKind {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "qd" => Ok(GridKind::Qd),
            "tr" => Ok(GridKind::Tr),
            _ => Err(GraphError::InvalidParameter(format!(
                "grid kind must be qd or tr, got {s:?}"
            ))),
        }
    }
}

/// A grid `(kind, m, n, r)` with `m, n ≥ 2` and `0 ≤ r < n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GridParams {
    pub kind: GridKind,
    pub m: usize,
    pub n: usize,
    pub r: usize,
}

impl GridParams {
    /// `r` may be any integer; it is reduced mod `n`.
    pub fn new(kind: GridKind, m: i64, n: i64, r: i64) -> Result<Self, GraphError> {
        if m < 2 {
            return Err(GraphError::InvalidParameter(format!("m must be >= 2, got {m}")));
        }
        if n < 2 {
            return Err(GraphError::InvalidParameter(format!("n must be >= 2, got {n}")));
        }
        Ok(GridParams {
            kind,
            m: m as usize,
            n: n as usize,
            r: r.rem_euclid(n) as usize,
        })
    }

    pub fn qd(m: i64, n: i64, r: i64) -> Result<Self, GraphError> {
        GridParams::new(GridKind::Qd, m, n, r)
    }

    pub fn tr(m: i64, n: i64, r: i64) -> Result<Self, GraphError> {
        GridParams::new(GridKind::Tr, m, n, r)
    }

    pub fn vertex_count(&self) -> usize {
        self.m * self.n
    }

    /// The parameter triple naming the same graph by reflection:
    /// `r ↦ -r` for `Qd`, `r ↦ m - r` for `Tr`.
    pub fn partner(&self) -> GridParams {
        let (m, n, r) = (self.m as i64, self.n as i64, self.r as i64);
        let r2 = match self.kind {
            GridKind::Qd => -r,
            GridKind::Tr => m - r,
        };
        GridParams {
            r: r2.rem_euclid(n) as usize,
            ..*self
        }
    }

    pub fn graph(&self) -> Graph {
        match self.kind {
            GridKind::Qd => qd_direct(self),
            GridKind::Tr => tr_direct(self),
        }
        .expect("validated parameters")
    }
}

impl fmt::Display for GridParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{},{},{}", self.kind, self.m, self.n, self.r)
    }
}

impl FromStr for GridParams {
    type Err = GraphError;

    /// Parses `qd:m,n,r` or `tr:m,n,r`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GraphError::InvalidParameter(format!("expected kind:m,n,r, got {s:?}"));
        let (kind, rest) = s.trim().split_once(':').ok_or_else(bad)?;
        let kind: GridKind = kind.parse()?;
        let nums: Vec<i64> = rest
            .split(',')
            .map(|t| t.trim().parse::<i64>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad())?;
        let [m, n, r] = nums[..] else {
            return Err(bad());
        };
        GridParams::new(kind, m, n, r)
    }
}

fn grid_edges(p: &GridParams, diagonals: bool) -> Vec<(usize, usize)> {
    let (m, n, r) = (p.m, p.n, p.r);
    let v = |x: usize, y: usize| y * n + (x % n);
    let mut edges = Vec::new();
    for y in 0..m {
        for x in 0..n {
            edges.push((v(x, y), v(x + 1, y)));
            if y + 1 < m {
                edges.push((v(x, y), v(x, y + 1)));
            }
            if diagonals && y >= 1 {
                edges.push((v(x, y), v(x + 1, y - 1)));
            }
        }
    }
    for x in 0..n {
        edges.push((v(x, m - 1), v(x + r, 0)));
        if diagonals {
            edges.push((v(x + 1, m - 1), v(x + r, 0)));
        }
    }
    edges.retain(|&(a, b)| a != b);
    edges
}

/// `Qd(m,n,r)` with vertex `(x,y)` at index `y·n + x`.
pub fn qd_direct(p: &GridParams) -> Result<Graph, GraphError> {
    if p.kind != GridKind::Qd {
        return Err(GraphError::InvalidParameter(format!("{p} is not a qd grid")));
    }
    let p = GridParams::new(p.kind, p.m as i64, p.n as i64, p.r as i64)?;
    Graph::from_edges(p.vertex_count(), grid_edges(&p, false))
}

/// `Tr(m,n,r)`: `Qd(m,n,r)` plus the diagonals `(x,y) ~ (x+1,y-1)`.
pub fn tr_direct(p: &GridParams) -> Result<Graph, GraphError> {
    if p.kind != GridKind::Tr {
        return Err(GraphError::InvalidParameter(format!("{p} is not a tr grid")));
    }
    let p = GridParams::new(p.kind, p.m as i64, p.n as i64, p.r as i64)?;
    Graph::from_edges(p.vertex_count(), grid_edges(&p, true))
}

/// The group `⟨a, b | m·a = r'·b, n·b = 0⟩` underlying a grid, where
/// `r' = r` for `Qd` and `r' = -r` for `Tr`.
pub fn grid_group(p: &GridParams) -> Result<AbelianGroup, CayleyError> {
    let (m, n, r) = (p.m as i64, p.n as i64, p.r as i64);
    let r_prime = match p.kind {
        GridKind::Qd => r,
        GridKind::Tr => (-r).rem_euclid(n),
    };
    Ok(AbelianGroup::from_relations(2, &[vec![m, -r_prime], vec![0, n]])?)
}

/// Connection set whose Cayley graph is isomorphic to the grid:
/// `{±a, ±b}` for `Qd`, `{±a, ±b, ±(a+b)}` for `Tr`.
pub fn grid_to_cayley(p: &GridParams) -> Result<ConnectionSet, CayleyError> {
    let group = grid_group(p)?;
    let a = group.generator("a").expect("two generators").clone();
    let b = group.generator("b").expect("two generators").clone();
    let mut gens = vec![a.clone(), b.clone()];
    if p.kind == GridKind::Tr {
        gens.push(group.add(&a, &b));
    }
    ConnectionSet::symmetric(group, &gens)
}
