//! Automorphism groups, canonical forms and isomorphism testing.
//!
//! The engine is an individualization-refinement search over ordered
//! partitions, refined to equitable partitions by neighbour counts. The
//! group order comes from Schreier–Sims on the generators found.

mod partition;
mod perm;
mod search;

use std::cell::Cell;

use num_bigint::BigUint;
use thiserror::Error;

use crate::graph::Graph;
use crate::graph6;

pub use partition::{equitable_refinement, is_equitable};
pub use perm::{orbit_representatives, Perm, PermutationGroup, UnionFind};

pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;
pub const DEFAULT_MAX_VERTICES: usize = 512;
pub const NODE_BUDGET_ENV: &str = "GRIDSTAB_NODE_BUDGET";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutError {
    #[error("search limit exceeded: node budget {budget} exhausted")]
    SearchLimitExceeded { budget: u64 },
    #[error("graph has {vertices} vertices, engine limit is {limit}")]
    TooLarge { vertices: usize, limit: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineConfig {
    pub node_budget: u64,
    pub max_vertices: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            node_budget: DEFAULT_NODE_BUDGET,
            max_vertices: DEFAULT_MAX_VERTICES,
        }
    }
}

impl EngineConfig {
    /// Defaults, with the node budget overridden by `GRIDSTAB_NODE_BUDGET`
    /// when it holds a positive integer.
    pub fn from_env() -> Self {
        let mut cfg = EngineConfig::default();
        if let Some(b) = std::env::var(NODE_BUDGET_ENV)
            .ok()
            .and_then(|s| s.trim().parse::<u64>().ok())
            .filter(|&b| b > 0)
        {
            cfg.node_budget = b;
        }
        cfg
    }

    fn check(&self, g: &Graph) -> Result<(), AutError> {
        if g.vertex_count() > self.max_vertices {
            return Err(AutError::TooLarge {
                vertices: g.vertex_count(),
                limit: self.max_vertices,
            });
        }
        Ok(())
    }
}

thread_local! {
    static ENGINE_CALLS: Cell<u64> = const { Cell::new(0) };
}

/// Number of engine invocations made on the current thread.
pub fn engine_calls() -> u64 {
    ENGINE_CALLS.with(|c| c.get())
}

fn count_call() {
    ENGINE_CALLS.with(|c| c.set(c.get() + 1));
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalForm {
    /// `canonical_labeling[v]` is the new label of vertex `v`.
    pub canonical_labeling: Vec<usize>,
    pub certificate: Vec<u8>,
}

fn group_of<'g>(
    g: &'g Graph,
    cfg: &EngineConfig,
) -> Result<(PermutationGroup, search::Engine<'g>), AutError> {
    cfg.check(g)?;
    count_call();
    let n = g.vertex_count();
    let mut engine = search::Engine::new(g, cfg.node_budget);
    if n == 0 {
        return Ok((PermutationGroup::new(0, Vec::new(), &[]), engine));
    }
    let (gens, base) = engine.automorphisms()?;
    for gamma in &gens {
        assert!(
            g.is_automorphism(&gamma.images()),
            "search produced a non-automorphism"
        );
    }
    let gens = if gens.is_empty() {
        vec![Perm::identity(n)]
    } else {
        gens
    };
    Ok((PermutationGroup::new(n, gens, &base), engine))
}

pub fn automorphism_group(g: &Graph) -> Result<PermutationGroup, AutError> {
    automorphism_group_with(g, &EngineConfig::from_env())
}

pub fn automorphism_group_with(g: &Graph, cfg: &EngineConfig) -> Result<PermutationGroup, AutError> {
    group_of(g, cfg).map(|(group, _)| group)
}

/// Convenience: the exact order of `Aut g`.
pub fn automorphism_group_order(g: &Graph, cfg: &EngineConfig) -> Result<BigUint, AutError> {
    automorphism_group_with(g, cfg).map(|grp| grp.order().clone())
}

pub fn canonical_form(g: &Graph) -> Result<CanonicalForm, AutError> {
    canonical_form_with(g, &EngineConfig::from_env())
}

pub fn canonical_form_with(g: &Graph, cfg: &EngineConfig) -> Result<CanonicalForm, AutError> {
    let (group, mut engine) = group_of(g, cfg)?;
    let n = g.vertex_count();
    let leaf = if n == 0 {
        Vec::new()
    } else {
        engine.canonical_leaf(&group)?
    };
    let mut labeling = vec![0usize; n];
    for (p, &v) in leaf.iter().enumerate() {
        labeling[v as usize] = p;
    }
    let relabeled = g.relabel(&labeling);
    Ok(CanonicalForm {
        certificate: graph6::encode(&relabeled),
        canonical_labeling: labeling,
    })
}

pub fn are_isomorphic(x: &Graph, y: &Graph) -> Result<bool, AutError> {
    isomorphism(x, y).map(|w| w.is_some())
}

/// A vertex bijection `f` with `u ~ v` in `x` iff `f[u] ~ f[v]` in `y`, if
/// one exists.
pub fn isomorphism(x: &Graph, y: &Graph) -> Result<Option<Vec<usize>>, AutError> {
    isomorphism_with(x, y, &EngineConfig::from_env())
}

pub fn isomorphism_with(
    x: &Graph,
    y: &Graph,
    cfg: &EngineConfig,
) -> Result<Option<Vec<usize>>, AutError> {
    if x.vertex_count() != y.vertex_count() || x.edge_count() != y.edge_count() {
        return Ok(None);
    }
    let mut dx: Vec<usize> = (0..x.vertex_count()).map(|v| x.degree(v)).collect();
    let mut dy: Vec<usize> = (0..y.vertex_count()).map(|v| y.degree(v)).collect();
    dx.sort_unstable();
    dy.sort_unstable();
    if dx != dy {
        return Ok(None);
    }
    let cx = canonical_form_with(x, cfg)?;
    let cy = canonical_form_with(y, cfg)?;
    if cx.certificate != cy.certificate {
        return Ok(None);
    }
    let mut from_label = vec![0usize; y.vertex_count()];
    for (v, &p) in cy.canonical_labeling.iter().enumerate() {
        from_label[p] = v;
    }
    let witness: Vec<usize> = cx
        .canonical_labeling
        .iter()
        .map(|&p| from_label[p])
        .collect();
    debug_assert!(x.is_isomorphism_to(y, &witness));
    Ok(Some(witness))
}
