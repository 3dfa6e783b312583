//! Individualization-refinement search tree.

use std::cmp::Ordering;

use super::partition::{Partition, Scratch};
use super::perm::{orbit_representatives, Perm, PermutationGroup, UnionFind};
use super::AutError;
use crate::graph::Graph;

struct PathNode {
    part: Partition,
    cell: Vec<usize>,
    chosen: usize,
}

pub(crate) struct Engine<'g> {
    g: &'g Graph,
    n: usize,
    budget: u64,
    nodes: u64,
    scratch: Scratch,
    root: Option<Partition>,
    path: Vec<PathNode>,
    /// `traces[0]` is the root trace, `traces[d + 1]` the trace after
    /// individualizing at depth `d` on the first path.
    traces: Vec<Vec<u64>>,
    leaf: Vec<u32>,
}

struct Best {
    traces: Vec<Vec<u64>>,
    cert: Vec<u64>,
    leaf: Vec<u32>,
}

impl<'g> Engine<'g> {
    pub fn new(g: &'g Graph, budget: u64) -> Self {
        let n = g.vertex_count();
        Engine {
            g,
            n,
            budget,
            nodes: 0,
            scratch: Scratch::new(n),
            root: None,
            path: Vec::new(),
            traces: Vec::new(),
            leaf: Vec::new(),
        }
    }

    fn tick(&mut self) -> Result<(), AutError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(AutError::SearchLimitExceeded {
                budget: self.budget,
            });
        }
        Ok(())
    }

    fn child(&mut self, part: &Partition, v: usize) -> Result<(Partition, Vec<u64>), AutError> {
        self.tick()?;
        let mut child = part.clone();
        let s = child.individualize(v);
        let mut trace = Vec::new();
        child.refine(self.g, &[s], &mut self.scratch, &mut trace);
        Ok((child, trace))
    }

    fn target(part: &Partition) -> Vec<usize> {
        let t = part.target_cell().expect("non-discrete partition has a target");
        let mut cell: Vec<usize> = part.cell(t).iter().map(|&v| v as usize).collect();
        cell.sort_unstable();
        cell
    }

    /// Computes generators of the automorphism group together with a base
    /// (the first-path vertices).
    pub fn automorphisms(&mut self) -> Result<(Vec<Perm>, Vec<usize>), AutError> {
        self.tick()?;
        let mut part = Partition::unit(self.n);
        let mut trace = Vec::new();
        part.refine_all(self.g, &mut self.scratch, &mut trace);
        self.root = Some(part.clone());
        self.traces = vec![trace];
        self.path.clear();
        while !part.is_discrete() {
            let cell = Self::target(&part);
            let chosen = cell[0];
            let (child, trace) = self.child(&part, chosen)?;
            self.path.push(PathNode { part, cell, chosen });
            self.traces.push(trace);
            part = child;
        }
        self.leaf = part.elems.clone();

        let mut gens: Vec<Perm> = Vec::new();
        let mut uf = UnionFind::new(self.n);
        for d in (0..self.path.len()).rev() {
            let chosen = self.path[d].chosen;
            let cell = self.path[d].cell.clone();
            let mut tried = vec![chosen];
            for &w in &cell {
                if w == chosen {
                    continue;
                }
                let rw = uf.find(w);
                if tried.iter().any(|&t| uf.find(t) == rw) {
                    continue;
                }
                tried.push(w);
                let part = self.path[d].part.clone();
                let (child, trace) = self.child(&part, w)?;
                if trace != self.traces[d + 1] {
                    continue;
                }
                if let Some(gamma) = self.equivalent_leaf(child, d + 1)? {
                    for x in 0..self.n {
                        uf.union(x, gamma.apply(x));
                    }
                    gens.push(gamma);
                }
            }
        }
        let base = self.path.iter().map(|p| p.chosen).collect();
        Ok((gens, base))
    }

    /// Looks for a leaf below `part` (at `depth`) that yields an
    /// automorphism when matched against the first leaf.
    fn equivalent_leaf(&mut self, part: Partition, depth: usize) -> Result<Option<Perm>, AutError> {
        if part.is_discrete() {
            let mut images = vec![0usize; self.n];
            for (p, &v) in self.leaf.iter().enumerate() {
                images[v as usize] = part.elems[p] as usize;
            }
            if self.g.is_automorphism(&images) {
                return Ok(Some(Perm::from_images(&images)));
            }
            return Ok(None);
        }
        if depth + 1 >= self.traces.len() {
            return Ok(None);
        }
        for w in Self::target(&part) {
            let (child, trace) = self.child(&part, w)?;
            if trace != self.traces[depth + 1] {
                continue;
            }
            if let Some(gamma) = self.equivalent_leaf(child, depth + 1)? {
                return Ok(Some(gamma));
            }
        }
        Ok(None)
    }

    fn certificate(&self, leaf: &[u32]) -> Vec<u64> {
        let words = self.n.div_ceil(64);
        let mut lab = vec![0usize; self.n];
        for (p, &v) in leaf.iter().enumerate() {
            lab[v as usize] = p;
        }
        let mut cert = vec![0u64; self.n * words];
        for (p, &v) in leaf.iter().enumerate() {
            for &u in self.g.neighbors(v as usize) {
                let q = lab[u as usize];
                // most significant bit first so that lexicographic word order
                // matches lexicographic bit order
                cert[p * words + q / 64] |= 1u64 << (63 - q % 64);
            }
        }
        cert
    }

    /// Canonical leaf: the maximum over the search tree of
    /// (trace sequence, relabeled adjacency), with subtrees pruned by the
    /// automorphism group. Must run after [`Engine::automorphisms`].
    pub fn canonical_leaf(&mut self, group: &PermutationGroup) -> Result<Vec<u32>, AutError> {
        let root = self.root.clone().expect("automorphisms computed first");
        let strong = group.strong_generating_set().to_vec();
        let mut best: Option<Best> = None;
        let mut traces = vec![self.traces[0].clone()];
        let mut prefix = Vec::new();
        self.canon_dfs(root, &mut traces, &mut prefix, &strong, &mut best)?;
        Ok(best.expect("search visits at least one leaf").leaf)
    }

    fn canon_dfs(
        &mut self,
        part: Partition,
        traces: &mut Vec<Vec<u64>>,
        prefix: &mut Vec<usize>,
        strong: &[Perm],
        best: &mut Option<Best>,
    ) -> Result<(), AutError> {
        if part.is_discrete() {
            let cert = self.certificate(&part.elems);
            let replace = match &*best {
                None => true,
                Some(b) => match compare_traces(traces, &b.traces) {
                    Ordering::Greater => true,
                    Ordering::Equal => cert > b.cert,
                    Ordering::Less => false,
                },
            };
            if replace {
                *best = Some(Best {
                    traces: traces.clone(),
                    cert,
                    leaf: part.elems.clone(),
                });
            }
            return Ok(());
        }
        let fixing: Vec<&Perm> = strong
            .iter()
            .filter(|s| prefix.iter().all(|&b| s.apply(b) == b))
            .collect();
        let reps = orbit_representatives(self.n, fixing.into_iter());
        for w in Self::target(&part) {
            if reps[w] != w {
                continue;
            }
            let (child, trace) = self.child(&part, w)?;
            traces.push(trace);
            let behind = best
                .as_ref()
                .is_some_and(|b| compare_traces(traces, &b.traces) == Ordering::Less);
            if !behind {
                prefix.push(w);
                self.canon_dfs(child, traces, prefix, strong, best)?;
                prefix.pop();
            }
            traces.pop();
        }
        Ok(())
    }
}

/// Compares a (possibly partial) trace sequence with a complete one over
/// their common depth; a missing level on the right counts as smaller.
fn compare_traces(ours: &[Vec<u64>], theirs: &[Vec<u64>]) -> Ordering {
    for (i, t) in ours.iter().enumerate() {
        match theirs.get(i) {
            None => return Ordering::Greater,
            Some(b) => match t.cmp(b) {
                Ordering::Equal => {}
                o => return o,
            },
        }
    }
    Ordering::Equal
}
