//! Ordered partitions and 1-dimensional equitable refinement.

use std::collections::hash_map::DefaultHasher;
use std::collections::VecDeque;
use std::hash::{Hash, Hasher};

use crate::graph::Graph;

/// An ordered partition of `0..n`. Cells are contiguous runs of `elems`,
/// identified by their start position.
#[derive(Debug, Clone)]
pub(crate) struct Partition {
    pub elems: Vec<u32>,
    pos: Vec<u32>,
    cell_of: Vec<u32>,
    /// Indexed by cell start; meaningless at other positions.
    len: Vec<u32>,
    cells: usize,
}

/// Scratch buffers reused across refinements.
#[derive(Debug, Default)]
pub(crate) struct Scratch {
    counts: Vec<u32>,
    touched: Vec<u32>,
    in_queue: Vec<bool>,
    queue: VecDeque<usize>,
    members: Vec<(u32, u32)>,
    touched_cells: Vec<u32>,
}

impl Scratch {
    pub fn new(n: usize) -> Self {
        Scratch {
            counts: vec![0; n],
            touched: Vec::new(),
            in_queue: vec![false; n],
            queue: VecDeque::new(),
            members: Vec::new(),
            touched_cells: Vec::new(),
        }
    }
}

impl Partition {
    /// Builds the partition from cells given in order.
    pub fn from_cells(n: usize, cells: &[Vec<usize>]) -> Self {
        let mut p = Partition {
            elems: Vec::with_capacity(n),
            pos: vec![0; n],
            cell_of: vec![0; n],
            len: vec![0; n],
            cells: 0,
        };
        for cell in cells {
            if cell.is_empty() {
                continue;
            }
            let start = p.elems.len() as u32;
            for &v in cell {
                p.pos[v] = p.elems.len() as u32;
                p.cell_of[v] = start;
                p.elems.push(v as u32);
            }
            p.len[start as usize] = cell.len() as u32;
            p.cells += 1;
        }
        assert_eq!(p.elems.len(), n, "cells must cover every vertex exactly once");
        p
    }

    pub fn unit(n: usize) -> Self {
        if n == 0 {
            return Partition::from_cells(0, &[]);
        }
        Partition::from_cells(n, &[(0..n).collect()])
    }

    pub fn is_discrete(&self) -> bool {
        self.cells == self.elems.len()
    }

    pub fn cell_starts(&self) -> Vec<usize> {
        let mut starts = Vec::with_capacity(self.cells);
        let mut s = 0;
        while s < self.elems.len() {
            starts.push(s);
            s += self.len[s] as usize;
        }
        starts
    }

    pub fn cell(&self, start: usize) -> &[u32] {
        &self.elems[start..start + self.len[start] as usize]
    }

    pub fn cells(&self) -> Vec<Vec<usize>> {
        self.cell_starts()
            .into_iter()
            .map(|s| self.cell(s).iter().map(|&v| v as usize).collect())
            .collect()
    }

    /// First smallest non-singleton cell.
    pub fn target_cell(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        let mut s = 0;
        while s < self.elems.len() {
            let l = self.len[s];
            if l > 1 && best.is_none_or(|b| l < self.len[b]) {
                best = Some(s);
                if l == 2 {
                    break;
                }
            }
            s += l as usize;
        }
        best
    }

    /// Moves `v` to the front of its cell and splits it off. Returns the
    /// start of the new singleton cell.
    pub fn individualize(&mut self, v: usize) -> usize {
        let start = self.cell_of[v] as usize;
        let l = self.len[start] as usize;
        debug_assert!(l > 1);
        let p = self.pos[v] as usize;
        let other = self.elems[start];
        self.elems.swap(start, p);
        self.pos[other as usize] = p as u32;
        self.pos[v] = start as u32;
        self.len[start] = 1;
        self.len[start + 1] = (l - 1) as u32;
        for i in start + 1..start + l {
            self.cell_of[self.elems[i] as usize] = (start + 1) as u32;
        }
        self.cells += 1;
        start
    }

    /// Refines to the coarsest equitable partition below the current one,
    /// using `splitters` as the initial queue. Every split appends a token to
    /// `trace`; tokens depend only on isomorphism-invariant data.
    pub fn refine(
        &mut self,
        g: &Graph,
        splitters: &[usize],
        scratch: &mut Scratch,
        trace: &mut Vec<u64>,
    ) {
        let Scratch {
            counts,
            touched,
            in_queue,
            queue,
            members,
            touched_cells,
        } = scratch;
        for &s in splitters {
            if !in_queue[s] {
                in_queue[s] = true;
                queue.push_back(s);
            }
        }
        while let Some(w) = queue.pop_front() {
            in_queue[w] = false;
            if self.is_discrete() {
                continue;
            }
            let wl = self.len[w] as usize;
            for i in w..w + wl {
                let u = self.elems[i] as usize;
                for &x in g.neighbors(u) {
                    if counts[x as usize] == 0 {
                        touched.push(x);
                    }
                    counts[x as usize] += 1;
                }
            }
            touched_cells.clear();
            for &x in touched.iter() {
                touched_cells.push(self.cell_of[x as usize]);
            }
            touched_cells.sort_unstable();
            touched_cells.dedup();
            for &c in touched_cells.iter() {
                let c = c as usize;
                let cl = self.len[c] as usize;
                if cl == 1 {
                    continue;
                }
                let first = counts[self.elems[c] as usize];
                if self.elems[c..c + cl]
                    .iter()
                    .all(|&x| counts[x as usize] == first)
                {
                    continue;
                }
                members.clear();
                members.extend(
                    self.elems[c..c + cl]
                        .iter()
                        .map(|&x| (counts[x as usize], x)),
                );
                members.sort_unstable();
                let mut h = DefaultHasher::new();
                (c, cl).hash(&mut h);
                let mut starts: Vec<(usize, usize)> = Vec::new();
                let mut run_start = 0;
                for i in 0..cl {
                    let (cnt, x) = members[i];
                    self.elems[c + i] = x;
                    self.pos[x as usize] = (c + i) as u32;
                    if i + 1 == cl || members[i + 1].0 != cnt {
                        starts.push((c + run_start, i + 1 - run_start));
                        (cnt, i + 1 - run_start).hash(&mut h);
                        run_start = i + 1;
                    }
                }
                trace.push(h.finish());
                for &(s, l) in &starts {
                    self.len[s] = l as u32;
                    for i in s..s + l {
                        self.cell_of[self.elems[i] as usize] = s as u32;
                    }
                }
                self.cells += starts.len() - 1;
                if in_queue[c] {
                    for &(s, _) in &starts[1..] {
                        in_queue[s] = true;
                        queue.push_back(s);
                    }
                } else {
                    let mut largest = 0;
                    for (i, &(_, l)) in starts.iter().enumerate() {
                        if l > starts[largest].1 {
                            largest = i;
                        }
                    }
                    for (i, &(s, _)) in starts.iter().enumerate() {
                        if i != largest {
                            in_queue[s] = true;
                            queue.push_back(s);
                        }
                    }
                }
            }
            for &x in touched.iter() {
                counts[x as usize] = 0;
            }
            touched.clear();
        }
        trace.push(self.cells as u64);
    }

    /// Refines treating every cell as a splitter.
    pub fn refine_all(&mut self, g: &Graph, scratch: &mut Scratch, trace: &mut Vec<u64>) {
        let starts = self.cell_starts();
        self.refine(g, &starts, scratch, trace);
    }
}

/// Coarsest equitable partition refining `coloring`, cells in refinement
/// order.
pub fn equitable_refinement(g: &Graph, coloring: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = g.vertex_count();
    let mut p = Partition::from_cells(n, coloring);
    let mut scratch = Scratch::new(n);
    let mut trace = Vec::new();
    p.refine_all(g, &mut scratch, &mut trace);
    p.cells()
}

/// Whether every vertex of each cell has the same number of neighbours in
/// every cell.
pub fn is_equitable(g: &Graph, cells: &[Vec<usize>]) -> bool {
    let n = g.vertex_count();
    let mut cell_of = vec![0usize; n];
    for (i, c) in cells.iter().enumerate() {
        for &v in c {
            cell_of[v] = i;
        }
    }
    let profile = |v: usize| {
        let mut counts = vec![0usize; cells.len()];
        for &u in g.neighbors(v) {
            counts[cell_of[u as usize]] += 1;
        }
        counts
    };
    cells.iter().all(|c| {
        let p0 = profile(c[0]);
        c.iter().all(|&v| profile(v) == p0)
    })
}
