//! Simple undirected graphs on vertices `0..n`, stored as per-vertex bitsets.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("vertex {vertex} out of range for a graph on {order} vertices")]
    VertexOutOfRange { vertex: usize, order: usize },
    #[error("malformed graph6: {0}")]
    MalformedGraph6(String),
    #[error("vertex labels: {0}")]
    Labels(String),
}

#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    words: usize,
    bits: Vec<u64>,
    adj: Vec<Vec<u32>>,
    labels: Option<Vec<String>>,
}

/// Connectivity and 2-colouring summary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructuralFlags {
    pub connected: bool,
    pub bipartite: bool,
    /// Colour per vertex (vertex 0 gets colour 0), present iff bipartite.
    pub bipartition: Option<Vec<u8>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StandardKind {
    Cycle,
    Path,
    Complete,
    MoebiusLadder,
}

impl Graph {
    /// Builds a graph from an edge list. Repeated edges collapse.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let words = n.div_ceil(64).max(1);
        let mut bits = vec![0u64; n * words];
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: w, order: n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            bits[u * words + v / 64] |= 1 << (v % 64);
            bits[v * words + u / 64] |= 1 << (u % 64);
        }
        Ok(Self::from_bits(n, words, bits))
    }

    fn from_bits(n: usize, words: usize, bits: Vec<u64>) -> Self {
        let adj = (0..n)
            .map(|u| {
                let row = &bits[u * words..(u + 1) * words];
                let mut out = Vec::new();
                for (w, &word) in row.iter().enumerate() {
                    let mut x = word;
                    while x != 0 {
                        let b = x.trailing_zeros() as usize;
                        out.push((w * 64 + b) as u32);
                        x &= x - 1;
                    }
                }
                out
            })
            .collect();
        Self {
            n,
            words,
            bits,
            adj,
            labels: None,
        }
    }

    pub fn empty(n: usize) -> Self {
        Self::from_edges(n, std::iter::empty()).expect("no edges")
    }

    /// Attaches traceability labels; they must be distinct, one per vertex.
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, GraphError> {
        if labels.len() != self.n {
            return Err(GraphError::Labels(format!(
                "expected {} labels, got {}",
                self.n,
                labels.len()
            )));
        }
        let mut sorted = labels.clone();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(GraphError::Labels("labels are not distinct".into()));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.bits[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    #[inline]
    pub fn neighbors(&self, u: usize) -> &[u32] {
        &self.adj[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].len()
    }

    /// Bitset row of `u`.
    pub fn row(&self, u: usize) -> &[u64] {
        &self.bits[u * self.words..(u + 1) * self.words]
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| {
            self.adj[u]
                .iter()
                .map(move |&v| (u, v as usize))
                .filter(|&(u, v)| u < v)
        })
    }

    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.adj.first().map_or(0, Vec::len);
        self.adj.iter().all(|a| a.len() == d).then_some(d)
    }

    /// Graph with vertex `v` renamed to `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n);
        Self::from_edges(self.n, self.edges().map(|(u, v)| (perm[u], perm[v])))
            .expect("relabelling preserves simplicity")
    }

    /// Does `perm` map edges to edges (and hence, being a bijection with the
    /// same edge count, non-edges to non-edges)?
    pub fn is_automorphism(&self, perm: &[usize]) -> bool {
        self.is_isomorphism_to(self, perm)
    }

    /// Does `perm` carry `self` onto `other` exactly?
    pub fn is_isomorphism_to(&self, other: &Graph, perm: &[usize]) -> bool {
        if perm.len() != self.n || other.n != self.n || other.edge_count() != self.edge_count() {
            return false;
        }
        let mut seen = vec![false; self.n];
        for &p in perm {
            if p >= self.n || seen[p] {
                return false;
            }
            seen[p] = true;
        }
        self.edges().all(|(u, v)| other.has_edge(perm[u], perm[v]))
    }

    /// Breadth-first distances from `source`; `usize::MAX` when unreachable.
    pub fn distances_from(&self, source: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n];
        let mut queue = VecDeque::new();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            for &v in &self.adj[u] {
                let v = v as usize;
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn structural_flags(&self) -> StructuralFlags {
        let mut color: Vec<Option<u8>> = vec![None; self.n];
        let mut connected = true;
        let mut bipartite = true;
        for start in 0..self.n {
            if color[start].is_some() {
                continue;
            }
            if start > 0 {
                connected = false;
            }
            color[start] = Some(0);
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                let cu = color[u].unwrap();
                for &v in &self.adj[u] {
                    let v = v as usize;
                    match color[v] {
                        None => {
                            color[v] = Some(1 - cu);
                            queue.push_back(v);
                        }
                        Some(cv) if cv == cu => bipartite = false,
                        Some(_) => {}
                    }
                }
            }
        }
        StructuralFlags {
            connected,
            bipartite,
            bipartition: bipartite.then(|| color.into_iter().map(|c| c.unwrap()).collect()),
        }
    }

    /// Some pair of distinct vertices with identical open neighbourhoods.
    pub fn twin_pair(&self) -> Option<(usize, usize)> {
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by(|&u, &v| self.row(u).cmp(self.row(v)).then(u.cmp(&v)));
        order
            .windows(2)
            .find(|w| self.row(w[0]) == self.row(w[1]))
            .map(|w| (w[0].min(w[1]), w[0].max(w[1])))
    }

    /// Canonical bipartite double cover: `(v, i)` is vertex `v + i·n` and
    /// `(v,0) ~ (w,1)` iff `v ~ w`.
    pub fn double_cover(&self) -> Self {
        let n = self.n;
        let g = Self::from_edges(
            2 * n,
            self.edges().flat_map(|(u, v)| [(u, v + n), (v, u + n)]),
        )
        .expect("cover of a simple graph is simple");
        match &self.labels {
            Some(l) => {
                let labels = (0..2)
                    .flat_map(|i| l.iter().map(move |s| format!("({s},{i})")))
                    .collect();
                g.with_labels(labels).expect("distinct")
            }
            None => g,
        }
    }

    /// Cartesian product; `(x, y)` is vertex `x·|V(Y)| + y`.
    pub fn cartesian_product(&self, other: &Graph) -> Self {
        let ny = other.n;
        let idx = |x: usize, y: usize| x * ny + y;
        let mut edges = Vec::new();
        for x in 0..self.n {
            for (y1, y2) in other.edges() {
                edges.push((idx(x, y1), idx(x, y2)));
            }
        }
        for (x1, x2) in self.edges() {
            for y in 0..ny {
                edges.push((idx(x1, y), idx(x2, y)));
            }
        }
        Self::from_edges(self.n * ny, edges).expect("product of simple graphs is simple")
    }

    pub fn standard(kind: StandardKind, n: usize) -> Result<Self, GraphError> {
        match kind {
            StandardKind::Cycle => match n {
                0 | 1 => Err(GraphError::InvalidParameter(format!(
                    "cycle needs n >= 2, got {n}"
                ))),
                // C_2 is K_2
                2 => Self::from_edges(2, [(0, 1)]),
                _ => Self::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))),
            },
            StandardKind::Path => {
                if n == 0 {
                    return Err(GraphError::InvalidParameter("path needs n >= 1".into()));
                }
                Self::from_edges(n, (1..n).map(|i| (i - 1, i)))
            }
            StandardKind::Complete => {
                if n == 0 {
                    return Err(GraphError::InvalidParameter("complete graph needs n >= 1".into()));
                }
                Self::from_edges(n, (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))))
            }
            StandardKind::MoebiusLadder => {
                if n < 4 || n % 2 == 1 {
                    return Err(GraphError::InvalidParameter(format!(
                        "Moebius ladder needs an even vertex count >= 4, got {n}"
                    )));
                }
                Self::from_edges(
                    n,
                    (0..n).flat_map(|i| [(i, (i + 1) % n), (i, (i + n / 2) % n)]),
                )
            }
        }
    }

    pub fn cycle(n: usize) -> Result<Self, GraphError> {
        Self::standard(StandardKind::Cycle, n)
    }

    pub fn path(n: usize) -> Result<Self, GraphError> {
        Self::standard(StandardKind::Path, n)
    }

    pub fn complete(n: usize) -> Result<Self, GraphError> {
        Self::standard(StandardKind::Complete, n)
    }

    pub fn moebius_ladder(n: usize) -> Result<Self, GraphError> {
        Self::standard(StandardKind::MoebiusLadder, n)
    }

    /// Complete bipartite graph with parts `0..p` and `p..p+q`.
    pub fn complete_bipartite(p: usize, q: usize) -> Self {
        Self::from_edges(p + q, (0..p).flat_map(|i| (p..p + q).map(move |j| (i, j))))
            .expect("simple")
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("vertices", &self.n)
            .field("edges", &self.edge_count())
            .field("graph6", &String::from_utf8_lossy(&crate::graph6::encode(self)))
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odd_cycle_doubles_to_one_even_cycle() {
        let c6 = Graph::cycle(3).unwrap().double_cover();
        assert_eq!(c6.vertex_count(), 6);
        assert_eq!(c6.regular_degree(), Some(2));
        let f = c6.structural_flags();
        assert!(f.connected && f.bipartite);
    }

    #[test]
    fn bipartite_input_gives_two_copies() {
        let c4 = Graph::cycle(4).unwrap();
        let b = c4.double_cover();
        assert_eq!(b.edge_count(), 8);
        let f = b.structural_flags();
        assert!(!f.connected && f.bipartite);
        // component of vertex 0 is a 4-cycle
        let d = b.distances_from(0);
        assert_eq!(d.iter().filter(|&&x| x != usize::MAX).count(), 4);
    }

    #[test]
    fn product_edge_counts() {
        let k2 = Graph::complete(2).unwrap();
        let sq = k2.cartesian_product(&k2);
        assert_eq!((sq.vertex_count(), sq.edge_count()), (4, 4));
        assert_eq!(sq.regular_degree(), Some(2));
        let cube = Graph::cycle(4).unwrap().cartesian_product(&k2);
        assert_eq!((cube.vertex_count(), cube.edge_count()), (8, 12));
        let t = Graph::cycle(6).unwrap().cartesian_product(&Graph::cycle(3).unwrap());
        assert_eq!((t.vertex_count(), t.edge_count()), (18, 36));
        assert_eq!(t.regular_degree(), Some(4));
    }

    #[test]
    fn standard_graphs() {
        assert_eq!(Graph::complete(4).unwrap().edge_count(), 6);
        assert_eq!(Graph::moebius_ladder(4).unwrap(), Graph::complete(4).unwrap());
        assert_eq!(Graph::cycle(2).unwrap(), Graph::complete(2).unwrap());
        assert!(Graph::cycle(1).is_err());
        assert!(Graph::moebius_ladder(5).is_err());
        assert!(Graph::moebius_ladder(2).is_err());
        assert_eq!(Graph::path(4).unwrap().edge_count(), 3);
        assert_eq!(Graph::moebius_ladder(6).unwrap().regular_degree(), Some(3));
    }

    #[test]
    fn flags() {
        let c5 = Graph::cycle(5).unwrap().structural_flags();
        assert!(c5.connected && !c5.bipartite && c5.bipartition.is_none());
        let c4 = Graph::cycle(4).unwrap().structural_flags();
        assert!(c4.connected && c4.bipartite);
        assert_eq!(c4.bipartition, Some(vec![0, 1, 0, 1]));
    }

    #[test]
    fn twins() {
        let k23 = Graph::complete_bipartite(2, 3);
        let (u, v) = k23.twin_pair().unwrap();
        assert_ne!(u, v);
        assert_eq!(k23.row(u), k23.row(v));
        assert!(Graph::cycle(5).unwrap().twin_pair().is_none());
    }

    #[test]
    fn cover_degrees_match() {
        let x = Graph::moebius_ladder(8).unwrap().cartesian_product(&Graph::path(3).unwrap());
        let b = x.double_cover();
        assert_eq!(b.edge_count(), 2 * x.edge_count());
        for v in 0..x.vertex_count() {
            assert_eq!(b.degree(v), x.degree(v));
            assert_eq!(b.degree(v + x.vertex_count()), x.degree(v));
        }
    }

    #[test]
    fn rejects_loops_and_bad_labels() {
        assert_eq!(Graph::from_edges(3, [(1, 1)]), Err(GraphError::SelfLoop(1)));
        assert!(matches!(
            Graph::from_edges(3, [(0, 3)]),
            Err(GraphError::VertexOutOfRange { .. })
        ));
        let g = Graph::path(2).unwrap();
        assert!(g.clone().with_labels(vec!["x".into(), "x".into()]).is_err());
        let g = g.with_labels(vec!["p".into(), "q".into()]).unwrap();
        assert_eq!(g.double_cover().labels().unwrap()[3], "(q,1)");
    }

    #[test]
    fn relabel_round_trip() {
        let g = Graph::path(4).unwrap();
        let p = [2, 0, 3, 1];
        let h = g.relabel(&p);
        assert!(g.is_isomorphism_to(&h, &p));
        assert!(!g.is_automorphism(&p));
        assert!(g.is_automorphism(&[3, 2, 1, 0]));
    }
}
