//! Undirected label graphs and the sampling procedures built on them:
//! uniform spanning trees (Wilson's algorithm), random connected partitions
//! obtained by cutting tree edges, and the per-iteration variable random
//! partition.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::StructureError;
use crate::partition::{Partition, RandomPartition};

/// Simple undirected graph over vertices `0..num_vertices`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphRepr", into = "GraphRepr")]
pub struct Graph {
    num_vertices: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    num_vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl TryFrom<GraphRepr> for Graph {
    type Error = StructureError;

    fn try_from(r: GraphRepr) -> Result<Self, Self::Error> {
        Graph::new(r.num_vertices, r.edges)
    }
}

impl From<Graph> for GraphRepr {
    fn from(g: Graph) -> Self {
        GraphRepr {
            num_vertices: g.num_vertices,
            edges: g.edges,
        }
    }
}

impl Graph {
    /// Builds a graph; duplicate edges are merged, self-loops rejected.
    pub fn new<I>(num_vertices: usize, edges: I) -> Result<Self, StructureError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if num_vertices == 0 {
            return Err(StructureError::EmptyGraph);
        }
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            for x in [u, v] {
                if x >= num_vertices {
                    return Err(StructureError::VertexOutOfRange {
                        vertex: x,
                        num_vertices,
                    });
                }
            }
            if u == v {
                return Err(StructureError::SelfLoop(u));
            }
            set.insert((u.min(v), u.max(v)));
        }
        let edges: Vec<_> = set.into_iter().collect();
        let mut adjacency = vec![Vec::new(); num_vertices];
        for &(u, v) in &edges {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        Ok(Graph {
            num_vertices,
            edges,
            adjacency,
        })
    }

    pub fn path(k: usize) -> Result<Self, StructureError> {
        Graph::new(k, (1..k).map(|i| (i - 1, i)))
    }

    pub fn cycle(k: usize) -> Result<Self, StructureError> {
        if k < 3 {
            return Graph::path(k);
        }
        Graph::new(k, (0..k).map(|i| (i, (i + 1) % k)))
    }

    pub fn complete(k: usize) -> Result<Self, StructureError> {
        Graph::new(k, (0..k).flat_map(|u| (u + 1..k).map(move |v| (u, v))))
    }

    /// 4-neighbour grid; vertex `r * cols + c`.
    pub fn grid(rows: usize, cols: usize) -> Result<Self, StructureError> {
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let v = r * cols + c;
                if c + 1 < cols {
                    edges.push((v, v + 1));
                }
                if r + 1 < rows {
                    edges.push((v, v + cols));
                }
            }
        }
        Graph::new(rows * cols, edges)
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn is_connected(&self) -> bool {
        let all: Vec<usize> = (0..self.num_vertices).collect();
        self.induces_connected(&all)
    }

    /// Whether `vertices` induce a connected subgraph.
    pub fn induces_connected(&self, vertices: &[usize]) -> bool {
        let Some(&start) = vertices.first() else {
            return false;
        };
        let mut member = vec![false; self.num_vertices];
        for &v in vertices {
            member[v] = true;
        }
        let mut seen = vec![false; self.num_vertices];
        seen[start] = true;
        let mut stack = vec![start];
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &w in &self.adjacency[u] {
                if member[w] && !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == vertices.len()
    }

    /// Parses the text format: first non-comment line `k`, then one `u v`
    /// edge per line. Blank lines and lines starting with `#` are ignored.
    pub fn parse(text: &str) -> Result<Self, StructureError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (line, header) = lines.next().ok_or(StructureError::Parse {
            line: 1,
            message: "missing vertex count".into(),
        })?;
        let k: usize = header.parse().map_err(|_| StructureError::Parse {
            line,
            message: format!("expected vertex count, found {header:?}"),
        })?;
        let mut edges = Vec::new();
        for (line, l) in lines {
            let fields: Vec<&str> = l.split_whitespace().collect();
            let parsed: Option<Vec<usize>> = fields.iter().map(|f| f.parse().ok()).collect();
            match parsed.as_deref() {
                Some(&[u, v]) => edges.push((u, v)),
                _ => {
                    return Err(StructureError::Parse {
                        line,
                        message: format!("expected `u v`, found {l:?}"),
                    })
                }
            }
        }
        Graph::new(k, edges)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.num_vertices);
        for (u, v) in &self.edges {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }
}

/// Samples a uniformly random spanning tree by loop-erased random walks
/// rooted at vertex 0. Edges are returned as `(child, parent)` pairs in the
/// order they join the tree.
pub fn wilson_spanning_tree<R: Rng + ?Sized>(
    graph: &Graph,
    rng: &mut R,
) -> Result<Vec<(usize, usize)>, StructureError> {
    if !graph.is_connected() {
        return Err(StructureError::DisconnectedGraph);
    }
    let k = graph.num_vertices();
    let mut in_tree = vec![false; k];
    let mut next = vec![usize::MAX; k];
    let mut edges = Vec::with_capacity(k.saturating_sub(1));
    in_tree[0] = true;
    for start in 0..k {
        // overwriting `next` on revisits erases loops
        let mut u = start;
        while !in_tree[u] {
            let nbrs = graph.neighbors(u);
            next[u] = nbrs[rng.random_range(0..nbrs.len())];
            u = next[u];
        }
        u = start;
        while !in_tree[u] {
            in_tree[u] = true;
            edges.push((u, next[u]));
            u = next[u];
        }
    }
    Ok(edges)
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Splits the graph into `m` connected blocks: sample a uniform spanning
/// tree, delete a uniformly random set of `m - 1` of its edges, and take the
/// remaining components.
pub fn random_connected_partition<R: Rng + ?Sized>(
    graph: &Graph,
    m: usize,
    rng: &mut R,
) -> Result<Partition, StructureError> {
    let k = graph.num_vertices();
    if m == 0 || m > k {
        return Err(StructureError::PartitionSize { m, num_vertices: k });
    }
    let mut tree = wilson_spanning_tree(graph, rng)?;
    let cut = m - 1;
    // partial Fisher-Yates: tree[..cut] is a uniform (m-1)-subset
    for i in 0..cut {
        let j = rng.random_range(i..tree.len());
        tree.swap(i, j);
    }
    let mut sets = DisjointSets::new(k);
    for &(u, v) in &tree[cut..] {
        sets.union(u, v);
    }
    let roots: Vec<usize> = (0..k).map(|v| sets.find(v)).collect();
    Ok(Partition::from_assignment(&roots)?)
}

/// One draw of the variable random partition: the singleton partition with
/// weight `p0` and a fresh random connected partition into `m` blocks with
/// weight `1 - p0`. Zero-weight members are omitted.
pub fn variable_random_partition<R: Rng + ?Sized>(
    graph: &Graph,
    m: usize,
    p0: f64,
    rng: &mut R,
) -> Result<RandomPartition, StructureError> {
    if !(0.0..=1.0).contains(&p0) {
        return Err(StructureError::OutOfRange(p0));
    }
    let k = graph.num_vertices();
    if m == 0 || m > k {
        return Err(StructureError::PartitionSize { m, num_vertices: k });
    }
    if p0 == 1.0 {
        if !graph.is_connected() {
            return Err(StructureError::DisconnectedGraph);
        }
        return Ok(RandomPartition::trivial(k)?);
    }
    let sampled = random_connected_partition(graph, m, rng)?;
    if p0 == 0.0 {
        return Ok(RandomPartition::new(vec![sampled], vec![1.0])?);
    }
    Ok(RandomPartition::new(
        vec![Partition::singleton(k)?, sampled],
        vec![p0, 1.0 - p0],
    )?)
}
