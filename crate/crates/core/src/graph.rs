//! Input multigraph: parallel edges and self-loops are allowed.
//!
//! Vertices and edges are stored sorted by id, so their index order equals
//! their id order. Every stage addresses vertices and edges by index.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::geom::{BoxShape, Point};

#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    pub id: u32,
    pub label: Option<String>,
    pub shape: Option<BoxShape>,
    pub position: Option<Point>,
}

impl Vertex {
    pub fn new(id: u32) -> Self {
        Self { id, label: None, shape: None, position: None }
    }

    pub fn labeled(id: u32, label: impl Into<String>) -> Self {
        Self { label: Some(label.into()), ..Self::new(id) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub id: u32,
    /// Index of the source vertex.
    pub source: usize,
    /// Index of the target vertex.
    pub target: usize,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.source == self.target
    }

    pub fn other(&self, v: usize) -> usize {
        if self.source == v {
            self.target
        } else {
            self.source
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Multigraph {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
}

impl Multigraph {
    /// Builds a graph from vertices and `(edge id, source id, target id)`
    /// triples, validating id uniqueness and endpoint references.
    pub fn new(mut vertices: Vec<Vertex>, edges: impl IntoIterator<Item = (u32, u32, u32)>) -> Result<Self> {
        vertices.sort_by_key(|v| v.id);
        if let Some(w) = vertices.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(invalid(format!("duplicate vertex id {}", w[0].id)));
        }
        let index: BTreeMap<u32, usize> = vertices.iter().enumerate().map(|(i, v)| (v.id, i)).collect();
        let mut out = Vec::new();
        for (id, s, t) in edges {
            let lookup = |v: u32| {
                index
                    .get(&v)
                    .copied()
                    .ok_or_else(|| invalid(format!("edge {id} references unknown vertex {v}")))
            };
            out.push(Edge { id, source: lookup(s)?, target: lookup(t)? });
        }
        out.sort_by_key(|e| e.id);
        if let Some(w) = out.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(invalid(format!("duplicate edge id {}", w[0].id)));
        }
        Ok(Self { vertices, edges: out })
    }

    /// Graph on vertices `0..n` with edge ids `0..m` in the given order.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let vertices = (0..n as u32).map(Vertex::new).collect();
        Self::new(vertices, pairs.iter().enumerate().map(|(i, &(s, t))| (i as u32, s as u32, t as u32)))
    }

    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertices_mut(&mut self) -> &mut [Vertex] {
        &mut self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_index(&self, id: u32) -> Option<usize> {
        self.vertices.binary_search_by_key(&id, |v| v.id).ok()
    }

    /// Number of edge endpoints at each vertex; a self-loop counts twice.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n()];
        for e in &self.edges {
            deg[e.source] += 1;
            deg[e.target] += 1;
        }
        deg
    }

    /// Connected components as sorted vertex index lists, largest first
    /// (ties: the component containing the smaller index).
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..self.n()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for e in &self.edges {
            let a = find(&mut parent, e.source);
            let b = find(&mut parent, e.target);
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for v in 0..self.n() {
            let r = find(&mut parent, v);
            groups.entry(r).or_default().push(v);
        }
        let mut comps: Vec<Vec<usize>> = groups.into_values().collect();
        comps.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Subgraph induced by the given vertex indices (ids preserved).
    pub fn induced(&self, keep: &[usize]) -> Multigraph {
        let mut inside = vec![false; self.n()];
        for &v in keep {
            inside[v] = true;
        }
        let vertices: Vec<Vertex> = keep.iter().map(|&v| self.vertices[v].clone()).collect();
        let edges: Vec<(u32, u32, u32)> = self
            .edges
            .iter()
            .filter(|e| inside[e.source] && inside[e.target])
            .map(|e| (e.id, self.vertices[e.source].id, self.vertices[e.target].id))
            .collect();
        Multigraph::new(vertices, edges).expect("induced subgraph of a valid graph is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_lookup() {
        let g = Multigraph::new(vec![Vertex::new(7), Vertex::new(3)], [(0, 3, 7), (1, 7, 7)]).unwrap();
        assert_eq!((g.n(), g.m()), (2, 2));
        assert_eq!(g.vertices()[0].id, 3);
        assert_eq!(g.edges()[0].source, 0);
        assert!(g.edges()[1].is_loop());
        assert_eq!(g.degrees(), vec![1, 3]);
    }

    #[test]
    fn rejects_dangling_and_duplicate_ids() {
        let err = Multigraph::new(vec![Vertex::new(0)], [(0, 0, 5)]).unwrap_err();
        assert!(format!("{err}").contains('5'));
        assert!(Multigraph::new(vec![Vertex::new(0), Vertex::new(0)], []).is_err());
        assert!(Multigraph::new(vec![Vertex::new(0)], [(1, 0, 0), (1, 0, 0)]).is_err());
    }

    #[test]
    fn largest_component_first() {
        let g = Multigraph::from_pairs(5, &[(0, 1), (2, 3), (3, 4)]).unwrap();
        let comps = g.components();
        assert_eq!(comps[0], vec![2, 3, 4]);
        let sub = g.induced(&comps[0]);
        assert_eq!((sub.n(), sub.m()), (3, 2));
        assert!(sub.is_connected());
    }
}
