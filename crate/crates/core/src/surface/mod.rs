//! Trivalent ribbon graphs dual to triangulated closed surfaces.
//!
//! Half-edges are numbered globally. A half-edge `h` doubles as the dart that
//! leaves `vertex(h)` along `edge(h)`. Cyclic orders at vertices are read
//! counterclockwise, and a face is traced by `h ↦ next(opp(h))`, which walks its
//! boundary clockwise. The boundary δp of a plaquette is the reverse of that walk.

mod coloring;

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use coloring::{admissible_representative, representative_avoiding, Coloring, CycleBasis};

/// A face, stored as its walk of darts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plaquette {
    pub walk: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct RibbonGraph {
    half_vertex: Vec<usize>,
    half_edge: Vec<usize>,
    half_next: Vec<usize>,
    vertices: Vec<[usize; 3]>,
    edges: Vec<[usize; 2]>,
    faces: Vec<Plaquette>,
    face_of: Vec<usize>,
    name: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct VertexEntry {
    id: usize,
    cyclic: [usize; 3],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct EdgeEntry {
    id: usize,
    half: [usize; 2],
}

/// On-disk graph layout.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphFile {
    vertices: Vec<VertexEntry>,
    edges: Vec<EdgeEntry>,
}

/// Surface selector accepted by the command line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SurfaceSpec {
    Theta,
    Grid(usize),
    Genus(usize),
}

impl SurfaceSpec {
    /// `torus:theta`, `torus:grid:N` or `genus:G`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad surface spec '{s}' (torus:theta, torus:grid:N, genus:G)"));
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["torus", "theta"] => Ok(SurfaceSpec::Theta),
            ["torus", "grid", n] => n.parse().ok().filter(|n| *n >= 1).map(SurfaceSpec::Grid).ok_or_else(bad),
            ["genus", g] => g.parse().ok().filter(|g| *g >= 1).map(SurfaceSpec::Genus).ok_or_else(bad),
            _ => Err(bad()),
        }
    }

    pub fn build(&self) -> Result<RibbonGraph> {
        match self {
            SurfaceSpec::Theta => Ok(RibbonGraph::theta()),
            SurfaceSpec::Grid(n) => RibbonGraph::grid(*n),
            SurfaceSpec::Genus(g) => RibbonGraph::of_genus(*g),
        }
    }
}

impl std::fmt::Display for SurfaceSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SurfaceSpec::Theta => write!(f, "torus:theta"),
            SurfaceSpec::Grid(n) => write!(f, "torus:grid:{n}"),
            SurfaceSpec::Genus(g) => write!(f, "genus:{g}"),
        }
    }
}

/// A triangle side: edge id and whether the ccw boundary runs along (+1) or against (−1) it.
pub type Side = (usize, i8);

impl RibbonGraph {
    /// Builds from cyclic vertex triples and edge half-edge pairs.
    pub fn new(vertices: Vec<[usize; 3]>, edges: Vec<[usize; 2]>) -> Result<Self> {
        let nh = 3 * vertices.len();
        if 2 * edges.len() != nh {
            return Err(Error::Topology(format!(
                "{} vertices need {} edges for trivalence, got {}",
                vertices.len(),
                nh / 2,
                edges.len()
            )));
        }
        let mut half_vertex = vec![usize::MAX; nh];
        let mut half_next = vec![usize::MAX; nh];
        for (v, cyc) in vertices.iter().enumerate() {
            for k in 0..3 {
                let h = cyc[k];
                if h >= nh || half_vertex[h] != usize::MAX {
                    return Err(Error::Topology(format!("half-edge {h} missing or repeated at vertex {v}")));
                }
                half_vertex[h] = v;
                half_next[h] = cyc[(k + 1) % 3];
            }
        }
        let mut half_edge = vec![usize::MAX; nh];
        for (e, pair) in edges.iter().enumerate() {
            for &h in pair {
                if h >= nh || half_edge[h] != usize::MAX {
                    return Err(Error::Topology(format!("half-edge {h} missing or repeated in edge {e}")));
                }
                half_edge[h] = e;
            }
        }
        let mut g = RibbonGraph {
            half_vertex,
            half_edge,
            half_next,
            vertices,
            edges,
            faces: Vec::new(),
            face_of: vec![usize::MAX; nh],
            name: "custom".into(),
        };
        g.trace_faces();
        if !g.is_connected() {
            return Err(Error::Topology("graph is not connected".into()));
        }
        let chi = g.euler_characteristic();
        if chi > 2 || chi % 2 != 0 {
            return Err(Error::Topology(format!("Euler characteristic {chi} is not that of a closed orientable surface")));
        }
        Ok(g)
    }

    fn trace_faces(&mut self) {
        for start in 0..self.half_vertex.len() {
            if self.face_of[start] != usize::MAX {
                continue;
            }
            let f = self.faces.len();
            let mut walk = Vec::new();
            let mut h = start;
            loop {
                self.face_of[h] = f;
                walk.push(h);
                h = self.phi(h);
                if h == start {
                    break;
                }
            }
            self.faces.push(Plaquette { walk });
        }
    }

    fn is_connected(&self) -> bool {
        if self.vertices.is_empty() {
            return false;
        }
        let mut seen = vec![false; self.vertices.len()];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for &h in &self.vertices[v] {
                let w = self.vertex(self.opp(h));
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// The dual of a triangulation whose triangles list their sides counterclockwise.
    pub fn from_triangles(triangles: &[[Side; 3]], num_edges: usize) -> Result<Self> {
        let mut halves = vec![[usize::MAX; 2]; num_edges];
        for (t, tri) in triangles.iter().enumerate() {
            for (k, &(e, s)) in tri.iter().enumerate() {
                let slot = if s > 0 { 0 } else { 1 };
                if e >= num_edges || halves[e][slot] != usize::MAX {
                    return Err(Error::Topology(format!("edge {e} not used once in each direction")));
                }
                halves[e][slot] = 3 * t + k;
            }
        }
        if halves.iter().any(|h| h.contains(&usize::MAX)) {
            return Err(Error::Topology("some edge is not shared by two triangle sides".into()));
        }
        let vertices = (0..triangles.len()).map(|t| [3 * t, 3 * t + 1, 3 * t + 2]).collect();
        RibbonGraph::new(vertices, halves)
    }

    /// Two vertices joined by three edges, with equal cyclic orders: a one-face torus.
    pub fn theta() -> Self {
        let mut g = RibbonGraph::new(vec![[0, 1, 2], [3, 4, 5]], vec![[0, 3], [1, 4], [2, 5]])
            .expect("theta graph is valid");
        g.name = "torus:theta".into();
        g
    }

    /// Dual of the n×n square torus with one diagonal per square.
    pub fn grid(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Topology("grid size must be at least 1".into()));
        }
        let at = |i: usize, j: usize| (i % n) + n * (j % n);
        let (h, v, d) = (|i, j| 3 * at(i, j), |i, j| 3 * at(i, j) + 1, |i, j| 3 * at(i, j) + 2);
        let mut tris = Vec::with_capacity(2 * n * n);
        for j in 0..n {
            for i in 0..n {
                tris.push([(h(i, j), 1), (v(i + 1, j), 1), (d(i, j), -1)]);
                tris.push([(d(i, j), 1), (h(i, j + 1), -1), (v(i, j), -1)]);
            }
        }
        let mut g = RibbonGraph::from_triangles(&tris, 3 * n * n)?;
        g.name = format!("torus:grid:{n}");
        Ok(g)
    }

    /// Dual of the fan triangulation of the 4g-gon with boundary word ∏ a b a⁻¹ b⁻¹.
    pub fn of_genus(genus: usize) -> Result<Self> {
        if genus == 0 {
            return Err(Error::Topology("genus 0 is not supported: the sphere has no nontrivial holonomy".into()));
        }
        let sides = 4 * genus;
        let letter = |k: usize| -> Side {
            let (hnd, r) = (k / 4, k % 4);
            let e = 2 * hnd + (r % 2);
            (e, if r < 2 { 1 } else { -1 })
        };
        let diag = |k: usize| 2 * genus + (k - 2);
        let mut tris = Vec::with_capacity(sides - 2);
        for k in 1..=sides - 2 {
            let first = if k == 1 { letter(0) } else { (diag(k), 1) };
            let last = if k + 1 == sides - 1 {
                let (e, s) = letter(sides - 1);
                (e, s)
            } else {
                (diag(k + 1), -1)
            };
            tris.push([first, letter(k), last]);
        }
        let mut g = RibbonGraph::from_triangles(&tris, 2 * genus + sides - 3)?;
        g.name = format!("genus:{genus}");
        Ok(g)
    }

    pub fn from_file(f: &GraphFile) -> Result<Self> {
        let mut vs = f.vertices.clone();
        vs.sort_by_key(|v| v.id);
        let mut es = f.edges.clone();
        es.sort_by_key(|e| e.id);
        if vs.iter().enumerate().any(|(i, v)| v.id != i) || es.iter().enumerate().any(|(i, e)| e.id != i) {
            return Err(Error::Topology("vertex and edge ids must be 0..n without gaps".into()));
        }
        RibbonGraph::new(vs.iter().map(|v| v.cyclic).collect(), es.iter().map(|e| e.half).collect())
    }

    pub fn to_file(&self) -> GraphFile {
        GraphFile {
            vertices: self.vertices.iter().enumerate().map(|(id, &cyclic)| VertexEntry { id, cyclic }).collect(),
            edges: self.edges.iter().enumerate().map(|(id, &half)| EdgeEntry { id, half }).collect(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_plaquettes(&self) -> usize {
        self.faces.len()
    }

    pub fn num_halves(&self) -> usize {
        self.half_vertex.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }

    pub fn genus(&self) -> usize {
        ((2 - self.euler_characteristic()) / 2) as usize
    }

    pub fn vertex(&self, h: usize) -> usize {
        self.half_vertex[h]
    }

    pub fn edge(&self, h: usize) -> usize {
        self.half_edge[h]
    }

    /// Successor of `h` in the cyclic order at its vertex.
    pub fn next(&self, h: usize) -> usize {
        self.half_next[h]
    }

    pub fn opp(&self, h: usize) -> usize {
        let [a, b] = self.edges[self.half_edge[h]];
        if a == h {
            b
        } else {
            a
        }
    }

    /// The face successor of dart `h`.
    pub fn phi(&self, h: usize) -> usize {
        self.next(self.opp(h))
    }

    /// +1 if dart `h` runs along its edge's canonical direction.
    pub fn sign(&self, h: usize) -> i64 {
        if self.edges[self.half_edge[h]][0] == h {
            1
        } else {
            -1
        }
    }

    pub fn vertex_halves(&self, v: usize) -> [usize; 3] {
        self.vertices[v]
    }

    pub fn edge_halves(&self, e: usize) -> [usize; 2] {
        self.edges[e]
    }

    pub fn plaquette(&self, p: usize) -> &Plaquette {
        &self.faces[p]
    }

    pub fn plaquettes(&self) -> &[Plaquette] {
        &self.faces
    }

    pub fn face_of(&self, h: usize) -> usize {
        self.face_of[h]
    }

    /// δp as (edge, ±1) pairs, counterclockwise.
    pub fn boundary(&self, p: usize) -> Vec<(usize, i64)> {
        self.faces[p].walk.iter().rev().map(|&h| (self.edge(h), -self.sign(h))).collect()
    }

    /// Plaquettes sharing an edge with p (excluding p).
    pub fn neighbours(&self, p: usize) -> Vec<usize> {
        let mut v: Vec<usize> = self.faces[p]
            .walk
            .iter()
            .map(|&h| self.face_of(self.opp(h)))
            .filter(|&q| q != p)
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Vertices on the boundary of p.
    pub fn plaquette_vertices(&self, p: usize) -> Vec<usize> {
        let mut v: Vec<usize> = self.faces[p].walk.iter().map(|&h| self.vertex(h)).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Whether some bijection of half-edges carries one structure onto the other.
    pub fn is_isomorphic(&self, other: &RibbonGraph) -> bool {
        let n = self.num_halves();
        if n != other.num_halves() || self.num_plaquettes() != other.num_plaquettes() {
            return false;
        }
        if n == 0 {
            return true;
        }
        'target: for t in 0..n {
            let mut map = vec![usize::MAX; n];
            let mut inv = vec![usize::MAX; n];
            let mut stack = vec![(0usize, t)];
            while let Some((a, b)) = stack.pop() {
                if map[a] != usize::MAX || inv[b] != usize::MAX {
                    if map[a] != b {
                        continue 'target;
                    }
                    continue;
                }
                map[a] = b;
                inv[b] = a;
                stack.push((self.next(a), other.next(b)));
                stack.push((self.opp(a), other.opp(b)));
            }
            if map.iter().all(|&m| m != usize::MAX) {
                return true;
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_partition(g: &RibbonGraph) {
        let mut seen = vec![0; g.num_halves()];
        for p in g.plaquettes() {
            for &h in &p.walk {
                seen[h] += 1;
            }
        }
        assert!(seen.iter().all(|&c| c == 1));
    }

    #[test]
    fn theta_is_a_one_face_torus() {
        let g = RibbonGraph::theta();
        assert_eq!((g.num_vertices(), g.num_edges(), g.num_plaquettes(), g.genus()), (2, 3, 1, 1));
        assert_eq!(g.plaquette(0).walk.len(), 6);
        check_partition(&g);
    }

    #[test]
    fn opposite_orders_give_a_sphere() {
        let g = RibbonGraph::new(vec![[0, 1, 2], [3, 5, 4]], vec![[0, 3], [1, 4], [2, 5]]).unwrap();
        assert_eq!((g.num_plaquettes(), g.genus()), (3, 0));
    }

    #[test]
    fn grids() {
        let g = RibbonGraph::grid(2).unwrap();
        assert_eq!((g.num_vertices(), g.num_edges(), g.num_plaquettes(), g.genus()), (8, 12, 4, 1));
        assert!(g.plaquettes().iter().all(|p| p.walk.len() == 6));
        check_partition(&g);
        let g1 = RibbonGraph::grid(1).unwrap();
        assert_eq!((g1.num_vertices(), g1.num_edges(), g1.num_plaquettes()), (2, 3, 1));
        assert!(g1.is_isomorphic(&RibbonGraph::theta()));
        let g3 = RibbonGraph::grid(3).unwrap();
        assert_eq!((g3.num_vertices(), g3.num_edges(), g3.num_plaquettes(), g3.genus()), (18, 27, 9, 1));
    }

    #[test]
    fn genus_builders() {
        assert!(RibbonGraph::of_genus(0).is_err());
        let g1 = RibbonGraph::of_genus(1).unwrap();
        assert!(g1.is_isomorphic(&RibbonGraph::theta()));
        let g2 = RibbonGraph::of_genus(2).unwrap();
        assert_eq!(g2.euler_characteristic(), -2);
        assert_eq!((g2.num_vertices(), g2.num_edges(), g2.num_plaquettes()), (6, 9, 1));
        check_partition(&g2);
        assert_eq!(RibbonGraph::of_genus(3).unwrap().genus(), 3);
    }

    #[test]
    fn isomorphism_distinguishes() {
        assert!(!RibbonGraph::grid(2).unwrap().is_isomorphic(&RibbonGraph::of_genus(2).unwrap()));
        let sphere = RibbonGraph::new(vec![[0, 1, 2], [3, 5, 4]], vec![[0, 3], [1, 4], [2, 5]]).unwrap();
        assert!(!sphere.is_isomorphic(&RibbonGraph::theta()));
    }

    #[test]
    fn file_round_trip_and_bad_input() {
        let g = RibbonGraph::grid(2).unwrap();
        let text = serde_json::to_string(&g.to_file()).unwrap();
        let back = RibbonGraph::from_file(&serde_json::from_str(&text).unwrap()).unwrap();
        assert!(back.is_isomorphic(&g));
        assert!(RibbonGraph::new(vec![[0, 1, 2], [3, 4, 5]], vec![[0, 3], [1, 4], [2, 4]]).is_err());
        assert!(RibbonGraph::new(vec![[0, 1, 2]], vec![[0, 1]]).is_err());
    }

    #[test]
    fn surface_specs() {
        assert_eq!(SurfaceSpec::parse("torus:theta").unwrap(), SurfaceSpec::Theta);
        assert_eq!(SurfaceSpec::parse("torus:grid:2").unwrap(), SurfaceSpec::Grid(2));
        assert_eq!(SurfaceSpec::parse("genus:2").unwrap(), SurfaceSpec::Genus(2));
        for bad in ["torus", "torus:grid:0", "genus:0", "klein:1", "torus:grid:x"] {
            assert!(SurfaceSpec::parse(bad).is_err(), "{bad}");
        }
    }
}
