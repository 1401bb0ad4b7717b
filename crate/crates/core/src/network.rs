//! Exact electrical computations on finite truncations of the wedge.
//!
//! Every edge carries unit conductance. Effective resistances and killed
//! Green functions are obtained from grounded Laplacian solves; the two
//! cutset bounds are closed-form sums over the layers.

use std::collections::HashMap;

use crate::error::{Result, WedgeError};
use crate::geometry::{self, Vertex};
use crate::profile::{HSequence, Profile};
use crate::solver::solve_grounded;

/// Default relative residual for the linear solves.
pub const DEFAULT_TOL: f64 = 1e-10;

/// An induced subgraph of the wedge with its vertices' layer indices.
#[derive(Debug, Clone)]
pub struct RestrictedGraph {
    vertices: Vec<Vertex>,
    index: HashMap<Vertex, usize>,
    adjacency: Vec<Vec<usize>>,
    layer: Vec<u64>,
    r: u64,
}

/// Outcome of a linear solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveReport {
    pub value: f64,
    /// Relative residual of the final iterate.
    pub residual: f64,
    pub iterations: usize,
    pub method: &'static str,
}

/// The killed Green function at a vertex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenReport {
    /// Expected visits (time 0 included) divided by the degree.
    pub value: f64,
    /// Expected visits before the walk leaves the truncation.
    pub raw_visits: f64,
    pub degree: usize,
    pub residual: f64,
    pub iterations: usize,
}

const METHOD: &str = "jacobi-pcg";

impl RestrictedGraph {
    /// The unit-conductance network on `V_r`.
    pub fn build(p: &Profile, h: &HSequence, r: u64) -> Result<Self> {
        let vertices = geometry::enumerate_truncation(h, p, r)?;
        Self::induced(p, h, vertices, r)
    }

    /// The subgraph induced by `vertices`, which must all lie in `V_r`.
    pub fn induced(p: &Profile, h: &HSequence, mut vertices: Vec<Vertex>, r: u64) -> Result<Self> {
        vertices.sort();
        vertices.dedup();
        let index: HashMap<Vertex, usize> = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i))
            .collect();
        let mut adjacency = Vec::with_capacity(vertices.len());
        let mut layer = Vec::with_capacity(vertices.len());
        for v in &vertices {
            let u = h.u_level(v)?;
            if u > r {
                return Err(WedgeError::OutsideTruncation(v.clone()));
            }
            layer.push(u);
            adjacency.push(
                geometry::neighbors(p, v)?
                    .iter()
                    .filter_map(|w| index.get(w).copied())
                    .collect(),
            );
        }
        Ok(RestrictedGraph {
            vertices,
            index,
            adjacency,
            layer,
            r,
        })
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn index_of(&self, v: &Vertex) -> Option<usize> {
        self.index.get(v).copied()
    }

    pub fn adjacency(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    /// Layer index `u` of vertex `i`.
    pub fn layer(&self, i: usize) -> u64 {
        self.layer[i]
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// The outermost layer `∂_r` present in the graph.
    pub fn sinks(&self) -> Vec<Vertex> {
        self.vertices
            .iter()
            .zip(&self.layer)
            .filter(|(_, &u)| u == self.r)
            .map(|(v, _)| v.clone())
            .collect()
    }

    /// Whether every vertex below the outer layer keeps all of its wedge
    /// neighbours inside the graph.
    pub fn check_cutset(&self, p: &Profile) -> Result<bool> {
        for (i, v) in self.vertices.iter().enumerate() {
            if self.layer[i] < self.r && geometry::neighbors(p, v)?.len() != self.degree(i) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn resolve(&self, v: &Vertex) -> Result<usize> {
        self.index_of(v)
            .ok_or_else(|| WedgeError::OutsideTruncation(v.clone()))
    }
}

/// Build `V_r` with unit conductances.
pub fn build_restricted(p: &Profile, h: &HSequence, r: u64) -> Result<RestrictedGraph> {
    RestrictedGraph::build(p, h, r)
}

/// `R(source <-> sinks)` with the sinks shorted together and grounded.
pub fn effective_resistance(
    g: &RestrictedGraph,
    source: &Vertex,
    sinks: &[Vertex],
    tol: f64,
) -> Result<SolveReport> {
    let s = g.resolve(source)?;
    let mut grounded = vec![false; g.len()];
    for t in sinks {
        grounded[g.resolve(t)?] = true;
    }
    if !grounded.iter().any(|&b| b) {
        return Err(WedgeError::Disconnected);
    }
    let sol = solve_grounded(&g.adjacency, &grounded, s, 1.0, tol)?;
    Ok(SolveReport {
        value: sol.potential[s],
        residual: sol.residual,
        iterations: sol.iterations,
        method: METHOD,
    })
}

/// `R(O <-> ∂_r)` on `V_r`.
pub fn resistance_to_layer(p: &Profile, h: &HSequence, r: u64, tol: f64) -> Result<SolveReport> {
    let g = RestrictedGraph::build(p, h, r)?;
    effective_resistance(&g, &p.origin(), &g.sinks(), tol)
}

/// `g_{V_{R-1}}(x, x)` where `R = g.r()`: the walk from `x` is killed on its
/// first step onto the outer layer `∂_R`. `g` must be a full truncation
/// built by [`build_restricted`], so every vertex below the outer layer has
/// its wedge degree.
pub fn green_diagonal(g: &RestrictedGraph, x: &Vertex, tol: f64) -> Result<GreenReport> {
    let i = g.resolve(x)?;
    if g.r == 0 || g.layer[i] >= g.r {
        return Err(WedgeError::OutsideTruncation(x.clone()));
    }
    let grounded: Vec<bool> = g.layer.iter().map(|&u| u == g.r).collect();
    let degree = g.degree(i);
    // (I - P) G e_x = e_x  <=>  L G e_x = D e_x.
    let sol = solve_grounded(&g.adjacency, &grounded, i, degree as f64, tol)?;
    let raw_visits = sol.potential[i];
    Ok(GreenReport {
        value: raw_visits / degree as f64,
        raw_visits,
        degree,
        residual: sol.residual,
        iterations: sol.iterations,
    })
}

/// `g_{V_r}(x, x)`, building `V_{r+1}` internally.
pub fn green_at(p: &Profile, h: &HSequence, r: u64, x: &Vertex, tol: f64) -> Result<GreenReport> {
    let g = RestrictedGraph::build(p, h, r + 1)?;
    green_diagonal(&g, x, tol)
}

/// `1 / (2 (d+1)^2) · sum_{n < r} prod_i 1 / (h_i(n) + 1)`.
pub fn resistance_lower_bound(h: &HSequence, r: u64) -> Result<f64> {
    let d = h.dim() as f64;
    let mut sum = 0.0;
    for n in 0..r {
        sum += h.term(n)?;
    }
    Ok(sum / (2.0 * (d + 1.0) * (d + 1.0)))
}

/// Number of edges between `∂_n` and `∂_{n+1}` for `n < r`.
pub fn layer_crossings(g: &RestrictedGraph, r: u64) -> Vec<u64> {
    let mut b = vec![0u64; r as usize];
    for (i, nbrs) in g.adjacency.iter().enumerate() {
        let n = g.layer[i];
        if n >= r {
            continue;
        }
        b[n as usize] += nbrs.iter().filter(|&&j| g.layer[j] == n + 1).count() as u64;
    }
    b
}

/// `sum_{n < r} 1 / b_n` from shorting each layer of `g` to a single node.
pub fn shorted_series_bound(g: &RestrictedGraph, r: u64) -> f64 {
    assert!(
        r <= g.r,
        "shorted bound needs layers up to {r}, graph has {}",
        g.r
    );
    layer_crossings(g, r).iter().map(|&b| 1.0 / b as f64).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::ProfileFn;

    fn wedge(fns: Vec<ProfileFn>, horizon: u64) -> (Profile, HSequence) {
        let p = Profile::new(fns).unwrap();
        let h = HSequence::derive(&p, horizon).unwrap();
        (p, h)
    }

    const ZERO: ProfileFn = ProfileFn::Const { c: 0.0 };
    const IDENT: ProfileFn = ProfileFn::Linear { a: 1.0, b: 0.0 };

    #[test]
    fn build_examples() {
        let (half, hz) = wedge(vec![ZERO], 10);
        let g = build_restricted(&half, &hz, 4).unwrap();
        assert_eq!((g.len(), g.edge_count()), (5, 4));
        let g0 = build_restricted(&half, &hz, 0).unwrap();
        assert_eq!((g0.len(), g0.edge_count()), (1, 0));
        let (tri, h) = wedge(vec![IDENT], 10);
        let t = build_restricted(&tri, &h, 3).unwrap();
        // 6 horizontal + 6 vertical.
        assert_eq!((t.len(), t.edge_count()), (10, 12));
        assert!(t.check_cutset(&tri).unwrap());
    }

    #[test]
    fn half_line_series_law() {
        let (half, hz) = wedge(vec![ZERO], 50);
        for r in 1..=50 {
            let rep = resistance_to_layer(&half, &hz, r, DEFAULT_TOL).unwrap();
            assert!(
                (rep.value - r as f64).abs() <= 1e-9 * r as f64,
                "r={r}: {}",
                rep.value
            );
            assert!(rep.residual <= DEFAULT_TOL);
        }
    }

    #[test]
    fn single_resistor() {
        let (half, hz) = wedge(vec![ZERO], 2);
        let g = build_restricted(&half, &hz, 1).unwrap();
        let rep = effective_resistance(&g, &half.origin(), &g.sinks(), DEFAULT_TOL).unwrap();
        assert!((rep.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn source_in_sinks_and_disconnection() {
        let (half, hz) = wedge(vec![ZERO], 4);
        let g = build_restricted(&half, &hz, 2).unwrap();
        let o = half.origin();
        assert_eq!(
            effective_resistance(&g, &o, std::slice::from_ref(&o), DEFAULT_TOL).unwrap_err(),
            WedgeError::SourceIsSink
        );
        assert_eq!(
            effective_resistance(&g, &o, &[], DEFAULT_TOL).unwrap_err(),
            WedgeError::Disconnected
        );
    }

    #[test]
    fn green_on_half_line_is_gamblers_ruin() {
        let (half, hz) = wedge(vec![ZERO], 40);
        for r in 0..=30 {
            let rep = green_at(&half, &hz, r, &half.origin(), DEFAULT_TOL).unwrap();
            assert_eq!(rep.degree, 1);
            assert!((rep.raw_visits - (r + 1) as f64).abs() < 1e-9 * (r + 1) as f64);
            assert!((rep.value - (r + 1) as f64).abs() < 1e-9 * (r + 1) as f64);
        }
    }

    #[test]
    fn green_rejects_outer_layer() {
        let (tri, h) = wedge(vec![IDENT], 10);
        let g = build_restricted(&tri, &h, 3).unwrap();
        let top = Vertex::new(vec![1], 3);
        assert!(matches!(
            green_diagonal(&g, &top, DEFAULT_TOL).unwrap_err(),
            WedgeError::OutsideTruncation(_)
        ));
    }

    #[test]
    fn lower_bound_examples() {
        let (_, hz) = wedge(vec![ZERO], 20);
        assert_eq!(resistance_lower_bound(&hz, 0).unwrap(), 0.0);
        assert!((resistance_lower_bound(&hz, 16).unwrap() - 2.0).abs() < 1e-15);
        let (half, _) = wedge(vec![ZERO], 20);
        let g = build_restricted(&half, &hz, 12).unwrap();
        assert_eq!(shorted_series_bound(&g, 12), 12.0);
        assert_eq!(shorted_series_bound(&g, 0), 0.0);
    }

    #[test]
    fn triangle_crossings_by_enumeration() {
        let (tri, h) = wedge(vec![IDENT], 10);
        let g = build_restricted(&tri, &h, 6).unwrap();
        // On the triangle ∂_n is the row at level n, so b_n = n + 1.
        assert_eq!(layer_crossings(&g, 6), vec![1, 2, 3, 4, 5, 6]);
        assert!(shorted_series_bound(&g, 6) >= resistance_lower_bound(&h, 6).unwrap());
    }
}
