//! Explicit unit flows certifying upper bounds on `R(x <-> ∂_r)`.
//!
//! For an anchor `x = (x_1, .., x_d, s)` in `V_{r-1}` two integer sequences
//! per coordinate, `g_{+i}` and `g_{-i}`, start at `x_i` and open up an
//! interval of width `h_i(n)` at relative level `n`: whenever `h_i` climbs,
//! the lower end steps down if it can, otherwise the upper end steps up.
//! The stacked boxes `V_x` are in bijection with the staircase box
//! `H = {(y, n) : y_i <= h_i(n), n <= r - s}` through a per-level
//! reflection/translation `Γ`, so a flow on `H` transports to `V_x` with the
//! same energy.
//!
//! The flow on `H` keeps its mass uniform on each level box. Vertical edges
//! out of level `n` carry `prod_i 1/(h_i(n)+1)`; on arrival one level up,
//! every coordinate that climbed is widened in turn, moving mass along its
//! lines from a uniform law on `k+1` sites to one on `k+2` sites.

use std::collections::BTreeMap;

use crate::error::{Result, WedgeError};
use crate::geometry::{self, for_each_in_box, Vertex};
use crate::network::{self, RestrictedGraph};
use crate::profile::{HSequence, Profile};

/// The sequences `g_{±i}(n)` for `n = 0..=r-s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GSequences {
    anchor: Vertex,
    r: u64,
    plus: Vec<Vec<u64>>,
    minus: Vec<Vec<u64>>,
}

impl GSequences {
    /// Run the three-case recursion from `x`. Requires `x` in the wedge and
    /// `u(x) <= r - 1`.
    pub fn derive(h: &HSequence, x: &Vertex, r: u64) -> Result<Self> {
        h.check_dim(x)?;
        if r == 0 || r > h.horizon() || !h.within(x, r - 1)? {
            return Err(WedgeError::AnchorOutsideTruncation(x.clone()));
        }
        let steps = (r - x.level) as usize;
        let mut plus = Vec::with_capacity(h.dim());
        let mut minus = Vec::with_capacity(h.dim());
        for (i, &xi) in x.coords.iter().enumerate() {
            let (mut hi, mut lo) = (xi, xi);
            let mut up = Vec::with_capacity(steps + 1);
            let mut down = Vec::with_capacity(steps + 1);
            up.push(hi);
            down.push(lo);
            for n in 0..steps as u64 {
                if h.at(i, n + 1) > h.at(i, n) {
                    if lo == 0 {
                        hi += 1;
                    } else {
                        lo -= 1;
                    }
                }
                up.push(hi);
                down.push(lo);
            }
            plus.push(up);
            minus.push(down);
        }
        Ok(GSequences {
            anchor: x.clone(),
            r,
            plus,
            minus,
        })
    }

    pub fn anchor(&self) -> &Vertex {
        &self.anchor
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    /// `r - s`, the number of levels above the anchor.
    pub fn span(&self) -> u64 {
        self.r - self.anchor.level
    }

    pub fn plus(&self, i: usize) -> &[u64] {
        &self.plus[i]
    }

    pub fn minus(&self, i: usize) -> &[u64] {
        &self.minus[i]
    }

    /// Check the step, width and range properties; returns the first
    /// violation found.
    pub fn verify(&self, h: &HSequence, p: &Profile) -> std::result::Result<(), String> {
        let s = self.anchor.level;
        let hr = |i| h.at(i, self.r);
        for i in 0..self.plus.len() {
            for n in 0..=self.span() as usize {
                let (up, lo) = (self.plus[i][n], self.minus[i][n]);
                if n > 0 {
                    let du = up as i64 - self.plus[i][n - 1] as i64;
                    let dl = lo as i64 - self.minus[i][n - 1] as i64;
                    if !(0..=1).contains(&du) || !(-1..=0).contains(&dl) {
                        return Err(format!(
                            "coordinate {i}: g_+ or g_- moves by more than one at n = {n}"
                        ));
                    }
                }
                if up - lo != h.at(i, n as u64) {
                    return Err(format!(
                        "coordinate {i}: g_+ - g_- differs from h at n = {n}"
                    ));
                }
                let f = p.eval(i, n as u64 + s).map_err(|e| e.to_string())?;
                if lo > up || (up as f64) > f || up > hr(i) {
                    return Err(format!(
                        "coordinate {i}: [g_-, g_+] leaves the allowed range at n = {n}"
                    ));
                }
            }
        }
        Ok(())
    }

    /// `L_i(n)`: the end of the interval that did not move at step `n`
    /// (the smaller one when neither moved). Requires `n >= 1`.
    fn pivot(&self, i: usize, n: usize) -> (u64, bool) {
        if self.minus[i][n] == self.minus[i][n - 1] {
            (self.minus[i][n], false)
        } else {
            (self.plus[i][n], true)
        }
    }

    fn check_level(&self, v: &Vertex) -> Result<usize> {
        if v.dim() != self.plus.len() || v.level < self.anchor.level || v.level > self.r {
            return Err(WedgeError::NotInVx(v.clone()));
        }
        let n = (v.level - self.anchor.level) as usize;
        for (i, &u) in v.coords.iter().enumerate() {
            if u < self.minus[i][n] || u > self.plus[i][n] {
                return Err(WedgeError::NotInVx(v.clone()));
            }
        }
        Ok(n)
    }

    /// `Γ : V_x -> H`.
    pub fn gamma(&self, v: &Vertex) -> Result<Vertex> {
        let n = self.check_level(v)?;
        if n == 0 {
            return Ok(Vertex::origin(v.dim()));
        }
        let coords = v
            .coords
            .iter()
            .enumerate()
            .map(|(i, &u)| u.abs_diff(self.pivot(i, n).0))
            .collect();
        Ok(Vertex::new(coords, n as u64))
    }

    /// `Γ^{-1} : H -> V_x`. `y` must lie in `H`.
    pub fn gamma_inverse(&self, y: &Vertex) -> Vertex {
        let n = y.level as usize;
        if n == 0 {
            return self.anchor.clone();
        }
        let coords = y
            .coords
            .iter()
            .enumerate()
            .map(|(i, &t)| match self.pivot(i, n) {
                (l, false) => l + t,
                (l, true) => l - t,
            })
            .collect();
        Vertex::new(coords, n as u64 + self.anchor.level)
    }

    /// Vertices of `V_x` at relative level `n`, sorted.
    fn level_box(&self, n: usize) -> Vec<Vertex> {
        let lows: Vec<u64> = self.minus.iter().map(|m| m[n]).collect();
        let widths: Vec<u64> = (0..lows.len()).map(|i| self.plus[i][n] - lows[i]).collect();
        let level = n as u64 + self.anchor.level;
        let mut out = Vec::new();
        for_each_in_box(&widths, |c| {
            out.push(Vertex::new(
                c.iter().zip(&lows).map(|(a, b)| a + b).collect(),
                level,
            ))
        });
        out
    }

    /// `V_x`, sorted.
    pub fn vertices(&self) -> Vec<Vertex> {
        let mut out: Vec<Vertex> = (0..=self.span() as usize)
            .flat_map(|n| self.level_box(n))
            .collect();
        out.sort();
        out
    }

    /// `V_x ∩ Δ_{d+1}(r)`: the top level of `V_x`.
    pub fn top(&self) -> Vec<Vertex> {
        self.level_box(self.span() as usize)
    }
}

/// `V_x`, asserting `x ∈ V_x ⊆ V_r`.
pub fn build_vx(g: &GSequences, p: &Profile, h: &HSequence) -> Result<Vec<Vertex>> {
    let vx = g.vertices();
    assert!(
        vx.binary_search(g.anchor()).is_ok(),
        "anchor missing from V_x"
    );
    for v in &vx {
        assert!(
            geometry::contains(p, v)? && h.within(v, g.r())?,
            "{v} in V_x escapes V_r"
        );
    }
    Ok(vx)
}

/// The staircase box `H` of height `top`, sorted.
pub fn staircase_box(h: &HSequence, top: u64) -> Vec<Vertex> {
    let mut out = Vec::new();
    for n in 0..=top {
        let tops: Vec<u64> = (0..h.dim()).map(|i| h.at(i, n)).collect();
        for_each_in_box(&tops, |c| out.push(Vertex::new(c.to_vec(), n)));
    }
    out.sort();
    out
}

/// An antisymmetric edge function, stored once per edge with the lower
/// endpoint (in vertex order) first.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowAssignment {
    edges: BTreeMap<(Vertex, Vertex), f64>,
    source: Vertex,
    sinks: Vec<Vertex>,
    energy: f64,
}

impl FlowAssignment {
    fn new(source: Vertex, mut sinks: Vec<Vertex>) -> Self {
        sinks.sort();
        FlowAssignment {
            edges: BTreeMap::new(),
            source,
            sinks,
            energy: 0.0,
        }
    }

    fn insert(&mut self, from: Vertex, to: Vertex, value: f64) {
        if value == 0.0 {
            return;
        }
        let (key, value) = if from < to {
            ((from, to), value)
        } else {
            ((to, from), -value)
        };
        let prev = self.edges.insert(key, value);
        debug_assert!(prev.is_none(), "edge assigned twice");
    }

    fn finish(mut self) -> Self {
        let mut squares: Vec<f64> = self.edges.values().map(|w| w * w).collect();
        squares.sort_by(f64::total_cmp);
        self.energy = neumaier_sum(squares);
        self
    }

    /// `w(u, v)`; zero on non-carrying pairs.
    pub fn value(&self, u: &Vertex, v: &Vertex) -> f64 {
        if u < v {
            self.edges
                .get(&(u.clone(), v.clone()))
                .copied()
                .unwrap_or(0.0)
        } else {
            -self
                .edges
                .get(&(v.clone(), u.clone()))
                .copied()
                .unwrap_or(0.0)
        }
    }

    /// Carrying edges `(u, v, w(u, v))` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (&Vertex, &Vertex, f64)> {
        self.edges.iter().map(|((u, v), &w)| (u, v, w))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn source(&self) -> &Vertex {
        &self.source
    }

    pub fn sinks(&self) -> &[Vertex] {
        &self.sinks
    }

    /// `sum w^2` over carrying edges, added in increasing order of `w^2`, so
    /// flows with the same multiset of values have bitwise equal energy.
    pub fn energy(&self) -> f64 {
        self.energy
    }

    /// Net outflow at every touched vertex.
    pub fn divergence(&self) -> BTreeMap<Vertex, f64> {
        let mut div: BTreeMap<Vertex, f64> = BTreeMap::new();
        for ((u, v), &w) in &self.edges {
            *div.entry(u.clone()).or_default() += w;
            *div.entry(v.clone()).or_default() -= w;
        }
        div
    }

    /// Largest violation of the node law for a unit flow from the source
    /// into the sink set.
    pub fn kirchhoff_residual(&self) -> f64 {
        let div = self.divergence();
        let at = |v: &Vertex| div.get(v).copied().unwrap_or(0.0);
        let mut worst = (at(&self.source) - 1.0).abs();
        let into_sinks: f64 = self.sinks.iter().map(at).sum();
        worst = worst.max((into_sinks + 1.0).abs());
        for (v, &x) in &div {
            if *v != self.source && self.sinks.binary_search(v).is_err() {
                worst = worst.max(x.abs());
            }
        }
        worst
    }
}

fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// The uniform-layer unit flow on `H` from the origin to its level-`top`
/// box.
pub fn lyons_flow(h: &HSequence, top: u64) -> Result<FlowAssignment> {
    if top == 0 {
        return Err(WedgeError::DomainMismatch(
            "a flow needs at least one level above the source".into(),
        ));
    }
    if top > h.horizon() {
        return Err(WedgeError::HorizonExceeded {
            requested: top,
            horizon: h.horizon(),
        });
    }
    let d = h.dim();
    let sinks = {
        let tops: Vec<u64> = (0..d).map(|i| h.at(i, top)).collect();
        let mut s = Vec::new();
        for_each_in_box(&tops, |c| s.push(Vertex::new(c.to_vec(), top)));
        s
    };
    let mut w = FlowAssignment::new(Vertex::origin(d), sinks);
    for n in 1..=top {
        let below: Vec<u64> = (0..d).map(|i| h.at(i, n - 1)).collect();
        let per_vertex = h.term(n - 1)?;
        for_each_in_box(&below, |c| {
            w.insert(
                Vertex::new(c.to_vec(), n - 1),
                Vertex::new(c.to_vec(), n),
                per_vertex,
            )
        });
        let mut extent = below;
        for i in 0..d {
            if h.at(i, n) == extent[i] {
                continue;
            }
            let k = extent[i] as f64;
            let volume: f64 = extent.iter().map(|&e| (e + 1) as f64).product();
            let line_mass = (k + 1.0) / volume;
            let mut others = extent.clone();
            others[i] = 0;
            for_each_in_box(&others, |c| {
                for j in 0..extent[i] + 1 {
                    let mut a = c.to_vec();
                    a[i] = j;
                    let mut b = a.clone();
                    b[i] = j + 1;
                    let value = line_mass * (j + 1) as f64 / ((k + 1.0) * (k + 2.0));
                    w.insert(Vertex::new(a, n), Vertex::new(b, n), value);
                }
            });
            extent[i] += 1;
        }
    }
    Ok(w.finish())
}

/// Carry `w` (a flow on `H` for the same anchor span) over to `V_x`.
pub fn transport_flow(w: &FlowAssignment, g: &GSequences, h: &HSequence) -> Result<FlowAssignment> {
    let d = g.anchor().dim();
    let span = g.span();
    if !w.source().is_origin()
        || w.source().dim() != d
        || w.sinks().first().map(|v| v.level) != Some(span)
    {
        return Err(WedgeError::DomainMismatch(format!(
            "flow is not a staircase-box flow of height {span} in dimension {d}"
        )));
    }
    let mut out = FlowAssignment::new(g.anchor().clone(), g.top());
    for (a, b, value) in w.edges() {
        if a.level == b.level {
            out.insert(g.gamma_inverse(a), g.gamma_inverse(b), value);
        }
    }
    for n in 0..span as usize {
        let value = h.term(n as u64)?;
        for u in g.level_box(n) {
            let mut up = u.clone();
            up.level += 1;
            out.insert(u, up, value);
        }
    }
    Ok(out.finish())
}

/// Flow-based upper bound on `R(x <-> ∂_r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowBound {
    /// Energy of the transported flow; bounds `R(x <-> ∂_r)` from above.
    pub energy: f64,
    /// `energy / sum_{n < r-s} prod_i 1/(h_i(n)+1)`, an empirical `C_d`.
    pub cd_ratio: f64,
    pub kirchhoff_residual: f64,
}

/// The sequences, the flow on `V_x`, and the resulting bound.
pub fn anchored_flow(
    h: &HSequence,
    x: &Vertex,
    r: u64,
) -> Result<(GSequences, FlowAssignment, FlowBound)> {
    let g = GSequences::derive(h, x, r)?;
    let w = lyons_flow(h, g.span())?;
    let wx = transport_flow(&w, &g, h)?;
    let mut series = 0.0;
    for n in 0..g.span() {
        series += h.term(n)?;
    }
    let bound = FlowBound {
        energy: wx.energy(),
        cd_ratio: wx.energy() / series,
        kirchhoff_residual: wx.kirchhoff_residual(),
    };
    Ok((g, wx, bound))
}

pub fn resistance_upper_bound(h: &HSequence, r: u64, x: &Vertex) -> Result<FlowBound> {
    Ok(anchored_flow(h, x, r)?.2)
}

/// `R_{V_x}(x <-> top of V_x)`, the resistance the transported flow bounds
/// directly.
pub fn vx_resistance(p: &Profile, h: &HSequence, g: &GSequences, tol: f64) -> Result<f64> {
    let graph = RestrictedGraph::induced(p, h, g.vertices(), g.r())?;
    Ok(network::effective_resistance(&graph, g.anchor(), &g.top(), tol)?.value)
}
