//! Vertices, adjacency and the layer partition of a wedge.
//!
//! Layers are built from the staircases: `Δ_{d+1}(n)` is the full box
//! `prod [0, h_i(n)]` at level `n`; for a coordinate `i` that climbs at step
//! `n`, `Δ_i(n)` is the slab of wedge vertices at or below level `n` whose
//! `i`-th coordinate sits exactly at the new staircase height. The layer
//! `∂_n` is the union of these sets, and `V_r` the union of `∂_0..∂_r`.
//!
//! Coordinate indices are 0-based throughout: `0..d` are the constrained
//! coordinates and index `d` stands for the axial direction.

use std::fmt;

use crate::error::{Result, WedgeError};
use crate::profile::{HSequence, Profile};

/// A lattice point `(x_1, .., x_d, level)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    pub coords: Vec<u64>,
    pub level: u64,
}

impl Vertex {
    pub fn new(coords: Vec<u64>, level: u64) -> Self {
        Vertex { coords, level }
    }

    pub fn origin(d: usize) -> Self {
        Vertex {
            coords: vec![0; d],
            level: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_origin(&self) -> bool {
        self.level == 0 && self.coords.iter().all(|&x| x == 0)
    }

    /// Coordinate `axis` where `axis == d` is the level.
    pub fn axis(&self, axis: usize) -> u64 {
        if axis == self.dim() {
            self.level
        } else {
            self.coords[axis]
        }
    }

    /// Shift along `axis` by `+1` or `-1`; `None` when leaving `Z+`.
    pub fn shifted(&self, axis: usize, up: bool) -> Option<Vertex> {
        let mut v = self.clone();
        let slot = if axis == self.dim() {
            &mut v.level
        } else {
            &mut v.coords[axis]
        };
        *slot = if up {
            slot.checked_add(1)?
        } else {
            slot.checked_sub(1)?
        };
        Some(v)
    }

    /// `|self - other|_1`.
    pub fn l1_distance(&self, other: &Vertex) -> u64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a.abs_diff(*b))
            .sum::<u64>()
            + self.level.abs_diff(other.level)
    }

    /// Parse `"x1,..,xd,n"` (also accepts `:` as a separator).
    pub fn parse(text: &str) -> Option<Vertex> {
        let parts = text
            .split([',', ':'])
            .map(|s| s.trim().parse::<u64>().ok())
            .collect::<Option<Vec<_>>>()?;
        let (&level, coords) = parts.split_last()?;
        Some(Vertex::new(coords.to_vec(), level))
    }
}

impl fmt::Display for Vertex {
    /// Colon-separated, so vertices can sit inside a CSV cell.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for x in &self.coords {
            write!(f, "{x}:")?;
        }
        write!(f, "{}", self.level)
    }
}

/// `true` iff every coordinate satisfies `0 <= x_i <= f_i(level)`.
pub fn contains(p: &Profile, v: &Vertex) -> Result<bool> {
    if v.dim() != p.dim() {
        return Err(WedgeError::DimensionMismatch {
            expected: p.dim(),
            got: v.dim(),
        });
    }
    for (coord, &x) in v.coords.iter().enumerate() {
        if !p.admits(coord, x, v.level)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Wedge neighbours of `v` in a fixed order: `-e_1, +e_1, .., -e_{d+1}, +e_{d+1}`.
pub fn neighbors(p: &Profile, v: &Vertex) -> Result<Vec<Vertex>> {
    if !contains(p, v)? {
        return Err(WedgeError::NotInWedge(v.clone()));
    }
    let mut out = Vec::with_capacity(2 * (p.dim() + 1));
    for axis in 0..=p.dim() {
        for up in [false, true] {
            if let Some(w) = v.shifted(axis, up) {
                if contains(p, &w)? {
                    out.push(w);
                }
            }
        }
    }
    Ok(out)
}

/// Visit every point of `prod [0, bounds_i]` in lexicographic order.
pub(crate) fn for_each_in_box(bounds: &[u64], mut f: impl FnMut(&[u64])) {
    let mut cur = vec![0u64; bounds.len()];
    loop {
        f(&cur);
        let mut k = bounds.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            if cur[k] < bounds[k] {
                cur[k] += 1;
                break;
            }
            cur[k] = 0;
        }
    }
}

fn check_horizon(h: &HSequence, n: u64) -> Result<()> {
    if n > h.horizon() {
        return Err(WedgeError::HorizonExceeded {
            requested: n,
            horizon: h.horizon(),
        });
    }
    Ok(())
}

/// `Δ_{i+1}(n)` for `i in 0..d`, and the axial box `Δ_{d+1}(n)` for `i == d`.
/// Sorted lexicographically.
pub fn delta_set(h: &HSequence, p: &Profile, i: usize, n: u64) -> Result<Vec<Vertex>> {
    let d = p.dim();
    assert!(i <= d, "delta index {i} out of range for d = {d}");
    check_horizon(h, n)?;
    if n == 0 {
        return Ok(vec![Vertex::origin(d)]);
    }
    let tops: Vec<u64> = (0..d).map(|j| h.at(j, n)).collect();
    let mut out = Vec::new();
    if i == d {
        for_each_in_box(&tops, |c| out.push(Vertex::new(c.to_vec(), n)));
        return Ok(out);
    }
    if !h.increments(i, n)? {
        return Ok(out);
    }
    for level in 0..=n {
        if !p.admits(i, tops[i], level)? {
            continue;
        }
        let mut bounds = Vec::with_capacity(d);
        for (j, &top) in tops.iter().enumerate() {
            bounds.push(if j == i { 0 } else { top.min(p.cap(j, level)?) });
        }
        for_each_in_box(&bounds, |c| {
            let mut coords = c.to_vec();
            coords[i] = tops[i];
            out.push(Vertex::new(coords, level));
        });
    }
    out.sort();
    Ok(out)
}

/// One layer `∂_n` with the sets it was assembled from.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerSet {
    pub index: u64,
    /// Deduplicated and sorted.
    pub members: Vec<Vertex>,
    /// `Δ_1(n)..Δ_{d+1}(n)`, possibly overlapping.
    pub parts: Vec<Vec<Vertex>>,
}

impl LayerSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

pub fn boundary_layer(h: &HSequence, p: &Profile, n: u64) -> Result<LayerSet> {
    let parts = (0..=p.dim())
        .map(|i| delta_set(h, p, i, n))
        .collect::<Result<Vec<_>>>()?;
    let mut members: Vec<Vertex> = parts.iter().flatten().cloned().collect();
    members.sort();
    members.dedup();
    Ok(LayerSet {
        index: n,
        members,
        parts,
    })
}

/// Vertices of `V_r` from the ambient boxes: every wedge vertex at level
/// `<= r` with `x_i <= h_i(horizon)`, filtered by `u <= r`.
pub fn truncation_by_filter(h: &HSequence, p: &Profile, r: u64) -> Result<Vec<Vertex>> {
    check_horizon(h, r)?;
    let d = p.dim();
    let ceiling: Vec<u64> = (0..d).map(|j| h.at(j, h.horizon())).collect();
    let mut out = Vec::new();
    for level in 0..=r {
        let bounds = (0..d)
            .map(|j| Ok(ceiling[j].min(p.cap(j, level)?)))
            .collect::<Result<Vec<_>>>()?;
        let mut err = None;
        for_each_in_box(&bounds, |c| {
            let v = Vertex::new(c.to_vec(), level);
            match h.u_level(&v) {
                Ok(u) if u <= r => out.push(v),
                Ok(_) => {}
                Err(e) => err = Some(e),
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
    }
    out.sort();
    Ok(out)
}

/// `V_r` as the union of the layers `∂_0..∂_r`, sorted.
pub fn truncation_by_layers(h: &HSequence, p: &Profile, r: u64) -> Result<Vec<Vertex>> {
    check_horizon(h, r)?;
    let mut out = Vec::new();
    for n in 0..=r {
        out.extend(boundary_layer(h, p, n)?.members);
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// `V_r`, built both from the layer union and by filtering the ambient
/// boxes; the two must agree.
pub fn enumerate_truncation(h: &HSequence, p: &Profile, r: u64) -> Result<Vec<Vertex>> {
    let by_layers = truncation_by_layers(h, p, r)?;
    let by_filter = truncation_by_filter(h, p, r)?;
    assert_eq!(
        by_layers, by_filter,
        "layer union and u-level filter disagree on V_{r}"
    );
    Ok(by_filter)
}
