//! Grounded Laplacian solves for unit-conductance graphs.
//!
//! The unknowns are the node potentials of the connected component of the
//! source once the grounded nodes are removed; grounded nodes sit at
//! potential zero. The system is the restricted graph Laplacian, which is
//! symmetric positive definite as soon as the component touches a grounded
//! node. Solved with Jacobi-preconditioned conjugate gradients.

use std::collections::VecDeque;

use crate::error::{Result, WedgeError};

pub(crate) struct GroundedSolution {
    /// Potential of every node of the graph; zero off the source component.
    pub potential: Vec<f64>,
    /// `|b - A x|_2 / |b|_2` recomputed from the final iterate.
    pub residual: f64,
    pub iterations: usize,
}

/// Inject `current` at `source`, hold `grounded` nodes at zero, and solve
/// for the potentials.
pub(crate) fn solve_grounded(
    adjacency: &[Vec<usize>],
    grounded: &[bool],
    source: usize,
    current: f64,
    tol: f64,
) -> Result<GroundedSolution> {
    if grounded[source] {
        return Err(WedgeError::SourceIsSink);
    }
    let n_all = adjacency.len();
    let mut local = vec![usize::MAX; n_all];
    let mut nodes = vec![source];
    local[source] = 0;
    let mut touches_ground = false;
    let mut queue = VecDeque::from([source]);
    while let Some(v) = queue.pop_front() {
        for &w in &adjacency[v] {
            if grounded[w] {
                touches_ground = true;
            } else if local[w] == usize::MAX {
                local[w] = nodes.len();
                nodes.push(w);
                queue.push_back(w);
            }
        }
    }
    if !touches_ground {
        return Err(WedgeError::Disconnected);
    }

    // CSR over the component; the diagonal is the full degree.
    let n = nodes.len();
    let mut offsets = Vec::with_capacity(n + 1);
    let mut cols = Vec::new();
    let mut diag = Vec::with_capacity(n);
    offsets.push(0);
    for &v in &nodes {
        diag.push(adjacency[v].len() as f64);
        cols.extend(
            adjacency[v]
                .iter()
                .filter(|&&w| !grounded[w])
                .map(|&w| local[w]),
        );
        offsets.push(cols.len());
    }
    let apply = |x: &[f64], out: &mut [f64]| {
        for i in 0..n {
            let mut acc = diag[i] * x[i];
            for &j in &cols[offsets[i]..offsets[i + 1]] {
                acc -= x[j];
            }
            out[i] = acc;
        }
    };

    let mut b = vec![0.0; n];
    b[0] = current;
    let b_norm = current.abs();
    let mut x = vec![0.0; n];
    let mut r = b.clone();
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(ri, di)| ri / di).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let target = tol * 1e-3 * b_norm;
    let max_iter = 5 * n + 500;
    let mut iterations = 0;
    while iterations < max_iter && norm(&r) > target {
        apply(&p, &mut ap);
        let alpha = rz / dot(&p, &ap);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
        iterations += 1;
    }

    apply(&x, &mut ap);
    let residual = ap
        .iter()
        .zip(&b)
        .map(|(a, bi)| (bi - a) * (bi - a))
        .sum::<f64>()
        .sqrt()
        / b_norm;
    if residual.is_nan() || residual > tol {
        return Err(WedgeError::SolverFailure {
            residual,
            tol,
            iterations,
        });
    }
    let mut potential = vec![0.0; n_all];
    for (i, &v) in nodes.iter().enumerate() {
        potential[v] = x[i];
    }
    Ok(GroundedSolution {
        potential,
        residual,
        iterations,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
