#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wedgewalk_core::geometry::{self, Vertex};
use wedgewalk_core::{HSequence, Profile, ProfileFn};

pub const ZERO: ProfileFn = ProfileFn::Const { c: 0.0 };
pub const IDENT: ProfileFn = ProfileFn::Linear { a: 1.0, b: 0.0 };

pub struct Family {
    pub name: &'static str,
    pub profile: Profile,
}

impl Family {
    pub fn h(&self, horizon: u64) -> HSequence {
        HSequence::derive(&self.profile, horizon).unwrap()
    }
}

fn fam(name: &'static str, fns: Vec<ProfileFn>) -> Family {
    Family {
        name,
        profile: Profile::new(fns).unwrap(),
    }
}

/// Jumps by several units at once, so staircases lag the profile.
pub fn jump_table() -> ProfileFn {
    let mut v = vec![0.0, 0.0, 0.0, 5.0, 5.0, 5.0, 5.0, 7.5, 7.5, 9.0];
    while v.len() < 80 {
        let last = *v.last().unwrap();
        v.push(last + if v.len() % 3 == 0 { 1.0 } else { 0.0 });
    }
    ProfileFn::Table(v)
}

/// The wedges every cross-module check runs on.
pub fn families() -> Vec<Family> {
    vec![
        fam("half-line", vec![ZERO]),
        fam("triangle", vec![IDENT]),
        fam("square", vec![IDENT, IDENT]),
        fam(
            "example-exp2-log",
            vec![ProfileFn::Exp { base: 2.0 }, ProfileFn::Log],
        ),
        fam("sqrt", vec![ProfileFn::Power { a: 0.5 }]),
        fam("flat-3", vec![ProfileFn::Const { c: 3.0 }]),
        fam(
            "half-slope-inf",
            vec![ProfileFn::Linear { a: 0.5, b: 0.0 }, ProfileFn::Infinite],
        ),
        fam("jump-table", vec![jump_table()]),
        fam(
            "mixed-3d",
            vec![IDENT, ProfileFn::Const { c: 1.0 }, ProfileFn::Log],
        ),
    ]
}

fn random_fn(rng: &mut ChaCha8Rng, len: usize) -> ProfileFn {
    match rng.gen_range(0..7) {
        0 => ProfileFn::Linear {
            a: rng.gen_range(0.0..1.5),
            b: rng.gen_range(0.0..3.0),
        },
        1 => ProfileFn::Power {
            a: rng.gen_range(0.0..1.3),
        },
        2 => ProfileFn::Exp {
            base: rng.gen_range(1.0..1.6),
        },
        3 => ProfileFn::Log,
        4 => ProfileFn::Const {
            c: rng.gen_range(0.0..4.0),
        },
        5 => ProfileFn::Infinite,
        _ => {
            let mut acc = rng.gen_range(0.0..2.0);
            let mut v = Vec::with_capacity(len);
            for _ in 0..len {
                v.push(acc);
                if rng.gen_bool(0.4) {
                    acc += rng.gen_range(0.0..3.5);
                }
            }
            ProfileFn::Table(v)
        }
    }
}

/// A seeded random profile with `d` coordinates; tables cover `0..len`.
pub fn random_profile(seed: u64, d: usize, len: usize) -> Profile {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Profile::new((0..d).map(|_| random_fn(&mut rng, len)).collect()).unwrap()
}

/// `min { m : h(m) >= x }` by linear scan.
pub fn naive_p(h: &HSequence, i: usize, x: u64) -> Option<u64> {
    (0..=h.horizon()).find(|&m| h.get(i, m).unwrap() >= x)
}

pub fn naive_u(h: &HSequence, v: &Vertex) -> Option<u64> {
    let mut u = v.level;
    for (i, &x) in v.coords.iter().enumerate() {
        u = u.max(naive_p(h, i, x)?);
    }
    Some(u)
}

/// Wedge vertices at levels `<= r` whose coordinates are at most `bound`,
/// found by testing every lattice point.
pub fn brute_wedge(p: &Profile, r: u64, bound: u64) -> Vec<Vertex> {
    let d = p.dim();
    let mut out = Vec::new();
    for level in 0..=r {
        let mut cur = vec![0u64; d];
        loop {
            let v = Vertex::new(cur.clone(), level);
            if geometry::contains(p, &v).unwrap() {
                out.push(v);
            }
            let mut k = d;
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                if cur[k] < bound {
                    cur[k] += 1;
                    break;
                }
                cur[k] = 0;
            }
            if cur.iter().all(|&c| c == 0) {
                break;
            }
        }
    }
    out
}

/// `R(source <-> sinks)` from the Moore-Penrose pseudo-inverse of the
/// Laplacian with the sinks merged into one node.
pub fn dense_resistance(vertices: &[Vertex], source: &Vertex, sinks: &[Vertex]) -> f64 {
    let sink_set: std::collections::BTreeSet<&Vertex> = sinks.iter().collect();
    let mut idx = std::collections::HashMap::new();
    let mut next = 0usize;
    for v in vertices {
        if !sink_set.contains(v) {
            idx.insert(v.clone(), next);
            next += 1;
        }
    }
    let merged = next;
    let n = next + 1;
    let node = |v: &Vertex| {
        if sink_set.contains(v) {
            merged
        } else {
            idx[v]
        }
    };
    let mut lap = DMatrix::<f64>::zeros(n, n);
    for (a, u) in vertices.iter().enumerate() {
        for w in &vertices[a + 1..] {
            if u.l1_distance(w) == 1 {
                let (i, j) = (node(u), node(w));
                if i != j {
                    lap[(i, i)] += 1.0;
                    lap[(j, j)] += 1.0;
                    lap[(i, j)] -= 1.0;
                    lap[(j, i)] -= 1.0;
                }
            }
        }
    }
    let pinv = lap.pseudo_inverse(1e-12).unwrap();
    let s = node(source);
    pinv[(s, s)] + pinv[(merged, merged)] - 2.0 * pinv[(s, merged)]
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
