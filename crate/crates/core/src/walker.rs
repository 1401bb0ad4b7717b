//! Monte Carlo walks on the wedge: killed Green function estimates and
//! collision counts of two independent walks.
//!
//! Each trial draws from its own ChaCha8 stream, keyed by the base seed and
//! the trial index, so results do not depend on how trials are scheduled.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Result, WedgeError};
use crate::geometry::{self, Vertex};
use crate::profile::{HSequence, Profile};

#[derive(Debug, Clone, PartialEq)]
pub struct WalkConfig {
    pub seed: u64,
    /// Number of steps for collision runs.
    pub horizon: u64,
    pub trials: usize,
    /// Truncation level for killed walks.
    pub kill_r: Option<u64>,
    /// Thresholds `k` for the reported fractions `P(collisions >= k)`.
    pub tail_ks: Vec<u64>,
}

impl Default for WalkConfig {
    fn default() -> Self {
        WalkConfig {
            seed: 0,
            horizon: 1000,
            trials: 1000,
            kill_r: None,
            tail_ks: vec![1, 2, 5, 10, 20, 50, 100],
        }
    }
}

/// Per-trial samples with their mean and standard error.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub samples: Vec<f64>,
    pub mean: f64,
    pub stderr: f64,
}

impl Estimate {
    pub fn from_samples(samples: Vec<f64>) -> Self {
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let stderr = if samples.len() > 1 {
            let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
            (var / n).sqrt()
        } else {
            0.0
        };
        Estimate {
            samples,
            mean,
            stderr,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollisionStats {
    /// Collisions at times `0..=T`, one entry per trial.
    pub counts: Vec<u64>,
    pub mean: f64,
    pub stderr: f64,
    /// `(k, fraction of trials with at least k collisions)`.
    pub tail: Vec<(u64, f64)>,
}

/// The random stream of one trial.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// One step of simple random walk: a uniform neighbour.
pub fn step<R: Rng + ?Sized>(p: &Profile, v: &Vertex, rng: &mut R) -> Result<Vertex> {
    let mut nbrs = geometry::neighbors(p, v)?;
    let k = rng.gen_range(0..nbrs.len());
    Ok(nbrs.swap_remove(k))
}

/// Integer caps `floor f_i(n)` tabulated once for fast stepping.
pub(crate) struct CapTable {
    d: usize,
    caps: Vec<u64>,
    levels: u64,
}

impl CapTable {
    /// Caps for levels `0..=max_level`, or up to the end of a shorter table.
    pub(crate) fn new(p: &Profile, max_level: u64) -> Result<Self> {
        let last = p.table_horizon().map_or(max_level, |t| t.min(max_level));
        let d = p.dim();
        let mut caps = Vec::with_capacity((last as usize + 1) * d);
        for n in 0..=last {
            for i in 0..d {
                caps.push(p.cap(i, n)?);
            }
        }
        Ok(CapTable {
            d,
            caps,
            levels: last + 1,
        })
    }

    #[inline]
    fn row(&self, level: u64) -> Result<&[u64]> {
        if level >= self.levels {
            return Err(WedgeError::HorizonExceeded {
                requested: level,
                horizon: self.levels - 1,
            });
        }
        let at = level as usize * self.d;
        Ok(&self.caps[at..at + self.d])
    }

    #[inline]
    fn fits(&self, pos: &[u64], level: u64) -> Result<bool> {
        Ok(pos.iter().zip(self.row(level)?).all(|(x, c)| x <= c))
    }

    /// Move `pos` (coordinates then level) to a uniform neighbour. Returns
    /// the degree of the vertex left.
    #[inline]
    pub(crate) fn step<R: Rng + ?Sized>(&self, pos: &mut [u64], rng: &mut R) -> Result<usize> {
        let d = self.d;
        let level = pos[d];
        let caps = self.row(level)?;
        // Availability of -e_i, +e_i per axis, in neighbour order.
        let down_ok = level > 0 && self.fits(&pos[..d], level - 1)?;
        let up_ok = self.fits(&pos[..d], level + 1)?;
        let open = |axis: usize, up: bool| -> bool {
            match (axis == d, up) {
                (false, false) => pos[axis] > 0,
                (false, true) => pos[axis] < caps[axis],
                (true, false) => down_ok,
                (true, true) => up_ok,
            }
        };
        let deg = (0..=d)
            .map(|axis| open(axis, false) as usize + open(axis, true) as usize)
            .sum::<usize>();
        let pick = rng.gen_range(0..deg);
        let (axis, up) = (0..=d)
            .flat_map(|axis| [(axis, false), (axis, true)])
            .filter(|&(axis, up)| open(axis, up))
            .nth(pick)
            .expect("pick is below the degree");
        if up {
            pos[axis] += 1;
        } else {
            pos[axis] -= 1;
        }
        Ok(deg)
    }
}

fn position(v: &Vertex) -> Vec<u64> {
    let mut pos = v.coords.clone();
    pos.push(v.level);
    pos
}

/// Monte Carlo estimate of `g_{V_r}(x, x)` with `r = kill_r`: visits to `x`
/// (time 0 included) before the first step out of `V_r`, divided by
/// `deg(x)`.
pub fn green_mc(
    p: &Profile,
    h: &HSequence,
    x: &Vertex,
    kill_r: u64,
    cfg: &WalkConfig,
) -> Result<Estimate> {
    if !geometry::contains(p, x)? || kill_r > h.horizon() || !h.within(x, kill_r)? {
        return Err(WedgeError::OutsideTruncation(x.clone()));
    }
    let degree = geometry::neighbors(p, x)?.len() as f64;
    let bounds: Vec<u64> = (0..p.dim()).map(|i| h.at(i, kill_r)).collect();
    let table = CapTable::new(p, kill_r + 2)?;
    let start = position(x);
    let d = p.dim();
    let samples = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(cfg.seed, trial);
            let mut pos = start.clone();
            let mut visits = 1u64;
            loop {
                table.step(&mut pos, &mut rng)?;
                let inside = pos[d] <= kill_r && pos[..d].iter().zip(&bounds).all(|(a, b)| a <= b);
                if !inside {
                    break;
                }
                if pos == start {
                    visits += 1;
                }
            }
            Ok(visits as f64 / degree)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Estimate::from_samples(samples))
}

/// Two independent walks from the origin for `cfg.horizon` steps; counts
/// the times `t` in `0..=T` with `X_t == Y_t`.
pub fn collision_run(p: &Profile, cfg: &WalkConfig) -> Result<CollisionStats> {
    let table = CapTable::new(p, cfg.horizon + 1)?;
    let start = position(&p.origin());
    let counts = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(cfg.seed, trial);
            let mut a = start.clone();
            let mut b = start.clone();
            let mut hits = 1u64;
            for _ in 0..cfg.horizon {
                table.step(&mut a, &mut rng)?;
                table.step(&mut b, &mut rng)?;
                if a == b {
                    hits += 1;
                }
            }
            Ok(hits)
        })
        .collect::<Result<Vec<u64>>>()?;
    let est = Estimate::from_samples(counts.iter().map(|&c| c as f64).collect());
    let tail = cfg
        .tail_ks
        .iter()
        .map(|&k| {
            let hit = counts.iter().filter(|&&c| c >= k).count();
            (k, hit as f64 / counts.len() as f64)
        })
        .collect();
    Ok(CollisionStats {
        counts,
        mean: est.mean,
        stderr: est.stderr,
        tail,
    })
}
