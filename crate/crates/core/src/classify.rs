//! Recurrence/transience from the series `sum_n prod_i 1/(h_i(n)+1)`.
//!
//! A wedge is recurrent exactly when the series diverges. Finite partial
//! sums cannot decide that in general, so verdicts come in two grades:
//!
//! * `RecurrentCertified` when the profile's parametric form alone bounds
//!   every term below by a divergent comparison series. Since
//!   `h_i(n) <= min(n, f_i(n))`, each coordinate contributes at most a
//!   factor `n`, `n^a`, `ln(n+1)` or a constant, and
//!   `sum 1 / (n^b (ln n)^l)` diverges iff `b < 1`, or `b = 1` and `l <= 1`.
//! * heuristic verdicts from the shape of the partial sums, with documented
//!   thresholds. These are labelled as heuristic in the rationale.

use serde::Serialize;

use crate::error::{Result, WedgeError};
use crate::profile::{Growth, HSequence, Profile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    RecurrentCertified,
    RecurrentHeuristic,
    TransientHeuristic,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    /// Recurrent when `S_N - S_{N/2} >= recurrent · S_{N/2}`.
    pub recurrent: f64,
    /// Transient needs the extrapolated tail below `transient · S_N`.
    pub transient: f64,
    /// ... and `S_N - S_{N/2}` below `increment · S_N`.
    pub increment: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            recurrent: 0.05,
            transient: 0.01,
            increment: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesReport {
    pub verdict: Verdict,
    /// `[N, S_N]` with `S_N = sum_{n < N} prod_i 1/(h_i(n)+1)`.
    pub sums: Vec<(u64, f64)>,
    /// `S_N - S_{N/2}` at the largest `N`.
    pub last_increment: f64,
    /// Power-law extrapolation of `sum_{n >= N}`; `None` when the fitted
    /// decay is no faster than `1/n`.
    pub tail_estimate: Option<f64>,
    pub rationale: String,
}

/// Error-free-transformation accumulator.
#[derive(Debug, Default, Clone, Copy)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// `S_N` for every `N` in `schedule`, returned in increasing `N`.
pub fn partial_sums(h: &HSequence, schedule: &[u64]) -> Result<Vec<(u64, f64)>> {
    let mut points = schedule.to_vec();
    points.sort_unstable();
    points.dedup();
    let Some(&last) = points.last() else {
        return Ok(Vec::new());
    };
    if last > h.horizon() {
        return Err(WedgeError::HorizonExceeded {
            requested: last,
            horizon: h.horizon(),
        });
    }
    let mut acc = Neumaier::default();
    let mut out = Vec::with_capacity(points.len());
    let mut next = points.iter().peekable();
    for n in 0..=last {
        while next.peek() == Some(&&n) {
            out.push((n, acc.value()));
            next.next();
        }
        if n < last {
            acc.add(h.term(n)?);
        }
    }
    Ok(out)
}

/// Powers of ten below `n_max`, then `n_max/4`, `n_max/2` and `n_max`.
pub fn default_schedule(n_max: u64) -> Vec<u64> {
    let mut s = Vec::new();
    let mut p = 10u64;
    while p < n_max {
        s.push(p);
        p = p.saturating_mul(10);
    }
    s.extend([n_max / 4, n_max / 2, n_max]);
    s.retain(|&n| n > 0);
    s.sort_unstable();
    s.dedup();
    s
}

/// A divergence certificate from the profile's parametric form, if any.
pub fn certify(p: &Profile) -> Option<String> {
    let mut linear = 0usize;
    let mut logs = 0usize;
    let mut frac = 0.0f64;
    for f in p.functions() {
        match f.growth()? {
            Growth::Bounded => {}
            Growth::Logarithmic => logs += 1,
            Growth::Sublinear(a) => frac += a,
            Growth::Linear => linear += 1,
        }
    }
    let diverges = if frac == 0.0 {
        linear == 0 || (linear == 1 && logs <= 1)
    } else {
        // The exponent sum must be strictly below 1 with margin; close calls
        // are left uncertified.
        linear == 0 && frac < 1.0 - 1e-9
    };
    diverges.then(|| {
        format!(
            "terms are bounded below by c / (n^{} (ln n)^{}), a divergent series \
             ({linear} linear, {logs} logarithmic, sublinear exponent sum {frac})",
            linear as f64 + frac,
            logs
        )
    })
}

/// Apply the certification rule, then the heuristic thresholds.
pub fn classify(
    h: &HSequence,
    p: &Profile,
    n_max: u64,
    thresholds: &Thresholds,
) -> Result<SeriesReport> {
    if n_max < 4 {
        return Err(WedgeError::HorizonExceeded {
            requested: n_max,
            horizon: 4,
        });
    }
    let schedule = default_schedule(n_max);
    let sums = partial_sums(h, &schedule)?;
    let at = |n: u64| {
        sums.iter()
            .find(|(m, _)| *m == n)
            .map(|&(_, s)| s)
            .expect("schedule contains N and N/2")
    };
    let s_n = at(n_max);
    let s_half = at(n_max / 2);
    let last_increment = s_n - s_half;

    // Fit t(n) ~ (n+1)^-alpha between N/2 and N-1 and integrate the tail.
    let (a, b) = (n_max / 2, n_max - 1);
    let (ta, tb) = (h.term(a)?, h.term(b)?);
    let alpha = (ta / tb).ln() / ((b + 1) as f64 / (a + 1) as f64).ln();
    let tail_estimate = (alpha > 1.0).then(|| tb * (b + 1) as f64 / (alpha - 1.0));

    let (verdict, rationale) = if let Some(cert) = certify(p) {
        (Verdict::RecurrentCertified, format!("certified: {cert}"))
    } else if last_increment >= thresholds.recurrent * s_half {
        (
            Verdict::RecurrentHeuristic,
            format!(
                "heuristic: S_N - S_(N/2) = {last_increment:.6e} is at least {} of S_(N/2) = {s_half:.6e}",
                thresholds.recurrent
            ),
        )
    } else if tail_estimate.is_none() {
        (
            Verdict::RecurrentHeuristic,
            format!(
                "heuristic: terms near N decay like n^-{alpha:.4}, no faster than 1/n, so the extrapolated tail diverges"
            ),
        )
    } else if tail_estimate.is_some_and(|t| t < thresholds.transient * s_n)
        && last_increment < thresholds.increment * s_n
    {
        (
            Verdict::TransientHeuristic,
            format!(
                "heuristic: terms decay like n^-{alpha:.4}; extrapolated tail {:.6e} < {} S_N and S_N - S_(N/2) = {last_increment:.6e} < {} S_N",
                tail_estimate.unwrap_or(f64::NAN),
                thresholds.transient,
                thresholds.increment
            ),
        )
    } else {
        (
            Verdict::Inconclusive,
            format!(
                "no threshold met at N = {n_max}: S_N = {s_n:.6e}, S_N - S_(N/2) = {last_increment:.6e}, decay exponent {alpha:.4}"
            ),
        )
    };
    Ok(SeriesReport {
        verdict,
        sums,
        last_increment,
        tail_estimate,
        rationale,
    })
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

    #[test]
    fn half_line_sums_count_terms() {
        let (_, h) = wedge(vec![ProfileFn::Const { c: 0.0 }], 100);
        assert_eq!(partial_sums(&h, &[100]).unwrap(), vec![(100, 100.0)]);
        assert_eq!(partial_sums(&h, &[1, 0]).unwrap(), vec![(0, 0.0), (1, 1.0)]);
        assert!(partial_sums(&h, &[101]).is_err());
    }

    #[test]
    fn bounded_profile_is_certified() {
        let (p, h) = wedge(vec![ProfileFn::Const { c: 5.0 }], 1000);
        let rep = classify(&h, &p, 1000, &Thresholds::default()).unwrap();
        assert_eq!(rep.verdict, Verdict::RecurrentCertified);
        assert!(rep.rationale.starts_with("certified"));
    }

    #[test]
    fn certificates() {
        let lin = ProfileFn::Linear { a: 1.0, b: 0.0 };
        let cert = |fns| certify(&Profile::new(fns).unwrap()).is_some();
        assert!(cert(vec![lin.clone()]));
        assert!(cert(vec![ProfileFn::Exp { base: 2.0 }, ProfileFn::Log]));
        assert!(!cert(vec![lin.clone(), lin.clone()]));
        assert!(!cert(vec![lin.clone(), ProfileFn::Log, ProfileFn::Log]));
        assert!(cert(vec![ProfileFn::Log, ProfileFn::Log, ProfileFn::Log]));
        assert!(cert(vec![
            ProfileFn::Power { a: 0.4 },
            ProfileFn::Power { a: 0.5 }
        ]));
        assert!(!cert(vec![
            ProfileFn::Power { a: 0.5 },
            ProfileFn::Power { a: 0.5 }
        ]));
        assert!(!cert(vec![ProfileFn::Table(vec![0.0; 4])]));
    }

    #[test]
    fn square_wedge_is_transient() {
        let lin = ProfileFn::Linear { a: 1.0, b: 0.0 };
        let (p, h) = wedge(vec![lin.clone(), lin], 100_000);
        let rep = classify(&h, &p, 100_000, &Thresholds::default()).unwrap();
        assert_eq!(
            rep.verdict,
            Verdict::TransientHeuristic,
            "{}",
            rep.rationale
        );
    }

    #[test]
    fn schedule_shape() {
        assert_eq!(default_schedule(1000), vec![10, 100, 250, 500, 1000]);
        assert_eq!(default_schedule(4), vec![1, 2, 4]);
    }
}
