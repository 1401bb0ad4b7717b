//! Profile functions, their integer staircases, and the layer index of a vertex.
//!
//! A wedge is cut out of `Z^{d+1}` by `d` weakly increasing profiles
//! `f_i : Z+ -> R+ ∪ {+inf}`: the vertex `(x_1, .., x_d, n)` belongs to the
//! wedge iff `0 <= x_i <= f_i(n)` for every `i`. Each profile induces a
//! staircase `h_i` with `h_i(0) = 0` that climbs by one exactly when the
//! next step still fits under `f_i`. The staircases drive the layer
//! decomposition, the series criterion and the flow construction.
//!
//! Profile values are `f64`. `+inf` is a first-class value; comparisons of
//! an integer against a profile value are done directly in floating point.

use serde::{Deserialize, Serialize};

use crate::error::{Result, WedgeError};
use crate::geometry::Vertex;

/// One coordinate's profile function.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileFn {
    /// `values[n]` for `n < values.len()`; undefined beyond the table.
    Table(Vec<f64>),
    /// `a·n + b`
    Linear { a: f64, b: f64 },
    /// `n^a`
    Power { a: f64 },
    /// `base^n`
    Exp { base: f64 },
    /// natural `ln(n + 1)`
    Log,
    /// constant `c`
    Const { c: f64 },
    /// `+inf` everywhere
    Infinite,
}

/// Asymptotic growth class of a parametric profile, used to certify
/// divergence of the series criterion from the profile's form alone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Growth {
    /// Bounded for all `n`.
    Bounded,
    /// At most `ln(n + 1)`.
    Logarithmic,
    /// At most `n^a` with `0 < a < 1`.
    Sublinear(f64),
    /// Anything else; the staircase is still at most `n`.
    Linear,
}

impl ProfileFn {
    /// Evaluate at `n`. `None` past the end of a table.
    pub fn eval(&self, n: u64) -> Option<f64> {
        let x = n as f64;
        let v = match self {
            ProfileFn::Table(values) => return values.get(n as usize).copied(),
            ProfileFn::Linear { a, b } => a * x + b,
            ProfileFn::Power { a } => x.powf(*a),
            ProfileFn::Exp { base } => base.powf(x),
            ProfileFn::Log => x.ln_1p(),
            ProfileFn::Const { c } => *c,
            ProfileFn::Infinite => f64::INFINITY,
        };
        Some(v)
    }

    /// Growth class, or `None` for tables (which say nothing past their end).
    pub fn growth(&self) -> Option<Growth> {
        match *self {
            ProfileFn::Table(_) => None,
            ProfileFn::Const { .. } => Some(Growth::Bounded),
            ProfileFn::Linear { a: 0.0, .. } => Some(Growth::Bounded),
            ProfileFn::Power { a: 0.0 } => Some(Growth::Bounded),
            ProfileFn::Power { a } if a < 1.0 => Some(Growth::Sublinear(a)),
            ProfileFn::Exp { base: 1.0 } => Some(Growth::Bounded),
            ProfileFn::Log => Some(Growth::Logarithmic),
            _ => Some(Growth::Linear),
        }
    }

    fn check(&self, coord: usize) -> Result<()> {
        let bad = |reason: &str| {
            Err(WedgeError::InvalidParameter {
                coord,
                reason: reason.to_string(),
            })
        };
        match *self {
            ProfileFn::Table(ref values) => {
                if values.is_empty() {
                    return bad("table must have at least one entry");
                }
                for (n, &v) in values.iter().enumerate() {
                    if v.is_nan() {
                        return bad("table entry is NaN");
                    }
                    if v < 0.0 {
                        return Err(WedgeError::NegativeValue {
                            coord,
                            n: n as u64,
                            value: v,
                        });
                    }
                }
                for (n, w) in values.windows(2).enumerate() {
                    if w[1] < w[0] {
                        return Err(WedgeError::NonMonotone {
                            coord,
                            n: n as u64,
                            prev: w[0],
                            value: w[1],
                        });
                    }
                }
                Ok(())
            }
            ProfileFn::Linear { a, b } => {
                if !a.is_finite() || !b.is_finite() {
                    return bad("linear parameters must be finite");
                }
                if a < 0.0 {
                    return Err(WedgeError::NonMonotone {
                        coord,
                        n: 0,
                        prev: b,
                        value: a + b,
                    });
                }
                if b < 0.0 {
                    return Err(WedgeError::NegativeValue {
                        coord,
                        n: 0,
                        value: b,
                    });
                }
                Ok(())
            }
            ProfileFn::Power { a } => {
                if !a.is_finite() {
                    return bad("power exponent must be finite");
                }
                if a < 0.0 {
                    return Err(WedgeError::NonMonotone {
                        coord,
                        n: 1,
                        prev: 1.0,
                        value: 2f64.powf(a),
                    });
                }
                Ok(())
            }
            ProfileFn::Exp { base } => {
                if !base.is_finite() {
                    return bad("exponential base must be finite");
                }
                if base < 0.0 {
                    return Err(WedgeError::NegativeValue {
                        coord,
                        n: 1,
                        value: base,
                    });
                }
                if base < 1.0 {
                    return Err(WedgeError::NonMonotone {
                        coord,
                        n: 0,
                        prev: 1.0,
                        value: base,
                    });
                }
                Ok(())
            }
            ProfileFn::Const { c } => {
                if !c.is_finite() {
                    return bad("constant must be finite; use the infinite profile instead");
                }
                if c < 0.0 {
                    return Err(WedgeError::NegativeValue {
                        coord,
                        n: 0,
                        value: c,
                    });
                }
                Ok(())
            }
            ProfileFn::Log | ProfileFn::Infinite => Ok(()),
        }
    }
}

/// A validated collection of `d >= 1` profiles.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    fns: Vec<ProfileFn>,
}

impl Profile {
    /// Validate raw profile functions.
    pub fn new(fns: Vec<ProfileFn>) -> Result<Self> {
        if fns.is_empty() {
            return Err(WedgeError::ZeroDimension);
        }
        for (coord, f) in fns.iter().enumerate() {
            f.check(coord)?;
        }
        Ok(Profile { fns })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ProfileDoc =
            serde_json::from_str(text).map_err(|e| WedgeError::Parse(e.to_string()))?;
        doc.into_profile()
    }

    pub fn dim(&self) -> usize {
        self.fns.len()
    }

    pub fn functions(&self) -> &[ProfileFn] {
        &self.fns
    }

    /// `f_coord(n)`.
    pub fn eval(&self, coord: usize, n: u64) -> Result<f64> {
        self.fns[coord]
            .eval(n)
            .ok_or_else(|| WedgeError::HorizonExceeded {
                requested: n,
                horizon: self.table_horizon().unwrap_or(u64::MAX),
            })
    }

    /// Last level every profile is defined at, or `None` when unbounded.
    pub fn table_horizon(&self) -> Option<u64> {
        self.fns
            .iter()
            .filter_map(|f| match f {
                ProfileFn::Table(v) => Some(v.len() as u64 - 1),
                _ => None,
            })
            .min()
    }

    /// Largest integer `x` with `x <= f_coord(n)`, saturating at `u64::MAX`.
    pub fn cap(&self, coord: usize, n: u64) -> Result<u64> {
        // `as` saturates: +inf and huge values map to u64::MAX.
        Ok(self.eval(coord, n)?.floor() as u64)
    }

    /// Whether `x <= f_coord(n)`.
    pub fn admits(&self, coord: usize, x: u64, n: u64) -> Result<bool> {
        Ok((x as f64) <= self.eval(coord, n)?)
    }

    /// Origin of the wedge.
    pub fn origin(&self) -> Vertex {
        Vertex::origin(self.dim())
    }
}

/// JSON description of a profile, as read by the command-line tool.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProfileDoc {
    pub d: usize,
    pub profiles: Vec<ProfileSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum ProfileSpec {
    Table { values: Vec<TableValue> },
    Linear { a: f64, b: f64 },
    Power { a: f64 },
    Exp { base: f64 },
    Log,
    Const { c: f64 },
    Inf,
}

/// A table entry: a number or the string `"inf"`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TableValue {
    Num(f64),
    Text(String),
}

impl ProfileDoc {
    pub fn into_profile(self) -> Result<Profile> {
        if self.d == 0 {
            return Err(WedgeError::ZeroDimension);
        }
        if self.d != self.profiles.len() {
            return Err(WedgeError::DimensionMismatch {
                expected: self.d,
                got: self.profiles.len(),
            });
        }
        let fns = self
            .profiles
            .into_iter()
            .map(ProfileSpec::into_fn)
            .collect::<Result<Vec<_>>>()?;
        Profile::new(fns)
    }
}

impl ProfileSpec {
    fn into_fn(self) -> Result<ProfileFn> {
        Ok(match self {
            ProfileSpec::Table { values } => ProfileFn::Table(
                values
                    .into_iter()
                    .map(|v| match v {
                        TableValue::Num(x) => Ok(x),
                        TableValue::Text(s) if s.eq_ignore_ascii_case("inf") => Ok(f64::INFINITY),
                        TableValue::Text(s) => Err(WedgeError::Parse(format!(
                            "table entry {s:?} is neither a number nor \"inf\""
                        ))),
                    })
                    .collect::<Result<Vec<_>>>()?,
            ),
            ProfileSpec::Linear { a, b } => ProfileFn::Linear { a, b },
            ProfileSpec::Power { a } => ProfileFn::Power { a },
            ProfileSpec::Exp { base } => ProfileFn::Exp { base },
            ProfileSpec::Log => ProfileFn::Log,
            ProfileSpec::Const { c } => ProfileFn::Const { c },
            ProfileSpec::Inf => ProfileFn::Infinite,
        })
    }
}

/// The staircases `h_1..h_d` tabulated on `0..=horizon`.
#[derive(Debug, Clone, PartialEq)]
pub struct HSequence {
    h: Vec<Vec<u64>>,
    horizon: u64,
}

impl HSequence {
    /// Run the staircase recursion up to `horizon`: `h_i(n)` is
    /// `h_i(n-1) + 1` when `h_i(n-1) + 1 <= f_i(n)` and `h_i(n-1)` otherwise.
    pub fn derive(profile: &Profile, horizon: u64) -> Result<Self> {
        let len = horizon as usize + 1;
        let mut h = Vec::with_capacity(profile.dim());
        for coord in 0..profile.dim() {
            let mut stairs = Vec::with_capacity(len);
            stairs.push(0u64);
            let mut cur = 0u64;
            for n in 1..=horizon {
                if ((cur + 1) as f64) <= profile.eval(coord, n)? {
                    cur += 1;
                }
                stairs.push(cur);
            }
            h.push(stairs);
        }
        Ok(HSequence { h, horizon })
    }

    pub fn dim(&self) -> usize {
        self.h.len()
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    /// The whole staircase of one coordinate.
    pub fn stairs(&self, coord: usize) -> &[u64] {
        &self.h[coord]
    }

    pub fn get(&self, coord: usize, n: u64) -> Result<u64> {
        self.h[coord]
            .get(n as usize)
            .copied()
            .ok_or(WedgeError::HorizonExceeded {
                requested: n,
                horizon: self.horizon,
            })
    }

    /// `h_coord(n)` for `n` known to be within the horizon.
    #[inline]
    pub(crate) fn at(&self, coord: usize, n: u64) -> u64 {
        self.h[coord][n as usize]
    }

    /// Whether some coordinate climbs at step `n` (`n >= 1`).
    pub fn increments(&self, coord: usize, n: u64) -> Result<bool> {
        Ok(n >= 1 && self.get(coord, n)? > self.get(coord, n - 1)?)
    }

    /// `prod_i (h_i(n) + 1)` as a float.
    pub fn box_volume(&self, n: u64) -> Result<f64> {
        let mut v = 1.0;
        for coord in 0..self.dim() {
            v *= (self.get(coord, n)? + 1) as f64;
        }
        Ok(v)
    }

    /// `prod_i 1 / (h_i(n) + 1)`.
    pub fn term(&self, n: u64) -> Result<f64> {
        let mut t = 1.0;
        for coord in 0..self.dim() {
            t /= (self.get(coord, n)? + 1) as f64;
        }
        Ok(t)
    }

    /// `p_coord(x) = min { m : h_coord(m) >= x }`.
    pub fn p_index(&self, coord: usize, x: u64) -> Result<u64> {
        let stairs = &self.h[coord];
        if x > *stairs.last().expect("staircase is never empty") {
            return Err(WedgeError::HorizonExceeded {
                requested: x,
                horizon: self.horizon,
            });
        }
        Ok(stairs.partition_point(|&v| v < x) as u64)
    }

    /// `u(v) = max(level, p_1(x_1), .., p_d(x_d))`: the index of the layer
    /// containing `v`.
    pub fn u_level(&self, v: &Vertex) -> Result<u64> {
        self.check_dim(v)?;
        let mut u = v.level;
        for (coord, &x) in v.coords.iter().enumerate() {
            u = u.max(self.p_index(coord, x)?);
        }
        Ok(u)
    }

    /// Whether `u(v) <= r`, for a vertex already known to lie in the wedge.
    /// Equivalent to `level <= r` and `x_i <= h_i(r)` for every `i`.
    pub fn within(&self, v: &Vertex, r: u64) -> Result<bool> {
        self.check_dim(v)?;
        if v.level > r {
            return Ok(false);
        }
        for (coord, &x) in v.coords.iter().enumerate() {
            if x > self.get(coord, r)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub(crate) fn check_dim(&self, v: &Vertex) -> Result<()> {
        if v.dim() != self.dim() {
            return Err(WedgeError::DimensionMismatch {
                expected: self.dim(),
                got: v.dim(),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn single(f: ProfileFn) -> Profile {
        Profile::new(vec![f]).unwrap()
    }

    #[test]
    fn constant_zero_table_is_valid() {
        assert!(Profile::new(vec![ProfileFn::Table(vec![0.0, 0.0, 0.0])]).is_ok());
    }

    #[test]
    fn decreasing_table_is_rejected() {
        let err = Profile::new(vec![ProfileFn::Table(vec![2.0, 1.0])]).unwrap_err();
        assert!(matches!(
            err,
            WedgeError::NonMonotone { coord: 0, n: 0, .. }
        ));
    }

    #[test]
    fn negative_and_empty_profiles_are_rejected() {
        assert!(matches!(
            Profile::new(vec![]).unwrap_err(),
            WedgeError::ZeroDimension
        ));
        assert!(matches!(
            Profile::new(vec![ProfileFn::Table(vec![-1.0, 0.0])]).unwrap_err(),
            WedgeError::NegativeValue { .. }
        ));
        assert!(matches!(
            Profile::new(vec![ProfileFn::Const { c: -0.5 }]).unwrap_err(),
            WedgeError::NegativeValue { .. }
        ));
        assert!(matches!(
            Profile::new(vec![ProfileFn::Exp { base: 0.5 }]).unwrap_err(),
            WedgeError::NonMonotone { .. }
        ));
        assert!(matches!(
            Profile::new(vec![ProfileFn::Linear { a: -1.0, b: 3.0 }]).unwrap_err(),
            WedgeError::NonMonotone { .. }
        ));
    }

    #[test]
    fn example_profile_parses_from_json() {
        let p = Profile::from_json(
            r#"{"d": 2, "profiles": [{"type": "exp", "base": 2}, {"type": "log"}]}"#,
        )
        .unwrap();
        assert_eq!(p.dim(), 2);
        assert_eq!(p.functions()[0], ProfileFn::Exp { base: 2.0 });
        assert_eq!(p.functions()[1], ProfileFn::Log);
    }

    #[test]
    fn json_tables_accept_inf() {
        let p = Profile::from_json(
            r#"{"d": 1, "profiles": [{"type": "table", "values": [0, 1.5, "inf"]}]}"#,
        )
        .unwrap();
        assert_eq!(p.eval(0, 2).unwrap(), f64::INFINITY);
        assert!(matches!(
            p.eval(0, 3).unwrap_err(),
            WedgeError::HorizonExceeded {
                requested: 3,
                horizon: 2
            }
        ));
        assert!(Profile::from_json(r#"{"d": 2, "profiles": [{"type": "log"}]}"#).is_err());
        assert!(matches!(
            Profile::from_json(r#"{"d": 0, "profiles": []}"#).unwrap_err(),
            WedgeError::ZeroDimension
        ));
        assert!(Profile::from_json(
            r#"{"d": 1, "profiles": [{"type": "table", "values": ["x"]}]}"#
        )
        .is_err());
    }

    #[test]
    fn staircase_of_zero_profile_is_flat() {
        let h = HSequence::derive(&single(ProfileFn::Const { c: 0.0 }), 5).unwrap();
        assert_eq!(h.stairs(0), &[0, 0, 0, 0, 0, 0]);
    }

    #[test]
    fn staircase_of_example_profile_natural_log() {
        let p = Profile::new(vec![ProfileFn::Exp { base: 2.0 }, ProfileFn::Log]).unwrap();
        let h = HSequence::derive(&p, 8).unwrap();
        assert_eq!(h.stairs(0), &[0, 1, 2, 3, 4, 5, 6, 7, 8]);
        assert_eq!(h.stairs(1), &[0, 0, 1, 1, 1, 1, 1, 2, 2]);
    }

    #[test]
    fn staircase_of_half_slope() {
        let h = HSequence::derive(&single(ProfileFn::Linear { a: 0.5, b: 0.0 }), 6).unwrap();
        assert_eq!(h.stairs(0), &[0, 0, 1, 1, 2, 2, 3]);
    }

    #[test]
    fn infinite_profile_climbs_every_step() {
        let h = HSequence::derive(&single(ProfileFn::Infinite), 4).unwrap();
        assert_eq!(h.stairs(0), &[0, 1, 2, 3, 4]);
    }

    #[test]
    fn table_past_end_is_horizon_exceeded() {
        let p = single(ProfileFn::Table(vec![0.0, 1.0, 2.0]));
        assert!(HSequence::derive(&p, 2).is_ok());
        assert!(matches!(
            HSequence::derive(&p, 3).unwrap_err(),
            WedgeError::HorizonExceeded { .. }
        ));
    }

    #[test]
    fn p_index_examples() {
        let half = HSequence::derive(&single(ProfileFn::Linear { a: 0.5, b: 0.0 }), 10).unwrap();
        assert_eq!(half.p_index(0, 2).unwrap(), 4);
        assert_eq!(half.p_index(0, 0).unwrap(), 0);
        let ident = HSequence::derive(&single(ProfileFn::Linear { a: 1.0, b: 0.0 }), 10).unwrap();
        assert_eq!(ident.p_index(0, 3).unwrap(), 3);
        assert!(matches!(
            half.p_index(0, 6).unwrap_err(),
            WedgeError::HorizonExceeded { .. }
        ));
    }

    #[test]
    fn u_level_examples() {
        let h = HSequence::derive(&single(ProfileFn::Linear { a: 1.0, b: 0.0 }), 10).unwrap();
        assert_eq!(h.u_level(&Vertex::new(vec![2], 3)).unwrap(), 3);
        assert_eq!(h.u_level(&Vertex::new(vec![3], 3)).unwrap(), 3);
        assert_eq!(h.u_level(&Vertex::origin(1)).unwrap(), 0);
    }

    fn arb_fn() -> impl Strategy<Value = ProfileFn> {
        prop_oneof![
            (0.0f64..3.0, 0.0f64..4.0).prop_map(|(a, b)| ProfileFn::Linear { a, b }),
            (0.0f64..2.0).prop_map(|a| ProfileFn::Power { a }),
            (1.0f64..3.0).prop_map(|base| ProfileFn::Exp { base }),
            Just(ProfileFn::Log),
            (0.0f64..6.0).prop_map(|c| ProfileFn::Const { c }),
            Just(ProfileFn::Infinite),
            proptest::collection::vec(0.0f64..2.5, 41).prop_map(|steps| {
                let mut acc = 0.0;
                ProfileFn::Table(
                    steps
                        .into_iter()
                        .map(|s| {
                            acc += if s < 1.0 { 0.0 } else { s };
                            acc
                        })
                        .collect(),
                )
            }),
        ]
    }

    proptest! {
        #[test]
        fn staircase_invariants(fns in proptest::collection::vec(arb_fn(), 1..4)) {
            let p = Profile::new(fns).unwrap();
            let h = HSequence::derive(&p, 40).unwrap();
            for i in 0..p.dim() {
                prop_assert_eq!(h.get(i, 0).unwrap(), 0);
                for n in 0..=40u64 {
                    let v = h.get(i, n).unwrap();
                    prop_assert!((v as f64) <= p.eval(i, n).unwrap());
                    if n < 40 {
                        let step = h.get(i, n + 1).unwrap() - v;
                        prop_assert!(step <= 1);
                    }
                }
                for x in 0..=h.get(i, 40).unwrap() {
                    let m = h.p_index(i, x).unwrap();
                    prop_assert_eq!(h.get(i, m).unwrap(), x);
                    prop_assert!(m == 0 || h.get(i, m - 1).unwrap() < x);
                }
            }
        }

        #[test]
        fn u_level_moves_by_at_most_one_vertically(
            fns in proptest::collection::vec(arb_fn(), 1..4),
            seed in proptest::collection::vec(0u64..40, 4),
        ) {
            let p = Profile::new(fns).unwrap();
            let h = HSequence::derive(&p, 40).unwrap();
            let level = seed[0] % 20;
            let coords: Vec<u64> = (0..p.dim())
                .map(|i| seed[i + 1].min(p.cap(i, level).unwrap()).min(h.get(i, 40).unwrap()))
                .collect();
            let v = Vertex::new(coords.clone(), level);
            let up = Vertex::new(coords, level + 1);
            let diff = h.u_level(&up).unwrap() - h.u_level(&v).unwrap();
            prop_assert!(diff <= 1);
        }
    }
}
