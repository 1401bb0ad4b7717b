//! Benchmark fixtures.

use wedgewalk_core::{HSequence, Profile, ProfileFn};

const IDENT: ProfileFn = ProfileFn::Linear { a: 1.0, b: 0.0 };

/// `d = 2`, both profiles `f(n) = n`.
pub fn square() -> Profile {
    Profile::new(vec![IDENT, IDENT]).unwrap()
}

/// `f_1(n) = 2^n`, `f_2(n) = ln(n+1)`.
pub fn exp_log() -> Profile {
    Profile::new(vec![ProfileFn::Exp { base: 2.0 }, ProfileFn::Log]).unwrap()
}

pub fn stairs(p: &Profile, horizon: u64) -> HSequence {
    HSequence::derive(p, horizon).unwrap()
}
