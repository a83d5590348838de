//! A fixed set of locally univalent harmonic maps used by tests, examples and
//! the command-line corpus.

use std::f64::consts::FRAC_PI_3;

use num_complex::Complex64;

use crate::analytic::{AnalyticExpr, Mobius};
use crate::harmonic::{post_affine, rotate_antianalytic, AffineMap, HarmonicMap, RotationMu};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Affine part of the witness-constructed entry.
pub fn witness_affine() -> AffineMap {
    AffineMap::new(c(0.4, 0.0), c(1.0, 0.0), c(1.0, -1.0)).expect("|a| != |b|")
}

/// Rotation part of the witness-constructed entry.
pub fn witness_rotation() -> RotationMu {
    RotationMu::from_angle(FRAC_PI_3)
}

/// `h = z`, `g = z²/2`, so `ω = z`.
pub fn omega_z() -> HarmonicMap {
    HarmonicMap::new(AnalyticExpr::real_polynomial(&[0.0, 0.0, 0.5]), AnalyticExpr::Identity)
        .expect("corpus map is valid")
}

/// `h = z`, `g = z³/3`, so `ω = z²`.
pub fn omega_z2() -> HarmonicMap {
    HarmonicMap::new(AnalyticExpr::real_polynomial(&[0.0, 0.0, 0.0, 1.0 / 3.0]), AnalyticExpr::Identity)
        .expect("corpus map is valid")
}

/// Named corpus maps. Entries whose names start with `analytic-` or
/// `const-dil-` have constant dilatation; the others do not.
pub fn maps() -> Vec<(&'static str, HarmonicMap)> {
    let ok = |g: AnalyticExpr, h: AnalyticExpr| HarmonicMap::new(g, h).expect("corpus map is valid");
    let zero = AnalyticExpr::Constant(c(0.0, 0.0));
    let cubic_h = AnalyticExpr::real_polynomial(&[0.0, 1.0, 0.0, 0.1]);
    let mobius_h = AnalyticExpr::Mobius(Mobius::new(c(1.0, 0.0), c(0.0, 0.0), c(-0.3, 0.0), c(1.0, 0.0)).expect("invertible"));
    vec![
        ("analytic-exp", ok(zero.clone(), AnalyticExpr::Exp)),
        (
            "analytic-mobius",
            ok(
                zero.clone(),
                AnalyticExpr::Mobius(Mobius::new(c(1.0, 0.0), c(0.0, 0.0), c(-0.5, 0.0), c(1.0, 0.0)).expect("invertible")),
            ),
        ),
        ("analytic-poly", ok(zero, AnalyticExpr::real_polynomial(&[0.0, 1.0, 0.2, 0.05]))),
        ("const-dil-cubic", ok(cubic_h.scaled(c(0.3, 0.0)), cubic_h)),
        ("const-dil-exp", ok(AnalyticExpr::Exp.scaled(c(0.2, 0.1)), AnalyticExpr::Exp)),
        ("omega-z", omega_z()),
        ("omega-z2", omega_z2()),
        (
            "omega-poly",
            HarmonicMap::from_dilatation(&[c(0.0, 0.0), c(1.0, 0.0), c(0.3, 0.0)], &[c(0.0, 0.0), c(0.5, 0.0), c(0.2, 0.0)])
                .expect("corpus map is valid"),
        ),
        ("mobius-h", ok(AnalyticExpr::real_polynomial(&[0.0, 0.0, 0.25]), mobius_h)),
        ("witness-omega-z", post_affine(&witness_affine(), &rotate_antianalytic(&witness_rotation(), &omega_z()))),
    ]
}

/// Looks up a corpus map by name.
pub fn by_name(name: &str) -> Option<HarmonicMap> {
    maps().into_iter().find(|(n, _)| *n == name).map(|(_, f)| f)
}
